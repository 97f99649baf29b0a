use std::collections::HashMap;
use std::f64::consts::PI;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::geometry::LatticeGeometry;
use super::small::{self, c, CMat};
use crate::error::{Error, Result};
use crate::linalg::{MatrixKind, OperatorMatrix};
use crate::C64;

/// Magnetic flux per unit cell, in units of the flux quantum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flux {
    Zero,
    Rational { p: i64, q: i64 },
    Real(f64),
}

impl Flux {
    pub fn value(self) -> f64 {
        match self {
            Flux::Zero => 0.0,
            Flux::Rational { p, q } => p as f64 / q as f64,
            Flux::Real(x) => x,
        }
    }

    pub fn is_zero(self) -> bool {
        self.value() == 0.0
    }

    /// Magnetic cell enlargement along axis 1 for Bloch evaluation.
    pub fn denominator(self) -> Result<usize> {
        match self {
            Flux::Zero => Ok(1),
            Flux::Rational { p, q } if q > 0 => {
                let g = gcd(p.unsigned_abs(), q as u64);
                Ok((q as u64 / g.max(1)) as usize)
            }
            Flux::Rational { .. } => Err(Error::InvalidGeometry("flux denominator must be positive".into())),
            Flux::Real(x) if x == 0.0 => Ok(1),
            Flux::Real(x) => Err(Error::IrrationalFluxUnsupported(x)),
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Where random disorder enters the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DisorderChannel {
    /// One uniform value per cell times the identity on orbitals.
    ScalarOnsite,
    /// Independent uniform value per orbital.
    MatrixDiagonal,
    /// Every hopping term `T` of a cell becomes `(1 + δ)·T`; preserves sublattice structure.
    Bond,
}

/// i.i.d. uniform disorder on `[−W/2, W/2]`; `strength = 0` means clean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disorder {
    pub strength: f64,
    pub channel: DisorderChannel,
}

impl Disorder {
    pub fn none() -> Self {
        Disorder { strength: 0.0, channel: DisorderChannel::ScalarOnsite }
    }
}

/// Anti-unitary symmetry `Θ = M·conj` with `Θ² = sign`.
#[derive(Debug, Clone)]
pub struct AntiUnitary {
    pub matrix: CMat,
    pub sign: i8,
}

/// Declared symmetry metadata, validated when a Hamiltonian is built.
#[derive(Debug, Clone, Default)]
pub struct Symmetries {
    /// Grading `J` with `JHJ = −H`.
    pub chiral: Option<CMat>,
    /// `I* H̄ I = H`.
    pub trs: Option<AntiUnitary>,
    /// `K* H̄ K = −H`.
    pub phs: Option<AntiUnitary>,
}

/// One hopping term `⟨n|H|n+a⟩ = T`; the conjugate term at `−a` is implied.
#[derive(Debug, Clone)]
pub struct Hopping {
    pub displacement: Vec<i64>,
    pub matrix: CMat,
}

/// Geometry-independent tight-binding model.
#[derive(Debug, Clone)]
pub struct TightBindingModel {
    pub name: String,
    pub d: usize,
    pub orbitals: usize,
    pub onsite: CMat,
    pub hoppings: Vec<Hopping>,
    pub flux: Flux,
    /// Axis-1 coordinate where the Landau-gauge vector potential vanishes.
    pub gauge_origin: f64,
    pub disorder: Disorder,
    pub symmetries: Symmetries,
}

const SYMMETRY_TOL: f64 = 1e-12;

impl TightBindingModel {
    pub fn new(name: &str, d: usize, onsite: CMat) -> Self {
        TightBindingModel {
            name: name.to_string(),
            d,
            orbitals: onsite.nrows(),
            onsite,
            hoppings: Vec::new(),
            flux: Flux::Zero,
            gauge_origin: 0.0,
            disorder: Disorder::none(),
            symmetries: Symmetries::default(),
        }
    }

    /// Add `⟨n|H|n+a⟩ += T` (and its conjugate); `a = 0` adds `T + T*` on site.
    pub fn add_hopping(&mut self, a: &[i64], t: CMat) {
        assert_eq!(a.len(), self.d, "displacement dimension");
        if a.iter().all(|&x| x == 0) {
            self.onsite = &self.onsite + &t + small::adjoint(&t);
            return;
        }
        if let Some(h) = self.hoppings.iter_mut().find(|h| h.displacement == a) {
            h.matrix = &h.matrix + &t;
        } else if let Some(h) = self.hoppings.iter_mut().find(|h| h.displacement.iter().zip(a).all(|(x, y)| *x == -*y)) {
            h.matrix = &h.matrix + small::adjoint(&t);
        } else {
            self.hoppings.push(Hopping { displacement: a.to_vec(), matrix: t });
        }
    }

    pub fn with_flux(mut self, flux: Flux) -> Self {
        self.flux = flux;
        self
    }

    pub fn with_disorder(mut self, strength: f64, channel: DisorderChannel) -> Self {
        self.disorder = Disorder { strength, channel };
        self
    }

    /// Largest |a_j| over all hoppings.
    pub fn range(&self) -> usize {
        self.hoppings.iter().flat_map(|h| h.displacement.iter().map(|x| x.unsigned_abs() as usize)).max().unwrap_or(0)
    }

    /// Structural checks of the symbolic data.
    pub fn validate(&self) -> Result<()> {
        let l = self.orbitals;
        if self.onsite.nrows() != l || self.onsite.ncols() != l {
            return Err(Error::DimensionMismatch("onsite block".into()));
        }
        if small::max_abs(&(&self.onsite - small::adjoint(&self.onsite))) > SYMMETRY_TOL * small::max_abs(&self.onsite).max(1.0) {
            return Err(Error::SymmetryViolation("onsite block not hermitian".into()));
        }
        for h in &self.hoppings {
            if h.displacement.len() != self.d || h.matrix.nrows() != l || h.matrix.ncols() != l {
                return Err(Error::DimensionMismatch(format!("hopping {:?}", h.displacement)));
            }
        }
        if !self.flux.is_zero() && self.d < 2 {
            return Err(Error::InvalidGeometry("flux requires d >= 2".into()));
        }
        let s = &self.symmetries;
        if let Some(j) = &s.chiral {
            let jj = j * j;
            if small::max_abs(&(&jj - small::eye(l))) > SYMMETRY_TOL {
                return Err(Error::SymmetryViolation("chiral J is not an involution".into()));
            }
        }
        for (name, op) in [("TRS", &s.trs), ("PHS", &s.phs)] {
            if let Some(op) = op {
                let sq = &op.matrix * small::conj(&op.matrix);
                let target = small::scale(&small::eye(l), c(op.sign as f64, 0.0));
                if small::max_abs(&(&sq - &target)) > SYMMETRY_TOL {
                    return Err(Error::SymmetryViolation(format!("{name} square is not {}", op.sign)));
                }
            }
        }
        Ok(())
    }

    /// Complex-conjugate model (reverses orientation-odd invariants).
    pub fn conjugated(&self) -> Self {
        let mut m = self.clone();
        m.name = format!("conj({})", self.name);
        m.onsite = small::conj(&self.onsite);
        for h in &mut m.hoppings {
            h.matrix = small::conj(&h.matrix);
        }
        m.flux = match self.flux {
            Flux::Zero => Flux::Zero,
            Flux::Rational { p, q } => Flux::Rational { p: -p, q },
            Flux::Real(x) => Flux::Real(-x),
        };
        m.gauge_origin = self.gauge_origin;
        m.symmetries = Symmetries {
            chiral: self.symmetries.chiral.as_ref().map(small::conj),
            trs: self.symmetries.trs.as_ref().map(|o| AntiUnitary { matrix: small::conj(&o.matrix), sign: o.sign }),
            phs: self.symmetries.phs.as_ref().map(|o| AntiUnitary { matrix: small::conj(&o.matrix), sign: o.sign }),
        };
        m
    }

    /// Decoupled direct sum of two models on the same lattice.
    pub fn direct_sum(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d, "direct sum needs equal dimension");
        let (la, lb) = (self.orbitals, other.orbitals);
        let mut m = TightBindingModel::new(&format!("{}+{}", self.name, other.name), self.d, small::direct_sum(&self.onsite, &other.onsite));
        for h in &self.hoppings {
            m.add_hopping(&h.displacement, small::direct_sum(&h.matrix, &small::zeros(lb)));
        }
        for h in &other.hoppings {
            m.add_hopping(&h.displacement, small::direct_sum(&small::zeros(la), &h.matrix));
        }
        m.flux = self.flux;
        m.disorder = self.disorder;
        let both = |a: &Option<CMat>, b: &Option<CMat>| match (a, b) {
            (Some(x), Some(y)) => Some(small::direct_sum(x, y)),
            _ => None,
        };
        let both_anti = |a: &Option<AntiUnitary>, b: &Option<AntiUnitary>| match (a, b) {
            (Some(x), Some(y)) if x.sign == y.sign => Some(AntiUnitary { matrix: small::direct_sum(&x.matrix, &y.matrix), sign: x.sign }),
            _ => None,
        };
        m.symmetries = Symmetries {
            chiral: both(&self.symmetries.chiral, &other.symmetries.chiral),
            trs: both_anti(&self.symmetries.trs, &other.symmetries.trs),
            phs: both_anti(&self.symmetries.phs, &other.symmetries.phs),
        };
        m
    }

    /// Peierls factor multiplying `⟨n|H|n+a⟩` for a cell at axis-1 coordinate `x1`.
    pub fn peierls(&self, x1: f64, a: &[i64]) -> C64 {
        let phi = self.flux.value();
        if phi == 0.0 || self.d < 2 || a[1] == 0 {
            return c(1.0, 0.0);
        }
        let theta = -2.0 * PI * phi * a[1] as f64 * (x1 + 0.5 * a[0] as f64 - self.gauge_origin);
        C64::from_polar(1.0, theta)
    }
}

/// Uniform variate in `[−1/2, 1/2)` addressed by `(seed, stream, counter)`.
///
/// ChaCha is a counter-mode generator, so any entry can be produced without
/// generating its predecessors.
pub fn counter_uniform(seed: u64, stream: u64, counter: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(2 * counter as u128);
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64) - 0.5
}

const STREAM_ONSITE: u64 = 1;
const STREAM_BOND: u64 = 2;

/// Finite-volume Hamiltonian of `model` on `geom`, deterministic in `seed`.
pub fn build_hamiltonian(model: &TightBindingModel, geom: &LatticeGeometry, seed: u64) -> Result<OperatorMatrix> {
    model.validate()?;
    if geom.d() != model.d || geom.orbitals != model.orbitals {
        return Err(Error::GeometryMismatch(format!(
            "model d={} L={} vs geometry d={} L={}",
            model.d,
            model.orbitals,
            geom.d(),
            geom.orbitals
        )));
    }
    for h in &model.hoppings {
        for (j, &a) in h.displacement.iter().enumerate() {
            if a.unsigned_abs() as usize >= geom.extent[j] {
                return Err(Error::GeometryTooSmall(format!("hopping {:?} exceeds extent {:?}", h.displacement, geom.extent)));
            }
        }
    }
    let phi = model.flux.value();
    if phi != 0.0 && geom.boundary[0].is_periodic() && model.hoppings.iter().any(|h| h.displacement[1] != 0) {
        let w = phi * geom.extent[0] as f64;
        if (w - w.round()).abs() > 1e-12 {
            return Err(Error::InvalidGeometry(format!("flux·N1 = {w} must be an integer on a periodic axis 1")));
        }
    }

    let l = model.orbitals;
    let n_terms = model.hoppings.len() as u64 + 1;
    let dis = model.disorder;
    let mut trip: Vec<(usize, usize, C64)> = Vec::with_capacity(geom.dim() * l * (2 * model.hoppings.len() + 1) * 2);
    for cell in 0..geom.cells() {
        let x = geom.coords(cell);
        let r0 = cell * l;
        let bond = |t: u64| {
            if dis.strength > 0.0 && dis.channel == DisorderChannel::Bond {
                1.0 + dis.strength * counter_uniform(seed, STREAM_BOND, cell as u64 * n_terms + t)
            } else {
                1.0
            }
        };
        let b0 = bond(0);
        for i in 0..l {
            for j in 0..l {
                let mut v = model.onsite[(i, j)];
                if i != j {
                    v *= b0;
                }
                if v != c(0.0, 0.0) {
                    trip.push((r0 + i, r0 + j, v));
                }
            }
        }
        if dis.strength > 0.0 {
            match dis.channel {
                DisorderChannel::ScalarOnsite => {
                    let v = dis.strength * counter_uniform(seed, STREAM_ONSITE, cell as u64);
                    for i in 0..l {
                        trip.push((r0 + i, r0 + i, c(v, 0.0)));
                    }
                }
                DisorderChannel::MatrixDiagonal => {
                    for i in 0..l {
                        let v = dis.strength * counter_uniform(seed, STREAM_ONSITE, (cell * l + i) as u64);
                        trip.push((r0 + i, r0 + i, c(v, 0.0)));
                    }
                }
                DisorderChannel::Bond => {}
            }
        }
        for (t, h) in model.hoppings.iter().enumerate() {
            let Some(target) = geom.neighbor(cell, &h.displacement) else { continue };
            let ph = if model.d >= 2 { model.peierls(x[0] as f64, &h.displacement) } else { c(1.0, 0.0) } * bond(t as u64 + 1);
            let c0 = target * l;
            for i in 0..l {
                for j in 0..l {
                    let v = h.matrix[(i, j)];
                    if v != c(0.0, 0.0) {
                        let v = v * ph;
                        trip.push((r0 + i, c0 + j, v));
                        trip.push((c0 + j, r0 + i, v.conj()));
                    }
                }
            }
        }
    }
    let h = OperatorMatrix::from_triplets(geom.dim(), MatrixKind::Hermitian, trip)?;
    validate_symmetries(model, &h)?;
    Ok(h)
}

/// Check declared symmetries on every `L×L` cell block of a built Hamiltonian.
pub fn validate_symmetries(model: &TightBindingModel, h: &OperatorMatrix) -> Result<()> {
    let s = &model.symmetries;
    if s.chiral.is_none() && s.trs.is_none() && s.phs.is_none() {
        return Ok(());
    }
    let l = model.orbitals;
    let mut blocks: HashMap<(usize, usize), CMat> = HashMap::new();
    for (i, j, v) in h.entries() {
        blocks.entry((i / l, j / l)).or_insert_with(|| small::zeros(l))[(i % l, j % l)] = v;
    }
    let scale = h.max_abs_entry().max(f64::MIN_POSITIVE);
    let tol = 1e-10 * scale;
    for b in blocks.values() {
        if let Some(j) = &s.chiral {
            if small::max_abs(&(j * b * j + b)) > tol {
                return Err(Error::SymmetryViolation("chiral: JHJ != -H".into()));
            }
        }
        if let Some(op) = &s.trs {
            let t = small::adjoint(&op.matrix) * small::conj(b) * &op.matrix;
            if small::max_abs(&(&t - b)) > tol {
                return Err(Error::SymmetryViolation("time reversal: I* conj(H) I != H".into()));
            }
        }
        if let Some(op) = &s.phs {
            let t = small::adjoint(&op.matrix) * small::conj(b) * &op.matrix;
            if small::max_abs(&(&t + b)) > tol {
                return Err(Error::SymmetryViolation("particle-hole: K* conj(H) K != -H".into()));
            }
        }
    }
    Ok(())
}

/// Bloch matrix `H_k = Σ_a T_a e^{ik·a} + h.c.` on the (magnetic) unit cell.
///
/// With rational flux `p/q` the cell is enlarged `q` times along axis 1 and
/// `k_1` is the magnetic-zone momentum conjugate to supercell translations.
pub fn bloch_hamiltonian(model: &TightBindingModel, k: &[f64]) -> Result<CMat> {
    let q = model.flux.denominator()?;
    let l = model.orbitals;
    let n = l * q;
    let mut hk = small::zeros(n);
    for s in 0..q {
        for i in 0..l {
            for j in 0..l {
                hk[(s * l + i, s * l + j)] += model.onsite[(i, j)];
            }
        }
        for h in &model.hoppings {
            let a = &h.displacement;
            let t1 = s as i64 + a[0];
            let (m, s2) = (t1.div_euclid(q as i64), t1.rem_euclid(q as i64) as usize);
            let mut arg = k[0] * m as f64;
            for (kj, aj) in k.iter().zip(a).skip(1) {
                arg += kj * *aj as f64;
            }
            let ph = C64::from_polar(1.0, arg) * if model.d >= 2 { model.peierls(s as f64, a) } else { c(1.0, 0.0) };
            for i in 0..l {
                for j in 0..l {
                    let v = h.matrix[(i, j)] * ph;
                    hk[(s * l + i, s2 * l + j)] += v;
                    hk[(s2 * l + j, s * l + i)] += v.conj();
                }
            }
        }
    }
    Ok(hk)
}
