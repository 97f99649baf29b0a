use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::model::{AntiUnitary, Flux, TightBindingModel};
use super::small::{self, c, kron, pauli, CMat};
use crate::error::{Error, Result};

/// Named real parameters of a built-in model.
pub type Params = BTreeMap<String, f64>;

/// Description of a built-in model for listings.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ModelInfo {
    pub name: &'static str,
    pub d: usize,
    pub orbitals: usize,
    pub required: &'static [&'static str],
    pub optional: &'static [(&'static str, f64)],
    pub summary: &'static str,
}

pub const CATALOG: &[ModelInfo] = &[
    ModelInfo {
        name: "harper",
        d: 2,
        orbitals: 1,
        required: &["flux"],
        optional: &[("t", 1.0)],
        summary: "square lattice in a uniform magnetic field (Landau gauge along axis 1)",
    },
    ModelInfo {
        name: "haldane",
        d: 2,
        orbitals: 2,
        required: &["t1", "t2", "phi", "M"],
        optional: &[],
        summary: "honeycomb lattice with complex next-nearest hopping and staggered mass",
    },
    ModelInfo {
        name: "ssh",
        d: 1,
        orbitals: 2,
        required: &["v", "w"],
        optional: &[("w2", 0.0)],
        summary: "dimerized chain, chiral J = sigma3; w2 adds a two-cell hopping",
    },
    ModelInfo {
        name: "kane_mele",
        d: 2,
        orbitals: 4,
        required: &["t", "lso", "lr", "lv"],
        optional: &[],
        summary: "honeycomb with spin-orbit, Rashba and staggered terms; odd time reversal",
    },
    ModelInfo {
        name: "pip_bdg",
        d: 2,
        orbitals: 2,
        required: &["t", "delta", "mu"],
        optional: &[],
        summary: "spinless p+ip superconductor in BdG form; even particle-hole symmetry",
    },
    ModelInfo {
        name: "wilson_dirac_3d",
        d: 3,
        orbitals: 4,
        required: &["m"],
        optional: &[],
        summary: "cubic Wilson-Dirac insulator with odd time reversal; band inversion at m = 1 and m = 3",
    },
    ModelInfo {
        name: "chiral_3d",
        d: 3,
        orbitals: 4,
        required: &["m"],
        optional: &[],
        summary: "cubic chiral model with A(k) = m + sum cos k_j + i sum sin k_j sigma_j",
    },
];

fn get(name: &str, params: &Params, key: &str) -> Result<f64> {
    params
        .get(key)
        .copied()
        .ok_or_else(|| Error::MissingParameter { model: name.to_string(), param: key.to_string() })
}

fn opt(params: &Params, key: &str, default: f64) -> f64 {
    params.get(key).copied().unwrap_or(default)
}

/// Rational flux `p/q` with `q ≤ 1000` when `x` is one to 1e-12, else real.
pub fn flux_from_real(x: f64) -> Flux {
    if x == 0.0 {
        return Flux::Zero;
    }
    for q in 1..=1000i64 {
        let p = (x * q as f64).round();
        if (x - p / q as f64).abs() < 1e-12 {
            return Flux::Rational { p: p as i64, q };
        }
    }
    Flux::Real(x)
}

/// Construct a named built-in model.
pub fn builtin_model(name: &str, params: &Params) -> Result<TightBindingModel> {
    let info = CATALOG.iter().find(|m| m.name == name).ok_or_else(|| Error::UnknownModel(name.to_string()))?;
    for key in info.required {
        get(name, params, key)?;
    }
    let p = |k: &str| get(name, params, k).unwrap();
    let model = match name {
        "harper" => harper(p("flux"), opt(params, "t", 1.0)),
        "haldane" => haldane(p("t1"), p("t2"), p("phi"), p("M")),
        "ssh" => ssh(p("v"), p("w"), opt(params, "w2", 0.0)),
        "kane_mele" => kane_mele(p("t"), p("lso"), p("lr"), p("lv")),
        "pip_bdg" => pip_bdg(p("t"), p("delta"), p("mu")),
        "wilson_dirac_3d" => wilson_dirac_3d(p("m")),
        "chiral_3d" => chiral_3d(p("m")),
        _ => unreachable!(),
    };
    model.validate()?;
    Ok(model)
}

pub fn harper(flux: f64, t: f64) -> TightBindingModel {
    let mut m = TightBindingModel::new("harper", 2, small::zeros(1));
    let hop = small::real_diag(&[t]);
    m.add_hopping(&[1, 0], hop.clone());
    m.add_hopping(&[0, 1], hop);
    m.with_flux(flux_from_real(flux))
}

/// Haldane model in Bravais coordinates, orbitals (A, B).
pub fn haldane(t1: f64, t2: f64, phi: f64, mass: f64) -> TightBindingModel {
    let onsite = small::from_rows(&[&[c(mass, 0.0), c(t1, 0.0)], &[c(t1, 0.0), c(-mass, 0.0)]]);
    let mut m = TightBindingModel::new("haldane", 2, onsite);
    let mut ab = small::zeros(2);
    ab[(0, 1)] = c(t1, 0.0);
    m.add_hopping(&[-1, 0], ab.clone());
    m.add_hopping(&[0, -1], ab);
    let nnn = small::from_rows(&[&[C64::from_polar(t2, phi), c(0.0, 0.0)], &[c(0.0, 0.0), C64::from_polar(t2, -phi)]]);
    for b in [[1, 0], [-1, 1], [0, -1]] {
        m.add_hopping(&b, nnn.clone());
    }
    m
}

use crate::C64;

/// SSH chain with cells (a, b): `⟨b_n|H|a_n⟩ = v`, `⟨b_n|H|a_{n+1}⟩ = w`, `⟨b_n|H|a_{n+2}⟩ = w2`.
pub fn ssh(v: f64, w: f64, w2: f64) -> TightBindingModel {
    let onsite = small::from_rows(&[&[c(0.0, 0.0), c(v, 0.0)], &[c(v, 0.0), c(0.0, 0.0)]]);
    let mut m = TightBindingModel::new("ssh", 1, onsite);
    let mut t = small::zeros(2);
    t[(1, 0)] = c(w, 0.0);
    m.add_hopping(&[1], t);
    if w2 != 0.0 {
        let mut t2 = small::zeros(2);
        t2[(1, 0)] = c(w2, 0.0);
        m.add_hopping(&[2], t2);
    }
    m.symmetries.chiral = Some(pauli(3));
    m
}

/// Kane–Mele model, basis (sublattice A/B) ⊗ (spin up/down).
pub fn kane_mele(t: f64, lso: f64, lr: f64, lv: f64) -> TightBindingModel {
    let s0 = pauli(0);
    let onsite = kron(&small::real_diag(&[lv, -lv]), &s0);
    let mut m = TightBindingModel::new("kane_mele", 2, onsite);
    let a1 = [1.0, 0.0];
    let a2 = [0.5, 3f64.sqrt() / 2.0];
    let db = [(a1[0] + a2[0]) / 3.0, (a1[1] + a2[1]) / 3.0];
    for a in [[0i64, 0], [-1, 0], [0, -1]] {
        let d = [db[0] + a[0] as f64 * a1[0] + a[1] as f64 * a2[0], db[1] + a[0] as f64 * a1[1] + a[1] as f64 * a2[1]];
        let norm = (d[0] * d[0] + d[1] * d[1]).sqrt();
        let (dx, dy) = (d[0] / norm, d[1] / norm);
        // Rashba i·λR·(s × d)_z
        let rashba = small::scale(&(&small::scale(&pauli(1), c(dy, 0.0)) - &small::scale(&pauli(2), c(dx, 0.0))), c(0.0, lr));
        let block = &small::scale(&s0, c(t, 0.0)) + &rashba;
        let mut hop = small::zeros(4);
        for i in 0..2 {
            for j in 0..2 {
                hop[(i, 2 + j)] = block[(i, j)];
            }
        }
        m.add_hopping(&a, hop);
    }
    let so = kron(&small::real_diag(&[1.0, -1.0]), &small::scale(&pauli(3), c(0.0, lso)));
    for b in [[1i64, 0], [-1, 1], [0, -1]] {
        m.add_hopping(&b, so.clone());
    }
    m.symmetries.trs = Some(AntiUnitary { matrix: kron(&s0, &spin_flip()), sign: -1 });
    m
}

/// `[[0, 1], [−1, 0]]`, the real part of the spin time-reversal operator.
pub fn spin_flip() -> CMat {
    small::from_rows(&[&[c(0.0, 0.0), c(1.0, 0.0)], &[c(-1.0, 0.0), c(0.0, 0.0)]])
}

/// Spinless p+ip superconductor, basis (particle, hole).
pub fn pip_bdg(t: f64, delta: f64, mu: f64) -> TightBindingModel {
    let tz = pauli(3);
    let mut m = TightBindingModel::new("pip_bdg", 2, small::scale(&tz, c(-mu, 0.0)));
    let pair = c(0.0, -0.5 * delta); // Δ/(2i)
    for (a, tau) in [([1i64, 0], pauli(1)), ([0, 1], pauli(2))] {
        let hop = &small::scale(&tz, c(-t, 0.0)) + &small::scale(&tau, pair);
        m.add_hopping(&a, hop);
    }
    m.symmetries.phs = Some(AntiUnitary { matrix: pauli(1), sign: 1 });
    m
}

/// `H(k) = (m − Σ cos k_j) τ3⊗1 + Σ sin k_j τ1⊗s_j` with `I = 1⊗iσ2`.
pub fn wilson_dirac_3d(mass: f64) -> TightBindingModel {
    let tz1 = kron(&pauli(3), &pauli(0));
    let mut m = TightBindingModel::new("wilson_dirac_3d", 3, small::scale(&tz1, c(mass, 0.0)));
    for j in 0..3 {
        let mut a = [0i64; 3];
        a[j] = 1;
        let hop = &small::scale(&tz1, c(-0.5, 0.0)) + &small::scale(&kron(&pauli(1), &pauli(j + 1)), c(0.0, -0.5));
        m.add_hopping(&a, hop);
    }
    m.symmetries.trs = Some(AntiUnitary { matrix: kron(&pauli(0), &spin_flip()), sign: -1 });
    m
}

/// Chiral cubic model with off-diagonal block `A(k) = m + Σ cos k_j + i Σ sin k_j σ_j`.
pub fn chiral_3d(mass: f64) -> TightBindingModel {
    let s0 = pauli(0);
    let onsite = kron(&pauli(1), &small::scale(&s0, c(mass, 0.0)));
    let mut m = TightBindingModel::new("chiral_3d", 3, onsite);
    for j in 0..3 {
        let mut a = [0i64; 3];
        a[j] = 1;
        let sj = pauli(j + 1);
        let plus = small::scale(&(&s0 + &sj), c(0.5, 0.0));
        let minus = small::scale(&(&s0 - &sj), c(0.5, 0.0));
        let mut hop = small::zeros(4);
        for r in 0..2 {
            for q in 0..2 {
                hop[(r, 2 + q)] = minus[(r, q)];
                hop[(2 + r, q)] = plus[(r, q)];
            }
        }
        m.add_hopping(&a, hop);
    }
    m.symmetries.chiral = Some(kron(&pauli(3), &s0));
    m
}

/// Haldane critical mass `3√3·t2·sin φ`.
pub fn haldane_critical_mass(t2: f64, phi: f64) -> f64 {
    3.0 * 3f64.sqrt() * t2 * phi.sin()
}

/// The standard Haldane benchmark parameters `t1 = 1, t2 = 1/3, φ = π/2`.
pub fn haldane_benchmark(mass: f64) -> TightBindingModel {
    haldane(1.0, 1.0 / 3.0, PI / 2.0, mass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eigvals;
    use crate::models::{bloch_hamiltonian, build_hamiltonian, Boundary, LatticeGeometry};

    fn params(kv: &[(&str, f64)]) -> Params {
        kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn unknown_and_missing() {
        assert!(matches!(builtin_model("nope", &Params::new()), Err(Error::UnknownModel(_))));
        assert!(matches!(builtin_model("ssh", &params(&[("v", 1.0)])), Err(Error::MissingParameter { .. })));
    }

    #[test]
    fn ssh_bloch_matches_textbook() {
        let (v, w) = (0.7, 1.3);
        let m = builtin_model("ssh", &params(&[("v", v), ("w", w)])).unwrap();
        for k in [0.0, 0.4, 2.0, 5.5] {
            let hk = bloch_hamiltonian(&m, &[k]).unwrap();
            let upper = c(v, 0.0) + C64::from_polar(w, -k);
            assert!((hk[(0, 1)] - upper).norm() < 1e-14);
            assert!((hk[(1, 0)] - upper.conj()).norm() < 1e-14);
            assert!(hk[(0, 0)].norm() < 1e-14 && hk[(1, 1)].norm() < 1e-14);
        }
    }

    #[test]
    fn ssh_decoupled_dimers() {
        let m = ssh(1.0, 0.0, 0.0);
        let g = LatticeGeometry::uniform(vec![4], 2, Boundary::Open).unwrap();
        let h = build_hamiltonian(&m, &g, 0).unwrap();
        let e = hermitian_eigvals(&h).unwrap();
        for (i, x) in e.iter().enumerate() {
            let want = if i < 4 { -1.0 } else { 1.0 };
            assert!((x - want).abs() < 1e-14);
        }
    }

    #[test]
    fn haldane_dirac_point_gap() {
        let m = haldane_benchmark(0.0);
        // K point in reduced coordinates of the Bravais basis
        let k = [2.0 * PI / 3.0, -2.0 * PI / 3.0];
        let hk = bloch_hamiltonian(&m, &k).unwrap();
        let e = crate::linalg::eigvals_dense(&hk).unwrap();
        let want = 3.0 * 3f64.sqrt() / 3.0;
        assert!((e[0] + want).abs() < 1e-12 && (e[1] - want).abs() < 1e-12, "{e:?}");
    }

    #[test]
    fn bloch_at_zero_is_sum_of_terms() {
        let m = haldane_benchmark(0.4);
        let hk = bloch_hamiltonian(&m, &[0.0, 0.0]).unwrap();
        let mut s = m.onsite.clone();
        for h in &m.hoppings {
            s = &s + &h.matrix + small::adjoint(&h.matrix);
        }
        assert!(small::max_abs(&(&hk - &s)) < 1e-14);
    }

    #[test]
    fn kane_mele_without_rashba_conserves_sz() {
        let m = kane_mele(1.0, 0.3, 0.0, 0.2);
        let sz = kron(&pauli(0), &pauli(3));
        for k in [[0.3, 1.1], [2.0, -0.7]] {
            let hk = bloch_hamiltonian(&m, &k).unwrap();
            assert!(small::max_abs(&(&hk * &sz - &sz * &hk)) < 1e-14);
        }
        let g = LatticeGeometry::uniform(vec![4, 4], 4, Boundary::Periodic).unwrap();
        build_hamiltonian(&kane_mele(1.0, 0.3, 0.1, 0.2), &g, 0).unwrap();
    }

    #[test]
    fn pip_bdg_particle_hole() {
        let m = builtin_model("pip_bdg", &params(&[("t", 1.0), ("delta", 0.8), ("mu", -1.0)])).unwrap();
        let k = [0.7, -1.9];
        let hk = bloch_hamiltonian(&m, &k).unwrap();
        let hmk = bloch_hamiltonian(&m, &[-k[0], -k[1]]).unwrap();
        let tx = pauli(1);
        assert!(small::max_abs(&(&tx * small::conj(&hmk) * &tx + &hk)) < 1e-14);
        let g = LatticeGeometry::uniform(vec![5, 5], 2, Boundary::Open).unwrap();
        build_hamiltonian(&m, &g, 0).unwrap();
    }

    #[test]
    fn three_dimensional_symmetries_validate() {
        let g = LatticeGeometry::uniform(vec![3, 3, 3], 4, Boundary::Open).unwrap();
        build_hamiltonian(&wilson_dirac_3d(2.0), &g, 0).unwrap();
        build_hamiltonian(&chiral_3d(2.0), &g, 0).unwrap();
        build_hamiltonian(&ssh(1.0, 2.0, 0.5), &LatticeGeometry::uniform(vec![8], 2, Boundary::Open).unwrap(), 0).unwrap();
    }

    #[test]
    fn rational_flux_detection() {
        assert_eq!(flux_from_real(1.0 / 3.0), Flux::Rational { p: 1, q: 3 });
        assert_eq!(flux_from_real(0.0), Flux::Zero);
        assert!(matches!(flux_from_real(1.0 / PI), Flux::Real(_)));
    }
}
