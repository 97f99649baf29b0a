use super::*;
use crate::kspace::{chern_number, winding_number, BlochMap};
use crate::models::{
    build_hamiltonian, haldane_benchmark, kane_mele, ssh, Boundary, DisorderChannel, TightBindingModel,
};

fn sample(model: &TightBindingModel, n: usize, b: Boundary) -> (OperatorMatrix, LatticeGeometry) {
    let g = LatticeGeometry::uniform(vec![n; model.d], model.orbitals, b).unwrap();
    (build_hamiltonian(model, &g, 0).unwrap(), g)
}

fn even_dirac(g: &LatticeGeometry) -> DiracData {
    dirac_data(&position_operators(g), Parity::Even).unwrap()
}

fn pfp_index(model: &TightBindingModel, n: usize) -> i64 {
    let (h, g) = sample(model, n, Boundary::Periodic);
    index_pfp(&fermi_projection(&h, 0.0).unwrap(), &even_dirac(&g)).unwrap()
}

fn dense_norm(m: &Mat<C64>) -> f64 {
    crate::linalg::norm_2_dense(m)
}

#[test]
fn fermi_projection_examples() {
    let h = OperatorMatrix::from_dense(small::pauli(3), MatrixKind::Hermitian).unwrap();
    let p = fermi_projection(&h, 0.0).unwrap();
    assert_eq!(p.rank(), 1);
    let pd = p.projection.to_dense();
    assert!((pd[(1, 1)].re - 1.0).abs() < 1e-14 && pd[(0, 0)].norm() < 1e-14);
    assert_eq!(fermi_projection(&h, -5.0).unwrap().rank(), 0);
    let full = fermi_projection(&h, 5.0).unwrap();
    assert!(dense_norm(&(full.projection.to_dense() - small::eye(2))) < 1e-14);
    assert!(matches!(fermi_projection(&h, 1.0), Err(Error::GapClosed { .. })));
}

#[test]
fn fermi_projection_is_idempotent_and_commutes() {
    let (h, _) = sample(&haldane_benchmark(0.5), 6, Boundary::Periodic);
    let p = fermi_projection(&h, 0.0).unwrap();
    let (pd, hd) = (p.projection.to_dense(), h.to_dense());
    assert!(dense_norm(&(&pd * &pd - &pd)) < 1e-10);
    assert!(dense_norm(&(&pd * &hd - &hd * &pd)) < 1e-10 * dense_norm(&hd));
    assert_eq!(p.rank(), h.dim() / 2);
}

#[test]
fn dirac_data_one_dimension() {
    let x = PositionOperators { coords: vec![vec![-1.5, 0.5]] };
    let dd = dirac_data(&x, Parity::Odd).unwrap();
    let e = dd.hardy.unwrap().to_dense();
    assert!(e[(0, 0)].norm() < 1e-15 && (e[(1, 1)].re - 1.0).abs() < 1e-15);
    assert_eq!(dd.positions.coords[0], vec![-1.0, 1.0]);
}

#[test]
fn phase_is_identity_on_dirac_kernel() {
    let x = PositionOperators { coords: vec![vec![-0.5], vec![-0.5]] };
    let dd = dirac_data(&x, Parity::Even).unwrap();
    assert_eq!(dd.phase.unwrap(), vec![C64::new(1.0, 0.0)]);
    assert!(dd.dirac.max_abs_entry() == 0.0);
}

#[test]
fn clifford_relations() {
    for d in 1..=3 {
        let g = clifford(d).unwrap();
        for i in 0..d {
            for j in 0..d {
                let ac = &g[i] * &g[j] + &g[j] * &g[i];
                let expect = if i == j { small::scale(&small::eye(g[0].nrows()), C64::new(2.0, 0.0)) } else { small::zeros(g[0].nrows()) };
                assert_eq!(ac, expect);
            }
        }
    }
    assert!(matches!(
        dirac_data(&PositionOperators { coords: vec![vec![0.0]; 3] }, Parity::Even),
        Err(Error::UnsupportedDimension(3))
    ));
}

#[test]
fn phase_is_unitary_and_hardy_idempotent() {
    let g = LatticeGeometry::uniform(vec![4, 4, 4], 1, Boundary::Open).unwrap();
    let dd = dirac_data(&position_operators(&g), Parity::Odd).unwrap();
    let e = dd.hardy.as_ref().unwrap().to_dense();
    assert!(dense_norm(&(&e * &e - &e)) < 1e-10);
    let g2 = LatticeGeometry::uniform(vec![5, 4], 1, Boundary::Open).unwrap();
    let dd2 = even_dirac(&g2);
    assert!(dd2.phase.unwrap().iter().all(|f| (f.norm() - 1.0).abs() < 1e-12));
}

#[test]
fn cluster_split_cases() {
    assert_eq!(cluster_split(&[0.9, 1.0]).unwrap().0, 0);
    assert_eq!(cluster_split(&[1e-6, 2e-6, 0.4, 0.9]).unwrap().0, 2);
    assert_eq!(cluster_split(&[0.01, 0.02, 0.03, 0.9]).unwrap().0, 3);
    assert!(matches!(cluster_split(&[0.01, 0.02, 0.03, 0.045]), Err(Error::NoClusterGap { .. })));
    assert_eq!(cluster_split(&[0.27, 0.32, 0.4, 0.9]).unwrap().0, 0);
}

#[test]
fn atomic_insulator_has_zero_index() {
    let mut m = TightBindingModel::new("atomic", 2, small::real_diag(&[1.0, -1.0]));
    m.add_hopping(&[1, 0], small::scale(&small::eye(2), C64::new(0.05, 0.0)));
    assert_eq!(pfp_index(&m, 10), 0);
}

#[test]
fn pfp_index_matches_chern_number() {
    for mass in [0.0, 2.0] {
        let model = haldane_benchmark(mass);
        let ch = chern_number(&BlochMap::new(&model).unwrap(), 0.0, (0, 1), 24).unwrap();
        assert_eq!(pfp_index(&model, 16), ch, "mass {mass}");
    }
}

#[test]
fn conjugation_negates_pfp_index() {
    let model = haldane_benchmark(0.0);
    assert_eq!(pfp_index(&model.conjugated(), 16), -pfp_index(&model, 16));
}

#[test]
fn pfp_index_constant_along_gapped_path() {
    let idx: Vec<i64> = (0..5).map(|s| pfp_index(&haldane_benchmark(0.1 * s as f64), 14)).collect();
    assert!(idx.iter().all(|&i| i == idx[0]), "{idx:?}");
}

fn eae_index(model: &TightBindingModel, n: usize) -> i64 {
    let (h, g) = sample(model, n, Boundary::Periodic);
    let (a, x) = chiral_off_diagonal(&h, model, &g).unwrap();
    index_eae(&a, &dirac_data(&x, Parity::Odd).unwrap()).unwrap()
}

#[test]
fn eae_identity_is_trivial() {
    let g = LatticeGeometry::uniform(vec![12], 1, Boundary::Open).unwrap();
    let dd = dirac_data(&position_operators(&g), Parity::Odd).unwrap();
    assert_eq!(index_eae(&OperatorMatrix::identity(12), &dd).unwrap(), 0);
}

#[test]
fn eae_matches_winding_for_ssh() {
    for (v, w) in [(1.0, 2.0), (2.0, 1.0), (0.5, 1.0)] {
        let model = ssh(v, w, 0.0);
        let wn = winding_number(&BlochMap::new(&model).unwrap(), 0, 32).unwrap();
        assert_eq!(eae_index(&model, 60), wn, "v={v} w={w}");
    }
    assert_eq!(eae_index(&ssh(1.0, 2.0, 0.0), 60), 1);
}

#[test]
fn eae_of_ring_shift() {
    let n = 24;
    let g = LatticeGeometry::uniform(vec![n], 1, Boundary::Periodic).unwrap();
    let dd = dirac_data(&position_operators(&g), Parity::Odd).unwrap();
    let shift = |s: i64| {
        let trip = (0..n).map(|i| ((i as i64 + s).rem_euclid(n as i64) as usize, i, C64::new(1.0, 0.0))).collect();
        OperatorMatrix::from_triplets(n, MatrixKind::General, trip).unwrap()
    };
    let (up, down) = (index_eae(&shift(1), &dd).unwrap(), index_eae(&shift(-1), &dd).unwrap());
    assert_eq!(up.abs(), 1);
    assert_eq!(down, -up);
}

#[test]
fn eae_rejects_singular_block() {
    let g = LatticeGeometry::uniform(vec![4], 1, Boundary::Open).unwrap();
    let dd = dirac_data(&position_operators(&g), Parity::Odd).unwrap();
    let a = OperatorMatrix::diagonal(&[1.0, 0.0, 1.0, 1.0]).with_kind(MatrixKind::General).unwrap();
    assert!(matches!(index_eae(&a, &dd), Err(Error::SingularOffDiagonal(_))));
}

fn km_parity(model: &TightBindingModel, n: usize) -> (u8, NearKernel) {
    let (h, g) = sample(model, n, Boundary::Periodic);
    let p = fermi_projection(&h, 0.0).unwrap();
    let dd = even_dirac(&g);
    let nk = near_kernel(&pfp_matrix(&p, &dd).unwrap()).unwrap();
    (z2_nullity_parity(&p, &dd).unwrap(), nk)
}

#[test]
fn kane_mele_nullity_parity() {
    let (top, nk) = km_parity(&kane_mele(1.0, 1.0 / 3.0, 0.1, 0.0), 16);
    assert_eq!(top, 1);
    // Kramers pairing of the singular values
    for pair in nk.singular_values.chunks(2) {
        assert!((pair[0] - pair[1]).abs() < 1e-8, "{pair:?}");
    }
    assert_eq!(km_parity(&kane_mele(1.0, 1.0 / 3.0, 0.1, 3.0), 16).0, 0);
}

#[test]
fn doubled_kane_mele_is_trivial() {
    let km = kane_mele(1.0, 1.0 / 3.0, 0.1, 0.0);
    assert_eq!(km_parity(&km.direct_sum(&km), 12).0, 0);
}

#[test]
fn marker_of_flat_model_vanishes() {
    let m = TightBindingModel::new("flat", 2, small::real_diag(&[1.0, -1.0]));
    let (h, g) = sample(&m, 12, Boundary::Open);
    let p = fermi_projection(&h, 0.0).unwrap();
    assert!(local_chern_marker(&p, &g, &central_region(&g, 4), 4).unwrap().abs() < 1e-10);
}

#[test]
fn marker_matches_chern_number() {
    for mass in [0.0, 2.0] {
        let model = haldane_benchmark(mass);
        let ch = chern_number(&BlochMap::new(&model).unwrap(), 0.0, (0, 1), 24).unwrap();
        let (h, g) = sample(&model, 20, Boundary::Open);
        let p = fermi_projection(&h, 0.0).unwrap();
        let c = local_chern_marker(&p, &g, &central_region(&g, 8), default_buffer(&model)).unwrap();
        assert!((c - ch as f64).abs() < 0.05, "mass {mass}: {c} vs {ch}");
    }
}

#[test]
fn marker_traces_to_zero_over_open_sample() {
    let (h, g) = sample(&haldane_benchmark(0.0), 10, Boundary::Open);
    let p = fermi_projection(&h, 0.0).unwrap();
    let all: Vec<usize> = (0..h.dim()).collect();
    assert!(chern_marker_trace(&p, &g, &all).abs() < 1e-8);
}

#[test]
fn marker_region_must_avoid_boundary() {
    let (h, g) = sample(&haldane_benchmark(0.0), 10, Boundary::Open);
    let p = fermi_projection(&h, 0.0).unwrap();
    assert!(matches!(local_chern_marker(&p, &g, &central_region(&g, 8), 4), Err(Error::RegionTouchesBoundary)));
}

#[test]
fn disorder_averaged_marker_stays_close() {
    let model = haldane_benchmark(0.0).with_disorder(0.5, DisorderChannel::ScalarOnsite);
    let g = LatticeGeometry::uniform(vec![20, 20], 2, Boundary::Open).unwrap();
    let region = central_region(&g, 8);
    let mean: f64 = (0..10)
        .map(|seed| {
            let h = build_hamiltonian(&model, &g, seed).unwrap();
            local_chern_marker(&fermi_projection(&h, 0.0).unwrap(), &g, &region, 4).unwrap()
        })
        .sum::<f64>()
        / 10.0;
    assert!((mean + 1.0).abs() < 0.1, "{mean}");
}
