//! Values checked against routes that do not share code with the library.

use dsvac_core::maxwell::{self, MaxwellPhaseSpace};
use dsvac_core::phase_space::{ett_dual_route, f_tt_cross_check, parametrization_angles, PhaseSpace};
use dsvac_core::sector_algebra::harmonic::{gauss_legendre, gram_oracle, harmonic_oracle};
use dsvac_core::sector_algebra::{enumerate_sectors, gram_matrix, Family, SectorLabel};
use dsvac_core::state_verify::{build_covariances, symmetry_residuals, tt_energy_oracle, SectorState, Variant};

/// Dimension of the SO(4) irrep with highest weight (j1, j2), spins doubled.
fn so4_dim(two_j1: u32, two_j2: u32) -> u64 {
    ((two_j1 + 1) * (two_j2 + 1)) as u64
}

/// Harmonics of level k on the three-sphere decompose as (k/2, k/2) for
/// scalars, ((k±1)/2, (k∓1)/2) for transverse vectors and ((k±2)/2, (k∓2)/2)
/// for transverse traceless tensors.
fn multiplicity_from_irreps(family: Family, k: u32) -> u64 {
    match family {
        Family::Scalar => so4_dim(k, k),
        Family::Vector => 2 * so4_dim(k + 1, k - 1),
        Family::TensorTT => 2 * so4_dim(k + 2, k - 2),
    }
}

#[test]
fn multiplicities_match_irrep_dimensions() {
    for s in enumerate_sectors(60) {
        assert_eq!(s.multiplicity(), multiplicity_from_irreps(s.family, s.k), "{s}");
    }
}

#[test]
fn scalar_multiplicity_counts_harmonic_polynomials() {
    let binom3 = |n: u64| if n < 3 { 0 } else { n * (n - 1) * (n - 2) / 6 };
    for k in 0..40u64 {
        let homogeneous = |d: u64| binom3(d + 3);
        let harmonic = homogeneous(k) - if k >= 2 { homogeneous(k - 2) } else { 0 };
        assert_eq!(harmonic, SectorLabel::scalar(k as u32).multiplicity());
    }
}

/// Rough Laplacian on the irrep (j1, j2) with fiber spin s is
/// 2(C(j1) + C(j2)) − C(s); the curvature terms add 0, 2, 6 per family.
#[test]
fn eigenvalues_from_casimir() {
    for s in enumerate_sectors(40) {
        let k = s.k as i64;
        let (a, b) = match s.family {
            Family::Scalar => (k, k),
            Family::Vector => (k + 1, k - 1),
            Family::TensorTT => (k + 2, k - 2),
        };
        let spin = (a - b) / 2;
        let rough = (a * (a + 2) + b * (b + 2)) / 2 - spin * (spin + 1);
        let shift = [0, 2, 6][s.family as usize];
        assert_eq!(rough + shift, s.eigenvalue(), "{s}");
    }
}

#[test]
fn numerical_spectra_small_k() {
    for k in 0..=3 {
        for family in [Family::Scalar, Family::Vector, Family::TensorTT] {
            let Ok(s) = SectorLabel::new(family, k) else { continue };
            let m = harmonic_oracle(k, family).unwrap();
            assert_eq!(m.multiplicity as u64, s.multiplicity(), "{s}");
            assert!((m.eigenvalue - s.eigenvalue() as f64).abs() < 1e-10 * (1.0 + s.eigenvalue() as f64), "{s}: {}", m.eigenvalue);
        }
    }
}

#[test]
fn gram_matrices_match_quadrature() {
    for s in enumerate_sectors(3) {
        for rank in 0..=2u8 {
            let exact = gram_matrix(s, rank).matrix.to_f64();
            if exact.nrows() == 0 {
                continue;
            }
            let quad = gram_oracle(s, rank).unwrap();
            let err = (&exact - &quad).abs().max() / exact.abs().max();
            assert!(err < 1e-12, "{s} rank {rank}: {err:e}");
        }
    }
}

/// Rules live on [0, 1].
#[test]
fn three_point_legendre() {
    let mut nodes = gauss_legendre(3);
    nodes.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let r = (0.15f64).sqrt();
    let want = [(0.5 - r, 5.0 / 18.0), (0.5, 4.0 / 9.0), (0.5 + r, 5.0 / 18.0)];
    for (got, want) in nodes.iter().zip(want) {
        assert!((got.0 - want.0).abs() < 1e-14 && (got.1 - want.1).abs() < 1e-14, "{got:?} vs {want:?}");
    }
    let big = gauss_legendre(40);
    for m in 0..80 {
        let integral: f64 = big.iter().map(|(x, w)| w * x.powi(m)).sum();
        assert!((integral - 1.0 / (m + 1) as f64).abs() < 1e-14, "x^{m}");
    }
}

#[test]
fn energy_quadrature_all_tt_sectors() {
    for k in 2..=12 {
        let st = SectorState::new(SectorLabel::tensor(k)).unwrap();
        let o = tt_energy_oracle(&st).unwrap().expect("TT sector has an oracle");
        assert!(o.rel_diff() < 1e-9, "TensorTT({k}): {:e}", o.rel_diff());
    }
}

#[test]
fn vector1_pinned_values() {
    let st = SectorState::new(SectorLabel::vector(1)).unwrap();
    let e4 = st.n_orthonormal(&st.phase.e_tt_4.basis);
    assert_eq!(e4.ncols(), 1);
    let cov = build_covariances(&st, Variant::Euclidean);
    let v = e4.column(0);
    let lp = (v.adjoint() * cov.lambda_plus.matrix * v)[(0, 0)];
    let lm = (v.adjoint() * cov.lambda_minus.matrix * v)[(0, 0)];
    assert!((lp.re + 0.9375).abs() < 1e-10 && lp.im.abs() < 1e-10, "{lp}");
    assert!((lm.re + 0.9375).abs() < 1e-10 && lm.im.abs() < 1e-10, "{lm}");
}

#[test]
fn phase_space_dual_routes() {
    for s in enumerate_sectors(12) {
        let (exact, numeric, dist) = ett_dual_route(s);
        assert_eq!(exact, numeric, "{s}");
        assert!(dist < 1e-9, "{s}: {dist:e}");
        assert!(f_tt_cross_check(s) < 1e-9, "{s}");
        assert!(parametrization_angles(s).iter().all(|&a| a < 1e-9), "{s}");
    }
}

/// The single E_TT mode of Scalar(1) lies in F_TT, but
/// it is reached by no gauge vector q-orthogonal to the Killing data, so
/// every piece of the three-way sum is empty there.
#[test]
fn scalar1_pure_gauge_mode_outside_gauge_sum() {
    let ps = PhaseSpace::new(SectorLabel::scalar(1));
    assert_eq!((ps.e_tt.dim(), ps.f_tt.dim()), (1, 1));
    assert_eq!((ps.e_tt_gauge.dim(), ps.f_tt_gauge.dim(), ps.e_tt_4.dim()), (0, 0, 0));
}

#[test]
fn symmetries_all_sectors() {
    for s in enumerate_sectors(12) {
        let r = symmetry_residuals(&SectorState::new(s).unwrap()).unwrap();
        assert!(r.euclidean_real < 1e-9 && r.time_reversal < 1e-9, "{s}: {r:?}");
        assert!(r.s_flips_charge < 1e-12 && r.s_involution < 1e-12, "{s}: {r:?}");
        assert!(r.s_reverses_evolution < 1e-8, "{s}: {r:?}");
    }
}

#[test]
fn maxwell_e0_only_in_scalar0() {
    for s in maxwell::maxwell_sectors(12) {
        let ps = MaxwellPhaseSpace::new(s);
        let want = usize::from(s == SectorLabel::scalar(0));
        assert_eq!(ps.e0.ncols(), want, "{s}");
    }
    let times: Vec<f64> = (-20..=20).map(|i| i as f64 / 10.0).collect();
    assert!(maxwell::e0_profile_deviation(&times).unwrap() < 1e-8);
}
