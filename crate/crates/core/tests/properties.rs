use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use dsvac_core::calderon::calderon_invertible;
use dsvac_core::linalg::{null_space, orth, principal_angles, rank, CMat};
use dsvac_core::maxwell;
use dsvac_core::radial_ode::OperatorId;
use dsvac_core::rational::{q, qf, RatMatrix};
use dsvac_core::sector_algebra::{enumerate_sectors, Family, SectorLabel};
use dsvac_core::state_verify::{build_covariances, s_sigma, u_alpha, SectorState, Variant};

const STATE_K_MAX: u32 = 6;

fn states() -> &'static [SectorState] {
    static CELL: OnceLock<Vec<SectorState>> = OnceLock::new();
    CELL.get_or_init(|| enumerate_sectors(STATE_K_MAX).into_iter().map(|s| SectorState::new(s).unwrap()).collect())
}

fn rel(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max) / b.iter().map(|z| z.norm()).fold(1e-300, f64::max)
}

fn cmat(rows: usize, cols: usize) -> impl Strategy<Value = CMat> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), rows * cols)
        .prop_map(move |v| CMat::from_iterator(rows, cols, v.into_iter().map(|(re, im)| Complex64::new(re, im))))
}

/// Product of an n×r and an r×m random factor: rank r almost surely.
fn low_rank() -> impl Strategy<Value = (CMat, usize)> {
    (2usize..7, 2usize..7, 1usize..4).prop_flat_map(|(n, m, r)| {
        let r = r.min(n).min(m);
        (cmat(n, r), cmat(r, m)).prop_map(move |(a, b)| (a * b, r))
    })
}

fn rat_matrix(n: usize) -> impl Strategy<Value = RatMatrix> {
    prop::collection::vec((-6i64..7, 1i64..5), n * n).prop_map(move |v| {
        let rows: Vec<Vec<_>> = v.chunks(n).map(|r| r.iter().map(|&(a, b)| qf(a, b)).collect()).collect();
        RatMatrix::from_rows(&rows)
    })
}

fn sector(k_max: u32) -> impl Strategy<Value = SectorLabel> {
    (0usize..3, 0u32..=k_max).prop_filter_map("below family minimum", |(f, k)| {
        SectorLabel::new([Family::Scalar, Family::Vector, Family::TensorTT][f], k).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn null_space_is_annihilated((a, r) in low_rank()) {
        let n = null_space(&a, 1e-10);
        prop_assert_eq!(n.ncols(), a.ncols() - r);
        prop_assert_eq!(rank(&a, 1e-10), r);
        if n.ncols() > 0 {
            prop_assert!((&a * &n).iter().all(|z| z.norm() < 1e-10));
            let gram = n.adjoint() * &n;
            prop_assert!(rel(&gram, &CMat::identity(n.ncols(), n.ncols())) < 1e-12);
        }
    }

    #[test]
    fn angles_ignore_recombination(a in cmat(6, 3), mix in cmat(3, 3)) {
        prop_assume!(rank(&mix, 1e-3) == 3);
        let angles = principal_angles(&a, &(&a * &mix), None);
        prop_assert!(angles.iter().all(|&t| t < 1e-7), "{:?}", angles);
        let other = orth(&a, 1e-10);
        let back = principal_angles(&other, &a, None);
        prop_assert!(back.iter().all(|&t| t < 1e-7));
    }

    #[test]
    fn angles_are_symmetric(a in cmat(6, 2), b in cmat(6, 3)) {
        let mut ab = principal_angles(&a, &b, None);
        let mut ba = principal_angles(&b, &a, None);
        ab.sort_by(f64::total_cmp);
        ba.sort_by(f64::total_cmp);
        for (x, y) in ab.iter().zip(&ba) {
            prop_assert!((x - y).abs() < 1e-10 && *x >= 0.0 && *x <= std::f64::consts::FRAC_PI_2 + 1e-12);
        }
    }

    #[test]
    fn rational_algebra_is_exact(a in rat_matrix(3), b in rat_matrix(3), c in rat_matrix(3)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        let n = a.nullspace();
        prop_assert_eq!(n.ncols() + a.rank(), 3);
        prop_assert!((&a * &n).is_zero());
        if let Some(inv) = a.inverse() {
            prop_assert_eq!(&a * &inv, RatMatrix::identity(3));
        }
        let p = a.char_poly();
        let mut acc = RatMatrix::zeros(3, 3);
        for coeff in p.iter().rev() {
            acc = &(&acc * &a) + &RatMatrix::identity(3).scale(coeff);
        }
        prop_assert!(acc.is_zero(), "Cayley-Hamilton");
    }

    #[test]
    fn maxwell_spectra_never_meet(l in 0i64..1_000_000) {
        prop_assert!(!(maxwell::in_i0(l) && maxwell::in_i1(l)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reflection_is_charge_reversing_involution(i in 0usize..64) {
        let st = &states()[i % states().len()];
        let s = s_sigma(st.sector);
        let n = s.nrows();
        prop_assert!(rel(&(&s * &s), &CMat::identity(n, n)) < 1e-12);
        prop_assert!(rel(&(s.adjoint() * &st.q_i * &s), &(-&st.q_i)) < 1e-12);
    }

    #[test]
    fn u_alpha_keeps_charge(i in 0usize..64, alpha in -2.0..2.0f64) {
        let st = &states()[i % states().len()];
        let u = u_alpha(st.sector, alpha);
        prop_assert!(rel(&(u.adjoint() * &st.q_i * &u), &st.q_i) < 1e-12 * alpha.cosh().powi(2));
        let back = u_alpha(st.sector, -alpha);
        let n = u.nrows();
        prop_assert!(rel(&(&u * &back), &CMat::identity(n, n)) < 1e-12 * alpha.cosh().powi(2));
    }

    #[test]
    fn alpha_sum_rule(i in 0usize..64, alpha in -1.5..1.5f64) {
        let st = &states()[i % states().len()];
        let cov = build_covariances(st, Variant::Alpha(alpha));
        prop_assert!(cov.sum_rule(&st.q_i, None) < 1e-10);
        prop_assert!(cov.hermiticity() < 1e-10);
    }

    #[test]
    fn euclidean_sum_rule_and_projectors(s in sector(STATE_K_MAX)) {
        let p = calderon_invertible(s, OperatorId::D2).unwrap();
        let (sum, idem) = p.projector_residuals();
        prop_assert!(sum < 1e-10 && idem < 1e-9, "{s}: {sum:e} {idem:e}");
        let st = states().iter().find(|t| t.sector == s).unwrap();
        prop_assert!(build_covariances(st, Variant::Euclidean).sum_rule(&st.q_i, None) < 1e-10);
    }
}

#[test]
fn alpha_zero_matches_euclidean() {
    for st in states() {
        let a = build_covariances(st, Variant::Alpha(0.0));
        let e = build_covariances(st, Variant::Euclidean);
        assert!(rel(&a.lambda_plus.matrix, &e.lambda_plus.matrix) < 1e-14, "{}", st.sector);
    }
}

#[test]
fn rational_helpers() {
    assert_eq!(qf(6, 4), qf(3, 2));
    assert_eq!(&qf(1, 3) + &q(1), qf(4, 3));
    let d = DMatrix::<f64>::identity(2, 2);
    assert_eq!(RatMatrix::identity(2).to_f64(), d);
}
