//! Floating-point subspace utilities on ℂⁿ.

use nalgebra::{Cholesky, DMatrix, DVector, Dim, Matrix, RawStorage};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn to_complex(m: &DMatrix<f64>) -> CMat {
    m.map(c)
}

/// Max-entry modulus.
pub fn max_abs<R: Dim, C: Dim, S: RawStorage<Complex64, R, C>>(m: &Matrix<Complex64, R, C, S>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_real(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|z| z.abs()).fold(0.0, f64::max)
}

/// ‖a − b‖_max / max(‖a‖_max, ‖b‖_max, floor).
pub fn rel_diff(a: &CMat, b: &CMat) -> f64 {
    let scale = max_abs(a).max(max_abs(b)).max(1e-300);
    max_abs(&(a - b)) / scale
}

pub fn hermitian_residual(m: &CMat) -> f64 {
    let scale = max_abs(m).max(1e-300);
    max_abs(&(m - m.adjoint())) / scale
}

/// Full singular value decomposition a = u·diag(s)·vᴴ via faer, singular
/// values descending.
pub struct Svd<T> {
    pub u: DMatrix<T>,
    pub s: Vec<f64>,
    pub v: DMatrix<T>,
}

macro_rules! faer_svd {
    ($name:ident, $t:ty, $abs:expr) => {
        pub fn $name(a: &DMatrix<$t>) -> Svd<$t> {
            let (m, n) = a.shape();
            if m == 0 || n == 0 {
                return Svd { u: DMatrix::identity(m, m), s: Vec::new(), v: DMatrix::identity(n, n) };
            }
            let fa = faer::Mat::<$t>::from_fn(m, n, |i, j| a[(i, j)]);
            let d = fa.svd().expect("svd converges");
            let (fu, fv, fs) = (d.U(), d.V(), d.S().column_vector());
            let u = DMatrix::from_fn(m, m, |i, j| fu[(i, j)]);
            let v = DMatrix::from_fn(n, n, |i, j| fv[(i, j)]);
            let s = (0..m.min(n)).map(|i| $abs(fs[i])).collect();
            Svd { u, s, v }
        }
    };
}

faer_svd!(svd, Complex64, |z: Complex64| z.re);
faer_svd!(svd_real, f64, |x: f64| x);

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let n = m.nrows();
    if n == 0 {
        return Vec::new();
    }
    let fa = faer::Mat::<Complex64>::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    fa.self_adjoint_eigenvalues(faer::Side::Lower).expect("eigenvalues converge")
}

/// Orthonormal basis of the column span, relative singular-value cutoff `tol`.
pub fn orth(a: &CMat, tol: f64) -> CMat {
    if a.ncols() == 0 || a.nrows() == 0 {
        return CMat::zeros(a.nrows(), 0);
    }
    let s = svd(a);
    let u = &s.u;
    let smax = s.s.first().copied().unwrap_or(0.0);
    let keep: Vec<usize> = (0..s.s.len()).filter(|&i| smax > 0.0 && s.s[i] > tol * smax).collect();
    let mut out = CMat::zeros(a.nrows(), keep.len());
    for (j, &i) in keep.iter().enumerate() {
        out.set_column(j, &u.column(i));
    }
    out
}

pub fn rank(a: &CMat, tol: f64) -> usize {
    orth(a, tol).ncols()
}

/// Orthonormal basis of the right null space (relative cutoff `tol`).
pub fn null_space(a: &CMat, tol: f64) -> CMat {
    let n = a.ncols();
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    let s = svd(a);
    let smax = s.s.first().copied().unwrap_or(0.0);
    let cut = if smax > 0.0 { tol * smax } else { f64::INFINITY };
    // columns of v beyond min(m, n) have zero singular value
    let idx: Vec<usize> = (0..n).filter(|&i| s.s.get(i).is_none_or(|&x| x <= cut)).collect();
    let mut out = CMat::zeros(n, idx.len());
    for (j, &i) in idx.iter().enumerate() {
        out.set_column(j, &s.v.column(i));
    }
    out
}

/// Singular values, descending.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    if a.ncols() == 0 || a.nrows() == 0 {
        return Vec::new();
    }
    svd(a).s
}

/// Factor Lᴴ with H = L Lᴴ, so that ⟨x, y⟩_H = (Lᴴx)ᴴ(Lᴴy).
pub fn weight_factor(h: &CMat) -> CMat {
    Cholesky::new(h.clone()).expect("weight must be positive definite").l().adjoint()
}

fn weighted_orth(a: &CMat, w: Option<&CMat>, tol: f64) -> CMat {
    match w {
        Some(lh) => orth(&(lh * a), tol),
        None => orth(a, tol),
    }
}

/// Principal angles between span(a) and span(b), ascending, computed from
/// sines for accuracy at small angles. `w` is an optional factor Lᴴ from
/// [`weight_factor`]. Returns min(dim a, dim b) angles.
pub fn principal_angles(a: &CMat, b: &CMat, w: Option<&CMat>) -> Vec<f64> {
    let qa = weighted_orth(a, w, 1e-12);
    let qb = weighted_orth(b, w, 1e-12);
    let (small, big) = if qa.ncols() <= qb.ncols() { (qa, qb) } else { (qb, qa) };
    if small.ncols() == 0 {
        return Vec::new();
    }
    let resid = &small - &big * (big.adjoint() * &small);
    let sines = singular_values(&resid);
    let cosines = singular_values(&(big.adjoint() * &small));
    let mut angles: Vec<f64> = (0..small.ncols())
        .map(|i| {
            let s = sines.get(small.ncols() - 1 - i).copied().unwrap_or(0.0).min(1.0);
            let cs = cosines.get(i).copied().unwrap_or(0.0).min(1.0);
            if s < 0.7 { s.asin() } else { cs.acos() }
        })
        .collect();
    angles.sort_by(|x, y| x.partial_cmp(y).unwrap());
    angles
}

/// Largest principal angle; π/2 if the dimensions differ.
pub fn subspace_distance(a: &CMat, b: &CMat, w: Option<&CMat>) -> f64 {
    let da = weighted_orth(a, w, 1e-12).ncols();
    let db = weighted_orth(b, w, 1e-12).ncols();
    if da != db {
        return std::f64::consts::FRAC_PI_2;
    }
    principal_angles(a, b, w).last().copied().unwrap_or(0.0)
}

/// Smallest principal angle (0 when spans intersect).
pub fn min_angle(a: &CMat, b: &CMat, w: Option<&CMat>) -> f64 {
    principal_angles(a, b, w).first().copied().unwrap_or(std::f64::consts::FRAC_PI_2)
}

/// Basis of span(a) ∩ span(b): principal vectors with angle below `tol`.
pub fn intersection(a: &CMat, b: &CMat, tol: f64) -> CMat {
    let qa = orth(a, 1e-12);
    let qb = orth(b, 1e-12);
    if qa.ncols() == 0 || qb.ncols() == 0 {
        return CMat::zeros(a.nrows(), 0);
    }
    let s = svd(&(qa.adjoint() * &qb));
    let u = &s.u;
    let mut cols = Vec::new();
    for i in 0..s.s.len() {
        let cs = s.s[i].min(1.0);
        if (1.0 - cs * cs).max(0.0).sqrt() < tol {
            cols.push(&qa * u.column(i));
        }
    }
    let mut out = CMat::zeros(a.nrows(), cols.len());
    for (j, v) in cols.iter().enumerate() {
        out.set_column(j, v);
    }
    out
}

pub fn hstack(blocks: &[&CMat]) -> CMat {
    let r = blocks.first().map_or(0, |b| b.nrows());
    let ncols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(r, ncols);
    let mut j = 0;
    for b in blocks {
        out.view_mut((0, j), (r, b.ncols())).copy_from(*b);
        j += b.ncols();
    }
    out
}

pub fn block_diag(blocks: &[&CMat]) -> CMat {
    let r: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cc: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(r, cc);
    let (mut i, mut j) = (0, 0);
    for b in blocks {
        out.view_mut((i, j), (b.nrows(), b.ncols())).copy_from(*b);
        i += b.nrows();
        j += b.ncols();
    }
    out
}

/// Hermitian compression bᴴ m b, then extremal eigenvalues of the pencil
/// (bᴴ m b, bᴴ g b) where g is the positive norm on the data space.
pub fn compressed_extrema(m: &CMat, basis: &CMat, norm: &CMat) -> Option<(f64, f64)> {
    if basis.ncols() == 0 {
        return None;
    }
    let lh = weight_factor(norm);
    // Orthonormalize in the norm so the pencil reduces to a standard problem.
    let qn = orth(&(&lh * basis), 1e-12);
    let lh_inv = lh.clone().try_inverse().expect("weight factor invertible");
    let b = lh_inv * qn;
    let ev = hermitian_eigenvalues(&(b.adjoint() * m * &b));
    Some((ev[0], ev[ev.len() - 1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles_small_and_right() {
        let a = to_complex(&DMatrix::from_row_slice(3, 1, &[1.0, 0.0, 0.0]));
        let b = to_complex(&DMatrix::from_row_slice(3, 1, &[1.0, 1e-11, 0.0]));
        let t = principal_angles(&a, &b, None);
        assert!((t[0] - 1e-11).abs() < 1e-20);
        let e = to_complex(&DMatrix::from_row_slice(3, 1, &[0.0, 0.0, 1.0]));
        assert!((min_angle(&a, &e, None) - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
    }

    #[test]
    fn pencil_extrema_diag() {
        let m = to_complex(&DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, -6.0, 5.0])));
        let g = to_complex(&DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0, 1.0])));
        let b = to_complex(&DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]));
        let (lo, hi) = compressed_extrema(&m, &b, &g).unwrap();
        assert!((lo + 3.0).abs() < 1e-14 && (hi - 2.0).abs() < 1e-14);
    }

    #[test]
    fn null_space_wide() {
        let a = to_complex(&DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]));
        let n = null_space(&a, 1e-12);
        assert_eq!(n.ncols(), 2);
        assert!(max_abs(&(&a * &n)) < 1e-14);
    }
}
