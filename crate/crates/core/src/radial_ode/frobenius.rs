//! Regular solutions at the poles: Frobenius series seeded near the pole,
//! then Dormand–Prince integration to the equator.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::dopri::{integrate, DopriOptions, DopriStats};
use super::{indicial_exponents, Pole, RadialSystem, Signature};
use crate::cauchy_ops::{charge_forms, reflection};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::linalg::{min_angle, svd_real, to_complex, weight_factor, CMat};
use crate::sector_algebra::SectorLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hemisphere {
    /// Ω⁺, the cap containing s = +π/2.
    Plus,
    /// Ω⁻, the cap containing s = −π/2.
    Minus,
}

#[derive(Debug, Clone, Copy)]
pub struct RegularParams {
    pub series_order: usize,
    pub match_radius: f64,
    pub integrator_tol: f64,
    pub tail_tol: f64,
}

impl Default for RegularParams {
    fn default() -> Self {
        Self { series_order: 40, match_radius: 0.15, integrator_tol: 1e-12, tail_tol: 1e-14 }
    }
}

/// Power series of x²f_b(x) and of x·cot-type first-order coefficient,
/// x = distance to the pole.
struct PoleSeries {
    p: Vec<f64>,
    g: [Vec<f64>; 4],
}

fn pole_series(order: usize, pole: Pole) -> PoleSeries {
    let n = order + 2;
    let zero = Complex64::new(0.0, 0.0);
    let mut sinc = Jet::zero(n);
    let mut cos = Jet::zero(n);
    let mut fact = 1.0f64;
    for k in 0..=n {
        if k > 0 {
            fact *= k as f64;
        }
        // sin x / x has c_{2m} = (−1)^m/(2m+1)!, cos x has c_{2m} = (−1)^m/(2m)!
        if k % 2 == 0 {
            let sgn = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            cos.c[k] = Complex64::new(sgn / fact, 0.0);
            sinc.c[k] = Complex64::new(sgn / (fact * (k + 1) as f64), 0.0);
        } else {
            cos.c[k] = zero;
            sinc.c[k] = zero;
        }
    }
    let inv = sinc.recip();
    let inv2 = &inv * &inv;
    let p = (&cos * &inv).scale(Complex64::new(3.0, 0.0));
    let mut x2 = Jet::zero(n);
    x2.c[2] = Complex64::new(1.0, 0.0);
    let cot2 = &(&cos * &cos) * &inv2;
    let sgn = match pole {
        Pole::North => 1.0,
        Pole::South => -1.0,
    };
    let tsec = (&cos * &inv2).scale(Complex64::new(sgn, 0.0));
    let re = |j: &Jet| j.c.iter().map(|z| z.re).collect::<Vec<f64>>();
    PoleSeries { p: re(&p), g: [re(&x2), re(&cot2), re(&inv2), re(&tsec)] }
}

#[derive(Debug, Clone)]
pub struct FrobeniusSeries {
    pub sector: SectorLabel,
    pub regular_exponents: Vec<i64>,
    /// n × n coefficient matrix of x^j; columns are basis solutions.
    pub coeffs: Vec<DMatrix<f64>>,
    /// Largest residual of a resonant consistency condition (relative).
    pub resonance_residual: f64,
}

impl FrobeniusSeries {
    pub fn eval(&self, x: f64) -> (DMatrix<f64>, DMatrix<f64>) {
        let (n, f) = self.coeffs[0].shape();
        let mut v = DMatrix::zeros(n, f);
        let mut vx = DMatrix::zeros(n, f);
        let mut xp = 1.0;
        for (j, c) in self.coeffs.iter().enumerate() {
            v += c * xp;
            if j + 1 < self.coeffs.len() {
                vx += &self.coeffs[j + 1] * ((j + 1) as f64 * xp);
            }
            xp *= x;
        }
        (v, vx)
    }

    /// Size of the last two series terms relative to the sum, worst column.
    pub fn tail_ratio(&self, x: f64) -> f64 {
        let (v, _) = self.eval(x);
        let nn = self.coeffs.len();
        let mut worst: f64 = 0.0;
        for col in 0..v.ncols() {
            let last = (nn - 2..nn)
                .map(|j| self.coeffs[j].column(col).norm() * x.powi(j as i32))
                .fold(0.0, f64::max);
            worst = worst.max(last / v.column(col).norm().max(1e-300));
        }
        worst
    }
}

pub fn frobenius_series(sys: &RadialSystem, pole: Pole, order: usize) -> Result<FrobeniusSeries> {
    let ind = indicial_exponents(sys, pole)?;
    let n = sys.n();
    let ps = pole_series(order, pole);
    let cb: Vec<DMatrix<f64>> = sys.coeffs.iter().map(|c| c.to_f64()).collect();
    // Q(x) = −x²M₀ as a matrix series
    let qser: Vec<DMatrix<f64>> = (0..=order)
        .map(|i| {
            let mut m = DMatrix::zeros(n, n);
            for b in 0..4 {
                m -= &cb[b] * ps.g[b][i];
            }
            m
        })
        .collect();
    let a = -&qser[0];
    let mut coeffs: Vec<DMatrix<f64>> = Vec::with_capacity(order + 1);
    let mut nfree = 0usize;
    let mut resid_max: f64 = 0.0;
    for j in 0..=order {
        let mut rhs = DMatrix::<f64>::zeros(n, nfree);
        let mut mag = 0.0;
        for i in 1..=j {
            let prev = &coeffs[j - i];
            let fac = ps.p[i] * (j - i) as f64;
            let op = &qser[i] + DMatrix::identity(n, n) * fac;
            mag += op.norm() * prev.columns(0, nfree).norm();
            rhs -= op * prev.columns(0, nfree);
        }
        let jj = (j * (j + 2)) as f64;
        let r = DMatrix::identity(n, n) * jj - &a;
        let mult = ind.eigenvalues.iter().filter(|&&e| e as f64 == jj).count();
        let mut cj;
        if mult == 0 {
            cj = r.clone().lu().solve(&rhs).ok_or_else(|| Error::Other("singular recursion matrix".into()))?;
        } else {
            let svd = svd_real(&r);
            let (u, v) = (&svd.u, &svd.v);
            let mut pinv = DMatrix::<f64>::zeros(n, n);
            for k in 0..n - mult {
                pinv += v.column(k) * u.column(k).transpose() / svd.s[k];
            }
            cj = &pinv * &rhs;
            let res = (&r * &cj - &rhs).norm();
            // relative to the size of the terms feeding this level
            let rel = if mag == 0.0 { 0.0 } else { res / mag };
            resid_max = resid_max.max(rel);
            if rel > 1e-8 {
                return Err(Error::LogTerm { sector: sys.sector, power: j, residual: rel });
            }
            // new free directions: the kernel of R(j)
            let mut ext = DMatrix::zeros(n, nfree + mult);
            ext.columns_mut(0, nfree).copy_from(&cj);
            for t in 0..mult {
                ext.set_column(nfree + t, &v.column(n - mult + t));
            }
            for prev in coeffs.iter_mut() {
                let mut e = DMatrix::zeros(n, nfree + mult);
                e.columns_mut(0, nfree).copy_from(&prev.columns(0, nfree));
                *prev = e;
            }
            nfree += mult;
            cj = ext;
        }
        coeffs.push(cj);
    }
    if nfree != n {
        return Err(Error::DegenerateIndicial { sector: sys.sector, detail: format!("{nfree} free parameters for n = {n}") });
    }
    Ok(FrobeniusSeries { sector: sys.sector, regular_exponents: ind.regular, coeffs, resonance_residual: resid_max })
}

#[derive(Debug, Clone)]
pub struct SolutionBasisAtEquator {
    pub sector: SectorLabel,
    pub hemisphere: Hemisphere,
    /// 2n × n, orthonormal columns of (v, −∂_s v) at s = 0.
    pub data: DMatrix<f64>,
    /// Smallest principal angle to the opposite hemisphere's subspace.
    pub conditioning: f64,
    pub tail_ratio: f64,
    pub resonance_residual: f64,
    pub stats: DopriStats,
}

/// Unnormalized equator data of solutions regular at `pole`, integrated
/// directly from that pole.
pub fn equator_data_from_pole(
    sys: &RadialSystem,
    pole: Pole,
    params: &RegularParams,
) -> Result<(DMatrix<f64>, f64, f64, DopriStats)> {
    if sys.signature != Signature::Euclidean {
        return Err(Error::Other("regular bases need the Euclidean system".into()));
    }
    let n = sys.n();
    let ser = frobenius_series(sys, pole, params.series_order)?;
    let x0 = params.match_radius;
    let tail = ser.tail_ratio(x0);
    if tail > params.tail_tol {
        return Err(Error::SeriesDivergence { sector: sys.sector, ratio: tail });
    }
    let (v, vx) = ser.eval(x0);
    // s = ±(π/2 − x): ∂_s = ∓∂_x
    let (s0, ds) = match pole {
        Pole::North => (std::f64::consts::FRAC_PI_2 - x0, -1.0),
        Pole::South => (-std::f64::consts::FRAC_PI_2 + x0, 1.0),
    };
    let mut y0 = Vec::with_capacity(2 * n * n);
    let mut scales = Vec::new();
    for col in 0..n {
        let nrm = (v.column(col).norm_squared() + vx.column(col).norm_squared()).sqrt();
        scales.push(nrm);
    }
    for col in 0..n {
        y0.extend(v.column(col).iter().map(|x| x / scales[col]));
    }
    for col in 0..n {
        y0.extend(vx.column(col).iter().map(|x| ds * x / scales[col]));
    }
    let coeffs: Vec<DMatrix<f64>> = sys.coeffs.iter().map(|c| c.to_f64()).collect();
    let nn = n * n;
    let rhs = |s: f64, y: &[f64], dy: &mut [f64]| {
        let (t, c) = (s.tan(), s.cos());
        let f = [1.0, t * t, 1.0 / (c * c), t / c];
        let mut m0 = DMatrix::<f64>::zeros(n, n);
        for b in 0..4 {
            m0 += &coeffs[b] * f[b];
        }
        let vv = DMatrix::from_column_slice(n, n, &y[..nn]);
        let vp = DMatrix::from_column_slice(n, n, &y[nn..]);
        let acc = &vp * (3.0 * t) + m0 * vv;
        dy[..nn].copy_from_slice(&y[nn..]);
        dy[nn..].copy_from_slice(acc.as_slice());
    };
    let opts = DopriOptions { rtol: params.integrator_tol, atol: params.integrator_tol * 1e-3, ..Default::default() };
    let (y, stats) = integrate(rhs, s0, &y0, 0.0, &opts)?;
    let mut data = DMatrix::zeros(2 * n, n);
    for col in 0..n {
        for i in 0..n {
            data[(i, col)] = y[col * n + i];
            data[(n + i, col)] = -y[nn + col * n + i];
        }
    }
    Ok((data, tail, ser.resonance_residual, stats))
}

fn orthonormal_columns(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mut normed = m.clone();
    for mut col in normed.column_iter_mut() {
        let nrm = col.norm();
        col /= nrm;
    }
    let svd = svd_real(&normed);
    let smin = svd.s.last().copied().unwrap_or(0.0);
    if smin < 1e-10 {
        return Err(Error::Other(format!("regular solution columns dependent (σ_min = {smin:e})")));
    }
    Ok(svd.u.columns(0, m.ncols()).into_owned())
}

/// Data-space norm used for principal angles: diag(W, W).
pub fn data_norm_factor(sector: SectorLabel, rank: u8) -> CMat {
    weight_factor(&charge_forms(sector, rank).norm.to_complex())
}

pub fn regular_basis(sys: &RadialSystem, hemisphere: Hemisphere, params: &RegularParams) -> Result<SolutionBasisAtEquator> {
    let (raw, tail, res, stats) = equator_data_from_pole(sys, Pole::North, params)?;
    let plus = orthonormal_columns(&raw)?;
    let r = reflection(sys.sector, sys.op.rank()).to_f64();
    let minus = &r * &plus;
    let w = data_norm_factor(sys.sector, sys.op.rank());
    let conditioning = min_angle(&to_complex(&plus), &to_complex(&minus), Some(&w));
    let data = match hemisphere {
        Hemisphere::Plus => plus,
        Hemisphere::Minus => minus,
    };
    Ok(SolutionBasisAtEquator { sector: sys.sector, hemisphere, data, conditioning, tail_ratio: tail, resonance_residual: res, stats })
}
