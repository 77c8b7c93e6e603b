//! Lorentzian evolution of Cauchy data and Taylor jets of solutions at
//! complex points of the Euclidean radial variable.
//!
//! Lorentzian data are (Y, i⁻¹∂_t Y) in the rescaled frame. The rescaled
//! system reads Ÿ + 3 tanh t·Ẏ + M_L(t)Y = 0 with M_L = F⁻¹M₀(−it)F.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::bulk::Field;
use super::dopri::{integrate, DopriOptions};
use super::{RadialSystem, Signature};
use crate::cauchy_ops::{charge_forms, wick_map};
use crate::error::{Error, Result};
use crate::jet::{Jet, TrigJets};
use crate::linalg::{CMat, CVec, I};

/// Real fundamental matrix on (Y, Ẏ) from 0 to t.
pub fn propagator(sys: &RadialSystem, t: f64, tol: f64) -> Result<DMatrix<f64>> {
    let n = sys.n();
    let coeffs_imag = sys.lorentz_m0(t).1;
    if coeffs_imag > 1e-10 {
        return Err(Error::Integrator(format!("Lorentzian coefficients not real ({coeffs_imag:e})")));
    }
    let m = 2 * n;
    let mut y0 = vec![0.0; m * m];
    for i in 0..m {
        y0[i * m + i] = 1.0;
    }
    let rhs = |tt: f64, y: &[f64], dy: &mut [f64]| {
        let (ml, _) = sys.lorentz_m0(tt);
        let th = tt.tanh();
        for col in 0..m {
            let base = col * m;
            let (yy, yd) = (&y[base..base + n], &y[base + n..base + m]);
            for i in 0..n {
                dy[base + i] = yd[i];
                let mut acc = -3.0 * th * yd[i];
                for j in 0..n {
                    acc -= ml[(i, j)] * yy[j];
                }
                dy[base + n + i] = acc;
            }
        }
    };
    let opts = DopriOptions { rtol: tol, atol: tol * 1e-2, ..Default::default() };
    let (y, _) = integrate(rhs, 0.0, &y0, t, &opts)?;
    Ok(DMatrix::from_column_slice(m, m, &y))
}

/// Map (Y, i⁻¹Ẏ) ↦ (Y, Ẏ) and back.
fn to_raw(n: usize, data: &CVec) -> CVec {
    let mut v = data.clone();
    for i in 0..n {
        v[n + i] = data[n + i] * I;
    }
    v
}

fn from_raw(n: usize, raw: &CVec) -> CVec {
    let mut v = raw.clone();
    for i in 0..n {
        v[n + i] = -raw[n + i] * I;
    }
    v
}

/// Evolves Lorentzian data from t = 0; returns the data at each grid time.
pub fn evolve_lorentzian(sys: &RadialSystem, data: &CVec, t_grid: &[f64], tol: f64) -> Result<Vec<CVec>> {
    if sys.signature != Signature::Lorentzian {
        return Err(Error::Other("evolution needs the Lorentzian system".into()));
    }
    let n = sys.n();
    if data.len() != 2 * n {
        return Err(Error::Shape(format!("data length {} for n = {n}", data.len())));
    }
    let raw = to_raw(n, data);
    t_grid
        .iter()
        .map(|&t| {
            let u = propagator(sys, t, tol)?.map(|x| Complex64::new(x, 0.0));
            Ok(from_raw(n, &(u * &raw)))
        })
        .collect()
}

/// Evolution operator on Lorentzian data at time t.
pub fn data_propagator(sys: &RadialSystem, t: f64, tol: f64) -> Result<CMat> {
    let n = sys.n();
    let u = propagator(sys, t, tol)?.map(|x| Complex64::new(x, 0.0));
    let mut s = CMat::identity(2 * n, 2 * n);
    for i in 0..n {
        s[(n + i, n + i)] = I;
    }
    let mut sinv = CMat::identity(2 * n, 2 * n);
    for i in 0..n {
        sinv[(n + i, n + i)] = -I;
    }
    Ok(sinv * u * s)
}

/// Charge q_k of data at time t: cosh³t · f*Q f.
pub fn charge_at(sys: &RadialSystem, data: &CVec, t: f64) -> f64 {
    let q = charge_forms(sys.sector, sys.op.rank()).q.to_complex();
    let v = data.adjoint() * q * data;
    t.cosh().powi(3) * v[(0, 0)].re
}

/// Taylor jet of the Euclidean solution through (X, ∂_sX) at complex s₀,
/// rescaled frame.
pub fn euclidean_jet(sys: &RadialSystem, s0: Complex64, x: &CVec, xs: &CVec, order: usize) -> Field {
    let n = sys.n();
    let trig = TrigJets::at(s0, order);
    let fb = [&trig.one, &trig.tan2, &trig.sec2, &trig.tan_sec];
    let cb: Vec<CMat> = sys.coeffs.iter().map(|c| c.to_complex()).collect();
    let mser: Vec<CMat> = (0..=order)
        .map(|i| {
            let mut m = CMat::zeros(n, n);
            for b in 0..4 {
                m += &cb[b] * fb[b].c[i];
            }
            m
        })
        .collect();
    let mut a: Vec<CVec> = vec![x.clone(), xs.clone()];
    for k in 0..order.saturating_sub(1) {
        let mut acc = CVec::zeros(n);
        for i in 0..=k {
            acc += &a[k - i + 1] * (trig.tan.c[i] * 3.0 * (k - i + 1) as f64);
            acc += &mser[i] * &a[k - i];
        }
        a.push(acc.unscale(((k + 2) * (k + 1)) as f64));
    }
    a.truncate(order + 1);
    let comps = (0..n)
        .map(|i| Jet { c: (0..=order).map(|k| a.get(k).map(|v| v[i]).unwrap_or_default()).collect() })
        .collect();
    Field { sector: sys.sector, rank: sys.op.rank(), comps }
}

/// Rescaled-frame jet at s₀ = −it of the solution with Lorentzian data `data` at t.
pub fn jet_from_lorentz(sys: &RadialSystem, t: f64, data: &CVec, order: usize) -> Field {
    let n = sys.n();
    let (f, _) = wick_map(sys.sector, sys.op.rank());
    let eu = f * data;
    // Euclidean data (X, −∂_sX)
    let x = eu.rows(0, n).into_owned();
    let xs = -eu.rows(n, n).into_owned();
    euclidean_jet(sys, Complex64::new(0.0, -t), &x, &xs, order)
}

/// Lorentzian data of a rescaled-frame jet.
pub fn lorentz_data_of(v: &Field) -> CVec {
    let (_, finv) = wick_map(v.sector, v.rank);
    let e = DVector::from_vec(super::bulk::cauchy_data(v));
    finv * e
}
