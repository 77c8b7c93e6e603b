//! Dormand–Prince 5(4) with local extrapolation and a PI step controller.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct DopriOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for DopriOptions {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-14, max_steps: 200_000 }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DopriStats {
    pub accepted: usize,
    pub rejected: usize,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates y' = f(t, y) from t0 to t1 (either direction).
pub fn integrate<F>(mut f: F, t0: f64, y0: &[f64], t1: f64, opts: &DopriOptions) -> Result<(Vec<f64>, DopriStats)>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut stats = DopriStats::default();
    if t1 == t0 || n == 0 {
        return Ok((y, stats));
    }
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let mut t = t0;
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    let mut ytmp = vec![0.0; n];
    f(t, &y, &mut k[0]);
    let mut h = (span * 1e-3).min(1e-2);
    let mut err_prev: f64 = 1e-4;
    let mut last = false;
    while !last {
        if stats.accepted + stats.rejected > opts.max_steps {
            return Err(Error::Integrator(format!("step budget exhausted at t = {t}")));
        }
        if (t + dir * h - t0).abs() >= span {
            h = (t1 - t).abs();
            last = true;
        }
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += dir * h * A[s][j] * kj[i];
                }
                ytmp[i] = acc;
            }
            let (_, tail) = k.split_at_mut(s);
            f(t + dir * h * C[s], &ytmp, &mut tail[0]);
        }
        // ytmp holds the 5th-order solution (FSAL stage)
        let mut err = 0.0;
        for i in 0..n {
            let e: f64 = (0..7).map(|s| E[s] * k[s][i]).sum::<f64>() * h;
            let sc = opts.atol + opts.rtol * y[i].abs().max(ytmp[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / n as f64).sqrt();
        if !err.is_finite() {
            return Err(Error::Integrator(format!("non-finite error estimate at t = {t}")));
        }
        if err <= 1.0 {
            t = if last { t1 } else { t + dir * h };
            y.copy_from_slice(&ytmp);
            k.swap(0, 6);
            stats.accepted += 1;
            let fac = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
            h *= fac.clamp(0.2, 5.0);
            err_prev = err.max(1e-4);
        } else {
            last = false;
            stats.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
        }
        if h < 1e-14 * span {
            return Err(Error::Integrator(format!("step size underflow at t = {t}")));
        }
    }
    Ok((y, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let (y, _) = integrate(|_, y, d| { d[0] = y[1]; d[1] = -y[0]; }, 0.0, &[1.0, 0.0], 10.0, &DopriOptions::default()).unwrap();
        assert!((y[0] - 10f64.cos()).abs() < 1e-10);
        let (y, _) = integrate(|_, y, d| { d[0] = y[1]; d[1] = -y[0]; }, 0.0, &[1.0, 0.0], -3.0, &DopriOptions::default()).unwrap();
        assert!((y[1] - 3f64.sin()).abs() < 1e-11);
    }
}
