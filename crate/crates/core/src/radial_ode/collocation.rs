//! Global Chebyshev collocation on a hemisphere, used as an independent
//! oracle for the regular-solution subspaces.

use nalgebra::DMatrix;

use super::{Pole, RadialSystem};
use crate::error::{Error, Result};
use crate::linalg::svd_real;

/// Chebyshev–Lobatto points on [−1, 1] (descending) and the differentiation matrix.
pub fn cheb(n: usize) -> (Vec<f64>, DMatrix<f64>) {
    let x: Vec<f64> = (0..=n).map(|j| (std::f64::consts::PI * j as f64 / n as f64).cos()).collect();
    let cw = |j: usize| (if j == 0 || j == n { 2.0 } else { 1.0 }) * if j % 2 == 0 { 1.0 } else { -1.0 };
    let mut d = DMatrix::zeros(n + 1, n + 1);
    for i in 0..=n {
        for j in 0..=n {
            if i != j {
                d[(i, j)] = cw(i) / cw(j) / (x[i] - x[j]);
            }
        }
    }
    for i in 0..=n {
        let s: f64 = (0..=n).filter(|&j| j != i).map(|j| d[(i, j)]).sum();
        d[(i, i)] = -s;
    }
    (x, d)
}

/// Equator data (v, −∂_s v) spanning the solutions regular at `pole`,
/// orthonormal columns; `nodes` Chebyshev intervals on the quarter circle.
pub fn collocation_basis(sys: &RadialSystem, pole: Pole, nodes: usize) -> Result<DMatrix<f64>> {
    let n = sys.n();
    let (xi, dm) = cheb(nodes);
    // x = distance to the pole on [0, π/2]; xi = 1 ↦ x = π/2
    let half = std::f64::consts::FRAC_PI_4;
    let x: Vec<f64> = xi.iter().map(|t| half * (t + 1.0)).collect();
    let d1 = dm / half;
    let d2 = &d1 * &d1;
    let np = nodes + 1;
    let a = sys.indicial_matrix(pole).to_f64();
    let coeffs: Vec<DMatrix<f64>> = sys.coeffs.iter().map(|c| c.to_f64()).collect();
    let sgn = match pole {
        Pole::North => 1.0,
        Pole::South => -1.0,
    };
    // all nodes but x = π/2 (index 0); its row block is reused below
    let mut l = DMatrix::<f64>::zeros(n * np, n * np);
    for i in 1..np {
        let xv = x[i];
        let (p1, m0) = if xv == 0.0 {
            (0.0, a.clone())
        } else {
            let (sx, cx) = xv.sin_cos();
            // tan s = ±cot x, sec s = 1/sin x
            let f = [xv * xv, (xv * cx / sx).powi(2), (xv / sx).powi(2), sgn * cx * (xv / sx).powi(2)];
            let mut m = DMatrix::zeros(n, n);
            for b in 0..4 {
                m += &coeffs[b] * f[b];
            }
            (3.0 * xv * xv * cx / sx, m)
        };
        for j in 0..np {
            let cdiag = -xv * xv * d2[(i, j)] - p1 * d1[(i, j)];
            for r in 0..n {
                l[(i * n + r, j * n + r)] += cdiag;
            }
        }
        for r in 0..n {
            for c in 0..n {
                l[(i * n + r, i * n + c)] += m0[(r, c)];
            }
        }
    }
    // the x² weighting leaves ker A unconstrained at the pole; the first
    // derivative of the weighted equation there gives (A − 3)v'(0) = 0
    let pole_idx = np - 1;
    let a3 = &a - DMatrix::identity(n, n) * 3.0;
    for j in 0..np {
        let w = d1[(pole_idx, j)];
        for r in 0..n {
            for c in 0..n {
                l[(r, j * n + c)] += a3[(r, c)] * w;
            }
        }
    }
    let svd = svd_real(&l);
    let m = n * np;
    let smax = svd.s[0];
    let gap = svd.s[m - n - 1] / smax;
    let last = svd.s[m - n] / smax;
    if gap < 1e3 * last.max(1e-300) || gap < 1e-12 {
        return Err(Error::Other(format!("collocation null space not separated ({last:e} vs {gap:e})")));
    }
    let mut data = DMatrix::zeros(2 * n, n);
    for col in 0..n {
        let v = svd.v.column(m - 1 - col);
        for r in 0..n {
            data[(r, col)] = v[r];
            // −∂_s = ±∂_x at the equator
            let mut dx = 0.0;
            for j in 0..np {
                dx += d1[(0, j)] * v[j * n + r];
            }
            data[(n + r, col)] = sgn * dx;
        }
    }
    Ok(svd_real(&data).u.columns(0, n).into_owned())
}
