//! Brute-force check of the sector spectra: homogeneous polynomial fields on
//! ℝ⁴ restricted to S³.
//!
//! The ansatz constraints (tangency, divergence, trace, harmonicity) are
//! solved exactly over ℚ; the resulting fields are then integrated over S³
//! with a product rule that is exact for polynomials of the degrees involved.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};

use super::{Family, SectorLabel};
use crate::error::{Error, Result};
use crate::rational::{q, q_to_f64, RatMatrix};

type Exp = [u8; 4];

fn monomials(deg: i32) -> Vec<Exp> {
    let mut out = Vec::new();
    if deg < 0 {
        return out;
    }
    let d = deg as u8;
    for a in 0..=d {
        for b in 0..=d - a {
            for c in 0..=d - a - b {
                out.push([a, b, c, d - a - b - c]);
            }
        }
    }
    out
}

/// Sparse polynomial with rational-free f64 coefficients.
#[derive(Clone, Debug, Default)]
struct Poly(Vec<(Exp, f64)>);

impl Poly {
    fn eval_with_grad(&self, x: &[f64; 4], pows: &[[f64; 16]; 4]) -> (f64, [f64; 4]) {
        let mut v = 0.0;
        let mut g = [0.0; 4];
        for (e, c) in &self.0 {
            let m: f64 = (0..4).map(|i| pows[i][e[i] as usize]).product();
            v += c * m;
            for i in 0..4 {
                if e[i] > 0 {
                    let mut d = *c * e[i] as f64;
                    for j in 0..4 {
                        let p = if j == i { e[j] - 1 } else { e[j] };
                        d *= pows[j][p as usize];
                    }
                    g[i] += d;
                }
            }
        }
        let _ = x;
        (v, g)
    }
}

/// Linear constraint builder: unknowns are (component, monomial) pairs.
struct Ansatz {
    ncomp: usize,
    mons: Vec<Exp>,
    rows: Vec<HashMap<usize, i64>>,
}

impl Ansatz {
    fn new(ncomp: usize, deg: i32) -> Self {
        Self { ncomp, mons: monomials(deg), rows: Vec::new() }
    }

    fn var(&self, comp: usize, m: usize) -> usize {
        comp * self.mons.len() + m
    }

    /// Add the constraint Σ_terms coeff·(op applied to component) = 0 as a
    /// polynomial identity; each term maps a monomial of a component to
    /// (output exponent, factor).
    fn constrain<F>(&mut self, terms: &[(usize, F)])
    where
        F: Fn(Exp) -> Vec<(Exp, i64)>,
    {
        let mut by_out: HashMap<Exp, HashMap<usize, i64>> = HashMap::new();
        for (comp, f) in terms {
            for (mi, &e) in self.mons.iter().enumerate() {
                for (oe, fac) in f(e) {
                    if fac != 0 {
                        *by_out.entry(oe).or_default().entry(self.var(*comp, mi)).or_default() += fac;
                    }
                }
            }
        }
        let mut keys: Vec<Exp> = by_out.keys().copied().collect();
        keys.sort();
        for k in keys {
            let row = by_out.remove(&k).unwrap();
            if row.values().any(|&v| v != 0) {
                self.rows.push(row);
            }
        }
    }

    fn solve(&self) -> Vec<Vec<Poly>> {
        let nvar = self.ncomp * self.mons.len();
        let mut m = RatMatrix::zeros(self.rows.len(), nvar);
        for (i, r) in self.rows.iter().enumerate() {
            for (&j, &v) in r {
                m.set(i, j, q(v));
            }
        }
        let ns = if self.rows.is_empty() { RatMatrix::identity(nvar) } else { m.nullspace() };
        (0..ns.ncols())
            .map(|col| {
                (0..self.ncomp)
                    .map(|c| {
                        Poly(
                            self.mons
                                .iter()
                                .enumerate()
                                .filter_map(|(mi, &e)| {
                                    let x = ns.get(self.var(c, mi), col);
                                    let v = q_to_f64(x);
                                    (v != 0.0).then_some((e, v))
                                })
                                .collect(),
                        )
                    })
                    .collect()
            })
            .collect()
    }
}

fn mul_x(i: usize) -> impl Fn(Exp) -> Vec<(Exp, i64)> {
    move |mut e| {
        e[i] += 1;
        vec![(e, 1)]
    }
}

fn deriv(i: usize) -> impl Fn(Exp) -> Vec<(Exp, i64)> {
    move |mut e| {
        if e[i] == 0 {
            return vec![];
        }
        let f = e[i] as i64;
        e[i] -= 1;
        vec![(e, f)]
    }
}

fn identity_map() -> impl Fn(Exp) -> Vec<(Exp, i64)> {
    |e| vec![(e, 1)]
}

fn laplacian(e: Exp) -> Vec<(Exp, i64)> {
    let mut out = Vec::new();
    for i in 0..4 {
        if e[i] >= 2 {
            let mut o = e;
            o[i] -= 2;
            out.push((o, e[i] as i64 * (e[i] as i64 - 1)));
        }
    }
    out
}

type Map = Box<dyn Fn(Exp) -> Vec<(Exp, i64)>>;

fn sym_index(a: usize, b: usize) -> usize {
    let (i, j) = if a <= b { (a, b) } else { (b, a) };
    // packed upper triangle of a 4×4 symmetric matrix
    [0, 4, 7, 9][i] + (j - i)
}

/// Basis of the polynomial ansatz solutions, each a list of component polynomials.
fn ansatz_fields(family: Family, k: u32) -> Vec<Vec<Poly>> {
    let k = k as i32;
    match family {
        Family::Scalar => {
            let mut a = Ansatz::new(1, k);
            a.constrain(&[(0, Box::new(laplacian) as Map)]);
            a.solve()
        }
        Family::Vector => {
            let mut a = Ansatz::new(4, k);
            let tang: Vec<(usize, Map)> = (0..4).map(|i| (i, Box::new(mul_x(i)) as Map)).collect();
            a.constrain(&tang);
            let div: Vec<(usize, Map)> = (0..4).map(|i| (i, Box::new(deriv(i)) as Map)).collect();
            a.constrain(&div);
            for i in 0..4 {
                a.constrain(&[(i, Box::new(laplacian) as Map)]);
            }
            a.solve()
        }
        Family::TensorTT => {
            let mut a = Ansatz::new(10, k);
            for j in 0..4 {
                let t: Vec<(usize, Map)> = (0..4).map(|i| (sym_index(i, j), Box::new(mul_x(i)) as Map)).collect();
                a.constrain(&t);
                let d: Vec<(usize, Map)> = (0..4).map(|i| (sym_index(i, j), Box::new(deriv(i)) as Map)).collect();
                a.constrain(&d);
            }
            let tr: Vec<(usize, Map)> = (0..4).map(|i| (sym_index(i, i), Box::new(identity_map()) as Map)).collect();
            a.constrain(&tr);
            for c in 0..10 {
                a.constrain(&[(c, Box::new(laplacian) as Map)]);
            }
            a.solve()
        }
    }
}

pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    // nodes and weights on [0, 1]
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for m in 2..=n {
                let p2 = ((2 * m - 1) as f64 * x * p1 - (m - 1) as f64 * p0) / m as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push(((1.0 - x) / 2.0, 1.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Quadrature on S³ exact for polynomials of total degree ≤ `deg`, using
/// x = (cosθ cosφ₁, cosθ sinφ₁, sinθ cosφ₂, sinθ sinφ₂), u = sin²θ.
fn sphere_rule(deg: usize) -> Vec<([f64; 4], f64)> {
    let nphi = deg + 2;
    let gl = gauss_legendre(deg / 2 + 2);
    let mut pts = Vec::new();
    let two_pi = 2.0 * std::f64::consts::PI;
    for &(u, wu) in &gl {
        let (st, ct) = (u.sqrt(), (1.0 - u).sqrt());
        for i in 0..nphi {
            let p1 = two_pi * i as f64 / nphi as f64;
            for j in 0..nphi {
                let p2 = two_pi * j as f64 / nphi as f64;
                let w = 0.5 * wu * (two_pi / nphi as f64).powi(2);
                pts.push(([ct * p1.cos(), ct * p1.sin(), st * p2.cos(), st * p2.sin()], w));
            }
        }
    }
    pts
}

fn powers(x: &[f64; 4]) -> [[f64; 16]; 4] {
    let mut p = [[1.0; 16]; 4];
    for i in 0..4 {
        for e in 1..16 {
            p[i][e] = p[i][e - 1] * x[i];
        }
    }
    p
}

#[derive(Debug, Clone)]
pub struct HarmonicMeasurement {
    pub sector: SectorLabel,
    pub multiplicity: usize,
    /// Mean generalized Rayleigh eigenvalue over the ansatz space.
    pub eigenvalue: f64,
    /// Max deviation of individual eigenvalues from the mean, relative.
    pub spread: f64,
}

/// Per-point field data: value and tangential covariant derivative, both
/// as ambient arrays. Rank 0 uses slot [0]; rank 1 uses [a]; rank 2 uses [4a+b].
struct PointField {
    val: Vec<f64>,
    cov: Vec<f64>,
}

fn proj(x: &[f64; 4]) -> [[f64; 4]; 4] {
    let mut p = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            p[a][b] = if a == b { 1.0 } else { 0.0 } - x[a] * x[b];
        }
    }
    p
}

fn eval_field(family: Family, field: &[Poly], x: &[f64; 4]) -> PointField {
    let pw = powers(x);
    let p = proj(x);
    let comps: Vec<(f64, [f64; 4])> = field.iter().map(|c| c.eval_with_grad(x, &pw)).collect();
    match family {
        Family::Scalar => {
            let (v, g) = comps[0];
            let mut cov = vec![0.0; 4];
            for a in 0..4 {
                cov[a] = (0..4).map(|b| p[a][b] * g[b]).sum();
            }
            PointField { val: vec![v], cov }
        }
        Family::Vector => {
            let val: Vec<f64> = comps.iter().map(|c| c.0).collect();
            // cov[c*4 + a] = P_cc' P_aa' ∂_c' V_a'
            let mut cov = vec![0.0; 16];
            for cc in 0..4 {
                for a in 0..4 {
                    let mut s = 0.0;
                    for c2 in 0..4 {
                        for a2 in 0..4 {
                            s += p[cc][c2] * p[a][a2] * comps[a2].1[c2];
                        }
                    }
                    cov[cc * 4 + a] = s;
                }
            }
            PointField { val, cov }
        }
        Family::TensorTT => {
            let u = |a: usize, b: usize| comps[sym_index(a, b)];
            let mut val = vec![0.0; 16];
            for a in 0..4 {
                for b in 0..4 {
                    val[a * 4 + b] = u(a, b).0;
                }
            }
            // contract one projector at a time
            let mut t = [[[0.0; 4]; 4]; 4];
            for cc in 0..4 {
                for a in 0..4 {
                    for b in 0..4 {
                        t[cc][a][b] = (0..4).map(|c2| p[cc][c2] * u(a, b).1[c2]).sum();
                    }
                }
            }
            let mut t2 = [[[0.0; 4]; 4]; 4];
            for cc in 0..4 {
                for a in 0..4 {
                    for b in 0..4 {
                        t2[cc][a][b] = (0..4).map(|a2| p[a][a2] * t[cc][a2][b]).sum();
                    }
                }
            }
            let mut cov = vec![0.0; 64];
            for cc in 0..4 {
                for a in 0..4 {
                    for b in 0..4 {
                        cov[(cc * 4 + a) * 4 + b] = (0..4).map(|b2| p[b][b2] * t2[cc][a][b2]).sum();
                    }
                }
            }
            PointField { val, cov }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Rough-Laplacian shift making the Rayleigh quotient the Lichnerowicz eigenvalue:
/// D₁,L = ∇*∇ + Ric = ∇*∇ + 2 on 1-forms, D₂,L = ∇*∇ + 6 on TT tensors of S³.
fn curvature_shift(family: Family) -> f64 {
    match family {
        Family::Scalar => 0.0,
        Family::Vector => 2.0,
        Family::TensorTT => 6.0,
    }
}

fn sample(sector: SectorLabel) -> Result<(Vec<Vec<Poly>>, Vec<([f64; 4], f64)>)> {
    if sector.k > 3 {
        return Err(Error::Ansatz(format!("oracle limited to k <= 3, got {sector}")));
    }
    let fields = ansatz_fields(sector.family, sector.k);
    if fields.is_empty() {
        return Err(Error::Ansatz(format!("empty ansatz space for {sector}")));
    }
    // integrands: products of two derivatives of degree ≤ k+6 each
    Ok((fields, sphere_rule(2 * sector.k as usize + 14)))
}

pub fn harmonic_oracle(k: u32, family: Family) -> Result<HarmonicMeasurement> {
    let sector = SectorLabel::new(family, k)?;
    let (fields, rule) = sample(sector)?;
    let n = fields.len();
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut b = DMatrix::<f64>::zeros(n, n);
    let shift = curvature_shift(family);
    for (x, w) in &rule {
        let pf: Vec<PointField> = fields.iter().map(|f| eval_field(family, f, x)).collect();
        for i in 0..n {
            for j in i..n {
                let mass = dot(&pf[i].val, &pf[j].val);
                let stiff = dot(&pf[i].cov, &pf[j].cov) + shift * mass;
                a[(i, j)] += w * stiff;
                b[(i, j)] += w * mass;
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            a[(i, j)] = a[(j, i)];
            b[(i, j)] = b[(j, i)];
        }
    }
    let l = b.clone().cholesky().ok_or_else(|| Error::Ansatz("mass matrix not positive".into()))?;
    let linv = l.l().try_inverse().unwrap();
    let c = &linv * a * linv.transpose();
    let eig = SymmetricEigen::new((&c + c.transpose()) * 0.5);
    let mean = eig.eigenvalues.mean();
    let spread = eig.eigenvalues.iter().map(|e| (e - mean).abs()).fold(0.0, f64::max) / mean.abs().max(1.0);
    Ok(HarmonicMeasurement { sector, multiplicity: n, eigenvalue: mean, spread })
}

/// Gram matrix of the sector basis realized on one explicit harmonic
/// normalized to unit L² norm (rank-k fiber form carries the factor k!).
pub fn gram_oracle(sector: SectorLabel, rank: u8) -> Result<DMatrix<f64>> {
    let (fields, rule) = sample(sector)?;
    let field = &fields[0];
    let fam = sector.family;
    let kf = sector.k as f64;
    let elems = super::basis(sector, rank).elements;
    let mut g = DMatrix::<f64>::zeros(elems.len(), elems.len());
    let mut norm = 0.0;
    for (x, w) in &rule {
        let pf = eval_field(fam, field, x);
        let p = proj(x);
        let gen_fac = if fam == Family::TensorTT { 2.0 } else { 1.0 };
        norm += w * gen_fac * dot(&pf.val, &pf.val);
        let reps: Vec<Vec<f64>> = elems
            .iter()
            .map(|s| {
                use super::Symbol::*;
                match s {
                    Y | V | T => pf.val.clone(),
                    DY => pf.cov.clone(),
                    YH => (0..16).map(|i| pf.val[0] * p[i / 4][i % 4]).collect(),
                    DDY => {
                        // Hess = P ∂²F P − k F P for homogeneous F of degree k
                        let h = hessian(field, x);
                        let mut out = vec![0.0; 16];
                        for a in 0..4 {
                            for bb in 0..4 {
                                let mut s = 0.0;
                                for a2 in 0..4 {
                                    for b2 in 0..4 {
                                        s += p[a][a2] * p[bb][b2] * h[a2][b2];
                                    }
                                }
                                out[a * 4 + bb] = s - kf * pf.val[0] * p[a][bb];
                            }
                        }
                        out
                    }
                    DV => {
                        let mut out = vec![0.0; 16];
                        for a in 0..4 {
                            for bb in 0..4 {
                                out[a * 4 + bb] = 0.5 * (pf.cov[a * 4 + bb] + pf.cov[bb * 4 + a]);
                            }
                        }
                        out
                    }
                }
            })
            .collect();
        let fac = if rank == 2 { 2.0 } else { 1.0 };
        for i in 0..elems.len() {
            for j in 0..elems.len() {
                g[(i, j)] += w * fac * dot(&reps[i], &reps[j]);
            }
        }
    }
    Ok(g / norm)
}

fn hessian(field: &[Poly], x: &[f64; 4]) -> [[f64; 4]; 4] {
    let pw = powers(x);
    let mut h = [[0.0; 4]; 4];
    for (e, c) in &field[0].0 {
        for i in 0..4 {
            for j in 0..4 {
                let mut ee = *e;
                let fi = ee[i] as f64;
                if ee[i] == 0 {
                    continue;
                }
                ee[i] -= 1;
                let fj = ee[j] as f64;
                if ee[j] == 0 {
                    continue;
                }
                ee[j] -= 1;
                let m: f64 = (0..4).map(|t| pw[t][ee[t] as usize]).product();
                h[i][j] += c * fi * fj * m;
            }
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let r = gauss_legendre(5);
        let s: f64 = r.iter().map(|(x, w)| w * x.powi(7)).sum();
        assert!((s - 1.0 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn sphere_area() {
        let area: f64 = sphere_rule(4).iter().map(|p| p.1).sum();
        assert!((area - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-12);
    }
}
