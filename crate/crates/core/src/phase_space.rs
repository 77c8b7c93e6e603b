//! Gauge-fixed phase space per sector: E_TT, its gauge, pure-gauge and
//! eigenvalue-4 pieces, the projection π and the kernel of the charge.
//!
//! Subspace bases are Lorentzian rank-2 data unless stated otherwise.

use std::fmt;

use num_complex::Complex64;

use crate::cauchy_ops::{
    charge_forms, euclidean_k20_dagger, euclidean_k21_dagger, killing_q_orth_basis, lorentz_k_blocks, wick_map, CauchyBlock,
    Layout, SlotName,
};
use crate::error::{Error, Result};
use crate::linalg::{hstack, max_abs, min_angle, null_space, orth, principal_angles, singular_values, subspace_distance, CMat, CVec};
use crate::radial_ode::data_norm_factor;
use crate::rational::{q, qf, RatMatrix};
use crate::sector_algebra::{op, Family, SectorLabel, SpatialOp};

pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubspaceName {
    ETT,
    ETTGauge,
    FTT,
    FTTGauge,
    ETT4,
}

impl fmt::Display for SubspaceName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SubspaceName::ETT => "E_TT",
            SubspaceName::ETTGauge => "E_TT_gauge",
            SubspaceName::FTT => "F_TT",
            SubspaceName::FTTGauge => "F_TT_gauge",
            SubspaceName::ETT4 => "E_TT_4",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    pub sector: SectorLabel,
    pub name: SubspaceName,
    /// Orthonormal columns (Euclidean inner product on coordinates).
    pub basis: CMat,
}

impl SubspaceBasis {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn blocks(&self) -> Vec<CauchyBlock> {
        self.basis
            .column_iter()
            .map(|c| CauchyBlock { sector: self.sector, rank: 2, coords: c.into_owned() })
            .collect()
    }
}

/// Eigenvalue of D̂₂ ⊗ 1 on the sector: the Lichnerowicz operators on the
/// three slots share the generator's eigenvalue.
pub fn d2_hat_eigenvalue(sector: SectorLabel) -> i64 {
    sector.eigenvalue()
}

/// λ ∈ I₂, the spectrum of D⃗₂ on transverse traceless tensors.
pub fn in_tt_spectrum(lambda: i64) -> bool {
    (2..).map(|k: i64| k * (k + 2) + 4).take_while(|&v| v <= lambda).any(|v| v == lambda)
}

fn spectral_indicator(sector: SectorLabel, keep: impl Fn(i64) -> bool) -> CMat {
    let n = Layout::new(sector, 2).data_dim();
    if keep(d2_hat_eigenvalue(sector)) {
        CMat::identity(n, n)
    } else {
        CMat::zeros(n, n)
    }
}

/// π = 1_{ℝ∖{4}}(D̂₂ ⊗ 1).
pub fn pi_matrix(sector: SectorLabel) -> CMat {
    spectral_indicator(sector, |l| l != 4)
}

pub fn pi_projection(data: &CauchyBlock) -> CauchyBlock {
    CauchyBlock { sector: data.sector, rank: data.rank, coords: pi_matrix(data.sector) * &data.coords }
}

/// span(a) ∩ Ker b, orthonormal.
fn range_in_kernel(a: &CMat, b: &CMat) -> CMat {
    let ra = orth(a, RANK_TOL);
    if ra.ncols() == 0 {
        return ra;
    }
    let coeff = null_space(&(b * &ra), RANK_TOL);
    orth(&(&ra * coeff), RANK_TOL)
}

fn vstack(a: &CMat, b: &CMat) -> CMat {
    let mut m = CMat::zeros(a.nrows() + b.nrows(), a.ncols());
    m.rows_mut(0, a.nrows()).copy_from(a);
    m.rows_mut(a.nrows(), b.nrows()).copy_from(b);
    m
}

/// Ker K₂₁Σ† ∩ Ker K₂₀Σ† from the Lorentzian blocks.
pub fn ett_basis(sector: SectorLabel) -> SubspaceBasis {
    let lb = lorentz_k_blocks(sector);
    let stacked = vstack(&lb.k21_dagger, &lb.k20_dagger);
    let basis = if stacked.ncols() == 0 { CMat::zeros(0, 0) } else { exact_null_space(sector).unwrap_or_else(|| null_space(&stacked, RANK_TOL)) };
    SubspaceBasis { sector, name: SubspaceName::ETT, basis }
}

/// (exact dim, floating-point dim, weighted distance) for E_TT from the
/// exact Euclidean null space and the Lorentzian blocks in floating point.
pub fn ett_dual_route(sector: SectorLabel) -> (usize, usize, f64) {
    let lb = lorentz_k_blocks(sector);
    let stacked = vstack(&lb.k21_dagger, &lb.k20_dagger);
    let Some(exact) = exact_null_space(sector) else {
        return (0, 0, 0.0);
    };
    let numeric = null_space(&stacked, RANK_TOL);
    let d = if exact.ncols() == 0 && numeric.ncols() == 0 {
        0.0
    } else {
        subspace_distance(&exact, &numeric, Some(&data_norm_factor(sector, 2)))
    };
    (exact.ncols(), numeric.ncols(), d)
}

/// The same null space computed in exact arithmetic on the Euclidean side and
/// conjugated back; None when the sector has no rank-2 data.
fn exact_null_space(sector: SectorLabel) -> Option<CMat> {
    let stacked = RatMatrix::vstack(&[&euclidean_k21_dagger(sector), &euclidean_k20_dagger(sector)]);
    if stacked.ncols() == 0 {
        return None;
    }
    let ns = stacked.nullspace();
    let (_, finv) = wick_map(sector, 2);
    Some(orth(&(finv * ns.to_complex()), RANK_TOL))
}

/// Coordinates of the E_TT parametrization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coord {
    U0,
    U1,
    F0,
    F1,
    BetaS,
    BetaSigma,
}

/// Euclidean data spanned by the parameters (u_iΣΣ, f_iΣ, β_s, β_Σ), exact.
#[derive(Debug, Clone)]
pub struct Parametrization {
    pub sector: SectorLabel,
    pub matrix: RatMatrix,
    pub coords: Vec<Coord>,
}

pub fn parametrization(sector: SectorLabel) -> Parametrization {
    let lay = Layout::new(sector, 2);
    let half = lay.n;
    let (ss, sg, gg) = (lay.slot(SlotName::SS).clone(), lay.slot(SlotName::SSigma).clone(), lay.slot(SlotName::SigmaSigma).clone());
    let n0 = ss.len;
    let n1 = sg.len;
    let n2 = gg.len;
    let ev = sector.eigenvalue();

    // TT directions inside the ΣΣ slot
    let tt = if n2 == 0 {
        RatMatrix::zeros(0, 0)
    } else {
        let cond = if n1 > 0 && n0 > 0 {
            RatMatrix::vstack(&[&op(SpatialOp::Delta, sector, 2), &op(SpatialOp::TraceH, sector, 2)])
        } else if n1 > 0 {
            op(SpatialOp::Delta, sector, 2)
        } else if n0 > 0 {
            op(SpatialOp::TraceH, sector, 2)
        } else {
            RatMatrix::zeros(0, n2)
        };
        cond.nullspace()
    };
    let nf = if n1 > 0 && ev != 3 && ev != 4 { n1 } else { 0 };
    let nbs = if sector.family == Family::Scalar && sector.lambda0() == 3 { n0 } else { 0 };
    let nbg = if n1 > 0 && ev == 4 { n1 } else { 0 };

    let mut cols: Vec<(Coord, RatMatrix)> = Vec::new();
    let put = |v: &mut RatMatrix, h: usize, off: usize, block: &RatMatrix| {
        for i in 0..block.nrows() {
            v.add_at(h * half + off + i, 0, block.get(i, 0));
        }
    };
    for j in 0..tt.ncols() {
        for (h, name) in [(0, Coord::U0), (1, Coord::U1)] {
            let mut v = RatMatrix::zeros(2 * half, 1);
            put(&mut v, h, gg.offset, &tt.column(j));
            cols.push((name, v));
        }
    }
    if nf > 0 {
        let d1 = op(SpatialOp::D, sector, 1);
        let del1 = if n0 > 0 { op(SpatialOp::Delta, sector, 1) } else { RatMatrix::zeros(0, n1) };
        let d0 = if n0 > 0 { op(SpatialOp::D, sector, 0) } else { RatMatrix::zeros(n1, 0) };
        let del2 = op(SpatialOp::Delta, sector, 2);
        let th = if n0 > 0 { op(SpatialOp::TimesH, sector, 0) } else { RatMatrix::zeros(n2, 0) };
        let inv6 = qf(1, sector.lambda0() - 6);
        for j in 0..nf {
            let mut e = RatMatrix::zeros(n1, 1);
            e.set(j, 0, q(1));
            // f₀
            let mut v = RatMatrix::zeros(2 * half, 1);
            put(&mut v, 0, ss.offset, &(&del1 * &e));
            put(&mut v, 0, gg.offset, &(&d1 * &e));
            put(&mut v, 1, sg.offset, &(&(&del2 * &d1) * &e).scale(&qf(-1, 2)));
            cols.push((Coord::F0, v));
            // f₁
            let mut v = RatMatrix::zeros(2 * half, 1);
            let df = &del1 * &e;
            let corr = &(&d0 * &df).scale(&inv6);
            put(&mut v, 0, sg.offset, &(&e + corr).scale(&qf(-1, 2)));
            put(&mut v, 1, ss.offset, &df.scale(&(q(1) + q(3) * &inv6)));
            put(&mut v, 1, gg.offset, &(&(&d1 * &e) - &(&th * &df).scale(&inv6)));
            cols.push((Coord::F1, v));
        }
    }
    for j in 0..nbs {
        let mut e = RatMatrix::zeros(n0, 1);
        e.set(j, 0, q(1));
        let mut v = RatMatrix::zeros(2 * half, 1);
        put(&mut v, 0, ss.offset, &e.scale(&q(-3)));
        put(&mut v, 0, gg.offset, &(&op(SpatialOp::TimesH, sector, 0) * &e));
        put(&mut v, 1, sg.offset, &(&op(SpatialOp::D, sector, 0) * &e));
        cols.push((Coord::BetaS, v));
    }
    for j in 0..nbg {
        let mut e = RatMatrix::zeros(n1, 1);
        e.set(j, 0, q(1));
        let mut v = RatMatrix::zeros(2 * half, 1);
        put(&mut v, 0, sg.offset, &e);
        cols.push((Coord::BetaSigma, v));
    }
    let refs: Vec<&RatMatrix> = cols.iter().map(|(_, v)| v).collect();
    let matrix = if refs.is_empty() { RatMatrix::zeros(2 * half, 0) } else { RatMatrix::hstack(&refs) };
    Parametrization { sector, matrix, coords: cols.into_iter().map(|(c, _)| c).collect() }
}

/// Exact check that the parametrization lands in Ẽ_TT; returns the rank of
/// the parameter map and the dimension of Ẽ_TT.
pub fn parametrization_exact(sector: SectorLabel) -> (bool, usize, usize) {
    let p = parametrization(sector);
    let k = RatMatrix::vstack(&[&euclidean_k21_dagger(sector), &euclidean_k20_dagger(sector)]);
    let inside = p.matrix.ncols() == 0 || (&k * &p.matrix).is_zero();
    let dim_e = if k.ncols() == 0 { 0 } else { k.nullspace().ncols() };
    (inside, p.matrix.rank(), dim_e)
}

#[derive(Debug, Clone, Default)]
pub struct Flags {
    pub in_e_tt_gauge: bool,
    pub in_f_tt: bool,
    pub in_f_tt_gauge: bool,
    pub in_e_tt_4: bool,
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub coords: Vec<(Coord, Complex64)>,
    pub flags: Flags,
    pub residual: f64,
}

/// Coordinates of Lorentzian E_TT data in the parametrization.
pub fn decompose(data: &CauchyBlock) -> Result<Decomposition> {
    let sector = data.sector;
    let lb = lorentz_k_blocks(sector);
    let scale = data.coords.norm().max(1e-300);
    let memb = (max_abs(&(&lb.k21_dagger * &data.coords)) + max_abs(&(&lb.k20_dagger * &data.coords))) / scale;
    if memb > 1e-10 {
        return Err(Error::Membership(memb));
    }
    let p = parametrization(sector);
    let (f, _) = wick_map(sector, 2);
    let g = f * &data.coords;
    let pm = p.matrix.to_complex();
    let c: CVec = if pm.ncols() == 0 {
        CVec::zeros(0)
    } else {
        let svd = crate::linalg::svd(&pm);
        let mut out = CVec::zeros(pm.ncols());
        let uh_g = svd.u.adjoint() * &g;
        for (i, &s) in svd.s.iter().enumerate() {
            if s > RANK_TOL * svd.s[0] {
                out += svd.v.column(i) * (uh_g[i] / s);
            }
        }
        out
    };
    let residual = if pm.ncols() == 0 { g.norm() / scale } else { (&pm * &c - &g).norm() / scale };
    if residual > 1e-10 {
        return Err(Error::Membership(residual));
    }
    let tol = 1e-10 * c.norm().max(1.0);
    let zero = |which: &[Coord]| p.coords.iter().zip(c.iter()).filter(|(k, _)| which.contains(k)).all(|(_, z)| z.norm() <= tol);
    use Coord::*;
    let flags = Flags {
        in_e_tt_gauge: zero(&[F0, F1, BetaS, BetaSigma]),
        in_f_tt: zero(&[U0, U1]),
        in_f_tt_gauge: zero(&[U0, U1, BetaSigma]),
        in_e_tt_4: zero(&[U0, U1, F0, F1, BetaS]),
    };
    Ok(Decomposition { coords: p.coords.iter().copied().zip(c.iter().copied()).collect(), flags, residual })
}

/// All named subspaces of one sector.
#[derive(Debug, Clone)]
pub struct PhaseSpace {
    pub sector: SectorLabel,
    pub e_tt: SubspaceBasis,
    pub e_tt_gauge: SubspaceBasis,
    pub f_tt: SubspaceBasis,
    pub f_tt_gauge: SubspaceBasis,
    pub e_tt_4: SubspaceBasis,
}

impl PhaseSpace {
    pub fn new(sector: SectorLabel) -> Self {
        let lb = lorentz_k_blocks(sector);
        let e_tt = ett_basis(sector);
        let sub = |name, basis| SubspaceBasis { sector, name, basis };
        let gauge_proj = spectral_indicator(sector, in_tt_spectrum);
        let e_tt_gauge = sub(SubspaceName::ETTGauge, orth(&(&gauge_proj * &e_tt.basis), RANK_TOL));
        let f_tt = sub(SubspaceName::FTT, range_in_kernel(&lb.k21, &lb.k20_dagger));
        let (_, f1inv) = wick_map(sector, 1);
        let kq = f1inv * killing_q_orth_basis(sector).to_complex();
        let f_tt_gauge = sub(SubspaceName::FTTGauge, range_in_kernel(&(&lb.k21 * kq), &lb.k20_dagger));
        let four = spectral_indicator(sector, |l| l == 4);
        let e_tt_4 = sub(SubspaceName::ETT4, orth(&(&four * &f_tt.basis), RANK_TOL));
        Self { sector, e_tt, e_tt_gauge, f_tt, f_tt_gauge, e_tt_4 }
    }

    pub fn get(&self, name: SubspaceName) -> &SubspaceBasis {
        match name {
            SubspaceName::ETT => &self.e_tt,
            SubspaceName::ETTGauge => &self.e_tt_gauge,
            SubspaceName::FTT => &self.f_tt,
            SubspaceName::FTTGauge => &self.f_tt_gauge,
            SubspaceName::ETT4 => &self.e_tt_4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DirectSumCheck {
    pub dims: Vec<usize>,
    pub total: usize,
    /// dim of the span of all pieces together.
    pub span_dim: usize,
    /// Smallest angle between any piece and the sum of the others.
    pub transversality: f64,
    /// Largest angle between the sum and the target space.
    pub span_distance: f64,
}

impl DirectSumCheck {
    pub fn holds(&self, min_angle_tol: f64, dist_tol: f64) -> bool {
        self.dims.iter().sum::<usize>() == self.total
            && self.span_dim == self.total
            && self.transversality >= min_angle_tol
            && self.span_distance <= dist_tol
    }
}

/// target = ⊕ pieces, checked by dimensions and principal angles.
pub fn direct_sum(target: &SubspaceBasis, pieces: &[&SubspaceBasis]) -> DirectSumCheck {
    let w = data_norm_factor(target.sector, 2);
    let all: Vec<&CMat> = pieces.iter().map(|p| &p.basis).collect();
    direct_sum_weighted(&w, &target.basis, &all)
}

/// `target` = ⊕ `pieces`, angles measured with the weight factor `w`.
pub fn direct_sum_weighted(w: &CMat, target: &CMat, pieces: &[&CMat]) -> DirectSumCheck {
    let dims: Vec<usize> = pieces.iter().map(|p| p.ncols()).collect();
    let span = if pieces.is_empty() { CMat::zeros(target.nrows(), 0) } else { hstack(pieces) };
    let span_dim = orth(&span, RANK_TOL).ncols();
    let mut transversality = std::f64::consts::FRAC_PI_2;
    for (i, p) in pieces.iter().enumerate() {
        let others: Vec<&CMat> = pieces.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| *q).collect();
        if p.ncols() == 0 || others.iter().all(|o| o.ncols() == 0) {
            continue;
        }
        let rest = hstack(&others);
        transversality = transversality.min(min_angle(p, &rest, Some(w)));
    }
    let total = orth(target, RANK_TOL).ncols();
    let span_distance = if total == 0 && span_dim == 0 { 0.0 } else { subspace_distance(&span, target, Some(w)) };
    DirectSumCheck { dims, total, span_dim, transversality, span_distance }
}

#[derive(Debug, Clone)]
pub struct ChargeKernelReport {
    pub sector: SectorLabel,
    pub dim_e_tt: usize,
    pub dim_f_tt: usize,
    pub dim_kernel: usize,
    /// Largest angle between the kernel and F_TT (0 when both vanish).
    pub angle: f64,
    /// Smallest singular value of the charge on E_TT/F_TT, relative to ‖q‖.
    pub quotient_sigma_min: Option<f64>,
}

impl ChargeKernelReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.dim_kernel == self.dim_f_tt && self.angle <= tol && self.quotient_sigma_min.is_none_or(|s| s > tol)
    }
}

/// Null space of q_{I,2} restricted to E_TT against F_TT.
pub fn charge_kernel_check(sector: SectorLabel) -> ChargeKernelReport {
    let ps = PhaseSpace::new(sector);
    let qi = charge_forms(sector, 2).q_i.to_complex();
    let e = &ps.e_tt.basis;
    let scale = max_abs(&qi).max(1e-300);
    let (dim_kernel, kernel) = if e.ncols() == 0 {
        (0, CMat::zeros(e.nrows(), 0))
    } else {
        // absolute cutoff relative to ‖q‖: the compression is often exactly zero
        let comp = e.adjoint() * &qi * e;
        let svd = crate::linalg::svd(&comp);
        let cut = RANK_TOL * scale;
        let idx: Vec<usize> = (0..comp.ncols()).filter(|&i| svd.s.get(i).is_none_or(|&x| x <= cut)).collect();
        let mut k = CMat::zeros(comp.ncols(), idx.len());
        for (j, &i) in idx.iter().enumerate() {
            k.set_column(j, &svd.v.column(i));
        }
        (idx.len(), e * k)
    };
    let w = data_norm_factor(sector, 2);
    let angle = if dim_kernel == 0 && ps.f_tt.dim() == 0 {
        0.0
    } else {
        subspace_distance(&kernel, &ps.f_tt.basis, Some(&w))
    };
    // E_TT_gauge is a complement of F_TT in E_TT
    let g = &ps.e_tt_gauge.basis;
    let quotient_sigma_min = (g.ncols() > 0).then(|| {
        singular_values(&(g.adjoint() * &qi * g)).last().copied().unwrap_or(0.0) / scale
    });
    ChargeKernelReport { sector, dim_e_tt: e.ncols(), dim_f_tt: ps.f_tt.dim(), dim_kernel, angle, quotient_sigma_min }
}

/// Largest principal angle between the parametrized F_TT (u = 0) and the
/// K₂₁Σ-image construction.
pub fn f_tt_cross_check(sector: SectorLabel) -> f64 {
    let ps = PhaseSpace::new(sector);
    let p = parametrization(sector);
    let (_, finv) = wick_map(sector, 2);
    let pm = finv * p.matrix.to_complex();
    let sel: Vec<usize> = (0..p.coords.len()).filter(|&i| !matches!(p.coords[i], Coord::U0 | Coord::U1)).collect();
    let mut m = CMat::zeros(pm.nrows(), sel.len());
    for (j, &i) in sel.iter().enumerate() {
        m.set_column(j, &pm.column(i));
    }
    if m.ncols() == 0 && ps.f_tt.dim() == 0 {
        return 0.0;
    }
    let w = data_norm_factor(sector, 2);
    subspace_distance(&m, &ps.f_tt.basis, Some(&w))
}

/// Angles between the E_TT null space and the parametrization image.
pub fn parametrization_angles(sector: SectorLabel) -> Vec<f64> {
    let ps = PhaseSpace::new(sector);
    let (_, finv) = wick_map(sector, 2);
    let pm = finv * parametrization(sector).matrix.to_complex();
    principal_angles(&pm, &ps.e_tt.basis, Some(&data_norm_factor(sector, 2)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tt_spectrum() {
        assert!(in_tt_spectrum(12) && in_tt_spectrum(19) && !in_tt_spectrum(4) && !in_tt_spectrum(3));
    }

    #[test]
    fn vector1_is_eigenvalue_four() {
        let ps = PhaseSpace::new(SectorLabel::vector(1));
        assert_eq!(ps.e_tt.dim(), 1);
        assert_eq!(ps.e_tt_4.dim(), 1);
        assert_eq!(ps.f_tt_gauge.dim(), 0);
        let b = &ps.e_tt.blocks()[0];
        assert!(max_abs(&pi_projection(b).coords) == 0.0);
    }

    #[test]
    fn tensor_block_is_gauge() {
        let ps = PhaseSpace::new(SectorLabel::tensor(3));
        assert_eq!(ps.e_tt.dim(), 2);
        assert_eq!(ps.e_tt_gauge.dim(), 2);
        assert_eq!(ps.f_tt.dim(), 0);
    }
}
