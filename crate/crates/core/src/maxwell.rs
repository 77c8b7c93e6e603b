//! Maxwell fields: 1-forms with gauge operator d, the same Calderón and
//! phase-space machinery one rank down.

use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::calderon::{calderon, calderon_invertible_with, kernel_data, lorentzify, ProjectorPair, Source};
use crate::cauchy_ops::{charge_forms, euclidean_k10, euclidean_k10_dagger, lorentz_k10_blocks, wick_map, Layout, SlotName, Theory};
use crate::error::Result;
use crate::linalg::{max_abs, null_space, orth, subspace_distance, weight_factor, CMat, CVec};
use crate::phase_space::{direct_sum_weighted, DirectSumCheck, RANK_TOL};
use crate::radial_ode::lorentzian::evolve_lorentzian;
use crate::radial_ode::{reduce_theory, OperatorId, Signature};
use crate::rational::{q, RatMatrix, Q};
use crate::sector_algebra::{op, Family, SectorLabel, SpatialOp};
use crate::state_verify::{extrema, n_orthonormal, PositivityReport, Variant};

const TH: Theory = Theory::Maxwell;

/// Scalar and transverse vector sectors up to `k_max`.
pub fn maxwell_sectors(k_max: u32) -> Vec<SectorLabel> {
    let mut out: Vec<SectorLabel> = (0..=k_max).map(SectorLabel::scalar).collect();
    out.extend((1..=k_max).map(SectorLabel::vector));
    out
}

/// Eigenvalue of D⃗₁ on the sector's 1-form data.
pub fn d1_hat_eigenvalue(sector: SectorLabel) -> i64 {
    sector.eigenvalue()
}

pub fn in_i0(lambda: i64) -> bool {
    (0..).map(|k: i64| k * (k + 2)).take_while(|&v| v <= lambda).any(|v| v == lambda)
}

pub fn in_i1(lambda: i64) -> bool {
    (1..).map(|k: i64| k * (k + 2) + 1).take_while(|&v| v <= lambda).any(|v| v == lambda)
}

/// Hodge Laplacian on the Σ slot from δ⃗d⃗ + d⃗δ⃗ on exact forms and the
/// Lichnerowicz form on co-closed ones; `None` if the slot is absent.
pub fn sigma_spectrum(sector: SectorLabel) -> Option<i64> {
    let lay = Layout::new(sector, 1);
    lay.slots.iter().find(|s| s.name == SlotName::Sigma && s.len > 0)?;
    let m = match sector.family {
        Family::Scalar => &op(SpatialOp::D, sector, 0) * &op(SpatialOp::Delta, sector, 1),
        _ => op(SpatialOp::D1L, sector, 1),
    };
    let v = m.get(0, 0);
    v.is_integer().then(|| v.to_integer().to_i64()).flatten()
}

#[derive(Debug, Clone)]
pub struct MaxwellPhaseSpace {
    pub sector: SectorLabel,
    pub e: CMat,
    pub e_gauge: CMat,
    pub f: CMat,
    pub f_gauge: CMat,
    pub e0: CMat,
}

fn empty(rows: usize) -> CMat {
    CMat::zeros(rows, 0)
}

/// K^{q₀}: Lorentzian rank-0 data q₀-orthogonal to the constants.
pub fn kernel_q_orth(sector: SectorLabel) -> CMat {
    let n0 = Layout::new(sector, 0).data_dim();
    if n0 == 0 {
        return empty(0);
    }
    match kernel_data(sector, OperatorId::D0, TH) {
        None => CMat::identity(n0, n0),
        Some(k) => {
            let (_, finv) = wick_map(sector, 0);
            let kl = finv * k;
            let q0 = charge_forms(sector, 0).q.to_complex();
            null_space(&(kl.adjoint() * q0), RANK_TOL)
        }
    }
}

impl MaxwellPhaseSpace {
    pub fn new(sector: SectorLabel) -> Self {
        let n1 = Layout::new(sector, 1).data_dim();
        let (k10, k10d) = lorentz_k10_blocks(sector, TH);
        let kd = euclidean_k10_dagger(sector, TH);
        let e = if kd.nrows() == 0 {
            CMat::identity(n1, n1)
        } else {
            let (_, finv) = wick_map(sector, 1);
            orth(&(finv * kd.nullspace().to_complex()), RANK_TOL)
        };
        debug_assert!(k10d.nrows() == 0 || max_abs(&(&k10d * &e)) < 1e-12);
        let f = if k10.ncols() == 0 { empty(n1) } else { orth(&k10, RANK_TOL) };
        let ev = d1_hat_eigenvalue(sector);
        let e_gauge = if in_i1(ev) { e.clone() } else { empty(n1) };
        let e0 = if ev == 0 { e.clone() } else { empty(n1) };
        let kq = kernel_q_orth(sector);
        let f_gauge = if kq.ncols() == 0 { empty(n1) } else { orth(&(&k10 * kq), RANK_TOL) };
        Self { sector, e, e_gauge, f, f_gauge, e0 }
    }

    pub fn direct_sums(&self) -> [DirectSumCheck; 2] {
        let w = weight_factor(&charge_forms(self.sector, 1).norm.to_complex());
        [
            direct_sum_weighted(&w, &self.e, &[&self.e_gauge, &self.f_gauge, &self.e0]),
            direct_sum_weighted(&w, &self.e, &[&self.e_gauge, &self.f]),
        ]
    }

    /// Distance between Ker q₁|_E and F.
    pub fn charge_kernel_distance(&self) -> f64 {
        if self.e.ncols() == 0 {
            return 0.0;
        }
        let q1 = charge_forms(self.sector, 1).q.to_complex();
        let comp = self.e.adjoint() * &q1 * &self.e;
        let cut = RANK_TOL * max_abs(&q1);
        let svd = crate::linalg::svd(&comp);
        let idx: Vec<usize> = (0..comp.ncols()).filter(|&i| svd.s.get(i).is_none_or(|&x| x <= cut)).collect();
        let mut k = CMat::zeros(comp.ncols(), idx.len());
        for (j, &i) in idx.iter().enumerate() {
            k.set_column(j, &svd.v.column(i));
        }
        let ker = &self.e * k;
        if ker.ncols() == 0 && self.f.ncols() == 0 {
            return 0.0;
        }
        let w = weight_factor(&charge_forms(self.sector, 1).norm.to_complex());
        subspace_distance(&ker, &self.f, Some(&w))
    }
}

/// Euclidean columns for the Hodge parameters: u_iΣ co-closed, f_is off the
/// constants, β_s constant.
#[derive(Debug, Clone)]
pub struct MaxwellParametrization {
    pub gauge: RatMatrix,
    pub pure_gauge: RatMatrix,
    pub constant: RatMatrix,
}

pub fn parametrization(sector: SectorLabel) -> MaxwellParametrization {
    let lay = Layout::new(sector, 1);
    let n = lay.n;
    let col = |entries: &[(usize, Q)]| {
        let mut m = RatMatrix::zeros(2 * n, 1);
        for (r, v) in entries {
            m.set(*r, 0, v.clone());
        }
        m
    };
    let cat = |cols: Vec<RatMatrix>| {
        if cols.is_empty() {
            RatMatrix::zeros(2 * n, 0)
        } else {
            RatMatrix::hstack(&cols.iter().collect::<Vec<_>>())
        }
    };
    let (mut gauge, mut pure, mut constant) = (vec![], vec![], vec![]);
    match sector.family {
        Family::Vector => {
            let sg = lay.slot(SlotName::Sigma).offset;
            gauge.push(col(&[(sg, q(1))]));
            gauge.push(col(&[(n + sg, q(1))]));
        }
        Family::Scalar if sector.k == 0 => {
            constant.push(col(&[(lay.slot(SlotName::S).offset, q(1))]));
        }
        Family::Scalar => {
            let s = lay.slot(SlotName::S).offset;
            let sg = lay.slot(SlotName::Sigma).offset;
            let d = op(SpatialOp::D, sector, 0).get(0, 0).clone();
            let lam = q(sector.lambda0());
            // f_0s: g_0Σ = d⃗f, g_1s = −D⃗₀f
            pure.push(col(&[(sg, d.clone()), (n + s, -lam)]));
            // f_1s: g_0s = −f, g_1Σ = d⃗f
            pure.push(col(&[(s, q(-1)), (n + sg, d.clone())]));
        }
        Family::TensorTT => {}
    }
    MaxwellParametrization { gauge: cat(gauge), pure_gauge: cat(pure), constant: cat(constant) }
}

#[derive(Debug, Clone, Copy)]
pub struct ParametrizationCheck {
    /// Every column is annihilated by K̃₁₀Σ† exactly.
    pub inside: bool,
    pub rank: usize,
    pub dim_e: usize,
    /// Largest distance of each parameter block from its spectral subspace.
    pub block_distance: f64,
}

pub fn parametrization_check(ps: &MaxwellPhaseSpace) -> ParametrizationCheck {
    let sector = ps.sector;
    let p = parametrization(sector);
    let all = RatMatrix::hstack(&[&p.gauge, &p.pure_gauge, &p.constant]);
    let kd = euclidean_k10_dagger(sector, TH);
    let inside = all.ncols() == 0 || kd.nrows() == 0 || (&kd * &all).is_zero();
    let (_, finv) = wick_map(sector, 1);
    let w = weight_factor(&charge_forms(sector, 1).norm.to_complex());
    let dist = |m: &RatMatrix, target: &CMat| {
        if m.ncols() == 0 && target.ncols() == 0 {
            0.0
        } else {
            subspace_distance(&(&finv * m.to_complex()), target, Some(&w))
        }
    };
    let block_distance = dist(&p.gauge, &ps.e_gauge).max(dist(&p.pure_gauge, &ps.f_gauge)).max(dist(&p.constant, &ps.e0));
    ParametrizationCheck { inside, rank: all.rank(), dim_e: ps.e.ncols(), block_distance }
}

/// max|K₁₀Σ†K₁₀Σ| for the Lorentzian blocks, and the exact Euclidean product
/// being zero.
pub fn gauge_composition(sector: SectorLabel) -> (f64, bool) {
    let (k, kd) = lorentz_k10_blocks(sector, TH);
    let r = if k.ncols() == 0 || kd.nrows() == 0 { 0.0 } else { max_abs(&(kd * k)) };
    let e = euclidean_k10_dagger(sector, TH);
    let exact = e.nrows() == 0 || e.ncols() == 0 || (&e * &euclidean_k10(sector, TH)).is_zero();
    (r, exact)
}

#[derive(Debug, Clone)]
pub struct MaxwellState {
    pub sector: SectorLabel,
    pub pair: ProjectorPair,
    pub q1: CMat,
    pub norm: CMat,
    pub phase: MaxwellPhaseSpace,
}

impl MaxwellState {
    pub fn new(sector: SectorLabel) -> Result<Self> {
        Self::with_source(sector, &Source::default())
    }

    pub fn with_source(sector: SectorLabel, source: &Source) -> Result<Self> {
        let pair = lorentzify(&calderon_invertible_with(sector, OperatorId::D1, TH, source)?);
        let cf = charge_forms(sector, 1);
        Ok(Self { sector, pair, q1: cf.q.to_complex(), norm: cf.norm.to_complex(), phase: MaxwellPhaseSpace::new(sector) })
    }

    /// π = 1_{ℝ∖{0}}(D̂₁) on the sector's data.
    pub fn pi(&self) -> CMat {
        let n = self.q1.nrows();
        let keep = if d1_hat_eigenvalue(self.sector) == 0 { 0.0 } else { 1.0 };
        CMat::identity(n, n).scale(keep)
    }

    /// (λ₁⁺, λ₁⁻) = (q₁c₁⁺, −q₁c₁⁻), optionally compressed by π.
    pub fn covariances(&self, variant: Variant) -> (CMat, CMat) {
        let lp = &self.q1 * &self.pair.c_plus;
        let lm = -(&self.q1 * &self.pair.c_minus);
        match variant {
            Variant::Modified => {
                let p = self.pi();
                (p.adjoint() * lp * &p, p.adjoint() * lm * &p)
            }
            _ => (lp, lm),
        }
    }

    fn named(&self, name: MaxwellSubspace) -> &CMat {
        match name {
            MaxwellSubspace::E => &self.phase.e,
            MaxwellSubspace::EGauge => &self.phase.e_gauge,
            MaxwellSubspace::F => &self.phase.f,
            MaxwellSubspace::FGauge => &self.phase.f_gauge,
            MaxwellSubspace::E0 => &self.phase.e0,
        }
    }

    pub fn sum_rule(&self, variant: Variant) -> f64 {
        let (lp, lm) = self.covariances(variant);
        let d = lp - lm - &self.q1;
        let b = &self.phase.e;
        let scale = max_abs(&self.q1).max(1e-300);
        match variant {
            Variant::Modified if b.ncols() == 0 => 0.0,
            Variant::Modified => max_abs(&(b.adjoint() * d * b)) / scale,
            _ => max_abs(&d) / scale,
        }
    }

    pub fn hermiticity(&self) -> f64 {
        let (lp, lm) = self.covariances(Variant::Euclidean);
        let r = |m: &CMat| max_abs(&(m - m.adjoint())) / max_abs(m).max(1e-300);
        r(&lp).max(r(&lm))
    }

    pub fn positivity(&self, name: MaxwellSubspace, variant: Variant) -> PositivityReport {
        let (lp, lm) = self.covariances(variant);
        let b = n_orthonormal(self.named(name), &self.norm);
        PositivityReport {
            sector: self.sector,
            subspace: format!("{name:?}"),
            variant,
            dim: b.ncols(),
            plus: extrema(&lp, &b),
            minus: extrema(&lm, &b),
            sum: extrema(&(&lp + &lm), &b),
        }
    }

    /// max |λ±(f, g)|, N-unit f ∈ E and g ∈ `against`.
    pub fn invariance(&self, variant: Variant, against: MaxwellSubspace) -> f64 {
        let (lp, lm) = self.covariances(variant);
        let e = n_orthonormal(&self.phase.e, &self.norm);
        let g = n_orthonormal(self.named(against), &self.norm);
        if e.ncols() == 0 || g.ncols() == 0 {
            return 0.0;
        }
        max_abs(&(e.adjoint() * &lp * &g)).max(max_abs(&(e.adjoint() * &lm * &g)))
    }

    /// (|λ±(f, f)|, ‖c±f‖_N) for the N-unit f spanning E₀.
    pub fn e0_null_implication(&self) -> Option<[(f64, f64); 2]> {
        let b = n_orthonormal(&self.phase.e0, &self.norm);
        if b.ncols() != 1 {
            return None;
        }
        let f = b.column(0).into_owned();
        let (lp, lm) = self.covariances(Variant::Euclidean);
        let lh = weight_factor(&self.norm);
        let one = |lam: &CMat, c: &CMat| ((f.adjoint() * lam * &f)[(0, 0)].norm(), (&lh * (c * &f)).norm());
        Some([one(&lp, &self.pair.c_plus), one(&lm, &self.pair.c_minus)])
    }

    /// max|c₁±K₁₀Σ − K₁₀Σc₀±| on K^{q₀}, relative.
    pub fn intertwining(&self, source: &Source) -> Result<f64> {
        let kq = kernel_q_orth(self.sector);
        if kq.ncols() == 0 {
            return Ok(0.0);
        }
        let c0 = lorentzify(&calderon(self.sector, OperatorId::D0, TH, source)?);
        let (c0p, c0m) = c0.full();
        let (k10, _) = lorentz_k10_blocks(self.sector, TH);
        let scale = max_abs(&k10).max(1e-300);
        let r = |c1: &CMat, c0: &CMat| max_abs(&((c1 * &k10 - &k10 * c0) * &kq)) / scale;
        Ok(r(&self.pair.c_plus, &c0p).max(r(&self.pair.c_minus, &c0m)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MaxwellSubspace {
    E,
    EGauge,
    F,
    FGauge,
    E0,
}

/// Largest |u_t(t)·cosh³t − u_t(0)| over the grid for the Lorentzian D₁
/// solution with E₀ data, relative to |u_t(0)|.
pub fn e0_profile_deviation(times: &[f64]) -> Result<f64> {
    let sector = SectorLabel::scalar(0);
    let ps = MaxwellPhaseSpace::new(sector);
    let g: CVec = ps.e0.column(0).into_owned();
    let alpha = g[0];
    let sys = reduce_theory(OperatorId::D1, sector, Signature::Lorentzian, TH)?;
    let out = evolve_lorentzian(&sys, &g, times, 1e-12)?;
    let mut worst: f64 = 0.0;
    for (t, d) in times.iter().zip(&out) {
        let expect = alpha / Complex64::new(t.cosh().powi(3), 0.0);
        worst = worst.max((d[0] - expect).norm() / alpha.norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectra_disjoint() {
        for l in 0..200 {
            assert!(!(in_i0(l) && in_i1(l)));
        }
    }

    #[test]
    fn constant_sector() {
        let ps = MaxwellPhaseSpace::new(SectorLabel::scalar(0));
        assert_eq!((ps.e.ncols(), ps.e0.ncols(), ps.f_gauge.ncols()), (1, 1, 0));
    }
}
