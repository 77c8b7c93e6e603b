//! Cauchy-surface covariances of the Euclidean vacuum, its modification by π
//! and the α-vacua, with the sign, invariance and symmetry checks on them.
//!
//! Subspace compressions use bases orthonormal for the positive data norm
//! N = diag(W, W), so eigenvalues and residuals are scale free.

use num_complex::Complex64;

use crate::calderon::{calderon_invertible_with, lorentzify, ProjectorPair, Source};
use crate::cauchy_ops::{charge_forms, lorentz_k_blocks, reflection, HermitianBlockForm, Theory};
use crate::error::Result;
use crate::linalg::{hermitian_eigenvalues, max_abs, orth, weight_factor, CMat};
use crate::phase_space::{pi_matrix, PhaseSpace, SubspaceName, RANK_TOL};
use crate::radial_ode::frobenius::frobenius_series;
use crate::radial_ode::lorentzian::data_propagator;
use crate::radial_ode::{reduce, OperatorId, Pole, Signature};
use crate::sector_algebra::harmonic::gauss_legendre;
use crate::sector_algebra::{Family, SectorLabel};

pub const VERDICT_TOL: f64 = 1e-9;
pub const MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Variant {
    Euclidean,
    Modified,
    Alpha(f64),
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Variant::Euclidean => f.write_str("euclidean"),
            Variant::Modified => f.write_str("modified"),
            Variant::Alpha(a) => write!(f, "alpha({a})"),
        }
    }
}

/// Lorentzian projectors, forms and phase space of one sector.
#[derive(Debug, Clone)]
pub struct SectorState {
    pub sector: SectorLabel,
    pub pair: ProjectorPair,
    pub q_i: CMat,
    pub norm: CMat,
    pub phase: PhaseSpace,
}

impl SectorState {
    pub fn new(sector: SectorLabel) -> Result<Self> {
        Self::with_source(sector, &Source::default())
    }

    pub fn with_source(sector: SectorLabel, source: &Source) -> Result<Self> {
        let pair = lorentzify(&calderon_invertible_with(sector, OperatorId::D2, Theory::Gravity, source)?);
        let cf = charge_forms(sector, 2);
        Ok(Self { sector, pair, q_i: cf.q_i.to_complex(), norm: cf.norm.to_complex(), phase: PhaseSpace::new(sector) })
    }

    /// N-orthonormal basis of span(b).
    pub fn n_orthonormal(&self, b: &CMat) -> CMat {
        n_orthonormal(b, &self.norm)
    }
}

pub fn n_orthonormal(b: &CMat, norm: &CMat) -> CMat {
    if b.ncols() == 0 {
        return b.clone();
    }
    let lh = weight_factor(norm);
    let q = orth(&(&lh * b), RANK_TOL);
    lh.try_inverse().expect("weight factor invertible") * q
}

#[derive(Debug, Clone)]
pub struct CovariancePair {
    pub sector: SectorLabel,
    pub variant: Variant,
    pub lambda_plus: HermitianBlockForm,
    pub lambda_minus: HermitianBlockForm,
}

/// S_Σ = diag(κ₂, −κ₂), the Cauchy-surface Racah reversal.
pub fn s_sigma(sector: SectorLabel) -> CMat {
    reflection(sector, 2).to_complex()
}

/// U_α = cosh α + sinh α S_Σ.
pub fn u_alpha(sector: SectorLabel, alpha: f64) -> CMat {
    let s = s_sigma(sector);
    CMat::identity(s.nrows(), s.ncols()).scale(alpha.cosh()) + s.scale(alpha.sinh())
}

pub fn build_covariances(st: &SectorState, variant: Variant) -> CovariancePair {
    let lp = &st.q_i * &st.pair.c_plus;
    let lm = -(&st.q_i * &st.pair.c_minus);
    let conj = |m: &CMat, u: &CMat| u.adjoint() * m * u;
    let (lp, lm) = match variant {
        Variant::Euclidean => (lp, lm),
        Variant::Modified => {
            let p = pi_matrix(st.sector);
            (conj(&lp, &p), conj(&lm, &p))
        }
        Variant::Alpha(a) => {
            let u = u_alpha(st.sector, a);
            (conj(&lp, &u), conj(&lm, &u))
        }
    };
    let form = |m: CMat| HermitianBlockForm { sector: st.sector, rank: 2, matrix: m };
    CovariancePair { sector: st.sector, variant, lambda_plus: form(lp), lambda_minus: form(lm) }
}

impl CovariancePair {
    pub fn hermiticity(&self) -> f64 {
        let r = |m: &CMat| max_abs(&(m - m.adjoint())) / max_abs(m).max(1e-300);
        r(&self.lambda_plus.matrix).max(r(&self.lambda_minus.matrix))
    }

    /// max|λ⁺ − λ⁻ − q_{I,2}| relative to |q_{I,2}|, compressed to `domain`
    /// when given.
    pub fn sum_rule(&self, q_i: &CMat, domain: Option<&CMat>) -> f64 {
        let d = &self.lambda_plus.matrix - &self.lambda_minus.matrix - q_i;
        let scale = max_abs(q_i).max(1e-300);
        match domain {
            Some(b) if b.ncols() == 0 => 0.0,
            Some(b) => max_abs(&(b.adjoint() * d * b)) / scale,
            None => max_abs(&d) / scale,
        }
    }
}

/// Extremal eigenvalues of a form compressed to an N-orthonormal basis.
pub(crate) fn extrema(m: &CMat, b: &CMat) -> Option<(f64, f64)> {
    if b.ncols() == 0 {
        return None;
    }
    let ev = hermitian_eigenvalues(&(b.adjoint() * m * b));
    Some((ev[0], ev[ev.len() - 1]))
}

#[derive(Debug, Clone)]
pub struct PositivityReport {
    pub sector: SectorLabel,
    pub subspace: String,
    pub variant: Variant,
    pub dim: usize,
    pub plus: Option<(f64, f64)>,
    pub minus: Option<(f64, f64)>,
    pub sum: Option<(f64, f64)>,
}

impl PositivityReport {
    /// λ± ⪰ −tol.
    pub fn nonnegative(&self, tol: f64) -> bool {
        [self.plus, self.minus].iter().all(|e| e.is_none_or(|(lo, _)| lo >= -tol))
    }

    /// λ± ⪯ tol and λ⁺ + λ⁻ ≤ −margin.
    pub fn negative(&self, tol: f64, margin: f64) -> bool {
        [self.plus, self.minus].iter().all(|e| e.is_none_or(|(_, hi)| hi <= tol)) && self.sum.is_none_or(|(_, hi)| hi <= -margin)
    }

    /// Largest |eigenvalue| of λ±.
    pub fn max_abs(&self) -> f64 {
        [self.plus, self.minus].iter().flatten().map(|(lo, hi)| lo.abs().max(hi.abs())).fold(0.0, f64::max)
    }
}

pub fn positivity_report(st: &SectorState, name: SubspaceName, variant: Variant) -> PositivityReport {
    let cov = build_covariances(st, variant);
    let b = st.n_orthonormal(&st.phase.get(name).basis);
    let (lp, lm) = (&cov.lambda_plus.matrix, &cov.lambda_minus.matrix);
    PositivityReport {
        sector: st.sector,
        subspace: name.to_string(),
        variant,
        dim: b.ncols(),
        plus: extrema(lp, &b),
        minus: extrema(lm, &b),
        sum: extrema(&(lp + lm), &b),
    }
}

/// max |λ±(f, g)| over N-orthonormal f ∈ E_TT, g ∈ F_TT_gauge.
pub fn weak_invariance(st: &SectorState, variant: Variant) -> f64 {
    let cov = build_covariances(st, variant);
    let e = st.n_orthonormal(&st.phase.e_tt.basis);
    let g = st.n_orthonormal(&st.phase.f_tt_gauge.basis);
    if e.ncols() == 0 || g.ncols() == 0 {
        return 0.0;
    }
    let r = |m: &CMat| max_abs(&(e.adjoint() * m * &g));
    r(&cov.lambda_plus.matrix).max(r(&cov.lambda_minus.matrix))
}

/// max |λ±(f, f)| over N-unit f ∈ E_TT_4; a positive value witnesses the
/// failure of strong gauge invariance.
pub fn strong_invariance_witness(st: &SectorState) -> Option<f64> {
    let b = st.n_orthonormal(&st.phase.e_tt_4.basis);
    if b.ncols() == 0 {
        return None;
    }
    let cov = build_covariances(st, Variant::Euclidean);
    let ext = |m: &CMat| extrema(m, &b).map(|(lo, hi)| lo.abs().max(hi.abs())).unwrap_or(0.0);
    Some(ext(&cov.lambda_plus.matrix).max(ext(&cov.lambda_minus.matrix)))
}

/// max |λ±(f, K₂₁Σg)| over N-unit f ∈ E_TT and N-unit directions of
/// Ran K₂₁Σ (all of it, not only harmonic-gauge images).
pub fn full_invariance(st: &SectorState, variant: Variant) -> f64 {
    let cov = build_covariances(st, variant);
    let e = st.n_orthonormal(&st.phase.e_tt.basis);
    let k21 = lorentz_k_blocks(st.sector).k21;
    if e.ncols() == 0 || k21.ncols() == 0 {
        return 0.0;
    }
    let h = st.n_orthonormal(&k21);
    let r = |m: &CMat| max_abs(&(e.adjoint() * m * &h));
    r(&cov.lambda_plus.matrix).max(r(&cov.lambda_minus.matrix))
}

#[derive(Debug, Clone, Copy)]
pub struct NullImplication {
    /// |λ±(f, f)| for the N-unit f spanning E_TT_4.
    pub lambda: f64,
    /// N-norm of c₂±f.
    pub projected: f64,
}

impl NullImplication {
    /// λ±(f, f) = 0 ⇒ c₂±f = 0.
    pub fn holds(&self, tol: f64) -> bool {
        self.lambda > tol || self.projected <= tol
    }
}

/// The E_TT_4 null implication, one entry per sign, when E_TT_4 is a line.
pub fn e4_null_implication(st: &SectorState) -> Option<[NullImplication; 2]> {
    let b = st.n_orthonormal(&st.phase.e_tt_4.basis);
    if b.ncols() != 1 {
        return None;
    }
    let cov = build_covariances(st, Variant::Euclidean);
    let lh = weight_factor(&st.norm);
    let f = b.column(0).into_owned();
    let one = |lam: &CMat, c: &CMat| NullImplication {
        lambda: (f.adjoint() * lam * &f)[(0, 0)].norm(),
        projected: (&lh * (c * &f)).norm(),
    };
    Some([one(&cov.lambda_plus.matrix, &st.pair.c_plus), one(&cov.lambda_minus.matrix, &st.pair.c_minus)])
}

#[derive(Debug, Clone, Copy)]
pub struct SymmetryResiduals {
    /// Imaginary part of the Euclidean projectors (Z̃ conjugation is
    /// negated complex conjugation).
    pub euclidean_real: f64,
    /// λ±(Zf, Zg) against λ±(g, f).
    pub time_reversal: f64,
    /// S*q_{I,2}S + q_{I,2}.
    pub s_flips_charge: f64,
    /// S² − 1.
    pub s_involution: f64,
    /// S U(t) − U(−t) S for the D₂ evolution at t = 1.
    pub s_reverses_evolution: f64,
}

/// Lorentzian time reversal: Z_Σ f = K f̄ with K = diag(κ₂, κ₂).
pub fn time_reversal_matrix(sector: SectorLabel) -> CMat {
    let r = reflection(sector, 2).to_complex();
    let n = r.nrows() / 2;
    let mut k = r.clone();
    for i in 0..n {
        k[(n + i, n + i)] = r[(i, i)];
    }
    k
}

pub fn symmetry_residuals(st: &SectorState) -> Result<SymmetryResiduals> {
    let e_plus = st.pair.c_plus.clone();
    let (fmat, finv) = crate::cauchy_ops::wick_map(st.sector, 2);
    let ct = &fmat * &e_plus * &finv;
    let euclidean_real = ct.iter().map(|z| z.im.abs()).fold(0.0, f64::max) / max_abs(&ct).max(1e-300);
    let k = time_reversal_matrix(st.sector);
    let cov = build_covariances(st, Variant::Euclidean);
    // conj(Kf)ᵀ λ (K ḡ) = g* (K λ K)ᵀ f, so invariance is K λ̄ K = λ
    let tr = |m: &CMat| max_abs(&(&k * m.map(|z| z.conj()) * &k - m)) / max_abs(m).max(1e-300);
    let time_reversal = tr(&cov.lambda_plus.matrix).max(tr(&cov.lambda_minus.matrix));
    let s = s_sigma(st.sector);
    let scale = max_abs(&st.q_i).max(1e-300);
    let s_flips_charge = max_abs(&(s.adjoint() * &st.q_i * &s + &st.q_i)) / scale;
    let s_involution = max_abs(&(&s * &s - CMat::identity(s.nrows(), s.ncols())));
    let sys = reduce(OperatorId::D2, st.sector, Signature::Lorentzian)?;
    let fwd = data_propagator(&sys, 1.0, 1e-12)?;
    let bwd = data_propagator(&sys, -1.0, 1e-12)?;
    let s_reverses_evolution = max_abs(&(&s * fwd - bwd * &s)) / max_abs(&s).max(1e-300);
    Ok(SymmetryResiduals { euclidean_real, time_reversal, s_flips_charge, s_involution, s_reverses_evolution })
}

/// U_α*q_{I,2}U_α − q_{I,2}, relative.
pub fn u_alpha_unitarity(st: &SectorState, alpha: f64) -> f64 {
    let u = u_alpha(st.sector, alpha);
    max_abs(&(u.adjoint() * &st.q_i * &u - &st.q_i)) / max_abs(&st.q_i).max(1e-300)
}

/// Largest angle by which U_α moves a named subspace out of itself.
pub fn u_alpha_preserves(st: &SectorState, alpha: f64, name: SubspaceName) -> f64 {
    let b = &st.phase.get(name).basis;
    if b.ncols() == 0 {
        return 0.0;
    }
    let u = u_alpha(st.sector, alpha);
    let w = weight_factor(&st.norm);
    crate::linalg::subspace_distance(&(u * b), b, Some(&w))
}

#[derive(Debug, Clone, Copy)]
pub struct EnergyOracle {
    /// λ⁺(g, g) for the plus-regular datum g from the Calderón projector.
    pub lambda_plus: f64,
    /// 2Q(u, u) over the plus cap by quadrature of the energy density.
    pub two_q: f64,
}

impl EnergyOracle {
    pub fn rel_diff(&self) -> f64 {
        (self.lambda_plus - self.two_q).abs() / self.two_q.abs().max(1e-300)
    }
}

/// For a TT mode u_ΣΣ = cos²s·v(s)·T the energy density
/// ∇ū·∇u + 2|u|² integrates over the cap s ∈ [0, π/2] to
/// W∫cos³s (|v'|² + λ₀sec²s |v|²) ds, W the Gram weight of T. The
/// regular solution v comes from its series at the pole.
pub fn tt_energy_oracle(st: &SectorState) -> Result<Option<EnergyOracle>> {
    let sector = st.sector;
    if sector.family != Family::TensorTT {
        return Ok(None);
    }
    let sys = reduce(OperatorId::D2, sector, Signature::Euclidean)?;
    let ser = frobenius_series(&sys, Pole::North, 160)?;
    let h = std::f64::consts::FRAC_PI_2;
    let lam0 = sector.lambda0() as f64;
    let w = st.norm[(0, 0)].re;
    let mut q = 0.0;
    for (x, wt) in gauss_legendre(120) {
        let dist = h * x;
        let s = h - dist;
        let (v, vx) = ser.eval(dist);
        let (v, vs) = (v[(0, 0)], -vx[(0, 0)]);
        q += h * wt * s.cos().powi(3) * (vs * vs + lam0 / s.cos().powi(2) * v * v);
    }
    let (v0, vx0) = ser.eval(h);
    let g = crate::linalg::CVec::from_vec(vec![Complex64::new(v0[(0, 0)], 0.0), Complex64::new(vx0[(0, 0)], 0.0)]);
    // data (v, −∂_s v) with ∂_s = −∂_x; Lorentzian and Euclidean coincide on ΣΣ
    let lam = (g.adjoint() * &st.q_i * &st.pair.c_plus * &g)[(0, 0)].re;
    Ok(Some(EnergyOracle { lambda_plus: lam, two_q: 2.0 * w * q }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_zero_is_euclidean() {
        let st = SectorState::new(SectorLabel::scalar(2)).unwrap();
        let a = build_covariances(&st, Variant::Alpha(0.0));
        let e = build_covariances(&st, Variant::Euclidean);
        assert!(max_abs(&(&a.lambda_plus.matrix - &e.lambda_plus.matrix)) == 0.0);
    }

    #[test]
    fn vector1_block_is_negative() {
        let st = SectorState::new(SectorLabel::vector(1)).unwrap();
        let r = positivity_report(&st, SubspaceName::ETT4, Variant::Euclidean);
        assert!(r.negative(VERDICT_TOL, MARGIN));
        let m = positivity_report(&st, SubspaceName::ETT4, Variant::Modified);
        assert!(m.max_abs() == 0.0);
    }
}
