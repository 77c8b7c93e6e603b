//! Cauchy-surface operators as per-sector matrices.
//!
//! Data vectors are laid out as (f₀ half, f₁ half); inside each half the
//! slots are (ss, sΣ, ΣΣ) for rank 2, (s, Σ) for rank 1 and a single slot
//! for rank 0. Euclidean data are (u, −∂_s u) at s = 0, Lorentzian data
//! (u, i⁻¹∂_t u) at t = 0.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::linalg::{c, CMat, CVec, I};
use crate::rational::{q, qf, RatMatrix, Q};
use crate::sector_algebra::{basis, gram_matrix, op, Family, SectorLabel, SpatialOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theory {
    Gravity,
    Maxwell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotName {
    SS,
    SSigma,
    SigmaSigma,
    S,
    Sigma,
    Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    pub name: SlotName,
    /// Spatial tensor rank of the slot's sector basis.
    pub spatial_rank: u8,
    pub offset: usize,
    pub len: usize,
    /// Reflection parity of the component under s ↦ −s.
    pub kappa: i64,
    /// Number of Σ indices; the component scales like a^{m/2}.
    pub sigma_count: u8,
    /// Euclidean fiber factor of the component (2, 4, 1 for rank 2).
    pub fiber: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub sector: SectorLabel,
    pub rank: u8,
    pub slots: Vec<Slot>,
    pub n: usize,
}

impl Layout {
    pub fn new(sector: SectorLabel, rank: u8) -> Self {
        let spec: &[(SlotName, u8, i64, u8, i64)] = match rank {
            2 => &[(SlotName::SS, 0, 1, 0, 2), (SlotName::SSigma, 1, -1, 1, 4), (SlotName::SigmaSigma, 2, 1, 2, 1)],
            1 => &[(SlotName::S, 0, -1, 0, 1), (SlotName::Sigma, 1, 1, 1, 1)],
            0 => &[(SlotName::Scalar, 0, 1, 0, 1)],
            _ => panic!("rank must be 0, 1 or 2"),
        };
        let mut slots = Vec::new();
        let mut off = 0;
        for &(name, sr, kappa, sigma_count, fiber) in spec {
            let len = basis(sector, sr).len();
            slots.push(Slot { name, spatial_rank: sr, offset: off, len, kappa, sigma_count, fiber });
            off += len;
        }
        Self { sector, rank, slots, n: off }
    }

    pub fn slot(&self, name: SlotName) -> &Slot {
        self.slots.iter().find(|s| s.name == name).expect("slot in layout")
    }

    /// Data-space dimension (value ⊕ derivative).
    pub fn data_dim(&self) -> usize {
        2 * self.n
    }

    /// Per-coordinate reflection signs for one half.
    pub fn kappa_diag(&self) -> Vec<i64> {
        self.slots.iter().flat_map(|s| std::iter::repeat_n(s.kappa, s.len)).collect()
    }

    pub fn sigma_counts(&self) -> Vec<u8> {
        self.slots.iter().flat_map(|s| std::iter::repeat_n(s.sigma_count, s.len)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CauchyBlock {
    pub sector: SectorLabel,
    pub rank: u8,
    pub coords: CVec,
}

impl CauchyBlock {
    pub fn zeros(sector: SectorLabel, rank: u8) -> Self {
        let n = Layout::new(sector, rank).data_dim();
        Self { sector, rank, coords: DVector::zeros(n) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianBlockForm {
    pub sector: SectorLabel,
    pub rank: u8,
    pub matrix: CMat,
}

/// Assembles block matrices between two layouts, half by half and slot by slot.
pub(crate) struct Blocks<'a> {
    src: &'a Layout,
    dst: &'a Layout,
    pub m: RatMatrix,
}

impl<'a> Blocks<'a> {
    pub fn new(dst: &'a Layout, src: &'a Layout) -> Self {
        Self { src, dst, m: RatMatrix::zeros(dst.data_dim(), src.data_dim()) }
    }

    /// Adds `scale·block` from (src half, src slot) into (dst half, dst slot).
    pub fn add(&mut self, dh: usize, ds: SlotName, sh: usize, ss: SlotName, block: &RatMatrix, scale: Q) {
        let d = self.dst.slot(ds);
        let s = self.src.slot(ss);
        assert_eq!(block.shape(), (d.len, s.len), "block shape for {ds:?} <- {ss:?}");
        let r0 = dh * self.dst.n + d.offset;
        let c0 = sh * self.src.n + s.offset;
        for i in 0..d.len {
            for j in 0..s.len {
                let v = block.get(i, j) * &scale;
                self.m.add_at(r0 + i, c0 + j, &v);
            }
        }
    }
}

fn id(sector: SectorLabel, rank: u8) -> RatMatrix {
    op(SpatialOp::Id, sector, rank)
}

fn d(sector: SectorLabel, rank: u8) -> RatMatrix {
    op(SpatialOp::D, sector, rank)
}

fn delta(sector: SectorLabel, rank: u8) -> RatMatrix {
    op(SpatialOp::Delta, sector, rank)
}

fn trace_h(sector: SectorLabel) -> RatMatrix {
    op(SpatialOp::TraceH, sector, 2)
}

fn times_h(sector: SectorLabel) -> RatMatrix {
    op(SpatialOp::TimesH, sector, 0)
}

fn d1l(sector: SectorLabel) -> RatMatrix {
    op(SpatialOp::D1L, sector, 1)
}

fn d0l(sector: SectorLabel) -> RatMatrix {
    op(SpatialOp::D0L, sector, 0)
}

/// Euclidean fiber weight on one half: blockdiag(2G₀, 4G₁, G₂) for rank 2.
pub fn fiber_weight(sector: SectorLabel, rank: u8) -> RatMatrix {
    let lay = Layout::new(sector, rank);
    let blocks: Vec<RatMatrix> =
        lay.slots.iter().map(|s| gram_matrix(sector, s.spatial_rank).matrix.scale(&q(s.fiber))).collect();
    let refs: Vec<&RatMatrix> = blocks.iter().collect();
    RatMatrix::block_diag(&refs)
}

pub fn kappa(sector: SectorLabel, rank: u8) -> RatMatrix {
    let k: Vec<Q> = Layout::new(sector, rank).kappa_diag().into_iter().map(q).collect();
    RatMatrix::diag(&k)
}

/// Reflection on data: diag(κ, −κ).
pub fn reflection(sector: SectorLabel, rank: u8) -> RatMatrix {
    let k = kappa(sector, rank);
    RatMatrix::block_diag(&[&k, &(-&k)])
}

/// Wick phases on data, doubled: diag(F, F) with F₂ = (−1, i, 1), F₁ = (i, 1).
pub fn wick_map(sector: SectorLabel, rank: u8) -> (CMat, CMat) {
    let lay = Layout::new(sector, rank);
    let phase = |name: SlotName| match name {
        SlotName::SS => c(-1.0),
        SlotName::SSigma | SlotName::S => I,
        _ => c(1.0),
    };
    let half: Vec<Complex64> =
        lay.slots.iter().flat_map(|s| std::iter::repeat_n(phase(s.name), s.len)).collect();
    let full: Vec<Complex64> = half.iter().chain(half.iter()).copied().collect();
    let f = CMat::from_diagonal(&DVector::from_vec(full.clone()));
    let finv = CMat::from_diagonal(&DVector::from_vec(full.iter().map(|z| z.inv()).collect()));
    (f, finv)
}

/// K̃₂₁Σ: rank-1 data to rank-2 data.
pub fn euclidean_k21(sector: SectorLabel) -> RatMatrix {
    use SlotName::*;
    let src = Layout::new(sector, 1);
    let dst = Layout::new(sector, 2);
    let mut b = Blocks::new(&dst, &src);
    let half = qf(1, 2);
    let lam = q(sector.lambda0());
    // g₀
    b.add(0, SS, 1, S, &id(sector, 0), -half.clone());
    b.add(0, SS, 0, Sigma, &delta(sector, 1), half.clone());
    b.add(0, SSigma, 1, Sigma, &id(sector, 1), -half.clone());
    b.add(0, SSigma, 0, S, &d(sector, 0), half.clone());
    b.add(0, SigmaSigma, 0, Sigma, &d(sector, 1), q(1));
    b.add(0, SigmaSigma, 1, S, &times_h(sector), half.clone());
    b.add(0, SigmaSigma, 0, Sigma, &(&times_h(sector) * &delta(sector, 1)), half.clone());
    // g₁
    b.add(1, SS, 0, S, &d0l(sector), -half.clone());
    b.add(1, SS, 1, Sigma, &delta(sector, 1), half.clone());
    let d1m4 = &d1l(sector) - &id(sector, 1).scale(&q(4));
    b.add(1, SSigma, 0, Sigma, &d1m4, -half.clone());
    b.add(1, SSigma, 1, S, &d(sector, 0), half.clone());
    b.add(1, SigmaSigma, 1, Sigma, &d(sector, 1), q(1));
    b.add(1, SigmaSigma, 1, Sigma, &(&times_h(sector) * &delta(sector, 1)), half.clone());
    b.add(1, SigmaSigma, 0, S, &times_h(sector), half * (lam - q(4)));
    b.m
}

/// K̃₂₁Σ†: rank-2 data to rank-1 data.
pub fn euclidean_k21_dagger(sector: SectorLabel) -> RatMatrix {
    use SlotName::*;
    let src = Layout::new(sector, 2);
    let dst = Layout::new(sector, 1);
    let mut b = Blocks::new(&dst, &src);
    let lam = q(sector.lambda0());
    b.add(0, S, 1, SS, &id(sector, 0), q(2));
    b.add(0, S, 0, SSigma, &delta(sector, 1), q(2));
    b.add(0, Sigma, 1, SSigma, &id(sector, 1), q(2));
    b.add(0, Sigma, 0, SigmaSigma, &delta(sector, 2), q(1));
    b.add(1, S, 0, SS, &id(sector, 0), q(2) * (lam - q(3)));
    b.add(1, S, 1, SSigma, &delta(sector, 1), q(2));
    b.add(1, S, 0, SigmaSigma, &trace_h(sector), q(-1));
    let d1m4 = &d1l(sector) - &id(sector, 1).scale(&q(4));
    b.add(1, Sigma, 0, SSigma, &d1m4, q(2));
    b.add(1, Sigma, 1, SigmaSigma, &delta(sector, 2), q(1));
    b.m
}

/// K̃₂₀Σ: rank-0 data to rank-2 data, f ↦ (f₀, 0, f₀h; f₁, 0, f₁h).
pub fn euclidean_k20(sector: SectorLabel) -> RatMatrix {
    use SlotName::*;
    let src = Layout::new(sector, 0);
    let dst = Layout::new(sector, 2);
    let mut b = Blocks::new(&dst, &src);
    for h in 0..2 {
        b.add(h, SS, h, Scalar, &id(sector, 0), q(1));
        b.add(h, SigmaSigma, h, Scalar, &times_h(sector), q(1));
    }
    b.m
}

/// K̃₂₀Σ†: fᵢ = −2gᵢss − (h|gᵢΣΣ).
pub fn euclidean_k20_dagger(sector: SectorLabel) -> RatMatrix {
    use SlotName::*;
    let src = Layout::new(sector, 2);
    let dst = Layout::new(sector, 0);
    let mut b = Blocks::new(&dst, &src);
    for h in 0..2 {
        b.add(h, Scalar, h, SS, &id(sector, 0), q(-2));
        b.add(h, Scalar, h, SigmaSigma, &trace_h(sector), q(-1));
    }
    b.m
}

/// Mass shift of the scalar operator D̃₀ = D̃₀,L − shift.
pub fn scalar_shift(theory: Theory) -> i64 {
    match theory {
        Theory::Gravity => 6,
        Theory::Maxwell => 0,
    }
}

/// K̃₁₀Σ: rank-0 data to rank-1 data.
pub fn euclidean_k10(sector: SectorLabel, theory: Theory) -> RatMatrix {
    use SlotName::*;
    let src = Layout::new(sector, 0);
    let dst = Layout::new(sector, 1);
    let mut b = Blocks::new(&dst, &src);
    let m = q(sector.lambda0() - scalar_shift(theory));
    b.add(0, S, 1, Scalar, &id(sector, 0), q(-1));
    b.add(0, Sigma, 0, Scalar, &d(sector, 0), q(1));
    b.add(1, S, 0, Scalar, &id(sector, 0), -m);
    b.add(1, Sigma, 1, Scalar, &d(sector, 0), q(1));
    b.m
}

/// K̃₁₀Σ†: rank-1 data to rank-0 data.
pub fn euclidean_k10_dagger(sector: SectorLabel, theory: Theory) -> RatMatrix {
    use SlotName::*;
    let src = Layout::new(sector, 1);
    let dst = Layout::new(sector, 0);
    let mut b = Blocks::new(&dst, &src);
    let m = q(sector.lambda0() - scalar_shift(theory));
    b.add(0, Scalar, 1, S, &id(sector, 0), q(1));
    b.add(0, Scalar, 0, Sigma, &delta(sector, 1), q(1));
    b.add(1, Scalar, 0, S, &id(sector, 0), m);
    b.add(1, Scalar, 1, Sigma, &delta(sector, 1), q(1));
    b.m
}

/// S₀Σ = −(1/12) K̃₁₀Σ K̃₂₀Σ†, rank-2 data to rank-1 data.
pub fn s0_sigma(sector: SectorLabel) -> RatMatrix {
    (&euclidean_k10(sector, Theory::Gravity) * &euclidean_k20_dagger(sector)).scale(&qf(-1, 12))
}

/// 1 − K̃₂₁Σ S₀Σ on rank-2 data.
pub fn trace_fixing(sector: SectorLabel) -> RatMatrix {
    let n = Layout::new(sector, 2).data_dim();
    &RatMatrix::identity(n) - &(&euclidean_k21(sector) * &s0_sigma(sector))
}

#[derive(Debug, Clone)]
pub struct LorentzBlocks {
    pub k21: CMat,
    pub k21_dagger: CMat,
    pub k20: CMat,
    pub k20_dagger: CMat,
}

/// Lorentzian conjugate of a Euclidean block from rank `j` data to rank `i` data.
pub fn lorentzify_block(sector: SectorLabel, m: &RatMatrix, target_rank: u8, source_rank: u8) -> CMat {
    let (_, fi_inv) = wick_map(sector, target_rank);
    let (fj, _) = wick_map(sector, source_rank);
    fi_inv * m.to_complex() * fj
}

pub fn lorentz_k_blocks(sector: SectorLabel) -> LorentzBlocks {
    LorentzBlocks {
        k21: lorentzify_block(sector, &euclidean_k21(sector), 2, 1),
        k21_dagger: lorentzify_block(sector, &euclidean_k21_dagger(sector), 1, 2),
        k20: lorentzify_block(sector, &euclidean_k20(sector), 2, 0),
        k20_dagger: lorentzify_block(sector, &euclidean_k20_dagger(sector), 0, 2),
    }
}

pub fn lorentz_k10_blocks(sector: SectorLabel, theory: Theory) -> (CMat, CMat) {
    (
        lorentzify_block(sector, &euclidean_k10(sector, theory), 1, 0),
        lorentzify_block(sector, &euclidean_k10_dagger(sector, theory), 0, 1),
    )
}

/// Trace reversal on one half. Lorentzian: (½u_tt + ¼(h|u), u_tΣ, u − ¼(−2u_tt + (h|u))h);
/// Euclidean: (½u_ss − ¼(h|u), u_sΣ, u − ¼(2u_ss + (h|u))h).
fn trace_reversal_half(sector: SectorLabel, lorentzian: bool) -> RatMatrix {
    let lay = Layout::new(sector, 2);
    let (ss, sg, gg) = (lay.slot(SlotName::SS), lay.slot(SlotName::SSigma), lay.slot(SlotName::SigmaSigma));
    let mut m = RatMatrix::zeros(lay.n, lay.n);
    let sgn = if lorentzian { q(1) } else { q(-1) };
    let tr = trace_h(sector);
    let th = times_h(sector);
    m.set_block(ss.offset, ss.offset, &id(sector, 0).scale(&qf(1, 2)));
    m.set_block(ss.offset, gg.offset, &tr.scale(&(qf(1, 4) * &sgn)));
    m.set_block(sg.offset, sg.offset, &id(sector, 1));
    let hh = &th * &tr;
    let gg_block = &id(sector, 2) - &hh.scale(&qf(1, 4));
    m.set_block(gg.offset, gg.offset, &gg_block);
    // −¼(∓2u_ss)h
    m.set_block(gg.offset, ss.offset, &th.scale(&(qf(1, 2) * &sgn)));
    m
}

/// I_Σ = I ⊗ ℂ² on Lorentzian rank-2 data.
pub fn trace_reversal(sector: SectorLabel) -> RatMatrix {
    let h = trace_reversal_half(sector, true);
    RatMatrix::block_diag(&[&h, &h])
}

/// Ĩ_Σ on Euclidean rank-2 data.
pub fn euclidean_trace_reversal(sector: SectorLabel) -> RatMatrix {
    let h = trace_reversal_half(sector, false);
    RatMatrix::block_diag(&[&h, &h])
}

#[derive(Debug, Clone)]
pub struct ChargeForms {
    /// Lorentzian charge q_k = (0 Wκ; Wκ 0).
    pub q: RatMatrix,
    /// q₂ I_Σ (rank 2 only; equals q otherwise).
    pub q_i: RatMatrix,
    /// Euclidean q̃ = (0 W; W 0).
    pub q_tilde: RatMatrix,
    /// Euclidean σ̃ = (0 −W; W 0).
    pub sigma_tilde: RatMatrix,
    /// Lorentzian trace reversal on data (identity for ranks 0, 1).
    pub i_sigma: RatMatrix,
    /// Positive data norm diag(W, W), used for Gram-weighted compressions.
    pub norm: RatMatrix,
}

pub fn charge_forms(sector: SectorLabel, rank: u8) -> ChargeForms {
    let w = fiber_weight(sector, rank);
    let k = kappa(sector, rank);
    let wk = &w * &k;
    let n = w.nrows();
    let z = RatMatrix::zeros(n, n);
    let off = |a: &RatMatrix, b: &RatMatrix| RatMatrix::vstack(&[&RatMatrix::hstack(&[&z, a]), &RatMatrix::hstack(&[b, &z])]);
    let qm = off(&wk, &wk);
    let i_sigma = if rank == 2 { trace_reversal(sector) } else { RatMatrix::identity(2 * n) };
    ChargeForms {
        q_i: &qm * &i_sigma,
        q: qm,
        q_tilde: off(&w, &w),
        sigma_tilde: off(&-&w, &w),
        i_sigma,
        norm: RatMatrix::block_diag(&[&w, &w]),
    }
}

/// Killing data: φᵢ live in Scalar(1) with data (ψ, 0; 0, d⃗ψ), φⱼₖ in
/// Vector(1) with data (0, ψⱼₖ; 0, 0). Other sectors carry none.
pub fn killing_space(sector: SectorLabel) -> RatMatrix {
    match (sector.family, sector.k) {
        (Family::Scalar, 1) => RatMatrix::from_i64(&[&[1], &[0], &[0], &[1]]),
        (Family::Vector, 1) => RatMatrix::from_i64(&[&[1], &[0]]),
        _ => RatMatrix::zeros(Layout::new(sector, 1).data_dim(), 0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KillingIndex {
    /// φᵢ, i ∈ 1..=4.
    Conformal(u8),
    /// φⱼₖ, 1 ≤ j < k ≤ 4.
    Rotation(u8, u8),
}

/// Cauchy datum of a Killing form; the harmonic index only selects a copy
/// inside the degeneracy space, so the sector coordinates are shared.
pub fn killing_data(index: KillingIndex) -> Option<CauchyBlock> {
    let sector = match index {
        KillingIndex::Conformal(i) if (1..=4).contains(&i) => SectorLabel::scalar(1),
        KillingIndex::Rotation(j, k) if 1 <= j && j < k && k <= 4 => SectorLabel::vector(1),
        _ => return None,
    };
    let ks = killing_space(sector);
    Some(CauchyBlock { sector, rank: 1, coords: ks.column(0).to_complex().column(0).into_owned() })
}

pub fn all_killing_indices() -> Vec<KillingIndex> {
    let mut v: Vec<KillingIndex> = (1..=4).map(KillingIndex::Conformal).collect();
    for j in 1..=4 {
        for k in j + 1..=4 {
            v.push(KillingIndex::Rotation(j, k));
        }
    }
    v
}

/// f is q₁-orthogonal to all Killing data of its sector.
pub fn in_killing_q_orth(sector: SectorLabel, f: &CVec, tol: f64) -> bool {
    let ks = killing_space(sector).to_complex();
    if ks.ncols() == 0 {
        return true;
    }
    let qm = charge_forms(sector, 1).q.to_complex();
    let r = f.adjoint() * qm * ks;
    r.iter().all(|z| z.norm() <= tol * f.norm().max(1.0))
}

/// Basis of K_Σ^{q₁} in the sector (all of the data space when no Killing data).
pub fn killing_q_orth_basis(sector: SectorLabel) -> RatMatrix {
    let ks = killing_space(sector);
    let n = Layout::new(sector, 1).data_dim();
    if ks.ncols() == 0 {
        return RatMatrix::identity(n);
    }
    (&ks.transpose() * &charge_forms(sector, 1).q).nullspace()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_sizes() {
        assert_eq!(Layout::new(SectorLabel::scalar(0), 2).n, 2);
        assert_eq!(Layout::new(SectorLabel::scalar(1), 2).n, 3);
        assert_eq!(Layout::new(SectorLabel::scalar(3), 2).n, 4);
        assert_eq!(Layout::new(SectorLabel::vector(1), 2).n, 1);
        assert_eq!(Layout::new(SectorLabel::vector(2), 2).n, 2);
        assert_eq!(Layout::new(SectorLabel::tensor(2), 2).n, 1);
        assert_eq!(Layout::new(SectorLabel::scalar(0), 1).n, 1);
    }

    #[test]
    fn k21_dagger_examples() {
        let s0 = SectorLabel::scalar(0);
        let m = euclidean_k21_dagger(s0);
        // input g₁ss = 1: rank-2 S(0) data is (ss, ΣΣ | ss, ΣΣ)
        let mut g = RatMatrix::zeros(4, 1);
        g.set(2, 0, q(1));
        let f = &m * &g;
        assert_eq!(f, RatMatrix::from_i64(&[&[2], &[0]]));
        let v1 = SectorLabel::vector(1);
        let mut g = RatMatrix::zeros(2, 1);
        g.set(0, 0, q(1));
        assert!((&euclidean_k21_dagger(v1) * &g).is_zero());
    }

    #[test]
    fn k20_examples() {
        for k in 0..5 {
            let s = SectorLabel::scalar(k);
            let prod = &euclidean_k20_dagger(s) * &euclidean_k20(s);
            assert_eq!(prod, RatMatrix::identity(2).scale(&q(-8)));
        }
    }

    #[test]
    fn killing_count() {
        let n: usize = all_killing_indices().iter().filter(|i| killing_data(**i).is_some()).count();
        assert_eq!(n, 10);
        assert!(killing_data(KillingIndex::Rotation(2, 2)).is_none());
    }
}
