//! Tensor-harmonic sectors on S³ and the spatial operators restricted to them.
//!
//! Every quantity here is an exact rational. Individual harmonics are never
//! instantiated outside [`harmonic`]; a sector stands for its whole
//! degeneracy space and the multiplicity is carried as metadata.

pub mod harmonic;

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{q, RatMatrix, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Scalar,
    Vector,
    TensorTT,
}

impl Family {
    pub fn min_level(self) -> u32 {
        match self {
            Family::Scalar => 0,
            Family::Vector => 1,
            Family::TensorTT => 2,
        }
    }

    pub fn short(self) -> &'static str {
        match self {
            Family::Scalar => "S",
            Family::Vector => "V",
            Family::TensorTT => "T",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SectorLabel {
    pub family: Family,
    pub k: u32,
}

impl fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.family {
            Family::Scalar => "Scalar",
            Family::Vector => "Vector",
            Family::TensorTT => "TensorTT",
        };
        write!(f, "{name}({})", self.k)
    }
}

impl SectorLabel {
    pub fn new(family: Family, k: u32) -> Result<Self> {
        if k < family.min_level() {
            return Err(Error::InvalidSector(format!("{family:?} needs k >= {}", family.min_level())));
        }
        Ok(Self { family, k })
    }

    pub fn scalar(k: u32) -> Self {
        Self { family: Family::Scalar, k }
    }

    pub fn vector(k: u32) -> Self {
        assert!(k >= 1);
        Self { family: Family::Vector, k }
    }

    pub fn tensor(k: u32) -> Self {
        assert!(k >= 2);
        Self { family: Family::TensorTT, k }
    }

    /// k(k+2): the scalar Laplace eigenvalue at level k.
    pub fn lambda0(&self) -> i64 {
        let k = self.k as i64;
        k * (k + 2)
    }

    /// Eigenvalue of the Lichnerowicz Laplacian on the sector's generator.
    pub fn eigenvalue(&self) -> i64 {
        match self.family {
            Family::Scalar => self.lambda0(),
            Family::Vector => self.lambda0() + 1,
            Family::TensorTT => self.lambda0() + 4,
        }
    }

    /// Number of independent harmonics in the sector.
    pub fn multiplicity(&self) -> u64 {
        let k = self.k as u64;
        match self.family {
            Family::Scalar => (k + 1) * (k + 1),
            Family::Vector => 2 * k * (k + 2),
            Family::TensorTT => 2 * (k - 1) * (k + 3),
        }
    }

    /// Multiplicities are checked against the polynomial oracle up to this level.
    pub const MULTIPLICITY_VERIFIED_UP_TO: u32 = 3;
}

pub fn enumerate_sectors(k_max: u32) -> Vec<SectorLabel> {
    let mut out = Vec::new();
    for fam in [Family::Scalar, Family::Vector, Family::TensorTT] {
        for k in fam.min_level()..=k_max {
            out.push(SectorLabel { family: fam, k });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    Y,
    DY,
    DDY,
    YH,
    V,
    DV,
    T,
}

impl Symbol {
    pub fn name(self) -> &'static str {
        match self {
            Symbol::Y => "Y",
            Symbol::DY => "dY",
            Symbol::DDY => "ddY",
            Symbol::YH => "Y.h",
            Symbol::V => "V",
            Symbol::DV => "dV",
            Symbol::T => "T",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorBasis {
    pub sector: SectorLabel,
    pub rank: u8,
    pub elements: Vec<Symbol>,
}

impl SectorBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, s: Symbol) -> Option<usize> {
        self.elements.iter().position(|&e| e == s)
    }
}

pub fn basis(sector: SectorLabel, rank: u8) -> SectorBasis {
    let k = sector.k;
    let elements = match (sector.family, rank) {
        (Family::Scalar, 0) => vec![Symbol::Y],
        (Family::Scalar, 1) if k >= 1 => vec![Symbol::DY],
        (Family::Scalar, 2) if k >= 2 => vec![Symbol::DDY, Symbol::YH],
        (Family::Scalar, 2) => vec![Symbol::YH],
        (Family::Vector, 1) => vec![Symbol::V],
        (Family::Vector, 2) if k >= 2 => vec![Symbol::DV],
        (Family::TensorTT, 2) => vec![Symbol::T],
        _ => vec![],
    };
    SectorBasis { sector, rank, elements }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpatialOp {
    /// Symmetrized covariant derivative d⃗, raises rank by one.
    D,
    /// Divergence δ⃗ (adjoint of d⃗), lowers rank by one.
    Delta,
    /// Contraction (h|·) with the round metric, rank 2 → 0.
    TraceH,
    /// Multiplication |h)·, rank 0 → 2.
    TimesH,
    D0L,
    D1L,
    D2L,
    Id,
}

impl SpatialOp {
    pub fn target_rank(self, rank: u8) -> Option<u8> {
        match (self, rank) {
            (SpatialOp::D, 0 | 1) => Some(rank + 1),
            (SpatialOp::Delta, 1 | 2) => Some(rank - 1),
            (SpatialOp::TraceH, 2) => Some(0),
            (SpatialOp::TimesH, 0) => Some(2),
            (SpatialOp::D0L, 0) | (SpatialOp::D1L, 1) | (SpatialOp::D2L, 2) => Some(rank),
            (SpatialOp::Id, 0..=2) => Some(rank),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorOperator {
    pub sector: SectorLabel,
    pub source_rank: u8,
    pub target_rank: u8,
    pub matrix: RatMatrix,
}

impl SectorOperator {
    /// `self ∘ inner`.
    pub fn compose(&self, inner: &SectorOperator) -> Result<SectorOperator> {
        if self.sector != inner.sector || self.source_rank != inner.target_rank {
            return Err(Error::Shape(format!(
                "cannot compose rank {}→{} after {}→{}",
                self.source_rank, self.target_rank, inner.source_rank, inner.target_rank
            )));
        }
        Ok(SectorOperator {
            sector: self.sector,
            source_rank: inner.source_rank,
            target_rank: self.target_rank,
            matrix: &self.matrix * &inner.matrix,
        })
    }

    pub fn apply(&self, coords: &RatMatrix) -> RatMatrix {
        &self.matrix * coords
    }
}

fn entry(sector: SectorLabel, op: SpatialOp, from: Symbol) -> Vec<(Symbol, Q)> {
    let lam = q(sector.lambda0());
    let ev = q(sector.eigenvalue());
    match (op, from) {
        (SpatialOp::Id, s) => vec![(s, q(1))],
        (SpatialOp::D0L | SpatialOp::D1L | SpatialOp::D2L, s) => vec![(s, ev)],
        (SpatialOp::D, Symbol::Y) => vec![(Symbol::DY, q(1))],
        // d⃗d⃗ψ = −hψ at k = 1
        (SpatialOp::D, Symbol::DY) if sector.k == 1 => vec![(Symbol::YH, q(-1))],
        (SpatialOp::D, Symbol::DY) => vec![(Symbol::DDY, q(1))],
        (SpatialOp::D, Symbol::V) => vec![(Symbol::DV, q(1))],
        (SpatialOp::Delta, Symbol::DY) => vec![(Symbol::Y, lam)],
        (SpatialOp::Delta, Symbol::DDY) => vec![(Symbol::DY, q(2) * &lam - q(4))],
        (SpatialOp::Delta, Symbol::YH) => vec![(Symbol::DY, q(-2))],
        (SpatialOp::Delta, Symbol::DV) => vec![(Symbol::V, ev - q(4))],
        (SpatialOp::TraceH, Symbol::DDY) => vec![(Symbol::Y, q(-2) * lam)],
        (SpatialOp::TraceH, Symbol::YH) => vec![(Symbol::Y, q(6))],
        (SpatialOp::TimesH, Symbol::Y) => vec![(Symbol::YH, q(1))],
        _ => vec![],
    }
}

pub fn spatial_op(op: SpatialOp, sector: SectorLabel, rank: u8) -> Result<SectorOperator> {
    let target_rank = op
        .target_rank(rank)
        .ok_or_else(|| Error::Inapplicable { op: format!("{op:?}"), rank })?;
    let src = basis(sector, rank);
    let dst = basis(sector, target_rank);
    let mut m = RatMatrix::zeros(dst.len(), src.len());
    for (j, &s) in src.elements.iter().enumerate() {
        for (t, x) in entry(sector, op, s) {
            // images outside the truncated basis vanish by the degeneracy rules
            if let Some(i) = dst.index_of(t) {
                m.add_at(i, j, &x);
            }
        }
    }
    Ok(SectorOperator { sector, source_rank: rank, target_rank, matrix: m })
}

/// Shorthand for the matrix of `spatial_op`; panics on inapplicable pairs.
pub fn op(op_: SpatialOp, sector: SectorLabel, rank: u8) -> RatMatrix {
    spatial_op(op_, sector, rank).expect("applicable operator").matrix
}

/// δ⃗∘d⃗∘d⃗ on scalars, used to check d⃗d⃗d⃗-type reductions.
pub fn delta_d_d(sector: SectorLabel) -> SectorOperator {
    let d0 = spatial_op(SpatialOp::D, sector, 0).unwrap();
    let d1 = spatial_op(SpatialOp::D, sector, 1).unwrap();
    let dl = spatial_op(SpatialOp::Delta, sector, 2).unwrap();
    dl.compose(&d1).unwrap().compose(&d0).unwrap()
}

enum Origin {
    Generator,
    Raised { via: SpatialOp, src_rank: u8, src_index: usize },
}

fn origin(sector: SectorLabel, s: Symbol) -> Origin {
    let b0 = basis(sector, 0);
    let b1 = basis(sector, 1);
    match s {
        Symbol::Y | Symbol::V | Symbol::T => Origin::Generator,
        Symbol::DY => Origin::Raised { via: SpatialOp::D, src_rank: 0, src_index: b0.index_of(Symbol::Y).unwrap() },
        Symbol::DDY => Origin::Raised { via: SpatialOp::D, src_rank: 1, src_index: b1.index_of(Symbol::DY).unwrap() },
        Symbol::YH => Origin::Raised { via: SpatialOp::TimesH, src_rank: 0, src_index: b0.index_of(Symbol::Y).unwrap() },
        Symbol::DV => Origin::Raised { via: SpatialOp::D, src_rank: 1, src_index: b1.index_of(Symbol::V).unwrap() },
    }
}

/// Gram matrix of the sector basis under the integrated fiber form, built
/// only from adjunction: (Op x | z) = (x | Op* z) with d⃗* = δ⃗ and |h)* = (h|.
pub fn gram_matrix(sector: SectorLabel, rank: u8) -> SectorOperator {
    let b = basis(sector, rank);
    let n = b.len();
    let mut g = RatMatrix::zeros(n, n);
    for (i, &si) in b.elements.iter().enumerate() {
        match origin(sector, si) {
            Origin::Generator => {
                assert_eq!(n, 1, "generator shares its basis");
                g.set(i, i, q(1));
            }
            Origin::Raised { via, src_rank, src_index } => {
                let adj = match via {
                    SpatialOp::D => SpatialOp::Delta,
                    SpatialOp::TimesH => SpatialOp::TraceH,
                    _ => unreachable!(),
                };
                let lower = gram_matrix(sector, src_rank).matrix;
                let adj_m = op(adj, sector, rank);
                for j in 0..n {
                    let mut acc = Q::zero();
                    for l in 0..lower.ncols() {
                        acc += lower.get(src_index, l) * adj_m.get(l, j);
                    }
                    g.set(i, j, acc);
                }
            }
        }
    }
    SectorOperator { sector, source_rank: rank, target_rank: rank, matrix: g }
}

/// Leading principal minors all positive.
pub fn is_positive_definite(m: &RatMatrix) -> bool {
    let n = m.nrows();
    (1..=n).all(|k| {
        let sub = m.block(0, 0, k, k);
        det(&sub) > Q::zero()
    })
}

pub fn det(m: &RatMatrix) -> Q {
    let n = m.nrows();
    if n == 0 {
        return q(1);
    }
    let cp = m.char_poly();
    // det(x − A) at x = 0 is (−1)ⁿ det A
    if n % 2 == 0 { cp[0].clone() } else { -cp[0].clone() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerate_small() {
        assert_eq!(enumerate_sectors(0), vec![SectorLabel::scalar(0)]);
        assert_eq!(enumerate_sectors(1), vec![SectorLabel::scalar(0), SectorLabel::scalar(1), SectorLabel::vector(1)]);
        let s2 = enumerate_sectors(2);
        assert_eq!(s2.len(), 6);
        assert!(s2.contains(&SectorLabel::tensor(2)));
    }

    #[test]
    fn invalid_labels() {
        assert!(SectorLabel::new(Family::Vector, 0).is_err());
        assert!(SectorLabel::new(Family::TensorTT, 1).is_err());
    }

    #[test]
    fn spec_examples() {
        let s2 = SectorLabel::scalar(2);
        let dd = spatial_op(SpatialOp::Delta, s2, 1).unwrap().compose(&spatial_op(SpatialOp::D, s2, 0).unwrap()).unwrap();
        assert_eq!(dd.matrix, RatMatrix::scalar(q(8)));
        let tr = op(SpatialOp::TraceH, s2, 2);
        assert_eq!(tr.get(0, 1), &q(6));
        assert_eq!(op(SpatialOp::Delta, SectorLabel::vector(1), 1).shape(), (0, 1));
        let s3 = SectorLabel::scalar(3);
        assert_eq!(delta_d_d(s3).matrix, RatMatrix::scalar(q(26)));
    }

    #[test]
    fn gram_examples() {
        for k in 0..6 {
            let s = SectorLabel::scalar(k);
            assert_eq!(gram_matrix(s, 0).matrix, RatMatrix::scalar(q(1)));
            if k >= 1 {
                assert_eq!(gram_matrix(s, 1).matrix, RatMatrix::scalar(q(s.lambda0())));
            }
            let g2 = gram_matrix(s, 2).matrix;
            if k >= 2 {
                let l = s.lambda0();
                assert_eq!(g2, RatMatrix::from_i64(&[&[(2 * l - 4) * l, -2 * l], &[-2 * l, 6]]));
            } else {
                assert_eq!(g2, RatMatrix::scalar(q(6)));
            }
        }
    }
}
