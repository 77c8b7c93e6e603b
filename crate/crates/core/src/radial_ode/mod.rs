//! Radial reduction of D̃₀, D̃₁, D̃₂ on S⁴ = ds² + cos²s h and their
//! Lorentzian continuations on dS₄ = −dt² + cosh²t h.
//!
//! Systems are stored in the rescaled frame v = cos^{−m}u, where m counts
//! the Σ indices of a component. In that frame every row reads
//! −v″ + 3 tan s·v′ + M₀(s)v = 0 with M₀ = Σ_b C_b f_b(s) and
//! f_b ∈ {1, tan², sec², tan·sec}. At s = 0 the two frames coincide, so
//! Cauchy data need no conversion.

pub mod bulk;
pub mod collocation;
pub mod dopri;
pub mod dynamics;
pub mod frobenius;
pub mod lorentzian;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;

use crate::cauchy_ops::{fiber_weight, scalar_shift, wick_map, Layout, SlotName, Theory};
use crate::error::{Error, Result};
use crate::jet::TrigJets;
use crate::linalg::CMat;
use crate::rational::{q, RatMatrix, Q};
use crate::sector_algebra::{op, Family, SectorLabel, SpatialOp};

pub use frobenius::{data_norm_factor, regular_basis, Hemisphere, RegularParams, SolutionBasisAtEquator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorId {
    D0,
    D1,
    D2,
}

impl OperatorId {
    pub fn rank(self) -> u8 {
        match self {
            OperatorId::D0 => 0,
            OperatorId::D1 => 1,
            OperatorId::D2 => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Signature {
    Euclidean,
    Lorentzian,
}

/// Basis functions of the zeroth-order coefficient.
pub const COEF_NAMES: [&str; 4] = ["1", "tan^2", "sec^2", "tan*sec"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pole {
    /// s = +π/2
    North,
    /// s = −π/2
    South,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialSystem {
    pub sector: SectorLabel,
    pub op: OperatorId,
    pub theory: Theory,
    pub signature: Signature,
    pub layout: Layout,
    /// C_b for b = 1, tan², sec², tan·sec (rescaled frame, one half).
    pub coeffs: [RatMatrix; 4],
}

struct Assembler<'a> {
    lay: &'a Layout,
    c: [RatMatrix; 4],
}

impl<'a> Assembler<'a> {
    fn new(lay: &'a Layout) -> Self {
        let z = RatMatrix::zeros(lay.n, lay.n);
        Self { lay, c: [z.clone(), z.clone(), z.clone(), z] }
    }

    fn put(&mut self, dst: SlotName, src: SlotName, b: usize, block: &RatMatrix, scale: i64) {
        let d = self.lay.slot(dst);
        let s = self.lay.slot(src);
        assert_eq!(block.shape(), (d.len, s.len));
        let sc = q(scale);
        for i in 0..d.len {
            for j in 0..s.len {
                let v = block.get(i, j) * &sc;
                self.c[b].add_at(d.offset + i, s.offset + j, &v);
            }
        }
    }
}

const ONE: usize = 0;
const TAN2: usize = 1;
const SEC2: usize = 2;
const TSEC: usize = 3;

pub fn reduce(op_id: OperatorId, sector: SectorLabel, signature: Signature) -> Result<RadialSystem> {
    reduce_theory(op_id, sector, signature, Theory::Gravity)
}

pub fn reduce_theory(op_id: OperatorId, sector: SectorLabel, signature: Signature, theory: Theory) -> Result<RadialSystem> {
    let lay = Layout::new(sector, op_id.rank());
    if lay.n == 0 {
        return Err(Error::InvalidSector(format!("{sector} carries no {op_id:?} components")));
    }
    if theory == Theory::Maxwell && op_id == OperatorId::D2 {
        return Err(Error::InvalidSector("Maxwell has no rank-2 operator".into()));
    }
    let mut a = Assembler::new(&lay);
    let id = |r: u8| op(SpatialOp::Id, sector, r);
    match op_id {
        OperatorId::D0 => {
            use SlotName::Scalar as X;
            a.put(X, X, SEC2, &op(SpatialOp::D0L, sector, 0), 1);
            a.put(X, X, ONE, &id(0), -scalar_shift(theory));
        }
        OperatorId::D1 => {
            use SlotName::{Sigma, S};
            let extra = if theory == Theory::Maxwell { 6 } else { 0 };
            a.put(S, S, SEC2, &op(SpatialOp::D0L, sector, 0), 1);
            a.put(S, S, TAN2, &id(0), 3);
            a.put(S, S, ONE, &id(0), extra - 3);
            a.put(S, Sigma, TSEC, &op(SpatialOp::Delta, sector, 1), 2);
            a.put(Sigma, Sigma, SEC2, &op(SpatialOp::D1L, sector, 1), 1);
            a.put(Sigma, Sigma, TAN2, &id(1), -1);
            a.put(Sigma, Sigma, ONE, &id(1), extra - 5);
            a.put(Sigma, S, TSEC, &op(SpatialOp::D, sector, 0), 2);
        }
        OperatorId::D2 => {
            use SlotName::{SSigma as SG, SigmaSigma as GG, SS};
            let tr = op(SpatialOp::TraceH, sector, 2);
            let th = op(SpatialOp::TimesH, sector, 0);
            a.put(SS, SS, SEC2, &op(SpatialOp::D0L, sector, 0), 1);
            a.put(SS, SS, TAN2, &id(0), 6);
            a.put(SS, SG, TSEC, &op(SpatialOp::Delta, sector, 1), 4);
            a.put(SS, GG, SEC2, &tr, -1);
            a.put(SG, SG, SEC2, &op(SpatialOp::D1L, sector, 1), 1);
            a.put(SG, SG, TAN2, &id(1), 4);
            a.put(SG, SS, TSEC, &op(SpatialOp::D, sector, 0), 2);
            a.put(SG, GG, TSEC, &op(SpatialOp::Delta, sector, 2), 1);
            a.put(GG, GG, SEC2, &op(SpatialOp::D2L, sector, 2), 1);
            a.put(GG, GG, ONE, &id(2), -4);
            a.put(GG, GG, TAN2, &id(2), -4);
            a.put(GG, GG, TAN2, &(&th * &tr), 1);
            a.put(GG, SG, TSEC, &op(SpatialOp::D, sector, 1), 4);
            a.put(GG, SS, SEC2, &th, -2);
        }
    }
    let sys = RadialSystem { sector, op: op_id, theory, signature, layout: lay.clone(), coeffs: a.c };
    if !sys.reflection_consistent() {
        return Err(Error::Other(format!("reflection parity violated in {sector} {op_id:?}")));
    }
    Ok(sys)
}

impl RadialSystem {
    pub fn n(&self) -> usize {
        self.layout.n
    }

    fn basis_values(s: f64) -> [f64; 4] {
        let (t, c) = (s.tan(), s.cos());
        [1.0, t * t, 1.0 / (c * c), t / c]
    }

    /// M₀(s) for real Euclidean s.
    pub fn m0(&self, s: f64) -> DMatrix<f64> {
        let f = Self::basis_values(s);
        let mut m = DMatrix::zeros(self.n(), self.n());
        for (b, cb) in self.coeffs.iter().enumerate() {
            m += cb.to_f64() * f[b];
        }
        m
    }

    /// M₀ at a complex point, using the analytic continuation of the f_b.
    pub fn m0_complex(&self, s: Complex64) -> CMat {
        let t = TrigJets::at(s, 0);
        let f = [t.one.value(), t.tan2.value(), t.sec2.value(), t.tan_sec.value()];
        let mut m = CMat::zeros(self.n(), self.n());
        for (b, cb) in self.coeffs.iter().enumerate() {
            m += cb.to_complex() * f[b];
        }
        m
    }

    /// Lorentzian zeroth-order matrix F⁻¹M₀(−it)F in Lorentzian components, with
    /// the largest imaginary part encountered (zero up to rounding).
    pub fn lorentz_m0(&self, t: f64) -> (DMatrix<f64>, f64) {
        let (f, finv) = wick_map(self.sector, self.op.rank());
        let n = self.n();
        let fh = f.view((0, 0), (n, n)).into_owned();
        let fih = finv.view((0, 0), (n, n)).into_owned();
        let m = fih * self.m0_complex(Complex64::new(0.0, -t)) * fh;
        let im = m.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        (m.map(|z| z.re), im)
    }

    /// Formal self-adjointness: with the constant fiber weight W of the
    /// rescaled frame, W·C_b must be symmetric for every basis function.
    pub fn self_adjoint_exact(&self) -> bool {
        let w = fiber_weight(self.sector, self.op.rank());
        self.coeffs.iter().all(|cb| (&w * cb).is_symmetric())
    }

    /// Even basis functions couple components of equal reflection parity and
    /// tan·sec couples opposite parities.
    pub fn reflection_consistent(&self) -> bool {
        let kap = self.layout.kappa_diag();
        let n = self.n();
        self.coeffs.iter().enumerate().all(|(b, cb)| {
            (0..n).all(|i| {
                (0..n).all(|j| {
                    let same = kap[i] == kap[j];
                    cb.get(i, j).is_zero() || (same == (b != TSEC))
                })
            })
        })
    }

    /// Leading coefficient A of x²M₀ at the pole, x = distance to the pole.
    pub fn indicial_matrix(&self, pole: Pole) -> RatMatrix {
        let sign = match pole {
            Pole::North => q(1),
            Pole::South => q(-1),
        };
        &(&self.coeffs[TAN2] + &self.coeffs[SEC2]) + &self.coeffs[TSEC].scale(&sign)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Indicial {
    pub a: RatMatrix,
    /// Eigenvalues of A with multiplicity, ascending; each is m(m+2).
    pub eigenvalues: Vec<i64>,
    /// Regular exponents m ≥ 0 (ascending, with multiplicity).
    pub regular: Vec<i64>,
    /// Singular partners −m − 2.
    pub singular: Vec<i64>,
}

fn eval_poly(p: &[Q], x: &Q) -> Q {
    p.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
}

fn deflate(p: &[Q], root: &Q) -> Vec<Q> {
    // synthetic division by (x − root)
    let n = p.len() - 1;
    let mut out = vec![Q::zero(); n];
    let mut carry = Q::zero();
    for i in (0..n).rev() {
        carry = &p[i + 1] + &carry * root;
        out[i] = carry.clone();
    }
    out
}

/// Frobenius exponents at a pole: x^r with r(r+2) an eigenvalue of A.
pub fn indicial_exponents(sys: &RadialSystem, pole: Pole) -> Result<Indicial> {
    if sys.signature != Signature::Euclidean {
        return Err(Error::Other("indicial analysis needs the Euclidean system".into()));
    }
    let a = sys.indicial_matrix(pole);
    let degenerate = |detail: String| Error::DegenerateIndicial { sector: sys.sector, detail };
    let num = nalgebra::Schur::new(a.to_f64()).complex_eigenvalues();
    let mut poly = a.char_poly();
    let mut eigs = Vec::new();
    for z in num.iter() {
        if z.im.abs() > 1e-6 {
            return Err(degenerate(format!("complex eigenvalue {z}")));
        }
        let e = z.re.round() as i64;
        let eq = q(e);
        if poly.len() > 1 && eval_poly(&poly, &eq).is_zero() {
            poly = deflate(&poly, &eq);
            eigs.push(e);
        } else {
            return Err(degenerate(format!("eigenvalue {} not integral", z.re)));
        }
    }
    eigs.sort();
    let mut regular = Vec::new();
    for &e in &eigs {
        let r = ((1 + e) as f64).sqrt().round() as i64;
        if e < 0 || r * r != 1 + e {
            return Err(degenerate(format!("eigenvalue {e} is not of the form m(m+2)")));
        }
        regular.push(r - 1);
    }
    let singular = regular.iter().map(|m| -m - 2).collect();
    Ok(Indicial { a, eigenvalues: eigs, regular, singular })
}

/// Exponent of the regular solution family expected from the sector labels.
pub fn expected_regular_exponents(sector: SectorLabel, op_id: OperatorId) -> Vec<i64> {
    let k = sector.k as i64;
    let mut v = match (op_id, sector.family) {
        (OperatorId::D0, _) => vec![k],
        (OperatorId::D1, Family::Scalar) if k == 0 => vec![1],
        (OperatorId::D1, Family::Scalar) => vec![k - 1, k + 1],
        (OperatorId::D1, _) => vec![k],
        (OperatorId::D2, Family::Scalar) => match k {
            0 => vec![0, 2],
            1 => vec![1, 1, 3],
            _ => vec![k - 2, k, k, k + 2],
        },
        (OperatorId::D2, Family::Vector) if k == 1 => vec![2],
        (OperatorId::D2, Family::Vector) => vec![k - 1, k + 1],
        (OperatorId::D2, Family::TensorTT) => vec![k],
    };
    v.sort();
    v
}
