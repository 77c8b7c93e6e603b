//! Calderón projectors per sector, built from the equator data of solutions
//! regular in each hemisphere.

use crate::cauchy_ops::{charge_forms, killing_space, wick_map, Theory};
use crate::error::{Error, Result};
use crate::linalg::{hstack, max_abs, min_angle, orth, principal_angles, singular_values, to_complex, CMat};
use crate::radial_ode::collocation::collocation_basis;
use crate::radial_ode::{data_norm_factor, reduce_theory, regular_basis, Hemisphere, OperatorId, Pole, RadialSystem, RegularParams, Signature};
use crate::sector_algebra::{Family, SectorLabel};

/// Below this weighted angle the two regular subspaces are treated as meeting.
pub const TRANSVERSALITY_MIN: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Euclidean,
    Lorentzian,
}

/// How the regular subspaces are produced.
#[derive(Debug, Clone, Copy)]
pub enum Source {
    /// Frobenius seed at the pole plus adaptive integration; Ω⁻ by reflection.
    Frobenius(RegularParams),
    /// Chebyshev collocation from each pole separately.
    Collocation { nodes: usize },
}

impl Default for Source {
    fn default() -> Self {
        Source::Frobenius(RegularParams::default())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuotientDims {
    pub data: usize,
    pub kernel: usize,
    pub q_orth: usize,
    pub quotient: usize,
}

#[derive(Debug, Clone)]
pub struct QuotientInfo {
    /// Data of two-sided regular solutions.
    pub kernel: CMat,
    /// Basis of the q-orthogonal of `kernel`.
    pub q_orth: CMat,
    /// Columns representing (kernel)^q / kernel; coordinates of f are `coords * f`.
    pub complement: CMat,
    pub coords: CMat,
    pub dims: QuotientDims,
    /// Smallest singular value of the charge compressed to the quotient.
    pub charge_sigma_min: f64,
    /// max |k* q f| over kernel k and regular data f, relative.
    pub isotropy_residual: f64,
}

impl QuotientInfo {
    /// Lift a quotient-level matrix to the data space; exact on `q_orth`.
    pub fn lift(&self, m: &CMat) -> CMat {
        &self.complement * m * &self.coords
    }
}

#[derive(Debug, Clone)]
pub struct ProjectorPair {
    pub sector: SectorLabel,
    pub op: OperatorId,
    pub theory: Theory,
    pub flavor: Flavor,
    pub c_plus: CMat,
    pub c_minus: CMat,
    /// Orthonormal data of regular solutions in Ω⁺ and Ω⁻.
    pub plus: CMat,
    pub minus: CMat,
    /// Smallest norm-weighted angle between the two regular subspaces.
    pub conditioning: f64,
    pub quotient: Option<QuotientInfo>,
}

impl ProjectorPair {
    pub fn dim(&self) -> usize {
        self.c_plus.nrows()
    }

    /// max(‖c⁺+c⁻−1‖, ‖c±²−c±‖).
    pub fn projector_residuals(&self) -> (f64, f64) {
        let n = self.dim();
        let sum = max_abs(&(&self.c_plus + &self.c_minus - CMat::identity(n, n)));
        let idem = [&self.c_plus, &self.c_minus]
            .iter()
            .map(|c| max_abs(&(*c * *c - *c)) / max_abs(*c).max(1.0))
            .fold(0.0, f64::max);
        (sum, idem)
    }

    /// Full-space projectors; on the quotient path they are lifted and only
    /// meaningful on the q-orthogonal of the kernel.
    pub fn full(&self) -> (CMat, CMat) {
        match &self.quotient {
            Some(qi) => (qi.lift(&self.c_plus), qi.lift(&self.c_minus)),
            None => (self.c_plus.clone(), self.c_minus.clone()),
        }
    }
}

fn system(sector: SectorLabel, op: OperatorId, theory: Theory) -> Result<RadialSystem> {
    reduce_theory(op, sector, Signature::Euclidean, theory)
}

fn regular_pair(sys: &RadialSystem, source: &Source) -> Result<(CMat, CMat)> {
    match source {
        Source::Frobenius(p) => {
            let plus = regular_basis(sys, Hemisphere::Plus, p)?;
            let minus = regular_basis(sys, Hemisphere::Minus, p)?;
            Ok((to_complex(&plus.data), to_complex(&minus.data)))
        }
        Source::Collocation { nodes } => {
            let plus = collocation_basis(sys, Pole::North, *nodes)?;
            let minus = collocation_basis(sys, Pole::South, *nodes)?;
            Ok((to_complex(&plus), to_complex(&minus)))
        }
    }
}

/// Projector onto span(a) along span(b); [a b] must be square and invertible.
fn oblique(a: &CMat, b: &CMat) -> Result<(CMat, CMat)> {
    let basis = hstack(&[a, b]);
    let n = basis.nrows();
    let inv = basis.clone().try_inverse().ok_or_else(|| Error::Other("regular subspaces not complementary".into()))?;
    let mut sel = CMat::zeros(n, n);
    for i in 0..a.ncols() {
        sel[(i, i)] = 1.0.into();
    }
    let cp = &basis * sel * &inv;
    let cm = CMat::identity(n, n) - &cp;
    Ok((cp, cm))
}

pub fn calderon_invertible(sector: SectorLabel, op: OperatorId) -> Result<ProjectorPair> {
    calderon_invertible_with(sector, op, Theory::Gravity, &Source::default())
}

pub fn calderon_invertible_with(sector: SectorLabel, op: OperatorId, theory: Theory, source: &Source) -> Result<ProjectorPair> {
    let sys = system(sector, op, theory)?;
    let (plus, minus) = regular_pair(&sys, source)?;
    let w = data_norm_factor(sector, op.rank());
    let conditioning = min_angle(&plus, &minus, Some(&w));
    if conditioning < TRANSVERSALITY_MIN {
        return Err(Error::Transversality { sector, angle: conditioning });
    }
    let (c_plus, c_minus) = oblique(&plus, &minus)?;
    Ok(ProjectorPair { sector, op, theory, flavor: Flavor::Euclidean, c_plus, c_minus, plus, minus, conditioning, quotient: None })
}

/// Euclidean data of the two-sided regular solutions, if the operator has any
/// in this sector: Killing forms for gravity D̃₁, constants for Maxwell D̃₀.
pub fn kernel_data(sector: SectorLabel, op: OperatorId, theory: Theory) -> Option<CMat> {
    match (op, theory) {
        (OperatorId::D1, Theory::Gravity) => {
            let k = killing_space(sector);
            (k.ncols() > 0).then(|| k.to_complex())
        }
        (OperatorId::D0, Theory::Maxwell) if sector.family == Family::Scalar && sector.k == 0 => {
            Some(CMat::from_column_slice(2, 1, &[1.0.into(), 0.0.into()]))
        }
        _ => None,
    }
}

pub fn calderon_quotient(sector: SectorLabel, op: OperatorId) -> Result<ProjectorPair> {
    calderon_quotient_with(sector, op, Theory::Gravity, &Source::default())
}

pub fn calderon_quotient_with(sector: SectorLabel, op: OperatorId, theory: Theory, source: &Source) -> Result<ProjectorPair> {
    let kernel = kernel_data(sector, op, theory).ok_or(Error::NoKernel(sector))?;
    let sys = system(sector, op, theory)?;
    let (plus, minus) = regular_pair(&sys, source)?;
    let rank = op.rank();
    let qm = charge_forms(sector, rank).q.to_complex();
    let dim = plus.nrows();
    let w = data_norm_factor(sector, rank);

    // the kernel must sit in both regular subspaces
    let kd = kernel.ncols();
    let angles_p = principal_angles(&kernel, &plus, Some(&w));
    let angles_m = principal_angles(&kernel, &minus, Some(&w));
    let worst = angles_p.iter().chain(angles_m.iter()).copied().fold(0.0, f64::max);
    if worst > 1e-8 {
        return Err(Error::Other(format!("kernel data not regular on both sides in {sector} (angle {worst:e})")));
    }

    let kq = crate::linalg::null_space(&(kernel.adjoint() * &qm), 1e-12);
    let kn = orth(&kernel, 1e-12);
    let proj_k = &kn * kn.adjoint();
    let complement = orth(&((CMat::identity(dim, dim) - proj_k) * &kq), 1e-10);
    let coords = complement.adjoint();
    let nq = complement.ncols();

    let isotropy_residual = {
        let r = kernel.adjoint() * &qm * hstack(&[&plus, &minus]);
        max_abs(&r) / max_abs(&qm).max(1.0)
    };
    let charge_sigma_min = if nq == 0 {
        f64::INFINITY
    } else {
        singular_values(&(&coords * &qm * &complement)).into_iter().fold(f64::INFINITY, f64::min)
    };

    let pz = orth(&(&coords * &plus), 1e-9);
    let mz = orth(&(&coords * &minus), 1e-9);
    if pz.ncols() + mz.ncols() != nq {
        return Err(Error::Other(format!(
            "quotient images have dims {} + {} in a {nq}-dim quotient ({sector})",
            pz.ncols(),
            mz.ncols()
        )));
    }
    let conditioning = if nq == 0 { std::f64::consts::FRAC_PI_2 } else { min_angle(&pz, &mz, None) };
    if nq > 0 && conditioning < TRANSVERSALITY_MIN {
        return Err(Error::Transversality { sector, angle: conditioning });
    }
    let (c_plus, c_minus) = if nq == 0 { (CMat::zeros(0, 0), CMat::zeros(0, 0)) } else { oblique(&pz, &mz)? };
    let dims = QuotientDims { data: dim, kernel: kd, q_orth: kq.ncols(), quotient: nq };
    let quotient = QuotientInfo { kernel, q_orth: kq, complement, coords, dims, charge_sigma_min, isotropy_residual };
    Ok(ProjectorPair {
        sector,
        op,
        theory,
        flavor: Flavor::Euclidean,
        c_plus,
        c_minus,
        plus,
        minus,
        conditioning,
        quotient: Some(quotient),
    })
}

/// Invertible path where possible, quotient path where the operator has
/// two-sided regular solutions.
pub fn calderon(sector: SectorLabel, op: OperatorId, theory: Theory, source: &Source) -> Result<ProjectorPair> {
    if kernel_data(sector, op, theory).is_some() {
        calderon_quotient_with(sector, op, theory, source)
    } else {
        calderon_invertible_with(sector, op, theory, source)
    }
}

/// Conjugation by the Wick phases: c = F⁻¹ c̃ F. Quotient bases are carried
/// along, so the quotient-level matrices are unchanged.
pub fn lorentzify(pair: &ProjectorPair) -> ProjectorPair {
    if pair.flavor == Flavor::Lorentzian {
        return pair.clone();
    }
    let (f, finv) = wick_map(pair.sector, pair.op.rank());
    let mut out = pair.clone();
    out.flavor = Flavor::Lorentzian;
    out.plus = &finv * &pair.plus;
    out.minus = &finv * &pair.minus;
    match &pair.quotient {
        None => {
            out.c_plus = &finv * &pair.c_plus * &f;
            out.c_minus = &finv * &pair.c_minus * &f;
        }
        Some(qi) => {
            let mut q = qi.clone();
            q.kernel = &finv * &qi.kernel;
            q.q_orth = &finv * &qi.q_orth;
            q.complement = &finv * &qi.complement;
            q.coords = &qi.coords * &f;
            out.quotient = Some(q);
        }
    }
    out
}

/// max ‖c±* q − q c±‖ relative to ‖q‖, on the full space or the quotient.
pub fn q_adjoint_residual(pair: &ProjectorPair, q: &CMat) -> f64 {
    let (qq, cs) = match &pair.quotient {
        Some(qi) => (qi.complement.adjoint() * q * &qi.complement, [pair.c_plus.clone(), pair.c_minus.clone()]),
        None => (q.clone(), [pair.c_plus.clone(), pair.c_minus.clone()]),
    };
    if qq.nrows() == 0 {
        return 0.0;
    }
    let scale = max_abs(&qq).max(1e-300);
    cs.iter().map(|c| max_abs(&(c.adjoint() * &qq - &qq * c)) / scale).fold(0.0, f64::max)
}

/// Largest principal angle between the Ω± subspaces of two pairs.
pub fn pair_distance(a: &ProjectorPair, b: &ProjectorPair) -> f64 {
    let w = data_norm_factor(a.sector, a.op.rank());
    let dp = crate::linalg::subspace_distance(&a.plus, &b.plus, Some(&w));
    let dm = crate::linalg::subspace_distance(&a.minus, &b.minus, Some(&w));
    dp.max(dm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rel_diff;

    #[test]
    fn invertible_identities_low_k() {
        for s in [SectorLabel::scalar(0), SectorLabel::scalar(2), SectorLabel::vector(1), SectorLabel::tensor(2)] {
            let p = calderon_invertible(s, OperatorId::D2).unwrap();
            let (sum, idem) = p.projector_residuals();
            assert!(sum < 1e-10 && idem < 1e-9, "{s}: {sum:e} {idem:e}");
            let q = charge_forms(s, 2).q.to_complex();
            assert!(q_adjoint_residual(&p, &q) < 1e-9);
        }
    }

    #[test]
    fn quotient_dimensions() {
        let p = calderon_quotient(SectorLabel::vector(1), OperatorId::D1).unwrap();
        let d = p.quotient.as_ref().unwrap().dims;
        assert_eq!((d.data, d.kernel, d.q_orth, d.quotient), (2, 1, 1, 0));
        let p = calderon_quotient(SectorLabel::scalar(1), OperatorId::D1).unwrap();
        let d = p.quotient.as_ref().unwrap().dims;
        assert_eq!((d.data, d.kernel, d.q_orth, d.quotient), (4, 1, 3, 2));
        assert!(calderon_quotient(SectorLabel::scalar(2), OperatorId::D1).is_err());
    }

    #[test]
    fn lorentzify_keeps_sum() {
        let p = lorentzify(&calderon_invertible(SectorLabel::scalar(3), OperatorId::D2).unwrap());
        let n = p.dim();
        assert!(rel_diff(&(&p.c_plus + &p.c_minus), &CMat::identity(n, n)) < 1e-10);
    }
}
