//! Checks on Lorentzian evolution: conservation of the charges, intertwining
//! of the Cauchy-surface K blocks with the bulk operators, and the
//! trace-fixing identity along solutions.

use num_complex::Complex64;

use super::bulk::{self, to_coordinate, to_rescaled, Field};
use super::lorentzian::{data_propagator, evolve_lorentzian, jet_from_lorentz, lorentz_data_of};
use super::{reduce_theory, OperatorId, Signature};
use crate::cauchy_ops::{
    charge_forms, euclidean_k10, euclidean_k10_dagger, euclidean_k20, euclidean_k20_dagger, euclidean_k21, euclidean_k21_dagger,
    lorentzify_block, s0_sigma, Layout, Theory,
};
use crate::error::Result;
use crate::jet::TrigJets;
use crate::linalg::{max_abs, CVec};
use crate::rational::RatMatrix;
use crate::sector_algebra::SectorLabel;

pub const EVOLUTION_TOL: f64 = 1e-12;
/// Jet order used for bulk operators; residuals are read off below it.
const JET_ORDER: usize = 10;
const READ_ORDER: usize = 6;

/// Largest relative deviation of cosh³t·U(t)*qU(t) from q over the times.
pub fn charge_drift(sector: SectorLabel, op: OperatorId, theory: Theory, times: &[f64]) -> Result<f64> {
    let sys = reduce_theory(op, sector, Signature::Lorentzian, theory)?;
    let q = charge_forms(sector, op.rank()).q.to_complex();
    let scale = max_abs(&q).max(1e-300);
    let mut worst: f64 = 0.0;
    for &t in times {
        let u = data_propagator(&sys, t, EVOLUTION_TOL)?;
        let moved = (u.adjoint() * &q * &u).scale(t.cosh().powi(3));
        worst = worst.max(max_abs(&(moved - &q)) / scale);
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Intertwiner {
    K21,
    K21Dagger,
    K20,
    K20Dagger,
    K10,
    K10Dagger,
}

impl Intertwiner {
    pub const ALL: [Intertwiner; 6] =
        [Intertwiner::K21, Intertwiner::K21Dagger, Intertwiner::K20, Intertwiner::K20Dagger, Intertwiner::K10, Intertwiner::K10Dagger];

    /// (source operator, target operator).
    pub fn ops(self) -> (OperatorId, OperatorId) {
        use OperatorId::*;
        match self {
            Intertwiner::K21 => (D1, D2),
            Intertwiner::K21Dagger => (D2, D1),
            Intertwiner::K20 => (D0, D2),
            Intertwiner::K20Dagger => (D2, D0),
            Intertwiner::K10 => (D0, D1),
            Intertwiner::K10Dagger => (D1, D0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Intertwiner::K21 => "K21",
            Intertwiner::K21Dagger => "K21_dagger",
            Intertwiner::K20 => "K20",
            Intertwiner::K20Dagger => "K20_dagger",
            Intertwiner::K10 => "K10",
            Intertwiner::K10Dagger => "K10_dagger",
        }
    }

    /// Both ranks carry components in the sector.
    pub fn applies(self, sector: SectorLabel) -> bool {
        let (a, b) = self.ops();
        Layout::new(sector, a.rank()).n > 0 && Layout::new(sector, b.rank()).n > 0
    }

    fn euclidean_block(self, sector: SectorLabel, theory: Theory) -> RatMatrix {
        match self {
            Intertwiner::K21 => euclidean_k21(sector),
            Intertwiner::K21Dagger => euclidean_k21_dagger(sector),
            Intertwiner::K20 => euclidean_k20(sector),
            Intertwiner::K20Dagger => euclidean_k20_dagger(sector),
            Intertwiner::K10 => euclidean_k10(sector, theory),
            Intertwiner::K10Dagger => euclidean_k10_dagger(sector, theory),
        }
    }

    fn apply_bulk(self, f: &Field, t: &TrigJets) -> Field {
        match self {
            Intertwiner::K21 => bulk::k21(f, t),
            Intertwiner::K21Dagger => bulk::k21_dagger(f, t),
            Intertwiner::K20 => bulk::k20(f, t),
            Intertwiner::K20Dagger => bulk::k20_dagger(f, t),
            Intertwiner::K10 => bulk::k10(f, t),
            Intertwiner::K10Dagger => bulk::k10_dagger(f, t),
        }
    }
}

fn wick_point(t: f64) -> Complex64 {
    Complex64::new(0.0, -t)
}

/// Coordinate-frame jet at s = −it of the solution of `op` with Lorentzian
/// data `data` at time 0, together with the evolved data at t.
fn solution_jet(sector: SectorLabel, op: OperatorId, theory: Theory, data: &CVec, t: f64) -> Result<(Field, TrigJets, CVec)> {
    let lsys = reduce_theory(op, sector, Signature::Lorentzian, theory)?;
    let esys = reduce_theory(op, sector, Signature::Euclidean, theory)?;
    let ft = evolve_lorentzian(&lsys, data, &[t], EVOLUTION_TOL)?.remove(0);
    let trig = TrigJets::at(wick_point(t), JET_ORDER);
    let jet = to_coordinate(&jet_from_lorentz(&esys, t, &ft, JET_ORDER), &trig);
    Ok((jet, trig, ft))
}

/// |ρ(K u)(t) − U_target(t)K_Σ ρu(0)|, relative to the larger side.
pub fn intertwining_residual(sector: SectorLabel, which: Intertwiner, theory: Theory, data: &CVec, t: f64) -> Result<f64> {
    let (src, dst) = which.ops();
    let (jet, trig, _) = solution_jet(sector, src, theory, data, t)?;
    let lhs = lorentz_data_of(&to_rescaled(&which.apply_bulk(&jet, &trig), &trig));
    let block = lorentzify_block(sector, &which.euclidean_block(sector, theory), dst.rank(), src.rank());
    let dsys = reduce_theory(dst, sector, Signature::Lorentzian, theory)?;
    let rhs = evolve_lorentzian(&dsys, &(block * data), &[t], EVOLUTION_TOL)?.remove(0);
    let scale = lhs.camax().max(rhs.camax()).max(data.camax());
    Ok(if lhs.is_empty() { 0.0 } else { (&lhs - &rhs).camax() / scale })
}

#[derive(Debug, Clone, Copy)]
pub struct TraceFixingResidual {
    /// K₂₀*(u − K₂₁S₀u) on the jet, relative to |u|.
    pub identity: f64,
    /// Data of S₀u at t against the evolved S₀Σ g.
    pub commutation: f64,
}

/// Trace-fixing along the D₂ solution with harmonic-gauge data `g`:
/// S₀u = −(1/12)K₁₀K₂₀*u must satisfy K₂₀*(u − K₂₁S₀u) = 0 and be the D₁
/// solution with data S₀Σ g.
pub fn trace_fixing_dynamic(sector: SectorLabel, g: &CVec, t: f64) -> Result<TraceFixingResidual> {
    let th = Theory::Gravity;
    if Layout::new(sector, 0).n == 0 {
        // K₂₀Σ* vanishes identically and S₀Σ = 0
        return Ok(TraceFixingResidual { identity: 0.0, commutation: 0.0 });
    }
    let (u, trig, _) = solution_jet(sector, OperatorId::D2, th, g, t)?;
    let w = bulk::k10(&bulk::k20_dagger(&u, &trig), &trig);
    let w = Field { comps: w.comps.iter().map(|j| j.scale(Complex64::new(-1.0 / 12.0, 0.0))).collect(), ..w };
    let kw = bulk::k21(&w, &trig);
    let diff = Field { comps: u.comps.iter().zip(&kw.comps).map(|(a, b)| a - b).collect(), ..u.clone() };
    let scale = u.max_abs(READ_ORDER).max(1e-300);
    let identity = bulk::k20_dagger(&diff, &trig).max_abs(READ_ORDER - 3) / scale;

    let lhs = lorentz_data_of(&to_rescaled(&w, &trig));
    let s0 = lorentzify_block(sector, &s0_sigma(sector), 1, 2);
    let d1 = reduce_theory(OperatorId::D1, sector, Signature::Lorentzian, th)?;
    let rhs = evolve_lorentzian(&d1, &(s0 * g), &[t], EVOLUTION_TOL)?.remove(0);
    let dscale = lhs.camax().max(rhs.camax()).max(g.camax()).max(1e-300);
    let commutation = if lhs.is_empty() { 0.0 } else { (&lhs - &rhs).camax() / dscale };
    Ok(TraceFixingResidual { identity, commutation })
}
