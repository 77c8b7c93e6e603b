//! Bulk operators on S⁴ = ds² + cos²s h in the coordinate frame, acting on
//! Taylor jets in s. Components are (u_ss, u_sΣ, u_ΣΣ) with covariant
//! indices, expanded in the sector basis; Σ components are not rescaled.
//!
//! Used to cross-check the Cauchy-surface blocks and to test intertwining
//! of the Lorentzian evolutions at complex s = −it.

use num_complex::Complex64;

use super::OperatorId;
use crate::cauchy_ops::{scalar_shift, Layout, SlotName, Theory};
use crate::jet::{Jet, TrigJets};
use crate::rational::RatMatrix;
use crate::sector_algebra::{op, SectorLabel, SpatialOp};

/// A sector field in the coordinate frame: one jet per basis coordinate,
/// in layout order.
#[derive(Debug, Clone)]
pub struct Field {
    pub sector: SectorLabel,
    pub rank: u8,
    pub comps: Vec<Jet>,
}

impl Field {
    pub fn zero(sector: SectorLabel, rank: u8, order: usize) -> Self {
        let n = Layout::new(sector, rank).n;
        Self { sector, rank, comps: vec![Jet::zero(order); n] }
    }

    pub fn order(&self) -> usize {
        self.comps.first().map(|j| j.order()).unwrap_or(0)
    }

    pub fn slot(&self, name: SlotName) -> &[Jet] {
        let lay = Layout::new(self.sector, self.rank);
        let s = lay.slot(name);
        &self.comps[s.offset..s.offset + s.len]
    }

    fn put(&mut self, name: SlotName, v: Vec<Jet>) {
        let lay = Layout::new(self.sector, self.rank);
        let s = lay.slot(name);
        assert_eq!(v.len(), s.len);
        for (i, j) in v.into_iter().enumerate() {
            self.comps[s.offset + i] = j;
        }
    }

    /// Largest coefficient magnitude among orders ≤ `upto`.
    pub fn max_abs(&self, upto: usize) -> f64 {
        self.comps.iter().flat_map(|j| j.c.iter().take(upto + 1)).map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self { sector: self.sector, rank: self.rank, comps: self.comps.iter().map(|j| j.truncate(order)).collect() }
    }
}

fn lin(m: &RatMatrix, src: &[Jet], order: usize) -> Vec<Jet> {
    assert_eq!(m.ncols(), src.len());
    (0..m.nrows())
        .map(|i| {
            let mut acc = Jet::zero(order);
            for (j, s) in src.iter().enumerate() {
                let a = crate::rational::q_to_f64(m.get(i, j));
                if a != 0.0 {
                    acc = &acc + &s.scale(Complex64::new(a, 0.0));
                }
            }
            acc
        })
        .collect()
}

fn times(f: &Jet, v: &[Jet]) -> Vec<Jet> {
    v.iter().map(|x| f * x).collect()
}

fn scal(a: f64, v: &[Jet]) -> Vec<Jet> {
    v.iter().map(|x| x.scale(Complex64::new(a, 0.0))).collect()
}

fn deriv(v: &[Jet]) -> Vec<Jet> {
    v.iter().map(|x| x.derivative()).collect()
}

fn sum(terms: &[Vec<Jet>]) -> Vec<Jet> {
    let mut out = terms[0].clone();
    for t in &terms[1..] {
        for (o, x) in out.iter_mut().zip(t) {
            *o = &*o + x;
        }
    }
    out
}

fn sop(o: SpatialOp, sector: SectorLabel, rank: u8) -> RatMatrix {
    op(o, sector, rank)
}

/// Rescaled-frame jets to coordinate frame: u = cos^m v per component.
pub fn to_coordinate(v: &Field, trig: &TrigJets) -> Field {
    rescale(v, &trig.cos)
}

/// Coordinate frame to rescaled frame: v = sec^m u.
pub fn to_rescaled(u: &Field, trig: &TrigJets) -> Field {
    rescale(u, &trig.sec)
}

fn rescale(v: &Field, f: &Jet) -> Field {
    let lay = Layout::new(v.sector, v.rank);
    let f2 = f * f;
    let comps = v
        .comps
        .iter()
        .zip(lay.sigma_counts())
        .map(|(x, m)| match m {
            0 => x.clone(),
            1 => f * x,
            _ => &f2 * x,
        })
        .collect();
    Field { sector: v.sector, rank: v.rank, comps }
}

/// K̃₂₁w = ∇₍ₐw_b₎ + ½g δw.
pub fn k21(w: &Field, t: &TrigJets) -> Field {
    assert_eq!(w.rank, 1);
    let (sec, o) = (w.sector, w.order());
    let ws = w.slot(SlotName::S);
    let wg = w.slot(SlotName::Sigma);
    let dl = k10_dagger(w, t);
    let dl = dl.slot(SlotName::Scalar);
    let cos2 = &t.cos * &t.cos;
    let sc = &t.tan * &cos2;
    let mut out = Field::zero(sec, 2, o);
    out.put(SlotName::SS, sum(&[deriv(ws), scal(0.5, dl)]));
    let dws = lin(&sop(SpatialOp::D, sec, 0), ws, o);
    out.put(SlotName::SSigma, sum(&[scal(0.5, &deriv(wg)), scal(0.5, &dws), times(&t.tan, wg)]));
    let th = sop(SpatialOp::TimesH, sec, 0);
    let hws = lin(&th, ws, o);
    let hdl = lin(&th, dl, o);
    out.put(
        SlotName::SigmaSigma,
        sum(&[lin(&sop(SpatialOp::D, sec, 1), wg, o), scal(-1.0, &times(&sc, &hws)), scal(0.5, &times(&cos2, &hdl))]),
    );
    out
}

/// K̃₂₁†u = −2∇ᵃu_ab.
pub fn k21_dagger(u: &Field, t: &TrigJets) -> Field {
    assert_eq!(u.rank, 2);
    let (sec, o) = (u.sector, u.order());
    let (uss, usg, ugg) = (u.slot(SlotName::SS), u.slot(SlotName::SSigma), u.slot(SlotName::SigmaSigma));
    let sec2 = &t.sec2;
    let tsec2 = &t.tan * sec2;
    let mut out = Field::zero(sec, 1, o);
    let del1 = lin(&sop(SpatialOp::Delta, sec, 1), usg, o);
    let tr = lin(&sop(SpatialOp::TraceH, sec, 2), ugg, o);
    out.put(
        SlotName::S,
        sum(&[scal(-2.0, &deriv(uss)), scal(6.0, &times(&t.tan, uss)), scal(2.0, &times(sec2, &del1)), scal(-1.0, &times(&tsec2, &tr))]),
    );
    let del2 = lin(&sop(SpatialOp::Delta, sec, 2), ugg, o);
    out.put(SlotName::Sigma, sum(&[scal(-2.0, &deriv(usg)), scal(6.0, &times(&t.tan, usg)), times(sec2, &del2)]));
    out
}

/// K̃₂₀u₀ = g u₀.
pub fn k20(f: &Field, t: &TrigJets) -> Field {
    assert_eq!(f.rank, 0);
    let (sec, o) = (f.sector, f.order());
    let x = f.slot(SlotName::Scalar);
    let cos2 = &t.cos * &t.cos;
    let mut out = Field::zero(sec, 2, o);
    out.put(SlotName::SS, x.to_vec());
    out.put(SlotName::SigmaSigma, times(&cos2, &lin(&sop(SpatialOp::TimesH, sec, 0), x, o)));
    out
}

/// K̃₂₀†u = −(g|u) = −2u_ss − sec²(h|u_ΣΣ).
pub fn k20_dagger(u: &Field, t: &TrigJets) -> Field {
    assert_eq!(u.rank, 2);
    let (sec, o) = (u.sector, u.order());
    let tr = lin(&sop(SpatialOp::TraceH, sec, 2), u.slot(SlotName::SigmaSigma), o);
    let mut out = Field::zero(sec, 0, o);
    out.put(SlotName::Scalar, sum(&[scal(-2.0, u.slot(SlotName::SS)), scal(-1.0, &times(&t.sec2, &tr))]));
    out
}

/// K̃₁₀f = df.
pub fn k10(f: &Field, _t: &TrigJets) -> Field {
    assert_eq!(f.rank, 0);
    let (sec, o) = (f.sector, f.order());
    let x = f.slot(SlotName::Scalar);
    let mut out = Field::zero(sec, 1, o);
    out.put(SlotName::S, deriv(x));
    out.put(SlotName::Sigma, lin(&sop(SpatialOp::D, sec, 0), x, o));
    out
}

/// K̃₁₀†w = δw = −∇ᵃw_a.
pub fn k10_dagger(w: &Field, t: &TrigJets) -> Field {
    assert_eq!(w.rank, 1);
    let (sec, o) = (w.sector, w.order());
    let ws = w.slot(SlotName::S);
    let del = lin(&sop(SpatialOp::Delta, sec, 1), w.slot(SlotName::Sigma), o);
    let mut out = Field::zero(sec, 0, o);
    out.put(SlotName::Scalar, sum(&[scal(-1.0, &deriv(ws)), scal(3.0, &times(&t.tan, ws)), times(&t.sec2, &del)]));
    out
}

/// Which transcription of the radial operators to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    /// Recomputed from the metric; agrees with the rescaled systems.
    Corrected,
    /// The coordinate displays as printed in the source.
    Printed,
}

/// Candidates for the first-order coefficient of the scalar operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum D0FirstOrder {
    /// −(3/2)ȧa⁻¹∂_s = 3 tan s ∂_s.
    Recomputed,
    /// (3/2)ȧa⁻²∂_s, as printed.
    PrintedA2,
    /// (3/2)ȧa⁻¹∂_s.
    SuggestedA1,
}

/// D̃₀u = −u″ + p(s)u′ + a⁻¹D⃗₀,L u − shift·u.
pub fn apply_d0(u: &Field, t: &TrigJets, theory: Theory, first: D0FirstOrder) -> Field {
    assert_eq!(u.rank, 0);
    let (sec, o) = (u.sector, u.order());
    let x = u.slot(SlotName::Scalar);
    let p = match first {
        D0FirstOrder::Recomputed => t.tan.scale(Complex64::new(3.0, 0.0)),
        D0FirstOrder::PrintedA2 => (&t.tan * &t.sec2).scale(Complex64::new(-3.0, 0.0)),
        D0FirstOrder::SuggestedA1 => t.tan.scale(Complex64::new(-3.0, 0.0)),
    };
    let dx = deriv(x);
    let lap = lin(&sop(SpatialOp::D0L, sec, 0), x, o);
    let mut out = Field::zero(sec, 0, o);
    out.put(
        SlotName::Scalar,
        sum(&[scal(-1.0, &deriv(&dx)), times(&p, &dx), times(&t.sec2, &lap), scal(-(scalar_shift(theory) as f64), x)]),
    );
    out
}

/// (∂_s − c)² applied componentwise.
fn shifted_second(v: &[Jet], c: &Jet) -> Vec<Jet> {
    let once: Vec<Jet> = v.iter().map(|x| &x.derivative() - &(c * x)).collect();
    once.iter().map(|x| &x.derivative() - &(c * x)).collect()
}

/// Applies D̃₁ or D̃₂ in the coordinate frame.
pub fn apply_d(op_id: OperatorId, u: &Field, t: &TrigJets, theory: Theory, form: Form) -> Field {
    match op_id {
        OperatorId::D0 => apply_d0(u, t, theory, D0FirstOrder::Recomputed),
        OperatorId::D1 => apply_d1(u, t, theory, form),
        OperatorId::D2 => apply_d2(u, t, form),
    }
}

fn apply_d1(w: &Field, t: &TrigJets, theory: Theory, form: Form) -> Field {
    let (sec, o) = (w.sector, w.order());
    let ws = w.slot(SlotName::S);
    let wg = w.slot(SlotName::Sigma);
    let extra = if theory == Theory::Maxwell { 6.0 } else { 0.0 };
    let d0 = lin(&sop(SpatialOp::D0L, sec, 0), ws, o);
    let d1 = lin(&sop(SpatialOp::D1L, sec, 1), wg, o);
    let del = lin(&sop(SpatialOp::Delta, sec, 1), wg, o);
    let dws = lin(&sop(SpatialOp::D, sec, 0), ws, o);
    let tan2 = &t.tan * &t.tan;
    let sc = &t.tan * &t.sec2;
    let (rs, rg) = match form {
        Form::Corrected => (
            sum(&[
                scal(-1.0, &deriv(&deriv(ws))),
                scal(3.0, &times(&t.tan, &deriv(ws))),
                times(&t.sec2, &d0),
                times(&tan2.scale(Complex64::new(3.0, 0.0)), ws),
                scal(extra - 3.0, ws),
                scal(2.0, &times(&sc, &del)),
            ]),
            sum(&[
                scal(-1.0, &deriv(&deriv(wg))),
                times(&t.tan, &deriv(wg)),
                times(&t.sec2, &d1),
                scal(extra - 6.0, wg),
                scal(2.0, &times(&t.tan, &dws)),
            ]),
        ),
        Form::Printed => {
            // a = cos², ȧ = −2 sin cos: ȧa⁻¹ = −2tan, ȧa⁻² = −2tan·sec², ȧ²a⁻² = 4tan²
            let half_ada = t.tan.scale(Complex64::new(-1.0, 0.0));
            (
                sum(&[
                    scal(-1.0, &deriv(&deriv(ws))),
                    times(&t.sec2, &d0),
                    scal(2.0, &times(&sc, &del)),
                    times(&tan2.scale(Complex64::new(3.0, 0.0)), ws),
                    scal(extra - 3.0, ws),
                ]),
                sum(&[
                    scal(-1.0, &shifted_second(wg, &half_ada)),
                    times(&t.sec2, &d1),
                    scal(2.0, &times(&t.tan, &dws)),
                    times(&tan2, wg),
                    scal(-2.0, &times(&t.sec2, wg)),
                    scal(extra - 3.0, wg),
                ]),
            )
        }
    };
    let mut out = Field::zero(sec, 1, o);
    out.put(SlotName::S, rs);
    out.put(SlotName::Sigma, rg);
    out
}

fn apply_d2(u: &Field, t: &TrigJets, form: Form) -> Field {
    let (sec, o) = (u.sector, u.order());
    let (uss, usg, ugg) = (u.slot(SlotName::SS), u.slot(SlotName::SSigma), u.slot(SlotName::SigmaSigma));
    let d0 = lin(&sop(SpatialOp::D0L, sec, 0), uss, o);
    let d1 = lin(&sop(SpatialOp::D1L, sec, 1), usg, o);
    let d2 = lin(&sop(SpatialOp::D2L, sec, 2), ugg, o);
    let del1 = lin(&sop(SpatialOp::Delta, sec, 1), usg, o);
    let del2 = lin(&sop(SpatialOp::Delta, sec, 2), ugg, o);
    let dss = lin(&sop(SpatialOp::D, sec, 0), uss, o);
    let dsg = lin(&sop(SpatialOp::D, sec, 1), usg, o);
    let th = sop(SpatialOp::TimesH, sec, 0);
    let tr = lin(&sop(SpatialOp::TraceH, sec, 2), ugg, o);
    let htr = lin(&th, &tr, o);
    let hss = lin(&th, uss, o);
    let tan2 = &t.tan * &t.tan;
    let sec4 = &t.sec2 * &t.sec2;
    let sc = &t.tan * &t.sec2;
    let k = |a: f64| Complex64::new(a, 0.0);
    let (rss, rsg, rgg) = match form {
        Form::Corrected => (
            sum(&[
                scal(-1.0, &deriv(&deriv(uss))),
                scal(3.0, &times(&t.tan, &deriv(uss))),
                times(&t.sec2, &d0),
                times(&tan2.scale(k(6.0)), uss),
                scal(4.0, &times(&sc, &del1)),
                scal(-1.0, &times(&sec4, &tr)),
            ]),
            sum(&[
                scal(-1.0, &deriv(&deriv(usg))),
                times(&t.tan, &deriv(usg)),
                times(&t.sec2, &d1),
                times(&tan2.scale(k(5.0)), usg),
                scal(-1.0, usg),
                scal(2.0, &times(&t.tan, &dss)),
                times(&sc, &del2),
            ]),
            sum(&[
                scal(-1.0, &deriv(&deriv(ugg))),
                scal(-1.0, &times(&t.tan, &deriv(ugg))),
                times(&t.sec2, &d2),
                scal(-6.0, ugg),
                times(&tan2.scale(k(-4.0)), ugg),
                scal(4.0, &times(&t.tan, &dsg)),
                times(&tan2, &htr),
                scal(-2.0, &hss),
            ]),
        ),
        Form::Printed => {
            let ada = t.tan.scale(k(-2.0));
            let half_ada = t.tan.scale(k(-1.0));
            // ȧa⁻³ = −2tan·sec⁴, ȧ²a⁻³ = 4tan²sec², ȧ²a⁻¹ = 4sin²
            let tsec4 = &t.tan * &sec4;
            let sin2 = &tan2 * &(&t.cos * &t.cos);
            (
                sum(&[
                    scal(-1.0, &deriv(&deriv(uss))),
                    times(&t.sec2, &d0),
                    scal(4.0, &times(&tsec4, &del1)),
                    times(&tan2.scale(k(6.0)), uss),
                    scal(-1.0, &times(&(&tan2 * &t.sec2), &tr)),
                    scal(-1.0, &tr),
                ]),
                sum(&[
                    scal(-1.0, &shifted_second(usg, &half_ada)),
                    times(&t.sec2, &d1),
                    times(&sc, &del2),
                    scal(2.0, &times(&t.tan, &dss)),
                    times(&tan2.scale(k(6.0)), usg),
                    scal(2.0, usg),
                    scal(-2.0, &times(&t.sec2, usg)),
                ]),
                sum(&[
                    scal(-1.0, &shifted_second(ugg, &ada)),
                    times(&t.sec2, &d2),
                    scal(4.0, &times(&t.tan, &dsg)),
                    scal(2.0, ugg),
                    times(&tan2.scale(k(2.0)), ugg),
                    scal(-6.0, &times(&t.sec2, ugg)),
                    times(&t.sec2, &htr),
                    scal(-1.0, &htr),
                    scal(-2.0, &hss),
                    scal(-2.0, &times(&sin2, &hss)),
                ]),
            )
        }
    };
    let mut out = Field::zero(sec, 2, o);
    out.put(SlotName::SS, rss);
    out.put(SlotName::SSigma, rsg);
    out.put(SlotName::SigmaSigma, rgg);
    out
}

/// Euclidean Cauchy data (u, −∂_s u) of a field at its expansion point.
pub fn cauchy_data(u: &Field) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = u.comps.iter().map(|j| j.value()).collect();
    v.extend(u.comps.iter().map(|j| -j.d1()));
    v
}
