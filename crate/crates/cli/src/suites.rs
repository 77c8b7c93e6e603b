//! Check suites: each sector is one task producing records for every
//! enabled suite; global aggregates are appended per suite.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::time::Instant;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use dsvac_core::calderon::{calderon, calderon_invertible, calderon_invertible_with, kernel_data, lorentzify, pair_distance, q_adjoint_residual, ProjectorPair, Source};
use dsvac_core::cauchy_ops::{charge_forms, euclidean_k20_dagger, euclidean_k21_dagger, lorentz_k_blocks, trace_fixing, Layout, Theory};
use dsvac_core::linalg::{null_space, principal_angles, CVec};
use dsvac_core::maxwell::{self, MaxwellState, MaxwellSubspace};
use dsvac_core::phase_space::{charge_kernel_check, direct_sum, ett_dual_route, f_tt_cross_check, parametrization_exact, SubspaceName, RANK_TOL};
use dsvac_core::radial_ode::dynamics::{charge_drift, intertwining_residual, trace_fixing_dynamic, Intertwiner};
use dsvac_core::radial_ode::{data_norm_factor, reduce_theory, OperatorId, Signature};
use dsvac_core::sector_algebra::harmonic::harmonic_oracle;
use dsvac_core::sector_algebra::{enumerate_sectors, SectorLabel};
use dsvac_core::state_verify::{
    build_covariances, e4_null_implication, full_invariance, positivity_report, strong_invariance_witness, symmetry_residuals,
    tt_energy_oracle, u_alpha_preserves, u_alpha_unitarity, weak_invariance, PositivityReport, SectorState, Variant,
};

use crate::config::{RunConfig, Suite};
use crate::report::{Record, Report, Verdict};

/// Lower bound for |λ±(f, f)| on the eigenvalue-4 block per unit datum.
pub const WITNESS_MIN: f64 = 1e-3;
pub const COLLOCATION_NODES: usize = 40;
pub const COLLOCATION_SEED: u64 = 0x5eed_d510;
pub const COLLOCATION_SAMPLES: usize = 5;
pub const HARMONIC_K_MAX: u32 = 3;
pub const DYNAMICS_TIMES: [f64; 8] = [-2.0, -1.5, -1.0, -0.5, 0.5, 1.0, 1.5, 2.0];
pub const INTERTWINING_TIME: f64 = 0.7;
/// Number of Killing 1-forms on the four-sphere.
pub const KILLING_TOTAL: u64 = 10;
pub const E4_TOTAL: u64 = 6;

/// Thresholds derived from the configured tolerances.
#[derive(Debug, Clone, Copy)]
pub struct Thresholds {
    pub verdict: f64,
    /// Sum rules, projector sums and kernel angles.
    pub tight: f64,
    /// Exactly representable identities in floating point.
    pub exact: f64,
    /// Anything passing through Lorentzian evolution.
    pub dynamics: f64,
    pub margin: f64,
}

impl Thresholds {
    pub fn from_config(c: &RunConfig) -> Self {
        let t = c.tolerances;
        Self { verdict: t.verdict, tight: t.verdict / 10.0, exact: t.linear_algebra, dynamics: t.verdict * 10.0, margin: t.margin }
    }
}

struct Ctx {
    suite: Suite,
    sector: Option<SectorLabel>,
    out: Vec<Record>,
}

impl Ctx {
    fn new(suite: Suite, sector: Option<SectorLabel>) -> Self {
        Self { suite, sector, out: Vec::new() }
    }

    #[allow(clippy::too_many_arguments)]
    fn push(&mut self, claim: &str, value: Option<f64>, extrema: Option<[f64; 2]>, threshold: Option<f64>, verdict: Verdict, note: Option<String>) {
        let sector = self.sector.map(|s| s.to_string());
        let check_id = match &sector {
            Some(s) => format!("{}.{claim}@{s}", self.suite),
            None => format!("{}.{claim}", self.suite),
        };
        self.out.push(Record {
            check_id,
            claim: claim.to_string(),
            suite: self.suite,
            sector,
            value,
            extrema,
            threshold,
            verdict,
            note,
            runtime_ms: None,
        });
    }

    fn verdict(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    fn le(&mut self, claim: &str, value: f64, thr: f64) {
        self.push(claim, Some(value), None, Some(thr), Self::verdict(value <= thr), None);
    }

    fn ge(&mut self, claim: &str, value: f64, thr: f64) {
        self.push(claim, Some(value), None, Some(thr), Self::verdict(value >= thr), None);
    }

    fn ok(&mut self, claim: &str, ok: bool, note: impl Into<String>) {
        self.push(claim, None, None, None, Self::verdict(ok), Some(note.into()));
    }

    fn count(&mut self, claim: &str, got: u64, want: u64) {
        self.push(claim, Some(got as f64), None, Some(want as f64), Self::verdict(got == want), None);
    }

    fn structural(&mut self, claim: &str, note: &str) {
        self.push(claim, None, None, None, Verdict::Structural, Some(note.to_string()));
    }

    fn error(&mut self, claim: &str, e: impl Display) {
        self.push(claim, None, None, None, Verdict::Fail, Some(e.to_string()));
    }

    fn le_result<E: Display>(&mut self, claim: &str, r: Result<f64, E>, thr: f64) {
        match r {
            Ok(v) => self.le(claim, v, thr),
            Err(e) => self.error(claim, e),
        }
    }

    /// Sign record over both covariances; skipped silently for empty subspaces.
    fn signs(&mut self, claim: &str, r: &PositivityReport, ok: bool, thr: f64) {
        if r.dim == 0 {
            return;
        }
        let lo = [r.plus, r.minus].iter().flatten().map(|e| e.0).fold(f64::INFINITY, f64::min);
        let hi = [r.plus, r.minus].iter().flatten().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
        let note = r.sum.map(|(slo, shi)| format!("dim {}; sum of covariances in [{slo:e}, {shi:e}]", r.dim));
        self.push(claim, None, Some([lo, hi]), Some(thr), Self::verdict(ok), note);
    }
}

/// Deterministic non-degenerate Lorentzian data vector.
fn probe(n: usize) -> CVec {
    CVec::from_iterator(n, (0..n).map(|j| Complex64::new(1.0 / (j as f64 + 1.0), 0.25 * ((j % 3) as f64 - 1.0))))
}

fn layout_has(sector: SectorLabel, rank: u8) -> bool {
    Layout::new(sector, rank).n > 0
}

fn pair_identities(c: &mut Ctx, prefix: &str, pair: &ProjectorPair, th: &Thresholds) {
    let (sum, idem) = pair.projector_residuals();
    c.le(&format!("{prefix}.projector_sum"), sum, th.tight);
    c.le(&format!("{prefix}.idempotent"), idem, th.verdict);
    let lp = lorentzify(pair);
    let q = charge_forms(pair.sector, pair.op.rank()).q.to_complex();
    c.le(&format!("{prefix}.q_adjoint"), q_adjoint_residual(&lp, &q), th.verdict);
}

fn identities(s: SectorLabel, cfg: &RunConfig, th: &Thresholds) -> Ctx {
    let mut c = Ctx::new(Suite::Identities, Some(s));
    if s.k <= HARMONIC_K_MAX {
        match harmonic_oracle(s.k, s.family) {
            Ok(m) => {
                let want = s.eigenvalue() as f64;
                c.le("spectrum.eigenvalue", (m.eigenvalue - want).abs() / want.max(1.0) + m.spread, th.tight);
                c.count("spectrum.multiplicity", m.multiplicity as u64, s.multiplicity());
            }
            Err(e) => c.error("spectrum.eigenvalue", e),
        }
    }
    for op in [OperatorId::D2, OperatorId::D1, OperatorId::D0] {
        if !layout_has(s, op.rank()) {
            continue;
        }
        match reduce_theory(op, s, Signature::Euclidean, Theory::Gravity) {
            Ok(sys) => c.ok(
                &format!("radial.{op:?}.structure"),
                sys.self_adjoint_exact() && sys.reflection_consistent(),
                "exact symmetry of the reduced system and reflection parity",
            ),
            Err(e) => c.error(&format!("radial.{op:?}.structure"), e),
        }
    }
    {
        let k21d = euclidean_k21_dagger(s);
        let k20d = euclidean_k20_dagger(s);
        let tf = trace_fixing(s);
        let zero = k20d.nrows() == 0 || {
            let gauge = if k21d.nrows() == 0 { dsvac_core::rational::RatMatrix::identity(tf.ncols()) } else { k21d.nullspace() };
            gauge.ncols() == 0 || (&(&k20d * &tf) * &gauge).is_zero()
        };
        c.ok("trace_fixing.static", zero, "exact: K20† (1 - K21 S0) vanishes on harmonic-gauge data");
    }
    if s.k <= cfg.dynamics_k_max {
        for op in [OperatorId::D2, OperatorId::D1, OperatorId::D0] {
            if layout_has(s, op.rank()) {
                c.le_result(&format!("dynamics.charge.{op:?}"), charge_drift(s, op, Theory::Gravity, &DYNAMICS_TIMES), th.dynamics);
            }
        }
        for w in Intertwiner::ALL {
            if !w.applies(s) {
                continue;
            }
            let src = w.ops().0;
            let data = probe(Layout::new(s, src.rank()).data_dim());
            c.le_result(
                &format!("dynamics.intertwining.{}", w.name()),
                intertwining_residual(s, w, Theory::Gravity, &data, INTERTWINING_TIME),
                th.dynamics,
            );
        }
        if layout_has(s, 0) {
            let lb = lorentz_k_blocks(s);
            let hg = null_space(&lb.k21_dagger, RANK_TOL);
            let g: CVec = hg.column_sum();
            match trace_fixing_dynamic(s, &g, INTERTWINING_TIME) {
                Ok(r) => {
                    c.le("dynamics.trace_fixing.identity", r.identity, th.dynamics);
                    c.le("dynamics.trace_fixing.commutation", r.commutation, th.dynamics);
                }
                Err(e) => c.error("dynamics.trace_fixing.identity", e),
            }
        }
    }
    c
}

/// Numerically detected dimension of the two-sided regular D̃₁ solutions.
fn d1_kernel_numeric(pair: &ProjectorPair) -> usize {
    let w = data_norm_factor(pair.sector, 1);
    principal_angles(&pair.plus, &pair.minus, Some(&w)).iter().filter(|&&a| a < 1e-8).count()
}

fn calderon_suite(s: SectorLabel, st: Option<&SectorState>, th: &Thresholds) -> (Ctx, u64) {
    let mut c = Ctx::new(Suite::Calderon, Some(s));
    match calderon_invertible(s, OperatorId::D2) {
        Ok(p) => {
            pair_identities(&mut c, "D2", &p, th);
            c.ge("D2.transversality", p.conditioning, th.margin);
        }
        Err(e) => c.error("D2.projector_sum", e),
    }
    if let Some(st) = st {
        let q = charge_forms(s, 2).q.to_complex();
        c.le("D2.lorentzian_q_adjoint", q_adjoint_residual(&st.pair, &q), th.verdict);
    }
    let mut killing = 0;
    if layout_has(s, 1) {
        let exact = kernel_data(s, OperatorId::D1, Theory::Gravity).map_or(0, |k| k.ncols());
        match calderon(s, OperatorId::D1, Theory::Gravity, &Source::default()) {
            Ok(p) => {
                c.count("D1.kernel_dim", d1_kernel_numeric(&p) as u64, exact as u64);
                killing = exact as u64 * s.multiplicity();
                pair_identities(&mut c, "D1", &p, th);
                if let Some(qi) = &p.quotient {
                    c.le("D1.quotient.isotropy", qi.isotropy_residual, th.verdict);
                    if qi.dims.quotient > 0 {
                        c.ge("D1.quotient.charge_nondegenerate", qi.charge_sigma_min, th.margin);
                    }
                    c.count("D1.quotient.dim", qi.dims.quotient as u64, (qi.dims.data - 2 * qi.dims.kernel) as u64);
                }
            }
            Err(e) => c.error("D1.kernel_dim", e),
        }
    }
    if layout_has(s, 0) {
        match calderon(s, OperatorId::D0, Theory::Gravity, &Source::default()) {
            Ok(p) => pair_identities(&mut c, "D0", &p, th),
            Err(e) => c.error("D0.projector_sum", e),
        }
    }
    (c, killing)
}

fn phase_space_suite(s: SectorLabel, st: &SectorState, th: &Thresholds) -> (Ctx, u64) {
    let mut c = Ctx::new(Suite::PhaseSpace, Some(s));
    let ps = &st.phase;
    let (exact, numeric, dist) = ett_dual_route(s);
    c.push("e_tt.dual_route", Some(dist), None, Some(th.verdict), Ctx::verdict(exact == numeric && dist <= th.verdict), Some(format!("dim {exact} exact, {numeric} floating")));
    let dims = |d: &dsvac_core::phase_space::DirectSumCheck| format!("pieces {:?} of {}", d.dims, d.total);
    let d1 = direct_sum(&ps.e_tt, &[&ps.e_tt_gauge, &ps.f_tt]);
    c.push("direct_sum.gauge_plus_f", Some(d1.transversality), None, Some(th.margin), Ctx::verdict(d1.holds(th.margin, th.verdict)), Some(dims(&d1)));
    let d2 = direct_sum(&ps.e_tt, &[&ps.e_tt_gauge, &ps.f_tt_gauge, &ps.e_tt_4]);
    c.push("direct_sum.three_way", Some(d2.transversality), None, Some(th.margin), Ctx::verdict(d2.holds(th.margin, th.verdict)), Some(dims(&d2)));
    let ck = charge_kernel_check(s);
    c.push("charge_kernel", Some(ck.angle), None, Some(th.tight), Ctx::verdict(ck.holds(th.tight)), Some(format!("kernel dim {} vs F_TT dim {}", ck.dim_kernel, ck.dim_f_tt)));
    let (inside, rank, dim_e) = parametrization_exact(s);
    c.ok("parametrization.exact", inside && rank == dim_e, format!("rank {rank} of {dim_e}"));
    c.le("parametrization.f_tt", f_tt_cross_check(s), th.verdict);
    (c, ps.e_tt_4.dim() as u64 * s.multiplicity())
}

fn states_suite(s: SectorLabel, st: &SectorState, cfg: &RunConfig, th: &Thresholds) -> Ctx {
    let mut c = Ctx::new(Suite::States, Some(s));
    let e = build_covariances(st, Variant::Euclidean);
    c.le("euclidean.hermitian", e.hermiticity(), th.verdict);
    c.le("euclidean.sum_rule", e.sum_rule(&st.q_i, None), th.tight);
    let g = positivity_report(st, SubspaceName::ETTGauge, Variant::Euclidean);
    c.signs("euclidean.gauge_modes_nonnegative", &g, g.nonnegative(th.verdict), th.verdict);
    let n = positivity_report(st, SubspaceName::ETT4, Variant::Euclidean);
    c.signs("euclidean.e4_negative", &n, n.negative(th.verdict, th.margin), th.margin);
    if let Some(imp) = e4_null_implication(st) {
        let ok = imp.iter().all(|i| i.holds(th.verdict));
        let lam = imp.iter().map(|i| i.lambda).fold(f64::INFINITY, f64::min);
        c.push("euclidean.e4_null_forces_projection", Some(lam), None, Some(th.verdict), Ctx::verdict(ok), None);
    }
    let m = build_covariances(st, Variant::Modified);
    c.le("modified.sum_rule", m.sum_rule(&st.q_i, Some(&st.phase.e_tt.basis)), th.tight);
    let mp = positivity_report(st, SubspaceName::ETT, Variant::Modified);
    c.signs("modified.nonnegative", &mp, mp.nonnegative(th.verdict), th.verdict);
    for &a in &cfg.alpha_values {
        let v = Variant::Alpha(a);
        let cov = build_covariances(st, v);
        c.le(&format!("alpha[{a}].sum_rule"), cov.sum_rule(&st.q_i, None), th.tight);
        c.le(&format!("alpha[{a}].q_unitary"), u_alpha_unitarity(st, a), th.exact);
        let g = positivity_report(st, SubspaceName::ETTGauge, v);
        c.signs(&format!("alpha[{a}].gauge_modes_nonnegative"), &g, g.nonnegative(th.verdict), th.verdict);
        let n = positivity_report(st, SubspaceName::ETT4, v);
        c.signs(&format!("alpha[{a}].e4_negative"), &n, n.negative(th.verdict, th.margin), th.margin);
    }
    c
}

fn gauge_suite(s: SectorLabel, st: &SectorState, th: &Thresholds) -> Ctx {
    let mut c = Ctx::new(Suite::Gauge, Some(s));
    c.le("euclidean.weak_invariance", weak_invariance(st, Variant::Euclidean), th.verdict);
    c.le("modified.weak_invariance", weak_invariance(st, Variant::Modified), th.verdict);
    if let Some(w) = strong_invariance_witness(st) {
        c.ge("euclidean.strong_invariance_violated", w, WITNESS_MIN);
    }
    c.le("modified.full_invariance", full_invariance(st, Variant::Modified), th.verdict);
    c
}

fn symmetry_suite(s: SectorLabel, st: &SectorState, cfg: &RunConfig, th: &Thresholds) -> Ctx {
    let mut c = Ctx::new(Suite::Symmetry, Some(s));
    match symmetry_residuals(st) {
        Ok(r) => {
            c.le("euclidean_projectors_real", r.euclidean_real, th.verdict);
            c.le("time_reversal", r.time_reversal, th.verdict);
            c.le("reflection.flips_charge", r.s_flips_charge, th.exact);
            c.le("reflection.involution", r.s_involution, th.exact);
            c.le("reflection.reverses_evolution", r.s_reverses_evolution, th.dynamics);
        }
        Err(e) => c.error("time_reversal", e),
    }
    for &a in &cfg.alpha_values {
        let worst = [SubspaceName::ETT, SubspaceName::ETTGauge, SubspaceName::ETT4]
            .iter()
            .map(|&n| u_alpha_preserves(st, a, n))
            .fold(0.0, f64::max);
        c.le(&format!("alpha[{a}].preserves_subspaces"), worst, th.verdict);
    }
    c
}

fn oracle_suite(s: SectorLabel, st: &SectorState, th: &Thresholds) -> Ctx {
    let mut c = Ctx::new(Suite::Oracle, Some(s));
    match tt_energy_oracle(st) {
        Ok(Some(o)) => c.le("energy_quadrature", o.rel_diff(), th.verdict),
        Ok(None) => {}
        Err(e) => c.error("energy_quadrature", e),
    }
    c
}

/// Sectors for the collocation comparison, drawn with a fixed seed.
pub fn collocation_sample(k_max: u32) -> Vec<SectorLabel> {
    let mut all = enumerate_sectors(k_max);
    let mut rng = ChaCha8Rng::seed_from_u64(COLLOCATION_SEED);
    all.shuffle(&mut rng);
    let mut pick: Vec<SectorLabel> = all.into_iter().take(COLLOCATION_SAMPLES).collect();
    pick.sort_by_key(|s| (s.family as u8, s.k));
    pick
}

fn collocation_records(k_max: u32, th: &Thresholds) -> Vec<Record> {
    let sample = collocation_sample(k_max);
    let recs: Vec<Vec<Record>> = sample
        .par_iter()
        .map(|&s| {
            let mut c = Ctx::new(Suite::Oracle, Some(s));
            let a = calderon_invertible(s, OperatorId::D2);
            let b = calderon_invertible_with(s, OperatorId::D2, Theory::Gravity, &Source::Collocation { nodes: COLLOCATION_NODES });
            match (a, b) {
                (Ok(a), Ok(b)) => c.le("collocation_agreement", pair_distance(&a, &b), th.verdict),
                (Err(e), _) | (_, Err(e)) => c.error("collocation_agreement", e),
            }
            c.out
        })
        .collect();
    recs.into_iter().flatten().collect()
}

struct SectorOutcome {
    records: BTreeMap<Suite, Vec<Record>>,
    killing: u64,
    e4: u64,
}

fn gravity_sector(s: SectorLabel, cfg: &RunConfig, th: &Thresholds) -> SectorOutcome {
    let mut records: BTreeMap<Suite, Vec<Record>> = BTreeMap::new();
    let mut add = |c: Ctx| records.entry(c.suite).or_default().extend(c.out);
    let needs_state = [Suite::Calderon, Suite::PhaseSpace, Suite::States, Suite::Gauge, Suite::Symmetry, Suite::Oracle].iter().any(|&x| cfg.enabled(x));
    let state = needs_state.then(|| SectorState::new(s));
    let (mut killing, mut e4) = (0, 0);
    if cfg.enabled(Suite::Identities) {
        add(identities(s, cfg, th));
    }
    if cfg.enabled(Suite::Calderon) {
        let (c, k) = calderon_suite(s, state.as_ref().and_then(|r| r.as_ref().ok()), th);
        killing = k;
        add(c);
    }
    match state {
        Some(Ok(st)) => {
            if cfg.enabled(Suite::PhaseSpace) {
                let (c, d) = phase_space_suite(s, &st, th);
                e4 = d;
                add(c);
            }
            if cfg.enabled(Suite::States) {
                add(states_suite(s, &st, cfg, th));
            }
            if cfg.enabled(Suite::Gauge) {
                add(gauge_suite(s, &st, th));
            }
            if cfg.enabled(Suite::Symmetry) {
                add(symmetry_suite(s, &st, cfg, th));
            }
            if cfg.enabled(Suite::Oracle) {
                add(oracle_suite(s, &st, th));
            }
        }
        Some(Err(e)) => {
            for suite in [Suite::PhaseSpace, Suite::States, Suite::Gauge, Suite::Symmetry, Suite::Oracle] {
                if cfg.enabled(suite) {
                    let mut c = Ctx::new(suite, Some(s));
                    c.error("sector_state", &e);
                    add(c);
                }
            }
        }
        None => {}
    }
    SectorOutcome { records, killing, e4 }
}

fn maxwell_sector(s: SectorLabel, cfg: &RunConfig, th: &Thresholds) -> (Vec<Record>, u64) {
    let mut c = Ctx::new(Suite::Maxwell, Some(s));
    let ev = maxwell::d1_hat_eigenvalue(s);
    let in_family_spectrum = match s.family {
        dsvac_core::sector_algebra::Family::Scalar => maxwell::in_i0(ev),
        _ => maxwell::in_i1(ev),
    };
    let sigma_ok = maxwell::sigma_spectrum(s).is_none_or(|v| v == ev);
    c.ok("spectrum", in_family_spectrum && sigma_ok, format!("eigenvalue {ev}"));
    let (comp, exact) = maxwell::gauge_composition(s);
    c.push("k10_dagger_k10", Some(comp), None, Some(th.exact), Ctx::verdict(exact && comp <= th.exact), None);
    if layout_has(s, 0) {
        match calderon(s, OperatorId::D0, Theory::Maxwell, &Source::default()) {
            Ok(p) => {
                pair_identities(&mut c, "D0", &p, th);
                if let Some(qi) = &p.quotient {
                    c.le("D0.quotient.isotropy", qi.isotropy_residual, th.verdict);
                    c.count("D0.kernel_dim", qi.dims.kernel as u64, 1);
                }
            }
            Err(e) => c.error("D0.projector_sum", e),
        }
    }
    let st = match MaxwellState::new(s) {
        Ok(st) => st,
        Err(e) => {
            c.error("D1.projector_sum", e);
            return (c.out, 0);
        }
    };
    match calderon_invertible_with(s, OperatorId::D1, Theory::Maxwell, &Source::default()) {
        Ok(p) => {
            pair_identities(&mut c, "D1", &p, th);
            c.ge("D1.transversality", p.conditioning, th.margin);
        }
        Err(e) => c.error("D1.projector_sum", e),
    }
    c.le_result("D1.intertwines_K10", st.intertwining(&Source::default()), th.verdict);
    let ps = &st.phase;
    let [three, two] = ps.direct_sums();
    let dims = |d: &dsvac_core::phase_space::DirectSumCheck| format!("pieces {:?} of {}", d.dims, d.total);
    c.push("direct_sum.three_way", Some(three.transversality), None, Some(th.margin), Ctx::verdict(three.holds(th.margin, th.verdict)), Some(dims(&three)));
    c.push("direct_sum.gauge_plus_f", Some(two.transversality), None, Some(th.margin), Ctx::verdict(two.holds(th.margin, th.verdict)), Some(dims(&two)));
    c.le("charge_kernel", ps.charge_kernel_distance(), th.tight);
    let pc = maxwell::parametrization_check(ps);
    c.push(
        "parametrization",
        Some(pc.block_distance),
        None,
        Some(th.verdict),
        Ctx::verdict(pc.inside && pc.rank == pc.dim_e && pc.block_distance <= th.verdict),
        Some(format!("rank {} of {}", pc.rank, pc.dim_e)),
    );
    c.le("euclidean.hermitian", st.hermiticity(), th.verdict);
    c.le("euclidean.sum_rule", st.sum_rule(Variant::Euclidean), th.tight);
    let g = st.positivity(MaxwellSubspace::EGauge, Variant::Euclidean);
    c.signs("euclidean.gauge_modes_nonnegative", &g, g.nonnegative(th.verdict), th.verdict);
    let n = st.positivity(MaxwellSubspace::E0, Variant::Euclidean);
    c.signs("euclidean.e0_negative", &n, n.negative(th.verdict, th.margin), th.margin);
    if let Some(imp) = st.e0_null_implication() {
        let ok = imp.iter().all(|&(lam, proj)| lam > th.verdict || proj <= th.verdict);
        c.push("euclidean.e0_null_forces_projection", Some(imp[0].0.min(imp[1].0)), None, Some(th.verdict), Ctx::verdict(ok), None);
    }
    c.le("euclidean.weak_invariance", st.invariance(Variant::Euclidean, MaxwellSubspace::FGauge), th.verdict);
    c.le("modified.sum_rule", st.sum_rule(Variant::Modified), th.tight);
    let m = st.positivity(MaxwellSubspace::E, Variant::Modified);
    c.signs("modified.nonnegative", &m, m.nonnegative(th.verdict), th.verdict);
    c.le("modified.full_invariance", st.invariance(Variant::Modified, MaxwellSubspace::F), th.verdict);
    if s.k <= cfg.dynamics_k_max {
        c.le_result("dynamics.charge.D1", charge_drift(s, OperatorId::D1, Theory::Maxwell, &DYNAMICS_TIMES), th.dynamics);
    }
    (c.out, ps.e0.ncols() as u64 * s.multiplicity())
}

fn profile_times() -> Vec<f64> {
    (0..=40).map(|i| -2.0 + 0.1 * i as f64).collect()
}

fn stamp(records: &mut [Record], ms: Option<f64>) {
    if let Some(ms) = ms {
        for r in records {
            r.runtime_ms = Some(ms);
        }
    }
}

pub fn run(cfg: &RunConfig) -> Report {
    let th = Thresholds::from_config(cfg);
    let timed = cfg.timings;
    let clock = |start: Instant| timed.then(|| (start.elapsed().as_secs_f64() * 1e3 * 1e3).round() / 1e3);
    let mut by_suite: BTreeMap<Suite, Vec<Record>> = BTreeMap::new();

    if cfg.enabled(Suite::Maxwell) {
        let sectors = maxwell::maxwell_sectors(cfg.k_max);
        let per: Vec<(Vec<Record>, u64)> = sectors
            .par_iter()
            .map(|&s| {
                let t = Instant::now();
                let (mut r, e0) = maxwell_sector(s, cfg, &th);
                stamp(&mut r, clock(t));
                (r, e0)
            })
            .collect();
        let mut recs: Vec<Record> = Vec::new();
        let mut e0_total = 0;
        for (r, e0) in per {
            recs.extend(r);
            e0_total += e0;
        }
        let mut g = Ctx::new(Suite::Maxwell, None);
        g.count("e0_total_dim", e0_total, 1);
        g.le_result("e0_profile", maxwell::e0_profile_deviation(&profile_times()), th.dynamics);
        g.ok("spectra_disjoint", (0..100_000).all(|l| !(maxwell::in_i0(l) && maxwell::in_i1(l))), "levels k(k+2) and k(k+2)+1 never coincide");
        recs.extend(g.out);
        by_suite.insert(Suite::Maxwell, recs);
    }

    if cfg.has_gravity() {
        let sectors = enumerate_sectors(cfg.k_max);
        let per: Vec<SectorOutcome> = sectors
            .par_iter()
            .map(|&s| {
                let t = Instant::now();
                let mut o = gravity_sector(s, cfg, &th);
                let ms = clock(t);
                for r in o.records.values_mut() {
                    stamp(r, ms);
                }
                o
            })
            .collect();
        let (mut killing, mut e4) = (0, 0);
        for o in per {
            killing += o.killing;
            e4 += o.e4;
            for (suite, r) in o.records {
                by_suite.entry(suite).or_default().extend(r);
            }
        }
        if cfg.enabled(Suite::Calderon) {
            let mut g = Ctx::new(Suite::Calderon, None);
            g.count("D1.kernel_total", killing, KILLING_TOTAL);
            by_suite.entry(Suite::Calderon).or_default().extend(g.out);
        }
        if cfg.enabled(Suite::PhaseSpace) {
            let mut g = Ctx::new(Suite::PhaseSpace, None);
            g.count("e4_total_dim", e4, E4_TOTAL);
            by_suite.entry(Suite::PhaseSpace).or_default().extend(g.out);
        }
        if cfg.enabled(Suite::States) {
            let mut g = Ctx::new(Suite::States, None);
            g.structural("hadamard", "microlocal property of the covariances; not decidable at finite harmonic truncation");
            by_suite.entry(Suite::States).or_default().extend(g.out);
        }
        if cfg.enabled(Suite::Symmetry) {
            let mut g = Ctx::new(Suite::Symmetry, None);
            g.structural("rotation_invariance", "covariances are built sector by sector, so rotations of the sphere act trivially");
            g.structural("boost_invariance", "needs generators mixing sectors; not represented");
            by_suite.entry(Suite::Symmetry).or_default().extend(g.out);
        }
        if cfg.enabled(Suite::Oracle) {
            let t = Instant::now();
            let mut r = collocation_records(cfg.k_max, &th);
            stamp(&mut r, clock(t));
            by_suite.entry(Suite::Oracle).or_default().extend(r);
        }
    }

    let mut records = Vec::new();
    for suite in cfg.suites.iter() {
        let r = by_suite.remove(suite).unwrap_or_default();
        records.extend(r);
    }
    Report::new(cfg.clone(), records)
}
