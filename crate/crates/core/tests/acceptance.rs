//! Acceptance run at k_max = 12. Prints one PASS/FAIL line per criterion and
//! exits non-zero unless the failing items are exactly the known ones.

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dsvac_core::calderon::{calderon, calderon_invertible, calderon_invertible_with, kernel_data, lorentzify, pair_distance, q_adjoint_residual, ProjectorPair, Source};
use dsvac_core::cauchy_ops::{charge_forms, lorentz_k_blocks, Layout, Theory};
use dsvac_core::linalg::{null_space, CVec};
use dsvac_core::maxwell::{self, MaxwellState, MaxwellSubspace};
use dsvac_core::phase_space::{charge_kernel_check, direct_sum, SubspaceName, RANK_TOL};
use dsvac_core::radial_ode::dynamics::{charge_drift, intertwining_residual, trace_fixing_dynamic, Intertwiner};
use dsvac_core::radial_ode::OperatorId;
use dsvac_core::sector_algebra::harmonic::harmonic_oracle;
use dsvac_core::sector_algebra::{enumerate_sectors, Family, SectorLabel};
use dsvac_core::state_verify::{
    build_covariances, full_invariance, positivity_report, strong_invariance_witness, u_alpha_unitarity, weak_invariance, SectorState, Variant,
};

const K_MAX: u32 = 12;
const DYNAMICS_K_MAX: u32 = 8;
const HARMONIC_K_MAX: u32 = 3;

const SPECTRUM_TOL: f64 = 1e-10;
const PROJECTOR_SUM_TOL: f64 = 1e-10;
const IDEMPOTENT_TOL: f64 = 1e-9;
const Q_ADJOINT_TOL: f64 = 1e-9;
const QUOTIENT_TOL: f64 = 1e-9;
const TRANSVERSALITY_MIN: f64 = 1e-6;
const SPAN_TOL: f64 = 1e-9;
const KERNEL_ANGLE_TOL: f64 = 1e-10;
const SIGN_TOL: f64 = 1e-9;
const SUM_MARGIN: f64 = 1e-6;
const INVARIANCE_TOL: f64 = 1e-9;
const WITNESS_MIN: f64 = 1e-3;
const SUM_RULE_TOL: f64 = 1e-10;
const UNITARITY_TOL: f64 = 1e-12;
const DYNAMICS_TOL: f64 = 1e-8;
const PROFILE_TOL: f64 = 1e-8;
const COLLOCATION_TOL: f64 = 1e-9;
const COLLOCATION_NODES: usize = 40;
const COLLOCATION_SAMPLES: usize = 5;
const COLLOCATION_SEED: u64 = 0x5eed_d510;
const ALPHAS: [f64; 2] = [0.3, 1.0];
const TIMES: [f64; 8] = [-2.0, -1.5, -1.0, -0.5, 0.5, 1.0, 1.5, 2.0];
const INTERTWINING_TIME: f64 = 0.7;

/// Items that fail at this truncation, as (criterion, item). Both come from
/// the pure-gauge E_TT mode of Scalar(1) lying outside the gauge subspace
/// built from the q-orthogonal of the Killing data.
const KNOWN_FAILURES: &[(u32, &str)] = &[(4, "three_way@S1"), (6, "modified_full_invariance@S1")];

struct Criterion {
    id: u32,
    title: &'static str,
    checked: usize,
    failures: Vec<String>,
    worst: Vec<String>,
}

impl Criterion {
    fn new(id: u32, title: &'static str) -> Self {
        Self { id, title, checked: 0, failures: Vec::new(), worst: Vec::new() }
    }

    fn check(&mut self, item: impl Into<String>, ok: bool) {
        self.checked += 1;
        if !ok {
            self.failures.push(item.into());
        }
    }

    fn le(&mut self, item: impl Into<String>, value: f64, tol: f64) {
        let item = item.into();
        if value > tol {
            self.worst.push(format!("{item}={value:.3e}"));
        }
        self.check(item, value <= tol);
    }

    fn result<E: std::fmt::Display>(&mut self, item: impl Into<String>, r: Result<f64, E>, tol: f64) {
        let item = item.into();
        match r {
            Ok(v) => self.le(item, v, tol),
            Err(e) => {
                self.worst.push(format!("{item}: {e}"));
                self.check(item, false);
            }
        }
    }
}

fn tag(s: SectorLabel) -> String {
    format!("{}{}", s.family.short(), s.k)
}

fn probe(n: usize) -> CVec {
    CVec::from_iterator(n, (0..n).map(|j| Complex64::new(1.0 / (j as f64 + 1.0), 0.25 * ((j % 3) as f64 - 1.0))))
}

fn pair_checks(c: &mut Criterion, item: &str, p: &ProjectorPair) {
    let (sum, idem) = p.projector_residuals();
    c.le(format!("{item}.sum"), sum, PROJECTOR_SUM_TOL);
    c.le(format!("{item}.idempotent"), idem, IDEMPOTENT_TOL);
    let q = charge_forms(p.sector, p.op.rank()).q.to_complex();
    c.le(format!("{item}.q_adjoint"), q_adjoint_residual(&lorentzify(p), &q), Q_ADJOINT_TOL);
}

fn spectra() -> Criterion {
    let mut c = Criterion::new(1, "harmonic spectra and multiplicities");
    for k in 0..=HARMONIC_K_MAX {
        for family in [Family::Scalar, Family::Vector, Family::TensorTT] {
            let Ok(s) = SectorLabel::new(family, k) else { continue };
            let item = tag(s);
            match harmonic_oracle(k, family) {
                Ok(m) => {
                    let want = (k * (k + 2)) as f64 + [0.0, 1.0, 4.0][family as usize];
                    c.le(format!("{item}.eigenvalue"), (m.eigenvalue - want).abs() / want.max(1.0) + m.spread, SPECTRUM_TOL);
                    c.check(format!("{item}.multiplicity"), m.multiplicity as u64 == s.multiplicity());
                    if k == 1 && family != Family::TensorTT {
                        let pinned = if family == Family::Scalar { (3.0, 4) } else { (4.0, 6) };
                        c.check(format!("{item}.pinned"), want == pinned.0 && m.multiplicity == pinned.1);
                    }
                }
                Err(e) => c.result(item, Err::<f64, _>(e), 0.0),
            }
        }
    }
    c
}

fn calderon_identities(sectors: &[SectorLabel]) -> Criterion {
    let mut c = Criterion::new(2, "Calderon identities on every D2 sector");
    for &s in sectors {
        match calderon_invertible(s, OperatorId::D2) {
            Ok(p) => pair_checks(&mut c, &tag(s), &p),
            Err(e) => c.result(tag(s), Err::<f64, _>(e), 0.0),
        }
    }
    c
}

fn kernel_bookkeeping(sectors: &[SectorLabel]) -> Criterion {
    let mut c = Criterion::new(3, "D1 regular kernel in Scalar(1) and Vector(1), total 10, quotient identities");
    let mut total = 0;
    for &s in sectors {
        if Layout::new(s, 1).n == 0 {
            continue;
        }
        let item = tag(s);
        let dim = kernel_data(s, OperatorId::D1, Theory::Gravity).map_or(0, |k| k.ncols()) as u64 * s.multiplicity();
        let want = match (s.family, s.k) {
            (Family::Scalar, 1) => 4,
            (Family::Vector, 1) => 6,
            _ => 0,
        };
        c.check(format!("{item}.kernel={dim}"), dim == want);
        total += dim;
        match calderon(s, OperatorId::D1, Theory::Gravity, &Source::default()) {
            Ok(p) => {
                pair_checks(&mut c, &format!("{item}.D1"), &p);
                if let Some(q) = &p.quotient {
                    c.le(format!("{item}.isotropy"), q.isotropy_residual, QUOTIENT_TOL);
                }
            }
            Err(e) => c.result(item, Err::<f64, _>(e), 0.0),
        }
    }
    c.check(format!("total={total}"), total == 10);
    c
}

fn phase_space(states: &[(SectorLabel, SectorState)]) -> Criterion {
    let mut c = Criterion::new(4, "phase-space direct sums, E_TT_4 total 6, charge kernel is F_TT");
    let mut e4 = 0;
    for (s, st) in states {
        let ps = &st.phase;
        let item = tag(*s);
        let two = direct_sum(&ps.e_tt, &[&ps.e_tt_gauge, &ps.f_tt]);
        c.check(format!("gauge_plus_f@{item}"), two.holds(TRANSVERSALITY_MIN, SPAN_TOL));
        let three = direct_sum(&ps.e_tt, &[&ps.e_tt_gauge, &ps.f_tt_gauge, &ps.e_tt_4]);
        c.check(format!("three_way@{item}"), three.holds(TRANSVERSALITY_MIN, SPAN_TOL));
        let ck = charge_kernel_check(*s);
        c.check(format!("charge_kernel@{item}"), ck.holds(KERNEL_ANGLE_TOL));
        e4 += ps.e_tt_4.dim() as u64 * s.multiplicity();
    }
    c.check(format!("e4_total={e4}"), e4 == 6);
    c
}

fn state_signs(states: &[(SectorLabel, SectorState)]) -> Criterion {
    let mut c = Criterion::new(5, "Euclidean covariances: nonnegative on gauge modes, negative on E_TT_4");
    for (s, st) in states {
        let item = tag(*s);
        let g = positivity_report(st, SubspaceName::ETTGauge, Variant::Euclidean);
        c.check(format!("gauge@{item}"), g.nonnegative(SIGN_TOL));
        let n = positivity_report(st, SubspaceName::ETT4, Variant::Euclidean);
        if n.dim > 0 {
            c.check(format!("e4@{item}"), n.negative(SIGN_TOL, SUM_MARGIN));
        }
    }
    c
}

fn gauge_invariance(states: &[(SectorLabel, SectorState)]) -> Criterion {
    let mut c = Criterion::new(6, "weak invariance, strong invariance witness in Vector(1), modified state invariant and positive");
    let mut witnessed = false;
    for (s, st) in states {
        let item = tag(*s);
        c.le(format!("weak_invariance@{item}"), weak_invariance(st, Variant::Euclidean), INVARIANCE_TOL);
        if let Some(w) = strong_invariance_witness(st) {
            witnessed |= *s == SectorLabel::vector(1) && w >= WITNESS_MIN;
        }
        c.le(format!("modified_full_invariance@{item}"), full_invariance(st, Variant::Modified), INVARIANCE_TOL);
        c.check(format!("modified_positive@{item}"), positivity_report(st, SubspaceName::ETT, Variant::Modified).nonnegative(SIGN_TOL));
    }
    c.check("strong_witness@V1", witnessed);
    c
}

fn sum_rules(states: &[(SectorLabel, SectorState)]) -> Criterion {
    let mut c = Criterion::new(7, "sum rules for Euclidean and alpha states, U_alpha q-unitary");
    for (s, st) in states {
        let item = tag(*s);
        c.le(format!("euclidean@{item}"), build_covariances(st, Variant::Euclidean).sum_rule(&st.q_i, None), SUM_RULE_TOL);
        for a in ALPHAS {
            c.le(format!("alpha[{a}]@{item}"), build_covariances(st, Variant::Alpha(a)).sum_rule(&st.q_i, None), SUM_RULE_TOL);
            c.le(format!("unitary[{a}]@{item}"), u_alpha_unitarity(st, a), UNITARITY_TOL);
        }
    }
    c
}

fn dynamics(sectors: &[SectorLabel]) -> Criterion {
    let mut c = Criterion::new(8, "charge conservation, intertwining and trace fixing along evolution");
    for &s in sectors.iter().filter(|s| s.k <= DYNAMICS_K_MAX) {
        let item = tag(s);
        for op in [OperatorId::D2, OperatorId::D1, OperatorId::D0] {
            if Layout::new(s, op.rank()).n > 0 {
                c.result(format!("charge.{op:?}@{item}"), charge_drift(s, op, Theory::Gravity, &TIMES), DYNAMICS_TOL);
            }
        }
        for w in Intertwiner::ALL.into_iter().filter(|w| w.applies(s)) {
            let data = probe(Layout::new(s, w.ops().0.rank()).data_dim());
            c.result(format!("{}@{item}", w.name()), intertwining_residual(s, w, Theory::Gravity, &data, INTERTWINING_TIME), DYNAMICS_TOL);
        }
        if Layout::new(s, 0).n > 0 {
            let hg = null_space(&lorentz_k_blocks(s).k21_dagger, RANK_TOL);
            match trace_fixing_dynamic(s, &hg.column_sum(), INTERTWINING_TIME) {
                Ok(r) => c.le(format!("trace_fixing@{item}"), r.identity.max(r.commutation), DYNAMICS_TOL),
                Err(e) => c.result(format!("trace_fixing@{item}"), Err::<f64, _>(e), 0.0),
            }
        }
    }
    c
}

fn maxwell_twin() -> Criterion {
    let mut c = Criterion::new(9, "Maxwell twin: identities, phase space, E0, modified state");
    let mut e0 = 0;
    for s in maxwell::maxwell_sectors(K_MAX) {
        let item = tag(s);
        if Layout::new(s, 0).n > 0 {
            match calderon(s, OperatorId::D0, Theory::Maxwell, &Source::default()) {
                Ok(p) => pair_checks(&mut c, &format!("{item}.D0"), &p),
                Err(e) => c.result(item.clone(), Err::<f64, _>(e), 0.0),
            }
        }
        match calderon_invertible_with(s, OperatorId::D1, Theory::Maxwell, &Source::default()) {
            Ok(p) => pair_checks(&mut c, &format!("{item}.D1"), &p),
            Err(e) => c.result(item.clone(), Err::<f64, _>(e), 0.0),
        }
        let st = match MaxwellState::new(s) {
            Ok(st) => st,
            Err(e) => {
                c.result(item, Err::<f64, _>(e), 0.0);
                continue;
            }
        };
        c.result(format!("intertwining@{item}"), st.intertwining(&Source::default()), DYNAMICS_TOL);
        for (i, d) in st.phase.direct_sums().iter().enumerate() {
            c.check(format!("direct_sum{i}@{item}"), d.holds(TRANSVERSALITY_MIN, SPAN_TOL));
        }
        c.le(format!("charge_kernel@{item}"), st.phase.charge_kernel_distance(), KERNEL_ANGLE_TOL);
        c.le(format!("sum_rule@{item}"), st.sum_rule(Variant::Euclidean), SUM_RULE_TOL);
        c.le(format!("modified_sum_rule@{item}"), st.sum_rule(Variant::Modified), SUM_RULE_TOL);
        c.check(format!("gauge_nonnegative@{item}"), st.positivity(MaxwellSubspace::EGauge, Variant::Euclidean).nonnegative(SIGN_TOL));
        let n = st.positivity(MaxwellSubspace::E0, Variant::Euclidean);
        if n.dim > 0 {
            c.check(format!("e0_negative@{item}"), n.negative(SIGN_TOL, SUM_MARGIN));
        }
        c.le(format!("weak_invariance@{item}"), st.invariance(Variant::Euclidean, MaxwellSubspace::FGauge), INVARIANCE_TOL);
        c.check(format!("modified_positive@{item}"), st.positivity(MaxwellSubspace::E, Variant::Modified).nonnegative(SIGN_TOL));
        c.le(format!("modified_full_invariance@{item}"), st.invariance(Variant::Modified, MaxwellSubspace::F), INVARIANCE_TOL);
        if s.k <= DYNAMICS_K_MAX {
            c.result(format!("charge@{item}"), charge_drift(s, OperatorId::D1, Theory::Maxwell, &TIMES), DYNAMICS_TOL);
        }
        e0 += st.phase.e0.ncols() as u64 * s.multiplicity();
    }
    c.check(format!("e0_total={e0}"), e0 == 1);
    let times: Vec<f64> = (0..=40).map(|i| -2.0 + 0.1 * i as f64).collect();
    c.result("e0_profile", maxwell::e0_profile_deviation(&times), PROFILE_TOL);
    c
}

fn method_independence(sectors: &[SectorLabel]) -> Criterion {
    let mut c = Criterion::new(10, "Frobenius and collocation projectors agree on random sectors");
    let mut pick = sectors.to_vec();
    pick.shuffle(&mut ChaCha8Rng::seed_from_u64(COLLOCATION_SEED));
    for &s in pick.iter().take(COLLOCATION_SAMPLES) {
        let a = calderon_invertible(s, OperatorId::D2);
        let b = calderon_invertible_with(s, OperatorId::D2, Theory::Gravity, &Source::Collocation { nodes: COLLOCATION_NODES });
        match (a, b) {
            (Ok(a), Ok(b)) => c.le(tag(s), pair_distance(&a, &b), COLLOCATION_TOL),
            (Err(e), _) | (_, Err(e)) => c.result(tag(s), Err::<f64, _>(e), 0.0),
        }
    }
    c
}

fn main() -> ExitCode {
    let start = Instant::now();
    let sectors = enumerate_sectors(K_MAX);
    let mut states = Vec::new();
    let mut build = Criterion::new(0, "sector states");
    for &s in &sectors {
        match SectorState::new(s) {
            Ok(st) => states.push((s, st)),
            Err(e) => build.result(tag(s), Err::<f64, _>(e), 0.0),
        }
    }
    let criteria = [
        spectra(),
        calderon_identities(&sectors),
        kernel_bookkeeping(&sectors),
        phase_space(&states),
        state_signs(&states),
        gauge_invariance(&states),
        sum_rules(&states),
        dynamics(&sectors),
        maxwell_twin(),
        method_independence(&sectors),
    ];

    let mut unexpected = build.failures.clone();
    let mut seen_known = Vec::new();
    for c in &criteria {
        let verdict = if c.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {:>2}: {} ({} checks, {} failed)", c.id, c.title, c.checked, c.failures.len());
        for f in &c.failures {
            let known = KNOWN_FAILURES.contains(&(c.id, f.as_str()));
            println!("      {} {f}", if known { "known" } else { "NEW" });
            if known {
                seen_known.push((c.id, f.clone()));
            } else {
                unexpected.push(format!("criterion {}: {f}", c.id));
            }
        }
        for w in c.worst.iter().take(5) {
            println!("      measured {w}");
        }
    }
    let vanished: Vec<_> = KNOWN_FAILURES.iter().filter(|&&(id, f)| !seen_known.iter().any(|(i, g)| *i == id && g == f)).collect();
    println!("acceptance run took {:.1} s", start.elapsed().as_secs_f64());
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
    }
    if !vanished.is_empty() {
        println!("known failures no longer failing, update the list: {vanished:?}");
    }
    if unexpected.is_empty() && vanished.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
