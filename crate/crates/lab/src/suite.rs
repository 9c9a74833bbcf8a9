//! The fourteen checks and the sweeps behind them.

use std::time::{Duration, Instant};

use anyhow::{bail, Result};
use cdlab_core::error_terms::{self, enumerate};
use cdlab_core::exp_sums::{self, Case, CaseAGuard, ConditionConstants, SumSpec};
use cdlab_core::exponents::{self, ExponentGrid};
use cdlab_core::first_spacing::{
    count_system_star, gq_norm_converged, CoefficientGrid, Resolution, SpacingConfig, SystemStarSpec,
};
use cdlab_core::numeric::{frac, gcd};
use cdlab_core::second_spacing::{self, enumerate_arcs, mod_inverse, pair_matrix, pair_matrix_search, x_vector};
use cdlab_core::PhaseFamily;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cache::LatticeCache;
use crate::config::{Command, ExperimentConfig};
use crate::output::{Assertion, Cell, RunReport, Table};
use crate::sweep::{self, SweepStatus};

pub const NAMES: [&str; 14] = [
    "theta_star",
    "q_of_x",
    "exponent_final",
    "side_inequalities",
    "algebra_identity",
    "exact_counts",
    "sawtooth_recomposition",
    "error_term_sizes",
    "system_star_counts",
    "gq_quadrature",
    "pair_matrices",
    "minor_arc_data",
    "middle_form_monotone",
    "case_two_reduction",
];

/// Generator for criterion `id`: one seed, one independent stream per criterion.
pub fn rng_for(seed: u64, id: u32) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(u64::from(id));
    r
}

pub struct Check {
    pub assertion: Assertion,
    pub tables: Vec<Table>,
}

fn check(id: u32, passed: bool, detail: String, tables: Vec<Table>) -> Check {
    Check { assertion: Assertion { id, name: NAMES[id as usize - 1].into(), passed, detail }, tables }
}

fn theta() -> f64 {
    exponents::theta_star(1e-14).expect("bracket has a sign change").theta_star
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

fn c1(_cfg: &ExperimentConfig) -> Result<Check> {
    let r = exponents::theta_star(1e-14)?;
    let mut best = Duration::MAX;
    for _ in 0..20 {
        let t = Instant::now();
        std::hint::black_box(exponents::theta_star(std::hint::black_box(1e-14))?);
        best = best.min(t.elapsed());
    }
    let err = (r.theta_star - 0.314_483_175_974_1).abs();
    let mut t = Table::new("theta_star", &["theta_star", "residual", "bracket_lo", "bracket_hi", "iterations"]);
    t.push(vec![r.theta_star.into(), r.residual.into(), r.bracket.0.into(), r.bracket.1.into(), r.iterations.into()]);
    Ok(check(
        1,
        err <= 1e-10 && best < Duration::from_millis(1),
        format!("theta* = {:.16}, |error| = {err:.1e}, best runtime {:.1} us", r.theta_star, best.as_secs_f64() * 1e6),
        vec![t],
    ))
}

fn exponent_table(cfg: &ExperimentConfig) -> Result<(ExponentGrid, Vec<f64>, Table)> {
    let grid = ExponentGrid::new(cfg.grid)?;
    let xs = grid.xs();
    let mut t = Table::new(
        "exponent_grid",
        &["x", "q", "exponent", "corollary_gap", "algebra_residual", "ineq1", "ineq1_consistent", "ineq2", "ineq2_consistent"],
    );
    for &x in &xs {
        let e = exponents::exponent_final(x)?;
        let a = exponents::check_ineq_1(x)?;
        let b = exponents::check_ineq_2(x)?;
        t.push(vec![
            x.into(),
            exponents::q_of_x(x)?.into(),
            e.into(),
            (exponents::corollary_exponent(x)? - e).into(),
            exponents::algebra_identity(x)?.into(),
            a.holds().into(),
            a.consistent().into(),
            b.holds().into(),
            b.consistent().into(),
        ]);
    }
    Ok((grid, xs, t))
}

fn c2(cfg: &ExperimentConfig) -> Result<Check> {
    let (grid, xs, t) = exponent_table(cfg)?;
    let qs: Vec<f64> = xs.iter().map(|&x| exponents::q_of_x(x)).collect::<Result<_, _>>()?;
    let q_lo = exponents::q_of_x(-0.375)?;
    let q_hi = exponents::q_of_x(grid.x_hi)?;
    let inc = strictly_increasing(&qs);
    Ok(check(
        2,
        (q_lo - 4.0).abs() <= 1e-12 && (4.29..=4.30).contains(&q_hi) && inc,
        format!("q(-3/8) = {q_lo}, q(-theta*) = {q_hi:.12}, increasing on {} points: {inc}", xs.len()),
        vec![t],
    ))
}

fn c3(cfg: &ExperimentConfig) -> Result<Check> {
    let grid = ExponentGrid::new(cfg.grid)?;
    let xs = grid.xs();
    let es: Vec<f64> = xs.iter().map(|&x| exponents::exponent_final(x)).collect::<Result<_, _>>()?;
    let lo = exponents::exponent_final(-0.375)?;
    let exact = exponents::exponent_at_lower_end_exact() == cdlab_core::numeric::rat(5, 16);
    let th = theta();
    let hi_gap = (exponents::exponent_final(-th)? - th).abs();
    let inc = strictly_increasing(&es);
    Ok(check(
        3,
        (lo - 0.3125).abs() <= 1e-12 && exact && hi_gap <= cfg.tol && inc,
        format!("E(-3/8) = {lo}, exact 5/16: {exact}, |E(-theta*) - theta*| = {hi_gap:.1e}, increasing: {inc}"),
        vec![],
    ))
}

fn c4(cfg: &ExperimentConfig) -> Result<Check> {
    let xs = ExponentGrid::new(cfg.grid)?.xs();
    let (mut fail1, mut fail2, mut inconsistent, mut nonzero) = (0, 0, 0, 0);
    for &x in &xs {
        let a = exponents::check_ineq_1(x)?;
        let b = exponents::check_ineq_2(x)?;
        fail1 += usize::from(!a.holds());
        fail2 += usize::from(!b.holds());
        inconsistent += usize::from(!a.consistent() || !b.consistent());
        nonzero += usize::from(!exponents::polynomial_identity_holds(x)?);
    }
    Ok(check(
        4,
        fail1 + fail2 + inconsistent + nonzero == 0,
        format!(
            "{} points: first fails {fail1}, second fails {fail2}, forms disagree {inconsistent}, polynomial defects {nonzero}",
            xs.len()
        ),
        vec![],
    ))
}

fn c5(cfg: &ExperimentConfig) -> Result<Check> {
    let xs = ExponentGrid::new(cfg.grid)?.xs();
    let (mut worst_res, mut worst_gap) = (0.0f64, 0.0f64);
    for &x in &xs {
        worst_res = worst_res.max(exponents::algebra_identity(x)?);
        worst_gap = worst_gap.max((exponents::corollary_exponent(x)? - exponents::exponent_final(x)?).abs());
    }
    Ok(check(
        5,
        worst_res < cfg.tol && worst_gap < cfg.tol,
        format!("max residual {worst_res:.2e}, max |corollary - final| {worst_gap:.2e} over {} points", xs.len()),
        vec![],
    ))
}

fn c6(cfg: &ExperimentConfig) -> Result<Check> {
    let start = Instant::now();
    const SMALL: usize = 10_000;
    let sieve = enumerate::divisor_sums_upto(SMALL);
    let div_bad = (1..=SMALL as u64).filter(|&x| error_terms::divisor_sum(x).ok() != Some(u128::from(sieve[x as usize]))).count();
    let mut rng = rng_for(cfg.seed, 6);
    let big: Vec<u64> = (0..100).map(|_| rng.random_range(1..=10_000_000u64)).collect();
    let big_bad = big
        .par_iter()
        .filter(|&&x| {
            let direct: u128 = (1..=x).map(|m| u128::from(x / m)).sum();
            error_terms::divisor_sum(x).ok() != Some(direct)
        })
        .count();
    let exhaustive = enumerate::lattice_counts_upto(SMALL);
    let lat_bad = (0..=SMALL as u64).filter(|&x| error_terms::lattice_count(x).ok() != Some(u128::from(exhaustive[x as usize]))).count();
    let secs = start.elapsed().as_secs_f64();
    let mut t = Table::new("random_divisor_checks", &["x", "divisor_sum"]);
    for &x in &big {
        t.push(vec![x.into(), error_terms::divisor_sum(x)?.into()]);
    }
    Ok(check(
        6,
        div_bad + big_bad + lat_bad == 0 && secs < 60.0,
        format!("mismatches: divisor {div_bad}/{SMALL}, random {big_bad}/100, lattice {lat_bad}/{}; {secs:.1} s", SMALL + 1),
        vec![t],
    ))
}

/// Error-term sweep with the cache from the config, if any.
pub fn error_terms_table(cfg: &ExperimentConfig) -> Result<(Table, SweepStatus)> {
    let xs = sweep::log_spaced(cfg.xmin, cfg.xmax, cfg.grid);
    if xs.is_empty() {
        bail!(crate::config::UsageError::new("xmax", "empty sweep range"));
    }
    match &cfg.cache {
        Some(path) => {
            let (mut cache, _) = LatticeCache::open(path, &mut rng_for(cfg.seed, 0))?;
            sweep::error_term_sweep(&xs, Some(&mut cache), cfg.stop_after)
        }
        None => sweep::error_term_sweep(&xs, None, cfg.stop_after),
    }
}

fn column(t: &Table, name: &str) -> Vec<f64> {
    let i = t.columns.iter().position(|c| c == name).expect("known column");
    t.rows
        .iter()
        .map(|r| match &r[i] {
            Cell::Float(v) => *v,
            Cell::Int(v) => *v as f64,
            _ => f64::NAN,
        })
        .collect()
}

fn incomplete(status: SweepStatus) -> Option<String> {
    match status {
        SweepStatus::Complete => None,
        SweepStatus::Stopped { done, total } => Some(format!("sweep stopped after {done} of {total} points")),
    }
}

fn c7(cfg: &ExperimentConfig, sweep: &(Table, SweepStatus)) -> Result<Check> {
    let (t, status) = sweep;
    if let Some(why) = incomplete(*status) {
        return Ok(check(7, false, why, vec![]));
    }
    let worst = |a: &str, b: &str| {
        column(t, a).iter().zip(column(t, b)).map(|(x, y)| (x - y).abs()).fold(0.0f64, f64::max)
    };
    let d = worst("delta", "delta_sawtooth");
    let r = worst("r_error", "r_sawtooth");
    let cancelling = worst("r_error", "r_sawtooth_cancelling");
    Ok(check(
        7,
        d <= 3.0 * cfg.margin && r <= 8.0 * cfg.margin,
        format!("max divisor gap {d:.3}, max circle gap {r:.3} (cancelling form {cancelling:.1}) over {} points", t.rows.len()),
        vec![],
    ))
}

fn c8(cfg: &ExperimentConfig, sweep: &(Table, SweepStatus)) -> Result<Check> {
    let (t, status) = sweep;
    if let Some(why) = incomplete(*status) {
        return Ok(check(8, false, why, vec![]));
    }
    let xs = column(t, "x");
    let d = column(t, "delta");
    let r = column(t, "r_error");
    let d_bad = xs.iter().zip(&d).filter(|(x, v)| v.abs() > x.sqrt() + 3.0 * cfg.margin).count();
    let r_bad = xs.iter().zip(&r).filter(|(x, v)| v.abs() > (8.0 * x.sqrt() + 8.0) * cfg.margin).count();
    let counts = enumerate::lattice_counts_upto(cfg.xmax as usize);
    let (mut hardy, mut at) = (0.0f64, 0u64);
    for (x, &c) in counts.iter().enumerate().skip(2) {
        let xf = x as f64;
        let v = (c as f64 - error_terms::circle_main_term(x as u64)).abs() / (xf * xf.ln()).powf(0.25);
        if v > hardy {
            (hardy, at) = (v, x as u64);
        }
    }
    let mut h = Table::new("hardy_ratio", &["xmax", "max_ratio", "argmax_x"]);
    h.push(vec![cfg.xmax.into(), hardy.into(), at.into()]);
    Ok(check(
        8,
        d_bad + r_bad == 0 && hardy >= 0.1,
        format!("bound violations: delta {d_bad}, R {r_bad}; max |R|/(X ln X)^(1/4) over X <= {} is {hardy:.4} at X = {at}", cfg.xmax),
        vec![h],
    ))
}

fn c9(cfg: &ExperimentConfig) -> Result<Check> {
    let start = Instant::now();
    let mut points = Vec::new();
    for k in [4u32, 8, 16, 32, 64] {
        let mut l = 1;
        while l < k {
            for eta in [1.0 / k as f64, 2.0 / k as f64] {
                for b1 in [0.0, 0.5, 1.0] {
                    for b2 in [0.0, 0.5, 1.0] {
                        points.push(SystemStarSpec::new(k, l, eta, b1, b2));
                    }
                }
            }
            l *= 2;
        }
    }
    let counts: Vec<u64> = points.par_iter().map(count_system_star).collect::<Result<_, _>>()?;
    let mut t = Table::new(
        "system_star",
        &["k", "l", "eta", "beta1", "beta2", "count", "upper", "count_over_upper", "vacuous", "diagonal"],
    );
    let (mut over, mut under, mut worst) = (0, 0, 0.0f64);
    for (s, &c) in points.iter().zip(&counts) {
        let (k, l, e) = (s.k as f64, s.l as f64, s.eta);
        let upper = 100.0
            * cfg.margin
            * k.powf(1.05)
            * l
            * (e.powf(2.0 * (s.beta1 + s.beta2)) * k * k * l + e.powf(2.0 * s.beta1) * k * k + e.powf(2.0 * s.beta2) * l * l);
        let diagonal = (s.k as u64 * s.l as u64).pow(2);
        over += usize::from(c as f64 > upper);
        under += usize::from(s.localization_vacuous() && c < diagonal);
        worst = worst.max(c as f64 / upper);
        t.push(vec![
            s.k.into(),
            s.l.into(),
            e.into(),
            s.beta1.into(),
            s.beta2.into(),
            c.into(),
            upper.into(),
            (c as f64 / upper).into(),
            s.localization_vacuous().into(),
            diagonal.into(),
        ]);
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(check(
        9,
        over == 0 && under == 0 && secs < 300.0,
        format!("{} points: above bound {over}, below diagonal {under}, max count/bound {worst:.3e}; {secs:.1} s", points.len()),
        vec![t],
    ))
}

fn c10(cfg: &ExperimentConfig) -> Result<Check> {
    let mut points = Vec::new();
    for k in [4u32, 8, 16] {
        for l in [1u32, 2, 4] {
            if l < k {
                points.push(SpacingConfig::new(k, l, 1.0 / k as f64, 4.0)?);
            }
        }
    }
    let mut t = Table::new("gq_norm", &["k", "l", "eta", "q", "gq_floor", "gq_doubled", "rel_change", "lower", "upper"]);
    let (mut out, mut unconverged, mut worst) = (0, 0, 0.0f64);
    for p in &points {
        let conv = gq_norm_converged(p, &CoefficientGrid::ones(p.k(), p.l()), &Resolution::floor(p))?;
        let (k, l) = (p.k() as f64, p.l() as f64);
        let lower = 0.1 / cfg.margin * (k * l).sqrt();
        let upper = 10.0 * cfg.margin * k.powf(0.55) * l.sqrt();
        out += usize::from(!(lower..=upper).contains(&conv.fine));
        unconverged += usize::from(conv.rel_change() >= 0.01);
        worst = worst.max(conv.rel_change());
        t.push(vec![
            p.k().into(),
            p.l().into(),
            p.eta().into(),
            p.q().into(),
            conv.coarse.into(),
            conv.fine.into(),
            conv.rel_change().into(),
            lower.into(),
            upper.into(),
        ]);
    }
    Ok(check(
        10,
        out == 0 && unconverged == 0,
        format!("{} points: outside bounds {out}, doubling change >= 1% {unconverged}, max change {worst:.2e}", points.len()),
        vec![t],
    ))
}

fn c11(_cfg: &ExperimentConfig) -> Result<Check> {
    let fracs: Vec<(i64, u64)> =
        (1..=20u64).flat_map(|r| (0..r as i64).filter(move |&a| gcd(a as u64, r) == 1).map(move |a| (a, r))).collect();
    let (mut pairs, mut mismatch, mut invariant) = (0u64, 0u64, 0u64);
    for &(a, r) in &fracs {
        for &(a1, r1) in &fracs {
            pairs += 1;
            let m = pair_matrix(a, r, a1, r1)?;
            mismatch += u64::from(pair_matrix_search(a, r, a1, r1) != Some(m));
            let rr1 = (r * r1) as i128;
            let g = m.gamma as i128;
            let ok = m.det() == 1 && m.apply(a, r as i64) == (a1 as i128, r1 as i128) && -rr1 < 2 * g && 2 * g <= rr1;
            invariant += u64::from(!ok);
        }
    }
    let arcs = enumerate_arcs(&PhaseFamily::Reciprocal, 32.0, 1e5, 8..17)?;
    let mut t = Table::new("gamma_audit", &["delta1", "pairs_checked", "violations"]);
    let mut violations = 0;
    for d1 in [0.01, 0.05, 0.1, 0.25, 0.49] {
        let parts: Vec<(u64, usize)> = (0..arcs.len())
            .into_par_iter()
            .step_by(64)
            .map(|s| second_spacing::gamma_audit(&arcs, d1, s..s + 64).map(|(c, bad)| (c, bad.len())))
            .collect::<Result<_, _>>()?;
        let (checked, bad) = parts.iter().fold((0, 0), |(c, b), (c1, b1)| (c + c1, b + b1));
        violations += bad;
        t.push(vec![d1.into(), checked.into(), bad.into()]);
    }
    Ok(check(
        11,
        mismatch == 0 && invariant == 0 && violations == 0,
        format!(
            "{pairs} fraction pairs: search mismatches {mismatch}, invariant failures {invariant}; gamma window violations {violations} over {} arcs",
            arcs.len()
        ),
        vec![t],
    ))
}

fn c12(_cfg: &ExperimentConfig) -> Result<Check> {
    let arcs = enumerate_arcs(&PhaseFamily::Reciprocal, 32.0, 1e5, 1..41)?;
    let mut t = Table::new("minor_arcs", &["a", "r", "m", "mu", "nu", "c", "kappa", "a_bar", "boundary"]);
    let (mut bad_nu, mut bad_kappa, mut bad_x, mut boundary) = (0, 0, 0, 0);
    for d in &arcs {
        if d.boundary {
            boundary += 1;
        } else {
            bad_nu += usize::from(d.nu.abs() > 1.0);
            bad_kappa += usize::from(!(0.0..1.0).contains(&d.kappa));
        }
        // the vector from its definition
        let r = d.r as f64;
        let a_bar = mod_inverse(d.a, d.r)?;
        let s = (d.mu * r * r * r).sqrt();
        let want = [a_bar as f64 / r, frac((a_bar as i128 * d.c as i128).rem_euclid(d.r as i128) as f64 / r), 1.0 / s, d.kappa / s];
        let got = x_vector(d)?.reduced;
        let close = want.iter().zip(got).all(|(w, g)| (w - g).abs() <= 1e-12 * w.abs().max(g.abs()).max(f64::MIN_POSITIVE));
        bad_x += usize::from(a_bar != d.a_bar || !close);
        t.push(vec![
            d.a.into(),
            d.r.into(),
            d.m.into(),
            d.mu.into(),
            d.nu.into(),
            d.c.into(),
            d.kappa.into(),
            d.a_bar.into(),
            d.boundary.into(),
        ]);
    }
    Ok(check(
        12,
        bad_nu + bad_kappa + bad_x == 0,
        format!("{} arcs ({boundary} boundary): |nu| > 1 {bad_nu}, kappa out of [0,1) {bad_kappa}, vector mismatches {bad_x}", arcs.len()),
        vec![t],
    ))
}

fn c13(cfg: &ExperimentConfig) -> Result<Check> {
    let m12 = 1e12f64.powf(0.45);
    let triples = [(10.0, 1e3, 1e6), (1e3, 1e5, 1e12), (m12 * 1e12f64.powf(-0.32), m12, 1e12), (1e4, 1e7, 1e16)];
    let n = cfg.grid;
    let ns: Vec<f64> = (0..n).map(|i| 2.0 * (5e5f64).powf(i as f64 / (n - 1) as f64)).collect();
    let mut failures = 0;
    let mut t = Table::new("middle_form", &["h", "m", "t", "q", "n_lo", "n_hi", "bound_lo", "bound_hi", "decreasing"]);
    for &(h, m, tt) in &triples {
        for q in [4.0, 4.125, 4.25, 4.375, 4.5] {
            let vals: Vec<f64> = ns.iter().map(|&nn| exp_sums::bound_middle_form(h, m, tt, q, nn)).collect::<Result<_, _>>()?;
            let dec = vals.windows(2).all(|w| w[1] < w[0]);
            failures += usize::from(!dec);
            t.push(vec![h.into(), m.into(), tt.into(), q.into(), ns[0].into(), ns[n - 1].into(), vals[0].into(), vals[n - 1].into(), dec.into()]);
        }
    }
    Ok(check(
        13,
        failures == 0,
        format!("{} (H, M, T, q) curves over {n} values of N in [2, 1e6]: not strictly decreasing {failures}", triples.len() * 5),
        vec![t],
    ))
}

fn c14(cfg: &ExperimentConfig) -> Result<Check> {
    let th = theta();
    let tt = 1e12f64;
    let consts = ConditionConstants::new([16.0, 16.0, 20.0, 192.0, 3.0], 1.0)?;
    let mut rng = rng_for(cfg.seed, 14);
    let mut t = Table::new("case_two", &["x", "m_exponent", "h", "m", "case_b", "window"]);
    let (mut draws, mut bad) = (0u64, 0);
    let cap = cfg.samples as u64 * 10_000;
    while t.rows.len() < cfg.samples {
        if draws >= cap {
            return Ok(check(14, false, format!("only {} admissible points in {draws} draws", t.rows.len()), vec![t]));
        }
        draws += 1;
        let x = rng.random_range((2.0 * th - 1.0)..=-th);
        let mu = rng.random_range(0.0..=0.5);
        let m = tt.powf(mu);
        let h = m * tt.powf(x);
        let r = exp_sums::case_two_reduction(h, m, tt, th, &consts);
        if !r.applies() {
            continue;
        }
        bad += usize::from(!r.holds());
        t.push(vec![x.into(), mu.into(), h.into(), m.into(), r.case_b.into(), r.window.into()]);
    }
    Ok(check(
        14,
        bad == 0,
        format!("{} admissible points from {draws} draws at T = 1e12: violations {bad}", t.rows.len()),
        vec![t],
    ))
}

/// `|S|` next to the elementary and final bounds on a small grid.
pub fn expsum_table(cfg: &ExperimentConfig) -> Result<Table> {
    let th = theta();
    let consts = ConditionConstants::default();
    let mut t = Table::new(
        "expsum",
        &["h", "m", "t", "q", "abs_s", "simple_bound", "final_bound", "case_label", "degenerate_flag"],
    );
    for tt in [1e4f64, 1e5, 1e6] {
        for mu in [0.4, 0.45, 0.5] {
            for x in [-0.375, -0.35, -th] {
                let m = tt.powf(mu);
                let h = (m * tt.powf(x)).max(1.0);
                let q = exponents::q_of_x(x)?;
                let s = exp_sums::eval_s(&SumSpec::new(h, m, tt, PhaseFamily::Reciprocal)?).value.norm();
                let simple = exp_sums::simple_bound(h, m, tt)?.full;
                let fin = h * exp_sums::bound_final_form(h, m, tt, q)? * tt.powf(cfg.eps);
                let labels = exp_sums::classify_case(h, m, tt, &consts, CaseAGuard::Symmetric);
                let case = if labels.a { Some(Case::A) } else if labels.b { Some(Case::B) } else { None };
                let degenerate = match case {
                    Some(c) => exp_sums::derive_params(h, m, tt, c, &consts, CaseAGuard::Symmetric)?.degenerate,
                    None => false,
                };
                t.push(vec![h.into(), m.into(), tt.into(), q.into(), s.into(), simple.into(), fin.into(), labels.label().into(), degenerate.into()]);
            }
        }
    }
    Ok(t)
}

/// θ*-curve rows `(x, f, g, f + x)`.
pub fn curve_table() -> Result<Table> {
    let mut t = Table::new("exponent_curve", &["x", "f", "g", "f_plus_x"]);
    for r in exponents::export_curve(-0.375, -0.3, 751)? {
        t.push(vec![r.x.into(), r.f.into(), r.g.into(), r.f_plus_x.into()]);
    }
    Ok(t)
}

/// Run criterion `id` alone.
pub fn criterion(id: u32, cfg: &ExperimentConfig) -> Result<Check> {
    match id {
        1 => c1(cfg),
        2 => c2(cfg),
        3 => c3(cfg),
        4 => c4(cfg),
        5 => c5(cfg),
        6 => c6(cfg),
        7 => c7(cfg, &error_terms_table(cfg)?),
        8 => c8(cfg, &error_terms_table(cfg)?),
        9 => c9(cfg),
        10 => c10(cfg),
        11 => c11(cfg),
        12 => c12(cfg),
        13 => c13(cfg),
        14 => c14(cfg),
        _ => bail!("no criterion {id}"),
    }
}

/// Run `ids` in order, handing each result to `each` as it finishes. The
/// error-term sweep is computed once and leads the returned tables.
pub fn run_criteria(ids: &[u32], cfg: &ExperimentConfig, mut each: impl FnMut(&Assertion)) -> Result<(Vec<Assertion>, Vec<Table>)> {
    let mut assertions = Vec::new();
    let mut tables = Vec::new();
    let sweep = if ids.contains(&7) || ids.contains(&8) { Some(error_terms_table(cfg)?) } else { None };
    for &id in ids {
        let c = match (id, &sweep) {
            (7, Some(s)) => c7(cfg, s)?,
            (8, Some(s)) => c8(cfg, s)?,
            _ => criterion(id, cfg)?,
        };
        each(&c.assertion);
        assertions.push(c.assertion);
        tables.extend(c.tables);
    }
    if let Some((t, _)) = sweep {
        tables.insert(0, t);
    }
    Ok((assertions, tables))
}

pub fn run_suite(cmd: Command, cfg: &ExperimentConfig, each: impl FnMut(&Assertion)) -> Result<RunReport> {
    let start = Instant::now();
    let (assertions, mut tables) = run_criteria(&cmd.criteria(), cfg, each)?;
    if matches!(cmd, Command::Expsum | Command::VerifyAll) {
        tables.push(expsum_table(cfg)?);
    }
    if matches!(cmd, Command::Exponents | Command::VerifyAll) {
        tables.push(curve_table()?);
    }
    Ok(RunReport::new(cmd.name(), cfg.clone(), assertions, tables, start.elapsed().as_secs_f64()))
}
