use crate::args::*;
use crate::output::{jnum, num, Artifact};
use crate::CliError;
use npp_core::analysis::{binary_entropy, plan_theorem_main, two_ogp_rho, PlanReport};
use npp_core::gibbs_mcmc::{
    censored_median, escape_time_from, few_log_ratio, gibbs_exact_capped, run_chain_with, CensoredMedian, RecordOptions,
};
use npp_core::landscape::{
    check_pair_band, count_local_optima_capped, enumerate_states_capped, find_mtuple_with, predicted_threshold,
    stability_curve, stability_profile, MtupleOptions, OverlapBand, StateSet, DEFAULT_ENUM_MAX_N,
    DEFAULT_LOCAL_OPT_MAX_N,
};
use npp_core::gibbs_mcmc::DEFAULT_GIBBS_MAX_N;
use npp_core::rng::seed_stream;
use npp_core::solvers::{solve_exact_capped, solve_greedy, Algorithm, DEFAULT_EXACT_MAX_N};
use npp_core::{CorrelatedEnsemble, Instance, SpinConfig};
use rayon::prelude::*;
use serde_json::{json, Value};

/// Hard ceiling used by `--force`; the core functions clamp further.
const FORCED_MAX_N: usize = 64;

struct Ctx<'a> {
    cli: &'a Cli,
    name: &'static str,
}

impl Ctx<'_> {
    fn cap(&self, default: usize) -> usize {
        if self.cli.force {
            FORCED_MAX_N
        } else {
            default
        }
    }

    fn warn_forced(&self, n: usize, default: usize) {
        if self.cli.force && n > default {
            eprintln!(
                "npp-lab: warning: --force runs {} at n = {n} beyond its guard of {default}",
                self.name
            );
        }
    }

    fn artifact(&self, default: Format, params: Value) -> Artifact {
        let format = self.cli.format.unwrap_or(default);
        Artifact {
            format,
            config: json!({
                "subcommand": self.name,
                "master_seed": self.cli.seed,
                "force": self.cli.force,
                "format": match format { Format::Csv => "csv", Format::Json => "json" },
                "params": params,
            }),
            meta: Vec::new(),
            columns: Vec::new(),
            rows: Vec::new(),
            result: Value::Null,
        }
    }
}

pub fn dispatch(cli: &Cli) -> Result<Artifact, CliError> {
    let name = match &cli.command {
        Command::Solve(_) => "solve",
        Command::Stability(_) => "stability",
        Command::StabilityProfile(_) => "stability-profile",
        Command::LandscapeEnumerate(_) => "landscape-enumerate",
        Command::OgpPairs(_) => "ogp-pairs",
        Command::OgpMtuple(_) => "ogp-mtuple",
        Command::LocalOptima(_) => "local-optima",
        Command::Gibbs(_) => "gibbs",
        Command::McmcEscape(_) => "mcmc-escape",
        Command::Plan(_) => "plan",
    };
    let ctx = Ctx { cli, name };
    match &cli.command {
        Command::Solve(a) => solve(&ctx, a),
        Command::Stability(a) => stability(&ctx, a),
        Command::StabilityProfile(a) => profile(&ctx, a),
        Command::LandscapeEnumerate(a) => enumerate(&ctx, a),
        Command::OgpPairs(a) => ogp_pairs(&ctx, a),
        Command::OgpMtuple(a) => ogp_mtuple(&ctx, a),
        Command::LocalOptima(a) => local_optima(&ctx, a),
        Command::Gibbs(a) => gibbs(&ctx, a),
        Command::McmcEscape(a) => mcmc_escape(&ctx, a),
        Command::Plan(a) => plan(&ctx, a),
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("library types serialize")
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn require_trials(trials: usize) -> Result<(), CliError> {
    if trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    Ok(())
}

/// The instance from `--instance`, else generated with the master seed.
fn load_instance(a: &InstanceArgs, seed: u64) -> Result<(Instance, Value), CliError> {
    match (&a.instance, a.n) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)?;
            let x = Instance::from_json(&text)?;
            let params = json!({"instance": path.display().to_string(), "n": x.n(), "mode": x.mode().to_string()});
            Ok((x, params))
        }
        (None, Some(n)) => {
            let x = Instance::generate(n, seed, a.mode)?;
            Ok((x, json!({"n": n, "mode": a.mode.to_string()})))
        }
        (None, None) => Err(usage("either --n or --instance is required")),
    }
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

fn solve(ctx: &Ctx, a: &SolveArgs) -> Result<Artifact, CliError> {
    let (x, params) = load_instance(&a.instance, ctx.cli.seed)?;
    let rng_seed = a.rng_seed.unwrap_or_else(|| seed_stream(ctx.cli.seed, 1));
    let rec = match a.algo {
        Algorithm::Exact => {
            ctx.warn_forced(x.n(), DEFAULT_EXACT_MAX_N);
            solve_exact_capped(&x, ctx.cap(DEFAULT_EXACT_MAX_N))?
        }
        Algorithm::Greedy => solve_greedy(&x, &SpinConfig::all_plus(x.n()), rng_seed)?,
        other => other.run(&x, rng_seed)?,
    };
    let params = merge(params, json!({"algo": a.algo, "rng_seed": rng_seed}));
    let mut art = ctx.artifact(Format::Json, params);
    art.columns = vec!["n", "algo", "sigma", "raw", "normalized", "log2_normalized", "raw_exact"];
    art.rows.push(vec![
        x.n().to_string(),
        a.algo.to_string(),
        rec.sigma.to_hex(),
        num(rec.raw),
        num(rec.normalized),
        num(rec.log2_normalized),
        rec.raw_exact.map(|v| v.to_string()).unwrap_or_default(),
    ]);
    art.result = to_value(&rec);
    Ok(art)
}

fn stability_params(a: &StabilityArgs) -> Value {
    json!({"n": a.n, "rho": a.rho.0, "trials": a.trials, "algo": a.algo})
}

fn stability(ctx: &Ctx, a: &StabilityArgs) -> Result<Artifact, CliError> {
    let c = stability_curve(a.n, &a.rho.0, a.trials, a.algo, ctx.cli.seed)?;
    let mut art = ctx.artifact(Format::Csv, stability_params(a));
    art.meta = vec![
        ("predicted_threshold".into(), jnum(c.predicted_threshold)),
        ("crossing_0.5".into(), c.crossing(0.5).map(jnum).unwrap_or(Value::Null)),
    ];
    art.columns = vec!["rho", "tau", "mean_overlap", "stderr", "trials"];
    for i in 0..c.rho_grid.len() {
        art.rows.push(vec![
            num(c.rho_grid[i]),
            num(c.tau[i]),
            num(c.mean_overlap[i]),
            num(c.stderr[i]),
            c.trials.to_string(),
        ]);
    }
    art.result = to_value(&c);
    Ok(art)
}

fn profile(ctx: &Ctx, a: &StabilityArgs) -> Result<Artifact, CliError> {
    let p = stability_profile(a.n, &a.rho.0, a.trials, a.algo, ctx.cli.seed)?;
    let mut art = ctx.artifact(Format::Csv, stability_params(a));
    art.meta = vec![("predicted_threshold".into(), jnum(predicted_threshold(a.n)))];
    art.columns = vec!["rho", "tau", "mean_sq_distance", "mean_hamming", "trials"];
    for r in &p.rows {
        art.rows.push(vec![
            num(r.rho),
            num(r.tau),
            num(r.mean_sq_distance),
            num(r.mean_hamming),
            r.trials.to_string(),
        ]);
    }
    art.result = to_value(&p);
    Ok(art)
}

fn enumerate_with(ctx: &Ctx, x: &Instance, e_n: f64) -> Result<StateSet, CliError> {
    ctx.warn_forced(x.n(), DEFAULT_ENUM_MAX_N);
    Ok(enumerate_states_capped(x, e_n, ctx.cap(DEFAULT_ENUM_MAX_N))?)
}

fn enumerate(ctx: &Ctx, a: &EnumerateArgs) -> Result<Artifact, CliError> {
    let (x, params) = load_instance(&a.instance, ctx.cli.seed)?;
    let s = enumerate_with(ctx, &x, a.en)?;
    let mut art = ctx.artifact(Format::Csv, merge(params, json!({"en": a.en})));
    art.meta = vec![
        ("threshold".into(), jnum(s.threshold)),
        ("states".into(), json!(s.len())),
    ];
    art.columns = vec!["sigma", "energy", "log2_energy"];
    for (sigma, e) in s.states.iter().zip(&s.energies) {
        art.rows.push(vec![sigma.to_hex(), num(*e), num(e.log2())]);
    }
    art.result = to_value(&s);
    Ok(art)
}

fn ogp_pairs(ctx: &Ctx, a: &PairArgs) -> Result<Artifact, CliError> {
    require_trials(a.trials)?;
    let n = a.n;
    let e_n = match (a.en, a.eps) {
        (Some(e), _) => e,
        (None, Some(eps)) => eps * n as f64,
        (None, None) => return Err(usage("ogp-pairs needs --en or --eps")),
    };
    let lo = match (a.lo, a.eps) {
        (Some(lo), _) => lo,
        (None, Some(eps)) => two_ogp_rho(eps)?,
        (None, None) => return Err(usage("ogp-pairs needs --lo or --eps")),
    };
    let hi = a.hi.unwrap_or((n as f64 - 2.0) / n as f64);
    let band = OverlapBand::new(lo, hi, a.signed)?;
    let rows: Vec<(u64, usize, Vec<npp_core::landscape::WitnessPair>)> = (0..a.trials as u64)
        .into_par_iter()
        .map(|t| {
            let seed = seed_stream(ctx.cli.seed, t);
            let x = Instance::generate(n, seed, a.mode)?;
            let s = enumerate_with(ctx, &x, e_n)?;
            let w = check_pair_band(&s, &band)?;
            Ok((seed, s.len(), w))
        })
        .collect::<Result<_, CliError>>()?;
    let params = json!({
        "n": n, "trials": a.trials, "mode": a.mode.to_string(), "en": e_n, "eps": a.eps,
        "lo": lo, "hi": hi, "signed": a.signed, "max_witnesses": a.max_witnesses,
    });
    let mut art = ctx.artifact(Format::Csv, params);
    let total: usize = rows.iter().map(|r| r.2.len()).sum();
    let mean = total as f64 / a.trials as f64;
    art.meta = vec![
        ("mean_pairs".into(), jnum(mean)),
        ("log2_mean_pairs_per_n".into(), jnum(mean.log2() / n as f64)),
    ];
    if let Some(eps) = a.eps {
        let bound = 1.0 + binary_entropy((1.0 - lo) / 2.0)? - 2.0 * eps;
        art.meta.push(("first_moment_exponent".into(), jnum(bound)));
    }
    art.columns = vec!["trial", "seed", "states", "pairs"];
    let mut trials_json = Vec::new();
    for (t, (seed, states, w)) in rows.iter().enumerate() {
        art.rows.push(vec![t.to_string(), seed.to_string(), states.to_string(), w.len().to_string()]);
        let kept: Vec<Value> = w.iter().take(a.max_witnesses).map(to_value).collect();
        trials_json.push(json!({"trial": t, "seed": seed, "states": states, "pairs": w.len(), "witnesses": kept}));
    }
    art.result = Value::Array(trials_json);
    Ok(art)
}

fn ogp_mtuple(ctx: &Ctx, a: &MtupleArgs) -> Result<Artifact, CliError> {
    require_trials(a.trials)?;
    let n = a.n;
    let m = a.m;
    let e_n = a.en.unwrap_or((n as f64).sqrt());
    let (lo, hi) = match (a.lo, a.hi, a.beta) {
        (Some(lo), Some(hi), _) => (lo, hi),
        (None, None, Some(beta)) => (beta - a.eta, beta),
        _ => return Err(usage("ogp-mtuple needs --beta, or both --lo and --hi")),
    };
    let band = OverlapBand::new(lo, hi, !a.unsigned)?;
    let taus = if a.taus.is_empty() { vec![0.0; m] } else { a.taus.clone() };
    if taus.len() != m {
        return Err(usage(format!("--taus has {} values for m = {m}", taus.len())));
    }
    let opts = MtupleOptions {
        distinct: !a.allow_repeats,
    };
    let rows: Vec<(u64, Vec<usize>, Option<npp_core::landscape::OgpWitness>)> = (0..a.trials as u64)
        .into_par_iter()
        .map(|t| {
            let seed = seed_stream(ctx.cli.seed, t);
            let ens = CorrelatedEnsemble::generate(n, m, seed, a.mode)?;
            let mut sets: Vec<StateSet> = Vec::with_capacity(m);
            for (i, &tau) in taus.iter().enumerate() {
                // Members with τ = 0 share X₀; enumerate it once.
                let reuse = (tau == 0.0).then(|| taus[..i].iter().position(|&u| u == 0.0)).flatten();
                let s = match reuse {
                    Some(j) => sets[j].clone(),
                    None => enumerate_with(ctx, &ens.interpolate(i + 1, tau)?, e_n)?.with_tau(tau),
                };
                sets.push(s);
            }
            let sizes = sets.iter().map(|s| s.len()).collect();
            Ok((seed, sizes, find_mtuple_with(&sets, &band, m, opts)?))
        })
        .collect::<Result<_, CliError>>()?;
    let params = json!({
        "n": n, "trials": a.trials, "mode": a.mode.to_string(), "en": e_n, "m": m,
        "lo": lo, "hi": hi, "signed": !a.unsigned, "taus": taus, "distinct": opts.distinct,
    });
    let mut art = ctx.artifact(Format::Csv, params);
    let found = rows.iter().filter(|r| r.2.is_some()).count();
    art.meta = vec![
        ("found".into(), json!(found)),
        ("success_rate".into(), jnum(found as f64 / a.trials as f64)),
    ];
    art.columns = vec!["trial", "seed", "states", "found"];
    let mut trials_json = Vec::new();
    for (t, (seed, sizes, w)) in rows.iter().enumerate() {
        let sizes_s: Vec<String> = sizes.iter().map(|s| s.to_string()).collect();
        art.rows.push(vec![t.to_string(), seed.to_string(), sizes_s.join(" "), w.is_some().to_string()]);
        trials_json.push(json!({"trial": t, "seed": seed, "states": sizes, "witness": w.as_ref().map(to_value)}));
    }
    art.result = Value::Array(trials_json);
    Ok(art)
}

fn local_optima(ctx: &Ctx, a: &LocalOptimaArgs) -> Result<Artifact, CliError> {
    require_trials(a.trials)?;
    let n = a.n;
    let e_n = match (a.en, a.eps) {
        (Some(e), _) => e,
        (None, Some(eps)) => eps * n as f64,
        (None, None) => return Err(usage("local-optima needs --en or --eps")),
    };
    ctx.warn_forced(n, DEFAULT_LOCAL_OPT_MAX_N);
    let cap = ctx.cap(DEFAULT_LOCAL_OPT_MAX_N);
    let counts: Vec<(u64, u64)> = (0..a.trials as u64)
        .into_par_iter()
        .map(|t| {
            let seed = seed_stream(ctx.cli.seed, t);
            let x = Instance::generate(n, seed, a.mode)?;
            Ok((seed, count_local_optima_capped(&x, e_n, cap)?))
        })
        .collect::<Result<_, CliError>>()?;
    let params = json!({"n": n, "trials": a.trials, "mode": a.mode.to_string(), "en": e_n, "eps": a.eps});
    let mut art = ctx.artifact(Format::Csv, params);
    let mean = counts.iter().map(|c| c.1 as f64).sum::<f64>() / a.trials as f64;
    let exponent = mean.log2() / n as f64;
    art.meta = vec![
        ("mean_count".into(), jnum(mean)),
        ("log2_mean_per_n".into(), jnum(exponent)),
        ("predicted_exponent".into(), jnum(1.0 - e_n / n as f64)),
    ];
    art.columns = vec!["trial", "seed", "count"];
    for (t, (seed, c)) in counts.iter().enumerate() {
        art.rows.push(vec![t.to_string(), seed.to_string(), c.to_string()]);
    }
    art.result = json!({
        "counts": counts.iter().map(|c| c.1).collect::<Vec<_>>(),
        "seeds": counts.iter().map(|c| c.0).collect::<Vec<_>>(),
    });
    Ok(art)
}

fn gibbs(ctx: &Ctx, a: &GibbsArgs) -> Result<Artifact, CliError> {
    let (x, params) = load_instance(&a.instance, ctx.cli.seed)?;
    let n = x.n();
    let beta = a.beta.unwrap_or(n as f64 * (n as f64 * a.eps).exp2());
    let rho = match a.rho {
        Some(r) => r,
        None => two_ogp_rho(a.eps)?,
    };
    ctx.warn_forced(n, DEFAULT_GIBBS_MAX_N);
    let star = solve_exact_capped(&x, ctx.cap(DEFAULT_EXACT_MAX_N))?.sigma;
    let g = gibbs_exact_capped(&x, beta, &star, rho, ctx.cap(DEFAULT_GIBBS_MAX_N))?;
    let (l1, l3) = few_log_ratio(&g);
    let params = merge(params, json!({"beta": beta, "eps": a.eps, "rho": rho}));
    let mut art = ctx.artifact(Format::Json, params);
    let m = &g.region_masses;
    art.meta = vec![
        ("log_z".into(), jnum(g.log_z)),
        ("sigma_star".into(), json!(star.to_hex())),
        ("mass_i1".into(), jnum(m.i1)),
        ("mass_i2".into(), jnum(m.i2)),
        ("mass_i2_bar".into(), jnum(m.i2_bar)),
        ("mass_i3".into(), jnum(m.i3)),
        ("mass_i3_bar".into(), jnum(m.i3_bar)),
        ("log_ratio_i1_i2".into(), jnum(l1)),
        ("log_ratio_i3_i2".into(), jnum(l3)),
    ];
    art.columns = vec!["q", "probability", "log_probability"];
    for (j, (p, lp)) in g.overlap_histogram.iter().zip(&g.log_overlap_histogram).enumerate() {
        let q = (2.0 * j as f64 - n as f64) / n as f64;
        art.rows.push(vec![num(q), num(*p), num(*lp)]);
    }
    art.result = to_value(&g);
    Ok(art)
}

fn mcmc_escape(ctx: &Ctx, a: &EscapeArgs) -> Result<Artifact, CliError> {
    require_trials(a.trials)?;
    if a.budget == 0 {
        return Err(usage("--budget must be at least 1"));
    }
    let n = a.n;
    let nf = n as f64;
    let betas = if a.betas.is_empty() {
        vec![0.0, nf, nf * (nf * a.eps / 2.0).exp2(), nf * (nf * a.eps).exp2()]
    } else {
        a.betas.clone()
    };
    let cap = ctx.cap(DEFAULT_EXACT_MAX_N);
    let ground: Vec<(u64, Instance, SpinConfig)> = (0..a.trials as u64)
        .into_par_iter()
        .map(|t| {
            let seed = seed_stream(ctx.cli.seed, t);
            let x = Instance::generate(n, seed, a.mode)?;
            let star = solve_exact_capped(&x, cap)?.sigma;
            Ok((seed, x, star))
        })
        .collect::<Result<_, CliError>>()?;
    if let Some(steps) = a.trace_steps {
        return mcmc_trace(ctx, a, &betas, &ground, steps);
    }
    let mut runs: Vec<Vec<Option<u64>>> = Vec::with_capacity(betas.len());
    for (b, &beta) in betas.iter().enumerate() {
        let times = ground
            .par_iter()
            .map(|(seed, x, star)| {
                let chain_seed = seed_stream(seed_stream(*seed, 1), b as u64);
                Ok(escape_time_from(x, beta, star, a.budget, chain_seed, a.kernel)?.escape_time)
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        runs.push(times);
    }
    let medians: Vec<CensoredMedian> = runs
        .iter()
        .map(|t| censored_median(t))
        .collect::<Result<_, _>>()?;
    let params = json!({
        "n": n, "trials": a.trials, "mode": a.mode.to_string(), "eps": a.eps,
        "betas": betas, "budget": a.budget, "kernel": a.kernel,
    });
    let mut art = ctx.artifact(Format::Csv, params);
    let median_text = |m: &CensoredMedian| match m {
        CensoredMedian::Value(v) => json!(v),
        CensoredMedian::Censored => json!("censored"),
    };
    art.meta = vec![(
        "median_escape_time".into(),
        Value::Array(medians.iter().map(median_text).collect()),
    )];
    art.columns = vec!["beta", "trial", "seed", "escape_time", "censored"];
    for (b, times) in runs.iter().enumerate() {
        for (t, time) in times.iter().enumerate() {
            art.rows.push(vec![
                num(betas[b]),
                t.to_string(),
                ground[t].0.to_string(),
                time.map(|v| v.to_string()).unwrap_or_default(),
                time.is_none().to_string(),
            ]);
        }
    }
    art.result = json!({
        "betas": betas,
        "medians": medians.iter().map(median_text).collect::<Vec<_>>(),
        "escape_times": runs,
        "seeds": ground.iter().map(|g| g.0).collect::<Vec<_>>(),
    });
    Ok(art)
}

fn mcmc_trace(
    ctx: &Ctx,
    a: &EscapeArgs,
    betas: &[f64],
    ground: &[(u64, Instance, SpinConfig)],
    steps: u64,
) -> Result<Artifact, CliError> {
    if a.trace_every == 0 {
        return Err(usage("--trace-every must be at least 1"));
    }
    let mut traces = Vec::with_capacity(betas.len());
    for (b, &beta) in betas.iter().enumerate() {
        let per_trial = ground
            .par_iter()
            .map(|(seed, x, star)| {
                let record = RecordOptions {
                    every: a.trace_every,
                    reference: Some(star.clone()),
                    visits: false,
                };
                let chain_seed = seed_stream(seed_stream(*seed, 2), b as u64);
                Ok(run_chain_with(x, beta, star, steps, chain_seed, &record, a.kernel)?)
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        traces.push(per_trial);
    }
    let params = json!({
        "n": a.n, "trials": a.trials, "mode": a.mode.to_string(), "eps": a.eps, "betas": betas,
        "kernel": a.kernel, "trace_steps": steps, "trace_every": a.trace_every,
    });
    let mut art = ctx.artifact(Format::Csv, params);
    art.columns = vec!["beta", "trial", "t", "energy", "overlap_with_star"];
    let mut result = Vec::new();
    for (b, per_trial) in traces.iter().enumerate() {
        for (t, tr) in per_trial.iter().enumerate() {
            let energies = tr.energy_trace.as_deref().unwrap_or_default();
            let overlaps = tr.overlap_trace.as_deref().unwrap_or_default();
            for ((step, e), (_, q)) in energies.iter().zip(overlaps) {
                art.rows.push(vec![num(betas[b]), t.to_string(), step.to_string(), num(*e), num(*q)]);
            }
            result.push(json!({"beta": betas[b], "trial": t, "trajectory": to_value(tr)}));
        }
    }
    art.result = Value::Array(result);
    Ok(art)
}

fn plan(ctx: &Ctx, a: &PlanArgs) -> Result<Artifact, CliError> {
    let params = json!({"n": a.n, "en": a.en, "eps": a.eps, "L": a.l});
    let sweep = a.n.len() > 1 || a.en.len() > 1;
    let mut art = ctx.artifact(if sweep { Format::Csv } else { Format::Json }, params);
    art.columns = vec![
        "n",
        "e_n",
        "eps",
        "L",
        "m",
        "beta",
        "eta",
        "c1_slack",
        "q",
        "log2_log2_t",
        "rho_prime",
        "log2_neg_log2_pf",
        "log2_neg_log2_pst",
        "step_stability_bound",
        "error",
    ];
    let mut reports: Vec<Value> = Vec::new();
    for &n in &a.n {
        for &e in &a.en {
            match plan_theorem_main(n, e, a.eps, a.l) {
                Ok(r) => {
                    art.rows.push(plan_row(&r));
                    reports.push(to_value(&r));
                }
                Err(err) if sweep => {
                    let mut row = vec![num(n), num(e), num(a.eps), num(a.l)];
                    row.extend(std::iter::repeat_n(String::new(), 10));
                    row.push(format!("\"{}\"", err.to_string().replace('"', "'")));
                    art.rows.push(row);
                    reports.push(json!({"n": n, "e_n": e, "error": err.to_string()}));
                }
                Err(err) => return Err(err.into()),
            }
        }
    }
    art.result = if sweep {
        Value::Array(reports)
    } else {
        reports.pop().unwrap_or(Value::Null)
    };
    Ok(art)
}

fn plan_row(r: &PlanReport) -> Vec<String> {
    let s = &r.schedule;
    vec![
        num(r.n),
        num(r.e_n),
        num(r.eps),
        num(r.l),
        num(s.m),
        num(s.beta),
        num(s.eta),
        num(r.c1_slack),
        num(r.q),
        num(r.log2_log2_t),
        num(r.rho_prime),
        num(r.log2_neg_log2_pf),
        num(r.log2_neg_log2_pst),
        num(r.step_stability_bound),
        String::new(),
    ]
}
