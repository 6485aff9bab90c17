use std::path::{Path, PathBuf};

use clap::Parser;
use rayon::prelude::*;
use serde_json::json;

use domsplit::bounds::{self, FeasibilityParams};
use domsplit::domination::{
    construct_splitting, domination_test, verify_domination_inequality, DominationOptions, Verdict,
};
use domsplit::io::{load_cocycle, load_shift};
use domsplit::sample::{random_windows, Orbit, SampleSpec};
use domsplit::sft::{parse_symbols, DEFAULT_ENUMERATION_CAP};
use domsplit::shadowlab::{binom_bound_check, binom_bound_scan, error_terms, kalinin_gap, shadow_pair, singular_comparison};
use domsplit::spectrum::{classify, spectrum_report};
use domsplit::{CyclicWord, FiniteRangeCocycle, ShiftSpace};

use crate::args::*;
use crate::output::{parse_real, parse_real_list, Cell, CliResult, Meta, OutDir};
use crate::Outcome;

pub fn dispatch(command: Command) -> CliResult<Outcome> {
    match command {
        Command::Periodic(a) => periodic(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Dominate(a) => dominate(a),
        Command::Split(a) => split(a),
        Command::Shadow(a) => shadow(a),
        Command::Bounds(b) => bounds_command(b),
        Command::Run(a) => run_config(&a.config),
    }
}

fn load_system(s: &SystemArgs) -> CliResult<(ShiftSpace, FiniteRangeCocycle)> {
    let shift = load_shift(&s.shift)?;
    let cocycle = load_cocycle(&s.cocycle)?;
    cocycle.check_covers(&shift)?;
    Ok((shift, cocycle))
}

fn sample_spec(s: &SampleArgs) -> SampleSpec {
    SampleSpec::new(s.max_period, s.samples, s.seed)
}

fn periodic(a: PeriodicArgs) -> CliResult<Outcome> {
    let shift = load_shift(&a.shift)?;
    let out = OutDir::create(&a.out.out, Meta::new("periodic", &a, &[&a.shift], None)?)?;
    let mut csv = out.csv("periodic.csv", &["period", "point"])?;
    let mut periods = Vec::new();
    for n in 1..=a.max_period {
        let points = shift.enumerate_periodic(n, DEFAULT_ENUMERATION_CAP)?;
        for p in &points {
            csv.row(vec![n.into(), p.to_string().into()])?;
        }
        periods.push(json!({
            "period": n,
            "trace": shift.periodic_count(n),
            "points": points.iter().map(ToString::to_string).collect::<Vec<_>>(),
        }));
    }
    csv.finish()?;
    out.write_json(
        "periodic.json",
        &json!({
            "alphabet": shift.alphabet_size(),
            "closing_constant": shift.closing_constant(),
            "periods": periods,
        }),
    )?;
    println!("closing constant {}; {} periods enumerated", shift.closing_constant(), a.max_period);
    Ok(Outcome::Positive)
}

fn spectrum(a: SpectrumArgs) -> CliResult<Outcome> {
    let (shift, cocycle) = load_system(&a.system)?;
    let meta = Meta::new("spectrum", &a, &[&a.system.shift, &a.system.cocycle], None)?;
    let out = OutDir::create(&a.out.out, meta)?;
    let report = spectrum_report(&cocycle, &shift, a.max_period)?;
    let center = a.center.as_deref().map(parse_real_list).transpose()?;
    let classification = center
        .as_ref()
        .map(|c| classify(&report, c, a.delta))
        .transpose()?;
    let (mid, half_width) = report.tightest_center();

    let mut header = vec!["point".to_string(), "period".to_string()];
    header.extend((1..=report.dimension).map(|i| format!("exponent_{i}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = out.csv("spectrum.csv", &header)?;
    for o in &report.orbits {
        let mut row = vec![o.orbit.to_string().into(), o.orbit.period().into()];
        row.extend(o.exponents.iter().map(|&e| Cell::from(e)));
        csv.row(row)?;
    }
    csv.finish()?;
    out.write_json(
        "spectrum.json",
        &json!({
            "report": report,
            "center": center,
            "delta": a.delta,
            "classification": classification.map(|c| c.to_string()),
            "midpoint_center": mid,
            "midpoint_half_width": half_width,
        }),
    )?;
    for (i, iv) in report.intervals.iter().enumerate() {
        println!("lambda_{}: [{}, {}]", i + 1, iv.lo, iv.hi);
    }
    if let Some(c) = classification {
        println!("classification: {c}");
    }
    Ok(Outcome::Positive)
}

fn dominate(a: DominateArgs) -> CliResult<Outcome> {
    let (shift, cocycle) = load_system(&a.system)?;
    let meta = Meta::new("dominate", &a, &[&a.system.shift, &a.system.cocycle], Some(a.sample.seed))?;
    let out = OutDir::create(&a.out.out, meta)?;
    let cert = domination_test(&cocycle, &shift, a.k, a.depth, &sample_spec(&a.sample), &DominationOptions::default())?;

    let mut csv = out.csv("gap.csv", &["n", "log_max_gap", "max_gap", "envelope", "in_fit_range", "worst_orbit"])?;
    for (i, &lg) in cert.log_max_gap.iter().enumerate() {
        let n = i + 1;
        let in_fit = n >= cert.fit_range.0 && n <= cert.fit_range.1;
        csv.row(vec![
            n.into(),
            lg.into(),
            lg.exp().into(),
            (cert.c * cert.tau.powi(n as i32)).into(),
            (if in_fit { "yes" } else { "no" }).into(),
            cert.samples.orbit_labels[cert.worst_orbit[i]].clone().into(),
        ])?;
    }
    csv.finish()?;
    out.write_json("certificate.json", &json!({ "certificate": cert }))?;
    println!("{:?}: tau = {}, C = {}", cert.verdict, cert.tau, cert.c);
    Ok(match cert.verdict {
        Verdict::Dominated => Outcome::Positive,
        Verdict::NotDominated => Outcome::Negative,
    })
}

fn split(a: SplitArgs) -> CliResult<Outcome> {
    let (shift, cocycle) = load_system(&a.system)?;
    let seed = a.orbit.is_none().then_some(a.seed);
    let meta = Meta::new("split", &a, &[&a.system.shift, &a.system.cocycle], seed)?;
    let out = OutDir::create(&a.out.out, meta)?;
    let source = match &a.orbit {
        Some(text) => {
            let p = CyclicWord::new(parse_symbols(text)?)?;
            if !shift.is_admissible_cyclic(&p)? {
                return Err(format!("periodic orbit {p} is not admissible").into());
            }
            Orbit::Periodic(p)
        }
        None => {
            let reach = a.depth + cocycle.range() + 1;
            let mut w = random_windows(&shift, 1, reach, a.positions + a.steps + reach, a.seed);
            Orbit::Window(w.remove(0))
        }
    };
    let options = DominationOptions::default();
    let frames = (0..a.positions as isize)
        .into_par_iter()
        .map(|p| construct_splitting(&cocycle, &source, p, a.k, a.depth, &options))
        .collect::<Result<Vec<_>, _>>()?;
    let check = verify_domination_inequality(&cocycle, &source, &frames, a.steps, options.margin)?;

    let mut csv = out.csv(
        "residual.csv",
        &["position", "invariance_residual", "transversality", "log_gap_forward", "log_gap_backward"],
    )?;
    for f in &frames {
        csv.row(vec![
            f.position.into(),
            f.invariance_residual.into(),
            f.transversality.into(),
            f.log_gap_forward.into(),
            f.log_gap_backward.into(),
        ])?;
    }
    csv.finish()?;
    let mut csv = out.csv("inequality.csv", &["m", "log_ratio"])?;
    for (i, &r) in check.log_ratios.iter().enumerate() {
        csv.row(vec![(i + 1).into(), r.into()])?;
    }
    csv.finish()?;
    let worst = frames.iter().map(|f| f.invariance_residual).fold(0.0, f64::max);
    out.write_json(
        "frames.json",
        &json!({
            "source": source.label(),
            "max_invariance_residual": worst,
            "frames": frames,
            "inequality": check,
        }),
    )?;
    println!(
        "max invariance residual {worst}; inequality tau = {} ({})",
        check.tau,
        if check.pass { "PASS" } else { "FAIL" }
    );
    Ok(if check.pass { Outcome::Positive } else { Outcome::Negative })
}

fn shadow(a: ShadowArgs) -> CliResult<Outcome> {
    let (shift, cocycle) = load_system(&a.system)?;
    let meta = Meta::new("shadow", &a, &[&a.system.shift, &a.system.cocycle], Some(a.sample.seed))?;
    let out = OutDir::create(&a.out.out, meta)?;
    let spec = sample_spec(&a.sample);
    let lambda = match &a.lambda {
        Some(text) => parse_real(text)?,
        None => spectrum_report(&cocycle, &shift, a.sample.max_period)?.intervals[0].hi,
    };
    let n = a.radius;
    let r = cocycle.range();
    if n < r {
        return Err(format!("radius {n} is smaller than the cocycle range {r}").into());
    }

    let omega = random_windows(&shift, 1, n + r, n + r + 1, a.sample.seed).remove(0);
    let pair = shadow_pair(&omega, n, &shift)?;
    let reach = (n - r) as isize;
    let errors = error_terms(&cocycle, &pair, -reach..=reach)?;
    let comparison = singular_comparison(&cocycle, &shift, &omega, a.gamma, n)?;
    let growth = kalinin_gap(&cocycle, &shift, lambda, a.steps, &spec)?;
    let kappas = parse_real_list(&a.kappa)?;
    let binomial = kappas
        .iter()
        .flat_map(|&k| [binom_bound_check(k, a.n_max), binom_bound_scan(k, 2, a.n_max)])
        .collect::<Result<Vec<_>, _>>()?;

    let mut csv = out.csv("error_terms.csv", &["i", "norm", "bound", "status"])?;
    for e in &errors {
        csv.row(vec![e.i.into(), e.norm.into(), e.bound.into(), Cell::Pass(e.pass)])?;
    }
    csv.finish()?;
    let mut csv = out.csv(
        "singular_comparison.csv",
        &["i", "j", "sigma_target", "sigma_periodic", "difference", "bound", "status"],
    )?;
    for c in &comparison {
        csv.row(vec![
            c.i.into(),
            c.j.into(),
            c.sigma_target.into(),
            c.sigma_periodic.into(),
            c.difference.into(),
            c.bound.into(),
            Cell::Pass(c.pass),
        ])?;
    }
    csv.finish()?;
    let mut csv = out.csv("growth_excess.csv", &["n", "excess", "scaled_excess", "worst_orbit"])?;
    for (i, (&e, s)) in growth.excess.iter().zip(growth.scaled_excess()).enumerate() {
        let label = growth.orbit_labels[growth.worst_orbit[i]].clone();
        csv.row(vec![(i + 1).into(), e.into(), s.into(), label.into()])?;
    }
    csv.finish()?;
    let mut csv = out.csv("binomial.csv", &["kappa", "n_min", "n_max", "c_kappa", "argmax_n", "argmax_k", "pairs_above_one"])?;
    for b in &binomial {
        csv.row(vec![
            b.kappa.into(),
            b.n_min.into(),
            b.n_max.into(),
            b.c_kappa.into(),
            b.argmax.0.into(),
            b.argmax.1.into(),
            b.pairs_above_one.into(),
        ])?;
    }
    csv.finish()?;

    let errors_pass = errors.iter().all(|e| e.pass);
    let comparison_pass = comparison.iter().all(|c| c.pass);
    out.write_json(
        "shadow.json",
        &json!({
            "pair": pair,
            "lambda": lambda,
            "error_terms_pass": errors_pass,
            "singular_comparison_pass": comparison_pass,
            "growth": {
                "lambda": growth.lambda,
                "log_constant": growth.log_constant(),
                "scaled_excess_slope": growth.growth_slope()?,
            },
            "binomial": binomial,
        }),
    )?;
    println!(
        "error terms {}; singular comparison {}; growth slope {}",
        if errors_pass { "PASS" } else { "FAIL" },
        if comparison_pass { "PASS" } else { "FAIL" },
        growth.growth_slope()?
    );
    Ok(if errors_pass && comparison_pass { Outcome::Positive } else { Outcome::Negative })
}

fn bounds_command(b: BoundsCommand) -> CliResult<Outcome> {
    let name = match &b {
        BoundsCommand::GammaConstant(_) => "bounds gamma-constant",
        BoundsCommand::GammaNarrow(_) => "bounds gamma-narrow",
        BoundsCommand::DeltaMax(_) => "bounds delta-max",
        BoundsCommand::Sl2(_) => "bounds sl2",
        BoundsCommand::ConjugacyDelta(_) => "bounds conjugacy-delta",
        BoundsCommand::Threshold(_) => "bounds threshold",
    };
    let meta = Meta::new(name, &b, &[], None)?;
    let (dir, body, outcome) = match &b {
        BoundsCommand::GammaConstant(a) => {
            let p = FeasibilityParams {
                epsilon: a.epsilon,
                epsilon0: a.epsilon0,
                kappa: a.kappa,
                beta: a.beta,
                mu: parse_real(&a.mu)?,
                lambda: parse_real_list(&a.lambda)?,
            };
            let r = bounds::gamma_feasible_constant(&p, a.k)?;
            let outcome = verdict(r.feasible);
            (&a.out, json!({ "params": p, "k": a.k, "result": r }), outcome)
        }
        BoundsCommand::GammaNarrow(a) => {
            let (mu, l1, l2) = (parse_real(&a.mu)?, parse_real(&a.lambda1)?, parse_real(&a.lambda2)?);
            let r = bounds::gamma_feasible_narrow(a.beta, mu, l1, l2, a.delta, a.epsilon, a.kappa)?;
            let outcome = verdict(r.feasible);
            (&a.out, json!({ "params": a, "result": r }), outcome)
        }
        BoundsCommand::DeltaMax(a) => {
            let d = bounds::delta_max(a.beta, parse_real(&a.lambda1)?, parse_real(&a.lambda2)?)?;
            (&a.out, json!({ "params": a, "delta_max": d }), Outcome::Positive)
        }
        BoundsCommand::Sl2(a) => {
            let ok = bounds::sl2_feasible(parse_real(&a.lambda)?, a.beta, a.delta)?;
            (&a.out, json!({ "params": a, "feasible": ok }), verdict(ok))
        }
        BoundsCommand::ConjugacyDelta(a) => {
            let d = bounds::conjugacy_delta(a.theta, a.omega, parse_real(&a.lambda)?)?;
            (&a.out, json!({ "params": a, "delta": d }), Outcome::Positive)
        }
        BoundsCommand::Threshold(a) => {
            let t = bounds::conjugacy_threshold();
            (&a.out, json!({ "threshold": t }), Outcome::Positive)
        }
    };
    let out = OutDir::create(&dir.out, meta)?;
    out.write_json("bounds.json", &body)?;
    println!("{}", serde_json::to_string(&body)?);
    Ok(outcome)
}

fn verdict(positive: bool) -> Outcome {
    if positive {
        Outcome::Positive
    } else {
        Outcome::Negative
    }
}

/// Keys naming files are resolved against the config file's directory.
const PATH_KEYS: [&str; 3] = ["shift", "cocycle", "out"];

fn run_config(path: &Path) -> CliResult<Outcome> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let doc: toml::Table = toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let table = doc
        .get("command")
        .and_then(toml::Value::as_table)
        .ok_or_else(|| format!("{}: missing [command] table", path.display()))?;
    let name = table
        .get("name")
        .and_then(toml::Value::as_str)
        .ok_or_else(|| format!("{}: [command] needs a string `name`", path.display()))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();

    let mut argv: Vec<String> = vec!["domsplit".into()];
    argv.extend(name.split_whitespace().map(String::from));
    if argv.get(1).map(String::as_str) == Some("run") {
        return Err("a config file cannot invoke `run`".into());
    }
    for (key, value) in table.iter().filter(|(k, _)| k.as_str() != "name") {
        let flag = format!("--{}", key.replace('_', "-"));
        let text = match value {
            toml::Value::Boolean(true) => {
                argv.push(flag);
                continue;
            }
            toml::Value::Boolean(false) => continue,
            toml::Value::String(s) if PATH_KEYS.contains(&key.as_str()) => resolve(&base, s),
            toml::Value::String(s) => s.clone(),
            toml::Value::Integer(i) => i.to_string(),
            toml::Value::Float(f) => f.to_string(),
            toml::Value::Array(items) => items.iter().map(scalar_text).collect::<CliResult<Vec<_>>>()?.join(","),
            other => return Err(format!("unsupported value for {key}: {other}").into()),
        };
        argv.push(flag);
        argv.push(text);
    }
    let cli = Cli::try_parse_from(&argv).map_err(|e| format!("{}: {e}", path.display()))?;
    dispatch(cli.command)
}

fn resolve(base: &Path, s: &str) -> String {
    let p = PathBuf::from(s);
    if p.is_absolute() {
        s.to_string()
    } else {
        base.join(p).to_string_lossy().into_owned()
    }
}

fn scalar_text(v: &toml::Value) -> CliResult<String> {
    Ok(match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => f.to_string(),
        other => return Err(format!("unsupported list element {other}").into()),
    })
}
