//! One function per subcommand, each returning its results payload.

use std::fs;

use serde_json::{json, Value};

use edgelab::construct::{build_grid, factory_report, ConstructError, Factory, FactoryOptions, VerifyMode};
use edgelab::counting::{
    best_lower_bound, exponent_estimate, lower_bound_formula, sample_count, sign_pattern_bound, warren_bound,
    CountingError,
};
use edgelab::families::{builtin, oracle_relation, BuiltinFamilyId, OracleVerdict};
use edgelab::framework::{Configuration, Family, FrameworkError};
use edgelab::poly::{parse_rat, rat_to_string, signs_to_string, Point, PolyError, Sign};
use edgelab::sampling::{random_point, rng_stream, SampleBox, SamplingError, SamplingOptions};
use edgelab::spec_file::FamilySpec;
use edgelab::wallpair::{find_spanning_seed, seed_from_hint, SeedRecord, SpanningSeed, WallPairError};

use crate::{Cli, Command, RunError};

fn config(msg: impl std::fmt::Display) -> RunError {
    RunError::Config(msg.to_string())
}

impl From<FrameworkError> for RunError {
    fn from(e: FrameworkError) -> Self {
        match e {
            FrameworkError::Poly(_) | FrameworkError::OutsideDomain { .. } | FrameworkError::SamePoint => config(e),
            FrameworkError::InvalidFamily(_) | FrameworkError::UnknownLabel(_) => config(e),
        }
    }
}

impl From<PolyError> for RunError {
    fn from(e: PolyError) -> Self {
        config(e)
    }
}

impl From<SamplingError> for RunError {
    fn from(e: SamplingError) -> Self {
        match e {
            SamplingError::RetriesExhausted(_) => RunError::Exhausted(e.to_string()),
            _ => config(e),
        }
    }
}

impl From<CountingError> for RunError {
    fn from(e: CountingError) -> Self {
        match e {
            CountingError::Sampling(s) => s.into(),
            CountingError::Framework(f) => f.into(),
            CountingError::BoundViolated { .. } => RunError::Invariant(e.to_string()),
            CountingError::Precondition(_) | CountingError::NotOrderType(_) => config(e),
        }
    }
}

impl From<WallPairError> for RunError {
    fn from(e: WallPairError) -> Self {
        match e {
            WallPairError::Framework(f) => f.into(),
            WallPairError::Sampling(s) => s.into(),
            WallPairError::Poly(_) => config(e),
            WallPairError::UnsupportedDegree { .. } => RunError::Exhausted(e.to_string()),
        }
    }
}

impl From<ConstructError> for RunError {
    fn from(e: ConstructError) -> Self {
        match e {
            ConstructError::Framework(f) => f.into(),
            ConstructError::Counting(c) => c.into(),
            ConstructError::Poly(_)
            | ConstructError::TupleRange { .. }
            | ConstructError::BadParameters(_)
            | ConstructError::Undecodable { .. } => config(e),
            ConstructError::NoDelta(_) | ConstructError::NoEps(_) | ConstructError::GridNotFound(_) => {
                RunError::Exhausted(e.to_string())
            }
            ConstructError::SingularSeed
            | ConstructError::GridPointOutside { .. }
            | ConstructError::GridInvalid { .. }
            | ConstructError::PerturbationExhausted { .. } => RunError::Invariant(e.to_string()),
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("payload serializes")
}

/// The family from `--family` or `--spec`, plus its built-in id if any.
fn family(cli: &Cli) -> Result<(Family, Option<BuiltinFamilyId>), RunError> {
    match (&cli.family, &cli.spec) {
        (Some(_), Some(_)) => Err(config("give either --family or --spec, not both")),
        (None, None) => Err(config("missing --family or --spec")),
        (Some(name), None) => {
            let id: BuiltinFamilyId = name.parse().map_err(config)?;
            Ok((builtin(id), Some(id)))
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| config(format!("cannot read {}: {e}", path.display())))?;
            let spec = FamilySpec::from_json(&text).map_err(config)?;
            Ok((spec.to_family().map_err(config)?, None))
        }
    }
}

fn seed(cli: &Cli) -> Result<u64, RunError> {
    cli.seed.ok_or_else(|| config("--seed is required for randomized subcommands"))
}

fn single_n(cli: &Cli) -> Result<usize, RunError> {
    match cli.n[..] {
        [n] if n > 0 => Ok(n),
        [] => Err(config("missing --n")),
        _ => Err(config("--n must be a single positive integer here")),
    }
}

fn sample_box(cli: &Cli, fam: &Family, id: Option<BuiltinFamilyId>) -> Result<SampleBox, RunError> {
    match (&cli.bbox, id) {
        (Some(b), _) => Ok(SampleBox::parse(b, fam.d)?),
        (None, Some(id)) => Ok(id.default_box()),
        (None, None) => Ok(SampleBox::parse("-4:4", fam.d)?),
    }
}

fn strings(p: &[edgelab::poly::Rat]) -> Vec<String> {
    p.iter().map(rat_to_string).collect()
}

pub fn dispatch(cli: &Cli) -> Result<Value, RunError> {
    match &cli.cmd {
        Command::Label { points } => label(cli, points.as_deref()),
        Command::Count { strong, bits } => count(cli, *strong, *bits),
        Command::Bound { d, k, degree } => bound(cli, *d, *k, *degree),
        Command::Lower { d } => lower(cli, *d),
        Command::Construct {
            seed_file,
            emit_labelings,
            budget,
        } => construct(cli, seed_file.as_deref(), *emit_labelings, *budget),
        Command::Wallpair { budget, no_hint } => wallpair(cli, *budget, *no_hint),
        Command::VerifyFamily { export } => verify_family(cli, export.as_deref()),
        Command::SepCheck { budget } => sep_check(cli, *budget),
    }
}

fn parse_points(text: &str, d: usize) -> Result<Vec<Point>, RunError> {
    text.split(';')
        .map(|p| {
            let coords = p.split(',').map(|c| parse_rat(c.trim())).collect::<Result<Point, _>>().map_err(config)?;
            if coords.len() != d {
                return Err(config(format!("point {p:?} has {} coordinates, expected {d}", coords.len())));
            }
            Ok(coords)
        })
        .collect()
}

fn label(cli: &Cli, points: Option<&str>) -> Result<Value, RunError> {
    let (fam, id) = family(cli)?;
    let pts = match points {
        Some(text) => parse_points(text, fam.d)?,
        None => {
            let n = single_n(cli)?;
            let bx = sample_box(cli, &fam, id)?;
            let mut rng = rng_stream(seed(cli)?, &[]);
            (0..n)
                .map(|_| random_point(&fam.domain, &mut rng, &bx, SamplingOptions::default()))
                .collect::<Result<_, _>>()?
        }
    };
    let cfg = Configuration::new(pts);
    let labeling = fam.label_configuration(&cfg)?;
    Ok(json!({
        "family": fam.name,
        "n": cfg.len(),
        "points": cfg.points.iter().map(|p| strings(p)).collect::<Vec<_>>(),
        "labeling": labeling.to_record(&fam.lambda),
        "strong": fam.strong_check(&cfg)?,
    }))
}

fn count(cli: &Cli, strong: bool, bits: u32) -> Result<Value, RunError> {
    let (fam, id) = family(cli)?;
    let seed = seed(cli)?;
    let trials = cli.trials.ok_or_else(|| config("missing --trials"))?;
    if cli.n.is_empty() {
        return Err(config("missing --n"));
    }
    let bx = sample_box(cli, &fam, id)?;
    let opts = SamplingOptions {
        bits,
        ..SamplingOptions::default()
    };
    let mut reports = Vec::new();
    for &n in &cli.n {
        let r = sample_count(&fam, n, trials, seed, &bx, strong, opts)?;
        let mut v = to_value(&r);
        v["exponent_estimate"] = json!(exponent_estimate(&r.distinct_count, n));
        reports.push(v);
    }
    Ok(if reports.len() == 1 { reports.pop().unwrap() } else { Value::Array(reports) })
}

fn bound(cli: &Cli, d: Option<usize>, k: Option<usize>, degree: Option<usize>) -> Result<Value, RunError> {
    let n = single_n(cli)?;
    let (name, d, k, degree) = match (d, k, degree) {
        (Some(d), Some(k), Some(degree)) => ("custom".to_string(), d, k, degree),
        (None, None, None) => {
            let (fam, _) = family(cli)?;
            (fam.name.clone(), fam.d, fam.k(), fam.max_degree() as usize)
        }
        _ => return Err(config("give all of --d, --k, --degree, or a family")),
    };
    let w = warren_bound(n, d, k, degree)?;
    let l = n * (n - 1) / 2 * k;
    let patterns = sign_pattern_bound(l, d * n, degree).ok().map(|v| v.to_string());
    Ok(json!({
        "family": name,
        "n": n,
        "d": d,
        "k": k,
        "degree": degree,
        "l": l,
        "m_vars": d * n,
        "warren": w.value.to_string(),
        "warren_precondition": w.precondition_holds,
        "sign_pattern_bound": patterns,
    }))
}

fn lower(cli: &Cli, d: Option<usize>) -> Result<Value, RunError> {
    let n = single_n(cli)?;
    let d = match d {
        Some(d) => d,
        None => family(cli)?.0.d,
    };
    match cli.m {
        Some(m) => Ok(json!({"n": n, "m": m, "d": d, "value": lower_bound_formula(n, m, d)?.to_string()})),
        None => {
            let best = best_lower_bound(n, d).ok_or_else(|| config(format!("no m with 1 <= m < n/d for n={n}, d={d}")))?;
            Ok(json!({"n": n, "m": best.0, "d": d, "value": best.1.to_string(), "best_over_m": true}))
        }
    }
}

fn spanning_seed(cli: &Cli, fam: &Family, id: Option<BuiltinFamilyId>, budget: usize, use_hint: bool) -> Result<(SpanningSeed, &'static str), RunError> {
    if use_hint {
        if let Some(s) = seed_from_hint(fam)? {
            return Ok((s, "hint"));
        }
    }
    let mut unhinted = fam.clone();
    unhinted.seed_hint = None;
    let bx = sample_box(cli, fam, id)?;
    match find_spanning_seed(&unhinted, seed(cli)?, &bx, budget)? {
        Some(s) => Ok((s, "search")),
        None => Err(RunError::Exhausted(format!("no spanning seed within {budget} trials"))),
    }
}

fn construct(cli: &Cli, seed_file: Option<&std::path::Path>, emit: bool, budget: usize) -> Result<Value, RunError> {
    let (fam, id) = family(cli)?;
    let n = single_n(cli)?;
    let m = cli.m.ok_or_else(|| config("missing --m"))?;
    let rng_seed = seed(cli)?;
    lower_bound_formula(n, m, fam.d)?;
    let (sseed, source) = match seed_file {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| config(format!("cannot read {}: {e}", path.display())))?;
            let rec: SeedRecord = serde_json::from_str(&text)
                .or_else(|_| serde_json::from_str::<Value>(&text).and_then(|v| serde_json::from_value(v["seed"].clone())))
                .map_err(config)?;
            let s = SpanningSeed::from_record(&fam, &rec)?.ok_or_else(|| config("seed file does not certify for this family"))?;
            (s, "file")
        }
        None => spanning_seed(cli, &fam, id, budget, true)?,
    };
    let grid = build_grid(&fam, &sseed, m, VerifyMode::default())?;
    let opts = FactoryOptions {
        seed: rng_seed,
        ..FactoryOptions::default()
    };
    let items = Factory::new(&fam, &grid, n, opts)?.generate()?;
    let report = factory_report(&fam, &grid, n, &items)?;
    if !(report.all_distinct && report.all_strong && report.all_recovered) {
        return Err(RunError::Invariant(format!("factory output failed its checks: {report:?}")));
    }
    let mut v = to_value(&report);
    v["family"] = json!(fam.name);
    v["n"] = json!(n);
    v["m"] = json!(m);
    v["seed_source"] = json!(source);
    v["seed"] = to_value(&sseed.to_record(&fam));
    v["grid"] = to_value(&grid.to_record());
    if emit {
        v["labelings"] = Value::Array(items.iter().map(|it| to_value(&it.labeling.to_record(&fam.lambda))).collect());
    }
    Ok(v)
}

fn wallpair(cli: &Cli, budget: usize, no_hint: bool) -> Result<Value, RunError> {
    let (fam, id) = family(cli)?;
    let (s, source) = spanning_seed(cli, &fam, id, budget, !no_hint)?;
    let mut v = to_value(&s.to_record(&fam));
    v["family"] = json!(fam.name);
    v["source"] = json!(source);
    Ok(v)
}

fn verify_family(cli: &Cli, export: Option<&std::path::Path>) -> Result<Value, RunError> {
    let (fam, id) = family(cli)?;
    let defaulted: Vec<String> = fam.phi.rows().filter(|r| r.2).map(|r| signs_to_string(&r.0)).collect();
    let mut v = json!({
        "family": fam.name,
        "d": fam.d,
        "k": fam.k(),
        "max_degree": fam.max_degree(),
        "labels": fam.lambda.names(),
        "phi_rows": fam.phi.rows().count(),
        "defaulted_rows": defaulted,
        "domain_polys": fam.domain.polys.len(),
    });
    if let Some(path) = export {
        fs::write(path, FamilySpec::from_family(&fam).to_json()).map_err(|e| config(format!("cannot write {}: {e}", path.display())))?;
    }
    if let (Some(id), Some(trials)) = (id, cli.trials) {
        let bx = sample_box(cli, &fam, Some(id))?;
        let mut rng = rng_stream(seed(cli)?, &[]);
        let (mut agree, mut inconclusive, mut skipped) = (0, 0, 0);
        for _ in 0..trials {
            let a = random_point(&fam.domain, &mut rng, &bx, SamplingOptions::default())?;
            let b = random_point(&fam.domain, &mut rng, &bx, SamplingOptions::default())?;
            if fam.sign_vector(&a, &b)?.contains(&Sign::Zero) {
                skipped += 1;
                continue;
            }
            let label = fam.pair_label(&a, &b)?;
            match oracle_relation(&id, &a, &b) {
                OracleVerdict::Label(l) if l == label => agree += 1,
                OracleVerdict::Inconclusive => inconclusive += 1,
                OracleVerdict::Label(l) => {
                    return Err(RunError::Invariant(format!(
                        "{id}: encoding says {} but the oracle says {} for {:?} and {:?}",
                        fam.label_name(label),
                        fam.label_name(l),
                        strings(&a),
                        strings(&b)
                    )))
                }
            }
        }
        v["oracle"] = json!({"trials": trials, "agree": agree, "inconclusive": inconclusive, "skipped_nonstrong": skipped});
    }
    Ok(v)
}

fn sep_check(cli: &Cli, budget: usize) -> Result<Value, RunError> {
    let (fam, id) = family(cli)?;
    let trials = cli.trials.ok_or_else(|| config("missing --trials"))?;
    let bx = sample_box(cli, &fam, id)?;
    let s = seed(cli)?;
    let (mut found, mut verified, mut missing) = (0, 0, Vec::new());
    for t in 0..trials {
        let mut rng = rng_stream(s, &[t as u64]);
        let a = random_point(&fam.domain, &mut rng, &bx, SamplingOptions::default())?;
        let a2 = random_point(&fam.domain, &mut rng, &bx, SamplingOptions::default())?;
        if a == a2 {
            continue;
        }
        match fam.separation_witness(&a, &a2, &mut rng, &bx, budget)? {
            Some(w) => {
                found += 1;
                if !w.verify(&fam, &a, &a2)? {
                    return Err(RunError::Invariant(format!("witness for trial {t} fails re-verification")));
                }
                verified += 1;
            }
            None => missing.push(t),
        }
    }
    Ok(json!({
        "family": fam.name,
        "trials": trials,
        "separated": found,
        "verified": verified,
        "not_found": missing.len(),
        "not_found_trials": missing,
    }))
}
