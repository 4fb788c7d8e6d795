use std::fs::File;
use std::process::ExitCode;

use rug::Rational;
use runsdist::model::{shift_factorial_by, shift_raw_by};
use runsdist::moments::{
    central_from_raw, central_moments, factorial_moments_partition, factorial_moments_pgf, factorial_moments_recurrence,
    moments_from_pmf, raw_from_factorial,
};
use runsdist::oracle::{dp_waiting_time_pmf, monte_carlo, CountingSemantics};
use runsdist::pmf::{pmf_table, PmfEngineId};
use runsdist::roots::RootModel;
use runsdist::{shift_factorial_moments, IndexScheme, MomentKind, MomentSet, RunParams, Scalar, VariantSpec};
use serde::Serialize;

use crate::args::{CompareArgs, Format, Kind, MomentArgs, ParamArgs, PmfArgs, Probability, Route, SimulateArgs};
use crate::output::{self, CompareRecord, CompareSummary, HistogramRecord, MomentRecord, PmfRecord, SimulateRecord};
use crate::CliError;

/// Tail-mass bound, weighted by `(n_max / mean)^order`, at which the
/// summation route stops extending its window.
const SUMMATION_TAIL: f64 = 1e-17;
const SUMMATION_MAX_N: i64 = 1 << 26;

/// Runs `$body` with `$params` bound to a `RunParams` of the selected mode.
macro_rules! with_params {
    ($args:expr, |$params:ident, $p:ident| $body:expr) => {
        match $args.probability()? {
            Probability::Float(p) => {
                let $params = RunParams::new($args.k, $args.r, p)?;
                let $p = p.to_string();
                $body
            }
            Probability::Exact(p) => {
                let $p = p.to_string();
                let $params = RunParams::new($args.k, $args.r, p)?;
                $body
            }
        }
    };
}

pub fn pmf(args: &PmfArgs) -> Result<ExitCode, CliError> {
    let a = &args.params;
    let records = with_params!(a, |params, p| pmf_records(args, &params, &p)?);
    output::emit(&records, a.format)?;
    Ok(ExitCode::SUCCESS)
}

fn pmf_records<S: Scalar>(args: &PmfArgs, params: &RunParams<S>, p: &str) -> Result<Vec<PmfRecord>, CliError> {
    let a = &args.params;
    let scheme = IndexScheme::from(args.scheme);
    let table = pmf_table(args.engine, params, scheme, a.variant, args.n_min, args.n_max)?;
    Ok(table
        .iter()
        .map(|(n, v)| PmfRecord {
            k: a.k,
            r: a.r,
            p: p.to_string(),
            scheme: scheme.name(),
            variant: a.variant.to_string(),
            engine: args.engine.name(),
            n,
            value: output::value(v),
        })
        .collect())
}

pub fn moments(args: &MomentArgs) -> Result<ExitCode, CliError> {
    let a = &args.params;
    if args.order_max == 0 {
        return Err(CliError::usage("--order-max: must be at least 1"));
    }
    let records = with_params!(a, |params, p| moment_records(args, &params, &p)?);
    output::emit(&records, a.format)?;
    Ok(ExitCode::SUCCESS)
}

fn moment_records<S: Scalar>(args: &MomentArgs, params: &RunParams<S>, p: &str) -> Result<Vec<MomentRecord>, CliError> {
    let a = &args.params;
    let kind = MomentKind::from(args.kind);
    let scheme = IndexScheme::from(args.scheme);
    let record = |statistic, order, value| MomentRecord {
        k: a.k,
        r: a.r,
        p: p.to_string(),
        scheme: scheme.name(),
        variant: a.variant.to_string(),
        route: args.route.name(),
        kind: kind.name(),
        statistic,
        order,
        value,
    };
    let cut_offset = -params.rk();
    let records: Vec<MomentRecord> = match args.kind {
        Kind::Factorial | Kind::Raw => {
            let full = full_factorial_moments(params, a.variant, args.route, args.order_max)?;
            let values = match (args.kind, scheme) {
                (Kind::Factorial, IndexScheme::Full) => full.values,
                (Kind::Factorial, IndexScheme::Cut) => shift_factorial_by(&full.values, cut_offset),
                (_, IndexScheme::Full) => raw_from_factorial(&full)?.values,
                (_, IndexScheme::Cut) => shift_raw_by(&raw_from_factorial(&full)?.values, cut_offset),
            };
            values
                .iter()
                .enumerate()
                .map(|(i, v)| record("moment", Some(i + 1), output::value(v)))
                .collect()
        }
        Kind::Central => {
            let central = central_moments_for(params, a.variant, args.route, args.order_max.max(4))?;
            let mut rows: Vec<_> = (1..=args.order_max)
                .map(|i| record("moment", Some(i), output::value(&central.order(i))))
                .collect();
            let (m2, m3, m4) = (central.order(2), central.order(3), central.order(4));
            let skewness = m3.to_f64() / m2.to_f64().powf(1.5);
            let excess = m4 / m2.powu(2) - S::from_i64(3);
            rows.push(record("skewness", None, output::float(skewness)));
            rows.push(record("excess-kurtosis", None, output::value(&excess)));
            rows
        }
    };
    Ok(records)
}

fn central_moments_for<S: Scalar>(params: &RunParams<S>, variant: VariantSpec, route: Route, order_max: usize) -> Result<MomentSet<S>, CliError> {
    if route == Route::Partition && variant.overlap <= 0 && !variant.type2 {
        if order_max > 4 {
            return Err(CliError::usage(
                "--order-max: the partition route gives central moments up to order 4; use another route for higher orders",
            ));
        }
        return Ok(central_moments(params, order_max)?);
    }
    let full = full_factorial_moments(params, variant, route, order_max)?;
    Ok(central_from_raw(&raw_from_factorial(&full)?))
}

/// Full-indexing factorial moments of `variant` by `route`.
fn full_factorial_moments<S: Scalar>(params: &RunParams<S>, variant: VariantSpec, route: Route, order_max: usize) -> Result<MomentSet<S>, CliError> {
    variant.validate(params.k())?;
    let unsupported = || CliError::usage(format!("--route: {} does not support variant {variant}", route.name()));
    if S::EXACT && matches!(route, Route::Pgf | Route::Root | Route::Summation) {
        return Err(CliError::usage(format!(
            "--route: {} runs in floating point; pass p as a decimal without --exact",
            route.name()
        )));
    }
    let gap = variant.gap_len().map_or(0, |g| (params.r() as i64 - 1) * g as i64);
    let type1_family = !variant.type2 && variant.overlap <= 0;
    let values: Vec<S> = match route {
        Route::Recurrence | Route::Partition | Route::Pgf if !type1_family => return Err(unsupported()),
        Route::Recurrence => {
            let cut = factorial_moments_recurrence(params, order_max)?;
            shift_factorial_by(&shift_factorial_moments(&cut, params)?.values, gap)
        }
        Route::Partition => shift_factorial_by(&factorial_moments_partition(params, order_max, IndexScheme::Full)?.values, gap),
        Route::Pgf => {
            let m = factorial_moments_pgf(&params.cast::<f64>(), order_max, 1e-13)?;
            cast_all(&shift_factorial_by(&m.moments.values, gap))
        }
        Route::Root => {
            if variant.type2 {
                return Err(unsupported());
            }
            let model = RootModel::new(&params.cast::<f64>(), variant.overlap)?;
            cast_all(&model.factorial_moments(order_max)?.values)
        }
        Route::Summation => cast_all(&summation_moments(&params.cast::<f64>(), variant, order_max)?.values),
    };
    Ok(MomentSet::new(MomentKind::Factorial, IndexScheme::Full, values))
}

fn cast_all<S: Scalar>(values: &[f64]) -> Vec<S> {
    values.iter().map(|v| v.cast()).collect()
}

/// Direct summation over the oracle pmf, widening the window until the
/// unabsorbed mass is negligible at the requested order.
fn summation_moments(params: &RunParams<f64>, variant: VariantSpec, order_max: usize) -> Result<MomentSet<f64>, CliError> {
    let semantics = CountingSemantics::from_variant(&variant, params.k())?;
    let mut n_max = (8 * variant.support_start(params.k(), params.r())).max(256);
    loop {
        let dp = dp_waiting_time_pmf(params, semantics, n_max)?;
        let mass = dp.table.mass();
        let mean = dp.table.iter().map(|(n, v)| n as f64 * v).sum::<f64>() / mass;
        let weight = (n_max as f64 / mean.max(1.0)).powi(order_max as i32);
        if dp.deficit * weight <= SUMMATION_TAIL {
            return Ok(moments_from_pmf(&dp.table, order_max, MomentKind::Factorial)?);
        }
        if n_max >= SUMMATION_MAX_N {
            return Err(CliError::failure(format!(
                "summation window reached n = {n_max} with tail mass {:e}",
                dp.deficit
            )));
        }
        n_max *= 2;
    }
}

#[derive(Serialize)]
struct CompareReport {
    records: Vec<CompareRecord>,
    summary: CompareSummary,
}

pub fn compare(args: &CompareArgs) -> Result<ExitCode, CliError> {
    let a = &args.params;
    if !(args.tolerance >= 0.0 && args.tolerance.is_finite()) {
        return Err(CliError::usage("--tolerance: must be a nonnegative number"));
    }
    let engines = parse_engine_list(&args.engines, args.scheme.into())?;
    let report = with_params!(a, |params, p| compare_report(args, &engines, &params, &p)?);
    let pass = report.summary.status == "PASS";
    match a.format {
        Format::Csv => {
            output::write_csv(std::io::stdout().lock(), &report.records)?;
            let s = &report.summary;
            let at = s.at_n.map_or(String::new(), |n| format!(" at n = {n}"));
            eprintln!("{}: max pairwise |difference| {}{at} (tolerance {:e})", s.status, s.max_abs_diff, s.tolerance);
        }
        Format::Json => output::write_json(std::io::stdout().lock(), &report)?,
    }
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(crate::FAILURE) })
}

fn parse_engine_list(items: &[String], default: IndexScheme) -> Result<Vec<(PmfEngineId, IndexScheme, String)>, CliError> {
    let mut engines = Vec::new();
    for item in items.iter().map(|s| s.trim()) {
        let (name, scheme) = match item.split_once('@') {
            Some((name, "full")) => (name, Some(IndexScheme::Full)),
            Some((name, "cut")) => (name, Some(IndexScheme::Cut)),
            Some(_) => return Err(CliError::usage(format!("--engines: `{item}` has a scheme other than @full or @cut"))),
            None => (item, None),
        };
        let ids: Vec<PmfEngineId> = if name == "type1" {
            PmfEngineId::TYPE1.to_vec()
        } else {
            vec![name.parse().map_err(|e: runsdist::Error| CliError::usage(format!("--engines: {e}")))?]
        };
        for id in ids {
            let label = match scheme {
                Some(s) => format!("{}@{}", id.name(), s.name()),
                None => id.name().to_string(),
            };
            engines.push((id, scheme.unwrap_or(default), label));
        }
    }
    if engines.len() < 2 {
        return Err(CliError::usage("--engines: need at least two engines"));
    }
    Ok(engines)
}

fn compare_report<S: Scalar>(
    args: &CompareArgs,
    engines: &[(PmfEngineId, IndexScheme, String)],
    params: &RunParams<S>,
    p: &str,
) -> Result<CompareReport, CliError> {
    let a = &args.params;
    let tables = engines
        .iter()
        .map(|(id, scheme, _)| pmf_table(*id, params, *scheme, a.variant, args.n_min, args.n_max))
        .collect::<runsdist::Result<Vec<_>>>()?;
    let tolerance = Rational::from_f64(args.tolerance).expect("finite tolerance");
    let mut records = Vec::new();
    let mut worst: Option<(S, i64)> = None;
    for n in args.n_min..=args.n_max {
        let values: Vec<S> = tables.iter().map(|t| t.get_or_zero(n)).collect();
        let (mut lo, mut hi) = (values[0].clone(), values[0].clone());
        for v in &values {
            if *v < lo {
                lo = v.clone();
            }
            if *v > hi {
                hi = v.clone();
            }
        }
        let spread = hi - lo;
        if worst.as_ref().is_none_or(|(w, _)| spread > *w) {
            worst = Some((spread.clone(), n));
        }
        for ((_, scheme, label), v) in engines.iter().zip(&values) {
            records.push(CompareRecord {
                k: a.k,
                r: a.r,
                p: p.to_string(),
                scheme: scheme.name(),
                variant: a.variant.to_string(),
                n,
                engine: label.clone(),
                value: output::value(v),
                delta: output::value(&(v.clone() - values[0].clone())),
                max_pairwise_diff: output::value(&spread),
            });
        }
    }
    let (max_diff, at_n) = match worst {
        Some((w, n)) => (w, Some(n)),
        None => (S::zero(), None),
    };
    let status = if max_diff.to_rational() <= tolerance { "PASS" } else { "FAIL" };
    Ok(CompareReport {
        records,
        summary: CompareSummary {
            status,
            max_abs_diff: output::value(&max_diff),
            at_n,
            tolerance: args.tolerance,
        },
    })
}

pub fn simulate(args: &SimulateArgs) -> Result<ExitCode, CliError> {
    let a = &args.params;
    if args.samples == 0 {
        return Err(CliError::usage("--samples: must be at least 1"));
    }
    let (params, p) = float_params(a)?;
    let semantics = CountingSemantics::from_variant(&a.variant, a.k)?;
    let report = monte_carlo(&params, semantics, args.samples, args.seed)?;
    let route = match a.variant {
        v if v.type2 => Route::Summation,
        v if v.overlap > 0 => Route::Root,
        _ => Route::Partition,
    };
    let analytic = full_factorial_moments(&params, a.variant, route, 1)?.order(1);
    let record = SimulateRecord {
        k: a.k,
        r: a.r,
        p,
        variant: a.variant.to_string(),
        samples: report.samples,
        seed: report.seed,
        mean: output::float(report.mean),
        variance: output::float(report.variance),
        skewness: output::float(report.skewness),
        standard_error: output::float(report.standard_error),
        analytic_mean: output::float(analytic),
    };
    if let Some(path) = &args.histogram {
        let file = File::create(path).map_err(|e| CliError::failure(format!("--histogram: {}: {e}", path.display())))?;
        let rows: Vec<_> = report.histogram.iter().map(|(&n, &count)| HistogramRecord { n, count }).collect();
        output::write_csv(file, &rows)?;
    }
    output::emit(&[record], a.format)?;
    Ok(ExitCode::SUCCESS)
}

/// Simulation always runs in floating point; `p` is echoed as given.
fn float_params(a: &ParamArgs) -> Result<(RunParams<f64>, String), CliError> {
    let (p, echo) = match a.probability()? {
        Probability::Float(p) => (p, p.to_string()),
        Probability::Exact(q) => (q.to_f64(), q.to_string()),
    };
    Ok((RunParams::new(a.k, a.r, p)?, echo))
}
