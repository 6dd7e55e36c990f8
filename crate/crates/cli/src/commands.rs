use ldp_contraction::curve::linspace;
use ldp_contraction::divergence::{
    d_max, d_max_smooth, e_gamma, f_divergence, f_divergence_integral, kl, total_variation,
};
use ldp_contraction::fdiv_bounds::{
    bound_comparison_grid, SweepFamily, EPSILON_SWEEP_DELTAS, EPSILON_SWEEP_LAMBDA,
    EPSILON_SWEEP_RANGE, LAMBDA_SWEEP_DELTA, LAMBDA_SWEEP_EPSILONS, LAMBDA_SWEEP_RANGE,
    SWEEP_POINTS, SWEEP_TAU,
};
use ldp_contraction::harness::run_suite_with;
use ldp_contraction::ldp::{is_ldp, tightest_delta, tightest_epsilon};
use ldp_contraction::sdpi::{composition_bound, linear_sdpi_coeff, nonlinear_sdpi_bound};
use ldp_contraction::{
    BoundCurve, CompositionParams, Execution, FDivGenerator, FdivBoundInputs, PrivacyBudget,
    SdpiParams, SuiteParams, SweepAxis,
};
use serde_json::{json, Value};

use crate::args::{
    CheckLdpArgs, Cli, Command, ComposeArgs, DivergenceKind, EvalArgs, Format, GeneratorKind,
    KlCompareArgs, SdpiCurveArgs, VerifyArgs,
};
use crate::error::{CliError, CliResult};
use crate::format::{
    compose_csv, curve_json, fmt_num, json_num, key_value_csv, kl_compare_csv, round_json, sdpi_csv,
};
use crate::input::{load_channel, load_distribution};

/// Rendered output of a subcommand and the exit code it asks for.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub exit_code: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, exit_code: 0 }
    }
}

pub fn run(cli: &Cli) -> CliResult<Output> {
    let format = cli.common.format;
    match &cli.command {
        Command::Eval(a) => eval(a, format),
        Command::CheckLdp(a) => check_ldp(a, format),
        Command::SdpiCurve(a) => sdpi_curve(a, format),
        Command::KlCompare(a) => kl_compare(a, format),
        Command::Compose(a) => compose(a, format),
        Command::Verify(a) => verify(a, cli.common.seed, format),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn need(value: Option<f64>, flag: &str) -> CliResult<f64> {
    value.ok_or_else(|| CliError::Malformed(format!("--{flag} is required here")))
}

fn generator(kind: GeneratorKind) -> FDivGenerator {
    match kind {
        GeneratorKind::Kl => FDivGenerator::kl(),
        GeneratorKind::Chi2 => FDivGenerator::chi_squared(),
        GeneratorKind::Tv => FDivGenerator::total_variation(),
        GeneratorKind::Hellinger => FDivGenerator::squared_hellinger(),
    }
}

fn eval(a: &EvalArgs, format: Option<Format>) -> CliResult<Output> {
    let (p, q) = (load_distribution(&a.p)?, load_distribution(&a.q)?);
    let value = match a.divergence {
        DivergenceKind::Egamma => {
            let gamma = need(a.gamma, "gamma")?;
            if gamma < 1.0 {
                return Err(CliError::Domain(format!("gamma must be >= 1, got {gamma}")));
            }
            e_gamma(&p, &q, gamma)?
        }
        DivergenceKind::Tv => total_variation(&p, &q)?,
        DivergenceKind::Dmax => d_max(&p, &q)?,
        DivergenceKind::DmaxSmooth => d_max_smooth(&p, &q, need(a.delta, "delta")?)?,
        DivergenceKind::Kl => kl(&p, &q)?,
        DivergenceKind::Fdiv => {
            let kind = a
                .generator
                .ok_or_else(|| CliError::Malformed("--f is required for fdiv".into()))?;
            let f = generator(kind);
            if a.integral {
                f_divergence_integral(&p, &q, &f)?
            } else {
                f_divergence(&p, &q, &f)?
            }
        }
    };
    let name = format!("{:?}", a.divergence).to_lowercase();
    Ok(Output::ok(match format {
        None => format!("{}\n", fmt_num(value)),
        Some(Format::Csv) => key_value_csv(&[("divergence", name), ("value", fmt_num(value))]),
        Some(Format::Json) => pretty(&json!({ "divergence": name, "value": json_num(value) })),
    }))
}

fn check_ldp(a: &CheckLdpArgs, format: Option<Format>) -> CliResult<Output> {
    let channel = load_channel(&a.channel)?;
    let mut fields: Vec<(&str, Value)> = Vec::new();
    if let Some(e) = a.eps {
        fields.push(("epsilon", json_num(e)));
    }
    if let Some(d) = a.delta {
        fields.push(("delta", json_num(d)));
    }
    if let (Some(e), Some(d)) = (a.eps, a.delta) {
        fields.push((
            "verdict",
            Value::Bool(is_ldp(&channel, PrivacyBudget::new(e, d)?)),
        ));
    }
    if let Some(e) = a.eps {
        fields.push(("tightest_delta", json_num(tightest_delta(&channel, e)?)));
    }
    if let Some(d) = a.delta {
        fields.push(("tightest_epsilon", json_num(tightest_epsilon(&channel, d)?)));
    }
    Ok(Output::ok(match format {
        Some(Format::Csv) => {
            let rows: Vec<(&str, String)> = fields
                .iter()
                .map(|(k, v)| (*k, v.as_str().map_or_else(|| v.to_string(), str::to_owned)))
                .collect();
            key_value_csv(&rows)
        }
        _ => pretty(&Value::Object(
            fields.into_iter().map(|(k, v)| (k.to_owned(), v)).collect(),
        )),
    }))
}

fn unit_grid(points: usize) -> CliResult<Vec<f64>> {
    if points == 0 {
        return Err(CliError::Domain("--grid must be positive".into()));
    }
    Ok(linspace(0.0, 1.0, points))
}

/// DPI, linear and non-linear SDPI series on `points` evenly spaced input levels.
pub fn sdpi_curves(sdpi: &SdpiParams, points: usize) -> CliResult<[BoundCurve; 3]> {
    let grid = unit_grid(points)?;
    let b = sdpi.budget();
    let params = [
        ("epsilon", b.epsilon()),
        ("delta", b.delta()),
        ("gamma_prime", sdpi.gamma_prime()),
    ];
    let eta = linear_sdpi_coeff(sdpi);
    let nonlinear = grid
        .iter()
        .map(|&t| Ok((t, nonlinear_sdpi_bound(sdpi, t)?)))
        .collect::<CliResult<Vec<_>>>()?;
    Ok([
        BoundCurve::new("dpi", &params, grid.iter().map(|&t| (t, t)).collect())?,
        BoundCurve::new(
            "linear_sdpi",
            &params,
            grid.iter().map(|&t| (t, eta * t)).collect(),
        )?,
        BoundCurve::new("nonlinear_sdpi", &params, nonlinear)?,
    ])
}

fn sdpi_curve(a: &SdpiCurveArgs, format: Option<Format>) -> CliResult<Output> {
    let sdpi = SdpiParams::new(PrivacyBudget::new(a.eps, a.delta)?, a.gamma_prime)?;
    let curves = sdpi_curves(&sdpi, a.grid)?;
    Ok(Output::ok(match format {
        Some(Format::Json) => pretty(&Value::Array(curves.iter().map(curve_json).collect())),
        _ => sdpi_csv(&curves),
    }))
}

/// Families of the KL bound comparison, defaults filled in per axis.
pub fn kl_compare_families(a: &KlCompareArgs) -> CliResult<Vec<SweepFamily>> {
    let axis = SweepAxis::from(a.axis);
    let tau = a.tau.unwrap_or(SWEEP_TAU);
    let points = a.grid.unwrap_or(SWEEP_POINTS);
    if points == 0 {
        return Err(CliError::Domain("--grid must be positive".into()));
    }
    let single = |v: &Option<Vec<f64>>, flag: &str, default: f64| -> CliResult<f64> {
        match v.as_deref() {
            None => Ok(default),
            Some([x]) => Ok(*x),
            Some(_) => Err(CliError::Malformed(format!(
                "--{flag} takes one value on this axis"
            ))),
        }
    };
    let (range, series) = match axis {
        SweepAxis::Lambda => {
            if a.lambda.is_some() {
                return Err(CliError::Malformed("--lambda is swept on this axis".into()));
            }
            let eps = a
                .eps
                .clone()
                .unwrap_or_else(|| LAMBDA_SWEEP_EPSILONS.to_vec());
            (LAMBDA_SWEEP_RANGE, eps)
        }
        SweepAxis::Epsilon => {
            if a.eps.is_some() {
                return Err(CliError::Malformed("--eps is swept on this axis".into()));
            }
            let deltas = a
                .delta
                .clone()
                .unwrap_or_else(|| EPSILON_SWEEP_DELTAS.to_vec());
            (EPSILON_SWEEP_RANGE, deltas)
        }
    };
    let lambda_axis_delta = match axis {
        SweepAxis::Lambda => single(&a.delta, "delta", LAMBDA_SWEEP_DELTA)?,
        SweepAxis::Epsilon => LAMBDA_SWEEP_DELTA,
    };
    let grid = linspace(a.from.unwrap_or(range.0), a.to.unwrap_or(range.1), points);
    series
        .into_iter()
        .map(|s| {
            // The swept coordinate of `fixed` is overwritten along the grid.
            let fixed = match axis {
                SweepAxis::Lambda => {
                    let budget = PrivacyBudget::new(s, lambda_axis_delta)?;
                    FdivBoundInputs::new(budget, tau, 1.0)?
                }
                SweepAxis::Epsilon => {
                    let lam = a.lambda.unwrap_or(EPSILON_SWEEP_LAMBDA);
                    FdivBoundInputs::new(PrivacyBudget::new(1.0, s)?, tau, lam)?
                }
            };
            let (ours, theirs) = bound_comparison_grid(axis, &fixed, &grid)?;
            Ok((s, ours, theirs))
        })
        .collect()
}

fn kl_compare(a: &KlCompareArgs, format: Option<Format>) -> CliResult<Output> {
    let families = kl_compare_families(a)?;
    Ok(Output::ok(match format {
        Some(Format::Json) => pretty(&Value::Array(
            families
                .iter()
                .map(|(s, ours, theirs)| {
                    json!({ "series": json_num(*s), "ours": curve_json(ours), "dasgupta": curve_json(theirs) })
                })
                .collect(),
        )),
        _ => kl_compare_csv(&families),
    }))
}

/// One `G_n` curve per `n` in `1..=n_max`.
pub fn compose_curves(a: &ComposeArgs) -> CliResult<Vec<(u32, BoundCurve)>> {
    if a.n_max == 0 {
        return Err(CliError::Domain("--n-max must be positive".into()));
    }
    let grid = unit_grid(a.grid)?;
    let budget = PrivacyBudget::new(a.eps, a.delta)?;
    (1..=a.n_max)
        .map(|n| {
            let params = CompositionParams::new(budget, a.gamma_prime, n)?;
            let points = grid
                .iter()
                .map(|&t| Ok((t, composition_bound(&params, t)?)))
                .collect::<CliResult<Vec<_>>>()?;
            let meta = [
                ("epsilon", a.eps),
                ("delta", a.delta),
                ("gamma_prime", a.gamma_prime),
                ("n", f64::from(n)),
            ];
            Ok((n, BoundCurve::new(&format!("G_{n}"), &meta, points)?))
        })
        .collect()
}

fn compose(a: &ComposeArgs, format: Option<Format>) -> CliResult<Output> {
    let curves = compose_curves(a)?;
    Ok(Output::ok(match format {
        Some(Format::Json) => pretty(&Value::Array(
            curves.iter().map(|(_, c)| curve_json(c)).collect(),
        )),
        _ => compose_csv(&curves),
    }))
}

fn verify(a: &VerifyArgs, seed: u64, format: Option<Format>) -> CliResult<Output> {
    let mut params = SuiteParams::default();
    if let (Some(e), Some(d)) = (a.eps, a.delta) {
        params.budget = Some(PrivacyBudget::new(e, d)?);
    }
    params.gamma_prime = a.gamma_prime;
    if let Some(m) = a.max_size {
        params.max_size = m;
    }
    if let Some(k) = a.pairs {
        params.pairs_per_trial = k;
    }
    if let Some(d) = a.depth {
        params.depth = d;
    }
    if let Some(l) = a.lambda {
        params.lambda = l.into();
    }
    params.chi_squared = !a.no_chi_squared;
    let execution = if a.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let report = run_suite_with(a.suite, &params, a.trials, seed, execution)?;

    let mut v = round_json(serde_json::to_value(&report).expect("report serializes"));
    // serde_json writes non-finite floats as null.
    v["max_violation"] = json_num(report.max_violation);
    if let Some(w) = report.worst_slack {
        v["worst_slack"] = json_num(w);
    }
    let text = match format {
        Some(Format::Csv) => {
            let mut rows = vec![
                ("suite", report.suite.clone()),
                ("trials", report.trials.to_string()),
                ("checks", report.checks.to_string()),
                ("violations", report.violations.to_string()),
                ("max_violation", fmt_num(report.max_violation)),
                (
                    "worst_slack",
                    report.worst_slack.map_or_else(String::new, fmt_num),
                ),
                ("tolerance", fmt_num(report.tolerance)),
                ("seed", report.seed.to_string()),
            ];
            if let Some(l) = report.lambda {
                rows.push(("lambda", l.name().to_owned()));
            }
            let extra: Vec<(String, String)> = report
                .params
                .iter()
                .map(|(k, x)| (format!("param.{k}"), fmt_num(*x)))
                .collect();
            rows.extend(extra.iter().map(|(k, x)| (k.as_str(), x.clone())));
            key_value_csv(&rows)
        }
        _ => pretty(&v),
    };
    Ok(Output {
        text,
        exit_code: if report.passed() { 0 } else { 1 },
    })
}
