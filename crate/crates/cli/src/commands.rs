use std::path::Path;

use cyclewalk::analysis::{self, default_horizon, MixingReport};
use cyclewalk::evolution::{classical_reference, position_marginal, DirectWalk, FourierWalk};
use cyclewalk::fourier::{superop, Construction};
use cyclewalk::spectral::{self, PairClass, SpectrumReport};
use cyclewalk::verify::{self, CheckName, Sizes};
use cyclewalk::{PositionDistribution, WalkConfig, C64};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::args::{
    pick, require, resolve_walk, ConstructionArg, FileConfig, Method, MixingArgs, SimulateArgs,
    SpectrumArgs, TargetArg, VerifyArgs,
};
use crate::error::CliError;
use crate::output::{fmt_f64, to_json, write_file, RunManifest, Sink};

const ROW_SUM_TOL: f64 = 1e-10;

/// Worker count from `CYCLEWALK_THREADS`; `None` means run serially.
fn thread_cap() -> Option<usize> {
    std::env::var("CYCLEWALK_THREADS")
        .ok()?
        .trim()
        .parse()
        .ok()
        .filter(|&n: &usize| n > 0)
}

/// Maps `f` over `items`, in parallel when `CYCLEWALK_THREADS` allows it.
/// Output order always matches input order.
fn map_ordered<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    match thread_cap() {
        Some(n) if n > 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(|| items.into_par_iter().map(&f).collect()))
            .unwrap_or_else(|_| Vec::new()),
        _ => items.into_iter().map(f).collect(),
    }
}

fn config_echo(config: &WalkConfig) -> serde_json::Value {
    let [a, b] = config.initial_coin().amplitudes();
    json!({
        "nodes": config.n_nodes(),
        "decoherence": config.decoherence_rate(),
        "initial_coin": [a.re, a.im, b.re, b.im],
    })
}

fn label(path: Option<&Path>, fallback: &str) -> String {
    path.map_or_else(|| fallback.to_owned(), |p| p.display().to_string())
}

fn write_manifest(
    path: Option<&Path>,
    command: &str,
    config: serde_json::Value,
    outputs: Vec<String>,
) -> Result<(), CliError> {
    match path {
        Some(p) => write_file(
            p,
            &to_json(&RunManifest::new(command, config, outputs), true),
        ),
        None => Ok(()),
    }
}

fn check_row(dist: &PositionDistribution, t: usize) -> Result<(), CliError> {
    let defect = dist.normalization_defect();
    if defect > ROW_SUM_TOL {
        return Err(CliError::Numerical(format!(
            "P(·, {t}) sums to 1 ± {defect:e}"
        )));
    }
    Ok(())
}

pub fn simulate(args: &SimulateArgs, file: &FileConfig) -> Result<(), CliError> {
    let config = resolve_walk(&args.walk, file, "up")?;
    let steps = require(pick(args.steps, file, "steps")?, "steps")?;
    let method = match args.method {
        Some(m) => m,
        None => file.get_enum("method")?.unwrap_or(Method::Fourier),
    };
    let n = config.n_nodes();
    let mut sink = Sink::open(args.output.as_deref())?;
    sink.write_str("t,x,p,method\n")?;

    let mut emit = |dist: &PositionDistribution, t: usize| -> Result<(), CliError> {
        check_row(dist, t)?;
        let mut rows = String::with_capacity(n * 40);
        for (x, p) in dist.probs().iter().enumerate() {
            rows.push_str(&format!("{t},{x},{},{}\n", fmt_f64(*p), method.as_str()));
        }
        sink.write_str(&rows)
    };

    match method {
        Method::Fourier => {
            let mut walk = FourierWalk::new(&config);
            for t in 0..=steps {
                emit(&walk.distribution()?, t)?;
                walk.step();
            }
        }
        Method::Direct => {
            let mut walk = DirectWalk::new(&config)?;
            for t in 0..=steps {
                walk.state().validate()?;
                emit(&position_marginal(walk.state(), t), t)?;
                walk.step();
            }
        }
        Method::Classical => {
            for t in 0..=steps {
                emit(&classical_reference(n, t), t)?;
            }
        }
    }
    sink.finish()?;
    let mut echo = config_echo(&config);
    echo["steps"] = json!(steps);
    echo["method"] = json!(method.as_str());
    write_manifest(
        args.manifest.as_deref(),
        "simulate",
        echo,
        vec![label(args.output.as_deref(), "<stdout>")],
    )
}

#[derive(Serialize)]
struct SpectrumSummary {
    nodes: usize,
    decoherence: f64,
    construction: &'static str,
    pairs: usize,
    diagonal_pairs: usize,
    antipodal_pairs: usize,
    generic_pairs: usize,
    /// Largest spectral radius over generic pairs; `null` if there are none.
    max_generic_radius: Option<f64>,
    spectral_gap: f64,
    /// The classification is only asserted for 0 < p < 1.
    classification_applies: bool,
    classification_holds: bool,
    violations: Vec<String>,
}

/// Eigenvalues sorted by descending modulus, then by argument.
fn sorted_eigenvalues(r: &SpectrumReport) -> [C64; 4] {
    let mut ev = r.eigenvalues;
    ev.sort_by(|a, b| {
        b.norm()
            .total_cmp(&a.norm())
            .then(a.arg().total_cmp(&b.arg()))
    });
    ev
}

pub fn spectrum(args: &SpectrumArgs, file: &FileConfig) -> Result<(), CliError> {
    let config = resolve_walk(&args.walk, file, "up")?;
    let (construction, construction_name) = match args.construction {
        Some(c) => c,
        None => file
            .get_enum("construction")?
            .unwrap_or(ConstructionArg::Definitional),
    }
    .into_construction();
    let n = config.n_nodes();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|k| (0..n).map(move |kp| (k, kp))).collect();
    let reports: Vec<Result<SpectrumReport, CliError>> = map_ordered(pairs, |(k, kp)| {
        let l = superop(k, kp, &config, construction)?;
        Ok(spectral::eigenvalues(&l)?)
    });
    let reports: Vec<SpectrumReport> = reports.into_iter().collect::<Result<_, _>>()?;

    let mut sink = Sink::open(args.output.as_deref())?;
    let mut text = String::from("k,k_prime");
    for i in 0..4 {
        text.push_str(&format!(",eig{i}_re,eig{i}_im"));
    }
    text.push_str(",spectral_radius,has_unit_eigenvalue,has_minus_one,classification\n");
    for r in &reports {
        text.push_str(&format!("{},{}", r.k, r.k_prime));
        for z in sorted_eigenvalues(r) {
            text.push_str(&format!(",{},{}", fmt_f64(z.re), fmt_f64(z.im)));
        }
        text.push_str(&format!(
            ",{},{},{},{}\n",
            fmt_f64(r.spectral_radius),
            r.has_unit_eigenvalue,
            r.has_minus_one,
            r.classification.as_str()
        ));
    }
    sink.write_str(&text)?;
    sink.finish()?;

    let count = |c: PairClass| reports.iter().filter(|r| r.classification == c).count();
    let max_generic_radius = reports
        .iter()
        .filter(|r| r.classification == PairClass::Generic)
        .map(|r| r.spectral_radius)
        .reduce(f64::max);
    let p = config.decoherence_rate();
    let classification_applies = p > 0.0 && p < 1.0;
    let mut violations: Vec<String> = Vec::new();
    if classification_applies {
        for r in &reports {
            for what in spectral::classification_violations(r) {
                violations.push(format!("({}, {}): {what}", r.k, r.k_prime));
            }
        }
        if max_generic_radius.is_some_and(|m| m >= 1.0) {
            violations.push("a generic pair has spectral radius ≥ 1".into());
        }
    }
    let summary = SpectrumSummary {
        nodes: n,
        decoherence: p,
        construction: construction_name,
        pairs: reports.len(),
        diagonal_pairs: count(PairClass::DiagonalPair),
        antipodal_pairs: count(PairClass::AntipodalPair),
        generic_pairs: count(PairClass::Generic),
        max_generic_radius,
        spectral_gap: if p == 0.0 {
            0.0
        } else {
            1.0 - max_generic_radius.unwrap_or(0.0)
        },
        classification_applies,
        classification_holds: violations.is_empty(),
        violations,
    };
    let summary_json = to_json(&summary, true);
    match args.summary.as_deref() {
        Some(path) => write_file(path, &summary_json)?,
        None => eprint!("{summary_json}"),
    }
    write_manifest(
        args.manifest.as_deref(),
        "spectrum",
        config_echo(&config),
        vec![
            label(args.output.as_deref(), "<stdout>"),
            label(args.summary.as_deref(), "<stderr>"),
        ],
    )?;
    if !summary.classification_holds {
        return Err(CliError::Numerical(format!(
            "spectral classification violated: {}",
            summary.violations.join("; ")
        )));
    }
    Ok(())
}

impl ConstructionArg {
    fn into_construction(self) -> (Construction, &'static str) {
        match self {
            ConstructionArg::Definitional => (Construction::Definitional, "definitional"),
            ConstructionArg::ClosedForm => (Construction::ClosedForm, "closed-form"),
        }
    }
}

#[derive(Serialize)]
struct MixingJson<'a> {
    epsilon: f64,
    horizon: usize,
    converged: bool,
    mixing_time: Option<usize>,
    bound: Option<analysis::BoundPoint>,
    tv_trace: Vec<(usize, f64)>,
    #[serde(skip)]
    _report: &'a MixingReport,
}

pub fn mixing(args: &MixingArgs, file: &FileConfig) -> Result<(), CliError> {
    let config = resolve_walk(&args.walk, file, "up")?;
    let epsilon = require(pick(args.epsilon, file, "epsilon")?, "epsilon")?;
    if !(epsilon > 0.0) {
        return Err(CliError::Usage(format!(
            "--epsilon must be positive, got {epsilon}"
        )));
    }
    let target = match args.target {
        Some(t) => t,
        None => file.get_enum("target")?.unwrap_or(TargetArg::Averaged),
    };
    let horizon = pick(args.horizon, file, "horizon")?
        .unwrap_or_else(|| default_horizon(config.n_nodes(), epsilon));
    let stride = pick(args.trace_stride, file, "trace-stride")?
        .unwrap_or(1)
        .max(1);
    let want_bound = args.bound || file.get::<bool>("bound")?.unwrap_or(false);
    if want_bound {
        if target != TargetArg::Averaged {
            return Err(CliError::Usage(
                "--bound applies to the averaged target only".into(),
            ));
        }
        if !analysis::bound_applies(&config) {
            return Err(CliError::Usage(
                "--bound requires odd --nodes, --decoherence > 0 and --initial-coin up".into(),
            ));
        }
    }

    let report = match target {
        TargetArg::Averaged => analysis::mixing_time_averaged(&config, epsilon, horizon)?,
        TargetArg::Instantaneous => analysis::mixing_time_instantaneous(&config, epsilon, horizon)?,
    };
    let last = report.tv_trace.len().saturating_sub(1);
    let tv_trace = report
        .tv_trace
        .iter()
        .enumerate()
        .filter(|(i, _)| i % stride == 0 || *i == last)
        .map(|(_, e)| *e)
        .collect();
    let out = MixingJson {
        epsilon: report.epsilon,
        horizon: report.horizon,
        converged: report.converged,
        mixing_time: report.mixing_time,
        bound: if want_bound { report.bound } else { None },
        tv_trace,
        _report: &report,
    };
    let mut sink = Sink::open(args.output.as_deref())?;
    sink.write_str(&to_json(&out, false))?;
    sink.finish()?;
    let mut echo = config_echo(&config);
    echo["epsilon"] = json!(epsilon);
    echo["horizon"] = json!(horizon);
    echo["target"] = json!(format!("{target:?}").to_lowercase());
    write_manifest(
        args.manifest.as_deref(),
        "mixing",
        echo,
        vec![label(args.output.as_deref(), "<stdout>")],
    )
}

pub fn verify(args: &VerifyArgs) -> Result<(), CliError> {
    let names: Vec<CheckName> = if args.checks.is_empty() {
        CheckName::ALL.to_vec()
    } else {
        args.checks
            .iter()
            .map(|s| s.parse())
            .collect::<Result<_, _>>()?
    };
    let sizes = if args.quick {
        Sizes::QUICK
    } else {
        Sizes::DEFAULT
    };
    let results = map_ordered(names, |name| verify::run_check(name, sizes));
    let report = verify::VerifyReport::from_results(sizes, results);
    for c in &report.checks {
        eprintln!(
            "[{}] {:<14} measured {:e} (tolerance {:e})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name.as_str(),
            c.measured,
            c.tolerance
        );
    }
    let mut sink = Sink::open(args.output.as_deref())?;
    sink.write_str(&to_json(&report, true))?;
    sink.finish()?;
    if report.passed {
        Ok(())
    } else {
        let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        Err(CliError::Verification(failed.join(", ")))
    }
}
