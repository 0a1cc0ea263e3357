//! Command-line driver for the subwave library.
//!
//! Subcommands produce CSV tables (densities, subordinated waves, front
//! traces) or JSON reports (front-law verification, Monte Carlo and
//! discrete-derivative checks).  Every output starts with a header comment
//! embedding the tool version and a hash of the effective parameters, so a
//! result file identifies the exact run that produced it; rerunning with
//! the same configuration and seed reproduces the bytes exactly.
//!
//! Exit codes: 0 all requested checks pass, 1 a check ran but failed,
//! 2 invalid configuration or invocation, 3 a numerical stage could not
//! certify its accuracy (the stage is named on stderr).

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use subwave::asymptotics::{check_two_sided, fit_scaling, AsymptoticLaw, Side};
use subwave::error::Error as SubError;
use subwave::gfd::{
    apply_gfd, CaputoKernel, ConvolutionKernel, DistributedOrderKernel, FunctionKernel,
    TimeGridFunction,
};
use subwave::montecarlo::{mc_subordinate, sample_inverse, Histogram, RngStream};
use subwave::specfun;
use subwave::subordinators::{default_lambda_grid, ClassTag, SubordinatorSpec, Variant};
use subwave::waves::{
    cesaro_mean, front_position, make_step_waves, subordinate, tauberian_wave, FrontTrace,
    SmoothCesaroEvaluator, StepCesaroEvaluator, TraceSide, WaveProfile,
};

const VERSION: &str = env!("CARGO_PKG_VERSION");

// ---------------------------------------------------------------------------
// CLI surface.
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "subwave",
    version,
    about = "Subordinated traveling waves: densities, fronts, and checks"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct CommonOpts {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed for randomized subcommands.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Worker threads for parallel subcommands (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tabulate the inverse-subordinator density G_t(tau) as CSV `t,tau,G`.
    Density {
        #[command(flatten)]
        common: CommonOpts,
        /// Shorthand for a stable kernel of this index (instead of --config).
        #[arg(long)]
        alpha: Option<f64>,
        /// Time points in shorthand mode; repeatable.
        #[arg(long = "t", num_args = 1..)]
        t: Vec<f64>,
        /// Upper end of the tau grid.
        #[arg(long, default_value_t = 5.0)]
        tau_max: f64,
        /// Number of tau grid points.
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Tabulate the subordinated wave psi^E(x,t) as CSV `t,x,psiE`.
    Subordinate {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Trace the level-beta Cesaro front of the configured wave as CSV.
    Front {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Fit the step-wave front laws and check the two-sided front bound (JSON).
    Verify {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Compare Monte Carlo sampling against quadrature (CSV report).
    McCheck {
        #[command(flatten)]
        common: CommonOpts,
        /// Samples per point.
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        /// Parent-path step; defaults to t/250 per point.
        #[arg(long)]
        step: Option<f64>,
        /// Also write a histogram of E(t) draws at the first grid point
        /// (requires --out).
        #[arg(long)]
        histogram: bool,
    },
    /// Check the discrete generalized fractional derivative (JSON report).
    GfdCheck {
        #[command(flatten)]
        common: CommonOpts,
        /// Time step for the exactness check.
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
}

// ---------------------------------------------------------------------------
// Configuration schema.
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize, Serialize, Clone, Copy)]
#[serde(deny_unknown_fields)]
struct LogGrid {
    t_min: f64,
    t_max: f64,
    points: usize,
}

impl LogGrid {
    fn validate(&self) -> Result<(), CliError> {
        if !(self.t_min > 0.0 && self.t_max >= self.t_min) || self.points == 0 {
            return Err(CliError::Config(
                "t_grid needs 0 < t_min <= t_max and points >= 1".into(),
            ));
        }
        Ok(())
    }

    fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.t_min];
        }
        let ratio = self.t_max / self.t_min;
        (0..self.points)
            .map(|i| self.t_min * ratio.powf(i as f64 / (self.points - 1) as f64))
            .collect()
    }
}

#[derive(Debug, Deserialize, Serialize, Clone, Copy)]
#[serde(deny_unknown_fields)]
struct LinGrid {
    min: f64,
    max: f64,
    points: usize,
}

impl LinGrid {
    fn validate(&self, name: &str) -> Result<(), CliError> {
        if !(self.max >= self.min) || self.points == 0 {
            return Err(CliError::Config(format!(
                "{name} needs min <= max and points >= 1"
            )));
        }
        Ok(())
    }

    fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let h = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points).map(|i| self.min + h * i as f64).collect()
    }
}

fn default_x_grid() -> LinGrid {
    LinGrid {
        min: -10.0,
        max: 10.0,
        points: 41,
    }
}

/// Artifact file names inside the --out directory; defaults per subcommand.
#[derive(Debug, Deserialize, Serialize, Clone, Default)]
#[serde(deny_unknown_fields, default)]
struct Outputs {
    density: Option<String>,
    wave: Option<String>,
    front: Option<String>,
    report: Option<String>,
    histogram: Option<String>,
}

#[derive(Debug, Deserialize, Serialize, Clone, Copy, PartialEq)]
#[serde(rename_all = "kebab-case")]
enum ProfileKindConfig {
    Logistic,
    StepLower,
    StepUpper,
}

#[derive(Debug, Deserialize, Serialize, Clone, Copy)]
#[serde(deny_unknown_fields)]
struct ProfileConfig {
    kind: ProfileKindConfig,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentConfig {
    spec: SubordinatorSpec,
    profile: ProfileConfig,
    v: f64,
    eps: f64,
    beta: f64,
    t_grid: LogGrid,
    #[serde(default)]
    x_grid: Option<LinGrid>,
    #[serde(default)]
    outputs: Outputs,
}

impl ExperimentConfig {
    fn validate(&self) -> Result<(), CliError> {
        if !(self.v > 0.0 && self.v.is_finite()) {
            return Err(CliError::Config("v must be positive".into()));
        }
        if !(self.eps > 0.0 && self.eps < 0.5) {
            return Err(CliError::Config("eps must lie in (0, 1/2)".into()));
        }
        if !(self.beta > self.eps && self.beta < 1.0 - self.eps) {
            return Err(CliError::Config(
                "beta must lie strictly between eps and 1 - eps".into(),
            ));
        }
        self.t_grid.validate()?;
        if let Some(g) = self.x_grid {
            g.validate("x_grid")?;
        }
        Ok(())
    }

    /// The configured wave profile, plus the trace side it produces.
    fn build_profile(&self) -> Result<(WaveProfile, TraceSide), CliError> {
        let base = WaveProfile::logistic(self.v).map_err(CliError::from_sub)?;
        match self.profile.kind {
            ProfileKindConfig::Logistic => Ok((base, TraceSide::Exact)),
            ProfileKindConfig::StepLower => {
                let (lower, _, _) = make_step_waves(&base, self.eps).map_err(CliError::from_sub)?;
                Ok((lower, TraceSide::LowerWave))
            }
            ProfileKindConfig::StepUpper => {
                let (_, upper, _) = make_step_waves(&base, self.eps).map_err(CliError::from_sub)?;
                Ok((upper, TraceSide::UpperWave))
            }
        }
    }

    fn x_values(&self) -> Vec<f64> {
        self.x_grid.unwrap_or_else(default_x_grid).values()
    }
}

// ---------------------------------------------------------------------------
// Error-to-exit-code mapping.
// ---------------------------------------------------------------------------

#[derive(Debug)]
enum CliError {
    /// Invalid configuration, flags, or I/O: exit 2.
    Config(String),
    /// A numerical stage failed to certify: exit 3.
    Numerical(String),
    /// Checks ran but did not pass: exit 1.
    CheckFailed(String),
}

impl CliError {
    fn from_sub(e: SubError) -> Self {
        match e {
            SubError::Numerical { stage, .. } => CliError::Numerical(format!("{stage}: {e}")),
            SubError::NoBracket { .. } => CliError::Numerical(format!("front search: {e}")),
            SubError::StepBudget { .. } => CliError::Numerical(format!("path sampling: {e}")),
            other => CliError::Config(other.to_string()),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::CheckFailed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

fn read_config(common: &CommonOpts) -> Result<(ExperimentConfig, serde_json::Value), CliError> {
    let path = common
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("this subcommand requires --config".into()))?;
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("invalid JSON in {}: {e}", path.display())))?;
    let cfg: ExperimentConfig = serde_json::from_value(value.clone())
        .map_err(|e| CliError::Config(format!("invalid config: {e}")))?;
    cfg.validate()?;
    Ok((cfg, value))
}

/// Hash of the effective parameters that produced an output; serde_json
/// keeps object keys sorted, so the digest is canonical.
fn params_hash(params: &serde_json::Value) -> String {
    let mut hasher = Sha256::new();
    hasher.update(params.to_string().as_bytes());
    let digest = hasher.finalize();
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

fn header(params: &serde_json::Value) -> String {
    format!("# subwave {VERSION} config-hash={}\n", params_hash(params))
}

/// Resolve where an artifact goes: a named file inside --out, or stdout.
fn artifact_target(
    out: &Option<PathBuf>,
    configured: &Option<String>,
    default_name: &str,
) -> Result<Option<PathBuf>, CliError> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)
                .map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
            let name = configured
                .clone()
                .unwrap_or_else(|| default_name.to_string());
            Ok(Some(dir.join(name)))
        }
        None => Ok(None),
    }
}

fn emit(target: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match target {
        Some(path) => fs::write(path, content)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn init_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

// ---------------------------------------------------------------------------
// density
// ---------------------------------------------------------------------------

fn run_density(
    common: &CommonOpts,
    alpha: Option<f64>,
    ts: &[f64],
    tau_max: f64,
    points: usize,
) -> Result<(), CliError> {
    let (spec, outputs, ts) = match (alpha, &common.config) {
        (Some(a), None) => {
            let spec = SubordinatorSpec::stable(a).map_err(CliError::from_sub)?;
            let ts = if ts.is_empty() { vec![1.0] } else { ts.to_vec() };
            (spec, Outputs::default(), ts)
        }
        (None, Some(_)) => {
            if !ts.is_empty() {
                return Err(CliError::Config(
                    "with --config the t grid comes from the config; drop --t".into(),
                ));
            }
            let (cfg, _) = read_config(common)?;
            let ts = cfg.t_grid.values();
            (cfg.spec, cfg.outputs, ts)
        }
        _ => {
            return Err(CliError::Config(
                "density needs exactly one of --alpha or --config".into(),
            ))
        }
    };
    if !(tau_max > 0.0) || points < 2 {
        return Err(CliError::Config(
            "density needs tau_max > 0 and points >= 2".into(),
        ));
    }
    if ts.iter().any(|&t| !(t > 0.0)) {
        return Err(CliError::Config("density needs t > 0".into()));
    }
    let params = serde_json::json!({
        "command": "density",
        "spec": serde_json::to_value(&spec)
            .map_err(|e| CliError::Config(format!("spec not serializable: {e}")))?,
        "t": ts,
        "tau_max": tau_max,
        "points": points,
    });
    let mut body = header(&params);
    body.push_str("t,tau,G\n");
    for &t in &ts {
        for i in 0..points {
            let tau = tau_max * i as f64 / (points - 1) as f64;
            let g = spec.density_g(t, tau).map_err(CliError::from_sub)?;
            writeln!(body, "{t},{tau},{g}").unwrap();
        }
    }
    let target = artifact_target(&common.out, &outputs.density, "density.csv")?;
    emit(&target, &body)
}

// ---------------------------------------------------------------------------
// subordinate
// ---------------------------------------------------------------------------

fn run_subordinate(common: &CommonOpts) -> Result<(), CliError> {
    let (cfg, value) = read_config(common)?;
    let (profile, _) = cfg.build_profile()?;
    let params = serde_json::json!({ "command": "subordinate", "config": value });
    let xs = cfg.x_values();
    let ts = cfg.t_grid.values();
    let mut body = header(&params);
    body.push_str("t,x,psiE\n");
    for &t in &ts {
        for &x in &xs {
            let w = subordinate(&profile, &cfg.spec, x, t).map_err(CliError::from_sub)?;
            writeln!(body, "{t},{x},{w}").unwrap();
        }
    }
    let target = artifact_target(&common.out, &cfg.outputs.wave, "wave.csv")?;
    emit(&target, &body)
}

// ---------------------------------------------------------------------------
// front
// ---------------------------------------------------------------------------

/// Expand the bracket around the previous root until it straddles beta,
/// then bisect; on success recenter the bracket for the next t.
fn search_front(
    wave: impl Fn(f64, f64) -> subwave::Result<f64>,
    beta: f64,
    t: f64,
    bracket: &mut (f64, f64),
) -> Result<f64, CliError> {
    let (mut lo, mut hi) = *bracket;
    let mut width = (hi - lo).max(1.0);
    for _ in 0..60 {
        let w_lo = wave(lo, t).map_err(CliError::from_sub)?;
        let w_hi = wave(hi, t).map_err(CliError::from_sub)?;
        if w_lo > beta && beta > w_hi {
            let x = front_position(&wave, beta, t, lo, hi).map_err(CliError::from_sub)?;
            let pad = x.abs().max(1.0);
            *bracket = (x - pad, x + pad);
            return Ok(x);
        }
        if w_lo <= beta {
            lo -= width;
        }
        if w_hi >= beta {
            hi += width;
        }
        width *= 2.0;
    }
    Err(CliError::Numerical(format!(
        "front search: could not bracket level {beta} at t = {t}"
    )))
}

fn run_front(common: &CommonOpts) -> Result<(), CliError> {
    let (cfg, value) = read_config(common)?;
    let (profile, side) = cfg.build_profile()?;
    let params = serde_json::json!({ "command": "front", "config": value });
    let ts = cfg.t_grid.values();
    let mut trace = FrontTrace {
        beta: cfg.beta,
        t_values: Vec::new(),
        x_values: Vec::new(),
        side,
    };
    // Step waves go through the exact transform of the integrated survival
    // function (cheap at any t).  The smooth wave uses its own transform
    // when the kernel behaves on the inversion contour, and direct double
    // quadrature otherwise.
    let smooth_transform_ok = matches!(
        cfg.spec.variant(),
        Variant::Stable { .. } | Variant::DistributedOrder { .. }
    );
    let mut bracket = (-10.0, 10.0);
    for &t in &ts {
        let result = match side {
            TraceSide::Exact if smooth_transform_ok => {
                let eval = SmoothCesaroEvaluator::new(&profile, &cfg.spec, t)
                    .map_err(CliError::from_sub)?;
                search_front(|x, _| eval.eval(x), cfg.beta, t, &mut bracket)
            }
            TraceSide::Exact => {
                let wave = |x: f64, tt: f64| {
                    cesaro_mean(
                        |s| subordinate(&profile, &cfg.spec, x, s).unwrap_or(f64::NAN),
                        tt,
                        1e-7,
                    )
                };
                search_front(wave, cfg.beta, t, &mut bracket)
            }
            _ => {
                let eval = StepCesaroEvaluator::new(&cfg.spec, &profile, t)
                    .map_err(CliError::from_sub)?;
                search_front(|x, _| eval.eval(x), cfg.beta, t, &mut bracket)
            }
        };
        match result {
            Ok(x) => {
                trace.t_values.push(t);
                trace.x_values.push(x);
            }
            Err(e) => {
                let msg = match &e {
                    CliError::Config(m) | CliError::Numerical(m) | CliError::CheckFailed(m) => m,
                };
                eprintln!("front: skipping t = {t}: {msg}");
            }
        }
    }
    if trace.is_empty() && !ts.is_empty() {
        return Err(CliError::Numerical(
            "front tracing: no grid point yielded a front position".into(),
        ));
    }
    let mut body = header(&params);
    body.push_str(&trace.to_csv());
    let target = artifact_target(&common.out, &cfg.outputs.front, "front.csv")?;
    emit(&target, &body)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct VerifyReport {
    class: subwave::subordinators::ClassReport,
    lower_fit: subwave::asymptotics::FitReport,
    upper_fit: subwave::asymptotics::FitReport,
    bound_report: subwave::asymptotics::BoundReport,
    passed: bool,
}

fn run_verify(common: &CommonOpts) -> Result<(), CliError> {
    let (cfg, value) = read_config(common)?;
    let class = cfg.spec.class_tag();
    if matches!(class, ClassTag::Unclassified) {
        return Err(CliError::Config(
            "verify needs a kernel with a known small-lambda class (stable or distributed-order)"
                .into(),
        ));
    }
    let params = serde_json::json!({ "command": "verify", "config": value });

    // 1. Certify the kernel-transform asymptote on the default lambda grid.
    let class_report = cfg
        .spec
        .verify_class(&default_lambda_grid())
        .map_err(CliError::from_sub)?;

    // 2. Fit the lower and upper step-wave Cesaro front traces to their
    //    closed laws: the exponent for the power class, the coefficient
    //    for the logarithmic classes.
    let base = WaveProfile::logistic(cfg.v).map_err(CliError::from_sub)?;
    let (lower_prof, upper_prof, levels) =
        make_step_waves(&base, cfg.eps).map_err(CliError::from_sub)?;
    let lower_law = AsymptoticLaw::new(class, Side::Lower, cfg.v, cfg.eps, cfg.beta, levels.x_minus)
        .map_err(CliError::from_sub)?;
    let upper_law = AsymptoticLaw::new(class, Side::Upper, cfg.v, cfg.eps, cfg.beta, levels.x_plus)
        .map_err(CliError::from_sub)?;
    let ts = cfg.t_grid.values();
    let fit_tol = match class {
        ClassTag::C1 { .. } => 0.05,
        _ => 0.10,
    };
    let mut fits = Vec::new();
    for (profile, law, offset, trace_side) in [
        (&lower_prof, &lower_law, levels.x_minus, TraceSide::LowerWave),
        (&upper_prof, &upper_law, levels.x_plus, TraceSide::UpperWave),
    ] {
        let mut trace = FrontTrace {
            beta: cfg.beta,
            t_values: Vec::new(),
            x_values: Vec::new(),
            side: trace_side,
        };
        let mut bracket = (offset - 1.0, offset + 10.0);
        for &t in &ts {
            let eval =
                StepCesaroEvaluator::new(&cfg.spec, profile, t).map_err(CliError::from_sub)?;
            let x = search_front(|x, _| eval.eval(x), cfg.beta, t, &mut bracket)?;
            trace.t_values.push(t);
            trace.x_values.push(x);
        }
        fits.push(fit_scaling(&trace, law, fit_tol).map_err(CliError::from_sub)?);
    }
    let upper_fit = fits.pop().unwrap();
    let lower_fit = fits.pop().unwrap();

    // 3. Check the smooth wave's front against the two-sided front laws.
    //    The front is evaluated through the Laplace-domain route (transform
    //    at lambda = 1/t), where the comparison against both step laws is
    //    exact up to slowly varying corrections for every kernel class.
    let mut tau_trace = FrontTrace {
        beta: cfg.beta,
        t_values: Vec::new(),
        x_values: Vec::new(),
        side: TraceSide::Exact,
    };
    let mut bracket = (-10.0, 10.0);
    for &t in &ts {
        let x = search_front(
            |x, tt| tauberian_wave(&base, &cfg.spec, x, tt),
            cfg.beta,
            t,
            &mut bracket,
        )?;
        tau_trace.t_values.push(t);
        tau_trace.x_values.push(x);
    }
    let bound_report = check_two_sided(&tau_trace, &lower_law, &upper_law, 0.0, None)
        .map_err(CliError::from_sub)?;

    let passed = class_report.passed && lower_fit.pass && upper_fit.pass && bound_report.passed;
    let report = VerifyReport {
        class: class_report,
        lower_fit,
        upper_fit,
        bound_report,
        passed,
    };
    let mut body = header(&params);
    body.push_str(&serde_json::to_string_pretty(&report).unwrap());
    body.push('\n');
    let target = artifact_target(&common.out, &cfg.outputs.report, "verify.json")?;
    emit(&target, &body)?;
    if !passed {
        return Err(CliError::CheckFailed("verify: checks did not pass".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// mc-check
// ---------------------------------------------------------------------------

fn run_mc_check(
    common: &CommonOpts,
    samples: u64,
    step: Option<f64>,
    histogram: bool,
) -> Result<(), CliError> {
    let (cfg, value) = read_config(common)?;
    if !matches!(
        cfg.spec.variant(),
        Variant::Stable { .. } | Variant::Gamma { .. }
    ) {
        return Err(CliError::Config(
            "mc-check supports stable and gamma kernels only".into(),
        ));
    }
    if samples < 100 {
        return Err(CliError::Config("mc-check needs --samples >= 100".into()));
    }
    if histogram && common.out.is_none() {
        return Err(CliError::Config("--histogram requires --out".into()));
    }
    let (profile, _) = cfg.build_profile()?;
    let xs = cfg.x_values();
    let ts = cfg.t_grid.values();
    if xs.len() * ts.len() > 64 {
        return Err(CliError::Config(
            "mc-check grid too large: at most 64 (x,t) points".into(),
        ));
    }
    let params = serde_json::json!({
        "command": "mc-check",
        "config": value,
        "samples": samples,
        "step": step,
        "seed": common.seed,
    });

    let points: Vec<(usize, f64, f64)> = ts
        .iter()
        .flat_map(|&t| xs.iter().map(move |&x| (t, x)))
        .enumerate()
        .map(|(i, (t, x))| (i, t, x))
        .collect();
    use rayon::prelude::*;
    let rows: Vec<Result<(f64, f64, f64, f64, f64, bool), CliError>> = points
        .par_iter()
        .map(|&(i, t, x)| {
            let h = step.unwrap_or(t / 250.0);
            if !(h > 0.0) {
                return Err(CliError::Config("mc-check needs step > 0".into()));
            }
            let truth = subordinate(&profile, &cfg.spec, x, t).map_err(CliError::from_sub)?;
            let mut rng = RngStream::new(common.seed, i as u64).rng();
            let est = mc_subordinate(&profile, &cfg.spec, x, t, samples, h, &mut rng)
                .map_err(CliError::from_sub)?;
            // Gate: three standard errors plus the one-step discretization
            // bias bound (worst-case wave slope is below 0.6 per unit of vE).
            let tol = 3.0 * est.std_error + 0.6 * cfg.v * h;
            let ok = (est.mean - truth).abs() <= tol;
            Ok((t, x, truth, est.mean, est.std_error, ok))
        })
        .collect();

    let mut body = header(&params);
    body.push_str("t,x,psiE,mc_mean,mc_se,pass\n");
    let mut all_ok = true;
    for row in rows {
        let (t, x, truth, mean, se, ok) = row?;
        all_ok &= ok;
        writeln!(
            body,
            "{t},{x},{truth},{mean},{se},{}",
            if ok { 1 } else { 0 }
        )
        .unwrap();
    }
    let target = artifact_target(&common.out, &cfg.outputs.wave, "mc-check.csv")?;
    emit(&target, &body)?;

    if histogram {
        let (_, t, _) = points[0];
        let h = step.unwrap_or(t / 250.0);
        let mut rng = RngStream::new(common.seed, u64::MAX).rng();
        let mut draws = Vec::with_capacity(samples as usize);
        for _ in 0..samples {
            draws.push(sample_inverse(&cfg.spec, t, h, &mut rng).map_err(CliError::from_sub)?);
        }
        let max = draws.iter().cloned().fold(0.0_f64, f64::max);
        let hi = if max > 0.0 { max * (1.0 + 1e-12) } else { 1.0 };
        let hist = Histogram::new(&draws, 0.0, hi, 40).map_err(CliError::from_sub)?;
        let mut hist_body = header(&params);
        hist_body.push_str(&hist.to_csv());
        let hist_target = artifact_target(&common.out, &cfg.outputs.histogram, "mc-hist.csv")?;
        emit(&hist_target, &hist_body)?;
    }

    if !all_ok {
        return Err(CliError::CheckFailed(
            "mc-check: a point fell outside three standard errors plus bias".into(),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// gfd-check
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct GfdReport {
    kernel: String,
    linear_value: f64,
    linear_expected: f64,
    linear_rel_err: f64,
    refinement_ratios: Vec<f64>,
    passed: bool,
}

/// The two operator checks shared by every kernel: exactness on linear
/// data, then self-convergence under grid refinement on quadratic data.
fn gfd_report<K: ConvolutionKernel>(
    kernel: &K,
    name: String,
    h: f64,
) -> Result<GfdReport, CliError> {
    // The discrete rule integrates piecewise-linear data exactly, so on
    // u(t) = t the value at t = 1 must equal the cumulative kernel there.
    let n = (1.0 / h).round() as usize;
    let u = TimeGridFunction::from_fn(h, n + 1, |t| t).map_err(CliError::from_sub)?;
    let linear_value = apply_gfd(kernel, &u, n).map_err(CliError::from_sub)?;
    let linear_expected = kernel
        .cumulative(n as f64 * h)
        .map_err(CliError::from_sub)?;
    let linear_rel_err = (linear_value - linear_expected).abs() / linear_expected.abs();

    // Successive-difference ratios near 2 on u(t) = t^2 demonstrate at
    // least first-order convergence under refinement.
    let mut values = Vec::new();
    for &m in &[250usize, 500, 1000, 2000] {
        let hm = 1.0 / m as f64;
        let u = TimeGridFunction::from_fn(hm, m + 1, |t| t * t).map_err(CliError::from_sub)?;
        values.push(apply_gfd(kernel, &u, m).map_err(CliError::from_sub)?);
    }
    let diffs: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let ratios: Vec<f64> = diffs.windows(2).map(|w| w[0] / w[1]).collect();

    let passed = linear_rel_err <= 1e-8 && ratios.iter().all(|&r| r >= 1.8);
    Ok(GfdReport {
        kernel: name,
        linear_value,
        linear_expected,
        linear_rel_err,
        refinement_ratios: ratios,
        passed,
    })
}

fn run_gfd_check(common: &CommonOpts, h: f64) -> Result<(), CliError> {
    let (cfg, value) = read_config(common)?;
    if !(h > 0.0 && h < 0.5) {
        return Err(CliError::Config("gfd-check needs 0 < step < 0.5".into()));
    }
    let params = serde_json::json!({ "command": "gfd-check", "config": value, "step": h });

    let name = format!("{:?}", cfg.spec.variant());
    let report = match cfg.spec.variant() {
        Variant::Stable { alpha } => {
            let kernel = CaputoKernel::new(*alpha).map_err(CliError::from_sub)?;
            gfd_report(&kernel, name, h)?
        }
        Variant::DistributedOrder { weight } => {
            let kernel = DistributedOrderKernel::new(weight.clone());
            gfd_report(&kernel, name, h)?
        }
        Variant::Gamma { a, b } => {
            let (a, b) = (*a, *b);
            let kernel = FunctionKernel::new(move |t: f64| {
                a * specfun::exp_integral_e1(b * t).unwrap_or(f64::NAN)
            });
            gfd_report(&kernel, name, h)?
        }
        Variant::LaplaceSymbolOnly { .. } => {
            return Err(CliError::Config(
                "gfd-check needs a kernel with a time-domain representation".into(),
            ))
        }
    };

    let passed = report.passed;
    let mut body = header(&params);
    body.push_str(&serde_json::to_string_pretty(&report).unwrap());
    body.push('\n');
    let target = artifact_target(&common.out, &cfg.outputs.report, "gfd-check.json")?;
    emit(&target, &body)?;
    if !passed {
        return Err(CliError::CheckFailed(
            "gfd-check: checks did not pass".into(),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.cmd {
        Cmd::Density {
            common,
            alpha,
            t,
            tau_max,
            points,
        } => {
            init_threads(common.threads);
            run_density(common, *alpha, t, *tau_max, *points)
        }
        Cmd::Subordinate { common } => {
            init_threads(common.threads);
            run_subordinate(common)
        }
        Cmd::Front { common } => {
            init_threads(common.threads);
            run_front(common)
        }
        Cmd::Verify { common } => {
            init_threads(common.threads);
            run_verify(common)
        }
        Cmd::McCheck {
            common,
            samples,
            step,
            histogram,
        } => {
            init_threads(common.threads);
            run_mc_check(common, *samples, *step, *histogram)
        }
        Cmd::GfdCheck { common, step } => {
            init_threads(common.threads);
            run_gfd_check(common, *step)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = match &e {
                CliError::Config(m) | CliError::Numerical(m) | CliError::CheckFailed(m) => m,
            };
            eprintln!("subwave: {msg}");
            ExitCode::from(e.exit_code())
        }
    }
}
