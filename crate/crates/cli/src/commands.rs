use std::fmt::Write as _;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use rotlog_core::fitting::{fit_report, fit_scaling_with, FitFilter, FitOptions, FreeSet};
use rotlog_core::noise::{estimate_with, NoiseChannel, SimOptions, SimulationResult, Simulator, DEFAULT_ETA};
use rotlog_core::rotation::commutator_table_report;
use rotlog_core::scaling::{curve_sweep, effective_distance, log_grid, plog_fitted, ScalingLaw};
use rotlog_core::series_io::{format_sci, read_series_csv, write_series_csv, SeriesDefaults};
use rotlog_core::{Convention, EncodingMode, LogicalAmplitudes, NoiseModel, Regime, RotationParams, ScalingParams};
use serde::Serialize;

use crate::args::{DistanceArgs, DrSweepArgs, FitArgs, ScalingArgs, SimulateArgs};
use crate::config::{Config, Floats, Ints, Span};

pub const COMMON_KEYS: [&str; 3] = ["out", "jobs", "gnuplot"];
pub const DISTANCE_KEYS: [&str; 5] = ["d", "lambda", "theta", "phi", "points"];
pub const SCALING_KEYS: [&str; 13] = [
    "model", "regime", "d", "lambda", "theta", "phi", "p_min", "p_max", "points", "alpha", "beta", "gamma", "delta",
];
pub const FIT_KEYS: [&str; 13] = [
    "input", "model", "regime", "lambda", "theta", "phi", "free", "filter", "d_min", "p_min", "p_max", "max_iter",
    "format",
];
pub const SIMULATE_KEYS: [&str; 10] = [
    "n",
    "theta",
    "phi",
    "model",
    "p",
    "eta",
    "trials",
    "seed",
    "placement",
    "encoding",
];
pub const DR_SWEEP_KEYS: [&str; 5] = ["model", "regime", "dr", "points", "p"];

/// Environment variable consulted when no seed is given.
pub const SEED_ENV: &str = "ROTLOG_SEED";

/// One output file. `plot` is a gnuplot script with `@DATA@` standing for the
/// data file name.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub suffix: Option<String>,
    pub body: String,
    pub plot: Option<String>,
}

impl Artifact {
    fn new(body: String, plot: Option<String>) -> Self {
        Self {
            suffix: None,
            body,
            plot,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    NotConverged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub artifacts: Vec<Artifact>,
    pub status: Status,
}

impl Run {
    fn ok(artifacts: Vec<Artifact>) -> Self {
        Self {
            artifacts,
            status: Status::Success,
        }
    }
}

/// Resolved `key = value` pairs echoed at the top of every output.
#[derive(Debug, Default)]
struct Echo(Vec<String>);

impl Echo {
    fn new(command: &str) -> Self {
        Echo(vec![format!("rotlog {command} {}", env!("CARGO_PKG_VERSION"))])
    }

    fn add(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.0.push(format!("{key} = {value}"));
        self
    }

    fn lines(&self) -> &[String] {
        &self.0
    }

    fn comment_block(&self) -> String {
        self.0.iter().map(|l| format!("# {l}\n")).collect()
    }
}

fn regimes(r: Regime) -> Vec<Regime> {
    match r {
        Regime::Combined => vec![Regime::Small, Regime::Large],
        r => vec![r],
    }
}

fn equation(model: NoiseModel, regime: Regime) -> ScalingParams {
    ScalingParams::table1(model, regime).expect("small and large equations exist for both models")
}

fn describe(p: &ScalingParams) -> String {
    format!(
        "{} {}: alpha = {}, beta = {}, gamma = {}, delta = {}",
        p.model, p.regime, p.alpha, p.beta, p.gamma, p.delta
    )
}

const GNUPLOT_PREAMBLE: &str = "set datafile separator \",\"\nset key autotitle columnhead\n";

pub fn distance(a: &DistanceArgs, cfg: &Config) -> Result<Run> {
    let d = cfg.pick(a.d, "d", 5u32)?;
    let lambdas = cfg.pick(a.lambda.clone(), "lambda", Floats(vec![1.0]))?;
    let theta = cfg.pick(a.theta, "theta", Span { lo: 0.1, hi: 1.5 })?;
    let phi = cfg.pick_opt(a.phi, "phi")?;
    let points = cfg.pick(a.points, "points", 15usize)?;
    ensure!(d >= 1, "--d must be at least 1");
    ensure!(!lambdas.0.is_empty(), "--lambda needs at least one value");
    ensure!(points >= 1, "--points must be at least 1");
    if let Some(&bad) = lambdas.0.iter().find(|l| !(**l >= 0.0 && l.is_finite())) {
        bail!("--lambda values must be finite and >= 0, got {bad}");
    }

    let thetas = theta.linspace(points);
    let grid: Vec<(f64, f64)> = match phi {
        None => thetas.iter().map(|&t| (t, t)).collect(),
        Some(p) => {
            let phis = p.linspace(points);
            thetas.iter().flat_map(|&t| phis.iter().map(move |&f| (t, f))).collect()
        }
    };

    let split = lambdas.0.len() > 1;
    let mut artifacts = Vec::with_capacity(lambdas.0.len());
    for &lambda in &lambdas.0 {
        let mut echo = Echo::new("distance");
        echo.add("d", d)
            .add("lambda", if split { lambda.to_string() } else { lambdas.to_string() })
            .add("theta", theta)
            .add("phi", phi.map_or("theta".to_string(), |p| p.to_string()))
            .add("points", points);
        let mut body = echo.comment_block();
        body.push_str("theta,phi,lambda,d,d_R\n");
        for &(t, f) in &grid {
            let d_r = effective_distance(d, lambda, t, f)?;
            writeln!(body, "{t:.6},{f:.6},{lambda},{d},{d_r:.9e}")?;
        }
        let plot = match phi {
            None => format!(
                "{GNUPLOT_PREAMBLE}set xlabel \"theta = phi\"\nset ylabel \"d_R\"\n\
                 plot \"@DATA@\" using 1:5 with linespoints title \"d = {d}, lambda = {lambda}\"\n"
            ),
            Some(_) => format!(
                "{GNUPLOT_PREAMBLE}set xlabel \"theta\"\nset ylabel \"phi\"\nset zlabel \"d_R\"\n\
                 splot \"@DATA@\" using 1:2:5 with points title \"d = {d}, lambda = {lambda}\"\n"
            ),
        };
        artifacts.push(Artifact {
            suffix: split.then(|| format!("lambda{lambda}")),
            body,
            plot: Some(plot),
        });
    }
    Ok(Run::ok(artifacts))
}

pub fn scaling(a: &ScalingArgs, cfg: &Config) -> Result<Run> {
    let model = cfg.pick(a.model, "model", NoiseModel::Sd)?;
    let regime = cfg.pick(a.regime, "regime", Regime::Small)?;
    let ds = cfg.pick(a.d.clone(), "d", Ints((8..=16).collect()))?;
    let lambda = cfg.pick(a.lambda, "lambda", 0.0)?;
    let theta = cfg.pick(a.theta, "theta", 0.0)?;
    let phi = cfg.pick(a.phi, "phi", 0.0)?;
    let p_min = cfg.pick(a.p_min, "p_min", 1e-4)?;
    let p_max = cfg.pick(a.p_max, "p_max", 1e-2)?;
    let points = cfg.pick(a.points, "points", 41usize)?;
    let overrides = [
        cfg.pick_opt(a.alpha, "alpha")?,
        cfg.pick_opt(a.beta, "beta")?,
        cfg.pick_opt(a.gamma, "gamma")?,
        cfg.pick_opt(a.delta, "delta")?,
    ];
    ensure!(!ds.0.is_empty(), "--d needs at least one distance");
    ensure!(p_max < 1.0, "--p-max must be below 1, got {p_max}");
    let grid = log_grid(p_min, p_max, points)?;
    let distances =
        ds.0.iter()
            .map(|&d| Ok((d, effective_distance(d, lambda, theta, phi)?)))
            .collect::<Result<Vec<_>>>()?;

    let mut echo = Echo::new("scaling");
    echo.add("model", model)
        .add("regime", regime)
        .add("d", &ds)
        .add("lambda", lambda)
        .add("theta", theta)
        .add("phi", phi)
        .add("p_min", p_min)
        .add("p_max", p_max)
        .add("points", points);
    let mut comments = echo.lines().to_vec();
    let mut series = Vec::new();
    let mut plot = format!(
        "{GNUPLOT_PREAMBLE}set logscale xy\nset format y \"%.0e\"\nset xlabel \"p_phy\"\nset ylabel \"p_log\"\nplot"
    );
    let mut first = true;
    for r in regimes(regime) {
        let mut params = equation(model, r);
        for (slot, v) in [
            &mut params.alpha,
            &mut params.beta,
            &mut params.gamma,
            &mut params.delta,
        ]
        .into_iter()
        .zip(overrides)
        {
            if let Some(v) = v {
                *slot = v;
            }
        }
        params.validate()?;
        let (cx, cy) = rotlog_core::scaling::crossing_point(&params);
        comments.push(describe(&params));
        comments.push(format!(
            "crossing {r}: p_phy = {}, p_log = {}",
            format_sci(cx),
            format_sci(cy)
        ));
        series.extend(curve_sweep(&ScalingLaw::Fitted(params), &distances, &grid)?);
        for &(d, _) in &distances {
            let sep = if first { " " } else { ", \\\n     " };
            first = false;
            write!(
                plot,
                "{sep}\"@DATA@\" using 5:((strcol(2) eq \"{r}\" && $3 == {d}) ? $6 : 1/0) with lines title \"{r} d = {d}\""
            )?;
        }
    }
    plot.push('\n');
    let mut body = Vec::new();
    write_series_csv(&mut body, &series, &comments)?;
    Ok(Run::ok(vec![Artifact::new(String::from_utf8(body)?, Some(plot))]))
}

#[derive(Debug, Serialize)]
struct FitJson<'a> {
    config: &'a [String],
    points_total: usize,
    points_used: usize,
    converged: bool,
    iterations: usize,
    residual_rms: f64,
    rows: Vec<rotlog_core::scaling::TableRow>,
}

pub fn fit(a: &FitArgs, cfg: &Config) -> Result<Run> {
    let Some(input) = cfg.pick_opt::<PathBuf>(a.input.clone(), "input")? else {
        bail!("missing input CSV");
    };
    let lambda = cfg.pick(a.lambda, "lambda", 0.0)?;
    let theta = cfg.pick(a.theta, "theta", 0.0)?;
    let phi = cfg.pick(a.phi, "phi", 0.0)?;
    let free_text = cfg.pick(a.free.clone(), "free", "all".to_string())?;
    let free = FreeSet::parse(&free_text)?;
    let filter_name = cfg.pick(a.filter.clone(), "filter", "table".to_string())?;
    let mut filter = match filter_name.as_str() {
        "table" => FitFilter::table(),
        "low-p" => FitFilter::low_p(),
        "none" => FitFilter::default(),
        other => bail!("unknown filter `{other}`; expected table, low-p or none"),
    };
    if let Some(v) = cfg.pick_opt(a.d_min, "d_min")? {
        filter.min_d = Some(v);
    }
    if let Some(v) = cfg.pick_opt(a.p_min, "p_min")? {
        filter.min_p_phy = Some(v);
    }
    if let Some(v) = cfg.pick_opt(a.p_max, "p_max")? {
        filter.max_p_phy = Some(v);
    }
    let max_iter = cfg.pick(a.max_iter, "max_iter", FitOptions::default().max_iter)?;
    let format = cfg.pick(a.format.clone(), "format", "text".to_string())?;
    ensure!(max_iter >= 1, "--max-iter must be at least 1");
    ensure!(
        format == "text" || format == "json",
        "unknown format `{format}`; expected text or json"
    );
    ensure!(
        lambda >= 0.0 && lambda.is_finite(),
        "--lambda must be finite and >= 0, got {lambda}"
    );

    let flag_model = cfg.pick_opt(a.model, "model")?;
    let flag_regime = cfg.pick_opt(a.regime, "regime")?;
    let map = |d: u32| effective_distance(d, lambda, theta, phi).unwrap_or(f64::NAN);
    let defaults = SeriesDefaults {
        model: flag_model.unwrap_or(NoiseModel::Sd),
        regime: flag_regime.unwrap_or(Regime::Small),
        effective_distance: &map,
    };
    let file = File::open(&input).with_context(|| format!("opening {}", input.display()))?;
    let series = read_series_csv(BufReader::new(file), &defaults).with_context(|| input.display().to_string())?;
    ensure!(!series.is_empty(), "{} holds no data rows", input.display());

    // a file that names one model and regime throughout sets the defaults
    let unanimous = |f: &dyn Fn(&rotlog_core::DataSeries) -> String| {
        let first = f(&series[0]);
        series.iter().all(|s| f(s) == first)
    };
    let model = flag_model.unwrap_or(if unanimous(&|s| s.model.to_string()) {
        series[0].model
    } else {
        defaults.model
    });
    let regime = flag_regime.unwrap_or(if unanimous(&|s| s.regime.to_string()) {
        series[0].regime
    } else {
        defaults.regime
    });

    let total: usize = series.iter().map(|s| s.points.len()).sum();
    let kept = filter.apply(&series);
    let used: usize = kept.iter().map(|s| s.points.len()).sum();
    log::info!("fitting {used} of {total} points");

    let mut init = equation(
        model,
        if regime == Regime::Combined {
            Regime::Small
        } else {
            regime
        },
    );
    init.regime = regime;
    let opts = FitOptions {
        free,
        max_iter,
        ..FitOptions::default()
    };
    let result = fit_scaling_with(&kept, &init, &opts)?;

    let mut echo = Echo::new("fit");
    echo.add("input", input.display())
        .add("model", model)
        .add("regime", regime)
        .add("lambda", lambda)
        .add("theta", theta)
        .add("phi", phi)
        .add("free", &free_text)
        .add("filter", &filter_name)
        .add("d_min", filter.min_d.map_or("-".to_string(), |v| v.to_string()))
        .add("p_min", filter.min_p_phy.map_or("-".to_string(), |v| v.to_string()))
        .add("p_max", filter.max_p_phy.map_or("-".to_string(), |v| v.to_string()))
        .add("max_iter", max_iter);
    let body = if format == "json" {
        let mut s = serde_json::to_string_pretty(&FitJson {
            config: echo.lines(),
            points_total: total,
            points_used: used,
            converged: result.converged,
            iterations: result.iterations,
            residual_rms: result.residual_rms,
            rows: vec![result.row()],
        })?;
        s.push('\n');
        s
    } else {
        let mut s = echo.comment_block();
        writeln!(s, "points: {used} of {total}")?;
        writeln!(s, "converged: {}", result.converged)?;
        writeln!(s, "iterations: {}", result.iterations)?;
        writeln!(s, "residual_rms: {}", format_sci(result.residual_rms))?;
        s.push_str(&fit_report(&[result.row()]).text);
        s
    };
    Ok(Run {
        artifacts: vec![Artifact::new(body, None)],
        status: if result.converged {
            Status::Success
        } else {
            Status::NotConverged
        },
    })
}

#[derive(Debug, Serialize)]
struct SimulateJson {
    #[serde(flatten)]
    result: SimulationResult,
    failures: u64,
    placement: String,
    encoding: String,
    version: &'static str,
}

fn seed_from_env() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .with_context(|| format!("{SEED_ENV} = `{v}` is not an unsigned integer")),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(e).context(SEED_ENV),
    }
}

pub fn simulate(a: &SimulateArgs, cfg: &Config) -> Result<Run> {
    let n = cfg.pick(a.n, "n", 7usize)?;
    let theta = cfg.pick(a.theta, "theta", 0.0)?;
    let phi = cfg.pick(a.phi, "phi", 0.0)?;
    let model = cfg.pick(a.model, "model", NoiseModel::Sd)?;
    let p = cfg.pick(a.p, "p", 1e-3)?;
    let eta = cfg.pick(a.eta, "eta", DEFAULT_ETA)?;
    let trials = cfg.pick(a.trials, "trials", 10_000u64)?;
    let seed = match cfg.pick_opt(a.seed, "seed")? {
        Some(s) => s,
        None => seed_from_env()?.unwrap_or(0),
    };
    let opts = SimOptions {
        placement: cfg.pick(a.placement, "placement", Default::default())?,
        encoding: cfg.pick(a.encoding, "encoding", EncodingMode::Ghz)?,
        amplitudes: LogicalAmplitudes::plus(),
    };
    let channel = NoiseChannel::new(model, p, eta)?;
    let rot = RotationParams::angles(theta, phi, Convention::HalfAngle);
    let sim = Simulator::new(n, &rot, &opts)?;
    log::info!(
        "{n} qubits, {} gates, {} noise sites",
        sim.circuit().len(),
        sim.noise_sites()
    );
    let est = estimate_with(&sim, &channel, trials, seed)?;
    let out = SimulateJson {
        result: SimulationResult::new(n, &rot, &channel, seed, &est),
        failures: est.failures,
        placement: opts.placement.to_string(),
        encoding: opts.encoding.to_string(),
        version: env!("CARGO_PKG_VERSION"),
    };
    let mut body = serde_json::to_string_pretty(&out)?;
    body.push('\n');
    Ok(Run::ok(vec![Artifact::new(body, None)]))
}

pub fn dr_sweep(a: &DrSweepArgs, cfg: &Config) -> Result<Run> {
    let model = cfg.pick(a.model, "model", NoiseModel::Si)?;
    let regime = cfg.pick(a.regime, "regime", Regime::Combined)?;
    let dr = cfg.pick(a.dr, "dr", Span { lo: 0.0, hi: 22.0 })?;
    let points = cfg.pick(a.points, "points", 23usize)?;
    let ps = cfg.pick(a.p.clone(), "p", Floats(vec![1e-3, 1e-4]))?;
    ensure!(dr.lo >= 0.0, "--dr must not be negative");
    ensure!(points >= 1, "--points must be at least 1");
    ensure!(!ps.0.is_empty(), "--p needs at least one value");
    if let Some(&bad) = ps.0.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
        bail!("--p values must lie in (0, 1), got {bad}");
    }

    let mut echo = Echo::new("dr-sweep");
    echo.add("model", model)
        .add("regime", regime)
        .add("dr", dr)
        .add("points", points)
        .add("p", &ps);
    let mut body = echo.comment_block();
    let eqs: Vec<ScalingParams> = regimes(regime).into_iter().map(|r| equation(model, r)).collect();
    for e in &eqs {
        writeln!(body, "# {}", describe(e))?;
    }
    body.push_str("model,regime,d_R,p_phy,p_log\n");
    let mut plot = format!(
        "{GNUPLOT_PREAMBLE}set logscale y\nset format y \"%.0e\"\nset xlabel \"d_R\"\nset ylabel \"p_log\"\nplot"
    );
    let mut first = true;
    for e in &eqs {
        for &p in &ps.0 {
            for d_r in dr.linspace(points) {
                writeln!(
                    body,
                    "{model},{},{d_r},{},{}",
                    e.regime,
                    format_sci(p),
                    format_sci(plog_fitted(p, e, d_r))
                )?;
            }
            let sep = if first { " " } else { ", \\\n     " };
            first = false;
            write!(
                plot,
                "{sep}\"@DATA@\" using 3:((strcol(2) eq \"{}\" && $4 == {p:e}) ? $5 : 1/0) with linespoints title \"{} p = {p:e}\"",
                e.regime, e.regime
            )?;
        }
    }
    plot.push('\n');
    Ok(Run::ok(vec![Artifact::new(body, Some(plot))]))
}

pub fn commutator_table() -> Result<Run> {
    let report = commutator_table_report();
    let max_dev = report.iter().map(|e| e.deviation).fold(0.0, f64::max);
    let mut body = Echo::new("commutator-table").comment_block();
    writeln!(body, "# alpha = pi/4, max deviation = {max_dev:.3e}")?;
    body.push_str("axis,target,row,col,ref_re,ref_im,re,im,deviation\n");
    for e in &report {
        writeln!(
            body,
            "{:?},{:?},{},{},{:.4},{:.4},{:.10},{:.10},{:.3e}",
            e.axis, e.target, e.row, e.col, e.reference[0], e.reference[1], e.computed[0], e.computed[1], e.deviation
        )?;
    }
    Ok(Run::ok(vec![Artifact::new(body, None)]))
}
