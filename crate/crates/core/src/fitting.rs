//! Least-squares fit of `p_log = α (p_phy/β)^{γ d_R − δ}` in log space.
//!
//! The parameters are `x = (ln α, ln β, γ, δ)` and the residual of a point is
//! `ln p_log − ln α − (γ d_R − δ)(ln p_phy − ln β)`. A Levenberg–Marquardt
//! loop with the analytic Jacobian runs from a log-spaced grid of `β` starts;
//! the lowest residual wins and ties go to the smaller `β`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scaling::{plog_fitted, DataSeries, NoiseModel, ScalingParams, TableRow};

const NPAR: usize = 4;
const NAMES: [&str; NPAR] = ["alpha", "beta", "gamma", "delta"];

/// Which of `α, β, γ, δ` the fit may move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeSet {
    pub alpha: bool,
    pub beta: bool,
    pub gamma: bool,
    pub delta: bool,
}

impl FreeSet {
    pub const ALL: FreeSet = FreeSet {
        alpha: true,
        beta: true,
        gamma: true,
        delta: true,
    };

    fn mask(&self) -> [bool; NPAR] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }

    pub fn count(&self) -> usize {
        self.mask().iter().filter(|&&b| b).count()
    }

    /// Parses a comma-separated list such as `alpha,beta` or `all`.
    pub fn parse(s: &str) -> Result<Self> {
        if s.trim() == "all" {
            return Ok(Self::ALL);
        }
        let mut f = FreeSet {
            alpha: false,
            beta: false,
            gamma: false,
            delta: false,
        };
        for name in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match name {
                "alpha" => f.alpha = true,
                "beta" => f.beta = true,
                "gamma" => f.gamma = true,
                "delta" => f.delta = true,
                other => return Err(Error::invalid("free", format!("unknown parameter `{other}`"))),
            }
        }
        if f.count() == 0 {
            return Err(Error::invalid("free", "at least one parameter must be free"));
        }
        Ok(f)
    }
}

/// Points kept by the fit; `None` bounds are open.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FitFilter {
    pub min_d: Option<u32>,
    pub max_p_phy: Option<f64>,
    pub min_p_phy: Option<f64>,
}

impl FitFilter {
    /// `d >= 2` and `p_phy <= 0.004`.
    pub fn table() -> Self {
        Self {
            min_d: Some(2),
            max_p_phy: Some(0.004),
            min_p_phy: None,
        }
    }

    /// `p_phy >= 1e-4`.
    pub fn low_p() -> Self {
        Self {
            min_d: None,
            max_p_phy: None,
            min_p_phy: Some(1e-4),
        }
    }

    pub fn keeps(&self, d: u32, p_phy: f64) -> bool {
        self.min_d.map_or(true, |m| d >= m)
            && self.max_p_phy.map_or(true, |m| p_phy <= m)
            && self.min_p_phy.map_or(true, |m| p_phy >= m)
    }

    /// Drops filtered points and then any emptied series.
    pub fn apply(&self, series: &[DataSeries]) -> Vec<DataSeries> {
        series
            .iter()
            .map(|s| DataSeries {
                points: s.points.iter().copied().filter(|&(p, _)| self.keeps(s.d, p)).collect(),
                ..s.clone()
            })
            .filter(|s| !s.points.is_empty())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub free: FreeSet,
    pub max_iter: usize,
    pub starts: usize,
    pub beta_range: (f64, f64),
    pub step_tol: f64,
    pub grad_tol: f64,
    pub min_points_per_series: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            free: FreeSet::ALL,
            max_iter: 500,
            starts: 10,
            beta_range: (1e-4, 1e-1),
            step_tol: 1e-10,
            grad_tol: 1e-8,
            min_points_per_series: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: ScalingParams,
    /// `sqrt(mean(r²))` of the log-space residuals.
    pub residual_rms: f64,
    pub n_points: usize,
    pub converged: bool,
    pub iterations: usize,
    /// Variance estimates for `α, β, γ, δ`; zero for fixed parameters.
    pub covariance_diag: Vec<f64>,
    /// Final `‖Jᵀr‖`.
    pub gradient_norm: f64,
    /// Objective `Σ r²` after each accepted step, starting from the initial point.
    pub cost_history: Vec<f64>,
}

impl FitResult {
    /// Table row with the effective distance implied by the fitted `γ`.
    pub fn row(&self) -> TableRow {
        let p = &self.params;
        TableRow {
            model: p.model,
            regime: p.regime,
            parity: p.parity,
            d_r: implied_distance(p.gamma, p.model),
            alpha: p.alpha,
            beta: p.beta,
            gamma: p.gamma,
            delta: p.delta,
        }
    }
}

/// Inverts the `γ(d_R)` map of the model; `NaN` when `γ <= 1/2`.
pub fn implied_distance(gamma: f64, model: NoiseModel) -> f64 {
    let excess = gamma - 0.5;
    if !(excess > 0.0) {
        return f64::NAN;
    }
    match model {
        NoiseModel::Sd => 1.0 / (2.0 * excess),
        NoiseModel::Si => 1.0 / excess,
    }
}

#[derive(Clone, Copy)]
struct Point {
    d_r: f64,
    ln_p: f64,
    ln_l: f64,
}

fn residual(x: &[f64; NPAR], pt: &Point) -> f64 {
    let [la, lb, g, d] = *x;
    pt.ln_l - la - (g * pt.d_r - d) * (pt.ln_p - lb)
}

/// Derivatives of the model (not the residual) with respect to `x`.
fn jacobian_row(x: &[f64; NPAR], pt: &Point) -> [f64; NPAR] {
    let [_, lb, g, d] = *x;
    let u = pt.ln_p - lb;
    [1.0, -(g * pt.d_r - d), pt.d_r * u, -u]
}

fn cost(x: &[f64; NPAR], pts: &[Point]) -> f64 {
    pts.iter().map(|p| residual(x, p).powi(2)).sum()
}

/// `JᵀJ` and `Jᵀr` restricted to the free indices.
fn normal_equations(x: &[f64; NPAR], pts: &[Point], idx: &[usize]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let k = idx.len();
    let mut jtj = vec![vec![0.0; k]; k];
    let mut jtr = vec![0.0; k];
    for pt in pts {
        let row = jacobian_row(x, pt);
        let r = residual(x, pt);
        for a in 0..k {
            let ja = row[idx[a]];
            jtr[a] += ja * r;
            for b in 0..k {
                jtj[a][b] += ja * row[idx[b]];
            }
        }
    }
    (jtj, jtr)
}

/// Solves `a · x = b` by elimination with partial pivoting; `None` if singular.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = (0..n).map(|i| a[i][i].abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-13 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        cols.push(solve(a.to_vec(), e)?);
    }
    Some((0..n).map(|r| (0..n).map(|c| cols[c][r]).collect()).collect())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stop {
    Gradient,
    Step,
    MaxIter,
    Stalled,
}

struct Run {
    x: [f64; NPAR],
    cost: f64,
    iterations: usize,
    gradient_norm: f64,
    history: Vec<f64>,
    stop: Stop,
}

fn levenberg_marquardt(x0: [f64; NPAR], pts: &[Point], idx: &[usize], opts: &FitOptions) -> Run {
    let mut x = x0;
    let mut c = cost(&x, pts);
    let mut history = vec![c];
    let mut mu = 1e-3;
    let mut iterations = 0;
    let (mut jtj, mut jtr) = normal_equations(&x, pts, idx);
    let mut stop = Stop::MaxIter;
    while iterations < opts.max_iter {
        if norm(&jtr) < opts.grad_tol {
            stop = Stop::Gradient;
            break;
        }
        iterations += 1;
        let mut damped = jtj.clone();
        for (i, row) in damped.iter_mut().enumerate() {
            row[i] += mu * jtj[i][i].max(1e-12);
        }
        let Some(step) = solve(damped, jtr.clone()) else {
            mu *= 10.0;
            if mu > 1e16 {
                stop = Stop::Stalled;
                break;
            }
            continue;
        };
        let mut trial = x;
        for (k, &i) in idx.iter().enumerate() {
            trial[i] += step[k];
        }
        let tc = cost(&trial, pts);
        if tc.is_finite() && tc <= c {
            let scale = norm(&x).max(1e-10);
            let small = norm(&step) <= opts.step_tol * scale;
            x = trial;
            c = tc;
            history.push(c);
            mu = (mu / 3.0).max(1e-15);
            (jtj, jtr) = normal_equations(&x, pts, idx);
            if small {
                stop = Stop::Step;
                break;
            }
        } else {
            mu *= 2.0;
            if mu > 1e16 {
                stop = Stop::Stalled;
                break;
            }
        }
    }
    if stop == Stop::MaxIter && norm(&jtr) < opts.grad_tol {
        stop = Stop::Gradient;
    }
    Run {
        x,
        cost: c,
        iterations,
        gradient_norm: norm(&jtr),
        history,
        stop,
    }
}

fn collect_points(series: &[DataSeries], min_points: usize) -> Result<Vec<Point>> {
    let mut pts = Vec::new();
    for s in series {
        if s.points.len() < min_points {
            return Err(Error::InsufficientData(format!(
                "series d = {} has {} points, need at least {min_points}",
                s.d,
                s.points.len()
            )));
        }
        for &(p, l) in &s.points {
            if !(p > 0.0 && l > 0.0) {
                return Err(Error::invalid("points", format!("non-positive probability ({p}, {l})")));
            }
            pts.push(Point {
                d_r: s.d_r,
                ln_p: p.ln(),
                ln_l: l.ln(),
            });
        }
    }
    // a canonical order makes the result independent of input order
    pts.sort_by(|a, b| {
        a.d_r
            .total_cmp(&b.d_r)
            .then(a.ln_p.total_cmp(&b.ln_p))
            .then(a.ln_l.total_cmp(&b.ln_l))
    });
    Ok(pts)
}

/// Fits the free parameters with default options.
pub fn fit_scaling(series: &[DataSeries], free: FreeSet, init: &ScalingParams) -> Result<FitResult> {
    fit_scaling_with(
        series,
        init,
        &FitOptions {
            free,
            ..FitOptions::default()
        },
    )
}

pub fn fit_scaling_with(series: &[DataSeries], init: &ScalingParams, opts: &FitOptions) -> Result<FitResult> {
    init.validate()?;
    let pts = collect_points(series, opts.min_points_per_series)?;
    let idx: Vec<usize> = (0..NPAR).filter(|&i| opts.free.mask()[i]).collect();
    if idx.is_empty() {
        return Err(Error::invalid("free", "at least one parameter must be free"));
    }
    if pts.len() < idx.len() {
        return Err(Error::InsufficientData(format!(
            "{} points for {} free parameters",
            pts.len(),
            idx.len()
        )));
    }
    let base = [init.alpha.ln(), init.beta.ln(), init.gamma, init.delta];
    if !init.alpha.is_finite() || init.alpha <= 0.0 {
        return Err(Error::invalid("alpha", "initial alpha must be positive"));
    }

    let starts: Vec<[f64; NPAR]> = if opts.free.beta && opts.starts > 1 {
        let (lo, hi) = (opts.beta_range.0.ln(), opts.beta_range.1.ln());
        (0..opts.starts)
            .map(|i| {
                let mut x = base;
                x[1] = lo + (hi - lo) * i as f64 / (opts.starts - 1) as f64;
                x
            })
            .collect()
    } else {
        vec![base]
    };

    // identifiability: the design must have full column rank at every start
    for x in &starts {
        let (jtj, _) = normal_equations(x, &pts, &idx);
        if invert(&jtj).is_none() {
            return Err(Error::InsufficientData(
                "free parameters are not identifiable from these points (need at least two distinct d_R)".into(),
            ));
        }
    }

    let runs: Vec<Run> = starts
        .par_iter()
        .map(|x0| levenberg_marquardt(*x0, &pts, &idx, opts))
        .collect();
    let mut best = 0;
    for (i, r) in runs.iter().enumerate().skip(1) {
        let b = &runs[best];
        let tie = (r.cost - b.cost).abs() <= 1e-12 * b.cost.max(1e-300);
        if (r.cost < b.cost && !tie) || (tie && r.x[1] < b.x[1]) {
            best = i;
        }
    }
    let run = runs.into_iter().nth(best).expect("at least one start");

    let n = pts.len();
    let dof = n.saturating_sub(idx.len()).max(1);
    let sigma2 = run.cost / dof as f64;
    let (jtj, _) = normal_equations(&run.x, &pts, &idx);
    let mut covariance_diag = vec![0.0; NPAR];
    if let Some(inv) = invert(&jtj) {
        for (k, &i) in idx.iter().enumerate() {
            let v = sigma2 * inv[k][k];
            // delta method for the two log-parameterized entries
            covariance_diag[i] = match i {
                0 | 1 => v * run.x[i].exp().powi(2),
                _ => v,
            };
        }
    } else {
        covariance_diag.iter_mut().for_each(|v| *v = f64::NAN);
    }

    let free = opts.free.mask();
    let pick = |i: usize, fitted: f64, fixed: f64| if free[i] { fitted } else { fixed };
    let params = ScalingParams {
        alpha: pick(0, run.x[0].exp(), init.alpha),
        beta: pick(1, run.x[1].exp(), init.beta),
        gamma: pick(2, run.x[2], init.gamma),
        delta: pick(3, run.x[3], init.delta),
        ..*init
    };
    // a step below `step_tol` relative to |x| also ends at a minimum when the
    // problem is badly conditioned and the absolute gradient stays above `grad_tol`
    let converged = matches!(run.stop, Stop::Gradient | Stop::Step) && params.beta > 0.0 && params.beta < 1.0;
    if !converged {
        log::warn!(
            "fit did not converge ({:?}): |grad| = {:.3e} after {} iterations",
            run.stop,
            run.gradient_norm,
            run.iterations
        );
    }
    Ok(FitResult {
        params,
        residual_rms: (run.cost / n as f64).sqrt(),
        n_points: n,
        converged,
        iterations: run.iterations,
        covariance_diag,
        gradient_norm: run.gradient_norm,
        cost_history: run.history,
    })
}

/// Series sampled from [`plog_fitted`] with multiplicative lognormal noise
/// `exp(noise_rel · g)`, `g ~ N(0, 1)`, drawn in series-then-point order.
pub fn generate_synthetic(
    params: &ScalingParams,
    distances: &[(u32, f64)],
    grid: &[f64],
    noise_rel: f64,
    seed: u64,
) -> Result<Vec<DataSeries>> {
    if !(noise_rel >= 0.0) || !noise_rel.is_finite() {
        return Err(Error::invalid(
            "noise_rel",
            format!("must be finite and >= 0, got {noise_rel}"),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(distances
        .iter()
        .map(|&(d, d_r)| DataSeries {
            model: params.model,
            regime: params.regime,
            d,
            d_r,
            points: grid
                .iter()
                .map(|&p| {
                    let g: f64 = StandardNormal.sample(&mut rng);
                    (p, plog_fitted(p, params, d_r) * (noise_rel * g).exp())
                })
                .collect(),
        })
        .collect())
}

/// Text table plus its JSON mirror.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub text: String,
    pub json: String,
}

/// Renders rows in the order model, regime, parity, d_R, α, β, γ, δ.
pub fn fit_report(rows: &[TableRow]) -> FitReport {
    let mut text = format!(
        "{:<6}{:<10}{:<10}{:>9}{:>9}{:>9}{:>9}{:>9}\n",
        "model", "regime", "parity", "d_R", NAMES[0], NAMES[1], NAMES[2], NAMES[3]
    );
    for r in rows {
        text.push_str(&format!(
            "{:<6}{:<10}{:<10}{:>9.4}{:>9.4}{:>9.4}{:>9.4}{:>9.4}\n",
            r.model.as_str().to_uppercase(),
            r.regime.as_str(),
            r.parity.as_str(),
            r.d_r,
            r.alpha,
            r.beta,
            r.gamma,
            r.delta
        ));
    }
    let json = serde_json::to_string_pretty(rows).expect("rows serialize");
    FitReport { text, json }
}

pub fn parse_report_json(s: &str) -> Result<Vec<TableRow>> {
    serde_json::from_str(s).map_err(|e| Error::Parse {
        line: e.line() as u64,
        message: e.to_string(),
    })
}
