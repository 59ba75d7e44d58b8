//! Linear max-margin models trained in the primal.
//!
//! Both trainers minimize
//!
//! ```text
//! 1/2 |w|^2 + C * sum_i loss(y_i, w.x_i + b)
//! ```
//!
//! with the intercept `b` left unregularized. The hinge loss is
//! `max(0, 1 - y f)`, the epsilon-insensitive loss `max(0, |y - f| - eps)`.
//!
//! Both losses have a kink, so the solver works on a sequence of smoothed
//! problems: the kink `max(0, u)` is replaced by a quadratic on `[0, mu]`
//! (a Huber-style corner) and L-BFGS minimizes the result, warm-started as
//! `mu` shrinks geometrically down to half the tolerance. At the last stage
//! every example sitting on the kink is within `mu` of it, which is what
//! the margin and residual guarantees in the tests rely on.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::SparseVector;

const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    HingeBinary,
    EpsRegression,
}

/// Solver settings shared by both trainers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainParams {
    pub c: f64,
    /// Width of the insensitive tube (regression only).
    pub epsilon: f64,
    pub tol: f64,
    /// Cap on L-BFGS iterations summed over all smoothing stages. Each stage
    /// also stops once the objective falls by less than a `tol` fraction over
    /// ten iterations.
    pub max_iter: usize,
}

impl Default for TrainParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            epsilon: 0.1,
            tol: 1e-4,
            max_iter: 2000,
        }
    }
}

impl TrainParams {
    pub fn with_c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::invalid(format!("C must be positive, got {}", self.c)));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::invalid(format!("tol must be positive, got {}", self.tol)));
        }
        if self.epsilon.is_nan() || self.epsilon < 0.0 {
            return Err(Error::invalid(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub c: f64,
    pub epsilon: f64,
    pub tol: f64,
    pub iterations: usize,
    pub final_objective: Option<f64>,
    /// Exact (unsmoothed) objective at the end of each smoothing stage.
    pub objective_history: Vec<f64>,
    /// Smoothing width used in each stage. A checkpoint may exceed its
    /// predecessor by at most the smoothing gap `C * n * mu / 2`.
    pub smoothing_history: Vec<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub kind: ModelKind,
    weights: Vec<f64>,
    bias: f64,
    pub meta: TrainingMeta,
}

#[derive(Serialize, Deserialize)]
struct ModelRecord {
    version: u32,
    model: LinearModel,
}

impl LinearModel {
    /// A hand-built model, mostly useful in tests and examples.
    pub fn from_parts(kind: ModelKind, weights: Vec<f64>, bias: f64) -> Self {
        Self {
            kind,
            weights,
            bias,
            meta: TrainingMeta {
                c: 0.0,
                epsilon: 0.0,
                tol: 0.0,
                iterations: 0,
                final_objective: None,
                objective_history: Vec::new(),
                smoothing_history: Vec::new(),
                converged: true,
            },
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weight_norm(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum::<f64>().sqrt()
    }

    /// Decision value `w.x + b`.
    pub fn predict_raw(&self, x: &SparseVector) -> f64 {
        x.dot_dense(&self.weights) + self.bias
    }

    /// Signed distance `(w.x + b) / |w|` to the decision plane.
    pub fn geometric_margin(&self, x: &SparseVector) -> Result<f64> {
        let norm = self.weight_norm();
        if norm == 0.0 {
            return Err(Error::DegenerateModel);
        }
        Ok(self.predict_raw(x) / norm)
    }

    /// Exact training objective of this model on `(xs, ys)`.
    pub fn objective(&self, xs: &[SparseVector], ys: &[f64]) -> f64 {
        let problem = Problem {
            xs,
            ys,
            kind: self.kind,
            c: self.meta.c,
            epsilon: self.meta.epsilon,
            dim: self.weights.len(),
        };
        problem.exact_objective(&self.weights, self.bias)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ModelRecord {
            version: FORMAT_VERSION,
            model: self.clone(),
        })
        .expect("model serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let record: ModelRecord = serde_json::from_str(s).map_err(|e| Error::Artifact(e.to_string()))?;
        if record.version != FORMAT_VERSION {
            return Err(Error::Artifact(format!(
                "model format version {} (expected {FORMAT_VERSION})",
                record.version
            )));
        }
        Ok(record.model)
    }
}

/// Binary classifier on labels in `{-1, +1}`.
pub fn train_hinge(xs: &[SparseVector], ys: &[f64], dim: usize, params: &TrainParams) -> Result<LinearModel> {
    params.validate()?;
    check_inputs(xs, ys, dim)?;
    if ys.iter().any(|&y| y != 1.0 && y != -1.0) {
        return Err(Error::invalid("hinge labels must be -1 or +1"));
    }
    if !(ys.contains(&1.0) && ys.contains(&-1.0)) {
        return Err(Error::SingleClass);
    }
    let problem = Problem {
        xs,
        ys,
        kind: ModelKind::HingeBinary,
        c: params.c,
        epsilon: 0.0,
        dim,
    };
    Ok(solve(&problem, params))
}

/// Epsilon-insensitive linear regression.
pub fn train_eps_regression(xs: &[SparseVector], ys: &[f64], dim: usize, params: &TrainParams) -> Result<LinearModel> {
    params.validate()?;
    check_inputs(xs, ys, dim)?;
    if xs.len() < 2 {
        return Err(Error::invalid("regression needs at least 2 examples"));
    }
    let problem = Problem {
        xs,
        ys,
        kind: ModelKind::EpsRegression,
        c: params.c,
        epsilon: params.epsilon,
        dim,
    };
    Ok(solve(&problem, params))
}

fn check_inputs(xs: &[SparseVector], ys: &[f64], dim: usize) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.is_empty() {
        return Err(Error::invalid("no training examples"));
    }
    if ys.iter().any(|y| !y.is_finite()) || xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    if let Some(x) = xs.iter().find(|x| x.dim_hint() > dim) {
        return Err(Error::invalid(format!(
            "feature index {} outside dimension {dim}",
            x.dim_hint() - 1
        )));
    }
    Ok(())
}

struct Problem<'a> {
    xs: &'a [SparseVector],
    ys: &'a [f64],
    kind: ModelKind,
    c: f64,
    epsilon: f64,
    dim: usize,
}

/// Smoothed corner `max(0, u)` and its derivative; `mu == 0` is exact.
fn corner(u: f64, mu: f64) -> (f64, f64) {
    if u <= 0.0 {
        (0.0, 0.0)
    } else if u < mu {
        (u * u / (2.0 * mu), u / mu)
    } else {
        (u - mu / 2.0, 1.0)
    }
}

impl Problem<'_> {
    /// Loss and its derivative with respect to the decision value `f`.
    fn loss(&self, y: f64, f: f64, mu: f64) -> (f64, f64) {
        match self.kind {
            ModelKind::HingeBinary => {
                let (l, d) = corner(1.0 - y * f, mu);
                (l, -d * y)
            }
            ModelKind::EpsRegression => {
                let r = y - f;
                let (l, d) = corner(r.abs() - self.epsilon, mu);
                (l, -d * r.signum())
            }
        }
    }

    /// Smoothed objective at `params = [w.., b]`, writing its gradient.
    fn evaluate(&self, params: &[f64], mu: f64, grad: &mut [f64]) -> f64 {
        let (w, b) = (&params[..self.dim], params[self.dim]);
        grad[..self.dim].copy_from_slice(w);
        grad[self.dim] = 0.0;
        let mut obj = 0.5 * w.iter().map(|v| v * v).sum::<f64>();
        for (x, &y) in self.xs.iter().zip(self.ys) {
            let f = x.dot_dense(w) + b;
            let (l, d) = self.loss(y, f, mu);
            obj += self.c * l;
            if d != 0.0 {
                let g = self.c * d;
                for &(j, v) in x.entries() {
                    grad[j] += g * v;
                }
                grad[self.dim] += g;
            }
        }
        obj
    }

    fn exact_objective(&self, w: &[f64], b: f64) -> f64 {
        let mut obj = 0.5 * w.iter().map(|v| v * v).sum::<f64>();
        for (x, &y) in self.xs.iter().zip(self.ys) {
            obj += self.c * self.loss(y, x.dot_dense(w) + b, 0.0).0;
        }
        obj
    }

    fn n_params(&self) -> usize {
        self.dim + 1
    }
}

fn solve(problem: &Problem, params: &TrainParams) -> LinearModel {
    let mu_min = 0.5 * params.tol;
    let mut x = vec![0.0; problem.n_params()];
    let mut history = Vec::new();
    let mut smoothing = Vec::new();
    let mut iterations = 0;
    let mut converged = true;
    let mut mu = 1.0f64.max(mu_min);
    loop {
        let budget = params.max_iter.saturating_sub(iterations);
        let last = mu <= mu_min;
        let stage = lbfgs(problem, mu, &mut x, budget, params.tol);
        iterations += stage.iterations;
        history.push(problem.exact_objective(&x[..problem.dim], x[problem.dim]));
        smoothing.push(mu);
        if !stage.converged {
            converged = false;
            if iterations >= params.max_iter {
                log::debug!("linear solver hit the iteration cap ({})", params.max_iter);
                break;
            }
        }
        if last {
            break;
        }
        mu = (mu * 0.1).max(mu_min);
    }
    let bias = x.pop().unwrap_or(0.0);
    LinearModel {
        kind: problem.kind,
        weights: x,
        bias,
        meta: TrainingMeta {
            c: problem.c,
            epsilon: problem.epsilon,
            tol: params.tol,
            iterations,
            final_objective: history.last().copied(),
            objective_history: history,
            smoothing_history: smoothing,
            converged,
        },
    }
}

struct StageResult {
    iterations: usize,
    converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

const MEMORY: usize = 10;
const WINDOW: usize = 10;

/// L-BFGS with Armijo backtracking on the `mu`-smoothed objective. Stops on a
/// tiny gradient or once the objective falls by less than a `ftol` fraction
/// over the last `WINDOW` iterations.
fn lbfgs(problem: &Problem, mu: f64, x: &mut [f64], max_iter: usize, ftol: f64) -> StageResult {
    let n = x.len();
    let mut g = vec![0.0; n];
    let mut f = problem.evaluate(x, mu, &mut g);
    let gtol = 1e-10 * (1.0 + problem.c * problem.xs.len() as f64);
    let mut pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(MEMORY);
    let mut recent: VecDeque<f64> = VecDeque::with_capacity(WINDOW + 1);
    recent.push_back(f);
    let mut x_new = vec![0.0; n];
    let mut g_new = vec![0.0; n];
    let mut alphas = [0.0; MEMORY];
    for it in 0..max_iter {
        if g.iter().all(|v| v.abs() <= gtol) {
            return StageResult {
                iterations: it,
                converged: true,
            };
        }
        // two-loop recursion
        let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
        for (k, (sk, yk, rho)) in pairs.iter().enumerate().rev() {
            let a = rho * dot(sk, &d);
            alphas[k] = a;
            d.iter_mut().zip(yk).for_each(|(di, yi)| *di -= a * yi);
        }
        if let Some((sk, yk, _)) = pairs.back() {
            let gamma = dot(sk, yk) / dot(yk, yk);
            d.iter_mut().for_each(|di| *di *= gamma);
        }
        for (k, (sk, yk, rho)) in pairs.iter().enumerate() {
            let b = rho * dot(yk, &d);
            d.iter_mut().zip(sk).for_each(|(di, si)| *di += (alphas[k] - b) * si);
        }
        let mut gd = dot(&g, &d);
        if gd.is_nan() || gd >= 0.0 {
            pairs.clear();
            d.iter_mut().zip(&g).for_each(|(di, gi)| *di = -gi);
            gd = -dot(&g, &g);
        }
        let mut step = if pairs.is_empty() { 1.0 / (-gd).sqrt().max(1.0) } else { 1.0 };
        let f_new = loop {
            x_new.iter_mut().zip(x.iter().zip(&d)).for_each(|(xn, (xi, di))| *xn = xi + step * di);
            let f_try = problem.evaluate(&x_new, mu, &mut g_new);
            if f_try <= f + 1e-4 * step * gd {
                break Some(f_try);
            }
            step *= 0.5;
            if step < 1e-14 {
                break None;
            }
        };
        let Some(f_new) = f_new else {
            // no representable progress along the best available direction
            return StageResult {
                iterations: it + 1,
                converged: true,
            };
        };
        let sk: Vec<f64> = x_new.iter().zip(x.iter()).map(|(a, b)| a - b).collect();
        let yk: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&sk, &yk);
        if sy > 1e-12 * dot(&yk, &yk).sqrt() * dot(&sk, &sk).sqrt() {
            if pairs.len() == MEMORY {
                pairs.pop_front();
            }
            pairs.push_back((sk, yk, 1.0 / sy));
        }
        x.copy_from_slice(&x_new);
        std::mem::swap(&mut g, &mut g_new);
        f = f_new;
        if recent.len() > WINDOW {
            recent.pop_front();
        }
        recent.push_back(f);
        if recent.len() > WINDOW {
            let old = recent[0];
            if old - f <= ftol * f.abs().max(f64::MIN_POSITIVE) {
                return StageResult {
                    iterations: it + 1,
                    converged: true,
                };
            }
        }
    }
    StageResult {
        iterations: max_iter,
        converged: false,
    }
}
