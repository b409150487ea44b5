//! Gaussian models with concentration symmetries, and their fitting.
//!
//! A coloured graph describes a restricted concentration model: the
//! concentration matrix is `K = Σ_u λ_u T^u` over the indicator matrices of
//! the colour classes, with zeros at the missing edges. Given a sample
//! covariance `S` from `n` observations the log-likelihood (profiled over
//! the mean, constants dropped) is
//!
//! ```text
//! ℓ(λ) = (n/2) (log det K − tr(S K))
//! ```
//!
//! which is strictly concave on the positive definite cone. [`fit_rcon`]
//! maximizes it by a damped Newton method and reports the usual model
//! summaries: deviance against the saturated model, degrees of freedom,
//! a χ² p-value and the BIC.
//!
//! The scale-invariant variant restricts partial correlations instead:
//! `K = A C A` with `A` diagonal and positive on vertex classes and `C` the
//! unit-diagonal matrix of negated partial correlations on edge classes.
//! For edge-regular colourings the two restrictions describe the same set
//! of concentration matrices; [`check_edge_regular_equivalence`] probes
//! that equivalence numerically from both directions.

use crate::graph::{ClassId, ColouredGraph, GraphError, IndicatorMatrix, Label};
use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use std::io::Read;
use thiserror::Error;

/// Errors from data handling and model fitting.
#[derive(Debug, Error)]
pub enum GaussianError {
    /// CSV reading or parsing failed.
    #[error("csv error: {0}")]
    Csv(String),
    /// The data do not fit together dimensionally.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// A graph vertex has no matching data column.
    #[error("no data column for vertex {0}")]
    UnknownVariable(Label),
    /// Invalid parameter values for a model build.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// The likelihood appears unbounded: no maximum exists.
    #[error("maximum likelihood estimate does not exist (iteration {0})")]
    NonexistentMle(usize),
    /// The Newton iteration hit its cap without meeting the tolerance.
    #[error("fit did not converge within {0} iterations")]
    NotConverged(usize),
    /// A linear solve failed unexpectedly.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// Graph-side failure.
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Which denominator the sample covariance uses. The same choice sets the
/// likelihood weight: a divisor of `n-1` pairs with the Wishart degrees of
/// freedom `n-1`, the maximum likelihood divisor `n` pairs with weight `n`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Divisor {
    /// Divide by the number of observations.
    N,
    /// Divide by the number of observations minus one.
    #[default]
    NMinus1,
}

impl std::str::FromStr for Divisor {
    type Err = GaussianError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "n" => Ok(Divisor::N),
            "n-1" => Ok(Divisor::NMinus1),
            other => Err(GaussianError::InvalidParameter(format!(
                "unknown divisor {other:?}; expected \"n\" or \"n-1\""
            ))),
        }
    }
}

/// A dataset reduced to its Gaussian sufficient statistics: variable names,
/// observation count, mean vector and sample covariance.
#[derive(Clone, Debug)]
pub struct GaussianData {
    names: Vec<Label>,
    n: usize,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    divisor: Divisor,
}

fn parse_header(headers: &csv::StringRecord) -> Vec<Label> {
    headers
        .iter()
        .map(|h| {
            let t = h.trim();
            match t.parse::<i64>() {
                Ok(i) => Label::Int(i),
                Err(_) => Label::Text(t.to_string()),
            }
        })
        .collect()
}

impl GaussianData {
    /// Reads raw observations from CSV with one named column per variable,
    /// then mean-centres and forms the covariance with the given divisor.
    pub fn from_data_csv<R: Read>(reader: R, divisor: Divisor) -> Result<Self, GaussianError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let names = parse_header(
            rdr.headers()
                .map_err(|e| GaussianError::Csv(e.to_string()))?,
        );
        let d = names.len();
        if d == 0 {
            return Err(GaussianError::Csv("no columns".into()));
        }
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (ri, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| GaussianError::Csv(e.to_string()))?;
            if rec.len() != d {
                return Err(GaussianError::Csv(format!(
                    "row {}: expected {d} fields, found {}",
                    ri + 2,
                    rec.len()
                )));
            }
            let row: Vec<f64> = rec
                .iter()
                .enumerate()
                .map(|(ci, cell)| {
                    cell.parse::<f64>().map_err(|_| {
                        GaussianError::Csv(format!(
                            "row {}, column {:?}: not a number: {cell:?}",
                            ri + 2,
                            names[ci].to_string()
                        ))
                    })
                })
                .collect::<Result<_, _>>()?;
            rows.push(row);
        }
        let n = rows.len();
        if n < 2 {
            return Err(GaussianError::Dimension(
                "need at least two observations".into(),
            ));
        }
        let mut mean = DVector::zeros(d);
        for row in &rows {
            for (j, &x) in row.iter().enumerate() {
                mean[j] += x;
            }
        }
        mean /= n as f64;
        let mut cov = DMatrix::zeros(d, d);
        for row in &rows {
            for i in 0..d {
                for j in 0..d {
                    cov[(i, j)] += (row[i] - mean[i]) * (row[j] - mean[j]);
                }
            }
        }
        let denom = match divisor {
            Divisor::N => n as f64,
            Divisor::NMinus1 => (n - 1) as f64,
        };
        cov /= denom;
        Ok(GaussianData {
            names,
            n,
            mean,
            cov,
            divisor,
        })
    }

    /// Reads a covariance matrix from CSV (named columns, one row per
    /// variable in column order) with the observation count given
    /// separately. The divisor states which denominator produced the
    /// matrix. The matrix is symmetrized.
    pub fn from_cov_csv<R: Read>(
        reader: R,
        n: usize,
        divisor: Divisor,
    ) -> Result<Self, GaussianError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let names = parse_header(
            rdr.headers()
                .map_err(|e| GaussianError::Csv(e.to_string()))?,
        );
        let d = names.len();
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (ri, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| GaussianError::Csv(e.to_string()))?;
            if rec.len() != d {
                return Err(GaussianError::Csv(format!(
                    "row {}: expected {d} fields, found {}",
                    ri + 2,
                    rec.len()
                )));
            }
            let row: Vec<f64> = rec
                .iter()
                .map(|cell| {
                    cell.parse::<f64>()
                        .map_err(|_| GaussianError::Csv(format!("not a number: {cell:?}")))
                })
                .collect::<Result<_, _>>()?;
            rows.push(row);
        }
        if rows.len() != d {
            return Err(GaussianError::Dimension(format!(
                "covariance must be {d}x{d}, found {} rows",
                rows.len()
            )));
        }
        if n < 2 {
            return Err(GaussianError::Dimension(
                "need at least two observations".into(),
            ));
        }
        let mut cov = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                cov[(i, j)] = 0.5 * (rows[i][j] + rows[j][i]);
            }
        }
        Ok(GaussianData {
            names,
            n,
            mean: DVector::zeros(d),
            cov,
            divisor,
        })
    }

    /// Builds directly from sufficient statistics, variables in the given
    /// order.
    pub fn from_parts(
        names: Vec<Label>,
        n: usize,
        mean: DVector<f64>,
        cov: DMatrix<f64>,
        divisor: Divisor,
    ) -> Result<Self, GaussianError> {
        let d = names.len();
        if mean.len() != d || cov.nrows() != d || cov.ncols() != d {
            return Err(GaussianError::Dimension(
                "mean and covariance must match the variable count".into(),
            ));
        }
        Ok(GaussianData {
            names,
            n,
            mean,
            cov,
            divisor,
        })
    }

    /// Variable names in data column order.
    pub fn names(&self) -> &[Label] {
        &self.names
    }

    /// Number of observations.
    pub fn num_observations(&self) -> usize {
        self.n
    }

    /// The covariance denominator choice.
    pub fn divisor(&self) -> Divisor {
        self.divisor
    }

    /// Likelihood weight paired with the covariance divisor: `n-1` for the
    /// unbiased divisor, `n` for the maximum likelihood divisor.
    pub fn weight(&self) -> f64 {
        match self.divisor {
            Divisor::N => self.n as f64,
            Divisor::NMinus1 => (self.n - 1) as f64,
        }
    }

    /// Mean vector in data column order.
    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    /// Sample covariance in data column order.
    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Covariance and mean reordered to the given vertex labels.
    pub fn aligned_to(&self, labels: &[Label]) -> Result<(DMatrix<f64>, DVector<f64>), GaussianError> {
        let d = labels.len();
        if self.names.len() != d {
            return Err(GaussianError::Dimension(format!(
                "graph has {d} vertices but data has {} variables",
                self.names.len()
            )));
        }
        let mut idx = Vec::with_capacity(d);
        for l in labels {
            let pos = self
                .names
                .iter()
                .position(|m| m == l)
                .ok_or_else(|| GaussianError::UnknownVariable(l.clone()))?;
            idx.push(pos);
        }
        let mut s = DMatrix::zeros(d, d);
        let mut mu = DVector::zeros(d);
        for i in 0..d {
            mu[i] = self.mean[idx[i]];
            for j in 0..d {
                s[(i, j)] = self.cov[(idx[i], idx[j])];
            }
        }
        Ok((s, mu))
    }
}

fn trace_prod(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut t = 0.0;
    for i in 0..n {
        for j in 0..n {
            t += a[(i, j)] * b[(j, i)];
        }
    }
    t
}

/// The log-likelihood kernel `(m/2)(log det K − tr(S K))` with weight `m`;
/// `None` if `K` is not positive definite.
fn loglik_at(k: &DMatrix<f64>, s: &DMatrix<f64>, m: f64) -> Option<f64> {
    let chol = Cholesky::new(k.clone())?;
    let logdet: f64 = chol.l().diagonal().iter().map(|x| 2.0 * x.ln()).sum();
    Some(0.5 * m * (logdet - trace_prod(s, k)))
}

/// The model log-likelihood at the concentration matrix `K = Σ λ_u T^u`
/// assembled from per-class values in canonical class order. The weight is
/// the data's covariance divisor, so the value is `(m/2)(log det K −
/// tr(S K))` with `m = n` or `n − 1`.
pub fn rcon_loglik(
    g: &ColouredGraph,
    lambda: &[f64],
    data: &GaussianData,
) -> Result<f64, GaussianError> {
    let (s, _) = data.aligned_to(g.labels())?;
    let mats = g.indicator_matrices();
    if lambda.len() != mats.len() {
        return Err(GaussianError::InvalidParameter(format!(
            "expected {} class parameters, got {}",
            mats.len(),
            lambda.len()
        )));
    }
    let k = build_k(&mats, lambda);
    loglik_at(&k, &s, data.weight())
        .ok_or_else(|| GaussianError::Numerical("K is not positive definite".into()))
}

/// Assembles `K = Σ λ_u T^u` from per-class values aligned with
/// [`ColouredGraph::indicator_matrices`].
pub fn build_k(mats: &[IndicatorMatrix], lambda: &[f64]) -> DMatrix<f64> {
    let n = mats[0].matrix.nrows();
    let mut k = DMatrix::zeros(n, n);
    for (m, &l) in mats.iter().zip(lambda) {
        k += &m.matrix * l;
    }
    k
}

/// A fitted restricted concentration model.
#[derive(Clone, Debug)]
pub struct RconFit {
    /// Per-class estimates in canonical class order.
    pub lambda: Vec<(ClassId, f64)>,
    /// The fitted concentration matrix.
    pub khat: DMatrix<f64>,
    /// Log-likelihood at the maximum, `(m/2)(log det K̂ − tr(S K̂))` with the
    /// weight `m` set by the covariance divisor.
    pub loglik: f64,
    /// Log-likelihood including the `−(m·d/2)·log 2π` constant.
    pub loglik_full: f64,
    /// Number of free concentration parameters (colour classes).
    pub num_params: usize,
    /// Saturated parameter count minus `num_params`.
    pub df: usize,
    /// `2 (ℓ_saturated − ℓ_model)`; NaN when `S` is singular.
    pub deviance: f64,
    /// Upper χ² tail of the deviance at `df`; 1 when `df` is zero.
    pub p_value: f64,
    /// `−2·loglik + num_params·log n`.
    pub bic: f64,
    /// Whether the likelihood equations were met to tolerance.
    pub converged: bool,
    /// Newton iterations used.
    pub iterations: usize,
}

/// Renders a fit as a JSON object with stable, sorted keys. Non-finite
/// numbers (a NaN deviance under a singular sample covariance) become null.
pub fn fit_to_json(fit: &RconFit) -> serde_json::Value {
    let lambda: serde_json::Map<String, serde_json::Value> = fit
        .lambda
        .iter()
        .map(|(id, v)| (id.to_string(), serde_json::json!(v)))
        .collect();
    serde_json::json!({
        "lambda": lambda,
        "loglik": fit.loglik,
        "loglik_full": fit.loglik_full,
        "p": fit.num_params,
        "df": fit.df,
        "deviance": fit.deviance,
        "p_value": fit.p_value,
        "bic": fit.bic,
        "converged": fit.converged,
        "iterations": fit.iterations,
    })
}

const MAX_ITER: usize = 200;
const MAX_HALVINGS: usize = 60;
const GRAD_TOL: f64 = 1e-8;
const STALL_WINDOW: usize = 50;

/// Maximum likelihood fit of the restricted concentration model given by a
/// coloured graph, by damped Newton iteration on the class parameters.
///
/// Vertex parameters start at the average reciprocal variance of their
/// class, edge parameters at zero. Each step solves the Fisher system and
/// halves until the likelihood rises on the positive definite cone. The fit
/// converges when every likelihood equation `tr(K⁻¹T^u) = tr(S T^u)` holds
/// to a relative `1e-8`. Unbounded likelihoods (no MLE) are reported as
/// [`GaussianError::NonexistentMle`], detected by diverging parameters or
/// persistent boundary halting without gradient progress.
pub fn fit_rcon(g: &ColouredGraph, data: &GaussianData) -> Result<RconFit, GaussianError> {
    let (s, _) = data.aligned_to(g.labels())?;
    let n = data.num_observations();
    let m = data.weight();
    let d = g.num_vertices();
    let mats = g.indicator_matrices();
    let p = mats.len();
    let num_vertex_classes = g.vertex_classes().num_blocks();

    let mut lambda = vec![0.0; p];
    for (u, im) in mats.iter().enumerate().take(num_vertex_classes) {
        let mut acc = 0.0;
        let mut cnt = 0.0;
        for i in 0..d {
            if im.matrix[(i, i)] == 1.0 {
                let v = s[(i, i)];
                if v <= 0.0 {
                    return Err(GaussianError::Dimension(format!(
                        "variable {} has non-positive variance",
                        g.labels()[i]
                    )));
                }
                acc += 1.0 / v;
                cnt += 1.0;
            }
        }
        lambda[u] = acc / cnt;
    }

    let st: Vec<f64> = mats.iter().map(|m| trace_prod(&s, &m.matrix)).collect();
    let tol: Vec<f64> = st.iter().map(|t| GRAD_TOL * t.abs().max(1.0)).collect();

    let mut k = build_k(&mats, &lambda);
    let mut ll = loglik_at(&k, &s, m)
        .ok_or_else(|| GaussianError::Numerical("initial K not positive definite".into()))?;
    let init_scale = 1.0 + lambda.iter().fold(0.0f64, |m, x| m.max(x.abs()));

    let mut iterations = 0;
    let mut best_resid = f64::INFINITY;
    let mut stalled = 0usize;
    let mut boundary_since_progress = false;
    let mut last_rel_step = 0.0f64;

    loop {
        let chol = Cholesky::new(k.clone())
            .ok_or_else(|| GaussianError::Numerical("K left the positive cone".into()))?;
        let kinv = chol.inverse();
        let t: Vec<f64> = mats
            .iter()
            .zip(&st)
            .map(|(m, &stu)| trace_prod(&kinv, &m.matrix) - stu)
            .collect();
        let residual_ok = t.iter().zip(&tol).all(|(x, tl)| x.abs() <= *tl);
        // A true interior maximum also needs the Newton steps to have
        // shrunk: residuals alone can pass while the parameters run off to
        // a supremum at infinity.
        let converged = residual_ok && last_rel_step <= 1e-5;
        if converged || iterations >= MAX_ITER {
            if !converged {
                if residual_ok {
                    return Err(GaussianError::NonexistentMle(iterations));
                }
                return Err(GaussianError::NotConverged(iterations));
            }
            let loglik = ll;
            let loglik_full = loglik - 0.5 * m * d as f64 * (2.0 * std::f64::consts::PI).ln();
            let saturated_params = d * (d + 1) / 2;
            let df = saturated_params - p;
            let (deviance, p_value) = match Cholesky::new(s.clone()) {
                Some(sc) => {
                    let logdet_s: f64 = sc.l().diagonal().iter().map(|x| 2.0 * x.ln()).sum();
                    let ll_sat = 0.5 * m * (-logdet_s - d as f64);
                    let dev = 2.0 * (ll_sat - loglik);
                    let pv = if df == 0 { 1.0 } else { chisq_sf(dev.max(0.0), df as f64) };
                    (dev, pv)
                }
                None => (f64::NAN, f64::NAN),
            };
            let bic = -2.0 * loglik + p as f64 * (n as f64).ln();
            return Ok(RconFit {
                lambda: mats
                    .iter()
                    .map(|m| m.class)
                    .zip(lambda.iter().copied())
                    .collect(),
                khat: k,
                loglik,
                loglik_full,
                num_params: p,
                df,
                deviance,
                p_value,
                bic,
                converged: true,
                iterations,
            });
        }
        iterations += 1;

        // Divergence to infinity means the likelihood has no maximum.
        let lambda_scale = lambda.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if lambda_scale > 1e9 * init_scale {
            return Err(GaussianError::NonexistentMle(iterations));
        }
        let resid = t
            .iter()
            .zip(&tol)
            .map(|(x, tl)| x.abs() / tl)
            .fold(0.0f64, f64::max);
        if resid < 0.999 * best_resid {
            best_resid = resid;
            stalled = 0;
            boundary_since_progress = false;
        } else {
            stalled += 1;
            if stalled >= STALL_WINDOW && boundary_since_progress {
                return Err(GaussianError::NonexistentMle(iterations));
            }
        }

        // Fisher system: F δ = t with F_uv = tr(K⁻¹ T^u K⁻¹ T^v).
        let mu: Vec<DMatrix<f64>> = mats.iter().map(|m| &kinv * &m.matrix).collect();
        let mut fisher = DMatrix::zeros(p, p);
        for u in 0..p {
            for v in u..p {
                let f = trace_prod(&mu[u], &mu[v]);
                fisher[(u, v)] = f;
                fisher[(v, u)] = f;
            }
        }
        let rhs = DVector::from_column_slice(&t);
        let delta = match Cholesky::new(fisher.clone())
            .map(|c| c.solve(&rhs))
            .or_else(|| fisher.lu().solve(&rhs))
        {
            Some(d) => d,
            // A Fisher matrix collapsing to singular while the parameters
            // run away is the flat-direction signature of a missing MLE.
            None if residual_ok || lambda_scale > 1e4 * init_scale => {
                return Err(GaussianError::NonexistentMle(iterations));
            }
            None => {
                return Err(GaussianError::Numerical("Fisher system is singular".into()));
            }
        };

        let mut alpha = 1.0;
        let mut stepped = false;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = lambda
                .iter()
                .zip(delta.iter())
                .map(|(l, d)| l + alpha * d)
                .collect();
            let kt = build_k(&mats, &trial);
            if let Some(lt) = loglik_at(&kt, &s, m) {
                if lt > ll - 1e-12 * ll.abs().max(1.0) {
                    let scale = 1.0 + trial.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                    last_rel_step = lambda
                        .iter()
                        .zip(&trial)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0f64, f64::max)
                        / scale;
                    lambda = trial;
                    k = kt;
                    ll = lt;
                    stepped = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !stepped {
            boundary_since_progress = true;
            if stalled >= STALL_WINDOW {
                return Err(GaussianError::NonexistentMle(iterations));
            }
        }
    }
}

/// The mean vector with entries averaged within each vertex colour class,
/// in the graph's vertex order.
pub fn mu_star(g: &ColouredGraph, data: &GaussianData) -> Result<DVector<f64>, GaussianError> {
    let (_, mean) = data.aligned_to(g.labels())?;
    let mut out = mean.clone();
    for block in g.vertex_classes().blocks() {
        let avg: f64 = block.iter().map(|&v| mean[v]).sum::<f64>() / block.len() as f64;
        for &v in block {
            out[v] = avg;
        }
    }
    Ok(out)
}

/// Natural logarithm of the gamma function (Lanczos approximation).
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 6] = [
        76.180_091_729_471_46,
        -86.505_320_329_416_77,
        24.014_098_240_830_91,
        -1.231_739_572_450_155,
        0.120_865_097_386_617_7e-2,
        -0.539_523_938_495_3e-5,
    ];
    let mut y = x;
    let tmp = x + 5.5;
    let tmp = tmp - (x + 0.5) * tmp.ln();
    let mut ser = 1.000_000_000_190_015;
    for c in COEF {
        y += 1.0;
        ser += c / y;
    }
    -tmp + (2.506_628_274_631_000_5 * ser / x).ln()
}

fn lower_gamma_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut del = sum;
    for _ in 0..500 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * 1e-16 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn upper_gamma_cf(a: f64, x: f64) -> f64 {
    // Lentz's method for the continued fraction of Q(a, x).
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Upper tail of the χ² distribution: `P(X > x)` for `X ~ χ²(df)`.
/// Computed through the regularized incomplete gamma function, by series
/// when `x` is small against `df` and by continued fraction otherwise.
pub fn chisq_sf(x: f64, df: f64) -> f64 {
    assert!(df > 0.0, "degrees of freedom must be positive");
    if x <= 0.0 {
        return 1.0;
    }
    let a = 0.5 * df;
    let half = 0.5 * x;
    if half < a + 1.0 {
        1.0 - lower_gamma_series(a, half)
    } else {
        upper_gamma_cf(a, half)
    }
}

/// Builds `K = A C A` from scale parameters per vertex class (positive)
/// and correlation parameters per edge class (in `(−1, 1)`), aligned with
/// canonical class order.
pub fn rcor_build_k(
    g: &ColouredGraph,
    eta: &[f64],
    tau: &[f64],
) -> Result<DMatrix<f64>, GaussianError> {
    let nv = g.vertex_classes().num_blocks();
    let ne = g.edge_classes().num_blocks();
    if eta.len() != nv || tau.len() != ne {
        return Err(GaussianError::Dimension(format!(
            "expected {nv} scale and {ne} correlation parameters"
        )));
    }
    if eta.iter().any(|&e| e <= 0.0) {
        return Err(GaussianError::InvalidParameter(
            "scale parameters must be positive".into(),
        ));
    }
    if tau.iter().any(|&t| t <= -1.0 || t >= 1.0) {
        return Err(GaussianError::InvalidParameter(
            "correlation parameters must lie in (-1, 1)".into(),
        ));
    }
    let d = g.num_vertices();
    let mut a = DVector::zeros(d);
    for (ci, block) in g.vertex_classes().blocks().iter().enumerate() {
        for &v in block {
            a[v] = eta[ci];
        }
    }
    let mut c = DMatrix::identity(d, d);
    for (ci, block) in g.edge_classes().blocks().iter().enumerate() {
        for &(i, j) in block {
            c[(i, j)] = tau[ci];
            c[(j, i)] = tau[ci];
        }
    }
    let mut k = c;
    for i in 0..d {
        for j in 0..d {
            k[(i, j)] *= a[i] * a[j];
        }
    }
    Ok(k)
}

/// Whether `K` obeys the concentration restrictions of the colouring:
/// equal diagonal within vertex classes, equal off-diagonals within edge
/// classes, zeros at missing edges.
pub fn rcon_pattern_ok(g: &ColouredGraph, k: &DMatrix<f64>, tol: f64) -> bool {
    let d = g.num_vertices();
    for block in g.vertex_classes().blocks() {
        let first = k[(block[0], block[0])];
        if block.iter().any(|&v| (k[(v, v)] - first).abs() > tol) {
            return false;
        }
    }
    for block in g.edge_classes().blocks() {
        let (i0, j0) = block[0];
        let first = k[(i0, j0)];
        if block.iter().any(|&(i, j)| (k[(i, j)] - first).abs() > tol) {
            return false;
        }
    }
    for i in 0..d {
        for j in (i + 1)..d {
            if !g.has_edge(i, j) && k[(i, j)].abs() > tol {
                return false;
            }
        }
    }
    true
}

/// Whether `K` obeys the correlation restrictions of the colouring: equal
/// diagonal within vertex classes, equal scaled off-diagonals
/// `k_ij / √(k_ii k_jj)` within edge classes, zeros at missing edges.
pub fn rcor_pattern_ok(g: &ColouredGraph, k: &DMatrix<f64>, tol: f64) -> bool {
    let d = g.num_vertices();
    for block in g.vertex_classes().blocks() {
        let first = k[(block[0], block[0])];
        if block.iter().any(|&v| (k[(v, v)] - first).abs() > tol) {
            return false;
        }
    }
    let scaled = |i: usize, j: usize| k[(i, j)] / (k[(i, i)] * k[(j, j)]).sqrt();
    for block in g.edge_classes().blocks() {
        let (i0, j0) = block[0];
        let first = scaled(i0, j0);
        if block.iter().any(|&(i, j)| (scaled(i, j) - first).abs() > tol) {
            return false;
        }
    }
    for i in 0..d {
        for j in (i + 1)..d {
            if !g.has_edge(i, j) && k[(i, j)].abs() > tol {
                return false;
            }
        }
    }
    true
}

/// Samples positive definite matrices from both parametrizations and
/// checks that each lands in the other's restriction set. For edge-regular
/// colourings every trial must pass; a `false` exhibits a violation.
pub fn check_edge_regular_equivalence<R: Rng>(
    g: &ColouredGraph,
    rng: &mut R,
    trials: usize,
) -> Result<bool, GaussianError> {
    let mats = g.indicator_matrices();
    let nv = g.vertex_classes().num_blocks();
    let ne = g.edge_classes().num_blocks();
    let tol = 1e-9;
    for _ in 0..trials {
        // Correlation-parametrized draw, rejected until positive definite.
        let mut built = None;
        for _ in 0..200 {
            let eta: Vec<f64> = (0..nv).map(|_| rng.gen_range(0.5..2.0)).collect();
            let tau: Vec<f64> = (0..ne).map(|_| rng.gen_range(-0.35..0.35)).collect();
            let k = rcor_build_k(g, &eta, &tau)?;
            if Cholesky::new(k.clone()).is_some() {
                built = Some(k);
                break;
            }
        }
        let k = built.ok_or_else(|| {
            GaussianError::Numerical("no positive definite correlation draw found".into())
        })?;
        if !rcon_pattern_ok(g, &k, tol) {
            return Ok(false);
        }

        // Concentration-parametrized draw, rejected until positive definite.
        let mut built = None;
        for _ in 0..200 {
            let lambda: Vec<f64> = (0..mats.len())
                .map(|u| {
                    if u < nv {
                        rng.gen_range(1.0..3.0)
                    } else {
                        rng.gen_range(-0.6..0.6)
                    }
                })
                .collect();
            let k = build_k(&mats, &lambda);
            if Cholesky::new(k.clone()).is_some() {
                built = Some(k);
                break;
            }
        }
        let k = built.ok_or_else(|| {
            GaussianError::Numerical("no positive definite concentration draw found".into())
        })?;
        if !rcor_pattern_ok(g, &k, tol) {
            return Ok(false);
        }
    }
    Ok(true)
}
