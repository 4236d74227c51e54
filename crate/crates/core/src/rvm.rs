//! Relevance vector machine for classification.
//!
//! Each class gets a binary sparse Bayesian model (one-vs-rest) over the
//! basis `φ(x) = [1, x·x_1, …, x·x_N]`. Weights carry independent Gaussian
//! priors `N(0, 1/α_j)`; the posterior is approximated by a Gaussian at its
//! mode (Newton/IRLS on the Bernoulli likelihood), and the precisions are
//! re-estimated by `α_j ← γ_j/μ_j²`, `γ_j = 1 − α_j Σ_jj`. Bases whose
//! precision exceeds the prune threshold are dropped from the problem.

use crate::numerics::{cholesky_jittered, dot, dot_slices, log_sigmoid, sigmoid, DenseMatrix, NumericsError};
use crate::preprocess::io::VectorSet;
use crate::preprocess::{LabeledVector, SparseVector};
use crate::scalar::Real;
use crate::svm::argmax;

/// Step halvings tried before an IRLS iteration gives up.
const MAX_HALVINGS: usize = 16;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RvmError {
    #[error("training data is empty")]
    EmptyData,
    #[error("need at least two classes, got {0}")]
    TooFewClasses(usize),
    #[error("class {class}: targets take a single value, both 0 and 1 are required")]
    SingleTarget { class: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("feature index {index} out of range for p={p}")]
    FeatureOutOfRange { index: usize, p: usize },
    #[error("class index {index} out of range for k={k}")]
    ClassOutOfRange { index: usize, k: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("IRLS failed at outer iteration {outer}, newton step {inner}: {source}")]
    Irls {
        outer: usize,
        inner: usize,
        source: NumericsError,
    },
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RvmConfig<T> {
    pub alpha_init: T,
    pub alpha_prune: T,
    pub max_outer: usize,
    pub irls_max: usize,
    pub tol_alpha: T,
    pub tol_irls: T,
}

impl<T: Real> Default for RvmConfig<T> {
    fn default() -> Self {
        Self {
            alpha_init: T::one(),
            alpha_prune: T::lit(1e9),
            max_outer: 500,
            irls_max: 50,
            tol_alpha: T::lit(1e-3),
            tol_irls: T::lit(1e-6),
        }
    }
}

impl<T: Real> RvmConfig<T> {
    fn validate(&self) -> Result<(), RvmError> {
        let positive = [
            ("alpha_init", self.alpha_init),
            ("alpha_prune", self.alpha_prune),
            ("tol_alpha", self.tol_alpha),
            ("tol_irls", self.tol_irls),
        ];
        for (name, v) in positive {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(RvmError::InvalidConfig(format!("{name} must be positive (got {v})")));
            }
        }
        if self.alpha_init >= self.alpha_prune {
            return Err(RvmError::InvalidConfig("alpha_init must be below alpha_prune".into()));
        }
        if self.max_outer == 0 || self.irls_max == 0 {
            return Err(RvmError::InvalidConfig("iteration limits must be positive".into()));
        }
        Ok(())
    }

    /// Smallest precision the outer loop will install.
    fn alpha_floor(&self) -> T {
        T::lit(1e-12)
    }
}

/// A trained binary model: `P(positive | x) = σ(μ·φ(x))` over the active bases.
#[derive(Debug, Clone, PartialEq)]
pub struct RvmBinaryModel<T> {
    active: Vec<usize>,
    weights_mu: Vec<T>,
    alphas: Vec<T>,
    relevance_vectors: Vec<SparseVector<T>>,
}

impl<T: Real> RvmBinaryModel<T> {
    /// `active` must start with the bias basis 0; `relevance_vectors[i]`
    /// belongs to `active[i + 1]`.
    pub fn from_parts(
        active: Vec<usize>,
        weights_mu: Vec<T>,
        alphas: Vec<T>,
        relevance_vectors: Vec<SparseVector<T>>,
    ) -> Result<Self, RvmError> {
        let m = active.len();
        if m == 0 || active[0] != 0 {
            return Err(RvmError::InvalidModel(
                "active set must begin with the bias basis".into(),
            ));
        }
        if active.windows(2).any(|w| w[0] >= w[1]) {
            return Err(RvmError::InvalidModel(
                "active indices must be strictly increasing".into(),
            ));
        }
        if weights_mu.len() != m || alphas.len() != m || relevance_vectors.len() + 1 != m {
            return Err(RvmError::InvalidModel(format!(
                "block sizes disagree: {m} active, {} mu, {} alpha, {} vectors",
                weights_mu.len(),
                alphas.len(),
                relevance_vectors.len()
            )));
        }
        if weights_mu.iter().chain(&alphas).any(|v| !v.is_finite()) || alphas.iter().any(|&a| !(a > T::zero())) {
            return Err(RvmError::InvalidModel(
                "weights must be finite and precisions positive".into(),
            ));
        }
        Ok(Self {
            active,
            weights_mu,
            alphas,
            relevance_vectors,
        })
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn weights_mu(&self) -> &[T] {
        &self.weights_mu
    }

    pub fn alphas(&self) -> &[T] {
        &self.alphas
    }

    pub fn relevance_vectors(&self) -> &[SparseVector<T>] {
        &self.relevance_vectors
    }

    /// Retained training vectors (bias excluded).
    pub fn relevance_count(&self) -> usize {
        self.relevance_vectors.len()
    }

    pub fn bias(&self) -> T {
        self.weights_mu[0]
    }

    /// `μ·φ(x)`.
    pub fn activation(&self, x: &SparseVector<T>) -> T {
        let mut a = self.weights_mu[0];
        for (w, rv) in self.weights_mu[1..].iter().zip(&self.relevance_vectors) {
            a = a + *w * dot(x, rv);
        }
        a
    }

    pub fn probability(&self, x: &SparseVector<T>) -> T {
        sigmoid(self.activation(x))
    }
}

/// One binary model per class.
#[derive(Debug, Clone, PartialEq)]
pub struct RvmModel<T> {
    class_names: Vec<String>,
    p: usize,
    binaries: Vec<RvmBinaryModel<T>>,
}

impl<T: Real> RvmModel<T> {
    pub fn from_parts(class_names: Vec<String>, p: usize, binaries: Vec<RvmBinaryModel<T>>) -> Result<Self, RvmError> {
        if class_names.len() < 2 {
            return Err(RvmError::TooFewClasses(class_names.len()));
        }
        if binaries.len() != class_names.len() {
            return Err(RvmError::InvalidModel(format!(
                "{} classes but {} binary models",
                class_names.len(),
                binaries.len()
            )));
        }
        for b in &binaries {
            if let Some(v) = b.relevance_vectors.iter().find(|v| v.dim_lower_bound() > p) {
                return Err(RvmError::FeatureOutOfRange {
                    index: v.dim_lower_bound() - 1,
                    p,
                });
            }
        }
        Ok(Self {
            class_names,
            p,
            binaries,
        })
    }

    pub fn k(&self) -> usize {
        self.class_names.len()
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn binaries(&self) -> &[RvmBinaryModel<T>] {
        &self.binaries
    }

    /// Per-class sigmoid scores normalized to sum to one.
    pub fn predict_proba(&self, x: &SparseVector<T>) -> Vec<T> {
        let s: Vec<T> = self.binaries.iter().map(|b| b.probability(x)).collect();
        let total: T = s.iter().copied().sum();
        if !(total > T::zero()) {
            let u = T::one() / T::from_count(s.len());
            return vec![u; s.len()];
        }
        s.into_iter().map(|v| v / total).collect()
    }

    pub fn predict(&self, x: &SparseVector<T>) -> usize {
        argmax(&self.predict_proba(x))
    }
}

/// `N×(N+1)` design matrix: a column of ones, then the linear-kernel Gram matrix.
pub fn design_matrix<T: Real>(train: &[SparseVector<T>]) -> DenseMatrix<T> {
    basis_rows(train).transpose()
}

/// Basis-major form of the design matrix: row `j` is column `j` of Φ.
fn basis_rows<T: Real>(train: &[SparseVector<T>]) -> DenseMatrix<T> {
    let n = train.len();
    let mut b = DenseMatrix::zeros(n + 1, n);
    for v in b.row_mut(0) {
        *v = T::one();
    }
    for i in 0..n {
        for j in i..n {
            let k = dot(&train[i], &train[j]);
            b[(j + 1, i)] = k;
            b[(i + 1, j)] = k;
        }
    }
    b
}

fn activations<T: Real>(cols: &DenseMatrix<T>, w: &[T]) -> Vec<T> {
    let mut a = vec![T::zero(); cols.cols()];
    for (j, &wj) in w.iter().enumerate() {
        if wj != T::zero() {
            for (an, &c) in a.iter_mut().zip(cols.row(j)) {
                *an = *an + wj * c;
            }
        }
    }
    a
}

fn objective_from_activations<T: Real>(a: &[T], t: &[T], alpha: &[T], w: &[T]) -> T {
    let ll: T = a
        .iter()
        .zip(t)
        .map(|(&an, &tn)| tn * log_sigmoid(an) + (T::one() - tn) * log_sigmoid(-an))
        .sum();
    let prior: T = alpha.iter().zip(w).map(|(&al, &wi)| al * wi * wi).sum();
    ll - T::lit(0.5) * prior
}

fn gradient_from_activations<T: Real>(cols: &DenseMatrix<T>, a: &[T], t: &[T], alpha: &[T], w: &[T]) -> Vec<T> {
    let resid: Vec<T> = a.iter().zip(t).map(|(&an, &tn)| tn - sigmoid(an)).collect();
    (0..cols.rows())
        .map(|j| dot_slices(cols.row(j), &resid) - alpha[j] * w[j])
        .collect()
}

fn hessian<T: Real>(cols: &DenseMatrix<T>, a: &[T], alpha: &[T]) -> DenseMatrix<T> {
    let m = cols.rows();
    let beta: Vec<T> = a
        .iter()
        .map(|&an| {
            let y = sigmoid(an);
            y * (T::one() - y)
        })
        .collect();
    let mut h = DenseMatrix::zeros(m, m);
    let mut weighted = vec![T::zero(); cols.cols()];
    for j in 0..m {
        for ((wv, &c), &b) in weighted.iter_mut().zip(cols.row(j)).zip(&beta) {
            *wv = c * b;
        }
        for k in j..m {
            h[(j, k)] = dot_slices(&weighted, cols.row(k));
        }
        h[(j, j)] = h[(j, j)] + alpha[j];
    }
    for j in 1..m {
        for k in 0..j {
            h[(j, k)] = h[(k, j)];
        }
    }
    h
}

fn check_phi<T: Real>(phi: &DenseMatrix<T>, t: &[T], alpha: &[T], w: &[T]) -> Result<(), RvmError> {
    if t.len() != phi.rows() {
        return Err(RvmError::DimensionMismatch {
            expected: phi.rows(),
            found: t.len(),
        });
    }
    for len in [alpha.len(), w.len()] {
        if len != phi.cols() {
            return Err(RvmError::DimensionMismatch {
                expected: phi.cols(),
                found: len,
            });
        }
    }
    Ok(())
}

/// `Σ_n [t_n ln y_n + (1 − t_n) ln(1 − y_n)] − ½ Σ_j α_j w_j²` with `y = σ(Φw)`.
pub fn penalized_log_likelihood<T: Real>(phi: &DenseMatrix<T>, t: &[T], alpha: &[T], w: &[T]) -> Result<T, RvmError> {
    check_phi(phi, t, alpha, w)?;
    let a = phi.mat_vec(w).expect("checked dimensions");
    Ok(objective_from_activations(&a, t, alpha, w))
}

/// Gradient of [`penalized_log_likelihood`]: `Φᵀ(t − y) − α∘w`.
pub fn penalized_gradient<T: Real>(phi: &DenseMatrix<T>, t: &[T], alpha: &[T], w: &[T]) -> Result<Vec<T>, RvmError> {
    check_phi(phi, t, alpha, w)?;
    let cols = phi.transpose();
    let a = activations(&cols, w);
    Ok(gradient_from_activations(&cols, &a, t, alpha, w))
}

/// Laplace approximation at the posterior mode.
#[derive(Debug, Clone)]
pub struct IrlsOutcome<T> {
    pub mu: Vec<T>,
    pub sigma: DenseMatrix<T>,
    /// Newton steps accepted.
    pub iterations: usize,
    /// Gradient ∞-norm at `mu`.
    pub grad_norm: T,
    /// Penalized log-likelihood at the start and after every accepted step.
    pub objective_trace: Vec<T>,
    /// Diagonal jitter needed to factor the final Hessian.
    pub jitter: T,
}

/// Newton/IRLS from `w = 0` on an `N×M` design matrix.
pub fn irls_posterior_mode<T: Real>(
    phi: &DenseMatrix<T>,
    targets: &[T],
    alpha: &[T],
    config: &RvmConfig<T>,
) -> Result<IrlsOutcome<T>, RvmError> {
    let w0 = vec![T::zero(); phi.cols()];
    check_phi(phi, targets, alpha, &w0)?;
    if alpha.iter().any(|&a| !(a > T::zero())) {
        return Err(RvmError::InvalidConfig("precisions must be positive".into()));
    }
    irls(&phi.transpose(), targets, alpha, w0, config, 0)
}

fn irls<T: Real>(
    cols: &DenseMatrix<T>,
    t: &[T],
    alpha: &[T],
    mut w: Vec<T>,
    config: &RvmConfig<T>,
    outer: usize,
) -> Result<IrlsOutcome<T>, RvmError> {
    let fail = |inner: usize| move |source| RvmError::Irls { outer, inner, source };
    let mut a = activations(cols, &w);
    let mut obj = objective_from_activations(&a, t, alpha, &w);
    let mut trace = vec![obj];
    let mut iterations = 0;
    // Factor of the Hessian at the current `w`, kept when the loop stops on
    // the gradient test so the mode is not factored twice.
    let mut at_mode = None;
    for it in 0..config.irls_max {
        let g = gradient_from_activations(cols, &a, t, alpha, &w);
        let gnorm = g.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let factored = cholesky_jittered(&hessian(cols, &a, alpha)).map_err(fail(it))?;
        if gnorm < config.tol_irls {
            at_mode = Some(factored);
            break;
        }
        let delta = factored.0.solve(&g).map_err(fail(it))?;
        let mut step = T::one();
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let w_try: Vec<T> = w.iter().zip(&delta).map(|(&wi, &d)| wi + step * d).collect();
            let a_try = activations(cols, &w_try);
            let obj_try = objective_from_activations(&a_try, t, alpha, &w_try);
            if obj_try >= obj {
                w = w_try;
                a = a_try;
                obj = obj_try;
                accepted = true;
                break;
            }
            step = step * T::lit(0.5);
        }
        if !accepted {
            log::debug!("irls: no ascent after {MAX_HALVINGS} halvings at step {it}");
            at_mode = Some(factored);
            break;
        }
        trace.push(obj);
        iterations += 1;
    }
    let g = gradient_from_activations(cols, &a, t, alpha, &w);
    let grad_norm = g.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let (factor, jitter) = match at_mode {
        Some(f) => f,
        None => cholesky_jittered(&hessian(cols, &a, alpha)).map_err(fail(iterations))?,
    };
    Ok(IrlsOutcome {
        mu: w,
        sigma: factor.inverse(),
        iterations,
        grad_norm,
        objective_trace: trace,
        jitter,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PruneEvent {
    pub outer_iteration: usize,
    /// Basis index (0 = bias, j = training vector j).
    pub basis: usize,
}

/// Snapshot of one outer iteration, taken after the IRLS solve and the
/// precision update, before pruning.
#[derive(Debug, Clone)]
pub struct RvmTrainState<T> {
    pub outer_iteration: usize,
    pub active: Vec<usize>,
    pub alpha: Vec<T>,
    pub mu: Vec<T>,
    pub sigma: DenseMatrix<T>,
    pub gamma: Vec<T>,
    pub prune_log: Vec<PruneEvent>,
    pub irls_objectives: Vec<T>,
}

impl<T: Real> RvmTrainState<T> {
    /// State with `γ` filled in from `alpha` and `sigma`.
    pub fn new(active: Vec<usize>, alpha: Vec<T>, mu: Vec<T>, sigma: DenseMatrix<T>) -> Self {
        let gamma = alpha
            .iter()
            .enumerate()
            .map(|(i, &a)| T::one() - a * sigma[(i, i)])
            .collect();
        Self {
            outer_iteration: 0,
            active,
            alpha,
            mu,
            sigma,
            gamma,
            prune_log: Vec::new(),
            irls_objectives: Vec::new(),
        }
    }
}

/// Re-estimated precisions, aligned with the state's active list.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaUpdate<T> {
    pub alpha: Vec<T>,
    /// Basis indices to remove.
    pub prune: Vec<usize>,
}

/// `α_j' = γ_j / μ_j²`; bases with `α_j' > alpha_prune` or `μ_j = 0` are
/// marked for pruning. The bias basis is never pruned; its precision is
/// capped at half the threshold instead.
pub fn update_alphas<T: Real>(state: &RvmTrainState<T>, alpha_prune: T) -> AlphaUpdate<T> {
    let mut alpha = Vec::with_capacity(state.active.len());
    let mut prune = Vec::new();
    for (i, &basis) in state.active.iter().enumerate() {
        let mu2 = state.mu[i] * state.mu[i];
        let next = state.gamma[i] / mu2;
        if basis == 0 {
            let cap = alpha_prune * T::lit(0.5);
            alpha.push(if next.is_nan() || next > cap { cap } else { next });
        } else {
            if mu2 == T::zero() || next > alpha_prune || next.is_nan() {
                prune.push(basis);
            }
            alpha.push(next);
        }
    }
    AlphaUpdate { alpha, prune }
}

/// Result of a binary training run.
#[derive(Debug, Clone)]
pub struct RvmBinaryTraining<T> {
    pub model: RvmBinaryModel<T>,
    pub outer_iterations: usize,
    pub converged: bool,
    pub prune_log: Vec<PruneEvent>,
}

fn validate_rows<T: Real>(rows: &[LabeledVector<T>], k: usize, p: Option<usize>) -> Result<(), RvmError> {
    if rows.is_empty() {
        return Err(RvmError::EmptyData);
    }
    for r in rows {
        if r.class_index >= k {
            return Err(RvmError::ClassOutOfRange {
                index: r.class_index,
                k,
            });
        }
        if let Some(p) = p {
            if r.vector.dim_lower_bound() > p {
                return Err(RvmError::FeatureOutOfRange {
                    index: r.vector.dim_lower_bound() - 1,
                    p,
                });
            }
        }
    }
    Ok(())
}

fn binary_targets<T: Real>(rows: &[LabeledVector<T>], positive_class: usize) -> Result<Vec<T>, RvmError> {
    let t: Vec<T> = rows
        .iter()
        .map(|r| {
            if r.class_index == positive_class {
                T::one()
            } else {
                T::zero()
            }
        })
        .collect();
    let positives = t.iter().filter(|&&v| v == T::one()).count();
    if positives == 0 || positives == t.len() {
        return Err(RvmError::SingleTarget { class: positive_class });
    }
    Ok(t)
}

pub fn train_rvm_binary<T: Real>(
    data: &[LabeledVector<T>],
    positive_class: usize,
    config: &RvmConfig<T>,
) -> Result<RvmBinaryModel<T>, RvmError> {
    train_rvm_binary_observed(data, positive_class, config, |_| {}).map(|t| t.model)
}

/// Binary training, calling `observer` once per outer iteration.
pub fn train_rvm_binary_observed<T: Real, F: FnMut(&RvmTrainState<T>)>(
    data: &[LabeledVector<T>],
    positive_class: usize,
    config: &RvmConfig<T>,
    observer: F,
) -> Result<RvmBinaryTraining<T>, RvmError> {
    config.validate()?;
    validate_rows(data, usize::MAX, None)?;
    let t = binary_targets(data, positive_class)?;
    let vectors: Vec<SparseVector<T>> = data.iter().map(|r| r.vector.clone()).collect();
    let basis = basis_rows(&vectors);
    train_on_basis(&basis, &vectors, &t, config, observer)
}

fn train_on_basis<T: Real, F: FnMut(&RvmTrainState<T>)>(
    basis: &DenseMatrix<T>,
    vectors: &[SparseVector<T>],
    t: &[T],
    config: &RvmConfig<T>,
    mut observer: F,
) -> Result<RvmBinaryTraining<T>, RvmError> {
    let mut active: Vec<usize> = (0..basis.rows()).collect();
    let mut alpha = vec![config.alpha_init; active.len()];
    let mut mu = vec![T::zero(); active.len()];
    let mut prune_log = Vec::new();
    let mut converged = false;
    let mut outer_iterations = 0;
    let floor = config.alpha_floor();

    for outer in 0..config.max_outer {
        outer_iterations = outer + 1;
        let cols = gather_rows(basis, &active);
        let fit = irls(&cols, t, &alpha, mu.clone(), config, outer)?;
        let mut state = RvmTrainState::new(active.clone(), alpha.clone(), fit.mu, fit.sigma);
        state.outer_iteration = outer;
        state.irls_objectives = fit.objective_trace;
        let update = update_alphas(&state, config.alpha_prune);
        for &b in &update.prune {
            prune_log.push(PruneEvent {
                outer_iteration: outer,
                basis: b,
            });
        }
        state.prune_log = prune_log.clone();
        observer(&state);

        let mut max_change = T::zero();
        let mut next_active = Vec::with_capacity(active.len());
        let mut next_alpha = Vec::with_capacity(active.len());
        let mut next_mu = Vec::with_capacity(active.len());
        for (i, &b) in active.iter().enumerate() {
            if update.prune.contains(&b) {
                continue;
            }
            let a = update.alpha[i].max(floor);
            max_change = max_change.max((a.ln() - alpha[i].ln()).abs());
            next_active.push(b);
            next_alpha.push(a);
            next_mu.push(state.mu[i]);
        }
        let pruned = next_active.len() < active.len();
        active = next_active;
        alpha = next_alpha;
        mu = next_mu;
        if !pruned && max_change < config.tol_alpha {
            converged = true;
            break;
        }
    }
    log::debug!(
        "rvm: {outer_iterations} outer iterations, converged={converged}, {} of {} bases kept, {} pruned",
        active.len(),
        basis.rows(),
        prune_log.len()
    );

    let cols = gather_rows(basis, &active);
    let fit = irls(&cols, t, &alpha, mu, config, outer_iterations)?;
    let relevance_vectors = active[1..].iter().map(|&j| vectors[j - 1].clone()).collect();
    let model = RvmBinaryModel::from_parts(active, fit.mu, alpha, relevance_vectors)?;
    Ok(RvmBinaryTraining {
        model,
        outer_iterations,
        converged,
        prune_log,
    })
}

fn gather_rows<T: Real>(m: &DenseMatrix<T>, keep: &[usize]) -> DenseMatrix<T> {
    let mut out = DenseMatrix::zeros(keep.len(), m.cols());
    for (r, &src) in keep.iter().enumerate() {
        out.row_mut(r).copy_from_slice(m.row(src));
    }
    out
}

/// One-vs-rest training of `k` binary models over one shared design matrix.
pub fn train_rvm<T: Real>(set: &VectorSet<T>, config: &RvmConfig<T>) -> Result<RvmModel<T>, RvmError> {
    config.validate()?;
    let k = set.k();
    if k < 2 {
        return Err(RvmError::TooFewClasses(k));
    }
    validate_rows(&set.rows, k, Some(set.p))?;
    let vectors: Vec<SparseVector<T>> = set.rows.iter().map(|r| r.vector.clone()).collect();
    let basis = basis_rows(&vectors);
    let mut binaries = Vec::with_capacity(k);
    for c in 0..k {
        let t = binary_targets(&set.rows, c)?;
        let trained = train_on_basis(&basis, &vectors, &t, config, |_| {})?;
        log::debug!("rvm class {c}: {} relevance vectors", trained.model.relevance_count());
        binaries.push(trained.model);
    }
    RvmModel::from_parts(set.class_names.clone(), set.p, binaries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(e: &[(usize, f64)]) -> SparseVector<f64> {
        SparseVector::from_entries(e.to_vec()).unwrap()
    }

    #[test]
    fn design_matrix_examples() {
        let phi = design_matrix(&[sv(&[(0, 1.0)])]);
        assert_eq!(phi.as_slice(), &[1.0, 1.0]);
        let phi = design_matrix(&[sv(&[(0, 1.0)]), sv(&[(1, 1.0)])]);
        assert_eq!(phi.rows(), 2);
        assert_eq!(phi.as_slice(), &[1.0, 1.0, 0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn scalar_irls_root() {
        // root of σ(μ) − 1 + μ = 0 by bisection: 0.40105813754154707
        let phi = DenseMatrix::<f64>::from_rows(&[vec![1.0]]).unwrap();
        let out = irls_posterior_mode(&phi, &[1.0], &[1.0], &RvmConfig::default()).unwrap();
        // |g| < tol and H ≥ α = 1 bound the distance to the root by tol
        assert!((out.mu[0] - 0.401_058_137_541_547_07).abs() < 1e-6, "{}", out.mu[0]);
        assert!(out.grad_norm < 1e-6);
        let tight = RvmConfig {
            tol_irls: 1e-13,
            ..RvmConfig::default()
        };
        let out = irls_posterior_mode(&phi, &[1.0], &[1.0], &tight).unwrap();
        assert!((out.mu[0] - 0.401_058_137_541_547_07).abs() < 1e-12, "{}", out.mu[0]);
        assert!(out.objective_trace.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn huge_precision_pins_weight_to_zero() {
        let phi = DenseMatrix::<f64>::from_rows(&[vec![1.0, 0.3], vec![1.0, -0.2]]).unwrap();
        let out = irls_posterior_mode(&phi, &[1.0, 0.0], &[1e12, 1e12], &RvmConfig::default()).unwrap();
        assert!(out.mu.iter().all(|m| m.abs() < 1e-9));
    }

    #[test]
    fn alpha_update_examples() {
        let sigma = DenseMatrix::diagonal(&[0.0, 0.5, 1.0]);
        let state = RvmTrainState::new(vec![0, 1, 2], vec![3.0, 2.0, 1.0], vec![1.0, 0.5, 0.0], sigma);
        assert_eq!(state.gamma, vec![1.0, 0.0, 0.0]);
        let up = update_alphas(&state, 1e9);
        assert_eq!(up.alpha[0], 1.0);
        assert_eq!(up.alpha[1], 0.0);
        assert_eq!(up.prune, vec![2]);
    }

    #[test]
    fn bias_is_never_pruned() {
        let sigma = DenseMatrix::diagonal(&[0.5, 0.1]);
        let state = RvmTrainState::new(vec![0, 4], vec![1.0, 1.0], vec![0.0, 2.0], sigma);
        let up = update_alphas(&state, 1e9);
        assert!(up.prune.is_empty());
        assert_eq!(up.alpha[0], 5e8);
    }

    #[test]
    fn orthonormal_pair() {
        let data = vec![
            LabeledVector::new(sv(&[(0, 1.0)]), 0),
            LabeledVector::new(sv(&[(1, 1.0)]), 1),
        ];
        let m = train_rvm_binary(&data, 0, &RvmConfig::default()).unwrap();
        assert!(m.probability(&data[0].vector) > 0.5);
        assert!(m.probability(&data[1].vector) < 0.5);
        assert_eq!(m.active()[0], 0);
    }

    #[test]
    fn single_target_rejected() {
        let data = vec![
            LabeledVector::new(sv(&[(0, 1.0)]), 1),
            LabeledVector::new(sv(&[(1, 1.0)]), 1),
        ];
        assert_eq!(
            train_rvm_binary(&data, 0, &RvmConfig::default()).unwrap_err(),
            RvmError::SingleTarget { class: 0 }
        );
    }

    #[test]
    fn proba_with_no_overlap_uses_biases() {
        let b = |bias: f64| {
            RvmBinaryModel::from_parts(vec![0, 1], vec![bias, 2.0], vec![1.0, 1.0], vec![sv(&[(0, 1.0)])]).unwrap()
        };
        let m = RvmModel::from_parts(
            vec!["a".into(), "b".into(), "c".into()],
            3,
            vec![b(0.3), b(0.3), b(0.3)],
        )
        .unwrap();
        let p = m.predict_proba(&sv(&[(2, 1.0)]));
        for v in &p {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(m.predict(&sv(&[(2, 1.0)])), 0);
        assert_eq!(m.predict(&sv(&[(0, 1.0)])), 0);
    }
}

#[cfg(test)]
mod properties {
    use super::*;
    use crate::numerics::cholesky;
    use proptest::prelude::*;

    /// Binary problems in the plane, both targets present.
    fn problem() -> impl Strategy<Value = Vec<LabeledVector<f64>>> {
        (4usize..12).prop_flat_map(|n| {
            (
                proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n),
                proptest::collection::vec(0usize..2, n),
            )
                .prop_map(|(xs, mut labels)| {
                    labels[0] = 0;
                    labels[1] = 1;
                    xs.iter()
                        .zip(labels)
                        .map(|(&(a, b), y)| LabeledVector::new(SparseVector::from_dense(&[a, b]).unwrap(), y))
                        .collect()
                })
        })
    }

    fn five_point_fixture() -> (DenseMatrix<f64>, Vec<f64>) {
        let pts = [[1.0, 0.5], [0.8, -0.3], [-0.6, 0.9], [-1.2, -0.4], [0.1, 1.5]];
        let vs: Vec<SparseVector<f64>> = pts.iter().map(|p| SparseVector::from_dense(p).unwrap()).collect();
        (design_matrix(&vs), vec![1.0, 1.0, 0.0, 0.0, 1.0])
    }

    /// Central differences with step 1e-5, compared relative to `max(1, |g_i|)`.
    fn assert_gradient_matches(
        phi: &DenseMatrix<f64>,
        t: &[f64],
        alpha: &[f64],
        w: &[f64],
    ) -> Result<(), TestCaseError> {
        let g = penalized_gradient(phi, t, alpha, w).unwrap();
        let h = 1e-5;
        for i in 0..w.len() {
            let mut up = w.to_vec();
            let mut down = w.to_vec();
            up[i] += h;
            down[i] -= h;
            let fd = (penalized_log_likelihood(phi, t, alpha, &up).unwrap()
                - penalized_log_likelihood(phi, t, alpha, &down).unwrap())
                / (2.0 * h);
            prop_assert!(
                (fd - g[i]).abs() <= 1e-4 * g[i].abs().max(1.0),
                "coordinate {i}: {fd} vs {}",
                g[i]
            );
        }
        Ok(())
    }

    #[test]
    fn mode_gradient_matches_finite_differences() {
        let (phi, t) = five_point_fixture();
        let alpha = vec![1.0; phi.cols()];
        let out = irls_posterior_mode(&phi, &t, &alpha, &RvmConfig::default()).unwrap();
        assert_gradient_matches(&phi, &t, &alpha, &out.mu).unwrap();
        assert!(out.grad_norm < 1e-6);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn gradient_matches_finite_differences(
            w in proptest::collection::vec(-3.0f64..3.0, 6),
            alpha in proptest::collection::vec(0.01f64..100.0, 6),
        ) {
            let (phi, t) = five_point_fixture();
            assert_gradient_matches(&phi, &t, &alpha, &w)?;
        }

        #[test]
        fn outer_iterations_keep_their_invariants(data in problem()) {
            let mut states = Vec::new();
            let cfg = RvmConfig { max_outer: 100, ..RvmConfig::default() };
            let out = train_rvm_binary_observed(&data, 1, &cfg, |s| states.push(s.clone())).unwrap();
            prop_assert_eq!(states.len(), out.outer_iterations);
            let mut previous: Option<&[usize]> = None;
            for s in &states {
                for w in s.irls_objectives.windows(2) {
                    prop_assert!(w[1] >= w[0], "IRLS objective fell: {} -> {}", w[0], w[1]);
                }
                prop_assert!(cholesky(&s.sigma).is_ok(), "Σ not positive definite at {}", s.outer_iteration);
                for &g in &s.gamma {
                    prop_assert!((-1e-9..=1.0 + 1e-9).contains(&g), "γ = {g}");
                }
                prop_assert_eq!(s.active[0], 0);
                if let Some(prev) = previous {
                    prop_assert!(s.active.len() <= prev.len());
                    prop_assert!(s.active.iter().all(|b| prev.contains(b)));
                }
                previous = Some(&s.active);
            }
        }

        #[test]
        fn training_is_reproducible(data in problem()) {
            let cfg = RvmConfig { max_outer: 100, ..RvmConfig::default() };
            let a = train_rvm_binary(&data, 0, &cfg).unwrap();
            let b = train_rvm_binary(&data, 0, &cfg).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
