//! Single-machine multi-class SVM (Crammer-Singer), trained by dual
//! coordinate descent.
//!
//! The primal problem is
//!
//! ```text
//! min_W  ½ Σ_c ‖w_c‖² + C Σ_i max_c (e_ic + w_c·x_i − w_{y_i}·x_i)
//! ```
//!
//! with `e_ic = 1 − [c = y_i]`. Each example owns a block of dual multipliers
//! `τ_i` with `Σ_c τ_ic = 0` and `τ_ic ≤ C·[c = y_i]`; `w_c = Σ_i τ_ic x_i`.
//! An epoch visits examples in a seeded random order and solves each block
//! exactly. The offset is realized by a constant feature appended to every
//! example (value [`SvmConfig::bias_feature`]).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::preprocess::io::VectorSet;
use crate::preprocess::{LabeledVector, SparseVector};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SvmError {
    #[error("training data is empty")]
    EmptyData,
    #[error("training data contains only one class")]
    SingleClass,
    #[error("need at least two classes, class table has {0}")]
    TooFewClasses(usize),
    #[error("feature index {index} out of range for p={p}")]
    FeatureOutOfRange { index: usize, p: usize },
    #[error("class index {index} out of range for k={k}")]
    ClassOutOfRange { index: usize, k: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("dual feasibility violated at example {example}: {detail}")]
    Infeasible { example: usize, detail: String },
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmConfig<T> {
    /// Upper bound on the true-class multiplier.
    pub c: T,
    /// Stop once the largest per-example KKT violation in an epoch is below this.
    pub tol: T,
    pub max_epochs: usize,
    pub shuffle_seed: u64,
    /// Value of the appended constant feature; zero disables the offset.
    pub bias_feature: T,
    /// Re-check dual feasibility after every block update.
    pub check_feasibility: bool,
}

impl<T: Real> Default for SvmConfig<T> {
    fn default() -> Self {
        Self {
            c: T::one(),
            tol: T::lit(1e-3),
            max_epochs: 200,
            shuffle_seed: 42,
            bias_feature: T::one(),
            check_feasibility: false,
        }
    }
}

impl<T: Real> SvmConfig<T> {
    fn validate(&self) -> Result<(), SvmError> {
        if !(self.c > T::zero()) || !self.c.is_finite() {
            return Err(SvmError::InvalidConfig(format!("C must be positive (got {})", self.c)));
        }
        if !(self.tol > T::zero()) {
            return Err(SvmError::InvalidConfig(format!(
                "tol must be positive (got {})",
                self.tol
            )));
        }
        if !self.bias_feature.is_finite() {
            return Err(SvmError::InvalidConfig("bias feature must be finite".into()));
        }
        Ok(())
    }
}

/// One weight vector per class plus the offset column.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel<T> {
    class_names: Vec<String>,
    p: usize,
    weights: Vec<Vec<T>>,
    bias_weights: Vec<T>,
    bias_feature: T,
}

impl<T: Real> SvmModel<T> {
    pub fn from_parts(
        class_names: Vec<String>,
        p: usize,
        weights: Vec<Vec<T>>,
        bias_weights: Vec<T>,
        bias_feature: T,
    ) -> Result<Self, SvmError> {
        let k = class_names.len();
        if k < 2 {
            return Err(SvmError::TooFewClasses(k));
        }
        if weights.len() != k || bias_weights.len() != k {
            return Err(SvmError::InvalidModel(format!("expected {k} weight rows")));
        }
        if weights.iter().any(|w| w.len() != p) {
            return Err(SvmError::InvalidModel(format!(
                "every weight row must have length p={p}"
            )));
        }
        let finite = weights.iter().flatten().chain(&bias_weights).all(|w| w.is_finite());
        if !finite || !bias_feature.is_finite() {
            return Err(SvmError::InvalidModel("non-finite weight".into()));
        }
        Ok(Self {
            class_names,
            p,
            weights,
            bias_weights,
            bias_feature,
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

    /// Feature weights of class `c` (length p).
    pub fn weights(&self, c: usize) -> &[T] {
        &self.weights[c]
    }

    /// Weight on the appended constant feature, per class.
    pub fn bias_weights(&self) -> &[T] {
        &self.bias_weights
    }

    pub fn bias_feature(&self) -> T {
        self.bias_feature
    }

    /// `w_c · x + b_c` for every class.
    pub fn decision_scores(&self, x: &SparseVector<T>) -> Result<Vec<T>, SvmError> {
        if x.dim_lower_bound() > self.p {
            return Err(SvmError::FeatureOutOfRange {
                index: x.dim_lower_bound() - 1,
                p: self.p,
            });
        }
        Ok(self
            .weights
            .iter()
            .zip(&self.bias_weights)
            .map(|(w, &b)| x.dot_dense(w) + b * self.bias_feature)
            .collect())
    }

    pub fn predict(&self, x: &SparseVector<T>) -> Result<usize, SvmError> {
        Ok(argmax(&self.decision_scores(x)?))
    }
}

/// Index of the largest value; the smallest index wins ties.
pub fn argmax<T: Real>(scores: &[T]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Dual multipliers, one row of `k` per training example.
#[derive(Debug, Clone, PartialEq)]
pub struct DualState<T> {
    k: usize,
    tau: Vec<T>,
    /// Dual objective at the time of the snapshot.
    pub objective: T,
    bias_feature: T,
}

impl<T: Real> DualState<T> {
    fn zeros(n: usize, k: usize, bias_feature: T) -> Self {
        Self {
            k,
            tau: vec![T::zero(); n * k],
            objective: T::zero(),
            bias_feature,
        }
    }

    pub fn n(&self) -> usize {
        self.tau.len().checked_div(self.k).unwrap_or(0)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn tau(&self, i: usize) -> &[T] {
        &self.tau[i * self.k..(i + 1) * self.k]
    }

    pub fn bias_feature(&self) -> T {
        self.bias_feature
    }

    /// Examples with any nonzero multiplier.
    pub fn support_vector_count(&self) -> usize {
        (0..self.n())
            .filter(|&i| self.tau(i).iter().any(|&t| t != T::zero()))
            .count()
    }

    /// Checks `Σ_c τ_ic = 0` (1e-9) and `τ_ic ≤ C·[c = y_i]` (1e-12) for example `i`.
    pub fn check_example(&self, i: usize, label: usize, c: T) -> Result<(), SvmError> {
        let row = self.tau(i);
        let sum: T = row.iter().copied().sum();
        if sum.abs() > T::lit(1e-9) {
            return Err(SvmError::Infeasible {
                example: i,
                detail: format!("multipliers sum to {sum}"),
            });
        }
        for (m, &t) in row.iter().enumerate() {
            let bound = if m == label { c } else { T::zero() };
            if t > bound + T::lit(1e-12) {
                return Err(SvmError::Infeasible {
                    example: i,
                    detail: format!("tau[{m}] = {t} exceeds {bound}"),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    MaxEpochs,
}

/// Everything a training run produces, for inspection and tests.
#[derive(Debug, Clone)]
pub struct SvmTraining<T> {
    pub model: SvmModel<T>,
    pub state: DualState<T>,
    pub epochs: usize,
    pub stop: StopReason,
    /// Largest KKT violation seen during the last epoch.
    pub final_violation: T,
    /// Dual objective after each epoch.
    pub epoch_objectives: Vec<T>,
}

fn validate_data<T: Real>(set: &VectorSet<T>) -> Result<(), SvmError> {
    let k = set.k();
    if k < 2 {
        return Err(SvmError::TooFewClasses(k));
    }
    if set.rows.is_empty() {
        return Err(SvmError::EmptyData);
    }
    let mut present = vec![false; k];
    for row in &set.rows {
        if row.class_index >= k {
            return Err(SvmError::ClassOutOfRange {
                index: row.class_index,
                k,
            });
        }
        if row.vector.dim_lower_bound() > set.p {
            return Err(SvmError::FeatureOutOfRange {
                index: row.vector.dim_lower_bound() - 1,
                p: set.p,
            });
        }
        present[row.class_index] = true;
    }
    if present.iter().filter(|&&b| b).count() < 2 {
        return Err(SvmError::SingleClass);
    }
    Ok(())
}

/// Appends the constant feature at index `p`.
fn augment<T: Real>(x: &SparseVector<T>, p: usize, bias_feature: T) -> Vec<(usize, T)> {
    let mut e = x.entries().to_vec();
    if bias_feature != T::zero() {
        e.push((p, bias_feature));
    }
    e
}

fn dot_aug<T: Real>(x: &[(usize, T)], w: &[T]) -> T {
    x.iter().map(|&(i, v)| v * w[i]).sum()
}

/// Exact solution of one example's block:
/// `min ½A‖α‖² + Bᵀα  s.t. Σα = 0, α_m ≤ C·[m = y]`.
fn solve_block<T: Real>(a: T, b: &[T], y: usize, c: T, out: &mut [T]) {
    let k = b.len();
    let mut d: Vec<T> = b.to_vec();
    d[y] = d[y] + a * c;
    d.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    let mut beta = d[0] - a * c;
    let mut r = 1;
    while r < k && beta < T::from_count(r) * d[r] {
        beta = beta + d[r];
        r += 1;
    }
    beta = beta / T::from_count(r);
    for m in 0..k {
        let bound = if m == y { c } else { T::zero() };
        out[m] = bound.min((beta - b[m]) / a);
    }
}

/// Trains and returns the model.
pub fn train_svm<T: Real>(set: &VectorSet<T>, config: &SvmConfig<T>) -> Result<SvmModel<T>, SvmError> {
    train_svm_detailed(set, config).map(|t| t.model)
}

pub fn train_svm_detailed<T: Real>(set: &VectorSet<T>, config: &SvmConfig<T>) -> Result<SvmTraining<T>, SvmError> {
    train_svm_observed(set, config, |_, _| {})
}

/// Like [`train_svm_detailed`], calling `observer(epoch, state)` after every epoch.
pub fn train_svm_observed<T: Real, F: FnMut(usize, &DualState<T>)>(
    set: &VectorSet<T>,
    config: &SvmConfig<T>,
    mut observer: F,
) -> Result<SvmTraining<T>, SvmError> {
    config.validate()?;
    validate_data(set)?;
    let n = set.n();
    let k = set.k();
    let p = set.p;
    let dim = p + 1;
    let c = config.c;

    let xs: Vec<Vec<(usize, T)>> = set
        .rows
        .iter()
        .map(|r| augment(&r.vector, p, config.bias_feature))
        .collect();
    let labels: Vec<usize> = set.rows.iter().map(|r| r.class_index).collect();
    let sqnorm: Vec<T> = xs.iter().map(|x| x.iter().map(|&(_, v)| v * v).sum()).collect();

    let mut w = vec![T::zero(); k * dim];
    let mut state = DualState::zeros(n, k, config.bias_feature);
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.shuffle_seed);
    let mut g = vec![T::zero(); k];
    let mut b = vec![T::zero(); k];
    let mut alpha_new = vec![T::zero(); k];
    let mut epoch_objectives = Vec::new();
    let mut stop = StopReason::MaxEpochs;
    let mut epochs = 0;
    let mut final_violation = T::zero();
    let tiny = T::lit(1e-12);

    for epoch in 0..config.max_epochs {
        order.shuffle(&mut rng);
        let mut max_violation = T::zero();
        for &i in &order {
            let a = sqnorm[i];
            if a == T::zero() {
                continue;
            }
            let y = labels[i];
            let x = &xs[i];
            let tau = &mut state.tau[i * k..(i + 1) * k];
            let mut max_g = T::neg_infinity();
            let mut min_g = T::infinity();
            for m in 0..k {
                let e = if m == y { T::zero() } else { T::one() };
                g[m] = dot_aug(x, &w[m * dim..(m + 1) * dim]) + e;
                max_g = max_g.max(g[m]);
                let bound = if m == y { c } else { T::zero() };
                if tau[m] < bound {
                    min_g = min_g.min(g[m]);
                }
            }
            let violation = max_g - min_g;
            max_violation = max_violation.max(violation);
            if violation <= tiny {
                continue;
            }
            for m in 0..k {
                b[m] = g[m] - a * tau[m];
            }
            solve_block(a, &b, y, c, &mut alpha_new);
            for m in 0..k {
                let delta = alpha_new[m] - tau[m];
                if delta != T::zero() {
                    let wm = &mut w[m * dim..(m + 1) * dim];
                    for &(j, v) in x {
                        wm[j] = wm[j] + delta * v;
                    }
                    tau[m] = alpha_new[m];
                }
            }
            if config.check_feasibility {
                state.check_example(i, y, c)?;
            }
        }
        epochs = epoch + 1;
        final_violation = max_violation;
        state.objective = incremental_objective(&state, &labels, &w);
        epoch_objectives.push(state.objective);
        observer(epoch, &state);
        if max_violation < config.tol {
            stop = StopReason::Converged;
            break;
        }
    }
    log::debug!(
        "svm: {epochs} epochs, stop={stop:?}, violation={final_violation:e}, support vectors={}",
        state.support_vector_count()
    );

    let weights = (0..k).map(|m| w[m * dim..m * dim + p].to_vec()).collect();
    let bias_weights = (0..k).map(|m| w[m * dim + p]).collect();
    let model = SvmModel::from_parts(set.class_names.clone(), p, weights, bias_weights, config.bias_feature)?;
    Ok(SvmTraining {
        model,
        state,
        epochs,
        stop,
        final_violation,
        epoch_objectives,
    })
}

fn incremental_objective<T: Real>(state: &DualState<T>, labels: &[usize], w: &[T]) -> T {
    let linear: T = labels.iter().enumerate().map(|(i, &y)| state.tau(i)[y]).sum();
    let quad: T = w.iter().map(|&v| v * v).sum();
    linear - T::lit(0.5) * quad
}

/// Dual objective `Σ_i τ_{i,y_i} − ½ Σ_c ‖Σ_i τ_ic x_i‖²`, recomputed from
/// the multipliers.
pub fn dual_objective<T: Real>(state: &DualState<T>, data: &[LabeledVector<T>], p: usize) -> T {
    let k = state.k();
    let dim = p + 1;
    let mut w = vec![T::zero(); k * dim];
    for (i, row) in data.iter().enumerate() {
        let x = augment(&row.vector, p, state.bias_feature());
        for m in 0..k {
            let t = state.tau(i)[m];
            if t != T::zero() {
                for &(j, v) in &x {
                    w[m * dim + j] = w[m * dim + j] + t * v;
                }
            }
        }
    }
    let labels: Vec<usize> = data.iter().map(|r| r.class_index).collect();
    incremental_objective(state, &labels, &w)
}

/// Primal objective of a trained model with penalty `c`.
pub fn primal_objective<T: Real>(model: &SvmModel<T>, data: &[LabeledVector<T>], c: T) -> Result<T, SvmError> {
    let mut reg = T::zero();
    for m in 0..model.k() {
        reg = reg + model.weights(m).iter().map(|&v| v * v).sum::<T>();
        reg = reg + model.bias_weights()[m] * model.bias_weights()[m];
    }
    let mut loss = T::zero();
    for row in data {
        let s = model.decision_scores(&row.vector)?;
        let y = row.class_index;
        let worst = (0..model.k())
            .map(|m| if m == y { s[m] } else { s[m] + T::one() })
            .fold(T::neg_infinity(), T::max);
        loss = loss + (worst - s[y]);
    }
    Ok(T::lit(0.5) * reg + c * loss)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(e: &[(usize, f64)]) -> SparseVector<f64> {
        SparseVector::from_entries(e.to_vec()).unwrap()
    }

    fn set(rows: Vec<(Vec<(usize, f64)>, usize)>, p: usize, k: usize) -> VectorSet<f64> {
        VectorSet {
            p,
            class_names: (0..k).map(|c| format!("c{c}")).collect(),
            rows: rows.into_iter().map(|(e, c)| LabeledVector::new(sv(&e), c)).collect(),
        }
    }

    fn one_d() -> VectorSet<f64> {
        set(vec![(vec![(0, 1.0)], 0), (vec![(0, -1.0)], 1)], 1, 2)
    }

    #[test]
    fn block_solver_satisfies_constraints() {
        let mut out = vec![0.0; 3];
        solve_block(2.0, &[0.3, 1.0, -0.5], 0, 1.0, &mut out);
        assert!(out.iter().sum::<f64>().abs() < 1e-12);
        assert!(out[0] <= 1.0 && out[1] <= 0.0 && out[2] <= 0.0);
    }

    #[test]
    fn one_dimensional_margin() {
        let cfg = SvmConfig {
            check_feasibility: true,
            ..SvmConfig::default()
        };
        let t = train_svm_detailed(&one_d(), &cfg).unwrap();
        for row in &one_d().rows {
            let s = t.model.decision_scores(&row.vector).unwrap();
            let y = row.class_index;
            assert!(s[y] - s[1 - y] >= 1.0 - cfg.tol, "{s:?}");
        }
        assert_eq!(t.model.predict(&sv(&[(0, 0.5)])).unwrap(), 0);
        assert_eq!(t.model.predict(&sv(&[(0, -0.5)])).unwrap(), 1);
        assert_eq!(t.stop, StopReason::Converged);
    }

    #[test]
    fn single_class_and_empty_rejected() {
        let s = set(vec![(vec![(0, 1.0)], 0), (vec![(0, 2.0)], 0)], 1, 2);
        assert_eq!(train_svm(&s, &SvmConfig::default()).unwrap_err(), SvmError::SingleClass);
        let e = set(vec![], 1, 2);
        assert_eq!(train_svm(&e, &SvmConfig::default()).unwrap_err(), SvmError::EmptyData);
        let wide = set(vec![(vec![(3, 1.0)], 0), (vec![(0, 1.0)], 1)], 2, 2);
        assert!(matches!(
            train_svm(&wide, &SvmConfig::default()),
            Err(SvmError::FeatureOutOfRange { index: 3, p: 2 })
        ));
        let bad_c = SvmConfig {
            c: 0.0,
            ..SvmConfig::default()
        };
        assert!(matches!(train_svm(&one_d(), &bad_c), Err(SvmError::InvalidConfig(_))));
    }

    #[test]
    fn decision_scores_contract() {
        let m = train_svm(&one_d(), &SvmConfig::default()).unwrap();
        let zero = SparseVector::zeros();
        let s1 = m.decision_scores(&zero).unwrap();
        let s2 = m.decision_scores(&zero).unwrap();
        assert_eq!(s1, s2);
        assert!(matches!(
            m.decision_scores(&sv(&[(1, 1.0)])),
            Err(SvmError::FeatureOutOfRange { .. })
        ));
        let no_bias = SvmConfig {
            bias_feature: 0.0,
            ..SvmConfig::default()
        };
        let m0 = train_svm(&one_d(), &no_bias).unwrap();
        assert_eq!(m0.decision_scores(&zero).unwrap(), vec![0.0, 0.0]);
        assert_eq!(m0.predict(&zero).unwrap(), 0);
    }

    #[test]
    fn argmax_ties_and_scaling() {
        assert_eq!(argmax(&[0.0_f64, 0.0, 0.0]), 0);
        assert_eq!(argmax(&[1.0_f64, 3.0, 3.0]), 1);
        let s = [0.2_f64, -1.0, 0.7, 0.1];
        let scaled: Vec<f64> = s.iter().map(|v| v * 3.5).collect();
        assert_eq!(argmax(&s), argmax(&scaled));
    }

    #[test]
    fn zero_multipliers_give_zero_objective() {
        let st = DualState::<f64>::zeros(2, 2, 1.0);
        assert_eq!(dual_objective(&st, &one_d().rows, 1), 0.0);
    }
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    /// Small dense problems with at least two classes present.
    fn problem() -> impl Strategy<Value = VectorSet<f64>> {
        (2usize..5, 1usize..5, 4usize..30).prop_flat_map(|(k, p, n)| {
            (
                Just(k),
                Just(p),
                proptest::collection::vec(proptest::collection::vec(-3.0f64..3.0, p), n),
                proptest::collection::vec(0..k, n),
            )
                .prop_map(|(k, p, xs, mut labels)| {
                    labels[0] = 0;
                    labels[1] = 1;
                    VectorSet {
                        p,
                        class_names: (0..k).map(|c| format!("c{c}")).collect(),
                        rows: xs
                            .iter()
                            .zip(labels)
                            .map(|(x, y)| LabeledVector::new(SparseVector::from_dense(x).unwrap(), y))
                            .collect(),
                    }
                })
        })
    }

    fn config(c: f64) -> SvmConfig<f64> {
        SvmConfig {
            c,
            check_feasibility: true,
            max_epochs: 60,
            ..SvmConfig::default()
        }
    }

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn multipliers_stay_feasible(set in problem(), c in 0.05f64..10.0) {
            let out = train_svm_detailed(&set, &config(c)).unwrap();
            for (i, row) in set.rows.iter().enumerate() {
                prop_assert!(out.state.check_example(i, row.class_index, c).is_ok());
            }
        }

        #[test]
        fn dual_objective_never_decreases(set in problem(), c in 0.05f64..10.0) {
            let out = train_svm_detailed(&set, &config(c)).unwrap();
            prop_assert!(out.epoch_objectives[0] >= -1e-12);
            for w in out.epoch_objectives.windows(2) {
                prop_assert!(w[1] >= w[0] - 1e-9 * (1.0 + w[0].abs()), "{} -> {}", w[0], w[1]);
            }
        }

        #[test]
        fn incremental_weights_match_recomputation(set in problem(), c in 0.05f64..10.0) {
            let out = train_svm_detailed(&set, &config(c)).unwrap();
            let (k, p) = (set.k(), set.p);
            let mut w = vec![vec![0.0; p + 1]; k];
            for (i, row) in set.rows.iter().enumerate() {
                for m in 0..k {
                    let t = out.state.tau(i)[m];
                    for &(j, v) in row.vector.entries() {
                        w[m][j] += t * v;
                    }
                    w[m][p] += t * out.state.bias_feature();
                }
            }
            for m in 0..k {
                for j in 0..p {
                    prop_assert!((out.model.weights(m)[j] - w[m][j]).abs() < 1e-8);
                }
                prop_assert!((out.model.bias_weights()[m] - w[m][p]).abs() < 1e-8);
            }
            let fresh = dual_objective(&out.state, &set.rows, p);
            prop_assert!((fresh - out.state.objective).abs() < 1e-8);
        }

        #[test]
        fn weak_duality(set in problem(), c in 0.05f64..10.0) {
            let out = train_svm_detailed(&set, &config(c)).unwrap();
            let primal = primal_objective(&out.model, &set.rows, c).unwrap();
            prop_assert!(primal >= out.state.objective - 1e-9 * (1.0 + primal.abs()));
        }

        #[test]
        fn rescaling_inputs_leaves_scores_unchanged(
            set in problem(),
            c in 0.05f64..10.0,
            e in prop::sample::select(vec![-2i32, -1, 1, 2]),
        ) {
            let s = 2f64.powi(e);
            let scaled = VectorSet {
                p: set.p,
                class_names: set.class_names.clone(),
                rows: set.rows.iter().map(|r| LabeledVector::new(r.vector.scaled(s), r.class_index)).collect(),
            };
            let cfg = SvmConfig { bias_feature: s, c: c / (s * s), ..config(c) };
            let a = train_svm(&set, &config(c)).unwrap();
            let b = train_svm(&scaled, &cfg).unwrap();
            for (r, rs) in set.rows.iter().zip(&scaled.rows) {
                let sa = a.decision_scores(&r.vector).unwrap();
                let sb = b.decision_scores(&rs.vector).unwrap();
                for (x, y) in sa.iter().zip(&sb) {
                    prop_assert!(rel_close(*x, *y, 1e-9), "{x} vs {y}");
                }
                prop_assert_eq!(a.predict(&r.vector).unwrap(), b.predict(&rs.vector).unwrap());
            }
        }

        #[test]
        fn training_is_reproducible(set in problem(), seed in any::<u64>()) {
            let cfg = SvmConfig { shuffle_seed: seed, ..config(1.0) };
            let a = train_svm_detailed(&set, &cfg).unwrap();
            let b = train_svm_detailed(&set, &cfg).unwrap();
            prop_assert_eq!(a.model, b.model);
            prop_assert_eq!(a.state, b.state);
        }
    }
}
