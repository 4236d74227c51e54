use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Corpus, CorpusError};

/// Shape of a deterministic sub-corpus: how many documents over how many classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubsetSpec {
    pub n_docs: usize,
    pub n_classes: usize,
    pub seed: u64,
}

impl SubsetSpec {
    pub fn new(n_docs: usize, n_classes: usize, seed: u64) -> Self {
        Self {
            n_docs,
            n_classes,
            seed,
        }
    }
}

/// Picks the `n_classes` largest classes (ties by name) and draws a balanced,
/// seeded sample from each; leftover documents go to the largest classes.
pub fn sample_subset(corpus: &Corpus, spec: SubsetSpec) -> Result<Corpus, CorpusError> {
    if spec.n_classes == 0 || spec.n_docs == 0 {
        return Err(CorpusError::InfeasibleSubset(
            "n_docs and n_classes must be positive".into(),
        ));
    }
    if spec.n_classes > corpus.classes().len() {
        return Err(CorpusError::InfeasibleSubset(format!(
            "{} classes requested but the corpus has {}",
            spec.n_classes,
            corpus.classes().len()
        )));
    }
    if spec.n_docs < spec.n_classes {
        return Err(CorpusError::InfeasibleSubset(format!(
            "{} documents cannot cover {} classes",
            spec.n_docs, spec.n_classes
        )));
    }

    let counts = corpus.class_counts();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    // classes are already sorted by name, so a stable sort keeps name order on ties
    order.sort_by(|&a, &b| counts[b].cmp(&counts[a]));
    let selected = &order[..spec.n_classes];

    let base = spec.n_docs / spec.n_classes;
    let extra = spec.n_docs % spec.n_classes;
    let quota = |rank: usize| base + usize::from(rank < extra);

    let deficient: Vec<String> = selected
        .iter()
        .enumerate()
        .filter(|&(rank, &c)| counts[c] < quota(rank))
        .map(|(rank, &c)| format!("{} (has {}, needs {})", corpus.classes()[c], counts[c], quota(rank)))
        .collect();
    if !deficient.is_empty() {
        return Err(CorpusError::InfeasibleSubset(format!(
            "too few documents in: {}",
            deficient.join(", ")
        )));
    }

    let labels = corpus.labels();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut picked = Vec::with_capacity(spec.n_docs);
    for (rank, &c) in selected.iter().enumerate() {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
        members.shuffle(&mut rng);
        picked.extend(members.into_iter().take(quota(rank)));
    }
    Corpus::new(picked.into_iter().map(|i| corpus.documents()[i].clone()).collect())
}
