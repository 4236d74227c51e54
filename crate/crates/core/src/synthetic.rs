//! Seeded synthetic data: Gaussian blobs as dense-in-sparse vectors and a
//! topic-mixture text corpus. Used by the test suites and handy for smoke
//! runs when no real corpus is on disk.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::corpus::{Corpus, RawDocument};
use crate::preprocess::io::VectorSet;
use crate::preprocess::{LabeledVector, SparseVector, StopList};

/// `n_per_class` points around each center with isotropic standard deviation `sd`.
pub fn blobs(centers: &[Vec<f64>], n_per_class: usize, sd: f64, seed: u64) -> VectorSet<f64> {
    let dim = centers.first().map_or(0, Vec::len);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, sd).expect("finite, non-negative sd");
    let mut rows = Vec::with_capacity(centers.len() * n_per_class);
    for (c, center) in centers.iter().enumerate() {
        assert_eq!(center.len(), dim, "all centers need the same dimension");
        for _ in 0..n_per_class {
            let point: Vec<f64> = center.iter().map(|&m| m + noise.sample(&mut rng)).collect();
            rows.push(LabeledVector::new(SparseVector::from_dense(&point).expect("finite"), c));
        }
    }
    VectorSet {
        p: dim,
        class_names: (0..centers.len()).map(|c| format!("blob{c}")).collect(),
        rows,
    }
}

/// The 20-point, two-class set: blobs at (2, 1) and (−2, 1), sd 0.5.
pub fn two_blobs(seed: u64) -> VectorSet<f64> {
    blobs(&[vec![2.0, 1.0], vec![-2.0, 1.0]], 10, 0.5, seed)
}

/// Three blobs on a triangle in the plane, `n_per_class` points each.
pub fn three_blobs(n_per_class: usize, seed: u64) -> VectorSet<f64> {
    blobs(
        &[vec![3.0, 0.0], vec![-1.5, 2.6], vec![-1.5, -2.6]],
        n_per_class,
        0.6,
        seed,
    )
}

const ONSETS: [&str; 14] = ["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"];
const VOWELS: [&str; 4] = ["a", "o", "u", "e"];

/// Distinct pronounceable pseudo-words, none of them English stop words.
fn pseudo_words(count: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
    let mut all = Vec::new();
    for a in ONSETS {
        for v in VOWELS {
            for b in ONSETS {
                for w in VOWELS {
                    let word = format!("{a}{v}{b}{w}r");
                    if !StopList::Smart.contains(&word) {
                        all.push(word);
                    }
                }
            }
        }
    }
    all.shuffle(rng);
    all.truncate(count);
    all
}

/// Shape of [`topic_corpus`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopicCorpusSpec {
    pub n_docs: usize,
    pub n_classes: usize,
    /// Words shared by every class.
    pub common_words: usize,
    /// Words specific to each class.
    pub topic_words: usize,
    /// Probability that a token is drawn from the document's own topic.
    pub topic_share: f64,
    /// Probability that a token is drawn from another class's topic.
    pub confusion_share: f64,
    pub min_len: usize,
    pub max_len: usize,
    pub seed: u64,
}

impl TopicCorpusSpec {
    pub fn new(n_docs: usize, n_classes: usize, seed: u64) -> Self {
        Self {
            n_docs,
            n_classes,
            common_words: 400,
            topic_words: 60,
            topic_share: 0.25,
            confusion_share: 0.1,
            min_len: 40,
            max_len: 120,
            seed,
        }
    }
}

/// Documents labeled `topic00`, `topic01`, …, dealt round-robin, each a bag
/// of pseudo-words mixing shared vocabulary with its own topic's words.
pub fn topic_corpus(spec: TopicCorpusSpec) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let words = pseudo_words(spec.common_words + spec.n_classes * spec.topic_words, &mut rng);
    let (common, topical) = words.split_at(spec.common_words);
    let topics: Vec<&[String]> = topical.chunks(spec.topic_words).collect();
    let mut docs = Vec::with_capacity(spec.n_docs);
    for i in 0..spec.n_docs {
        let class = i % spec.n_classes;
        let len = rng.gen_range(spec.min_len..=spec.max_len);
        let mut text = Vec::with_capacity(len);
        for _ in 0..len {
            let u: f64 = rng.gen();
            let pool = if u < spec.topic_share {
                topics[class]
            } else if u < spec.topic_share + spec.confusion_share && spec.n_classes > 1 {
                let other = (class + rng.gen_range(1..spec.n_classes)) % spec.n_classes;
                topics[other]
            } else {
                common
            };
            text.push(pool[rng.gen_range(0..pool.len())].as_str());
        }
        docs.push(RawDocument::new(
            format!("doc{i:05}"),
            format!("topic{class:02}"),
            text.join(" "),
        ));
    }
    Corpus::new(docs).expect("unique ids, non-empty labels")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::PipelineConfig;

    #[test]
    fn blobs_are_seeded() {
        assert_eq!(two_blobs(3), two_blobs(3));
        assert_ne!(two_blobs(3), two_blobs(4));
        let b = two_blobs(3);
        assert_eq!((b.n(), b.k(), b.p), (20, 2, 2));
    }

    #[test]
    fn topic_corpus_shape() {
        let c = topic_corpus(TopicCorpusSpec::new(70, 7, 1));
        assert_eq!(c.len(), 70);
        assert_eq!(c.class_counts(), vec![10; 7]);
        assert_eq!(c, topic_corpus(TopicCorpusSpec::new(70, 7, 1)));
        // pseudo-words survive analysis
        let doc = &c.documents()[0];
        let n_tokens = doc.text.split(' ').count();
        assert_eq!(PipelineConfig::default().analyze(&doc.text).len(), n_tokens);
    }
}
