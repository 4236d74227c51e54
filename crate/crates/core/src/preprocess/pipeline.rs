use super::{porter, remove_stopwords, tokenize, StopList};

/// Preprocessing parameters. The steps themselves are fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineConfig {
    pub min_df: usize,
    pub stem: bool,
    pub stopwords: StopList,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            min_df: 2,
            stem: true,
            stopwords: StopList::Smart,
        }
    }
}

impl PipelineConfig {
    /// Tokenize, drop stop words, then stem.
    pub fn analyze(&self, text: &str) -> Vec<String> {
        let tokens = remove_stopwords(tokenize(text), self.stopwords);
        if self.stem {
            tokens.iter().map(|t| porter::stem(t)).collect()
        } else {
            tokens
        }
    }
}
