use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use super::PreprocessError;

const SMART_SOURCE: &str = include_str!("smart_stopwords.txt");

fn smart_set() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| SMART_SOURCE.lines().map(str::trim).filter(|l| !l.is_empty()).collect())
}

/// Named built-in stop list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StopList {
    /// The SMART system's English list.
    #[default]
    Smart,
    None,
}

impl StopList {
    pub fn from_name(name: &str) -> Result<Self, PreprocessError> {
        match name.to_ascii_lowercase().as_str() {
            "smart" => Ok(Self::Smart),
            "none" => Ok(Self::None),
            _ => Err(PreprocessError::UnknownStopList(name.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Smart => "smart",
            Self::None => "none",
        }
    }

    pub fn contains(self, token: &str) -> bool {
        match self {
            Self::Smart => smart_set().contains(token),
            Self::None => false,
        }
    }

    /// Distinct words in the list.
    pub fn len(self) -> usize {
        match self {
            Self::Smart => smart_set().len(),
            Self::None => 0,
        }
    }

    pub fn is_empty(self) -> bool {
        self.len() == 0
    }
}

impl FromStr for StopList {
    type Err = PreprocessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_name(s)
    }
}

impl fmt::Display for StopList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn remove_stopwords(tokens: Vec<String>, list: StopList) -> Vec<String> {
    tokens.into_iter().filter(|t| !list.contains(t)).collect()
}

/// Same as [`remove_stopwords`] but resolves the list by name.
pub fn remove_stopwords_named(tokens: Vec<String>, list: &str) -> Result<Vec<String>, PreprocessError> {
    Ok(remove_stopwords(tokens, StopList::from_name(list)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(ws: &[&str]) -> Vec<String> {
        ws.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn smart_list_shape() {
        // 571 lines, "would" listed twice.
        assert_eq!(SMART_SOURCE.lines().count(), 571);
        assert_eq!(StopList::Smart.len(), 570);
        for w in ["the", "a", "would", "zero", "yourselves", "according"] {
            assert!(StopList::Smart.contains(w), "{w}");
        }
        for w in ["cats", "sat", "grain", "wheat"] {
            assert!(!StopList::Smart.contains(w), "{w}");
        }
    }

    #[test]
    fn examples() {
        assert_eq!(
            remove_stopwords(toks(&["the", "cats", "sat"]), StopList::Smart),
            toks(&["cats", "sat"])
        );
        assert!(remove_stopwords(vec![], StopList::Smart).is_empty());
        assert!(remove_stopwords(toks(&["the", "of", "and"]), StopList::Smart).is_empty());
        assert_eq!(remove_stopwords(toks(&["the"]), StopList::None), toks(&["the"]));
    }

    #[test]
    fn unknown_list_name() {
        assert!(matches!(
            remove_stopwords_named(vec![], "glasgow"),
            Err(PreprocessError::UnknownStopList(n)) if n == "glasgow"
        ));
        assert_eq!("SMART".parse::<StopList>().unwrap(), StopList::Smart);
    }
}
