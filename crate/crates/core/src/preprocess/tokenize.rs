/// Lowercased maximal runs of alphabetic characters; runs shorter than two
/// characters are dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphabetic())
        .filter(|run| run.chars().nth(1).is_some())
        .map(str::to_lowercase)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(tokenize("The cats, sat!"), vec!["the", "cats", "sat"]);
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("X-ray 2023 soft-ware"), vec!["ray", "soft", "ware"]);
    }

    #[test]
    fn markup_and_digits_split() {
        assert_eq!(
            tokenize("<BODY>grain&amp;wheat 3rd</BODY>"),
            vec!["body", "grain", "amp", "wheat", "rd", "body"]
        );
        assert_eq!(tokenize("Über café"), vec!["über", "café"]);
    }
}
