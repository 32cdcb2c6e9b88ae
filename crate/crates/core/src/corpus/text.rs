//! Text normalization and word counting for report analysis.

/// Keeps alphanumeric characters only, mapped to lowercase.
///
/// Alphanumeric is the Unicode notion (letters and numbers of any script),
/// so accented Italian text keeps its letters. Lowercase expansions that
/// yield non-alphanumeric marks drop those marks so the function stays
/// idempotent.
pub fn normalize_text(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    for c in raw.chars().filter(|c| c.is_alphanumeric()) {
        out.extend(c.to_lowercase().filter(|l| l.is_alphanumeric()));
    }
    out
}

/// Number of maximal runs of non-whitespace characters in the raw text.
pub fn word_count(raw: &str) -> usize {
    raw.split_whitespace().count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_text("AbC, d1!"), "abcd1");
        assert_eq!(normalize_text(""), "");
        assert_eq!(normalize_text("Qualità  ELEVATA.\n"), "qualitàelevata");
        assert_eq!(normalize_text("  \t\n"), "");
    }

    #[test]
    fn word_count_examples() {
        assert_eq!(word_count(""), 0);
        assert_eq!(word_count("one  two\nthree"), 3);
        assert_eq!(word_count("   "), 0);
        assert_eq!(word_count("a,b c"), 2);
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(s in any::<String>()) {
            let once = normalize_text(&s);
            prop_assert_eq!(normalize_text(&once), once.clone());
            prop_assert!(once
                .chars()
                .all(|c| c.is_alphanumeric() && c.to_lowercase().eq(std::iter::once(c))));
        }

        #[test]
        fn word_count_zero_iff_whitespace(s in "[ \ta-z,.\n]{0,30}") {
            prop_assert_eq!(word_count(&s) == 0, s.chars().all(char::is_whitespace));
        }
    }
}
