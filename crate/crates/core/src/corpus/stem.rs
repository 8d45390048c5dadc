/// Maps a normalized token to its stem.
pub trait Stemmer: Send + Sync {
    fn stem(&self, token: &str) -> String;

    fn name(&self) -> &'static str;
}

/// Leaves tokens untouched.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityStemmer;

impl Stemmer for IdentityStemmer {
    fn stem(&self, token: &str) -> String {
        token.to_string()
    }

    fn name(&self) -> &'static str {
        "identity"
    }
}

/// Light rule-based suffix stripper.
///
/// Each pass applies the first matching rule; passes repeat until no rule
/// fires. Every rule shortens the token, so the loop terminates and the
/// output is a fixpoint: `stem(stem(t)) == stem(t)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SuffixStemmer;

const MIN_STEM: usize = 3;

// (suffix, replacement), checked in order.
const REWRITES: &[(&str, &str)] = &[
    ("ational", "ate"),
    ("ization", "ize"),
    ("ication", "ic"),
    ("fulness", "ful"),
    ("iveness", "ive"),
    ("ousness", "ous"),
    ("ation", "ate"),
    ("ical", "ic"),
    ("logy", "log"),
    ("ness", ""),
];

impl SuffixStemmer {
    fn step(word: &str) -> Option<String> {
        let len = word.chars().count();
        let strip = |suffix: &str, with: &str| -> Option<String> {
            let base = word.strip_suffix(suffix)?;
            (base.chars().count() >= MIN_STEM).then(|| format!("{base}{with}"))
        };

        if let Some(s) = strip("sses", "ss") {
            return Some(s);
        }
        if len > 4 {
            if let Some(s) = strip("ies", "y") {
                return Some(s);
            }
        }
        if let Some(base) = word.strip_suffix('s') {
            let prev = base.chars().last();
            let protected = matches!(prev, Some('s' | 'u' | 'i')) || word.ends_with("ens");
            if !protected && base.chars().count() >= MIN_STEM {
                return Some(base.to_string());
            }
        }
        for (suffix, with) in REWRITES {
            if let Some(s) = strip(suffix, with) {
                return Some(s);
            }
        }
        for suffix in ["ing", "ed"] {
            if let Some(base) = word.strip_suffix(suffix) {
                if base.chars().count() >= MIN_STEM && base.chars().any(is_vowel) {
                    return Some(base.to_string());
                }
            }
        }
        if let Some(base) = word.strip_suffix('e') {
            if base.chars().count() >= MIN_STEM {
                return Some(base.to_string());
            }
        }
        None
    }
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

impl Stemmer for SuffixStemmer {
    fn stem(&self, token: &str) -> String {
        let mut word = token.to_string();
        while let Some(next) = Self::step(&word) {
            debug_assert!(next.len() < word.len());
            word = next;
        }
        word
    }

    fn name(&self) -> &'static str {
        "suffix"
    }
}
