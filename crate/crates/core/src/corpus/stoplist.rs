use std::collections::HashSet;
use std::io::{self, BufRead};

const SMART: &str = include_str!("../../data/smart_stoplist.txt");

/// A set of terms dropped before stemming.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stoplist {
    terms: HashSet<String>,
}

impl Stoplist {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The bundled SMART list.
    pub fn smart() -> Self {
        Self::parse(SMART)
    }

    /// One term per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Self {
        text.lines().collect()
    }

    pub fn read(reader: impl BufRead) -> io::Result<Self> {
        let mut terms = HashSet::new();
        for line in reader.lines() {
            if let Some(t) = clean(&line?) {
                terms.insert(t);
            }
        }
        Ok(Self { terms })
    }

    pub fn contains(&self, term: &str) -> bool {
        self.terms.contains(term)
    }

    /// Order-preserving filter.
    pub fn remove(&self, tokens: Vec<String>) -> Vec<String> {
        tokens.into_iter().filter(|t| !self.contains(t)).collect()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

fn clean(line: &str) -> Option<String> {
    let line = line.split('#').next().unwrap_or("").trim();
    (!line.is_empty()).then(|| line.to_lowercase())
}

impl<'a> FromIterator<&'a str> for Stoplist {
    fn from_iter<I: IntoIterator<Item = &'a str>>(iter: I) -> Self {
        Self {
            terms: iter.into_iter().filter_map(clean).collect(),
        }
    }
}
