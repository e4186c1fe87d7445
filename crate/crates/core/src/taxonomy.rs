//! Verb and noun vocabularies and the (verb, noun) action identity.
//!
//! The taxonomy file is plain UTF-8 text with two sections:
//!
//! ```text
//! #verbs
//! take
//! put
//!
//! #nouns
//! spoon
//! ```
//!
//! Index order is file order. Labels may contain underscores but never
//! whitespace, because a single space separates verb from noun in the
//! textual `verb noun` rendering.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// A verb–noun pair, stored as indices into a [`Taxonomy`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Action {
    pub verb: usize,
    pub noun: usize,
}

impl Action {
    pub const fn new(verb: usize, noun: usize) -> Self {
        Self { verb, noun }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Taxonomy {
    verbs: Vec<String>,
    nouns: Vec<String>,
    verb_index: HashMap<String, usize>,
    noun_index: HashMap<String, usize>,
}

fn index_labels(kind: &'static str, labels: &[String]) -> Result<HashMap<String, usize>> {
    if labels.is_empty() {
        return Err(Error::EmptyVocabulary(if kind == "verb" { "verbs" } else { "nouns" }));
    }
    let mut index = HashMap::with_capacity(labels.len());
    for (i, label) in labels.iter().enumerate() {
        if label.is_empty() || label.chars().any(char::is_whitespace) {
            return Err(Error::invalid(format!(
                "{kind} label `{label}` must be non-empty and contain no whitespace"
            )));
        }
        if index.insert(label.clone(), i).is_some() {
            return Err(Error::DuplicateLabel {
                kind,
                label: label.clone(),
            });
        }
    }
    Ok(index)
}

impl Taxonomy {
    pub fn new<V, N>(verbs: V, nouns: N) -> Result<Self>
    where
        V: IntoIterator,
        V::Item: Into<String>,
        N: IntoIterator,
        N::Item: Into<String>,
    {
        let verbs: Vec<String> = verbs.into_iter().map(Into::into).collect();
        let nouns: Vec<String> = nouns.into_iter().map(Into::into).collect();
        let verb_index = index_labels("verb", &verbs)?;
        let noun_index = index_labels("noun", &nouns)?;
        Ok(Self {
            verbs,
            nouns,
            verb_index,
            noun_index,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_text(&text).map_err(|e| match e {
            Error::Parse { line, message, .. } => Error::parse(path, line, message),
            other => other,
        })
    }

    /// Parses the two-section taxonomy format from an in-memory string.
    pub fn parse_text(text: &str) -> Result<Self> {
        enum Section {
            None,
            Verbs,
            Nouns,
        }
        let mut section = Section::None;
        let mut verbs = Vec::new();
        let mut nouns = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            match line {
                "#verbs" => section = Section::Verbs,
                "#nouns" => section = Section::Nouns,
                _ if line.starts_with('#') => {
                    return Err(Error::parse(
                        "<taxonomy>",
                        lineno + 1,
                        format!("unknown section `{line}`"),
                    ));
                }
                _ => match section {
                    Section::Verbs => verbs.push(line.to_string()),
                    Section::Nouns => nouns.push(line.to_string()),
                    Section::None => {
                        return Err(Error::parse(
                            "<taxonomy>",
                            lineno + 1,
                            "label before any `#verbs`/`#nouns` header",
                        ));
                    }
                },
            }
        }
        Self::new(verbs, nouns)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("#verbs\n");
        for v in &self.verbs {
            let _ = writeln!(out, "{v}");
        }
        out.push_str("\n#nouns\n");
        for n in &self.nouns {
            let _ = writeln!(out, "{n}");
        }
        out
    }

    pub fn num_verbs(&self) -> usize {
        self.verbs.len()
    }

    pub fn num_nouns(&self) -> usize {
        self.nouns.len()
    }

    pub fn num_actions(&self) -> usize {
        self.verbs.len() * self.nouns.len()
    }

    pub fn verbs(&self) -> &[String] {
        &self.verbs
    }

    pub fn nouns(&self) -> &[String] {
        &self.nouns
    }

    pub fn verb_label(&self, index: usize) -> Option<&str> {
        self.verbs.get(index).map(String::as_str)
    }

    pub fn noun_label(&self, index: usize) -> Option<&str> {
        self.nouns.get(index).map(String::as_str)
    }

    pub fn verb_id(&self, label: &str) -> Option<usize> {
        self.verb_index.get(label).copied()
    }

    pub fn noun_id(&self, label: &str) -> Option<usize> {
        self.noun_index.get(label).copied()
    }

    pub fn contains(&self, action: Action) -> bool {
        action.verb < self.verbs.len() && action.noun < self.nouns.len()
    }

    pub fn check(&self, action: Action) -> Result<Action> {
        if self.contains(action) {
            Ok(action)
        } else {
            Err(Error::ActionOutOfRange {
                verb: action.verb,
                noun: action.noun,
                verbs: self.num_verbs(),
                nouns: self.num_nouns(),
            })
        }
    }

    /// Dense id in `[0, |V|·|N|)`, verb-major.
    pub fn action_id(&self, action: Action) -> usize {
        action.verb * self.nouns.len() + action.noun
    }

    pub fn action_from_id(&self, id: usize) -> Action {
        Action::new(id / self.nouns.len(), id % self.nouns.len())
    }

    /// Parses `"verb noun"` with exactly one space between the labels.
    pub fn parse_action(&self, text: &str) -> Result<Action> {
        let mut parts = text.split(' ');
        let (Some(verb), Some(noun), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::MalformedAction(text.to_string()));
        };
        if verb.is_empty() || noun.is_empty() {
            return Err(Error::MalformedAction(text.to_string()));
        }
        let verb = self.verb_id(verb).ok_or_else(|| Error::UnknownLabel {
            kind: "verb",
            token: verb.to_string(),
        })?;
        let noun = self.noun_id(noun).ok_or_else(|| Error::UnknownLabel {
            kind: "noun",
            token: noun.to_string(),
        })?;
        Ok(Action::new(verb, noun))
    }

    pub fn format_action(&self, action: Action) -> Result<String> {
        self.check(action)?;
        Ok(format!("{} {}", self.verbs[action.verb], self.nouns[action.noun]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Taxonomy {
        Taxonomy::parse_text("#verbs\ntake\nput\n\n#nouns\nspoon\n").unwrap()
    }

    #[test]
    fn loads_sizes_in_file_order() {
        let t = small();
        assert_eq!(t.num_verbs(), 2);
        assert_eq!(t.num_nouns(), 1);
        assert_eq!(t.verb_id("put"), Some(1));
    }

    #[test]
    fn duplicate_label_is_named() {
        let err = Taxonomy::parse_text("#verbs\ntake\ntake\n#nouns\nspoon\n").unwrap_err();
        assert!(err.to_string().contains("take"), "{err}");
    }

    #[test]
    fn zero_nouns_rejected() {
        let err = Taxonomy::parse_text("#verbs\ntake\n#nouns\n").unwrap_err();
        assert!(matches!(err, Error::EmptyVocabulary("nouns")));
    }

    #[test]
    fn parse_and_format() {
        let t = small();
        assert_eq!(t.parse_action("take spoon").unwrap(), Action::new(0, 0));
        assert_eq!(t.format_action(Action::new(0, 0)).unwrap(), "take spoon");
        assert_eq!(t.format_action(Action::new(1, 0)).unwrap(), "put spoon");
        match t.parse_action("fly spoon") {
            Err(Error::UnknownLabel { kind: "verb", token }) => assert_eq!(token, "fly"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(t.format_action(Action::new(5, 0)).is_err());
        for bad in ["take", "take  spoon", "take spoon extra", " take spoon", ""] {
            assert!(matches!(t.parse_action(bad), Err(Error::MalformedAction(_))), "{bad:?}");
        }
    }

    #[test]
    fn text_round_trip() {
        let t = Taxonomy::new(["cut", "wash_up"], ["onion", "pan"]).unwrap();
        assert_eq!(Taxonomy::parse_text(&t.to_text()).unwrap(), t);
    }

    #[test]
    fn loading_twice_is_identical() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("tax.txt");
        std::fs::write(&p, "#verbs\nb\na\n#nouns\nz\ny\n").unwrap();
        let a = Taxonomy::load(&p).unwrap();
        assert_eq!(a, Taxonomy::load(&p).unwrap());
        assert_eq!(a.verbs(), ["b", "a"]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn format_parse_round_trip(nv in 1usize..8, nn in 1usize..8, v in 0usize..8, n in 0usize..8) {
                let t = Taxonomy::new(
                    (0..nv).map(|i| format!("verb_{i}")),
                    (0..nn).map(|i| format!("noun_{i}")),
                ).unwrap();
                let a = Action::new(v % nv, n % nn);
                prop_assert_eq!(t.parse_action(&t.format_action(a).unwrap()).unwrap(), a);
            }
        }
    }
}
