//! Regular-expression block list for hazardous elements.

use regex::Regex;
use thiserror::Error;

use super::ObservedElement;

#[derive(Debug, Error)]
#[error("block-list rule {line}: {pattern:?} does not compile: {message}")]
pub struct BlockListError {
    pub line: usize,
    pub pattern: String,
    pub message: String,
}

/// Ordered regex rules matched against element names, xpaths and target URLs.
#[derive(Debug, Clone, Default)]
pub struct BlockList {
    rules: Vec<Regex>,
}

impl BlockList {
    pub fn new<I, S>(patterns: I) -> Result<Self, BlockListError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let rules = patterns
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                Regex::new(p.as_ref()).map_err(|e| BlockListError {
                    line: i + 1,
                    pattern: p.as_ref().to_owned(),
                    message: e.to_string(),
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { rules })
    }

    /// Parses a block-list file: one pattern per line, blank lines and lines
    /// starting with `#` ignored.
    pub fn parse(text: &str) -> Result<Self, BlockListError> {
        let mut rules = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            rules.push(Regex::new(line).map_err(|e| BlockListError {
                line: i + 1,
                pattern: line.to_owned(),
                message: e.to_string(),
            })?);
        }
        Ok(Self { rules })
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn patterns(&self) -> impl Iterator<Item = &str> {
        self.rules.iter().map(Regex::as_str)
    }

    /// True if any rule matches one of the three strings.
    pub fn matches(&self, name: &str, xpath: &str, target_url: &str) -> bool {
        self.rules
            .iter()
            .any(|r| r.is_match(name) || r.is_match(xpath) || (!target_url.is_empty() && r.is_match(target_url)))
    }

    /// External links are always blocked; other elements only by rule.
    pub fn is_blocked(&self, element: &ObservedElement) -> bool {
        element.external
            || self.matches(
                &element.element.name,
                &element.element.xpath,
                element.target_url.as_deref().unwrap_or(""),
            )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ElementRef, Role};

    fn el(name: &str, external: bool) -> ObservedElement {
        ObservedElement {
            element: ElementRef::new("/html/body/a[1]", Role::Link, name).unwrap(),
            hazard: false,
            external,
            target_url: Some("http://site.test/account".into()),
        }
    }

    #[test]
    fn case_insensitive_rule_matches_name() {
        let bl = BlockList::new(["(?i)delete"]).unwrap();
        assert!(bl.is_blocked(&el("Delete Account", false)));
        assert!(!bl.is_blocked(&el("Settings", false)));
    }

    #[test]
    fn empty_list_blocks_nothing_but_external() {
        let bl = BlockList::default();
        assert!(!bl.is_blocked(&el("Delete Account", false)));
        assert!(bl.is_blocked(&el("Docs", true)));
    }

    #[test]
    fn rules_see_xpath_and_target() {
        let bl = BlockList::new([r"/account$"]).unwrap();
        assert!(bl.is_blocked(&el("Me", false)));
        let bl = BlockList::new([r"a\[1\]"]).unwrap();
        assert!(bl.is_blocked(&el("Me", false)));
    }

    #[test]
    fn file_format_skips_comments() {
        let bl = BlockList::parse("# hazards\n\n(?i)logout\n  (?i)delete  \n").unwrap();
        assert_eq!(bl.patterns().collect::<Vec<_>>(), ["(?i)logout", "(?i)delete"]);
    }

    #[test]
    fn invalid_rule_rejected_with_line() {
        let err = BlockList::parse("ok\n# c\n(unclosed\n").unwrap_err();
        assert_eq!(err.line, 3);
    }
}
