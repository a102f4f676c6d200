//! Structural hashing: element digests, fingerprints and node identity.

use std::collections::BTreeSet;
use std::fmt;

use md5::{Digest, Md5};
use serde::{Deserialize, Serialize};

use super::GraphError;

fn md5_hex(bytes: &[u8]) -> String {
    format!("{:x}", Md5::digest(bytes))
}

fn is_digest(s: &str) -> bool {
    s.len() == 32 && s.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f'))
}

macro_rules! digest_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub struct $name(String);

        impl $name {
            /// Parses a 32-character lowercase hex digest.
            pub fn parse(s: &str) -> Result<Self, GraphError> {
                if is_digest(s) {
                    Ok(Self(s.to_owned()))
                } else {
                    Err(GraphError::InvalidDigest(s.to_owned()))
                }
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl TryFrom<String> for $name {
            type Error = GraphError;

            fn try_from(s: String) -> Result<Self, Self::Error> {
                if is_digest(&s) {
                    Ok(Self(s))
                } else {
                    Err(GraphError::InvalidDigest(s))
                }
            }
        }

        impl From<$name> for String {
            fn from(v: $name) -> String {
                v.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl std::str::FromStr for $name {
            type Err = GraphError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                Self::parse(s)
            }
        }
    };
}

digest_newtype!(
    /// MD5 digest of an element's absolute xpath.
    ElementHash
);

digest_newtype!(
    /// Identity of a page node: MD5 over the canonical fingerprint and URL.
    NodeId
);

/// Hashes the exact bytes of `xpath`.
pub fn hash_element(xpath: &str) -> Result<ElementHash, GraphError> {
    if xpath.is_empty() {
        return Err(GraphError::EmptyXpath);
    }
    Ok(ElementHash(md5_hex(xpath.as_bytes())))
}

/// The set of element hashes of one page.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StructuralFingerprint {
    hashes: BTreeSet<ElementHash>,
}

impl StructuralFingerprint {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, hash: ElementHash) -> bool {
        self.hashes.insert(hash)
    }

    pub fn contains(&self, hash: &ElementHash) -> bool {
        self.hashes.contains(hash)
    }

    pub fn len(&self) -> usize {
        self.hashes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hashes.is_empty()
    }

    /// Hashes in ascending (canonical) order.
    pub fn iter(&self) -> impl Iterator<Item = &ElementHash> {
        self.hashes.iter()
    }
}

impl FromIterator<ElementHash> for StructuralFingerprint {
    fn from_iter<I: IntoIterator<Item = ElementHash>>(iter: I) -> Self {
        Self {
            hashes: iter.into_iter().collect(),
        }
    }
}

/// Computes `MD5(sorted digests ‖ "|" ‖ url)`.
///
/// The digests are concatenated in ascending order with no separator, so the
/// result does not depend on the order elements were enumerated in.
pub fn node_identity(fingerprint: &StructuralFingerprint, url: &str) -> NodeId {
    let mut buf = Vec::with_capacity(fingerprint.len() * 32 + 1 + url.len());
    for h in fingerprint.iter() {
        buf.extend_from_slice(h.as_str().as_bytes());
    }
    buf.push(b'|');
    buf.extend_from_slice(url.as_bytes());
    NodeId(md5_hex(&buf))
}

/// Hashes present in `child` but not in `parent`.
pub fn structural_diff(
    child: &StructuralFingerprint,
    parent: &StructuralFingerprint,
) -> StructuralFingerprint {
    child
        .hashes
        .difference(&parent.hashes)
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(xpaths: &[&str]) -> StructuralFingerprint {
        xpaths.iter().map(|x| hash_element(x).unwrap()).collect()
    }

    #[test]
    fn empty_xpath_rejected() {
        assert!(matches!(hash_element(""), Err(GraphError::EmptyXpath)));
    }

    #[test]
    fn element_hash_is_lowercase_hex() {
        let h = hash_element("/html/body/div[1]/a[2]").unwrap();
        assert!(is_digest(h.as_str()));
        assert_eq!(h, hash_element("/html/body/div[1]/a[2]").unwrap());
    }

    #[test]
    fn identity_is_order_independent() {
        let a = fp(&["/html/body/a[1]", "/html/body/a[2]"]);
        let b = fp(&["/html/body/a[2]", "/html/body/a[1]"]);
        assert_eq!(node_identity(&a, "http://x/"), node_identity(&b, "http://x/"));
    }

    #[test]
    fn identity_depends_on_url() {
        let a = fp(&["/html/body/a[1]"]);
        assert_ne!(
            node_identity(&a, "http://x/one"),
            node_identity(&a, "http://x/two")
        );
    }

    #[test]
    fn diff_cases() {
        let abc = fp(&["/a", "/b", "/c"]);
        let ab = fp(&["/a", "/b"]);
        assert_eq!(structural_diff(&abc, &ab), fp(&["/c"]));
        assert!(structural_diff(&abc, &abc).is_empty());
        assert_eq!(structural_diff(&abc, &StructuralFingerprint::new()), abc);
    }

    #[test]
    fn digest_parse_rejects_uppercase() {
        assert!(NodeId::parse("D41D8CD98F00B204E9800998ECF8427E").is_err());
        assert!(NodeId::parse("d41d8cd98f00b204e9800998ecf8427e").is_ok());
        assert!(NodeId::parse("abc").is_err());
    }
}
