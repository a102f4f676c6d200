//! URL normalization used for node identity.

/// Lowercases scheme and host, strips the fragment, and leaves path and query
/// untouched byte-for-byte.
///
/// Inputs without a `scheme://` prefix only lose their fragment.
pub fn normalize_url(raw: &str) -> String {
    let no_fragment = match raw.find('#') {
        Some(i) => &raw[..i],
        None => raw,
    };
    let Some(sep) = no_fragment.find("://") else {
        return no_fragment.to_owned();
    };
    let scheme = &no_fragment[..sep];
    let rest = &no_fragment[sep + 3..];
    let authority_end = rest.find(['/', '?']).unwrap_or(rest.len());
    let (authority, tail) = rest.split_at(authority_end);
    // userinfo is case-sensitive, only the host part is folded
    let authority = match authority.rfind('@') {
        Some(at) => format!("{}@{}", &authority[..at], authority[at + 1..].to_ascii_lowercase()),
        None => authority.to_ascii_lowercase(),
    };
    format!("{}://{}{}", scheme.to_ascii_lowercase(), authority, tail)
}
