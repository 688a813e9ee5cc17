//! Document path helpers.
//!
//! Paths are slash-separated element names rooted at the section elements
//! (`/meta`, `/custom`, `/guideline`). An element with same-named siblings
//! carries a 1-based ordinal, e.g. `/guideline/factors/factor[3]`; an only
//! child of its name carries none.

use crate::diag::{Code, Diagnostic};

/// Path of the `idx`-th (0-based) sibling named `name` among `total`
/// same-named siblings.
pub fn sibling_path(parent: &str, name: &str, idx: usize, total: usize) -> String {
    if total > 1 {
        format!("{parent}/{name}[{}]", idx + 1)
    } else {
        format!("{parent}/{name}")
    }
}

/// One parsed path step: element name plus optional explicit ordinal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub name: String,
    /// 1-based when given.
    pub ordinal: Option<usize>,
}

/// Split a path string into segments. Accepts both `factor` and
/// `factor[2]` steps.
pub fn parse_path(path: &str) -> Result<Vec<Segment>, Diagnostic> {
    let bad = |msg: String| Diagnostic::new(Code::BadPath, path, msg);
    let trimmed = path.strip_prefix('/').ok_or_else(|| {
        bad("path must start with '/'".into())
    })?;
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    let mut segments = Vec::new();
    for raw in trimmed.split('/') {
        if raw.is_empty() {
            return Err(bad("empty path segment".into()));
        }
        if let Some(open) = raw.find('[') {
            let close = raw
                .strip_suffix(']')
                .ok_or_else(|| bad(format!("malformed segment {raw:?}")))?;
            let ord: usize = close[open + 1..]
                .parse()
                .map_err(|_| bad(format!("malformed ordinal in {raw:?}")))?;
            if ord == 0 {
                return Err(bad("ordinals are 1-based".into()));
            }
            segments.push(Segment {
                name: raw[..open].to_string(),
                ordinal: Some(ord),
            });
        } else {
            segments.push(Segment {
                name: raw.to_string(),
                ordinal: None,
            });
        }
    }
    Ok(segments)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordinals_only_for_repeated_names() {
        assert_eq!(sibling_path("/guideline/factors", "factor", 2, 11), "/guideline/factors/factor[3]");
        assert_eq!(sibling_path("/guideline", "factors", 0, 1), "/guideline/factors");
    }

    #[test]
    fn parse_accepts_bare_and_ordinal_segments() {
        let segs = parse_path("/guideline/factors/factor[3]").unwrap();
        assert_eq!(segs.len(), 3);
        assert_eq!(segs[2].name, "factor");
        assert_eq!(segs[2].ordinal, Some(3));
        assert_eq!(segs[1].ordinal, None);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_path("guideline").is_err());
        assert!(parse_path("/a//b").is_err());
        assert!(parse_path("/a[0]").is_err());
        assert!(parse_path("/a[x]").is_err());
    }
}
