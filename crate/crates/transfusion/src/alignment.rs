//! Pharaoh-format word-alignment files: one line per sentence pair,
//! 0-based `i-j` links separated by spaces. Empty lines mean "no links".

use thiserror::Error;
use transfusion_core::projection::AlignmentLink;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlignmentError {
    #[error("line {line}: malformed alignment link {token:?} (expected i-j)")]
    BadLink { line: usize, token: String },
}

pub fn parse_pharaoh(text: &str) -> Result<Vec<Vec<AlignmentLink>>, AlignmentError> {
    let mut out = Vec::new();
    for (line_index, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim_end_matches('\r');
        let mut links = Vec::new();
        for token in line.split_whitespace() {
            let link = token.split_once('-').and_then(|(src, tgt)| {
                Some(AlignmentLink::new(src.parse().ok()?, tgt.parse().ok()?))
            });
            match link {
                Some(link) => links.push(link),
                None => {
                    return Err(AlignmentError::BadLink {
                        line: line_index + 1,
                        token: token.to_string(),
                    })
                }
            }
        }
        out.push(links);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_links_and_empty_lines() {
        let parsed = parse_pharaoh("0-0 1-2 2-1\n\n3-3\n").unwrap();
        assert_eq!(parsed.len(), 3);
        assert_eq!(parsed[0].len(), 3);
        assert_eq!(parsed[0][1], AlignmentLink::new(1, 2));
        assert!(parsed[1].is_empty());
        assert_eq!(parsed[2], vec![AlignmentLink::new(3, 3)]);
    }

    #[test]
    fn reports_line_number_for_bad_links() {
        let err = parse_pharaoh("0-0\n3-x\n").unwrap_err();
        assert_eq!(err, AlignmentError::BadLink { line: 2, token: "3-x".into() });
        let err = parse_pharaoh("7\n").unwrap_err();
        assert_eq!(err, AlignmentError::BadLink { line: 1, token: "7".into() });
    }
}
