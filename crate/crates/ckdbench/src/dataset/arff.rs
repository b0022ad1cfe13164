//! ARFF reader tailored to the UCI distribution format: `@relation`,
//! `@attribute` and `@data` directives, '%' comment lines, comma-separated
//! rows with "?" as the missing marker.
//!
//! The reader tolerates the noise actually present in the UCI file:
//! tabs and stray spaces inside fields, keyword case differences, blank
//! lines, and the three rows carrying one extra comma.

use super::DataError;

/// Header + tokenized rows, before schema validation. Tokens are trimmed
/// and lower-cased; `None` is the missing marker.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub relation: String,
    /// Attribute names as declared in the header (short codes in the UCI
    /// file). Schema application is positional, so these are informational.
    pub attribute_names: Vec<String>,
    pub rows: Vec<Vec<Option<String>>>,
    /// 1-based source line of each row, for error reporting.
    pub row_lines: Vec<usize>,
}

fn normalize_token(tok: &str) -> Option<String> {
    let t = tok.trim();
    if t.is_empty() || t == "?" {
        None
    } else {
        Some(t.to_lowercase())
    }
}

/// Splits a data line into normalized tokens, recovering rows that carry
/// exactly one extra empty field (trailing or doubled comma).
fn split_row(line: &str, lineno: usize, expected: usize) -> Result<Vec<Option<String>>, DataError> {
    let mut tokens: Vec<Option<String>> = line.split(',').map(normalize_token).collect();
    if tokens.len() == expected + 1 {
        let raw: Vec<&str> = line.split(',').collect();
        if let Some(pos) = raw.iter().position(|t| t.trim().is_empty()) {
            tokens.remove(pos);
        }
    }
    if tokens.len() != expected {
        return Err(DataError::MalformedHeader {
            line: lineno,
            msg: format!("expected {expected} fields, found {}", tokens.len()),
        });
    }
    Ok(tokens)
}

/// Parses ARFF text into a [`RawTable`].
pub fn parse_arff(text: &str) -> Result<RawTable, DataError> {
    let mut relation = String::new();
    let mut attribute_names: Vec<String> = Vec::new();
    let mut rows = Vec::new();
    let mut row_lines = Vec::new();
    let mut in_data = false;

    for (idx, raw_line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if !in_data {
            let lower = line.to_lowercase();
            if lower.starts_with("@relation") {
                relation = line["@relation".len()..]
                    .trim()
                    .trim_matches('\'')
                    .to_string();
            } else if lower.starts_with("@attribute") {
                let rest = line["@attribute".len()..].trim();
                let name = if let Some(stripped) = rest.strip_prefix('\'') {
                    match stripped.find('\'') {
                        Some(end) => stripped[..end].to_string(),
                        None => {
                            return Err(DataError::MalformedHeader {
                                line: lineno,
                                msg: "unterminated quoted attribute name".into(),
                            })
                        }
                    }
                } else {
                    rest.split_whitespace().next().unwrap_or("").to_string()
                };
                if name.is_empty() {
                    return Err(DataError::MalformedHeader {
                        line: lineno,
                        msg: "attribute declaration without a name".into(),
                    });
                }
                attribute_names.push(name.to_lowercase());
            } else if lower.starts_with("@data") {
                if attribute_names.is_empty() {
                    return Err(DataError::MalformedHeader {
                        line: lineno,
                        msg: "@data before any @attribute declaration".into(),
                    });
                }
                in_data = true;
            } else {
                return Err(DataError::MalformedHeader {
                    line: lineno,
                    msg: format!("unrecognized directive '{line}'"),
                });
            }
        } else {
            rows.push(split_row(line, lineno, attribute_names.len())?);
            row_lines.push(lineno);
        }
    }

    if !in_data {
        return Err(DataError::MalformedHeader {
            line: text.lines().count(),
            msg: "no @data section".into(),
        });
    }
    if rows.is_empty() {
        return Err(DataError::EmptyData);
    }
    Ok(RawTable {
        relation,
        attribute_names,
        rows,
        row_lines,
    })
}
