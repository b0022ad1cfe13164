//! CSV ingestion path: first line is the header, fields are comma-separated,
//! "?" (or an empty field) is the missing marker. Same normalization and
//! schema validation as the ARFF path.

use super::arff::RawTable;
use super::DataError;

pub fn parse_csv(text: &str) -> Result<RawTable, DataError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());

    let (header_line, header) = lines.next().ok_or(DataError::EmptyData)?;
    let attribute_names: Vec<String> = header.split(',').map(|t| t.trim().to_lowercase()).collect();
    if attribute_names.iter().any(|n| n.is_empty()) {
        return Err(DataError::MalformedHeader {
            line: header_line,
            msg: "empty column name in header".into(),
        });
    }

    let mut rows = Vec::new();
    let mut row_lines = Vec::new();
    for (lineno, line) in lines {
        let tokens: Vec<Option<String>> = line
            .split(',')
            .map(|tok| {
                let t = tok.trim();
                if t.is_empty() || t == "?" {
                    None
                } else {
                    Some(t.to_lowercase())
                }
            })
            .collect();
        if tokens.len() != attribute_names.len() {
            return Err(DataError::MalformedHeader {
                line: lineno,
                msg: format!(
                    "expected {} fields, found {}",
                    attribute_names.len(),
                    tokens.len()
                ),
            });
        }
        rows.push(tokens);
        row_lines.push(lineno);
    }
    if rows.is_empty() {
        return Err(DataError::EmptyData);
    }
    Ok(RawTable {
        relation: String::new(),
        attribute_names,
        rows,
        row_lines,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_rows() {
        let raw = parse_csv("a,b,class\n1,yes,pos\n?,no,neg\n").unwrap();
        assert_eq!(raw.attribute_names, vec!["a", "b", "class"]);
        assert_eq!(raw.rows.len(), 2);
        assert_eq!(raw.rows[1][0], None);
    }

    #[test]
    fn empty_input() {
        assert!(matches!(parse_csv(""), Err(DataError::EmptyData)));
    }

    #[test]
    fn header_only_is_empty_data() {
        assert!(matches!(parse_csv("a,b\n"), Err(DataError::EmptyData)));
    }

    #[test]
    fn ragged_row_reports_line() {
        match parse_csv("a,b\n1,2\n3\n") {
            Err(DataError::MalformedHeader { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected MalformedHeader, got {other:?}"),
        }
    }
}
