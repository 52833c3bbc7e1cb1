//! Reading raw records from data files.

use std::fs;
use std::path::Path;

use crate::CliError;

/// Raw text of every record. Without a column selector each non-blank line is
/// one record; with one, the file is read as delimited text with a header row.
pub fn read_records(path: &Path, column: Option<&str>, delimiter: char) -> Result<Vec<String>, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    match column {
        None => Ok(text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_owned)
            .collect()),
        Some(selector) => read_column(&text, selector, delimiter),
    }
}

fn read_column(text: &str, selector: &str, delimiter: char) -> Result<Vec<String>, CliError> {
    if !delimiter.is_ascii() {
        return Err(CliError::Input(format!("delimiter {delimiter:?} is not a single byte")));
    }
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter as u8)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let index = match headers.iter().position(|h| h == selector) {
        Some(i) => i,
        None => match selector.parse::<usize>() {
            Ok(i) if i >= 1 && i <= headers.len() => i - 1,
            _ => {
                return Err(CliError::Input(format!(
                    "no column {selector:?}; header has {}",
                    headers.iter().collect::<Vec<_>>().join(", ")
                )))
            }
        },
    };
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row?;
        // A short row has an empty field, which is an unparseable record.
        out.push(row.get(index).unwrap_or("").to_owned());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_by_name_and_index() {
        let text = "id,amount\n1,12.5\n2, 300\n3,-4\n";
        assert_eq!(read_column(text, "amount", ',').unwrap(), ["12.5", "300", "-4"]);
        assert_eq!(read_column(text, "2", ',').unwrap(), ["12.5", "300", "-4"]);
        assert!(read_column(text, "3", ',').is_err());
        assert!(read_column(text, "total", ',').is_err());
    }

    #[test]
    fn other_delimiters() {
        let text = "a;b\n7;8\n";
        assert_eq!(read_column(text, "b", ';').unwrap(), ["8"]);
    }

    #[test]
    fn short_rows_yield_empty_fields() {
        let text = "a,b\n1\n2,3\n";
        assert_eq!(read_column(text, "b", ',').unwrap(), ["", "3"]);
    }
}
