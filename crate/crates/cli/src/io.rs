use std::path::Path;

use crate::CliError;

/// Reads a headerless numeric CSV into rows. Every row must have the same
/// number of fields.
pub fn read_matrix(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let row = record
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("{}: row {}: cannot parse {f:?}", path.display(), i + 1)))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Usage(format!("{} contains no rows", path.display())));
    }
    Ok(rows)
}

/// Reads one value per line.
pub fn read_column(path: &Path) -> Result<Vec<f64>, CliError> {
    let rows = read_matrix(path)?;
    if let Some(r) = rows.iter().find(|r| r.len() != 1) {
        return Err(CliError::Usage(format!(
            "{}: expected one value per line, found a row with {} fields",
            path.display(),
            r.len()
        )));
    }
    Ok(rows.into_iter().map(|r| r[0]).collect())
}
