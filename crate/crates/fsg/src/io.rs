//! Dataset ingestion and emission.
//!
//! File format: comma-delimited text with an optional header row
//! (detected by a non-numeric first row). A column named `id` carries
//! sample identifiers; without one, rows align by position. Labels are
//! either a dedicated column (multi-attribute mode) or a separate
//! label file (multi-feature mode) with `id,label` or `label` rows.
//! String labels map to dense class indices in first-appearance order.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::dataset::{LabeledDataset, LabeledSample};
use crate::{Error, Result};

/// A parsed delimited file: optional ids, named columns, numeric cells
/// stored column-major is unnecessary; rows are kept as read.
struct Table {
    /// Column names; synthesized as `col{i}` when there is no header.
    columns: Vec<String>,
    /// Raw string cells, one Vec per row.
    rows: Vec<Vec<String>>,
}

fn data_err(path: &Path, message: impl Into<String>) -> Error {
    Error::DataFile { path: path.display().to_string(), message: message.into() }
}

fn is_numeric(cell: &str) -> bool {
    cell.trim().parse::<f64>().is_ok()
}

fn read_table(path: &Path) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| data_err(path, e.to_string()))?;
    let mut rows: Vec<Vec<String>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| data_err(path, e.to_string()))?;
        rows.push(record.iter().map(|s| s.to_string()).collect());
    }
    if rows.is_empty() {
        return Err(data_err(path, "file has no rows"));
    }
    let width = rows[0].len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(data_err(path, format!("row {} has {} cells, expected {width}", i + 1, row.len())));
        }
    }
    // Header rule: a first row with any non-numeric cell is a header.
    let has_header = rows[0].iter().any(|c| !is_numeric(c));
    let columns = if has_header {
        rows.remove(0)
    } else {
        (0..width).map(|i| format!("col{i}")).collect()
    };
    if rows.is_empty() {
        return Err(data_err(path, "file has a header but no data rows"));
    }
    Ok(Table { columns, rows })
}

impl Table {
    fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.eq_ignore_ascii_case(name))
    }

    fn id_column(&self) -> Option<usize> {
        self.column_index("id")
    }

    fn numeric_cell(&self, path: &Path, row: usize, col: usize) -> Result<f64> {
        self.rows[row][col].trim().parse::<f64>().map_err(|_| {
            data_err(
                path,
                format!(
                    "non-numeric cell '{}' at data row {}, column '{}'",
                    self.rows[row][col],
                    row + 1,
                    self.columns[col]
                ),
            )
        })
    }
}

/// Maps raw label strings to dense indices in first-appearance order.
fn build_label_map(raw: &[String]) -> (Vec<usize>, Vec<String>) {
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut labels = Vec::with_capacity(raw.len());
    for r in raw {
        let next = names.len();
        let idx = *index.entry(r.as_str()).or_insert_with(|| {
            names.push(r.clone());
            next
        });
        labels.push(idx);
    }
    (labels, names)
}

/// Loads a multi-feature dataset: one file per feature space plus a
/// label file (`id,label` rows, or bare `label` rows aligned by
/// position). Returns the dataset and the class-index-to-name map.
pub fn load_multi_feature(
    feature_paths: &[impl AsRef<Path>],
    labels_path: impl AsRef<Path>,
) -> Result<(LabeledDataset, Vec<String>)> {
    let labels_path = labels_path.as_ref();
    if feature_paths.is_empty() {
        return Err(Error::InvalidParameter("need at least one feature file".into()));
    }
    let label_table = read_table(labels_path)?;
    let (ids, raw_labels): (Vec<String>, Vec<String>) = match label_table.columns.len() {
        1 => (
            (0..label_table.rows.len()).map(|i| format!("row{i}")).collect(),
            label_table.rows.iter().map(|r| r[0].clone()).collect(),
        ),
        2 => {
            let id_col = label_table.id_column().unwrap_or(0);
            let label_col = 1 - id_col;
            (
                label_table.rows.iter().map(|r| r[id_col].clone()).collect(),
                label_table.rows.iter().map(|r| r[label_col].clone()).collect(),
            )
        }
        n => {
            return Err(data_err(labels_path, format!("label file must have 1 or 2 columns, found {n}")))
        }
    };
    let n = ids.len();
    let (labels, label_names) = build_label_map(&raw_labels);
    let id_to_row: HashMap<&str, usize> =
        ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();

    let mut per_space: Vec<Vec<Vec<f64>>> = Vec::new();
    let mut space_dims = Vec::new();
    for fp in feature_paths {
        let path = fp.as_ref();
        let table = read_table(path)?;
        if table.rows.len() != n {
            return Err(data_err(
                path,
                format!(
                    "row count {} does not match label file {} ({} rows)",
                    table.rows.len(),
                    labels_path.display(),
                    n
                ),
            ));
        }
        let id_col = table.id_column();
        let feature_cols: Vec<usize> =
            (0..table.columns.len()).filter(|&c| Some(c) != id_col).collect();
        if feature_cols.is_empty() {
            return Err(data_err(path, "no feature columns"));
        }
        let mut rows: Vec<Vec<f64>> = vec![Vec::new(); n];
        for r in 0..n {
            let target = match id_col {
                Some(c) => {
                    let id = table.rows[r][c].as_str();
                    *id_to_row.get(id).ok_or_else(|| {
                        data_err(path, format!("id '{id}' missing from label file"))
                    })?
                }
                None => r,
            };
            rows[target] = feature_cols
                .iter()
                .map(|&c| table.numeric_cell(path, r, c))
                .collect::<Result<_>>()?;
        }
        space_dims.push(feature_cols.len());
        per_space.push(rows);
    }

    let samples = (0..n)
        .map(|i| LabeledSample {
            id: ids[i].clone(),
            label: labels[i],
            features: per_space.iter().map(|space| space[i].clone()).collect(),
        })
        .collect();
    Ok((
        LabeledDataset { samples, num_classes: label_names.len(), space_dims },
        label_names,
    ))
}

/// Loads unlabeled samples from one file per feature space, for
/// classification. Rows align by the `id` column when every file has
/// one, otherwise by position (ids synthesized as `row{i}`).
pub fn load_unlabeled_multi_feature(
    feature_paths: &[impl AsRef<Path>],
) -> Result<Vec<(String, Vec<Vec<f64>>)>> {
    if feature_paths.is_empty() {
        return Err(Error::InvalidParameter("need at least one feature file".into()));
    }
    let mut tables = Vec::new();
    for fp in feature_paths {
        let path = fp.as_ref();
        tables.push((path.to_path_buf(), read_table(path)?));
    }
    let n = tables[0].1.rows.len();
    for (path, table) in &tables[1..] {
        if table.rows.len() != n {
            return Err(data_err(
                path,
                format!(
                    "row count {} does not match {} ({} rows)",
                    table.rows.len(),
                    tables[0].0.display(),
                    n
                ),
            ));
        }
    }
    let ids: Vec<String> = match tables[0].1.id_column() {
        Some(c) if tables.iter().all(|(_, t)| t.id_column().is_some()) => {
            tables[0].1.rows.iter().map(|r| r[c].clone()).collect()
        }
        _ => (0..n).map(|i| format!("row{i}")).collect(),
    };
    let id_to_row: HashMap<&str, usize> =
        ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    let mut features: Vec<Vec<Vec<f64>>> = vec![Vec::new(); n];
    for f in &mut features {
        f.resize(tables.len(), Vec::new());
    }
    for (j, (path, table)) in tables.iter().enumerate() {
        let id_col = table.id_column();
        let feature_cols: Vec<usize> =
            (0..table.columns.len()).filter(|&c| Some(c) != id_col).collect();
        if feature_cols.is_empty() {
            return Err(data_err(path, "no feature columns"));
        }
        for r in 0..n {
            let target = match id_col {
                Some(c) if id_to_row.len() == n => {
                    let id = table.rows[r][c].as_str();
                    *id_to_row.get(id).ok_or_else(|| {
                        data_err(path, format!("id '{id}' missing from {}", tables[0].0.display()))
                    })?
                }
                _ => r,
            };
            features[target][j] = feature_cols
                .iter()
                .map(|&c| table.numeric_cell(path, r, c))
                .collect::<Result<_>>()?;
        }
    }
    Ok(ids.into_iter().zip(features).collect())
}

/// Loads a multi-attribute dataset: each attribute column of one file
/// becomes its own one-dimensional feature space. `label_column`
/// names the header column (or `colN` without a header) holding the
/// class label.
pub fn load_multi_attribute(
    path: impl AsRef<Path>,
    label_column: &str,
) -> Result<(LabeledDataset, Vec<String>)> {
    let path = path.as_ref();
    let table = read_table(path)?;
    let label_col = table
        .column_index(label_column)
        .ok_or_else(|| data_err(path, format!("label column '{label_column}' not found")))?;
    let id_col = table.id_column().filter(|&c| c != label_col);
    let attr_cols: Vec<usize> = (0..table.columns.len())
        .filter(|&c| c != label_col && Some(c) != id_col)
        .collect();
    if attr_cols.len() < 2 {
        return Err(data_err(
            path,
            format!("multi-attribute mode needs at least 2 attribute columns, found {}", attr_cols.len()),
        ));
    }
    let raw_labels: Vec<String> = table.rows.iter().map(|r| r[label_col].clone()).collect();
    let (labels, label_names) = build_label_map(&raw_labels);
    let mut samples = Vec::with_capacity(table.rows.len());
    for (r, row) in table.rows.iter().enumerate() {
        let id = match id_col {
            Some(c) => row[c].clone(),
            None => format!("row{r}"),
        };
        let features: Vec<Vec<f64>> = attr_cols
            .iter()
            .map(|&c| Ok(vec![table.numeric_cell(path, r, c)?]))
            .collect::<Result<_>>()?;
        samples.push(LabeledSample { id, label: labels[r], features });
    }
    Ok((
        LabeledDataset {
            samples,
            num_classes: label_names.len(),
            space_dims: vec![1; attr_cols.len()],
        },
        label_names,
    ))
}

/// Writes a dataset as one feature file per space
/// (`{stem}_space{j}.csv` with `id,f0,f1,...` headers) plus
/// `{stem}_labels.csv`. Values round-trip at full precision.
pub fn write_dataset(
    data: &LabeledDataset,
    label_names: &[String],
    dir: impl AsRef<Path>,
    stem: &str,
) -> Result<Vec<std::path::PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for j in 0..data.num_spaces() {
        let path = dir.join(format!("{stem}_space{}.csv", j + 1));
        let mut w = BufWriter::new(File::create(&path)?);
        write!(w, "id")?;
        for d in 0..data.space_dims[j] {
            write!(w, ",f{d}")?;
        }
        writeln!(w)?;
        for s in &data.samples {
            write!(w, "{}", s.id)?;
            for v in &s.features[j] {
                write!(w, ",{v}")?;
            }
            writeln!(w)?;
        }
        written.push(path);
    }
    let labels_path = dir.join(format!("{stem}_labels.csv"));
    let mut w = BufWriter::new(File::create(&labels_path)?);
    writeln!(w, "id,label")?;
    for s in &data.samples {
        writeln!(w, "{},{}", s.id, label_names[s.label])?;
    }
    written.push(labels_path);
    Ok(written)
}
