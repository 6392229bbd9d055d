//! CSV persistence for datasets.
//!
//! A dataset lives in up to three files next to each other:
//!
//! * `<stem>.csv` with header `tid,order,x,y,tau`, one row per point;
//! * `<stem>.props.csv` with header `tid,<name>,…` for trajectory properties;
//! * `<stem>.pprops.csv` with header `tid,order,<name>,…` for point properties.
//!
//! Empty property cells mean "absent". Property column types are inferred
//! per column (integer, float, boolean, otherwise string). Floats are written
//! in shortest round-trip form, so ingest and export are mutually inverse on
//! anything this module produced.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::model::{PropertyRelation, Scalar, TrajectoriesRelation, Trajectory, TrajectoryPoint};

pub const POINTS_HEADER: [&str; 5] = ["tid", "order", "x", "y", "tau"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatasetError {
    #[error("{path}: {message}")]
    IoError { path: String, message: String },
    #[error("{path}:{line}:{column}: {message}")]
    ParseError {
        path: String,
        line: u64,
        column: usize,
        message: String,
    },
    #[error("trajectory `{tid}`: {detail}")]
    InvariantViolation { tid: String, detail: String },
    #[error("duplicate point: trajectory `{tid}` has order {order} twice")]
    DuplicateKey { tid: String, order: usize },
}

/// Trajectories, their properties and a few descriptive strings.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub trajectories: TrajectoriesRelation,
    pub properties: PropertyRelation,
    pub metadata: BTreeMap<String, String>,
}

impl Dataset {
    pub fn new(trajectories: TrajectoriesRelation) -> Self {
        Dataset {
            trajectories,
            ..Default::default()
        }
    }

    pub fn point_count(&self) -> usize {
        self.trajectories.rows().iter().map(|(_, t)| t.len()).sum()
    }
}

/// Parses a finite decimal number. Shared by file ingestion and command-line
/// flags so both classify boundary values identically.
pub fn parse_decimal(text: &str) -> Result<f64, String> {
    let t = text.trim();
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(format!("`{t}` is not a finite number")),
        Err(_) => Err(format!("`{t}` is not a number")),
    }
}

/// Sibling property files of a points file.
pub fn sibling_paths(path: &Path) -> (PathBuf, PathBuf) {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let dir = path.parent().unwrap_or_else(|| Path::new(""));
    (
        dir.join(format!("{stem}.props.csv")),
        dir.join(format!("{stem}.pprops.csv")),
    )
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> DatasetError {
    DatasetError::IoError {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn csv_err(path: &Path, e: csv::Error) -> DatasetError {
    match e.position() {
        Some(pos) => DatasetError::ParseError {
            path: path.display().to_string(),
            line: pos.line(),
            column: 1,
            message: e.to_string(),
        },
        None => io_err(path, e),
    }
}

struct Sheet {
    path: PathBuf,
    header: Vec<String>,
    rows: Vec<(u64, csv::StringRecord)>,
}

impl Sheet {
    fn read(path: &Path) -> Result<Sheet, DatasetError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_path(path)
            .map_err(|e| match e.kind() {
                csv::ErrorKind::Io(_) => io_err(path, e),
                _ => csv_err(path, e),
            })?;
        let header = reader
            .headers()
            .map_err(|e| csv_err(path, e))?
            .iter()
            .map(str::to_owned)
            .collect();
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| csv_err(path, e))?;
            let line = rec.position().map_or(0, |p| p.line());
            rows.push((line, rec));
        }
        Ok(Sheet {
            path: path.to_owned(),
            header,
            rows,
        })
    }

    fn error(&self, line: u64, column: usize, message: impl Into<String>) -> DatasetError {
        DatasetError::ParseError {
            path: self.path.display().to_string(),
            line,
            column,
            message: message.into(),
        }
    }

    fn expect_prefix(&self, prefix: &[&str]) -> Result<(), DatasetError> {
        for (i, want) in prefix.iter().enumerate() {
            if self.header.get(i).map(String::as_str) != Some(*want) {
                return Err(self.error(
                    1,
                    i + 1,
                    format!("expected header to start with `{}`", prefix.join(",")),
                ));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for (i, h) in self.header.iter().enumerate() {
            if h.is_empty() || !seen.insert(h) {
                return Err(self.error(1, i + 1, format!("empty or repeated column name `{h}`")));
            }
        }
        Ok(())
    }

    fn order(&self, line: u64, column: usize, text: &str) -> Result<usize, DatasetError> {
        text.trim().parse::<usize>().map_err(|_| {
            self.error(
                line,
                column,
                format!("`{text}` is not a non-negative integer order"),
            )
        })
    }
}

fn read_points(path: &Path) -> Result<TrajectoriesRelation, DatasetError> {
    let sheet = Sheet::read(path)?;
    sheet.expect_prefix(&POINTS_HEADER)?;
    if sheet.header.len() != POINTS_HEADER.len() {
        return Err(sheet.error(1, POINTS_HEADER.len() + 1, "unexpected extra column"));
    }
    let mut grouped: BTreeMap<String, BTreeMap<usize, TrajectoryPoint>> = BTreeMap::new();
    for (line, rec) in &sheet.rows {
        let line = *line;
        let tid = rec[0].to_owned();
        if tid.is_empty() {
            return Err(sheet.error(line, 1, "empty tid"));
        }
        let order = sheet.order(line, 2, &rec[1])?;
        let mut coords = [0.0; 3];
        for (k, slot) in coords.iter_mut().enumerate() {
            *slot = parse_decimal(&rec[k + 2]).map_err(|m| sheet.error(line, k + 3, m))?;
        }
        let point = TrajectoryPoint::new(order, coords[0], coords[1], coords[2]);
        if grouped
            .entry(tid.clone())
            .or_default()
            .insert(order, point)
            .is_some()
        {
            return Err(DatasetError::DuplicateKey { tid, order });
        }
    }
    let mut rows = Vec::with_capacity(grouped.len());
    for (tid, points) in grouped {
        let t = Trajectory::from_points(points.into_values().collect()).map_err(|e| {
            DatasetError::InvariantViolation {
                tid: tid.clone(),
                detail: e.to_string(),
            }
        })?;
        rows.push((tid, t));
    }
    Ok(TrajectoriesRelation::from_rows(rows).expect("grouped tids are unique"))
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Int,
    Float,
    Bool,
    Str,
}

fn infer_kind<'a>(cells: impl Iterator<Item = &'a str>) -> Kind {
    let cells: Vec<&str> = cells.filter(|c| !c.is_empty()).collect();
    if cells.iter().all(|c| c.parse::<i64>().is_ok()) {
        Kind::Int
    } else if cells.iter().all(|c| parse_decimal(c).is_ok()) {
        Kind::Float
    } else if cells.iter().all(|c| *c == "true" || *c == "false") {
        Kind::Bool
    } else {
        Kind::Str
    }
}

fn to_scalar(kind: Kind, cell: &str) -> Scalar {
    match kind {
        Kind::Int => Scalar::Int(cell.parse().expect("inferred integer")),
        Kind::Float => Scalar::Float(parse_decimal(cell).expect("inferred float")),
        Kind::Bool => Scalar::Bool(cell == "true"),
        Kind::Str => Scalar::Str(cell.to_owned()),
    }
}

fn read_props(
    path: &Path,
    into: &mut PropertyRelation,
    per_point: bool,
) -> Result<(), DatasetError> {
    let sheet = Sheet::read(path)?;
    let keys: &[&str] = if per_point {
        &["tid", "order"]
    } else {
        &["tid"]
    };
    sheet.expect_prefix(keys)?;
    let first = keys.len();
    let kinds: Vec<Kind> = (first..sheet.header.len())
        .map(|c| infer_kind(sheet.rows.iter().map(|(_, r)| r.get(c).unwrap_or(""))))
        .collect();
    let mut seen = std::collections::BTreeSet::new();
    for (line, rec) in &sheet.rows {
        let tid = &rec[0];
        let order = if per_point {
            Some(sheet.order(*line, 2, &rec[1])?)
        } else {
            None
        };
        if !seen.insert((tid.to_owned(), order)) {
            return Err(sheet.error(*line, 1, "repeated property row"));
        }
        for (c, kind) in (first..sheet.header.len()).zip(&kinds) {
            let cell = &rec[c];
            if cell.is_empty() {
                continue;
            }
            let name = &sheet.header[c];
            match order {
                Some(o) => into.set_point_prop(tid, name, o, to_scalar(*kind, cell)),
                None => into.set_trajectory_prop(tid, name, to_scalar(*kind, cell)),
            }
        }
    }
    Ok(())
}

/// Loads a points file and any sibling property files, then checks every
/// cross-reference.
pub fn ingest_csv(path: impl AsRef<Path>) -> Result<Dataset, DatasetError> {
    let path = path.as_ref();
    let trajectories = read_points(path)?;
    let mut properties = PropertyRelation::new();
    let (props, pprops) = sibling_paths(path);
    if props.exists() {
        read_props(&props, &mut properties, false)?;
    }
    if pprops.exists() {
        read_props(&pprops, &mut properties, true)?;
    }
    properties
        .validate(&trajectories)
        .map_err(|e| DatasetError::InvariantViolation {
            tid: match &e {
                crate::model::ModelError::UnknownTid(t) => t.clone(),
                crate::model::ModelError::DanglingOrder { tid, .. } => tid.clone(),
                _ => String::new(),
            },
            detail: e.to_string(),
        })?;
    let mut metadata = BTreeMap::new();
    if let Some(stem) = path.file_stem() {
        metadata.insert("name".to_owned(), stem.to_string_lossy().into_owned());
    }
    if let Some(name) = path.file_name() {
        metadata.insert("source".to_owned(), name.to_string_lossy().into_owned());
    }
    Ok(Dataset {
        trajectories,
        properties,
        metadata,
    })
}

fn float_text(v: f64) -> String {
    format!("{v:?}")
}

fn write_rows(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<(), DatasetError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| io_err(path, e))?;
    w.write_record(header).map_err(|e| io_err(path, e))?;
    for row in rows {
        w.write_record(row).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

fn remove_stale(path: &Path) -> Result<(), DatasetError> {
    if path.exists() {
        std::fs::remove_file(path).map_err(|e| io_err(path, e))?;
    }
    Ok(())
}

/// Writes the points file and, when there are any properties, the sibling
/// property files. Stale sibling files from earlier exports are removed.
pub fn export_csv(d: &Dataset, path: impl AsRef<Path>) -> Result<(), DatasetError> {
    let path = path.as_ref();
    let header: Vec<String> = POINTS_HEADER.iter().map(|s| (*s).to_owned()).collect();
    let rows: Vec<Vec<String>> = d
        .trajectories
        .rows()
        .iter()
        .flat_map(|(tid, t)| {
            t.points().iter().map(move |p| {
                vec![
                    tid.clone(),
                    p.order.to_string(),
                    float_text(p.x),
                    float_text(p.y),
                    float_text(p.tau),
                ]
            })
        })
        .collect();
    write_rows(path, &header, &rows)?;

    let (props_path, pprops_path) = sibling_paths(path);
    let names = d.properties.trajectory_prop_names();
    if names.is_empty() {
        remove_stale(&props_path)?;
    } else {
        let mut header = vec!["tid".to_owned()];
        header.extend(names.iter().cloned());
        let rows: Vec<Vec<String>> = d
            .properties
            .rows()
            .filter(|(_, p)| !p.trajectory_props.is_empty())
            .map(|(tid, p)| {
                let mut row = vec![tid.to_owned()];
                row.extend(names.iter().map(|n| {
                    p.trajectory_props
                        .get(n)
                        .map(|v| v.to_string())
                        .unwrap_or_default()
                }));
                row
            })
            .collect();
        write_rows(&props_path, &header, &rows)?;
    }

    let names = d.properties.point_prop_names();
    if names.is_empty() {
        remove_stale(&pprops_path)?;
    } else {
        let mut header = vec!["tid".to_owned(), "order".to_owned()];
        header.extend(names.iter().cloned());
        let mut rows = Vec::new();
        for (tid, p) in d.properties.rows() {
            let mut orders: Vec<usize> = p
                .point_props
                .values()
                .flat_map(|v| v.iter().map(|(o, _)| *o))
                .collect();
            orders.sort_unstable();
            orders.dedup();
            for o in orders {
                let mut row = vec![tid.to_owned(), o.to_string()];
                for n in &names {
                    let cell = p
                        .point_props
                        .get(n)
                        .and_then(|v| v.iter().find(|(k, _)| *k == o))
                        .map(|(_, s)| s.to_string())
                        .unwrap_or_default();
                    row.push(cell);
                }
                rows.push(row);
            }
        }
        write_rows(&pprops_path, &header, &rows)?;
    }
    Ok(())
}
