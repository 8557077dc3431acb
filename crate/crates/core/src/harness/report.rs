//! Report rows, metadata and lossless serialization helpers.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};

use num_rational::BigRational;
use serde::{Serialize, Serializer};

use super::{HarnessError, OutputFormat};

pub const SCHEMA_VERSION: &str = "1";

/// Serializes any `Display` value (big integers, exact fractions) as a string.
pub fn ser_display<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Serializes an exact fraction as `"numerator/denominator"`, denominator included even when 1.
pub fn ser_fraction<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(&format_args!("{}/{}", v.numer(), v.denom()))
}

pub fn ser_opt_fraction<S: Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => ser_fraction(v, s),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    BudgetExceeded,
}

/// One scan cell. `exact` is a lossless integer; the float columns are
/// derived from it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub n: i64,
    pub set: String,
    pub size_x: usize,
    /// Target `a` or witness name.
    pub label: String,
    pub exact: String,
    pub value: Option<f64>,
    pub bound: Option<f64>,
    pub ratio: Option<f64>,
    pub summand_ratio: Option<f64>,
    pub status: CellStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Metadata {
    pub schema: String,
    pub kind: String,
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
}

impl Metadata {
    pub fn new(kind: &str, config_hash: String, seed: u64) -> Self {
        Metadata {
            schema: format!("{kind}/{SCHEMA_VERSION}"),
            kind: kind.to_string(),
            config_hash,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub metadata: Metadata,
    pub summary: BTreeMap<String, serde_json::Value>,
    pub rows: Vec<ScanRow>,
}

impl ScanReport {
    pub fn to_csv(&self) -> Result<String, HarnessError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.rows.is_empty() {
            w.write_record([
                "n", "set", "size_x", "label", "exact", "value", "bound", "ratio", "summand_ratio", "status",
            ])
            .map_err(csv_err)?;
        }
        for row in &self.rows {
            w.serialize(row).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| HarnessError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// The metadata and summary without rows, as written next to a CSV file.
    pub fn sidecar_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&serde_json::json!({
            "metadata": self.metadata,
            "summary": self.summary,
        }))
        .expect("metadata serializes");
        s.push('\n');
        s
    }

    /// Writes the report; CSV output gets a `.meta.json` sidecar. Returns the
    /// paths written.
    pub fn write(&self, path: &Path, format: OutputFormat) -> Result<Vec<PathBuf>, HarnessError> {
        match format {
            OutputFormat::Json => {
                std::fs::write(path, self.to_json())?;
                Ok(vec![path.to_path_buf()])
            }
            OutputFormat::Csv => {
                std::fs::write(path, self.to_csv()?)?;
                let meta = sidecar_path(path);
                std::fs::write(&meta, self.sidecar_json())?;
                Ok(vec![path.to_path_buf(), meta])
            }
        }
    }

    pub fn render(&self, format: OutputFormat) -> Result<String, HarnessError> {
        match format {
            OutputFormat::Json => Ok(self.to_json()),
            OutputFormat::Csv => self.to_csv(),
        }
    }
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".meta.json");
    path.with_file_name(name)
}

fn csv_err(e: csv::Error) -> HarnessError {
    HarnessError::Io(std::io::Error::other(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(n: i64, ratio: Option<f64>) -> ScanRow {
        ScanRow {
            n,
            set: "range:4".into(),
            size_x: 4,
            label: "(1,3)".into(),
            exact: "12".into(),
            value: Some(12.0),
            bound: Some(4.0),
            ratio,
            summand_ratio: None,
            status: CellStatus::Ok,
        }
    }

    #[test]
    fn csv_layout() {
        let r = ScanReport {
            metadata: Metadata::new("paucity", "abc".into(), 7),
            summary: BTreeMap::new(),
            rows: vec![row(4, Some(3.0))],
        };
        let csv = r.to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "n,set,size_x,label,exact,value,bound,ratio,summand_ratio,status"
        );
        assert_eq!(lines.next().unwrap(), "4,range:4,4,\"(1,3)\",12,12.0,4.0,3.0,,ok");
        let empty = ScanReport { rows: vec![], ..r };
        assert_eq!(empty.to_csv().unwrap().lines().count(), 1);
    }

    #[test]
    fn fractions_keep_denominator() {
        #[derive(Serialize)]
        struct W {
            #[serde(serialize_with = "ser_fraction")]
            v: BigRational,
        }
        let v = BigRational::from_integer(3.into());
        assert_eq!(serde_json::to_string(&W { v }).unwrap(), r#"{"v":"3/1"}"#);
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(sidecar_path(Path::new("/tmp/out.csv")), PathBuf::from("/tmp/out.csv.meta.json"));
    }
}
