//! Dataset serialization: line-delimited case records plus a benchmark
//! cost catalog.
//!
//! Records files hold one JSON object per line (streamable, appendable,
//! diff-friendly for elicitation logs). The catalog is a JSON array of
//! `{id, c_fp, c_fn, c_defer}` tuples. Loading validates every type
//! invariant and reports all violations at once, each with its line
//! number and case id.

use std::collections::BTreeSet;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::model::{BenchmarkCost, CaseRecord, CostVector, DecisionRegime};

/// A validated dataset: the records, the benchmark catalog they may
/// reference, and where the records came from.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetFile {
    pub path: PathBuf,
    pub records: Vec<CaseRecord>,
    pub benchmark_catalog: Vec<BenchmarkCost>,
}

impl DatasetFile {
    /// Look up a catalog entry by id.
    pub fn benchmark(&self, id: &str) -> Result<&BenchmarkCost> {
        self.benchmark_catalog
            .iter()
            .find(|b| b.id == id)
            .ok_or_else(|| Error::Integrity(format!("benchmark '{id}' not in catalog")))
    }

    /// Sorted, deduplicated benchmark ids referenced by any record's
    /// cost-prompt actions.
    pub fn referenced_benchmark_ids(&self) -> Vec<String> {
        let mut ids = BTreeSet::new();
        for record in &self.records {
            for regime in record.actions.keys() {
                if let DecisionRegime::CostFunctionPrompt(id) = regime {
                    ids.insert(id.clone());
                }
            }
        }
        ids.into_iter().collect()
    }
}

/// Wire form of one catalog entry.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogEntry {
    id: String,
    c_fp: f64,
    c_fn: f64,
    c_defer: f64,
}

/// The benchmark grid used when no catalog file is supplied: c_fp = 1 with
/// FN/FP in {0.5, 1, 2, 4, 8} crossed with Defer/FP in {0.1, 0.3, 0.5}.
pub fn default_benchmark_catalog() -> Vec<BenchmarkCost> {
    let mut catalog = Vec::new();
    for fn_fp in [0.5, 1.0, 2.0, 4.0, 8.0] {
        for defer_fp in [0.1, 0.3, 0.5] {
            catalog.push(BenchmarkCost {
                id: format!("fn{fn_fp}_df{defer_fp}"),
                cost: CostVector::new(1.0, fn_fp, defer_fp).expect("valid benchmark cost"),
            });
        }
    }
    catalog
}

/// Load and validate a benchmark catalog file.
pub fn load_catalog(path: &Path) -> Result<Vec<BenchmarkCost>> {
    let text = fs::read_to_string(path)?;
    let entries: Vec<CatalogEntry> = serde_json::from_str(&text)?;
    let mut seen = BTreeSet::new();
    let mut catalog = Vec::with_capacity(entries.len());
    for entry in entries {
        if !seen.insert(entry.id.clone()) {
            return Err(Error::Integrity(format!(
                "duplicate benchmark id '{}' in catalog",
                entry.id
            )));
        }
        catalog.push(BenchmarkCost {
            id: entry.id,
            cost: CostVector::new(entry.c_fp, entry.c_fn, entry.c_defer)?,
        });
    }
    Ok(catalog)
}

/// Write a benchmark catalog file.
pub fn save_catalog(catalog: &[BenchmarkCost], path: &Path) -> Result<()> {
    let entries: Vec<CatalogEntry> = catalog
        .iter()
        .map(|b| CatalogEntry {
            id: b.id.clone(),
            c_fp: b.cost.c_fp(),
            c_fn: b.cost.c_fn(),
            c_defer: b.cost.c_defer(),
        })
        .collect();
    let mut file = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut file, &entries)?;
    file.write_all(b"\n")?;
    Ok(())
}

/// Load a line-delimited records file, validating every record against the
/// catalog (the default catalog when no path is given). All violations are
/// collected and reported together.
pub fn load_dataset(records_path: &Path, catalog_path: Option<&Path>) -> Result<DatasetFile> {
    let benchmark_catalog = match catalog_path {
        Some(path) => load_catalog(path)?,
        None => default_benchmark_catalog(),
    };
    let catalog_ids: BTreeSet<&str> = benchmark_catalog.iter().map(|b| b.id.as_str()).collect();

    let file = fs::File::open(records_path)?;
    let reader = BufReader::new(file);

    let mut records = Vec::new();
    let mut violations = Vec::new();
    let mut seen_ids = BTreeSet::new();

    for (index, line) in reader.lines().enumerate() {
        let line_no = index + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut deserializer = serde_json::Deserializer::from_str(&line);
        let record: CaseRecord = match serde_path_to_error::deserialize(&mut deserializer) {
            Ok(record) => record,
            Err(e) => {
                let path = e.path().to_string();
                let inner = e.inner().to_string();
                // Value-constraint failures (out-of-range probabilities,
                // negative costs) surface as range errors; everything else
                // is a parse error.
                let kind = if inner.contains("must satisfy") {
                    "range"
                } else {
                    "parse"
                };
                let message = if path == "." {
                    format!("{kind}: {inner}")
                } else {
                    format!("{kind}: {path}: {inner}")
                };
                violations.push(Violation {
                    line: line_no,
                    case_id: None,
                    message,
                });
                continue;
            }
        };

        if !seen_ids.insert(record.case_id.clone()) {
            violations.push(Violation {
                line: line_no,
                case_id: Some(record.case_id.clone()),
                message: format!("integrity: duplicate case_id '{}'", record.case_id),
            });
        }
        for regime in record.actions.keys() {
            match regime {
                DecisionRegime::CostFunctionPrompt(id) if !catalog_ids.contains(id.as_str()) => {
                    violations.push(Violation {
                        line: line_no,
                        case_id: Some(record.case_id.clone()),
                        message: format!("integrity: benchmark '{id}' not in catalog"),
                    });
                }
                DecisionRegime::SelfReportGlobal | DecisionRegime::SelfReportCase => {
                    violations.push(Violation {
                        line: line_no,
                        case_id: Some(record.case_id.clone()),
                        message: format!(
                            "integrity: '{regime}' is not a decision-eliciting regime"
                        ),
                    });
                }
                _ => {}
            }
        }
        records.push(record);
    }

    if !violations.is_empty() {
        return Err(Error::InvalidDataset { violations });
    }

    Ok(DatasetFile {
        path: records_path.to_path_buf(),
        records,
        benchmark_catalog,
    })
}

/// Serialize records to the line-delimited wire format.
pub fn records_to_jsonl(records: &[CaseRecord]) -> Result<String> {
    let mut out = String::new();
    for record in records {
        out.push_str(&serde_json::to_string(record)?);
        out.push('\n');
    }
    Ok(out)
}

/// Write a line-delimited records file.
pub fn save_dataset(records: &[CaseRecord], path: &Path) -> Result<()> {
    fs::write(path, records_to_jsonl(records)?)?;
    Ok(())
}
