use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ArchRecord, BenchmarkDataset, DatasetError, Problem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestProblem {
    pub id: String,
    pub csv: PathBuf,
    pub target_column: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub feature_names: Vec<String>,
    pub problems: Vec<ManifestProblem>,
}

fn read_to_string(path: &Path) -> Result<String, DatasetError> {
    fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Load and validate a dataset. CSV paths resolve relative to the
/// manifest's directory; row order is preserved.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<BenchmarkDataset, DatasetError> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|source| DatasetError::Manifest {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let problems = manifest
        .problems
        .iter()
        .map(|mp| load_problem(&base.join(&mp.csv), mp, &manifest.feature_names))
        .collect::<Result<Vec<_>, _>>()?;
    BenchmarkDataset::new(manifest.feature_names, problems)
}

fn load_problem(
    csv_path: &Path,
    mp: &ManifestProblem,
    feature_names: &[String],
) -> Result<Problem, DatasetError> {
    let csv_err = |source| DatasetError::Csv {
        problem: mp.id.clone(),
        path: csv_path.to_path_buf(),
        source,
    };
    let file = fs::File::open(csv_path).map_err(|source| DatasetError::Io {
        path: csv_path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(file);
    let header: Vec<String> = reader
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let (feature_cols, target_col) = map_header(&header, mp, feature_names)?;

    let mut rows = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let row = r + 1;
        if record.len() != header.len() {
            return Err(DatasetError::RowWidth {
                problem: mp.id.clone(),
                row,
                expected: header.len(),
                found: record.len(),
            });
        }
        let cell = |col: usize| -> Result<f64, DatasetError> {
            let raw = record[col].trim();
            match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                Ok(_) => Err(DatasetError::NonFinite {
                    problem: mp.id.clone(),
                    row,
                    column: header[col].clone(),
                    value: raw.to_string(),
                }),
                Err(_) => Err(DatasetError::NotNumeric {
                    problem: mp.id.clone(),
                    row,
                    column: header[col].clone(),
                    value: raw.to_string(),
                }),
            }
        };
        let features = feature_cols
            .iter()
            .map(|&c| cell(c))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(ArchRecord {
            arch_id: record[0].to_string(),
            features,
            target: cell(target_col)?,
        });
    }
    Ok(Problem {
        id: mp.id.clone(),
        target_name: mp.target_column.clone(),
        group: mp.group.clone(),
        rows,
    })
}

/// Column positions of each manifest feature and of the target.
fn map_header(
    header: &[String],
    mp: &ManifestProblem,
    feature_names: &[String],
) -> Result<(Vec<usize>, usize), DatasetError> {
    let mismatch = |detail: String| DatasetError::Header {
        problem: mp.id.clone(),
        detail,
    };
    if header.first().map(String::as_str) != Some("arch_id") {
        return Err(mismatch("first column must be `arch_id`".into()));
    }
    if feature_names.contains(&mp.target_column) {
        return Err(mismatch(format!(
            "target column `{}` is also a feature",
            mp.target_column
        )));
    }
    let positions: HashMap<&str, usize> = header
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, h)| (h.as_str(), i))
        .collect();
    if positions.len() != header.len() - 1 {
        return Err(mismatch("duplicate column names".into()));
    }
    let missing: Vec<&str> = feature_names
        .iter()
        .map(String::as_str)
        .chain(std::iter::once(mp.target_column.as_str()))
        .filter(|n| !positions.contains_key(n))
        .collect();
    if !missing.is_empty() {
        return Err(mismatch(format!("missing column(s): {}", missing.join(", "))));
    }
    let extra: Vec<&str> = header[1..]
        .iter()
        .map(String::as_str)
        .filter(|h| *h != mp.target_column && !feature_names.iter().any(|f| f == h))
        .collect();
    if !extra.is_empty() {
        return Err(mismatch(format!("unexpected column(s): {}", extra.join(", "))));
    }
    let features = feature_names.iter().map(|f| positions[f.as_str()]).collect();
    Ok((features, positions[mp.target_column.as_str()]))
}

/// Shortest representation that parses back to the same `f64`.
pub(crate) fn format_real(v: f64) -> String {
    format!("{v:?}")
}

/// Write `dataset` in canonical form into `dir`: `manifest.json` plus one
/// `<problem id>.csv` per problem. Returns the manifest path.
pub fn write_dataset(dataset: &BenchmarkDataset, dir: impl AsRef<Path>) -> Result<PathBuf, DatasetError> {
    let dir = dir.as_ref();
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| DatasetError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut manifest = Manifest {
        feature_names: dataset.feature_names().to_vec(),
        problems: Vec::new(),
    };
    for p in dataset.problems() {
        let file_name = PathBuf::from(format!("{}.csv", p.id));
        let csv_path = dir.join(&file_name);
        let mut w = csv::Writer::from_path(&csv_path).map_err(|source| DatasetError::Csv {
            problem: p.id.clone(),
            path: csv_path.clone(),
            source,
        })?;
        let write = |w: &mut csv::Writer<fs::File>, rec: Vec<String>| {
            w.write_record(&rec).map_err(|source| DatasetError::Csv {
                problem: p.id.clone(),
                path: csv_path.clone(),
                source,
            })
        };
        let mut header = vec!["arch_id".to_string()];
        header.extend(dataset.feature_names().iter().cloned());
        header.push(p.target_name.clone());
        write(&mut w, header)?;
        for r in &p.rows {
            let mut rec = vec![r.arch_id.clone()];
            rec.extend(r.features.iter().map(|&v| format_real(v)));
            rec.push(format_real(r.target));
            write(&mut w, rec)?;
        }
        w.flush().map_err(io_err(&csv_path))?;
        manifest.problems.push(ManifestProblem {
            id: p.id.clone(),
            csv: file_name,
            target_column: p.target_name.clone(),
            group: p.group.clone(),
        });
    }
    let manifest_path = dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    fs::write(&manifest_path, text).map_err(io_err(&manifest_path))?;
    Ok(manifest_path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Write;

    fn write_files(dir: &Path, csv: &str, features: &[&str]) -> PathBuf {
        let manifest = serde_json::json!({
            "feature_names": features,
            "problems": [{ "id": "p1", "csv": "p1.csv", "target_column": "acc" }]
        });
        fs::write(dir.join("m.json"), manifest.to_string()).unwrap();
        let mut f = fs::File::create(dir.join("p1.csv")).unwrap();
        f.write_all(csv.as_bytes()).unwrap();
        dir.join("m.json")
    }

    #[test]
    fn minimal_manifest_loads() {
        let dir = tempfile::tempdir().unwrap();
        let m = write_files(
            dir.path(),
            "arch_id,snip,meco,acc\na,1,2,0.5\nb,3,4,0.6\nc,5,6,0.7\n",
            &["snip", "meco"],
        );
        let ds = load_manifest(&m).unwrap();
        assert_eq!(ds.problems().len(), 1);
        assert_eq!(ds.problems()[0].rows.len(), 3);
        assert_eq!(ds.problems()[0].rows[2].features, vec![5.0, 6.0]);
        assert_eq!(ds.problems()[0].rows[2].target, 0.7);
    }

    #[test]
    fn columns_map_by_name() {
        let dir = tempfile::tempdir().unwrap();
        let m = write_files(
            dir.path(),
            "arch_id,acc,meco,snip\na,0.5,2,1\nb,0.6,4,3\n",
            &["snip", "meco"],
        );
        let ds = load_manifest(&m).unwrap();
        assert_eq!(ds.problems()[0].rows[0].features, vec![1.0, 2.0]);
    }

    #[test]
    fn nan_cell_is_located() {
        let dir = tempfile::tempdir().unwrap();
        let m = write_files(
            dir.path(),
            "arch_id,snip,meco,acc\na,1,2,0.5\nb,3,NaN,0.6\n",
            &["snip", "meco"],
        );
        let err = load_manifest(&m).unwrap_err();
        match &err {
            DatasetError::NonFinite {
                problem,
                row,
                column,
                value,
            } => {
                assert_eq!((problem.as_str(), *row, column.as_str(), value.as_str()), ("p1", 2, "meco", "NaN"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(err.to_string().contains("row 2"));
    }

    #[test]
    fn other_errors() {
        let dir = tempfile::tempdir().unwrap();
        let m = write_files(dir.path(), "arch_id,snip,acc\na,1,0.5\nb,x,0.6\n", &["snip"]);
        assert!(matches!(load_manifest(&m), Err(DatasetError::NotNumeric { row: 2, .. })));

        let m = write_files(dir.path(), "arch_id,snip,acc\na,1,0.5\na,2,0.6\n", &["snip"]);
        assert!(matches!(load_manifest(&m), Err(DatasetError::DuplicateArchId { row: 2, .. })));

        let m = write_files(dir.path(), "arch_id,snip,acc\na,1,0.5\nb,2,0.6\n", &["snip", "meco"]);
        let err = load_manifest(&m).unwrap_err();
        assert!(matches!(err, DatasetError::Header { .. }));
        assert!(err.to_string().contains("meco"));

        let m = write_files(dir.path(), "arch_id,snip,zen,acc\na,1,1,0.5\nb,2,2,0.6\n", &["snip"]);
        assert!(matches!(load_manifest(&m), Err(DatasetError::Header { .. })));

        let m = write_files(dir.path(), "arch_id,snip,acc\na,1\nb,2,0.6\n", &["snip"]);
        assert!(matches!(load_manifest(&m), Err(DatasetError::RowWidth { row: 1, .. })));

        assert!(matches!(
            load_manifest(dir.path().join("absent.json")),
            Err(DatasetError::Io { .. })
        ));
        fs::remove_file(dir.path().join("p1.csv")).unwrap();
        assert!(matches!(load_manifest(&m), Err(DatasetError::Io { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn write_load_roundtrip(
            values in proptest::collection::vec((-1e30f64..1e30, -1e-3f64..1e-3, -100.0f64..100.0), 2..30)
        ) {
            let rows = values
                .iter()
                .enumerate()
                .map(|(i, (a, b, t))| ArchRecord {
                    arch_id: format!("arch,{i}"),
                    features: vec![*a, *b],
                    target: *t,
                })
                .collect();
            let ds = BenchmarkDataset::new(
                vec!["a".into(), "b".into()],
                vec![Problem { id: "p".into(), target_name: "acc".into(), group: Some("g".into()), rows }],
            )
            .unwrap();
            let d1 = tempfile::tempdir().unwrap();
            let d2 = tempfile::tempdir().unwrap();
            let m1 = write_dataset(&ds, d1.path()).unwrap();
            let loaded = load_manifest(&m1).unwrap();
            prop_assert_eq!(&loaded, &ds);
            write_dataset(&loaded, d2.path()).unwrap();
            prop_assert_eq!(
                fs::read(d1.path().join("p.csv")).unwrap(),
                fs::read(d2.path().join("p.csv")).unwrap()
            );
        }
    }
}
