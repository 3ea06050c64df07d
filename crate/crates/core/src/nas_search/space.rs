use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::SearchError;

/// Categorical architecture vector; position `i` ranges over `0..arity[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArchEncoding(pub Vec<usize>);

impl fmt::Display for ArchEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for ArchEncoding {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split('-')
            .map(|p| p.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map(ArchEncoding)
            .map_err(|_| SearchError::BadEncoding(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceManifest {
    pub arity: Vec<usize>,
    pub csv: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_column: Option<String>,
}

/// Every encoding of the space with its feature row, stored densely in
/// lexicographic encoding order.
#[derive(Debug, Clone, PartialEq)]
pub struct ToySearchSpace {
    arity: Vec<usize>,
    feature_names: Vec<String>,
    rows: Vec<Vec<f64>>,
    targets: Option<Vec<f64>>,
}

impl ToySearchSpace {
    /// Build from `(encoding string, feature row)` pairs. Every encoding of
    /// the space must appear exactly once.
    pub fn from_table(
        arity: Vec<usize>,
        feature_names: Vec<String>,
        table: Vec<(String, Vec<f64>)>,
        targets: Option<Vec<f64>>,
    ) -> Result<Self, SearchError> {
        if arity.is_empty() || arity.contains(&0) {
            return Err(SearchError::Table("arity must be non-empty and positive".into()));
        }
        let size = arity
            .iter()
            .try_fold(1usize, |acc, &a| acc.checked_mul(a))
            .ok_or_else(|| SearchError::Table("space size overflows".into()))?;
        if table.len() != size {
            return Err(SearchError::Table(format!(
                "table has {} rows, space has {size} encodings",
                table.len()
            )));
        }
        if let Some(t) = &targets {
            if t.len() != table.len() {
                return Err(SearchError::Table("target column length mismatch".into()));
            }
        }
        let mut rows: Vec<Option<Vec<f64>>> = vec![None; size];
        let mut ordered_targets = targets.as_ref().map(|_| vec![0.0; size]);
        for (k, (key, row)) in table.into_iter().enumerate() {
            let enc: ArchEncoding = key.parse()?;
            let idx = index_in(&arity, &enc).ok_or_else(|| SearchError::BadEncoding(key.clone()))?;
            if row.len() != feature_names.len() {
                return Err(SearchError::Table(format!("row `{key}` has wrong width")));
            }
            if rows[idx].is_some() {
                return Err(SearchError::Table(format!("encoding `{key}` appears twice")));
            }
            rows[idx] = Some(row);
            if let (Some(out), Some(t)) = (ordered_targets.as_mut(), targets.as_ref()) {
                out[idx] = t[k];
            }
        }
        Ok(ToySearchSpace {
            arity,
            feature_names,
            rows: rows.into_iter().map(|r| r.expect("all slots filled")).collect(),
            targets: ordered_targets,
        })
    }

    pub fn arity(&self) -> &[usize] {
        &self.arity
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn is_singleton(&self) -> bool {
        self.rows.len() == 1
    }

    pub fn features(&self, enc: &ArchEncoding) -> Result<&[f64], SearchError> {
        index_in(&self.arity, enc)
            .map(|i| self.rows[i].as_slice())
            .ok_or_else(|| SearchError::Lookup(enc.to_string()))
    }

    pub fn target(&self, enc: &ArchEncoding) -> Option<f64> {
        let i = index_in(&self.arity, enc)?;
        self.targets.as_ref().map(|t| t[i])
    }

    pub fn random_encoding<R: Rng + ?Sized>(&self, rng: &mut R) -> ArchEncoding {
        ArchEncoding(self.arity.iter().map(|&a| rng.gen_range(0..a)).collect())
    }

    /// All encodings in lexicographic order.
    pub fn encodings(&self) -> impl Iterator<Item = ArchEncoding> + '_ {
        Self::enumerate(&self.arity)
    }

    pub fn enumerate(arity: &[usize]) -> impl Iterator<Item = ArchEncoding> + '_ {
        let size: usize = arity.iter().product();
        (0..size).map(move |mut idx| {
            let mut v = vec![0; arity.len()];
            for (slot, &a) in v.iter_mut().zip(arity).rev() {
                *slot = idx % a;
                idx /= a;
            }
            ArchEncoding(v)
        })
    }
}

/// Mixed-radix index, first position most significant.
fn index_in(arity: &[usize], enc: &ArchEncoding) -> Option<usize> {
    if enc.0.len() != arity.len() {
        return None;
    }
    enc.0.iter().zip(arity).try_fold(0usize, |acc, (&v, &a)| {
        (v < a).then(|| acc * a + v)
    })
}

pub fn load_space(path: impl AsRef<Path>) -> Result<ToySearchSpace, SearchError> {
    let path = path.as_ref();
    let io = |p: &Path| {
        let p = p.to_path_buf();
        move |source| SearchError::Io { path: p, source }
    };
    let text = fs::read_to_string(path).map_err(io(path))?;
    let manifest: SpaceManifest = serde_json::from_str(&text).map_err(|source| SearchError::Manifest {
        path: path.to_path_buf(),
        source,
    })?;
    let csv_path = path.parent().unwrap_or_else(|| Path::new(".")).join(&manifest.csv);
    let file = fs::File::open(&csv_path).map_err(io(&csv_path))?;
    let mut reader = csv::Reader::from_reader(file);
    let table_err = |e: csv::Error| SearchError::Table(format!("{}: {e}", csv_path.display()));
    let header: Vec<String> = reader
        .headers()
        .map_err(table_err)?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if header.first().map(String::as_str) != Some("arch_id") {
        return Err(SearchError::Table("first column must be `arch_id`".into()));
    }
    let target_col = match &manifest.target_column {
        Some(t) => Some(
            header
                .iter()
                .position(|h| h == t)
                .ok_or_else(|| SearchError::Table(format!("missing target column `{t}`")))?,
        ),
        None => None,
    };
    let feature_cols: Vec<usize> = (1..header.len()).filter(|&c| Some(c) != target_col).collect();
    let feature_names = feature_cols.iter().map(|&c| header[c].clone()).collect();
    let mut table = Vec::new();
    let mut targets = Vec::new();
    for (r, rec) in reader.records().enumerate() {
        let rec = rec.map_err(table_err)?;
        let cell = |c: usize| -> Result<f64, SearchError> {
            rec[c]
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    SearchError::Table(format!("row {}, column `{}`: bad value `{}`", r + 1, header[c], &rec[c]))
                })
        };
        let row = feature_cols.iter().map(|&c| cell(c)).collect::<Result<Vec<_>, _>>()?;
        if let Some(t) = target_col {
            targets.push(cell(t)?);
        }
        table.push((rec[0].to_string(), row));
    }
    ToySearchSpace::from_table(
        manifest.arity,
        feature_names,
        table,
        target_col.map(|_| targets),
    )
}

/// Write `space` as `space.json` plus `space.csv` into `dir`, rows in
/// lexicographic encoding order. Returns the manifest path.
pub fn write_space(
    space: &ToySearchSpace,
    target_name: Option<&str>,
    dir: impl AsRef<Path>,
) -> Result<PathBuf, SearchError> {
    let dir = dir.as_ref();
    let io = |p: &Path| {
        let p = p.to_path_buf();
        move |source| SearchError::Io { path: p, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let target_name = target_name.filter(|_| space.targets.is_some());
    let csv_path = dir.join("space.csv");
    let table_err = |e: csv::Error| SearchError::Table(format!("{}: {e}", csv_path.display()));
    let mut w = csv::Writer::from_path(&csv_path).map_err(table_err)?;
    let mut header = vec!["arch_id".to_string()];
    header.extend(space.feature_names.iter().cloned());
    header.extend(target_name.map(str::to_string));
    w.write_record(&header).map_err(table_err)?;
    for (i, enc) in space.encodings().enumerate() {
        let mut rec = vec![enc.to_string()];
        rec.extend(space.rows[i].iter().map(|v| format!("{v:?}")));
        if let (Some(_), Some(t)) = (target_name, &space.targets) {
            rec.push(format!("{:?}", t[i]));
        }
        w.write_record(&rec).map_err(table_err)?;
    }
    w.flush().map_err(io(&csv_path))?;
    let manifest = SpaceManifest {
        arity: space.arity.clone(),
        csv: PathBuf::from("space.csv"),
        target_column: target_name.map(str::to_string),
    };
    let path = dir.join("space.json");
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    fs::write(&path, text).map_err(io(&path))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encoding_text() {
        let e: ArchEncoding = "0-3-1".parse().unwrap();
        assert_eq!(e, ArchEncoding(vec![0, 3, 1]));
        assert_eq!(e.to_string(), "0-3-1");
        assert!("0-x".parse::<ArchEncoding>().is_err());
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let all: Vec<String> = ToySearchSpace::enumerate(&[2, 3]).map(|e| e.to_string()).collect();
        assert_eq!(all, ["0-0", "0-1", "0-2", "1-0", "1-1", "1-2"]);
        for (i, e) in ToySearchSpace::enumerate(&[3, 1, 4]).enumerate() {
            assert_eq!(index_in(&[3, 1, 4], &e), Some(i));
        }
    }

    #[test]
    fn table_must_be_complete() {
        let names = vec!["f".to_string()];
        let rows = vec![("0".to_string(), vec![1.0])];
        assert!(ToySearchSpace::from_table(vec![2], names.clone(), rows, None).is_err());
        let dup = vec![("0".to_string(), vec![1.0]), ("0".to_string(), vec![2.0])];
        assert!(ToySearchSpace::from_table(vec![2], names.clone(), dup, None).is_err());
        let out = vec![("0".to_string(), vec![1.0]), ("2".to_string(), vec![2.0])];
        assert!(ToySearchSpace::from_table(vec![2], names, out, None).is_err());
    }

    #[test]
    fn lookup_miss() {
        let names = vec!["f".to_string()];
        let rows = vec![("0".to_string(), vec![1.0]), ("1".to_string(), vec![2.0])];
        let s = ToySearchSpace::from_table(vec![2], names, rows, None).unwrap();
        assert!(matches!(s.features(&ArchEncoding(vec![2])), Err(SearchError::Lookup(_))));
        assert_eq!(s.features(&ArchEncoding(vec![1])).unwrap(), &[2.0]);
    }

    #[test]
    fn load_from_files() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(
            dir.path().join("space.json"),
            r#"{"arity": [2, 1], "csv": "space.csv", "target_column": "acc"}"#,
        )
        .unwrap();
        fs::write(dir.path().join("space.csv"), "arch_id,a,acc,b\n1-0,3,0.9,4\n0-0,1,0.5,2\n").unwrap();
        let s = load_space(dir.path().join("space.json")).unwrap();
        assert_eq!(s.feature_names(), &["a".to_string(), "b".to_string()]);
        assert_eq!(s.features(&ArchEncoding(vec![0, 0])).unwrap(), &[1.0, 2.0]);
        assert_eq!(s.target(&ArchEncoding(vec![1, 0])), Some(0.9));

        let out = tempfile::tempdir().unwrap();
        let again = load_space(write_space(&s, Some("acc"), out.path()).unwrap()).unwrap();
        assert_eq!(again, s);
    }
}
