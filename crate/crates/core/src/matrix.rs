/// Dense `n x d` matrix of feature values stored column by column, since
/// expression evaluation reads whole feature columns at a time.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    n_rows: usize,
    columns: Vec<Vec<f64>>,
}

impl FeatureMatrix {
    pub fn empty(n_cols: usize) -> Self {
        FeatureMatrix {
            n_rows: 0,
            columns: vec![Vec::new(); n_cols],
        }
    }

    /// Build from rows; `None` if the rows are ragged or there are none.
    pub fn from_rows(rows: &[Vec<f64>]) -> Option<Self> {
        let d = rows.first()?.len();
        if rows.iter().any(|r| r.len() != d) {
            return None;
        }
        let columns = (0..d)
            .map(|j| rows.iter().map(|r| r[j]).collect())
            .collect();
        Some(FeatureMatrix {
            n_rows: rows.len(),
            columns,
        })
    }

    /// Build from equally long columns.
    pub fn from_columns(columns: Vec<Vec<f64>>) -> Option<Self> {
        let n = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != n) {
            return None;
        }
        Some(FeatureMatrix { n_rows: n, columns })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.columns[j][i]
    }
}
