use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use super::{NamedProxy, ZooError};
use crate::dataset::ProblemMatrix;
use crate::fitness::problem_tau;
use crate::gp::ProblemTaus;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "md" | "markdown" => Ok(ReportFormat::Markdown),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown format `{other}` (expected csv, md or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub name: String,
    pub taus: Vec<f64>,
    /// Dense rank per problem; 1 is the highest tau.
    pub ranks: Vec<usize>,
    pub average_rank: f64,
}

/// Proxies by problems, sorted by average rank.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportTable {
    pub problems: Vec<String>,
    /// Optional presentation group of each problem.
    pub groups: Vec<Option<String>>,
    pub rows: Vec<ReportRow>,
}

/// Dense ranks of `values`, highest first; equal values share a rank.
fn dense_ranks(values: &[f64]) -> Vec<usize> {
    let mut distinct: Vec<f64> = values.to_vec();
    distinct.sort_by(|a, b| b.total_cmp(a));
    distinct.dedup();
    values
        .iter()
        .map(|v| 1 + distinct.iter().take_while(|d| *d > v).count())
        .collect()
}

/// Kendall tau of every proxy on every problem, ranked per problem.
pub fn evaluate_report(proxies: &[NamedProxy], views: &[ProblemMatrix]) -> Result<ReportTable, ZooError> {
    if proxies.is_empty() {
        return Err(ZooError::NoProxies);
    }
    for (i, p) in proxies.iter().enumerate() {
        if proxies[..i].iter().any(|q| q.name == p.name) {
            return Err(ZooError::DuplicateName(p.name.clone()));
        }
    }
    let taus: Vec<Vec<f64>> = proxies
        .iter()
        .map(|p| {
            let node = p.node();
            views
                .iter()
                .map(|v| problem_tau(&node, v))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|source| ZooError::Fitness {
                    proxy: p.name.clone(),
                    source,
                })
        })
        .collect::<Result<_, _>>()?;

    let mut ranks = vec![vec![0usize; views.len()]; proxies.len()];
    for j in 0..views.len() {
        let column: Vec<f64> = taus.iter().map(|t| t[j]).collect();
        for (i, r) in dense_ranks(&column).into_iter().enumerate() {
            ranks[i][j] = r;
        }
    }
    let mut rows: Vec<ReportRow> = proxies
        .iter()
        .zip(taus)
        .zip(ranks)
        .map(|((p, taus), ranks)| {
            let average_rank = if ranks.is_empty() {
                0.0
            } else {
                ranks.iter().sum::<usize>() as f64 / ranks.len() as f64
            };
            ReportRow {
                name: p.name.clone(),
                taus,
                ranks,
                average_rank,
            }
        })
        .collect();
    rows.sort_by(|a, b| a.average_rank.total_cmp(&b.average_rank));
    Ok(ReportTable {
        problems: views.iter().map(|v| v.problem_id.clone()).collect(),
        groups: vec![None; views.len()],
        rows,
    })
}

#[derive(Serialize)]
struct JsonRow<'a> {
    name: &'a str,
    tau: ProblemTaus,
    rank: Vec<(&'a str, usize)>,
    average_rank: f64,
}

#[derive(Serialize)]
struct JsonTable<'a> {
    problems: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    groups: Option<&'a [Option<String>]>,
    rows: Vec<JsonRow<'a>>,
}

impl ReportTable {
    pub fn row(&self, name: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    fn has_groups(&self) -> bool {
        self.groups.iter().any(Option::is_some)
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Markdown => self.to_markdown(),
            ReportFormat::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["proxy".to_string()];
        header.extend(self.problems.iter().cloned());
        header.push("average_rank".into());
        w.write_record(&header).expect("in-memory write");
        if self.has_groups() {
            let mut rec = vec!["group".to_string()];
            rec.extend(self.groups.iter().map(|g| g.clone().unwrap_or_default()));
            rec.push(String::new());
            w.write_record(&rec).expect("in-memory write");
        }
        for r in &self.rows {
            let mut rec = vec![r.name.clone()];
            rec.extend(r.taus.iter().map(|t| format!("{t:?}")));
            rec.push(format!("{:?}", r.average_rank));
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "| proxy |");
        for p in &self.problems {
            let _ = write!(out, " {p} |");
        }
        out.push_str(" avg rank |\n|---|");
        out.push_str(&"---:|".repeat(self.problems.len() + 1));
        out.push('\n');
        if self.has_groups() {
            out.push_str("| *group* |");
            for g in &self.groups {
                let _ = write!(out, " {} |", g.as_deref().unwrap_or(""));
            }
            out.push_str(" |\n");
        }
        for r in &self.rows {
            let _ = write!(out, "| {} |", r.name);
            for (t, k) in r.taus.iter().zip(&r.ranks) {
                let _ = write!(out, " {t:.4} ({k}) |");
            }
            let _ = writeln!(out, " {:.2} |", r.average_rank);
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows = self
            .rows
            .iter()
            .map(|r| JsonRow {
                name: &r.name,
                tau: ProblemTaus(self.problems.iter().cloned().zip(r.taus.iter().copied()).collect()),
                rank: self
                    .problems
                    .iter()
                    .map(String::as_str)
                    .zip(r.ranks.iter().copied())
                    .collect(),
                average_rank: r.average_rank,
            })
            .collect();
        let table = JsonTable {
            problems: &self.problems,
            groups: self.has_groups().then_some(self.groups.as_slice()),
            rows,
        };
        let mut s = serde_json::to_string_pretty(&table).expect("report serializes");
        s.push('\n');
        s
    }
}
