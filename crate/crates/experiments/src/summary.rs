//! Per-`n` aggregates of risk CSVs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Read;

use crate::error::{Error, Result};

/// Aggregates at one sample size.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub n: usize,
    pub trials: usize,
    pub mean: f64,
    /// Standard error of the mean; zero for a single trial.
    pub std_error: f64,
    /// Bayes risk of the model; zero for the staircase construction.
    pub bayes: f64,
    /// Mean of the claimed lower bound `exact_tail / 2` (counterexample CSVs only).
    pub claimed: Option<f64>,
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::Malformed(msg.into())
}

/// Reads a risk CSV: either the counterexample schema (`emp_risk`) or a
/// consistency curve (`risk`, `bayes_risk`).
pub fn summarize(input: impl Read) -> Result<Vec<SummaryRow>> {
    let mut r = csv::ReaderBuilder::new().from_reader(input);
    let header = r.headers().map_err(|e| malformed(e.to_string()))?.clone();
    let col = |name: &str| header.iter().position(|h| h == name);
    let n_col = col("n").ok_or_else(|| malformed("no `n` column"))?;
    let (risk_col, staircase) = match (col("emp_risk"), col("risk")) {
        (Some(c), _) => (c, true),
        (None, Some(c)) => (c, false),
        _ => return Err(malformed("no risk column (`emp_risk` or `risk`)")),
    };
    let extra = if staircase {
        col("exact_tail").ok_or_else(|| malformed("no `exact_tail` column"))?
    } else {
        col("bayes_risk").ok_or_else(|| malformed("no `bayes_risk` column"))?
    };

    let mut groups: BTreeMap<usize, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| malformed(e.to_string()))?;
        let field = |c: usize| rec.get(c).ok_or_else(|| malformed(format!("row {}: missing field", line + 2)));
        let n: usize = field(n_col)?.parse().map_err(|_| malformed(format!("row {}: bad n", line + 2)))?;
        let num = |c: usize| -> Result<f64> {
            let v: f64 = field(c)?.parse().map_err(|_| malformed(format!("row {}: bad number", line + 2)))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(malformed(format!("row {}: non-finite value", line + 2)))
            }
        };
        let g = groups.entry(n).or_default();
        g.0.push(num(risk_col)?);
        g.1.push(num(extra)?);
    }
    if groups.is_empty() {
        return Err(malformed("no data rows"));
    }

    groups
        .into_iter()
        .map(|(n, (risks, extra))| {
            let m = risks.len() as f64;
            let mean = risks.iter().sum::<f64>() / m;
            let std_error = if risks.len() < 2 {
                0.0
            } else {
                (risks.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0) / m).sqrt()
            };
            let (bayes, claimed) = if staircase {
                (0.0, Some(0.5 * extra.iter().sum::<f64>() / m))
            } else {
                if extra.iter().any(|&b| b != extra[0]) {
                    return Err(malformed(format!("bayes_risk varies within n = {n}")));
                }
                (extra[0], None)
            };
            Ok(SummaryRow { n, trials: risks.len(), mean, std_error, bayes, claimed })
        })
        .collect()
}

/// Tab-separated text table.
pub fn render_table(rows: &[SummaryRow]) -> String {
    let claimed = rows.iter().any(|r| r.claimed.is_some());
    let mut s = String::from("n\ttrials\tmean_risk\tstd_error\tbayes_risk");
    if claimed {
        s.push_str("\tclaimed_bound");
    }
    s.push('\n');
    for r in rows {
        let _ = write!(s, "{}\t{}\t{:.6}\t{:.6}\t{:.6}", r.n, r.trials, r.mean, r.std_error, r.bayes);
        if let Some(c) = r.claimed {
            let _ = write!(s, "\t{c:.6}");
        }
        s.push('\n');
    }
    s
}

/// Two whitespace-separated columns `n risk` with a `#` header line.
pub fn render_plot(rows: &[SummaryRow]) -> String {
    let mut s = String::from("# n risk\n");
    for r in rows {
        let _ = writeln!(s, "{} {:.16e}", r.n, r.mean);
    }
    s
}
