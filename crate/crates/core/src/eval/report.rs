use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::cv::{BenchmarkReport, ModelSummary};
use super::{paired_t_test, EvalError, TTestResult};

pub const CSV_HEADER: &str = "dataset,model,fold,micro_f1,macro_f1,train_seconds";

/// One rendered line of the comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub id: String,
    pub cells: Result<TableCells, String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableCells {
    pub svm: ModelSummary,
    pub rvm: ModelSummary,
    pub t_test: Option<TTestResult>,
}

impl BenchmarkReport {
    pub fn table_rows(&self) -> Vec<TableRow> {
        self.rows
            .iter()
            .map(|r| TableRow {
                id: r.id.clone(),
                cells: r.outcome.as_ref().map_err(Clone::clone).map(|o| TableCells {
                    svm: o.svm.summary(),
                    rvm: o.rvm.summary(),
                    t_test: Some(o.t_test),
                }),
            })
            .collect()
    }
}

const COLUMNS: [&str; 9] = [
    "Dataset",
    "SVM Micro-F",
    "SVM Macro-F",
    "RVM Micro-F",
    "RVM Macro-F",
    "SVM train (s)",
    "RVM train (s)",
    "t",
    "p",
];

/// Aligned text table: F-measures ×100 with two decimals, then summed
/// training seconds, then the paired t statistic (RVM − SVM micro-F1).
pub fn render_table(rows: &[TableRow]) -> String {
    let mut cells: Vec<Vec<String>> = vec![COLUMNS.iter().map(ToString::to_string).collect()];
    for r in rows {
        let mut line = vec![r.id.clone()];
        match &r.cells {
            Ok(c) => {
                let pct = |x: f64| format!("{:.2}", x * 100.0);
                line.push(pct(c.svm.micro_f1));
                line.push(pct(c.svm.macro_f1));
                line.push(pct(c.rvm.micro_f1));
                line.push(pct(c.rvm.macro_f1));
                line.push(format!("{:.2}", c.svm.train_seconds));
                line.push(format!("{:.2}", c.rvm.train_seconds));
                match c.t_test {
                    Some(t) => {
                        line.push(format!("{:.3}", t.t));
                        line.push(format!("{:.4}", t.p));
                    }
                    None => line.extend(["-".to_string(), "-".to_string()]),
                }
            }
            Err(e) => {
                line.push(format!("FAILED: {e}"));
            }
        }
        cells.push(line);
    }
    let mut widths = vec![0; COLUMNS.len()];
    for line in &cells {
        if line.len() == COLUMNS.len() {
            for (w, c) in widths.iter_mut().zip(line) {
                *w = (*w).max(c.chars().count());
            }
        }
    }
    let mut out = String::new();
    for line in &cells {
        let mut text = String::new();
        for (i, c) in line.iter().enumerate() {
            if i > 0 {
                text.push_str("  ");
            }
            if i == 0 {
                let _ = write!(text, "{c:<w$}", w = widths[0]);
            } else if line.len() == COLUMNS.len() {
                let _ = write!(text, "{c:>w$}", w = widths[i]);
            } else {
                text.push_str(c);
            }
        }
        out.push_str(text.trim_end());
        out.push('\n');
    }
    out
}

/// Machine-readable per-fold lines followed by `#` summary lines.
pub fn render_csv(report: &BenchmarkReport) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in &report.rows {
        if let Ok(o) = &row.outcome {
            for cv in [&o.svm, &o.rvm] {
                for f in &cv.folds {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{}",
                        row.id, cv.kind, f.fold, f.metrics.micro_f1, f.metrics.macro_f1, f.train_seconds
                    );
                }
            }
        }
    }
    for row in &report.rows {
        match &row.outcome {
            Ok(o) => {
                let _ = writeln!(
                    out,
                    "# ttest,{},t={},df={},p={}",
                    row.id, o.t_test.t, o.t_test.df, o.t_test.p
                );
                for cv in [&o.svm, &o.rvm] {
                    let pooled = cv.pooled_metrics();
                    let _ = writeln!(
                        out,
                        "# pooled,{},{},micro_f1={},macro_f1={}",
                        row.id, cv.kind, pooled.micro_f1, pooled.macro_f1
                    );
                }
            }
            Err(e) => {
                let _ = writeln!(out, "# failed,{},{}", row.id, e.replace('\n', " "));
            }
        }
    }
    out
}

/// One per-fold line of a results file.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldRecord {
    pub dataset: String,
    pub model: String,
    pub fold: usize,
    pub micro_f1: f64,
    pub macro_f1: f64,
    pub train_seconds: f64,
}

/// Reads the per-fold lines written by [`render_csv`]; comment lines and the
/// header are skipped.
pub fn parse_results(text: &str) -> Result<Vec<FoldRecord>, EvalError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == CSV_HEADER {
            continue;
        }
        let err = |message: String| EvalError::Parse { line: i + 1, message };
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(err(format!("expected 6 comma-separated fields, found {}", f.len())));
        }
        let real = |s: &str| s.parse::<f64>().map_err(|_| err(format!("bad number {s:?}")));
        out.push(FoldRecord {
            dataset: f[0].to_string(),
            model: f[1].to_string(),
            fold: f[2].parse().map_err(|_| err(format!("bad fold {:?}", f[2])))?,
            micro_f1: real(f[3])?,
            macro_f1: real(f[4])?,
            train_seconds: real(f[5])?,
        });
    }
    Ok(out)
}

fn index_by_fold(records: &[FoldRecord], side: &str) -> Result<BTreeMap<(String, usize), f64>, EvalError> {
    let mut map = BTreeMap::new();
    for r in records {
        if map.insert((r.dataset.clone(), r.fold), r.micro_f1).is_some() {
            return Err(EvalError::Pairing(format!(
                "{side} has more than one row for dataset {} fold {}; select a single model",
                r.dataset, r.fold
            )));
        }
    }
    Ok(map)
}

/// Pairs micro-F1 by (dataset, fold) and runs a paired t-test per dataset
/// (`a − b`). Every pair must be present on both sides.
pub fn compare_results(a: &[FoldRecord], b: &[FoldRecord]) -> Result<Vec<(String, TTestResult)>, EvalError> {
    let left = index_by_fold(a, "first input")?;
    let right = index_by_fold(b, "second input")?;
    let mut missing: Vec<String> = Vec::new();
    for (d, f) in left.keys() {
        if !right.contains_key(&(d.clone(), *f)) {
            missing.push(format!("{d} fold {f} missing from second input"));
        }
    }
    for (d, f) in right.keys() {
        if !left.contains_key(&(d.clone(), *f)) {
            missing.push(format!("{d} fold {f} missing from first input"));
        }
    }
    if !missing.is_empty() {
        return Err(EvalError::Pairing(missing.join("; ")));
    }
    let mut per_dataset: BTreeMap<&str, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for ((d, f), &x) in &left {
        let e = per_dataset.entry(d.as_str()).or_default();
        e.0.push(x);
        e.1.push(right[&(d.clone(), *f)]);
    }
    per_dataset
        .into_iter()
        .map(|(d, (x, y))| Ok((d.to_string(), paired_t_test(&x, &y)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(micro: f64, macro_: f64, secs: f64) -> ModelSummary {
        ModelSummary {
            micro_f1: micro,
            macro_f1: macro_,
            train_seconds: secs,
        }
    }

    #[test]
    fn table_layout_with_published_row() {
        let rows = vec![
            TableRow {
                id: "D1".into(),
                cells: Ok(TableCells {
                    svm: summary(0.7929, 0.802, 28.0),
                    rvm: summary(0.824, 0.8278, 38.0),
                    t_test: None,
                }),
            },
            TableRow {
                id: "D2".into(),
                cells: Err("corpus missing".into()),
            },
        ];
        let t = render_table(&rows);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 3);
        let cols: Vec<&str> = lines[1].split_whitespace().collect();
        assert_eq!(
            cols,
            ["D1", "79.29", "80.20", "82.40", "82.78", "28.00", "38.00", "-", "-"]
        );
        assert!(lines[2].starts_with("D2") && lines[2].contains("FAILED: corpus missing"));
        assert_eq!(lines[0].len(), lines[1].len());
    }

    fn rec(dataset: &str, model: &str, fold: usize, micro: f64) -> FoldRecord {
        FoldRecord {
            dataset: dataset.into(),
            model: model.into(),
            fold,
            micro_f1: micro,
            macro_f1: micro,
            train_seconds: 0.5,
        }
    }

    #[test]
    fn compare_examples() {
        let a: Vec<_> = (0..5).map(|f| rec("D1", "rvm", f, 0.5 + f as f64)).collect();
        let b: Vec<_> = (0..5).map(|f| rec("D1", "svm", f, -0.5)).collect();
        let r = compare_results(&a, &b).unwrap();
        assert_eq!(r[0].0, "D1");
        assert!((r[0].1.t - 4.2426).abs() < 1e-3);
        assert!((r[0].1.p - 0.0132).abs() < 5e-4);
        let same = compare_results(&a, &a).unwrap();
        assert_eq!((same[0].1.t, same[0].1.p), (0.0, 1.0));
        assert!(matches!(compare_results(&a, &b[..4]), Err(EvalError::Pairing(_))));
        let mut both = a.clone();
        both.extend(b.clone());
        assert!(matches!(compare_results(&both, &b), Err(EvalError::Pairing(_))));
    }

    #[test]
    fn results_parse() {
        let text = format!("{CSV_HEADER}\nD1,svm,0,0.9,0.8,1.5\n# ttest,D1,t=0,df=1,p=1\n");
        let r = parse_results(&text).unwrap();
        assert_eq!(
            r,
            vec![FoldRecord {
                dataset: "D1".into(),
                model: "svm".into(),
                fold: 0,
                micro_f1: 0.9,
                macro_f1: 0.8,
                train_seconds: 1.5
            }]
        );
        assert!(matches!(
            parse_results("D1,svm,0\n"),
            Err(EvalError::Parse { line: 1, .. })
        ));
    }
}
