//! CSV and aligned-text rendering of experiment results.

use std::fmt::Write as _;

use super::dgp::DgpSpec;
use super::experiment::ExperimentResult;

pub const CSV_HEADER: &str =
    "T,rho,trend,lambda,errors,variance,init_sd,test,alpha,reps,rate,se,seed,failures";

/// One line per result under [`CSV_HEADER`], optionally preceded by a
/// provenance comment.
pub fn to_csv(results: &[ExperimentResult], provenance: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(p) = provenance {
        let _ = writeln!(out, "# {p}");
    }
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in results {
        let d = &r.dgp;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{:.6},{:.6},{},{}",
            d.len,
            d.rho,
            d.trend.kind,
            d.trend.lambda,
            d.errors,
            d.variance,
            d.init_sd,
            r.test,
            r.alpha,
            r.reps,
            r.rate,
            r.se,
            r.seed,
            r.failures
        );
    }
    out
}

fn dgp_fields(d: &DgpSpec) -> [(&'static str, String); 7] {
    [
        ("init_var", ((d.init_sd * d.init_sd * 1e9).round() / 1e9).to_string()),
        ("T", d.len.to_string()),
        ("rho", d.rho.to_string()),
        ("trend", d.trend.kind.to_string()),
        ("lambda", d.trend.lambda.to_string()),
        ("errors", d.errors.to_string()),
        ("variance", d.variance.to_string()),
    ]
}

/// Tests as rows and DGPs as columns, both in order of first appearance.
/// Column labels list only the DGP fields that vary across the results.
pub fn to_text(results: &[ExperimentResult]) -> String {
    let mut tests: Vec<&str> = Vec::new();
    let mut cols: Vec<[(&'static str, String); 7]> = Vec::new();
    for r in results {
        if !tests.contains(&r.test.as_str()) {
            tests.push(&r.test);
        }
        let f = dgp_fields(&r.dgp);
        if !cols.contains(&f) {
            cols.push(f);
        }
    }
    let varying: Vec<usize> = (0..7)
        .filter(|&i| cols.iter().any(|c| c[i].1 != cols[0][i].1))
        .collect();
    let labels: Vec<Vec<String>> = if varying.is_empty() {
        cols.iter().map(|_| vec!["rate".to_string()]).collect()
    } else {
        cols.iter()
            .map(|c| varying.iter().map(|&i| format!("{}={}", c[i].0, c[i].1)).collect())
            .collect()
    };
    let header_rows = labels.first().map_or(0, Vec::len);

    let first_width = tests.iter().map(|t| t.len()).max().unwrap_or(0).max(4);
    let widths: Vec<usize> = labels
        .iter()
        .map(|l| l.iter().map(String::len).max().unwrap_or(0).max(5))
        .collect();

    let mut out = String::new();
    if header_rows == 0 {
        let _ = writeln!(out, "{:<first_width$}", "test");
        return out;
    }
    for h in 0..header_rows {
        let name = if h + 1 == header_rows { "test" } else { "" };
        let mut line = format!("{name:<first_width$}");
        for (l, w) in labels.iter().zip(&widths) {
            let _ = write!(line, " | {:>w$}", l[h]);
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    let rule_len = first_width + widths.iter().map(|w| w + 3).sum::<usize>();
    out.push_str(&"-".repeat(rule_len));
    out.push('\n');
    for t in &tests {
        let mut line = format!("{t:<first_width$}");
        for (c, w) in cols.iter().zip(&widths) {
            let cell = results
                .iter()
                .find(|r| r.test == *t && dgp_fields(&r.dgp) == *c)
                .map_or_else(|| "-".to_string(), |r| format!("{:.3}", r.rate));
            let _ = write!(line, " | {cell:>w$}");
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}
