//! Text renderings of evaluation results.

use std::fmt::Write;

use super::{EvalReport, PhiMatrix};
use crate::corpus::Smell;

/// One row per report; for each smell the A, P, R and F1 columns, then EMR
/// and Hamming loss. Scores have two decimals.
pub fn markdown_table(reports: &[EvalReport]) -> String {
    let mut out = String::from("| Model | Features |");
    for smell in Smell::ALL {
        for m in ["A", "P", "R", "F1"] {
            write!(out, " {} {m} |", smell.title()).unwrap();
        }
    }
    out.push_str(" EMR | HL |\n|---|---|");
    out.push_str(&"---:|".repeat(Smell::ALL.len() * 4 + 2));
    out.push('\n');
    for r in reports {
        write!(out, "| {} | {} |", r.model, r.features).unwrap();
        for smell in Smell::ALL {
            let s = r.mean.get(smell);
            for v in [s.accuracy, s.precision, s.recall, s.f1] {
                write!(out, " {v:.2} |").unwrap();
            }
        }
        writeln!(out, " {:.2} | {:.2} |", r.mean.emr, r.mean.hamming_loss).unwrap();
    }
    out
}

/// Phi matrix as CSV with smell keys as header and first column; undefined
/// entries are left empty.
pub fn phi_csv(matrix: &PhiMatrix) -> String {
    let keys: Vec<&str> = Smell::ALL.iter().map(|s| s.key()).collect();
    let mut out = format!("smell,{}\n", keys.join(","));
    for (key, row) in keys.iter().zip(matrix) {
        out.push_str(key);
        for v in row {
            out.push(',');
            if let Some(v) = v {
                write!(out, "{v:.4}").unwrap();
            }
        }
        out.push('\n');
    }
    out
}
