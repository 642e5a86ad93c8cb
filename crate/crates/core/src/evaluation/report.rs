use serde::{Deserialize, Serialize};

use super::EvalMode;
use crate::error::{Error, Result};

/// Precision, recall and F1 as fractions in `[0, 1]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub fn new(precision: f64, recall: f64) -> Prf {
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Prf { precision, recall, f1 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Scores {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Scores {
        let ratio = |n: usize, d: usize| if d == 0 { 0.0 } else { n as f64 / d as f64 };
        let prf = Prf::new(ratio(tp, tp + fp), ratio(tp, tp + fn_));
        Scores {
            tp,
            fp,
            fn_,
            precision: prf.precision,
            recall: prf.recall,
            f1: prf.f1,
        }
    }

    pub fn prf(&self) -> Prf {
        Prf {
            precision: self.precision,
            recall: self.recall,
            f1: self.f1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub mode: EvalMode,
    /// Counts pooled over the whole evaluation set.
    pub total: Scores,
    pub per_category: Vec<(String, Scores)>,
    /// Unweighted mean over `per_category`; zero when there are no categories.
    pub macro_average: Prf,
}

impl EvalReport {
    pub fn new(mode: EvalMode, total: Scores, per_category: Vec<(String, Scores)>) -> EvalReport {
        let prfs: Vec<Prf> = per_category.iter().map(|(_, s)| s.prf()).collect();
        let macro_average = macro_average(&prfs).unwrap_or_default();
        EvalReport {
            mode,
            total,
            per_category,
            macro_average,
        }
    }

    pub fn category(&self, name: &str) -> Option<&Scores> {
        self.per_category.iter().find(|(c, _)| c == name).map(|(_, s)| s)
    }
}

/// Arithmetic mean of precision, recall and F1 (each averaged separately).
pub fn macro_average(reports: &[Prf]) -> Result<Prf> {
    if reports.is_empty() {
        return Err(Error::Config("macro average of zero reports".into()));
    }
    let n = reports.len() as f64;
    let sum = |f: fn(&Prf) -> f64| reports.iter().map(f).sum::<f64>() / n;
    Ok(Prf {
        precision: sum(|p| p.precision),
        recall: sum(|p| p.recall),
        f1: sum(|p| p.f1),
    })
}
