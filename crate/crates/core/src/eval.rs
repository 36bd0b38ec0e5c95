//! Phone error rate from a unit-cost minimum edit alignment.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("reference is empty; PER is undefined")]
    ZeroEntries,
    #[error("line {0}: reference is empty; PER is undefined")]
    ZeroEntriesAt(usize),
    #[error("reference has {reference} lines but hypothesis has {hypothesis}")]
    LineCountMismatch { reference: usize, hypothesis: usize },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AlignmentResult {
    pub deletions: usize,
    pub insertions: usize,
    pub substitutions: usize,
    /// Reference length.
    pub entries: usize,
}

impl AlignmentResult {
    /// Total edits; equals the Levenshtein distance.
    pub fn errors(&self) -> usize {
        self.deletions + self.insertions + self.substitutions
    }

    pub fn per(&self) -> Result<f64, EvalError> {
        if self.entries == 0 {
            return Err(EvalError::ZeroEntries);
        }
        Ok(self.errors() as f64 / self.entries as f64)
    }

    fn accumulate(&mut self, other: &AlignmentResult) {
        self.deletions += other.deletions;
        self.insertions += other.insertions;
        self.substitutions += other.substitutions;
        self.entries += other.entries;
    }
}

/// Aligns `hyp` against `reference` with unit costs. Among minimal
/// alignments the backtrace prefers substitution (or match), then deletion,
/// then insertion.
pub fn align_sequences<T: PartialEq>(reference: &[T], hyp: &[T]) -> AlignmentResult {
    let (n, m) = (reference.len(), hyp.len());
    let w = m + 1;
    let mut cost = vec![0usize; (n + 1) * w];
    for (j, c) in cost[..w].iter_mut().enumerate() {
        *c = j;
    }
    for i in 1..=n {
        cost[i * w] = i;
        for j in 1..=m {
            let sub = cost[(i - 1) * w + j - 1] + usize::from(reference[i - 1] != hyp[j - 1]);
            let del = cost[(i - 1) * w + j] + 1;
            let ins = cost[i * w + j - 1] + 1;
            cost[i * w + j] = sub.min(del).min(ins);
        }
    }

    let mut res = AlignmentResult {
        entries: n,
        ..Default::default()
    };
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = cost[i * w + j];
        if i > 0 && j > 0 {
            let diff = usize::from(reference[i - 1] != hyp[j - 1]);
            if here == cost[(i - 1) * w + j - 1] + diff {
                res.substitutions += diff;
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && here == cost[(i - 1) * w + j] + 1 {
            res.deletions += 1;
            i -= 1;
        } else {
            res.insertions += 1;
            j -= 1;
        }
    }
    res
}

/// Per-line results plus corpus totals.
#[derive(Debug, Clone, PartialEq)]
pub struct PerReport {
    pub lines: Vec<AlignmentResult>,
    pub total: AlignmentResult,
}

impl PerReport {
    /// Pooled PER: total edits over total reference symbols.
    pub fn corpus_per(&self) -> Result<f64, EvalError> {
        self.total.per()
    }

    /// Unweighted mean of the per-line PERs.
    pub fn mean_per(&self) -> Result<f64, EvalError> {
        if self.lines.is_empty() {
            return Err(EvalError::ZeroEntries);
        }
        let sum: f64 = self.lines.iter().map(|l| l.per()).sum::<Result<f64, _>>()?;
        Ok(sum / self.lines.len() as f64)
    }

    /// `line entries deletions insertions substitutions per` rows followed by
    /// `corpus` and `mean` summary rows.
    pub fn to_tsv(&self) -> Result<String, EvalError> {
        let mut out = String::from("line\tentries\tdeletions\tinsertions\tsubstitutions\tper\n");
        let mut row = |label: &str, r: &AlignmentResult, per: f64| {
            writeln!(
                out,
                "{label}\t{}\t{}\t{}\t{}\t{per:.6}",
                r.entries, r.deletions, r.insertions, r.substitutions
            )
            .unwrap();
        };
        for (i, l) in self.lines.iter().enumerate() {
            row(&(i + 1).to_string(), l, l.per()?);
        }
        row("corpus", &self.total, self.corpus_per()?);
        let mean = self.mean_per()?;
        writeln!(out, "mean\t-\t-\t-\t-\t{mean:.6}").unwrap();
        Ok(out)
    }
}

/// Aligns line-aligned, whitespace-separated transcriptions.
pub fn per_from_strs(reference: &str, hyp: &str) -> Result<PerReport, EvalError> {
    let ref_lines: Vec<&str> = reference.lines().collect();
    let hyp_lines: Vec<&str> = hyp.lines().collect();
    if ref_lines.len() != hyp_lines.len() {
        return Err(EvalError::LineCountMismatch {
            reference: ref_lines.len(),
            hypothesis: hyp_lines.len(),
        });
    }
    let mut lines = Vec::with_capacity(ref_lines.len());
    let mut total = AlignmentResult::default();
    for (i, (r, h)) in ref_lines.iter().zip(&hyp_lines).enumerate() {
        let r: Vec<&str> = r.split_whitespace().collect();
        let h: Vec<&str> = h.split_whitespace().collect();
        if r.is_empty() {
            return Err(EvalError::ZeroEntriesAt(i + 1));
        }
        let res = align_sequences(&r, &h);
        total.accumulate(&res);
        lines.push(res);
    }
    Ok(PerReport { lines, total })
}

pub fn per_from_files(ref_path: impl AsRef<Path>, hyp_path: impl AsRef<Path>) -> Result<PerReport, EvalError> {
    let read = |p: &Path| {
        std::fs::read_to_string(p).map_err(|source| EvalError::Io {
            path: p.display().to_string(),
            source,
        })
    };
    per_from_strs(&read(ref_path.as_ref())?, &read(hyp_path.as_ref())?)
}
