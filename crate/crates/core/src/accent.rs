//! Cross-language projection: each source segment is perceived through the
//! target inventory by picking the best-scoring target entry.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::features::{score_candidates, FeatureError, MatchOutcome, RankedCandidate, Weights};
use crate::frontend::{apply_allophony, FrontendError, TaggedToken};
use crate::inventory::{Inventory, InventoryError, Lang, PhonemeEntry};
use crate::Resources;

/// Number of ranked targets kept per source entry in substitution tables.
pub const TABLE_DEPTH: usize = 3;

#[derive(Debug, Error)]
pub enum AccentError {
    #[error("token {token}: {source}")]
    Parse {
        token: usize,
        #[source]
        source: FrontendError,
    },
    #[error("token {token}: {source}")]
    Lookup {
        token: usize,
        #[source]
        source: InventoryError,
    },
    #[error("token {token} is tagged {found}, expected {expected}")]
    LanguageMismatch { token: usize, expected: Lang, found: Lang },
    #[error(transparent)]
    Feature(#[from] FeatureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TonePolicy {
    /// Zero every tone id (a toneless target grammar).
    #[default]
    Drop,
    /// Keep the source tone ids.
    Preserve,
}

impl fmt::Display for TonePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TonePolicy::Drop => "drop",
            TonePolicy::Preserve => "preserve",
        })
    }
}

impl FromStr for TonePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "drop" => Ok(TonePolicy::Drop),
            "preserve" => Ok(TonePolicy::Preserve),
            _ => Err(format!("unknown tone policy `{s}` (expected drop or preserve)")),
        }
    }
}

/// Best target for `src` among all target entries, allophones included.
pub fn project_segment<'a>(
    src: &PhonemeEntry,
    target: &'a Inventory,
    weights: Weights,
) -> Result<RankedCandidate<'a>, FeatureError> {
    Ok(score_candidates(&src.features, target.entries(), weights)?[0])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentProjection {
    pub source: String,
    pub target: String,
    pub tone_id: u8,
    pub outcome: MatchOutcome,
    /// Next-best targets, best first.
    pub runners_up: Vec<(String, MatchOutcome)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionReport {
    pub source_lang: Lang,
    pub target_lang: Lang,
    pub tone_policy_applied: TonePolicy,
    pub segments: Vec<SegmentProjection>,
}

impl ProjectionReport {
    pub fn target_symbols(&self) -> Vec<&str> {
        self.segments.iter().map(|s| s.target.as_str()).collect()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from(
            "idx\tsrc_sampa\ttgt_sampa\ttone_id\tmatches\tmismatches\tno_mismatches\tscore\trunners_up\n",
        );
        for (i, s) in self.segments.iter().enumerate() {
            let ru: Vec<&str> = s.runners_up.iter().map(|(t, _)| t.as_str()).collect();
            writeln!(
                out,
                "{i}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                s.source,
                s.target,
                s.tone_id,
                s.outcome.matches,
                s.outcome.mismatches,
                s.outcome.no_mismatches,
                s.outcome.score,
                ru.join(",")
            )
            .unwrap();
        }
        out
    }
}

/// Projects every segment of `tokens` (all tagged `src_lang`) onto the
/// `tgt_lang` inventory. Mandarin input is projected in its surface form.
pub fn project_utterance(
    res: &Resources,
    tokens: &[TaggedToken],
    src_lang: Lang,
    tgt_lang: Lang,
    tone_policy: TonePolicy,
    weights: Weights,
) -> Result<ProjectionReport, AccentError> {
    let src_inv = res.inventory(src_lang);
    let tgt_inv = res.inventory(tgt_lang);
    let mut segments = Vec::new();
    for (token, tok) in tokens.iter().enumerate() {
        if tok.lang != src_lang {
            return Err(AccentError::LanguageMismatch {
                token,
                expected: src_lang,
                found: tok.lang,
            });
        }
        let segs = res
            .frontend
            .parse_token(tok)
            .map_err(|source| AccentError::Parse { token, source })?;
        for seg in apply_allophony(&segs) {
            let entry = src_inv
                .lookup(&seg.sampa)
                .map_err(|source| AccentError::Lookup { token, source })?;
            let ranked = score_candidates(&entry.features, tgt_inv.entries(), weights)?;
            segments.push(SegmentProjection {
                source: seg.sampa,
                target: ranked[0].entry.sampa.clone(),
                tone_id: match tone_policy {
                    TonePolicy::Drop => 0,
                    TonePolicy::Preserve => seg.tone_id,
                },
                outcome: ranked[0].outcome,
                runners_up: ranked[1..]
                    .iter()
                    .take(TABLE_DEPTH - 1)
                    .map(|r| (r.entry.sampa.clone(), r.outcome))
                    .collect(),
            });
        }
    }
    Ok(ProjectionReport {
        source_lang: src_lang,
        target_lang: tgt_lang,
        tone_policy_applied: tone_policy,
        segments,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubstitutionRow {
    pub source: String,
    /// Up to [`TABLE_DEPTH`] targets, best first.
    pub ranked: Vec<(String, MatchOutcome)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubstitutionTable {
    pub source_lang: Lang,
    pub target_lang: Lang,
    /// One row per source phoneme, in inventory order.
    pub rows: Vec<SubstitutionRow>,
}

impl SubstitutionTable {
    pub fn to_tsv(&self) -> String {
        let mut out =
            String::from("src_sampa\trank\ttgt_sampa\tmatches\tmismatches\tno_mismatches\tscore\n");
        for row in &self.rows {
            for (rank, (tgt, o)) in row.ranked.iter().enumerate() {
                writeln!(
                    out,
                    "{}\t{}\t{tgt}\t{}\t{}\t{}\t{}",
                    row.source,
                    rank + 1,
                    o.matches,
                    o.mismatches,
                    o.no_mismatches,
                    o.score
                )
                .unwrap();
            }
        }
        out
    }

    /// Rank-1 target for a source symbol.
    pub fn best(&self, source: &str) -> Option<&str> {
        self.rows
            .iter()
            .find(|r| r.source == source)
            .and_then(|r| r.ranked.first())
            .map(|(t, _)| t.as_str())
    }
}

/// Ranked top targets for every source phoneme (allophone rows are not
/// sources but remain eligible targets).
pub fn substitution_table(
    src: &Inventory,
    tgt: &Inventory,
    weights: Weights,
) -> Result<SubstitutionTable, FeatureError> {
    let rows = src
        .phonemes()
        .map(|e| {
            let ranked = score_candidates(&e.features, tgt.entries(), weights)?;
            Ok(SubstitutionRow {
                source: e.sampa.clone(),
                ranked: ranked
                    .iter()
                    .take(TABLE_DEPTH)
                    .map(|r| (r.entry.sampa.clone(), r.outcome))
                    .collect(),
            })
        })
        .collect::<Result<_, FeatureError>>()?;
    Ok(SubstitutionTable {
        source_lang: src.lang(),
        target_lang: tgt.lang(),
        rows,
    })
}
