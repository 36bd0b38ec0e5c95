//! The 19 monovalent features, feature sets, and the ternary
//! match/mismatch/no-mismatch comparison used for perception-style scoring.
//!
//! Canonical indices (these are the bit positions used everywhere, including
//! serialized frames):
//!
//! | idx | feature        | class         |
//! |-----|----------------|---------------|
//! | 0   | CONSONANTAL    | ROOT          |
//! | 1   | VOCALIC        | ROOT          |
//! | 2   | SONORANT       | ROOT          |
//! | 3   | OBSTRUENT      | ROOT          |
//! | 4   | VOICE          | LARYNGEAL     |
//! | 5   | SPREAD_GLOTTIS | LARYNGEAL     |
//! | 6   | PLOSIVE        | CONSTRICTION  |
//! | 7   | CONTINUANT     | CONSTRICTION  |
//! | 8   | NASAL          | MANNER        |
//! | 9   | LATERAL        | MANNER        |
//! | 10  | STRIDENT       | MANNER        |
//! | 11  | RHOTIC         | MANNER        |
//! | 12  | LABIAL         | ARTICULATOR   |
//! | 13  | CORONAL        | ARTICULATOR   |
//! | 14  | DORSAL         | ARTICULATOR   |
//! | 15  | HIGH           | TONGUE_HEIGHT |
//! | 16  | LOW            | TONGUE_HEIGHT |
//! | 17  | ATR            | TONGUE_ROOT   |
//! | 18  | RTR            | TONGUE_ROOT   |

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::inventory::PhonemeEntry;

/// Number of features; also the width of every feature-bit row.
pub const FEATURE_COUNT: usize = 19;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FeatureError {
    #[error("unknown feature name `{0}`")]
    UnknownFeature(String),
    #[error("optional features {optional} are not a subset of the specified set {specified}")]
    OptionalNotSpecified {
        specified: FeatureSet,
        optional: FeatureSet,
    },
    #[error("conflicting features {0} and {1} specified together")]
    Conflict(Feature, Feature),
    #[error("candidate set is empty")]
    EmptyCandidateSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Feature {
    Consonantal = 0,
    Vocalic,
    Sonorant,
    Obstruent,
    Voice,
    SpreadGlottis,
    Plosive,
    Continuant,
    Nasal,
    Lateral,
    Strident,
    Rhotic,
    Labial,
    Coronal,
    Dorsal,
    High,
    Low,
    Atr,
    Rtr,
}

/// Node of the feature geometry a feature hangs from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureClass {
    Root,
    Laryngeal,
    Constriction,
    Manner,
    Articulator,
    TongueHeight,
    TongueRoot,
}

impl Feature {
    pub const ALL: [Feature; FEATURE_COUNT] = [
        Feature::Consonantal,
        Feature::Vocalic,
        Feature::Sonorant,
        Feature::Obstruent,
        Feature::Voice,
        Feature::SpreadGlottis,
        Feature::Plosive,
        Feature::Continuant,
        Feature::Nasal,
        Feature::Lateral,
        Feature::Strident,
        Feature::Rhotic,
        Feature::Labial,
        Feature::Coronal,
        Feature::Dorsal,
        Feature::High,
        Feature::Low,
        Feature::Atr,
        Feature::Rtr,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(idx: usize) -> Option<Feature> {
        Self::ALL.get(idx).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Feature::Consonantal => "CONSONANTAL",
            Feature::Vocalic => "VOCALIC",
            Feature::Sonorant => "SONORANT",
            Feature::Obstruent => "OBSTRUENT",
            Feature::Voice => "VOICE",
            Feature::SpreadGlottis => "SPREAD_GLOTTIS",
            Feature::Plosive => "PLOSIVE",
            Feature::Continuant => "CONTINUANT",
            Feature::Nasal => "NASAL",
            Feature::Lateral => "LATERAL",
            Feature::Strident => "STRIDENT",
            Feature::Rhotic => "RHOTIC",
            Feature::Labial => "LABIAL",
            Feature::Coronal => "CORONAL",
            Feature::Dorsal => "DORSAL",
            Feature::High => "HIGH",
            Feature::Low => "LOW",
            Feature::Atr => "ATR",
            Feature::Rtr => "RTR",
        }
    }

    pub fn class(self) -> FeatureClass {
        use Feature::*;
        match self {
            Consonantal | Vocalic | Sonorant | Obstruent => FeatureClass::Root,
            Voice | SpreadGlottis => FeatureClass::Laryngeal,
            Plosive | Continuant => FeatureClass::Constriction,
            Nasal | Lateral | Strident | Rhotic => FeatureClass::Manner,
            Labial | Coronal | Dorsal => FeatureClass::Articulator,
            High | Low => FeatureClass::TongueHeight,
            Atr | Rtr => FeatureClass::TongueRoot,
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Looks a feature up by canonical name, case-insensitively. Spaces and
/// hyphens are accepted in place of the underscore ("spread glottis").
pub fn feature_from_name(name: &str) -> Result<Feature, FeatureError> {
    let norm: String = name
        .trim()
        .chars()
        .map(|c| match c {
            ' ' | '-' => '_',
            c => c.to_ascii_uppercase(),
        })
        .collect();
    Feature::ALL
        .iter()
        .copied()
        .find(|f| f.name() == norm)
        .ok_or_else(|| FeatureError::UnknownFeature(name.to_string()))
}

impl FromStr for Feature {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        feature_from_name(s)
    }
}

/// A set of features packed into the low 19 bits of a `u32`; bit `i` is the
/// feature with canonical index `i`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureSet(u32);

impl FeatureSet {
    pub const EMPTY: FeatureSet = FeatureSet(0);
    const MASK: u32 = (1 << FEATURE_COUNT) - 1;

    /// Returns `None` if any bit above index 18 is set.
    pub fn from_bits(bits: u32) -> Option<FeatureSet> {
        (bits & !Self::MASK == 0).then_some(FeatureSet(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn contains(self, f: Feature) -> bool {
        self.0 & (1 << f.index()) != 0
    }

    pub fn insert(&mut self, f: Feature) {
        self.0 |= 1 << f.index();
    }

    pub fn remove(&mut self, f: Feature) {
        self.0 &= !(1 << f.index());
    }

    pub fn with(mut self, f: Feature) -> FeatureSet {
        self.insert(f);
        self
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: FeatureSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersection(self, other: FeatureSet) -> FeatureSet {
        FeatureSet(self.0 & other.0)
    }

    pub fn union(self, other: FeatureSet) -> FeatureSet {
        FeatureSet(self.0 | other.0)
    }

    pub fn difference(self, other: FeatureSet) -> FeatureSet {
        FeatureSet(self.0 & !other.0)
    }

    /// Iterates in canonical index order.
    pub fn iter(self) -> impl Iterator<Item = Feature> {
        Feature::ALL.into_iter().filter(move |f| self.contains(*f))
    }

    /// Parses a `+`-joined list of feature names. The empty string and `-`
    /// both denote the empty set.
    pub fn parse_joined(s: &str) -> Result<FeatureSet, FeatureError> {
        let s = s.trim();
        if s.is_empty() || s == "-" {
            return Ok(FeatureSet::EMPTY);
        }
        s.split('+').map(feature_from_name).collect()
    }

    pub fn to_joined(self) -> String {
        self.iter().map(Feature::name).collect::<Vec<_>>().join("+")
    }
}

impl FromIterator<Feature> for FeatureSet {
    fn from_iter<I: IntoIterator<Item = Feature>>(iter: I) -> Self {
        let mut set = FeatureSet::EMPTY;
        for f in iter {
            set.insert(f);
        }
        set
    }
}

impl<const N: usize> From<[Feature; N]> for FeatureSet {
    fn from(fs: [Feature; N]) -> Self {
        fs.into_iter().collect()
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, feat) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{feat}")?;
        }
        write!(f, "}}")
    }
}

/// Pairs of features that cannot both be specified on one segment. A surface
/// feature whose partner is specified underlyingly is a mismatch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictTable {
    partners: [FeatureSet; FEATURE_COUNT],
}

impl ConflictTable {
    pub const DEFAULT_PAIRS: [(Feature, Feature); 6] = [
        (Feature::Consonantal, Feature::Vocalic),
        (Feature::Obstruent, Feature::Sonorant),
        (Feature::Plosive, Feature::Continuant),
        (Feature::Voice, Feature::SpreadGlottis),
        (Feature::High, Feature::Low),
        (Feature::Atr, Feature::Rtr),
    ];

    pub fn from_pairs(pairs: &[(Feature, Feature)]) -> ConflictTable {
        let mut partners = [FeatureSet::EMPTY; FEATURE_COUNT];
        for &(a, b) in pairs {
            if a != b {
                partners[a.index()].insert(b);
                partners[b.index()].insert(a);
            }
        }
        ConflictTable { partners }
    }

    pub fn partners(&self, f: Feature) -> FeatureSet {
        self.partners[f.index()]
    }

    pub fn conflicts(&self, a: Feature, b: Feature) -> bool {
        self.partners(a).contains(b)
    }

    /// Unordered pairs, each reported once with the lower index first.
    pub fn pairs(&self) -> Vec<(Feature, Feature)> {
        let mut out = Vec::new();
        for a in Feature::ALL {
            for b in self.partners(a).iter() {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// First conflicting pair fully contained in `set`, if any.
    pub fn find_conflict(&self, set: FeatureSet) -> Option<(Feature, Feature)> {
        set.iter().find_map(|a| {
            self.partners(a)
                .intersection(set)
                .iter()
                .find(|&b| a < b)
                .map(|b| (a, b))
        })
    }

    /// Compares extracted surface features against an underlying
    /// specification.
    ///
    /// Each surface feature is a match if the underlying form specifies it,
    /// a mismatch if the underlying form specifies a conflicting partner as a
    /// non-optional feature, and a no-mismatch otherwise. Underlying features
    /// missing from the surface are tolerated and only tallied in
    /// [`MatchOutcome::unmatched_underlying`], which is used to break ties.
    pub fn ternary_match(
        &self,
        surface: &FeatureVector,
        underlying: &FeatureVector,
        weights: Weights,
    ) -> MatchOutcome {
        let contrastive = underlying.contrastive();
        let mut matches = 0;
        let mut mismatches = 0;
        let mut no_mismatches = 0;
        for f in surface.specified.iter() {
            if underlying.specified.contains(f) {
                matches += 1;
            } else if !self.partners(f).intersection(contrastive).is_empty() {
                mismatches += 1;
            } else {
                no_mismatches += 1;
            }
        }
        MatchOutcome {
            matches,
            mismatches,
            no_mismatches,
            unmatched_underlying: underlying.specified.difference(surface.specified).len(),
            score: weights.score(matches, mismatches),
        }
    }
}

impl Default for ConflictTable {
    fn default() -> Self {
        ConflictTable::from_pairs(&Self::DEFAULT_PAIRS)
    }
}

/// A segment's feature specification. `optional` marks features that are
/// specified for cross-language coverage but are not needed for contrast
/// within the segment's own language.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct FeatureVector {
    specified: FeatureSet,
    optional: FeatureSet,
}

impl FeatureVector {
    pub fn new(specified: FeatureSet, optional: FeatureSet) -> Result<Self, FeatureError> {
        if !optional.is_subset(specified) {
            return Err(FeatureError::OptionalNotSpecified { specified, optional });
        }
        if let Some((a, b)) = ConflictTable::default().find_conflict(specified) {
            return Err(FeatureError::Conflict(a, b));
        }
        Ok(FeatureVector { specified, optional })
    }

    /// A vector with no optional features.
    pub fn plain(specified: impl Into<FeatureSet>) -> Result<Self, FeatureError> {
        Self::new(specified.into(), FeatureSet::EMPTY)
    }

    pub fn specified(&self) -> FeatureSet {
        self.specified
    }

    pub fn optional(&self) -> FeatureSet {
        self.optional
    }

    /// Specified features minus the optional ones.
    pub fn contrastive(&self) -> FeatureSet {
        self.specified.difference(self.optional)
    }

    pub fn has(&self, f: Feature) -> bool {
        self.specified.contains(f)
    }

    pub fn is_optional(&self, f: Feature) -> bool {
        self.optional.contains(f)
    }
}

/// Relative weights of a match and a mismatch in the candidate score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub matched: f64,
    pub mismatched: f64,
}

impl Weights {
    pub fn new(matched: f64, mismatched: f64) -> Weights {
        Weights { matched, mismatched }
    }

    pub fn score(&self, matches: usize, mismatches: usize) -> f64 {
        matches as f64 * self.matched - mismatches as f64 * self.mismatched
    }
}

impl Default for Weights {
    fn default() -> Self {
        Weights {
            matched: 1.0,
            mismatched: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchOutcome {
    pub matches: usize,
    pub mismatches: usize,
    pub no_mismatches: usize,
    /// Underlying features absent from the surface. Never penalised; only
    /// consulted as a tie-break.
    pub unmatched_underlying: usize,
    pub score: f64,
}

/// [`ConflictTable::ternary_match`] with the default table and weights.
pub fn ternary_match(surface: &FeatureVector, underlying: &FeatureVector) -> MatchOutcome {
    ConflictTable::default().ternary_match(surface, underlying, Weights::default())
}

#[derive(Debug, Clone, Copy)]
pub struct RankedCandidate<'a> {
    pub entry: &'a PhonemeEntry,
    pub outcome: MatchOutcome,
}

/// Ranking order: higher score first, then fewer mismatches, fewer
/// no-mismatches, fewer unmatched underlying features, and finally the SAMPA
/// symbol (then language) in byte order.
///
/// Scores are compared through the weighted count differences rather than
/// the stored `score`, so candidates whose scores are equal in exact
/// arithmetic tie for any choice of weights.
pub fn rank_order(a: &RankedCandidate<'_>, b: &RankedCandidate<'_>, weights: Weights) -> Ordering {
    let gain = (a.outcome.matches as f64 - b.outcome.matches as f64) * weights.matched;
    let loss = (a.outcome.mismatches as f64 - b.outcome.mismatches as f64) * weights.mismatched;
    loss.total_cmp(&gain)
        .then(a.outcome.mismatches.cmp(&b.outcome.mismatches))
        .then(a.outcome.no_mismatches.cmp(&b.outcome.no_mismatches))
        .then(a.outcome.unmatched_underlying.cmp(&b.outcome.unmatched_underlying))
        .then_with(|| a.entry.sampa.cmp(&b.entry.sampa))
        .then(a.entry.lang.cmp(&b.entry.lang))
}

/// Scores every candidate against `surface` and returns them best-first.
pub fn score_candidates<'a>(
    surface: &FeatureVector,
    candidates: impl IntoIterator<Item = &'a PhonemeEntry>,
    weights: Weights,
) -> Result<Vec<RankedCandidate<'a>>, FeatureError> {
    let table = ConflictTable::default();
    let mut ranked: Vec<_> = candidates
        .into_iter()
        .map(|entry| RankedCandidate {
            entry,
            outcome: table.ternary_match(surface, &entry.features, weights),
        })
        .collect();
    if ranked.is_empty() {
        return Err(FeatureError::EmptyCandidateSet);
    }
    ranked.sort_by(|a, b| rank_order(a, b, weights));
    Ok(ranked)
}
