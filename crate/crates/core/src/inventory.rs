//! Phoneme inventories and their validation.
//!
//! Inventory files are UTF-8 TSV with `#` comments:
//!
//! ```text
//! sampa <TAB> ipa <TAB> lang <TAB> features <TAB> optional <TAB> allophone_of
//! ```
//!
//! `features` lists every specified feature (optional ones included) joined
//! with `+`; `optional` is the subset that is not contrastive in the
//! language. `allophone_of` is empty for phonemes.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{Feature, FeatureSet, FeatureVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lang {
    En,
    Cmn,
}

impl Lang {
    pub fn code(self) -> &'static str {
        match self {
            Lang::En => "en",
            Lang::Cmn => "cmn",
        }
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown language `{0}` (expected `en` or `cmn`)")]
pub struct UnknownLang(pub String);

impl FromStr for Lang {
    type Err = UnknownLang;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "en" => Ok(Lang::En),
            "cmn" => Ok(Lang::Cmn),
            _ => Err(UnknownLang(s.to_string())),
        }
    }
}

#[derive(Debug, Error)]
pub enum InventoryError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("invalid entry {entry}: {reason}")]
    Validation { entry: String, reason: String },
    #[error("unknown {lang} phoneme `{sampa}`")]
    UnknownPhoneme { lang: Lang, sampa: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhonemeEntry {
    pub sampa: String,
    /// Display only.
    pub ipa: String,
    pub lang: Lang,
    pub features: FeatureVector,
    /// Phoneme this entry is a surface realisation of.
    pub allophone_of: Option<String>,
}

impl PhonemeEntry {
    pub fn is_allophone(&self) -> bool {
        self.allophone_of.is_some()
    }

    pub fn is_consonantal(&self) -> bool {
        self.features.has(Feature::Consonantal)
    }

    pub fn is_vocalic(&self) -> bool {
        self.features.has(Feature::Vocalic)
    }

    pub fn is_obstruent(&self) -> bool {
        self.features.has(Feature::Obstruent)
    }

    /// Consonants written with a retroflex hook (`` ` ``) in X-SAMPA.
    pub fn is_retroflex(&self) -> bool {
        self.is_consonantal() && self.sampa.contains('`')
    }

    fn to_tsv_row(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}",
            self.sampa,
            self.ipa,
            self.lang,
            self.features.specified().to_joined(),
            self.features.optional().to_joined(),
            self.allophone_of.as_deref().unwrap_or("")
        )
    }
}

/// A single rule violation found by [`validate_inventory`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Offending entry; `None` for inventory-wide rules such as counts.
    pub entry: Option<String>,
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.entry {
            Some(e) => write!(f, "/{e}/: {}", self.rule),
            None => f.write_str(&self.rule),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Inventory {
    lang: Lang,
    entries: Vec<PhonemeEntry>,
    by_sampa: HashMap<String, usize>,
}

impl Inventory {
    /// Builds an inventory without running [`validate_inventory`]. When a
    /// symbol is duplicated the index points at its first occurrence.
    pub fn from_entries(lang: Lang, entries: Vec<PhonemeEntry>) -> Inventory {
        let mut by_sampa = HashMap::with_capacity(entries.len());
        for (i, e) in entries.iter().enumerate() {
            by_sampa.entry(e.sampa.clone()).or_insert(i);
        }
        Inventory {
            lang,
            entries,
            by_sampa,
        }
    }

    /// Parses TSV text and validates the result.
    pub fn parse(text: &str, lang: Lang) -> Result<Inventory, InventoryError> {
        let inv = Inventory::parse_unchecked(text, lang)?;
        if let Some(v) = validate_inventory(&inv).into_iter().next() {
            return Err(InventoryError::Validation {
                entry: v.entry.unwrap_or_else(|| format!("<{lang} inventory>")),
                reason: v.rule,
            });
        }
        Ok(inv)
    }

    /// Parses rows without running [`validate_inventory`].
    pub fn parse_unchecked(text: &str, lang: Lang) -> Result<Inventory, InventoryError> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
                continue;
            }
            entries.push(parse_row(raw, line, lang)?);
        }
        Ok(Inventory::from_entries(lang, entries))
    }

    pub fn lang(&self) -> Lang {
        self.lang
    }

    /// All rows, phonemes and allophones, in file order.
    pub fn entries(&self) -> &[PhonemeEntry] {
        &self.entries
    }

    pub fn phonemes(&self) -> impl Iterator<Item = &PhonemeEntry> {
        self.entries.iter().filter(|e| !e.is_allophone())
    }

    pub fn allophones(&self) -> impl Iterator<Item = &PhonemeEntry> {
        self.entries.iter().filter(|e| e.is_allophone())
    }

    pub fn get(&self, sampa: &str) -> Option<&PhonemeEntry> {
        self.by_sampa.get(sampa).map(|&i| &self.entries[i])
    }

    pub fn lookup(&self, sampa: &str) -> Result<&PhonemeEntry, InventoryError> {
        self.get(sampa).ok_or_else(|| InventoryError::UnknownPhoneme {
            lang: self.lang,
            sampa: sampa.to_string(),
        })
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("# sampa\tipa\tlang\tfeatures\toptional\tallophone_of\n");
        for e in &self.entries {
            out.push_str(&e.to_tsv_row());
            out.push('\n');
        }
        out
    }
}

fn parse_row(raw: &str, line: usize, lang: Lang) -> Result<PhonemeEntry, InventoryError> {
    let err = |reason: String| InventoryError::Parse { line, reason };
    let cols: Vec<&str> = raw.split('\t').collect();
    if !(4..=6).contains(&cols.len()) {
        return Err(err(format!("expected 6 tab-separated columns, found {}", cols.len())));
    }
    let col = |i: usize| cols.get(i).map(|s| s.trim()).unwrap_or("");
    let sampa = col(0);
    if sampa.is_empty() {
        return Err(err("empty sampa symbol".into()));
    }
    let row_lang: Lang = col(2).parse().map_err(|e: UnknownLang| err(e.to_string()))?;
    if row_lang != lang {
        return Err(err(format!("row language {row_lang} in a {lang} inventory")));
    }
    let specified = FeatureSet::parse_joined(col(3)).map_err(|e| err(e.to_string()))?;
    let optional = FeatureSet::parse_joined(col(4)).map_err(|e| err(e.to_string()))?;
    let features = FeatureVector::new(specified, optional).map_err(|e| err(e.to_string()))?;
    let allophone_of = match col(5) {
        "" | "-" => None,
        s => Some(s.to_string()),
    };
    Ok(PhonemeEntry {
        sampa: sampa.to_string(),
        ipa: col(1).to_string(),
        lang,
        features,
        allophone_of,
    })
}

pub fn load_inventory(path: impl AsRef<Path>, lang: Lang) -> Result<Inventory, InventoryError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| InventoryError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Inventory::parse(&text, lang)
}

/// Expected (consonantal, vocalic) phoneme counts.
pub fn expected_counts(lang: Lang) -> (usize, usize) {
    match lang {
        Lang::En => (24, 14),
        Lang::Cmn => (21, 16),
    }
}

/// Checks every structural and language-specific rule. An empty result means
/// the inventory is valid.
pub fn validate_inventory(inv: &Inventory) -> Vec<Violation> {
    use Feature::*;
    let mut out = Vec::new();
    let mut flag = |entry: &PhonemeEntry, rule: String| {
        out.push(Violation {
            entry: Some(entry.sampa.clone()),
            rule,
        })
    };

    let mut seen: HashMap<&str, usize> = HashMap::new();
    let mut vectors: HashMap<FeatureSet, &str> = HashMap::new();
    for e in inv.entries() {
        let fv = &e.features;
        if e.lang != inv.lang() {
            flag(e, format!("language {} in a {} inventory", e.lang, inv.lang()));
        }
        *seen.entry(e.sampa.as_str()).or_default() += 1;
        if seen[e.sampa.as_str()] == 2 {
            flag(e, "duplicate SAMPA symbol".into());
        }
        if let Some(other) = vectors.insert(fv.specified(), &e.sampa) {
            if other != e.sampa {
                flag(e, format!("same feature specification as /{other}/"));
            }
        }

        if fv.has(Consonantal) == fv.has(Vocalic) {
            flag(e, "must specify exactly one of CONSONANTAL and VOCALIC".into());
        }
        if fv.has(Consonantal) && fv.has(Obstruent) == fv.has(Sonorant) {
            flag(e, "consonant must specify exactly one of OBSTRUENT and SONORANT".into());
        }
        if fv.has(Vocalic) && !(fv.has(Sonorant) && fv.has(Voice)) {
            flag(e, "vowel must specify SONORANT and VOICE".into());
        }
        if let Some(base) = &e.allophone_of {
            match inv.get(base) {
                Some(b) if !b.is_allophone() => {}
                Some(_) => flag(e, format!("allophone of /{base}/, which is itself an allophone")),
                None => flag(e, format!("allophone of unknown phoneme /{base}/")),
            }
        }

        match inv.lang() {
            Lang::En => {
                if e.is_obstruent() && fv.contrastive().contains(SpreadGlottis) {
                    flag(e, "English obstruents contrast in voicing, not SPREAD_GLOTTIS".into());
                }
                if matches!(e.sampa.as_str(), "S" | "Z") && !fv.contrastive().contains(High) {
                    flag(e, "postalveolar fricative must be HIGH".into());
                }
            }
            Lang::Cmn => {
                if e.is_obstruent() && fv.has(Voice) && e.sampa != "z`" {
                    flag(e, "only /z`/ may be a voiced obstruent in Mandarin".into());
                }
                if e.is_retroflex() && !fv.has(Rtr) {
                    flag(e, "retroflex must be RTR".into());
                }
            }
        }
    }

    let phonemes: Vec<_> = inv.phonemes().collect();
    let cons = phonemes.iter().filter(|e| e.is_consonantal()).count();
    let voc = phonemes.iter().filter(|e| e.is_vocalic()).count();
    let (want_cons, want_voc) = expected_counts(inv.lang());
    if (cons, voc) != (want_cons, want_voc) {
        out.push(Violation {
            entry: None,
            rule: format!(
                "{} inventory has {cons} consonantal + {voc} vocalic phonemes, expected {want_cons} + {want_voc}",
                inv.lang()
            ),
        });
    }
    if inv.lang() == Lang::Cmn {
        let voiced_obs = phonemes
            .iter()
            .filter(|e| e.is_obstruent() && e.features.has(Voice))
            .count();
        if voiced_obs != 1 {
            out.push(Violation {
                entry: None,
                rule: format!("Mandarin must have exactly one voiced obstruent, found {voiced_obs}"),
            });
        }
    }
    out
}

/// Distinct symbols across a set of inventories plus extra break symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabReport {
    pub symbols: Vec<String>,
}

impl VocabReport {
    pub fn count(&self) -> usize {
        self.symbols.len()
    }
}

pub fn vocab_report(
    invs: &[&Inventory],
    punctuation: &[&str],
    include_allophones: bool,
) -> VocabReport {
    let mut set = BTreeSet::new();
    for inv in invs {
        for e in inv.entries() {
            if include_allophones || !e.is_allophone() {
                set.insert(e.sampa.clone());
            }
        }
    }
    set.extend(punctuation.iter().map(|p| p.to_string()));
    VocabReport {
        symbols: set.into_iter().collect(),
    }
}
