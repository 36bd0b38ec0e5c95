//! Phonological-feature front-end for English/Mandarin speech synthesis.
//!
//! ARPABET words and toned pinyin syllables are parsed into SAMPA segments,
//! looked up in feature-annotated phoneme inventories, and assembled into
//! frames of 19 monovalent feature bits plus tone and prosody channels. The
//! same feature vectors drive cross-language projection (which native
//! phoneme a foreign segment is heard as) and the crate also ships a phone
//! error rate scorer.
//!
//! ```
//! use phonfeat::{encode_utterance, tokenize_tagged_line, Mode, Resources};
//!
//! let res = Resources::builtin();
//! let tokens = tokenize_tagged_line("en: HH AH0 L OW1 | cmn: ni3 hao3 .").unwrap();
//! let enc = encode_utterance(&res, &tokens, Mode::Surface).unwrap();
//! assert_eq!(enc.frames.len(), 4 + 5 + 1);
//! ```

pub mod accent;
pub mod encoder;
pub mod eval;
pub mod features;
pub mod frontend;
pub mod inventory;

use std::path::Path;

use thiserror::Error;

pub use accent::{project_segment, project_utterance, substitution_table, TonePolicy};
pub use encoder::{embed_utterance, encode_utterance, EncodedUtterance, Format, Frame, Mode, ToyEmbedding};
pub use eval::{align_sequences, per_from_files, AlignmentResult};
pub use features::{
    feature_from_name, score_candidates, ternary_match, ConflictTable, Feature, FeatureSet, FeatureVector,
    MatchOutcome, Weights,
};
pub use frontend::{apply_allophony, tokenize_tagged_line, Frontend, Segment, TaggedToken};
pub use inventory::{load_inventory, validate_inventory, vocab_report, Inventory, Lang, PhonemeEntry};

/// Copies of the files under `data/`, compiled in.
pub mod builtin {
    pub const EN: &str = include_str!("../../../data/en.tsv");
    pub const CMN: &str = include_str!("../../../data/cmn.tsv");
    pub const ARPABET: &str = include_str!("../../../data/arpabet_to_sampa.tsv");
    pub const PINYIN: &str = include_str!("../../../data/pinyin_to_sampa.tsv");
    /// Legal toneless pinyin syllables, one per line.
    pub const PINYIN_SYLLABLES: &str = include_str!("../../../data/pinyin_syllables.txt");

    pub fn pinyin_syllables() -> impl Iterator<Item = &'static str> {
        PINYIN_SYLLABLES
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error(transparent)]
    Inventory(#[from] inventory::InventoryError),
    #[error(transparent)]
    Frontend(#[from] frontend::FrontendError),
}

/// Both inventories and both mapping tables. Immutable once loaded.
#[derive(Debug, Clone)]
pub struct Resources {
    pub en: Inventory,
    pub cmn: Inventory,
    pub frontend: Frontend,
}

impl Resources {
    /// Loads `en.tsv`, `cmn.tsv`, `arpabet_to_sampa.tsv` and
    /// `pinyin_to_sampa.tsv` from `dir`.
    pub fn load(dir: impl AsRef<Path>) -> Result<Resources, LoadError> {
        let dir = dir.as_ref();
        Ok(Resources {
            en: load_inventory(dir.join("en.tsv"), Lang::En)?,
            cmn: load_inventory(dir.join("cmn.tsv"), Lang::Cmn)?,
            frontend: Frontend::load(dir)?,
        })
    }

    pub fn try_builtin() -> Result<Resources, LoadError> {
        Ok(Resources {
            en: Inventory::parse(builtin::EN, Lang::En)?,
            cmn: Inventory::parse(builtin::CMN, Lang::Cmn)?,
            frontend: Frontend {
                arpabet: frontend::ArpabetTable::parse(builtin::ARPABET)?,
                pinyin: frontend::PinyinTable::parse(builtin::PINYIN)?,
            },
        })
    }

    /// The compiled-in tables.
    pub fn builtin() -> Resources {
        Self::try_builtin().expect("built-in data is valid")
    }

    pub fn inventory(&self, lang: Lang) -> &Inventory {
        match lang {
            Lang::En => &self.en,
            Lang::Cmn => &self.cmn,
        }
    }
}
