//! Transcription parsers: ARPABET words, pinyin syllables and
//! language-tagged code-switched lines, all producing SAMPA [`Segment`]s.

mod arpabet;
mod pinyin;
mod tagged;

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::inventory::Lang;

pub use arpabet::ArpabetTable;
pub use pinyin::{PinyinTable, Syllable, INITIALS_WITH_APICAL_FINAL};
pub use tagged::{prosody_id, tokenize_tagged_line, TaggedToken, PUNCTUATION};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrontendError {
    #[error("unknown ARPABET code `{0}`")]
    UnknownArpabetCode(String),
    #[error("unknown pinyin syllable `{0}`")]
    UnknownSyllable(String),
    #[error("pinyin syllable `{0}` has no tone digit")]
    MissingToneDigit(String),
    #[error("no rhotic counterpart for erhua in `{0}`")]
    UnsupportedErhua(String),
    #[error("span {span}: missing `en:` or `cmn:` language tag")]
    MissingLanguageTag { span: usize },
    #[error("span {span}: empty payload")]
    EmptySpan { span: usize },
    #[error("{file} line {line}: {reason}")]
    Table {
        file: &'static str,
        line: usize,
        reason: String,
    },
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
}

/// One SAMPA segment produced by a parser.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Segment {
    pub sampa: String,
    pub lang: Lang,
    /// 0 for English; 1-4 for the Mandarin tones, 5 for the neutral tone.
    pub tone_id: u8,
    /// Set when allophony rewrote this segment.
    pub surface: bool,
}

impl Segment {
    pub fn new(sampa: impl Into<String>, lang: Lang, tone_id: u8) -> Segment {
        Segment {
            sampa: sampa.into(),
            lang,
            tone_id,
            surface: false,
        }
    }
}

/// Dental phonemes and their alveolo-palatal realisations.
pub const ALVEOLO_PALATALS: [(&str, &str); 3] = [("s", "s\\"), ("ts", "ts\\"), ("ts_h", "ts\\_h")];

/// Rewrites Mandarin `/s ts ts_h/` to `[s\ ts\ ts\_h]` when the next segment
/// is Mandarin `/i/` or `/y/`. Everything else is copied unchanged, so the
/// function is idempotent.
pub fn apply_allophony(segs: &[Segment]) -> Vec<Segment> {
    let mut out = segs.to_vec();
    for (i, next) in segs.iter().enumerate().skip(1) {
        let seg = &mut out[i - 1];
        if seg.lang != Lang::Cmn || next.lang != Lang::Cmn {
            continue;
        }
        if !matches!(next.sampa.as_str(), "i" | "y") {
            continue;
        }
        if let Some((_, allo)) = ALVEOLO_PALATALS.iter().find(|(p, _)| *p == seg.sampa) {
            seg.sampa = (*allo).to_string();
            seg.surface = true;
        }
    }
    out
}

/// Both mapping tables.
#[derive(Debug, Clone)]
pub struct Frontend {
    pub arpabet: ArpabetTable,
    pub pinyin: PinyinTable,
}

impl Frontend {
    pub fn load(dir: impl AsRef<Path>) -> Result<Frontend, FrontendError> {
        let dir = dir.as_ref();
        Ok(Frontend {
            arpabet: ArpabetTable::parse(&read(&dir.join("arpabet_to_sampa.tsv"))?)?,
            pinyin: PinyinTable::parse(&read(&dir.join("pinyin_to_sampa.tsv"))?)?,
        })
    }

    /// Parses one tagged token into phonemic segments.
    pub fn parse_token(&self, token: &TaggedToken) -> Result<Vec<Segment>, FrontendError> {
        match token.lang {
            Lang::En => self.arpabet.parse_token(&token.payload),
            Lang::Cmn => self.pinyin.parse_syllable(&token.payload),
        }
    }
}

fn read(path: &Path) -> Result<String, FrontendError> {
    std::fs::read_to_string(path).map_err(|e| FrontendError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

/// Shared reader for the `key<TAB>...<TAB>sampa[+sampa]` mapping files.
fn table_rows<'a>(
    text: &'a str,
    file: &'static str,
    columns: usize,
) -> impl Iterator<Item = Result<(usize, Vec<String>), FrontendError>> + 'a {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(move |(i, l)| {
            let cols: Vec<String> = l.split('\t').map(|c| c.trim().to_string()).collect();
            if cols.len() != columns || cols.iter().any(String::is_empty) {
                return Err(FrontendError::Table {
                    file,
                    line: i + 1,
                    reason: format!("expected {columns} non-empty tab-separated columns"),
                });
            }
            Ok((i + 1, cols))
        })
}

fn split_segments(s: &str) -> Vec<String> {
    s.split('+').map(str::to_string).collect()
}
