//! Model-input assembly: one frame per segment or punctuation mark, each
//! carrying a 19-bit feature row, a tone id and a prosody id.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{FeatureSet, FEATURE_COUNT};
use crate::frontend::{apply_allophony, prosody_id, FrontendError, TaggedToken};
use crate::inventory::{InventoryError, Lang};
use crate::Resources;

/// Tone channel size: 0 none, 1-4 Mandarin tones, 5 neutral.
pub const TONE_CLASSES: usize = 6;
/// Prosody channel size: 0 none, 1 minor break, 2 declarative end,
/// 3 interrogative end.
pub const PROSODY_CLASSES: usize = 4;

pub const FEATURE_EMBED_DIM: usize = 192;
pub const TONE_EMBED_DIM: usize = 32;
pub const PROSODY_EMBED_DIM: usize = 32;
pub const EMBED_DIM: usize = FEATURE_EMBED_DIM + TONE_EMBED_DIM + PROSODY_EMBED_DIM;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Underlying phonemes only.
    #[default]
    Phonemic,
    /// Apply Mandarin allophony before feature lookup.
    Surface,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "phonemic" => Ok(Mode::Phonemic),
            "surface" => Ok(Mode::Surface),
            _ => Err(format!("unknown mode `{s}` (expected phonemic or surface)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Tsv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tsv" => Ok(Format::Tsv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format `{s}` (expected tsv or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    pub symbol: String,
    pub lang: Lang,
    pub is_break: bool,
    pub tone_id: u8,
    pub prosody_id: u8,
    #[serde(rename = "bits", with = "bit_array")]
    pub feature_bits: FeatureSet,
}

impl Frame {
    fn check(&self) -> Result<(), String> {
        if self.symbol.is_empty() || self.symbol.contains(char::is_whitespace) {
            return Err(format!("invalid symbol {:?}", self.symbol));
        }
        if self.tone_id as usize >= TONE_CLASSES {
            return Err(format!("tone_id {} out of range", self.tone_id));
        }
        if self.prosody_id as usize >= PROSODY_CLASSES {
            return Err(format!("prosody_id {} out of range", self.prosody_id));
        }
        if self.is_break {
            if !self.feature_bits.is_empty() || self.tone_id != 0 || self.prosody_id == 0 {
                return Err("break frame needs zero bits, tone 0 and a prosody id".into());
            }
        } else if self.prosody_id != 0 {
            return Err("segment frame with a non-zero prosody id".into());
        }
        Ok(())
    }
}

mod bit_array {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    use crate::features::{FeatureSet, FEATURE_COUNT};

    pub fn serialize<S: Serializer>(set: &FeatureSet, s: S) -> Result<S::Ok, S::Error> {
        let bits: Vec<u8> = (0..FEATURE_COUNT).map(|i| (set.bits() >> i & 1) as u8).collect();
        s.collect_seq(bits)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<FeatureSet, D::Error> {
        let bits = Vec::<u8>::deserialize(d)?;
        if bits.len() != FEATURE_COUNT {
            return Err(D::Error::custom(format!("expected {FEATURE_COUNT} bits, got {}", bits.len())));
        }
        let mut raw = 0u32;
        for (i, b) in bits.into_iter().enumerate() {
            match b {
                0 => {}
                1 => raw |= 1 << i,
                _ => return Err(D::Error::custom("feature bits must be 0 or 1")),
            }
        }
        Ok(FeatureSet::from_bits(raw).expect("19 bits"))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodedUtterance {
    pub frames: Vec<Frame>,
}

#[derive(Debug, Error)]
pub enum EncodeError {
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
    #[error("token {token}: unsupported punctuation `{punct}`")]
    Punctuation { token: usize, punct: String },
}

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("line {line}: {reason}")]
    Tsv { line: usize, reason: String },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("frame {frame}: {reason}")]
    Invalid { frame: usize, reason: String },
}

/// Encodes tagged tokens into frames. Token indices in errors are 0-based.
/// Optional features are kept in the emitted bits.
pub fn encode_utterance(
    res: &Resources,
    tokens: &[TaggedToken],
    mode: Mode,
) -> Result<EncodedUtterance, EncodeError> {
    let mut frames = Vec::new();
    for (token, tok) in tokens.iter().enumerate() {
        let mut segs = res
            .frontend
            .parse_token(tok)
            .map_err(|source| EncodeError::Parse { token, source })?;
        if mode == Mode::Surface {
            segs = apply_allophony(&segs);
        }
        let inv = res.inventory(tok.lang);
        for seg in segs {
            let entry = inv
                .lookup(&seg.sampa)
                .map_err(|source| EncodeError::Lookup { token, source })?;
            frames.push(Frame {
                symbol: seg.sampa,
                lang: tok.lang,
                is_break: false,
                tone_id: seg.tone_id,
                prosody_id: 0,
                feature_bits: entry.features.specified(),
            });
        }
        if let Some(p) = &tok.trailing_punct {
            let prosody = prosody_id(p).ok_or_else(|| EncodeError::Punctuation {
                token,
                punct: p.clone(),
            })?;
            frames.push(Frame {
                symbol: p.clone(),
                lang: tok.lang,
                is_break: true,
                tone_id: 0,
                prosody_id: prosody,
                feature_bits: FeatureSet::EMPTY,
            });
        }
    }
    Ok(EncodedUtterance { frames })
}

fn tsv_header() -> String {
    let mut h = String::from("idx\tsymbol\tlang\tis_break\ttone_id\tprosody_id");
    for i in 0..FEATURE_COUNT {
        write!(h, "\tb{i}").unwrap();
    }
    h
}

impl EncodedUtterance {
    pub fn validate(&self) -> Result<(), DecodeError> {
        for (frame, f) in self.frames.iter().enumerate() {
            f.check().map_err(|reason| DecodeError::Invalid { frame, reason })?;
        }
        Ok(())
    }

    pub fn serialize(&self, format: Format) -> String {
        match format {
            Format::Tsv => self.to_tsv(),
            Format::Json => serde_json::to_string(self).expect("frames serialize"),
        }
    }

    pub fn deserialize(text: &str, format: Format) -> Result<EncodedUtterance, DecodeError> {
        let enc = match format {
            Format::Tsv => Self::from_tsv(text)?,
            Format::Json => serde_json::from_str(text)?,
        };
        enc.validate()?;
        Ok(enc)
    }

    /// Header plus one row per frame; bits in canonical feature order.
    pub fn to_tsv(&self) -> String {
        let mut out = tsv_header();
        out.push('\n');
        for (i, f) in self.frames.iter().enumerate() {
            write!(
                out,
                "{i}\t{}\t{}\t{}\t{}\t{}",
                f.symbol,
                f.lang,
                u8::from(f.is_break),
                f.tone_id,
                f.prosody_id
            )
            .unwrap();
            for b in 0..FEATURE_COUNT {
                write!(out, "\t{}", f.feature_bits.bits() >> b & 1).unwrap();
            }
            out.push('\n');
        }
        out
    }

    fn from_tsv(text: &str) -> Result<EncodedUtterance, DecodeError> {
        let mut lines = text.lines().enumerate();
        let err = |line: usize, reason: String| DecodeError::Tsv { line: line + 1, reason };
        match lines.next() {
            Some((_, h)) if h == tsv_header() => {}
            _ => return Err(err(0, "missing or malformed header".into())),
        }
        let mut frames = Vec::new();
        for (n, line) in lines {
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 6 + FEATURE_COUNT {
                return Err(err(n, format!("expected {} columns, found {}", 6 + FEATURE_COUNT, cols.len())));
            }
            let num = |i: usize| -> Result<u8, DecodeError> {
                cols[i].parse().map_err(|_| err(n, format!("bad number `{}`", cols[i])))
            };
            let idx: usize = cols[0].parse().map_err(|_| err(n, "bad idx".into()))?;
            if idx != frames.len() {
                return Err(err(n, format!("idx {idx} out of sequence")));
            }
            let lang = cols[2].parse().map_err(|e| err(n, format!("{e}")))?;
            let is_break = match num(3)? {
                0 => false,
                1 => true,
                v => return Err(err(n, format!("is_break must be 0 or 1, got {v}"))),
            };
            let mut raw = 0u32;
            for b in 0..FEATURE_COUNT {
                match num(6 + b)? {
                    0 => {}
                    1 => raw |= 1 << b,
                    v => return Err(err(n, format!("bit b{b} must be 0 or 1, got {v}"))),
                }
            }
            frames.push(Frame {
                symbol: cols[1].to_string(),
                lang,
                is_break,
                tone_id: num(4)?,
                prosody_id: num(5)?,
                feature_bits: FeatureSet::from_bits(raw).expect("19 bits"),
            });
        }
        Ok(EncodedUtterance { frames })
    }
}

/// Frames x 256 matrix: a 192-wide projection of the feature bits followed by
/// 32-wide tone and prosody lookups.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyEmbedding {
    pub seed: u64,
    rows: usize,
    data: Vec<f32>,
}

impl ToyEmbedding {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        EMBED_DIM
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * EMBED_DIM..(i + 1) * EMBED_DIM]
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }
}

/// Randomly initialised, never trained, projection tables.
///
/// Generator: ChaCha8 seeded with `seed_from_u64(seed)`; draws are uniform in
/// [-1, 1] and fill, in row-major order, the 19x192 feature matrix, then the
/// 6x32 tone table, then the 4x32 prosody table.
#[derive(Debug, Clone)]
pub struct EmbeddingTables {
    feature: Vec<f32>,
    tone: Vec<f32>,
    prosody: Vec<f32>,
}

impl EmbeddingTables {
    pub fn new(seed: u64) -> EmbeddingTables {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |n: usize| -> Vec<f32> { (0..n).map(|_| rng.gen_range(-1.0f32..=1.0)).collect() };
        let feature = draw(FEATURE_COUNT * FEATURE_EMBED_DIM);
        let tone = draw(TONE_CLASSES * TONE_EMBED_DIM);
        let prosody = draw(PROSODY_CLASSES * PROSODY_EMBED_DIM);
        EmbeddingTables {
            feature,
            tone,
            prosody,
        }
    }

    pub fn embed_frame(&self, frame: &Frame, out: &mut Vec<f32>) {
        let mut proj = [0f32; FEATURE_EMBED_DIM];
        for f in frame.feature_bits.iter() {
            let row = &self.feature[f.index() * FEATURE_EMBED_DIM..][..FEATURE_EMBED_DIM];
            for (acc, w) in proj.iter_mut().zip(row) {
                *acc += w;
            }
        }
        out.extend_from_slice(&proj);
        let t = frame.tone_id as usize;
        out.extend_from_slice(&self.tone[t * TONE_EMBED_DIM..][..TONE_EMBED_DIM]);
        let p = frame.prosody_id as usize;
        out.extend_from_slice(&self.prosody[p * PROSODY_EMBED_DIM..][..PROSODY_EMBED_DIM]);
    }
}

/// Pure function of `(enc, seed)`. Frames must satisfy the channel ranges
/// (see [`EncodedUtterance::validate`]).
pub fn embed_utterance(enc: &EncodedUtterance, seed: u64) -> ToyEmbedding {
    let tables = EmbeddingTables::new(seed);
    let mut data = Vec::with_capacity(enc.frames.len() * EMBED_DIM);
    for f in &enc.frames {
        tables.embed_frame(f, &mut data);
    }
    ToyEmbedding {
        seed,
        rows: enc.frames.len(),
        data,
    }
}
