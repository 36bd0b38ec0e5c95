use std::collections::HashMap;

use super::{split_segments, table_rows, FrontendError, Segment};
use crate::inventory::Lang;

/// Initials whose bare `i` final is the apical vowel, written `-i` in the
/// mapping table.
pub const INITIALS_WITH_APICAL_FINAL: [&str; 7] = ["z", "c", "s", "zh", "ch", "sh", "r"];

const PALATAL_INITIALS: [&str; 3] = ["j", "q", "x"];
const NON_PALATAL_INITIALS: [&str; 10] = ["g", "k", "h", "z", "c", "s", "zh", "ch", "sh", "r"];
/// Finals that may stand without an initial (besides the y-/w- spellings).
const BARE_FINALS: [&str; 12] = ["a", "o", "e", "ai", "ei", "ao", "ou", "an", "en", "ang", "eng", "er"];

/// Vowels with a plain rhotic counterpart (`V` -> ``V` ``).
const RHOTIC_BASES: [&str; 5] = ["u", "o", "E", "a", "@"];
/// Vowels with a nasalised rhotic counterpart (`V N` -> ``V~` ``).
const NASAL_RHOTIC_BASES: [&str; 3] = ["a", "o", "u"];

/// A pinyin syllable split into its spelled components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Syllable {
    pub initial: Option<String>,
    /// Final as it appears in the mapping table (`v` for u-umlaut, `-i` for
    /// the apical vowel).
    pub final_: String,
    pub tone: u8,
    pub erhua: bool,
}

#[derive(Debug, Clone)]
pub struct PinyinTable {
    initials: HashMap<String, Vec<String>>,
    finals: HashMap<String, Vec<String>>,
}

impl PinyinTable {
    pub fn parse(text: &str) -> Result<PinyinTable, FrontendError> {
        const FILE: &str = "pinyin_to_sampa.tsv";
        let mut initials = HashMap::new();
        let mut finals = HashMap::new();
        for row in table_rows(text, FILE, 3) {
            let (line, cols) = row?;
            let target = match cols[1].as_str() {
                "initial" => &mut initials,
                "final" => &mut finals,
                other => {
                    return Err(FrontendError::Table {
                        file: FILE,
                        line,
                        reason: format!("kind must be `initial` or `final`, got `{other}`"),
                    })
                }
            };
            if target.insert(cols[0].clone(), split_segments(&cols[2])).is_some() {
                return Err(FrontendError::Table {
                    file: FILE,
                    line,
                    reason: format!("duplicate component `{}`", cols[0]),
                });
            }
        }
        Ok(PinyinTable { initials, finals })
    }

    pub fn initial(&self, spelled: &str) -> Option<&[String]> {
        self.initials.get(spelled).map(Vec::as_slice)
    }

    pub fn final_(&self, spelled: &str) -> Option<&[String]> {
        self.finals.get(spelled).map(Vec::as_slice)
    }

    /// All SAMPA symbols the table can emit, before erhua.
    pub fn emitted_symbols(&self) -> impl Iterator<Item = &str> {
        self.initials
            .values()
            .chain(self.finals.values())
            .flatten()
            .map(String::as_str)
    }

    /// Splits a toned syllable into initial, final, tone and erhua flag,
    /// checking the combination against basic pinyin phonotactics.
    pub fn split(&self, syll: &str) -> Result<Syllable, FrontendError> {
        let unknown = || FrontendError::UnknownSyllable(syll.to_string());
        let s = syll.trim();
        let last = s.chars().last().ok_or_else(unknown)?;
        let tone = match last {
            '1'..='5' => last as u8 - b'0',
            c if c.is_ascii_digit() => return Err(unknown()),
            _ => return Err(FrontendError::MissingToneDigit(syll.to_string())),
        };
        let body: String = s[..s.len() - 1]
            .chars()
            .map(|c| if c == 'ü' { 'v' } else { c.to_ascii_lowercase() })
            .collect();
        if body.is_empty() || !body.chars().all(|c| c.is_ascii_lowercase()) {
            return Err(unknown());
        }

        let (body, erhua) = match body.strip_suffix('r') {
            Some(stem) if body != "er" && !stem.is_empty() => (stem.to_string(), true),
            _ => (body, false),
        };

        let initial = ["zh", "ch", "sh"]
            .into_iter()
            .map(str::to_string)
            .chain(body.chars().next().map(String::from))
            .find(|i| body.len() > i.len() && body.starts_with(i.as_str()) && self.initials.contains_key(i));

        let final_ = match &initial {
            None => {
                let ok = BARE_FINALS.contains(&body.as_str()) || body.starts_with(['y', 'w']);
                if !ok {
                    return Err(unknown());
                }
                body.clone()
            }
            Some(ini) => {
                let rest = &body[ini.len()..];
                if rest.starts_with(['y', 'w']) || rest == "er" {
                    return Err(unknown());
                }
                let ini = ini.as_str();
                if rest == "i" && INITIALS_WITH_APICAL_FINAL.contains(&ini) {
                    "-i".to_string()
                } else if PALATAL_INITIALS.contains(&ini) {
                    let f = match rest.strip_prefix('u') {
                        Some(tail) => format!("v{tail}"),
                        None => rest.to_string(),
                    };
                    if !f.starts_with(['i', 'v']) {
                        return Err(unknown());
                    }
                    f
                } else {
                    let front = rest.starts_with(['i', 'v']);
                    if front && NON_PALATAL_INITIALS.contains(&ini) {
                        return Err(unknown());
                    }
                    if rest.starts_with('v') && !matches!(ini, "n" | "l") {
                        return Err(unknown());
                    }
                    rest.to_string()
                }
            }
        };
        if !self.finals.contains_key(&final_) {
            return Err(unknown());
        }
        Ok(Syllable {
            initial,
            final_,
            tone,
            erhua,
        })
    }

    /// Parses a toned pinyin syllable into phonemic SAMPA segments, each
    /// carrying the syllable's tone. A trailing `r` (erhua) turns the last
    /// vowel of the final into its rhotic counterpart; a nasal coda is
    /// absorbed (`-n` drops, `V ŋ` becomes the nasalised rhotic vowel).
    pub fn parse_syllable(&self, syll: &str) -> Result<Vec<Segment>, FrontendError> {
        let parts = self.split(syll)?;
        let mut fin: Vec<String> = self.finals[&parts.final_].clone();
        if parts.erhua {
            fin = rhotacize(fin).ok_or_else(|| FrontendError::UnsupportedErhua(syll.to_string()))?;
        }
        let init = match &parts.initial {
            Some(i) => self.initials[i].clone(),
            None => Vec::new(),
        };
        Ok(init
            .into_iter()
            .chain(fin)
            .map(|s| Segment::new(s, Lang::Cmn, parts.tone))
            .collect())
    }
}

fn rhotacize(mut fin: Vec<String>) -> Option<Vec<String>> {
    match fin.last().map(String::as_str) {
        Some("N") => {
            fin.pop();
            let v = fin.pop()?;
            if !NASAL_RHOTIC_BASES.contains(&v.as_str()) {
                return None;
            }
            fin.push(format!("{v}~`"));
        }
        Some("n") => {
            fin.pop();
            let v = fin.pop()?;
            if !RHOTIC_BASES.contains(&v.as_str()) {
                return None;
            }
            fin.push(format!("{v}`"));
        }
        Some(v) if RHOTIC_BASES.contains(&v) => {
            let r = format!("{v}`");
            *fin.last_mut()? = r;
        }
        _ => return None,
    }
    Some(fin)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> PinyinTable {
        PinyinTable::parse(crate::builtin::PINYIN).unwrap()
    }

    fn syms(syll: &str) -> Vec<String> {
        table()
            .parse_syllable(syll)
            .unwrap()
            .into_iter()
            .map(|s| s.sampa)
            .collect()
    }

    #[test]
    fn zhang() {
        let segs = table().parse_syllable("zhang1").unwrap();
        let s: Vec<_> = segs.iter().map(|x| x.sampa.as_str()).collect();
        assert_eq!(s, ["ts`", "a", "N"]);
        assert!(segs.iter().all(|x| x.tone_id == 1 && x.lang == Lang::Cmn));
    }

    #[test]
    fn umlaut_spellings() {
        assert_eq!(syms("lv4"), ["l", "y"]);
        assert_eq!(syms("lü4"), ["l", "y"]);
        assert_eq!(syms("xue2"), ["s", "y", "E"]);
        assert_eq!(syms("qu4"), ["ts_h", "y"]);
        assert_eq!(syms("lu4"), ["l", "u"]);
    }

    #[test]
    fn zero_initials() {
        assert_eq!(syms("yi1"), ["i"]);
        assert_eq!(syms("wu3"), ["u"]);
        assert_eq!(syms("yu2"), ["y"]);
        assert_eq!(syms("ya1"), ["j", "a"]);
        assert_eq!(syms("wang2"), ["w", "a", "N"]);
        assert_eq!(syms("a1"), ["a"]);
        assert_eq!(syms("er4"), ["@`"]);
        assert_eq!(syms("ou5"), ["o", "u"]);
    }

    #[test]
    fn apical_finals() {
        assert_eq!(syms("zi3"), ["ts", "z`"]);
        assert_eq!(syms("shi4"), ["s`", "z`"]);
        assert_eq!(syms("ri4"), ["z`", "z`"]);
        assert_eq!(syms("ci2"), ["ts_h", "z`"]);
    }

    #[test]
    fn tone_digit_required() {
        assert_eq!(
            table().parse_syllable("ma"),
            Err(FrontendError::MissingToneDigit("ma".into()))
        );
        assert!(matches!(
            table().parse_syllable("ma6"),
            Err(FrontendError::UnknownSyllable(_))
        ));
        assert!(matches!(
            table().parse_syllable("ma0"),
            Err(FrontendError::UnknownSyllable(_))
        ));
        assert_eq!(table().parse_syllable("ma5").unwrap()[0].tone_id, 5);
    }

    #[test]
    fn illegal_combinations() {
        for bad in ["ji", "gi1", "si1x", "zhü1", "bv1", "ja1", "byi1", "i1", "ong1", "q1", "1"] {
            assert!(
                matches!(table().parse_syllable(bad), Err(FrontendError::UnknownSyllable(_)) | Err(FrontendError::MissingToneDigit(_))),
                "{bad} should fail"
            );
        }
    }

    #[test]
    fn erhua() {
        assert_eq!(syms("huar1"), ["x", "u", "a`"]);
        assert_eq!(syms("wanr2"), ["w", "a`"]);
        assert_eq!(syms("dianr3"), ["t", "i", "E`"]);
        assert_eq!(syms("kongr4"), ["k_h", "u~`"]);
        assert_eq!(syms("bangr4"), ["p", "a~`"]);
        assert_eq!(syms("haor3"), ["x", "a", "u`"]);
        assert_eq!(syms("ger4"), ["k", "@`"]);
        for bad in ["zhir1", "jir1", "yingr4", "kair1", "err2", "menr2x"] {
            let r = table().parse_syllable(bad);
            assert!(r.is_err(), "{bad} -> {r:?}");
        }
        assert_eq!(
            table().parse_syllable("kair1"),
            Err(FrontendError::UnsupportedErhua("kair1".into()))
        );
    }

    #[test]
    fn split_components() {
        let s = table().split("jiong3").unwrap();
        assert_eq!(s.initial.as_deref(), Some("j"));
        assert_eq!(s.final_, "iong");
        assert_eq!(s.tone, 3);
        assert!(!s.erhua);
        assert_eq!(table().split("ju4").unwrap().final_, "v");
    }
}
