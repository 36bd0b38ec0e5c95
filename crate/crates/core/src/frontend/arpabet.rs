use std::collections::HashMap;

use super::{split_segments, table_rows, FrontendError, Segment};
use crate::inventory::Lang;

/// ARPABET code to SAMPA segments. Diphthongs map to two segments.
#[derive(Debug, Clone)]
pub struct ArpabetTable {
    map: HashMap<String, Vec<String>>,
    order: Vec<String>,
}

impl ArpabetTable {
    pub fn parse(text: &str) -> Result<ArpabetTable, FrontendError> {
        let mut map = HashMap::new();
        let mut order = Vec::new();
        for row in table_rows(text, "arpabet_to_sampa.tsv", 2) {
            let (line, cols) = row?;
            let code = cols[0].to_ascii_uppercase();
            if map.insert(code.clone(), split_segments(&cols[1])).is_some() {
                return Err(FrontendError::Table {
                    file: "arpabet_to_sampa.tsv",
                    line,
                    reason: format!("duplicate code {code}"),
                });
            }
            order.push(code);
        }
        Ok(ArpabetTable { map, order })
    }

    /// Codes in file order.
    pub fn codes(&self) -> &[String] {
        &self.order
    }

    pub fn get(&self, code: &str) -> Option<&[String]> {
        self.map.get(code).map(Vec::as_slice)
    }

    /// Parses one whitespace-separated ARPABET word. Stress digits 0-2 on
    /// vowel codes are dropped.
    pub fn parse_token(&self, token: &str) -> Result<Vec<Segment>, FrontendError> {
        let mut out = Vec::new();
        for raw in token.split_whitespace() {
            let upper = raw.to_ascii_uppercase();
            let code = strip_stress(&upper);
            let segs = self
                .map
                .get(code)
                .ok_or_else(|| FrontendError::UnknownArpabetCode(raw.to_string()))?;
            out.extend(segs.iter().map(|s| Segment::new(s.as_str(), Lang::En, 0)));
        }
        Ok(out)
    }
}

fn strip_stress(code: &str) -> &str {
    let is_vowel = code.starts_with(['A', 'E', 'I', 'O', 'U']);
    match code.strip_suffix(['0', '1', '2']) {
        Some(base) if is_vowel => base,
        _ => code,
    }
}
