use phonfeat::encoder::{DecodeError, EMBED_DIM};
use phonfeat::{
    embed_utterance, encode_utterance, tokenize_tagged_line, EncodedUtterance, Feature, FeatureSet, Format, Frame,
    Lang, Mode, Resources,
};
use proptest::prelude::*;

fn encode(line: &str, mode: Mode) -> EncodedUtterance {
    let res = Resources::builtin();
    encode_utterance(&res, &tokenize_tagged_line(line).unwrap(), mode).unwrap()
}

fn symbols(e: &EncodedUtterance) -> Vec<&str> {
    e.frames.iter().map(|f| f.symbol.as_str()).collect()
}

#[test]
fn xi_phonemic_and_surface() {
    let ph = encode("cmn: xi1", Mode::Phonemic);
    let su = encode("cmn: xi1", Mode::Surface);
    assert_eq!(symbols(&ph), ["s", "i"]);
    assert_eq!(symbols(&su), ["s\\", "i"]);
    assert!(su.frames.iter().all(|f| f.tone_id == 1 && f.prosody_id == 0 && !f.is_break));
    assert!(su.frames[0].feature_bits.contains(Feature::High));
    assert!(!ph.frames[0].feature_bits.contains(Feature::High));
}

#[test]
fn m_ah_bits() {
    let e = encode("en: M AH0", Mode::Surface);
    assert_eq!(symbols(&e), ["m", "@"]);
    let m = &e.frames[0];
    let idx: Vec<usize> = m.feature_bits.iter().map(|f| f.index()).collect();
    assert_eq!(idx, [0, 2, 4, 8, 12]);
    let tsv = e.to_tsv();
    let row: Vec<&str> = tsv.lines().nth(1).unwrap().split('\t').collect();
    assert_eq!(&row[..6], ["0", "m", "en", "0", "0", "0"]);
    let ones: Vec<usize> = row[6..].iter().enumerate().filter(|(_, b)| **b == "1").map(|(i, _)| i).collect();
    assert_eq!(ones, [0, 2, 4, 8, 12]);
    assert_eq!(row.len(), 6 + 19);
}

#[test]
fn ni_hao_with_break() {
    let e = encode("cmn: ni3 hao3 .", Mode::Surface);
    assert_eq!(symbols(&e), ["n", "i", "x", "a", "u", "."]);
    let brk = e.frames.last().unwrap();
    assert!(brk.is_break && brk.feature_bits.is_empty());
    assert_eq!((brk.tone_id, brk.prosody_id), (0, 2));
    assert_eq!(e.frames[1].tone_id, 3);
}

#[test]
fn prosody_ids() {
    for (line, id) in [("en: HH AY1 ,", 1), ("en: HH AY1 !", 2), ("cmn: ma1？", 3), ("cmn: ma1，", 1)] {
        let e = encode(line, Mode::Surface);
        assert_eq!(e.frames.last().unwrap().prosody_id, id, "{line}");
    }
}

#[test]
fn frame_count_is_segments_plus_punct() {
    let res = Resources::builtin();
    let line = "en: DH IH1 S | cmn: shi4 wo3 de5 shu1 , | en: OW1 K EY1 ?";
    let toks = tokenize_tagged_line(line).unwrap();
    let segs: usize = toks.iter().map(|t| res.frontend.parse_token(t).unwrap().len()).sum();
    let punct = toks.iter().filter(|t| t.trailing_punct.is_some()).count();
    let e = encode_utterance(&res, &toks, Mode::Surface).unwrap();
    assert_eq!(e.frames.len(), segs + punct);
    assert_eq!(punct, 2);
}

#[test]
fn decode_rejects_bad_input() {
    let e = encode("cmn: ni3 .", Mode::Surface);
    let tsv = e.to_tsv();
    let bad = tsv.replace("\t3\t0\t", "\t9\t0\t");
    assert!(matches!(EncodedUtterance::deserialize(&bad, Format::Tsv), Err(DecodeError::Invalid { .. })));
    let truncated: String = tsv.lines().take(2).map(|l| format!("{}\n", &l[..l.len() - 2])).collect();
    assert!(EncodedUtterance::deserialize(&truncated, Format::Tsv).is_err());
    assert!(EncodedUtterance::deserialize("{\"frames\": [{}]}", Format::Json).is_err());
}

#[test]
fn embedding_shape_and_determinism() {
    let e = encode("en: HH AH0 L OW1 | cmn: ni3 hao3 .", Mode::Surface);
    let a = embed_utterance(&e, 7);
    let b = embed_utterance(&e, 7);
    let c = embed_utterance(&e, 8);
    assert_eq!((a.rows(), a.cols()), (e.frames.len(), EMBED_DIM));
    assert_eq!(a.as_slice().len(), e.frames.len() * 256);
    assert_eq!(a, b);
    assert_ne!(a.as_slice(), c.as_slice());
    assert!(a.as_slice().iter().all(|x| x.is_finite()));
    // Break frame: zero feature block.
    assert!(a.row(e.frames.len() - 1)[..192].iter().all(|x| *x == 0.0));
}

fn arb_frame() -> impl Strategy<Value = Frame> {
    let sym = prop::sample::select(vec!["p", "ts\\_h", "a~`", "3`", "{", "@`"]);
    let lang = prop::sample::select(vec![Lang::En, Lang::Cmn]);
    let seg = (sym, lang.clone(), 0u8..6, 0u32..1 << 19).prop_map(|(s, lang, tone_id, bits)| Frame {
        symbol: s.to_string(),
        lang,
        is_break: false,
        tone_id,
        prosody_id: 0,
        feature_bits: FeatureSet::from_bits(bits).unwrap(),
    });
    let brk = (prop::sample::select(vec![",", ".", "?", "！", "。"]), lang, 1u8..4).prop_map(|(s, lang, p)| Frame {
        symbol: s.to_string(),
        lang,
        is_break: true,
        tone_id: 0,
        prosody_id: p,
        feature_bits: FeatureSet::EMPTY,
    });
    prop_oneof![3 => seg, 1 => brk]
}

proptest! {
    #[test]
    fn round_trip(frames in prop::collection::vec(arb_frame(), 0..20)) {
        let e = EncodedUtterance { frames };
        for fmt in [Format::Tsv, Format::Json] {
            let text = e.serialize(fmt);
            prop_assert_eq!(&EncodedUtterance::deserialize(&text, fmt).unwrap(), &e);
        }
    }

    #[test]
    fn embedding_pure(frames in prop::collection::vec(arb_frame(), 0..8), seed in any::<u64>()) {
        let e = EncodedUtterance { frames };
        prop_assert_eq!(embed_utterance(&e, seed), embed_utterance(&e, seed));
    }
}
