use phonfeat::accent::{AccentError, TABLE_DEPTH};
use phonfeat::{
    project_segment, project_utterance, substitution_table, tokenize_tagged_line, Lang, Resources, TonePolicy,
    Weights,
};
use proptest::prelude::*;

fn project(line: &str, from: Lang, to: Lang, tp: TonePolicy) -> phonfeat::accent::ProjectionReport {
    let res = Resources::builtin();
    project_utterance(&res, &tokenize_tagged_line(line).unwrap(), from, to, tp, Weights::default()).unwrap()
}

#[test]
fn ni_hao_into_english() {
    let rep = project("cmn: ni3 hao3", Lang::Cmn, Lang::En, TonePolicy::Drop);
    assert_eq!(rep.target_symbols(), ["n", "i", "h", "A", "u"]);
    assert!(rep.segments.iter().all(|s| s.tone_id == 0));
    assert_eq!(rep.tone_policy_applied, TonePolicy::Drop);
    let kept = project("cmn: ni3 hao3", Lang::Cmn, Lang::En, TonePolicy::Preserve);
    assert!(kept.segments.iter().all(|s| s.tone_id == 3));
}

#[test]
fn english_into_mandarin() {
    let rep = project("en: DH AH0 M", Lang::En, Lang::Cmn, TonePolicy::Drop);
    assert_eq!(rep.target_symbols(), ["z`", "@", "m"]);
    let rep = project("en: P AA1", Lang::En, Lang::Cmn, TonePolicy::Drop);
    assert_eq!(rep.segments[0].target, "p");
}

#[test]
fn surface_allophones_are_sources() {
    let rep = project("cmn: xi1", Lang::Cmn, Lang::Cmn, TonePolicy::Preserve);
    assert_eq!(rep.target_symbols(), ["s\\", "i"]);
}

#[test]
fn wrong_language_token_rejected() {
    let res = Resources::builtin();
    let toks = tokenize_tagged_line("en: HH AY1").unwrap();
    let err = project_utterance(&res, &toks, Lang::Cmn, Lang::En, TonePolicy::Drop, Weights::default());
    assert!(matches!(err, Err(AccentError::LanguageMismatch { token: 0, .. })));
}

/// Every entry projects onto itself within its own inventory.
#[test]
fn self_identity() {
    let res = Resources::builtin();
    for inv in [&res.en, &res.cmn] {
        for e in inv.entries() {
            let best = project_segment(e, inv, Weights::default()).unwrap();
            assert_eq!(best.entry.sampa, e.sampa);
        }
    }
}

#[test]
fn tables_are_total_and_stable() {
    let res = Resources::builtin();
    for (src, tgt) in [(&res.en, &res.cmn), (&res.cmn, &res.en)] {
        let t = substitution_table(src, tgt, Weights::default()).unwrap();
        assert_eq!(t.rows.len(), src.phonemes().count());
        for row in &t.rows {
            assert_eq!(row.ranked.len(), TABLE_DEPTH);
            for (sym, _) in &row.ranked {
                tgt.lookup(sym).unwrap();
            }
            for w in row.ranked.windows(2) {
                assert!(w[0].1.score >= w[1].1.score);
            }
        }
        let again = substitution_table(src, tgt, Weights::default()).unwrap();
        assert_eq!(t.to_tsv(), again.to_tsv());
    }
}

#[test]
fn directions_differ() {
    let res = Resources::builtin();
    let ec = substitution_table(&res.en, &res.cmn, Weights::default()).unwrap();
    let ce = substitution_table(&res.cmn, &res.en, Weights::default()).unwrap();
    // Some symbol present in both inventories maps back to something else.
    let asym = ec.rows.iter().any(|r| {
        let there = &r.ranked[0].0;
        ce.best(there).is_some_and(|back| back != r.source)
    });
    assert!(asym);
    assert_eq!(ce.best("p_h"), Some("p"));
    assert_eq!(ce.best("x"), Some("h"));
}

proptest! {
    /// Scaling both weights by the same positive factor keeps every ranking.
    #[test]
    fn positive_scaling_preserves_best(k in 0.01f64..100.0) {
        let res = Resources::builtin();
        let base = substitution_table(&res.en, &res.cmn, Weights::default()).unwrap();
        let scaled = substitution_table(&res.en, &res.cmn, Weights::new(k, 2.0 * k)).unwrap();
        for (a, b) in base.rows.iter().zip(&scaled.rows) {
            let sa: Vec<_> = a.ranked.iter().map(|(s, _)| s).collect();
            let sb: Vec<_> = b.ranked.iter().map(|(s, _)| s).collect();
            prop_assert_eq!(sa, sb);
        }
    }
}
