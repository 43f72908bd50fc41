mod common;

use std::collections::BTreeMap;

use iru_core::analysis::{corpus_stats, render_tabular, render_text, CorpusStats, DEFAULT_REMOTE_GAP};
use iru_core::grounding::IruClass;
use iru_core::Transcript;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn corpus() -> Vec<Transcript> {
    let dir = common::fixtures().join("corpus");
    let mut names: Vec<String> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    names.iter().map(|n| common::fixture(&format!("corpus/{n}"))).collect()
}

// Counted by hand when the corpus was written.
fn hand_counted() -> CorpusStats {
    CorpusStats {
        dialogues: 24,
        turns: 72,
        irus: 21,
        with_antecedents: 21,
        remote: 3,
        multi_antecedent: 3,
        self_antecedent: 3,
        other_antecedent: 18,
        rising: 3,
        affirmation_followed: 6,
        rising_affirmation_followed: 3,
        by_class: BTreeMap::from([
            (IruClass::Prompt, 3),
            (IruClass::Repeat, 9),
            (IruClass::Paraphrase, 3),
            (IruClass::ExplicitInference, 3),
            (IruClass::ImplicatureReinforcement, 3),
        ]),
    }
}

#[test]
fn corpus_matches_hand_count() {
    let s = corpus_stats(&corpus(), DEFAULT_REMOTE_GAP).unwrap();
    assert_eq!(s, hand_counted());
    assert_eq!(s.adjacent(), 18);
    assert!((s.remote_fraction().unwrap() - 3.0 / 21.0).abs() < 1e-12);
}

#[test]
fn shuffling_changes_nothing() {
    let base = corpus();
    let want = corpus_stats(&base, DEFAULT_REMOTE_GAP).unwrap();
    let text = render_text(&want, DEFAULT_REMOTE_GAP);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let mut c = base.clone();
        c.shuffle(&mut rng);
        let got = corpus_stats(&c, DEFAULT_REMOTE_GAP).unwrap();
        assert_eq!(render_text(&got, DEFAULT_REMOTE_GAP), text);
        assert_eq!(render_tabular(&got), render_tabular(&want));
    }
}

#[test]
fn wider_gap_makes_fewer_remote() {
    let c = corpus();
    let narrow = corpus_stats(&c, 1).unwrap();
    let wide = corpus_stats(&c, 10).unwrap();
    assert!(wide.remote <= narrow.remote);
    assert_eq!(wide.remote, 0);
    assert_eq!(corpus_stats(&[], 1).unwrap(), CorpusStats::default());
}
