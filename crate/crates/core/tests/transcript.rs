mod common;

use std::path::PathBuf;

use iru_core::transcript::{parse, serialize, ParseErrorKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn dlg_files(dir: PathBuf) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "dlg"))
        .collect();
    v.sort();
    v
}

fn well_formed() -> Vec<PathBuf> {
    let root = common::fixtures();
    let mut all = dlg_files(root.clone());
    all.extend(dlg_files(root.join("corpus")));
    all.extend(dlg_files(root.join("semantic")));
    all
}

#[test]
fn parse_serialize_round_trip_on_fixtures() {
    let files = well_formed();
    assert!(files.len() >= 32);
    for f in files {
        let t = parse(&std::fs::read_to_string(&f).unwrap()).unwrap();
        let text = serialize(&t);
        assert_eq!(parse(&text).unwrap(), t, "{}", f.display());
        assert_eq!(serialize(&parse(&text).unwrap()), text, "{}", f.display());
    }
}

#[test]
fn random_transcripts_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let t = common::random_transcript(&mut rng, 15);
        let text = serialize(&t);
        assert_eq!(parse(&text).unwrap(), t, "{text}");
    }
}

type Expected = (&'static str, usize, fn(&ParseErrorKind) -> bool);

#[test]
fn malformed_fixtures_report_lines() {
    let expected: [Expected; 8] = [
        ("empty.dlg", 1, |k| matches!(k, ParseErrorKind::EmptyTranscript)),
        ("missing_header.dlg", 1, |k| matches!(k, ParseErrorKind::MissingHeader)),
        ("dangling_antecedent.dlg", 10, |k| {
            matches!(k, ParseErrorKind::DanglingAntecedent(_))
        }),
        ("duplicate_utterance.dlg", 10, |k| {
            matches!(k, ParseErrorKind::DuplicateUtterance(_))
        }),
        ("unknown_field.dlg", 9, |k| matches!(k, ParseErrorKind::UnknownField(_))),
        ("bad_proposition.dlg", 9, |k| {
            matches!(k, ParseErrorKind::BadPropositionSyntax(_))
        }),
        ("prompt_with_content.dlg", 16, |k| {
            matches!(k, ParseErrorKind::InvalidValue { .. })
        }),
        ("unknown_participant.dlg", 7, |k| {
            matches!(k, ParseErrorKind::InvalidValue { .. })
        }),
    ];
    let dir = common::fixtures().join("malformed");
    assert_eq!(dlg_files(dir.clone()).len(), expected.len());
    for (name, line, kind) in expected {
        let errs = parse(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap_err();
        let first = &errs.0[0];
        assert_eq!(first.line, line, "{name}: {errs}");
        assert!(kind(&first.kind), "{name}: {errs}");
    }
}
