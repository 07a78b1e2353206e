mod common;

use common::*;
use monophrase::phrasetable::{emit_phrase_table_line, parse_phrase_table_line, split_fields, StreamOptions};
use monophrase::scoring::*;
use monophrase::xmap::Direction;
use monophrase::{PhrasePair, ScoreConfig};

#[test]
fn lexical_weight_matches_brute_force_on_the_full_grid() {
    let (checked, max_err) = lexical_weight_grid_error();
    assert!(checked > 10_000);
    assert!(max_err <= 1e-12, "{max_err}");
}

#[test]
fn repeated_links_count_once() {
    let mut sim = WordSimTable::new(Direction::SrcToTgt);
    sim.insert("f0", "e0", 0.2);
    sim.insert("f0", "e1", 0.8);
    let mut p = PhrasePair::new(["f0"], ["e0", "e1"]);
    p.alignment = vec![(0, 0), (0, 0), (0, 1)];
    let w = lexical_weight(&p, &sim, &ScoreConfig::default(), Direction::SrcToTgt).unwrap();
    assert!((w - 0.5).abs() < 1e-15);
}

#[test]
fn emitted_features_stay_in_range() {
    let cfg = ScoreConfig::default();
    let world = ScoringWorld::new(1, 6, 20, &cfg);
    let models = world.models();
    let mut rng = rng(2);
    for _ in 0..2000 {
        let p = world.random_pair(&mut rng);
        let out = rescore_pair(&p, &models, &cfg).unwrap();
        assert_eq!(out.scores.len(), p.scores.len() + 4);
        assert_eq!(out.scores[..p.scores.len()], p.scores[..]);
        for &s in &out.scores[p.scores.len()..] {
            assert!((cfg.cosine_floor..=1.0).contains(&s), "{s}");
        }
        assert_eq!((&out.src, &out.tgt, &out.alignment), (&p.src, &p.tgt, &p.alignment));
    }
}

#[test]
fn replace_mode_emits_exactly_the_enabled_features() {
    use Feature::*;
    let configs: [&[Feature]; 8] = [
        &[],
        &[PhraseDirect],
        &[LexDirect],
        &[PhraseInverse],
        &[LexInverse],
        &[PhraseDirect, PhraseInverse],
        &[PhraseDirect, LexDirect],
        &Feature::ALL,
    ];
    let base = ScoreConfig::default();
    let world = ScoringWorld::new(3, 5, 15, &base);
    let models = world.models();
    let mut rng = rng(4);
    let pairs: Vec<PhrasePair> = (0..200).map(|_| world.random_pair(&mut rng)).collect();
    let all = ScoreConfig {
        mode: Mode::Replace,
        ..base
    };
    for features in configs {
        let cfg = ScoreConfig {
            mode: Mode::Replace,
            features: FeatureSet::of(features),
            ..base
        };
        for p in &pairs {
            let out = rescore_pair(p, &models, &cfg).unwrap();
            assert_eq!(out.scores.len(), features.len());
            // Each kept feature has the value it has in the full set, in order.
            let full = rescore_pair(p, &models, &all).unwrap();
            let want: Vec<f64> = features.iter().map(|f| full.scores[Feature::ALL.iter().position(|g| g == f).unwrap()]).collect();
            assert_eq!(out.scores, want);
        }
    }
}

#[test]
fn feature_lists_parse() {
    let set: FeatureSet = "mono-phrase-direct,mono-lex-direct".parse().unwrap();
    assert_eq!(set.iter().collect::<Vec<_>>(), [Feature::PhraseDirect, Feature::LexDirect]);
    assert_eq!("all".parse::<FeatureSet>().unwrap(), FeatureSet::ALL);
    assert!("mono-bogus".parse::<FeatureSet>().is_err());
    assert_eq!(set.to_string().parse::<FeatureSet>().unwrap(), set);
}

#[test]
fn drop_policy_removes_out_of_vocabulary_pairs() {
    let cfg = ScoreConfig {
        oov_policy: OovPolicy::DropPair,
        ..Default::default()
    };
    let world = ScoringWorld::new(5, 4, 10, &cfg);
    assert!(world.sim_direct.dropped_oov > 0);
    let models = world.models();
    let known = parse_phrase_table_line("f1 f2 ||| e1 ||| 0.5 ||| 0-0 1-0").unwrap();
    let unknown = parse_phrase_table_line("f1 f11 ||| e3 ||| 0.5 ||| 0-0 1-0").unwrap();
    assert!(rescore_pair(&known, &models, &cfg).is_ok());
    assert!(matches!(rescore_pair(&unknown, &models, &cfg), Err(monophrase::Error::Unscorable(_))));
    let floor = ScoreConfig::default();
    let floor_world = ScoringWorld::new(5, 4, 10, &floor);
    assert!(rescore_pair(&unknown, &floor_world.models(), &floor).is_ok());

    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.txt");
    let output = dir.path().join("out.txt");
    let lines = [
        "f1 f2 ||| e1 ||| 0.5 ||| 0-0 1-0",
        "f1 f11 ||| e3 ||| 0.5 ||| 0-0 1-0",
        "garbage",
        "f4 ||| e12 ||| 0.25",
        "f4 ||| e5 ||| 0.25",
    ];
    std::fs::write(&input, lines.join("\n") + "\n").unwrap();
    let report = rescore_table(&input, &output, &models, &cfg, &StreamOptions::default()).unwrap();
    assert_eq!(
        (report.lines_read, report.pairs_in, report.pairs_out, report.dropped),
        (5, 4, 2, 2)
    );
    assert_eq!(report.parse_errors.len(), 1);
    assert_eq!(report.parse_errors[0].line, 3);
    let text = std::fs::read_to_string(&output).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(report.to_key_values().contains("report.dropped = 2"));
}

#[test]
fn append_mode_preserves_original_bytes() {
    let cfg = ScoreConfig::default();
    let world = ScoringWorld::new(6, 4, 10, &cfg);
    let models = world.models();
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.txt");
    let output = dir.path().join("out.txt");
    // Non-canonical number spellings must survive untouched.
    let lines = [
        "f1 f2 ||| e3 ||| 0.50000 1e-1 ||| 0-0 1-0 ||| 3 4 1 |||  odd extra ",
        "f4 ||| e4 ||| ||| ",
        "f5 ||| e6 ||| 0.1",
    ];
    std::fs::write(&input, lines.join("\n") + "\n").unwrap();
    let report = rescore_table(&input, &output, &models, &cfg, &StreamOptions::default()).unwrap();
    assert_eq!(report.pairs_out, 3);
    let text = std::fs::read_to_string(&output).unwrap();
    for (orig, out) in lines.iter().zip(text.lines()) {
        let fields_in = split_fields(orig).unwrap();
        let fields_out = split_fields(out).unwrap();
        let head = format!("{} ||| {} ||| {}", fields_in[0], fields_in[1], fields_in[2]);
        assert!(out.starts_with(&head), "{out}");
        assert_eq!(fields_in[3..], fields_out[3..]);
        let p = parse_phrase_table_line(out).unwrap();
        let before = parse_phrase_table_line(orig).unwrap().scores.len();
        assert_eq!(p.scores.len(), before + 4);
    }
}

#[test]
fn table_output_keeps_input_order_and_matches_pairwise_scoring() {
    let cfg = ScoreConfig {
        mode: Mode::Replace,
        ..Default::default()
    };
    let world = ScoringWorld::new(7, 5, 12, &cfg);
    let models = world.models();
    let mut rng = rng(8);
    let pairs: Vec<PhrasePair> = (0..10_000).map(|_| world.random_pair(&mut rng)).collect();
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.txt");
    let output = dir.path().join("out.txt");
    let text: String = pairs.iter().map(|p| emit_phrase_table_line(p) + "\n").collect();
    std::fs::write(&input, text).unwrap();
    let report = rescore_table(&input, &output, &models, &cfg, &StreamOptions::default()).unwrap();
    assert_eq!(report.pairs_out, pairs.len());
    let out = std::fs::read_to_string(&output).unwrap();
    for (p, line) in pairs.iter().zip(out.lines()) {
        let want = emit_phrase_table_line(&rescore_pair(p, &models, &cfg).unwrap());
        assert_eq!(line, want);
    }
    let floor_total: usize = report.floor_hits.iter().sum();
    assert!(floor_total > 0);
}
