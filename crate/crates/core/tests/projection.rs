mod common;

use std::time::Instant;

use common::*;
use monophrase::synthetic::{make_synthetic, random_rotation, SyntheticConfig};
use monophrase::xmap::*;
use monophrase::vecspace::norm;
use rand::Rng;

#[test]
fn planted_matrix_is_recovered_exactly() {
    let mut rng = rng(11);
    let w_star = gaussian_matrix(200, 200, &mut rng);
    let data = planted_pairs(&w_star, 500, 0.0, &mut rng);
    let start = Instant::now();
    let w = fit_closed_form(&data, 0.0).unwrap();
    let elapsed = start.elapsed();
    let err = w.frobenius_distance(&w_star);
    assert!(err < 1e-6, "Frobenius error {err}");
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
}

#[test]
fn rectangular_planted_matrix() {
    let mut rng = rng(12);
    let w_star = gaussian_matrix(30, 17, &mut rng);
    let data = planted_pairs(&w_star, 40, 0.0, &mut rng);
    let w = fit_closed_form(&data, 0.0).unwrap();
    assert!(w.frobenius_distance(&w_star) < 1e-8);
}

#[test]
fn sgd_matches_closed_form_on_noiseless_data() {
    let mut rng = rng(21);
    let w_star = gaussian_matrix(50, 50, &mut rng);
    let data = planted_pairs(&w_star, 500, 0.0, &mut rng);
    let closed = fit_closed_form(&data, 0.0).unwrap();
    let sgd = fit_sgd(&data, 100, 0.5, 3).unwrap();
    let (lc, ls) = (
        closed.report.as_ref().unwrap().final_loss,
        sgd.report.as_ref().unwrap().final_loss,
    );
    assert!((ls - lc).abs() < 1e-3, "closed {lc} sgd {ls}");
}

#[test]
fn sgd_loss_within_one_percent_on_noisy_data() {
    for seed in 0..3 {
        let mut rng = rng(100 + seed);
        let w_star = gaussian_matrix(50, 50, &mut rng);
        let data = planted_pairs(&w_star, 500, 0.01, &mut rng);
        let closed = fit_closed_form(&data, 0.0).unwrap();
        let sgd = fit_sgd(&data, 100, 0.5, seed).unwrap();
        let lc = closed.report.unwrap().final_loss;
        let ls = sgd.report.unwrap().final_loss;
        assert!(lc <= ls + 1e-6, "closed form must be optimal: {lc} vs {ls}");
        assert!((ls - lc) / lc < 0.01, "seed {seed}: closed {lc} sgd {ls}");
    }
}

#[test]
fn sgd_is_deterministic() {
    let mut rng = rng(5);
    let w_star = gaussian_matrix(8, 6, &mut rng);
    let data = planted_pairs(&w_star, 40, 0.1, &mut rng);
    let a = fit_sgd(&data, 20, 0.5, 9).unwrap();
    let b = fit_sgd(&data, 20, 0.5, 9).unwrap();
    assert_eq!(a.rows(), b.rows());
}

#[test]
fn per_pair_gradient_matches_finite_differences() {
    let mut rng = rng(31);
    let m = gaussian_matrix(20, 15, &mut rng);
    let x: Vec<f64> = (0..20).map(|_| rng.random_range(-1.0..1.0)).collect();
    let z: Vec<f64> = (0..15).map(|_| rng.random_range(-1.0..1.0)).collect();
    let (_, grad) = pair_loss_and_gradient(&m, &x, &z).unwrap();
    let h = 1e-4;
    for _ in 0..20 {
        let k = rng.random_range(0..m.rows().len());
        let bump = |delta: f64| {
            let mut rows = m.rows().to_vec();
            rows[k] += delta;
            let p = ProjectionMatrix::from_rows(20, 15, rows, m.direction, m.level).unwrap();
            pair_loss_and_gradient(&p, &x, &z).unwrap().0
        };
        let numeric = (bump(h) - bump(-h)) / (2.0 * h);
        let rel = (numeric - grad[k]).abs() / numeric.abs().max(grad[k].abs()).max(1e-8);
        assert!(rel < 1e-3, "coordinate {k}: numeric {numeric} analytic {}", grad[k]);
    }
}

#[test]
fn rotations_preserve_norm() {
    let mut rng = rng(41);
    let d = 25;
    let r = random_rotation(d, &mut rng);
    // Row-major R acting as z = R·x is the stored matrix Rᵀ.
    let mut rows = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            rows[i * d + j] = r[j * d + i];
        }
    }
    let m = ProjectionMatrix::from_rows(d, d, rows, Direction::SrcToTgt, Level::Word).unwrap();
    for _ in 0..10 {
        let x: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = norm(&x);
        let unit: Vec<f64> = x.iter().map(|v| v / n).collect();
        let projected = m.project(&unit).unwrap();
        assert!((norm(&projected) - 1.0).abs() < 1e-9);
    }
}

fn induction_precision(noise: f64, seed: u64) -> f64 {
    let world = make_synthetic(&SyntheticConfig {
        dim: 50,
        vocab: 200,
        noise,
        seed,
        ..Default::default()
    })
    .unwrap();
    let seeds = SeedPairs::new(world.gold.clone(), Provenance::Dictionary);
    let m = train_projection_closed_form(&seeds, &world.src, &world.tgt, 0.0).unwrap();
    evaluate_induction(&m, &world.src, &world.tgt, &world.gold, 1)
        .unwrap()
        .precision()
}

#[test]
fn rotated_world_induction() {
    for seed in 0..5 {
        assert_eq!(induction_precision(0.0, seed), 1.0);
    }
    let mean: f64 = (0..5).map(|s| induction_precision(0.05, s)).sum::<f64>() / 5.0;
    assert!(mean >= 0.9, "precision@1 {mean}");
}

#[test]
fn identity_induction_returns_the_token() {
    let world = make_synthetic(&SyntheticConfig {
        dim: 10,
        vocab: 30,
        ..Default::default()
    })
    .unwrap();
    let id = ProjectionMatrix::identity(10, Direction::SrcToTgt, Level::Word);
    for token in world.src.tokens() {
        let top = induce_translations(&id, &world.src, &world.src, token, 1).unwrap();
        assert_eq!(&top[0].0, token);
        assert!((top[0].1 - 1.0).abs() < 1e-12);
    }
    // k beyond the vocabulary returns the full ranking.
    let all = induce_translations(&id, &world.src, &world.src, "s00000", 1000).unwrap();
    assert_eq!(all.len(), 30);
}

#[test]
fn source_scaling_scales_the_matrix_inversely() {
    let world = make_synthetic(&SyntheticConfig {
        dim: 12,
        vocab: 60,
        noise: 0.1,
        seed: 3,
        ..Default::default()
    })
    .unwrap();
    let seeds = SeedPairs::new(world.gold.clone(), Provenance::Dictionary);
    let m = train_projection_closed_form(&seeds, &world.src, &world.tgt, 0.0).unwrap();
    let s = 3.5;
    let scaled_src = world.src.scaled(s);
    let ms = train_projection_closed_form(&seeds, &scaled_src, &world.tgt, 0.0).unwrap();
    for (a, b) in m.rows().iter().zip(ms.rows()) {
        assert!((a - b * s).abs() < 1e-9 * a.abs().max(1.0));
    }
    for token in ["s00001", "s00017", "s00042"] {
        let r1 = induce_translations(&m, &world.src, &world.tgt, token, 5).unwrap();
        let r2 = induce_translations(&ms, &scaled_src, &world.tgt, token, 5).unwrap();
        let n1: Vec<&String> = r1.iter().map(|r| &r.0).collect();
        let n2: Vec<&String> = r2.iter().map(|r| &r.0).collect();
        assert_eq!(n1, n2);
    }
}

#[test]
fn ranking_ignores_rescaling_a_target_vector() {
    let world = make_synthetic(&SyntheticConfig {
        dim: 12,
        vocab: 40,
        noise: 0.3,
        seed: 8,
        ..Default::default()
    })
    .unwrap();
    let seeds = SeedPairs::new(world.gold.clone(), Provenance::Dictionary);
    let m = train_projection_closed_form(&seeds, &world.src, &world.tgt, 1e-3).unwrap();
    let before = induce_translations(&m, &world.src, &world.tgt, "s00005", 40).unwrap();
    let rescaled = monophrase::VectorSpace::from_entries(
        12,
        monophrase::vecspace::SpaceKind::Word,
        world.tgt.iter().map(|(t, v)| {
            let f = if t == "t00009" { 7.0 } else { 1.0 };
            (t.to_string(), v.iter().map(|x| x * f).collect::<Vec<f64>>())
        }),
    )
    .unwrap()
    .0;
    let after = induce_translations(&m, &world.src, &rescaled, "s00005", 40).unwrap();
    let names = |r: &[(String, f64)]| r.iter().map(|x| x.0.clone()).collect::<Vec<_>>();
    assert_eq!(names(&before), names(&after));
}

#[test]
fn phrase_level_seeds_learn_the_rotation() {
    let world = make_synthetic(&SyntheticConfig {
        dim: 10,
        vocab: 80,
        sentences: 200,
        seed: 4,
        ..Default::default()
    })
    .unwrap();
    let seeds = SeedPairs::new(world.sentence_pairs.clone(), Provenance::ParallelShortSentences);
    let m = train_projection_closed_form(&seeds, &world.src, &world.tgt, 0.0).unwrap();
    assert_eq!(m.level, Level::Phrase);
    let report = m.report.as_ref().unwrap();
    assert!(report.final_loss < 1e-20, "{report}");
    let inverse = train_projection_closed_form(&seeds.reversed(), &world.tgt, &world.src, 0.0).unwrap();
    assert_eq!(inverse.direction, Direction::TgtToSrc);
}
