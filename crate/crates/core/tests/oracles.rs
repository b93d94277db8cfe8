use bri_core::analysis::{complexity_counts, convergence_slope, n8_series, sin_experiment};
use bri_core::codec::NodeScheme;
use bri_core::lr::{
    lr_iteration, lr_setup, synthetic_regression, train, LearningRate, LrConfig, SyntheticDesign, TrainScheme,
};
use bri_core::sim::{sample_arrivals, Arrivals, DelayModel, ExtraDelay, KPolicy, SchemeModel, SimScenario, Simulator};
use bri_core::*;

/// Floater–Hormann interpolant straight from its definition: blending
/// functions `φ_i(x) = Π_{j<i}(x − x_j) Π_{k>i+d}(x_k − x)` weighting local
/// Lagrange polynomials `p_i` through `x_i..x_{i+d}`.
fn fh_oracle(nodes: &[f64], values: &[f64], d: usize, x: f64) -> f64 {
    let n = nodes.len() - 1;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..=n - d {
        let mut phi = 1.0;
        for xj in &nodes[..i] {
            phi *= x - xj;
        }
        for xk in &nodes[i + d + 1..] {
            phi *= xk - x;
        }
        let mut p = 0.0;
        for k in i..=i + d {
            let mut l = 1.0;
            for j in i..=i + d {
                if j != k {
                    l *= (x - nodes[j]) / (nodes[k] - nodes[j]);
                }
            }
            p += l * values[k];
        }
        num += phi * p;
        den += phi;
    }
    num / den
}

#[test]
fn interpolant_matches_definition() {
    let nodes: Vec<f64> = (0..12)
        .map(|i| -1.0 + 0.17 * i as f64 + 0.01 * (i * i) as f64)
        .collect();
    let values: Vec<f64> = nodes.iter().map(|x| libm::exp(*x) * libm::cos(3.0 * x)).collect();
    for d in 0..12 {
        let r = FhInterpolant::from_scalars(&nodes, &values, d).unwrap();
        for t in 0..50 {
            let x = -0.97 + 0.0531 * t as f64;
            let want = fh_oracle(&nodes, &values, d, x);
            let got = r.eval_scalar(x).unwrap();
            assert!(
                (got - want).abs() <= 1e-11 * (1.0 + want.abs()),
                "d={d} x={x}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn sin_d0_matches_berrut_oracle() {
    let rep = sin_experiment(15, 0, (-8.0, 8.0), 2000, NodeScheme::Equispaced).unwrap();
    let nodes: Vec<f64> = (0..15).map(|i| -8.0 + 16.0 * i as f64 / 14.0).collect();
    let mut sq = 0.0;
    let mut max_abs: f64 = 0.0;
    for g in 0..2000 {
        let x = -8.0 + 16.0 * g as f64 / 1999.0;
        let h = match nodes.iter().position(|&v| v == x) {
            Some(i) => libm::sin(nodes[i]),
            None => {
                let mut num = 0.0;
                let mut den = 0.0;
                for (i, &xi) in nodes.iter().enumerate() {
                    let w = if i % 2 == 0 { 1.0 } else { -1.0 } / (x - xi);
                    num += w * libm::sin(xi);
                    den += w;
                }
                num / den
            }
        };
        let e = h - libm::sin(x);
        sq += e * e;
        max_abs = max_abs.max(e.abs());
    }
    assert!((rep.mse - sq / 2000.0).abs() <= 1e-12);
    assert!((rep.max_abs - max_abs).abs() <= 1e-12);
}

#[test]
fn mse_values_track_reported_table() {
    let r = sin_experiment(20, 2, (-8.0, 8.0), 2000, NodeScheme::Equispaced).unwrap();
    assert!(r.mse <= 1e-4);
    assert!(r.mse > 3.304211e-8 && r.mse < 3.304211e-4);
    let r = sin_experiment(25, 5, (-8.0, 8.0), 2000, NodeScheme::Equispaced).unwrap();
    assert!(r.mse > 1.962853e-11 && r.mse < 1.962853e-7);
    let r = sin_experiment(10, 0, (-8.0, 8.0), 2000, NodeScheme::Equispaced).unwrap();
    assert!(r.mse > 2.6e-4 && r.mse < 2.6e-2);
}

#[test]
fn eight_node_series_improves_tenfold() {
    let series = n8_series((-1.0, 1.0), 2000, NodeScheme::Equispaced).unwrap();
    let best = series.iter().map(|r| r.max_abs).fold(f64::INFINITY, f64::min);
    assert!(best * 10.0 <= series[0].max_abs);
}

#[test]
fn convergence_rate_follows_blending_degree() {
    let ns = [20, 40, 80, 160];
    for d in 1..=3 {
        let errs: Vec<f64> = ns
            .iter()
            .map(|&n| {
                sin_experiment(n, d, (-8.0, 8.0), 2000, NodeScheme::Equispaced)
                    .unwrap()
                    .max_abs
            })
            .collect();
        let slope = convergence_slope(&ns, &errs).unwrap();
        assert!(slope <= -((d + 1) as f64) + 0.5, "d={d} slope={slope}");
    }
}

#[test]
fn blended_multiplies_within_twice_the_count_formula() {
    let (m, d, s, t) = (20, 3, 50, 50);
    let nodes: Vec<f64> = (0..=m).map(|i| i as f64).collect();
    let values: Vec<Block> = (0..=m)
        .map(|i| Block::from_fn(s, t, |r, c| (i + r + c) as f64))
        .collect();
    let r = FhInterpolant::new(&nodes, values, d).unwrap();
    let mut muls = 0u64;
    r.eval_counted(7.5, &mut muls).unwrap();
    let formula = complexity_counts(m, d, s, t, 1, d + 1).unwrap().encode_per_worker;
    let ratio = muls as f64 / formula as f64;
    assert!((0.5..=2.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn lcc_waits_for_stragglers_while_bri_does_not() {
    let model = DelayModel {
        base_compute: 1.0,
        jitter: 0.1,
        latency: 0.0,
        straggler_extra: ExtraDelay::Uniform { lo: 100.0, hi: 200.0 },
    };
    let mut sc = SimScenario::new(20, 9, 9);
    sc.delay = model;
    sc.k_policy = KPolicy::FirstK(11);
    sc.block_rows = 6;
    sc.block_cols = 4;
    sc.trials = 10;
    sc.schemes = vec![SchemeModel::new(Scheme::Bri), SchemeModel::new(Scheme::Lcc)];
    let sim = Simulator::new(sc).unwrap();
    assert_eq!(scheme_threshold(Scheme::Lcc, 9, 2), Threshold::Fixed(19));
    for trial in 0..10 {
        let arrivals: Arrivals = sim.arrivals(trial);
        let mut straggler_times: Vec<f64> = (0..20)
            .filter(|&i| arrivals.is_straggler[i])
            .map(|i| arrivals.times[i])
            .collect();
        straggler_times.sort_by(f64::total_cmp);
        let healthy_max = (0..20)
            .filter(|&i| !arrivals.is_straggler[i])
            .map(|i| arrivals.times[i])
            .fold(0.0, f64::max);
        let recs = sim.run_trial(trial).unwrap();
        let lcc = recs.iter().find(|r| r.scheme == Scheme::Lcc).unwrap();
        let bri = recs.iter().find(|r| r.scheme == Scheme::Bri).unwrap();
        assert_eq!(lcc.waiting_time, straggler_times[7]);
        assert_eq!(bri.waiting_time, healthy_max);
        assert!(bri.waiting_time < straggler_times[0]);
        assert_eq!(bri.k_used, 11);
    }
}

#[test]
fn ep_threshold_for_three_blocks() {
    assert_eq!(scheme_threshold(Scheme::Ep, 2, 2), Threshold::Fixed(9));
}

#[test]
fn straggler_ids_are_uniform() {
    let model = DelayModel::flop_proportional(10, 10);
    let mut counts = [0usize; 10];
    for trial in 0..4000 {
        let a = sample_arrivals(&model, 10, 3, &mut rng::stream_rng(11, trial));
        for (c, s) in counts.iter_mut().zip(&a.is_straggler) {
            *c += *s as usize;
        }
    }
    for c in counts {
        assert!((1100..=1300).contains(&c), "{counts:?}");
    }
}

#[test]
#[allow(clippy::needless_range_loop)]
fn centralized_training_is_textbook_gradient_descent() {
    let (a, y) = synthetic_regression(64, 5, 0.5, SyntheticDesign::Iid, 3).unwrap();
    let mut cfg = LrConfig::new(4, 8, 2, 1);
    cfg.iterations = 30;
    cfg.learning_rate = LearningRate::Fixed(0.004);
    let (p, st) = lr_setup(&a, &y, &cfg).unwrap();
    let log = train(&p, &st, &cfg, TrainScheme::Centralized).unwrap();

    let (s, t) = a.shape();
    let mut aty = vec![0.0; t];
    for r in 0..s {
        for c in 0..t {
            aty[c] += a.get(r, c) * y[r];
        }
    }
    let mut w = vec![0.0; t];
    for _ in 0..30 {
        let pred: Vec<f64> = (0..s).map(|r| (0..t).map(|c| a.get(r, c) * w[c]).sum()).collect();
        let mut g = vec![0.0; t];
        for r in 0..s {
            for c in 0..t {
                g[c] += a.get(r, c) * pred[r];
            }
        }
        for c in 0..t {
            w[c] -= 0.004 * (g[c] - aty[c]);
        }
    }
    assert_eq!(log.w, w);
}

#[test]
fn loss_decreases_for_small_rate() {
    let (a, y) = synthetic_regression(200, 6, 0.3, SyntheticDesign::Iid, 9).unwrap();
    let mut cfg = LrConfig::new(4, 10, 0, 0);
    cfg.iterations = 40;
    cfg.learning_rate = LearningRate::PowerIteration { scale: 0.5 };
    let (p, st) = lr_setup(&a, &y, &cfg).unwrap();
    let log = train(&p, &st, &cfg, TrainScheme::Centralized).unwrap();
    for w in log.rows.windows(2) {
        assert!(w[1].loss <= w[0].loss);
    }
}

#[test]
fn exact_decode_regime_reproduces_gradient() {
    let (a, y) = synthetic_regression(400, 8, 0.1, SyntheticDesign::Iid, 5).unwrap();
    let mut cfg = LrConfig::new(2, 20, 0, 1);
    cfg.d_decode = Some(2);
    let (p, mut st) = lr_setup(&a, &y, &cfg).unwrap();
    let all: Vec<usize> = (0..20).collect();
    for _ in 0..5 {
        let stats = lr_iteration(&p, &mut st, 2, &all).unwrap();
        assert!(stats.grad_error_rel <= 1e-3, "{}", stats.grad_error_rel);
    }
}

#[test]
fn identity_decode_recovers_partitions() {
    let (a, y) = synthetic_regression(
        90,
        4,
        0.0,
        SyntheticDesign::Replicated {
            parts: 3,
            perturbation: 0.0,
        },
        2,
    )
    .unwrap();
    let cfg = LrConfig::new(3, 12, 0, 2);
    let (p, _) = lr_setup(&a, &y, &cfg).unwrap();
    let results: Vec<WorkerResult> = p
        .shares
        .iter()
        .map(|s| WorkerResult {
            worker_id: s.worker_id,
            z: s.z,
            block: s.block.clone(),
            arrival_time: 0.0,
        })
        .collect();
    let decoded = decode(&results, &p.nodes, 2, p.nodes.alphas()).unwrap();
    for (d, b) in decoded.iter().zip(&p.blocks) {
        assert!(d.sub(b).unwrap().max_abs() <= 1e-12 * (1.0 + b.max_abs()));
    }
}

#[test]
fn coded_training_with_stragglers_tracks_centralized() {
    let (a, y) = synthetic_regression(
        4096,
        16,
        1.0,
        SyntheticDesign::Replicated {
            parts: 10,
            perturbation: 0.1,
        },
        1,
    )
    .unwrap();
    let mut cfg = LrConfig::new(10, 20, 9, 2);
    cfg.delay = DelayModel::flop_proportional(410, 16);
    let (p, st) = lr_setup(&a, &y, &cfg).unwrap();
    let central = train(&p, &st, &cfg, TrainScheme::Centralized).unwrap().final_loss();
    let coded = train(&p, &st, &cfg, TrainScheme::Bri).unwrap();
    assert!(
        coded.final_loss() <= 1.05 * central,
        "{} vs {central}",
        coded.final_loss()
    );
    assert!(coded.rows.iter().all(|r| r.k_used == 11));
}

#[test]
fn uncoded_training_is_slower_than_bri() {
    let (a, y) = synthetic_regression(2000, 20, 1.0, SyntheticDesign::Iid, 4).unwrap();
    let mut cfg = LrConfig::new(10, 20, 9, 0);
    cfg.delay = DelayModel::flop_proportional(200, 20);
    cfg.iterations = 20;
    let (p, st) = lr_setup(&a, &y, &cfg).unwrap();
    let bri = train(&p, &st, &cfg, TrainScheme::Bri).unwrap();
    let unc = train(&p, &st, &cfg, TrainScheme::Uncoded).unwrap();
    assert!(bri.total_time() < unc.total_time());
}

#[test]
fn coded_aty_round_is_close_to_direct() {
    let (a, y) = synthetic_regression(300, 4, 0.1, SyntheticDesign::Iid, 8).unwrap();
    let mut cfg = LrConfig::new(2, 20, 0, 1);
    cfg.d_decode = Some(2);
    let (_, direct) = lr_setup(&a, &y, &cfg).unwrap();
    cfg.coded_aty = true;
    let (_, coded) = lr_setup(&a, &y, &cfg).unwrap();
    let num: f64 = direct.aty.iter().zip(&coded.aty).map(|(p, q)| (p - q) * (p - q)).sum();
    let den: f64 = direct.aty.iter().map(|p| p * p).sum();
    assert!((num / den).sqrt() <= 1e-3);
}
