//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use stvqm::distortion::{inject_distortion, synth_test_scene, DistortionKind, DistortionSpec, SceneKind};
use stvqm::divergence::{jsd, kld};
use stvqm::eval::{
    correlation_stats, evaluate, krasula_analysis, welch_t_test, DatasetManifest, DeltaBasis, Direction, EvalConfig,
    ManifestEntry, PairLabel, Significance,
};
use stvqm::fusion::{fit_params, FitConfig};
use stvqm::keypoints::{MatchPair, MatchingMatrix};
use stvqm::sketch::{
    generate_synthetic_corpus, load_codebook, save_codebook, st_vector, train_default_codebook, StCodebook, N_CLASSES,
};
use stvqm::spatial::{score_matching_matrix, st_iqm_sequence};
use stvqm::temporal::TemporalVector;
use stvqm::video::{validate_pair, Frame, PairedSequences, Sequence};
use stvqm::{score_pair, Fusion, MetricConfig};

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn secs(d: Duration) -> String {
    format!("{:.1} s", d.as_secs_f64())
}

fn pair(a: &Sequence, b: &Sequence) -> PairedSequences {
    validate_pair(a.clone(), b.clone()).unwrap()
}

// ---------------------------------------------------------------------------
// independent oracles

/// Direct summation with the floor-and-renormalize rule applied unconditionally.
fn kld_oracle(p: &[f64], q: &[f64]) -> f64 {
    let mut q2 = vec![0.0; q.len()];
    let mut total = 0.0;
    for i in 0..q.len() {
        q2[i] = if q[i] < 1e-12 { 1e-12 } else { q[i] };
        total += q2[i];
    }
    let mut s = 0.0;
    for i in 0..p.len() {
        if p[i] > 0.0 {
            s += p[i] * (p[i].ln() - (q2[i] / total).ln());
        }
    }
    s
}

fn jsd_oracle(p: &[f64], q: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..p.len() {
        let m = 0.5 * p[i] + 0.5 * q[i];
        if p[i] > 0.0 {
            s += 0.5 * p[i] * (p[i].ln() - m.ln());
        }
        if q[i] > 0.0 {
            s += 0.5 * q[i] * (q[i].ln() - m.ln());
        }
    }
    s
}

fn random_simplex(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let sparse = rng.random_bool(0.5);
    let mut v: Vec<f64> = (0..dim)
        .map(|_| {
            if sparse && rng.random_bool(0.8) {
                0.0
            } else {
                -rng.random::<f64>().max(1e-300).ln()
            }
        })
        .collect();
    if v.iter().all(|&x| x == 0.0) {
        v[rng.random_range(0..dim)] = 1.0;
    }
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

fn ln_gamma(x: f64) -> f64 {
    // Lanczos approximation, g = 7, n = 9
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + 7.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Two-sided p-value of a t statistic by Simpson integration of the density.
fn t_p_value_oracle(t: f64, df: f64) -> f64 {
    let ln_norm = ln_gamma((df + 1.0) / 2.0) - ln_gamma(df / 2.0) - 0.5 * (df * std::f64::consts::PI).ln();
    let f = |x: f64| (ln_norm - (df + 1.0) / 2.0 * (1.0 + x * x / df).ln()).exp();
    let b = t.abs();
    let n = 20_000;
    let h = b / n as f64;
    let mut s = f(0.0) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    (1.0 - 2.0 * s * h / 3.0).max(0.0)
}

fn welch_oracle(a: &[f64], b: &[f64]) -> (f64, f64) {
    let stats = |x: &[f64]| {
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        let v = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
        (m, v, n)
    };
    let (ma, va, na) = stats(a);
    let (mb, vb, nb) = stats(b);
    let se2 = va / na + vb / nb;
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / ((va / na).powi(2) / (na - 1.0) + (vb / nb).powi(2) / (nb - 1.0));
    (t, t_p_value_oracle(t, df))
}

/// Cramer's rule on the normal equations of `y = a s + b t + c`.
fn ols_oracle(x: &[(f64, f64)], y: &[f64]) -> [f64; 3] {
    let mut m = [[0.0; 3]; 3];
    let mut r = [0.0; 3];
    for (&(s, t), &v) in x.iter().zip(y) {
        let row = [s, t, 1.0];
        for i in 0..3 {
            r[i] += row[i] * v;
            for j in 0..3 {
                m[i][j] += row[i] * row[j];
            }
        }
    }
    let det = |a: [[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let d = det(m);
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        let mut mk = m;
        for i in 0..3 {
            mk[i][k] = r[i];
        }
        *o = det(mk) / d;
    }
    out
}

// ---------------------------------------------------------------------------
// criteria

fn divergence_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut max_err = 0.0f64;
    let mut asym = 0;
    let mut over = 0;
    for _ in 0..1000 {
        let p = random_simplex(&mut rng, N_CLASSES);
        let q = random_simplex(&mut rng, N_CLASSES);
        let k = kld(&p, &q).unwrap();
        let j = jsd(&p, &q).unwrap();
        let j2 = jsd(&q, &p).unwrap();
        max_err = max_err.max((k - kld_oracle(&p, &q)).abs()).max((j - jsd_oracle(&p, &q)).abs());
        if j.to_bits() != j2.to_bits() {
            asym += 1;
        }
        if !(0.0..=std::f64::consts::LN_2).contains(&j) {
            over += 1;
        }
    }
    let t = start.elapsed();
    check(
        max_err <= 1e-9 && asym == 0 && over == 0 && t < Duration::from_secs(5),
        format!("1000 pairs, max |error| {max_err:.2e}, {asym} asymmetric, {over} out of bounds, {}", secs(t)),
    )
}

fn pooling_closed_form(codebook: &StCodebook) -> Outcome {
    let (w, h) = (320, 240);
    let reference = Frame::from_fn(w, h, 0, |_, _| 128).unwrap();
    let test = Frame::from_fn(w, h, 0, |x, _| if x % 8 < 4 { 60 } else { 190 }).unwrap();
    let d = jsd(
        st_vector(codebook, &reference, (40, 100)).unwrap(),
        st_vector(codebook, &test, (40, 100)).unwrap(),
    )
    .unwrap();
    let beta = 4.0;
    let mut worst = 0.0f64;
    for n in [1usize, 2, 5, 10] {
        let pairs = (0..n)
            .map(|k| {
                let c = (40.0 + 16.0 * k as f64, 100.0);
                MatchPair {
                    ref_point: c,
                    test_point: c,
                    descriptor_distance: 0.0,
                }
            })
            .collect();
        let got = score_matching_matrix(&reference, &test, &MatchingMatrix { pairs }, codebook, beta).unwrap();
        let expect = d * (n as f64).powf((1.0 - beta) / beta);
        worst = worst.max((got - expect).abs());
    }
    check(
        d > 0.0 && worst <= 1e-12,
        format!("d = {d:.6}, max |score - d N^((1-b)/b)| = {worst:.2e} for N in 1,2,5,10"),
    )
}

fn self_score(codebook: &StCodebook) -> Outcome {
    let cfg = MetricConfig::default();
    let fusion = Fusion::default();
    let scenes = [
        (SceneKind::BlobField, 1),
        (SceneKind::BlobField, 2),
        (SceneKind::BlobField, 3),
        (SceneKind::TexturedObjects, 1),
        (SceneKind::TexturedObjects, 2),
    ];
    let start = Instant::now();
    let mut bad = Vec::new();
    for (kind, seed) in scenes {
        let s = synth_test_scene(kind, 320, 240, 30, seed);
        let r = score_pair(&pair(&s, &s), codebook, &cfg, &fusion).unwrap();
        if r.st_iqm != 0.0 || r.st_t != 0.0 || r.st_vqm != fusion.gamma {
            bad.push(format!("{}: {} {} {}", s.label(), r.st_iqm, r.st_t, r.st_vqm));
        }
    }
    check(
        bad.is_empty(),
        format!("5 sequences 320x240x30, {} not exact{}, {}", bad.len(), bad.iter().map(|b| format!(" [{b}]")).collect::<String>(), secs(start.elapsed())),
    )
}

fn warp_ladder(codebook: &StCodebook) -> Outcome {
    let cfg = MetricConfig::default();
    let start = Instant::now();
    let mut correct = 0;
    let mut rows = Vec::new();
    for seed in 1..=5u64 {
        let src = synth_test_scene(SceneKind::BlobField, 320, 240, 30, seed);
        let mut last = 0.0;
        let mut row = Vec::new();
        for m in [1.0, 2.0, 4.0, 8.0] {
            let spec = DistortionSpec::new(DistortionKind::LocalWarp, m).with_seed(seed);
            let test = inject_distortion(&src, &spec).unwrap();
            let v = st_iqm_sequence(&pair(&src, &test), codebook, &cfg).unwrap().value;
            if v > last {
                correct += 1;
            }
            last = v;
            row.push(format!("{v:.4}"));
        }
        rows.push(row.join("<"));
    }
    let t = start.elapsed();
    check(
        correct == 20 && t < Duration::from_secs(300),
        format!("{correct}/20 orderings, {} [{}]", secs(t), rows.join(", ")),
    )
}

const FLICKER_FRAMES: (usize, usize) = (12, 15);

fn flicker_ladder(codebook: &StCodebook) -> Outcome {
    let cfg = MetricConfig::default();
    let fusion = Fusion::default();
    let start = Instant::now();
    // component i spans frames i and i + 1
    let affected: Vec<usize> = (FLICKER_FRAMES.0 - 1..FLICKER_FRAMES.1).collect();
    let mut correct = 0;
    let mut located = 0;
    for seed in 1..=5u64 {
        let src = synth_test_scene(SceneKind::BlobField, 320, 240, 30, seed);
        let mut last = 0.0;
        for m in [4.0, 8.0, 16.0] {
            let spec = DistortionSpec::new(DistortionKind::Flicker, m).with_frames(FLICKER_FRAMES.0, FLICKER_FRAMES.1);
            let test = inject_distortion(&src, &spec).unwrap();
            let r = score_pair(&pair(&src, &test), codebook, &cfg, &fusion).unwrap();
            if r.st_t > last {
                correct += 1;
            }
            last = r.st_t;
            if m == 16.0 {
                let diff = TemporalVector {
                    values: r
                        .temporal_test
                        .values
                        .iter()
                        .zip(&r.temporal_reference.values)
                        .map(|(a, b)| a.zip(*b).map(|(a, b)| (a - b).abs()))
                        .collect(),
                };
                if diff.top_components(3).iter().all(|i| affected.contains(i)) {
                    located += 1;
                }
            }
        }
    }
    check(
        correct == 15 && located >= 4,
        format!(
            "{correct}/15 orderings, top-3 components on flickered frames in {located}/5 seeds, {}",
            secs(start.elapsed())
        ),
    )
}

fn rank_fidelity(codebook: &StCodebook) -> Outcome {
    let cfg = MetricConfig::default();
    let fusion = Fusion::default();
    let start = Instant::now();
    let levels = [0.5, 1.0, 2.0, 4.0, 8.0];
    let mut entries = Vec::new();
    let mut objective = HashMap::new();
    for src_seed in 11..15u64 {
        let src = synth_test_scene(SceneKind::BlobField, 320, 240, 30, src_seed);
        for (level, &m) in levels.iter().enumerate() {
            let test = inject_distortion(&src, &DistortionSpec::new(DistortionKind::LocalWarp, m).with_seed(src_seed)).unwrap();
            let r = score_pair(&pair(&src, &test), codebook, &cfg, &fusion).unwrap();
            let id = format!("s{src_seed}-l{level}");
            objective.insert(id.clone(), r.st_vqm);
            entries.push(ManifestEntry {
                id,
                src: format!("S{src_seed}"),
                hrc_baseline: format!("L{level}"),
                hrc_rp: "RP1".into(),
                hrt: "T1".into(),
                ref_path: "ref.yuv".into(),
                test_path: "test.yuv".into(),
                mos: 4.6 - 0.8 * level as f64,
                dmos: None,
                raw_scores: None,
            });
        }
    }
    let manifest = DatasetManifest::new(entries).unwrap();
    let report = evaluate(&manifest, &objective, &EvalConfig::default()).unwrap();
    let t = start.elapsed();
    check(
        report.srocc >= 0.9 && t < Duration::from_secs(900),
        format!("20 entries, SROCC {:.4}, PCC {:.4}, {}", report.srocc, report.pcc, secs(t)),
    )
}

fn fusion_recovery() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let x: Vec<(f64, f64)> = (0..60)
        .map(|_| (rng.random_range(0.0..4e-10), rng.random_range(0.0..3e-5)))
        .collect();
    let y: Vec<f64> = x.iter().map(|&(s, t)| 0.3 * (s * 1e10) - 0.4 * (t * 1e5) + 3.0).collect();
    let cfg = FitConfig {
        seed: 5,
        ..FitConfig::default()
    };
    let a = fit_params(&x, &y, &cfg, &Fusion::default()).unwrap();
    let b = fit_params(&x, &y, &cfg, &Fusion::default()).unwrap();
    let scaled: Vec<(f64, f64)> = x.iter().map(|&(s, t)| (s * 1e10, t * 1e5)).collect();
    let oracle = ols_oracle(&scaled, &y);
    let got = a.chosen.weights();
    let err = got
        .iter()
        .zip([0.30, -0.40, 3.00])
        .map(|(g, w)| (g - w).abs())
        .fold(0.0, f64::max);
    let oracle_err = oracle
        .iter()
        .zip([0.30, -0.40, 3.00])
        .map(|(g, w)| (g - w).abs())
        .fold(0.0, f64::max);
    let identical = a == b && got.iter().zip(b.chosen.weights()).all(|(p, q)| p.to_bits() == q.to_bits());
    check(
        err <= 0.01 && oracle_err <= 1e-9 && identical && a.per_split.len() == 1000,
        format!(
            "chosen ({:.2}, {:.2}, {:.2}), max error {err:.1e}, oracle error {oracle_err:.1e}, reproducible {identical}",
            got[0], got[1], got[2]
        ),
    )
}

fn random_labels(rng: &mut ChaCha8Rng, n: usize, p_similar: f64) -> Vec<PairLabel> {
    (0..n)
        .map(|k| {
            let similar = rng.random_bool(p_similar);
            PairLabel {
                a: format!("a{k}"),
                b: format!("b{k}"),
                significance: if similar { Significance::Similar } else { Significance::Different },
                direction: if similar {
                    Direction::None
                } else if rng.random_bool(0.5) {
                    Direction::ABetter
                } else {
                    Direction::BBetter
                },
                p_value: 0.0,
            }
        })
        .collect()
}

fn krasula() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    // aligned: the better side scores higher by an amount growing with its margin
    let pairs = random_labels(&mut rng, 200, 0.0);
    let mut obj = HashMap::new();
    for (k, p) in pairs.iter().enumerate() {
        let margin = 0.5 + k as f64 * 0.01;
        let (a, b) = match p.direction {
            Direction::ABetter => (3.0 + margin, 3.0),
            _ => (3.0, 3.0 + margin),
        };
        obj.insert(p.a.clone(), a);
        obj.insert(p.b.clone(), b);
    }
    let aligned = krasula_analysis(&pairs, &obj, DeltaBasis::default()).unwrap();
    let perfect = aligned.auc_bw == Some(1.0) && aligned.cc == Some(1.0);

    let mut total = 0.0;
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let pairs = random_labels(&mut rng, 200, 0.0);
        let obj: HashMap<String, f64> = pairs
            .iter()
            .flat_map(|p| [p.a.clone(), p.b.clone()])
            .map(|id| (id, rng.random::<f64>()))
            .collect();
        total += krasula_analysis(&pairs, &obj, DeltaBasis::default()).unwrap().auc_bw.unwrap();
    }
    let mean_bw = total / 50.0;

    let pairs = random_labels(&mut rng, 200, 0.4);
    let base: HashMap<String, f64> = pairs
        .iter()
        .flat_map(|p| [p.a.clone(), p.b.clone()])
        .map(|id| (id, rng.random_range(-2.0..2.0)))
        .collect();
    let r0 = krasula_analysis(&pairs, &base, DeltaBasis::default()).unwrap();
    let mut invariant = 0;
    for _ in 0..10 {
        let (a, b, c, k) = (
            rng.random_range(0.1..3.0),
            rng.random_range(0.1..3.0),
            rng.random_range(-5.0..5.0),
            rng.random_range(0.2..2.0),
        );
        let f = |x: f64| a * x * x * x + b * x + c + (k * x).exp();
        let moved: HashMap<String, f64> = base.iter().map(|(id, &v)| (id.clone(), f(v))).collect();
        let r = krasula_analysis(&pairs, &moved, DeltaBasis::default()).unwrap();
        if r.auc_bw == r0.auc_bw && r.auc_ds == r0.auc_ds {
            invariant += 1;
        }
    }
    check(
        perfect && (0.45..=0.55).contains(&mean_bw) && invariant == 10,
        format!(
            "aligned AUC-BW {:?} CC {:?}, random mean AUC-BW {mean_bw:.4}, {invariant}/10 transforms invariant",
            aligned.auc_bw, aligned.cc
        ),
    )
}

fn codebook_gate(codebook: &StCodebook, train_time: Duration) -> Outcome {
    let held_out = generate_synthetic_corpus(N_CLASSES, 20, 9001).unwrap();
    let correct = held_out
        .patches
        .iter()
        .filter(|p| codebook.classify_patch(&p.pixels).argmax_label() == p.label)
        .count();
    let acc = correct as f64 / held_out.len() as f64;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("codebook.json");
    save_codebook(codebook, &path).unwrap();
    let loaded = load_codebook(&path).unwrap();
    let same = loaded == *codebook
        && held_out.patches.iter().all(|p| {
            let a = codebook.classify_patch(&p.pixels);
            let b = loaded.classify_patch(&p.pixels);
            a.iter().zip(b.iter()).all(|(x, y)| x.to_bits() == y.to_bits())
        });
    check(
        acc >= 0.9 && same,
        format!(
            "held-out top-1 accuracy {acc:.4} on {} patches, round trip identical {same}, training {}",
            held_out.len(),
            secs(train_time)
        ),
    )
}

fn eval_stat_oracles() -> Outcome {
    // hand-computed: PCC = SROCC = 8/10, RMSE = sqrt(4/5)
    let x: [f64; 5] = [1.0, 2.0, 3.0, 4.0, 5.0];
    let y = [2.0, 1.0, 4.0, 3.0, 5.0];
    let s = correlation_stats(&x, &y).unwrap();
    let mut err = (s.pcc - 0.8).abs().max((s.srocc - 0.8).abs()).max((s.rmse - 0.8f64.sqrt()).abs());
    // with ties: rank correlation 9/9.5
    let a: [f64; 5] = [1.0, 2.0, 2.0, 3.0, 5.0];
    let b = [1.0, 3.0, 2.0, 4.0, 4.0];
    let s2 = correlation_stats(&a, &b).unwrap();
    err = err.max((s2.srocc - 9.0 / 9.5).abs());

    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut agree = 0;
    let mut worst_p = 0.0f64;
    for _ in 0..50 {
        let shift = rng.random_range(0.0..0.9);
        let (na, nb) = (rng.random_range(15..35), rng.random_range(15..35));
        let sd = rng.random_range(0.5..1.2);
        let mut panel = |mean: f64, n: usize| -> Vec<f64> {
            let d = Normal::new(mean, sd).unwrap();
            (0..n).map(|_| d.sample(&mut rng).round().clamp(1.0, 5.0)).collect()
        };
        let pa = panel(3.0, na);
        let pb = panel(3.0 + shift, nb);
        let w = welch_t_test(&pa, &pb).unwrap();
        let (t, p) = welch_oracle(&pa, &pb);
        worst_p = worst_p.max((w.p_value - p).abs());
        let label = |p: f64, t: f64| if p < 0.05 { if t > 0.0 { 1 } else { -1 } } else { 0 };
        if label(w.p_value, w.t) == label(p, t) {
            agree += 1;
        }
    }
    check(
        err <= 1e-12 && agree == 50 && worst_p < 1e-6,
        format!("5-point max error {err:.1e}; Welch labels agree {agree}/50, max p-value gap {worst_p:.1e}"),
    )
}

fn performance(codebook: &StCodebook) -> Outcome {
    let cfg = MetricConfig::default();
    let fusion = Fusion::default();
    let src = synth_test_scene(SceneKind::BlobField, 320, 240, 30, 1);
    let test = inject_distortion(&src, &DistortionSpec::new(DistortionKind::LocalWarp, 2.0).with_seed(1)).unwrap();
    let p = pair(&src, &test);
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let start = Instant::now();
    let a = single.install(|| score_pair(&p, codebook, &cfg, &fusion)).unwrap();
    let t = start.elapsed();
    let multi = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let b = multi.install(|| score_pair(&p, codebook, &cfg, &fusion)).unwrap();
    let identical = a == b && a.st_vqm.to_bits() == b.st_vqm.to_bits();
    check(
        t < Duration::from_secs(60) && identical,
        format!("single-threaded {}, 1 vs 4 threads identical {identical}", secs(t)),
    )
}

fn main() {
    // `cargo test` forwards harness flags such as --list; only run for real invocations
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let start = Instant::now();
    let codebook = train_default_codebook(1).expect("codebook training");
    let train_time = start.elapsed();

    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("divergence-oracle", Box::new(divergence_oracle)),
        ("pooling-closed-form", Box::new(|| pooling_closed_form(&codebook))),
        ("self-score-identity", Box::new(|| self_score(&codebook))),
        ("spatial-monotonicity", Box::new(|| warp_ladder(&codebook))),
        ("temporal-sensitivity", Box::new(|| flicker_ladder(&codebook))),
        ("end-to-end-rank-fidelity", Box::new(|| rank_fidelity(&codebook))),
        ("fusion-fit-recovery", Box::new(fusion_recovery)),
        ("krasula-validation", Box::new(krasula)),
        ("codebook-quality-gate", Box::new(|| codebook_gate(&codebook, train_time))),
        ("eval-stat-oracles", Box::new(eval_stat_oracles)),
        ("performance-envelope", Box::new(|| performance(&codebook))),
    ];
    let mut failed = 0;
    for (name, f) in &criteria {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(d) => println!("PASS {name}: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL {name}: {d}");
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria passed in {}",
        criteria.len() - failed,
        criteria.len(),
        secs(start.elapsed())
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
