//! Acceptance suite: seven quantitative criteria with pinned tolerances.
//!
//! Each test prints one `criterion N: PASS/FAIL` line (visible with
//! `cargo test --test acceptance -- --nocapture`). Simulated-data criteria
//! use n = 2000 with seeds 1..=30 and summarize each statistic by its
//! median over the window k ∈ [100, 200] (every integer k), then average
//! the medians across seeds.

use std::process::Command;

use cev_detect::detection::{product_verdict, DetectionConfig, Verdict};
use cev_detect::marginals::{hill_estimator, moment_estimator, pickands_estimator};
use cev_detect::models::{
    hillish_limit_ex2, kendall_limit_ex2, numeric_i_mustar, numeric_j_mustar, pareto_quantile,
    simulate, ModelSpec, MuStarSpec,
};
use cev_detect::rank::{build_view, ranks_topk, RankVector};
use cev_detect::statistics::{
    compute_traces, concordant_pairs, concordant_pairs_bruteforce, hillish,
    hillish_integral_identity, kendall_tau, KGrid, TraceBundle,
};
use cev_detect::BivariateSample;

use rand::distributions::Open01;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

const N: usize = 2000;
const SEEDS: std::ops::RangeInclusive<u64> = 1..=30;
const WINDOW: (usize, usize) = (100, 200);

fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty());
    values.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn window_grid() -> KGrid {
    KGrid::new((WINDOW.0..=WINDOW.1).collect()).unwrap()
}

struct WindowMedians {
    hillish: f64,
    hillish_neg: f64,
    kendall: f64,
    pick_half: f64,
}

fn window_medians(bundle: &TraceBundle) -> WindowMedians {
    let mut pick: Vec<f64> = bundle
        .pick_trace(0.5)
        .expect("p=0.5 present")
        .iter()
        .flatten()
        .copied()
        .collect();
    WindowMedians {
        hillish: median(&mut bundle.hillish.clone()),
        hillish_neg: median(&mut bundle.hillish_neg.clone()),
        kendall: median(&mut bundle.kendall.clone()),
        pick_half: median(&mut pick),
    }
}

fn replicate_medians(spec: &ModelSpec) -> Vec<WindowMedians> {
    let grid = window_grid();
    SEEDS
        .map(|seed| {
            let sample = simulate(spec, N, seed).expect("simulation succeeds");
            let bundle = compute_traces(&sample, &grid, &[0.5]).expect("traces succeed");
            window_medians(&bundle)
        })
        .collect()
}

struct Check {
    name: &'static str,
    value: f64,
    target: f64,
    tol: f64,
}

impl Check {
    fn ok(&self) -> bool {
        (self.value - self.target).abs() <= self.tol
    }
}

fn report(criterion: &str, checks: &[Check]) {
    let pass = checks.iter().all(Check::ok);
    let details: Vec<String> = checks
        .iter()
        .map(|c| {
            format!(
                "{}={:.4} (target {} ± {}{})",
                c.name,
                c.value,
                c.target,
                c.tol,
                if c.ok() { "" } else { " MISS" }
            )
        })
        .collect();
    println!(
        "{criterion}: {} — {}",
        if pass { "PASS" } else { "FAIL" },
        details.join(", ")
    );
    assert!(pass, "{criterion} failed: {}", details.join(", "));
}

#[test]
fn criterion_1_example1_reproduction() {
    let meds = replicate_medians(&ModelSpec::Example1);
    let checks = [
        Check {
            name: "hillish",
            value: mean(&meds.iter().map(|m| m.hillish).collect::<Vec<_>>()),
            target: 1.0,
            tol: 0.05,
        },
        Check {
            name: "hillish_neg",
            value: mean(&meds.iter().map(|m| m.hillish_neg).collect::<Vec<_>>()),
            target: 1.0,
            tol: 0.05,
        },
        Check {
            name: "kendall",
            value: mean(&meds.iter().map(|m| m.kendall).collect::<Vec<_>>()),
            target: 0.0,
            tol: 0.05,
        },
        Check {
            name: "pickandsish(0.5)",
            value: mean(&meds.iter().map(|m| m.pick_half).collect::<Vec<_>>()),
            target: 0.0,
            tol: 0.1,
        },
    ];
    report("criterion 1 (example1 model reproduction)", &checks);
}

#[test]
fn criterion_2_example2_reproduction() {
    let meds = replicate_medians(&ModelSpec::Example2 { rho: 0.5 });
    let checks = [
        Check {
            name: "hillish",
            value: mean(&meds.iter().map(|m| m.hillish).collect::<Vec<_>>()),
            target: 0.5,
            tol: 0.05,
        },
        Check {
            name: "kendall",
            value: mean(&meds.iter().map(|m| m.kendall).collect::<Vec<_>>()),
            target: -0.667,
            tol: 0.05,
        },
        Check {
            name: "pickandsish(0.5)",
            value: mean(&meds.iter().map(|m| m.pick_half).collect::<Vec<_>>()),
            target: -0.746,
            tol: 0.1,
        },
    ];
    report("criterion 2 (example2 model reproduction)", &checks);
}

#[test]
fn criterion_3_verdict_correctness() {
    let config = DetectionConfig::default();
    let grid = KGrid::default_for(N).unwrap();
    let mut results: Vec<(String, bool)> = Vec::new();

    let mut run = |spec: &ModelSpec, want: Verdict, opposite: Verdict, label: &str| {
        let mut hits = 0;
        let mut opposites = 0;
        for seed in SEEDS {
            let sample = simulate(spec, N, seed).expect("simulation succeeds");
            let bundle = compute_traces(&sample, &grid, &[0.3, 0.6]).expect("traces succeed");
            let verdict = product_verdict(&bundle, N, &config).expect("verdict succeeds");
            if verdict.verdict == want {
                hits += 1;
            }
            if verdict.verdict == opposite {
                opposites += 1;
            }
        }
        results.push((
            format!("{label}: {want} on {hits}/30 (need >= 27)"),
            hits >= 27,
        ));
        results.push((
            format!("{label}: opposite label on {opposites}/30 (need 0)"),
            opposites == 0,
        ));
    };

    run(
        &ModelSpec::Example1,
        Verdict::CevProduct,
        Verdict::CevNonproduct,
        "example1",
    );
    run(
        &ModelSpec::Example2 { rho: 0.5 },
        Verdict::CevNonproduct,
        Verdict::CevProduct,
        "example2",
    );

    let pass = results.iter().all(|(_, ok)| *ok);
    let details: Vec<String> = results
        .iter()
        .map(|(msg, ok)| format!("{msg}{}", if *ok { "" } else { " MISS" }))
        .collect();
    println!(
        "criterion 3 (verdict correctness): {} — {}",
        if pass { "PASS" } else { "FAIL" },
        details.join("; ")
    );
    assert!(pass, "criterion 3 failed: {}", details.join("; "));
}

#[test]
fn criterion_4_closed_form_vs_quadrature() {
    let mut checks = Vec::new();
    for rho in [0.2, 0.5, 0.8] {
        let spec = MuStarSpec::example2(rho).unwrap();
        let i_closed = hillish_limit_ex2(rho).unwrap();
        let i_quad = numeric_i_mustar(&spec, 1e-6).unwrap();
        checks.push(Check {
            name: if rho == 0.2 {
                "I(0.2)"
            } else if rho == 0.5 {
                "I(0.5)"
            } else {
                "I(0.8)"
            },
            value: i_quad,
            target: i_closed,
            tol: 1e-4,
        });
        let j_closed = kendall_limit_ex2(rho).unwrap();
        let j_quad = numeric_j_mustar(&spec, 1e-6).unwrap();
        checks.push(Check {
            name: if rho == 0.2 {
                "J(0.2)"
            } else if rho == 0.5 {
                "J(0.5)"
            } else {
                "J(0.8)"
            },
            value: j_quad,
            target: j_closed,
            tol: 1e-4,
        });
    }
    let product = MuStarSpec::product();
    checks.push(Check {
        name: "I(product)",
        value: numeric_i_mustar(&product, 1e-6).unwrap(),
        target: 1.0,
        tol: 1e-6,
    });
    checks.push(Check {
        name: "J(product)",
        value: numeric_j_mustar(&product, 1e-6).unwrap(),
        target: 0.0,
        tol: 1e-6,
    });
    report("criterion 4 (closed form vs quadrature)", &checks);
}

const CASES: usize = 1000;

fn random_ranks_with_ties(rng: &mut ChaCha12Rng, k: usize) -> RankVector {
    // draw values from a small pool so ties occur, rank with the <= count
    let vals: Vec<f64> = (0..k)
        .map(|_| rng.gen_range(0..(k / 2 + 2)) as f64)
        .collect();
    let ranks = vals
        .iter()
        .map(|&v| vals.iter().filter(|&&w| w <= v).count())
        .collect();
    RankVector::new(ranks).unwrap()
}

fn random_permutation(rng: &mut ChaCha12Rng, k: usize) -> RankVector {
    let mut ranks: Vec<usize> = (1..=k).collect();
    ranks.shuffle(rng);
    RankVector::new(ranks).unwrap()
}

#[test]
fn criterion_5_exact_identities() {
    let mut rng = ChaCha12Rng::seed_from_u64(20_240_817);
    let mut failures: Vec<String> = Vec::new();

    // fast vs brute-force Kendall: exact integer pair counts, k <= 500
    for case in 0..CASES {
        let k = rng.gen_range(2..=500);
        let ranks = if case % 2 == 0 {
            random_ranks_with_ties(&mut rng, k)
        } else {
            random_permutation(&mut rng, k)
        };
        if concordant_pairs(&ranks) != concordant_pairs_bruteforce(&ranks) {
            failures.push(format!("kendall count mismatch at case {case}"));
            break;
        }
    }

    // Hillish decomposition |I_n - Hillish - correction| < 1e-12, k <= 10^4
    for case in 0..CASES {
        let k = rng.gen_range(2..=10_000);
        let ranks = random_permutation(&mut rng, k);
        let (integral, correction) = hillish_integral_identity(&ranks);
        let gap = (integral - correction - hillish(&ranks)).abs();
        if gap >= 1e-12 {
            failures.push(format!("identity gap {gap:e} at case {case}"));
            break;
        }
    }

    // Kendall negation antisymmetry: exact on distinct concomitants
    for case in 0..CASES {
        let k = rng.gen_range(2..=500);
        let ranks = random_permutation(&mut rng, k);
        let reversed: Vec<usize> = ranks.ranks().iter().map(|&r| k + 1 - r).collect();
        let reversed = RankVector::new(reversed).unwrap();
        let a = kendall_tau(&ranks).unwrap();
        let b = kendall_tau(&reversed).unwrap();
        // IEEE equality: +0 and -0 are the same value
        if a != -b {
            failures.push(format!("negation mismatch at case {case}: {a} vs {}", -b));
            break;
        }
    }

    // monotone-transform invariance: exact for ranks, Hillish, Kendall
    for case in 0..CASES {
        let n = rng.gen_range(2..=300);
        let xs: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(-10_000..10_000) as f64)
            .collect();
        let ys: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(-10_000..10_000) as f64)
            .collect();
        // power-of-two scales and integer shifts are exact and order-preserving
        let tx: Vec<f64> = xs.iter().map(|&x| x * 16.0 + 5.0).collect();
        let ty: Vec<f64> = ys.iter().map(|&y| y * 0.25 - 9.0).collect();
        let s = BivariateSample::new(xs, ys).unwrap();
        let st = BivariateSample::new(tx, ty).unwrap();
        let k = rng.gen_range(2..=n);
        let r = ranks_topk(&build_view(&s), k).unwrap();
        let rt = ranks_topk(&build_view(&st), k).unwrap();
        if r != rt {
            failures.push(format!("rank invariance broken at case {case}"));
            break;
        }
        if hillish(&r).to_bits() != hillish(&rt).to_bits()
            || kendall_tau(&r).unwrap().to_bits() != kendall_tau(&rt).unwrap().to_bits()
        {
            failures.push(format!("statistic invariance broken at case {case}"));
            break;
        }
    }

    let pass = failures.is_empty();
    println!(
        "criterion 5 (exact identities, {CASES} cases each): {} — {}",
        if pass { "PASS" } else { "FAIL" },
        if pass {
            "all four suites exact".to_string()
        } else {
            failures.join("; ")
        }
    );
    assert!(pass, "criterion 5 failed: {}", failures.join("; "));
}

#[test]
fn criterion_6_marginal_estimators() {
    let mut hill = Vec::new();
    let mut moment = Vec::new();
    let mut pickands = Vec::new();
    for seed in 1..=50u64 {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let z: Vec<f64> = (0..10_000)
            .map(|_| {
                let u: f64 = rng.sample(Open01);
                pareto_quantile(u, 1.0).unwrap()
            })
            .collect();
        hill.push(hill_estimator(&z, 100).unwrap());
        moment.push(moment_estimator(&z, 200).unwrap().unwrap());
        pickands.push(pickands_estimator(&z, 250).unwrap().unwrap());
    }
    let checks = [
        Check {
            name: "hill(k=100)",
            value: mean(&hill),
            target: 1.0,
            tol: 0.1,
        },
        Check {
            name: "moment(k=200)",
            value: mean(&moment),
            target: 1.0,
            tol: 0.2,
        },
        Check {
            name: "pickands(k=250)",
            value: mean(&pickands),
            target: 1.0,
            tol: 0.2,
        },
    ];
    report("criterion 6 (marginal estimators on Pareto(1))", &checks);
}

#[test]
fn criterion_7_determinism() {
    let bin = env!("CARGO_BIN_EXE_cev-detect");
    let base = std::env::temp_dir().join("cev_detect_acceptance_determinism");
    let _ = std::fs::remove_dir_all(&base);
    std::fs::create_dir_all(&base).unwrap();

    let run = |args: &[&str]| {
        let out = Command::new(bin).args(args).output().expect("binary runs");
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        out.stdout
    };

    let mut identical = true;
    let mut notes = Vec::new();

    // compute (simulated input): all three output files byte-identical
    for (sub, args, files) in [
        (
            "compute",
            vec![
                "compute", "--model", "example2", "--rho", "0.5", "--n", "1000", "--seed", "21",
                "--p", "0.3", "--p", "0.6",
            ],
            vec!["cev_traces.csv", "marginal_traces.csv", "verdict.json"],
        ),
        (
            "simulate",
            vec![
                "simulate", "--model", "example1", "--n", "1000", "--seed", "4",
            ],
            vec!["sample.csv"],
        ),
    ] {
        let dir_a = base.join(format!("{sub}_a"));
        let dir_b = base.join(format!("{sub}_b"));
        for dir in [&dir_a, &dir_b] {
            let mut full = args.clone();
            full.push("--out-dir");
            full.push(dir.to_str().unwrap());
            run(&full);
        }
        for file in files {
            let a = std::fs::read(dir_a.join(file)).unwrap();
            let b = std::fs::read(dir_b.join(file)).unwrap();
            if a != b {
                identical = false;
                notes.push(format!("{sub}/{file} differs"));
            }
        }
    }

    // detect: byte-identical verdict from the computed traces
    let traces = base.join("compute_a").join("cev_traces.csv");
    let det_a = base.join("detect_a");
    let det_b = base.join("detect_b");
    for dir in [&det_a, &det_b] {
        run(&[
            "detect",
            "--input",
            traces.to_str().unwrap(),
            "--n",
            "1000",
            "--out-dir",
            dir.to_str().unwrap(),
        ]);
    }
    if std::fs::read(det_a.join("verdict.json")).unwrap()
        != std::fs::read(det_b.join("verdict.json")).unwrap()
    {
        identical = false;
        notes.push("detect/verdict.json differs".into());
    }

    // limits: byte-identical stdout
    let lim_a = run(&["limits", "--rho", "0.3", "--p", "0.4", "--p", "0.7"]);
    let lim_b = run(&["limits", "--rho", "0.3", "--p", "0.4", "--p", "0.7"]);
    if lim_a != lim_b {
        identical = false;
        notes.push("limits stdout differs".into());
    }

    println!(
        "criterion 7 (determinism): {} — {}",
        if identical { "PASS" } else { "FAIL" },
        if identical {
            "compute/simulate/detect files and limits stdout byte-identical".to_string()
        } else {
            notes.join("; ")
        }
    );
    assert!(identical, "criterion 7 failed: {}", notes.join("; "));
}
