//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits non-zero if any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::{char_poly_eigenvalues, random_psd};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sysrisk::index::{sector_weights, standard_sector_filters, ConstituentRecord};
use sysrisk::pca::{covariance, demean_matrix, eigen_symmetric, reconstruction_error, rolling_pca};
use sysrisk::pca::{CovarianceMatrix, DivisorMode, RollingPcaConfig, DEFAULT_TOLERANCE};
use sysrisk::synth::{generate, PanelSpec, Regime};
use sysrisk::xcorr::{rolling_xcorr, significance_band, xcorr, xcorr_bruteforce, Direction, RollingXCorrConfig};
use sysrisk::{align, AlignedPanel, ReturnSeries, TradingDate};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn day(i: usize) -> TradingDate {
    TradingDate::new(2006, 1, 2).unwrap().plus_days(i as u64)
}

fn series(id: &str, values: &[f64]) -> ReturnSeries {
    ReturnSeries::new(id, values.iter().enumerate().map(|(i, &v)| (day(i), v)).collect()).unwrap()
}

fn gaussian(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| 0.01 * rng.sample::<f64, _>(StandardNormal)).collect()
}

fn write_series(path: &Path, values: &[f64]) {
    let mut out = Vec::new();
    sysrisk::ingest::write_return_csv(&mut out, &series("x", values)).unwrap();
    std::fs::write(path, out).unwrap();
}

fn sysrisk_cli(args: &[&str]) -> Result<std::process::Output, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_sysrisk"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("sysrisk {args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out)
}

fn band_anchor() -> Outcome {
    let band = significance_band(90);
    ensure((band - 0.21082).abs() <= 1e-5, || format!("band {band}"))?;

    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    write_series(&a, &gaussian(&mut rng, 120));
    write_series(&b, &gaussian(&mut rng, 120));
    let out = dir.path().join("x.csv");
    sysrisk_cli(&[
        "xcorr",
        "--input",
        a.to_str().unwrap(),
        "--input",
        b.to_str().unwrap(),
        "--window",
        "90",
        "--out",
        out.to_str().unwrap(),
    ])?;
    let text = std::fs::read_to_string(&out).unwrap();
    for line in text.lines().skip(1) {
        let emitted: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        ensure((emitted - 0.21082).abs() <= 1e-5, || format!("emitted band {emitted}"))?;
    }
    Ok(format!("band = {band:.6}, {} CLI rows", text.lines().count() - 1))
}

fn uniform_spread() -> Outcome {
    let c = CovarianceMatrix::from_symmetric(Array2::eye(4), 1.0).map_err(|e| e.to_string())?;
    let r = eigen_symmetric(&c, DEFAULT_TOLERANCE).map_err(|e| e.to_string())?;
    for (got, want) in r.cumulative.iter().zip([0.25, 0.5, 0.75, 1.0]) {
        ensure((got - want).abs() <= 1e-12, || format!("cumulative {:?}", r.cumulative))?;
    }
    Ok(format!("cumulative = {:?}", r.cumulative))
}

fn xcorr_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for trial in 0..500 {
        let k = rng.random_range(2..=200);
        let a = gaussian(&mut rng, k);
        let b = gaussian(&mut rng, k);
        let dir = if trial % 2 == 0 {
            Direction::ALeadsB
        } else {
            Direction::BLeadsA
        };
        let fast = xcorr(&a, &b, dir).map_err(|e| e.to_string())?;
        let slow = xcorr_bruteforce(&a, &b, dir).map_err(|e| e.to_string())?;
        for (f, s) in fast.r.iter().zip(&slow.r) {
            worst = worst.max((f - s).abs());
        }
    }
    ensure(worst <= 1e-10, || format!("max deviation {worst:e}"))?;
    Ok(format!("500 pairs, max deviation {worst:.1e}"))
}

fn eigen_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_rel = 0.0f64;
    for trial in 0..200 {
        let n = 1 + trial % 3;
        let a = random_psd(&mut rng, n);
        let expected = char_poly_eigenvalues(&a);
        let c = CovarianceMatrix::from_symmetric(a, 1.0).map_err(|e| e.to_string())?;
        let got = eigen_symmetric(&c, DEFAULT_TOLERANCE)
            .map_err(|e| e.to_string())?
            .eigenvalues;
        for (g, e) in got.iter().zip(&expected) {
            worst_rel = worst_rel.max((g - e).abs() / e.abs());
        }
    }
    ensure(worst_rel <= 1e-7, || format!("relative deviation {worst_rel:e}"))?;
    let mut worst_rec = 0.0f64;
    for n in 1..=8 {
        for _ in 0..25 {
            let a = random_psd(&mut rng, n);
            let trace = a.diag().sum();
            let c = CovarianceMatrix::from_symmetric(a.clone(), 1.0).map_err(|e| e.to_string())?;
            let r = eigen_symmetric(&c, DEFAULT_TOLERANCE).map_err(|e| e.to_string())?;
            worst_rec = worst_rec.max(reconstruction_error(&a, &r.eigenvalues, &r.eigenvectors) / trace);
        }
    }
    ensure(worst_rec <= 1e-10, || format!("reconstruction {worst_rec:e} x trace"))?;
    Ok(format!("rel {worst_rel:.1e}, reconstruction {worst_rec:.1e} x trace"))
}

fn shift_detection() -> Outcome {
    use rand::seq::SliceRandom;
    // every window of a period-90 two-level cycle has the same mean and spread
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut cycle: Vec<f64> = (0..90).map(|i| if i < 45 { 0.012 } else { -0.008 }).collect();
    cycle.shuffle(&mut rng);
    let a: Vec<f64> = (0..400).map(|t| cycle[t % 90]).collect();
    let mut b = vec![0.004];
    b.extend_from_slice(&a[..a.len() - 1]);
    let r =
        rolling_xcorr(&series("a", &a), &series("b", &b), &RollingXCorrConfig::default()).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    // window 0 contains the seed value of b and is not a full shifted window
    for p in r.points().skip(1) {
        worst = worst.max((p.r_at_lag.ok_or("gap window")? - 1.0).abs());
    }
    ensure(worst <= 1e-9, || format!("max |r - 1| = {worst:e}"))?;
    Ok(format!(
        "{} full windows, max |r - 1| = {worst:.1e}",
        r.entries.len() - 1
    ))
}

fn regime_detection() -> Outcome {
    let mut passed = 0;
    let (mut worst_in, mut worst_out) = (f64::INFINITY, 0.0f64);
    for seed in 0..50 {
        let spec = PanelSpec {
            n_assets: 4,
            n_periods: 600,
            base_correlation: 0.3,
            vol: 0.01,
            regime: Some(Regime {
                start: 200,
                end: 400,
                correlation: 0.9,
            }),
            seed,
        };
        let panel = generate(&spec).map_err(|e| e.to_string())?;
        let r = rolling_pca(&panel, &RollingPcaConfig::default()).map_err(|e| e.to_string())?;
        let (mut inside, mut outside) = (Vec::new(), Vec::new());
        for e in &r.entries {
            let start = e.window_index;
            let f = e.value.as_ref().map_err(|g| g.reason.clone())?.first_fraction();
            if start >= 200 && start + 30 <= 400 {
                inside.push(f);
            } else if start + 30 <= 200 || start >= 400 {
                outside.push(f);
            }
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (i, o) = (mean(&inside), mean(&outside));
        worst_in = worst_in.min(i);
        worst_out = worst_out.max(o);
        if i > 0.855 && o < 0.575 {
            passed += 1;
        }
    }
    ensure(passed >= 48, || format!("{passed}/50 seeds passed"))?;
    Ok(format!(
        "{passed}/50 seeds, lowest inside mean {worst_in:.3}, highest outside mean {worst_out:.3}"
    ))
}

fn false_positives() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let a = gaussian(&mut rng, 1089);
    let b = gaussian(&mut rng, 1089);
    let r =
        rolling_xcorr(&series("a", &a), &series("b", &b), &RollingXCorrConfig::default()).map_err(|e| e.to_string())?;
    ensure(r.entries.len() == 1000, || format!("{} windows", r.entries.len()))?;
    let band = significance_band(90);
    let hits = r
        .points()
        .filter(|p| p.r_at_lag.is_some_and(|v| v.abs() > band))
        .count();
    let rate = hits as f64 / 1000.0;
    ensure(rate <= 0.10, || format!("rate {rate}"))?;
    // overlapping windows make one pair's rate lumpy; show the spread across pairs
    let mut rates = Vec::new();
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = gaussian(&mut rng, 1089);
        let b = gaussian(&mut rng, 1089);
        let r = rolling_xcorr(&series("a", &a), &series("b", &b), &RollingXCorrConfig::default())
            .map_err(|e| e.to_string())?;
        rates.push(
            r.points()
                .filter(|p| p.r_at_lag.is_some_and(|v| v.abs() > band))
                .count() as f64
                / 1000.0,
        );
    }
    let mean = rates.iter().sum::<f64>() / rates.len() as f64;
    let max = rates.iter().cloned().fold(0.0, f64::max);
    Ok(format!(
        "rate {rate:.3} over 1000 windows; 20 other pairs: mean {mean:.3}, max {max:.3}"
    ))
}

fn invariances() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);

    let raw = Array2::from_shape_fn((5, 60), |_| 0.01 * rng.sample::<f64, _>(StandardNormal));
    let first = |m: Array2<f64>, mode: DivisorMode| -> Result<Vec<f64>, String> {
        let c = covariance(&demean_matrix(m.view()).map_err(|e| e.to_string())?, mode).map_err(|e| e.to_string())?;
        Ok(eigen_symmetric(&c, DEFAULT_TOLERANCE)
            .map_err(|e| e.to_string())?
            .fractional)
    };
    let reference = first(raw.clone(), DivisorMode::PaperTJ)?;
    for mode in [DivisorMode::PaperTJ, DivisorMode::SampleT1, DivisorMode::PopulationT] {
        for scale in [1e-3, 0.7, 1.0, 42.0, 1e4] {
            let f = first(&raw * scale, mode)?;
            for (x, y) in f.iter().zip(&reference) {
                ensure((x - y).abs() <= 1e-9, || {
                    format!("{mode} x{scale}: {f:?} vs {reference:?}")
                })?;
            }
        }
    }

    let records: Vec<ConstituentRecord> = (0..40)
        .map(|i| ConstituentRecord {
            date: day(i % 4),
            firm_id: format!("f{i}"),
            sic: 6000 + (i as u16 * 37) % 500,
            market_cap: rng.random_range(1.0..1e7),
            ret: rng.random_range(-0.1..0.1),
        })
        .collect();
    for filter in standard_sector_filters().values() {
        for firms in sector_weights(records.clone(), *filter)
            .map_err(|e| e.to_string())?
            .values()
        {
            let total: f64 = firms.iter().map(|f| f.weight).sum();
            ensure((total - 1.0).abs() <= 1e-12, || format!("weights sum to {total}"))?;
        }
    }

    let s: Vec<ReturnSeries> = (0..3)
        .map(|j| {
            let pts = (0..80)
                .filter(|i| (i + j) % 5 != 0)
                .map(|i| (day(i), rng.random_range(-0.05..0.05)))
                .collect();
            ReturnSeries::new(format!("s{j}"), pts).unwrap()
        })
        .collect();
    let panel: AlignedPanel = align(&s).map_err(|e| e.to_string())?;
    ensure(align(&panel.to_series()).ok().as_ref() == Some(&panel), || {
        "align is not idempotent".into()
    })?;

    let a = gaussian(&mut rng, 150);
    let self_r = rolling_xcorr(
        &series("a", &a),
        &series("a", &a),
        &RollingXCorrConfig {
            lag: 0,
            ..Default::default()
        },
    )
    .map_err(|e| e.to_string())?;
    for p in self_r.points() {
        let r0 = p.r_at_lag.ok_or("gap window")?;
        ensure((r0 - 1.0).abs() <= 1e-12, || format!("self r0 = {r0}"))?;
    }

    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let panel_path = d.join("panel.csv");
    let p = panel_path.to_str().unwrap();
    sysrisk_cli(&[
        "synth",
        "--assets",
        "4",
        "--periods",
        "200",
        "--rho",
        "0.4",
        "--seed",
        "9",
        "--out",
        p,
    ])?;
    let run = |tag: &str| -> Result<Vec<Vec<u8>>, String> {
        let out = d.join(format!("pca_{tag}.csv"));
        let man = d.join("run.manifest.json");
        sysrisk_cli(&[
            "pca",
            "--input",
            p,
            "--out",
            out.to_str().unwrap(),
            "--manifest",
            man.to_str().unwrap(),
        ])?;
        Ok(vec![std::fs::read(&out).unwrap(), std::fs::read(&man).unwrap()])
    };
    let first_run = run("a")?;
    let second_run = run("a")?;
    ensure(first_run == second_run, || "reruns differ".into())?;
    Ok("divisor/scale, weight sums, align, self r0, byte-identical reruns".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 significance band at k = 90", Duration::from_secs(1), band_anchor),
        (
            "2 identity covariance spreads evenly",
            Duration::from_secs(1),
            uniform_spread,
        ),
        ("3 xcorr matches brute force", Duration::from_secs(10), xcorr_oracle),
        ("4 eigen matches oracles", Duration::from_secs(10), eigen_oracle),
        (
            "5 shifted copy gives r = 1 at lag 1",
            Duration::from_secs(1),
            shift_detection,
        ),
        ("6 injected regime detected", Duration::from_secs(30), regime_detection),
        ("7 false positives bounded", Duration::from_secs(10), false_positives),
        ("8 invariance suite", Duration::from_secs(10), invariances),
    ];
    let mut failures = 0;
    for (name, budget, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("[PASS] {name}: {detail} ({took:.2?}, budget {budget:?})"),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] {name}: {detail} ({took:.2?}, budget {budget:?})");
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", 8 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
