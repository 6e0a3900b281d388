//! Acceptance suite. Each test checks one criterion at its stated tolerance
//! and prints a single `PASS`/`FAIL` line before asserting.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use csit_core::allocation::{conventional_allocation, distance_based_allocation, tightly_feasible_allocation};
use csit_core::csit::{build_distributed_csit, CsitAllocation, CsitSource, QuantizerKind, ScalingAllocation};
use csit_core::eval::{
    apzf_scenarios, run_all, run_size_experiment, sum_rate_slope, wyner_scenarios, Execution, RateSettings,
    SizeExperiment,
};
use csit_core::ia::{ia_solve, ia_solve_incomplete, is_proper_network, leakage, receive_filters, IaInit, IaOptions};
use csit_core::model::{gen_channel, inverse_decay_profile, AntennaConfig, ChannelRealization, Topology};
use csit_core::precoding::{apzf, zf_distributed, zf_global, PowerNormalization};
use csit_core::CMatrix;

fn report(id: u32, ok: bool, detail: String) {
    println!("criterion {id:02}: {} {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} failed: {detail}");
}

fn csit_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_csit"))
}

fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

#[test]
fn criterion_01_bit_table() {
    let start = Instant::now();
    let out = csit_bin()
        .args(["eq3-table", "--gamma", "0.5,1", "--snr-db", "20", "--max-distance", "3"])
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let bits: Vec<(String, u32)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_string(), f[3].parse().unwrap())
        })
        .collect();
    let of = |g: &str| bits.iter().filter(|b| b.0 == g).map(|b| b.1).collect::<Vec<_>>();
    let elapsed = start.elapsed().as_secs_f64();
    let ok = out.status.success() && of("0.5") == [14, 4, 0, 0] && of("1") == [20; 4] && elapsed < 1.0;
    report(1, ok, format!("gamma=0.5 {:?}, gamma=1 {:?}, {elapsed:.2}s", of("0.5"), of("1")));
}

#[test]
fn criterion_02_distance_based_ratio() {
    let start = Instant::now();
    let mut ratios = Vec::new();
    for p_db in [20.0, 40.0, 60.0] {
        let d = distance_based_allocation(15, 0.5, db(p_db)).unwrap().size().bits as f64;
        let c = conventional_allocation(15, 0.5, db(p_db)).unwrap().size().bits as f64;
        ratios.push(d / c);
    }
    // Asymptotically only |i-j| < 2 entries survive with weights 1 and 1/2
    // per row: (15 + 2*14/2) / 15^2 = 44/450.
    let limit = 44.0 / 450.0;
    let elapsed = start.elapsed().as_secs_f64();
    let ok = ratios.iter().all(|r| (0.08..=0.12).contains(r)) && (ratios[2] - limit).abs() < 0.005 && elapsed < 1.0;
    report(2, ok, format!("ratios {ratios:.4?} vs limit {limit:.4}, {elapsed:.2}s"));
}

#[test]
fn criterion_03_properness_matches_solver() {
    let start = Instant::now();
    let opts = IaOptions { tol: 1e-12, max_iter: 5000 };
    let (mut agree, mut total, mut proper) = (0, 0, 0);
    let mut disagreements = Vec::new();
    for code in 0..729usize {
        let n: Vec<usize> = (0..6).map(|p| code / 3usize.pow(p) % 3 + 1).collect();
        let c = AntennaConfig::new(n[..3].to_vec(), n[3..].to_vec(), vec![1; 3]).unwrap();
        let is_proper = is_proper_network(&c).unwrap();
        let aligned = (0..5u64).any(|s| {
            let h = gen_channel(&c, Topology::IidRayleigh, 100.0, 1000 + s).unwrap();
            ia_solve(&h, opts, IaInit::Seeded(s)).unwrap().leakage < 1e-6
        });
        total += 1;
        proper += usize::from(is_proper);
        if aligned == is_proper {
            agree += 1;
        } else {
            disagreements.push(n);
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = agree == total && elapsed < 600.0;
    report(3, ok, format!("{agree}/{total} agree ({proper} proper), mismatches {disagreements:?}, {elapsed:.1}s"));
}

#[test]
fn criterion_04_heterogeneous_alignment() {
    let start = Instant::now();
    let c = AntennaConfig::new(vec![2, 1, 3], vec![2, 1, 3], vec![1, 1, 1]).unwrap();
    let a = tightly_feasible_allocation(&c).unwrap();
    let complete = CsitAllocation::complete(&c).size().scalars;
    let opts = IaOptions { tol: 1e-12, max_iter: 5000 };
    let aligned = (0..100u64)
        .filter(|&s| {
            let h = gen_channel(&c, Topology::IidRayleigh, 100.0, s).unwrap();
            let csit = build_distributed_csit(&h, CsitSource::Allocation(&a.csit), QuantizerKind::Surrogate, s).unwrap();
            let sol = ia_solve_incomplete(&csit, &a.plan, opts).unwrap();
            let f = receive_filters(&h, &sol.precoders).unwrap();
            leakage(&h, &sol.precoders, &f).unwrap() < 1e-6
        })
        .count();
    let elapsed = start.elapsed().as_secs_f64();
    let ok = a.csit.is_strictly_incomplete() && a.scalars() < complete && aligned >= 95 && elapsed < 60.0;
    report(4, ok, format!("{} of {complete} scalars, {aligned}/100 aligned, {elapsed:.1}s", a.scalars()));
}

#[test]
fn criterion_05_allocation_size_trend() {
    let start = Instant::now();
    let e = SizeExperiment { users: 3, antenna_totals: (12..=16).collect(), draws: 1000, seed: 5 };
    let t = run_size_experiment(&e, Execution::Parallel).unwrap();
    let means: Vec<f64> = t.rows.iter().map(|r| r.mean_scalars).collect();
    let below = t.rows[0].mean_scalars < t.rows[0].mean_complete_scalars;
    let monotone = means[1..].windows(2).all(|w| w[1] <= w[0]);
    let elapsed = start.elapsed().as_secs_f64();
    let ok = below && monotone && elapsed < 600.0;
    report(
        5,
        ok,
        format!("means {means:.2?}, complete at 12 = {:.1}, {elapsed:.1}s", t.rows[0].mean_complete_scalars),
    );
}

fn zf_settings(draws: usize) -> RateSettings {
    RateSettings { snr_db: vec![40.0, 50.0, 60.0], draws, seed: 6, quantizer: QuantizerKind::Surrogate }
}

#[test]
fn criterion_06_zf_collapse() {
    let start = Instant::now();
    let slope = |alpha: Vec<f64>| {
        let a = ScalingAllocation::new(2, alpha).unwrap();
        let sc = apzf_scenarios(&a, PowerNormalization::apzf_default(), &zf_settings(500)).unwrap();
        let t = run_all(&sc[1..2], Execution::Parallel).unwrap();
        sum_rate_slope(&t[0], 40.0, 60.0).unwrap()
    };
    // alpha[row * 2 + tx]: row 1 is unknown at TX 0.
    let collapsed = slope(vec![1.0, 1.0, 0.0, 1.0]);
    let full = slope(vec![1.0; 4]);
    let elapsed = start.elapsed().as_secs_f64();
    let ok = collapsed < 0.3 && (1.7..=2.1).contains(&full) && elapsed < 120.0;
    report(6, ok, format!("slope {collapsed:.3} with one zero, {full:.3} with all ones, {elapsed:.1}s"));
}

#[test]
fn criterion_07_active_passive_gain() {
    let start = Instant::now();
    let a = ScalingAllocation::new(2, vec![1.0, 0.5, 0.0, 0.7]).unwrap();
    let sc = apzf_scenarios(&a, PowerNormalization::apzf_default(), &zf_settings(500)).unwrap();
    let t = run_all(&sc, Execution::Parallel).unwrap();
    let (perfect, zf, ap) = (&t[0], &t[1], &t[2]);
    let at40 = |t: &csit_core::eval::ResultTable| t.rows[0].sum_rate_mean;
    let (s_zf, s_ap) = (sum_rate_slope(zf, 40.0, 60.0).unwrap(), sum_rate_slope(ap, 40.0, 60.0).unwrap());
    let dominates = perfect.rows.iter().zip(&zf.rows).zip(&ap.rows).all(|((p, z), a)| {
        p.sum_rate_mean >= z.sum_rate_mean && p.sum_rate_mean >= a.sum_rate_mean
    });
    let elapsed = start.elapsed().as_secs_f64();
    let ok = at40(ap) > at40(zf) && s_ap - s_zf >= 0.5 && dominates && elapsed < 120.0;
    report(
        7,
        ok,
        format!(
            "40 dB: ap {:.2} zf {:.2} perfect {:.2}; slopes ap {s_ap:.3} zf {s_zf:.3}; {elapsed:.1}s",
            at40(ap),
            at40(zf),
            at40(perfect)
        ),
    );
}

#[test]
fn criterion_08_distance_based_ordering() {
    let start = Instant::now();
    let s = RateSettings { snr_db: vec![20.0, 30.0, 40.0], draws: 200, seed: 8, quantizer: QuantizerKind::Surrogate };
    let sc = wyner_scenarios(15, 0.5, 3, &s).unwrap();
    let t = run_all(&sc[..3], Execution::Parallel).unwrap();
    let mut ok = true;
    let mut detail = Vec::new();
    for (r, row) in t[0].rows.iter().enumerate() {
        for other in &t[1..] {
            let o = &other.rows[r];
            let gap = row.sum_rate_mean - o.sum_rate_mean;
            let tol = 2.0 * (row.stderr.powi(2) + o.stderr.powi(2)).sqrt();
            ok &= gap >= -tol;
            detail.push(format!("{}dB vs {}: {gap:+.2}", row.snr_db, other.label));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    ok &= elapsed < 600.0;
    report(8, ok, format!("{}; {elapsed:.1}s", detail.join(", ")));
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("csit-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn criterion_09_determinism() {
    let cfg = scratch("small.toml");
    std::fs::write(
        &cfg,
        "seed = 3\n\
         [experiment]\nsnr_db = [10.0, 30.0]\ndraws = 8\n\
         [wyner]\nusers = 6\n\
         [ia_alloc]\nantenna_totals = [12, 13]\ndraws = 20\n\
         [network]\nn_tx = [2, 1, 3]\nn_rx = [2, 1, 3]\nd = [1, 1, 1]\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap().to_string();
    let mut failures = Vec::new();
    for cmd in ["ia-alloc", "wyner-rate", "apzf-rate", "eq3-table", "feasibility"] {
        for format in ["csv", "svg"] {
            if matches!(cmd, "eq3-table" | "feasibility") && format == "svg" {
                continue;
            }
            let run = |serial: bool| {
                let mut c = csit_bin();
                c.args([cmd, "--config", &cfg, "--format", format]);
                if serial {
                    c.arg("--serial");
                }
                let out = c.output().unwrap();
                assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
                out.stdout
            };
            let (a, b, c) = (run(false), run(false), run(true));
            if a.is_empty() || a != b || a != c {
                failures.push(format!("{cmd}/{format}"));
            }
        }
    }
    report(9, failures.is_empty(), format!("mismatched outputs: {failures:?}"));
}

fn max_offdiag_ratio(h: &ChannelRealization, t: &CMatrix) -> f64 {
    let e = h.matrix() * t;
    let mut worst: f64 = 0.0;
    for i in 0..e.nrows() {
        for k in (0..e.ncols()).filter(|&k| k != i) {
            worst = worst.max(e[(i, k)].norm() / e[(i, i)].norm());
        }
    }
    worst
}

#[test]
fn criterion_10_numerical_invariants() {
    let start = Instant::now();
    let p = 1e4;
    let mut residual: f64 = 0.0;
    let single = AntennaConfig::single_antenna(4).unwrap();
    let pair = AntennaConfig::single_antenna(2).unwrap();
    let a = ScalingAllocation::new(2, vec![1.0, 0.5, 0.0, 0.7]).unwrap();
    for seed in 0..50 {
        for topo in [Topology::IidRayleigh, Topology::wyner(0.5).unwrap()] {
            let h = gen_channel(&single, topo, p, seed).unwrap();
            let exact = CsitAllocation::complete(&single);
            let csit = build_distributed_csit(&h, CsitSource::Allocation(&exact), QuantizerKind::Surrogate, seed).unwrap();
            residual = residual.max(max_offdiag_ratio(&h, zf_global(&h, p).unwrap().matrix()));
            residual = residual.max(max_offdiag_ratio(&h, zf_distributed(&csit, p).unwrap().matrix()));
        }
        let h = gen_channel(&pair, Topology::IidRayleigh, p, seed).unwrap();
        let exact = CsitAllocation::complete(&pair);
        let csit = build_distributed_csit(&h, CsitSource::Allocation(&exact), QuantizerKind::Surrogate, seed).unwrap();
        let t = apzf(&csit, &a, p, PowerNormalization::apzf_default()).unwrap();
        residual = residual.max(max_offdiag_ratio(&h, t.matrix()));
    }

    let mut monotone = true;
    for (n_tx, n_rx) in [(vec![2, 2, 2], vec![2, 2, 2]), (vec![2, 1, 3], vec![2, 1, 3]), (vec![3, 3, 3], vec![3, 3, 3])] {
        let d = if n_tx[0] == 3 { vec![2, 1, 1] } else { vec![1; 3] };
        let c = AntennaConfig::new(n_tx, n_rx, d).unwrap();
        for seed in 0..10 {
            let h = gen_channel(&c, Topology::IidRayleigh, 100.0, seed).unwrap();
            let sol = ia_solve(&h, IaOptions::default(), IaInit::Seeded(seed)).unwrap();
            monotone &= sol.history.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-15);
        }
    }

    let decay = inverse_decay_profile(15, 0.5, p, 200, 4, 10).unwrap();
    let decreasing = decay.windows(2).all(|w| w[1] < w[0]);
    let elapsed = start.elapsed().as_secs_f64();
    let ok = residual <= 1e-10 && monotone && decreasing && elapsed < 60.0;
    report(
        10,
        ok,
        format!(
            "nulling residual {residual:.2e}, monotone {monotone}, decay {:?}, {elapsed:.1}s",
            decay.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>()
        ),
    );
}
