//! Monte-Carlo laws of the precoders and quantizers.

use csit_core::csit::{quantize_vector, QuantizerKind, ScalingAllocation};
use csit_core::eval::{apzf_scenarios, run_all, sum_rate_slope, dof_slope, Execution, RateSettings};
use csit_core::precoding::PowerNormalization;
use csit_core::rng::{complex_normal, rng_for};

fn settings(draws: usize) -> RateSettings {
    RateSettings { snr_db: vec![40.0, 50.0, 60.0], draws, seed: 21, quantizer: QuantizerKind::Surrogate }
}

/// Sum-rate slope of conventional distributed ZF (index 1) and perfect ZF (index 0).
fn slopes(alpha: Vec<f64>, draws: usize) -> (f64, f64) {
    let a = ScalingAllocation::new(2, alpha).unwrap();
    let sc = apzf_scenarios(&a, PowerNormalization::apzf_default(), &settings(draws)).unwrap();
    let t = run_all(&sc[..2], Execution::Parallel).unwrap();
    (sum_rate_slope(&t[1], 40.0, 60.0).unwrap(), dof_slope(&t[0], 40.0, 60.0).unwrap())
}

#[test]
fn worst_estimate_sets_the_distributed_zf_slope() {
    // Cross-row coefficients (row 1 at TX 0, row 0 at TX 1); own rows exact-ish.
    for a in [0.0, 0.5, 1.0] {
        for b in [0.0, 0.5, 1.0] {
            let (s, _) = slopes(vec![1.0, b, a, 1.0], 300);
            let target = 2.0 * f64::min(a, b);
            assert!((s - target).abs() <= 0.3, "alpha ({a}, {b}): slope {s}, target {target}");
        }
    }
}

#[test]
fn perfect_zf_reaches_one_dof_per_user() {
    let (_, per_user) = slopes(vec![1.0; 4], 300);
    assert!((0.9..=1.05).contains(&per_user), "{per_user}");
}

#[test]
fn surrogate_error_falls_with_bits() {
    let mut rng = rng_for(8, &[]);
    let h: Vec<_> = (0..3).map(|_| complex_normal(&mut rng, 1.0)).collect();
    let mse = |bits: u32, rng: &mut _| {
        (0..10_000)
            .map(|_| {
                let q = quantize_vector(&h, bits, QuantizerKind::Surrogate, rng).unwrap().unwrap();
                q.iter().zip(&h).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>()
            })
            .sum::<f64>()
            / 10_000.0
    };
    let m: Vec<f64> = [3, 6, 9, 12].iter().map(|&b| mse(b, &mut rng)).collect();
    assert!(m.windows(2).all(|w| w[1] <= w[0]), "{m:?}");
}

#[test]
fn rvq_and_surrogate_errors_follow_the_same_law() {
    // Both quantizers should lose accuracy at a similar exponential rate for
    // moderate bit counts; compare the error drop from 4 to 12 bits.
    let mut rng = rng_for(9, &[]);
    let mut mse = |bits: u32, kind| {
        (0..400)
            .map(|_| {
                let h: Vec<_> = (0..2).map(|_| complex_normal(&mut rng, 1.0)).collect();
                let q = quantize_vector(&h, bits, kind, &mut rng).unwrap().unwrap();
                q.iter().zip(&h).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>()
            })
            .sum::<f64>()
            / 400.0
    };
    let rvq = mse(4, QuantizerKind::Rvq) / mse(12, QuantizerKind::Rvq);
    let sur = mse(4, QuantizerKind::Surrogate) / mse(12, QuantizerKind::Surrogate);
    assert!(rvq > 4.0 && sur > 4.0, "rvq drop {rvq}, surrogate drop {sur}");
}
