use num_complex::Complex64;
use proptest::prelude::*;
use wavefield_core::{ChannelMatrix, Location};
use wavefield_experiments::data::Samples;
use wavefield_experiments::metrics::{nmse, CompressionRatio, NMSE_FLOOR_DB};
use wavefield_experiments::ExperimentError;
use wavefield_nn::CMat;

fn samples(entries: &[Vec<Complex64>], na: usize, ns: usize) -> Samples {
    let records: Vec<ChannelMatrix> = entries
        .iter()
        .enumerate()
        .map(|(i, e)| ChannelMatrix::from_entries(na, ns, e.clone(), Location::new(i as f64, 0.0)).unwrap())
        .collect();
    Samples::from_records(na, ns, &records)
}

fn scaled(t: &Samples, f: impl Fn(Complex64) -> Complex64) -> CMat {
    let mut p = t.targets.clone();
    for n in 0..p.re.len() {
        let z = f(Complex64::new(p.re[n], p.im[n]));
        p.re[n] = z.re;
        p.im[n] = z.im;
    }
    p
}

fn channels() -> Samples {
    let e: Vec<Vec<Complex64>> = (0..5)
        .map(|s| (0..6).map(|n| Complex64::new(1.0 + (s * n) as f64, 0.5 - n as f64 * 0.3)).collect())
        .collect();
    samples(&e, 2, 3)
}

#[test]
fn exact_prediction_is_clamped() {
    let t = channels();
    assert_eq!(nmse(&t, &t.targets, None).unwrap().nmse_db, NMSE_FLOOR_DB);
}

#[test]
fn zero_prediction_is_zero_db() {
    let t = channels();
    let r = nmse(&t, &CMat::zeros(5, 6), None).unwrap();
    assert!(r.nmse_db.abs() < 1e-12);
    assert!(r.per_antenna_db.iter().chain(&r.per_frequency_db).all(|v| v.abs() < 1e-12));
}

#[test]
fn ten_percent_scaling_is_minus_twenty_db() {
    let t = channels();
    let r = nmse(&t, &scaled(&t, |z| z * 1.1), None).unwrap();
    assert!((r.nmse_db - 20.0 * 0.1f64.log10()).abs() < 1e-9);
    assert_eq!(r.per_antenna_db.len(), 2);
    assert_eq!(r.per_frequency_db.len(), 3);
}

#[test]
fn zero_norm_truth_is_an_error() {
    let mut e = vec![vec![Complex64::new(1.0, 0.0); 4]; 3];
    e[1] = vec![Complex64::new(0.0, 0.0); 4];
    let t = samples(&e, 2, 2);
    assert!(matches!(nmse(&t, &CMat::zeros(3, 4), None), Err(ExperimentError::ZeroNormTruth { index: 1 })));
}

#[test]
fn frequency_mask_restricts_the_error() {
    let t = channels();
    let mut p = t.targets.clone();
    // Corrupt the last subcarrier only.
    for s in 0..5 {
        for j in 0..2 {
            p.re[(s * 2 + j) * 3 + 2] += 1.0;
        }
    }
    assert_eq!(nmse(&t, &p, Some(&[true, true, false])).unwrap().nmse_db, NMSE_FLOOR_DB);
    assert!(nmse(&t, &p, Some(&[false, false, true])).unwrap().nmse_db > -30.0);
}

#[test]
fn compression_ratio_arithmetic() {
    let r = CompressionRatio::new(64, 64, 210_000, 9_100_000);
    assert_eq!(r.numerator, 2 * 64 * 64 * 210_000);
    assert_eq!(r.denominator, 9_100_000);
    assert!((r.value() - 189.0).abs() < 0.1);
}

proptest! {
    #[test]
    fn nmse_is_invariant_to_a_global_phase(
        vals in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -0.3f64..0.3, -0.3f64..0.3), 8),
        phase in 0.0f64..std::f64::consts::TAU,
    ) {
        let truth: Vec<Complex64> = vals.iter().map(|v| Complex64::new(v.0 + 2.0, v.1)).collect();
        let pred: Vec<Complex64> = vals.iter().zip(&truth).map(|(v, t)| t + Complex64::new(v.2, v.3)).collect();
        let rot = Complex64::from_polar(1.0, phase);
        let t = samples(std::slice::from_ref(&truth), 2, 4);
        let p = samples(std::slice::from_ref(&pred), 2, 4).targets;
        let tr = samples(&[truth.iter().map(|z| z * rot).collect()], 2, 4);
        let pr = samples(&[pred.iter().map(|z| z * rot).collect()], 2, 4).targets;
        let a = nmse(&t, &p, None).unwrap();
        let b = nmse(&tr, &pr, None).unwrap();
        prop_assert!((a.nmse_db - b.nmse_db).abs() < 1e-9);
    }
}
