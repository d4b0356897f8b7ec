use gdc_gwas::adjust::{residualize, CovariateMatrix};
use gdc_gwas::gdc::{dcov_fast, dcov_kernel_form, dcov_oracle, standardized_statistic};
use gdc_gwas::genotype::genotype_frequencies;
use gdc_gwas::nulldist::{exact_pvalue, genf_cdf, genf_sf, pvalue_bounds, spectrum_unadjusted, NullSpectrum};
use gdc_gwas::premetric::PremetricB;
use gdc_gwas::scan::{decode_packed, encode_packed};
use gdc_gwas::simbench::wilson_interval;
use proptest::prelude::*;

fn b_grid() -> impl Strategy<Value = f64> {
    (0..=8u32).prop_map(|i| i as f64 * 0.5)
}

fn instance(max_n: usize) -> impl Strategy<Value = (Vec<u8>, Vec<f64>)> {
    (4..max_n).prop_flat_map(|n| {
        (
            prop::collection::vec(0u8..3, n),
            prop::collection::vec(-10.0f64..10.0, n),
        )
    })
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #[test]
    fn feature_distance_is_twice_premetric(b in 0.0f64..=4.0) {
        let pm = PremetricB::new(b).unwrap();
        for map in [pm.canonical_feature_map(), pm.regime_feature_map()] {
            for x in 0..3u8 {
                for y in 0..3u8 {
                    prop_assert!((map.sq_distance(x, y) - 2.0 * pm.distance(x, y)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn kernel_matches_distance(b in 0.0f64..=4.0) {
        let pm = PremetricB::new(b).unwrap();
        for x in 0..3u8 {
            for y in 0..3u8 {
                let lhs = pm.kernel(x, x) + pm.kernel(y, y) - 2.0 * pm.kernel(x, y);
                prop_assert!((lhs - 2.0 * pm.distance(x, y)).abs() < 1e-12);
                prop_assert_eq!(pm.distance(x, y), pm.distance(2 - x, 2 - y));
            }
        }
    }

    #[test]
    fn dosage_and_multiallelic_agree_at_calls(b in 0.0f64..=4.0, x in 0u8..3, y in 0u8..3) {
        let pm = PremetricB::new(b).unwrap();
        prop_assert!((pm.dosage_distance(x as f64, y as f64).unwrap() - pm.distance(x, y)).abs() < 1e-12);
        let ax = [2.0 - x as f64, x as f64];
        let ay = [2.0 - y as f64, y as f64];
        prop_assert!((pm.multiallelic_distance(&ax, &ay).unwrap() - pm.distance(x, y)).abs() < 1e-12);
    }

    #[test]
    fn three_forms_agree(b in b_grid(), (x, y) in instance(80)) {
        let pm = PremetricB::new(b).unwrap();
        let o = dcov_oracle(&pm, &x, &y).unwrap();
        let f = dcov_fast(&pm, &x, &y).unwrap();
        let k = dcov_kernel_form(&pm, &x, &y).unwrap();
        let scale = y.iter().map(|v| v * v).sum::<f64>() / y.len() as f64 * 4.0;
        prop_assert!((o - f).abs() <= 1e-12 * o.abs().max(scale * 1e-3));
        prop_assert!((o - k).abs() <= 1e-12 * o.abs().max(scale * 1e-3));
    }

    #[test]
    fn statistic_ignores_location_scale_and_relabeling(
        b in b_grid(), (x, y) in instance(60), shift in -100.0f64..100.0, scale in 0.01f64..100.0
    ) {
        prop_assume!(y.iter().any(|v| (v - y[0]).abs() > 1e-6));
        let pm = PremetricB::new(b).unwrap();
        let (k, _) = standardized_statistic(&pm, &x, &y).unwrap();
        let y2: Vec<f64> = y.iter().map(|v| shift + scale * v).collect();
        let (k2, _) = standardized_statistic(&pm, &x, &y2).unwrap();
        let xs: Vec<u8> = x.iter().map(|g| 2 - g).collect();
        let (k3, _) = standardized_statistic(&pm, &xs, &y).unwrap();
        prop_assert!((k - k2).abs() <= 1e-8 * k.max(1e-6));
        prop_assert!((k - k3).abs() <= 1e-10 * k.max(1e-6));
    }

    #[test]
    fn bounds_sandwich_exact(
        l1 in 0.01f64..2.0, ratio in 0.0f64..1.0, n in 8usize..3000, frac in 0.0f64..1.5
    ) {
        let l2 = l1 * ratio;
        let lambdas = if l2 > 0.0 { vec![l1, l2] } else { vec![l1] };
        let spec = NullSpectrum { lambdas, n, df_sub: 1, sigma2_hat: None };
        let k = frac * l1 * n as f64;
        let (lo, hi) = pvalue_bounds(&spec, k).unwrap();
        let p = exact_pvalue(&spec, k).unwrap().p;
        prop_assert!(lo <= p * (1.0 + 1e-9) + 1e-300, "lo {} p {}", lo, p);
        prop_assert!(p <= hi * (1.0 + 1e-9) + 1e-300, "p {} hi {}", p, hi);
    }

    #[test]
    fn genf_cdf_and_sf_complement(a1 in 0.05f64..3.0, a2 in 0.05f64..3.0, nu in 1usize..200, x in 0.001f64..20.0) {
        let c = genf_cdf(a1, a2, nu, x).unwrap();
        let s = genf_sf(a1, a2, nu, x).unwrap();
        prop_assert!((c + s - 1.0).abs() < 1e-10);
        prop_assert!(genf_cdf(a1, a2, nu, x * 1.1).unwrap() >= c - 1e-12);
    }

    #[test]
    fn spectrum_is_sorted_and_bounded(b in b_grid(), (x, _) in instance(100)) {
        let pm = PremetricB::new(b).unwrap();
        let spec = spectrum_unadjusted(&pm, genotype_frequencies(&x), x.len()).unwrap();
        prop_assert!(spec.lambdas.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(spec.lambdas.iter().all(|&l| l >= 0.0 && l <= 4.0));
    }

    #[test]
    fn residuals_orthogonal_to_covariates(
        rows in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0), 10..60)
    ) {
        let y: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let z1: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let z2: Vec<f64> = rows.iter().map(|r| r.2).collect();
        let Ok((z, _)) = CovariateMatrix::from_columns(vec!["a".into(), "b".into()], vec![z1.clone(), z2.clone()]) else {
            return Ok(());
        };
        let Ok(r) = residualize(&y, &z) else { return Ok(()) };
        for col in [vec![1.0; y.len()], z1, z2] {
            let dot: f64 = col.iter().zip(&r.residuals).map(|(a, b)| a * b).sum();
            let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt() * y.iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!(dot.abs() <= 1e-9 * norm.max(1.0));
        }
    }

    #[test]
    fn packed_codec_round_trip(calls in prop::collection::vec(prop_oneof![Just(0u8), Just(1), Just(2), Just(u8::MAX)], 0..50)) {
        let bytes = encode_packed(&calls);
        prop_assert_eq!(bytes.len(), calls.len().div_ceil(4));
        prop_assert_eq!(decode_packed(&bytes, calls.len()), calls);
    }

    #[test]
    fn wilson_contains_point_estimate(n in 1usize..5000, frac in 0.0f64..=1.0) {
        let k = ((n as f64) * frac).floor() as usize;
        let (lo, hi) = wilson_interval(k, n, 0.95);
        let p = k as f64 / n as f64;
        prop_assert!(lo <= p + 1e-12 && p <= hi + 1e-12);
    }
}

#[test]
fn relabeling_keeps_pvalue() {
    let x: Vec<u8> = (0..50).map(|i| ((i * 7) % 3) as u8).collect();
    let y: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin()).collect();
    let xs: Vec<u8> = x.iter().map(|g| 2 - g).collect();
    let pm = PremetricB::new(3.0).unwrap();
    let p = |x: &[u8]| {
        let spec = spectrum_unadjusted(&pm, genotype_frequencies(x), x.len()).unwrap();
        exact_pvalue(&spec, standardized_statistic(&pm, x, &y).unwrap().0).unwrap().p
    };
    assert!(rel_close(p(&x), p(&xs), 1e-10));
}
