//! Genotype geometry for a few values of b: distances, kernel, feature maps,
//! and the dosage / multiallelic extensions.

use gdc_gwas::error::Result;
use gdc_gwas::premetric::PremetricB;

fn main() -> Result<()> {
    for b in [0.0, 1.0, 2.0, 3.0, 4.0] {
        let pm = PremetricB::new(b)?;
        let phi = pm.canonical_feature_map();
        println!("b = {b}");
        for x in 0..3u8 {
            let d: Vec<f64> = (0..3).map(|y| pm.distance(x, y)).collect();
            let k: Vec<f64> = (0..3).map(|y| pm.kernel(x, y)).collect();
            println!("  x={x}  d={d:?}  k={k:?}  phi={:?}", phi.eval(x));
        }
        // squared feature distance is twice the premetric
        println!("  |phi(0)-phi(2)|^2 = {}", phi.sq_distance(0, 2));
    }

    let pm = PremetricB::new(3.0)?;
    println!("dosage features at 0.5: {:?}", pm.dosage_features(0.5)?);
    println!("dosage distance 1.5 vs 0.5: {}", pm.dosage_distance(1.5, 0.5)?);
    println!(
        "triallelic distance (1,1,0) vs (1,0,1): {}",
        pm.multiallelic_distance(&[1.0, 1.0, 0.0], &[1.0, 0.0, 1.0])?
    );
    Ok(())
}
