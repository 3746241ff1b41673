//! Window-truncated hit-time sampling: draws against the analytic CDF,
//! with a Kolmogorov-Smirnov check and a histogram sketch.
//!
//!     cargo run --release --example sample_profiles

use collapse_probe::profiles::{ExperimentGeometry, PulseProfile, PulseShape};
use collapse_probe::rng::SimRng;

fn main() -> collapse_probe::Result<()> {
    let profile = PulseProfile::new(PulseShape::Sech2, 1000.0, 0.0)?;
    let geometry = ExperimentGeometry::new(profile, 3.3, 1e6, None)?;
    let sampler = geometry.left_sampler()?;

    let n = 200_000usize;
    let mut rng = SimRng::new(7);
    let mut draws: Vec<f64> = (0..n).map(|_| sampler.sample(&mut rng)).collect();
    draws.sort_by(|a, b| a.partial_cmp(b).unwrap());

    // KS distance between the empirical CDF and the truncated analytic one
    let (lo, hi) = geometry.window();
    let c_lo = profile.cdf(lo);
    let span = profile.cdf(hi) - c_lo;
    let mut d = 0.0f64;
    for (i, x) in draws.iter().enumerate() {
        let f = (profile.cdf(*x) - c_lo) / span;
        d = d.max((f - i as f64 / n as f64).abs());
        d = d.max(((i + 1) as f64 / n as f64 - f).abs());
    }
    println!("samples        : {n}");
    println!("KS statistic   : {d:.5}  (1% critical value {:.5})", 1.63 / (n as f64).sqrt());
    println!("sample range   : [{:.1}, {:.1}] fs", draws[0], draws[n - 1]);
    println!();

    // histogram over +-4 sigma around the pulse center
    let bins = 41usize;
    let (a, b) = (-4000.0, 4000.0);
    let width = (b - a) / bins as f64;
    let mut hist = vec![0usize; bins];
    for x in &draws {
        if *x >= a && *x < b {
            hist[((x - a) / width) as usize] += 1;
        }
    }
    let max = *hist.iter().max().unwrap() as f64;
    println!("hit-time density (sech^2 pulse, sigma_t = 1 ps):");
    for (k, count) in hist.iter().enumerate() {
        let center = a + (k as f64 + 0.5) * width;
        let bar = "#".repeat((60.0 * *count as f64 / max).round() as usize);
        println!("{center:>8.0} fs |{bar}");
    }
    Ok(())
}
