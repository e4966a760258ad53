//! Shadowed-Rician and Nakagami power-gain distributions, checked against
//! sampled histograms.

use ostn::fading::{nakagami_gain_cdf, sr_coeffs_adaptive, sr_gain_cdf, sr_gain_pdf, NakagamiParams, NakagamiSampler, SrParams, SrSampler};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> ostn::Result<()> {
    let eta = 10.0;
    let links = [
        ("light shadowing", SrParams::new(5.0, 0.251, 0.279)?),
        ("heavy shadowing", SrParams::new(1.95, 0.063, 0.0005)?),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let n = 200_000;

    for (label, p) in links {
        let c = sr_coeffs_adaptive(&p, 1e-15, 400)?;
        let sampler = SrSampler::new(&p, eta)?;
        let mut draws: Vec<f64> = (0..n).map(|_| sampler.sample(&mut rng)).collect();
        draws.sort_by(f64::total_cmp);
        println!("{label}: {} series terms, mean power {:.4}", c.len(), p.mean_power());
        for x in [0.5, 2.0, 8.0] {
            let empirical = draws.partition_point(|&d| d <= x) as f64 / n as f64;
            println!(
                "  x={x:<4} pdf={:.5} cdf={:.5} sampled={:.5}",
                sr_gain_pdf(&c, eta, x)?,
                sr_gain_cdf(&c, eta, x)?,
                empirical
            );
        }
    }

    let nak = NakagamiParams::new(1.77, 1.0)?;
    let s = NakagamiSampler::new(&nak, eta)?;
    let below = (0..n).filter(|_| s.sample(&mut rng) <= 5.0).count() as f64 / n as f64;
    println!("nakagami m=1.77: cdf(5)={:.5} sampled={below:.5}", nakagami_gain_cdf(&nak, eta, 5.0)?);
    Ok(())
}
