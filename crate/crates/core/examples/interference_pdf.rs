//! Density of the aggregate interference W_c = W_s + W_t, built as a gamma
//! mixture and compared with direct numerical convolution.

use ostn::harness::preset;
use ostn::interference::{default_truncation, wc_pdf, ws_coeffs, WcMixture};

fn main() -> ostn::Result<()> {
    for name in ["s1", "s4"] {
        let cfg = preset(name)?.ctx.interf;
        let terms = default_truncation(&cfg.sr);
        let mix = WcMixture::new(&cfg, terms)?;
        let ws = ws_coeffs(&cfg, terms)?;
        println!(
            "{name}: {} mixture parts, mean {:.4}, dropped mass {:.1e}, 1e-12 tail beyond w={:.2}",
            mix.parts.len(),
            mix.mean(),
            mix.dropped_mass,
            mix.tail_bound(1e-12)
        );
        for w in [0.05, 0.3, 1.0, 3.0] {
            println!("  w={w:<4} mixture={:.8e} convolution={:.8e}", mix.pdf(w)?, wc_pdf(&cfg, Some(&ws), w)?);
        }
    }
    Ok(())
}
