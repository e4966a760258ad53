//! Satellite outage bound, high-SNR asymptote and diversity order for a few
//! presets.

use ostn::harness::{db_to_linear, preset};
use ostn::outage::{diversity_order, sat_op_bound, Network};

fn main() -> ostn::Result<()> {
    for name in ["fig1-s1-K1-m1", "fig1-s1-K2-m2", "fig2-s3-K2-m0.6", "fig5-s1-K2-m2-b"] {
        let ctx = preset(name)?.ctx;
        println!("{name} (diversity {})", diversity_order(&ctx, Network::Satellite));
        for db in [0.0, 10.0, 20.0, 30.0, 40.0] {
            let p = sat_op_bound(&ctx.with_eta(db_to_linear(db)))?;
            let asym = p.op_asymptotic.map_or("-".to_string(), |a| format!("{a:.4e}"));
            println!("  {db:>4} dB  bound {:.4e}  asymptote {asym}  [{}]", p.op_bound, p.branch);
        }
    }

    // the power split cannot carry the primary rate: certain outage
    let hard = preset("s1")?.ctx.with_mu(0.4);
    println!("mu=0.4: {:?}", sat_op_bound(&hard)?.branch);
    Ok(())
}
