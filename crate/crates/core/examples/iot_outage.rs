//! IoT outage bound on both sides of the γ_s = 1/μ' threshold, plus the
//! selected-relay conditional cdf that drives it.

use ostn::harness::{db_to_linear, preset};
use ostn::outage::{iot_op_bound, iot_selected_cdf};

fn main() -> ostn::Result<()> {
    for name in ["fig3-s1-K2-m2", "fig3-s2-K2-m2-gs0.3", "fig4-s3-K2-m0.6"] {
        let ctx = preset(name)?.ctx;
        println!("{name}: gamma_s={:.2}, 1/mu'={:.3}", ctx.gamma_s(), 1.0 / ctx.mu_prime());
        for db in [0.0, 15.0, 30.0, 45.0] {
            let p = iot_op_bound(&ctx.with_eta(db_to_linear(db)))?;
            println!("  {db:>4} dB  {:.4e}  [{}]  series terms <= {}", p.op_bound, p.branch, p.series.max_terms);
        }
    }

    let ctx = preset("s1")?.ctx.with_eta(db_to_linear(5.0));
    print!("selected first-hop cdf at w=0.5:");
    for x in [0.5, 1.0, 2.0, 4.0] {
        print!(" F({x})={:.4}", iot_selected_cdf(&ctx, x, 0.5)?);
    }
    println!();
    Ok(())
}
