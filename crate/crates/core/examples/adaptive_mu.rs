//! Smallest power split meeting a 10% satellite outage target, across SNR.

use ostn::adaptive_mu::{feasible_mu_range, solve_mu, QosSpec};
use ostn::harness::{db_to_linear, preset};
use ostn::outage::iot_op_bound;
use ostn::OstnError;

fn main() -> ostn::Result<()> {
    let qos = QosSpec::new(0.1)?;
    for name in ["fig9-adaptive", "fig11-adaptive-b", "fig12-adaptive-b"] {
        let ctx = preset(name)?.ctx;
        println!("{name}: feasible mu {:?}", feasible_mu_range(ctx.gamma_p()));
        for db in (0..=60).step_by(10) {
            let at = ctx.with_eta(db_to_linear(db as f64));
            match solve_mu(&at, &qos) {
                Ok(s) => {
                    let iot = iot_op_bound(&at.with_mu(s.mu))?.op_bound;
                    println!("  {db:>3} dB  mu*={:.5}  sat={:.4}  iot={iot:.4e}  ({} evaluations)", s.mu, s.op, s.evaluations);
                }
                Err(OstnError::Infeasible { op_at_one, .. }) => {
                    println!("  {db:>3} dB  infeasible (sat outage {op_at_one:.3} even at mu -> 1)")
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(())
}
