//! Simulated outage (exact SINR and bound events) next to the analytic
//! bounds.

use ostn::harness::{db_to_linear, preset};
use ostn::montecarlo::{empirical_conditional_cdf, simulate, Selection};
use ostn::outage::{iot_op_bound, iot_selected_cdf, sat_op_bound};

fn main() -> ostn::Result<()> {
    let trials = 1_000_000;
    let base = preset("s2")?.ctx;
    println!("{:>5} {:>11} {:>11} {:>11} | {:>11} {:>11} {:>11}", "dB", "sat exact", "sat mc", "sat bound", "iot exact", "iot mc", "iot bound");
    for db in [0.0, 10.0, 20.0] {
        let ctx = base.with_eta(db_to_linear(db));
        let r = simulate(&ctx, trials, 2024)?;
        println!(
            "{db:>5} {:>11.4e} {:>11.4e} {:>11.4e} | {:>11.4e} {:>11.4e} {:>11.4e}",
            r.sat_exact.p,
            r.sat_bound.p,
            sat_op_bound(&ctx)?.op_bound,
            r.iot_exact.p,
            r.iot_bound.p,
            iot_op_bound(&ctx)?.op_bound
        );
    }

    let ctx = preset("s1")?.ctx.with_eta(db_to_linear(5.0));
    let grid = [0.5, 1.0, 2.0, 4.0];
    let sim = empirical_conditional_cdf(&ctx, 0.5, &grid, 400_000, 9, Selection::MinBound)?;
    for (x, s) in grid.iter().zip(sim) {
        println!("F({x}|w=0.5): simulated {s:.4}  analytic {:.4}", iot_selected_cdf(&ctx, *x, 0.5)?);
    }
    Ok(())
}
