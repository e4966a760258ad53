//! Hypergeometric and incomplete-gamma evaluations, including the regimes
//! where naive series cancel.

use ostn::specfun::{gamma_p, gamma_q, gauss_2f1, kummer_1f1, tricomi_u, upper_inc_gamma, EvalPolicy};

fn main() -> ostn::Result<()> {
    let pol = EvalPolicy::default();

    println!("1F1(a; b; z)");
    for (a, b, z) in [(1.0, 2.0, 1.0), (0.5, 1.5, -20.0), (3.0, 7.5, 40.0)] {
        println!("  1F1({a}; {b}; {z:>5}) = {:.15e}", kummer_1f1(a, b, z, pol)?);
    }

    // z < 0 goes through a Pfaff transform with positive terms
    println!("2F1(a, b; c; z)");
    for z in [-0.5, -5.0, -500.0, 0.9] {
        println!("  2F1(1.2, 2.0; 3.5; {z:>6}) = {:.15e}", gauss_2f1(1.2, 2.0, 3.5, z, pol)?);
    }

    println!("U(a, b, z)");
    for z in [0.1, 1.0, 25.0] {
        println!("  U(1.5, 0.7, {z:>4}) = {:.15e}", tricomi_u(1.5, 0.7, z, pol)?);
    }

    println!("incomplete gamma");
    for (a, x) in [(0.6, 1e-3), (2.0, 3.0), (30.0, 80.0)] {
        let (p, q) = (gamma_p(a, x)?, gamma_q(a, x)?);
        println!("  a={a:<4} x={x:<6} P={p:.6e} Q={q:.6e} P+Q-1={:+.1e} Γ(a,x)={:.6e}", p + q - 1.0, upper_inc_gamma(a, x)?);
    }
    Ok(())
}
