//! Runs a preset sweep from a flat config, writes CSV and reads it back.

use ostn::harness::{read_csv, run_sweep, write_csv, FlatConfig};

fn main() -> ostn::Result<()> {
    let cfg = FlatConfig::parse(
        "preset = fig1-s1-K2-m2
         snr = 0:40:10
         trials = 200000
         seed = 7",
    )?;
    let curve = run_sweep(&cfg.to_spec()?)?;

    let mut buf = Vec::new();
    write_csv(&curve.rows, &mut buf)?;
    print!("{}", String::from_utf8_lossy(&buf));

    assert_eq!(read_csv(&buf[..])?, curve.rows);
    eprintln!("{} rows round-tripped", curve.rows.len());
    Ok(())
}
