//! Fits the logistic approximation for every table row and prints CSV.

use std::time::Instant;

fn main() -> noise_radar::Result<()> {
    let t = Instant::now();
    let rows = noise_radar::logistic::reproduce_tables()?;
    noise_radar::logistic::write_table_csv(&rows, std::io::stdout())?;
    eprintln!("{} rows in {:.1?}", rows.len(), t.elapsed());
    Ok(())
}
