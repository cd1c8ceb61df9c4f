// Recover per-cell Josephson-junction counts from encoder totals, and fit
// power and area per cell.

use sfq_ecc::synth::{calibrate_library, fit_library, CellKind, REFERENCE_TOTALS};

pub fn run_example() -> sfq_ecc::Result<()> {
    let jj = calibrate_library(&REFERENCE_TOTALS)?;
    for (kind, n) in CellKind::PHYSICAL.iter().zip(jj) {
        println!("{kind:<9} {n:>2} JJ");
    }
    for row in &REFERENCE_TOTALS {
        let total: u32 = row.counts.iter().zip(jj).map(|(c, j)| c * j).sum();
        println!(
            "{:<10} {:?} -> {} JJ (table {})",
            row.name, row.counts, total, row.jj
        );
    }

    let library = fit_library(&REFERENCE_TOTALS)?;
    println!();
    print!("{}", library.to_config());
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
