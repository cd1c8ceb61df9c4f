// Fit margin and misfire probability to target zero-error rates on a
// small grid.

use sfq_ecc::ppv::{calibrate_fault_model, CalibrationGrid, PpvConfig, REFERENCE_TARGETS, SETUPS};

pub fn run_example() -> sfq_ecc::Result<()> {
    let base = PpvConfig {
        chips: 300,
        seed: 2024,
        ..PpvConfig::default()
    };
    let grid = CalibrationGrid {
        margin_fractions: vec![1.0, 0.98, 0.96, 0.94],
        misfire: vec![1e-3, 3e-3, 1e-2, 3e-2],
    };
    let cal = calibrate_fault_model(REFERENCE_TARGETS, &base, &grid, 200)?;
    println!(
        "margin {:.3}, misfire {:.0e}, {} runs, converged {}",
        cal.config.margins.xor, cal.config.misfire, cal.evaluations, cal.converged
    );
    for (i, name) in SETUPS.iter().enumerate() {
        println!(
            "{name:<10} target {:.3} achieved {:.3}",
            cal.targets[i], cal.achieved[i]
        );
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
