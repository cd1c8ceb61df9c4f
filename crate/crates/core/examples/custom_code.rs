// A user-defined code runs through the same pipeline: here the
// first-order Reed-Muller code of length 16.

use sfq_ecc::codes::{analyze_patterns, reed_muller_1, CorrectionRule};
use sfq_ecc::sim::verify_equivalence;
use sfq_ecc::synth::{cost_report, synthesize, CellLibrary};
use sfq_ecc::{DecodeMode, LinearCode};

pub fn run_example() -> sfq_ecc::Result<()> {
    let code = LinearCode::from_rows("rm14", &reed_muller_1(4), CorrectionRule::Correlation)?;
    println!(
        "{} (n={}, k={}), d_min {}",
        code.name(),
        code.n(),
        code.k(),
        code.d_min()
    );
    for t in 1..=4 {
        let a = analyze_patterns(&code, DecodeMode::Correct, t);
        println!("  weight {t}: corrected {} / {}", a.corrected, a.total);
    }

    let netlist = synthesize(&code)?;
    let s = netlist.check_structure()?;
    let cost = cost_report(&netlist, &CellLibrary::default_library())?;
    let eq = verify_equivalence(&netlist, &code)?;
    println!(
        "netlist: {} cells, latency {}, {} JJ, equivalent over {} messages: {}",
        netlist.cells.len(),
        s.latency,
        cost.jj_total,
        eq.messages_checked,
        eq.equivalent
    );
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
