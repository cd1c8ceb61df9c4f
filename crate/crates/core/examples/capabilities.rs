// Minimum distance, weight-3 detection and the capability table for the
// three built-in codes.

use sfq_ecc::codes::{analyze_patterns, capability_summary, BUILTIN_CODES};
use sfq_ecc::{make_code, DecodeMode};

pub fn run_example() -> sfq_ecc::Result<()> {
    println!(
        "{:<10} {:>5} {:>13} {:>14} {:>12} {:>13}",
        "code", "d_min", "worst detect", "worst correct", "best detect", "best correct"
    );
    for name in BUILTIN_CODES {
        let code = make_code(name)?;
        let c = capability_summary(&code);
        println!(
            "{:<10} {:>5} {:>13} {:>14} {:>12} {:>13}",
            name, c.d_min, c.worst_detect, c.worst_correct, c.best_detect, c.best_correct
        );
    }

    let h74 = make_code("hamming74")?;
    let w3 = analyze_patterns(&h74, DecodeMode::DetectOnly, 3);
    println!(
        "\nhamming74 detect-only, weight 3: detected {} / {} ({:.0}%), undetected {}",
        w3.detected,
        w3.total,
        100.0 * w3.detected as f64 / w3.total as f64,
        w3.undetected
    );

    let rm = make_code("rm13")?;
    for mode in [DecodeMode::Correct, DecodeMode::CorrectOptimistic] {
        let a = analyze_patterns(&rm, mode, 2);
        println!(
            "rm13 {mode}, weight 2: corrected {} / {}, flagged {}",
            a.corrected, a.total, a.detected
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
