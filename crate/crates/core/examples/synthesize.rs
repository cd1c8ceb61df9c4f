// Synthesize the three encoders and cost them with the shipped library.

use sfq_ecc::codes::BUILTIN_CODES;
use sfq_ecc::make_code;
use sfq_ecc::synth::{cost_report, synthesize, CellKind, CellLibrary};

pub fn run_example() -> sfq_ecc::Result<()> {
    let library = CellLibrary::default_library();
    println!(
        "{:<10} {:>4} {:>4} {:>10} {:>6} {:>5} {:>9} {:>9}",
        "code", "XOR", "DFF", "SPL (d+c)", "SFQ2DC", "JJ", "power uW", "area mm2"
    );
    for name in BUILTIN_CODES {
        let code = make_code(name)?;
        let netlist = synthesize(&code)?;
        let r = cost_report(&netlist, &library)?;
        println!(
            "{:<10} {:>4} {:>4} {:>4} ({:>2}+{:>2}) {:>6} {:>5} {:>9.1} {:>9.3}",
            name,
            r.count(CellKind::Xor),
            r.count(CellKind::Dff),
            r.count(CellKind::Splitter),
            r.data_splitters,
            r.clock_splitters,
            r.count(CellKind::Sfq2Dc),
            r.jj_total,
            r.power_total_uw,
            r.area_total_mm2
        );
    }

    let code = make_code("hamming84")?;
    println!("\nhamming84 output forms:");
    for form in code.boolean_forms() {
        println!("  {form}");
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
