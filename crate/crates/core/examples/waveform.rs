// Pipelined simulation of the Hamming(8,4) encoder at 5 GHz.

use sfq_ecc::sim::{codeword_time_ns, simulate, timeline_csv, to_timeline, verify_equivalence};
use sfq_ecc::synth::synthesize;
use sfq_ecc::{make_code, BitVector};

pub fn run_example() -> sfq_ecc::Result<()> {
    let code = make_code("hamming84")?;
    let netlist = synthesize(&code)?;
    let eq = verify_equivalence(&netlist, &code)?;
    println!("equivalent to the generator matrix: {}", eq.equivalent);

    let frames: Vec<BitVector> = ["1011", "0000", "1111"]
        .iter()
        .map(|m| m.parse())
        .collect::<Result<_, _>>()?;
    let result = simulate(&netlist, &frames, frames.len() + 2)?;
    for (t, out) in result.outputs.iter().enumerate() {
        let input = frames.get(t).map_or("----".to_string(), |f| f.to_string());
        println!("cycle {t}: in {input}  out {out}");
    }
    println!(
        "1011 arrives as {} at {:.2} ns",
        result.codeword_for(0).expect("simulated"),
        codeword_time_ns(&result, 0, 5.0, 0.1)
    );

    let csv = timeline_csv(&to_timeline(&result, 5.0, 0.1)?);
    for line in csv.lines().take(6) {
        println!("{line}");
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
