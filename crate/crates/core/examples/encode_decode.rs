// Encode a message, corrupt it, and decode under each mode.

use sfq_ecc::{make_code, BitVector, DecodeMode};

pub fn run_example() -> sfq_ecc::Result<()> {
    let message: BitVector = "1011".parse()?;
    for name in ["hamming74", "hamming84", "rm13"] {
        let code = make_code(name)?;
        let sent = code.encode(&message)?;
        println!("{name}: {message} -> {sent}");
        for flips in [&[][..], &[2], &[0, 5]] {
            let mut received = sent.clone();
            for &i in flips {
                received.flip(i);
            }
            print!("  received {received}:");
            for mode in [
                DecodeMode::DetectOnly,
                DecodeMode::Correct,
                DecodeMode::CorrectOptimistic,
            ] {
                let out = code.decode(&received, mode)?;
                let msg = out.message.map_or("-".to_string(), |m| m.to_string());
                print!("  {mode} {:?} {msg}", out.status);
            }
            println!();
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
