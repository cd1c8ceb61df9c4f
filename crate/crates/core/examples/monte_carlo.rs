// Process-variation Monte Carlo over the uncoded link and the three
// encoders, using the shipped fault model.

use sfq_ecc::ppv::{monte_carlo, PpvConfig, Setup, SETUPS};

pub fn run_example() -> sfq_ecc::Result<()> {
    let cfg = PpvConfig::calibrated();
    println!(
        "{} chips x {} messages, spread {}",
        cfg.chips, cfg.messages, cfg.spread
    );
    println!(
        "{:<10} {:>8} {:>8} {:>8}",
        "setup", "N <= 0", "N <= 1", "N <= 5"
    );
    for name in SETUPS {
        let cdf = monte_carlo(&Setup::named(name)?, &cfg)?;
        println!(
            "{:<10} {:>8.3} {:>8.3} {:>8.3}",
            name,
            cdf.cdf(0),
            cdf.cdf(1),
            cdf.cdf(5)
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
