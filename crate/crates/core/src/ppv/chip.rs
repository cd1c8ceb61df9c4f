use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};

use super::config::{Distribution, Margins, PpvConfig};
use crate::bits::BitVector;
use crate::codes::{DecodeMode, DecodeTable, LinearCode};
use crate::error::{Error, Result};
use crate::sim::{CompiledNetlist, Disturbance, SimState};
use crate::synth::{baseline_no_encoder, synthesize, Netlist};

/// Independent random streams per chip.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Deviations = 1,
    Messages = 2,
    Faults = 3,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for one chip's stream; depends only on its arguments.
pub fn derive_seed(master: u64, chip: usize, stream: Stream) -> u64 {
    splitmix(splitmix(splitmix(master) ^ chip as u64) ^ stream as u64)
}

pub fn stream_rng(master: u64, chip: usize, stream: Stream) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, chip, stream))
}

/// One fabricated instance: a deviation per cell and the resulting fault flags.
#[derive(Clone, Debug, PartialEq)]
pub struct ChipInstance {
    pub index: usize,
    /// Indexed by cell id; zero for inputs and the clock source.
    pub deviations: Vec<f64>,
    pub faulty: Vec<bool>,
}

impl ChipInstance {
    pub fn from_deviations(
        netlist: &Netlist,
        margins: &Margins,
        index: usize,
        deviations: Vec<f64>,
    ) -> Result<Self> {
        if deviations.len() != netlist.cells.len() {
            return Err(Error::invalid(format!(
                "{} deviations for {} cells",
                deviations.len(),
                netlist.cells.len()
            )));
        }
        let faulty = netlist
            .cells
            .iter()
            .zip(&deviations)
            .map(|(c, d)| margins.get(c.kind).is_some_and(|rho| d.abs() > rho))
            .collect();
        Ok(ChipInstance {
            index,
            deviations,
            faulty,
        })
    }

    /// A chip whose only faulty cells are `cells`.
    pub fn with_faulty(netlist: &Netlist, index: usize, cells: &[usize]) -> Self {
        let mut faulty = vec![false; netlist.cells.len()];
        for &c in cells {
            faulty[c] = true;
        }
        ChipInstance {
            index,
            deviations: vec![0.0; netlist.cells.len()],
            faulty,
        }
    }

    pub fn fault_count(&self) -> usize {
        self.faulty.iter().filter(|&&f| f).count()
    }
}

pub fn sample_deviations(netlist: &Netlist, cfg: &PpvConfig, chip_index: usize) -> Vec<f64> {
    let mut rng = stream_rng(cfg.seed, chip_index, Stream::Deviations);
    let sigma = cfg.spread;
    let normal = Normal::new(0.0, sigma / 2.0).ok();
    netlist
        .cells
        .iter()
        .map(|c| {
            if !c.kind.is_physical() || sigma == 0.0 {
                return 0.0;
            }
            match (cfg.distribution, &normal) {
                (Distribution::GaussianTruncated, Some(n)) => loop {
                    let d: f64 = n.sample(&mut rng);
                    if d.abs() <= sigma {
                        break d;
                    }
                },
                _ => rng.random_range(-sigma..=sigma),
            }
        })
        .collect()
}

pub fn sample_chip(netlist: &Netlist, cfg: &PpvConfig, chip_index: usize) -> ChipInstance {
    let deviations = sample_deviations(netlist, cfg, chip_index);
    ChipInstance::from_deviations(netlist, &cfg.margins, chip_index, deviations)
        .expect("one deviation per cell")
}

/// Misbehaviour of faulty cells, drawn from `rng` on every evaluation.
pub struct Faults<'a, R> {
    pub faulty: &'a [bool],
    pub misfire: f64,
    pub rng: &'a mut R,
}

impl<R: Rng> Faults<'_, R> {
    fn fires(&mut self, cell: usize) -> bool {
        self.faulty[cell] && self.rng.random_bool(self.misfire)
    }
}

impl<R: Rng> Disturbance for Faults<'_, R> {
    fn xor(&mut self, cell: usize, value: bool) -> bool {
        value ^ self.fires(cell)
    }

    fn dff(&mut self, cell: usize, value: bool) -> bool {
        value && !self.fires(cell)
    }

    fn splitter(&mut self, cell: usize, value: bool) -> (bool, bool) {
        if value && self.fires(cell) {
            if self.rng.random_bool(0.5) {
                (false, true)
            } else {
                (true, false)
            }
        } else {
            (value, value)
        }
    }

    fn converter(&mut self, cell: usize, value: bool) -> bool {
        value ^ self.fires(cell)
    }
}

#[derive(Clone, Debug)]
enum Decoder {
    Identity,
    Code(DecodeTable),
}

/// An encoder netlist together with the receiver that decodes its output.
#[derive(Clone, Debug)]
pub struct Setup {
    pub name: String,
    pub netlist: Netlist,
    compiled: CompiledNetlist,
    decoder: Decoder,
}

impl Setup {
    /// Synthesized encoder with a correcting decoder.
    pub fn encoder(code: &LinearCode) -> Result<Self> {
        Setup::with_netlist(code, synthesize(code)?)
    }

    pub fn with_netlist(code: &LinearCode, netlist: Netlist) -> Result<Self> {
        let compiled = CompiledNetlist::new(&netlist)?;
        if compiled.n_inputs() != code.k() || compiled.n_outputs() != code.n() {
            return Err(Error::Structural(format!(
                "netlist shape {}x{} does not match {}",
                compiled.n_inputs(),
                compiled.n_outputs(),
                code.name()
            )));
        }
        Ok(Setup {
            name: code.name().to_string(),
            netlist,
            compiled,
            decoder: Decoder::Code(DecodeTable::new(code, DecodeMode::Correct)?),
        })
    }

    /// Uncoded link of `width` converter-only lines; received bits are the message.
    pub fn baseline(width: usize) -> Result<Self> {
        let netlist = baseline_no_encoder(width);
        Ok(Setup {
            name: "none".to_string(),
            compiled: CompiledNetlist::new(&netlist)?,
            netlist,
            decoder: Decoder::Identity,
        })
    }

    /// Builds a setup by name; `none` is the uncoded baseline.
    pub fn named(name: &str) -> Result<Self> {
        if name == "none" {
            Setup::baseline(4)
        } else {
            Setup::encoder(&crate::codes::make_code(name)?)
        }
    }

    pub fn message_bits(&self) -> usize {
        self.compiled.n_inputs()
    }

    pub fn compiled(&self) -> &CompiledNetlist {
        &self.compiled
    }

    /// Whether the receiver delivers something other than `sent`.
    pub fn is_erroneous(&self, sent: u64, received: u64, count_detected: bool) -> bool {
        match &self.decoder {
            Decoder::Identity => received != sent,
            Decoder::Code(table) => match table.lookup(received) {
                (_, Some(m)) => m != sent,
                (_, None) => count_detected,
            },
        }
    }
}

/// Runs one message through the chip, returning the received word.
pub fn inject_and_run<R: Rng>(
    setup: &Setup,
    chip: &ChipInstance,
    message: &BitVector,
    cfg: &PpvConfig,
    rng: &mut R,
) -> Result<BitVector> {
    if message.len() != setup.message_bits() {
        return Err(Error::invalid(format!(
            "message `{message}` has {} bits, {} expects {}",
            message.len(),
            setup.name,
            setup.message_bits()
        )));
    }
    let mut state = setup.compiled.new_state();
    let word = run_one(setup, chip, message.to_mask(), cfg.misfire, &mut state, rng);
    Ok(BitVector::from_mask(word, setup.compiled.n_outputs()))
}

fn run_one<R: Rng>(
    setup: &Setup,
    chip: &ChipInstance,
    message: u64,
    misfire: f64,
    state: &mut SimState,
    rng: &mut R,
) -> u64 {
    let mut faults = Faults {
        faulty: &chip.faulty,
        misfire,
        rng,
    };
    setup.compiled.run_message(state, message, &mut faults)
}

/// Sends `cfg.messages` random messages through the chip and counts the
/// erroneous deliveries.
pub fn run_trial(setup: &Setup, chip: &ChipInstance, cfg: &PpvConfig) -> usize {
    if cfg.misfire == 0.0 || chip.fault_count() == 0 {
        return 0;
    }
    let mut messages = stream_rng(cfg.seed, chip.index, Stream::Messages);
    let mut faults = stream_rng(cfg.seed, chip.index, Stream::Faults);
    let mut state = setup.compiled.new_state();
    let span = 1u64 << setup.message_bits();
    (0..cfg.messages)
        .filter(|_| {
            let sent = messages.random_range(0..span);
            let received = run_one(setup, chip, sent, cfg.misfire, &mut state, &mut faults);
            setup.is_erroneous(sent, received, cfg.count_detected_as_error)
        })
        .count()
}
