//! Cycle-accurate simulation of SFQ netlists.
//!
//! One cycle is the atomic time unit. Clocked cells (XOR, DFF) emit the
//! value they latched on the previous clock and latch their current inputs
//! at the end of the cycle. Splitters and SFQ-to-DC converters propagate
//! within the cycle. A message injected at cycle `t` therefore reaches the
//! converters at cycle `t + latency`, and a new message can enter every cycle.

use std::fmt::Write as _;

use serde::Serialize;

use crate::bits::BitVector;
use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::synth::{CellKind, Netlist, Port, PortRef};

/// Per-input bit values for one clock cycle.
pub type Frame = BitVector;

/// Hook for perturbing cell behaviour. Every method receives the cell index
/// and the fault-free value and returns what the cell actually produces.
pub trait Disturbance {
    fn xor(&mut self, _cell: usize, value: bool) -> bool {
        value
    }

    fn dff(&mut self, _cell: usize, value: bool) -> bool {
        value
    }

    /// Values on `(out0, out1)`.
    fn splitter(&mut self, _cell: usize, value: bool) -> (bool, bool) {
        (value, value)
    }

    fn converter(&mut self, _cell: usize, value: bool) -> bool {
        value
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct FaultFree;

impl Disturbance for FaultFree {}

#[derive(Clone, Copy, Debug)]
enum Step {
    Input {
        net: usize,
        bit: usize,
    },
    Clock {
        net: usize,
    },
    Emit {
        cell: usize,
        net: usize,
    },
    Split {
        cell: usize,
        input: usize,
        out0: usize,
        out1: usize,
    },
    Convert {
        cell: usize,
        input: usize,
        bit: usize,
    },
}

#[derive(Clone, Copy, Debug)]
struct Latch {
    cell: usize,
    xor: bool,
    a: usize,
    b: usize,
    clk: usize,
}

/// A netlist checked and flattened into an evaluation schedule.
#[derive(Clone, Debug)]
pub struct CompiledNetlist {
    steps: Vec<Step>,
    latches: Vec<Latch>,
    n_nets: usize,
    n_cells: usize,
    latency: u32,
    input_names: Vec<String>,
    output_names: Vec<String>,
}

/// Mutable per-run state; reusable across runs of the same netlist.
#[derive(Clone, Debug)]
pub struct SimState {
    nets: Vec<bool>,
    latched: Vec<bool>,
    outputs: u64,
}

impl CompiledNetlist {
    pub fn new(netlist: &Netlist) -> Result<Self> {
        let structure = netlist.check_structure()?;
        if netlist.inputs.len() > 64 || netlist.outputs.len() > 64 {
            return Err(Error::invalid(
                "simulation supports at most 64 inputs and outputs",
            ));
        }
        let mut net_from = std::collections::BTreeMap::new();
        let mut net_to = std::collections::BTreeMap::new();
        for (i, net) in netlist.nets.iter().enumerate() {
            net_from.insert(net.from, i);
            net_to.insert(net.to, i);
        }
        let driven_by = |cell, port| net_to[&PortRef::new(cell, port)];
        let drives = |cell, port| net_from[&PortRef::new(cell, port)];

        let mut steps = Vec::new();
        let mut latches = Vec::new();
        for &id in &structure.topo_order {
            let cell = netlist.cell(id);
            match cell.kind {
                CellKind::Input => {
                    let bit = netlist
                        .inputs
                        .iter()
                        .position(|&i| i == id)
                        .expect("listed input");
                    steps.push(Step::Input {
                        net: drives(id, Port::Q),
                        bit,
                    });
                }
                CellKind::ClockInput => steps.push(Step::Clock {
                    net: drives(id, Port::Q),
                }),
                CellKind::Xor | CellKind::Dff => {
                    steps.push(Step::Emit {
                        cell: id.0,
                        net: drives(id, Port::Q),
                    });
                    let xor = cell.kind == CellKind::Xor;
                    latches.push(Latch {
                        cell: id.0,
                        xor,
                        a: driven_by(id, if xor { Port::A } else { Port::D }),
                        b: if xor {
                            driven_by(id, Port::B)
                        } else {
                            usize::MAX
                        },
                        clk: driven_by(id, Port::Clk),
                    });
                }
                CellKind::Splitter => steps.push(Step::Split {
                    cell: id.0,
                    input: driven_by(id, Port::In),
                    out0: drives(id, Port::Out0),
                    out1: drives(id, Port::Out1),
                }),
                CellKind::Sfq2Dc => steps.push(Step::Convert {
                    cell: id.0,
                    input: driven_by(id, Port::In),
                    bit: netlist
                        .outputs
                        .iter()
                        .position(|&o| o == id)
                        .expect("listed output"),
                }),
            }
        }
        // Emitting clocked cells first lets the rest follow topological order.
        steps.sort_by_key(|s| !matches!(s, Step::Emit { .. }));
        Ok(CompiledNetlist {
            steps,
            latches,
            n_nets: netlist.nets.len(),
            n_cells: netlist.cells.len(),
            latency: structure.latency,
            input_names: netlist
                .inputs
                .iter()
                .map(|&i| netlist.cell(i).name.clone())
                .collect(),
            output_names: netlist
                .outputs
                .iter()
                .map(|&o| netlist.cell(o).name.clone())
                .collect(),
        })
    }

    pub fn latency(&self) -> u32 {
        self.latency
    }

    pub fn n_inputs(&self) -> usize {
        self.input_names.len()
    }

    pub fn n_outputs(&self) -> usize {
        self.output_names.len()
    }

    pub fn new_state(&self) -> SimState {
        SimState {
            nets: vec![false; self.n_nets],
            latched: vec![false; self.n_cells],
            outputs: 0,
        }
    }

    /// Advances one cycle with packed `inputs`; returns packed converter outputs.
    pub fn step<D: Disturbance>(&self, state: &mut SimState, inputs: u64, dist: &mut D) -> u64 {
        state.outputs = 0;
        for step in &self.steps {
            match *step {
                Step::Input { net, bit } => state.nets[net] = (inputs >> bit) & 1 == 1,
                Step::Clock { net } => state.nets[net] = true,
                Step::Emit { cell, net } => state.nets[net] = state.latched[cell],
                Step::Split {
                    cell,
                    input,
                    out0,
                    out1,
                } => {
                    let (x, y) = dist.splitter(cell, state.nets[input]);
                    state.nets[out0] = x;
                    state.nets[out1] = y;
                }
                Step::Convert { cell, input, bit } => {
                    if dist.converter(cell, state.nets[input]) {
                        state.outputs |= 1 << bit;
                    }
                }
            }
        }
        for l in &self.latches {
            // A clocked cell that misses its clock pulse emits nothing next cycle.
            state.latched[l.cell] = state.nets[l.clk]
                && if l.xor {
                    dist.xor(l.cell, state.nets[l.a] ^ state.nets[l.b])
                } else {
                    dist.dff(l.cell, state.nets[l.a])
                };
        }
        state.outputs
    }

    /// Injects one message into a reset pipeline and returns the packed
    /// outputs `latency` cycles later.
    pub fn run_message<D: Disturbance>(
        &self,
        state: &mut SimState,
        message: u64,
        dist: &mut D,
    ) -> u64 {
        state.latched.fill(false);
        let mut out = self.step(state, message, dist);
        for _ in 0..self.latency {
            out = self.step(state, 0, dist);
        }
        out
    }

    pub fn simulate_with<D: Disturbance>(
        &self,
        frames: &[Frame],
        cycles: usize,
        dist: &mut D,
    ) -> Result<SimResult> {
        if let Some(bad) = frames.iter().find(|f| f.len() != self.n_inputs()) {
            return Err(Error::invalid(format!(
                "frame `{bad}` has {} bits, netlist has {} inputs",
                bad.len(),
                self.n_inputs()
            )));
        }
        let cycles = cycles.max(frames.len());
        let mut state = self.new_state();
        let outputs = (0..cycles)
            .map(|t| {
                let inputs = frames.get(t).map_or(0, BitVector::to_mask);
                BitVector::from_mask(self.step(&mut state, inputs, dist), self.n_outputs())
            })
            .collect();
        Ok(SimResult {
            inputs: frames.to_vec(),
            outputs,
            latency: self.latency,
            input_names: self.input_names.clone(),
            output_names: self.output_names.clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimResult {
    /// Frame applied at each cycle; cycles past the end saw all zeros.
    pub inputs: Vec<Frame>,
    /// Converter outputs at each cycle.
    pub outputs: Vec<BitVector>,
    pub latency: u32,
    pub input_names: Vec<String>,
    pub output_names: Vec<String>,
}

impl SimResult {
    /// Output frame carrying the encoding of the frame applied at `cycle`.
    pub fn codeword_for(&self, cycle: usize) -> Option<&BitVector> {
        self.outputs.get(cycle + self.latency as usize)
    }
}

/// Fault-free simulation for `cycles` cycles (at least one per frame).
pub fn simulate(netlist: &Netlist, frames: &[Frame], cycles: usize) -> Result<SimResult> {
    CompiledNetlist::new(netlist)?.simulate_with(frames, cycles, &mut FaultFree)
}

pub fn latency(netlist: &Netlist) -> Result<u32> {
    Ok(netlist.check_structure()?.latency)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub message: BitVector,
    pub expected: BitVector,
    pub actual: BitVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Equivalence {
    pub equivalent: bool,
    pub messages_checked: u64,
    pub counterexample: Option<Counterexample>,
}

/// Compares the netlist against matrix encoding for every message.
pub fn verify_equivalence(netlist: &Netlist, code: &LinearCode) -> Result<Equivalence> {
    let compiled = CompiledNetlist::new(netlist)?;
    if compiled.n_inputs() != code.k() || compiled.n_outputs() != code.n() {
        return Err(Error::Structural(format!(
            "netlist is {}-in/{}-out but {} is ({}, {})",
            compiled.n_inputs(),
            compiled.n_outputs(),
            code.name(),
            code.n(),
            code.k()
        )));
    }
    let mut state = compiled.new_state();
    let total = 1u64 << code.k();
    for m in 0..total {
        let actual = compiled.run_message(&mut state, m, &mut FaultFree);
        let expected = code.encode_mask(m);
        if actual != expected {
            return Ok(Equivalence {
                equivalent: false,
                messages_checked: m + 1,
                counterexample: Some(Counterexample {
                    message: BitVector::from_mask(m, code.k()),
                    expected: BitVector::from_mask(expected, code.n()),
                    actual: BitVector::from_mask(actual, code.n()),
                }),
            });
        }
    }
    Ok(Equivalence {
        equivalent: true,
        messages_checked: total,
        counterexample: None,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimelineEvent {
    pub time_ns: f64,
    pub net: String,
    pub value: u8,
}

/// Timestamps every input and output value. Cycle `t` sits at
/// `epoch_ns + t / clock_ghz`.
pub fn to_timeline(
    result: &SimResult,
    clock_ghz: f64,
    epoch_ns: f64,
) -> Result<Vec<TimelineEvent>> {
    if !(clock_ghz.is_finite() && clock_ghz > 0.0) {
        return Err(Error::invalid(format!(
            "clock frequency {clock_ghz} GHz must be positive"
        )));
    }
    let period = 1.0 / clock_ghz;
    let mut events = Vec::new();
    for (t, out) in result.outputs.iter().enumerate() {
        let time_ns = epoch_ns + t as f64 * period;
        let frame = result.inputs.get(t);
        for (i, name) in result.input_names.iter().enumerate() {
            events.push(TimelineEvent {
                time_ns,
                net: name.clone(),
                value: frame.map_or(0, |f| f.get(i)),
            });
        }
        for (j, name) in result.output_names.iter().enumerate() {
            events.push(TimelineEvent {
                time_ns,
                net: name.clone(),
                value: out.get(j),
            });
        }
    }
    Ok(events)
}

/// Time at which the frame applied at `cycle` appears on the outputs.
pub fn codeword_time_ns(result: &SimResult, cycle: usize, clock_ghz: f64, epoch_ns: f64) -> f64 {
    epoch_ns + (cycle as f64 + f64::from(result.latency)) / clock_ghz
}

pub fn timeline_csv(events: &[TimelineEvent]) -> String {
    let mut out = String::from("time_ns,net_id,value\n");
    for e in events {
        let _ = writeln!(out, "{:.4},{},{}", e.time_ns, e.net, e.value);
    }
    out
}
