use std::collections::BTreeMap;

use super::dag::{DagNode, XorDag};
use super::netlist::{CellId, CellKind, Netlist, Port, PortRef};

/// Where a logical signal is consumed before splitters exist.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sink {
    Port(PortRef),
    /// Codeword position, to be attached to a converter later.
    Output(usize),
}

/// Balanced netlist before fan-out is legalised: inputs, XORs and DFF
/// chains, with each driver port listing every sink it feeds.
#[derive(Clone, Debug)]
pub struct Skeleton {
    pub netlist: Netlist,
    pub fanout: BTreeMap<PortRef, Vec<Sink>>,
    pub depth: u32,
    pub n_outputs: usize,
}

impl Skeleton {
    pub fn dff_count(&self) -> usize {
        self.netlist.count(CellKind::Dff)
    }
}

/// Inserts DFF delay chains so every sink sees its operands at the stage
/// it consumes them. A source gets one chain as long as its most delayed
/// sink; every sink taps the chain at its own delay.
pub fn balance(dag: &XorDag) -> Skeleton {
    let depth = dag.depth();
    let mut netlist = Netlist::default();
    let mut cell_of = Vec::with_capacity(dag.nodes().len());
    let mut xor_index = 0;
    for node in dag.nodes() {
        let id = match *node {
            DagNode::Input(i) => {
                let id = netlist.add_cell(CellKind::Input, format!("m{}", i + 1));
                netlist.inputs.push(id);
                id
            }
            DagNode::Xor(..) => {
                xor_index += 1;
                netlist.add_cell(CellKind::Xor, format!("x{xor_index}"))
            }
        };
        cell_of.push(id);
    }

    // (delay, sink) per source node, in sink creation order.
    let mut demands: Vec<Vec<(u32, Sink)>> = vec![Vec::new(); dag.nodes().len()];
    for (w, node) in dag.nodes().iter().enumerate() {
        if let DagNode::Xor(a, b) = *node {
            let need = dag.node_depth(w) - 1;
            for (src, port) in [(a, Port::A), (b, Port::B)] {
                demands[src].push((
                    need - dag.node_depth(src),
                    Sink::Port(PortRef::new(cell_of[w], port)),
                ));
            }
        }
    }
    for (j, &o) in dag.outputs().iter().enumerate() {
        demands[o].push((depth - dag.node_depth(o), Sink::Output(j)));
    }

    let mut fanout: BTreeMap<PortRef, Vec<Sink>> = BTreeMap::new();
    for (v, wants) in demands.iter().enumerate() {
        let chain_len = wants.iter().map(|(d, _)| *d).max().unwrap_or(0);
        let mut taps = vec![cell_of[v]];
        for step in 1..=chain_len {
            let name = format!("{}_d{step}", netlist.cell(cell_of[v]).name);
            taps.push(netlist.add_cell(CellKind::Dff, name));
        }
        for (delay, sink) in wants {
            fanout
                .entry(PortRef::new(taps[*delay as usize], Port::Q))
                .or_default()
                .push(*sink);
        }
        for pair in taps.windows(2) {
            fanout
                .entry(PortRef::new(pair[0], Port::Q))
                .or_default()
                .push(Sink::Port(PortRef::new(pair[1], Port::D)));
        }
    }

    Skeleton {
        netlist,
        fanout,
        depth,
        n_outputs: dag.outputs().len(),
    }
}

/// Legalises fan-out: a driver with `f` sinks gets a left-leaning chain of
/// `f - 1` splitters.
pub fn place_splitters(skeleton: Skeleton) -> Netlist {
    let Skeleton {
        mut netlist,
        fanout,
        n_outputs,
        ..
    } = skeleton;
    let mut taps: Vec<Option<PortRef>> = vec![None; n_outputs];
    for (driver, sinks) in fanout {
        let mut from = driver;
        let base = netlist.cell(driver.cell).name.clone();
        for (i, sink) in sinks.iter().enumerate() {
            let last = i + 1 == sinks.len();
            let port = if last {
                from
            } else {
                let s = netlist.add_cell(CellKind::Splitter, format!("{base}_s{}", i + 1));
                netlist.connect(from, PortRef::new(s, Port::In));
                from = PortRef::new(s, Port::Out1);
                PortRef::new(s, Port::Out0)
            };
            match *sink {
                Sink::Port(p) => netlist.connect(port, p),
                Sink::Output(j) => taps[j] = Some(port),
            }
        }
    }
    netlist.open_taps = taps
        .into_iter()
        .map(|t| t.expect("every codeword position has a driver"))
        .collect();
    netlist
}

/// Feeds the clock to every clocked cell through a chain of `C - 1`
/// splitters, in cell order. Netlists without clocked cells are unchanged.
pub fn clock_tree(mut netlist: Netlist) -> Netlist {
    let sinks: Vec<CellId> = netlist.clocked_cells().map(|c| c.id).collect();
    if sinks.is_empty() {
        return netlist;
    }
    let clk = netlist.add_cell(CellKind::ClockInput, "clk");
    netlist.clock = Some(clk);
    let mut from = PortRef::new(clk, Port::Q);
    for (i, &sink) in sinks.iter().enumerate() {
        let port = if i + 1 == sinks.len() {
            from
        } else {
            let s = netlist.add_cell(CellKind::Splitter, format!("clk_s{}", i + 1));
            netlist.connect(from, PortRef::new(s, Port::In));
            from = PortRef::new(s, Port::Out1);
            PortRef::new(s, Port::Out0)
        };
        netlist.connect(port, PortRef::new(sink, Port::Clk));
    }
    netlist
}

/// One SFQ-to-DC converter per codeword bit.
pub fn attach_converters(mut netlist: Netlist) -> Netlist {
    let taps = std::mem::take(&mut netlist.open_taps);
    for (j, tap) in taps.into_iter().enumerate() {
        let c = netlist.add_cell(CellKind::Sfq2Dc, format!("c{}", j + 1));
        netlist.connect(tap, PortRef::new(c, Port::In));
        netlist.outputs.push(c);
    }
    netlist
}
