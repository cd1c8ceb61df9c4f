use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const NETLIST_FORMAT: &str = "sfq-netlist";
pub const NETLIST_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CellKind {
    #[serde(rename = "INPUT")]
    Input,
    #[serde(rename = "CLOCK_INPUT")]
    ClockInput,
    #[serde(rename = "XOR")]
    Xor,
    #[serde(rename = "DFF")]
    Dff,
    #[serde(rename = "SPLITTER")]
    Splitter,
    #[serde(rename = "SFQ2DC")]
    Sfq2Dc,
}

impl CellKind {
    /// Kinds that occupy area and can be priced by a cell library.
    pub const PHYSICAL: [CellKind; 4] = [
        CellKind::Xor,
        CellKind::Dff,
        CellKind::Splitter,
        CellKind::Sfq2Dc,
    ];

    pub fn input_ports(self) -> &'static [Port] {
        match self {
            CellKind::Input | CellKind::ClockInput => &[],
            CellKind::Xor => &[Port::A, Port::B, Port::Clk],
            CellKind::Dff => &[Port::D, Port::Clk],
            CellKind::Splitter | CellKind::Sfq2Dc => &[Port::In],
        }
    }

    pub fn output_ports(self) -> &'static [Port] {
        match self {
            CellKind::Input | CellKind::ClockInput | CellKind::Xor | CellKind::Dff => &[Port::Q],
            CellKind::Splitter => &[Port::Out0, Port::Out1],
            CellKind::Sfq2Dc => &[],
        }
    }

    pub fn is_clocked(self) -> bool {
        matches!(self, CellKind::Xor | CellKind::Dff)
    }

    pub fn is_physical(self) -> bool {
        Self::PHYSICAL.contains(&self)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CellKind::Input => "INPUT",
            CellKind::ClockInput => "CLOCK_INPUT",
            CellKind::Xor => "XOR",
            CellKind::Dff => "DFF",
            CellKind::Splitter => "SPLITTER",
            CellKind::Sfq2Dc => "SFQ2DC",
        }
    }
}

impl fmt::Display for CellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for CellKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            CellKind::Input,
            CellKind::ClockInput,
            CellKind::Xor,
            CellKind::Dff,
            CellKind::Splitter,
            CellKind::Sfq2Dc,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
        .ok_or_else(|| Error::invalid(format!("unknown cell kind `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Port {
    Q,
    A,
    B,
    D,
    Clk,
    In,
    Out0,
    Out1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CellId(pub usize);

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub id: CellId,
    pub kind: CellKind,
    pub name: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PortRef {
    pub cell: CellId,
    pub port: Port,
}

impl PortRef {
    pub fn new(cell: CellId, port: Port) -> Self {
        PortRef { cell, port }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Net {
    pub from: PortRef,
    pub to: PortRef,
}

/// SFQ gate-level netlist. Every net joins one output port to one input port.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Netlist {
    pub format: String,
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code: Option<String>,
    pub cells: Vec<Cell>,
    pub nets: Vec<Net>,
    /// Message-bit inputs in message order.
    pub inputs: Vec<CellId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clock: Option<CellId>,
    /// Output converters in codeword order.
    pub outputs: Vec<CellId>,
    /// Ports awaiting an output converter, in codeword order.
    #[serde(skip)]
    pub(crate) open_taps: Vec<PortRef>,
}

impl Default for Netlist {
    fn default() -> Self {
        Netlist {
            format: NETLIST_FORMAT.to_string(),
            version: NETLIST_VERSION,
            code: None,
            cells: Vec::new(),
            nets: Vec::new(),
            inputs: Vec::new(),
            clock: None,
            outputs: Vec::new(),
            open_taps: Vec::new(),
        }
    }
}

/// Derived structural facts about a well-formed netlist.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    /// Clocked cells crossed from any input to any output.
    pub latency: u32,
    /// Clocked-stage count at each cell's output (input side for converters).
    pub stage: Vec<u32>,
    /// True for cells fed by the clock input.
    pub clock_domain: Vec<bool>,
    /// Cells in an order where every net goes forward.
    pub topo_order: Vec<CellId>,
}

impl Netlist {
    pub fn add_cell(&mut self, kind: CellKind, name: impl Into<String>) -> CellId {
        let id = CellId(self.cells.len());
        self.cells.push(Cell {
            id,
            kind,
            name: name.into(),
        });
        id
    }

    pub fn connect(&mut self, from: PortRef, to: PortRef) {
        self.nets.push(Net { from, to });
    }

    pub fn cell(&self, id: CellId) -> &Cell {
        &self.cells[id.0]
    }

    pub fn count(&self, kind: CellKind) -> usize {
        self.cells.iter().filter(|c| c.kind == kind).count()
    }

    pub fn clocked_cells(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(|c| c.kind.is_clocked())
    }

    pub fn is_complete(&self) -> bool {
        self.open_taps.is_empty()
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let netlist: Netlist = serde_json::from_str(text)?;
        if netlist.format != NETLIST_FORMAT {
            return Err(Error::invalid(format!(
                "unexpected netlist format `{}`",
                netlist.format
            )));
        }
        if netlist.version != NETLIST_VERSION {
            return Err(Error::invalid(format!(
                "unsupported netlist version {}",
                netlist.version
            )));
        }
        Ok(netlist)
    }

    /// SHA-256 over a git-style blob header and the serialized netlist.
    pub fn content_hash(&self) -> Result<String> {
        let body = self.to_json()?;
        let mut hasher = Sha256::new();
        hasher.update(format!("blob {}\0", body.len()).as_bytes());
        hasher.update(body.as_bytes());
        Ok(hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect())
    }

    /// Checks port arity, fan-out of one, domain separation, acyclicity and
    /// path balance.
    pub fn check_structure(&self) -> Result<Structure> {
        let n = self.cells.len();
        for (i, c) in self.cells.iter().enumerate() {
            if c.id.0 != i {
                return Err(Error::Structural(format!(
                    "cell at index {i} has id {}",
                    c.id
                )));
            }
        }
        if !self.open_taps.is_empty() {
            return Err(Error::Structural(format!(
                "{} outputs lack converters",
                self.open_taps.len()
            )));
        }

        let mut drivers: BTreeMap<PortRef, usize> = BTreeMap::new();
        let mut sinks: BTreeMap<PortRef, usize> = BTreeMap::new();
        for net in &self.nets {
            for (end, ports, what) in [
                (
                    net.from,
                    self.kind_of(net.from.cell)?.output_ports(),
                    "output",
                ),
                (net.to, self.kind_of(net.to.cell)?.input_ports(), "input"),
            ] {
                if !ports.contains(&end.port) {
                    return Err(Error::Structural(format!(
                        "cell {} ({}) has no {what} port {:?}",
                        end.cell,
                        self.cell(end.cell).kind,
                        end.port
                    )));
                }
            }
            *drivers.entry(net.from).or_default() += 1;
            *sinks.entry(net.to).or_default() += 1;
        }
        for c in &self.cells {
            for &p in c.kind.output_ports() {
                let uses = drivers.get(&PortRef::new(c.id, p)).copied().unwrap_or(0);
                if uses != 1 {
                    return Err(Error::Structural(format!(
                        "fan-out violation: {} `{}` port {p:?} drives {uses} nets",
                        c.kind, c.name
                    )));
                }
            }
            for &p in c.kind.input_ports() {
                let uses = sinks.get(&PortRef::new(c.id, p)).copied().unwrap_or(0);
                if uses != 1 {
                    return Err(Error::Structural(format!(
                        "{} `{}` port {p:?} is driven by {uses} nets",
                        c.kind, c.name
                    )));
                }
            }
        }
        self.check_roles()?;

        // Kahn's algorithm over cells.
        let mut indegree = vec![0usize; n];
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        for net in &self.nets {
            indegree[net.to.cell.0] += 1;
            succ[net.from.cell.0].push(net.to.cell.0);
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = queue.pop_front() {
            order.push(CellId(i));
            for &j in &succ[i] {
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    queue.push_back(j);
                }
            }
        }
        if order.len() != n {
            return Err(Error::Structural("netlist contains a cycle".into()));
        }

        let mut incoming: Vec<Vec<&Net>> = vec![Vec::new(); n];
        for net in &self.nets {
            incoming[net.to.cell.0].push(net);
        }
        let mut clock_domain = vec![false; n];
        let mut stage = vec![0u32; n];
        for &id in &order {
            let cell = self.cell(id);
            let data_in: Vec<&Net> = incoming[id.0]
                .iter()
                .copied()
                .filter(|e| e.to.port != Port::Clk)
                .collect();
            match cell.kind {
                CellKind::ClockInput => clock_domain[id.0] = true,
                CellKind::Input => {}
                CellKind::Splitter => {
                    let src = data_in[0].from.cell.0;
                    clock_domain[id.0] = clock_domain[src];
                    stage[id.0] = stage[src];
                }
                CellKind::Sfq2Dc | CellKind::Xor | CellKind::Dff => {
                    let mut stages = Vec::new();
                    for e in &data_in {
                        if clock_domain[e.from.cell.0] {
                            return Err(Error::Structural(format!(
                                "data port {:?} of `{}` is driven from the clock network",
                                e.to.port, cell.name
                            )));
                        }
                        stages.push(stage[e.from.cell.0]);
                    }
                    if stages.windows(2).any(|w| w[0] != w[1]) {
                        return Err(Error::Structural(format!(
                            "unbalanced paths into `{}`: stages {stages:?}",
                            cell.name
                        )));
                    }
                    let s = stages[0];
                    stage[id.0] = if cell.kind.is_clocked() { s + 1 } else { s };
                    if let Some(clk) = incoming[id.0].iter().find(|e| e.to.port == Port::Clk) {
                        if !clock_domain[clk.from.cell.0] {
                            return Err(Error::Structural(format!(
                                "clock port of `{}` is driven by a data signal",
                                cell.name
                            )));
                        }
                    }
                }
            }
        }

        let out_stages: Vec<u32> = self.outputs.iter().map(|o| stage[o.0]).collect();
        if out_stages.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::Structural(format!(
                "outputs arrive at different stages {out_stages:?}"
            )));
        }
        Ok(Structure {
            latency: out_stages.first().copied().unwrap_or(0),
            stage,
            clock_domain,
            topo_order: order,
        })
    }

    fn kind_of(&self, id: CellId) -> Result<CellKind> {
        self.cells
            .get(id.0)
            .map(|c| c.kind)
            .ok_or_else(|| Error::Structural(format!("net references missing cell {id}")))
    }

    fn check_roles(&self) -> Result<()> {
        let listed = |ids: &[CellId], kind: CellKind, what: &str| -> Result<()> {
            for id in ids {
                if self.kind_of(*id)? != kind {
                    return Err(Error::Structural(format!(
                        "{what} entry {id} is not a {kind} cell"
                    )));
                }
            }
            let count = self.count(kind);
            if count != ids.len() {
                return Err(Error::Structural(format!(
                    "{count} {kind} cells but {} listed as {what}",
                    ids.len()
                )));
            }
            Ok(())
        };
        listed(&self.inputs, CellKind::Input, "inputs")?;
        listed(&self.outputs, CellKind::Sfq2Dc, "outputs")?;
        listed(self.clock.as_slice(), CellKind::ClockInput, "clock")?;
        Ok(())
    }
}
