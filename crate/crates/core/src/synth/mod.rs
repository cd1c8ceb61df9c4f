//! SFQ encoder synthesis.
//!
//! SFQ gates are clocked and drive exactly one sink, so a code's XOR forms
//! become a netlist in stages: share XOR pairs ([`build_dag`]), pad short
//! paths with DFFs ([`balance`]), legalise fan-out with splitters
//! ([`place_splitters`]), distribute the clock ([`clock_tree`]) and drive
//! each codeword line through an SFQ-to-DC converter ([`attach_converters`]).

mod build;
mod dag;
mod library;
mod netlist;

pub use build::{attach_converters, balance, clock_tree, place_splitters, Sink, Skeleton};
pub use dag::{build_dag, DagNode, XorDag};
pub use library::{
    calibrate_library, fit_library, fit_per_cell, CellLibrary, CellPrice, EncoderTotals,
    DEFAULT_LIBRARY, REFERENCE_TOTALS,
};
pub use netlist::{
    Cell, CellId, CellKind, Net, Netlist, Port, PortRef, Structure, NETLIST_FORMAT, NETLIST_VERSION,
};

use std::collections::BTreeMap;

use serde::Serialize;

use crate::codes::LinearCode;
use crate::error::{Error, Result};

pub fn synthesize(code: &LinearCode) -> Result<Netlist> {
    let dag = build_dag(&code.boolean_forms(), code.k())?;
    let netlist = attach_converters(clock_tree(place_splitters(balance(&dag))));
    Ok(Netlist {
        code: Some(code.name().to_string()),
        ..netlist
    })
}

/// Four parallel lines, one converter each, no clocked cells: the
/// uncoded reference link.
pub fn baseline_no_encoder(width: usize) -> Netlist {
    let mut netlist = Netlist {
        code: Some("none".to_string()),
        ..Netlist::default()
    };
    for i in 0..width {
        let m = netlist.add_cell(CellKind::Input, format!("m{}", i + 1));
        netlist.inputs.push(m);
        netlist.open_taps.push(PortRef::new(m, Port::Q));
    }
    attach_converters(netlist)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostReport {
    pub counts: BTreeMap<CellKind, usize>,
    pub jj_total: u64,
    pub power_total_uw: f64,
    pub area_total_mm2: f64,
    pub data_splitters: usize,
    pub clock_splitters: usize,
}

impl CostReport {
    pub fn count(&self, kind: CellKind) -> usize {
        self.counts.get(&kind).copied().unwrap_or(0)
    }
}

pub fn cost_report(netlist: &Netlist, library: &CellLibrary) -> Result<CostReport> {
    let structure = netlist.check_structure()?;
    let mut counts = BTreeMap::new();
    let (mut jj_total, mut power, mut area) = (0u64, 0.0, 0.0);
    for kind in CellKind::PHYSICAL {
        let n = netlist.count(kind);
        counts.insert(kind, n);
        if n == 0 {
            continue;
        }
        let price = library
            .price(kind)
            .ok_or_else(|| Error::invalid(format!("cell library has no price for {kind}")))?;
        jj_total += n as u64 * u64::from(price.jj);
        power += n as f64 * price.power_uw;
        area += n as f64 * price.area_mm2;
    }
    let clock_splitters = netlist
        .cells
        .iter()
        .filter(|c| c.kind == CellKind::Splitter && structure.clock_domain[c.id.0])
        .count();
    Ok(CostReport {
        data_splitters: counts[&CellKind::Splitter] - clock_splitters,
        clock_splitters,
        counts,
        jj_total,
        power_total_uw: power,
        area_total_mm2: area,
    })
}
