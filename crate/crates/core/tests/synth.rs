use std::collections::{BTreeMap, BTreeSet};

use sfq_ecc::codes::BUILTIN_CODES;
use sfq_ecc::synth::{
    calibrate_library, cost_report, synthesize, CellKind, CellLibrary, EncoderTotals, Netlist,
    REFERENCE_TOTALS,
};
use sfq_ecc::{make_code, Error};

fn netlist(name: &str) -> Netlist {
    synthesize(&make_code(name).unwrap()).unwrap()
}

fn kinds(n: &Netlist) -> [usize; 4] {
    CellKind::PHYSICAL.map(|k| n.cells.iter().filter(|c| c.kind == k).count())
}

#[test]
fn cell_counts() {
    assert_eq!(kinds(&netlist("hamming84")), [6, 8, 23, 8]);
    assert_eq!(kinds(&netlist("rm13")), [8, 7, 26, 8]);
    let h74 = kinds(&netlist("hamming74"));
    assert_eq!([h74[0], h74[1], h74[3]], [5, 8, 7]);
    assert!((19..=21).contains(&h74[2]));
}

/// Every port drives and is driven by at most one net, and each cell has
/// exactly its kind's ports connected.
#[test]
fn fan_out_is_one_everywhere() {
    for name in BUILTIN_CODES {
        let n = netlist(name);
        let mut from = BTreeSet::new();
        let mut to = BTreeSet::new();
        for net in &n.nets {
            assert!(
                from.insert((net.from.cell, net.from.port)),
                "{name}: fan-out at {:?}",
                net.from
            );
            assert!(
                to.insert((net.to.cell, net.to.port)),
                "{name}: two drivers at {:?}",
                net.to
            );
        }
        let mut outs: BTreeMap<usize, usize> = BTreeMap::new();
        for net in &n.nets {
            *outs.entry(net.from.cell.0).or_default() += 1;
        }
        for c in &n.cells {
            let expected = match c.kind {
                CellKind::Splitter => 2,
                CellKind::Sfq2Dc => 0,
                _ => 1,
            };
            assert_eq!(
                outs.get(&c.id.0).copied().unwrap_or(0),
                expected,
                "{name}: {}",
                c.name
            );
        }
    }
}

/// Clock splitters reach only clock pins; data splitters never do.
#[test]
fn clock_and_data_are_separate() {
    for name in BUILTIN_CODES {
        let n = netlist(name);
        let clock = n.clock.unwrap();
        let mut reach = BTreeSet::from([clock]);
        let mut changed = true;
        while changed {
            changed = false;
            for net in &n.nets {
                if reach.contains(&net.from.cell) && n.cell(net.to.cell).kind == CellKind::Splitter
                {
                    changed |= reach.insert(net.to.cell);
                }
            }
        }
        let clocked = n.cells.iter().filter(|c| c.kind.is_clocked()).count();
        let clock_splitters = reach.len() - 1;
        assert_eq!(clock_splitters, clocked - 1, "{name}");
    }
}

#[test]
fn netlist_json_round_trips() {
    for name in BUILTIN_CODES {
        let n = netlist(name);
        let json = n.to_json().unwrap();
        let back = Netlist::from_json(&json).unwrap();
        assert_eq!(back.to_json().unwrap(), json);
        assert_eq!(back.content_hash().unwrap(), n.content_hash().unwrap());
    }
    assert_ne!(
        netlist("rm13").content_hash().unwrap(),
        netlist("hamming84").content_hash().unwrap()
    );
}

#[test]
fn corrupted_json_is_rejected() {
    let json = netlist("hamming84").to_json().unwrap();
    assert!(matches!(
        Netlist::from_json(&json[..json.len() / 2]),
        Err(Error::Json(_))
    ));
    let wrong = json.replace("\"sfq-netlist\"", "\"other\"");
    assert!(Netlist::from_json(&wrong).is_err());
}

/// Brute force over small non-negative integer costs.
fn oracle_jj(rows: &[EncoderTotals]) -> Vec<[u32; 4]> {
    let mut found = Vec::new();
    for x in 0..=40 {
        for d in 0..=40 {
            for s in 0..=40 {
                for c in 0..=40 {
                    let cost = [x, d, s, c];
                    if rows
                        .iter()
                        .all(|r| r.counts.iter().zip(cost).map(|(n, j)| n * j).sum::<u32>() == r.jj)
                    {
                        found.push(cost);
                    }
                }
            }
        }
    }
    found
}

#[test]
fn jj_costs_are_unique() {
    let solutions = oracle_jj(&REFERENCE_TOTALS);
    assert_eq!(solutions, vec![[11, 7, 4, 8]]);
    assert_eq!(calibrate_library(&REFERENCE_TOTALS).unwrap(), [11, 7, 4, 8]);
}

#[test]
fn shipped_library_reproduces_totals() {
    let lib = CellLibrary::default_library();
    for t in REFERENCE_TOTALS {
        let r = cost_report(&netlist(t.name), &lib).unwrap();
        assert_eq!(r.jj_total, u64::from(t.jj), "{}", t.name);
        assert!((r.power_total_uw - t.power_uw).abs() < 0.05, "{}", t.name);
        assert!((r.area_total_mm2 - t.area_mm2).abs() < 5e-4, "{}", t.name);
    }
}

#[test]
fn library_errors_carry_line_numbers() {
    let text = "XOR.jj = 11\nDFF.jj = seven\n";
    match CellLibrary::parse(text, "lib.cfg") {
        Err(Error::Parse {
            source_name, line, ..
        }) => assert_eq!((source_name.as_str(), line), ("lib.cfg", 2)),
        other => panic!("{other:?}"),
    }
    let round = CellLibrary::parse(&CellLibrary::default_library().to_config(), "x").unwrap();
    assert_eq!(round, CellLibrary::default_library());
}
