//! Cell library pricing and its calibration from reference encoder totals.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::netlist::CellKind;
use crate::error::{Error, Result};

/// The shipped library, fitted to reference encoder totals.
pub const DEFAULT_LIBRARY: &str = include_str!("../../data/cell_library.cfg");

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellPrice {
    pub jj: u32,
    pub power_uw: f64,
    pub area_mm2: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CellLibrary {
    pub cells: BTreeMap<CellKind, CellPrice>,
}

impl CellLibrary {
    pub fn default_library() -> Self {
        Self::parse(DEFAULT_LIBRARY, "cell_library.cfg").expect("shipped library parses")
    }

    pub fn price(&self, kind: CellKind) -> Option<&CellPrice> {
        self.cells.get(&kind)
    }

    /// Parses `<KIND>.jj`, `<KIND>.power_uW` and `<KIND>.area_mm2` lines.
    /// Blank lines and `#` comments are ignored.
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        #[derive(Default)]
        struct Partial {
            jj: Option<u32>,
            power: Option<f64>,
            area: Option<f64>,
            line: usize,
        }
        let err = |line: usize, message: String| Error::Parse {
            source_name: source_name.to_string(),
            line,
            message,
        };
        let mut partial: BTreeMap<CellKind, Partial> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(line_no, format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let (kind, field) = key
                .split_once('.')
                .ok_or_else(|| err(line_no, format!("key `{key}` is not `<KIND>.<field>`")))?;
            let kind: CellKind = kind
                .parse()
                .map_err(|e: Error| err(line_no, e.to_string()))?;
            if !kind.is_physical() {
                return Err(err(line_no, format!("{kind} cells cannot be priced")));
            }
            let entry = partial.entry(kind).or_default();
            entry.line = line_no;
            let number: f64 = value
                .parse()
                .map_err(|_| err(line_no, format!("`{value}` is not a number")))?;
            if !(number.is_finite() && number > 0.0) {
                return Err(err(line_no, format!("{key} must be strictly positive")));
            }
            match field {
                "jj" => {
                    let jj: u32 = value
                        .parse()
                        .map_err(|_| err(line_no, format!("{key} must be a positive integer")))?;
                    entry.jj = Some(jj);
                }
                "power_uW" => entry.power = Some(number),
                "area_mm2" => entry.area = Some(number),
                other => return Err(err(line_no, format!("unknown field `{other}`"))),
            }
        }
        let mut cells = BTreeMap::new();
        for (kind, p) in partial {
            match (p.jj, p.power, p.area) {
                (Some(jj), Some(power_uw), Some(area_mm2)) => {
                    cells.insert(
                        kind,
                        CellPrice {
                            jj,
                            power_uw,
                            area_mm2,
                        },
                    );
                }
                _ => {
                    return Err(err(
                        p.line,
                        format!("{kind} needs all of jj, power_uW and area_mm2"),
                    ))
                }
            }
        }
        Ok(CellLibrary { cells })
    }

    pub fn to_config(&self) -> String {
        let mut out = String::new();
        for (kind, p) in &self.cells {
            let _ = writeln!(out, "{kind}.jj = {}", p.jj);
            let _ = writeln!(out, "{kind}.power_uW = {}", p.power_uw);
            let _ = writeln!(out, "{kind}.area_mm2 = {}", p.area_mm2);
        }
        out
    }
}

/// Cell counts of one encoder in `[XOR, DFF, SPLITTER, SFQ2DC]` order,
/// with its reference totals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EncoderTotals {
    pub name: &'static str,
    pub counts: [u32; 4],
    pub jj: u32,
    pub power_uw: f64,
    pub area_mm2: f64,
}

/// Reference circuit-level totals of the three encoders.
pub const REFERENCE_TOTALS: [EncoderTotals; 3] = [
    EncoderTotals {
        name: "rm13",
        counts: [8, 7, 26, 8],
        jj: 305,
        power_uw: 101.5,
        area_mm2: 0.193,
    },
    EncoderTotals {
        name: "hamming74",
        counts: [5, 8, 20, 7],
        jj: 247,
        power_uw: 81.7,
        area_mm2: 0.158,
    },
    EncoderTotals {
        name: "hamming84",
        counts: [6, 8, 23, 8],
        jj: 278,
        power_uw: 92.3,
        area_mm2: 0.177,
    },
];

type Q = Ratio<i128>;

/// Per-cell JJ counts `[XOR, DFF, SPLITTER, SFQ2DC]` solving every row
/// exactly over the non-negative integers.
///
/// The splitter count is enumerated exhaustively; for each value the
/// remaining three unknowns are solved exactly over the rationals. Exactly
/// one integral non-negative solution must exist.
pub fn calibrate_library(rows: &[EncoderTotals]) -> Result<[u32; 4]> {
    let fail = |message: String| Error::Calibration {
        residuals: jj_residuals(rows),
        message,
    };
    if rows.len() < 3 {
        return Err(fail(format!(
            "{} equations cannot pin 4 unknowns",
            rows.len()
        )));
    }
    if rank(
        rows.iter()
            .map(|r| r.counts.map(|c| Q::from(i128::from(c))).to_vec())
            .collect(),
    ) < 3
    {
        return Err(fail("equations are rank-deficient".into()));
    }
    let max_s = rows
        .iter()
        .filter(|r| r.counts[2] > 0)
        .map(|r| r.jj / r.counts[2])
        .min()
        .unwrap_or(0);

    let mut solutions = Vec::new();
    for s in 0..=max_s {
        let system: Vec<Vec<Q>> = rows
            .iter()
            .map(|r| {
                let rhs = i128::from(r.jj) - i128::from(r.counts[2]) * i128::from(s);
                vec![
                    Q::from(i128::from(r.counts[0])),
                    Q::from(i128::from(r.counts[1])),
                    Q::from(i128::from(r.counts[3])),
                    Q::from(rhs),
                ]
            })
            .collect();
        if let Some([x, d, c]) = solve_exact(system) {
            let integral =
                |q: Q| (q.is_integer() && q >= Q::from(0)).then(|| q.to_integer() as u32);
            if let (Some(x), Some(d), Some(c)) = (integral(x), integral(d), integral(c)) {
                solutions.push([x, d, s, c]);
            }
        }
    }
    match solutions.as_slice() {
        [one] => Ok(*one),
        [] => Err(fail("no non-negative integer solution".into())),
        many => Err(fail(format!(
            "{} integer solutions, calibration is ambiguous",
            many.len()
        ))),
    }
}

/// Residuals `A x - b` of the rounded real least-norm JJ fit, for diagnostics.
fn jj_residuals(rows: &[EncoderTotals]) -> Vec<f64> {
    if rows.is_empty() {
        return Vec::new();
    }
    let (a, b) = design(rows, |r| f64::from(r.jj));
    let Ok(pinv) = a.clone().pseudo_inverse(1e-9) else {
        return Vec::new();
    };
    let x = (pinv * &b).map(f64::round);
    (a * x - b).iter().copied().collect()
}

/// Solves an augmented system with three unknowns. `None` when the system
/// is inconsistent or under-determined.
fn solve_exact(mut m: Vec<Vec<Q>>) -> Option<[Q; 3]> {
    let zero = Q::from(0);
    for (row, col) in (0..3).enumerate() {
        let pivot = (row..m.len()).find(|&r| m[r][col] != zero)?;
        m.swap(row, pivot);
        let p = m[row][col];
        for v in m[row].iter_mut() {
            *v /= p;
        }
        for r in 0..m.len() {
            if r != row && m[r][col] != zero {
                let f = m[r][col];
                let pivot_row = m[row].clone();
                for (v, p) in m[r].iter_mut().zip(pivot_row) {
                    *v -= f * p;
                }
            }
        }
    }
    if m[3..].iter().any(|r| r[3] != zero) {
        return None;
    }
    Some([m[0][3], m[1][3], m[2][3]])
}

fn rank(mut m: Vec<Vec<Q>>) -> usize {
    let zero = Q::from(0);
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][col] != zero) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..m.len() {
            let f = m[r][col] / m[rank][col];
            let pivot_row = m[rank].clone();
            for (v, p) in m[r].iter_mut().zip(pivot_row) {
                *v -= f * p;
            }
        }
        rank += 1;
    }
    rank
}

fn design(
    rows: &[EncoderTotals],
    rhs: impl Fn(&EncoderTotals) -> f64,
) -> (DMatrix<f64>, DVector<f64>) {
    let a = DMatrix::from_fn(rows.len(), 4, |i, j| f64::from(rows[i].counts[j]));
    let b = DVector::from_iterator(rows.len(), rows.iter().map(rhs));
    (a, b)
}

/// Least-norm non-negative per-cell values reproducing every row total.
///
/// With three rows and four unknowns the exact solutions form a line
/// `x0 + t v`; the point of minimum norm on its non-negative segment is
/// returned.
pub fn fit_per_cell(
    rows: &[EncoderTotals],
    total: impl Fn(&EncoderTotals) -> f64,
) -> Result<[f64; 4]> {
    let (a, b) = design(rows, total);
    let svd = a.clone().svd(true, true);
    let rank = svd.rank(1e-9);
    let x0 = svd.solve(&b, 1e-9).map_err(|e| Error::Calibration {
        message: e.to_string(),
        residuals: Vec::new(),
    })?;
    let residuals: Vec<f64> = (&a * &x0 - &b).iter().copied().collect();
    if residuals.iter().any(|r| r.abs() > 1e-6 * b.amax().max(1.0)) {
        return Err(Error::Calibration {
            message: "totals are inconsistent".into(),
            residuals,
        });
    }
    let x0: [f64; 4] = [x0[0], x0[1], x0[2], x0[3]];
    match 4 - rank {
        0 if x0.iter().all(|&v| v >= 0.0) => Ok(x0),
        1 => {
            let v = null_direction(&a);
            let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
            for (xi, vi) in x0.iter().zip(&v) {
                if vi.abs() < 1e-12 {
                    if *xi < 0.0 {
                        lo = f64::INFINITY;
                    }
                } else if *vi > 0.0 {
                    lo = lo.max(-xi / vi);
                } else {
                    hi = hi.min(-xi / vi);
                }
            }
            if lo > hi {
                return Err(Error::Calibration {
                    message: "no non-negative solution".into(),
                    residuals,
                });
            }
            let dot: f64 = x0.iter().zip(&v).map(|(a, b)| a * b).sum();
            let vv: f64 = v.iter().map(|a| a * a).sum();
            let t = (-dot / vv).clamp(lo, hi);
            Ok([0, 1, 2, 3].map(|i| (x0[i] + t * v[i]).max(0.0)))
        }
        _ => Err(Error::Calibration {
            message: format!("per-cell fit has {} free directions", 4 - rank),
            residuals,
        }),
    }
}

/// Unit vector spanning the null space of a rank-3 matrix with 4 columns.
fn null_direction(a: &DMatrix<f64>) -> [f64; 4] {
    // Pad to square so V^T carries all four right singular vectors.
    let mut square = DMatrix::zeros(a.nrows().max(4), 4);
    square.view_mut((0, 0), (a.nrows(), 4)).copy_from(a);
    let svd = square.svd(false, true);
    let smallest = svd.singular_values.imin();
    let v_t = svd.v_t.expect("requested V^T");
    [0, 1, 2, 3].map(|j| v_t[(smallest, j)])
}

/// JJ counts solved exactly, power and area fitted by least norm.
pub fn fit_library(rows: &[EncoderTotals]) -> Result<CellLibrary> {
    let jj = calibrate_library(rows)?;
    let power = fit_per_cell(rows, |r| r.power_uw)?;
    let area = fit_per_cell(rows, |r| r.area_mm2)?;
    let cells = CellKind::PHYSICAL
        .iter()
        .enumerate()
        .map(|(i, &kind)| {
            (
                kind,
                CellPrice {
                    jj: jj[i],
                    power_uw: power[i],
                    area_mm2: area[i],
                },
            )
        })
        .collect();
    Ok(CellLibrary { cells })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_totals_give_unique_jj_table() {
        assert_eq!(calibrate_library(&REFERENCE_TOTALS).unwrap(), [11, 7, 4, 8]);
    }

    #[test]
    fn back_substitution_reproduces_278() {
        let [x, d, s, c] = calibrate_library(&REFERENCE_TOTALS).unwrap();
        assert_eq!(6 * x + 8 * d + 23 * s + 8 * c, 278);
    }

    #[test]
    fn identical_rows_are_rank_deficient() {
        let rows = [REFERENCE_TOTALS[0]; 3];
        let err = calibrate_library(&rows).unwrap_err();
        assert!(matches!(err, Error::Calibration { .. }), "{err}");
    }

    #[test]
    fn no_integer_solution_reports_residuals() {
        // Even coefficients cannot reach odd totals.
        let mut rows = REFERENCE_TOTALS;
        rows[0].counts = [2, 4, 6, 8];
        rows[1].counts = [2, 2, 4, 6];
        rows[2].counts = [4, 2, 2, 2];
        for (r, total) in rows.iter_mut().zip([101, 99, 97]) {
            r.jj = total;
        }
        match calibrate_library(&rows) {
            Err(Error::Calibration { residuals, .. }) => assert_eq!(residuals.len(), 3),
            other => panic!("expected calibration error, got {other:?}"),
        }
    }

    #[test]
    fn power_fit_reproduces_totals_and_is_non_negative() {
        let p = fit_per_cell(&REFERENCE_TOTALS, |r| r.power_uw).unwrap();
        assert!(p.iter().all(|&v| v >= 0.0));
        for r in &REFERENCE_TOTALS {
            let total: f64 = r
                .counts
                .iter()
                .zip(&p)
                .map(|(&c, v)| f64::from(c) * v)
                .sum();
            assert!((total - r.power_uw).abs() < 1e-9, "{}: {total}", r.name);
        }
    }

    #[test]
    fn shipped_library_matches_fit() {
        let fitted = fit_library(&REFERENCE_TOTALS).unwrap();
        let shipped = CellLibrary::default_library();
        for kind in CellKind::PHYSICAL {
            let (f, s) = (fitted.price(kind).unwrap(), shipped.price(kind).unwrap());
            assert_eq!(f.jj, s.jj);
            assert!((f.power_uw - s.power_uw).abs() < 1e-5, "{kind} power");
            assert!((f.area_mm2 - s.area_mm2).abs() < 1e-8, "{kind} area");
        }
    }

    #[test]
    fn parse_reports_line_context() {
        let err = CellLibrary::parse("XOR.jj = 11\nXOR.power_uW = abc\n", "lib.cfg").unwrap_err();
        assert_eq!(err.to_string(), "lib.cfg:2: `abc` is not a number");
        let err = CellLibrary::parse("XOR.jj = 11\n", "lib.cfg").unwrap_err();
        assert!(err.to_string().contains("needs all of"), "{err}");
        let err = CellLibrary::parse("BOGUS.jj = 1\n", "lib.cfg").unwrap_err();
        assert!(err.to_string().starts_with("lib.cfg:1:"), "{err}");
    }

    #[test]
    fn config_round_trips() {
        let lib = CellLibrary::default_library();
        assert_eq!(CellLibrary::parse(&lib.to_config(), "x").unwrap(), lib);
    }
}
