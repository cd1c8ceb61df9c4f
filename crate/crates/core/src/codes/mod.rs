//! Binary linear block codes: the two Hamming encoders, first-order Reed-Muller,
//! their decoders, and exhaustive error-pattern analysis.

mod analysis;
mod decode;

pub use analysis::{
    analyze_patterns, analyze_patterns_from, capability_summary, Capability, PatternAnalysis,
};
pub use decode::{DecodeMode, DecodeOutcome, DecodeStatus, DecodeTable};

use std::fmt;

use serde::Serialize;

use crate::bits::{parity, BitVector, MAX_BITS};
use crate::error::{Error, Result};

/// Exhaustive codeword enumeration is limited to `2^MAX_ENUM_K` messages.
pub const MAX_ENUM_K: usize = 20;

/// Names of the built-in codes, in the order reports list them.
pub const BUILTIN_CODES: [&str; 3] = ["hamming74", "hamming84", "rm13"];

const HAMMING84_G: [&str; 4] = ["11100001", "10011001", "01010101", "11010010"];

/// How the `correct` decode mode repairs a received word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrectionRule {
    /// Flip the position whose parity-check column equals the syndrome.
    Syndrome,
    /// Extended Hamming: overall parity bit at `parity_position` plus the
    /// syndrome of the punctured code.
    ExtendedParity { parity_position: usize },
    /// Maximum correlation against every codeword.
    Correlation,
}

#[derive(Clone, Debug)]
pub struct LinearCode {
    name: String,
    n: usize,
    k: usize,
    /// Generator rows, column `j` at bit `j`.
    rows: Vec<u64>,
    d_min: usize,
    rule: CorrectionRule,
    /// Parity-check rows derived from the systematic form of `rows`.
    checks: Vec<u64>,
    /// Parity-check rows of the punctured code, for `ExtendedParity`.
    inner_checks: Vec<u64>,
    /// Pivot column of each row of the reduced generator.
    pivots: Vec<usize>,
    /// Message mask contributed by each pivot bit of a codeword.
    recovery: Vec<u64>,
    /// Codeword of message mask `i` at index `i`.
    codewords: Vec<u64>,
}

impl LinearCode {
    /// Builds a code from generator rows given as bit strings.
    pub fn from_rows(name: &str, rows: &[BitVector], rule: CorrectionRule) -> Result<Self> {
        let k = rows.len();
        if k == 0 {
            return Err(Error::invalid("generator matrix has no rows"));
        }
        let n = rows[0].len();
        if n == 0 || n > MAX_BITS {
            return Err(Error::invalid(format!(
                "codeword length {n} out of range 1..={MAX_BITS}"
            )));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("generator rows have different lengths"));
        }
        if k > MAX_ENUM_K {
            return Err(Error::invalid(format!(
                "k = {k} exceeds enumeration budget {MAX_ENUM_K}"
            )));
        }
        let masks: Vec<u64> = rows.iter().map(BitVector::to_mask).collect();
        let reduced = reduce(&masks, n);
        if reduced.pivots.len() != k {
            return Err(Error::invalid(format!(
                "generator matrix has rank {} < k = {k}",
                reduced.pivots.len()
            )));
        }
        let checks = parity_checks(&reduced.rows, &reduced.pivots, n);

        let inner_checks = match rule {
            CorrectionRule::ExtendedParity { parity_position } => {
                if parity_position >= n {
                    return Err(Error::invalid("parity position outside codeword"));
                }
                let punctured: Vec<u64> = masks
                    .iter()
                    .map(|&r| remove_bit(r, parity_position))
                    .collect();
                let red = reduce(&punctured, n - 1);
                parity_checks(&red.rows, &red.pivots, n - 1)
                    .into_iter()
                    .map(|h| insert_zero(h, parity_position))
                    .collect()
            }
            _ => Vec::new(),
        };

        let codewords: Vec<u64> = (0..1u64 << k).map(|m| encode_mask(&masks, m)).collect();
        let d_min = codewords[1..]
            .iter()
            .map(|c| c.count_ones() as usize)
            .min()
            .unwrap_or(0);

        Ok(LinearCode {
            name: name.to_string(),
            n,
            k,
            rows: masks,
            d_min,
            rule,
            checks,
            inner_checks,
            pivots: reduced.pivots,
            recovery: reduced.transform,
            codewords,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d_min(&self) -> usize {
        self.d_min
    }

    pub fn rule(&self) -> CorrectionRule {
        self.rule
    }

    pub fn generator(&self) -> Vec<BitVector> {
        self.rows
            .iter()
            .map(|&r| BitVector::from_mask(r, self.n))
            .collect()
    }

    pub fn parity_check(&self) -> Vec<BitVector> {
        self.checks
            .iter()
            .map(|&r| BitVector::from_mask(r, self.n))
            .collect()
    }

    pub fn generator_masks(&self) -> &[u64] {
        &self.rows
    }

    /// All `2^k` codewords, indexed by message mask.
    pub fn codewords(&self) -> &[u64] {
        &self.codewords
    }

    pub fn encode(&self, message: &BitVector) -> Result<BitVector> {
        if message.len() != self.k {
            return Err(Error::invalid(format!(
                "{}: message length {} != k = {}",
                self.name,
                message.len(),
                self.k
            )));
        }
        Ok(BitVector::from_mask(
            self.encode_mask(message.to_mask()),
            self.n,
        ))
    }

    #[inline]
    pub fn encode_mask(&self, message: u64) -> u64 {
        self.codewords[message as usize]
    }

    #[inline]
    pub fn syndrome(&self, word: u64) -> u64 {
        syndrome_of(&self.checks, word)
    }

    #[inline]
    pub(crate) fn inner_syndrome(&self, word: u64) -> u64 {
        syndrome_of(&self.inner_checks, word)
    }

    #[cfg(test)]
    pub(crate) fn checks(&self) -> &[u64] {
        &self.checks
    }

    /// Message of a word known to be a codeword.
    #[inline]
    pub fn message_of(&self, codeword: u64) -> u64 {
        self.pivots
            .iter()
            .zip(&self.recovery)
            .filter(|(&p, _)| (codeword >> p) & 1 == 1)
            .fold(0, |acc, (_, &m)| acc ^ m)
    }

    /// Output equations: codeword position `j` is the XOR of the listed
    /// message indices (0-based).
    pub fn boolean_forms(&self) -> Vec<BooleanForm> {
        (0..self.n)
            .map(|j| BooleanForm {
                output: j,
                inputs: (0..self.k)
                    .filter(|&i| (self.rows[i] >> j) & 1 == 1)
                    .collect(),
            })
            .collect()
    }
}

impl fmt::Display for LinearCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{},{})", self.name, self.n, self.k, self.d_min)
    }
}

/// One codeword bit as an XOR of message bits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BooleanForm {
    pub output: usize,
    pub inputs: Vec<usize>,
}

impl BooleanForm {
    pub fn is_pass_through(&self) -> bool {
        self.inputs.len() == 1
    }
}

impl fmt::Display for BooleanForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{} = ", self.output + 1)?;
        if self.inputs.is_empty() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self.inputs.iter().map(|i| format!("m{}", i + 1)).collect();
        f.write_str(&terms.join(" ^ "))
    }
}

pub fn make_code(name: &str) -> Result<LinearCode> {
    match name {
        "hamming84" => {
            let rows = parse_rows(&HAMMING84_G);
            LinearCode::from_rows(
                name,
                &rows,
                CorrectionRule::ExtendedParity { parity_position: 7 },
            )
        }
        "hamming74" => {
            let rows: Vec<BitVector> = HAMMING84_G
                .iter()
                .map(|r| r[..7].parse().expect("static generator"))
                .collect();
            LinearCode::from_rows(name, &rows, CorrectionRule::Syndrome)
        }
        "rm13" => LinearCode::from_rows(name, &reed_muller_1(3), CorrectionRule::Correlation),
        other => Err(Error::UnknownCode(other.to_string())),
    }
}

pub fn min_distance(code: &LinearCode) -> usize {
    code.d_min
}

/// First-order Reed-Muller generator over the `m`-cube: the all-ones row,
/// then one indicator row per coordinate. Points are listed in
/// lexicographic order with the first coordinate most significant.
pub fn reed_muller_1(m: usize) -> Vec<BitVector> {
    let n = 1usize << m;
    let mut rows = vec![BitVector::from_mask(u64::MAX, n)];
    for axis in 0..m {
        let shift = m - 1 - axis;
        let mut row = BitVector::zeros(n);
        for point in 0..n {
            row.set(point, (point >> shift) & 1 == 1);
        }
        rows.push(row);
    }
    rows
}

fn parse_rows(rows: &[&str]) -> Vec<BitVector> {
    rows.iter()
        .map(|r| r.parse().expect("static generator"))
        .collect()
}

fn encode_mask(rows: &[u64], message: u64) -> u64 {
    rows.iter()
        .enumerate()
        .filter(|(i, _)| (message >> i) & 1 == 1)
        .fold(0, |acc, (_, &r)| acc ^ r)
}

#[inline]
fn syndrome_of(checks: &[u64], word: u64) -> u64 {
    checks
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &h)| acc | (u64::from(parity(h & word)) << i))
}

struct Reduced {
    rows: Vec<u64>,
    pivots: Vec<usize>,
    /// `transform[i]` is the combination of original rows giving `rows[i]`.
    transform: Vec<u64>,
}

/// Reduced row echelon form over GF(2), pivots chosen left to right.
fn reduce(rows: &[u64], n: usize) -> Reduced {
    let mut work: Vec<(u64, u64)> = rows
        .iter()
        .enumerate()
        .map(|(i, &r)| (r, 1u64 << i))
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(found) = (rank..work.len()).find(|&r| (work[r].0 >> col) & 1 == 1) else {
            continue;
        };
        work.swap(rank, found);
        let (prow, ptrans) = work[rank];
        for (r, entry) in work.iter_mut().enumerate() {
            if r != rank && (entry.0 >> col) & 1 == 1 {
                entry.0 ^= prow;
                entry.1 ^= ptrans;
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == work.len() {
            break;
        }
    }
    work.truncate(rank);
    Reduced {
        rows: work.iter().map(|w| w.0).collect(),
        transform: work.iter().map(|w| w.1).collect(),
        pivots,
    }
}

/// One check per non-pivot column `j`: bit `j` plus the pivot bits of every
/// reduced row with a one in column `j`.
fn parity_checks(rows: &[u64], pivots: &[usize], n: usize) -> Vec<u64> {
    (0..n)
        .filter(|j| !pivots.contains(j))
        .map(|j| {
            rows.iter()
                .zip(pivots)
                .filter(|(&r, _)| (r >> j) & 1 == 1)
                .fold(1u64 << j, |acc, (_, &p)| acc | (1u64 << p))
        })
        .collect()
}

fn remove_bit(word: u64, pos: usize) -> u64 {
    let low = word & ((1u64 << pos) - 1);
    let high = (word >> (pos + 1)) << pos;
    low | high
}

fn insert_zero(word: u64, pos: usize) -> u64 {
    let low = word & ((1u64 << pos) - 1);
    let high = (word >> pos) << (pos + 1);
    low | high
}
