use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{CorrectionRule, LinearCode};
use crate::bits::{parity, BitVector};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeMode {
    /// Accept codewords, flag everything else.
    DetectOnly,
    /// Repair using the code's correction rule; correlation ties are rejected.
    Correct,
    /// As `Correct`, but correlation ties resolve to the lowest message index.
    CorrectOptimistic,
}

impl FromStr for DecodeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "detect_only" | "detect" => Ok(DecodeMode::DetectOnly),
            "correct" => Ok(DecodeMode::Correct),
            "correct_optimistic" | "optimistic" => Ok(DecodeMode::CorrectOptimistic),
            other => Err(Error::invalid(format!("unknown decode mode `{other}`"))),
        }
    }
}

impl std::fmt::Display for DecodeMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(match self {
            DecodeMode::DetectOnly => "detect_only",
            DecodeMode::Correct => "correct",
            DecodeMode::CorrectOptimistic => "correct_optimistic",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeStatus {
    Clean,
    Corrected,
    Uncorrectable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecodeOutcome {
    pub message: Option<BitVector>,
    pub status: DecodeStatus,
}

impl LinearCode {
    pub fn decode(&self, received: &BitVector, mode: DecodeMode) -> Result<DecodeOutcome> {
        if received.len() != self.n() {
            return Err(Error::invalid(format!(
                "{}: received length {} != n = {}",
                self.name(),
                received.len(),
                self.n()
            )));
        }
        let (status, message) = self.decode_mask(received.to_mask(), mode);
        Ok(DecodeOutcome {
            message: message.map(|m| BitVector::from_mask(m, self.k())),
            status,
        })
    }

    /// Packed decoder: returns the status and, unless uncorrectable, the
    /// message mask.
    pub fn decode_mask(&self, word: u64, mode: DecodeMode) -> (DecodeStatus, Option<u64>) {
        if self.syndrome(word) == 0 {
            return (DecodeStatus::Clean, Some(self.message_of(word)));
        }
        if mode == DecodeMode::DetectOnly {
            return (DecodeStatus::Uncorrectable, None);
        }
        let repaired = match self.rule() {
            CorrectionRule::Syndrome => {
                let s = self.syndrome(word);
                (0..self.n())
                    .find(|&j| self.syndrome(1u64 << j) == s)
                    .map(|j| word ^ (1u64 << j))
            }
            CorrectionRule::ExtendedParity { parity_position } => {
                let parity_ok = parity(word) == 0;
                let s = self.inner_syndrome(word);
                match (parity_ok, s == 0) {
                    // Zero inner syndrome with good parity is a codeword, handled above.
                    (true, _) => None,
                    (false, true) => Some(word ^ (1u64 << parity_position)),
                    (false, false) => (0..self.n())
                        .filter(|&j| j != parity_position)
                        .find(|&j| self.inner_syndrome(1u64 << j) == s)
                        .map(|j| word ^ (1u64 << j)),
                }
            }
            CorrectionRule::Correlation => {
                self.correlate(word, mode == DecodeMode::CorrectOptimistic)
            }
        };
        match repaired {
            Some(c) => (DecodeStatus::Corrected, Some(self.message_of(c))),
            None => (DecodeStatus::Uncorrectable, None),
        }
    }

    /// Correlation of the ±1 images of `word` and each codeword is
    /// `n - 2 * distance`; the maximum is taken over all codewords.
    fn correlate(&self, word: u64, lowest_index_on_tie: bool) -> Option<u64> {
        let n = self.n() as i64;
        let mut best = i64::MIN;
        let mut winner = None;
        let mut tied = false;
        for &c in self.codewords() {
            let corr = n - 2 * i64::from((c ^ word).count_ones());
            if corr > best {
                best = corr;
                winner = Some(c);
                tied = false;
            } else if corr == best {
                tied = true;
            }
        }
        if tied && !lowest_index_on_tie {
            None
        } else {
            winner
        }
    }

    /// Codewords at the minimum distance from `word`.
    pub fn nearest_codewords(&self, word: u64) -> Vec<u64> {
        let best = self
            .codewords()
            .iter()
            .map(|c| (c ^ word).count_ones())
            .min()
            .unwrap_or(0);
        self.codewords()
            .iter()
            .copied()
            .filter(|c| (c ^ word).count_ones() == best)
            .collect()
    }
}

/// Precomputed decoder over every `2^n` received word.
#[derive(Clone, Debug)]
pub struct DecodeTable {
    entries: Vec<(DecodeStatus, Option<u64>)>,
}

/// Lookup tables are built only for short codes.
const MAX_TABLE_N: usize = 16;

impl DecodeTable {
    pub fn new(code: &LinearCode, mode: DecodeMode) -> Result<Self> {
        if code.n() > MAX_TABLE_N {
            return Err(Error::invalid(format!(
                "decode table limited to n <= {MAX_TABLE_N}"
            )));
        }
        Ok(DecodeTable {
            entries: (0..1u64 << code.n())
                .map(|w| code.decode_mask(w, mode))
                .collect(),
        })
    }

    #[inline]
    pub fn lookup(&self, word: u64) -> (DecodeStatus, Option<u64>) {
        self.entries[word as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{make_code, BUILTIN_CODES};

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn clean_codeword_round_trips() {
        let code = make_code("hamming84").unwrap();
        let out = code.decode(&bv("01100110"), DecodeMode::Correct).unwrap();
        assert_eq!(out.status, DecodeStatus::Clean);
        assert_eq!(out.message.unwrap().to_string(), "1011");
    }

    #[test]
    fn single_flip_oracle_hamming84() {
        let code = make_code("hamming84").unwrap();
        let sent = bv("01100110");
        for pos in 0..8 {
            let mut r = sent.clone();
            r.flip(pos);
            let out = code.decode(&r, DecodeMode::Correct).unwrap();
            assert_eq!(out.status, DecodeStatus::Corrected, "position {pos}");
            assert_eq!(out.message.unwrap().to_string(), "1011");
        }
    }

    #[test]
    fn double_flip_is_flagged_by_hamming84() {
        let code = make_code("hamming84").unwrap();
        let out = code.decode(&bv("10100110"), DecodeMode::Correct).unwrap();
        assert_eq!(out.status, DecodeStatus::Uncorrectable);
        assert!(out.message.is_none());
    }

    #[test]
    fn detect_only_never_corrects() {
        for name in BUILTIN_CODES {
            let code = make_code(name).unwrap();
            for w in 0..1u64 << code.n() {
                let (status, msg) = code.decode_mask(w, DecodeMode::DetectOnly);
                assert_ne!(status, DecodeStatus::Corrected);
                assert_eq!(status == DecodeStatus::Clean, code.syndrome(w) == 0);
                assert_eq!(msg.is_none(), status == DecodeStatus::Uncorrectable);
            }
        }
    }

    #[test]
    fn hamming74_decoder_is_complete() {
        let code = make_code("hamming74").unwrap();
        for w in 0..1u64 << 7 {
            assert_ne!(
                code.decode_mask(w, DecodeMode::Correct).0,
                DecodeStatus::Uncorrectable
            );
        }
    }

    #[test]
    fn parity_rule_agrees_with_bounded_distance_decoding() {
        let code = make_code("hamming84").unwrap();
        for w in 0..256u64 {
            let nearest = code.nearest_codewords(w);
            let dist = (nearest[0] ^ w).count_ones();
            let expected = match dist {
                0 => (DecodeStatus::Clean, Some(code.message_of(nearest[0]))),
                1 => (DecodeStatus::Corrected, Some(code.message_of(nearest[0]))),
                _ => (DecodeStatus::Uncorrectable, None),
            };
            assert_eq!(
                code.decode_mask(w, DecodeMode::Correct),
                expected,
                "word {w:08b}"
            );
        }
    }

    #[test]
    fn length_mismatch_rejected() {
        let code = make_code("rm13").unwrap();
        assert!(code.decode(&bv("0110011"), DecodeMode::Correct).is_err());
    }

    #[test]
    fn table_matches_direct_decoder() {
        for name in BUILTIN_CODES {
            let code = make_code(name).unwrap();
            for mode in [
                DecodeMode::DetectOnly,
                DecodeMode::Correct,
                DecodeMode::CorrectOptimistic,
            ] {
                let table = DecodeTable::new(&code, mode).unwrap();
                for w in 0..1u64 << code.n() {
                    assert_eq!(table.lookup(w), code.decode_mask(w, mode));
                }
            }
        }
    }

    #[test]
    fn mode_names_parse() {
        assert_eq!(
            "correct".parse::<DecodeMode>().unwrap(),
            DecodeMode::Correct
        );
        assert!("guess".parse::<DecodeMode>().is_err());
    }
}
