use serde::Serialize;

use super::{DecodeMode, DecodeStatus, LinearCode};

/// Classification of every weight-`t` error pattern under one decode mode.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PatternAnalysis {
    pub weight: usize,
    pub total: u64,
    /// Accepted as a codeword but carrying the wrong message.
    pub undetected: u64,
    /// Flagged uncorrectable.
    pub detected: u64,
    /// Delivered the transmitted message (including the error-free case).
    pub corrected: u64,
    /// Repaired toward a wrong codeword.
    pub miscorrected: u64,
}

/// Error patterns are applied to the zero codeword; linearity makes this
/// representative for every transmitted codeword except under the
/// optimistic tie-break, which prefers low message indices.
pub fn analyze_patterns(code: &LinearCode, mode: DecodeMode, weight: usize) -> PatternAnalysis {
    analyze_patterns_from(code, mode, weight, 0)
}

pub fn analyze_patterns_from(
    code: &LinearCode,
    mode: DecodeMode,
    weight: usize,
    message: u64,
) -> PatternAnalysis {
    let sent = code.encode_mask(message);
    let mut out = PatternAnalysis {
        weight,
        ..Default::default()
    };
    for error in patterns_of_weight(code.n(), weight) {
        out.total += 1;
        let (status, decoded) = code.decode_mask(sent ^ error, mode);
        match (status, decoded == Some(message)) {
            (DecodeStatus::Uncorrectable, _) => out.detected += 1,
            (_, true) => out.corrected += 1,
            (DecodeStatus::Clean, false) => out.undetected += 1,
            (DecodeStatus::Corrected, false) => out.miscorrected += 1,
        }
    }
    out
}

/// Worst/best-case detection and correction capability.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Capability {
    pub code: String,
    pub d_min: usize,
    pub worst_detect: usize,
    pub worst_correct: usize,
    pub best_detect: usize,
    pub best_correct: usize,
    /// Mode whose figures produced `worst_detect`.
    pub detect_mode: DecodeMode,
    /// Largest error weight examined.
    pub max_weight: usize,
}

/// Error weights examined by [`capability_summary`].
pub const CAPABILITY_WINDOW: usize = 3;

/// Detection is judged in detect-only mode and correction in correct mode.
/// A code whose correcting decoder is complete (never reports uncorrectable)
/// cannot run both at once, so its worst-case detection is taken from the
/// correcting decoder instead. Best cases count a weight as soon as one
/// pattern of it succeeds; correction uses the optimistic tie-break.
pub fn capability_summary(code: &LinearCode) -> Capability {
    capability_summary_within(code, CAPABILITY_WINDOW)
}

pub fn capability_summary_within(code: &LinearCode, max_weight: usize) -> Capability {
    let max_weight = max_weight.min(code.n());
    let table = |mode| -> Vec<PatternAnalysis> {
        (1..=max_weight)
            .map(|t| analyze_patterns(code, mode, t))
            .collect()
    };
    let detect = table(DecodeMode::DetectOnly);
    let correct = table(DecodeMode::Correct);
    let optimistic = table(DecodeMode::CorrectOptimistic);

    let complete =
        (1..=code.n()).all(|t| analyze_patterns(code, DecodeMode::Correct, t).detected == 0);
    let (detect_mode, reliable) = if complete {
        (DecodeMode::Correct, &correct)
    } else {
        (DecodeMode::DetectOnly, &detect)
    };

    Capability {
        code: code.name().to_string(),
        d_min: code.d_min(),
        worst_detect: longest_prefix(reliable, |a| a.undetected == 0 && a.miscorrected == 0),
        worst_correct: longest_prefix(&correct, |a| a.corrected == a.total),
        best_detect: last_weight(&detect, |a| a.detected > 0),
        best_correct: last_weight(&optimistic, |a| a.corrected > 0),
        detect_mode,
        max_weight,
    }
}

fn longest_prefix(rows: &[PatternAnalysis], ok: impl Fn(&PatternAnalysis) -> bool) -> usize {
    rows.iter().take_while(|a| ok(a)).count()
}

fn last_weight(rows: &[PatternAnalysis], ok: impl Fn(&PatternAnalysis) -> bool) -> usize {
    rows.iter()
        .filter(|a| ok(a))
        .map(|a| a.weight)
        .max()
        .unwrap_or(0)
}

/// Every `n`-bit mask with exactly `weight` ones, in increasing order.
pub(crate) fn patterns_of_weight(n: usize, weight: usize) -> impl Iterator<Item = u64> {
    assert!(n < 64, "pattern enumeration limited to n < 64");
    let limit = 1u64 << n;
    let first = if weight == 0 { 0 } else { (1u64 << weight) - 1 };
    let mut next = (weight <= n).then_some(first);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            // Gosper's hack.
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let succ = (((r ^ cur) >> 2) / c) | r;
            (succ < limit).then_some(succ)
        };
        Some(cur)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{make_code, BUILTIN_CODES};

    fn binomial(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn pattern_enumeration_counts() {
        for n in 1..=10 {
            for t in 0..=n {
                let pats: Vec<u64> = patterns_of_weight(n, t).collect();
                assert_eq!(
                    pats.len() as u64,
                    binomial(n as u64, t as u64),
                    "n={n} t={t}"
                );
                assert!(pats.iter().all(|p| p.count_ones() as usize == t));
            }
        }
        assert_eq!(patterns_of_weight(4, 5).count(), 0);
    }

    #[test]
    fn hamming74_detects_28_of_35_triples() {
        let code = make_code("hamming74").unwrap();
        let a = analyze_patterns(&code, DecodeMode::DetectOnly, 3);
        assert_eq!((a.detected, a.undetected, a.total), (28, 7, 35));
    }

    #[test]
    fn hamming74_miscorrects_every_double() {
        let code = make_code("hamming74").unwrap();
        let a = analyze_patterns(&code, DecodeMode::Correct, 2);
        assert_eq!((a.miscorrected, a.corrected, a.detected), (21, 0, 0));
    }

    #[test]
    fn weight_zero_is_always_delivered() {
        for name in BUILTIN_CODES {
            let code = make_code(name).unwrap();
            for mode in [
                DecodeMode::DetectOnly,
                DecodeMode::Correct,
                DecodeMode::CorrectOptimistic,
            ] {
                let a = analyze_patterns(&code, mode, 0);
                assert_eq!(
                    a,
                    PatternAnalysis {
                        weight: 0,
                        total: 1,
                        corrected: 1,
                        ..Default::default()
                    }
                );
            }
        }
    }

    #[test]
    fn table_one_rows() {
        let h84 = capability_summary(&make_code("hamming84").unwrap());
        assert_eq!(
            (
                h84.worst_detect,
                h84.worst_correct,
                h84.best_detect,
                h84.best_correct
            ),
            (3, 1, 3, 1)
        );
        let h74 = capability_summary(&make_code("hamming74").unwrap());
        assert_eq!(
            (
                h74.worst_detect,
                h74.worst_correct,
                h74.best_detect,
                h74.best_correct
            ),
            (1, 1, 3, 1)
        );
        assert_eq!(h74.detect_mode, DecodeMode::Correct);
        let rm = capability_summary(&make_code("rm13").unwrap());
        assert_eq!(
            (
                rm.worst_detect,
                rm.worst_correct,
                rm.best_detect,
                rm.best_correct
            ),
            (3, 1, 3, 2)
        );
    }
}
