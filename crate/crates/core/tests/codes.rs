use std::collections::BTreeMap;

use proptest::prelude::*;
use sfq_ecc::codes::{analyze_patterns, analyze_patterns_from, capability_summary, BUILTIN_CODES};
use sfq_ecc::{make_code, BitVector, DecodeMode, DecodeStatus, LinearCode};

/// Generator rows as printed, leftmost character is position 1.
fn rows(name: &str) -> Vec<&'static str> {
    match name {
        "hamming84" => vec!["11100001", "10011001", "01010101", "11010010"],
        "hamming74" => vec!["1110000", "1001100", "0101010", "1101001"],
        "rm13" => vec!["11111111", "00001111", "00110011", "01010101"],
        _ => unreachable!(),
    }
}

/// Codeword as a string, computed straight from the printed rows.
fn oracle_encode(name: &str, message: &str) -> String {
    let g = rows(name);
    let n = g[0].len();
    (0..n)
        .map(|j| {
            let bit = message
                .bytes()
                .zip(&g)
                .filter(|(m, row)| *m == b'1' && row.as_bytes()[j] == b'1')
                .count()
                % 2;
            if bit == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

fn all_messages() -> Vec<String> {
    (0..16)
        .map(|m| {
            (0..4)
                .map(|i| if m >> i & 1 == 1 { '1' } else { '0' })
                .collect()
        })
        .collect()
}

fn oracle_codewords(name: &str) -> Vec<String> {
    all_messages()
        .iter()
        .map(|m| oracle_encode(name, m))
        .collect()
}

fn weight(s: &str) -> usize {
    s.bytes().filter(|&b| b == b'1').count()
}

#[test]
fn encoding_matches_printed_generators() {
    for name in BUILTIN_CODES {
        let code = make_code(name).unwrap();
        for m in all_messages() {
            let got = code.encode(&m.parse().unwrap()).unwrap();
            assert_eq!(got.to_string(), oracle_encode(name, &m), "{name} {m}");
        }
    }
    assert_eq!(oracle_encode("hamming84", "1011"), "01100110");
}

#[test]
fn minimum_distances() {
    for (name, d) in [("hamming74", 3), ("hamming84", 4), ("rm13", 4)] {
        let oracle = oracle_codewords(name)
            .iter()
            .filter(|c| weight(c) > 0)
            .map(|c| weight(c))
            .min();
        assert_eq!(oracle, Some(d));
        assert_eq!(make_code(name).unwrap().d_min(), d);
    }
}

#[test]
fn extended_hamming_weight_enumerator() {
    let mut hist = BTreeMap::new();
    for c in oracle_codewords("hamming84") {
        *hist.entry(weight(&c)).or_insert(0) += 1;
    }
    assert_eq!(hist, BTreeMap::from([(0, 1), (4, 14), (8, 1)]));
    let code = make_code("hamming84").unwrap();
    let mut lib = BTreeMap::new();
    for c in code.codewords() {
        *lib.entry(c.count_ones() as usize).or_insert(0) += 1;
    }
    assert_eq!(lib, hist);
}

#[test]
fn hamming74_weight_three_detection() {
    let code = make_code("hamming74").unwrap();
    let a = analyze_patterns(&code, DecodeMode::DetectOnly, 3);
    let weight3 = oracle_codewords("hamming74")
        .iter()
        .filter(|c| weight(c) == 3)
        .count();
    assert_eq!(weight3, 7);
    assert_eq!((a.total, a.detected, a.undetected), (35, 28, 7));
}

#[test]
fn parity_check_annihilates_codewords() {
    for name in BUILTIN_CODES {
        let code = make_code(name).unwrap();
        for c in code.codewords() {
            assert_eq!(code.syndrome(*c), 0);
        }
        for row in code.parity_check() {
            for g in code.generator() {
                let dot = (0..code.n()).map(|i| row.get(i) & g.get(i)).sum::<u8>() % 2;
                assert_eq!(dot, 0);
            }
        }
    }
}

#[test]
fn rm13_weight_two_patterns_are_four_way_ties() {
    let code = make_code("rm13").unwrap();
    let words = oracle_codewords("rm13");
    let mut count = 0;
    for i in 0..8 {
        for j in i + 1..8 {
            count += 1;
            let mut e = vec![b'0'; 8];
            e[i] = b'1';
            e[j] = b'1';
            let e = String::from_utf8(e).unwrap();
            let nearest = words
                .iter()
                .filter(|c| c.bytes().zip(e.bytes()).filter(|(a, b)| a != b).count() == 2)
                .count();
            assert_eq!(nearest, 4, "pattern {e}");
            let out = code
                .decode(&e.parse().unwrap(), DecodeMode::Correct)
                .unwrap();
            assert_eq!(out.status, DecodeStatus::Uncorrectable);
            assert_eq!(
                code.nearest_codewords(e.parse::<BitVector>().unwrap().to_mask())
                    .len(),
                4
            );
        }
    }
    assert_eq!(count, 28);
}

#[test]
fn single_errors_are_corrected_from_every_codeword() {
    for name in BUILTIN_CODES {
        let code = make_code(name).unwrap();
        for m in 0..16 {
            let a = analyze_patterns_from(&code, DecodeMode::Correct, 1, m);
            assert_eq!(a.corrected, code.n() as u64, "{name}");
        }
    }
}

#[test]
fn capability_rows() {
    let row = |n| {
        let c = capability_summary(&make_code(n).unwrap());
        (
            c.d_min,
            c.worst_detect,
            c.worst_correct,
            c.best_detect,
            c.best_correct,
        )
    };
    assert_eq!(row("hamming84"), (4, 3, 1, 3, 1));
    assert_eq!(row("hamming74"), (3, 1, 1, 3, 1));
    assert_eq!(row("rm13"), (4, 3, 1, 3, 2));
}

#[test]
fn unknown_code_is_rejected() {
    assert!(make_code("bogus").is_err());
}

fn any_code() -> impl Strategy<Value = LinearCode> {
    prop::sample::select(BUILTIN_CODES.to_vec()).prop_map(|n| make_code(n).unwrap())
}

proptest! {
    #[test]
    fn encoding_is_linear(code in any_code(), a in 0u64..16, b in 0u64..16) {
        prop_assert_eq!(code.encode_mask(a ^ b), code.encode_mask(a) ^ code.encode_mask(b));
    }

    // Outcomes depend on the error pattern only, not on which codeword was sent.
    #[test]
    fn decoding_is_translation_invariant(
        code in any_code(),
        mode in prop::sample::select(vec![DecodeMode::DetectOnly, DecodeMode::Correct]),
        m in 0u64..16,
        e in 0u64..256,
    ) {
        let e = e & ((1 << code.n()) - 1);
        let (s0, d0) = code.decode_mask(e, mode);
        let (s1, d1) = code.decode_mask(code.encode_mask(m) ^ e, mode);
        prop_assert_eq!(s0, s1);
        prop_assert_eq!(d0.map(|x| x ^ m), d1);
    }

    #[test]
    fn bit_vectors_round_trip(bits in prop::collection::vec(0u8..2, 1..64)) {
        let v = BitVector::from_bits(&bits).unwrap();
        let back: BitVector = v.to_string().parse().unwrap();
        prop_assert_eq!(&back, &v);
        prop_assert_eq!(BitVector::from_mask(v.to_mask(), v.len()), v);
    }
}
