//! Debutanizer fixtures and the published tables they are checked against.
#![allow(dead_code)]

use std::path::PathBuf;

use gaincond::{parse_model, GainModel64, ModelFormat};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn load(name: &str) -> GainModel64 {
    let path = fixture_path(name);
    let text = std::fs::read_to_string(&path).unwrap();
    parse_model(&text, ModelFormat::from_path(&path)).unwrap()
}

/// Plant gains in engineering units with their move sizes.
pub fn debutanizer() -> GainModel64 {
    load("debutanizer.json")
}

/// Published scaled gains, unit move sizes.
pub fn debutanizer_scaled() -> GainModel64 {
    load("debutanizer_scaled.json")
}

pub const SCALED_GAINS: [[f64; 5]; 8] = [
    [-1.0, -0.0754, 0.3664, 0.0, 0.0337],
    [0.9666, -0.7552, -1.0, 0.0, 0.1839],
    [0.9748, -0.7807, -1.0, 0.0, 0.1962],
    [0.5500, 0.0, -0.1797, -1.0, 0.5129],
    [1.0, 0.4049, -0.1848, 0.0, 0.4145],
    [0.9965, 0.5011, -1.0, 0.0, 0.3747],
    [1.0, 0.3767, -0.3219, 0.0, 0.3027],
    [0.0, 1.0, 0.0, 0.0, 0.0],
];

pub const BINNED_GAINS: [[f64; 5]; 8] = [
    [-1.0, -0.0754, 0.3664, 0.0, 0.0337],
    [1.0, -0.7703, -1.0, 0.0, 0.1914],
    [1.0, -0.7703, -1.0, 0.0, 0.1914],
    [0.5439, 0.0, -0.1755, -1.0, 0.5129],
    [1.0, 0.4189, -0.1848, 0.0, 0.4189],
    [1.0, 0.4985, -1.0, 0.0, 0.3840],
    [1.0, 0.3840, -0.3227, 0.0, 0.2958],
    [0.0, 1.0, 0.0, 0.0, 0.0],
];

/// Published change percentages after binning, by `(cv, mv)`.
pub const BINNED_CHANGES: [((usize, usize), f64); 16] = [
    ((1, 0), 3.46),
    ((1, 1), 2.00),
    ((1, 4), 4.08),
    ((2, 0), 2.59),
    ((2, 1), -1.34),
    ((2, 4), -2.41),
    ((3, 0), -1.11),
    ((3, 2), -2.37),
    ((4, 1), 3.46),
    ((4, 4), 1.06),
    ((5, 0), 0.35),
    ((5, 1), -0.52),
    ((5, 4), 2.49),
    ((6, 1), 1.93),
    ((6, 2), 0.25),
    ((6, 4), -2.30),
];

/// Flagged pairs: `(mv1, mv2, cv1, cv2, cond, rga)`.
pub const FLAGGED_PAIRS: [(&str, &str, &str, &str, f64, f64); 13] = [
    ("FC-REFLUX-SP", "FI-FEED-PV", "PC-TOP-OPT", "FC-REBOIL-OP", 59.14, 14.36),
    ("TC-REBOIL-SP", "FI-FEED-PV", "DP-DEBUT-PV", "PC-TOP-OPT", 59.99, 10.75),
    ("TC-REBOIL-SP", "PC-TOP-SP", "AI-RVP-PV", "LI-ACCUM-PF", 67.50, 9.26),
    ("TC-REBOIL-SP", "FC-REFLUX-SP", "DP-DEBUT-PV", "FC-REBOIL-OP", 81.83, 14.37),
    ("FC-REFLUX-SP", "PC-TOP-SP", "AI-DIST-C5", "TOP-PCT", 124.38, 30.54),
    ("TC-REBOIL-SP", "PC-TOP-SP", "AI-DIST-C5", "PC-TOP-OPT", 131.01, 33.24),
    ("TC-REBOIL-SP", "FC-REFLUX-SP", "AI-DIST-C5", "TOP-PCT", 165.64, 40.79),
    ("PC-TOP-SP", "FI-FEED-PV", "AI-DIST-C5", "TOP-PCT", 169.40, 16.04),
    ("TC-REBOIL-SP", "PC-TOP-SP", "TOP-PCT", "PC-TOP-OPT", 181.27, 45.81),
    ("TC-REBOIL-SP", "FI-FEED-PV", "AI-DIST-C5", "TOP-PCT", 189.76, 18.39),
    ("FC-REFLUX-SP", "FI-FEED-PV", "AI-DIST-C5", "TOP-PCT", 276.03, 32.66),
    ("TC-REBOIL-SP", "PC-TOP-SP", "AI-DIST-C5", "TOP-PCT", 472.37, 118.54),
    ("TC-REBOIL-SP", "PC-TOP-SP", "LI-ACCUM-PF", "FC-REBOIL-OP", 530.00, 66.23),
];

/// Collinear pairs after binning, under the plant's original tag names.
pub const COLLINEAR_AFTER_BINNING: [(&str, &str, &str, &str); 10] = [
    ("TC-REBOIL-SP", "FC-REFLUX-SP", "AI-C5A5INF2L", "TP-TOP-LIN"),
    ("TC-REBOIL-SP", "PC-TOP-SP", "AI-C5A5INF2L", "TP-TOP-LIN"),
    ("TC-REBOIL-SP", "FI-FEED-PV", "AI-C5A5INF2L", "TP-TOP-LIN"),
    ("FC-REFLUX-SP", "PC-TOP-SP", "AI-C5A5INF2L", "TP-TOP-LIN"),
    ("FC-REFLUX-SP", "FI-FEED-PV", "AI-C5A5INF2L", "TP-TOP-LIN"),
    ("PC-TOP-SP", "FI-FEED-PV", "AI-C5A5INF2L", "TP-TOP-LIN"),
    ("FC-REFLUX-SP", "FI-FEED-PV", "PC-TOP-OPT", "FC-REBOIL-OP"),
    ("TC-REBOIL-SP", "PC-TOP-SP", "LI-ACCUM-PF", "FC-REBOIL-OP"),
    ("TC-REBOIL-SP", "PC-TOP-SP", "AI-C5A5INF2L", "PC-TOP-OPT"),
    ("TC-REBOIL-SP", "PC-TOP-SP", "TP-TOP-LIN", "PC-TOP-OPT"),
];

/// Original tag name to fixture name.
pub fn fixture_name(tag: &str) -> &str {
    match tag {
        "AI-C5A5INF2L" => "AI-DIST-C5",
        "TP-TOP-LIN" => "TOP-PCT",
        other => other,
    }
}

/// Resolves names to `((mv1, mv2), (cv1, cv2))` with each pair ascending.
pub fn pair_index(m: &GainModel64, mv1: &str, mv2: &str, cv1: &str, cv2: &str) -> ((usize, usize), (usize, usize)) {
    let mv = |n: &str| m.mv_index(n).unwrap_or_else(|| panic!("unknown MV {n}"));
    let cv = |n: &str| m.cv_index(n).unwrap_or_else(|| panic!("unknown CV {n}"));
    let sort = |a: usize, b: usize| (a.min(b), a.max(b));
    (sort(mv(mv1), mv(mv2)), sort(cv(cv1), cv(cv2)))
}

pub fn within_pct(actual: f64, expected: f64, pct: f64) -> bool {
    ((actual - expected) / expected).abs() * 100.0 <= pct
}
