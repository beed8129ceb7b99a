#![allow(dead_code)]

use multirees::polycore::parse_polynomial;
use multirees::{Budget, FiltrationFamily, Ideal, PolyRing, Polynomial, QuotientRing, TermOrder};

pub fn budget() -> Budget {
    Budget::unlimited()
}

/// Filtration family over a standard-graded quotient ring, from plain text
/// parts: variables, defining relations, cutters.
pub fn family(vars: &[&str], relations: &[&str], cutters: &[&str]) -> FiltrationFamily {
    graded_family(vars, &[], relations, cutters)
}

/// Same with explicit variable weights; an empty slice keeps every weight 1.
pub fn graded_family(
    vars: &[&str],
    grading: &[u64],
    relations: &[&str],
    cutters: &[&str],
) -> FiltrationFamily {
    let ring = if grading.is_empty() {
        PolyRing::new(vars).unwrap()
    } else {
        PolyRing::with_grading(vars, grading).unwrap()
    };
    let gens: Vec<Polynomial> = relations
        .iter()
        .map(|s| parse_polynomial(&ring, s).unwrap())
        .collect();
    let ideal = Ideal::new(&ring, gens).unwrap();
    let quotient = QuotientRing::new(ideal, TermOrder::GrevLex, &budget()).unwrap();
    let cutters: Vec<Polynomial> = cutters
        .iter()
        .map(|s| parse_polynomial(&ring, s).unwrap())
        .collect();
    FiltrationFamily::new(quotient, cutters, &budget()).unwrap()
}

/// The running example: the coordinate ring of a cubic cone in six variables,
/// filtered by vanishing orders along the first two coordinate hyperplanes.
pub const CUBIC_CONE_VARS: [&str; 6] = ["u", "v", "w", "x", "y", "z"];
pub const CUBIC_CONE_RELATION: &str = "u^3 - v^3 + u*w^2 + v*w^2 + x^3 + y^3 + y*z^2";

pub fn cubic_cone_family() -> FiltrationFamily {
    family(&CUBIC_CONE_VARS, &[CUBIC_CONE_RELATION], &["u", "v"])
}

/// Binomial coefficient as a dimension count; zero when k exceeds n.
pub fn binom(n: u64, k: u64) -> usize {
    if k > n {
        return 0;
    }
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc as usize
}

/// Hilbert function of a degree-d hypersurface ring in v variables.
pub fn hypersurface_dim(v: u64, d: u64, n: u64) -> usize {
    let full = binom(n + v - 1, v - 1);
    let cut = if n >= d { binom(n - d + v - 1, v - 1) } else { 0 };
    full - cut
}
