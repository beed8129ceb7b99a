//! Exact multivariate polynomials over the rationals: graded rings, sparse
//! term maps, weight vectors, term orders, parsing, and canonical printing.
//!
//! Coefficients are arbitrary-precision rationals in lowest terms. Rings carry
//! a positive integer degree per variable (all 1 by default). Printing follows
//! the descending graded reverse lexicographic order, so equal polynomials
//! always render to identical text.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Exact scalar: arbitrary-precision rational, stored in lowest terms with a
/// positive denominator.
pub type Rational = num_rational::BigRational;

/// Rational from an integer.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational from numerator and denominator; panics on a zero denominator.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Canonical text form of a rational: `p` when the denominator is 1, else `p/q`.
pub fn fmt_rat(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `p` or `p/q` (optionally signed) into a rational.
pub fn parse_rat(s: &str) -> Result<Rational> {
    let bad = |msg: &str| Error::InvalidInput(format!("malformed rational `{s}`: {msg}"));
    let (num_part, den_part) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s.trim(), None),
    };
    let numer = BigInt::from_str(num_part).map_err(|_| bad("bad numerator"))?;
    let denom = match den_part {
        Some(d) => BigInt::from_str(d).map_err(|_| bad("bad denominator"))?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(Rational::new(numer, denom))
}

fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Ambient polynomial ring: named variables with positive integer degrees.
///
/// Rings compare by value; polynomials hold a shared handle and all binary
/// operations insist that both operands belong to the same ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyRing {
    vars: Vec<String>,
    degrees: Vec<u64>,
}

impl PolyRing {
    /// Standard grading: every variable has degree 1.
    pub fn new(vars: &[&str]) -> Result<Arc<PolyRing>> {
        let degrees = vec![1; vars.len()];
        Self::with_grading(vars, &degrees)
    }

    /// Weighted grading: `degrees[i]` is the degree of `vars[i]`, each >= 1.
    pub fn with_grading(vars: &[&str], degrees: &[u64]) -> Result<Arc<PolyRing>> {
        if vars.is_empty() {
            return Err(Error::InvalidInput("ring needs at least one variable".into()));
        }
        if vars.len() != degrees.len() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} variable degrees, got {}",
                vars.len(),
                degrees.len()
            )));
        }
        for (i, v) in vars.iter().enumerate() {
            if !valid_identifier(v) {
                return Err(Error::InvalidInput(format!("`{v}` is not a valid variable name")));
            }
            if vars[..i].contains(v) {
                return Err(Error::InvalidInput(format!("duplicate variable `{v}`")));
            }
        }
        if degrees.iter().any(|&d| d == 0) {
            return Err(Error::InvalidInput("variable degrees must be positive".into()));
        }
        Ok(Arc::new(PolyRing {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            degrees: degrees.to_vec(),
        }))
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_name(&self, i: usize) -> &str {
        &self.vars[i]
    }

    /// Index of a variable by name.
    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    /// Weighted degree of a monomial under this grading.
    pub fn monomial_degree(&self, m: &Monomial) -> u64 {
        m.exponents()
            .iter()
            .zip(&self.degrees)
            .map(|(&e, &d)| e as u64 * d)
            .sum()
    }

    /// All monomials of weighted degree `n`, in descending canonical order.
    pub fn monomials_of_degree(&self, n: u64) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut exps = vec![0u32; self.num_vars()];
        self.enumerate(0, n, &mut exps, &mut out);
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    fn enumerate(&self, i: usize, left: u64, exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == self.num_vars() {
            if left == 0 {
                out.push(Monomial::new(exps.clone()));
            }
            return;
        }
        let d = self.degrees[i];
        let max = left / d;
        for e in 0..=max {
            exps[i] = e as u32;
            self.enumerate(i + 1, left - e * d, exps, out);
        }
        exps[i] = 0;
    }
}

/// Shared-or-equal test for ring handles.
pub fn same_ring(a: &Arc<PolyRing>, b: &Arc<PolyRing>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Exponent vector of a monomial.
///
/// The intrinsic ordering is graded reverse lexicographic by total degree,
/// ascending, so sorted containers iterate from the smallest term to the
/// largest and `iter().rev()` yields the canonical descending order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    /// Constant monomial in `num_vars` variables.
    pub fn one(num_vars: usize) -> Self {
        Monomial(vec![0; num_vars])
    }

    /// The monomial `x_i`.
    pub fn var(num_vars: usize, i: usize) -> Self {
        Self::power(num_vars, i, 1)
    }

    /// The monomial `x_i^e`.
    pub fn power(num_vars: usize, i: usize, e: u32) -> Self {
        let mut exps = vec![0; num_vars];
        exps[i] = e;
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        assert_eq!(self.0.len(), other.0.len(), "monomial arity mismatch");
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        assert_eq!(self.0.len(), other.0.len(), "monomial arity mismatch");
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Quotient `self / other` when divisible.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        if !other.divides(self) {
            return None;
        }
        Some(Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        assert_eq!(self.0.len(), other.0.len(), "monomial arity mismatch");
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.0.len(), other.0.len(), "monomial arity mismatch");
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {
                for i in (0..self.0.len()).rev() {
                    if self.0[i] != other.0[i] {
                        return other.0[i].cmp(&self.0[i]);
                    }
                }
                Ordering::Equal
            }
            ord => ord,
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Nonnegative rational weights, one per coordinate of the target space
/// (ring variables for initial forms, filtration indices for valuation data).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightVector {
    entries: Vec<Rational>,
}

impl WeightVector {
    /// Build from rationals; every entry must be >= 0.
    pub fn new(entries: Vec<Rational>) -> Result<Self> {
        if entries.iter().any(|w| w.is_negative()) {
            return Err(Error::InvalidInput("weight vector entries must be >= 0".into()));
        }
        Ok(WeightVector { entries })
    }

    pub fn from_ints(entries: &[i64]) -> Result<Self> {
        Self::new(entries.iter().map(|&n| rat(n)).collect())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> &Rational {
        &self.entries[i]
    }

    /// True when every entry is strictly positive.
    pub fn is_strictly_positive(&self) -> bool {
        self.entries.iter().all(|w| w.is_positive())
    }

    /// Weight of a monomial: the inner product with its exponent vector.
    pub fn weight_of(&self, m: &Monomial) -> Result<Rational> {
        if m.num_vars() != self.entries.len() {
            return Err(Error::DimensionMismatch(format!(
                "weight vector has {} entries, monomial has {} variables",
                self.entries.len(),
                m.num_vars()
            )));
        }
        let mut acc = Rational::zero();
        for (w, &e) in self.entries.iter().zip(m.exponents()) {
            if e != 0 {
                acc += w * rat(e as i64);
            }
        }
        Ok(acc)
    }

    /// Inner product with a signed multi-index.
    pub fn pairing(&self, index: &[i64]) -> Rational {
        assert_eq!(index.len(), self.entries.len(), "multi-index arity mismatch");
        let mut acc = Rational::zero();
        for (w, &m) in self.entries.iter().zip(index) {
            if m != 0 {
                acc += w * rat(m);
            }
        }
        acc
    }

    /// Inner product with an exponent vector.
    pub fn pairing_unsigned(&self, index: &[u64]) -> Rational {
        assert_eq!(index.len(), self.entries.len(), "multi-index arity mismatch");
        let mut acc = Rational::zero();
        for (w, &m) in self.entries.iter().zip(index) {
            if m != 0 {
                acc += w * rat(m as i64);
            }
        }
        acc
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, w) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", fmt_rat(w))?;
        }
        write!(f, ")")
    }
}

/// Total order on monomials of a fixed ring.
///
/// The weight-refined order uses the min convention: lower weight compares as
/// larger, so the leading term of a polynomial is a term of minimal weight and
/// initial forms are leading forms. Weight-refined orders are only
/// well-founded degreewise; basis computations therefore insist on
/// homogeneous input when one is selected.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TermOrder {
    /// Pure lexicographic, earlier variables dominate.
    Lex,
    /// Total degree first, ties by reverse lexicographic.
    GrevLex,
    /// Compare weights first (min convention), break ties with another order.
    WeightRefined {
        weights: WeightVector,
        tiebreak: Box<TermOrder>,
    },
}

impl TermOrder {
    /// Weight-refined order over `weights` with a tiebreak order.
    pub fn weight_refined(weights: WeightVector, tiebreak: TermOrder) -> TermOrder {
        TermOrder::WeightRefined {
            weights,
            tiebreak: Box::new(tiebreak),
        }
    }

    /// Compare two monomials; `Greater` means `a` is the larger term.
    pub fn cmp_monomials(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            TermOrder::Lex => {
                for (x, y) in a.exponents().iter().zip(b.exponents()) {
                    if x != y {
                        return x.cmp(y);
                    }
                }
                Ordering::Equal
            }
            TermOrder::GrevLex => a.cmp(b),
            TermOrder::WeightRefined { weights, tiebreak } => {
                let wa = weights.weight_of(a).expect("weight arity matches ring");
                let wb = weights.weight_of(b).expect("weight arity matches ring");
                match wa.cmp(&wb) {
                    Ordering::Less => Ordering::Greater,
                    Ordering::Greater => Ordering::Less,
                    Ordering::Equal => tiebreak.cmp_monomials(a, b),
                }
            }
        }
    }
}

impl fmt::Display for TermOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermOrder::Lex => write!(f, "lex"),
            TermOrder::GrevLex => write!(f, "grevlex"),
            TermOrder::WeightRefined { weights, tiebreak } => {
                write!(f, "weight{weights}>{tiebreak}")
            }
        }
    }
}

/// Sparse polynomial: a term map from monomials to nonzero rational
/// coefficients over a shared ring handle.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    ring: Arc<PolyRing>,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(ring: &Arc<PolyRing>) -> Polynomial {
        Polynomial {
            ring: Arc::clone(ring),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: &Arc<PolyRing>) -> Polynomial {
        Self::constant(ring, Rational::one())
    }

    pub fn constant(ring: &Arc<PolyRing>, c: Rational) -> Polynomial {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(ring.num_vars()), c);
        }
        Polynomial {
            ring: Arc::clone(ring),
            terms,
        }
    }

    /// The variable `x_i` as a polynomial.
    pub fn variable(ring: &Arc<PolyRing>, i: usize) -> Result<Polynomial> {
        if i >= ring.num_vars() {
            return Err(Error::InvalidInput(format!("no variable with index {i}")));
        }
        Self::term(ring, Monomial::var(ring.num_vars(), i), Rational::one())
    }

    /// Single-term polynomial `c * m`.
    pub fn term(ring: &Arc<PolyRing>, m: Monomial, c: Rational) -> Result<Polynomial> {
        if m.num_vars() != ring.num_vars() {
            return Err(Error::DimensionMismatch(format!(
                "monomial has {} exponents, ring has {} variables",
                m.num_vars(),
                ring.num_vars()
            )));
        }
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Ok(Polynomial {
            ring: Arc::clone(ring),
            terms,
        })
    }

    /// Sum of terms; merges duplicates and drops zero coefficients.
    pub fn from_terms<I>(ring: &Arc<PolyRing>, iter: I) -> Result<Polynomial>
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut out = Polynomial::zero(ring);
        for (m, c) in iter {
            if m.num_vars() != ring.num_vars() {
                return Err(Error::DimensionMismatch(format!(
                    "monomial has {} exponents, ring has {} variables",
                    m.num_vars(),
                    ring.num_vars()
                )));
            }
            out.add_term(m, c);
        }
        Ok(out)
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending canonical order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// Coefficient of a monomial (zero when absent).
    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Largest weighted degree among the terms; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u64> {
        self.terms.keys().map(|m| self.ring.monomial_degree(m)).max()
    }

    /// True when all terms share one weighted degree (vacuously for zero).
    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| self.ring.monomial_degree(m));
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    /// Multiply by a single term.
    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> Polynomial {
        let mut out = Polynomial::zero(&self.ring);
        if c.is_zero() {
            return out;
        }
        for (mon, coeff) in &self.terms {
            out.terms.insert(mon.mul(m), coeff * c);
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        let mut out = Polynomial::zero(&self.ring);
        if c.is_zero() {
            return out;
        }
        for (mon, coeff) in &self.terms {
            out.terms.insert(mon.clone(), coeff * c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut out = Polynomial::one(&self.ring);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Leading term under a term order.
    pub fn lead(&self, order: &TermOrder) -> Option<(&Monomial, &Rational)> {
        self.terms
            .iter()
            .max_by(|(a, _), (b, _)| order.cmp_monomials(a, b))
    }

    /// Divide through by the leading coefficient under `order`.
    pub fn monic(&self, order: &TermOrder) -> Polynomial {
        match self.lead(order) {
            None => self.clone(),
            Some((_, c)) => {
                let inv = c.recip();
                self.scale(&inv)
            }
        }
    }

    /// Minimal weight among the terms; `None` encodes plus infinity (zero input).
    pub fn weight_value(&self, w: &WeightVector) -> Result<Option<Rational>> {
        let mut best: Option<Rational> = None;
        for m in self.terms.keys() {
            let v = w.weight_of(m)?;
            best = Some(match best {
                None => v,
                Some(b) => b.min(v),
            });
        }
        Ok(best)
    }

    /// Sum of the terms of minimal weight; zero maps to zero.
    pub fn initial_form(&self, w: &WeightVector) -> Result<Polynomial> {
        let min = match self.weight_value(w)? {
            None => return Ok(Polynomial::zero(&self.ring)),
            Some(v) => v,
        };
        let mut out = Polynomial::zero(&self.ring);
        for (m, c) in &self.terms {
            if w.weight_of(m)? == min {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        Ok(out)
    }

    fn assert_same_ring(&self, other: &Polynomial) {
        assert!(
            same_ring(&self.ring, &other.ring),
            "ring mismatch in polynomial arithmetic"
        );
    }
}

/// Minimal weight of the terms of `f`; `None` encodes plus infinity.
pub fn weight_value(f: &Polynomial, w: &WeightVector) -> Result<Option<Rational>> {
    f.weight_value(w)
}

/// Terms of `f` of minimal weight.
pub fn initial_form(f: &Polynomial, w: &WeightVector) -> Result<Polynomial> {
    f.initial_form(w)
}

impl std::ops::Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.assert_same_ring(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl std::ops::Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.assert_same_ring(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl std::ops::Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        let mut out = Polynomial::zero(&self.ring);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), -c.clone());
        }
        out
    }
}

impl std::ops::Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.assert_same_ring(rhs);
        let mut out = Polynomial::zero(&self.ring);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (mon, coeff)) in self.terms.iter().rev().enumerate() {
            let negative = coeff.is_negative();
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let abs = coeff.abs();
            if mon.is_one() {
                write!(f, "{}", fmt_rat(&abs))?;
                continue;
            }
            if !abs.is_one() {
                write!(f, "{}*", fmt_rat(&abs))?;
            }
            let mut first = true;
            for (j, &e) in mon.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                if e == 1 {
                    write!(f, "{}", self.ring.var_name(j))?;
                } else {
                    write!(f, "{}^{}", self.ring.var_name(j), e)?;
                }
            }
        }
        Ok(())
    }
}

const MAX_EXPONENT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Caret => write!(f, "`^`"),
            Tok::Slash => write!(f, "`/`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
        }
    }
}

struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(input: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = input.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        let tok = if c.is_ascii_digit() {
            let mut digits = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_digit() {
                    digits.push(bump(&mut chars));
                } else {
                    break;
                }
            }
            Tok::Int(BigInt::from_str(&digits).expect("digit string"))
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut name = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' {
                    name.push(bump(&mut chars));
                } else {
                    break;
                }
            }
            Tok::Ident(name)
        } else {
            let sym = bump(&mut chars);
            match sym {
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '^' => Tok::Caret,
                '/' => Tok::Slash,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                other => {
                    return Err(Error::Parse {
                        line: tline,
                        col: tcol,
                        msg: format!("unexpected character `{other}`"),
                    })
                }
            }
        };
        out.push(Spanned {
            tok,
            line: tline,
            col: tcol,
        });
    }
    Ok(out)
}

struct Parser<'a> {
    ring: &'a Arc<PolyRing>,
    toks: Vec<Spanned>,
    pos: usize,
    end_line: usize,
    end_col: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos) {
            Some(s) => (s.line, s.col),
            None => (self.end_line, self.end_col),
        }
    }

    fn advance(&mut self) -> &Spanned {
        let s = &self.toks[self.pos];
        self.pos += 1;
        s
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        let (line, col) = self.here();
        Error::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut negate = false;
        match self.peek() {
            Some(Tok::Minus) => {
                self.advance();
                negate = true;
            }
            Some(Tok::Plus) => {
                self.advance();
            }
            _ => {}
        }
        let mut acc = self.term()?;
        if negate {
            acc = -&acc;
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.advance();
                    let t = self.term()?;
                    acc = &acc + &t;
                }
                Some(Tok::Minus) => {
                    self.advance();
                    let t = self.term()?;
                    acc = &acc - &t;
                }
                None | Some(Tok::RParen) => break,
                Some(Tok::Ident(_)) | Some(Tok::Int(_)) | Some(Tok::LParen) => {
                    return Err(self.error(
                        "expected `+`, `-`, or `*` between factors (juxtaposition is not allowed)",
                    ))
                }
                Some(other) => return Err(self.error(format!("unexpected {other}"))),
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        while matches!(self.peek(), Some(Tok::Star)) {
            self.advance();
            let rhs = self.factor()?;
            acc = &acc * &rhs;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial> {
        let base = self.primary()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.advance();
            let exp = match self.peek() {
                Some(Tok::Int(n)) => {
                    let n = n.clone();
                    self.advance();
                    match u64::try_from(&n).ok().filter(|&e| e <= MAX_EXPONENT) {
                        Some(e) => e as u32,
                        None => return Err(self.error(format!("exponent `{n}` is too large"))),
                    }
                }
                _ => return Err(self.error("expected an integer exponent after `^`")),
            };
            return Ok(base.pow(exp));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(Tok::Int(_)) => {
                let numer = match &self.advance().tok {
                    Tok::Int(n) => n.clone(),
                    _ => unreachable!(),
                };
                if matches!(self.peek(), Some(Tok::Slash)) {
                    self.advance();
                    let denom = match self.peek() {
                        Some(Tok::Int(d)) => {
                            let d = d.clone();
                            self.advance();
                            d
                        }
                        _ => return Err(self.error("expected an integer denominator after `/`")),
                    };
                    if denom.is_zero() {
                        return Err(self.error("zero denominator in rational literal"));
                    }
                    return Ok(Polynomial::constant(self.ring, Rational::new(numer, denom)));
                }
                Ok(Polynomial::constant(self.ring, Rational::from_integer(numer)))
            }
            Some(Tok::Ident(_)) => {
                let (line, col) = self.here();
                let name = match &self.advance().tok {
                    Tok::Ident(s) => s.clone(),
                    _ => unreachable!(),
                };
                match self.ring.var_index(&name) {
                    Some(i) => Polynomial::variable(self.ring, i),
                    None => Err(Error::UndeclaredVariable {
                        name,
                        line,
                        col,
                    }),
                }
            }
            Some(Tok::LParen) => {
                self.advance();
                let inner = self.expr()?;
                if !matches!(self.peek(), Some(Tok::RParen)) {
                    return Err(self.error("expected `)`"));
                }
                self.advance();
                Ok(inner)
            }
            Some(other) => Err(self.error(format!(
                "expected a number, variable, or parenthesized expression, found {other}"
            ))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// Parse a polynomial in the given ring.
///
/// Grammar: sums of signed products; `*` is required between factors, `^`
/// takes nonnegative integer exponents, coefficients are integers or `p/q`,
/// parentheses group subexpressions. The zero polynomial is spelled `0`;
/// empty input is an error.
pub fn parse_polynomial(ring: &Arc<PolyRing>, input: &str) -> Result<Polynomial> {
    let toks = lex(input)?;
    let lines = input.lines().count().max(1);
    let last_len = input.lines().last().map_or(0, |l| l.chars().count());
    if toks.is_empty() {
        return Err(Error::Parse {
            line: 1,
            col: 1,
            msg: "empty input: write `0` for the zero polynomial".into(),
        });
    }
    let mut parser = Parser {
        ring,
        toks,
        pos: 0,
        end_line: lines,
        end_col: last_len + 1,
    };
    let poly = parser.expr()?;
    if parser.peek().is_some() {
        return Err(parser.error("unexpected `)`"));
    }
    Ok(poly)
}
