//! Exact graded linear algebra: sparse reduced row echelon bases over the
//! rationals, degree slices of graded spaces in monomial coordinates, and
//! intersection complexes of a graded piece against a family of subobjects.
//!
//! Every subspace is stored as its unique reduced row echelon basis, so
//! equality of slices is literal equality and intersections and sums are
//! canonical regardless of evaluation order.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::budget::Budget;
use crate::filtration::QuotientRing;
use crate::groebner::Ideal;
use crate::polycore::{Monomial, PolyRing, Polynomial, Rational};
use crate::{Error, Result};

/// Sparse rational row vector: strictly increasing column indices paired with
/// nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(u32, Rational)>,
}

impl SparseVec {
    pub fn zero() -> SparseVec {
        SparseVec { entries: Vec::new() }
    }

    /// Build from arbitrary pairs: sorts, merges duplicates, drops zeros.
    pub fn from_pairs(pairs: Vec<(u32, Rational)>) -> SparseVec {
        let mut pairs = pairs;
        pairs.sort_by_key(|&(c, _)| c);
        let mut entries: Vec<(u32, Rational)> = Vec::with_capacity(pairs.len());
        for (c, v) in pairs {
            match entries.last_mut() {
                Some((lc, lv)) if *lc == c => {
                    *lv += v;
                    if lv.is_zero() {
                        entries.pop();
                    }
                }
                _ => {
                    if !v.is_zero() {
                        entries.push((c, v));
                    }
                }
            }
        }
        SparseVec { entries }
    }

    /// Dense integer row, mainly for tests and raw tables.
    pub fn from_ints(dense: &[i64]) -> SparseVec {
        SparseVec {
            entries: dense
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0)
                .map(|(i, &v)| (i as u32, crate::polycore::rat(v)))
                .collect(),
        }
    }

    pub fn from_rationals(dense: &[Rational]) -> SparseVec {
        SparseVec {
            entries: dense
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i as u32, v.clone()))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(u32, Rational)> {
        self.entries.iter()
    }

    /// First (column, coefficient) pair.
    pub fn leading(&self) -> Option<&(u32, Rational)> {
        self.entries.first()
    }

    /// Coefficient at a column, if nonzero.
    pub fn get(&self, col: u32) -> Option<&Rational> {
        self.entries
            .binary_search_by_key(&col, |&(c, _)| c)
            .ok()
            .map(|i| &self.entries[i].1)
    }

    pub fn scale(&mut self, c: &Rational) {
        if c.is_zero() {
            self.entries.clear();
            return;
        }
        for (_, v) in &mut self.entries {
            *v *= c;
        }
    }

    /// In-place `self += c * other`, merging sorted entry lists.
    pub fn axpy(&mut self, c: &Rational, other: &SparseVec) {
        if c.is_zero() || other.is_zero() {
            return;
        }
        let mut merged = Vec::with_capacity(self.entries.len() + other.entries.len());
        let mut a = self.entries.iter();
        let mut b = other.entries.iter();
        let mut na = a.next();
        let mut nb = b.next();
        while let (Some((ca, va)), Some((cb, vb))) = (na, nb) {
            match ca.cmp(cb) {
                std::cmp::Ordering::Less => {
                    merged.push((*ca, va.clone()));
                    na = a.next();
                }
                std::cmp::Ordering::Greater => {
                    merged.push((*cb, c * vb));
                    nb = b.next();
                }
                std::cmp::Ordering::Equal => {
                    let v = va + c * vb;
                    if !v.is_zero() {
                        merged.push((*ca, v));
                    }
                    na = a.next();
                    nb = b.next();
                }
            }
        }
        while let Some((ca, va)) = na {
            merged.push((*ca, va.clone()));
            na = a.next();
        }
        while let Some((cb, vb)) = nb {
            merged.push((*cb, c * vb));
            nb = b.next();
        }
        self.entries = merged;
    }

    /// Shift all columns by a signed offset.
    fn shifted(&self, offset: i64) -> SparseVec {
        SparseVec {
            entries: self
                .entries
                .iter()
                .map(|(c, v)| ((*c as i64 + offset) as u32, v.clone()))
                .collect(),
        }
    }
}

/// Reduced row echelon basis of a row space.
///
/// Rows are pivot-normalized, pivot columns strictly increase, and each pivot
/// column is eliminated from every other row, so the matrix is the unique
/// canonical basis of its span and equality of spans is structural equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Echelon {
    ncols: u32,
    rows: Vec<SparseVec>,
    pivots: Vec<u32>,
}

impl Echelon {
    pub fn new(ncols: u32) -> Echelon {
        Echelon {
            ncols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// Echelonize a list of rows.
    pub fn from_rows<I>(ncols: u32, rows: I, budget: &Budget) -> Result<Echelon>
    where
        I: IntoIterator<Item = SparseVec>,
    {
        let mut ech = Echelon::new(ncols);
        for row in rows {
            ech.insert(row, budget)?;
        }
        Ok(ech)
    }

    /// Identity basis: the full coordinate space.
    pub fn identity(ncols: u32) -> Echelon {
        let rows = (0..ncols)
            .map(|i| SparseVec {
                entries: vec![(i, Rational::one())],
            })
            .collect();
        Echelon {
            ncols,
            rows,
            pivots: (0..ncols).collect(),
        }
    }

    pub fn ncols(&self) -> u32 {
        self.ncols
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn pivots(&self) -> &[u32] {
        &self.pivots
    }

    /// Residual of `v` after reduction by the basis; zero iff `v` is in the span.
    pub fn reduce(&self, v: &SparseVec, budget: &Budget) -> Result<SparseVec> {
        let mut out = v.clone();
        for (i, &p) in self.pivots.iter().enumerate() {
            if let Some(c) = out.get(p) {
                let c = -c.clone();
                budget.charge_cells(self.rows[i].nnz() as u64)?;
                out.axpy(&c, &self.rows[i]);
            }
        }
        Ok(out)
    }

    /// Insert a row, keeping the reduced echelon invariants. Returns whether
    /// the dimension grew.
    pub fn insert(&mut self, v: SparseVec, budget: &Budget) -> Result<bool> {
        debug_assert!(v.entries.iter().all(|&(c, _)| c < self.ncols));
        let mut v = self.reduce(&v, budget)?;
        if v.is_zero() {
            return Ok(false);
        }
        let (pcol, pcoef) = v.leading().expect("nonzero residual").clone();
        if !pcoef.is_one() {
            v.scale(&pcoef.recip());
        }
        for row in &mut self.rows {
            if let Some(c) = row.get(pcol) {
                let c = -c.clone();
                budget.charge_cells(v.nnz() as u64)?;
                row.axpy(&c, &v);
            }
        }
        let pos = self.pivots.partition_point(|&p| p < pcol);
        self.pivots.insert(pos, pcol);
        self.rows.insert(pos, v);
        Ok(true)
    }

    /// Membership in the row space.
    pub fn contains(&self, v: &SparseVec, budget: &Budget) -> Result<bool> {
        Ok(self.reduce(v, budget)?.is_zero())
    }

    /// Containment of row spaces.
    pub fn contains_space(&self, other: &Echelon, budget: &Budget) -> Result<bool> {
        for row in &other.rows {
            if !self.contains(row, budget)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Coordinates of `v` with respect to this basis, when `v` is in the span.
    ///
    /// Because the basis is fully reduced, the coordinate on row `i` is the
    /// entry of `v` at pivot column `i`; the residual is checked to vanish.
    pub fn express(&self, v: &SparseVec, budget: &Budget) -> Result<Option<SparseVec>> {
        if !self.contains(v, budget)? {
            return Ok(None);
        }
        let mut coords = Vec::new();
        for (i, &p) in self.pivots.iter().enumerate() {
            if let Some(c) = v.get(p) {
                coords.push((i as u32, c.clone()));
            }
        }
        Ok(Some(SparseVec { entries: coords }))
    }
}

/// Rank of a list of rows via sparse reduced echelon elimination
/// (leftmost-pivot order).
pub fn rank(ncols: u32, rows: &[SparseVec], budget: &Budget) -> Result<usize> {
    Ok(Echelon::from_rows(ncols, rows.iter().cloned(), budget)?.dim())
}

/// Rank via dense fraction-free elimination over the integers with the
/// opposite pivoting order (rightmost column first, last row preferred).
///
/// Independent of `rank` in both algorithm and pivot strategy; the two must
/// always agree, which is exercised by property tests.
pub fn rank_fraction_free(ncols: u32, rows: &[SparseVec]) -> usize {
    let n = ncols as usize;
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            let mut lcm = BigInt::one();
            for (_, v) in r.iter() {
                lcm = num_integer::lcm(lcm, v.denom().clone());
            }
            let mut dense = vec![BigInt::zero(); n];
            for (c, v) in r.iter() {
                dense[*c as usize] = v.numer() * (&lcm / v.denom());
            }
            dense
        })
        .collect();
    let mut rank = 0usize;
    let mut prev_pivot = BigInt::one();
    for col in (0..n).rev() {
        let Some(pr) = (rank..m.len()).rev().find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pr);
        let pivot = m[rank][col].clone();
        for i in rank + 1..m.len() {
            let scale = std::mem::replace(&mut m[i][col], BigInt::zero());
            for j in 0..n {
                if j == col {
                    continue;
                }
                let val = &m[i][j] * &pivot - &m[rank][j] * &scale;
                debug_assert!((&val % &prev_pivot).is_zero(), "inexact pivot division");
                m[i][j] = &val / &prev_pivot;
            }
        }
        prev_pivot = pivot;
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Coordinate frame for one degree: an ordered monomial basis (descending
/// canonical order) indexing the columns of every slice in that degree.
#[derive(Debug)]
pub struct Frame {
    ring: Arc<PolyRing>,
    degree: u64,
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, u32>,
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.degree == other.degree && self.monomials == other.monomials
    }
}

impl Eq for Frame {}

impl Frame {
    /// Frame of all monomials of one degree in the polynomial ring.
    pub fn full(ring: &Arc<PolyRing>, degree: u64) -> Arc<Frame> {
        Self::from_monomials(ring, degree, ring.monomials_of_degree(degree))
    }

    /// Frame over an explicit monomial list (already in descending order).
    pub fn from_monomials(ring: &Arc<PolyRing>, degree: u64, monomials: Vec<Monomial>) -> Arc<Frame> {
        let index = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i as u32))
            .collect();
        Arc::new(Frame {
            ring: Arc::clone(ring),
            degree,
            monomials,
            index,
        })
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomial(&self, i: u32) -> &Monomial {
        &self.monomials[i as usize]
    }

    pub fn position(&self, m: &Monomial) -> Option<u32> {
        self.index.get(m).copied()
    }

    /// Coordinates of a polynomial whose support lies inside the frame.
    pub fn coords(&self, f: &Polynomial) -> Result<SparseVec> {
        if !crate::polycore::same_ring(f.ring(), &self.ring) {
            return Err(Error::RingMismatch(
                "polynomial ring differs from frame ring".into(),
            ));
        }
        let mut pairs = Vec::with_capacity(f.num_terms());
        for (m, c) in f.terms() {
            match self.position(m) {
                Some(i) => pairs.push((i, c.clone())),
                None => {
                    return Err(Error::InvalidInput(format!(
                        "term of degree {} does not lie in the degree-{} frame",
                        self.ring.monomial_degree(m),
                        self.degree
                    )))
                }
            }
        }
        Ok(SparseVec::from_pairs(pairs))
    }

    /// Polynomial with the given frame coordinates.
    pub fn lift(&self, v: &SparseVec) -> Polynomial {
        Polynomial::from_terms(
            &self.ring,
            v.iter()
                .map(|(c, val)| (self.monomials[*c as usize].clone(), val.clone())),
        )
        .expect("frame monomials belong to the ring")
    }
}

/// Column labels of a slice: a monomial frame, or anonymous coordinates for
/// raw subspace tables injected by tests and the flatness seam.
#[derive(Debug, Clone)]
pub enum SliceFrame {
    Monomials(Arc<Frame>),
    Anonymous { ncols: u32 },
}

impl SliceFrame {
    pub fn ncols(&self) -> u32 {
        match self {
            SliceFrame::Monomials(f) => f.len() as u32,
            SliceFrame::Anonymous { ncols } => *ncols,
        }
    }

    pub fn compatible(&self, other: &SliceFrame) -> bool {
        match (self, other) {
            (SliceFrame::Monomials(a), SliceFrame::Monomials(b)) => Arc::ptr_eq(a, b) || a == b,
            (SliceFrame::Anonymous { ncols: a }, SliceFrame::Anonymous { ncols: b }) => a == b,
            _ => false,
        }
    }

    pub fn frame(&self) -> Option<&Arc<Frame>> {
        match self {
            SliceFrame::Monomials(f) => Some(f),
            SliceFrame::Anonymous { .. } => None,
        }
    }
}

impl PartialEq for SliceFrame {
    fn eq(&self, other: &Self) -> bool {
        self.compatible(other)
    }
}

impl Eq for SliceFrame {}

/// Canonical basis of a homogeneous subspace inside one degree frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSlice {
    frame: SliceFrame,
    basis: Echelon,
}

impl DegreeSlice {
    pub fn from_rows<I>(frame: SliceFrame, rows: I, budget: &Budget) -> Result<DegreeSlice>
    where
        I: IntoIterator<Item = SparseVec>,
    {
        let basis = Echelon::from_rows(frame.ncols(), rows, budget)?;
        Ok(DegreeSlice { frame, basis })
    }

    /// The whole coordinate space of the frame.
    pub fn full(frame: SliceFrame) -> DegreeSlice {
        let basis = Echelon::identity(frame.ncols());
        DegreeSlice { frame, basis }
    }

    pub fn zero(frame: SliceFrame) -> DegreeSlice {
        let basis = Echelon::new(frame.ncols());
        DegreeSlice { frame, basis }
    }

    pub fn frame(&self) -> &SliceFrame {
        &self.frame
    }

    pub fn basis(&self) -> &Echelon {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn ncols(&self) -> u32 {
        self.frame.ncols()
    }

    pub fn contains_vec(&self, v: &SparseVec, budget: &Budget) -> Result<bool> {
        self.basis.contains(v, budget)
    }

    pub fn contains_slice(&self, other: &DegreeSlice, budget: &Budget) -> Result<bool> {
        if !self.frame.compatible(&other.frame) {
            return Err(Error::RingMismatch("slice frames differ".into()));
        }
        self.basis.contains_space(&other.basis, budget)
    }

    /// Lift the basis rows back to polynomials (monomial frames only).
    pub fn basis_polys(&self) -> Result<Vec<Polynomial>> {
        let frame = self.frame.frame().ok_or_else(|| {
            Error::InvalidInput("slice has anonymous coordinates, no polynomial lift".into())
        })?;
        Ok(self.basis.rows().iter().map(|r| frame.lift(r)).collect())
    }
}

/// Graded space whose degree slices can be materialized.
#[derive(Debug, Clone)]
pub enum Space {
    /// Homogeneous ideal in the polynomial ring, in full monomial coordinates.
    Ideal(Ideal),
    /// Graded quotient ring, in standard monomial coordinates.
    Quotient(QuotientRing),
    /// Image of the ideal spanned by `gens` inside the quotient ring, in
    /// standard monomial coordinates.
    Image {
        ring: QuotientRing,
        gens: Vec<Polynomial>,
    },
}

/// Degree-`n` slice of a graded space as a canonical subspace basis.
///
/// Generators must be homogeneous. For an ideal the slice is the span of
/// `g * m` over monomials `m` of complementary degree; inside a quotient the
/// spanning products are first reduced to normal form.
pub fn degree_slice(space: &Space, n: u64, budget: &Budget) -> Result<DegreeSlice> {
    match space {
        Space::Ideal(ideal) => {
            let frame = Frame::full(ideal.ring(), n);
            let rows = ideal_rows(ideal.gens(), &frame, n, None, budget)?;
            DegreeSlice::from_rows(SliceFrame::Monomials(frame), rows, budget)
        }
        Space::Quotient(q) => Ok(DegreeSlice::full(SliceFrame::Monomials(q.frame(n)))),
        Space::Image { ring, gens } => {
            let frame = ring.frame(n);
            let rows = ideal_rows(gens, &frame, n, Some(ring), budget)?;
            DegreeSlice::from_rows(SliceFrame::Monomials(frame), rows, budget)
        }
    }
}

fn ideal_rows(
    gens: &[Polynomial],
    frame: &Arc<Frame>,
    n: u64,
    quotient: Option<&QuotientRing>,
    budget: &Budget,
) -> Result<Vec<SparseVec>> {
    let ring = frame.ring();
    let mut rows = Vec::new();
    for g in gens {
        if g.is_zero() {
            continue;
        }
        if !g.is_homogeneous() {
            return Err(Error::NotHomogeneous(format!(
                "generator `{g}` mixes degrees"
            )));
        }
        let d = g.degree().expect("nonzero generator");
        if d > n {
            continue;
        }
        for m in ring.monomials_of_degree(n - d) {
            budget.check_deadline()?;
            let prod = g.mul_term(&m, &Rational::one());
            let reduced = match quotient {
                Some(q) => q.normal_form(&prod, budget)?,
                None => prod,
            };
            if reduced.is_zero() {
                continue;
            }
            rows.push(frame.coords(&reduced)?);
        }
    }
    Ok(rows)
}

/// Intersection of slices over one frame; canonical and independent of order.
pub fn intersect_slices(slices: &[&DegreeSlice], budget: &Budget) -> Result<DegreeSlice> {
    let first = *slices
        .first()
        .ok_or_else(|| Error::InvalidInput("intersection of an empty list of slices".into()))?;
    for s in &slices[1..] {
        if !first.frame.compatible(&s.frame) {
            return Err(Error::RingMismatch("slice frames differ".into()));
        }
    }
    let mut acc = first.basis.clone();
    for s in &slices[1..] {
        acc = intersect_echelons(&acc, &s.basis, budget)?;
    }
    Ok(DegreeSlice {
        frame: first.frame.clone(),
        basis: acc,
    })
}

/// Sum of slices over one frame; canonical and independent of order.
pub fn sum_slices(slices: &[&DegreeSlice], budget: &Budget) -> Result<DegreeSlice> {
    let first = *slices
        .first()
        .ok_or_else(|| Error::InvalidInput("sum of an empty list of slices".into()))?;
    let mut acc = first.basis.clone();
    for s in &slices[1..] {
        if !first.frame.compatible(&s.frame) {
            return Err(Error::RingMismatch("slice frames differ".into()));
        }
        for row in s.basis.rows() {
            acc.insert(row.clone(), budget)?;
        }
    }
    Ok(DegreeSlice {
        frame: first.frame.clone(),
        basis: acc,
    })
}

/// Intersection of two row spaces by block elimination: echelonize
/// `[A | A; B | 0]`; rows whose left half vanished have right halves spanning
/// the intersection.
pub fn intersect_echelons(a: &Echelon, b: &Echelon, budget: &Budget) -> Result<Echelon> {
    assert_eq!(a.ncols(), b.ncols(), "column count mismatch");
    let n = a.ncols();
    let mut wide = Echelon::new(2 * n);
    for row in a.rows() {
        let mut doubled = row.clone();
        doubled.axpy(&Rational::one(), &row.shifted(n as i64));
        wide.insert(doubled, budget)?;
    }
    for row in b.rows() {
        wide.insert(row.clone(), budget)?;
    }
    let mut out = Echelon::new(n);
    for row in wide.rows() {
        if let Some(&(lead, _)) = row.leading() {
            if lead >= n {
                out.insert(row.shifted(-(n as i64)), budget)?;
            }
        }
    }
    Ok(out)
}

/// Linear map between coordinate spaces in row convention: row `i` is the
/// image of the `i`-th basis vector, a coordinate vector of length `ncols`.
#[derive(Debug, Clone)]
pub struct LinearMap {
    ncols: u32,
    rows: Vec<SparseVec>,
}

impl LinearMap {
    pub fn zero_map(nrows: usize, ncols: u32) -> LinearMap {
        LinearMap {
            ncols,
            rows: vec![SparseVec::zero(); nrows],
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> u32 {
        self.ncols
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn rank(&self, budget: &Budget) -> Result<usize> {
        rank(self.ncols, &self.rows, budget)
    }

    /// Image of a coordinate row vector under the map.
    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::zero();
        for (i, c) in v.iter() {
            out.axpy(c, &self.rows[*i as usize]);
        }
        out
    }
}

/// Left-kernel basis of a map in row convention: rows `x` with `x * M = 0`,
/// found by echelonizing `[M | I]` and collecting rows whose `M` block died.
pub fn left_kernel(map: &LinearMap, budget: &Budget) -> Result<Vec<SparseVec>> {
    let n = map.ncols();
    let mut wide = Echelon::new(n + map.nrows() as u32);
    for (i, row) in map.rows().iter().enumerate() {
        let mut aug = row.clone();
        aug.axpy(
            &Rational::one(),
            &SparseVec::from_pairs(vec![(n + i as u32, Rational::one())]),
        );
        wide.insert(aug, budget)?;
    }
    let mut out = Vec::new();
    for row in wide.rows() {
        if let Some(&(lead, _)) = row.leading() {
            if lead >= n {
                out.push(row.shifted(-(n as i64)));
            }
        }
    }
    Ok(out)
}

/// One summand of a complex position: the intersection of the subobjects
/// indexed by `subset` (empty subset: the ambient piece).
#[derive(Debug, Clone)]
pub struct ComplexSummand {
    pub subset: Vec<usize>,
    pub slice: DegreeSlice,
}

/// Chain complex of an ambient graded piece against `r` subobjects.
///
/// Position `p` is the direct sum over size-`p` subsets `S` (ascending
/// lexicographic order) of the intersection over `S`. The differential sends
/// the summand of `S` to the summand of `S` minus its `k`-th smallest element
/// with sign `(-1)^(k+1)`, realized by the canonical inclusion of subspaces.
pub struct GradedComplex {
    terms: Vec<Vec<ComplexSummand>>,
    diffs: Vec<LinearMap>,
}

impl std::fmt::Debug for GradedComplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let dims: Vec<usize> = (0..self.positions()).map(|p| self.term_dim(p)).collect();
        f.debug_struct("GradedComplex").field("dims", &dims).finish()
    }
}

/// Size-`p` subsets of `{0, .., r-1}` in ascending lexicographic order.
pub fn subsets_of_size(r: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(p);
    fn go(start: usize, r: usize, left: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(current.clone());
            return;
        }
        for i in start..r {
            if r - i < left {
                break;
            }
            current.push(i);
            go(i + 1, r, left - 1, current, out);
            current.pop();
        }
    }
    go(0, r, p, &mut current, &mut out);
    out
}

/// Build the intersection complex of `ambient` against `subs`.
///
/// Fails with a containment violation when some subobject is not inside the
/// ambient piece. The identity `d compose d = 0` is asserted on the assembled
/// matrices.
pub fn build_intersection_complex(
    ambient: &DegreeSlice,
    subs: &[&DegreeSlice],
    budget: &Budget,
) -> Result<GradedComplex> {
    let r = subs.len();
    for (i, s) in subs.iter().enumerate() {
        if !ambient.frame.compatible(&s.frame) {
            return Err(Error::RingMismatch(format!(
                "subobject {} lives in a different frame",
                i + 1
            )));
        }
        if !ambient.contains_slice(s, budget)? {
            return Err(Error::Containment(format!(
                "subobject {} is not contained in the ambient piece",
                i + 1
            )));
        }
    }

    // Intersections for every subset, memoized by bitmask.
    let mut inter: Vec<Option<Echelon>> = vec![None; 1 << r];
    inter[0] = Some(ambient.basis.clone());
    for mask in 1usize..(1 << r) {
        let top = (usize::BITS - 1 - mask.leading_zeros()) as usize;
        let rest = mask & !(1 << top);
        let basis = if rest == 0 {
            subs[top].basis.clone()
        } else {
            let prev = inter[rest].as_ref().expect("computed in mask order");
            intersect_echelons(prev, &subs[top].basis, budget)?
        };
        inter[mask] = Some(basis);
    }
    let slice_of = |mask: usize| DegreeSlice {
        frame: ambient.frame.clone(),
        basis: inter[mask].as_ref().expect("memoized").clone(),
    };

    let mut terms: Vec<Vec<ComplexSummand>> = Vec::with_capacity(r + 1);
    for p in 0..=r {
        let summands = subsets_of_size(r, p)
            .into_iter()
            .map(|subset| {
                let mask = subset.iter().fold(0usize, |m, &i| m | (1 << i));
                ComplexSummand {
                    subset,
                    slice: slice_of(mask),
                }
            })
            .collect();
        terms.push(summands);
    }

    // Differentials d_p: position p to position p-1, for p = 1..=r.
    let mut diffs = Vec::with_capacity(r);
    for p in 1..=r {
        let target = &terms[p - 1];
        let mut target_offset = HashMap::new();
        let mut offset = 0u32;
        for (t_idx, summand) in target.iter().enumerate() {
            target_offset.insert(summand.subset.clone(), (t_idx, offset));
            offset += summand.slice.dim() as u32;
        }
        let target_dim = offset;
        let mut rows = Vec::new();
        for summand in &terms[p] {
            let source = &summand.slice;
            for v in source.basis.rows() {
                let mut image = SparseVec::zero();
                for k in 0..summand.subset.len() {
                    let mut dropped = summand.subset.clone();
                    dropped.remove(k);
                    let &(t_idx, off) = target_offset.get(&dropped).expect("subset present");
                    let coords = target[t_idx]
                        .slice
                        .basis
                        .express(v, budget)?
                        .expect("inclusion of intersections");
                    let sign = if k % 2 == 0 {
                        Rational::one()
                    } else {
                        -Rational::one()
                    };
                    image.axpy(&sign, &coords.shifted(off as i64));
                }
                rows.push(image);
            }
        }
        diffs.push(LinearMap {
            ncols: target_dim,
            rows,
        });
    }

    let complex = GradedComplex { terms, diffs };
    complex.assert_composition_vanishes();
    Ok(complex)
}

impl GradedComplex {
    /// Number of positions, `r + 1`.
    pub fn positions(&self) -> usize {
        self.terms.len()
    }

    pub fn summands(&self, p: usize) -> &[ComplexSummand] {
        &self.terms[p]
    }

    /// Dimension of the position-`p` term.
    pub fn term_dim(&self, p: usize) -> usize {
        self.terms[p].iter().map(|s| s.slice.dim()).sum()
    }

    /// Differential out of position `p` (`1 <= p <= r`).
    pub fn differential(&self, p: usize) -> Option<&LinearMap> {
        if p == 0 {
            None
        } else {
            self.diffs.get(p - 1)
        }
    }

    fn assert_composition_vanishes(&self) {
        for p in 2..self.positions() {
            let upper = &self.diffs[p - 1];
            let lower = &self.diffs[p - 2];
            for row in upper.rows() {
                let composed = lower.apply(row);
                assert!(
                    composed.is_zero(),
                    "differential composition failed to vanish at position {p}"
                );
            }
        }
    }

    /// Homology dimensions `[dim H_0, .., dim H_r]` by exact rank counting.
    pub fn homology_dims(&self, budget: &Budget) -> Result<Vec<usize>> {
        let r = self.positions() - 1;
        let mut ranks = vec![0usize; r + 2];
        for p in 1..=r {
            ranks[p] = self.diffs[p - 1].rank(budget)?;
        }
        let mut dims = Vec::with_capacity(r + 1);
        for p in 0..=r {
            let term = self.term_dim(p) as i64;
            let h = term - ranks[p] as i64 - ranks[p + 1] as i64;
            assert!(h >= 0, "negative homology dimension at position {p}");
            dims.push(h as usize);
        }
        Ok(dims)
    }

    /// A representative cycle of nonzero homology at position `p >= 1`: a
    /// kernel vector of the outgoing differential that is not in the image of
    /// the incoming one. `None` when the homology vanishes there.
    pub fn witness_cycle(&self, p: usize, budget: &Budget) -> Result<Option<SparseVec>> {
        if p == 0 || p >= self.positions() {
            return Ok(None);
        }
        let kernel = left_kernel(&self.diffs[p - 1], budget)?;
        let image = if p < self.positions() - 1 {
            Echelon::from_rows(
                self.term_dim(p) as u32,
                self.diffs[p].rows().iter().cloned(),
                budget,
            )?
        } else {
            Echelon::new(self.term_dim(p) as u32)
        };
        for k in kernel {
            if !image.contains(&k, budget)? {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }

    /// Human-readable decomposition of a position-`p` chain: one line per
    /// summand with a nonzero component, as a lifted polynomial when the
    /// frame carries monomials and as a coordinate tuple otherwise.
    pub fn describe_chain(&self, p: usize, v: &SparseVec) -> Vec<String> {
        let mut lines = Vec::new();
        let mut offset = 0u32;
        for summand in &self.terms[p] {
            let dim = summand.slice.dim() as u32;
            let mut element = SparseVec::zero();
            for (col, c) in v.iter() {
                if *col >= offset && *col < offset + dim {
                    element.axpy(c, &summand.slice.basis().rows()[(*col - offset) as usize]);
                }
            }
            if !element.is_zero() {
                let label: Vec<String> = summand.subset.iter().map(|i| (i + 1).to_string()).collect();
                let rendered = match summand.slice.frame() {
                    SliceFrame::Monomials(frame) => frame.lift(&element).to_string(),
                    SliceFrame::Anonymous { ncols } => {
                        let mut dense = vec!["0".to_string(); *ncols as usize];
                        for (col, c) in element.iter() {
                            dense[*col as usize] = crate::polycore::fmt_rat(c);
                        }
                        format!("({})", dense.join(", "))
                    }
                };
                lines.push(format!("{{{}}}: {}", label.join(","), rendered));
            }
            offset += dim;
        }
        lines
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::rat;

    fn anon(ncols: u32) -> SliceFrame {
        SliceFrame::Anonymous { ncols }
    }

    fn slice(ncols: u32, rows: &[&[i64]]) -> DegreeSlice {
        DegreeSlice::from_rows(
            anon(ncols),
            rows.iter().map(|r| SparseVec::from_ints(r)),
            &Budget::unlimited(),
        )
        .unwrap()
    }

    #[test]
    fn echelon_is_canonical_under_row_order() {
        let b = Budget::unlimited();
        let rows = vec![
            SparseVec::from_ints(&[1, 2, 3]),
            SparseVec::from_ints(&[0, 1, 1]),
            SparseVec::from_ints(&[1, 3, 4]),
        ];
        let e1 = Echelon::from_rows(3, rows.iter().cloned(), &b).unwrap();
        let e2 = Echelon::from_rows(3, rows.iter().rev().cloned(), &b).unwrap();
        assert_eq!(e1, e2);
        assert_eq!(e1.dim(), 2);
    }

    #[test]
    fn reduce_detects_membership() {
        let b = Budget::unlimited();
        let e = Echelon::from_rows(
            3,
            vec![SparseVec::from_ints(&[1, 0, 1]), SparseVec::from_ints(&[0, 1, 1])],
            &b,
        )
        .unwrap();
        assert!(e.contains(&SparseVec::from_ints(&[2, 3, 5]), &b).unwrap());
        assert!(!e.contains(&SparseVec::from_ints(&[0, 0, 1]), &b).unwrap());
        let coords = e
            .express(&SparseVec::from_ints(&[2, 3, 5]), &b)
            .unwrap()
            .unwrap();
        assert_eq!(coords, SparseVec::from_ints(&[2, 3]));
    }

    #[test]
    fn intersection_and_sum_of_planes() {
        let b = Budget::unlimited();
        let xy = slice(3, &[&[1, 0, 0], &[0, 1, 0]]);
        let yz = slice(3, &[&[0, 1, 0], &[0, 0, 1]]);
        let meet = intersect_slices(&[&xy, &yz], &b).unwrap();
        assert_eq!(meet.dim(), 1);
        assert!(meet
            .contains_vec(&SparseVec::from_ints(&[0, 1, 0]), &b)
            .unwrap());
        let join = sum_slices(&[&xy, &yz], &b).unwrap();
        assert_eq!(join.dim(), 3);
        let other_way = intersect_slices(&[&yz, &xy], &b).unwrap();
        assert_eq!(meet, other_way);
    }

    #[test]
    fn ranks_agree_between_pivoting_orders() {
        let rows = vec![
            SparseVec::from_ints(&[2, 4, 0, 1]),
            SparseVec::from_ints(&[1, 2, 0, 0]),
            SparseVec::from_ints(&[0, 0, 0, 1]),
            SparseVec::from_ints(&[3, 6, 0, 2]),
        ];
        let b = Budget::unlimited();
        assert_eq!(rank(4, &rows, &b).unwrap(), 2);
        assert_eq!(rank_fraction_free(4, &rows), 2);
    }

    #[test]
    fn two_subspace_complex_is_exact_in_the_middle() {
        let b = Budget::unlimited();
        let ambient = DegreeSlice::full(anon(2));
        let l1 = slice(2, &[&[1, 0]]);
        let l2 = slice(2, &[&[1, 1]]);
        let cx = build_intersection_complex(&ambient, &[&l1, &l2], &b).unwrap();
        assert_eq!(cx.homology_dims(&b).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn three_distinct_lines_have_middle_homology() {
        let b = Budget::unlimited();
        let ambient = DegreeSlice::full(anon(2));
        let l1 = slice(2, &[&[1, 0]]);
        let l2 = slice(2, &[&[0, 1]]);
        let l3 = slice(2, &[&[1, 1]]);
        let cx = build_intersection_complex(&ambient, &[&l1, &l2, &l3], &b).unwrap();
        assert_eq!(cx.term_dim(0), 2);
        assert_eq!(cx.term_dim(1), 3);
        assert_eq!(cx.term_dim(2), 0);
        let dims = cx.homology_dims(&b).unwrap();
        assert_eq!(dims, vec![0, 1, 0, 0]);
        let euler_terms: i64 = (0..cx.positions())
            .map(|p| (if p % 2 == 0 { 1 } else { -1 }) * cx.term_dim(p) as i64)
            .sum();
        let euler_homology: i64 = dims
            .iter()
            .enumerate()
            .map(|(p, &d)| (if p % 2 == 0 { 1 } else { -1 }) * d as i64)
            .sum();
        assert_eq!(euler_terms, euler_homology);
    }

    #[test]
    fn containment_violation_is_reported() {
        let b = Budget::unlimited();
        let ambient = slice(3, &[&[1, 0, 0], &[0, 1, 0]]);
        let outside = slice(3, &[&[0, 0, 1]]);
        let err = build_intersection_complex(&ambient, &[&outside], &b).unwrap_err();
        assert!(matches!(err, Error::Containment(_)), "{err}");
    }

    #[test]
    fn zero_ambient_complex_is_trivial() {
        let b = Budget::unlimited();
        let ambient = DegreeSlice::zero(anon(4));
        let sub = DegreeSlice::zero(anon(4));
        let cx = build_intersection_complex(&ambient, &[&sub, &sub], &b).unwrap();
        assert_eq!(cx.homology_dims(&b).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn rational_entries_reduce_exactly() {
        let b = Budget::unlimited();
        let mut e = Echelon::new(2);
        e.insert(
            SparseVec::from_pairs(vec![(0, rat(1) / rat(3)), (1, rat(1))]),
            &b,
        )
        .unwrap();
        let reduced = e
            .reduce(&SparseVec::from_pairs(vec![(0, rat(1)), (1, rat(3))]), &b)
            .unwrap();
        assert!(reduced.is_zero());
    }

    #[test]
    fn subset_enumeration_is_lexicographic() {
        assert_eq!(
            subsets_of_size(3, 2),
            vec![vec![0, 1], vec![0, 2], vec![1, 2]]
        );
        assert_eq!(subsets_of_size(3, 0), vec![Vec::<usize>::new()]);
    }
}
