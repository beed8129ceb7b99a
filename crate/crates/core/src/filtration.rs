//! Graded quotient rings with cached normal forms, families of principal
//! filtrations cut by homogeneous elements, the multi-index intersection
//! pieces J(m), and the windowed order function ord_alpha.
//!
//! The effective exponent of an index entry is max(entry, 0): negative
//! indices give the whole ring, matching the extended grading convention.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_traits::One;

use crate::budget::Budget;
use crate::gradedla::{degree_slice, intersect_slices, rank, DegreeSlice, Frame, Space, SparseVec};
use crate::groebner::{buchberger, standard_monomials, GroebnerBasis, Ideal};
use crate::polycore::{same_ring, fmt_rat, PolyRing, Polynomial, Rational, TermOrder, WeightVector};
use crate::{Error, Result};

/// Multi-index over the r filtrations; negative entries truncate to zero.
pub type MultiIndex = Vec<i64>;

/// Effective exponent vector: entries clamped below at zero.
pub fn truncate_index(m: &[i64]) -> Vec<u64> {
    m.iter().map(|&e| e.max(0) as u64).collect()
}

#[derive(Debug)]
struct QuotientInner {
    ring: Arc<PolyRing>,
    relations: Ideal,
    order: TermOrder,
    gb: GroebnerBasis,
    frames: RwLock<HashMap<u64, Arc<Frame>>>,
}

/// Graded quotient of a polynomial ring by a homogeneous ideal, with normal
/// forms as canonical representatives and cached standard monomial frames.
#[derive(Debug, Clone)]
pub struct QuotientRing {
    inner: Arc<QuotientInner>,
}

impl QuotientRing {
    /// Present a quotient by homogeneous relations under the given order.
    pub fn new(relations: Ideal, order: TermOrder, budget: &Budget) -> Result<QuotientRing> {
        if !relations.is_homogeneous() {
            return Err(Error::NotHomogeneous(
                "quotient relations must be homogeneous".into(),
            ));
        }
        let gb = buchberger(&relations, &order, budget)?;
        Ok(QuotientRing {
            inner: Arc::new(QuotientInner {
                ring: Arc::clone(relations.ring()),
                relations,
                order,
                gb,
                frames: RwLock::new(HashMap::new()),
            }),
        })
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.inner.ring
    }

    pub fn relations(&self) -> &Ideal {
        &self.inner.relations
    }

    pub fn order(&self) -> &TermOrder {
        &self.inner.order
    }

    pub fn groebner_basis(&self) -> &GroebnerBasis {
        &self.inner.gb
    }

    /// Canonical representative: the fully reduced normal form.
    pub fn normal_form(&self, f: &Polynomial, budget: &Budget) -> Result<Polynomial> {
        self.inner.gb.normal_form(f, budget)
    }

    /// Standard monomial frame of one degree, cached.
    pub fn frame(&self, n: u64) -> Arc<Frame> {
        if let Some(hit) = self.inner.frames.read().expect("frame lock").get(&n) {
            return Arc::clone(hit);
        }
        let monomials = standard_monomials(&self.inner.gb, n);
        let frame = Frame::from_monomials(&self.inner.ring, n, monomials);
        let mut cache = self.inner.frames.write().expect("frame lock");
        Arc::clone(cache.entry(n).or_insert(frame))
    }

    /// Dimension of the degree-`n` piece.
    pub fn dim(&self, n: u64) -> usize {
        self.frame(n).len()
    }

    /// Frame coordinates of the normal form of a homogeneous element.
    pub fn coords(&self, f: &Polynomial, n: u64, budget: &Budget) -> Result<SparseVec> {
        let nf = self.normal_form(f, budget)?;
        self.frame(n).coords(&nf)
    }

    /// Two elements are equal in the quotient iff their normal forms agree.
    pub fn eq_mod(&self, f: &Polynomial, g: &Polynomial, budget: &Budget) -> Result<bool> {
        Ok(self.normal_form(f, budget)? == self.normal_form(g, budget)?)
    }
}

/// Window-bounded order of an element: the best pairing value over the
/// membership staircase, its lexicographically smallest attaining index, and
/// whether any attaining index touched the window boundary. A clear flag
/// certifies the value exactly; a set flag downgrades it to a lower bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrdValue {
    pub value: Rational,
    pub attained_at: Vec<u64>,
    pub boundary: bool,
}

impl std::fmt::Display for OrdValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} at ({}){}",
            fmt_rat(&self.value),
            self.attained_at
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(","),
            if self.boundary { " [window boundary]" } else { "" }
        )
    }
}

struct FamilyInner {
    quotient: QuotientRing,
    cutters: Vec<Polynomial>,
    warnings: Vec<String>,
    pieces: RwLock<HashMap<(Vec<u64>, u64), Arc<DegreeSlice>>>,
}

/// Family of r principal filtrations on a quotient ring, one per cutter:
/// the i-th filtration at level e is the image of the ideal (g_i^e).
#[derive(Clone)]
pub struct FiltrationFamily {
    inner: Arc<FamilyInner>,
}

impl std::fmt::Debug for FiltrationFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiltrationFamily")
            .field("rank", &self.rank())
            .finish_non_exhaustive()
    }
}

impl FiltrationFamily {
    /// Validate cutters: homogeneous of positive degree, nonzero in the
    /// quotient. Cutters that are zero divisors are allowed but produce a
    /// low-degree diagnostic warning, since the divisorial reading fails.
    pub fn new(
        quotient: QuotientRing,
        cutters: Vec<Polynomial>,
        budget: &Budget,
    ) -> Result<FiltrationFamily> {
        if cutters.is_empty() {
            return Err(Error::InvalidInput(
                "a filtration family needs at least one cutter".into(),
            ));
        }
        for (i, g) in cutters.iter().enumerate() {
            if !same_ring(g.ring(), quotient.ring()) {
                return Err(Error::RingMismatch(format!(
                    "cutter {} lives in a different ring",
                    i + 1
                )));
            }
            if !g.is_homogeneous() {
                return Err(Error::NotHomogeneous(format!(
                    "cutter {} (`{g}`) mixes degrees",
                    i + 1
                )));
            }
            match g.degree() {
                None => {
                    return Err(Error::InvalidInput(format!("cutter {} is zero", i + 1)));
                }
                Some(0) => {
                    return Err(Error::InvalidInput(format!(
                        "cutter {} (`{g}`) is a unit, filtrations need positive degree",
                        i + 1
                    )));
                }
                Some(_) => {}
            }
            if quotient.normal_form(g, budget)?.is_zero() {
                return Err(Error::ZeroElement(format!(
                    "cutter {} (`{g}`) vanishes in the quotient",
                    i + 1
                )));
            }
        }
        let warnings = zero_divisor_diagnostics(&quotient, &cutters, budget)?;
        Ok(FiltrationFamily {
            inner: Arc::new(FamilyInner {
                quotient,
                cutters,
                warnings,
                pieces: RwLock::new(HashMap::new()),
            }),
        })
    }

    pub fn quotient(&self) -> &QuotientRing {
        &self.inner.quotient
    }

    pub fn cutters(&self) -> &[Polynomial] {
        &self.inner.cutters
    }

    /// Number of filtrations.
    pub fn rank(&self) -> usize {
        self.inner.cutters.len()
    }

    pub fn warnings(&self) -> &[String] {
        &self.inner.warnings
    }

    /// Descriptor of the i-th filtration at level `m` (1-based index):
    /// the whole ring for m <= 0, the image of (g_i^m) for m > 0.
    pub fn filtration_piece(&self, i: usize, m: i64) -> Result<Space> {
        if i == 0 || i > self.rank() {
            return Err(Error::InvalidInput(format!(
                "filtration index {i} out of range 1..={}",
                self.rank()
            )));
        }
        if m <= 0 {
            return Ok(Space::Quotient(self.inner.quotient.clone()));
        }
        let g = &self.inner.cutters[i - 1];
        Ok(Space::Image {
            ring: self.inner.quotient.clone(),
            gens: vec![g.pow(m as u32)],
        })
    }

    /// Degree-`n` slice of J(m) = intersection of the filtration pieces at
    /// the truncated exponents. Cached per (truncated m, n); safe for
    /// concurrent fills.
    pub fn multi_piece(&self, m: &[i64], n: u64, budget: &Budget) -> Result<Arc<DegreeSlice>> {
        if m.len() != self.rank() {
            return Err(Error::DimensionMismatch(format!(
                "multi-index has {} entries, family has {}",
                m.len(),
                self.rank()
            )));
        }
        self.piece_clamped(&truncate_index(m), n, budget)
    }

    fn piece_clamped(&self, e: &[u64], n: u64, budget: &Budget) -> Result<Arc<DegreeSlice>> {
        let key = (e.to_vec(), n);
        if let Some(hit) = self.inner.pieces.read().expect("piece lock").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let support: Vec<usize> = (0..e.len()).filter(|&i| e[i] > 0).collect();
        let slice = match support.len() {
            0 => degree_slice(&Space::Quotient(self.inner.quotient.clone()), n, budget)?,
            1 => {
                let i = support[0];
                let space = self.filtration_piece(i + 1, e[i] as i64)?;
                degree_slice(&space, n, budget)?
            }
            _ => {
                let last = *support.last().expect("nonempty support");
                let mut rest = e.to_vec();
                rest[last] = 0;
                let mut single = vec![0u64; e.len()];
                single[last] = e[last];
                let left = self.piece_clamped(&rest, n, budget)?;
                let right = self.piece_clamped(&single, n, budget)?;
                intersect_slices(&[&left, &right], budget)?
            }
        };
        let mut cache = self.inner.pieces.write().expect("piece lock");
        Ok(Arc::clone(cache.entry(key).or_insert_with(|| Arc::new(slice))))
    }

    /// Window-bounded order of a homogeneous element under the pairing with
    /// strictly positive weights: the maximum of ⟨alpha, m⟩ over in-window
    /// indices m with f ∈ J(m) at the element's degree.
    pub fn ord_alpha(
        &self,
        f: &Polynomial,
        alpha: &WeightVector,
        bounds: &[u64],
        budget: &Budget,
    ) -> Result<OrdValue> {
        let r = self.rank();
        if alpha.len() != r || bounds.len() != r {
            return Err(Error::DimensionMismatch(format!(
                "alpha and window must have {r} entries"
            )));
        }
        if !alpha.is_strictly_positive() {
            return Err(Error::InvalidInput(
                "ord_alpha needs strictly positive weights".into(),
            ));
        }
        let nf = self.inner.quotient.normal_form(f, budget)?;
        if nf.is_zero() {
            return Err(Error::ZeroElement(
                "the zero class has no finite order".into(),
            ));
        }
        if !nf.is_homogeneous() {
            return Err(Error::NotHomogeneous(
                "ord_alpha is defined for homogeneous elements".into(),
            ));
        }
        let n = nf.degree().expect("nonzero normal form");
        let coords = self.inner.quotient.frame(n).coords(&nf)?;
        let mut best: Option<OrdValue> = None;
        let mut boundary_hit = false;
        let mut index = vec![0u64; r];
        loop {
            let piece = self.piece_clamped(&index, n, budget)?;
            if piece.contains_vec(&coords, budget)? {
                let on_boundary = index.iter().zip(bounds).any(|(&e, &b)| e == b);
                let value = alpha.pairing_unsigned(&index);
                if on_boundary {
                    boundary_hit = true;
                }
                let better = match &best {
                    None => true,
                    Some(cur) => value > cur.value,
                };
                if better {
                    best = Some(OrdValue {
                        value,
                        attained_at: index.clone(),
                        boundary: false,
                    });
                }
            }
            if !advance(&mut index, bounds) {
                break;
            }
        }
        let mut out = best.expect("the zero index is always a member");
        out.boundary = boundary_hit;
        Ok(out)
    }
}

/// Lexicographic successor within the box [0, bounds]; false at the end.
fn advance(index: &mut [u64], bounds: &[u64]) -> bool {
    for i in (0..index.len()).rev() {
        if index[i] < bounds[i] {
            index[i] += 1;
            for entry in index.iter_mut().skip(i + 1) {
                *entry = 0;
            }
            return true;
        }
    }
    false
}

/// Low-degree windowed zero-divisor scan: report cutters whose
/// multiplication map drops rank in some small degree.
fn zero_divisor_diagnostics(
    quotient: &QuotientRing,
    cutters: &[Polynomial],
    budget: &Budget,
) -> Result<Vec<String>> {
    const DIAGNOSTIC_DEGREE: u64 = 3;
    let mut warnings = Vec::new();
    for (i, g) in cutters.iter().enumerate() {
        let d = g.degree().expect("validated cutter");
        for n in 0..=DIAGNOSTIC_DEGREE {
            let source = quotient.frame(n);
            if source.is_empty() {
                continue;
            }
            let mut rows = Vec::with_capacity(source.len());
            for k in 0..source.len() as u32 {
                let mon = Polynomial::term(
                    quotient.ring(),
                    source.monomial(k).clone(),
                    Rational::one(),
                )?;
                let image = quotient.normal_form(&(&mon * g), budget)?;
                rows.push(quotient.frame(n + d).coords(&image)?);
            }
            let image_rank = rank(quotient.frame(n + d).len() as u32, &rows, budget)?;
            if image_rank < source.len() {
                warnings.push(format!(
                    "cutter {} (`{g}`) is a zero divisor: multiplication drops rank in degree {n}",
                    i + 1
                ));
                break;
            }
        }
    }
    Ok(warnings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{parse_polynomial, rat, PolyRing};
    use crate::gradedla::sum_slices;

    fn budget() -> Budget {
        Budget::unlimited()
    }

    fn quotient(ring: &Arc<PolyRing>, relations: &[&str]) -> QuotientRing {
        let gens = relations
            .iter()
            .map(|s| parse_polynomial(ring, s).unwrap())
            .collect();
        let ideal = Ideal::new(ring, gens).unwrap();
        QuotientRing::new(ideal, TermOrder::GrevLex, &budget()).unwrap()
    }

    fn example_family() -> FiltrationFamily {
        let ring = PolyRing::new(&["u", "v", "w", "x", "y", "z"]).unwrap();
        let q = quotient(&ring, &["u^3 - v^3 + u*w^2 + v*w^2 + x^3 + y^3 + y*z^2"]);
        let cutters = vec![
            parse_polynomial(&ring, "u").unwrap(),
            parse_polynomial(&ring, "v").unwrap(),
        ];
        FiltrationFamily::new(q, cutters, &budget()).unwrap()
    }

    #[test]
    fn plane_family_piece_dimensions_count_monomials() {
        let ring = PolyRing::new(&["x", "y"]).unwrap();
        let q = quotient(&ring, &[]);
        let cutters = vec![
            parse_polynomial(&ring, "x").unwrap(),
            parse_polynomial(&ring, "y").unwrap(),
        ];
        let fam = FiltrationFamily::new(q, cutters, &budget()).unwrap();
        for n in 0u64..=5 {
            for m1 in 0i64..=3 {
                for m2 in 0i64..=3 {
                    let expected = (n as i64 - m1 - m2 + 1).max(0) as usize;
                    let piece = fam.multi_piece(&[m1, m2], n, &budget()).unwrap();
                    assert_eq!(piece.dim(), expected, "n={n} m=({m1},{m2})");
                }
            }
        }
    }

    #[test]
    fn negative_entries_truncate_to_zero() {
        let ring = PolyRing::new(&["x", "y"]).unwrap();
        let q = quotient(&ring, &[]);
        let cutters = vec![
            parse_polynomial(&ring, "x").unwrap(),
            parse_polynomial(&ring, "y").unwrap(),
        ];
        let fam = FiltrationFamily::new(q, cutters, &budget()).unwrap();
        let neg = fam.multi_piece(&[-3, 2], 4, &budget()).unwrap();
        let zero = fam.multi_piece(&[0, 2], 4, &budget()).unwrap();
        assert_eq!(*neg, *zero);
    }

    #[test]
    fn cubic_intersection_piece_and_its_sum_span() {
        // The degree-2 slice of ((u)) ∩ ((v)) in the cubic quotient is the
        // line through u*v; the span of {u*l, v*l : l linear} has dimension
        // 11 and is the sum, not the intersection.
        let fam = example_family();
        let b = budget();
        let inter = fam.multi_piece(&[1, 1], 2, &b).unwrap();
        assert_eq!(inter.dim(), 1);
        let u_piece = fam.multi_piece(&[1, 0], 2, &b).unwrap();
        let v_piece = fam.multi_piece(&[0, 1], 2, &b).unwrap();
        assert_eq!(u_piece.dim(), 6);
        assert_eq!(v_piece.dim(), 6);
        let sum = sum_slices(&[&u_piece, &v_piece], &b).unwrap();
        assert_eq!(sum.dim(), 11);
        let uv = parse_polynomial(fam.quotient().ring(), "u*v").unwrap();
        let coords = fam.quotient().coords(&uv, 2, &b).unwrap();
        assert!(inter.contains_vec(&coords, &b).unwrap());
    }

    #[test]
    fn monotonicity_under_index_growth() {
        let fam = example_family();
        let b = budget();
        for n in 0u64..=4 {
            for m1 in 0i64..=2 {
                for m2 in 0i64..=2 {
                    let big = fam.multi_piece(&[m1 + 1, m2], n, &b).unwrap();
                    let small = fam.multi_piece(&[m1, m2], n, &b).unwrap();
                    assert!(small.contains_slice(&big, &b).unwrap());
                }
            }
        }
    }

    #[test]
    fn ord_alpha_examples_from_the_cubic() {
        let fam = example_family();
        let b = budget();
        let ring = fam.quotient().ring().clone();
        let alpha = WeightVector::from_ints(&[1, 1]).unwrap();
        let u = parse_polynomial(&ring, "u").unwrap();
        let got = fam.ord_alpha(&u, &alpha, &[4, 4], &b).unwrap();
        assert_eq!(got.value, rat(1));
        assert_eq!(got.attained_at, vec![1, 0]);
        assert!(!got.boundary);

        let x = parse_polynomial(&ring, "x").unwrap();
        let got = fam.ord_alpha(&x, &alpha, &[4, 4], &b).unwrap();
        assert_eq!(got.value, rat(0));
        assert_eq!(got.attained_at, vec![0, 0]);
        assert!(!got.boundary);

        let uv = parse_polynomial(&ring, "u*v").unwrap();
        let alpha12 = WeightVector::from_ints(&[1, 2]).unwrap();
        let got = fam.ord_alpha(&uv, &alpha12, &[4, 4], &b).unwrap();
        assert_eq!(got.value, rat(3));
        assert_eq!(got.attained_at, vec![1, 1]);
        assert!(!got.boundary);
    }

    #[test]
    fn ord_alpha_rejects_zero_classes() {
        let fam = example_family();
        let b = budget();
        let ring = fam.quotient().ring().clone();
        let cubic = parse_polynomial(&ring, "u^3 - v^3 + u*w^2 + v*w^2 + x^3 + y^3 + y*z^2").unwrap();
        let alpha = WeightVector::from_ints(&[1, 1]).unwrap();
        let err = fam.ord_alpha(&cubic, &alpha, &[3, 3], &b).unwrap_err();
        assert!(matches!(err, Error::ZeroElement(_)), "{err}");
    }

    #[test]
    fn boundary_flag_reports_window_truncation() {
        let ring = PolyRing::new(&["x", "y"]).unwrap();
        let q = quotient(&ring, &[]);
        let cutters = vec![
            parse_polynomial(&ring, "x").unwrap(),
            parse_polynomial(&ring, "y").unwrap(),
        ];
        let fam = FiltrationFamily::new(q, cutters, &budget()).unwrap();
        let f = parse_polynomial(&ring, "x^3").unwrap();
        let alpha = WeightVector::from_ints(&[1, 1]).unwrap();
        let truncated = fam.ord_alpha(&f, &alpha, &[2, 2], &budget()).unwrap();
        assert_eq!(truncated.value, rat(2));
        assert!(truncated.boundary);
        let exact = fam.ord_alpha(&f, &alpha, &[5, 5], &budget()).unwrap();
        assert_eq!(exact.value, rat(3));
        assert_eq!(exact.attained_at, vec![3, 0]);
        assert!(!exact.boundary);
    }

    #[test]
    fn zero_divisor_cutter_warns_but_is_allowed() {
        let ring = PolyRing::new(&["x", "y"]).unwrap();
        let q = quotient(&ring, &["x*y"]);
        let cutters = vec![parse_polynomial(&ring, "x").unwrap()];
        let fam = FiltrationFamily::new(q, cutters, &budget()).unwrap();
        assert_eq!(fam.warnings().len(), 1);
        assert!(fam.warnings()[0].contains("zero divisor"), "{}", fam.warnings()[0]);
    }

    #[test]
    fn invalid_cutters_are_rejected() {
        let ring = PolyRing::new(&["x", "y"]).unwrap();
        let q = quotient(&ring, &["x*y"]);
        let unit = parse_polynomial(&ring, "3").unwrap();
        let err = FiltrationFamily::new(q.clone(), vec![unit], &budget()).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)), "{err}");
        let vanishing = parse_polynomial(&ring, "x*y").unwrap();
        let err = FiltrationFamily::new(q.clone(), vec![vanishing], &budget()).unwrap_err();
        assert!(matches!(err, Error::ZeroElement(_)), "{err}");
        let mixed = parse_polynomial(&ring, "x + x*y").unwrap();
        let err = FiltrationFamily::new(q, vec![mixed], &budget()).unwrap_err();
        assert!(matches!(err, Error::NotHomogeneous(_)), "{err}");
    }

    #[test]
    fn quotient_dimensions_of_the_cubic_hypersurface() {
        let fam = example_family();
        let expected = [1usize, 6, 21, 55, 120, 231, 406];
        for (n, &want) in expected.iter().enumerate() {
            assert_eq!(fam.quotient().dim(n as u64), want, "degree {n}");
        }
    }

    #[test]
    fn weighted_quotient_accepts_weighted_relations() {
        let ring = PolyRing::with_grading(&["x", "y", "z"], &[1, 2, 1]).unwrap();
        let q = quotient(&ring, &["x*y + z^3"]);
        assert_eq!(q.dim(0), 1);
        assert_eq!(q.dim(1), 2);
        assert_eq!(q.dim(2), 4);
        assert_eq!(q.dim(3), 5);
    }
}
