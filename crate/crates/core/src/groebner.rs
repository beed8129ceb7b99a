//! Buchberger completion, normal forms by full multivariate division, and
//! initial ideals under weight-refined orders with the minimal-weight leading
//! term convention.
//!
//! Weight-refined orders are only well founded degree by degree, so reduction
//! and completion under them insist on homogeneous input; the classical lex
//! and graded reverse lexicographic orders accept anything.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};


use crate::budget::Budget;
use crate::polycore::{same_ring, Monomial, PolyRing, Polynomial, Rational, TermOrder, WeightVector};
use crate::{Error, Result};

/// Finitely generated ideal: a ring handle and deduplicated nonzero generators.
#[derive(Debug, Clone)]
pub struct Ideal {
    ring: Arc<PolyRing>,
    gens: Vec<Polynomial>,
}

impl Ideal {
    /// Validates that all generators live in `ring`, drops zeros, and removes
    /// literal duplicates.
    pub fn new(ring: &Arc<PolyRing>, gens: Vec<Polynomial>) -> Result<Ideal> {
        let mut kept: Vec<Polynomial> = Vec::new();
        for g in gens {
            if !same_ring(g.ring(), ring) {
                return Err(Error::RingMismatch(
                    "ideal generator lives in a different ring".into(),
                ));
            }
            if g.is_zero() || kept.contains(&g) {
                continue;
            }
            kept.push(g);
        }
        Ok(Ideal {
            ring: Arc::clone(ring),
            gens: kept,
        })
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn gens(&self) -> &[Polynomial] {
        &self.gens
    }

    pub fn is_homogeneous(&self) -> bool {
        self.gens.iter().all(|g| g.is_homogeneous())
    }

    /// Canonical text key: ring variables with their degrees, then the sorted
    /// canonical prints of the generators.
    pub fn canonical_key(&self) -> String {
        let ring_part: Vec<String> = self
            .ring
            .vars()
            .iter()
            .zip(self.ring.degrees())
            .map(|(v, d)| format!("{v}:{d}"))
            .collect();
        let mut gen_part: Vec<String> = self.gens.iter().map(|g| g.to_string()).collect();
        gen_part.sort();
        format!("[{}] {}", ring_part.join(","), gen_part.join("; "))
    }
}

/// Completed basis: monic, pairwise reduced, sorted by ascending degree of
/// the leading monomial, larger leads first within a degree.
#[derive(Debug, Clone)]
pub struct GroebnerBasis {
    ring: Arc<PolyRing>,
    order: TermOrder,
    basis: Vec<Polynomial>,
}

impl GroebnerBasis {
    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn order(&self) -> &TermOrder {
        &self.order
    }

    pub fn basis(&self) -> &[Polynomial] {
        &self.basis
    }

    /// Leading monomials of the basis elements.
    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.basis
            .iter()
            .map(|g| g.lead(&self.order).expect("basis elements are nonzero").0.clone())
            .collect()
    }

    /// Fully reduced remainder of `f` modulo the basis.
    pub fn normal_form(&self, f: &Polynomial, budget: &Budget) -> Result<Polynomial> {
        normal_form(f, &self.basis, &self.order, budget)
    }

    /// Ideal membership: vanishing of the normal form.
    pub fn contains(&self, f: &Polynomial, budget: &Budget) -> Result<bool> {
        Ok(self.normal_form(f, budget)?.is_zero())
    }
}

fn require_reducible_basis(basis: &[Polynomial], order: &TermOrder) -> Result<()> {
    if matches!(order, TermOrder::WeightRefined { .. }) {
        for g in basis {
            if !g.is_homogeneous() {
                return Err(Error::NotHomogeneous(format!(
                    "weight-refined reduction needs homogeneous divisors, `{g}` mixes degrees"
                )));
            }
        }
    }
    Ok(())
}

/// Remainder of `f` under full multivariate division by `basis`: no term of
/// the result is divisible by any leading monomial of the divisors.
pub fn normal_form(
    f: &Polynomial,
    basis: &[Polynomial],
    order: &TermOrder,
    budget: &Budget,
) -> Result<Polynomial> {
    for g in basis {
        if !same_ring(f.ring(), g.ring()) {
            return Err(Error::RingMismatch(
                "divisor lives in a different ring".into(),
            ));
        }
    }
    require_reducible_basis(basis, order)?;
    let divisors: Vec<(&Polynomial, Monomial, Rational)> = basis
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| {
            let (lm, lc) = g.lead(order).expect("nonzero divisor");
            (g, lm.clone(), lc.clone())
        })
        .collect();
    let mut work = f.clone();
    let mut remainder = Polynomial::zero(f.ring());
    while !work.is_zero() {
        budget.check_deadline()?;
        let (lm, lc) = {
            let (m, c) = work.lead(order).expect("nonzero work polynomial");
            (m.clone(), c.clone())
        };
        let hit = divisors
            .iter()
            .find_map(|(g, gm, gc)| lm.checked_div(gm).map(|q| (*g, q, gc)));
        match hit {
            Some((g, q, gc)) => {
                let scale = -(&lc / gc);
                let multiple = g.mul_term(&q, &scale);
                budget.charge_cells(multiple.num_terms() as u64)?;
                work = &work + &multiple;
            }
            None => {
                work.add_term(lm.clone(), -lc.clone());
                remainder.add_term(lm, lc);
            }
        }
    }
    Ok(remainder)
}

fn spoly(f: &Polynomial, g: &Polynomial, order: &TermOrder) -> Polynomial {
    let (fm, fc) = f.lead(order).expect("nonzero");
    let (gm, gc) = g.lead(order).expect("nonzero");
    let lcm = fm.lcm(gm);
    let qf = lcm.checked_div(fm).expect("lcm is divisible");
    let qg = lcm.checked_div(gm).expect("lcm is divisible");
    let left = f.mul_term(&qf, &fc.recip());
    let right = g.mul_term(&qg, &gc.recip());
    &left - &right
}

/// Buchberger completion with the normal selection strategy: pending pairs
/// are processed by minimal total degree of the leading monomial lcm, ties
/// broken by pair index. Pairs with coprime leading monomials are skipped.
/// Returns the reduced basis.
pub fn buchberger(ideal: &Ideal, order: &TermOrder, budget: &Budget) -> Result<GroebnerBasis> {
    if matches!(order, TermOrder::WeightRefined { .. }) && !ideal.is_homogeneous() {
        return Err(Error::NotHomogeneous(
            "weight-refined completion needs a homogeneous ideal".into(),
        ));
    }
    let ring = ideal.ring();
    let mut basis: Vec<Polynomial> = ideal.gens().iter().map(|g| g.monic(order)).collect();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..basis.len() {
        for j in 0..i {
            pairs.push((j, i));
        }
    }
    while !pairs.is_empty() {
        let best = pairs
            .iter()
            .enumerate()
            .min_by_key(|(_, &(i, j))| {
                let (mi, _) = basis[i].lead(order).expect("nonzero basis element");
                let (mj, _) = basis[j].lead(order).expect("nonzero basis element");
                (mi.lcm(mj).total_degree(), (i, j))
            })
            .map(|(idx, _)| idx)
            .expect("nonempty pair queue");
        let (i, j) = pairs.swap_remove(best);
        budget.charge_gb_step()?;
        let (mi, _) = basis[i].lead(order).expect("nonzero");
        let (mj, _) = basis[j].lead(order).expect("nonzero");
        if mi.lcm(mj).total_degree() == mi.total_degree() + mj.total_degree() {
            continue;
        }
        let s = spoly(&basis[i], &basis[j], order);
        let nf = normal_form(&s, &basis, order, budget)?;
        if nf.is_zero() {
            continue;
        }
        let nf = nf.monic(order);
        let k = basis.len();
        for l in 0..k {
            pairs.push((l, k));
        }
        basis.push(nf);
    }
    let basis = interreduce(basis, order, budget)?;
    Ok(GroebnerBasis {
        ring: Arc::clone(ring),
        order: order.clone(),
        basis,
    })
}

/// Inter-reduce a basis until every element is monic and fully reduced
/// against the others, then sort ascending by lead degree, within a degree
/// by descending leading monomial.
fn interreduce(
    mut basis: Vec<Polynomial>,
    order: &TermOrder,
    budget: &Budget,
) -> Result<Vec<Polynomial>> {
    loop {
        let mut changed = false;
        let mut i = 0;
        while i < basis.len() {
            let current = basis.remove(i);
            let nf = normal_form(&current, &basis, order, budget)?;
            if nf != current {
                changed = true;
            }
            if !nf.is_zero() {
                basis.insert(i, nf.monic(order));
                i += 1;
            }
        }
        if !changed {
            break;
        }
    }
    basis.sort_by(|a, b| {
        let (ma, _) = a.lead(order).expect("nonzero");
        let (mb, _) = b.lead(order).expect("nonzero");
        ma.total_degree()
            .cmp(&mb.total_degree())
            .then_with(|| order.cmp_monomials(mb, ma))
    });
    Ok(basis)
}

/// Initial ideal of a homogeneous ideal for a weight vector under the
/// minimal-weight convention: the ideal generated by the initial forms of a
/// reduced basis for the weight-refined order.
pub fn initial_ideal(ideal: &Ideal, weights: &WeightVector, budget: &Budget) -> Result<Ideal> {
    if !ideal.is_homogeneous() {
        return Err(Error::NotHomogeneous(
            "initial ideals are defined here for homogeneous ideals only".into(),
        ));
    }
    let order = TermOrder::weight_refined(weights.clone(), TermOrder::GrevLex);
    let gb = buchberger(ideal, &order, budget)?;
    let forms: Result<Vec<Polynomial>> = gb
        .basis()
        .iter()
        .map(|g| g.initial_form(weights))
        .collect();
    Ideal::new(ideal.ring(), forms?)
}

/// Cache of completed bases keyed by the canonical ideal text and the order.
pub struct BasisCache {
    entries: RwLock<HashMap<(String, String), Arc<GroebnerBasis>>>,
}

impl Default for BasisCache {
    fn default() -> Self {
        Self::new()
    }
}

impl BasisCache {
    pub fn new() -> BasisCache {
        BasisCache {
            entries: RwLock::new(HashMap::new()),
        }
    }

    /// Fetch the completed basis, running Buchberger on a miss.
    pub fn get_or_compute(
        &self,
        ideal: &Ideal,
        order: &TermOrder,
        budget: &Budget,
    ) -> Result<Arc<GroebnerBasis>> {
        let key = (ideal.canonical_key(), order.to_string());
        if let Some(hit) = self.entries.read().expect("cache lock").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let gb = Arc::new(buchberger(ideal, order, budget)?);
        self.entries
            .write()
            .expect("cache lock")
            .insert(key, Arc::clone(&gb));
        Ok(gb)
    }
}

/// Quotient dimension oracle: number of degree-`n` monomials outside the
/// leading term ideal of the basis.
pub fn standard_monomials(gb: &GroebnerBasis, n: u64) -> Vec<Monomial> {
    let leads = gb.leading_monomials();
    gb.ring()
        .monomials_of_degree(n)
        .into_iter()
        .filter(|m| !leads.iter().any(|l| l.divides(m)))
        .collect()
}
