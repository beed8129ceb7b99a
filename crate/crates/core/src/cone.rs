//! Exact rational polyhedral cone queries: primitive integer directions,
//! membership of a point in the cone spanned by finitely many generators, and
//! extreme ray extraction.
//!
//! Membership is a phase-one simplex feasibility run over exact rationals
//! with Bland's rule, so there is no cycling and no rounding.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::polycore::{rat, Rational};

/// Primitive representative of an integer direction: divide by the gcd of
/// the entries. The zero vector is returned unchanged.
pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    if g <= 1 {
        return v.to_vec();
    }
    v.iter().map(|&x| x / g).collect()
}

/// Whether `point` lies in the cone of nonnegative combinations of
/// `generators`. Exact; the zero point is always a member.
pub fn cone_contains(generators: &[Vec<i64>], point: &[i64]) -> bool {
    let dim = point.len();
    assert!(
        generators.iter().all(|g| g.len() == dim),
        "generator dimension mismatch"
    );
    if point.iter().all(|&x| x == 0) {
        return true;
    }
    let cols: Vec<Vec<Rational>> = generators
        .iter()
        .map(|g| g.iter().map(|&x| rat(x)).collect())
        .collect();
    let target: Vec<Rational> = point.iter().map(|&x| rat(x)).collect();
    feasible_nonnegative_combination(&cols, &target)
}

/// Phase-one simplex: is there x >= 0 with sum_j x_j cols[j] = target?
fn feasible_nonnegative_combination(cols: &[Vec<Rational>], target: &[Rational]) -> bool {
    let m = target.len();
    let n = cols.len();
    // Tableau rows: [A | I_artificial | b], with each row scaled so b >= 0.
    let width = n + m + 1;
    let mut tab: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row: Vec<Rational> = Vec::with_capacity(width);
        let flip = target[i].is_negative();
        for col in cols {
            let v = col[i].clone();
            row.push(if flip { -v } else { v });
        }
        for j in 0..m {
            row.push(if i == j { Rational::one() } else { Rational::zero() });
        }
        row.push(if flip { -target[i].clone() } else { target[i].clone() });
        tab.push(row);
    }
    // Objective: minimize the sum of artificials; reduced costs start as
    // minus the column sums over the constraint rows.
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut obj: Vec<Rational> = vec![Rational::zero(); width];
    for row in &tab {
        for (j, v) in row.iter().enumerate() {
            if j < n || j == width - 1 {
                obj[j] -= v;
            }
        }
    }
    loop {
        // Bland's rule: smallest-index column with negative reduced cost.
        let entering = (0..n + m).find(|&j| obj[j].is_negative());
        let Some(e) = entering else { break };
        // Ratio test, ties broken by smallest basis index.
        let mut leave: Option<usize> = None;
        let mut best: Option<Rational> = None;
        for (i, row) in tab.iter().enumerate() {
            if row[e].is_positive() {
                let ratio = &row[width - 1] / &row[e];
                let better = match &best {
                    None => true,
                    Some(b) => ratio < *b || (ratio == *b && basis[i] < basis[leave.unwrap()]),
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let Some(l) = leave else {
            // Unbounded phase-one objective cannot happen (bounded below by
            // zero); an empty ratio column means the entering column cannot
            // improve, so stop.
            break;
        };
        pivot(&mut tab, &mut obj, l, e);
        basis[l] = e;
    }
    // Feasible iff all artificials left the optimum at value zero: the
    // objective row's right-hand side is minus the artificial sum.
    obj[width - 1].is_zero()
}

fn pivot(tab: &mut [Vec<Rational>], obj: &mut [Rational], l: usize, e: usize) {
    let width = obj.len();
    let p = tab[l][e].clone();
    if !p.is_one() {
        for v in tab[l].iter_mut() {
            *v /= &p;
        }
    }
    for i in 0..tab.len() {
        if i == l || tab[i][e].is_zero() {
            continue;
        }
        let c = tab[i][e].clone();
        for j in 0..width {
            let delta = &c * &tab[l][j];
            tab[i][j] -= delta;
        }
    }
    if !obj[e].is_zero() {
        let c = obj[e].clone();
        for j in 0..width {
            let delta = &c * &tab[l][j];
            obj[j] -= delta;
        }
    }
}

/// Extreme rays of the cone spanned by the generators: the primitive
/// directions that are not nonnegative combinations of the others. Sorted.
pub fn extreme_rays(generators: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut dirs: Vec<Vec<i64>> = Vec::new();
    for g in generators {
        if g.iter().all(|&x| x == 0) {
            continue;
        }
        let p = primitive(g);
        if !dirs.contains(&p) {
            dirs.push(p);
        }
    }
    dirs.sort();
    let mut rays = Vec::new();
    for (k, c) in dirs.iter().enumerate() {
        let others: Vec<Vec<i64>> = dirs
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(_, d)| d.clone())
            .collect();
        if others.is_empty() || !cone_contains(&others, c) {
            rays.push(c.clone());
        }
    }
    rays
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitive_divides_by_gcd() {
        assert_eq!(primitive(&[4, 6]), vec![2, 3]);
        assert_eq!(primitive(&[0, 0]), vec![0, 0]);
        assert_eq!(primitive(&[-2, 4]), vec![-1, 2]);
        assert_eq!(primitive(&[0, 5]), vec![0, 1]);
    }

    #[test]
    fn quadrant_membership() {
        let gens = vec![vec![1, 0], vec![0, 1]];
        assert!(cone_contains(&gens, &[3, 2]));
        assert!(cone_contains(&gens, &[0, 0]));
        assert!(!cone_contains(&gens, &[-1, 2]));
        assert!(!cone_contains(&gens, &[1, -1]));
    }

    #[test]
    fn halfplane_membership_with_interior_generator() {
        let gens = vec![vec![1, 0], vec![1, 1], vec![0, 1]];
        assert!(cone_contains(&gens, &[5, 3]));
        assert!(!cone_contains(&gens, &[-1, 0]));
    }

    #[test]
    fn extreme_rays_drop_interior_directions() {
        let gens = vec![vec![1, 0], vec![1, 1], vec![2, 2], vec![0, 1], vec![3, 1]];
        assert_eq!(extreme_rays(&gens), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn support_cone_of_two_plane_filtrations() {
        // Points (n, m1, m2) with m1 + m2 <= n, n <= 3.
        let mut gens = Vec::new();
        for n in 0i64..=3 {
            for m1 in 0..=n {
                for m2 in 0..=(n - m1) {
                    gens.push(vec![n, m1, m2]);
                }
            }
        }
        let rays = extreme_rays(&gens);
        assert_eq!(rays, vec![vec![1, 0, 0], vec![1, 0, 1], vec![1, 1, 0]]);
    }

    #[test]
    fn single_ray_cone() {
        let gens = vec![vec![2, 4]];
        assert!(cone_contains(&gens, &[1, 2]));
        assert!(!cone_contains(&gens, &[2, 1]));
        assert_eq!(extreme_rays(&gens), vec![vec![1, 2]]);
    }
}
