mod common;

use common::{budget, cubic_cone_family, graded_family, hypersurface_dim};
use multirees::rees::{
    central_fiber, check_flatness, domain_test, ord_multiplicativity_check,
    verify_graded_bookkeeping, weight_cone_sample, DomainOutcome,
};
use multirees::{CentralFiber, IndexWindow, ReesWindow, WeightVector};

const FIBER_TOTALS: [usize; 7] = [1, 6, 21, 55, 120, 231, 406];

fn cubic_cone_fiber(degree_bound: u64, window: Vec<u64>) -> CentralFiber {
    let fam = cubic_cone_family();
    let b = budget();
    let win = ReesWindow::build(&fam, degree_bound, IndexWindow::new(window).unwrap(), &b)
        .unwrap();
    central_fiber(&win, &b).unwrap()
}

#[test]
fn central_fiber_totals_reproduce_the_hypersurface_hilbert_function() {
    let fiber = cubic_cone_fiber(6, vec![6, 6]);
    let totals = fiber.totals();
    assert_eq!(totals, FIBER_TOTALS.to_vec());
    for (n, &total) in totals.iter().enumerate() {
        assert_eq!(total, hypersurface_dim(6, 3, n as u64), "degree {n}");
    }
}

#[test]
fn per_degree_windows_report_the_same_totals() {
    for n in 0u64..=6 {
        let fiber = cubic_cone_fiber(n, vec![n, n]);
        assert_eq!(fiber.totals()[n as usize], FIBER_TOTALS[n as usize], "degree {n}");
    }
}

#[test]
fn cubic_cone_window_flatness_is_certified() {
    let fam = cubic_cone_family();
    let b = budget();
    let win = ReesWindow::build(&fam, 6, IndexWindow::new(vec![4, 4]).unwrap(), &b).unwrap();
    let report = check_flatness(&win.subspaces(), &b).unwrap();
    assert!(report.is_certified());
    assert_eq!(report.cells.len(), 4 * 25 * 7);
    for cell in &report.cells {
        assert!(
            cell.homology.iter().skip(1).all(|&d| d == 0),
            "subset {:?} m {:?} n {}",
            cell.subset,
            cell.m,
            cell.n
        );
    }
}

#[test]
fn degree_two_fiber_products_are_all_nonzero() {
    let fiber = cubic_cone_fiber(4, vec![4, 4]);
    let outcome = domain_test(&fiber, 2, &budget()).unwrap();
    let DomainOutcome::Pass { pairs_checked } = outcome else {
        panic!("expected a clean pass");
    };
    // 28 elements of degree at most 2, hence 28 * 29 / 2 unordered pairs.
    assert_eq!(pairs_checked, 406);
}

#[test]
fn meeting_cutters_produce_a_zero_divisor_witness() {
    let fam = graded_family(&["x", "y", "z"], &[1, 2, 1], &["x*y + z^3"], &["x", "y"]);
    let b = budget();
    let win = ReesWindow::build(&fam, 4, IndexWindow::new(vec![4, 4]).unwrap(), &b).unwrap();
    let fiber = central_fiber(&win, &b).unwrap();
    let outcome = domain_test(&fiber, 2, &b).unwrap();
    let DomainOutcome::ZeroDivisor { a, b: other } = outcome else {
        panic!("expected a zero divisor");
    };
    assert_eq!(a.rep.to_string(), "z");
    assert_eq!((a.n, a.m.as_slice()), (1u64, &[0u64, 0][..]));
    assert_eq!(other.rep.to_string(), "z^2");
    assert_eq!((other.n, other.m.as_slice()), (2u64, &[0u64, 0][..]));
}

#[test]
fn bookkeeping_is_clean_and_weight_independent() {
    let fiber = cubic_cone_fiber(6, vec![6, 6]);
    let b = budget();
    let mut tables = Vec::new();
    for entries in [[1i64, 1], [1, 2], [2, 3], [3, 5]] {
        let alpha = WeightVector::from_ints(&entries).unwrap();
        let report = verify_graded_bookkeeping(&fiber, &alpha, &b).unwrap();
        assert!(report.is_clean(), "alpha {entries:?}: {:?}", report.mismatches);
        assert!(report.window_sufficient, "alpha {entries:?}");
        assert!(report.levels_checked > 0);
        tables.push(report.fiber_table);
    }
    for table in &tables[1..] {
        assert_eq!(table, &tables[0]);
    }
}

#[test]
fn weight_cone_support_is_the_full_triangle() {
    let fiber = cubic_cone_fiber(6, vec![6, 6]);
    let sample = weight_cone_sample(&fiber);
    let mut expected = Vec::new();
    for n in 0u64..=6 {
        for m1 in 0u64..=6 {
            for m2 in 0u64..=6 {
                if m1 + m2 <= n {
                    expected.push((n, vec![m1, m2]));
                }
            }
        }
    }
    assert_eq!(sample.support, expected);
    assert!(sample.saturated, "holes: {:?}", sample.holes);
    assert_eq!(
        sample.extreme_rays,
        vec![vec![1, 0, 0], vec![1, 0, 1], vec![1, 1, 0]]
    );
}

#[test]
fn order_is_additive_on_a_hundred_seeded_pairs() {
    let fam = cubic_cone_family();
    let alpha = WeightVector::from_ints(&[1, 1]).unwrap();
    let report =
        ord_multiplicativity_check(&fam, &alpha, &[8, 8], 100, 3, 2026, &budget()).unwrap();
    assert_eq!(report.pairs, 100);
    assert_eq!(report.equal, 100, "failures: {:?}", report.failures);
    assert_eq!(report.boundary_flags, 0);
    assert!(report.all_equal());
}

#[test]
fn fiber_products_commute_and_associate() {
    let fiber = cubic_cone_fiber(6, vec![6, 6]);
    let b = budget();
    let elements = fiber.basis_elements(1);
    assert_eq!(elements.len(), 7);
    for x in &elements {
        for y in &elements {
            let xy = fiber.multiply(x, y, &b).unwrap();
            let yx = fiber.multiply(y, x, &b).unwrap();
            assert_eq!(xy.rep, yx.rep, "{x} * {y}");
            for z in &elements {
                let left = fiber.multiply(&xy, z, &b).unwrap();
                let right = fiber
                    .multiply(x, &fiber.multiply(y, z, &b).unwrap(), &b)
                    .unwrap();
                assert_eq!(left.rep, right.rep, "({x} * {y}) * {z}");
            }
        }
    }
}

#[test]
fn unit_class_is_neutral_for_fiber_products() {
    let fiber = cubic_cone_fiber(4, vec![4, 4]);
    let b = budget();
    let one = fiber
        .basis_elements(0)
        .into_iter()
        .next()
        .expect("degree zero class");
    assert_eq!(one.rep, multirees::Polynomial::one(fiber.family().quotient().ring()));
    for e in fiber.basis_elements(2) {
        let product = fiber.multiply(&one, &e, &b).unwrap();
        assert_eq!(product.rep, e.rep, "{e}");
        assert_eq!((product.n, product.m), (e.n, e.m));
    }
}
