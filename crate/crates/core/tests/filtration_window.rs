mod common;

use common::{binom, budget, cubic_cone_family, family, hypersurface_dim};
use multirees::gradedla::degree_slice;
use multirees::groebner::{buchberger, standard_monomials};
use multirees::polycore::parse_polynomial;
use multirees::{Error, Ideal, TermOrder, WeightVector};

#[test]
fn three_variable_windows_count_shifted_monomials() {
    let fam = family(&["x", "y", "z"], &[], &["x", "y", "z"]);
    let b = budget();
    for n in 0u64..=6 {
        for m1 in 0i64..=2 {
            for m2 in 0i64..=2 {
                for m3 in 0i64..=2 {
                    let total = (m1 + m2 + m3) as u64;
                    let expected = if total <= n { binom(n - total + 2, 2) } else { 0 };
                    let piece = fam.multi_piece(&[m1, m2, m3], n, &b).unwrap();
                    assert_eq!(piece.dim(), expected, "n={n} m=({m1},{m2},{m3})");
                }
            }
        }
    }
}

#[test]
fn cubic_cone_windows_stack_as_shifted_hypersurface_slices() {
    // u, v is a regular sequence on the cubic quotient, so the intersection
    // (u^a) ∩ (v^b) is (u^a v^b) and multiplication by u^a v^b embeds the
    // degree n - a - b slice into degree n.
    let fam = cubic_cone_family();
    let b = budget();
    for n in 0u64..=5 {
        for a in 0i64..=2 {
            for c in 0i64..=2 {
                let total = (a + c) as u64;
                let expected = if total <= n {
                    hypersurface_dim(6, 3, n - total)
                } else {
                    0
                };
                let piece = fam.multi_piece(&[a, c], n, &b).unwrap();
                assert_eq!(piece.dim(), expected, "n={n} m=({a},{c})");
            }
        }
    }
}

#[test]
fn image_slices_agree_with_quotient_basis_counts() {
    // Dual route for one filtration piece: slicing the image of (u^m) by
    // generator multiplication against counting standard monomials of the
    // enlarged ideal.
    let fam = cubic_cone_family();
    let b = budget();
    let ring = fam.quotient().ring().clone();
    let relation = fam.quotient().relations().gens()[0].clone();
    let u = parse_polynomial(&ring, "u").unwrap();
    for m in 1u32..=3 {
        let enlarged = Ideal::new(&ring, vec![relation.clone(), u.pow(m)]).unwrap();
        let gb = buchberger(&enlarged, &TermOrder::GrevLex, &budget()).unwrap();
        for n in 0u64..=5 {
            let space = fam.filtration_piece(1, m as i64).unwrap();
            let sliced = degree_slice(&space, n, &b).unwrap().dim();
            let counted = fam.quotient().dim(n) - standard_monomials(&gb, n).len();
            assert_eq!(sliced, counted, "m={m} n={n}");
        }
    }
}

#[test]
fn negative_entries_truncate_to_the_whole_ring() {
    let fam = cubic_cone_family();
    let b = budget();
    for n in 0u64..=3 {
        let truncated = fam.multi_piece(&[-5, 1], n, &b).unwrap();
        let clamped = fam.multi_piece(&[0, 1], n, &b).unwrap();
        assert_eq!(truncated.dim(), clamped.dim());
    }
}

#[test]
fn window_pieces_shrink_as_the_index_grows() {
    let fam = cubic_cone_family();
    let b = budget();
    for n in 0u64..=4 {
        for m1 in 0i64..=2 {
            for m2 in 0i64..=2 {
                let here = fam.multi_piece(&[m1, m2], n, &b).unwrap();
                let up = fam.multi_piece(&[m1 + 1, m2], n, &b).unwrap();
                assert!(here.contains_slice(&up, &b).unwrap(), "n={n} m=({m1},{m2})");
            }
        }
    }
}

#[test]
fn order_values_at_the_named_elements() {
    let fam = cubic_cone_family();
    let b = budget();
    let ring = fam.quotient().ring().clone();
    let even = WeightVector::from_ints(&[1, 1]).unwrap();
    let skew = WeightVector::from_ints(&[1, 2]).unwrap();

    let u = parse_polynomial(&ring, "u").unwrap();
    let of_u = fam.ord_alpha(&u, &even, &[4, 4], &b).unwrap();
    assert_eq!(of_u.value, multirees::polycore::rat(1));
    assert_eq!(of_u.attained_at, vec![1, 0]);
    assert!(!of_u.boundary);

    let x = parse_polynomial(&ring, "x").unwrap();
    let of_x = fam.ord_alpha(&x, &even, &[4, 4], &b).unwrap();
    assert_eq!(of_x.value, multirees::polycore::rat(0));
    assert_eq!(of_x.attained_at, vec![0, 0]);

    let uv = parse_polynomial(&ring, "u*v").unwrap();
    let of_uv = fam.ord_alpha(&uv, &skew, &[4, 4], &b).unwrap();
    assert_eq!(of_uv.value, multirees::polycore::rat(3));
    assert_eq!(of_uv.attained_at, vec![1, 1]);
    assert!(!of_uv.boundary);
}

#[test]
fn order_of_monomials_in_the_plane_is_the_weighted_exponent() {
    let fam = family(&["x", "y"], &[], &["x", "y"]);
    let b = budget();
    let ring = fam.quotient().ring().clone();
    let alpha = WeightVector::from_ints(&[1, 2]).unwrap();
    for a in 0u32..=3 {
        for c in 0u32..=3 {
            if a == 0 && c == 0 {
                continue;
            }
            let text = format!("x^{a}*y^{c}");
            let f = parse_polynomial(&ring, &text).unwrap();
            let ord = fam.ord_alpha(&f, &alpha, &[6, 6], &b).unwrap();
            assert_eq!(ord.value, multirees::polycore::rat((a + 2 * c) as i64), "{text}");
            assert_eq!(ord.attained_at, vec![a as u64, c as u64]);
            assert!(!ord.boundary, "{text}");
        }
    }
}

#[test]
fn order_at_the_window_edge_raises_the_boundary_flag() {
    let fam = family(&["x", "y"], &[], &["x", "y"]);
    let b = budget();
    let ring = fam.quotient().ring().clone();
    let alpha = WeightVector::from_ints(&[1, 1]).unwrap();
    let f = parse_polynomial(&ring, "x^3").unwrap();
    let clipped = fam.ord_alpha(&f, &alpha, &[2, 2], &b).unwrap();
    assert_eq!(clipped.value, multirees::polycore::rat(2));
    assert!(clipped.boundary);
    let exact = fam.ord_alpha(&f, &alpha, &[5, 5], &b).unwrap();
    assert_eq!(exact.value, multirees::polycore::rat(3));
    assert!(!exact.boundary);
}

#[test]
fn order_of_the_zero_class_is_rejected() {
    let fam = family(&["x", "y"], &["x^2"], &["x"]);
    let b = budget();
    let ring = fam.quotient().ring().clone();
    let alpha = WeightVector::from_ints(&[1]).unwrap();
    let f = parse_polynomial(&ring, "x^2").unwrap();
    let err = fam.ord_alpha(&f, &alpha, &[3], &b).unwrap_err();
    assert!(matches!(err, Error::ZeroElement(_)), "{err}");
}

#[test]
fn zero_divisor_cutters_are_flagged_but_usable() {
    let fam = family(&["x", "y"], &["x*y"], &["x"]);
    assert!(fam.warnings().iter().any(|w| w.contains("zero divisor")));
    let b = budget();
    let piece = fam.multi_piece(&[1], 2, &b).unwrap();
    assert_eq!(piece.dim(), 1);
}
