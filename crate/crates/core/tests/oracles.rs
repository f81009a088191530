//! Cross-module checks against classical values that do not depend on this
//! crate's own algorithms.

use lienil::f23model::f23_reduce;
use lienil::freealg::{MultiDegree, NcPoly};
use lienil::pbw::PbwEngine;
use lienil::scalars::FieldSpec;
use lienil::tgrade::TEngine;

/// In characteristic 0, T^(3) is the T-ideal of the infinite-dimensional
/// Grassmann algebra, whose multilinear codimensions are 2^(k-1).
#[test]
fn multilinear_codimensions_of_t3_are_powers_of_two() {
    for k in 2..=5usize {
        let e = TEngine::new(k, FieldSpec::Q);
        let d = MultiDegree(vec![1; k]);
        let t = e.commutator_tideal(3, &d).unwrap();
        assert_eq!(t.codim(), 1 << (k - 1), "k = {k}");
    }
}

/// Modulo T^(2) only the commutative monomial survives.
#[test]
fn commutative_quotient_has_codimension_one() {
    let e = TEngine::new(3, FieldSpec::prime(5).unwrap());
    for d in MultiDegree::with_total(3, 5) {
        assert_eq!(e.commutator_tideal(2, &d).unwrap().codim(), 1, "{d}");
    }
}

/// In rank 2 the quotient by T^(3) has the basis x^a y^b, [x,y] x^(a-1) y^(b-1).
#[test]
fn rank2_t3_codimension_matches_the_model() {
    let f = FieldSpec::Q;
    let e = TEngine::new(2, f);
    for total in 0..=7 {
        for d in MultiDegree::with_total(2, total) {
            let expected = if d.0[0] >= 1 && d.0[1] >= 1 { 2 } else { 1 };
            assert_eq!(e.commutator_tideal(3, &d).unwrap().codim(), expected, "{d}");
        }
    }
    // and the model's own reduction agrees on a sample word
    let w = NcPoly::word(2, f, &[1, 0, 1, 0]);
    let r = f23_reduce(&w).unwrap();
    assert_eq!(r.bidegree(), Some((2, 2)));
}

/// The number of free Lie basis elements per degree follows Witt's formula:
/// rank 2 gives 2, 1, 2, 3, 6, 9; rank 3 gives 3, 3, 8, 18.
#[test]
fn lie_basis_sizes_follow_witt() {
    for (rank, expected) in [(2usize, vec![2usize, 1, 2, 3, 6, 9]), (3, vec![3, 3, 8, 18])] {
        let pbw = PbwEngine::new(rank, expected.len(), FieldSpec::Q).unwrap();
        for (i, &n) in expected.iter().enumerate() {
            let got = pbw.basis().elements().iter().filter(|e| e.degree == i + 1).count();
            assert_eq!(got, n, "rank {rank}, degree {}", i + 1);
        }
    }
}

/// The correct words of each multidegree are as many as the words themselves.
#[test]
fn correct_words_count_all_words() {
    let pbw = PbwEngine::new(3, 5, FieldSpec::Q).unwrap();
    for d in MultiDegree::with_total(3, 5) {
        let fact = |n: u32| (1..=n as u64).product::<u64>();
        let words = fact(5) / d.0.iter().map(|&k| fact(k)).product::<u64>();
        assert_eq!(pbw.correct_words(&d).len() as u64, words, "{d}");
    }
}
