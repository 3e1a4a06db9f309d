use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use multisect::constructions::{bisection_from_heegaard, bisection_from_heegaard_with, lens_diagram};
use multisect::diagrams::{read_against, GeometricHeegaardDiagram, MirrorConvention};
use multisect::freewords::{FreeAutomorphism, Letter, Word};
use multisect::io::{parse_msd, write_msd};
use multisect::nielsen::{
    distinguish, nielsen_move, orbit_enumerate, replay, FiniteAbelianGroup, GeneratingTuple, NielsenMove, SearchLimits,
    TupleMove, Verdict,
};
use multisect::presentations::{abelianization, tietze_simplify, GroupPresentation};
use multisect::smith::{smith_normal_form, IntegerMatrix};

fn word_strategy(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((1..=rank as i32, any::<bool>()), 0..=max_len).prop_map(move |v| {
        let signed: Vec<i32> = v.into_iter().map(|(k, s)| if s { k } else { -k }).collect();
        Word::from_signed(rank, &signed)
    })
}

fn move_strategy(rank: usize) -> impl Strategy<Value = TupleMove> {
    prop_oneof![
        4 => (0..4usize).prop_map(|k| TupleMove::Nielsen(NielsenMove::ALL[k])),
        1 => (1..=rank, any::<bool>()).prop_map(|(k, s)| TupleMove::Conjugate(Letter::new(k, s))),
    ]
}

fn coprime_pair() -> impl Strategy<Value = (u64, u64)> {
    (2u64..12, 1u64..12).prop_filter("coprime", |&(p, q)| q < p && num_gcd(p, q) == 1)
}

fn num_gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        num_gcd(b, a % b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smith_form_is_equivalent_and_divisible(rows in 1usize..5, cols in 1usize..5, seed in prop::collection::vec(-20i64..20, 16)) {
        let data: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| seed[i * 4 + j]).collect()).collect();
        let a = IntegerMatrix::from_rows(cols, &data);
        let snf = smith_normal_form(&a);
        prop_assert_eq!(snf.u.mul(&a).mul(&snf.v), snf.d.clone());
        prop_assert_eq!(snf.u.determinant().abs(), BigInt::from(1));
        prop_assert_eq!(snf.v.determinant().abs(), BigInt::from(1));
        let diag = snf.diagonal();
        for k in 1..diag.len() {
            let (x, y) = (&diag[k - 1], &diag[k]);
            prop_assert!(!x.is_negative() && !y.is_negative());
            let divides = if x.is_zero() { y.is_zero() } else { (y % x).is_zero() };
            prop_assert!(divides);
        }
    }

    #[test]
    fn word_laws(u in word_strategy(3, 12), v in word_strategy(3, 12), k in 0usize..12) {
        prop_assert!(u.concat(&u.invert()).is_empty());
        prop_assert_eq!(u.concat(&v).invert(), v.invert().concat(&u.invert()));
        prop_assert_eq!(u.invert().invert(), u.clone());
        let c = u.cyclic_reduce();
        prop_assert_eq!(c.rotate(k).cyclic_canonical(), c.cyclic_canonical());
        prop_assert!(c.cyclic_eq(&c.rotate(k)));
        let id: Vec<Word> = (1..=3).map(|i| Word::from_signed(3, &[i])).collect();
        prop_assert_eq!(u.substitute(&id, 3), u.clone());
    }

    #[test]
    fn transvection_products_invert(steps in prop::collection::vec((1usize..=3, 1usize..=3, any::<bool>(), any::<bool>()), 1..6), w in word_strategy(3, 10)) {
        let mut phi = FreeAutomorphism::identity(3);
        for (t, m, sign, left) in steps {
            if t != m {
                phi = phi.compose(&FreeAutomorphism::transvection(3, t, m, sign, left)).unwrap();
            }
        }
        let inv = phi.inverse().expect("products of transvections carry their inverse");
        prop_assert_eq!(inv.apply(&phi.apply(&w).unwrap()).unwrap(), w);
    }

    #[test]
    fn tietze_keeps_abelianization(rels in prop::collection::vec(word_strategy(3, 8), 0..4)) {
        let p = GroupPresentation::new(3, rels).unwrap();
        let s = tietze_simplify(&p, 200);
        prop_assert_eq!(abelianization(&s.presentation), abelianization(&p));
        prop_assert!(s.presentation.generator_count() <= 3);
        prop_assert_eq!(s.original_in_current.len(), 3);
        prop_assert_eq!(s.current_in_original.len(), s.presentation.generator_count());
    }

    #[test]
    fn nielsen_moves_preserve_generation(idx in 0usize..5, start in 0usize..64, m in 0usize..4) {
        let groups = FiniteAbelianGroup::all_up_to(8);
        let g = &groups[idx % groups.len()];
        let order = g.order() as usize;
        let elems = vec![g.element(start % order), g.element((start / 3 + 1) % order)];
        if g.generates(&elems) {
            let t = GeneratingTuple::new(g.clone(), elems).unwrap();
            let moved = nielsen_move(&t, NielsenMove::ALL[m]).unwrap();
            prop_assert!(g.generates(moved.elements()));
        }
    }

    #[test]
    fn lens_bisection_properties((p, q) in coprime_pair()) {
        let b = bisection_from_heegaard(&lens_diagram(p, q).unwrap()).unwrap();
        let report = b.validate(10_000).unwrap();
        prop_assert!(report.all_verified(), "{}", report);
        prop_assert_eq!(abelianization(&b.pi1().unwrap()).torsion_u64(), vec![p]);
        for (&(i, j), words) in b.cached_readings() {
            let recomputed = b.system(j).unwrap().curves().iter()
                .map(|c| read_against(c, b.system(i).unwrap()))
                .collect::<Result<Vec<_>, _>>()
                .unwrap();
            prop_assert_eq!(&recomputed, words, "reading {} {}", i, j);
        }
        for s in b.systems() {
            for c in s.curves() {
                prop_assert!(read_against(c, s).unwrap().is_empty());
            }
        }
        let text = write_msd(&b);
        prop_assert_eq!(parse_msd(&text).unwrap(), b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn orbits_respect_coordinate_swap(p in prop::sample::select(vec![2u64, 3, 5]), x in 0usize..625, y in 0usize..625) {
        let g = FiniteAbelianGroup::elementary(p, 2).unwrap();
        let part = orbit_enumerate(&g, 2).unwrap();
        let order = g.order() as usize;
        let tuple = |seed: usize| vec![g.element(seed % order), g.element((seed / order) % order)];
        let swap = |t: &[Vec<u64>]| t.iter().map(|e| vec![e[1], e[0]]).collect::<Vec<_>>();
        let (t1, t2) = (tuple(x), tuple(y));
        if let (Some(a), Some(b)) = (part.orbit_index(&t1), part.orbit_index(&t2)) {
            let (sa, sb) = (part.orbit_index(&swap(&t1)).unwrap(), part.orbit_index(&swap(&t2)).unwrap());
            prop_assert_eq!(a == b, sa == sb);
            prop_assert_eq!(part.orbit_sizes()[a], part.orbit_sizes()[sa]);
        }
    }

    #[test]
    fn moved_tuples_are_never_distinct(moves in prop::collection::vec(move_strategy(2), 0..6), n in 2i32..6) {
        let p = GroupPresentation::new(2, vec![Word::from_signed(2, &vec![1; n as usize])]).unwrap();
        let t1 = vec![Word::from_signed(2, &[1]), Word::from_signed(2, &[2])];
        let t2 = replay(&t1, &moves).unwrap();
        let limits = SearchLimits { max_quotient_order: 12, tuple_bound: 1_000_000, free_search_states: 2_000 };
        let cert = distinguish(&p, &t1, &t2, &limits).unwrap();
        prop_assert_ne!(&cert.verdict, &Verdict::Distinct);
        if cert.verdict == Verdict::SameOrbit {
            prop_assert!(cert.verify(&p, &t1, &t2));
        }
    }
}

fn genus_two_curves() -> GeometricHeegaardDiagram {
    let t = |target, mult, left| FreeAutomorphism::transvection(4, target, mult, true, left);
    let lam = FreeAutomorphism::identity(4).compose(&t(1, 2, false)).unwrap();
    let lam = lam.compose(&t(1, 4, false)).unwrap().compose(&t(3, 2, true)).unwrap();
    let curves = [1, 3].map(|k| lam.apply(&Word::from_signed(4, &[k])).unwrap().cyclic_reduce());
    GeometricHeegaardDiagram::new(2, curves.to_vec(), lam.inverse(), "h").unwrap()
}

#[test]
fn mirror_convention_matters_for_asymmetric_curves() {
    let h = genus_two_curves();
    let good = bisection_from_heegaard_with(&h, MirrorConvention::Inverse).unwrap();
    assert!(good.validate(500).unwrap().all_verified());
    let bad = bisection_from_heegaard_with(&h, MirrorConvention::LetterInverse).unwrap();
    let report = bad.validate(500).unwrap();
    assert!(report.sectors[0].verdict.is_verified());
    assert!(!report.sectors[1].verdict.is_verified());
}
