use proptest::prelude::*;

use hvb::bundle_file::{parse_bundle, serialize_bundle};
use hvb::bundles::{end_bundle, hom_bundle, BaseContext, HomogeneousBundle, Label};
use hvb::catalog::random_module;
use hvb::field::Field;
use hvb::hom_algebra::{decompose_module, end_algebra, hom_space};
use hvb::linalg::Matrix;
use hvb::module_rep::{modules_isomorphic, Partition, UnipotentModule};

const Q: Field = Field::Rational;

fn partition() -> impl Strategy<Value = Partition> {
    (1usize..=7).prop_flat_map(|n| {
        let all = Partition::all(n);
        (0..all.len()).prop_map(move |i| all[i].clone())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn radical_series_is_a_flag_of_submodules(g in 1usize..=3, dim in 1usize..=5, seed in any::<u64>()) {
        let m = random_module(g, dim, seed, Q).unwrap();
        let flag = m.radical_series();
        let dims = flag.dims();
        prop_assert_eq!(dims[0], dim);
        prop_assert_eq!(*dims.last().unwrap(), 0);
        prop_assert!(dims.windows(2).all(|w| w[0] > w[1]));
        prop_assert!(dims.len() <= dim + 1);
        prop_assert!(flag.has_trivial_quotients(&m));
        for step in &flag.steps {
            if step.cols() > 0 {
                m.restrict(step).unwrap();
            }
        }
    }

    #[test]
    fn socle_series_climbs_to_the_whole_module(g in 1usize..=3, dim in 1usize..=5, seed in any::<u64>()) {
        let m = random_module(g, dim, seed, Q).unwrap();
        let dims = m.socle_series().dims();
        prop_assert_eq!(dims[0], 0);
        prop_assert_eq!(*dims.last().unwrap(), dim);
        prop_assert!(dims.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(m.global_sections_dim() >= 1);
        prop_assert!(m.cosections_dim() >= 1);
    }

    #[test]
    fn partitions_merge_under_direct_sum(a in partition(), b in partition()) {
        let sum = a.module(Q).direct_sum(&b.module(Q)).unwrap();
        prop_assert_eq!(sum.partition().unwrap(), a.merge(&b));
    }

    #[test]
    fn dual_is_an_involution(p in partition(), seed in any::<u64>()) {
        let m = random_module(1, p.size(), seed, Q).unwrap();
        prop_assert!(modules_isomorphic(&m.dual().dual(), &m, seed).unwrap().is_yes());
        prop_assert_eq!(m.dual().partition().unwrap(), m.partition().unwrap());
    }

    #[test]
    fn hom_basis_intertwines(g in 1usize..=2, d1 in 1usize..=4, d2 in 1usize..=4, s1 in any::<u64>(), s2 in any::<u64>()) {
        let a = random_module(g, d1, s1, Q).unwrap();
        let b = random_module(g, d2, s2, Q).unwrap();
        let hom = hom_space(&a, &b).unwrap();
        for t in hom.basis() {
            for (x, y) in a.operators().iter().zip(b.operators()) {
                prop_assert_eq!(t * x, y * t);
            }
        }
        if hom.dim() > 0 {
            let flat: Vec<Vec<_>> = hom.basis().iter().map(|t| t.entries().to_vec()).collect();
            prop_assert_eq!(Matrix::from_columns(Q, d1 * d2, &flat).rank(), hom.dim());
        }
    }

    #[test]
    fn end_algebra_is_unital_and_associative(g in 1usize..=2, dim in 1usize..=4, seed in any::<u64>()) {
        let m = random_module(g, dim, seed, Q).unwrap();
        let end = end_algebra(&m).unwrap();
        prop_assert!(end.basis()[0].is_identity());
        prop_assert!(end.is_associative());
        prop_assert!(end.structure_matches_products());
        let rad = end.radical().unwrap();
        prop_assert!(rad.basis.iter().all(|x| end.element(x).is_nilpotent()));
    }

    #[test]
    fn decomposition_witness_holds(g in 1usize..=2, d1 in 1usize..=3, d2 in 1usize..=3, s1 in any::<u64>(), s2 in any::<u64>()) {
        let sum = random_module(g, d1, s1, Q).unwrap().direct_sum(&random_module(g, d2, s2, Q).unwrap()).unwrap();
        let d = decompose_module(&sum, s1 ^ s2).unwrap();
        prop_assert!(d.witness_holds(&sum));
        prop_assert!(d.factors.len() >= 2);
        prop_assert_eq!(d.factors.iter().map(UnipotentModule::dim).sum::<usize>(), d1 + d2);
    }

    #[test]
    fn end_bundle_is_block_diagonal(labels in prop::collection::vec(-2i64..=2, 1..=3), seed in any::<u64>()) {
        let ctx = BaseContext::new(2, 1, Q).unwrap();
        let summands = labels
            .iter()
            .enumerate()
            .map(|(i, &l)| (Label::new(vec![l]), random_module(2, 1 + i % 3, seed.wrapping_add(i as u64), Q).unwrap()))
            .collect();
        let e = HomogeneousBundle::normalize(ctx, summands).unwrap();
        let expected: usize = e.summands().iter().map(|(_, m)| hom_space(m, m).unwrap().dim()).sum();
        prop_assert_eq!(end_bundle(&e).unwrap().rank(), expected);
        prop_assert_eq!(hom_bundle(&e, &e).unwrap().labels().len(), e.summands().len());
        let text = serialize_bundle(&e);
        prop_assert_eq!(parse_bundle(&text, Q).unwrap(), e);
    }
}

#[test]
fn tensor_of_trivial_modules_is_trivial() {
    let t = UnipotentModule::trivial(2, 2, Q).tensor(&UnipotentModule::trivial(2, 3, Q)).unwrap();
    assert_eq!(t.dim(), 6);
    assert!(t.is_trivial());
}

#[test]
fn tensor_with_the_unit_is_identity_up_to_isomorphism() {
    let m = random_module(2, 3, 5, Q).unwrap();
    let t = m.tensor(&UnipotentModule::trivial(2, 1, Q)).unwrap();
    assert!(modules_isomorphic(&t, &m, 0).unwrap().is_yes());
}

#[test]
fn prime_field_agrees_with_rationals_on_jordan_data() {
    let f7 = Field::prime(7).unwrap();
    for p in Partition::all(5) {
        let q = end_algebra(&p.module(Q)).unwrap().dim();
        let r = end_algebra(&p.module(f7)).unwrap().dim();
        assert_eq!(q, r, "{p}");
    }
}
