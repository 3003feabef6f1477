//! Structural invariants as property tests.

use bundlecalc_core::bundle::*;
use bundlecalc_core::fingroup::{builtin_catalog, enumerate_homs_arc, FiniteGroup, GroupHom};
use bundlecalc_core::finmod::*;
use bundlecalc_core::finspace::*;
use bundlecalc_core::internalcat::*;
use bundlecalc_core::matrix::{smith_normal_form, Matrix};
use bundlecalc_core::protower::*;
use proptest::prelude::*;
use std::sync::Arc;

fn space_map(max_dom: usize, max_cod: usize) -> impl Strategy<Value = SpaceMap> {
    (1..=max_cod).prop_flat_map(move |c| {
        prop::collection::vec(0..c, 0..=max_dom)
            .prop_map(move |v| SpaceMap::new(FiniteSpace::new(v.len()), FiniteSpace::new(c), v).unwrap())
    })
}

fn cospan() -> impl Strategy<Value = (SpaceMap, SpaceMap)> {
    (1..=4usize).prop_flat_map(|c| {
        let side = move || {
            prop::collection::vec(0..c, 0..=5).prop_map(move |v| SpaceMap::new(FiniteSpace::new(v.len()), FiniteSpace::new(c), v).unwrap())
        };
        (side(), side())
    })
}

/// Modules over `Z/n` given by divisors of `n`.
fn zmod_module(n: i64) -> impl Strategy<Value = Arc<FiniteModule>> {
    let divisors: Vec<i64> = (2..=n).filter(|d| n % d == 0).collect();
    prop::collection::vec(prop::sample::select(divisors), 0..=2).prop_map(move |f| {
        let ring = FiniteRing::zmod(n).unwrap();
        let parts: Vec<_> = f.iter().map(|&d| Arc::new(FiniteModule::with_trivial_action(&ring, &[d]).unwrap())).collect();
        direct_sum(&ring, &parts).unwrap().module
    })
}

fn kc2_module() -> impl Strategy<Value = Arc<FiniteModule>> {
    let ring = FiniteRing::group_algebra(2, FiniteGroup::cyclic(2)).unwrap();
    (0..=1usize, 0..=1usize).prop_map(move |(free, triv)| {
        let parts =
            vec![Arc::new(free_module_of_rank(&ring, free)), Arc::new(FiniteModule::with_trivial_action(&ring, &vec![2; triv]).unwrap())];
        direct_sum(&ring, &parts).unwrap().module
    })
}

fn small_group() -> impl Strategy<Value = Arc<FiniteGroup>> {
    let groups: Vec<Arc<FiniteGroup>> = builtin_catalog(8).into_iter().map(|(_, g)| Arc::new(g)).collect();
    prop::sample::select(groups)
}

fn isomorphic(a: &Arc<FiniteModule>, b: &Arc<FiniteModule>) -> bool {
    matches!(bundlecalc_core::finmod::find_isomorphism(a, b, 1 << 16).unwrap(), IsoSearch::Isomorphic(_))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fibres_partition_the_domain(p in space_map(8, 4)) {
        let mut seen: Vec<usize> = p.codomain().points().flat_map(|x| fibre(&p, x).unwrap()).collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, p.domain().points().collect::<Vec<_>>());
        for x in p.codomain().points() {
            let f = fibre(&p, x).unwrap();
            prop_assert!(f.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(f.iter().all(|&y| p.apply(y) == x));
        }
    }

    #[test]
    fn pullback_size_and_symmetry((f, g) in cospan()) {
        let (p, a, b) = pullback(&f, &g).unwrap();
        let expected: usize = f.codomain().points().map(|x| fibre(&f, x).unwrap().len() * fibre(&g, x).unwrap().len()).sum();
        prop_assert_eq!(p.size, expected);
        for z in p.points() {
            prop_assert_eq!(f.apply(a.apply(z)), g.apply(b.apply(z)));
        }
        let (q, a2, b2) = pullback(&g, &f).unwrap();
        prop_assert_eq!(q.size, p.size);
        let mut left: Vec<(usize, usize)> = p.points().map(|z| (a.apply(z), b.apply(z))).collect();
        let mut right: Vec<(usize, usize)> = q.points().map(|z| (b2.apply(z), a2.apply(z))).collect();
        prop_assert!(left.windows(2).all(|w| w[0] < w[1]));
        left.sort_unstable();
        right.sort_unstable();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn smith_form_is_exact(rows in prop::collection::vec(prop::collection::vec(-12i64..12, 3), 1..4)) {
        let a = Matrix::from_rows(&rows).unwrap();
        let s = smith_normal_form(&a);
        prop_assert_eq!(s.u.mul(&a).mul(&s.v), s.d.clone());
        prop_assert_eq!(s.u.determinant().abs(), 1);
        prop_assert_eq!(s.v.determinant().abs(), 1);
        let diag = s.diagonal();
        prop_assert!(diag.iter().all(|&x| x >= 0));
        for w in diag.windows(2) {
            prop_assert!(w[1] == 0 || (w[0] != 0 && w[1] % w[0] == 0));
        }
        for r in 0..s.d.rows() {
            for c in 0..s.d.cols() {
                prop_assert!(r == c || s.d.get(r, c) == 0);
            }
        }
    }

    #[test]
    fn homs_from_free_modules((n, target) in prop::sample::select(vec![2i64, 3, 4, 6]).prop_flat_map(|n| (Just(n), zmod_module(n))), k in 0usize..3) {
        let ring = FiniteRing::zmod(n).unwrap();
        let free = free_module(&ring, &FiniteSpace::new(k));
        prop_assert_eq!(hom_count(&free.module, &target).unwrap(), Some(target.order().unwrap().pow(k as u32)));
    }

    #[test]
    fn dual_is_involutive(m in zmod_module(12)) {
        let d = pontryagin_dual(&m);
        prop_assert_eq!(d.order(), m.order());
        prop_assert_eq!(&pontryagin_dual(&d), &*m);
        prop_assert!(verify_evaluation(&m, 4096));
    }

    #[test]
    fn dual_over_group_algebra(m in kc2_module()) {
        prop_assert!(verify_evaluation(&m, 4096));
    }

    #[test]
    fn tensor_is_additive(a in zmod_module(4), b in zmod_module(4), n in zmod_module(4)) {
        let ring = FiniteRing::zmod(4).unwrap();
        let sum = direct_sum(&ring, &[a.clone(), b.clone()]).unwrap();
        let lhs = tensor(&sum.module, &n).unwrap().module;
        let parts = [tensor(&a, &n).unwrap().module, tensor(&b, &n).unwrap().module];
        let rhs = direct_sum(&ring, &parts).unwrap().module;
        prop_assert_eq!(lhs.factors(), rhs.factors());
    }

    #[test]
    fn tor_is_additive(i in 0usize..=3, a in kc2_module(), b in kc2_module()) {
        let ring = FiniteRing::group_algebra(2, FiniteGroup::cyclic(2)).unwrap();
        let n = Arc::new(FiniteModule::with_trivial_action(&ring, &[2]).unwrap());
        let sum = direct_sum(&ring, &[a.clone(), b.clone()]).unwrap();
        let lhs = tor(i, &sum.module, &n).unwrap().module;
        let parts = [tor(i, &a, &n).unwrap().module, tor(i, &b, &n).unwrap().module];
        let rhs = direct_sum(&lhs.ring().clone(), &parts).unwrap().module;
        prop_assert!(isomorphic(&lhs, &rhs));
    }

    #[test]
    fn induction_is_additive_and_keeps_free_modules_free(k in 0usize..=1, triv in 0usize..=1) {
        let s3 = Arc::new(FiniteGroup::symmetric(3));
        let t = (0..6).find(|&x| s3.element_order(x) == 2).unwrap();
        let incl = SubgroupInclusion::from_elements(&s3, &[s3.identity(), t]).unwrap();
        let small = FiniteRing::GroupAlgebra { n: 2, group: incl.sub().clone() };
        let k2 = FiniteRing::zmod(2).unwrap();
        let free = Arc::new(free_module_of_rank(&small, k));
        let ind = induce(&k2, &incl, &free).unwrap().module;
        let big_free = Arc::new(free_module_of_rank(ind.ring(), k));
        prop_assert!(isomorphic(&ind, &big_free));
        let other = Arc::new(FiniteModule::with_trivial_action(&small, &vec![2; triv]).unwrap());
        let sum = direct_sum(&small, &[free.clone(), other.clone()]).unwrap();
        let lhs = induce(&k2, &incl, &sum.module).unwrap().module;
        let rhs = direct_sum(ind.ring(), &[ind.clone(), induce(&k2, &incl, &other).unwrap().module]).unwrap().module;
        prop_assert!(isomorphic(&lhs, &rhs));
    }

    #[test]
    fn lifts_are_fibrewise(fibres in prop::collection::vec(zmod_module(4), 0..4)) {
        let ring = FiniteRing::zmod(4).unwrap();
        let b = ModuleBundle::new(ring.clone(), fibres).unwrap();
        let coeff = FiniteModule::with_trivial_action(&ring, &[2]).unwrap();
        for f in [FibrewiseFunctor::Tensor { coefficient: coeff.clone() }, FibrewiseFunctor::Tor { i: 1, coefficient: coeff.clone() }, FibrewiseFunctor::PontryaginDual] {
            let Bundle::Module(lifted) = lift_functor(&f, &Bundle::Module(b.clone())).unwrap() else { unreachable!() };
            for x in b.base().points() {
                let Fibre::Module(direct) = f.apply_object(&Fibre::Module(b.fibre(x).clone())).unwrap() else { unreachable!() };
                prop_assert_eq!(lifted.fibre(x), &direct);
            }
            // the coproduct of the lift against the functor on the coproduct
            let lhs = internal_coproduct_modules(&lifted).unwrap().module;
            let sum = internal_coproduct_modules(&b).unwrap().module;
            let Fibre::Module(rhs) = f.apply_object(&Fibre::Module(sum)).unwrap() else { unreachable!() };
            prop_assert!(isomorphic(&lhs, &rhs));
        }
    }

    #[test]
    fn bundle_maps_compose_and_have_fibrewise_kernels(fibres in prop::collection::vec(zmod_module(4), 1..4), scale in 0i64..4) {
        let ring = FiniteRing::zmod(4).unwrap();
        let b = ModuleBundle::new(ring, fibres).unwrap();
        let homs: Vec<ModuleHom> = b.fibres().iter().map(|m| {
            let mat = Matrix::diagonal(&vec![scale; m.rank()]).reduced_rows(m.factors());
            ModuleHom::new(m.clone(), m.clone(), mat).unwrap()
        }).collect();
        let f = ModuleBundleMap::new(b.clone(), b.clone(), SpaceMap::identity(b.base()), homs).unwrap();
        let ff = f.then(&f).unwrap();
        for x in b.base().points() {
            prop_assert_eq!(&ff.homs[x], &f.homs[x].then(&f.homs[x]).unwrap());
        }
        let k = f.kernel().unwrap();
        let c = f.cokernel().unwrap();
        for x in b.base().points() {
            let (ko, co) = (k.source.fibre(x).order().unwrap(), c.target.fibre(x).order().unwrap());
            prop_assert_eq!(ko, co);
            prop_assert!(k.homs[x].then(&f.homs[x]).unwrap().matrix().is_zero() || k.source.fibre(x).is_zero());
        }
    }

    #[test]
    fn restriction_commutes_with_sums_exactly(k in 0usize..=2, triv in 0usize..=2) {
        let s3 = Arc::new(FiniteGroup::symmetric(3));
        let t = (0..6).find(|&x| s3.element_order(x) == 2).unwrap();
        let incl = SubgroupInclusion::from_elements(&s3, &[s3.identity(), t]).unwrap();
        let big = FiniteRing::GroupAlgebra { n: 3, group: s3.clone() };
        let parts = vec![Arc::new(free_module_of_rank(&big, k)), Arc::new(FiniteModule::with_trivial_action(&big, &vec![3; triv]).unwrap())];
        let sum = direct_sum(&big, &parts).unwrap().module;
        let lhs = restrict(&incl, &sum).unwrap();
        let res: Vec<Arc<FiniteModule>> = parts.iter().map(|p| Arc::new(restrict(&incl, p).unwrap())).collect();
        let rhs = direct_sum(lhs.ring(), &res).unwrap().module;
        prop_assert_eq!(&lhs, &*rhs);
    }

    #[test]
    fn postcomposition_is_functorial(a in small_group(), b in small_group(), t in small_group()) {
        let bundle = GroupBundle::new(vec![a, b]);
        let p = internal_coproduct_groups(&bundle);
        let homs = p.homs_to(&t);
        prop_assert_eq!(homs.len() as u128, p.count_homs_to(&t));
        let c2 = Arc::new(FiniteGroup::cyclic(2));
        for u in enumerate_homs_arc(&t, &c2) {
            for tuple in &homs {
                prop_assert!(p.accepts(&postcompose(tuple, &u).unwrap()));
            }
        }
    }

    #[test]
    fn discrete_colimits_are_coproducts(fibres in prop::collection::vec(small_group(), 0..3), t in small_group()) {
        let x = FiniteSpace::new(fibres.len());
        let bundle = GroupBundle::new(fibres.clone());
        let cat = discrete_category(x);
        let maps = fibres.iter().map(|g| GroupHom::identity(g.clone())).collect();
        let d = InternalGroupDiagram::new(cat.clone(), bundle.clone(), maps).unwrap();
        let colim = colimit_via_coequaliser(&cat, &d).unwrap();
        prop_assert_eq!(colim.homs_to(&t), internal_coproduct_groups(&bundle).homs_to(&t));
    }

    #[test]
    fn tower_truncation_commutes_with_lifts(depth in 0usize..4, n in prop::sample::select(vec![2i64, 3])) {
        let grow = Tower::from_family(TowerFamily::Growing, 4).unwrap();
        let f = FibrewiseFunctor::FreeModule { ring: FiniteRing::zmod(n).unwrap() };
        let a = extend_functor_levelwise(&f, &grow.truncate(depth).unwrap()).unwrap();
        let b = extend_functor_levelwise(&f, &grow).unwrap().truncate(depth).unwrap();
        for d in 0..=depth {
            prop_assert_eq!(a.level(d).unwrap(), b.level(d).unwrap());
        }
        for d in 0..depth {
            prop_assert_eq!(a.transition(d).unwrap(), b.transition(d).unwrap());
        }
    }
}
