//! Worked examples checked against brute-force enumeration written
//! independently of the library's search code.

use bundlecalc_core::bundle::*;
use bundlecalc_core::fingroup::*;
use bundlecalc_core::finmod::*;
use bundlecalc_core::finspace::*;
use bundlecalc_core::internalcat::*;
use bundlecalc_core::matrix::{smith_normal_form, Matrix};
use bundlecalc_core::protower::*;
use std::sync::Arc;

fn g(spec: &str) -> Arc<FiniteGroup> {
    Arc::new(FiniteGroup::from_spec(spec).unwrap())
}

fn zmod(n: i64) -> FiniteRing {
    FiniteRing::zmod(n).unwrap()
}

fn cyclic_module(ring: &FiniteRing, factors: &[i64]) -> Arc<FiniteModule> {
    Arc::new(FiniteModule::with_trivial_action(ring, factors).unwrap())
}

/// Every function `0..n -> 0..m` as a value vector.
fn all_functions(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v| (0..m).map(move |y| [v.clone(), vec![y]].concat())).collect();
    }
    out
}

/// Value tables of all homomorphisms: a depth-first search over value
/// tables that assigns elements in index order and rejects a partial table
/// as soon as some product of assigned elements is inconsistent.
fn brute_homs(a: &FiniteGroup, t: &FiniteGroup) -> Vec<Vec<usize>> {
    fn extend(a: &FiniteGroup, t: &FiniteGroup, f: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let k = f.len();
        if k == a.order() {
            out.push(f.clone());
            return;
        }
        for y in t.elements() {
            f.push(y);
            let consistent = (0..=k).all(|x| {
                [(x, k), (k, x)].iter().all(|&(p, q)| {
                    let r = a.mul(p, q);
                    r > k || f[r] == t.mul(f[p], f[q])
                })
            });
            if consistent {
                extend(a, t, f, out);
            }
            f.pop();
        }
    }
    let mut out = Vec::new();
    extend(a, t, &mut Vec::new(), &mut out);
    out
}

/// Module homomorphisms by trying every image of each canonical generator.
fn brute_module_homs(m: &FiniteModule, n: &FiniteModule) -> usize {
    let elems: Vec<Vec<i64>> = n.elements().collect();
    let group_elems: Vec<usize> = m.ring().group().map_or(vec![0], |g| g.elements().collect());
    let mut count = 0;
    for choice in all_functions(m.rank(), elems.len()) {
        let images: Vec<&Vec<i64>> = choice.iter().map(|&c| &elems[c]).collect();
        let image_of = |v: &[i64]| {
            let mut out = vec![0i64; n.rank()];
            for (i, &c) in v.iter().enumerate() {
                for j in 0..n.rank() {
                    out[j] += c * images[i][j];
                }
            }
            for j in 0..n.rank() {
                out[j] = out[j].rem_euclid(n.factors()[j]);
            }
            out
        };
        let well_defined = m.factors().iter().enumerate().all(|(i, &d)| images[i].iter().zip(n.factors()).all(|(&x, &e)| (x * d) % e == 0));
        if !well_defined {
            continue;
        }
        let equivariant = m.ring().group().is_none()
            || group_elems.iter().all(|&s| {
                (0..m.rank()).all(|i| {
                    let mut e = vec![0; m.rank()];
                    e[i] = 1;
                    image_of(&m.act(s, &e)) == n.act(s, &image_of(&e))
                })
            });
        if equivariant {
            count += 1;
        }
    }
    count
}

#[test]
fn hom_enumeration_examples() {
    assert_eq!(count_homs(&g("C2"), &g("S3")), 4);
    assert_eq!(brute_homs(&g("C2"), &g("S3")).len(), 4);
    for spec in ["C5", "S3", "Q8", "C2xC2"] {
        assert_eq!(count_homs(&g(spec), &g("1")), 1);
    }
    assert_eq!(count_homs(&g("C3"), &g("C3")), 3);
    assert_eq!(brute_homs(&g("C3"), &g("C3")).len(), 3);
}

#[test]
fn hom_enumeration_matches_brute_force_on_small_groups() {
    let groups: Vec<Arc<FiniteGroup>> = builtin_catalog(6).into_iter().map(|(_, g)| Arc::new(g)).collect();
    for a in &groups {
        for t in &groups {
            let mut fast: Vec<Vec<usize>> = enumerate_homs(a, t).iter().map(|h| h.values().to_vec()).collect();
            let mut slow = brute_homs(a, t);
            fast.sort();
            slow.sort();
            assert_eq!(fast, slow);
        }
    }
}

#[test]
fn abelianisation_examples() {
    assert_eq!(abelianisation(&g("S3")).0.order(), 2);
    let (q8ab, _) = abelianisation(&g("Q8"));
    assert!(is_isomorphic(&q8ab, &g("C2xC2")));
    let (c6ab, q) = abelianisation(&g("C6"));
    assert_eq!(c6ab.order(), 6);
    assert!(q.is_bijective());
}

#[test]
fn abelianisation_factorisation_by_counting() {
    for spec in ["S3", "D4", "Q8", "C2xC4"] {
        let grp = g(spec);
        let (ab, q) = abelianisation(&grp);
        for (_, t) in abelian_groups_up_to(8) {
            let composites: std::collections::BTreeSet<Vec<usize>> =
                brute_homs(&ab, &t).into_iter().map(|phi| grp.elements().map(|x| phi[q.apply(x)]).collect()).collect();
            let direct: std::collections::BTreeSet<Vec<usize>> = brute_homs(&grp, &t).into_iter().collect();
            assert_eq!(composites, direct, "{spec}");
        }
    }
}

#[test]
fn coequaliser_examples() {
    let s3 = g("S3");
    let c2 = g("C2");
    let t = (0..6).find(|&x| s3.element_order(x) == 2).unwrap();
    let phi = GroupHom::new(c2.clone(), s3.clone(), vec![s3.identity(), t]).unwrap();
    let psi = GroupHom::trivial(c2.clone(), s3.clone());
    assert_eq!(coequaliser(&phi, &psi).unwrap().0.order(), 1);
    let (same, q) = coequaliser(&phi, &phi).unwrap();
    assert_eq!(same.order(), 6);
    assert!(q.is_bijective());
    let one = g("1");
    let (c, _) = coequaliser(&GroupHom::trivial(one.clone(), s3.clone()), &GroupHom::trivial(one, s3.clone())).unwrap();
    assert_eq!(c.order(), 6);
    assert!(coequaliser(&phi, &GroupHom::trivial(g("C3"), s3)).is_err());
}

#[test]
fn coequaliser_universal_property_by_counting() {
    let d4 = g("D4");
    let c2 = g("C2");
    for phi in enumerate_homs(&c2, &d4) {
        for psi in enumerate_homs(&c2, &d4) {
            let (c, _) = coequaliser(&phi, &psi).unwrap();
            for spec in ["C2", "C4", "S3", "C2xC2"] {
                let t = g(spec);
                let equalising =
                    brute_homs(&d4, &t).into_iter().filter(|h| c2.elements().all(|x| h[phi.apply(x)] == h[psi.apply(x)])).count();
                assert_eq!(equalising, count_homs(&c, &t));
            }
        }
    }
}

#[test]
fn quotient_examples() {
    let c4 = g("C4");
    assert_eq!(quotient_by_normal_closure(&c4, &[c4.identity()]).0.order(), 4);
    let two = (0..4).find(|&x| c4.element_order(x) == 2).unwrap();
    assert!(is_isomorphic(&quotient_by_normal_closure(&c4, &[two]).0, &g("C2")));
    let s3 = g("S3");
    let three = (0..6).find(|&x| s3.element_order(x) == 3).unwrap();
    assert!(is_isomorphic(&quotient_by_normal_closure(&s3, &[three]).0, &g("C2")));
}

#[test]
fn pullback_and_fibre_examples() {
    let pt = FiniteSpace::point();
    let (p, _, _) = pullback(&SpaceMap::to_point(FiniteSpace::new(2)), &SpaceMap::to_point(FiniteSpace::new(3))).unwrap();
    assert_eq!(p.size, 6);
    let f = SpaceMap::new(FiniteSpace::new(2), FiniteSpace::new(2), vec![0, 1]).unwrap();
    let h = SpaceMap::new(FiniteSpace::new(1), FiniteSpace::new(2), vec![0]).unwrap();
    let (p, a, b) = pullback(&f, &h).unwrap();
    let brute: Vec<(usize, usize)> = (0..2).flat_map(|x| (0..1).map(move |y| (x, y))).filter(|&(x, y)| f.apply(x) == h.apply(y)).collect();
    assert_eq!(p.size, brute.len());
    assert_eq!((a.apply(0), b.apply(0)), brute[0]);
    assert!(pullback(&f, &SpaceMap::to_point(pt)).is_err());

    assert_eq!(fibre(&SpaceMap::to_point(FiniteSpace::new(3)), 0).unwrap(), vec![0, 1, 2]);
    assert_eq!(fibre(&SpaceMap::identity(FiniteSpace::new(4)), 2).unwrap(), vec![2]);
    let p = SpaceMap::new(FiniteSpace::new(3), FiniteSpace::new(2), vec![0, 1, 0]).unwrap();
    let scan: Vec<usize> = (0..3).filter(|&x| p.apply(x) == 0).collect();
    assert_eq!(fibre(&p, 0).unwrap(), scan);
    assert!(fibre(&p, 2).is_err());
}

#[test]
fn smith_form_example() {
    let a = Matrix::diagonal(&[2, 3]);
    let s = smith_normal_form(&a);
    assert_eq!(s.diagonal(), vec![1, 6]);
    assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
}

#[test]
fn module_examples() {
    let z4 = zmod(4);
    let z2 = cyclic_module(&z4, &[2]);
    let free = free_module(&z4, &FiniteSpace::new(2));
    assert_eq!(hom_count(&free.module, &z2).unwrap(), Some(4));
    assert_eq!(brute_module_homs(&free.module, &z2), 4);

    let sum = direct_sum(&z4, &[z2.clone(), cyclic_module(&z4, &[4])]).unwrap();
    assert_eq!(sum.module.factors(), &[2, 4]);

    assert_eq!(tensor(&z2, &z2).unwrap().module.factors(), &[2]);
    let z6 = zmod(6);
    assert!(tensor(&cyclic_module(&z6, &[2]), &cyclic_module(&z6, &[3])).unwrap().module.is_zero());

    assert_eq!(tor(1, &z2, &z2).unwrap().module.factors(), &[2]);

    let m = cyclic_module(&z4, &[2, 4]);
    let dual = pontryagin_dual(&m);
    assert_eq!(dual.order(), Some(8));
    assert_eq!(dual.factors(), &[2, 4]);
    // characters into Q/Z land in Z/4 here
    assert_eq!(brute_module_homs(&m, &cyclic_module(&z4, &[4])), 8);
}

#[test]
fn module_hom_counts_match_brute_force() {
    let kc2 = FiniteRing::group_algebra(2, FiniteGroup::cyclic(2)).unwrap();
    let z6 = zmod(6);
    let cases: Vec<(Arc<FiniteModule>, Arc<FiniteModule>)> = vec![
        (cyclic_module(&z6, &[2, 6]), cyclic_module(&z6, &[3, 6])),
        (cyclic_module(&zmod(4), &[2, 4]), cyclic_module(&zmod(4), &[2, 2])),
        (Arc::new(free_module_of_rank(&kc2, 1)), cyclic_module(&kc2, &[2, 2])),
        (cyclic_module(&kc2, &[2]), Arc::new(free_module_of_rank(&kc2, 2))),
    ];
    for (m, n) in cases {
        assert_eq!(HomSet::compute(&m, &n).unwrap().count(), Some(brute_module_homs(&m, &n) as u128));
    }
}

/// `|Hom(M ⊗ N, Q)|` equals the number of bilinear maps `M × N -> Q`,
/// counted by choosing a value on each pair of generators.
#[test]
fn tensor_matches_bilinear_maps() {
    let z12 = zmod(12);
    let shapes: [&[i64]; 4] = [&[2], &[4], &[2, 6], &[3, 12]];
    let q = cyclic_module(&z12, &[12]);
    let q_elems: Vec<i64> = (0..12).collect();
    for a in shapes {
        for b in shapes {
            let (m, n) = (cyclic_module(&z12, a), cyclic_module(&z12, b));
            let t = tensor(&m, &n).unwrap();
            let pairs: Vec<(i64, i64)> = a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).collect();
            let bilinear: usize =
                pairs.iter().map(|&(x, y)| q_elems.iter().filter(|&&v| (v * x) % 12 == 0 && (v * y) % 12 == 0).count()).product();
            assert_eq!(hom_count(&t.module, &q).unwrap(), Some(bilinear as u128), "{a:?} {b:?}");
        }
    }
}

#[test]
fn induction_example() {
    let s3 = g("S3");
    let t = (0..6).find(|&x| s3.element_order(x) == 2).unwrap();
    let incl = SubgroupInclusion::from_elements(&s3, &[s3.identity(), t]).unwrap();
    let ring = FiniteRing::GroupAlgebra { n: 2, group: incl.sub().clone() };
    let k = cyclic_module(&ring, &[2]);
    assert_eq!(induce(&zmod(2), &incl, &k).unwrap().module.order(), Some(8));
}

#[test]
fn bundle_examples() {
    let ring = zmod(2);
    let y = SpaceBundle::new(SpaceMap::from_fibre_sizes(&[1, 2]));
    let (total, sum, map) = free_coproduct_comparison(&ring, &y).unwrap();
    assert_eq!(total.order(), Some(8));
    assert_eq!(sum.module.order(), Some(8));
    assert!(map.is_bijective() && map.is_equivariant());

    let b = GroupBundle::new(vec![g("C2"), g("C3")]);
    let c6 = g("C6");
    let tuples = internal_coproduct_groups(&b).homs_to(&c6);
    let brute = brute_homs(&g("C2"), &c6).len() * brute_homs(&g("C3"), &c6).len();
    assert_eq!(tuples.len(), 6);
    assert_eq!(brute, 6);

    let lifted = lift_functor(&FibrewiseFunctor::Abelianisation, &Bundle::Group(GroupBundle::new(vec![g("S3"), g("C4")]))).unwrap();
    let Bundle::Group(l) = lifted else { panic!() };
    assert!(is_isomorphic(l.fibre(0), &g("C2")));
    assert!(is_isomorphic(l.fibre(1), &g("C4")));

    let z4 = zmod(4);
    let mb = ModuleBundle::new(z4.clone(), vec![cyclic_module(&z4, &[2]), cyclic_module(&z4, &[2, 4])]).unwrap();
    let dd = dualise_bundle(&dualise_bundle(&mb));
    for x in 0..2 {
        assert!(verify_evaluation(mb.fibre(x), usize::MAX));
        assert_eq!(dd.fibre(x), mb.fibre(x));
    }
}

#[test]
fn colimit_examples() {
    let one = g("1");
    let (c2, c3, s3) = (g("C2"), g("C3"), g("S3"));
    let diagram = InternalGroupDiagram::new(
        FiniteInternalCategory::span(),
        GroupBundle::new(vec![one.clone(), c2.clone(), c3.clone()]),
        vec![
            GroupHom::identity(one.clone()),
            GroupHom::identity(c2.clone()),
            GroupHom::identity(c3.clone()),
            GroupHom::trivial(one.clone(), c2.clone()),
            GroupHom::trivial(one.clone(), c3.clone()),
        ],
    )
    .unwrap();
    let colim = colimit_via_coequaliser(diagram.category(), &diagram).unwrap();
    let brute = brute_homs(&c2, &s3).len() * brute_homs(&c3, &s3).len();
    assert_eq!(brute, 12);
    assert_eq!(colim.homs_to(&s3).len(), brute);

    // C2 inside C4 and inside C6, into C2: brute force over all triples
    let (c4, c6) = (g("C4"), g("C6"));
    let into = |big: &Arc<FiniteGroup>| {
        let t = (0..big.order()).find(|&x| big.element_order(x) == 2).unwrap();
        GroupHom::new(c2.clone(), big.clone(), vec![big.identity(), t]).unwrap()
    };
    let (t1, t2) = (into(&c4), into(&c6));
    let mut triples = 0;
    for b0 in brute_homs(&c2, &c2) {
        for b1 in brute_homs(&c4, &c2) {
            for b2 in brute_homs(&c6, &c2) {
                if (0..2).all(|h| b1[t1.apply(h)] == b0[h] && b2[t2.apply(h)] == b0[h]) {
                    triples += 1;
                }
            }
        }
    }
    assert_eq!(triples, 2);
    let d = AmalgamData::new(c2.clone(), vec![t1, t2]).unwrap();
    assert_eq!(amalgam_homs(&d, &c2).len(), triples);
}

#[test]
fn tower_and_adjunction_examples() {
    let chain = Tower::from_family(TowerFamily::ZmodChain { base: 2 }, 2).unwrap();
    let rows = tower_limit_fingerprint(&chain, &[Probe::Group(g("C2"))], 2).unwrap();
    assert_eq!(rows[0].counts, vec![2, 2, 2]);

    let z4 = zmod(4);
    let z2 = cyclic_module(&z4, &[2]);
    let free = free_module(&z4, &FiniteSpace::new(2));
    let r = check_relative_adjunction(&RelativeAdjunctionSpec::FreeForget { ring: z4 }, &[AdjunctionSample::Set { c: 2, d: z2.clone() }])
        .unwrap();
    assert_eq!(r[0].left_count, brute_module_homs(&free.module, &z2) as u128);
    assert_eq!(r[0].right_count, all_functions(2, 2).len() as u128);
    assert!(r[0].bijective);

    let r =
        check_relative_adjunction(&RelativeAdjunctionSpec::AbelianisationInclusion, &[AdjunctionSample::Group { c: g("S3"), d: g("C2") }])
            .unwrap();
    assert_eq!(r[0].left_count, brute_homs(&g("C2"), &g("C2")).len() as u128);
    assert_eq!(r[0].right_count, brute_homs(&g("S3"), &g("C2")).len() as u128);
    assert!(r[0].bijective);
}
