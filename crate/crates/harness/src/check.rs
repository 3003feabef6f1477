//! One checker per theorem.
//!
//! A pass always carries an explicit witness: comparison isomorphisms, or
//! bijections between Hom-sets against each test object. A fail carries the
//! mismatch and a payload minimized by dropping base points.

use crate::error::{HarnessError, Result};
use crate::instance::{discrete_diagram, CheckInstance, Payload, Shape};
use crate::probes::{abelian_probes, default_probes, Probe};
use crate::report::{Counterexample, NamedIso, ProbeBijection, Report, SamplePair, Verdict, Witness};
use crate::theorem::TheoremId;
use bundlecalc_core::bundle::{
    dualise_map, free_coproduct_comparison, internal_coproduct_groups, GroupBundle, HomTuple, ModuleBundle, ModuleBundleMap, SpaceBundle,
};
use bundlecalc_core::error::Error as CoreError;
use bundlecalc_core::fingroup::{abelian_coordinates, abelianisation, coequaliser, count_homs, enumerate_homs_arc, FiniteGroup, GroupHom};
use bundlecalc_core::finmod::{
    direct_sum, dual_hom, evaluation_map, free_module, induce, pontryagin_dual, restrict, restrict_hom, tensor, tor, verify_evaluation,
    DirectSum, FiniteModule, FiniteRing, HomSet, ModuleHom, SubgroupInclusion,
};
use bundlecalc_core::finspace::FiniteSpace;
use bundlecalc_core::internalcat::{amalgam_homs, colimit_via_coequaliser, pushout_with_surjective_leg, AmalgamData, InternalGroupDiagram};
use bundlecalc_core::matrix::Matrix;
use bundlecalc_core::protower::{
    check_adjunction_naturality, check_four_square, check_relative_adjunction, AdjunctionSample, RelativeAdjunctionSpec,
};
use serde_json::json;
use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;
use std::time::Instant;

/// Hom-sets up to this size are enumerated and compared element by element.
pub const ENUMERATION_BUDGET: u128 = 1 << 16;
/// Samples kept in a witness per test object.
const SAMPLES: usize = 2;

/// Verdict and witness, before minimization and packaging.
enum Outcome {
    Pass(Witness),
    Fail(Mismatch),
    Inconclusive(String),
}

struct Mismatch {
    reason: String,
    probe: Option<String>,
    left: Option<serde_json::Value>,
    right: Option<serde_json::Value>,
}

fn mismatch(reason: impl Into<String>) -> Outcome {
    Outcome::Fail(Mismatch { reason: reason.into(), probe: None, left: None, right: None })
}

fn unequal(reason: impl Into<String>, probe: Option<&str>, left: serde_json::Value, right: serde_json::Value) -> Outcome {
    Outcome::Fail(Mismatch { reason: reason.into(), probe: probe.map(str::to_string), left: Some(left), right: Some(right) })
}

/// Options that do not affect verdicts.
#[derive(Clone, Copy, Debug, Default)]
pub struct CheckOptions {
    /// Record wall-clock time in `timing_ms`. Off by default so reports are
    /// byte-identical across runs.
    pub timing: bool,
}

/// Checks `theorem` on `instance`.
pub fn check(theorem: TheoremId, instance: &CheckInstance) -> Result<Report> {
    check_with(theorem, instance, CheckOptions::default())
}

pub fn check_with(theorem: TheoremId, instance: &CheckInstance, options: CheckOptions) -> Result<Report> {
    if theorem != instance.theorem || !instance.payload.fits(theorem) {
        return Err(HarnessError::InstanceMismatch {
            theorem: theorem.to_string(),
            instance: format!("{} ({})", instance.theorem, instance.payload.kind()),
        });
    }
    let start = Instant::now();
    let (verdict, witness) = match evaluate(theorem, &instance.payload, instance) {
        Outcome::Pass(w) => (Verdict::Pass, w),
        Outcome::Inconclusive(what) => (Verdict::Inconclusive, Witness::Budget { what }),
        Outcome::Fail(m) => {
            let (payload, m) = minimize(instance.payload.clone(), m, |p| evaluate(theorem, p, instance));
            let c = Counterexample { reason: m.reason, probe: m.probe, left: m.left, right: m.right, instance: payload };
            (Verdict::Fail, Witness::Counterexample(Box::new(c)))
        }
    };
    Ok(Report {
        theorem,
        seed: instance.seed,
        verdict,
        witness,
        timing_ms: options.timing.then(|| start.elapsed().as_millis() as u64),
        instance: instance.digest(),
    })
}

/// Greedy fibre removal: drop base points one at a time while the check
/// still fails.
fn minimize(mut payload: Payload, mut m: Mismatch, evaluate: impl Fn(&Payload) -> Outcome) -> (Payload, Mismatch) {
    let mut x = 0;
    while let Some(n) = payload.base_size() {
        if x >= n {
            break;
        }
        match payload.without_point(x).map(|p| (evaluate(&p), p)) {
            Some((Outcome::Fail(smaller), p)) => {
                payload = p;
                m = smaller;
            }
            _ => x += 1,
        }
    }
    (payload, m)
}

fn evaluate(theorem: TheoremId, payload: &Payload, instance: &CheckInstance) -> Outcome {
    let test_order = instance.bounds.max_test_order;
    let result = match payload {
        Payload::GroupBundle { bundle } if theorem == TheoremId::AbelianisationCoproduct => abelianisation_coproduct(bundle, test_order),
        Payload::GroupBundle { bundle } => discrete_colimit(bundle, test_order),
        Payload::FreeModule { ring, bundle } => free_module_coproduct(ring, bundle),
        Payload::Tensor { bundle, coefficient } => tensor_coproduct(bundle, coefficient),
        Payload::Tor { degree, bundle, coefficient } => tor_coproduct(*degree, bundle, coefficient),
        Payload::Induction { inclusion, bundle } => induction_coproduct(inclusion, bundle),
        Payload::Restriction { inclusion, bundle } => restriction_coproduct(inclusion, bundle),
        Payload::Involution { bundle, samples } => {
            duality_involution(bundle, &samples.iter().map(|s| (s.from, s.to, s.map.clone())).collect::<Vec<_>>())
        }
        Payload::Equivalence { source, target, base_map } => duality_equivalence(source, target, base_map),
        Payload::Diagram { shape, diagram } => colimit_coequaliser(*shape, diagram, test_order),
        Payload::Amalgam { amalgam } => amalgam_colimit(amalgam, test_order),
        Payload::Adjunction { spec, sample, naturality } => relative_adjunction(spec, sample, naturality.as_ref()),
        Payload::FourSquare { ring, bundle, module } => four_square(ring, bundle, module),
    };
    match result {
        Ok(o) => o,
        Err(CoreError::TooLarge(what)) => Outcome::Inconclusive(what),
        Err(e) => mismatch(format!("computation failed: {e}")),
    }
}

type CoreResult<T> = std::result::Result<T, CoreError>;

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: i64, b: i64) -> i64 {
    a / gcd(a, b) * b
}

fn values(h: &GroupHom) -> Vec<i64> {
    h.values().iter().map(|&v| v as i64).collect()
}

fn tuple_values(t: &[GroupHom]) -> Vec<Vec<i64>> {
    t.iter().map(values).collect()
}

/// `Σ_x proj_x ; maps[x]`, the map out of a direct sum with the given
/// restrictions to the summands, revalidated as a homomorphism.
fn out_of_sum(sum: &DirectSum, maps: &[ModuleHom], target: &Arc<FiniteModule>) -> CoreResult<ModuleHom> {
    let mut total = ModuleHom::zero(sum.module.clone(), target.clone());
    for (p, m) in sum.projections.iter().zip(maps) {
        total = total.add(&p.then(m)?)?;
    }
    ModuleHom::new(total.domain().clone(), total.codomain().clone(), total.matrix().clone())
}

fn iso_outcome(label: &str, map: ModuleHom) -> Outcome {
    let (dom, cod) = (map.domain().factors().to_vec(), map.codomain().factors().to_vec());
    if dom != cod {
        return unequal(format!("{label}: invariant factors differ"), None, json!(dom), json!(cod));
    }
    if !map.is_bijective() {
        return unequal(format!("{label}: comparison map is not bijective"), None, json!(dom), json!(map.matrix().to_rows()));
    }
    Outcome::Pass(Witness::Isomorphisms { maps: vec![NamedIso { label: label.to_string(), map }], naturality_squares: 0 })
}

// --- abelianisation ---------------------------------------------------------

struct AbFibre {
    group: Arc<FiniteGroup>,
    quotient: GroupHom,
    coords: bundlecalc_core::fingroup::AbelianCoordinates,
    /// An element of `G` over each canonical generator of `G^ab`.
    lifts: Vec<usize>,
}

fn abelianisation_coproduct(bundle: &GroupBundle, test_order: usize) -> CoreResult<Outcome> {
    let fibres: Vec<AbFibre> = bundle
        .fibres()
        .iter()
        .map(|g| {
            let (ab, q) = abelianisation(g);
            let coords = abelian_coordinates(&ab).expect("abelianisation is abelian");
            let lifts = coords.basis.iter().map(|&b| g.elements().find(|&x| q.apply(x) == b).expect("quotient is onto")).collect();
            AbFibre { group: g.clone(), quotient: q, coords, lifts }
        })
        .collect();
    let coproduct = internal_coproduct_groups(bundle);
    let mut witnesses = Vec::new();
    for Probe { name, group: t } in abelian_probes(test_order) {
        let ct = abelian_coordinates(&t).expect("abelian probe");
        let m = fibres.iter().fold(ct.group.exponent().max(2), |acc, f| lcm(acc, f.coords.group.exponent().max(1)));
        let ring = FiniteRing::zmod(m)?;
        let target = Arc::new(FiniteModule::with_trivial_action(&ring, ct.group.factors())?);
        let parts: Vec<Arc<FiniteModule>> = fibres
            .iter()
            .map(|f| FiniteModule::with_trivial_action(&ring, f.coords.group.factors()).map(Arc::new))
            .collect::<CoreResult<_>>()?;
        let sum = direct_sum(&ring, &parts)?;

        // per fibre: α ↦ the matrix of the map G^ab -> T it factors through
        let mut transposes: Vec<Vec<(GroupHom, ModuleHom)>> = Vec::new();
        for (f, part) in fibres.iter().zip(&parts) {
            let homs = enumerate_homs_arc(&f.group, &t);
            let mut seen = HashSet::new();
            let mut list = Vec::new();
            for alpha in homs {
                let cols: Vec<Vec<i64>> = f.lifts.iter().map(|&g| ct.coords[alpha.apply(g)].clone()).collect();
                let matrix = Matrix::from_columns(target.rank(), &cols);
                let Ok(phi) = ModuleHom::new(part.clone(), target.clone(), matrix) else {
                    return Ok(unequal(
                        "a homomorphism does not factor through the abelianisation",
                        Some(&name),
                        json!(values(&alpha)),
                        json!(cols),
                    ));
                };
                let factors = f.group.elements().all(|g| phi.apply(&f.coords.coords[f.quotient.apply(g)]) == ct.coords[alpha.apply(g)]);
                if !factors {
                    return Ok(unequal(
                        "transpose does not recover the homomorphism",
                        Some(&name),
                        json!(values(&alpha)),
                        json!(phi.matrix().to_rows()),
                    ));
                }
                if !seen.insert(phi.matrix().to_rows()) {
                    return Ok(unequal(
                        "two homomorphisms have the same transpose",
                        Some(&name),
                        json!(values(&alpha)),
                        json!(phi.matrix().to_rows()),
                    ));
                }
                list.push((alpha, phi));
            }
            let count = HomSet::compute(part, &target)?.count().expect("finite");
            if list.len() as u128 != count {
                return Ok(unequal("Hom(G, T) and Hom(G^ab, T) differ in size", Some(&name), json!(list.len()), json!(count)));
            }
            transposes.push(list);
        }

        let left = coproduct.count_homs_to(&t);
        let right = HomSet::compute(&sum.module, &target)?.count().expect("finite");
        let product: u128 = transposes.iter().map(|l| l.len() as u128).product();
        if left != right || left != product {
            return Ok(unequal("Hom-set sizes differ", Some(&name), json!(left.to_string()), json!(right.to_string())));
        }

        let assemble = |tuple: &[&(GroupHom, ModuleHom)]| -> CoreResult<std::result::Result<SamplePair, Outcome>> {
            let blocks: Vec<ModuleHom> = tuple.iter().map(|(_, phi)| phi.clone()).collect();
            let total = out_of_sum(&sum, &blocks, &target)?;
            for (inj, phi) in sum.injections.iter().zip(&blocks) {
                if inj.then(&total)?.matrix() != phi.matrix() {
                    return Ok(Err(unequal(
                        "assembled map does not restrict to the fibre maps",
                        Some(&name),
                        json!(phi.matrix().to_rows()),
                        json!(total.matrix().to_rows()),
                    )));
                }
            }
            Ok(Ok(SamplePair { left: tuple.iter().map(|(a, _)| values(a)).collect(), right: total.matrix().to_rows() }))
        };

        let mut sample = Vec::new();
        let certified = if left <= ENUMERATION_BUDGET {
            let mut images = HashSet::new();
            for tuple in coproduct.homs_to(&t) {
                let chosen: Vec<&(GroupHom, ModuleHom)> = tuple
                    .iter()
                    .zip(&transposes)
                    .map(|(alpha, list)| {
                        list.iter().find(|(a, _)| a.values() == alpha.values()).expect("every component is a homomorphism")
                    })
                    .collect();
                match assemble(&chosen)? {
                    Ok(pair) => {
                        if !images.insert(pair.right.clone()) {
                            return Ok(unequal("two tuples assemble to the same map", Some(&name), json!(pair.left), json!(pair.right)));
                        }
                        if sample.len() < SAMPLES {
                            sample.push(pair);
                        }
                    }
                    Err(o) => return Ok(o),
                }
            }
            if images.len() as u128 != right {
                return Ok(unequal(
                    "enumerated tuples do not exhaust the Hom-set",
                    Some(&name),
                    json!(images.len()),
                    json!(right.to_string()),
                ));
            }
            "enumerated"
        } else {
            for k in 0..SAMPLES {
                let chosen: Vec<&(GroupHom, ModuleHom)> = transposes.iter().map(|l| &l[(k * 7 + 1) % l.len()]).collect();
                match assemble(&chosen)? {
                    Ok(pair) => sample.push(pair),
                    Err(o) => return Ok(o),
                }
            }
            "blockwise"
        };
        witnesses.push(ProbeBijection { probe: name, left, right, certified: certified.into(), sample });
    }
    Ok(Outcome::Pass(Witness::HomBijections { probes: witnesses }))
}

// --- module coproducts ------------------------------------------------------

fn free_module_coproduct(ring: &FiniteRing, bundle: &SpaceBundle) -> CoreResult<Outcome> {
    let (_, sum, map) = free_coproduct_comparison(ring, bundle)?;
    let map = ModuleHom::new(map.domain().clone(), map.codomain().clone(), map.matrix().clone())?;
    let total = free_module(ring, &bundle.total());
    for x in bundle.base().points() {
        let fibre = bundle.fibre(x);
        let local = free_module(ring, &FiniteSpace::new(fibre.len()));
        for (j, &y) in fibre.iter().enumerate() {
            let expected = sum.injections[x].apply(&local.basis[j]);
            if map.apply(&total.basis[y]) != expected {
                return Ok(unequal(
                    format!("basis element {y} is not sent to its fibre summand"),
                    None,
                    json!(map.apply(&total.basis[y])),
                    json!(expected),
                ));
            }
        }
    }
    Ok(iso_outcome("R[Y] -> sum_x R[Y(x)]", map))
}

fn tensor_coproduct(bundle: &ModuleBundle, n: &Arc<FiniteModule>) -> CoreResult<Outcome> {
    let sum = direct_sum(bundle.ring(), bundle.fibres())?;
    let whole = tensor(&sum.module, n)?;
    let parts = bundle.fibres().iter().map(|m| tensor(m, n)).collect::<CoreResult<Vec<_>>>()?;
    let id = ModuleHom::identity(n.clone());
    let maps: Vec<ModuleHom> = parts.iter().zip(&sum.injections).map(|(p, inj)| p.map_hom(&whole, inj, &id)).collect();
    let ring = whole.module.ring().clone();
    let outer = direct_sum(&ring, &parts.iter().map(|p| p.module.clone()).collect::<Vec<_>>())?;
    Ok(iso_outcome("sum_x (M_x ⊗ N) -> (sum_x M_x) ⊗ N", out_of_sum(&outer, &maps, &whole.module)?))
}

fn tor_coproduct(degree: usize, bundle: &ModuleBundle, n: &Arc<FiniteModule>) -> CoreResult<Outcome> {
    let sum = direct_sum(bundle.ring(), bundle.fibres())?;
    let whole = tor(degree, &sum.module, n)?;
    let parts = bundle.fibres().iter().map(|m| tor(degree, m, n)).collect::<CoreResult<Vec<_>>>()?;
    let maps: Vec<ModuleHom> = parts.iter().zip(&sum.injections).map(|(p, inj)| p.map_to(&whole, inj)).collect::<CoreResult<_>>()?;
    let ring = whole.module.ring().clone();
    let outer = direct_sum(&ring, &parts.iter().map(|p| p.module.clone()).collect::<Vec<_>>())?;
    Ok(iso_outcome(&format!("sum_x Tor_{degree}(M_x, N) -> Tor_{degree}(sum_x M_x, N)"), out_of_sum(&outer, &maps, &whole.module)?))
}

fn induction_coproduct(inclusion: &SubgroupInclusion, bundle: &ModuleBundle) -> CoreResult<Outcome> {
    let k = bundle.ring().base();
    let sum = direct_sum(bundle.ring(), bundle.fibres())?;
    let whole = induce(&k, inclusion, &sum.module)?;
    let parts = bundle.fibres().iter().map(|m| induce(&k, inclusion, m)).collect::<CoreResult<Vec<_>>>()?;
    let maps: Vec<ModuleHom> = parts.iter().zip(&sum.injections).map(|(p, inj)| p.map_hom(&whole, inj)).collect();
    let ring = whole.module.ring().clone();
    let outer = direct_sum(&ring, &parts.iter().map(|p| p.module.clone()).collect::<Vec<_>>())?;
    Ok(iso_outcome("sum_x Ind M_x -> Ind sum_x M_x", out_of_sum(&outer, &maps, &whole.module)?))
}

fn restriction_coproduct(inclusion: &SubgroupInclusion, bundle: &ModuleBundle) -> CoreResult<Outcome> {
    let sum = direct_sum(bundle.ring(), bundle.fibres())?;
    let whole = Arc::new(restrict(inclusion, &sum.module)?);
    let parts = bundle.fibres().iter().map(|m| restrict(inclusion, m).map(Arc::new)).collect::<CoreResult<Vec<_>>>()?;
    let maps: Vec<ModuleHom> = sum.injections.iter().map(|inj| restrict_hom(inclusion, inj)).collect::<CoreResult<_>>()?;
    let ring = whole.ring().clone();
    let outer = direct_sum(&ring, &parts)?;
    Ok(iso_outcome("sum_x Res M_x -> Res sum_x M_x", out_of_sum(&outer, &maps, &whole)?))
}

// --- duality ----------------------------------------------------------------

fn duality_involution(bundle: &ModuleBundle, samples: &[(usize, usize, ModuleHom)]) -> CoreResult<Outcome> {
    let mut evs = Vec::new();
    for (x, m) in bundle.fibres().iter().enumerate() {
        let ev = evaluation_map(m);
        let ev = ModuleHom::new(ev.domain().clone(), ev.codomain().clone(), ev.matrix().clone())?;
        if !ev.is_bijective() {
            return Ok(unequal(format!("evaluation over {x} is not bijective"), None, json!(m.factors()), json!(ev.codomain().factors())));
        }
        if !verify_evaluation(m, 4096) {
            return Ok(mismatch(format!("evaluation over {x} does not match the pairing")));
        }
        evs.push(ev);
    }
    for (from, to, f) in samples {
        let ddf = dual_hom(&dual_hom(f));
        let left = f.then(&evs[*to])?;
        let right = evs[*from].then(&ddf)?;
        if left.matrix() != right.matrix() {
            return Ok(unequal(
                format!("naturality square {from} -> {to} does not commute"),
                None,
                json!(left.matrix().to_rows()),
                json!(right.matrix().to_rows()),
            ));
        }
    }
    let maps = evs.into_iter().enumerate().map(|(x, map)| NamedIso { label: format!("ev[{x}]"), map }).collect();
    Ok(Outcome::Pass(Witness::Isomorphisms { maps, naturality_squares: samples.len() }))
}

fn duality_equivalence(
    source: &ModuleBundle,
    target: &ModuleBundle,
    base_map: &bundlecalc_core::finspace::SpaceMap,
) -> CoreResult<Outcome> {
    let mut probes = Vec::new();
    let mut firsts = Vec::new();
    for x in source.base().points() {
        let y = base_map.apply(x);
        let (a, b) = (source.fibre(x), target.fibre(y));
        let (da, db) = (Arc::new(pontryagin_dual(a)), Arc::new(pontryagin_dual(b)));
        let hs = HomSet::compute(a, b)?;
        let left = hs
            .count()
            .filter(|&c| c <= ENUMERATION_BUDGET)
            .ok_or_else(|| CoreError::TooLarge("fibre Hom-set too large to enumerate".into()))?;
        let right = HomSet::compute(&db, &da)?.count().expect("finite");
        let mut images = HashSet::new();
        let mut sample = Vec::new();
        for m in hs.matrices() {
            let f = ModuleHom::new(a.clone(), b.clone(), m)?;
            let d = dual_hom(&f);
            if *d.domain() != db || *d.codomain() != da {
                return Ok(mismatch(format!("dual of a map over {x} has the wrong ends")));
            }
            let d = ModuleHom::new(db.clone(), da.clone(), d.matrix().clone())?;
            if !images.insert(d.matrix().to_rows()) {
                return Ok(unequal(
                    format!("two maps over {x} have the same dual"),
                    None,
                    json!(f.matrix().to_rows()),
                    json!(d.matrix().to_rows()),
                ));
            }
            if firsts.len() == x {
                firsts.push(f.clone());
            }
            if sample.len() < SAMPLES {
                sample.push(SamplePair { left: f.matrix().to_rows(), right: d.matrix().to_rows() });
            }
        }
        if left != right {
            return Ok(unequal(
                format!("Hom-sets over {x} differ in size"),
                Some(&format!("{x} -> {y}")),
                json!(left.to_string()),
                json!(right.to_string()),
            ));
        }
        probes.push(ProbeBijection { probe: format!("{x} -> {y}"), left, right, certified: "enumerated".into(), sample });
    }
    // one whole bundle map and its dual, as bundle morphisms
    let map = ModuleBundleMap::new(source.clone(), target.clone(), base_map.clone(), firsts)?;
    let _ = dualise_map(&map);
    Ok(Outcome::Pass(Witness::HomBijections { probes }))
}

// --- colimits ---------------------------------------------------------------

fn sorted(tuples: Vec<HomTuple>) -> BTreeSet<Vec<Vec<i64>>> {
    tuples.iter().map(|t| tuple_values(t)).collect()
}

/// Every tuple `(α_a: P(a) -> T)` with `α_{d1 f} ∘ P(f) = α_{d0 f}` for
/// every arrow, by search over the objects with pruning on arrows whose
/// ends are both assigned. Independent of the constraint lists used by
/// the colimit computation.
fn universal_tuples(diagram: &InternalGroupDiagram, t: &Arc<FiniteGroup>) -> CoreResult<BTreeSet<Vec<Vec<i64>>>> {
    let cat = diagram.category();
    let n = cat.objects().size;
    let options: Vec<Vec<GroupHom>> = (0..n).map(|a| enumerate_homs_arc(diagram.bundle().fibre(a), t)).collect();
    let space: u128 = options.iter().map(|o| o.len() as u128).product();
    if space > ENUMERATION_BUDGET * 4 {
        return Err(CoreError::TooLarge(format!("{space} candidate tuples exceed the enumeration budget")));
    }
    let arrows: Vec<usize> = cat.arrows().points().collect();
    let mut out = BTreeSet::new();
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    fn ok(diagram: &InternalGroupDiagram, options: &[Vec<GroupHom>], chosen: &[usize], f: usize) -> bool {
        let cat = diagram.category();
        let (s, d) = (cat.source(f), cat.target(f));
        if s >= chosen.len() || d >= chosen.len() {
            return true;
        }
        let (a_s, a_d) = (&options[s][chosen[s]], &options[d][chosen[d]]);
        let p = diagram.action(f);
        diagram.bundle().fibre(s).elements().all(|g| a_d.apply(p.apply(g)) == a_s.apply(g))
    }
    fn go(
        diagram: &InternalGroupDiagram,
        options: &[Vec<GroupHom>],
        arrows: &[usize],
        chosen: &mut Vec<usize>,
        out: &mut BTreeSet<Vec<Vec<i64>>>,
    ) {
        let a = chosen.len();
        if a == options.len() {
            out.insert(chosen.iter().enumerate().map(|(b, &i)| values(&options[b][i])).collect());
            return;
        }
        for i in 0..options[a].len() {
            chosen.push(i);
            let cat = diagram.category();
            let fine = arrows.iter().filter(|&&f| cat.source(f) == a || cat.target(f) == a).all(|&f| ok(diagram, options, chosen, f));
            if fine {
                go(diagram, options, arrows, chosen, out);
            }
            chosen.pop();
        }
    }
    go(diagram, &options, &arrows, &mut chosen, &mut out);
    Ok(out)
}

fn colimit_probes(test_order: usize) -> Vec<Probe> {
    default_probes(test_order.min(8))
}

/// Compares the colimit Hom-sets with direct enumeration, plus `extra`
/// (a count from an ordinary colimit computed in finite groups) when given.
fn compare_colimit(
    diagram: &InternalGroupDiagram,
    test_order: usize,
    extra: impl Fn(&Probe) -> CoreResult<Option<(String, u128)>>,
) -> CoreResult<Outcome> {
    let colimit = colimit_via_coequaliser(diagram.category(), diagram)?;
    let mut probes = Vec::new();
    for probe in colimit_probes(test_order) {
        let t = &probe.group;
        let direct = universal_tuples(diagram, t)?;
        if colimit.count_homs_to(t) > ENUMERATION_BUDGET {
            return Err(CoreError::TooLarge("colimit Hom-set exceeds the enumeration budget".into()));
        }
        let computed = sorted(colimit.homs_to(t));
        if computed != direct {
            let only_left = computed.difference(&direct).next().cloned();
            let only_right = direct.difference(&computed).next().cloned();
            return Ok(unequal(
                "colimit Hom-set differs from the universal property",
                Some(&probe.name),
                json!(only_left),
                json!(only_right),
            ));
        }
        if let Some((what, count)) = extra(&probe)? {
            if count != computed.len() as u128 {
                return Ok(unequal(
                    format!("colimit Hom-set differs in size from Hom({what}, T)"),
                    Some(&probe.name),
                    json!(computed.len()),
                    json!(count.to_string()),
                ));
            }
        }
        let sample = computed.iter().take(SAMPLES).map(|v| SamplePair { left: v.clone(), right: v.clone() }).collect();
        probes.push(ProbeBijection {
            probe: probe.name,
            left: computed.len() as u128,
            right: direct.len() as u128,
            certified: "enumerated".into(),
            sample,
        });
    }
    Ok(Outcome::Pass(Witness::HomBijections { probes }))
}

fn colimit_coequaliser(shape: Shape, diagram: &InternalGroupDiagram, test_order: usize) -> CoreResult<Outcome> {
    let first_edge = diagram.category().objects().size;
    match shape {
        Shape::Free => compare_colimit(diagram, test_order, |_| Ok(None)),
        Shape::ParallelPair => {
            let (q, _) = coequaliser(diagram.action(first_edge), diagram.action(first_edge + 1))?;
            compare_colimit(diagram, test_order, |p| Ok(Some(("coequaliser".into(), count_homs(&q, &p.group) as u128))))
        }
        Shape::Span => {
            let (p, _, _) = pushout_with_surjective_leg(diagram.action(first_edge), diagram.action(first_edge + 1))?;
            compare_colimit(diagram, test_order, |probe| Ok(Some(("pushout".into(), count_homs(&p, &probe.group) as u128))))
        }
    }
}

fn amalgam_colimit(amalgam: &AmalgamData, test_order: usize) -> CoreResult<Outcome> {
    let diagram = amalgam.diagram();
    let outcome = compare_colimit(&diagram, test_order, |_| Ok(None))?;
    let Outcome::Pass(_) = outcome else { return Ok(outcome) };
    let colimit = colimit_via_coequaliser(diagram.category(), &diagram)?;
    let mut probes = Vec::new();
    for probe in colimit_probes(test_order) {
        let from_amalgam: BTreeSet<Vec<Vec<i64>>> =
            amalgam_homs(amalgam, &probe.group).iter().map(|t| tuple_values(&amalgam.to_colimit_tuple(t))).collect();
        let from_colimit = sorted(colimit.homs_to(&probe.group));
        if from_amalgam != from_colimit {
            return Ok(unequal(
                "amalgam Hom-set differs from the cone-graph colimit",
                Some(&probe.name),
                json!(from_amalgam.len()),
                json!(from_colimit.len()),
            ));
        }
        let sample = from_amalgam.iter().take(SAMPLES).map(|v| SamplePair { left: v.clone(), right: v.clone() }).collect();
        probes.push(ProbeBijection {
            probe: probe.name,
            left: from_amalgam.len() as u128,
            right: from_colimit.len() as u128,
            certified: "enumerated".into(),
            sample,
        });
    }
    Ok(Outcome::Pass(Witness::HomBijections { probes }))
}

fn discrete_colimit(bundle: &GroupBundle, test_order: usize) -> CoreResult<Outcome> {
    let diagram = discrete_diagram(bundle).map_err(|e| match e {
        HarnessError::Core(c) => c,
        other => CoreError::InvalidDiagram(other.to_string()),
    })?;
    let colimit = colimit_via_coequaliser(diagram.category(), &diagram)?;
    let coproduct = internal_coproduct_groups(bundle);
    let mut probes = Vec::new();
    for probe in default_probes(test_order) {
        let t = &probe.group;
        let expected: u128 = bundle.fibres().iter().map(|g| count_homs(g, t) as u128).product();
        if expected > ENUMERATION_BUDGET {
            return Err(CoreError::TooLarge(format!("{expected} tuples exceed the enumeration budget")));
        }
        let a = sorted(colimit.homs_to(t));
        let b = sorted(coproduct.homs_to(t));
        if a != b || a.len() as u128 != expected {
            return Ok(unequal("discrete colimit and free product Hom-sets differ", Some(&probe.name), json!(a.len()), json!(b.len())));
        }
        let sample = a.iter().take(SAMPLES).map(|v| SamplePair { left: v.clone(), right: v.clone() }).collect();
        probes.push(ProbeBijection {
            probe: probe.name,
            left: a.len() as u128,
            right: b.len() as u128,
            certified: "enumerated".into(),
            sample,
        });
    }
    Ok(Outcome::Pass(Witness::HomBijections { probes }))
}

// --- adjunctions ------------------------------------------------------------

fn relative_adjunction(spec: &RelativeAdjunctionSpec, sample: &AdjunctionSample, naturality: Option<&ModuleHom>) -> CoreResult<Outcome> {
    let reports = check_relative_adjunction(spec, std::slice::from_ref(sample))?;
    let natural = match naturality {
        Some(t) => Some(check_adjunction_naturality(spec, sample, t)?),
        None => None,
    };
    if let Some(r) = reports.iter().find(|r| !r.bijective) {
        return Ok(unequal("transpose is not a bijection", None, json!(r.left_count.to_string()), json!(r.right_count.to_string())));
    }
    if natural == Some(false) {
        return Ok(mismatch("transpose is not natural in the right-hand object"));
    }
    Ok(Outcome::Pass(Witness::Adjunction { reports, naturality: natural }))
}

fn four_square(ring: &FiniteRing, bundle: &SpaceBundle, module: &Arc<FiniteModule>) -> CoreResult<Outcome> {
    let report = check_four_square(ring, bundle, module)?;
    if !report.right_agree {
        return Ok(mismatch("forgetting a constant bundle is not the constant bundle on the underlying set"));
    }
    if !report.left_iso {
        return Ok(unequal("free module comparison is not an isomorphism", None, json!(bundle.fibre_sizes()), json!(report.witness)));
    }
    Ok(Outcome::Pass(Witness::FourSquare { report }))
}
