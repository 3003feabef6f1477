//! Acceptance run. Prints one line per criterion and exits non-zero if any
//! criterion fails. An inconclusive trial counts as a failure.

use bundlecalc_core::fingroup::{builtin_catalog, enumerate_homs, FiniteGroup};
use bundlecalc_core::protower::RelativeAdjunctionSpec;
use bundlecalc_harness::probes::abelian_probes;
use bundlecalc_harness::suite::trial_seed;
use bundlecalc_harness::{check, gen_instance, run_suite, Bounds, CheckInstance, Payload, Report, TheoremId, Verdict, Witness};
use rayon::prelude::*;
use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

const SEED: u64 = 2024;

type Outcome = Result<String, String>;

/// The first `n` generated instances accepted by `keep`, scanning trial seeds in order.
fn select(theorem: TheoremId, n: usize, keep: impl Fn(&Payload) -> bool) -> Result<Vec<CheckInstance>, String> {
    let bounds = Bounds::default();
    let mut out = Vec::new();
    for i in 0..n * 20 {
        let instance = gen_instance(theorem, trial_seed(SEED, i), &bounds).map_err(|e| e.to_string())?;
        if keep(&instance.payload) {
            out.push(instance);
            if out.len() == n {
                return Ok(out);
            }
        }
    }
    Err(format!("{theorem}: only {} of {n} instances matched the filter", out.len()))
}

/// Checks every instance; all must pass with a witness that reverifies.
fn verify(theorem: TheoremId, instances: &[CheckInstance]) -> Result<Vec<Report>, String> {
    let reports: Vec<Report> = instances.par_iter().map(|i| check(theorem, i).map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
    for r in &reports {
        if r.verdict != Verdict::Pass {
            let witness = serde_json::to_string(&r.witness).unwrap_or_default();
            return Err(format!("{theorem} seed {} is {:?}: {}", r.seed, r.verdict, &witness[..witness.len().min(300)]));
        }
        if !r.reverify() {
            return Err(format!("{theorem} seed {}: witness does not reverify", r.seed));
        }
    }
    Ok(reports)
}

fn trials(theorem: TheoremId, n: usize) -> Result<Vec<Report>, String> {
    verify(theorem, &select(theorem, n, |_| true)?)
}

fn ring_label(ring: &bundlecalc_core::finmod::FiniteRing) -> String {
    match ring.group() {
        None => format!("Z/{}", ring.characteristic()),
        Some(g) => format!("(Z/{})[order {}]", ring.characteristic(), g.order()),
    }
}

fn criterion_1() -> Outcome {
    let reports = trials(TheoremId::AbelianisationCoproduct, 100)?;
    let wanted: BTreeSet<String> = abelian_probes(12).into_iter().map(|p| p.name).collect();
    for r in &reports {
        let Witness::HomBijections { probes } = &r.witness else {
            return Err(format!("seed {}: unexpected witness", r.seed));
        };
        let seen: BTreeSet<String> = probes.iter().map(|p| p.probe.clone()).collect();
        if seen != wanted {
            return Err(format!("seed {}: probed {seen:?}, wanted {wanted:?}", r.seed));
        }
    }
    Ok(format!("100/100 bundles, {} abelian probes each", wanted.len()))
}

fn criterion_2() -> Outcome {
    let instances = select(TheoremId::FreeModuleCoproduct, 100, |_| true)?;
    let mut rings = BTreeSet::new();
    for i in &instances {
        let Payload::FreeModule { ring, .. } = &i.payload else { return Err("wrong payload".into()) };
        if !matches!(ring.characteristic(), 2 | 3 | 4 | 6 | 8) || ring.group().is_some() {
            return Err(format!("ring {} outside the family", ring_label(ring)));
        }
        rings.insert(ring.characteristic());
    }
    verify(TheoremId::FreeModuleCoproduct, &instances)?;
    Ok(format!("100/100 isomorphisms, n in {rings:?}"))
}

fn criterion_3() -> Outcome {
    let instances = select(TheoremId::TorCoproduct, 100, |_| true)?;
    let (mut degrees, mut rings) = (BTreeSet::new(), BTreeSet::new());
    for i in &instances {
        let Payload::Tor { degree, bundle, .. } = &i.payload else { return Err("wrong payload".into()) };
        degrees.insert(*degree);
        rings.insert(ring_label(bundle.ring()));
    }
    if degrees.len() != 3 || rings.len() != 3 {
        return Err(format!("coverage: degrees {degrees:?}, rings {rings:?}"));
    }
    verify(TheoremId::TorCoproduct, &instances)?;
    trials(TheoremId::TensorCoproduct, 100)?;
    Ok(format!("100/100 Tor, degrees {degrees:?} over {rings:?}; 100/100 tensor"))
}

fn criterion_4() -> Outcome {
    for theorem in [TheoremId::InductionCoproduct, TheoremId::RestrictionCoproduct] {
        let instances = select(theorem, 50, |_| true)?;
        for i in &instances {
            let (Payload::Induction { inclusion, bundle } | Payload::Restriction { inclusion, bundle }) = &i.payload else {
                return Err("wrong payload".into());
            };
            if inclusion.group().order() > 12 || !matches!(bundle.ring().characteristic(), 2 | 3) {
                return Err(format!("{theorem}: instance outside the bounds"));
            }
        }
        verify(theorem, &instances)?;
    }
    Ok("50/50 induction, 50/50 restriction".into())
}

fn criterion_5() -> Outcome {
    trials(TheoremId::DualityInvolution, 100)?;
    let reports = trials(TheoremId::DualityEquivalence, 50)?;
    for r in &reports {
        let Witness::HomBijections { probes } = &r.witness else {
            return Err(format!("seed {}: unexpected witness", r.seed));
        };
        if probes.iter().any(|p| p.left != p.right || p.certified != "enumerated") {
            return Err(format!("seed {}: uncertified hom-set bijection", r.seed));
        }
    }
    Ok("100/100 double duals, 50/50 hom-set bijections".into())
}

fn criterion_6() -> Outcome {
    let theorem = TheoremId::ColimitCoequaliser;
    let categories = select(theorem, 50, |p| matches!(p, Payload::Diagram { .. }))?;
    for i in &categories {
        let Payload::Diagram { diagram, .. } = &i.payload else { unreachable!() };
        let (a0, a1) = (diagram.category().objects().size, diagram.category().arrows().size);
        if a0 > 3 || a1 > 6 {
            return Err(format!("category with {a0} objects and {a1} arrows"));
        }
    }
    verify(theorem, &categories)?;
    let cones = select(theorem, 20, |p| matches!(p, Payload::Amalgam { .. }))?;
    verify(theorem, &cones)?;
    trials(TheoremId::DiscreteColimitAgreement, 50)?;
    Ok("50/50 internal categories, 20/20 cone graphs, 50/50 discrete shapes".into())
}

fn criterion_7() -> Outcome {
    let named = |p: &Payload| {
        matches!(
            p,
            Payload::Adjunction { spec: RelativeAdjunctionSpec::FreeForget { .. } | RelativeAdjunctionSpec::AbelianisationInclusion, .. }
        )
    };
    let instances = select(TheoremId::RelativeAdjunction, 100, named)?;
    let free = instances
        .iter()
        .filter(|i| matches!(&i.payload, Payload::Adjunction { spec: RelativeAdjunctionSpec::FreeForget { .. }, .. }))
        .count();
    if free == 0 || free == 100 {
        return Err(format!("{free} of 100 samples were free/forget"));
    }
    verify(TheoremId::RelativeAdjunction, &instances)?;
    trials(TheoremId::FourSquare, 20)?;
    Ok(format!("100/100 pairs ({free} free/forget, {} abelianisation/inclusion), 20/20 four-square", 100 - free))
}

/// Value tables of all homomorphisms by a depth-first search over tables,
/// rejecting a partial table once a product of assigned elements disagrees.
fn table_search(a: &FiniteGroup, t: &FiniteGroup) -> Vec<Vec<usize>> {
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

fn criterion_8() -> Outcome {
    let groups = builtin_catalog(8);
    let mut pairs = 0;
    let mut homs = 0;
    for (na, a) in &groups {
        for (nt, t) in &groups {
            let mut fast: Vec<Vec<usize>> = enumerate_homs(a, t).iter().map(|h| h.values().to_vec()).collect();
            let mut slow = table_search(a, t);
            fast.sort();
            slow.sort();
            if fast != slow {
                return Err(format!("{na} -> {nt}: {} enumerated, {} by table search", fast.len(), slow.len()));
            }
            pairs += 1;
            homs += fast.len();
        }
    }
    Ok(format!("{} groups, {pairs} pairs, {homs} homomorphisms agree", groups.len()))
}

fn criterion_9() -> Outcome {
    let dir = std::env::temp_dir().join(format!("bundlecalc-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut files = Vec::new();
    for run in 0..2 {
        let suite = run_suite(&TheoremId::ALL, 5, 42, &Bounds::default()).map_err(|e| e.to_string())?;
        if suite.verdict != Verdict::Pass {
            return Err(format!("suite verdict {:?}", suite.verdict));
        }
        let path = dir.join(format!("out{run}.json"));
        std::fs::write(&path, suite.to_json()).map_err(|e| e.to_string())?;
        files.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    std::fs::remove_dir_all(&dir).ok();
    if files[0] != files[1] {
        return Err("suite files differ".into());
    }
    Ok(format!("two suite runs, {} identical bytes", files[0].len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, u64); 9] = [
        ("abelianisation commutes with coproducts", criterion_1, 60),
        ("free modules commute with coproducts", criterion_2, 30),
        ("Tor commutes with coproducts", criterion_3, 120),
        ("induction and restriction", criterion_4, 120),
        ("duality", criterion_5, 60),
        ("colimits via coequalisers", criterion_6, 120),
        ("relative adjunction and four squares", criterion_7, 60),
        ("homomorphism enumeration against table search", criterion_8, 60),
        ("suite determinism", criterion_9, 600),
    ];
    let mut failed = 0;
    for (n, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let (status, detail) = match outcome {
            Ok(_) if secs >= *limit as f64 => ("FAIL", format!("over the {limit}s limit")),
            Ok(d) => ("PASS", d),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {} {status}: {name}: {detail} [{secs:.2}s / {limit}s]", n + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
