//! Towers of finite objects indexed by depth, standing in for pro-objects,
//! and finite checks of relative adjunctions.

use crate::bundle::{
    constant_bundle, free_coproduct_comparison, lift_functor, lift_morphism, Bundle, BundleMorphism, Fibre, FibreMap, FibrewiseFunctor,
    GroupBundle, GroupBundleMap, Kind, ModuleBundle, ProGroupByHoms, SpaceBundle, Variance,
};
use crate::error::{Error, Result};
use crate::fingroup::{abelianisation, enumerate_homs_arc, FiniteGroup, GroupHom};
use crate::finmod::{free_module, induce, restrict, FiniteModule, FiniteRing, GroupInput, HomSet, ModuleHom, SubgroupInclusion};
use crate::finspace::{FiniteSpace, SpaceMap};
use crate::matrix::Matrix;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};
use std::sync::{Arc, Mutex};

/// Largest Hom-set enumerated by the checks in this module.
pub const MAX_ENUMERATION: u128 = 1 << 16;

/// Largest cyclic group built by the `Zmod-chain` family.
const MAX_CHAIN_ORDER: usize = 1 << 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TowerKind {
    Space,
    Group,
    Module,
    Bundle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum TowerObject {
    Space(FiniteSpace),
    Group(Arc<FiniteGroup>),
    Module(Arc<FiniteModule>),
    Bundle(Bundle),
}

impl TowerObject {
    pub fn kind(&self) -> TowerKind {
        match self {
            TowerObject::Space(_) => TowerKind::Space,
            TowerObject::Group(_) => TowerKind::Group,
            TowerObject::Module(_) => TowerKind::Module,
            TowerObject::Bundle(_) => TowerKind::Bundle,
        }
    }

    /// Number of points of the underlying space.
    pub fn size(&self) -> Option<u128> {
        match self {
            TowerObject::Space(s) => Some(s.size as u128),
            TowerObject::Group(g) => Some(g.order() as u128),
            TowerObject::Module(m) => m.order(),
            TowerObject::Bundle(Bundle::Space(b)) => Some(b.total().size as u128),
            TowerObject::Bundle(Bundle::Group(b)) => Some(b.total_order() as u128),
            TowerObject::Bundle(Bundle::Module(b)) => b.fibres().iter().try_fold(0u128, |a, m| Some(a + m.order()?)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum TowerMorphism {
    Space(SpaceMap),
    Group(GroupHom),
    Module(ModuleHom),
    Bundle(BundleMorphism),
}

/// Named generator families accepted from JSON.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum TowerFamily {
    /// The same group at every depth, identity transitions.
    #[serde(rename = "constant")]
    Constant { group: GroupInput },
    /// `Z/p <- Z/p^2 <- Z/p^3 <- ...` by reduction.
    #[serde(rename = "Zmod-chain")]
    ZmodChain { base: usize },
    /// Sets of sizes `1, 2, 3, ...`, each transition merging the newest
    /// point into its predecessor.
    #[serde(rename = "growing")]
    Growing,
    /// Groups `G_0, G_1, ...` (the list repeats) over the one-point
    /// compactification of the naturals; depth `d` keeps `G_0 .. G_{d-1}`
    /// and collapses the rest to the trivial fibre over `*`.
    #[serde(rename = "converging-to-one")]
    ConvergingToOne { groups: Vec<GroupInput> },
}

enum Source {
    Constant(TowerObject),
    ZmodChain(usize),
    Growing,
    ConvergingToOne(Vec<Arc<FiniteGroup>>),
    Explicit { levels: Vec<TowerObject>, transitions: Vec<TowerMorphism> },
    Lifted { functor: FibrewiseFunctor, inner: Tower },
}

#[derive(Default)]
struct Memo {
    levels: BTreeMap<usize, TowerObject>,
    transitions: BTreeMap<usize, TowerMorphism>,
}

/// A chain `level(0) <- level(1) <- ...` evaluated lazily up to `max_depth`.
/// Clones and truncations share the memo.
#[derive(Clone)]
pub struct Tower {
    kind: TowerKind,
    max_depth: usize,
    source: Arc<Source>,
    memo: Arc<Mutex<Memo>>,
}

impl std::fmt::Debug for Tower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Tower").field("kind", &self.kind).field("max_depth", &self.max_depth).finish()
    }
}

impl Tower {
    fn from_source(kind: TowerKind, max_depth: usize, source: Source) -> Self {
        Tower { kind, max_depth, source: Arc::new(source), memo: Arc::new(Mutex::new(Memo::default())) }
    }

    pub fn from_family(family: TowerFamily, max_depth: usize) -> Result<Self> {
        Ok(match family {
            TowerFamily::Constant { group } => Tower::constant(TowerObject::Group(Arc::new(group.resolve()?)), max_depth),
            TowerFamily::ZmodChain { base } => {
                if base < 2 {
                    return Err(Error::InvalidTower("Zmod-chain needs a base of at least 2".into()));
                }
                Tower::from_source(TowerKind::Group, max_depth, Source::ZmodChain(base))
            }
            TowerFamily::Growing => Tower::from_source(TowerKind::Space, max_depth, Source::Growing),
            TowerFamily::ConvergingToOne { groups } => {
                if groups.is_empty() {
                    return Err(Error::InvalidTower("converging-to-one needs at least one group".into()));
                }
                let groups = groups.into_iter().map(|g| g.resolve().map(Arc::new)).collect::<Result<_>>()?;
                Tower::from_source(TowerKind::Bundle, max_depth, Source::ConvergingToOne(groups))
            }
        })
    }

    pub fn constant(object: TowerObject, max_depth: usize) -> Self {
        Tower::from_source(object.kind(), max_depth, Source::Constant(object))
    }

    /// A finite tower given level by level; `transitions[d]` maps
    /// `levels[d + 1]` to `levels[d]`.
    pub fn explicit(levels: Vec<TowerObject>, transitions: Vec<TowerMorphism>) -> Result<Self> {
        if levels.is_empty() || transitions.len() + 1 != levels.len() {
            return Err(Error::InvalidTower("need one transition between consecutive levels".into()));
        }
        let kind = levels[0].kind();
        if levels.iter().any(|l| l.kind() != kind) {
            return Err(Error::InvalidTower("levels of different kinds".into()));
        }
        for (d, t) in transitions.iter().enumerate() {
            check_transition(t, &levels[d + 1], &levels[d])?;
        }
        let max_depth = levels.len() - 1;
        Ok(Tower::from_source(kind, max_depth, Source::Explicit { levels, transitions }))
    }

    pub fn kind(&self) -> TowerKind {
        self.kind
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    /// The same tower cut off at a smaller depth.
    pub fn truncate(&self, max_depth: usize) -> Result<Self> {
        self.check_depth(max_depth)?;
        Ok(Tower { max_depth, ..self.clone() })
    }

    fn check_depth(&self, depth: usize) -> Result<()> {
        if depth > self.max_depth {
            return Err(Error::DepthExceeded { depth, max_depth: self.max_depth });
        }
        Ok(())
    }

    pub fn level(&self, d: usize) -> Result<TowerObject> {
        self.check_depth(d)?;
        if let Some(l) = self.memo.lock().expect("memo lock").levels.get(&d) {
            return Ok(l.clone());
        }
        let l = self.make_level(d)?;
        self.memo.lock().expect("memo lock").levels.insert(d, l.clone());
        Ok(l)
    }

    /// The map `level(d + 1) -> level(d)`.
    pub fn transition(&self, d: usize) -> Result<TowerMorphism> {
        self.check_depth(d + 1)?;
        if let Some(t) = self.memo.lock().expect("memo lock").transitions.get(&d) {
            return Ok(t.clone());
        }
        let t = self.make_transition(d)?;
        self.memo.lock().expect("memo lock").transitions.insert(d, t.clone());
        Ok(t)
    }

    fn make_level(&self, d: usize) -> Result<TowerObject> {
        Ok(match &*self.source {
            Source::Constant(o) => o.clone(),
            Source::ZmodChain(p) => TowerObject::Group(Arc::new(FiniteGroup::cyclic(chain_order(*p, d)?))),
            Source::Growing => TowerObject::Space(FiniteSpace::new(d + 1)),
            Source::ConvergingToOne(gs) => TowerObject::Bundle(Bundle::Group(converging_level(gs, d))),
            Source::Explicit { levels, .. } => levels[d].clone(),
            Source::Lifted { functor, inner } => apply_to_object(functor, &inner.level(d)?)?,
        })
    }

    fn make_transition(&self, d: usize) -> Result<TowerMorphism> {
        Ok(match &*self.source {
            Source::Constant(o) => identity_morphism(o),
            Source::ZmodChain(p) => {
                let (big, small) = (chain_order(*p, d + 1)?, chain_order(*p, d)?);
                let (b, s) = (Arc::new(FiniteGroup::cyclic(big)), Arc::new(FiniteGroup::cyclic(small)));
                TowerMorphism::Group(GroupHom::new(b, s, (0..big).map(|x| x % small).collect())?)
            }
            Source::Growing => {
                let values = (0..d + 2).map(|x| x.min(d)).collect();
                TowerMorphism::Space(SpaceMap::new(FiniteSpace::new(d + 2), FiniteSpace::new(d + 1), values)?)
            }
            Source::ConvergingToOne(gs) => {
                let (big, small) = (converging_level(gs, d + 1), converging_level(gs, d));
                let star = d;
                let base_map = SpaceMap::new(big.base(), small.base(), (0..d + 2).map(|x| x.min(star)).collect())?;
                let homs = (0..d + 2)
                    .map(|x| {
                        let target = small.fibre(x.min(star)).clone();
                        if x < d {
                            GroupHom::identity(target)
                        } else {
                            GroupHom::trivial(big.fibre(x).clone(), target)
                        }
                    })
                    .collect();
                TowerMorphism::Bundle(BundleMorphism::Group(GroupBundleMap::new(big, small, base_map, homs)?))
            }
            Source::Explicit { transitions, .. } => transitions[d].clone(),
            Source::Lifted { functor, inner } => apply_to_morphism(functor, &inner.transition(d)?)?,
        })
    }
}

fn chain_order(p: usize, d: usize) -> Result<usize> {
    let mut n: usize = p;
    for _ in 0..d {
        n = n
            .checked_mul(p)
            .filter(|&n| n <= MAX_CHAIN_ORDER)
            .ok_or_else(|| Error::InvalidTower(format!("Zmod-chain level {d} exceeds order {MAX_CHAIN_ORDER}")))?;
    }
    Ok(n)
}

fn converging_level(gs: &[Arc<FiniteGroup>], d: usize) -> GroupBundle {
    let mut fibres: Vec<Arc<FiniteGroup>> = (0..d).map(|i| gs[i % gs.len()].clone()).collect();
    fibres.push(Arc::new(FiniteGroup::trivial()));
    GroupBundle::new(fibres)
}

fn identity_morphism(o: &TowerObject) -> TowerMorphism {
    match o {
        TowerObject::Space(s) => TowerMorphism::Space(SpaceMap::identity(*s)),
        TowerObject::Group(g) => TowerMorphism::Group(GroupHom::identity(g.clone())),
        TowerObject::Module(m) => TowerMorphism::Module(ModuleHom::identity(m.clone())),
        TowerObject::Bundle(Bundle::Group(b)) => TowerMorphism::Bundle(BundleMorphism::Group(GroupBundleMap::identity(b))),
        TowerObject::Bundle(Bundle::Module(b)) => {
            TowerMorphism::Bundle(BundleMorphism::Module(crate::bundle::ModuleBundleMap::identity(b)))
        }
        TowerObject::Bundle(Bundle::Space(b)) => TowerMorphism::Space(SpaceMap::identity(b.total())),
    }
}

fn check_transition(t: &TowerMorphism, from: &TowerObject, to: &TowerObject) -> Result<()> {
    let ok = match (t, from, to) {
        (TowerMorphism::Space(m), TowerObject::Space(a), TowerObject::Space(b)) => m.domain() == *a && m.codomain() == *b,
        (TowerMorphism::Group(h), TowerObject::Group(a), TowerObject::Group(b)) => **h.domain() == **a && **h.codomain() == **b,
        (TowerMorphism::Module(h), TowerObject::Module(a), TowerObject::Module(b)) => **h.domain() == **a && **h.codomain() == **b,
        (TowerMorphism::Bundle(BundleMorphism::Group(m)), TowerObject::Bundle(Bundle::Group(a)), TowerObject::Bundle(Bundle::Group(b))) => {
            m.source == *a && m.target == *b
        }
        (
            TowerMorphism::Bundle(BundleMorphism::Module(m)),
            TowerObject::Bundle(Bundle::Module(a)),
            TowerObject::Bundle(Bundle::Module(b)),
        ) => m.source == *a && m.target == *b,
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidTower("transition does not run between consecutive levels".into()))
    }
}

fn fibre_to_object(f: Fibre) -> TowerObject {
    match f {
        Fibre::Space(n) => TowerObject::Space(FiniteSpace::new(n)),
        Fibre::Group(g) => TowerObject::Group(g),
        Fibre::Module(m) => TowerObject::Module(m),
    }
}

fn apply_to_object(f: &FibrewiseFunctor, o: &TowerObject) -> Result<TowerObject> {
    Ok(match o {
        TowerObject::Space(s) => fibre_to_object(f.apply_object(&Fibre::Space(s.size))?),
        TowerObject::Group(g) => fibre_to_object(f.apply_object(&Fibre::Group(g.clone()))?),
        TowerObject::Module(m) => fibre_to_object(f.apply_object(&Fibre::Module(m.clone()))?),
        TowerObject::Bundle(b) => TowerObject::Bundle(lift_functor(f, b)?),
    })
}

fn apply_to_morphism(f: &FibrewiseFunctor, t: &TowerMorphism) -> Result<TowerMorphism> {
    let single = |m: FibreMap| match m {
        FibreMap::Space(s) => TowerMorphism::Space(s),
        FibreMap::Group(h) => TowerMorphism::Group(h),
        FibreMap::Module(h) => TowerMorphism::Module(h),
    };
    Ok(match t {
        TowerMorphism::Space(s) => single(f.apply_morphism(&FibreMap::Space(s.clone()))?),
        TowerMorphism::Group(h) => single(f.apply_morphism(&FibreMap::Group(h.clone()))?),
        TowerMorphism::Module(h) => single(f.apply_morphism(&FibreMap::Module(h.clone()))?),
        TowerMorphism::Bundle(m) => TowerMorphism::Bundle(lift_morphism(f, m)?),
    })
}

fn tower_kind_input(k: TowerKind) -> Option<Kind> {
    match k {
        TowerKind::Space => Some(Kind::Space),
        TowerKind::Group => Some(Kind::Group),
        TowerKind::Module => Some(Kind::Module),
        TowerKind::Bundle => None,
    }
}

/// `F` applied level by level and to every transition.
pub fn extend_functor_levelwise(f: &FibrewiseFunctor, t: &Tower) -> Result<Tower> {
    if f.variance() == Variance::Contravariant {
        return Err(Error::KindMismatch(format!("{} reverses transitions and does not act on towers", f.name())));
    }
    let kind = match tower_kind_input(t.kind) {
        Some(k) => {
            if let Some(want) = f.input_kind() {
                if want != k {
                    return Err(Error::KindMismatch(format!("{} expects {want:?} levels, tower has {k:?}", f.name())));
                }
            }
            match f.output_kind(k) {
                Kind::Space => TowerKind::Space,
                Kind::Group => TowerKind::Group,
                Kind::Module => TowerKind::Module,
            }
        }
        None => {
            // bundle levels are checked on first evaluation
            apply_to_object(f, &t.level(0)?)?;
            TowerKind::Bundle
        }
    };
    Ok(Tower::from_source(kind, t.max_depth, Source::Lifted { functor: f.clone(), inner: t.clone() }))
}

/// A finite test object for [`tower_limit_fingerprint`].
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Probe {
    Space(usize),
    Group(Arc<FiniteGroup>),
    Module(Arc<FiniteModule>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FingerprintRow {
    /// `counts[d]` is the count at depth `d`.
    pub counts: Vec<u128>,
    /// First depth after which the count no longer changes.
    pub stable_from: usize,
}

/// For each probe `T` and each depth `d <= depth`, the number of distinct
/// maps `level(d + 1) -> T` that factor through `level(d)` (through the
/// transition), or `|Hom(level(d), T)|` at the bottom of the tower.
pub fn tower_limit_fingerprint(t: &Tower, probes: &[Probe], depth: usize) -> Result<Vec<FingerprintRow>> {
    t.check_depth(depth)?;
    probes
        .iter()
        .map(|p| {
            let counts: Vec<u128> = (0..=depth).map(|d| fingerprint_at(t, p, d)).collect::<Result<_>>()?;
            let last = *counts.last().expect("depth 0 is always present");
            let stable_from = counts.iter().rposition(|&c| c != last).map_or(0, |i| i + 1);
            Ok(FingerprintRow { counts, stable_from })
        })
        .collect()
}

fn fingerprint_at(t: &Tower, probe: &Probe, d: usize) -> Result<u128> {
    let level = t.level(d)?;
    let next = if d < t.max_depth { Some(t.transition(d)?) } else { None };
    let homs = homs_from(&level, probe)?;
    let Some(next) = next else { return Ok(homs.len() as u128) };
    let pulled: HashSet<Vec<i64>> = homs.iter().map(|h| precompose(h, &next)).collect::<Result<_>>()?;
    Ok(pulled.len() as u128)
}

/// A map out of a level, in a form that can be precomposed.
enum LevelHom {
    Function(Vec<usize>),
    Group(GroupHom),
    Module(ModuleHom),
    Tuple(Vec<GroupHom>),
}

fn too_many(what: &str) -> Error {
    Error::TooLarge(format!("{what} has more than {MAX_ENUMERATION} elements"))
}

fn homs_from(level: &TowerObject, probe: &Probe) -> Result<Vec<LevelHom>> {
    Ok(match (level, probe) {
        (TowerObject::Space(s), Probe::Space(n)) => {
            let count =
                (*n as u128).checked_pow(s.size as u32).filter(|&c| c <= MAX_ENUMERATION).ok_or_else(|| too_many("function set"))?;
            (0..count)
                .map(|mut k| {
                    LevelHom::Function(
                        (0..s.size)
                            .map(|_| {
                                let v = (k % *n as u128) as usize;
                                k /= *n as u128;
                                v
                            })
                            .collect(),
                    )
                })
                .collect()
        }
        (TowerObject::Group(g), Probe::Group(h)) => enumerate_homs_arc(g, h).into_iter().map(LevelHom::Group).collect(),
        (TowerObject::Module(m), Probe::Module(n)) => {
            let hs = HomSet::compute(m, n)?;
            if hs.count().is_none_or(|c| c > MAX_ENUMERATION) {
                return Err(too_many("Hom-set"));
            }
            hs.group.elements().map(|c| LevelHom::Module(hs.hom_at(&c))).collect()
        }
        (TowerObject::Bundle(Bundle::Group(b)), Probe::Group(h)) => {
            let p = ProGroupByHoms::Coproduct(b.clone());
            if p.count_homs_to(h) > MAX_ENUMERATION {
                return Err(too_many("Hom-set"));
            }
            p.homs_to(h).into_iter().map(LevelHom::Tuple).collect()
        }
        _ => return Err(Error::KindMismatch("probe does not match the tower kind".into())),
    })
}

/// `h ∘ t`, flattened for comparison.
fn precompose(h: &LevelHom, t: &TowerMorphism) -> Result<Vec<i64>> {
    Ok(match (h, t) {
        (LevelHom::Function(v), TowerMorphism::Space(s)) => s.values().iter().map(|&x| v[x] as i64).collect(),
        (LevelHom::Group(h), TowerMorphism::Group(t)) => t.values().iter().map(|&x| h.apply(x) as i64).collect(),
        (LevelHom::Module(h), TowerMorphism::Module(t)) => t.then(h)?.matrix().to_rows().concat(),
        (LevelHom::Tuple(hs), TowerMorphism::Bundle(BundleMorphism::Group(m))) => m
            .homs
            .iter()
            .enumerate()
            .flat_map(|(x, f)| {
                let target = &hs[m.base_map.apply(x)];
                f.values().iter().map(move |&v| target.apply(v) as i64)
            })
            .collect(),
        _ => return Err(Error::KindMismatch("transition does not match the level".into())),
    })
}

/// A left functor `L` and its right partner `R` with `Hom(Lc, d) ≅ Hom(c, Rd)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "pair", rename_all = "kebab-case")]
pub enum RelativeAdjunctionSpec {
    /// Free `R`-module on a finite set, and the underlying set.
    FreeForget { ring: FiniteRing },
    /// Abelianisation, and abelian groups regarded as groups.
    AbelianisationInclusion,
    /// `Ind_H^G` and `Res_H^G`.
    InduceRestrict { inclusion: SubgroupInclusion },
}

impl RelativeAdjunctionSpec {
    pub fn left(&self) -> FibrewiseFunctor {
        match self {
            RelativeAdjunctionSpec::FreeForget { ring } => FibrewiseFunctor::FreeModule { ring: ring.clone() },
            RelativeAdjunctionSpec::AbelianisationInclusion => FibrewiseFunctor::Abelianisation,
            RelativeAdjunctionSpec::InduceRestrict { inclusion } => FibrewiseFunctor::Induce { inclusion: inclusion.clone() },
        }
    }

    pub fn right(&self) -> FibrewiseFunctor {
        match self {
            RelativeAdjunctionSpec::FreeForget { .. } => FibrewiseFunctor::Forget,
            RelativeAdjunctionSpec::AbelianisationInclusion => FibrewiseFunctor::Identity,
            RelativeAdjunctionSpec::InduceRestrict { inclusion } => FibrewiseFunctor::Restrict { inclusion: inclusion.clone() },
        }
    }
}

/// An object `c` for the left functor and `d` for the right one.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AdjunctionSample {
    Set { c: usize, d: Arc<FiniteModule> },
    Group { c: Arc<FiniteGroup>, d: Arc<FiniteGroup> },
    Module { c: Arc<FiniteModule>, d: Arc<FiniteModule> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjunctionReport {
    /// `|Hom(Lc, d)|`.
    pub left_count: u128,
    /// `|Hom(c, Rd)|`.
    pub right_count: u128,
    /// Whether `φ ↦ R(φ) ∘ η_c` was checked to be a bijection.
    pub bijective: bool,
    /// The first few pairs `(φ, R(φ) ∘ η_c)`, flattened.
    pub witness: Vec<(Vec<i64>, Vec<i64>)>,
}

const WITNESS_PAIRS: usize = 8;

/// The transpose `Θ(φ) = R(φ) ∘ η_c` of every `φ: Lc -> d`, with `|Hom(c, Rd)|`
/// and a membership test for the right-hand Hom-set.
struct Transposes {
    pairs: Vec<(Vec<i64>, Vec<i64>)>,
    /// `φ` and, for module-valued right sides, `Θ(φ)` as matrices.
    matrices: Vec<(Matrix, Option<Matrix>)>,
    right_count: u128,
    valid: bool,
}

fn transposes(spec: &RelativeAdjunctionSpec, sample: &AdjunctionSample) -> Result<Transposes> {
    match (spec, sample) {
        (RelativeAdjunctionSpec::FreeForget { ring }, AdjunctionSample::Set { c, d }) => {
            if d.ring() != ring {
                return Err(Error::RingMismatch("sample module is over a different ring".into()));
            }
            let free = free_module(ring, &FiniteSpace::new(*c));
            let hs = HomSet::compute(&free.module, d)?;
            let left = hs.count().filter(|&n| n <= MAX_ENUMERATION).ok_or_else(|| too_many("Hom-set"))?;
            let size = d.order().ok_or_else(|| too_many("module"))?;
            let right_count = size.checked_pow(*c as u32).ok_or_else(|| too_many("function set"))?;
            let mut matrices = Vec::new();
            let pairs = hs
                .group
                .elements()
                .map(|k| {
                    let f = hs.matrix_at(&k);
                    let images = free.basis.iter().map(|b| d.abelian().index_of(&f.apply_mod(b, d.factors())) as i64).collect();
                    let flat = f.to_rows().concat();
                    matrices.push((f, None));
                    (flat, images)
                })
                .collect::<Vec<_>>();
            debug_assert_eq!(pairs.len() as u128, left);
            Ok(Transposes { pairs, matrices, right_count, valid: true })
        }
        (RelativeAdjunctionSpec::AbelianisationInclusion, AdjunctionSample::Group { c, d }) => {
            if !d.is_abelian() {
                return Err(Error::UnsupportedSample("the right-hand object must be abelian".into()));
            }
            let (ab, q) = abelianisation(c);
            let ab = Arc::new(ab);
            let q = GroupHom::new(c.clone(), ab.clone(), q.values().to_vec())?;
            let right: HashSet<Vec<usize>> = enumerate_homs_arc(c, d).into_iter().map(|h| h.values().to_vec()).collect();
            let mut valid = true;
            let pairs = enumerate_homs_arc(&ab, d)
                .into_iter()
                .map(|phi| {
                    let t = q.then(&phi).expect("composable");
                    valid &= right.contains(t.values());
                    (to_i64(phi.values()), to_i64(t.values()))
                })
                .collect();
            Ok(Transposes { pairs, matrices: Vec::new(), right_count: right.len() as u128, valid })
        }
        (RelativeAdjunctionSpec::InduceRestrict { inclusion }, AdjunctionSample::Module { c, d }) => {
            let k = c.ring().base();
            let ind = induce(&k, inclusion, c)?;
            let unit = ind.unit();
            let res_d = Arc::new(restrict(inclusion, d)?);
            let hs = HomSet::compute(&ind.module, d)?;
            hs.count().filter(|&n| n <= MAX_ENUMERATION).ok_or_else(|| too_many("Hom-set"))?;
            let right_count = HomSet::compute(c, &res_d)?.count().ok_or_else(|| too_many("Hom-set"))?;
            let mut valid = true;
            let mut matrices = Vec::new();
            let pairs = hs
                .group
                .elements()
                .map(|k| {
                    let f = hs.matrix_at(&k);
                    let t = f.mul(unit.matrix()).reduced_rows(d.factors());
                    valid &= ModuleHom::new(c.clone(), res_d.clone(), t.clone()).is_ok();
                    let pair = (f.to_rows().concat(), t.to_rows().concat());
                    matrices.push((f, Some(t)));
                    pair
                })
                .collect();
            Ok(Transposes { pairs, matrices, right_count, valid })
        }
        _ => Err(Error::KindMismatch("sample does not match the adjunction".into())),
    }
}

fn to_i64(v: &[usize]) -> Vec<i64> {
    v.iter().map(|&x| x as i64).collect()
}

/// Certifies `Hom(Lc, d) -> Hom(c, Rd)`, `φ ↦ R(φ) ∘ η_c`, as a bijection
/// for each sample: every image is a valid morphism, images are distinct,
/// and both sides have the same size.
pub fn check_relative_adjunction(spec: &RelativeAdjunctionSpec, samples: &[AdjunctionSample]) -> Result<Vec<AdjunctionReport>> {
    samples
        .iter()
        .map(|s| {
            let t = transposes(spec, s)?;
            let distinct: HashSet<&Vec<i64>> = t.pairs.iter().map(|p| &p.1).collect();
            let left_count = t.pairs.len() as u128;
            let bijective = t.valid && distinct.len() == t.pairs.len() && left_count == t.right_count;
            Ok(AdjunctionReport {
                left_count,
                right_count: t.right_count,
                bijective,
                witness: t.pairs.into_iter().take(WITNESS_PAIRS).collect(),
            })
        })
        .collect()
}

/// Naturality in `d` for a morphism `t: d -> d'` of modules:
/// `Θ(t ∘ φ) = R(t) ∘ Θ(φ)` for every `φ: Lc -> d`, checked for the
/// module-valued pairs.
pub fn check_adjunction_naturality(spec: &RelativeAdjunctionSpec, c: &AdjunctionSample, t: &ModuleHom) -> Result<bool> {
    let (before, after) = match c {
        AdjunctionSample::Set { c, .. } => {
            (AdjunctionSample::Set { c: *c, d: t.domain().clone() }, AdjunctionSample::Set { c: *c, d: t.codomain().clone() })
        }
        AdjunctionSample::Module { c, .. } => (
            AdjunctionSample::Module { c: c.clone(), d: t.domain().clone() },
            AdjunctionSample::Module { c: c.clone(), d: t.codomain().clone() },
        ),
        AdjunctionSample::Group { .. } => return Err(Error::KindMismatch("naturality is checked on module maps".into())),
    };
    let left = transposes(spec, &before)?;
    let right: BTreeMap<Vec<i64>, Vec<i64>> = transposes(spec, &after)?.pairs.into_iter().collect();
    let (d, d2) = (t.domain(), t.codomain());
    for ((_, theta), (phi, theta_m)) in left.pairs.iter().zip(&left.matrices) {
        let composed = t.matrix().mul(phi).reduced_rows(d2.factors()).to_rows().concat();
        let Some(theta2) = right.get(&composed) else { return Ok(false) };
        let expected: Vec<i64> = match theta_m {
            None => theta.iter().map(|&i| d2.abelian().index_of(&t.apply(&d.abelian().element_at(i as u128))) as i64).collect(),
            Some(m) => t.matrix().mul(m).reduced_rows(d2.factors()).to_rows().concat(),
        };
        if *theta2 != expected {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Both squares for free modules and underlying sets against their
/// bundle lifts, over the base of `bundle`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourSquareReport {
    /// `forget*(Δ M) = Δ(forget M)` as space bundles.
    pub right_agree: bool,
    /// `R[Y] -> ⊕_x R[Y(x)]` is an equivariant bijection.
    pub left_iso: bool,
    /// The comparison matrix.
    pub witness: Vec<Vec<i64>>,
}

pub fn check_four_square(ring: &FiniteRing, bundle: &SpaceBundle, m: &Arc<FiniteModule>) -> Result<FourSquareReport> {
    if m.ring() != ring {
        return Err(Error::RingMismatch("probe module is over a different ring".into()));
    }
    let x = bundle.base();
    let lifted = lift_functor(&FibrewiseFunctor::Forget, &Bundle::Module(ModuleBundle::constant(m, x)))?;
    let size = m.order().filter(|&o| o <= MAX_ENUMERATION).ok_or_else(|| too_many("module"))?;
    let right_agree = lifted == constant_bundle(&Fibre::Space(size as usize), x);
    let (_, _, map) = free_coproduct_comparison(ring, bundle)?;
    let left_iso = map.is_equivariant() && map.is_bijective();
    Ok(FourSquareReport { right_agree, left_iso, witness: map.matrix().to_rows() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(spec: &str) -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::from_spec(spec).unwrap())
    }

    #[test]
    fn families_from_json() {
        let f: TowerFamily = serde_json::from_str(r#"{"family":"Zmod-chain","base":2}"#).unwrap();
        let t = Tower::from_family(f, 3).unwrap();
        let TowerObject::Group(l) = t.level(2).unwrap() else { panic!() };
        assert_eq!(l.order(), 8);
        assert!(matches!(t.level(4), Err(Error::DepthExceeded { depth: 4, max_depth: 3 })));
        assert!(serde_json::from_str::<TowerFamily>(r#"{"family":"cantor"}"#).is_err());
    }

    #[test]
    fn extending_functors() {
        let t = Tower::constant(TowerObject::Group(g("S3")), 3);
        let ab = extend_functor_levelwise(&FibrewiseFunctor::Abelianisation, &t).unwrap();
        for d in 0..=3 {
            let TowerObject::Group(x) = ab.level(d).unwrap() else { panic!() };
            assert_eq!(x.order(), 2);
        }
        let grow = Tower::from_family(TowerFamily::Growing, 3).unwrap();
        let free = FibrewiseFunctor::FreeModule { ring: FiniteRing::zmod(2).unwrap() };
        let m = extend_functor_levelwise(&free, &grow).unwrap();
        let orders: Vec<u128> = (0..3).map(|d| m.level(d).unwrap().size().unwrap()).collect();
        assert_eq!(orders, vec![2, 4, 8]);
        assert!(matches!(m.transition(1).unwrap(), TowerMorphism::Module(_)));
        let id = extend_functor_levelwise(&FibrewiseFunctor::Identity, &grow).unwrap();
        assert_eq!(id.level(2).unwrap(), grow.level(2).unwrap());
        assert!(extend_functor_levelwise(&FibrewiseFunctor::Abelianisation, &grow).is_err());
        assert!(extend_functor_levelwise(&FibrewiseFunctor::PontryaginDual, &m).is_err());
    }

    #[test]
    fn fingerprints() {
        let chain = Tower::from_family(TowerFamily::ZmodChain { base: 2 }, 3).unwrap();
        let rows = tower_limit_fingerprint(&chain, &[Probe::Group(g("C2")), Probe::Group(g("1")), Probe::Group(g("C4"))], 3).unwrap();
        assert_eq!(rows[0].counts, vec![2; 4]);
        assert_eq!(rows[1].counts, vec![1; 4]);
        assert_eq!(rows[2].counts, vec![2, 4, 4, 4]);
        assert_eq!(rows[2].stable_from, 1);
        let s3 = Tower::constant(TowerObject::Group(g("S3")), 2);
        let rows = tower_limit_fingerprint(&s3, &[Probe::Group(g("C2"))], 2).unwrap();
        assert_eq!(rows[0].counts, vec![2; 3]);
        assert!(tower_limit_fingerprint(&s3, &[], 3).is_err());
    }

    #[test]
    fn converging_to_one_abelianises_to_product() {
        let fam = TowerFamily::ConvergingToOne { groups: vec![GroupInput::Spec("S3".into()), GroupInput::Spec("C2".into())] };
        let t = Tower::from_family(fam, 3).unwrap();
        let ab = extend_functor_levelwise(&FibrewiseFunctor::Abelianisation, &t).unwrap();
        let probe = [Probe::Group(g("C2"))];
        let raw = tower_limit_fingerprint(&t, &probe, 3).unwrap();
        let abel = tower_limit_fingerprint(&ab, &probe, 3).unwrap();
        // Hom into an abelian group cannot tell the bundle from its abelianisation
        assert_eq!(raw, abel);
        assert_eq!(raw[0].counts, vec![1, 2, 4, 8]);
    }

    #[test]
    fn truncation_commutes_with_extension() {
        let grow = Tower::from_family(TowerFamily::Growing, 4).unwrap();
        let f = FibrewiseFunctor::FreeModule { ring: FiniteRing::zmod(3).unwrap() };
        let a = extend_functor_levelwise(&f, &grow.truncate(2).unwrap()).unwrap();
        let b = extend_functor_levelwise(&f, &grow).unwrap().truncate(2).unwrap();
        for d in 0..=2 {
            assert_eq!(a.level(d).unwrap(), b.level(d).unwrap());
        }
        assert_eq!(a.transition(1).unwrap(), b.transition(1).unwrap());
        assert!(a.level(3).is_err());
    }

    #[test]
    fn adjunction_examples() {
        let z4 = FiniteRing::zmod(4).unwrap();
        let z2 = Arc::new(FiniteModule::new(z4.clone(), vec![2], vec![]).unwrap());
        let spec = RelativeAdjunctionSpec::FreeForget { ring: z4 };
        let r = check_relative_adjunction(&spec, &[AdjunctionSample::Set { c: 2, d: z2.clone() }, AdjunctionSample::Set { c: 0, d: z2 }])
            .unwrap();
        assert_eq!((r[0].left_count, r[0].right_count, r[0].bijective), (4, 4, true));
        assert_eq!((r[1].left_count, r[1].right_count, r[1].bijective), (1, 1, true));
        let r = check_relative_adjunction(
            &RelativeAdjunctionSpec::AbelianisationInclusion,
            &[AdjunctionSample::Group { c: g("S3"), d: g("C2") }],
        )
        .unwrap();
        assert_eq!((r[0].left_count, r[0].right_count, r[0].bijective), (2, 2, true));
    }

    #[test]
    fn frobenius_reciprocity() {
        let s3 = g("S3");
        let t = (0..6).find(|&x| s3.element_order(x) == 2).unwrap();
        let incl = SubgroupInclusion::from_elements(&s3, &[s3.identity(), t]).unwrap();
        let small = FiniteRing::GroupAlgebra { n: 2, group: incl.sub().clone() };
        let big = FiniteRing::GroupAlgebra { n: 2, group: s3.clone() };
        let c = Arc::new(FiniteModule::with_trivial_action(&small, &[2]).unwrap());
        let d = Arc::new(crate::finmod::free_module_of_rank(&big, 1));
        let spec = RelativeAdjunctionSpec::InduceRestrict { inclusion: incl };
        let r = check_relative_adjunction(&spec, &[AdjunctionSample::Module { c: c.clone(), d: d.clone() }]).unwrap();
        assert!(r[0].bijective, "{r:?}");
        let id = ModuleHom::identity(d.clone());
        assert!(check_adjunction_naturality(&spec, &AdjunctionSample::Module { c, d }, &id).unwrap());
    }

    #[test]
    fn free_forget_naturality() {
        let z6 = FiniteRing::zmod(6).unwrap();
        let a = Arc::new(FiniteModule::new(z6.clone(), vec![6], vec![]).unwrap());
        let b = Arc::new(FiniteModule::new(z6.clone(), vec![3], vec![]).unwrap());
        let t = ModuleHom::new(a.clone(), b, Matrix::from_rows(&[vec![1]]).unwrap()).unwrap();
        let spec = RelativeAdjunctionSpec::FreeForget { ring: z6 };
        assert!(check_adjunction_naturality(&spec, &AdjunctionSample::Set { c: 2, d: a }, &t).unwrap());
    }

    #[test]
    fn four_square() {
        let ring = FiniteRing::zmod(2).unwrap();
        let y = SpaceBundle::new(SpaceMap::new(FiniteSpace::new(4), FiniteSpace::new(3), vec![2, 0, 2, 1]).unwrap());
        let m = Arc::new(FiniteModule::new(ring.clone(), vec![2, 2], vec![]).unwrap());
        let r = check_four_square(&ring, &y, &m).unwrap();
        assert!(r.right_agree && r.left_iso);
    }
}
