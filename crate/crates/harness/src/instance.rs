//! Seeded generation of check instances.

use crate::bounds::Bounds;
use crate::error::{HarnessError, Result};
use crate::seed;
use crate::theorem::TheoremId;
use bundlecalc_core::bundle::{GroupBundle, ModuleBundle, SpaceBundle};
use bundlecalc_core::fingroup::{builtin_catalog, enumerate_homs_arc, quotient_by_normal_closure, FiniteGroup, GroupHom};
use bundlecalc_core::finmod::{
    direct_sum, free_module_of_rank, induce, submodule, FiniteModule, FiniteRing, HomSet, ModuleHom, SubgroupInclusion,
};
use bundlecalc_core::finspace::{FiniteSpace, SpaceMap};
use bundlecalc_core::internalcat::{discrete_category, AmalgamData, FiniteInternalCategory, InternalGroupDiagram};
use bundlecalc_core::protower::{AdjunctionSample, RelativeAdjunctionSpec};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::sync::{Arc, OnceLock};

/// Largest structure group for induction and restriction instances.
pub const MAX_STRUCTURE_GROUP: usize = 12;
/// Largest object count for diagram shapes.
pub const MAX_SHAPE_OBJECTS: usize = 3;
/// Largest arrow count for diagram shapes.
pub const MAX_SHAPE_ARROWS: usize = 6;
/// Largest vertex group in diagram and discrete instances.
pub const MAX_DIAGRAM_GROUP: usize = 6;

/// The shape behind a diagram payload, which decides the extra comparison
/// made against an ordinary finite colimit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    /// A free category on a random acyclic graph.
    Free,
    /// Two parallel arrows; the colimit is a coequaliser.
    ParallelPair,
    /// `b <- a -> c` with the second leg surjective.
    Span,
}

/// A morphism between two fibres of a bundle, used to sample naturality.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FibreSample {
    pub from: usize,
    pub to: usize,
    pub map: ModuleHom,
}

/// The generated data a theorem is checked on.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Payload {
    GroupBundle { bundle: GroupBundle },
    FreeModule { ring: FiniteRing, bundle: SpaceBundle },
    Tensor { bundle: ModuleBundle, coefficient: Arc<FiniteModule> },
    Tor { degree: usize, bundle: ModuleBundle, coefficient: Arc<FiniteModule> },
    Induction { inclusion: SubgroupInclusion, bundle: ModuleBundle },
    Restriction { inclusion: SubgroupInclusion, bundle: ModuleBundle },
    Involution { bundle: ModuleBundle, samples: Vec<FibreSample> },
    Equivalence { source: ModuleBundle, target: ModuleBundle, base_map: SpaceMap },
    Diagram { shape: Shape, diagram: InternalGroupDiagram },
    Amalgam { amalgam: AmalgamData },
    Adjunction { spec: RelativeAdjunctionSpec, sample: AdjunctionSample, naturality: Option<ModuleHom> },
    FourSquare { ring: FiniteRing, bundle: SpaceBundle, module: Arc<FiniteModule> },
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::GroupBundle { .. } => "group-bundle",
            Payload::FreeModule { .. } => "free-module",
            Payload::Tensor { .. } => "tensor",
            Payload::Tor { .. } => "tor",
            Payload::Induction { .. } => "induction",
            Payload::Restriction { .. } => "restriction",
            Payload::Involution { .. } => "involution",
            Payload::Equivalence { .. } => "equivalence",
            Payload::Diagram { .. } => "diagram",
            Payload::Amalgam { .. } => "amalgam",
            Payload::Adjunction { .. } => "adjunction",
            Payload::FourSquare { .. } => "four-square",
        }
    }

    /// Whether `theorem` can be checked on this payload.
    pub fn fits(&self, theorem: TheoremId) -> bool {
        use TheoremId::*;
        matches!(
            (theorem, self),
            (AbelianisationCoproduct | DiscreteColimitAgreement, Payload::GroupBundle { .. })
                | (FreeModuleCoproduct, Payload::FreeModule { .. })
                | (TensorCoproduct, Payload::Tensor { .. })
                | (TorCoproduct, Payload::Tor { .. })
                | (InductionCoproduct, Payload::Induction { .. })
                | (RestrictionCoproduct, Payload::Restriction { .. })
                | (DualityInvolution, Payload::Involution { .. })
                | (DualityEquivalence, Payload::Equivalence { .. })
                | (ColimitCoequaliser, Payload::Diagram { .. } | Payload::Amalgam { .. })
                | (RelativeAdjunction, Payload::Adjunction { .. })
                | (FourSquare, Payload::FourSquare { .. })
        )
    }

    /// Number of base points, for payloads that are bundles over a base.
    pub fn base_size(&self) -> Option<usize> {
        Some(match self {
            Payload::GroupBundle { bundle } => bundle.base().size,
            Payload::FreeModule { bundle, .. } | Payload::FourSquare { bundle, .. } => bundle.base().size,
            Payload::Tensor { bundle, .. }
            | Payload::Tor { bundle, .. }
            | Payload::Induction { bundle, .. }
            | Payload::Restriction { bundle, .. }
            | Payload::Involution { bundle, .. } => bundle.base().size,
            Payload::Equivalence { source, .. } => source.base().size,
            Payload::Diagram { diagram, .. } => diagram.category().objects().size,
            Payload::Amalgam { amalgam } => amalgam.base().size,
            Payload::Adjunction { .. } => return None,
        })
    }

    /// The payload with base point `x` and everything over it removed, if
    /// that still makes sense.
    pub fn without_point(&self, x: usize) -> Option<Payload> {
        let n = self.base_size()?;
        if x >= n {
            return None;
        }
        let keep: Vec<usize> = (0..n).filter(|&y| y != x).collect();
        Some(match self {
            Payload::GroupBundle { bundle } => Payload::GroupBundle { bundle: bundle.restrict_to(&keep) },
            Payload::FreeModule { ring, bundle } => {
                Payload::FreeModule { ring: ring.clone(), bundle: restrict_space_bundle(bundle, &keep) }
            }
            Payload::FourSquare { ring, bundle, module } => {
                Payload::FourSquare { ring: ring.clone(), bundle: restrict_space_bundle(bundle, &keep), module: module.clone() }
            }
            Payload::Tensor { bundle, coefficient } => {
                Payload::Tensor { bundle: bundle.restrict_to(&keep), coefficient: coefficient.clone() }
            }
            Payload::Tor { degree, bundle, coefficient } => {
                Payload::Tor { degree: *degree, bundle: bundle.restrict_to(&keep), coefficient: coefficient.clone() }
            }
            Payload::Induction { inclusion, bundle } => {
                Payload::Induction { inclusion: inclusion.clone(), bundle: bundle.restrict_to(&keep) }
            }
            Payload::Restriction { inclusion, bundle } => {
                Payload::Restriction { inclusion: inclusion.clone(), bundle: bundle.restrict_to(&keep) }
            }
            Payload::Involution { bundle, samples } => {
                let re = |y: usize| if y > x { y - 1 } else { y };
                let samples = samples
                    .iter()
                    .filter(|s| s.from != x && s.to != x)
                    .map(|s| FibreSample { from: re(s.from), to: re(s.to), map: s.map.clone() })
                    .collect();
                Payload::Involution { bundle: bundle.restrict_to(&keep), samples }
            }
            Payload::Equivalence { source, target, base_map } => {
                let values = keep.iter().map(|&y| base_map.apply(y)).collect();
                let base_map = SpaceMap::new(FiniteSpace::new(keep.len()), base_map.codomain(), values).ok()?;
                Payload::Equivalence { source: source.restrict_to(&keep), target: target.clone(), base_map }
            }
            Payload::Amalgam { amalgam } => {
                let theta = keep.iter().map(|&y| amalgam.theta(y).clone()).collect();
                Payload::Amalgam { amalgam: AmalgamData::new(amalgam.shared().clone(), theta).ok()? }
            }
            Payload::Diagram { .. } | Payload::Adjunction { .. } => return None,
        })
    }

    /// The payload with base point `x` moved to `perm[x]`.
    pub fn permute_base(&self, perm: &[usize]) -> Result<Payload> {
        let n = self.base_size().unwrap_or(0);
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&y| y >= n || std::mem::replace(&mut seen[y], true)) {
            return Err(HarnessError::Core(bundlecalc_core::error::Error::InvalidSpaceMap("not a permutation of the base".into())));
        }
        let relabel = SpaceMap::new(FiniteSpace::new(n), FiniteSpace::new(n), perm.to_vec())?;
        Ok(match self {
            Payload::GroupBundle { bundle } => Payload::GroupBundle { bundle: bundle.permute_base(perm) },
            Payload::FreeModule { ring, bundle } => {
                Payload::FreeModule { ring: ring.clone(), bundle: SpaceBundle::new(bundle.projection().then(&relabel)?) }
            }
            Payload::FourSquare { ring, bundle, module } => Payload::FourSquare {
                ring: ring.clone(),
                bundle: SpaceBundle::new(bundle.projection().then(&relabel)?),
                module: module.clone(),
            },
            Payload::Tensor { bundle, coefficient } => {
                Payload::Tensor { bundle: bundle.permute_base(perm), coefficient: coefficient.clone() }
            }
            Payload::Tor { degree, bundle, coefficient } => {
                Payload::Tor { degree: *degree, bundle: bundle.permute_base(perm), coefficient: coefficient.clone() }
            }
            Payload::Induction { inclusion, bundle } => {
                Payload::Induction { inclusion: inclusion.clone(), bundle: bundle.permute_base(perm) }
            }
            Payload::Restriction { inclusion, bundle } => {
                Payload::Restriction { inclusion: inclusion.clone(), bundle: bundle.permute_base(perm) }
            }
            Payload::Involution { bundle, samples } => Payload::Involution {
                bundle: bundle.permute_base(perm),
                samples: samples.iter().map(|s| FibreSample { from: perm[s.from], to: perm[s.to], map: s.map.clone() }).collect(),
            },
            Payload::Equivalence { source, target, base_map } => {
                let mut values = vec![0; n];
                for x in 0..n {
                    values[perm[x]] = base_map.apply(x);
                }
                let base_map = SpaceMap::new(FiniteSpace::new(n), base_map.codomain(), values)?;
                Payload::Equivalence { source: source.permute_base(perm), target: target.clone(), base_map }
            }
            Payload::Diagram { shape, diagram } => Payload::Diagram { shape: *shape, diagram: diagram.permute_objects(perm)? },
            Payload::Amalgam { amalgam } => {
                let mut theta = vec![None; n];
                for x in 0..n {
                    theta[perm[x]] = Some(amalgam.theta(x).clone());
                }
                Payload::Amalgam { amalgam: AmalgamData::new(amalgam.shared().clone(), theta.into_iter().flatten().collect())? }
            }
            Payload::Adjunction { .. } => self.clone(),
        })
    }
}

fn restrict_space_bundle(b: &SpaceBundle, keep: &[usize]) -> SpaceBundle {
    let mut values = Vec::new();
    for (i, &x) in keep.iter().enumerate() {
        values.extend(std::iter::repeat_n(i, b.fibre(x).len()));
    }
    SpaceBundle::new(SpaceMap::new(FiniteSpace::new(values.len()), FiniteSpace::new(keep.len()), values).expect("values in range"))
}

/// A payload together with everything needed to regenerate it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckInstance {
    pub theorem: TheoremId,
    pub seed: u64,
    pub bounds: Bounds,
    pub payload: Payload,
}

impl CheckInstance {
    /// Canonical JSON of the whole instance.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instances serialize")
    }

    /// SHA-256 of [`CheckInstance::to_json`], hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }
}

/// Generates the instance for `(theorem, seed, bounds)`. The same inputs
/// always give the same instance.
pub fn gen_instance(theorem: TheoremId, seed: u64, bounds: &Bounds) -> Result<CheckInstance> {
    bounds.validate()?;
    let mut rng = seed::rng(seed, theorem.index() as u64);
    let g = Gen { rng: &mut rng, bounds };
    let payload = g.payload(theorem)?;
    Ok(CheckInstance { theorem, seed, bounds: *bounds, payload })
}

fn catalog() -> &'static [Arc<FiniteGroup>] {
    static CATALOG: OnceLock<Vec<Arc<FiniteGroup>>> = OnceLock::new();
    CATALOG.get_or_init(|| builtin_catalog(crate::bounds::CAP_FIBRE_ORDER).into_iter().map(|(_, g)| Arc::new(g)).collect())
}

fn divisors(n: i64) -> Vec<i64> {
    (2..=n).filter(|d| n % d == 0).collect()
}

struct Gen<'a> {
    rng: &'a mut ChaCha8Rng,
    bounds: &'a Bounds,
}

impl Gen<'_> {
    fn payload(mut self, theorem: TheoremId) -> Result<Payload> {
        use TheoremId::*;
        Ok(match theorem {
            AbelianisationCoproduct => {
                let x = self.base(self.bounds.max_base);
                let fibres = (0..x).map(|_| self.group(self.bounds.max_fibre_order)).collect();
                Payload::GroupBundle { bundle: GroupBundle::new(fibres) }
            }
            DiscreteColimitAgreement => {
                let x = self.base(self.bounds.max_base.min(MAX_SHAPE_OBJECTS));
                let fibres = (0..x).map(|_| self.group(self.bounds.max_fibre_order.min(MAX_DIAGRAM_GROUP))).collect();
                Payload::GroupBundle { bundle: GroupBundle::new(fibres) }
            }
            FreeModuleCoproduct => {
                let ring = FiniteRing::zmod(self.ring_from(&[2, 3, 4, 6, 8]))?;
                Payload::FreeModule { ring, bundle: self.space_bundle(3) }
            }
            TensorCoproduct | TorCoproduct => {
                let ring = self.homological_ring()?;
                let x = self.base(self.bounds.max_base);
                let fibres = (0..x).map(|_| self.module(&ring, self.bounds.max_fibre_order)).collect::<Result<_>>()?;
                let bundle = ModuleBundle::new(ring.clone(), fibres)?;
                let coefficient = self.module(&ring, self.bounds.max_fibre_order.min(16))?;
                if theorem == TensorCoproduct {
                    Payload::Tensor { bundle, coefficient }
                } else {
                    Payload::Tor { degree: self.rng.gen_range(0..=2), bundle, coefficient }
                }
            }
            InductionCoproduct | RestrictionCoproduct => {
                let k = self.ring_from(&[2, 3]);
                let inclusion = self.inclusion()?;
                let group = if theorem == InductionCoproduct { inclusion.sub().clone() } else { inclusion.group().clone() };
                let ring = FiniteRing::GroupAlgebra { n: k, group };
                let x = self.base(self.bounds.max_base);
                let fibres = (0..x).map(|_| self.module(&ring, self.bounds.max_fibre_order)).collect::<Result<_>>()?;
                let bundle = ModuleBundle::new(ring, fibres)?;
                if theorem == InductionCoproduct {
                    Payload::Induction { inclusion, bundle }
                } else {
                    Payload::Restriction { inclusion, bundle }
                }
            }
            DualityInvolution => {
                let ring = self.duality_ring()?;
                let x = self.base(self.bounds.max_base);
                let fibres: Vec<Arc<FiniteModule>> =
                    (0..x).map(|_| self.module(&ring, self.bounds.max_fibre_order)).collect::<Result<_>>()?;
                let mut samples = Vec::new();
                for _ in 0..3 {
                    let (from, to) = (self.rng.gen_range(0..x), self.rng.gen_range(0..x));
                    if let Some(map) = self.random_hom(&fibres[from], &fibres[to])? {
                        samples.push(FibreSample { from, to, map });
                    }
                }
                Payload::Involution { bundle: ModuleBundle::new(ring, fibres)?, samples }
            }
            DualityEquivalence => {
                let ring = self.duality_ring()?;
                let cap = self.bounds.max_fibre_order.min(16);
                let (x, y) = (self.base(self.bounds.max_base), self.base(self.bounds.max_base));
                let source = (0..x).map(|_| self.module(&ring, cap)).collect::<Result<_>>()?;
                let target = (0..y).map(|_| self.module(&ring, cap)).collect::<Result<_>>()?;
                let values = (0..x).map(|_| self.rng.gen_range(0..y)).collect();
                Payload::Equivalence {
                    source: ModuleBundle::new(ring.clone(), source)?,
                    target: ModuleBundle::new(ring, target)?,
                    base_map: SpaceMap::new(FiniteSpace::new(x), FiniteSpace::new(y), values)?,
                }
            }
            ColimitCoequaliser => match self.rng.gen_range(0..4) {
                0 => self.free_diagram()?,
                1 => self.parallel_pair()?,
                2 => self.span()?,
                _ => self.amalgam()?,
            },
            RelativeAdjunction => self.adjunction()?,
            FourSquare => {
                let n = self.rng.gen_range(2..=self.bounds.max_ring as i64);
                let ring = FiniteRing::zmod(n)?;
                let module = self.module(&ring, self.bounds.max_fibre_order.min(16))?;
                Payload::FourSquare { bundle: self.space_bundle(2), ring, module }
            }
        })
    }

    fn base(&mut self, max: usize) -> usize {
        self.rng.gen_range(1..=max.max(1))
    }

    fn pick<T: Clone>(&mut self, items: &[T]) -> T {
        items.choose(self.rng).expect("nonempty choice").clone()
    }

    fn group(&mut self, max_order: usize) -> Arc<FiniteGroup> {
        let options: Vec<Arc<FiniteGroup>> = catalog().iter().filter(|g| g.order() <= max_order).cloned().collect();
        self.pick(&options)
    }

    fn ring_from(&mut self, ns: &[i64]) -> i64 {
        let allowed: Vec<i64> = ns.iter().copied().filter(|&n| n <= self.bounds.max_ring as i64).collect();
        if allowed.is_empty() {
            2
        } else {
            self.pick(&allowed)
        }
    }

    fn homological_ring(&mut self) -> Result<FiniteRing> {
        let mut options = vec![FiniteRing::GroupAlgebra { n: 2, group: Arc::new(FiniteGroup::cyclic(2)) }];
        for n in [4, 6] {
            if n <= self.bounds.max_ring as i64 {
                options.insert(options.len() - 1, FiniteRing::zmod(n)?);
            }
        }
        Ok(self.pick(&options))
    }

    fn duality_ring(&mut self) -> Result<FiniteRing> {
        if self.rng.gen_bool(0.7) {
            return FiniteRing::zmod(self.rng.gen_range(2..=self.bounds.max_ring as i64)).map_err(Into::into);
        }
        let group = self.pick(&[FiniteGroup::cyclic(2), FiniteGroup::cyclic(3), FiniteGroup::symmetric(3)]);
        let n = self.ring_from(&[2, 3]);
        Ok(FiniteRing::GroupAlgebra { n, group: Arc::new(group) })
    }

    /// A bundle of finite sets with fibres of size at most `max_fibre`.
    fn space_bundle(&mut self, max_fibre: usize) -> SpaceBundle {
        let x = self.base(self.bounds.max_base);
        let sizes: Vec<usize> = (0..x).map(|_| self.rng.gen_range(0..=max_fibre)).collect();
        SpaceBundle::new(SpaceMap::from_fibre_sizes(&sizes))
    }

    /// A subgroup of a group of order at most 12.
    fn inclusion(&mut self) -> Result<SubgroupInclusion> {
        let g = self.group(MAX_STRUCTURE_GROUP);
        let gens: Vec<usize> = (0..self.rng.gen_range(1..=2)).map(|_| self.rng.gen_range(0..g.order())).collect();
        let elements = g.subgroup_closure(&gens);
        Ok(SubgroupInclusion::from_elements(&g, &elements)?)
    }

    fn module(&mut self, ring: &FiniteRing, max_order: usize) -> Result<Arc<FiniteModule>> {
        let max_order = max_order.max(1) as u128;
        // mostly nonzero; the zero module still turns up now and then
        let parts = if self.rng.gen_ratio(1, 8) { 0 } else { self.rng.gen_range(1..=2) };
        let mut chosen: Vec<Arc<FiniteModule>> = Vec::new();
        let mut order = 1u128;
        for _ in 0..parts {
            let m = match ring {
                FiniteRing::Zmod { n } => {
                    let d = self.pick(&divisors(*n));
                    Arc::new(FiniteModule::with_trivial_action(ring, &[d])?)
                }
                FiniteRing::GroupAlgebra { .. } => self.algebra_module(ring, max_order / order)?,
            };
            let o = m.order().unwrap_or(u128::MAX);
            if order.saturating_mul(o) <= max_order {
                order *= o;
                chosen.push(m);
            }
        }
        Ok(direct_sum(ring, &chosen)?.module)
    }

    /// One indecomposable-ish piece: trivial, free, cyclic in a free
    /// module, or a permutation module, whichever fits.
    fn algebra_module(&mut self, ring: &FiniteRing, max_order: u128) -> Result<Arc<FiniteModule>> {
        let FiniteRing::GroupAlgebra { n, group } = ring else { unreachable!("group algebra") };
        let free_order = (*n as u128).checked_pow(group.order() as u32).unwrap_or(u128::MAX);
        let d = self.pick(&divisors(*n));
        let trivial = Arc::new(FiniteModule::with_trivial_action(ring, &[d])?);
        match self.rng.gen_range(0..4) {
            1 if free_order <= max_order => Ok(Arc::new(free_module_of_rank(ring, 1))),
            2 if free_order <= max_order => {
                let free = free_module_of_rank(ring, 1);
                let v: Vec<i64> = free.factors().iter().map(|&f| self.rng.gen_range(0..f)).collect();
                Ok(Arc::new(submodule(&free, &[v]).0))
            }
            3 => {
                let gens = vec![self.rng.gen_range(0..group.order())];
                let elements = group.subgroup_closure(&gens);
                let incl = SubgroupInclusion::from_elements(group, &elements)?;
                let size = (*n as u128).checked_pow(incl.index() as u32).unwrap_or(u128::MAX);
                if size > max_order {
                    return Ok(trivial);
                }
                let small = FiniteRing::GroupAlgebra { n: *n, group: incl.sub().clone() };
                let k = FiniteRing::zmod(*n)?;
                let one = Arc::new(FiniteModule::with_trivial_action(&small, &[*n])?);
                let perm = induce(&k, &incl, &one)?.module;
                // rebuild over the exact ring value used by the bundle
                Ok(Arc::new(FiniteModule::new(ring.clone(), perm.factors().to_vec(), perm.action().to_vec())?))
            }
            _ => Ok(trivial),
        }
    }

    fn random_hom(&mut self, m: &Arc<FiniteModule>, n: &Arc<FiniteModule>) -> Result<Option<ModuleHom>> {
        let hs = HomSet::compute(m, n)?;
        let Some(count) = hs.count() else { return Ok(None) };
        let coords = hs.group.element_at(self.rng.gen_range(0..count));
        Ok(Some(ModuleHom::new(m.clone(), n.clone(), hs.matrix_at(&coords))?))
    }

    fn random_group_hom(&mut self, a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> GroupHom {
        let homs = enumerate_homs_arc(a, b);
        self.pick(&homs)
    }

    fn diagram_group(&mut self) -> Arc<FiniteGroup> {
        self.group(self.bounds.max_fibre_order.min(MAX_DIAGRAM_GROUP))
    }

    /// Extends edge images to every arrow of a free category.
    fn free_diagram_on(
        &mut self,
        cat: FiniteInternalCategory,
        fibres: Vec<Arc<FiniteGroup>>,
        edges: &[(usize, usize)],
        edge_maps: Vec<GroupHom>,
    ) -> Result<InternalGroupDiagram> {
        let a1 = cat.arrows().size;
        let mut maps: Vec<Option<GroupHom>> = vec![None; a1];
        for a in 0..cat.objects().size {
            maps[cat.identity(a)] = Some(GroupHom::identity(fibres[a].clone()));
        }
        let first_edge = cat.objects().size;
        for (i, m) in edge_maps.into_iter().enumerate() {
            debug_assert_eq!((cat.source(first_edge + i), cat.target(first_edge + i)), edges[i]);
            maps[first_edge + i] = Some(m);
        }
        let pairs: Vec<(usize, usize, usize)> = cat.composable_pairs().collect();
        while maps.iter().any(Option::is_none) {
            for &(f, g, h) in &pairs {
                if maps[h].is_none() {
                    if let (Some(mf), Some(mg)) = (&maps[f], &maps[g]) {
                        maps[h] = Some(mf.then(mg)?);
                    }
                }
            }
        }
        Ok(InternalGroupDiagram::new(cat, GroupBundle::new(fibres), maps.into_iter().flatten().collect())?)
    }

    fn free_diagram(&mut self) -> Result<Payload> {
        let objects = self.base(self.bounds.max_base.min(MAX_SHAPE_OBJECTS));
        let cat_and_edges = loop {
            let mut edges = Vec::new();
            for s in 0..objects {
                for t in s + 1..objects {
                    for _ in 0..self.rng.gen_range(0..=2) {
                        edges.push((s, t));
                    }
                }
            }
            let cat = FiniteInternalCategory::free_on_acyclic_graph(objects, &edges)?;
            if cat.arrows().size <= MAX_SHAPE_ARROWS {
                break (cat, edges);
            }
        };
        let (cat, edges) = cat_and_edges;
        let fibres: Vec<Arc<FiniteGroup>> = (0..objects).map(|_| self.diagram_group()).collect();
        let edge_maps = edges.iter().map(|&(s, t)| self.random_group_hom(&fibres[s], &fibres[t])).collect();
        let diagram = self.free_diagram_on(cat, fibres, &edges, edge_maps)?;
        Ok(Payload::Diagram { shape: Shape::Free, diagram })
    }

    fn parallel_pair(&mut self) -> Result<Payload> {
        let edges = [(0, 1), (0, 1)];
        let cat = FiniteInternalCategory::free_on_acyclic_graph(2, &edges)?;
        let fibres = vec![self.diagram_group(), self.diagram_group()];
        let edge_maps = vec![self.random_group_hom(&fibres[0], &fibres[1]), self.random_group_hom(&fibres[0], &fibres[1])];
        let diagram = self.free_diagram_on(cat, fibres, &edges, edge_maps)?;
        Ok(Payload::Diagram { shape: Shape::ParallelPair, diagram })
    }

    fn span(&mut self) -> Result<Payload> {
        let edges = [(0, 1), (0, 2)];
        let cat = FiniteInternalCategory::free_on_acyclic_graph(3, &edges)?;
        let a = self.diagram_group();
        let b = self.diagram_group();
        let relators: Vec<usize> = (0..self.rng.gen_range(0..=1)).map(|_| self.rng.gen_range(0..a.order())).collect();
        let (c, q) = quotient_by_normal_closure(&a, &relators);
        let c = Arc::new(c);
        let g = GroupHom::new(a.clone(), c.clone(), q.values().to_vec())?;
        let f = self.random_group_hom(&a, &b);
        let diagram = self.free_diagram_on(cat, vec![a, b, c], &edges, vec![f, g])?;
        Ok(Payload::Diagram { shape: Shape::Span, diagram })
    }

    fn amalgam(&mut self) -> Result<Payload> {
        let x = self.base(self.bounds.max_base.min(MAX_SHAPE_OBJECTS - 1));
        let h = self.group(self.bounds.max_fibre_order.min(MAX_DIAGRAM_GROUP).min(3));
        let mut theta = Vec::new();
        while theta.len() < x {
            let g = self.diagram_group();
            let injective: Vec<GroupHom> = enumerate_homs_arc(&h, &g).into_iter().filter(GroupHom::is_injective).collect();
            if !injective.is_empty() {
                theta.push(self.pick(&injective));
            }
        }
        Ok(Payload::Amalgam { amalgam: AmalgamData::new(h, theta)? })
    }

    fn adjunction(&mut self) -> Result<Payload> {
        let cap = self.bounds.max_fibre_order.min(16);
        match self.rng.gen_range(0..3) {
            0 => {
                let n = self.rng.gen_range(2..=self.bounds.max_ring as i64);
                let ring = FiniteRing::zmod(n)?;
                let d = self.module(&ring, cap)?;
                let mut c = self.rng.gen_range(0..=3u32);
                while d.order().is_none_or(|o| o.checked_pow(c).is_none_or(|p| p > 1 << 16)) {
                    c -= 1;
                }
                let d2 = self.module(&ring, cap)?;
                let naturality = self.random_hom(&d, &d2)?;
                Ok(Payload::Adjunction {
                    spec: RelativeAdjunctionSpec::FreeForget { ring },
                    sample: AdjunctionSample::Set { c: c as usize, d },
                    naturality,
                })
            }
            1 => {
                let c = self.group(self.bounds.max_fibre_order);
                let abelian: Vec<Arc<FiniteGroup>> =
                    catalog().iter().filter(|g| g.is_abelian() && g.order() <= self.bounds.max_test_order).cloned().collect();
                let d = self.pick(&abelian);
                Ok(Payload::Adjunction {
                    spec: RelativeAdjunctionSpec::AbelianisationInclusion,
                    sample: AdjunctionSample::Group { c, d },
                    naturality: None,
                })
            }
            _ => {
                let inclusion = loop {
                    let i = self.inclusion()?;
                    if i.group().order() <= 6 {
                        break i;
                    }
                };
                let k = 2;
                let small = FiniteRing::GroupAlgebra { n: k, group: inclusion.sub().clone() };
                let big = FiniteRing::GroupAlgebra { n: k, group: inclusion.group().clone() };
                let c = self.module(&small, 8)?;
                let d = self.module(&big, 16)?;
                let d2 = self.module(&big, 16)?;
                let naturality = self.random_hom(&d, &d2)?;
                Ok(Payload::Adjunction {
                    spec: RelativeAdjunctionSpec::InduceRestrict { inclusion },
                    sample: AdjunctionSample::Module { c, d },
                    naturality,
                })
            }
        }
    }
}

/// The identity bundle over `X`, as a discrete diagram.
pub fn discrete_diagram(bundle: &GroupBundle) -> Result<InternalGroupDiagram> {
    let maps = bundle.fibres().iter().map(|g| GroupHom::identity(g.clone())).collect();
    Ok(InternalGroupDiagram::new(discrete_category(bundle.base()), bundle.clone(), maps)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        for t in TheoremId::ALL {
            for seed in 0..4 {
                let a = gen_instance(t, seed, &Bounds::default()).unwrap();
                let b = gen_instance(t, seed, &Bounds::default()).unwrap();
                assert_eq!(a.to_json(), b.to_json(), "{t} {seed}");
                assert!(a.payload.fits(t));
            }
        }
    }

    #[test]
    fn single_point_bases() {
        let b = Bounds { max_base: 1, ..Bounds::default() };
        for t in TheoremId::ALL {
            for seed in 0..4 {
                let i = gen_instance(t, seed, &b).unwrap();
                if let Some(n) = i.payload.base_size() {
                    match i.payload {
                        Payload::Diagram { .. } => {}
                        _ => assert_eq!(n, 1, "{t}"),
                    }
                }
            }
        }
    }

    #[test]
    fn instances_round_trip_through_json() {
        for t in TheoremId::ALL {
            let i = gen_instance(t, 7, &Bounds::default()).unwrap();
            let back: CheckInstance = serde_json::from_str(&i.to_json()).unwrap();
            assert_eq!(back.to_json(), i.to_json(), "{t}");
        }
    }

    #[test]
    fn bounds_over_the_caps_are_rejected() {
        let b = Bounds { max_fibre_order: 100, ..Bounds::default() };
        assert!(gen_instance(TheoremId::TorCoproduct, 1, &b).is_err());
    }

    #[test]
    fn removing_and_permuting_points() {
        let i = gen_instance(TheoremId::DualityEquivalence, 3, &Bounds::default()).unwrap();
        let n = i.payload.base_size().unwrap();
        let perm: Vec<usize> = (0..n).rev().collect();
        let p = i.payload.permute_base(&perm).unwrap();
        assert_eq!(p.base_size(), Some(n));
        if n > 1 {
            assert_eq!(i.payload.without_point(0).unwrap().base_size(), Some(n - 1));
        }
        assert!(i.payload.permute_base(&vec![0; n + 1]).is_err());
    }
}
