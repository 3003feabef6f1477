//! Bundles of finite spaces, groups and modules over a finite base, their
//! morphisms, internal coproducts, and fibrewise functors.
//!
//! Group-valued internal coproducts and colimits are infinite in general, so
//! they are never built: [`ProGroupByHoms`] keeps the defining data and
//! answers `Hom(-, T)` for finite `T`.

use crate::error::{Error, Result};
use crate::fingroup::{abelianisation, enumerate_homs_arc, FiniteGroup, GroupHom};
use crate::finmod::{
    direct_sum, dual_hom, induce, pontryagin_dual, restrict, restrict_hom, tensor, tor, DirectSum, FiniteModule, FiniteRing, GroupInput,
    ModuleHom, SubgroupInclusion,
};
use crate::finmod::{free_module_of_rank, DEFAULT_MAX_TOR_DEGREE};
use crate::finspace::{fibre, FiniteSpace, SpaceMap};
use crate::internalcat::{AmalgamData, InternalGroupDiagram};
use crate::matrix::Matrix;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// A finite set over each base point, given by its projection `Y -> X`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpaceBundleRepr", into = "SpaceBundleRepr")]
pub struct SpaceBundle {
    projection: SpaceMap,
}

#[derive(Serialize, Deserialize)]
struct SpaceBundleRepr {
    base: usize,
    projection: Vec<usize>,
}

impl TryFrom<SpaceBundleRepr> for SpaceBundle {
    type Error = Error;
    fn try_from(r: SpaceBundleRepr) -> Result<Self> {
        let total = FiniteSpace::new(r.projection.len());
        Ok(SpaceBundle { projection: SpaceMap::new(total, FiniteSpace::new(r.base), r.projection)? })
    }
}

impl From<SpaceBundle> for SpaceBundleRepr {
    fn from(b: SpaceBundle) -> Self {
        SpaceBundleRepr { base: b.projection.codomain().size, projection: b.projection.values().to_vec() }
    }
}

impl SpaceBundle {
    pub fn new(projection: SpaceMap) -> Self {
        SpaceBundle { projection }
    }

    pub fn projection(&self) -> &SpaceMap {
        &self.projection
    }

    pub fn base(&self) -> FiniteSpace {
        self.projection.codomain()
    }

    pub fn total(&self) -> FiniteSpace {
        self.projection.domain()
    }

    pub fn fibre(&self, x: usize) -> Vec<usize> {
        fibre(&self.projection, x).expect("point of the base")
    }

    pub fn fibre_sizes(&self) -> Vec<usize> {
        self.projection.fibre_sizes()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GroupBundleRepr", into = "GroupBundleRepr")]
pub struct GroupBundle {
    fibres: Vec<Arc<FiniteGroup>>,
}

#[derive(Serialize, Deserialize)]
struct GroupBundleRepr {
    base: usize,
    fibres: Vec<GroupInput>,
}

impl TryFrom<GroupBundleRepr> for GroupBundle {
    type Error = Error;
    fn try_from(r: GroupBundleRepr) -> Result<Self> {
        if r.fibres.len() != r.base {
            return Err(Error::InvalidBundle(format!("{} fibres over a base of size {}", r.fibres.len(), r.base)));
        }
        let fibres = r.fibres.into_iter().map(|g| g.resolve().map(Arc::new)).collect::<Result<_>>()?;
        Ok(GroupBundle { fibres })
    }
}

impl From<GroupBundle> for GroupBundleRepr {
    fn from(b: GroupBundle) -> Self {
        GroupBundleRepr { base: b.fibres.len(), fibres: b.fibres.iter().map(|g| GroupInput::Table((**g).clone())).collect() }
    }
}

impl GroupBundle {
    pub fn new(fibres: Vec<Arc<FiniteGroup>>) -> Self {
        GroupBundle { fibres }
    }

    pub fn constant(g: &Arc<FiniteGroup>, x: FiniteSpace) -> Self {
        GroupBundle { fibres: vec![g.clone(); x.size] }
    }

    pub fn base(&self) -> FiniteSpace {
        FiniteSpace::new(self.fibres.len())
    }

    pub fn fibre(&self, x: usize) -> &Arc<FiniteGroup> {
        &self.fibres[x]
    }

    pub fn fibres(&self) -> &[Arc<FiniteGroup>] {
        &self.fibres
    }

    pub fn total_order(&self) -> usize {
        self.fibres.iter().map(|g| g.order()).sum()
    }

    /// `P_0 -> X` with total-space points `(x, g)` in lexicographic order.
    pub fn projection(&self) -> SpaceMap {
        SpaceMap::from_fibre_sizes(&self.fibres.iter().map(|g| g.order()).collect::<Vec<_>>())
    }

    /// The bundle whose fibre over `perm[x]` is the old fibre over `x`.
    pub fn permute_base(&self, perm: &[usize]) -> Self {
        let mut fibres = self.fibres.clone();
        for (x, &y) in perm.iter().enumerate() {
            fibres[y] = self.fibres[x].clone();
        }
        GroupBundle { fibres }
    }

    /// The bundle over the given base points, in the given order.
    pub fn restrict_to(&self, points: &[usize]) -> Self {
        GroupBundle { fibres: points.iter().map(|&x| self.fibres[x].clone()).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ModuleBundleRepr", into = "ModuleBundleRepr")]
pub struct ModuleBundle {
    ring: FiniteRing,
    fibres: Vec<Arc<FiniteModule>>,
}

#[derive(Serialize, Deserialize)]
struct ModuleBundleRepr {
    base: usize,
    ring: FiniteRing,
    fibres: Vec<FiniteModule>,
}

impl TryFrom<ModuleBundleRepr> for ModuleBundle {
    type Error = Error;
    fn try_from(r: ModuleBundleRepr) -> Result<Self> {
        if r.fibres.len() != r.base {
            return Err(Error::InvalidBundle(format!("{} fibres over a base of size {}", r.fibres.len(), r.base)));
        }
        ModuleBundle::new(r.ring, r.fibres.into_iter().map(Arc::new).collect())
    }
}

impl From<ModuleBundle> for ModuleBundleRepr {
    fn from(b: ModuleBundle) -> Self {
        ModuleBundleRepr { base: b.fibres.len(), ring: b.ring, fibres: b.fibres.iter().map(|m| (**m).clone()).collect() }
    }
}

impl ModuleBundle {
    pub fn new(ring: FiniteRing, fibres: Vec<Arc<FiniteModule>>) -> Result<Self> {
        if let Some(m) = fibres.iter().find(|m| *m.ring() != ring) {
            return Err(Error::InvalidBundle(format!("fibre over {} in a bundle over {ring}", m.ring())));
        }
        Ok(ModuleBundle { ring, fibres })
    }

    pub fn constant(m: &Arc<FiniteModule>, x: FiniteSpace) -> Self {
        ModuleBundle { ring: m.ring().clone(), fibres: vec![m.clone(); x.size] }
    }

    pub fn ring(&self) -> &FiniteRing {
        &self.ring
    }

    pub fn base(&self) -> FiniteSpace {
        FiniteSpace::new(self.fibres.len())
    }

    pub fn fibre(&self, x: usize) -> &Arc<FiniteModule> {
        &self.fibres[x]
    }

    pub fn fibres(&self) -> &[Arc<FiniteModule>] {
        &self.fibres
    }

    pub fn permute_base(&self, perm: &[usize]) -> Self {
        let mut fibres = self.fibres.clone();
        for (x, &y) in perm.iter().enumerate() {
            fibres[y] = self.fibres[x].clone();
        }
        ModuleBundle { ring: self.ring.clone(), fibres }
    }

    pub fn restrict_to(&self, points: &[usize]) -> Self {
        ModuleBundle { ring: self.ring.clone(), fibres: points.iter().map(|&x| self.fibres[x].clone()).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Bundle {
    Space(SpaceBundle),
    Group(GroupBundle),
    Module(ModuleBundle),
}

impl Bundle {
    pub fn kind(&self) -> Kind {
        match self {
            Bundle::Space(_) => Kind::Space,
            Bundle::Group(_) => Kind::Group,
            Bundle::Module(_) => Kind::Module,
        }
    }

    pub fn base(&self) -> FiniteSpace {
        match self {
            Bundle::Space(b) => b.base(),
            Bundle::Group(b) => b.base(),
            Bundle::Module(b) => b.base(),
        }
    }

    pub fn fibre(&self, x: usize) -> Fibre {
        match self {
            Bundle::Space(b) => Fibre::Space(b.fibre(x).len()),
            Bundle::Group(b) => Fibre::Group(b.fibre(x).clone()),
            Bundle::Module(b) => Fibre::Module(b.fibre(x).clone()),
        }
    }
}

/// A bundle whose fibres are all `G`.
pub fn constant_bundle(g: &Fibre, x: FiniteSpace) -> Bundle {
    match g {
        Fibre::Space(n) => {
            let values = x.points().flat_map(|p| std::iter::repeat_n(p, *n)).collect();
            Bundle::Space(SpaceBundle::new(SpaceMap::new(FiniteSpace::new(x.size * n), x, values).expect("valid projection")))
        }
        Fibre::Group(g) => Bundle::Group(GroupBundle::constant(g, x)),
        Fibre::Module(m) => Bundle::Module(ModuleBundle::constant(m, x)),
    }
}

/// A morphism `(a, f)`: base map `a: X -> Y` and `f_x: P(x) -> Q(a(x))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupBundleMap {
    pub source: GroupBundle,
    pub target: GroupBundle,
    pub base_map: SpaceMap,
    pub homs: Vec<GroupHom>,
}

impl GroupBundleMap {
    pub fn new(source: GroupBundle, target: GroupBundle, base_map: SpaceMap, homs: Vec<GroupHom>) -> Result<Self> {
        check_base(&base_map, source.base(), target.base(), homs.len())?;
        for (x, h) in homs.iter().enumerate() {
            if **h.domain() != **source.fibre(x) || **h.codomain() != **target.fibre(base_map.apply(x)) {
                return Err(Error::InvalidBundle(format!("fibre homomorphism over {x} has the wrong ends")));
            }
        }
        Ok(GroupBundleMap { source, target, base_map, homs })
    }

    pub fn identity(b: &GroupBundle) -> Self {
        let homs = b.fibres.iter().map(|g| GroupHom::identity(g.clone())).collect();
        GroupBundleMap { source: b.clone(), target: b.clone(), base_map: SpaceMap::identity(b.base()), homs }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModuleBundleMap {
    pub source: ModuleBundle,
    pub target: ModuleBundle,
    pub base_map: SpaceMap,
    pub homs: Vec<ModuleHom>,
}

impl ModuleBundleMap {
    pub fn new(source: ModuleBundle, target: ModuleBundle, base_map: SpaceMap, homs: Vec<ModuleHom>) -> Result<Self> {
        check_base(&base_map, source.base(), target.base(), homs.len())?;
        for (x, h) in homs.iter().enumerate() {
            if **h.domain() != **source.fibre(x) || **h.codomain() != **target.fibre(base_map.apply(x)) {
                return Err(Error::InvalidBundle(format!("fibre homomorphism over {x} has the wrong ends")));
            }
        }
        Ok(ModuleBundleMap { source, target, base_map, homs })
    }

    pub fn identity(b: &ModuleBundle) -> Self {
        let homs = b.fibres.iter().map(|m| ModuleHom::identity(m.clone())).collect();
        ModuleBundleMap { source: b.clone(), target: b.clone(), base_map: SpaceMap::identity(b.base()), homs }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ModuleBundleMap) -> Result<ModuleBundleMap> {
        let base_map = self.base_map.then(&other.base_map)?;
        let homs = self.homs.iter().enumerate().map(|(x, f)| f.then(&other.homs[self.base_map.apply(x)])).collect::<Result<_>>()?;
        Ok(ModuleBundleMap { source: self.source.clone(), target: other.target.clone(), base_map, homs })
    }

    /// Fibrewise kernel for a map over the identity of the base.
    pub fn kernel(&self) -> Result<ModuleBundleMap> {
        self.require_identity_base()?;
        let incl: Vec<ModuleHom> = self.homs.iter().map(ModuleHom::kernel).collect();
        let k = ModuleBundle::new(self.source.ring.clone(), incl.iter().map(|i| i.domain().clone()).collect())?;
        ModuleBundleMap::new(k, self.source.clone(), SpaceMap::identity(self.source.base()), incl)
    }

    /// Fibrewise cokernel for a map over the identity of the base.
    pub fn cokernel(&self) -> Result<ModuleBundleMap> {
        self.require_identity_base()?;
        let proj: Vec<ModuleHom> = self.homs.iter().map(ModuleHom::cokernel).collect();
        let c = ModuleBundle::new(self.target.ring.clone(), proj.iter().map(|p| p.codomain().clone()).collect())?;
        ModuleBundleMap::new(self.target.clone(), c, SpaceMap::identity(self.target.base()), proj)
    }

    fn require_identity_base(&self) -> Result<()> {
        if self.base_map != SpaceMap::identity(self.source.base()) {
            return Err(Error::InvalidBundle("fibrewise kernels need the identity base map".into()));
        }
        Ok(())
    }
}

/// A morphism `P -> Q` of opposite bundles, `P` over `X` and `Q` over `Y`:
/// base map `b: Y -> X` and `g_y: P(b(y)) -> Q(y)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OppositeBundleMap {
    pub source: ModuleBundle,
    pub target: ModuleBundle,
    pub base_map: SpaceMap,
    pub homs: Vec<ModuleHom>,
}

impl OppositeBundleMap {
    pub fn new(source: ModuleBundle, target: ModuleBundle, base_map: SpaceMap, homs: Vec<ModuleHom>) -> Result<Self> {
        check_base(&base_map, target.base(), source.base(), homs.len())?;
        for (y, h) in homs.iter().enumerate() {
            if **h.domain() != **source.fibre(base_map.apply(y)) || **h.codomain() != **target.fibre(y) {
                return Err(Error::InvalidBundle(format!("fibre homomorphism over {y} has the wrong ends")));
            }
        }
        Ok(OppositeBundleMap { source, target, base_map, homs })
    }
}

fn check_base(base_map: &SpaceMap, from: FiniteSpace, to: FiniteSpace, homs: usize) -> Result<()> {
    if base_map.domain() != from || base_map.codomain() != to || homs != from.size {
        return Err(Error::InvalidBundle("base map does not match the bundles".into()));
    }
    Ok(())
}

/// `⊕_x P(x)` with its injections.
pub fn internal_coproduct_modules(b: &ModuleBundle) -> Result<DirectSum> {
    direct_sum(&b.ring, &b.fibres)
}

/// `∐_x P(x)`, represented by its homomorphisms into finite groups.
pub fn internal_coproduct_groups(b: &GroupBundle) -> ProGroupByHoms {
    ProGroupByHoms::Coproduct(b.clone())
}

/// The canonical map `R[Y] -> ⊕_x R[Y(x)]` sending the basis vector of `y`
/// to the basis vector of `y` in the summand over `p(y)`.
pub fn free_coproduct_comparison(ring: &FiniteRing, b: &SpaceBundle) -> Result<(Arc<FiniteModule>, DirectSum, ModuleHom)> {
    let total = Arc::new(free_module_of_rank(ring, b.total().size));
    let fibres: Vec<Vec<usize>> = b.base().points().map(|x| b.fibre(x)).collect();
    let parts: Vec<Arc<FiniteModule>> = fibres.iter().map(|f| Arc::new(free_module_of_rank(ring, f.len()))).collect();
    let sum = direct_sum(ring, &parts)?;
    let go = ring.group_order();
    let mut cols = Vec::with_capacity(total.rank());
    for y in b.total().points() {
        let x = b.projection().apply(y);
        let pos = fibres[x].iter().position(|&z| z == y).expect("y lies in its fibre");
        for g in 0..go {
            let mut v = vec![0; parts[x].rank()];
            v[pos * go + g] = 1;
            cols.push(sum.injections[x].apply(&v));
        }
    }
    let map = ModuleHom::new(total.clone(), sum.module.clone(), Matrix::from_columns(sum.module.rank(), &cols))?;
    Ok((total, sum, map))
}

/// The dual bundle `(P^∨, X)`.
pub fn dualise_bundle(b: &ModuleBundle) -> ModuleBundle {
    ModuleBundle { ring: b.ring.clone(), fibres: b.fibres.iter().map(|m| Arc::new(pontryagin_dual(m))).collect() }
}

/// `(a, f) ↦ (a, f^∨)`, an opposite map from `Q^∨` to `P^∨`.
pub fn dualise_map(f: &ModuleBundleMap) -> OppositeBundleMap {
    let source = dualise_bundle(&f.target);
    let target = dualise_bundle(&f.source);
    let homs = f.homs.iter().map(dual_hom).collect();
    OppositeBundleMap { source, target, base_map: f.base_map.clone(), homs }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Space,
    Group,
    Module,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variance {
    Covariant,
    Contravariant,
}

/// A single fibre: a finite set (by size), a group or a module.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Fibre {
    Space(usize),
    Group(Arc<FiniteGroup>),
    Module(Arc<FiniteModule>),
}

impl Fibre {
    pub fn kind(&self) -> Kind {
        match self {
            Fibre::Space(_) => Kind::Space,
            Fibre::Group(_) => Kind::Group,
            Fibre::Module(_) => Kind::Module,
        }
    }
}

/// A morphism between fibres.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum FibreMap {
    Space(SpaceMap),
    Group(GroupHom),
    Module(ModuleHom),
}

/// The closed registry of functors that can be lifted fibrewise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "kebab-case")]
pub enum FibrewiseFunctor {
    Identity,
    Abelianisation,
    /// Finite set `S ↦ R[S]`.
    FreeModule {
        ring: FiniteRing,
    },
    /// `M ↦ M ⊗_R N`.
    Tensor {
        coefficient: FiniteModule,
    },
    /// `M ↦ Tor_i^R(M, N)`.
    Tor {
        i: usize,
        coefficient: FiniteModule,
    },
    /// `Ind_H^G`, for modules over `kH`.
    Induce {
        inclusion: SubgroupInclusion,
    },
    /// `Res_H^G`, for modules over `kG`.
    Restrict {
        inclusion: SubgroupInclusion,
    },
    PontryaginDual,
    /// Module or group to its underlying finite set.
    Forget,
}

/// Largest underlying set the forgetful functor will materialise.
const MAX_FORGET: u128 = 1 << 16;

impl FibrewiseFunctor {
    pub fn name(&self) -> &'static str {
        match self {
            FibrewiseFunctor::Identity => "identity",
            FibrewiseFunctor::Abelianisation => "abelianisation",
            FibrewiseFunctor::FreeModule { .. } => "free-module",
            FibrewiseFunctor::Tensor { .. } => "tensor",
            FibrewiseFunctor::Tor { .. } => "tor",
            FibrewiseFunctor::Induce { .. } => "induce",
            FibrewiseFunctor::Restrict { .. } => "restrict",
            FibrewiseFunctor::PontryaginDual => "pontryagin-dual",
            FibrewiseFunctor::Forget => "forget",
        }
    }

    /// `None` means any kind is accepted.
    pub fn input_kind(&self) -> Option<Kind> {
        match self {
            FibrewiseFunctor::Identity | FibrewiseFunctor::Forget => None,
            FibrewiseFunctor::Abelianisation => Some(Kind::Group),
            FibrewiseFunctor::FreeModule { .. } => Some(Kind::Space),
            _ => Some(Kind::Module),
        }
    }

    pub fn output_kind(&self, input: Kind) -> Kind {
        match self {
            FibrewiseFunctor::Identity => input,
            FibrewiseFunctor::Abelianisation => Kind::Group,
            FibrewiseFunctor::Forget => Kind::Space,
            _ => Kind::Module,
        }
    }

    pub fn variance(&self) -> Variance {
        match self {
            FibrewiseFunctor::PontryaginDual => Variance::Contravariant,
            _ => Variance::Covariant,
        }
    }

    /// Whether the functor preserves finite coproducts (for the duality,
    /// finite sums read as products).
    pub fn is_additive(&self) -> bool {
        !matches!(self, FibrewiseFunctor::Forget)
    }

    fn check_kind(&self, k: Kind) -> Result<()> {
        match self.input_kind() {
            Some(want) if want != k => Err(Error::KindMismatch(format!("{} expects a {want:?} input, got {k:?}", self.name()))),
            _ => Ok(()),
        }
    }

    pub fn apply_object(&self, x: &Fibre) -> Result<Fibre> {
        self.check_kind(x.kind())?;
        Ok(match (self, x) {
            (FibrewiseFunctor::Identity, _) => x.clone(),
            (FibrewiseFunctor::Abelianisation, Fibre::Group(g)) => Fibre::Group(Arc::new(abelianisation(g).0)),
            (FibrewiseFunctor::FreeModule { ring }, Fibre::Space(n)) => Fibre::Module(Arc::new(free_module_of_rank(ring, *n))),
            (FibrewiseFunctor::Tensor { coefficient }, Fibre::Module(m)) => {
                Fibre::Module(tensor(m, &Arc::new(coefficient.clone()))?.module)
            }
            (FibrewiseFunctor::Tor { i, coefficient }, Fibre::Module(m)) => {
                Fibre::Module(tor(*i, m, &Arc::new(coefficient.clone()))?.module)
            }
            (FibrewiseFunctor::Induce { inclusion }, Fibre::Module(m)) => Fibre::Module(induce(&m.ring().base(), inclusion, m)?.module),
            (FibrewiseFunctor::Restrict { inclusion }, Fibre::Module(m)) => Fibre::Module(Arc::new(restrict(inclusion, m)?)),
            (FibrewiseFunctor::PontryaginDual, Fibre::Module(m)) => Fibre::Module(Arc::new(pontryagin_dual(m))),
            (FibrewiseFunctor::Forget, Fibre::Space(n)) => Fibre::Space(*n),
            (FibrewiseFunctor::Forget, Fibre::Group(g)) => Fibre::Space(g.order()),
            (FibrewiseFunctor::Forget, Fibre::Module(m)) => Fibre::Space(forget_size(m)?),
            _ => unreachable!("kinds checked above"),
        })
    }

    /// The functor on a morphism. For the contravariant duality the result
    /// runs from `F(codomain)` to `F(domain)`.
    pub fn apply_morphism(&self, f: &FibreMap) -> Result<FibreMap> {
        let k = match f {
            FibreMap::Space(_) => Kind::Space,
            FibreMap::Group(_) => Kind::Group,
            FibreMap::Module(_) => Kind::Module,
        };
        self.check_kind(k)?;
        Ok(match (self, f) {
            (FibrewiseFunctor::Identity, _) => f.clone(),
            (FibrewiseFunctor::Abelianisation, FibreMap::Group(h)) => FibreMap::Group(abelianise_hom(h)),
            (FibrewiseFunctor::FreeModule { ring }, FibreMap::Space(s)) => FibreMap::Module(free_module_map(ring, s)),
            (FibrewiseFunctor::Tensor { coefficient }, FibreMap::Module(h)) => {
                let n = Arc::new(coefficient.clone());
                let (a, b) = (tensor(h.domain(), &n)?, tensor(h.codomain(), &n)?);
                FibreMap::Module(a.map_hom(&b, h, &ModuleHom::identity(n)))
            }
            (FibrewiseFunctor::Tor { i, coefficient }, FibreMap::Module(h)) => {
                let n = Arc::new(coefficient.clone());
                if *i > DEFAULT_MAX_TOR_DEGREE {
                    return Err(Error::TorDegree(*i, DEFAULT_MAX_TOR_DEGREE));
                }
                let (a, b) = (tor(*i, h.domain(), &n)?, tor(*i, h.codomain(), &n)?);
                FibreMap::Module(a.map_to(&b, h)?)
            }
            (FibrewiseFunctor::Induce { inclusion }, FibreMap::Module(h)) => {
                let k = h.domain().ring().base();
                let (a, b) = (induce(&k, inclusion, h.domain())?, induce(&k, inclusion, h.codomain())?);
                FibreMap::Module(a.map_hom(&b, h))
            }
            (FibrewiseFunctor::Restrict { inclusion }, FibreMap::Module(h)) => FibreMap::Module(restrict_hom(inclusion, h)?),
            (FibrewiseFunctor::PontryaginDual, FibreMap::Module(h)) => FibreMap::Module(dual_hom(h)),
            (FibrewiseFunctor::Forget, FibreMap::Space(s)) => FibreMap::Space(s.clone()),
            (FibrewiseFunctor::Forget, FibreMap::Group(h)) => {
                let (d, c) = (FiniteSpace::new(h.domain().order()), FiniteSpace::new(h.codomain().order()));
                FibreMap::Space(SpaceMap::new(d, c, h.values().to_vec())?)
            }
            (FibrewiseFunctor::Forget, FibreMap::Module(h)) => FibreMap::Space(forget_module_hom(h)?),
            _ => unreachable!("kinds checked above"),
        })
    }
}

fn forget_size(m: &FiniteModule) -> Result<usize> {
    match m.order() {
        Some(o) if o <= MAX_FORGET => Ok(o as usize),
        _ => Err(Error::TooLarge(format!("underlying set of a module of order above {MAX_FORGET}"))),
    }
}

/// The underlying map of a module homomorphism, on mixed-radix element indices.
pub fn forget_module_hom(h: &ModuleHom) -> Result<SpaceMap> {
    let (d, c) = (forget_size(h.domain())?, forget_size(h.codomain())?);
    let values = h.domain().elements().map(|x| h.codomain().abelian().index_of(&h.apply(&x)) as usize).collect();
    SpaceMap::new(FiniteSpace::new(d), FiniteSpace::new(c), values)
}

/// `R[f]: R[S] -> R[T]` for a map of finite sets.
pub fn free_module_map(ring: &FiniteRing, s: &SpaceMap) -> ModuleHom {
    let a = Arc::new(free_module_of_rank(ring, s.domain().size));
    let b = Arc::new(free_module_of_rank(ring, s.codomain().size));
    let go = ring.group_order();
    let mut m = Matrix::zeros(b.rank(), a.rank());
    for x in s.domain().points() {
        for g in 0..go {
            m.set(s.apply(x) * go + g, x * go + g, 1);
        }
    }
    ModuleHom::new(a, b, m).expect("free maps are equivariant")
}

/// `h^ab: G^ab -> H^ab`.
pub fn abelianise_hom(h: &GroupHom) -> GroupHom {
    let (ga, qg) = abelianisation(h.domain());
    let (ha, qh) = abelianisation(h.codomain());
    let mut values = vec![usize::MAX; ga.order()];
    for x in h.domain().elements() {
        values[qg.apply(x)] = qh.apply(h.apply(x));
    }
    GroupHom::new(Arc::new(ga), Arc::new(ha), values).expect("induced map on abelianisations")
}

/// `F*`: apply `F` to every fibre, keeping the base.
pub fn lift_functor(f: &FibrewiseFunctor, b: &Bundle) -> Result<Bundle> {
    f.check_kind(b.kind())?;
    let fibres: Vec<Fibre> = b.base().points().map(|x| f.apply_object(&b.fibre(x))).collect::<Result<_>>()?;
    match f.output_kind(b.kind()) {
        Kind::Space => {
            let sizes: Vec<usize> = fibres.iter().map(|x| if let Fibre::Space(n) = x { *n } else { unreachable!() }).collect();
            match (f, b) {
                (FibrewiseFunctor::Identity | FibrewiseFunctor::Forget, Bundle::Space(s)) => Ok(Bundle::Space(s.clone())),
                _ => Ok(Bundle::Space(SpaceBundle::new(SpaceMap::from_fibre_sizes(&sizes)))),
            }
        }
        Kind::Group => Ok(Bundle::Group(GroupBundle::new(
            fibres.into_iter().map(|x| if let Fibre::Group(g) = x { g } else { unreachable!() }).collect(),
        ))),
        Kind::Module => {
            let mods: Vec<Arc<FiniteModule>> =
                fibres.into_iter().map(|x| if let Fibre::Module(m) = x { m } else { unreachable!() }).collect();
            let ring = match (mods.first(), f, b) {
                (Some(m), _, _) => m.ring().clone(),
                (None, _, _) => lifted_ring(f, b)?,
            };
            Ok(Bundle::Module(ModuleBundle::new(ring, mods)?))
        }
    }
}

/// The ring of `F(M)` when there is no fibre to read it from.
fn lifted_ring(f: &FibrewiseFunctor, b: &Bundle) -> Result<FiniteRing> {
    let source_ring = || match b {
        Bundle::Module(m) => Ok(m.ring().clone()),
        _ => Err(Error::KindMismatch("expected a module bundle".into())),
    };
    Ok(match f {
        FibrewiseFunctor::FreeModule { ring } => ring.clone(),
        FibrewiseFunctor::Tensor { coefficient } | FibrewiseFunctor::Tor { coefficient, .. } => coefficient.ring().base(),
        FibrewiseFunctor::Induce { inclusion } => {
            FiniteRing::GroupAlgebra { n: source_ring()?.characteristic(), group: inclusion.group().clone() }
        }
        FibrewiseFunctor::Restrict { inclusion } => {
            FiniteRing::GroupAlgebra { n: source_ring()?.characteristic(), group: inclusion.sub().clone() }
        }
        _ => source_ring()?,
    })
}

/// A bundle morphism of either variance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BundleMorphism {
    Group(GroupBundleMap),
    Module(ModuleBundleMap),
    Opposite(OppositeBundleMap),
}

/// `F*` on morphisms: fibrewise, keeping the base map; the duality turns a
/// module bundle map into an opposite map with the same base map.
pub fn lift_morphism(f: &FibrewiseFunctor, m: &BundleMorphism) -> Result<BundleMorphism> {
    match m {
        BundleMorphism::Group(g) => {
            let src = lift_functor(f, &Bundle::Group(g.source.clone()))?;
            let dst = lift_functor(f, &Bundle::Group(g.target.clone()))?;
            let homs: Vec<FibreMap> = g.homs.iter().map(|h| f.apply_morphism(&FibreMap::Group(h.clone()))).collect::<Result<_>>()?;
            match (src, dst) {
                (Bundle::Group(s), Bundle::Group(d)) => {
                    let homs = homs.into_iter().map(|h| if let FibreMap::Group(h) = h { h } else { unreachable!() }).collect();
                    Ok(BundleMorphism::Group(GroupBundleMap::new(s, d, g.base_map.clone(), homs)?))
                }
                _ => Err(Error::KindMismatch(format!("{} on group bundle maps", f.name()))),
            }
        }
        BundleMorphism::Module(g) => {
            let src = lift_functor(f, &Bundle::Module(g.source.clone()))?;
            let dst = lift_functor(f, &Bundle::Module(g.target.clone()))?;
            let (Bundle::Module(s), Bundle::Module(d)) = (src, dst) else {
                return Err(Error::KindMismatch(format!("{} on module bundle maps", f.name())));
            };
            let homs: Vec<ModuleHom> = g
                .homs
                .iter()
                .map(|h| match f.apply_morphism(&FibreMap::Module(h.clone()))? {
                    FibreMap::Module(h) => Ok(h),
                    _ => Err(Error::KindMismatch(format!("{} on module maps", f.name()))),
                })
                .collect::<Result<_>>()?;
            match f.variance() {
                Variance::Covariant => Ok(BundleMorphism::Module(ModuleBundleMap::new(s, d, g.base_map.clone(), homs)?)),
                Variance::Contravariant => Ok(BundleMorphism::Opposite(OppositeBundleMap::new(d, s, g.base_map.clone(), homs)?)),
            }
        }
        BundleMorphism::Opposite(_) => Err(Error::KindMismatch("lifting opposite maps is not supported".into())),
    }
}

/// A profinite group known through `Hom(-, T)` for finite `T`.
///
/// A homomorphism into `T` is a tuple with one component per entry of
/// [`ProGroupByHoms::components`], subject to constraints `α_dst ∘ φ = α_src`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "data", rename_all = "lowercase")]
pub enum ProGroupByHoms {
    Finite(Arc<FiniteGroup>),
    Coproduct(GroupBundle),
    Colimit(InternalGroupDiagram),
    Amalgam(AmalgamData),
}

/// `α_dst ∘ map = α_src`.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub src: usize,
    pub dst: usize,
    pub map: GroupHom,
}

pub type HomTuple = Vec<GroupHom>;

impl ProGroupByHoms {
    pub fn components(&self) -> Vec<Arc<FiniteGroup>> {
        match self {
            ProGroupByHoms::Finite(g) => vec![g.clone()],
            ProGroupByHoms::Coproduct(b) => b.fibres.clone(),
            ProGroupByHoms::Colimit(d) => d.bundle().fibres.clone(),
            ProGroupByHoms::Amalgam(a) => a.components(),
        }
    }

    pub fn constraints(&self) -> Vec<Constraint> {
        match self {
            ProGroupByHoms::Finite(_) | ProGroupByHoms::Coproduct(_) => Vec::new(),
            ProGroupByHoms::Colimit(d) => d.constraints(),
            ProGroupByHoms::Amalgam(a) => a.constraints(),
        }
    }

    /// Every homomorphism into `t`, as component tuples in lexicographic order.
    pub fn homs_to(&self, t: &Arc<FiniteGroup>) -> Vec<HomTuple> {
        let comps = self.components();
        let lists: Vec<Vec<GroupHom>> = comps.iter().map(|g| enumerate_homs_arc(g, t)).collect();
        let cons = self.constraints();
        let mut out = Vec::new();
        let mut chosen: Vec<usize> = Vec::with_capacity(comps.len());
        search(&lists, &cons, &mut chosen, &mut |c| out.push(c.iter().enumerate().map(|(k, &i)| lists[k][i].clone()).collect()));
        out
    }

    /// `|Hom(-, t)|`, multiplying over independent groups of components.
    pub fn count_homs_to(&self, t: &Arc<FiniteGroup>) -> u128 {
        let comps = self.components();
        let lists: Vec<Vec<GroupHom>> = comps.iter().map(|g| enumerate_homs_arc(g, t)).collect();
        let cons = self.constraints();
        let blocks = linked_blocks(comps.len(), &cons);
        blocks
            .iter()
            .map(|block| {
                let pos = |k: usize| block.iter().position(|&b| b == k);
                let sub_lists: Vec<Vec<GroupHom>> = block.iter().map(|&k| lists[k].clone()).collect();
                let sub_cons: Vec<Constraint> =
                    cons.iter().filter_map(|c| Some(Constraint { src: pos(c.src)?, dst: pos(c.dst)?, map: c.map.clone() })).collect();
                let mut n = 0u128;
                search(&sub_lists, &sub_cons, &mut Vec::new(), &mut |_| n += 1);
                n
            })
            .product()
    }

    /// Whether a tuple of homomorphisms satisfies every constraint.
    pub fn accepts(&self, tuple: &[GroupHom]) -> bool {
        let comps = self.components();
        tuple.len() == comps.len()
            && tuple.iter().zip(&comps).all(|(h, g)| **h.domain() == **g)
            && self.constraints().iter().all(|c| satisfied(c, &tuple[c.src], &tuple[c.dst]))
    }
}

/// `(t ∘ α_k)_k`.
pub fn postcompose(tuple: &[GroupHom], t: &GroupHom) -> Result<HomTuple> {
    tuple.iter().map(|h| h.then(t)).collect()
}

fn satisfied(c: &Constraint, src: &GroupHom, dst: &GroupHom) -> bool {
    let d = c.map.domain();
    d.generators().iter().all(|&h| dst.apply(c.map.apply(h)) == src.apply(h))
}

fn search(lists: &[Vec<GroupHom>], cons: &[Constraint], chosen: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
    let k = chosen.len();
    if k == lists.len() {
        emit(chosen);
        return;
    }
    for i in 0..lists[k].len() {
        chosen.push(i);
        let ok =
            cons.iter().filter(|c| c.src.max(c.dst) == k).all(|c| satisfied(c, &lists[c.src][chosen[c.src]], &lists[c.dst][chosen[c.dst]]));
        if ok {
            search(lists, cons, chosen, emit);
        }
        chosen.pop();
    }
}

/// Components joined by constraints, each block sorted.
fn linked_blocks(n: usize, cons: &[Constraint]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for c in cons {
        let (a, b) = (find(&mut parent, c.src), find(&mut parent, c.dst));
        parent[a.max(b)] = a.min(b);
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut root_block = vec![usize::MAX; n];
    for x in 0..n {
        let r = find(&mut parent, x);
        if root_block[r] == usize::MAX {
            root_block[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[root_block[r]].push(x);
    }
    blocks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fingroup::count_homs;
    use crate::finmod::HomSet;

    fn g(spec: &str) -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::from_spec(spec).unwrap())
    }

    #[test]
    fn constant_bundles() {
        let b = GroupBundle::constant(&g("C2"), FiniteSpace::new(3));
        assert_eq!(b.total_order(), 6);
        let b = GroupBundle::constant(&g("1"), FiniteSpace::new(4));
        assert_eq!(b.total_order(), 4);
        assert_eq!(b.projection().fibre_sizes(), vec![1; 4]);
    }

    #[test]
    fn coproduct_hom_counts() {
        let empty = internal_coproduct_groups(&GroupBundle::new(vec![]));
        assert_eq!(empty.homs_to(&g("S3")).len(), 1);
        let single = internal_coproduct_groups(&GroupBundle::new(vec![g("S3")]));
        assert_eq!(single.count_homs_to(&g("C2")), count_homs(&g("S3"), &g("C2")) as u128);
        let two = internal_coproduct_groups(&GroupBundle::new(vec![g("C2"), g("C3")]));
        assert_eq!(two.homs_to(&g("C6")).len(), 6);
        assert_eq!(two.count_homs_to(&g("C6")), 6);
    }

    #[test]
    fn module_coproduct_universal_count() {
        let r = FiniteRing::zmod(6).unwrap();
        let fib = |d| Arc::new(FiniteModule::with_trivial_action(&r, &[d]).unwrap());
        let b = ModuleBundle::new(r.clone(), vec![fib(2), fib(3)]).unwrap();
        let sum = internal_coproduct_modules(&b).unwrap();
        assert_eq!(sum.module.order(), Some(6));
        let m = fib(6);
        let lhs = HomSet::compute(&sum.module, &m).unwrap().count().unwrap();
        let rhs: u128 = b.fibres().iter().map(|f| HomSet::compute(f, &m).unwrap().count().unwrap()).product();
        assert_eq!(lhs, rhs);
        assert!(internal_coproduct_modules(&ModuleBundle::new(r, vec![]).unwrap()).unwrap().module.is_zero());
    }

    #[test]
    fn lifting_abelianisation_and_duality() {
        let b = Bundle::Group(GroupBundle::new(vec![g("S3"), g("C4")]));
        let Bundle::Group(l) = lift_functor(&FibrewiseFunctor::Abelianisation, &b).unwrap() else { panic!() };
        assert_eq!(l.fibres().iter().map(|x| x.order()).collect::<Vec<_>>(), vec![2, 4]);
        assert_eq!(lift_functor(&FibrewiseFunctor::Identity, &b).unwrap(), b);
        assert!(matches!(lift_functor(&FibrewiseFunctor::PontryaginDual, &b), Err(Error::KindMismatch(_))));
        let r = FiniteRing::zmod(4).unwrap();
        let mb = ModuleBundle::new(
            r.clone(),
            vec![
                Arc::new(FiniteModule::new(r.clone(), vec![2], vec![]).unwrap()),
                Arc::new(FiniteModule::new(r, vec![4], vec![]).unwrap()),
            ],
        )
        .unwrap();
        let d = dualise_bundle(&mb);
        assert_eq!(d.fibre(0).factors(), &[2]);
        assert_eq!(d.fibre(1).factors(), &[4]);
        let id = ModuleBundleMap::identity(&mb);
        let dual_id = dualise_map(&id);
        assert!(dual_id.homs.iter().all(|h| *h == ModuleHom::identity(h.domain().clone())));
    }

    #[test]
    fn functor_json() {
        let f: FibrewiseFunctor =
            serde_json::from_str(r#"{"id":"tor","i":1,"coefficient":{"ring":{"kind":"Zmod","n":4},"invariant_factors":[2],"action":[]}}"#)
                .unwrap();
        assert_eq!(f.name(), "tor");
        assert!(serde_json::from_str::<FibrewiseFunctor>(r#"{"id":"ext"}"#).is_err());
    }

    #[test]
    fn bundle_json() {
        let b: Bundle = serde_json::from_str(r#"{"kind":"group","base":2,"fibres":["S3","C4"]}"#).unwrap();
        assert_eq!(b.base().size, 2);
        let round: Bundle = serde_json::from_str(&serde_json::to_string(&b).unwrap()).unwrap();
        assert_eq!(round, b);
        assert!(serde_json::from_str::<Bundle>(r#"{"kind":"group","base":3,"fibres":["S3"]}"#).is_err());
    }
}
