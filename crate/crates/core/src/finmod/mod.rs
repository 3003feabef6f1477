//! Finite modules over `Z/n` and over group algebras `(Z/n)[G]`.
//!
//! A module is a finite abelian group in invariant-factor form plus one
//! matrix per generator of `G`. Matrices use the column convention: column
//! `j` is the image of the `j`-th canonical generator. Module homomorphisms
//! are matrices in the same convention.

mod dual;
mod induce;
mod tensor;

pub use dual::{dual_hom, evaluation_map, pair, pontryagin_dual, verify_evaluation};
pub use induce::{induce, restrict, restrict_hom, Induced, SubgroupInclusion};
pub use tensor::{tensor, tor, tor_with, FreeResolution, ResolutionStrategy, TensorProduct, TorGroup, DEFAULT_MAX_TOR_DEGREE};

use crate::abelian::{self, common_modulus, is_well_defined, kernel_generators, present, quotient, FinAb, Subgroup};
use crate::error::{Error, Result};
use crate::fingroup::FiniteGroup;
use crate::finspace::FiniteSpace;
use crate::matrix::{lcm, Matrix};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RingRepr", into = "RingRepr")]
pub enum FiniteRing {
    Zmod { n: i64 },
    GroupAlgebra { n: i64, group: Arc<FiniteGroup> },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind")]
enum RingRepr {
    Zmod { n: i64 },
    GroupAlgebra { n: i64, group: GroupInput },
}

/// A group in JSON: either a named spec like `"S3"` or a full table.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupInput {
    Spec(String),
    Table(FiniteGroup),
}

impl GroupInput {
    pub fn resolve(self) -> Result<FiniteGroup> {
        match self {
            GroupInput::Spec(s) => FiniteGroup::from_spec(&s),
            GroupInput::Table(g) => Ok(g),
        }
    }
}

impl TryFrom<RingRepr> for FiniteRing {
    type Error = Error;
    fn try_from(r: RingRepr) -> Result<Self> {
        match r {
            RingRepr::Zmod { n } => FiniteRing::zmod(n),
            RingRepr::GroupAlgebra { n, group } => FiniteRing::group_algebra(n, group.resolve()?),
        }
    }
}

impl From<FiniteRing> for RingRepr {
    fn from(r: FiniteRing) -> Self {
        match r {
            FiniteRing::Zmod { n } => RingRepr::Zmod { n },
            FiniteRing::GroupAlgebra { n, group } => RingRepr::GroupAlgebra { n, group: GroupInput::Table((*group).clone()) },
        }
    }
}

const MAX_CHARACTERISTIC: i64 = 1 << 20;

impl FiniteRing {
    pub fn zmod(n: i64) -> Result<Self> {
        if !(2..=MAX_CHARACTERISTIC).contains(&n) {
            return Err(Error::InvalidRing(format!("Z/{n} needs 2 <= n <= {MAX_CHARACTERISTIC}")));
        }
        Ok(FiniteRing::Zmod { n })
    }

    pub fn group_algebra(n: i64, group: FiniteGroup) -> Result<Self> {
        FiniteRing::zmod(n)?;
        Ok(FiniteRing::GroupAlgebra { n, group: Arc::new(group) })
    }

    pub fn characteristic(&self) -> i64 {
        match self {
            FiniteRing::Zmod { n } | FiniteRing::GroupAlgebra { n, .. } => *n,
        }
    }

    pub fn group(&self) -> Option<&Arc<FiniteGroup>> {
        match self {
            FiniteRing::Zmod { .. } => None,
            FiniteRing::GroupAlgebra { group, .. } => Some(group),
        }
    }

    /// `|G|`, or 1 for `Z/n`. Ring elements are coefficient vectors of this length.
    pub fn group_order(&self) -> usize {
        self.group().map_or(1, |g| g.order())
    }

    pub(crate) fn identity_index(&self) -> usize {
        self.group().map_or(0, |g| g.identity())
    }

    /// The group elements whose action matrices a module stores.
    pub fn action_generators(&self) -> &[usize] {
        self.group().map_or(&[], |g| g.generators())
    }

    /// The coefficient ring `Z/n`.
    pub fn base(&self) -> FiniteRing {
        FiniteRing::Zmod { n: self.characteristic() }
    }

    pub fn is_commutative(&self) -> bool {
        self.group().is_none_or(|g| g.is_abelian())
    }

    pub fn order(&self) -> Option<u128> {
        (self.characteristic() as u128).checked_pow(self.group_order() as u32)
    }

    /// Product of ring elements given as coefficient vectors (convolution).
    pub fn mul(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let n = self.characteristic();
        match self.group() {
            None => vec![(a[0] * b[0]).rem_euclid(n)],
            Some(g) => {
                let mut out = vec![0; g.order()];
                for x in g.elements() {
                    for y in g.elements() {
                        let z = g.mul(x, y);
                        out[z] = (out[z] + a[x] * b[y]).rem_euclid(n);
                    }
                }
                out
            }
        }
    }

    pub fn one(&self) -> Vec<i64> {
        let mut e = vec![0; self.group_order()];
        e[self.identity_index()] = 1;
        e
    }
}

impl fmt::Display for FiniteRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiniteRing::Zmod { n } => write!(f, "Z/{n}"),
            FiniteRing::GroupAlgebra { n, group } => write!(f, "(Z/{n})[G of order {}]", group.order()),
        }
    }
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "ModuleRepr", into = "ModuleRepr")]
pub struct FiniteModule {
    ring: FiniteRing,
    group: FinAb,
    action: Vec<Matrix>,
    elem_actions: OnceLock<Arc<Vec<Matrix>>>,
}

#[derive(Serialize, Deserialize)]
struct ModuleRepr {
    ring: FiniteRing,
    invariant_factors: Vec<i64>,
    #[serde(default)]
    action: Vec<Matrix>,
}

impl TryFrom<ModuleRepr> for FiniteModule {
    type Error = Error;
    fn try_from(r: ModuleRepr) -> Result<Self> {
        FiniteModule::new(r.ring, r.invariant_factors, r.action)
    }
}

impl From<FiniteModule> for ModuleRepr {
    fn from(m: FiniteModule) -> Self {
        ModuleRepr { ring: m.ring, invariant_factors: m.group.factors().to_vec(), action: m.action }
    }
}

impl PartialEq for FiniteModule {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.group == other.group && self.action == other.action
    }
}

impl Eq for FiniteModule {}

impl Hash for FiniteModule {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ring.hash(state);
        self.group.hash(state);
        self.action.hash(state);
    }
}

impl fmt::Debug for FiniteModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteModule({} ; {:?}", self.ring, self.group.factors())?;
        if !self.action.is_empty() {
            write!(f, " ; {:?}", self.action)?;
        }
        write!(f, ")")
    }
}

impl FiniteModule {
    /// Validates the chain condition, the congruence conditions on the
    /// action matrices, and that the matrices define a representation.
    pub fn new(ring: FiniteRing, factors: Vec<i64>, action: Vec<Matrix>) -> Result<Self> {
        let group =
            FinAb::new(factors.clone()).ok_or_else(|| Error::InvalidModule(format!("{factors:?} is not an invariant-factor chain")))?;
        let n = ring.characteristic();
        if factors.iter().any(|d| n % d != 0) {
            return Err(Error::InvalidModule(format!("factors {factors:?} must divide {n}")));
        }
        if action.len() != ring.action_generators().len() {
            return Err(Error::InvalidModule(format!("expected {} action matrices, got {}", ring.action_generators().len(), action.len())));
        }
        let r = group.rank();
        let mut reduced = Vec::with_capacity(action.len());
        for a in action {
            let a = if r == 0 { Matrix::zeros(0, 0) } else { a };
            if a.rows() != r || a.cols() != r {
                return Err(Error::InvalidModule("action matrix has wrong shape".into()));
            }
            if !is_well_defined(&a, &group, &group) {
                return Err(Error::InvalidModule("action matrix violates congruence conditions".into()));
            }
            reduced.push(a.reduced_rows(group.factors()));
        }
        let m = FiniteModule::from_parts(ring, group, reduced);
        m.check_representation()?;
        Ok(m)
    }

    pub(crate) fn from_parts(ring: FiniteRing, group: FinAb, action: Vec<Matrix>) -> Self {
        FiniteModule { ring, group, action, elem_actions: OnceLock::new() }
    }

    pub fn zero(ring: &FiniteRing) -> Self {
        let action = vec![Matrix::zeros(0, 0); ring.action_generators().len()];
        FiniteModule::from_parts(ring.clone(), FinAb::trivial(), action)
    }

    /// `⊕ Z/d_i` with every group element acting as the identity.
    pub fn with_trivial_action(ring: &FiniteRing, factors: &[i64]) -> Result<Self> {
        let r = factors.len();
        FiniteModule::new(ring.clone(), factors.to_vec(), vec![Matrix::identity(r); ring.action_generators().len()])
    }

    /// The same abelian group and action matrices, but only as a module
    /// over the coefficient ring.
    pub fn underlying(&self) -> FiniteModule {
        FiniteModule::from_parts(self.ring.base(), self.group.clone(), Vec::new())
    }

    pub fn ring(&self) -> &FiniteRing {
        &self.ring
    }

    pub fn abelian(&self) -> &FinAb {
        &self.group
    }

    pub fn factors(&self) -> &[i64] {
        self.group.factors()
    }

    pub fn rank(&self) -> usize {
        self.group.rank()
    }

    pub fn order(&self) -> Option<u128> {
        self.group.order()
    }

    pub fn exponent(&self) -> i64 {
        self.group.exponent()
    }

    pub fn is_zero(&self) -> bool {
        self.group.is_trivial()
    }

    /// Action matrices of the ring's generators.
    pub fn action(&self) -> &[Matrix] {
        &self.action
    }

    /// Action matrices of every group element, indexed by element.
    pub fn element_actions(&self) -> &[Matrix] {
        self.elem_actions.get_or_init(|| Arc::new(self.compute_element_actions()))
    }

    pub fn element_action(&self, g: usize) -> &Matrix {
        &self.element_actions()[g]
    }

    /// `g · v` for a group element `g`.
    pub fn act(&self, g: usize, v: &[i64]) -> Vec<i64> {
        self.element_action(g).apply_mod(v, self.factors())
    }

    /// `a · v` for a ring element `a` given as a coefficient vector.
    pub fn act_ring(&self, a: &[i64], v: &[i64]) -> Vec<i64> {
        let mut out = self.group.zero();
        for (g, &c) in a.iter().enumerate() {
            if c != 0 {
                for (o, x) in out.iter_mut().zip(self.act(g, v)) {
                    *o += c * x;
                }
            }
        }
        self.group.reduce(&mut out);
        out
    }

    fn compute_element_actions(&self) -> Vec<Matrix> {
        let r = self.rank();
        let Some(g) = self.ring.group() else {
            return vec![Matrix::identity(r)];
        };
        let mut acts: Vec<Option<Matrix>> = vec![None; g.order()];
        acts[g.identity()] = Some(Matrix::identity(r));
        let mut queue = VecDeque::from([g.identity()]);
        while let Some(a) = queue.pop_front() {
            for (slot, &s) in g.generators().iter().enumerate() {
                let b = g.mul(a, s);
                if acts[b].is_none() {
                    let m = acts[a].as_ref().expect("visited").mul_mod_rows(&self.action[slot], self.factors());
                    acts[b] = Some(m);
                    queue.push_back(b);
                }
            }
        }
        acts.into_iter().map(|m| m.expect("generators generate")).collect()
    }

    fn check_representation(&self) -> Result<()> {
        let Some(g) = self.ring.group() else {
            return Ok(());
        };
        let acts = self.element_actions();
        for x in g.elements() {
            for (slot, &s) in g.generators().iter().enumerate() {
                if acts[g.mul(x, s)] != acts[x].mul_mod_rows(&self.action[slot], self.factors()) {
                    return Err(Error::InvalidModule("action matrices do not define a representation".into()));
                }
            }
        }
        Ok(())
    }

    /// Re-runs every construction-time check.
    pub fn validate(&self) -> Result<()> {
        FiniteModule::new(self.ring.clone(), self.factors().to_vec(), self.action.clone()).map(|_| ())
    }

    pub fn elements(&self) -> abelian::ElementIter<'_> {
        self.group.elements()
    }
}

/// A homomorphism of modules over the same ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleHom {
    domain: Arc<FiniteModule>,
    codomain: Arc<FiniteModule>,
    matrix: Matrix,
}

#[derive(Serialize, Deserialize)]
struct ModuleHomRepr {
    domain: Arc<FiniteModule>,
    codomain: Arc<FiniteModule>,
    matrix: Matrix,
}

impl Serialize for ModuleHom {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ModuleHomRepr { domain: self.domain.clone(), codomain: self.codomain.clone(), matrix: self.matrix.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ModuleHom {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ModuleHomRepr::deserialize(d)?;
        ModuleHom::new(r.domain, r.codomain, r.matrix).map_err(serde::de::Error::custom)
    }
}

impl ModuleHom {
    pub fn new(domain: Arc<FiniteModule>, codomain: Arc<FiniteModule>, matrix: Matrix) -> Result<Self> {
        if domain.ring != codomain.ring {
            return Err(Error::RingMismatch(format!("{} vs {}", domain.ring, codomain.ring)));
        }
        let matrix = if domain.rank() == 0 || codomain.rank() == 0 { Matrix::zeros(codomain.rank(), domain.rank()) } else { matrix };
        if matrix.rows() != codomain.rank() || matrix.cols() != domain.rank() {
            return Err(Error::InvalidModuleHom("matrix has wrong shape".into()));
        }
        if !is_well_defined(&matrix, &domain.group, &codomain.group) {
            return Err(Error::InvalidModuleHom("matrix violates congruence conditions".into()));
        }
        let matrix = matrix.reduced_rows(codomain.factors());
        let f = ModuleHom { domain, codomain, matrix };
        if !f.is_equivariant() {
            return Err(Error::InvalidModuleHom("matrix is not equivariant".into()));
        }
        Ok(f)
    }

    pub(crate) fn new_unchecked(domain: Arc<FiniteModule>, codomain: Arc<FiniteModule>, matrix: Matrix) -> Self {
        let matrix = matrix.reduced_rows(codomain.factors());
        ModuleHom { domain, codomain, matrix }
    }

    pub fn identity(m: Arc<FiniteModule>) -> Self {
        let matrix = Matrix::identity(m.rank());
        ModuleHom { domain: m.clone(), codomain: m, matrix }
    }

    pub fn zero(domain: Arc<FiniteModule>, codomain: Arc<FiniteModule>) -> Self {
        let matrix = Matrix::zeros(codomain.rank(), domain.rank());
        ModuleHom { domain, codomain, matrix }
    }

    pub fn domain(&self) -> &Arc<FiniteModule> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<FiniteModule> {
        &self.codomain
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn is_equivariant(&self) -> bool {
        let f = &self.matrix;
        self.domain.action.iter().zip(&self.codomain.action).all(|(a, b)| {
            let lhs = f.mul_mod_rows(a, self.codomain.factors());
            let rhs = b.mul_mod_rows(f, self.codomain.factors());
            lhs == rhs
        })
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        self.matrix.apply_mod(v, self.codomain.factors())
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ModuleHom) -> Result<ModuleHom> {
        if *self.codomain != *other.domain {
            return Err(Error::InvalidModuleHom("composition of non-composable homomorphisms".into()));
        }
        let matrix = other.matrix.mul_mod_rows(&self.matrix, other.codomain.factors());
        Ok(ModuleHom { domain: self.domain.clone(), codomain: other.codomain.clone(), matrix })
    }

    pub fn add(&self, other: &ModuleHom) -> Result<ModuleHom> {
        if *self.domain != *other.domain || *self.codomain != *other.codomain {
            return Err(Error::InvalidModuleHom("sum of homomorphisms with different ends".into()));
        }
        let mut matrix = self.matrix.clone();
        for r in 0..matrix.rows() {
            for c in 0..matrix.cols() {
                matrix.set(r, c, matrix.get(r, c) + other.matrix.get(r, c));
            }
        }
        Ok(ModuleHom::new_unchecked(self.domain.clone(), self.codomain.clone(), matrix))
    }

    pub fn is_injective(&self) -> bool {
        abelian::is_injective(&self.matrix, &self.domain.group, &self.codomain.group)
    }

    pub fn is_surjective(&self) -> bool {
        abelian::is_surjective(&self.matrix, &self.codomain.group)
    }

    pub fn is_bijective(&self) -> bool {
        self.domain.group == self.codomain.group && self.is_injective()
    }

    /// The kernel as a submodule, returned as its inclusion.
    pub fn kernel(&self) -> ModuleHom {
        let gens = kernel_generators(&self.matrix, &self.domain.group, &self.codomain.group);
        let (sub, incl) = submodule_from_subgroup(&self.domain, Subgroup::generated(&self.domain.group, &gens));
        ModuleHom { domain: Arc::new(sub), codomain: self.domain.clone(), matrix: incl }
    }

    /// The cokernel, returned as the projection onto it.
    pub fn cokernel(&self) -> ModuleHom {
        let pres = quotient(&self.codomain.group, &self.matrix);
        let action = self.codomain.action.iter().map(|a| pres.transport(a)).collect();
        let c = FiniteModule::from_parts(self.codomain.ring.clone(), pres.group.clone(), action);
        ModuleHom { domain: self.codomain.clone(), codomain: Arc::new(c), matrix: pres.to_canon.clone() }
    }
}

/// The submodule carried by a subgroup that is closed under the action.
pub(crate) fn submodule_from_subgroup(m: &FiniteModule, sub: Subgroup) -> (FiniteModule, Matrix) {
    let incl = sub.inclusion.clone();
    let action = m
        .action
        .iter()
        .map(|a| {
            let cols: Vec<Vec<i64>> = (0..incl.cols())
                .map(|c| {
                    let image = a.apply_mod(&incl.column(c), m.factors());
                    sub.coords(&image).expect("subgroup is closed under the action")
                })
                .collect();
            Matrix::from_columns(sub.group.rank(), &cols)
        })
        .collect();
    (FiniteModule::from_parts(m.ring.clone(), sub.group.clone(), action), incl)
}

/// The submodule generated by `vectors`, with its inclusion matrix.
pub fn submodule(m: &FiniteModule, vectors: &[Vec<i64>]) -> (FiniteModule, Matrix) {
    let cols: Vec<Vec<i64>> = vectors.iter().flat_map(|v| m.element_actions().iter().map(move |a| a.apply_mod(v, m.factors()))).collect();
    let gens = Matrix::from_columns(m.rank(), &cols);
    submodule_from_subgroup(m, Subgroup::generated(&m.group, &gens))
}

/// A free module with the images of its basis points.
#[derive(Clone, Debug)]
pub struct FreeModule {
    pub module: Arc<FiniteModule>,
    /// Canonical coordinates of the basis element attached to each point.
    pub basis: Vec<Vec<i64>>,
}

/// `R^k`. Over `(Z/n)[G]` coordinate `t * |G| + g` is the basis vector
/// `g · b_t`.
pub fn free_module_of_rank(ring: &FiniteRing, k: usize) -> FiniteModule {
    let n = ring.characteristic();
    let go = ring.group_order();
    let rank = k * go;
    let action = match ring.group() {
        None => Vec::new(),
        Some(g) => g
            .generators()
            .iter()
            .map(|&s| {
                let mut a = Matrix::zeros(rank, rank);
                for t in 0..k {
                    for x in g.elements() {
                        a.set(t * go + g.mul(s, x), t * go + x, 1);
                    }
                }
                a
            })
            .collect(),
    };
    let group = FinAb::new(vec![n; rank]).expect("constant chain");
    FiniteModule::from_parts(ring.clone(), group, action)
}

/// The free module on the points of `x`.
pub fn free_module(ring: &FiniteRing, x: &FiniteSpace) -> FreeModule {
    let module = free_module_of_rank(ring, x.size);
    let go = ring.group_order();
    let e = ring.identity_index();
    let basis = (0..x.size)
        .map(|t| {
            let mut v = vec![0; module.rank()];
            v[t * go + e] = 1;
            v
        })
        .collect();
    FreeModule { module: Arc::new(module), basis }
}

/// The homomorphism `R^k -> target` sending `b_t` to `images[t]`.
pub fn free_extension(ring: &FiniteRing, images: &[Vec<i64>], target: &FiniteModule) -> Matrix {
    let go = ring.group_order();
    let mut cols = Vec::with_capacity(images.len() * go);
    for v in images {
        for g in 0..go {
            cols.push(target.act(g, v));
        }
    }
    Matrix::from_columns(target.rank(), &cols)
}

/// A direct sum with its structure maps.
#[derive(Clone, Debug)]
pub struct DirectSum {
    pub module: Arc<FiniteModule>,
    pub injections: Vec<ModuleHom>,
    pub projections: Vec<ModuleHom>,
}

pub fn direct_sum(ring: &FiniteRing, parts: &[Arc<FiniteModule>]) -> Result<DirectSum> {
    if let Some(p) = parts.iter().find(|p| p.ring != *ring) {
        return Err(Error::RingMismatch(format!("summand over {} in a sum over {ring}", p.ring)));
    }
    let raw: Vec<i64> = parts.iter().flat_map(|p| p.factors().iter().copied()).collect();
    let m = parts.iter().fold(1, |a, p| lcm(a, p.exponent()));
    let pres = present(raw.len(), &Matrix::diagonal(&raw), m);
    let action = (0..ring.action_generators().len())
        .map(|slot| {
            let blocks: Vec<&Matrix> = parts.iter().map(|p| &p.action[slot]).collect();
            pres.transport(&Matrix::block_diagonal(&blocks))
        })
        .collect();
    let sum = Arc::new(FiniteModule::from_parts(ring.clone(), pres.group.clone(), action));
    let mut injections = Vec::with_capacity(parts.len());
    let mut projections = Vec::with_capacity(parts.len());
    let mut offset = 0;
    for p in parts {
        let block: Vec<usize> = (offset..offset + p.rank()).collect();
        offset += p.rank();
        let inj = pres.to_canon.select_columns(&block);
        let proj = pres.from_canon.select_rows(&block);
        injections.push(ModuleHom::new_unchecked(p.clone(), sum.clone(), inj));
        projections.push(ModuleHom::new_unchecked(sum.clone(), p.clone(), proj));
    }
    Ok(DirectSum { module: sum, injections, projections })
}

/// `Hom_R(M, N)` as a finite abelian group.
///
/// A matrix entry `F[j][i]` is constrained to multiples of
/// `d'_j / gcd(d_i, d'_j)`; these multiples are the raw parameters, and the
/// equivariant ones are the kernel of `F ↦ (ρ_N(s) F - F ρ_M(s))_s`.
#[derive(Clone, Debug)]
pub struct HomSet {
    pub group: FinAb,
    domain: Arc<FiniteModule>,
    codomain: Arc<FiniteModule>,
    /// Columns: raw parameters of the canonical generators of `group`.
    param_basis: Matrix,
    param_factors: Vec<i64>,
    scales: Vec<i64>,
}

impl HomSet {
    pub fn compute(domain: &Arc<FiniteModule>, codomain: &Arc<FiniteModule>) -> Result<HomSet> {
        if domain.ring != codomain.ring {
            return Err(Error::RingMismatch(format!("{} vs {}", domain.ring, codomain.ring)));
        }
        let (rm, rn) = (domain.rank(), codomain.rank());
        let (dm, dn) = (domain.factors(), codomain.factors());
        let p = rm * rn;
        let mut param_factors = Vec::with_capacity(p);
        let mut scales = Vec::with_capacity(p);
        for j in 0..rn {
            for i in 0..rm {
                let g = crate::matrix::gcd(dm[i], dn[j]);
                param_factors.push(g);
                scales.push(dn[j] / g);
            }
        }
        let m = common_modulus(&domain.group, &codomain.group);
        let params = present(p, &Matrix::diagonal(&param_factors), m);
        let gens = domain.ring.action_generators().len();
        let sub_basis = if gens == 0 || params.group.is_trivial() {
            Matrix::identity(params.group.rank())
        } else {
            let mut e = Matrix::zeros(gens * p, p);
            for slot in 0..gens {
                let (am, an) = (&domain.action[slot], &codomain.action[slot]);
                for j in 0..rn {
                    for i in 0..rm {
                        let row = slot * p + j * rm + i;
                        for k in 0..rn {
                            let col = k * rm + i;
                            e.set(row, col, e.get(row, col) + an.get(j, k) * scales[col]);
                        }
                        for l in 0..rm {
                            let col = j * rm + l;
                            e.set(row, col, e.get(row, col) - scales[col] * am.get(l, i));
                        }
                    }
                }
            }
            let target_raw: Vec<i64> = (0..gens).flat_map(|_| (0..rn).flat_map(|j| std::iter::repeat_n(dn[j], rm))).collect();
            let target = present(target_raw.len(), &Matrix::diagonal(&target_raw), m);
            let e_canon = target.to_canon.mul(&e.mul(&params.from_canon)).reduced_rows(target.group.factors());
            abelian::kernel(&e_canon, &params.group, &target.group).inclusion
        };
        let sub = Subgroup::generated(&params.group, &sub_basis);
        let mut param_basis = params.from_canon.mul(&sub.inclusion);
        param_basis.reduce_rows(&param_factors);
        Ok(HomSet { group: sub.group, domain: domain.clone(), codomain: codomain.clone(), param_basis, param_factors, scales })
    }

    pub fn count(&self) -> Option<u128> {
        self.group.order()
    }

    pub fn matrix_at(&self, coords: &[i64]) -> Matrix {
        let t = self.param_basis.apply_mod(coords, &self.param_factors);
        let (rm, rn) = (self.domain.rank(), self.codomain.rank());
        let mut f = Matrix::zeros(rn, rm);
        for j in 0..rn {
            for i in 0..rm {
                let p = j * rm + i;
                f.set(j, i, (t[p] * self.scales[p]).rem_euclid(self.codomain.factors()[j]));
            }
        }
        f
    }

    pub fn hom_at(&self, coords: &[i64]) -> ModuleHom {
        ModuleHom::new_unchecked(self.domain.clone(), self.codomain.clone(), self.matrix_at(coords))
    }

    /// Every homomorphism, in the element order of `group`.
    pub fn matrices(&self) -> impl Iterator<Item = Matrix> + '_ {
        self.group.elements().map(move |c| self.matrix_at(&c))
    }
}

pub fn hom_count(domain: &Arc<FiniteModule>, codomain: &Arc<FiniteModule>) -> Result<Option<u128>> {
    Ok(HomSet::compute(domain, codomain)?.count())
}

#[derive(Clone, Debug)]
pub enum IsoSearch {
    Isomorphic(ModuleHom),
    NotIsomorphic,
    /// The candidate budget ran out after `explored` homomorphisms.
    Inconclusive {
        explored: u64,
    },
}

impl IsoSearch {
    pub fn witness(&self) -> Option<&ModuleHom> {
        match self {
            IsoSearch::Isomorphic(f) => Some(f),
            _ => None,
        }
    }
}

pub const DEFAULT_ISO_BUDGET: u64 = 4096;

/// Searches for an equivariant isomorphism `M -> N` among at most `budget`
/// homomorphisms. Exhausting the budget is inconclusive, never a negative.
pub fn find_isomorphism(m: &Arc<FiniteModule>, n: &Arc<FiniteModule>, budget: u64) -> Result<IsoSearch> {
    if m.ring != n.ring {
        return Err(Error::RingMismatch(format!("{} vs {}", m.ring, n.ring)));
    }
    if m.group != n.group {
        return Ok(IsoSearch::NotIsomorphic);
    }
    if m.action == n.action {
        return Ok(IsoSearch::Isomorphic(ModuleHom::new_unchecked(m.clone(), n.clone(), Matrix::identity(m.rank()))));
    }
    let homs = HomSet::compute(m, n)?;
    let mut explored = 0u64;
    for f in homs.matrices() {
        if explored == budget {
            return Ok(IsoSearch::Inconclusive { explored });
        }
        explored += 1;
        if abelian::is_injective(&f, &m.group, &n.group) {
            return Ok(IsoSearch::Isomorphic(ModuleHom::new_unchecked(m.clone(), n.clone(), f)));
        }
    }
    Ok(IsoSearch::NotIsomorphic)
}
