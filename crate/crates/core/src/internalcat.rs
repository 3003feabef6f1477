//! Finite internal categories in finite spaces and group-valued diagrams on
//! them. Colimits are described by their Hom-sets into finite groups: a
//! homomorphism from `colim P` to `T` is a family `α_a: P(a) -> T` with
//! `α_{d1 f} ∘ P(f) = α_{d0 f}` for every arrow `f`.

use crate::bundle::{Constraint, GroupBundle, HomTuple, ProGroupByHoms};
use crate::error::{Error, Result};
use crate::fingroup::{quotient_by_normal_closure, FiniteGroup, GroupHom};
use crate::finmod::GroupInput;
use crate::finspace::{FiniteSpace, SpaceMap};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Arrows run from `d0` to `d1`. A composition entry `[f, g, h]` has
/// `d1(f) = d0(g)` and `h = g ∘ f`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CategoryRepr", into = "CategoryRepr")]
pub struct FiniteInternalCategory {
    a0: usize,
    a1: usize,
    d0: Vec<usize>,
    d1: Vec<usize>,
    ident: Vec<usize>,
    comp: BTreeMap<(usize, usize), usize>,
}

#[derive(Serialize, Deserialize)]
struct CategoryRepr {
    #[serde(rename = "A0")]
    a0: usize,
    #[serde(rename = "A1")]
    a1: usize,
    d0: Vec<usize>,
    d1: Vec<usize>,
    ident: Vec<usize>,
    comp: Vec<[usize; 3]>,
}

impl TryFrom<CategoryRepr> for FiniteInternalCategory {
    type Error = Error;
    fn try_from(r: CategoryRepr) -> Result<Self> {
        FiniteInternalCategory::new(r.a0, r.a1, r.d0, r.d1, r.ident, &r.comp)
    }
}

impl From<FiniteInternalCategory> for CategoryRepr {
    fn from(c: FiniteInternalCategory) -> Self {
        CategoryRepr {
            a0: c.a0,
            a1: c.a1,
            comp: c.comp.iter().map(|(&(f, g), &h)| [f, g, h]).collect(),
            d0: c.d0,
            d1: c.d1,
            ident: c.ident,
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidCategory(msg.into())
}

impl FiniteInternalCategory {
    /// Validates every axiom exhaustively.
    pub fn new(a0: usize, a1: usize, d0: Vec<usize>, d1: Vec<usize>, ident: Vec<usize>, comp: &[[usize; 3]]) -> Result<Self> {
        if d0.len() != a1 || d1.len() != a1 || ident.len() != a0 {
            return Err(bad("structure maps have the wrong lengths"));
        }
        if d0.iter().chain(&d1).any(|&a| a >= a0) || ident.iter().any(|&f| f >= a1) {
            return Err(bad("structure map value out of range"));
        }
        for a in 0..a0 {
            if d0[ident[a]] != a || d1[ident[a]] != a {
                return Err(bad(format!("identity of {a} does not start and end at {a}")));
            }
        }
        let mut table = BTreeMap::new();
        for &[f, g, h] in comp {
            if f >= a1 || g >= a1 || h >= a1 {
                return Err(bad("composition entry out of range"));
            }
            if d1[f] != d0[g] {
                return Err(bad(format!("arrows {f} and {g} are not composable")));
            }
            if d0[h] != d0[f] || d1[h] != d1[g] {
                return Err(bad(format!("composite of {f} and {g} has the wrong ends")));
            }
            if table.insert((f, g), h).is_some() {
                return Err(bad(format!("composite of {f} and {g} given twice")));
            }
        }
        let cat = FiniteInternalCategory { a0, a1, d0, d1, ident, comp: table };
        for f in 0..a1 {
            for g in 0..a1 {
                if cat.d1[f] == cat.d0[g] && !cat.comp.contains_key(&(f, g)) {
                    return Err(bad(format!("composite of {f} and {g} missing")));
                }
            }
        }
        for f in 0..a1 {
            if cat.compose(cat.ident[cat.d0[f]], f) != Some(f) || cat.compose(f, cat.ident[cat.d1[f]]) != Some(f) {
                return Err(bad(format!("identities are not units for {f}")));
            }
        }
        for (&(f, g), &fg) in &cat.comp {
            for h in (0..a1).filter(|&h| cat.d0[h] == cat.d1[g]) {
                let left = cat.compose(fg, h);
                let right = cat.compose(g, h).and_then(|gh| cat.compose(f, gh));
                if left != right {
                    return Err(bad(format!("composition of {f}, {g}, {h} is not associative")));
                }
            }
        }
        Ok(cat)
    }

    pub fn objects(&self) -> FiniteSpace {
        FiniteSpace::new(self.a0)
    }

    pub fn arrows(&self) -> FiniteSpace {
        FiniteSpace::new(self.a1)
    }

    pub fn source(&self, f: usize) -> usize {
        self.d0[f]
    }

    pub fn target(&self, f: usize) -> usize {
        self.d1[f]
    }

    pub fn identity(&self, a: usize) -> usize {
        self.ident[a]
    }

    pub fn is_identity(&self, f: usize) -> bool {
        self.ident[self.d0[f]] == f
    }

    /// `g ∘ f`, when `f` ends where `g` starts.
    pub fn compose(&self, f: usize, g: usize) -> Option<usize> {
        self.comp.get(&(f, g)).copied()
    }

    pub fn composable_pairs(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.comp.iter().map(|(&(f, g), &h)| (f, g, h))
    }

    pub fn d0_map(&self) -> SpaceMap {
        SpaceMap::new(self.arrows(), self.objects(), self.d0.clone()).expect("validated")
    }

    pub fn d1_map(&self) -> SpaceMap {
        SpaceMap::new(self.arrows(), self.objects(), self.d1.clone()).expect("validated")
    }

    pub fn ident_map(&self) -> SpaceMap {
        SpaceMap::new(self.objects(), self.arrows(), self.ident.clone()).expect("validated")
    }

    /// An object receiving exactly one arrow from every object.
    pub fn terminal_object(&self) -> Option<usize> {
        (0..self.a0).find(|&t| (0..self.a0).all(|a| (0..self.a1).filter(|&f| self.d0[f] == a && self.d1[f] == t).count() == 1))
    }

    /// The free category on a graph with no directed cycles: arrows are the
    /// paths, identities first, then the edges, then longer paths in order
    /// of discovery.
    pub fn free_on_acyclic_graph(objects: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if edges.iter().any(|&(a, b)| a >= objects || b >= objects) {
            return Err(bad("edge endpoint out of range"));
        }
        let mut paths: Vec<(usize, usize, Vec<usize>)> = (0..objects).map(|a| (a, a, Vec::new())).collect();
        let mut frontier: Vec<usize> = Vec::new();
        for (e, &(a, b)) in edges.iter().enumerate() {
            frontier.push(paths.len());
            paths.push((a, b, vec![e]));
        }
        let limit = 1 << 12;
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &p in &frontier {
                for (e, &(a, b)) in edges.iter().enumerate() {
                    if a == paths[p].1 {
                        let mut word = paths[p].2.clone();
                        word.push(e);
                        next.push(paths.len());
                        paths.push((paths[p].0, b, word));
                        if paths.len() > limit {
                            return Err(bad("graph has a cycle or too many paths"));
                        }
                    }
                }
            }
            frontier = next;
        }
        let index: BTreeMap<&[usize], usize> = paths.iter().enumerate().map(|(i, p)| (p.2.as_slice(), i)).collect();
        let mut comp = Vec::new();
        for (f, pf) in paths.iter().enumerate() {
            for (g, pg) in paths.iter().enumerate() {
                if pf.1 == pg.0 {
                    let word: Vec<usize> = pf.2.iter().chain(&pg.2).copied().collect();
                    let h = if pf.2.is_empty() {
                        g
                    } else if pg.2.is_empty() {
                        f
                    } else {
                        index[word.as_slice()]
                    };
                    comp.push([f, g, h]);
                }
            }
        }
        let a1 = paths.len();
        FiniteInternalCategory::new(
            objects,
            a1,
            paths.iter().map(|p| p.0).collect(),
            paths.iter().map(|p| p.1).collect(),
            (0..objects).collect(),
            &comp,
        )
    }

    /// A group as a one-object category; arrow `g` is the element `g`.
    pub fn from_group(g: &FiniteGroup) -> Self {
        let comp: Vec<[usize; 3]> = g.elements().flat_map(|a| g.elements().map(move |b| [a, b, g.mul(b, a)])).collect();
        FiniteInternalCategory::new(1, g.order(), vec![0; g.order()], vec![0; g.order()], vec![g.identity()], &comp)
            .expect("groups are categories")
    }

    /// `b <- a -> c` with objects `a = 0`, `b = 1`, `c = 2` and the legs as
    /// arrows 3 and 4.
    pub fn span() -> Self {
        FiniteInternalCategory::free_on_acyclic_graph(3, &[(0, 1), (0, 2)]).expect("span")
    }
}

/// `A0 = A1 = X`, every structure map the identity.
pub fn discrete_category(x: FiniteSpace) -> FiniteInternalCategory {
    let id: Vec<usize> = x.points().collect();
    let comp: Vec<[usize; 3]> = x.points().map(|a| [a, a, a]).collect();
    FiniteInternalCategory::new(x.size, x.size, id.clone(), id.clone(), id, &comp).expect("discrete category")
}

/// Objects `X ⊔ {*}` with `*` last; arrows are the edges `x̄: * -> x`
/// (indices `0..|X|`), then the identities of `X`, then the identity of `*`.
pub fn cone_graph_category(x: FiniteSpace) -> FiniteInternalCategory {
    let n = x.size;
    let star = n;
    let mut d0: Vec<usize> = vec![star; n];
    let mut d1: Vec<usize> = (0..n).collect();
    d0.extend(0..n);
    d1.extend(0..n);
    d0.push(star);
    d1.push(star);
    let ident: Vec<usize> = (n..=2 * n).collect();
    let mut comp = Vec::new();
    for e in 0..n {
        comp.push([2 * n, e, e]);
        comp.push([e, n + e, e]);
    }
    for a in 0..=n {
        comp.push([n + a, n + a, n + a]);
    }
    FiniteInternalCategory::new(n + 1, 2 * n + 1, d0, d1, ident, &comp).expect("cone graph category")
}

/// A functor from a finite internal category to finite groups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DiagramRepr", into = "DiagramRepr")]
pub struct InternalGroupDiagram {
    category: FiniteInternalCategory,
    bundle: GroupBundle,
    maps: Vec<GroupHom>,
}

#[derive(Serialize, Deserialize)]
struct DiagramRepr {
    category: FiniteInternalCategory,
    bundle: GroupBundle,
    action: Vec<Vec<usize>>,
}

impl TryFrom<DiagramRepr> for InternalGroupDiagram {
    type Error = Error;
    fn try_from(r: DiagramRepr) -> Result<Self> {
        InternalGroupDiagram::from_tables(r.category, r.bundle, r.action)
    }
}

impl From<InternalGroupDiagram> for DiagramRepr {
    fn from(d: InternalGroupDiagram) -> Self {
        DiagramRepr { action: d.maps.iter().map(|h| h.values().to_vec()).collect(), category: d.category, bundle: d.bundle }
    }
}

impl InternalGroupDiagram {
    /// `action[f]` is the value table of `P(f): P(d0 f) -> P(d1 f)`.
    pub fn from_tables(category: FiniteInternalCategory, bundle: GroupBundle, action: Vec<Vec<usize>>) -> Result<Self> {
        if bundle.base().size != category.a0 || action.len() != category.a1 {
            return Err(Error::InvalidDiagram("bundle or action does not match the category".into()));
        }
        let maps = action
            .into_iter()
            .enumerate()
            .map(|(f, v)| {
                GroupHom::new(bundle.fibre(category.d0[f]).clone(), bundle.fibre(category.d1[f]).clone(), v)
                    .map_err(|e| Error::InvalidDiagram(format!("arrow {f}: {e}")))
            })
            .collect::<Result<_>>()?;
        InternalGroupDiagram::new(category, bundle, maps)
    }

    /// Checks ends, identities and functoriality on every composable pair.
    pub fn new(category: FiniteInternalCategory, bundle: GroupBundle, maps: Vec<GroupHom>) -> Result<Self> {
        let err = |m: String| Err(Error::InvalidDiagram(m));
        if bundle.base().size != category.a0 || maps.len() != category.a1 {
            return err("bundle or action does not match the category".into());
        }
        for (f, h) in maps.iter().enumerate() {
            if **h.domain() != **bundle.fibre(category.d0[f]) || **h.codomain() != **bundle.fibre(category.d1[f]) {
                return err(format!("arrow {f} acts between the wrong fibres"));
            }
        }
        for a in 0..category.a0 {
            let h = &maps[category.ident[a]];
            if h.domain().elements().any(|x| h.apply(x) != x) {
                return err(format!("identity of {a} does not act trivially"));
            }
        }
        for (f, g, fg) in category.composable_pairs() {
            let (pf, pg, pfg) = (&maps[f], &maps[g], &maps[fg]);
            if pf.domain().elements().any(|x| pg.apply(pf.apply(x)) != pfg.apply(x)) {
                return err(format!("action of {g} after {f} differs from that of their composite"));
            }
        }
        Ok(InternalGroupDiagram { category, bundle, maps })
    }

    pub fn category(&self) -> &FiniteInternalCategory {
        &self.category
    }

    pub fn bundle(&self) -> &GroupBundle {
        &self.bundle
    }

    pub fn action(&self, f: usize) -> &GroupHom {
        &self.maps[f]
    }

    /// `α_{d1 f} ∘ P(f) = α_{d0 f}` for each arrow that is not an identity.
    pub fn constraints(&self) -> Vec<Constraint> {
        (0..self.category.a1)
            .filter(|&f| !self.category.is_identity(f))
            .map(|f| Constraint { src: self.category.d0[f], dst: self.category.d1[f], map: self.maps[f].clone() })
            .collect()
    }

    /// The same diagram with base points relabelled: object `a` becomes
    /// `perm[a]`. Arrows keep their indices.
    pub fn permute_objects(&self, perm: &[usize]) -> Result<Self> {
        let c = &self.category;
        let comp: Vec<[usize; 3]> = c.composable_pairs().map(|(f, g, h)| [f, g, h]).collect();
        let mut ident = vec![0; c.a0];
        for a in 0..c.a0 {
            ident[perm[a]] = c.ident[a];
        }
        let cat = FiniteInternalCategory::new(
            c.a0,
            c.a1,
            c.d0.iter().map(|&a| perm[a]).collect(),
            c.d1.iter().map(|&a| perm[a]).collect(),
            ident,
            &comp,
        )?;
        InternalGroupDiagram::new(cat, self.bundle.permute_base(perm), self.maps.clone())
    }
}

/// The colimit of `P` over `A`, built from the coequaliser of the two maps
/// `∐_{f ∈ A1} P(d0 f) ⇉ ∐_{a ∈ A0} P(a)`; it is kept as Hom-set data.
pub fn colimit_via_coequaliser(a: &FiniteInternalCategory, p: &InternalGroupDiagram) -> Result<ProGroupByHoms> {
    if *a != p.category {
        return Err(Error::InvalidDiagram("diagram is over a different category".into()));
    }
    Ok(ProGroupByHoms::Colimit(p.clone()))
}

/// Vertex groups `G(x)` sharing a subgroup `H` through injections `θ_x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AmalgamRepr", into = "AmalgamRepr")]
pub struct AmalgamData {
    h: Arc<FiniteGroup>,
    vertex_groups: Vec<Arc<FiniteGroup>>,
    theta: Vec<GroupHom>,
}

#[derive(Serialize, Deserialize)]
struct AmalgamRepr {
    #[serde(rename = "X")]
    x: usize,
    #[serde(rename = "H")]
    h: GroupInput,
    vertex_groups: Vec<GroupInput>,
    theta: Vec<Vec<usize>>,
}

impl TryFrom<AmalgamRepr> for AmalgamData {
    type Error = Error;
    fn try_from(r: AmalgamRepr) -> Result<Self> {
        if r.vertex_groups.len() != r.x || r.theta.len() != r.x {
            return Err(Error::InvalidDiagram("amalgam data does not match |X|".into()));
        }
        let h = Arc::new(r.h.resolve()?);
        let groups: Vec<Arc<FiniteGroup>> = r.vertex_groups.into_iter().map(|g| g.resolve().map(Arc::new)).collect::<Result<_>>()?;
        let theta = r.theta.into_iter().zip(&groups).map(|(v, g)| GroupHom::new(h.clone(), g.clone(), v)).collect::<Result<_>>()?;
        AmalgamData::new(h, theta)
    }
}

impl From<AmalgamData> for AmalgamRepr {
    fn from(d: AmalgamData) -> Self {
        AmalgamRepr {
            x: d.vertex_groups.len(),
            h: GroupInput::Table((*d.h).clone()),
            vertex_groups: d.vertex_groups.iter().map(|g| GroupInput::Table((**g).clone())).collect(),
            theta: d.theta.iter().map(|t| t.values().to_vec()).collect(),
        }
    }
}

impl AmalgamData {
    /// Each `θ_x: H -> G(x)` must be injective.
    pub fn new(h: Arc<FiniteGroup>, theta: Vec<GroupHom>) -> Result<Self> {
        for (x, t) in theta.iter().enumerate() {
            if **t.domain() != *h {
                return Err(Error::InvalidDiagram(format!("theta over {x} does not start at H")));
            }
            if !t.is_injective() {
                return Err(Error::NotSubgroup(format!("theta over {x} is not injective")));
            }
        }
        let vertex_groups = theta.iter().map(|t| t.codomain().clone()).collect();
        Ok(AmalgamData { h, vertex_groups, theta })
    }

    pub fn base(&self) -> FiniteSpace {
        FiniteSpace::new(self.vertex_groups.len())
    }

    pub fn shared(&self) -> &Arc<FiniteGroup> {
        &self.h
    }

    pub fn vertex_group(&self, x: usize) -> &Arc<FiniteGroup> {
        &self.vertex_groups[x]
    }

    pub fn theta(&self, x: usize) -> &GroupHom {
        &self.theta[x]
    }

    /// `[H, G(0), G(1), ...]`.
    pub fn components(&self) -> Vec<Arc<FiniteGroup>> {
        std::iter::once(self.h.clone()).chain(self.vertex_groups.iter().cloned()).collect()
    }

    /// `β_x ∘ θ_x = β_*`.
    pub fn constraints(&self) -> Vec<Constraint> {
        self.theta.iter().enumerate().map(|(x, t)| Constraint { src: 0, dst: x + 1, map: t.clone() }).collect()
    }

    /// The diagram over the cone-graph category: `P(x) = G(x)`, `P(*) = H`,
    /// and the edge `x̄` acts by `θ_x`.
    pub fn diagram(&self) -> InternalGroupDiagram {
        let n = self.vertex_groups.len();
        let cat = cone_graph_category(self.base());
        let mut fibres = self.vertex_groups.clone();
        fibres.push(self.h.clone());
        let mut maps = self.theta.clone();
        maps.extend(self.vertex_groups.iter().map(|g| GroupHom::identity(g.clone())));
        maps.push(GroupHom::identity(self.h.clone()));
        debug_assert_eq!(maps.len(), 2 * n + 1);
        InternalGroupDiagram::new(cat, GroupBundle::new(fibres), maps).expect("cone-graph diagram is functorial")
    }

    /// `[β_*, β_0, ...]` reordered as a tuple indexed by the objects
    /// `[0, ..., |X|-1, *]` of the cone-graph category.
    pub fn to_colimit_tuple(&self, tuple: &[GroupHom]) -> HomTuple {
        tuple[1..].iter().chain(std::iter::once(&tuple[0])).cloned().collect()
    }
}

/// All `(β_*, β_x ...)` with `β_x ∘ θ_x = β_*`.
pub fn amalgam_homs(d: &AmalgamData, t: &Arc<FiniteGroup>) -> Vec<HomTuple> {
    ProGroupByHoms::Amalgam(d.clone()).homs_to(t)
}

/// The ordinary pushout of `B <-f- A -g-> C` when `g` is surjective:
/// `B / ⟨⟨f(ker g)⟩⟩`, with its maps from `B` and `C`.
pub fn pushout_with_surjective_leg(f: &GroupHom, g: &GroupHom) -> Result<(Arc<FiniteGroup>, GroupHom, GroupHom)> {
    if **f.domain() != **g.domain() {
        return Err(Error::MismatchedPair("legs of the span start at different groups".into()));
    }
    if !g.is_surjective() {
        return Err(Error::UnsupportedSample("pushout needs a surjective leg".into()));
    }
    let rel: Vec<usize> = g.kernel().iter().map(|&k| f.apply(k)).collect();
    let (p, q) = quotient_by_normal_closure(f.codomain(), &rel);
    let p = Arc::new(p);
    let q = GroupHom::new(f.codomain().clone(), p.clone(), q.values().to_vec())?;
    let mut from_c = vec![usize::MAX; g.codomain().order()];
    for a in f.domain().elements() {
        from_c[g.apply(a)] = q.apply(f.apply(a));
    }
    let from_c = GroupHom::new(g.codomain().clone(), p.clone(), from_c)?;
    Ok((p, q, from_c))
}
