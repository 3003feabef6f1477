//! Induction `kG ⊗_{kH} -` and restriction along a subgroup `H ≤ G`.

use super::{FiniteModule, FiniteRing, ModuleHom};
use crate::abelian::{present, Presented};
use crate::error::{Error, Result};
use crate::fingroup::{FiniteGroup, GroupHom};
use crate::matrix::Matrix;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// An injective group homomorphism `H -> G`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GroupHom", into = "GroupHom")]
pub struct SubgroupInclusion {
    map: GroupHom,
}

impl TryFrom<GroupHom> for SubgroupInclusion {
    type Error = Error;
    fn try_from(map: GroupHom) -> Result<Self> {
        SubgroupInclusion::new(map)
    }
}

impl From<SubgroupInclusion> for GroupHom {
    fn from(s: SubgroupInclusion) -> Self {
        s.map
    }
}

impl SubgroupInclusion {
    pub fn new(map: GroupHom) -> Result<Self> {
        if !map.is_injective() {
            return Err(Error::NotSubgroup("inclusion map has a nontrivial kernel".into()));
        }
        Ok(SubgroupInclusion { map })
    }

    /// The subgroup of `g` on the given elements.
    pub fn from_elements(g: &Arc<FiniteGroup>, elements: &[usize]) -> Result<Self> {
        let (_, incl) = g.subgroup(elements).map_err(|e| Error::NotSubgroup(e.to_string()))?;
        SubgroupInclusion::new(incl)
    }

    pub fn identity(g: Arc<FiniteGroup>) -> Self {
        SubgroupInclusion { map: GroupHom::identity(g) }
    }

    pub fn sub(&self) -> &Arc<FiniteGroup> {
        self.map.domain()
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.map.codomain()
    }

    pub fn map(&self) -> &GroupHom {
        &self.map
    }

    pub fn index(&self) -> usize {
        self.group().order() / self.sub().order()
    }

    fn check_ring(&self, ring: &FiniteRing, over_sub: bool) -> Result<i64> {
        let want = if over_sub { self.sub() } else { self.group() };
        match ring {
            FiniteRing::GroupAlgebra { n, group } if **group == **want => Ok(*n),
            _ => Err(Error::RingMismatch(format!("module over {ring} does not match the subgroup data"))),
        }
    }
}

/// `Ind_H^G M` with the presentation used to build it.
#[derive(Clone, Debug)]
pub struct Induced {
    pub module: Arc<FiniteModule>,
    pub source: Arc<FiniteModule>,
    pub inclusion: SubgroupInclusion,
    pres: Presented,
}

/// Raw generators are `(g, i)` at index `g * rank(M) + i`, standing for
/// `g ⊗ e_i`; relations are `gh ⊗ e_i = g ⊗ h e_i` for generators `h` of `H`.
pub fn induce(k: &FiniteRing, inclusion: &SubgroupInclusion, m: &Arc<FiniteModule>) -> Result<Induced> {
    let n = inclusion.check_ring(m.ring(), true)?;
    if !matches!(k, FiniteRing::Zmod { n: kn } if *kn == n) {
        return Err(Error::RingMismatch(format!("coefficients {k} do not match {}", m.ring())));
    }
    let g = inclusion.group();
    let h = inclusion.sub();
    let r = m.rank();
    let big = g.order() * r;
    let idx = |x: usize, i: usize| x * r + i;
    let mut cols: Vec<Vec<i64>> = Vec::new();
    for x in g.elements() {
        for (i, &d) in m.factors().iter().enumerate() {
            let mut v = vec![0; big];
            v[idx(x, i)] = d;
            cols.push(v);
        }
    }
    for x in g.elements() {
        for (slot, &s) in h.generators().iter().enumerate() {
            let xs = g.mul(x, inclusion.map().apply(s));
            let act = &m.action()[slot];
            for i in 0..r {
                let mut v = vec![0; big];
                v[idx(xs, i)] += 1;
                for a in 0..r {
                    v[idx(x, a)] -= act.get(a, i);
                }
                cols.push(v);
            }
        }
    }
    let pres = present(big, &Matrix::from_columns(big, &cols), m.exponent());
    let ring = FiniteRing::GroupAlgebra { n, group: g.clone() };
    let action = g
        .generators()
        .iter()
        .map(|&s| {
            let mut p = Matrix::zeros(big, big);
            for x in g.elements() {
                for i in 0..r {
                    p.set(idx(g.mul(s, x), i), idx(x, i), 1);
                }
            }
            pres.transport(&p)
        })
        .collect();
    let module = FiniteModule::from_parts(ring, pres.group.clone(), action);
    Ok(Induced { module: Arc::new(module), source: m.clone(), inclusion: inclusion.clone(), pres })
}

impl Induced {
    /// `M -> Res Ind M`, `e_i ↦ 1 ⊗ e_i`.
    pub fn unit(&self) -> ModuleHom {
        let r = self.source.rank();
        let e = self.inclusion.group().identity();
        let cols: Vec<usize> = (0..r).map(|i| e * r + i).collect();
        let res = Arc::new(restrict(&self.inclusion, &self.module).expect("induced module is over the big group"));
        ModuleHom::new_unchecked(self.source.clone(), res, self.pres.to_canon.select_columns(&cols))
    }

    /// The matrix of `Ind(f)` for `f: M -> M'`, `target` being `Ind M'`.
    pub fn map(&self, target: &Induced, f: &Matrix) -> Matrix {
        let go = self.inclusion.group().order();
        let (r, r2) = (self.source.rank(), target.source.rank());
        let mut raw = Matrix::zeros(go * r2, go * r);
        for x in 0..go {
            for i in 0..r {
                for a in 0..r2 {
                    raw.set(x * r2 + a, x * r + i, f.get(a, i));
                }
            }
        }
        target.pres.to_canon.mul(&raw.mul(&self.pres.from_canon)).reduced_rows(target.module.factors())
    }

    pub fn map_hom(&self, target: &Induced, f: &ModuleHom) -> ModuleHom {
        ModuleHom::new_unchecked(self.module.clone(), target.module.clone(), self.map(target, f.matrix()))
    }
}

/// Restriction of scalars from `kG` to `kH`.
pub fn restrict(inclusion: &SubgroupInclusion, m: &FiniteModule) -> Result<FiniteModule> {
    let n = inclusion.check_ring(m.ring(), false)?;
    let h = inclusion.sub();
    let action = h.generators().iter().map(|&s| m.element_action(inclusion.map().apply(s)).clone()).collect();
    let ring = FiniteRing::GroupAlgebra { n, group: h.clone() };
    Ok(FiniteModule::from_parts(ring, m.abelian().clone(), action))
}

/// Restriction of a homomorphism; the matrix is unchanged.
pub fn restrict_hom(inclusion: &SubgroupInclusion, f: &ModuleHom) -> Result<ModuleHom> {
    let d = Arc::new(restrict(inclusion, f.domain())?);
    let c = Arc::new(restrict(inclusion, f.codomain())?);
    Ok(ModuleHom::new_unchecked(d, c, f.matrix().clone()))
}
