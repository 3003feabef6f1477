//! Tensor products, free resolutions and Tor.
//!
//! Over `(Z/n)[G]` the first factor is a left module read as a right module
//! through `m · g = g⁻¹ m`.

use super::{free_extension, free_module_of_rank, FiniteModule, ModuleHom};
use crate::abelian::{preimage, present, FinAb, Homology, Presented, Subgroup};
use crate::error::{Error, Result};
use crate::matrix::{gcd, lcm, Matrix};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

pub const DEFAULT_MAX_TOR_DEGREE: usize = 3;

fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let mut k = Matrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i in 0..a.rows() {
        for c in 0..a.cols() {
            let x = a.get(i, c);
            if x == 0 {
                continue;
            }
            for j in 0..b.rows() {
                for d in 0..b.cols() {
                    k.set(i * b.rows() + j, c * b.cols() + d, x * b.get(j, d));
                }
            }
        }
    }
    k
}

/// `M ⊗_R N` as a `Z/n`-module, with the presentation used to build it.
#[derive(Clone, Debug)]
pub struct TensorProduct {
    pub module: Arc<FiniteModule>,
    pres: Presented,
    left: Arc<FiniteModule>,
    right: Arc<FiniteModule>,
}

pub fn tensor(m: &Arc<FiniteModule>, n: &Arc<FiniteModule>) -> Result<TensorProduct> {
    if m.ring() != n.ring() {
        return Err(Error::RingMismatch(format!("{} vs {}", m.ring(), n.ring())));
    }
    let (rm, rn) = (m.rank(), n.rank());
    let k = rm * rn;
    let mut diag = Vec::with_capacity(k);
    for &d in m.factors() {
        for &e in n.factors() {
            diag.push(gcd(d, e));
        }
    }
    let mut blocks = vec![Matrix::diagonal(&diag)];
    if let Some(g) = m.ring().group() {
        for (slot, &s) in g.generators().iter().enumerate() {
            // (m · s) ⊗ n - m ⊗ (s · n)
            let right_m = m.element_action(g.inv(s));
            let mut rel = kron(right_m, &Matrix::identity(rn));
            let rhs = kron(&Matrix::identity(rm), &n.action()[slot]);
            for r in 0..k {
                for c in 0..k {
                    rel.set(r, c, rel.get(r, c) - rhs.get(r, c));
                }
            }
            blocks.push(rel);
        }
    }
    let refs: Vec<&Matrix> = blocks.iter().collect();
    let relations = Matrix::hstack(&refs);
    let modulus = lcm(m.exponent(), n.exponent());
    let pres = present(k, &relations, modulus);
    let module = FiniteModule::from_parts(m.ring().base(), pres.group.clone(), Vec::new());
    Ok(TensorProduct { module: Arc::new(module), pres, left: m.clone(), right: n.clone() })
}

impl TensorProduct {
    pub fn left(&self) -> &Arc<FiniteModule> {
        &self.left
    }

    pub fn right(&self) -> &Arc<FiniteModule> {
        &self.right
    }

    /// Coordinates of `x ⊗ y`.
    pub fn pure(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        let raw: Vec<i64> = x.iter().flat_map(|&a| y.iter().map(move |&b| a * b)).collect();
        self.pres.canon(&raw)
    }

    /// The matrix of `f ⊗ g` from this product to `target`.
    pub fn map(&self, target: &TensorProduct, f: &Matrix, g: &Matrix) -> Matrix {
        let raw = kron(f, g);
        let lifted = raw.mul(&self.pres.from_canon);
        target.pres.to_canon.mul(&lifted).reduced_rows(target.module.factors())
    }

    pub fn map_hom(&self, target: &TensorProduct, f: &ModuleHom, g: &ModuleHom) -> ModuleHom {
        ModuleHom::new_unchecked(self.module.clone(), target.module.clone(), self.map(target, f.matrix(), g.matrix()))
    }
}

/// How the free module mapping onto each kernel is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResolutionStrategy {
    /// Canonical generators taken greedily, skipping those already in the
    /// submodule generated by earlier ones.
    MinimalCover,
    /// Every canonical generator plus their sum.
    RedundantCover,
}

fn cover(m: &FiniteModule, strategy: ResolutionStrategy) -> Vec<Vec<i64>> {
    let r = m.rank();
    let unit = |j: usize| {
        let mut e = vec![0; r];
        e[j] = 1;
        e
    };
    match strategy {
        ResolutionStrategy::RedundantCover => {
            let mut gens: Vec<Vec<i64>> = (0..r).map(unit).collect();
            if r > 0 {
                gens.push(vec![1; r]);
            }
            gens
        }
        ResolutionStrategy::MinimalCover => {
            let mut chosen: Vec<Vec<i64>> = Vec::new();
            let mut span = Subgroup::generated(m.abelian(), &Matrix::zeros(r, 0));
            for j in 0..r {
                let e = unit(j);
                if span.contains(&e) {
                    continue;
                }
                chosen.push(e);
                let cols: Vec<Vec<i64>> =
                    chosen.iter().flat_map(|v| m.element_actions().iter().map(move |a| a.apply_mod(v, m.factors()))).collect();
                span = Subgroup::generated(m.abelian(), &Matrix::from_columns(r, &cols));
            }
            chosen
        }
    }
}

/// `... -> F_1 -> F_0 -> M -> 0`, truncated at a fixed length.
#[derive(Clone, Debug)]
pub struct FreeResolution {
    pub module: Arc<FiniteModule>,
    pub strategy: ResolutionStrategy,
    pub terms: Vec<Arc<FiniteModule>>,
    /// Free rank of each term over the ring.
    pub ranks: Vec<usize>,
    /// `F_0 -> M`.
    pub augmentation: Matrix,
    /// `differentials[k - 1]` is `d_k: F_k -> F_{k-1}`.
    pub differentials: Vec<Matrix>,
}

impl FreeResolution {
    /// Builds `F_0, ..., F_length`.
    pub fn new(m: &Arc<FiniteModule>, length: usize, strategy: ResolutionStrategy) -> FreeResolution {
        let ring = m.ring().clone();
        let mut current = m.clone();
        let mut incl: Option<Matrix> = None;
        let mut terms = Vec::new();
        let mut ranks = Vec::new();
        let mut augmentation = Matrix::zeros(m.rank(), 0);
        let mut differentials = Vec::new();
        for k in 0..=length {
            let gens = cover(&current, strategy);
            let f = Arc::new(free_module_of_rank(&ring, gens.len()));
            let pi = free_extension(&ring, &gens, &current);
            match &incl {
                None => augmentation = pi.clone(),
                Some(inc) => {
                    let prev: &Arc<FiniteModule> = terms.last().expect("previous term");
                    differentials.push(inc.mul(&pi).reduced_rows(prev.factors()));
                }
            }
            if k < length {
                let kernel = ModuleHom::new_unchecked(f.clone(), current.clone(), pi).kernel();
                incl = Some(kernel.matrix().clone());
                current = kernel.domain().clone();
            }
            terms.push(f);
            ranks.push(gens.len());
        }
        FreeResolution { module: m.clone(), strategy, terms, ranks, augmentation, differentials }
    }

    pub fn length(&self) -> usize {
        self.terms.len() - 1
    }

    fn basis_column(&self, t: usize) -> usize {
        t * self.module.ring().group_order() + self.module.ring().identity_index()
    }

    /// Chain maps `f_k: F_k -> F'_k`, `k <= upto`, lifting `f: M -> M'`.
    pub fn lift(&self, target: &FreeResolution, f: &Matrix, upto: usize) -> Vec<Matrix> {
        assert!(upto <= self.length() && upto <= target.length(), "resolutions too short for the lift");
        let ring = self.module.ring();
        let mut maps: Vec<Matrix> = Vec::with_capacity(upto + 1);
        for k in 0..=upto {
            let (src_map, dst_group, dst_map): (&Matrix, &FinAb, &Matrix) = if k == 0 {
                (&self.augmentation, target.module.abelian(), &target.augmentation)
            } else {
                (&self.differentials[k - 1], target.terms[k - 1].abelian(), &target.differentials[k - 1])
            };
            let images: Vec<Vec<i64>> = (0..self.ranks[k])
                .map(|t| {
                    let x = src_map.column(self.basis_column(t));
                    let y = if k == 0 { f.apply_mod(&x, dst_group.factors()) } else { maps[k - 1].apply_mod(&x, dst_group.factors()) };
                    preimage(dst_map, target.terms[k].abelian(), dst_group, &y).expect("exactness of the target resolution")
                })
                .collect();
            maps.push(free_extension(ring, &images, &target.terms[k]));
        }
        maps
    }
}

/// `Tor_i^R(M, N)` with the data needed to make it functorial in `M`.
#[derive(Clone, Debug)]
pub struct TorGroup {
    pub degree: usize,
    pub module: Arc<FiniteModule>,
    pub resolution: FreeResolution,
    coefficient: Arc<FiniteModule>,
    middle: TensorProduct,
    homology: Homology,
}

pub fn tor(i: usize, m: &Arc<FiniteModule>, n: &Arc<FiniteModule>) -> Result<TorGroup> {
    tor_with(i, m, n, ResolutionStrategy::MinimalCover, DEFAULT_MAX_TOR_DEGREE)
}

pub fn tor_with(
    i: usize,
    m: &Arc<FiniteModule>,
    n: &Arc<FiniteModule>,
    strategy: ResolutionStrategy,
    max_degree: usize,
) -> Result<TorGroup> {
    if i > max_degree {
        return Err(Error::TorDegree(i, max_degree));
    }
    if m.ring() != n.ring() {
        return Err(Error::RingMismatch(format!("{} vs {}", m.ring(), n.ring())));
    }
    let res = FreeResolution::new(m, i + 1, strategy);
    let id_n = Matrix::identity(n.rank());
    let upper = tensor(&res.terms[i + 1], n)?;
    let middle = tensor(&res.terms[i], n)?;
    let d_in = upper.map(&middle, &res.differentials[i], &id_n);
    let (d_out, lower_group) = if i == 0 {
        (Matrix::zeros(0, middle.module.rank()), FinAb::trivial())
    } else {
        let lower = tensor(&res.terms[i - 1], n)?;
        (middle.map(&lower, &res.differentials[i - 1], &id_n), lower.module.abelian().clone())
    };
    let homology = Homology::new(&d_in, middle.module.abelian(), &d_out, &lower_group);
    let module = FiniteModule::from_parts(m.ring().base(), homology.group.clone(), Vec::new());
    Ok(TorGroup { degree: i, module: Arc::new(module), resolution: res, coefficient: n.clone(), middle, homology })
}

impl TorGroup {
    pub fn coefficient(&self) -> &Arc<FiniteModule> {
        &self.coefficient
    }

    /// `Tor_i(f, N)` for `f: M -> M'`, where `self` is computed from `M`
    /// and `target` from `M'`.
    pub fn map_to(&self, target: &TorGroup, f: &ModuleHom) -> Result<ModuleHom> {
        if self.degree != target.degree || self.coefficient != target.coefficient {
            return Err(Error::InvalidModuleHom("Tor groups of different degree or coefficients".into()));
        }
        if **f.domain() != *self.resolution.module || **f.codomain() != *target.resolution.module {
            return Err(Error::InvalidModuleHom("map does not match the resolved modules".into()));
        }
        let chain = self.resolution.lift(&target.resolution, f.matrix(), self.degree);
        let phi = self.middle.map(&target.middle, &chain[self.degree], &Matrix::identity(self.coefficient.rank()));
        let reps = self.homology.representatives();
        let cols: Vec<Vec<i64>> = (0..reps.cols())
            .map(|c| {
                let y = phi.apply_mod(&reps.column(c), target.middle.module.factors());
                target.homology.class_of(&y).expect("chain maps send cycles to cycles")
            })
            .collect();
        let matrix = Matrix::from_columns(target.module.rank(), &cols);
        Ok(ModuleHom::new_unchecked(self.module.clone(), target.module.clone(), matrix))
    }
}
