//! Pontryagin duality `M ↦ Hom(M, Q/Z)`.
//!
//! The dual of `⊕ Z/d_i` is written in the dual basis `χ_i(e_j) = δ_ij / d_i`,
//! so it has the same invariant factors. A left `(Z/n)[G]`-module dualises
//! to a right module; it is turned back into a left module through
//! `g ↦ g⁻¹`, which identifies the opposite ring with the ring itself.

use super::{FiniteModule, ModuleHom};
use crate::matrix::{gcd, Matrix};
use std::sync::Arc;

pub fn pontryagin_dual(m: &FiniteModule) -> FiniteModule {
    let action = match m.ring().group() {
        None => Vec::new(),
        Some(g) => g.generators().iter().map(|&s| contragredient(m.element_action(g.inv(s)), m.factors())).collect(),
    };
    FiniteModule::from_parts(m.ring().clone(), m.abelian().clone(), action)
}

/// Entry `D[j][i] = ρ(g⁻¹)[i][j] · d_j / d_i`, an integer because of the
/// congruence conditions on `ρ`.
fn contragredient(inv: &Matrix, d: &[i64]) -> Matrix {
    let mut a = Matrix::zeros(d.len(), d.len());
    for j in 0..d.len() {
        for i in 0..d.len() {
            let x = inv.get(i, j) as i128 * d[j] as i128;
            a.set(j, i, ((x / d[i] as i128).rem_euclid(d[j] as i128)) as i64);
        }
    }
    a
}

/// `f^∨: N^∨ -> M^∨`, `ψ ↦ ψ ∘ f`.
pub fn dual_hom(f: &ModuleHom) -> ModuleHom {
    dual_hom_between(f, Arc::new(pontryagin_dual(f.codomain())), Arc::new(pontryagin_dual(f.domain())))
}

pub(crate) fn dual_hom_between(f: &ModuleHom, dual_cod: Arc<FiniteModule>, dual_dom: Arc<FiniteModule>) -> ModuleHom {
    let dm = f.domain().factors();
    let dn = f.codomain().factors();
    let mut t = Matrix::zeros(dm.len(), dn.len());
    for i in 0..dm.len() {
        for j in 0..dn.len() {
            let x = f.matrix().get(j, i) as i128 * dm[i] as i128;
            t.set(i, j, ((x / dn[j] as i128).rem_euclid(dm[i] as i128)) as i64);
        }
    }
    ModuleHom::new_unchecked(dual_cod, dual_dom, t)
}

/// `χ(x) ∈ Q/Z` as a reduced fraction `(p, q)` with `0 <= p < q`.
pub fn pair(m: &FiniteModule, chi: &[i64], x: &[i64]) -> (i64, i64) {
    let e = m.exponent();
    let total: i128 = m.factors().iter().zip(chi.iter().zip(x)).map(|(&d, (&c, &v))| c as i128 * v as i128 * (e / d) as i128).sum();
    let p = total.rem_euclid(e as i128) as i64;
    let g = gcd(p, e);
    (p / g, e / g)
}

/// The evaluation map `M -> M^∨∨`. In dual-basis coordinates it is the
/// identity matrix.
pub fn evaluation_map(m: &Arc<FiniteModule>) -> ModuleHom {
    let dd = Arc::new(pontryagin_dual(&pontryagin_dual(m)));
    ModuleHom::new_unchecked(m.clone(), dd, Matrix::identity(m.rank()))
}

/// Checks that the evaluation map is an equivariant bijection with
/// `ev(x)(χ) = χ(x)` for every `x ∈ M` and `χ ∈ M^∨`, stopping after
/// `max_pairs` pairs.
pub fn verify_evaluation(m: &Arc<FiniteModule>, max_pairs: usize) -> bool {
    let ev = evaluation_map(m);
    if !ev.is_equivariant() || !ev.is_bijective() {
        return false;
    }
    let dual = pontryagin_dual(m);
    let mut checked = 0;
    for x in m.elements() {
        let ex = ev.apply(&x);
        for chi in dual.elements() {
            if checked == max_pairs {
                return true;
            }
            checked += 1;
            if pair(&dual, &ex, &chi) != pair(m, &chi, &x) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fingroup::FiniteGroup;
    use crate::finmod::{free_module_of_rank, FiniteRing, HomSet};

    #[test]
    fn cyclic_and_mixed_duals() {
        let z4 = FiniteRing::zmod(4).unwrap();
        let m = Arc::new(FiniteModule::new(z4.clone(), vec![2, 4], vec![]).unwrap());
        let d = pontryagin_dual(&m);
        assert_eq!(d.factors(), &[2, 4]);
        // characters counted independently as homs into Z/4
        let chars = HomSet::compute(&m, &Arc::new(FiniteModule::new(z4, vec![4], vec![]).unwrap())).unwrap();
        assert_eq!(chars.count(), d.order());
        assert!(verify_evaluation(&m, usize::MAX));
    }

    #[test]
    fn dual_of_group_algebra_modules() {
        let ring = FiniteRing::group_algebra(3, FiniteGroup::symmetric(3)).unwrap();
        let free = Arc::new(free_module_of_rank(&ring, 1));
        let d = pontryagin_dual(&free);
        d.validate().unwrap();
        assert_eq!(pontryagin_dual(&d), *free);
        assert!(verify_evaluation(&free, 2000));
    }

    #[test]
    fn dual_hom_is_contravariant() {
        let z4 = FiniteRing::zmod(4).unwrap();
        let a = Arc::new(FiniteModule::new(z4.clone(), vec![2], vec![]).unwrap());
        let b = Arc::new(FiniteModule::new(z4.clone(), vec![4], vec![]).unwrap());
        let f = ModuleHom::new(a.clone(), b.clone(), Matrix::from_rows(&[vec![2]]).unwrap()).unwrap();
        let fd = dual_hom(&f);
        assert_eq!(fd.domain().factors(), &[4]);
        assert_eq!(fd.codomain().factors(), &[2]);
        ModuleHom::new(fd.domain().clone(), fd.codomain().clone(), fd.matrix().clone()).unwrap();
        for psi in fd.domain().elements() {
            for x in a.elements() {
                assert_eq!(pair(&b, &psi, &f.apply(&x)), pair(&a, &fd.apply(&psi), &x));
            }
        }
    }
}
