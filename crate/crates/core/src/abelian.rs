//! Finite abelian groups in invariant-factor form and the subquotient
//! constructions (presentations, kernels, images, homology) that the module
//! layer is built on.
//!
//! Elements are coordinate vectors reduced modulo the factors. Homomorphisms
//! are integer matrices acting on columns.

use crate::matrix::{gcd, kernel_mod, lcm, smith_mod, solve_mod, Matrix};
use serde::{Deserialize, Serialize};

/// `Z/d1 + Z/d2 + ...` with `1 < d1 | d2 | ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinAb {
    factors: Vec<i64>,
}

impl FinAb {
    pub fn trivial() -> Self {
        FinAb { factors: Vec::new() }
    }

    /// Checks the divisibility chain; factors equal to 1 are rejected.
    pub fn new(factors: Vec<i64>) -> Option<Self> {
        if factors.iter().any(|&d| d < 2) {
            return None;
        }
        if factors.windows(2).any(|w| w[1] % w[0] != 0) {
            return None;
        }
        Some(FinAb { factors })
    }

    /// The invariant-factor form of an arbitrary direct sum of cyclic groups.
    pub fn from_cyclic(orders: &[i64]) -> Self {
        let m = orders.iter().fold(1, |a, &d| lcm(a, d));
        present(orders.len(), &Matrix::diagonal(orders), m).group
    }

    pub fn factors(&self) -> &[i64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn exponent(&self) -> i64 {
        self.factors.last().copied().unwrap_or(1)
    }

    /// Order, or `None` if it does not fit in `u128`.
    pub fn order(&self) -> Option<u128> {
        self.factors.iter().try_fold(1u128, |acc, &d| acc.checked_mul(d as u128))
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn zero(&self) -> Vec<i64> {
        vec![0; self.factors.len()]
    }

    pub fn reduce(&self, v: &mut [i64]) {
        for (x, &d) in v.iter_mut().zip(&self.factors) {
            *x = x.rem_euclid(d);
        }
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        v.len() == self.rank() && v.iter().zip(&self.factors).all(|(&x, &d)| (0..d).contains(&x))
    }

    /// All elements in mixed-radix order (first coordinate fastest).
    pub fn elements(&self) -> ElementIter<'_> {
        ElementIter { factors: &self.factors, next: Some(self.zero()) }
    }

    /// Element with the given mixed-radix index (first coordinate fastest).
    pub fn element_at(&self, mut index: u128) -> Vec<i64> {
        self.factors
            .iter()
            .map(|&d| {
                let x = (index % d as u128) as i64;
                index /= d as u128;
                x
            })
            .collect()
    }

    /// Mixed-radix index of a reduced element.
    pub fn index_of(&self, v: &[i64]) -> u128 {
        v.iter().zip(&self.factors).rev().fold(0u128, |acc, (&x, &d)| acc * d as u128 + x as u128)
    }

    pub fn direct_sum(parts: &[&FinAb]) -> Vec<i64> {
        parts.iter().flat_map(|p| p.factors.iter().copied()).collect()
    }
}

pub struct ElementIter<'a> {
    factors: &'a [i64],
    next: Option<Vec<i64>>,
}

impl Iterator for ElementIter<'_> {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        let mut carried = true;
        for (x, &d) in succ.iter_mut().zip(self.factors) {
            *x += 1;
            if *x < d {
                carried = false;
                break;
            }
            *x = 0;
        }
        if !carried {
            self.next = Some(succ);
        }
        Some(cur)
    }
}

/// A quotient `Z^k / L` brought to invariant-factor form.
///
/// `to_canon` sends raw coordinates to canonical ones; `from_canon` has as
/// columns raw lifts of the canonical generators.
#[derive(Clone, Debug)]
pub struct Presented {
    pub group: FinAb,
    pub to_canon: Matrix,
    pub from_canon: Matrix,
}

impl Presented {
    pub fn canon(&self, raw: &[i64]) -> Vec<i64> {
        self.to_canon.apply_mod(raw, self.group.factors())
    }

    /// Transports a raw-coordinate map `raw_map: Z^k -> Z^k` to canonical form.
    pub fn transport(&self, raw_map: &Matrix) -> Matrix {
        self.to_canon.mul(&raw_map.mul(&self.from_canon)).reduced_rows(self.group.factors())
    }
}

/// Presents `Z^k / (span(relations) + m Z^k)`. The lattice must contain
/// `mZ^k`, which holds whenever the quotient is killed by `m`.
pub fn present(k: usize, relations: &Matrix, m: i64) -> Presented {
    assert_eq!(relations.rows(), k, "relation matrix has wrong row count");
    let m = m.max(1);
    let s = smith_mod(relations, m);
    let mut keep = Vec::new();
    let mut factors = Vec::new();
    for i in 0..k {
        let d = if i < s.diag.len() { s.diag[i] } else { 0 };
        let f = if d == 0 { m } else { gcd(d, m) };
        if f > 1 {
            keep.push(i);
            factors.push(f);
        }
    }
    let to_canon = s.u.select_rows(&keep).reduced_rows(&factors);
    let from_canon = s.u_inv.select_columns(&keep);
    let group = FinAb::new(factors).expect("Smith form yields a divisibility chain");
    Presented { group, to_canon, from_canon }
}

/// Modulus that kills both groups.
pub fn common_modulus(a: &FinAb, b: &FinAb) -> i64 {
    lcm(a.exponent(), b.exponent())
}

/// Checks that `h` is a well-defined homomorphism `a -> b`.
pub fn is_well_defined(h: &Matrix, a: &FinAb, b: &FinAb) -> bool {
    if h.rows() != b.rank() || h.cols() != a.rank() {
        return false;
    }
    (0..b.rank()).all(|j| (0..a.rank()).all(|i| (h.get(j, i) as i128 * a.factors()[i] as i128) % b.factors()[j] as i128 == 0))
}

/// Columns generating `ker(h: a -> b)`, in `a`-coordinates.
pub fn kernel_generators(h: &Matrix, a: &FinAb, b: &FinAb) -> Matrix {
    let m = common_modulus(a, b);
    let stacked = Matrix::hstack(&[h, &Matrix::diagonal(b.factors())]);
    let k = kernel_mod(&stacked, m);
    let top: Vec<usize> = (0..a.rank()).collect();
    let mut gens = k.select_rows(&top);
    gens.reduce_rows(a.factors());
    gens
}

/// Some `x` in `a` with `h x = y` in `b`.
pub fn preimage(h: &Matrix, a: &FinAb, b: &FinAb, y: &[i64]) -> Option<Vec<i64>> {
    let m = common_modulus(a, b);
    let stacked = Matrix::hstack(&[h, &Matrix::diagonal(b.factors())]);
    let sol = solve_mod(&stacked, y, m)?;
    let mut x = sol[..a.rank()].to_vec();
    a.reduce(&mut x);
    Some(x)
}

/// The subgroup of `ambient` generated by the columns of `gens`.
#[derive(Clone, Debug)]
pub struct Subgroup {
    pub group: FinAb,
    /// Ambient coordinates of the canonical generators.
    pub inclusion: Matrix,
    gens: Matrix,
    pres: Presented,
    ambient: FinAb,
}

impl Subgroup {
    pub fn generated(ambient: &FinAb, gens: &Matrix) -> Subgroup {
        assert_eq!(gens.rows(), ambient.rank());
        let mut gens = gens.clone();
        gens.reduce_rows(ambient.factors());
        let s = gens.cols();
        if ambient.is_trivial() {
            let gens = Matrix::zeros(0, 0);
            let pres = present(0, &Matrix::zeros(0, 0), 1);
            return Subgroup { group: FinAb::trivial(), inclusion: Matrix::zeros(0, 0), gens, pres, ambient: ambient.clone() };
        }
        let relations = kernel_generators(&gens, &FinAb::free_like(s, ambient.exponent()), ambient);
        let pres = present(s, &relations, ambient.exponent());
        let inclusion = gens.mul(&pres.from_canon).reduced_rows(ambient.factors());
        Subgroup { group: pres.group.clone(), inclusion, gens, pres, ambient: ambient.clone() }
    }

    /// Canonical subgroup coordinates of an ambient element, if it lies in
    /// the subgroup.
    pub fn coords(&self, y: &[i64]) -> Option<Vec<i64>> {
        if self.gens.cols() == 0 {
            return y.iter().all(|&x| x == 0).then(|| self.group.zero());
        }
        let free = FinAb::free_like(self.gens.cols(), self.ambient.exponent());
        let c = preimage(&self.gens, &free, &self.ambient, y)?;
        Some(self.pres.canon(&c))
    }

    pub fn contains(&self, y: &[i64]) -> bool {
        self.coords(y).is_some()
    }

    pub fn order(&self) -> Option<u128> {
        self.group.order()
    }
}

impl FinAb {
    /// `(Z/e)^s`, used as a free stand-in for coefficient vectors.
    pub(crate) fn free_like(s: usize, e: i64) -> FinAb {
        if e <= 1 {
            return FinAb::trivial();
        }
        FinAb { factors: vec![e; s] }
    }
}

/// `ker(h: a -> b)` as a subgroup of `a`.
pub fn kernel(h: &Matrix, a: &FinAb, b: &FinAb) -> Subgroup {
    Subgroup::generated(a, &kernel_generators(h, a, b))
}

/// `im(h: a -> b)` as a subgroup of `b`.
pub fn image(h: &Matrix, b: &FinAb) -> Subgroup {
    Subgroup::generated(b, h)
}

pub fn is_injective(h: &Matrix, a: &FinAb, b: &FinAb) -> bool {
    kernel(h, a, b).group.is_trivial()
}

pub fn is_surjective(h: &Matrix, b: &FinAb) -> bool {
    image(h, b).group == *b
}

pub fn is_bijective(h: &Matrix, a: &FinAb, b: &FinAb) -> bool {
    a == b && is_injective(h, a, b)
}

/// Quotient of `ambient` by the subgroup generated by the columns of `gens`.
pub fn quotient(ambient: &FinAb, gens: &Matrix) -> Presented {
    let rel = Matrix::hstack(&[gens, &Matrix::diagonal(ambient.factors())]);
    present(ambient.rank(), &rel, ambient.exponent())
}

/// `ker(g) / im(f)` for `f: a -> b`, `g: b -> c` with `g f = 0`.
#[derive(Clone, Debug)]
pub struct Homology {
    pub group: FinAb,
    cycles: Subgroup,
    quot: Presented,
}

impl Homology {
    pub fn new(f: &Matrix, b: &FinAb, g: &Matrix, c: &FinAb) -> Homology {
        let cycles = kernel(g, b, c);
        let boundary_cols: Vec<Vec<i64>> =
            (0..f.cols()).map(|j| cycles.coords(&f.column(j)).expect("composite of differentials must vanish")).collect();
        let bmat = Matrix::from_columns(cycles.group.rank(), &boundary_cols);
        let quot = quotient(&cycles.group, &bmat);
        Homology { group: quot.group.clone(), cycles, quot }
    }

    /// Class of a cycle given in `b`-coordinates.
    pub fn class_of(&self, cycle: &[i64]) -> Option<Vec<i64>> {
        let c = self.cycles.coords(cycle)?;
        Some(self.quot.canon(&c))
    }

    /// `b`-coordinates of cycles representing the canonical generators.
    pub fn representatives(&self) -> Matrix {
        self.cycles.inclusion.mul(&self.quot.from_canon)
    }
}
