//! Finite spaces, maps between them, fibres and fibre products.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A finite discrete space whose points are `0..size`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FiniteSpace {
    pub size: usize,
}

impl FiniteSpace {
    pub fn new(size: usize) -> Self {
        FiniteSpace { size }
    }

    pub fn point() -> Self {
        FiniteSpace { size: 1 }
    }

    pub fn empty() -> Self {
        FiniteSpace { size: 0 }
    }

    pub fn points(&self) -> std::ops::Range<usize> {
        0..self.size
    }

    pub fn check_point(&self, x: usize) -> Result<()> {
        if x < self.size {
            Ok(())
        } else {
            Err(Error::PointOutOfRange { point: x, size: self.size })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SpaceMapRepr", into = "SpaceMapRepr")]
pub struct SpaceMap {
    domain: FiniteSpace,
    codomain: FiniteSpace,
    values: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct SpaceMapRepr {
    domain: usize,
    codomain: usize,
    values: Vec<usize>,
}

impl TryFrom<SpaceMapRepr> for SpaceMap {
    type Error = Error;
    fn try_from(r: SpaceMapRepr) -> Result<Self> {
        SpaceMap::new(FiniteSpace::new(r.domain), FiniteSpace::new(r.codomain), r.values)
    }
}

impl From<SpaceMap> for SpaceMapRepr {
    fn from(m: SpaceMap) -> Self {
        SpaceMapRepr { domain: m.domain.size, codomain: m.codomain.size, values: m.values }
    }
}

impl SpaceMap {
    pub fn new(domain: FiniteSpace, codomain: FiniteSpace, values: Vec<usize>) -> Result<Self> {
        if values.len() != domain.size {
            return Err(Error::InvalidSpaceMap(format!("{} values for a domain of size {}", values.len(), domain.size)));
        }
        if let Some(&v) = values.iter().find(|&&v| v >= codomain.size) {
            return Err(Error::InvalidSpaceMap(format!("value {v} outside codomain of size {}", codomain.size)));
        }
        Ok(SpaceMap { domain, codomain, values })
    }

    pub fn identity(x: FiniteSpace) -> Self {
        SpaceMap { domain: x, codomain: x, values: x.points().collect() }
    }

    /// The unique map to the one-point space.
    pub fn to_point(x: FiniteSpace) -> Self {
        SpaceMap { domain: x, codomain: FiniteSpace::point(), values: vec![0; x.size] }
    }

    /// Builds a projection from fibre sizes: points of fibre 0 first, then fibre 1, ...
    pub fn from_fibre_sizes(sizes: &[usize]) -> Self {
        let values: Vec<usize> = sizes.iter().enumerate().flat_map(|(x, &n)| std::iter::repeat_n(x, n)).collect();
        SpaceMap { domain: FiniteSpace::new(values.len()), codomain: FiniteSpace::new(sizes.len()), values }
    }

    pub fn domain(&self) -> FiniteSpace {
        self.domain
    }

    pub fn codomain(&self) -> FiniteSpace {
        self.codomain
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn apply(&self, x: usize) -> usize {
        self.values[x]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &SpaceMap) -> Result<SpaceMap> {
        if self.codomain != other.domain {
            return Err(Error::InvalidSpaceMap("composition of non-composable maps".into()));
        }
        Ok(SpaceMap { domain: self.domain, codomain: other.codomain, values: self.values.iter().map(|&v| other.values[v]).collect() })
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.codomain.size];
        self.values.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.codomain.size];
        for &v in &self.values {
            seen[v] = true;
        }
        seen.into_iter().all(|s| s)
    }

    pub fn fibre_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.codomain.size];
        for &v in &self.values {
            sizes[v] += 1;
        }
        sizes
    }
}

/// Points of `p.domain` over `x`, in increasing order.
pub fn fibre(p: &SpaceMap, x: usize) -> Result<Vec<usize>> {
    p.codomain.check_point(x)?;
    Ok(p.values.iter().enumerate().filter(|&(_, &v)| v == x).map(|(i, _)| i).collect())
}

/// The fibre product of a cospan `f: A -> X <- B: g`.
///
/// Points are the pairs `(a, b)` with `f(a) = g(b)` in lexicographic order;
/// returns the space and its two projections.
pub fn pullback(f: &SpaceMap, g: &SpaceMap) -> Result<(FiniteSpace, SpaceMap, SpaceMap)> {
    if f.codomain != g.codomain {
        return Err(Error::IncompatibleCospan(f.codomain.size, g.codomain.size));
    }
    let pairs: Vec<(usize, usize)> =
        f.domain.points().flat_map(|a| g.domain.points().filter(move |&b| f.values[a] == g.values[b]).map(move |b| (a, b))).collect();
    let p = FiniteSpace::new(pairs.len());
    let first = SpaceMap { domain: p, codomain: f.domain, values: pairs.iter().map(|&(a, _)| a).collect() };
    let second = SpaceMap { domain: p, codomain: g.domain, values: pairs.iter().map(|&(_, b)| b).collect() };
    Ok((p, first, second))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_over_point() {
        let f = SpaceMap::to_point(FiniteSpace::new(2));
        let g = SpaceMap::to_point(FiniteSpace::new(3));
        let (p, _, _) = pullback(&f, &g).unwrap();
        assert_eq!(p.size, 6);
    }

    #[test]
    fn pullback_along_identity() {
        let g = SpaceMap::new(FiniteSpace::new(4), FiniteSpace::new(2), vec![1, 0, 0, 1]).unwrap();
        let id = SpaceMap::identity(FiniteSpace::new(2));
        let (p, first, second) = pullback(&id, &g).unwrap();
        assert_eq!(p.size, 4);
        assert!(second.is_injective() && second.is_surjective());
        assert_eq!(first.then(&id).unwrap(), second.then(&g).unwrap());
    }

    #[test]
    fn pullback_filters_pairs() {
        let f = SpaceMap::new(FiniteSpace::new(2), FiniteSpace::new(2), vec![0, 1]).unwrap();
        let g = SpaceMap::new(FiniteSpace::new(1), FiniteSpace::new(2), vec![0]).unwrap();
        let (p, first, second) = pullback(&f, &g).unwrap();
        assert_eq!(p.size, 1);
        assert_eq!(first.values(), &[0]);
        assert_eq!(second.values(), &[0]);
    }

    #[test]
    fn incompatible_cospan() {
        let f = SpaceMap::to_point(FiniteSpace::new(2));
        let g = SpaceMap::identity(FiniteSpace::new(2));
        assert_eq!(pullback(&f, &g).unwrap_err(), Error::IncompatibleCospan(1, 2));
        assert!(pullback(&f, &g).unwrap_err().to_string().contains("incompatible cospan"));
    }

    #[test]
    fn fibres() {
        let c = SpaceMap::to_point(FiniteSpace::new(3));
        assert_eq!(fibre(&c, 0).unwrap(), vec![0, 1, 2]);
        let id = SpaceMap::identity(FiniteSpace::new(4));
        assert_eq!(fibre(&id, 2).unwrap(), vec![2]);
        let p = SpaceMap::new(FiniteSpace::new(3), FiniteSpace::new(2), vec![0, 1, 0]).unwrap();
        assert_eq!(fibre(&p, 0).unwrap(), vec![0, 2]);
        assert!(fibre(&p, 2).is_err());
    }

    #[test]
    fn invalid_maps_rejected() {
        assert!(SpaceMap::new(FiniteSpace::new(2), FiniteSpace::new(1), vec![0]).is_err());
        assert!(SpaceMap::new(FiniteSpace::new(1), FiniteSpace::new(1), vec![1]).is_err());
        let bad: std::result::Result<SpaceMap, _> = serde_json::from_str(r#"{"domain":1,"codomain":1,"values":[3]}"#);
        assert!(bad.is_err());
    }
}
