//! Finite groups given by multiplication tables.
//!
//! Elements are the indices `0..order`. Everything here is exact and
//! exhaustive; [`enumerate_homs`] is the oracle that all universal-property
//! checks in the crate reduce to.

use crate::abelian::{present, FinAb};
use crate::error::{Error, Result};
use crate::matrix::{lcm, Matrix};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GroupRepr", into = "GroupRepr")]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    identity: usize,
    inverses: Vec<usize>,
    generators: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct GroupRepr {
    order: usize,
    table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generators: Option<Vec<usize>>,
}

impl TryFrom<GroupRepr> for FiniteGroup {
    type Error = Error;
    fn try_from(r: GroupRepr) -> Result<Self> {
        if r.table.len() != r.order {
            return Err(Error::InvalidGroup(format!("table has {} rows, order is {}", r.table.len(), r.order)));
        }
        FiniteGroup::from_table(r.table, r.generators)
    }
}

impl From<FiniteGroup> for GroupRepr {
    fn from(g: FiniteGroup) -> Self {
        let table = (0..g.order).map(|i| g.table[i * g.order..(i + 1) * g.order].to_vec()).collect();
        GroupRepr { order: g.order, table, generators: Some(g.generators) }
    }
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup(order {}, generators {:?})", self.order, self.generators)
    }
}

impl FiniteGroup {
    /// Validates the group axioms exhaustively. If `generators` is `None`
    /// a small generating set is chosen deterministically.
    pub fn from_table(rows: Vec<Vec<usize>>, generators: Option<Vec<usize>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidGroup("a group has at least one element".into()));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidGroup("table is not square".into()));
        }
        if rows.iter().flatten().any(|&x| x >= n) {
            return Err(Error::InvalidGroup("table entry out of range".into()));
        }
        let table: Vec<usize> = rows.concat();
        let mul = |a: usize, b: usize| table[a * n + b];
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| mul(e, x) == x && mul(x, e) == x))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        let mut inverses = vec![0; n];
        for x in 0..n {
            inverses[x] = (0..n)
                .find(|&y| mul(x, y) == identity && mul(y, x) == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("element {x} has no inverse")))?;
        }
        for a in 0..n {
            for b in 0..n {
                let ab = mul(a, b);
                for c in 0..n {
                    if mul(ab, c) != mul(a, mul(b, c)) {
                        return Err(Error::InvalidGroup(format!("not associative at ({a},{b},{c})")));
                    }
                }
            }
        }
        let mut g = FiniteGroup { order: n, table, identity, inverses, generators: Vec::new() };
        match generators {
            Some(gens) => {
                if gens.iter().any(|&x| x >= n) {
                    return Err(Error::InvalidGroup("generator out of range".into()));
                }
                if g.subgroup_closure(&gens).len() != n {
                    return Err(Error::InvalidGroup("generators do not generate the group".into()));
                }
                g.generators = gens;
            }
            None => g.generators = g.greedy_generators(),
        }
        Ok(g)
    }

    /// Table construction for trusted callers (the built-in constructors).
    fn from_fn(n: usize, f: impl Fn(usize, usize) -> usize) -> Self {
        let rows = (0..n).map(|a| (0..n).map(|b| f(a, b)).collect()).collect();
        FiniteGroup::from_table(rows, None).expect("built-in group tables are valid")
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        Self::from_fn(n, |a, b| (a + b) % n)
    }

    /// The dihedral group of order `2n`. Element `i + n*f` is `r^i s^f`.
    pub fn dihedral(n: usize) -> Self {
        assert!(n >= 1);
        Self::from_fn(2 * n, |x, y| {
            let (i, a) = (x % n, x / n);
            let (j, b) = (y % n, y / n);
            let k = if a == 0 { (i + j) % n } else { (i + n - j) % n };
            k + n * ((a + b) % 2)
        })
    }

    /// All permutations of `0..n` in lexicographic order, `(p q)(x) = p(q(x))`.
    pub fn symmetric(n: usize) -> Self {
        let perms = permutations(n);
        Self::permutation_group(&perms)
    }

    pub fn alternating(n: usize) -> Self {
        let perms: Vec<Vec<usize>> = permutations(n).into_iter().filter(|p| is_even(p)).collect();
        Self::permutation_group(&perms)
    }

    fn permutation_group(perms: &[Vec<usize>]) -> Self {
        let index = |p: &Vec<usize>| perms.iter().position(|q| q == p).expect("closed under composition");
        Self::from_fn(perms.len(), |a, b| {
            let c: Vec<usize> = (0..perms[a].len()).map(|x| perms[a][perms[b][x]]).collect();
            index(&c)
        })
    }

    /// The quaternion group `{±1, ±i, ±j, ±k}`; element `u + 4s` is `(-1)^s u`
    /// with `u` in `1, i, j, k`.
    pub fn quaternion() -> Self {
        // unit products: (sign, unit)
        const UNIT: [[(usize, usize); 4]; 4] = [
            [(0, 0), (0, 1), (0, 2), (0, 3)],
            [(0, 1), (1, 0), (0, 3), (1, 2)],
            [(0, 2), (1, 3), (1, 0), (0, 1)],
            [(0, 3), (0, 2), (1, 1), (1, 0)],
        ];
        Self::from_fn(8, |x, y| {
            let (u, s) = (x % 4, x / 4);
            let (v, t) = (y % 4, y / 4);
            let (sign, w) = UNIT[u][v];
            w + 4 * ((s + t + sign) % 2)
        })
    }

    /// `G x H` with element `(a, b)` at index `a * |H| + b`.
    pub fn direct_product(g: &FiniteGroup, h: &FiniteGroup) -> Self {
        let m = h.order;
        let table_fn = |x: usize, y: usize| g.mul(x / m, y / m) * m + h.mul(x % m, y % m);
        let n = g.order * m;
        let table: Vec<usize> = (0..n).flat_map(|x| (0..n).map(move |y| table_fn(x, y))).collect();
        let identity = g.identity * m + h.identity;
        let inverses = (0..n).map(|x| g.inv(x / m) * m + h.inv(x % m)).collect();
        let mut p = FiniteGroup { order: n, table, identity, inverses, generators: Vec::new() };
        p.generators = p.greedy_generators();
        p
    }

    /// Parses `C{n}`, `D{n}` (order 2n), `S{n}`, `A{n}`, `Q8`, `1`, and
    /// products joined by `x`, e.g. `C2xC2`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let bad = || Error::UnknownGroupSpec(spec.to_string());
        let mut parts = spec.split('x');
        let first = parts.next().ok_or_else(bad)?;
        let mut g = Self::from_atom(first).ok_or_else(bad)?;
        for p in parts {
            let h = Self::from_atom(p).ok_or_else(bad)?;
            g = Self::direct_product(&g, &h);
        }
        Ok(g)
    }

    fn from_atom(s: &str) -> Option<Self> {
        let num = |t: &str| t.parse::<usize>().ok().filter(|&n| n >= 1);
        match s {
            "1" | "trivial" => return Some(Self::trivial()),
            "Q8" => return Some(Self::quaternion()),
            _ => {}
        }
        let (head, tail) = s.split_at(s.char_indices().nth(1).map_or(s.len(), |(i, _)| i));
        let n = num(tail)?;
        match head {
            "C" if n <= 256 => Some(Self::cyclic(n)),
            "D" if n <= 64 => Some(Self::dihedral(n)),
            "S" if n <= 5 => Some(Self::symmetric(n)),
            "A" if n <= 5 => Some(Self::alternating(n)),
            _ => None,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        (0..self.order).map(|i| self.table[i * self.order..(i + 1) * self.order].to_vec()).collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (a..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn element_orders(&self) -> Vec<usize> {
        (0..self.order).map(|a| self.element_order(a)).collect()
    }

    pub fn exponent(&self) -> usize {
        self.element_orders().into_iter().fold(1, |a, b| lcm(a as i64, b as i64) as usize)
    }

    pub fn commutator(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))
    }

    pub fn conjugate(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    /// `g^k` for `k >= 0`.
    pub fn pow(&self, g: usize, k: u64) -> usize {
        let mut acc = self.identity;
        for _ in 0..k {
            acc = self.mul(acc, g);
        }
        acc
    }

    /// The subgroup generated by `set`, as a sorted element list.
    pub fn subgroup_closure(&self, set: &[usize]) -> Vec<usize> {
        let mut member = vec![false; self.order];
        member[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(a) = queue.pop_front() {
            for &s in set {
                let b = self.mul(a, s);
                if !member[b] {
                    member[b] = true;
                    queue.push_back(b);
                }
            }
        }
        (0..self.order).filter(|&x| member[x]).collect()
    }

    /// The smallest normal subgroup containing `set`, sorted.
    pub fn normal_closure(&self, set: &[usize]) -> Vec<usize> {
        let mut conj: Vec<usize> =
            set.iter().flat_map(|&s| (0..self.order).map(move |g| (g, s))).map(|(g, s)| self.conjugate(g, s)).collect();
        conj.sort_unstable();
        conj.dedup();
        self.subgroup_closure(&conj)
    }

    pub fn commutator_subgroup(&self) -> Vec<usize> {
        let mut comms: Vec<usize> =
            (0..self.order).flat_map(|a| (0..self.order).map(move |b| (a, b))).map(|(a, b)| self.commutator(a, b)).collect();
        comms.sort_unstable();
        comms.dedup();
        self.subgroup_closure(&comms)
    }

    pub fn is_normal_subset(&self, subgroup: &[usize]) -> bool {
        let mut member = vec![false; self.order];
        for &h in subgroup {
            member[h] = true;
        }
        subgroup.iter().all(|&h| (0..self.order).all(|g| member[self.conjugate(g, h)]))
    }

    /// Elements taken in decreasing order of element order, each kept if it
    /// is not already in the span of the previous ones.
    fn greedy_generators(&self) -> Vec<usize> {
        let orders = self.element_orders();
        let mut candidates: Vec<usize> = (0..self.order).filter(|&x| x != self.identity).collect();
        candidates.sort_by_key(|&x| (std::cmp::Reverse(orders[x]), x));
        let mut gens = Vec::new();
        let mut span = vec![self.identity];
        for x in candidates {
            if span.len() == self.order {
                break;
            }
            if span.binary_search(&x).is_err() {
                gens.push(x);
                span = self.subgroup_closure(&gens);
            }
        }
        gens
    }

    /// The subgroup on `elements` as a group in its own right, with its
    /// inclusion. Elements are renumbered in increasing order.
    pub fn subgroup(self: &Arc<Self>, elements: &[usize]) -> Result<(FiniteGroup, GroupHom)> {
        let mut elems = elements.to_vec();
        elems.sort_unstable();
        elems.dedup();
        if elems.is_empty() {
            return Err(Error::InvalidGroup("empty subset is not a subgroup".into()));
        }
        let pos = |x: usize| elems.binary_search(&x).ok();
        let mut rows = Vec::with_capacity(elems.len());
        for &a in &elems {
            let mut row = Vec::with_capacity(elems.len());
            for &b in &elems {
                row.push(pos(self.mul(a, b)).ok_or_else(|| Error::InvalidGroup("subset not closed".into()))?);
            }
            rows.push(row);
        }
        let h = FiniteGroup::from_table(rows, None)?;
        let incl = GroupHom::new(Arc::new(h.clone()), self.clone(), elems)?;
        Ok((h, incl))
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn is_even(p: &[usize]) -> bool {
    let inversions = (0..p.len()).flat_map(|i| (i + 1..p.len()).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
    inversions % 2 == 0
}

/// A homomorphism between finite groups, stored as its value table.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupHom {
    domain: Arc<FiniteGroup>,
    codomain: Arc<FiniteGroup>,
    values: Vec<usize>,
}

impl fmt::Debug for GroupHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupHom({:?})", self.values)
    }
}

#[derive(Serialize, Deserialize)]
struct GroupHomRepr {
    domain: FiniteGroup,
    codomain: FiniteGroup,
    values: Vec<usize>,
}

impl Serialize for GroupHom {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GroupHomRepr { domain: (*self.domain).clone(), codomain: (*self.codomain).clone(), values: self.values.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupHom {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = GroupHomRepr::deserialize(d)?;
        GroupHom::new(Arc::new(r.domain), Arc::new(r.codomain), r.values).map_err(serde::de::Error::custom)
    }
}

impl GroupHom {
    /// Checks the homomorphism equation on all pairs.
    pub fn new(domain: Arc<FiniteGroup>, codomain: Arc<FiniteGroup>, values: Vec<usize>) -> Result<Self> {
        if values.len() != domain.order || values.iter().any(|&v| v >= codomain.order) {
            return Err(Error::InvalidGroupHom("value table has wrong shape".into()));
        }
        for a in 0..domain.order {
            for b in 0..domain.order {
                if values[domain.mul(a, b)] != codomain.mul(values[a], values[b]) {
                    return Err(Error::InvalidGroupHom(format!("fails at ({a},{b})")));
                }
            }
        }
        Ok(GroupHom { domain, codomain, values })
    }

    pub(crate) fn new_unchecked(domain: Arc<FiniteGroup>, codomain: Arc<FiniteGroup>, values: Vec<usize>) -> Self {
        GroupHom { domain, codomain, values }
    }

    pub fn identity(g: Arc<FiniteGroup>) -> Self {
        let values = g.elements().collect();
        GroupHom { domain: g.clone(), codomain: g, values }
    }

    pub fn trivial(domain: Arc<FiniteGroup>, codomain: Arc<FiniteGroup>) -> Self {
        let values = vec![codomain.identity; domain.order];
        GroupHom { domain, codomain, values }
    }

    pub fn domain(&self) -> &Arc<FiniteGroup> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<FiniteGroup> {
        &self.codomain
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.values[x]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &GroupHom) -> Result<GroupHom> {
        if !same_group(&self.codomain, &other.domain) {
            return Err(Error::InvalidGroupHom("composition of non-composable homomorphisms".into()));
        }
        Ok(GroupHom {
            domain: self.domain.clone(),
            codomain: other.codomain.clone(),
            values: self.values.iter().map(|&v| other.values[v]).collect(),
        })
    }

    pub fn kernel(&self) -> Vec<usize> {
        (0..self.domain.order).filter(|&x| self.values[x] == self.codomain.identity).collect()
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().len() == 1
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.codomain.order];
        for &v in &self.values {
            hit[v] = true;
        }
        hit.into_iter().all(|h| h)
    }

    pub fn is_bijective(&self) -> bool {
        self.domain.order == self.codomain.order && self.is_injective()
    }

    pub fn image(&self) -> Vec<usize> {
        let mut im = self.values.clone();
        im.sort_unstable();
        im.dedup();
        im
    }
}

pub fn same_group(a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Per-level breadth-first spanning data for `<g_0, ..., g_{j-1}>`.
struct SpanPlan {
    /// `(element, parent, generator slot)` with `element = parent * gen`, in BFS order.
    steps: Vec<(usize, usize, usize)>,
    members: Vec<usize>,
}

fn span_plans(g: &FiniteGroup, gens: &[usize]) -> Vec<SpanPlan> {
    (1..=gens.len())
        .map(|j| {
            let mut seen = vec![false; g.order];
            seen[g.identity] = true;
            let mut members = vec![g.identity];
            let mut steps = Vec::new();
            let mut queue = VecDeque::from([g.identity]);
            while let Some(a) = queue.pop_front() {
                for (slot, &s) in gens[..j].iter().enumerate() {
                    let b = g.mul(a, s);
                    if !seen[b] {
                        seen[b] = true;
                        steps.push((b, a, slot));
                        members.push(b);
                        queue.push_back(b);
                    }
                }
            }
            SpanPlan { steps, members }
        })
        .collect()
}

/// Generator-based backtracking. `allowed(s, t)` filters the candidate images
/// `t` of generator `s`; candidates always satisfy `ord(t) | ord(s)`.
fn search_homs(g: &FiniteGroup, t: &FiniteGroup, allowed: &dyn Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let gens = g.generators.clone();
    if gens.is_empty() {
        return vec![vec![t.identity; g.order]];
    }
    let plans = span_plans(g, &gens);
    let t_orders = t.element_orders();
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&s| {
            let os = g.element_order(s);
            (0..t.order).filter(|&x| os.is_multiple_of(t_orders[x]) && allowed(s, x)).collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut images = vec![0usize; gens.len()];
    let mut values = vec![usize::MAX; g.order];

    fn rec(
        level: usize,
        g: &FiniteGroup,
        t: &FiniteGroup,
        gens: &[usize],
        plans: &[SpanPlan],
        candidates: &[Vec<usize>],
        images: &mut Vec<usize>,
        values: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if level == gens.len() {
            out.push(values.clone());
            return;
        }
        let plan = &plans[level];
        for &c in &candidates[level] {
            images[level] = c;
            values.iter_mut().for_each(|v| *v = usize::MAX);
            values[g.identity] = t.identity;
            for &(b, a, slot) in &plan.steps {
                values[b] = t.mul(values[a], images[slot]);
            }
            let ok = plan.members.iter().all(|&x| (0..=level).all(|slot| values[g.mul(x, gens[slot])] == t.mul(values[x], images[slot])));
            if ok {
                rec(level + 1, g, t, gens, plans, candidates, images, values, out);
            }
        }
    }

    rec(0, g, t, &gens, &plans, &candidates, &mut images, &mut values, &mut out);
    out.sort();
    out
}

/// Value tables of all homomorphisms `g -> t`, sorted lexicographically.
pub fn hom_tables(g: &FiniteGroup, t: &FiniteGroup) -> Vec<Vec<usize>> {
    search_homs(g, t, &|_, _| true)
}

/// All homomorphisms `g -> t`, sorted lexicographically by value table.
pub fn enumerate_homs(g: &FiniteGroup, t: &FiniteGroup) -> Vec<GroupHom> {
    let (ga, ta) = (Arc::new(g.clone()), Arc::new(t.clone()));
    enumerate_homs_arc(&ga, &ta)
}

pub fn enumerate_homs_arc(g: &Arc<FiniteGroup>, t: &Arc<FiniteGroup>) -> Vec<GroupHom> {
    hom_tables(g, t).into_iter().map(|v| GroupHom::new_unchecked(g.clone(), t.clone(), v)).collect()
}

pub fn count_homs(g: &FiniteGroup, t: &FiniteGroup) -> usize {
    hom_tables(g, t).len()
}

/// Fingerprint used to rule out isomorphism quickly.
pub fn order_fingerprint(g: &FiniteGroup) -> Vec<usize> {
    let mut o = g.element_orders();
    o.sort_unstable();
    o
}

/// An isomorphism `g -> h`, if one exists.
pub fn find_isomorphism(g: &FiniteGroup, h: &FiniteGroup) -> Option<GroupHom> {
    if g.order != h.order || order_fingerprint(g) != order_fingerprint(h) {
        return None;
    }
    let h_orders = h.element_orders();
    let tables = search_homs(g, h, &|s, x| g.element_order(s) == h_orders[x]);
    let (ga, ha) = (Arc::new(g.clone()), Arc::new(h.clone()));
    tables.into_iter().map(|v| GroupHom::new_unchecked(ga.clone(), ha.clone(), v)).find(GroupHom::is_bijective)
}

pub fn is_isomorphic(g: &FiniteGroup, h: &FiniteGroup) -> bool {
    find_isomorphism(g, h).is_some()
}

/// `G / N` for the normal closure `N` of `set`, with the quotient map.
/// Cosets are numbered by their least element.
pub fn quotient_by_normal_closure(g: &Arc<FiniteGroup>, set: &[usize]) -> (FiniteGroup, GroupHom) {
    let n = g.normal_closure(set);
    let mut coset = vec![usize::MAX; g.order];
    let mut reps = Vec::new();
    for x in 0..g.order {
        if coset[x] == usize::MAX {
            let idx = reps.len();
            reps.push(x);
            for &k in &n {
                coset[g.mul(x, k)] = idx;
            }
        }
    }
    let rows: Vec<Vec<usize>> = reps.iter().map(|&a| reps.iter().map(|&b| coset[g.mul(a, b)]).collect()).collect();
    let q = FiniteGroup::from_table(rows, None).expect("quotient by a normal subgroup is a group");
    let qa = Arc::new(q.clone());
    let map = GroupHom::new_unchecked(g.clone(), qa, coset);
    (q, map)
}

/// `G / [G, G]` with the canonical surjection.
pub fn abelianisation(g: &FiniteGroup) -> (FiniteGroup, GroupHom) {
    let ga = Arc::new(g.clone());
    let comm = g.commutator_subgroup();
    quotient_by_normal_closure(&ga, &comm)
}

/// The coequaliser of a parallel pair `phi, psi: H -> G`.
pub fn coequaliser(phi: &GroupHom, psi: &GroupHom) -> Result<(FiniteGroup, GroupHom)> {
    if !same_group(&phi.domain, &psi.domain) || !same_group(&phi.codomain, &psi.codomain) {
        return Err(Error::MismatchedPair("phi and psi must share domain and codomain".into()));
    }
    let g = &phi.codomain;
    let rel: Vec<usize> = phi.domain.elements().map(|h| g.mul(phi.apply(h), g.inv(psi.apply(h)))).collect();
    Ok(quotient_by_normal_closure(g, &rel))
}

/// An abelian group with explicit invariant-factor coordinates.
#[derive(Clone, Debug)]
pub struct AbelianCoordinates {
    pub group: FinAb,
    /// Canonical coordinates of each element.
    pub coords: Vec<Vec<i64>>,
    /// The element corresponding to each canonical generator.
    pub basis: Vec<usize>,
}

impl AbelianCoordinates {
    pub fn element_of(&self, v: &[i64]) -> usize {
        self.coords.iter().position(|c| c == v).expect("coordinates of an element")
    }
}

/// Coordinates `G ≅ Z/d1 + ... + Z/dk` for an abelian group; `None` if `G`
/// is not abelian.
pub fn abelian_coordinates(g: &FiniteGroup) -> Option<AbelianCoordinates> {
    if !g.is_abelian() {
        return None;
    }
    let gens = g.generators.clone();
    let k = gens.len();
    let mut vec_of: Vec<Option<Vec<i64>>> = vec![None; g.order];
    vec_of[g.identity] = Some(vec![0; k]);
    let mut queue = VecDeque::from([g.identity]);
    let mut relations = Vec::new();
    let e = g.exponent() as i64;
    while let Some(a) = queue.pop_front() {
        let va = vec_of[a].clone().expect("visited");
        for (i, &s) in gens.iter().enumerate() {
            let b = g.mul(a, s);
            let mut vb = va.clone();
            vb[i] += 1;
            match &vec_of[b] {
                None => {
                    vec_of[b] = Some(vb);
                    queue.push_back(b);
                }
                Some(old) => {
                    let rel: Vec<i64> = vb.iter().zip(old).map(|(x, y)| x - y).collect();
                    if rel.iter().any(|&x| x != 0) {
                        relations.push(rel);
                    }
                }
            }
        }
    }
    let rel = Matrix::from_columns(k, &relations);
    let pres = present(k, &rel, e);
    let coords: Vec<Vec<i64>> = vec_of.into_iter().map(|v| pres.canon(&v.expect("generated"))).collect();
    let basis = (0..pres.group.rank())
        .map(|i| {
            let mut x = g.identity;
            for (j, &s) in gens.iter().enumerate() {
                x = g.mul(x, g.pow(s, pres.from_canon.get(j, i).rem_euclid(e) as u64));
            }
            x
        })
        .collect();
    Some(AbelianCoordinates { group: pres.group, coords, basis })
}

/// All abelian groups of order at most `n`, as products of cyclic groups
/// with invariant factors `d1 | d2 | ...`, named like `C2xC6`.
pub fn abelian_groups_up_to(n: usize) -> Vec<(String, FiniteGroup)> {
    fn chains(remaining: usize, min: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining == 1 {
            out.push(prefix.clone());
            return;
        }
        for d in min.max(2)..=remaining {
            if remaining.is_multiple_of(d) && prefix.last().is_none_or(|&p| d % p == 0) {
                // remaining factors must be multiples of d
                let rest = remaining / d;
                if rest == 1 || rest.is_multiple_of(d) {
                    prefix.push(d);
                    chains(rest, d, prefix, out);
                    prefix.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    for m in 1..=n {
        let mut cs = Vec::new();
        chains(m, 2, &mut Vec::new(), &mut cs);
        for c in cs {
            let name = if c.is_empty() { "C1".to_string() } else { c.iter().map(|d| format!("C{d}")).collect::<Vec<_>>().join("x") };
            let g = FiniteGroup::from_spec(&name).expect("valid spec");
            out.push((name, g));
        }
    }
    out
}

/// Named groups used as default probes for group-valued checks.
pub fn default_nonabelian_probes() -> Vec<(String, FiniteGroup)> {
    ["S3", "D4", "Q8"].iter().map(|s| (s.to_string(), FiniteGroup::from_spec(s).expect("valid"))).collect()
}

/// Built-in named groups of order at most `n`, one per name.
pub fn builtin_catalog(n: usize) -> Vec<(String, FiniteGroup)> {
    let mut out: Vec<(String, FiniteGroup)> = abelian_groups_up_to(n);
    for name in ["S3", "D4", "Q8", "D5", "D6", "A4", "S4"] {
        let g = FiniteGroup::from_spec(name).expect("valid");
        if g.order() <= n {
            out.push((name.to_string(), g));
        }
    }
    out
}
