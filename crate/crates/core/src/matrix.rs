//! Dense integer matrices and the Smith normal form.
//!
//! Two eliminations live here. [`smith_normal_form`] works over the integers
//! and returns exact unimodular transforms. The crate-internal modular variant
//! works in `Z/m` and is what every finite-module computation goes through:
//! all of those groups are killed by a known modulus, so the relation lattice
//! always contains `mZ^k` and entries never grow.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}x{}{:?}", self.rows, self.cols, self.to_rows())
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds from row vectors. Returns `None` for ragged input.
    pub fn from_rows(rows: &[Vec<i64>]) -> Option<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        Some(Matrix { rows: rows.len(), cols, data: rows.concat() })
    }

    /// Builds a `rows x columns.len()` matrix from column vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<i64>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (i, &x) in col.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &d) in entries.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, x: i64) {
        self.data[r * self.cols + c] = x;
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<i64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Exact product. Panics on `i64` overflow.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k) as i128;
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * out.cols + j;
                    let v = out.data[idx] as i128 + a * other.get(k, j) as i128;
                    out.data[idx] = i64::try_from(v).expect("integer overflow in matrix product");
                }
            }
        }
        out
    }

    /// Product with row `i` of the result reduced modulo `moduli[i]`.
    pub fn mul_mod_rows(&self, other: &Matrix, moduli: &[i64]) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        assert_eq!(moduli.len(), self.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let m = moduli[i] as i128;
            for j in 0..other.cols {
                let mut acc: i128 = 0;
                for k in 0..self.cols {
                    acc = (acc + self.get(i, k) as i128 * other.get(k, j) as i128) % m;
                }
                out.set(i, j, acc.rem_euclid(m) as i64);
            }
        }
        out
    }

    /// Matrix-vector product with entry `i` reduced modulo `moduli[i]`.
    pub fn apply_mod(&self, v: &[i64], moduli: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let m = moduli[i] as i128;
                let acc = (0..self.cols).fold(0i128, |acc, k| (acc + self.get(i, k) as i128 * v[k] as i128) % m);
                acc.rem_euclid(m) as i64
            })
            .collect()
    }

    /// Reduces row `i` modulo `moduli[i]` into `[0, moduli[i])`.
    pub fn reduce_rows(&mut self, moduli: &[i64]) {
        assert_eq!(moduli.len(), self.rows);
        for r in 0..self.rows {
            let m = moduli[r];
            for c in 0..self.cols {
                let idx = r * self.cols + c;
                self.data[idx] = self.data[idx].rem_euclid(m);
            }
        }
    }

    pub fn reduced_rows(mut self, moduli: &[i64]) -> Matrix {
        self.reduce_rows(moduli);
        self
    }

    pub fn hstack(parts: &[&Matrix]) -> Matrix {
        let rows = parts.first().map_or(0, |p| p.rows);
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = Matrix::zeros(rows, cols);
        let mut off = 0;
        for p in parts {
            assert_eq!(p.rows, rows, "hstack row mismatch");
            for r in 0..rows {
                for c in 0..p.cols {
                    out.set(r, off + c, p.get(r, c));
                }
            }
            off += p.cols;
        }
        out
    }

    pub fn block_diagonal(parts: &[&Matrix]) -> Matrix {
        let rows = parts.iter().map(|p| p.rows).sum();
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = Matrix::zeros(rows, cols);
        let (mut ro, mut co) = (0, 0);
        for p in parts {
            for r in 0..p.rows {
                for c in 0..p.cols {
                    out.set(ro + r, co + c, p.get(r, c));
                }
            }
            ro += p.rows;
            co += p.cols;
        }
        out
    }

    /// Submatrix of the given columns.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, cols.len());
        for (j, &c) in cols.iter().enumerate() {
            for r in 0..self.rows {
                out.set(r, j, self.get(r, c));
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(rows.len(), self.cols);
        for (i, &r) in rows.iter().enumerate() {
            for c in 0..self.cols {
                out.set(i, c, self.get(r, c));
            }
        }
        out
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> i128 {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<Vec<i128>> = (0..n).map(|r| self.row(r).iter().map(|&x| x as i128).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        sign * a[n - 1][n - 1]
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(d)?;
        Matrix::from_rows(&rows).ok_or_else(|| serde::de::Error::custom("ragged matrix rows"))
    }
}

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn lcm(a: i64, b: i64) -> i64 {
    if a == 0 || b == 0 {
        return 0;
    }
    (a / gcd(a, b)) * b
}

/// Returns `(g, x, y)` with `x*a + y*b = g = gcd(a, b) >= 0`.
pub(crate) fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a as i128, b as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (old_r, old_s, old_t) = (-old_r, -old_s, -old_t);
    }
    (old_r as i64, old_s as i64, old_t as i64)
}

/// Inverse of `a` modulo `m`, if it exists.
pub(crate) fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    if m == 1 {
        return Some(0);
    }
    let (g, x, _) = ext_gcd(a.rem_euclid(m), m);
    (g == 1).then(|| x.rem_euclid(m))
}

/// Result of [`smith_normal_form`]: `u * a * v == d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmithForm {
    pub u: Matrix,
    pub d: Matrix,
    pub v: Matrix,
}

impl SmithForm {
    /// The diagonal entries of `d`, in order.
    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d.get(i, i)).collect()
    }
}

/// Smith normal form over the integers.
///
/// Returns unimodular `u`, `v` and diagonal `d` with nonnegative entries
/// `d1 | d2 | ...` such that `u * a * v == d`. Panics if an intermediate
/// entry overflows `i64`.
pub fn smith_normal_form(a: &Matrix) -> SmithForm {
    let mut e = Elimination::new(a.clone(), None, false);
    e.run();
    SmithForm { u: e.u, d: e.a, v: e.v }
}

/// Smith form over `Z/m`: `u * a * v == diag` modulo `m`, every diagonal
/// pivot a divisor of `m` (0 for an exhausted pivot), each dividing the next.
#[derive(Clone, Debug)]
pub(crate) struct ModSmith {
    pub u: Matrix,
    pub u_inv: Matrix,
    pub diag: Vec<i64>,
    pub v: Matrix,
}

pub(crate) fn smith_mod(a: &Matrix, m: i64) -> ModSmith {
    assert!(m >= 1);
    let mut a = a.clone();
    for x in a.data.iter_mut() {
        *x = x.rem_euclid(m);
    }
    let mut e = Elimination::new(a, Some(m), true);
    e.run();
    let k = e.a.rows.min(e.a.cols);
    let diag = (0..k).map(|i| e.a.get(i, i)).collect();
    ModSmith { u: e.u, u_inv: e.u_inv.expect("tracked"), diag, v: e.v }
}

struct Elimination {
    a: Matrix,
    u: Matrix,
    u_inv: Option<Matrix>,
    v: Matrix,
    modulus: Option<i64>,
}

impl Elimination {
    fn new(a: Matrix, modulus: Option<i64>, track_inverse: bool) -> Self {
        let (r, c) = (a.rows, a.cols);
        Elimination { a, u: Matrix::identity(r), u_inv: track_inverse.then(|| Matrix::identity(r)), v: Matrix::identity(c), modulus }
    }

    fn key(&self, x: i64) -> (i64, i64) {
        match self.modulus {
            Some(m) => (gcd(x, m), x),
            None => (x.abs(), 0),
        }
    }

    fn row_op(m: &mut Matrix, i: usize, j: usize, p: i64, q: i64, r: i64, s: i64, md: Option<i64>) {
        // row_i <- p row_i + q row_j ; row_j <- r row_i + s row_j
        for c in 0..m.cols {
            let (x, y) = (m.get(i, c) as i128, m.get(j, c) as i128);
            let nx = p as i128 * x + q as i128 * y;
            let ny = r as i128 * x + s as i128 * y;
            m.set(i, c, fit(nx, md));
            m.set(j, c, fit(ny, md));
        }
    }

    fn col_op(m: &mut Matrix, i: usize, j: usize, p: i64, q: i64, r: i64, s: i64, md: Option<i64>) {
        // col_i <- p col_i + q col_j ; col_j <- r col_i + s col_j
        for row in 0..m.rows {
            let (x, y) = (m.get(row, i) as i128, m.get(row, j) as i128);
            m.set(row, i, fit(p as i128 * x + q as i128 * y, md));
            m.set(row, j, fit(r as i128 * x + s as i128 * y, md));
        }
    }

    /// Invertible 2x2 row transform on rows `i`, `j` (determinant 1 or a unit).
    fn rows2(&mut self, i: usize, j: usize, p: i64, q: i64, r: i64, s: i64) {
        let md = self.modulus;
        Self::row_op(&mut self.a, i, j, p, q, r, s, md);
        Self::row_op(&mut self.u, i, j, p, q, r, s, md);
        if let Some(ui) = self.u_inv.as_mut() {
            // U^{-1} <- U^{-1} B^{-1}, B^{-1} = [[s, -q], [-r, p]] for det 1
            Self::col_op(ui, i, j, s, -r, -q, p, md);
        }
    }

    fn cols2(&mut self, i: usize, j: usize, p: i64, q: i64, r: i64, s: i64) {
        let md = self.modulus;
        Self::col_op(&mut self.a, i, j, p, q, r, s, md);
        Self::col_op(&mut self.v, i, j, p, q, r, s, md);
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for m in [&mut self.a, &mut self.u] {
            for c in 0..m.cols {
                let (x, y) = (m.get(i, c), m.get(j, c));
                m.set(i, c, y);
                m.set(j, c, x);
            }
        }
        if let Some(ui) = self.u_inv.as_mut() {
            for r in 0..ui.rows {
                let (x, y) = (ui.get(r, i), ui.get(r, j));
                ui.set(r, i, y);
                ui.set(r, j, x);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for m in [&mut self.a, &mut self.v] {
            for r in 0..m.rows {
                let (x, y) = (m.get(r, i), m.get(r, j));
                m.set(r, i, y);
                m.set(r, j, x);
            }
        }
    }

    fn scale_row(&mut self, i: usize, unit: i64, unit_inv: i64) {
        let md = self.modulus;
        for m in [&mut self.a, &mut self.u] {
            for c in 0..m.cols {
                let x = m.get(i, c) as i128 * unit as i128;
                m.set(i, c, fit(x, md));
            }
        }
        if let Some(ui) = self.u_inv.as_mut() {
            for r in 0..ui.rows {
                let x = ui.get(r, i) as i128 * unit_inv as i128;
                ui.set(r, i, fit(x, md));
            }
        }
    }

    /// row_i += k row_j
    fn add_row(&mut self, i: usize, j: usize, k: i64) {
        let md = self.modulus;
        for m in [&mut self.a, &mut self.u] {
            for c in 0..m.cols {
                let x = m.get(i, c) as i128 + k as i128 * m.get(j, c) as i128;
                m.set(i, c, fit(x, md));
            }
        }
        if let Some(ui) = self.u_inv.as_mut() {
            for r in 0..ui.rows {
                let x = ui.get(r, j) as i128 - k as i128 * ui.get(r, i) as i128;
                ui.set(r, j, fit(x, md));
            }
        }
    }

    /// col_i += k col_j
    fn add_col(&mut self, i: usize, j: usize, k: i64) {
        let md = self.modulus;
        for m in [&mut self.a, &mut self.v] {
            for r in 0..m.rows {
                let x = m.get(r, i) as i128 + k as i128 * m.get(r, j) as i128;
                m.set(r, i, fit(x, md));
            }
        }
    }

    /// Multiplies row `t` by a unit so the pivot becomes canonical.
    fn normalize_pivot(&mut self, t: usize) {
        let p = self.a.get(t, t);
        match self.modulus {
            None => {
                if p < 0 {
                    self.scale_row(t, -1, -1);
                }
            }
            Some(m) => {
                let g = gcd(p, m);
                if p == g {
                    return;
                }
                let (unit, inv) = unit_to_gcd(p, m);
                self.scale_row(t, unit, inv);
                debug_assert_eq!(self.a.get(t, t), g);
            }
        }
    }

    fn run(&mut self) {
        let (rows, cols) = (self.a.rows, self.a.cols);
        for t in 0..rows.min(cols) {
            let mut best: Option<(usize, usize, (i64, i64))> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = self.a.get(i, j);
                    if x != 0 {
                        let k = self.key(x);
                        if best.is_none_or(|b| k < b.2) {
                            best = Some((i, j, k));
                        }
                    }
                }
            }
            let Some((pi, pj, _)) = best else { break };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            'pivot: loop {
                self.normalize_pivot(t);
                let p = self.a.get(t, t);
                for i in t + 1..rows {
                    let e = self.a.get(i, t);
                    if e == 0 {
                        continue;
                    }
                    if e % p == 0 {
                        self.add_row(i, t, -(e / p));
                    } else {
                        let (g, x, y) = ext_gcd(p, e);
                        self.rows2(t, i, x, y, -(e / g), p / g);
                        continue 'pivot;
                    }
                }
                for j in t + 1..cols {
                    let e = self.a.get(t, j);
                    if e == 0 {
                        continue;
                    }
                    if e % p == 0 {
                        self.add_col(j, t, -(e / p));
                    } else {
                        let (g, x, y) = ext_gcd(p, e);
                        self.cols2(t, j, x, y, -(e / g), p / g);
                        continue 'pivot;
                    }
                }
                for i in t + 1..rows {
                    if (t + 1..cols).any(|j| self.a.get(i, j) % p != 0) {
                        self.add_row(t, i, 1);
                        continue 'pivot;
                    }
                }
                break;
            }
        }
    }
}

#[inline]
fn fit(x: i128, modulus: Option<i64>) -> i64 {
    match modulus {
        Some(m) => x.rem_euclid(m as i128) as i64,
        None => i64::try_from(x).expect("integer overflow in Smith elimination"),
    }
}

/// A unit `u` mod `m` (and its inverse) with `u * p == gcd(p, m)` mod `m`.
fn unit_to_gcd(p: i64, m: i64) -> (i64, i64) {
    let g = gcd(p, m);
    let mg = m / g;
    let base = mod_inverse(p / g, mg).unwrap_or(0);
    let mut u = base;
    for _ in 0..=g {
        if gcd(u, m) == 1 {
            let inv = mod_inverse(u, m).expect("unit");
            return (u.rem_euclid(m), inv);
        }
        u += mg;
    }
    unreachable!("no unit lifting {base} mod {mg} to mod {m}")
}

/// Generators (as columns) of the kernel of `a` acting on `(Z/m)^cols`.
pub(crate) fn kernel_mod(a: &Matrix, m: i64) -> Matrix {
    let s = smith_mod(a, m);
    let cols = a.cols;
    let mut gens = Vec::new();
    for j in 0..cols {
        let mult = if j < s.diag.len() { m / gcd(s.diag[j], m) } else { 1 };
        if mult % m == 0 {
            continue;
        }
        let col: Vec<i64> = s.v.column(j).iter().map(|&x| (x as i128 * mult as i128).rem_euclid(m as i128) as i64).collect();
        if col.iter().any(|&x| x != 0) {
            gens.push(col);
        }
    }
    Matrix::from_columns(cols, &gens)
}

/// Some `x` with `a x == y` modulo `m`, if one exists.
pub(crate) fn solve_mod(a: &Matrix, y: &[i64], m: i64) -> Option<Vec<i64>> {
    assert_eq!(a.rows, y.len());
    if m == 1 {
        return Some(vec![0; a.cols]);
    }
    let s = smith_mod(a, m);
    let uy = s.u.apply_mod(y, &vec![m; a.rows]);
    let mut w = vec![0i64; a.cols];
    for (i, &c) in uy.iter().enumerate() {
        if i < s.diag.len() {
            let d = s.diag[i];
            let g = gcd(d, m);
            if c % g != 0 {
                return None;
            }
            if d != 0 {
                let mg = m / g;
                let inv = mod_inverse(d / g, mg).expect("coprime");
                w[i] = ((c / g) as i128 * inv as i128).rem_euclid(mg as i128) as i64;
            }
        } else if c != 0 {
            return None;
        }
    }
    Some(s.v.apply_mod(&w, &vec![m; a.cols]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_chain_ok(d: &[i64]) -> bool {
        d.windows(2).all(|w| if w[0] == 0 { w[1] == 0 } else { w[1] % w[0] == 0 })
    }

    #[test]
    fn smith_of_zero_and_identity() {
        let z = Matrix::zeros(2, 3);
        let s = smith_normal_form(&z);
        assert!(s.d.is_zero());
        let i = Matrix::identity(3);
        let s = smith_normal_form(&i);
        assert_eq!(s.d, Matrix::identity(3));
    }

    #[test]
    fn smith_of_diag_2_3() {
        let a = Matrix::diagonal(&[2, 3]);
        let s = smith_normal_form(&a);
        assert_eq!(s.diagonal(), vec![1, 6]);
        assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
        assert_eq!(s.u.determinant().abs(), 1);
        assert_eq!(s.v.determinant().abs(), 1);
    }

    #[test]
    fn smith_mod_matches_integer_invariants() {
        let a = Matrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]).unwrap();
        let s = smith_normal_form(&a);
        assert_eq!(s.diagonal(), vec![2, 6, 12]);
        let sm = smith_mod(&a, 8);
        let f: Vec<i64> = sm.diag.iter().map(|&d| gcd(d, 8)).collect();
        assert_eq!(f.iter().map(|&d| if d == 0 { 8 } else { d }).collect::<Vec<_>>(), vec![2, 2, 4]);
        assert!(diag_chain_ok(&sm.diag.iter().map(|&d| if d == 0 { 8 } else { d }).collect::<Vec<_>>()));
        let ident = sm.u.mul_mod_rows(&sm.u_inv, &[8, 8, 8]);
        assert_eq!(ident, Matrix::identity(3));
    }

    #[test]
    fn solve_and_kernel_mod() {
        let a = Matrix::from_rows(&[vec![2, 0], vec![0, 3]]).unwrap();
        assert!(solve_mod(&a, &[1, 0], 6).is_none());
        let x = solve_mod(&a, &[4, 3], 6).unwrap();
        assert_eq!(a.apply_mod(&x, &[6, 6]), vec![4, 3]);
        let k = kernel_mod(&a, 6);
        for j in 0..k.cols() {
            assert_eq!(a.apply_mod(&k.column(j), &[6, 6]), vec![0, 0]);
        }
    }

    #[test]
    fn ext_gcd_identity() {
        for a in -12..12 {
            for b in -12..12 {
                let (g, x, y) = ext_gcd(a, b);
                assert_eq!(x * a + y * b, g);
                assert_eq!(g, gcd(a, b));
            }
        }
    }
}
