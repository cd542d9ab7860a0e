//! Finite-field arithmetic over GF(2^w) (w ≤ 16) and small prime fields.
//!
//! Elements are plain `u32` values in `[0, q)`; the [`Field`] context is passed
//! explicitly to every operation. Binary-extension fields multiply through
//! exp/log tables, prime fields through modular arithmetic.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A field element: an integer in `[0, q)` interpreted by some [`Field`].
pub type Elem = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GaloisError {
    #[error("field order {0} is not prime")]
    NotPrime(u32),
    #[error("binary extension degree must be in 1..=16, got {0}")]
    BadDegree(u32),
    #[error("polynomial {poly:#x} is not an irreducible polynomial of degree {w}")]
    NotIrreducible { poly: u32, w: u32 },
    #[error("element {value} is outside the field of order {order}")]
    OutOfRange { value: u32, order: u32 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Serialized field description, e.g. `{"kind":"gf2e","w":8,"poly":285}` or
/// `{"kind":"prime","p":7}`. A missing `poly` selects the default reduction
/// polynomial for the degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum FieldConfig {
    #[serde(rename = "gf2e")]
    BinaryExtension {
        w: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        poly: Option<u32>,
    },
    #[serde(rename = "prime")]
    Prime { p: u32 },
}

impl FieldConfig {
    /// Smallest binary-extension field with at least `min_order` elements.
    pub fn smallest_binary(min_order: usize) -> Self {
        let mut w = 1;
        while (1usize << w) < min_order && w < 16 {
            w += 1;
        }
        FieldConfig::BinaryExtension { w, poly: None }
    }

    pub fn build(&self) -> Result<Field, GaloisError> {
        match *self {
            FieldConfig::BinaryExtension { w, poly } => {
                let poly = match poly {
                    Some(p) => p,
                    None => default_poly(w)?,
                };
                Field::binary_extension(w, poly)
            }
            FieldConfig::Prime { p } => Field::prime(p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    BinaryExtension { w: u32, poly: u32 },
    Prime { p: u32 },
}

/// An immutable field context.
#[derive(Clone)]
pub struct Field {
    kind: FieldKind,
    order: u32,
    // exp has 2(q-1) entries so log sums index it without a modulo.
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Field").field("kind", &self.kind).field("order", &self.order).finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Field {}

/// Carry-less multiply of two polynomials over GF(2) followed by reduction
/// modulo `poly` (degree `w`).
pub fn poly_mul_mod(a: u32, b: u32, poly: u32, w: u32) -> u32 {
    let mut acc: u64 = 0;
    for bit in 0..32 {
        if (b >> bit) & 1 == 1 {
            acc ^= (a as u64) << bit;
        }
    }
    let poly = poly as u64;
    for bit in (w as u64..64).rev() {
        if (acc >> bit) & 1 == 1 {
            acc ^= poly << (bit - w as u64);
        }
    }
    acc as u32
}

fn poly_degree(p: u32) -> i32 {
    31 - p.leading_zeros() as i32
}

fn poly_rem(mut a: u32, b: u32) -> u32 {
    let db = poly_degree(b);
    while a != 0 && poly_degree(a) >= db {
        a ^= b << (poly_degree(a) - db);
    }
    a
}

/// Irreducibility over GF(2) by trial division with every polynomial of
/// degree at most w/2.
pub fn is_irreducible(poly: u32, w: u32) -> bool {
    if poly_degree(poly) != w as i32 {
        return false;
    }
    for d in 1..=(w / 2) {
        for div in (1u32 << d)..(1u32 << (d + 1)) {
            if poly_rem(poly, div) == 0 {
                return false;
            }
        }
    }
    true
}

/// Lexicographically smallest irreducible polynomial of degree `w`.
pub fn default_poly(w: u32) -> Result<u32, GaloisError> {
    if !(1..=16).contains(&w) {
        return Err(GaloisError::BadDegree(w));
    }
    ((1u32 << w)..(1u32 << (w + 1)))
        .find(|&p| is_irreducible(p, w))
        .ok_or(GaloisError::BadDegree(w))
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p as u64 {
        if (p as u64).is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub fn binary_extension(w: u32, poly: u32) -> Result<Self, GaloisError> {
        if !(1..=16).contains(&w) {
            return Err(GaloisError::BadDegree(w));
        }
        if !is_irreducible(poly, w) {
            return Err(GaloisError::NotIrreducible { poly, w });
        }
        let q = 1u32 << w;
        let n = (q - 1) as usize;
        // The reduction polynomial need not be primitive, so search for a
        // generator of the multiplicative group instead of assuming x.
        let generator = (1..q)
            .find(|&g| {
                let mut x = g;
                let mut ord = 1usize;
                while x != 1 {
                    x = poly_mul_mod(x, g, poly, w);
                    ord += 1;
                }
                ord == n
            })
            .expect("multiplicative group of a finite field is cyclic");
        let mut exp = vec![0u32; 2 * n];
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for (i, slot) in exp.iter_mut().take(n).enumerate() {
            *slot = x;
            log[x as usize] = i as u32;
            x = poly_mul_mod(x, generator, poly, w);
        }
        for i in n..2 * n {
            exp[i] = exp[i - n];
        }
        Ok(Field { kind: FieldKind::BinaryExtension { w, poly }, order: q, exp, log })
    }

    pub fn prime(p: u32) -> Result<Self, GaloisError> {
        if !is_prime(p) {
            return Err(GaloisError::NotPrime(p));
        }
        Ok(Field { kind: FieldKind::Prime { p }, order: p, exp: Vec::new(), log: Vec::new() })
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn config(&self) -> FieldConfig {
        match self.kind {
            FieldKind::BinaryExtension { w, poly } => {
                FieldConfig::BinaryExtension { w, poly: Some(poly) }
            }
            FieldKind::Prime { p } => FieldConfig::Prime { p },
        }
    }

    /// Number of elements q.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn elem(&self, value: u32) -> Result<Elem, GaloisError> {
        if value < self.order {
            Ok(value)
        } else {
            Err(GaloisError::OutOfRange { value, order: self.order })
        }
    }

    /// All field elements in value order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.order
    }

    #[inline]
    pub fn add(&self, x: Elem, y: Elem) -> Elem {
        debug_assert!(x < self.order && y < self.order);
        match self.kind {
            FieldKind::BinaryExtension { .. } => x ^ y,
            FieldKind::Prime { p } => ((x as u64 + y as u64) % p as u64) as u32,
        }
    }

    #[inline]
    pub fn neg(&self, x: Elem) -> Elem {
        match self.kind {
            FieldKind::BinaryExtension { .. } => x,
            FieldKind::Prime { p } => {
                if x == 0 {
                    0
                } else {
                    p - x
                }
            }
        }
    }

    #[inline]
    pub fn sub(&self, x: Elem, y: Elem) -> Elem {
        self.add(x, self.neg(y))
    }

    #[inline]
    pub fn mul(&self, x: Elem, y: Elem) -> Elem {
        debug_assert!(x < self.order && y < self.order);
        match self.kind {
            FieldKind::BinaryExtension { .. } => {
                if x == 0 || y == 0 {
                    0
                } else {
                    self.exp[(self.log[x as usize] + self.log[y as usize]) as usize]
                }
            }
            FieldKind::Prime { p } => ((x as u64 * y as u64) % p as u64) as u32,
        }
    }

    pub fn inv(&self, x: Elem) -> Result<Elem, GaloisError> {
        if x == 0 {
            return Err(GaloisError::ZeroInverse);
        }
        Ok(match self.kind {
            FieldKind::BinaryExtension { .. } => {
                let n = self.order - 1;
                self.exp[((n - self.log[x as usize]) % n) as usize]
            }
            FieldKind::Prime { p } => self.pow(x, (p - 2) as u64),
        })
    }

    pub fn div(&self, x: Elem, y: Elem) -> Result<Elem, GaloisError> {
        Ok(self.mul(x, self.inv(y)?))
    }

    pub fn pow(&self, mut base: Elem, mut e: u64) -> Elem {
        let mut acc = 1 % self.order;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Inner product of two equal-length vectors.
    pub fn dot(&self, x: &[Elem], y: &[Elem]) -> Elem {
        x.iter().zip(y).fold(0, |acc, (&a, &b)| self.add(acc, self.mul(a, b)))
    }

    /// Reduces `mat` to reduced row-echelon form in place and returns the
    /// pivot column of each nonzero row.
    pub fn rref(&self, mat: &mut Matrix) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..mat.cols {
            if row == mat.rows {
                break;
            }
            let Some(p) = (row..mat.rows).find(|&r| mat.get(r, col) != 0) else {
                continue;
            };
            mat.swap_rows(row, p);
            let inv = self.inv(mat.get(row, col)).expect("pivot is nonzero");
            for c in col..mat.cols {
                let v = self.mul(mat.get(row, c), inv);
                mat.set(row, c, v);
            }
            for r in 0..mat.rows {
                if r == row {
                    continue;
                }
                let factor = mat.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in col..mat.cols {
                    let v = self.sub(mat.get(r, c), self.mul(factor, mat.get(row, c)));
                    mat.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self, mat: &Matrix) -> usize {
        let mut m = mat.clone();
        self.rref(&mut m).len()
    }

    /// Basis of the right null space {x : A x = 0}, one vector per row of the
    /// returned matrix.
    pub fn nullspace(&self, mat: &Matrix) -> Matrix {
        let mut r = mat.clone();
        let pivots = self.rref(&mut r);
        let free: Vec<usize> = (0..mat.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Matrix::zeros(free.len(), mat.cols);
        for (b, &f) in free.iter().enumerate() {
            basis.set(b, f, 1);
            for (prow, &pc) in pivots.iter().enumerate() {
                basis.set(b, pc, self.neg(r.get(prow, f)));
            }
        }
        basis
    }

    /// Solves `A x = b` by Gaussian elimination.
    pub fn solve_linear(&self, a: &Matrix, b: &[Elem]) -> Result<Solution, GaloisError> {
        if b.len() != a.rows {
            return Err(GaloisError::DimensionMismatch(format!(
                "matrix has {} rows but right-hand side has {} entries",
                a.rows,
                b.len()
            )));
        }
        let mut aug = Matrix::zeros(a.rows, a.cols + 1);
        for r in 0..a.rows {
            aug.row_mut(r)[..a.cols].copy_from_slice(a.row(r));
            aug.set(r, a.cols, b[r]);
        }
        let pivots = self.rref(&mut aug);
        if pivots.last() == Some(&a.cols) {
            return Ok(Solution::Inconsistent { rank: pivots.len() - 1 });
        }
        let mut x = vec![0; a.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.get(row, a.cols);
        }
        if pivots.len() == a.cols {
            Ok(Solution::Unique(x))
        } else {
            Ok(Solution::Underdetermined { particular: x, rank: pivots.len() })
        }
    }
}

/// Outcome of [`Field::solve_linear`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Unique(Vec<Elem>),
    /// Rank-deficient but consistent; `particular` sets every free variable to 0.
    Underdetermined { particular: Vec<Elem>, rank: usize },
    Inconsistent { rank: usize },
}

/// Dense row-major matrix of field elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<Elem>]) -> Result<Self, GaloisError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(GaloisError::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix { rows: rows.len(), cols, data: rows.concat() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [Elem] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    /// Appends the rows of `other`; column counts must agree.
    pub fn append_rows(&mut self, other: &Matrix) {
        assert_eq!(self.cols, other.cols);
        self.data.extend_from_slice(&other.data);
        self.rows += other.rows;
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
}
