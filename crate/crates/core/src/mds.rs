//! Nested Reed-Solomon component codes built from one Vandermonde matrix, and
//! per-coordinate scaled RS codes that contain a prescribed binary word.

use std::sync::Arc;

use thiserror::Error;

use crate::galois::{Elem, Field, GaloisError, Matrix, Solution};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MdsError {
    #[error("field of order {order} has fewer than {needed} distinct evaluation points")]
    FieldTooSmall { order: u32, needed: usize },
    #[error("evaluation point {0} appears twice")]
    DuplicatePoint(Elem),
    #[error("expected {expected} evaluation points, got {got}")]
    PointCount { expected: usize, got: usize },
    #[error("dimension {k} out of range (maximum {max})")]
    DimensionOutOfRange { k: usize, max: usize },
    #[error("expected a word of length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("only {known} symbols known, {needed} needed")]
    TooManyErasures { known: usize, needed: usize },
    #[error("received symbols are not consistent with any codeword")]
    NotACodeword,
    #[error("target weight {w} outside [{lo}, {hi}]")]
    WeightOutOfRange { w: usize, lo: usize, hi: usize },
    #[error(transparent)]
    Field(#[from] GaloisError),
}

/// A linear MDS code given by a `k × n` generator matrix, with a parity-check
/// matrix derived from it.
#[derive(Debug, Clone)]
pub struct MdsCode {
    field: Arc<Field>,
    generator: Matrix,
    parity: Matrix,
}

impl MdsCode {
    pub fn from_generator(field: Arc<Field>, generator: Matrix) -> Self {
        let parity = field.nullspace(&generator);
        MdsCode { field, generator, parity }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.generator.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.generator.rows()
    }

    pub fn min_distance(&self) -> usize {
        self.len() - self.dim() + 1
    }

    /// Number of erasures the code always recovers: n − k.
    pub fn erasure_tolerance(&self) -> usize {
        self.len() - self.dim()
    }

    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    /// `(n − k) × n` matrix whose rows span the dual code.
    pub fn parity_check(&self) -> &Matrix {
        &self.parity
    }

    pub fn encode(&self, message: &[Elem]) -> Result<Vec<Elem>, MdsError> {
        if message.len() != self.dim() {
            return Err(MdsError::LengthMismatch { expected: self.dim(), got: message.len() });
        }
        let f = &self.field;
        let mut out = vec![0; self.len()];
        for (r, &m) in message.iter().enumerate() {
            if m == 0 {
                continue;
            }
            for (o, &g) in out.iter_mut().zip(self.generator.row(r)) {
                *o = f.add(*o, f.mul(m, g));
            }
        }
        Ok(out)
    }

    pub fn contains(&self, word: &[Elem]) -> bool {
        word.len() == self.len()
            && word.iter().all(|&x| x < self.field.order())
            && (0..self.parity.rows()).all(|r| self.field.dot(self.parity.row(r), word) == 0)
    }

    /// Recovers the full codeword from the known slots.
    ///
    /// Solves for the message using the first `k` known coordinates, then
    /// checks every other known coordinate against the re-encoded word.
    pub fn erasure_decode(&self, received: &[Option<Elem>]) -> Result<Vec<Elem>, MdsError> {
        if received.len() != self.len() {
            return Err(MdsError::LengthMismatch { expected: self.len(), got: received.len() });
        }
        let known: Vec<usize> = (0..received.len()).filter(|&j| received[j].is_some()).collect();
        let k = self.dim();
        if known.len() < k {
            return Err(MdsError::TooManyErasures { known: known.len(), needed: k });
        }
        let message = self.solve_message(&known[..k], received)?;
        let word = self.encode(&message)?;
        if known.iter().any(|&j| received[j] != Some(word[j])) {
            return Err(MdsError::NotACodeword);
        }
        Ok(word)
    }

    fn solve_message(&self, coords: &[usize], received: &[Option<Elem>]) -> Result<Vec<Elem>, MdsError> {
        let k = self.dim();
        let mut system = Matrix::zeros(coords.len(), k);
        let mut rhs = Vec::with_capacity(coords.len());
        for (t, &j) in coords.iter().enumerate() {
            for i in 0..k {
                system.set(t, i, self.generator.get(i, j));
            }
            let v = received[j].expect("coordinate is known");
            rhs.push(self.field.elem(v)?);
        }
        match self.field.solve_linear(&system, &rhs)? {
            Solution::Unique(m) => Ok(m),
            // Only reachable for generators that are not MDS.
            Solution::Underdetermined { .. } => {
                Err(MdsError::TooManyErasures { known: coords.len(), needed: k })
            }
            Solution::Inconsistent { .. } => Err(MdsError::NotACodeword),
        }
    }
}

/// The chain of Reed-Solomon codes whose dimension-k member is generated by
/// the first k rows of the Vandermonde matrix `V[i][j] = α_j^i`.
#[derive(Debug, Clone)]
pub struct NestedRsFamily {
    field: Arc<Field>,
    eval_points: Vec<Elem>,
    rows: Matrix,
}

impl NestedRsFamily {
    /// Builds the family; default evaluation points are the first `n` field
    /// elements in value order.
    pub fn new(
        field: Arc<Field>,
        n: usize,
        max_dim: usize,
        eval_points: Option<Vec<Elem>>,
    ) -> Result<Self, MdsError> {
        if (field.order() as usize) < n {
            return Err(MdsError::FieldTooSmall { order: field.order(), needed: n });
        }
        if max_dim > n {
            return Err(MdsError::DimensionOutOfRange { k: max_dim, max: n });
        }
        let eval_points = match eval_points {
            Some(p) => {
                if p.len() != n {
                    return Err(MdsError::PointCount { expected: n, got: p.len() });
                }
                let mut seen = std::collections::HashSet::new();
                for &x in &p {
                    field.elem(x)?;
                    if !seen.insert(x) {
                        return Err(MdsError::DuplicatePoint(x));
                    }
                }
                p
            }
            None => (0..n as u32).collect(),
        };
        let mut rows = Matrix::zeros(max_dim, n);
        for (j, &x) in eval_points.iter().enumerate() {
            let mut p = 1;
            for i in 0..max_dim {
                rows.set(i, j, p);
                p = field.mul(p, x);
            }
        }
        Ok(NestedRsFamily { field, eval_points, rows })
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.eval_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eval_points.is_empty()
    }

    pub fn max_dim(&self) -> usize {
        self.rows.rows()
    }

    pub fn eval_points(&self) -> &[Elem] {
        &self.eval_points
    }

    /// The Vandermonde rows `V`.
    pub fn rows(&self) -> &Matrix {
        &self.rows
    }

    fn check_dim(&self, k: usize) -> Result<(), MdsError> {
        if k > self.max_dim() {
            Err(MdsError::DimensionOutOfRange { k, max: self.max_dim() })
        } else {
            Ok(())
        }
    }

    /// The `[n, k]` member of the chain.
    pub fn code(&self, k: usize) -> Result<MdsCode, MdsError> {
        self.check_dim(k)?;
        let mut g = Matrix::zeros(k, self.len());
        for i in 0..k {
            g.row_mut(i).copy_from_slice(self.rows.row(i));
        }
        Ok(MdsCode::from_generator(self.field.clone(), g))
    }

    /// `message · V[..k]`: evaluations of the polynomial with coefficients
    /// `message` at the evaluation points.
    pub fn encode(&self, k: usize, message: &[Elem]) -> Result<Vec<Elem>, MdsError> {
        self.check_dim(k)?;
        if message.len() != k {
            return Err(MdsError::LengthMismatch { expected: k, got: message.len() });
        }
        let f = &self.field;
        Ok(self
            .eval_points
            .iter()
            .map(|&x| message.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c)))
            .collect())
    }

    pub fn erasure_decode(&self, k: usize, received: &[Option<Elem>]) -> Result<Vec<Elem>, MdsError> {
        self.code(k)?.erasure_decode(received)
    }

    /// A copy of the dimension-`k` RS code with coordinates rescaled so that
    /// `target` (a 0/1 word of weight `w`, `n − k + 1 ≤ w ≤ n`) is a codeword.
    ///
    /// Uses the degree-(k−1) polynomial whose roots are the evaluation points
    /// at the zero coordinates of `target` (the first root repeated to fill
    /// the degree), then maps every nonzero evaluation to 1.
    pub fn scaled_code_containing(&self, k: usize, target: &[bool]) -> Result<ScaledRsCode, MdsError> {
        self.check_dim(k)?;
        let n = self.len();
        if target.len() != n {
            return Err(MdsError::LengthMismatch { expected: n, got: target.len() });
        }
        let w = target.iter().filter(|&&b| b).count();
        // k ≤ max_dim ≤ n, so lo ≥ 1 and k = 0 is always rejected here.
        let lo = n + 1 - k;
        if w < lo {
            return Err(MdsError::WeightOutOfRange { w, lo, hi: n });
        }
        let f = &self.field;
        let roots: Vec<Elem> =
            (0..n).filter(|&j| !target[j]).map(|j| self.eval_points[j]).collect();
        let poly_at = |x: Elem| -> Elem {
            match roots.split_first() {
                None => 1,
                Some((&first, rest)) => {
                    let lead = f.pow(f.sub(x, first), (k + w - n) as u64);
                    rest.iter().fold(lead, |acc, &r| f.mul(acc, f.sub(x, r)))
                }
            }
        };
        let mut column_scalars = Vec::with_capacity(n);
        for j in 0..n {
            let v = poly_at(self.eval_points[j]);
            debug_assert_eq!(v == 0, !target[j]);
            column_scalars.push(if target[j] { f.inv(v)? } else { 1 });
        }
        Ok(ScaledRsCode { base: self.code(k)?, column_scalars })
    }
}

/// An RS code whose j-th coordinate is multiplied by a fixed nonzero scalar.
#[derive(Debug, Clone)]
pub struct ScaledRsCode {
    base: MdsCode,
    column_scalars: Vec<Elem>,
}

impl ScaledRsCode {
    pub fn column_scalars(&self) -> &[Elem] {
        &self.column_scalars
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    /// The scaled code as a plain linear code (generator columns rescaled).
    pub fn to_code(&self) -> MdsCode {
        let f = self.base.field();
        let mut g = self.base.generator().clone();
        for i in 0..g.rows() {
            for (x, &s) in g.row_mut(i).iter_mut().zip(&self.column_scalars) {
                *x = f.mul(*x, s);
            }
        }
        MdsCode::from_generator(f.clone(), g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf7() -> Arc<Field> {
        Arc::new(Field::prime(7).unwrap())
    }

    fn family_123() -> NestedRsFamily {
        NestedRsFamily::new(gf7(), 3, 3, Some(vec![1, 2, 3])).unwrap()
    }

    #[test]
    fn vandermonde_rows() {
        let fam = family_123();
        assert_eq!(fam.rows().row(0), &[1, 1, 1]);
        assert_eq!(fam.rows().row(1), &[1, 2, 3]);
        assert_eq!(fam.rows().row(2), &[1, 4, 2]);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            NestedRsFamily::new(gf7(), 8, 2, None).unwrap_err(),
            MdsError::FieldTooSmall { order: 7, needed: 8 }
        );
        assert_eq!(
            NestedRsFamily::new(gf7(), 3, 2, Some(vec![1, 2, 1])).unwrap_err(),
            MdsError::DuplicatePoint(1)
        );
        assert!(family_123().encode(4, &[0; 4]).is_err());
        assert!(family_123().encode(2, &[0; 3]).is_err());
    }

    #[test]
    fn encode_examples() {
        let fam = family_123();
        assert_eq!(fam.encode(2, &[0, 0]).unwrap(), vec![0, 0, 0]);
        assert_eq!(fam.encode(2, &[1, 1]).unwrap(), vec![2, 3, 4]);
        // The polynomial-evaluation path agrees with message · V.
        let code = fam.code(3).unwrap();
        assert_eq!(code.encode(&[3, 5, 6]).unwrap(), fam.encode(3, &[3, 5, 6]).unwrap());
        let full = fam.encode(3, &[3, 5, 6]).unwrap();
        assert_eq!(fam.erasure_decode(3, &full.iter().map(|&x| Some(x)).collect::<Vec<_>>()).unwrap(), full);
    }

    #[test]
    fn decode_examples() {
        let fam = family_123();
        let cw = vec![2, 3, 4];
        let all: Vec<_> = cw.iter().map(|&x| Some(x)).collect();
        assert_eq!(fam.erasure_decode(2, &all).unwrap(), cw);
        assert_eq!(fam.erasure_decode(2, &[Some(2), None, Some(4)]).unwrap(), cw);
        assert_eq!(
            fam.erasure_decode(2, &[Some(2), None, None]).unwrap_err(),
            MdsError::TooManyErasures { known: 1, needed: 2 }
        );
        assert_eq!(
            fam.erasure_decode(2, &[Some(2), Some(3), Some(5)]).unwrap_err(),
            MdsError::NotACodeword
        );
    }

    #[test]
    fn zero_dimensional_code() {
        let fam = family_123();
        assert_eq!(fam.erasure_decode(0, &[None, None, None]).unwrap(), vec![0, 0, 0]);
        assert_eq!(fam.erasure_decode(0, &[Some(1), None, None]).unwrap_err(), MdsError::NotACodeword);
        assert!(fam.code(0).unwrap().contains(&[0, 0, 0]));
    }

    #[test]
    fn mds_round_trip_exhaustive_patterns() {
        let f = Arc::new(Field::binary_extension(4, 0b10011).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=10 {
            let fam = NestedRsFamily::new(f.clone(), n, n, None).unwrap();
            for k in 0..=n {
                let code = fam.code(k).unwrap();
                let msg: Vec<Elem> = (0..k).map(|_| rng.gen_range(0..16)).collect();
                let cw = fam.encode(k, &msg).unwrap();
                assert!(code.contains(&cw));
                for pattern in 0u32..(1 << n) {
                    if pattern.count_ones() as usize > n - k {
                        continue;
                    }
                    let rx: Vec<_> =
                        (0..n).map(|j| if pattern >> j & 1 == 1 { None } else { Some(cw[j]) }).collect();
                    assert_eq!(code.erasure_decode(&rx).unwrap(), cw, "n={n} k={k} pattern={pattern:b}");
                }
            }
        }
    }

    fn min_weight_by_enumeration(code: &MdsCode) -> usize {
        let q = code.field().order() as u64;
        let k = code.dim();
        let mut best = usize::MAX;
        for idx in 1..q.pow(k as u32) {
            let msg: Vec<Elem> = (0..k).map(|i| ((idx / q.pow(i as u32)) % q) as Elem).collect();
            let w = code.encode(&msg).unwrap().iter().filter(|&&x| x != 0).count();
            best = best.min(w);
        }
        best
    }

    #[test]
    fn minimum_distance_is_singleton() {
        let f = gf7();
        for n in 1..=6 {
            let fam = NestedRsFamily::new(f.clone(), n, n, None).unwrap();
            for k in 1..=n.min(5) {
                assert_eq!(min_weight_by_enumeration(&fam.code(k).unwrap()), n - k + 1, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn codes_are_nested() {
        let f = Arc::new(Field::prime(11).unwrap());
        let fam = NestedRsFamily::new(f.clone(), 9, 9, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 0..9 {
            let small = fam.code(k).unwrap();
            let big = fam.code(k + 1).unwrap();
            for i in 0..k {
                assert!(big.contains(small.generator().row(i)));
            }
            for _ in 0..20 {
                let msg: Vec<Elem> = (0..k).map(|_| rng.gen_range(0..11)).collect();
                assert!(big.contains(&small.encode(&msg).unwrap()));
            }
        }
    }

    #[test]
    fn scaled_code_example() {
        let fam = family_123();
        let scaled = fam.scaled_code_containing(2, &[false, true, true]).unwrap();
        assert_eq!(&scaled.column_scalars()[1..], &[1, 4]);
        let code = scaled.to_code();
        assert!(code.contains(&[0, 1, 1]));
        assert_eq!(min_weight_by_enumeration(&code), 2);
    }

    #[test]
    fn scaled_code_full_weight() {
        let fam = family_123();
        let scaled = fam.scaled_code_containing(2, &[true, true, true]).unwrap();
        assert_eq!(scaled.column_scalars(), &[1, 1, 1]);
        assert!(scaled.to_code().contains(&[1, 1, 1]));
        assert!(matches!(
            fam.scaled_code_containing(2, &[true, false, false]),
            Err(MdsError::WeightOutOfRange { w: 1, .. })
        ));
    }

    #[test]
    fn scaled_codes_exhaustive_small() {
        let f = gf7();
        for n in 1..=5 {
            let fam = NestedRsFamily::new(f.clone(), n, n, None).unwrap();
            for k in 1..=n {
                for t in 1u32..(1 << n) {
                    let target: Vec<bool> = (0..n).map(|j| t >> j & 1 == 1).collect();
                    let w = t.count_ones() as usize;
                    let res = fam.scaled_code_containing(k, &target);
                    if w < n - k + 1 {
                        assert!(res.is_err());
                        continue;
                    }
                    let code = res.unwrap().to_code();
                    let word: Vec<Elem> = target.iter().map(|&b| b as Elem).collect();
                    assert!(code.contains(&word));
                    assert_eq!(min_weight_by_enumeration(&code), n - k + 1);
                }
            }
        }
    }
}
