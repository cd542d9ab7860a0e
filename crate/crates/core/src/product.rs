//! Irregular product codes: `m × n` matrices whose row `i` lies in an `[n, a_i]`
//! code and whose column `j` lies in an `[m, b_j]` code.
//!
//! With non-decreasing `a` and `b` and nested Reed-Solomon components, the
//! dimension is given in closed form by [`CodeSpec::dimension`], and the
//! marking procedure in [`CodeSpec::mark_schedule`] yields a systematic
//! encoder.

use std::sync::Arc;

use thiserror::Error;

use crate::galois::{Elem, Field, Matrix};
use crate::mds::{MdsCode, MdsError, NestedRsFamily};

/// An `m × n` matrix of field elements, row-major.
pub type CodewordMatrix = Matrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error("m and n must be positive (got {m}×{n})")]
    EmptyShape { m: usize, n: usize },
    #[error("{field}: expected {expected} entries, got {got}")]
    Length { field: &'static str, expected: usize, got: usize },
    #[error("{field}[{index}] = {value} exceeds {max}")]
    OutOfRange { field: &'static str, index: usize, value: usize, max: usize },
    #[error("{field}[{index}] = {value} is smaller than {field}[{prev_index}] = {prev}; the sequence must be non-decreasing", prev_index = index - 1)]
    NotMonotone { field: &'static str, index: usize, value: usize, prev: usize },
    #[error("field: order {order} is smaller than max(m, n) = {needed}")]
    FieldTooSmall { order: u32, needed: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProductError {
    #[error("expected {expected} information symbols, got {got}")]
    InfoLength { expected: usize, got: usize },
    #[error("expected a {m}×{n} matrix, got {rows}×{cols}")]
    Shape { m: usize, n: usize, rows: usize, cols: usize },
    #[error("expected {expected} symbols, got {got}")]
    SymbolCount { expected: usize, got: usize },
    #[error(transparent)]
    Component(#[from] MdsError),
}

/// Full description of one irregular product code with nested RS components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSpec {
    field: Arc<Field>,
    m: usize,
    n: usize,
    a: Vec<usize>,
    b: Vec<usize>,
}

fn check_profile(field: &'static str, seq: &[usize], len: usize, max: usize) -> Result<(), SpecError> {
    if seq.len() != len {
        return Err(SpecError::Length { field, expected: len, got: seq.len() });
    }
    for (index, &value) in seq.iter().enumerate() {
        if value > max {
            return Err(SpecError::OutOfRange { field, index, value, max });
        }
        if index > 0 && value < seq[index - 1] {
            return Err(SpecError::NotMonotone { field, index, value, prev: seq[index - 1] });
        }
    }
    Ok(())
}

impl CodeSpec {
    /// Validates `0 ≤ a_1 ≤ … ≤ a_m ≤ n`, `0 ≤ b_1 ≤ … ≤ b_n ≤ m` and
    /// `q ≥ max(m, n)`.
    pub fn new(field: Arc<Field>, m: usize, n: usize, a: Vec<usize>, b: Vec<usize>) -> Result<Self, SpecError> {
        if m == 0 || n == 0 {
            return Err(SpecError::EmptyShape { m, n });
        }
        if (field.order() as usize) < m.max(n) {
            return Err(SpecError::FieldTooSmall { order: field.order(), needed: m.max(n) });
        }
        check_profile("a", &a, m, n)?;
        check_profile("b", &b, n, m)?;
        Ok(CodeSpec { field, m, n, a, b })
    }

    /// Regular product code: every row code `[n, row_dim]`, every column code
    /// `[m, col_dim]`.
    pub fn regular(field: Arc<Field>, m: usize, n: usize, row_dim: usize, col_dim: usize) -> Result<Self, SpecError> {
        Self::new(field, m, n, vec![row_dim; m], vec![col_dim; n])
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &[usize] {
        &self.a
    }

    pub fn b(&self) -> &[usize] {
        &self.b
    }

    pub fn len(&self) -> usize {
        self.m * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest erasure count row `i` can always fill in (`n − a_i`).
    pub fn row_tolerance(&self, i: usize) -> usize {
        self.n - self.a[i]
    }

    pub fn col_tolerance(&self, j: usize) -> usize {
        self.m - self.b[j]
    }

    /// `k = Σ_j Σ_{i = b_{j−1}+1}^{b_j} max(a_i − j + 1, 0)` with `b_0 = 0`
    /// (1-based indices).
    pub fn dimension(&self) -> usize {
        let mut k = 0;
        let mut prev = 0;
        for (j0, &bj) in self.b.iter().enumerate() {
            let j = j0 + 1;
            for i in (prev + 1)..=bj {
                k += (self.a[i - 1] + 1).saturating_sub(j);
            }
            prev = bj;
        }
        k
    }

    pub fn rate(&self) -> f64 {
        self.dimension() as f64 / self.len() as f64
    }

    pub fn row_family(&self) -> NestedRsFamily {
        NestedRsFamily::new(self.field.clone(), self.n, self.n, None).expect("validated q ≥ n")
    }

    pub fn col_family(&self) -> NestedRsFamily {
        NestedRsFamily::new(self.field.clone(), self.m, self.m, None).expect("validated q ≥ m")
    }

    /// The component codes: row `i` is the `[n, a_i]` member of one nested
    /// Vandermonde family, column `j` the `[m, b_j]` member of another.
    pub fn product_code(&self) -> ProductCode {
        let rows = nested_components(&self.row_family(), &self.a);
        let cols = nested_components(&self.col_family(), &self.b);
        ProductCode::from_components(self.field.clone(), rows, cols).expect("shapes agree")
    }

    /// Runs the marking procedure and records it.
    ///
    /// Each iteration takes the first applicable branch:
    /// (A) the lowest-index available determined row is completed;
    /// (B) otherwise the lowest-index available determined column is completed;
    /// (C) otherwise the lowest-index available row gets generating marks on
    ///     its first `a_i` coordinates and the rest of it is completed.
    /// A line is determined once it has at least as many marks as its code's
    /// dimension, and available while it still has unmarked coordinates.
    pub fn mark_schedule(&self) -> MarkSchedule {
        let (m, n) = (self.m, self.n);
        let mut st = Marks { n, marked: vec![false; m * n], row: vec![0; m], col: vec![0; n], remaining: m * n };
        let mut generating = Vec::new();
        let mut steps = Vec::new();

        while st.remaining > 0 {
            let row_a = (0..m).find(|&i| st.row[i] < n && st.row[i] >= self.a[i]);
            let col_b = (0..n).find(|&j| st.col[j] < m && st.col[j] >= self.b[j]);
            let (line, branch) = match (row_a, col_b) {
                (Some(i), _) => (Line::Row(i), Branch::A),
                (None, Some(j)) => (Line::Column(j), Branch::B),
                (None, None) => {
                    let i = (0..m).find(|&i| st.row[i] < n).expect("an unmarked coordinate exists");
                    for j in 0..self.a[i] {
                        if !st.is_marked(i, j) {
                            st.mark(i, j);
                            generating.push((i, j));
                        }
                    }
                    (Line::Row(i), Branch::C)
                }
            };
            let filled: Vec<(usize, usize)> = match line {
                Line::Row(i) => (0..n).map(|j| (i, j)).filter(|&(i, j)| !st.is_marked(i, j)).collect(),
                Line::Column(j) => (0..m).map(|i| (i, j)).filter(|&(i, j)| !st.is_marked(i, j)).collect(),
            };
            for &(i, j) in &filled {
                st.mark(i, j);
            }
            for &(i, j) in &filled {
                assert_prefix(&st.marked, m, n, Line::Row(i));
                assert_prefix(&st.marked, m, n, Line::Column(j));
            }
            if let Line::Row(i) = line {
                assert_prefix(&st.marked, m, n, Line::Row(i));
            }
            if !filled.is_empty() {
                steps.push(FillStep { line, branch, filled });
            }
        }
        MarkSchedule { m, n, generating, steps }
    }

    pub fn encoder(&self) -> SystematicEncoder {
        SystematicEncoder { code: self.product_code(), schedule: self.mark_schedule() }
    }

    pub fn is_codeword(&self, word: &CodewordMatrix) -> Result<bool, ProductError> {
        self.product_code().contains(word)
    }

    /// Dimension computed as `mn − rank(H)` where `H` stacks every row and
    /// column parity-check constraint.
    pub fn dimension_oracle(&self) -> usize {
        self.product_code().dimension_by_rank()
    }
}

struct Marks {
    n: usize,
    marked: Vec<bool>,
    row: Vec<usize>,
    col: Vec<usize>,
    remaining: usize,
}

impl Marks {
    fn is_marked(&self, i: usize, j: usize) -> bool {
        self.marked[i * self.n + j]
    }

    fn mark(&mut self, i: usize, j: usize) {
        debug_assert!(!self.is_marked(i, j));
        self.marked[i * self.n + j] = true;
        self.row[i] += 1;
        self.col[j] += 1;
        self.remaining -= 1;
    }
}

fn nested_components(family: &NestedRsFamily, dims: &[usize]) -> Vec<Arc<MdsCode>> {
    let mut cache: Vec<Option<Arc<MdsCode>>> = vec![None; family.len() + 1];
    dims.iter()
        .map(|&k| {
            cache[k]
                .get_or_insert_with(|| Arc::new(family.code(k).expect("k ≤ length")))
                .clone()
        })
        .collect()
}

// The procedure's counting argument relies on marks in every line forming a
// prefix of that line.
fn assert_prefix(marked: &[bool], m: usize, n: usize, line: Line) {
    let cells: Vec<bool> = match line {
        Line::Row(i) => (0..n).map(|j| marked[i * n + j]).collect(),
        Line::Column(j) => (0..m).map(|i| marked[i * n + j]).collect(),
    };
    let count = cells.iter().filter(|&&x| x).count();
    assert!(
        cells[..count].iter().all(|&x| x),
        "marked coordinates of {line:?} are not a prefix"
    );
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Line {
    Row(usize),
    Column(usize),
}

/// Which branch of the marking procedure produced a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    A,
    B,
    C,
}

/// One completion of a row or column: the listed coordinates get their values
/// from that line's code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FillStep {
    pub line: Line,
    pub branch: Branch,
    pub filled: Vec<(usize, usize)>,
}

/// Record of the marking procedure (0-based coordinates).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkSchedule {
    pub m: usize,
    pub n: usize,
    /// Information positions, in the order the procedure marked them.
    pub generating: Vec<(usize, usize)>,
    pub steps: Vec<FillStep>,
}

/// Product code over arbitrary MDS component codes.
#[derive(Debug, Clone)]
pub struct ProductCode {
    field: Arc<Field>,
    rows: Vec<Arc<MdsCode>>,
    cols: Vec<Arc<MdsCode>>,
}

/// Result of symbol-level iterative decoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterativeDecode {
    /// Row-major symbols, `None` where the erasure could not be filled.
    pub symbols: Vec<Option<Elem>>,
    pub rounds: usize,
}

impl IterativeDecode {
    pub fn residual(&self) -> usize {
        self.symbols.iter().filter(|s| s.is_none()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.residual() == 0
    }
}

impl ProductCode {
    pub fn from_components(
        field: Arc<Field>,
        rows: Vec<Arc<MdsCode>>,
        cols: Vec<Arc<MdsCode>>,
    ) -> Result<Self, ProductError> {
        let (m, n) = (rows.len(), cols.len());
        if let Some(bad) = rows.iter().find(|c| c.len() != n) {
            return Err(ProductError::SymbolCount { expected: n, got: bad.len() });
        }
        if let Some(bad) = cols.iter().find(|c| c.len() != m) {
            return Err(ProductError::SymbolCount { expected: m, got: bad.len() });
        }
        Ok(ProductCode { field, rows, cols })
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.cols.len()
    }

    pub fn row_code(&self, i: usize) -> &MdsCode {
        &self.rows[i]
    }

    pub fn col_code(&self, j: usize) -> &MdsCode {
        &self.cols[j]
    }

    fn check_shape(&self, word: &Matrix) -> Result<(), ProductError> {
        if word.rows() != self.m() || word.cols() != self.n() {
            return Err(ProductError::Shape { m: self.m(), n: self.n(), rows: word.rows(), cols: word.cols() });
        }
        Ok(())
    }

    pub fn contains(&self, word: &CodewordMatrix) -> Result<bool, ProductError> {
        self.check_shape(word)?;
        let rows_ok = (0..self.m()).all(|i| self.rows[i].contains(word.row(i)));
        let cols_ok = (0..self.n()).all(|j| {
            let col: Vec<Elem> = (0..self.m()).map(|i| word.get(i, j)).collect();
            self.cols[j].contains(&col)
        });
        Ok(rows_ok && cols_ok)
    }

    /// All row and column parity checks as one matrix acting on the `mn`
    /// row-major coordinates.
    pub fn parity_check_matrix(&self) -> Matrix {
        let (m, n) = (self.m(), self.n());
        let mut h = Matrix::zeros(0, m * n);
        for (i, code) in self.rows.iter().enumerate() {
            let p = code.parity_check();
            let mut block = Matrix::zeros(p.rows(), m * n);
            for r in 0..p.rows() {
                for j in 0..n {
                    block.set(r, i * n + j, p.get(r, j));
                }
            }
            h.append_rows(&block);
        }
        for (j, code) in self.cols.iter().enumerate() {
            let p = code.parity_check();
            let mut block = Matrix::zeros(p.rows(), m * n);
            for r in 0..p.rows() {
                for i in 0..m {
                    block.set(r, i * n + j, p.get(r, i));
                }
            }
            h.append_rows(&block);
        }
        h
    }

    pub fn dimension_by_rank(&self) -> usize {
        self.m() * self.n() - self.field.rank(&self.parity_check_matrix())
    }

    /// A basis of the code, one flattened codeword per row.
    pub fn basis(&self) -> Matrix {
        self.field.nullspace(&self.parity_check_matrix())
    }

    /// Alternates row and column passes, filling every line whose erasure
    /// count is at most `length − dimension`, until a pass changes nothing.
    pub fn iterative_decode(&self, received: &[Option<Elem>]) -> Result<IterativeDecode, ProductError> {
        let (m, n) = (self.m(), self.n());
        if received.len() != m * n {
            return Err(ProductError::SymbolCount { expected: m * n, got: received.len() });
        }
        let mut symbols = received.to_vec();
        let mut rounds = 0;
        loop {
            let mut changed = false;
            for i in 0..m {
                let line = &symbols[i * n..(i + 1) * n];
                let erased = line.iter().filter(|s| s.is_none()).count();
                if erased > 0 && erased <= self.rows[i].erasure_tolerance() {
                    let word = self.rows[i].erasure_decode(line)?;
                    for (slot, v) in symbols[i * n..(i + 1) * n].iter_mut().zip(word) {
                        *slot = Some(v);
                    }
                    changed = true;
                }
            }
            for j in 0..n {
                let line: Vec<Option<Elem>> = (0..m).map(|i| symbols[i * n + j]).collect();
                let erased = line.iter().filter(|s| s.is_none()).count();
                if erased > 0 && erased <= self.cols[j].erasure_tolerance() {
                    let word = self.cols[j].erasure_decode(&line)?;
                    for (i, v) in word.into_iter().enumerate() {
                        symbols[i * n + j] = Some(v);
                    }
                    changed = true;
                }
            }
            if !changed {
                break;
            }
            rounds += 1;
        }
        Ok(IterativeDecode { symbols, rounds })
    }
}

/// Systematic encoder: information symbols go to the generating coordinates,
/// then the recorded fill steps are replayed through the component codes.
#[derive(Debug, Clone)]
pub struct SystematicEncoder {
    code: ProductCode,
    schedule: MarkSchedule,
}

impl SystematicEncoder {
    pub fn schedule(&self) -> &MarkSchedule {
        &self.schedule
    }

    pub fn code(&self) -> &ProductCode {
        &self.code
    }

    pub fn dimension(&self) -> usize {
        self.schedule.generating.len()
    }

    pub fn encode(&self, info: &[Elem]) -> Result<CodewordMatrix, ProductError> {
        let k = self.dimension();
        if info.len() != k {
            return Err(ProductError::InfoLength { expected: k, got: info.len() });
        }
        let (m, n) = (self.schedule.m, self.schedule.n);
        let mut cells: Vec<Option<Elem>> = vec![None; m * n];
        for (&(i, j), &v) in self.schedule.generating.iter().zip(info) {
            cells[i * n + j] = Some(self.code.field.elem(v).map_err(MdsError::from)?);
        }
        // A step's line never contains a generating coordinate marked later,
        // so placing all information symbols up front is equivalent.
        for step in &self.schedule.steps {
            match step.line {
                Line::Row(i) => {
                    let word = self.code.rows[i].erasure_decode(&cells[i * n..(i + 1) * n])?;
                    for &(_, j) in &step.filled {
                        cells[i * n + j] = Some(word[j]);
                    }
                }
                Line::Column(j) => {
                    let line: Vec<Option<Elem>> = (0..m).map(|i| cells[i * n + j]).collect();
                    let word = self.code.cols[j].erasure_decode(&line)?;
                    for &(i, _) in &step.filled {
                        cells[i * n + j] = Some(word[i]);
                    }
                }
            }
        }
        let mut out = Matrix::zeros(m, n);
        for i in 0..m {
            for j in 0..n {
                out.set(i, j, cells[i * n + j].expect("schedule covers every coordinate"));
            }
        }
        Ok(out)
    }

    /// Reads the information symbols back from the generating coordinates.
    pub fn extract(&self, word: &CodewordMatrix) -> Vec<Elem> {
        self.schedule.generating.iter().map(|&(i, j)| word.get(i, j)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::FieldConfig;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf7() -> Arc<Field> {
        Arc::new(Field::prime(7).unwrap())
    }

    fn spec(a: &[usize], b: &[usize]) -> CodeSpec {
        CodeSpec::new(gf7(), a.len(), b.len(), a.to_vec(), b.to_vec()).unwrap()
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(CodeSpec::regular(gf7(), 4, 4, 3, 2).unwrap().dimension(), 6);
        assert_eq!(spec(&[1, 2, 3], &[1, 2, 3]).dimension(), 3);
        assert_eq!(spec(&[0, 0, 0], &[1, 2, 3]).dimension(), 0);
    }

    #[test]
    fn validation_names_offending_index() {
        let err = CodeSpec::new(gf7(), 3, 3, vec![1, 3, 2], vec![1, 1, 1]).unwrap_err();
        assert_eq!(err, SpecError::NotMonotone { field: "a", index: 2, value: 2, prev: 3 });
        assert!(err.to_string().starts_with("a[2] = 2"));
        let err = CodeSpec::new(gf7(), 3, 3, vec![1, 1, 1], vec![1, 1, 4]).unwrap_err();
        assert_eq!(err, SpecError::OutOfRange { field: "b", index: 2, value: 4, max: 3 });
        assert!(matches!(
            CodeSpec::new(gf7(), 8, 3, vec![1; 8], vec![1; 3]),
            Err(SpecError::FieldTooSmall { order: 7, needed: 8 })
        ));
        assert!(matches!(
            CodeSpec::new(gf7(), 2, 2, vec![1], vec![1, 1]),
            Err(SpecError::Length { field: "a", .. })
        ));
    }

    #[test]
    fn schedule_small_trace() {
        let s = spec(&[1, 2], &[1, 2]).mark_schedule();
        assert_eq!(s.generating, vec![(0, 0), (1, 1)]);
        let branches: Vec<_> = s.steps.iter().map(|st| (st.line, st.branch)).collect();
        assert_eq!(branches, vec![(Line::Row(0), Branch::C), (Line::Column(0), Branch::B)]);
    }

    #[test]
    fn schedule_full_rate_is_all_generating() {
        let s = spec(&[3, 3, 3], &[3, 3, 3]).mark_schedule();
        assert_eq!(s.generating.len(), 9);
        assert!(s.steps.is_empty());
    }

    fn all_monotone(len: usize, max: usize) -> Vec<Vec<usize>> {
        fn rec(len: usize, lo: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == len {
                out.push(cur.clone());
                return;
            }
            for v in lo..=max {
                cur.push(v);
                rec(len, v, max, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(len, 0, max, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn schedule_covers_every_coordinate_once() {
        for m in 1..=3 {
            for n in 1..=3 {
                for a in all_monotone(m, n) {
                    for b in all_monotone(n, m) {
                        let sp = CodeSpec::new(gf7(), m, n, a.clone(), b.clone()).unwrap();
                        let s = sp.mark_schedule();
                        let mut seen = vec![0; m * n];
                        for &(i, j) in s.generating.iter().chain(s.steps.iter().flat_map(|st| &st.filled)) {
                            seen[i * n + j] += 1;
                        }
                        assert!(seen.iter().all(|&c| c == 1));
                        assert_eq!(s.generating.len(), sp.dimension(), "a={a:?} b={b:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn encode_zero_and_regular_membership() {
        let sp = CodeSpec::regular(gf7(), 4, 4, 3, 2).unwrap();
        let enc = sp.encoder();
        let zero = enc.encode(&[0; 6]).unwrap();
        assert_eq!(zero, Matrix::zeros(4, 4));
        let cw = enc.encode(&[1, 2, 3, 4, 5, 6]).unwrap();
        let rows = sp.row_family().code(3).unwrap();
        let cols = sp.col_family().code(2).unwrap();
        for i in 0..4 {
            assert!(rows.contains(cw.row(i)));
        }
        for j in 0..4 {
            let col: Vec<Elem> = (0..4).map(|i| cw.get(i, j)).collect();
            assert!(cols.contains(&col));
        }
        assert_eq!(enc.extract(&cw), vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(
            enc.encode(&[1, 2]).unwrap_err(),
            ProductError::InfoLength { expected: 6, got: 2 }
        );
    }

    #[test]
    fn perturbation_breaks_membership() {
        let sp = CodeSpec::regular(gf7(), 4, 4, 3, 2).unwrap();
        let enc = sp.encoder();
        let cw = enc.encode(&[3, 1, 4, 1, 5, 2]).unwrap();
        assert!(sp.is_codeword(&cw).unwrap());
        for i in 0..4 {
            for j in 0..4 {
                for delta in 1..7 {
                    let mut bad = cw.clone();
                    bad.set(i, j, (cw.get(i, j) + delta) % 7);
                    // Every coordinate here is covered by a [4,3] row check.
                    assert!(!sp.is_codeword(&bad).unwrap());
                }
            }
        }
        assert!(sp.is_codeword(&Matrix::zeros(3, 4)).is_err());
    }

    #[test]
    fn unit_vectors_span_full_dimension() {
        let f = gf7();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let m = rng.gen_range(1..=5);
            let n = rng.gen_range(1..=5);
            let mut a: Vec<usize> = (0..m).map(|_| rng.gen_range(0..=n)).collect();
            let mut b: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=m)).collect();
            a.sort();
            b.sort();
            let sp = CodeSpec::new(f.clone(), m, n, a, b).unwrap();
            let enc = sp.encoder();
            let k = enc.dimension();
            let mut span = Matrix::zeros(k, m * n);
            for u in 0..k {
                let mut info = vec![0; k];
                info[u] = 1;
                let cw = enc.encode(&info).unwrap();
                assert!(sp.is_codeword(&cw).unwrap());
                for i in 0..m {
                    for j in 0..n {
                        span.set(u, i * n + j, cw.get(i, j));
                    }
                }
            }
            assert_eq!(f.rank(&span), k);
        }
    }

    #[test]
    fn oracle_edge_cases() {
        assert_eq!(CodeSpec::regular(gf7(), 4, 5, 3, 2).unwrap().dimension_oracle(), 6);
        assert_eq!(spec(&[0, 0, 0], &[3, 3, 3]).dimension_oracle(), 0);
    }

    #[test]
    fn iterative_decode_recovers_single_erasure() {
        let sp = CodeSpec::regular(gf7(), 4, 4, 3, 2).unwrap();
        let enc = sp.encoder();
        let cw = enc.encode(&[1, 0, 0, 0, 0, 0]).unwrap();
        let mut rx: Vec<Option<Elem>> = (0..16).map(|t| Some(cw.get(t / 4, t % 4))).collect();
        rx[5] = None;
        let out = enc.code().iterative_decode(&rx).unwrap();
        assert!(out.is_complete());
        assert_eq!(out.rounds, 1);
        assert_eq!(out.symbols[5], Some(cw.get(1, 1)));
    }

    #[test]
    fn large_binary_field_round_trip() {
        let f = Arc::new(FieldConfig::BinaryExtension { w: 8, poly: Some(285) }.build().unwrap());
        let sp = CodeSpec::new(f, 12, 10, vec![3, 4, 4, 6, 6, 7, 8, 8, 9, 9, 10, 10], vec![2, 3, 5, 6, 8, 9, 9, 10, 12, 12])
            .unwrap();
        let enc = sp.encoder();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let info: Vec<Elem> = (0..enc.dimension()).map(|_| rng.gen_range(0..256)).collect();
        let cw = enc.encode(&info).unwrap();
        assert!(sp.is_codeword(&cw).unwrap());
        assert_eq!(enc.extract(&cw), info);
    }
}
