//! Minimum-distance bound for irregular product codes from the component
//! minimum distances, plus the constructions that attain it.
//!
//! The bound `D` is the least weight of a nonzero binary `m × n` matrix whose
//! nonzero rows `i` carry at least `d_i` ones and whose nonzero columns `j`
//! carry at least `d'_j` ones. Three routes compute it here: the closed form
//! ([`distance_bound`]), a max-flow evaluation of the inner problem
//! ([`inner_via_maxflow`]) and a branch-and-bound search over binary matrices
//! ([`min_weight_oracle`]).

use std::collections::VecDeque;
use std::sync::Arc;

use thiserror::Error;

use crate::galois::Field;
use crate::mds::{MdsCode, MdsError, NestedRsFamily};
use crate::product::ProductCode;

/// Largest `m·n` accepted by the exhaustive witness search.
pub const MAX_ORACLE_CELLS: usize = 25;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DistanceError {
    #[error("profile must have at least one row and one column")]
    Empty,
    #[error("{field}[{index}] = {value} outside [1, {max}]")]
    OutOfRange { field: &'static str, index: usize, value: usize, max: usize },
    #[error("{field}[{index}] = {value} exceeds {field}[{prev_index}]; the sequence must be non-increasing", prev_index = index - 1)]
    NotNonIncreasing { field: &'static str, index: usize, value: usize },
    #[error("anchor ({i}, {j}) is not admissible")]
    InadmissibleAnchor { i: usize, j: usize },
    #[error("no admissible anchor")]
    NoAdmissibleAnchor,
    #[error("{m}×{n} exceeds the exhaustive search limit of {MAX_ORACLE_CELLS} cells")]
    TooLarge { m: usize, n: usize },
    #[error("field of order {order} is smaller than max(m, n) = {needed}")]
    FieldTooSmall { order: u32, needed: usize },
    #[error(transparent)]
    Component(#[from] MdsError),
}

/// Component minimum distances: `n ≥ d_1 ≥ … ≥ d_m ≥ 1` for the rows and
/// `m ≥ d'_1 ≥ … ≥ d'_n ≥ 1` for the columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceProfile {
    d: Vec<usize>,
    dp: Vec<usize>,
}

fn check_seq(field: &'static str, seq: &[usize], max: usize) -> Result<(), DistanceError> {
    for (index, &value) in seq.iter().enumerate() {
        if value == 0 || value > max {
            return Err(DistanceError::OutOfRange { field, index, value, max });
        }
        if index > 0 && value > seq[index - 1] {
            return Err(DistanceError::NotNonIncreasing { field, index, value });
        }
    }
    Ok(())
}

impl DistanceProfile {
    pub fn new(d: Vec<usize>, dp: Vec<usize>) -> Result<Self, DistanceError> {
        if d.is_empty() || dp.is_empty() {
            return Err(DistanceError::Empty);
        }
        check_seq("d", &d, dp.len())?;
        check_seq("dp", &dp, d.len())?;
        Ok(DistanceProfile { d, dp })
    }

    /// Every row code has distance `d_row`, every column code `d_col`.
    pub fn regular(m: usize, n: usize, d_row: usize, d_col: usize) -> Result<Self, DistanceError> {
        Self::new(vec![d_row; m], vec![d_col; n])
    }

    pub fn m(&self) -> usize {
        self.d.len()
    }

    pub fn n(&self) -> usize {
        self.dp.len()
    }

    pub fn row_distances(&self) -> &[usize] {
        &self.d
    }

    pub fn col_distances(&self) -> &[usize] {
        &self.dp
    }

    fn transposed(&self) -> DistanceProfile {
        DistanceProfile { d: self.dp.clone(), dp: self.d.clone() }
    }

    /// Anchor `(i, j)` (1-based) is admissible when `d_i ≤ n − j + 1` and
    /// `d'_j ≤ m − i + 1`.
    pub fn is_admissible(&self, i: usize, j: usize) -> bool {
        (1..=self.m()).contains(&i)
            && (1..=self.n()).contains(&j)
            && self.d[i - 1] <= self.n() - j + 1
            && self.dp[j - 1] <= self.m() - i + 1
    }
}

/// Nonzero binary matrix meeting the row and column weight floors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessMatrix {
    m: usize,
    n: usize,
    bits: Vec<bool>,
}

impl WitnessMatrix {
    pub fn from_rows(rows: &[Vec<bool>]) -> Self {
        let n = rows.first().map_or(0, Vec::len);
        WitnessMatrix { m: rows.len(), n, bits: rows.concat() }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[bool] {
        &self.bits[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<bool> {
        (0..self.m).map(|i| self.get(i, j)).collect()
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Checks the defining constraints against `p`.
    pub fn is_valid_for(&self, p: &DistanceProfile) -> bool {
        if self.m != p.m() || self.n != p.n() || self.weight() == 0 {
            return false;
        }
        let rows_ok = (0..self.m).all(|i| {
            let w = self.row(i).iter().filter(|&&b| b).count();
            w == 0 || w >= p.d[i]
        });
        let cols_ok = (0..self.n).all(|j| {
            let w = self.column(j).iter().filter(|&&b| b).count();
            w == 0 || w >= p.dp[j]
        });
        rows_ok && cols_ok
    }

    fn transposed(&self) -> WitnessMatrix {
        let mut bits = vec![false; self.bits.len()];
        for i in 0..self.m {
            for j in 0..self.n {
                bits[j * self.m + i] = self.get(i, j);
            }
        }
        WitnessMatrix { m: self.n, n: self.m, bits }
    }
}

impl std::fmt::Display for WitnessMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.m {
            let line: Vec<&str> = self.row(i).iter().map(|&b| if b { "1" } else { "0" }).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Closed-form minimum number of ones in the submatrix on rows `i..=m` and
/// columns `j..=n` (1-based) when every one of those lines is nonzero:
/// `max over i−1 ≤ i' ≤ m, j−1 ≤ j' ≤ n` of
/// `Σ_{k=i}^{i'} d_k + Σ_{k=j}^{j'} d'_k − (i'−i+1)(j'−j+1)`.
pub fn inner_max(p: &DistanceProfile, i: usize, j: usize) -> Result<i64, DistanceError> {
    if !p.is_admissible(i, j) {
        return Err(DistanceError::InadmissibleAnchor { i, j });
    }
    let mut best = i64::MIN;
    let mut row_sum = 0i64;
    for ip in (i - 1)..=p.m() {
        if ip >= i {
            row_sum += p.d[ip - 1] as i64;
        }
        let mut col_sum = 0i64;
        for jp in (j - 1)..=p.n() {
            if jp >= j {
                col_sum += p.dp[jp - 1] as i64;
            }
            let area = ((ip + 1 - i) * (jp + 1 - j)) as i64;
            best = best.max(row_sum + col_sum - area);
        }
    }
    Ok(best)
}

/// The bound `D`: minimum over admissible anchors of [`inner_max`].
pub fn distance_bound(p: &DistanceProfile) -> Result<usize, DistanceError> {
    distance_bound_with_anchor(p).map(|(d, _)| d)
}

/// `D` together with the first anchor attaining it.
pub fn distance_bound_with_anchor(p: &DistanceProfile) -> Result<(usize, (usize, usize)), DistanceError> {
    let mut best: Option<(i64, (usize, usize))> = None;
    for i in 1..=p.m() {
        for j in 1..=p.n() {
            if !p.is_admissible(i, j) {
                continue;
            }
            let v = inner_max(p, i, j)?;
            if best.is_none_or(|(b, _)| v < b) {
                best = Some((v, (i, j)));
            }
        }
    }
    best.map(|(v, a)| (v as usize, a)).ok_or(DistanceError::NoAdmissibleAnchor)
}

/// Edmonds–Karp on a dense capacity matrix.
struct FlowNetwork {
    cap: Vec<Vec<i64>>,
}

impl FlowNetwork {
    fn new(nodes: usize) -> Self {
        FlowNetwork { cap: vec![vec![0; nodes]; nodes] }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: i64) {
        self.cap[from][to] += cap;
    }

    fn max_flow(&mut self, source: usize, sink: usize) -> i64 {
        let nodes = self.cap.len();
        let mut total = 0;
        loop {
            let mut parent = vec![usize::MAX; nodes];
            parent[source] = source;
            let mut queue = VecDeque::from([source]);
            while let Some(u) = queue.pop_front() {
                for v in 0..nodes {
                    if parent[v] == usize::MAX && self.cap[u][v] > 0 {
                        parent[v] = u;
                        queue.push_back(v);
                    }
                }
            }
            if parent[sink] == usize::MAX {
                return total;
            }
            let mut push = i64::MAX;
            let mut v = sink;
            while v != source {
                push = push.min(self.cap[parent[v]][v]);
                v = parent[v];
            }
            let mut v = sink;
            while v != source {
                let u = parent[v];
                self.cap[u][v] -= push;
                self.cap[v][u] += push;
                v = u;
            }
            total += push;
        }
    }
}

/// Minimum number of ones in the `(i..=m) × (j..=n)` submatrix, computed as
/// the area minus the maximum number of zeros. Zeros are a flow: the source
/// feeds row `r` up to `n − j + 1 − d_r`, column `c` drains up to
/// `m − i + 1 − d'_c`, and each cell is a unit edge from its row to its column.
pub fn inner_via_maxflow(p: &DistanceProfile, i: usize, j: usize) -> Result<i64, DistanceError> {
    if !(1..=p.m()).contains(&i) || !(1..=p.n()).contains(&j) {
        return Err(DistanceError::InadmissibleAnchor { i, j });
    }
    let rows = p.m() - i + 1;
    let cols = p.n() - j + 1;
    let row_caps: Vec<i64> = (i..=p.m()).map(|r| cols as i64 - p.d[r - 1] as i64).collect();
    let col_caps: Vec<i64> = (j..=p.n()).map(|c| rows as i64 - p.dp[c - 1] as i64).collect();
    if row_caps.iter().chain(&col_caps).any(|&c| c < 0) {
        return Err(DistanceError::InadmissibleAnchor { i, j });
    }
    let source = 0;
    let sink = rows + cols + 1;
    let mut net = FlowNetwork::new(rows + cols + 2);
    for (r, &c) in row_caps.iter().enumerate() {
        net.add_edge(source, 1 + r, c);
        for cc in 0..cols {
            net.add_edge(1 + r, 1 + rows + cc, 1);
        }
    }
    for (cc, &c) in col_caps.iter().enumerate() {
        net.add_edge(1 + rows + cc, sink, c);
    }
    Ok((rows * cols) as i64 - net.max_flow(source, sink))
}

/// Exhaustive minimum-weight witness search (branch and bound over row
/// patterns). Limited to `m·n ≤ MAX_ORACLE_CELLS`.
pub fn min_weight_oracle(p: &DistanceProfile) -> Result<(usize, WitnessMatrix), DistanceError> {
    if p.m() * p.n() > MAX_ORACLE_CELLS {
        return Err(DistanceError::TooLarge { m: p.m(), n: p.n() });
    }
    // Enumerate over the shorter dimension so each row has few patterns.
    if p.n() > p.m() {
        let (w, witness) = min_weight_oracle(&p.transposed())?;
        return Ok((w, witness.transposed()));
    }
    let (m, n) = (p.m(), p.n());
    let patterns: Vec<Vec<u32>> = (0..m)
        .map(|i| {
            let mut pats: Vec<u32> =
                (0u32..(1 << n)).filter(|s| *s == 0 || s.count_ones() as usize >= p.d[i]).collect();
            pats.sort_by_key(|s| s.count_ones());
            pats
        })
        .collect();
    let mut search = WitnessSearch {
        p,
        patterns: &patterns,
        col_counts: vec![0; n],
        chosen: vec![0; m],
        best_weight: m * n + 1,
        best: Vec::new(),
    };
    search.descend(0, 0);
    let bits = search
        .best
        .iter()
        .flat_map(|&row| (0..n).map(move |j| row >> j & 1 == 1))
        .collect();
    Ok((search.best_weight, WitnessMatrix { m, n, bits }))
}

struct WitnessSearch<'a> {
    p: &'a DistanceProfile,
    patterns: &'a [Vec<u32>],
    col_counts: Vec<usize>,
    chosen: Vec<u32>,
    best_weight: usize,
    best: Vec<u32>,
}

impl WitnessSearch<'_> {
    fn descend(&mut self, row: usize, weight: usize) {
        let m = self.p.m();
        let remaining = m - row;
        let mut deficit = 0;
        for (j, &c) in self.col_counts.iter().enumerate() {
            if c > 0 && c < self.p.dp[j] {
                let need = self.p.dp[j] - c;
                if need > remaining {
                    return;
                }
                deficit += need;
            }
        }
        if weight + deficit >= self.best_weight {
            return;
        }
        if row == m {
            if weight > 0 {
                self.best_weight = weight;
                self.best = self.chosen.clone();
            }
            return;
        }
        for idx in 0..self.patterns[row].len() {
            let pat = self.patterns[row][idx];
            let w = pat.count_ones() as usize;
            if weight + w >= self.best_weight {
                break;
            }
            for (j, c) in self.col_counts.iter_mut().enumerate() {
                *c += (pat >> j & 1) as usize;
            }
            self.chosen[row] = pat;
            self.descend(row + 1, weight + w);
            for (j, c) in self.col_counts.iter_mut().enumerate() {
                *c -= (pat >> j & 1) as usize;
            }
        }
    }
}

/// Component codes attaining the bound, together with the witness they
/// contain as a codeword.
#[derive(Debug, Clone)]
pub struct AchievedCode {
    pub witness: WitnessMatrix,
    pub bound: usize,
    pub code: ProductCode,
}

/// Builds row codes `[n, n − d_i + 1]` and column codes `[m, m − d'_j + 1]`
/// such that a minimum-weight witness is a codeword: every nonzero line gets a
/// scaled RS code containing that line of the witness, every zero line a plain
/// RS code.
pub fn achieve_distance(p: &DistanceProfile, field: Arc<Field>) -> Result<AchievedCode, DistanceError> {
    let (m, n) = (p.m(), p.n());
    if (field.order() as usize) < m.max(n) {
        return Err(DistanceError::FieldTooSmall { order: field.order(), needed: m.max(n) });
    }
    let (bound, witness) = min_weight_oracle(p)?;
    let row_family = NestedRsFamily::new(field.clone(), n, n, None)?;
    let col_family = NestedRsFamily::new(field.clone(), m, m, None)?;
    let component = |family: &NestedRsFamily, dist: usize, line: &[bool]| -> Result<Arc<MdsCode>, MdsError> {
        let k = family.len() - dist + 1;
        Ok(Arc::new(if line.iter().any(|&b| b) {
            family.scaled_code_containing(k, line)?.to_code()
        } else {
            family.code(k)?
        }))
    };
    let rows = (0..m)
        .map(|i| component(&row_family, p.d[i], witness.row(i)))
        .collect::<Result<Vec<_>, _>>()?;
    let cols = (0..n)
        .map(|j| component(&col_family, p.dp[j], &witness.column(j)))
        .collect::<Result<Vec<_>, _>>()?;
    let code = ProductCode::from_components(field, rows, cols).expect("component lengths match");
    Ok(AchievedCode { witness, bound, code })
}
