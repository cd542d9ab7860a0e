//! Monte Carlo simulation of iterative row/column decoding on the erasure
//! channel.
//!
//! An MDS component fills its erasures exactly when there are at most
//! `length − dimension` of them, so decoding success depends only on the
//! erasure pattern. The hot loop therefore peels boolean masks; the
//! field-level path exists to cross-check that equivalence.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::asymptotic::{design_alpha_from_beta, discretize, DesignError, PiecewiseLinear};
use crate::galois::{Elem, Field, FieldConfig, GaloisError};
use crate::product::{CodeSpec, ProductError, SpecError};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("epsilon list is empty")]
    NoEpsilons,
    #[error("epsilon {0} outside [0, 1]")]
    Epsilon(f64),
    #[error("epsilons must be sorted in increasing order")]
    Unsorted,
    #[error("field-level simulation needs m, n ≤ {max} (got {m}×{n})")]
    TooLargeForFieldLevel { m: usize, n: usize, max: usize },
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Field(#[from] GaloisError),
    #[error(transparent)]
    Product(#[from] ProductError),
}

/// `m × n` erasure pattern, row-major, `true` = erased.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ErasureMask {
    m: usize,
    n: usize,
    bits: Vec<bool>,
}

impl ErasureMask {
    pub fn clear(m: usize, n: usize) -> Self {
        ErasureMask { m, n, bits: vec![false; m * n] }
    }

    pub fn from_bits(m: usize, n: usize, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), m * n, "mask size");
        ErasureMask { m, n, bits }
    }

    /// Erases every cell whose variate lies below `epsilon`.
    pub fn from_variates(m: usize, n: usize, variates: &[f64], epsilon: f64) -> Self {
        Self::from_bits(m, n, variates.iter().map(|&u| u < epsilon).collect())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, erased: bool) {
        self.bits[i * self.n + j] = erased;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_clear(&self) -> bool {
        !self.bits.contains(&true)
    }

    pub fn row_count(&self, i: usize) -> usize {
        self.bits[i * self.n..(i + 1) * self.n].iter().filter(|&&b| b).count()
    }

    pub fn col_count(&self, j: usize) -> usize {
        (0..self.m).filter(|&i| self.get(i, j)).count()
    }

    /// True when no row or column could fill its remaining erasures.
    pub fn is_stopping_for(&self, spec: &CodeSpec) -> bool {
        (0..self.m).all(|i| {
            let c = self.row_count(i);
            c == 0 || c > spec.row_tolerance(i)
        }) && (0..self.n).all(|j| {
            let c = self.col_count(j);
            c == 0 || c > spec.col_tolerance(j)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeelOrder {
    RowsFirst,
    ColumnsFirst,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeelOutcome {
    pub mask: ErasureMask,
    /// Passes (one row sweep plus one column sweep) that changed something.
    pub rounds: usize,
}

/// Reusable buffers for repeated peeling on one spec.
struct Peeler {
    m: usize,
    n: usize,
    row_tol: Vec<usize>,
    col_tol: Vec<usize>,
    mask: Vec<bool>,
    row_cnt: Vec<usize>,
    col_cnt: Vec<usize>,
}

impl Peeler {
    fn new(spec: &CodeSpec) -> Self {
        let (m, n) = (spec.m(), spec.n());
        Peeler {
            m,
            n,
            row_tol: (0..m).map(|i| spec.row_tolerance(i)).collect(),
            col_tol: (0..n).map(|j| spec.col_tolerance(j)).collect(),
            mask: vec![false; m * n],
            row_cnt: vec![0; m],
            col_cnt: vec![0; n],
        }
    }

    fn load(&mut self, bits: impl Iterator<Item = bool>) {
        self.row_cnt.fill(0);
        self.col_cnt.fill(0);
        let n = self.n;
        for (idx, erased) in bits.enumerate() {
            self.mask[idx] = erased;
            if erased {
                self.row_cnt[idx / n] += 1;
                self.col_cnt[idx % n] += 1;
            }
        }
    }

    fn rows_pass(&mut self) -> bool {
        let n = self.n;
        let mut changed = false;
        for i in 0..self.m {
            let c = self.row_cnt[i];
            if c > 0 && c <= self.row_tol[i] {
                for j in 0..n {
                    if self.mask[i * n + j] {
                        self.mask[i * n + j] = false;
                        self.col_cnt[j] -= 1;
                    }
                }
                self.row_cnt[i] = 0;
                changed = true;
            }
        }
        changed
    }

    fn cols_pass(&mut self) -> bool {
        let n = self.n;
        let mut changed = false;
        for j in 0..n {
            let c = self.col_cnt[j];
            if c > 0 && c <= self.col_tol[j] {
                for i in 0..self.m {
                    if self.mask[i * n + j] {
                        self.mask[i * n + j] = false;
                        self.row_cnt[i] -= 1;
                    }
                }
                self.col_cnt[j] = 0;
                changed = true;
            }
        }
        changed
    }

    fn run(&mut self, order: PeelOrder) -> usize {
        let mut rounds = 0;
        loop {
            let changed = match order {
                PeelOrder::RowsFirst => self.rows_pass() | self.cols_pass(),
                PeelOrder::ColumnsFirst => self.cols_pass() | self.rows_pass(),
            };
            if !changed {
                return rounds;
            }
            rounds += 1;
        }
    }

    fn residual(&self) -> usize {
        self.row_cnt.iter().sum()
    }
}

/// Mask-level iterative decoding with rows swept first.
pub fn peel_decode(spec: &CodeSpec, mask: &ErasureMask) -> PeelOutcome {
    peel_decode_with(spec, mask, PeelOrder::RowsFirst)
}

pub fn peel_decode_with(spec: &CodeSpec, mask: &ErasureMask, order: PeelOrder) -> PeelOutcome {
    assert_eq!((mask.m, mask.n), (spec.m(), spec.n()), "mask shape must match the spec");
    let mut p = Peeler::new(spec);
    p.load(mask.bits.iter().copied());
    let rounds = p.run(order);
    PeelOutcome { mask: ErasureMask::from_bits(mask.m, mask.n, p.mask), rounds }
}

/// Uniform `[0, 1)` variates for one trial, row-major. Trial `t` of seed `s`
/// always reads stream `t` of the ChaCha8 generator keyed by `s`.
pub fn trial_variates(seed: u64, stream: u64, cells: usize, out: &mut Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    out.clear();
    out.extend((0..cells).map(|_| rng.gen::<f64>()));
}

/// Stream for variates when the epsilons are not coupled.
fn uncoupled_stream(trial: u64, eps_index: usize) -> u64 {
    ((eps_index as u64 + 1) << 40) | trial
}

/// Stream for random messages in field-level runs.
fn message_stream(trial: u64) -> u64 {
    (1 << 63) | trial
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SimMode {
    #[default]
    MaskOnly,
    /// Encodes random messages and decodes symbols; needs `m, n ≤ 16`.
    FieldLevel,
}

pub const FIELD_LEVEL_MAX_SIDE: usize = 16;

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub spec: CodeSpec,
    pub epsilons: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    /// Share one set of variates per trial across all epsilons.
    pub couple: bool,
    pub mode: SimMode,
}

impl SimConfig {
    pub fn new(spec: CodeSpec, epsilons: Vec<f64>, trials: u64, seed: u64) -> Self {
        SimConfig { spec, epsilons, trials, seed, couple: true, mode: SimMode::MaskOnly }
    }

    fn validate(&self) -> Result<(), SimError> {
        if self.trials == 0 {
            return Err(SimError::NoTrials);
        }
        if self.epsilons.is_empty() {
            return Err(SimError::NoEpsilons);
        }
        if let Some(&e) = self.epsilons.iter().find(|e| !(0.0..=1.0).contains(*e)) {
            return Err(SimError::Epsilon(e));
        }
        if self.epsilons.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SimError::Unsorted);
        }
        let (m, n) = (self.spec.m(), self.spec.n());
        if self.mode == SimMode::FieldLevel && m.max(n) > FIELD_LEVEL_MAX_SIDE {
            return Err(SimError::TooLargeForFieldLevel { m, n, max: FIELD_LEVEL_MAX_SIDE });
        }
        Ok(())
    }
}

/// Statistics at one erasure probability.
#[derive(Debug, Clone, PartialEq)]
pub struct SimPoint {
    pub epsilon: f64,
    pub trials: u64,
    pub word_errors: u64,
    pub wer: f64,
    /// Half-width of the normal-approximation 95% interval for `wer`.
    pub wer_ci95: f64,
    pub mean_residual_fraction: f64,
    /// Standard error of `mean_residual_fraction`.
    pub residual_std_error: f64,
    pub mean_rounds: f64,
    /// `rounds_histogram[r]` counts trials that took `r` rounds.
    pub rounds_histogram: Vec<u64>,
    /// Field-level runs only: trials whose recovered symbols disagreed with
    /// the transmitted codeword.
    pub symbol_mismatches: u64,
}

impl SimPoint {
    /// Whether the two 95% intervals are disjoint.
    pub fn separated_from(&self, other: &SimPoint) -> bool {
        self.wer + self.wer_ci95 < other.wer - other.wer_ci95 || other.wer + other.wer_ci95 < self.wer - self.wer_ci95
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub points: Vec<SimPoint>,
}

pub const CSV_HEADER: &str = "epsilon,trials,word_errors,wer,wer_ci95,mean_residual_fraction,mean_rounds";

/// Fixed-point decimal without trailing zeros.
pub fn format_trimmed(x: f64, decimals: usize) -> String {
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

impl SimResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            writeln!(
                out,
                "{},{},{},{:.8},{:.8},{:.8},{:.6}",
                format_trimmed(p.epsilon, 10),
                p.trials,
                p.word_errors,
                p.wer,
                p.wer_ci95,
                p.mean_residual_fraction,
                p.mean_rounds
            )
            .expect("writing to a String");
        }
        out
    }
}

/// Integer counters per epsilon; sums are order-independent, so the parallel
/// reduction is deterministic.
#[derive(Debug, Clone)]
struct Counters {
    word_errors: u64,
    residual: u64,
    residual_sq: u128,
    rounds: u64,
    histogram: Vec<u64>,
    symbol_mismatches: u64,
}

impl Counters {
    fn new() -> Self {
        Counters { word_errors: 0, residual: 0, residual_sq: 0, rounds: 0, histogram: Vec::new(), symbol_mismatches: 0 }
    }

    fn record(&mut self, residual: usize, rounds: usize) {
        if residual > 0 {
            self.word_errors += 1;
        }
        self.residual += residual as u64;
        self.residual_sq += (residual as u128) * (residual as u128);
        self.rounds += rounds as u64;
        if self.histogram.len() <= rounds {
            self.histogram.resize(rounds + 1, 0);
        }
        self.histogram[rounds] += 1;
    }

    fn merge(mut self, other: Counters) -> Counters {
        self.word_errors += other.word_errors;
        self.residual += other.residual;
        self.residual_sq += other.residual_sq;
        self.rounds += other.rounds;
        self.symbol_mismatches += other.symbol_mismatches;
        if self.histogram.len() < other.histogram.len() {
            self.histogram.resize(other.histogram.len(), 0);
        }
        for (a, b) in self.histogram.iter_mut().zip(other.histogram) {
            *a += b;
        }
        self
    }
}

struct TrialState {
    peeler: Peeler,
    variates: Vec<f64>,
    counters: Vec<Counters>,
}

/// Simulates every epsilon of `cfg` over `cfg.trials` trials.
///
/// With coupling, each trial's failure set is monotone in epsilon; this is
/// asserted per trial.
pub fn run_sweep(cfg: &SimConfig) -> Result<SimResult, SimError> {
    cfg.validate()?;
    let spec = &cfg.spec;
    let cells = spec.len();
    let encoder = match cfg.mode {
        SimMode::FieldLevel => Some(spec.encoder()),
        SimMode::MaskOnly => None,
    };
    let neps = cfg.epsilons.len();
    let init = || TrialState {
        peeler: Peeler::new(spec),
        variates: Vec::with_capacity(cells),
        counters: vec![Counters::new(); neps],
    };
    let totals = (0..cfg.trials)
        .into_par_iter()
        .fold(init, |mut st, t| {
            if cfg.couple {
                trial_variates(cfg.seed, t, cells, &mut st.variates);
            }
            let message: Option<Vec<Elem>> = encoder.as_ref().map(|enc| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(message_stream(t));
                let q = spec.field().order();
                (0..enc.dimension()).map(|_| rng.gen_range(0..q)).collect()
            });
            let codeword = match (&encoder, &message) {
                (Some(enc), Some(msg)) => Some(enc.encode(msg).expect("message length matches")),
                _ => None,
            };
            let mut failed_before = false;
            for (e, &eps) in cfg.epsilons.iter().enumerate() {
                if !cfg.couple {
                    trial_variates(cfg.seed, uncoupled_stream(t, e), cells, &mut st.variates);
                }
                let (residual, rounds) = match (&encoder, &codeword) {
                    (Some(enc), Some(cw)) => {
                        let received: Vec<Option<Elem>> = st
                            .variates
                            .iter()
                            .enumerate()
                            .map(|(idx, &u)| (u >= eps).then(|| cw.get(idx / spec.n(), idx % spec.n())))
                            .collect();
                        let out = enc.code().iterative_decode(&received).expect("shapes match");
                        let wrong = out
                            .symbols
                            .iter()
                            .enumerate()
                            .any(|(idx, s)| s.is_some_and(|v| v != cw.get(idx / spec.n(), idx % spec.n())));
                        if wrong {
                            st.counters[e].symbol_mismatches += 1;
                        }
                        (out.residual(), out.rounds)
                    }
                    _ => {
                        let (p, u) = (&mut st.peeler, &st.variates);
                        p.load(u.iter().map(|&x| x < eps));
                        let rounds = p.run(PeelOrder::RowsFirst);
                        (p.residual(), rounds)
                    }
                };
                if cfg.couple {
                    assert!(!failed_before || residual > 0, "coupled failure set must be monotone in epsilon");
                    failed_before |= residual > 0;
                }
                st.counters[e].record(residual, rounds);
            }
            st
        })
        .map(|st| st.counters)
        .reduce(
            || vec![Counters::new(); neps],
            |a, b| a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect(),
        );
    let trials = cfg.trials as f64;
    let points = cfg
        .epsilons
        .iter()
        .zip(totals)
        .map(|(&epsilon, c)| {
            let wer = c.word_errors as f64 / trials;
            let mean_res = c.residual as f64 / trials;
            let var_res = (c.residual_sq as f64 / trials - mean_res * mean_res).max(0.0);
            SimPoint {
                epsilon,
                trials: cfg.trials,
                word_errors: c.word_errors,
                wer,
                wer_ci95: 1.96 * (wer * (1.0 - wer) / trials).sqrt(),
                mean_residual_fraction: mean_res / cells as f64,
                residual_std_error: (var_res / trials).sqrt() / cells as f64,
                mean_rounds: c.rounds as f64 / trials,
                rounds_histogram: c.histogram,
                symbol_mismatches: c.symbol_mismatches,
            }
        })
        .collect();
    Ok(SimResult { points })
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FieldValidation {
    pub trials: u64,
    /// Trials in which symbol decoding completed.
    pub decoded: u64,
    /// Trials whose recovered positions differed from mask peeling.
    pub position_mismatches: u64,
    /// Trials with a recovered symbol different from the transmitted one.
    pub symbol_mismatches: u64,
    /// Trials whose round counts differed between the two decoders.
    pub round_mismatches: u64,
}

impl FieldValidation {
    pub fn mismatches(&self) -> u64 {
        self.position_mismatches + self.symbol_mismatches + self.round_mismatches
    }
}

/// Encodes random messages, erases each symbol with a per-trial probability
/// drawn from `[0.1, 0.7)`, and decodes both at symbol level and on the
/// mask alone.
pub fn field_level_validate(spec: &CodeSpec, trials: u64, seed: u64) -> Result<FieldValidation, SimError> {
    let (m, n) = (spec.m(), spec.n());
    if m.max(n) > FIELD_LEVEL_MAX_SIDE {
        return Err(SimError::TooLargeForFieldLevel { m, n, max: FIELD_LEVEL_MAX_SIDE });
    }
    let encoder = spec.encoder();
    let q = spec.field().order();
    let mut report = FieldValidation { trials, ..Default::default() };
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t);
        let eps = rng.gen_range(0.1..0.7);
        let msg: Vec<Elem> = (0..encoder.dimension()).map(|_| rng.gen_range(0..q)).collect();
        let cw = encoder.encode(&msg)?;
        let mask = ErasureMask::from_bits(m, n, (0..m * n).map(|_| rng.gen::<f64>() < eps).collect());
        let received: Vec<Option<Elem>> =
            (0..m * n).map(|idx| (!mask.bits[idx]).then(|| cw.get(idx / n, idx % n))).collect();
        let sym = encoder.code().iterative_decode(&received)?;
        let peel = peel_decode(spec, &mask);
        if sym.is_complete() {
            report.decoded += 1;
        }
        if sym.symbols.iter().zip(&peel.mask.bits).any(|(s, &erased)| s.is_none() != erased) {
            report.position_mismatches += 1;
        }
        if sym.symbols.iter().enumerate().any(|(idx, s)| s.is_some_and(|v| v != cw.get(idx / n, idx % n))) {
            report.symbol_mismatches += 1;
        }
        if sym.rounds != peel.rounds {
            report.round_mismatches += 1;
        }
    }
    Ok(report)
}

/// Smallest binary extension field with at least `max(m, n)` elements.
pub fn default_field(m: usize, n: usize) -> Result<Arc<Field>, GaloisError> {
    Ok(Arc::new(FieldConfig::smallest_binary(m.max(n)).build()?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeReport {
    pub m: usize,
    pub n: usize,
    pub dimension: usize,
    pub rate: f64,
    pub wer: f64,
    pub mean_residual_fraction: f64,
    pub residual_std_error: f64,
}

/// Designs `α` from `β` at `epsilon`, discretizes at each size (floors 1, no
/// boosts) and simulates the resulting codes at `epsilon − delta`.
pub fn asymptotic_validate(
    beta: &PiecewiseLinear<f64>,
    epsilon: f64,
    delta: f64,
    sizes: &[(usize, usize)],
    trials: u64,
    seed: u64,
) -> Result<Vec<SizeReport>, SimError> {
    let alpha = design_alpha_from_beta(beta, epsilon)?;
    validate_profiles(&alpha, beta, epsilon - delta, sizes, trials, seed)
}

/// Simulates the codes discretized from `(alpha, beta)` at each size on a
/// channel with erasure probability `channel`.
pub fn validate_profiles(
    alpha: &PiecewiseLinear<f64>,
    beta: &PiecewiseLinear<f64>,
    channel: f64,
    sizes: &[(usize, usize)],
    trials: u64,
    seed: u64,
) -> Result<Vec<SizeReport>, SimError> {
    let channel = channel.clamp(0.0, 1.0);
    sizes
        .iter()
        .map(|&(m, n)| {
            let (a, b) = discretize(alpha, beta, m, n, (1, 1), 0)?;
            let spec = CodeSpec::new(default_field(m, n)?, m, n, a, b)?;
            let res = run_sweep(&SimConfig::new(spec.clone(), vec![channel], trials, seed))?;
            let p = &res.points[0];
            Ok(SizeReport {
                m,
                n,
                dimension: spec.dimension(),
                rate: spec.rate(),
                wer: p.wer,
                mean_residual_fraction: p.mean_residual_fraction,
                residual_std_error: p.residual_std_error,
            })
        })
        .collect()
}

/// Search for an `m × n` profile pair of fixed dimension with the lowest
/// simulated word error count: random draws plus any `starts`, screened
/// briefly, then hill climbing over moves that keep the dimension.
#[derive(Debug, Clone)]
pub struct ProfileSearch {
    pub m: usize,
    pub n: usize,
    pub dimension: usize,
    /// Random profile pairs drawn.
    pub draws: usize,
    pub starts: Vec<(Vec<usize>, Vec<usize>)>,
    /// Hill-climbing iterations.
    pub climb_rounds: usize,
    /// Candidates kept between climbing rounds and for the final evaluation.
    pub finalists: usize,
    pub epsilons: Vec<f64>,
    pub screen_trials: u64,
    pub final_trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    /// Word errors summed over the search epsilons in the final evaluation.
    pub score: u64,
    /// Distinct profile pairs screened.
    pub candidates: usize,
}

type ProfilePair = (Vec<usize>, Vec<usize>);

fn random_profile(rng: &mut ChaCha8Rng, len: usize, max: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..len).map(|_| rng.gen_range(0..=max)).collect();
    v.sort_unstable();
    v
}

fn total_errors(spec: &CodeSpec, epsilons: &[f64], trials: u64, seed: u64) -> Result<u64, SimError> {
    let res = run_sweep(&SimConfig::new(spec.clone(), epsilons.to_vec(), trials, seed))?;
    Ok(res.points.iter().map(|p| p.word_errors).sum())
}

/// Every pair reachable by one or two unit changes to the entries of `a`
/// and `b` that keeps both non-decreasing and within range.
fn neighbours(m: usize, n: usize, (a, b): &ProfilePair) -> Vec<ProfilePair> {
    let single = |a: &[usize], b: &[usize]| -> Vec<ProfilePair> {
        let mut out = Vec::new();
        for idx in 0..m + n {
            for up in [false, true] {
                let (mut a2, mut b2) = (a.to_vec(), b.to_vec());
                let (seq, max) = if idx < m { (&mut a2, n) } else { (&mut b2, m) };
                let k = if idx < m { idx } else { idx - m };
                if up && seq[k] < max {
                    seq[k] += 1;
                } else if !up && seq[k] > 0 {
                    seq[k] -= 1;
                } else {
                    continue;
                }
                if seq.windows(2).all(|w| w[0] <= w[1]) {
                    out.push((a2, b2));
                }
            }
        }
        out
    };
    let mut out = Vec::new();
    for (a1, b1) in single(a, b) {
        out.extend(single(&a1, &b1));
        out.push((a1, b1));
    }
    out
}

pub fn search_fixed_dimension(field: Arc<Field>, cfg: &ProfileSearch) -> Result<Option<SearchOutcome>, SimError> {
    let spec_of = |(a, b): &ProfilePair| CodeSpec::new(field.clone(), cfg.m, cfg.n, a.clone(), b.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pool: std::collections::BTreeSet<ProfilePair> = std::collections::BTreeSet::new();
    for start in &cfg.starts {
        if spec_of(start)?.dimension() == cfg.dimension {
            pool.insert(start.clone());
        }
    }
    for _ in 0..cfg.draws {
        let pair = (random_profile(&mut rng, cfg.m, cfg.n), random_profile(&mut rng, cfg.n, cfg.m));
        if spec_of(&pair)?.dimension() == cfg.dimension {
            pool.insert(pair);
        }
    }
    let mut scores: std::collections::BTreeMap<ProfilePair, u64> = std::collections::BTreeMap::new();
    let mut fresh: Vec<ProfilePair> = pool.into_iter().collect();
    let keep = cfg.finalists.max(1);
    for round in 0..=cfg.climb_rounds {
        for pair in fresh.drain(..) {
            let score = total_errors(&spec_of(&pair)?, &cfg.epsilons, cfg.screen_trials, cfg.seed)?;
            scores.insert(pair, score);
        }
        if round == cfg.climb_rounds {
            break;
        }
        let mut ranked: Vec<(&u64, &ProfilePair)> = scores.iter().map(|(p, s)| (s, p)).collect();
        ranked.sort();
        let mut next = std::collections::BTreeSet::new();
        for (_, pair) in ranked.into_iter().take(keep) {
            for nb in neighbours(cfg.m, cfg.n, pair) {
                if !scores.contains_key(&nb) && spec_of(&nb)?.dimension() == cfg.dimension {
                    next.insert(nb);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        fresh = next.into_iter().collect();
    }
    let candidates = scores.len();
    let mut ranked: Vec<(u64, ProfilePair)> = scores.into_iter().map(|(p, s)| (s, p)).collect();
    ranked.sort();
    let mut best: Option<SearchOutcome> = None;
    for (_, pair) in ranked.into_iter().take(keep) {
        let score = total_errors(&spec_of(&pair)?, &cfg.epsilons, cfg.final_trials, cfg.seed ^ 0x5eed)?;
        if best.as_ref().is_none_or(|bst| score < bst.score) {
            best = Some(SearchOutcome { a: pair.0, b: pair.1, score, candidates });
        }
    }
    Ok(best)
}

/// Regular `(row_dim, col_dim)` pairs with `row_dim · col_dim ≤ max_dimension`
/// that are not dominated: for each row dimension, the largest column
/// dimension allowed.
pub fn regular_candidates(m: usize, n: usize, max_dimension: usize) -> Vec<(usize, usize)> {
    (1..=n)
        .filter_map(|ka| {
            let kb = (max_dimension / ka).min(m);
            (kb >= 1).then_some((ka, kb))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(m: usize, n: usize, a: Vec<usize>, b: Vec<usize>) -> CodeSpec {
        CodeSpec::new(default_field(m, n).unwrap(), m, n, a, b).unwrap()
    }

    fn regular(m: usize, n: usize, ka: usize, kb: usize) -> CodeSpec {
        spec(m, n, vec![ka; m], vec![kb; n])
    }

    fn mask_with(m: usize, n: usize, cells: &[(usize, usize)]) -> ErasureMask {
        let mut mask = ErasureMask::clear(m, n);
        for &(i, j) in cells {
            mask.set(i, j, true);
        }
        mask
    }

    #[test]
    fn peel_examples() {
        let s = regular(4, 4, 3, 2);
        let out = peel_decode(&s, &ErasureMask::clear(4, 4));
        assert_eq!((out.mask.is_clear(), out.rounds), (true, 0));

        let out = peel_decode(&s, &mask_with(4, 4, &[(2, 1)]));
        assert_eq!((out.mask.is_clear(), out.rounds), (true, 1));

        let block = mask_with(4, 4, &[(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3)]);
        let out = peel_decode(&s, &block);
        assert!(out.mask.is_clear());
        assert_eq!(out.rounds, 1);
        // Rows alone cannot help.
        let rows_only = regular(4, 4, 3, 4);
        let out = peel_decode(&rows_only, &block);
        assert_eq!(out.mask, block);
        assert_eq!(out.rounds, 0);
    }

    #[test]
    fn dimension_zero_rows_always_clear() {
        let s = spec(2, 3, vec![0, 3], vec![1, 1, 1]);
        let out = peel_decode(&s, &mask_with(2, 3, &[(0, 0), (0, 1), (0, 2)]));
        assert!(out.mask.is_clear());
    }

    #[test]
    fn stopping_set_survives() {
        let s = regular(4, 4, 3, 3);
        let block = mask_with(4, 4, &[(0, 0), (0, 1), (1, 0), (1, 1)]);
        let out = peel_decode(&s, &block);
        assert_eq!(out.mask.count(), 4);
        assert!(out.mask.is_stopping_for(&s));
    }

    #[test]
    fn sweep_extremes() {
        let s = regular(8, 8, 6, 6);
        let res = run_sweep(&SimConfig::new(s, vec![0.0, 0.99], 100, 1)).unwrap();
        assert_eq!(res.points[0].word_errors, 0);
        assert_eq!(res.points[0].mean_rounds, 0.0);
        assert_eq!(res.points[1].word_errors, 100);
        assert!(res.points[1].mean_residual_fraction > 0.9);
    }

    #[test]
    fn sweep_validation() {
        let s = regular(4, 4, 3, 3);
        assert!(matches!(run_sweep(&SimConfig::new(s.clone(), vec![0.1], 0, 1)), Err(SimError::NoTrials)));
        assert!(matches!(run_sweep(&SimConfig::new(s.clone(), vec![0.3, 0.2], 5, 1)), Err(SimError::Unsorted)));
        assert!(matches!(run_sweep(&SimConfig::new(s.clone(), vec![1.5], 5, 1)), Err(SimError::Epsilon(_))));
        assert!(matches!(run_sweep(&SimConfig::new(s, vec![], 5, 1)), Err(SimError::NoEpsilons)));
    }

    #[test]
    fn sweep_is_deterministic_and_monotone() {
        let s = spec(10, 12, vec![6, 7, 8, 9, 9, 10, 10, 11, 11, 12], vec![5, 6, 6, 7, 7, 8, 8, 8, 9, 9, 10, 10]);
        let eps: Vec<f64> = (1..=12).map(|i| i as f64 * 0.04).collect();
        let cfg = SimConfig::new(s, eps, 2000, 99);
        let r1 = run_sweep(&cfg).unwrap();
        let r2 = run_sweep(&cfg).unwrap();
        assert_eq!(r1.to_csv(), r2.to_csv());
        assert!(r1.points.windows(2).all(|w| w[0].word_errors <= w[1].word_errors));
        let hist_total: u64 = r1.points[3].rounds_histogram.iter().sum();
        assert_eq!(hist_total, 2000);
    }

    #[test]
    fn uncoupled_sweep_differs_but_is_deterministic() {
        let s = regular(6, 6, 4, 4);
        let mut cfg = SimConfig::new(s, vec![0.2, 0.3], 500, 5);
        cfg.couple = false;
        assert_eq!(run_sweep(&cfg).unwrap(), run_sweep(&cfg).unwrap());
    }

    #[test]
    fn field_level_mode_matches_mask_mode() {
        let s = spec(5, 6, vec![2, 3, 4, 5, 6], vec![1, 2, 3, 4, 4, 5]);
        let eps = vec![0.1, 0.25, 0.4];
        let mask = run_sweep(&SimConfig::new(s.clone(), eps.clone(), 300, 8)).unwrap();
        let mut cfg = SimConfig::new(s, eps, 300, 8);
        cfg.mode = SimMode::FieldLevel;
        let field = run_sweep(&cfg).unwrap();
        assert_eq!(mask.to_csv(), field.to_csv());
        assert!(field.points.iter().all(|p| p.symbol_mismatches == 0));
    }

    #[test]
    fn field_level_validation_small() {
        let s = regular(4, 4, 3, 2);
        let rep = field_level_validate(&s, 200, 3).unwrap();
        assert_eq!(rep.mismatches(), 0);
        assert!(rep.decoded > 0 && rep.decoded < 200);
    }

    #[test]
    fn csv_format() {
        let s = regular(4, 4, 3, 3);
        let res = run_sweep(&SimConfig::new(s, vec![0.0, 0.125], 10, 1)).unwrap();
        let csv = res.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next(), Some("0,10,0,0.00000000,0.00000000,0.00000000,0.000000"));
        assert!(lines.next().unwrap().starts_with("0.125,10,"));
        assert_eq!(format_trimmed(0.2, 10), "0.2");
        assert_eq!(format_trimmed(3.0, 4), "3");
    }

    #[test]
    fn regular_candidate_list() {
        let c = regular_candidates(50, 50, 1710);
        assert!(c.contains(&(41, 41)));
        assert!(c.contains(&(38, 45)));
        assert!(c.iter().all(|&(x, y)| x * y <= 1710 && (y == 50 || x * (y + 1) > 1710)));
    }

    #[test]
    fn search_finds_requested_dimension() {
        let cfg = ProfileSearch {
            m: 5,
            n: 5,
            dimension: 9,
            draws: 2000,
            starts: vec![(vec![3; 5], vec![3; 5])],
            climb_rounds: 2,
            finalists: 3,
            epsilons: vec![0.2, 0.3],
            screen_trials: 100,
            final_trials: 300,
            seed: 4,
        };
        let out = search_fixed_dimension(default_field(5, 5).unwrap(), &cfg).unwrap().unwrap();
        let s = spec(5, 5, out.a, out.b);
        assert_eq!(s.dimension(), 9);
        assert!(out.candidates > 1);
    }

    fn arb_spec_and_mask() -> impl Strategy<Value = (CodeSpec, ErasureMask)> {
        (1usize..=7, 1usize..=7)
            .prop_flat_map(|(m, n)| {
                (
                    proptest::collection::vec(0..=n, m),
                    proptest::collection::vec(0..=m, n),
                    proptest::collection::vec(any::<bool>(), m * n),
                    Just((m, n)),
                )
            })
            .prop_map(|(mut a, mut b, bits, (m, n))| {
                a.sort_unstable();
                b.sort_unstable();
                (spec(m, n, a, b), ErasureMask::from_bits(m, n, bits))
            })
    }

    proptest! {
        #[test]
        fn peeling_is_confluent((s, mask) in arb_spec_and_mask()) {
            let a = peel_decode_with(&s, &mask, PeelOrder::RowsFirst);
            let b = peel_decode_with(&s, &mask, PeelOrder::ColumnsFirst);
            prop_assert_eq!(&a.mask, &b.mask);
            prop_assert!(a.mask.is_stopping_for(&s));
            prop_assert!(a.mask.bits().iter().zip(mask.bits()).all(|(&r, &o)| !r || o));
        }
    }
}
