//! Stationary discrete-alphabet arm processes with certified mixing profiles.
//!
//! Every arm draws from a ChaCha stream positioned by its clock: symbol
//! `t` consumes a fixed number of words, so skipping and emitting consume
//! randomness identically and replays are bit-exact.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

use crate::error::{invalid, Error, Result};
use crate::mixing::MixingProfile;

const WORDS_PER_SYMBOL: u128 = 4;
const ROW_SUM_TOL: f64 = 1e-12;
const STATIONARY_TOL: f64 = 1e-12;
const MAX_POWER_ITERATIONS: usize = 1_000_000;

/// Ordered reward levels in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Alphabet(Vec<f64>);

impl Alphabet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(invalid("alphabet needs at least two values"));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(invalid("alphabet values must lie in [0, 1]"));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("alphabet values must be strictly increasing"));
        }
        Ok(Alphabet(values))
    }

    /// The two-letter alphabet `{0, 1}`.
    pub fn binary() -> Self {
        Alphabet(vec![0.0, 1.0])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn value(&self, index: usize) -> f64 {
        self.0[index]
    }
}

impl TryFrom<Vec<f64>> for Alphabet {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Alphabet::new(values)
    }
}

impl From<Alphabet> for Vec<f64> {
    fn from(a: Alphabet) -> Self {
        a.0
    }
}

/// Serializable description of an arm.
///
/// `seed` is a per-arm salt mixed with the run seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ArmSpec {
    Iid {
        alphabet: Vec<f64>,
        probs: Vec<f64>,
        #[serde(default)]
        seed: u64,
    },
    Markov {
        alphabet: Vec<f64>,
        matrix: Vec<Vec<f64>>,
        #[serde(default)]
        seed: u64,
    },
    /// `X_t` copies the innovation `J_t` steps back, where `J_t = 0` with
    /// probability `1 − persistence` and is uniform on `1..=order` otherwise.
    FiniteRange {
        alphabet: Vec<f64>,
        probs: Vec<f64>,
        order: u64,
        persistence: f64,
        #[serde(default)]
        seed: u64,
    },
}

impl ArmSpec {
    pub fn bernoulli(p: f64) -> Self {
        ArmSpec::Iid {
            alphabet: vec![0.0, 1.0],
            probs: vec![1.0 - p, p],
            seed: 0,
        }
    }

    pub fn salt(&self) -> u64 {
        match self {
            ArmSpec::Iid { seed, .. } | ArmSpec::Markov { seed, .. } | ArmSpec::FiniteRange { seed, .. } => {
                *seed
            }
        }
    }

    /// Builds the arm, validating the spec and certifying its profile.
    pub fn build(&self, seed: u64) -> Result<ArmProcess> {
        let seed = seed ^ self.salt().wrapping_mul(0x9E37_79B9_7F4A_7C15);
        match self {
            ArmSpec::Iid { alphabet, probs, .. } => {
                make_iid_arm(Alphabet::new(alphabet.clone())?, probs.clone(), seed)
            }
            ArmSpec::Markov { alphabet, matrix, .. } => {
                make_markov_arm(matrix.clone(), Alphabet::new(alphabet.clone())?, seed)
            }
            ArmSpec::FiniteRange {
                alphabet,
                probs,
                order,
                persistence,
                ..
            } => make_finite_range_arm(
                Alphabet::new(alphabet.clone())?,
                probs.clone(),
                *order,
                *persistence,
                seed,
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Kernel {
    Iid {
        probs: Vec<f64>,
    },
    Markov {
        matrix: Vec<Vec<f64>>,
        stationary: Vec<f64>,
    },
    FiniteRange {
        probs: Vec<f64>,
        order: usize,
        persistence: f64,
    },
}

#[derive(Debug, Clone)]
enum KernelState {
    Iid,
    Markov { last: Option<usize> },
    FiniteRange { innovations: VecDeque<usize> },
}

/// A stationary stochastic process over a finite alphabet.
#[derive(Debug, Clone)]
pub struct ArmProcess {
    alphabet: Alphabet,
    kernel: Kernel,
    profile: MixingProfile,
    seed: u64,
    clock: u64,
    rng: ChaCha8Rng,
    // Cumulative tables: `cdfs[0]` is the initial/innovation law, Markov rows follow.
    cdfs: Vec<Vec<f64>>,
    state: KernelState,
}

fn validate_probs(probs: &[f64], len: usize, what: &str) -> Result<()> {
    if probs.len() != len {
        return Err(invalid(format!("{what} has {} entries, alphabet has {len}", probs.len())));
    }
    if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(invalid(format!("{what} has a negative or non-finite entry")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > ROW_SUM_TOL {
        return Err(invalid(format!("{what} sums to {total}, not 1")));
    }
    Ok(())
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    probs
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}

fn sample_index(cdf: &[f64], u: f64) -> usize {
    cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1)
}

fn unit_f64(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn make_iid_arm(alphabet: Alphabet, probs: Vec<f64>, seed: u64) -> Result<ArmProcess> {
    validate_probs(&probs, alphabet.len(), "iid distribution")?;
    let cdfs = vec![cumulative(&probs)];
    Ok(ArmProcess::assemble(
        alphabet,
        Kernel::Iid { probs },
        MixingProfile::Zero,
        cdfs,
        seed,
    ))
}

pub fn make_finite_range_arm(
    alphabet: Alphabet,
    probs: Vec<f64>,
    order: u64,
    persistence: f64,
    seed: u64,
) -> Result<ArmProcess> {
    validate_probs(&probs, alphabet.len(), "innovation distribution")?;
    if order == 0 {
        return Err(invalid("finite-range arm needs order >= 1"));
    }
    if !(0.0..=1.0).contains(&persistence) {
        return Err(invalid(format!("persistence {persistence} not in [0, 1]")));
    }
    let cdfs = vec![cumulative(&probs)];
    Ok(ArmProcess::assemble(
        alphabet,
        Kernel::FiniteRange {
            probs,
            order: order as usize,
            persistence,
        },
        MixingProfile::finite_range(order, 1.0)?,
        cdfs,
        seed,
    ))
}

/// Builds a stationary Markov arm started from its invariant law, certified
/// with the Doeblin bound φ(n) ≤ (1 − δ)ⁿ.
pub fn make_markov_arm(matrix: Vec<Vec<f64>>, alphabet: Alphabet, seed: u64) -> Result<ArmProcess> {
    let d = alphabet.len();
    if matrix.len() != d {
        return Err(invalid(format!("transition matrix has {} rows, alphabet has {d}", matrix.len())));
    }
    for (i, row) in matrix.iter().enumerate() {
        validate_probs(row, d, &format!("transition row {i}"))?;
    }
    if !is_primitive(&matrix) {
        return Err(Error::Certification(
            "chain is reducible or periodic (no strictly positive power)".into(),
        ));
    }
    let delta = doeblin_coefficient(&matrix);
    if !(delta > 0.0) {
        return Err(Error::Certification(
            "Doeblin coefficient is 0; geometric certificate would not be summable".into(),
        ));
    }
    let stationary = stationary_distribution(&matrix)?;
    let mut cdfs = vec![cumulative(&stationary)];
    cdfs.extend(matrix.iter().map(|row| cumulative(row)));
    let rho = (1.0 - delta).max(0.0);
    Ok(ArmProcess::assemble(
        alphabet,
        Kernel::Markov { matrix, stationary },
        MixingProfile::geometric(1.0, rho)?,
        cdfs,
        seed,
    ))
}

/// δ = min over row pairs (i, j) of Σ_u min(P_iu, P_ju).
pub fn doeblin_coefficient(matrix: &[Vec<f64>]) -> f64 {
    let mut delta: f64 = 1.0;
    for i in 0..matrix.len() {
        for j in (i + 1)..matrix.len() {
            let overlap: f64 = matrix[i].iter().zip(&matrix[j]).map(|(a, b)| a.min(*b)).sum();
            delta = delta.min(overlap);
        }
    }
    delta
}

/// True iff some power `P^n`, `n ≤ d²`, is strictly positive.
pub fn is_primitive(matrix: &[Vec<f64>]) -> bool {
    let d = matrix.len();
    let base: Vec<Vec<bool>> = matrix.iter().map(|r| r.iter().map(|&p| p > 0.0).collect()).collect();
    let mut power = base.clone();
    for _ in 0..(d * d) {
        if power.iter().all(|r| r.iter().all(|&x| x)) {
            return true;
        }
        let mut next = vec![vec![false; d]; d];
        for i in 0..d {
            for k in 0..d {
                if power[i][k] {
                    for j in 0..d {
                        next[i][j] |= base[k][j];
                    }
                }
            }
        }
        power = next;
    }
    false
}

/// Invariant law by power iteration from the uniform distribution.
pub fn stationary_distribution(matrix: &[Vec<f64>]) -> Result<Vec<f64>> {
    let d = matrix.len();
    let mut pi = vec![1.0 / d as f64; d];
    for _ in 0..MAX_POWER_ITERATIONS {
        let next = step_distribution(&pi, matrix);
        let residual: f64 = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        pi = next;
        if residual <= STATIONARY_TOL {
            let total: f64 = pi.iter().sum();
            pi.iter_mut().for_each(|p| *p /= total);
            return Ok(pi);
        }
    }
    Err(Error::Certification("power iteration did not converge".into()))
}

pub(crate) fn step_distribution(dist: &[f64], matrix: &[Vec<f64>]) -> Vec<f64> {
    let d = dist.len();
    let mut next = vec![0.0; d];
    for (i, &w) in dist.iter().enumerate() {
        for (j, slot) in next.iter_mut().enumerate() {
            *slot += w * matrix[i][j];
        }
    }
    next
}

impl ArmProcess {
    fn assemble(
        alphabet: Alphabet,
        kernel: Kernel,
        profile: MixingProfile,
        cdfs: Vec<Vec<f64>>,
        seed: u64,
    ) -> Self {
        let state = match &kernel {
            Kernel::Iid { .. } => KernelState::Iid,
            Kernel::Markov { .. } => KernelState::Markov { last: None },
            Kernel::FiniteRange { .. } => KernelState::FiniteRange {
                innovations: VecDeque::new(),
            },
        };
        let mut arm = ArmProcess {
            alphabet,
            kernel,
            profile,
            seed,
            clock: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            cdfs,
            state,
        };
        arm.prefill();
        arm
    }

    // Finite-range arms need the `order` innovations preceding X_1.
    fn prefill(&mut self) {
        if let Kernel::FiniteRange { order, .. } = self.kernel {
            let mut buf = VecDeque::with_capacity(order + 1);
            for _ in 0..order {
                let (u, _) = self.draw_pair();
                buf.push_back(sample_index(&self.cdfs[0], u));
            }
            self.state = KernelState::FiniteRange { innovations: buf };
        }
    }

    /// Same process and parameters, fresh stream from `seed`, clock reset.
    pub fn with_seed(&self, seed: u64) -> ArmProcess {
        let state = match self.state {
            KernelState::Iid => KernelState::Iid,
            KernelState::Markov { .. } => KernelState::Markov { last: None },
            KernelState::FiniteRange { .. } => KernelState::FiniteRange {
                innovations: VecDeque::new(),
            },
        };
        let mut arm = ArmProcess {
            alphabet: self.alphabet.clone(),
            kernel: self.kernel.clone(),
            profile: self.profile.clone(),
            seed,
            clock: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            cdfs: self.cdfs.clone(),
            state,
        };
        arm.prefill();
        arm
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn profile(&self) -> &MixingProfile {
        &self.profile
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of symbols emitted or skipped so far.
    pub fn clock(&self) -> u64 {
        self.clock
    }

    /// Marginal law of a single symbol.
    pub fn marginal(&self) -> &[f64] {
        match &self.kernel {
            Kernel::Iid { probs } | Kernel::FiniteRange { probs, .. } => probs,
            Kernel::Markov { stationary, .. } => stationary,
        }
    }

    fn draw_pair(&mut self) -> (f64, f64) {
        let a = unit_f64(self.rng.next_u64());
        let b = unit_f64(self.rng.next_u64());
        (a, b)
    }

    /// Emits the next symbol as an alphabet index.
    pub fn next_index(&mut self) -> usize {
        let (u, v) = self.draw_pair();
        self.clock += 1;
        match (&self.kernel, &mut self.state) {
            (Kernel::Iid { .. }, _) => sample_index(&self.cdfs[0], u),
            (Kernel::Markov { .. }, KernelState::Markov { last }) => {
                let row = match *last {
                    None => 0,
                    Some(prev) => prev + 1,
                };
                let x = sample_index(&self.cdfs[row], u);
                *last = Some(x);
                x
            }
            (
                Kernel::FiniteRange {
                    order, persistence, ..
                },
                KernelState::FiniteRange { innovations },
            ) => {
                innovations.push_back(sample_index(&self.cdfs[0], u));
                let lag = if v < *persistence {
                    (1 + (v / persistence * *order as f64) as usize).min(*order)
                } else {
                    0
                };
                let x = innovations[innovations.len() - 1 - lag];
                innovations.pop_front();
                x
            }
            _ => unreachable!("kernel and state always match"),
        }
    }

    /// Emits `n` symbols, returning their alphabet values.
    pub fn emit(&mut self, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n);
        self.emit_into(n, &mut out);
        out
    }

    /// Appends `n` emitted values to `out`.
    pub fn emit_into(&mut self, n: usize, out: &mut Vec<f64>) {
        for _ in 0..n {
            let i = self.next_index();
            out.push(self.alphabet.value(i));
        }
    }

    /// Advances the clock by `n` without returning symbols. The stream
    /// afterwards is identical to emitting `n` symbols and discarding them.
    pub fn skip(&mut self, n: u64) {
        if n == 0 {
            return;
        }
        match self.kernel {
            Kernel::Iid { .. } => {
                let pos = self.rng.get_word_pos() + WORDS_PER_SYMBOL * n as u128;
                self.rng.set_word_pos(pos);
                self.clock += n;
            }
            _ => {
                for _ in 0..n {
                    self.next_index();
                }
            }
        }
    }
}

/// Single-symbol estimate of φ(n) with its statistical slack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiEstimate {
    pub lag: u64,
    pub value: f64,
    pub slack: f64,
    /// Set when some conditioning symbol was too rare for the nominal slack.
    pub flagged: bool,
}

/// Seed of the `i`-th independent trajectory derived from `base`.
pub fn trajectory_seed(base: u64, i: u64) -> u64 {
    base.wrapping_add(i.wrapping_mul(0x9E37_79B9_7F4A_7C15)).rotate_left(17) ^ i
}

/// Estimates φ(n) for `n = 1..=max_lag` from `samples` independent
/// stationary trajectories.
///
/// For every lag the estimate is `max_{a,b} |P̂[X_{1+n}=a | X_1=b] − P̂[X_{1+n}=a]|`,
/// a lower bound on φ(n) restricted to single-symbol events.
pub fn empirical_phi_profile(arm: &ArmProcess, max_lag: u64, samples: u64, seed: u64) -> Vec<PhiEstimate> {
    let d = arm.alphabet().len();
    let lags = max_lag as usize;
    // counts[lag][b][a]
    let counts = (0..samples)
        .into_par_iter()
        .fold(
            || vec![vec![vec![0u64; d]; d]; lags],
            |mut acc, i| {
                let mut traj = arm.with_seed(trajectory_seed(seed, i));
                let first = traj.next_index();
                for table in acc.iter_mut() {
                    let x = traj.next_index();
                    table[first][x] += 1;
                }
                acc
            },
        )
        .reduce(
            || vec![vec![vec![0u64; d]; d]; lags],
            |mut a, b| {
                for (la, lb) in a.iter_mut().zip(b) {
                    for (ra, rb) in la.iter_mut().zip(lb) {
                        for (x, y) in ra.iter_mut().zip(rb) {
                            *x += y;
                        }
                    }
                }
                a
            },
        );
    counts
        .iter()
        .enumerate()
        .map(|(lag, table)| phi_from_table(lag as u64 + 1, table, samples))
        .collect()
}

/// Estimate of φ(n) for a single lag.
pub fn empirical_phi(arm: &ArmProcess, n: u64, samples: u64, seed: u64) -> PhiEstimate {
    empirical_phi_profile(arm, n, samples, seed)[n as usize - 1]
}

/// Gap statistic from a joint count table `table[b][a]` of (earlier, later) symbols.
pub fn phi_from_table(lag: u64, table: &[Vec<u64>], samples: u64) -> PhiEstimate {
    let d = table.len();
    let total = samples as f64;
    let nominal = 5.0 / total.sqrt();
    let mut marginal = vec![0.0; d];
    for row in table {
        for (a, &c) in row.iter().enumerate() {
            marginal[a] += c as f64 / total;
        }
    }
    let mut value: f64 = 0.0;
    let mut min_count = u64::MAX;
    let mut flagged = false;
    for row in table {
        let row_total: u64 = row.iter().sum();
        if row_total == 0 {
            flagged = true;
            continue;
        }
        min_count = min_count.min(row_total);
        for (a, &c) in row.iter().enumerate() {
            value = value.max((c as f64 / row_total as f64 - marginal[a]).abs());
        }
    }
    let mut slack = nominal;
    if min_count != u64::MAX {
        let widened = 2.5 / (min_count as f64).sqrt();
        if widened > nominal {
            slack = widened;
            flagged = true;
        }
    }
    PhiEstimate {
        lag,
        value,
        slack,
        flagged,
    }
}

/// Counts of the symbol at position `position` (1-based) over independent
/// stationary trajectories.
pub fn marginal_counts(arm: &ArmProcess, position: u64, trajectories: u64, seed: u64) -> Vec<u64> {
    let d = arm.alphabet().len();
    (0..trajectories)
        .into_par_iter()
        .fold(
            || vec![0u64; d],
            |mut acc, i| {
                let mut traj = arm.with_seed(trajectory_seed(seed, i));
                traj.skip(position - 1);
                acc[traj.next_index()] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; d],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}
