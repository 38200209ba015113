//! Mixing-coefficient profiles and the quantities derived from them.
//!
//! A [`MixingProfile`] is a certified upper bound `n ↦ φ(n)` on the
//! φ-mixing coefficients of an arm. Everything the policies need from the
//! dependence structure flows through this module:
//!
//! ```text
//! Λ(t)  = 1 + 2 Σ_{r=1..t} φ(r·b + (r−1)·m)      fixed-block confidence inflation
//! M(b)  = 1 + Σ_{i≥1} φ(b·(i+1))                  combination normaliser
//! 𝓜(b)  = 1 + Σ_{i≥b} φ(i)                        restless normaliser
//! ```
//!
//! φ is only defined for positive separations; every argument is clamped to
//! `max(n, 1)` before evaluation.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

mod zeta;

pub(crate) use zeta::hurwitz_zeta;

/// Largest admissible `u` when solving the `u_k` equation.
pub const DEFAULT_U_MAX: f64 = 1e8;

/// Certified upper bound on the φ-mixing coefficients of a process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MixingProfile {
    /// Independent process: φ ≡ 0.
    Zero,
    /// φ(n) = cap for n ≤ range, 0 afterwards.
    FiniteRange { range: u64, cap: f64 },
    /// φ(n) = min(1, c·ρⁿ).
    Geometric { c: f64, rho: f64 },
    /// φ(n) = min(1, φ₀·n^(−p)).
    Algebraic { phi0: f64, p: f64 },
    /// φ(n) = values[n−1], and 0 past the end of the table.
    Tabulated { values: Vec<f64> },
}

impl MixingProfile {
    pub fn finite_range(range: u64, cap: f64) -> Result<Self> {
        let p = MixingProfile::FiniteRange { range, cap };
        p.validate()?;
        Ok(p)
    }

    pub fn geometric(c: f64, rho: f64) -> Result<Self> {
        let p = MixingProfile::Geometric { c, rho };
        p.validate()?;
        Ok(p)
    }

    pub fn algebraic(phi0: f64, p: f64) -> Result<Self> {
        let prof = MixingProfile::Algebraic { phi0, p };
        prof.validate()?;
        Ok(prof)
    }

    pub fn tabulated(values: Vec<f64>) -> Result<Self> {
        let p = MixingProfile::Tabulated { values };
        p.validate()?;
        Ok(p)
    }

    /// Checks parameter ranges.
    ///
    /// Geometric profiles accept ρ = 1 and algebraic profiles accept
    /// p ∈ (0, 1]: both are legal descriptions of a non-summable process
    /// and are rejected later by the operations that need summability.
    pub fn validate(&self) -> Result<()> {
        match self {
            MixingProfile::Zero => Ok(()),
            MixingProfile::FiniteRange { range, cap } => {
                if *range == 0 {
                    return Err(invalid("finite-range profile needs range >= 1"));
                }
                if !(*cap > 0.0 && *cap <= 1.0) {
                    return Err(invalid(format!("finite-range cap {cap} not in (0, 1]")));
                }
                Ok(())
            }
            MixingProfile::Geometric { c, rho } => {
                if !(c.is_finite() && *c >= 0.0) {
                    return Err(invalid(format!("geometric constant {c} must be >= 0")));
                }
                if !(*rho >= 0.0 && *rho <= 1.0) {
                    return Err(invalid(format!("geometric rate {rho} not in [0, 1]")));
                }
                Ok(())
            }
            MixingProfile::Algebraic { phi0, p } => {
                if !(phi0.is_finite() && *phi0 > 0.0) {
                    return Err(invalid(format!("algebraic phi0 {phi0} must be > 0")));
                }
                if !(p.is_finite() && *p > 0.0) {
                    return Err(invalid(format!("algebraic exponent {p} must be > 0")));
                }
                Ok(())
            }
            MixingProfile::Tabulated { values } => {
                let mut prev = 1.0;
                for (i, &v) in values.iter().enumerate() {
                    if !(0.0..=1.0).contains(&v) {
                        return Err(invalid(format!("tabulated phi({}) = {v} not in [0, 1]", i + 1)));
                    }
                    if v > prev {
                        return Err(invalid(format!("tabulated phi increases at n = {}", i + 1)));
                    }
                    prev = v;
                }
                Ok(())
            }
        }
    }

    /// φ(n), with `n` clamped to at least 1.
    pub fn phi(&self, n: u64) -> f64 {
        let n = n.max(1);
        match self {
            MixingProfile::Zero => 0.0,
            MixingProfile::FiniteRange { range, cap } => {
                if n <= *range {
                    cap.min(1.0)
                } else {
                    0.0
                }
            }
            MixingProfile::Geometric { c, rho } => (c * rho.powf(n as f64)).min(1.0),
            MixingProfile::Algebraic { phi0, p } => (phi0 * (n as f64).powf(-p)).min(1.0),
            MixingProfile::Tabulated { values } => {
                values.get((n - 1) as usize).copied().unwrap_or(0.0)
            }
        }
    }

    /// True iff Σₙ φ(n) < ∞.
    pub fn is_summable(&self) -> bool {
        match self {
            MixingProfile::Geometric { c, rho } => *c == 0.0 || *rho < 1.0,
            MixingProfile::Algebraic { p, .. } => *p > 1.0,
            _ => true,
        }
    }

    /// Σ_{j≥0} φ(first + j·stride) for `first, stride ≥ 1`.
    ///
    /// Geometric and algebraic tails use closed forms (the latter through the
    /// Hurwitz zeta function); finite kinds are summed exactly.
    pub fn strided_tail(&self, first: u64, stride: u64) -> Result<f64> {
        assert!(first >= 1 && stride >= 1, "strided_tail needs first, stride >= 1");
        if !self.is_summable() {
            return Err(Error::NonSummable);
        }
        let sum = match self {
            MixingProfile::Zero => 0.0,
            MixingProfile::FiniteRange { range, .. } => {
                if first > *range {
                    0.0
                } else {
                    let count = (range - first) / stride + 1;
                    count as f64 * self.phi(first)
                }
            }
            MixingProfile::Tabulated { values } => {
                let len = values.len() as u64;
                let mut sum = 0.0;
                let mut n = first;
                while n <= len {
                    sum += values[(n - 1) as usize];
                    n += stride;
                }
                sum
            }
            MixingProfile::Geometric { c, rho } => {
                // Terms clipped at 1 are summed one by one; the rest is a
                // geometric series.
                let mut sum = 0.0;
                let mut n = first;
                while c * rho.powf(n as f64) > 1.0 {
                    sum += 1.0;
                    n += stride;
                }
                let ratio = rho.powf(stride as f64);
                sum + c * rho.powf(n as f64) / (1.0 - ratio)
            }
            MixingProfile::Algebraic { phi0, p } => {
                let mut sum = 0.0;
                let mut n = first;
                while phi0 * (n as f64).powf(-p) > 1.0 {
                    sum += 1.0;
                    n += stride;
                }
                // Σ_j φ₀ (n + j·stride)^(−p) = φ₀ stride^(−p) ζ(p, n/stride)
                let stride_f = stride as f64;
                sum + phi0 * stride_f.powf(-p) * hurwitz_zeta(*p, n as f64 / stride_f)
            }
        };
        Ok(sum)
    }
}

/// Fixed-block geometry: `m` informative pulls followed by `b` ignored ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockGeometry {
    pub m: u64,
    pub b: u64,
}

impl BlockGeometry {
    pub fn new(m: u64, b: u64) -> Result<Self> {
        if m == 0 {
            return Err(invalid("block geometry needs m >= 1"));
        }
        Ok(BlockGeometry { m, b })
    }

    /// Full block length `s = m + b`.
    pub fn s(&self) -> u64 {
        self.m + self.b
    }
}

/// One way of splitting `s` pulls into `beta` repetitions of `(m, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Combination {
    pub m: u64,
    pub b: u64,
    pub beta: u64,
}

impl Combination {
    pub fn period(&self) -> u64 {
        self.m + self.b
    }
}

/// All `(m, b)` with `m ≥ 1`, `b ≥ 0` and `(m + b) | s`, ordered by `(b, m)`.
pub fn combinations(s: u64) -> Vec<Combination> {
    assert!(s >= 1, "combinations needs s >= 1");
    let mut out = Vec::new();
    for b in 0..s {
        for m in 1..=(s - b) {
            if s.is_multiple_of(m + b) {
                out.push(Combination {
                    m,
                    b,
                    beta: s / (m + b),
                });
            }
        }
    }
    out
}

/// Running value of Λ(t) for one profile and geometry.
///
/// Summation order is fixed (r = 1, 2, …), so incremental use and
/// [`lambda_sum`] agree bit for bit.
#[derive(Debug, Clone)]
pub struct LambdaAccumulator {
    profile: MixingProfile,
    geometry: BlockGeometry,
    terms: u64,
    sum: f64,
    exhausted: bool,
}

impl LambdaAccumulator {
    pub fn new(profile: MixingProfile, geometry: BlockGeometry) -> Self {
        LambdaAccumulator {
            profile,
            geometry,
            terms: 0,
            sum: 0.0,
            exhausted: false,
        }
    }

    /// Number of summands included so far.
    pub fn terms(&self) -> u64 {
        self.terms
    }

    /// Extends the sum up to `t` terms; never shrinks it.
    pub fn advance_to(&mut self, t: u64) {
        if self.exhausted {
            self.terms = self.terms.max(t);
            return;
        }
        while self.terms < t {
            self.terms += 1;
            let v = self
                .profile
                .phi(kappa_map(self.geometry.m, self.geometry.b, self.terms));
            if v == 0.0 {
                // φ is nonincreasing and κ is increasing: every later term is 0.
                self.exhausted = true;
                self.terms = t;
                break;
            }
            self.sum += v;
        }
    }

    pub fn value(&self) -> f64 {
        1.0 + 2.0 * self.sum
    }
}

/// Λ(t) = 1 + 2·Σ_{r=1..t} φ(r·b + (r−1)·m), by direct summation.
pub fn lambda_sum(profile: &MixingProfile, geometry: BlockGeometry, t: u64) -> f64 {
    let mut acc = LambdaAccumulator::new(profile.clone(), geometry);
    acc.advance_to(t);
    acc.value()
}

/// Closed-form upper bound on Λ(τ) for φ(n) = φ₀·n^(−p).
pub fn algebraic_lambda_bound(phi0: f64, p: f64, geometry: BlockGeometry, tau: u64) -> Result<f64> {
    if geometry.b == 0 {
        return Err(invalid("algebraic Λ bound diverges for b = 0"));
    }
    if !(p > 1.0) {
        return Err(invalid(format!("algebraic Λ bound needs p > 1, got {p}")));
    }
    if !(phi0 >= 0.0) {
        return Err(invalid(format!("algebraic Λ bound needs phi0 >= 0, got {phi0}")));
    }
    if tau == 0 {
        return Err(invalid("algebraic Λ bound needs tau >= 1"));
    }
    let s = geometry.s() as f64;
    let m = geometry.m as f64;
    let b = geometry.b as f64;
    let head = b.powf(1.0 - p);
    let tail = (tau as f64 * s - m).powf(1.0 - p);
    Ok(1.0 + 2.0 * phi0 + 2.0 * phi0 / (s * (p - 1.0)) * (head - tail))
}

/// M(b) = 1 + Σ_{i≥1} φ(b·(i+1)); `b = 0` is evaluated as `b = 1`.
pub fn m_sum(profile: &MixingProfile, b: u64) -> Result<f64> {
    let b = b.max(1);
    Ok(1.0 + profile.strided_tail(2 * b, b)?)
}

/// 𝓜(b) = 1 + Σ_{i≥b} φ(i); `b = 0` is evaluated as `b = 1`.
pub fn restless_m_sum(profile: &MixingProfile, b: u64) -> Result<f64> {
    let b = b.max(1);
    Ok(1.0 + profile.strided_tail(b, 1)?)
}

/// Raw-stream index of the `t`-th retained observation when every block of
/// `m` kept pulls is followed by `b` ignored ones.
pub fn rested_skip_map(m: u64, b: u64, t: u64) -> u64 {
    assert!(m >= 1 && t >= 1, "rested_skip_map needs m, t >= 1");
    t + b * ((t - 1) / m)
}

/// Restless index map: the first `m` indices are kept as is, later ones are
/// shifted once by `b`.
pub fn restless_skip_map(m: u64, b: u64, t: u64) -> u64 {
    assert!(m >= 1 && t >= 1, "restless_skip_map needs m, t >= 1");
    if t > m {
        t + b
    } else {
        t
    }
}

/// κ(q) = q·b + (q−1)·m: separation between block 0 and block q.
pub fn kappa_map(m: u64, b: u64, q: u64) -> u64 {
    assert!(q >= 1, "kappa_map needs q >= 1");
    q * b + (q - 1) * m
}

/// Sum of the divisors of `s`.
pub fn divisor_weight(s: u64) -> u64 {
    assert!(s >= 1, "divisor_weight needs s >= 1");
    let mut total = 0;
    let mut i = 1;
    while i * i <= s {
        if s.is_multiple_of(i) {
            total += i;
            let j = s / i;
            if j != i {
                total += j;
            }
        }
        i += 1;
    }
    total
}

/// Smallest positive `u` with `u = scale·Λ²(⌈u⌉)`.
///
/// On `(n−1, n]` the equation reads `u = scale·Λ²(n)`, so the root is
/// `scale·Λ²(n*)` for the smallest `n*` with `scale·Λ²(n*) ≤ n*`. Candidates
/// are visited by jumping `n ← ⌈scale·Λ²(n)⌉`, which never steps over `n*`
/// because Λ is nondecreasing.
pub fn lambda_fixed_point(
    profile: &MixingProfile,
    geometry: BlockGeometry,
    scale: f64,
    u_max: f64,
) -> Result<f64> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(invalid(format!("fixed-point scale {scale} must be finite and > 0")));
    }
    let mut acc = LambdaAccumulator::new(profile.clone(), geometry);
    let mut n: u64 = 1;
    loop {
        acc.advance_to(n);
        let lambda = acc.value();
        let g = scale * lambda * lambda;
        if g <= n as f64 {
            return Ok(g);
        }
        let next = g.ceil();
        if next > u_max {
            return Err(Error::UnboundedRegret { u_max });
        }
        n = next as u64;
    }
}

/// Solves `u·Δ² − 8α·Λ²(⌈u⌉)·log τ = 0` for its smallest positive root.
pub fn solve_uk(
    profile: &MixingProfile,
    geometry: BlockGeometry,
    delta: f64,
    alpha: f64,
    log_tau: f64,
) -> Result<f64> {
    solve_uk_with_limit(profile, geometry, delta, alpha, log_tau, DEFAULT_U_MAX)
}

pub fn solve_uk_with_limit(
    profile: &MixingProfile,
    geometry: BlockGeometry,
    delta: f64,
    alpha: f64,
    log_tau: f64,
    u_max: f64,
) -> Result<f64> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(invalid(format!("gap {delta} must be > 0")));
    }
    if !(alpha > 2.0) {
        return Err(invalid(format!("alpha {alpha} must be > 2")));
    }
    if !(log_tau.is_finite() && log_tau > 0.0) {
        return Err(invalid(format!("log horizon {log_tau} must be > 0")));
    }
    lambda_fixed_point(profile, geometry, 8.0 * alpha * log_tau / (delta * delta), u_max)
}

/// Regret bound of the fixed-block policy: Σ over suboptimal arms of
/// `u_k·Δ_k + 1/(α−2)`. Arms with `Δ = 0` contribute nothing.
pub fn block_ucb_regret_bound(
    profiles: &[MixingProfile],
    geometry: BlockGeometry,
    gaps: &[f64],
    alpha: f64,
    log_tau: f64,
) -> Result<f64> {
    let mut total = 0.0;
    for (profile, &gap) in profiles.iter().zip(gaps) {
        if gap > 0.0 {
            let u = solve_uk(profile, geometry, gap, alpha, log_tau)?;
            total += u * gap + 1.0 / (alpha - 2.0);
        }
    }
    Ok(total)
}

/// Regret bound of the combination policy:
/// Σ_i ((1 + η(s))·Δ_i + 8αs·log t / Δ_i) over arms with `Δ_i > 0`.
pub fn combo_regret_bound(s: u64, gaps: &[f64], alpha: f64, log_t: f64) -> f64 {
    let eta = divisor_weight(s) as f64;
    gaps.iter()
        .filter(|&&g| g > 0.0)
        .map(|&g| (1.0 + eta) * g + 8.0 * alpha * s as f64 * log_t / g)
        .sum()
}

/// Regret bound of the restless policy: Σ_i (Δ_i + 8α·log t / Δ_i) over arms
/// with `Δ_i > 0`.
pub fn restless_regret_bound(gaps: &[f64], alpha: f64, log_t: f64) -> f64 {
    gaps.iter()
        .filter(|&&g| g > 0.0)
        .map(|&g| g + 8.0 * alpha * log_t / g)
        .sum()
}

const BISECTION_LO: f64 = 1e-12;
const BISECTION_HI: f64 = 1e12;
const BISECTION_ITERS: usize = 200;

/// An increasing map on `(0, ∞)` used as θ or γ by the generic index policy.
pub trait MonotoneMap: Send + Sync {
    fn eval(&self, x: f64) -> f64;

    /// Smallest `x` with `eval(x) ≥ y`, by bisection unless overridden.
    fn inverse(&self, y: f64) -> f64 {
        bisect_inverse(|x| self.eval(x), y)
    }
}

/// Bisection on `[1e-12, 1e12]` for an increasing `f`.
pub fn bisect_inverse(f: impl Fn(f64) -> f64, y: f64) -> f64 {
    let (mut lo, mut hi) = (BISECTION_LO, BISECTION_HI);
    if f(lo) >= y {
        return lo;
    }
    if f(hi) < y {
        return f64::INFINITY;
    }
    for _ in 0..BISECTION_ITERS {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= y {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// θ(n) = n.
#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl MonotoneMap for Identity {
    fn eval(&self, x: f64) -> f64 {
        x
    }

    fn inverse(&self, y: f64) -> f64 {
        y
    }
}

/// γ(ε) = ε²/2.
#[derive(Debug, Clone, Copy, Default)]
pub struct HalfSquare;

impl MonotoneMap for HalfSquare {
    fn eval(&self, x: f64) -> f64 {
        0.5 * x * x
    }

    fn inverse(&self, y: f64) -> f64 {
        (2.0 * y.max(0.0)).sqrt()
    }
}

/// θ(n) = n / Λ²(⌈n⌉).
#[derive(Debug, Clone)]
pub struct LambdaScaled {
    pub profile: MixingProfile,
    pub geometry: BlockGeometry,
}

impl MonotoneMap for LambdaScaled {
    fn eval(&self, x: f64) -> f64 {
        let lambda = lambda_sum(&self.profile, self.geometry, x.ceil().max(1.0) as u64);
        x / (lambda * lambda)
    }

    fn inverse(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        lambda_fixed_point(&self.profile, self.geometry, y, DEFAULT_U_MAX).unwrap_or(f64::INFINITY)
    }
}

/// Wraps a closure; the inverse always goes through bisection.
pub struct FnMap<F>(pub F);

impl<F: Fn(f64) -> f64 + Send + Sync> MonotoneMap for FnMap<F> {
    fn eval(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}

/// Σ over suboptimal arms of `⌈θ⁻¹(α·log τ / γ(Δ/2))⌉·Δ + 1/(α−2)`.
pub fn generic_regret_bound(
    theta: &dyn MonotoneMap,
    gamma: &dyn MonotoneMap,
    gaps: &[f64],
    alpha: f64,
    log_tau: f64,
) -> Result<f64> {
    if !(alpha > 2.0) {
        return Err(invalid(format!("alpha {alpha} must be > 2")));
    }
    let mut total = 0.0;
    for &gap in gaps {
        if !(gap > 0.0) {
            return Err(invalid(format!("gap {gap} must be > 0")));
        }
        let pulls = theta.inverse(alpha * log_tau / gamma.eval(gap / 2.0)).ceil();
        total += pulls * gap + 1.0 / (alpha - 2.0);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geo(m: u64, b: u64) -> BlockGeometry {
        BlockGeometry::new(m, b).unwrap()
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_sum(&MixingProfile::Zero, geo(3, 2), 50), 1.0);
        let fr = MixingProfile::finite_range(3, 0.5).unwrap();
        assert_eq!(lambda_sum(&fr, geo(1, 1), 5), 3.0);
        let g = MixingProfile::geometric(1.0, 0.5).unwrap();
        assert!((lambda_sum(&g, geo(1, 1), 2) - 2.25).abs() < 1e-15);
    }

    #[test]
    fn lambda_with_zero_gap_clamps_first_argument() {
        // b = 0: the first summand is φ(0), evaluated as φ(1).
        let g = MixingProfile::geometric(1.0, 0.5).unwrap();
        let expected = 1.0 + 2.0 * (0.5 + 0.25 + 0.0625);
        assert!((lambda_sum(&g, geo(2, 0), 3) - expected).abs() < 1e-15);
    }

    #[test]
    fn algebraic_bound_examples() {
        let v = algebraic_lambda_bound(1.0, 2.0, geo(1, 1), 10).unwrap();
        assert!((v - (3.0 + 18.0 / 19.0)).abs() < 1e-12);
        let tiny = algebraic_lambda_bound(1e-15, 2.0, geo(3, 2), 100).unwrap();
        assert!((tiny - 1.0).abs() < 1e-12);
        assert!(algebraic_lambda_bound(1.0, 2.0, geo(1, 0), 10).is_err());
        let prof = MixingProfile::algebraic(1.0, 2.0).unwrap();
        assert!(v >= lambda_sum(&prof, geo(1, 1), 10));
    }

    #[test]
    fn m_sums() {
        assert_eq!(m_sum(&MixingProfile::Zero, 4).unwrap(), 1.0);
        let g = MixingProfile::geometric(1.0, 0.5).unwrap();
        assert!((m_sum(&g, 1).unwrap() - 1.5).abs() < 1e-15);
        let fr = MixingProfile::finite_range(2, 0.3).unwrap();
        assert!((m_sum(&fr, 1).unwrap() - 1.3).abs() < 1e-15);
        // b = 0 is evaluated as b = 1
        assert_eq!(m_sum(&g, 0).unwrap(), m_sum(&g, 1).unwrap());
    }

    #[test]
    fn restless_m_sums() {
        assert_eq!(restless_m_sum(&MixingProfile::Zero, 7).unwrap(), 1.0);
        let g = MixingProfile::geometric(1.0, 0.5).unwrap();
        assert!((restless_m_sum(&g, 2).unwrap() - 1.5).abs() < 1e-15);
        let fr = MixingProfile::finite_range(3, 0.2).unwrap();
        assert_eq!(restless_m_sum(&fr, 5).unwrap(), 1.0);
    }

    #[test]
    fn non_summable_profiles_are_rejected() {
        let g = MixingProfile::geometric(1.0, 1.0).unwrap();
        assert!(matches!(m_sum(&g, 2), Err(Error::NonSummable)));
        let a = MixingProfile::algebraic(1.0, 1.0).unwrap();
        assert!(matches!(restless_m_sum(&a, 2), Err(Error::NonSummable)));
    }

    #[test]
    fn clipped_geometric_tail() {
        // c = 4, ρ = 0.5: φ = 1, 1, 0.5, 0.25, ...
        let g = MixingProfile::geometric(4.0, 0.5).unwrap();
        let direct: f64 = (1..200).map(|n| g.phi(n)).sum();
        assert!((g.strided_tail(1, 1).unwrap() - direct).abs() < 1e-13);
        let a = MixingProfile::algebraic(10.0, 2.0).unwrap();
        let direct: f64 = (1..2_000_000u64).map(|n| a.phi(3 * n)).sum::<f64>() + 10.0 / (3.0 * 3.0 * 2e6);
        assert!((a.strided_tail(3, 3).unwrap() - direct).abs() < 1e-9);
    }

    #[test]
    fn skip_maps() {
        let v: Vec<u64> = (1..=5).map(|t| rested_skip_map(2, 1, t)).collect();
        assert_eq!(v, [1, 2, 4, 5, 7]);
        let v: Vec<u64> = (1..=3).map(|t| rested_skip_map(1, 2, t)).collect();
        assert_eq!(v, [1, 4, 7]);
        assert!((1..100).all(|t| rested_skip_map(3, 0, t) == t));

        let v: Vec<u64> = (1..=4).map(|t| restless_skip_map(2, 3, t)).collect();
        assert_eq!(v, [1, 2, 6, 7]);
        let v: Vec<u64> = (1..=3).map(|t| restless_skip_map(1, 1, t)).collect();
        assert_eq!(v, [1, 3, 4]);
        assert!((1..100).all(|t| restless_skip_map(4, 0, t) == t));
    }

    #[test]
    fn kappa_examples() {
        assert_eq!([1, 2, 3].map(|q| kappa_map(2, 1, q)), [1, 4, 7]);
        assert!((1..50).all(|q| kappa_map(1, 0, q) == q - 1));
        assert_eq!(kappa_map(3, 2, 2), 7);
    }

    #[test]
    fn divisor_examples() {
        assert_eq!(divisor_weight(1), 1);
        assert_eq!(divisor_weight(6), 12);
        assert_eq!(divisor_weight(12), 28);
        assert_eq!(divisor_weight(49), 57);
    }

    #[test]
    fn combinations_of_four() {
        let mut got: Vec<(u64, u64)> = combinations(4).iter().map(|c| (c.m, c.b)).collect();
        got.sort();
        let mut want = vec![(1, 0), (2, 0), (4, 0), (1, 1), (3, 1), (1, 3), (2, 2)];
        want.sort();
        assert_eq!(got, want);
        assert_eq!(combinations(1), vec![Combination { m: 1, b: 0, beta: 1 }]);
    }

    #[test]
    fn solve_uk_zero_profile() {
        let z = MixingProfile::Zero;
        let u = solve_uk(&z, geo(1, 0), 1.0, 3.0, 1.0).unwrap();
        assert!((u - 24.0).abs() < 1e-12);
        let u = solve_uk(&z, geo(1, 0), 2.0, 3.0, 1.0).unwrap();
        assert!((u - 6.0).abs() < 1e-12);
    }

    #[test]
    fn solve_uk_residual_on_dependent_profile() {
        let fr = MixingProfile::finite_range(4, 0.6).unwrap();
        let g = geo(2, 1);
        let (delta, alpha, log_tau) = (0.3, 3.0, 7.0f64);
        let u = solve_uk(&fr, g, delta, alpha, log_tau).unwrap();
        assert!(u >= 8.0 * alpha * log_tau / (delta * delta));
        let lambda = lambda_sum(&fr, g, u.ceil() as u64);
        let lhs = u * delta * delta;
        let residual = (lhs - 8.0 * alpha * lambda * lambda * log_tau).abs();
        assert!(residual <= 1e-9 * lhs.max(1.0));
    }

    #[test]
    fn solve_uk_unbounded() {
        let g = MixingProfile::geometric(1.0, 1.0).unwrap();
        let err = solve_uk(&g, geo(1, 1), 0.1, 3.0, 5.0).unwrap_err();
        assert!(matches!(err, Error::UnboundedRegret { .. }));
        assert!(solve_uk(&MixingProfile::Zero, geo(1, 0), 0.0, 3.0, 1.0).is_err());
        assert!(solve_uk(&MixingProfile::Zero, geo(1, 0), 1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn generic_bound_examples() {
        let v = generic_regret_bound(&Identity, &HalfSquare, &[0.5], 3.0, 1.0).unwrap();
        assert!((v - 49.0).abs() < 1e-12);
        assert_eq!(generic_regret_bound(&Identity, &HalfSquare, &[], 3.0, 1.0).unwrap(), 0.0);
        assert!(generic_regret_bound(&Identity, &HalfSquare, &[0.5], 2.0, 1.0).is_err());

        let scaled = LambdaScaled {
            profile: MixingProfile::Zero,
            geometry: geo(1, 0),
        };
        let gaps = [0.5, 0.2, 0.05];
        let a = generic_regret_bound(&scaled, &HalfSquare, &gaps, 3.0, 4.0).unwrap();
        let b = generic_regret_bound(&Identity, &HalfSquare, &gaps, 3.0, 4.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bisection_matches_closed_forms() {
        let sq = FnMap(|x: f64| 0.5 * x * x);
        for y in [1e-6, 0.03125, 1.0, 17.5, 1e6] {
            let x = sq.inverse(y);
            assert!((x - HalfSquare.inverse(y)).abs() <= 1e-9 * x.max(1.0));
        }
    }

    #[test]
    fn block_bound_matches_generic_form() {
        // Θ(n) = n/Λ²(n), γ = ε²/2 reproduces Σ (u_k Δ_k + 1/(α−2)) up to the ceiling.
        let prof = MixingProfile::geometric(1.0, 0.6).unwrap();
        let g = geo(2, 2);
        let scaled = LambdaScaled {
            profile: prof.clone(),
            geometry: g,
        };
        let gaps = [0.3];
        let generic = generic_regret_bound(&scaled, &HalfSquare, &gaps, 3.0, 8.0).unwrap();
        let direct = block_ucb_regret_bound(&[prof], g, &gaps, 3.0, 8.0).unwrap();
        assert!(generic >= direct && generic - direct <= 0.3 + 1e-9);
    }
}
