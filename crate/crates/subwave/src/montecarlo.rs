//! Monte Carlo simulation of subordinator paths and subordinated waves.
//!
//! The inverse process E(t) = inf{s ≥ 0 : S(s) ≥ t} is sampled by walking
//! the parent subordinator S on a grid of operational-time steps and
//! interpolating the crossing of level t linearly within the crossing step,
//! which bounds the discretization bias by one step.  Stable increments use
//! Kanter's representation
//!
//! > S_α =^d (A(U)/W)^{(1−α)/α},  A(u) = [sin^α(αu)·sin^{1−α}((1−α)u)/sin u]^{1/(1−α)},
//!
//! with U uniform on (0,π) and W unit exponential, so that
//! E[e^{−λ S_α}] = e^{−λ^α}; Gamma increments are exact Gamma(a·Δ, b) draws.
//! Estimators report mean, standard error, and sample count; paired with
//! the quadrature evaluation of ψ^E they provide an independent check of
//! the whole transform pipeline.  Sampling covers the stable and Gamma
//! families; distributed-order and symbol-only clocks have no increment
//! sampler here and are rejected as unsupported.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Exp1, Gamma as GammaDist};

use crate::error::{Error, Result};
use crate::specfun;
use crate::subordinators::{SubordinatorSpec, Variant};
use crate::waves::WaveProfile;

/// Hard cap on parent-path steps before a crossing must occur.
pub const DEFAULT_STEP_BUDGET: u64 = 10_000_000;

// ---------------------------------------------------------------------------
// Reproducible streams.
// ---------------------------------------------------------------------------

/// A named, reproducible random stream: the pair (seed, stream_id) fully
/// determines the sequence, and distinct stream ids give statistically
/// independent streams for parallel workers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    /// Instantiate the generator: a 32-byte ChaCha12 key expanded from
    /// (seed, stream_id) with SplitMix64.
    pub fn rng(&self) -> ChaCha12Rng {
        let mut state = self
            .seed
            .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(self.stream_id.wrapping_add(1)));
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        ChaCha12Rng::from_seed(key)
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

// ---------------------------------------------------------------------------
// Estimates.
// ---------------------------------------------------------------------------

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
}

/// Welford accumulator; merging supports deterministic parallel reduction.
#[derive(Debug, Clone, Copy, Default)]
pub struct McAccumulator {
    n: u64,
    mean: f64,
    m2: f64,
}

impl McAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &McAccumulator) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * (self.n as f64 * other.n as f64) / n as f64;
        self.n = n;
    }

    pub fn finish(&self) -> McEstimate {
        let se = if self.n > 1 {
            (self.m2 / ((self.n - 1) as f64 * self.n as f64)).sqrt()
        } else {
            f64::INFINITY
        };
        McEstimate {
            mean: self.mean,
            std_error: se,
            n: self.n,
        }
    }
}

// ---------------------------------------------------------------------------
// Increment samplers.
// ---------------------------------------------------------------------------

/// One increment of the α-stable subordinator over operational time Δ:
/// X = Δ^{1/α}·S_α with E[e^{−λX}] = e^{−Δλ^α}.
pub fn sample_stable_increment(alpha: f64, delta: f64, rng: &mut impl Rng) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain("stable index must lie in (0, 1)"));
    }
    if !(delta > 0.0) {
        return Err(Error::domain("increment length must be positive"));
    }
    // Kanter's representation, evaluated in log space for stability.
    let u = loop {
        let r: f64 = rng.random();
        if r > 0.0 && r < 1.0 {
            break r * std::f64::consts::PI;
        }
    };
    let w: f64 = Exp1.sample(rng);
    let ln_a = (alpha * (alpha * u).sin().ln() + (1.0 - alpha) * ((1.0 - alpha) * u).sin().ln()
        - u.sin().ln())
        / (1.0 - alpha);
    let s = (((1.0 - alpha) / alpha) * (ln_a - w.ln())).exp();
    Ok(delta.powf(1.0 / alpha) * s)
}

/// One increment of the Gamma subordinator over operational time Δ:
/// X ~ Gamma(shape a·Δ, rate b), so E[e^{−λX}] = (1 + λ/b)^{−aΔ}.
pub fn sample_gamma_increment(a: f64, b: f64, delta: f64, rng: &mut impl Rng) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::domain("gamma parameters must be positive"));
    }
    if !(delta > 0.0) {
        return Err(Error::domain("increment length must be positive"));
    }
    let dist = GammaDist::new(a * delta, 1.0 / b)
        .map_err(|e| Error::domain(format!("gamma increment: {e}")))?;
    Ok(dist.sample(rng))
}

fn sample_increment(spec: &SubordinatorSpec, delta: f64, rng: &mut impl Rng) -> Result<f64> {
    match spec.variant() {
        Variant::Stable { alpha } => sample_stable_increment(*alpha, delta, rng),
        Variant::Gamma { a, b } => sample_gamma_increment(*a, *b, delta, rng),
        Variant::DistributedOrder { .. } => Err(Error::unsupported(
            "no increment sampler for distributed-order subordinators",
        )),
        Variant::LaplaceSymbolOnly { .. } => Err(Error::unsupported(
            "no increment sampler for symbol-only subordinators",
        )),
    }
}

// ---------------------------------------------------------------------------
// Inverse-process sampling.
// ---------------------------------------------------------------------------

/// Sample E(t) by walking S in operational-time steps of size `step` until
/// it crosses t, then interpolating the crossing linearly inside the step.
/// The discretization bias is at most one step.  Fails with a step-budget
/// error if `max_steps` parent increments do not reach t.
pub fn sample_inverse_with_budget(
    spec: &SubordinatorSpec,
    t: f64,
    step: f64,
    max_steps: u64,
    rng: &mut impl Rng,
) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain("sample_inverse requires t > 0"));
    }
    if !(step > 0.0) {
        return Err(Error::domain("sample_inverse requires step > 0"));
    }
    let mut s_level = 0.0_f64;
    let mut steps = 0u64;
    loop {
        let jump = sample_increment(spec, step, rng)?;
        if s_level + jump >= t {
            let frac = if jump > 0.0 {
                ((t - s_level) / jump).clamp(0.0, 1.0)
            } else {
                1.0
            };
            return Ok((steps as f64 + frac) * step);
        }
        s_level += jump;
        steps += 1;
        if steps >= max_steps {
            return Err(Error::StepBudget { steps, t, step });
        }
    }
}

/// `sample_inverse_with_budget` with the default step budget.
pub fn sample_inverse(
    spec: &SubordinatorSpec,
    t: f64,
    step: f64,
    rng: &mut impl Rng,
) -> Result<f64> {
    sample_inverse_with_budget(spec, t, step, DEFAULT_STEP_BUDGET, rng)
}

/// Monte Carlo estimate of the subordinated wave ψ^E(x,t) = E[ψ(x − vE(t))]
/// from `n` independent inverse-process samples.
pub fn mc_subordinate(
    profile: &WaveProfile,
    spec: &SubordinatorSpec,
    x: f64,
    t: f64,
    n: u64,
    step: f64,
    rng: &mut impl Rng,
) -> Result<McEstimate> {
    if n == 0 {
        return Err(Error::domain("mc_subordinate requires n > 0"));
    }
    let mut acc = McAccumulator::new();
    for _ in 0..n {
        let e = sample_inverse(spec, t, step, rng)?;
        acc.add(profile.eval(x - profile.speed() * e));
    }
    Ok(acc.finish())
}

// ---------------------------------------------------------------------------
// Sample diagnostics.
// ---------------------------------------------------------------------------

/// A fixed-width histogram over [lo, hi); samples outside are dropped but
/// counted in `outside`.
#[derive(Debug, Clone)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    pub outside: u64,
}

impl Histogram {
    pub fn new(samples: &[f64], lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if !(hi > lo) || bins == 0 {
            return Err(Error::domain("histogram needs hi > lo and bins >= 1"));
        }
        let mut counts = vec![0u64; bins];
        let mut outside = 0u64;
        let width = (hi - lo) / bins as f64;
        for &x in samples {
            if x >= lo && x < hi {
                let idx = (((x - lo) / width) as usize).min(bins - 1);
                counts[idx] += 1;
            } else {
                outside += 1;
            }
        }
        Ok(Histogram {
            lo,
            hi,
            counts,
            outside,
        })
    }

    /// CSV rows `bin_lo,bin_hi,count`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_lo,bin_hi,count\n");
        let width = (self.hi - self.lo) / self.counts.len() as f64;
        for (i, c) in self.counts.iter().enumerate() {
            let a = self.lo + i as f64 * width;
            let b = self.lo + (i + 1) as f64 * width;
            out.push_str(&format!("{a},{b},{c}\n"));
        }
        out
    }
}

/// Two-sample Kolmogorov–Smirnov distance sup|F̂_a − F̂_b|.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientData(
            "KS distance needs nonempty samples".into(),
        ));
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(|p, q| p.total_cmp(q));
    sb.sort_by(|p, q| p.total_cmp(q));
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0_f64;
    while i < sa.len() && j < sb.len() {
        // Step past every sample equal to the smaller current value so the
        // empirical cdfs are compared at the jump point itself (ties must
        // advance both sides together).
        let v = sa[i].min(sb[j]);
        while i < sa.len() && sa[i] == v {
            i += 1;
        }
        while j < sb.len() && sb[j] == v {
            j += 1;
        }
        let fa = i as f64 / sa.len() as f64;
        let fb = j as f64 / sb.len() as f64;
        d = d.max((fa - fb).abs());
    }
    Ok(d)
}

/// Pearson χ² p-value of observed bin counts against expected counts,
/// with `observed.len() − 1` degrees of freedom.
pub fn chi_square_pvalue(observed: &[u64], expected: &[f64]) -> Result<f64> {
    if observed.len() != expected.len() || observed.len() < 2 {
        return Err(Error::InsufficientData(
            "chi-square needs matching bins, at least two".into(),
        ));
    }
    let mut stat = 0.0;
    for (&o, &e) in observed.iter().zip(expected) {
        if !(e > 0.0) {
            return Err(Error::domain("expected counts must be positive"));
        }
        let d = o as f64 - e;
        stat += d * d / e;
    }
    let dof = (observed.len() - 1) as f64;
    specfun::gamma_q(0.5 * dof, 0.5 * stat)
}

// ---------------------------------------------------------------------------
