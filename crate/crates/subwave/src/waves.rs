//! Traveling waves, their subordination, Cesàro means, and fronts.
//!
//! A constant-speed wave ψ(x − vt) with monotone profile ψ: ℝ → [0,1],
//! ψ(−∞) = 1, ψ(+∞) = 0, travels at linear speed v.  Replacing physical
//! time by an inverse subordinator E(t) yields the subordinated wave
//!
//! > ψ^E(x,t) = ∫₀^∞ ψ(x − vτ) G_t(τ) dτ,
//!
//! whose fronts x_β(t) — the level sets ψ^E(x_β(t), t) = β — no longer move
//! linearly.  The analysis squeezes ψ between two step profiles: the lower
//! wave (1−ε)·𝟙(x ≤ x_ε^−) and the upper wave 𝟙(x ≤ x_ε^+) + ε·𝟙(x > x_ε^+),
//! whose subordination collapses to the survival function P(E(t) > θ) with
//! θ = (x − x_ε^∓)/v.  Long-time front laws are read off the Cesàro mean
//! M_t(g) = (1/t)∫₀^t g(s)ds, which this module evaluates three ways:
//!
//! * direct quadrature of s ↦ ψ^E(x, s) (any t, costly),
//! * exact Laplace inversion of the step-wave Cesàro transform
//!   λ^{−2}(1−ε)e^{−θΦ(λ)} (step profiles, any t),
//! * the Karamata–Tauberian evaluation Φ(1/t)·∫ψ(x−vτ)e^{−τΦ(1/t)}dτ,
//!   which is the t → ∞ limit expression and costs one λ-evaluation.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::laplace::{invert_laplace_detailed, InversionConfig};
use crate::quad;
use crate::subordinators::{GtEvaluator, SubordinatorSpec, Variant};

/// Half-width of the x-interval on which profile invariants are checked.
const X_LARGE: f64 = 50.0;

/// Residual tolerance for the profile limits at ±X_LARGE.
const LIMIT_TOL: f64 = 1e-6;

/// Front root-finder tolerance on |wave − β| and on the interval width.
const FRONT_TOL: f64 = 1e-9;

/// Absolute tolerance of the subordination τ-quadrature.
const SUB_QUAD_TOL: f64 = 1e-8;

// ---------------------------------------------------------------------------
// Profiles.
// ---------------------------------------------------------------------------

/// Profile shape: smooth, or one of the two ε-step profiles bracketing a
/// smooth wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileKind {
    Smooth,
    LowerStep { eps: f64, x_minus: f64 },
    UpperStep { eps: f64, x_plus: f64 },
}

/// A traveling-wave profile ψ with speed v.
#[derive(Clone)]
pub struct WaveProfile {
    psi: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    v: f64,
    kind: ProfileKind,
}

impl fmt::Debug for WaveProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WaveProfile {{ v: {}, kind: {:?} }}", self.v, self.kind)
    }
}

impl WaveProfile {
    /// Wrap a smooth monotone profile; checks the limits ψ(∓X) → 1/0, the
    /// range [0,1], and nonincreasing behaviour on a sample grid.
    pub fn smooth(v: f64, psi: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::domain("wave speed must be positive"));
        }
        if psi(-X_LARGE) < 1.0 - LIMIT_TOL || psi(X_LARGE) > LIMIT_TOL {
            return Err(Error::domain(
                "profile must approach 1 at -infinity and 0 at +infinity",
            ));
        }
        let n = 400;
        let mut prev = f64::INFINITY;
        for i in 0..=n {
            let x = -X_LARGE + 2.0 * X_LARGE * i as f64 / n as f64;
            let p = psi(x);
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::domain("profile must take values in [0,1]"));
            }
            if p > prev + 1e-12 {
                return Err(Error::domain("profile must be nonincreasing"));
            }
            prev = p;
        }
        Ok(WaveProfile {
            psi: Arc::new(psi),
            v,
            kind: ProfileKind::Smooth,
        })
    }

    /// The default smooth profile ψ(x) = 1/(1 + eˣ).
    pub fn logistic(v: f64) -> Result<Self> {
        WaveProfile::smooth(v, |x: f64| 1.0 / (1.0 + x.exp()))
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.psi)(x)
    }

    /// The traveling wave ψ(x − vt).
    pub fn wave(&self, x: f64, t: f64) -> f64 {
        self.eval(x - self.v * t)
    }

    pub fn speed(&self) -> f64 {
        self.v
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }
}

/// The ε-bracket of a profile: ψ > 1−ε left of x_minus, ψ < ε right of
/// x_plus.
#[derive(Debug, Clone, Copy)]
pub struct Bracket {
    pub eps: f64,
    pub x_minus: f64,
    pub x_plus: f64,
}

/// Build the lower and upper step waves of a profile at level ε:
/// ψ_ε^−(x) = (1−ε)·𝟙(x ≤ x_ε^−) and ψ_ε^+(x) = 𝟙(x ≤ x_ε^+) + ε·𝟙(x > x_ε^+).
pub fn make_step_waves(
    profile: &WaveProfile,
    eps: f64,
) -> Result<(WaveProfile, WaveProfile, Bracket)> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::domain("step level must satisfy 0 < eps < 1/2"));
    }
    let x_plus = level_crossing(profile, eps)?;
    let x_minus = level_crossing(profile, 1.0 - eps)?;
    if x_minus > x_plus {
        return Err(Error::domain(
            "profile levels cross out of order; profile is not nonincreasing",
        ));
    }
    let bracket = Bracket {
        eps,
        x_minus,
        x_plus,
    };
    let lower = WaveProfile {
        psi: Arc::new(move |x: f64| if x <= x_minus { 1.0 - eps } else { 0.0 }),
        v: profile.v,
        kind: ProfileKind::LowerStep { eps, x_minus },
    };
    let upper = WaveProfile {
        psi: Arc::new(move |x: f64| if x <= x_plus { 1.0 } else { eps }),
        v: profile.v,
        kind: ProfileKind::UpperStep { eps, x_plus },
    };
    Ok((lower, upper, bracket))
}

/// Solve ψ(x) = level by bisection on [−X_LARGE, X_LARGE].
fn level_crossing(profile: &WaveProfile, level: f64) -> Result<f64> {
    let (mut lo, mut hi) = (-X_LARGE, X_LARGE);
    let (f_lo, f_hi) = (profile.eval(lo), profile.eval(hi));
    if !(f_hi < level && level < f_lo) {
        return Err(Error::NoBracket {
            level,
            lo,
            hi,
            f_lo,
            f_hi,
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if profile.eval(mid) > level {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * (1.0 + mid.abs()) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

// ---------------------------------------------------------------------------
// Subordination.
// ---------------------------------------------------------------------------

/// The subordinated wave ψ^E(x,t) = ∫₀^∞ ψ(x − vτ) G_t(τ) dτ.
///
/// Step profiles reduce to the survival function and skip the quadrature:
/// lower wave (1−ε)·P(E(t) > θ_ε^−), upper wave ε + (1−ε)·P(E(t) > θ_ε^+),
/// with θ_ε^∓ = max(0, (x − x_ε^∓)/v).  At t = 0 the wave is continuously
/// extended by ψ(x), matching E(0) = 0.
pub fn subordinate(
    profile: &WaveProfile,
    spec: &SubordinatorSpec,
    x: f64,
    t: f64,
) -> Result<f64> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::domain("subordinate requires t >= 0"));
    }
    if t == 0.0 {
        return Ok(profile.eval(x));
    }
    match profile.kind {
        ProfileKind::LowerStep { eps, x_minus } => {
            let theta = ((x - x_minus) / profile.v).max(0.0);
            Ok((1.0 - eps) * spec.survival_e(t, theta)?)
        }
        ProfileKind::UpperStep { eps, x_plus } => {
            let theta = ((x - x_plus) / profile.v).max(0.0);
            Ok(eps + (1.0 - eps) * spec.survival_e(t, theta)?)
        }
        ProfileKind::Smooth => {
            let tau_max = spec.survival_tau_max(t)?;
            let v = profile.v;
            if let Variant::Stable { alpha } = spec.variant() {
                if *alpha == 0.5 {
                    let g = |tau: f64| {
                        (-tau * tau / (4.0 * t)).exp() / (std::f64::consts::PI * t).sqrt()
                    };
                    let q = quad::integrate(
                        |tau| profile.eval(x - v * tau) * g(tau),
                        0.0,
                        tau_max,
                        SUB_QUAD_TOL,
                    );
                    return Ok(q.value);
                }
            }
            let eval = GtEvaluator::new(spec, t)?;
            let q = quad::integrate(
                |tau| {
                    profile.eval(x - v * tau) * eval.density(tau).unwrap_or(f64::NAN)
                },
                0.0,
                tau_max,
                SUB_QUAD_TOL,
            );
            if !q.value.is_finite() {
                return Err(Error::Numerical {
                    stage: "subordinate",
                    achieved: f64::INFINITY,
                    target: SUB_QUAD_TOL,
                });
            }
            Ok(q.value)
        }
    }
}

// ---------------------------------------------------------------------------
// Cesàro means.
// ---------------------------------------------------------------------------

/// M_t(g) = (1/t) ∫₀^t g(s) ds by adaptive quadrature; integrable
/// singularities at s = 0 are allowed (no endpoint evaluation).
pub fn cesaro_mean(g: impl Fn(f64) -> f64, t: f64, quad_tol: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain("cesaro_mean requires t > 0"));
    }
    if !(quad_tol > 0.0) {
        return Err(Error::domain("cesaro_mean requires quad_tol > 0"));
    }
    let q = quad::integrate(g, 0.0, t, quad_tol * t);
    if !q.value.is_finite() {
        return Err(Error::Numerical {
            stage: "cesaro_mean",
            achieved: f64::INFINITY,
            target: quad_tol,
        });
    }
    Ok(q.value / t)
}

/// Exact Cesàro mean of a subordinated step wave at one t, through the
/// Laplace transform: the t-transform of ∫₀^t P(E(s) > θ) ds is
/// λ^{−2} e^{−θΦ(λ)}, so M_t of the lower wave is
/// (1−ε)·L^{−1}[λ^{−2}e^{−θΦ(λ)}](t)/t, and the upper wave adds ε.
/// One instance fixes (spec, t) and caches Φ at the inversion nodes, so a
/// front search over x costs one complex exponential per node per probe.
pub struct StepCesaroEvaluator<'a> {
    spec: &'a SubordinatorSpec,
    t: f64,
    v: f64,
    eps: f64,
    x_offset: f64,
    upper: bool,
    cfg: InversionConfig,
    phi_cache: RefCell<HashMap<(u64, u64), Complex64>>,
}

impl<'a> StepCesaroEvaluator<'a> {
    pub fn new(
        spec: &'a SubordinatorSpec,
        profile: &WaveProfile,
        t: f64,
    ) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::domain("StepCesaroEvaluator requires t > 0"));
        }
        let (eps, x_offset, upper) = match profile.kind {
            ProfileKind::LowerStep { eps, x_minus } => (eps, x_minus, false),
            ProfileKind::UpperStep { eps, x_plus } => (eps, x_plus, true),
            ProfileKind::Smooth => {
                return Err(Error::unsupported(
                    "StepCesaroEvaluator needs a step profile",
                ))
            }
        };
        Ok(StepCesaroEvaluator {
            spec,
            t,
            v: profile.v,
            eps,
            x_offset,
            upper,
            cfg: InversionConfig::default(),
            phi_cache: RefCell::new(HashMap::new()),
        })
    }

    fn phi(&self, s: Complex64) -> Complex64 {
        let key = (s.re.to_bits(), s.im.to_bits());
        if let Some(hit) = self.phi_cache.borrow().get(&key) {
            return *hit;
        }
        let phi = s * self.spec.kernel_laplace_complex(s);
        self.phi_cache.borrow_mut().insert(key, phi);
        phi
    }

    /// M_t(step wave) at position x.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let theta = ((x - self.x_offset) / self.v).max(0.0);
        let transform = |s: Complex64| (-theta * self.phi(s)).exp() / (s * s);
        let inv = invert_laplace_detailed(transform, self.t, &self.cfg)?;
        // The inverted quantity is ∫₀^t P ds ∈ [0, t]; certify absolutely
        // at the t-scale.
        if inv.est_abs_err > 1e-7 * self.t.max(1.0) {
            return Err(Error::Numerical {
                stage: "step cesaro inversion",
                achieved: inv.est_abs_err / self.t.max(1.0),
                target: 1e-7,
            });
        }
        let mean_survival = (inv.value / self.t).clamp(0.0, 1.0);
        Ok(if self.upper {
            self.eps + (1.0 - self.eps) * mean_survival
        } else {
            (1.0 - self.eps) * mean_survival
        })
    }
}

/// Exact Cesàro mean of a subordinated smooth wave at one t: the
/// t-transform of ψ^E(x,·) is K(λ)·∫₀^∞ψ(x−vτ)e^{−τΦ(λ)}dτ, and the Cesàro
/// transform divides by λ once more.  Caches (K, Φ) per node; each x-probe
/// re-does only the τ-integral.
pub struct SmoothCesaroEvaluator<'a> {
    profile: &'a WaveProfile,
    spec: &'a SubordinatorSpec,
    t: f64,
    cfg: InversionConfig,
    node_cache: RefCell<HashMap<(u64, u64), (Complex64, Complex64)>>,
}

impl<'a> SmoothCesaroEvaluator<'a> {
    pub fn new(
        profile: &'a WaveProfile,
        spec: &'a SubordinatorSpec,
        t: f64,
    ) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::domain("SmoothCesaroEvaluator requires t > 0"));
        }
        if profile.kind != ProfileKind::Smooth {
            return Err(Error::unsupported(
                "SmoothCesaroEvaluator needs a smooth profile; use StepCesaroEvaluator",
            ));
        }
        Ok(SmoothCesaroEvaluator {
            profile,
            spec,
            t,
            cfg: InversionConfig::default(),
            node_cache: RefCell::new(HashMap::new()),
        })
    }

    fn node(&self, s: Complex64) -> (Complex64, Complex64) {
        let key = (s.re.to_bits(), s.im.to_bits());
        if let Some(hit) = self.node_cache.borrow().get(&key) {
            return *hit;
        }
        let k = self.spec.kernel_laplace_complex(s);
        let entry = (k, s * k);
        self.node_cache.borrow_mut().insert(key, entry);
        entry
    }

    /// M_t(ψ^E(x, ·)).
    pub fn eval(&self, x: f64) -> Result<f64> {
        let v = self.profile.v;
        let psi = &self.profile.psi;
        let transform = |s: Complex64| {
            let (k, phi) = self.node(s);
            // ∫₀^∞ ψ(x − vτ) e^{−τφ} dτ with an exponential tail cutoff
            // set by Re φ (φ has positive real part on both contours).
            let horizon = 40.0 / phi.re.max(1e-12);
            let (integral, _) = quad::integrate_complex(
                |tau| (-tau * phi).exp() * psi(x - v * tau),
                0.0,
                horizon,
                1e-11 * horizon.min(1e6),
            );
            k * integral / s
        };
        let inv = invert_laplace_detailed(transform, self.t, &self.cfg)?;
        if inv.est_abs_err > 1e-6 * self.t.max(1.0) {
            return Err(Error::Numerical {
                stage: "smooth cesaro inversion",
                achieved: inv.est_abs_err / self.t.max(1.0),
                target: 1e-6,
            });
        }
        Ok((inv.value / self.t).clamp(0.0, 1.0))
    }
}

/// Karamata–Tauberian evaluation of the Cesàro mean at large t:
/// M_t(ψ^E(x,·)) ≈ λF(x,λ)|_{λ=1/t} = Φ(1/t)·∫₀^∞ψ(x−vτ)e^{−τΦ(1/t)}dτ.
/// For step profiles the integral is closed: the lower wave gives
/// (1−ε)e^{−θΦ(1/t)} and the upper wave ε + (1−ε)e^{−θΦ(1/t)}.
pub fn tauberian_wave(
    profile: &WaveProfile,
    spec: &SubordinatorSpec,
    x: f64,
    t: f64,
) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain("tauberian_wave requires t > 0"));
    }
    let phi = spec.laplace_exponent(1.0 / t)?;
    if !(phi > 0.0) {
        return Err(Error::Numerical {
            stage: "tauberian_wave",
            achieved: phi,
            target: f64::MIN_POSITIVE,
        });
    }
    match profile.kind {
        ProfileKind::LowerStep { eps, x_minus } => {
            let theta = ((x - x_minus) / profile.v).max(0.0);
            Ok((1.0 - eps) * (-theta * phi).exp())
        }
        ProfileKind::UpperStep { eps, x_plus } => {
            let theta = ((x - x_plus) / profile.v).max(0.0);
            Ok(eps + (1.0 - eps) * (-theta * phi).exp())
        }
        ProfileKind::Smooth => {
            let v = profile.v;
            let horizon = 40.0 / phi;
            let q = quad::integrate(
                |tau| (-tau * phi).exp() * profile.eval(x - v * tau),
                0.0,
                horizon,
                1e-10 * horizon.min(1e8),
            );
            Ok((phi * q.value).clamp(0.0, 1.0))
        }
    }
}

// ---------------------------------------------------------------------------
// Fronts.
// ---------------------------------------------------------------------------

/// Provenance of a front trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceSide {
    Exact,
    LowerWave,
    UpperWave,
}

impl fmt::Display for TraceSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TraceSide::Exact => "exact",
            TraceSide::LowerWave => "lower",
            TraceSide::UpperWave => "upper",
        };
        f.write_str(s)
    }
}

/// Front positions x_β(t) of one level β over a time grid.
#[derive(Debug, Clone)]
pub struct FrontTrace {
    pub beta: f64,
    pub t_values: Vec<f64>,
    pub x_values: Vec<f64>,
    pub side: TraceSide,
}

impl FrontTrace {
    /// CSV rows `t,x_beta,beta,side` (no header; callers prepend their own
    /// metadata lines).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x_beta,beta,side\n");
        for (t, x) in self.t_values.iter().zip(&self.x_values) {
            out.push_str(&format!("{t},{x},{},{}\n", self.beta, self.side));
        }
        out
    }

    pub fn len(&self) -> usize {
        self.t_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_values.is_empty()
    }
}

/// Solve wave(x, t) = β for x by bisection, assuming the wave is
/// nonincreasing in x.  Terminates when |wave − β| ≤ 1e−9 or the interval
/// width falls below 1e−9·max(1,|x|).
pub fn front_position(
    wave: impl Fn(f64, f64) -> Result<f64>,
    beta: f64,
    t: f64,
    x_lo: f64,
    x_hi: f64,
) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::domain("front level must lie in (0,1)"));
    }
    if !(x_lo < x_hi) {
        return Err(Error::domain("front search needs x_lo < x_hi"));
    }
    let w_lo = wave(x_lo, t)?;
    let w_hi = wave(x_hi, t)?;
    if !(w_hi < beta && beta < w_lo) {
        return Err(Error::NoBracket {
            level: beta,
            lo: x_lo,
            hi: x_hi,
            f_lo: w_lo,
            f_hi: w_hi,
        });
    }
    let (mut lo, mut hi) = (x_lo, x_hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let w = wave(mid, t)?;
        if (w - beta).abs() <= FRONT_TOL {
            return Ok(mid);
        }
        if w > beta {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= FRONT_TOL * mid.abs().max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Trace the front of level β along a time grid, warm-starting each search
/// bracket from the previous root.  Failed points become gaps (skipped
/// rows), not global failures.
pub fn front_trace(
    wave: impl Fn(f64, f64) -> Result<f64>,
    beta: f64,
    t_grid: &[f64],
    side: TraceSide,
    x_lo: f64,
    x_hi: f64,
) -> FrontTrace {
    let mut trace = FrontTrace {
        beta,
        t_values: Vec::new(),
        x_values: Vec::new(),
        side,
    };
    let (mut lo, mut hi) = (x_lo, x_hi);
    for &t in t_grid {
        // Expand the bracket (fronts move right, so mostly upward) until it
        // straddles β, then bisect.
        let mut width = (hi - lo).max(1.0);
        let mut ok = false;
        for _ in 0..60 {
            match (wave(lo, t), wave(hi, t)) {
                (Ok(w_lo), Ok(w_hi)) => {
                    if w_lo > beta && beta > w_hi {
                        ok = true;
                        break;
                    }
                    if w_lo <= beta {
                        lo -= width;
                    }
                    if w_hi >= beta {
                        hi += width;
                    }
                    width *= 2.0;
                }
                _ => break,
            }
        }
        if !ok {
            continue;
        }
        if let Ok(x) = front_position(&wave, beta, t, lo, hi) {
            trace.t_values.push(t);
            trace.x_values.push(x);
            // Warm start: recenter a unit-ish bracket on the root.
            let pad = (hi - lo).min(x.abs().max(1.0));
            lo = x - pad;
            hi = x + pad;
        }
    }
    trace
}

// ---------------------------------------------------------------------------
