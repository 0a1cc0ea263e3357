//! Subordinator models and the inverse-subordinator density.
//!
//! A driftless subordinator S(s) with Lévy measure σ satisfying σ(0,∞) = ∞
//! is described here by three interchangeable quantities:
//!
//! * the Laplace exponent Φ(λ) = ∫₀^∞ (1 − e^{−λτ}) dσ(τ),
//! * the kernel k(t) = σ((t,∞)) (the Lévy tail), and
//! * its Laplace transform K(λ) = L[k](λ), related by Φ(λ) = λ·K(λ).
//!
//! The inverse process E(t) = inf{s : S(s) > t} has a marginal density
//! G_t(τ) whose t-Laplace transform is K(λ)e^{−τλK(λ)}; this module computes
//! G_t(τ) and the survival function P(E(t) > θ) numerically from that
//! transform, with closed-form short-circuits where they exist.
//!
//! Small-λ behaviour of K sorts kernels into three asymptotic classes:
//!
//! * C1: K(λ) ~ λ^{α−1}            (α-stable; power-law fronts),
//! * C2: K(λ) ~ μ₀ / (λ ln(1/λ))   (distributed order, μ(0) = μ₀ > 0),
//! * C3: K(λ) ~ C / (λ ln(1/λ)^{1+s}) (distributed order, μ(τ) = τ^s).
//!
//! [`SubordinatorSpec::verify_class`] checks the claimed asymptote on a grid
//! of λ values decreasing toward zero.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::ser::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::laplace::{invert_laplace_detailed, InversionConfig, Inversion};
use crate::quad;
use crate::specfun;

/// Absolute accuracy accepted for density values whose relative error cannot
/// be certified.  Mid-tail values of G_t(τ) sit orders of magnitude below the
/// transform scale, so the inversion's absolute error ~1e−9 may be a large
/// relative error while still being far tighter than any τ-quadrature built
/// on top of the density needs.
const DENSITY_ABS_TOL: f64 = 1e-8;

/// Laplace-domain tail cutoff for survival integration: τ_max is chosen so
/// that e^{−τ_max·Φ(1/t)} < TAIL_CUTOFF.
const TAIL_CUTOFF: f64 = 1e-10;

/// Default absolute tolerance for the τ-quadratures in this module.
const TAU_QUAD_TOL: f64 = 1e-8;

/// Analytic continuation of a kernel Laplace transform, evaluable at the
/// complex nodes of the inverse-transform contours.
pub type ComplexSymbol = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

// ---------------------------------------------------------------------------
// Weight functions for distributed-order kernels.
// ---------------------------------------------------------------------------

/// Nonnegative weight μ on [0,1] defining a distributed-order kernel
/// k(t) = ∫₀¹ t^{−τ} μ(τ)/Γ(1−τ) dτ.
#[derive(Clone)]
pub enum Weight {
    /// μ ≡ μ₀ (class C2 when μ₀ > 0).
    Const { mu0: f64 },
    /// μ(τ) = τ^s with s > 0 (class C3 with C = Γ(s+1)).
    Power { s: f64 },
    /// Arbitrary continuous nonnegative weight (class left unclassified).
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Weight {
    pub fn eval(&self, tau: f64) -> f64 {
        match self {
            Weight::Const { mu0 } => *mu0,
            Weight::Power { s } => {
                if tau <= 0.0 {
                    0.0
                } else {
                    tau.powf(*s)
                }
            }
            Weight::Custom(f) => f(tau),
        }
    }

    /// μ(0), the value steering the C2 asymptote.
    pub fn mu0(&self) -> f64 {
        self.eval(0.0)
    }

    fn validate(&self) -> Result<()> {
        match self {
            Weight::Const { mu0 } => {
                if !(*mu0 > 0.0) {
                    return Err(Error::domain("Const weight requires mu0 > 0"));
                }
            }
            Weight::Power { s } => {
                if !(*s > 0.0) {
                    return Err(Error::domain("Power weight requires s > 0"));
                }
            }
            Weight::Custom(f) => {
                for i in 0..=16 {
                    let tau = i as f64 / 16.0;
                    let v = f(tau);
                    if !v.is_finite() || v < 0.0 {
                        return Err(Error::domain(
                            "Custom weight must be finite and nonnegative on [0,1]",
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Const { mu0 } => write!(f, "Const {{ mu0: {mu0} }}"),
            Weight::Power { s } => write!(f, "Power {{ s: {s} }}"),
            Weight::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

// ---------------------------------------------------------------------------
// Spec.
// ---------------------------------------------------------------------------

/// Concrete subordinator family.
#[derive(Clone)]
pub enum Variant {
    /// Φ(λ) = λ^α, 0 < α < 1.
    Stable { alpha: f64 },
    /// Φ(λ) = a·ln(1 + λ/b), Lévy density a τ^{−1} e^{−bτ}.
    Gamma { a: f64, b: f64 },
    /// Distributed-order kernel with weight μ.
    DistributedOrder { weight: Weight },
    /// Only K(λ) is known (as an analytic symbol); no Lévy representation.
    LaplaceSymbolOnly { symbol: ComplexSymbol },
}

impl fmt::Debug for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Stable { alpha } => write!(f, "Stable {{ alpha: {alpha} }}"),
            Variant::Gamma { a, b } => write!(f, "Gamma {{ a: {a}, b: {b} }}"),
            Variant::DistributedOrder { weight } => {
                write!(f, "DistributedOrder {{ weight: {weight:?} }}")
            }
            Variant::LaplaceSymbolOnly { .. } => write!(f, "LaplaceSymbolOnly(..)"),
        }
    }
}

/// Small-λ asymptotic class of K, with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassTag {
    C1 { alpha: f64 },
    C2 { mu0: f64 },
    C3 { c: f64, s: f64 },
    Unclassified,
}

/// A subordinator model: the family plus its asymptotic class tag.
#[derive(Debug, Clone)]
pub struct SubordinatorSpec {
    variant: Variant,
    class_tag: ClassTag,
}

impl SubordinatorSpec {
    /// α-stable subordinator, Φ(λ) = λ^α (class C1).
    pub fn stable(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain("Stable requires 0 < alpha < 1"));
        }
        Ok(SubordinatorSpec {
            variant: Variant::Stable { alpha },
            class_tag: ClassTag::C1 { alpha },
        })
    }

    /// Gamma subordinator, Φ(λ) = a·ln(1 + λ/b).  K(λ) → a/b as λ → 0, so
    /// it falls outside the three anomalous classes.
    pub fn gamma(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::domain("Gamma requires a > 0 and b > 0"));
        }
        Ok(SubordinatorSpec {
            variant: Variant::Gamma { a, b },
            class_tag: ClassTag::Unclassified,
        })
    }

    /// Distributed-order kernel.  Const weights are class C2, power weights
    /// class C3 with C = Γ(s+1); anything else is left unclassified.
    pub fn distributed(weight: Weight) -> Result<Self> {
        weight.validate()?;
        let class_tag = match &weight {
            Weight::Const { mu0 } => ClassTag::C2 { mu0: *mu0 },
            Weight::Power { s } => ClassTag::C3 {
                c: specfun::gamma(*s + 1.0),
                s: *s,
            },
            Weight::Custom(_) => ClassTag::Unclassified,
        };
        Ok(SubordinatorSpec {
            variant: Variant::DistributedOrder { weight },
            class_tag,
        })
    }

    /// Model known only through its transform K(λ).  The symbol must be the
    /// analytic continuation of K to a right half-plane; complete
    /// monotonicity of the implied kernel is not checked, so densities are
    /// reported with their error estimates but carry no class certificate.
    pub fn laplace_symbol_only(
        symbol: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        SubordinatorSpec {
            variant: Variant::LaplaceSymbolOnly {
                symbol: Arc::new(symbol),
            },
            class_tag: ClassTag::Unclassified,
        }
    }

    pub fn variant(&self) -> &Variant {
        &self.variant
    }

    pub fn class_tag(&self) -> ClassTag {
        self.class_tag
    }

    // -- transforms ---------------------------------------------------------

    /// Laplace exponent Φ(λ) = λ·K(λ); Φ(0) = 0.
    pub fn laplace_exponent(&self, lambda: f64) -> Result<f64> {
        if lambda < 0.0 || !lambda.is_finite() {
            return Err(Error::domain("laplace_exponent requires lambda >= 0"));
        }
        if lambda == 0.0 {
            return Ok(0.0);
        }
        Ok(lambda * self.kernel_laplace(lambda)?)
    }

    /// Lévy tail k(t) = σ((t,∞)).
    pub fn kernel_k(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::domain("kernel_k requires t > 0"));
        }
        match &self.variant {
            Variant::Stable { alpha } => Ok(t.powf(-alpha) * specfun::rgamma(1.0 - alpha)),
            Variant::Gamma { a, b } => Ok(a * specfun::exp_integral_e1(b * t)?),
            Variant::DistributedOrder { weight } => {
                // k(t) = ∫₀¹ t^{−τ} μ(τ)/Γ(1−τ) dτ; the integrand is smooth
                // on [0,1] (1/Γ(1−τ) vanishes linearly at τ = 1).
                let log_t = t.ln();
                let f = |tau: f64| {
                    (-tau * log_t).exp() * specfun::rgamma(1.0 - tau) * weight.eval(tau)
                };
                let scale = f(0.0).abs().max(f(0.5).abs()).max(1.0_f64.min(1.0 / t));
                let q = quad::integrate(f, 0.0, 1.0, 1e-12 * scale.max(1.0));
                Ok(q.value)
            }
            Variant::LaplaceSymbolOnly { .. } => Err(Error::unsupported(
                "kernel_k needs a Levy representation; this model only carries K(lambda)",
            )),
        }
    }

    /// Kernel transform K(λ), λ > 0.
    pub fn kernel_laplace(&self, lambda: f64) -> Result<f64> {
        if !(lambda > 0.0) {
            return Err(Error::domain("kernel_laplace requires lambda > 0"));
        }
        match &self.variant {
            Variant::Stable { alpha } => Ok(lambda.powf(alpha - 1.0)),
            Variant::Gamma { a, b } => Ok(a * (1.0 + lambda / b).ln() / lambda),
            Variant::DistributedOrder { weight } => {
                // K(λ) = ∫₀¹ λ^{τ−1} μ(τ) dτ, evaluated as a τ-quadrature;
                // the tolerance scales with the λ^{−1} endpoint magnitude.
                let log_l = lambda.ln();
                let f = |tau: f64| ((tau - 1.0) * log_l).exp() * weight.eval(tau);
                let scale = f(0.0).abs().max(f(1.0).abs()).max(1.0);
                let q = quad::integrate(f, 0.0, 1.0, 1e-12 * scale);
                Ok(q.value)
            }
            Variant::LaplaceSymbolOnly { symbol } => {
                Ok(symbol(Complex64::new(lambda, 0.0)).re)
            }
        }
    }

    /// Analytic continuation of K to the complex contour nodes.
    pub fn kernel_laplace_complex(&self, lambda: Complex64) -> Complex64 {
        match &self.variant {
            Variant::Stable { alpha } => lambda.powf(alpha - 1.0),
            Variant::Gamma { a, b } => (Complex64::new(1.0, 0.0) + lambda / *b).ln() * *a / lambda,
            Variant::DistributedOrder { weight } => {
                let log_l = lambda.ln();
                let f = |tau: f64| ((tau - 1.0) * log_l).exp() * weight.eval(tau);
                let scale = f(0.0).norm().max(f(1.0).norm()).max(1.0);
                let (v, _) = quad::integrate_complex(f, 0.0, 1.0, 1e-12 * scale);
                v
            }
            Variant::LaplaceSymbolOnly { symbol } => symbol(lambda),
        }
    }

    // -- densities ----------------------------------------------------------

    /// Marginal density G_t(τ) of the inverse process E(t).
    ///
    /// For Stable(1/2) the closed form e^{−τ²/(4t)}/√(πt) is returned;
    /// every other model inverts the t-transform K(λ)e^{−τλK(λ)}.
    pub fn density_g(&self, t: f64, tau: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::domain(
                "density_g requires t > 0 (E(0) is a point mass at 0)",
            ));
        }
        if tau < 0.0 {
            return Err(Error::domain("density_g requires tau >= 0"));
        }
        if let Variant::Stable { alpha } = &self.variant {
            if *alpha == 0.5 {
                return Ok(stable_half_density(t, tau));
            }
        }
        GtEvaluator::new(self, t)?.density(tau)
    }

    /// Survival function P(E(t) > θ) = ∫_θ^∞ G_t(τ) dτ.
    ///
    /// The τ-integral is truncated at τ_max with e^{−τ_max Φ(1/t)} below
    /// 1e−10; the Laplace-domain tail bound enters the error estimate, not
    /// the value.
    pub fn survival_e(&self, t: f64, theta: f64) -> Result<f64> {
        if t < 0.0 || !t.is_finite() {
            return Err(Error::domain("survival_e requires t >= 0"));
        }
        if theta < 0.0 {
            return Err(Error::domain("survival_e requires theta >= 0"));
        }
        if t == 0.0 {
            // E(0) = 0 almost surely.
            return Ok(if theta == 0.0 { 1.0 } else { 0.0 });
        }
        if theta == 0.0 {
            return Ok(1.0);
        }
        let tau_max = self.survival_tau_max(t)?;
        if theta >= tau_max {
            // Below the truncation resolution of ~1e−10.
            return Ok(0.0);
        }
        if let Variant::Stable { alpha } = &self.variant {
            if *alpha == 0.5 {
                let q = quad::integrate(
                    |tau| stable_half_density(t, tau),
                    theta,
                    tau_max,
                    TAU_QUAD_TOL,
                );
                return Ok(q.value);
            }
        }
        let eval = GtEvaluator::new(self, t)?;
        let q = quad::integrate(|tau| eval.density_or_nan(tau), theta, tau_max, TAU_QUAD_TOL);
        if !q.value.is_finite() {
            return Err(Error::Numerical {
                stage: "survival_e",
                achieved: f64::INFINITY,
                target: TAU_QUAD_TOL,
            });
        }
        Ok(q.value)
    }

    /// Truncation point: e^{−τ_max·Φ(1/t)} = TAIL_CUTOFF.
    pub(crate) fn survival_tau_max(&self, t: f64) -> Result<f64> {
        let phi = self.laplace_exponent(1.0 / t)?;
        if !(phi > 0.0) {
            return Err(Error::Numerical {
                stage: "survival_tau_max",
                achieved: phi,
                target: f64::MIN_POSITIVE,
            });
        }
        Ok(-TAIL_CUTOFF.ln() / phi)
    }

    /// Tabulate G_t(τ) on a (t, τ) grid.
    pub fn density_grid(&self, t_values: &[f64], tau_values: &[f64]) -> Result<DensityGrid> {
        if t_values.is_empty() || tau_values.is_empty() {
            return Err(Error::domain("density_grid requires nonempty grids"));
        }
        if t_values.windows(2).any(|w| w[0] >= w[1]) || t_values[0] <= 0.0 {
            return Err(Error::domain(
                "density_grid requires strictly increasing positive t_values",
            ));
        }
        if tau_values.windows(2).any(|w| w[0] >= w[1]) || tau_values[0] < 0.0 {
            return Err(Error::domain(
                "density_grid requires strictly increasing nonnegative tau_values",
            ));
        }
        let mut values = Vec::with_capacity(t_values.len());
        let mut est = 0.0_f64;
        for &t in t_values {
            if let Variant::Stable { alpha } = &self.variant {
                if *alpha == 0.5 {
                    values.push(
                        tau_values
                            .iter()
                            .map(|&tau| stable_half_density(t, tau))
                            .collect(),
                    );
                    est = est.max(1e-14);
                    continue;
                }
            }
            let eval = GtEvaluator::new(self, t)?;
            let mut row = Vec::with_capacity(tau_values.len());
            for &tau in tau_values {
                let inv = eval.density_detailed(tau)?;
                est = est.max(inv.est_abs_err);
                row.push(inv.value);
            }
            values.push(row);
        }
        Ok(DensityGrid {
            t_values: t_values.to_vec(),
            tau_values: tau_values.to_vec(),
            values,
            est_abs_error: est,
        })
    }

    // -- classification -----------------------------------------------------

    /// Candidate small-λ asymptote of K for this model's class tag.
    pub fn class_asymptote(&self, lambda: f64) -> Option<f64> {
        let log_inv = (1.0 / lambda).ln();
        match self.class_tag {
            ClassTag::C1 { alpha } => Some(lambda.powf(alpha - 1.0)),
            ClassTag::C2 { mu0 } => Some(mu0 / (lambda * log_inv)),
            ClassTag::C3 { c, s } => Some(c / (lambda * log_inv.powf(1.0 + s))),
            ClassTag::Unclassified => None,
        }
    }

    /// Compare K(λ) against the class asymptote along a grid decreasing
    /// toward zero; Unclassified models produce a report that never passes.
    pub fn verify_class(&self, lambda_grid: &[f64]) -> Result<ClassReport> {
        if lambda_grid.len() < 2
            || lambda_grid.windows(2).any(|w| w[0] <= w[1])
            || lambda_grid.iter().any(|&l| !(l > 0.0 && l < 1.0))
        {
            return Err(Error::domain(
                "verify_class needs a decreasing grid inside (0, 1)",
            ));
        }
        let tol = CLASS_RATIO_TOL;
        if self.class_tag == ClassTag::Unclassified {
            return Ok(ClassReport {
                class: self.class_tag,
                ratios: Vec::new(),
                tol,
                passed: false,
            });
        }
        let mut ratios = Vec::with_capacity(lambda_grid.len());
        for &lam in lambda_grid {
            let k = self.kernel_laplace(lam)?;
            let asym = self.class_asymptote(lam).expect("classified tag");
            ratios.push((lam, k / asym));
        }
        // Pass = the deviation |ratio − 1| ends below tol and does not
        // systematically grow along the grid.
        let devs: Vec<f64> = ratios.iter().map(|(_, r)| (r - 1.0).abs()).collect();
        let final_ok = *devs.last().expect("nonempty") <= tol;
        let improving = devs
            .windows(2)
            .all(|w| w[1] <= w[0] * 1.1 + 1e-12);
        Ok(ClassReport {
            class: self.class_tag,
            ratios,
            tol,
            passed: final_ok && improving,
        })
    }
}

/// Tolerance on |K/asymptote − 1| at the smallest grid λ.
const CLASS_RATIO_TOL: f64 = 0.01;

/// Grid 10^{−1} … 10^{−12}, the default argument to `verify_class`.
pub fn default_lambda_grid() -> Vec<f64> {
    (1..=12).map(|k| 10f64.powi(-k)).collect()
}

/// Closed-form G_t(τ) for the 1/2-stable subordinator.
fn stable_half_density(t: f64, tau: f64) -> f64 {
    (-tau * tau / (4.0 * t)).exp() / (std::f64::consts::PI * t).sqrt()
}

// ---------------------------------------------------------------------------
// Cached density evaluator.
// ---------------------------------------------------------------------------

/// Evaluates G_t(τ) for one fixed t by contour inversion, caching K(λ) and
/// Φ(λ) at the contour nodes.  The nodes depend only on t, so a τ-sweep
/// (survival integrals, density grids) pays the kernel-transform cost once.
pub struct GtEvaluator<'a> {
    spec: &'a SubordinatorSpec,
    t: f64,
    cfg: InversionConfig,
    cache: RefCell<HashMap<(u64, u64), (Complex64, Complex64)>>,
}

impl<'a> GtEvaluator<'a> {
    pub fn new(spec: &'a SubordinatorSpec, t: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::domain("GtEvaluator requires t > 0"));
        }
        Ok(GtEvaluator {
            spec,
            t,
            cfg: InversionConfig::default(),
            cache: RefCell::new(HashMap::new()),
        })
    }

    fn node(&self, s: Complex64) -> (Complex64, Complex64) {
        let key = (s.re.to_bits(), s.im.to_bits());
        if let Some(hit) = self.cache.borrow().get(&key) {
            return *hit;
        }
        let k = self.spec.kernel_laplace_complex(s);
        let phi = s * k;
        self.cache.borrow_mut().insert(key, (k, phi));
        (k, phi)
    }

    /// G_t(τ) with the inversion's error detail.
    pub fn density_detailed(&self, tau: f64) -> Result<Inversion> {
        if tau < 0.0 {
            return Err(Error::domain("density requires tau >= 0"));
        }
        let transform = |s: Complex64| {
            let (k, phi) = self.node(s);
            k * (-tau * phi).exp()
        };
        let inv = invert_laplace_detailed(transform, self.t, &self.cfg)?;
        if inv.est_rel_err <= self.cfg.target_rel_err || inv.est_abs_err <= DENSITY_ABS_TOL {
            Ok(inv)
        } else {
            Err(Error::Numerical {
                stage: "density_g",
                achieved: inv.est_rel_err,
                target: self.cfg.target_rel_err,
            })
        }
    }

    pub fn density(&self, tau: f64) -> Result<f64> {
        Ok(self.density_detailed(tau)?.value)
    }

    /// Quadrature-friendly form: NaN marks a failed node so the integrator's
    /// result turns non-finite instead of silently dropping mass.
    fn density_or_nan(&self, tau: f64) -> f64 {
        self.density(tau).unwrap_or(f64::NAN)
    }
}

// ---------------------------------------------------------------------------
// Density grid.
// ---------------------------------------------------------------------------

/// Tabulated G_t(τ) with accuracy metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityGrid {
    pub t_values: Vec<f64>,
    pub tau_values: Vec<f64>,
    /// values[i][j] = G_{t_values[i]}(tau_values[j]).
    pub values: Vec<Vec<f64>>,
    pub est_abs_error: f64,
}

impl DensityGrid {
    /// Trapezoid mass over the tabulated τ range for one t row.
    pub fn trapezoid_mass(&self, t_index: usize) -> f64 {
        let row = &self.values[t_index];
        let taus = &self.tau_values;
        let mut acc = quad::KahanSum::new();
        for j in 1..taus.len() {
            acc.add(0.5 * (row[j] + row[j - 1]) * (taus[j] - taus[j - 1]));
        }
        acc.value()
    }
}

// ---------------------------------------------------------------------------
// Class report.
// ---------------------------------------------------------------------------

/// Outcome of `verify_class`: the ratio K(λ)/asymptote along the grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassReport {
    #[serde(skip, default = "unclassified")]
    pub class: ClassTag,
    pub ratios: Vec<(f64, f64)>,
    pub tol: f64,
    pub passed: bool,
}

fn unclassified() -> ClassTag {
    ClassTag::Unclassified
}

// ---------------------------------------------------------------------------
// Serialization (wire format fixed for CLI/config interop).
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum WeightWire {
    Const { mu0: f64 },
    Power { s: f64 },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase", deny_unknown_fields)]
enum SpecWire {
    Stable { alpha: f64 },
    Gamma { a: f64, b: f64 },
    Distributed { weight: WeightWire },
}

impl Serialize for SubordinatorSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = match &self.variant {
            Variant::Stable { alpha } => SpecWire::Stable { alpha: *alpha },
            Variant::Gamma { a, b } => SpecWire::Gamma { a: *a, b: *b },
            Variant::DistributedOrder { weight } => SpecWire::Distributed {
                weight: match weight {
                    Weight::Const { mu0 } => WeightWire::Const { mu0: *mu0 },
                    Weight::Power { s } => WeightWire::Power { s: *s },
                    Weight::Custom(_) => {
                        return Err(S::Error::custom(
                            "custom weights have no wire representation",
                        ))
                    }
                },
            },
            Variant::LaplaceSymbolOnly { .. } => {
                return Err(S::Error::custom(
                    "LaplaceSymbolOnly specs have no wire representation",
                ))
            }
        };
        wire.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SubordinatorSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = SpecWire::deserialize(deserializer)?;
        let built = match wire {
            SpecWire::Stable { alpha } => SubordinatorSpec::stable(alpha),
            SpecWire::Gamma { a, b } => SubordinatorSpec::gamma(a, b),
            SpecWire::Distributed { weight } => SubordinatorSpec::distributed(match weight {
                WeightWire::Const { mu0 } => Weight::Const { mu0 },
                WeightWire::Power { s } => Weight::Power { s },
            }),
        };
        built.map_err(|e| D::Error::custom(e.to_string()))
    }
}

// ---------------------------------------------------------------------------
