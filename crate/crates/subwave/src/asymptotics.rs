//! Long-time front laws for subordinated waves and checks against traces.
//!
//! For a clock whose kernel transform K belongs to one of the three
//! small-λ classes, the Cesàro-mean step waves admit the closed asymptotes
//!
//! > W_ε^−(x,t) = (1−ε)·exp(−θ_ε^− g(t)),  W_ε^+(x,t) = (1−ε)·exp(−θ_ε^+ g(t)) + ε,
//!
//! with θ_ε^∓ = (x − x_ε^∓)/v and decay factor g(t) = Φ(1/t) evaluated to
//! leading order: t^{−α} (class C1), μ₀/log t (C2), C/(log t)^{1+s} (C3).
//! Solving W_ε^∓ = β for x yields the front laws
//!
//! > x_ε,β^∓(t) = C_∓ · shape(t) + x_ε^∓,
//!
//! with shape(t) = t^α, log t, (log t)^{1+s} and constants
//! C_− = v·log((1−ε)/β)/D, C_+ = v·log((1−ε)/(β−ε))/D, where D = 1, μ₀, C
//! for the three classes.  This module evaluates the asymptotes and laws,
//! fits a measured front trace to the class shape, and checks a trace
//! against the two laws with slack.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::subordinators::ClassTag;
use crate::waves::FrontTrace;

/// Which step wave a law describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lower,
    Upper,
}

impl Side {
    fn as_str(self) -> &'static str {
        match self {
            Side::Lower => "lower",
            Side::Upper => "upper",
        }
    }
}

/// A closed-form front law for one class, one side.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticLaw {
    class: ClassTag,
    side: Side,
    v: f64,
    eps: f64,
    beta: f64,
    x_offset: f64,
    c_side: f64,
}

impl AsymptoticLaw {
    /// Build a law.  The level β must lie where the step wave actually
    /// attains it: β ∈ (0, 1−ε) on the lower side, β ∈ (ε, 1) on the upper.
    pub fn new(
        class: ClassTag,
        side: Side,
        v: f64,
        eps: f64,
        beta: f64,
        x_offset: f64,
    ) -> Result<Self> {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::domain("wave speed must be positive"));
        }
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::domain("step level must satisfy 0 < eps < 1/2"));
        }
        if !x_offset.is_finite() {
            return Err(Error::domain("x_offset must be finite"));
        }
        match side {
            Side::Lower => {
                if !(beta > 0.0 && beta < 1.0 - eps) {
                    return Err(Error::domain(
                        "lower-side level must satisfy 0 < beta < 1 - eps",
                    ));
                }
            }
            Side::Upper => {
                if !(beta > eps && beta < 1.0) {
                    return Err(Error::domain(
                        "upper-side level must satisfy eps < beta < 1",
                    ));
                }
            }
        }
        let divisor = match class {
            ClassTag::C1 { alpha } => {
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(Error::domain("C1 exponent must lie in (0,1)"));
                }
                1.0
            }
            ClassTag::C2 { mu0 } => {
                if !(mu0 > 0.0) {
                    return Err(Error::domain("C2 weight mu0 must be positive"));
                }
                mu0
            }
            ClassTag::C3 { c, s } => {
                if !(c > 0.0 && s > 0.0) {
                    return Err(Error::domain("C3 parameters must be positive"));
                }
                c
            }
            ClassTag::Unclassified => {
                return Err(Error::unsupported(
                    "front laws exist only for the classified kernels C1, C2, C3",
                ))
            }
        };
        let ratio = match side {
            Side::Lower => (1.0 - eps) / beta,
            Side::Upper => (1.0 - eps) / (beta - eps),
        };
        let c_side = v * ratio.ln() / divisor;
        Ok(AsymptoticLaw {
            class,
            side,
            v,
            eps,
            beta,
            x_offset,
            c_side,
        })
    }

    pub fn class(&self) -> ClassTag {
        self.class
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn x_offset(&self) -> f64 {
        self.x_offset
    }

    /// The front-law coefficient C_∓.
    pub fn c_side(&self) -> f64 {
        self.c_side
    }

    /// The decay factor g(t): t^{−α}, μ₀/log t, or C/(log t)^{1+s}.
    pub fn decay(&self, t: f64) -> Result<f64> {
        self.require_time(t)?;
        Ok(match self.class {
            ClassTag::C1 { alpha } => t.powf(-alpha),
            ClassTag::C2 { mu0 } => mu0 / t.ln(),
            ClassTag::C3 { c, s } => c / t.ln().powf(1.0 + s),
            ClassTag::Unclassified => unreachable!("rejected in new()"),
        })
    }

    /// The spatial growth shape: t^α, log t, or (log t)^{1+s}.
    pub fn shape(&self, t: f64) -> Result<f64> {
        self.require_time(t)?;
        Ok(match self.class {
            ClassTag::C1 { alpha } => t.powf(alpha),
            ClassTag::C2 { .. } => t.ln(),
            ClassTag::C3 { s, .. } => t.ln().powf(1.0 + s),
            ClassTag::Unclassified => unreachable!("rejected in new()"),
        })
    }

    fn require_time(&self, t: f64) -> Result<()> {
        // log-shaped laws are meaningless (or negative) for t ≤ 1; the
        // power law only needs t > 0 but shares the gate for uniformity.
        if !(t > 1.0) {
            return Err(Error::domain("asymptotic laws require t > 1"));
        }
        Ok(())
    }

    /// Time before which a trace point is not expected to follow the law.
    pub fn default_burn_in(&self) -> f64 {
        match self.class {
            ClassTag::C1 { .. } => 1e2,
            _ => 1e4,
        }
    }
}

/// The asymptotic Cesàro mean W_ε^∓(x,t) of a step wave.
pub fn cesaro_asymptote(law: &AsymptoticLaw, x: f64, t: f64) -> Result<f64> {
    if !(x > law.x_offset) {
        return Err(Error::domain(
            "asymptote is valid ahead of the step only (x > x_offset)",
        ));
    }
    let theta = (x - law.x_offset) / law.v;
    let base = (1.0 - law.eps) * (-theta * law.decay(t)?).exp();
    Ok(match law.side {
        Side::Lower => base,
        Side::Upper => base + law.eps,
    })
}

/// The front position the asymptote assigns to level β:
/// x = C_∓·shape(t) + x_offset, the exact solution of W_ε^∓(x,t) = β.
pub fn front_law(law: &AsymptoticLaw, t: f64) -> Result<f64> {
    Ok(law.c_side * law.shape(t)? + law.x_offset)
}

/// Result of fitting a front trace to its class shape.
#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub class: String,
    pub side: String,
    /// Fitted slope: the exponent for C1 (log x vs log t), the coefficient
    /// for C2/C3 (x vs log t resp. (log t)^{1+s}).
    pub fitted: f64,
    pub expected: f64,
    /// Root-mean-square residual of the regression, in the fitted variable.
    pub residual: f64,
    pub pass: bool,
}

/// Least-squares fit of a trace to the law's shape.
///
/// C1 regresses log(x − x_offset) on log t, so `fitted` estimates the
/// anomalous exponent α and `pass` means |fitted − α| ≤ tol.  C2 and C3
/// regress x on log t resp. (log t)^{1+s}, so `fitted` estimates C_∓ and
/// `pass` means |fitted/C_∓ − 1| ≤ tol.
///
/// Requires at least 4 points spanning at least two decades of t.
pub fn fit_scaling(trace: &FrontTrace, law: &AsymptoticLaw, tol: f64) -> Result<FitReport> {
    let n = trace.t_values.len();
    if n < 4 {
        return Err(Error::InsufficientData(format!(
            "scaling fit needs at least 4 front points, got {n}"
        )));
    }
    let t_min = trace.t_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let t_max = trace.t_values.iter().cloned().fold(0.0_f64, f64::max);
    if !(t_min > 1.0) {
        return Err(Error::domain("scaling fit needs all t > 1"));
    }
    if t_max / t_min < 100.0 {
        return Err(Error::InsufficientData(format!(
            "scaling fit needs two decades of t, got {:.2}",
            t_max / t_min
        )));
    }
    let mut zs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    let exponent_fit = matches!(law.class, ClassTag::C1 { .. });
    for (&t, &x) in trace.t_values.iter().zip(&trace.x_values) {
        if exponent_fit {
            let shifted = x - law.x_offset;
            if !(shifted > 0.0) {
                return Err(Error::domain(
                    "C1 fit needs fronts ahead of the step offset",
                ));
            }
            zs.push(t.ln());
            ys.push(shifted.ln());
        } else {
            zs.push(law.shape(t)?);
            ys.push(x);
        }
    }
    let z_mean = zs.iter().sum::<f64>() / n as f64;
    let y_mean = ys.iter().sum::<f64>() / n as f64;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (z, y) in zs.iter().zip(&ys) {
        cov += (z - z_mean) * (y - y_mean);
        var += (z - z_mean) * (z - z_mean);
    }
    let fitted = cov / var;
    let intercept = y_mean - fitted * z_mean;
    let mut ss = 0.0;
    for (z, y) in zs.iter().zip(&ys) {
        let r = y - (intercept + fitted * z);
        ss += r * r;
    }
    let residual = (ss / n as f64).sqrt();
    let expected = match law.class {
        ClassTag::C1 { alpha } => alpha,
        _ => law.c_side,
    };
    let pass = if exponent_fit {
        (fitted - expected).abs() <= tol
    } else {
        (fitted / expected - 1.0).abs() <= tol
    };
    Ok(FitReport {
        class: class_name(law.class).to_string(),
        side: law.side.as_str().to_string(),
        fitted,
        expected,
        residual,
        pass,
    })
}

fn class_name(class: ClassTag) -> &'static str {
    match class {
        ClassTag::C1 { .. } => "C1",
        ClassTag::C2 { .. } => "C2",
        ClassTag::C3 { .. } => "C3",
        ClassTag::Unclassified => "unclassified",
    }
}

/// One trace point checked against the two laws.
#[derive(Debug, Clone, Serialize)]
pub struct BoundEntry {
    pub t: f64,
    pub x: f64,
    pub lower: f64,
    pub upper: f64,
    /// Whether the point lies within the slacked band.
    pub within: bool,
    /// Whether the point is past burn-in and contributes to `passed`.
    pub counted: bool,
}

/// Verdict of a two-sided front-law check.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub class: String,
    pub side: String,
    pub slack: f64,
    pub burn_in: f64,
    pub entries: Vec<BoundEntry>,
    pub passed: bool,
    pub notes: String,
}

/// Check a front trace against the lower and upper laws with relative
/// slack: pass at a point iff
/// front_law(lower,t)·(1−slack) ≤ x(t) ≤ front_law(upper,t)·(1+slack).
/// Points before burn-in (default: 10² for C1, 10⁴ otherwise) are reported
/// but not counted.  The overall verdict requires every counted point to
/// lie in the band and at least one counted point to exist.
pub fn check_two_sided(
    trace: &FrontTrace,
    lower: &AsymptoticLaw,
    upper: &AsymptoticLaw,
    slack: f64,
    burn_in: Option<f64>,
) -> Result<BoundReport> {
    if lower.side != Side::Lower || upper.side != Side::Upper {
        return Err(Error::domain(
            "check_two_sided needs a lower-side and an upper-side law",
        ));
    }
    if std::mem::discriminant(&lower.class) != std::mem::discriminant(&upper.class) {
        return Err(Error::domain("the two laws must share a class"));
    }
    if !(0.0..1.0).contains(&slack) {
        return Err(Error::domain("slack must lie in [0, 1)"));
    }
    let burn_in = burn_in.unwrap_or_else(|| lower.default_burn_in());
    let mut entries = Vec::with_capacity(trace.t_values.len());
    let mut counted_any = false;
    let mut all_ok = true;
    for (&t, &x) in trace.t_values.iter().zip(&trace.x_values) {
        let lo = front_law(lower, t)?;
        let hi = front_law(upper, t)?;
        let within = lo * (1.0 - slack) <= x && x <= hi * (1.0 + slack);
        let counted = t >= burn_in;
        if counted {
            counted_any = true;
            all_ok &= within;
        }
        entries.push(BoundEntry {
            t,
            x,
            lower: lo,
            upper: hi,
            within,
            counted,
        });
    }
    let passed = counted_any && all_ok;
    let notes = format!(
        "band: C_-*shape(t)+x_- .. C_+*shape(t)+x_+ with C_- = v*ln((1-eps)/beta)/D, \
         C_+ = v*ln((1-eps)/(beta-eps))/D; {} of {} points counted (t >= {burn_in:.3e})",
        entries.iter().filter(|e| e.counted).count(),
        entries.len(),
    );
    Ok(BoundReport {
        class: class_name(lower.class).to_string(),
        side: "two-sided".to_string(),
        slack,
        burn_in,
        entries,
        passed,
        notes,
    })
}

// ---------------------------------------------------------------------------
