//! Subordination of constant-speed traveling waves by inverse-subordinator
//! densities.
//!
//! A wave ψ(x − vt) moving at speed v is time-changed by the inverse
//! E(t) = inf{s ≥ 0 : S(s) ≥ t} of a driftless subordinator S.  The crate
//! computes the resulting averaged profiles ψ^E(x, t) = E[ψ(x − vE(t))],
//! their Cesàro means in t, and the induced front propagation laws, for
//! three kernel classes of the governing convolution operator:
//! power-law kernels (fronts x ≍ t^α), distributed-order kernels with a
//! positive weight at the endpoint (fronts ≍ log t), and power-weight
//! distributed-order kernels (fronts ≍ (log t)^{1+s}).
//!
//! Module map:
//! - [`specfun`]: Mittag-Leffler, M-Wright, incomplete gamma, E₁ — the
//!   closed forms used as cross-checking oracles;
//! - [`quad`]: adaptive Gauss–Kronrod quadrature and compensated sums;
//! - [`laplace`]: forward transform, fixed-Talbot / Euler inversion, and
//!   the Karamata-Tauberian Cesàro evaluator;
//! - [`subordinators`]: kernel specs, Laplace exponents, inverse-process
//!   densities G_t and survival functions;
//! - [`gfd`]: discrete general fractional derivatives (Caputo and
//!   distributed-order specializations);
//! - [`waves`]: wave profiles, subordinated profiles, Cesàro means, and
//!   front position traces;
//! - [`asymptotics`]: the closed-form front laws, scaling fits, and
//!   two-sided envelope checks;
//! - [`montecarlo`]: sample-path simulation of inverse subordinators for
//!   independent verification.

pub mod asymptotics;
pub mod error;
pub mod laplace;
pub mod montecarlo;
pub mod gfd;
pub mod quad;
pub mod specfun;
pub mod subordinators;
pub mod waves;

pub use error::{Error, Result};
