//! The averaging operator `Af(x,t) = ∫ f(x − tΓ(u)) φ(u) du`, its Fourier
//! multiplier, the sup-over-time certificate and the broad-narrow check.

pub mod average;
pub mod broad_narrow;
pub mod cutoff;
pub mod embed;
pub mod multiplier;

pub use average::{average_point, average_quadrature, Estimate, Everywhere, GaussianBlobs, InputFn, TensorRule};
pub use broad_narrow::{broad_narrow_certify, BroadNarrow, BROAD_NARROW_C};
pub use cutoff::{beta0, beta_lambda, chi_tilde, smooth_step, CutoffSpec, Profile, Window};
pub use embed::{sup_over_t, SupCertificate};
pub use multiplier::{decay_fit, multiplier, multiplier_mc, DecayFit, DecayWarning, MultiplierValue, Quadrature, QuadSettings};
