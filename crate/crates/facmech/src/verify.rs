//! Verification toolkit: deviation search, empirical approximation ratios,
//! structural characterization checks, probability-rule audits, and
//! replayed lower-bound certificates.

mod certificates;
mod midpoint;
mod monotonicity;
mod ratio;
mod reflection;
mod sp;

pub use certificates::{certificate_61, certificate_62, CertificateCheck, CertificateReport};
pub use midpoint::{midpoint_property_check, MidpointCheckReport, DEFAULT_PAIR_CAP};
pub use monotonicity::{monotonicity_audit_72, MonotonicityViolation, AUDIT_MAX_SUM};
pub use ratio::{instance_ratio, ratio_search, RatioSearch, RATIO_ZERO_TOLERANCE};
pub use reflection::{reflection_form_check, uniform_grid, ReflectionForm};
pub use sp::{default_deviation_set, default_deviation_sets, sp_check, DeviationWitness, SP_TOLERANCE};
