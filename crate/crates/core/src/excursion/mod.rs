//! Cusp excursions of a geodesic ray from `∞` toward a boundary point.

mod cf;
mod profile;
mod spectrum;

pub use cf::{cf_expand, CfExpansion, Convergent, Direction};
pub use profile::{profile_value, Bump, ExcursionProfile};
pub use spectrum::{
    consecutive_gap_check, spectrum, spectrum_by_enumeration, ExcursionRecord, GapReport, Spectrum, SpectrumLimit,
    MARGINAL_TOL,
};
