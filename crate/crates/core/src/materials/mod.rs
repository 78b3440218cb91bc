//! Functionally graded section: temperature-dependent phase properties,
//! power-law mixing and the through-thickness integrals that feed the
//! plate constitutive law.

mod integrate;
mod phase;
mod section;

pub use integrate::integrate_thickness;
pub use phase::{lookup, Phase, Property, TemperatureCoefficients, BUILTIN_NAMES};
pub use section::{
    reddy_f, reddy_f_prime, ConstitutiveResultants, DenominatorConvention, FgmSection,
    ThermalResultants, ThermalScalars,
};
