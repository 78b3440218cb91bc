//! Through-thickness temperature fields and the conversion of a critical
//! thermal membrane force into a critical temperature rise.

use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::materials::{FgmSection, Property, ThermalScalars};

pub const CELSIUS_OFFSET: f64 = 273.15;
const DEFAULT_TERMS: usize = 50;
const SERIES_TOL: f64 = 1e-8;
const MAX_TERMS: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Uniform,
    Linear,
    Conduction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemperatureScale {
    #[default]
    Kelvin,
    Celsius,
}

impl TemperatureScale {
    pub fn kelvin_offset(self) -> f64 {
        match self {
            TemperatureScale::Kelvin => 0.0,
            TemperatureScale::Celsius => CELSIUS_OFFSET,
        }
    }
}

/// Number of terms kept in the conduction series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesTruncation {
    /// Start at 50 terms and double until successive partial sums agree
    /// to 1e-8 over the thickness.
    #[default]
    Converged,
    /// Exactly this many terms.
    Terms(usize),
}

/// Temperature distribution through the thickness. `bottom` is the metal
/// face (`z = -h/2`), `top` the ceramic face, `initial` the stress-free
/// reference temperature. For the uniform kind `bottom == top`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemperatureProfile {
    pub kind: ProfileKind,
    pub bottom: f64,
    pub top: f64,
    pub initial: f64,
    #[serde(default)]
    pub scale: TemperatureScale,
    #[serde(default)]
    pub truncation: SeriesTruncation,
}

impl TemperatureProfile {
    pub fn uniform(initial: f64, current: f64) -> Self {
        Self {
            kind: ProfileKind::Uniform,
            bottom: current,
            top: current,
            initial,
            scale: TemperatureScale::Kelvin,
            truncation: SeriesTruncation::Converged,
        }
    }

    pub fn linear(bottom: f64, top: f64, initial: f64) -> Self {
        Self {
            kind: ProfileKind::Linear,
            ..Self::uniform(initial, bottom)
        }
        .with_faces(bottom, top)
    }

    pub fn conduction(bottom: f64, top: f64, initial: f64) -> Self {
        Self {
            kind: ProfileKind::Conduction,
            ..Self::linear(bottom, top, initial)
        }
    }

    pub fn with_scale(mut self, scale: TemperatureScale) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_truncation(mut self, truncation: SeriesTruncation) -> Self {
        self.truncation = truncation;
        self
    }

    fn with_faces(mut self, bottom: f64, top: f64) -> Self {
        self.bottom = bottom;
        self.top = top;
        self
    }

    /// The loading parameter of the profile: the rise above `initial` for
    /// the uniform kind, `top - bottom` otherwise.
    pub fn rise(&self) -> f64 {
        match self.kind {
            ProfileKind::Uniform => self.bottom - self.initial,
            _ => self.top - self.bottom,
        }
    }

    /// Same profile with the loading parameter set to `rise`; the bottom
    /// face stays put for the non-uniform kinds.
    pub fn with_rise(&self, rise: f64) -> Self {
        let mut p = *self;
        match self.kind {
            ProfileKind::Uniform => {
                p.bottom = self.initial + rise;
                p.top = p.bottom;
            }
            _ => p.top = self.bottom + rise,
        }
        p
    }

    /// Profile with every temperature change scaled by `factor` about the
    /// initial temperature.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut p = *self;
        p.bottom = self.initial + factor * (self.bottom - self.initial);
        p.top = self.initial + factor * (self.top - self.initial);
        p
    }

    pub fn is_isothermal(&self) -> bool {
        self.bottom == self.initial && self.top == self.initial
    }
}

/// Temperature at which material properties are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PropertyTemperature {
    /// All properties frozen at this absolute temperature.
    Independent { kelvin: f64 },
    /// Properties follow the local temperature `T(z)`.
    Dependent,
}

impl Default for PropertyTemperature {
    fn default() -> Self {
        PropertyTemperature::Independent { kelvin: 300.0 }
    }
}

/// Normalized steady-conduction profile `eta(z)` of a graded section,
/// truncated power series in `r = (k_m - k_c)/k_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConductionEta {
    n: f64,
    h: f64,
    ratio: f64,
    terms: usize,
    denominator: f64,
}

impl ConductionEta {
    pub fn new(
        n: f64,
        h: f64,
        k_ceramic: f64,
        k_metal: f64,
        truncation: SeriesTruncation,
    ) -> Result<Self> {
        if !(k_ceramic > 0.0 && k_metal > 0.0) {
            return Err(Error::Material("conductivities must be positive".into()));
        }
        let ratio = (k_metal - k_ceramic) / k_metal;
        let trivial = n == 0.0 || ratio == 0.0;
        let mut eta = Self {
            n,
            h,
            ratio,
            terms: 1,
            denominator: 1.0,
        };
        let terms = match truncation {
            SeriesTruncation::Terms(0) => return Err(arg("series truncation must be >= 1")),
            SeriesTruncation::Terms(k) => k,
            SeriesTruncation::Converged if trivial => 1,
            SeriesTruncation::Converged => {
                if ratio.abs() >= 1.0 {
                    return Err(Error::Convergence { terms: 0 });
                }
                let mut k = DEFAULT_TERMS;
                loop {
                    if k > MAX_TERMS {
                        return Err(Error::Convergence { terms: MAX_TERMS });
                    }
                    let diff = (0..=40)
                        .map(|i| {
                            let s = i as f64 / 40.0;
                            (eta.raw(s, k) - eta.raw(s, 2 * k)).abs()
                        })
                        .fold(0.0, f64::max);
                    if diff < SERIES_TOL {
                        break k;
                    }
                    k *= 2;
                }
            }
        };
        eta.terms = terms;
        eta.denominator = eta.partial_sum(1.0, terms);
        Ok(eta)
    }

    /// Builds the profile for `section` with conductivities at `kelvin`.
    pub fn for_section(
        section: &FgmSection,
        kelvin: f64,
        truncation: SeriesTruncation,
    ) -> Result<Self> {
        let kc = section
            .ceramic
            .property_at(Property::Conductivity, kelvin)?;
        let km = section.metal.property_at(Property::Conductivity, kelvin)?;
        let n = if section.is_homogeneous() {
            0.0
        } else {
            section.gradient_index
        };
        Self::new(n, section.thickness, kc, km, truncation)
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    fn partial_sum(&self, s: f64, terms: usize) -> f64 {
        let step = self.ratio * s.powf(self.n);
        let mut term = 1.0;
        let mut sum = 0.0;
        for i in 0..terms {
            sum += term / (self.n * i as f64 + 1.0);
            term *= step;
        }
        sum
    }

    fn raw(&self, s: f64, terms: usize) -> f64 {
        s * self.partial_sum(s, terms) / self.partial_sum(1.0, terms)
    }

    pub fn eta(&self, z: f64) -> Result<f64> {
        let half = 0.5 * self.h;
        if z.abs() > half * (1.0 + 1e-12) {
            return Err(Error::Domain {
                quantity: "z",
                value: z,
                range: format!("[{}, {}]", -half, half),
            });
        }
        let s = (z / self.h + 0.5).clamp(0.0, 1.0);
        Ok(s * self.partial_sum(s, self.terms) / self.denominator)
    }
}

/// `eta(z)` of the conduction profile for `section`, conductivities at
/// `kelvin`.
pub fn eta_at(
    section: &FgmSection,
    z: f64,
    truncation: SeriesTruncation,
    kelvin: f64,
) -> Result<f64> {
    ConductionEta::for_section(section, kelvin, truncation)?.eta(z)
}

/// A temperature profile bound to a section, able to answer `T(z)`,
/// `Delta T(z)`, `eta(z)` and the property temperature at `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalField {
    profile: TemperatureProfile,
    properties: PropertyTemperature,
    eta: ConductionEta,
    h: f64,
}

impl ThermalField {
    pub fn new(
        profile: TemperatureProfile,
        section: &FgmSection,
        properties: PropertyTemperature,
    ) -> Result<Self> {
        let offset = profile.scale.kelvin_offset();
        let k_ref = match properties {
            PropertyTemperature::Independent { kelvin } => kelvin,
            PropertyTemperature::Dependent => profile.bottom + offset,
        };
        let eta = ConductionEta::for_section(section, k_ref, profile.truncation)?;
        Ok(Self {
            profile,
            properties,
            eta,
            h: section.thickness,
        })
    }

    /// Stress-free field at the initial temperature of `profile`.
    pub fn isothermal(
        section: &FgmSection,
        properties: PropertyTemperature,
        profile: TemperatureProfile,
    ) -> Result<Self> {
        let p = profile.scaled(0.0);
        Self::new(p, section, properties)
    }

    pub fn profile(&self) -> &TemperatureProfile {
        &self.profile
    }

    pub fn properties(&self) -> PropertyTemperature {
        self.properties
    }

    pub fn conduction(&self) -> &ConductionEta {
        &self.eta
    }

    pub fn eta(&self, z: f64) -> Result<f64> {
        self.eta.eta(z)
    }

    /// `T(z)` in the profile's own scale.
    pub fn temperature(&self, z: f64) -> Result<f64> {
        let half = 0.5 * self.h;
        if z.abs() > half * (1.0 + 1e-12) {
            return Err(Error::Domain {
                quantity: "z",
                value: z,
                range: format!("[{}, {}]", -half, half),
            });
        }
        let p = &self.profile;
        let diff = p.top - p.bottom;
        Ok(match p.kind {
            ProfileKind::Uniform => p.bottom,
            ProfileKind::Linear => p.bottom + diff * (z / self.h + 0.5).clamp(0.0, 1.0),
            ProfileKind::Conduction => p.bottom + diff * self.eta.eta(z)?,
        })
    }

    pub fn delta(&self, z: f64) -> Result<f64> {
        Ok(self.temperature(z)? - self.profile.initial)
    }

    /// Absolute temperature used to evaluate material properties at `z`.
    pub fn property_kelvin(&self, z: f64) -> Result<f64> {
        match self.properties {
            PropertyTemperature::Independent { kelvin } => Ok(kelvin),
            PropertyTemperature::Dependent => {
                Ok(self.temperature(z)? + self.profile.scale.kelvin_offset())
            }
        }
    }
}

/// `T(z)` of `profile` on `section` with properties frozen at the bottom
/// face temperature.
pub fn temperature_at(profile: &TemperatureProfile, z: f64, section: &FgmSection) -> Result<f64> {
    let kelvin = profile.bottom + profile.scale.kelvin_offset();
    ThermalField::new(
        *profile,
        section,
        PropertyTemperature::Independent { kelvin },
    )?
    .temperature(z)
}

/// Critical temperature rise for a critical thermal membrane force
/// `n_cr` (N/m).
///
/// Uniform: `n_cr / X`. Linear and conduction: the top-minus-bottom
/// difference `(n_cr - X (T_m - T_i)) / Y` (resp. `/ Z`).
pub fn critical_delta_t(
    n_cr: f64,
    kind: ProfileKind,
    scalars: &ThermalScalars,
    t_bottom: f64,
    t_initial: f64,
) -> Result<f64> {
    let (num, den) = match kind {
        ProfileKind::Uniform => (n_cr, scalars.x),
        ProfileKind::Linear => (n_cr - scalars.x * (t_bottom - t_initial), scalars.y),
        ProfileKind::Conduction => (n_cr - scalars.x * (t_bottom - t_initial), scalars.z),
    };
    if !(den > 0.0) {
        return Err(Error::Material(format!(
            "thermal scalar for {kind:?} profile is {den}; the section does not expand on heating"
        )));
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::{lookup, DenominatorConvention, Phase};

    fn al_alumina(n: f64) -> FgmSection {
        FgmSection::new(lookup("Al2O3").unwrap(), lookup("Al").unwrap(), n, 0.01).unwrap()
    }

    /// Closed form for n = 1: both series are log sums,
    /// sum r^i s^i / (i + 1) = -ln(1 - r s) / (r s).
    fn eta_linear_grading_oracle(s: f64, r: f64) -> f64 {
        let num = -(1.0 - r * s).ln() / r;
        let den = -(1.0 - r).ln() / r;
        num / den
    }

    #[test]
    fn eta_boundary_values() {
        for n in [0.0, 0.5, 1.0, 5.0] {
            let s = al_alumina(n);
            let top = eta_at(&s, 0.005, SeriesTruncation::Converged, 300.0).unwrap();
            let bot = eta_at(&s, -0.005, SeriesTruncation::Converged, 300.0).unwrap();
            assert!((top - 1.0).abs() < 1e-14, "n={n}");
            assert_eq!(bot, 0.0);
        }
    }

    #[test]
    fn equal_conductivities_give_linear_profile() {
        let p = Phase::constant("x", 1e9, 0.3, 5.0, 1e-5, 1.0);
        let q = Phase::constant("y", 2e9, 0.3, 5.0, 2e-5, 1.0);
        let s = FgmSection::new(p, q, 2.0, 0.02).unwrap();
        for z in [-0.01, -0.003, 0.0, 0.007] {
            let e = eta_at(&s, z, SeriesTruncation::Terms(7), 300.0).unwrap();
            assert!((e - (z / 0.02 + 0.5)).abs() < 1e-15);
        }
    }

    #[test]
    fn eta_matches_log_closed_form_for_linear_grading() {
        let s = al_alumina(1.0);
        let r = (204.0 - 10.4) / 204.0;
        let mid = eta_at(&s, 0.0, SeriesTruncation::Converged, 300.0).unwrap();
        assert!((mid - eta_linear_grading_oracle(0.5, r)).abs() < 1e-8);
        assert!((mid - 0.2163).abs() < 2e-4, "eta(0) = {mid}");
        for k in 0..=20 {
            let z = -0.005 + 0.0005 * k as f64;
            let e = eta_at(&s, z, SeriesTruncation::Converged, 300.0).unwrap();
            let o = eta_linear_grading_oracle(z / 0.01 + 0.5, r);
            assert!((e - o).abs() < 1e-8, "z={z}");
        }
    }

    #[test]
    fn conduction_midplane_temperature() {
        let s = al_alumina(1.0);
        let p =
            TemperatureProfile::conduction(20.0, 300.0, 20.0).with_scale(TemperatureScale::Celsius);
        let t = temperature_at(&p, 0.0, &s).unwrap();
        let r = (204.0 - 10.4) / 204.0;
        let expect = 20.0 + 280.0 * eta_linear_grading_oracle(0.5, r);
        assert!((t - expect).abs() < 1e-5);
        assert!((t - 80.6).abs() < 0.1);
        let lin = temperature_at(&TemperatureProfile::linear(20.0, 300.0, 20.0), 0.0, &s).unwrap();
        assert_eq!(lin, 160.0);
        assert!(t < lin);
    }

    #[test]
    fn divergent_series_reported() {
        // k_c > 2 k_m makes |r| > 1
        let s = FgmSection::new(
            Phase::constant("c", 1e9, 0.3, 50.0, 1e-5, 1.0),
            Phase::constant("m", 1e9, 0.3, 10.0, 1e-5, 1.0),
            1.0,
            0.01,
        )
        .unwrap();
        assert!(matches!(
            eta_at(&s, 0.0, SeriesTruncation::Converged, 300.0),
            Err(Error::Convergence { .. })
        ));
    }

    #[test]
    fn out_of_range_z() {
        let s = al_alumina(1.0);
        assert!(eta_at(&s, 0.006, SeriesTruncation::Converged, 300.0).is_err());
        assert!(temperature_at(&TemperatureProfile::linear(0.0, 1.0, 0.0), -0.02, &s).is_err());
    }

    #[test]
    fn truncated_series_is_below_converged_profile() {
        let s = al_alumina(1.0);
        let six = eta_at(&s, 0.0, SeriesTruncation::Terms(6), 300.0).unwrap();
        let conv = eta_at(&s, 0.0, SeriesTruncation::Converged, 300.0).unwrap();
        assert!(six > conv && six < 0.5);
    }

    #[test]
    fn critical_rise_conversions() {
        let sc = ThermalScalars {
            x: 2.0,
            y: 1.0,
            z: 1.0,
        };
        assert_eq!(
            critical_delta_t(10.0, ProfileKind::Uniform, &sc, 0.0, 0.0).unwrap(),
            5.0
        );
        assert_eq!(
            critical_delta_t(10.0, ProfileKind::Linear, &sc, 0.0, 0.0).unwrap(),
            10.0
        );
        assert_eq!(
            critical_delta_t(10.0, ProfileKind::Conduction, &sc, 2.0, 1.0).unwrap(),
            8.0
        );
        let bad = ThermalScalars {
            x: 1.0,
            y: 0.0,
            z: -1.0,
        };
        assert!(matches!(
            critical_delta_t(1.0, ProfileKind::Linear, &bad, 0.0, 0.0),
            Err(Error::Material(_))
        ));
    }

    #[test]
    fn homogeneous_conduction_doubles_uniform_rise() {
        let s = al_alumina(0.0);
        let field = ThermalField::new(
            TemperatureProfile::conduction(0.0, 1.0, 0.0),
            &s,
            PropertyTemperature::default(),
        )
        .unwrap();
        let sc = s
            .thermal_scalars(&field, DenominatorConvention::OneMinusNu)
            .unwrap();
        let u = critical_delta_t(1e4, ProfileKind::Uniform, &sc, 0.0, 0.0).unwrap();
        let c = critical_delta_t(1e4, ProfileKind::Conduction, &sc, 0.0, 0.0).unwrap();
        assert!((c / u - 2.0).abs() < 1e-12);
    }
}
