use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients of `P = P0 (P_{-1}/T + 1 + P1 T + P2 T^2 + P3 T^3)`, with
/// `T` in kelvin.
///
/// In case files a coefficient set is written either as a single number
/// (temperature-independent) or as the array `[P_-1, P0, P1, P2, P3]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "CoeffRepr", into = "CoeffRepr")]
pub struct TemperatureCoefficients {
    pub p_inv: f64,
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoeffRepr {
    Constant(f64),
    Full([f64; 5]),
}

impl From<CoeffRepr> for TemperatureCoefficients {
    fn from(r: CoeffRepr) -> Self {
        match r {
            CoeffRepr::Constant(v) => Self::constant(v),
            CoeffRepr::Full([p_inv, p0, p1, p2, p3]) => Self {
                p_inv,
                p0,
                p1,
                p2,
                p3,
            },
        }
    }
}

impl From<TemperatureCoefficients> for CoeffRepr {
    fn from(c: TemperatureCoefficients) -> Self {
        if c.is_constant() {
            CoeffRepr::Constant(c.p0)
        } else {
            CoeffRepr::Full([c.p_inv, c.p0, c.p1, c.p2, c.p3])
        }
    }
}

impl TemperatureCoefficients {
    pub const fn constant(p0: f64) -> Self {
        Self {
            p_inv: 0.0,
            p0,
            p1: 0.0,
            p2: 0.0,
            p3: 0.0,
        }
    }

    pub const fn new(p_inv: f64, p0: f64, p1: f64, p2: f64, p3: f64) -> Self {
        Self {
            p_inv,
            p0,
            p1,
            p2,
            p3,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.p_inv == 0.0 && self.p1 == 0.0 && self.p2 == 0.0 && self.p3 == 0.0
    }

    /// Evaluates the property at absolute temperature `t` (K).
    pub fn at(&self, t: f64) -> Result<f64> {
        if self.p_inv != 0.0 && !(t > 0.0) {
            return Err(Error::Domain {
                quantity: "absolute temperature",
                value: t,
                range: "(0, inf) K".into(),
            });
        }
        let inv = if self.p_inv == 0.0 {
            0.0
        } else {
            self.p_inv / t
        };
        Ok(self.p0 * (inv + 1.0 + t * (self.p1 + t * (self.p2 + t * self.p3))))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Property {
    #[serde(rename = "E")]
    YoungsModulus,
    #[serde(rename = "nu")]
    Poisson,
    #[serde(rename = "alpha")]
    Expansion,
    #[serde(rename = "k")]
    Conductivity,
    #[serde(rename = "rho")]
    Density,
}

/// One constituent of the graded section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub name: String,
    #[serde(rename = "E")]
    pub youngs_modulus: TemperatureCoefficients,
    pub nu: TemperatureCoefficients,
    pub alpha: TemperatureCoefficients,
    pub k: TemperatureCoefficients,
    #[serde(default = "zero_density")]
    pub rho: TemperatureCoefficients,
}

fn zero_density() -> TemperatureCoefficients {
    TemperatureCoefficients::constant(0.0)
}

impl Phase {
    pub fn constant(name: &str, e: f64, nu: f64, k: f64, alpha: f64, rho: f64) -> Self {
        Self {
            name: name.to_string(),
            youngs_modulus: TemperatureCoefficients::constant(e),
            nu: TemperatureCoefficients::constant(nu),
            alpha: TemperatureCoefficients::constant(alpha),
            k: TemperatureCoefficients::constant(k),
            rho: TemperatureCoefficients::constant(rho),
        }
    }

    pub fn coefficients(&self, property: Property) -> &TemperatureCoefficients {
        match property {
            Property::YoungsModulus => &self.youngs_modulus,
            Property::Poisson => &self.nu,
            Property::Expansion => &self.alpha,
            Property::Conductivity => &self.k,
            Property::Density => &self.rho,
        }
    }

    pub fn property_at(&self, property: Property, t: f64) -> Result<f64> {
        self.coefficients(property).at(t)
    }

    pub fn is_temperature_dependent(&self) -> bool {
        [&self.youngs_modulus, &self.nu, &self.alpha, &self.k]
            .iter()
            .any(|c| !c.is_constant())
    }

    /// Checks positivity of E, k and a Poisson ratio inside (0, 0.5) at `t`.
    pub fn validate_at(&self, t: f64) -> Result<()> {
        let e = self.property_at(Property::YoungsModulus, t)?;
        let nu = self.property_at(Property::Poisson, t)?;
        let k = self.property_at(Property::Conductivity, t)?;
        if !(e > 0.0) {
            return Err(Error::Material(format!("{}: E = {e} at {t} K", self.name)));
        }
        if !(nu > 0.0 && nu < 0.5) {
            return Err(Error::Material(format!(
                "{}: nu = {nu} at {t} K",
                self.name
            )));
        }
        if !(k > 0.0) {
            return Err(Error::Material(format!("{}: k = {k} at {t} K", self.name)));
        }
        Ok(())
    }
}

pub const BUILTIN_NAMES: [&str; 5] = ["Al", "Al2O3", "ZrO2", "Si3N4", "SUS304"];

/// Built-in phases. Al, Al2O3 and ZrO2 are temperature independent; Si3N4
/// and SUS304 carry full temperature coefficients.
pub fn lookup(name: &str) -> Option<Phase> {
    use TemperatureCoefficients as C;
    let phase = match name {
        "Al" => Phase::constant("Al", 70e9, 0.3, 204.0, 23e-6, 2707.0),
        "Al2O3" => Phase::constant("Al2O3", 380e9, 0.3, 10.4, 7.2e-6, 3800.0),
        "ZrO2" => Phase::constant("ZrO2", 151e9, 0.3, 2.09, 10e-6, 3000.0),
        "Si3N4" => Phase {
            name: "Si3N4".into(),
            youngs_modulus: C::new(0.0, 3.4843e11, -3.070e-4, 2.160e-7, -8.946e-11),
            nu: C::constant(0.24),
            alpha: C::new(0.0, 5.8723e-6, 9.095e-4, 0.0, 0.0),
            k: C::new(0.0, 13.723, -1.032e-3, 5.47e-7, -7.88e-11),
            rho: C::constant(2370.0),
        },
        "SUS304" => Phase {
            name: "SUS304".into(),
            youngs_modulus: C::new(0.0, 2.0104e11, 3.079e-4, -6.534e-7, 0.0),
            nu: C::new(0.0, 0.3262, -2.00e-4, 3.80e-7, 0.0),
            alpha: C::new(0.0, 1.2330e-5, 8.086e-4, 0.0, 0.0),
            k: C::new(0.0, 15.379, -1.264e-3, 2.09e-6, -7.22e-10),
            rho: C::constant(8166.0),
        },
        _ => return None,
    };
    Some(phase)
}
