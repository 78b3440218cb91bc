use serde::{Deserialize, Serialize};

use crate::discretization::BoundaryCondition;
use crate::error::{Error, Result};
use crate::materials::{lookup, DenominatorConvention, FgmSection, Phase, BUILTIN_NAMES};
use crate::solvers::{NewtonConfig, PostBucklingConfig};
use crate::splines::{shapes, NurbsSurface};
use crate::thermal::{PropertyTemperature, TemperatureProfile, TemperatureScale};

pub const PRESETS: [&str; 3] = ["square", "circle", "skew"];

/// Plate mid-surface. Lengths in metres, angle in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum Geometry {
    Square {
        length: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        width: Option<f64>,
    },
    Circle {
        radius: f64,
    },
    Skew {
        length: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        width: Option<f64>,
        angle: f64,
    },
}

impl Geometry {
    /// Length `a` used by the normalizations: side length, or radius.
    pub fn characteristic_length(&self) -> f64 {
        match *self {
            Geometry::Square { length, .. } | Geometry::Skew { length, .. } => length,
            Geometry::Circle { radius } => radius,
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Case(format!(
                    "geometry.{name} must be positive, got {v}"
                )))
            }
        };
        match *self {
            Geometry::Square { length, width } => {
                positive("length", length)?;
                width.map_or(Ok(()), |w| positive("width", w))
            }
            Geometry::Circle { radius } => positive("radius", radius),
            Geometry::Skew {
                length,
                width,
                angle,
            } => {
                positive("length", length)?;
                width.map_or(Ok(()), |w| positive("width", w))?;
                if !(angle.abs() < 90.0) {
                    return Err(Error::Case(format!(
                        "geometry.angle must lie in (-90, 90), got {angle}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Single-element patch of the requested degree.
    pub fn surface(&self, degree: usize) -> Result<NurbsSurface> {
        match *self {
            Geometry::Square { length, width } => {
                shapes::rectangle(length, width.unwrap_or(length), 1, degree)
            }
            Geometry::Skew {
                length,
                width,
                angle,
            } => shapes::skew(length, width.unwrap_or(length), angle, 1, degree),
            Geometry::Circle { radius } => {
                if degree != 2 {
                    return Err(Error::Config(format!(
                        "the circular patch is exactly quadratic; degree {degree} would need order elevation"
                    )));
                }
                shapes::disk(radius, 1)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshSpec {
    pub degree: usize,
    /// Elements per patch direction.
    pub refine: usize,
}

impl Default for MeshSpec {
    fn default() -> Self {
        Self {
            degree: 3,
            refine: 8,
        }
    }
}

/// A library material by name, or inline coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MaterialRef {
    Name(String),
    Inline(Phase),
}

impl MaterialRef {
    pub fn resolve(&self) -> Result<Phase> {
        match self {
            MaterialRef::Name(n) => lookup(n).ok_or_else(|| {
                Error::Material(format!(
                    "unknown material `{n}`; built-in names are {}",
                    BUILTIN_NAMES.join(", ")
                ))
            }),
            MaterialRef::Inline(p) => Ok(p.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec {
    pub ceramic: MaterialRef,
    pub metal: MaterialRef,
    #[serde(default)]
    pub gradient_index: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Linear,
    Newton,
    Buckling,
    Postbuckling,
}

/// Transverse pressure (N/m^2, positive along +z) and temperature field.
/// For buckling analyses the profile supplies the kind, the bottom face
/// and initial temperatures; its rise is the unknown.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Loads {
    pub pressure: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temperature: Option<TemperatureProfile>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSpec {
    pub newton: NewtonConfig,
    pub buckling: PostBucklingConfig,
    pub denominator: DenominatorConvention,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    /// Samples through the thickness for stress output.
    pub thickness_points: usize,
    /// Parametric point for deflection and stress output.
    pub point: [f64; 2],
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            thickness_points: 21,
            point: [0.5, 0.5],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSpec {
    #[serde(default = "default_name")]
    pub name: String,
    pub geometry: Geometry,
    pub thickness: f64,
    #[serde(default)]
    pub mesh: MeshSpec,
    pub material: MaterialSpec,
    pub boundary: BoundaryCondition,
    pub analysis: Analysis,
    #[serde(default)]
    pub loads: Loads,
    #[serde(default)]
    pub properties: PropertyTemperature,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_name() -> String {
    "case".into()
}

impl CaseSpec {
    /// Parses and validates a case file. Schema errors name the offending
    /// field path.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let spec: CaseSpec = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::Case(format!("at `{path}`: {}", e.into_inner()))
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("case specs always serialize")
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        if !(self.thickness.is_finite() && self.thickness > 0.0) {
            return Err(Error::Case(format!(
                "thickness must be positive, got {}",
                self.thickness
            )));
        }
        if self.mesh.degree < 2 {
            return Err(Error::Case(format!(
                "mesh.degree must be at least 2, got {}",
                self.mesh.degree
            )));
        }
        if self.mesh.refine == 0 {
            return Err(Error::Case("mesh.refine must be at least 1".into()));
        }
        if matches!(self.geometry, Geometry::Circle { .. }) && self.mesh.degree != 2 {
            return Err(Error::Case(format!(
                "mesh.degree must be 2 for the circular patch, got {}",
                self.mesh.degree
            )));
        }
        self.section()?;
        match self.analysis {
            Analysis::Buckling | Analysis::Postbuckling if self.loads.temperature.is_none() => {
                return Err(Error::Case(format!(
                    "loads.temperature is required for {:?} analysis",
                    self.analysis
                )))
            }
            Analysis::Newton => self.solver.newton.validate()?,
            Analysis::Postbuckling => self.solver.buckling.validate()?,
            _ => {}
        }
        let p = self.output.point;
        if !(0.0..=1.0).contains(&p[0])
            || !(0.0..=1.0).contains(&p[1])
            || self.output.thickness_points < 2
        {
            return Err(Error::Case(
                "output.point must be parametric in [0, 1]^2 and output.thickness_points >= 2"
                    .into(),
            ));
        }
        Ok(())
    }

    pub fn section(&self) -> Result<FgmSection> {
        let c = self.material.ceramic.resolve()?;
        let m = self.material.metal.resolve()?;
        FgmSection::new(c, m, self.material.gradient_index, self.thickness)
    }

    /// Temperature profile, defaulting to a stress-free field at 300 K.
    pub fn temperature(&self) -> TemperatureProfile {
        self.loads
            .temperature
            .unwrap_or_else(|| TemperatureProfile::uniform(300.0, 300.0))
    }

    /// Skeleton cases: `square` (Al/ZrO2 thermo-mechanical bending),
    /// `circle` (clamped Al/Al2O3 thermal buckling, R/h = 100) and `skew`
    /// (clamped 45 degree Al/Al2O3 thermal buckling).
    pub fn preset(name: &str) -> Result<Self> {
        let material = |ceramic: &str, n: f64| MaterialSpec {
            ceramic: MaterialRef::Name(ceramic.into()),
            metal: MaterialRef::Name("Al".into()),
            gradient_index: n,
        };
        match name {
            "square" => Ok(Self {
                name: "square".into(),
                geometry: Geometry::Square {
                    length: 0.2,
                    width: None,
                },
                thickness: 0.01,
                mesh: MeshSpec::default(),
                material: material("ZrO2", 0.0),
                boundary: BoundaryCondition::Ssss1,
                analysis: Analysis::Newton,
                loads: Loads {
                    pressure: -1.0e7,
                    temperature: Some(
                        TemperatureProfile::conduction(20.0, 300.0, 0.0)
                            .with_scale(TemperatureScale::Celsius),
                    ),
                },
                properties: PropertyTemperature::default(),
                solver: SolverSpec::default(),
                output: OutputSpec::default(),
            }),
            "circle" => Ok(Self {
                name: "circle".into(),
                geometry: Geometry::Circle { radius: 0.5 },
                thickness: 0.005,
                mesh: MeshSpec {
                    degree: 2,
                    refine: 16,
                },
                material: material("Al2O3", 0.0),
                boundary: BoundaryCondition::Clamped,
                analysis: Analysis::Buckling,
                loads: Loads {
                    pressure: 0.0,
                    temperature: Some(TemperatureProfile::uniform(300.0, 300.0)),
                },
                properties: PropertyTemperature::default(),
                solver: SolverSpec::default(),
                output: OutputSpec::default(),
            }),
            "skew" => Ok(Self {
                name: "skew".into(),
                geometry: Geometry::Skew {
                    length: 0.2,
                    width: None,
                    angle: 45.0,
                },
                thickness: 0.01,
                mesh: MeshSpec::default(),
                material: material("Al2O3", 1.0),
                boundary: BoundaryCondition::Clamped,
                analysis: Analysis::Buckling,
                loads: Loads {
                    pressure: 0.0,
                    temperature: Some(TemperatureProfile::uniform(300.0, 300.0)),
                },
                properties: PropertyTemperature::default(),
                solver: SolverSpec::default(),
                output: OutputSpec::default(),
            }),
            other => Err(Error::Case(format!(
                "unknown preset `{other}`; expected one of {}",
                PRESETS.join(", ")
            ))),
        }
    }
}
