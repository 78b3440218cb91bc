use nalgebra::{Matrix2, Matrix3, SMatrix, SVector};
use serde::{Deserialize, Serialize};

use super::integrate::integrate_thickness;
use super::{Phase, Property};
use crate::error::{arg, Error, Result};
use crate::thermal::ThermalField;

/// Third-order shear function `f(z) = z - 4 z^3 / (3 h^2)`.
#[inline]
pub fn reddy_f(z: f64, h: f64) -> f64 {
    z - 4.0 * z * z * z / (3.0 * h * h)
}

#[inline]
pub fn reddy_f_prime(z: f64, h: f64) -> f64 {
    1.0 - 4.0 * z * z / (h * h)
}

/// Ceramic/metal power-law graded plate section. The top face (`z = h/2`)
/// is pure ceramic, the bottom face pure metal.
#[derive(Debug, Clone, PartialEq)]
pub struct FgmSection {
    pub ceramic: Phase,
    pub metal: Phase,
    pub gradient_index: f64,
    pub thickness: f64,
}

/// Plate stiffness blocks `A, B, D, E, F, H` (3x3) and the transverse
/// shear block `Ds` (2x2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstitutiveResultants {
    pub a: Matrix3<f64>,
    pub b: Matrix3<f64>,
    pub d: Matrix3<f64>,
    pub e: Matrix3<f64>,
    pub f: Matrix3<f64>,
    pub h: Matrix3<f64>,
    pub ds: Matrix2<f64>,
}

/// Thermal force, moment and higher-order moment resultants.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ThermalResultants {
    pub n: [f64; 3],
    pub m: [f64; 3],
    pub p: [f64; 3],
}

/// Weighted through-thickness integrals of `E alpha / (1 -+ nu)` used to
/// convert a critical thermal force into a temperature rise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalScalars {
    /// Unit weight.
    pub x: f64,
    /// Linear weight `z/h + 1/2`.
    pub y: f64,
    /// Conduction weight `eta(z)`.
    pub z: f64,
}

/// Denominator used in the thermal scalars.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DenominatorConvention {
    /// `E alpha / (1 - nu)`: what integrating the plane-stress thermal
    /// force gives.
    #[default]
    OneMinusNu,
    /// `E alpha / (1 + nu)`.
    OnePlusNu,
}

impl ConstitutiveResultants {
    /// The 11x11 generalized constitutive matrix acting on
    /// `(eps_m, kappa_1, kappa_2, gamma)`.
    pub fn d_hat(&self) -> SMatrix<f64, 11, 11> {
        let mut m = SMatrix::<f64, 11, 11>::zeros();
        let blocks = [
            [&self.a, &self.b, &self.e],
            [&self.b, &self.d, &self.f],
            [&self.e, &self.f, &self.h],
        ];
        for (bi, row) in blocks.iter().enumerate() {
            for (bj, blk) in row.iter().enumerate() {
                m.fixed_view_mut::<3, 3>(3 * bi, 3 * bj).copy_from(*blk);
            }
        }
        m.fixed_view_mut::<2, 2>(9, 9).copy_from(&self.ds);
        m
    }

    /// Smallest eigenvalues of (A, D, H, Ds).
    pub fn smallest_eigenvalues(&self) -> [f64; 4] {
        let min3 = |m: &Matrix3<f64>| m.symmetric_eigenvalues().min();
        [
            min3(&self.a),
            min3(&self.d),
            min3(&self.h),
            self.ds.symmetric_eigenvalues().min(),
        ]
    }
}

impl ThermalResultants {
    /// Generalized initial stress vector `(N, M, P, 0, 0)`.
    pub fn sigma0(&self) -> SVector<f64, 11> {
        let mut v = SVector::<f64, 11>::zeros();
        for i in 0..3 {
            v[i] = self.n[i];
            v[3 + i] = self.m[i];
            v[6 + i] = self.p[i];
        }
        v
    }

    pub fn scaled(&self, c: f64) -> Self {
        let s = |a: [f64; 3]| a.map(|x| x * c);
        Self {
            n: s(self.n),
            m: s(self.m),
            p: s(self.p),
        }
    }
}

impl FgmSection {
    pub fn new(ceramic: Phase, metal: Phase, gradient_index: f64, thickness: f64) -> Result<Self> {
        if !(gradient_index >= 0.0 && gradient_index.is_finite()) {
            return Err(arg(format!(
                "gradient index must be >= 0, got {gradient_index}"
            )));
        }
        if !(thickness > 0.0 && thickness.is_finite()) {
            return Err(arg(format!("thickness must be positive, got {thickness}")));
        }
        Ok(Self {
            ceramic,
            metal,
            gradient_index,
            thickness,
        })
    }

    /// Single-material section.
    pub fn homogeneous(phase: Phase, thickness: f64) -> Result<Self> {
        Self::new(phase.clone(), phase, 0.0, thickness)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.gradient_index == 0.0 || self.ceramic == self.metal
    }

    fn check_z(&self, z: f64) -> Result<()> {
        let half = 0.5 * self.thickness;
        if z.abs() > half * (1.0 + 1e-12) {
            return Err(Error::Domain {
                quantity: "z",
                value: z,
                range: format!("[{}, {}]", -half, half),
            });
        }
        Ok(())
    }

    /// Ceramic volume fraction `(1/2 + z/h)^n`.
    pub fn volume_fraction(&self, z: f64) -> Result<f64> {
        self.check_z(z)?;
        let s = (0.5 + z / self.thickness).clamp(0.0, 1.0);
        Ok(s.powf(self.gradient_index))
    }

    /// Rule-of-mixtures property at thickness coordinate `z` and absolute
    /// temperature `t`.
    pub fn effective(&self, property: Property, z: f64, t: f64) -> Result<f64> {
        let vc = self.volume_fraction(z)?;
        let pc = self.ceramic.property_at(property, t)?;
        let pm = self.metal.property_at(property, t)?;
        Ok(pc * vc + pm * (1.0 - vc))
    }

    fn elastic(&self, z: f64, t: f64) -> Result<(f64, f64, f64)> {
        let vc = self.volume_fraction(z)?;
        let mix = |p: Property| -> Result<f64> {
            Ok(self.ceramic.property_at(p, t)? * vc + self.metal.property_at(p, t)? * (1.0 - vc))
        };
        Ok((
            mix(Property::YoungsModulus)?,
            mix(Property::Poisson)?,
            mix(Property::Expansion)?,
        ))
    }

    /// Stiffness blocks with material properties evaluated at the absolute
    /// temperature `kelvin(z)`.
    pub fn stiffness_with<T>(&self, kelvin: T) -> Result<ConstitutiveResultants>
    where
        T: Fn(f64) -> Result<f64>,
    {
        let h = self.thickness;
        // per weight (1, z, z^2, f, z f, f^2): Q11, Q12, Q66; then shear
        let v = integrate_thickness::<19, _>(h, |z| {
            let (e, nu, _) = self.elastic(z, kelvin(z)?)?;
            let q11 = e / (1.0 - nu * nu);
            let q12 = nu * q11;
            let q66 = 0.5 * e / (1.0 + nu);
            let f = reddy_f(z, h);
            let weights = [1.0, z, z * z, f, z * f, f * f];
            let mut out = [0.0; 19];
            for (k, w) in weights.iter().enumerate() {
                out[3 * k] = w * q11;
                out[3 * k + 1] = w * q12;
                out[3 * k + 2] = w * q66;
            }
            let fp = reddy_f_prime(z, h);
            out[18] = fp * fp * q66;
            Ok(out)
        })?;
        let block = |k: usize| {
            let (q11, q12, q66) = (v[3 * k], v[3 * k + 1], v[3 * k + 2]);
            Matrix3::new(q11, q12, 0.0, q12, q11, 0.0, 0.0, 0.0, q66)
        };
        Ok(ConstitutiveResultants {
            a: block(0),
            b: block(1),
            d: block(2),
            e: block(3),
            f: block(4),
            h: block(5),
            ds: Matrix2::new(v[18], 0.0, 0.0, v[18]),
        })
    }

    pub fn stiffness(&self, field: &ThermalField) -> Result<ConstitutiveResultants> {
        self.stiffness_with(|z| field.property_kelvin(z))
    }

    /// Thermal resultants for a temperature change `delta(z)` with
    /// properties at `kelvin(z)`. The three weights are `(1, z, f(z))`.
    pub fn thermal_resultants_with<T, D>(&self, kelvin: T, delta: D) -> Result<ThermalResultants>
    where
        T: Fn(f64) -> Result<f64>,
        D: Fn(f64) -> Result<f64>,
    {
        let h = self.thickness;
        let v = integrate_thickness::<3, _>(h, |z| {
            let dt = delta(z)?;
            if dt == 0.0 {
                return Ok([0.0; 3]);
            }
            let (e, nu, alpha) = self.elastic(z, kelvin(z)?)?;
            // C (alpha, alpha, 0)^T has equal first two rows
            let s = e * alpha / (1.0 - nu) * dt;
            Ok([s, s * z, s * reddy_f(z, h)])
        })?;
        Ok(ThermalResultants {
            n: [v[0], v[0], 0.0],
            m: [v[1], v[1], 0.0],
            p: [v[2], v[2], 0.0],
        })
    }

    pub fn thermal_resultants(&self, field: &ThermalField) -> Result<ThermalResultants> {
        self.thermal_resultants_with(|z| field.property_kelvin(z), |z| field.delta(z))
    }

    pub fn thermal_scalars_with<T, W>(
        &self,
        kelvin: T,
        eta: W,
        convention: DenominatorConvention,
    ) -> Result<ThermalScalars>
    where
        T: Fn(f64) -> Result<f64>,
        W: Fn(f64) -> Result<f64>,
    {
        let h = self.thickness;
        let v = integrate_thickness::<3, _>(h, |z| {
            let (e, nu, alpha) = self.elastic(z, kelvin(z)?)?;
            let denom = match convention {
                DenominatorConvention::OneMinusNu => 1.0 - nu,
                DenominatorConvention::OnePlusNu => 1.0 + nu,
            };
            let g = e * alpha / denom;
            Ok([g, g * (z / h + 0.5), g * eta(z)?])
        })?;
        Ok(ThermalScalars {
            x: v[0],
            y: v[1],
            z: v[2],
        })
    }

    pub fn thermal_scalars(
        &self,
        field: &ThermalField,
        convention: DenominatorConvention,
    ) -> Result<ThermalScalars> {
        self.thermal_scalars_with(|z| field.property_kelvin(z), |z| field.eta(z), convention)
    }
}
