//! Physical parameters of the two regions and the coefficients derived from
//! them.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One or more invalid parameters, each with the offending field name.
#[derive(Debug, Error, Clone, PartialEq)]
pub struct ParameterError {
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl ParameterError {
    pub fn single(field: impl Into<String>, message: impl Into<String>) -> Self {
        ParameterError { violations: vec![Violation { field: field.into(), message: message.into() }] }
    }
}

impl fmt::Display for ParameterError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("invalid parameters: ")?;
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{}: {}", v.field, v.message)?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct Checker {
    prefix: &'static str,
    violations: Vec<Violation>,
}

impl Checker {
    fn require(&mut self, ok: bool, field: &str, message: impl Into<String>) {
        if !ok {
            self.violations.push(Violation { field: format!("{}{field}", self.prefix), message: message.into() });
        }
    }

    fn finish(self) -> Result<(), ParameterError> {
        if self.violations.is_empty() {
            Ok(())
        } else {
            Err(ParameterError { violations: self.violations })
        }
    }
}

/// Visco-elastic medium.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElasticParams {
    #[serde(alias = "rho", alias = "rho_e")]
    pub density: f64,
    pub lambda: f64,
    pub mu: f64,
    /// Viscous damping rate (1/s).
    #[serde(alias = "zeta", default)]
    pub damping: f64,
}

impl ElasticParams {
    pub fn validate(&self) -> Result<(), ParameterError> {
        let mut c = Checker { prefix: "elastic.", ..Default::default() };
        c.require(self.density > 0.0 && self.density.is_finite(), "density", "must be positive");
        c.require(self.mu > 0.0 && self.mu.is_finite(), "mu", "must be positive");
        c.require(self.lambda >= 0.0 && self.lambda.is_finite(), "lambda", "must be non-negative");
        c.require(self.damping >= 0.0 && self.damping.is_finite(), "damping", "must be non-negative");
        c.finish()
    }

    /// Compressional and shear speeds.
    pub fn speeds(&self) -> Result<(f64, f64), ParameterError> {
        elastic_speeds(self)
    }
}

/// Largest eigenvalue of the isotropic stiffness tensor acting on symmetric
/// 2x2 tensors in the orthonormal (Mandel) representation.
pub fn stiffness_norm(lambda: f64, mu: f64) -> f64 {
    (2.0 * mu).max(2.0 * lambda + 2.0 * mu)
}

pub fn elastic_speeds(params: &ElasticParams) -> Result<(f64, f64), ParameterError> {
    params.validate()?;
    let cp = ((params.lambda + 2.0 * params.mu) / params.density).sqrt();
    let cs = (params.mu / params.density).sqrt();
    Ok((cp, cs))
}

/// Low-frequency Biot medium.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoroParams {
    #[serde(alias = "rho_s")]
    pub solid_density: f64,
    #[serde(alias = "rho_f")]
    pub fluid_density: f64,
    #[serde(alias = "phi")]
    pub porosity: f64,
    #[serde(alias = "a")]
    pub tortuosity: f64,
    #[serde(alias = "eta")]
    pub viscosity: f64,
    #[serde(alias = "k")]
    pub permeability: f64,
    pub lambda: f64,
    pub mu: f64,
    #[serde(alias = "m")]
    pub biot_modulus: f64,
    #[serde(alias = "beta")]
    pub biot_coefficient: f64,
    #[serde(alias = "zeta", default)]
    pub damping: f64,
}

impl PoroParams {
    pub fn validate(&self) -> Result<(), ParameterError> {
        let mut c = Checker { prefix: "poroelastic.", ..Default::default() };
        let pos = |x: f64| x > 0.0 && x.is_finite();
        let nonneg = |x: f64| x >= 0.0 && x.is_finite();
        c.require(pos(self.solid_density), "solid_density", "must be positive");
        c.require(nonneg(self.fluid_density), "fluid_density", "must be non-negative");
        c.require(self.porosity > 0.0 && self.porosity < 1.0, "porosity", "must lie in (0, 1)");
        c.require(self.tortuosity >= 1.0 && self.tortuosity.is_finite(), "tortuosity", "must be at least 1");
        c.require(nonneg(self.viscosity), "viscosity", "must be non-negative");
        c.require(pos(self.permeability), "permeability", "must be positive");
        c.require(nonneg(self.lambda), "lambda", "must be non-negative");
        c.require(pos(self.mu), "mu", "must be positive");
        c.require(pos(self.biot_modulus), "biot_modulus", "must be positive");
        c.require(
            self.biot_coefficient >= 0.0 && self.biot_coefficient <= 1.0,
            "biot_coefficient",
            "must lie in [0, 1]",
        );
        c.require(nonneg(self.damping), "damping", "must be non-negative");
        c.finish()
    }

    /// Conditions that are physically dubious but accepted.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.biot_coefficient <= self.porosity {
            w.push(format!(
                "biot_coefficient {} does not exceed porosity {}",
                self.biot_coefficient, self.porosity
            ));
        }
        w
    }

    /// Darcy drag coefficient eta / k.
    pub fn drag(&self) -> f64 {
        self.viscosity / self.permeability
    }
}

/// Coefficients computed from [`PoroParams`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedPoro {
    /// phi rho_f + (1 - phi) rho_s
    pub bulk_density: f64,
    /// (a / phi) rho_f
    pub apparent_fluid_density: f64,
    /// (1 - phi) rho_s / 2, weight of the solid displacement in the L2 norm.
    pub norm_density: f64,
    /// lambda + beta^2 m
    pub undrained_lambda: f64,
    pub fast_p_speed: f64,
    pub slow_p_speed: f64,
    pub shear_speed: f64,
}

pub fn derive_poro(params: &PoroParams) -> Result<DerivedPoro, ParameterError> {
    params.validate()?;
    for w in params.warnings() {
        log::warn!("{w}");
    }
    let bulk = params.porosity * params.fluid_density + (1.0 - params.porosity) * params.solid_density;
    let apparent = params.tortuosity / params.porosity * params.fluid_density;
    let det = bulk * apparent - params.fluid_density * params.fluid_density;
    if !(det > 0.0) {
        return Err(ParameterError::single(
            "poroelastic.fluid_density",
            format!("mass block [[{bulk}, rho_f], [rho_f, {apparent}]] is not positive definite"),
        ));
    }
    let (fast, slow) = compressional_speeds(params, bulk, apparent)?;
    let shear_mass = bulk - params.fluid_density * params.porosity / params.tortuosity;
    Ok(DerivedPoro {
        bulk_density: bulk,
        apparent_fluid_density: apparent,
        norm_density: 0.5 * (1.0 - params.porosity) * params.solid_density,
        undrained_lambda: params.lambda + params.biot_coefficient.powi(2) * params.biot_modulus,
        fast_p_speed: fast,
        slow_p_speed: slow,
        shear_speed: (params.mu / shear_mass).sqrt(),
    })
}

/// (fast P, slow P, shear) speeds.
pub fn poro_speeds(params: &PoroParams) -> Result<(f64, f64, f64), ParameterError> {
    let d = derive_poro(params)?;
    Ok((d.fast_p_speed, d.slow_p_speed, d.shear_speed))
}

fn compressional_speeds(params: &PoroParams, bulk: f64, apparent: f64) -> Result<(f64, f64), ParameterError> {
    let m = params.biot_modulus;
    let beta = params.biot_coefficient;
    let density = [[bulk, params.fluid_density], [params.fluid_density, apparent]];
    let stiffness = [[params.lambda + 2.0 * params.mu + m * beta * beta, m * beta], [m * beta, m]];
    pencil_speeds(density, stiffness)
}

/// Square roots of the eigenvalues of the symmetric-definite pencil
/// `stiffness v = L density v`, largest first.
pub fn pencil_speeds(density: [[f64; 2]; 2], stiffness: [[f64; 2]; 2]) -> Result<(f64, f64), ParameterError> {
    let [[b11, b12], [_, b22]] = stiffness;
    if !(b11 > 0.0 && b11 * b22 - b12 * b12 > 0.0) {
        return Err(ParameterError::single("poroelastic", "stiffness block is not positive definite"));
    }
    let [[a11, a12], [_, a22]] = density;
    if !(a11 > 0.0 && a11 * a22 - a12 * a12 > 0.0) {
        return Err(ParameterError::single("poroelastic", "density block is not positive definite"));
    }
    // density = L L^T; C = L^{-1} stiffness L^{-T} is symmetric with the same spectrum.
    let l11 = a11.sqrt();
    let l21 = a12 / l11;
    let l22 = (a22 - l21 * l21).sqrt();
    // Y = L^{-1} B
    let y11 = b11 / l11;
    let y12 = b12 / l11;
    let y21 = (b12 - l21 * y11) / l22;
    let y22 = (b22 - l21 * y12) / l22;
    // C = Y L^{-T}
    let c11 = y11 / l11;
    let c21 = y21 / l11;
    let c22 = (y22 - c21 * l21) / l22;
    let mean = 0.5 * (c11 + c22);
    let radius = (0.5 * (c11 - c22)).hypot(c21);
    let high = mean + radius;
    // The product of the eigenvalues is det(C); avoids cancellation in mean - radius.
    let low = (c11 * c22 - c21 * c21) / high;
    Ok((high.sqrt(), low.sqrt()))
}

/// Poro-elastic parameters bundled with their derived coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoroMaterial {
    pub params: PoroParams,
    pub derived: DerivedPoro,
}

impl PoroMaterial {
    pub fn new(params: PoroParams) -> Result<Self, ParameterError> {
        Ok(PoroMaterial { derived: derive_poro(&params)?, params })
    }
}

/// Material of each region.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Materials {
    pub elastic: Option<ElasticParams>,
    pub poro: Option<PoroMaterial>,
}

impl Materials {
    pub fn new(elastic: Option<ElasticParams>, poro: Option<PoroParams>) -> Result<Self, ParameterError> {
        if let Some(e) = &elastic {
            e.validate()?;
        }
        let poro = poro.map(PoroMaterial::new).transpose()?;
        Ok(Materials { elastic, poro })
    }
}
