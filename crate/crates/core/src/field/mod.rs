//! Privacy risk field: fast-marching distance from sensitive rooms, shaped
//! by a Gaussian, summed along a path.

mod export;
mod fmm;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Cell, GridGeometry};
use crate::planning::MetricPath;

pub use export::{field_heatmap_png, read_field, write_field, FieldRaster};
pub use fmm::{exact_distance_oracle, fmm_distance};

pub const DEFAULT_SIGMA_D: f64 = 3.0;

/// Distance in cells to the nearest source; `f64::INFINITY` where unreached.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceField {
    geometry: GridGeometry,
    values: Vec<f64>,
}

impl DistanceField {
    pub fn new(geometry: GridGeometry, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), geometry.len(), "one value per cell");
        DistanceField { geometry, values }
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn get(&self, cell: Cell) -> f64 {
        self.values[self.geometry.index(cell)]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest finite value, 0 when there is none.
    pub fn max_finite(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldMode {
    /// `exp(-(D - mu)^2 / (2 sigma^2))`: peaks where `D` is largest.
    #[serde(rename = "paper-eq5")]
    Gaussian,
    /// `exp(-D^2 / (2 sigma^2))`: peaks at the sensitive rooms.
    #[default]
    RiskInverted,
}

impl FieldMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FieldMode::Gaussian => "paper-eq5",
            FieldMode::RiskInverted => "risk-inverted",
        }
    }
}

impl fmt::Display for FieldMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FieldMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-eq5" => Ok(FieldMode::Gaussian),
            "risk-inverted" => Ok(FieldMode::RiskInverted),
            _ => Err(Error::InvalidParameter(format!(
                "field mode `{s}` (expected paper-eq5 or risk-inverted)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrivacyField {
    geometry: GridGeometry,
    values: Vec<f64>,
    pub mu: f64,
    pub sigma: f64,
    pub mode: FieldMode,
}

impl PrivacyField {
    /// Wraps precomputed values in `[0, 1]`, e.g. a constant field in tests.
    pub fn from_values(geometry: GridGeometry, values: Vec<f64>, mode: FieldMode) -> Result<Self> {
        if values.len() != geometry.len() {
            return Err(Error::GeometryMismatch(format!(
                "{} values for {} cells",
                values.len(),
                geometry.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidParameter(format!("field value {v} outside [0, 1]")));
        }
        Ok(PrivacyField {
            geometry,
            values,
            mu: 0.0,
            sigma: 0.0,
            mode,
        })
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn get(&self, cell: Cell) -> f64 {
        self.values[self.geometry.index(cell)]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

pub fn gaussian_modulate(d: &DistanceField, sigma_d: f64, mode: FieldMode) -> Result<PrivacyField> {
    if !(sigma_d > 0.0 && sigma_d.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma_d {sigma_d} must be > 0")));
    }
    let mu = d.max_finite();
    if mu <= 0.0 {
        return Err(Error::DegenerateField);
    }
    let sigma = mu / sigma_d;
    let two_var = 2.0 * sigma * sigma;
    let values = d
        .values
        .iter()
        .map(|&v| {
            if !v.is_finite() {
                return 0.0;
            }
            let x = match mode {
                FieldMode::Gaussian => v - mu,
                FieldMode::RiskInverted => v,
            };
            (-(x * x) / two_var).exp()
        })
        .collect();
    Ok(PrivacyField {
        geometry: d.geometry,
        values,
        mu,
        sigma,
        mode,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskScore {
    pub path_id: usize,
    pub risk: f64,
    pub world_length: f64,
    pub cell_length: f64,
}

/// Sum of field values over the path's cells. A cell repeated back to back
/// counts once; a later revisit counts again.
pub fn cell_risk(cells: &[Cell], field: &PrivacyField) -> Result<f64> {
    let g = field.geometry();
    let mut sum = 0.0;
    let mut prev = None;
    for &c in cells {
        if !g.contains(c) {
            return Err(Error::GeometryMismatch(format!(
                "path cell {c} outside the {}x{} field",
                g.width, g.height
            )));
        }
        if prev != Some(c) {
            sum += field.get(c);
        }
        prev = Some(c);
    }
    Ok(sum)
}

pub fn path_risk(path: &MetricPath, field: &PrivacyField) -> Result<RiskScore> {
    Ok(RiskScore {
        path_id: path.path_id,
        risk: cell_risk(&path.cells, field)?,
        world_length: path.world_length,
        cell_length: path.cell_length,
    })
}
