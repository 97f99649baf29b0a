use serde::{Deserialize, Serialize};

use super::builtin::{builtin_model, flux_from_real, Params};
use super::geometry::{Boundary, LatticeGeometry};
use super::model::{DisorderChannel, TightBindingModel};
use crate::error::{Error, Result};

/// Boundary given once for all axes or per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundarySpec {
    Uniform(Boundary),
    PerAxis(Vec<Boundary>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub d: usize,
    pub extent: Vec<usize>,
    pub boundary: BoundarySpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderSpec {
    #[serde(rename = "W")]
    pub w: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_channel")]
    pub channel: DisorderChannel,
}

fn default_channel() -> DisorderChannel {
    DisorderChannel::ScalarOnsite
}

/// The model block shared by library and command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub model: String,
    #[serde(default)]
    pub params: Params,
    pub geometry: GeometrySpec,
    #[serde(default)]
    pub flux: Option<f64>,
    #[serde(default)]
    pub disorder: Option<DisorderSpec>,
}

fn invalid(path: &str, message: impl Into<String>) -> Error {
    Error::ConfigInvalid { path: path.to_string(), message: message.into() }
}

impl ModelSpec {
    pub fn from_toml(text: &str) -> Result<ModelSpec> {
        toml::from_str(text).map_err(|e| invalid("", e.to_string()))
    }

    pub fn geometry(&self, orbitals: usize) -> Result<LatticeGeometry> {
        let g = &self.geometry;
        if g.extent.len() != g.d {
            return Err(invalid("geometry.extent", format!("expected {} entries", g.d)));
        }
        let boundary = match &g.boundary {
            BoundarySpec::Uniform(b) => vec![*b; g.d],
            BoundarySpec::PerAxis(v) if v.len() == g.d => v.clone(),
            BoundarySpec::PerAxis(_) => return Err(invalid("geometry.boundary", format!("expected {} entries", g.d))),
        };
        LatticeGeometry::new(g.extent.clone(), orbitals, boundary).map_err(|e| invalid("geometry", e.to_string()))
    }

    /// Model, geometry and disorder seed.
    pub fn realize(&self) -> Result<(TightBindingModel, LatticeGeometry, u64)> {
        let mut model = builtin_model(&self.model, &self.params).map_err(|e| match e {
            Error::UnknownModel(m) => invalid("model", format!("unknown model '{m}'")),
            Error::MissingParameter { param, .. } => invalid(&format!("params.{param}"), "missing parameter"),
            other => invalid("params", other.to_string()),
        })?;
        if self.geometry.d != model.d {
            return Err(invalid("geometry.d", format!("model '{}' has d = {}", self.model, model.d)));
        }
        if let Some(f) = self.flux {
            model.flux = flux_from_real(f);
        }
        let mut seed = 0;
        if let Some(dis) = &self.disorder {
            if !(dis.w >= 0.0) {
                return Err(invalid("disorder.W", "must be non-negative"));
            }
            model = model.with_disorder(dis.w, dis.channel);
            seed = dis.seed;
        }
        let geom = self.geometry(model.orbitals)?;
        Ok((model, geom, seed))
    }
}
