//! Maximal operators and Riesz potentials measured in Choquet integrals,
//! plus their classical Riemann-sum counterparts.
//!
//! Ball averages divide by the analytic value `r^delta` of the content of a
//! ball, whichever backend computes the numerator. Restricted integrals use
//! center-mode lattice balls: a cell belongs to `B(p, r)` when its center is
//! at distance `< r` from `p`.

pub mod ladder;
mod maximal;
mod riesz;

pub use ladder::{BallStencils, RadiusLadder};
pub use maximal::{
    classical_maximal, maximal_centered, maximal_sharp, maximal_uncentered, Candidates,
};
pub use riesz::{classical_riesz, riesz_potential};

use serde::Serialize;
use serde_json::{json, Value};

use crate::choquet::Backend;
use crate::error::{param, Result};
use crate::geometry::GridFunction;
use crate::io;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorParams {
    pub operator: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backend: Option<Backend>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ladder: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance_floor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stride: Option<u32>,
}

impl OperatorParams {
    fn named(operator: &str) -> Self {
        Self {
            operator: operator.to_string(),
            delta: None,
            kappa: None,
            alpha: None,
            backend: None,
            ladder: None,
            distance_floor: None,
            stride: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorResult {
    pub output: GridFunction,
    pub params: OperatorParams,
    pub input_digest: String,
}

impl OperatorResult {
    fn new(output: GridFunction, params: OperatorParams, input: &GridFunction) -> Self {
        Self { output, params, input_digest: io::function_digest(input) }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": io::SCHEMA_VERSION,
            "tool_version": io::TOOL_VERSION,
            "params": self.params,
            "input_digest": self.input_digest,
            "output_digest": io::function_digest(&self.output),
            "output": io::function_to_json(&self.output),
        })
    }
}

pub(crate) fn check_kappa(n: usize, delta: f64, kappa: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= n as f64) {
        return param(format!("delta must lie in (0, n] = (0, {n}], got {delta}"));
    }
    if !(kappa >= 0.0 && kappa < delta) {
        return param(format!("kappa must satisfy 0 <= kappa < delta = {delta}, got {kappa}"));
    }
    Ok(())
}

pub(crate) fn check_alpha(n: usize, delta: f64, alpha: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= n as f64) {
        return param(format!("delta must lie in (0, n] = (0, {n}], got {delta}"));
    }
    if !(alpha > 0.0 && alpha < delta) {
        return param(format!("alpha must satisfy 0 < alpha < delta = {delta}, got {alpha}"));
    }
    Ok(())
}

#[cfg(test)]
mod tests;
