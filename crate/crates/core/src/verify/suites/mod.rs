//! Suite registry and shared record helpers.

mod bounded;
mod content;
mod integral;
mod pointwise;

use serde_json::{json, Value};

use super::report::{CapKind, InstanceRecord, SuiteReport};
use super::{InstanceKind, Resolved, SuiteConfig};
use crate::choquet::Backend;
use crate::error::{Error, Result};
use crate::par;

/// Relative slack on every asserted inequality and identity.
pub(crate) const TOL: f64 = 1e-12;

pub(crate) struct Outcome {
    pub records: Vec<InstanceRecord>,
    pub cap: f64,
    pub cap_kind: CapKind,
    pub environment: Value,
    pub notes: Value,
}

struct Suite {
    id: &'static str,
    description: &'static str,
    defaults: fn() -> Resolved,
    run: fn(&Resolved) -> Result<Outcome>,
}

pub(crate) fn base_defaults() -> Resolved {
    Resolved {
        n: 2,
        level: 3,
        delta: 1.5,
        delta2: 2.0,
        kappa: 0.5,
        alpha: 0.5,
        p: 1.0,
        q: 2.0,
        samples: 200,
        seed: 7,
        backend: Backend::DyadicExact,
        families: vec![InstanceKind::RandomSimple],
        coarse_level: None,
        stride: 2,
        floor: None,
    }
}

fn registry() -> Vec<Suite> {
    let mut v = content::suites();
    v.extend(integral::suites());
    v.extend(pointwise::suites());
    v.extend(bounded::suites());
    v
}

pub fn suite_ids() -> Vec<&'static str> {
    registry().iter().map(|s| s.id).collect()
}

pub fn describe(id: &str) -> Option<&'static str> {
    registry().into_iter().find(|s| s.id == id).map(|s| s.description)
}

pub fn run_suite(id: &str, config: &SuiteConfig) -> Result<SuiteReport> {
    let suite = registry()
        .into_iter()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::UnknownSuite(id.to_string()))?;
    let resolved = config.resolve(&(suite.defaults)())?;
    if resolved.samples == 0 {
        return crate::error::param("samples must be positive");
    }
    if resolved.families.is_empty() {
        return crate::error::param("at least one instance family is required");
    }
    let mut out = (suite.run)(&resolved)?;
    if let Value::Object(env) = &mut out.environment {
        env.insert("parallel".into(), json!(par::is_parallel()));
    }
    Ok(SuiteReport::new(
        suite.id,
        suite.description,
        serde_json::to_value(&resolved)?,
        out.environment,
        out.records,
        out.cap,
        out.cap_kind,
        out.notes,
    ))
}

pub(crate) fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else if rhs == 0.0 {
        f64::INFINITY
    } else {
        lhs / rhs
    }
}

pub(crate) fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    (a - b).abs() / a.abs().max(b.abs())
}

/// `lhs <= cap * rhs` up to the relative slack.
pub(crate) fn bound_record(
    index: usize,
    digest: String,
    lhs: f64,
    rhs: f64,
    cap: f64,
    params: Value,
) -> InstanceRecord {
    let r = ratio(lhs, rhs);
    InstanceRecord { index, digest, lhs, rhs, ratio: r, ok: r <= cap * (1.0 + TOL), params }
}

/// `got == want` up to the relative slack; the ratio is the relative error.
pub(crate) fn exact_record(index: usize, digest: String, got: f64, want: f64, params: Value) -> InstanceRecord {
    let e = rel_err(got, want);
    InstanceRecord { index, digest, lhs: got, rhs: want, ratio: e, ok: e <= TOL, params }
}

/// Runs `f` for each index in parallel, keeping index order.
pub(crate) fn collect<F>(count: usize, f: F) -> Result<Vec<InstanceRecord>>
where
    F: Fn(usize) -> Result<InstanceRecord> + Sync + Send,
{
    par::map_indices(count, f).into_iter().collect()
}

pub(crate) fn dyadic_env(r: &Resolved) -> Value {
    json!({"backend": r.backend, "n": r.n, "L": r.level})
}

pub(crate) fn max_cap(records: &[InstanceRecord]) -> f64 {
    records
        .iter()
        .filter_map(|r| r.params.get("cap").and_then(Value::as_f64))
        .fold(0.0, f64::max)
}

/// Independent stream for instance `index` of a suite.
pub(crate) fn rng_for(r: &Resolved, index: usize) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mix = (index as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    rand_chacha::ChaCha8Rng::seed_from_u64(r.seed ^ mix)
}

pub(crate) fn random_set(rng: &mut rand_chacha::ChaCha8Rng, grid: crate::Grid, p: f64) -> crate::GridSet {
    use rand::Rng;
    crate::GridSet::from_fn(grid, |_| rng.gen_bool(p))
}

pub(crate) fn random_simple(rng: &mut rand_chacha::ChaCha8Rng, grid: crate::Grid) -> crate::GridFunction {
    use rand::Rng;
    let zero = rng.gen_range(0.2..0.8);
    crate::GridFunction::from_fn(grid, |_| if rng.gen_bool(zero) { 0.0 } else { rng.gen_range(0.1..4.0) })
}
