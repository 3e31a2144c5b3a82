//! Shipped counterexample instances.
//!
//! `sierpinski_no_density` is a hand-written file embedded at build time.
//! `halfpow_no_density_N` (3 ≤ N ≤ 16) files are written from the core
//! builder; a test keeps the two in sync.

use pervin::radon::halfpow_no_density;
use pervin::Limits;

use crate::instance::{instance_from_parts, Instance, InstanceError};

pub const SIERPINSKI_NO_DENSITY: &str = include_str!("../fixtures/sierpinski_no_density.toml");

pub const HALFPOW_MIN_DEPTH: usize = 1;
pub const HALFPOW_MAX_DEPTH: usize = 16;

pub fn halfpow_instance(depth: usize) -> Instance {
    let (space, nu, mu) = halfpow_no_density(depth).expect("depth is at most 16");
    instance_from_parts(space, [("nu".to_string(), nu), ("mu".to_string(), mu)], [])
}

/// Names accepted wherever an instance path is: `sierpinski_no_density`,
/// `halfpow_no_density_N` or `halfpow_no_density:N`.
pub fn builtin(name: &str) -> Option<Result<Instance, InstanceError>> {
    if name == "sierpinski_no_density" {
        return Some(Instance::parse(SIERPINSKI_NO_DENSITY, Limits::default()));
    }
    let depth = name
        .strip_prefix("halfpow_no_density_")
        .or_else(|| name.strip_prefix("halfpow_no_density:"))?;
    let depth: usize = depth.parse().ok()?;
    if !(HALFPOW_MIN_DEPTH..=HALFPOW_MAX_DEPTH).contains(&depth) {
        return Some(Err(InstanceError::Validation {
            object: "fixture".into(),
            reason: format!("halfpow depth must be in {HALFPOW_MIN_DEPTH}..={HALFPOW_MAX_DEPTH}"),
        }));
    }
    Some(Ok(halfpow_instance(depth)))
}
