//! Command-line surface: argument definitions and command execution.
//!
//! Exit codes: 0 for success or a true verdict, 1 for a false verdict, 2 for
//! any error (bad input, unknown names, resource caps).

use std::path::Path;
use std::time::Instant;

use clap::{Parser, Subcommand};
use pervin::choquet::{gmul, riesz_functional, riesz_valuation, riesz_valuation_from_table};
use pervin::radon::{
    abs_continuous, density_oracle, density_synthesize, hahn_grid, hahn_witness, verify_density, NoDensityReason,
};
use pervin::{integrate, DensityResult, Limits, PervinSpace, PointSet, SignedRational, SignedValuation, Valuation};
use thiserror::Error;

use crate::fixtures::builtin;
use crate::gen::{gen_instance, GenParams, MAX_GEN_POINTS};
use crate::instance::{Instance, InstanceError};
use crate::randtest::randtest;
use crate::report::{Format, Report};

/// Overrides the carrier-size cap (default 20, at most 64).
pub const MAX_POINTS_ENV: &str = "PERVIN_MAX_POINTS";

#[derive(Debug, Parser)]
#[command(
    name = "pervin",
    version,
    about = "Valuations, Choquet integrals and densities on finite Pervin spaces"
)]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate an instance file.
    Validate { instance: String },
    /// List the atoms with their crescent witnesses.
    Atoms { instance: String },
    /// Choquet integral of a function against a valuation.
    Integrate {
        instance: String,
        function: String,
        valuation: String,
    },
    /// The valuation g·μ, as lattice table and atom weights.
    Gmul {
        instance: String,
        function: String,
        valuation: String,
    },
    /// Absolute continuity of ν with respect to μ.
    Abscont { instance: String, nu: String, mu: String },
    /// Hahn witness for ν - r·μ, or for every threshold on the grid.
    Hahn {
        instance: String,
        nu: String,
        mu: String,
        #[arg(long)]
        r: Option<SignedRational>,
    },
    /// Synthesize an lsc density of ν with respect to μ.
    Density {
        instance: String,
        nu: String,
        mu: String,
        /// Use the brute-force oracle instead of the grid construction.
        #[arg(long)]
        oracle: bool,
    },
    /// Riesz round trip of a valuation, or recovery from a functional table.
    Riesz {
        instance: String,
        valuation: Option<String>,
        #[arg(long, conflicts_with = "valuation")]
        functional: Option<String>,
    },
    /// Extend a valuation to a set in the generated algebra.
    ///
    /// The set is a label such as `a,b`, optionally minus another label:
    /// `a,b\b`.
    Extend {
        instance: String,
        valuation: String,
        set: String,
    },
    /// Randomized property sweep.
    Randtest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long, default_value_t = 5)]
        max_points: usize,
    },
    /// Print a seeded random instance in canonical form.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        points: usize,
        #[arg(long, default_value_t = 4)]
        generators: usize,
        #[arg(long, default_value_t = 0)]
        infinity_per_mille: u32,
    },
    /// Print an instance (file or built-in fixture) in canonical form.
    Canon { instance: String },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Radon(#[from] pervin::RadonError),
    #[error(transparent)]
    Choquet(#[from] pervin::ChoquetError),
    #[error(transparent)]
    Valuation(#[from] pervin::ValuationError),
    #[error(transparent)]
    Space(#[from] pervin::SpaceError),
    #[error("{0}")]
    Usage(String),
}

/// What a command produced: a report, or raw text for `gen` / `canon`.
#[derive(Debug)]
pub enum Output {
    Report(Report),
    Text(String),
}

impl Output {
    pub fn exit_code(&self) -> i32 {
        match self {
            Output::Report(r) if r.verdict == Some(false) => 1,
            _ => 0,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match self {
            Output::Report(r) => r.render(format),
            Output::Text(t) => t.clone(),
        }
    }
}

pub fn limits_from_env() -> Result<Limits, CliError> {
    let mut limits = Limits::default();
    if let Ok(raw) = std::env::var(MAX_POINTS_ENV) {
        let n: usize = raw
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{MAX_POINTS_ENV} must be a positive integer, got {raw:?}")))?;
        if !(1..=64).contains(&n) {
            return Err(CliError::Usage(format!("{MAX_POINTS_ENV} must be in 1..=64, got {n}")));
        }
        limits.max_points = n;
    }
    Ok(limits)
}

/// A path if one exists, otherwise a built-in fixture name.
pub fn load_instance(name: &str, limits: Limits) -> Result<Instance, InstanceError> {
    let path = Path::new(name);
    if !path.exists() {
        if let Some(fixture) = builtin(name) {
            return fixture;
        }
    }
    Instance::load(path, limits)
}

fn set_label(space: &PervinSpace, set: PointSet) -> String {
    format!("{{{}}}", space.label(set))
}

/// Run a command. `command_line` is echoed into the report.
pub fn run(command: &Command, command_line: &str, limits: Limits) -> Result<Output, CliError> {
    let start = Instant::now();
    let mut report = Report::new(command_line);
    match command {
        Command::Validate { instance } => {
            let inst = load_instance(instance, limits)?;
            report
                .verdict(true)
                .value("points", inst.space.len())
                .value("lattice_members", inst.space.members().len())
                .value("atoms", inst.space.atoms().len())
                .value("valuations", names(inst.valuations.keys()))
                .value("functions", names(inst.functions.keys()))
                .value("functionals", names(inst.functionals.keys()));
        }
        Command::Atoms { instance } => {
            let inst = load_instance(instance, limits)?;
            let space = &inst.space;
            report.value("count", space.atoms().len());
            for a in space.atoms() {
                report.value(
                    format!("atom {}", a.index),
                    format!(
                        "{} = {} \\ {}",
                        set_label(space, a.points),
                        set_label(space, a.witness.outer),
                        set_label(space, a.witness.inner)
                    ),
                );
            }
        }
        Command::Integrate {
            instance,
            function,
            valuation,
        } => {
            let inst = load_instance(instance, limits)?;
            let value = integrate(inst.function(function)?, inst.valuation(valuation)?)?;
            report.value("integral", value);
        }
        Command::Gmul {
            instance,
            function,
            valuation,
        } => {
            let inst = load_instance(instance, limits)?;
            let product = gmul(inst.function(function)?, inst.valuation(valuation)?)?;
            push_valuation(&mut report, &product);
        }
        Command::Abscont { instance, nu, mu } => {
            let inst = load_instance(instance, limits)?;
            let verdict = abs_continuous(inst.valuation(nu)?, inst.valuation(mu)?)?;
            report.verdict(verdict.holds);
            if let Some(v) = verdict.violation {
                report
                    .witness("within", set_label(&inst.space, v.within))
                    .witness("null_set", set_label(&inst.space, v.null_set));
            }
        }
        Command::Hahn { instance, nu, mu, r } => {
            let inst = load_instance(instance, limits)?;
            let (nu, mu) = (inst.valuation(nu)?, inst.valuation(mu)?);
            match r {
                Some(r) => {
                    let sigma = SignedValuation::from_pair(nu, r, mu)?;
                    let witness = hahn_witness(&sigma);
                    report.verdict(witness.is_some()).value("r", r);
                    if let Some(w) = witness {
                        report.witness("positive_part", set_label(&inst.space, w));
                    }
                }
                None => {
                    let grid = hahn_grid(nu, mu)?;
                    report
                        .verdict(grid.iter().all(|h| h.witness.is_some()))
                        .value("grid_size", grid.len());
                    for h in grid {
                        let shown = h
                            .witness
                            .map_or_else(|| "none".to_string(), |w| set_label(&inst.space, w));
                        report.witness(format!("r={}", h.r), shown);
                    }
                }
            }
        }
        Command::Density {
            instance,
            nu,
            mu,
            oracle,
        } => {
            let inst = load_instance(instance, limits)?;
            let (nu, mu) = (inst.valuation(nu)?, inst.valuation(mu)?);
            let result = if *oracle {
                density_oracle(nu, mu)?
            } else {
                density_synthesize(nu, mu)?
            };
            report.value("method", if *oracle { "oracle" } else { "synthesis" });
            match result {
                DensityResult::Density(g) => {
                    let check = verify_density(&g, mu, nu)?;
                    report
                        .verdict(true)
                        .value("result", "Density")
                        .value("verified", check.holds);
                    for (p, v) in g.values().iter().enumerate() {
                        report.value(format!("g({})", inst.space.point_name(p)), v);
                    }
                }
                DensityResult::NoDensity(reason) => {
                    report.verdict(false).value("result", "NoDensity");
                    push_reason(&mut report, &inst.space, &reason);
                }
            }
        }
        Command::Riesz {
            instance,
            valuation,
            functional,
        } => {
            let inst = load_instance(instance, limits)?;
            match (valuation, functional) {
                (Some(name), None) => {
                    let nu = inst.valuation(name)?;
                    let back = riesz_valuation(&riesz_functional(nu))?;
                    report.verdict(&back == nu);
                    push_valuation(&mut report, &back);
                }
                (None, Some(name)) => match riesz_valuation_from_table(inst.space.clone(), inst.functional(name)?) {
                    Ok(v) => {
                        report.verdict(true);
                        push_valuation(&mut report, &v);
                    }
                    Err(pervin::ChoquetError::NotLinear(why)) => {
                        report
                            .verdict(false)
                            .value("result", "NotLinear")
                            .witness("reason", why);
                    }
                    Err(e) => return Err(e.into()),
                },
                _ => return Err(CliError::Usage("give a valuation name or --functional".into())),
            }
        }
        Command::Extend {
            instance,
            valuation,
            set,
        } => {
            let inst = load_instance(instance, limits)?;
            let space = &inst.space;
            let nu = inst.valuation(valuation)?;
            let target = match set.split_once('\\') {
                Some((a, b)) => space.parse_label(a)?.difference(space.parse_label(b)?),
                None => space.parse_label(set)?,
            };
            let element = space.algebra_decompose(target)?;
            let value = nu.sht_extend(&element)?;
            report.value("set", set_label(space, target)).value("value", value);
            for (i, c) in element.pieces().iter().enumerate() {
                report.witness(
                    format!("piece {i}"),
                    format!("{} \\ {}", set_label(space, c.outer), set_label(space, c.inner)),
                );
            }
        }
        Command::Randtest {
            seed,
            count,
            max_points,
        } => {
            if !(1..=MAX_GEN_POINTS).contains(max_points) {
                return Err(CliError::Usage(format!("--max-points must be in 1..={MAX_GEN_POINTS}")));
            }
            let summary = randtest(*seed, *count, *max_points);
            report
                .verdict(summary.failures() == 0)
                .value("seed", seed)
                .value("count", count)
                .value("max_points", max_points)
                .value("failures", summary.failures());
            for t in &summary.tallies {
                report.value(t.name.clone(), format!("{}/{} passed", t.checked - t.failed, t.checked));
                if let Some(s) = t.first_failing_seed {
                    report.witness(t.name.clone(), format!("seed {s}"));
                }
            }
        }
        Command::Gen {
            seed,
            points,
            generators,
            infinity_per_mille,
        } => {
            if !(1..=MAX_GEN_POINTS).contains(points) {
                return Err(CliError::Usage(format!("--points must be in 1..={MAX_GEN_POINTS}")));
            }
            let params = GenParams {
                points: *points,
                generator_count: *generators,
                infinity_per_mille: (*infinity_per_mille).min(800),
                ..GenParams::default()
            };
            return Ok(Output::Text(gen_instance(*seed, &params).to_toml()));
        }
        Command::Canon { instance } => {
            return Ok(Output::Text(load_instance(instance, limits)?.to_toml()));
        }
    }
    report.elapsed_us = u64::try_from(start.elapsed().as_micros()).unwrap_or(u64::MAX);
    Ok(Output::Report(report))
}

fn names<'a>(keys: impl Iterator<Item = &'a String>) -> String {
    keys.map(String::as_str).collect::<Vec<_>>().join(",")
}

fn push_valuation(report: &mut Report, v: &Valuation) {
    let space = v.space();
    for (&m, value) in space.members().iter().zip(v.lattice_table()) {
        report.value(format!("value {}", set_label(space, m)), value);
    }
    for a in space.atoms() {
        report.value(
            format!("atom {}", set_label(space, a.points)),
            &v.atom_weights()[a.index],
        );
    }
}

fn push_reason(report: &mut Report, space: &PervinSpace, reason: &NoDensityReason) {
    match reason {
        NoDensityReason::AcFails(v) => {
            report
                .value("reason", "AcFails")
                .witness("within", set_label(space, v.within))
                .witness("null_set", set_label(space, v.null_set));
        }
        NoDensityReason::HahnFails { r } => {
            report.value("reason", "HahnFails").witness("r", r);
        }
        NoDensityReason::MassOnNullAtom { atom } => {
            report
                .value("reason", "MassOnNullAtom")
                .witness("atom", set_label(space, space.atoms()[*atom].points));
        }
        NoDensityReason::NoLscAssignment => {
            report.value("reason", "NoLscAssignment");
        }
    }
}
