//! Instance files.
//!
//! One TOML document describes a space together with named valuations,
//! functions and (optionally) functional tables:
//!
//! ```toml
//! [space]
//! elements = ["s0", "s1"]
//! lattice = [["s1"]]
//! close = true
//!
//! [valuations.mu]
//! dirac = [{ coef = "1", point = "s0" }, { coef = "1", point = "s1" }]
//!
//! [valuations.nu]
//! table = { "" = "0", "s1" = "0", "s0,s1" = "1" }
//!
//! [valuations.w]
//! atoms = { "s0" = "1", "s1" = "0" }
//!
//! [functions.g]
//! s0 = "0"
//! s1 = "2"
//!
//! [functionals.F]
//! entries = [{ values = { s0 = "1", s1 = "1" }, value = "2" }]
//! ```
//!
//! Set and atom labels are point names joined by `,`; order inside a label
//! does not matter on input and is carrier order on output. All numbers are
//! strings in the exact `p/q` / `inf` grammar.
//!
//! [`Instance::to_toml`] writes the canonical form: the least neighbourhood
//! of each point as generators with `close = true`, valuations as atom weights, function values in carrier
//! order. Parsing that output and writing it again is the identity.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use pervin::choquet::lsc_check;
use pervin::{ExtValue, Limits, LscFunction, PervinSpace, PointSet, SpaceError, Valuation};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid {object}: {reason}")]
    Validation { object: String, reason: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn invalid(object: impl Into<String>, reason: impl ToString) -> InstanceError {
    InstanceError::Validation {
        object: object.into(),
        reason: reason.to_string(),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    space: SpaceDoc,
    #[serde(default)]
    valuations: BTreeMap<String, ValuationDoc>,
    #[serde(default)]
    functions: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    functionals: BTreeMap<String, FunctionalDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceDoc {
    elements: Vec<String>,
    #[serde(default)]
    lattice: Vec<Vec<String>>,
    #[serde(default)]
    close: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ValuationDoc {
    atoms: Option<BTreeMap<String, String>>,
    table: Option<BTreeMap<String, String>>,
    dirac: Option<Vec<DiracTerm>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiracTerm {
    coef: String,
    point: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionalDoc {
    entries: Vec<FunctionalEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionalEntry {
    values: BTreeMap<String, String>,
    value: String,
}

/// A validated instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub space: Arc<PervinSpace>,
    pub valuations: BTreeMap<String, Valuation>,
    pub functions: BTreeMap<String, LscFunction>,
    pub functionals: BTreeMap<String, Vec<(LscFunction, ExtValue)>>,
}

fn number(object: &str, text: &str) -> Result<ExtValue, InstanceError> {
    text.parse::<ExtValue>().map_err(|e| invalid(object, e))
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl Instance {
    pub fn load(path: &Path, limits: Limits) -> Result<Self, InstanceError> {
        let text = std::fs::read_to_string(path).map_err(|source| InstanceError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, limits)
    }

    pub fn parse(text: &str, limits: Limits) -> Result<Self, InstanceError> {
        let doc: Document = toml::from_str(text).map_err(|e| InstanceError::Parse {
            line: e.span().map_or(1, |s| line_of(text, s.start)),
            message: e.message().to_string(),
        })?;
        let space = Arc::new(build_space(&doc.space, limits)?);

        let mut valuations = BTreeMap::new();
        for (name, v) in &doc.valuations {
            let object = format!("valuation {name}");
            valuations.insert(name.clone(), build_valuation(&space, &object, v)?);
        }

        let mut functions = BTreeMap::new();
        for (name, values) in &doc.functions {
            let object = format!("function {name}");
            functions.insert(name.clone(), build_function(&space, &object, values)?);
        }

        let mut functionals = BTreeMap::new();
        for (name, f) in &doc.functionals {
            let object = format!("functional {name}");
            let entries = f
                .entries
                .iter()
                .map(|e| Ok((build_function(&space, &object, &e.values)?, number(&object, &e.value)?)))
                .collect::<Result<Vec<_>, InstanceError>>()?;
            functionals.insert(name.clone(), entries);
        }

        Ok(Instance {
            space,
            valuations,
            functions,
            functionals,
        })
    }

    pub fn valuation(&self, name: &str) -> Result<&Valuation, InstanceError> {
        self.valuations
            .get(name)
            .ok_or_else(|| invalid("reference", format!("no valuation named {name:?}")))
    }

    pub fn function(&self, name: &str) -> Result<&LscFunction, InstanceError> {
        self.functions
            .get(name)
            .ok_or_else(|| invalid("reference", format!("no function named {name:?}")))
    }

    pub fn functional(&self, name: &str) -> Result<&[(LscFunction, ExtValue)], InstanceError> {
        self.functionals
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| invalid("reference", format!("no functional named {name:?}")))
    }

    /// Canonical TOML rendering.
    pub fn to_toml(&self) -> String {
        let space = &self.space;
        let mut out = String::new();
        out.push_str("[space]\n");
        let elements: Vec<String> = space.elements().iter().map(|e| quote(e)).collect();
        let _ = writeln!(out, "elements = [{}]", elements.join(", "));
        let mut neighbourhoods: Vec<PointSet> = (0..space.len())
            .map(|p| space.up_closure(PointSet::singleton(p)))
            .collect();
        neighbourhoods.sort_by_key(|s| (s.len(), s.bits()));
        neighbourhoods.dedup();
        let lattice: Vec<String> = neighbourhoods
            .iter()
            .map(|&m| {
                let names: Vec<String> = m.points().map(|p| quote(space.point_name(p))).collect();
                format!("[{}]", names.join(", "))
            })
            .collect();
        let _ = writeln!(out, "lattice = [{}]", lattice.join(", "));
        out.push_str("close = true\n");

        for (name, v) in &self.valuations {
            let _ = writeln!(out, "\n[valuations.{}]", quote_key(name));
            let atoms: Vec<String> = space
                .atoms()
                .iter()
                .map(|a| {
                    format!(
                        "{} = {}",
                        quote(&space.label(a.points)),
                        quote(&v.atom_weights()[a.index].to_string())
                    )
                })
                .collect();
            let _ = writeln!(out, "atoms = {{ {} }}", atoms.join(", "));
        }

        for (name, f) in &self.functions {
            let _ = writeln!(out, "\n[functions.{}]", quote_key(name));
            for (p, value) in f.values().iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{} = {}",
                    quote_key(space.point_name(p)),
                    quote(&value.to_string())
                );
            }
        }

        for (name, entries) in &self.functionals {
            let _ = writeln!(out, "\n[functionals.{}]", quote_key(name));
            out.push_str("entries = [\n");
            for (h, value) in entries {
                let _ = writeln!(
                    out,
                    "  {{ values = {}, value = {} }},",
                    inline_function(space, h),
                    quote(&value.to_string())
                );
            }
            out.push_str("]\n");
        }
        out
    }
}

fn inline_function(space: &PervinSpace, h: &LscFunction) -> String {
    let parts: Vec<String> = h
        .values()
        .iter()
        .enumerate()
        .map(|(p, v)| format!("{} = {}", quote_key(space.point_name(p)), quote(&v.to_string())))
        .collect();
    format!("{{ {} }}", parts.join(", "))
}

fn quote(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

fn quote_key(s: &str) -> String {
    let bare = !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-');
    if bare {
        s.to_string()
    } else {
        quote(s)
    }
}

fn names_to_set(space_names: &[String], names: &[String]) -> Result<PointSet, SpaceError> {
    names.iter().try_fold(PointSet::EMPTY, |acc, n| {
        space_names
            .iter()
            .position(|e| e == n)
            .map(|i| acc.union(PointSet::singleton(i)))
            .ok_or_else(|| SpaceError::UnknownElement(n.clone()))
    })
}

fn build_space(doc: &SpaceDoc, limits: Limits) -> Result<PervinSpace, InstanceError> {
    let sets = doc
        .lattice
        .iter()
        .map(|names| names_to_set(&doc.elements, names))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| invalid("lattice", e))?;
    let result = if doc.close {
        PervinSpace::close(doc.elements.clone(), &sets, limits)
    } else {
        let mut members = sets;
        members.push(PointSet::EMPTY);
        members.push(PointSet::full(doc.elements.len()));
        PervinSpace::from_lattice(doc.elements.clone(), &members, limits)
    };
    result.map_err(|e| match e {
        SpaceError::NotClosed { op, left, right } => {
            let names = |s: PointSet| {
                let v: Vec<&str> = s.points().map(|p| doc.elements[p].as_str()).collect();
                format!("{{{}}}", v.join(","))
            };
            invalid(
                "lattice",
                format!("missing the {op} of {} and {}", names(left), names(right)),
            )
        }
        other => invalid("space", other),
    })
}

fn build_valuation(space: &Arc<PervinSpace>, object: &str, doc: &ValuationDoc) -> Result<Valuation, InstanceError> {
    let given = [doc.atoms.is_some(), doc.table.is_some(), doc.dirac.is_some()]
        .iter()
        .filter(|&&b| b)
        .count();
    if given != 1 {
        return Err(invalid(object, "give exactly one of `atoms`, `table` or `dirac`"));
    }
    if let Some(atoms) = &doc.atoms {
        let mut weights: Vec<Option<ExtValue>> = vec![None; space.atoms().len()];
        for (label, value) in atoms {
            let set = space.parse_label(label).map_err(|e| invalid(object, e))?;
            let atom = space
                .atoms()
                .iter()
                .find(|a| a.points == set)
                .ok_or_else(|| invalid(object, format!("{label:?} is not an atom of the space")))?;
            if weights[atom.index].replace(number(object, value)?).is_some() {
                return Err(invalid(object, format!("atom {label:?} given twice")));
            }
        }
        let weights = weights
            .into_iter()
            .enumerate()
            .map(|(i, w)| {
                w.ok_or_else(|| {
                    invalid(
                        object,
                        format!("missing weight for atom {:?}", space.label(space.atoms()[i].points)),
                    )
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        return Valuation::from_atom_weights(space.clone(), weights).map_err(|e| invalid(object, e));
    }
    if let Some(table) = &doc.table {
        let mut entries = Vec::with_capacity(table.len());
        for (label, value) in table {
            let set = space.parse_label(label).map_err(|e| invalid(object, e))?;
            if entries.iter().any(|(s, _)| *s == set) {
                return Err(invalid(object, format!("set {label:?} given twice")));
            }
            entries.push((set, number(object, value)?));
        }
        return Valuation::from_lattice_entries(space.clone(), entries).map_err(|e| {
            let reason = match e {
                pervin::ValuationError::MissingEntry(s) => format!("table has no entry for {{{}}}", space.label(s)),
                pervin::ValuationError::Axiom(v) => format!(
                    "{} axiom fails on {{{}}} and {{{}}}",
                    v.axiom,
                    space.label(v.left),
                    space.label(v.right)
                ),
                other => other.to_string(),
            };
            invalid(object, reason)
        });
    }
    let terms = doc.dirac.as_ref().expect("exactly one form");
    let mut total = Valuation::zero(space.clone());
    for term in terms {
        let coef = number(object, &term.coef)?;
        let d = Valuation::dirac_named(space.clone(), &term.point).map_err(|e| invalid(object, e))?;
        total = Valuation::linear_combo(&ExtValue::one(), &total, &coef, &d).map_err(|e| invalid(object, e))?;
    }
    Ok(total)
}

fn build_function(
    space: &Arc<PervinSpace>,
    object: &str,
    values: &BTreeMap<String, String>,
) -> Result<LscFunction, InstanceError> {
    let mut pointwise: Vec<Option<ExtValue>> = vec![None; space.len()];
    for (name, value) in values {
        let p = space.point_index(name).map_err(|e| invalid(object, e))?;
        pointwise[p] = Some(number(object, value)?);
    }
    let pointwise = pointwise
        .into_iter()
        .enumerate()
        .map(|(p, v)| v.ok_or_else(|| invalid(object, format!("no value for point {:?}", space.point_name(p)))))
        .collect::<Result<Vec<_>, _>>()?;
    lsc_check(space.clone(), pointwise).map_err(|e| match e {
        pervin::ChoquetError::NotLsc(n) => invalid(
            object,
            format!(
                "not lower semicontinuous: level set {{{}}} for thresholds in [{}, {}[ is not in the lattice",
                space.label(n.level_set),
                n.lower,
                n.upper
            ),
        ),
        other => invalid(object, other),
    })
}

/// An instance holding just `space` plus the given named objects.
pub fn instance_from_parts(
    space: Arc<PervinSpace>,
    valuations: impl IntoIterator<Item = (String, Valuation)>,
    functions: impl IntoIterator<Item = (String, LscFunction)>,
) -> Instance {
    Instance {
        space,
        valuations: valuations.into_iter().collect(),
        functions: functions.into_iter().collect(),
        functionals: BTreeMap::new(),
    }
}
