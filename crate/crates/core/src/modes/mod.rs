//! Mode declarations and their construction from diagram paths.
//!
//! Each relationship on a path compiles to a mode whose argument entered from
//! the previous entity is an input (`+`), whose other entity arguments are
//! outputs (`-`) and whose attribute arguments are constants (`#`). When the
//! incoming entity fills several positions (reflexive relations), one mode is
//! produced per position.

mod text;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::er::{Attribute, AttributeKind, ERDiagram, Entity, Feature, FeatureRef, Relationship};
use crate::paths::{self, Path, PathError, Strategy, Unreachable, WalkConfig};

pub use text::{emit_modes, parse_modes, Dialect, ModeParseError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModeError {
    #[error("diagram has no annotation")]
    MissingAnnotation,
    #[error("annotation marks no important features")]
    NoImportantFeatures,
    #[error("{0} cannot be a target; expected an attribute or relationship")]
    InvalidTarget(FeatureRef),
    #[error("target mode {0} must have only input arguments")]
    TargetNotInput(ModeSpec),
    #[error(transparent)]
    Path(#[from] PathError),
}

/// Argument direction. Ordered like the ASCII markers `#`, `+`, `-`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Constant,
    Input,
    Output,
}

impl Direction {
    pub fn marker(self) -> char {
        match self {
            Direction::Constant => '#',
            Direction::Input => '+',
            Direction::Output => '-',
        }
    }

    pub fn from_marker(c: char) -> Option<Self> {
        match c {
            '#' => Some(Direction::Constant),
            '+' => Some(Direction::Input),
            '-' => Some(Direction::Output),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArgMode {
    pub direction: Direction,
    pub type_name: String,
}

impl ArgMode {
    pub fn new(direction: Direction, type_name: impl Into<String>) -> Self {
        Self {
            direction,
            type_name: type_name.into(),
        }
    }

    pub fn input(type_name: impl Into<String>) -> Self {
        Self::new(Direction::Input, type_name)
    }

    pub fn output(type_name: impl Into<String>) -> Self {
        Self::new(Direction::Output, type_name)
    }

    pub fn constant(type_name: impl Into<String>) -> Self {
        Self::new(Direction::Constant, type_name)
    }
}

impl fmt::Display for ArgMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.direction.marker(), self.type_name)
    }
}

/// One predicate's argument directives, e.g. `takes(+student, -course, #grade)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeSpec {
    pub predicate: String,
    pub args: Vec<ArgMode>,
}

impl ModeSpec {
    pub fn new(predicate: impl Into<String>, args: Vec<ArgMode>) -> Self {
        Self {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_all_input(&self) -> bool {
        self.args.iter().all(|a| a.direction == Direction::Input)
    }
}

impl fmt::Display for ModeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

/// Target mode plus a deduplicated, canonically ordered set of body modes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModeSet {
    target: ModeSpec,
    body: BTreeSet<ModeSpec>,
}

impl ModeSet {
    pub fn new(
        target: ModeSpec,
        body: impl IntoIterator<Item = ModeSpec>,
    ) -> Result<Self, ModeError> {
        if !target.is_all_input() {
            return Err(ModeError::TargetNotInput(target));
        }
        Ok(Self {
            target,
            body: body.into_iter().collect(),
        })
    }

    pub fn target_mode(&self) -> &ModeSpec {
        &self.target
    }

    pub fn body_modes(&self) -> &BTreeSet<ModeSpec> {
        &self.body
    }

    /// Same target with a different body.
    pub fn with_body(&self, body: impl IntoIterator<Item = ModeSpec>) -> Self {
        Self {
            target: self.target.clone(),
            body: body.into_iter().collect(),
        }
    }
}

/// Generated modes plus the important features no path reached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GmcResult {
    pub modes: ModeSet,
    pub warnings: Vec<Unreachable>,
}

pub(crate) fn ident(name: &str) -> String {
    name.to_lowercase()
}

/// Mode for the prediction target; every argument is an input.
pub fn target_mode(d: &ERDiagram, target: &FeatureRef) -> Result<ModeSpec, ModeError> {
    let feature = d
        .resolve(target)
        .ok_or_else(|| PathError::InvalidFeature(target.clone()))?;
    let spec = match feature {
        Feature::EntityAttribute(e, a) => {
            let mut args = vec![ArgMode::input(ident(&e.name))];
            if a.kind == AttributeKind::Multivalued {
                args.push(ArgMode::input(ident(&a.name)));
            }
            ModeSpec::new(ident(&a.name), args)
        }
        Feature::Relationship(r) => ModeSpec::new(ident(&r.name), all_inputs(r)),
        Feature::RelationshipAttribute(r, a) => {
            let mut args: Vec<ArgMode> = r
                .participants
                .iter()
                .map(|p| ArgMode::input(ident(p)))
                .collect();
            args.push(ArgMode::input(ident(&a.name)));
            ModeSpec::new(ident(&a.name), args)
        }
        Feature::Entity(_) => return Err(ModeError::InvalidTarget(target.clone())),
    };
    Ok(spec)
}

fn all_inputs(r: &Relationship) -> Vec<ArgMode> {
    r.participants
        .iter()
        .map(|p| ArgMode::input(ident(p)))
        .chain(r.attributes.iter().map(|a| ArgMode::input(ident(&a.name))))
        .collect()
}

/// `a(+e)` for a binary attribute, `a(+e, #a)` for a multivalued one.
pub fn entity_attribute_mode(e: &Entity, a: &Attribute) -> ModeSpec {
    let mut args = vec![ArgMode::input(ident(&e.name))];
    if a.kind == AttributeKind::Multivalued {
        args.push(ArgMode::constant(ident(&a.name)));
    }
    ModeSpec::new(ident(&a.name), args)
}

/// Modes for entering `r` from `incoming`: one variant per position that
/// `incoming` occupies, that position `+`, other entities `-`, attributes `#`.
pub fn relationship_modes(r: &Relationship, incoming: &str) -> Vec<ModeSpec> {
    r.positions_of(incoming)
        .map(|i| {
            let args = r
                .participants
                .iter()
                .enumerate()
                .map(|(j, p)| {
                    if i == j {
                        ArgMode::input(ident(p))
                    } else {
                        ArgMode::output(ident(p))
                    }
                })
                .chain(r.attributes.iter().map(|a| ArgMode::constant(ident(&a.name))))
                .collect();
            ModeSpec::new(ident(&r.name), args)
        })
        .collect()
}

/// Compiles one path into modes, in path order.
///
/// A path ending at an entity attribute also yields that attribute's mode so
/// the learner can test it.
pub fn create_mode(p: &Path, d: &ERDiagram) -> Result<Vec<ModeSpec>, ModeError> {
    p.check(d)?;
    let mut out = Vec::new();
    let mut from = p.start.as_str();
    for hop in &p.hops {
        let r = d
            .relationship(&hop.relationship)
            .expect("checked path names known relationships");
        out.extend(relationship_modes(r, from));
        if let Some(e) = &hop.entity {
            from = e;
        }
    }
    if let Some(Feature::EntityAttribute(e, a)) = d.resolve(&p.endpoint) {
        if p.frontier() != Some(e.name.as_str()) {
            return Err(PathError::Mismatch {
                step: p.len(),
                detail: format!("endpoint {} is not owned by the path's last entity", p.endpoint),
            }
            .into());
        }
        out.push(entity_attribute_mode(e, a));
    }
    Ok(out)
}

/// Guided mode construction: target mode plus the modes of every path from
/// the target to each important feature, in annotation order.
///
/// With [`Strategy::Random`] the important features are ignored and the body
/// is compiled from `cfg.num_walks` seeded random walks instead.
pub fn gmc(d: &ERDiagram, cfg: &WalkConfig) -> Result<GmcResult, ModeError> {
    cfg.check()?;
    let ann = d.annotation().ok_or(ModeError::MissingAnnotation)?;
    let target = target_mode(d, &ann.target)?;
    let mut body = BTreeSet::new();
    let mut warnings = Vec::new();

    if cfg.strategy == Strategy::Random {
        for p in paths::random_paths(d, &ann.target, cfg)? {
            body.extend(create_mode(&p, d)?);
        }
    } else {
        if ann.important.is_empty() {
            return Err(ModeError::NoImportantFeatures);
        }
        for feature in &ann.important {
            let search = paths::find_paths(d, &ann.target, feature, cfg)?;
            for p in &search.paths {
                body.extend(create_mode(p, d)?);
            }
            warnings.extend(search.unreachable);
        }
    }

    Ok(GmcResult {
        modes: ModeSet::new(target, body)?,
        warnings,
    })
}
