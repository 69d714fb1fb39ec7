use std::collections::HashSet;
use std::fmt;

use super::{Attribute, ERDiagram, Feature, FeatureRef};

/// One violated diagram invariant, naming the offending element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    InvalidIdentifier { element: String, name: String },
    DuplicateEntity { name: String },
    DuplicateRelationship { name: String },
    /// An entity and a relationship share a name, which makes attribute owners ambiguous.
    NameClash { name: String },
    DuplicateAttribute { owner: String, name: String },
    TooFewParticipants { relationship: String, count: usize },
    UnknownParticipant { relationship: String, participant: String },
    UnresolvedTarget { target: FeatureRef },
    /// Targets must be attributes or relationships.
    EntityTarget { target: FeatureRef },
    UnresolvedImportant { feature: FeatureRef },
    DuplicateImportant { feature: FeatureRef },
    ImportantIsTarget { feature: FeatureRef },
}

impl Violation {
    /// Short invariant code, stable for machine consumers.
    pub fn invariant(&self) -> &'static str {
        match self {
            Violation::InvalidIdentifier { .. } => "identifier",
            Violation::DuplicateEntity { .. } => "unique-entity",
            Violation::DuplicateRelationship { .. } => "unique-relationship",
            Violation::NameClash { .. } => "disjoint-names",
            Violation::DuplicateAttribute { .. } => "unique-attribute",
            Violation::TooFewParticipants { .. } => "participant-count",
            Violation::UnknownParticipant { .. } => "referential-closure",
            Violation::UnresolvedTarget { .. } => "target-resolves",
            Violation::EntityTarget { .. } => "target-kind",
            Violation::UnresolvedImportant { .. } => "important-resolves",
            Violation::DuplicateImportant { .. } => "important-unique",
            Violation::ImportantIsTarget { .. } => "important-not-target",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] ", self.invariant())?;
        match self {
            Violation::InvalidIdentifier { element, name } => {
                write!(f, "{element} has invalid name {name:?}")
            }
            Violation::DuplicateEntity { name } => write!(f, "duplicate entity {name}"),
            Violation::DuplicateRelationship { name } => {
                write!(f, "duplicate relationship {name}")
            }
            Violation::NameClash { name } => {
                write!(f, "{name} names both an entity and a relationship")
            }
            Violation::DuplicateAttribute { owner, name } => {
                write!(f, "duplicate attribute {name} on {owner}")
            }
            Violation::TooFewParticipants {
                relationship,
                count,
            } => write!(
                f,
                "relationship {relationship} has {count} participant(s), needs at least 2"
            ),
            Violation::UnknownParticipant {
                relationship,
                participant,
            } => write!(
                f,
                "relationship {relationship} references unknown entity {participant}"
            ),
            Violation::UnresolvedTarget { target } => write!(f, "target {target} does not resolve"),
            Violation::EntityTarget { target } => {
                write!(f, "target {target} is an entity; expected attribute or relationship")
            }
            Violation::UnresolvedImportant { feature } => {
                write!(f, "important feature {feature} does not resolve")
            }
            Violation::DuplicateImportant { feature } => {
                write!(f, "important feature {feature} listed more than once")
            }
            Violation::ImportantIsTarget { feature } => {
                write!(f, "important feature {feature} is the target")
            }
        }
    }
}

/// `[A-Za-z][A-Za-z0-9_]*`
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(super) fn validate(d: &ERDiagram) -> Vec<Violation> {
    let mut out = Vec::new();

    let mut seen = HashSet::new();
    for e in d.entities() {
        check_identifier(&mut out, "entity", &e.name);
        if !seen.insert(e.name.to_lowercase()) {
            out.push(Violation::DuplicateEntity {
                name: e.name.clone(),
            });
        }
        check_attributes(&mut out, &e.name, &e.attributes);
    }

    let entity_names = seen;
    let mut seen = HashSet::new();
    for r in d.relationships() {
        check_identifier(&mut out, "relationship", &r.name);
        let key = r.name.to_lowercase();
        if entity_names.contains(&key) {
            out.push(Violation::NameClash {
                name: r.name.clone(),
            });
        }
        if !seen.insert(key) {
            out.push(Violation::DuplicateRelationship {
                name: r.name.clone(),
            });
        }
        if r.participants.len() < 2 {
            out.push(Violation::TooFewParticipants {
                relationship: r.name.clone(),
                count: r.participants.len(),
            });
        }
        for p in &r.participants {
            if d.entity(p).is_none() {
                out.push(Violation::UnknownParticipant {
                    relationship: r.name.clone(),
                    participant: p.clone(),
                });
            }
        }
        check_attributes(&mut out, &r.name, &r.attributes);
    }

    if let Some(ann) = d.annotation() {
        match d.resolve(&ann.target) {
            None => out.push(Violation::UnresolvedTarget {
                target: ann.target.clone(),
            }),
            Some(Feature::Entity(_)) => out.push(Violation::EntityTarget {
                target: ann.target.clone(),
            }),
            Some(_) => {}
        }
        let mut seen = HashSet::new();
        for f in &ann.important {
            if d.resolve(f).is_none() {
                out.push(Violation::UnresolvedImportant { feature: f.clone() });
            }
            if *f == ann.target {
                out.push(Violation::ImportantIsTarget { feature: f.clone() });
            }
            if !seen.insert(f) {
                out.push(Violation::DuplicateImportant { feature: f.clone() });
            }
        }
    }

    out
}

fn check_identifier(out: &mut Vec<Violation>, element: &str, name: &str) {
    if !is_identifier(name) {
        out.push(Violation::InvalidIdentifier {
            element: element.to_string(),
            name: name.to_string(),
        });
    }
}

fn check_attributes(out: &mut Vec<Violation>, owner: &str, attrs: &[Attribute]) {
    let mut seen = HashSet::new();
    for a in attrs {
        check_identifier(out, &format!("attribute of {owner}"), &a.name);
        if !seen.insert(a.name.to_lowercase()) {
            out.push(Violation::DuplicateAttribute {
                owner: owner.to_string(),
                name: a.name.clone(),
            });
        }
    }
}
