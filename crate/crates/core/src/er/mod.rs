//! Entity-relationship diagram model.
//!
//! An [`ERDiagram`] is the source program of the mode compiler: entities,
//! relationships between them, attributes on either, and an optional
//! [`Annotation`] naming the prediction target and the features a domain
//! expert marked as important.
//!
//! Diagrams are canonicalized on construction: entities, relationships and
//! every attribute list are sorted by name. Participant lists and the
//! important-feature list keep their given order since both carry meaning.

mod ir;
mod validate;

use std::cmp::Ordering;
use std::fmt;

pub use ir::{parse_ir, serialize_ir, IrError};
pub use validate::{is_identifier, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AttributeKind {
    Binary,
    Multivalued,
}

impl AttributeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AttributeKind::Binary => "binary",
            AttributeKind::Multivalued => "multivalued",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
}

impl Attribute {
    pub fn new(name: impl Into<String>, kind: AttributeKind) -> Self {
        Self {
            name: name.into(),
            kind,
        }
    }

    pub fn binary(name: impl Into<String>) -> Self {
        Self::new(name, AttributeKind::Binary)
    }

    pub fn multivalued(name: impl Into<String>) -> Self {
        Self::new(name, AttributeKind::Multivalued)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Entity {
    pub name: String,
    pub attributes: Vec<Attribute>,
}

impl Entity {
    pub fn new(name: impl Into<String>, attributes: Vec<Attribute>) -> Self {
        Self {
            name: name.into(),
            attributes,
        }
    }

    pub fn attribute(&self, name: &str) -> Option<&Attribute> {
        self.attributes.iter().find(|a| a.name == name)
    }
}

/// A relationship (hyperedge) over an ordered list of participant entities.
///
/// Participants may repeat, which is how reflexive relations such as
/// `WorkedUnder(Person, Person)` are written.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relationship {
    pub name: String,
    pub participants: Vec<String>,
    pub attributes: Vec<Attribute>,
}

impl Relationship {
    pub fn new(
        name: impl Into<String>,
        participants: Vec<String>,
        attributes: Vec<Attribute>,
    ) -> Self {
        Self {
            name: name.into(),
            participants,
            attributes,
        }
    }

    pub fn attribute(&self, name: &str) -> Option<&Attribute> {
        self.attributes.iter().find(|a| a.name == name)
    }

    /// Positions at which `entity` participates.
    pub fn positions_of<'a>(&'a self, entity: &'a str) -> impl Iterator<Item = usize> + 'a {
        self.participants
            .iter()
            .enumerate()
            .filter(move |(_, p)| p.as_str() == entity)
            .map(|(i, _)| i)
    }

    pub fn involves(&self, entity: &str) -> bool {
        self.participants.iter().any(|p| p == entity)
    }

    /// Entities reachable by stepping through this relationship from one
    /// occurrence of `entity` to a different occurrence. Sorted, deduplicated.
    ///
    /// Occurrences are compared by position, so a reflexive relationship leads
    /// from an entity back to itself.
    pub fn neighbours(&self, entity: &str) -> Vec<&str> {
        let from: Vec<usize> = self.positions_of(entity).collect();
        let mut out: Vec<&str> = self
            .participants
            .iter()
            .enumerate()
            .filter(|(j, _)| from.iter().any(|i| i != j))
            .map(|(_, p)| p.as_str())
            .collect();
        out.sort_by(|a, b| name_cmp(a, b));
        out.dedup();
        out
    }
}

/// Reference to a feature of a diagram, as named by an annotation or a path
/// endpoint.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeatureRef {
    /// Attribute `name` owned by the entity or relationship `owner`.
    Attribute { owner: String, name: String },
    Entity(String),
    Relationship(String),
}

impl FeatureRef {
    pub fn attribute(owner: impl Into<String>, name: impl Into<String>) -> Self {
        FeatureRef::Attribute {
            owner: owner.into(),
            name: name.into(),
        }
    }

    pub fn entity(name: impl Into<String>) -> Self {
        FeatureRef::Entity(name.into())
    }

    pub fn relationship(name: impl Into<String>) -> Self {
        FeatureRef::Relationship(name.into())
    }
}

impl fmt::Display for FeatureRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureRef::Attribute { owner, name } => write!(f, "{owner}.{name}"),
            FeatureRef::Entity(name) | FeatureRef::Relationship(name) => f.write_str(name),
        }
    }
}

/// A [`FeatureRef`] resolved against a diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feature<'a> {
    EntityAttribute(&'a Entity, &'a Attribute),
    RelationshipAttribute(&'a Relationship, &'a Attribute),
    Entity(&'a Entity),
    Relationship(&'a Relationship),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Annotation {
    pub target: FeatureRef,
    /// Important features in the order the expert selected them.
    pub important: Vec<FeatureRef>,
}

impl Annotation {
    pub fn new(target: FeatureRef, important: Vec<FeatureRef>) -> Self {
        Self { target, important }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ERDiagram {
    entities: Vec<Entity>,
    relationships: Vec<Relationship>,
    annotation: Option<Annotation>,
}

impl ERDiagram {
    /// Builds a diagram in canonical order. The result is not validated; see
    /// [`ERDiagram::try_new`] and [`ERDiagram::validate`].
    pub fn new(
        mut entities: Vec<Entity>,
        mut relationships: Vec<Relationship>,
        annotation: Option<Annotation>,
    ) -> Self {
        for e in &mut entities {
            sort_attributes(&mut e.attributes);
        }
        for r in &mut relationships {
            sort_attributes(&mut r.attributes);
        }
        entities.sort_by(|a, b| name_cmp(&a.name, &b.name));
        relationships.sort_by(|a, b| name_cmp(&a.name, &b.name));
        Self {
            entities,
            relationships,
            annotation,
        }
    }

    pub fn try_new(
        entities: Vec<Entity>,
        relationships: Vec<Relationship>,
        annotation: Option<Annotation>,
    ) -> Result<Self, Vec<Violation>> {
        let d = Self::new(entities, relationships, annotation);
        let violations = d.validate();
        if violations.is_empty() {
            Ok(d)
        } else {
            Err(violations)
        }
    }

    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    pub fn relationships(&self) -> &[Relationship] {
        &self.relationships
    }

    pub fn annotation(&self) -> Option<&Annotation> {
        self.annotation.as_ref()
    }

    /// Same diagram with the annotation replaced.
    pub fn with_annotation(&self, annotation: Option<Annotation>) -> Self {
        Self {
            entities: self.entities.clone(),
            relationships: self.relationships.clone(),
            annotation,
        }
    }

    pub fn entity(&self, name: &str) -> Option<&Entity> {
        self.entities.iter().find(|e| e.name == name)
    }

    pub fn relationship(&self, name: &str) -> Option<&Relationship> {
        self.relationships.iter().find(|r| r.name == name)
    }

    /// Relationships in which `entity` participates, in canonical order.
    pub fn incident<'a>(&'a self, entity: &'a str) -> impl Iterator<Item = &'a Relationship> + 'a {
        self.relationships.iter().filter(move |r| r.involves(entity))
    }

    pub fn resolve(&self, feature: &FeatureRef) -> Option<Feature<'_>> {
        match feature {
            FeatureRef::Attribute { owner, name } => {
                if let Some(e) = self.entity(owner) {
                    e.attribute(name).map(|a| Feature::EntityAttribute(e, a))
                } else {
                    let r = self.relationship(owner)?;
                    r.attribute(name).map(|a| Feature::RelationshipAttribute(r, a))
                }
            }
            FeatureRef::Entity(name) => self.entity(name).map(Feature::Entity),
            FeatureRef::Relationship(name) => self.relationship(name).map(Feature::Relationship),
        }
    }

    /// Lists every violated structural invariant; empty iff the diagram is valid.
    pub fn validate(&self) -> Vec<Violation> {
        validate::validate(self)
    }
}

/// Canonical name order: case-insensitive first, raw bytes to break ties.
pub(crate) fn name_cmp(a: &str, b: &str) -> Ordering {
    a.to_lowercase()
        .cmp(&b.to_lowercase())
        .then_with(|| a.cmp(b))
}

fn sort_attributes(attrs: &mut [Attribute]) {
    attrs.sort_by(|a, b| name_cmp(&a.name, &b.name).then(a.kind.cmp(&b.kind)));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_sorts_declarations() {
        let d = ERDiagram::new(
            vec![
                Entity::new("b", vec![Attribute::binary("z"), Attribute::binary("A")]),
                Entity::new("A", vec![]),
            ],
            vec![],
            None,
        );
        let names: Vec<_> = d.entities().iter().map(|e| e.name.as_str()).collect();
        assert_eq!(names, ["A", "b"]);
        let attrs: Vec<_> = d.entities()[1].attributes.iter().map(|a| a.name.as_str()).collect();
        assert_eq!(attrs, ["A", "z"]);
    }

    #[test]
    fn reflexive_neighbours() {
        let r = Relationship::new("WorkedUnder", vec!["Person".into(), "Person".into()], vec![]);
        assert_eq!(r.neighbours("Person"), ["Person"]);
        let r = Relationship::new("Owns", vec!["Person".into(), "Car".into()], vec![]);
        assert_eq!(r.neighbours("Person"), ["Car"]);
        assert_eq!(r.neighbours("Car"), ["Person"]);
        assert!(r.neighbours("Boat").is_empty());
    }
}
