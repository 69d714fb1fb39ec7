//! JSON intermediate representation (`.erd.json`).
//!
//! ```json
//! {
//!   "entities": [{"name": "Professor", "attributes": [{"name": "Tenure", "kind": "binary"}]}],
//!   "relationships": [{"name": "Advises", "participants": ["Professor", "Student"], "attributes": []}],
//!   "annotation": {"target": {"owner": "Professor", "name": "Tenure"}, "important": [{"relationship": "Advises"}]}
//! }
//! ```
//!
//! Feature references take one of three shapes: `{"owner", "name"}` for an
//! attribute, `{"relationship"}` or `{"entity"}`. A top-level `"layout"` key is
//! accepted and ignored; editors keep canvas positions there.

use serde::de::IgnoredAny;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Annotation, Attribute, AttributeKind, ERDiagram, Entity, FeatureRef, Relationship, Violation};

#[derive(Debug, Error)]
pub enum IrError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid diagram: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IrDocument {
    entities: Vec<IrEntity>,
    #[serde(default)]
    relationships: Vec<IrRelationship>,
    #[serde(default)]
    annotation: Option<IrAnnotation>,
    #[serde(default, skip_serializing)]
    #[allow(dead_code)]
    layout: Option<IgnoredAny>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IrEntity {
    name: String,
    #[serde(default)]
    attributes: Vec<IrAttribute>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IrRelationship {
    name: String,
    participants: Vec<String>,
    #[serde(default)]
    attributes: Vec<IrAttribute>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IrAttribute {
    name: String,
    kind: IrKind,
}

#[derive(Serialize, Deserialize, Clone, Copy)]
#[serde(rename_all = "lowercase")]
enum IrKind {
    Binary,
    Multivalued,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IrAnnotation {
    target: IrFeature,
    #[serde(default)]
    important: Vec<IrFeature>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum IrFeature {
    Attribute(IrAttributeRef),
    Relationship(IrRelationshipRef),
    Entity(IrEntityRef),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IrAttributeRef {
    owner: String,
    name: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IrRelationshipRef {
    relationship: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IrEntityRef {
    entity: String,
}

/// Parses and validates an IR document.
pub fn parse_ir(text: &str) -> Result<ERDiagram, IrError> {
    let doc: IrDocument = serde_json::from_str(text).map_err(|e| IrError::Syntax {
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })?;
    let d = ERDiagram::new(
        doc.entities.into_iter().map(Entity::from).collect(),
        doc.relationships.into_iter().map(Relationship::from).collect(),
        doc.annotation.map(Annotation::from),
    );
    let violations = d.validate();
    if violations.is_empty() {
        Ok(d)
    } else {
        Err(IrError::Invalid(violations))
    }
}

/// Canonical serialization: pretty-printed JSON in the diagram's canonical
/// order, ending with a newline. Equal diagrams serialize to equal bytes.
pub fn serialize_ir(d: &ERDiagram) -> String {
    let doc = IrDocument {
        entities: d
            .entities()
            .iter()
            .map(|e| IrEntity {
                name: e.name.clone(),
                attributes: e.attributes.iter().map(IrAttribute::from).collect(),
            })
            .collect(),
        relationships: d
            .relationships()
            .iter()
            .map(|r| IrRelationship {
                name: r.name.clone(),
                participants: r.participants.clone(),
                attributes: r.attributes.iter().map(IrAttribute::from).collect(),
            })
            .collect(),
        annotation: d.annotation().map(|a| IrAnnotation {
            target: IrFeature::from(&a.target),
            important: a.important.iter().map(IrFeature::from).collect(),
        }),
        layout: None,
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("IR document serializes");
    out.push('\n');
    out
}

// serde_json appends " at line L column C"; position is reported separately.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

impl From<IrEntity> for Entity {
    fn from(e: IrEntity) -> Self {
        Entity::new(e.name, e.attributes.into_iter().map(Attribute::from).collect())
    }
}

impl From<IrRelationship> for Relationship {
    fn from(r: IrRelationship) -> Self {
        Relationship::new(
            r.name,
            r.participants,
            r.attributes.into_iter().map(Attribute::from).collect(),
        )
    }
}

impl From<IrAttribute> for Attribute {
    fn from(a: IrAttribute) -> Self {
        let kind = match a.kind {
            IrKind::Binary => AttributeKind::Binary,
            IrKind::Multivalued => AttributeKind::Multivalued,
        };
        Attribute::new(a.name, kind)
    }
}

impl From<&Attribute> for IrAttribute {
    fn from(a: &Attribute) -> Self {
        let kind = match a.kind {
            AttributeKind::Binary => IrKind::Binary,
            AttributeKind::Multivalued => IrKind::Multivalued,
        };
        IrAttribute {
            name: a.name.clone(),
            kind,
        }
    }
}

impl From<IrAnnotation> for Annotation {
    fn from(a: IrAnnotation) -> Self {
        Annotation::new(
            a.target.into(),
            a.important.into_iter().map(FeatureRef::from).collect(),
        )
    }
}

impl From<IrFeature> for FeatureRef {
    fn from(f: IrFeature) -> Self {
        match f {
            IrFeature::Attribute(a) => FeatureRef::Attribute {
                owner: a.owner,
                name: a.name,
            },
            IrFeature::Relationship(r) => FeatureRef::Relationship(r.relationship),
            IrFeature::Entity(e) => FeatureRef::Entity(e.entity),
        }
    }
}

impl From<&FeatureRef> for IrFeature {
    fn from(f: &FeatureRef) -> Self {
        match f {
            FeatureRef::Attribute { owner, name } => IrFeature::Attribute(IrAttributeRef {
                owner: owner.clone(),
                name: name.clone(),
            }),
            FeatureRef::Relationship(r) => IrFeature::Relationship(IrRelationshipRef {
                relationship: r.clone(),
            }),
            FeatureRef::Entity(e) => IrFeature::Entity(IrEntityRef { entity: e.clone() }),
        }
    }
}

impl Serialize for FeatureRef {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        IrFeature::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for FeatureRef {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        IrFeature::deserialize(d).map(FeatureRef::from)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn university_has_three_entities() {
        let d = parse_ir(fixtures::UNIVERSITY_IR).unwrap();
        let names: Vec<_> = d.entities().iter().map(|e| e.name.as_str()).collect();
        assert_eq!(names, ["Course", "Professor", "Student"]);
    }

    #[test]
    fn relationship_without_entities_is_invalid() {
        let text = r#"{"entities": [], "relationships": [{"name": "R", "participants": ["A", "B"]}]}"#;
        match parse_ir(text) {
            Err(IrError::Invalid(v)) => assert!(!v.is_empty()),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn syntax_error_carries_position() {
        let text = "{\n  \"entities\": [\n    {\"name\": \"A\",}\n  ]\n}";
        match parse_ir(text) {
            Err(IrError::Syntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_kind_rejected() {
        let text = r#"{"entities": [{"name": "A", "attributes": [{"name": "x", "kind": "ternary"}]}]}"#;
        assert!(matches!(parse_ir(text), Err(IrError::Syntax { .. })));
    }

    #[test]
    fn layout_section_ignored() {
        let text = r#"{"entities": [{"name": "A"}], "layout": {"A": {"x": 10, "y": 20}}}"#;
        let d = parse_ir(text).unwrap();
        assert!(!serialize_ir(&d).contains("layout"));
    }

    #[test]
    fn reflexive_participants_keep_order() {
        let text = r#"{"entities": [{"name": "Person"}, {"name": "Alias"}],
            "relationships": [{"name": "samePerson", "participants": ["Person", "Person"]},
                              {"name": "Known", "participants": ["Person", "Alias"]}]}"#;
        let d = parse_ir(text).unwrap();
        let out = serialize_ir(&d);
        let again = parse_ir(&out).unwrap();
        assert_eq!(again, d);
        assert_eq!(d.relationship("Known").unwrap().participants, ["Person", "Alias"]);
    }

    #[test]
    fn declaration_order_does_not_change_bytes() {
        let a = r#"{"entities": [{"name": "B"}, {"name": "A", "attributes": [{"name": "y", "kind": "binary"}, {"name": "x", "kind": "multivalued"}]}],
                    "relationships": [{"name": "S", "participants": ["A", "B"]}, {"name": "R", "participants": ["B", "A"]}]}"#;
        let b = r#"{"relationships": [{"name": "R", "participants": ["B", "A"]}, {"name": "S", "participants": ["A", "B"]}],
                    "entities": [{"name": "A", "attributes": [{"name": "x", "kind": "multivalued"}, {"name": "y", "kind": "binary"}]}, {"name": "B"}]}"#;
        assert_eq!(
            serialize_ir(&parse_ir(a).unwrap()),
            serialize_ir(&parse_ir(b).unwrap())
        );
    }
}
