//! Seeded random instances.

use std::collections::BTreeSet;

use ermodes::clauses::{ClauseLiteral, Term};
use ermodes::er::{
    serialize_ir, Annotation, Attribute, ERDiagram, Entity, FeatureRef, Relationship,
};
use ermodes::modes::{ArgMode, Direction, ModeSet, ModeSpec};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const ENTITY_NAMES: [&str; 6] = ["Person", "Movie", "Course", "Paper", "Venue", "Studio"];

fn attribute(rng: &mut ChaCha8Rng, counter: &mut usize) -> Attribute {
    let name = format!("A{counter}");
    *counter += 1;
    if rng.random_bool(0.5) {
        Attribute::binary(name)
    } else {
        Attribute::multivalued(name)
    }
}

/// A valid annotated diagram with 1 to 6 entities and up to 8 relationships.
/// Relationships are binary or ternary and may repeat an entity.
pub fn diagram(seed: u64) -> ERDiagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counter = 0;
    let n_entities = rng.random_range(1..=6);
    let entities: Vec<Entity> = (0..n_entities)
        .map(|i| {
            let lo = usize::from(i == 0);
            let n = rng.random_range(lo..=2);
            let attrs = (0..n).map(|_| attribute(&mut rng, &mut counter)).collect();
            Entity::new(ENTITY_NAMES[i], attrs)
        })
        .collect();
    let n_rels = rng.random_range(0..=8);
    let relationships: Vec<Relationship> = (0..n_rels)
        .map(|i| {
            let arity = if rng.random_bool(0.75) { 2 } else { 3 };
            let participants = (0..arity)
                .map(|_| ENTITY_NAMES[rng.random_range(0..n_entities)].to_string())
                .collect();
            let n_attrs = usize::from(rng.random_bool(0.3));
            let attrs = (0..n_attrs).map(|_| attribute(&mut rng, &mut counter)).collect();
            Relationship::new(format!("R{i}"), participants, attrs)
        })
        .collect();

    let mut targets = Vec::new();
    let mut features = Vec::new();
    for e in &entities {
        features.push(FeatureRef::entity(&e.name));
        for a in &e.attributes {
            targets.push(FeatureRef::attribute(&e.name, &a.name));
        }
    }
    for r in &relationships {
        targets.push(FeatureRef::relationship(&r.name));
        for a in &r.attributes {
            targets.push(FeatureRef::attribute(&r.name, &a.name));
        }
    }
    let target = targets.choose(&mut rng).unwrap().clone();
    features.extend(targets.into_iter().filter(|f| *f != target));
    features.shuffle(&mut rng);
    let k = rng.random_range(1..=3).min(features.len());
    features.truncate(k);

    ERDiagram::new(entities, relationships, Some(Annotation::new(target, features)))
}

/// IR text for `d` with entities, relationships and attribute lists
/// shuffled. Participant and important-feature order is kept.
pub fn shuffled_ir(d: &ERDiagram, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut doc: Value = serde_json::from_str(&serialize_ir(d)).unwrap();
    for key in ["entities", "relationships"] {
        let list = doc[key].as_array_mut().unwrap();
        list.shuffle(&mut rng);
        for item in list {
            item["attributes"].as_array_mut().unwrap().shuffle(&mut rng);
        }
    }
    serde_json::to_string(&doc).unwrap()
}

const TYPES: [&str; 2] = ["t0", "t1"];

/// A mode set over two types with a unary or binary target and at most four
/// body modes of arity 1 to 3.
pub fn mode_set(seed: u64) -> ModeSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let head_arity = rng.random_range(1..=2);
    let target = ModeSpec::new(
        "h",
        (0..head_arity)
            .map(|_| ArgMode::input(*TYPES.choose(&mut rng).unwrap()))
            .collect(),
    );
    let n = rng.random_range(0..=4);
    let body: BTreeSet<ModeSpec> = (0..n)
        .map(|_| {
            let pred = format!("p{}", rng.random_range(0..3));
            let arity = rng.random_range(1..=3);
            let args = (0..arity)
                .map(|_| {
                    let roll: f64 = rng.random();
                    let dir = if roll < 0.45 {
                        Direction::Input
                    } else if roll < 0.8 {
                        Direction::Output
                    } else {
                        Direction::Constant
                    };
                    ArgMode::new(dir, *TYPES.choose(&mut rng).unwrap())
                })
                .collect();
            ModeSpec::new(pred, args)
        })
        .collect();
    ModeSet::new(target, body).unwrap()
}

/// Random literals over the body predicates of `m` with variables drawn from
/// a small pool. Mostly illegal bodies.
pub fn candidate_body(m: &ModeSet, seed: u64) -> Vec<ClauseLiteral> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes: Vec<&ModeSpec> = m.body_modes().iter().collect();
    if modes.is_empty() {
        return Vec::new();
    }
    let len = rng.random_range(1..=3);
    (0..len)
        .map(|_| {
            let mode = modes.choose(&mut rng).unwrap();
            let args = mode
                .args
                .iter()
                .map(|a| {
                    if a.direction == Direction::Constant {
                        Term::Const
                    } else {
                        Term::Var(format!("X{}", rng.random_range(0..5)))
                    }
                })
                .collect();
            ClauseLiteral::new(mode.predicate.clone(), args)
        })
        .collect()
}

/// `body` with literals reordered and every variable renamed.
pub fn renamed(body: &[ClauseLiteral], seed: u64) -> Vec<ClauseLiteral> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let originals: Vec<String> = body
        .iter()
        .flat_map(|l| l.args.iter())
        .filter_map(|t| match t {
            Term::Var(v) => Some(v.clone()),
            Term::Const => None,
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut perm: Vec<usize> = (0..originals.len()).collect();
    perm.shuffle(&mut rng);
    let rename = |v: &str| {
        let i = originals.iter().position(|o| o == v).unwrap();
        format!("Z{}", perm[i])
    };
    let mut out: Vec<ClauseLiteral> = body
        .iter()
        .map(|l| {
            ClauseLiteral::new(
                l.predicate.clone(),
                l.args
                    .iter()
                    .map(|t| match t {
                        Term::Var(v) => Term::Var(rename(v)),
                        Term::Const => Term::Const,
                    })
                    .collect(),
            )
        })
        .collect();
    out.shuffle(&mut rng);
    out
}
