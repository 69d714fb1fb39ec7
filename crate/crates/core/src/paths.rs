//! Path search over the entity/relationship graph.
//!
//! Entities are nodes and relationships are hyperedges. A [`Path`] starts at
//! the entity anchoring the target and alternates relationships and entities
//! until it reaches a feature. Search is breadth-first, so paths come out in
//! order of relationship count; within a level, expansions follow
//! (relationship name, next entity name).

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::er::{ERDiagram, Feature, FeatureRef};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("feature {0} does not resolve in the diagram")]
    InvalidFeature(FeatureRef),
    #[error("invalid walk configuration: {0}")]
    InvalidConfig(String),
    #[error("path step {step} does not match the diagram: {detail}")]
    Mismatch { step: usize, detail: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// First solution found.
    Shortest,
    /// Every solution of minimal length.
    #[serde(alias = "shortest-all")]
    ShortestAll,
    /// Every solution within the depth bound.
    All,
    /// Seeded random walks from the target, ignoring important features.
    Random,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Shortest => "shortest",
            Strategy::ShortestAll => "shortest-all",
            Strategy::All => "all",
            Strategy::Random => "random",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = PathError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "shortest" => Ok(Strategy::Shortest),
            "shortest-all" | "shortest_all" => Ok(Strategy::ShortestAll),
            "all" => Ok(Strategy::All),
            "random" => Ok(Strategy::Random),
            other => Err(PathError::InvalidConfig(format!("unknown strategy {other:?}"))),
        }
    }
}

/// Search parameters. `max_depth` counts relationships, not nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WalkConfig {
    pub strategy: Strategy,
    pub max_depth: usize,
    /// Random strategy only.
    pub seed: u64,
    /// Random strategy only.
    pub num_walks: usize,
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self {
            strategy: Strategy::Shortest,
            max_depth: 4,
            seed: 0,
            num_walks: 10,
        }
    }
}

impl WalkConfig {
    pub fn new(strategy: Strategy, max_depth: usize) -> Self {
        Self {
            strategy,
            max_depth,
            ..Self::default()
        }
    }

    pub fn random(max_depth: usize, seed: u64, num_walks: usize) -> Self {
        Self {
            strategy: Strategy::Random,
            max_depth,
            seed,
            num_walks,
        }
    }

    pub fn check(&self) -> Result<(), PathError> {
        if self.max_depth == 0 {
            return Err(PathError::InvalidConfig("max_depth must be at least 1".into()));
        }
        if self.strategy == Strategy::Random && self.num_walks == 0 {
            return Err(PathError::InvalidConfig("num_walks must be at least 1".into()));
        }
        Ok(())
    }
}

/// One relationship traversal. `entity` is `None` only for the final hop of a
/// path that ends on the relationship itself (the relationship, or one of its
/// attributes, is the endpoint).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Hop {
    pub relationship: String,
    pub entity: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Path {
    pub start: String,
    pub hops: Vec<Hop>,
    pub endpoint: FeatureRef,
}

impl Path {
    /// Number of relationships traversed.
    pub fn len(&self) -> usize {
        self.hops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hops.is_empty()
    }

    /// Last entity on the path, or `None` if it ends on a relationship.
    pub fn frontier(&self) -> Option<&str> {
        match self.hops.last() {
            None => Some(&self.start),
            Some(h) => h.entity.as_deref(),
        }
    }

    /// Alternating entity/relationship names.
    pub fn steps(&self) -> Vec<&str> {
        let mut out = vec![self.start.as_str()];
        for h in &self.hops {
            out.push(&h.relationship);
            if let Some(e) = &h.entity {
                out.push(e);
            }
        }
        out
    }

    /// Replays the path against `d`, checking that every hop is incident.
    pub fn check(&self, d: &ERDiagram) -> Result<(), PathError> {
        if d.entity(&self.start).is_none() {
            return Err(PathError::Mismatch {
                step: 0,
                detail: format!("unknown entity {}", self.start),
            });
        }
        let mut current = Some(self.start.as_str());
        for (i, hop) in self.hops.iter().enumerate() {
            let step = i + 1;
            let Some(from) = current else {
                return Err(PathError::Mismatch {
                    step,
                    detail: "path continues after ending on a relationship".into(),
                });
            };
            let r = d.relationship(&hop.relationship).ok_or_else(|| PathError::Mismatch {
                step,
                detail: format!("unknown relationship {}", hop.relationship),
            })?;
            if !r.involves(from) {
                return Err(PathError::Mismatch {
                    step,
                    detail: format!("{} does not involve {from}", r.name),
                });
            }
            if let Some(to) = &hop.entity {
                if !r.neighbours(from).contains(&to.as_str()) {
                    return Err(PathError::Mismatch {
                        step,
                        detail: format!("{} does not lead from {from} to {to}", r.name),
                    });
                }
            }
            current = hop.entity.as_deref();
        }
        Ok(())
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.start)?;
        for h in &self.hops {
            match &h.entity {
                Some(e) => write!(f, " -[{}]-> {e}", h.relationship)?,
                None => write!(f, " -[{}]", h.relationship)?,
            }
        }
        if let FeatureRef::Attribute { .. } = self.endpoint {
            write!(f, " => {}", self.endpoint)?;
        }
        Ok(())
    }
}

/// A feature the search could not reach within the depth bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Unreachable {
    pub feature: FeatureRef,
    pub max_depth: usize,
}

impl fmt::Display for Unreachable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "no path to {} within {} relationship(s)",
            self.feature, self.max_depth
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSearch {
    pub paths: Vec<Path>,
    /// Set when `paths` is empty.
    pub unreachable: Option<Unreachable>,
}

/// Entities a search for `target` starts from.
///
/// An entity attribute anchors at its owner; a relationship (or an attribute
/// of one) anchors at each distinct participant, in participant order.
pub fn anchors<'a>(d: &'a ERDiagram, target: &FeatureRef) -> Result<Vec<&'a str>, PathError> {
    let feature = d
        .resolve(target)
        .ok_or_else(|| PathError::InvalidFeature(target.clone()))?;
    let out = match feature {
        Feature::EntityAttribute(e, _) | Feature::Entity(e) => vec![e.name.as_str()],
        Feature::Relationship(r) | Feature::RelationshipAttribute(r, _) => {
            let mut seen = Vec::new();
            for p in &r.participants {
                if !seen.contains(&p.as_str()) {
                    seen.push(p.as_str());
                }
            }
            seen
        }
    };
    Ok(out)
}

/// Solution test for the goal feature `u`.
struct Goal<'a> {
    feature: &'a FeatureRef,
    resolved: Feature<'a>,
}

impl<'a> Goal<'a> {
    fn reached_at_entity(&self, entity: &str) -> bool {
        match self.resolved {
            Feature::Entity(e) | Feature::EntityAttribute(e, _) => e.name == entity,
            _ => false,
        }
    }

    fn reached_at_relationship(&self, relationship: &str) -> bool {
        match self.resolved {
            Feature::Relationship(r) | Feature::RelationshipAttribute(r, _) => {
                r.name == relationship
            }
            _ => false,
        }
    }
}

/// Breadth-first search for paths from the target's anchor(s) to `goal`.
///
/// A path is a solution when its last entity is `goal` or owns `goal`, or
/// when the relationship just traversed is `goal` or owns it. Solutions keep
/// being extended, so with [`Strategy::All`] walks that revisit entities are
/// reported too, up to `cfg.max_depth` relationships.
pub fn find_paths(
    d: &ERDiagram,
    target: &FeatureRef,
    goal: &FeatureRef,
    cfg: &WalkConfig,
) -> Result<PathSearch, PathError> {
    cfg.check()?;
    if cfg.strategy == Strategy::Random {
        return Err(PathError::InvalidConfig(
            "random strategy does not search for a feature; use random_paths".into(),
        ));
    }
    let starts = anchors(d, target)?;
    let goal = Goal {
        feature: goal,
        resolved: d
            .resolve(goal)
            .ok_or_else(|| PathError::InvalidFeature(goal.clone()))?,
    };
    let strategy = cfg.strategy;

    let mut solutions: Vec<Path> = Vec::new();
    let mut searched: HashSet<Vec<String>> = HashSet::new();
    let mut frontier: Vec<Path> = Vec::new();

    let finish = |paths: Vec<Path>| PathSearch {
        unreachable: paths.is_empty().then(|| Unreachable {
            feature: goal.feature.clone(),
            max_depth: cfg.max_depth,
        }),
        paths,
    };

    for s in starts {
        let p = Path {
            start: s.to_string(),
            hops: Vec::new(),
            endpoint: FeatureRef::Entity(s.to_string()),
        };
        searched.insert(step_key(&p));
        if goal.reached_at_entity(s) {
            solutions.push(Path {
                endpoint: goal.feature.clone(),
                ..p.clone()
            });
            if strategy == Strategy::Shortest {
                return Ok(finish(solutions));
            }
        }
        frontier.push(p);
    }
    if strategy == Strategy::ShortestAll && !solutions.is_empty() {
        return Ok(finish(solutions));
    }

    for _ in 0..cfg.max_depth {
        let mut next = Vec::new();
        for n in &frontier {
            let x = n.frontier().expect("frontier paths end on an entity");
            for r in d.incident(x) {
                if goal.reached_at_relationship(&r.name) {
                    let p = n.extended(&r.name, None, goal.feature.clone());
                    if searched.insert(step_key(&p)) {
                        solutions.push(p);
                        if strategy == Strategy::Shortest {
                            return Ok(finish(solutions));
                        }
                    }
                }
                for y in r.neighbours(x) {
                    let p = n.extended(&r.name, Some(y), FeatureRef::Entity(y.to_string()));
                    if !searched.insert(step_key(&p)) {
                        continue;
                    }
                    if goal.reached_at_entity(y) {
                        solutions.push(Path {
                            endpoint: goal.feature.clone(),
                            ..p.clone()
                        });
                        if strategy == Strategy::Shortest {
                            return Ok(finish(solutions));
                        }
                    }
                    next.push(p);
                }
            }
        }
        if strategy == Strategy::ShortestAll && !solutions.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(finish(solutions))
}

/// Seeded random walks from the target's anchor.
///
/// Each walk picks uniformly among the incident (relationship, next entity)
/// pairs at every step, stopping after `max_depth` relationships or at a dead
/// end. Exactly `num_walks` paths are returned; walks may repeat.
pub fn random_paths(
    d: &ERDiagram,
    target: &FeatureRef,
    cfg: &WalkConfig,
) -> Result<Vec<Path>, PathError> {
    cfg.check()?;
    if cfg.strategy != Strategy::Random {
        return Err(PathError::InvalidConfig(format!(
            "random_paths needs the random strategy, got {}",
            cfg.strategy
        )));
    }
    let starts = anchors(d, target)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(cfg.num_walks);
    for _ in 0..cfg.num_walks {
        let start = if starts.len() == 1 {
            starts[0]
        } else {
            starts[rng.random_range(0..starts.len())]
        };
        let mut current = start;
        let mut hops = Vec::new();
        while hops.len() < cfg.max_depth {
            let choices: Vec<(&str, &str)> = d
                .incident(current)
                .flat_map(|r| r.neighbours(current).into_iter().map(move |y| (r.name.as_str(), y)))
                .collect();
            if choices.is_empty() {
                break;
            }
            let (r, y) = choices[rng.random_range(0..choices.len())];
            hops.push(Hop {
                relationship: r.to_string(),
                entity: Some(y.to_string()),
            });
            current = y;
        }
        out.push(Path {
            start: start.to_string(),
            hops,
            endpoint: FeatureRef::Entity(current.to_string()),
        });
    }
    Ok(out)
}

impl Path {
    fn extended(&self, relationship: &str, entity: Option<&str>, endpoint: FeatureRef) -> Path {
        let mut hops = self.hops.clone();
        hops.push(Hop {
            relationship: relationship.to_string(),
            entity: entity.map(str::to_string),
        });
        Path {
            start: self.start.clone(),
            hops,
            endpoint,
        }
    }
}

fn step_key(p: &Path) -> Vec<String> {
    p.steps().into_iter().map(str::to_string).collect()
}
