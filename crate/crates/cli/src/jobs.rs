//! Pipeline steps shared by the command line and the HTTP service, so both
//! produce the same bytes for the same request.

use ermodes::clauses::{clause_space_report, exhaustive_modes, ClauseSpaceReport};
use ermodes::er::{ERDiagram, FeatureRef};
use ermodes::modes::{emit_modes, gmc, parse_modes, Dialect, ModeError, ModeParseError, ModeSet};
use ermodes::paths::{find_paths, random_paths, Hop, Path, Strategy, WalkConfig};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// How clause-space results are described wherever they are shown.
pub const CLAUSE_METRIC: &str =
    "search-space proxy: distinct legal clause bodies up to variable renaming, by body length";

#[derive(Debug, Error)]
pub enum JobError {
    #[error(transparent)]
    Mode(#[from] ModeError),
    #[error(transparent)]
    ModeFile(#[from] ModeParseError),
    #[error("unknown feature {0}")]
    UnknownFeature(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModesOutput {
    pub text: String,
    pub warnings: Vec<String>,
}

pub fn modes(d: &ERDiagram, cfg: &WalkConfig, dialect: Dialect) -> Result<ModesOutput, JobError> {
    let r = gmc(d, cfg)?;
    Ok(ModesOutput {
        text: emit_modes(&r.modes, dialect),
        warnings: r.warnings.iter().map(ToString::to_string).collect(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PathView {
    pub text: String,
    pub length: usize,
    pub start: String,
    pub hops: Vec<Hop>,
    pub endpoint: FeatureRef,
}

impl From<&Path> for PathView {
    fn from(p: &Path) -> Self {
        PathView {
            text: p.to_string(),
            length: p.len(),
            start: p.start.clone(),
            hops: p.hops.clone(),
            endpoint: p.endpoint.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FeaturePaths {
    pub feature: FeatureRef,
    pub paths: Vec<PathView>,
    pub unreachable: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PathsOutput {
    /// One entry per searched feature.
    Features(Vec<FeaturePaths>),
    /// Random walks from the target.
    Walks(Vec<PathView>),
}

/// Paths from the target to `feature`, or to every important feature when
/// `feature` is `None`. The random strategy returns walks instead.
pub fn paths(
    d: &ERDiagram,
    cfg: &WalkConfig,
    feature: Option<&FeatureRef>,
) -> Result<PathsOutput, JobError> {
    let ann = d.annotation().ok_or(ModeError::MissingAnnotation)?;
    if cfg.strategy == Strategy::Random {
        let walks = random_paths(d, &ann.target, cfg).map_err(ModeError::from)?;
        return Ok(PathsOutput::Walks(walks.iter().map(PathView::from).collect()));
    }
    let goals: Vec<FeatureRef> = match feature {
        Some(f) => vec![f.clone()],
        None => ann.important.clone(),
    };
    let mut out = Vec::new();
    for goal in goals {
        let search = find_paths(d, &ann.target, &goal, cfg).map_err(ModeError::from)?;
        out.push(FeaturePaths {
            feature: goal,
            paths: search.paths.iter().map(PathView::from).collect(),
            unreachable: search.unreachable.map(|u| u.to_string()),
        });
    }
    Ok(PathsOutput::Features(out))
}

/// Where the modes for a clause-space report come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeSource {
    #[default]
    Gmc,
    Exhaustive,
}

pub fn mode_set(d: &ERDiagram, source: ModeSource, cfg: &WalkConfig) -> Result<ModeSet, JobError> {
    Ok(match source {
        ModeSource::Gmc => gmc(d, cfg)?.modes,
        ModeSource::Exhaustive => exhaustive_modes(d)?,
    })
}

pub fn clause_space(
    d: &ERDiagram,
    source: ModeSource,
    cfg: &WalkConfig,
    max_len: usize,
    cap: u64,
) -> Result<ClauseSpaceReport, JobError> {
    Ok(clause_space_report(&mode_set(d, source, cfg)?, max_len, cap))
}

pub fn clause_space_of_file(text: &str, max_len: usize, cap: u64) -> Result<ClauseSpaceReport, JobError> {
    Ok(clause_space_report(&parse_modes(text)?, max_len, cap))
}

/// Parses `Owner.Name` as an attribute, or a bare name as the entity or
/// relationship it names.
pub fn parse_feature(d: &ERDiagram, s: &str) -> Result<FeatureRef, JobError> {
    let f = match s.split_once('.') {
        Some((owner, name)) => FeatureRef::attribute(owner, name),
        None if d.entity(s).is_some() => FeatureRef::entity(s),
        None if d.relationship(s).is_some() => FeatureRef::relationship(s),
        None => return Err(JobError::UnknownFeature(s.to_string())),
    };
    if d.resolve(&f).is_none() {
        return Err(JobError::UnknownFeature(s.to_string()));
    }
    Ok(f)
}
