//! Comparisons between library output and the oracles.

use ermodes::clauses::enumerate_clauses;
use ermodes::er::{ERDiagram, FeatureRef};
use ermodes::modes::ModeSet;
use ermodes::paths::{find_paths, Path, Strategy, WalkConfig};

use crate::oracle::{self, alpha_eq, is_head, Lit};

/// Step sequences of `paths`, sorted.
pub fn steps(paths: &[Path]) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = paths
        .iter()
        .map(|p| p.steps().into_iter().map(String::from).collect())
        .collect();
    out.sort();
    out
}

/// `find_paths(all)` against the recursive enumerator for every important
/// feature of `d`.
pub fn all_paths(d: &ERDiagram, max_depth: usize) -> Result<(), String> {
    let ann = d.annotation().ok_or("no annotation")?;
    for goal in &ann.important {
        let found = find_paths(d, &ann.target, goal, &WalkConfig::new(Strategy::All, max_depth))
            .map_err(|e| e.to_string())?;
        let expected = oracle::all_paths(d, &ann.target, goal, max_depth);
        let got = steps(&found.paths);
        if got != expected {
            return Err(describe(&ann.target, goal, max_depth, &got, &expected));
        }
    }
    Ok(())
}

fn describe(
    target: &FeatureRef,
    goal: &FeatureRef,
    depth: usize,
    got: &[Vec<String>],
    expected: &[Vec<String>],
) -> String {
    format!("{target} -> {goal} at depth {depth}: found {got:?}, oracle {expected:?}")
}

/// The enumerator against the brute-force generator: same number of classes
/// per length and every enumerated body matching exactly one class.
pub fn clause_space(m: &ModeSet, max_len: usize) -> Result<(), String> {
    let space = enumerate_clauses(m, max_len, u64::MAX);
    let expected = oracle::bodies(m, max_len);
    for (len, classes) in &expected {
        let got: Vec<Vec<Lit>> = space
            .bodies
            .iter()
            .filter(|b| b.literals.len() == *len)
            .map(oracle::body_lits)
            .collect();
        if got.len() != classes.len() || space.report.counts_by_length[len] != got.len() as u64 {
            return Err(format!(
                "length {len}: enumerated {} (report {}), oracle {}",
                got.len(),
                space.report.counts_by_length[len],
                classes.len()
            ));
        }
        for b in &got {
            let matches = classes.iter().filter(|c| alpha_eq(c, b, &is_head)).count();
            if matches != 1 {
                return Err(format!("{b:?} matches {matches} oracle classes"));
            }
        }
    }
    Ok(())
}
