//! Brute-force reference implementations.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use ermodes::clauses::{ClauseBody, ClauseLiteral, Term};
use ermodes::er::{AttributeKind, ERDiagram, FeatureRef, Relationship};
use ermodes::modes::{Direction, ModeSet};

enum Goal {
    AtEntity(String),
    AtRelationship(String),
}

fn goal_of(d: &ERDiagram, f: &FeatureRef) -> Goal {
    match f {
        FeatureRef::Entity(e) => Goal::AtEntity(e.clone()),
        FeatureRef::Relationship(r) => Goal::AtRelationship(r.clone()),
        FeatureRef::Attribute { owner, .. } => {
            if d.entities().iter().any(|e| &e.name == owner) {
                Goal::AtEntity(owner.clone())
            } else {
                Goal::AtRelationship(owner.clone())
            }
        }
    }
}

fn starts(d: &ERDiagram, target: &FeatureRef) -> Vec<String> {
    let owner = match target {
        FeatureRef::Entity(e) => return vec![e.clone()],
        FeatureRef::Relationship(r) => r,
        FeatureRef::Attribute { owner, .. } => owner,
    };
    if d.entities().iter().any(|e| &e.name == owner) {
        return vec![owner.clone()];
    }
    let r = d.relationships().iter().find(|r| &r.name == owner).unwrap();
    let mut out: Vec<String> = Vec::new();
    for p in &r.participants {
        if !out.contains(p) {
            out.push(p.clone());
        }
    }
    out
}

/// Entities reachable from `at` through `r`: any participant at a position
/// other than one of `at`'s own positions.
fn across(r: &Relationship, at: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for (i, p) in r.participants.iter().enumerate() {
        if p != at {
            continue;
        }
        for (j, q) in r.participants.iter().enumerate() {
            if i != j {
                out.insert(q.clone());
            }
        }
    }
    out
}

/// Every walk of at most `max_depth` relationships from the target's anchor
/// that reaches `goal`, as alternating entity/relationship names, sorted.
pub fn all_paths(
    d: &ERDiagram,
    target: &FeatureRef,
    goal: &FeatureRef,
    max_depth: usize,
) -> Vec<Vec<String>> {
    fn walk(
        d: &ERDiagram,
        goal: &Goal,
        steps: &mut Vec<String>,
        at: &str,
        left: usize,
        out: &mut Vec<Vec<String>>,
    ) {
        if matches!(goal, Goal::AtEntity(e) if e == at) {
            out.push(steps.clone());
        }
        if left == 0 {
            return;
        }
        for r in d.relationships() {
            if !r.participants.iter().any(|p| p == at) {
                continue;
            }
            if matches!(goal, Goal::AtRelationship(g) if *g == r.name) {
                let mut s = steps.clone();
                s.push(r.name.clone());
                out.push(s);
            }
            for y in across(r, at) {
                steps.push(r.name.clone());
                steps.push(y.clone());
                walk(d, goal, steps, &y, left - 1, out);
                steps.pop();
                steps.pop();
            }
        }
    }

    let goal = goal_of(d, goal);
    let mut out = Vec::new();
    for s in starts(d, target) {
        let mut steps = vec![s.clone()];
        walk(d, &goal, &mut steps, &s, max_depth, &mut out);
    }
    out.sort();
    out
}

/// Modes a path's steps compile to, applying the construction rules one
/// relationship at a time. `endpoint` adds the attribute mode when it names an
/// entity attribute.
pub fn path_modes(d: &ERDiagram, steps: &[String], endpoint: &FeatureRef) -> Vec<String> {
    let lower = |s: &str| s.to_lowercase();
    let mut out = Vec::new();
    let mut from = steps[0].clone();
    let mut i = 1;
    while i < steps.len() {
        let r = d.relationships().iter().find(|r| r.name == steps[i]).unwrap();
        for (pos, p) in r.participants.iter().enumerate() {
            if *p != from {
                continue;
            }
            let mut args = Vec::new();
            for (j, q) in r.participants.iter().enumerate() {
                args.push(format!("{}{}", if j == pos { '+' } else { '-' }, lower(q)));
            }
            for a in &r.attributes {
                args.push(format!("#{}", lower(&a.name)));
            }
            out.push(format!("{}({})", lower(&r.name), args.join(", ")));
        }
        if let Some(next) = steps.get(i + 1) {
            from = next.clone();
        }
        i += 2;
    }
    if let FeatureRef::Attribute { owner, name } = endpoint {
        if let Some(e) = d.entities().iter().find(|e| &e.name == owner) {
            let a = e.attributes.iter().find(|a| &a.name == name).unwrap();
            out.push(match a.kind {
                AttributeKind::Binary => format!("{}(+{})", lower(name), lower(owner)),
                AttributeKind::Multivalued => {
                    format!("{}(+{}, #{})", lower(name), lower(owner), lower(name))
                }
            });
        }
    }
    out
}

/// A literal as predicate plus argument names; `#` marks a constant.
pub type Lit = (String, Vec<String>);

pub fn lits(body: &[ClauseLiteral]) -> Vec<Lit> {
    body.iter()
        .map(|l| {
            (
                l.predicate.clone(),
                l.args
                    .iter()
                    .map(|t| match t {
                        Term::Var(v) => v.clone(),
                        Term::Const => "#".to_string(),
                    })
                    .collect(),
            )
        })
        .collect()
}

pub fn body_lits(b: &ClauseBody) -> Vec<Lit> {
    lits(&b.literals)
}

/// Whether `a` and `b` are the same set of literals under some bijective
/// renaming of variables. Variables satisfying `fixed` must map to themselves.
pub fn alpha_eq(a: &[Lit], b: &[Lit], fixed: &dyn Fn(&str) -> bool) -> bool {
    fn go(
        a: &[Lit],
        b: &[Lit],
        used: &mut Vec<bool>,
        fwd: &mut HashMap<String, String>,
        bwd: &mut HashMap<String, String>,
        fixed: &dyn Fn(&str) -> bool,
    ) -> bool {
        let Some((first, rest)) = a.split_first() else {
            return true;
        };
        for (j, cand) in b.iter().enumerate() {
            if used[j] || cand.0 != first.0 || cand.1.len() != first.1.len() {
                continue;
            }
            let mut added = Vec::new();
            let mut ok = true;
            for (x, y) in first.1.iter().zip(&cand.1) {
                if (x == "#") != (y == "#") {
                    ok = false;
                    break;
                }
                if x == "#" {
                    continue;
                }
                if (fixed(x) || fixed(y)) && x != y {
                    ok = false;
                    break;
                }
                match (fwd.get(x), bwd.get(y)) {
                    (Some(fy), _) if fy != y => ok = false,
                    (_, Some(bx)) if bx != x => ok = false,
                    (None, None) => {
                        fwd.insert(x.clone(), y.clone());
                        bwd.insert(y.clone(), x.clone());
                        added.push((x.clone(), y.clone()));
                    }
                    _ => {}
                }
                if !ok {
                    break;
                }
            }
            if ok {
                used[j] = true;
                if go(rest, b, used, fwd, bwd, fixed) {
                    return true;
                }
                used[j] = false;
            }
            for (x, y) in added {
                fwd.remove(&x);
                bwd.remove(&y);
            }
        }
        false
    }

    let sa: BTreeSet<&Lit> = a.iter().collect();
    let sb: BTreeSet<&Lit> = b.iter().collect();
    if sa.len() != a.len() || sb.len() != b.len() || a.len() != b.len() {
        return false;
    }
    go(
        a,
        b,
        &mut vec![false; b.len()],
        &mut HashMap::new(),
        &mut HashMap::new(),
        fixed,
    )
}

pub fn is_head(v: &str) -> bool {
    v.starts_with('H')
}

/// Legal bodies of each length up to `max_len`, one representative per
/// renaming class. Target variables are `H0, H1, ...`.
///
/// Literal sequences are generated with input arguments ranging over every
/// variable name in scope, then filtered by the binding rules; each distinct
/// literal set is kept unless it is a renaming of one already kept.
pub fn bodies(m: &ModeSet, max_len: usize) -> BTreeMap<usize, Vec<Vec<Lit>>> {
    let head: Vec<(String, String)> = m
        .target_mode()
        .args
        .iter()
        .enumerate()
        .map(|(i, a)| (format!("H{i}"), a.type_name.clone()))
        .collect();

    let mut sequences: Vec<Vec<Lit>> = Vec::new();
    extend(m, &head, &mut Vec::new(), &mut Vec::new(), 0, max_len, &mut sequences);

    let mut out: BTreeMap<usize, Vec<Vec<Lit>>> = (0..=max_len).map(|l| (l, Vec::new())).collect();
    let mut buckets: HashMap<Vec<(String, usize)>, Vec<Vec<Lit>>> = HashMap::new();
    for seq in sequences {
        let set: BTreeSet<&Lit> = seq.iter().collect();
        if set.len() != seq.len() {
            continue;
        }
        let mut shape: Vec<(String, usize)> =
            seq.iter().map(|(p, a)| (p.clone(), a.len())).collect();
        shape.sort();
        let bucket = buckets.entry(shape).or_default();
        if bucket.iter().any(|b| alpha_eq(b, &seq, &is_head)) {
            continue;
        }
        bucket.push(seq.clone());
        out.get_mut(&seq.len()).unwrap().push(seq);
    }
    out
}

fn extend(
    m: &ModeSet,
    head: &[(String, String)],
    seq: &mut Vec<Lit>,
    introduced: &mut Vec<(String, String)>,
    fresh: usize,
    max_len: usize,
    out: &mut Vec<Vec<Lit>>,
) {
    out.push(seq.clone());
    if seq.len() == max_len {
        return;
    }
    // every name that could appear: target variables, introduced ones, and
    // names not yet introduced
    let mut universe: Vec<String> = head.iter().map(|(v, _)| v.clone()).collect();
    universe.extend((0..fresh + 3).map(|i| format!("V{i}")));

    for mode in m.body_modes() {
        let mut choices: Vec<Vec<String>> = Vec::new();
        let mut next_fresh = fresh;
        for a in &mode.args {
            choices.push(match a.direction {
                Direction::Constant => vec!["#".to_string()],
                Direction::Output => {
                    next_fresh += 1;
                    vec![format!("V{}", next_fresh - 1)]
                }
                Direction::Input => universe.clone(),
            });
        }
        for args in product(&choices) {
            let bound_ok = mode.args.iter().zip(&args).all(|(a, v)| {
                a.direction != Direction::Input
                    || head
                        .iter()
                        .chain(introduced.iter())
                        .any(|(name, ty)| name == v && *ty == a.type_name)
            });
            if !bound_ok {
                continue;
            }
            let new_vars: Vec<(String, String)> = mode
                .args
                .iter()
                .zip(&args)
                .filter(|(a, _)| a.direction == Direction::Output)
                .map(|(a, v)| (v.clone(), a.type_name.clone()))
                .collect();
            let n_new = new_vars.len();
            seq.push((mode.predicate.clone(), args));
            introduced.extend(new_vars);
            extend(m, head, seq, introduced, next_fresh, max_len, out);
            introduced.truncate(introduced.len() - n_new);
            seq.pop();
        }
    }
}

fn product(choices: &[Vec<String>]) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = vec![Vec::new()];
    for c in choices {
        out = out
            .into_iter()
            .flat_map(|p| {
                c.iter().map(move |x| {
                    let mut q = p.clone();
                    q.push(x.clone());
                    q
                })
            })
            .collect();
    }
    out
}
