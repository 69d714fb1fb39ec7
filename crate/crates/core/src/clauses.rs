//! Mode-constrained clause bodies.
//!
//! A body is legal under a [`ModeSet`] when its literals can be ordered so
//! that every literal instantiates some body mode with each `+` argument
//! bound earlier (by the target or by a previous literal's `-` argument),
//! each `-` argument a fresh variable and each `#` argument a constant.
//! Bodies are sets of literals compared up to renaming of the variables they
//! introduce; the target's variables are fixed. Variables in a body are
//! untyped, so a body counts once however many mode assignments make it legal.
//!
//! The number of distinct legal bodies up to a length is used as a proxy for
//! the size of the hypothesis space a mode set admits.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::er::ERDiagram;
use crate::modes::{self, ArgMode, Direction, ModeError, ModeSet, ModeSpec};

/// Default enumeration cap.
pub const DEFAULT_CAP: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClauseError {
    #[error("no body mode for predicate {0}")]
    UnknownPredicate(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    /// Placeholder for a `#` argument.
    Const,
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const => f.write_str("#"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClauseLiteral {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl ClauseLiteral {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Self {
            predicate: predicate.into(),
            args,
        }
    }
}

impl fmt::Display for ClauseLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, t) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

/// An enumerated body. Target variables are named `H0, H1, ...` in target
/// argument order; introduced variables `V0, V1, ...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClauseBody {
    pub literals: Vec<ClauseLiteral>,
}

impl fmt::Display for ClauseBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.literals.is_empty() {
            return f.write_str("true");
        }
        for (i, l) in self.literals.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClauseSpaceReport {
    /// Body length to number of distinct legal bodies of that length.
    pub counts_by_length: BTreeMap<usize, u64>,
    pub total: u64,
    pub truncated: bool,
}

impl ClauseSpaceReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Plain-text table for terminals.
    pub fn to_table(&self) -> String {
        let mut out = String::from("length  bodies\n");
        for (len, n) in &self.counts_by_length {
            out.push_str(&format!("{len:>6}  {n}\n"));
        }
        out.push_str(&format!(" total  {}", self.total));
        if self.truncated {
            out.push_str(" (truncated at cap)");
        }
        out.push('\n');
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseSpace {
    /// Bodies by increasing length; deterministic order within a length.
    pub bodies: Vec<ClauseBody>,
    pub report: ClauseSpaceReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum CTerm {
    Const,
    Head(u16),
    Var(u16),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct CLit {
    sig: u32,
    args: Vec<CTerm>,
}

/// Literal shape shared by every mode with the same predicate, argument
/// types and constant positions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Signature {
    predicate: String,
    types: Vec<u16>,
    constant: Vec<bool>,
}

struct CompiledMode {
    sig: u32,
    args: Vec<(Direction, u16)>,
}

struct Compiled {
    sigs: Vec<Signature>,
    /// Predicate and constant positions: what a literal looks like in a clause.
    shapes: Vec<(String, Vec<bool>)>,
    shape_of: Vec<u32>,
    head: Vec<u16>,
    modes: Vec<CompiledMode>,
}

impl Compiled {
    fn new(m: &ModeSet) -> Self {
        let all = std::iter::once(m.target_mode()).chain(m.body_modes());
        let type_names: Vec<String> = all
            .flat_map(|s| s.args.iter().map(|a| a.type_name.clone()))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let tid = |name: &str| type_names.binary_search_by(|t| t.as_str().cmp(name)).unwrap() as u16;
        let sig_of = |s: &ModeSpec| Signature {
            predicate: s.predicate.clone(),
            types: s.args.iter().map(|a| tid(&a.type_name)).collect(),
            constant: s.args.iter().map(|a| a.direction == Direction::Constant).collect(),
        };
        let sigs: Vec<Signature> = m
            .body_modes()
            .iter()
            .map(sig_of)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let modes = m
            .body_modes()
            .iter()
            .map(|s| CompiledMode {
                sig: sigs.binary_search(&sig_of(s)).unwrap() as u32,
                args: s.args.iter().map(|a| (a.direction, tid(&a.type_name))).collect(),
            })
            .collect();
        let head = m.target_mode().args.iter().map(|a| tid(&a.type_name)).collect();
        let shapes: Vec<(String, Vec<bool>)> = sigs
            .iter()
            .map(|s| (s.predicate.clone(), s.constant.clone()))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let shape_of = sigs
            .iter()
            .map(|s| {
                shapes
                    .binary_search(&(s.predicate.clone(), s.constant.clone()))
                    .unwrap() as u32
            })
            .collect();
        Self {
            sigs,
            shapes,
            shape_of,
            head,
            modes,
        }
    }

    fn var_types(&self, body: &[CLit]) -> Vec<u16> {
        let mut out: Vec<u16> = Vec::new();
        for l in body {
            for (pos, t) in l.args.iter().enumerate() {
                if let CTerm::Var(v) = *t {
                    let v = v as usize;
                    if out.len() <= v {
                        out.resize(v + 1, 0);
                    }
                    out[v] = self.sigs[l.sig as usize].types[pos];
                }
            }
        }
        out
    }

    /// Every literal whose inputs are bound in a body with `var_types`.
    fn extensions(&self, var_types: &[u16]) -> Vec<CLit> {
        let fresh_base = var_types.len() as u16;
        let mut out = Vec::new();
        for mode in &self.modes {
            let mut choices: Vec<Vec<CTerm>> = Vec::with_capacity(mode.args.len());
            let mut fresh = fresh_base;
            for &(dir, ty) in &mode.args {
                let c = match dir {
                    Direction::Constant => vec![CTerm::Const],
                    Direction::Output => {
                        fresh += 1;
                        vec![CTerm::Var(fresh - 1)]
                    }
                    Direction::Input => {
                        let mut c: Vec<CTerm> = self
                            .head
                            .iter()
                            .enumerate()
                            .filter(|(_, &t)| t == ty)
                            .map(|(i, _)| CTerm::Head(i as u16))
                            .collect();
                        c.extend(
                            var_types
                                .iter()
                                .enumerate()
                                .filter(|(_, &t)| t == ty)
                                .map(|(i, _)| CTerm::Var(i as u16)),
                        );
                        c
                    }
                };
                choices.push(c);
            }
            for args in cartesian(&choices) {
                out.push(CLit {
                    sig: mode.sig,
                    args,
                });
            }
        }
        out
    }

    /// `body` with each literal's signature replaced by its shape.
    fn untyped(&self, body: &[CLit]) -> Vec<CLit> {
        body.iter()
            .map(|l| CLit {
                sig: self.shape_of[l.sig as usize],
                args: l.args.clone(),
            })
            .collect()
    }

    /// Renders a body of shapes (see [`Compiled::untyped`]).
    fn to_body(&self, lits: &[CLit]) -> ClauseBody {
        ClauseBody {
            literals: lits
                .iter()
                .map(|l| {
                    ClauseLiteral::new(
                        self.shapes[l.sig as usize].0.clone(),
                        l.args
                            .iter()
                            .map(|t| match t {
                                CTerm::Const => Term::Const,
                                CTerm::Head(i) => Term::Var(format!("H{i}")),
                                CTerm::Var(i) => Term::Var(format!("V{i}")),
                            })
                            .collect(),
                    )
                })
                .collect(),
        }
    }
}

fn cartesian(choices: &[Vec<CTerm>]) -> Vec<Vec<CTerm>> {
    let mut out = vec![Vec::with_capacity(choices.len())];
    for c in choices {
        let mut next = Vec::with_capacity(out.len() * c.len());
        for prefix in &out {
            for t in c {
                let mut p = prefix.clone();
                p.push(*t);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Canonical representative of a body under literal reordering and renaming
/// of introduced variables: the lexicographically least literal sequence,
/// over all orderings, with variables numbered by first appearance.
fn canonicalize(lits: &[CLit]) -> Vec<CLit> {
    let nvars = lits
        .iter()
        .flat_map(|l| l.args.iter())
        .filter_map(|t| match t {
            CTerm::Var(v) => Some(*v as usize + 1),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    let mut st = Canon {
        lits,
        used: vec![false; lits.len()],
        map: vec![None; nvars],
        next: 0,
        prefix: Vec::with_capacity(lits.len()),
        best: None,
    };
    st.search();
    st.best.unwrap_or_default()
}

struct Canon<'a> {
    lits: &'a [CLit],
    used: Vec<bool>,
    map: Vec<Option<u16>>,
    next: u16,
    prefix: Vec<CLit>,
    best: Option<Vec<CLit>>,
}

impl Canon<'_> {
    fn renamed(&self, l: &CLit) -> CLit {
        let mut next = self.next;
        let mut local: Vec<(u16, u16)> = Vec::new();
        let args = l
            .args
            .iter()
            .map(|t| match *t {
                CTerm::Var(v) => {
                    if let Some(m) = self.map[v as usize] {
                        CTerm::Var(m)
                    } else if let Some(&(_, m)) = local.iter().find(|(o, _)| *o == v) {
                        CTerm::Var(m)
                    } else {
                        local.push((v, next));
                        next += 1;
                        CTerm::Var(next - 1)
                    }
                }
                other => other,
            })
            .collect();
        CLit { sig: l.sig, args }
    }

    fn search(&mut self) {
        let k = self.prefix.len();
        if k == self.lits.len() {
            if self.best.as_ref().is_none_or(|b| self.prefix < *b) {
                self.best = Some(self.prefix.clone());
            }
            return;
        }
        let candidates: Vec<(usize, CLit)> = (0..self.lits.len())
            .filter(|&i| !self.used[i])
            .map(|i| (i, self.renamed(&self.lits[i])))
            .collect();
        let min = candidates.iter().map(|(_, c)| c).min().unwrap().clone();
        if let Some(best) = &self.best {
            let mut p = self.prefix.clone();
            p.push(min.clone());
            if p.as_slice() > &best[..=k] {
                return;
            }
        }
        for (i, c) in candidates {
            if c != min {
                continue;
            }
            let saved_next = self.next;
            let mut assigned = Vec::new();
            for t in &self.lits[i].args {
                if let CTerm::Var(v) = *t {
                    if self.map[v as usize].is_none() {
                        self.map[v as usize] = Some(self.next);
                        self.next += 1;
                        assigned.push(v);
                    }
                }
            }
            self.used[i] = true;
            self.prefix.push(c);
            self.search();
            self.prefix.pop();
            self.used[i] = false;
            for v in assigned {
                self.map[v as usize] = None;
            }
            self.next = saved_next;
        }
    }
}

fn run(
    m: &ModeSet,
    max_len: usize,
    cap: u64,
    mut visit: impl FnMut(&Compiled, &[CLit]),
) -> ClauseSpaceReport {
    let c = Compiled::new(m);
    let mut counts: BTreeMap<usize, u64> = (0..=max_len).map(|l| (l, 0)).collect();
    let mut total = 0u64;
    let mut truncated = false;

    // Expansion works on typed bodies; counting on their untyped shapes, since
    // one clause may be legal under several typings.
    let mut level: BTreeSet<Vec<CLit>> = BTreeSet::new();
    if cap == 0 {
        truncated = true;
    } else {
        level.insert(Vec::new());
        visit(&c, &[]);
        total = 1;
        counts.insert(0, 1);
    }

    'outer: for len in 1..=max_len {
        let mut next: BTreeSet<Vec<CLit>> = BTreeSet::new();
        let mut found: BTreeSet<Vec<CLit>> = BTreeSet::new();
        for body in &level {
            let var_types = c.var_types(body);
            for lit in c.extensions(&var_types) {
                let mut extended = body.clone();
                extended.push(lit);
                let untyped = c.untyped(&extended);
                if untyped[..untyped.len() - 1].contains(&untyped[untyped.len() - 1]) {
                    continue;
                }
                let canon = canonicalize(&extended);
                let shape = canonicalize(&c.untyped(&canon));
                if !next.insert(canon) || found.contains(&shape) {
                    continue;
                }
                if total == cap {
                    truncated = true;
                    for body in &found {
                        visit(&c, body);
                    }
                    break 'outer;
                }
                total += 1;
                *counts.get_mut(&len).unwrap() += 1;
                found.insert(shape);
            }
        }
        for body in &found {
            visit(&c, body);
        }
        if next.is_empty() {
            break;
        }
        level = next;
    }
    ClauseSpaceReport {
        counts_by_length: counts,
        total,
        truncated,
    }
}

/// Counts distinct legal bodies of each length up to `max_len`, stopping
/// once `cap` bodies (the empty body included) have been found.
pub fn clause_space_report(m: &ModeSet, max_len: usize, cap: u64) -> ClauseSpaceReport {
    run(m, max_len, cap, |_, _| {})
}

/// Like [`clause_space_report`] but also returns the bodies themselves.
pub fn enumerate_clauses(m: &ModeSet, max_len: usize, cap: u64) -> ClauseSpace {
    let mut bodies = Vec::new();
    let report = run(m, max_len, cap, |c, lits| bodies.push(c.to_body(lits)));
    ClauseSpace { bodies, report }
}

/// Whether `body` is a legal body under `m`, up to renaming.
///
/// Which variables are the target's is inferred: the body is accepted when
/// some injective, type-respecting assignment of its otherwise unbound
/// variables to target arguments makes it legal.
pub fn contains_clause(m: &ModeSet, body: &[ClauseLiteral]) -> Result<bool, ClauseError> {
    for l in body {
        if !m.body_modes().iter().any(|s| s.predicate == l.predicate) {
            return Err(ClauseError::UnknownPredicate(l.predicate.clone()));
        }
    }
    let distinct: BTreeSet<&ClauseLiteral> = body.iter().collect();
    if distinct.len() != body.len() {
        return Ok(false);
    }
    let candidates: Vec<Vec<&ModeSpec>> = body
        .iter()
        .map(|l| {
            m.body_modes()
                .iter()
                .filter(|s| {
                    s.predicate == l.predicate
                        && s.arity() == l.args.len()
                        && s.args.iter().zip(&l.args).all(|(a, t)| {
                            (a.direction == Direction::Constant) == (*t == Term::Const)
                        })
                })
                .collect()
        })
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        return Ok(false);
    }
    let mut choice = vec![0usize; body.len()];
    loop {
        let modes: Vec<&ModeSpec> = choice.iter().zip(&candidates).map(|(&i, c)| c[i]).collect();
        if binding_ok(m.target_mode(), body, &modes) {
            return Ok(true);
        }
        // odometer over mode choices
        let mut k = 0;
        loop {
            if k == choice.len() {
                return Ok(false);
            }
            choice[k] += 1;
            if choice[k] < candidates[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Direct check of the binding rules for one assignment of modes to literals.
fn binding_ok(target: &ModeSpec, body: &[ClauseLiteral], modes: &[&ModeSpec]) -> bool {
    struct VarInfo<'a> {
        ty: &'a str,
        introduced_by: Vec<usize>,
        used_by: Vec<usize>,
    }
    let mut vars: BTreeMap<&str, VarInfo> = BTreeMap::new();
    for (li, (lit, mode)) in body.iter().zip(modes).enumerate() {
        for (t, a) in lit.args.iter().zip(&mode.args) {
            let Term::Var(name) = t else { continue };
            let info = vars.entry(name).or_insert(VarInfo {
                ty: &a.type_name,
                introduced_by: Vec::new(),
                used_by: Vec::new(),
            });
            if info.ty != a.type_name {
                return false;
            }
            match a.direction {
                Direction::Output => info.introduced_by.push(li),
                Direction::Input => info.used_by.push(li),
                Direction::Constant => unreachable!("constant positions hold constants"),
            }
        }
    }

    // literal -> literals it must follow
    let mut after: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); body.len()];
    let mut from_head: Vec<&str> = Vec::new();
    for (name, info) in &vars {
        match info.introduced_by.as_slice() {
            [] => from_head.push(info.ty),
            [intro] => {
                for &u in &info.used_by {
                    if u == *intro {
                        return false;
                    }
                    after[u].insert(*intro);
                }
            }
            _ => return false,
        }
        let _ = name;
    }

    if !assign_head(&from_head, &target.args, &mut vec![false; target.args.len()]) {
        return false;
    }

    // Kahn: acyclic iff every literal can be scheduled
    let mut indegree: Vec<usize> = after.iter().map(BTreeSet::len).collect();
    let mut ready: Vec<usize> = (0..body.len()).filter(|&i| indegree[i] == 0).collect();
    let mut done = 0;
    while let Some(i) = ready.pop() {
        done += 1;
        for (j, deps) in after.iter().enumerate() {
            if deps.contains(&i) {
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    ready.push(j);
                }
            }
        }
    }
    done == body.len()
}

fn assign_head(types: &[&str], head: &[ArgMode], taken: &mut Vec<bool>) -> bool {
    let Some((first, rest)) = types.split_first() else {
        return true;
    };
    for (i, a) in head.iter().enumerate() {
        if !taken[i] && a.type_name == *first {
            taken[i] = true;
            if assign_head(rest, head, taken) {
                return true;
            }
            taken[i] = false;
        }
    }
    false
}

/// Naive baseline mode set: for every relationship, one mode per entity
/// position with that position `+` and the rest `-`, plus one all-`-` mode;
/// attribute positions `#`; plus every entity attribute's mode.
pub fn exhaustive_modes(d: &ERDiagram) -> Result<ModeSet, ModeError> {
    let ann = d.annotation().ok_or(ModeError::MissingAnnotation)?;
    let target = modes::target_mode(d, &ann.target)?;
    let mut body = BTreeSet::new();
    for r in d.relationships() {
        let attrs = || r.attributes.iter().map(|a| ArgMode::constant(modes::ident(&a.name)));
        for i in 0..=r.participants.len() {
            let args = r
                .participants
                .iter()
                .enumerate()
                .map(|(j, p)| {
                    if i == j {
                        ArgMode::input(modes::ident(p))
                    } else {
                        ArgMode::output(modes::ident(p))
                    }
                })
                .chain(attrs())
                .collect();
            body.insert(ModeSpec::new(modes::ident(&r.name), args));
        }
    }
    for e in d.entities() {
        for a in &e.attributes {
            body.insert(modes::entity_attribute_mode(e, a));
        }
    }
    ModeSet::new(target, body)
}
