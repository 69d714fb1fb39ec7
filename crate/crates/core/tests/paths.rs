use std::collections::{BTreeMap, HashSet};

use ermodes::er::{ERDiagram, FeatureRef};
use ermodes::fixtures;
use ermodes::paths::{find_paths, random_paths, Strategy, WalkConfig};
use ermodes_testkit::check::steps;
use ermodes_testkit::{cases, gen, oracle};
use proptest::prelude::*;

fn goals(d: &ERDiagram) -> (FeatureRef, Vec<FeatureRef>) {
    let ann = d.annotation().unwrap();
    (ann.target.clone(), ann.important.clone())
}

fn tenure() -> FeatureRef {
    FeatureRef::attribute("Professor", "Tenure")
}

fn grade() -> FeatureRef {
    FeatureRef::attribute("Takes", "Grade")
}

#[test]
fn university_all_paths_match_oracle() {
    let d = fixtures::university();
    for depth in 1..=4 {
        let found = find_paths(&d, &tenure(), &grade(), &WalkConfig::new(Strategy::All, depth)).unwrap();
        assert_eq!(steps(&found.paths), oracle::all_paths(&d, &tenure(), &grade(), depth));
    }
}

#[test]
fn university_equidistant_paths() {
    let d = fixtures::university();
    let all = find_paths(&d, &tenure(), &grade(), &WalkConfig::new(Strategy::ShortestAll, 4)).unwrap();
    let rendered: Vec<String> = all.paths.iter().map(ToString::to_string).collect();
    assert_eq!(
        rendered,
        [
            "Professor -[Advises]-> Student -[Takes] => Takes.Grade",
            "Professor -[Teaches]-> Course -[Takes] => Takes.Grade",
        ]
    );
    let one = find_paths(&d, &tenure(), &grade(), &WalkConfig::new(Strategy::Shortest, 4)).unwrap();
    assert_eq!(one.paths.len(), 1);
    assert!(all.paths.contains(&one.paths[0]));
}

#[test]
fn seeded_walks_on_fixture() {
    let d = fixtures::university();
    let cfg = WalkConfig::random(3, 42, 5);
    let walks = random_paths(&d, &tenure(), &cfg).unwrap();
    assert_eq!(walks.len(), 5);
    for w in &walks {
        w.check(&d).unwrap();
        assert!(w.len() <= 3);
    }
    assert_eq!(random_paths(&d, &tenure(), &cfg).unwrap(), walks);

    let short = random_paths(&d, &tenure(), &WalkConfig::random(1, 7, 50)).unwrap();
    assert!(short.iter().all(|w| w.len() <= 1));
}

#[test]
fn walk_frequencies_are_uniform() {
    // From Professor the incident choices are Advises and Teaches, so each
    // count is Binomial(10000, 1/2) with standard deviation 50.
    let d = fixtures::university();
    let n = 10_000;
    let walks = random_paths(&d, &tenure(), &WalkConfig::random(1, 2024, n)).unwrap();
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for w in &walks {
        *counts.entry(w.hops[0].relationship.clone()).or_default() += 1;
    }
    let incident: Vec<&str> = d
        .relationships()
        .iter()
        .filter(|r| r.participants.iter().any(|p| p == "Professor"))
        .map(|r| r.name.as_str())
        .collect();
    assert_eq!(counts.keys().map(String::as_str).collect::<Vec<_>>(), incident);
    let p = 1.0 / incident.len() as f64;
    let mean = n as f64 * p;
    let sigma = (n as f64 * p * (1.0 - p)).sqrt();
    for (r, c) in &counts {
        assert!(
            (*c as f64 - mean).abs() <= 3.0 * sigma,
            "{r}: {c} walks, expected {mean} +/- {}",
            3.0 * sigma
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150.max(cases())))]

    #[test]
    fn all_strategy_is_complete(seed in any::<u64>(), depth in 1usize..=4) {
        let d = gen::diagram(seed);
        let (target, important) = goals(&d);
        for goal in &important {
            let found = find_paths(&d, &target, goal, &WalkConfig::new(Strategy::All, depth)).unwrap();
            prop_assert_eq!(steps(&found.paths), oracle::all_paths(&d, &target, goal, depth));
            prop_assert_eq!(found.unreachable.is_some(), found.paths.is_empty());
        }
    }

    #[test]
    fn returned_paths_are_sound(seed in any::<u64>(), depth in 1usize..=4) {
        let d = gen::diagram(seed);
        let (target, important) = goals(&d);
        for strategy in [Strategy::Shortest, Strategy::ShortestAll, Strategy::All] {
            for goal in &important {
                let found = find_paths(&d, &target, goal, &WalkConfig::new(strategy, depth)).unwrap();
                let mut seen = HashSet::new();
                for p in &found.paths {
                    prop_assert!(p.check(&d).is_ok());
                    prop_assert!(p.len() <= depth);
                    prop_assert_eq!(&p.endpoint, goal);
                    prop_assert!(seen.insert(p.steps().join("/")), "duplicate path {}", p);
                }
            }
        }
    }

    #[test]
    fn shortest_all_is_minimal(seed in any::<u64>(), depth in 1usize..=4) {
        let d = gen::diagram(seed);
        let (target, important) = goals(&d);
        for goal in &important {
            let every = oracle::all_paths(&d, &target, goal, depth);
            let all = find_paths(&d, &target, goal, &WalkConfig::new(Strategy::ShortestAll, depth)).unwrap();
            let one = find_paths(&d, &target, goal, &WalkConfig::new(Strategy::Shortest, depth)).unwrap();
            match every.iter().map(Vec::len).min() {
                None => {
                    prop_assert!(all.paths.is_empty());
                    prop_assert!(one.paths.is_empty());
                }
                Some(min) => {
                    let expected: Vec<Vec<String>> =
                        every.iter().filter(|s| s.len() == min).cloned().collect();
                    prop_assert_eq!(steps(&all.paths), expected);
                    prop_assert_eq!(one.paths.len(), 1);
                    prop_assert!(all.paths.contains(&one.paths[0]));
                }
            }
        }
    }

    #[test]
    fn random_walks_are_valid_and_seeded(seed in any::<u64>(), walk_seed in any::<u64>(), depth in 1usize..=4) {
        let d = gen::diagram(seed);
        let (target, _) = goals(&d);
        let cfg = WalkConfig::random(depth, walk_seed, 8);
        let walks = random_paths(&d, &target, &cfg).unwrap();
        prop_assert_eq!(walks.len(), 8);
        for w in &walks {
            prop_assert!(w.check(&d).is_ok());
            prop_assert!(w.len() <= depth);
        }
        prop_assert_eq!(random_paths(&d, &target, &cfg).unwrap(), walks);
    }
}
