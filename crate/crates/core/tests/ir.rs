use std::path::PathBuf;

use ermodes::er::{parse_ir, serialize_ir};
use ermodes::fixtures;
use ermodes_testkit::{cases, gen};
use proptest::prelude::*;

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

#[test]
fn university_canonical_form_is_frozen() {
    let out = serialize_ir(&fixtures::university());
    let path = golden("university.erd.json");
    if std::env::var_os("BLESS").is_some() {
        std::fs::write(&path, &out).unwrap();
    }
    assert_eq!(out, std::fs::read_to_string(path).unwrap());
}

#[test]
fn fixtures_round_trip() {
    for (name, text) in fixtures::ALL {
        let d = parse_ir(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(d.validate().is_empty(), "{name}");
        let out = serialize_ir(&d);
        assert_eq!(parse_ir(&out).unwrap(), d, "{name}");
        assert_eq!(serialize_ir(&parse_ir(&out).unwrap()), out, "{name}");
    }
}

#[test]
fn fixture_bytes_ignore_declaration_order() {
    for (name, text) in fixtures::ALL {
        let d = parse_ir(text).unwrap();
        let expected = serialize_ir(&d);
        for seed in 0..10 {
            let shuffled = gen::shuffled_ir(&d, seed);
            assert_eq!(serialize_ir(&parse_ir(&shuffled).unwrap()), expected, "{name} seed {seed}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200.max(cases())))]

    #[test]
    fn generated_diagrams_are_valid(seed in any::<u64>()) {
        let d = gen::diagram(seed);
        prop_assert_eq!(d.validate(), vec![]);
    }

    #[test]
    fn round_trip(seed in any::<u64>()) {
        let d = gen::diagram(seed);
        let text = serialize_ir(&d);
        let back = parse_ir(&text).unwrap();
        prop_assert!(back.validate().is_empty());
        prop_assert_eq!(&back, &d);
        prop_assert_eq!(serialize_ir(&back), text);
    }

    #[test]
    fn bytes_depend_only_on_structure(seed in any::<u64>(), shuffle in any::<u64>()) {
        let d = gen::diagram(seed);
        let shuffled = parse_ir(&gen::shuffled_ir(&d, shuffle)).unwrap();
        prop_assert_eq!(serialize_ir(&shuffled), serialize_ir(&d));
    }
}
