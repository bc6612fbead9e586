mod common;

use std::fs;

use suspension_adg::fixtures::{fixture_text, gen_random, FixtureName, RandomParams};
use suspension_adg::{check_suspension, parse_automaton, serialize_automaton, Format};

#[test]
fn shipped_fixtures_match_the_generators() {
    for name in FixtureName::ALL {
        let path = common::fixtures_dir().join(name.file_name());
        let shipped =
            fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(shipped, fixture_text(name), "{name}");
        assert_eq!(fixture_text(name), fixture_text(name));
    }
}

#[test]
fn shipped_fixtures_are_suspension_automata() {
    for (name, _) in common::fixture_automata() {
        let text = fs::read_to_string(common::fixtures_dir().join(name.file_name())).unwrap();
        assert!(
            check_suspension(parse_automaton(&text).unwrap()).is_ok(),
            "{name}"
        );
    }
}

#[test]
fn nontransitive_fixture_is_generated() {
    let p = RandomParams {
        states: 5,
        inputs: 1,
        outputs: 2,
        density: 0.5,
        seed: 0,
    };
    let shipped = fs::read_to_string(common::fixtures_dir().join("nontransitive.sa")).unwrap();
    assert_eq!(
        shipped,
        serialize_automaton(&gen_random(&p).unwrap(), Format::Sa)
    );
}
