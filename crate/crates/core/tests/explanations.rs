mod common;

use proptest::prelude::*;

use ridex::explanations::{
    compute_value, enumerate_descriptors, read_scenarios, render, write_scenarios, Anchor,
    Descriptor, CO2_INDEX, DESCRIPTOR_COUNT,
};

const GOLDEN: &str = include_str!("data/worked_scenario.golden");

#[test]
fn worked_scenario_matches_golden_table() {
    let s = common::worked_scenario();
    let rendered: Vec<String> = enumerate_descriptors()
        .into_iter()
        .map(|d| {
            let e = render(d, &s).unwrap();
            format!(
                "{}\t{}\t{}",
                e.index,
                if e.favorable() { "+" } else { "-" },
                e.text
            )
        })
        .collect();
    let golden: Vec<&str> = GOLDEN.lines().collect();
    assert_eq!(rendered.len(), golden.len());
    for (got, want) in rendered.iter().zip(golden) {
        assert_eq!(got, want);
    }
}

#[test]
fn taxonomy_is_complete_and_indexed() {
    let all = enumerate_descriptors();
    assert_eq!(all.len(), DESCRIPTOR_COUNT);
    for (i, d) in all.iter().enumerate() {
        assert_eq!(d.index(), i);
        assert_eq!(Descriptor::from_index(i), Some(*d));
    }
    assert_eq!(all[CO2_INDEX], Descriptor::Co2);
    assert_eq!(Descriptor::from_index(DESCRIPTOR_COUNT), None);
    let twins = all
        .iter()
        .flat_map(|a| all.iter().map(move |b| (a, b)))
        .filter(|(a, b)| a.anchor_twin_of(**b))
        .count();
    // Eight information-visualization pairs, counted in both directions.
    assert_eq!(twins, 16);
}

#[test]
fn anchor_twins_share_their_magnitude() {
    let s = common::worked_scenario();
    for d in enumerate_descriptors() {
        if let Descriptor::Comparative {
            anchor: Anchor::SharedPerspective,
            ..
        } = d
        {
            let twin = Descriptor::from_index(d.index() + 1).unwrap();
            assert!(d.anchor_twin_of(twin));
            let (a, b) = (
                compute_value(d, &s).unwrap(),
                compute_value(twin, &s).unwrap(),
            );
            assert_eq!(a.signum(), b.signum());
        }
    }
}

proptest! {
    #[test]
    fn polarity_follows_sign(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let s = common::random_scenario(&mut r, 0);
        for d in enumerate_descriptors() {
            if let Ok(e) = render(d, &s) {
                prop_assert_eq!(e.favorable(), e.value >= 0.0);
                let placeholder = "{value}";
                prop_assert!(!e.text.contains(placeholder));
                prop_assert!(!e.text.contains('-'));
                prop_assert_eq!(e.text.contains("only"), !e.favorable() && d != Descriptor::Co2);
            }
        }
    }

    #[test]
    fn scenario_csv_round_trip(seed in any::<u64>(), n in 1usize..20) {
        let mut r = common::rng(seed);
        let scenarios: Vec<_> = (0..n as u64).map(|i| common::random_scenario(&mut r, i)).collect();
        let mut buf = Vec::new();
        write_scenarios(&scenarios, &mut buf).unwrap();
        prop_assert_eq!(read_scenarios(buf.as_slice()).unwrap(), scenarios);
    }
}
