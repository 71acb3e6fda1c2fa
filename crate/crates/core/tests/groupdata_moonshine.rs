//! Character data, supertraces, decompositions and McKay–Thompson series
//! against the published expansions and coefficient tables.

use mf_core::groupdata::{
    check_linear_relation, load_fixtures, supertrace, CharacterTable, Decomposition, Group,
    GroupDataError, LinearRelation,
};
use mf_core::moonshine::{
    decomposition_search, int_coeff, mckay_thompson, target_series, verify_fixtures,
    DecompositionSet, SearchOptions, TargetSeriesSpec,
};

fn table(group: Group) -> CharacterTable {
    CharacterTable::load_group(&mf_core::default_data_dir(), group).unwrap()
}

#[test]
fn shipped_tables_round_trip_through_text() {
    for group in [Group::Monster, Group::BabyMonster] {
        let t = table(group);
        let again = CharacterTable::parse(&t.serialize(), group).unwrap();
        assert_eq!(again, t);
    }
}

#[test]
fn shipped_tables_have_expected_shape() {
    let m = table(Group::Monster);
    assert_eq!(m.classes.len(), 194);
    assert_eq!(m.irreps.len(), 15);
    assert_eq!(m.dims()[..3], [1, 196883, 21296876]);
    let b = table(Group::BabyMonster);
    assert_eq!(b.classes.len(), 184);
    assert_eq!(b.irreps.len(), 13);
    assert_eq!(b.dims()[..3], [1, 4371, 96255]);
    assert_eq!(b.value(2, "1A").unwrap(), 4371);
}

#[test]
fn unknown_class_is_reported() {
    let m = table(Group::Monster);
    assert!(matches!(
        m.value(1, "9Z"),
        Err(GroupDataError::UnknownClass(_))
    ));
}

#[test]
fn supertraces_of_the_first_grades() {
    let b = table(Group::BabyMonster);
    let w1: Decomposition = "U2-".parse().unwrap();
    assert_eq!(supertrace(&b, &w1, "1A").unwrap(), -4371);
    let w4: Decomposition = "U6+ U4- U3- 2U1-".parse().unwrap();
    assert_eq!(supertrace(&b, &w4, "1A").unwrap(), 8315004);
    let m = table(Group::Monster);
    let v1: Decomposition = "V2- V1-".parse().unwrap();
    assert_eq!(supertrace(&m, &v1, "1A").unwrap(), -196884);
}

#[test]
fn baby_monster_dimension_relation() {
    // 9550635 − 9458750 − 96255 + 4371 − 1 = 0
    let rel = LinearRelation {
        terms: vec![(1, 6), (-1, 5), (-1, 3), (1, 2), (-1, 1)],
        constant: 0,
    };
    assert!(check_linear_relation(&table(Group::BabyMonster), &rel).unwrap());
}

#[test]
fn decomposition_search_round_trip() {
    let b = table(Group::BabyMonster);
    let dims = b.dims();
    for (target, max_index) in [(-4371i128, 13usize), (8315004, 6), (-52842475, 8)] {
        let found = decomposition_search(target, &dims, &SearchOptions::new(2, max_index)).unwrap();
        assert!(!found.is_empty(), "no decomposition of {target}");
        for d in &found {
            assert_eq!(supertrace(&b, d, "1A").unwrap(), target, "{}", d.render('U'));
            assert!(d.max_index() <= max_index);
            assert!(d.entries.iter().all(|e| e.mult <= 2));
        }
    }
    let first = &decomposition_search(-4371, &dims, &SearchOptions::new(2, 13)).unwrap()[0];
    assert_eq!(first.render('U'), "U2-");
    let published: Decomposition = "U6+ U4- U3- 2U1-".parse().unwrap();
    let found = decomposition_search(8315004, &dims, &SearchOptions::new(2, 6)).unwrap();
    assert!(found.contains(&published));
}

#[test]
fn target_series_match_published_expansions() {
    let f = target_series(&TargetSeriesSpec::thompson(), 8).unwrap();
    for (n, c) in [(-3, 2), (0, 248), (1, 0), (4, 54000), (5, -171990), (8, 3414528)] {
        assert_eq!(int_coeff(&f, n).unwrap_or(0), c, "𝓕 at q^{n}");
    }
    let g = target_series(&TargetSeriesSpec::baby_monster(), 8).unwrap();
    for (n, c) in [(-7, 1), (-3, 1), (0, -2), (1, -4371), (4, 8315004), (5, -52842475), (8, 5736480000)] {
        assert_eq!(int_coeff(&g, n), Some(c), "𝓖 at q^{n}");
    }
    let h = target_series(&TargetSeriesSpec::monster(), 9).unwrap();
    for (n, c) in [
        (-15, 1),
        (-7, 1),
        (-3, 1),
        (0, -2),
        (1, -196884),
        (4, 18517256316),
        (5, -292711124971),
        (8, 312217411718400),
        (9, -2374124840259859),
    ] {
        assert_eq!(int_coeff(&h, n), Some(c), "𝓗 at q^{n}");
    }
}

#[test]
fn identity_class_reproduces_the_target() {
    for group in [Group::Monster, Group::BabyMonster] {
        let spec = TargetSeriesSpec::for_group(group);
        let depth = spec.fixture_depth();
        let mt = mckay_thompson(&table(group), &DecompositionSet::paper(group), &spec, "1A", depth)
            .unwrap();
        assert_eq!(mt.to_qseries(), target_series(&spec, depth).unwrap());
    }
}

#[test]
fn tabulated_coefficients_are_reproduced() {
    let fixtures = load_fixtures(&mf_core::default_data_dir().join("appendix_b.csv")).unwrap();
    for (group, classes) in [(Group::BabyMonster, 184), (Group::Monster, 194)] {
        let report = verify_fixtures(
            &table(group),
            &DecompositionSet::paper(group),
            &TargetSeriesSpec::for_group(group),
            &fixtures,
        );
        assert!(report.is_clean(), "{:?}", report.mismatches);
        assert_eq!(report.classes, classes);
    }
}

#[test]
fn wrong_decomposition_is_caught() {
    let fixtures = load_fixtures(&mf_core::default_data_dir().join("appendix_b.csv")).unwrap();
    let mut decs = DecompositionSet::paper(Group::BabyMonster);
    // Shift W_4 by the zero-dimensional relation: 1A is unchanged, other
    // classes are not.
    decs.grades
        .insert(4, "U5+ U4- U2- U1-".parse().unwrap());
    let report = verify_fixtures(
        &table(Group::BabyMonster),
        &decs,
        &TargetSeriesSpec::baby_monster(),
        &fixtures,
    );
    assert!(!report.is_clean());
    assert!(report.mismatches.iter().all(|m| m.class != "1A"));
}
