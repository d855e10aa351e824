mod common;

macro_rules! suite {
    ($($name:ident),* $(,)?) => {
        $(
            #[test]
            fn $name() {
                let (label, check, cases) = common::SUITES
                    .iter()
                    .find(|(_, f, _)| *f as *const () == common::$name as *const ())
                    .expect("registered suite");
                if let Err(e) = check(*cases) {
                    panic!("{label}: {e}");
                }
            }
        )*
    };
}

suite!(
    determinant_oracle,
    rank_nullity,
    row_space_invariance,
    stellar_properties,
    extension_properties,
    projective_and_barycentric,
    certificate_reverification,
    sym_power_independence,
    hyperplane_transversality,
    closure_of_closure,
    cotangent_coincidences,
    kapranov_counts,
    cubic_pencil_oracle,
    presentation_homogeneity,
    tangent_kernel_round_trip,
    classifier_antitone,
    threshold_identity,
    multiplicity_matches_oracle,
    orbit_class_additivity,
    cremona_involution,
    phi_star_isomorphism,
    depth_monotone,
    report_determinism,
    io_round_trip,
);

#[test]
fn every_suite_has_a_test() {
    assert_eq!(common::SUITES.len(), 24);
}
