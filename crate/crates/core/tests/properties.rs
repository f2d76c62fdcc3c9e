mod props;

macro_rules! suites {
    ($($name:ident),*) => {$(
        #[test]
        fn $name() {
            props::$name().unwrap();
        }
    )*};
}

suites!(
    determinant_index_identity,
    genus_symbol_is_additive,
    negation_twists_odd_signs,
    reflections_are_involutive_isometries,
    reflections_conjugate,
    short_vectors_match_naive_search,
    dual_and_rescale_identities
);
