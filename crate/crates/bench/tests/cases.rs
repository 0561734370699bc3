use isingpath::EncodingScheme;
use isingpath_bench::{case, standard_cases};

#[test]
fn cases_are_reproducible() {
    let a = case("small", 2, EncodingScheme::Log);
    let b = case("small", 2, EncodingScheme::Log);
    assert_eq!(a.qubo, b.qubo);
    assert_eq!(a.name, "small-2-log");
}

#[test]
fn standard_cases_grow_with_profile() {
    let cases = standard_cases(EncodingScheme::Unary);
    assert_eq!(cases.len(), 3);
    assert!(cases[0].qubo.num_bits() < cases[2].qubo.num_bits());
}
