use initial_integrals::dyadic::{step_from_ints, DyadicStep};
use initial_integrals::gen::{arb_scalar, arb_step};
use initial_integrals::measures::{FiniteMeasureSpace, SimpleFn};
use initial_integrals::scalar::{ComplexRational, Exponent, Rational};
use initial_integrals::suite::verify_all;
use initial_integrals::universal::{apply_universal, compile_theta, AlgebraTarget, MorphismTable};
use initial_integrals::instances::mean_target;
use proptest::prelude::*;

fn roundtrip<T: serde::Serialize + serde::de::DeserializeOwned>(value: &T) -> T {
    serde_json::from_str(&serde_json::to_string(value).unwrap()).unwrap()
}

proptest! {
    #[test]
    fn step_json_roundtrip(f in arb_step::<Rational>(6)) {
        prop_assert_eq!(roundtrip(&f), f);
    }

    #[test]
    fn complex_step_json_roundtrip(f in arb_step::<ComplexRational>(5)) {
        prop_assert_eq!(roundtrip(&f), f);
    }

    #[test]
    fn split_inverts_juxtapose(f in arb_step::<Rational>(5), g in arb_step::<Rational>(5)) {
        let (l, r) = DyadicStep::juxtapose(&f, &g).unwrap().split();
        prop_assert_eq!(l, f);
        prop_assert_eq!(r, g);
    }

    #[test]
    fn theta_is_linear(f in arb_step::<Rational>(5), g in arb_step::<Rational>(5), c in arb_scalar::<Rational>()) {
        let table = compile_theta(&mean_target::<Rational>(), 5).unwrap();
        let lhs = apply_universal(&table, &f.scale(&c).add(&g)).unwrap();
        let tf = apply_universal(&table, &f).unwrap();
        let tg = apply_universal(&table, &g).unwrap();
        prop_assert_eq!(lhs[0].clone(), c * tf[0].clone() + tg[0].clone());
    }
}

#[test]
fn table_and_target_roundtrip() {
    let target = mean_target::<Rational>();
    let back: AlgebraTarget<Rational> = roundtrip(&target);
    let table = compile_theta(&back, 4).unwrap();
    let table_back: MorphismTable<Rational> = roundtrip(&table);
    let f = step_from_ints(&[1, 0, 2, 5]);
    assert_eq!(apply_universal(&table_back, &f).unwrap(), vec![Rational::new(2, 1)]);
}

#[test]
fn exponent_spelling() {
    let inf: Exponent = serde_json::from_str("\"inf\"").unwrap();
    assert_eq!(inf, Exponent::Infinite);
    let p: Exponent = serde_json::from_str("\"3/2\"").unwrap();
    assert_eq!(roundtrip(&p), p);
}

#[test]
fn measure_json_roundtrip() {
    let x: FiniteMeasureSpace = serde_json::from_str(r#"{"points":["a","b","c"],"weights":{"a":"1/2","b":"0","c":"1/3"}}"#).unwrap();
    assert_eq!(roundtrip(&x), x);
    let f: SimpleFn<Rational> =
        serde_json::from_str(r#"{"space":{"points":["a"],"weights":{"a":"2"}},"values":{"a":"-7/3"}}"#).unwrap();
    assert_eq!(roundtrip(&f), f);
}

#[test]
fn run_report_roundtrip() {
    let report = verify_all(9, 5, &[], false);
    let text = serde_json::to_string(&report).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["seed"], 9);
    assert_eq!(serde_json::to_string(&roundtrip(&report)).unwrap(), text);
}
