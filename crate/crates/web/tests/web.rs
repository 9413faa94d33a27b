use homcx_web::{chromatic_bound_json, homology_json, sw_height_json};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn exports_answer_the_demo_queries() {
    let h = parse(homology_json("hom", "C5", "K4", "Z").unwrap());
    assert_eq!(h["homology"][1], "Z2");
    let ind = parse(homology_json("ind", "C6", "", "Z").unwrap());
    assert_eq!(ind["homology"][1], "Z^2");
    assert_eq!(parse(sw_height_json("K2", "K4", "swap").unwrap())["height"], 2);
    assert_eq!(parse(sw_height_json("C5", "K4", "auto").unwrap())["height"], 1);
    assert_eq!(parse(chromatic_bound_json("K4", "K2", "swap", 4).unwrap())["chi_at_least"], 4);
}

#[test]
fn oversized_and_malformed_inputs_are_errors() {
    assert!(homology_json("hom", "C7", "K7", "Z").is_err());
    assert!(homology_json("cube", "K4", "K3", "Z").is_err());
    assert!(sw_height_json("C5", "K3", "bogus").is_err());
    assert!(sw_height_json("K4", "K4", "reflect").is_err());
}
