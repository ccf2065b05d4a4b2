//! The bundled fixture corpus: the worked examples across small primes plus
//! degenerate cases, with their expected verdicts.

use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// The full analysis succeeds with the stated verdicts.
    Report,
    /// Certified not potential good reduction.
    NotPotentialGoodReduction,
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub expr: String,
    pub prime: u64,
    pub outcome: Outcome,
    pub good_reduction: Option<bool>,
    pub connected: Option<bool>,
    pub finite: Option<bool>,
    pub census: Option<usize>,
}

pub fn corpus() -> Vec<Fixture> {
    let raw: Value =
        serde_json::from_str(include_str!("../fixtures/corpus.json")).expect("valid corpus json");
    raw["fixtures"]
        .as_array()
        .expect("fixtures array")
        .iter()
        .map(|f| Fixture {
            name: f["name"].as_str().unwrap().to_string(),
            expr: f["expr"].as_str().unwrap().to_string(),
            prime: f["prime"].as_u64().unwrap(),
            outcome: match f["outcome"].as_str().unwrap() {
                "report" => Outcome::Report,
                "not_pgr" => Outcome::NotPotentialGoodReduction,
                other => panic!("unknown outcome {other}"),
            },
            good_reduction: f["good_reduction"].as_bool(),
            connected: f["connected"].as_bool(),
            finite: f["finite"].as_bool(),
            census: f["census"].as_u64().map(|n| n as usize),
        })
        .collect()
}
