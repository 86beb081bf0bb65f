//! JSON in, JSON out. Each function mirrors one CLI subcommand.

use serde_json::{json, Value};
use spherical_descent::automorphisms::aut_group;
use spherical_descent::cohomology::{count_models, lift_cover as lift, CoverProblem};
use spherical_descent::fans::{embedding_verdict, ColoredFan};
use spherical_descent::fixtures;
use spherical_descent::galois::{existence_verdict, preserves_invariants, FiniteGroup, GaloisAction};
use spherical_descent::sphericaldata::HomogeneousSphericalDatum;
use spherical_descent::{Error, Result};

fn action_or_trivial(action: Option<&str>) -> Result<GaloisAction> {
    match action {
        Some(s) => GaloisAction::from_json(s),
        None => Ok(GaloisAction::trivial(FiniteGroup::trivial())),
    }
}

pub fn fixture_names() -> Vec<String> {
    fixtures::NAMES.iter().map(|s| s.to_string()).collect()
}

/// `{"datum", "action", "fan"}` for a catalog entry; missing parts are null.
pub fn fixture(name: &str) -> Result<String> {
    let f = fixtures::load_fixture(name)?;
    Ok(json!({
        "datum": serde_json::to_value(&f.datum).expect("datum"),
        "action": f.action.map(|a| a.to_json_value()),
        "fan": f.fan.map(|f| f.to_json_value()),
    })
    .to_string())
}

pub fn validate(datum: &str) -> Result<String> {
    let d = HomogeneousSphericalDatum::from_json(datum)?;
    Ok(serde_json::to_string(&d.validate()).expect("report"))
}

pub fn analyze(datum: &str, action: Option<&str>) -> Result<String> {
    let d = HomogeneousSphericalDatum::from_json(datum)?.validated()?;
    let a = action_or_trivial(action)?;
    let verdict = existence_verdict(&d, &a)?;
    let count = if verdict.verdict.has_model() {
        Some(serde_json::to_value(count_models(&d, &a)?).expect("count"))
    } else {
        None
    };
    Ok(json!({
        "aut": aut_group(&d)?.to_string(),
        "preservation": serde_json::to_value(preserves_invariants(&d, &a)?).expect("preservation"),
        "verdict": serde_json::to_value(&verdict).expect("verdict"),
        "count": count,
    })
    .to_string())
}

pub fn count(datum: &str, action: Option<&str>) -> Result<u64> {
    let d = HomogeneousSphericalDatum::from_json(datum)?.validated()?;
    Ok(count_models(&d, &action_or_trivial(action)?)?.count)
}

pub fn lift_cover(problem: &str) -> Result<String> {
    let p = CoverProblem::from_json(problem)?;
    Ok(lift(&p)?.to_json_value(&p).to_string())
}

pub fn check_fan(datum: &str, fan: &str, action: Option<&str>) -> Result<String> {
    let d = HomogeneousSphericalDatum::from_json(datum)?.validated()?;
    let f = ColoredFan::from_json(fan)?;
    let v = embedding_verdict(&f, &d, &action_or_trivial(action)?)?;
    Ok(serde_json::to_string(&v).expect("verdict"))
}

/// Parses a JSON document produced by this module.
pub fn parse(s: &str) -> Result<Value> {
    serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
}
