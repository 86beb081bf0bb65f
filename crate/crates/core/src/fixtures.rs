//! Built-in example data. The JSON sources live in the repository's
//! `fixtures/` directory and are compiled in.

use crate::error::{Error, Result};
use crate::fans::ColoredFan;
use crate::galois::GaloisAction;
use crate::sphericaldata::HomogeneousSphericalDatum;

pub const NAMES: [&str; 5] = [
    "pgl2-torus",
    "pgl2-torus-product",
    "weil-restriction-so3",
    "cex-group-variety-shape",
    "self-normalizing-demo",
];

pub const PGL2_TORUS: &str = include_str!("../../../fixtures/pgl2-torus.json");
pub const PGL2_TORUS_PRODUCT: &str = include_str!("../../../fixtures/pgl2-torus-product.json");
pub const WEIL_RESTRICTION_SO3: &str = include_str!("../../../fixtures/weil-restriction-so3.json");
pub const CEX_GROUP_VARIETY_SHAPE: &str = include_str!("../../../fixtures/cex-group-variety-shape.json");
pub const SELF_NORMALIZING_DEMO: &str = include_str!("../../../fixtures/self-normalizing-demo.json");
pub const GAMMA2_TRIVIAL: &str = include_str!("../../../fixtures/gamma2-trivial.json");
pub const GAMMA2_SWAP: &str = include_str!("../../../fixtures/gamma2-swap.json");
pub const PRODUCT_SYMMETRIC_FAN: &str = include_str!("../../../fixtures/product-symmetric-fan.json");
pub const PRODUCT_ASYMMETRIC_FAN: &str = include_str!("../../../fixtures/product-asymmetric-fan.json");
pub const SELF_NORMALIZING_FAN: &str = include_str!("../../../fixtures/self-normalizing-fan.json");
pub const COVER_SWAP: &str = include_str!("../../../fixtures/cover-swap.json");
pub const COVER_KERNEL: &str = include_str!("../../../fixtures/cover-kernel.json");

/// A catalog entry: a datum, and optionally a Galois action and a fan that
/// go with it.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub datum: HomogeneousSphericalDatum,
    pub action: Option<GaloisAction>,
    pub fan: Option<ColoredFan>,
}

fn sources(name: &str) -> Option<(&'static str, Option<&'static str>, Option<&'static str>)> {
    Some(match name {
        "pgl2-torus" => (PGL2_TORUS, Some(GAMMA2_TRIVIAL), None),
        "pgl2-torus-product" => (PGL2_TORUS_PRODUCT, Some(GAMMA2_TRIVIAL), None),
        "weil-restriction-so3" => (WEIL_RESTRICTION_SO3, Some(GAMMA2_SWAP), Some(PRODUCT_SYMMETRIC_FAN)),
        "cex-group-variety-shape" => (CEX_GROUP_VARIETY_SHAPE, Some(GAMMA2_TRIVIAL), None),
        "self-normalizing-demo" => (SELF_NORMALIZING_DEMO, Some(GAMMA2_TRIVIAL), Some(SELF_NORMALIZING_FAN)),
        _ => return None,
    })
}

pub fn datum(name: &str) -> Result<HomogeneousSphericalDatum> {
    let (src, _, _) = sources(name).ok_or_else(|| Error::UnknownFixture(name.to_string()))?;
    HomogeneousSphericalDatum::from_json(src)
}

/// Loads a catalog entry. The datum is checked to be valid.
pub fn load_fixture(name: &str) -> Result<Fixture> {
    let (datum_src, action_src, fan_src) =
        sources(name).ok_or_else(|| Error::UnknownFixture(name.to_string()))?;
    let name = NAMES.iter().copied().find(|n| *n == name).expect("catalog name");
    let datum = HomogeneousSphericalDatum::from_json(datum_src)?;
    datum.clone().validated()?;
    Ok(Fixture {
        name,
        datum,
        action: action_src.map(GaloisAction::from_json).transpose()?,
        fan: fan_src.map(ColoredFan::from_json).transpose()?,
    })
}
