//! Named towers. Polynomials list the non-leading coefficients of the monic
//! minimal polynomial of each layer generator over the layer below.

use super::{Automorphisms, FieldTower, Layers, K, K0, K1};
use crate::error::{Error, Result};
use serde_json::{json, Value};

pub const PRESET_NAMES: [&str; 5] = ["gauss", "zeta5", "zeta8", "zeta12", "gauss-root-1pi"];

fn build(name: &str, k0: Value, k1: Value, k: Value, aut: Automorphisms) -> Result<FieldTower> {
    let mut layers = Layers { polys: vec![] };
    for (l, poly) in [(K0, k0), (K1, k1), (K, k)] {
        let coeffs = poly
            .as_array()
            .expect("preset polynomial")
            .iter()
            .map(|x| layers.parse(l - 1, x))
            .collect::<Result<Vec<_>>>()?;
        layers.polys.push(coeffs);
        layers = Layers::new(layers.polys)?;
    }
    FieldTower::new(name, layers, None, None, aut)
}

pub fn preset(name: &str) -> Result<FieldTower> {
    let cyc = |m| Automorphisms::Cyclotomic { conductor: m };
    match name {
        // Q ⊂ Q(i) = Q(i)
        "gauss" => build(name, json!([0]), json!([1, 0]), json!([0]), cyc(4)),
        // k0 = Q(φ), φ = ζ + ζ^{-1} with φ^2 + φ - 1 = 0; ζ^2 - φζ + 1 = 0
        "zeta5" => build(name, json!([-1, 1]), json!([1, [0, -1]]), json!([0]), cyc(5)),
        // k0 = Q(√2); ζ^2 - √2ζ + 1 = 0
        "zeta8" => build(name, json!([-2, 0]), json!([1, [0, -1]]), json!([0]), cyc(8)),
        // k0 = Q(√3); ζ^2 - √3ζ + 1 = 0
        "zeta12" => build(name, json!([-3, 0]), json!([1, [0, -1]]), json!([0]), cyc(12)),
        // k = Q(i)(θ), θ^2 = 1 + i
        "gauss-root-1pi" => build(
            name,
            json!([0]),
            json!([1, 0]),
            json!([[-1, -1], 0]),
            Automorphisms::RootOnePlusI,
        ),
        _ => Err(Error::Config(format!(
            "unknown field preset '{name}' (known: {})",
            PRESET_NAMES.join(", ")
        ))),
    }
}
