//! Browser bindings: each export takes graph descriptors (`K4`, `C5`, JSON)
//! and returns a JSON string, or throws the error message.

use homcx::algebra::{Coeff, ReducedComplex};
use homcx::complex::{Flavor, HomComplex};
use homcx::equivariant::bound::chromatic_lower_bound;
use homcx::equivariant::sw::auto_route;
use homcx::equivariant::sw_height;
use homcx::graph::{cycle, cycle_reflection, parse_graph, Graph, Involution};
use homcx::{Error, Result};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Keeps the page responsive; larger complexes belong to the CLI.
pub const WEB_BUDGET: usize = 2_000_000;

fn involution(t: &Graph, name: &str) -> Result<Involution> {
    let is_cycle = t.n() >= 3 && *t == cycle(t.n());
    match name {
        "reflect" | "auto" if is_cycle => cycle_reflection(t.n()),
        "swap" | "auto" if t.n() >= 2 => {
            let mut im: Vec<usize> = (0..t.n()).collect();
            im.swap(0, 1);
            Involution::new(t, im)
        }
        _ => Err(Error::arg(format!("cannot resolve involution `{name}`"))),
    }
}

fn build(g: &Graph, h: &Graph, flavor: Flavor) -> Result<HomComplex> {
    let x = HomComplex::build_within(g, h, flavor, None, WEB_BUDGET)?;
    if x.incidence_count() > WEB_BUDGET {
        return Err(Error::resource("complex too large for the browser demo"));
    }
    Ok(x)
}

pub fn homology_json(flavor: &str, g: &str, h: &str, coeff: &str) -> Result<String> {
    let g = parse_graph(g)?;
    let x = match flavor {
        "hom" => build(&g, &parse_graph(h)?, Flavor::Hom)?,
        "hom_plus" => build(&g, &parse_graph(h)?, Flavor::HomPlus)?,
        "ind" => build(&g, &homcx::graph::complete(1), Flavor::HomPlus)?,
        f => return Err(Error::arg(format!("unknown complex `{f}`"))),
    };
    let c = x.chain_complex(false);
    let r = ReducedComplex::with_budget(&c, Coeff::parse(coeff)?, false, WEB_BUDGET)?;
    let groups = (c.lo..=c.hi()).map(|k| r.homology_group(k).map(|g| g.to_string())).collect::<Result<Vec<_>>>()?;
    Ok(json!({"f_vector": x.f_vector(), "homology": groups}).to_string())
}

pub fn sw_height_json(t: &str, h: &str, invol: &str) -> Result<String> {
    let (t, h) = (parse_graph(t)?, parse_graph(h)?);
    let gamma = involution(&t, invol)?;
    let x = build(&t, &h, Flavor::Hom)?;
    if x.is_empty() {
        return Ok(json!({"height": -1}).to_string());
    }
    let rep = sw_height(&x, &gamma, auto_route(&x))?;
    Ok(json!({"height": rep.height, "route": rep.route}).to_string())
}

pub fn chromatic_bound_json(g: &str, t: &str, invol: &str, m_max: usize) -> Result<String> {
    let (g, t) = (parse_graph(g)?, parse_graph(t)?);
    let gamma = involution(&t, invol)?;
    let rep = chromatic_lower_bound(&g, &t, &gamma, 2..=m_max.max(2), None)?;
    let steps: Vec<_> = rep.steps.iter().map(|s| json!({"m": s.m, "certified": s.certified})).collect();
    Ok(json!({"chi_at_least": rep.bound, "height": rep.height, "steps": steps}).to_string())
}

fn js(r: Result<String>) -> std::result::Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen]
pub fn homology(flavor: &str, g: &str, h: &str, coeff: &str) -> std::result::Result<String, JsValue> {
    js(homology_json(flavor, g, h, coeff))
}

#[wasm_bindgen]
pub fn sw(t: &str, h: &str, invol: &str) -> std::result::Result<String, JsValue> {
    js(sw_height_json(t, h, invol))
}

#[wasm_bindgen]
pub fn chromatic_bound(g: &str, t: &str, invol: &str, m_max: usize) -> std::result::Result<String, JsValue> {
    js(chromatic_bound_json(g, t, invol, m_max))
}
