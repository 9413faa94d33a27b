use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use homcx::algebra::{ChainComplex, Coeff, ReducedComplex};
use homcx::complex::export::{from_coordinate_text, to_coordinate_text};
use homcx::complex::{hom_complex, Flavor as Cells, HomComplex};
use homcx::equivariant::bound::chromatic_lower_bound;
use homcx::equivariant::sw::auto_route;
use homcx::equivariant::{sw_model, Certificate, Route};
use homcx::graph::{complete, cycle, parse_graph, Graph, Involution};
use homcx::spectral::spheres::{geometric_sphere_quotient_crosscheck, symbolic_sphere_quotient, Parity, SphereSymbolArray};
use homcx::spectral::{spectral_pages, support_filtration};
use homcx::{Error, Result};

use crate::cache::{digest, Cache};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    Hom,
    HomPlus,
    Ind,
}

/// Canonical input of a job; graphs are stored by content so that the
/// digest does not depend on how they were named.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Job {
    Homology {
        flavor: Flavor,
        g: Value,
        h: Option<Value>,
        coeff: Coeff,
        degrees: Option<(i32, i32)>,
        reduced: bool,
        cap: Option<usize>,
    },
    Sw {
        t: Value,
        h: Value,
        involution: Vec<usize>,
        route: Option<Route>,
        check_power: Option<usize>,
    },
    Bound {
        g: Value,
        t: Value,
        involution: Vec<usize>,
        m: (usize, usize),
        route: Option<Route>,
    },
    ScanConjecture {
        r: (usize, usize),
        n: (usize, usize),
        budget: usize,
    },
    Pages {
        g: Value,
        h: Value,
        r: u32,
    },
    Spheres {
        t: usize,
        d: usize,
        parity: Parity,
    },
}

pub fn graph_value(g: &Graph) -> Value {
    serde_json::from_str(&g.to_json()).expect("graph json")
}

fn graph_of(v: &Value) -> Result<Graph> {
    Graph::from_json(&v.to_string())
}

/// A family descriptor (`K4`, `C5`, …), a JSON graph, or a file path
/// holding JSON or adjacency-list text.
pub fn load_graph(desc: &str) -> Result<Graph> {
    let p = std::path::Path::new(desc);
    if p.is_file() {
        let text = std::fs::read_to_string(p).map_err(|e| Error::arg(format!("cannot read {desc}: {e}")))?;
        return if text.trim_start().starts_with('{') { Graph::from_json(&text) } else { Graph::from_adjacency_text(&text) };
    }
    parse_graph(desc)
}

/// `swap` exchanges vertices 0 and 1, `reflect` is the reflection of a
/// cycle, `identity` fixes everything, `auto` picks `reflect` on a cycle and `swap` otherwise, and a
/// comma list gives the image of every vertex.
pub fn resolve_involution(t: &Graph, name: &str) -> Result<Involution> {
    let n = t.n();
    let is_cycle = n >= 3 && *t == cycle(n);
    match name {
        "auto" if is_cycle => resolve_involution(t, "reflect"),
        "auto" | "swap" => {
            if n < 2 {
                return Err(Error::arg("swap needs two vertices"));
            }
            let mut im: Vec<usize> = (0..n).collect();
            im.swap(0, 1);
            Involution::new(t, im)
        }
        "identity" => Ok(Involution::identity(t)),
        "reflect" => {
            if !is_cycle {
                return Err(Error::arg("reflect needs a cycle C_m as test graph"));
            }
            Involution::new(t, homcx::graph::cycle_reflection(n)?.image)
        }
        list => {
            let im = list
                .split(',')
                .map(|s| s.trim().parse::<usize>().map_err(|_| Error::arg(format!("bad involution `{name}`"))))
                .collect::<Result<Vec<_>>>()?;
            Involution::new(t, im).map_err(|e| Error::arg(format!("involution `{name}`: {e}")))
        }
    }
}

pub fn parse_range(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s.split_once("..").unwrap_or((s, s));
    let p = |x: &str| x.trim().trim_start_matches('=').parse::<usize>().map_err(|_| Error::arg(format!("bad range `{s}`")));
    let (a, b) = (p(a)?, p(b)?);
    if a > b {
        return Err(Error::arg(format!("empty range `{s}`")));
    }
    Ok((a, b))
}

pub fn parse_degrees(s: &str) -> Result<(i32, i32)> {
    let (a, b) = s.split_once("..").unwrap_or((s, s));
    let p = |x: &str| x.trim().trim_start_matches('=').parse::<i32>().map_err(|_| Error::arg(format!("bad degree window `{s}`")));
    let (a, b) = (p(a)?, p(b)?);
    if a > b {
        return Err(Error::arg(format!("empty degree window `{s}`")));
    }
    Ok((a, b))
}

impl Job {
    pub fn name(&self) -> &'static str {
        match self {
            Job::Homology { .. } => "homology",
            Job::Sw { .. } => "sw",
            Job::Bound { .. } => "bound",
            Job::ScanConjecture { .. } => "scan-conjecture",
            Job::Pages { .. } => "pages",
            Job::Spheres { .. } => "spheres",
        }
    }

    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("job serializes")
    }

    pub fn digest(&self) -> String {
        digest(VERSION, &self.canonical())
    }
}

pub struct Context<'a> {
    pub budget: usize,
    pub cache: Option<&'a Cache>,
}

/// What a job produced: the payload and the certificates it carries.
pub struct Outcome {
    pub payload: Value,
    pub certificates: Vec<Value>,
}

fn budget_check(x: &HomComplex, budget: usize) -> Result<()> {
    let n = x.incidence_count();
    if n > budget {
        return Err(Error::resource(format!("complex has {n} incidence entries, budget is {budget}")));
    }
    Ok(())
}

fn cert_ref(name: &str, c: &Certificate) -> Value {
    json!({"name": name, "kind": kind(c), "degree": c.degree()})
}

fn kind(c: &Certificate) -> &'static str {
    match c {
        Certificate::Nonzero { .. } => "nonzero",
        Certificate::Vanishing { .. } => "vanishing",
        Certificate::Dimension { .. } => "dimension",
    }
}

fn build_complex(flavor: Flavor, g: &Graph, h: Option<&Graph>, cap: Option<usize>, budget: usize) -> Result<HomComplex> {
    let x = match (flavor, h) {
        (Flavor::Ind, _) => HomComplex::build_within(g, &complete(1), Cells::HomPlus, cap, budget)?,
        (Flavor::Hom, Some(h)) => HomComplex::build_within(g, h, Cells::Hom, cap, budget)?,
        (Flavor::HomPlus, Some(h)) => HomComplex::build_within(g, h, Cells::HomPlus, cap, budget)?,
        _ => return Err(Error::arg("a target graph is required")),
    };
    budget_check(&x, budget)?;
    Ok(x)
}

fn matrices_text(c: &ChainComplex) -> String {
    let ranks: Vec<String> = c.ranks().iter().map(|r| r.to_string()).collect();
    format!("# lo {} truncated {} ranks {}\n{}", c.lo, u8::from(c.truncated), ranks.join(" "), to_coordinate_text(c))
}

fn matrices_from_text(text: &str) -> Result<ChainComplex> {
    let head = text.lines().next().unwrap_or("");
    let f: Vec<&str> = head.trim_start_matches('#').split_whitespace().collect();
    if f.len() < 5 || f[0] != "lo" || f[2] != "truncated" || f[4] != "ranks" {
        return Err(Error::Parse("cached matrices lack a header".into()));
    }
    let lo: i32 = f[1].parse().map_err(|_| Error::Parse("bad lo".into()))?;
    let ranks = f[5..].iter().map(|r| r.parse::<usize>()).collect::<std::result::Result<Vec<_>, _>>().map_err(|_| Error::Parse("bad ranks".into()))?;
    let bds = from_coordinate_text(text)?.into_iter().map(|(_, m)| m).collect();
    let mut c = if ranks.is_empty() { ChainComplex::empty_at(lo) } else { ChainComplex::new(lo, &ranks, bds)? };
    c.truncated = f[3] == "1";
    Ok(c)
}

fn homology_job(job: &Job, ctx: &Context) -> Result<Outcome> {
    let Job::Homology { flavor, g, h, coeff, degrees, reduced, cap } = job else { unreachable!() };
    let g = graph_of(g)?;
    let h = h.as_ref().map(graph_of).transpose()?;
    // a degree window needs cells one dimension above it
    let cap = cap.or(degrees.map(|(_, hi)| (hi + 1).max(0) as usize));
    let mkey = digest(VERSION, &json!({"flavor": flavor, "g": graph_value(&g), "h": h.as_ref().map(graph_value), "cap": cap, "reduced": reduced}).to_string());
    let cached = ctx.cache.and_then(|c| c.matrices(&mkey)).and_then(|t| matrices_from_text(&t).ok());
    let (c, f_vector) = match cached {
        Some(c) => {
            let fv: Vec<usize> = c.ranks().into_iter().skip(usize::from(*reduced)).collect();
            (c, fv)
        }
        None => {
            let x = build_complex(*flavor, &g, h.as_ref(), cap, ctx.budget)?;
            let c = x.chain_complex(*reduced);
            if let Some(cache) = ctx.cache {
                let _ = cache.store_matrices(&mkey, &matrices_text(&c));
            }
            (c, x.f_vector())
        }
    };
    let r = ReducedComplex::with_budget(&c, *coeff, false, ctx.budget)?;
    let (lo, hi) = degrees.unwrap_or((c.lo, r.valid_hi));
    if hi > r.valid_hi && c.truncated {
        return Err(Error::arg(format!("degree {hi} needs a larger --cap")));
    }
    let window: Vec<i32> = (lo.max(c.lo)..=hi.min(r.valid_hi.max(c.hi()))).collect();
    let hom = window.iter().map(|&k| r.homology_group(k)).collect::<Result<Vec<_>>>()?;
    let coh = window.iter().map(|&k| r.cohomology_group(k)).collect::<Result<Vec<_>>>()?;
    Ok(Outcome {
        payload: json!({
            "flavor": flavor,
            "f_vector": f_vector,
            "truncated": c.truncated,
            "coeff": coeff.name(),
            "reduced": reduced,
            "homology": hom,
            "cohomology": coh,
            "matrices_digest": mkey,
        }),
        certificates: Vec::new(),
    })
}

fn sw_job(job: &Job, ctx: &Context) -> Result<Outcome> {
    let Job::Sw { t, h, involution, route, check_power } = job else { unreachable!() };
    let (t, h) = (graph_of(t)?, graph_of(h)?);
    let gamma = Involution::new(&t, involution.clone())?;
    let x = build_complex(Flavor::Hom, &t, Some(&h), None, ctx.budget)?;
    if x.is_empty() {
        return Ok(Outcome { payload: json!({"height": -1, "route": null, "certificates": {}}), certificates: Vec::new() });
    }
    let route = route.unwrap_or_else(|| auto_route(&x));
    let model = sw_model(&x, &gamma, route)?;
    let rep = model.height()?;
    let mut certs = Vec::new();
    let mut cjson = serde_json::Map::new();
    if let Some(c) = &rep.nonzero {
        certs.push(cert_ref("nonzero", c));
        cjson.insert("nonzero".into(), serde_json::to_value(c).unwrap());
    }
    if let Some(c) = &rep.vanishing {
        certs.push(cert_ref("vanishing", c));
        cjson.insert("vanishing".into(), serde_json::to_value(c).unwrap());
    }
    let mut payload = json!({"height": rep.height, "route": route, "f_vector": x.f_vector(), "certificates": cjson});
    if let Some(k) = check_power {
        let c = model.decide(*k)?;
        certs.push(cert_ref("check", &c));
        payload["check"] = json!({"power": k, "vanishes": !c.is_nonzero(), "certificate": c});
    }
    Ok(Outcome { payload, certificates: certs })
}

fn bound_job(job: &Job, _ctx: &Context) -> Result<Outcome> {
    let Job::Bound { g, t, involution, m, route } = job else { unreachable!() };
    let (g, t) = (graph_of(g)?, graph_of(t)?);
    let gamma = Involution::new(&t, involution.clone())?;
    let rep = chromatic_lower_bound(&g, &t, &gamma, m.0..=m.1, *route)?;
    let mut certs = Vec::new();
    if let Some(c) = &rep.source {
        certs.push(cert_ref("source", c));
    }
    for s in &rep.steps {
        if let Some(c) = &s.target {
            certs.push(cert_ref(&format!("target_m{}", s.m), c));
        }
    }
    let payload = json!({
        "chi_at_least": rep.bound,
        "height": rep.height,
        "premises": {
            "source_nonzero": rep.source,
            "targets": rep.steps,
        },
    });
    Ok(Outcome { payload, certificates: certs })
}

fn scan_job(job: &Job, _ctx: &Context) -> Result<Outcome> {
    let Job::ScanConjecture { r, n, budget } = job else { unreachable!() };
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let mut certs = Vec::new();
    for rr in r.0..=r.1 {
        for nn in n.0..=n.1 {
            if rr == 0 || nn < 2 {
                skipped.push(json!({"r": rr, "n": nn, "reason": "outside the grid r >= 1, n >= 2"}));
                continue;
            }
            let t = cycle(2 * rr + 1);
            let power = nn - 2;
            let x = match HomComplex::build_within(&t, &complete(nn), Cells::Hom, None, *budget) {
                Err(Error::Resource(e)) => {
                    skipped.push(json!({"r": rr, "n": nn, "reason": e}));
                    continue;
                }
                x => x?,
            };
            if x.is_empty() {
                rows.push(json!({"r": rr, "n": nn, "power": power, "vanishes": true, "route": null, "certificate": "empty"}));
                continue;
            }
            if x.incidence_count() > *budget {
                skipped.push(json!({"r": rr, "n": nn, "reason": format!("{} incidence entries exceed the budget", x.incidence_count())}));
                continue;
            }
            let gamma = homcx::graph::cycle_reflection(2 * rr + 1)?;
            let route = auto_route(&x);
            let model = sw_model(&x, &gamma, route)?;
            let c = model.decide(power)?;
            let v = !c.is_nonzero();
            certs.push(cert_ref(&format!("r{rr}_n{nn}"), &c));
            rows.push(json!({"r": rr, "n": nn, "power": power, "vanishes": v, "route": route, "certificate": c}));
        }
    }
    Ok(Outcome {
        payload: json!({"experimental": true, "statement": "power n-2 of the first Stiefel-Whitney class of Hom(C_{2r+1},K_n)", "grid": rows, "skipped": skipped}),
        certificates: certs,
    })
}

fn pages_job(job: &Job, ctx: &Context) -> Result<Outcome> {
    let Job::Pages { g, h, r } = job else { unreachable!() };
    let (g, h) = (graph_of(g)?, graph_of(h)?);
    build_complex(Flavor::HomPlus, &g, Some(&h), None, ctx.budget)?;
    let (_, f) = support_filtration(&g, &h, homcx::algebra::Z2)?;
    let p = spectral_pages(&f, *r)?;
    Ok(Outcome {
        payload: json!({
            "coeff": "Z2",
            "pages": p.pages.iter().map(|q| q.to_json()).collect::<Vec<_>>(),
            "e_infinity": p.e_infinity.to_json(),
            "convergence": p.convergence,
            "converges": p.converges(),
        }),
        certificates: Vec::new(),
    })
}

fn spheres_job(job: &Job, _ctx: &Context) -> Result<Outcome> {
    let Job::Spheres { t, d, parity } = job else { unreachable!() };
    let spec = SphereSymbolArray::new(*t, *d, *parity)?;
    let (_, census) = symbolic_sphere_quotient(&spec)?;
    let cross = geometric_sphere_quotient_crosscheck(&spec).ok();
    Ok(Outcome {
        payload: json!({"census": census, "matches": census.matches(), "geometric": cross}),
        certificates: Vec::new(),
    })
}

/// One line per grid point of a scan report, skipped points included.
pub fn csv_of(env: &Envelope) -> String {
    let mut s = String::from("r,n,power,outcome,certificate,route,status\n");
    let grid = env.payload["grid"].as_array().cloned().unwrap_or_default();
    for row in &grid {
        let cert = match &row["certificate"] {
            Value::String(s) => s.clone(),
            c => c["kind"].as_str().unwrap_or("").to_string(),
        };
        let outcome = if row["vanishes"] == Value::Bool(true) { "vanishes" } else { "nonzero" };
        s.push_str(&format!("{},{},{},{outcome},{cert},{},experimental\n", row["r"], row["n"], row["power"], row["route"].as_str().unwrap_or("")));
    }
    for row in env.payload["skipped"].as_array().into_iter().flatten() {
        s.push_str(&format!("{},{},,,,,skipped\n", row["r"], row["n"]));
    }
    s
}

pub fn run(job: &Job, ctx: &Context) -> Result<Outcome> {
    match job {
        Job::Homology { .. } => homology_job(job, ctx),
        Job::Sw { .. } => sw_job(job, ctx),
        Job::Bound { .. } => bound_job(job, ctx),
        Job::ScanConjecture { .. } => scan_job(job, ctx),
        Job::Pages { .. } => pages_job(job, ctx),
        Job::Spheres { .. } => spheres_job(job, ctx),
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Envelope {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub input_digest: String,
    pub input: Job,
    pub timing: Timing,
    pub payload: Value,
    pub certificates: Vec<Value>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Timing {
    pub seconds: f64,
}

impl Envelope {
    pub fn new(job: &Job, out: Outcome, seconds: f64) -> Envelope {
        Envelope {
            tool: "homcx".into(),
            version: VERSION.into(),
            command: job.name().into(),
            input_digest: job.digest(),
            input: job.clone(),
            timing: Timing { seconds: (seconds * 1e6).round() / 1e6 },
            payload: out.payload,
            certificates: out.certificates,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut s = serde_json::to_string_pretty(self).expect("envelope serializes");
        s.push('\n');
        s.into_bytes()
    }
}

fn check_cert(model: &homcx::equivariant::SwModel, v: &Value, what: &str) -> Result<()> {
    let c: Certificate = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("{what}: {e}")))?;
    if !model.verify(&c)? {
        return Err(Error::contract(format!("{what} certificate does not verify")));
    }
    Ok(())
}

/// Cheap checks of a report: the digest matches its input and every
/// certificate verifies against a freshly built model. Returns the
/// number of certificates checked.
pub fn verify(env: &Envelope, budget: usize) -> Result<usize> {
    if env.input.digest() != env.input_digest {
        return Err(Error::contract("input digest does not match the recorded input"));
    }
    if env.version != VERSION {
        return Err(Error::contract(format!("report written by version {}, this is {VERSION}", env.version)));
    }
    let mut n = 0;
    match &env.input {
        Job::Homology { flavor, g, h, reduced, cap, degrees, .. } => {
            let cap = cap.or(degrees.map(|(_, hi)| (hi + 1).max(0) as usize));
            let x = build_complex(*flavor, &graph_of(g)?, h.as_ref().map(graph_of).transpose()?.as_ref(), cap, budget)?;
            x.chain_complex(*reduced).check_d_squared()?;
            if serde_json::to_value(x.f_vector()).unwrap() != env.payload["f_vector"] {
                return Err(Error::contract("f-vector differs from the rebuilt complex"));
            }
        }
        Job::Sw { t, h, involution, .. } => {
            let (t, h) = (graph_of(t)?, graph_of(h)?);
            let x = build_complex(Flavor::Hom, &t, Some(&h), None, budget)?;
            if x.is_empty() {
                return Ok(0);
            }
            let route: Route = serde_json::from_value(env.payload["route"].clone()).map_err(|e| Error::Parse(e.to_string()))?;
            let model = sw_model(&x, &Involution::new(&t, involution.clone())?, route)?;
            for (k, v) in env.payload["certificates"].as_object().into_iter().flatten() {
                check_cert(&model, v, k)?;
                n += 1;
            }
            if let Some(c) = env.payload.get("check") {
                check_cert(&model, &c["certificate"], "check")?;
                n += 1;
            }
        }
        Job::Bound { g, t, involution, route, .. } => {
            let (g, t) = (graph_of(g)?, graph_of(t)?);
            let gamma = Involution::new(&t, involution.clone())?;
            let pick = |x: &HomComplex| route.unwrap_or_else(|| auto_route(x));
            if let Some(src) = env.payload["premises"]["source_nonzero"].as_object() {
                let x = hom_complex(&t, &g, None)?;
                check_cert(&sw_model(&x, &gamma, pick(&x))?, &Value::Object(src.clone()), "source")?;
                n += 1;
            }
            for step in env.payload["premises"]["targets"].as_array().into_iter().flatten() {
                let Some(c) = step.get("target").filter(|c| !c.is_null()) else { continue };
                let m = step["m"].as_u64().ok_or_else(|| Error::Parse("step without m".into()))? as usize;
                let x = hom_complex(&t, &complete(m), None)?;
                check_cert(&sw_model(&x, &gamma, pick(&x))?, c, &format!("target m={m}"))?;
                n += 1;
            }
        }
        Job::ScanConjecture { .. } => {
            for row in env.payload["grid"].as_array().into_iter().flatten() {
                if !row["certificate"].is_object() {
                    continue;
                }
                let (r, nn) = (row["r"].as_u64().unwrap_or(0) as usize, row["n"].as_u64().unwrap_or(0) as usize);
                let x = hom_complex(&cycle(2 * r + 1), &complete(nn), None)?;
                let route: Route = serde_json::from_value(row["route"].clone()).map_err(|e| Error::Parse(e.to_string()))?;
                let model = sw_model(&x, &homcx::graph::cycle_reflection(2 * r + 1)?, route)?;
                check_cert(&model, &row["certificate"], &format!("r={r} n={nn}"))?;
                n += 1;
            }
        }
        Job::Pages { .. } => {
            if env.payload["converges"] != Value::Bool(true) {
                return Err(Error::contract("E-infinity does not match the cohomology"));
            }
        }
        Job::Spheres { .. } => {
            if env.payload["matches"] != Value::Bool(true) {
                return Err(Error::contract("symbolic complex does not match its census"));
            }
        }
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_ignores_graph_naming() {
        let a = Job::Pages { g: graph_value(&parse_graph("C5").unwrap()), h: graph_value(&complete(4)), r: 2 };
        let b = Job::Pages { g: graph_value(&cycle(5)), h: graph_value(&parse_graph("K4").unwrap()), r: 2 };
        assert_eq!(a.digest(), b.digest());
        let c = Job::Pages { g: graph_value(&cycle(5)), h: graph_value(&complete(4)), r: 3 };
        assert_ne!(a.digest(), c.digest());
    }

    #[test]
    fn ranges_and_involutions() {
        assert_eq!(parse_range("2..4").unwrap(), (2, 4));
        assert_eq!(parse_range("3").unwrap(), (3, 3));
        assert_eq!(parse_degrees("1..=3").unwrap(), (1, 3));
        assert!(parse_range("4..2").is_err());
        assert_eq!(resolve_involution(&cycle(5), "auto").unwrap().image, homcx::graph::cycle_reflection(5).unwrap().image);
        assert_eq!(resolve_involution(&complete(3), "auto").unwrap().image, vec![1, 0, 2]);
        assert!(resolve_involution(&cycle(5), "1,0,2,3,4").is_err());
    }

    #[test]
    fn matrices_roundtrip() {
        let c = hom_complex(&cycle(5), &complete(3), None).unwrap().chain_complex(true);
        assert_eq!(matrices_from_text(&matrices_text(&c)).unwrap(), c);
    }
}
