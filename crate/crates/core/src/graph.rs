//! Finite simple graphs (loops allowed), homomorphisms and involutions.
//!
//! Vertices are `0..n`. Adjacency is kept as one `u128` row per vertex, which
//! caps graphs at 128 vertices; every complex built here is far below that.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const MAX_VERTICES: usize = 128;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<u128>,
    labels: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl Graph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        if n > MAX_VERTICES {
            return Err(Error::resource(format!("graph has {n} vertices, limit is {MAX_VERTICES}")));
        }
        let mut adj = vec![0u128; n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::arg(format!("edge ({a},{b}) out of range for n={n}")));
            }
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        Ok(Graph { n, adj, labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Graph> {
        if labels.len() != self.n {
            return Err(Error::arg("label count differs from vertex count"));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn empty(n: usize) -> Result<Graph> {
        Graph::new(n, &[])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, v: usize) -> String {
        match &self.labels {
            Some(l) => l[v].clone(),
            None => v.to_string(),
        }
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a] >> b & 1 == 1
    }

    pub fn has_loop(&self, v: usize) -> bool {
        self.has_edge(v, v)
    }

    pub fn has_loops(&self) -> bool {
        (0..self.n).any(|v| self.has_loop(v))
    }

    /// Neighbourhood of `v` as a bitmask (includes `v` itself iff looped).
    pub fn nbr_mask(&self, v: usize) -> u128 {
        self.adj[v]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        bits(self.adj[v])
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    /// Edges `(a,b)` with `a <= b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in bits(self.adj[a] >> a) {
                out.push((a, a + b));
            }
        }
        out
    }

    pub fn num_edges(&self) -> usize {
        self.edges().len()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        components(self).len() == 1
    }

    pub fn to_json(&self) -> String {
        let j = GraphJson {
            n: self.n,
            edges: self.edges().into_iter().map(|(a, b)| [a, b]).collect(),
            labels: self.labels.clone(),
        };
        serde_json::to_string(&j).expect("graph serializes")
    }

    pub fn from_json(s: &str) -> Result<Graph> {
        let j: GraphJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let edges: Vec<(usize, usize)> = j.edges.iter().map(|e| (e[0], e[1])).collect();
        let g = Graph::new(j.n, &edges)?;
        match j.labels {
            Some(l) => g.with_labels(l),
            None => Ok(g),
        }
    }

    /// Adjacency-list text: one line `v: u w ...` per vertex; `#` starts a
    /// comment. An optional `n <count>` line fixes the number of vertices.
    pub fn from_adjacency_text(s: &str) -> Result<Graph> {
        let mut n_decl = None;
        let mut edges = Vec::new();
        let mut max_v = None::<usize>;
        for (lineno, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::Parse(format!("line {}: cannot parse `{raw}`", lineno + 1));
            if let Some(rest) = line.strip_prefix("n ") {
                n_decl = Some(rest.trim().parse::<usize>().map_err(|_| bad())?);
                continue;
            }
            let (head, tail) = line.split_once(':').ok_or_else(bad)?;
            let v: usize = head.trim().parse().map_err(|_| bad())?;
            max_v = Some(max_v.map_or(v, |m| m.max(v)));
            for tok in tail.split_whitespace() {
                let u: usize = tok.parse().map_err(|_| bad())?;
                max_v = Some(max_v.map_or(u, |m| m.max(u)));
                edges.push((v, u));
            }
        }
        let n = match (n_decl, max_v) {
            (Some(n), _) => n,
            (None, Some(m)) => m + 1,
            (None, None) => 0,
        };
        Graph::new(n, &edges)
    }

    pub fn to_adjacency_text(&self) -> String {
        let mut s = format!("n {}\n", self.n);
        for v in 0..self.n {
            let nb: Vec<String> = self.neighbors(v).map(|u| u.to_string()).collect();
            s.push_str(&format!("{v}: {}\n", nb.join(" ")));
        }
        s
    }
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphJson {
            n: self.n,
            edges: self.edges().into_iter().map(|(a, b)| [a, b]).collect(),
            labels: self.labels.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Graph, D::Error> {
        let j = GraphJson::deserialize(d)?;
        let edges: Vec<(usize, usize)> = j.edges.iter().map(|e| (e[0], e[1])).collect();
        let g = Graph::new(j.n, &edges).map_err(serde::de::Error::custom)?;
        match j.labels {
            Some(l) => g.with_labels(l).map_err(serde::de::Error::custom),
            None => Ok(g),
        }
    }
}

pub(crate) fn bits(mut m: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(b)
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Complete,
    Cycle,
    Path,
    Star,
}

/// `complete m` is K_m, `cycle m` is C_m with edges (i,i+1 mod m),
/// `path m` has m vertices, `star m` is K_{1,m} with centre 0.
pub fn make_family(kind: Family, size: usize) -> Result<Graph> {
    match kind {
        Family::Complete => {
            if size == 0 {
                return Err(Error::arg("complete graph needs at least one vertex"));
            }
            let mut e = Vec::new();
            for a in 0..size {
                for b in a + 1..size {
                    e.push((a, b));
                }
            }
            Graph::new(size, &e)
        }
        Family::Cycle => {
            if size < 3 {
                return Err(Error::arg("cycle needs at least 3 vertices"));
            }
            let e: Vec<_> = (0..size).map(|i| (i, (i + 1) % size)).collect();
            Graph::new(size, &e)
        }
        Family::Path => {
            if size == 0 {
                return Err(Error::arg("path needs at least one vertex"));
            }
            let e: Vec<_> = (1..size).map(|i| (i - 1, i)).collect();
            Graph::new(size, &e)
        }
        Family::Star => {
            let e: Vec<_> = (1..=size).map(|i| (0, i)).collect();
            Graph::new(size + 1, &e)
        }
    }
}

pub fn complete(m: usize) -> Graph {
    make_family(Family::Complete, m).expect("valid size")
}

pub fn cycle(m: usize) -> Graph {
    make_family(Family::Cycle, m).expect("valid size")
}

pub fn path(m: usize) -> Graph {
    make_family(Family::Path, m).expect("valid size")
}

pub fn petersen() -> Graph {
    let mut e = Vec::new();
    for i in 0..5 {
        e.push((i, (i + 1) % 5));
        e.push((i, i + 5));
        e.push((i + 5, (i + 2) % 5 + 5));
    }
    Graph::new(10, &e).unwrap()
}

/// Parses short graph names: `K4`, `C5`, `P3`, `S3`, `petersen`, `E3`
/// (three isolated vertices), or a JSON object.
pub fn parse_graph(desc: &str) -> Result<Graph> {
    let d = desc.trim();
    if d.starts_with('{') {
        return Graph::from_json(d);
    }
    if d.eq_ignore_ascii_case("petersen") {
        return Ok(petersen());
    }
    let (head, num) = d.split_at(d.find(|c: char| c.is_ascii_digit()).unwrap_or(d.len()));
    let size: usize = num
        .parse()
        .map_err(|_| Error::arg(format!("unknown graph `{desc}`")))?;
    match head {
        "K" | "k" => make_family(Family::Complete, size),
        "C" | "c" => make_family(Family::Cycle, size),
        "P" | "p" => make_family(Family::Path, size),
        "S" | "s" => make_family(Family::Star, size),
        "E" | "e" => Graph::empty(size),
        _ => Err(Error::arg(format!("unknown graph `{desc}`"))),
    }
}

/// Categorical product: (x,y)~(x',y') iff x~x' and y~y'. Vertex (x,y) is
/// `x * h.n() + y`.
pub fn tensor_product(g: &Graph, h: &Graph) -> Result<Graph> {
    let m = h.n;
    let mut e = Vec::new();
    for (x, x2) in g.edges() {
        for (y, y2) in h.edges() {
            e.push((x * m + y, x2 * m + y2));
            e.push((x * m + y2, x2 * m + y));
        }
    }
    Graph::new(g.n * m, &e)
}

/// Strong complement: every pair, loops included, flips.
pub fn complement(h: &Graph) -> Graph {
    let full = if h.n == 128 { u128::MAX } else { (1u128 << h.n) - 1 };
    Graph {
        n: h.n,
        adj: h.adj.iter().map(|r| !r & full).collect(),
        labels: h.labels.clone(),
    }
}

/// H₊: a new last vertex adjacent to everything, itself included.
pub fn plus_construction(h: &Graph) -> Result<Graph> {
    let b = h.n;
    let mut e = h.edges();
    e.extend((0..=b).map(|v| (v, b)));
    Graph::new(h.n + 1, &e)
}

/// Subgraph induced on `s` (sorted, deduplicated), keeping vertex order.
pub fn induced_subgraph(g: &Graph, s: &[usize]) -> Result<Graph> {
    let mut s = s.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.iter().any(|&v| v >= g.n) {
        return Err(Error::arg("induced subgraph vertex out of range"));
    }
    let mut e = Vec::new();
    for (i, &a) in s.iter().enumerate() {
        for (j, &b) in s.iter().enumerate().skip(i) {
            if g.has_edge(a, b) {
                e.push((i, j));
            }
        }
    }
    let mut out = Graph::new(s.len(), &e)?;
    if let Some(l) = &g.labels {
        out.labels = Some(s.iter().map(|&v| l[v].clone()).collect());
    }
    Ok(out)
}

/// Connected components as sorted vertex lists, ordered by smallest vertex.
pub fn components(g: &Graph) -> Vec<Vec<usize>> {
    let mut seen = 0u128;
    let mut out = Vec::new();
    for v in 0..g.n {
        if seen >> v & 1 == 1 {
            continue;
        }
        let mut comp = 1u128 << v;
        let mut frontier = comp;
        while frontier != 0 {
            let mut next = 0;
            for u in bits(frontier) {
                next |= g.adj[u];
            }
            frontier = next & !comp;
            comp |= next;
        }
        seen |= comp;
        out.push(bits(comp).collect());
    }
    out
}

/// Components of C_m[S] with at least two vertices, each listed in cyclic
/// order along the arc.
pub fn arc_decomposition(m: usize, s: &[usize]) -> Result<Vec<Vec<usize>>> {
    if m < 3 {
        return Err(Error::arg("cycle needs at least 3 vertices"));
    }
    let mut mask = vec![false; m];
    for &v in s {
        if v >= m {
            return Err(Error::arg("arc vertex out of range"));
        }
        mask[v] = true;
    }
    if mask.iter().all(|&b| b) {
        return Ok(vec![(0..m).collect()]);
    }
    let start = (0..m).find(|&v| !mask[v]).unwrap();
    let mut arcs = Vec::new();
    let mut cur = Vec::new();
    for k in 1..=m {
        let v = (start + k) % m;
        if mask[v] {
            cur.push(v);
        } else {
            if cur.len() >= 2 {
                arcs.push(std::mem::take(&mut cur));
            }
            cur.clear();
        }
    }
    arcs.sort_by_key(|a| a[0]);
    Ok(arcs)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexMap {
    pub image: Vec<usize>,
}

impl VertexMap {
    pub fn is_homomorphism(&self, g: &Graph, h: &Graph) -> bool {
        self.image.len() == g.n
            && self.image.iter().all(|&y| y < h.n)
            && g.edges().iter().all(|&(a, b)| h.has_edge(self.image[a], self.image[b]))
    }
}

pub fn is_homomorphism(g: &Graph, h: &Graph, f: &VertexMap) -> bool {
    f.is_homomorphism(g, h)
}

fn hom_search(g: &Graph, h: &Graph, mut visit: impl FnMut(&[usize]) -> bool) {
    let n = g.n;
    let mut img = vec![0usize; n];
    let full = if h.n == 128 { u128::MAX } else { (1u128 << h.n) - 1 };
    fn rec(
        v: usize,
        g: &Graph,
        h: &Graph,
        full: u128,
        img: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if v == g.n {
            return visit(img);
        }
        let mut allowed = full;
        for u in bits(g.adj[v] & ((1u128 << v) - 1)) {
            allowed &= h.adj[img[u]];
        }
        if g.has_loop(v) {
            let looped = (0..h.n).filter(|&y| h.has_loop(y)).fold(0u128, |m, y| m | 1 << y);
            allowed &= looped;
        }
        for y in bits(allowed) {
            img[v] = y;
            if !rec(v + 1, g, h, full, img, visit) {
                return false;
            }
        }
        true
    }
    rec(0, g, h, full, &mut img, &mut visit);
}

/// All homomorphisms, in lexicographic order of the image sequence.
pub fn enumerate_homomorphisms(g: &Graph, h: &Graph) -> Vec<VertexMap> {
    let mut out = Vec::new();
    hom_search(g, h, |img| {
        out.push(VertexMap { image: img.to_vec() });
        true
    });
    out
}

pub fn find_homomorphism(g: &Graph, h: &Graph) -> Option<VertexMap> {
    let mut out = None;
    hom_search(g, h, |img| {
        out = Some(VertexMap { image: img.to_vec() });
        false
    });
    out
}

pub const DEFAULT_CHROMATIC_LIMIT: usize = 12;

/// Exact chromatic number by search over K_1, K_2, ...; refuses graphs with
/// more than `limit` vertices and graphs with loops.
pub fn exact_chromatic_number(g: &Graph, limit: usize) -> Result<usize> {
    if g.has_loops() {
        return Err(Error::domain("graph with a loop has no proper colouring"));
    }
    if g.n > limit {
        return Err(Error::resource(format!(
            "chromatic search limited to {limit} vertices, graph has {}",
            g.n
        )));
    }
    if g.n == 0 {
        return Ok(0);
    }
    for k in 1..=g.n {
        if find_homomorphism(g, &complete(k)).is_some() {
            return Ok(k);
        }
    }
    unreachable!("n colours always suffice")
}

pub fn is_bipartite(g: &Graph) -> bool {
    !g.has_loops() && (g.n == 0 || find_homomorphism(g, &complete(2)).is_some())
}

/// A graph automorphism of order at most two.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Involution {
    pub image: Vec<usize>,
}

impl Involution {
    pub fn new(g: &Graph, image: Vec<usize>) -> Result<Involution> {
        if image.len() != g.n || image.iter().any(|&v| v >= g.n) {
            return Err(Error::arg("involution has wrong length or range"));
        }
        if (0..g.n).any(|v| image[image[v]] != v) {
            return Err(Error::domain("map does not square to the identity"));
        }
        let vm = VertexMap { image: image.clone() };
        if !vm.is_homomorphism(g, g) {
            return Err(Error::domain("involution is not a graph automorphism"));
        }
        Ok(Involution { image })
    }

    pub fn identity(g: &Graph) -> Involution {
        Involution { image: (0..g.n).collect() }
    }

    pub fn apply(&self, v: usize) -> usize {
        self.image[v]
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Edges `{v, γv}` with `v != γv`.
    pub fn flipped_edges(&self, g: &Graph) -> Vec<(usize, usize)> {
        (0..g.n)
            .filter(|&v| self.image[v] > v && g.has_edge(v, self.image[v]))
            .map(|v| (v, self.image[v]))
            .collect()
    }

    pub fn flips_edge(&self, g: &Graph) -> bool {
        !self.flipped_edges(g).is_empty()
    }
}

/// Reflection of C_m. With vertex labels 1..m (label m playing the role of
/// 0 mod m) it is x ↦ 2⌊m/2⌋+1−x mod m: for odd m this is x ↦ −x, fixing
/// label m and flipping the edge between labels m/2 ± 1/2; for even m it
/// flips the two edges through the symmetry axis.
pub fn cycle_reflection(m: usize) -> Result<Involution> {
    if m < 3 {
        return Err(Error::arg("cycle needs at least 3 vertices"));
    }
    let c = 2 * (m / 2) + 1;
    let image = (0..m)
        .map(|i| {
            let label = i + 1;
            let img = (c + m - label) % m;
            let img = if img == 0 { m } else { img };
            img - 1
        })
        .collect();
    Involution::new(&cycle(m), image)
}

/// Swap of the first two vertices of K_m.
pub fn complete_swap(m: usize) -> Result<Involution> {
    if m < 2 {
        return Err(Error::arg("swap needs at least 2 vertices"));
    }
    let mut image: Vec<usize> = (0..m).collect();
    image.swap(0, 1);
    Involution::new(&complete(m), image)
}
