//! From footprints to named patterns: knowledge-graph construction,
//! rule-driven recognition, and an equivalent direct traversal.
//!
//! Two graph schemas cover the published variants. The precomputed schema
//! stores relations up front: each building carries its triple memberships
//! in `pIDList` and similarity is an explicit relationship. The attribute
//! schema stores raw building and spacing attributes and leaves every
//! predicate to the rules. Both feed the same recognition semantics, so
//! any mode and schema combination returns the same patterns on the same
//! data (the strict listing modes excepted, see [`RecognizeMode`]).

pub mod baseline;
pub mod scripts;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{angle_diff_180, FrCombine, Polyline};
use crate::property_graph::{Graph, NodeId, Props, Value};
use crate::props;
use crate::proximity::{
    edge_attributes, rng_build, BuildingRecord, ProximityEdge, ProximityError, RngMetric,
    RngOptions,
};
use crate::relations::{
    clamp_length, enumerate_adjacent_pairs, linear_triple, similarity, RelationsError, Thresholds,
};
use crate::rule_engine::{execute, parse, Cell, EngineError, ExecuteOptions, QueryScript};

pub use scripts::{render_scripts, RuleScripts};

#[derive(Debug, Error, PartialEq)]
pub enum PipelineError {
    #[error(transparent)]
    Proximity(#[from] ProximityError),
    #[error(transparent)]
    Relations(#[from] RelationsError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Graph(#[from] crate::property_graph::GraphError),
    #[error("graph references building {0} with no record")]
    UnknownBuilding(u64),
    #[error("{0}")]
    InvalidOptions(&'static str),
    #[error("rule output malformed: {0}")]
    RuleOutput(String),
}

/// Shape of the knowledge graph a dataset is loaded into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schema {
    /// Relations computed at build time; buildings carry pIDList, similarity
    /// is a stored relationship.
    Precomputed,
    /// Raw attributes only; similarity and alignment are derived by rules.
    Attributes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecognizeMode {
    /// Plain traversal over the graph, predicates evaluated in Rust.
    Direct,
    /// The operational rule scripts run on the embedded engine.
    Engine,
    /// The published rule listings run unnormalized. Their directed chains
    /// and dead merge closure keep every triple a separate pattern; useful
    /// only to study the listings themselves.
    EngineStrict,
}

/// How two triples sharing two buildings are tested for merging.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlignRule {
    /// All four cross pairs of the spacing directions must agree.
    Listing,
    /// Only the directions next to the buildings the triples do not share
    /// must agree. Direct mode only.
    OuterEdges,
}

#[derive(Debug, Clone, Copy)]
pub struct RecognizeOptions {
    pub mode: RecognizeMode,
    pub align_rule: AlignRule,
    /// Must match the options the graph was built with, so that direct mode
    /// reproduces the stored edge attributes bit for bit.
    pub metric: RngMetric,
    pub fr_combine: FrCombine,
}

impl Default for RecognizeOptions {
    fn default() -> Self {
        RecognizeOptions {
            mode: RecognizeMode::Direct,
            align_rule: AlignRule::Listing,
            metric: RngMetric::Footprint,
            fr_combine: FrCombine::Max,
        }
    }
}

/// A collinear triple, ends ordered by ascending building id.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriplePattern {
    pub b_ids: [u64; 3],
    /// Spacing directions of the two edges, in `b_ids` order, degrees.
    pub oris: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearPattern {
    /// Building ids in row order; the endpoint with the smaller id first.
    pub building_ids: Vec<u64>,
    /// Indexes of the merged triples, in triple order.
    pub source_triples: Vec<usize>,
    /// Whether every consecutive window of three is itself a triple.
    pub strict_chain: bool,
}

/// Parsed rule scripts, reusable across recognitions.
#[derive(Debug, Clone)]
pub struct CompiledRules {
    pub recognize_precomputed: QueryScript,
    pub derive_relations: QueryScript,
    pub recognize_attributes: QueryScript,
    pub listing_strict: QueryScript,
    pub listing_attributes: QueryScript,
}

impl CompiledRules {
    pub fn render(t: &Thresholds) -> Result<Self, PipelineError> {
        t.validate()?;
        Ok(Self::from_sources(&render_scripts(t)).expect("rendered scripts parse"))
    }

    /// Compiles externally supplied script texts, e.g. an edited rules
    /// directory.
    pub fn from_sources(s: &RuleScripts) -> Result<Self, EngineError> {
        Ok(CompiledRules {
            recognize_precomputed: parse(&s.recognize_precomputed)?,
            derive_relations: parse(&s.derive_relations)?,
            recognize_attributes: parse(&s.recognize_attributes)?,
            listing_strict: parse(&s.listing_strict)?,
            listing_attributes: parse(&s.listing_attributes)?,
        })
    }
}

pub fn build_kg(
    schema: Schema,
    buildings: &[BuildingRecord],
    roads: &[Polyline],
    t: &Thresholds,
    rng: &RngOptions,
) -> Result<Graph, PipelineError> {
    match schema {
        Schema::Precomputed => build_kg_precomputed(buildings, roads, t, rng),
        Schema::Attributes => build_kg_attributes(buildings, roads, t, rng),
    }
}

pub fn build_kg_precomputed(
    buildings: &[BuildingRecord],
    roads: &[Polyline],
    t: &Thresholds,
    rng: &RngOptions,
) -> Result<Graph, PipelineError> {
    t.validate()?;
    let edges = rng_build(buildings, roads, rng)?;
    let by_id = index_records(buildings)?;
    let triples = derive_triples(&edges, &by_id, t)?;
    let mut membership: HashMap<u64, Vec<Value>> = HashMap::new();
    for (p, tp) in triples.iter().enumerate() {
        for id in tp.b_ids {
            membership.entry(id).or_default().push(Value::Int(p as i64));
        }
    }
    let mut g = Graph::new();
    let mut node_of = HashMap::new();
    for b in buildings {
        let plist = membership.remove(&b.id).unwrap_or_default();
        let nid = g.add_node(
            vec!["Building".to_string()],
            props! {
                "ID" => Value::Int(b.id as i64),
                "pIDList" => Value::List(plist),
            },
        );
        node_of.insert(b.id, nid);
    }
    for e in &edges {
        g.add_edge(
            node_of[&e.i],
            node_of[&e.j],
            "HAS_Proxi",
            props! { "EOri" => Value::Float(e.e_ori) },
        )?;
    }
    for e in &edges {
        if similarity(by_id[&e.i], by_id[&e.j], t).pass {
            g.add_edge(node_of[&e.i], node_of[&e.j], "HAS_Sim", Props::new())?;
        }
    }
    Ok(g)
}

pub fn build_kg_attributes(
    buildings: &[BuildingRecord],
    roads: &[Polyline],
    t: &Thresholds,
    rng: &RngOptions,
) -> Result<Graph, PipelineError> {
    t.validate()?;
    let edges = rng_build(buildings, roads, rng)?;
    let mut g = Graph::new();
    let mut node_of = HashMap::new();
    for b in buildings {
        let nid = g.add_node(
            vec!["Building".to_string()],
            props! {
                "ID" => Value::Int(b.id as i64),
                "Area" => Value::Float(b.area),
                "BOri" => Value::Float(b.b_ori),
                "EdgeCount" => Value::Int(b.edge_cnt as i64),
            },
        );
        node_of.insert(b.id, nid);
    }
    for e in &edges {
        g.add_edge(
            node_of[&e.i],
            node_of[&e.j],
            "HAS_Proxi",
            props! {
                "EOri" => Value::Float(e.e_ori),
                "Length" => Value::Float(clamp_length(e.le, t.td)),
                "FR" => Value::Float(e.fr),
            },
        )?;
    }
    Ok(g)
}

/// Schema of a built graph, judged by whether buildings carry membership
/// lists. `None` when the graph has no buildings.
pub fn graph_schema(g: &Graph) -> Option<Schema> {
    g.nodes_with_label("Building").first().map(|&n| {
        if g.node(n).props.contains_key("pIDList") {
            Schema::Precomputed
        } else {
            Schema::Attributes
        }
    })
}

/// Recognizes linear patterns on a built graph. Engine modes work on an
/// internal copy; use [`recognize_on_graph`] to keep derived nodes and
/// edges or to skip the copy.
pub fn recognize_linear_patterns(
    g: &Graph,
    buildings: &[BuildingRecord],
    t: &Thresholds,
    opts: &RecognizeOptions,
) -> Result<Vec<LinearPattern>, PipelineError> {
    t.validate()?;
    let by_id = index_records(buildings)?;
    match opts.mode {
        RecognizeMode::Direct => direct_recognize(g, &by_id, t, opts),
        _ => {
            let rules = CompiledRules::render(t)?;
            let mut scratch = g.clone();
            engine_recognize(&mut scratch, &by_id, opts, &rules)
        }
    }
}

/// Like [`recognize_linear_patterns`] but mutating the given graph in
/// engine modes and taking pre-parsed rules, for callers that time the
/// recognition itself.
pub fn recognize_on_graph(
    g: &mut Graph,
    buildings: &[BuildingRecord],
    t: &Thresholds,
    opts: &RecognizeOptions,
    rules: &CompiledRules,
) -> Result<Vec<LinearPattern>, PipelineError> {
    t.validate()?;
    let by_id = index_records(buildings)?;
    match opts.mode {
        RecognizeMode::Direct => direct_recognize(g, &by_id, t, opts),
        _ => engine_recognize(g, &by_id, opts, rules),
    }
}

fn direct_recognize(
    g: &Graph,
    by_id: &HashMap<u64, &BuildingRecord>,
    t: &Thresholds,
    opts: &RecognizeOptions,
) -> Result<Vec<LinearPattern>, PipelineError> {
    let mut edges = Vec::new();
    for &eid in g.edges_with_type("HAS_Proxi") {
        let e = g.edge(eid);
        let i = node_id_prop(g, e.src)?;
        let j = node_id_prop(g, e.dst)?;
        edges.push(edge_attributes(
            record(by_id, i)?,
            record(by_id, j)?,
            opts.metric,
            opts.fr_combine,
        ));
    }
    edges.sort_by(|a, b| (a.i, a.j).cmp(&(b.i, b.j)));
    let triples = derive_triples(&edges, by_id, t)?;
    let links = align_links(&triples, t, opts.align_rule);
    assemble(&triples, &links, by_id)
}

fn engine_recognize(
    g: &mut Graph,
    by_id: &HashMap<u64, &BuildingRecord>,
    opts: &RecognizeOptions,
    rules: &CompiledRules,
) -> Result<Vec<LinearPattern>, PipelineError> {
    if opts.align_rule == AlignRule::OuterEdges {
        return Err(PipelineError::InvalidOptions(
            "outer-edge alignment runs in direct mode only; the rule scripts implement the cross-pair form",
        ));
    }
    let schema = match graph_schema(g) {
        Some(s) => s,
        None => return Ok(Vec::new()),
    };
    let x = ExecuteOptions::default();
    let table = match (opts.mode, schema) {
        (RecognizeMode::Engine, Schema::Precomputed) => {
            execute(&rules.recognize_precomputed, g, x)?
        }
        (RecognizeMode::Engine, Schema::Attributes) => {
            execute(&rules.derive_relations, g, x)?;
            execute(&rules.recognize_attributes, g, x)?
        }
        (RecognizeMode::EngineStrict, Schema::Precomputed) => {
            execute(&rules.listing_strict, g, x)?
        }
        (RecognizeMode::EngineStrict, Schema::Attributes) => {
            // The attribute listing returns triple rows directly.
            let table = execute(&rules.listing_attributes, g, x)?;
            let mut triples = Vec::new();
            for row in &table.rows {
                let nodes: Vec<NodeId> = row
                    .iter()
                    .map(|c| match c {
                        Cell::Node(n) => Ok(*n),
                        other => Err(PipelineError::RuleOutput(format!(
                            "expected a building row, got {other:?}"
                        ))),
                    })
                    .collect::<Result<_, _>>()?;
                if nodes.len() != 3 {
                    return Err(PipelineError::RuleOutput(format!(
                        "expected three buildings per row, got {}",
                        nodes.len()
                    )));
                }
                triples.push(TriplePattern {
                    b_ids: [
                        node_id_prop(g, nodes[0])?,
                        node_id_prop(g, nodes[1])?,
                        node_id_prop(g, nodes[2])?,
                    ],
                    oris: [
                        proxi_ori(g, nodes[0], nodes[1])?,
                        proxi_ori(g, nodes[1], nodes[2])?,
                    ],
                });
            }
            return assemble(&triples, &[], by_id);
        }
        (RecognizeMode::Direct, _) => unreachable!("direct mode handled by caller"),
    };

    let (triples, idx) = read_triple_patterns(g)?;
    let mut links = Vec::new();
    for row in &table.rows {
        for c in row {
            if let Cell::Path { start, end } = c {
                let a = idx.get(start).ok_or_else(|| {
                    PipelineError::RuleOutput(format!("path endpoint {start} is not a triple"))
                })?;
                let b = idx.get(end).ok_or_else(|| {
                    PipelineError::RuleOutput(format!("path endpoint {end} is not a triple"))
                })?;
                links.push((*a, *b));
            }
        }
    }
    assemble(&triples, &links, by_id)
}

/// Collinear triples of the proximity graph: both pairs similar, spacings
/// aligned. Chain enumeration is id-canonical and sorted, so triple indexes
/// and every pIDList derived from them are deterministic.
fn derive_triples(
    edges: &[ProximityEdge],
    by_id: &HashMap<u64, &BuildingRecord>,
    t: &Thresholds,
) -> Result<Vec<TriplePattern>, PipelineError> {
    let mut out = Vec::new();
    for c in enumerate_adjacent_pairs(edges) {
        let (bi, bj, bk) = (record(by_id, c.i)?, record(by_id, c.j)?, record(by_id, c.k)?);
        if !similarity(bi, bj, t).pass || !similarity(bj, bk, t).pass {
            continue;
        }
        let s = linear_triple(&edges[c.e_ij], &edges[c.e_jk], t)
            .expect("chain edges share the middle building");
        if s.pass {
            out.push(TriplePattern {
                b_ids: [c.i, c.j, c.k],
                oris: [edges[c.e_ij].e_ori, edges[c.e_jk].e_ori],
            });
        }
    }
    Ok(out)
}

fn align_links(triples: &[TriplePattern], t: &Thresholds, rule: AlignRule) -> Vec<(usize, usize)> {
    let mut member: HashMap<u64, Vec<usize>> = HashMap::new();
    for (p, tp) in triples.iter().enumerate() {
        for id in tp.b_ids {
            member.entry(id).or_default().push(p);
        }
    }
    let mut links = Vec::new();
    let mut seen = HashSet::new();
    for list in member.values() {
        for (pos, &a) in list.iter().enumerate() {
            for &b in &list[pos + 1..] {
                let key = (a.min(b), a.max(b));
                if !seen.insert(key) {
                    continue;
                }
                if shared_count(&triples[a], &triples[b]) >= 2
                    && aligned(&triples[a], &triples[b], t, rule)
                {
                    links.push(key);
                }
            }
        }
    }
    links
}

fn shared_count(a: &TriplePattern, b: &TriplePattern) -> usize {
    a.b_ids.iter().filter(|x| b.b_ids.contains(x)).count()
}

fn aligned(a: &TriplePattern, b: &TriplePattern, t: &Thresholds, rule: AlignRule) -> bool {
    match rule {
        AlignRule::Listing => cross_pairs_aligned(a, b, t.eta1),
        AlignRule::OuterEdges => outer_edges_aligned(a, b, t.eta1),
    }
}

fn cross_pairs_aligned(a: &TriplePattern, b: &TriplePattern, eta1: f64) -> bool {
    a.oris
        .iter()
        .all(|&x| b.oris.iter().all(|&y| angle_diff_180(x, y) <= eta1))
}

/// Compares only the spacing directions next to the buildings the two
/// triples do not share; equal sets fall back to the cross-pair form.
fn outer_edges_aligned(a: &TriplePattern, b: &TriplePattern, eta1: f64) -> bool {
    let outer = |tp: &TriplePattern, other: &TriplePattern| -> Vec<f64> {
        let mut oris = Vec::new();
        for x in tp.b_ids {
            if other.b_ids.contains(&x) {
                continue;
            }
            if x == tp.b_ids[0] || x == tp.b_ids[1] {
                oris.push(tp.oris[0]);
            }
            if x == tp.b_ids[2] || x == tp.b_ids[1] {
                oris.push(tp.oris[1]);
            }
        }
        oris
    };
    let (oa, ob) = (outer(a, b), outer(b, a));
    if oa.is_empty() || ob.is_empty() {
        return cross_pairs_aligned(a, b, eta1);
    }
    oa.iter()
        .all(|&x| ob.iter().all(|&y| angle_diff_180(x, y) <= eta1))
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn assemble(
    triples: &[TriplePattern],
    links: &[(usize, usize)],
    by_id: &HashMap<u64, &BuildingRecord>,
) -> Result<Vec<LinearPattern>, PipelineError> {
    let mut uf = UnionFind::new(triples.len());
    for &(a, b) in links {
        uf.union(a, b);
    }
    let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for p in 0..triples.len() {
        comps.entry(uf.find(p)).or_default().push(p);
    }
    let mut out: Vec<LinearPattern> = Vec::new();
    // The precomputed schema recognizes triples through membership
    // intersection, which also admits chains over a passing triple's
    // buildings with a permuted middle when the proximity graph closes the
    // triangle. Such chains never align with anything, so they surface as a
    // component over an already-covered building set; drop the repeats.
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    for members in comps.into_values() {
        let ids: BTreeSet<u64> = members.iter().flat_map(|&m| triples[m].b_ids).collect();
        let ordered = order_pattern(&ids, by_id)?;
        if !seen.insert(ordered.clone()) {
            continue;
        }
        let strict_chain = is_strict_chain(&ordered, &members, triples);
        out.push(LinearPattern {
            building_ids: ordered,
            source_triples: members,
            strict_chain,
        });
    }
    out.sort_by(|a, b| a.building_ids.cmp(&b.building_ids));
    Ok(out)
}

/// Orders member buildings along the pattern's principal direction, the
/// endpoint with the smaller id first.
fn order_pattern(
    ids: &BTreeSet<u64>,
    by_id: &HashMap<u64, &BuildingRecord>,
) -> Result<Vec<u64>, PipelineError> {
    let mut pts = Vec::with_capacity(ids.len());
    for &id in ids {
        pts.push((id, record(by_id, id)?.centroid));
    }
    let n = pts.len() as f64;
    let (mx, my) = pts
        .iter()
        .fold((0.0, 0.0), |(x, y), (_, c)| (x + c.x, y + c.y));
    let (mx, my) = (mx / n, my / n);
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (_, c) in &pts {
        let (dx, dy) = (c.x - mx, c.y - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let (s, c) = theta.sin_cos();
    let mut keyed: Vec<(f64, u64)> = pts
        .into_iter()
        .map(|(id, p)| ((p.x - mx) * c + (p.y - my) * s, id))
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut ordered: Vec<u64> = keyed.into_iter().map(|(_, id)| id).collect();
    if ordered.first() > ordered.last() {
        ordered.reverse();
    }
    Ok(ordered)
}

fn is_strict_chain(ordered: &[u64], members: &[usize], triples: &[TriplePattern]) -> bool {
    ordered.windows(3).all(|w| {
        let found = members.iter().any(|&m| {
            let tp = &triples[m];
            tp.b_ids[1] == w[1]
                && ((tp.b_ids[0] == w[0] && tp.b_ids[2] == w[2])
                    || (tp.b_ids[0] == w[2] && tp.b_ids[2] == w[0]))
        });
        if !found {
            log::debug!("no source triple covers window {w:?} of pattern {ordered:?}");
        }
        found
    })
}

fn read_triple_patterns(
    g: &Graph,
) -> Result<(Vec<TriplePattern>, HashMap<NodeId, usize>), PipelineError> {
    let mut triples = Vec::new();
    let mut idx = HashMap::new();
    for &nid in g.nodes_with_label("Triple_Pattern") {
        let n = g.node(nid);
        let ids = match n.props.get("bIDList") {
            Some(Value::List(v)) if v.len() == 3 => v,
            other => {
                return Err(PipelineError::RuleOutput(format!(
                    "triple node {nid} has bIDList {other:?}"
                )))
            }
        };
        let oris = match n.props.get("OriList") {
            Some(Value::List(v)) if v.len() == 2 => v,
            other => {
                return Err(PipelineError::RuleOutput(format!(
                    "triple node {nid} has OriList {other:?}"
                )))
            }
        };
        let as_id = |v: &Value| match v {
            Value::Int(i) => Ok(*i as u64),
            other => Err(PipelineError::RuleOutput(format!(
                "bIDList entry {other:?} is not an id"
            ))),
        };
        let as_deg = |v: &Value| match v {
            Value::Float(f) => Ok(*f),
            Value::Int(i) => Ok(*i as f64),
            other => Err(PipelineError::RuleOutput(format!(
                "OriList entry {other:?} is not an angle"
            ))),
        };
        idx.insert(nid, triples.len());
        triples.push(TriplePattern {
            b_ids: [as_id(&ids[0])?, as_id(&ids[1])?, as_id(&ids[2])?],
            oris: [as_deg(&oris[0])?, as_deg(&oris[1])?],
        });
    }
    Ok((triples, idx))
}

fn index_records(
    buildings: &[BuildingRecord],
) -> Result<HashMap<u64, &BuildingRecord>, PipelineError> {
    let mut by_id = HashMap::with_capacity(buildings.len());
    for b in buildings {
        if by_id.insert(b.id, b).is_some() {
            return Err(ProximityError::DuplicateId(b.id).into());
        }
    }
    Ok(by_id)
}

fn record<'a>(
    by_id: &HashMap<u64, &'a BuildingRecord>,
    id: u64,
) -> Result<&'a BuildingRecord, PipelineError> {
    by_id.get(&id).copied().ok_or(PipelineError::UnknownBuilding(id))
}

fn node_id_prop(g: &Graph, n: NodeId) -> Result<u64, PipelineError> {
    match g.node(n).props.get("ID") {
        Some(Value::Int(i)) => Ok(*i as u64),
        _ => Err(PipelineError::RuleOutput(format!(
            "node {n} has no integer ID"
        ))),
    }
}

fn proxi_ori(g: &Graph, a: NodeId, b: NodeId) -> Result<f64, PipelineError> {
    for &eid in g.out_edges(a).iter().chain(g.in_edges(a)) {
        let e = g.edge(eid);
        if e.etype == "HAS_Proxi" && (e.src == b || e.dst == b) {
            if let Some(Value::Float(v)) = e.props.get("EOri") {
                return Ok(*v);
            }
        }
    }
    Err(PipelineError::RuleOutput(format!(
        "no HAS_Proxi edge between nodes {a} and {b}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Polygon;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rect(id: u64, cx: f64, cy: f64, w: f64, h: f64) -> BuildingRecord {
        BuildingRecord::from_polygon(id, Polygon::rectangle(cx, cy, w, h, 0.0)).unwrap()
    }

    /// A row of four plus a vertical branch off its last building.
    fn branch_fixture() -> Vec<BuildingRecord> {
        vec![
            rect(0, 0.0, 0.0, 10.0, 6.0),
            rect(1, 14.0, 0.0, 10.0, 6.0),
            rect(2, 28.0, 0.0, 10.0, 6.0),
            rect(3, 42.0, 0.0, 10.0, 6.0),
            rect(4, 42.0, 14.0, 10.0, 6.0),
            rect(5, 42.0, 28.0, 10.0, 6.0),
        ]
    }

    fn ids_of(patterns: &[LinearPattern]) -> Vec<Vec<u64>> {
        patterns.iter().map(|p| p.building_ids.clone()).collect()
    }

    fn defaults() -> (Thresholds, RngOptions, RecognizeOptions) {
        (
            Thresholds::default(),
            RngOptions::default(),
            RecognizeOptions::default(),
        )
    }

    #[test]
    fn branch_fixture_memberships() {
        let (t, rng, _) = defaults();
        let b = branch_fixture();
        let g = build_kg_precomputed(&b, &[], &t, &rng).unwrap();
        let lists: Vec<Vec<i64>> = g
            .nodes_with_label("Building")
            .iter()
            .map(|&n| match g.node(n).props.get("pIDList") {
                Some(Value::List(v)) => v
                    .iter()
                    .map(|x| match x {
                        Value::Int(i) => *i,
                        other => panic!("{other:?}"),
                    })
                    .collect(),
                other => panic!("{other:?}"),
            })
            .collect();
        assert_eq!(
            lists,
            vec![
                vec![0],
                vec![0, 1],
                vec![0, 1],
                vec![1, 2],
                vec![2],
                vec![2]
            ]
        );
        assert_eq!(g.edges_with_type("HAS_Proxi").len(), 5);
        assert_eq!(g.edges_with_type("HAS_Sim").len(), 5);
    }

    #[test]
    fn branch_fixture_patterns_direct() {
        let (t, rng, opts) = defaults();
        let b = branch_fixture();
        let g = build_kg_precomputed(&b, &[], &t, &rng).unwrap();
        let pats = recognize_linear_patterns(&g, &b, &t, &opts).unwrap();
        assert_eq!(ids_of(&pats), vec![vec![0, 1, 2, 3], vec![3, 4, 5]]);
        assert!(pats.iter().all(|p| p.strict_chain));
        assert_eq!(pats[0].source_triples, vec![0, 1]);
        assert_eq!(pats[1].source_triples, vec![2]);
    }

    #[test]
    fn engine_agrees_with_direct_on_both_schemas() {
        let (t, rng, mut opts) = defaults();
        let b = branch_fixture();
        let ga = build_kg_precomputed(&b, &[], &t, &rng).unwrap();
        let gb = build_kg_attributes(&b, &[], &t, &rng).unwrap();
        let want = recognize_linear_patterns(&ga, &b, &t, &opts).unwrap();
        opts.mode = RecognizeMode::Engine;
        for g in [&ga, &gb] {
            let got = recognize_linear_patterns(g, &b, &t, &opts).unwrap();
            assert_eq!(ids_of(&got), ids_of(&want));
        }
    }

    #[test]
    fn strict_listing_modes_keep_triples_apart() {
        let (t, rng, mut opts) = defaults();
        let b = branch_fixture();
        opts.mode = RecognizeMode::EngineStrict;
        let ga = build_kg_precomputed(&b, &[], &t, &rng).unwrap();
        let gb = build_kg_attributes(&b, &[], &t, &rng).unwrap();
        for g in [&ga, &gb] {
            let got = recognize_linear_patterns(g, &b, &t, &opts).unwrap();
            assert_eq!(
                ids_of(&got),
                vec![vec![0, 1, 2], vec![1, 2, 3], vec![3, 4, 5]]
            );
        }
    }

    #[test]
    fn engine_rejects_outer_edge_alignment() {
        let (t, rng, mut opts) = defaults();
        let b = branch_fixture();
        let g = build_kg_precomputed(&b, &[], &t, &rng).unwrap();
        opts.mode = RecognizeMode::Engine;
        opts.align_rule = AlignRule::OuterEdges;
        assert!(matches!(
            recognize_linear_patterns(&g, &b, &t, &opts),
            Err(PipelineError::InvalidOptions(_))
        ));
    }

    #[test]
    fn outer_edge_alignment_matches_on_plain_rows() {
        let (t, rng, mut opts) = defaults();
        let b = branch_fixture();
        let g = build_kg_precomputed(&b, &[], &t, &rng).unwrap();
        let want = recognize_linear_patterns(&g, &b, &t, &opts).unwrap();
        opts.align_rule = AlignRule::OuterEdges;
        let got = recognize_linear_patterns(&g, &b, &t, &opts).unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn gentle_zigzag_merges_into_one_ordered_row() {
        let (t, rng, opts) = defaults();
        let ys = [0.0, 0.5, -0.5, 0.5, 0.0];
        let b: Vec<BuildingRecord> = ys
            .iter()
            .enumerate()
            .map(|(i, &y)| rect(i as u64, 12.0 * i as f64, y, 8.0, 8.0))
            .collect();
        let g = build_kg_precomputed(&b, &[], &t, &rng).unwrap();
        let pats = recognize_linear_patterns(&g, &b, &t, &opts).unwrap();
        assert_eq!(ids_of(&pats), vec![vec![0, 1, 2, 3, 4]]);
        assert!(pats[0].strict_chain);
    }

    #[test]
    fn row_ordering_ignores_id_assignment() {
        let (t, rng, opts) = defaults();
        // Ids deliberately scrambled along the row; order must follow
        // geometry, endpoint with the smaller id first.
        let xs = [(7u64, 0.0), (1, 12.0), (9, 24.0), (2, 36.0), (5, 48.0)];
        let b: Vec<BuildingRecord> = xs
            .iter()
            .map(|&(id, x)| rect(id, x, 0.0, 8.0, 8.0))
            .collect();
        let g = build_kg_precomputed(&b, &[], &t, &rng).unwrap();
        let pats = recognize_linear_patterns(&g, &b, &t, &opts).unwrap();
        assert_eq!(ids_of(&pats), vec![vec![5, 2, 9, 1, 7]]);
    }

    #[test]
    fn perpendicular_neighbor_is_left_out() {
        let (t, rng, opts) = defaults();
        let mut b = vec![
            rect(0, 0.0, 0.0, 8.0, 8.0),
            rect(1, 12.0, 0.0, 8.0, 8.0),
            rect(2, 24.0, 0.0, 8.0, 8.0),
        ];
        b.push(rect(3, 12.0, 12.0, 8.0, 8.0));
        let g = build_kg_precomputed(&b, &[], &t, &rng).unwrap();
        let pats = recognize_linear_patterns(&g, &b, &t, &opts).unwrap();
        assert_eq!(ids_of(&pats), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn empty_graph_yields_no_patterns() {
        let (t, _, opts) = defaults();
        let pats = recognize_linear_patterns(&Graph::new(), &[], &t, &opts).unwrap();
        assert!(pats.is_empty());
    }

    #[test]
    fn vertical_rows_order_along_y() {
        let (t, rng, opts) = defaults();
        let b: Vec<BuildingRecord> = (0..4)
            .map(|i| rect(i as u64, 0.0, 14.0 * i as f64, 10.0, 6.0))
            .collect();
        let g = build_kg_precomputed(&b, &[], &t, &rng).unwrap();
        let pats = recognize_linear_patterns(&g, &b, &t, &opts).unwrap();
        assert_eq!(ids_of(&pats), vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn assemble_drops_duplicate_building_sets() {
        let b = vec![
            rect(1, 0.0, 0.0, 8.0, 8.0),
            rect(2, 12.0, 0.0, 8.0, 8.0),
            rect(3, 24.0, 0.0, 8.0, 8.0),
        ];
        let by_id = index_records(&b).unwrap();
        // The same building set through two different middles, as the
        // membership intersection can produce; neither aligns with the other.
        let triples = vec![
            TriplePattern {
                b_ids: [1, 2, 3],
                oris: [0.0, 0.0],
            },
            TriplePattern {
                b_ids: [1, 3, 2],
                oris: [0.0, 90.0],
            },
        ];
        let pats = assemble(&triples, &[], &by_id).unwrap();
        assert_eq!(ids_of(&pats), vec![vec![1, 2, 3]]);
    }

    #[test]
    fn gap_in_triple_cover_clears_strict_chain() {
        let b: Vec<BuildingRecord> = (1..=4)
            .map(|i| rect(i as u64, 10.0 * i as f64, 0.0, 8.0, 8.0))
            .collect();
        let by_id = index_records(&b).unwrap();
        let triples = vec![
            TriplePattern {
                b_ids: [1, 2, 3],
                oris: [0.0, 0.0],
            },
            TriplePattern {
                b_ids: [1, 2, 4],
                oris: [0.0, 0.0],
            },
        ];
        let pats = assemble(&triples, &[(0, 1)], &by_id).unwrap();
        assert_eq!(ids_of(&pats), vec![vec![1, 2, 3, 4]]);
        assert!(!pats[0].strict_chain);
    }

    #[test]
    fn modes_and_schemas_agree_on_jittered_rows() {
        let (t, rng_opts, _) = defaults();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut b = Vec::new();
        for row in 0..3 {
            for col in 0..8 {
                let id = (row * 8 + col) as u64;
                let x = 13.0 * col as f64 + rng.gen_range(-0.8..0.8);
                let y = 40.0 * row as f64 + rng.gen_range(-0.8..0.8);
                b.push(rect(id, x, y, 9.0, 6.0));
            }
        }
        let ga = build_kg_precomputed(&b, &[], &t, &rng_opts).unwrap();
        let gb = build_kg_attributes(&b, &[], &t, &rng_opts).unwrap();
        let mut opts = RecognizeOptions::default();
        let want = recognize_linear_patterns(&ga, &b, &t, &opts).unwrap();
        assert!(!want.is_empty());
        opts.mode = RecognizeMode::Engine;
        for g in [&ga, &gb] {
            let got = recognize_linear_patterns(g, &b, &t, &opts).unwrap();
            assert_eq!(got.iter().map(|p| &p.building_ids).collect::<Vec<_>>(),
                       want.iter().map(|p| &p.building_ids).collect::<Vec<_>>());
        }
        opts.mode = RecognizeMode::Direct;
        let on_b = recognize_linear_patterns(&gb, &b, &t, &opts).unwrap();
        assert_eq!(on_b, want);
    }

    #[test]
    fn duplicate_building_ids_are_refused() {
        let (t, _, opts) = defaults();
        let b = vec![rect(1, 0.0, 0.0, 8.0, 8.0), rect(1, 20.0, 0.0, 8.0, 8.0)];
        assert_eq!(
            recognize_linear_patterns(&Graph::new(), &b, &t, &opts).unwrap_err(),
            PipelineError::Proximity(ProximityError::DuplicateId(1))
        );
    }
}
