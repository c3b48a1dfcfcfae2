//! In-memory property graph: labeled nodes, typed directed edges, property
//! maps, label and type indexes, per-node adjacency.
//!
//! Node and edge ids are dense and never reused; there is no deletion.
//! `merge_node` deduplicates on structural equality of labels and
//! properties via an internal key index, so merging is O(1) amortized.

use std::collections::{HashMap, VecDeque};
use std::io::{self, Write};

use thiserror::Error;

pub type NodeId = u32;
pub type EdgeId = u32;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("unknown node id {0}")]
    UnknownNode(NodeId),
    #[error("malformed path pattern: {0}")]
    InvalidPattern(&'static str),
}

/// Property value. Equality is structural and type-strict: `Int(3)` and
/// `Float(3.0)` are different values for storage purposes.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
    List(Vec<Value>),
}

impl Value {
    fn key_into(&self, out: &mut String) {
        use std::fmt::Write as _;
        match self {
            Value::Null => out.push('n'),
            Value::Bool(b) => {
                let _ = write!(out, "b{}", *b as u8);
            }
            Value::Int(i) => {
                let _ = write!(out, "i{i}");
            }
            Value::Float(f) => {
                let _ = write!(out, "f{:016x}", f.to_bits());
            }
            Value::Str(s) => {
                let _ = write!(out, "s{}:{s}", s.len());
            }
            Value::List(items) => {
                out.push('[');
                for it in items {
                    it.key_into(out);
                    out.push(',');
                }
                out.push(']');
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Null => serde_json::Value::Null,
            Value::Bool(b) => (*b).into(),
            Value::Int(i) => (*i).into(),
            Value::Float(f) => serde_json::Number::from_f64(*f)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Value::Str(s) => s.clone().into(),
            Value::List(items) => {
                serde_json::Value::Array(items.iter().map(Value::to_json).collect())
            }
        }
    }
}

pub type Props = std::collections::BTreeMap<String, Value>;

#[derive(Debug, Clone)]
pub struct Node {
    pub id: NodeId,
    /// Sorted, deduplicated.
    pub labels: Vec<String>,
    pub props: Props,
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub id: EdgeId,
    pub src: NodeId,
    pub dst: NodeId,
    pub etype: String,
    pub props: Props,
}

#[derive(Debug, Clone, Default)]
pub struct Graph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    label_index: HashMap<String, Vec<NodeId>>,
    etype_index: HashMap<String, Vec<EdgeId>>,
    out_adj: Vec<Vec<EdgeId>>,
    in_adj: Vec<Vec<EdgeId>>,
    merge_index: HashMap<String, NodeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    Out,
    In,
    Any,
}

/// Node slot of a path pattern: optional label requirement.
#[derive(Debug, Clone, Default)]
pub struct NodeSpec {
    pub label: Option<String>,
}

/// Relationship slot of a path pattern.
#[derive(Debug, Clone)]
pub struct RelSpec {
    pub etype: Option<String>,
    pub dir: Dir,
    /// `Some((min, max))` marks a variable-length hop; `max = None` is
    /// unbounded. Fixed single edges use `None`.
    pub hops: Option<(u32, Option<u32>)>,
}

#[derive(Debug, Clone)]
pub struct PathPattern {
    pub nodes: Vec<NodeSpec>,
    pub rels: Vec<RelSpec>,
}

/// One way the pattern maps onto the graph. Edge slots hold `None` where
/// the pattern position is variable-length.
#[derive(Debug, Clone, PartialEq)]
pub struct PathBinding {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<Option<EdgeId>>,
}

/// Condensation-based reachability, shared by all sources in a component.
struct ClosureMemo {
    comp: Vec<u32>,
    reach: Vec<Vec<NodeId>>,
}

/// Per-`match_path` memo of closures, keyed by relationship slot and walk
/// direction.
type ClosureCache = HashMap<(usize, bool), ClosureMemo>;

impl Graph {
    pub fn new() -> Self {
        Graph::default()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id as usize]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn nodes_with_label(&self, label: &str) -> &[NodeId] {
        self.label_index.get(label).map_or(&[], Vec::as_slice)
    }

    pub fn edges_with_type(&self, etype: &str) -> &[EdgeId] {
        self.etype_index.get(etype).map_or(&[], Vec::as_slice)
    }

    pub fn out_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.out_adj[v as usize]
    }

    pub fn in_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.in_adj[v as usize]
    }

    fn merge_key(labels: &[String], props: &Props) -> String {
        let mut key = String::new();
        for l in labels {
            key.push('#');
            key.push_str(l);
        }
        for (k, v) in props {
            key.push('|');
            key.push_str(k);
            key.push('=');
            v.key_into(&mut key);
        }
        key
    }

    pub fn add_node(&mut self, labels: Vec<String>, props: Props) -> NodeId {
        let mut labels = labels;
        labels.sort();
        labels.dedup();
        let id = self.nodes.len() as NodeId;
        for l in &labels {
            self.label_index.entry(l.clone()).or_default().push(id);
        }
        self.merge_index
            .entry(Self::merge_key(&labels, &props))
            .or_insert(id);
        self.nodes.push(Node { id, labels, props });
        self.out_adj.push(Vec::new());
        self.in_adj.push(Vec::new());
        id
    }

    /// Returns the id of an existing node carrying exactly these labels and
    /// structurally equal properties, or inserts one. The bool reports
    /// whether a node was created.
    pub fn merge_node(&mut self, labels: Vec<String>, props: Props) -> (NodeId, bool) {
        let mut sorted = labels;
        sorted.sort();
        sorted.dedup();
        let key = Self::merge_key(&sorted, &props);
        if let Some(&id) = self.merge_index.get(&key) {
            return (id, false);
        }
        (self.add_node(sorted, props), true)
    }

    pub fn add_edge(
        &mut self,
        src: NodeId,
        dst: NodeId,
        etype: impl Into<String>,
        props: Props,
    ) -> Result<EdgeId, GraphError> {
        for v in [src, dst] {
            if v as usize >= self.nodes.len() {
                return Err(GraphError::UnknownNode(v));
            }
        }
        let id = self.edges.len() as EdgeId;
        let etype = etype.into();
        self.etype_index.entry(etype.clone()).or_default().push(id);
        self.out_adj[src as usize].push(id);
        self.in_adj[dst as usize].push(id);
        self.edges.push(Edge {
            id,
            src,
            dst,
            etype,
            props,
        });
        Ok(id)
    }

    /// Nodes reachable from `start` over `etype` edges with a hop count in
    /// `[min, max]`; unbounded walks are capped at the node count, which is
    /// enough for reachability. Cycle-safe.
    pub fn reach_varlen(
        &self,
        start: NodeId,
        etype: Option<&str>,
        dir: Dir,
        min: u32,
        max: Option<u32>,
    ) -> Vec<NodeId> {
        let cap = max.unwrap_or(self.nodes.len() as u32);
        let mut out: Vec<NodeId> = Vec::new();
        let mut seen = vec![false; self.nodes.len()];
        let mut queue: VecDeque<(NodeId, u32)> = VecDeque::new();
        seen[start as usize] = true;
        queue.push_back((start, 0));
        while let Some((v, depth)) = queue.pop_front() {
            if depth >= min {
                out.push(v);
            }
            if depth == cap {
                continue;
            }
            for (_, w) in self.steps(v, etype, dir) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    queue.push_back((w, depth + 1));
                }
            }
        }
        out
    }

    /// Full reachability for unbounded zero-minimum walks, computed once
    /// per strongly connected component: every node of a component reaches
    /// the same set, so per-source BFS would redo identical work. Tarjan
    /// emits components sinks-first, which is exactly the order needed to
    /// fold successor sets upward.
    fn scc_closure(&self, etype: Option<&str>, dir: Dir) -> ClosureMemo {
        let n = self.nodes.len();
        let mut adj: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        for e in &self.edges {
            if etype.is_some_and(|t| e.etype != t) {
                continue;
            }
            if matches!(dir, Dir::Out | Dir::Any) {
                adj[e.src as usize].push(e.dst);
            }
            if matches!(dir, Dir::In | Dir::Any) {
                adj[e.dst as usize].push(e.src);
            }
        }

        let mut index = vec![u32::MAX; n];
        let mut low = vec![0u32; n];
        let mut on_stack = vec![false; n];
        let mut comp = vec![u32::MAX; n];
        let mut stack: Vec<NodeId> = Vec::new();
        let mut sccs: Vec<Vec<NodeId>> = Vec::new();
        let mut next_index = 0u32;
        let mut frames: Vec<(NodeId, usize)> = Vec::new();
        for root in 0..n as NodeId {
            if index[root as usize] != u32::MAX {
                continue;
            }
            index[root as usize] = next_index;
            low[root as usize] = next_index;
            next_index += 1;
            stack.push(root);
            on_stack[root as usize] = true;
            frames.push((root, 0));
            while let Some(frame) = frames.last_mut() {
                let v = frame.0;
                if let Some(&w) = adj[v as usize].get(frame.1) {
                    frame.1 += 1;
                    if index[w as usize] == u32::MAX {
                        index[w as usize] = next_index;
                        low[w as usize] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w as usize] = true;
                        frames.push((w, 0));
                    } else if on_stack[w as usize] {
                        low[v as usize] = low[v as usize].min(index[w as usize]);
                    }
                } else {
                    frames.pop();
                    if let Some(parent) = frames.last() {
                        let p = parent.0 as usize;
                        low[p] = low[p].min(low[v as usize]);
                    }
                    if low[v as usize] == index[v as usize] {
                        let mut members = Vec::new();
                        loop {
                            let w = stack.pop().expect("scc root still on stack");
                            on_stack[w as usize] = false;
                            comp[w as usize] = sccs.len() as u32;
                            members.push(w);
                            if w == v {
                                break;
                            }
                        }
                        members.sort_unstable();
                        sccs.push(members);
                    }
                }
            }
        }

        let mut succ: Vec<Vec<u32>> = vec![Vec::new(); sccs.len()];
        for (v, ns) in adj.iter().enumerate() {
            let cv = comp[v];
            for &w in ns {
                let cw = comp[w as usize];
                if cw != cv {
                    succ[cv as usize].push(cw);
                }
            }
        }
        // components come out below their successors, so one forward pass
        // sees every successor set already complete
        let mut reach: Vec<Vec<NodeId>> = Vec::with_capacity(sccs.len());
        for (c, members) in sccs.into_iter().enumerate() {
            let mut set = members;
            succ[c].sort_unstable();
            succ[c].dedup();
            for &s in &succ[c] {
                set.extend_from_slice(&reach[s as usize]);
            }
            set.sort_unstable();
            set.dedup();
            reach.push(set);
        }
        ClosureMemo { comp, reach }
    }

    /// Outgoing steps from `v` under the direction and type filter, as
    /// `(edge, neighbor)` pairs.
    fn steps<'a>(
        &'a self,
        v: NodeId,
        etype: Option<&'a str>,
        dir: Dir,
    ) -> impl Iterator<Item = (EdgeId, NodeId)> + 'a {
        let fwd = matches!(dir, Dir::Out | Dir::Any)
            .then(|| self.out_adj[v as usize].iter())
            .into_iter()
            .flatten()
            .map(move |&e| (e, self.edges[e as usize].dst));
        let back = matches!(dir, Dir::In | Dir::Any)
            .then(|| self.in_adj[v as usize].iter())
            .into_iter()
            .flatten()
            .map(move |&e| (e, self.edges[e as usize].src));
        fwd.chain(back)
            .filter(move |&(e, _)| etype.map_or(true, |t| self.edges[e as usize].etype == t))
    }

    fn node_matches(&self, v: NodeId, spec: &NodeSpec) -> bool {
        spec.label.as_ref().map_or(true, |l| {
            self.nodes[v as usize].labels.iter().any(|x| x == l)
        })
    }

    /// All assignments of the chain pattern. Enumeration starts from the
    /// position with the smallest candidate index (label index, or the
    /// whole node set when unlabeled) and expands along adjacency, never by
    /// pairing arbitrary nodes.
    pub fn match_path(&self, pat: &PathPattern) -> Result<Vec<PathBinding>, GraphError> {
        if pat.nodes.is_empty() || pat.nodes.len() != pat.rels.len() + 1 {
            return Err(GraphError::InvalidPattern(
                "pattern needs n node slots and n-1 relationship slots",
            ));
        }
        let count_for = |spec: &NodeSpec| -> usize {
            match &spec.label {
                Some(l) => self.nodes_with_label(l).len(),
                None => self.nodes.len(),
            }
        };
        let start = (0..pat.nodes.len())
            .min_by_key(|&p| count_for(&pat.nodes[p]))
            .unwrap();
        let seeds: Vec<NodeId> = match &pat.nodes[start].label {
            Some(l) => self.nodes_with_label(l).to_vec(),
            None => (0..self.nodes.len() as NodeId).collect(),
        };

        let mut out = Vec::new();
        let mut cache = ClosureCache::new();
        for seed in seeds {
            let mut nodes = vec![NodeId::MAX; pat.nodes.len()];
            let mut edges = vec![None; pat.rels.len()];
            nodes[start] = seed;
            self.extend_match(pat, start, start, &mut nodes, &mut edges, &mut cache, &mut out);
        }
        Ok(out)
    }

    /// Grows a partial assignment covering contiguous positions `lo..=hi`
    /// outward until the whole chain is bound.
    fn extend_match(
        &self,
        pat: &PathPattern,
        lo: usize,
        hi: usize,
        nodes: &mut Vec<NodeId>,
        edges: &mut Vec<Option<EdgeId>>,
        cache: &mut ClosureCache,
        out: &mut Vec<PathBinding>,
    ) {
        if lo == 0 && hi == pat.nodes.len() - 1 {
            out.push(PathBinding {
                nodes: nodes.clone(),
                edges: edges.clone(),
            });
            return;
        }
        // prefer extending right, then left
        if hi < pat.nodes.len() - 1 {
            let rel = &pat.rels[hi];
            let next = hi + 1;
            for (e, w) in self.candidate_steps(nodes[hi], rel, hi, false, cache) {
                if !self.node_matches(w, &pat.nodes[next]) {
                    continue;
                }
                if let Some(e) = e {
                    if edges.iter().flatten().any(|&b| b == e) {
                        continue; // relationship isomorphism
                    }
                }
                nodes[next] = w;
                edges[hi] = e;
                self.extend_match(pat, lo, next, nodes, edges, cache, out);
                nodes[next] = NodeId::MAX;
                edges[hi] = None;
            }
        } else if lo > 0 {
            let rel = &pat.rels[lo - 1];
            let prev = lo - 1;
            for (e, w) in self.candidate_steps(nodes[lo], rel, prev, true, cache) {
                if !self.node_matches(w, &pat.nodes[prev]) {
                    continue;
                }
                if let Some(e) = e {
                    if edges.iter().flatten().any(|&b| b == e) {
                        continue;
                    }
                }
                nodes[prev] = w;
                edges[prev] = e;
                self.extend_match(pat, prev, hi, nodes, edges, cache, out);
                nodes[prev] = NodeId::MAX;
                edges[prev] = None;
            }
        }
    }

    /// Steps compatible with a relationship slot, from one of its
    /// endpoints. `reverse` walks the slot from its right endpoint.
    /// Unbounded zero-minimum slots answer from the memoized closure; other
    /// hop ranges need depth tracking and fall back to the per-source walk.
    fn candidate_steps(
        &self,
        v: NodeId,
        rel: &RelSpec,
        slot: usize,
        reverse: bool,
        cache: &mut ClosureCache,
    ) -> Vec<(Option<EdgeId>, NodeId)> {
        let dir = match (rel.dir, reverse) {
            (Dir::Any, _) => Dir::Any,
            (d, false) => d,
            (Dir::Out, true) => Dir::In,
            (Dir::In, true) => Dir::Out,
        };
        match rel.hops {
            None => self
                .steps(v, rel.etype.as_deref(), dir)
                .map(|(e, w)| (Some(e), w))
                .collect(),
            Some((0, None)) => {
                let memo = cache
                    .entry((slot, reverse))
                    .or_insert_with(|| self.scc_closure(rel.etype.as_deref(), dir));
                memo.reach[memo.comp[v as usize] as usize]
                    .iter()
                    .map(|&w| (None, w))
                    .collect()
            }
            Some((min, max)) => self
                .reach_varlen(v, rel.etype.as_deref(), dir, min, max)
                .into_iter()
                .map(|w| (None, w))
                .collect(),
        }
    }

    /// Line-delimited JSON for debugging and diffing: one object per node,
    /// then one per edge, ids ascending, properties in key order.
    pub fn dump_jsonl(&self, w: &mut impl Write) -> io::Result<()> {
        for n in &self.nodes {
            writeln!(
                w,
                r#"{{"kind":"node","id":{},"labels":{},"props":{}}}"#,
                n.id,
                serde_json::to_string(&n.labels).expect("labels serialize"),
                props_json(&n.props),
            )?;
        }
        for e in &self.edges {
            writeln!(
                w,
                r#"{{"kind":"edge","id":{},"src":{},"dst":{},"etype":{},"props":{}}}"#,
                e.id,
                e.src,
                e.dst,
                serde_json::to_string(&e.etype).expect("etype serialize"),
                props_json(&e.props),
            )?;
        }
        Ok(())
    }
}

fn props_json(props: &Props) -> serde_json::Value {
    serde_json::Value::Object(
        props
            .iter()
            .map(|(k, v)| (k.clone(), v.to_json()))
            .collect(),
    )
}

/// Convenience constructor for property maps.
#[macro_export]
macro_rules! props {
    () => { $crate::property_graph::Props::new() };
    ($($k:expr => $v:expr),+ $(,)?) => {{
        let mut m = $crate::property_graph::Props::new();
        $(m.insert($k.to_string(), $v);)+
        m
    }};
}
