//! Index-free comparator: the same recognition computed by walking a plain
//! adjacency list, re-testing predicates at every visit, and merging
//! triples with a full pairwise scan. Serves as a second implementation
//! for equivalence checks and as the efficiency baseline.

use std::collections::{HashMap, HashSet};

use crate::geometry::Polyline;
use crate::proximity::{rng_build, BuildingRecord, ProximityEdge, RngOptions};
use crate::relations::{linear_triple, similarity, Thresholds};

use super::{
    assemble, cross_pairs_aligned, derive_triples, index_records, shared_count, LinearPattern,
    PipelineError, Schema, TriplePattern, UnionFind,
};

/// Adjacency-list proximity graph with per-edge attribute maps. Built once,
/// outside any timing; recognition traverses it without further indexes.
pub struct BaselineGraph {
    records: Vec<BuildingRecord>,
    adj: Vec<Vec<usize>>,
    attrs: HashMap<(usize, usize), ProximityEdge>,
    pre: Option<Precomputed>,
}

/// Relations stored up front for the precomputed-schema comparison.
struct Precomputed {
    sim: HashSet<(usize, usize)>,
    p_lists: Vec<Vec<i64>>,
}

impl BaselineGraph {
    pub fn build(
        buildings: &[BuildingRecord],
        roads: &[Polyline],
        t: &Thresholds,
        rng: &RngOptions,
        schema: Schema,
    ) -> Result<Self, PipelineError> {
        t.validate()?;
        let edges = rng_build(buildings, roads, rng)?;
        let by_id = index_records(buildings)?;
        let slot: HashMap<u64, usize> = buildings
            .iter()
            .enumerate()
            .map(|(i, b)| (b.id, i))
            .collect();
        let mut adj = vec![Vec::new(); buildings.len()];
        let mut attrs = HashMap::new();
        for e in &edges {
            let (a, b) = (slot[&e.i], slot[&e.j]);
            adj[a].push(b);
            adj[b].push(a);
            attrs.insert((a.min(b), a.max(b)), *e);
        }
        let pre = match schema {
            Schema::Attributes => None,
            Schema::Precomputed => {
                let mut sim = HashSet::new();
                for e in &edges {
                    if similarity(by_id[&e.i], by_id[&e.j], t).pass {
                        let (a, b) = (slot[&e.i], slot[&e.j]);
                        sim.insert((a.min(b), a.max(b)));
                    }
                }
                let triples = derive_triples(&edges, &by_id, t)?;
                let mut p_lists = vec![Vec::new(); buildings.len()];
                for (p, tp) in triples.iter().enumerate() {
                    for id in tp.b_ids {
                        p_lists[slot[&id]].push(p as i64);
                    }
                }
                Some(Precomputed { sim, p_lists })
            }
        };
        Ok(BaselineGraph {
            records: buildings.to_vec(),
            adj,
            attrs,
            pre,
        })
    }

    pub fn node_count(&self) -> usize {
        self.records.len()
    }

    pub fn edge_count(&self) -> usize {
        self.attrs.len()
    }

    /// The traversal proper: every building in turn is the middle of a
    /// candidate chain, neighbor pairs are tested on the spot, and the
    /// resulting triples are merged by comparing all pairs.
    pub fn recognize(&self, t: &Thresholds) -> Result<Vec<LinearPattern>, PipelineError> {
        let mut triples = Vec::new();
        for mid in 0..self.records.len() {
            let nbrs = &self.adj[mid];
            for x in 0..nbrs.len() {
                for y in x + 1..nbrs.len() {
                    let (mut a, mut b) = (nbrs[x], nbrs[y]);
                    if self.records[a].id > self.records[b].id {
                        std::mem::swap(&mut a, &mut b);
                    }
                    if !self.chain_passes(a, mid, b, t) {
                        continue;
                    }
                    let e_am = self.attrs[&(a.min(mid), a.max(mid))];
                    let e_mb = self.attrs[&(mid.min(b), mid.max(b))];
                    triples.push(TriplePattern {
                        b_ids: [
                            self.records[a].id,
                            self.records[mid].id,
                            self.records[b].id,
                        ],
                        oris: [e_am.e_ori, e_mb.e_ori],
                    });
                }
            }
        }
        triples.sort_by(|p, q| p.b_ids.cmp(&q.b_ids));

        let mut uf = UnionFind::new(triples.len());
        let mut links = Vec::new();
        for i in 0..triples.len() {
            for j in i + 1..triples.len() {
                if shared_count(&triples[i], &triples[j]) >= 2
                    && cross_pairs_aligned(&triples[i], &triples[j], t.eta1)
                {
                    links.push((i, j));
                    uf.union(i, j);
                }
            }
        }
        let by_id = index_records(&self.records)?;
        assemble(&triples, &links, &by_id)
    }

    fn chain_passes(&self, a: usize, mid: usize, b: usize, t: &Thresholds) -> bool {
        match &self.pre {
            Some(p) => {
                p.sim.contains(&(a.min(mid), a.max(mid)))
                    && p.sim.contains(&(mid.min(b), mid.max(b)))
                    && p.p_lists[a]
                        .iter()
                        .any(|id| p.p_lists[mid].contains(id) && p.p_lists[b].contains(id))
            }
            None => {
                similarity(&self.records[a], &self.records[mid], t).pass
                    && similarity(&self.records[mid], &self.records[b], t).pass
                    && linear_triple(
                        &self.attrs[&(a.min(mid), a.max(mid))],
                        &self.attrs[&(mid.min(b), mid.max(b))],
                        t,
                    )
                    .expect("chain edges share the middle building")
                    .pass
            }
        }
    }
}

/// One-shot recognition over footprints, no knowledge graph involved.
pub fn baseline_recognize(
    buildings: &[BuildingRecord],
    roads: &[Polyline],
    t: &Thresholds,
) -> Result<Vec<LinearPattern>, PipelineError> {
    BaselineGraph::build(buildings, roads, t, &RngOptions::default(), Schema::Attributes)?
        .recognize(t)
}
