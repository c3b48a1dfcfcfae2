//! Rule script texts. Threshold values are baked into the scripts at
//! render time; the files shipped under rules/ are exactly the rendered
//! defaults (a test keeps them in sync, `regenerate_rule_files` rewrites
//! them after a deliberate change).
//!
//! The operational recognition scripts differ from the published listing
//! in three normalizations: proximity and similarity chains match
//! undirected with a `B1.ID < B3.ID` guard (a directed chain cannot see
//! triples whose middle building has the largest or smallest id),
//! `apoc.coll.intersection` is spelled `list_intersection`, and the merge
//! closure walks the `Align_true` relation that the previous statement
//! actually creates. The `listing_*` scripts keep the published shape for
//! fidelity runs.

use crate::relations::Thresholds;

#[derive(Debug, Clone)]
pub struct RuleScripts {
    /// Full recognition over the precomputed relation schema.
    pub recognize_precomputed: String,
    /// Similarity derivation from building attributes.
    pub derive_relations: String,
    /// Recognition over the attribute schema; expects derived HAS_Sim.
    pub recognize_attributes: String,
    /// Published recognition rules, unnormalized.
    pub listing_strict: String,
    /// Published attribute-schema rules, unnormalized.
    pub listing_attributes: String,
}

pub fn render_scripts(t: &Thresholds) -> RuleScripts {
    RuleScripts {
        recognize_precomputed: recognize_precomputed(t),
        derive_relations: derive_relations(t),
        recognize_attributes: recognize_attributes(t),
        listing_strict: listing_strict(t),
        listing_attributes: listing_attributes(t),
    }
}

fn sim_predicate(a: &str, b: &str, t: &Thresholds) -> String {
    let (d1, d2, d3) = (t.delta1, t.delta2, t.delta3);
    format!(
        "(({a}.Area / {b}.Area <= {d1:?} AND {a}.Area / {b}.Area >= 1) OR ({b}.Area / {a}.Area <= {d1:?} AND {b}.Area / {a}.Area >= 1))\n  \
         AND (abs({a}.BOri - {b}.BOri) <= {d2:?} OR 180 - abs({a}.BOri - {b}.BOri) <= {d2:?})\n  \
         AND (({a}.EdgeCount / {b}.EdgeCount <= {d3:?} AND {a}.EdgeCount / {b}.EdgeCount >= 1) OR ({b}.EdgeCount / {a}.EdgeCount <= {d3:?} AND {b}.EdgeCount / {a}.EdgeCount >= 1))"
    )
}

fn str_predicate(t: &Thresholds) -> String {
    let (e1, e2, e3) = (t.eta1, t.eta2, t.eta3);
    format!(
        "(abs(rp1.EOri - rp2.EOri) <= {e1:?} OR 180 - abs(rp1.EOri - rp2.EOri) <= {e1:?})\n  \
         AND ((rp1.Length / rp2.Length <= {e2:?} AND rp1.Length / rp2.Length >= 1) OR (rp2.Length / rp1.Length <= {e2:?} AND rp2.Length / rp1.Length >= 1))\n  \
         AND rp1.FR >= {e3:?} AND rp2.FR >= {e3:?}"
    )
}

/// Alignment linking plus merge closure. The published form keeps the
/// apoc spelling and traverses Extend_true, which nothing creates.
fn align_tail(t: &Thresholds, intersection: &str, closure_rel: &str) -> String {
    let e1 = t.eta1;
    let cross = |a: usize, b: usize| {
        format!(
            "(abs(stLP2.OriList[{b}] - stLP1.OriList[{a}]) <= {e1:?} OR 180 - abs(stLP2.OriList[{b}] - stLP1.OriList[{a}]) <= {e1:?})"
        )
    };
    format!(
        "MATCH (stLP1:Triple_Pattern), (stLP2:Triple_Pattern)\n\
         WHERE stLP1 <> stLP2 AND size({intersection}(stLP1.bIDList, stLP2.bIDList)) >= 2\n  \
         AND {}\n  AND {}\n  AND {}\n  AND {}\n\
         CREATE (stLP1)-[:Align_true]->(stLP2)\n\
         MATCH resLP = (rLP1:Triple_Pattern)-[:{closure_rel}*0..]->(rLP2:Triple_Pattern)\n\
         RETURN resLP\n",
        cross(0, 1),
        cross(1, 1),
        cross(0, 0),
        cross(1, 0),
    )
}

fn recognize_precomputed(t: &Thresholds) -> String {
    format!(
        "// Rows of collinear buildings over the precomputed relation graph.\n\
         // Triple memberships live in pIDList; a shared entry across all three\n\
         // buildings marks a collinear triple.\n\
         MATCH (B1:Building)-[rp1:HAS_Proxi]-(B2:Building)-[rp2:HAS_Proxi]-(B3:Building),\n \
         (B1:Building)-[rs1:HAS_Sim]-(B2:Building)-[rs2:HAS_Sim]-(B3:Building)\n\
         WHERE B1.ID < B3.ID\n  \
         AND size(list_intersection(list_intersection(B1.pIDList, B2.pIDList), B3.pIDList)) > 0\n\
         WITH B1, B2, B3, rp1, rp2\n\
         MERGE (tLP:Triple_Pattern {{bIDList: [B1.ID, B2.ID, B3.ID], OriList: [rp1.EOri, rp2.EOri]}})\n\
         {}",
        align_tail(t, "list_intersection", "Align_true")
    )
}

fn derive_relations(t: &Thresholds) -> String {
    format!(
        "// Similarity relations derived from building attributes at query time.\n\
         MATCH (B1:Building)-[rp1:HAS_Proxi]->(B2:Building)\n\
         WHERE {}\n\
         CREATE (B1)-[r:HAS_Sim]->(B2)\n",
        sim_predicate("B1", "B2", t)
    )
}

fn recognize_attributes(t: &Thresholds) -> String {
    format!(
        "// Rows of collinear buildings over the attribute graph. Proximity edge\n\
         // properties replace precomputed memberships; similarity must have been\n\
         // derived beforehand.\n\
         MATCH (B1:Building)-[rp1:HAS_Proxi]-(B2:Building)-[rp2:HAS_Proxi]-(B3:Building),\n \
         (B1:Building)-[rs1:HAS_Sim]-(B2:Building)-[rs2:HAS_Sim]-(B3:Building)\n\
         WHERE B1.ID < B3.ID\n  \
         AND {}\n\
         WITH B1, B2, B3, rp1, rp2\n\
         MERGE (tLP:Triple_Pattern {{bIDList: [B1.ID, B2.ID, B3.ID], OriList: [rp1.EOri, rp2.EOri]}})\n\
         {}",
        str_predicate(t),
        align_tail(t, "list_intersection", "Align_true")
    )
}

fn listing_strict(t: &Thresholds) -> String {
    format!(
        "// The recognition rules in their published shape, for fidelity runs.\n\
         // Directed chains skip triples whose middle id is an extreme, and the\n\
         // closure walks Extend_true, which no statement creates, so merging\n\
         // never happens.\n\
         MATCH (B1:Building)-[rp1:HAS_Proxi]->(B2:Building)-[rp2:HAS_Proxi]->(B3:Building),\n \
         (B1:Building)-[rs1:HAS_Sim]->(B2:Building)-[rs2:HAS_Sim]->(B3:Building)\n\
         WHERE size(apoc.coll.intersection(apoc.coll.intersection(B1.pIDList, B2.pIDList), B3.pIDList)) > 0\n\
         WITH B1, B2, B3, rp1, rp2\n\
         MERGE (tLP:Triple_Pattern {{bIDList: [B1.ID, B2.ID, B3.ID], OriList: [rp1.EOri, rp2.EOri]}})\n\
         {}",
        align_tail(t, "apoc.coll.intersection", "Extend_true")
    )
}

fn listing_attributes(t: &Thresholds) -> String {
    format!(
        "// The attribute-schema rules in their published shape: similarity\n\
         // derivation, then linearly arranged triples reported directly.\n\
         MATCH (B1:Building)-[rp1:HAS_Proxi]->(B2:Building)\n\
         WHERE {}\n\
         CREATE (B1)-[r:HAS_Sim]->(B2)\n\
         MATCH (B1:Building)-[rp1:HAS_Proxi]->(B2:Building)-[rp2:HAS_Proxi]->(B3:Building)\n\
         WHERE {}\n\
         RETURN B1, B2, B3\n",
        sim_predicate("B1", "B2", t),
        str_predicate(t)
    )
}
