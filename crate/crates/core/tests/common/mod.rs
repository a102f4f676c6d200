//! Independent reference implementations used as test oracles.
//!
//! Nothing here calls into the library's hashing, path, scoring or ranking
//! code; the oracles only read public data structures.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use navgraph::env::{SiteSpec, StateSpec};
use navgraph::graph::{Action, InteractionGraph, NodeId, Role};

/// Straight transcription of the RFC 1321 reference algorithm.
pub fn md5_hex(input: &[u8]) -> String {
    const S: [u32; 64] = [
        7, 12, 17, 22, 7, 12, 17, 22, 7, 12, 17, 22, 7, 12, 17, 22, 5, 9, 14, 20, 5, 9, 14, 20, 5,
        9, 14, 20, 5, 9, 14, 20, 4, 11, 16, 23, 4, 11, 16, 23, 4, 11, 16, 23, 4, 11, 16, 23, 6, 10,
        15, 21, 6, 10, 15, 21, 6, 10, 15, 21, 6, 10, 15, 21,
    ];
    let k: Vec<u32> = (0..64)
        .map(|i| ((i as f64 + 1.0).sin().abs() * 4_294_967_296.0) as u32)
        .collect();
    let mut a0: u32 = 0x6745_2301;
    let mut b0: u32 = 0xefcd_ab89;
    let mut c0: u32 = 0x98ba_dcfe;
    let mut d0: u32 = 0x1032_5476;

    let mut msg = input.to_vec();
    let bit_len = (input.len() as u64).wrapping_mul(8);
    msg.push(0x80);
    while msg.len() % 64 != 56 {
        msg.push(0);
    }
    msg.extend_from_slice(&bit_len.to_le_bytes());

    for chunk in msg.chunks(64) {
        let m: Vec<u32> = chunk
            .chunks(4)
            .map(|w| u32::from_le_bytes([w[0], w[1], w[2], w[3]]))
            .collect();
        let (mut a, mut b, mut c, mut d) = (a0, b0, c0, d0);
        for i in 0..64 {
            let (f, g) = match i / 16 {
                0 => ((b & c) | (!b & d), i),
                1 => ((d & b) | (!d & c), (5 * i + 1) % 16),
                2 => (b ^ c ^ d, (3 * i + 5) % 16),
                _ => (c ^ (b | !d), (7 * i) % 16),
            };
            let f = f.wrapping_add(a).wrapping_add(k[i]).wrapping_add(m[g]);
            a = d;
            d = c;
            c = b;
            b = b.wrapping_add(f.rotate_left(S[i]));
        }
        a0 = a0.wrapping_add(a);
        b0 = b0.wrapping_add(b);
        c0 = c0.wrapping_add(c);
        d0 = d0.wrapping_add(d);
    }
    [a0, b0, c0, d0]
        .iter()
        .flat_map(|w| w.to_le_bytes())
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Lowercases scheme and host, drops the fragment.
pub fn oracle_normalize(url: &str) -> String {
    let url = url.split('#').next().unwrap_or("");
    match url.find("://") {
        Some(i) => {
            let rest = &url[i + 3..];
            let host_end = rest.find(['/', '?']).unwrap_or(rest.len());
            format!(
                "{}://{}{}",
                url[..i].to_lowercase(),
                rest[..host_end].to_lowercase(),
                &rest[host_end..]
            )
        }
        None => url.to_owned(),
    }
}

/// Identity of a spec state, computed from its xpaths and url.
pub fn oracle_state_id(state: &StateSpec) -> String {
    let mut digests: Vec<String> = state
        .elements
        .iter()
        .map(|e| md5_hex(e.xpath.as_bytes()))
        .collect();
    digests.sort();
    digests.dedup();
    let url = state.url.as_deref().map(oracle_normalize).unwrap_or_default();
    let mut payload = digests.concat();
    payload.push('|');
    payload.push_str(&url);
    md5_hex(payload.as_bytes())
}

/// Ids of every state reachable from the start with at most `depth` clicks
/// on non-external elements whose role is in `roles` and whose name does not
/// contain any of `blocked_names`.
pub fn oracle_reachable(
    spec: &SiteSpec,
    depth: u32,
    roles: &BTreeSet<Role>,
    blocked_names: &[&str],
) -> BTreeSet<String> {
    let by_id: HashMap<&str, &StateSpec> = spec.states.iter().map(|s| (s.id.as_str(), s)).collect();
    // every action sequence of length <= depth, folded by the state it ends in
    let mut seen: BTreeMap<&str, u32> = BTreeMap::new();
    let mut layer = vec![spec.start.as_str()];
    seen.insert(spec.start.as_str(), 0);
    for d in 1..=depth {
        let mut next = Vec::new();
        for s in layer {
            for e in &by_id[s].elements {
                if !roles.contains(&e.role) || e.external {
                    continue;
                }
                if blocked_names.iter().any(|b| e.name.contains(b)) {
                    continue;
                }
                let to = e.leads_to.as_deref().unwrap_or(s);
                if !seen.contains_key(to) {
                    seen.insert(to, d);
                    next.push(to);
                }
            }
        }
        layer = next;
    }
    seen.keys().map(|id| oracle_state_id(by_id[id])).collect()
}

pub fn default_roles() -> BTreeSet<Role> {
    [Role::Link, Role::Button, Role::Menuitem, Role::Tab].into()
}

/// Forward BFS over recorded edges plus a goto edge into every addressable
/// node.
pub fn oracle_distance(graph: &InteractionGraph, from: &NodeId, to: &NodeId) -> Option<usize> {
    let addressable: Vec<&NodeId> = graph
        .nodes()
        .filter(|n| n.url_addressable())
        .map(|n| n.id())
        .collect();
    let mut dist: HashMap<&NodeId, usize> = HashMap::from([(from, 0)]);
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        if x == to {
            return Some(dist[x]);
        }
        let d = dist[x];
        let succ = graph
            .edges()
            .filter(|e| &e.source == x)
            .map(|e| e.target)
            .collect::<Vec<_>>();
        for y in succ {
            let y = graph.node(&y).unwrap().id();
            if !dist.contains_key(y) {
                dist.insert(y, d + 1);
                queue.push_back(y);
            }
        }
        for y in &addressable {
            if !dist.contains_key(*y) {
                dist.insert(y, d + 1);
                queue.push_back(y);
            }
        }
    }
    None
}

/// Replays `steps` symbolically on the graph (gotos by url lookup).
pub fn oracle_walk(graph: &InteractionGraph, from: &NodeId, steps: &[Action]) -> Option<NodeId> {
    let mut at = from.clone();
    for a in steps {
        at = match a {
            Action::Goto { target_url } => graph
                .nodes()
                .find(|n| n.url_addressable() && n.url() == target_url)?
                .id()
                .clone(),
            Action::Click { .. } => graph
                .edges()
                .find(|e| e.source == at && &e.action == a)?
                .target,
        };
    }
    Some(at)
}

/// Nested-loop late-interaction score over row-major matrices.
pub fn oracle_maxsim(q: &[Vec<f64>], v: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    for qi in q {
        let mut best = f64::NEG_INFINITY;
        for vl in v {
            let mut dot = 0.0;
            for t in 0..qi.len() {
                dot += qi[t] * vl[t];
            }
            if dot > best {
                best = dot;
            }
        }
        total += best;
    }
    total / q.len() as f64
}

/// Full sort by descending score, ties by ascending id, then truncate.
pub fn oracle_topk(scored: &[(f64, String)], k: usize) -> Vec<String> {
    let mut all = scored.to_vec();
    all.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then_with(|| a.1.cmp(&b.1)));
    all.into_iter().take(k).map(|(_, id)| id).collect()
}
