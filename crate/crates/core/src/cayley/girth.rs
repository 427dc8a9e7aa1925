//! Girth as the length of the shortest nonempty freely reduced generator
//! word hitting the identity: a breadth-first search over (vertex, incoming
//! label) states that forbids immediate backtracking, returning on the
//! first arrival back at the basepoint. Vertex-transitivity makes the
//! basepoint irrelevant.

use super::CayleyGraph;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct GirthReport {
    pub girth: u32,
    /// Label indices of a witness word of length `girth`.
    pub witness_labels: Vec<u32>,
    /// The same witness spelled with the graph's label names.
    pub witness: String,
}

pub fn girth(g: &CayleyGraph) -> GirthReport {
    let k = g.k_reg();
    let n = g.vertex_count();

    // Arena of visited states in BFS order; parent pointers rebuild the
    // witness. State (v, l) packs to v*k + l; `seen` is a bitset over those.
    // Two words reaching the same state agree on everything that matters
    // for extensions (group element and last letter), so first arrival wins.
    let mut seen = vec![0u64; (n * k).div_ceil(64)];
    let mut arena: Vec<(u32, u32)> = Vec::new(); // (packed state, parent index)
    const NO_PARENT: u32 = u32::MAX;

    fn mark(seen: &mut [u64], state: usize) -> bool {
        let (w, b) = (state / 64, state % 64);
        let fresh = seen[w] & (1 << b) == 0;
        seen[w] |= 1 << b;
        fresh
    }

    for l in 0..k {
        let w = g.neighbor(0, l);
        if w == 0 {
            return report(g, vec![l as u32]);
        }
        let state = w as usize * k + l;
        if mark(&mut seen, state) {
            arena.push((state as u32, NO_PARENT));
        }
    }

    let mut cursor = 0usize;
    while cursor < arena.len() {
        let (state, _) = arena[cursor];
        let v = state as usize / k;
        let last = state as usize % k;
        let banned = g.inverse_label(last);
        for l in 0..k {
            if l == banned {
                continue;
            }
            let w = g.neighbor(v as u32, l);
            if w == 0 {
                let mut labels = unwind(&arena, cursor as u32, k);
                labels.push(l as u32);
                return report(g, labels);
            }
            let next = w as usize * k + l;
            if mark(&mut seen, next) {
                arena.push((next as u32, cursor as u32));
            }
        }
        cursor += 1;
    }
    unreachable!("a finite quotient always admits a reduced word hitting the identity");
}

fn unwind(arena: &[(u32, u32)], mut idx: u32, k: usize) -> Vec<u32> {
    let mut labels = Vec::new();
    loop {
        let (state, parent) = arena[idx as usize];
        labels.push(state % k as u32);
        if parent == u32::MAX {
            break;
        }
        idx = parent;
    }
    labels.reverse();
    labels
}

fn report(g: &CayleyGraph, labels: Vec<u32>) -> GirthReport {
    let witness = labels
        .iter()
        .map(|&l| g.labels()[l as usize].clone())
        .collect::<Vec<_>>()
        .join("");
    GirthReport { girth: labels.len() as u32, witness_labels: labels, witness }
}
