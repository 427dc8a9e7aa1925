//! Labeled Cayley multigraphs on the BFS closure of reduced generators
//! inside SL(2,p) or a product of such groups, plus girth, spectral and
//! expansion analyses.
//!
//! Group elements index into a dense table via an exact bijection
//! SL(2,p) -> [0, p^3 - p): matrices with a != 0 are keyed by (a,b,c) and
//! those with a = 0 by (b,d), which covers the group exactly once. This
//! keeps the p(p^2-1) ~ 10^6..10^7 regime in flat arrays with no hashing.

mod expansion;
mod girth;
mod spectral;

pub use expansion::{
    check_edge_monotonicity, expansion_exact, expansion_sampled, ExpansionMode,
    ExpansionReport, MonotonicityReport, SubsetPlan, EXACT_SUBSET_LIMIT,
};
pub use girth::{girth, GirthReport};
pub use spectral::{spectral_gap, SpectralReport, DENSE_CROSSCHECK_LIMIT};

use crate::reduction::{GeneratorImages, ModpMatrix};
use serde::Serialize;
use std::io::{self, Write};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CayleyError {
    #[error("projected group order {required} exceeds the vertex budget {budget}")]
    CapacityExceeded { required: u128, budget: usize },
    #[error("graph has {vertices} vertices, above the exhaustive-scan limit {limit}")]
    TooLarge { vertices: usize, limit: usize },
    #[error("graphs are not over the same vertex set")]
    VertexSetMismatch,
    #[error("invalid generating set: {0}")]
    BadGenerators(String),
}

/// A symmetric labeled generating multiset over one SL(2,p) or a product of
/// them: label i pairs with label `inv_label[i]`, and coincident images keep
/// their multiplicity.
#[derive(Debug, Clone)]
pub struct GenSet {
    primes: Vec<u64>,
    labels: Vec<String>,
    inv_label: Vec<u32>,
    /// mats[label][site]
    mats: Vec<Vec<ModpMatrix>>,
}

impl GenSet {
    /// The standard four-letter set {a, A, b, B} over a single prime.
    pub fn from_images(imgs: &GeneratorImages) -> Self {
        let p = imgs.mats[0].p;
        Self {
            primes: vec![p],
            labels: ["a", "A", "b", "B"].map(str::to_string).to_vec(),
            inv_label: vec![1, 0, 3, 2],
            mats: imgs.mats.iter().map(|&m| vec![m]).collect(),
        }
    }

    /// The four-letter set over a product group: one image quadruple per
    /// site, sites over pairwise distinct primes.
    pub fn from_crt_images(per_site: &[GeneratorImages]) -> Result<Self, CayleyError> {
        if per_site.is_empty() {
            return Err(CayleyError::BadGenerators("empty site list".into()));
        }
        let primes: Vec<u64> = per_site.iter().map(|g| g.mats[0].p).collect();
        for i in 0..primes.len() {
            for j in i + 1..primes.len() {
                if primes[i] == primes[j] {
                    return Err(CayleyError::BadGenerators(format!(
                        "repeated prime {} in product",
                        primes[i]
                    )));
                }
            }
        }
        Ok(Self {
            primes,
            labels: ["a", "A", "b", "B"].map(str::to_string).to_vec(),
            inv_label: vec![1, 0, 3, 2],
            mats: (0..4)
                .map(|l| per_site.iter().map(|g| g.mats[l]).collect())
                .collect(),
        })
    }

    /// Append a generator and its inverse as a fresh label pair (named
    /// `name` and the capitalised `name`).
    pub fn with_extra_pair(
        mut self,
        name: &str,
        mats: Vec<ModpMatrix>,
    ) -> Result<Self, CayleyError> {
        if mats.len() != self.primes.len()
            || mats.iter().zip(&self.primes).any(|(m, &p)| m.p != p)
        {
            return Err(CayleyError::BadGenerators(
                "extra generator does not match the site list".into(),
            ));
        }
        let k = self.labels.len() as u32;
        self.labels.push(name.to_string());
        self.labels.push(name.to_uppercase());
        self.inv_label.push(k + 1);
        self.inv_label.push(k);
        let inv: Vec<ModpMatrix> = mats.iter().map(ModpMatrix::inv).collect();
        self.mats.push(mats);
        self.mats.push(inv);
        Ok(self)
    }

    pub fn k(&self) -> usize {
        self.labels.len()
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    fn validate(&self) -> Result<(), CayleyError> {
        for (l, mats) in self.mats.iter().enumerate() {
            if mats.len() != self.primes.len() {
                return Err(CayleyError::BadGenerators("ragged site list".into()));
            }
            let inv = self.inv_label[l] as usize;
            for (s, m) in mats.iter().enumerate() {
                if m.p != self.primes[s] {
                    return Err(CayleyError::BadGenerators("mixed primes".into()));
                }
                if m.det() == 0 {
                    return Err(CayleyError::BadGenerators("singular generator".into()));
                }
                if self.mats[inv][s] != m.inv() {
                    return Err(CayleyError::BadGenerators(format!(
                        "label {} is not paired with its inverse",
                        self.labels[l]
                    )));
                }
            }
        }
        Ok(())
    }
}

pub fn sl2_order(p: u64) -> u64 {
    p * p * p - p
}

/// Bijection SL(2,p) -> [0, p^3 - p).
#[inline]
fn sl2_index(p: u64, e: &[u64; 4]) -> u64 {
    let [a, b, c, d] = *e;
    if a != 0 {
        ((a - 1) * p + b) * p + c
    } else {
        (p - 1) * p * p + (b - 1) * p + d
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CayleyGraph {
    desc: String,
    primes: Vec<u64>,
    vertex_count: usize,
    k_reg: usize,
    labels: Vec<String>,
    inv_label: Vec<u32>,
    #[serde(skip)]
    adj: Vec<u32>,
    #[serde(skip)]
    elems: Vec<u16>,
    #[serde(skip)]
    stride: usize,
    #[serde(skip)]
    index_of: Vec<u32>,
    surjective: bool,
    full_order: u128,
}

const ABSENT: u32 = u32::MAX;

impl CayleyGraph {
    /// BFS closure of the generating multiset from the identity, with
    /// right-multiplication edges labelled by generator. Vertex ids follow
    /// discovery order, so builds are deterministic.
    pub fn build(gens: &GenSet, vertex_budget: usize) -> Result<Self, CayleyError> {
        gens.validate()?;
        let sites = gens.primes.len();
        let orders: Vec<u64> = gens.primes.iter().map(|&p| sl2_order(p)).collect();
        let full_order: u128 = orders.iter().map(|&o| o as u128).product();
        if full_order > vertex_budget as u128 {
            return Err(CayleyError::CapacityExceeded {
                required: full_order,
                budget: vertex_budget,
            });
        }
        if gens.primes.iter().any(|&p| p >= u16::MAX as u64) {
            return Err(CayleyError::CapacityExceeded {
                required: full_order,
                budget: vertex_budget,
            });
        }
        let total = full_order as usize;
        let k = gens.k();
        let stride = 4 * sites;

        // strides[s] multiplies site s's canonical index in the global one
        let mut strides = vec![1u64; sites];
        for s in 1..sites {
            strides[s] = strides[s - 1] * orders[s - 1];
        }
        let global_index = |mats: &[[u64; 4]]| -> usize {
            mats.iter()
                .zip(&gens.primes)
                .zip(&strides)
                .map(|((m, &p), &st)| sl2_index(p, m) * st)
                .sum::<u64>() as usize
        };

        let mut index_of = vec![ABSENT; total];
        let mut elems: Vec<u16> = Vec::with_capacity(stride * 1024);
        let mut adj: Vec<u32> = Vec::with_capacity(k * 1024);

        let identity: Vec<[u64; 4]> = gens.primes.iter().map(|_| [1, 0, 0, 1]).collect();
        index_of[global_index(&identity)] = 0;
        for m in &identity {
            elems.extend(m.iter().map(|&x| x as u16));
        }

        let mut cursor = 0usize;
        let mut count = 1usize;
        let mut scratch: Vec<[u64; 4]> = identity.clone();
        while cursor < count {
            let base = cursor * stride;
            let cur: Vec<[u64; 4]> = (0..sites)
                .map(|s| {
                    let e = &elems[base + 4 * s..base + 4 * s + 4];
                    [e[0] as u64, e[1] as u64, e[2] as u64, e[3] as u64]
                })
                .collect();
            for l in 0..k {
                for s in 0..sites {
                    let p = gens.primes[s];
                    let g = &gens.mats[l][s].e;
                    let m = &cur[s];
                    scratch[s] = [
                        (m[0] * g[0] + m[1] * g[2]) % p,
                        (m[0] * g[1] + m[1] * g[3]) % p,
                        (m[2] * g[0] + m[3] * g[2]) % p,
                        (m[2] * g[1] + m[3] * g[3]) % p,
                    ];
                }
                let gi = global_index(&scratch);
                let mut id = index_of[gi];
                if id == ABSENT {
                    id = count as u32;
                    index_of[gi] = id;
                    for m in &scratch {
                        elems.extend(m.iter().map(|&x| x as u16));
                    }
                    count += 1;
                }
                adj.push(id);
            }
            cursor += 1;
        }

        let desc = if sites == 1 {
            format!("SL(2,{})", gens.primes[0])
        } else {
            gens.primes
                .iter()
                .map(|p| format!("SL(2,{p})"))
                .collect::<Vec<_>>()
                .join("x")
        };
        Ok(Self {
            desc,
            primes: gens.primes.clone(),
            vertex_count: count,
            k_reg: k,
            labels: gens.labels.clone(),
            inv_label: gens.inv_label.clone(),
            adj,
            elems,
            stride,
            index_of,
            surjective: count as u128 == full_order,
            full_order,
        })
    }

    /// Diagnostic: the cycle on n vertices as the Cayley graph of Z/n with
    /// labels {a, A} (2-regular; a double edge for n = 2).
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 2);
        let mut adj = Vec::with_capacity(2 * n);
        for v in 0..n {
            adj.push(((v + 1) % n) as u32);
            adj.push(((v + n - 1) % n) as u32);
        }
        Self::diagnostic(format!("C{n}"), n, vec!["a".into(), "A".into()], vec![1, 0], adj)
    }

    /// Diagnostic: the complete graph on n vertices as the Cayley graph of
    /// Z/n with every nonzero translation as a generator ((n-1)-regular).
    pub fn complete(n: usize) -> Self {
        assert!(n >= 2);
        let k = n - 1;
        let mut adj = Vec::with_capacity(k * n);
        for v in 0..n {
            for j in 0..k {
                adj.push(((v + j + 1) % n) as u32);
            }
        }
        let labels = (1..n).map(|j| format!("t{j}")).collect();
        let inv_label = (0..k).map(|j| (k - 1 - j) as u32).collect();
        Self::diagnostic(format!("K{n}"), n, labels, inv_label, adj)
    }

    fn diagnostic(
        desc: String,
        n: usize,
        labels: Vec<String>,
        inv_label: Vec<u32>,
        adj: Vec<u32>,
    ) -> Self {
        Self {
            desc,
            primes: Vec::new(),
            vertex_count: n,
            k_reg: labels.len(),
            labels,
            inv_label,
            adj,
            elems: (0..n as u16).collect(),
            stride: 1,
            index_of: (0..n as u32).collect(),
            surjective: true,
            full_order: n as u128,
        }
    }

    pub fn desc(&self) -> &str {
        &self.desc
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn k_reg(&self) -> usize {
        self.k_reg
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn inverse_label(&self, l: usize) -> usize {
        self.inv_label[l] as usize
    }

    #[inline]
    pub fn neighbor(&self, v: u32, slot: usize) -> u32 {
        self.adj[v as usize * self.k_reg + slot]
    }

    pub fn surjective(&self) -> bool {
        self.surjective
    }

    pub fn full_order(&self) -> u128 {
        self.full_order
    }

    /// Stored element data for a vertex (residues, 4 per site; the vertex
    /// value itself for diagnostic graphs).
    pub fn elem(&self, v: u32) -> &[u16] {
        let base = v as usize * self.stride;
        &self.elems[base..base + self.stride]
    }

    /// Vertex id of an element, if present in the closure.
    pub fn vertex_of(&self, elem: &[u16]) -> Option<u32> {
        if elem.len() != self.stride {
            return None;
        }
        let gi = if self.primes.is_empty() {
            elem[0] as usize
        } else {
            let mut acc = 0u64;
            let mut stride = 1u64;
            for (s, &p) in self.primes.iter().enumerate() {
                let e = [
                    elem[4 * s] as u64,
                    elem[4 * s + 1] as u64,
                    elem[4 * s + 2] as u64,
                    elem[4 * s + 3] as u64,
                ];
                acc += sl2_index(p, &e) * stride;
                stride *= sl2_order(p);
            }
            acc as usize
        };
        if gi >= self.index_of.len() {
            return None;
        }
        match self.index_of[gi] {
            ABSENT => None,
            id => Some(id),
        }
    }

    /// Edge list, one undirected labeled edge per line as "u v label".
    /// Paired labels print under the lowercase side; self-paired labels
    /// print each edge once from its smaller endpoint.
    pub fn export_edges<W: Write>(&self, mut w: W) -> io::Result<()> {
        for v in 0..self.vertex_count as u32 {
            for l in 0..self.k_reg {
                let inv = self.inv_label[l] as usize;
                let u = self.neighbor(v, l);
                let emit = if inv != l {
                    l < inv
                } else {
                    v <= u
                };
                if emit {
                    writeln!(w, "{} {} {}", v, u, self.labels[l])?;
                }
            }
        }
        Ok(())
    }
}
