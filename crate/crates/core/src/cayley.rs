//! Cayley graphs of the additive group F_q^k and cycles on them.
//!
//! The group is elementary abelian: F_q^k with q = p^e is (Z_p)^{ke} under
//! addition, so "S generates F_q^k" is a rank condition on the flattened
//! GF(p) coordinates of S — scalar multiplication by field elements is not a
//! group operation and must not enter the check.
//!
//! Cycles are closed walks listed by their vertices, with the return to the
//! first vertex implicit; transition j is the difference of consecutive
//! vertices. A cycle is *balanced* when it leaves every vertex via each
//! occurring transition label the same number of times, a property
//! [`check_balanced`] verifies for arbitrary vertex sequences — including
//! ones whose transitions contain the zero vector, which show up as
//! self-loops when an array is restricted to a few of its rows.

use std::collections::BTreeMap;

use crate::gf::{field_from_order, FiniteField};
use crate::{Error, Result};

/// Cap on q^k for cycle construction.
const VERTEX_BUDGET: u64 = 1 << 24;
/// Cap on the number of edges an Eulerian cycle may have.
const EDGE_BUDGET: u64 = 1 << 26;
/// Cap on q^ℓ for balance checking (dense per-label count tables).
const BALANCE_BUDGET: u64 = 1 << 20;

/// A set of distinct nonzero vectors in F_q^k that generates it additively.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratingSet {
    q: u32,
    k: usize,
    elements: Vec<Vec<u32>>,
}

impl GeneratingSet {
    /// Validates distinctness, nonzeroness, and additive generation (full
    /// rank ke over GF(p) after flattening each GF(q) entry to its p-ary
    /// coordinates).
    pub fn new(q: u64, k: usize, elements: Vec<Vec<u32>>) -> Result<Self> {
        let field = field_from_order(q)?;
        if k == 0 {
            return Err(Error::DimensionMismatch("arity k must be ≥ 1".into()));
        }
        for v in &elements {
            if v.len() != k {
                return Err(Error::DimensionMismatch(format!(
                    "generator of length {} in F_{q}^{k}",
                    v.len()
                )));
            }
            for &c in v {
                if c as u64 >= q {
                    return Err(Error::Parse(format!("entry {c} out of range for GF({q})")));
                }
            }
            if v.iter().all(|&c| c == 0) {
                return Err(Error::Unsupported("zero vector in a generating set".into()));
            }
        }
        for i in 1..elements.len() {
            if elements[..i].contains(&elements[i]) {
                return Err(Error::Unsupported(format!(
                    "duplicate generator {:?}",
                    elements[i]
                )));
            }
        }
        if !spans_all(&field, k, &elements) {
            return Err(Error::Unsupported(
                "generators do not span F_q^k over the prime field".into(),
            ));
        }
        Ok(GeneratingSet {
            q: q as u32,
            k,
            elements,
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Vec<u32>] {
        &self.elements
    }
}

/// True when the flattened GF(p) coordinate vectors of `elements` span
/// (Z_p)^{ke}.
fn spans_all(field: &FiniteField, k: usize, elements: &[Vec<u32>]) -> bool {
    let p = field.characteristic();
    let e = field.extension_degree() as usize;
    let dim = k * e;
    let prime = crate::gf::field_create(p as u64, 1).expect("characteristic is prime");
    let mut rows: Vec<Vec<u32>> = elements
        .iter()
        .map(|v| {
            let mut flat = Vec::with_capacity(dim);
            for &c in v {
                flat.extend(field.coords(field.element_from_index(c as u64).expect("validated")));
            }
            flat
        })
        .collect();
    rank(&prime, &mut rows) == dim
}

fn rank(field: &FiniteField, mat: &mut [Vec<u32>]) -> usize {
    let rows = mat.len();
    if rows == 0 {
        return 0;
    }
    let cols = mat[0].len();
    let mut r = 0usize;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| mat[i][c] != 0) else {
            continue;
        };
        mat.swap(r, pr);
        let inv = field.inv_idx(mat[r][c]);
        for x in mat[r].iter_mut() {
            *x = field.mul_idx(*x, inv);
        }
        for i in 0..rows {
            if i != r && mat[i][c] != 0 {
                let f = mat[i][c];
                for cc in 0..cols {
                    let s = field.mul_idx(f, mat[r][cc]);
                    mat[i][cc] = field.sub_idx(mat[i][cc], s);
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// The standard generating set of F_q^k: for each coordinate position, the
/// fixed GF(p)-basis {1, α, …, α^{e−1}} of GF(q) placed in that coordinate
/// (position-major order), giving ke generators in total.
pub fn standard_generators(q: u64, k: usize) -> Result<GeneratingSet> {
    let field = field_from_order(q)?;
    let e = field.extension_degree() as usize;
    let p = field.characteristic();
    let mut elements = Vec::with_capacity(k * e);
    for i in 0..k {
        for t in 0..e {
            let mut v = vec![0u32; k];
            v[i] = p.pow(t as u32); // index of α^t in the packed encoding
            elements.push(v);
        }
    }
    GeneratingSet::new(q, k, elements)
}

/// A closed walk on F_q^k given by its vertex sequence; the return from the
/// last vertex to the first is implicit. Transitions are the consecutive
/// differences including that closing step, so they always sum to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    q: u32,
    k: usize,
    vertices: Vec<Vec<u32>>,
    transitions: Vec<Vec<u32>>,
}

impl Cycle {
    /// Wraps a vertex list, deriving transitions. The first vertex must be
    /// the zero vector.
    pub fn new(q: u64, k: usize, vertices: Vec<Vec<u32>>) -> Result<Self> {
        let field = field_from_order(q)?;
        if vertices.is_empty() {
            return Err(Error::DimensionMismatch("empty cycle".into()));
        }
        for v in &vertices {
            if v.len() != k {
                return Err(Error::DimensionMismatch(format!(
                    "vertex of length {} in F_{q}^{k}",
                    v.len()
                )));
            }
            for &c in v {
                if c as u64 >= q {
                    return Err(Error::Parse(format!("entry {c} out of range for GF({q})")));
                }
            }
        }
        if vertices[0].iter().any(|&c| c != 0) {
            return Err(Error::Unsupported(
                "cycles must start at the zero vector".into(),
            ));
        }
        let n = vertices.len();
        let transitions: Vec<Vec<u32>> = (0..n)
            .map(|j| {
                let from = &vertices[j];
                let to = &vertices[(j + 1) % n];
                (0..k).map(|i| field.sub_idx(to[i], from[i])).collect()
            })
            .collect();
        Ok(Cycle {
            q: q as u32,
            k,
            vertices,
            transitions,
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vec<u32>] {
        &self.vertices
    }

    /// Transition j (0-based) is vertices[j+1] − vertices[j], the last one
    /// closing back to the first vertex.
    pub fn transitions(&self) -> &[Vec<u32>] {
        &self.transitions
    }
}

/// Deterministic Eulerian cycle on the Cayley graph Γ(F_q^k, S) by
/// Hierholzer's algorithm: walks always consume the lowest-indexed unused
/// generator, and subtours are spliced in at the earliest position of the
/// circuit whose vertex still has unused edges. The result is a closed walk
/// from the zero vector using each directed edge (g, g+s) exactly once, of
/// length q^k·|S|.
pub fn eulerian_cycle(q: u64, k: usize, set: &GeneratingSet) -> Result<Cycle> {
    if set.q() as u64 != q || set.k() != k {
        return Err(Error::DimensionMismatch(format!(
            "generating set is over F_{}^{}, requested F_{q}^{k}",
            set.q(),
            set.k()
        )));
    }
    let field = field_from_order(q)?;
    let mut order = 1u64;
    for _ in 0..k {
        order = order.saturating_mul(q);
        if order > VERTEX_BUDGET {
            return Err(Error::BudgetExceeded(format!(
                "{q}^{k} vertices exceed the {VERTEX_BUDGET} cycle budget"
            )));
        }
    }
    let edges = order * set.len() as u64;
    if edges > EDGE_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "{edges} edges exceed the {EDGE_BUDGET} cycle budget"
        )));
    }
    let order = order as usize;
    let gens = set.elements();

    // vertices live as packed base-q indices; stepping along a generator
    // unpacks, adds coordinatewise, repacks
    let step = |packed: usize, g: &[u32]| -> usize {
        let mut rest = packed;
        let mut out = 0usize;
        let mut mult = 1usize;
        for gc in g.iter().take(k) {
            let c = (rest % q as usize) as u32;
            rest /= q as usize;
            out += field.add_idx(c, *gc) as usize * mult;
            mult *= q as usize;
        }
        out
    };

    // next unused generator index per vertex
    let mut next_gen = vec![0u16; order];
    // singly linked circuit: node i holds (vertex, next node); usize::MAX ends
    let mut node_vertex: Vec<usize> = Vec::with_capacity(edges as usize);
    let mut node_next: Vec<usize> = Vec::with_capacity(edges as usize);

    // grow a walk from `start`, consuming lowest-index generators until stuck
    // (necessarily back at `start`); returns the chain of nodes *after* the
    // start vertex, ending with the node for the return to `start`.
    let walk = |start: usize,
                    next_gen: &mut Vec<u16>,
                    node_vertex: &mut Vec<usize>,
                    node_next: &mut Vec<usize>|
     -> Option<(usize, usize)> {
        if next_gen[start] as usize >= gens.len() {
            return None;
        }
        let mut chain_head = usize::MAX;
        let mut chain_tail = usize::MAX;
        let mut cur = start;
        loop {
            let g = next_gen[cur] as usize;
            if g >= gens.len() {
                break;
            }
            next_gen[cur] += 1;
            let nxt = step(cur, &gens[g]);
            let node = node_vertex.len();
            node_vertex.push(nxt);
            node_next.push(usize::MAX);
            if chain_head == usize::MAX {
                chain_head = node;
            } else {
                node_next[chain_tail] = node;
            }
            chain_tail = node;
            cur = nxt;
        }
        debug_assert_eq!(cur, start, "walks on balanced digraphs end where they start");
        Some((chain_head, chain_tail))
    };

    // initial circuit from the zero vertex; its walk closes back onto vertex
    // 0, duplicating the head, so that final node is trimmed (the closing
    // step stays implicit in the Cycle type)
    let head = {
        node_vertex.push(0);
        node_next.push(usize::MAX);
        0usize
    };
    if let Some((h, _)) = walk(0, &mut next_gen, &mut node_vertex, &mut node_next) {
        node_next[head] = h;
    }
    trim_final_duplicate(head, &mut node_vertex, &mut node_next);

    // scan the circuit, splicing subtours at the earliest vertex with edges
    let mut cur = head;
    while cur != usize::MAX {
        let v = node_vertex[cur];
        if (next_gen[v] as usize) < gens.len() {
            if let Some((h, t)) = walk(v, &mut next_gen, &mut node_vertex, &mut node_next) {
                // subtour chain ends with a node for `v` itself; keep it —
                // it becomes the continuation point — and splice: cur → h …
                // t(=v) → old next
                let old_next = node_next[cur];
                node_next[cur] = h;
                node_next[t] = old_next;
            }
        } else {
            cur = node_next[cur];
        }
    }

    // collect
    let mut packed = Vec::with_capacity(edges as usize);
    let mut cur = head;
    while cur != usize::MAX {
        packed.push(node_vertex[cur]);
        cur = node_next[cur];
    }
    debug_assert_eq!(packed.len(), edges as usize, "Eulerian circuit uses every edge");

    let unpack = |mut idx: usize| -> Vec<u32> {
        (0..k)
            .map(|_| {
                let c = (idx % q as usize) as u32;
                idx /= q as usize;
                c
            })
            .collect()
    };
    Cycle::new(q, k, packed.into_iter().map(unpack).collect())
}

/// The initial walk closes back onto the start vertex, leaving one node that
/// duplicates it at the tail; remove that node so the circuit lists each
/// visit exactly once (the closing step stays implicit).
fn trim_final_duplicate(head: usize, node_vertex: &[usize], node_next: &mut [usize]) {
    let mut prev = usize::MAX;
    let mut cur = head;
    while node_next[cur] != usize::MAX {
        prev = cur;
        cur = node_next[cur];
    }
    if prev != usize::MAX && node_vertex[cur] == node_vertex[head] {
        node_next[prev] = usize::MAX;
    }
}

/// One departure-count discrepancy found by [`check_balanced`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalanceViolation {
    pub vertex: Vec<u32>,
    pub label: Vec<u32>,
    pub count: u64,
    pub expected: u64,
}

/// Verdict of [`check_balanced`].
#[derive(Clone, Debug)]
pub struct BalanceReport {
    /// All labels depart every vertex uniformly, the labels generate the
    /// group, and every vertex is visited.
    pub balanced: bool,
    /// Per-vertex departure count μ_s for each distinct transition label
    /// (the uniform count when balanced, the rounded average otherwise).
    pub mu: BTreeMap<Vec<u32>, u64>,
    pub violations: Vec<BalanceViolation>,
    /// Transition labels span F_q^ℓ over the prime field.
    pub generates: bool,
    /// Every vector of F_q^ℓ occurs in the vertex sequence.
    pub covers_all_vertices: bool,
}

/// Balance check for an arbitrary closed walk over F_q^ℓ, read with
/// wraparound from the last vertex back to the first. For every vertex g and
/// every distinct transition label s (the zero label included, which arises
/// as a self-loop when restricting arrays), the count of departures of g via
/// s must equal a vertex-independent μ_s ≥ 1; additionally the labels must
/// generate F_q^ℓ additively and every group element must appear.
pub fn check_balanced(q: u64, vertices: &[Vec<u32>]) -> Result<BalanceReport> {
    if vertices.is_empty() {
        return Err(Error::DimensionMismatch("empty vertex sequence".into()));
    }
    let ell = vertices[0].len();
    let field = field_from_order(q)?;
    let mut order = 1u64;
    for _ in 0..ell {
        order = order.saturating_mul(q);
        if order > BALANCE_BUDGET {
            return Err(Error::BudgetExceeded(format!(
                "{q}^{ell} vertices exceed the {BALANCE_BUDGET} balance-check budget"
            )));
        }
    }
    for v in vertices {
        if v.len() != ell {
            return Err(Error::DimensionMismatch("ragged vertex sequence".into()));
        }
        for &c in v {
            if c as u64 >= q {
                return Err(Error::Parse(format!("entry {c} out of range for GF({q})")));
            }
        }
    }

    let n = vertices.len();
    let pack = |v: &[u32]| -> u64 {
        v.iter()
            .rev()
            .fold(0u64, |acc, &c| acc * q + c as u64)
    };
    let unpack = |mut idx: u64| -> Vec<u32> {
        (0..ell)
            .map(|_| {
                let c = (idx % q) as u32;
                idx /= q;
                c
            })
            .collect()
    };

    // label id → per-vertex departure counts
    let mut label_ids: BTreeMap<u64, usize> = BTreeMap::new();
    let mut counts: Vec<Vec<u64>> = Vec::new();
    let mut visited = vec![false; order as usize];
    for j in 0..n {
        let from = &vertices[j];
        let to = &vertices[(j + 1) % n];
        let label: Vec<u32> = (0..ell).map(|i| field.sub_idx(to[i], from[i])).collect();
        let lid = *label_ids.entry(pack(&label)).or_insert_with(|| {
            counts.push(vec![0u64; order as usize]);
            counts.len() - 1
        });
        let fid = pack(from) as usize;
        counts[lid][fid] += 1;
        visited[fid] = true;
    }

    let covers_all_vertices = visited.iter().all(|&b| b);

    // generation: flattened nonzero labels must span (Z_p)^{ℓe}
    let nonzero_labels: Vec<Vec<u32>> = label_ids
        .keys()
        .filter(|&&packed| packed != 0)
        .map(|&packed| unpack(packed))
        .collect();
    let generates = spans_all(&field, ell, &nonzero_labels);

    let mut mu = BTreeMap::new();
    let mut violations = Vec::new();
    for (&packed, &lid) in &label_ids {
        let label = unpack(packed);
        let total: u64 = counts[lid].iter().sum();
        // nearest-integer average as the expected uniform count
        let expected = (total + order / 2) / order;
        mu.insert(label.clone(), expected);
        for (fid, &count) in counts[lid].iter().enumerate() {
            if count != expected {
                violations.push(BalanceViolation {
                    vertex: unpack(fid as u64),
                    label: label.clone(),
                    count,
                    expected,
                });
            }
        }
    }
    let positive = mu.values().all(|&m| m >= 1);
    let balanced = violations.is_empty() && generates && covers_all_vertices && positive;
    Ok(BalanceReport {
        balanced,
        mu,
        violations,
        generates,
        covers_all_vertices,
    })
}
