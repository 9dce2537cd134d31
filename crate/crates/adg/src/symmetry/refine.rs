//! Ordered-partition refinement on a compact adjacency view.
//!
//! A partition keeps its cells as contiguous segments of a vertex array;
//! a vertex's color is the start index of its cell. Splits reorder only
//! inside the split segment and order fragments by ascending splitter
//! count, so the whole evolution is label-invariant: isomorphic
//! configurations produce identical cell structures position for
//! position. Refinement is worklist-driven — only cells touched by a
//! splitter are recounted — which keeps deep search trees affordable.

use crate::adgraph::AdGraph;
use crate::metrics::{r3_vertex_invariant, Adjacency, ListGraph};

/// Immutable search view of a graph: CSR adjacency with sorted rows, a
/// side bit per vertex and a label-invariant key per vertex.
pub(crate) struct SearchGraph {
    pub n: usize,
    pub offsets: Vec<u32>,
    pub neighbors: Vec<u32>,
    pub side: Vec<u8>,
    /// (side, r₃)-style invariant key; the basis of the initial coloring.
    pub key: Vec<(u8, u64)>,
}

impl SearchGraph {
    /// Adjacency plus the (side, r₃) invariant keys.
    pub fn from_adgraph(graph: &AdGraph) -> SearchGraph {
        let mut sg = SearchGraph::from_adgraph_adjacency(graph);
        let r3 = r3_vertex_invariant(graph);
        sg.key = (0..sg.n).map(|v| (sg.side[v], r3[v])).collect();
        sg
    }

    /// Adjacency only; keys default to the side bit.
    pub fn from_adgraph_adjacency(graph: &AdGraph) -> SearchGraph {
        let n = graph.vertex_count();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::with_capacity(n * graph.q() as usize);
        let mut side = Vec::with_capacity(n);
        let mut buf = Vec::new();
        offsets.push(0);
        for v in 0..n as u32 {
            graph.neighbor_ids_into(v, &mut buf);
            buf.sort_unstable();
            neighbors.extend_from_slice(&buf);
            offsets.push(neighbors.len() as u32);
            side.push(graph.side_of_id(v) as u8);
        }
        let key = side.iter().map(|&s| (s, 0)).collect();
        SearchGraph {
            n,
            offsets,
            neighbors,
            side,
            key,
        }
    }

    /// Same adjacency with the bipartition sides flipped in the invariant
    /// key; an isomorphism onto this view is a side-swapping automorphism.
    pub fn side_swapped(&self) -> SearchGraph {
        SearchGraph {
            n: self.n,
            offsets: self.offsets.clone(),
            neighbors: self.neighbors.clone(),
            side: self.side.iter().map(|&s| 1 - s).collect(),
            key: self.key.iter().map(|&(s, r)| (1 - s, r)).collect(),
        }
    }

    pub fn from_list(graph: &ListGraph) -> SearchGraph {
        let n = graph.vertex_count();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::new();
        offsets.push(0);
        let mut buf = Vec::new();
        for v in 0..n as u32 {
            graph.neighbors_into(v, &mut buf);
            buf.sort_unstable();
            neighbors.extend_from_slice(&buf);
            offsets.push(neighbors.len() as u32);
        }
        // degree as the only a-priori invariant
        let key = (0..n)
            .map(|v| (0u8, (offsets[v + 1] - offsets[v]) as u64))
            .collect();
        SearchGraph {
            n,
            offsets,
            neighbors,
            side: vec![0; n],
            key,
        }
    }

    #[inline]
    pub fn row(&self, v: u32) -> &[u32] {
        &self.neighbors[self.offsets[v as usize] as usize..self.offsets[v as usize + 1] as usize]
    }

    #[inline]
    pub fn adjacent(&self, u: u32, v: u32) -> bool {
        self.row(u).binary_search(&v).is_ok()
    }

    /// Applies a candidate vertex map and checks edge preservation in
    /// both directions against `other`.
    pub fn is_isomorphism_onto(&self, other: &SearchGraph, map: &[u32]) -> bool {
        if map.len() != self.n || other.n != self.n {
            return false;
        }
        let mut seen = vec![false; self.n];
        for &im in map {
            if im as usize >= self.n || seen[im as usize] {
                return false;
            }
            seen[im as usize] = true;
        }
        let mut image: Vec<u32> = Vec::new();
        for v in 0..self.n as u32 {
            image.clear();
            image.extend(self.row(v).iter().map(|&w| map[w as usize]));
            image.sort_unstable();
            if image != other.row(map[v as usize]) {
                return false;
            }
        }
        true
    }
}

/// An ordered partition of the vertices into contiguous cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Partition {
    /// Vertices arranged cell by cell.
    order: Vec<u32>,
    /// Position of each vertex in `order`.
    pos_of: Vec<u32>,
    /// Cell start index per vertex — the canonical color.
    cell_of: Vec<u32>,
    /// End (exclusive) of the cell with the given start; meaningful only
    /// at start indices.
    cell_end: Vec<u32>,
}

impl Partition {
    /// Initial partition grouped by the graph's invariant keys, ordered
    /// by key value. Two graphs with equal key multisets get positionally
    /// corresponding cells, so colors are comparable across them.
    pub fn from_keys(g: &SearchGraph) -> Partition {
        let n = g.n;
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_by_key(|&v| (g.key[v as usize], v));
        let mut pos_of = vec![0u32; n];
        let mut cell_of = vec![0u32; n];
        let mut cell_end = vec![0u32; n];
        let mut start = 0usize;
        while start < n {
            let key = g.key[order[start] as usize];
            let mut end = start + 1;
            while end < n && g.key[order[end] as usize] == key {
                end += 1;
            }
            for i in start..end {
                pos_of[order[i] as usize] = i as u32;
                cell_of[order[i] as usize] = start as u32;
            }
            cell_end[start] = end as u32;
            start = end;
        }
        Partition {
            order,
            pos_of,
            cell_of,
            cell_end,
        }
    }

    /// Vertex occupying position i; when the partition is discrete this
    /// is the canonical labeling.
    #[inline]
    pub fn vertex_at(&self, i: u32) -> u32 {
        self.order[i as usize]
    }

    #[inline]
    pub fn position_of(&self, v: u32) -> u32 {
        self.pos_of[v as usize]
    }

    #[inline]
    pub fn cell_size(&self, start: u32) -> u32 {
        self.cell_end[start as usize] - start
    }

    /// Members of the cell with the given start, sorted by vertex id.
    pub fn cell_members(&self, start: u32) -> Vec<u32> {
        let mut members: Vec<u32> =
            self.order[start as usize..self.cell_end[start as usize] as usize].to_vec();
        members.sort_unstable();
        members
    }

    /// Cell start indices in positional order.
    pub fn cell_starts(&self) -> Vec<u32> {
        let mut starts = Vec::new();
        let mut s = 0u32;
        while (s as usize) < self.order.len() {
            starts.push(s);
            s = self.cell_end[s as usize];
        }
        starts
    }

    /// Cell sizes in positional order — the label-invariant shape used
    /// for cross-branch pruning.
    pub fn size_sequence(&self) -> Vec<u32> {
        self.cell_starts()
            .iter()
            .map(|&s| self.cell_end[s as usize] - s)
            .collect()
    }

    /// Allocation-free comparison against a stored size sequence.
    pub fn shape_matches(&self, expect: &[u32]) -> bool {
        let n = self.order.len() as u32;
        let mut s = 0u32;
        let mut i = 0usize;
        while s < n {
            let e = self.cell_end[s as usize];
            if i >= expect.len() || expect[i] != e - s {
                return false;
            }
            i += 1;
            s = e;
        }
        i == expect.len()
    }

    /// Appends the vertices of all singleton cells (in positional order)
    /// to `out` without allocating.
    pub fn singleton_vertices_into(&self, out: &mut Vec<u32>) {
        out.clear();
        let n = self.order.len() as u32;
        let mut s = 0u32;
        while s < n {
            let e = self.cell_end[s as usize];
            if e - s == 1 {
                out.push(self.order[s as usize]);
            }
            s = e;
        }
    }

    pub fn is_discrete(&self) -> bool {
        self.cell_starts()
            .iter()
            .all(|&s| self.cell_end[s as usize] == s + 1)
    }

    /// The target cell (lowest start among the smallest non-singleton
    /// cells): its start and its members sorted by vertex id; None when
    /// the partition is discrete.
    pub fn target_cell(&self) -> Option<(u32, Vec<u32>)> {
        let n = self.order.len() as u32;
        let mut best: Option<(u32, u32)> = None; // (size, start)
        let mut s = 0u32;
        while s < n {
            let e = self.cell_end[s as usize];
            let size = e - s;
            if size > 1 && best.map_or(true, |(bs, _)| size < bs) {
                best = Some((size, s));
            }
            s = e;
        }
        let (_, s) = best?;
        Some((s, self.cell_members(s)))
    }

    /// Splits {v} off the front of its cell. Returns the two fragment
    /// starts for seeding refinement (second absent when the cell was
    /// already a singleton).
    pub fn individualize(&mut self, v: u32) -> (u32, Option<u32>) {
        let s = self.cell_of[v as usize];
        let e = self.cell_end[s as usize];
        if e - s == 1 {
            return (s, None);
        }
        let pv = self.pos_of[v as usize];
        let other = self.order[s as usize];
        self.order.swap(s as usize, pv as usize);
        self.pos_of[v as usize] = s;
        self.pos_of[other as usize] = pv;
        // fragment {v} keeps start s; the rest starts at s+1
        self.cell_end[s as usize] = s + 1;
        self.cell_end[s as usize + 1] = e;
        for i in (s + 1)..e {
            self.cell_of[self.order[i as usize] as usize] = s + 1;
        }
        (s, Some(s + 1))
    }

    /// Worklist-driven refinement to the coarsest equitable partition
    /// finer than the current one. `seeds` are cell starts to start
    /// from; pass all starts for a full refinement.
    pub fn refine(&mut self, g: &SearchGraph, seeds: &[u32]) {
        let n = self.order.len();
        let mut queue: std::collections::VecDeque<u32> = seeds.iter().copied().collect();
        let mut queued = vec![false; n];
        for &s in seeds {
            queued[s as usize] = true;
        }
        let mut cnt = vec![0u32; n];
        let mut touched: Vec<u32> = Vec::new();
        let mut splitter: Vec<u32> = Vec::new();
        while let Some(s) = queue.pop_front() {
            queued[s as usize] = false;
            splitter.clear();
            splitter
                .extend_from_slice(&self.order[s as usize..self.cell_end[s as usize] as usize]);
            for &u in &splitter {
                for &w in g.row(u) {
                    if cnt[w as usize] == 0 {
                        touched.push(w);
                    }
                    cnt[w as usize] += 1;
                }
            }
            // affected cells, ascending for determinism
            let mut affected: Vec<u32> = touched
                .iter()
                .map(|&w| self.cell_of[w as usize])
                .collect();
            affected.sort_unstable();
            affected.dedup();
            for c in affected {
                let (cs, ce) = (c, self.cell_end[c as usize]);
                if ce - cs == 1 {
                    continue;
                }
                // order members by splitter count; equal counts stay together
                let members = &mut self.order[cs as usize..ce as usize];
                members.sort_by_key(|&v| (cnt[v as usize], v));
                let mut any_split = false;
                {
                    let first = cnt[members[0] as usize];
                    let last = cnt[members[members.len() - 1] as usize];
                    if first != last {
                        any_split = true;
                    }
                }
                if !any_split {
                    // positions may have moved; restore bookkeeping
                    for (off, &v) in self.order[cs as usize..ce as usize].iter().enumerate() {
                        self.pos_of[v as usize] = cs + off as u32;
                    }
                    continue;
                }
                // fragment boundaries where the count changes
                let mut frags: Vec<u32> = Vec::with_capacity(4);
                let mut frag_start = cs;
                let mut prev = cnt[self.order[cs as usize] as usize];
                for i in cs..=ce {
                    let boundary = i == ce || cnt[self.order[i as usize] as usize] != prev;
                    if boundary {
                        self.cell_end[frag_start as usize] = i;
                        for j in frag_start..i {
                            let v = self.order[j as usize];
                            self.pos_of[v as usize] = j;
                            self.cell_of[v as usize] = frag_start;
                        }
                        frags.push(frag_start);
                        if i < ce {
                            frag_start = i;
                            prev = cnt[self.order[i as usize] as usize];
                        }
                    }
                }
                // enqueue fragments; the largest may be skipped unless the
                // parent cell was itself pending (Hopcroft's rule)
                let parent_pending = queued[c as usize];
                let largest = frags
                    .iter()
                    .copied()
                    .max_by_key(|&f| self.cell_end[f as usize] - f)
                    .unwrap();
                for &f in &frags {
                    if !parent_pending && f == largest {
                        continue;
                    }
                    if !queued[f as usize] {
                        queued[f as usize] = true;
                        queue.push_back(f);
                    }
                }
            }
            for &w in &touched {
                cnt[w as usize] = 0;
            }
            touched.clear();
        }
    }

    /// Full refinement from scratch (every cell seeds the worklist).
    pub fn refine_all(&mut self, g: &SearchGraph) {
        let starts = self.cell_starts();
        self.refine(g, &starts);
    }

    /// Individualizes v and refines from the two fragments.
    pub fn individualize_and_refine(&mut self, g: &SearchGraph, v: u32) {
        let (a, b) = self.individualize(v);
        let mut seeds = vec![a];
        if let Some(b) = b {
            seeds.push(b);
        }
        self.refine(g, &seeds);
    }
}

/// True when the two key multisets coincide; otherwise the graphs cannot
/// be isomorphic and their initial partitions are not comparable.
pub(crate) fn keys_compatible(a: &SearchGraph, b: &SearchGraph) -> bool {
    let mut ka = a.key.clone();
    let mut kb = b.key.clone();
    ka.sort_unstable();
    kb.sort_unstable();
    ka == kb
}
