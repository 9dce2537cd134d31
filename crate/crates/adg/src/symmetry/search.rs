//! Individualization–refinement searches: automorphism generators of one
//! graph, and isomorphism witnesses between two graphs.
//!
//! Both searches descend by repeatedly individualizing a vertex of the
//! target cell (lowest cell start among the smallest non-singleton
//! cells) and refining to the coarsest equitable partition. Candidate
//! maps are read off discrete partitions position by position and
//! verified explicitly, so invariant pruning can never produce a wrong
//! answer, only a slower one.

use super::refine::{keys_compatible, Partition, SearchGraph};
use crate::{Error, Result};

pub(crate) struct SearchLimits {
    pub max_nodes: u64,
}

/// Diagnostic: node count of the last completed search.
pub(crate) static LAST_NODES: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_nodes: 50_000_000,
        }
    }
}

struct Budget {
    used: u64,
    max: u64,
}

impl Budget {
    fn spend(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.max {
            Err(Error::ResourceLimit { limit: self.max })
        } else {
            Ok(())
        }
    }
}

/// True iff `to` lies in the orbit of `from` under the subgroup of the
/// collected automorphisms that fix `prefix` pointwise.
fn orbit_reaches(gens: &[Vec<u32>], prefix: &[u32], from: u32, to: u32) -> bool {
    if from == to {
        return true;
    }
    let usable: Vec<&Vec<u32>> = gens
        .iter()
        .filter(|s| prefix.iter().all(|&p| s[p as usize] == p))
        .collect();
    if usable.is_empty() {
        return false;
    }
    // following forward images suffices: each generator has finite
    // order, so its inverse is one of its powers
    let mut seen = std::collections::HashSet::new();
    seen.insert(from);
    let mut queue = vec![from];
    while let Some(x) = queue.pop() {
        for s in &usable {
            let y = s[x as usize];
            if seen.insert(y) {
                if y == to {
                    return true;
                }
                queue.push(y);
            }
        }
    }
    false
}

/// One node of the first (leftmost) search path.
struct PathNode {
    /// Stable partition at this node, before the individualization.
    part: Partition,
    /// Target cell members, ascending ids.
    cell: Vec<u32>,
    /// The first-path choice: smallest id in the cell.
    chosen: u32,
}

/// Shared first-path data for the automorphism search.
struct AutCtx<'a> {
    g: &'a SearchGraph,
    /// Cell-size sequences of the stable partitions S_0..S_m.
    shapes: Vec<Vec<u32>>,
    /// Singleton-cell vertices of each S_d in positional order.
    ref_singletons: Vec<Vec<u32>>,
    /// The discrete first leaf S_m.
    first_leaf: Partition,
}

/// Reusable buffers for the hot per-node checks.
struct Scratch {
    branch_singletons: Vec<u32>,
    partner: Vec<u32>,
    stamp: Vec<u32>,
    epoch: u32,
}

impl Scratch {
    fn new(n: usize) -> Scratch {
        Scratch {
            branch_singletons: Vec::with_capacity(n),
            partner: vec![0; n],
            stamp: vec![0; n],
            epoch: 0,
        }
    }
}

impl AutCtx<'_> {
    /// Any automorphism whose leaf lies below this branch node must map
    /// each singleton of the branch partition to the same-positioned
    /// singleton of the first-path partition; dead branches break
    /// adjacency of that partial map immediately. Assumes the shapes
    /// already matched, so singletons pair up positionally.
    fn singleton_map_consistent(
        &self,
        depth: usize,
        part: &Partition,
        scratch: &mut Scratch,
    ) -> bool {
        part.singleton_vertices_into(&mut scratch.branch_singletons);
        let reference = &self.ref_singletons[depth];
        debug_assert_eq!(scratch.branch_singletons.len(), reference.len());
        scratch.epoch += 1;
        let epoch = scratch.epoch;
        for (i, &x) in scratch.branch_singletons.iter().enumerate() {
            scratch.partner[x as usize] = reference[i];
            scratch.stamp[x as usize] = epoch;
        }
        for i in 0..scratch.branch_singletons.len() {
            let x = scratch.branch_singletons[i];
            let y = scratch.partner[x as usize];
            for &u in self.g.row(x) {
                if scratch.stamp[u as usize] == epoch {
                    let z = scratch.partner[u as usize];
                    if !self.g.adjacent(y, z) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Candidate automorphism read off a discrete branch partition:
    /// position-matched against the first leaf.
    fn leaf_candidate(&self, leaf: &Partition) -> Vec<u32> {
        let n = self.g.n;
        let mut sigma = vec![0u32; n];
        for v in 0..n as u32 {
            sigma[v as usize] = self.first_leaf.vertex_at(leaf.position_of(v));
        }
        sigma
    }
}

/// Generators of the color-preserving automorphism group of `g` (with the
/// initial coloring derived from `g.key`).
///
/// `seeds` are optional known automorphisms (verified here before use)
/// that pre-populate the pool and prune the search from the start.
///
/// The first path fixes choices v₁, v₂, …; at the node with prefix
/// v₁..vᵢ and chosen vᵢ₊₁, each other cell vertex w is explored until
/// some collected automorphism chain maps w to vᵢ₊₁ while fixing the
/// prefix, or the subtree is exhausted. Every automorphism discovered
/// along the way (conforming or not) enters the generator pool; the pool
/// both prunes later branches and generates the full group.
pub(crate) fn automorphism_generators(
    g: &SearchGraph,
    seeds: Vec<Vec<u32>>,
    limits: &SearchLimits,
) -> Result<Vec<Vec<u32>>> {
    let mut budget = Budget {
        used: 0,
        max: limits.max_nodes,
    };
    let mut part = Partition::from_keys(g);
    part.refine_all(g);
    budget.spend()?;

    // first-path descent
    let mut path: Vec<PathNode> = Vec::new();
    let mut shapes = vec![part.size_sequence()];
    let mut ref_singletons = Vec::new();
    {
        let mut buf = Vec::new();
        part.singleton_vertices_into(&mut buf);
        ref_singletons.push(buf);
    }
    let mut cur = part;
    while let Some((_, cell)) = cur.target_cell() {
        let chosen = cell[0];
        path.push(PathNode {
            part: cur.clone(),
            cell,
            chosen,
        });
        cur.individualize_and_refine(g, chosen);
        budget.spend()?;
        shapes.push(cur.size_sequence());
        let mut buf = Vec::new();
        cur.singleton_vertices_into(&mut buf);
        ref_singletons.push(buf);
    }
    debug_assert!(cur.is_discrete());
    let ctx = AutCtx {
        g,
        shapes,
        ref_singletons,
        first_leaf: cur,
    };
    let mut scratch = Scratch::new(g.n);

    let mut generators: Vec<Vec<u32>> = Vec::new();
    for seed in seeds {
        if !crate::symmetry::schreier::is_identity(&seed) && g.is_isomorphism_onto(g, &seed) {
            generators.push(seed);
        }
    }
    // deepest nodes first, so generators found deeper fix the prefixes of
    // the shallower nodes that are processed later
    for i in (0..path.len()).rev() {
        let prefix: Vec<u32> = path[..i].iter().map(|p| p.chosen).collect();
        let (cell, chosen) = (path[i].cell.clone(), path[i].chosen);
        for &w in cell.iter().skip(1) {
            if orbit_reaches(&generators, &prefix, w, chosen) {
                continue;
            }
            let mut branch = path[i].part.clone();
            branch.individualize_and_refine(g, w);
            budget.spend()?;
            subtree_collect(
                &ctx,
                branch,
                i + 1,
                &prefix,
                w,
                chosen,
                &mut generators,
                &mut scratch,
                &mut budget,
            )?;
        }
    }
    LAST_NODES.store(budget.used, std::sync::atomic::Ordering::Relaxed);
    Ok(generators)
}

/// DFS below one individualization of `w`, harvesting every verified
/// automorphism into `generators`. Returns true (stopping the walk) as
/// soon as the collected prefix-fixing subgroup maps `w` to `target`;
/// exhausting the subtree instead certifies no such element exists.
#[allow(clippy::too_many_arguments)]
fn subtree_collect(
    ctx: &AutCtx,
    part: Partition,
    depth: usize,
    prefix: &[u32],
    w: u32,
    target: u32,
    generators: &mut Vec<Vec<u32>>,
    scratch: &mut Scratch,
    budget: &mut Budget,
) -> Result<bool> {
    if depth >= ctx.shapes.len()
        || !part.shape_matches(&ctx.shapes[depth])
        || !ctx.singleton_map_consistent(depth, &part, scratch)
    {
        return Ok(false);
    }
    if depth == ctx.shapes.len() - 1 {
        let sigma = ctx.leaf_candidate(&part);
        if !crate::symmetry::schreier::is_identity(&sigma)
            && ctx.g.is_isomorphism_onto(ctx.g, &sigma)
        {
            generators.push(sigma);
            return Ok(orbit_reaches(generators, prefix, w, target));
        }
        return Ok(false);
    }
    let Some((_, cell)) = part.target_cell() else {
        return Ok(false); // discrete earlier than the first path: shape mismatch
    };
    for &u in &cell {
        let mut child = part.clone();
        child.individualize_and_refine(ctx.g, u);
        budget.spend()?;
        if subtree_collect(
            ctx, child, depth + 1, prefix, w, target, generators, scratch, budget,
        )? {
            return Ok(true);
        }
        // deeper recursion may have harvested the connecting element
        if orbit_reaches(generators, prefix, w, target) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Isomorphism witness between two explicit list graphs (degree keys
/// only); used by label-invariance tests.
pub(crate) fn iso_witness_lists(
    a: &crate::metrics::ListGraph,
    b: &crate::metrics::ListGraph,
    limits: &SearchLimits,
) -> Result<Option<Vec<u32>>> {
    iso_witness(
        &SearchGraph::from_list(a),
        &SearchGraph::from_list(b),
        limits,
    )
}

/// Searches for a key-consistent isomorphism from `a` onto `b`.
pub(crate) fn iso_witness(
    a: &SearchGraph,
    b: &SearchGraph,
    limits: &SearchLimits,
) -> Result<Option<Vec<u32>>> {
    if a.n != b.n || !keys_compatible(a, b) {
        return Ok(None);
    }
    let mut budget = Budget {
        used: 0,
        max: limits.max_nodes,
    };
    let mut pa = Partition::from_keys(a);
    pa.refine_all(a);
    let mut pb = Partition::from_keys(b);
    pb.refine_all(b);
    budget.spend()?;
    iso_dfs(a, b, pa, pb, &mut budget)
}

/// Singleton cells pair vertices of `a` with the same-positioned
/// vertices of `b`; any isomorphism below this node extends that
/// pairing, so it must preserve adjacency.
fn iso_singletons_consistent(
    a: &SearchGraph,
    b: &SearchGraph,
    pa: &Partition,
    pb: &Partition,
) -> bool {
    let mut pmap = vec![u32::MAX; a.n];
    let mut any = false;
    for &s in &pa.cell_starts() {
        if pa.cell_size(s) == 1 {
            pmap[pa.vertex_at(s) as usize] = pb.vertex_at(s);
            any = true;
        }
    }
    if !any {
        return true;
    }
    for (v, &y) in pmap.iter().enumerate() {
        if y == u32::MAX {
            continue;
        }
        for &u in a.row(v as u32) {
            let z = pmap[u as usize];
            if z != u32::MAX && !b.adjacent(y, z) {
                return false;
            }
        }
    }
    true
}

fn iso_dfs(
    a: &SearchGraph,
    b: &SearchGraph,
    pa: Partition,
    pb: Partition,
    budget: &mut Budget,
) -> Result<Option<Vec<u32>>> {
    if pa.size_sequence() != pb.size_sequence() || !iso_singletons_consistent(a, b, &pa, &pb) {
        return Ok(None);
    }
    if pa.is_discrete() {
        let mut map = vec![0u32; a.n];
        for v in 0..a.n as u32 {
            map[v as usize] = pb.vertex_at(pa.position_of(v));
        }
        return Ok(a.is_isomorphism_onto(b, &map).then_some(map));
    }
    let Some((start, cell_a)) = pa.target_cell() else {
        return Ok(None);
    };
    let cell_b = pb.cell_members(start);
    if cell_b.len() != cell_a.len() {
        return Ok(None);
    }
    let fixed = cell_a[0];
    for &w in &cell_b {
        let mut pa2 = pa.clone();
        let mut pb2 = pb.clone();
        pa2.individualize_and_refine(a, fixed);
        pb2.individualize_and_refine(b, w);
        budget.spend()?;
        if let Some(map) = iso_dfs(a, b, pa2, pb2, budget)? {
            return Ok(Some(map));
        }
    }
    Ok(None)
}

/// First-path cell sizes; diagnostic helper.
#[allow(dead_code)]
pub(crate) fn first_path_cells(g: &SearchGraph) -> Vec<usize> {
    let mut part = Partition::from_keys(g);
    part.refine_all(g);
    let mut cells = Vec::new();
    while let Some((_, cell)) = part.target_cell() {
        cells.push(cell.len());
        part.individualize_and_refine(g, cell[0]);
    }
    cells
}
