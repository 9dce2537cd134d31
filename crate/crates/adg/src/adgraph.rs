//! Algebraically defined bipartite graphs with formula-driven implicit
//! adjacency.
//!
//! A dim-3 graph joins a point (p₁,p₂,p₃) and a line [ℓ₁,ℓ₂,ℓ₃] when
//! p₂ + ℓ₂ = f(p₁,ℓ₁) and p₃ + ℓ₃ = g(p₁,p₂,ℓ₁) (three-variable g) or
//! p₃ + ℓ₃ = h(p₁,ℓ₁) (two-variable h). A dim-2 graph uses the first
//! equation only. A neighbor is completely determined by its first
//! component, so every vertex has degree exactly q and no edge list is
//! ever materialized: adjacency is recomputed on demand from value tables
//! of f and g built at construction.

use crate::ff::{Elem, Field};
use crate::poly::{parse_poly, MultiPoly, F_VARS, G_VARS};
use crate::{Error, Result};

/// Hard cap on vertex count so ids and bit sets stay comfortably in u32.
const MAX_VERTICES: u64 = 1 << 28;

/// Bipartition side. Points are written with parentheses, lines with
/// brackets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Point = 0,
    Line = 1,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Point => Side::Line,
            Side::Line => Side::Point,
        }
    }
}

/// A typed vertex with coordinates (length = graph dimension).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexRef {
    pub side: Side,
    pub coords: Vec<Elem>,
}

impl VertexRef {
    pub fn point(coords: Vec<Elem>) -> VertexRef {
        VertexRef {
            side: Side::Point,
            coords,
        }
    }

    pub fn line(coords: Vec<Elem>) -> VertexRef {
        VertexRef {
            side: Side::Line,
            coords,
        }
    }
}

impl std::fmt::Display for VertexRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (open, close) = match self.side {
            Side::Point => ('(', ')'),
            Side::Line => ('[', ']'),
        };
        write!(f, "{open}")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "{close}")
    }
}

/// Dense vertex id in [0, 2q^dim):
/// id = side·q^dim + Σ coordᵢ·q^{dim−1−i}, side Point = 0, Line = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

/// The third adjacency equation, or its absence for dim-2 graphs.
#[derive(Debug, Clone)]
pub enum GKind {
    /// p₃ + ℓ₃ = g(p₁, p₂, ℓ₁)
    ThreeVar(MultiPoly),
    /// p₃ + ℓ₃ = h(p₁, ℓ₁)
    TwoVar(MultiPoly),
    /// dim-2 graph: no third equation
    None,
}

impl GKind {
    pub fn dim(&self) -> usize {
        match self {
            GKind::None => 2,
            _ => 3,
        }
    }
}

/// An algebraically defined bipartite graph. Immutable after
/// construction (including the optional dense neighbor cache), so
/// concurrent reads are safe.
pub struct AdGraph {
    field: Field,
    dim: usize,
    f: MultiPoly,
    g_kind: GKind,
    /// f(a, b) for all (a, b), indexed a·q + b.
    f_table: Vec<u32>,
    /// g(a, b, c) indexed (a·q + b)·q + c for ThreeVar, h(a, b) indexed
    /// a·q + b for TwoVar, empty for dim 2.
    g_table: Vec<u32>,
    /// Optional dense neighbor ids, 2q^dim × q, built on request.
    neighbor_cache: Vec<u32>,
    /// Human-readable construction spec, used for caching keys.
    spec: String,
}

impl AdGraph {
    /// Builds a graph from f (arity 2) and the third-equation kind.
    pub fn build(field: Field, f: MultiPoly, g_kind: GKind) -> Result<AdGraph> {
        Self::build_with_spec(field, f, g_kind, None)
    }

    fn build_with_spec(
        field: Field,
        f: MultiPoly,
        g_kind: GKind,
        spec: Option<String>,
    ) -> Result<AdGraph> {
        if f.arity() != 2 {
            return Err(Error::ArityMismatch {
                expected: 2,
                got: f.arity(),
            });
        }
        match &g_kind {
            GKind::ThreeVar(g) if g.arity() != 3 => {
                return Err(Error::ArityMismatch {
                    expected: 3,
                    got: g.arity(),
                })
            }
            GKind::TwoVar(h) if h.arity() != 2 => {
                return Err(Error::ArityMismatch {
                    expected: 2,
                    got: h.arity(),
                })
            }
            _ => {}
        }
        let q = field.q() as u64;
        let dim = g_kind.dim();
        let vertices = 2 * q.pow(dim as u32);
        if vertices > MAX_VERTICES {
            return Err(Error::GraphTooLarge {
                vertices,
                limit: MAX_VERTICES,
            });
        }
        let q = field.q();
        let mut f_table = vec![0u32; (q as usize) * (q as usize)];
        for a in 0..q {
            for b in 0..q {
                f_table[(a as usize) * (q as usize) + b as usize] =
                    f.eval(&field, &[Elem(a), Elem(b)])?.value();
            }
        }
        let g_table = match &g_kind {
            GKind::ThreeVar(g) => {
                let n = (q as usize).pow(3);
                let mut t = vec![0u32; n];
                for a in 0..q {
                    for b in 0..q {
                        for c in 0..q {
                            let idx = ((a as usize) * (q as usize) + b as usize) * (q as usize)
                                + c as usize;
                            t[idx] = g.eval(&field, &[Elem(a), Elem(b), Elem(c)])?.value();
                        }
                    }
                }
                t
            }
            GKind::TwoVar(h) => {
                let mut t = vec![0u32; (q as usize) * (q as usize)];
                for a in 0..q {
                    for b in 0..q {
                        t[(a as usize) * (q as usize) + b as usize] =
                            h.eval(&field, &[Elem(a), Elem(b)])?.value();
                    }
                }
                t
            }
            GKind::None => Vec::new(),
        };
        let spec = spec.unwrap_or_else(|| format!("q={q};dim={dim}"));
        Ok(AdGraph {
            field,
            dim,
            f,
            g_kind,
            f_table,
            g_table,
            neighbor_cache: Vec::new(),
            spec,
        })
    }

    /// Materializes the dense neighbor-id cache (2q^dim × q entries) for
    /// search workloads that probe adjacency repeatedly. Must be called
    /// before the graph is shared across threads.
    pub fn build_neighbor_cache(&mut self) {
        if !self.neighbor_cache.is_empty() {
            return;
        }
        let n = self.vertex_count();
        let q = self.field.q() as usize;
        let mut cache = vec![0u32; n * q];
        for v in 0..n as u32 {
            for t in 0..q as u32 {
                cache[(v as usize) * q + t as usize] = self.neighbor_id(v, Elem(t));
            }
        }
        self.neighbor_cache = cache;
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn f(&self) -> &MultiPoly {
        &self.f
    }

    pub fn g_kind(&self) -> &GKind {
        &self.g_kind
    }

    pub fn spec(&self) -> &str {
        &self.spec
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    /// 2q^dim.
    pub fn vertex_count(&self) -> usize {
        2 * (self.field.q() as usize).pow(self.dim as u32)
    }

    fn side_offset(&self) -> u32 {
        (self.field.q()).pow(self.dim as u32)
    }

    /// Bit-exact id per the VertexId encoding.
    pub fn vertex_id(&self, v: &VertexRef) -> VertexId {
        debug_assert_eq!(v.coords.len(), self.dim);
        let q = self.field.q();
        let mut id = 0u32;
        for c in &v.coords {
            id = id * q + c.0;
        }
        if v.side == Side::Line {
            id += self.side_offset();
        }
        VertexId(id)
    }

    /// Inverse of [`vertex_id`]; errors on out-of-range ids.
    pub fn id_vertex(&self, id: VertexId) -> Result<VertexRef> {
        let n = self.vertex_count() as u32;
        if id.0 >= n {
            return Err(Error::IdOutOfRange {
                id: id.0 as u64,
                count: n as u64,
            });
        }
        let off = self.side_offset();
        let (side, mut rest) = if id.0 >= off {
            (Side::Line, id.0 - off)
        } else {
            (Side::Point, id.0)
        };
        let q = self.field.q();
        let mut coords = vec![Elem::ZERO; self.dim];
        for i in (0..self.dim).rev() {
            coords[i] = Elem(rest % q);
            rest /= q;
        }
        Ok(VertexRef { side, coords })
    }

    #[inline]
    pub fn side_of_id(&self, id: u32) -> Side {
        if id >= self.side_offset() {
            Side::Line
        } else {
            Side::Point
        }
    }

    #[inline]
    fn f_at(&self, a: u32, b: u32) -> u32 {
        self.f_table[(a as usize) * (self.field.q() as usize) + b as usize]
    }

    #[inline]
    fn g3_at(&self, a: u32, b: u32, c: u32) -> u32 {
        let q = self.field.q() as usize;
        self.g_table[((a as usize) * q + b as usize) * q + c as usize]
    }

    #[inline]
    fn g2_at(&self, a: u32, b: u32) -> u32 {
        self.g_table[(a as usize) * (self.field.q() as usize) + b as usize]
    }

    /// The unique neighbor of `v` whose first component is `first`.
    ///
    /// For a point (p₁,p₂,p₃) and line first component ℓ₁ this is
    /// [ℓ₁, f(p₁,ℓ₁)−p₂, g(p₁,p₂,ℓ₁)−p₃] (or h(p₁,ℓ₁)−p₃), and the
    /// symmetric solve for a line input.
    pub fn neighbor(&self, v: &VertexRef, first: Elem) -> VertexRef {
        let id = self.vertex_id(v);
        let nid = self.neighbor_id(id.0, first);
        self.id_vertex(VertexId(nid)).expect("in range")
    }

    /// Id-level neighbor computation; the hot path for BFS and search.
    #[inline]
    pub fn neighbor_id(&self, id: u32, first: Elem) -> u32 {
        let field = &self.field;
        let q = field.q();
        let off = self.side_offset();
        let t = first.0;
        if self.dim == 3 {
            let (is_line, rest) = if id >= off {
                (true, id - off)
            } else {
                (false, id)
            };
            let c1 = rest / (q * q);
            let c2 = (rest / q) % q;
            let c3 = rest % q;
            if !is_line {
                // point (c1,c2,c3), neighbor line [t, f(c1,t)−c2, g(c1,c2,t)−c3]
                let l2 = field.sub(Elem(self.f_at(c1, t)), Elem(c2)).0;
                let l3 = match &self.g_kind {
                    GKind::ThreeVar(_) => field.sub(Elem(self.g3_at(c1, c2, t)), Elem(c3)).0,
                    GKind::TwoVar(_) => field.sub(Elem(self.g2_at(c1, t)), Elem(c3)).0,
                    GKind::None => unreachable!(),
                };
                off + t * q * q + l2 * q + l3
            } else {
                // line [c1,c2,c3], neighbor point (t, f(t,c1)−c2, g(t,p2,c1)−c3)
                let p2 = field.sub(Elem(self.f_at(t, c1)), Elem(c2)).0;
                let p3 = match &self.g_kind {
                    GKind::ThreeVar(_) => field.sub(Elem(self.g3_at(t, p2, c1)), Elem(c3)).0,
                    GKind::TwoVar(_) => field.sub(Elem(self.g2_at(t, c1)), Elem(c3)).0,
                    GKind::None => unreachable!(),
                };
                t * q * q + p2 * q + p3
            }
        } else {
            let (is_line, rest) = if id >= off {
                (true, id - off)
            } else {
                (false, id)
            };
            let c1 = rest / q;
            let c2 = rest % q;
            if !is_line {
                let b2 = field.sub(Elem(self.f_at(c1, t)), Elem(c2)).0;
                off + t * q + b2
            } else {
                let a2 = field.sub(Elem(self.f_at(t, c1)), Elem(c2)).0;
                t * q + a2
            }
        }
    }

    /// All q neighbors, ordered by first component's canonical encoding.
    pub fn neighbors(&self, v: &VertexRef) -> Vec<VertexRef> {
        let id = self.vertex_id(v).0;
        (0..self.field.q())
            .map(|t| self.id_vertex(VertexId(self.neighbor_id(id, Elem(t)))).unwrap())
            .collect()
    }

    /// Writes the q neighbor ids of `id` into `out` (cleared first).
    #[inline]
    pub fn neighbor_ids_into(&self, id: u32, out: &mut Vec<u32>) {
        out.clear();
        let q = self.field.q() as usize;
        if !self.neighbor_cache.is_empty() {
            out.extend_from_slice(&self.neighbor_cache[(id as usize) * q..][..q]);
        } else {
            for t in 0..q as u32 {
                out.push(self.neighbor_id(id, Elem(t)));
            }
        }
    }

    /// True iff u and v are joined by an edge (O(1): a neighbor is
    /// determined by its first component).
    pub fn adjacent_ids(&self, u: u32, v: u32) -> bool {
        let (u, v) = if self.side_of_id(u) == Side::Point {
            (u, v)
        } else {
            (v, u)
        };
        if self.side_of_id(u) != Side::Point || self.side_of_id(v) != Side::Line {
            return false;
        }
        let q = self.field.q();
        let first = (v - self.side_offset()) / q.pow(self.dim as u32 - 1);
        self.neighbor_id(u, Elem(first)) == v
    }

    /// The covering map γ: drops the third coordinate of a dim-3 vertex.
    pub fn covering_map(v: &VertexRef) -> VertexRef {
        assert_eq!(v.coords.len(), 3, "covering map needs a dim-3 vertex");
        VertexRef {
            side: v.side,
            coords: v.coords[..2].to_vec(),
        }
    }
}

// ---- graph specification strings ----------------------------------------

/// Parses the CLI graph specification:
/// `q=<int>[,e=<int>];f=<poly>;g=<poly>` (g optional for dim-2 graphs),
/// or a built-in alias `R` (rigid family Γ(p₁ℓ₁, p₁p₂ℓ₁(p₁+p₂+p₁p₂))) or
/// `GQ` (Γ(p₁ℓ₁, p₁ℓ₁²)), which take q from `default_q`.
///
/// q is the full field order; a supplied e is validated against the
/// factorization of q. A g polynomial that never mentions p₂ is stored as
/// a two-variable h.
pub fn parse_graph_spec(spec: &str, default_q: Option<u32>) -> Result<AdGraph> {
    let spec = spec.trim();
    match spec {
        "R" | "GQ" => {
            let q = default_q.ok_or_else(|| {
                Error::Parse(format!("alias '{spec}' requires an explicit q"))
            })?;
            build_alias(spec, q)
        }
        _ => {
            let mut q: Option<u32> = default_q;
            let mut e: Option<u32> = None;
            let mut f_text: Option<&str> = None;
            let mut g_text: Option<&str> = None;
            for part in spec.split(';') {
                let part = part.trim();
                if part.is_empty() {
                    continue;
                }
                let (key, value) = part.split_once('=').ok_or_else(|| {
                    Error::Parse(format!("expected key=value, got '{part}'"))
                })?;
                match key.trim() {
                    "q" => {
                        // q may carry ",e=<int>"
                        let mut it = value.split(',');
                        let qv = it.next().unwrap().trim();
                        q = Some(qv.parse::<u32>().map_err(|_| {
                            Error::Parse(format!("bad field order '{qv}'"))
                        })?);
                        for extra in it {
                            let extra = extra.trim();
                            if let Some(ev) = extra.strip_prefix("e=") {
                                e = Some(ev.trim().parse::<u32>().map_err(|_| {
                                    Error::Parse(format!("bad extension degree '{ev}'"))
                                })?);
                            } else {
                                return Err(Error::Parse(format!(
                                    "unexpected field parameter '{extra}'"
                                )));
                            }
                        }
                    }
                    "e" => {
                        e = Some(value.trim().parse::<u32>().map_err(|_| {
                            Error::Parse(format!("bad extension degree '{value}'"))
                        })?);
                    }
                    "f" => f_text = Some(value),
                    "g" => g_text = Some(value),
                    other => {
                        return Err(Error::Parse(format!("unknown spec key '{other}'")))
                    }
                }
            }
            let q = q.ok_or_else(|| Error::Parse("graph spec is missing q".into()))?;
            let (p, e_actual) = factor_prime_power(q)
                .ok_or_else(|| Error::Parse(format!("{q} is not an odd prime power")))?;
            if let Some(e) = e {
                if e != e_actual {
                    return Err(Error::Parse(format!(
                        "q = {q} factors as {p}^{e_actual}, not exponent {e}"
                    )));
                }
            }
            let field = Field::new(p, e_actual)?;
            let f_text = f_text.ok_or_else(|| Error::Parse("graph spec is missing f".into()))?;
            let f = parse_poly(&field, f_text, &F_VARS)?;
            let g_kind = match g_text {
                None => GKind::None,
                Some(g_text) => {
                    let g = parse_poly(&field, g_text, &G_VARS)?;
                    if g.ignores_var(1) {
                        // reparse as h(p₁, ℓ₁) so the TwoVar structure is explicit
                        let h = parse_poly(&field, &g_text.replace("l1", "y"), &hl_vars())?;
                        GKind::TwoVar(h)
                    } else {
                        GKind::ThreeVar(g)
                    }
                }
            };
            AdGraph::build_with_spec(field, f, g_kind, Some(canonical_spec(q, f_text, g_text)))
        }
    }
}

fn hl_vars() -> crate::poly::VarSet<'static> {
    crate::poly::VarSet {
        names: &[&["p1", "x"], &["y"]],
    }
}

fn canonical_spec(q: u32, f: &str, g: Option<&str>) -> String {
    let mut s = format!("q={q};f={}", f.replace(' ', ""));
    if let Some(g) = g {
        s.push_str(&format!(";g={}", g.replace(' ', "")));
    }
    s
}

/// Builds one of the built-in families over F_q.
pub fn build_alias(alias: &str, q: u32) -> Result<AdGraph> {
    let (p, e) = factor_prime_power(q)
        .ok_or_else(|| Error::Parse(format!("{q} is not an odd prime power")))?;
    let field = Field::new(p, e)?;
    match alias {
        "R" => {
            let f = parse_poly(&field, "p1*l1", &F_VARS)?;
            let g = parse_poly(&field, "p1*p2*l1*(p1+p2+p1*p2)", &G_VARS)?;
            AdGraph::build_with_spec(
                field,
                f,
                GKind::ThreeVar(g),
                Some(format!("q={q};f=p1*l1;g=p1*p2*l1*(p1+p2+p1*p2)")),
            )
        }
        "GQ" => {
            let f = parse_poly(&field, "p1*l1", &F_VARS)?;
            let h = parse_poly(&field, "x*y^2", &hl_vars())?;
            AdGraph::build_with_spec(
                field,
                f,
                GKind::TwoVar(h),
                Some(format!("q={q};f=p1*l1;g=p1*l1^2")),
            )
        }
        other => Err(Error::Parse(format!("unknown graph alias '{other}'"))),
    }
}

/// Builds the dim-2 graph Γ(p₁ℓ₁) over F_q.
pub fn build_biaffine(q: u32) -> Result<AdGraph> {
    let (p, e) = factor_prime_power(q)
        .ok_or_else(|| Error::Parse(format!("{q} is not an odd prime power")))?;
    let field = Field::new(p, e)?;
    let f = parse_poly(&field, "p1*l1", &F_VARS)?;
    AdGraph::build_with_spec(field, f, GKind::None, Some(format!("q={q};f=p1*l1")))
}

/// Builds the rigid family R over F_q.
pub fn build_r(q: u32) -> Result<AdGraph> {
    build_alias("R", q)
}

/// Factors q as p^e for p prime; None if q is not a prime power.
pub fn factor_prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut n = q;
    let mut p = 0u32;
    for d in 2..=q {
        if (d as u64) * (d as u64) > n as u64 {
            break;
        }
        if n % d == 0 {
            p = d;
            break;
        }
    }
    if p == 0 {
        return Some((q, 1)); // q itself prime
    }
    let mut e = 0u32;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    if n == 1 {
        Some((p, e))
    } else {
        None
    }
}

/// Parses a vertex literal: `(c1,c2,...)` for a point, `[c1,c2,...]` for
/// a line, coordinates as canonical integers in [0, q).
pub fn parse_vertex(graph: &AdGraph, text: &str) -> Result<VertexRef> {
    let text = text.trim();
    let (side, inner) = if let Some(inner) = text.strip_prefix('(').and_then(|t| t.strip_suffix(')'))
    {
        (Side::Point, inner)
    } else if let Some(inner) = text.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
        (Side::Line, inner)
    } else {
        return Err(Error::Parse(format!(
            "vertex must be (..) or [..], got '{text}'"
        )));
    };
    let coords: Result<Vec<Elem>> = inner
        .split(',')
        .map(|c| {
            let v: u32 = c
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad coordinate '{c}'")))?;
            graph.field().elem(v)
        })
        .collect();
    let coords = coords?;
    if coords.len() != graph.dim() {
        return Err(Error::Parse(format!(
            "expected {} coordinates, got {}",
            graph.dim(),
            coords.len()
        )));
    }
    Ok(VertexRef { side, coords })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r7() -> AdGraph {
        build_r(7).unwrap()
    }

    #[test]
    fn build_counts_vertices_and_degree() {
        let g = r7();
        assert_eq!(g.vertex_count(), 686);
        assert_eq!(g.q(), 7);
        let v = VertexRef::point(vec![Elem(1), Elem(2), Elem(3)]);
        assert_eq!(g.neighbors(&v).len(), 7);

        let g2 = build_biaffine(5).unwrap();
        assert_eq!(g2.vertex_count(), 50);
        let v = VertexRef::point(vec![Elem(1), Elem(2)]);
        assert_eq!(g2.neighbors(&v).len(), 5);

        let gq = build_alias("GQ", 7).unwrap();
        assert_eq!(gq.vertex_count(), 686);
    }

    #[test]
    fn neighbor_matches_hand_computation() {
        let g = r7();
        // point (1,2,3) with ℓ₁ = 4: f = 4, g = 40 ≡ 5 → [4, 2, 2]
        let v = VertexRef::point(vec![Elem(1), Elem(2), Elem(3)]);
        let n = g.neighbor(&v, Elem(4));
        assert_eq!(n, VertexRef::line(vec![Elem(4), Elem(2), Elem(2)]));
        // point (0,a,r) with ℓ₁ = x → [x, −a, −r]
        for a in 0..7 {
            for r in 0..7 {
                for x in 0..7 {
                    let v = VertexRef::point(vec![Elem(0), Elem(a), Elem(r)]);
                    let f = g.field();
                    let expect = VertexRef::line(vec![
                        Elem(x),
                        f.neg(Elem(a)),
                        f.neg(Elem(r)),
                    ]);
                    assert_eq!(g.neighbor(&v, Elem(x)), expect);
                }
            }
        }
    }

    #[test]
    fn neighbor_solve_is_symmetric() {
        // neighbor(neighbor(v, c), v.first) = v on both sides
        for spec in ["R", "GQ"] {
            let g = build_alias(spec, 5).unwrap();
            for id in 0..g.vertex_count() as u32 {
                let v = g.id_vertex(VertexId(id)).unwrap();
                for c in 0..5 {
                    let n = g.neighbor(&v, Elem(c));
                    assert_eq!(g.neighbor(&n, v.coords[0]), v);
                }
            }
        }
        let g = build_biaffine(5).unwrap();
        for id in 0..g.vertex_count() as u32 {
            let v = g.id_vertex(VertexId(id)).unwrap();
            for c in 0..5 {
                let n = g.neighbor(&v, Elem(c));
                assert_eq!(g.neighbor(&n, v.coords[0]), v);
            }
        }
    }

    #[test]
    fn neighbors_of_zero_line_in_r() {
        // [0,0,0] in R: points (x, 0, 0)
        let g = r7();
        let v = VertexRef::line(vec![Elem(0), Elem(0), Elem(0)]);
        let expect: Vec<VertexRef> = (0..7)
            .map(|x| VertexRef::point(vec![Elem(x), Elem(0), Elem(0)]))
            .collect();
        assert_eq!(g.neighbors(&v), expect);
    }

    #[test]
    fn neighbors_pairwise_distinct_and_regular() {
        for q in [3u32, 5, 9, 13] {
            let g = build_r(q).unwrap();
            for id in (0..g.vertex_count() as u32).step_by(17) {
                let v = g.id_vertex(VertexId(id)).unwrap();
                let ns = g.neighbors(&v);
                assert_eq!(ns.len(), q as usize);
                let mut ids: Vec<u32> = ns.iter().map(|n| g.vertex_id(n).0).collect();
                ids.sort_unstable();
                ids.dedup();
                assert_eq!(ids.len(), q as usize);
            }
        }
    }

    #[test]
    fn vertex_ids_round_trip() {
        let g = r7();
        assert_eq!(
            g.vertex_id(&VertexRef::point(vec![Elem(0), Elem(0), Elem(0)])),
            VertexId(0)
        );
        assert_eq!(
            g.vertex_id(&VertexRef::line(vec![Elem(0), Elem(0), Elem(0)])),
            VertexId(343)
        );
        for id in 0..g.vertex_count() as u32 {
            let v = g.id_vertex(VertexId(id)).unwrap();
            assert_eq!(g.vertex_id(&v), VertexId(id));
        }
        assert!(matches!(
            g.id_vertex(VertexId(686)),
            Err(Error::IdOutOfRange { .. })
        ));
    }

    #[test]
    fn covering_map_drops_third_coordinate() {
        let v = VertexRef::point(vec![Elem(1), Elem(2), Elem(3)]);
        assert_eq!(
            AdGraph::covering_map(&v),
            VertexRef::point(vec![Elem(1), Elem(2)])
        );
    }

    #[test]
    fn covering_map_is_q_to_1_and_edge_preserving() {
        let g3 = build_r(5).unwrap();
        let g2 = build_biaffine(5).unwrap();
        let mut preimages = vec![0u32; g2.vertex_count()];
        for id in 0..g3.vertex_count() as u32 {
            let v = g3.id_vertex(VertexId(id)).unwrap();
            let img = AdGraph::covering_map(&v);
            preimages[g2.vertex_id(&img).0 as usize] += 1;
        }
        assert!(preimages.iter().all(|&c| c == 5));
        // edges map to edges, and N(v) maps onto N(γ(v))
        for id in 0..g3.vertex_count() as u32 {
            let v = g3.id_vertex(VertexId(id)).unwrap();
            let gv = AdGraph::covering_map(&v);
            let mut image: Vec<u32> = g3
                .neighbors(&v)
                .iter()
                .map(|n| g2.vertex_id(&AdGraph::covering_map(n)).0)
                .collect();
            image.sort_unstable();
            image.dedup();
            let mut target: Vec<u32> =
                g2.neighbors(&gv).iter().map(|n| g2.vertex_id(n).0).collect();
            target.sort_unstable();
            assert_eq!(image, target);
        }
    }

    #[test]
    fn adjacency_is_symmetric_exhaustive_small_q() {
        for q in [3u32, 5, 9] {
            let g = build_r(q).unwrap();
            let mut buf = Vec::new();
            let mut buf2 = Vec::new();
            for v in 0..g.vertex_count() as u32 {
                g.neighbor_ids_into(v, &mut buf);
                for &w in &buf {
                    g.neighbor_ids_into(w, &mut buf2);
                    assert!(buf2.contains(&v));
                    assert!(g.adjacent_ids(v, w));
                    assert!(g.adjacent_ids(w, v));
                }
            }
        }
    }

    #[test]
    fn bipartite_between_sides() {
        let g = build_r(5).unwrap();
        let mut buf = Vec::new();
        for v in 0..g.vertex_count() as u32 {
            let side = g.side_of_id(v);
            g.neighbor_ids_into(v, &mut buf);
            for &w in &buf {
                assert_eq!(g.side_of_id(w), side.other());
            }
        }
    }

    #[test]
    fn neighbor_cache_agrees_with_computation() {
        let mut g = build_r(5).unwrap();
        let mut plain = Vec::new();
        let mut expect: Vec<Vec<u32>> = Vec::new();
        for v in 0..g.vertex_count() as u32 {
            g.neighbor_ids_into(v, &mut plain);
            expect.push(plain.clone());
        }
        g.build_neighbor_cache();
        for v in 0..g.vertex_count() as u32 {
            g.neighbor_ids_into(v, &mut plain);
            assert_eq!(plain, expect[v as usize]);
        }
    }

    #[test]
    fn spec_parsing() {
        let g = parse_graph_spec("q=7;f=p1*l1;g=p1*p2*l1*(p1+p2+p1*p2)", None).unwrap();
        assert_eq!(g.vertex_count(), 686);
        assert!(matches!(g.g_kind(), GKind::ThreeVar(_)));

        // g that ignores p2 becomes TwoVar
        let g = parse_graph_spec("q=7;f=p1*l1;g=p1*l1^2", None).unwrap();
        assert!(matches!(g.g_kind(), GKind::TwoVar(_)));

        // dim 2
        let g = parse_graph_spec("q=5;f=p1*l1", None).unwrap();
        assert_eq!(g.dim(), 2);
        assert_eq!(g.vertex_count(), 50);

        // aliases take q from the flag
        let g = parse_graph_spec("R", Some(7)).unwrap();
        assert_eq!(g.vertex_count(), 686);
        assert!(parse_graph_spec("R", None).is_err());

        // extension fields with optional validation
        let g = parse_graph_spec("q=9;f=p1*l1", None).unwrap();
        assert_eq!(g.field().p(), 3);
        assert!(parse_graph_spec("q=9,e=2;f=p1*l1", None).is_ok());
        assert!(parse_graph_spec("q=9,e=3;f=p1*l1", None).is_err());
        assert!(parse_graph_spec("q=12;f=p1*l1", None).is_err());
        assert!(parse_graph_spec("q=8;f=p1*l1", None).is_err());
    }

    #[test]
    fn vertex_literals() {
        let g = r7();
        let v = parse_vertex(&g, "(0,1,0)").unwrap();
        assert_eq!(v, VertexRef::point(vec![Elem(0), Elem(1), Elem(0)]));
        let v = parse_vertex(&g, "[3, 4, 1]").unwrap();
        assert_eq!(v, VertexRef::line(vec![Elem(3), Elem(4), Elem(1)]));
        assert!(parse_vertex(&g, "(0,1)").is_err());
        assert!(parse_vertex(&g, "(0,1,9)").is_err());
        assert!(parse_vertex(&g, "0,1,2").is_err());
    }

    #[test]
    fn prime_power_factorization() {
        assert_eq!(factor_prime_power(7), Some((7, 1)));
        assert_eq!(factor_prime_power(9), Some((3, 2)));
        assert_eq!(factor_prime_power(27), Some((3, 3)));
        assert_eq!(factor_prime_power(121), Some((11, 2)));
        assert_eq!(factor_prime_power(12), None);
        assert_eq!(factor_prime_power(1), None);
    }
}
