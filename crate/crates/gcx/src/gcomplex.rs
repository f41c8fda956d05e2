//! the operad of directed graphs, its Lie bracket, the differential and
//! the inductive Maurer–Cartan solver

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_traits::One;

use crate::error::{Error, Result};
use crate::graphcore::{
    canon, degree, degree_kl, enumerate_graphs_bounded, DirectedGraph, Edge, FilterSet, GraphVector, Parity,
    SignedGraphClass, DEFAULT_ENUM_BOUND,
};
use crate::linalg::{add_into, Echelon, SparseMatrix, SparseVec};
use crate::q::{self, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Subcomplex {
    /// dfGC_d, all graphs
    Full,
    /// dGC_d, connected with vertices at least bivalent
    ConnectedBivalent,
    /// fGC^or_d, no wheels
    Oriented,
    /// GC^or_d, connected, no wheels, at least bivalent, no passing bivalent vertices
    OrientedConnected,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FlavorSpec {
    pub d: i32,
    pub sub: Subcomplex,
}

impl FlavorSpec {
    pub fn new(d: i32, sub: Subcomplex) -> Result<Self> {
        if d < 2 {
            return Err(Error::Invalid(format!("d must be at least 2, got {d}")));
        }
        Ok(FlavorSpec { d, sub })
    }

    pub fn filters(&self) -> FilterSet {
        match self.sub {
            Subcomplex::Full => FilterSet::none(),
            Subcomplex::ConnectedBivalent => FilterSet { connected: true, min_valence_2: true, ..Default::default() },
            Subcomplex::Oriented => FilterSet { oriented: true, ..Default::default() },
            Subcomplex::OrientedConnected => FilterSet {
                connected: true,
                oriented: true,
                min_valence_2: true,
                no_11_bivalent: true,
                ..Default::default()
            },
        }
    }
}

impl fmt::Display for FlavorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self.sub {
            Subcomplex::Full => "dfGC",
            Subcomplex::ConnectedBivalent => "dGC",
            Subcomplex::Oriented => "fGCor",
            Subcomplex::OrientedConnected => "GCor",
        };
        write!(f, "{}_{}", n, self.d)
    }
}

impl FromStr for FlavorSpec {
    type Err = Error;

    /// "dfGC_2", "dGC_3", "fGCor_2", "GCor_2"
    fn from_str(s: &str) -> Result<Self> {
        let (name, d) = s.rsplit_once('_').ok_or_else(|| Error::Parse(format!("flavor '{s}' lacks _d")))?;
        let d: i32 = d.parse().map_err(|_| Error::Parse(format!("bad d in '{s}'")))?;
        let sub = match name {
            "dfGC" | "full" => Subcomplex::Full,
            "dGC" => Subcomplex::ConnectedBivalent,
            "fGCor" | "fGC^or" => Subcomplex::Oriented,
            "GCor" | "GC^or" => Subcomplex::OrientedConnected,
            _ => return Err(Error::Parse(format!("unknown flavor '{name}'"))),
        };
        FlavorSpec::new(d, sub)
    }
}

// ---------------------------------------------------------------- insertion

/// labeled insertion of (k2, e2) into vertex i of e1; terms before
/// canonicalization, each with its orientation sign
pub(crate) fn insert_raw(e1: &[Edge], i: usize, k2: usize, e2: &[Edge], d: i32) -> Vec<(Vec<Edge>, i8)> {
    let shift = |v: u8| -> u8 {
        let v = v as usize;
        if v < i {
            v as u8
        } else {
            (v + k2 - 1) as u8
        }
    };
    // half-edges at i: (edge index, is_tail)
    let mut half: Vec<(usize, bool)> = Vec::new();
    let mut base: Vec<Edge> = Vec::with_capacity(e1.len() + e2.len());
    for (idx, &(t, h)) in e1.iter().enumerate() {
        if t as usize == i {
            half.push((idx, true));
        }
        if h as usize == i {
            half.push((idx, false));
        }
        base.push((if t as usize == i { 0 } else { shift(t) }, if h as usize == i { 0 } else { shift(h) }));
    }
    for &(t, h) in e2 {
        base.push(((t as usize + i) as u8, (h as usize + i) as u8));
    }
    let sign: i8 = match Parity::of(d) {
        Parity::EdgeOrder => 1,
        Parity::VertexOrder => {
            if (i * (k2 + 1)) % 2 == 1 {
                -1
            } else {
                1
            }
        }
    };
    let nh = half.len();
    let total = k2.pow(nh as u32);
    let mut out = Vec::with_capacity(total);
    let mut choice = vec![0usize; nh];
    for _ in 0..total {
        let mut es = base.clone();
        for (c, &(idx, tail)) in choice.iter().zip(&half) {
            let v = (i + c) as u8;
            if tail {
                es[idx].0 = v;
            } else {
                es[idx].1 = v;
            }
        }
        out.push((es, sign));
        for c in choice.iter_mut() {
            *c += 1;
            if *c < k2 {
                break;
            }
            *c = 0;
        }
    }
    out
}

/// g1 ∘_i g2 with g2's vertices at positions i..i+k2-1 (i is 1-based)
pub fn insert(g1: &SignedGraphClass, i: usize, g2: &SignedGraphClass) -> Result<GraphVector> {
    if g1.d != g2.d {
        return Err(Error::FlavorMismatch(g1.d, g2.d));
    }
    if i == 0 || i > g1.graph.k {
        return Err(Error::Structural(format!("slot {i} outside [1,{}]", g1.graph.k)));
    }
    let mut v = GraphVector::zero(g1.d);
    if g1.zero || g2.zero {
        return Ok(v);
    }
    let s = g1.sign * g2.sign;
    let k = g1.graph.k + g2.graph.k - 1;
    for (es, t) in insert_raw(&g1.graph.edges, i - 1, g2.graph.k, &g2.graph.edges, g1.d) {
        v.add_graph(&DirectedGraph::raw(k, es), &q::q((s * t) as i64));
    }
    Ok(v)
}

/// labeled terms of g1 ∘_i g2 before canonicalization (i is 1-based)
pub fn insert_labeled(g1: &DirectedGraph, i: usize, g2: &DirectedGraph, d: i32) -> Result<Vec<(DirectedGraph, i8)>> {
    if i == 0 || i > g1.k {
        return Err(Error::Structural(format!("slot {i} outside [1,{}]", g1.k)));
    }
    let k = g1.k + g2.k - 1;
    if k >= u8::MAX as usize {
        return Err(Error::Structural("too many vertices".into()));
    }
    Ok(insert_raw(&g1.edges, i - 1, g2.k, &g2.edges, d).into_iter().map(|(es, s)| (DirectedGraph::raw(k, es), s)).collect())
}

/// integer accumulator keyed by canonical edge lists at fixed vertex count
#[derive(Default)]
pub(crate) struct IntAcc {
    pub map: HashMap<(usize, Vec<Edge>), i64>,
}

impl IntAcc {
    fn push(&mut self, k: usize, es: &[Edge], c: i64, d: i32) {
        if let Some((ce, s)) = canon(k, es, d) {
            *self.map.entry((k, ce)).or_insert(0) += c * s as i64;
        }
    }
}

/// sum_i a ∘_i b on single canonical graphs, integer coefficients
fn pre_lie_int(ka: usize, ea: &[Edge], kb: usize, eb: &[Edge], c: i64, d: i32, acc: &mut IntAcc) {
    let k = ka + kb - 1;
    for i in 0..ka {
        for (es, s) in insert_raw(ea, i, kb, eb, d) {
            acc.push(k, &es, c * s as i64, d);
        }
    }
}

/// a • b = sum over slots of insertions
pub fn pre_lie(a: &GraphVector, b: &GraphVector) -> Result<GraphVector> {
    if a.d != b.d {
        return Err(Error::FlavorMismatch(a.d, b.d));
    }
    let d = a.d;
    let mut out = GraphVector::zero(d);
    for (ga, ca) in a.iter() {
        for (gb, cb) in b.iter() {
            let mut acc = IntAcc::default();
            pre_lie_int(ga.k, &ga.edges, gb.k, &gb.edges, 1, d, &mut acc);
            let c = ca * cb;
            flush(&mut out, acc, &c);
        }
    }
    Ok(out)
}

fn flush(out: &mut GraphVector, acc: IntAcc, c: &Q) {
    let mut keys: Vec<_> = acc.map.into_iter().filter(|(_, x)| *x != 0).collect();
    keys.sort();
    for ((k, es), x) in keys {
        out.accumulate(DirectedGraph::raw(k, es), c * q::q(x));
    }
}

fn parity_sign(a: i64, b: i64) -> i64 {
    if (a * b).rem_euclid(2) == 1 {
        -1
    } else {
        1
    }
}

/// graded commutator [a,b] = a•b − (−1)^{|a||b|} b•a, termwise in degree
pub fn bracket(a: &GraphVector, b: &GraphVector) -> Result<GraphVector> {
    bracket_limited(a, b, usize::MAX)
}

/// bracket keeping only pairs whose product has at most `max_k` vertices
pub fn bracket_limited(a: &GraphVector, b: &GraphVector, max_k: usize) -> Result<GraphVector> {
    if a.d != b.d {
        return Err(Error::FlavorMismatch(a.d, b.d));
    }
    let d = a.d;
    let mut out = GraphVector::zero(d);
    for (ga, ca) in a.iter() {
        for (gb, cb) in b.iter() {
            if ga.k + gb.k - 1 > max_k {
                continue;
            }
            let mut acc = IntAcc::default();
            let s = parity_sign(degree(ga, d), degree(gb, d));
            pre_lie_int(ga.k, &ga.edges, gb.k, &gb.edges, 1, d, &mut acc);
            pre_lie_int(gb.k, &gb.edges, ga.k, &ga.edges, -s, d, &mut acc);
            flush(&mut out, acc, &(ca * cb));
        }
    }
    Ok(out)
}

/// the single edge •→• with coefficient 1
pub fn edge_class(d: i32) -> GraphVector {
    GraphVector::from_graph(&DirectedGraph::raw(2, vec![(0, 1)]), d).expect("valid")
}

/// 1→2 + (−1)^d 2→1 as a labeled sum
pub fn m_element(d: i32) -> GraphVector {
    let mut v = GraphVector::zero(d);
    v.add_graph(&DirectedGraph::raw(2, vec![(0, 1)]), &Q::one());
    let s = if d % 2 == 0 { 1 } else { -1 };
    v.add_graph(&DirectedGraph::raw(2, vec![(1, 0)]), &q::q(s));
    v
}

/// δ on one canonical graph: [•→•, Γ], integer coefficients
pub(crate) fn delta_int(k: usize, es: &[Edge], d: i32) -> Vec<((usize, Vec<Edge>), i64)> {
    let mut acc = IntAcc::default();
    let e = [(0u8, 1u8)];
    let s = parity_sign(1, degree_kl(k, es.len(), d));
    pre_lie_int(2, &e, k, es, 1, d, &mut acc);
    pre_lie_int(k, es, 2, &e, -s, d, &mut acc);
    let mut v: Vec<_> = acc.map.into_iter().filter(|(_, x)| *x != 0).collect();
    v.sort();
    v
}

/// δv = [•→•, v]
pub fn differential(v: &GraphVector) -> GraphVector {
    let mut out = GraphVector::zero(v.d);
    for (g, c) in v.iter() {
        for ((k, es), x) in delta_int(g.k, &g.edges, v.d) {
            out.accumulate(DirectedGraph::raw(k, es), c * q::q(x));
        }
    }
    out
}

pub fn project(v: &GraphVector, f: &FlavorSpec) -> GraphVector {
    let fs = f.filters();
    v.filter(|g| fs.accepts(g))
}

// ---------------------------------------------------------------- cohomology

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CohomologyDims {
    pub cocycle_dim: usize,
    pub coboundary_dim: usize,
    pub h_dim: usize,
}

pub fn basis(f: &FlavorSpec, k: usize, l: usize) -> Result<Vec<SignedGraphClass>> {
    basis_bounded(f, k, l, DEFAULT_ENUM_BOUND)
}

pub fn basis_bounded(f: &FlavorSpec, k: usize, l: usize, bound: usize) -> Result<Vec<SignedGraphClass>> {
    if k == 0 {
        return Ok(Vec::new());
    }
    enumerate_graphs_bounded(k, l, f.d, &f.filters(), bound)
}

/// matrix of δ from the (k,l) basis to the (k+1,l+1) basis
pub fn delta_matrix(f: &FlavorSpec, src: &[SignedGraphClass], dst: &[SignedGraphClass]) -> Result<SparseMatrix> {
    let index: HashMap<&Vec<Edge>, usize> = dst.iter().enumerate().map(|(i, c)| (&c.graph.edges, i)).collect();
    let fs = f.filters();
    let mut cols = Vec::with_capacity(src.len());
    for c in src {
        let mut col = SparseVec::new();
        for ((k, es), x) in delta_int(c.graph.k, &c.graph.edges, f.d) {
            match index.get(&es) {
                Some(&i) => add_into(&mut col, i, q::q(x)),
                None => {
                    if fs.accepts(&DirectedGraph::raw(k, es.clone())) {
                        return Err(Error::Structural(format!(
                            "δ produced {} outside the enumerated basis",
                            DirectedGraph::raw(k, es).encode(f.d)
                        )));
                    }
                }
            }
        }
        cols.push(col);
    }
    Ok(SparseMatrix::new(dst.len(), cols))
}

pub fn cohomology_dim(f: &FlavorSpec, k: usize, l: usize) -> Result<CohomologyDims> {
    let b0 = if k >= 2 && l >= 1 { basis(f, k - 1, l - 1)? } else { Vec::new() };
    let b1 = basis(f, k, l)?;
    let b2 = basis(f, k + 1, l + 1)?;
    let din = delta_matrix(f, &b0, &b1)?;
    let dout = delta_matrix(f, &b1, &b2)?;
    let r_in = din.rank();
    let r_out = dout.rank();
    let cocycle = b1.len() - r_out;
    Ok(CohomologyDims { cocycle_dim: cocycle, coboundary_dim: r_in, h_dim: cocycle - r_in })
}

// ---------------------------------------------------------------- Maurer–Cartan

/// Υ₄ ∈ GC^or_2, the cocycle spanning H¹ at four vertices
pub fn upsilon4() -> GraphVector {
    let a = DirectedGraph::from_one_based(4, &[(1, 4), (4, 2), (4, 3), (1, 2), (1, 3)]).expect("valid");
    let b = DirectedGraph::from_one_based(4, &[(1, 2), (1, 3), (2, 3), (2, 4), (3, 4)]).expect("valid");
    let c = DirectedGraph::from_one_based(4, &[(4, 1), (2, 4), (3, 4), (2, 1), (3, 1)]).expect("valid");
    let mut v = GraphVector::zero(2);
    v.add_graph(&a, &q::q(1));
    v.add_graph(&b, &q::q(UPSILON4_SIGNS.0 * 2));
    v.add_graph(&c, &q::q(UPSILON4_SIGNS.1));
    v
}

/// relative signs of the B and C graphs under the orientation conventions here
pub const UPSILON4_SIGNS: (i64, i64) = (1, 1);

/// ½[υ,υ] truncated to classes with at most `cutoff` vertices
pub fn mc_defect(upsilon: &GraphVector, cutoff: usize) -> Result<GraphVector> {
    let b = bracket_limited(upsilon, upsilon, cutoff)?;
    Ok(b.filter(|g| g.k <= cutoff).scale(&q::qf(1, 2)))
}

/// edge count of degree-1 graphs with k vertices, if integral
pub fn mc_edge_count(k: usize, d: i32) -> Option<usize> {
    let num = d as i64 * (k as i64 - 1) - 1;
    let den = d as i64 - 1;
    if num >= 0 && num % den == 0 {
        Some((num / den) as usize)
    } else {
        None
    }
}

/// x on `next_order`-vertex classes of the flavor with δx = −½[υ,υ] at
/// next_order+1 vertices
pub fn mc_extend(upsilon: &GraphVector, next_order: usize, f: &FlavorSpec) -> Result<GraphVector> {
    mc_extend_bounded(upsilon, next_order, f, DEFAULT_ENUM_BOUND)
}

pub fn mc_extend_bounded(upsilon: &GraphVector, next_order: usize, f: &FlavorSpec, bound: usize) -> Result<GraphVector> {
    if upsilon.d != f.d {
        return Err(Error::FlavorMismatch(f.d, upsilon.d));
    }
    let d = f.d;
    let target = next_order + 1;
    let rhs = project(&mc_defect(upsilon, target)?.at_vertices(target), f);
    if rhs.is_zero() {
        return Ok(GraphVector::zero(d));
    }
    let Some(l) = mc_edge_count(next_order, d) else {
        return Err(Error::NotExact { order: next_order, residual: Box::new(rhs) });
    };
    let src = basis_bounded(f, next_order, l, bound)?;
    let dst = basis_bounded(f, target, l + 1, bound)?;
    let index: HashMap<&Vec<Edge>, usize> = dst.iter().enumerate().map(|(i, c)| (&c.graph.edges, i)).collect();
    let mut b = SparseVec::new();
    for (g, c) in rhs.iter() {
        let Some(&i) = index.get(&g.edges) else {
            return Err(Error::NotExact { order: next_order, residual: Box::new(rhs.clone()) });
        };
        add_into(&mut b, i, -c.clone());
    }
    let m = delta_matrix(f, &src, &dst)?;
    let mut e = Echelon::default();
    for (j, c) in m.cols.iter().enumerate() {
        e.insert(c.clone(), j);
    }
    match e.solve(&b) {
        Ok(x) => {
            let mut out = GraphVector::zero(d);
            for (j, c) in x {
                out.accumulate(src[j].graph.clone(), c);
            }
            Ok(out)
        }
        Err(res) => {
            let mut r = GraphVector::zero(d);
            for (i, c) in res {
                r.accumulate(dst[i].graph.clone(), c);
            }
            Err(Error::NotExact { order: next_order, residual: Box::new(r) })
        }
    }
}

/// orders visited by the solver: k = 2p(d−1)+2
pub fn mc_orders(d: i32, max_vertices: usize) -> Vec<usize> {
    (1..).map(|p| 2 * p * (d as usize - 1) + 2).take_while(|&k| k <= max_vertices).collect()
}

#[derive(Clone, Debug)]
pub struct McSolution {
    pub flavor: FlavorSpec,
    /// (vertex order, component)
    pub terms: Vec<(usize, GraphVector)>,
    pub total: GraphVector,
    /// defect through max_vertices + 1
    pub defect: GraphVector,
}

/// m, then Υ₄ seeded for d = 2, then solved orders
pub fn solve_mc(f: &FlavorSpec, max_vertices: usize, bound: usize) -> Result<McSolution> {
    let d = f.d;
    let mut total = edge_class(d);
    let mut terms = vec![(2usize, total.clone())];
    for k in mc_orders(d, max_vertices) {
        let x = if d == 2 && k == 4 {
            project(&upsilon4(), f)
        } else {
            mc_extend_bounded(&total, k, f, bound)?
        };
        if !x.is_zero() {
            total = total.plus(&x)?;
            terms.push((k, x));
        }
    }
    let defect = project(&mc_defect(&total, max_vertices + 1)?, f);
    Ok(McSolution { flavor: *f, terms, total, defect })
}

/// sorted list of (vertex count, edge count) sectors present
pub fn sectors(v: &GraphVector) -> BTreeMap<(usize, usize), usize> {
    let mut m = BTreeMap::new();
    for (g, _) in v.iter() {
        *m.entry((g.k, g.edges.len())).or_insert(0) += 1;
    }
    m
}

/// δ∘δ on every basis class at (k,l); returns the number of classes checked
pub fn check_delta_squared(f: &FlavorSpec, k: usize, l: usize) -> Result<usize> {
    let src = basis(f, k, l)?;
    let d = f.d;
    let mut memo: HashMap<(usize, Vec<Edge>), Vec<((usize, Vec<Edge>), i64)>> = HashMap::new();
    for c in &src {
        let mut acc: HashMap<(usize, Vec<Edge>), i64> = HashMap::new();
        for (key, x) in delta_int(c.graph.k, &c.graph.edges, d) {
            let dd = memo.entry(key.clone()).or_insert_with(|| delta_int(key.0, &key.1, d));
            for (k2, y) in dd.iter() {
                *acc.entry(k2.clone()).or_insert(0) += x * y;
            }
        }
        if let Some((key, _)) = acc.iter().find(|(_, v)| **v != 0) {
            return Err(Error::Structural(format!(
                "δ² ≠ 0 on {} (term {})",
                c.graph.encode(d),
                DirectedGraph::raw(key.0, key.1.clone()).encode(d)
            )));
        }
    }
    Ok(src.len())
}
