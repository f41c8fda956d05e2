//! directed graphs with orientation data, canonical labels and enumeration
//!
//! vertices are 0-based internally; the text encoding is 1-based.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::q::{self, Q};

pub type Edge = (u8, u8);

const NONE: u8 = u8::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirectedGraph {
    pub k: usize,
    pub edges: Vec<Edge>,
    pub loops_allowed: bool,
}

impl DirectedGraph {
    pub fn new(k: usize, edges: Vec<Edge>) -> Result<Self> {
        let g = DirectedGraph { k, edges, loops_allowed: false };
        g.validate()?;
        Ok(g)
    }

    /// edges given with 1-based labels
    pub fn from_one_based(k: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut es = Vec::with_capacity(edges.len());
        for &(t, h) in edges {
            if t == 0 || h == 0 || t > k || h > k {
                return Err(Error::Structural(format!("edge {t}>{h} outside [1,{k}]")));
            }
            es.push(((t - 1) as u8, (h - 1) as u8));
        }
        DirectedGraph::new(k, es)
    }

    pub(crate) fn raw(k: usize, edges: Vec<Edge>) -> Self {
        DirectedGraph { k, edges, loops_allowed: false }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k >= NONE as usize {
            return Err(Error::Structural(format!("vertex count {} out of range", self.k)));
        }
        for &(t, h) in &self.edges {
            if t as usize >= self.k || h as usize >= self.k {
                return Err(Error::Structural(format!("edge {}>{} outside [1,{}]", t + 1, h + 1, self.k)));
            }
            if t == h && !self.loops_allowed {
                return Err(Error::Structural(format!("self-loop at vertex {}", t + 1)));
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.k
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut o = vec![0; self.k];
        for &(t, _) in &self.edges {
            o[t as usize] += 1;
        }
        o
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut o = vec![0; self.k];
        for &(_, h) in &self.edges {
            o[h as usize] += 1;
        }
        o
    }

    pub fn valences(&self) -> Vec<usize> {
        let mut o = vec![0; self.k];
        for &(t, h) in &self.edges {
            o[t as usize] += 1;
            o[h as usize] += 1;
        }
        o
    }

    pub fn is_connected(&self) -> bool {
        let mut uf = UnionFind::new(self.k);
        for &(t, h) in &self.edges {
            uf.union(t as usize, h as usize);
        }
        uf.components() == 1
    }

    /// vertex v goes to perm[v]
    pub fn relabel(&self, perm: &[u8]) -> DirectedGraph {
        DirectedGraph {
            k: self.k,
            edges: self.edges.iter().map(|&(t, h)| (perm[t as usize], perm[h as usize])).collect(),
            loops_allowed: self.loops_allowed,
        }
    }

    pub fn encode(&self, d: i32) -> String {
        let es: Vec<String> = self.edges.iter().map(|&(t, h)| format!("{}>{}", t + 1, h + 1)).collect();
        format!("d{};k{};E:{}", d, self.k, es.join(","))
    }
}

/// parse "d{d};k{k};E:t>h,..."; edges are kept in the given order
pub fn decode(s: &str) -> Result<(i32, DirectedGraph)> {
    let bad = |m: &str| Error::Parse(format!("{m} in '{}'", s.chars().take(80).collect::<String>()));
    let mut parts = s.trim().splitn(3, ';');
    let d = parts
        .next()
        .and_then(|p| p.strip_prefix('d'))
        .and_then(|p| p.parse::<i32>().ok())
        .ok_or_else(|| bad("missing d"))?;
    let k = parts
        .next()
        .and_then(|p| p.strip_prefix('k'))
        .and_then(|p| p.parse::<usize>().ok())
        .ok_or_else(|| bad("missing k"))?;
    let es = parts.next().and_then(|p| p.strip_prefix("E:")).ok_or_else(|| bad("missing E:"))?;
    if !(1..NONE as usize).contains(&k) {
        return Err(bad("vertex count out of range"));
    }
    let mut edges = Vec::new();
    if !es.is_empty() {
        for tok in es.split(',') {
            let (a, b) = tok.split_once('>').ok_or_else(|| bad("edge without '>'"))?;
            let a: usize = a.trim().parse().map_err(|_| bad("bad tail"))?;
            let b: usize = b.trim().parse().map_err(|_| bad("bad head"))?;
            edges.push((a, b));
        }
    }
    Ok((d, DirectedGraph::from_one_based(k, &edges)?))
}

pub fn degree(g: &DirectedGraph, d: i32) -> i64 {
    degree_kl(g.k, g.edges.len(), d)
}

pub fn degree_kl(k: usize, l: usize, d: i32) -> i64 {
    d as i64 * (k as i64 - 1) + (1 - d as i64) * l as i64
}

/// true iff there is no directed cycle
pub fn is_oriented(g: &DirectedGraph) -> bool {
    acyclic(g.k, &g.edges)
}

pub(crate) fn acyclic(k: usize, edges: &[Edge]) -> bool {
    let mut indeg = vec![0usize; k];
    let mut out: Vec<Vec<u8>> = vec![Vec::new(); k];
    for &(t, h) in edges {
        indeg[h as usize] += 1;
        out[t as usize].push(h);
    }
    let mut stack: Vec<usize> = (0..k).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = stack.pop() {
        seen += 1;
        for &w in &out[v] {
            indeg[w as usize] -= 1;
            if indeg[w as usize] == 0 {
                stack.push(w as usize);
            }
        }
    }
    seen == k
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    /// d even: edges are odd, orientation is an edge ordering
    EdgeOrder,
    /// d odd: vertices are odd, orientation is a vertex ordering
    VertexOrder,
}

impl Parity {
    pub fn of(d: i32) -> Parity {
        if d.rem_euclid(2) == 0 {
            Parity::EdgeOrder
        } else {
            Parity::VertexOrder
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Orientation {
    pub parity: Parity,
    pub sign: i8,
}

impl Orientation {
    pub fn opposite(self) -> Orientation {
        Orientation { parity: self.parity, sign: -self.sign }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedGraphClass {
    pub graph: DirectedGraph,
    pub sign: i8,
    pub d: i32,
    /// an odd automorphism exists, the class is zero
    pub zero: bool,
}

impl SignedGraphClass {
    pub fn orientation(&self) -> Orientation {
        Orientation { parity: Parity::of(self.d), sign: self.sign }
    }

    pub fn degree(&self) -> i64 {
        degree(&self.graph, self.d)
    }
}

pub fn perm_sign(p: &[usize]) -> i8 {
    let mut seen = vec![false; p.len()];
    let mut s = 1i8;
    for i in 0..p.len() {
        if seen[i] {
            continue;
        }
        let mut j = i;
        let mut len = 0;
        while !seen[j] {
            seen[j] = true;
            j = p[j];
            len += 1;
        }
        if len % 2 == 0 {
            s = -s;
        }
    }
    s
}

/// sign of the permutation sorting `xs` stably
pub fn sort_sign<T: Ord>(xs: &[T]) -> i8 {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].cmp(&xs[b]));
    perm_sign(&idx)
}

/// canonical representative of (g, or) and the sign relating them
pub fn canonicalize(g: &DirectedGraph, d: i32) -> Result<SignedGraphClass> {
    g.validate()?;
    let c = canonical_search(g.k, &g.edges);
    let zero = c.zero_class(g, d);
    let sign = if zero { 1 } else { c.sign(g, d) };
    Ok(SignedGraphClass {
        graph: DirectedGraph { k: g.k, edges: c.best, loops_allowed: g.loops_allowed },
        sign,
        d,
        zero,
    })
}

/// fast path: None for the zero class
pub(crate) fn canon(k: usize, edges: &[Edge], d: i32) -> Option<(Vec<Edge>, i8)> {
    if Parity::of(d) == Parity::EdgeOrder && has_parallel(edges) {
        return None;
    }
    let c = canonical_search(k, edges);
    let g = DirectedGraph::raw(k, edges.to_vec());
    if c.zero_class(&g, d) {
        return None;
    }
    let s = c.sign(&g, d);
    Some((c.best, s))
}

fn has_parallel(edges: &[Edge]) -> bool {
    let mut es = edges.to_vec();
    es.sort_unstable();
    es.windows(2).any(|w| w[0] == w[1])
}

pub(crate) struct CanonResult {
    pub best: Vec<Edge>,
    /// label[v] of the canonical labeling
    pub label: Vec<u8>,
    /// automorphisms found, as vertex maps
    pub autos: Vec<Vec<u8>>,
}

impl CanonResult {
    fn zero_class(&self, g: &DirectedGraph, d: i32) -> bool {
        match Parity::of(d) {
            Parity::VertexOrder => self.autos.iter().any(|a| {
                let p: Vec<usize> = a.iter().map(|&x| x as usize).collect();
                perm_sign(&p) < 0
            }),
            Parity::EdgeOrder => {
                if has_parallel(&g.edges) {
                    return true;
                }
                self.autos.iter().any(|a| {
                    let img: Vec<Edge> = g.edges.iter().map(|&(t, h)| (a[t as usize], a[h as usize])).collect();
                    let p: Vec<usize> =
                        img.iter().map(|e| g.edges.iter().position(|x| x == e).unwrap()).collect();
                    perm_sign(&p) < 0
                })
            }
        }
    }

    fn sign(&self, g: &DirectedGraph, d: i32) -> i8 {
        match Parity::of(d) {
            Parity::VertexOrder => {
                let p: Vec<usize> = self.label.iter().map(|&x| x as usize).collect();
                perm_sign(&p)
            }
            Parity::EdgeOrder => {
                let img: Vec<Edge> =
                    g.edges.iter().map(|&(t, h)| (self.label[t as usize], self.label[h as usize])).collect();
                sort_sign(&img)
            }
        }
    }
}

struct Search {
    k: usize,
    out: Vec<Vec<u8>>,
    order: Vec<u8>,
    label: Vec<u8>,
    best: Option<Vec<Edge>>,
    best_order: Vec<u8>,
    autos: Vec<Vec<u8>>,
    bufs: Vec<Vec<Edge>>,
    color: Vec<u32>,
    /// color that owns each label position
    cell: Vec<u32>,
}

/// stable color refinement; colors are ranks of invariant signatures, so
/// isomorphic graphs receive matching colorings
pub(crate) fn refine_colors(k: usize, edges: &[Edge]) -> Vec<u32> {
    let mut out = vec![Vec::new(); k];
    let mut inn = vec![Vec::new(); k];
    for &(t, h) in edges {
        out[t as usize].push(h as usize);
        inn[h as usize].push(t as usize);
    }
    let mut color = vec![0u32; k];
    let mut ncolors = 1;
    loop {
        let sigs: Vec<(u32, Vec<u32>, Vec<u32>)> = (0..k)
            .map(|v| {
                let mut a: Vec<u32> = out[v].iter().map(|&w| color[w]).collect();
                let mut b: Vec<u32> = inn[v].iter().map(|&w| color[w]).collect();
                a.sort_unstable();
                b.sort_unstable();
                (color[v], b, a)
            })
            .collect();
        let mut distinct = sigs.clone();
        distinct.sort();
        distinct.dedup();
        for v in 0..k {
            color[v] = distinct.binary_search(&sigs[v]).unwrap_or(0) as u32;
        }
        if distinct.len() == ncolors {
            return color;
        }
        ncolors = distinct.len();
    }
}

/// lexicographic minimum of the sorted edge list over the relabelings that
/// list the refined color classes in order, by branch and bound with
/// automorphism pruning
pub(crate) fn canonical_search(k: usize, edges: &[Edge]) -> CanonResult {
    let mut out = vec![Vec::new(); k];
    for &(t, h) in edges {
        out[t as usize].push(h);
    }
    let color = refine_colors(k, edges);
    let mut cell = color.clone();
    cell.sort_unstable();
    let mut s = Search {
        k,
        out,
        color,
        cell,
        order: Vec::with_capacity(k),
        label: vec![NONE; k],
        best: None,
        best_order: Vec::new(),
        autos: Vec::new(),
        bufs: vec![Vec::new(); k + 2],
    };
    s.descend();
    let best = s.best.take().unwrap_or_default();
    let mut label = vec![0u8; k];
    for (p, &v) in s.best_order.iter().enumerate() {
        label[v as usize] = p as u8;
    }
    CanonResult { best, label, autos: s.autos }
}

impl Search {
    /// entries with tail label < j, unknown heads bounded below by j
    fn lower_bound(&self, j: usize, buf: &mut Vec<Edge>) {
        buf.clear();
        for t in 0..j {
            let v = self.order[t] as usize;
            let start = buf.len();
            let mut unknown = 0;
            for &w in &self.out[v] {
                let lw = self.label[w as usize];
                if lw != NONE {
                    buf.push((t as u8, lw));
                } else {
                    unknown += 1;
                }
            }
            buf[start..].sort_unstable();
            for _ in 0..unknown {
                buf.push((t as u8, j as u8));
            }
        }
    }

    fn descend(&mut self) {
        let j = self.order.len();
        if j == self.k {
            let mut buf = std::mem::take(&mut self.bufs[j]);
            self.lower_bound(j, &mut buf);
            match &self.best {
                None => {
                    self.best = Some(buf.clone());
                    self.best_order = self.order.clone();
                }
                Some(b) => match buf.cmp(b) {
                    std::cmp::Ordering::Less => {
                        self.best = Some(buf.clone());
                        self.best_order = self.order.clone();
                    }
                    std::cmp::Ordering::Equal => {
                        let mut a = vec![0u8; self.k];
                        for p in 0..self.k {
                            a[self.best_order[p] as usize] = self.order[p];
                        }
                        if a.iter().enumerate().any(|(i, &x)| i as u8 != x) && !self.autos.contains(&a) {
                            self.autos.push(a);
                        }
                    }
                    std::cmp::Ordering::Greater => {}
                },
            }
            self.bufs[j] = buf;
            return;
        }
        // candidates with their bounds
        let mut cands: Vec<(Vec<Edge>, u8)> = Vec::new();
        let mut buf = std::mem::take(&mut self.bufs[j + 1]);
        for v in 0..self.k as u8 {
            if self.label[v as usize] != NONE || self.color[v as usize] != self.cell[j] {
                continue;
            }
            self.order.push(v);
            self.label[v as usize] = j as u8;
            self.lower_bound(j + 1, &mut buf);
            self.label[v as usize] = NONE;
            self.order.pop();
            cands.push((buf.clone(), v));
        }
        self.bufs[j + 1] = buf;
        cands.sort();
        let mut explored: Vec<u8> = Vec::new();
        for (lb, v) in cands {
            if let Some(b) = &self.best {
                if lb.as_slice() > &b[..lb.len()] {
                    // sorted, so the rest is worse too
                    break;
                }
            }
            if !explored.is_empty() && self.in_explored_orbit(v, &explored) {
                continue;
            }
            self.order.push(v);
            self.label[v as usize] = j as u8;
            self.descend();
            self.label[v as usize] = NONE;
            self.order.pop();
            explored.push(v);
        }
    }

    fn in_explored_orbit(&self, v: u8, explored: &[u8]) -> bool {
        let fixing: Vec<&Vec<u8>> = self
            .autos
            .iter()
            .filter(|a| self.order.iter().all(|&u| a[u as usize] == u))
            .collect();
        if fixing.is_empty() {
            return false;
        }
        let mut uf = UnionFind::new(self.k);
        for a in fixing {
            for (x, &y) in a.iter().enumerate() {
                uf.union(x, y as usize);
            }
        }
        let r = uf.find(v as usize);
        explored.iter().any(|&e| uf.find(e as usize) == r)
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let n = self.parent[y];
            self.parent[y] = r;
            y = n;
        }
        r
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    pub fn components(&mut self) -> usize {
        (0..self.parent.len()).filter(|&x| self.find(x) == x).count()
    }
}

// ---------------------------------------------------------------- vectors

/// finite combination of canonical classes with rational coefficients
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphVector {
    pub d: i32,
    terms: BTreeMap<DirectedGraph, Q>,
}

#[derive(Serialize, Deserialize)]
struct Record {
    graph: String,
    coeff: String,
}

impl GraphVector {
    pub fn zero(d: i32) -> Self {
        GraphVector { d, terms: BTreeMap::new() }
    }

    /// the class of a single graph, with its orientation sign
    pub fn from_graph(g: &DirectedGraph, d: i32) -> Result<Self> {
        g.validate()?;
        let mut v = GraphVector::zero(d);
        v.add_graph(g, &Q::one());
        Ok(v)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&DirectedGraph, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, g: &DirectedGraph) -> Q {
        self.terms.get(g).cloned().unwrap_or_else(Q::zero)
    }

    /// add c times a graph that is already canonical with sign +1
    pub fn add_canonical(&mut self, g: DirectedGraph, c: &Q) {
        self.accumulate(g, c.clone());
    }

    /// add c times an arbitrary labeled graph
    pub fn add_graph(&mut self, g: &DirectedGraph, c: &Q) {
        if let Some((es, s)) = canon(g.k, &g.edges, self.d) {
            let key = DirectedGraph { k: g.k, edges: es, loops_allowed: g.loops_allowed };
            let c = if s > 0 { c.clone() } else { -c.clone() };
            self.accumulate(key, c);
        }
    }

    pub(crate) fn accumulate(&mut self, g: DirectedGraph, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(g) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &GraphVector, c: &Q) -> Result<()> {
        if other.d != self.d {
            return Err(Error::FlavorMismatch(self.d, other.d));
        }
        for (g, x) in &other.terms {
            self.accumulate(g.clone(), x * c);
        }
        Ok(())
    }

    pub fn plus(&self, other: &GraphVector) -> Result<GraphVector> {
        let mut r = self.clone();
        r.add_scaled(other, &Q::one())?;
        Ok(r)
    }

    pub fn minus(&self, other: &GraphVector) -> Result<GraphVector> {
        let mut r = self.clone();
        r.add_scaled(other, &-Q::one())?;
        Ok(r)
    }

    pub fn scale(&self, c: &Q) -> GraphVector {
        let mut r = GraphVector::zero(self.d);
        for (g, x) in &self.terms {
            r.accumulate(g.clone(), x * c);
        }
        r
    }

    pub fn filter(&self, mut keep: impl FnMut(&DirectedGraph) -> bool) -> GraphVector {
        GraphVector {
            d: self.d,
            terms: self.terms.iter().filter(|(g, _)| keep(g)).map(|(g, c)| (g.clone(), c.clone())).collect(),
        }
    }

    /// restriction to classes with exactly k vertices
    pub fn at_vertices(&self, k: usize) -> GraphVector {
        self.filter(|g| g.k == k)
    }

    pub fn vertex_counts(&self) -> BTreeSet<usize> {
        self.terms.keys().map(|g| g.k).collect()
    }

    pub fn to_json(&self) -> String {
        let recs: Vec<Record> =
            self.terms.iter().map(|(g, c)| Record { graph: g.encode(self.d), coeff: q::fmt(c) }).collect();
        serde_json::to_string_pretty(&recs).expect("serializable")
    }

    /// records are re-canonicalized, so any labeling is accepted
    pub fn from_json(s: &str, d: i32) -> Result<GraphVector> {
        let recs: Vec<Record> = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let mut v = GraphVector::zero(d);
        for r in recs {
            let (dd, g) = decode(&r.graph)?;
            if dd != d {
                return Err(Error::FlavorMismatch(d, dd));
            }
            v.add_graph(&g, &q::parse(&r.coeff)?);
        }
        Ok(v)
    }
}

impl fmt::Display for GraphVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.terms.iter().map(|(g, c)| format!("({})*[{}]", q::fmt(c), g.encode(self.d))).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

// ---------------------------------------------------------------- enumeration

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FilterSet {
    pub connected: bool,
    pub oriented: bool,
    pub min_valence_2: bool,
    pub in_and_out: bool,
    pub no_11_bivalent: bool,
    pub no_triangle: bool,
    pub no_adjacent_bivalent: bool,
    pub max_valence_3: bool,
}

impl FilterSet {
    pub fn none() -> Self {
        FilterSet::default()
    }

    /// the graph set used for the quantizable Lie bialgebra weights
    pub fn hat_g() -> Self {
        FilterSet {
            connected: true,
            oriented: true,
            min_valence_2: true,
            no_11_bivalent: true,
            no_triangle: true,
            no_adjacent_bivalent: true,
            ..Default::default()
        }
    }

    pub fn accepts(&self, g: &DirectedGraph) -> bool {
        let val = g.valences();
        let ind = g.in_degrees();
        let outd = g.out_degrees();
        if self.connected && !g.is_connected() {
            return false;
        }
        if self.oriented && !is_oriented(g) {
            return false;
        }
        if self.min_valence_2 && val.iter().any(|&v| v < 2) {
            return false;
        }
        if self.max_valence_3 && val.iter().any(|&v| v > 3) {
            return false;
        }
        if self.in_and_out && (0..g.k).any(|v| ind[v] == 0 || outd[v] == 0) {
            return false;
        }
        if self.no_11_bivalent && (0..g.k).any(|v| val[v] == 2 && ind[v] == 1 && outd[v] == 1) {
            return false;
        }
        if self.no_adjacent_bivalent && g.edges.iter().any(|&(t, h)| val[t as usize] == 2 && val[h as usize] == 2)
        {
            return false;
        }
        if self.no_triangle && has_triangle(g.k, &g.edges) {
            return false;
        }
        true
    }

    pub fn parse_list(s: &str) -> Result<FilterSet> {
        let mut f = FilterSet::none();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match tok {
                "connected" => f.connected = true,
                "oriented" => f.oriented = true,
                "min-valence-2" => f.min_valence_2 = true,
                "in-and-out" => f.in_and_out = true,
                "no-11-bivalent" => f.no_11_bivalent = true,
                "no-triangle" => f.no_triangle = true,
                "no-adjacent-bivalent" => f.no_adjacent_bivalent = true,
                "max-valence-3" => f.max_valence_3 = true,
                "hat" => {
                    let h = FilterSet::hat_g();
                    f = FilterSet { max_valence_3: f.max_valence_3, ..h };
                }
                _ => return Err(Error::Parse(format!("unknown filter '{tok}'"))),
            }
        }
        Ok(f)
    }
}

fn has_triangle(k: usize, edges: &[Edge]) -> bool {
    let mut adj = vec![false; k * k];
    for &(t, h) in edges {
        adj[t as usize * k + h as usize] = true;
        adj[h as usize * k + t as usize] = true;
    }
    for a in 0..k {
        for b in a + 1..k {
            if !adj[a * k + b] {
                continue;
            }
            for c in b + 1..k {
                if adj[a * k + c] && adj[b * k + c] {
                    return true;
                }
            }
        }
    }
    false
}

/// default bound on intermediate skeletons
pub const DEFAULT_ENUM_BOUND: usize = 4_000_000;

/// all nonzero canonical classes with k vertices and l edges passing `f`
pub fn enumerate_graphs(k: usize, l: usize, d: i32, f: &FilterSet) -> Result<Vec<SignedGraphClass>> {
    enumerate_graphs_bounded(k, l, d, f, DEFAULT_ENUM_BOUND)
}

pub fn enumerate_graphs_bounded(
    k: usize,
    l: usize,
    d: i32,
    f: &FilterSet,
    bound: usize,
) -> Result<Vec<SignedGraphClass>> {
    if k == 0 || k >= 32 {
        return Err(Error::Structural(format!("vertex count {k} out of range")));
    }
    let even = Parity::of(d) == Parity::EdgeOrder;
    // multiplicity cap per unordered pair
    let mult_cap = match (even, f.oriented) {
        (true, true) => 1,
        (true, false) => 2,
        (false, _) => usize::MAX,
    };
    let skeletons = skeletons(k, l, f, mult_cap, bound)?;
    let mut found: BTreeSet<Vec<Edge>> = BTreeSet::new();
    for sk in &skeletons {
        orient(k, sk, d, f, &mut found)?;
        if found.len() > bound {
            return Err(Error::Resource(format!("more than {bound} classes at k={k} l={l}")));
        }
    }
    Ok(found
        .into_iter()
        .map(|edges| SignedGraphClass { graph: DirectedGraph::raw(k, edges), sign: 1, d, zero: false })
        .collect())
}

/// undirected multigraph as sorted (u,v,mult) with u<v
type Skeleton = Vec<(u8, u8, u8)>;

fn skeleton_key(k: usize, sk: &Skeleton) -> Vec<Edge> {
    let mut es = Vec::new();
    for &(u, v, m) in sk {
        for _ in 0..m {
            es.push((u, v));
            es.push((v, u));
        }
    }
    canonical_search(k, &es).best
}

fn key_to_skeleton(key: &[Edge]) -> Skeleton {
    let mut m: BTreeMap<(u8, u8), u8> = BTreeMap::new();
    for &(t, h) in key {
        if t < h {
            *m.entry((t, h)).or_insert(0) += 1;
        }
    }
    m.into_iter().map(|((u, v), c)| (u, v, c)).collect()
}

fn skeletons(k: usize, l: usize, f: &FilterSet, mult_cap: usize, bound: usize) -> Result<Vec<Skeleton>> {
    let need = if f.min_valence_2 || f.in_and_out { 2usize } else { 0 };
    let max_val = if f.max_valence_3 { 3 } else { usize::MAX };
    let mut level: Vec<Skeleton> = vec![Vec::new()];
    let mut total = 0usize;
    for e in 0..l {
        let remaining_after = l - e - 1;
        let mut next: HashSet<Vec<Edge>> = HashSet::new();
        for sk in &level {
            let mut mult = vec![0usize; k * k];
            let mut val = vec![0usize; k];
            for &(u, v, m) in sk {
                mult[u as usize * k + v as usize] = m as usize;
                mult[v as usize * k + u as usize] = m as usize;
                val[u as usize] += m as usize;
                val[v as usize] += m as usize;
            }
            for u in 0..k {
                for v in u + 1..k {
                    let m = mult[u * k + v];
                    if m >= mult_cap || val[u] >= max_val || val[v] >= max_val {
                        continue;
                    }
                    if f.no_triangle && m == 0 && (0..k).any(|w| mult[u * k + w] > 0 && mult[v * k + w] > 0) {
                        continue;
                    }
                    val[u] += 1;
                    val[v] += 1;
                    let deficit: usize = val.iter().map(|&x| need.saturating_sub(x)).sum();
                    let ok_def = deficit <= 2 * remaining_after;
                    val[u] -= 1;
                    val[v] -= 1;
                    if !ok_def {
                        continue;
                    }
                    let mut s2 = sk.clone();
                    match s2.iter_mut().find(|x| x.0 as usize == u && x.1 as usize == v) {
                        Some(x) => x.2 += 1,
                        None => s2.push((u as u8, v as u8, 1)),
                    }
                    if f.connected {
                        let mut uf = UnionFind::new(k);
                        for &(a, b, _) in &s2 {
                            uf.union(a as usize, b as usize);
                        }
                        if uf.components() - 1 > remaining_after {
                            continue;
                        }
                    }
                    next.insert(skeleton_key(k, &s2));
                }
            }
        }
        total += next.len();
        if total > bound {
            return Err(Error::Resource(format!(
                "skeleton search exceeded {bound} intermediate graphs at k={k} l={l}"
            )));
        }
        let mut keys: Vec<Vec<Edge>> = next.into_iter().collect();
        keys.sort();
        level = keys.iter().map(|k| key_to_skeleton(k)).collect();
    }
    // orientation independent final filters
    let mut out = Vec::new();
    for sk in level {
        let mut es = Vec::new();
        for &(u, v, m) in &sk {
            for _ in 0..m {
                es.push((u, v));
            }
        }
        let g = DirectedGraph::raw(k, es);
        let und = FilterSet {
            connected: f.connected,
            min_valence_2: f.min_valence_2 || f.in_and_out,
            max_valence_3: f.max_valence_3,
            no_triangle: f.no_triangle,
            no_adjacent_bivalent: f.no_adjacent_bivalent,
            ..Default::default()
        };
        if und.accepts(&g) {
            out.push(sk);
        }
    }
    if l == 0 {
        // single empty skeleton
        return Ok(out);
    }
    Ok(out)
}

fn orient(k: usize, sk: &Skeleton, d: i32, f: &FilterSet, found: &mut BTreeSet<Vec<Edge>>) -> Result<()> {
    let even = Parity::of(d) == Parity::EdgeOrder;
    let mut remaining = vec![0usize; k];
    for &(u, v, m) in sk {
        remaining[u as usize] += m as usize;
        remaining[v as usize] += m as usize;
    }
    let mut st = OrientState {
        k,
        sk,
        d,
        even,
        f,
        indeg: vec![0; k],
        outdeg: vec![0; k],
        remaining,
        edges: Vec::new(),
    };
    st.go(0, found);
    Ok(())
}

struct OrientState<'a> {
    k: usize,
    sk: &'a Skeleton,
    d: i32,
    even: bool,
    f: &'a FilterSet,
    indeg: Vec<usize>,
    outdeg: Vec<usize>,
    remaining: Vec<usize>,
    edges: Vec<Edge>,
}

impl OrientState<'_> {
    fn vertex_ok(&self, v: usize) -> bool {
        if self.remaining[v] > 0 {
            return true;
        }
        let (i, o) = (self.indeg[v], self.outdeg[v]);
        if self.f.in_and_out && (i == 0 || o == 0) {
            return false;
        }
        if self.f.no_11_bivalent && i == 1 && o == 1 {
            return false;
        }
        true
    }

    fn go(&mut self, idx: usize, found: &mut BTreeSet<Vec<Edge>>) {
        if idx == self.sk.len() {
            if self.f.oriented && !acyclic(self.k, &self.edges) {
                return;
            }
            if let Some((es, _)) = canon(self.k, &self.edges, self.d) {
                found.insert(es);
            }
            return;
        }
        let (u, v, m) = self.sk[idx];
        let m = m as usize;
        let choices: Vec<usize> = if self.f.oriented {
            if m == 1 {
                vec![0, 1]
            } else {
                vec![0, m]
            }
        } else if self.even {
            match m {
                1 => vec![0, 1],
                2 => vec![1],
                _ => vec![],
            }
        } else {
            (0..=m).collect()
        };
        let (ui, vi) = (u as usize, v as usize);
        for a in choices {
            // a edges u->v, m-a edges v->u
            let b = m - a;
            self.outdeg[ui] += a;
            self.indeg[vi] += a;
            self.outdeg[vi] += b;
            self.indeg[ui] += b;
            self.remaining[ui] -= m;
            self.remaining[vi] -= m;
            let base = self.edges.len();
            for _ in 0..a {
                self.edges.push((u, v));
            }
            for _ in 0..b {
                self.edges.push((v, u));
            }
            let cyc_ok = !self.f.oriented || acyclic(self.k, &self.edges);
            if cyc_ok && self.vertex_ok(ui) && self.vertex_ok(vi) {
                self.go(idx + 1, found);
            }
            self.edges.truncate(base);
            self.outdeg[ui] -= a;
            self.indeg[vi] -= a;
            self.outdeg[vi] -= b;
            self.indeg[ui] -= b;
            self.remaining[ui] += m;
            self.remaining[vi] += m;
        }
    }
}
