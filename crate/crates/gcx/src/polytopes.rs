//! associahedra, permutahedra, bipermutahedra and biassociahedra as posets of
//! (bi-)trees with level or zone functions.
//!
//! a planar tree on n leaves is stored as its set of leaf intervals, one per
//! vertex. the gap g sits between leaves g and g+1 and belongs to the lowest
//! vertex spanning both. a leveled bi-tree is the same thing as an ordered
//! partition of the up-gaps and down-gaps, which is how cells are generated.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

pub const MAX_BIASSOC_ARITY: usize = 7;
pub const MAX_BIPERM_ARITY: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlanarTree {
    pub leaves: usize,
    /// one leaf interval [lo, hi] per vertex, sorted by (lo, −hi)
    pub vertices: Vec<(u8, u8)>,
}

fn vkey(v: &(u8, u8)) -> (u8, std::cmp::Reverse<u8>) {
    (v.0, std::cmp::Reverse(v.1))
}

impl PlanarTree {
    /// the singular tree "|"
    pub fn bar() -> Self {
        PlanarTree { leaves: 1, vertices: vec![] }
    }

    pub fn corolla(n: usize) -> Self {
        if n <= 1 {
            return PlanarTree::bar();
        }
        PlanarTree { leaves: n, vertices: vec![(0, (n - 1) as u8)] }
    }

    fn from_intervals(leaves: usize, mut v: Vec<(u8, u8)>) -> Self {
        v.sort_by_key(vkey);
        PlanarTree { leaves, vertices: v }
    }

    pub fn is_bar(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn gaps(&self) -> usize {
        self.leaves.saturating_sub(1)
    }

    /// vertex owning gap g
    pub fn gap_owner(&self, g: usize) -> usize {
        let mut best = usize::MAX;
        let mut width = usize::MAX;
        for (i, &(lo, hi)) in self.vertices.iter().enumerate() {
            if lo as usize <= g && g < hi as usize && ((hi - lo) as usize) < width {
                best = i;
                width = (hi - lo) as usize;
            }
        }
        best
    }

    /// number of inputs of each vertex
    pub fn arities(&self) -> Vec<usize> {
        let mut a = vec![1usize; self.vertices.len()];
        for g in 0..self.gaps() {
            a[self.gap_owner(g)] += 1;
        }
        a
    }

    /// u lies strictly below v (closer to the leaves)
    pub fn below(&self, u: usize, v: usize) -> bool {
        let (a, b) = (self.vertices[u], self.vertices[v]);
        u != v && b.0 <= a.0 && a.1 <= b.1
    }

    pub fn internal_edges(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.leaves;
        if n == 0 || n > 250 {
            return Err(Error::Structural(format!("bad leaf count {n}")));
        }
        if n == 1 {
            return if self.vertices.is_empty() {
                Ok(())
            } else {
                Err(Error::Structural("a one-leaf tree has no vertices".into()))
            };
        }
        if !self.vertices.contains(&(0, (n - 1) as u8)) {
            return Err(Error::Structural("missing root".into()));
        }
        let set: BTreeSet<_> = self.vertices.iter().collect();
        if set.len() != self.vertices.len() {
            return Err(Error::Structural("repeated vertex".into()));
        }
        for &(lo, hi) in &self.vertices {
            if lo >= hi || hi as usize >= n {
                return Err(Error::Structural(format!("bad interval [{lo},{hi}]")));
            }
            for &(a, b) in &self.vertices {
                let disjoint = b < lo || hi < a;
                let nested = (lo <= a && b <= hi) || (a <= lo && hi <= b);
                if !disjoint && !nested {
                    return Err(Error::Structural("crossing intervals".into()));
                }
            }
        }
        Ok(())
    }

    /// "(1,(2,3))", "|" for the singular tree, "1" is never a tree
    pub fn encode(&self) -> String {
        if self.is_bar() {
            return "|".into();
        }
        self.encode_from(0, (self.leaves - 1) as u8)
    }

    fn encode_from(&self, lo: u8, hi: u8) -> String {
        let mut parts = Vec::new();
        let mut x = lo;
        while x <= hi {
            // largest proper child interval starting at x
            let child = self.vertices.iter().filter(|&&(a, b)| a == x && b <= hi && (a, b) != (lo, hi)).max_by_key(|v| v.1);
            match child {
                Some(&(a, b)) => {
                    parts.push(self.encode_from(a, b));
                    x = b + 1;
                }
                None => {
                    parts.push((x as usize + 1).to_string());
                    x += 1;
                }
            }
        }
        format!("({})", parts.join(","))
    }

    pub fn decode(s: &str) -> Result<PlanarTree> {
        let s = s.trim();
        if s == "|" {
            return Ok(PlanarTree::bar());
        }
        let bytes = s.as_bytes();
        let mut pos = 0usize;
        let mut next_leaf = 0usize;
        let mut out = Vec::new();
        fn parse(b: &[u8], pos: &mut usize, next: &mut usize, out: &mut Vec<(u8, u8)>, depth: usize) -> Result<()> {
            let bad = |m: &str| Error::Parse(format!("tree: {m}"));
            if depth > 250 {
                return Err(bad("too deep"));
            }
            if b.get(*pos) != Some(&b'(') {
                return Err(bad("expected '('"));
            }
            *pos += 1;
            let lo = *next;
            let mut children = 0;
            loop {
                match b.get(*pos) {
                    Some(b'(') => parse(b, pos, next, out, depth + 1)?,
                    Some(c) if c.is_ascii_digit() => {
                        let st = *pos;
                        while b.get(*pos).is_some_and(|c| c.is_ascii_digit()) {
                            *pos += 1;
                        }
                        let v: usize = std::str::from_utf8(&b[st..*pos]).unwrap_or("0").parse().map_err(|_| bad("bad leaf"))?;
                        if v != *next + 1 {
                            return Err(bad("leaves must read 1, 2, 3, ... left to right"));
                        }
                        *next += 1;
                    }
                    _ => return Err(bad("expected leaf or subtree")),
                }
                children += 1;
                match b.get(*pos) {
                    Some(b',') => *pos += 1,
                    Some(b')') => {
                        *pos += 1;
                        break;
                    }
                    _ => return Err(bad("expected ',' or ')'")),
                }
            }
            if children < 2 {
                return Err(bad("a vertex needs two inputs"));
            }
            if *next > 250 {
                return Err(bad("too many leaves"));
            }
            out.push((lo as u8, (*next - 1) as u8));
            Ok(())
        }
        parse(bytes, &mut pos, &mut next_leaf, &mut out, 0)?;
        if pos != bytes.len() {
            return Err(Error::Parse(format!("trailing input in '{s}'")));
        }
        let t = PlanarTree::from_intervals(next_leaf, out);
        t.validate()?;
        Ok(t)
    }
}

impl fmt::Display for PlanarTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.encode())
    }
}

/// all planar trees with n leaves and vertices of arity ≥ 2
pub fn enumerate_trees(n: usize) -> Result<Vec<PlanarTree>> {
    if n < 2 {
        return Err(Error::Invalid(format!("trees need at least two leaves, got {n}")));
    }
    if n > 12 {
        return Err(Error::Resource(format!("{n} leaves")));
    }
    // forests of intervals on [lo, hi] with the root included
    fn rec(lo: u8, hi: u8) -> Vec<Vec<(u8, u8)>> {
        let mut out = Vec::new();
        // compositions of [lo, hi] into ≥ 2 consecutive parts
        let len = (hi - lo + 1) as usize;
        for mask in 0..1u32 << (len - 1) {
            let mut parts = Vec::new();
            let mut st = lo;
            for i in 0..len - 1 {
                if mask >> i & 1 == 1 {
                    parts.push((st, lo + i as u8));
                    st = lo + i as u8 + 1;
                }
            }
            parts.push((st, hi));
            if parts.len() < 2 {
                continue;
            }
            let mut acc: Vec<Vec<(u8, u8)>> = vec![vec![(lo, hi)]];
            for &(a, b) in &parts {
                if a == b {
                    continue;
                }
                let subs = rec(a, b);
                acc = acc.into_iter().flat_map(|pre| subs.iter().map(move |s| [pre.clone(), s.clone()].concat())).collect();
            }
            out.extend(acc);
        }
        out
    }
    let mut v: Vec<PlanarTree> = rec(0, (n - 1) as u8).into_iter().map(|iv| PlanarTree::from_intervals(n, iv)).collect();
    v.sort();
    Ok(v)
}

// ---------------------------------------------------------------- cells

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LeveledTree {
    pub tree: PlanarTree,
    /// level of each vertex, 1-based, surjective onto [l]
    pub level: Vec<u8>,
}

/// (T↑, T↓, ℓ): ℓ lists the up-tree's vertices first, then the down-tree's
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BiLeveled {
    pub up: PlanarTree,
    pub down: PlanarTree,
    pub level: Vec<u8>,
}

/// (T↑, T↓, ζ) with ζ in the same vertex order as BiLeveled
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ZonedBiTree {
    pub up: PlanarTree,
    pub down: PlanarTree,
    pub zeta: Vec<u8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZoneKind {
    Barrier,
    Up,
    Down,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cell {
    Tree(PlanarTree),
    Leveled(LeveledTree),
    BiLeveled(BiLeveled),
    Zoned(ZonedBiTree),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Biassociahedron,
    Bipermutahedron,
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "biassociahedron" | "K" => Ok(Family::Biassociahedron),
            "bipermutahedron" | "P" => Ok(Family::Bipermutahedron),
            _ => Err(Error::Parse(format!("unknown family '{s}'"))),
        }
    }
}

fn arity_excess(t: &PlanarTree) -> i64 {
    t.arities().iter().map(|&a| a as i64 - 2).sum()
}

fn fibers(level: &[u8]) -> Vec<usize> {
    let l = level.iter().copied().max().unwrap_or(0) as usize;
    let mut c = vec![0usize; l];
    for &x in level {
        c[x as usize - 1] += 1;
    }
    c
}

impl ZonedBiTree {
    pub fn kinds(&self) -> Vec<ZoneKind> {
        let nu = self.up.vertices.len();
        let l = self.zeta.iter().copied().max().unwrap_or(0) as usize;
        let mut has = vec![(false, false); l];
        for (v, &z) in self.zeta.iter().enumerate() {
            if v < nu {
                has[z as usize - 1].0 = true;
            } else {
                has[z as usize - 1].1 = true;
            }
        }
        has.iter()
            .map(|&(u, d)| match (u, d) {
                (true, true) => ZoneKind::Barrier,
                (true, false) => ZoneKind::Up,
                _ => ZoneKind::Down,
            })
            .collect()
    }

    /// conditions (i)-(iii) on the zone function; a barrier is a single level,
    /// so comparable vertices never share one
    pub fn validate(&self) -> Result<()> {
        self.up.validate()?;
        self.down.validate()?;
        let nu = self.up.vertices.len();
        let nv = nu + self.down.vertices.len();
        if self.zeta.len() != nv {
            return Err(Error::Structural("zone function has the wrong length".into()));
        }
        if nv == 0 {
            return Err(Error::Structural("both trees are singular".into()));
        }
        let l = *self.zeta.iter().max().unwrap_or(&0) as usize;
        if self.zeta.contains(&0) || fibers(&self.zeta).contains(&0) || l == 0 {
            return Err(Error::Structural("zone function is not a surjection onto [l]".into()));
        }
        let kinds = self.kinds();
        for (a, b) in pairs_below(&self.up, &self.down) {
            let (za, zb) = (self.zeta[a], self.zeta[b]);
            if za > zb {
                return Err(Error::Structural("zone function reverses the tree order".into()));
            }
            if kinds[za as usize - 1] == ZoneKind::Barrier && kinds[zb as usize - 1] == ZoneKind::Barrier && za == zb {
                return Err(Error::Structural("comparable vertices on one barrier".into()));
            }
        }
        for w in kinds.windows(2) {
            if w[0] == w[1] && w[0] != ZoneKind::Barrier {
                return Err(Error::Structural("adjacent zones of the same type".into()));
            }
        }
        Ok(())
    }
}

/// (a, b) with a < b in the combined vertex order of a bi-tree: up-tree
/// vertices grow towards the root, down-tree vertices away from it
fn pairs_below(up: &PlanarTree, down: &PlanarTree) -> Vec<(usize, usize)> {
    let nu = up.vertices.len();
    let mut out = Vec::new();
    for a in 0..nu {
        for b in 0..nu {
            if up.below(a, b) {
                out.push((a, b));
            }
        }
    }
    for a in 0..down.vertices.len() {
        for b in 0..down.vertices.len() {
            if down.below(a, b) {
                out.push((nu + b, nu + a));
            }
        }
    }
    out
}

/// Σ (arity − 2) + |ℓ|, or + Σ over barriers (#fiber − 1) for zone functions
pub fn dimension_of(c: &Cell) -> i64 {
    match c {
        Cell::Tree(t) => arity_excess(t),
        Cell::Leveled(t) => arity_excess(&t.tree) + fibers(&t.level).iter().map(|&f| f as i64 - 1).sum::<i64>(),
        Cell::BiLeveled(b) => {
            arity_excess(&b.up) + arity_excess(&b.down) + fibers(&b.level).iter().map(|&f| f as i64 - 1).sum::<i64>()
        }
        Cell::Zoned(z) => {
            let kinds = z.kinds();
            let barrier: i64 = fibers(&z.zeta)
                .iter()
                .zip(&kinds)
                .filter(|(_, k)| **k == ZoneKind::Barrier)
                .map(|(&f, _)| f as i64 - 1)
                .sum();
            arity_excess(&z.up) + arity_excess(&z.down) + barrier
        }
    }
}

// ---------------------------------------------------------------- ordered partitions

type Blocks = Vec<Vec<u8>>;

/// all ordered set partitions of 0..k
fn ordered_partitions(k: usize) -> Vec<Blocks> {
    let mut out = Vec::new();
    fn rec(rest: &[u8], acc: &mut Blocks, out: &mut Vec<Blocks>) {
        if rest.is_empty() {
            out.push(acc.clone());
            return;
        }
        let n = rest.len();
        for mask in 1..1u32 << n {
            let block: Vec<u8> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| rest[i]).collect();
            let remain: Vec<u8> = (0..n).filter(|i| mask >> i & 1 == 0).map(|i| rest[i]).collect();
            acc.push(block);
            rec(&remain, acc, out);
            acc.pop();
        }
    }
    let all: Vec<u8> = (0..k as u8).collect();
    if k == 0 {
        return vec![vec![]];
    }
    rec(&all, &mut Vec::new(), &mut out);
    out
}

/// refinements splitting one block in two, in either order
fn split_once(p: &Blocks) -> Vec<Blocks> {
    let mut out = Vec::new();
    for (i, b) in p.iter().enumerate() {
        let n = b.len();
        for mask in 1..(1u32 << n) - 1 {
            let x: Vec<u8> = (0..n).filter(|j| mask >> j & 1 == 1).map(|j| b[j]).collect();
            let y: Vec<u8> = (0..n).filter(|j| mask >> j & 1 == 0).map(|j| b[j]).collect();
            let mut q = p.clone();
            q[i] = x;
            q.insert(i + 1, y);
            out.push(q);
        }
    }
    out
}

fn all_refinements(p: &Blocks) -> BTreeSet<Blocks> {
    let mut seen: BTreeSet<Blocks> = BTreeSet::new();
    let mut stack = vec![p.clone()];
    while let Some(q) = stack.pop() {
        for r in split_once(&q) {
            if seen.insert(r.clone()) {
                stack.push(r);
            }
        }
    }
    seen
}

/// the tree whose gaps are resolved in the given order, with vertex levels
fn build_tree(leaves: usize, order: &[Vec<u8>]) -> (PlanarTree, Vec<u8>) {
    if leaves <= 1 {
        return (PlanarTree::bar(), vec![]);
    }
    let mut comp: Vec<(u8, u8)> = (0..leaves as u8).map(|i| (i, i)).collect();
    let mut found: Vec<((u8, u8), u8)> = Vec::new();
    for (li, gaps) in order.iter().enumerate() {
        if gaps.is_empty() {
            continue;
        }
        let mut g = gaps.clone();
        g.sort_unstable();
        // runs of gaps that touch a common current interval merge together
        let find = |comp: &[(u8, u8)], leaf: u8| comp.iter().position(|&(a, b)| a <= leaf && leaf <= b).unwrap_or(0);
        let mut merged: Vec<(u8, u8)> = Vec::new();
        for &x in &g {
            let l = comp[find(&comp, x)];
            let r = comp[find(&comp, x + 1)];
            match merged.last_mut() {
                Some(last) if last.1 >= l.0 => last.1 = r.1,
                _ => merged.push((l.0, r.1)),
            }
        }
        for &(a, b) in &merged {
            comp.retain(|&(x, y)| y < a || x > b);
            comp.push((a, b));
            found.push(((a, b), li as u8 + 1));
        }
        comp.sort_unstable();
    }
    let mut found = found;
    found.sort_by_key(|(v, _)| vkey(v));
    let tree = PlanarTree { leaves, vertices: found.iter().map(|x| x.0).collect() };
    (tree, found.iter().map(|x| x.1).collect())
}

/// relabel levels to 1..l keeping their order
fn compress(levels: &mut [u8]) {
    let set: BTreeSet<u8> = levels.iter().copied().collect();
    let map: BTreeMap<u8, u8> = set.into_iter().enumerate().map(|(i, x)| (x, i as u8 + 1)).collect();
    for x in levels.iter_mut() {
        *x = map[x];
    }
}

/// ordered partition of up-gaps 0..n−1 and down-gaps (n−1)..(n+m−2)
fn bi_from_blocks(m: usize, n: usize, p: &Blocks) -> BiLeveled {
    let gu = n.saturating_sub(1) as u8;
    let up_order: Vec<Vec<u8>> = p.iter().map(|b| b.iter().copied().filter(|&g| g < gu).collect()).collect();
    // the down tree is rooted at the bottom: it resolves gaps from the top level down
    let down_order: Vec<Vec<u8>> = p.iter().rev().map(|b| b.iter().copied().filter(|&g| g >= gu).map(|g| g - gu).collect()).collect();
    let (up, lu) = build_tree(n, &up_order);
    let (down, ld) = build_tree(m, &down_order);
    let l = p.len() as u8;
    let mut level: Vec<u8> = lu;
    level.extend(ld.iter().map(|&x| l + 1 - x));
    compress(&mut level);
    BiLeveled { up, down, level }
}

/// the projection P: adjacent levels of one non-barrier type merge into a zone
pub fn project(b: &BiLeveled) -> ZonedBiTree {
    let nu = b.up.vertices.len();
    let l = b.level.iter().copied().max().unwrap_or(0) as usize;
    let mut has = vec![(false, false); l];
    for (v, &x) in b.level.iter().enumerate() {
        if v < nu {
            has[x as usize - 1].0 = true;
        } else {
            has[x as usize - 1].1 = true;
        }
    }
    let mut zone = vec![0u8; l];
    let mut z = 0u8;
    for i in 0..l {
        let merge = i > 0 && has[i] == has[i - 1] && has[i] != (true, true);
        if !merge {
            z += 1;
        }
        zone[i] = z;
    }
    ZonedBiTree { up: b.up.clone(), down: b.down.clone(), zeta: b.level.iter().map(|&x| zone[x as usize - 1]).collect() }
}

fn check_arity(m: usize, n: usize, cap: usize) -> Result<()> {
    if m < 1 || n < 1 || m + n < 3 {
        return Err(Error::Invalid(format!("no cells for (m,n) = ({m},{n})")));
    }
    if m + n > cap {
        return Err(Error::Resource(format!("m + n = {} exceeds {cap}", m + n)));
    }
    Ok(())
}

/// the bipermutahedron P_m^n: T↑ has n leaves, T↓ has m
pub fn enumerate_bipermutahedron(m: usize, n: usize) -> Result<Vec<Cell>> {
    check_arity(m, n, MAX_BIPERM_ARITY)?;
    let mut v: Vec<Cell> = ordered_partitions(m + n - 2).iter().map(|p| Cell::BiLeveled(bi_from_blocks(m, n, p))).collect();
    v.sort();
    Ok(v)
}

/// the biassociahedron K_m^n, the image of P_m^n under merging adjacent zones of one type
pub fn enumerate_biassociahedron(m: usize, n: usize) -> Result<Vec<ZonedBiTree>> {
    check_arity(m, n, MAX_BIASSOC_ARITY)?;
    let set: BTreeSet<ZonedBiTree> =
        ordered_partitions(m + n - 2).iter().map(|p| project(&bi_from_blocks(m, n, p))).collect();
    Ok(set.into_iter().collect())
}

// ---------------------------------------------------------------- face posets

/// a finite face poset: cells, dimensions, and for each cell its codimension-1 faces
#[derive(Clone, Debug)]
pub struct FacePoset {
    pub cells: Vec<Cell>,
    pub dims: Vec<i64>,
    pub covers: Vec<Vec<usize>>,
}

impl FacePoset {
    pub fn index(&self, c: &Cell) -> Option<usize> {
        self.cells.binary_search(c).ok()
    }

    pub fn f_vector(&self) -> Vec<usize> {
        let top = self.dims.iter().copied().max().unwrap_or(-1);
        let mut f = vec![0usize; (top + 1).max(0) as usize];
        for &d in &self.dims {
            f[d as usize] += 1;
        }
        f
    }

    /// every covering step lowers the dimension by one
    pub fn is_graded(&self) -> bool {
        self.covers.iter().enumerate().all(|(i, cs)| cs.iter().all(|&j| self.dims[j] + 1 == self.dims[i]))
    }

    /// every interval of length two has exactly two middle elements
    pub fn diamond(&self) -> bool {
        for (i, cs) in self.covers.iter().enumerate() {
            let mut count: BTreeMap<usize, usize> = BTreeMap::new();
            for &j in cs {
                for &k in &self.covers[j] {
                    *count.entry(k).or_default() += 1;
                }
            }
            if count.values().any(|&c| c != 2) {
                let _ = i;
                return false;
            }
        }
        true
    }

    /// ∂∂ over 𝔽₂ from the cover relation
    pub fn boundary_squares_to_zero(&self) -> bool {
        for cs in &self.covers {
            let mut parity: BTreeMap<usize, bool> = BTreeMap::new();
            for &j in cs {
                for &k in &self.covers[j] {
                    let e = parity.entry(k).or_default();
                    *e = !*e;
                }
            }
            if parity.values().any(|&p| p) {
                return false;
            }
        }
        true
    }

    /// cover relation as JSON: {"cells": [...], "covers": [[i, j], ...]}
    pub fn to_json(&self) -> String {
        let cells: Vec<String> = self.cells.iter().map(encode_cell).collect();
        let edges: Vec<(usize, usize)> =
            self.covers.iter().enumerate().flat_map(|(i, cs)| cs.iter().map(move |&j| (i, j))).collect();
        serde_json::json!({ "cells": cells, "dims": self.dims, "covers": edges }).to_string()
    }
}

fn poset_from_faces(cells: Vec<Cell>, faces: impl Fn(&Cell) -> BTreeSet<Cell>) -> FacePoset {
    let dims: Vec<i64> = cells.iter().map(dimension_of).collect();
    let index: BTreeMap<&Cell, usize> = cells.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let all: Vec<BTreeSet<usize>> =
        cells.iter().map(|c| faces(c).iter().filter_map(|f| index.get(f).copied()).collect()).collect();
    // covers: faces not contained in the closure of another face
    let covers = all
        .iter()
        .map(|fs| fs.iter().copied().filter(|&f| !fs.iter().any(|&g| g != f && all[g].contains(&f))).collect())
        .collect();
    FacePoset { cells, dims, covers }
}

/// face poset of the associahedron on n leaves, faces by inserting edges
pub fn associahedron(n: usize) -> Result<FacePoset> {
    let trees = enumerate_trees(n)?;
    let cells: Vec<Cell> = trees.iter().cloned().map(Cell::Tree).collect();
    Ok(poset_from_faces(cells, |c| match c {
        Cell::Tree(t) => trees
            .iter()
            .filter(|s| *s != t && t.vertices.iter().all(|v| s.vertices.contains(v)))
            .cloned()
            .map(Cell::Tree)
            .collect(),
        _ => BTreeSet::new(),
    }))
}

/// face poset of the permutahedron of leveled trees on n leaves
pub fn permutahedron(n: usize) -> Result<FacePoset> {
    if !(2..=8).contains(&n) {
        return Err(Error::Resource(format!("{n} leaves")));
    }
    let mk = |p: &Blocks| {
        let (tree, level) = build_tree(n, p);
        Cell::Leveled(LeveledTree { tree, level })
    };
    let parts = ordered_partitions(n - 1);
    let mut cells: Vec<Cell> = parts.iter().map(mk).collect();
    cells.sort();
    let lookup: BTreeMap<Cell, Blocks> = parts.iter().map(|p| (mk(p), p.clone())).collect();
    Ok(poset_from_faces(cells, |c| all_refinements(&lookup[c]).iter().map(mk).collect()))
}

pub fn face_poset(m: usize, n: usize, family: Family) -> Result<FacePoset> {
    let cap = match family {
        Family::Biassociahedron => MAX_BIASSOC_ARITY,
        Family::Bipermutahedron => MAX_BIPERM_ARITY,
    };
    check_arity(m, n, cap)?;
    let parts = ordered_partitions(m + n - 2);
    let to_cell = |p: &Blocks| -> Cell {
        let b = bi_from_blocks(m, n, p);
        match family {
            Family::Bipermutahedron => Cell::BiLeveled(b),
            Family::Biassociahedron => Cell::Zoned(project(&b)),
        }
    };
    // preimages in the ordered-partition model
    let mut pre: BTreeMap<Cell, Vec<Blocks>> = BTreeMap::new();
    for p in &parts {
        pre.entry(to_cell(p)).or_default().push(p.clone());
    }
    let cells: Vec<Cell> = pre.keys().cloned().collect();
    Ok(poset_from_faces(cells, |c| {
        let mut out = BTreeSet::new();
        for p in &pre[c] {
            for q in all_refinements(p) {
                let d = to_cell(&q);
                if d != *c {
                    out.insert(d);
                }
            }
        }
        out
    }))
}

pub fn f_vector(m: usize, n: usize, family: Family) -> Result<Vec<usize>> {
    Ok(face_poset(m, n, family)?.f_vector())
}

pub fn diamond_check(m: usize, n: usize, family: Family) -> Result<bool> {
    Ok(face_poset(m, n, family)?.diamond())
}

fn arities_of(c: &Cell) -> (usize, usize) {
    match c {
        Cell::Tree(t) => (1, t.leaves),
        Cell::Leveled(t) => (1, t.tree.leaves),
        Cell::BiLeveled(b) => (b.down.leaves, b.up.leaves),
        Cell::Zoned(z) => (z.down.leaves, z.up.leaves),
    }
}

/// codimension-1 faces of the closure of c
pub fn covers(c: &Cell) -> Result<Vec<Cell>> {
    let (m, n) = arities_of(c);
    let poset = match c {
        Cell::Tree(_) => associahedron(n)?,
        Cell::Leveled(_) => permutahedron(n)?,
        Cell::BiLeveled(_) => face_poset(m, n, Family::Bipermutahedron)?,
        Cell::Zoned(_) => face_poset(m, n, Family::Biassociahedron)?,
    };
    let i = poset.index(c).ok_or_else(|| Error::Structural(format!("not a cell: {}", encode_cell(c))))?;
    Ok(poset.covers[i].iter().map(|&j| poset.cells[j].clone()).collect())
}

// ---------------------------------------------------------------- encoding

fn levels_str(l: &[u8]) -> String {
    l.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// "T:(1,(2,3))", "L:<tree>;<levels>", "P:<up>;<down>;<levels>", "K:<up>;<down>;<zones>";
/// levels are listed per vertex in bracket order, up-tree first
pub fn encode_cell(c: &Cell) -> String {
    match c {
        Cell::Tree(t) => format!("T:{t}"),
        Cell::Leveled(t) => format!("L:{};{}", t.tree, levels_str(&t.level)),
        Cell::BiLeveled(b) => format!("P:{};{};{}", b.up, b.down, levels_str(&b.level)),
        Cell::Zoned(z) => format!("K:{};{};{}", z.up, z.down, levels_str(&z.zeta)),
    }
}

fn parse_levels(s: &str, expect: usize) -> Result<Vec<u8>> {
    let v: Vec<u8> = if s.trim().is_empty() {
        vec![]
    } else {
        s.split(',').map(|x| x.trim().parse::<u8>().map_err(|_| Error::Parse(format!("bad level '{x}'")))).collect::<Result<_>>()?
    };
    if v.len() != expect {
        return Err(Error::Parse(format!("expected {expect} levels, got {}", v.len())));
    }
    if v.contains(&0) || fibers(&v).contains(&0) {
        return Err(Error::Structural("levels must cover 1..l".into()));
    }
    Ok(v)
}

fn strictly_preserving(up: &PlanarTree, down: &PlanarTree, level: &[u8]) -> bool {
    pairs_below(up, down).iter().all(|&(a, b)| level[a] < level[b])
}

pub fn decode_cell(s: &str) -> Result<Cell> {
    let s = s.trim();
    let (tag, body) = s.split_once(':').ok_or_else(|| Error::Parse(format!("missing cell tag in '{s}'")))?;
    let parts: Vec<&str> = body.split(';').collect();
    let cell = match (tag, parts.len()) {
        ("T", 1) => {
            let t = PlanarTree::decode(parts[0])?;
            if t.is_bar() {
                return Err(Error::Structural("the singular tree is not a cell".into()));
            }
            Cell::Tree(t)
        }
        ("L", 2) => {
            let tree = PlanarTree::decode(parts[0])?;
            let level = parse_levels(parts[1], tree.vertices.len())?;
            if tree.is_bar() || !strictly_preserving(&tree, &PlanarTree::bar(), &level) {
                return Err(Error::Structural("levels do not respect the tree order".into()));
            }
            Cell::Leveled(LeveledTree { tree, level })
        }
        ("P", 3) | ("K", 3) => {
            let up = PlanarTree::decode(parts[0])?;
            let down = PlanarTree::decode(parts[1])?;
            if up.leaves + down.leaves < 3 {
                return Err(Error::Structural("m + n must be at least 3".into()));
            }
            let lv = parse_levels(parts[2], up.vertices.len() + down.vertices.len())?;
            if tag == "P" {
                if !strictly_preserving(&up, &down, &lv) {
                    return Err(Error::Structural("level function is not strictly order preserving".into()));
                }
                Cell::BiLeveled(BiLeveled { up, down, level: lv })
            } else {
                let z = ZonedBiTree { up, down, zeta: lv };
                z.validate()?;
                Cell::Zoned(z)
            }
        }
        _ => return Err(Error::Parse(format!("bad cell '{s}'"))),
    };
    Ok(cell)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_counts() {
        let c: Vec<usize> = (2..=6).map(|n| enumerate_trees(n).unwrap().len()).collect();
        assert_eq!(c, vec![1, 3, 11, 45, 197]);
    }

    #[test]
    fn tree_text() {
        for s in ["(1,2)", "((1,2),3)", "(1,(2,3),4)", "|"] {
            assert_eq!(PlanarTree::decode(s).unwrap().encode(), s);
        }
        assert!(PlanarTree::decode("(1)").is_err());
        assert!(PlanarTree::decode("(2,1)").is_err());
    }

    #[test]
    fn partitions() {
        assert_eq!(ordered_partitions(3).len(), 13);
        assert_eq!(split_once(&vec![vec![0, 1, 2]]).len(), 6);
    }
}
