//! graphs of the polydifferential prop built on Lieb_∞: white in/out vertices,
//! black generators, compositions, the splitting differential and the
//! leg-attaching map from oriented graphs

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphcore::{acyclic, enumerate_graphs_bounded, perm_sign, sort_sign, DirectedGraph, FilterSet, SignedGraphClass};
use crate::q::{self, Q};

/// maximal number of black vertices canonicalized by permutation search
pub const MAX_BLACK: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Corolla {
    pub m: usize,
    pub n: usize,
}

impl Corolla {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m < 1 || n < 1 || m + n < 3 {
            return Err(Error::Invalid(format!("no generator of arity ({m},{n})")));
        }
        Ok(Corolla { m, n })
    }

    /// one black vertex, in-white j feeding it, out-white i fed by it
    pub fn graph(&self) -> PropGraph {
        PropGraph {
            m: self.m,
            n: self.n,
            k: 1,
            e_in: (0..self.n).map(|j| (j as u8, 0)).collect(),
            e_int: Vec::new(),
            e_out: (0..self.m).map(|i| (0, i as u8)).collect(),
            wheels_allowed: false,
        }
    }
}

/// blacks are numbered 0..k; whites 0..n (in) and 0..m (out).
///
/// orientation: blacks and boundary edges are odd, internal edges even;
/// a graph stands for the word [blacks in order][e_in in order][e_out in order]
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PropGraph {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    /// (in-white, black)
    pub e_in: Vec<(u8, u8)>,
    /// (black, black)
    pub e_int: Vec<(u8, u8)>,
    /// (black, out-white)
    pub e_out: Vec<(u8, u8)>,
    pub wheels_allowed: bool,
}

impl PropGraph {
    pub fn empty(m: usize, n: usize) -> Self {
        PropGraph { m, n, k: 0, e_in: vec![], e_int: vec![], e_out: vec![], wheels_allowed: false }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m > 250 || self.n > 250 || self.k > 250 {
            return Err(Error::Structural("too many vertices".into()));
        }
        for &(j, b) in &self.e_in {
            if j as usize >= self.n || b as usize >= self.k {
                return Err(Error::Structural(format!("in-edge {}>{} out of range", j + 1, b + 1)));
            }
        }
        for &(b, i) in &self.e_out {
            if i as usize >= self.m || b as usize >= self.k {
                return Err(Error::Structural(format!("out-edge {}>{} out of range", b + 1, i + 1)));
            }
        }
        for &(a, b) in &self.e_int {
            if a as usize >= self.k || b as usize >= self.k {
                return Err(Error::Structural(format!("internal edge {}>{} out of range", a + 1, b + 1)));
            }
            if a == b {
                return Err(Error::Structural("self-loop on a black vertex".into()));
            }
        }
        if !self.wheels_allowed && !acyclic(self.k, &self.e_int) {
            return Err(Error::Structural("directed cycle in a graph without wheels".into()));
        }
        Ok(())
    }

    /// 3|V_int| − 2|E_int| − |E_in| − |E_out|
    pub fn degree(&self) -> i64 {
        3 * self.k as i64 - 2 * self.e_int.len() as i64 - self.e_in.len() as i64 - self.e_out.len() as i64
    }

    /// (inputs, outputs) at each black vertex
    pub fn black_valences(&self) -> Vec<(usize, usize)> {
        let mut v = vec![(0, 0); self.k];
        for &(_, b) in &self.e_in {
            v[b as usize].0 += 1;
        }
        for &(a, b) in &self.e_int {
            v[a as usize].1 += 1;
            v[b as usize].0 += 1;
        }
        for &(b, _) in &self.e_out {
            v[b as usize].1 += 1;
        }
        v
    }

    /// every black has an input, an output and at least `min_valence` edges
    pub fn is_generated(&self, min_valence: usize) -> bool {
        self.black_valences().iter().all(|&(i, o)| i >= 1 && o >= 1 && i + o >= min_valence)
    }

    /// "m2;n1;k1;Ein:1>1;Eint:;Eout:1>1,1>2", all labels 1-based
    pub fn encode(&self) -> String {
        let list = |es: &[(u8, u8)]| es.iter().map(|&(a, b)| format!("{}>{}", a + 1, b + 1)).collect::<Vec<_>>().join(",");
        format!(
            "m{};n{};k{};Ein:{};Eint:{};Eout:{}{}",
            self.m,
            self.n,
            self.k,
            list(&self.e_in),
            list(&self.e_int),
            list(&self.e_out),
            if self.wheels_allowed { ";W" } else { "" }
        )
    }

    pub fn decode(s: &str) -> Result<PropGraph> {
        let parts: Vec<&str> = s.trim().split(';').collect();
        if parts.len() != 6 && !(parts.len() == 7 && parts[6] == "W") {
            return Err(Error::Parse(format!("expected 6 fields in '{s}'")));
        }
        let num = |p: &str, tag: char| -> Result<usize> {
            p.strip_prefix(tag)
                .and_then(|x| x.parse::<usize>().ok())
                .filter(|&x| x <= 250)
                .ok_or_else(|| Error::Parse(format!("bad field '{p}'")))
        };
        let list = |p: &str, tag: &str| -> Result<Vec<(u8, u8)>> {
            let body = p.strip_prefix(tag).ok_or_else(|| Error::Parse(format!("expected {tag} in '{p}'")))?;
            if body.is_empty() {
                return Ok(Vec::new());
            }
            body.split(',')
                .map(|e| {
                    let (a, b) = e.split_once('>').ok_or_else(|| Error::Parse(format!("bad edge '{e}'")))?;
                    let a: u8 = a.parse().map_err(|_| Error::Parse(format!("bad edge '{e}'")))?;
                    let b: u8 = b.parse().map_err(|_| Error::Parse(format!("bad edge '{e}'")))?;
                    if a == 0 || b == 0 {
                        return Err(Error::Parse(format!("labels are 1-based in '{e}'")));
                    }
                    Ok((a - 1, b - 1))
                })
                .collect()
        };
        let g = PropGraph {
            m: num(parts[0], 'm')?,
            n: num(parts[1], 'n')?,
            k: num(parts[2], 'k')?,
            e_in: list(parts[3], "Ein:")?,
            e_int: list(parts[4], "Eint:")?,
            e_out: list(parts[5], "Eout:")?,
            wheels_allowed: parts.len() == 7,
        };
        g.validate()?;
        Ok(g)
    }
}

impl fmt::Display for PropGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.encode())
    }
}

// ---------------------------------------------------------------- canonical form

fn black_colors(g: &PropGraph) -> Vec<u32> {
    let k = g.k;
    // initial signature: white neighbours with multiplicity
    let mut base: Vec<(Vec<u8>, Vec<u8>)> = vec![(vec![], vec![]); k];
    for &(j, b) in &g.e_in {
        base[b as usize].0.push(j);
    }
    for &(b, i) in &g.e_out {
        base[b as usize].1.push(i);
    }
    for x in &mut base {
        x.0.sort_unstable();
        x.1.sort_unstable();
    }
    let mut distinct = base.clone();
    distinct.sort();
    distinct.dedup();
    let mut color: Vec<u32> = base.iter().map(|x| distinct.binary_search(x).unwrap_or(0) as u32).collect();
    let mut ncolors = distinct.len();
    loop {
        let sigs: Vec<(u32, Vec<u32>, Vec<u32>)> = (0..k)
            .map(|v| {
                let mut o: Vec<u32> = g.e_int.iter().filter(|e| e.0 as usize == v).map(|e| color[e.1 as usize]).collect();
                let mut i: Vec<u32> = g.e_int.iter().filter(|e| e.1 as usize == v).map(|e| color[e.0 as usize]).collect();
                o.sort_unstable();
                i.sort_unstable();
                (color[v], i, o)
            })
            .collect();
        let mut d = sigs.clone();
        d.sort();
        d.dedup();
        for v in 0..k {
            color[v] = d.binary_search(&sigs[v]).unwrap_or(0) as u32;
        }
        if d.len() == ncolors {
            return color;
        }
        ncolors = d.len();
    }
}

fn relabeled(g: &PropGraph, pos: &[u8]) -> (Vec<(u8, u8)>, Vec<(u8, u8)>, Vec<(u8, u8)>) {
    let ei: Vec<(u8, u8)> = g.e_in.iter().map(|&(j, b)| (j, pos[b as usize])).collect();
    let en: Vec<(u8, u8)> = g.e_int.iter().map(|&(a, b)| (pos[a as usize], pos[b as usize])).collect();
    let eo: Vec<(u8, u8)> = g.e_out.iter().map(|&(b, i)| (pos[b as usize], i)).collect();
    (ei, en, eo)
}

fn sorted(mut v: Vec<(u8, u8)>) -> Vec<(u8, u8)> {
    v.sort_unstable();
    v
}

fn has_dup(v: &[(u8, u8)]) -> bool {
    let s = sorted(v.to_vec());
    s.windows(2).any(|w| w[0] == w[1])
}

/// all orderings of the blacks that list color classes in order
fn class_orders(color: &[u32]) -> Result<Vec<Vec<u8>>> {
    let mut classes: BTreeMap<u32, Vec<u8>> = BTreeMap::new();
    for (v, &c) in color.iter().enumerate() {
        classes.entry(c).or_default().push(v as u8);
    }
    let mut count: usize = 1;
    for c in classes.values() {
        for i in 1..=c.len() {
            count = count.saturating_mul(i);
        }
    }
    if count > 40320 {
        return Err(Error::Resource(format!("{count} black orderings to search")));
    }
    let mut out: Vec<Vec<u8>> = vec![vec![]];
    for c in classes.values() {
        let mut perms = Vec::new();
        let mut p = c.clone();
        loop {
            perms.push(p.clone());
            if !crate::polyrep::next_permutation(&mut p) {
                break;
            }
        }
        out = out.into_iter().flat_map(|pre| perms.iter().map(move |p| [pre.clone(), p.clone()].concat())).collect();
    }
    Ok(out)
}

/// canonical representative and sign, or None when the graph is zero
pub fn canonicalize_prop(g: &PropGraph) -> Result<Option<(PropGraph, i8)>> {
    if g.k > MAX_BLACK {
        return Err(Error::Resource(format!("{} black vertices exceed the canonicalization bound", g.k)));
    }
    if has_dup(&g.e_in) || has_dup(&g.e_out) {
        return Ok(None);
    }
    let color = black_colors(g);
    let mut best: Option<((Vec<(u8, u8)>, Vec<(u8, u8)>, Vec<(u8, u8)>), i8)> = None;
    let mut zero = false;
    for order in class_orders(&color)? {
        // order[p] = old black placed at p
        let mut pos = vec![0u8; g.k];
        for (p, &v) in order.iter().enumerate() {
            pos[v as usize] = p as u8;
        }
        let (ei, en, eo) = relabeled(g, &pos);
        let sign = perm_sign(&order.iter().map(|&x| x as usize).collect::<Vec<_>>()) * sort_sign(&ei) * sort_sign(&eo);
        let key = (sorted(ei), sorted(en), sorted(eo));
        match &best {
            Some((b, s)) if *b == key => {
                if *s != sign {
                    zero = true;
                }
            }
            Some((b, _)) if *b < key => {}
            _ => best = Some((key, sign)),
        }
    }
    if zero {
        return Ok(None);
    }
    let ((ei, en, eo), s) = best.expect("at least one ordering");
    Ok(Some((PropGraph { m: g.m, n: g.n, k: g.k, e_in: ei, e_int: en, e_out: eo, wheels_allowed: g.wheels_allowed }, s)))
}

// ---------------------------------------------------------------- vectors

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PropVector {
    pub terms: BTreeMap<PropGraph, Q>,
}

/// combinations of compositions of Lieb_∞ generators, stored as graphs
pub type DecoratedTreeVector = PropVector;

#[derive(Serialize, Deserialize)]
struct Record {
    graph: String,
    coeff: String,
}

impl PropVector {
    pub fn zero() -> Self {
        PropVector::default()
    }

    pub fn from_graph(g: &PropGraph) -> Result<Self> {
        let mut v = PropVector::zero();
        v.add_graph(g, &Q::one())?;
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

    /// add c·[g] for an arbitrary labeling
    pub fn add_graph(&mut self, g: &PropGraph, c: &Q) -> Result<()> {
        if let Some((h, s)) = canonicalize_prop(g)? {
            self.add_canonical(h, c * q::q(s as i64));
        }
        Ok(())
    }

    fn add_canonical(&mut self, g: PropGraph, c: Q) {
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

    pub fn plus(&self, o: &PropVector) -> PropVector {
        let mut r = self.clone();
        for (g, c) in &o.terms {
            r.add_canonical(g.clone(), c.clone());
        }
        r
    }

    pub fn scale(&self, c: &Q) -> PropVector {
        let mut r = PropVector::zero();
        for (g, x) in &self.terms {
            r.add_canonical(g.clone(), x * c);
        }
        r
    }

    pub fn minus(&self, o: &PropVector) -> PropVector {
        self.plus(&o.scale(&-Q::one()))
    }

    pub fn signatures(&self) -> BTreeSet<(usize, usize)> {
        self.terms.keys().map(|g| (g.m, g.n)).collect()
    }

    pub fn to_json(&self) -> String {
        let recs: Vec<Record> =
            self.terms.iter().map(|(g, c)| Record { graph: g.encode(), coeff: q::fmt(c) }).collect();
        serde_json::to_string(&recs).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<PropVector> {
        let recs: Vec<Record> = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let mut v = PropVector::zero();
        for r in recs {
            let g = PropGraph::decode(&r.graph)?;
            v.add_graph(&g, &q::parse(&r.coeff)?)?;
        }
        Ok(v)
    }
}

impl fmt::Display for PropVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(g, c)| format!("({})*[{}]", q::fmt(c), g.encode())).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

// ---------------------------------------------------------------- words

/// odd letters of the orientation word
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Letter {
    Black(u8),
    In(u8, u8),
    Out(u8, u8),
}

fn word_of(g: &PropGraph, black_shift: u8, in_shift: u8, out_shift: u8) -> Vec<Letter> {
    let mut w: Vec<Letter> = (0..g.k as u8).map(|b| Letter::Black(b + black_shift)).collect();
    w.extend(g.e_in.iter().map(|&(j, b)| Letter::In(j + in_shift, b + black_shift)));
    w.extend(g.e_out.iter().map(|&(b, i)| Letter::Out(b + black_shift, i + out_shift)));
    w
}

/// stable partition into [blacks][ins][outs]; blacks must come out in order
fn graph_of_word(w: &[Letter], m: usize, n: usize, k: usize, e_int: Vec<(u8, u8)>, wheels: bool) -> (PropGraph, i8) {
    let rank = |l: &Letter| match l {
        Letter::Black(_) => 0,
        Letter::In(..) => 1,
        Letter::Out(..) => 2,
    };
    // sign of the stable sort by rank, then of sorting the blacks
    let mut sign = 1i8;
    let ranks: Vec<u8> = w.iter().map(rank).collect();
    for a in 0..ranks.len() {
        for b in a + 1..ranks.len() {
            if ranks[a] > ranks[b] {
                sign = -sign;
            }
        }
    }
    let blacks: Vec<u8> = w
        .iter()
        .filter_map(|l| match l {
            Letter::Black(b) => Some(*b),
            _ => None,
        })
        .collect();
    sign *= sort_sign(&blacks);
    let e_in = w
        .iter()
        .filter_map(|l| match l {
            Letter::In(j, b) => Some((*j, *b)),
            _ => None,
        })
        .collect();
    let e_out = w
        .iter()
        .filter_map(|l| match l {
            Letter::Out(b, i) => Some((*b, *i)),
            _ => None,
        })
        .collect();
    (PropGraph { m, n, k, e_in, e_int, e_out, wheels_allowed: wheels }, sign)
}

// ---------------------------------------------------------------- compositions

/// disjoint union, g2's whites placed after g1's
pub fn horizontal_compose(g1: &PropGraph, g2: &PropGraph) -> Result<PropVector> {
    let (m, n, k) = (g1.m + g2.m, g1.n + g2.n, g1.k + g2.k);
    if m > 250 || n > 250 || k > 250 {
        return Err(Error::Structural("too many vertices".into()));
    }
    let mut w = word_of(g1, 0, 0, 0);
    w.extend(word_of(g2, g1.k as u8, g1.n as u8, g1.m as u8));
    let mut e_int = g1.e_int.clone();
    e_int.extend(g2.e_int.iter().map(|&(a, b)| (a + g1.k as u8, b + g1.k as u8)));
    let (g, s) = graph_of_word(&w, m, n, k, e_int, g1.wheels_allowed || g2.wheels_allowed);
    let mut v = PropVector::zero();
    v.add_graph(&g, &q::q(s as i64))?;
    Ok(v)
}

/// g1 of signature (m,n) on top of g2 of signature (n,l): in-legs of g1 and
/// out-legs of g2 with the same label may join into internal edges, the
/// remaining g1 in-legs go to the l in-whites and the remaining g2 out-legs
/// to the m out-whites
pub fn vertical_compose(g1: &PropGraph, g2: &PropGraph) -> Result<PropVector> {
    if g1.n != g2.m {
        return Err(Error::Arity(format!("cannot compose ({},{}) after ({},{})", g1.m, g1.n, g2.m, g2.n)));
    }
    let (m, l) = (g1.m, g2.n);
    let k = g1.k + g2.k;
    if k > 250 {
        return Err(Error::Structural("too many vertices".into()));
    }
    let wheels = g1.wheels_allowed || g2.wheels_allowed;
    let sh = g1.k as u8;
    let w1 = word_of(g1, 0, 0, 0);
    let w2 = word_of(g2, sh, 0, 0);
    let base: Vec<Letter> = w1.iter().chain(w2.iter()).copied().collect();
    let ins1: Vec<usize> = (0..base.len()).filter(|&p| p < w1.len() && matches!(base[p], Letter::In(..))).collect();
    let outs2: Vec<usize> = (w1.len()..base.len()).filter(|&p| matches!(base[p], Letter::Out(..))).collect();
    let mut e_int0 = g1.e_int.clone();
    e_int0.extend(g2.e_int.iter().map(|&(a, b)| (a + sh, b + sh)));

    let mut out = PropVector::zero();
    // partner[i] for each g1 in-leg: None (goes to an in-white) or an index into outs2
    let mut partner: Vec<Option<usize>> = vec![None; ins1.len()];
    let mut used = vec![false; outs2.len()];
    fn label_in(l: &Letter) -> u8 {
        match l {
            Letter::In(j, _) => *j,
            _ => unreachable!(),
        }
    }
    fn label_out(l: &Letter) -> u8 {
        match l {
            Letter::Out(_, i) => *i,
            _ => unreachable!(),
        }
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        t: usize,
        ins1: &[usize],
        outs2: &[usize],
        base: &[Letter],
        partner: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        emit: &mut dyn FnMut(&[Option<usize>]) -> Result<()>,
    ) -> Result<()> {
        if t == ins1.len() {
            return emit(partner);
        }
        partner[t] = None;
        rec(t + 1, ins1, outs2, base, partner, used, emit)?;
        for (u, &p) in outs2.iter().enumerate() {
            if !used[u] && label_out(&base[p]) == label_in(&base[ins1[t]]) {
                used[u] = true;
                partner[t] = Some(u);
                rec(t + 1, ins1, outs2, base, partner, used, emit)?;
                used[u] = false;
                partner[t] = None;
            }
        }
        Ok(())
    }
    let mut emit = |partner: &[Option<usize>]| -> Result<()> {
        // pairs to the front, then drop them
        let mut front: Vec<usize> = Vec::new();
        let mut e_int = e_int0.clone();
        let mut paired = vec![false; base.len()];
        for (t, p) in partner.iter().enumerate() {
            if let Some(u) = p {
                let (a, b) = (ins1[t], outs2[*u]);
                front.push(a);
                front.push(b);
                paired[a] = true;
                paired[b] = true;
                let top = match base[a] {
                    Letter::In(_, bl) => bl,
                    _ => unreachable!(),
                };
                let bottom = match base[b] {
                    Letter::Out(bl, _) => bl,
                    _ => unreachable!(),
                };
                e_int.push((bottom, top));
            }
        }
        let order: Vec<usize> = front.iter().copied().chain((0..base.len()).filter(|p| !paired[*p])).collect();
        let pair_sign = perm_sign(&order);
        if !wheels && !acyclic(k, &e_int) {
            return Ok(());
        }
        let rest: Vec<usize> = (0..base.len()).filter(|p| !paired[*p]).collect();
        // free legs: g1 in-legs to l in-whites, g2 out-legs to m out-whites
        let free: Vec<usize> = rest
            .iter()
            .copied()
            .filter(|&p| (p < w1.len() && matches!(base[p], Letter::In(..))) || (p >= w1.len() && matches!(base[p], Letter::Out(..))))
            .collect();
        let choices: Vec<usize> = free.iter().map(|&p| if p < w1.len() { l } else { m }).collect();
        if choices.iter().any(|&c| c == 0) {
            return Ok(());
        }
        let mut pick = vec![0usize; free.len()];
        loop {
            let mut w: Vec<Letter> = Vec::with_capacity(rest.len());
            let mut fi = 0;
            for &p in &rest {
                let mut letter = base[p];
                if fi < free.len() && free[fi] == p {
                    letter = match letter {
                        Letter::In(_, b) => Letter::In(pick[fi] as u8, b),
                        Letter::Out(b, _) => Letter::Out(b, pick[fi] as u8),
                        x => x,
                    };
                    fi += 1;
                }
                w.push(letter);
            }
            let (g, s) = graph_of_word(&w, m, l, k, e_int.clone(), wheels);
            out.add_graph(&g, &q::q((s * pair_sign) as i64))?;
            let mut t = 0;
            loop {
                if t == pick.len() {
                    return Ok(());
                }
                pick[t] += 1;
                if pick[t] < choices[t] {
                    break;
                }
                pick[t] = 0;
                t += 1;
            }
        }
    };
    rec(0, &ins1, &outs2, &base, &mut partner, &mut used, &mut emit)?;
    Ok(out)
}

/// (m,n)-fold composition with vectors
pub fn vertical_compose_vec(a: &PropVector, b: &PropVector) -> Result<PropVector> {
    let mut out = PropVector::zero();
    for (g1, c1) in &a.terms {
        for (g2, c2) in &b.terms {
            out = out.plus(&vertical_compose(g1, g2)?.scale(&(c1 * c2)));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------- substitution

/// replace black p by the labeled graph γ, its vertices taking positions
/// p..p+|γ|, and hang p's edges on γ's vertices in every way; new vertices
/// must have an input, an output and valence ≥ min_valence
fn substitute(g: &PropGraph, p: usize, gamma: &DirectedGraph, min_valence: usize) -> Vec<(PropGraph, i8)> {
    let kg = gamma.k;
    let k = g.k + kg - 1;
    let shift = |b: u8| -> u8 {
        if (b as usize) < p {
            b
        } else {
            b + kg as u8 - 1
        }
    };
    // half-edges at p: (list, index, is_head_at_p)
    #[derive(Clone, Copy)]
    enum Half {
        In(usize),
        IntHead(usize),
        IntTail(usize),
        Out(usize),
    }
    let mut halves = Vec::new();
    let mut e_in: Vec<(u8, u8)> = g.e_in.iter().map(|&(j, b)| (j, if b as usize == p { 0 } else { shift(b) })).collect();
    let mut e_out: Vec<(u8, u8)> = g.e_out.iter().map(|&(b, i)| (if b as usize == p { 0 } else { shift(b) }, i)).collect();
    let mut e_int: Vec<(u8, u8)> = g
        .e_int
        .iter()
        .map(|&(a, b)| (if a as usize == p { 0 } else { shift(a) }, if b as usize == p { 0 } else { shift(b) }))
        .collect();
    for (x, &(_, b)) in g.e_in.iter().enumerate() {
        if b as usize == p {
            halves.push(Half::In(x));
        }
    }
    for (x, &(a, b)) in g.e_int.iter().enumerate() {
        if b as usize == p {
            halves.push(Half::IntHead(x));
        }
        if a as usize == p {
            halves.push(Half::IntTail(x));
        }
    }
    for (x, &(b, _)) in g.e_out.iter().enumerate() {
        if b as usize == p {
            halves.push(Half::Out(x));
        }
    }
    e_int.extend(gamma.edges.iter().map(|&(a, b)| (a + p as u8, b + p as u8)));
    let sign: i8 = if (kg - 1) * p % 2 == 1 { -1 } else { 1 };
    let mut out = Vec::new();
    let nh = halves.len();
    let total = kg.checked_pow(nh as u32).unwrap_or(usize::MAX);
    let mut choice = vec![0usize; nh];
    for _ in 0..total {
        for (h, &c) in halves.iter().zip(&choice) {
            let v = (p + c) as u8;
            match *h {
                Half::In(x) => e_in[x].1 = v,
                Half::IntHead(x) => e_int[x].1 = v,
                Half::IntTail(x) => e_int[x].0 = v,
                Half::Out(x) => e_out[x].0 = v,
            }
        }
        let h = PropGraph {
            m: g.m,
            n: g.n,
            k,
            e_in: e_in.clone(),
            e_int: e_int.clone(),
            e_out: e_out.clone(),
            wheels_allowed: g.wheels_allowed,
        };
        let vals = h.black_valences();
        let ok = (p..p + kg).all(|v| vals[v].0 >= 1 && vals[v].1 >= 1 && vals[v].0 + vals[v].1 >= min_valence);
        if ok && (h.wheels_allowed || acyclic(k, &h.e_int)) {
            out.push((h, sign));
        }
        for c in choice.iter_mut() {
            *c += 1;
            if *c < kg {
                break;
            }
            *c = 0;
        }
    }
    out
}

fn edge_graph() -> DirectedGraph {
    DirectedGraph::new(2, vec![(0, 1)]).expect("valid")
}

/// splitting differential: each black is replaced by tail→head, keeping only
/// splittings into valid generators
pub fn d_lieb_diff(v: &PropVector) -> Result<PropVector> {
    derivation(v, &edge_graph(), 3)
}

/// the derivation induced by a labeled graph γ, acting on every black
pub fn derivation(v: &PropVector, gamma: &DirectedGraph, min_valence: usize) -> Result<PropVector> {
    let mut out = PropVector::zero();
    for (g, c) in &v.terms {
        for p in 0..g.k {
            for (h, s) in substitute(g, p, gamma, min_valence) {
                out.add_graph(&h, &(c * q::q(s as i64)))?;
            }
        }
    }
    Ok(out)
}

pub fn lieb_infty_diff(c: &Corolla) -> Result<DecoratedTreeVector> {
    let c = Corolla::new(c.m, c.n)?;
    d_lieb_diff(&PropVector::from_graph(&c.graph())?)
}

/// the (m,n) part of f(Γ): legs hung on Γ's vertices in every way; vertices
/// need an input and an output, and valence ≥ 3 except in the (1,1) part,
/// which lives in the extension by the bivalent generator
pub fn attach_legs(g: &SignedGraphClass, m: usize, n: usize) -> Result<DecoratedTreeVector> {
    if g.d != 3 {
        return Err(Error::FlavorMismatch(3, g.d));
    }
    let mut out = PropVector::zero();
    if g.zero || m > 250 || n > 250 {
        return Ok(out);
    }
    let k = g.graph.k;
    let min_val = if (m, n) == (1, 1) { 2 } else { 3 };
    let corolla = PropGraph {
        m,
        n,
        k: 1,
        e_in: (0..n).map(|j| (j as u8, 0)).collect(),
        e_int: vec![],
        e_out: (0..m).map(|i| (0, i as u8)).collect(),
        wheels_allowed: false,
    };
    if !acyclic(k, &g.graph.edges) {
        return Ok(out);
    }
    for (h, s) in substitute(&corolla, 0, &g.graph, min_val) {
        out.add_graph(&h, &q::q((s * g.sign) as i64))?;
    }
    Ok(out)
}

/// Ĝ^or_{4p+2,6p+1} with the hat filters, optionally valence ≤ 3
pub fn enumerate_quantizable_sets(p: usize, max_valence_3: bool) -> Result<Vec<SignedGraphClass>> {
    if p == 0 {
        return Err(Error::Invalid("p must be at least 1".into()));
    }
    if p >= 3 {
        return Err(Error::Resource(format!("p = {p} is beyond the enumeration budget")));
    }
    let mut f = FilterSet::hat_g();
    f.max_valence_3 = max_valence_3;
    enumerate_graphs_bounded(4 * p + 2, 6 * p + 1, 3, &f, crate::graphcore::DEFAULT_ENUM_BOUND)
}

/// Υ₁₀^{2,2}, Υ₁₀^{3,1}, Υ₁₀^{1,3}, the p = 2 wheel-type examples
pub fn upsilon10_examples() -> Vec<(&'static str, DirectedGraph)> {
    let a: [(usize, usize); 13] =
        [(2, 1), (3, 1), (4, 2), (3, 5), (4, 6), (7, 5), (6, 8), (9, 7), (10, 8), (9, 10), (1, 10), (2, 7), (3, 6)];
    let mut b = a;
    b[7] = (7, 9);
    b[9] = (10, 9);
    let c: Vec<(usize, usize)> = b.iter().map(|&(x, y)| (y, x)).collect();
    vec![
        ("2,2", DirectedGraph::from_one_based(10, &a).expect("valid")),
        ("3,1", DirectedGraph::from_one_based(10, &b).expect("valid")),
        ("1,3", DirectedGraph::from_one_based(10, &c).expect("valid")),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrees() {
        assert_eq!(Corolla::new(1, 2).unwrap().graph().degree(), 0);
        assert_eq!(PropGraph::empty(2, 3).degree(), 0);
    }

    #[test]
    fn encode_roundtrip() {
        let g = Corolla::new(2, 2).unwrap().graph();
        assert_eq!(PropGraph::decode(&g.encode()).unwrap(), g);
        assert!(PropGraph::decode("m1;n1;k1;Ein:2>1;Eint:;Eout:1>1").is_err());
    }

    #[test]
    fn corolla_rules() {
        assert!(Corolla::new(1, 1).is_err());
        assert!(Corolla::new(0, 3).is_err());
        assert!(lieb_infty_diff(&Corolla { m: 2, n: 1 }).unwrap().is_zero());
    }
}
