//! the algebras A_d^(n) of functions in x^i, ψ_i, the Schouten-type bracket,
//! graphs acting as polydifferential operators and induced L∞ brackets

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graphcore::{DirectedGraph, Parity, SignedGraphClass};
use crate::q::{self, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub d: i32,
    pub n: usize,
    /// (|x_i|, |ψ_i|)
    pub degrees: Vec<(i32, i32)>,
    /// maximal total polynomial degree in x, ψ
    pub truncation: usize,
    /// maximal power of ħ kept
    pub hbar_order: usize,
}

impl GeneratorSpec {
    pub fn new(d: i32, degrees: Vec<(i32, i32)>, truncation: usize) -> Result<Self> {
        if truncation < 1 {
            return Err(Error::SpecMismatch("truncation must be at least 1".into()));
        }
        for (i, &(a, b)) in degrees.iter().enumerate() {
            if a + b != d - 1 {
                return Err(Error::SpecMismatch(format!("|x{}|+|psi{}| = {} but d-1 = {}", i + 1, i + 1, a + b, d - 1)));
            }
        }
        Ok(GeneratorSpec { d, n: degrees.len(), degrees, truncation, hbar_order: 0 })
    }

    /// every x of degree `x_deg`
    pub fn uniform(d: i32, n: usize, x_deg: i32, truncation: usize) -> Result<Self> {
        GeneratorSpec::new(d, vec![(x_deg, d - 1 - x_deg); n], truncation)
    }

    pub fn with_hbar(mut self, order: usize) -> Self {
        self.hbar_order = order;
        self
    }

    /// generator g = 2i is x^i, g = 2i+1 is ψ_i
    pub fn gen_degree(&self, g: usize) -> i32 {
        let (a, b) = self.degrees[g / 2];
        if g % 2 == 0 {
            a
        } else {
            b
        }
    }

    pub fn is_odd(&self, g: usize) -> bool {
        self.gen_degree(g).rem_euclid(2) == 1
    }

    pub fn ngens(&self) -> usize {
        2 * self.n
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mono {
    pub e: Vec<u16>,
    pub h: u16,
}

impl Mono {
    pub fn one(ngens: usize) -> Self {
        Mono { e: vec![0; ngens], h: 0 }
    }

    pub fn total_degree(&self) -> usize {
        self.e.iter().map(|&x| x as usize).sum()
    }

    pub fn grading(&self, spec: &GeneratorSpec) -> i32 {
        self.e.iter().enumerate().map(|(g, &x)| x as i32 * spec.gen_degree(g)).sum()
    }
}

/// product of monomials in generator order, with its Koszul sign
pub fn mono_mul(a: &Mono, b: &Mono, spec: &GeneratorSpec) -> Option<(Mono, i8)> {
    let mut sign = 1i8;
    let mut odd_in_a_after = 0usize;
    // count pairs (g in a, g' in b) odd with g > g'
    let ng = a.e.len();
    let mut suffix = vec![0usize; ng + 1];
    for g in (0..ng).rev() {
        suffix[g] = suffix[g + 1] + usize::from(spec.is_odd(g) && a.e[g] > 0);
    }
    for g in 0..ng {
        if spec.is_odd(g) && b.e[g] > 0 {
            if a.e[g] > 0 {
                return None;
            }
            odd_in_a_after += suffix[g + 1];
        }
    }
    if odd_in_a_after % 2 == 1 {
        sign = -1;
    }
    let e = a.e.iter().zip(&b.e).map(|(x, y)| x + y).collect();
    Some((Mono { e, h: a.h + b.h }, sign))
}

/// left derivative ∂/∂g: (monomial, integer factor with sign)
pub fn mono_deriv(m: &Mono, g: usize, spec: &GeneratorSpec) -> Option<(Mono, i64)> {
    if m.e[g] == 0 {
        return None;
    }
    let mut out = m.clone();
    if spec.is_odd(g) {
        let before = (0..g).filter(|&h| spec.is_odd(h) && m.e[h] > 0).count();
        out.e[g] = 0;
        Some((out, if before % 2 == 1 { -1 } else { 1 }))
    } else {
        let c = m.e[g] as i64;
        out.e[g] -= 1;
        Some((out, c))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperPolynomial {
    pub spec: GeneratorSpec,
    pub terms: BTreeMap<Mono, Q>,
}

impl SuperPolynomial {
    pub fn zero(spec: &GeneratorSpec) -> Self {
        SuperPolynomial { spec: spec.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(spec: &GeneratorSpec, c: Q) -> Self {
        let mut p = SuperPolynomial::zero(spec);
        p.add_mono(Mono::one(spec.ngens()), c);
        p
    }

    pub fn generator(spec: &GeneratorSpec, g: usize) -> Self {
        let mut m = Mono::one(spec.ngens());
        m.e[g] = 1;
        let mut p = SuperPolynomial::zero(spec);
        p.add_mono(m, Q::one());
        p
    }

    pub fn x(spec: &GeneratorSpec, i: usize) -> Self {
        SuperPolynomial::generator(spec, 2 * i)
    }

    pub fn psi(spec: &GeneratorSpec, i: usize) -> Self {
        SuperPolynomial::generator(spec, 2 * i + 1)
    }

    pub fn hbar(spec: &GeneratorSpec) -> Self {
        let mut m = Mono::one(spec.ngens());
        m.h = 1;
        let mut p = SuperPolynomial::zero(spec);
        p.add_mono(m, Q::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn fits(&self, m: &Mono) -> bool {
        m.total_degree() <= self.spec.truncation && m.h as usize <= self.spec.hbar_order
    }

    /// add a term, dropping it when it lies beyond the truncation
    pub fn add_mono(&mut self, m: Mono, c: Q) {
        if c.is_zero() || !self.fits(&m) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
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

    fn check(&self, other: &SuperPolynomial) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch("operands use different generator specs".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &SuperPolynomial) -> Result<SuperPolynomial> {
        self.check(other)?;
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_mono(m.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn sub(&self, other: &SuperPolynomial) -> Result<SuperPolynomial> {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> SuperPolynomial {
        let mut r = SuperPolynomial::zero(&self.spec);
        for (m, x) in &self.terms {
            r.add_mono(m.clone(), x * c);
        }
        r
    }

    pub fn mul(&self, other: &SuperPolynomial) -> Result<SuperPolynomial> {
        self.check(other)?;
        let mut r = SuperPolynomial::zero(&self.spec);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some((m, s)) = mono_mul(a, b, &self.spec) {
                    r.add_mono(m, q::q(s as i64) * ca * cb);
                }
            }
        }
        Ok(r)
    }

    /// left partial derivative in generator g
    pub fn deriv(&self, g: usize) -> SuperPolynomial {
        let mut r = SuperPolynomial::zero(&self.spec);
        for (m, c) in &self.terms {
            if let Some((m2, f)) = mono_deriv(m, g, &self.spec) {
                r.add_mono(m2, c * q::q(f));
            }
        }
        r
    }

    /// the grading if homogeneous
    pub fn grading(&self) -> Option<i32> {
        let gs: BTreeSet<i32> = self.terms.keys().map(|m| m.grading(&self.spec)).collect();
        match gs.len() {
            0 => Some(0),
            1 => gs.into_iter().next(),
            _ => None,
        }
    }

    /// split into homogeneous components
    pub fn components(&self) -> BTreeMap<i32, SuperPolynomial> {
        let mut out: BTreeMap<i32, SuperPolynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.grading(&self.spec))
                .or_insert_with(|| SuperPolynomial::zero(&self.spec))
                .add_mono(m.clone(), c.clone());
        }
        out
    }

    /// same polynomial under a smaller truncation
    pub fn truncate(&self, truncation: usize) -> SuperPolynomial {
        let mut spec = self.spec.clone();
        spec.truncation = truncation;
        let mut r = SuperPolynomial::zero(&spec);
        for (m, c) in &self.terms {
            r.add_mono(m.clone(), c.clone());
        }
        r
    }

    /// coefficient of ħ^j, as a polynomial without ħ
    pub fn hbar_coeff(&self, j: usize) -> SuperPolynomial {
        let mut r = SuperPolynomial::zero(&self.spec);
        for (m, c) in &self.terms {
            if m.h as usize == j {
                let mut m2 = m.clone();
                m2.h = 0;
                r.add_mono(m2, c.clone());
            }
        }
        r
    }

    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (m, c) in &self.terms {
            let mut fs = Vec::new();
            for (g, &x) in m.e.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                let name = if g % 2 == 0 { format!("x{}", g / 2 + 1) } else { format!("psi{}", g / 2 + 1) };
                fs.push(if x == 1 { name } else { format!("{name}^{x}") });
            }
            if m.h > 0 {
                fs.push(if m.h == 1 { "h".to_string() } else { format!("h^{}", m.h) });
            }
            if fs.is_empty() {
                fs.push("1".into());
            }
            parts.push(format!("{} * {}", q::fmt(c), fs.join(" ")));
        }
        parts.join(" + ")
    }

    /// inverse of `to_text`
    pub fn parse(s: &str, spec: &GeneratorSpec) -> Result<SuperPolynomial> {
        let mut p = SuperPolynomial::zero(spec);
        let s = s.trim();
        if s == "0" || s.is_empty() {
            return Ok(p);
        }
        for term in s.split(" + ") {
            let (c, fs) = match term.split_once('*') {
                Some((c, f)) => (c.trim(), f.trim()),
                None => (term.trim(), "1"),
            };
            let coeff = q::parse(c)?;
            let mut m = Mono::one(spec.ngens());
            for tok in fs.split_whitespace() {
                if tok == "1" {
                    continue;
                }
                let (name, pow) = match tok.split_once('^') {
                    Some((a, b)) => {
                        (a, b.parse::<u16>().map_err(|_| Error::Parse(format!("bad exponent in '{tok}'")))?)
                    }
                    None => (tok, 1),
                };
                if name == "h" {
                    m.h = m.h.checked_add(pow).ok_or_else(|| Error::Parse("exponent overflow".into()))?;
                    continue;
                }
                let (base, idx) = if let Some(r) = name.strip_prefix("psi") {
                    (1, r)
                } else if let Some(r) = name.strip_prefix('x') {
                    (0, r)
                } else {
                    return Err(Error::Parse(format!("unknown generator '{name}'")));
                };
                let i: usize = idx.parse().map_err(|_| Error::Parse(format!("bad index in '{name}'")))?;
                if i == 0 || i > spec.n {
                    return Err(Error::Parse(format!("generator '{name}' outside n={}", spec.n)));
                }
                let g = 2 * (i - 1) + base;
                let e = m.e[g].checked_add(pow).ok_or_else(|| Error::Parse("exponent overflow".into()))?;
                if spec.is_odd(g) && e > 1 {
                    // odd generators square to zero
                    m.e[g] = 2;
                } else {
                    m.e[g] = e;
                }
            }
            if m.e.iter().enumerate().any(|(g, &x)| spec.is_odd(g) && x > 1) {
                continue;
            }
            p.add_mono(m, coeff);
        }
        Ok(p)
    }
}

impl fmt::Display for SuperPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

fn koszul(a: i32, b: i32) -> i64 {
    if (a * b).rem_euclid(2) == 1 {
        -1
    } else {
        1
    }
}

/// [f1,f2] = Σ_a (−1)^{|ψ_a||f1|} ∂_{x^a}f1 ∂_{ψ_a}f2
///         + (−1)^d (−1)^{|x^a|(|f1|+|ψ_a|)} ∂_{ψ_a}f1 ∂_{x^a}f2
/// with left derivatives; extended bilinearly over homogeneous parts of f1
pub fn schouten(f1: &SuperPolynomial, f2: &SuperPolynomial) -> Result<SuperPolynomial> {
    f1.check(f2)?;
    let spec = &f1.spec;
    let sd = if spec.d.rem_euclid(2) == 0 { 1 } else { -1 };
    let mut out = SuperPolynomial::zero(spec);
    for (deg1, h1) in f1.components() {
        for a in 0..spec.n {
            let (dx, dp) = spec.degrees[a];
            let t1 = h1.deriv(2 * a).mul(&f2.deriv(2 * a + 1))?;
            out = out.add(&t1.scale(&q::q(koszul(dp, deg1))))?;
            let t2 = h1.deriv(2 * a + 1).mul(&f2.deriv(2 * a))?;
            out = out.add(&t2.scale(&q::q(sd * koszul(dx, deg1 + dp))))?;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------- Φ

/// Φ_Γ on a labeled graph: m ∘ Δ_{e1} ∘ ... ∘ Δ_{el}, where Δ_{i→j} is
/// Σ_a ∂_{x^a} on slot i after ∂_{ψ_a} on slot j
pub fn phi_labeled(g: &DirectedGraph, args: &[SuperPolynomial]) -> Result<SuperPolynomial> {
    if args.len() != g.k {
        return Err(Error::Arity(format!("graph has {} vertices but {} arguments", g.k, args.len())));
    }
    let spec = args[0].spec.clone();
    for a in args {
        if a.spec != spec {
            return Err(Error::SpecMismatch("arguments use different generator specs".into()));
        }
    }
    let mut out = SuperPolynomial::zero(&spec);
    // iterate over tuples of monomials
    let lists: Vec<Vec<(&Mono, &Q)>> = args.iter().map(|a| a.terms.iter().collect()).collect();
    if lists.iter().any(|l| l.is_empty()) {
        return Ok(out);
    }
    let mut idx = vec![0usize; g.k];
    loop {
        let mut coeff = Q::one();
        let mut monos = Vec::with_capacity(g.k);
        for (s, &i) in idx.iter().enumerate() {
            coeff *= lists[s][i].1;
            monos.push(lists[s][i].0.clone());
        }
        for (m, c) in phi_monos(&g.edges, monos, &spec) {
            out.add_mono(m, c * &coeff);
        }
        // next tuple
        let mut s = 0;
        loop {
            if s == g.k {
                return Ok(out);
            }
            idx[s] += 1;
            if idx[s] < lists[s].len() {
                break;
            }
            idx[s] = 0;
            s += 1;
        }
    }
}

fn phi_monos(edges: &[(u8, u8)], monos: Vec<Mono>, spec: &GeneratorSpec) -> Vec<(Mono, Q)> {
    let mut states: Vec<(i64, Vec<Mono>)> = vec![(1, monos)];
    for &(t, h) in edges.iter().rev() {
        let (t, h) = (t as usize, h as usize);
        let mut next = Vec::new();
        for (c, ms) in &states {
            for a in 0..spec.n {
                let (gx, gp) = (2 * a, 2 * a + 1);
                // ∂ψ_a on slot h
                let Some((mh, f1)) = mono_deriv(&ms[h], gp, spec) else { continue };
                let before: i32 = ms[..h].iter().map(|m| m.grading(spec)).sum();
                let s1 = koszul(spec.gen_degree(gp), before);
                let mut ms2 = ms.clone();
                ms2[h] = mh;
                // ∂x^a on slot t
                let Some((mt, f2)) = mono_deriv(&ms2[t], gx, spec) else { continue };
                let before: i32 = ms2[..t].iter().map(|m| m.grading(spec)).sum();
                let s2 = koszul(spec.gen_degree(gx), before);
                ms2[t] = mt;
                next.push((c * f1 * s1 * f2 * s2, ms2));
            }
        }
        states = next;
        if states.is_empty() {
            break;
        }
    }
    let mut out = Vec::new();
    for (c, ms) in states {
        let mut acc = Mono::one(spec.ngens());
        let mut sign = c;
        let mut ok = true;
        for m in &ms {
            match mono_mul(&acc, m, spec) {
                Some((p, s)) => {
                    acc = p;
                    sign *= s as i64;
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && sign != 0 {
            out.push((acc, q::q(sign)));
        }
    }
    out
}

pub fn phi_apply(g: &SignedGraphClass, args: &[SuperPolynomial]) -> Result<SuperPolynomial> {
    if let Some(a) = args.first() {
        if a.spec.d != g.d {
            return Err(Error::FlavorMismatch(g.d, a.spec.d));
        }
    }
    if g.zero {
        if args.len() != g.graph.k {
            return Err(Error::Arity(format!("graph has {} vertices but {} arguments", g.graph.k, args.len())));
        }
        return Ok(SuperPolynomial::zero(&args[0].spec));
    }
    Ok(phi_labeled(&g.graph, args)?.scale(&q::q(g.sign as i64)))
}

// ---------------------------------------------------------------- L∞

#[derive(Clone, Debug, Default)]
pub struct WeightedLinfty {
    /// arities up to this bound are authoritative; absent entries mean zero
    pub max_arity: usize,
    pub arity_to_terms: BTreeMap<usize, Vec<(SignedGraphClass, Q)>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArityStatus {
    Defined,
    /// arity beyond what the structure describes; result is zero
    Undefined,
}

impl WeightedLinfty {
    pub fn new(max_arity: usize) -> Self {
        WeightedLinfty { max_arity, arity_to_terms: BTreeMap::new() }
    }

    pub fn push(&mut self, g: SignedGraphClass, w: Q) -> Result<()> {
        let k = g.graph.k;
        if k > self.max_arity {
            self.max_arity = k;
        }
        self.arity_to_terms.entry(k).or_default().push((g, w));
        Ok(())
    }

    /// floating weights are converted exactly
    pub fn push_f64(&mut self, g: SignedGraphClass, w: f64) -> Result<()> {
        self.push(g, q::from_f64(w)?)
    }

    /// the Schouten structure: the single edge with weight 1
    pub fn schouten(d: i32) -> Self {
        let mut l = WeightedLinfty::new(2);
        let g = crate::graphcore::canonicalize(&DirectedGraph::raw(2, vec![(0, 1)]), d).expect("valid");
        l.push(g, Q::one()).expect("valid");
        l
    }
}

/// all distinct labelings σΓ of a graph, with their orientation signs
pub fn labelings(g: &DirectedGraph, d: i32) -> Vec<(DirectedGraph, i8)> {
    let k = g.k;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut perm: Vec<u8> = (0..k as u8).collect();
    loop {
        let h = g.relabel(&perm);
        let mut key = h.edges.clone();
        key.sort_unstable();
        if seen.insert(key) {
            let s = match Parity::of(d) {
                Parity::EdgeOrder => 1,
                Parity::VertexOrder => {
                    crate::graphcore::perm_sign(&perm.iter().map(|&x| x as usize).collect::<Vec<_>>())
                }
            };
            out.push((h, s));
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    out
}

pub(crate) fn next_permutation(p: &mut [u8]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// μ_k(args) = Σ_Γ w_Γ Σ_σ ±Φ_{σΓ}(args)
pub fn linfty_apply(l: &WeightedLinfty, k: usize, args: &[SuperPolynomial]) -> Result<(SuperPolynomial, ArityStatus)> {
    let Some(first) = args.first() else {
        return Err(Error::Arity("no arguments".into()));
    };
    if args.len() != k {
        return Err(Error::Arity(format!("arity {k} with {} arguments", args.len())));
    }
    let spec = first.spec.clone();
    if k > l.max_arity {
        return Ok((SuperPolynomial::zero(&spec), ArityStatus::Undefined));
    }
    let mut out = SuperPolynomial::zero(&spec);
    if let Some(terms) = l.arity_to_terms.get(&k) {
        for (g, w) in terms {
            if g.zero {
                continue;
            }
            if g.d != spec.d {
                return Err(Error::FlavorMismatch(g.d, spec.d));
            }
            for (h, s) in labelings(&g.graph, g.d) {
                let v = phi_labeled(&h, args)?;
                out = out.add(&v.scale(&(w * q::q((s * g.sign) as i64))))?;
            }
        }
    }
    Ok((out, ArityStatus::Defined))
}

/// residuals of Σ_k (1/k!) ħ^{(k−2)/(2(d−1))} μ_k(π,...,π), one per ħ order
pub fn mc_check_quantizable(pi: &SuperPolynomial, l: &WeightedLinfty, order: usize) -> Result<Vec<SuperPolynomial>> {
    let spec = pi.spec.clone();
    if spec.hbar_order < order {
        return Err(Error::SpecMismatch(format!("spec keeps ħ only to order {}", spec.hbar_order)));
    }
    let step = 2 * (spec.d as usize - 1);
    let max_k = 2 + step * order;
    if l.max_arity < max_k {
        return Err(Error::Arity(format!("need arities through {max_k}, structure has {}", l.max_arity)));
    }
    let mut total = SuperPolynomial::zero(&spec);
    let mut p = 0usize;
    loop {
        let k = 2 + step * p;
        if k > max_k {
            break;
        }
        let args = vec![pi.clone(); k];
        let (v, _) = linfty_apply(l, k, &args)?;
        let mut hp = SuperPolynomial::constant(&spec, Q::one());
        for _ in 0..p {
            hp = hp.mul(&SuperPolynomial::hbar(&spec))?;
        }
        total = total.add(&v.mul(&hp)?.scale(&(Q::one() / q::factorial(k))))?;
        p += 1;
    }
    Ok((0..=order).map(|j| total.hbar_coeff(j)).collect())
}

/// γ = Σ C_{ij}^k ψ_k x^i x^j + Φ_k^{ij} x^k ψ_i ψ_j in A_3^(n) with all degrees 1;
/// `c[i][j][k]` holds C_{ij}^k and `phi[k][i][j]` holds Φ_k^{ij}
pub fn bialgebra_gamma(c: &[Vec<Vec<Q>>], phi: &[Vec<Vec<Q>>], spec: &GeneratorSpec) -> Result<SuperPolynomial> {
    if spec.d != 3 || spec.degrees.iter().any(|&d| d != (1, 1)) {
        return Err(Error::SpecMismatch("bialgebra element needs d=3 and |x|=|psi|=1".into()));
    }
    let n = spec.n;
    let shape_ok = |t: &[Vec<Vec<Q>>]| t.len() == n && t.iter().all(|a| a.len() == n && a.iter().all(|b| b.len() == n));
    if !shape_ok(c) || !shape_ok(phi) {
        return Err(Error::Invalid(format!("structure constants must be {n}x{n}x{n}")));
    }
    let x = |i| SuperPolynomial::x(spec, i);
    let p = |i| SuperPolynomial::psi(spec, i);
    let mut g = SuperPolynomial::zero(spec);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if !c[i][j][k].is_zero() {
                    g = g.add(&p(k).mul(&x(i))?.mul(&x(j))?.scale(&c[i][j][k]))?;
                }
                if !phi[k][i][j].is_zero() {
                    g = g.add(&x(k).mul(&p(i))?.mul(&p(j))?.scale(&phi[k][i][j]))?;
                }
            }
        }
    }
    Ok(g)
}
