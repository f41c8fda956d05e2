//! the acceptance suite: twelve checks, each reported as pass/fail with a
//! short detail line

use std::collections::BTreeSet;
use std::time::Instant;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::gcomplex::{
    bracket, check_delta_squared, cohomology_dim, differential, edge_class, m_element, mc_defect, mc_extend, upsilon4,
    FlavorSpec,
};
use crate::graphcore::{degree, enumerate_graphs, DirectedGraph, FilterSet, GraphVector, SignedGraphClass};
use crate::integrals::{
    lambda_p, mc_weight_halfplane, mc_weight_rd, sphere_propagator_integral, star_order1, BumpPropagator,
    HalfPlaneGraph, McConfig, Propagator, SphereKind,
};
use crate::polyrep::{
    bialgebra_gamma, linfty_apply, schouten, ArityStatus, GeneratorSpec, Mono, SuperPolynomial, WeightedLinfty,
};
use crate::polytopes::{associahedron, face_poset, f_vector, Cell, Family};
use crate::props::{
    canonicalize_prop, d_lieb_diff, enumerate_quantizable_sets, horizontal_compose, lieb_infty_diff, vertical_compose,
    vertical_compose_vec, Corolla, PropGraph, PropVector,
};
use crate::q::{self, Q};

pub const CRITERIA: usize = 12;

#[derive(Clone, Debug)]
pub struct Options {
    pub seed: u64,
    pub workers: usize,
    pub theta0: f64,
}

impl Default for Options {
    fn default() -> Self {
        Options { seed: 1, workers: 1, theta0: crate::integrals::DEFAULT_THETA0 }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Outcome {
    /// "[PASS] 4 upsilon4 cocycle: ..." without timing, so reports are reproducible
    pub fn line(&self) -> String {
        format!("[{}] {:>2} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.name, self.detail)
    }
}

pub fn name(id: usize) -> &'static str {
    match id {
        1 => "delta squared",
        2 => "[m,m] = 0",
        3 => "bracket laws",
        4 => "upsilon4 cocycle",
        5 => "upsilon6 and MC defect",
        6 => "Phi is the Schouten bracket",
        7 => "Lie bialgebra MC",
        8 => "D-prop",
        9 => "Lieb_infty differential",
        10 => "polytopes",
        11 => "quantizable graph counts",
        12 => "numerics",
        _ => "unknown",
    }
}

type Check = Result<(bool, String)>;

pub fn run(id: usize, opts: &Options) -> Outcome {
    let t = Instant::now();
    let r: Check = match id {
        1 => c1_delta_squared(),
        2 => c2_m_is_mc(),
        3 => c3_bracket_laws(opts.seed),
        4 => c4_upsilon4(),
        5 => c5_upsilon6(),
        6 => c6_schouten(opts.seed),
        7 => c7_bialgebra(),
        8 => c8_dprop(),
        9 => c9_lieb_infty(),
        10 => c10_polytopes(),
        11 => c11_quantizable_counts(),
        12 => c12_numerics(opts),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let (passed, detail) = r.unwrap_or_else(|e| (false, format!("error: {e}")));
    Outcome { id, name: name(id), passed, detail, seconds: t.elapsed().as_secs_f64() }
}

pub fn run_all(opts: &Options) -> Vec<Outcome> {
    (1..=CRITERIA).map(|i| run(i, opts)).collect()
}

// ---------------------------------------------------------------- graph complexes

fn c1_delta_squared() -> Check {
    let mut checked = 0;
    for f in ["dfGC_2", "dfGC_3", "GCor_2"] {
        let f: FlavorSpec = f.parse()?;
        for k in 1..=5 {
            for l in 0..=7 {
                checked += check_delta_squared(&f, k, l)?;
            }
        }
    }
    Ok((checked > 0, format!("δ² = 0 on {checked} basis classes")))
}

fn c2_m_is_mc() -> Check {
    let mut ok = true;
    for d in [2, 3] {
        ok &= bracket(&m_element(d), &m_element(d))?.is_zero();
    }
    Ok((ok, "d = 2, 3".into()))
}

fn vec_of(c: &SignedGraphClass) -> Result<GraphVector> {
    Ok(GraphVector::from_graph(&c.graph, c.d)?.scale(&q::q(c.sign as i64)))
}

fn deg(v: &GraphVector) -> i64 {
    v.iter().next().map(|(g, _)| degree(g, v.d)).unwrap_or(0)
}

fn koszul(a: i64, b: i64) -> Q {
    if (a * b).rem_euclid(2) == 1 {
        -Q::one()
    } else {
        Q::one()
    }
}

fn c3_bracket_laws(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = 0;
    let mut triples = 0;
    for d in [2, 3] {
        // basis classes grouped by vertex count; draws pick the count first
        let mut pool: Vec<Vec<GraphVector>> = Vec::new();
        for k in 1..=4 {
            let mut level = Vec::new();
            for l in 0..=4 {
                for c in enumerate_graphs(k, l, d, &FilterSet::none())? {
                    level.push(vec_of(&c)?);
                }
            }
            pool.push(level);
        }
        let draw = |rng: &mut ChaCha8Rng| -> GraphVector {
            let level = &pool[rng.gen_range(0..pool.len())];
            level[rng.gen_range(0..level.len())].clone()
        };
        for _ in 0..100 {
            let (a, b) = (draw(&mut rng), draw(&mut rng));
            let ab = bracket(&a, &b)?;
            let ba = bracket(&b, &a)?;
            if ab != ba.scale(&-koszul(deg(&a), deg(&b))) {
                return Ok((false, format!("antisymmetry fails for d = {d}")));
            }
            pairs += 1;
        }
        for _ in 0..25 {
            let (a, b, c) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
            let (da, db, dc) = (deg(&a), deg(&b), deg(&c));
            let t1 = bracket(&a, &bracket(&b, &c)?)?.scale(&koszul(da, dc));
            let t2 = bracket(&b, &bracket(&c, &a)?)?.scale(&koszul(db, da));
            let t3 = bracket(&c, &bracket(&a, &b)?)?.scale(&koszul(dc, db));
            if !t1.plus(&t2)?.plus(&t3)?.is_zero() {
                return Ok((false, format!("Jacobi fails for d = {d}")));
            }
            triples += 1;
        }
    }
    Ok((true, format!("antisymmetry on {pairs} pairs, Jacobi on {triples} triples")))
}

fn c4_upsilon4() -> Check {
    let f: FlavorSpec = "GCor_2".parse()?;
    let closed = differential(&upsilon4()).is_zero();
    let h = cohomology_dim(&f, 4, 5)?;
    Ok((closed && h.h_dim == 1, format!("δΥ₄ = 0: {closed}, H at (4,5) = {}", h.h_dim)))
}

fn c5_upsilon6() -> Check {
    let f: FlavorSpec = "GCor_2".parse()?;
    let u = edge_class(2).plus(&upsilon4())?;
    let y6 = mc_extend(&u, 6, &f)?;
    let rhs = bracket(&upsilon4(), &upsilon4())?.scale(&q::qf(-1, 2));
    let eq = differential(&y6) == rhs;
    let defect = mc_defect(&u.plus(&y6)?, 7)?;
    Ok((
        eq && defect.is_zero() && !y6.is_zero(),
        format!("Υ₆ has {} terms, δΥ₆ = −½[Υ₄,Υ₄]: {eq}, defect through 7 vertices: {}", y6.len(), defect.len()),
    ))
}

// ---------------------------------------------------------------- polyvector fields

fn monomials(s: &GeneratorSpec, max: usize) -> Vec<SuperPolynomial> {
    fn rec(s: &GeneratorSpec, g: usize, left: usize, e: &mut Vec<u16>, out: &mut Vec<SuperPolynomial>) {
        if g == e.len() {
            let mut p = SuperPolynomial::zero(s);
            p.add_mono(Mono { e: e.clone(), h: 0 }, Q::one());
            out.push(p);
            return;
        }
        let cap = if s.is_odd(g) { left.min(1) } else { left };
        for x in 0..=cap {
            e[g] = x as u16;
            rec(s, g + 1, left - x, e, out);
        }
        e[g] = 0;
    }
    let mut out = Vec::new();
    rec(s, 0, max, &mut vec![0; s.ngens()], &mut out);
    out
}

fn total_degree(p: &SuperPolynomial) -> usize {
    p.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
}

fn twisted(a: &SuperPolynomial, b: &SuperPolynomial) -> Result<SuperPolynomial> {
    let s = (a.spec.d - 1) * a.grading().unwrap_or(0);
    Ok(schouten(a, b)?.scale(&koszul(s as i64, 1)))
}

fn c6_schouten(seed: u64) -> Check {
    let specs = [GeneratorSpec::uniform(2, 2, 0, 6)?, GeneratorSpec::uniform(3, 2, 1, 6)?, GeneratorSpec::uniform(3, 2, 0, 6)?];
    let mut pairs = 0;
    for s in &specs {
        let l = WeightedLinfty::schouten(s.d);
        let ms = monomials(s, 3);
        for a in &ms {
            for b in &ms {
                if total_degree(a) + total_degree(b) > 3 {
                    continue;
                }
                let (v, st) = linfty_apply(&l, 2, &[a.clone(), b.clone()])?;
                if st != ArityStatus::Defined || v != schouten(a, b)? {
                    return Ok((false, format!("Φ differs from Schouten on {a} , {b}")));
                }
                pairs += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut triples = 0;
    for s in &specs {
        let dd = s.d - 1;
        let mono = |rng: &mut ChaCha8Rng| loop {
            let mut p = SuperPolynomial::constant(s, q::q(rng.gen_range(1..4)));
            for _ in 0..rng.gen_range(0..=3) {
                p = p.mul(&SuperPolynomial::generator(s, rng.gen_range(0..s.ngens()))).unwrap_or(p);
            }
            if !p.is_zero() {
                return p;
            }
        };
        let n = if s.d == 2 { 34 } else { 33 };
        for _ in 0..n {
            let (a, b, c) = (mono(&mut rng), mono(&mut rng), mono(&mut rng));
            let (da, db) = ((a.grading().unwrap_or(0) + dd) as i64, (b.grading().unwrap_or(0) + dd) as i64);
            let bc = twisted(&b, &c)?;
            let ab = twisted(&a, &b)?;
            let ac = twisted(&a, &c)?;
            let lhs = if bc.is_zero() { bc } else { twisted(&a, &bc)? };
            let r1 = if ab.is_zero() { ab } else { twisted(&ab, &c)? };
            let r2 = if ac.is_zero() { ac } else { twisted(&b, &ac)?.scale(&koszul(da, db)) };
            if lhs != r1.add(&r2)? {
                return Ok((false, format!("Jacobi fails on {a} , {b} , {c}")));
            }
            triples += 1;
        }
    }
    Ok((true, format!("{pairs} monomial pairs, Jacobi on {triples} triples")))
}

type T3 = Vec<Vec<Vec<Q>>>;

fn bialgebra(n: usize, bracket: &[(usize, usize, usize)], cobracket: &[(usize, usize, usize)]) -> (T3, T3) {
    let mut c = vec![vec![vec![Q::zero(); n]; n]; n];
    let mut phi = c.clone();
    for &(i, j, k) in bracket {
        c[i][j][k] = Q::one();
        c[j][i][k] = -Q::one();
    }
    for &(k, i, j) in cobracket {
        phi[k][i][j] = Q::one();
        phi[k][j][i] = -Q::one();
    }
    (c, phi)
}

fn gamma_square(c: &T3, phi: &T3) -> Result<SuperPolynomial> {
    let s = GeneratorSpec::uniform(3, c.len(), 1, 6)?;
    let g = bialgebra_gamma(c, phi, &s)?;
    schouten(&g, &g)
}

fn c7_bialgebra() -> Check {
    // [e1,e2] = e2, δ(e2) = e1∧e2
    let (c, phi) = bialgebra(2, &[(0, 1, 1)], &[(1, 0, 1)]);
    let good = gamma_square(&c, &phi)?.is_zero();
    // a central e3 with δ(e3) = e1∧e2 breaks the cocycle condition
    let (c, phi) = bialgebra(3, &[(0, 1, 1)], &[(1, 0, 1), (2, 0, 1)]);
    let bad = gamma_square(&c, &phi)?;
    Ok((good && !bad.is_zero(), format!("[γ,γ] = 0: {good}, perturbed [γ,γ] has {} terms", bad.terms.len())))
}

// ---------------------------------------------------------------- props

fn pg(m: usize, n: usize, k: usize, e_in: &[(u8, u8)], e_int: &[(u8, u8)], e_out: &[(u8, u8)]) -> PropGraph {
    PropGraph { m, n, k, e_in: e_in.to_vec(), e_int: e_int.to_vec(), e_out: e_out.to_vec(), wheels_allowed: false }
}

fn small_prop_graphs() -> Vec<PropGraph> {
    let mut out = vec![];
    for m in 0..=2usize {
        for n in 0..=2usize {
            for k in 0..=2usize {
                let ins: Vec<(u8, u8)> = (0..n as u8).flat_map(|j| (0..k as u8).map(move |b| (j, b))).collect();
                let outs: Vec<(u8, u8)> = (0..k as u8).flat_map(|b| (0..m as u8).map(move |i| (b, i))).collect();
                let ints: Vec<Vec<(u8, u8)>> =
                    if k == 2 { (0..=3).map(|r| vec![(0, 1); r]).collect() } else { vec![vec![]] };
                let pick = |s: u32, es: &[(u8, u8)]| -> Vec<(u8, u8)> {
                    es.iter().enumerate().filter(|(i, _)| s >> i & 1 == 1).map(|(_, e)| *e).collect()
                };
                for si in 0..1u32 << ins.len() {
                    for so in 0..1u32 << outs.len() {
                        for e_int in &ints {
                            out.push(pg(m, n, k, &pick(si, &ins), e_int, &pick(so, &outs)));
                        }
                    }
                }
            }
        }
    }
    out
}

fn parity(x: i64) -> Q {
    koszul(x, 1)
}

fn derivation_holds(g1: &PropGraph, g2: &PropGraph) -> Result<bool> {
    let s = parity(g1.degree());
    let (v1, v2) = (PropVector::from_graph(g1)?, PropVector::from_graph(g2)?);
    let (d1, d2) = (d_lieb_diff(&v1)?, d_lieb_diff(&v2)?);
    if g2.m == g1.n {
        let lhs = d_lieb_diff(&vertical_compose(g1, g2)?)?;
        let rhs = vertical_compose_vec(&d1, &v2)?.plus(&vertical_compose_vec(&v1, &d2)?.scale(&s));
        if lhs != rhs {
            return Ok(false);
        }
    }
    let lhs = d_lieb_diff(&horizontal_compose(g1, g2)?)?;
    let mut rhs = PropVector::zero();
    for (x, c) in &d1.terms {
        rhs = rhs.plus(&horizontal_compose(x, g2)?.scale(c));
    }
    for (y, c) in &d2.terms {
        rhs = rhs.plus(&horizontal_compose(g1, y)?.scale(&(c * &s)));
    }
    Ok(lhs == rhs)
}

fn c8_dprop() -> Check {
    // cobracket on top of bracket: one stacked graph and four crossed ones
    let v = vertical_compose(&Corolla::new(2, 1)?.graph(), &Corolla::new(1, 2)?.graph())?;
    let mut expect = vec![pg(2, 2, 2, &[(0, 0), (1, 0)], &[(0, 1)], &[(1, 0), (1, 1)])];
    for j in 0..2u8 {
        for i in 0..2u8 {
            expect.push(pg(2, 2, 2, &[(0, 0), (1, 0), (j, 1)], &[], &[(0, i), (1, 0), (1, 1)]));
        }
    }
    let mut keys = BTreeSet::new();
    for e in &expect {
        if let Some((c, _)) = canonicalize_prop(e)? {
            keys.insert(c);
        }
    }
    let example = v.len() == 5
        && keys.len() == 5
        && keys.iter().all(|k| v.terms.contains_key(k))
        && v.terms.values().all(|c| q::abs(c) == Q::one());
    let all = small_prop_graphs();
    let mut squares = true;
    for g in &all {
        let d = d_lieb_diff(&PropVector::from_graph(g)?)?;
        squares &= d_lieb_diff(&d)?.is_zero();
    }
    // every graph of the set against the one-black partners, on both sides
    let partners: Vec<&PropGraph> = all.iter().filter(|g| g.k <= 1 && g.m >= 1 && g.n >= 1).collect();
    let mut derivation = true;
    let mut pairs = 0;
    for g in &all {
        for p in &partners {
            derivation &= derivation_holds(g, p)? && derivation_holds(p, g)?;
            pairs += 2;
        }
        if !derivation {
            break;
        }
    }
    Ok((
        example && squares && derivation,
        format!(
            "5-term composite: {example}, d² = 0 on {} graphs: {squares}, derivation on {pairs} pairs: {derivation}",
            all.len()
        ),
    ))
}

fn c9_lieb_infty() -> Check {
    let mut count = 0;
    for m in 1..=6 {
        for n in 1..=(7 - m) {
            if m + n < 3 {
                continue;
            }
            if !d_lieb_diff(&lieb_infty_diff(&Corolla::new(m, n)?)?)?.is_zero() {
                return Ok((false, format!("δ² ≠ 0 on the ({m},{n}) corolla")));
            }
            count += 1;
        }
    }
    Ok((true, format!("δ² = 0 on {count} corollas with m+n ≤ 7")))
}

// ---------------------------------------------------------------- polytopes and quantizable sets

fn c10_polytopes() -> Check {
    let k32 = f_vector(3, 2, Family::Biassociahedron)?;
    let k22 = face_poset(2, 2, Family::Biassociahedron)?.cells.len();
    let mut assoc = true;
    for n in 3..=5 {
        for (m, nn) in [(1, n), (n, 1)] {
            let k = face_poset(m, nn, Family::Biassociahedron)?;
            let a = associahedron(n)?;
            let to_tree = |c: &Cell| match c {
                Cell::Zoned(z) => Some(Cell::Tree(if z.up.is_bar() { z.down.clone() } else { z.up.clone() })),
                _ => None,
            };
            assoc &= k.cells.len() == a.cells.len();
            for (i, c) in k.cells.iter().enumerate() {
                let Some(j) = to_tree(c).and_then(|t| a.index(&t)) else {
                    assoc = false;
                    continue;
                };
                let mine: BTreeSet<Option<Cell>> = k.covers[i].iter().map(|&x| to_tree(&k.cells[x])).collect();
                let theirs: BTreeSet<Option<Cell>> = a.covers[j].iter().map(|&x| Some(a.cells[x].clone())).collect();
                assoc &= k.dims[i] == a.dims[j] && mine == theirs;
            }
        }
    }
    let mut lattice = true;
    let mut posets = 0;
    for s in 3..=5 {
        for m in 1..s {
            for fam in [Family::Biassociahedron, Family::Bipermutahedron] {
                let p = face_poset(m, s - m, fam)?;
                lattice &= p.diamond() && p.boundary_squares_to_zero();
                posets += 1;
            }
        }
    }
    let ok = k32 == [6, 6, 1] && k22 == 3 && assoc && lattice;
    Ok((
        ok,
        format!("K(3,2) = {k32:?}, K(2,2) has {k22} cells, arity one is the associahedron: {assoc}, diamond and ∂² on {posets} posets: {lattice}"),
    ))
}

fn c11_quantizable_counts() -> Check {
    let f = FilterSet { connected: true, min_valence_2: true, ..Default::default() };
    let g67 = enumerate_graphs(6, 7, 3, &f)?;
    let bivalent = |g: &DirectedGraph| g.valences().iter().filter(|&&v| v == 2).count();
    let bivalent_ok = !g67.is_empty() && g67.iter().all(|c| bivalent(&c.graph) >= 4);
    let hat = enumerate_graphs(6, 7, 3, &FilterSet::hat_g())?;
    let p2 = enumerate_quantizable_sets(2, true)?;
    let exact4 = p2.iter().all(|c| bivalent(&c.graph) == 4);
    Ok((
        bivalent_ok && hat.is_empty() && exact4,
        format!(
            "{} graphs in G(6,7) with ≥ 4 bivalent vertices: {bivalent_ok}, Ĝ^or(6,7) has {} members, {} members of Ĝ(10,13) with valence ≤ 3 all have 4 bivalent vertices: {exact4}",
            g67.len(),
            hat.len(),
            p2.len()
        ),
    ))
}

// ---------------------------------------------------------------- numerics

fn c12_numerics(opts: &Options) -> Check {
    let b = BumpPropagator::new(opts.theta0)?;
    let cfg = |samples: u64, k: u64| McConfig { samples, seed: opts.seed.wrapping_add(k), workers: opts.workers };
    let circle = sphere_propagator_integral(&Propagator::circle(b.clone()), &cfg(1000, 0))?;
    let s2 = sphere_propagator_integral(&Propagator::sphere(b.clone(), SphereKind::NuPlus)?, &cfg(10_000_000, 1))?;
    let c_ok = (circle.mean - 1.0).abs() < 1e-8;
    let s_ok = (s2.mean - 1.0).abs() < 1e-4;
    let mut fact = 1.0;
    let mut l_ok = true;
    for p in 1..=5 {
        fact *= p as f64;
        l_ok &= (lambda_p(&b, p)? - 1.0 / fact).abs() < 1e-8;
    }
    let a2 = DirectedGraph::from_one_based(6, &[(1, 2), (2, 3), (3, 4), (1, 6), (6, 5), (5, 4), (1, 4)])?;
    let w = mc_weight_rd(&a2, 3, &Propagator::sphere(b.clone(), SphereKind::Zonal)?, &cfg(1_000_000, 2))?;
    let a2_ok = !w.is_exact_zero() && w.consistent_with_zero(3.0);
    let w12 = mc_weight_halfplane(&HalfPlaneGraph::wedge(false), &b, &cfg(1_000_000, 3))?;
    let w21 = mc_weight_halfplane(&HalfPlaneGraph::wedge(true), &b, &cfg(1_000_000, 4))?;
    let wedge = w12.mean - w21.mean;
    let wedge_ok = (wedge - 1.0).abs() < 0.02;
    let spec = GeneratorSpec::uniform(2, 2, 0, 4)?;
    let pi = SuperPolynomial::psi(&spec, 0).mul(&SuperPolynomial::psi(&spec, 1))?;
    let star = star_order1(&pi, &b, &SuperPolynomial::x(&spec, 0), &SuperPolynomial::x(&spec, 1), &cfg(1_000_000, 5))?;
    let one = Mono::one(spec.ngens());
    let sv = star.value.terms.get(&one).map(q::to_f64).unwrap_or(0.0);
    let star_ok = star.value.terms.len() == 1 && (sv - 1.0).abs() < 0.02;
    Ok((
        c_ok && s_ok && l_ok && a2_ok && wedge_ok && star_ok,
        format!(
            "S¹: {:.3e} off, S²: {:.2e} off, Λ(p) = 1/p!: {l_ok}, through-vertex weight {:.2e} ± {:.1e}, wedge {:.4}, star {:.4}",
            (circle.mean - 1.0).abs(),
            (s2.mean - 1.0).abs(),
            w.mean,
            w.stderr,
            wedge,
            sv
        ),
    ))
}
