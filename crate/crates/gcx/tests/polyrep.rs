use std::collections::BTreeMap;

use gcx::gcomplex::{insert_labeled, upsilon4};
use gcx::graphcore::*;
use gcx::polyrep::*;
use gcx::q::{self, Q};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------- word oracle
//
// polynomials in k copies of the generators, kept as words of generator ids and
// normalized by bubble sort; tensor products become products in this big
// algebra, so every Koszul sign falls out of reordering

type Words = BTreeMap<Vec<usize>, Q>;

struct Big<'a> {
    spec: &'a GeneratorSpec,
}

impl Big<'_> {
    fn ng(&self) -> usize {
        self.spec.ngens()
    }

    fn odd(&self, id: usize) -> bool {
        self.spec.is_odd(id % self.ng())
    }

    fn normalize(&self, mut w: Vec<usize>) -> Option<(Vec<usize>, i64)> {
        let mut s = 1;
        let n = w.len();
        for i in 0..n {
            for j in 0..n - 1 - i {
                if w[j] > w[j + 1] {
                    if self.odd(w[j]) && self.odd(w[j + 1]) {
                        s = -s;
                    }
                    w.swap(j, j + 1);
                }
            }
        }
        if w.windows(2).any(|p| p[0] == p[1] && self.odd(p[0])) {
            return None;
        }
        Some((w, s))
    }

    fn add(&self, acc: &mut Words, w: Vec<usize>, c: Q) {
        if let Some((w, s)) = self.normalize(w) {
            let e = acc.entry(w).or_insert_with(Q::zero);
            *e += c * q::q(s);
        }
    }

    fn deriv(&self, v: &Words, id: usize) -> Words {
        let mut out = Words::new();
        for (w, c) in v {
            let mut before = 0;
            for (p, &x) in w.iter().enumerate() {
                if x == id {
                    let s = if self.odd(id) && before % 2 == 1 { -1 } else { 1 };
                    let mut w2 = w.clone();
                    w2.remove(p);
                    self.add(&mut out, w2, c * q::q(s));
                }
                if self.odd(x) {
                    before += 1;
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }
}

fn mono_word(m: &Mono, offset: usize) -> Vec<usize> {
    let mut w = Vec::new();
    for (g, &e) in m.e.iter().enumerate() {
        for _ in 0..e {
            w.push(offset + g);
        }
    }
    w
}

fn oracle_phi(g: &DirectedGraph, args: &[SuperPolynomial]) -> SuperPolynomial {
    let spec = &args[0].spec;
    let big = Big { spec };
    let ng = spec.ngens();
    let mut v = Words::new();
    v.insert(vec![], Q::one());
    for (s, a) in args.iter().enumerate() {
        let mut next = Words::new();
        for (w, c) in &v {
            for (m, x) in &a.terms {
                let mut w2 = w.clone();
                w2.extend(mono_word(m, s * ng));
                big.add(&mut next, w2, c * x);
            }
        }
        v = next;
    }
    for &(t, h) in g.edges.iter().rev() {
        let mut next = Words::new();
        for a in 0..spec.n {
            let dv = big.deriv(&big.deriv(&v, h as usize * ng + 2 * a + 1), t as usize * ng + 2 * a);
            for (w, c) in dv {
                *next.entry(w).or_insert_with(Q::zero) += c;
            }
        }
        next.retain(|_, c| !c.is_zero());
        v = next;
    }
    let mut out = SuperPolynomial::zero(spec);
    let mut flat = Words::new();
    for (w, c) in v {
        big.add(&mut flat, w.iter().map(|x| x % ng).collect(), c);
    }
    for (w, c) in flat {
        let mut m = Mono::one(ng);
        for x in w {
            m.e[x] += 1;
        }
        out.add_mono(m, c);
    }
    out
}

// ---------------------------------------------------------------- helpers

fn specs() -> Vec<GeneratorSpec> {
    vec![
        GeneratorSpec::uniform(2, 2, 0, 10).unwrap(),
        GeneratorSpec::uniform(2, 2, 1, 10).unwrap(),
        GeneratorSpec::uniform(3, 2, 1, 10).unwrap(),
        GeneratorSpec::uniform(3, 2, 0, 10).unwrap(),
        GeneratorSpec::new(4, vec![(1, 2), (0, 3)], 10).unwrap(),
    ]
}

fn random_mono(rng: &mut ChaCha8Rng, s: &GeneratorSpec, max_deg: usize) -> SuperPolynomial {
    loop {
        let mut p = SuperPolynomial::constant(s, q::q(rng.gen_range(1..4) * if rng.gen_bool(0.5) { 1 } else { -1 }));
        for _ in 0..rng.gen_range(0..=max_deg) {
            p = p.mul(&SuperPolynomial::generator(s, rng.gen_range(0..s.ngens()))).unwrap();
        }
        if !p.is_zero() {
            return p;
        }
    }
}

fn random_poly(rng: &mut ChaCha8Rng, s: &GeneratorSpec, terms: usize, max_deg: usize) -> SuperPolynomial {
    let mut p = SuperPolynomial::zero(s);
    for _ in 0..terms {
        p = p.add(&random_mono(rng, s, max_deg)).unwrap();
    }
    p
}

fn random_labeled(rng: &mut ChaCha8Rng, k: usize, l: usize) -> DirectedGraph {
    let mut es = Vec::new();
    while es.len() < l {
        let t = rng.gen_range(1..=k);
        let h = rng.gen_range(1..=k);
        if t != h {
            es.push((t, h));
        }
    }
    DirectedGraph::from_one_based(k, &es).unwrap()
}

fn sg(x: i32) -> Q {
    if x.rem_euclid(2) == 1 {
        -Q::one()
    } else {
        Q::one()
    }
}

/// every monomial of total degree at most `max`
fn all_monos(s: &GeneratorSpec, max: usize) -> Vec<SuperPolynomial> {
    let mut out = Vec::new();
    let mut e = vec![0u16; s.ngens()];
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
    rec(s, 0, max, &mut e, &mut out);
    out
}

// ---------------------------------------------------------------- tests

#[test]
fn spec_examples() {
    let s = GeneratorSpec::uniform(2, 2, 0, 4).unwrap();
    let (x1, x2, p1) = (SuperPolynomial::x(&s, 0), SuperPolynomial::x(&s, 1), SuperPolynomial::psi(&s, 0));
    assert_eq!(schouten(&p1, &x1).unwrap(), SuperPolynomial::constant(&s, Q::one()));
    assert!(schouten(&x1, &x2).unwrap().is_zero());
    assert_eq!(schouten(&x1.mul(&p1).unwrap(), &x1).unwrap(), x1);
    let other = GeneratorSpec::uniform(2, 1, 0, 4).unwrap();
    assert!(matches!(schouten(&x1, &SuperPolynomial::x(&other, 0)), Err(gcx::Error::SpecMismatch(_))));
}

#[test]
fn phi_matches_word_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for s in specs() {
        for _ in 0..40 {
            let k = rng.gen_range(1..=3);
            let l = if k == 1 { 0 } else { rng.gen_range(0..=3) };
            let g = random_labeled(&mut rng, k, l);
            let args: Vec<_> = (0..k).map(|_| random_poly(&mut rng, &s, 2, 3)).collect();
            assert_eq!(phi_labeled(&g, &args).unwrap(), oracle_phi(&g, &args), "{} d={}", g.encode(s.d), s.d);
        }
    }
}

#[test]
fn phi_of_lie_image_is_schouten() {
    for s in [
        GeneratorSpec::uniform(2, 2, 0, 6).unwrap(),
        GeneratorSpec::uniform(3, 2, 1, 6).unwrap(),
        GeneratorSpec::uniform(3, 2, 0, 6).unwrap(),
    ] {
        let l = WeightedLinfty::schouten(s.d);
        let ms = all_monos(&s, 3);
        for a in &ms {
            for b in &ms {
                let (v, st) = linfty_apply(&l, 2, &[a.clone(), b.clone()]).unwrap();
                assert_eq!(st, ArityStatus::Defined);
                assert_eq!(v, schouten(a, b).unwrap(), "{a} , {b}");
            }
        }
    }
}

/// [a,b]' = (−1)^{(d−1)|a|}[a,b] is a graded Lie bracket on the (d−1)-fold shift
fn twisted(a: &SuperPolynomial, b: &SuperPolynomial) -> SuperPolynomial {
    let d = a.spec.d;
    schouten(a, b).unwrap().scale(&sg((d - 1) * a.grading().unwrap()))
}

#[test]
fn schouten_antisymmetry_and_jacobi() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for s in specs() {
        let dd = s.d - 1;
        for _ in 0..100 {
            let a = random_mono(&mut rng, &s, 3);
            let b = random_mono(&mut rng, &s, 3);
            let c = random_mono(&mut rng, &s, 3);
            let (da, db) = (a.grading().unwrap() + dd, b.grading().unwrap() + dd);
            assert_eq!(twisted(&a, &b), twisted(&b, &a).scale(&-sg(da * db)));
            let bc = twisted(&b, &c);
            let ab = twisted(&a, &b);
            let ac = twisted(&a, &c);
            let lhs = if bc.is_zero() { bc } else { twisted(&a, &bc) };
            let r1 = if ab.is_zero() { ab } else { twisted(&ab, &c) };
            let r2 = if ac.is_zero() { ac } else { twisted(&b, &ac).scale(&sg(da * db)) };
            assert_eq!(lhs, r1.add(&r2).unwrap());
        }
    }
}

#[test]
fn phi_intertwines_insertion() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for s in specs() {
        for _ in 0..25 {
            let k1 = rng.gen_range(1..=3);
            let k2 = rng.gen_range(1..=3);
            let (l1, l2) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
            let g1 = random_labeled(&mut rng, k1, if k1 == 1 { 0 } else { l1 });
            let g2 = random_labeled(&mut rng, k2, if k2 == 1 { 0 } else { l2 });
            let i = rng.gen_range(1..=k1);
            let k = k1 + k2 - 1;
            let args: Vec<_> = (0..k).map(|_| random_mono(&mut rng, &s, 3)).collect();
            let mut lhs = SuperPolynomial::zero(&s);
            for (h, _) in insert_labeled(&g1, i, &g2, s.d).unwrap() {
                lhs = lhs.add(&phi_labeled(&h, &args).unwrap()).unwrap();
            }
            // composite with Φ_{g2} moved past the first i−1 arguments
            let inner = phi_labeled(&g2, &args[i - 1..i - 1 + k2]).unwrap();
            let mut outer_args: Vec<_> = args[..i - 1].to_vec();
            outer_args.push(inner);
            outer_args.extend_from_slice(&args[i - 1 + k2..]);
            let op_deg = (1 - s.d) * g2.edges.len() as i32;
            let before: i32 = args[..i - 1].iter().map(|a| a.grading().unwrap()).sum();
            let rhs = phi_labeled(&g1, &outer_args).unwrap().scale(&sg(op_deg * before));
            assert_eq!(lhs, rhs, "{} ∘{i} {}", g1.encode(s.d), g2.encode(s.d));
        }
    }
}

#[test]
fn phi_respects_grading() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for s in specs() {
        for _ in 0..30 {
            let k = rng.gen_range(2..=3);
            let l = rng.gen_range(0..=3);
            let g = random_labeled(&mut rng, k, l);
            let args: Vec<_> = (0..k).map(|_| random_mono(&mut rng, &s, 3)).collect();
            let v = phi_labeled(&g, &args).unwrap();
            let want: i32 = args.iter().map(|a| a.grading().unwrap()).sum::<i32>() + (1 - s.d) * g.edges.len() as i32;
            for m in v.terms.keys() {
                assert_eq!(m.grading(&s), want);
            }
        }
    }
}

#[test]
fn phi_apply_errors() {
    let s = GeneratorSpec::uniform(2, 1, 0, 4).unwrap();
    let e = canonicalize(&DirectedGraph::from_one_based(2, &[(1, 2)]).unwrap(), 2).unwrap();
    assert!(matches!(phi_apply(&e, &[SuperPolynomial::x(&s, 0)]), Err(gcx::Error::Arity(_))));
    let e3 = canonicalize(&DirectedGraph::from_one_based(2, &[(1, 2)]).unwrap(), 3).unwrap();
    let a = SuperPolynomial::x(&s, 0);
    assert!(matches!(phi_apply(&e3, &[a.clone(), a]), Err(gcx::Error::FlavorMismatch(..))));
}

fn sorted_edges(g: &DirectedGraph) -> Vec<Edge> {
    let mut es = g.edges.clone();
    es.sort();
    es
}

fn all_perms(k: usize) -> Vec<Vec<u8>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in all_perms(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, (k - 1) as u8);
            out.push(q);
        }
    }
    out
}

/// Σ_{σ∈S_k} ±Φ_{σΓ} / |Aut Γ|, everything by brute force
fn oracle_symmetrized(g: &DirectedGraph, d: i32, args: &[SuperPolynomial]) -> SuperPolynomial {
    let ps = all_perms(g.k);
    let aut = ps.iter().filter(|p| sorted_edges(&g.relabel(p)) == sorted_edges(g)).count();
    let mut out = SuperPolynomial::zero(&args[0].spec);
    for p in &ps {
        let s = if d % 2 == 0 { 1 } else { perm_sign(&p.iter().map(|&x| x as usize).collect::<Vec<_>>()) };
        out = out.add(&oracle_phi(&g.relabel(p), args).scale(&q::q(s as i64))).unwrap();
    }
    out.scale(&(Q::one() / q::q(aut as i64)))
}

fn upsilon4_linfty(w: &Q) -> WeightedLinfty {
    let mut l = WeightedLinfty::schouten(2);
    for (g, c) in upsilon4().iter() {
        let cls = canonicalize(g, 2).unwrap();
        l.push(cls, c * w).unwrap();
    }
    l
}

#[test]
fn upsilon4_on_quadratic_bivector() {
    let s = GeneratorSpec::uniform(2, 2, 0, 8).unwrap();
    let pi = SuperPolynomial::parse("1 * x1^2 psi1 psi2 + 2 * x1 x2 psi1 psi2", &s).unwrap();
    let l = upsilon4_linfty(&Q::one());
    let (got, st) = linfty_apply(&l, 4, &vec![pi.clone(); 4]).unwrap();
    assert_eq!(st, ArityStatus::Defined);
    let mut want = SuperPolynomial::zero(&s);
    for (g, c) in upsilon4().iter() {
        want = want.add(&oracle_symmetrized(g, 2, &vec![pi.clone(); 4]).scale(c)).unwrap();
    }
    assert_eq!(got, want);
}

#[test]
fn linfty_arity_status() {
    let s = GeneratorSpec::uniform(2, 1, 0, 4).unwrap();
    let l = WeightedLinfty::schouten(2);
    let x = SuperPolynomial::x(&s, 0);
    let (v, st) = linfty_apply(&l, 3, &[x.clone(), x.clone(), x.clone()]).unwrap();
    assert!(v.is_zero());
    assert_eq!(st, ArityStatus::Undefined);
    let mut l4 = WeightedLinfty::new(4);
    l4.push_f64(canonicalize(&DirectedGraph::from_one_based(2, &[(1, 2)]).unwrap(), 2).unwrap(), 0.375).unwrap();
    assert_eq!(l4.arity_to_terms[&2][0].1, q::qf(3, 8));
    let (v, st) = linfty_apply(&l4, 3, &[x.clone(), x.clone(), x]).unwrap();
    assert!(v.is_zero());
    assert_eq!(st, ArityStatus::Defined);
}

fn so3(s: &GeneratorSpec) -> SuperPolynomial {
    SuperPolynomial::parse("1 * x1 psi2 psi3 + -1 * x2 psi1 psi3 + 1 * x3 psi1 psi2", s).unwrap()
}

#[test]
fn quantizable_mc_residuals() {
    let s = GeneratorSpec::uniform(2, 3, 0, 12).unwrap().with_hbar(1);
    let pi = so3(&s);
    // linear Poisson structures of Lie algebras are classical MC elements
    assert!(schouten(&pi, &pi).unwrap().is_zero());
    let w = q::qf(1, 7);
    let l = upsilon4_linfty(&w);
    let r = mc_check_quantizable(&pi, &l, 1).unwrap();
    assert!(r[0].is_zero());
    let mut want = SuperPolynomial::zero(&s);
    for (g, c) in upsilon4().iter() {
        want = want.add(&oracle_symmetrized(g, 2, &vec![pi.clone(); 4]).scale(&(c * &w))).unwrap();
    }
    assert_eq!(r[1], want.scale(&(Q::one() / q::factorial(4))));
    // a constant bivector is flat for everything
    let c = SuperPolynomial::parse("1 * psi1 psi2", &s).unwrap();
    assert!(mc_check_quantizable(&c, &l, 1).unwrap().iter().all(|x| x.is_zero()));
    // arity 4 is required at order ħ
    assert!(matches!(mc_check_quantizable(&pi, &WeightedLinfty::schouten(2), 1), Err(gcx::Error::Arity(_))));
}

// ---------------------------------------------------------------- Lie bialgebras

type T3 = Vec<Vec<Vec<Q>>>;

fn zeros(n: usize) -> T3 {
    vec![vec![vec![Q::zero(); n]; n]; n]
}

/// Jacobi, co-Jacobi and the cocycle condition straight from the tensors
fn is_bialgebra(c: &T3, phi: &T3) -> bool {
    let n = c.len();
    let br = |u: &[Q], v: &[Q]| -> Vec<Q> {
        let mut out = vec![Q::zero(); n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out[k] += &u[i] * &v[j] * &c[i][j][k];
                }
            }
        }
        out
    };
    let e = |i: usize| -> Vec<Q> { (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect() };
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                let a = br(&br(&e(i), &e(j)), &e(l));
                let b = br(&br(&e(j), &e(l)), &e(i));
                let cc = br(&br(&e(l), &e(i)), &e(j));
                if (0..n).any(|x| !(&a[x] + &b[x] + &cc[x]).is_zero()) {
                    return false;
                }
            }
        }
    }
    for k in 0..n {
        let mut t = zeros(n);
        for i in 0..n {
            for j in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        t[a][b][j] += &phi[k][i][j] * &phi[i][a][b];
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for x in 0..n {
                    if !(&t[a][b][x] + &t[b][x][a] + &t[x][a][b]).is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    let ad = |i: usize, j: usize| -> Vec<Vec<Q>> {
        // e_i acting on δ(e_j)
        let mut m = vec![vec![Q::zero(); n]; n];
        for a in 0..n {
            for b in 0..n {
                for p in 0..n {
                    m[p][b] += &phi[j][a][b] * &c[i][a][p];
                    m[a][p] += &phi[j][a][b] * &c[i][b][p];
                }
            }
        }
        m
    };
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (ad(i, j), ad(j, i));
            for a in 0..n {
                for b in 0..n {
                    let mut lhs = Q::zero();
                    for k in 0..n {
                        lhs += &c[i][j][k] * &phi[k][a][b];
                    }
                    if lhs != &x[a][b] - &y[a][b] {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn gamma_sq(c: &T3, phi: &T3) -> SuperPolynomial {
    let s = GeneratorSpec::uniform(3, c.len(), 1, 6).unwrap();
    let g = bialgebra_gamma(c, phi, &s).unwrap();
    schouten(&g, &g).unwrap()
}

fn two_dim(delta1: i64, delta2: i64) -> (T3, T3) {
    let mut c = zeros(2);
    c[0][1][1] = Q::one();
    c[1][0][1] = -Q::one();
    let mut phi = zeros(2);
    phi[0][0][1] = q::q(delta1);
    phi[0][1][0] = q::q(-delta1);
    phi[1][0][1] = q::q(delta2);
    phi[1][1][0] = q::q(-delta2);
    (c, phi)
}

#[test]
fn two_dimensional_examples() {
    let (c, phi) = two_dim(0, 0);
    assert!(gamma_sq(&c, &phi).is_zero());
    let (c, phi) = two_dim(0, 1);
    assert!(is_bialgebra(&c, &phi));
    assert!(gamma_sq(&c, &phi).is_zero());
    // every cobracket on this algebra is a cocycle, so the perturbed one
    // δ(e1) = e1∧e2 is still a bialgebra
    let (c, phi) = two_dim(1, 1);
    assert!(is_bialgebra(&c, &phi));
    assert!(gamma_sq(&c, &phi).is_zero());
}

/// the 2-dimensional bialgebra plus a central e3 with δ(e3) = e1∧e2
fn perturbed_three_dim() -> (T3, T3) {
    let mut c = zeros(3);
    c[0][1][1] = Q::one();
    c[1][0][1] = -Q::one();
    let mut phi = zeros(3);
    phi[1][0][1] = Q::one();
    phi[1][1][0] = -Q::one();
    phi[2][0][1] = Q::one();
    phi[2][1][0] = -Q::one();
    (c, phi)
}

#[test]
fn perturbation_breaking_the_cocycle_condition() {
    let (c, phi) = perturbed_three_dim();
    assert!(!is_bialgebra(&c, &phi));
    assert!(!gamma_sq(&c, &phi).is_zero());
}

#[test]
fn gamma_rejects_wrong_degrees() {
    let s = GeneratorSpec::uniform(3, 2, 0, 6).unwrap();
    let (c, phi) = two_dim(0, 1);
    assert!(bialgebra_gamma(&c, &phi, &s).is_err());
    let s = GeneratorSpec::uniform(3, 3, 1, 6).unwrap();
    assert!(bialgebra_gamma(&c, &phi, &s).is_err());
}

fn random_antisym(rng: &mut ChaCha8Rng, n: usize, density: f64) -> T3 {
    let mut t = zeros(n);
    for k in 0..n {
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(density) {
                    let v = q::q(rng.gen_range(-2..=2));
                    t[k][i][j] = v.clone();
                    t[k][j][i] = -v;
                }
            }
        }
    }
    t
}

/// random_antisym is indexed [k][i][j]; brackets want [i][j][k]
fn as_bracket(t: &T3) -> T3 {
    let n = t.len();
    let mut c = zeros(n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                c[i][j][k] = t[k][i][j].clone();
            }
        }
    }
    c
}

#[test]
fn gamma_square_detects_bialgebras() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut seen = [0usize; 2];
    for trial in 0..120 {
        let n = if trial % 2 == 0 { 2 } else { 3 };
        let c = as_bracket(&random_antisym(&mut rng, n, 0.3));
        let phi = random_antisym(&mut rng, n, 0.3);
        let ok = is_bialgebra(&c, &phi);
        seen[ok as usize] += 1;
        assert_eq!(gamma_sq(&c, &phi).is_zero(), ok, "trial {trial}");
    }
    assert!(seen[0] > 0 && seen[1] > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn text_roundtrip(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = GeneratorSpec::uniform(2, 2, 0, 6).unwrap().with_hbar(2);
        let mut p = random_poly(&mut rng, &s, 4, 4);
        if rng.gen_bool(0.5) {
            p = p.mul(&SuperPolynomial::hbar(&s)).unwrap();
        }
        prop_assert_eq!(SuperPolynomial::parse(&p.to_text(), &s).unwrap(), p);
    }

    #[test]
    fn parse_never_panics(t in "\\PC{0,60}") {
        let s = GeneratorSpec::uniform(2, 2, 0, 6).unwrap();
        let _ = SuperPolynomial::parse(&t, &s);
    }

    #[test]
    fn truncation_is_consistent(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let big = GeneratorSpec::uniform(2, 2, 0, 9).unwrap();
        let small = GeneratorSpec::uniform(2, 2, 0, 4).unwrap();
        let a = random_poly(&mut rng, &big, 3, 2);
        let b = random_poly(&mut rng, &big, 3, 2);
        let l = rng.gen_range(0..=2);
        let g = random_labeled(&mut rng, 2, l);
        let full = phi_labeled(&g, &[a.clone(), b.clone()]).unwrap().truncate(4);
        let direct = phi_labeled(&g, &[a.truncate(4), b.truncate(4)]).unwrap();
        prop_assert_eq!(full.terms, direct.terms);
        prop_assert_eq!(direct.spec, small);
    }

    #[test]
    fn phi_is_multilinear(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = GeneratorSpec::uniform(3, 2, 1, 8).unwrap();
        let l = rng.gen_range(0..=2);
        let g = random_labeled(&mut rng, 2, l);
        let (a, b, c) = (random_poly(&mut rng, &s, 2, 3), random_poly(&mut rng, &s, 2, 3), random_poly(&mut rng, &s, 2, 3));
        let lam = q::q(rng.gen_range(-5..=5));
        let lhs = phi_labeled(&g, &[a.add(&b.scale(&lam)).unwrap(), c.clone()]).unwrap();
        let rhs = phi_labeled(&g, &[a, c.clone()]).unwrap().add(&phi_labeled(&g, &[b, c]).unwrap().scale(&lam)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
