use gcx::graphcore::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn perms(k: usize) -> Vec<Vec<u8>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in perms(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, (k - 1) as u8);
            out.push(q);
        }
    }
    out
}

fn sorted(mut es: Vec<Edge>) -> Vec<Edge> {
    es.sort();
    es
}

/// brute force over all k! relabelings: the graph's relabelings that land
/// on `target`, and whether some automorphism reverses the orientation
fn oracle(g: &DirectedGraph, d: i32, target: &[Edge]) -> (bool, Option<i8>) {
    let all = perms(g.k);
    let sign_of = |p: &Vec<u8>| -> i8 {
        if d % 2 != 0 {
            perm_sign(&p.iter().map(|&x| x as usize).collect::<Vec<_>>())
        } else {
            sort_sign(&g.relabel(p).edges)
        }
    };
    let mut signs = std::collections::BTreeSet::new();
    let parallel = sorted(g.edges.clone()).windows(2).any(|w| w[0] == w[1]);
    for p in &all {
        if sorted(g.relabel(p).edges) == target {
            signs.insert(sign_of(p));
        }
    }
    if signs.is_empty() {
        return (false, None);
    }
    if (d % 2 == 0 && parallel) || signs.len() > 1 {
        (true, None)
    } else {
        (true, Some(*signs.iter().next().unwrap()))
    }
}

fn shuffled(rng: &mut ChaCha8Rng, k: usize) -> Vec<u8> {
    let mut p: Vec<u8> = (0..k as u8).collect();
    for i in (1..k).rev() {
        let j = rng.gen_range(0..=i);
        p.swap(i, j);
    }
    p
}

fn random_graph(rng: &mut ChaCha8Rng, k: usize, l: usize) -> DirectedGraph {
    let mut es = Vec::new();
    while es.len() < l {
        let t = rng.gen_range(0..k) as u8;
        let h = rng.gen_range(0..k) as u8;
        if t != h {
            es.push((t, h));
        }
    }
    DirectedGraph::new(k, es).unwrap()
}

#[test]
fn canonical_form_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..3000 {
        let k = rng.gen_range(2..=6);
        let l = rng.gen_range(0..=9);
        let g = random_graph(&mut rng, k, l);
        for d in [2, 3] {
            let c = canonicalize(&g, d).unwrap();
            let (iso, sign) = oracle(&g, d, &c.graph.edges);
            assert!(iso, "{}", g.encode(d));
            let h = g.relabel(&shuffled(&mut rng, k));
            assert_eq!(canonicalize(&h, d).unwrap().graph, c.graph, "{}", g.encode(d));
            match sign {
                None => assert!(c.zero, "{} should be zero", g.encode(d)),
                Some(s) => {
                    assert!(!c.zero, "{} should be nonzero", g.encode(d));
                    assert_eq!(c.sign, s, "{}", g.encode(d));
                }
            }
        }
    }
}

#[test]
fn symmetric_graphs_against_brute_force() {
    // cycles, stars, complete and empty graphs stress automorphism pruning
    let mut cases = Vec::new();
    for k in 2..=6 {
        cases.push(DirectedGraph::new(k, vec![]).unwrap());
        let cyc: Vec<Edge> = (0..k).map(|i| (i as u8, ((i + 1) % k) as u8)).collect();
        cases.push(DirectedGraph::new(k, cyc).unwrap());
        let star: Vec<Edge> = (1..k).map(|i| (0, i as u8)).collect();
        cases.push(DirectedGraph::new(k, star).unwrap());
        let mut tour = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                tour.push((a as u8, b as u8));
            }
        }
        cases.push(DirectedGraph::new(k, tour).unwrap());
        let both: Vec<Edge> = (0..k)
            .flat_map(|i| [(i as u8, ((i + 1) % k) as u8), (((i + 1) % k) as u8, i as u8)])
            .collect();
        cases.push(DirectedGraph::new(k, both).unwrap());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for g in cases {
        for d in [2, 3] {
            let c = canonicalize(&g, d).unwrap();
            let (iso, sign) = oracle(&g, d, &c.graph.edges);
            assert!(iso);
            let h = g.relabel(&shuffled(&mut rng, g.k));
            assert_eq!(canonicalize(&h, d).unwrap().graph, c.graph);
            assert_eq!(c.zero, sign.is_none(), "{}", g.encode(d));
            if let Some(s) = sign {
                assert_eq!(c.sign, s);
            }
        }
    }
}

#[test]
fn enumeration_single_edge() {
    // the two labelings 1->2 and 2->1 are one isomorphism class
    let b = enumerate_graphs(2, 1, 3, &FilterSet::none()).unwrap();
    assert_eq!(b.len(), 1);
    assert_eq!(b[0].graph.encode(3), "d3;k2;E:1>2");
}

/// enumeration by brute force: all edge multisets, canonicalized
fn brute_enumeration(k: usize, l: usize, d: i32, f: &FilterSet) -> std::collections::BTreeSet<Vec<Edge>> {
    let pairs: Vec<Edge> =
        (0..k as u8).flat_map(|a| (0..k as u8).filter(move |&b| b != a).map(move |b| (a, b))).collect();
    let mut out = std::collections::BTreeSet::new();
    fn rec(
        pairs: &[Edge],
        start: usize,
        l: usize,
        cur: &mut Vec<Edge>,
        k: usize,
        d: i32,
        f: &FilterSet,
        out: &mut std::collections::BTreeSet<Vec<Edge>>,
    ) {
        if cur.len() == l {
            let g = DirectedGraph::new(k, cur.clone()).unwrap();
            if f.accepts(&g) {
                let c = canonicalize(&g, d).unwrap();
                if !c.zero {
                    out.insert(c.graph.edges);
                }
            }
            return;
        }
        for i in start..pairs.len() {
            cur.push(pairs[i]);
            rec(pairs, i, l, cur, k, d, f, out);
            cur.pop();
        }
    }
    rec(&pairs, 0, l, &mut Vec::new(), k, d, f, &mut out);
    out
}

#[test]
fn enumeration_matches_brute_force() {
    let flavors = [
        FilterSet::none(),
        FilterSet { connected: true, min_valence_2: true, ..Default::default() },
        FilterSet { connected: true, min_valence_2: true, oriented: true, no_11_bivalent: true, ..Default::default() },
        FilterSet { oriented: true, ..Default::default() },
        FilterSet { in_and_out: true, no_triangle: true, ..Default::default() },
        FilterSet { max_valence_3: true, no_adjacent_bivalent: true, connected: true, ..Default::default() },
    ];
    for f in &flavors {
        for k in 1..=4 {
            for l in 0..=5 {
                for d in [2, 3] {
                    let got: std::collections::BTreeSet<Vec<Edge>> =
                        enumerate_graphs(k, l, d, f).unwrap().into_iter().map(|c| c.graph.edges).collect();
                    let want = brute_enumeration(k, l, d, f);
                    assert_eq!(got, want, "k={k} l={l} d={d} {f:?}");
                }
            }
        }
    }
}

#[test]
fn six_seven_graphs_have_four_bivalent() {
    let f = FilterSet { connected: true, min_valence_2: true, ..Default::default() };
    let gs = enumerate_graphs(6, 7, 3, &f).unwrap();
    assert!(!gs.is_empty());
    for c in &gs {
        let biv = c.graph.valences().iter().filter(|&&v| v == 2).count();
        assert!(biv >= 4, "{}", c.graph.encode(3));
    }
}

#[test]
fn hat_g_67_is_empty() {
    assert!(enumerate_graphs(6, 7, 3, &FilterSet::hat_g()).unwrap().is_empty());
}

#[test]
fn resource_guard_trips() {
    let r = enumerate_graphs_bounded(8, 10, 3, &FilterSet::none(), 50);
    assert!(matches!(r, Err(gcx::Error::Resource(_))));
}

proptest! {
    #[test]
    fn canonicalize_is_idempotent(seed in 0u64..10_000, k in 1usize..8, l in 0usize..10, d in 2i32..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = if k == 1 { DirectedGraph::new(1, vec![]).unwrap() } else { random_graph(&mut rng, k, l) };
        let c = canonicalize(&g, d).unwrap();
        let c2 = canonicalize(&c.graph, d).unwrap();
        prop_assert_eq!(&c2.graph, &c.graph);
        prop_assert_eq!(c2.zero, c.zero);
        if !c.zero {
            prop_assert_eq!(c2.sign, 1);
        }
    }

    #[test]
    fn relabeling_changes_sign_by_parity(seed in 0u64..10_000, k in 2usize..8, l in 0usize..10, d in 2i32..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, k, l);
        let p = shuffled(&mut rng, k);
        let h = g.relabel(&p);
        let a = canonicalize(&g, d).unwrap();
        let b = canonicalize(&h, d).unwrap();
        prop_assert_eq!(&a.graph, &b.graph);
        prop_assert_eq!(a.zero, b.zero);
        if !a.zero {
            // edge order is untouched by a vertex relabeling
            let s = if d % 2 != 0 { perm_sign(&p.iter().map(|&x| x as usize).collect::<Vec<_>>()) } else { 1 };
            prop_assert_eq!(a.sign, s * b.sign);
        }
    }

    #[test]
    fn degree_shift(k in 1usize..20, l in 0usize..30, d in 2i32..6) {
        prop_assert_eq!(degree_kl(k, l, d) + 1, degree_kl(k + 1, l + 1, d));
    }

    #[test]
    fn decode_never_panics(s in "\\PC{0,40}") {
        let _ = decode(&s);
    }
}
