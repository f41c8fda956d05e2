use std::collections::BTreeSet;

use gcx::polytopes::*;
use proptest::prelude::*;

fn tree(s: &str) -> PlanarTree {
    PlanarTree::decode(s).unwrap()
}

fn zoned(up: &str, down: &str, z: &[u8]) -> Cell {
    Cell::Zoned(ZonedBiTree { up: tree(up), down: tree(down), zeta: z.to_vec() })
}

fn trees_or_bar(n: usize) -> Vec<PlanarTree> {
    if n == 1 {
        vec![PlanarTree::bar()]
    } else {
        enumerate_trees(n).unwrap()
    }
}

/// every map from the vertices to [l], for every l
fn all_maps(nv: usize) -> Vec<Vec<u8>> {
    let mut out = vec![];
    for l in 1..=nv {
        let total = l.pow(nv as u32);
        for code in 0..total {
            let mut c = code;
            let f: Vec<u8> = (0..nv)
                .map(|_| {
                    let x = c % l;
                    c /= l;
                    x as u8 + 1
                })
                .collect();
            if (1..=l as u8).all(|i| f.contains(&i)) {
                out.push(f);
            }
        }
    }
    out
}

/// the comparable pairs (a < b) written out by hand from intervals
fn order_pairs(up: &PlanarTree, down: &PlanarTree) -> Vec<(usize, usize)> {
    let nu = up.vertices.len();
    let inside = |x: (u8, u8), y: (u8, u8)| x != y && y.0 <= x.0 && x.1 <= y.1;
    let mut out = vec![];
    for (a, &x) in up.vertices.iter().enumerate() {
        for (b, &y) in up.vertices.iter().enumerate() {
            if inside(x, y) {
                out.push((a, b));
            }
        }
    }
    for (a, &x) in down.vertices.iter().enumerate() {
        for (b, &y) in down.vertices.iter().enumerate() {
            if inside(x, y) {
                // the down tree is rooted at the bottom
                out.push((nu + b, nu + a));
            }
        }
    }
    out
}

fn naive_bipermutahedron(m: usize, n: usize) -> BTreeSet<Cell> {
    let mut out = BTreeSet::new();
    for up in trees_or_bar(n) {
        for down in trees_or_bar(m) {
            let nv = up.vertices.len() + down.vertices.len();
            let pairs = order_pairs(&up, &down);
            for f in all_maps(nv) {
                if pairs.iter().all(|&(a, b)| f[a] < f[b]) {
                    out.insert(Cell::BiLeveled(BiLeveled { up: up.clone(), down: down.clone(), level: f }));
                }
            }
        }
    }
    out
}

fn naive_biassociahedron(m: usize, n: usize) -> BTreeSet<Cell> {
    let mut out = BTreeSet::new();
    for up in trees_or_bar(n) {
        for down in trees_or_bar(m) {
            let nv = up.vertices.len() + down.vertices.len();
            for f in all_maps(nv) {
                let z = ZonedBiTree { up: up.clone(), down: down.clone(), zeta: f };
                if z.validate().is_ok() {
                    out.insert(Cell::Zoned(z));
                }
            }
        }
    }
    out
}

#[test]
fn tree_enumeration() {
    assert_eq!(enumerate_trees(2).unwrap().len(), 1);
    assert_eq!(enumerate_trees(3).unwrap().len(), 3);
    assert_eq!(enumerate_trees(4).unwrap().len(), 11);
    assert_eq!(associahedron(4).unwrap().f_vector(), vec![5, 5, 1]);
    assert_eq!(associahedron(3).unwrap().f_vector(), vec![2, 1]);
    assert!(enumerate_trees(1).is_err());
}

#[test]
fn k22_is_an_interval() {
    let k = enumerate_biassociahedron(2, 2).unwrap();
    assert_eq!(k.len(), 3);
    let mut dims: Vec<i64> = k.iter().map(|z| dimension_of(&Cell::Zoned(z.clone()))).collect();
    dims.sort();
    assert_eq!(dims, vec![0, 0, 1]);
    assert_eq!(f_vector(2, 2, Family::Biassociahedron).unwrap(), vec![2, 1]);
    let big = zoned("(1,2)", "(1,2)", &[1, 1]);
    let mut c = covers(&big).unwrap();
    c.sort();
    let mut want = vec![zoned("(1,2)", "(1,2)", &[1, 2]), zoned("(1,2)", "(1,2)", &[2, 1])];
    want.sort();
    assert_eq!(c, want);
    assert!(diamond_check(2, 2, Family::Biassociahedron).unwrap());
}

#[test]
fn k32_is_a_hexagon() {
    assert_eq!(enumerate_biassociahedron(3, 2).unwrap().len(), 13);
    assert_eq!(f_vector(3, 2, Family::Biassociahedron).unwrap(), vec![6, 6, 1]);
    assert_eq!(f_vector(2, 3, Family::Biassociahedron).unwrap(), vec![6, 6, 1]);
    // up tree on 2 leaves, down tree on 3
    let big = zoned("(1,2)", "(1,2,3)", &[1, 1]);
    assert_eq!(dimension_of(&big), 2);
    assert_eq!(covers(&big).unwrap().len(), 6);
    // the corollas in separate zones, either order
    for z in [[1u8, 2], [2, 1]] {
        let c = zoned("(1,2)", "(1,2,3)", &z);
        assert_eq!(dimension_of(&c), 1);
        assert_eq!(covers(&c).unwrap().len(), 2);
    }
    let vertex = zoned("(1,2)", "((1,2),3)", &[2, 1, 3]);
    assert_eq!(dimension_of(&vertex), 0);
    assert!(covers(&vertex).unwrap().is_empty());
    assert!(diamond_check(3, 2, Family::Biassociahedron).unwrap());
}

#[test]
fn arity_one_is_the_associahedron() {
    assert_eq!(f_vector(1, 3, Family::Biassociahedron).unwrap(), vec![2, 1]);
    for n in 3..=5 {
        for (m, nn) in [(1, n), (n, 1)] {
            let k = face_poset(m, nn, Family::Biassociahedron).unwrap();
            let a = associahedron(n).unwrap();
            assert_eq!(k.cells.len(), a.cells.len());
            let to_tree = |c: &Cell| match c {
                Cell::Zoned(z) => {
                    assert!(z.zeta.iter().all(|&x| x == 1));
                    Cell::Tree(if z.up.is_bar() { z.down.clone() } else { z.up.clone() })
                }
                _ => unreachable!(),
            };
            for (i, c) in k.cells.iter().enumerate() {
                let j = a.index(&to_tree(c)).unwrap();
                assert_eq!(k.dims[i], a.dims[j]);
                let mine: BTreeSet<Cell> = k.covers[i].iter().map(|&x| to_tree(&k.cells[x])).collect();
                let theirs: BTreeSet<Cell> = a.covers[j].iter().map(|&x| a.cells[x].clone()).collect();
                assert_eq!(mine, theirs);
            }
        }
    }
}

#[test]
fn leveled_trees_give_permutahedra() {
    // an interval for three leaves, the hexagon for four
    assert_eq!(f_vector(1, 3, Family::Bipermutahedron).unwrap(), vec![2, 1]);
    assert_eq!(f_vector(1, 4, Family::Bipermutahedron).unwrap(), vec![6, 6, 1]);
    assert_eq!(permutahedron(4).unwrap().f_vector(), vec![6, 6, 1]);
    assert_eq!(permutahedron(5).unwrap().f_vector(), vec![24, 36, 14, 1]);
    let p = face_poset(1, 4, Family::Bipermutahedron).unwrap();
    let q = permutahedron(4).unwrap();
    let strip = |c: &Cell| match c {
        Cell::BiLeveled(b) => Cell::Leveled(LeveledTree { tree: b.up.clone(), level: b.level.clone() }),
        _ => unreachable!(),
    };
    let a: BTreeSet<Cell> = p.cells.iter().map(strip).collect();
    let b: BTreeSet<Cell> = q.cells.iter().cloned().collect();
    assert_eq!(a, b);
}

#[test]
fn singular_tree_example() {
    // ((1,2),3) with its lower vertex on level 1, next to the singular tree
    let c = Cell::BiLeveled(BiLeveled { up: tree("((1,2),3)"), down: PlanarTree::bar(), level: vec![2, 1] });
    assert!(enumerate_bipermutahedron(1, 3).unwrap().contains(&c));
    assert_eq!(dimension_of(&c), 0);
}

#[test]
fn bipermutahedra_match_direct_enumeration() {
    for (m, n) in [(2, 2), (1, 3), (3, 1), (2, 3), (3, 2), (1, 4), (2, 4), (3, 3)] {
        let mine: BTreeSet<Cell> = enumerate_bipermutahedron(m, n).unwrap().into_iter().collect();
        assert_eq!(mine, naive_bipermutahedron(m, n), "({m},{n})");
    }
}

#[test]
fn biassociahedra_match_zone_conditions() {
    for (m, n) in [(2, 2), (1, 3), (3, 2), (2, 3), (2, 4), (4, 2), (3, 3), (1, 5)] {
        let mine: BTreeSet<Cell> = enumerate_biassociahedron(m, n).unwrap().into_iter().map(Cell::Zoned).collect();
        assert_eq!(mine, naive_biassociahedron(m, n), "({m},{n})");
    }
}

#[test]
fn posets_are_graded_regular_and_contractible() {
    for s in 3..=6 {
        for m in 1..s {
            let n = s - m;
            for fam in [Family::Biassociahedron, Family::Bipermutahedron] {
                let p = face_poset(m, n, fam).unwrap();
                assert!(p.is_graded(), "({m},{n}) {fam:?}");
                assert!(p.diamond(), "({m},{n}) {fam:?}");
                assert!(p.boundary_squares_to_zero());
                let f = p.f_vector();
                assert_eq!(f.len() as i64 - 1, (m + n - 3) as i64);
                assert_eq!(*f.last().unwrap(), 1);
                let euler: i64 = f.iter().enumerate().map(|(i, &x)| if i % 2 == 0 { x as i64 } else { -(x as i64) }).sum();
                assert_eq!(euler, 1, "({m},{n}) {fam:?}");
            }
        }
    }
}

#[test]
fn projection_is_monotone_and_onto() {
    for (m, n) in [(2, 2), (3, 2), (2, 3), (3, 3), (2, 4)] {
        let p = face_poset(m, n, Family::Bipermutahedron).unwrap();
        let k = face_poset(m, n, Family::Biassociahedron).unwrap();
        let proj = |c: &Cell| match c {
            Cell::BiLeveled(b) => Cell::Zoned(project(b)),
            _ => unreachable!(),
        };
        let image: BTreeSet<Cell> = p.cells.iter().map(proj).collect();
        assert_eq!(image, k.cells.iter().cloned().collect());
        // closure in K, by walking covers down
        let below = |i: usize| {
            let mut seen = BTreeSet::from([i]);
            let mut stack = vec![i];
            while let Some(x) = stack.pop() {
                for &y in &k.covers[x] {
                    if seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
            seen
        };
        for (i, c) in p.cells.iter().enumerate() {
            let ki = k.index(&proj(c)).unwrap();
            let cl = below(ki);
            for &j in &p.covers[i] {
                assert!(cl.contains(&k.index(&proj(&p.cells[j])).unwrap()));
            }
        }
    }
}

#[test]
fn guards() {
    assert!(matches!(enumerate_biassociahedron(4, 4), Err(gcx::Error::Resource(_))));
    assert!(enumerate_biassociahedron(1, 1).is_err());
    assert!(enumerate_bipermutahedron(0, 3).is_err());
}

#[test]
fn cell_text() {
    for fam in [Family::Biassociahedron, Family::Bipermutahedron] {
        for c in face_poset(3, 3, fam).unwrap().cells {
            assert_eq!(decode_cell(&encode_cell(&c)).unwrap(), c);
        }
    }
    for c in associahedron(5).unwrap().cells.into_iter().chain(permutahedron(4).unwrap().cells) {
        assert_eq!(decode_cell(&encode_cell(&c)).unwrap(), c);
    }
    assert!(decode_cell("K:(1,2);(1,2);1,3").is_err());
    assert!(decode_cell("K:(1,2);((1,2),3);1,1,1").is_err());
    assert!(decode_cell("P:(1,2);(1,2,3);1").is_err());
    assert!(decode_cell("T:|").is_err());
    let json = face_poset(2, 2, Family::Biassociahedron).unwrap().to_json();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["covers"].as_array().unwrap().len(), 2);
}

proptest! {
    #[test]
    fn decode_never_panics(s in "[TLPK:|();,0-9]{0,30}") {
        let _ = decode_cell(&s);
        let _ = PlanarTree::decode(&s);
    }

    #[test]
    fn tree_text_roundtrip(n in 2usize..7, i in 0usize..500) {
        let ts = enumerate_trees(n).unwrap();
        let t = &ts[i % ts.len()];
        prop_assert_eq!(&PlanarTree::decode(&t.encode()).unwrap(), t);
    }
}
