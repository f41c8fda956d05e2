//! exact sparse linear algebra over the rationals

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::q::{self, Q};

pub type SparseVec = BTreeMap<usize, Q>;

/// columns of a matrix, each a sparse vector indexed by row
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub cols: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn new(nrows: usize, cols: Vec<SparseVec>) -> Self {
        SparseMatrix { nrows, cols }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    pub fn rank(&self) -> usize {
        let mut e = Echelon::default();
        for (j, c) in self.cols.iter().enumerate() {
            e.insert(c.clone(), j);
        }
        e.rank()
    }

    /// some x with Ax = b, or the reduced residual of b
    pub fn solve(&self, b: &SparseVec) -> std::result::Result<SparseVec, SparseVec> {
        let mut e = Echelon::default();
        for (j, c) in self.cols.iter().enumerate() {
            e.insert(c.clone(), j);
        }
        e.solve(b)
    }

    pub fn mul(&self, x: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (&j, xj) in x {
            for (&i, a) in &self.cols[j] {
                add_into(&mut out, i, a * xj);
            }
        }
        out
    }

    /// Matrix Market coordinate format with "p/q" entries
    pub fn to_matrix_market(&self) -> String {
        let mut s = String::from("%%MatrixMarket matrix coordinate rational general\n");
        let _ = writeln!(s, "{} {} {}", self.nrows, self.ncols(), self.nnz());
        for (j, c) in self.cols.iter().enumerate() {
            for (i, a) in c {
                let _ = writeln!(s, "{} {} {}", i + 1, j + 1, q::fmt(a));
            }
        }
        s
    }

    pub fn from_matrix_market(text: &str) -> Result<SparseMatrix> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty matrix market file".into()))?;
        if !header.starts_with("%%MatrixMarket matrix coordinate") {
            return Err(Error::Parse("missing Matrix Market header".into()));
        }
        let mut lines = lines.filter(|l| !l.starts_with('%'));
        let dims = lines.next().ok_or_else(|| Error::Parse("missing size line".into()))?;
        let nums: Vec<usize> = dims.split_whitespace().map(|t| t.parse::<usize>()).collect::<std::result::Result<_, _>>().map_err(|_| Error::Parse("bad size line".into()))?;
        if nums.len() != 3 {
            return Err(Error::Parse("size line needs 3 integers".into()));
        }
        let (nr, nc, nnz) = (nums[0], nums[1], nums[2]);
        if nc > 1 << 24 || nr > 1 << 24 {
            return Err(Error::Parse("matrix too large".into()));
        }
        let mut cols = vec![SparseVec::new(); nc];
        let mut seen = 0;
        for l in lines {
            let t: Vec<&str> = l.split_whitespace().collect();
            if t.len() != 3 {
                return Err(Error::Parse(format!("bad entry line '{l}'")));
            }
            let i: usize = t[0].parse().map_err(|_| Error::Parse("bad row".into()))?;
            let j: usize = t[1].parse().map_err(|_| Error::Parse("bad column".into()))?;
            if i == 0 || j == 0 || i > nr || j > nc {
                return Err(Error::Parse(format!("entry ({i},{j}) out of range")));
            }
            let a = q::parse(t[2])?;
            add_into(&mut cols[j - 1], i - 1, a);
            seen += 1;
        }
        if seen != nnz {
            return Err(Error::Parse(format!("expected {nnz} entries, found {seen}")));
        }
        Ok(SparseMatrix { nrows: nr, cols })
    }
}

pub fn add_into(v: &mut SparseVec, i: usize, a: Q) {
    if a.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match v.entry(i) {
        Entry::Vacant(e) => {
            e.insert(a);
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += a;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

fn axpy(y: &mut SparseVec, a: &Q, x: &SparseVec) {
    for (&i, xi) in x {
        add_into(y, i, a * xi);
    }
}

/// row echelon form built one column at a time; each stored vector has
/// leading entry 1 at its pivot row and remembers which input columns
/// it combines
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    pivots: BTreeMap<usize, (SparseVec, SparseVec)>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// reduce v against the pivots; the combination records what was subtracted
    fn reduce(&self, mut v: SparseVec, comb: &mut SparseVec) -> SparseVec {
        let mut from = 0usize;
        loop {
            let hit = v.range(from..).find(|(i, _)| self.pivots.contains_key(i)).map(|(&i, a)| (i, a.clone()));
            let Some((r, a)) = hit else { break };
            let (pv, pc) = &self.pivots[&r];
            let na = -a.clone();
            axpy(&mut v, &na, pv);
            axpy(comb, &na, pc);
            from = r + 1;
        }
        v
    }

    /// returns true when the column is independent of the previous ones
    pub fn insert(&mut self, v: SparseVec, col: usize) -> bool {
        let mut comb = SparseVec::new();
        comb.insert(col, Q::one());
        let v = self.reduce(v, &mut comb);
        let Some((&r, lead)) = v.iter().next() else { return false };
        let inv = Q::one() / lead;
        let v: SparseVec = v.into_iter().map(|(i, a)| (i, a * &inv)).collect();
        let comb: SparseVec = comb.into_iter().map(|(i, a)| (i, a * &inv)).collect();
        self.pivots.insert(r, (v, comb));
        true
    }

    /// basic solution using pivot columns only, or the residual
    pub fn solve(&self, b: &SparseVec) -> std::result::Result<SparseVec, SparseVec> {
        let mut comb = SparseVec::new();
        let res = self.reduce(b.clone(), &mut comb);
        if !res.is_empty() {
            return Err(res);
        }
        // b - sum(...) = 0 with comb holding the negated coefficients
        Ok(comb.into_iter().map(|(i, a)| (i, -a)).collect())
    }
}
