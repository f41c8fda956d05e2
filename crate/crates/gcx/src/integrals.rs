//! bump propagators on circles and spheres, iterated integrals, and Monte
//! Carlo weights of graphs over configuration spaces in R^d, in the upper
//! half-plane and in the two-sheeted space H

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphcore::{is_oriented, DirectedGraph, SignedGraphClass};
use crate::polyrep::{phi_labeled, SuperPolynomial};
use crate::props::PropGraph;
use crate::q;

pub const DEFAULT_THETA0: f64 = PI / 6.0;
/// radial window of the log-uniform proposal
pub const R_MIN: f64 = 1e-3;
pub const R_MAX: f64 = 1e3;
/// samples per random substream
const BLOCK: u64 = 1 << 14;
const DEGENERATE: f64 = 1e-12;

// ---------------------------------------------------------------- quadrature

#[derive(Clone, Copy, Debug)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// globally adaptive Gauss–Kronrod (7/15) on [a, b]
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<Quad> {
    const MAX_INTERVALS: usize = 4000;
    let (v, e) = gk15(f, a, b);
    let mut parts = vec![(a, b, v, e)];
    let mut evals = 15;
    loop {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if err <= tol {
            return Ok(Quad { value: total, error: err, evals });
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature(format!("error {err:.3e} above {tol:.1e} after {evals} evaluations")));
        }
        let (i, _) = parts
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, p)| if p.3 > best.1 { (i, p.3) } else { best });
        let (lo, hi, _, _) = parts.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(f, lo, mid);
        let (v2, e2) = gk15(f, mid, hi);
        evals += 30;
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

// ---------------------------------------------------------------- propagators

/// a smooth symmetric bump on the circle, supported in (θ₀, π − θ₀) and
/// normalized so that the 1-form density(θ)dθ has total integral 1
#[derive(Clone, Debug, PartialEq)]
pub struct BumpPropagator {
    theta0: f64,
    norm: f64,
}

impl BumpPropagator {
    pub fn new(theta0: f64) -> Result<Self> {
        if !(theta0 > 0.0 && theta0 < PI / 2.0) {
            return Err(Error::Invalid(format!("support margin {theta0} outside (0, π/2)")));
        }
        let raw = BumpPropagator { theta0, norm: 1.0 };
        let q = integrate(&|t| raw.profile(t), theta0, PI - theta0, 1e-15)?;
        Ok(BumpPropagator { theta0, norm: 1.0 / q.value })
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn support(&self) -> (f64, f64) {
        (self.theta0, PI - self.theta0)
    }

    fn profile(&self, t: f64) -> f64 {
        let u = (t - PI / 2.0) / (PI / 2.0 - self.theta0);
        if u.abs() >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - u * u)).exp()
        }
    }

    /// density of the normalized 1-form, angle taken mod 2π
    pub fn density(&self, theta: f64) -> f64 {
        let t = theta.rem_euclid(2.0 * PI);
        self.norm * self.profile(t)
    }

    /// the same function in the convention where (1/2π)ḡ(θ)dθ is normalized
    pub fn gbar(&self, theta: f64) -> f64 {
        2.0 * PI * self.density(theta)
    }
}

impl Default for BumpPropagator {
    fn default() -> Self {
        BumpPropagator::new(DEFAULT_THETA0).expect("default margin is valid")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SphereKind {
    /// g depends on the polar angle only: O(2)-anti-invariant
    Zonal,
    /// ν₊ pullback of ḡ ⊗ ḡ from the torus
    NuPlus,
}

/// a propagator ω = ρ Vol on S^{d−1}, d ∈ {2, 3}, supported in the upper half
#[derive(Clone, Debug)]
pub struct Propagator {
    pub d: usize,
    pub bump: BumpPropagator,
    pub kind: SphereKind,
    zonal_norm: f64,
}

impl Propagator {
    pub fn circle(bump: BumpPropagator) -> Self {
        Propagator { d: 2, bump, kind: SphereKind::Zonal, zonal_norm: 0.0 }
    }

    pub fn sphere(bump: BumpPropagator, kind: SphereKind) -> Result<Self> {
        let mut p = Propagator { d: 3, bump, kind, zonal_norm: 1.0 };
        if kind == SphereKind::Zonal {
            let top = PI / 2.0 - p.bump.theta0;
            let q = integrate(&|phi| p.zonal_profile(phi) * phi.sin(), 0.0, top, 1e-15)?;
            p.zonal_norm = 1.0 / (2.0 * PI * q.value);
        }
        Ok(p)
    }

    pub fn new(d: usize, bump: BumpPropagator, kind: SphereKind) -> Result<Self> {
        match d {
            2 => Ok(Propagator::circle(bump)),
            3 => Propagator::sphere(bump, kind),
            _ => Err(Error::Invalid(format!("propagators exist for d = 2, 3 only, not {d}"))),
        }
    }

    fn zonal_profile(&self, phi: f64) -> f64 {
        let s = phi / (PI / 2.0 - self.bump.theta0);
        if s >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - s * s)).exp()
        }
    }

    /// ρ(u) for a unit vector u
    pub fn density(&self, u: &[f64]) -> f64 {
        if self.d == 2 {
            return self.bump.density(u[1].atan2(u[0]));
        }
        let (x, y, z) = (u[0], u[1], u[2]);
        if z <= 0.0 {
            return 0.0;
        }
        match self.kind {
            SphereKind::Zonal => self.zonal_norm * self.zonal_profile(z.clamp(-1.0, 1.0).acos()),
            SphereKind::NuPlus => {
                let a = z.atan2(x);
                let b = z.atan2(y);
                let h = self.bump.density(a) * self.bump.density(b);
                if h == 0.0 {
                    0.0
                } else {
                    h * z / ((x * x + z * z) * (y * y + z * z))
                }
            }
        }
    }

    /// ω_u(w_1, …, w_{d−1}) = ρ(u) det[u, w_1, …]
    pub fn form_value(&self, u: &[f64], w: &[Vec<f64>]) -> f64 {
        let d = self.d;
        let mut m = DMatrix::<f64>::zeros(d, d);
        for i in 0..d {
            m[(i, 0)] = u[i];
            for (j, wj) in w.iter().enumerate().take(d - 1) {
                m[(i, j + 1)] = wj[i];
            }
        }
        self.density(u) * m.determinant()
    }
}

/// positive orthonormal frame (f_1, …, f_{d−1}) of T_u S^{d−1}: det[u, f] = 1
fn frame(u: &[f64; 3], d: usize) -> [[f64; 3]; 2] {
    if d == 2 {
        return [[-u[1], u[0], 0.0], [0.0; 3]];
    }
    let a = if u[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let dot = a[0] * u[0] + a[1] * u[1] + a[2] * u[2];
    let mut f1 = [a[0] - dot * u[0], a[1] - dot * u[1], a[2] - dot * u[2]];
    let n = (f1[0] * f1[0] + f1[1] * f1[1] + f1[2] * f1[2]).sqrt();
    for x in &mut f1 {
        *x /= n;
    }
    let f2 = [u[1] * f1[2] - u[2] * f1[1], u[2] * f1[0] - u[0] * f1[2], u[0] * f1[1] - u[1] * f1[0]];
    [f1, f2]
}

fn sphere_area(d: usize) -> f64 {
    if d == 2 {
        2.0 * PI
    } else {
        4.0 * PI
    }
}

fn unit_vector(rng: &mut ChaCha8Rng, d: usize) -> [f64; 3] {
    if d == 2 {
        let t = rng.gen::<f64>() * 2.0 * PI;
        [t.cos(), t.sin(), 0.0]
    } else {
        let z = 2.0 * rng.gen::<f64>() - 1.0;
        let p = rng.gen::<f64>() * 2.0 * PI;
        let s = (1.0 - z * z).max(0.0).sqrt();
        [s * p.cos(), s * p.sin(), z]
    }
}

fn log_width() -> f64 {
    (R_MAX / R_MIN).ln()
}

fn log_uniform(rng: &mut ChaCha8Rng) -> f64 {
    R_MIN * (rng.gen::<f64>() * log_width()).exp()
}

/// density of r·w (w uniform on S^{d−1}, r log-uniform) at distance r
fn radial_density(r: f64, d: usize) -> f64 {
    if !(R_MIN..=R_MAX).contains(&r) {
        return 0.0;
    }
    1.0 / (log_width() * r.powi(d as i32) * sphere_area(d))
}

/// density of c ± r on the line
fn line_density(r: f64) -> f64 {
    if !(R_MIN..=R_MAX).contains(&r) {
        return 0.0;
    }
    1.0 / (2.0 * log_width() * r)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

// ---------------------------------------------------------------- iterated integrals

/// Λ^{(p)}: the integral of density(θ_1)⋯density(θ_p) over 0 < θ_1 < … < θ_p < π,
/// from the linear system y_j' = density · y_{j−1} by RK4 with step doubling
pub fn lambda_p(prop: &BumpPropagator, p: usize) -> Result<f64> {
    if p == 0 {
        return Err(Error::Invalid("p must be at least 1".into()));
    }
    let (a, b) = prop.support();
    let run = |steps: usize| -> f64 {
        let h = (b - a) / steps as f64;
        let mut y = vec![0.0; p + 1];
        y[0] = 1.0;
        let rhs = |t: f64, y: &[f64]| -> Vec<f64> {
            let g = prop.density(t);
            let mut out = vec![0.0; p + 1];
            for j in 1..=p {
                out[j] = g * y[j - 1];
            }
            out
        };
        for s in 0..steps {
            let t = a + s as f64 * h;
            let k1 = rhs(t, &y);
            let y2: Vec<f64> = (0..=p).map(|j| y[j] + 0.5 * h * k1[j]).collect();
            let k2 = rhs(t + 0.5 * h, &y2);
            let y3: Vec<f64> = (0..=p).map(|j| y[j] + 0.5 * h * k2[j]).collect();
            let k3 = rhs(t + 0.5 * h, &y3);
            let y4: Vec<f64> = (0..=p).map(|j| y[j] + h * k3[j]).collect();
            let k4 = rhs(t + h, &y4);
            for j in 0..=p {
                y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }
        }
        y[p]
    };
    let mut steps = 64;
    let mut prev = run(steps);
    while steps < 1 << 20 {
        steps *= 2;
        let cur = run(steps);
        if (cur - prev).abs() < 1e-13 {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature(format!("iterated integral of order {p} did not settle")))
}

// ---------------------------------------------------------------- estimates

#[derive(Clone, Debug, PartialEq)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        McConfig { samples, seed, workers: 1 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightEstimate {
    pub graph: String,
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
    pub rejected: u64,
    /// set when the weight is zero for a structural reason, without sampling
    pub exact_zero: Option<String>,
}

impl WeightEstimate {
    fn zero(graph: String, seed: u64, why: &str) -> Self {
        WeightEstimate { graph, mean: 0.0, stderr: 0.0, samples: 0, seed, rejected: 0, exact_zero: Some(why.into()) }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.exact_zero.is_some()
    }

    /// |mean| ≤ z·stderr
    pub fn consistent_with_zero(&self, z: f64) -> bool {
        self.mean.abs() <= z * self.stderr
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
    rejected: u64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(a: Moments, b: Moments) -> Moments {
        if a.n == 0 {
            return Moments { rejected: a.rejected + b.rejected, ..b };
        }
        if b.n == 0 {
            return Moments { rejected: a.rejected + b.rejected, ..a };
        }
        let n = a.n + b.n;
        let d = b.mean - a.mean;
        Moments {
            n,
            mean: a.mean + d * b.n as f64 / n as f64,
            m2: a.m2 + b.m2 + d * d * (a.n as f64) * (b.n as f64) / n as f64,
            rejected: a.rejected + b.rejected,
        }
    }
}

fn pairwise(xs: &[Moments]) -> Moments {
    match xs.len() {
        0 => Moments::default(),
        1 => xs[0],
        n => Moments::merge(pairwise(&xs[..n / 2]), pairwise(&xs[n / 2..])),
    }
}

trait Sampler: Sync {
    /// one importance-weighted draw; None marks a degenerate configuration
    fn draw(&self, rng: &mut ChaCha8Rng) -> Option<f64>;
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Resource(format!("thread pool: {e}")))
}

/// blocks of BLOCK samples each get their own ChaCha stream, so the result
/// does not depend on the worker count
fn run_mc(s: &dyn Sampler, cfg: &McConfig) -> Result<(f64, f64, u64)> {
    if cfg.samples < 2 {
        return Err(Error::Invalid("at least two samples are needed".into()));
    }
    let nblocks = cfg.samples.div_ceil(BLOCK);
    let block = |b: u64| -> Moments {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(b);
        let n = BLOCK.min(cfg.samples - b * BLOCK);
        let mut m = Moments::default();
        for _ in 0..n {
            match s.draw(&mut rng) {
                Some(x) if x.is_finite() => m.push(x),
                _ => {
                    m.push(0.0);
                    m.rejected += 1;
                }
            }
        }
        m
    };
    let parts: Vec<Moments> = pool(cfg.workers)?.install(|| (0..nblocks).into_par_iter().map(block).collect());
    let t = pairwise(&parts);
    if t.rejected * 100 > cfg.samples * 99 {
        return Err(Error::Sampling(format!("{} of {} samples degenerate", t.rejected, cfg.samples)));
    }
    let var = t.m2 / (t.n - 1) as f64;
    Ok((t.mean, (var / t.n as f64).sqrt(), t.rejected))
}

/// sign of det[group generators, slice tangents] in the ambient coordinates
fn orientation_sign(columns: Vec<Vec<f64>>) -> f64 {
    let n = columns.len();
    let m = DMatrix::from_fn(n, n, |i, j| columns[j][i]);
    let d = m.determinant();
    if d > 0.0 {
        1.0
    } else if d < 0.0 {
        -1.0
    } else {
        0.0
    }
}

// ---------------------------------------------------------------- spheres

/// ∫ ω over S^{d−1}: adaptive quadrature for d = 2, stratified Monte Carlo
/// (16 independent replicas) for d = 3
pub fn sphere_propagator_integral(prop: &Propagator, cfg: &McConfig) -> Result<WeightEstimate> {
    let name = format!("sphere d={} {:?}", prop.d, prop.kind);
    if prop.d == 2 {
        let f = |t: f64| prop.density(&[t.cos(), t.sin()]);
        let mut total = 0.0;
        let mut err = 0.0;
        let mut evals = 0;
        for i in 0..8 {
            let q = integrate(&f, i as f64 * PI / 4.0, (i + 1) as f64 * PI / 4.0, 1e-14)?;
            total += q.value;
            err += q.error;
            evals += q.evals;
        }
        return Ok(WeightEstimate {
            graph: name,
            mean: total,
            stderr: err,
            samples: evals as u64,
            seed: cfg.seed,
            rejected: 0,
            exact_zero: None,
        });
    }
    const REPLICAS: u64 = 16;
    let side = ((cfg.samples / REPLICAS) as f64).sqrt().floor() as u64;
    if side < 1 {
        return Err(Error::Invalid("too few samples for a stratified estimate".into()));
    }
    let replica = |r: u64| -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(r);
        let mut acc = 0.0;
        for i in 0..side {
            let mut row = 0.0;
            for j in 0..side {
                let z = -1.0 + 2.0 * (i as f64 + rng.gen::<f64>()) / side as f64;
                let p = 2.0 * PI * (j as f64 + rng.gen::<f64>()) / side as f64;
                let s = (1.0 - z * z).max(0.0).sqrt();
                row += prop.density(&[s * p.cos(), s * p.sin(), z]);
            }
            acc += row;
        }
        4.0 * PI * acc / (side * side) as f64
    };
    let vals: Vec<f64> = pool(cfg.workers)?.install(|| (0..REPLICAS).into_par_iter().map(replica).collect());
    let mean = vals.iter().sum::<f64>() / REPLICAS as f64;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (REPLICAS - 1) as f64;
    Ok(WeightEstimate {
        graph: name,
        mean,
        stderr: (var / REPLICAS as f64).sqrt(),
        samples: REPLICAS * side * side,
        seed: cfg.seed,
        rejected: 0,
        exact_zero: None,
    })
}

// ---------------------------------------------------------------- R^d

/// k = (d−1)l + 2 and #E = dl + 1: the form is top-degree on C_k(R^d)
pub fn counting_ok(k: usize, edges: usize, d: usize) -> bool {
    if d < 2 || k < 2 || (k - 2) % (d - 1) != 0 {
        return false;
    }
    edges == d * (k - 2) / (d - 1) + 1
}

pub fn degree_filter(g: &SignedGraphClass, d: usize) -> bool {
    counting_ok(g.graph.k, g.graph.edges.len(), d)
}

fn has_parallel(edges: &[(u8, u8)]) -> bool {
    let mut seen = std::collections::BTreeSet::new();
    edges.iter().any(|e| !seen.insert(*e))
}

fn has_triangle(g: &DirectedGraph) -> bool {
    let mut adj = vec![vec![false; g.k]; g.k];
    for &(t, h) in &g.edges {
        adj[t as usize][h as usize] = true;
        adj[h as usize][t as usize] = true;
    }
    (0..g.k).any(|a| (a + 1..g.k).any(|b| adj[a][b] && (b + 1..g.k).any(|c| adj[a][c] && adj[b][c])))
}

/// structural reason for a vanishing weight on C_k(R^d), if any
pub fn rd_structural_zero(g: &DirectedGraph, d: usize) -> Option<&'static str> {
    if !counting_ok(g.k, g.edges.len(), d) {
        return Some("form degree differs from the dimension");
    }
    if !g.is_connected() {
        return Some("disconnected");
    }
    if g.k > 2 && g.valences().contains(&1) {
        return Some("univalent vertex");
    }
    if !is_oriented(g) {
        return Some("directed cycle meets the lower hemisphere");
    }
    if has_parallel(&g.edges) {
        return Some("parallel edges");
    }
    if d >= 3 && has_triangle(g) {
        return Some("complete 3-vertex subgraph");
    }
    None
}

struct RdSampler<'a> {
    g: &'a DirectedGraph,
    prop: &'a Propagator,
    d: usize,
    origin: usize,
    sphere: usize,
    free: Vec<usize>,
    /// first column of each vertex, None for the origin
    col: Vec<Option<usize>>,
    dim: usize,
    orient: f64,
}

impl<'a> RdSampler<'a> {
    fn new(g: &'a DirectedGraph, prop: &'a Propagator, origin: usize, sphere: usize) -> Self {
        let d = prop.d;
        let free: Vec<usize> = (0..g.k).filter(|&v| v != origin && v != sphere).collect();
        let mut col = vec![None; g.k];
        col[sphere] = Some(0);
        for (i, &v) in free.iter().enumerate() {
            col[v] = Some(d - 1 + d * i);
        }
        let dim = d * g.k - d - 1;
        let mut s = RdSampler { g, prop, d, origin, sphere, free, col, dim, orient: 1.0 };
        s.orient = s.reference_orientation();
        s
    }

    fn reference_orientation(&self) -> f64 {
        let (d, k) = (self.d, self.g.k);
        let n = d * k;
        let mut pos = vec![[0.0; 3]; k];
        let b = [0.6, 0.0, 0.8];
        pos[self.sphere] = if d == 2 { [0.6, 0.8, 0.0] } else { b };
        for (i, &v) in self.free.iter().enumerate() {
            pos[v] = [1.3 + i as f64, -0.7 + 0.3 * i as f64, 0.45 * i as f64];
        }
        let mut cols = Vec::new();
        for a in 0..d {
            let mut c = vec![0.0; n];
            for v in 0..k {
                c[d * v + a] = 1.0;
            }
            cols.push(c);
        }
        let mut r = vec![0.0; n];
        for v in 0..k {
            for a in 0..d {
                r[d * v + a] = pos[v][a];
            }
        }
        cols.push(r);
        let fr = frame(&pos[self.sphere], d);
        for f in fr.iter().take(d - 1) {
            let mut c = vec![0.0; n];
            for a in 0..d {
                c[d * self.sphere + a] = f[a];
            }
            cols.push(c);
        }
        for &v in &self.free {
            for a in 0..d {
                let mut c = vec![0.0; n];
                c[d * v + a] = 1.0;
                cols.push(c);
            }
        }
        orientation_sign(cols)
    }
}

impl RdSampler<'_> {
    /// a configuration with its propagator product, the matrix of edge
    /// 1-forms against the slice coordinates, and the proposal density;
    /// with `lazy` the matrix is skipped once a propagator factor vanishes
    fn sample(&self, rng: &mut ChaCha8Rng, lazy: bool) -> Option<(f64, DMatrix<f64>, f64)> {
        let d = self.d;
        let k = self.g.k;
        let mut pos = vec![[0.0f64; 3]; k];
        pos[self.sphere] = unit_vector(rng, d);
        let mut dens = 1.0 / sphere_area(d);
        let mut placed = vec![self.origin, self.sphere];
        for &v in &self.free {
            let c = placed[rng.gen_range(0..placed.len())];
            let r = log_uniform(rng);
            let w = unit_vector(rng, d);
            let mut x = pos[c];
            for a in 0..d {
                x[a] += r * w[a];
            }
            let mix: f64 = placed
                .iter()
                .map(|&c| {
                    let mut s = 0.0;
                    for a in 0..d {
                        s += (x[a] - pos[c][a]).powi(2);
                    }
                    radial_density(s.sqrt(), d)
                })
                .sum::<f64>()
                / placed.len() as f64;
            dens *= mix;
            pos[v] = x;
            placed.push(v);
        }
        // edge directions and the propagator factors
        let mut rho = 1.0;
        let mut dirs = Vec::with_capacity(self.g.edges.len());
        for &(s, t) in &self.g.edges {
            let (s, t) = (s as usize, t as usize);
            let mut v = [0.0; 3];
            let mut r2 = 0.0;
            for a in 0..d {
                v[a] = pos[t][a] - pos[s][a];
                r2 += v[a] * v[a];
            }
            let r = r2.sqrt();
            if r < DEGENERATE {
                return None;
            }
            for x in v.iter_mut().take(d) {
                *x /= r;
            }
            rho *= self.prop.density(&v[..d]);
            if rho == 0.0 && lazy {
                return Some((0.0, DMatrix::zeros(0, 0), dens));
            }
            dirs.push((s, t, v, r));
        }
        let mut m = DMatrix::<f64>::zeros(dirs.len() * (d - 1), self.dim);
        let tangent = frame(&pos[self.sphere], d);
        let mut row = 0;
        for &(s, t, u, r) in &dirs {
            let fr = frame(&u, d);
            for f in fr.iter().take(d - 1) {
                for (v, sign) in [(t, 1.0), (s, -1.0)] {
                    let Some(c0) = self.col[v] else { continue };
                    if v == self.sphere {
                        for (j, tj) in tangent.iter().take(d - 1).enumerate() {
                            let dot: f64 = (0..d).map(|a| f[a] * tj[a]).sum();
                            m[(row, c0 + j)] += sign * dot / r;
                        }
                    } else {
                        for a in 0..d {
                            m[(row, c0 + a)] += sign * f[a] / r;
                        }
                    }
                }
                row += 1;
            }
        }
        Some((rho, m, dens))
    }
}

impl Sampler for RdSampler<'_> {
    fn draw(&self, rng: &mut ChaCha8Rng) -> Option<f64> {
        let (rho, m, dens) = self.sample(rng, true)?;
        if rho == 0.0 {
            return Some(0.0);
        }
        Some(self.orient * rho * m.determinant() / dens)
    }
}

/// Monte Carlo weight ∫ ∧_e π_e^*(ω) over C_k(R^d), with vertex 1 at the origin
/// and vertex 2 on the unit sphere
pub fn mc_weight_rd(g: &DirectedGraph, d: usize, prop: &Propagator, cfg: &McConfig) -> Result<WeightEstimate> {
    mc_weight_rd_gauged(g, d, prop, cfg, 0, 1)
}

/// as mc_weight_rd with a chosen pair (origin, sphere) of gauge vertices (0-based)
pub fn mc_weight_rd_gauged(
    g: &DirectedGraph,
    d: usize,
    prop: &Propagator,
    cfg: &McConfig,
    origin: usize,
    sphere: usize,
) -> Result<WeightEstimate> {
    g.validate()?;
    if prop.d != d {
        return Err(Error::FlavorMismatch(d as i32, prop.d as i32));
    }
    if !(2..=3).contains(&d) {
        return Err(Error::Invalid(format!("d = {d} is not supported")));
    }
    if g.k < 2 || origin == sphere || origin >= g.k || sphere >= g.k {
        return Err(Error::Invalid("need two distinct gauge vertices".into()));
    }
    let name = g.encode(d as i32);
    if let Some(why) = rd_structural_zero(g, d) {
        return Ok(WeightEstimate::zero(name, cfg.seed, why));
    }
    let s = RdSampler::new(g, prop, origin, sphere);
    let (mean, stderr, rejected) = run_mc(&s, cfg)?;
    Ok(WeightEstimate { graph: name, mean, stderr, samples: cfg.samples, seed: cfg.seed, rejected, exact_zero: None })
}

/// top-degree part of the wedge of the edge 1-forms, rescaled to unit
/// covectors and without propagator factors, on the gauge slice at random
/// configurations: the determinant when the form has the slice dimension,
/// the Gram norm of the wedge when it has more factors, 0 when it has fewer
pub fn rd_integrand_samples(g: &DirectedGraph, prop: &Propagator, n: usize, seed: u64) -> Result<Vec<f64>> {
    g.validate()?;
    if g.k < 2 {
        return Err(Error::Invalid("need two vertices to fix the gauge".into()));
    }
    let s = RdSampler::new(g, prop, 0, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let Some((_, m, _)) = s.sample(&mut rng, false) else {
            out.push(0.0);
            continue;
        };
        let mut u = m;
        for mut r in u.row_iter_mut() {
            let n = r.norm();
            if n > 0.0 {
                r /= n;
            }
        }
        let v = match u.nrows().cmp(&u.ncols()) {
            std::cmp::Ordering::Equal => u.determinant(),
            std::cmp::Ordering::Greater => (&u * u.transpose()).determinant().abs().sqrt(),
            std::cmp::Ordering::Less => 0.0,
        };
        out.push(v);
    }
    Ok(out)
}

// ---------------------------------------------------------------- half-plane

/// k aerial vertices 1..k and m boundary vertices k+1..k+m; `order` lists the
/// boundary vertices from left to right (0-based internally)
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfPlaneGraph {
    pub aerial: usize,
    pub boundary: usize,
    pub edges: Vec<(u8, u8)>,
    pub order: Vec<u8>,
}

impl HalfPlaneGraph {
    pub fn new(aerial: usize, boundary: usize, edges: Vec<(u8, u8)>, order: Vec<u8>) -> Result<Self> {
        let g = HalfPlaneGraph { aerial, boundary, edges, order };
        g.validate()?;
        Ok(g)
    }

    /// one aerial vertex with an edge to each of two boundary points; the
    /// mirror puts the first edge's target on the right
    pub fn wedge(mirrored: bool) -> Self {
        let order = if mirrored { vec![2, 1] } else { vec![1, 2] };
        HalfPlaneGraph { aerial: 1, boundary: 2, edges: vec![(0, 1), (0, 2)], order }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.aerial + self.boundary;
        if n == 0 || n > 32 {
            return Err(Error::Structural(format!("{n} vertices out of range")));
        }
        if self.aerial == 0 {
            return Err(Error::Structural("no aerial vertex".into()));
        }
        for &(s, t) in &self.edges {
            if s as usize >= n || t as usize >= n || s == t {
                return Err(Error::Structural(format!("bad edge {}>{}", s + 1, t + 1)));
            }
        }
        let mut o: Vec<u8> = self.order.clone();
        o.sort();
        let want: Vec<u8> = (self.aerial..n).map(|x| x as u8).collect();
        if o != want {
            return Err(Error::Structural("order must list each boundary vertex once".into()));
        }
        Ok(())
    }

    /// "A1;B2;E:1>2,1>3;O:2,3" with 1-based labels
    pub fn encode(&self) -> String {
        let es: Vec<String> = self.edges.iter().map(|&(s, t)| format!("{}>{}", s + 1, t + 1)).collect();
        let os: Vec<String> = self.order.iter().map(|&b| (b + 1).to_string()).collect();
        format!("A{};B{};E:{};O:{}", self.aerial, self.boundary, es.join(","), os.join(","))
    }

    pub fn decode(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("{m} in '{}'", s.chars().take(60).collect::<String>()));
        let parts: Vec<&str> = s.trim().split(';').collect();
        if parts.len() != 4 {
            return Err(bad("expected 4 fields"));
        }
        let num = |p: &str, tag: char| p.strip_prefix(tag).and_then(|x| x.parse::<usize>().ok()).filter(|&x| x <= 32);
        let aerial = num(parts[0], 'A').ok_or_else(|| bad("bad A field"))?;
        let boundary = num(parts[1], 'B').ok_or_else(|| bad("bad B field"))?;
        let label = |x: &str| -> Result<u8> {
            let v: u8 = x.trim().parse().map_err(|_| bad("bad label"))?;
            if v == 0 {
                return Err(bad("labels are 1-based"));
            }
            Ok(v - 1)
        };
        let es = parts[2].strip_prefix("E:").ok_or_else(|| bad("missing E:"))?;
        let mut edges = Vec::new();
        if !es.is_empty() {
            for e in es.split(',') {
                let (a, b) = e.split_once('>').ok_or_else(|| bad("edge without '>'"))?;
                edges.push((label(a)?, label(b)?));
            }
        }
        let os = parts[3].strip_prefix("O:").ok_or_else(|| bad("missing O:"))?;
        let mut order = Vec::new();
        if !os.is_empty() {
            for o in os.split(',') {
                order.push(label(o)?);
            }
        }
        HalfPlaneGraph::new(aerial, boundary, edges, order)
    }
}

struct HalfSampler<'a> {
    g: &'a HalfPlaneGraph,
    prop: &'a BumpPropagator,
    /// boundary vertex at each position
    order: Vec<usize>,
    dim: usize,
    orient: f64,
}

#[derive(Clone, Copy)]
enum HCol {
    Fixed,
    /// aerial with (Re, Im) columns
    Plane(usize),
    /// aerial on the unit upper semicircle, tangent column
    Arc(usize, f64),
    /// boundary point with one column
    Line(usize),
}

impl<'a> HalfSampler<'a> {
    fn new(g: &'a HalfPlaneGraph, prop: &'a BumpPropagator) -> Self {
        let order: Vec<usize> = g.order.iter().map(|&b| b as usize).collect();
        let dim = 2 * g.aerial + g.boundary - 2;
        let mut s = HalfSampler { g, prop, order, dim, orient: 1.0 };
        s.orient = s.reference_orientation();
        s
    }

    fn n(&self) -> usize {
        self.g.aerial + self.g.boundary
    }

    /// ambient coordinates: aerials (Re, Im) by label, then boundary points by position
    fn layout(&self, z: &[(f64, f64)]) -> Vec<HCol> {
        let (k, m) = (self.g.aerial, self.g.boundary);
        let mut cols = vec![HCol::Fixed; self.n()];
        let mut next = 0;
        for (a, c) in cols.iter_mut().enumerate().take(k) {
            if m == 0 && a == 0 {
                continue;
            }
            if m == 1 && a == 0 {
                *c = HCol::Arc(next, z[0].1.atan2(z[0].0));
                next += 1;
                continue;
            }
            *c = HCol::Plane(next);
            next += 2;
        }
        for (p, &b) in self.order.iter().enumerate() {
            if p >= 2 || (m == 1 && p >= 1) {
                cols[b] = HCol::Line(next);
                next += 1;
            }
        }
        let _ = m;
        cols
    }

    fn reference_orientation(&self) -> f64 {
        let (k, m) = (self.g.aerial, self.g.boundary);
        let mut z = vec![(0.0, 0.0); self.n()];
        for (a, p) in z.iter_mut().enumerate().take(k) {
            *p = (0.3 + 0.7 * a as f64, 0.9 + 0.4 * a as f64);
        }
        if m == 1 {
            z[0] = (0.6, 0.8);
        }
        if m == 0 {
            z[0] = (0.0, 1.0);
        }
        for (p, &b) in self.order.iter().enumerate() {
            z[b] = (p as f64 * 1.5, 0.0);
        }
        let amb = 2 * k + m;
        let idx = |v: usize| -> (usize, Option<usize>) {
            if v < k {
                (2 * v, Some(2 * v + 1))
            } else {
                let p = self.order.iter().position(|&b| b == v).unwrap();
                (2 * k + p, None)
            }
        };
        let mut t = vec![0.0; amb];
        let mut r = vec![0.0; amb];
        for (v, &(x, y)) in z.iter().enumerate() {
            let (re, im) = idx(v);
            t[re] = 1.0;
            r[re] = x;
            if let Some(im) = im {
                r[im] = y;
            }
        }
        let mut cols = vec![t, r];
        let lay = self.layout(&z);
        let mut slice: Vec<(usize, Vec<f64>)> = Vec::new();
        for (v, c) in lay.iter().enumerate() {
            let (re, im) = idx(v);
            match *c {
                HCol::Fixed => {}
                HCol::Plane(c0) => {
                    let mut a = vec![0.0; amb];
                    a[re] = 1.0;
                    slice.push((c0, a));
                    let mut b = vec![0.0; amb];
                    b[im.unwrap()] = 1.0;
                    slice.push((c0 + 1, b));
                }
                HCol::Arc(c0, th) => {
                    let mut a = vec![0.0; amb];
                    a[re] = -th.sin();
                    a[im.unwrap()] = th.cos();
                    slice.push((c0, a));
                }
                HCol::Line(c0) => {
                    let mut a = vec![0.0; amb];
                    a[re] = 1.0;
                    slice.push((c0, a));
                }
            }
        }
        slice.sort_by_key(|s| s.0);
        cols.extend(slice.into_iter().map(|s| s.1));
        orientation_sign(cols)
    }
}

fn arg_row(x: f64, y: f64) -> (f64, f64, f64) {
    // ψ = atan2(y, x): dψ = (x dy − y dx)/r²
    let r2 = x * x + y * y;
    (y.atan2(x), -y / r2, x / r2)
}

impl Sampler for HalfSampler<'_> {
    fn draw(&self, rng: &mut ChaCha8Rng) -> Option<f64> {
        let (k, m) = (self.g.aerial, self.g.boundary);
        let n = self.n();
        let mut z = vec![(0.0f64, 0.0f64); n];
        let mut dens = 1.0;
        let mut centers: Vec<(f64, f64, bool)> = Vec::new();
        if m >= 1 {
            z[self.order[0]] = (0.0, 0.0);
            centers.push((0.0, 0.0, true));
        }
        if m >= 2 {
            z[self.order[1]] = (1.0, 0.0);
            centers.push((1.0, 0.0, true));
        }
        let mut first = 0;
        if m == 0 {
            z[0] = (0.0, 1.0);
            centers.push((0.0, 1.0, false));
            first = 1;
        } else if m == 1 {
            let th = rng.gen::<f64>() * PI;
            z[0] = (th.cos(), th.sin());
            dens /= PI;
            centers.push((z[0].0, z[0].1, false));
            first = 1;
        }
        for a in first..k {
            let (cx, cy, on_line) = centers[rng.gen_range(0..centers.len())];
            let r = log_uniform(rng);
            let th = if on_line { rng.gen::<f64>() * PI } else { rng.gen::<f64>() * 2.0 * PI };
            let p = (cx + r * th.cos(), cy + r * th.sin());
            if p.1 <= 0.0 {
                return Some(0.0);
            }
            let mix: f64 = centers
                .iter()
                .map(|&(x, y, line)| {
                    let rr = ((p.0 - x).powi(2) + (p.1 - y).powi(2)).sqrt();
                    if !(R_MIN..=R_MAX).contains(&rr) {
                        0.0
                    } else {
                        let ang = if line { PI } else { 2.0 * PI };
                        1.0 / (log_width() * rr * rr * ang)
                    }
                })
                .sum::<f64>()
                / centers.len() as f64;
            dens *= mix;
            z[a] = p;
            centers.push((p.0, p.1, false));
        }
        // remaining boundary points, to the right of the second one
        let rest = self.order.len().saturating_sub(2);
        if rest > 0 {
            let mut xs = Vec::with_capacity(rest);
            for _ in 0..rest {
                let c = centers[rng.gen_range(0..centers.len())].0;
                let r = log_uniform(rng);
                let x = if rng.gen::<bool>() { c + r } else { c - r };
                let q: f64 = centers.iter().map(|c| line_density((x - c.0).abs())).sum::<f64>() / centers.len() as f64;
                dens *= q;
                xs.push(x);
            }
            xs.sort_by(|a, b| a.total_cmp(b));
            dens *= factorial(rest);
            if xs[0] <= 1.0 {
                return Some(0.0);
            }
            for (i, x) in xs.into_iter().enumerate() {
                z[self.order[i + 2]] = (x, 0.0);
            }
        }
        let lay = self.layout(&z);
        let mut mat = DMatrix::<f64>::zeros(self.dim, self.dim);
        let mut rho = 1.0;
        for (row, &(s, t)) in self.g.edges.iter().enumerate() {
            let (s, t) = (s as usize, t as usize);
            let x = z[t].0 - z[s].0;
            let y = -(z[t].1 - z[s].1);
            if x.abs() + y.abs() < DEGENERATE {
                return None;
            }
            let (psi, gx, gy) = arg_row(x, y);
            let p = self.prop.density(psi);
            if p == 0.0 || y <= 0.0 {
                return Some(0.0);
            }
            rho *= p;
            // x = Re_t − Re_s, y = −(Im_t − Im_s)
            for (v, sign) in [(t, 1.0), (s, -1.0)] {
                let dre = sign * gx;
                let dim_ = -sign * gy;
                match lay[v] {
                    HCol::Fixed => {}
                    HCol::Plane(c) => {
                        mat[(row, c)] += dre;
                        mat[(row, c + 1)] += dim_;
                    }
                    HCol::Arc(c, th) => mat[(row, c)] += -th.sin() * dre + th.cos() * dim_,
                    HCol::Line(c) => mat[(row, c)] += dre,
                }
            }
        }
        Some(self.orient * rho * mat.determinant() / dens)
    }
}

/// Monte Carlo weight over C_{k,m}(H) with the first boundary point at 0 and
/// the second at 1
pub fn mc_weight_halfplane(g: &HalfPlaneGraph, prop: &BumpPropagator, cfg: &McConfig) -> Result<WeightEstimate> {
    g.validate()?;
    let name = g.encode();
    let (k, m) = (g.aerial, g.boundary);
    if 2 * k + m < 2 || g.edges.len() != 2 * k + m - 2 {
        return Ok(WeightEstimate::zero(name, cfg.seed, "form degree differs from the dimension"));
    }
    if g.edges.iter().any(|&(s, _)| s as usize >= k) {
        return Ok(WeightEstimate::zero(name, cfg.seed, "edge leaves the boundary"));
    }
    let aer: Vec<(u8, u8)> = g.edges.iter().copied().filter(|&(_, t)| (t as usize) < k).collect();
    if !crate::graphcore::is_oriented(&DirectedGraph { k, edges: aer, loops_allowed: false }) {
        return Ok(WeightEstimate::zero(name, cfg.seed, "directed cycle"));
    }
    if has_parallel(&g.edges) {
        return Ok(WeightEstimate::zero(name, cfg.seed, "parallel edges"));
    }
    let s = HalfSampler::new(g, prop);
    let (mean, stderr, rejected) = run_mc(&s, cfg)?;
    Ok(WeightEstimate { graph: name, mean, stderr, samples: cfg.samples, seed: cfg.seed, rejected, exact_zero: None })
}

// ---------------------------------------------------------------- H

/// 2#E_int + #E_in + #E_out = 3k + m + n − 3
pub fn h_top_degree(g: &PropGraph) -> bool {
    2 * g.e_int.len() + g.e_in.len() + g.e_out.len() + 3 == 3 * g.k + g.m + g.n
}

struct HSampler<'a> {
    g: &'a PropGraph,
    prop: &'a BumpPropagator,
    dim: usize,
    orient: f64,
}

impl<'a> HSampler<'a> {
    fn new(g: &'a PropGraph, prop: &'a BumpPropagator) -> Self {
        let dim = 3 * g.k + g.m + g.n - 3;
        let mut s = HSampler { g, prop, dim, orient: 1.0 };
        s.orient = s.reference_orientation();
        s
    }

    fn col_black(&self, v: usize) -> Option<usize> {
        if v == 0 {
            None
        } else {
            Some(3 * (v - 1))
        }
    }

    fn col_in(&self, w: usize) -> usize {
        3 * (self.g.k - 1) + w
    }

    fn col_out(&self, w: usize) -> usize {
        3 * (self.g.k - 1) + self.g.n + w
    }

    /// ambient: blacks (x, y, t) by label, then x⁰ of in-whites, then y⁰ of out-whites;
    /// generators: shift of x, shift of y, (λx, λ⁻¹y, λt)
    fn reference_orientation(&self) -> f64 {
        let (k, m, n) = (self.g.k, self.g.m, self.g.n);
        let amb = 3 * k + n + m;
        let bl: Vec<[f64; 3]> =
            (0..k).map(|v| if v == 0 { [0.0, 0.0, 1.0] } else { [0.4 * v as f64, -0.3 * v as f64, 1.0 + 0.5 * v as f64] }).collect();
        let mut tx = vec![0.0; amb];
        let mut ty = vec![0.0; amb];
        let mut dl = vec![0.0; amb];
        for (v, b) in bl.iter().enumerate() {
            tx[3 * v] = 1.0;
            ty[3 * v + 1] = 1.0;
            dl[3 * v] = b[0];
            dl[3 * v + 1] = -b[1];
            dl[3 * v + 2] = b[2];
        }
        for w in 0..n {
            tx[3 * k + w] = 1.0;
            dl[3 * k + w] = w as f64 - 0.5;
        }
        for w in 0..m {
            ty[3 * k + n + w] = 1.0;
            dl[3 * k + n + w] = -(w as f64 - 0.7);
        }
        let mut cols = vec![tx, ty, dl];
        for i in 3..amb {
            let mut c = vec![0.0; amb];
            c[i] = 1.0;
            cols.push(c);
        }
        orientation_sign(cols)
    }
}

impl Sampler for HSampler<'_> {
    fn draw(&self, rng: &mut ChaCha8Rng) -> Option<f64> {
        let (k, m, n) = (self.g.k, self.g.m, self.g.n);
        let mut b = vec![[0.0f64; 3]; k];
        b[0] = [0.0, 0.0, 1.0];
        let mut dens = 1.0;
        for v in 1..k {
            let c = rng.gen_range(0..v);
            let r = log_uniform(rng);
            let th = rng.gen::<f64>() * 2.0 * PI;
            let x = b[c][0] + r * th.cos();
            let t = b[c][2] + r * th.sin();
            let r2 = log_uniform(rng);
            let y = if rng.gen::<bool>() { b[c][1] + r2 } else { b[c][1] - r2 };
            if t <= 0.0 {
                return Some(0.0);
            }
            let mix: f64 = (0..v)
                .map(|c| {
                    let rr = ((x - b[c][0]).powi(2) + (t - b[c][2]).powi(2)).sqrt();
                    radial_density(rr, 2) * line_density((y - b[c][1]).abs())
                })
                .sum::<f64>()
                / v as f64;
            dens *= mix;
            b[v] = [x, y, t];
        }
        let mut line = |axis: usize, count: usize| -> Vec<f64> {
            let mut xs = Vec::with_capacity(count);
            for _ in 0..count {
                let c = b[rng.gen_range(0..k)][axis];
                let r = log_uniform(rng);
                let x = if rng.gen::<bool>() { c + r } else { c - r };
                let q: f64 = b.iter().map(|p| line_density((x - p[axis]).abs())).sum::<f64>() / k as f64;
                dens *= q;
                xs.push(x);
            }
            xs.sort_by(|a, b| a.total_cmp(b));
            dens *= factorial(count);
            xs
        };
        let x0 = line(0, n);
        let y0 = line(1, m);
        let mut mat = DMatrix::<f64>::zeros(self.dim, self.dim);
        let mut rho = 1.0;
        let mut row = 0;
        let put = |row: usize, col: Option<usize>, val: f64, mat: &mut DMatrix<f64>| {
            if let Some(c) = col {
                mat[(row, c)] += val;
            }
        };
        // in-legs: ψ = Arg(z'_v − x⁰_w)
        for &(w, v) in &self.g.e_in {
            let (w, v) = (w as usize, v as usize);
            let (x, y) = (b[v][0] - x0[w], b[v][2]);
            let (psi, gx, gy) = arg_row(x, y);
            let p = self.prop.density(psi);
            if p == 0.0 {
                return Some(0.0);
            }
            rho *= p;
            let cb = self.col_black(v);
            put(row, cb, gx, &mut mat);
            put(row, cb.map(|c| c + 2), gy, &mut mat);
            put(row, Some(self.col_in(w)), -gx, &mut mat);
            row += 1;
        }
        // internal edges: Arg(z'_2 − z'_1) and Arg(conj(z''_2 − z''_1))
        for &(s, t) in &self.g.e_int {
            let (s, t) = (s as usize, t as usize);
            let (x, y) = (b[t][0] - b[s][0], b[t][2] - b[s][2]);
            if x.abs() + y.abs() < DEGENERATE {
                return None;
            }
            let (psi, gx, gy) = arg_row(x, y);
            let p1 = self.prop.density(psi);
            let (x2, y2) = (b[t][1] - b[s][1], 1.0 / b[s][2] - 1.0 / b[t][2]);
            let (psi2, hx, hy) = arg_row(x2, y2);
            let p2 = self.prop.density(psi2);
            if p1 == 0.0 || p2 == 0.0 {
                return Some(0.0);
            }
            rho *= p1 * p2;
            let (cs, ct) = (self.col_black(s), self.col_black(t));
            put(row, ct, gx, &mut mat);
            put(row, ct.map(|c| c + 2), gy, &mut mat);
            put(row, cs, -gx, &mut mat);
            put(row, cs.map(|c| c + 2), -gy, &mut mat);
            row += 1;
            let (ts, tt) = (b[s][2], b[t][2]);
            put(row, ct.map(|c| c + 1), hx, &mut mat);
            put(row, cs.map(|c| c + 1), -hx, &mut mat);
            put(row, cs.map(|c| c + 2), -hy / (ts * ts), &mut mat);
            put(row, ct.map(|c| c + 2), hy / (tt * tt), &mut mat);
            row += 1;
        }
        // out-legs: ψ = Arg(conj(y⁰_w − z''_v)) = Arg((y⁰_w − y_v) + i/t_v)
        for &(v, w) in &self.g.e_out {
            let (v, w) = (v as usize, w as usize);
            let tv = b[v][2];
            let (x, y) = (y0[w] - b[v][1], 1.0 / tv);
            let (psi, gx, gy) = arg_row(x, y);
            let p = self.prop.density(psi);
            if p == 0.0 {
                return Some(0.0);
            }
            rho *= p;
            let cb = self.col_black(v);
            put(row, Some(self.col_out(w)), gx, &mut mat);
            put(row, cb.map(|c| c + 1), -gx, &mut mat);
            put(row, cb.map(|c| c + 2), -gy / (tv * tv), &mut mat);
            row += 1;
        }
        Some(self.orient * rho * mat.determinant() / dens)
    }
}

/// Monte Carlo weight of a prop graph over C_{k;m,n}(H), with the first
/// black vertex fixed at (x, y, t) = (0, 0, 1)
pub fn mc_weight_h(g: &PropGraph, prop: &BumpPropagator, cfg: &McConfig) -> Result<WeightEstimate> {
    g.validate()?;
    let name = g.encode();
    if g.k == 0 || g.m == 0 || g.n == 0 {
        return Err(Error::Invalid("need a black vertex and whites on both lines".into()));
    }
    if !h_top_degree(g) {
        return Ok(WeightEstimate::zero(name, cfg.seed, "form degree differs from the dimension"));
    }
    if !is_oriented(&DirectedGraph { k: g.k, edges: g.e_int.clone(), loops_allowed: false }) {
        return Ok(WeightEstimate::zero(name, cfg.seed, "directed cycle"));
    }
    if has_parallel(&g.e_in) || has_parallel(&g.e_int) || has_parallel(&g.e_out) {
        return Ok(WeightEstimate::zero(name, cfg.seed, "parallel edges"));
    }
    let mut legs_in = vec![0; g.n];
    let mut legs_out = vec![0; g.m];
    g.e_in.iter().for_each(|&(w, _)| legs_in[w as usize] += 1);
    g.e_out.iter().for_each(|&(_, w)| legs_out[w as usize] += 1);
    if legs_in.contains(&0) || legs_out.contains(&0) {
        return Ok(WeightEstimate::zero(name, cfg.seed, "white vertex without legs"));
    }
    let s = HSampler::new(g, prop);
    let (mean, stderr, rejected) = run_mc(&s, cfg)?;
    Ok(WeightEstimate { graph: name, mean, stderr, samples: cfg.samples, seed: cfg.seed, rejected, exact_zero: None })
}

// ---------------------------------------------------------------- first order star product

#[derive(Clone, Debug)]
pub struct StarOrder1 {
    /// B₁(f,g) − B₁(g,f)
    pub value: SuperPolynomial,
    /// W(order 1,2) − W(order 2,1)
    pub coefficient: f64,
    pub stderr: f64,
    pub weights: Option<(WeightEstimate, WeightEstimate)>,
}

/// Φ of the wedge: π with one edge into f and one into g, sign fixed so that
/// ∂x∧∂y gives {x, y} = 1
pub fn wedge_operator(pi: &SuperPolynomial, f: &SuperPolynomial, g: &SuperPolynomial) -> Result<SuperPolynomial> {
    let wedge = DirectedGraph { k: 3, edges: vec![(1, 0), (2, 0)], loops_allowed: false };
    Ok(phi_labeled(&wedge, &[pi.clone(), f.clone(), g.clone()])?.scale(&q::q(-1)))
}

/// B₁ is the average over the two edge labellings of the wedge, weighted by
/// half-plane weights; the antisymmetrization is (W₁₂ − W₂₁)(P(f,g) − P(g,f))/2
pub fn star_order1(
    pi: &SuperPolynomial,
    prop: &BumpPropagator,
    f: &SuperPolynomial,
    g: &SuperPolynomial,
    cfg: &McConfig,
) -> Result<StarOrder1> {
    if pi.spec.d != 2 {
        return Err(Error::FlavorMismatch(2, pi.spec.d));
    }
    let anti = wedge_operator(pi, f, g)?.sub(&wedge_operator(pi, g, f)?)?;
    if anti.is_zero() {
        return Ok(StarOrder1 { value: anti, coefficient: 0.0, stderr: 0.0, weights: None });
    }
    let w12 = mc_weight_halfplane(&HalfPlaneGraph::wedge(false), prop, cfg)?;
    let cfg2 = McConfig { seed: cfg.seed.wrapping_add(1), ..cfg.clone() };
    let w21 = mc_weight_halfplane(&HalfPlaneGraph::wedge(true), prop, &cfg2)?;
    let c = w12.mean - w21.mean;
    let se = (w12.stderr.powi(2) + w21.stderr.powi(2)).sqrt();
    let value = anti.scale(&(q::from_f64(c / 2.0)?));
    Ok(StarOrder1 { value, coefficient: c, stderr: se, weights: Some((w12, w21)) })
}
