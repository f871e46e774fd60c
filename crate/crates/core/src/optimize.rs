//! Multistart quasi-Newton descent on products of spheres, with a rayon fan-out
//! behind the `parallel` feature and a sequential path that produces the same
//! result bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How independent restarts are scheduled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Runs `f(0..n)` and returns the results in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
            _ => (0..n).map(f).collect(),
        }
    }
}

/// Independent, order-free RNG for restart `index` under `seed`.
pub fn restart_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// A smooth objective restricted to a manifold given by a retraction.
pub trait Objective: Sync {
    /// Value and Euclidean gradient at `x`.
    fn value_grad(&self, x: &[f64], grad: &mut [f64]) -> f64;

    fn value(&self, x: &[f64]) -> f64 {
        let mut g = vec![0.0; x.len()];
        self.value_grad(x, &mut g)
    }

    /// Maps `x` back onto the manifold.
    fn retract(&self, x: &mut [f64]);

    /// Removes the normal component of `grad` at `x`.
    fn tangent(&self, x: &[f64], grad: &mut [f64]);
}

#[derive(Clone, Copy, Debug)]
pub struct DescentOptions {
    pub iters: usize,
    /// Stop when the tangent gradient norm falls below this.
    pub grad_tol: f64,
    /// Stop when the value falls below this.
    pub value_floor: f64,
}

impl Default for DescentOptions {
    fn default() -> Self {
        Self {
            iters: 300,
            grad_tol: 1e-12,
            value_floor: 0.0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DescentRun {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// Limited-memory BFGS direction `-H g` from the stored pairs `(s, y)`.
fn lbfgs_direction(grad: &[f64], hist: &[(Vec<f64>, Vec<f64>)]) -> Vec<f64> {
    let mut q = grad.to_vec();
    let mut alphas = Vec::with_capacity(hist.len());
    for (s, y) in hist.iter().rev() {
        let rho = 1.0 / dot(y, s);
        let a = rho * dot(s, &q);
        q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
        alphas.push((a, rho));
    }
    if let Some((s, y)) = hist.last() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for ((s, y), (a, rho)) in hist.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

const HISTORY: usize = 8;

/// Limited-memory BFGS with Armijo backtracking along the retraction.
/// Falls back to a steepest-descent step, with a step length that grows
/// after each success, whenever the quasi-Newton direction fails.
pub fn descend<O: Objective + ?Sized>(obj: &O, x0: Vec<f64>, opts: &DescentOptions) -> DescentRun {
    let mut x = x0;
    obj.retract(&mut x);
    let mut grad = vec![0.0; x.len()];
    let mut f = obj.value_grad(&x, &mut grad);
    obj.tangent(&x, &mut grad);
    let mut evaluations = 1;
    let mut gstep = 1.0;
    let mut hist: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    let mut trial = vec![0.0; x.len()];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.iters {
        let gn = norm(&grad);
        if !f.is_finite() {
            break;
        }
        if gn <= opts.grad_tol || f <= opts.value_floor {
            converged = true;
            break;
        }
        iterations += 1;
        let mut accepted = None;
        for quasi in [true, false] {
            if quasi && hist.is_empty() {
                continue;
            }
            let (dir, mut t) = if quasi {
                (lbfgs_direction(&grad, &hist), 1.0)
            } else {
                (grad.iter().map(|g| -g).collect(), gstep)
            };
            let slope = dot(&dir, &grad);
            if slope >= 0.0 {
                continue;
            }
            for _ in 0..60 {
                for ((tr, xi), di) in trial.iter_mut().zip(&x).zip(&dir) {
                    *tr = xi + t * di;
                }
                obj.retract(&mut trial);
                let ft = obj.value(&trial);
                evaluations += 1;
                if ft.is_finite() && ft <= f + 1e-4 * t * slope {
                    accepted = Some((quasi, t));
                    break;
                }
                t *= 0.5;
                if t < 1e-300 {
                    break;
                }
            }
            if accepted.is_some() {
                break;
            }
            hist.clear();
        }
        let Some((quasi, t)) = accepted else {
            converged = true;
            break;
        };
        if !quasi {
            gstep = 2.0 * t;
        }
        let mut new_grad = vec![0.0; x.len()];
        let new_f = obj.value_grad(&trial, &mut new_grad);
        obj.tangent(&trial, &mut new_grad);
        evaluations += 1;
        let s: Vec<f64> = trial.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = new_grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) && sy > 0.0 {
            if hist.len() == HISTORY {
                hist.remove(0);
            }
            hist.push((s, y));
        }
        std::mem::swap(&mut x, &mut trial);
        grad = new_grad;
        f = new_f;
    }
    DescentRun {
        x,
        value: f,
        iterations,
        evaluations,
        converged,
    }
}

/// Best of several runs (smallest value; ties go to the lower index) and
/// work totals.
#[derive(Clone, Debug, Serialize)]
pub struct MultistartResult {
    pub best: DescentRun,
    pub best_index: usize,
    pub restarts: usize,
    pub iterations: usize,
    pub evaluations: usize,
}

pub fn multistart<O, S>(
    obj: &O,
    restarts: usize,
    seed: u64,
    exec: Execution,
    opts: &DescentOptions,
    start: S,
) -> Option<MultistartResult>
where
    O: Objective + ?Sized,
    S: Fn(&mut ChaCha8Rng) -> Vec<f64> + Sync + Send,
{
    let runs = exec.map(restarts, |i| {
        let mut rng = restart_rng(seed, i);
        descend(obj, start(&mut rng), opts)
    });
    merge(runs)
}

pub fn merge(runs: Vec<DescentRun>) -> Option<MultistartResult> {
    let restarts = runs.len();
    let iterations = runs.iter().map(|r| r.iterations).sum();
    let evaluations = runs.iter().map(|r| r.evaluations).sum();
    let (best_index, best) = runs
        .into_iter()
        .enumerate()
        .reduce(|a, b| if b.1.value < a.1.value { b } else { a })?;
    Some(MultistartResult {
        best,
        best_index,
        restarts,
        iterations,
        evaluations,
    })
}

/// Normalizes consecutive blocks of the given sizes to unit length.
pub fn normalize_blocks(x: &mut [f64], sizes: &[usize]) {
    let mut off = 0;
    for &s in sizes {
        let b = &mut x[off..off + s];
        let n = norm(b);
        if n > 0.0 {
            b.iter_mut().for_each(|v| *v /= n);
        }
        off += s;
    }
}

/// Removes from each block its component along the block itself.
pub fn tangent_blocks(x: &[f64], g: &mut [f64], sizes: &[usize]) {
    let mut off = 0;
    for &s in sizes {
        let xb = &x[off..off + s];
        let dot: f64 = xb.iter().zip(&g[off..off + s]).map(|(a, b)| a * b).sum();
        for (gi, xi) in g[off..off + s].iter_mut().zip(xb) {
            *gi -= dot * xi;
        }
        off += s;
    }
}

/// Gram-Schmidt on the pair `(x, y)` stored as `[x; y]`.
pub fn orthonormalize_pair(v: &mut [f64]) {
    let d = v.len() / 2;
    let (x, y) = v.split_at_mut(d);
    let nx = norm(x);
    if nx > 0.0 {
        x.iter_mut().for_each(|a| *a /= nx);
    }
    let dot: f64 = x.iter().zip(y.iter()).map(|(a, b)| a * b).sum();
    for (b, a) in y.iter_mut().zip(x.iter()) {
        *b -= dot * a;
    }
    let ny = norm(y);
    if ny > 0.0 {
        y.iter_mut().for_each(|a| *a /= ny);
    }
}
