//! The bracket condition `|X_m ∧ Y_m| <= C |[X, Y]|` on pairs in `m ⊕ s`:
//! algebraic certificates, the numerical infimum of
//! `rho(X, Y) = |[X, Y]| / |X_m ∧ Y_m|`, and verification of explicit
//! commuting witnesses.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebras::{g2_sp2_frame, quat_expand, C64};
use crate::catalog::{self, g2_from_complex, realified_into};
use crate::error::{Error, Result};
use crate::linalg::{intersect, principal_angles, random_unit_vector, svd, wedge_norm, LieSubspace, MatrixElement};
use crate::octonion::{l_unit, left_mult, oct_mul, r_unit, Octonion};
use crate::optimize::{multistart, orthonormalize_pair, DescentOptions, Execution, MultistartResult, Objective};
use crate::triple::{decompose, Decomposition, Triple};

/// Thresholds shared by the verdicts; all relative to a scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    /// `|[X, Y]| <= violation_residual * scale` counts as commuting.
    pub violation_residual: f64,
    /// `|X_m ∧ Y_m| >= wedge_floor * scale^2` counts as independent.
    pub wedge_floor: f64,
    /// Membership residual allowed for user-supplied pairs.
    pub membership: f64,
    /// A curvature bound `epsilon` above this is certified.
    pub certification_floor: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            violation_residual: 1e-10,
            wedge_floor: 0.1,
            membership: 1e-8,
            certification_floor: 1e-4,
        }
    }
}

/// A skew matrix as 1-based upper-triangle triples `[r, s, c]` meaning `c E_rs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseElement {
    pub n: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl SparseElement {
    pub fn from_element(x: &MatrixElement) -> Self {
        let n = x.ambient_dim();
        let m = x.entries();
        let mut entries = Vec::new();
        for r in 0..n {
            for s in (r + 1)..n {
                let c = m[(s, r)];
                if c != 0.0 {
                    entries.push((r + 1, s + 1, c));
                }
            }
        }
        Self { n, entries }
    }

    pub fn to_element(&self) -> Result<MatrixElement> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for &(r, s, c) in &self.entries {
            if r == 0 || s == 0 || r > self.n || s > self.n || r == s {
                return Err(Error::Config {
                    field: "entries".into(),
                    msg: format!("index pair ({r}, {s}) is not valid in so({})", self.n),
                });
            }
            m[(s - 1, r - 1)] += c;
            m[(r - 1, s - 1)] -= c;
        }
        MatrixElement::new(m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BracketEvidence {
    /// `span` or `rank-separation`.
    pub method: String,
    pub dim_ss: usize,
    pub dim_mm: usize,
    pub intersection_dim: usize,
    /// Smallest principal angle between `[s,s]` and `[m,m]`, radians.
    pub min_principal_angle: Option<f64>,
    /// Maximal rank of `[X_s, Y_s]_k`, when the span test did not decide.
    pub s_bracket_rank: Option<usize>,
    /// Lower bound on `rho` from rank separation.
    pub rank_gap: Option<f64>,
    /// Numerical distance between the cones of `m`- and `s`-brackets.
    pub cone_gap: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureEvidence {
    /// Lower bound on `|[X, Y]|` over orthonormal pairs in `p`; `None` when `m = 0`.
    pub epsilon: Option<f64>,
    pub sphere: String,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessEvidence {
    pub x: SparseElement,
    pub y: SparseElement,
    pub bracket_norm: f64,
    pub wedge_m: f64,
    pub scale: f64,
    pub membership_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceSample {
    pub n: u32,
    pub bracket_norm: f64,
    pub wedge_m: f64,
    pub rho: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceEvidence {
    pub samples: Vec<SequenceSample>,
    /// `rho(n_last) / rho(n_first)` compared with `n_first / n_last`.
    pub decay_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub rho_inf: f64,
    /// `1 / rho_inf`, absent when the estimate is zero.
    pub empirical_c: Option<f64>,
    /// `m1` when it holds a plane, otherwise all of `m`.
    pub domain: String,
    pub argmin: Option<(SparseElement, SparseElement)>,
    pub best_restart: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InconclusiveEvidence {
    pub reason: String,
    pub value: Option<f64>,
}

/// Outcome of a condition check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data")]
pub enum Verdict {
    CertifiedBracketIntersection(BracketEvidence),
    CertifiedCurvatureBound(CurvatureEvidence),
    ViolationWitness(WitnessEvidence),
    SequenceViolation(SequenceEvidence),
    NumericalEstimate(Estimate),
    Inconclusive(InconclusiveEvidence),
}

impl Verdict {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::CertifiedBracketIntersection(_) => "CertifiedBracketIntersection",
            Self::CertifiedCurvatureBound(_) => "CertifiedCurvatureBound",
            Self::ViolationWitness(_) => "ViolationWitness",
            Self::SequenceViolation(_) => "SequenceViolation",
            Self::NumericalEstimate(_) => "NumericalEstimate",
            Self::Inconclusive(_) => "Inconclusive",
        }
    }

    pub fn is_certified(&self) -> bool {
        matches!(
            self,
            Self::CertifiedBracketIntersection(_) | Self::CertifiedCurvatureBound(_)
        )
    }

    pub fn is_violation(&self) -> bool {
        matches!(self, Self::ViolationWitness(_) | Self::SequenceViolation(_))
    }

    fn inconclusive(reason: impl Into<String>, value: Option<f64>) -> Self {
        Self::Inconclusive(InconclusiveEvidence {
            reason: reason.into(),
            value,
        })
    }
}

/// Deterministic work counters reported in place of wall-clock time.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkCounters {
    pub restarts: usize,
    pub iterations: usize,
    pub evaluations: usize,
}

impl WorkCounters {
    fn from_run(r: &MultistartResult) -> Self {
        Self {
            restarts: r.restarts,
            iterations: r.iterations,
            evaluations: r.evaluations,
        }
    }
}

fn membership(dec: &Decomposition, x: &MatrixElement) -> f64 {
    let mut r = x.clone();
    r.axpy(-1.0, &dec.m.project(x));
    r.axpy(-1.0, &dec.s.project(x));
    r.norm()
}

fn check_pair(dec: &Decomposition, x: &MatrixElement, y: &MatrixElement, th: &Thresholds) -> Result<(f64, f64)> {
    let n = dec.triple.ambient_dim();
    for v in [x, y] {
        if v.ambient_dim() != n {
            return Err(Error::DimensionMismatch {
                left: v.ambient_dim(),
                right: n,
            });
        }
    }
    let scale = x.norm().max(y.norm());
    let res = membership(dec, x).max(membership(dec, y));
    if res > th.membership * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Precondition(format!(
            "pair is not in m + s (residual {res:e}, scale {scale:e})"
        )));
    }
    Ok((scale, res))
}

/// `rho(X, Y) = |[X, Y]| / |X_m ∧ Y_m|` with `X_m` the projection onto `m`.
/// With `restrict_to_m1` the pair must lie in `m1 ⊕ s`.
pub fn rho(dec: &Decomposition, x: &MatrixElement, y: &MatrixElement, restrict_to_m1: bool) -> Result<f64> {
    let (scale, _) = check_pair(dec, x, y, &Thresholds::default())?;
    if restrict_to_m1 {
        let th = Thresholds::default().membership * scale.max(f64::MIN_POSITIVE);
        for v in [x, y] {
            let mut r = dec.m.project(v);
            r.axpy(-1.0, &dec.m1.project(v));
            if r.norm() > th {
                return Err(Error::Precondition(format!(
                    "m-part is not in m1 (residual {:e})",
                    r.norm()
                )));
            }
        }
    }
    let w = wedge_norm(&dec.m.project(x), &dec.m.project(y))?;
    if w == 0.0 {
        return Err(Error::Precondition("m-parts are linearly dependent".into()));
    }
    Ok(x.bracket(y).norm() / w)
}

/// Certifies the condition when no nonzero bracket `[X_m, Y_m]` is a limit
/// of brackets `[X_s, Y_s]_k`.
///
/// Two sound tests, in order:
/// - the linear spans `[s,s]` and `[m,m]` meet only in zero;
/// - rank separation: every `[X_s, Y_s]_k` has rank at most `r`, so for
///   orthonormal `e, f` in `m`, `rho >= dist([e, f], rank <= r)`, which is
///   the tail of the singular values of `[e, f]` beyond the `r`-th. The
///   minimum of that tail over planes in `m` is found by multistart search.
pub fn certify_bracket_intersection(dec: &Decomposition) -> Result<Verdict> {
    certify_bracket_intersection_with(dec, &SearchOptions::default(), &Thresholds::default())
}

pub fn certify_bracket_intersection_with(
    dec: &Decomposition,
    opts: &SearchOptions,
    th: &Thresholds,
) -> Result<Verdict> {
    let tol = dec.tol;
    let ss = dec.s.bracket_span(&dec.s, tol);
    let mm = dec.m.bracket_span(&dec.m, tol);
    let cap = intersect(&ss, &mm, tol)?;
    let min_principal_angle = principal_angles(&ss, &mm).first().copied();
    let mut ev = BracketEvidence {
        method: "span".into(),
        dim_ss: ss.dim(),
        dim_mm: mm.dim(),
        intersection_dim: cap.dim(),
        min_principal_angle,
        s_bracket_rank: None,
        rank_gap: None,
        cone_gap: None,
    };
    if cap.dim() == 0 {
        return Ok(Verdict::CertifiedBracketIntersection(ev));
    }
    let r = s_bracket_rank(dec, opts.seed);
    ev.s_bracket_rank = Some(r);
    if dec.m.dim() < 2 {
        return Ok(Verdict::inconclusive(
            "[s,s] and [m,m] intersect and m has no plane",
            None,
        ));
    }
    let gap = rank_gap(dec, r, opts);
    ev.rank_gap = Some(gap);
    if gap > th.certification_floor {
        ev.method = "rank-separation".into();
        return Ok(Verdict::CertifiedBracketIntersection(ev));
    }
    let cone = cone_gap(dec, opts);
    ev.cone_gap = Some(cone);
    if cone > th.certification_floor {
        ev.method = "cone-separation".into();
        return Ok(Verdict::CertifiedBracketIntersection(ev));
    }
    Ok(Verdict::inconclusive(
        format!(
            "[s,s] and [m,m] share {} dimensions and the bracket cones meet within {cone:e}",
            ev.intersection_dim
        ),
        Some(cone),
    ))
}

/// `|[e, f] + [X_s, Y_s]_k|^2` over orthonormal `e, f` in `m` and free
/// `X_s, Y_s` in `s`; coordinates are `[e; f; X_s; Y_s]`.
struct ConeGap {
    m: Vec<DMatrix<f64>>,
    s: Vec<DMatrix<f64>>,
    k: LieSubspace,
}

impl ConeGap {
    fn unpack<'a>(&self, v: &'a [f64]) -> [&'a [f64]; 4] {
        let (a, b) = (self.m.len(), self.s.len());
        [&v[..a], &v[a..2 * a], &v[2 * a..2 * a + b], &v[2 * a + b..]]
    }

    fn combine(basis: &[DMatrix<f64>], c: &[f64]) -> DMatrix<f64> {
        let n = basis[0].nrows();
        let mut m = DMatrix::zeros(n, n);
        for (b, &ci) in basis.iter().zip(c) {
            m += b * ci;
        }
        m
    }

    fn residual(&self, v: &[f64]) -> (DMatrix<f64>, [DMatrix<f64>; 4]) {
        let [e, f, x, y] = self.unpack(v);
        let e = Self::combine(&self.m, e);
        let f = Self::combine(&self.m, f);
        let x = Self::combine(&self.s, x);
        let y = Self::combine(&self.s, y);
        let xy = MatrixElement::skew_part(&(&x * &y - &y * &x));
        let r = (&e * &f - &f * &e) + self.k.project(&xy).into_inner();
        (r, [e, f, x, y])
    }
}

impl Objective for ConeGap {
    fn value_grad(&self, v: &[f64], g: &mut [f64]) -> f64 {
        let (r, [e, f, x, y]) = self.residual(v);
        let (a, b) = (self.m.len(), self.s.len());
        let br = |p: &DMatrix<f64>| p * &r - &r * p;
        let parts = [
            (br(&f), &self.m, 0, 2.0),
            (br(&e), &self.m, a, -2.0),
            (br(&y), &self.s, 2 * a, 2.0),
            (br(&x), &self.s, 2 * a + b, -2.0),
        ];
        for (z, basis, off, c) in parts {
            for (i, bi) in basis.iter().enumerate() {
                g[off + i] = c * bi.dot(&z);
            }
        }
        r.norm_squared()
    }

    fn value(&self, v: &[f64]) -> f64 {
        self.residual(v).0.norm_squared()
    }

    fn retract(&self, v: &mut [f64]) {
        let a = self.m.len();
        orthonormalize_pair(&mut v[..2 * a]);
    }

    fn tangent(&self, v: &[f64], g: &mut [f64]) {
        let a = self.m.len();
        let (e, f) = (&v[..a], &v[a..2 * a]);
        let (ge, gf) = g[..2 * a].split_at_mut(a);
        for gb in [ge, gf] {
            for u in [e, f] {
                let c: f64 = gb.iter().zip(u).map(|(p, q)| p * q).sum();
                gb.iter_mut().zip(u).for_each(|(p, q)| *p -= c * q);
            }
        }
    }
}

fn cone_gap(dec: &Decomposition, opts: &SearchOptions) -> f64 {
    if dec.s.is_zero() {
        return rank_gap(dec, 0, opts);
    }
    let obj = ConeGap {
        m: dec.m.basis().iter().map(|b| b.entries().clone()).collect(),
        s: dec.s.basis().iter().map(|b| b.entries().clone()).collect(),
        k: dec.triple.k.clone(),
    };
    let (a, b) = (obj.m.len(), obj.s.len());
    let descent = DescentOptions {
        iters: opts.iters,
        grad_tol: 1e-14,
        value_floor: 1e-20,
    };
    let start = |rng: &mut ChaCha8Rng| {
        let mut v = random_unit_vector(a, rng);
        v.extend(random_unit_vector(a, rng));
        let scale: f64 = rng.gen_range(0.1..2.0);
        v.extend(random_unit_vector(b, rng).iter().map(|c| c * scale));
        v.extend(random_unit_vector(b, rng).iter().map(|c| c * scale));
        v
    };
    multistart(&obj, opts.restarts.clamp(1, 64), opts.seed, opts.exec, &descent, start)
        .map_or(0.0, |r| r.best.value.max(0.0).sqrt())
}

fn numerical_rank(m: &DMatrix<f64>) -> usize {
    let sv = svd(m.clone(), false, false).singular_values;
    let top = sv.max();
    if top <= 0.0 {
        return 0;
    }
    sv.iter().filter(|&&v| v > 1e-9 * top).count()
}

/// Generic (hence maximal) rank of `[X_s, Y_s]_k` over random pairs.
fn s_bracket_rank(dec: &Decomposition, seed: u64) -> usize {
    if dec.s.dim() < 2 {
        return 0;
    }
    (0..8)
        .map(|i| {
            let mut rng = crate::optimize::restart_rng(seed ^ 0x5eed, i);
            let x = dec.s.random_unit(&mut rng);
            let y = dec.s.random_unit(&mut rng);
            numerical_rank(dec.triple.k.project(&x.bracket(&y)).entries())
        })
        .max()
        .unwrap_or(0)
}

/// `sqrt(sum_{i >= r} sigma_i^2)` of `[e, f]` over orthonormal pairs in `m`.
struct RankTail {
    basis: Vec<DMatrix<f64>>,
    rank: usize,
}

impl RankTail {
    fn tail(&self, v: &[f64]) -> f64 {
        let mut w = v.to_vec();
        orthonormalize_pair(&mut w);
        let d = self.basis.len();
        let n = self.basis[0].nrows();
        let mut x = DMatrix::zeros(n, n);
        let mut y = DMatrix::zeros(n, n);
        for (i, b) in self.basis.iter().enumerate() {
            x += b * w[i];
            y += b * w[d + i];
        }
        let c = &x * &y - &y * &x;
        let mut sv: Vec<f64> = svd(c, false, false).singular_values.iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv.iter().skip(self.rank).map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl Objective for RankTail {
    fn value_grad(&self, v: &[f64], g: &mut [f64]) -> f64 {
        let h = 1e-7;
        let mut w = v.to_vec();
        for i in 0..v.len() {
            w[i] = v[i] + h;
            let a = self.tail(&w);
            w[i] = v[i] - h;
            let b = self.tail(&w);
            w[i] = v[i];
            g[i] = (a - b) / (2.0 * h);
        }
        self.tail(v)
    }

    fn value(&self, v: &[f64]) -> f64 {
        self.tail(v)
    }

    fn retract(&self, v: &mut [f64]) {
        orthonormalize_pair(v);
    }

    fn tangent(&self, _v: &[f64], _g: &mut [f64]) {}
}

fn rank_gap(dec: &Decomposition, rank: usize, opts: &SearchOptions) -> f64 {
    let obj = RankTail {
        basis: dec.m.basis().iter().map(|b| b.entries().clone()).collect(),
        rank,
    };
    let d = obj.basis.len();
    let descent = DescentOptions {
        iters: opts.iters.min(200),
        grad_tol: 1e-10,
        value_floor: 0.0,
    };
    let start = |rng: &mut ChaCha8Rng| {
        let mut v = random_unit_vector(d, rng);
        v.extend(random_unit_vector(d, rng));
        v
    };
    multistart(&obj, opts.restarts.clamp(1, 32), opts.seed, opts.exec, &descent, start).map_or(0.0, |r| r.best.value)
}

/// Pairs `(x, y)` of coordinates on an orthonormal basis of `D = A ⊕ B`,
/// minimizing `|[X, Y]|^2 / |X_A ∧ Y_A|^2`. The value is invariant under
/// `GL(2)` acting on the pair, so the retraction makes the `A`-parts
/// orthonormal and the gradient is taken orthogonal to the orbit.
pub struct PairObjective {
    basis: Vec<DMatrix<f64>>,
    /// The first `split` coordinates span `A`.
    split: usize,
}

impl PairObjective {
    pub fn new(a: &LieSubspace, b: &LieSubspace) -> Self {
        let basis = a.basis().iter().chain(b.basis()).map(|e| e.entries().clone()).collect();
        Self { basis, split: a.dim() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn element(&self, c: &[f64]) -> MatrixElement {
        let n = self.basis[0].nrows();
        let mut m = DMatrix::zeros(n, n);
        for (b, &ci) in self.basis.iter().zip(c) {
            if ci != 0.0 {
                m += b * ci;
            }
        }
        MatrixElement::skew_part(&m)
    }

    fn coords(&self, z: &DMatrix<f64>, out: &mut [f64]) {
        for (o, b) in out.iter_mut().zip(&self.basis) {
            *o = b.dot(z);
        }
    }

    fn gram_a(&self, x: &[f64], y: &[f64]) -> (f64, f64, f64) {
        let a = self.split;
        let dot = |u: &[f64], v: &[f64]| u[..a].iter().zip(&v[..a]).map(|(p, q)| p * q).sum::<f64>();
        (dot(x, x), dot(y, y), dot(x, y))
    }

    pub fn random_start(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let d = self.dim();
        let mut v = random_unit_vector(d, rng);
        v.extend(random_unit_vector(d, rng));
        v
    }
}

impl Objective for PairObjective {
    fn value_grad(&self, v: &[f64], g: &mut [f64]) -> f64 {
        let d = self.dim();
        let (x, y) = v.split_at(d);
        let xm = self.element(x).into_inner();
        let ym = self.element(y).into_inner();
        let c = &xm * &ym - &ym * &xm;
        let n = c.norm_squared();
        let (xx, yy, xy) = self.gram_a(x, y);
        let w = xx * yy - xy * xy;
        if w <= 0.0 {
            g.iter_mut().for_each(|e| *e = 0.0);
            return f64::INFINITY;
        }
        let f = n / w;
        let yc = &ym * &c - &c * &ym;
        let xc = &xm * &c - &c * &xm;
        let (gx, gy) = g.split_at_mut(d);
        self.coords(&yc, gx);
        self.coords(&xc, gy);
        gx.iter_mut().for_each(|e| *e *= 2.0 / w);
        gy.iter_mut().for_each(|e| *e *= -2.0 / w);
        for i in 0..self.split {
            gx[i] -= f * (2.0 * yy * x[i] - 2.0 * xy * y[i]) / w;
            gy[i] -= f * (2.0 * xx * y[i] - 2.0 * xy * x[i]) / w;
        }
        f
    }

    fn value(&self, v: &[f64]) -> f64 {
        let d = self.dim();
        let (x, y) = v.split_at(d);
        let (xx, yy, xy) = self.gram_a(x, y);
        let w = xx * yy - xy * xy;
        if w <= 0.0 {
            return f64::INFINITY;
        }
        let xm = self.element(x).into_inner();
        let ym = self.element(y).into_inner();
        (&xm * &ym - &ym * &xm).norm_squared() / w
    }

    fn retract(&self, v: &mut [f64]) {
        let d = self.dim();
        let (x, y) = v.split_at_mut(d);
        let (xx, _, _) = self.gram_a(x, y);
        if xx <= 0.0 {
            return;
        }
        let s = xx.sqrt();
        x.iter_mut().for_each(|e| *e /= s);
        let (_, _, xy) = self.gram_a(x, y);
        for (b, a) in y.iter_mut().zip(x.iter()) {
            *b -= xy * a;
        }
        let (_, yy, _) = self.gram_a(x, y);
        if yy <= 0.0 {
            return;
        }
        let s = yy.sqrt();
        y.iter_mut().for_each(|e| *e /= s);
    }

    fn tangent(&self, v: &[f64], g: &mut [f64]) {
        let d = self.dim();
        let (x, y) = v.split_at(d);
        let mut dirs: Vec<Vec<f64>> = Vec::with_capacity(4);
        for (u, first) in [(x, true), (y, true), (x, false), (y, false)] {
            let mut w = vec![0.0; 2 * d];
            let off = if first { 0 } else { d };
            w[off..off + d].copy_from_slice(u);
            for q in &dirs {
                let c: f64 = q.iter().zip(&w).map(|(a, b)| a * b).sum();
                w.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
            }
            let nrm = w.iter().map(|a| a * a).sum::<f64>().sqrt();
            if nrm > 1e-12 {
                w.iter_mut().for_each(|a| *a /= nrm);
                dirs.push(w);
            }
        }
        for q in &dirs {
            let c: f64 = q.iter().zip(g.iter()).map(|(a, b)| a * b).sum();
            g.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
        }
    }
}

/// Options for the multistart searches.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchOptions {
    pub restarts: usize,
    pub iters: usize,
    pub seed: u64,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            restarts: 100,
            iters: 400,
            seed: 0,
            exec: Execution::default(),
        }
    }
}

fn run_search(obj: &PairObjective, opts: &SearchOptions) -> Option<MultistartResult> {
    let d = DescentOptions {
        iters: opts.iters,
        grad_tol: 1e-14,
        value_floor: 1e-20,
    };
    multistart(obj, opts.restarts.max(1), opts.seed, opts.exec, &d, |rng| {
        obj.random_start(rng)
    })
}

/// Certifies the condition for triples with `G/H` positively curved: a
/// uniform lower bound `epsilon` for `|[X, Y]|` over orthonormal pairs in `p`
/// gives `|X_m ∧ Y_m| <= |X ∧ Y| <= |[X, Y]| / epsilon`.
pub fn certify_positive_curvature(
    dec: &Decomposition,
    opts: &SearchOptions,
    th: &Thresholds,
) -> Result<(Verdict, WorkCounters)> {
    let Some(sphere) = dec.triple.meta.positively_curved.clone() else {
        return Err(Error::Precondition(format!(
            "{} carries no positively curved G/H; the curvature certificate does not apply",
            dec.triple.name
        )));
    };
    if dec.m.is_zero() {
        let ev = CurvatureEvidence {
            epsilon: None,
            sphere,
            samples: 0,
        };
        return Ok((Verdict::CertifiedCurvatureBound(ev), WorkCounters::default()));
    }
    if dec.p.dim() < 2 {
        return Err(Error::Precondition("p has no two independent directions".into()));
    }
    let obj = PairObjective::new(&dec.p, &LieSubspace::zero(dec.triple.ambient_dim()));
    let run = run_search(&obj, opts).ok_or_else(|| Error::Internal("no restarts".into()))?;
    let eps = run.best.value.max(0.0).sqrt();
    let work = WorkCounters::from_run(&run);
    if eps > th.certification_floor {
        let ev = CurvatureEvidence {
            epsilon: Some(eps),
            sphere,
            samples: run.restarts,
        };
        Ok((Verdict::CertifiedCurvatureBound(ev), work))
    } else {
        Ok((
            Verdict::inconclusive("curvature lower bound below the certification floor", Some(eps)),
            work,
        ))
    }
}

/// Multistart estimate of `inf rho` over `X, Y` in `m_domain ⊕ s`.
pub fn estimate_inf_rho(dec: &Decomposition, opts: &SearchOptions) -> Result<(Verdict, WorkCounters)> {
    let dom = dec.m_domain();
    if dom.dim() < 2 {
        return Ok((
            Verdict::inconclusive(format!("m has dimension {}; rho is undefined", dom.dim()), None),
            WorkCounters::default(),
        ));
    }
    let obj = PairObjective::new(dom, &dec.s);
    let run = run_search(&obj, opts).ok_or_else(|| Error::Internal("no restarts".into()))?;
    let d = obj.dim();
    let x = obj.element(&run.best.x[..d]);
    let y = obj.element(&run.best.x[d..]);
    let rho_inf = run.best.value.max(0.0).sqrt();
    let est = Estimate {
        rho_inf,
        empirical_c: (rho_inf > 0.0).then(|| 1.0 / rho_inf),
        domain: if dom.dim() == dec.m1.dim() { "m1+s" } else { "m+s" }.into(),
        argmin: Some((SparseElement::from_element(&x), SparseElement::from_element(&y))),
        best_restart: run.best_index,
    };
    Ok((Verdict::NumericalEstimate(est), WorkCounters::from_run(&run)))
}

/// Checks a user or catalog pair: a violation when it commutes to working
/// precision while its `m`-parts span a plane.
pub fn verify_witness(dec: &Decomposition, x: &MatrixElement, y: &MatrixElement) -> Result<Verdict> {
    verify_witness_with(dec, x, y, &Thresholds::default())
}

pub fn verify_witness_with(
    dec: &Decomposition,
    x: &MatrixElement,
    y: &MatrixElement,
    th: &Thresholds,
) -> Result<Verdict> {
    let (scale, res) = check_pair(dec, x, y, th)?;
    let bracket_norm = x.bracket(y).norm();
    let wedge_m = wedge_norm(&dec.m.project(x), &dec.m.project(y))?;
    if scale == 0.0 {
        return Ok(Verdict::inconclusive("zero pair", None));
    }
    let commutes = bracket_norm <= th.violation_residual * scale;
    let independent = wedge_m >= th.wedge_floor * scale * scale;
    if commutes && independent {
        return Ok(Verdict::ViolationWitness(WitnessEvidence {
            x: SparseElement::from_element(x),
            y: SparseElement::from_element(y),
            bracket_norm,
            wedge_m,
            scale,
            membership_residual: res,
        }));
    }
    let reason = match (commutes, independent) {
        (false, _) => "pair does not commute",
        _ => "m-parts are nearly dependent",
    };
    let value = (wedge_m > 0.0).then(|| bracket_norm / wedge_m);
    Ok(Verdict::inconclusive(reason, value))
}

/// `E(u, v) = v u^T - u v^T`, the rotation taking `u` towards `v`.
fn rot(u: &nalgebra::DVector<f64>, v: &nalgebra::DVector<f64>) -> MatrixElement {
    MatrixElement::skew_part(&(v * u.transpose() - u * v.transpose()))
}

fn unit(n: usize, i: usize) -> nalgebra::DVector<f64> {
    nalgebra::DVector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 })
}

fn oct_vec(n: usize, o: &Octonion) -> nalgebra::DVector<f64> {
    nalgebra::DVector::from_fn(n, |r, _| if r < 8 { o.coords[r] } else { 0.0 })
}

fn complex3(entries: [[(f64, f64); 3]; 3]) -> DMatrix<C64> {
    DMatrix::from_fn(3, 3, |r, c| C64::new(entries[r][c].0, entries[r][c].1))
}

/// The commuting pair in `su(3)`: `X` real, `Y` purely imaginary.
fn su3_pair() -> (DMatrix<C64>, DMatrix<C64>) {
    let x = complex3([
        [(0.0, 0.0), (1.0, 0.0), (1.0, 0.0)],
        [(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)],
        [(-1.0, 0.0), (-1.0, 0.0), (0.0, 0.0)],
    ]);
    let y = complex3([
        [(0.0, 0.0), (0.0, 1.0), (0.0, -1.0)],
        [(0.0, 1.0), (0.0, 0.0), (0.0, 1.0)],
        [(0.0, -1.0), (0.0, 1.0), (0.0, 0.0)],
    ]);
    (x, y)
}

/// Realifies a complex matrix placed on the complex coordinates `idx` of `C^n`.
fn complex_on(n: usize, idx: &[usize], z: &DMatrix<C64>) -> MatrixElement {
    let mut big = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            big[(i, j)] = z[(a, b)];
        }
    }
    MatrixElement::skew_part(&crate::algebras::realify(&big))
}

/// Closed-form commuting pair for a witness-bearing catalog family, with
/// the triple it lives in.
pub fn builtin_witness(id: &str, p: Option<i64>) -> Result<(Triple, MatrixElement, MatrixElement)> {
    let entry = catalog::find(id)?;
    if !entry.witness {
        return Err(Error::Precondition(format!("{id} has no closed-form witness")));
    }
    let triple = catalog::build(id, p)?;
    let pv = catalog::resolve_param(id, p)? as usize;
    let n = triple.ambient_dim();
    let (x, y) = match id {
        "spin-octonion-case1" => (
            MatrixElement::e(n, 0, 1) + MatrixElement::e(n, 2, 8),
            MatrixElement::e(n, 0, 2) + MatrixElement::e(n, 1, 8),
        ),
        "spin-octonion-case2" => {
            let s2 = std::f64::consts::SQRT_2;
            let e: Vec<_> = [Octonion::ONE, Octonion::K, Octonion::I, Octonion::J]
                .iter()
                .map(|q| oct_vec(n, &oct_mul(&Octonion::EPS, q)))
                .collect();
            let (e5, e6) = (unit(n, 8), unit(n, 9));
            let x = l_unit(1).embed(n, 0)? + (rot(&e[0], &e5) + rot(&e[2], &e6)).scaled(s2);
            let y = r_unit(2).embed(n, 0)? + (rot(&e[1], &e5) + rot(&e[3], &e6)).scaled(s2);
            (x, y)
        }
        "spin8-case4" => {
            let s2 = std::f64::consts::SQRT_2;
            let mut e: Vec<_> = [0, 3, 1, 2].iter().map(|&i| unit(n, i)).collect();
            for r in 0..4 {
                let q = Octonion::new(std::array::from_fn(|i| if i < 8 { e[r][i] } else { 0.0 }));
                e.push(oct_vec(n, &oct_mul(&Octonion::EPS, &q)));
            }
            let tail: Vec<_> = (8..12).map(|i| unit(n, i)).collect();
            let li = left_mult(&Octonion::I)?.embed(n, 0)?;
            let lj = left_mult(&Octonion::J)?.embed(n, 0)?;
            let mut x = li;
            let mut y = lj;
            for r in 0..4 {
                x = x + rot(&e[2 * r + 1], &tail[r]).scaled(s2);
                y = y + rot(&e[2 * r], &tail[r]).scaled(s2);
            }
            (x, y)
        }
        "su3-long-root" => {
            let q = |z: &DMatrix<C64>| {
                let nq = n / 4;
                let mut a = vec![vec![[0.0; 4]; nq]; nq];
                for r in 0..3 {
                    for c in 0..3 {
                        a[r][c] = [z[(r, c)].re, z[(r, c)].im, 0.0, 0.0];
                    }
                }
                MatrixElement::skew_part(&quat_expand(&a))
            };
            let (zx, zy) = su3_pair();
            (q(&zx), q(&zy))
        }
        "t-su2-su" => {
            let (zx, zy) = su3_pair();
            (complex_on(n / 2, &[0, 1, 2], &zx), complex_on(n / 2, &[0, 1, 2], &zy))
        }
        "su(p+4)-su3" => {
            let (zx, zy) = su3_pair();
            (complex_on(n / 2, &[0, 3, 4], &zx), complex_on(n / 2, &[0, 3, 4], &zy))
        }
        "su(p+4)-su3-pair" => {
            let (zx, zy) = su3_pair();
            let pair = |z: &DMatrix<C64>| {
                let zbar = z.map(|c| -c.conj());
                complex_on(n / 2, &[0, 1, 4], z) + complex_on(n / 2, &[2, 3, 5], &zbar)
            };
            (pair(&zx), pair(&zy))
        }
        "su2-so4-so" => {
            let (zx, zy) = su3_pair();
            (realified_into(n, &zx), realified_into(n, &zy))
        }
        "su2-long-root-g2" => {
            let (zx, zy) = su3_pair();
            (g2_from_complex(&zx), g2_from_complex(&zy))
        }
        "su3-so6-n0" => {
            let s2 = std::f64::consts::SQRT_2;
            let e = |r: usize, s: usize| MatrixElement::e(n, r, s);
            (
                e(0, 2) - e(1, 3) + (e(0, 6) + e(2, 7)).scaled(s2),
                e(0, 3) + e(1, 2) - (e(1, 6) + e(3, 7)).scaled(s2),
            )
        }
        _ => return Err(Error::Internal(format!("witness for {id} (p = {pv}) is not wired"))),
    };
    Ok((triple, x, y))
}

/// The `n`-th pair of the violating sequence on the `g2 + su(2)` triple,
/// with `rho` decaying like `1/n`.
pub fn g2_sequence(n: u32) -> Result<(MatrixElement, MatrixElement)> {
    if n == 0 {
        return Err(Error::Precondition("sequence index starts at 1".into()));
    }
    let f = g2_sp2_frame();
    let amb = 14;
    let nf = f64::from(n);
    let s_tilde = f.s.embed(amb, 0)? - f.s.embed(amb, 7)?;
    let x = f.a0.embed(amb, 0)? - s_tilde.scaled(3.0) - f.e2.embed(amb, 0)?.scaled(2.0 / (f.lambda * nf));
    let y = f.a_minus.embed(amb, 0)? + f.e1.embed(amb, 0)?.scaled(nf);
    Ok((x, y))
}

/// Evaluates the sequence at `ns` and reports the decay.
pub fn verify_sequence(dec: &Decomposition, ns: &[u32]) -> Result<Verdict> {
    let mut samples = Vec::with_capacity(ns.len());
    for &n in ns {
        let (x, y) = g2_sequence(n)?;
        check_pair(dec, &x, &y, &Thresholds::default())?;
        let bracket_norm = x.bracket(&y).norm();
        let wedge_m = wedge_norm(&dec.m.project(&x), &dec.m.project(&y))?;
        samples.push(SequenceSample {
            n,
            bracket_norm,
            wedge_m,
            rho: bracket_norm / wedge_m,
        });
    }
    let (Some(a), Some(b)) = (samples.first(), samples.last()) else {
        return Err(Error::Precondition("empty sequence".into()));
    };
    let decay_ratio = b.rho / a.rho;
    let expected = f64::from(a.n) / f64::from(b.n);
    let decays = samples.len() >= 2 && b.n > a.n && (decay_ratio / expected - 1.0).abs() < 0.05;
    let ev = SequenceEvidence { samples, decay_ratio };
    if decays {
        Ok(Verdict::SequenceViolation(ev))
    } else {
        Ok(Verdict::inconclusive(
            "sequence rho does not decay like 1/n",
            Some(decay_ratio),
        ))
    }
}

/// Convenience: the verdict the catalog expects for `id`, computed end to end.
pub fn refute_entry(id: &str, p: Option<i64>) -> Result<Verdict> {
    if id == "g2-su2-sequence" {
        let dec = decompose(&catalog::build(id, p)?, crate::linalg::DEFAULT_TOL)?;
        return verify_sequence(&dec, &[1, 2, 4, 8, 16, 32, 64]);
    }
    let (t, x, y) = builtin_witness(id, p)?;
    let dec = decompose(&t, crate::linalg::DEFAULT_TOL)?;
    verify_witness(&dec, &x, &y)
}

/// Random pair in `m ⊕ s` with unit-norm components, for tests and probes.
pub fn random_pair<R: Rng + ?Sized>(dec: &Decomposition, rng: &mut R) -> (MatrixElement, MatrixElement) {
    let pick = |rng: &mut R| {
        let mut v = MatrixElement::zeros(dec.triple.ambient_dim());
        if !dec.m.is_zero() {
            v.axpy(1.0, &dec.m.random_unit(rng));
        }
        if !dec.s.is_zero() {
            v.axpy(1.0, &dec.s.random_unit(rng));
        }
        v
    };
    let x = pick(rng);
    let y = pick(rng);
    (x, y)
}
