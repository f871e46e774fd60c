//! Triples `h ⊂ k ⊂ g` and everything derived from them: the orthogonal
//! complements `m`, `s`, the sphere-acting ideal `k0`, the normalizer `h1`,
//! `m1`, the algebra `l` generated by `m1`, the `Ad_l`-invariant components
//! of `s`, and the Phi1/Phi2 split.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{intersect, range_basis, symmetric_commutant, LieSubspace, MatrixElement, DEFAULT_TOL};
use crate::optimize::{
    multistart, normalize_blocks, restart_rng, tangent_blocks, DescentOptions, Execution, Objective,
};

/// Residual allowed for subspace relations between orthonormal bases.
pub const STRUCTURE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TripleMeta {
    /// Set when `k0/h0` is a sphere whose normal homogeneous metric is
    /// positively curved; holds a short description of that sphere.
    pub positively_curved: Option<String>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Triple {
    pub name: String,
    pub g: LieSubspace,
    pub k: LieSubspace,
    pub h: LieSubspace,
    pub meta: TripleMeta,
}

impl Triple {
    /// Checks `h ⊆ k ⊆ g` and closure of each.
    pub fn new(name: impl Into<String>, g: LieSubspace, k: LieSubspace, h: LieSubspace) -> Result<Self> {
        let n = g.ambient_dim();
        for s in [&k, &h] {
            if s.ambient_dim() != n {
                return Err(Error::DimensionMismatch {
                    left: n,
                    right: s.ambient_dim(),
                });
            }
        }
        let name = name.into();
        let check = |what: &str, r: f64| -> Result<()> {
            if r > STRUCTURE_TOL {
                return Err(Error::Precondition(format!("{name}: {what} (residual {r:e})")));
            }
            Ok(())
        };
        check("h is not contained in k", k.containment_residual(&h))?;
        check("k is not contained in g", g.containment_residual(&k))?;
        check("g is not bracket-closed", g.closure_residual())?;
        check("k is not bracket-closed", k.closure_residual())?;
        check("h is not bracket-closed", h.closure_residual())?;
        Ok(Self {
            name,
            g,
            k,
            h,
            meta: TripleMeta::default(),
        })
    }

    pub fn with_meta(mut self, meta: TripleMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn ambient_dim(&self) -> usize {
        self.g.ambient_dim()
    }

    /// Conjugates all three algebras by an orthogonal matrix.
    pub fn conjugate(&self, q: &DMatrix<f64>) -> Triple {
        Triple {
            name: self.name.clone(),
            g: self.g.conjugate(q),
            k: self.k.conjugate(q),
            h: self.h.conjugate(q),
            meta: self.meta.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PhiClass {
    Phi1,
    Phi2,
    Inconclusive,
}

/// Outcome of [`classify_phi`].
#[derive(Clone, Debug, Serialize)]
pub struct PhiResult {
    pub class: PhiClass,
    /// RMS of the smallest singular values of `ad_{X_m}|_V` at the minimizer.
    pub min_value: f64,
    /// Largest operator norm of `ad_{b}|_V` over the `m1` basis.
    pub scale: f64,
    #[serde(skip)]
    pub x_m: Option<MatrixElement>,
    #[serde(skip)]
    pub y_s: Option<MatrixElement>,
}

/// An `Ad_l`-invariant summand of `s ⊖ z(l)`.
#[derive(Clone, Debug)]
pub struct Component {
    pub space: LieSubspace,
    /// Eigenvalue of the random equivariant operator that isolated this piece.
    pub eigenvalue: f64,
    pub possibly_reducible: bool,
    pub phi: Option<PhiResult>,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub triple: Triple,
    pub tol: f64,
    pub m: LieSubspace,
    pub s: LieSubspace,
    pub p: LieSubspace,
    pub k0: LieSubspace,
    pub h0: LieSubspace,
    pub hprime: LieSubspace,
    pub h1: LieSubspace,
    pub m1: LieSubspace,
    pub l: LieSubspace,
    pub z_l: LieSubspace,
    pub n_l: LieSubspace,
    /// `s ∩ z(l)`.
    pub s_z: LieSubspace,
    pub components: Vec<Component>,
    pub s1: LieSubspace,
    pub s2: LieSubspace,
    pub notes: Vec<String>,
}

/// Named residuals of the decomposition invariants.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct DecompositionResiduals {
    pub m_perp_h: f64,
    pub s_perp_k: f64,
    pub m1_perp_h1: f64,
    pub k_reconstruction: f64,
    pub h_reconstruction: f64,
    pub hprime_k0_bracket: f64,
    pub s_reconstruction: f64,
}

fn cross_gram_max(a: &LieSubspace, b: &LieSubspace) -> f64 {
    if a.is_zero() || b.is_zero() {
        return 0.0;
    }
    a.frame().tr_mul(b.frame()).amax()
}

/// Smallest ideal of `k` containing `gen`.
fn ideal_closure(k: &LieSubspace, gen: &LieSubspace, tol: f64) -> Result<LieSubspace> {
    let mut v = gen.clone();
    for _ in 0..=k.dim() {
        if v.is_zero() {
            return Ok(v);
        }
        let brackets: Vec<MatrixElement> = k
            .basis()
            .iter()
            .flat_map(|a| v.basis().iter().map(move |b| k.project(&a.bracket(b))))
            .collect();
        let next = v.sum(&LieSubspace::span(k.ambient_dim(), &brackets, tol), tol);
        if next.dim() == v.dim() {
            return Ok(v);
        }
        v = next;
    }
    Err(Error::Internal("ideal closure did not stabilize".into()))
}

/// Smallest subalgebra containing `gen`.
pub fn subalgebra_closure(gen: &LieSubspace, tol: f64) -> Result<LieSubspace> {
    let n = gen.ambient_dim();
    let mut v = gen.clone();
    for _ in 0..=(n * n) {
        if v.is_zero() {
            return Ok(v);
        }
        let next = v.sum(&v.bracket_span(&v, tol), tol);
        if next.dim() == v.dim() {
            return Ok(v);
        }
        v = next;
    }
    Err(Error::Internal("subalgebra closure did not stabilize".into()))
}

/// `{X in domain : [X, a] ∈ a}`.
pub fn normalizer(a: &LieSubspace, domain: &LieSubspace, tol: f64) -> LieSubspace {
    if a.is_zero() {
        return domain.clone();
    }
    domain.kernel_of(
        |x| {
            let mut out = Vec::new();
            for b in a.basis() {
                let c = x.bracket(b);
                let r = &c - &a.project(&c);
                out.extend_from_slice(r.as_slice());
            }
            out
        },
        tol,
    )
}

/// Stabilizer in `k0` of the `h0`-fixed vectors inside the `k0`-effective subspace.
fn stabilizer_of_fixed_vectors(k0: &LieSubspace, h0: &LieSubspace, tol: f64) -> LieSubspace {
    let n = k0.ambient_dim();
    let mut stacked = DMatrix::zeros(n, n * k0.dim());
    for (j, b) in k0.basis().iter().enumerate() {
        stacked.view_mut((0, j * n), (n, n)).copy_from(b.entries());
    }
    let w = range_basis(&stacked, tol);
    let mut cons = DMatrix::zeros(n * h0.dim(), w.ncols());
    for (j, b) in h0.basis().iter().enumerate() {
        cons.view_mut((j * n, 0), (n, w.ncols())).copy_from(&(b.entries() * &w));
    }
    let fixed = &w * crate::linalg::null_space(&cons, tol);
    k0.kernel_of(|x| (x.entries() * &fixed).as_slice().to_vec(), tol)
}

impl Decomposition {
    pub fn dim_summary(&self) -> Vec<(&'static str, usize)> {
        vec![
            ("g", self.triple.g.dim()),
            ("k", self.triple.k.dim()),
            ("h", self.triple.h.dim()),
            ("m", self.m.dim()),
            ("s", self.s.dim()),
            ("p", self.p.dim()),
            ("k0", self.k0.dim()),
            ("h0", self.h0.dim()),
            ("hprime", self.hprime.dim()),
            ("h1", self.h1.dim()),
            ("m1", self.m1.dim()),
            ("l", self.l.dim()),
            ("z_l", self.z_l.dim()),
            ("n_l", self.n_l.dim()),
            ("s1", self.s1.dim()),
            ("s2", self.s2.dim()),
        ]
    }

    /// The `X_m` domain for optimization: `m1` when it has room for a plane, else `m`.
    pub fn m_domain(&self) -> &LieSubspace {
        if self.m1.dim() >= 2 {
            &self.m1
        } else {
            &self.m
        }
    }

    pub fn residuals(&self) -> DecompositionResiduals {
        let t = &self.triple;
        let k_rec =
            t.k.containment_residual(&self.hprime.sum(&self.k0, self.tol))
                .max(self.hprime.sum(&self.k0, self.tol).containment_residual(&t.k));
        let h_rec =
            t.h.containment_residual(&self.hprime.sum(&self.h0, self.tol))
                .max(self.hprime.sum(&self.h0, self.tol).containment_residual(&t.h));
        let mut pieces = self.s_z.clone();
        for c in &self.components {
            pieces = pieces.sum(&c.space, self.tol);
        }
        let s_rec = pieces
            .containment_residual(&self.s)
            .max(self.s.containment_residual(&pieces));
        DecompositionResiduals {
            m_perp_h: cross_gram_max(&self.m, &t.h),
            s_perp_k: cross_gram_max(&self.s, &t.k),
            m1_perp_h1: cross_gram_max(&self.m1, &self.h1),
            k_reconstruction: k_rec,
            h_reconstruction: h_rec,
            hprime_k0_bracket: self
                .hprime
                .bracket_residual(&self.k0, &LieSubspace::zero(t.ambient_dim())),
            s_reconstruction: s_rec,
        }
    }

    /// Runs [`classify_phi`] on every component and rebuilds `s1`, `s2`.
    pub fn classify_components(&mut self, restarts: usize, seed: u64, exec: Execution) -> Result<()> {
        if self.m1.is_zero() {
            return Ok(());
        }
        let mut results = Vec::with_capacity(self.components.len());
        for (i, c) in self.components.iter().enumerate() {
            results.push(classify_phi_with(
                self,
                &c.space,
                restarts,
                seed.wrapping_add(i as u64),
                exec,
            )?);
        }
        let n = self.triple.ambient_dim();
        let (mut s1, mut s2) = (LieSubspace::zero(n), LieSubspace::zero(n));
        for (c, r) in self.components.iter_mut().zip(results) {
            match r.class {
                PhiClass::Phi1 => s1 = s1.sum(&c.space, self.tol),
                PhiClass::Phi2 => s2 = s2.sum(&c.space, self.tol),
                PhiClass::Inconclusive => {}
            }
            c.phi = Some(r);
        }
        self.s1 = s1;
        self.s2 = s2;
        Ok(())
    }
}

/// All derived subspaces; components are split with seed 0 and left unclassified.
pub fn decompose(t: &Triple, tol: f64) -> Result<Decomposition> {
    decompose_with_seed(t, tol, 0)
}

pub fn decompose_with_seed(t: &Triple, tol: f64, seed: u64) -> Result<Decomposition> {
    let n = t.ambient_dim();
    let mut notes = Vec::new();
    let m = t.h.complement_in(&t.k, tol);
    let s = t.k.complement_in(&t.g, tol);
    let p = t.h.complement_in(&t.g, tol);
    let k0 = ideal_closure(&t.k, &m, tol)?;
    let h0 = intersect(&t.h, &k0, tol)?;
    let hprime = k0.complement_in(&t.h, tol);
    let mut h1 = normalizer(&h0, &k0, tol);
    if (k0.dim(), h0.dim(), m.dim()) == (36, 21, 15) {
        let stab = stabilizer_of_fixed_vectors(&k0, &h0, tol);
        if stab.dim() == 28 {
            notes.push("h1 taken as the 28-dim stabilizer of the h0-fixed vectors".into());
            h1 = stab;
        } else {
            notes.push(format!(
                "stabilizer of h0-fixed vectors has dim {}, kept the normalizer",
                stab.dim()
            ));
        }
    }
    let m1 = h1.complement_in(&k0, tol);
    let l = subalgebra_closure(&m1, tol)?;
    let z_l = crate::linalg::solve_commutant_tol(l.basis(), &t.g, tol)?;
    let n_l = normalizer(&l, &t.g, tol);
    let s_z = intersect(&s, &z_l, tol)?;
    let mut dec = Decomposition {
        triple: t.clone(),
        tol,
        m,
        s,
        p,
        k0,
        h0,
        hprime,
        h1,
        m1,
        l,
        z_l,
        n_l,
        s_z,
        components: Vec::new(),
        s1: LieSubspace::zero(n),
        s2: LieSubspace::zero(n),
        notes,
    };
    if !dec.l.is_zero() {
        dec.components = isotypic_split(&dec, seed)?;
    }
    Ok(dec)
}

fn clusters(values: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|a, b| values[*a].total_cmp(&values[*b]));
    let mut out: Vec<Vec<usize>> = Vec::new();
    for i in order {
        match out.last_mut() {
            Some(g) if (values[i] - values[*g.last().expect("nonempty")]).abs() <= tol => g.push(i),
            _ => out.push(vec![i]),
        }
    }
    out
}

fn columns(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(m.nrows(), idx.len());
    for (k, &i) in idx.iter().enumerate() {
        out.column_mut(k).copy_from(&m.column(i));
    }
    out
}

fn scaled_sum(mats: &[DMatrix<f64>], w: &[f64]) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(mats[0].nrows(), mats[0].ncols());
    for (m, c) in mats.iter().zip(w) {
        s += m * *c;
    }
    s
}

/// Symmetric equivariant operators on a space where `actions` act; random
/// generators first, verified against all of them.
fn equivariant_ops<R: Rng>(actions: &[DMatrix<f64>], d: usize, tol: f64, rng: &mut R) -> Vec<DMatrix<f64>> {
    if actions.len() > 2 {
        let gens: Vec<DMatrix<f64>> = (0..2)
            .map(|_| {
                let w: Vec<f64> = (0..actions.len()).map(|_| rng.sample(StandardNormal)).collect();
                scaled_sum(actions, &w)
            })
            .collect();
        let ops = symmetric_commutant(&gens, d, tol);
        let ok = ops.iter().all(|s| {
            actions
                .iter()
                .all(|a| (s * a - a * s).amax() <= 1e-8 * (1.0 + a.amax()))
        });
        if ok {
            return ops;
        }
    }
    symmetric_commutant(actions, d, tol)
}

/// Splits `s ⊖ (s ∩ z(l))` into `Ad_l`-invariant pieces: first by the
/// Casimir of `l`, then inside each Casimir eigenspace by a random
/// symmetric equivariant operator.
pub fn isotypic_split(dec: &Decomposition, seed: u64) -> Result<Vec<Component>> {
    if dec.l.is_zero() {
        return Err(Error::Precondition("isotypic split needs l != 0".into()));
    }
    let w = dec.s_z.complement_in(&dec.s, dec.tol);
    if w.is_zero() {
        return Ok(Vec::new());
    }
    let d = w.dim();
    let actions: Vec<DMatrix<f64>> = dec.l.basis().iter().map(|b| w.ad_matrix(b)).collect();
    let mut casimir = DMatrix::zeros(d, d);
    for a in &actions {
        casimir -= a * a;
    }
    let casimir = (&casimir + casimir.transpose()) * 0.5;
    let cscale = casimir.amax().max(1e-300);
    let ceig = casimir.symmetric_eigen();
    let mut out = Vec::new();
    for group in clusters(ceig.eigenvalues.as_slice(), 1e-7 * cscale) {
        let basis = columns(&ceig.eigenvectors, &group);
        let sub = w.combine(&basis);
        let sub_actions: Vec<DMatrix<f64>> = dec.l.basis().iter().map(|b| sub.ad_matrix(b)).collect();
        out.extend(split_within(&sub, &sub_actions, seed, dec.tol));
    }
    Ok(out)
}

fn split_within(sub: &LieSubspace, actions: &[DMatrix<f64>], seed: u64, tol: f64) -> Vec<Component> {
    let d = sub.dim();
    let mut last = None;
    for attempt in 0..5 {
        let mut rng = restart_rng(seed, attempt);
        let ops = equivariant_ops(actions, d, tol, &mut rng);
        if ops.len() <= 1 {
            return vec![Component {
                space: sub.clone(),
                eigenvalue: 0.0,
                possibly_reducible: false,
                phi: None,
            }];
        }
        let w: Vec<f64> = (0..ops.len()).map(|_| rng.sample(StandardNormal)).collect();
        let s = scaled_sum(&ops, &w);
        let s = (&s + s.transpose()) * 0.5;
        let scale = s.amax().max(1e-300);
        let eig = s.symmetric_eigen();
        let groups = clusters(eig.eigenvalues.as_slice(), 1e-7 * scale);
        let mut centers: Vec<f64> = groups.iter().map(|g| eig.eigenvalues[g[0]]).collect();
        centers.sort_by(f64::total_cmp);
        let min_gap = centers.windows(2).map(|p| p[1] - p[0]).fold(f64::INFINITY, f64::min);
        let comps: Vec<Component> = groups
            .iter()
            .map(|g| Component {
                space: sub.combine(&columns(&eig.eigenvectors, g)),
                eigenvalue: eig.eigenvalues[g[0]],
                possibly_reducible: false,
                phi: None,
            })
            .collect();
        if min_gap > 1e-4 * scale {
            return comps;
        }
        last = Some(comps);
    }
    let mut comps = last.expect("at least one attempt");
    for c in &mut comps {
        c.possibly_reducible = true;
    }
    comps
}

/// `sum of the k smallest eigenvalues of M(x)^T M(x)`, `M(x) = sum x_i A_i`.
struct KernelObjective {
    a: Vec<DMatrix<f64>>,
    k: usize,
}

impl KernelObjective {
    fn m(&self, x: &[f64]) -> DMatrix<f64> {
        scaled_sum(&self.a, x)
    }
}

impl Objective for KernelObjective {
    fn value_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let m = self.m(x);
        let eig = (m.transpose() * &m).symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|a, b| eig.eigenvalues[*a].total_cmp(&eig.eigenvalues[*b]));
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut f = 0.0;
        for &j in order.iter().take(self.k) {
            f += eig.eigenvalues[j].max(0.0);
            let u = eig.eigenvectors.column(j);
            let mu = &m * u;
            for (g, a) in grad.iter_mut().zip(&self.a) {
                *g += 2.0 * (a * u).dot(&mu);
            }
        }
        f
    }

    fn retract(&self, x: &mut [f64]) {
        let n = x.len();
        normalize_blocks(x, &[n]);
    }

    fn tangent(&self, x: &[f64], g: &mut [f64]) {
        tangent_blocks(x, g, &[x.len()]);
    }
}

/// Decides whether some nonzero `X_m ∈ m1` has a kernel on `V` under `ad`.
pub fn classify_phi(dec: &Decomposition, v: &LieSubspace, restarts: usize) -> Result<PhiResult> {
    classify_phi_with(dec, v, restarts, 0, Execution::default())
}

pub fn classify_phi_with(
    dec: &Decomposition,
    v: &LieSubspace,
    restarts: usize,
    seed: u64,
    exec: Execution,
) -> Result<PhiResult> {
    if dec.m1.is_zero() {
        return Err(Error::Precondition("classify_phi needs m1 != 0".into()));
    }
    if v.is_zero() {
        return Err(Error::Precondition("classify_phi needs a nonzero component".into()));
    }
    let a: Vec<DMatrix<f64>> = dec.m1.basis().iter().map(|b| v.ad_matrix(b)).collect();
    let invariance = dec
        .m1
        .basis()
        .iter()
        .flat_map(|b| v.basis().iter().map(move |y| b.bracket(y)))
        .map(|c| v.residual(&c))
        .fold(0.0, f64::max);
    if invariance > 1e-8 {
        return Err(Error::Precondition(format!(
            "component is not ad(m1)-invariant (residual {invariance:e})"
        )));
    }
    let scale = a
        .iter()
        .map(|m| crate::linalg::svd(m.clone(), false, false).singular_values.max())
        .fold(0.0, f64::max);
    let dm = dec.m1.dim();
    if scale <= 1e-14 {
        return Ok(PhiResult {
            class: PhiClass::Phi1,
            min_value: 0.0,
            scale,
            x_m: Some(dec.m1.basis()[0].clone()),
            y_s: Some(v.basis()[0].clone()),
        });
    }
    let k = if v.dim().is_multiple_of(2) { 2 } else { 1 };
    let obj = KernelObjective { a, k };
    let opts = DescentOptions {
        iters: 400,
        grad_tol: 1e-14 * scale * scale,
        value_floor: 1e-26 * scale * scale,
    };
    let res = multistart(&obj, restarts.max(1), seed, exec, &opts, |rng| {
        crate::linalg::random_unit_vector(dm, rng)
    })
    .expect("at least one restart");
    let min_value = (res.best.value.max(0.0) / k as f64).sqrt();
    let class = if min_value <= 1e-6 * scale {
        PhiClass::Phi1
    } else if min_value >= 1e-3 * scale {
        PhiClass::Phi2
    } else {
        PhiClass::Inconclusive
    };
    let x = res.best.x;
    let m = obj.m(&x);
    let eig = (m.transpose() * &m).symmetric_eigen();
    let jmin = eig.eigenvalues.imin();
    let y = v.element(eig.eigenvectors.column(jmin).as_slice());
    Ok(PhiResult {
        class,
        min_value,
        scale,
        x_m: Some(dec.m1.element(&x)),
        y_s: if class == PhiClass::Phi1 { Some(y) } else { None },
    })
}

/// Whether `z(Y_s) ∩ k0` projects onto `m1`.
pub fn transitivity_check(dec: &Decomposition, y_s: &MatrixElement) -> Result<bool> {
    let r = dec.s.residual(y_s);
    let norm = y_s.norm();
    if norm <= 1e-14 {
        return Err(Error::Precondition("Y_s must be nonzero".into()));
    }
    if r > 1e-8 * norm {
        return Err(Error::Precondition(format!("Y_s is not in s (residual {r:e})")));
    }
    if dec.m1.is_zero() {
        return Ok(true);
    }
    let n = crate::linalg::solve_commutant_tol(std::slice::from_ref(y_s), &dec.k0, dec.tol)?;
    if n.is_zero() {
        return Ok(false);
    }
    let proj = DMatrix::from_fn(dec.m1.dim(), n.dim(), |r, c| dec.m1.basis()[r].q(&n.basis()[c]));
    // bases are orthonormal, so an absolute threshold on the singular values is meaningful
    let sv = crate::linalg::svd(proj, false, false).singular_values;
    Ok(sv.iter().filter(|s| **s > 1e-8).count() == dec.m1.dim())
}

/// `(g, n0)` is a symmetric pair: `[n0,n0] ⊆ n0`, `[n0,s2] ⊆ s2`, `[s2,s2] ⊆ n0`.
pub fn symmetric_pair_check(g: &LieSubspace, n0: &LieSubspace) -> Result<bool> {
    if g.ambient_dim() != n0.ambient_dim() {
        return Err(Error::DimensionMismatch {
            left: g.ambient_dim(),
            right: n0.ambient_dim(),
        });
    }
    let r = g.containment_residual(n0);
    if r > STRUCTURE_TOL {
        return Err(Error::Precondition(format!(
            "n0 is not contained in g (residual {r:e})"
        )));
    }
    let s2 = n0.complement_in(g, DEFAULT_TOL);
    Ok(n0.closure_residual() <= STRUCTURE_TOL
        && n0.bracket_residual(&s2, &s2) <= STRUCTURE_TOL
        && s2.bracket_residual(&s2, n0) <= STRUCTURE_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebras::{make_so, make_sp};
    use crate::linalg::{random_orthogonal, MatrixElement};
    use crate::octonion::triality_frame;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn so_block(n: usize, offset: usize, size: usize) -> LieSubspace {
        make_so(size).unwrap().subspace.embed(n, offset).unwrap()
    }

    fn g2_so7_so(n: usize, plus: bool) -> Triple {
        let f = triality_frame();
        let k = if plus { &f.so7_plus } else { &f.so7_0 };
        Triple::new(
            "t",
            LieSubspace::so(n),
            k.embed(n, 0).unwrap(),
            f.g2.embed(n, 0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn degenerate_triple_has_no_m() {
        let sp2 = make_sp(2).unwrap().subspace;
        let k = LieSubspace::span(8, &crate::algebras::sp_basis(2, &[0]), DEFAULT_TOL).sum(
            &LieSubspace::span(8, &crate::algebras::sp_basis(2, &[1]), DEFAULT_TOL),
            DEFAULT_TOL,
        );
        let t = Triple::new("deg", sp2, k.clone(), k).unwrap();
        let d = decompose(&t, DEFAULT_TOL).unwrap();
        assert_eq!(d.m.dim(), 0);
        assert_eq!(d.k0.dim(), 0);
        assert_eq!(d.s.dim(), 4);
        assert!(d.components.is_empty());
    }

    #[test]
    fn g2_in_spin7_in_so8() {
        let d = decompose(&g2_so7_so(8, false), DEFAULT_TOL).unwrap();
        assert_eq!((d.m.dim(), d.s.dim(), d.k0.dim(), d.hprime.dim()), (7, 7, 21, 0));
        assert_eq!((d.h1.dim(), d.m1.dim()), (14, 7));
        let r = d.residuals();
        assert!(r.m_perp_h < 1e-10 && r.s_perp_k < 1e-10 && r.m1_perp_h1 < 1e-10);
        assert!(r.k_reconstruction < 1e-9 && r.h_reconstruction < 1e-9 && r.s_reconstruction < 1e-9);
    }

    #[test]
    fn spin7_in_so9_uses_so8_for_h1() {
        let f = triality_frame();
        let t = Triple::new(
            "spin7-so9",
            LieSubspace::so(9),
            LieSubspace::so(9),
            f.so7_plus.embed(9, 0).unwrap(),
        )
        .unwrap();
        let d = decompose(&t, DEFAULT_TOL).unwrap();
        assert_eq!((d.k0.dim(), d.h0.dim(), d.h1.dim(), d.m1.dim()), (36, 21, 28, 8));
        assert!(so_block(9, 0, 8).containment_residual(&d.h1) < 1e-9);
    }

    #[test]
    fn isotypic_components_so9() {
        let dims = |plus| {
            let d = decompose(&g2_so7_so(9, plus), DEFAULT_TOL).unwrap();
            let mut v: Vec<usize> = d.components.iter().map(|c| c.space.dim()).collect();
            v.sort();
            (v, d.s_z.dim())
        };
        assert_eq!(dims(true), (vec![7, 8], 0));
        assert_eq!(dims(false), (vec![7, 7], 1));
    }

    #[test]
    fn components_are_l_invariant() {
        let d = decompose(&g2_so7_so(10, true), DEFAULT_TOL).unwrap();
        for c in &d.components {
            assert!(d.l.bracket_residual(&c.space, &c.space) < 1e-8);
        }
        assert!(d.residuals().s_reconstruction < 1e-9);
    }

    #[test]
    fn conjugation_preserves_component_dims() {
        let t = g2_so7_so(9, true);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let q = random_orthogonal(9, &mut rng);
        let a = decompose(&t, DEFAULT_TOL).unwrap();
        let b = decompose(&t.conjugate(&q), DEFAULT_TOL).unwrap();
        assert_eq!(a.dim_summary(), b.dim_summary());
        let mut da: Vec<_> = a.components.iter().map(|c| c.space.dim()).collect();
        let mut db: Vec<_> = b.components.iter().map(|c| c.space.dim()).collect();
        da.sort();
        db.sort();
        assert_eq!(da, db);
        assert!(b.m.containment_residual(&a.m.conjugate(&q)) < 1e-8);
    }

    #[test]
    fn phi_classes() {
        let d = decompose(&g2_so7_so(9, true), DEFAULT_TOL).unwrap();
        for c in &d.components {
            let r = classify_phi(&d, &c.space, 8).unwrap();
            let want = if c.space.dim() == 7 {
                PhiClass::Phi1
            } else {
                PhiClass::Phi2
            };
            assert_eq!(r.class, want, "component of dim {}", c.space.dim());
            if want == PhiClass::Phi1 {
                let (x, y) = (r.x_m.unwrap(), r.y_s.unwrap());
                assert!(x.bracket(&y).norm() < 1e-6 * r.scale);
            }
        }
    }

    #[test]
    fn phi_requires_m1() {
        let sp2 = make_sp(2).unwrap().subspace;
        let t = Triple::new("deg", sp2.clone(), sp2.clone(), sp2.clone()).unwrap();
        let d = decompose(&t, DEFAULT_TOL).unwrap();
        assert!(classify_phi(&d, &sp2, 2).is_err());
    }

    #[test]
    fn transitivity_examples() {
        let d = decompose(&g2_so7_so(9, true), DEFAULT_TOL).unwrap();
        // E_{0,8} lies in the 8-dim spin-type component; its centralizer in k0 is g2 only
        let y = MatrixElement::e(9, 0, 8);
        assert!(!transitivity_check(&d, &y).unwrap());
        assert!(transitivity_check(&d, &MatrixElement::e(9, 0, 1)).is_err());
        let d0 = decompose(&g2_so7_so(9, false), DEFAULT_TOL).unwrap();
        // E_{0,8} is central for so0(7), which fixes the real unit
        assert!(transitivity_check(&d0, &MatrixElement::e(9, 0, 8)).unwrap());
    }

    #[test]
    fn symmetric_pairs() {
        for p in 0..3 {
            let n = 9 + p;
            let n0 = so_block(n, 0, 8).sum(&so_block(n, 8, p + 1), DEFAULT_TOL);
            assert!(symmetric_pair_check(&LieSubspace::so(n), &n0).unwrap());
        }
        let f = triality_frame();
        assert!(symmetric_pair_check(&LieSubspace::so(8), &f.so7_0).unwrap());
        let line = LieSubspace::span(5, &[MatrixElement::e(5, 0, 1)], DEFAULT_TOL);
        assert!(!symmetric_pair_check(&LieSubspace::so(5), &line).unwrap());
    }

    #[test]
    fn triple_rejects_bad_inclusions() {
        let so4 = LieSubspace::so(4);
        let a = so_block(4, 0, 2);
        let b = so_block(4, 2, 2);
        assert!(Triple::new("bad", so4.clone(), a, b).is_err());
        let open = LieSubspace::span(4, &[MatrixElement::e(4, 0, 1), MatrixElement::e(4, 1, 2)], DEFAULT_TOL);
        assert!(Triple::new("open", so4.clone(), open, LieSubspace::zero(4)).is_err());
    }
}
