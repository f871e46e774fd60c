//! Skew-symmetric matrix elements, the trace form `Q(X, Y) = -tr(XY)`, and
//! subspace operations (orthonormal spans, projections, principal-angle
//! intersections, commutant kernels).
//!
//! A skew matrix flattened column-major is a vector whose Euclidean inner
//! product equals `Q`, so every subspace is stored as an orthonormal frame in
//! `R^{N*N}` alongside its matrix basis.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::{DMatrix, DVector, Dyn, SVD};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Rank and intersection tolerance, relative to the largest singular value.
pub const DEFAULT_TOL: f64 = 1e-8;

const SKEW_TOL: f64 = 1e-12;

/// Singular values below this are zero regardless of the relative tolerance,
/// so maps that vanish up to round-off get a full kernel.
const ABS_RANK_FLOOR: f64 = 1e-11;

/// A real skew-symmetric `N x N` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixElement {
    entries: DMatrix<f64>,
}

impl MatrixElement {
    /// Wraps a square matrix, rejecting anything that is not skew within 1e-12 per entry.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                left: entries.nrows(),
                right: entries.ncols(),
            });
        }
        let el = Self { entries };
        let defect = el.skew_defect();
        if defect > SKEW_TOL {
            return Err(Error::NotSkew(defect));
        }
        Ok(el)
    }

    /// The skew part `(M - M^T) / 2` of an arbitrary square matrix.
    pub fn skew_part(m: &DMatrix<f64>) -> Self {
        Self {
            entries: (m - m.transpose()) * 0.5,
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            entries: DMatrix::zeros(n, n),
        }
    }

    /// `E_rs` (0-based): `E_rs e_r = e_s`, `E_rs e_s = -e_r`.
    pub fn e(n: usize, r: usize, s: usize) -> Self {
        assert!(r < n && s < n && r != s, "E_rs needs distinct indices below {n}");
        let mut m = DMatrix::zeros(n, n);
        m[(s, r)] = 1.0;
        m[(r, s)] = -1.0;
        Self { entries: m }
    }

    pub fn ambient_dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn as_slice(&self) -> &[f64] {
        self.entries.as_slice()
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.entries
    }

    /// Largest `|X + X^T|` entry.
    pub fn skew_defect(&self) -> f64 {
        let n = self.ambient_dim();
        let mut worst = 0.0f64;
        for c in 0..n {
            for r in 0..=c {
                worst = worst.max((self.entries[(r, c)] + self.entries[(c, r)]).abs());
            }
        }
        worst
    }

    /// `Q(self, other)`; panics on mismatched ambients (use [`inner_product`] for a checked call).
    pub fn q(&self, other: &Self) -> f64 {
        assert_eq!(self.ambient_dim(), other.ambient_dim(), "ambient mismatch");
        self.as_slice().iter().zip(other.as_slice()).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.q(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `[self, other]`; panics on mismatched ambients (use [`bracket`] for a checked call).
    pub fn bracket(&self, other: &Self) -> Self {
        assert_eq!(self.ambient_dim(), other.ambient_dim(), "ambient mismatch");
        let xy = &self.entries * &other.entries;
        Self {
            entries: &xy - xy.transpose(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            entries: &self.entries * c,
        }
    }

    /// `self += a * x`.
    pub fn axpy(&mut self, a: f64, x: &Self) {
        for (d, s) in self.entries.iter_mut().zip(x.entries.iter()) {
            *d += a * s;
        }
    }

    /// `g X g^T` for an orthogonal `g`.
    pub fn conjugate(&self, g: &DMatrix<f64>) -> Self {
        Self::skew_part(&(g * &self.entries * g.transpose()))
    }

    /// Pads into a larger ambient at diagonal offset `offset`.
    pub fn embed(&self, n: usize, offset: usize) -> Result<Self> {
        let k = self.ambient_dim();
        if offset + k > n {
            return Err(Error::Precondition(format!(
                "block of size {k} at offset {offset} overflows ambient {n}"
            )));
        }
        let mut m = DMatrix::zeros(n, n);
        m.view_mut((offset, offset), (k, k)).copy_from(&self.entries);
        Ok(Self { entries: m })
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.amax()
    }
}

macro_rules! impl_binop {
    ($tr:ident, $f:ident, $op:tt) => {
        impl $tr<&MatrixElement> for &MatrixElement {
            type Output = MatrixElement;
            fn $f(self, rhs: &MatrixElement) -> MatrixElement {
                assert_eq!(self.ambient_dim(), rhs.ambient_dim(), "ambient mismatch");
                MatrixElement { entries: &self.entries $op &rhs.entries }
            }
        }
        impl $tr<MatrixElement> for MatrixElement {
            type Output = MatrixElement;
            fn $f(self, rhs: MatrixElement) -> MatrixElement {
                &self $op &rhs
            }
        }
        impl $tr<&MatrixElement> for MatrixElement {
            type Output = MatrixElement;
            fn $f(self, rhs: &MatrixElement) -> MatrixElement {
                &self $op rhs
            }
        }
    };
}
impl_binop!(Add, add, +);
impl_binop!(Sub, sub, -);

impl AddAssign<&MatrixElement> for MatrixElement {
    fn add_assign(&mut self, rhs: &MatrixElement) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&MatrixElement> for MatrixElement {
    fn sub_assign(&mut self, rhs: &MatrixElement) {
        self.axpy(-1.0, rhs);
    }
}

impl Neg for &MatrixElement {
    type Output = MatrixElement;
    fn neg(self) -> MatrixElement {
        self.scaled(-1.0)
    }
}

impl Neg for MatrixElement {
    type Output = MatrixElement;
    fn neg(self) -> MatrixElement {
        self.scaled(-1.0)
    }
}

impl Mul<&MatrixElement> for f64 {
    type Output = MatrixElement;
    fn mul(self, rhs: &MatrixElement) -> MatrixElement {
        rhs.scaled(self)
    }
}

impl Mul<MatrixElement> for f64 {
    type Output = MatrixElement;
    fn mul(self, rhs: MatrixElement) -> MatrixElement {
        rhs.scaled(self)
    }
}

fn check_dims(a: &MatrixElement, b: &MatrixElement) -> Result<()> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::DimensionMismatch {
            left: a.ambient_dim(),
            right: b.ambient_dim(),
        });
    }
    Ok(())
}

/// `Q(X, Y) = -trace(XY)`.
pub fn inner_product(x: &MatrixElement, y: &MatrixElement) -> Result<f64> {
    check_dims(x, y)?;
    Ok(x.q(y))
}

/// `XY - YX`.
pub fn bracket(x: &MatrixElement, y: &MatrixElement) -> Result<MatrixElement> {
    check_dims(x, y)?;
    Ok(x.bracket(y))
}

/// Area of the parallelogram spanned by `X` and `Y` under `Q`.
pub fn wedge_norm(x: &MatrixElement, y: &MatrixElement) -> Result<f64> {
    check_dims(x, y)?;
    Ok(wedge_from_gram(x.norm_sq(), y.norm_sq(), x.q(y)))
}

pub(crate) fn wedge_from_gram(xx: f64, yy: f64, xy: f64) -> f64 {
    (xx * yy - xy * xy).max(0.0).sqrt()
}

/// A subspace of `so(N)` stored as a `Q`-orthonormal basis.
#[derive(Clone, Debug)]
pub struct LieSubspace {
    n: usize,
    basis: Vec<MatrixElement>,
    frame: DMatrix<f64>,
}

impl LieSubspace {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            basis: Vec::new(),
            frame: DMatrix::zeros(n * n, 0),
        }
    }

    /// All of `so(n)`, basis `E_rs / sqrt(2)`.
    pub fn so(n: usize) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let basis = (0..n)
            .flat_map(|r| ((r + 1)..n).map(move |c| (r, c)))
            .map(|(r, c)| MatrixElement::e(n, r, c).scaled(s))
            .collect();
        Self::from_orthonormal(n, basis)
    }

    /// Wraps a basis already known to be orthonormal.
    pub(crate) fn from_orthonormal(n: usize, basis: Vec<MatrixElement>) -> Self {
        let mut frame = DMatrix::zeros(n * n, basis.len());
        for (j, b) in basis.iter().enumerate() {
            frame.column_mut(j).copy_from_slice(b.as_slice());
        }
        Self { n, basis, frame }
    }

    fn from_frame(n: usize, frame: DMatrix<f64>) -> Self {
        let basis = frame
            .column_iter()
            .map(|c| {
                let flat: Vec<f64> = c.iter().copied().collect();
                MatrixElement::skew_part(&DMatrix::from_column_slice(n, n, &flat))
            })
            .collect();
        Self::from_orthonormal(n, basis)
    }

    /// Orthonormal basis of the span of `elems` (numerical rank at relative `tol`).
    pub fn span(n: usize, elems: &[MatrixElement], tol: f64) -> Self {
        if elems.is_empty() {
            return Self::zero(n);
        }
        let mut a = DMatrix::zeros(n * n, elems.len());
        for (j, e) in elems.iter().enumerate() {
            assert_eq!(e.ambient_dim(), n, "ambient mismatch in span");
            a.column_mut(j).copy_from_slice(e.as_slice());
        }
        Self::from_frame(n, range_basis(&a, tol))
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[MatrixElement] {
        &self.basis
    }

    /// Columns are the flattened basis elements.
    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    /// Coordinates of the projection of `x` in this basis.
    pub fn coords(&self, x: &MatrixElement) -> DVector<f64> {
        self.frame.tr_mul(&DVector::from_column_slice(x.as_slice()))
    }

    /// `sum_i c_i b_i`.
    pub fn element(&self, c: &[f64]) -> MatrixElement {
        assert_eq!(c.len(), self.dim());
        let mut out = MatrixElement::zeros(self.n);
        for (ci, b) in c.iter().zip(&self.basis) {
            if *ci != 0.0 {
                out.axpy(*ci, b);
            }
        }
        out
    }

    pub fn project(&self, x: &MatrixElement) -> MatrixElement {
        if self.is_zero() {
            return MatrixElement::zeros(self.n);
        }
        let c = self.coords(x);
        self.element(c.as_slice())
    }

    /// `|x - project(x)|`.
    pub fn residual(&self, x: &MatrixElement) -> f64 {
        (x - &self.project(x)).norm()
    }

    pub fn contains(&self, x: &MatrixElement, tol: f64) -> bool {
        self.residual(x) <= tol * x.norm().max(1.0)
    }

    /// Largest residual of `other`'s basis against this subspace.
    pub fn containment_residual(&self, other: &LieSubspace) -> f64 {
        other.basis.iter().map(|b| self.residual(b)).fold(0.0, f64::max)
    }

    /// `ambient ∩ self^⊥`.
    pub fn complement_in(&self, ambient: &LieSubspace, tol: f64) -> LieSubspace {
        if self.is_zero() || ambient.is_zero() {
            return ambient.clone();
        }
        let cross = self.frame.tr_mul(&ambient.frame);
        let kernel = null_space(&cross, tol);
        ambient.combine(&kernel)
    }

    /// Subspace spanned by `self.frame * coeffs` (columns orthonormal in coordinate space).
    pub(crate) fn combine(&self, coeffs: &DMatrix<f64>) -> LieSubspace {
        if coeffs.ncols() == 0 {
            return LieSubspace::zero(self.n);
        }
        Self::from_frame(self.n, &self.frame * coeffs)
    }

    /// Orthonormal basis of `self + other`.
    pub fn sum(&self, other: &LieSubspace, tol: f64) -> LieSubspace {
        let mut elems = self.basis.clone();
        elems.extend(other.basis.iter().cloned());
        Self::span(self.n, &elems, tol)
    }

    /// `max |Q(b_i, b_j) - delta_ij|`.
    pub fn gram_defect(&self) -> f64 {
        let g = self.frame.tr_mul(&self.frame);
        let d = g.nrows();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// Largest residual of `[b_i, b_j]` outside the subspace.
    pub fn closure_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in (i + 1)..self.dim() {
                worst = worst.max(self.residual(&self.basis[i].bracket(&self.basis[j])));
            }
        }
        worst
    }

    /// Largest residual of `[a, b]` outside `target`, `a` from `self`, `b` from `other`.
    pub fn bracket_residual(&self, other: &LieSubspace, target: &LieSubspace) -> f64 {
        let mut worst = 0.0f64;
        for a in &self.basis {
            for b in &other.basis {
                worst = worst.max(target.residual(&a.bracket(b)));
            }
        }
        worst
    }

    /// Span of all brackets `[a, b]` with `a` in `self`, `b` in `other`.
    pub fn bracket_span(&self, other: &LieSubspace, tol: f64) -> LieSubspace {
        let same = std::ptr::eq(self, other);
        let mut elems = Vec::new();
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in other.basis.iter().enumerate() {
                if same && j <= i {
                    continue;
                }
                elems.push(a.bracket(b));
            }
        }
        Self::span(self.n, &elems, tol)
    }

    pub fn conjugate(&self, g: &DMatrix<f64>) -> LieSubspace {
        let elems: Vec<_> = self.basis.iter().map(|b| b.conjugate(g)).collect();
        Self::from_orthonormal(self.n, elems)
    }

    pub fn embed(&self, n: usize, offset: usize) -> Result<LieSubspace> {
        let elems = self
            .basis
            .iter()
            .map(|b| b.embed(n, offset))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_orthonormal(n, elems))
    }

    /// `{X in self : f(X) = 0}` for a linear map `f` given by its values on the basis.
    pub fn kernel_of<F>(&self, f: F, tol: f64) -> LieSubspace
    where
        F: Fn(&MatrixElement) -> Vec<f64>,
    {
        if self.is_zero() {
            return self.clone();
        }
        let cols: Vec<Vec<f64>> = self.basis.iter().map(&f).collect();
        let rows = cols[0].len();
        let m = DMatrix::from_fn(rows, cols.len(), |r, c| cols[c][r]);
        self.combine(&null_space(&m, tol))
    }

    /// Matrix of `ad_x` restricted to this (assumed `ad_x`-invariant) subspace.
    pub fn ad_matrix(&self, x: &MatrixElement) -> DMatrix<f64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for (j, b) in self.basis.iter().enumerate() {
            let c = self.coords(&x.bracket(b));
            m.column_mut(j).copy_from(&c);
        }
        m
    }

    /// A `Q`-unit element drawn uniformly from the unit sphere.
    pub fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> MatrixElement {
        let c = random_unit_vector(self.dim(), rng);
        self.element(&c)
    }
}

/// Orthonormal basis of `span{spanning}`; the empty list is rejected.
pub fn orthonormalize(spanning: &[MatrixElement], tol: f64) -> Result<LieSubspace> {
    let first = spanning
        .first()
        .ok_or_else(|| Error::Precondition("orthonormalize needs a nonempty list".into()))?;
    for x in spanning {
        check_dims(first, x)?;
    }
    Ok(LieSubspace::span(first.ambient_dim(), spanning, tol))
}

/// `Q`-orthogonal projection onto `u`.
pub fn project(u: &LieSubspace, x: &MatrixElement) -> Result<MatrixElement> {
    if u.ambient_dim() != x.ambient_dim() {
        return Err(Error::DimensionMismatch {
            left: u.ambient_dim(),
            right: x.ambient_dim(),
        });
    }
    Ok(u.project(x))
}

/// Principal angles in ascending order (radians).
pub fn principal_angles(u: &LieSubspace, w: &LieSubspace) -> Vec<f64> {
    if u.is_zero() || w.is_zero() {
        return Vec::new();
    }
    let c = u.frame.tr_mul(&w.frame);
    let mut cosines: Vec<f64> = svd(c, false, false).singular_values.iter().copied().collect();
    cosines.sort_by(|a, b| b.total_cmp(a));
    cosines.into_iter().map(|s| s.clamp(-1.0, 1.0).acos()).collect()
}

/// `U ∩ W`: directions whose principal-angle cosine exceeds `1 - tol`.
pub fn intersect(u: &LieSubspace, w: &LieSubspace, tol: f64) -> Result<LieSubspace> {
    if u.ambient_dim() != w.ambient_dim() {
        return Err(Error::DimensionMismatch {
            left: u.ambient_dim(),
            right: w.ambient_dim(),
        });
    }
    if u.is_zero() || w.is_zero() {
        return Ok(LieSubspace::zero(u.ambient_dim()));
    }
    let c = u.frame.tr_mul(&w.frame);
    let svd = svd(c, true, false);
    let left = svd.u.expect("requested u");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&j| svd.singular_values[j] > 1.0 - tol)
        .collect();
    let mut coeffs = DMatrix::zeros(u.dim(), keep.len());
    for (k, &j) in keep.iter().enumerate() {
        coeffs.column_mut(k).copy_from(&left.column(j));
    }
    Ok(u.combine(&coeffs))
}

/// `{X in domain : [X, c] = 0 for every constraint c}`.
pub fn solve_commutant(constraints: &[MatrixElement], domain: &LieSubspace) -> Result<LieSubspace> {
    solve_commutant_tol(constraints, domain, DEFAULT_TOL)
}

pub fn solve_commutant_tol(constraints: &[MatrixElement], domain: &LieSubspace, tol: f64) -> Result<LieSubspace> {
    let n = domain.ambient_dim();
    for c in constraints {
        if c.ambient_dim() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: c.ambient_dim(),
            });
        }
    }
    if constraints.is_empty() || domain.is_zero() {
        return Ok(domain.clone());
    }
    let nn = n * n;
    let mut m = DMatrix::zeros(nn * constraints.len(), domain.dim());
    for (j, b) in domain.basis().iter().enumerate() {
        for (k, c) in constraints.iter().enumerate() {
            let br = b.bracket(c);
            m.view_mut((k * nn, j), (nn, 1)).copy_from_slice(br.as_slice());
        }
    }
    Ok(domain.combine(&null_space(&m, tol)))
}

/// Basis of the symmetric `d x d` matrices commuting with every action matrix.
pub fn symmetric_commutant(actions: &[DMatrix<f64>], d: usize, tol: f64) -> Vec<DMatrix<f64>> {
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|a| (a..d).map(move |b| (a, b))).collect();
    let unit = |(a, b): (usize, usize)| {
        let mut s = DMatrix::zeros(d, d);
        s[(a, b)] = 1.0;
        s[(b, a)] = 1.0;
        s
    };
    if actions.is_empty() {
        return pairs.into_iter().map(unit).collect();
    }
    let block = d * d;
    let mut m = DMatrix::zeros(block * actions.len(), pairs.len());
    for (col, &pair) in pairs.iter().enumerate() {
        let s = unit(pair);
        for (k, a) in actions.iter().enumerate() {
            let c = &s * a - a * &s;
            m.view_mut((k * block, col), (block, 1)).copy_from_slice(c.as_slice());
        }
    }
    let kernel = null_space(&m, tol);
    kernel
        .column_iter()
        .map(|v| {
            let mut s = DMatrix::zeros(d, d);
            for (coef, &pair) in v.iter().zip(&pairs) {
                s += unit(pair) * *coef;
            }
            s
        })
        .collect()
}

/// SVD iterated to full machine precision, with a reconstruction check.
/// `DMatrix::svd` stops early on clustered singular values, while a
/// convergence threshold of exactly `f64::EPSILON` occasionally deflates
/// the wrong entry on rank-deficient input; the first candidate that
/// reconstructs `m` to round-off wins.
pub(crate) fn svd(m: DMatrix<f64>, u: bool, v: bool) -> SVD<f64, Dyn, Dyn> {
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let mut best: Option<(f64, SVD<f64, Dyn, Dyn>)> = None;
    for eps in [1e-15, f64::EPSILON, 1e-14] {
        let Some(s) = m.clone().try_svd(true, true, eps, 100_000) else {
            continue;
        };
        let err = match s.clone().recompose() {
            Ok(r) => (r - &m).amax() / scale,
            Err(_) => f64::INFINITY,
        };
        if err <= 1e-13 {
            best = Some((err, s));
            break;
        }
        if best.as_ref().is_none_or(|(e, _)| err < *e) {
            best = Some((err, s));
        }
    }
    let mut s = best.map(|(_, s)| s).unwrap_or_else(|| m.svd(true, true));
    if !u {
        s.u = None;
    }
    if !v {
        s.v_t = None;
    }
    s
}

/// Orthonormal columns spanning the numerical range of `a`.
pub(crate) fn range_basis(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let (r, c) = a.shape();
    if c == 0 || r == 0 {
        return DMatrix::zeros(r, 0);
    }
    let svd = svd(a.clone(), true, false);
    let u = svd.u.expect("requested u");
    let smax = svd.singular_values.max();
    if smax <= f64::MIN_POSITIVE {
        return DMatrix::zeros(r, 0);
    }
    let cut = (tol * smax).max(ABS_RANK_FLOOR);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&j| svd.singular_values[j] > cut)
        .collect();
    let mut out = DMatrix::zeros(r, keep.len());
    for (k, &j) in keep.iter().enumerate() {
        out.column_mut(k).copy_from(&u.column(j));
    }
    out
}

/// Orthonormal columns spanning the numerical kernel of `m`.
pub(crate) fn null_space(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let (r, c) = m.shape();
    if c == 0 {
        return DMatrix::zeros(0, 0);
    }
    let square = if r > c {
        m.clone().qr().r()
    } else if r < c {
        let mut p = DMatrix::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = svd(square, false, true);
    let vt = svd.v_t.expect("requested v_t");
    let smax = svd.singular_values.max();
    if smax <= f64::MIN_POSITIVE {
        return DMatrix::identity(c, c);
    }
    let cut = (tol * smax).max(ABS_RANK_FLOOR);
    let keep: Vec<usize> = (0..c).filter(|&j| svd.singular_values[j] <= cut).collect();
    let mut out = DMatrix::zeros(c, keep.len());
    for (k, &j) in keep.iter().enumerate() {
        out.column_mut(k).copy_from(&vt.row(j).transpose());
    }
    out
}

pub fn random_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nrm > 1e-12 {
            return v.into_iter().map(|x| x / nrm).collect();
        }
    }
}

/// Haar-ish random orthogonal matrix (QR of a Gaussian matrix, signs fixed).
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// A random element of `so(n)` with standard Gaussian entries.
pub fn random_skew<R: Rng + ?Sized>(n: usize, rng: &mut R) -> MatrixElement {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    MatrixElement::skew_part(&g)
}
