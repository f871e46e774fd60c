//! Curvature estimates for the deformed metrics `phi` on `p = m ⊕ s`: the
//! tensors `A, B, C`, the terms `alpha..delta` of the unnormalized curvature
//! (without the nonpositive `D`-term, so their sum is an upper surrogate),
//! the polynomial bound in `|psi|`, and the second fundamental form of the
//! warped product.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{svd, wedge_norm, LieSubspace, MatrixElement};
use crate::triple::Decomposition;

/// Agreement required between the two computations of `A, B, C`.
pub const DUAL_TOL: f64 = 1e-10;

/// `phi = Id` on `s` and `(1 - h)^{-1} Id` on `m1`, so that
/// `psi = Id - phi^{-1}` is `h` times the projection onto `m1`.
#[derive(Clone, Debug)]
pub struct PhiMap<'a> {
    pub dec: &'a Decomposition,
    pub m1: LieSubspace,
    pub h: f64,
}

impl<'a> PhiMap<'a> {
    /// Uses the decomposition's `m1`, or all of `m` when `m1` holds no plane.
    pub fn new(dec: &'a Decomposition, h: f64) -> Result<Self> {
        Self::with_subspace(dec, dec.m_domain().clone(), h)
    }

    pub fn with_subspace(dec: &'a Decomposition, m1: LieSubspace, h: f64) -> Result<Self> {
        if h >= 1.0 || !h.is_finite() {
            return Err(Error::Precondition(format!("phi needs h < 1, got {h}")));
        }
        let r = dec.m.containment_residual(&m1);
        if r > 1e-8 {
            return Err(Error::Precondition(format!("m1 is not inside m (residual {r:e})")));
        }
        Ok(Self { dec, m1, h })
    }

    /// `psi Z = h Z_{m1}`, extended by zero off `p`.
    pub fn psi(&self, z: &MatrixElement) -> MatrixElement {
        self.m1.project(z).scaled(self.h)
    }

    /// Operator norm of `psi`.
    pub fn psi_norm(&self) -> f64 {
        if self.m1.is_zero() {
            0.0
        } else {
            self.h.abs()
        }
    }

    /// `phi` applied to an element of `m1 ⊕ s`.
    pub fn phi(&self, z: &MatrixElement) -> MatrixElement {
        let zm = self.m1.project(z);
        let mut out = z.clone();
        out.axpy(1.0 / (1.0 - self.h) - 1.0, &zm);
        out
    }

    fn check(&self, x: &MatrixElement) -> Result<()> {
        let n = self.dec.triple.ambient_dim();
        if x.ambient_dim() != n {
            return Err(Error::DimensionMismatch {
                left: x.ambient_dim(),
                right: n,
            });
        }
        let mut r = x.clone();
        r.axpy(-1.0, &self.m1.project(x));
        r.axpy(-1.0, &self.dec.s.project(x));
        let res = r.norm();
        if res > 1e-8 * x.norm().max(1.0) {
            return Err(Error::Precondition(format!(
                "element is not in m1 + s (residual {res:e})"
            )));
        }
        Ok(())
    }
}

/// The curvature terms for one pair.
#[derive(Clone, Debug, Serialize)]
pub struct CurvatureTerms {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    #[serde(skip)]
    pub a: MatrixElement,
    #[serde(skip)]
    pub b: MatrixElement,
    #[serde(skip)]
    pub c: MatrixElement,
    /// `|[X, Y]|`.
    pub n1: f64,
    /// `|X_m ∧ Y_m|`.
    pub n2: f64,
    /// Largest disagreement between the definitions of `A, B, C` through
    /// `psi` and their closed forms in `h`.
    pub dual_defect: f64,
}

impl CurvatureTerms {
    /// `alpha + beta + gamma + delta`, an upper bound for the curvature.
    pub fn curvature_upper_surrogate(&self) -> f64 {
        self.alpha + self.beta + self.gamma + self.delta
    }
}

pub fn tensors(phi: &PhiMap, x: &MatrixElement, y: &MatrixElement) -> Result<CurvatureTerms> {
    phi.check(x)?;
    phi.check(y)?;
    let dec = phi.dec;
    let h = phi.h;
    let hsub = &dec.triple.h;
    let q = |u: &MatrixElement, v: &MatrixElement| u.q(v);

    let (px, py) = (phi.psi(x), phi.psi(y));
    let a = px.bracket(y) + x.bracket(&py);
    let b = px.bracket(&py);
    let c = px.bracket(y) - x.bracket(&py);

    let (xm, ym) = (phi.m1.project(x), phi.m1.project(y));
    let (xs, ys) = (dec.s.project(x), dec.s.project(y));
    let mxy = xm.bracket(&ym);
    let a_closed = (mxy.scaled(2.0) + xm.bracket(&ys) + xs.bracket(&ym)).scaled(h);
    let b_closed = mxy.scaled(h * h);
    let c_closed = (xm.bracket(&ys) - xs.bracket(&ym)).scaled(h);
    let dual_defect = (a.clone() - a_closed)
        .norm()
        .max((b.clone() - b_closed).norm())
        .max((c.clone() - c_closed).norm());

    let xy = x.bracket(y);
    let xy_h = hsub.project(&xy);
    let xy_p = dec.p.project(&xy);
    let xy_m = dec.m.project(&xy);
    let a_h = hsub.project(&a);
    let psi_xy = phi.psi(&xy);
    let psi2_xy = phi.psi(&psi_xy);
    let psi3_xy = phi.psi(&psi2_xy);

    let alpha = xy_h.norm_sq() + 0.25 * xy_p.norm_sq();
    let beta = -0.75 * q(&psi_xy, &xy) - 1.5 * q(&xy_h, &a);
    let gamma = -0.75 * psi_xy.norm_sq() + 1.5 * q(&psi_xy, &a) - 1.5 * q(&xy_m, &b) + 0.75 * a_h.norm_sq();
    let delta = -0.75 * q(&psi3_xy, &xy) + 1.5 * q(&psi2_xy, &a)
        - 1.5 * q(&psi_xy, &b)
        - 0.75 * q(&phi.psi(&a), &a)
        - 0.25 * q(&phi.psi(&c), &c)
        + q(&phi.psi(&px.bracket(x)), &py.bracket(y))
        + q(&a, &b)
        - 1.5 * q(&a_h, &b);

    Ok(CurvatureTerms {
        alpha,
        beta,
        gamma,
        delta,
        n1: xy.norm(),
        n2: wedge_norm(&dec.m.project(x), &dec.m.project(y))?,
        a,
        b,
        c,
        dual_defect,
    })
}

/// A real polynomial as ascending coefficients.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// `lambda_1(x) = 1 + 3x/4 + 3x^3/4`, `lambda_2(x) = 3 lam x + 9 lam x^2 / 2 + 9 lam x^3 / 2`,
/// `lambda_3(x) = 3 lam^2 + 8 lam^2 x`.
pub fn lambda_polys(lam: f64) -> Result<(Poly, Poly, Poly)> {
    if lam.is_nan() || lam < 0.0 {
        return Err(Error::Precondition(format!("lambda must be nonnegative, got {lam}")));
    }
    Ok((
        Poly(vec![1.0, 0.75, 0.0, 0.75]),
        Poly(vec![0.0, 3.0 * lam, 4.5 * lam, 4.5 * lam]),
        Poly(vec![3.0 * lam * lam, 8.0 * lam * lam]),
    ))
}

/// Norm of `[ , ]: Λ² m1 -> k`, with `Λ²` carrying the inner product
/// induced by `Q`.
pub fn bracket_operator_norm_on(m1: &LieSubspace) -> f64 {
    let d = m1.dim();
    if d < 2 {
        return 0.0;
    }
    let n = m1.ambient_dim();
    let cols = d * (d - 1) / 2;
    let mut mat = DMatrix::zeros(n * n, cols);
    let mut col = 0;
    for i in 0..d {
        for j in (i + 1)..d {
            let b = m1.basis()[i].bracket(&m1.basis()[j]);
            mat.column_mut(col).copy_from_slice(b.as_slice());
            col += 1;
        }
    }
    svd(mat, false, false).singular_values.max()
}

/// [`bracket_operator_norm_on`] for the `m1` that [`PhiMap::new`] uses.
pub fn bracket_operator_norm(dec: &Decomposition) -> f64 {
    bracket_operator_norm_on(dec.m_domain())
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaCheck {
    pub surrogate: f64,
    pub bound: f64,
    pub lambda: f64,
    pub holds: bool,
}

/// Compares `alpha + beta + gamma + delta` with
/// `lambda_1 N1^2 + lambda_2 N1 N2 + lambda_3 h^2 N2^2` at `x = |psi|`.
pub fn check_lemma_bound(phi: &PhiMap, x: &MatrixElement, y: &MatrixElement) -> Result<LemmaCheck> {
    let t = tensors(phi, x, y)?;
    let lambda = bracket_operator_norm_on(&phi.m1);
    let (l1, l2, l3) = lambda_polys(lambda)?;
    let s = phi.psi_norm();
    let bound = l1.eval(s) * t.n1 * t.n1 + l2.eval(s) * t.n1 * t.n2 + l3.eval(s) * phi.h * phi.h * t.n2 * t.n2;
    let surrogate = t.curvature_upper_surrogate();
    let slack = 1e-12 * (1.0 + bound.abs());
    Ok(LemmaCheck {
        surrogate,
        bound,
        lambda,
        holds: surrogate <= bound + slack,
    })
}

/// `II(X', Y') = h' Q(X_m, Y_m) / 2`.
pub fn second_fundamental_form(dec: &Decomposition, hprime: f64, x: &MatrixElement, y: &MatrixElement) -> Result<f64> {
    let phi = PhiMap::new(dec, 0.0)?;
    phi.check(x)?;
    phi.check(y)?;
    Ok(0.5 * hprime * dec.m.project(x).q(&dec.m.project(y)))
}

/// A random element of `m1 ⊕ s` for sampling.
pub fn random_element<R: rand::Rng + ?Sized>(phi: &PhiMap, rng: &mut R) -> MatrixElement {
    let n = phi.dec.triple.ambient_dim();
    let mut v = MatrixElement::zeros(n);
    if !phi.m1.is_zero() {
        v.axpy(rng.gen_range(-1.0..1.0), &phi.m1.random_unit(rng));
    }
    if !phi.dec.s.is_zero() {
        v.axpy(rng.gen_range(-1.0..1.0), &phi.dec.s.random_unit(rng));
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::linalg::DEFAULT_TOL;
    use crate::optimize::restart_rng;
    use crate::triple::{decompose, Triple};
    use rand::Rng;

    fn dec(id: &str, p: Option<i64>) -> Decomposition {
        decompose(&catalog::build(id, p).unwrap(), DEFAULT_TOL).unwrap()
    }

    #[test]
    fn lambda_polys_values() {
        let (a, b, c) = lambda_polys(2.0).unwrap();
        assert_eq!(a.eval(0.0), 1.0);
        assert_eq!(b.eval(0.0), 0.0);
        assert!((c.eval(1.0) - 11.0 * 4.0).abs() < 1e-12);
        assert!(lambda_polys(-1.0).is_err());
    }

    #[test]
    fn h_zero_kills_tensors() {
        let d = dec("g2-so0-7-in-so8", Some(0));
        let phi = PhiMap::new(&d, 0.0).unwrap();
        let mut rng = restart_rng(3, 0);
        let (x, y) = (random_element(&phi, &mut rng), random_element(&phi, &mut rng));
        let t = tensors(&phi, &x, &y).unwrap();
        assert_eq!(t.a.norm() + t.b.norm() + t.c.norm(), 0.0);
        assert_eq!((t.beta, t.gamma, t.delta), (0.0, 0.0, 0.0));
        assert!(t.alpha <= t.n1 * t.n1 + 1e-12);
    }

    #[test]
    fn s_pairs_have_zero_tensors() {
        let d = dec("g2-so0-7-in-so8", Some(1));
        let phi = PhiMap::new(&d, 0.7).unwrap();
        let mut rng = restart_rng(4, 0);
        let (x, y) = (d.s.random_unit(&mut rng), d.s.random_unit(&mut rng));
        let t = tensors(&phi, &x, &y).unwrap();
        assert!(t.a.norm() + t.b.norm() + t.c.norm() < 1e-14);
    }

    #[test]
    fn dual_forms_and_estimates() {
        let d = dec("g2-so0-7-in-so8", Some(0));
        let lam = bracket_operator_norm(&d);
        let mut rng = restart_rng(5, 0);
        for _ in 0..50 {
            let phi = PhiMap::new(&d, rng.gen_range(-0.9..0.9)).unwrap();
            let (x, y) = (random_element(&phi, &mut rng), random_element(&phi, &mut rng));
            let t = tensors(&phi, &x, &y).unwrap();
            assert!(t.dual_defect <= DUAL_TOL, "{}", t.dual_defect);
            assert!(d.s.residual(&t.c) <= 1e-9);
            assert!(d.triple.k.residual(&t.b) <= 1e-9);
            assert!(phi.psi(&t.c).norm() <= 1e-12);
            assert!(phi.psi(&phi.psi(&x).bracket(&x)).norm() <= 1e-12);
            let ah = d.triple.h.project(&t.a).norm();
            assert!(ah <= 2.0 * lam * phi.h.abs() * t.n2 + 1e-10);
            assert!(t.b.norm() <= lam * phi.h * phi.h * t.n2 + 1e-10);
            assert!(check_lemma_bound(&phi, &x, &y).unwrap().holds);
        }
    }

    #[test]
    fn witness_reduces_bound() {
        let (t, x, y) = crate::condition::builtin_witness("spin-octonion-case1", Some(0)).unwrap();
        let d = decompose(&t, DEFAULT_TOL).unwrap();
        let phi = PhiMap::new(&d, 0.4).unwrap();
        let c = check_lemma_bound(&phi, &x, &y).unwrap();
        assert!(c.holds, "{c:?}");
        let terms = tensors(&phi, &x, &y).unwrap();
        assert!(terms.n1 < 1e-12);
    }

    #[test]
    fn operator_norm_of_so3() {
        let n = 3;
        let basis: Vec<MatrixElement> = [(0, 1), (0, 2), (1, 2)]
            .iter()
            .map(|&(r, s)| MatrixElement::e(n, r, s).scaled(std::f64::consts::FRAC_1_SQRT_2))
            .collect();
        let m1 = LieSubspace::span(n, &basis, DEFAULT_TOL);
        assert!((bracket_operator_norm_on(&m1) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        let abelian = LieSubspace::span(4, &[MatrixElement::e(4, 0, 1), MatrixElement::e(4, 2, 3)], DEFAULT_TOL);
        assert!(bracket_operator_norm_on(&abelian) < 1e-15);
    }

    #[test]
    fn operator_norm_is_conjugation_invariant() {
        let d = dec("su3-su4-spin7", None);
        let g = crate::linalg::random_orthogonal(7, &mut restart_rng(8, 0));
        let t: Triple = d.triple.conjugate(&g);
        let d2 = decompose(&t, DEFAULT_TOL).unwrap();
        assert!((bracket_operator_norm(&d) - bracket_operator_norm(&d2)).abs() < 1e-9);
    }

    #[test]
    fn second_fundamental_form_values() {
        let d = dec("su(p+4)-su3", Some(1));
        let x = d.m1.basis()[0].clone();
        assert!((second_fundamental_form(&d, 2.0, &x, &x).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(second_fundamental_form(&d, 0.0, &x, &x).unwrap(), 0.0);
        let s = d.s.basis()[0].clone();
        assert!(second_fundamental_form(&d, 3.0, &s, &x).unwrap().abs() < 1e-14);
    }

    #[test]
    fn phi_requires_h_below_one() {
        let d = dec("su(p+4)-su3", Some(1));
        assert!(PhiMap::new(&d, 1.0).is_err());
        let phi = PhiMap::new(&d, 0.5).unwrap();
        let x = d.m1.basis()[0].clone();
        assert!((phi.phi(&x).norm() - 2.0).abs() < 1e-12);
        assert_eq!(phi.psi_norm(), 0.5);
    }
}
