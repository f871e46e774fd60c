//! Octonions as a Cayley-Dickson double of the quaternions, their left and
//! right multiplication operators, the derivation algebra `g2`, and the three
//! `spin(7)` copies inside `so(8)`.
//!
//! Basis order is `(1, i, j, k, e, ei, ej, ek)` and the product is
//! `(a1 + e a2)(b1 + e b2) = (a1 b1 - conj(b2) a2) + e (b2 a1 + a2 conj(b1))`.

use std::ops::Mul;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{null_space, svd, LieSubspace, MatrixElement, DEFAULT_TOL};

const IMAGINARY_TOL: f64 = 1e-12;

pub type Quaternion = [f64; 4];

pub fn quat_mul(a: &Quaternion, b: &Quaternion) -> Quaternion {
    let [a0, a1, a2, a3] = *a;
    let [b0, b1, b2, b3] = *b;
    [
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    ]
}

pub fn quat_conj(a: &Quaternion) -> Quaternion {
    [a[0], -a[1], -a[2], -a[3]]
}

/// 4x4 matrix of `x -> q x` on `H = R^4`.
pub fn quat_left(q: &Quaternion) -> DMatrix<f64> {
    DMatrix::from_fn(4, 4, |r, c| {
        let mut e = [0.0; 4];
        e[c] = 1.0;
        quat_mul(q, &e)[r]
    })
}

/// 4x4 matrix of `x -> x q` on `H = R^4`.
pub fn quat_right(q: &Quaternion) -> DMatrix<f64> {
    DMatrix::from_fn(4, 4, |r, c| {
        let mut e = [0.0; 4];
        e[c] = 1.0;
        quat_mul(&e, q)[r]
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Octonion {
    pub coords: [f64; 8],
}

impl Octonion {
    pub const ONE: Self = Self::unit(0);
    pub const I: Self = Self::unit(1);
    pub const J: Self = Self::unit(2);
    pub const K: Self = Self::unit(3);
    pub const EPS: Self = Self::unit(4);

    pub const fn new(coords: [f64; 8]) -> Self {
        Self { coords }
    }

    /// The `idx`-th basis vector.
    pub const fn unit(idx: usize) -> Self {
        let mut coords = [0.0; 8];
        coords[idx] = 1.0;
        Self { coords }
    }

    fn halves(&self) -> (Quaternion, Quaternion) {
        let c = &self.coords;
        ([c[0], c[1], c[2], c[3]], [c[4], c[5], c[6], c[7]])
    }

    fn from_halves(a: Quaternion, b: Quaternion) -> Self {
        Self::new([a[0], a[1], a[2], a[3], b[0], b[1], b[2], b[3]])
    }

    pub fn conj(&self) -> Self {
        let mut c = self.coords.map(|x| -x);
        c[0] = self.coords[0];
        Self::new(c)
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_imaginary(&self) -> bool {
        self.coords[0].abs() <= IMAGINARY_TOL
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coords.map(|x| s * x))
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut c = self.coords;
        for (a, b) in c.iter_mut().zip(o.coords) {
            *a += b;
        }
        Self::new(c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-1.0))
    }
}

impl Mul for Octonion {
    type Output = Octonion;
    fn mul(self, rhs: Octonion) -> Octonion {
        oct_mul(&self, &rhs)
    }
}

/// Cayley-Dickson product.
pub fn oct_mul(a: &Octonion, b: &Octonion) -> Octonion {
    let (a1, a2) = a.halves();
    let (b1, b2) = b.halves();
    let sub = |x: Quaternion, y: Quaternion| [x[0] - y[0], x[1] - y[1], x[2] - y[2], x[3] - y[3]];
    let add = |x: Quaternion, y: Quaternion| [x[0] + y[0], x[1] + y[1], x[2] + y[2], x[3] + y[3]];
    let re = sub(quat_mul(&a1, &b1), quat_mul(&quat_conj(&b2), &a2));
    let im = add(quat_mul(&b2, &a1), quat_mul(&a2, &quat_conj(&b1)));
    Octonion::from_halves(re, im)
}

fn mult_matrix(q: &Octonion, left: bool) -> DMatrix<f64> {
    DMatrix::from_fn(8, 8, |r, c| {
        let e = Octonion::unit(c);
        let v = if left { oct_mul(q, &e) } else { oct_mul(&e, q) };
        v.coords[r]
    })
}

fn check_imaginary(q: &Octonion) -> Result<()> {
    if !q.is_imaginary() {
        return Err(Error::Precondition(format!(
            "multiplication operator of a non-imaginary octonion (real part {}) is not skew",
            q.coords[0]
        )));
    }
    Ok(())
}

/// `L_q : x -> q x` for imaginary `q`.
pub fn left_mult(q: &Octonion) -> Result<MatrixElement> {
    check_imaginary(q)?;
    Ok(MatrixElement::skew_part(&mult_matrix(q, true)))
}

/// `R_q : x -> x q` for imaginary `q`.
pub fn right_mult(q: &Octonion) -> Result<MatrixElement> {
    check_imaginary(q)?;
    Ok(MatrixElement::skew_part(&mult_matrix(q, false)))
}

pub(crate) fn l_unit(idx: usize) -> MatrixElement {
    left_mult(&Octonion::unit(idx)).expect("imaginary unit")
}

pub(crate) fn r_unit(idx: usize) -> MatrixElement {
    right_mult(&Octonion::unit(idx)).expect("imaginary unit")
}

fn apply(a: &MatrixElement, x: &Octonion) -> Octonion {
    let v = a.entries() * DVector::from_column_slice(&x.coords);
    let mut c = [0.0; 8];
    c.copy_from_slice(v.as_slice());
    Octonion::new(c)
}

/// `g2 = {A in so(8) : A(xy) = (Ax)y + x(Ay)}` as a numerical kernel.
pub fn derivation_algebra() -> LieSubspace {
    let so8 = LieSubspace::so(8);
    let mut m = DMatrix::zeros(8 * 8 * 8, so8.dim());
    for (col, a) in so8.basis().iter().enumerate() {
        let mut row = 0;
        for r in 0..8 {
            for s in 0..8 {
                let (er, es) = (Octonion::unit(r), Octonion::unit(s));
                let lhs = apply(a, &oct_mul(&er, &es));
                let rhs = oct_mul(&apply(a, &er), &es).add(&oct_mul(&er, &apply(a, &es)));
                for k in 0..8 {
                    m[(row, col)] = lhs.coords[k] - rhs.coords[k];
                    row += 1;
                }
            }
        }
    }
    so8.combine(&null_space(&m, DEFAULT_TOL))
}

/// `g2` and the twelve subspaces built from `V_L`, `V_R` in `so(8)`.
#[derive(Clone, Debug)]
pub struct TrialityFrame {
    pub g2: LieSubspace,
    pub v_l: LieSubspace,
    pub v_r: LieSubspace,
    pub so7_0: LieSubspace,
    pub so7_plus: LieSubspace,
    pub so7_minus: LieSubspace,
    pub m0: LieSubspace,
    pub s0: LieSubspace,
    pub m_plus: LieSubspace,
    pub s_plus: LieSubspace,
    pub m_minus: LieSubspace,
    pub s_minus: LieSubspace,
}

fn combo_span(a: f64, b: f64) -> LieSubspace {
    let elems: Vec<_> = (1..8).map(|q| l_unit(q).scaled(a) + r_unit(q).scaled(b)).collect();
    LieSubspace::span(8, &elems, DEFAULT_TOL)
}

impl TrialityFrame {
    pub fn build() -> Self {
        let g2 = derivation_algebra();
        let v_l = combo_span(1.0, 0.0);
        let v_r = combo_span(0.0, 1.0);
        let m0 = combo_span(1.0, -1.0);
        let s0 = combo_span(1.0, 1.0);
        let m_plus = combo_span(1.0, 2.0);
        let m_minus = combo_span(2.0, 1.0);
        let so7_0 = g2.sum(&m0, DEFAULT_TOL);
        let so7_plus = g2.sum(&m_plus, DEFAULT_TOL);
        let so7_minus = g2.sum(&m_minus, DEFAULT_TOL);
        Self {
            s_plus: v_l.clone(),
            s_minus: v_r.clone(),
            g2,
            v_l,
            v_r,
            so7_0,
            so7_plus,
            so7_minus,
            m0,
            s0,
            m_plus,
            m_minus,
        }
    }

    /// Writes `X in so(8)` as `A + L_p + R_q` with `A in g2` (direct, non-orthogonal sum).
    pub fn split(&self, x: &MatrixElement) -> Result<(MatrixElement, MatrixElement, MatrixElement)> {
        if x.ambient_dim() != 8 {
            return Err(Error::DimensionMismatch {
                left: 8,
                right: x.ambient_dim(),
            });
        }
        let blocks = [&self.g2, &self.v_l, &self.v_r];
        let mut b = DMatrix::zeros(64, 28);
        let mut col = 0;
        for s in blocks {
            for e in s.basis() {
                b.column_mut(col).copy_from_slice(e.as_slice());
                col += 1;
            }
        }
        let rhs = DVector::from_column_slice(x.as_slice());
        let coef = svd(b, true, true)
            .solve(&rhs, 1e-12)
            .map_err(|e| Error::Internal(e.to_string()))?;
        let c = coef.as_slice();
        Ok((
            self.g2.element(&c[0..14]),
            self.v_l.element(&c[14..21]),
            self.v_r.element(&c[21..28]),
        ))
    }
}

/// The cached frame.
pub fn triality_frame() -> &'static TrialityFrame {
    static FRAME: OnceLock<TrialityFrame> = OnceLock::new();
    FRAME.get_or_init(TrialityFrame::build)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{intersect, principal_angles};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_oct(rng: &mut ChaCha8Rng) -> Octonion {
        Octonion::new(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn multiplication_table() {
        for k in 0..8 {
            assert_eq!(Octonion::ONE * Octonion::unit(k), Octonion::unit(k));
            assert_eq!(Octonion::unit(k) * Octonion::ONE, Octonion::unit(k));
        }
        assert_eq!(Octonion::I * Octonion::J, Octonion::K);
        assert_eq!(Octonion::EPS * Octonion::EPS, Octonion::ONE.scale(-1.0));
    }

    #[test]
    fn composition_and_alternativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let (a, b) = (random_oct(&mut rng), random_oct(&mut rng));
            assert!(((a * b).norm() - a.norm() * b.norm()).abs() < 1e-10);
            assert!((a * (a * b)).sub(&((a * a) * b)).norm() < 1e-10);
            assert!(((b * a) * a).sub(&(b * (a * a))).norm() < 1e-10);
        }
    }

    #[test]
    fn multiplication_operators() {
        let li = l_unit(1);
        let sq = li.entries() * li.entries();
        assert!((sq + DMatrix::identity(8, 8)).amax() < 1e-12);
        assert_eq!(li.entries().column(0).as_slice(), &Octonion::I.coords);
        assert!(left_mult(&Octonion::ONE).is_err());
        assert!(right_mult(&Octonion::new([0.5, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])).is_err());
        assert_eq!(l_unit(3).q(&l_unit(3)), 8.0);
        assert_eq!(l_unit(3).q(&r_unit(3)), -4.0);
        assert_eq!(l_unit(3).q(&r_unit(2)), 0.0);
    }

    #[test]
    fn g2_is_fourteen_dimensional_derivations() {
        let g2 = derivation_algebra();
        assert_eq!(g2.dim(), 14);
        assert!(g2.gram_defect() < 1e-10);
        assert!(g2.closure_residual() < 1e-9);
        for a in g2.basis() {
            assert!(a.entries().column(0).amax() < 1e-10);
        }
    }

    #[test]
    fn left_right_angle_is_pi_over_three() {
        let f = triality_frame();
        let angles = principal_angles(&f.v_l, &f.v_r);
        assert_eq!(angles.len(), 7);
        for a in angles {
            assert!((a - std::f64::consts::FRAC_PI_3).abs() < 1e-9);
        }
    }

    #[test]
    fn so8_is_direct_sum() {
        let f = triality_frame();
        let all = f.g2.sum(&f.v_l, DEFAULT_TOL).sum(&f.v_r, DEFAULT_TOL);
        assert_eq!(all.dim(), 28);
        for (a, b) in [(&f.g2, &f.v_l), (&f.g2, &f.v_r), (&f.v_l, &f.v_r)] {
            assert_eq!(intersect(a, b, DEFAULT_TOL).unwrap().dim(), 0);
        }
    }

    #[test]
    fn split_reconstructs() {
        let f = triality_frame();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = crate::linalg::random_skew(8, &mut rng);
        let (a, l, r) = f.split(&x).unwrap();
        assert!((&(&a + &l) + &r - &x).max_abs() < 1e-10);
        assert!(f.g2.residual(&a) < 1e-10);
        assert!(f.v_l.residual(&l) < 1e-10);
        assert!(f.v_r.residual(&r) < 1e-10);
    }

    #[test]
    fn spin7_copies() {
        let f = triality_frame();
        for so7 in [&f.so7_0, &f.so7_plus, &f.so7_minus] {
            assert_eq!(so7.dim(), 21);
            assert!(so7.closure_residual() < 1e-9);
        }
        for a in f.so7_0.basis() {
            assert!(a.entries().column(0).amax() < 1e-10);
        }
        let pairs = [
            (&f.so7_0, &f.so7_plus),
            (&f.so7_0, &f.so7_minus),
            (&f.so7_plus, &f.so7_minus),
        ];
        for (a, b) in pairs {
            let i = intersect(a, b, DEFAULT_TOL).unwrap();
            assert_eq!(i.dim(), 14);
            assert!(f.g2.containment_residual(&i) < 1e-9);
        }
    }

    #[test]
    fn frame_orthogonality_and_g2_invariance() {
        let f = triality_frame();
        let pairs = [(&f.m0, &f.s0), (&f.m_plus, &f.s_plus), (&f.m_minus, &f.s_minus)];
        for (m, s) in pairs {
            for a in m.basis() {
                for b in s.basis() {
                    assert!(a.q(b).abs() < 1e-10);
                }
            }
            assert!(f.g2.bracket_residual(m, m) < 1e-9);
            assert!(f.g2.bracket_residual(s, s) < 1e-9);
        }
    }

    #[test]
    fn associator_instance() {
        // [L_i, R_j] vanishes on H and equals 2 L_k on eH.
        let c = l_unit(1).bracket(&r_unit(2));
        let lk = l_unit(3).scaled(2.0);
        for col in 0..8 {
            for row in 0..8 {
                let want = if col >= 4 { lk.entries()[(row, col)] } else { 0.0 };
                assert!((c.entries()[(row, col)] - want).abs() < 1e-10);
            }
        }
    }
}
