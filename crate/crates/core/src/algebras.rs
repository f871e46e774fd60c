//! Classical compact Lie algebras realized inside `so(N)`, block embeddings,
//! the isomorphism `su(4) -> so(6)`, the spin(7) copy in `so(8)`, and the
//! quaternionic frame of `g2` built around `so(4) = sp(1) + sp(1)`.
//!
//! Complex entries `a + ib` expand to 2x2 blocks `[[a, -b], [b, a]]`;
//! quaternion entries `q` expand to the 4x4 matrix of left multiplication
//! by `q`, so quaternion scalars act on the right.

use std::sync::OnceLock;

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::linalg::{null_space, symmetric_commutant, LieSubspace, MatrixElement, DEFAULT_TOL};
use crate::octonion::{quat_conj, quat_left, quat_right, triality_frame, Quaternion};

pub type C64 = Complex<f64>;

const Q_ONE: Quaternion = [1.0, 0.0, 0.0, 0.0];
const Q_I: Quaternion = [0.0, 1.0, 0.0, 0.0];
const Q_J: Quaternion = [0.0, 0.0, 1.0, 0.0];
const Q_K: Quaternion = [0.0, 0.0, 0.0, 1.0];
const Q_ZERO: Quaternion = [0.0; 4];

#[derive(Clone, Debug)]
pub struct AlgebraRealization {
    pub name: String,
    pub ambient_dim: usize,
    pub subspace: LieSubspace,
    pub meta: String,
}

impl AlgebraRealization {
    pub fn new(name: impl Into<String>, subspace: LieSubspace, meta: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ambient_dim: subspace.ambient_dim(),
            subspace,
            meta: meta.into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }
}

/// Real `2n x 2n` form of a complex `n x n` matrix.
pub fn realify(z: &DMatrix<C64>) -> DMatrix<f64> {
    let n = z.nrows();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..z.ncols() {
            let (a, b) = (z[(r, c)].re, z[(r, c)].im);
            m[(2 * r, 2 * c)] = a;
            m[(2 * r, 2 * c + 1)] = -b;
            m[(2 * r + 1, 2 * c)] = b;
            m[(2 * r + 1, 2 * c + 1)] = a;
        }
    }
    m
}

/// Inverse of [`realify`] on complex-linear real matrices.
pub fn complexify(m: &DMatrix<f64>) -> DMatrix<C64> {
    let n = m.nrows() / 2;
    DMatrix::from_fn(n, n, |r, c| C64::new(m[(2 * r, 2 * c)], m[(2 * r + 1, 2 * c)]))
}

/// Real `4n x 4n` form of a quaternion `n x n` matrix (rows of entries).
pub fn quat_expand(a: &[Vec<Quaternion>]) -> DMatrix<f64> {
    let n = a.len();
    let mut m = DMatrix::zeros(4 * n, 4 * n);
    for (r, row) in a.iter().enumerate() {
        for (c, q) in row.iter().enumerate() {
            m.view_mut((4 * r, 4 * c), (4, 4)).copy_from(&quat_left(q));
        }
    }
    m
}

/// Block-diagonal right multiplication by `q` on `H^n`.
pub fn quat_right_diag(n: usize, q: &Quaternion) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(4 * n, 4 * n);
    let b = quat_right(q);
    for r in 0..n {
        m.view_mut((4 * r, 4 * r), (4, 4)).copy_from(&b);
    }
    m
}

fn complex_unit(n: usize, entries: &[(usize, usize, C64)]) -> MatrixElement {
    let mut z = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for &(r, c, v) in entries {
        z[(r, c)] = v;
    }
    MatrixElement::skew_part(&realify(&z))
}

/// Skew-Hermitian basis on the complex coordinates `idx` of `C^n`, realified.
pub fn skew_hermitian_basis(n: usize, idx: &[usize], traceless: bool) -> Vec<MatrixElement> {
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let mut out = Vec::new();
    for a in 0..idx.len() {
        for b in (a + 1)..idx.len() {
            let (p, q) = (idx[a], idx[b]);
            out.push(complex_unit(n, &[(p, q, one), (q, p, -one)]));
            out.push(complex_unit(n, &[(p, q, i), (q, p, i)]));
        }
    }
    if traceless {
        for w in idx.windows(2) {
            out.push(complex_unit(n, &[(w[0], w[0], i), (w[1], w[1], -i)]));
        }
    } else {
        for &p in idx {
            out.push(complex_unit(n, &[(p, p, i)]));
        }
    }
    out
}

fn check_positive(n: usize, what: &str) -> Result<()> {
    if n == 0 {
        return Err(Error::Precondition(format!("{what}(0) is not defined")));
    }
    Ok(())
}

pub fn make_so(n: usize) -> Result<AlgebraRealization> {
    check_positive(n, "so")?;
    Ok(AlgebraRealization::new(
        format!("so({n})"),
        LieSubspace::so(n),
        format!("span of E_rs in so({n})"),
    ))
}

pub fn make_su(n: usize) -> Result<AlgebraRealization> {
    check_positive(n, "su")?;
    let idx: Vec<usize> = (0..n).collect();
    let basis = skew_hermitian_basis(n, &idx, true);
    Ok(AlgebraRealization::new(
        format!("su({n})"),
        LieSubspace::span(2 * n, &basis, DEFAULT_TOL),
        format!("traceless skew-Hermitian {n}x{n}, realified in so({})", 2 * n),
    ))
}

pub fn make_u(n: usize) -> Result<AlgebraRealization> {
    check_positive(n, "u")?;
    let idx: Vec<usize> = (0..n).collect();
    let basis = skew_hermitian_basis(n, &idx, false);
    Ok(AlgebraRealization::new(
        format!("u({n})"),
        LieSubspace::span(2 * n, &basis, DEFAULT_TOL),
        format!("skew-Hermitian {n}x{n}, realified in so({})", 2 * n),
    ))
}

/// Quaternionic skew-Hermitian basis on the coordinates `idx` of `H^n`, expanded.
pub fn sp_basis(n: usize, idx: &[usize]) -> Vec<MatrixElement> {
    let mut out = Vec::new();
    let units = [Q_ONE, Q_I, Q_J, Q_K];
    let zero_rows = || vec![vec![Q_ZERO; n]; n];
    for a in 0..idx.len() {
        for b in (a + 1)..idx.len() {
            for q in &units {
                let mut z = zero_rows();
                z[idx[a]][idx[b]] = *q;
                z[idx[b]][idx[a]] = quat_conj(q).map(|x| -x);
                out.push(MatrixElement::skew_part(&quat_expand(&z)));
            }
        }
        for q in &units[1..] {
            let mut z = zero_rows();
            z[idx[a]][idx[a]] = *q;
            out.push(MatrixElement::skew_part(&quat_expand(&z)));
        }
    }
    out
}

pub fn make_sp(n: usize) -> Result<AlgebraRealization> {
    check_positive(n, "sp")?;
    let idx: Vec<usize> = (0..n).collect();
    Ok(AlgebraRealization::new(
        format!("sp({n})"),
        LieSubspace::span(4 * n, &sp_basis(n, &idx), DEFAULT_TOL),
        format!("quaternionic skew-Hermitian {n}x{n}, expanded in so({})", 4 * n),
    ))
}

/// Pads every basis element into `so(ambient_n)` at diagonal `offset`.
pub fn embed_block(inner: &AlgebraRealization, ambient_n: usize, offset: usize) -> Result<AlgebraRealization> {
    let subspace = inner.subspace.embed(ambient_n, offset)?;
    Ok(AlgebraRealization::new(
        format!("{}<so({ambient_n})", inner.name),
        subspace,
        format!("{} on block {}..{}", inner.meta, offset, offset + inner.ambient_dim),
    ))
}

/// The isomorphism `su(4) -> so(6)` given by the action on the real form of `Λ²C⁴`.
#[derive(Clone, Debug)]
pub struct Su4ToSo6 {
    /// Orthonormal basis (12 x 6) of the real form inside realified `Λ²C⁴`.
    real_form: DMatrix<f64>,
}

const PAIRS4: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn perm_sign(p: [usize; 4]) -> f64 {
    let mut inv = 0;
    for a in 0..4 {
        for b in (a + 1)..4 {
            if p[a] > p[b] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl Su4ToSo6 {
    fn build() -> Self {
        // tau(e_a ^ e_b) = sign(a b c d) conj(.) e_c ^ e_d, antilinear; realified as 12 x 12
        let mut tau = DMatrix::zeros(12, 12);
        for (src, &(a, b)) in PAIRS4.iter().enumerate() {
            let rest: Vec<usize> = (0..4).filter(|x| *x != a && *x != b).collect();
            let sign = perm_sign([a, b, rest[0], rest[1]]);
            let dst = PAIRS4.iter().position(|&p| p == (rest[0], rest[1])).expect("pair");
            tau[(2 * dst, 2 * src)] = sign;
            tau[(2 * dst + 1, 2 * src + 1)] = -sign;
        }
        let fixed = null_space(&(tau - DMatrix::identity(12, 12)), DEFAULT_TOL);
        assert_eq!(fixed.ncols(), 6, "real form of the exterior square");
        Self { real_form: fixed }
    }

    /// Induced action of a complex 4x4 matrix on `Λ²C⁴` (basis `PAIRS4`).
    fn wedge_action(z: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = DMatrix::from_element(6, 6, C64::new(0.0, 0.0));
        for (col, &(a, b)) in PAIRS4.iter().enumerate() {
            // Z e_a ^ e_b + e_a ^ Z e_b
            for r in 0..4 {
                for (first, second, coef) in [(r, b, z[(r, a)]), (a, r, z[(r, b)])] {
                    if first == second {
                        continue;
                    }
                    let (p, sign) = if first < second {
                        ((first, second), 1.0)
                    } else {
                        ((second, first), -1.0)
                    };
                    let row = PAIRS4.iter().position(|&q| q == p).expect("pair");
                    out[(row, col)] += coef * sign;
                }
            }
        }
        out
    }

    /// Image of a realified `su(4)` element (ambient 8) in `so(6)`.
    pub fn apply(&self, x: &MatrixElement) -> Result<MatrixElement> {
        if x.ambient_dim() != 8 {
            return Err(Error::DimensionMismatch {
                left: 8,
                right: x.ambient_dim(),
            });
        }
        let w = realify(&Self::wedge_action(&complexify(x.entries())));
        let m = self.real_form.transpose() * w * &self.real_form;
        Ok(MatrixElement::skew_part(&m))
    }

    pub fn apply_subspace(&self, u: &LieSubspace) -> Result<LieSubspace> {
        let imgs = u.basis().iter().map(|b| self.apply(b)).collect::<Result<Vec<_>>>()?;
        Ok(LieSubspace::span(6, &imgs, DEFAULT_TOL))
    }
}

/// `su(4)` in `so(8)` together with its isomorphic image in `so(6)`.
pub fn su4_as_so6() -> (AlgebraRealization, Su4ToSo6) {
    let map = Su4ToSo6::build();
    let su4 = make_su(4).expect("n > 0");
    let image = map.apply_subspace(&su4.subspace).expect("ambient 8");
    (
        AlgebraRealization::new(
            "su(4)<so(6)",
            image,
            "su(4) acting on the real form of the exterior square of C^4",
        ),
        map,
    )
}

/// Antilinear quaternionic structure on `C^4` with coordinates `(e1, f1, e2, f2)`:
/// `e1 -> e2 -> -e1`, `f1 -> f2 -> -f1`, realified (ambient 8). `offsets` relocates
/// the four coordinates inside a larger `C^n`.
pub fn quaternionic_structure(n: usize, coords: [usize; 4]) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    let mut set = |src: usize, dst: usize, sign: f64| {
        j[(2 * dst, 2 * src)] = sign;
        j[(2 * dst + 1, 2 * src + 1)] = -sign;
    };
    let [e1, f1, e2, f2] = coords;
    set(e1, e2, 1.0);
    set(e2, e1, -1.0);
    set(f1, f2, 1.0);
    set(f2, f1, -1.0);
    j
}

/// `sp(2)` as the centralizer of the quaternionic structure inside `su(4)`
/// on the complex coordinates `coords` of `C^n` (realified, ambient `2n`).
pub fn sp2_in_su4(n: usize, coords: [usize; 4]) -> LieSubspace {
    let su4 = LieSubspace::span(2 * n, &skew_hermitian_basis(n, &coords, true), DEFAULT_TOL);
    let j = quaternionic_structure(n, coords);
    su4.kernel_of(
        |a| {
            let c = a.entries() * &j - &j * a.entries();
            c.as_slice().to_vec()
        },
        DEFAULT_TOL,
    )
}

pub fn spin7_in_so8() -> AlgebraRealization {
    AlgebraRealization::new(
        "spin7+<so(8)",
        triality_frame().so7_plus.clone(),
        "g2 + {L_q + 2 R_q}: spin representation copy of spin(7)",
    )
}

/// Standard triple `(A0, A+, A-)` of a 3-dim simple subalgebra:
/// `[A0, A+] = 2 A-`, `[A0, A-] = -2 A+`, `[A+, A-] = 2 A0`.
pub fn standard_triple(su2: &LieSubspace) -> (MatrixElement, MatrixElement, MatrixElement) {
    assert_eq!(su2.dim(), 3, "standard triple needs a 3-dim algebra");
    let b = su2.basis();
    let d = su2.ad_matrix(&b[0]);
    let omega = (d.norm_squared() / 2.0).sqrt();
    let a0 = b[0].scaled(2.0 / omega);
    let ap = b[1].clone();
    let am = a0.bracket(&ap).scaled(0.5);
    let c = ap.bracket(&am).q(&a0) / a0.norm_sq();
    let ap = ap.scaled((2.0 / c).sqrt());
    let am = a0.bracket(&ap).scaled(0.5);
    (a0, ap, am)
}

/// `g2 = (sp(1)_3 + sp(1)_1) + H^2`: the quaternionic model inside `sp(2) ⊂ so(8)`
/// and its realization inside `g2 ⊂ so(7)`, matched by an intertwiner.
#[derive(Clone, Debug)]
pub struct G2Frame {
    /// Model generators of `sp(1)_3` acting on `H^2 = R^8`.
    pub e0: MatrixElement,
    pub e_plus: MatrixElement,
    pub e_minus: MatrixElement,
    /// Model `sp(1)_1`: right multiplication on `H^2`.
    pub sp1_1: LieSubspace,
    /// Realized `g2 ⊂ so(7)` (octonion `g2` with the real unit dropped).
    pub g2: LieSubspace,
    /// Stabilizer of the quaternions `Im H ⊂ Im O`, `so(4) = su(2)_3 + su(2)_1`.
    pub so4: LieSubspace,
    pub su2_3: LieSubspace,
    pub su2_1: LieSubspace,
    /// `g2 ⊖ so(4)`, 8-dim.
    pub h2: LieSubspace,
    /// Realized images of `E0, E+, E-`.
    pub a0: MatrixElement,
    pub a_plus: MatrixElement,
    pub a_minus: MatrixElement,
    /// Realized standard triple of `su(2)_1`.
    pub b0: MatrixElement,
    pub b_plus: MatrixElement,
    pub b_minus: MatrixElement,
    /// Elements of `h2` matching the model vectors `(1, 0)` and `(0, 1)`.
    pub e1: MatrixElement,
    pub e2: MatrixElement,
    /// `[e1, e2] = lambda * A+`.
    pub lambda: f64,
    /// Element of `su(2)_1` acting on `h2` like right multiplication by `i`.
    pub s: MatrixElement,
    /// Intertwiner from `h2` coordinates to `R^8`, largest singular value 1.
    pub psi: DMatrix<f64>,
}

fn model_triple() -> (MatrixElement, MatrixElement, MatrixElement) {
    let s3 = 3f64.sqrt();
    let sc = |q: Quaternion, c: f64| q.map(|x| c * x);
    let e0 = quat_expand(&[vec![sc(Q_I, 3.0), Q_ZERO], vec![Q_ZERO, Q_I]]);
    let ep = quat_expand(&[vec![Q_ZERO, sc(Q_ONE, s3)], vec![sc(Q_ONE, -s3), sc(Q_J, 2.0)]]);
    let em = quat_expand(&[vec![Q_ZERO, sc(Q_I, s3)], vec![sc(Q_I, s3), sc(Q_K, 2.0)]]);
    (
        MatrixElement::skew_part(&e0),
        MatrixElement::skew_part(&ep),
        MatrixElement::skew_part(&em),
    )
}

/// Splits a semisimple subalgebra into simple ideals via a random element of its centroid.
fn split_ideals(alg: &LieSubspace, expected: usize) -> Vec<LieSubspace> {
    let actions: Vec<DMatrix<f64>> = alg.basis().iter().map(|b| alg.ad_matrix(b)).collect();
    let ops = symmetric_commutant(&actions, alg.dim(), DEFAULT_TOL);
    assert_eq!(ops.len(), expected, "centroid dimension");
    // fixed irrational weights keep the construction deterministic
    let weights = [0.3, 1.7, 0.77, 1.31];
    let mut s = DMatrix::zeros(alg.dim(), alg.dim());
    for (w, o) in weights.iter().zip(&ops) {
        s += o * *w;
    }
    let eig = s.symmetric_eigen();
    let mut order: Vec<usize> = (0..alg.dim()).collect();
    order.sort_by(|a, b| eig.eigenvalues[*a].total_cmp(&eig.eigenvalues[*b]));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match groups.last_mut() {
            Some(g) if (eig.eigenvalues[i] - eig.eigenvalues[g[0]]).abs() < 1e-6 => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let mut coeffs = DMatrix::zeros(alg.dim(), g.len());
            for (k, &i) in g.iter().enumerate() {
                coeffs.column_mut(k).copy_from(&eig.eigenvectors.column(i));
            }
            alg.combine(&coeffs)
        })
        .collect()
}

fn spectrum_ratio(ideal: &LieSubspace, h2: &LieSubspace) -> f64 {
    let d = h2.ad_matrix(&ideal.basis()[0]);
    let ev = (d.transpose() * &d).symmetric_eigen().eigenvalues;
    let max = ev.max().sqrt();
    let min = ev.min().sqrt();
    max / min
}

impl G2Frame {
    fn build() -> Self {
        let (e0, e_plus, e_minus) = model_triple();
        let rq: Vec<MatrixElement> = [Q_I, Q_J, Q_K]
            .iter()
            .map(|q| MatrixElement::skew_part(&quat_right_diag(2, q)))
            .collect();
        let sp1_1 = LieSubspace::span(8, &rq, DEFAULT_TOL);

        let g2_8 = &triality_frame().g2;
        let g2_7: Vec<MatrixElement> = g2_8
            .basis()
            .iter()
            .map(|a| MatrixElement::skew_part(&a.entries().view((1, 1), (7, 7)).into_owned()))
            .collect();
        let g2 = LieSubspace::span(7, &g2_7, DEFAULT_TOL);
        let so4 = g2.kernel_of(
            |a| {
                let v = a.entries().view((3, 0), (4, 3));
                v.iter().copied().collect()
            },
            DEFAULT_TOL,
        );
        let h2 = so4.complement_in(&g2, DEFAULT_TOL);
        let ideals = split_ideals(&so4, 2);
        let (su2_3, su2_1) = if spectrum_ratio(&ideals[0], &h2) > 2.0 {
            (ideals[0].clone(), ideals[1].clone())
        } else {
            (ideals[1].clone(), ideals[0].clone())
        };
        let (a0, a_plus, a_minus) = standard_triple(&su2_3);
        let (b0, b_plus, b_minus) = standard_triple(&su2_1);
        let (m0, m_plus, m_minus) = standard_triple(&sp1_1);

        let pairs = [
            (&a0, &e0),
            (&a_plus, &e_plus),
            (&a_minus, &e_minus),
            (&b0, &m0),
            (&b_plus, &m_plus),
            (&b_minus, &m_minus),
        ];
        // Psi D - M Psi = 0, column-major vec(Psi)
        let eye = DMatrix::<f64>::identity(8, 8);
        let mut sys = DMatrix::zeros(64 * pairs.len(), 64);
        for (k, (real, model)) in pairs.iter().enumerate() {
            let d = h2.ad_matrix(real);
            let block = d.transpose().kronecker(&eye) - eye.kronecker(model.entries());
            sys.view_mut((64 * k, 0), (64, 64)).copy_from(&block);
        }
        let kernel = null_space(&sys, 1e-9);
        assert_eq!(kernel.ncols(), 1, "intertwiner must be unique up to scale");
        let mut psi = DMatrix::from_column_slice(8, 8, kernel.column(0).as_slice());
        let smax = crate::linalg::svd(psi.clone(), false, false).singular_values.max();
        let pivot = psi
            .iter()
            .copied()
            .fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        psi *= pivot.signum() / smax;
        let inv = psi.clone().try_inverse().expect("conformal intertwiner is invertible");
        let e1 = h2.element(inv.column(0).as_slice());
        let e2 = h2.element(inv.column(4).as_slice());
        let lambda = e1.bracket(&e2).q(&a_plus) / a_plus.norm_sq();

        let target = &rq[0];
        let model_basis = [&m0, &m_plus, &m_minus];
        let gram = DMatrix::from_fn(3, 3, |r, c| model_basis[r].q(model_basis[c]));
        let rhs = nalgebra::DVector::from_fn(3, |r, _| model_basis[r].q(target));
        let coef = gram.lu().solve(&rhs).expect("model triple is independent");
        let s = b0.scaled(coef[0]) + b_plus.scaled(coef[1]) + b_minus.scaled(coef[2]);

        Self {
            e0,
            e_plus,
            e_minus,
            sp1_1,
            g2,
            so4,
            su2_3,
            su2_1,
            h2,
            a0,
            a_plus,
            a_minus,
            b0,
            b_plus,
            b_minus,
            e1,
            e2,
            lambda,
            s,
            psi,
        }
    }
}

/// The cached quaternionic frame of `g2`.
pub fn g2_sp2_frame() -> &'static G2Frame {
    static FRAME: OnceLock<G2Frame> = OnceLock::new();
    FRAME.get_or_init(G2Frame::build)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{intersect, random_unit_vector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn closed_and_sized(a: &AlgebraRealization, dim: usize) {
        assert_eq!(a.dim(), dim, "{}", a.name);
        assert!(a.subspace.closure_residual() < 1e-9, "{}", a.name);
        assert!(a.subspace.gram_defect() < 1e-10, "{}", a.name);
    }

    #[test]
    fn classical_dimensions() {
        for n in 1..=5 {
            closed_and_sized(&make_so(n).unwrap(), n * (n - 1) / 2);
            closed_and_sized(&make_su(n).unwrap(), n * n - 1);
            closed_and_sized(&make_u(n).unwrap(), n * n);
        }
        for n in 1..=3 {
            closed_and_sized(&make_sp(n).unwrap(), n * (2 * n + 1));
        }
        assert!(make_so(0).is_err());
        assert!(make_sp(0).is_err());
    }

    #[test]
    fn su2_inside_u2() {
        let su2 = make_su(2).unwrap().subspace;
        let u2 = make_u(2).unwrap().subspace;
        assert_eq!(intersect(&su2, &u2, DEFAULT_TOL).unwrap().dim(), 3);
        let perp = su2.complement_in(&u2, DEFAULT_TOL);
        assert_eq!(perp.dim(), 1);
        let j = MatrixElement::skew_part(&realify(&DMatrix::from_diagonal_element(2, 2, C64::new(0.0, 1.0))));
        assert!(perp.contains(&j, 1e-10));
    }

    #[test]
    fn embedding_preserves_q_and_closure() {
        let so3 = make_so(3).unwrap();
        let big = embed_block(&so3, 5, 0).unwrap();
        assert_eq!(big.dim(), 3);
        assert!(big.subspace.closure_residual() < 1e-12);
        let x = &so3.subspace.basis()[0];
        let xe = x.embed(5, 0).unwrap();
        assert_eq!(x.q(x), xe.q(&xe));
        assert!(embed_block(&so3, 5, 3).is_err());
        let so8 = make_so(8).unwrap();
        let so12 = embed_block(&so8, 12, 0).unwrap();
        assert!(so12
            .subspace
            .basis()
            .iter()
            .all(|b| b.entries().view((8, 0), (4, 12)).amax() == 0.0));
    }

    #[test]
    fn su4_map_is_an_isomorphism() {
        let (img, map) = su4_as_so6();
        assert_eq!(img.dim(), 15);
        assert!(img.subspace.closure_residual() < 1e-9);
        let su4 = make_su(4).unwrap().subspace;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let x = su4.element(&random_unit_vector(15, &mut rng));
            let y = su4.element(&random_unit_vector(15, &mut rng));
            let lhs = map.apply(&x.bracket(&y)).unwrap();
            let rhs = map.apply(&x).unwrap().bracket(&map.apply(&y).unwrap());
            assert!((lhs - rhs).max_abs() < 1e-9);
        }
        let su3 = LieSubspace::span(8, &skew_hermitian_basis(4, &[0, 1, 2], true), DEFAULT_TOL);
        assert_eq!(map.apply_subspace(&su3).unwrap().dim(), 8);
        let sp2 = sp2_in_su4(4, [0, 1, 2, 3]);
        assert_eq!(sp2.dim(), 10);
        let sp2_img = map.apply_subspace(&sp2).unwrap();
        assert_eq!(sp2_img.dim(), 10);
        assert!(sp2_img.closure_residual() < 1e-9);
    }

    #[test]
    fn spin7_is_transitive_on_s7() {
        let spin7 = spin7_in_so8();
        assert_eq!(spin7.dim(), 21);
        assert_eq!(
            intersect(&spin7.subspace, &triality_frame().g2, DEFAULT_TOL)
                .unwrap()
                .dim(),
            14
        );
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v = nalgebra::DVector::from_vec(random_unit_vector(8, &mut rng));
        let tangent = DMatrix::from_fn(8, 21, |r, c| (spin7.subspace.basis()[c].entries() * &v)[r]);
        assert_eq!(crate::linalg::range_basis(&tangent, DEFAULT_TOL).ncols(), 7);
    }

    #[test]
    fn model_bracket_relations() {
        let f = g2_sp2_frame();
        assert!((f.e0.bracket(&f.e_plus) - f.e_minus.scaled(2.0)).max_abs() < 1e-10);
        assert!((f.e0.bracket(&f.e_minus) + f.e_plus.scaled(2.0)).max_abs() < 1e-10);
        assert!((f.e_plus.bracket(&f.e_minus) - f.e0.scaled(2.0)).max_abs() < 1e-10);
        for b in f.sp1_1.basis() {
            for e in [&f.e0, &f.e_plus, &f.e_minus] {
                assert!(b.bracket(e).max_abs() < 1e-10);
            }
        }
    }

    #[test]
    fn realized_frame() {
        let f = g2_sp2_frame();
        assert_eq!(f.g2.dim(), 14);
        assert_eq!(f.so4.dim(), 6);
        assert_eq!(f.h2.dim(), 8);
        assert_eq!((f.su2_3.dim(), f.su2_1.dim()), (3, 3));
        assert!(f.su2_3.bracket_residual(&f.su2_1, &LieSubspace::zero(7)) < 1e-10);
        assert!((f.a0.bracket(&f.a_plus) - f.a_minus.scaled(2.0)).max_abs() < 1e-10);
        assert!((f.a_plus.bracket(&f.a_minus) - f.a0.scaled(2.0)).max_abs() < 1e-10);
        let sv = crate::linalg::svd(f.psi.clone(), false, false).singular_values;
        assert!((sv.max() - sv.min()).abs() < 1e-9, "intertwiner is conformal");
        assert!(f.lambda.abs() > 1e-3);
        let resid = f.e1.bracket(&f.e2) - f.a_plus.scaled(f.lambda);
        assert!(resid.max_abs() < 1e-10);
        let c = (&f.a0 - &f.s.scaled(3.0)).bracket(&f.e1);
        assert!(c.max_abs() < 1e-10);
    }
}
