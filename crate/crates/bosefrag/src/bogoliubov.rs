//! Real Bogoliubov transforms: generator exponentials and logarithms,
//! substitution into ladder-operator polynomials, Bloch-Messiah
//! factorization, and diagonalization of linear-plus-quadratic Hamiltonians.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{BosonPolynomial, Monomial};
use crate::linalg::{expm, frobenius, givens_decompose, logm, norm1, GivensRotation};
use crate::{Error, Result};

/// Anti-Hermitian quadratic generator X = Σ α b†b + ½(β b†b† + β bb) plus a
/// displacement γ. Storage holds the strict lower triangle of α and the
/// lower triangle of β, so αᵀ = -α and βᵀ = β hold exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovGenerator {
    n: usize,
    alpha_sl: Vec<f64>,
    beta_l: Vec<f64>,
    gamma: Vec<f64>,
}

pub fn strict_lower_len(n: usize) -> usize {
    n * (n - 1) / 2
}

pub fn lower_len(n: usize) -> usize {
    n * (n + 1) / 2
}

impl BogoliubovGenerator {
    pub fn zero(n: usize) -> Self {
        BogoliubovGenerator {
            n,
            alpha_sl: vec![0.0; strict_lower_len(n)],
            beta_l: vec![0.0; lower_len(n)],
            gamma: vec![0.0; n],
        }
    }

    /// Build from packed triangles: α strict lower (row-major, i > j),
    /// β lower including diagonal (row-major, i ≥ j), γ length n.
    pub fn from_triangles(n: usize, alpha_sl: &[f64], beta_l: &[f64], gamma: &[f64]) -> Result<Self> {
        if alpha_sl.len() != strict_lower_len(n)
            || beta_l.len() != lower_len(n)
            || gamma.len() != n
        {
            return Err(Error::DimensionMismatch(
                "generator triangle lengths do not match the mode count".into(),
            ));
        }
        Ok(BogoliubovGenerator {
            n,
            alpha_sl: alpha_sl.to_vec(),
            beta_l: beta_l.to_vec(),
            gamma: gamma.to_vec(),
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n
    }

    pub fn alpha_strict_lower(&self) -> &[f64] {
        &self.alpha_sl
    }

    pub fn beta_lower(&self) -> &[f64] {
        &self.beta_l
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    /// Full antisymmetric α.
    pub fn alpha(&self) -> DMatrix<f64> {
        let mut m = DMatrix::<f64>::zeros(self.n, self.n);
        let mut k = 0;
        for i in 0..self.n {
            for j in 0..i {
                m[(i, j)] = self.alpha_sl[k];
                m[(j, i)] = -self.alpha_sl[k];
                k += 1;
            }
        }
        m
    }

    /// Full symmetric β.
    pub fn beta(&self) -> DMatrix<f64> {
        let mut m = DMatrix::<f64>::zeros(self.n, self.n);
        let mut k = 0;
        for i in 0..self.n {
            for j in 0..=i {
                m[(i, j)] = self.beta_l[k];
                m[(j, i)] = self.beta_l[k];
                k += 1;
            }
        }
        m
    }

    /// Real-case generator matrix θ = [[α, β], [β, α]].
    pub fn theta(&self) -> DMatrix<f64> {
        let n = self.n;
        let a = self.alpha();
        let b = self.beta();
        let mut t = DMatrix::<f64>::zeros(2 * n, 2 * n);
        t.view_mut((0, 0), (n, n)).copy_from(&a);
        t.view_mut((0, n), (n, n)).copy_from(&b);
        t.view_mut((n, 0), (n, n)).copy_from(&b);
        t.view_mut((n, n), (n, n)).copy_from(&a);
        t
    }
}

/// Real Bogoliubov transform b̃ = U b - V b† + γ with the symplectic
/// constraints U Vᵀ = V Uᵀ and U Uᵀ - V Vᵀ = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovTransform {
    u: DMatrix<f64>,
    v: DMatrix<f64>,
    gamma: DVector<f64>,
}

impl BogoliubovTransform {
    pub fn identity(n: usize) -> Self {
        BogoliubovTransform {
            u: DMatrix::identity(n, n),
            v: DMatrix::zeros(n, n),
            gamma: DVector::zeros(n),
        }
    }

    pub fn new(u: DMatrix<f64>, v: DMatrix<f64>, gamma: DVector<f64>) -> Result<Self> {
        let n = u.nrows();
        if u.ncols() != n || v.nrows() != n || v.ncols() != n || gamma.len() != n {
            return Err(Error::DimensionMismatch(
                "transform blocks must be square with matching displacement".into(),
            ));
        }
        let t = BogoliubovTransform { u, v, gamma };
        let res = t.symplectic_residual();
        // Hyperbolic blocks grow as cosh of the generator norm; scale the
        // tolerance so legitimate large squeezes are not rejected.
        let scale = (1.0 + norm1(&t.u) + norm1(&t.v)).powi(2);
        if !res.is_finite() || res > 1e-10 * scale {
            return Err(Error::NotSymplectic(res));
        }
        Ok(t)
    }

    pub fn n_modes(&self) -> usize {
        self.u.nrows()
    }

    pub fn u(&self) -> &DMatrix<f64> {
        &self.u
    }

    pub fn v(&self) -> &DMatrix<f64> {
        &self.v
    }

    pub fn gamma(&self) -> &DVector<f64> {
        &self.gamma
    }

    /// Frobenius residual of the symplectic constraints.
    pub fn symplectic_residual(&self) -> f64 {
        let n = self.n_modes();
        let r1 = &self.u * self.v.transpose() - &self.v * self.u.transpose();
        let r2 = &self.u * self.u.transpose() - &self.v * self.v.transpose()
            - DMatrix::<f64>::identity(n, n);
        frobenius(&r1).max(frobenius(&r2))
    }

    /// Symplectic matrix M = [[U, -V], [-V, U]].
    pub fn m_matrix(&self) -> DMatrix<f64> {
        let n = self.n_modes();
        let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&self.u);
        m.view_mut((0, n), (n, n)).copy_from(&(-&self.v));
        m.view_mut((n, 0), (n, n)).copy_from(&(-&self.v));
        m.view_mut((n, n), (n, n)).copy_from(&self.u);
        m
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        let n = self.n_modes();
        frobenius(&(&self.u - DMatrix::<f64>::identity(n, n))) <= tol
            && frobenius(&self.v) <= tol
            && self.gamma.amax() <= tol
    }
}

/// Exponentiate a generator into the transform it produces: M = e^θ with
/// U = M[0:N,0:N], V = -M[0:N,N:2N]; the displacement passes through.
pub fn exp_generator(g: &BogoliubovGenerator) -> Result<BogoliubovTransform> {
    let n = g.n_modes();
    let m = expm(&g.theta())?;
    let u = m.view((0, 0), (n, n)).into_owned();
    let v = -m.view((0, n), (n, n)).into_owned();
    BogoliubovTransform::new(u, v, DVector::from_column_slice(g.gamma()))
}

/// Principal-branch generator of a transform: θ = log M.
pub fn log_transform(t: &BogoliubovTransform) -> Result<BogoliubovGenerator> {
    let n = t.n_modes();
    let theta = logm(&t.m_matrix())?;
    let a_block = theta.view((0, 0), (n, n)).into_owned();
    let b_block = theta.view((0, n), (n, n)).into_owned();
    // The log of a symplectic M has exactly the [[α, β], [β, α]] structure
    // with α antisymmetric and β symmetric; deviations signal a bad input.
    let scale = norm1(&theta).max(1.0);
    let asym = frobenius(&(&a_block + a_block.transpose()));
    let bsym = frobenius(&(&b_block - b_block.transpose()));
    let b21 = theta.view((n, 0), (n, n)).into_owned();
    let a22 = theta.view((n, n), (n, n)).into_owned();
    let cross = frobenius(&(&b21 - &b_block)).max(frobenius(&(&a22 - &a_block)));
    if asym.max(bsym).max(cross) > 1e-7 * scale {
        return Err(Error::NotSymplectic(asym.max(bsym).max(cross)));
    }
    let mut alpha_sl = Vec::with_capacity(strict_lower_len(n));
    for i in 0..n {
        for j in 0..i {
            alpha_sl.push(0.5 * (a_block[(i, j)] - a_block[(j, i)]));
        }
    }
    let mut beta_l = Vec::with_capacity(lower_len(n));
    for i in 0..n {
        for j in 0..=i {
            beta_l.push(0.5 * (b_block[(i, j)] + b_block[(j, i)]));
        }
    }
    let gamma: Vec<f64> = t.gamma().iter().copied().collect();
    BogoliubovGenerator::from_triangles(n, &alpha_sl, &beta_l, &gamma)
}

/// Substitute b̃_p = Σ_q U_pq b_q - V_pq b†_q + γ_p (and its adjoint) into a
/// polynomial of degree ≤ 4 and normal-order the result.
pub fn apply_transform(t: &BogoliubovTransform, p: &BosonPolynomial) -> Result<BosonPolynomial> {
    let n = t.n_modes();
    if p.n_modes() != n {
        return Err(Error::ModeCountMismatch(p.n_modes(), n));
    }
    if p.degree() > 4 {
        return Err(Error::DegreeTooHigh {
            got: p.degree(),
            max: 4,
        });
    }
    // Transformed annihilation and creation operators as linear polynomials.
    let mut bt: Vec<BosonPolynomial> = Vec::with_capacity(n);
    for row in 0..n {
        let mut lp = BosonPolynomial::constant(n, t.gamma()[row]);
        for col in 0..n {
            let a = BosonPolynomial::ladder(n, crate::algebra::LadderOp::Annihilate(col))?;
            let c = BosonPolynomial::ladder(n, crate::algebra::LadderOp::Create(col))?;
            lp = lp.add(&a.scaled(t.u()[(row, col)]))?;
            lp = lp.add(&c.scaled(-t.v()[(row, col)]))?;
        }
        bt.push(lp);
    }
    let btd: Vec<BosonPolynomial> = bt.iter().map(|lp| lp.adjoint()).collect();

    let mut out = BosonPolynomial::zero(n);
    for (m, c) in p.terms() {
        let mut prod = BosonPolynomial::identity(n);
        for mode in 0..n {
            for _ in 0..m.creation(mode) {
                prod = prod.mul(&btd[mode])?;
            }
        }
        for mode in 0..n {
            for _ in 0..m.annihilation(mode) {
                prod = prod.mul(&bt[mode])?;
            }
        }
        out = out.add(&prod.scaled(c))?;
    }
    Ok(out)
}

/// Bloch-Messiah factorization of a real symplectic transform:
/// U = W diag(cosh ζ) Xᵀ and V = -W diag(sinh ζ) Xᵀ with W, X orthogonal.
#[derive(Debug, Clone)]
pub struct BlochMessiah {
    pub w: DMatrix<f64>,
    pub x: DMatrix<f64>,
    pub zeta: DVector<f64>,
    /// Givens factorization Xᵀ = Π rotations (det X forced to +1).
    pub x_rotations: Vec<GivensRotation>,
    /// Givens factorization W = Π rotations · parity.
    pub w_rotations: Vec<GivensRotation>,
    pub w_parity: Option<usize>,
}

impl BlochMessiah {
    pub fn u_d(&self) -> DVector<f64> {
        self.zeta.map(f64::cosh)
    }

    /// Signed squeeze singular values: V_D = -sinh ζ.
    pub fn v_d(&self) -> DVector<f64> {
        self.zeta.map(|z| -z.sinh())
    }

    pub fn reconstruct_u(&self) -> DMatrix<f64> {
        &self.w * DMatrix::from_diagonal(&self.zeta.map(f64::cosh)) * self.x.transpose()
    }

    pub fn reconstruct_v(&self) -> DMatrix<f64> {
        -&self.w * DMatrix::from_diagonal(&self.zeta.map(f64::sinh)) * self.x.transpose()
    }
}

/// SVD-based Bloch-Messiah with degeneracy-consistent pairing: degenerate
/// singular subspaces of U are rotated so the V block diagonalizes jointly.
pub fn bloch_messiah(t: &BogoliubovTransform) -> Result<BlochMessiah> {
    let n = t.n_modes();
    let svd = t.u().clone().svd(true, true);
    let (mut w, sigma, v_t) = (
        svd.u.ok_or_else(|| Error::Eigensolver("SVD of U failed".into()))?,
        svd.singular_values,
        svd.v_t
            .ok_or_else(|| Error::Eigensolver("SVD of U failed".into()))?,
    );
    let mut x = v_t.transpose();
    // Deterministic descending order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sigma[b].partial_cmp(&sigma[a]).unwrap());
    let sigma_sorted = DVector::from_iterator(n, order.iter().map(|&i| sigma[i]));
    w = permute_columns(&w, &order);
    x = permute_columns(&x, &order);
    let sigma = sigma_sorted;

    // Rotate inside degenerate singular subspaces so S = Wᵀ V X becomes
    // diagonal; independent SVDs of U and V would break the pairing.
    let mut s = w.transpose() * t.v() * &x;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && (sigma[j] - sigma[i]).abs() <= 1e-8 * sigma[i].max(1.0) {
            j += 1;
        }
        let len = j - i;
        if len > 1 {
            let block = s.view((i, i), (len, len)).into_owned();
            let sym = 0.5 * (&block + block.transpose());
            let eig = nalgebra::SymmetricEigen::new(sym);
            let q = eig.eigenvectors;
            let wq = w.columns(i, len) * &q;
            w.view_mut((0, i), (n, len)).copy_from(&wq);
            let xq = x.columns(i, len) * &q;
            x.view_mut((0, i), (n, len)).copy_from(&xq);
        }
        i = j;
    }
    s = w.transpose() * t.v() * &x;

    // ζ from the signed diagonal of S: sinh ζ = -S_ii.
    let zeta = DVector::from_iterator(n, (0..n).map(|k| (-s[(k, k)]).asinh()));

    // Force det X = +1 by flipping a matched column pair (U and V invariant).
    if x.determinant() < 0.0 {
        for r in 0..n {
            x[(r, n - 1)] = -x[(r, n - 1)];
            w[(r, n - 1)] = -w[(r, n - 1)];
        }
    }

    let bm_partial = BlochMessiah {
        w: w.clone(),
        x: x.clone(),
        zeta,
        x_rotations: Vec::new(),
        w_rotations: Vec::new(),
        w_parity: None,
    };
    let res_u = frobenius(&(bm_partial.reconstruct_u() - t.u()));
    let res_v = frobenius(&(bm_partial.reconstruct_v() - t.v()));
    let res = res_u.max(res_v);
    if !res.is_finite() || res > 1e-8 * (1.0 + norm1(t.u()) + norm1(t.v())) {
        return Err(Error::Factorization(res));
    }

    let (x_rotations, x_parity) = givens_decompose(&x.transpose())?;
    if x_parity.is_some() {
        // det Xᵀ = det X = +1, so this cannot happen.
        return Err(Error::Factorization(res));
    }
    let (w_rotations, w_parity) = givens_decompose(&w)?;
    Ok(BlochMessiah {
        w,
        x,
        zeta: bm_partial.zeta,
        x_rotations,
        w_rotations,
        w_parity,
    })
}

fn permute_columns(m: &DMatrix<f64>, order: &[usize]) -> DMatrix<f64> {
    let (r, c) = (m.nrows(), m.ncols());
    let mut out = DMatrix::<f64>::zeros(r, c);
    for (new, &old) in order.iter().enumerate() {
        out.set_column(new, &m.column(old));
    }
    out
}

/// Result of diagonalizing a linear-plus-quadratic Hermitian polynomial.
#[derive(Debug, Clone)]
pub enum QuadraticDiagonalization {
    /// p = apply_transform(transform, Σ ε_p b†b + K).
    Stable {
        transform: BogoliubovTransform,
        epsilon: Vec<f64>,
        constant: f64,
    },
    /// The (q, p) quadratic form is not positive definite; carries the
    /// indefinite normal form. Direct exponentiation still works; gate
    /// compilation of such a fragment is refused.
    Unstable {
        fq_eigenvalues: Vec<f64>,
        fp_eigenvalues: Vec<f64>,
    },
}

/// Diagonalize a Hermitian polynomial of degree ≤ 2 via the (q, p)
/// quadratic form: Williamson-style Cholesky plus orthogonal eigensolve for
/// the positive-definite case, with linear terms removed by completing the
/// square.
pub fn diagonalize_quadratic(p: &BosonPolynomial) -> Result<QuadraticDiagonalization> {
    let n = p.n_modes();
    if p.degree() > 2 {
        return Err(Error::DegreeTooHigh {
            got: p.degree(),
            max: 2,
        });
    }
    if p.hermiticity_error() > 1e-9 * (1.0 + p.coeff_norm()) {
        return Err(Error::Config(
            "diagonalize_quadratic requires a Hermitian polynomial".into(),
        ));
    }
    let c0 = p.coeff(&Monomial::identity(n));
    let mut lin = DVector::<f64>::zeros(n);
    let mut a_hat = DMatrix::<f64>::zeros(n, n);
    let mut c_pair = DMatrix::<f64>::zeros(n, n);
    for (m, c) in p.terms() {
        let d = m.degree();
        if d == 1 {
            for mode in 0..n {
                if m.creation(mode) == 1 {
                    lin[mode] = c; // Hermiticity: equals the b coefficient
                }
            }
        } else if d == 2 {
            let touched: Vec<usize> = (0..n)
                .filter(|&k| m.creation(k) + m.annihilation(k) > 0)
                .collect();
            match touched.as_slice() {
                [k] => {
                    let (cr, an) = (m.creation(*k), m.annihilation(*k));
                    match (cr, an) {
                        (1, 1) => a_hat[(*k, *k)] = c,
                        (2, 0) => c_pair[(*k, *k)] = c,
                        (0, 2) => {} // adjoint of (2,0); same coefficient
                        _ => unreachable!(),
                    }
                }
                [k, l] => {
                    let (ck, ak) = (m.creation(*k), m.annihilation(*k));
                    let (cl, al) = (m.creation(*l), m.annihilation(*l));
                    if ck == 1 && al == 1 && ak == 0 && cl == 0 {
                        // b†_k b_l
                        a_hat[(*k, *l)] = c;
                        a_hat[(*l, *k)] = c;
                    } else if ak == 1 && cl == 1 && ck == 0 && al == 0 {
                        // b†_l b_k: adjoint of the above, same coefficient
                    } else if ck == 1 && cl == 1 {
                        c_pair[(*k, *l)] = 0.5 * c;
                        c_pair[(*l, *k)] = 0.5 * c;
                    }
                    // b_k b_l handled by the creation pair via Hermiticity
                }
                _ => unreachable!(),
            }
        }
    }
    // H = ½ qᵀ F_q q + ½ pᵀ F_p p - ½ tr Â + √2 lᵀ q + c0
    let f_q = &a_hat + 2.0 * &c_pair;
    let f_p = &a_hat - 2.0 * &c_pair;

    let chol_p = f_p.clone().cholesky();
    let chol_q = f_q.clone().cholesky();
    if chol_p.is_none() || chol_q.is_none() {
        return Ok(QuadraticDiagonalization::Unstable {
            fq_eigenvalues: sorted_eigenvalues(&f_q),
            fp_eigenvalues: sorted_eigenvalues(&f_p),
        });
    }

    // L = F_p^{1/2} (symmetric), K = L F_q L = O diag(ε²) Oᵀ.
    let ep = nalgebra::SymmetricEigen::new(f_p.clone());
    let l_sqrt = &ep.eigenvectors
        * DMatrix::from_diagonal(&ep.eigenvalues.map(|x| x.max(0.0).sqrt()))
        * ep.eigenvectors.transpose();
    let k_mat = &l_sqrt * &f_q * &l_sqrt;
    let ek = nalgebra::SymmetricEigen::new(0.5 * (&k_mat + k_mat.transpose()));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| ek.eigenvalues[a].partial_cmp(&ek.eigenvalues[b]).unwrap());
    if ek.eigenvalues[order[0]] <= 0.0 {
        return Ok(QuadraticDiagonalization::Unstable {
            fq_eigenvalues: sorted_eigenvalues(&f_q),
            fp_eigenvalues: sorted_eigenvalues(&f_p),
        });
    }
    let o = permute_columns(&ek.eigenvectors, &order);
    let eps: Vec<f64> = order.iter().map(|&i| ek.eigenvalues[i].sqrt()).collect();

    // New coordinates: q = T_q q̃ with T_q = L O diag(ε^{-1/2}).
    let t_q = &l_sqrt * &o * DMatrix::from_diagonal(&DVector::from_iterator(n, eps.iter().map(|e| e.powf(-0.5))));
    let t_q_inv = t_q
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Eigensolver("normal-mode transform not invertible".into()))?;
    let u = 0.5 * (&t_q_inv + t_q.transpose());
    let v = 0.5 * (t_q.transpose() - &t_q_inv);
    let fq_inv_l = chol_q.unwrap().solve(&lin);
    let gamma = &t_q_inv * &fq_inv_l;
    let constant = 0.5 * eps.iter().sum::<f64>() + c0
        - 0.5 * a_hat.trace()
        - lin.dot(&fq_inv_l);

    let transform = BogoliubovTransform::new(u, v, gamma)?;
    Ok(QuadraticDiagonalization::Stable {
        transform,
        epsilon: eps,
        constant,
    })
}

fn sorted_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let e = nalgebra::SymmetricEigen::new(0.5 * (m + m.transpose()));
    let mut v: Vec<f64> = e.eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::LadderOp;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exp_zero_generator_is_identity() {
        let g = BogoliubovGenerator::zero(2);
        let t = exp_generator(&g).unwrap();
        assert!(t.is_identity(1e-12));
    }

    #[test]
    fn exp_single_mode_squeeze() {
        let z = 0.37;
        let g = BogoliubovGenerator::from_triangles(1, &[], &[z], &[0.0]).unwrap();
        let t = exp_generator(&g).unwrap();
        assert_abs_diff_eq!(t.u()[(0, 0)], z.cosh(), epsilon = 1e-12);
        assert_abs_diff_eq!(t.v()[(0, 0)], -z.sinh(), epsilon = 1e-12);
    }

    #[test]
    fn exp_two_mode_rotation() {
        let phi = 0.42;
        // α strict lower entry is α_{10}; α_{01} = -α_{10} = φ.
        let g = BogoliubovGenerator::from_triangles(2, &[-phi], &[0.0; 3], &[0.0; 2]).unwrap();
        let t = exp_generator(&g).unwrap();
        assert_abs_diff_eq!(t.u()[(0, 0)], phi.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(t.u()[(0, 1)], phi.sin(), epsilon = 1e-12);
        assert_abs_diff_eq!(t.u()[(1, 0)], -phi.sin(), epsilon = 1e-12);
        assert!(frobenius(t.v()) < 1e-12);
    }

    #[test]
    fn log_of_identity_is_zero() {
        let t = BogoliubovTransform::identity(3);
        let g = log_transform(&t).unwrap();
        assert!(g.alpha_strict_lower().iter().all(|&x| x.abs() < 1e-12));
        assert!(g.beta_lower().iter().all(|&x| x.abs() < 1e-12));
    }

    #[test]
    fn log_recovers_squeeze() {
        let z = 0.3;
        let u = DMatrix::from_element(1, 1, z.cosh());
        let v = DMatrix::from_element(1, 1, -z.sinh());
        let t = BogoliubovTransform::new(u, v, DVector::zeros(1)).unwrap();
        let g = log_transform(&t).unwrap();
        assert_abs_diff_eq!(g.beta_lower()[0], z, epsilon = 1e-10);
    }

    #[test]
    fn apply_identity_leaves_polynomial() {
        let p = BosonPolynomial::number(2, 0).unwrap();
        let t = BogoliubovTransform::identity(2);
        let q = apply_transform(&t, &p).unwrap();
        assert!(p.coeff_distance(&q) < 1e-14);
    }

    #[test]
    fn apply_pure_displacement_to_number() {
        // b†b → b†b + γ(b† + b) + γ²
        let gamma = 0.8;
        let t = BogoliubovTransform::new(
            DMatrix::identity(1, 1),
            DMatrix::zeros(1, 1),
            DVector::from_element(1, gamma),
        )
        .unwrap();
        let p = BosonPolynomial::number(1, 0).unwrap();
        let q = apply_transform(&t, &p).unwrap();
        let cre = BosonPolynomial::ladder(1, LadderOp::Create(0)).unwrap();
        let ann = BosonPolynomial::ladder(1, LadderOp::Annihilate(0)).unwrap();
        let expect = p
            .add(&cre.add(&ann).unwrap().scaled(gamma))
            .unwrap()
            .add(&BosonPolynomial::constant(1, gamma * gamma))
            .unwrap();
        assert!(q.coeff_distance(&expect) < 1e-12);
    }

    #[test]
    fn apply_squeeze_to_number() {
        // b†b → cosh(2ζ) b†b - (sinh(2ζ)/2)(b†² + b²) + sinh²ζ
        let z = 0.45;
        let g = BogoliubovGenerator::from_triangles(1, &[], &[z], &[0.0]).unwrap();
        let t = exp_generator(&g).unwrap();
        let p = BosonPolynomial::number(1, 0).unwrap();
        let q = apply_transform(&t, &p).unwrap();
        let m_n = Monomial::from_exps(vec![(1, 1)]);
        let m_cc = Monomial::from_exps(vec![(2, 0)]);
        let m_aa = Monomial::from_exps(vec![(0, 2)]);
        assert_abs_diff_eq!(q.coeff(&m_n), (2.0 * z).cosh(), epsilon = 1e-12);
        assert_abs_diff_eq!(q.coeff(&m_cc), -(2.0 * z).sinh() / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(q.coeff(&m_aa), -(2.0 * z).sinh() / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            q.coeff(&Monomial::identity(1)),
            z.sinh().powi(2),
            epsilon = 1e-12
        );
    }

    #[test]
    fn bloch_messiah_identity() {
        let t = BogoliubovTransform::identity(3);
        let bm = bloch_messiah(&t).unwrap();
        assert!(bm.zeta.amax() < 1e-12);
        assert!(bm.x_rotations.is_empty() || bm.x_rotations.iter().all(|r| r.angle.abs() < 1e-12));
    }

    #[test]
    fn bloch_messiah_diagonal_squeeze() {
        let z0 = 0.5;
        let z1 = -0.2;
        let g = BogoliubovGenerator::from_triangles(2, &[0.0], &[z0, 0.0, z1], &[0.0; 2]).unwrap();
        let t = exp_generator(&g).unwrap();
        let bm = bloch_messiah(&t).unwrap();
        let mut zs: Vec<f64> = bm.zeta.iter().copied().collect();
        zs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut expect = vec![z0, z1];
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in zs.iter().zip(expect.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn diagonalize_harmonic() {
        // ω(b†b + ½) → identity transform, ε = ω, K = ω/2
        let w = 1234.5;
        let p = BosonPolynomial::number(1, 0)
            .unwrap()
            .scaled(w)
            .add(&BosonPolynomial::constant(1, w / 2.0))
            .unwrap();
        match diagonalize_quadratic(&p).unwrap() {
            QuadraticDiagonalization::Stable {
                transform,
                epsilon,
                constant,
            } => {
                assert!(transform.is_identity(1e-10));
                assert_abs_diff_eq!(epsilon[0], w, epsilon = 1e-9);
                assert_abs_diff_eq!(constant, w / 2.0, epsilon = 1e-9);
            }
            _ => panic!("expected stable"),
        }
    }

    #[test]
    fn diagonalize_displaced_oscillator() {
        // ω b†b + λ(b† + b) → ε = ω, K = -λ²/ω
        let (w, lam) = (2000.0, 150.0);
        let cre = BosonPolynomial::ladder(1, LadderOp::Create(0)).unwrap();
        let ann = BosonPolynomial::ladder(1, LadderOp::Annihilate(0)).unwrap();
        let p = BosonPolynomial::number(1, 0)
            .unwrap()
            .scaled(w)
            .add(&cre.add(&ann).unwrap().scaled(lam))
            .unwrap();
        match diagonalize_quadratic(&p).unwrap() {
            QuadraticDiagonalization::Stable {
                transform,
                epsilon,
                constant,
            } => {
                assert_abs_diff_eq!(epsilon[0], w, epsilon = 1e-8);
                assert_abs_diff_eq!(constant, -lam * lam / w, epsilon = 1e-8);
                // Reconstruction: apply_transform(t, ε n + K) == p
                let diag = BosonPolynomial::number(1, 0)
                    .unwrap()
                    .scaled(epsilon[0])
                    .add(&BosonPolynomial::constant(1, constant))
                    .unwrap();
                let back = apply_transform(&transform, &diag).unwrap();
                assert!(back.coeff_distance(&p) < 1e-8);
            }
            _ => panic!("expected stable"),
        }
    }

    #[test]
    fn diagonalize_coupled_modes_matches_normal_modes() {
        // ½Σω(p²+q²) + c q0 q1: ε² are the eigenvalues of the 2×2 matrix
        // [[ω0², c√(ω0ω1)], [c√(ω0ω1), ω1²]].
        let (w0, w1, c) = (1500.0, 900.0, 400.0);
        let n = 2;
        let mut p = BosonPolynomial::zero(n);
        for (m, &w) in [w0, w1].iter().enumerate() {
            let q2 = {
                let q = BosonPolynomial::position(n, m).unwrap();
                q.mul(&q).unwrap()
            };
            let p2 = BosonPolynomial::momentum_squared(n, m).unwrap();
            p = p.add(&q2.add(&p2).unwrap().scaled(0.5 * w)).unwrap();
        }
        let q0q1 = BosonPolynomial::position(n, 0)
            .unwrap()
            .mul(&BosonPolynomial::position(n, 1).unwrap())
            .unwrap();
        p = p.add(&q0q1.scaled(c)).unwrap();

        let dyn_mat = DMatrix::from_row_slice(
            2,
            2,
            &[
                w0 * w0,
                c * (w0 * w1).sqrt(),
                c * (w0 * w1).sqrt(),
                w1 * w1,
            ],
        );
        let mut expect: Vec<f64> = nalgebra::SymmetricEigen::new(dyn_mat)
            .eigenvalues
            .iter()
            .map(|x| x.sqrt())
            .collect();
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());

        match diagonalize_quadratic(&p).unwrap() {
            QuadraticDiagonalization::Stable { epsilon, .. } => {
                for (a, b) in epsilon.iter().zip(expect.iter()) {
                    assert_abs_diff_eq!(a, b, epsilon = 1e-6);
                }
            }
            _ => panic!("expected stable"),
        }
    }

    #[test]
    fn diagonalize_inverted_well_is_unstable() {
        // (ω/2)(p² - q²): indefinite form
        let w = 1000.0;
        let q = BosonPolynomial::position(1, 0).unwrap();
        let q2 = q.mul(&q).unwrap();
        let p2 = BosonPolynomial::momentum_squared(1, 0).unwrap();
        let ham = p2.sub(&q2).unwrap().scaled(0.5 * w);
        match diagonalize_quadratic(&ham).unwrap() {
            QuadraticDiagonalization::Unstable { fq_eigenvalues, .. } => {
                assert!(fq_eigenvalues[0] < 0.0);
            }
            _ => panic!("expected unstable"),
        }
    }

    #[test]
    fn degree_three_rejected() {
        let q = BosonPolynomial::position(1, 0).unwrap();
        let q3 = q.mul(&q).unwrap().mul(&q).unwrap();
        assert!(diagonalize_quadratic(&q3).is_err());
    }
}
