//! Dense matrix functions for small real matrices: scaling-and-squaring
//! matrix exponential, inverse-scaling-and-squaring matrix logarithm, and
//! Givens factorization of orthogonal matrices.

use nalgebra::DMatrix;

use crate::{Error, Result};

/// 1-norm (maximum absolute column sum).
pub fn norm1(a: &DMatrix<f64>) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn frobenius(a: &DMatrix<f64>) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Matrix exponential by scaling-and-squaring with the order-13 Padé
/// approximant.
pub fn expm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch("expm requires a square matrix".into()));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::MatrixFunction("non-finite entries in expm input".into()));
    }
    let n = a.nrows();
    const THETA13: f64 = 5.371_920_351_148_152;
    let nrm = norm1(a);
    let s = if nrm > THETA13 {
        (nrm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a / 2f64.powi(s);

    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    let eye = DMatrix::<f64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let u_inner = &a6 * (B[13] * &a6 + B[11] * &a4 + B[9] * &a2)
        + B[7] * &a6
        + B[5] * &a4
        + B[3] * &a2
        + B[1] * &eye;
    let u = &a * u_inner;
    let v = &a6 * (B[12] * &a6 + B[10] * &a4 + B[8] * &a2)
        + B[6] * &a6
        + B[4] * &a4
        + B[2] * &a2
        + B[0] * &eye;
    let lhs = &v - &u;
    let rhs = &v + &u;
    let mut x = lhs
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::MatrixFunction("Padé solve failed in expm".into()))?;
    for _ in 0..s {
        x = &x * &x;
    }
    if x.iter().any(|e| !e.is_finite()) {
        return Err(Error::MatrixFunction("expm did not converge".into()));
    }
    Ok(x)
}

/// Principal square root via the Denman–Beavers iteration. Requires no
/// eigenvalue on the closed negative real axis.
fn sqrtm_db(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let mut x = a.clone();
    let mut y = DMatrix::<f64>::identity(n, n);
    for _ in 0..60 {
        let xi = x
            .clone()
            .try_inverse()
            .ok_or(Error::LogBranch)?;
        let yi = y
            .clone()
            .try_inverse()
            .ok_or(Error::LogBranch)?;
        let xn = 0.5 * (&x + &yi);
        let yn = 0.5 * (&y + &xi);
        let delta = norm1(&(&xn - &x));
        x = xn;
        y = yn;
        if delta <= 1e-15 * norm1(&x).max(1.0) {
            break;
        }
    }
    let res = norm1(&(&x * &x - a));
    if !res.is_finite() || res > 1e-9 * norm1(a).max(1.0) {
        return Err(Error::MatrixFunction(format!(
            "matrix square root residual {res:.3e}"
        )));
    }
    Ok(x)
}

/// Principal matrix logarithm by inverse scaling-and-squaring: repeated
/// square roots bring the matrix near the identity, a truncated Mercator
/// series evaluates log there, and the result is scaled back.
pub fn logm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch("logm requires a square matrix".into()));
    }
    let n = a.nrows();
    // Principal-branch check: reject eigenvalues on the negative real axis.
    for ev in a.complex_eigenvalues().iter() {
        if ev.re <= 0.0 && ev.im.abs() <= 1e-12 * ev.norm().max(1.0) {
            return Err(Error::LogBranch);
        }
    }
    let eye = DMatrix::<f64>::identity(n, n);
    let mut b = a.clone();
    let mut k = 0u32;
    while norm1(&(&b - &eye)) > 0.1 {
        if k >= 60 {
            return Err(Error::MatrixFunction("logm scaling did not converge".into()));
        }
        b = sqrtm_db(&b)?;
        k += 1;
    }
    let x = &b - &eye;
    // log(I + X) = Σ (-1)^{m+1} X^m / m; ‖X‖ ≤ 0.1 so 40 terms are exact to
    // well below f64 precision.
    let mut term = x.clone();
    let mut acc = DMatrix::<f64>::zeros(n, n);
    for m in 1..=40 {
        let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
        acc += sign / m as f64 * &term;
        term = &term * &x;
    }
    Ok(acc * 2f64.powi(k as i32))
}

/// Plane rotation on modes (p, q): entries R[p][p]=cos, R[p][q]=sin,
/// R[q][p]=-sin, R[q][q]=cos.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GivensRotation {
    pub p: usize,
    pub q: usize,
    pub angle: f64,
}

impl GivensRotation {
    pub fn matrix(&self, n: usize) -> DMatrix<f64> {
        let mut m = DMatrix::<f64>::identity(n, n);
        let (c, s) = (self.angle.cos(), self.angle.sin());
        m[(self.p, self.p)] = c;
        m[(self.p, self.q)] = s;
        m[(self.q, self.p)] = -s;
        m[(self.q, self.q)] = c;
        m
    }
}

/// Factor an orthogonal matrix as O = R_1 · R_2 · … · R_m · P where the R_i
/// are plane rotations (returned in product order) and P is the identity or,
/// when det O = -1, a reflection of the returned mode.
pub fn givens_decompose(o: &DMatrix<f64>) -> Result<(Vec<GivensRotation>, Option<usize>)> {
    let n = o.nrows();
    let ortho_res = frobenius(&(o.transpose() * o - DMatrix::<f64>::identity(n, n)));
    if ortho_res > 1e-8 {
        return Err(Error::MatrixFunction(format!(
            "givens_decompose input not orthogonal: residual {ortho_res:.3e}"
        )));
    }
    let mut work = o.clone();
    let mut left: Vec<GivensRotation> = Vec::new();
    for col in 0..n {
        for row in (col + 1..n).rev() {
            let x = work[(col, col)];
            let y = work[(row, col)];
            if y.abs() < 1e-15 {
                continue;
            }
            let theta = y.atan2(x);
            let g = GivensRotation {
                p: col,
                q: row,
                angle: theta,
            };
            // Left-multiply work by g: rows col/row mix.
            let (c, s) = (theta.cos(), theta.sin());
            for j in 0..n {
                let a = work[(col, j)];
                let b = work[(row, j)];
                work[(col, j)] = c * a + s * b;
                work[(row, j)] = -s * a + c * b;
            }
            left.push(g);
        }
    }
    // work is now diagonal with ±1 entries; all but the last are +1 by
    // construction of atan2 pivoting.
    let mut rotations: Vec<GivensRotation> = left
        .iter()
        .map(|g| GivensRotation {
            p: g.p,
            q: g.q,
            angle: -g.angle,
        })
        .collect();
    let mut parity: Option<usize> = None;
    let mut negatives: Vec<usize> = (0..n).filter(|&i| work[(i, i)] < 0.0).collect();
    // Pairs of -1 entries are themselves plane rotations by π.
    while negatives.len() >= 2 {
        let q = negatives.pop().unwrap();
        let p = negatives.pop().unwrap();
        rotations.push(GivensRotation {
            p,
            q,
            angle: std::f64::consts::PI,
        });
    }
    if let Some(m) = negatives.pop() {
        parity = Some(m);
    }
    Ok((rotations, parity))
}

/// Rebuild the orthogonal matrix from its Givens factorization.
pub fn givens_reconstruct(
    n: usize,
    rotations: &[GivensRotation],
    parity: Option<usize>,
) -> DMatrix<f64> {
    let mut m = DMatrix::<f64>::identity(n, n);
    for r in rotations {
        m = m * r.matrix(n);
    }
    if let Some(p) = parity {
        for j in 0..n {
            m[(j, p)] = -m[(j, p)];
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut impl Rng, n: usize, scale: f64) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |_, _| rng.random_range(-scale..scale))
    }

    fn random_orthogonal(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
        let a = random_matrix(rng, n, 1.0);
        let qr = a.qr();
        qr.q()
    }

    #[test]
    fn expm_zero_is_identity() {
        let z = DMatrix::<f64>::zeros(3, 3);
        let e = expm(&z).unwrap();
        assert!(frobenius(&(e - DMatrix::<f64>::identity(3, 3))) < 1e-14);
    }

    #[test]
    fn expm_matches_scalar() {
        let a = DMatrix::from_row_slice(1, 1, &[0.7]);
        let e = expm(&a).unwrap();
        assert!((e[(0, 0)] - 0.7f64.exp()).abs() < 1e-14);
    }

    #[test]
    fn expm_rotation_block() {
        let phi = 0.3;
        let a = DMatrix::from_row_slice(2, 2, &[0.0, phi, -phi, 0.0]);
        let e = expm(&a).unwrap();
        assert!((e[(0, 0)] - phi.cos()).abs() < 1e-14);
        assert!((e[(0, 1)] - phi.sin()).abs() < 1e-14);
    }

    #[test]
    fn expm_large_norm_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_matrix(&mut rng, 4, 3.0);
        let e = expm(&a).unwrap();
        // exp(A)·exp(-A) = I
        let einv = expm(&(-&a)).unwrap();
        assert!(frobenius(&(&e * &einv - DMatrix::<f64>::identity(4, 4))) < 1e-9);
    }

    #[test]
    fn logm_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = random_matrix(&mut rng, 4, 0.5);
            let e = expm(&a).unwrap();
            let l = logm(&e).unwrap();
            let e2 = expm(&l).unwrap();
            assert!(frobenius(&(&e2 - &e)) < 1e-10 * frobenius(&e).max(1.0));
        }
    }

    #[test]
    fn logm_identity_is_zero() {
        let l = logm(&DMatrix::<f64>::identity(3, 3)).unwrap();
        assert!(frobenius(&l) < 1e-14);
    }

    #[test]
    fn logm_rejects_negative_axis() {
        let a = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 2.0]);
        assert!(matches!(logm(&a), Err(Error::LogBranch)));
    }

    #[test]
    fn givens_roundtrip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=5 {
            for _ in 0..20 {
                let o = random_orthogonal(&mut rng, n);
                let (rots, parity) = givens_decompose(&o).unwrap();
                let r = givens_reconstruct(n, &rots, parity);
                assert!(
                    frobenius(&(&r - &o)) < 1e-10,
                    "n={n} residual {}",
                    frobenius(&(&r - &o))
                );
            }
        }
    }

    #[test]
    fn givens_reflection_gets_parity() {
        let mut o = DMatrix::<f64>::identity(3, 3);
        o[(1, 1)] = -1.0;
        let (rots, parity) = givens_decompose(&o).unwrap();
        let r = givens_reconstruct(3, &rots, parity);
        assert!(frobenius(&(&r - &o)) < 1e-12);
        assert!(parity.is_some());
    }
}
