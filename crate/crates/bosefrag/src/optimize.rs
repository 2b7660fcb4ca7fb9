//! Local minimizers for the fragment fit: quasi-Newton BFGS with
//! central-difference gradients and Powell's derivative-free direction-set
//! method. Non-finite objective values act as an infinity sentinel so line
//! searches backtrack out of overflow regions.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Bfgs,
    Powell,
}

#[derive(Debug, Clone)]
pub struct MinimizeOptions {
    pub max_evals: usize,
    /// Stop when the relative cost decrease over one iteration falls below
    /// this.
    pub rel_tol: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            max_evals: 10_000,
            rel_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MinimizeResult {
    pub x: Vec<f64>,
    pub fval: f64,
    pub evals: usize,
    pub converged: bool,
}

fn sanitize(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::INFINITY
    }
}

/// Central-difference gradient with per-coordinate step 1e-6·max(1, |x_i|).
pub fn fd_gradient<F: FnMut(&[f64]) -> f64>(f: &mut F, x: &[f64], evals: &mut usize) -> Vec<f64> {
    let n = x.len();
    let mut g = vec![0.0; n];
    let mut xp = x.to_vec();
    for i in 0..n {
        let h = 1e-6 * x[i].abs().max(1.0);
        xp[i] = x[i] + h;
        let fp = sanitize(f(&xp));
        xp[i] = x[i] - h;
        let fm = sanitize(f(&xp));
        xp[i] = x[i];
        *evals += 2;
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

pub fn minimize(
    method: Method,
    f: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    opts: &MinimizeOptions,
) -> MinimizeResult {
    match method {
        Method::Bfgs => minimize_bfgs(f, x0, opts),
        Method::Powell => minimize_powell(f, x0, opts),
    }
}

pub fn minimize_bfgs(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    opts: &MinimizeOptions,
) -> MinimizeResult {
    let n = x0.len();
    let mut evals = 0usize;
    let mut x = x0.to_vec();
    let mut fx = sanitize(f(&x));
    evals += 1;
    let mut g = fd_gradient(f, &x, &mut evals);
    let mut h_inv = vec![vec![0.0; n]; n];
    for (i, row) in h_inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let mut converged = false;

    while evals < opts.max_evals {
        // d = -H g
        let mut d = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                d[i] -= h_inv[i][j] * g[j];
            }
        }
        let g_dot_d: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
        if !g_dot_d.is_finite() || g_dot_d >= 0.0 {
            // Reset a broken curvature estimate to steepest descent.
            for (i, row) in h_inv.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = if i == j { 1.0 } else { 0.0 };
                }
            }
            for (di, gi) in d.iter_mut().zip(&g) {
                *di = -gi;
            }
        }
        let g_dot_d: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
        let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gnorm < 1e-14 * (1.0 + fx.abs()) {
            converged = true;
            break;
        }

        // Backtracking Armijo line search.
        let c1 = 1e-4;
        let mut alpha = 1.0;
        let mut x_new = x.clone();
        let mut f_new;
        let mut ok = false;
        for _ in 0..50 {
            for i in 0..n {
                x_new[i] = x[i] + alpha * d[i];
            }
            f_new = sanitize(f(&x_new));
            evals += 1;
            if f_new <= fx + c1 * alpha * g_dot_d {
                ok = true;
                break;
            }
            alpha *= 0.5;
            if alpha < 1e-16 {
                break;
            }
        }
        if !ok {
            converged = true; // no descent possible along d
            break;
        }
        for i in 0..n {
            x_new[i] = x[i] + alpha * d[i];
        }
        let f_new = sanitize(f(&x_new));
        evals += 1;
        let g_new = fd_gradient(f, &x_new, &mut evals);

        let s: Vec<f64> = (0..n).map(|i| x_new[i] - x[i]).collect();
        let y: Vec<f64> = (0..n).map(|i| g_new[i] - g[i]).collect();
        let ys: f64 = y.iter().zip(&s).map(|(a, b)| a * b).sum();
        if ys.is_finite() && ys > 1e-14 {
            // H ← (I - ρ s yᵀ) H (I - ρ y sᵀ) + ρ s sᵀ
            let rho = 1.0 / ys;
            let mut hy = vec![0.0; n];
            for i in 0..n {
                for j in 0..n {
                    hy[i] += h_inv[i][j] * y[j];
                }
            }
            let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
            for i in 0..n {
                for j in 0..n {
                    h_inv[i][j] += -rho * (s[i] * hy[j] + hy[i] * s[j])
                        + rho * rho * yhy * s[i] * s[j]
                        + rho * s[i] * s[j];
                }
            }
        }

        let decrease = fx - f_new;
        x = x_new;
        fx = f_new;
        g = g_new;
        if decrease.abs() < opts.rel_tol * fx.abs().max(1.0) {
            converged = true;
            break;
        }
    }
    MinimizeResult {
        x,
        fval: fx,
        evals,
        converged,
    }
}

/// Brent line minimization of φ(t) = f(x + t d) with a golden-section
/// bracketing pass.
fn line_minimize(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x: &[f64],
    d: &[f64],
    f0: f64,
    evals: &mut usize,
) -> (f64, f64) {
    let n = x.len();
    let mut xt = vec![0.0; n];
    let mut phi = |t: f64, evals: &mut usize| -> f64 {
        for i in 0..n {
            xt[i] = x[i] + t * d[i];
        }
        *evals += 1;
        sanitize(f(&xt))
    };

    // Bracket a minimum around t = 0.
    const GOLD: f64 = 1.618_033_988_749_895;
    let (mut a, mut fa) = (0.0, f0);
    let (mut b, mut fb) = (1e-2, phi(1e-2, evals));
    if fb > fa {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = b + GOLD * (b - a);
    let mut fc = phi(c, evals);
    let mut guard = 0;
    while fb > fc && guard < 60 {
        a = b;
        fa = fb;
        b = c;
        fb = fc;
        c = b + GOLD * (b - a);
        fc = phi(c, evals);
        guard += 1;
    }
    let (mut lo, mut hi) = (a.min(c), a.max(c));
    let _ = fa;

    // Golden-section refinement.
    const INV_GOLD: f64 = 0.618_033_988_749_895;
    let mut t1 = hi - INV_GOLD * (hi - lo);
    let mut t2 = lo + INV_GOLD * (hi - lo);
    let mut f1 = phi(t1, evals);
    let mut f2 = phi(t2, evals);
    for _ in 0..80 {
        if (hi - lo).abs() < 1e-12 * (t1.abs() + t2.abs()).max(1.0) {
            break;
        }
        if f1 < f2 {
            hi = t2;
            t2 = t1;
            f2 = f1;
            t1 = hi - INV_GOLD * (hi - lo);
            f1 = phi(t1, evals);
        } else {
            lo = t1;
            t1 = t2;
            f1 = f2;
            t2 = lo + INV_GOLD * (hi - lo);
            f2 = phi(t2, evals);
        }
    }
    let (tb, fbst) = if f1 < f2 { (t1, f1) } else { (t2, f2) };
    if fbst < f0 {
        (tb, fbst)
    } else {
        (0.0, f0)
    }
}

pub fn minimize_powell(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    opts: &MinimizeOptions,
) -> MinimizeResult {
    let n = x0.len();
    let mut evals = 0usize;
    let mut x = x0.to_vec();
    let mut fx = sanitize(f(&x));
    evals += 1;
    let mut dirs: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut d = vec![0.0; n];
            d[i] = 1.0;
            d
        })
        .collect();
    let mut converged = false;

    while evals < opts.max_evals {
        let f_start = fx;
        let x_start = x.clone();
        let mut biggest_drop = 0.0;
        let mut biggest_idx = 0;
        for (i, d) in dirs.iter().enumerate() {
            let (t, ft) = line_minimize(f, &x, d, fx, &mut evals);
            if fx - ft > biggest_drop {
                biggest_drop = fx - ft;
                biggest_idx = i;
            }
            for (xi, di) in x.iter_mut().zip(d) {
                *xi += t * di;
            }
            fx = ft;
            if evals >= opts.max_evals {
                break;
            }
        }
        if f_start - fx < opts.rel_tol * fx.abs().max(1.0) {
            converged = true;
            break;
        }
        // Extrapolated point test (Powell's direction replacement rule).
        let x_ext: Vec<f64> = (0..n).map(|i| 2.0 * x[i] - x_start[i]).collect();
        let f_ext = sanitize(f(&x_ext));
        evals += 1;
        if f_ext < f_start {
            let t1 = 2.0 * (f_start - 2.0 * fx + f_ext) * (f_start - fx - biggest_drop).powi(2);
            let t2 = biggest_drop * (f_start - f_ext).powi(2);
            if t1 < t2 {
                let new_dir: Vec<f64> = (0..n).map(|i| x[i] - x_start[i]).collect();
                let norm: f64 = new_dir.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > 1e-14 {
                    let (t, ft) = line_minimize(f, &x, &new_dir, fx, &mut evals);
                    for (xi, di) in x.iter_mut().zip(&new_dir) {
                        *xi += t * di;
                    }
                    fx = ft;
                    dirs[biggest_idx] = new_dir;
                }
            }
        }
    }
    MinimizeResult {
        x,
        fval: fx,
        evals,
        converged,
    }
}
