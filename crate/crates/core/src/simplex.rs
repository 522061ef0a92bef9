//! Nelder–Mead downhill simplex minimization.

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub max_evals: usize,
    /// Stop when the spread of function values across the simplex drops below this.
    pub f_tol: f64,
    /// Stop when every vertex lies within this distance of the best one (∞-norm).
    pub x_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions { max_evals: 20_000, f_tol: 1e-15, x_tol: 1e-12 }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `f` starting from a simplex spanned by `x0` and `x0 + step·e_k`.
/// Uses the adaptive coefficients of Gao and Han, which behave better than the
/// textbook values in a dozen or more dimensions.
pub fn minimize<F>(mut f: F, x0: &[f64], step: f64, opts: SimplexOptions) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    let d = dim as f64;
    let (alpha, gamma, rho, sigma) =
        if dim >= 2 { (1.0, 1.0 + 2.0 / d, 0.75 - 1.0 / (2.0 * d), 1.0 - 1.0 / d) } else { (1.0, 2.0, 0.5, 0.5) };

    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    pts.push(x0.to_vec());
    for k in 0..dim {
        let mut p = x0.to_vec();
        p[k] += step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p, &mut evals)).collect();
    let mut iterations = 0;
    let mut converged = false;

    while evals < opts.max_evals {
        iterations += 1;
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let spread = (vals[dim] - vals[0]).abs();
        let size = pts[1..].iter().flat_map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs())).fold(0.0, f64::max);
        if spread <= opts.f_tol * (1.0 + vals[0].abs()) && size <= opts.x_tol {
            converged = true;
            break;
        }
        if size <= opts.x_tol * 1e-3 {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..dim).map(|k| pts[..dim].iter().map(|p| p[k]).sum::<f64>() / d).collect();
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&pts[dim]).map(|(c, w)| c + t * (c - w)).collect() };

        let xr = along(alpha);
        let fr = eval(&xr, &mut evals);
        if fr < vals[0] {
            let xe = along(alpha * gamma);
            let fe = eval(&xe, &mut evals);
            if fe < fr {
                pts[dim] = xe;
                vals[dim] = fe;
            } else {
                pts[dim] = xr;
                vals[dim] = fr;
            }
            continue;
        }
        if fr < vals[dim - 1] {
            pts[dim] = xr;
            vals[dim] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[dim] {
            let xc = along(alpha * rho);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = along(-rho);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < vals[dim].min(fr) {
            pts[dim] = xc;
            vals[dim] = fc;
            continue;
        }
        // Shrink towards the best vertex.
        for i in 1..=dim {
            let p: Vec<f64> = pts[0].iter().zip(&pts[i]).map(|(b, x)| b + sigma * (x - b)).collect();
            vals[i] = eval(&p, &mut evals);
            pts[i] = p;
        }
    }

    let best = (0..=dim).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).expect("non-empty simplex");
    SimplexResult { x: pts[best].clone(), f: vals[best], evals, iterations, converged }
}
