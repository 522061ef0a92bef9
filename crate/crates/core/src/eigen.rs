//! Cyclic Jacobi eigensolver for dense Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` and then applies
//! a real Jacobi rotation, so the whole step is a unitary `G` with
//! `(G† A G)_pq = 0`. Sweeps stop once the off-diagonal Frobenius norm falls
//! below `1e-13 · ‖A‖_F`.

use crate::error::{Error, Result};
use crate::quantum::{CMatrix, HermitianOperator, C64, MAX_DIM};

const REL_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order; column `k` of `vectors` belongs to `values[k]`.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
    pub sweeps: usize,
}

impl Eigh {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        let d = self.vectors.dim();
        (0..d).map(|r| self.vectors[(r, k)]).collect()
    }
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let d = a.dim();
    let mut s = 0.0;
    for r in 0..d {
        for c in 0..d {
            if r != c {
                s += a[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

pub fn eigh(op: &HermitianOperator) -> Result<Eigh> {
    let d = op.dim();
    if d > MAX_DIM {
        return Err(Error::ResourceLimit { n: d, cap: MAX_DIM });
    }
    let mut a = op.matrix().clone();
    // Exact symmetrization of the diagonal and lower triangle.
    for r in 0..d {
        a[(r, r)] = C64::new(a[(r, r)].re, 0.0);
        for c in 0..r {
            a[(r, c)] = a[(c, r)].conj();
        }
    }
    let mut v = CMatrix::identity(d);
    let scale = a.frobenius();
    let target = REL_TOL * scale;
    let mut sweeps = 0;

    while sweeps < MAX_SWEEPS && off_diagonal_norm(&a) > target {
        sweeps += 1;
        for p in 0..d {
            for q in p + 1..d {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if off_diagonal_norm(&a) > target {
        return Err(Error::Validation(format!("Jacobi did not converge in {MAX_SWEEPS} sweeps")));
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(d);
    for (k, &src) in order.iter().enumerate() {
        for r in 0..d {
            vectors[(r, k)] = v[(r, src)];
        }
    }
    Ok(Eigh { values, vectors, sweeps })
}

fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    if r < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = C64::new(0.0, 0.0);
        a[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    // Phase e^{-iφ} with a_pq = r e^{iφ}.
    let phase = (apq / r).conj();
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // G = [[c, s], [-s·e^{-iφ}, c·e^{-iφ}]] on the (p, q) plane.
    let g_qp = -phase * s;
    let g_qq = phase * c;
    let d = a.dim();

    // A ← A G (columns p, q).
    for k in 0..d {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * g_qp;
        a[(k, q)] = akp * s + akq * g_qq;
    }
    // A ← G† A (rows p, q).
    let (gqp_c, gqq_c) = (g_qp.conj(), g_qq.conj());
    for k in 0..d {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * gqp_c;
        a[(q, k)] = apk * s + aqk * gqq_c;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    // V ← V G.
    for k in 0..d {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * g_qp;
        v[(k, q)] = vkp * s + vkq * g_qq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{projector, X_AXIS};

    #[test]
    fn diagonal_input() {
        let op = HermitianOperator::new(CMatrix::diag(&[3.0, 1.0, 2.0])).unwrap();
        let e = eigh(&op).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn x_projector() {
        let e = eigh(&projector(X_AXIS, 1).unwrap()).unwrap();
        assert!((e.values[0] - 0.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn complex_two_by_two() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2.
        let m = CMatrix::from_row_major(
            2,
            vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), C64::new(1.0, 0.0)],
        )
        .unwrap();
        let op = HermitianOperator::new(m).unwrap();
        let e = eigh(&op).unwrap();
        assert!(e.values[0].abs() < 1e-14);
        assert!((e.values[1] - 2.0).abs() < 1e-14);
        for k in 0..2 {
            let v = e.vector(k);
            let av = op.apply(&v).unwrap();
            let res: f64 = av.iter().zip(&v).map(|(x, y)| (x - y * e.values[k]).norm_sqr()).sum();
            assert!(res.sqrt() < 1e-13);
        }
    }
}
