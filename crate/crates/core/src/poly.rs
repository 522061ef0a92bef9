//! Real polynomials and the two root finders the Bell-operator spectra need:
//! a closed-form cubic and a companion-matrix quartic.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coefficients in ascending powers: `c[0] + c[1] x + c[2] x² + ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Poly(coeffs);
        p.trim();
        p
    }

    /// `x - root`
    pub fn linear(root: f64) -> Self {
        Poly(vec![-root, 1.0])
    }

    fn trim(&mut self) {
        while self.0.len() > 1 && *self.0.last().unwrap() == 0.0 {
            self.0.pop();
        }
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.0.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(self.0.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let len = self.0.len().max(other.0.len());
        let get = |p: &Poly, k: usize| p.0.get(k).copied().unwrap_or(0.0);
        Poly::new((0..len).map(|k| get(self, k) + get(other, k)).collect())
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.0.iter().map(|c| c * s).collect())
    }
}

/// Newton iterations on a real root until the step stops shrinking.
pub fn polish_real(p: &Poly, mut x: f64) -> f64 {
    let dp = p.derivative();
    let mut last_step = f64::INFINITY;
    for _ in 0..50 {
        let d = dp.eval(x);
        if d == 0.0 {
            break;
        }
        let step = p.eval(x) / d;
        if !(step.abs() < last_step) {
            break;
        }
        x -= step;
        last_step = step.abs();
        if step == 0.0 {
            break;
        }
    }
    x
}

fn polish_complex(p: &Poly, mut z: Complex64) -> Complex64 {
    let dp = p.derivative();
    let mut last_step = f64::INFINITY;
    for _ in 0..50 {
        let d = dp.eval_complex(z);
        if d.norm() == 0.0 {
            break;
        }
        let step = p.eval_complex(z) / d;
        if !(step.norm() < last_step) {
            break;
        }
        z -= step;
        last_step = step.norm();
        if last_step == 0.0 {
            break;
        }
    }
    z
}

/// Real roots of `a x³ + b x² + c x + d` when all three are real, ascending.
/// Uses the trigonometric form of the depressed cubic, then one Newton polish.
pub fn cubic_real_roots(a: f64, b: f64, c: f64, d: f64) -> Result<[f64; 3]> {
    if a == 0.0 {
        return Err(Error::Domain("leading coefficient is zero".into()));
    }
    let (b, c, d) = (b / a, c / a, d / a);
    // x = t - b/3:  t³ + p t + q = 0
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let shift = -b / 3.0;
    let disc = -(4.0 * p * p * p + 27.0 * q * q);
    if disc < 0.0 || p > 0.0 {
        return Err(Error::Domain(format!("cubic has complex roots (discriminant {disc:.3e})")));
    }
    let poly = Poly::new(vec![d, c, b, 1.0]);
    let mut roots = if p == 0.0 {
        [shift; 3]
    } else {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        let tau = 2.0 * std::f64::consts::PI / 3.0;
        [0.0, 1.0, 2.0].map(|k| shift + m * (phi - k * tau).cos())
    };
    for r in roots.iter_mut() {
        *r = polish_real(&poly, *r);
    }
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

/// All four roots of a real quartic (ascending-power coefficients) from the
/// eigenvalues of its companion matrix, each polished by complex Newton.
pub fn quartic_roots(p: &Poly) -> Result<[Complex64; 4]> {
    if p.degree() != 4 {
        return Err(Error::Domain(format!("expected a quartic, got degree {}", p.degree())));
    }
    let lead = p.0[4];
    let c: Vec<f64> = p.0.iter().map(|x| x / lead).collect();
    #[rustfmt::skip]
    let companion = Matrix4::new(
        0.0, 0.0, 0.0, -c[0],
        1.0, 0.0, 0.0, -c[1],
        0.0, 1.0, 0.0, -c[2],
        0.0, 0.0, 1.0, -c[3],
    );
    let eig = companion.complex_eigenvalues();
    let mut roots = [Complex64::new(0.0, 0.0); 4];
    for (k, z) in eig.iter().enumerate() {
        roots[k] = polish_complex(p, Complex64::new(z.re, z.im));
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

/// Real roots of a quartic that is known to have four; errors when any root
/// keeps an imaginary part above `1e-12` after polishing.
pub fn quartic_real_roots(p: &Poly) -> Result<[f64; 4]> {
    let roots = quartic_roots(p)?;
    if let Some(z) = roots.iter().find(|z| z.im.abs() > 1e-12) {
        return Err(Error::Domain(format!("quartic has a complex root {z}")));
    }
    let mut out = roots.map(|z| polish_real(p, z.re));
    out.sort_by(f64::total_cmp);
    Ok(out)
}
