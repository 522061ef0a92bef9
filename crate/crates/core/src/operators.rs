//! Bell operators of the chain and their spectra.
//!
//! Every operator is assembled term by term from the member's probability
//! definition: each product of indicators becomes the tensor product of the
//! matching projectors. With the default frame (unprimed ẑ, primed x̂) this
//! gives exactly the `X` and `X_ij` operators built from `(I ∓ σ_z)/2` and
//! `(I + σ_x)/2`.

use std::f64::consts::SQRT_2;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::chain::{ChainMember, MemberKind};
use crate::eigen::eigh;
use crate::error::{Error, Result};
use crate::poly::{cubic_real_roots, quartic_real_roots, Poly};
use crate::quantum::{term_operator, HermitianOperator, MeasurementFrame, StateVector, C64};

/// Maximum qubits for full diagonalization (dimension 4096).
pub const MAX_SPECTRUM_QUBITS: usize = 12;

pub fn default_frame(n: usize) -> MeasurementFrame {
    MeasurementFrame::z_x(n)
}

/// Operator whose expectation is the member's probability combination.
pub fn build_member_operator(member: &ChainMember, frame: &MeasurementFrame) -> Result<HermitianOperator> {
    let n = member.n();
    if n > MAX_SPECTRUM_QUBITS {
        return Err(Error::ResourceLimit { n, cap: MAX_SPECTRUM_QUBITS });
    }
    if frame.n() != n {
        return Err(Error::Dimension { expected: n, got: frame.n() });
    }
    let mut terms = member.terms().into_iter();
    let first = terms.next().expect("members have at least one term");
    let mut op = term_operator(&first, n, frame)?;
    for t in terms {
        op.add_scaled(&term_operator(&t, n, frame)?, 1.0)?;
    }
    Ok(op)
}

pub fn build_x_operator(n: usize, frame: &MeasurementFrame) -> Result<HermitianOperator> {
    build_member_operator(&ChainMember::x(n)?, frame)
}

pub fn build_xij_operator(n: usize, i: usize, j: usize, frame: &MeasurementFrame) -> Result<HermitianOperator> {
    build_member_operator(&ChainMember::xij(n, i, j)?, frame)
}

pub fn build_xijk_operator(
    n: usize,
    i: usize,
    j: usize,
    k: usize,
    frame: &MeasurementFrame,
) -> Result<HermitianOperator> {
    build_member_operator(&ChainMember::xijk(n, i, j, k)?, frame)
}

pub fn build_xijkl_operator(
    n: usize,
    i: usize,
    j: usize,
    k: usize,
    l: usize,
    frame: &MeasurementFrame,
) -> Result<HermitianOperator> {
    build_member_operator(&ChainMember::xijkl(n, i, j, k, l)?, frame)
}

/// `2μ³ - (n+1)μ² + (2^{1-n} - 2 + n)μ - (n·2^{-n} + 2^{-n} - 1)`.
pub fn x_characteristic(n: usize) -> Poly {
    let nf = n as f64;
    let p = 2f64.powi(-(n as i32));
    Poly::new(vec![-(nf * p + p - 1.0), 2.0 * p - 2.0 + nf, -(nf + 1.0), 2.0])
}

/// `{4(μ-1)(2μ-n+1) - 3(n-2)}{μ(μ-1) + 2^{-n}} + (4μ-1)(μ-1)(2μ-1)`.
pub fn xij_characteristic(n: usize) -> Poly {
    let nf = n as f64;
    let lin = |a: f64, b: f64| Poly::new(vec![b, a]); // aμ + b
    let first = lin(1.0, -1.0).mul(&lin(2.0, 1.0 - nf)).scale(4.0).add(&Poly::new(vec![-3.0 * (nf - 2.0)]));
    let second = Poly::new(vec![2f64.powi(-(n as i32)), -1.0, 1.0]);
    let third = lin(4.0, -1.0).mul(&lin(1.0, -1.0)).mul(&lin(2.0, -1.0));
    first.mul(&second).add(&third)
}

/// The three eigenvalues of `X` carried by its invariant subspace, ascending.
pub fn cubic_eigenvalues_x(n: usize) -> Result<[f64; 3]> {
    if n < 2 {
        return Err(Error::InvalidMember(format!("X needs n >= 2, got {n}")));
    }
    let c = x_characteristic(n).0;
    cubic_real_roots(c[3], c[2], c[1], c[0])
}

/// The four eigenvalues of `X_ij` carried by its invariant subspace, ascending.
pub fn quartic_eigenvalues_xij(n: usize) -> Result<[f64; 4]> {
    if n < 3 {
        return Err(Error::InvalidMember(format!("Xij needs n >= 3, got {n}")));
    }
    quartic_real_roots(&xij_characteristic(n))
}

/// The product states that span the invariant subspaces (default frame).
#[derive(Debug, Clone)]
pub struct SpecialVectors {
    pub n: usize,
    /// `⊗|z-⟩`
    pub phi: StateVector,
    /// `⊗|x+⟩`
    pub chi: StateVector,
    /// `|Ψ_j⟩ = |z+⟩_j ⊗_{k≠j} |x+⟩`
    pub psi_j: Vec<StateVector>,
    /// `Σ_j |Ψ_j⟩`, not normalized.
    pub psi: StateVector,
    /// `|z+⟩_i |z-⟩_j ⊗_{k≠i,j} |x+⟩`, when indices were supplied.
    pub psi_ij: Option<StateVector>,
}

const Z_PLUS: [C64; 2] = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
const Z_MINUS: [C64; 2] = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
const X_PLUS: [C64; 2] =
    [C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0), C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)];

impl SpecialVectors {
    /// `pair` holds 1-based `(i, j)` for `|Ψ_ij⟩`.
    pub fn new(n: usize, pair: Option<(usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validation("n must be positive".into()));
        }
        let phi = StateVector::product(&vec![Z_MINUS; n])?;
        let chi = StateVector::product(&vec![X_PLUS; n])?;
        let psi_j = (0..n)
            .map(|j| StateVector::product(&(0..n).map(|k| if k == j { Z_PLUS } else { X_PLUS }).collect::<Vec<_>>()))
            .collect::<Result<Vec<_>>>()?;
        let psi = StateVector::unnormalized(sum_vectors(psi_j.iter().map(|s| (1.0, s))))?;
        let psi_ij = match pair {
            None => None,
            Some((i, j)) => {
                if i == 0 || i >= j || j > n {
                    return Err(Error::InvalidMember(format!("bad pair ({i}, {j}) for n = {n}")));
                }
                let f: Vec<_> = (1..=n)
                    .map(|k| {
                        if k == i {
                            Z_PLUS
                        } else if k == j {
                            Z_MINUS
                        } else {
                            X_PLUS
                        }
                    })
                    .collect();
                Some(StateVector::product(&f)?)
            }
        };
        Ok(SpecialVectors { n, phi, chi, psi_j, psi, psi_ij })
    }
}

fn sum_vectors<'a>(parts: impl Iterator<Item = (f64, &'a StateVector)>) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::new();
    for (w, s) in parts {
        if out.is_empty() {
            out = vec![C64::new(0.0, 0.0); s.dim()];
        }
        for (o, a) in out.iter_mut().zip(s.amplitudes()) {
            *o += a * w;
        }
    }
    out
}

/// Candidate eigenvector `Φ + (μ-1)2^{n/2} χ + 2^{(n+1)/2}(μ-1)/(2μ-n-1) Ψ`,
/// normalized.
pub fn eigenstate_x(n: usize, mu: f64) -> Result<StateVector> {
    if n < 2 {
        return Err(Error::InvalidMember(format!("X needs n >= 2, got {n}")));
    }
    let nf = n as f64;
    let denom = 2.0 * mu - nf - 1.0;
    if denom.abs() <= 1e-9 {
        return Err(Error::Singular(format!("2μ = n + 1 at μ = {mu}, n = {n}")));
    }
    let sv = SpecialVectors::new(n, None)?;
    let beta = (mu - 1.0) * 2f64.powf(nf / 2.0);
    let gamma = 2f64.powf((nf + 1.0) / 2.0) * (mu - 1.0) / denom;
    let amps = sum_vectors([(1.0, &sv.phi), (beta, &sv.chi), (gamma, &sv.psi)].into_iter());
    StateVector::new(amps)
}

/// `‖A v - μ v‖`.
pub fn eigen_residual(op: &HermitianOperator, v: &StateVector, mu: f64) -> Result<f64> {
    let av = op.apply(v.amplitudes())?;
    Ok(av.iter().zip(v.amplitudes()).map(|(x, y)| (x - y * mu).norm_sqr()).sum::<f64>().sqrt())
}

/// Result of applying an operator to the vectors spanning a claimed invariant
/// subspace.
#[derive(Debug, Clone)]
pub struct InvariantSubspaceCheck {
    /// Largest norm of the component of `A v_k` outside the span.
    pub residual: f64,
    /// `reduced[r][c]`: coefficient of `v_r` in `A v_c`.
    pub reduced: Vec<Vec<f64>>,
}

impl InvariantSubspaceCheck {
    /// Eigenvalues of the reduced matrix (real parts, ascending).
    pub fn reduced_eigenvalues(&self) -> Vec<f64> {
        let k = self.reduced.len();
        let m = DMatrix::from_fn(k, k, |r, c| self.reduced[r][c]);
        let mut ev: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// Applies the default-frame operator of `X` or `X_ij` to its spanning
/// vectors: `{Φ, χ, Ψ}` for `X`, and `{Φ, χ, Ψ_ij + √2 Ψ_j, Σ_{l≠i,j} Ψ_l}`
/// for `X_ij`.
pub fn verify_invariant_subspace(n: usize, kind: MemberKind, indices: &[usize]) -> Result<InvariantSubspaceCheck> {
    let member = ChainMember::new(kind, n, indices)?;
    let op = build_member_operator(&member, &default_frame(n))?;
    let basis: Vec<Vec<C64>> = match kind {
        MemberKind::X => {
            let sv = SpecialVectors::new(n, None)?;
            vec![sv.phi.amplitudes().to_vec(), sv.chi.amplitudes().to_vec(), sv.psi.amplitudes().to_vec()]
        }
        MemberKind::Xij => {
            let (i, j) = (indices[0], indices[1]);
            let sv = SpecialVectors::new(n, Some((i, j)))?;
            let psi_ij = sv.psi_ij.as_ref().expect("pair supplied");
            let third = sum_vectors([(1.0, psi_ij), (SQRT_2, &sv.psi_j[j - 1])].into_iter());
            let rest = sum_vectors((0..n).filter(|&l| l + 1 != i && l + 1 != j).map(|l| (1.0, &sv.psi_j[l])));
            vec![sv.phi.amplitudes().to_vec(), sv.chi.amplitudes().to_vec(), third, rest]
        }
        other => return Err(Error::InvalidMember(format!("no invariant subspace is known for {}", other.name()))),
    };
    let k = basis.len();
    let dim = basis[0].len();
    // Least squares in the (real) span: solve the Gram system.
    let gram = DMatrix::from_fn(k, k, |r, c| dot(&basis[r], &basis[c]).re);
    let gram_inv =
        gram.clone().try_inverse().ok_or_else(|| Error::Singular("spanning vectors are linearly dependent".into()))?;
    let mut reduced = vec![vec![0.0; k]; k];
    let mut residual = 0.0f64;
    for c in 0..k {
        let av = op.apply(&basis[c])?;
        let rhs = nalgebra::DVector::from_fn(k, |r, _| dot(&basis[r], &av).re);
        let coeffs = &gram_inv * rhs;
        let mut diff = av.clone();
        for r in 0..k {
            reduced[r][c] = coeffs[r];
            for t in 0..dim {
                diff[t] -= basis[r][t] * coeffs[r];
            }
        }
        residual = residual.max(diff.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt());
    }
    Ok(InvariantSubspaceCheck { residual, reduced })
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// One polynomial root and the closest eigenvalue of the full operator.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RootMatch {
    pub root: f64,
    pub nearest: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SpectrumReport {
    pub n: usize,
    pub member: ChainMember,
    pub polynomial_roots: Vec<f64>,
    pub spectrum: Vec<f64>,
    pub matched: Vec<RootMatch>,
    pub lhv_bounds: (i64, i64),
}

impl SpectrumReport {
    pub fn max_distance(&self) -> f64 {
        self.matched.iter().map(|m| m.distance).fold(0.0, f64::max)
    }

    /// Is the largest root above the LHV upper bound?
    pub fn violates_upper(&self) -> bool {
        self.polynomial_roots.iter().any(|&r| r > self.lhv_bounds.1 as f64)
    }

    /// Is the smallest root below the LHV lower bound?
    pub fn violates_lower(&self) -> bool {
        self.polynomial_roots.iter().any(|&r| r < self.lhv_bounds.0 as f64)
    }
}

/// Roots of the characteristic polynomial for `X` or `X_ij`, matched against
/// the full default-frame spectrum.
pub fn spectrum_report(member: &ChainMember) -> Result<SpectrumReport> {
    let n = member.n();
    let roots: Vec<f64> = match member.kind() {
        MemberKind::X => cubic_eigenvalues_x(n)?.to_vec(),
        MemberKind::Xij => quartic_eigenvalues_xij(n)?.to_vec(),
        other => return Err(Error::InvalidMember(format!("no characteristic polynomial for {}", other.name()))),
    };
    let op = build_member_operator(member, &default_frame(n))?;
    let spectrum = eigh(&op)?.values;
    let matched = roots
        .iter()
        .map(|&root| {
            let nearest = spectrum
                .iter()
                .copied()
                .min_by(|a, b| (a - root).abs().total_cmp(&(b - root).abs()))
                .expect("non-empty spectrum");
            RootMatch { root, nearest, distance: (nearest - root).abs() }
        })
        .collect();
    let upper = member.upper_bound().expect("named member");
    Ok(SpectrumReport { n, member: member.clone(), polynomial_roots: roots, spectrum, matched, lhv_bounds: (0, upper) })
}

/// Plain-text table in the column layout `n | polynomial roots | LHV bounds`.
/// `digits` is the number of decimals shown for each root.
pub fn format_table(reports: &[SpectrumReport], digits: usize) -> String {
    let name = reports.first().map(|r| r.member.kind().name()).unwrap_or("X");
    let rows: Vec<(String, String, String)> = reports
        .iter()
        .map(|r| {
            let roots: Vec<String> = r.polynomial_roots.iter().map(|x| format!("{x:.digits$}")).collect();
            (r.n.to_string(), roots.join(", "), format!("0 <= ({name})_LHV <= {}", r.lhv_bounds.1))
        })
        .collect();
    let head = ("n".to_string(), format!("Eigenvalues of {name}"), "LHV bounds".to_string());
    let w0 = rows.iter().map(|r| r.0.len()).chain([head.0.len()]).max().unwrap_or(1);
    let w1 = rows.iter().map(|r| r.1.len()).chain([head.1.len()]).max().unwrap_or(1);
    let mut out = String::new();
    for (a, b, c) in std::iter::once(&head).chain(&rows) {
        let _ = writeln!(out, "{a:>w0$} | {b:<w1$} | {c}");
    }
    out
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use crate::quantum::{expectation, MeasurementFrame, Z_AXIS};

    #[test]
    fn characteristic_n2_has_half_as_root() {
        assert!(x_characteristic(2).eval(0.5).abs() < 1e-15);
    }

    #[test]
    fn cubic_n2_closed_form() {
        let r = cubic_eigenvalues_x(2).unwrap();
        let s = 2f64.sqrt();
        assert!((r[0] - (1.0 - s) / 2.0).abs() < 1e-14);
        assert!((r[1] - 0.5).abs() < 1e-14);
        assert!((r[2] - (1.0 + s) / 2.0).abs() < 1e-14);
        assert!(cubic_eigenvalues_x(1).is_err());
    }

    #[test]
    fn quartic_n3_closed_form() {
        let r = quartic_eigenvalues_xij(3).unwrap();
        let h = 3f64.sqrt() / 2.0;
        let want = [
            (1.0 - (1.0 + h).sqrt()) / 2.0,
            (1.0 - (1.0 - h).sqrt()) / 2.0,
            (1.0 + (1.0 - h).sqrt()) / 2.0,
            (1.0 + (1.0 + h).sqrt()) / 2.0,
        ];
        for (g, w) in r.iter().zip(want) {
            assert!((g - w).abs() < 1e-12, "{g} vs {w}");
        }
        assert!(quartic_eigenvalues_xij(2).is_err());
    }

    #[test]
    fn operator_n2_spectrum() {
        let op = build_x_operator(2, &default_frame(2)).unwrap();
        let ev = eigh(&op).unwrap().values;
        let s = 2f64.sqrt();
        for want in [(1.0 - s) / 2.0, 0.5, (1.0 + s) / 2.0] {
            assert!(ev.iter().any(|x| (x - want).abs() < 1e-12), "{want} not in {ev:?}");
        }
    }

    #[test]
    fn all_z_frame_is_diagonal() {
        let frame = MeasurementFrame::uniform(2, Z_AXIS, Z_AXIS).unwrap();
        assert!(build_x_operator(2, &frame).unwrap().matrix().is_diagonal());
    }

    #[test]
    fn invalid_indices() {
        assert!(build_xij_operator(3, 2, 3, &default_frame(3)).is_err());
        assert!(build_x_operator(1, &default_frame(1)).is_err());
        assert!(build_x_operator(3, &default_frame(2)).is_err());
    }

    #[test]
    fn special_vectors_orthogonality() {
        let sv = SpecialVectors::new(4, Some((1, 3))).unwrap();
        for p in &sv.psi_j {
            assert!(sv.phi.inner(p).unwrap().norm() < 1e-15);
        }
        assert!(!sv.psi.is_normalized());
        assert!((sv.chi.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eigenstate_singular() {
        assert!(matches!(eigenstate_x(3, 2.0), Err(Error::Singular(_))));
    }

    #[test]
    fn eigenstate_n2() {
        let mu = (1.0 - 2f64.sqrt()) / 2.0;
        let op = build_x_operator(2, &default_frame(2)).unwrap();
        let eta = eigenstate_x(2, mu).unwrap();
        assert!(eigen_residual(&op, &eta, mu).unwrap() < 1e-10);
        assert!((expectation(&eta, &op).unwrap() - mu).abs() < 1e-12);
    }

    #[test]
    fn action_on_phi_matches_closed_form() {
        // X|Φ⟩ = |Φ⟩ - 2^{-n/2}|χ⟩,  X|χ⟩ = 2^{-n/2}|Φ⟩ - |χ⟩ + 2^{-1/2}|Ψ⟩,
        // X|Ψ⟩ = -n 2^{-1/2}|χ⟩ + (n+1)/2 |Ψ⟩.
        for n in 2..=5 {
            let chk = verify_invariant_subspace(n, MemberKind::X, &[]).unwrap();
            let nf = n as f64;
            let h = 2f64.powf(-nf / 2.0);
            let want = [[1.0, h, 0.0], [-h, -1.0, -nf / SQRT_2], [0.0, 1.0 / SQRT_2, (nf + 1.0) / 2.0]];
            for r in 0..3 {
                for c in 0..3 {
                    assert!((chk.reduced[r][c] - want[r][c]).abs() < 1e-12, "n={n} ({r},{c})");
                }
            }
        }
    }

    #[test]
    fn xij_action_matches_closed_form() {
        // Columns: images of Φ, χ, Ψ_ij + √2Ψ_j, Σ_{l≠i,j}Ψ_l, in that basis.
        for n in 3..=5 {
            let chk = verify_invariant_subspace(n, MemberKind::Xij, &[1, 2]).unwrap();
            assert!(chk.residual < 1e-10);
            let nf = n as f64;
            let h = 2f64.powf(-nf / 2.0);
            let want = [
                [1.0, h, 0.0, 0.0],
                [-h, -1.0, -1.5, -(nf - 2.0) / SQRT_2],
                [0.0, 0.5, 1.0, (nf - 2.0) / (2.0 * SQRT_2)],
                [0.0, 1.0 / SQRT_2, 3.0 / (2.0 * SQRT_2), (nf - 1.0) / 2.0],
            ];
            for r in 0..4 {
                for c in 0..4 {
                    assert!((chk.reduced[r][c] - want[r][c]).abs() < 1e-12, "n={n} ({r},{c}): {}", chk.reduced[r][c]);
                }
            }
        }
    }

    #[test]
    fn table_layout() {
        let rep = spectrum_report(&ChainMember::x(2).unwrap()).unwrap();
        let t = format_table(&[rep], 5);
        assert!(t.contains("-0.20711, 0.50000, 1.20711"));
        assert!(t.contains("0 <= (X)_LHV <= 1"));
    }
}
