//! Pure-state n-qubit simulation.
//!
//! Qubit 1 is the most significant bit of an amplitude index. The
//! computational basis state `|0⟩` is `|z+⟩` (σ_z eigenvalue +1), so with the
//! unprimed axis along ẑ the outcome `e_i = 1` is `|0⟩` on that qubit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::{Factor, Setting, Term};
use crate::error::{Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const NORM_TOL: f64 = 1e-10;
pub const AXIS_TOL: f64 = 1e-12;
/// Largest operator dimension the dense routines accept.
pub const MAX_DIM: usize = 4096;

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::Dimension { expected: dim * dim, got: data.len() });
        }
        Ok(CMatrix { dim, data })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let data = rows
            .iter()
            .map(|r| {
                if r.len() != dim {
                    Err(Error::Dimension { expected: dim, got: r.len() })
                } else {
                    Ok(r.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CMatrix { dim, data: data.concat() })
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                m[(c, r)] = self[(r, c)].conj();
            }
        }
        m
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.dim != other.dim {
            return Err(Error::Dimension { expected: self.dim, got: other.dim });
        }
        let d = self.dim;
        let mut out = Self::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                for c in 0..d {
                    out.data[r * d + c] += a * other.data[k * d + c];
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: v.len() });
        }
        Ok(self.data.chunks_exact(self.dim).map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect())
    }

    pub fn scale(&self, s: C64) -> Self {
        CMatrix { dim: self.dim, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn add(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.dim != other.dim {
            return Err(Error::Dimension { expected: self.dim, got: other.dim });
        }
        Ok(CMatrix { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix> {
        self.add(&other.scale(-ONE))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry of `|A - A†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for c in r..self.dim {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let (a, b) = (self.dim, other.dim);
        let d = a * b;
        let mut out = Self::zeros(d);
        for r1 in 0..a {
            for c1 in 0..a {
                let x = self[(r1, c1)];
                if x == ZERO {
                    continue;
                }
                for r2 in 0..b {
                    for c2 in 0..b {
                        out.data[(r1 * b + r2) * d + c1 * b + c2] = x * other[(r2, c2)];
                    }
                }
            }
        }
        out
    }

    /// Is every off-diagonal entry exactly zero?
    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|r| (0..self.dim).all(|c| r == c || self[(r, c)] == ZERO))
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.dim + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.dim + c]
    }
}

/// A dense matrix known to be Hermitian within [`HERMITIAN_TOL`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorRepr", into = "OperatorRepr")]
pub struct HermitianOperator(CMatrix);

#[derive(Serialize, Deserialize)]
struct OperatorRepr {
    dim: usize,
    entries: Vec<C64>,
}

impl TryFrom<OperatorRepr> for HermitianOperator {
    type Error = Error;

    fn try_from(r: OperatorRepr) -> Result<Self> {
        HermitianOperator::new(CMatrix::from_row_major(r.dim, r.entries)?)
    }
}

impl From<HermitianOperator> for OperatorRepr {
    fn from(h: HermitianOperator) -> Self {
        OperatorRepr { dim: h.0.dim, entries: h.0.data }
    }
}

impl HermitianOperator {
    pub fn new(m: CMatrix) -> Result<Self> {
        let defect = m.hermiticity_defect();
        if !(defect < HERMITIAN_TOL) {
            return Err(Error::Validation(format!("matrix is not Hermitian (defect {defect:.3e})")));
        }
        Ok(HermitianOperator(m))
    }

    pub fn identity(dim: usize) -> Self {
        HermitianOperator(CMatrix::identity(dim))
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        self.0.apply(v)
    }

    /// Real linear combination of Hermitian operators stays Hermitian.
    pub fn add_scaled(&mut self, other: &HermitianOperator, s: f64) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: other.dim() });
        }
        for (a, b) in self.0.data.iter_mut().zip(&other.0.data) {
            *a += b * s;
        }
        Ok(())
    }
}

fn pauli_dot(axis: [f64; 3]) -> [[C64; 2]; 2] {
    let [x, y, z] = axis;
    [[C64::new(z, 0.0), C64::new(x, -y)], [C64::new(x, y), C64::new(-z, 0.0)]]
}

fn check_axis(axis: [f64; 3]) -> Result<()> {
    let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !((norm - 1.0).abs() <= AXIS_TOL) {
        return Err(Error::Validation(format!("Bloch axis {axis:?} has norm {norm}, not 1")));
    }
    Ok(())
}

fn projector_2x2(axis: [f64; 3], outcome: u8) -> [[C64; 2]; 2] {
    let s = if outcome == 1 { 0.5 } else { -0.5 };
    let p = pauli_dot(axis);
    let mut out = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            let id = if r == c { 0.5 } else { 0.0 };
            out[r][c] = C64::new(id, 0.0) + p[r][c] * s;
        }
    }
    out
}

/// `(I + σ·a)/2` for outcome 1, `(I - σ·a)/2` for outcome 0.
pub fn projector(axis: [f64; 3], outcome: u8) -> Result<HermitianOperator> {
    check_axis(axis)?;
    if outcome > 1 {
        return Err(Error::Validation(format!("outcome {outcome} is not 0 or 1")));
    }
    let p = projector_2x2(axis, outcome);
    Ok(HermitianOperator(CMatrix { dim: 2, data: vec![p[0][0], p[0][1], p[1][0], p[1][1]] }))
}

/// Kronecker product in qubit order, first factor most significant.
pub fn tensor(factors: &[HermitianOperator]) -> Result<HermitianOperator> {
    let (first, rest) = factors.split_first().ok_or_else(|| Error::Validation("tensor of an empty list".into()))?;
    let dim: usize = factors.iter().map(|f| f.dim()).product();
    if dim > MAX_DIM {
        return Err(Error::ResourceLimit { n: dim, cap: MAX_DIM });
    }
    let m = rest.iter().fold(first.0.clone(), |acc, f| acc.kron(&f.0));
    Ok(HermitianOperator(m))
}

/// An n-qubit pure state. States built from raw amplitudes are normalized on
/// construction; [`StateVector::unnormalized`] keeps the raw vector and marks
/// it so probability routines refuse it.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: Vec<C64>,
    normalized: bool,
}

impl Serialize for StateVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.amplitudes.serialize(s)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let amps = Vec::<C64>::deserialize(d)?;
        StateVector::new(amps).map_err(serde::de::Error::custom)
    }
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::Validation(format!("{len} amplitudes is not 2^n with n >= 1")));
    }
    Ok(len.trailing_zeros() as usize)
}

impl StateVector {
    /// Normalizes the given amplitudes; the length must be `2^n`.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let n = qubits_for_len(amplitudes.len())?;
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Validation("cannot normalize a zero or non-finite vector".into()));
        }
        Ok(StateVector { n, amplitudes: amplitudes.into_iter().map(|a| a / norm).collect(), normalized: true })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Keeps the amplitudes as given. Probabilities reject such states.
    pub fn unnormalized(amplitudes: Vec<C64>) -> Result<Self> {
        let n = qubits_for_len(amplitudes.len())?;
        Ok(StateVector { n, amplitudes, normalized: false })
    }

    /// Builds a normalized state from coefficients `c[e_1 e_2 ... e_n]` labelled
    /// by the unprimed outcomes (qubit 1 first), assuming the unprimed axis is
    /// ẑ on every qubit. Outcome `e = 1` is `|0⟩`, so the index bits flip.
    pub fn from_outcome_coefficients(c: &[f64]) -> Result<Self> {
        let len = c.len();
        qubits_for_len(len)?;
        let mask = len - 1;
        let mut amps = vec![ZERO; len];
        for (label, &v) in c.iter().enumerate() {
            amps[!label & mask] = C64::new(v, 0.0);
        }
        Self::new(amps)
    }

    /// `⊗_k |v_k⟩` from single-qubit vectors.
    pub fn product(factors: &[[C64; 2]]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Validation("product of no qubits".into()));
        }
        let mut amps = vec![ONE];
        for f in factors {
            amps = amps.iter().flat_map(|a| [a * f[0], a * f[1]]).collect();
        }
        Self::new(amps)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: other.dim() });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    fn require_normalized(&self) -> Result<()> {
        if !self.normalized || (self.norm() - 1.0).abs() > NORM_TOL {
            return Err(Error::Validation("state is not normalized".into()));
        }
        Ok(())
    }

    /// Applies a 2x2 matrix to qubit `q` (0-based) in place.
    fn apply_single(amps: &mut [C64], n: usize, q: usize, m: &[[C64; 2]; 2]) {
        let stride = 1usize << (n - 1 - q);
        for base in (0..amps.len()).step_by(2 * stride) {
            for off in base..base + stride {
                let (a0, a1) = (amps[off], amps[off + stride]);
                amps[off] = m[0][0] * a0 + m[0][1] * a1;
                amps[off + stride] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }
}

/// Per-qubit measurement axes for the unprimed (`e_i`) and primed (`e'_i`)
/// settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FrameRepr")]
pub struct MeasurementFrame {
    unprimed: Vec<[f64; 3]>,
    primed: Vec<[f64; 3]>,
}

#[derive(Deserialize)]
struct FrameRepr {
    unprimed: Vec<[f64; 3]>,
    primed: Vec<[f64; 3]>,
}

impl TryFrom<FrameRepr> for MeasurementFrame {
    type Error = Error;

    fn try_from(r: FrameRepr) -> Result<Self> {
        MeasurementFrame::new(r.unprimed, r.primed)
    }
}

pub const Z_AXIS: [f64; 3] = [0.0, 0.0, 1.0];
pub const X_AXIS: [f64; 3] = [1.0, 0.0, 0.0];

impl MeasurementFrame {
    pub fn new(unprimed: Vec<[f64; 3]>, primed: Vec<[f64; 3]>) -> Result<Self> {
        if unprimed.is_empty() {
            return Err(Error::Validation("frame needs at least one qubit".into()));
        }
        if unprimed.len() != primed.len() {
            return Err(Error::Dimension { expected: unprimed.len(), got: primed.len() });
        }
        for &a in unprimed.iter().chain(&primed) {
            check_axis(a)?;
        }
        Ok(MeasurementFrame { unprimed, primed })
    }

    /// Same axes on every qubit.
    pub fn uniform(n: usize, unprimed: [f64; 3], primed: [f64; 3]) -> Result<Self> {
        Self::new(vec![unprimed; n], vec![primed; n])
    }

    /// Unprimed ẑ, primed x̂ on every qubit.
    pub fn z_x(n: usize) -> Self {
        MeasurementFrame { unprimed: vec![Z_AXIS; n], primed: vec![X_AXIS; n] }
    }

    pub fn n(&self) -> usize {
        self.unprimed.len()
    }

    pub fn axis(&self, q: usize, setting: Setting) -> [f64; 3] {
        match setting {
            Setting::Unprimed => self.unprimed[q],
            Setting::Primed => self.primed[q],
        }
    }

    pub fn unprimed(&self) -> &[[f64; 3]] {
        &self.unprimed
    }

    pub fn primed(&self) -> &[[f64; 3]] {
        &self.primed
    }
}

/// An n-fold coincidence: one `(setting, outcome)` per qubit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    constraints: Vec<(Setting, u8)>,
}

impl Event {
    pub fn new(constraints: Vec<(Setting, u8)>) -> Result<Self> {
        if constraints.is_empty() {
            return Err(Error::Validation("event constrains no qubit".into()));
        }
        if let Some((_, o)) = constraints.iter().find(|(_, o)| *o > 1) {
            return Err(Error::Validation(format!("outcome {o} is not 0 or 1")));
        }
        Ok(Event { constraints })
    }

    pub fn uniform(n: usize, setting: Setting, outcome: u8) -> Result<Self> {
        Self::new(vec![(setting, outcome); n])
    }

    /// The event of a term that constrains every qubit.
    pub fn from_term(term: &Term, n: usize) -> Result<Self> {
        if !term.is_full(n) {
            return Err(Error::Validation(format!("term {term} does not constrain all {n} qubits")));
        }
        Self::new(term.factors.iter().map(|&(_, f)| (f.setting(), f.outcome())).collect())
    }

    pub fn n(&self) -> usize {
        self.constraints.len()
    }

    pub fn constraints(&self) -> &[(Setting, u8)] {
        &self.constraints
    }
}

/// Quantum probability of a coincidence event: the squared norm of the state
/// after applying each qubit's projector in turn.
pub fn joint_probability(state: &StateVector, frame: &MeasurementFrame, event: &Event) -> Result<f64> {
    state.require_normalized()?;
    let n = state.n();
    for other in [frame.n(), event.n()] {
        if other != n {
            return Err(Error::Dimension { expected: n, got: other });
        }
    }
    let mut amps = state.amplitudes.clone();
    for (q, &(setting, outcome)) in event.constraints.iter().enumerate() {
        let p = projector_2x2(frame.axis(q, setting), outcome);
        StateVector::apply_single(&mut amps, n, q, &p);
    }
    clamp_probability(amps.iter().map(|a| a.norm_sqr()).sum())
}

/// Probability of a term's event; qubits the term leaves out are summed over.
pub fn term_probability(state: &StateVector, frame: &MeasurementFrame, term: &Term) -> Result<f64> {
    state.require_normalized()?;
    let n = state.n();
    if frame.n() != n {
        return Err(Error::Dimension { expected: n, got: frame.n() });
    }
    let mut amps = state.amplitudes.clone();
    for &(q, f) in &term.factors {
        if q >= n {
            return Err(Error::Dimension { expected: n, got: q + 1 });
        }
        let p = projector_2x2(frame.axis(q, f.setting()), f.outcome());
        StateVector::apply_single(&mut amps, n, q, &p);
    }
    clamp_probability(amps.iter().map(|a| a.norm_sqr()).sum())
}

fn clamp_probability(p: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&p) {
        return Err(Error::Validation(format!("probability {p} outside [0, 1]")));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// `Re ⟨ψ|A|ψ⟩`.
pub fn expectation(state: &StateVector, op: &HermitianOperator) -> Result<f64> {
    state.require_normalized()?;
    if op.dim() != state.dim() {
        return Err(Error::Dimension { expected: op.dim(), got: state.dim() });
    }
    let av = op.apply(&state.amplitudes)?;
    let val: C64 = state.amplitudes.iter().zip(&av).map(|(a, b)| a.conj() * b).sum();
    if val.im.abs() >= 1e-10 {
        return Err(Error::Validation(format!("expectation has imaginary part {}", val.im)));
    }
    Ok(val.re)
}

/// Operator of a single product term: the tensor product of the selected
/// projectors, with identity on qubits the term leaves out.
pub fn term_operator(term: &Term, n: usize, frame: &MeasurementFrame) -> Result<HermitianOperator> {
    if frame.n() != n {
        return Err(Error::Dimension { expected: n, got: frame.n() });
    }
    let mut factors = vec![HermitianOperator::identity(2); n];
    for &(q, f) in &term.factors {
        factors[q] = projector(frame.axis(q, f.setting()), f.outcome())?;
    }
    let mut op = tensor(&factors)?;
    if term.sign != 1 {
        op = HermitianOperator(op.0.scale(C64::new(term.sign as f64, 0.0)));
    }
    Ok(op)
}

/// The single-qubit eigenvector of `σ·a` for the given outcome (1 ↔ +1).
pub fn axis_eigenvector(axis: [f64; 3], outcome: u8) -> [C64; 2] {
    let [x, y, z] = axis;
    let (sign, theta) = (if outcome == 1 { 1.0 } else { -1.0 }, z.clamp(-1.0, 1.0).acos());
    let phase = C64::from_polar(1.0, y.atan2(x));
    if sign > 0.0 {
        [C64::new((theta / 2.0).cos(), 0.0), phase * (theta / 2.0).sin()]
    } else {
        [C64::new(-(theta / 2.0).sin(), 0.0), phase * (theta / 2.0).cos()]
    }
}

/// Factor's single-qubit vector under the given frame.
pub fn factor_vector(frame: &MeasurementFrame, q: usize, f: Factor) -> [C64; 2] {
    axis_eigenvector(frame.axis(q, f.setting()), f.outcome())
}
