//! Hardy-type arguments without inequalities: premise/conclusion checks on
//! quantum states, the closed-form three-qubit stationary family, and a
//! penalty-method search for the largest violation.
//!
//! Every variant shares the same shape. If `P(e'_k = 1 ∀k) > 0` and a set of
//! coincidence probabilities vanishes, local realism forces
//! `P(e_k = 0 ∀k) >= P(e'_k = 1 ∀k)`. The vanishing set is exactly the list of
//! positive terms of the matching chain member other than `∏ ē_k`.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{ChainMember, MemberKind, Setting, Term};
use crate::error::{Error, Result};
use crate::lhv::{all_primed_one, all_unprimed_zero, eval_term, Assignment, ExhaustiveCheck};
use crate::quantum::{axis_eigenvector, term_probability, MeasurementFrame, StateVector, C64, Z_AXIS};
use crate::simplex::{minimize, SimplexOptions};

pub const DEFAULT_ZERO_TOL: f64 = 1e-9;
/// Largest `n` the optimizer accepts.
pub const MAX_OPTIMIZER_QUBITS: usize = 6;

/// `(5√5 - 11)/2`, the three-qubit optimum of variant (i).
pub fn golden_optimum() -> f64 {
    (5.0 * 5f64.sqrt() - 11.0) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HardyKind {
    Standard,
    VariantI,
    VariantII,
    VariantIII,
}

impl HardyKind {
    fn member_kind(self) -> MemberKind {
        match self {
            HardyKind::Standard => MemberKind::X,
            HardyKind::VariantI => MemberKind::Xij,
            HardyKind::VariantII => MemberKind::Xijk,
            HardyKind::VariantIII => MemberKind::Xijkl,
        }
    }
}

impl FromStr for HardyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "standard" | "std" | "0" => Ok(HardyKind::Standard),
            "i" | "1" | "variant-i" | "varianti" => Ok(HardyKind::VariantI),
            "ii" | "2" | "variant-ii" | "variantii" => Ok(HardyKind::VariantII),
            "iii" | "3" | "variant-iii" | "variantiii" => Ok(HardyKind::VariantIII),
            other => Err(Error::Parse(format!("unknown Hardy variant `{other}`"))),
        }
    }
}

/// A Hardy-type constraint family together with its qubit count and indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HardyVariant {
    pub kind: HardyKind,
    member: ChainMember,
}

impl HardyVariant {
    /// `indices` are 1-based, with the same constraints as the chain members:
    /// none for `Standard`, `i < j < n` for (i), `i < j < k < n` for (ii) and
    /// `i < j < k < l < n` for (iii).
    pub fn new(kind: HardyKind, n: usize, indices: &[usize]) -> Result<Self> {
        let member = ChainMember::new(kind.member_kind(), n, indices)?;
        Ok(HardyVariant { kind, member })
    }

    pub fn n(&self) -> usize {
        self.member.n()
    }

    pub fn indices(&self) -> &[usize] {
        self.member.indices()
    }

    /// The associated chain member.
    pub fn member(&self) -> &ChainMember {
        &self.member
    }

    /// The coincidence probabilities the premises require to vanish.
    pub fn zero_terms(&self) -> Vec<Term> {
        self.member.terms().into_iter().skip(2).collect()
    }

    /// Zero terms plus the conclusion event, which the quantum violation also
    /// drives to zero.
    pub fn constraint_terms(&self) -> Vec<Term> {
        let mut t = self.zero_terms();
        t.push(all_unprimed_zero(self.n()));
        t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroTerm {
    pub event: String,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyReport {
    pub variant: ChainMember,
    /// `P(e'_k = 1 ∀k)`
    pub target: f64,
    pub zero_terms: Vec<ZeroTerm>,
    /// `P(e_k = 0 ∀k)`
    pub conclusion: f64,
    pub tolerance: f64,
    pub premises_hold: bool,
    pub lhv_violated: bool,
}

impl HardyReport {
    /// Largest of the zero-term probabilities and the conclusion.
    pub fn constraint_residual(&self) -> f64 {
        self.zero_terms.iter().map(|z| z.probability).fold(self.conclusion, f64::max)
    }
}

pub fn check_hardy(
    state: &StateVector,
    frame: &MeasurementFrame,
    variant: &HardyVariant,
    tol: f64,
) -> Result<HardyReport> {
    let n = variant.n();
    if state.n() != n {
        return Err(Error::Dimension { expected: n, got: state.n() });
    }
    if !(tol > 0.0) {
        return Err(Error::Validation(format!("zero tolerance must be positive, got {tol}")));
    }
    let target = term_probability(state, frame, &all_primed_one(n))?;
    let conclusion = term_probability(state, frame, &all_unprimed_zero(n))?;
    let zero_terms = variant
        .zero_terms()
        .iter()
        .map(|t| Ok(ZeroTerm { event: t.describe(), probability: term_probability(state, frame, t)? }))
        .collect::<Result<Vec<_>>>()?;
    let premises_hold = target > tol && zero_terms.iter().all(|z| z.probability <= tol);
    let lhv_violated = premises_hold && conclusion < target - tol;
    Ok(HardyReport {
        variant: variant.member.clone(),
        target,
        zero_terms,
        conclusion,
        tolerance: tol,
        premises_hold,
        lhv_violated,
    })
}

/// Exhaustive check that the premises force the conclusion at every LHV
/// vertex: wherever all zero terms vanish, `[e = 0 ∀k] >= [e' = 1 ∀k]`.
/// Any distribution supported on such vertices then satisfies the conclusion.
pub fn premises_force_conclusion(variant: &HardyVariant) -> Result<ExhaustiveCheck> {
    let n = variant.n();
    if n > 12 {
        return Err(Error::ResourceLimit { n, cap: 12 });
    }
    let zero = variant.zero_terms();
    let (target, conclusion) = (all_primed_one(n), all_unprimed_zero(n));
    for word in 0..1u64 << (2 * n) {
        let a = Assignment::from_word(n, word)?;
        if zero.iter().all(|t| eval_term(t, &a) == 0) && eval_term(&conclusion, &a) < eval_term(&target, &a) {
            return Ok(ExhaustiveCheck { holds: false, counterexample: Some(a) });
        }
    }
    Ok(ExhaustiveCheck { holds: true, counterexample: None })
}

/// Per-qubit real `(a_i, b_i)` of the unitary relating the primed and
/// unprimed eigenbases: `|e'=0⟩ = -a|e=0⟩ + b|e=1⟩`, `|e'=1⟩ = b|e=0⟩ + a|e=1⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalUnitaryParams {
    pub pairs: Vec<(f64, f64)>,
}

impl LocalUnitaryParams {
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Validation("no qubits".into()));
        }
        for &(a, b) in &pairs {
            if !((a * a + b * b - 1.0).abs() <= 1e-12) {
                return Err(Error::Validation(format!("a² + b² = {} for ({a}, {b})", a * a + b * b)));
            }
        }
        Ok(LocalUnitaryParams { pairs })
    }

    /// `(cos θ_i, sin θ_i)` per qubit.
    pub fn from_angles(theta: &[f64]) -> Self {
        LocalUnitaryParams { pairs: theta.iter().map(|t| (t.cos(), t.sin())).collect() }
    }

    /// Unprimed axis ẑ; primed axis `(2ab, 0, a² - b²)`, the Bloch vector of
    /// `b|z-⟩ + a|z+⟩`.
    pub fn frame(&self) -> MeasurementFrame {
        let primed = self.pairs.iter().map(|&(a, b)| primed_axis(a, b, 0.0)).collect();
        MeasurementFrame::new(vec![Z_AXIS; self.pairs.len()], primed).expect("unit axes by construction")
    }
}

fn primed_axis(a: f64, b: f64, azimuth: f64) -> [f64; 3] {
    let s = 2.0 * a * b;
    let z = a * a - b * b;
    // Renormalize away rounding so the frame check passes.
    let norm = (s * s + z * z).sqrt();
    [s * azimuth.cos() / norm, s * azimuth.sin() / norm, z / norm]
}

/// `u v (1-v)(1-u) / (v(1-u) + u)` with `u = b_1²b_2²`, `v = b_3²`.
pub fn stationary_probability_n3(u: f64, v: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) || !(0.0..=1.0).contains(&v) {
        return Err(Error::Domain(format!("(u, v) = ({u}, {v}) outside [0, 1]²")));
    }
    let denom = v * (1.0 - u) + u;
    if denom <= 0.0 {
        return Err(Error::Domain("denominator v(1-u) + u vanishes".into()));
    }
    Ok(u * v * (1.0 - v) * (1.0 - u) / denom)
}

/// The stationary three-qubit state for variant (1,2), in outcome labels
/// `c_{e1e2e3}` with `c_000 = 0`.
pub fn construct_stationary_state_n3(params: &LocalUnitaryParams) -> Result<StateVector> {
    if params.pairs.len() != 3 {
        return Err(Error::Dimension { expected: 3, got: params.pairs.len() });
    }
    let [(a1, b1), (a2, b2), (a3, b3)] = [params.pairs[0], params.pairs[1], params.pairs[2]];
    let bb = b1 * b1 * b2 * b2;
    let norm_sq = (1.0 - bb) * (b3 * b3 * (1.0 - bb) + bb);
    if !(norm_sq > 1e-300) {
        return Err(Error::Singular("b_3²(1 - b_1²b_2²) + b_1²b_2² or 1 - b_1²b_2² vanishes".into()));
    }
    let k = 1.0 / norm_sq.sqrt();
    let c = [
        0.0,
        b3 * (1.0 - bb),
        a2 * a3 * b1 * b1 * b2,
        -b1 * b1 * a2 * b2 * b3,
        a1 * b1 * b2 * b2 * a3,
        -a1 * b1 * b2 * b2 * b3,
        a1 * a2 * a3 * b1 * b2,
        -a1 * a2 * b1 * b2 * b3,
    ]
    .map(|x| x * k);
    StateVector::from_outcome_coefficients(&c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryScan {
    pub u: f64,
    pub v: f64,
    pub value: f64,
    pub grid_value: f64,
}

/// Grid scan of the stationary surface over `(0, 1)²` followed by simplex
/// refinement from the best grid cell.
pub fn scan_stationary_surface_n3(resolution: usize) -> Result<StationaryScan> {
    if resolution < 100 {
        return Err(Error::Validation(format!("resolution must be >= 100, got {resolution}")));
    }
    let h = 1.0 / resolution as f64;
    let mut best = (0.0, 0.0, f64::NEG_INFINITY);
    for iu in 0..resolution {
        let u = (iu as f64 + 0.5) * h;
        for iv in 0..resolution {
            let v = (iv as f64 + 0.5) * h;
            let p = stationary_probability_n3(u, v)?;
            if p > best.2 {
                best = (u, v, p);
            }
        }
    }
    let objective = |x: &[f64]| match stationary_probability_n3(x[0], x[1]) {
        Ok(p) if x[0] > 0.0 && x[0] < 1.0 && x[1] > 0.0 && x[1] < 1.0 => -p,
        _ => f64::INFINITY,
    };
    let opts = SimplexOptions { max_evals: 5_000, f_tol: 0.0, x_tol: 1e-13 };
    let r = minimize(objective, &[best.0, best.1], h / 2.0, opts);
    Ok(StationaryScan { u: r.x[0], v: r.x[1], value: -r.f, grid_value: best.2 })
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OptimizerConfig {
    pub starts: usize,
    pub seed: u64,
    pub penalty_start: f64,
    pub penalty_end: f64,
    pub penalty_growth: f64,
    /// Simplex evaluation budget per penalty round.
    pub inner_evals: usize,
    /// Maximum allowed constraint probability in the returned point.
    pub tolerance: f64,
    /// Search complex amplitudes and primed-axis azimuths as well.
    pub complex: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            starts: 32,
            seed: 0x5eed,
            penalty_start: 1e2,
            penalty_end: 1e8,
            penalty_growth: 10.0,
            inner_evals: 6_000,
            tolerance: 1e-6,
            complex: false,
        }
    }
}

impl OptimizerConfig {
    fn validate(&self) -> Result<()> {
        let ok = self.starts > 0
            && self.penalty_start > 0.0
            && self.penalty_end >= self.penalty_start
            && self.penalty_growth > 1.0
            && self.inner_evals > 0
            && self.tolerance > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Validation(format!("bad optimizer config {self:?}")))
        }
    }

    fn penalties(&self) -> Vec<f64> {
        let mut w = self.penalty_start;
        let mut out = Vec::new();
        while w <= self.penalty_end * (1.0 + 1e-12) {
            out.push(w);
            w *= self.penalty_growth;
        }
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OptimizationResult {
    pub variant: ChainMember,
    pub best_value: f64,
    pub state: StateVector,
    pub frame: MeasurementFrame,
    /// Largest constraint probability (zero terms and conclusion).
    pub constraint_residual: f64,
    pub best_start: usize,
    pub feasible_starts: usize,
    pub evaluations: usize,
    pub iterations: usize,
}

/// Decoded search point: state amplitudes and per-qubit primed-axis angles.
struct Point {
    amps: Vec<C64>,
    theta: Vec<f64>,
    azimuth: Vec<f64>,
}

struct Layout {
    n: usize,
    dim: usize,
    complex: bool,
}

impl Layout {
    fn len(&self) -> usize {
        if self.complex {
            2 * self.dim + 2 * self.n
        } else {
            self.dim + self.n
        }
    }

    fn decode(&self, x: &[f64]) -> Point {
        let (d, n) = (self.dim, self.n);
        if self.complex {
            Point {
                amps: (0..d).map(|k| C64::new(x[k], x[d + k])).collect(),
                theta: x[2 * d..2 * d + n].to_vec(),
                azimuth: x[2 * d + n..].to_vec(),
            }
        } else {
            Point {
                amps: x[..d].iter().map(|&r| C64::new(r, 0.0)).collect(),
                theta: x[d..].to_vec(),
                azimuth: vec![0.0; n],
            }
        }
    }
}

impl Point {
    fn frame(&self) -> MeasurementFrame {
        let primed = self
            .theta
            .iter()
            .zip(&self.azimuth)
            .map(|(&t, &phi)| {
                let (a, b) = (t.cos(), t.sin());
                if (2.0 * a * b).abs() < 1e-300 && (a * a - b * b).abs() < 1e-300 {
                    Z_AXIS
                } else {
                    primed_axis(a, b, phi)
                }
            })
            .collect();
        MeasurementFrame::new(vec![Z_AXIS; self.theta.len()], primed).expect("unit axes by construction")
    }
}

/// Product vector `⊗_q |v_q⟩` of a full term under a frame.
fn term_vector(term: &Term, frame: &MeasurementFrame) -> Vec<C64> {
    let mut out = vec![C64::new(1.0, 0.0)];
    for &(q, f) in &term.factors {
        let v = axis_eigenvector(frame.axis(q, f.setting()), f.outcome());
        out = out.iter().flat_map(|a| [a * v[0], a * v[1]]).collect();
    }
    out
}

fn overlap_sq(v: &[C64], amps: &[C64]) -> f64 {
    v.iter().zip(amps).map(|(a, b)| a.conj() * b).sum::<C64>().norm_sqr()
}

/// Projects `amps` onto the orthogonal complement of the constraint vectors.
fn project_out(amps: &mut [C64], constraints: &[Vec<C64>]) {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for c in constraints {
        let mut v = c.clone();
        for _ in 0..2 {
            for b in &basis {
                let proj: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= proj * bi;
                }
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-10 {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    for _ in 0..2 {
        for b in &basis {
            let proj: C64 = b.iter().zip(amps.iter()).map(|(x, y)| x.conj() * y).sum();
            for (a, bi) in amps.iter_mut().zip(b) {
                *a -= proj * bi;
            }
        }
    }
}

struct StartOutcome {
    value: f64,
    residual: f64,
    state: StateVector,
    frame: MeasurementFrame,
    evals: usize,
    iterations: usize,
}

fn run_start(variant: &HardyVariant, config: &OptimizerConfig, layout: &Layout, start: usize) -> Result<StartOutcome> {
    let n = variant.n();
    let target_term = all_primed_one(n);
    let constraints = variant.constraint_terms();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(start as u64);

    let mut x: Vec<f64> = (0..layout.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let angle_offset = if layout.complex { 2 * layout.dim } else { layout.dim };
    for t in &mut x[angle_offset..] {
        *t *= std::f64::consts::PI;
    }

    let objective = |x: &[f64], w: f64| {
        let p = layout.decode(x);
        let norm_sq: f64 = p.amps.iter().map(|a| a.norm_sqr()).sum();
        if !(norm_sq > 1e-12) {
            return f64::INFINITY;
        }
        let frame = p.frame();
        let target = overlap_sq(&term_vector(&target_term, &frame), &p.amps) / norm_sq;
        let penalty: f64 = constraints
            .iter()
            .map(|t| {
                let q = overlap_sq(&term_vector(t, &frame), &p.amps) / norm_sq;
                q * q
            })
            .sum();
        // Keep the amplitude scale near 1 so the simplex does not drift.
        -target + w * penalty + 1e-3 * (norm_sq - 1.0).powi(2)
    };

    let (mut evals, mut iterations) = (0, 0);
    for (round, &w) in config.penalties().iter().enumerate() {
        let step = if round == 0 { 0.5 } else { 0.05 };
        let opts = SimplexOptions { max_evals: config.inner_evals, f_tol: 1e-15, x_tol: 1e-10 };
        let r = minimize(|x| objective(x, w), &x, step, opts);
        evals += r.evals;
        iterations += r.iterations;
        x = r.x;
    }

    let p = layout.decode(&x);
    let frame = p.frame();
    let mut amps = p.amps;
    let vecs: Vec<Vec<C64>> = constraints.iter().map(|t| term_vector(t, &frame)).collect();
    project_out(&mut amps, &vecs);
    let state = StateVector::new(amps)?;
    let report = check_hardy(&state, &frame, variant, config.tolerance)?;
    Ok(StartOutcome { value: report.target, residual: report.constraint_residual(), state, frame, evals, iterations })
}

/// Maximizes `P(e'_k = 1 ∀k)` subject to the variant's zero terms and
/// `P(e_k = 0 ∀k) = 0`.
///
/// Each start minimizes `-target + w Σ p_c²` with a simplex search, raising
/// `w` geometrically between rounds. The end point is then projected onto
/// the orthogonal complement of the constraint events at its frame. Starts
/// run in parallel; the best feasible one wins, ties going to the lower index.
pub fn maximize_violation(variant: &HardyVariant, config: &OptimizerConfig) -> Result<OptimizationResult> {
    config.validate()?;
    let n = variant.n();
    if n > MAX_OPTIMIZER_QUBITS {
        return Err(Error::ResourceLimit { n, cap: MAX_OPTIMIZER_QUBITS });
    }
    let layout = Layout { n, dim: 1 << n, complex: config.complex };
    let outcomes = (0..config.starts)
        .into_par_iter()
        .map(|s| run_start(variant, config, &layout, s))
        .collect::<Result<Vec<_>>>()?;

    let evaluations = outcomes.iter().map(|o| o.evals).sum();
    let iterations = outcomes.iter().map(|o| o.iterations).sum();
    let feasible: Vec<(usize, &StartOutcome)> =
        outcomes.iter().enumerate().filter(|(_, o)| o.residual <= config.tolerance && o.value.is_finite()).collect();
    let Some(&(best_start, best)) =
        feasible.iter().fold(None, |acc: Option<&(usize, &StartOutcome)>, cand| match acc {
            Some(b) if b.1.value >= cand.1.value => Some(b),
            _ => Some(cand),
        })
    else {
        let best_residual = outcomes.iter().map(|o| o.residual).fold(f64::INFINITY, f64::min);
        return Err(Error::Convergence { starts: config.starts, best_residual });
    };
    Ok(OptimizationResult {
        variant: variant.member.clone(),
        best_value: best.value,
        state: best.state.clone(),
        frame: best.frame.clone(),
        constraint_residual: best.residual,
        best_start,
        feasible_starts: feasible.len(),
        evaluations,
        iterations,
    })
}

/// Parameters of the explicit three-qubit maximizer: `a_2 = 0`, `b_2 = 1`,
/// `b_1 = b_3 = (√5 - 1)/2`, `a_1 = a_3 = √b_1`.
pub fn explicit_optimal_params() -> LocalUnitaryParams {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    LocalUnitaryParams { pairs: vec![(g.sqrt(), g), (0.0, 1.0), (g.sqrt(), g)] }
}

/// Setting of an event label, exposed for report consumers.
pub fn term_settings(term: &Term) -> Vec<(usize, Setting, u8)> {
    term.factors.iter().map(|&(q, f)| (q + 1, f.setting(), f.outcome())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::Z_AXIS;

    #[test]
    fn variant_constraints() {
        assert!(HardyVariant::new(HardyKind::Standard, 2, &[]).is_ok());
        assert!(HardyVariant::new(HardyKind::VariantI, 3, &[2, 3]).is_err());
        assert!(HardyVariant::new(HardyKind::VariantII, 4, &[1, 2, 3]).is_ok());
        assert!(HardyVariant::new(HardyKind::VariantIII, 4, &[1, 2, 3, 4]).is_err());
        let v = HardyVariant::new(HardyKind::VariantI, 3, &[1, 2]).unwrap();
        let labels: Vec<String> = v.zero_terms().iter().map(|t| t.describe()).collect();
        assert_eq!(labels, ["P(e1=1,e2=0,e'3=1)", "P(e'1=1,e2=1,e'3=1)", "P(e'1=1,e'2=1,e3=1)"]);
    }

    #[test]
    fn z_minus_state_fails_premises() {
        let state = StateVector::from_real(&[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let frame = MeasurementFrame::uniform(3, Z_AXIS, Z_AXIS).unwrap();
        let v = HardyVariant::new(HardyKind::Standard, 3, &[]).unwrap();
        let r = check_hardy(&state, &frame, &v, DEFAULT_ZERO_TOL).unwrap();
        assert_eq!(r.target, 0.0);
        assert!(!r.premises_hold && !r.lhv_violated);
        assert!((r.conclusion - 1.0).abs() < 1e-15);
    }

    #[test]
    fn stationary_formula_examples() {
        let s = (3.0 - 5f64.sqrt()) / 2.0;
        assert!((stationary_probability_n3(s, s).unwrap() - golden_optimum()).abs() < 1e-15);
        assert_eq!(stationary_probability_n3(0.3, 1.0).unwrap(), 0.0);
        assert!((stationary_probability_n3(0.5, 0.5).unwrap() - 0.0625 / 0.75).abs() < 1e-16);
        assert!(stationary_probability_n3(0.0, 0.0).is_err());
        assert!(stationary_probability_n3(1.2, 0.5).is_err());
        assert!(stationary_probability_n3(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn explicit_state_coefficients() {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let s = construct_stationary_state_n3(&explicit_optimal_params()).unwrap();
        // c_{e} sits at amplitude index !e.
        let c = |e: usize| s.amplitudes()[!e & 7].re;
        for e in [0b000, 0b010, 0b011, 0b110, 0b111] {
            assert!(c(e).abs() < 1e-16);
        }
        assert!((c(0b001) - g).abs() < 1e-15);
        assert!((c(0b100) - g).abs() < 1e-15);
        assert!((c(0b101) + g * g.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn singular_params() {
        let p = LocalUnitaryParams::new(vec![(0.0, 1.0), (0.0, 1.0), (1.0, 0.0)]).unwrap();
        assert!(matches!(construct_stationary_state_n3(&p), Err(Error::Singular(_))));
        assert!(LocalUnitaryParams::new(vec![(0.5, 0.5)]).is_err());
    }

    #[test]
    fn soundness_on_vertices() {
        for (kind, n, ix) in [
            (HardyKind::Standard, 3, vec![]),
            (HardyKind::VariantI, 4, vec![1, 3]),
            (HardyKind::VariantII, 5, vec![1, 2, 4]),
            (HardyKind::VariantIII, 6, vec![1, 2, 3, 5]),
        ] {
            let v = HardyVariant::new(kind, n, &ix).unwrap();
            assert!(premises_force_conclusion(&v).unwrap().holds, "{kind:?}");
        }
    }

    #[test]
    fn dropping_a_premise_breaks_soundness() {
        // Without P(e1=1, e2=0, ...) the variant (i) argument no longer closes.
        let v = HardyVariant::new(HardyKind::VariantI, 3, &[1, 2]).unwrap();
        let mut zero = v.zero_terms();
        zero.remove(0);
        let a = "e=100|e'=111".parse::<Assignment>().unwrap();
        assert!(zero.iter().all(|t| eval_term(t, &a) == 0));
        assert_eq!(eval_term(&all_primed_one(3), &a), 1);
        assert_eq!(eval_term(&all_unprimed_zero(3), &a), 0);
    }

    #[test]
    fn penalty_schedule() {
        let c = OptimizerConfig::default();
        assert_eq!(c.penalties(), vec![1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8]);
        assert!(OptimizerConfig { starts: 0, ..c.clone() }.validate().is_err());
    }

    #[test]
    fn optimizer_cap() {
        let v = HardyVariant::new(HardyKind::Standard, 7, &[]).unwrap();
        let err = maximize_violation(&v, &OptimizerConfig::default()).unwrap_err();
        assert_eq!(err, Error::ResourceLimit { n: 7, cap: MAX_OPTIMIZER_QUBITS });
    }
}
