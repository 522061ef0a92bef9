//! Classical side: exact integer evaluation of chain members on deterministic
//! assignments (the vertices of the LHV polytope) and exhaustive bounds.
//!
//! An assignment of the `2n` bits is packed into one word, read from the most
//! significant bit: `e_1 .. e_n e'_1 .. e'_n`. Enumeration runs in ascending
//! word order and ties are broken towards the smallest word.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{ChainMember, Factor, Setting, Term};
use crate::error::{Error, Result};

pub const DEFAULT_ENUMERATION_CAP: usize = 12;

const CHUNK: u64 = 1 << 14;

/// A deterministic assignment of all `e_i` and `e'_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Assignment {
    n: usize,
    word: u64,
}

impl Assignment {
    pub fn from_word(n: usize, word: u64) -> Result<Self> {
        if n == 0 || n > 31 {
            return Err(Error::Validation(format!("n = {n} out of range 1..=31")));
        }
        if word >> (2 * n) != 0 {
            return Err(Error::Validation(format!("word {word:#x} has bits beyond 2n = {}", 2 * n)));
        }
        Ok(Assignment { n, word })
    }

    /// Builds from explicit bit vectors, qubit 1 first.
    pub fn from_bits(e: &[u8], ep: &[u8]) -> Result<Self> {
        let n = e.len();
        if ep.len() != n {
            return Err(Error::Dimension { expected: n, got: ep.len() });
        }
        let mut word = 0u64;
        for &b in e.iter().chain(ep) {
            if b > 1 {
                return Err(Error::Validation(format!("bit value {b} is not 0 or 1")));
            }
            word = (word << 1) | b as u64;
        }
        Assignment::from_word(n, word)
    }

    pub fn all(n: usize, value: u8) -> Self {
        let word = if value == 0 { 0 } else { (1u64 << (2 * n)) - 1 };
        Assignment { n, word }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn word(&self) -> u64 {
        self.word
    }

    /// `e_q` for 0-based `q`.
    pub fn e(&self, q: usize) -> u8 {
        ((self.word >> e_bit(self.n, q)) & 1) as u8
    }

    /// `e'_q` for 0-based `q`.
    pub fn ep(&self, q: usize) -> u8 {
        ((self.word >> ep_bit(self.n, q)) & 1) as u8
    }

    pub fn bits_e(&self) -> Vec<u8> {
        (0..self.n).map(|q| self.e(q)).collect()
    }

    pub fn bits_ep(&self) -> Vec<u8> {
        (0..self.n).map(|q| self.ep(q)).collect()
    }
}

impl fmt::Display for Assignment {
    /// `e=010|e'=110`, qubit 1 leftmost.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |bits: Vec<u8>| bits.iter().map(|b| char::from(b'0' + b)).collect::<String>();
        write!(f, "e={}|e'={}", s(self.bits_e()), s(self.bits_ep()))
    }
}

impl std::str::FromStr for Assignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad witness `{s}`, expected e=...|e'=..."));
        let (e, ep) = s.split_once('|').ok_or_else(bad)?;
        let e = e.trim().strip_prefix("e=").ok_or_else(bad)?;
        let ep = ep.trim().strip_prefix("e'=").ok_or_else(bad)?;
        let bits = |t: &str| {
            t.chars()
                .map(|c| match c {
                    '0' => Ok(0u8),
                    '1' => Ok(1u8),
                    _ => Err(bad()),
                })
                .collect::<Result<Vec<u8>>>()
        };
        Assignment::from_bits(&bits(e)?, &bits(ep)?)
    }
}

impl Serialize for Assignment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Assignment {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn e_bit(n: usize, q: usize) -> usize {
    2 * n - 1 - q
}

fn ep_bit(n: usize, q: usize) -> usize {
    n - 1 - q
}

/// A term reduced to two bit masks: it is 1 exactly when every bit in `ones`
/// is set and every bit in `zeros` is clear.
#[derive(Debug, Clone, Copy)]
struct MaskTerm {
    sign: i64,
    ones: u64,
    zeros: u64,
}

impl MaskTerm {
    fn compile(n: usize, term: &Term) -> Self {
        let (mut ones, mut zeros) = (0u64, 0u64);
        for &(q, f) in &term.factors {
            let bit = match f.setting() {
                Setting::Unprimed => 1u64 << e_bit(n, q),
                Setting::Primed => 1u64 << ep_bit(n, q),
            };
            if f.outcome() == 1 {
                ones |= bit;
            } else {
                zeros |= bit;
            }
        }
        MaskTerm { sign: term.sign as i64, ones, zeros }
    }

    #[inline]
    fn eval(&self, word: u64) -> i64 {
        if word & self.ones == self.ones && word & self.zeros == 0 {
            self.sign
        } else {
            0
        }
    }
}

/// A chain member compiled for fast repeated evaluation on words.
#[derive(Debug, Clone)]
pub struct CompiledMember {
    n: usize,
    terms: Vec<MaskTerm>,
}

impl CompiledMember {
    pub fn new(member: &ChainMember) -> Self {
        let n = member.n();
        CompiledMember { n, terms: member.terms().iter().map(|t| MaskTerm::compile(n, t)).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn eval_word(&self, word: u64) -> i64 {
        self.terms.iter().map(|t| t.eval(word)).sum()
    }
}

/// Exact integer value of a chain member at a deterministic assignment.
pub fn eval_chain_member(member: &ChainMember, a: &Assignment) -> Result<i64> {
    if a.n() != member.n() {
        return Err(Error::Dimension { expected: member.n(), got: a.n() });
    }
    Ok(CompiledMember::new(member).eval_word(a.word()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LhvBounds {
    pub member: ChainMember,
    pub min: i64,
    pub max: i64,
    pub min_witness: Assignment,
    pub max_witness: Assignment,
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap || n > 31 {
        return Err(Error::ResourceLimit { n, cap: cap.min(31) });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
struct Extremes {
    min: i64,
    min_at: u64,
    max: i64,
    max_at: u64,
}

impl Extremes {
    fn merge(self, other: Extremes) -> Extremes {
        // Ties go to the smaller word so the result does not depend on chunking.
        let (min, min_at) = if other.min < self.min || (other.min == self.min && other.min_at < self.min_at) {
            (other.min, other.min_at)
        } else {
            (self.min, self.min_at)
        };
        let (max, max_at) = if other.max > self.max || (other.max == self.max && other.max_at < self.max_at) {
            (other.max, other.max_at)
        } else {
            (self.max, self.max_at)
        };
        Extremes { min, min_at, max, max_at }
    }
}

/// Min and max of the member over all `2^{2n}` vertices, with the lowest
/// witnesses. Uses [`DEFAULT_ENUMERATION_CAP`].
pub fn lhv_bounds_bruteforce(member: &ChainMember) -> Result<LhvBounds> {
    lhv_bounds_with_cap(member, DEFAULT_ENUMERATION_CAP)
}

pub fn lhv_bounds_with_cap(member: &ChainMember, cap: usize) -> Result<LhvBounds> {
    let n = member.n();
    check_cap(n, cap)?;
    let compiled = CompiledMember::new(member);
    let total = 1u64 << (2 * n);
    let chunks = total.div_ceil(CHUNK);
    let ext = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(total);
            let v = compiled.eval_word(lo);
            let mut ext = Extremes { min: v, min_at: lo, max: v, max_at: lo };
            for w in lo + 1..hi {
                let v = compiled.eval_word(w);
                if v < ext.min {
                    ext.min = v;
                    ext.min_at = w;
                }
                if v > ext.max {
                    ext.max = v;
                    ext.max_at = w;
                }
            }
            ext
        })
        .reduce_with(Extremes::merge)
        .expect("at least one chunk");
    Ok(LhvBounds {
        member: member.clone(),
        min: ext.min,
        max: ext.max,
        min_witness: Assignment { n, word: ext.min_at },
        max_witness: Assignment { n, word: ext.max_at },
    })
}

/// Outcome of an exhaustive check: `holds`, or the lowest counterexample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustiveCheck {
    pub holds: bool,
    pub counterexample: Option<Assignment>,
}

impl ExhaustiveCheck {
    fn from_first_failure(n: usize, first: Option<u64>) -> Self {
        ExhaustiveCheck { holds: first.is_none(), counterexample: first.map(|word| Assignment { n, word }) }
    }
}

fn first_failure(n: usize, ok: impl Fn(u64) -> bool + Sync) -> Option<u64> {
    let total = 1u64 << (2 * n);
    (0..total.div_ceil(CHUNK)).into_par_iter().find_map_first(|c| {
        let lo = c * CHUNK;
        (lo..(lo + CHUNK).min(total)).find(|&w| !ok(w))
    })
}

/// Checks both halves of the master identity as integer identities over all
/// assignments:
///
/// `∏ē - ∏e' = (1 - ∏e')∏ē - (1 - ∏ē)∏e'` and
/// `1 - ∏ē = e_n + Σ_{i<n} e_i ∏_{j>i} ē_j`.
pub fn master_identity_check(n: usize) -> Result<ExhaustiveCheck> {
    master_identity_check_with_cap(n, DEFAULT_ENUMERATION_CAP)
}

pub fn master_identity_check_with_cap(n: usize, cap: usize) -> Result<ExhaustiveCheck> {
    if n == 0 {
        return Err(Error::Validation("n must be positive".into()));
    }
    check_cap(n, cap)?;
    let first = first_failure(n, |w| {
        let a = Assignment { n, word: w };
        let e: Vec<i64> = (0..n).map(|q| a.e(q) as i64).collect();
        let ep: Vec<i64> = (0..n).map(|q| a.ep(q) as i64).collect();
        let prod_ebar: i64 = e.iter().map(|x| 1 - x).product();
        let prod_ep: i64 = ep.iter().product();
        let lhs15 = prod_ebar - prod_ep;
        let rhs15 = (1 - prod_ep) * prod_ebar - (1 - prod_ebar) * prod_ep;
        let lhs16 = 1 - prod_ebar;
        let rhs16 = e[n - 1] + (0..n - 1).map(|i| e[i] * (i + 1..n).map(|j| 1 - e[j]).product::<i64>()).sum::<i64>();
        lhs15 == rhs15 && lhs16 == rhs16
    });
    Ok(ExhaustiveCheck::from_first_failure(n, first))
}

/// Checks `0 <= value <= U` at every vertex, with `U` the member's closed-form
/// upper bound. Custom members have no known `U`; only `value >= 0` is checked.
pub fn pointwise_chain_check(member: &ChainMember) -> Result<ExhaustiveCheck> {
    pointwise_chain_check_with_cap(member, DEFAULT_ENUMERATION_CAP)
}

pub fn pointwise_chain_check_with_cap(member: &ChainMember, cap: usize) -> Result<ExhaustiveCheck> {
    let n = member.n();
    check_cap(n, cap)?;
    let upper = member.upper_bound().unwrap_or(i64::MAX);
    let compiled = CompiledMember::new(member);
    let first = first_failure(n, |w| {
        let v = compiled.eval_word(w);
        (0..=upper).contains(&v)
    });
    Ok(ExhaustiveCheck::from_first_failure(n, first))
}

/// `Σ_a weight(a) · value(a)` for a distribution given densely over all
/// `4^n` words (index = packed word).
pub fn lhv_expectation(member: &ChainMember, weights: &[f64]) -> Result<f64> {
    let n = member.n();
    check_cap(n, DEFAULT_ENUMERATION_CAP)?;
    let total = 1usize << (2 * n);
    if weights.len() != total {
        return Err(Error::Dimension { expected: total, got: weights.len() });
    }
    if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(**w >= 0.0) || !w.is_finite()) {
        return Err(Error::Validation(format!("weight {w} at index {i} is not a nonnegative number")));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::Validation(format!("weights sum to {sum}, not 1")));
    }
    let compiled = CompiledMember::new(member);
    Ok(weights
        .iter()
        .enumerate()
        .filter(|(_, &w)| w != 0.0)
        .map(|(word, &w)| w * compiled.eval_word(word as u64) as f64)
        .sum())
}

/// Value (0 or ±1) of a single signed product term at an assignment.
pub fn eval_term(term: &Term, a: &Assignment) -> i64 {
    MaskTerm::compile(a.n(), term).eval(a.word())
}

/// Indicator of the event "`e_k = 0` for all `k`" as a term.
pub fn all_unprimed_zero(n: usize) -> Term {
    Term::new(1, (0..n).map(|q| (q, Factor::EBar)).collect())
}

/// Indicator of the event "`e'_k = 1` for all `k`" as a term.
pub fn all_primed_one(n: usize) -> Term {
    Term::new(1, (0..n).map(|q| (q, Factor::EPrime)).collect())
}
