//! Chain members: the CH-Hardy quantity `X` and its truncations `X_ij`,
//! `X_ijk`, `X_ijkl`, plus user-supplied term lists.
//!
//! Every member is a signed sum of product terms. Each factor in a term picks
//! one qubit and one of the four single-site indicators `e`, `ē = 1 - e`,
//! `e'`, `ē' = 1 - e'`. Qubits are 1-based in the public API and in the text
//! form; [`Term`] stores them 0-based.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which of the two measurement settings a factor refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Setting {
    Unprimed,
    Primed,
}

/// A single-site indicator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Factor {
    /// `e_i`
    E,
    /// `ē_i = 1 - e_i`
    EBar,
    /// `e'_i`
    EPrime,
    /// `ē'_i = 1 - e'_i`
    EPrimeBar,
}

impl Factor {
    pub fn setting(self) -> Setting {
        match self {
            Factor::E | Factor::EBar => Setting::Unprimed,
            Factor::EPrime | Factor::EPrimeBar => Setting::Primed,
        }
    }

    /// The outcome this indicator selects (1 for `e`, `e'`; 0 for the barred ones).
    pub fn outcome(self) -> u8 {
        match self {
            Factor::E | Factor::EPrime => 1,
            Factor::EBar | Factor::EPrimeBar => 0,
        }
    }

    pub fn from_parts(setting: Setting, outcome: u8) -> Factor {
        match (setting, outcome) {
            (Setting::Unprimed, 1) => Factor::E,
            (Setting::Unprimed, _) => Factor::EBar,
            (Setting::Primed, 1) => Factor::EPrime,
            (Setting::Primed, _) => Factor::EPrimeBar,
        }
    }
}

/// A signed product of single-site indicators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub sign: i32,
    /// `(qubit, factor)` pairs with 0-based qubits, at most one per qubit.
    pub factors: Vec<(usize, Factor)>,
}

impl Term {
    pub fn new(sign: i32, mut factors: Vec<(usize, Factor)>) -> Self {
        factors.sort_by_key(|&(q, _)| q);
        Term { sign, factors }
    }

    /// `sign · ∏_k f(k)` over all `n` qubits.
    fn uniform(sign: i32, n: usize, f: impl Fn(usize) -> Factor) -> Self {
        Term::new(sign, (0..n).map(|q| (q, f(q))).collect())
    }

    /// True when every qubit `0..n` carries exactly one factor.
    pub fn is_full(&self, n: usize) -> bool {
        self.factors.len() == n && self.factors.iter().enumerate().all(|(k, &(q, _))| k == q)
    }

    /// Probability-style label, e.g. `P(e1=1,e2=0,e'3=1)`.
    pub fn describe(&self) -> String {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|&(q, f)| {
                let prime = if f.setting() == Setting::Primed { "'" } else { "" };
                format!("e{}{}={}", prime, q + 1, f.outcome())
            })
            .collect();
        format!("P({})", parts.join(","))
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.sign != 1 && self.sign != -1 {
            return Err(Error::InvalidMember(format!("term sign must be ±1, got {}", self.sign)));
        }
        let mut seen = vec![false; n];
        for &(q, _) in &self.factors {
            if q >= n {
                return Err(Error::InvalidMember(format!("qubit {} out of range 1..={}", q + 1, n)));
            }
            if seen[q] {
                return Err(Error::InvalidMember(format!("qubit {} appears more than once in a term", q + 1)));
            }
            seen[q] = true;
        }
        Ok(())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.sign < 0 { "-" } else { "+" })?;
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (k, &(q, factor)) in self.factors.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            let s = match factor {
                Factor::E => format!("e{}", q + 1),
                Factor::EBar => format!("~e{}", q + 1),
                Factor::EPrime => format!("e'{}", q + 1),
                Factor::EPrimeBar => format!("~e'{}", q + 1),
            };
            f.write_str(&s)?;
        }
        Ok(())
    }
}

impl FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (sign, body) = match s.chars().next() {
            Some('+') => (1, &s[1..]),
            Some('-') => (-1, &s[1..]),
            _ => return Err(Error::Parse(format!("term `{s}` must start with + or -"))),
        };
        let body = body.trim();
        if body == "1" {
            return Ok(Term::new(sign, Vec::new()));
        }
        let mut factors = Vec::new();
        for tok in body.split('*') {
            let tok = tok.trim();
            let (bar, rest) = match tok.strip_prefix('~') {
                Some(r) => (true, r),
                None => (false, tok),
            };
            let rest = rest.strip_prefix('e').ok_or_else(|| Error::Parse(format!("bad factor `{tok}`")))?;
            let (primed, digits) = match rest.strip_prefix('\'') {
                Some(d) => (true, d),
                None => (false, rest),
            };
            let q: usize = digits.parse().map_err(|_| Error::Parse(format!("bad qubit index in `{tok}`")))?;
            if q == 0 {
                return Err(Error::Parse(format!("qubit indices are 1-based in `{tok}`")));
            }
            let factor = match (primed, bar) {
                (false, false) => Factor::E,
                (false, true) => Factor::EBar,
                (true, false) => Factor::EPrime,
                (true, true) => Factor::EPrimeBar,
            };
            factors.push((q - 1, factor));
        }
        Ok(Term::new(sign, factors))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MemberKind {
    X,
    Xij,
    Xijk,
    Xijkl,
    Custom,
}

impl MemberKind {
    pub fn arity(self) -> usize {
        match self {
            MemberKind::X | MemberKind::Custom => 0,
            MemberKind::Xij => 2,
            MemberKind::Xijk => 3,
            MemberKind::Xijkl => 4,
        }
    }

    /// Smallest `n` for which the member is defined.
    pub fn min_qubits(self) -> usize {
        match self {
            MemberKind::X => 2,
            MemberKind::Xij => 3,
            MemberKind::Xijk => 4,
            MemberKind::Xijkl => 5,
            MemberKind::Custom => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MemberKind::X => "X",
            MemberKind::Xij => "Xij",
            MemberKind::Xijk => "Xijk",
            MemberKind::Xijkl => "Xijkl",
            MemberKind::Custom => "Custom",
        }
    }
}

impl FromStr for MemberKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" | "x" => Ok(MemberKind::X),
            "Xij" | "xij" => Ok(MemberKind::Xij),
            "Xijk" | "xijk" => Ok(MemberKind::Xijk),
            "Xijkl" | "xijkl" => Ok(MemberKind::Xijkl),
            "Custom" | "custom" => Ok(MemberKind::Custom),
            other => Err(Error::Parse(format!("unknown member kind `{other}`"))),
        }
    }
}

/// One inequality of the chain. Construct through the checked constructors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct ChainMember {
    kind: MemberKind,
    n: usize,
    indices: Vec<usize>,
    custom_terms: Vec<Term>,
}

impl ChainMember {
    pub fn x(n: usize) -> Result<Self> {
        Self::new(MemberKind::X, n, &[])
    }

    pub fn xij(n: usize, i: usize, j: usize) -> Result<Self> {
        Self::new(MemberKind::Xij, n, &[i, j])
    }

    pub fn xijk(n: usize, i: usize, j: usize, k: usize) -> Result<Self> {
        Self::new(MemberKind::Xijk, n, &[i, j, k])
    }

    pub fn xijkl(n: usize, i: usize, j: usize, k: usize, l: usize) -> Result<Self> {
        Self::new(MemberKind::Xijkl, n, &[i, j, k, l])
    }

    /// Builds one of the named members; `indices` are 1-based and must be
    /// strictly increasing with the last one below `n`.
    pub fn new(kind: MemberKind, n: usize, indices: &[usize]) -> Result<Self> {
        if kind == MemberKind::Custom {
            return Err(Error::InvalidMember("use ChainMember::custom for term lists".into()));
        }
        if n < kind.min_qubits() {
            return Err(Error::InvalidMember(format!("{} needs n >= {}, got n = {n}", kind.name(), kind.min_qubits())));
        }
        if indices.len() != kind.arity() {
            return Err(Error::InvalidMember(format!(
                "{} takes {} indices, got {}",
                kind.name(),
                kind.arity(),
                indices.len()
            )));
        }
        if indices.contains(&0) {
            return Err(Error::InvalidMember("indices are 1-based".into()));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMember(format!("indices {indices:?} must be strictly increasing")));
        }
        if let Some(&last) = indices.last() {
            if last >= n {
                return Err(Error::InvalidMember(format!("largest index must be < n = {n}, got {last}")));
            }
        }
        Ok(ChainMember { kind, n, indices: indices.to_vec(), custom_terms: Vec::new() })
    }

    pub fn custom(n: usize, terms: Vec<Term>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMember("n must be positive".into()));
        }
        if terms.is_empty() {
            return Err(Error::InvalidMember("custom member needs at least one term".into()));
        }
        for t in &terms {
            t.validate(n)?;
        }
        Ok(ChainMember { kind: MemberKind::Custom, n, indices: Vec::new(), custom_terms: terms })
    }

    pub fn kind(&self) -> MemberKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// 1-based indices (empty for `X` and custom members).
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Closed-form LHV upper bound; `None` for custom members.
    pub fn upper_bound(&self) -> Option<i64> {
        let n = self.n as i64;
        match self.kind {
            MemberKind::X => Some(n - 1),
            MemberKind::Xij | MemberKind::Xijk => Some(n - 2),
            MemberKind::Xijkl => Some(n - 3),
            MemberKind::Custom => None,
        }
    }

    /// Expands the member into its signed product terms.
    ///
    /// For the named members the first two terms are always `∏ ē_k` and
    /// `-∏ e'_k`; the remaining terms are the ones that vanish under the
    /// matching Hardy-type premises.
    pub fn terms(&self) -> Vec<Term> {
        let n = self.n;
        if self.kind == MemberKind::Custom {
            return self.custom_terms.clone();
        }
        let ix: Vec<usize> = self.indices.iter().map(|i| i - 1).collect();
        let mut terms = vec![Term::uniform(1, n, |_| Factor::EBar), Term::uniform(-1, n, |_| Factor::EPrime)];
        // e_a ē_b ... ∏_{rest} e'
        let flagged = |lead: usize, barred: &[usize]| {
            Term::uniform(1, n, |q| {
                if q == lead {
                    Factor::E
                } else if barred.contains(&q) {
                    Factor::EBar
                } else {
                    Factor::EPrime
                }
            })
        };
        let skip: Vec<usize> = match self.kind {
            MemberKind::X => vec![],
            MemberKind::Xij => {
                terms.push(flagged(ix[0], &[ix[1]]));
                vec![ix[0]]
            }
            MemberKind::Xijk => {
                terms.push(flagged(ix[0], &[ix[1], ix[2]]));
                vec![ix[0]]
            }
            MemberKind::Xijkl => {
                terms.push(flagged(ix[0], &[ix[1]]));
                terms.push(flagged(ix[2], &[ix[3]]));
                vec![ix[0], ix[2]]
            }
            MemberKind::Custom => unreachable!(),
        };
        for l in (0..n).filter(|l| !skip.contains(l)) {
            terms.push(flagged(l, &[]));
        }
        terms
    }
}

impl fmt::Display for ChainMember {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            MemberKind::X => write!(f, "X@n={}", self.n),
            MemberKind::Custom => {
                let terms: Vec<String> = self.custom_terms.iter().map(|t| t.to_string()).collect();
                write!(f, "Custom[{}]@n={}", terms.join(","), self.n)
            }
            kind => {
                let ix: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
                write!(f, "{}({})@n={}", kind.name(), ix.join(","), self.n)
            }
        }
    }
}

impl FromStr for ChainMember {
    type Err = Error;

    /// Parses `X@n=3`, `Xij(1,2)@n=5`, `Custom[-e'1*e'2]@n=2`, ...
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, n_part) =
            s.rsplit_once("@n=").ok_or_else(|| Error::Parse(format!("`{s}` lacks an `@n=` suffix")))?;
        let n: usize = n_part.trim().parse().map_err(|_| Error::Parse(format!("bad n in `{s}`")))?;
        if let Some(body) = head.strip_prefix("Custom[") {
            let body =
                body.strip_suffix(']').ok_or_else(|| Error::Parse(format!("unterminated term list in `{s}`")))?;
            let terms = body.split(',').map(str::parse).collect::<Result<Vec<Term>>>()?;
            return ChainMember::custom(n, terms);
        }
        let (name, indices) = match head.split_once('(') {
            Some((name, rest)) => {
                let list =
                    rest.strip_suffix(')').ok_or_else(|| Error::Parse(format!("unterminated index list in `{s}`")))?;
                let ix = list
                    .split(',')
                    .map(|t| t.trim().parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::Parse(format!("bad index list in `{s}`")))?;
                (name, ix)
            }
            None => (head, Vec::new()),
        };
        ChainMember::new(name.parse()?, n, &indices)
    }
}

impl From<ChainMember> for String {
    fn from(m: ChainMember) -> String {
        m.to_string()
    }
}

impl TryFrom<String> for ChainMember {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}
