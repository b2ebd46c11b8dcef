//! Rational cuspidal divisors in the orbit basis (P_d), tensor
//! decompositions over coprime levels, and the action of degeneracy,
//! Atkin–Lehner and Hecke operators on that basis.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::intarith::{self, gcd, level, pow, val};

/// An element of S₂(N): integer coefficients on (P_d), dense over the
/// ascending divisors of N.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CuspDivisor {
    n: u64,
    coeffs: Vec<i128>,
}

impl CuspDivisor {
    pub fn new(n: u64, coeffs: Vec<i128>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("level must be positive".into()));
        }
        let len = level(n).len();
        if coeffs.len() != len {
            return Err(Error::Domain(format!(
                "level {n} has {len} divisors, got {} coefficients",
                coeffs.len()
            )));
        }
        Ok(CuspDivisor { n, coeffs })
    }

    pub fn zero(n: u64) -> Self {
        CuspDivisor {
            n,
            coeffs: vec![0; level(n).len()],
        }
    }

    pub fn from_terms(n: u64, terms: &[(u64, i128)]) -> Result<Self> {
        let lv = level(n);
        let mut out = Self::zero(n);
        for &(d, c) in terms {
            let i = lv
                .index(d)
                .ok_or_else(|| Error::Domain(format!("{d} does not divide {n}")))?;
            out.coeffs[i] += c;
        }
        Ok(out)
    }

    pub fn level(&self) -> u64 {
        self.n
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn coeff(&self, d: u64) -> i128 {
        level(self.n).index(d).map_or(0, |i| self.coeffs[i])
    }

    pub fn divisors(&self) -> Vec<u64> {
        level(self.n).divisors.clone()
    }

    /// Nonzero (d, coefficient) pairs in ascending order of d.
    pub fn terms(&self) -> Vec<(u64, i128)> {
        let lv = level(self.n);
        lv.divisors
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, &c)| c != 0)
            .map(|(&d, &c)| (d, c))
            .collect()
    }

    pub fn degree(&self) -> i128 {
        let lv = level(self.n);
        lv.divisors
            .iter()
            .zip(&self.coeffs)
            .map(|(&d, &c)| c * lv.orbit_size(d) as i128)
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn scale(&self, k: i128) -> Self {
        CuspDivisor {
            n: self.n,
            coeffs: self.coeffs.iter().map(|&c| c * k).collect(),
        }
    }

    /// Exact division of every coefficient by k.
    pub fn div_exact(&self, k: i128) -> Result<Self> {
        if k == 0 || self.coeffs.iter().any(|c| c % k != 0) {
            return Err(Error::Internal(format!("divisor not divisible by {k}")));
        }
        Ok(CuspDivisor {
            n: self.n,
            coeffs: self.coeffs.iter().map(|&c| c / k).collect(),
        })
    }

    fn same_level(&self, other: &Self) {
        assert_eq!(self.n, other.n, "divisors live on different levels");
    }
}

impl fmt::Display for CuspDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (d, c)) in terms.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}*({d})")?;
        }
        Ok(())
    }
}

impl Add for &CuspDivisor {
    type Output = CuspDivisor;
    fn add(self, o: &CuspDivisor) -> CuspDivisor {
        self.same_level(o);
        CuspDivisor {
            n: self.n,
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CuspDivisor {
    type Output = CuspDivisor;
    fn sub(self, o: &CuspDivisor) -> CuspDivisor {
        self.same_level(o);
        CuspDivisor {
            n: self.n,
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Add for CuspDivisor {
    type Output = CuspDivisor;
    fn add(self, o: CuspDivisor) -> CuspDivisor {
        &self + &o
    }
}

impl Sub for CuspDivisor {
    type Output = CuspDivisor;
    fn sub(self, o: CuspDivisor) -> CuspDivisor {
        &self - &o
    }
}

impl AddAssign<&CuspDivisor> for CuspDivisor {
    fn add_assign(&mut self, o: &CuspDivisor) {
        self.same_level(o);
        for (a, b) in self.coeffs.iter_mut().zip(&o.coeffs) {
            *a += b;
        }
    }
}

impl Mul<i128> for &CuspDivisor {
    type Output = CuspDivisor;
    fn mul(self, k: i128) -> CuspDivisor {
        self.scale(k)
    }
}

impl Neg for &CuspDivisor {
    type Output = CuspDivisor;
    fn neg(self) -> CuspDivisor {
        self.scale(-1)
    }
}

#[derive(Serialize, Deserialize)]
struct DivisorRepr {
    #[serde(rename = "N")]
    n: u64,
    coeffs: BTreeMap<String, i128>,
}

impl Serialize for CuspDivisor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DivisorRepr {
            n: self.n,
            coeffs: self
                .terms()
                .into_iter()
                .map(|(d, c)| (d.to_string(), c))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CuspDivisor {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = DivisorRepr::deserialize(de)?;
        let mut terms = Vec::new();
        for (k, c) in r.coeffs {
            let d: u64 = k.parse().map_err(D::Error::custom)?;
            terms.push((d, c));
        }
        CuspDivisor::from_terms(r.n, &terms).map_err(D::Error::custom)
    }
}

/// Exponents r_δ of an eta quotient ∏ η(δτ)^{r_δ}, dense over the ascending
/// divisors δ of N.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EtaExponentVector {
    #[serde(rename = "N")]
    pub n: u64,
    pub exps: Vec<i128>,
}

impl EtaExponentVector {
    pub fn new(n: u64, exps: Vec<i128>) -> Result<Self> {
        if n == 0 || exps.len() != level(n).len() {
            return Err(Error::Domain(format!("bad exponent vector for level {n}")));
        }
        Ok(EtaExponentVector { n, exps })
    }

    pub fn zero(n: u64) -> Self {
        EtaExponentVector {
            n,
            exps: vec![0; level(n).len()],
        }
    }

    pub fn exp(&self, delta: u64) -> i128 {
        level(self.n).index(delta).map_or(0, |i| self.exps[i])
    }
}

impl fmt::Display for EtaExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lv = level(self.n);
        let mut first = true;
        for (&d, &e) in lv.divisors.iter().zip(&self.exps) {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "eta({d}t)^{e}")?;
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// The divisor (P_d): the sum of all cusps of level d.
pub fn orbit_divisor(n: u64, d: u64) -> Result<CuspDivisor> {
    CuspDivisor::from_terms(n, &[(d, 1)])
}

/// C_d = φ(gcd(d, N/d))·(P_1) − (P_d).
pub fn c_generator(n: u64, d: u64) -> Result<CuspDivisor> {
    if d <= 1 {
        return Err(Error::Domain("C_d needs d > 1".into()));
    }
    let lv = level(n);
    if lv.index(d).is_none() {
        return Err(Error::Domain(format!("{d} does not divide {n}")));
    }
    CuspDivisor::from_terms(n, &[(1, lv.orbit_size(d) as i128), (d, -1)])
}

/// v ⊗ w at level M·P, identifying e(MP)_{d} with e(M)_{gcd(d,M)} ⊗ e(P)_{gcd(d,P)}.
pub fn tensor(v: &CuspDivisor, w: &CuspDivisor) -> Result<CuspDivisor> {
    let (m, p) = (v.n, w.n);
    if gcd(m, p) != 1 {
        return Err(Error::Domain(format!("levels {m} and {p} are not coprime")));
    }
    let lm = level(m);
    let lp = level(p);
    let lv = level(m * p);
    let coeffs = lv
        .divisors
        .iter()
        .map(|&d| v.coeffs[lm.idx(gcd(d, m))] * w.coeffs[lp.idx(gcd(d, p))])
        .collect();
    Ok(CuspDivisor { n: m * p, coeffs })
}

pub fn tensor_all(parts: &[CuspDivisor]) -> Result<CuspDivisor> {
    let mut acc = CuspDivisor::new(1, vec![1])?;
    for p in parts {
        acc = tensor(&acc, p)?;
    }
    Ok(acc)
}

/// Decomposes v at level M·P along the (P_{d'}) basis of level M:
/// v = Σ_{d' | M} e(M)_{d'} ⊗ slice(d').
pub fn split(v: &CuspDivisor, m: u64) -> Result<Vec<(u64, CuspDivisor)>> {
    if m == 0 || v.n % m != 0 || gcd(m, v.n / m) != 1 {
        return Err(Error::Domain(format!("{m} is not a unitary divisor of {}", v.n)));
    }
    let p = v.n / m;
    let lv = level(v.n);
    let lp = level(p);
    Ok(level(m)
        .divisors
        .iter()
        .map(|&d1| {
            let coeffs = lp.divisors.iter().map(|&d2| v.coeffs[lv.idx(d1 * d2)]).collect();
            (d1, CuspDivisor { n: p, coeffs })
        })
        .collect())
}

/// Operators on S₂.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DivisorOp {
    /// α_p(N)_*: S₂(Np) → S₂(N).
    AlphaPush { p: u64 },
    /// β_p(N)_*: S₂(Np) → S₂(N).
    BetaPush { p: u64 },
    /// α_p(N)^*: S₂(N) → S₂(Np).
    AlphaPull { p: u64 },
    /// β_p(N)^*: S₂(N) → S₂(Np).
    BetaPull { p: u64 },
    /// w_p on S₂(N), p | N.
    AtkinLehner { p: u64 },
    /// T_p on S₂(N).
    Hecke { p: u64 },
    /// π₁(A, N)^*: S₂(N) → S₂(A), composite of α-pullbacks.
    Pi1Pull { target: u64 },
    /// π₂(A, N)^*: S₂(N) → S₂(A), composite of β-pullbacks.
    Pi2Pull { target: u64 },
    /// π₁₂(N)^*: S₂(N) → S₂(Np²).
    Pi12Pull { p: u64 },
    /// (1/p)·π₁₂(N)^*.
    Gamma { p: u64 },
}

type Local = Vec<(u32, i128)>;

/// p-local part of α_p(N)_*, where r = val_p(N) and f = val_p of the source
/// orbit at level Np.
fn alpha_push_local(p: i128, r: u32, f: u32) -> Local {
    if 2 * f <= r {
        vec![(f, 1)]
    } else if f < r {
        vec![(f, p)]
    } else if f == r {
        vec![(r, p - 1)]
    } else {
        vec![(r, 1)]
    }
}

fn beta_push_local(p: i128, r: u32, f: u32) -> Local {
    if f == 0 {
        vec![(0, 1)]
    } else if f == 1 && r >= 1 {
        vec![(0, p - 1)]
    } else if f >= 2 && 2 * f < r + 2 {
        vec![(f - 1, p)]
    } else {
        vec![(f - 1, 1)]
    }
}

fn alpha_pull_local(p: i128, r: u32, f: u32) -> Local {
    if r == 0 {
        vec![(0, p), (1, 1)]
    } else if 2 * f <= r {
        vec![(f, p)]
    } else if f < r {
        vec![(f, 1)]
    } else {
        vec![(r, 1), (r + 1, 1)]
    }
}

fn beta_pull_local(p: i128, r: u32, f: u32) -> Local {
    if r == 0 {
        vec![(0, 1), (1, p)]
    } else if f == 0 {
        vec![(0, 1), (1, 1)]
    } else if 2 * f < r {
        vec![(f + 1, 1)]
    } else {
        vec![(f + 1, p)]
    }
}

fn hecke_local(p: i128, r: u32, f: u32) -> Local {
    if r == 0 {
        vec![(0, p + 1)]
    } else if f == r && r == 1 {
        vec![(0, p - 1), (1, 1)]
    } else if f == r {
        vec![(r - 1, 1), (r, 1)]
    } else if f == 0 {
        vec![(0, p)]
    } else if f == 1 {
        vec![(0, p * (p - 1))]
    } else if 2 * f <= r {
        vec![(f - 1, p * p)]
    } else if 2 * f == r + 1 {
        vec![(f - 1, p)]
    } else {
        vec![(f - 1, 1)]
    }
}

/// Applies a p-local table to every orbit, keeping the prime-to-p part.
fn apply_local(
    d: &CuspDivisor,
    p: u64,
    target: u64,
    table: impl Fn(u32) -> Local,
) -> CuspDivisor {
    let src = level(d.n);
    let dst = level(target);
    let mut out = CuspDivisor::zero(target);
    for (&dv, &c) in src.divisors.iter().zip(&d.coeffs) {
        if c == 0 {
            continue;
        }
        let f = val(p, dv);
        let d1 = dv / pow(p, f);
        for (g, k) in table(f) {
            out.coeffs[dst.idx(d1 * pow(p, g))] += c * k;
        }
    }
    out
}

fn require_prime(p: u64) -> Result<()> {
    if !intarith::is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    Ok(())
}

pub fn apply(op: DivisorOp, d: &CuspDivisor) -> Result<CuspDivisor> {
    let n = d.n;
    match op {
        DivisorOp::AlphaPush { p } | DivisorOp::BetaPush { p } => {
            require_prime(p)?;
            if n % p != 0 {
                return Err(Error::Domain(format!("{p} does not divide {n}")));
            }
            let target = n / p;
            let r = val(p, target);
            let pi = p as i128;
            Ok(if matches!(op, DivisorOp::AlphaPush { .. }) {
                apply_local(d, p, target, |f| alpha_push_local(pi, r, f))
            } else {
                apply_local(d, p, target, |f| beta_push_local(pi, r, f))
            })
        }
        DivisorOp::AlphaPull { p } | DivisorOp::BetaPull { p } => {
            require_prime(p)?;
            let r = val(p, n);
            let pi = p as i128;
            Ok(if matches!(op, DivisorOp::AlphaPull { .. }) {
                apply_local(d, p, n * p, |f| alpha_pull_local(pi, r, f))
            } else {
                apply_local(d, p, n * p, |f| beta_pull_local(pi, r, f))
            })
        }
        DivisorOp::AtkinLehner { p } => {
            require_prime(p)?;
            if n % p != 0 {
                return Err(Error::Domain(format!("{p} does not divide {n}")));
            }
            let r = val(p, n);
            Ok(apply_local(d, p, n, |f| vec![(r - f, 1)]))
        }
        DivisorOp::Hecke { p } => {
            require_prime(p)?;
            let r = val(p, n);
            let pi = p as i128;
            Ok(apply_local(d, p, n, |f| hecke_local(pi, r, f)))
        }
        DivisorOp::Pi1Pull { target } | DivisorOp::Pi2Pull { target } => {
            if target % n != 0 {
                return Err(Error::Domain(format!("{n} does not divide {target}")));
            }
            let alpha = matches!(op, DivisorOp::Pi1Pull { .. });
            let mut cur = d.clone();
            for &(p, e) in intarith::factor(target / n).factors() {
                for _ in 0..e {
                    let step = if alpha {
                        DivisorOp::AlphaPull { p }
                    } else {
                        DivisorOp::BetaPull { p }
                    };
                    cur = apply(step, &cur)?;
                }
            }
            Ok(cur)
        }
        DivisorOp::Pi12Pull { p } => {
            let mid = apply(DivisorOp::BetaPull { p }, d)?;
            apply(DivisorOp::AlphaPull { p }, &mid)
        }
        DivisorOp::Gamma { p } => apply(DivisorOp::Pi12Pull { p }, d)?.div_exact(p as i128),
    }
}
