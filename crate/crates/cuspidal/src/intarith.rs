//! Integer utilities: factorization, the divisor lattice, κ(N), and the
//! combinatorial index sets over exponent tuples.
//!
//! Tuples are stored 0-based, but the derived indices `m`, `n`, `k` and the
//! prime position `u` are reported 1-based, with `t + 1` used as the
//! "not found" sentinel.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn gcd_i128(a: i128, b: i128) -> i128 {
    a.gcd(&b)
}

/// Exponent of the prime `p` in `n` (n > 0).
pub fn val(p: u64, mut n: u64) -> u32 {
    debug_assert!(n > 0 && p > 1);
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

/// Exponent of `p` in a nonzero signed integer.
pub fn val_i128(p: u64, n: i128) -> u32 {
    debug_assert!(n != 0);
    let p = p as i128;
    let mut n = n;
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

/// Removes every factor `p` from `n`, returning the `p`-free part.
pub fn strip(p: u64, mut n: u128) -> u128 {
    let p = p as u128;
    while n > 0 && n % p == 0 {
        n /= p;
    }
    n
}

pub fn pow(p: u64, e: u32) -> u64 {
    p.checked_pow(e).expect("prime power overflows u64")
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Modular inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: i128, m: i128) -> Option<i128> {
    if m == 1 {
        return Some(0);
    }
    let e = a.mod_floor(&m).extended_gcd(&m);
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.mod_floor(&m))
}

/// A positive integer together with an ordered list of its prime powers.
///
/// The order of `factors` is meaningful: the index sets and the orderings
/// used by the generator constructions refer to primes by position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FactoredInteger {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    pub fn from_factors(factors: Vec<(u64, u32)>) -> Result<Self> {
        let mut value: u64 = 1;
        for (i, &(p, r)) in factors.iter().enumerate() {
            if r == 0 || !is_prime(p) {
                return Err(Error::Domain(format!("bad prime power {p}^{r}")));
            }
            if factors[..i].iter().any(|&(q, _)| q == p) {
                return Err(Error::Domain(format!("repeated prime {p}")));
            }
            value = p
                .checked_pow(r)
                .and_then(|q| value.checked_mul(q))
                .ok_or_else(|| Error::Domain("value overflows u64".into()))?;
        }
        Ok(FactoredInteger { value, factors })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn t(&self) -> usize {
        self.factors.len()
    }

    pub fn prime(&self, i: usize) -> u64 {
        self.factors[i].0
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.factors[i].1
    }

    pub fn primes(&self) -> Vec<u64> {
        self.factors.iter().map(|f| f.0).collect()
    }

    pub fn exponents(&self) -> Vec<u32> {
        self.factors.iter().map(|f| f.1).collect()
    }

    /// 1-based position of the prime 2, or 0 when N is odd.
    pub fn u(&self) -> usize {
        self.factors
            .iter()
            .position(|f| f.0 == 2)
            .map_or(0, |i| i + 1)
    }

    pub fn rad(&self) -> u64 {
        self.factors.iter().map(|f| f.0).product()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|f| f.1 == 1)
    }

    pub fn kappa(&self) -> u128 {
        self.factors
            .iter()
            .map(|&(p, r)| {
                let p = p as u128;
                p.pow(r - 1) * (p * p - 1)
            })
            .product()
    }

    pub fn phi(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, r)| p.pow(r - 1) * (p - 1))
            .product()
    }

    pub fn sigma0(&self) -> usize {
        self.factors.iter().map(|f| f.1 as usize + 1).product()
    }

    /// Exponents of `d` along the stored prime order.
    pub fn tuple_of(&self, d: u64) -> Vec<u32> {
        self.factors.iter().map(|&(p, _)| val(p, d)).collect()
    }

    /// The divisor 𝔭_I for an exponent tuple in the stored prime order.
    pub fn from_tuple(&self, tuple: &[u32]) -> u64 {
        self.factors
            .iter()
            .zip(tuple)
            .map(|(&(p, _), &f)| p.pow(f))
            .product()
    }

    /// All divisors in ascending order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut ds = vec![1u64];
        for &(p, r) in &self.factors {
            let mut next = Vec::with_capacity(ds.len() * (r as usize + 1));
            for &d in &ds {
                let mut q = 1;
                for _ in 0..=r {
                    next.push(d * q);
                    q *= p;
                }
            }
            ds = next;
        }
        ds.sort_unstable();
        ds
    }

    /// Same integer with primes permuted: the new i-th prime is the old
    /// `perm[i]`-th one.
    pub fn reorder(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.t());
        FactoredInteger {
            value: self.value,
            factors: perm.iter().map(|&i| self.factors[i]).collect(),
        }
    }

    /// The `p`-free part M and the exponent r with N = M·p^r.
    pub fn split_prime(&self, p: u64) -> (u64, u32) {
        let r = val(p, self.value);
        (self.value / pow(p, r), r)
    }
}

/// Factorization by trial division with a primality shortcut; primes ascend.
pub fn factor(n: u64) -> FactoredInteger {
    assert!(n >= 1, "factor expects a positive integer");
    let mut factors = Vec::new();
    let mut m = n;
    let mut p = 2u64;
    while m > 1 {
        if p.saturating_mul(p) > m || is_prime(m) {
            factors.push((m, 1));
            break;
        }
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    factors.sort_unstable();
    FactoredInteger { value: n, factors }
}

pub fn kappa(n: &FactoredInteger) -> u128 {
    n.kappa()
}

pub fn euler_phi(n: u64) -> u64 {
    factor(n).phi()
}

/// One row of the divisor lattice: d, z = gcd(d, N/d) and φ(z).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorEntry {
    pub d: u64,
    pub z: u64,
    pub phi_z: u64,
}

pub fn divisor_lattice(n: &FactoredInteger) -> Vec<DivisorEntry> {
    let nv = n.value();
    n.divisors()
        .into_iter()
        .map(|d| {
            let z = gcd(d, nv / d);
            DivisorEntry {
                d,
                z,
                phi_z: euler_phi(z),
            }
        })
        .collect()
}

/// Membership report for an exponent tuple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexProfile {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub in_delta: bool,
    pub in_square: bool,
    pub in_t_u: bool,
    pub in_e: bool,
    pub in_h_u: bool,
    pub in_h_u1: bool,
    pub in_f_s: bool,
    pub in_f_s1: bool,
    pub in_g_s: bool,
    pub in_g_s1: bool,
}

/// Exponent tuple (f_1, …, f_t) relative to fixed bounds r_i.
pub type Tuple = Vec<u32>;

pub fn in_omega(i: &[u32], r: &[u32]) -> bool {
    i.len() == r.len() && i.iter().zip(r).all(|(f, r)| f <= r) && i.iter().any(|&f| f > 0)
}

pub fn in_delta(i: &[u32]) -> bool {
    i.iter().all(|&f| f <= 1) && i.iter().any(|&f| f == 1)
}

pub fn in_square(i: &[u32]) -> bool {
    i.iter().any(|&f| f >= 2)
}

/// m(I): least 1-based index with f = 1 (t+1 if none).
pub fn m_of(i: &[u32]) -> usize {
    i.iter().position(|&f| f == 1).map_or(i.len() + 1, |p| p + 1)
}

/// n(I): least index beyond m(I) with f = 0, or t+1.
pub fn n_of(i: &[u32]) -> usize {
    let m = m_of(i);
    (m + 1..=i.len())
        .find(|&j| i[j - 1] == 0)
        .unwrap_or(i.len() + 1)
}

/// k(I): least index beyond n(I) with f = 0, or t+1.
pub fn k_of(i: &[u32]) -> usize {
    let n = n_of(i);
    (n + 1..=i.len())
        .find(|&j| i[j - 1] == 0)
        .unwrap_or(i.len() + 1)
}

pub fn tuple_a(t: usize, k: usize) -> Tuple {
    (1..=t).map(|i| u32::from(i >= k)).collect()
}

pub fn tuple_e(t: usize, k: usize) -> Tuple {
    (1..=t).map(|i| u32::from(i != k)).collect()
}

pub fn tuple_f(t: usize, k: usize) -> Tuple {
    (1..=t).map(|i| u32::from(i == k)).collect()
}

pub fn tuple_e_u(t: usize, u: usize, k: usize) -> Tuple {
    (1..=t).map(|i| u32::from(i != k && i != u)).collect()
}

pub fn tuple_f_u(t: usize, u: usize, k: usize) -> Tuple {
    (1..=t).map(|i| u32::from(i == k || i == u)).collect()
}

/// 𝒯_u: f_u between 3 and r_u, all other entries 1 (empty unless r_u ≥ 5).
pub fn in_t_u(i: &[u32], r: &[u32], u: usize) -> bool {
    if u == 0 || r[u - 1] <= 4 {
        return false;
    }
    let fu = i[u - 1];
    (3..=r[u - 1]).contains(&fu)
        && i.iter()
            .enumerate()
            .all(|(j, &f)| j + 1 == u || f == 1)
}

/// ℰ = {I ∈ Δ : n(I) = t+1}.
pub fn in_e(i: &[u32]) -> bool {
    in_delta(i) && n_of(i) == i.len() + 1
}

pub fn in_h_u(i: &[u32], u: usize) -> bool {
    u >= 2 && in_delta(i) && n_of(i) == u && k_of(i) <= i.len()
}

pub fn in_h_u1(i: &[u32], u: usize) -> bool {
    u >= 2 && in_delta(i) && n_of(i) == u && k_of(i) == i.len() + 1
}

/// ℐ_u, the admissible n for ℱ_u.
pub fn script_i(t: usize, u: usize) -> Vec<usize> {
    if u == 0 {
        Vec::new()
    } else if u == 1 {
        (3..=t).collect()
    } else {
        (2..=t).filter(|&n| n != u).collect()
    }
}

pub fn in_f(i: &[u32], u: usize) -> bool {
    let t = i.len();
    script_i(t, u).into_iter().any(|n| i == tuple_e(t, n).as_slice())
}

pub fn in_f1(i: &[u32], u: usize) -> bool {
    let t = i.len();
    script_i(t, u)
        .into_iter()
        .any(|n| i == tuple_e_u(t, u, n).as_slice())
}

pub fn in_g(i: &[u32], u: usize) -> bool {
    u == 1 && i.len() >= 2 && i == tuple_e(i.len(), 2).as_slice()
}

pub fn in_g1(i: &[u32], u: usize) -> bool {
    let t = i.len();
    let lo = if u == 1 { 1 } else { 2 };
    (lo..=t).any(|n| i == tuple_e(t, n).as_slice())
}

/// Full membership profile of `i` for level bounds `r`, prime-2 position `u`
/// and the ℓ-dependent index `s`.
pub fn index_profile(i: &[u32], r: &[u32], u: usize, s: usize) -> Result<IndexProfile> {
    if !in_omega(i, r) {
        return Err(Error::Domain(format!("{i:?} is not in Omega for bounds {r:?}")));
    }
    let delta = in_delta(i);
    Ok(IndexProfile {
        m: m_of(i),
        n: n_of(i),
        k: k_of(i),
        in_delta: delta,
        in_square: !delta,
        in_t_u: in_t_u(i, r, u),
        in_e: in_e(i),
        in_h_u: in_h_u(i, u),
        in_h_u1: in_h_u1(i, u),
        in_f_s: in_f(i, s),
        in_f_s1: in_f1(i, s),
        in_g_s: in_g(i, s),
        in_g_s1: delta && in_g1(i, s),
    })
}

/// Every tuple in Ω(t), in mixed-radix order with the first coordinate
/// varying fastest.
pub fn omega(r: &[u32]) -> Vec<Tuple> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; r.len()];
    loop {
        if cur.iter().any(|&f| f > 0) {
            out.push(cur.clone());
        }
        let mut j = 0;
        loop {
            if j == r.len() {
                return out;
            }
            if cur[j] < r[j] {
                cur[j] += 1;
                break;
            }
            cur[j] = 0;
            j += 1;
        }
    }
}

/// Factorization plus the ascending divisor list of N, with an index map.
/// Shared through a process-wide cache because every divisor-indexed vector
/// at level N refers to the same basis.
#[derive(Debug)]
pub struct Level {
    pub fact: FactoredInteger,
    pub divisors: Vec<u64>,
    index: HashMap<u64, usize>,
}

impl Level {
    pub fn n(&self) -> u64 {
        self.fact.value()
    }

    pub fn len(&self) -> usize {
        self.divisors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.divisors.is_empty()
    }

    pub fn index(&self, d: u64) -> Option<usize> {
        self.index.get(&d).copied()
    }

    /// Index of a divisor known to divide N.
    pub fn idx(&self, d: u64) -> usize {
        self.index[&d]
    }

    pub fn z(&self, d: u64) -> u64 {
        gcd(d, self.n() / d)
    }

    /// φ(gcd(d, N/d)), the number of cusps of level d.
    pub fn orbit_size(&self, d: u64) -> u64 {
        euler_phi(self.z(d))
    }
}

static LEVELS: OnceLock<RwLock<HashMap<u64, Arc<Level>>>> = OnceLock::new();

pub fn level(n: u64) -> Arc<Level> {
    let cache = LEVELS.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(l) = cache.read().expect("level cache poisoned").get(&n) {
        return l.clone();
    }
    let fact = factor(n);
    let divisors = fact.divisors();
    let index = divisors.iter().enumerate().map(|(i, &d)| (d, i)).collect();
    let l = Arc::new(Level {
        fact,
        divisors,
        index,
    });
    let mut w = cache.write().expect("level cache poisoned");
    w.entry(n).or_insert(l).clone()
}
