//! The matrices Λ(N) and Υ(N), Ligozat's criterion, and divisors and
//! q-expansions of eta quotients.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::divisors::{CuspDivisor, EtaExponentVector};
use crate::error::{Error, Result};
use crate::intarith::{self, gcd, gcd_i128, level, val};

pub type Rational = Ratio<i128>;

/// A square matrix indexed by pairs of divisors of N (both ascending).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorMatrix<T> {
    #[serde(rename = "N")]
    pub n: u64,
    pub rows: Vec<Vec<T>>,
}

impl<T: Clone> DivisorMatrix<T> {
    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, d: u64, delta: u64) -> T {
        let lv = level(self.n);
        self.rows[lv.idx(d)][lv.idx(delta)].clone()
    }
}

impl DivisorMatrix<i128> {
    pub fn mul_vec(&self, v: &[i128]) -> Vec<i128> {
        self.rows
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<i128> {
        self.rows.iter().map(|r| r[j]).collect()
    }
}

/// a_N(d, δ) = (N / gcd(d, N/d)) · gcd(d, δ)² / (dδ); always an integer.
pub fn a_entry(n: u64, d: u64, delta: u64) -> i128 {
    let z = gcd(d, n / d) as i128;
    let g = gcd(d, delta) as i128;
    (n as i128 / z) * g * g / (d as i128 * delta as i128)
}

/// Λ(N)_{d,δ} = a_N(d, δ)/24: the order of vanishing of η(δτ) at a cusp of
/// level d, in the local parameter.
pub fn lambda_entry(n: u64, d: u64, delta: u64) -> Result<Rational> {
    if n == 0 || n % d != 0 || n % delta != 0 {
        return Err(Error::Domain(format!("{d} and {delta} must divide {n}")));
    }
    Ok(Rational::new(a_entry(n, d, delta), 24))
}

pub fn lambda(n: u64) -> DivisorMatrix<Rational> {
    let lv = level(n);
    let rows = lv
        .divisors
        .iter()
        .map(|&d| {
            lv.divisors
                .iter()
                .map(|&e| Rational::new(a_entry(n, d, e), 24))
                .collect()
        })
        .collect();
    DivisorMatrix { n, rows }
}

/// The tridiagonal block Υ(pʳ).
pub fn upsilon_prime_power(p: u64, r: u32) -> Vec<Vec<i128>> {
    let size = r as usize + 1;
    let p = p as i128;
    let m = |j: usize| (j as u32).min(r - j as u32);
    let mut out = vec![vec![0i128; size]; size];
    for i in 0..size {
        for j in 0..size {
            out[i][j] = if i == j {
                if j == 0 || j == r as usize {
                    p
                } else {
                    p.pow(m(j) - 1) * (p * p + 1)
                }
            } else if i.abs_diff(j) == 1 {
                -p.pow(m(j))
            } else {
                0
            };
        }
    }
    out
}

fn build_upsilon(n: u64) -> DivisorMatrix<i128> {
    let lv = level(n);
    let blocks: Vec<(u64, Vec<Vec<i128>>)> = lv
        .fact
        .factors()
        .iter()
        .map(|&(p, r)| (p, upsilon_prime_power(p, r)))
        .collect();
    let rows = lv
        .divisors
        .iter()
        .map(|&d| {
            lv.divisors
                .iter()
                .map(|&e| {
                    blocks
                        .iter()
                        .map(|(p, b)| b[val(*p, d) as usize][val(*p, e) as usize])
                        .product()
                })
                .collect()
        })
        .collect();
    DivisorMatrix { n, rows }
}

/// Υ(N), the tensor product of the prime-power blocks; cached per N.
pub fn upsilon(n: u64) -> Arc<DivisorMatrix<i128>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<DivisorMatrix<i128>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(m) = cache.read().expect("upsilon cache").get(&n) {
        return m.clone();
    }
    let m = Arc::new(build_upsilon(n));
    cache
        .write()
        .expect("upsilon cache")
        .entry(n)
        .or_insert(m)
        .clone()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnProfile {
    pub sum: i128,
    pub delta_weighted: i128,
    pub codelta_weighted: i128,
    pub gcd: i128,
}

/// Sums and gcd of the column of Υ(N) indexed by d.
pub fn upsilon_column_profile(n: u64, d: u64) -> Result<ColumnProfile> {
    let lv = level(n);
    let j = lv
        .index(d)
        .ok_or_else(|| Error::Domain(format!("{d} does not divide {n}")))?;
    let col = upsilon(n).column(j);
    let mut out = ColumnProfile {
        sum: 0,
        delta_weighted: 0,
        codelta_weighted: 0,
        gcd: 0,
    };
    for (&delta, &x) in lv.divisors.iter().zip(&col) {
        out.sum += x;
        out.delta_weighted += x * delta as i128;
        out.codelta_weighted += x * (n / delta) as i128;
        out.gcd = gcd_i128(out.gcd, x);
    }
    Ok(out)
}

/// Outcome of each of Ligozat's conditions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LigozatReport {
    pub integral: bool,
    pub cusp_infinity: bool,
    pub cusp_zero: bool,
    pub weight_zero: bool,
    pub square: bool,
}

impl LigozatReport {
    pub fn passed(&self) -> bool {
        self.integral && self.cusp_infinity && self.cusp_zero && self.weight_zero && self.square
    }

    /// Conditions that failed, numbered 0 to 4.
    pub fn failures(&self) -> Vec<u8> {
        [
            self.integral,
            self.cusp_infinity,
            self.cusp_zero,
            self.weight_zero,
            self.square,
        ]
        .iter()
        .enumerate()
        .filter(|(_, &ok)| !ok)
        .map(|(i, _)| i as u8)
        .collect()
    }
}

pub fn ligozat_check(r: &EtaExponentVector) -> LigozatReport {
    let lv = level(r.n);
    let mut s_delta = 0i128;
    let mut s_codelta = 0i128;
    let mut s = 0i128;
    for (&d, &e) in lv.divisors.iter().zip(&r.exps) {
        s += e;
        s_delta += e * d as i128;
        s_codelta += e * (r.n / d) as i128;
    }
    let square = lv.fact.primes().iter().all(|&p| {
        let t: i128 = lv
            .divisors
            .iter()
            .zip(&r.exps)
            .map(|(&d, &e)| val(p, d) as i128 * e)
            .sum();
        t % 2 == 0
    });
    LigozatReport {
        integral: true,
        cusp_infinity: s_delta % 24 == 0,
        cusp_zero: s_codelta % 24 == 0,
        weight_zero: s == 0,
        square,
    }
}

/// Ligozat's conditions for rational exponents; condition 0 is integrality.
pub fn ligozat_check_rational(n: u64, exps: &[Rational]) -> LigozatReport {
    if exps.iter().any(|x| !x.is_integer()) {
        return LigozatReport {
            integral: false,
            cusp_infinity: false,
            cusp_zero: false,
            weight_zero: false,
            square: false,
        };
    }
    let ints = exps.iter().map(|x| x.to_integer()).collect();
    ligozat_check(&EtaExponentVector { n, exps: ints })
}

/// A cuspidal divisor with rational coefficients on (P_d).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalDivisor {
    pub n: u64,
    pub coeffs: Vec<Rational>,
}

impl RationalDivisor {
    pub fn to_integral(&self) -> Option<CuspDivisor> {
        if self.coeffs.iter().any(|c| !c.is_integer()) {
            return None;
        }
        CuspDivisor::new(self.n, self.coeffs.iter().map(|c| c.to_integer()).collect()).ok()
    }

    pub fn degree(&self) -> Rational {
        let lv = level(self.n);
        lv.divisors
            .iter()
            .zip(&self.coeffs)
            .map(|(&d, c)| c * Rational::from(lv.orbit_size(d) as i128))
            .fold(Rational::zero(), |a, b| a + b)
    }
}

/// div(∏ η(δτ)^{r_δ}) = Λ(N)·r.
pub fn eta_divisor(r: &EtaExponentVector) -> RationalDivisor {
    let lv = level(r.n);
    let coeffs = lv
        .divisors
        .iter()
        .map(|&d| {
            let num: i128 = lv
                .divisors
                .iter()
                .zip(&r.exps)
                .map(|(&e, &x)| a_entry(r.n, d, e) * x)
                .sum();
            Rational::new(num, 24)
        })
        .collect();
    RationalDivisor { n: r.n, coeffs }
}

/// q^{a/24}·Σ cₖ qᵏ, truncated after K coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QExpansion {
    /// a = Σ r_δ δ.
    pub shift24: i128,
    pub coeffs: Vec<BigInt>,
}

impl QExpansion {
    pub fn leading_exponent(&self) -> Rational {
        Rational::new(self.shift24, 24)
    }
}

impl fmt::Display for QExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q^({}/24) * (", self.shift24)?;
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "q")?,
                (1, false) => write!(f, "{mag}q")?,
                (_, true) => write!(f, "q^{k}")?,
                (_, false) => write!(f, "{mag}q^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{}))", self.coeffs.len())
    }
}

pub const DEFAULT_PRECISION: usize = 20;

/// Expands ∏ η(δτ)^{r_δ} through the Euler product; factors with negative
/// exponent are inverted as geometric series.
pub fn eta_qexpansion(r: &EtaExponentVector, k: usize) -> Result<QExpansion> {
    if k == 0 {
        return Err(Error::Domain("precision must be at least 1".into()));
    }
    let lv = level(r.n);
    let mut c = vec![BigInt::zero(); k];
    c[0] = BigInt::one();
    let mut shift24 = 0i128;
    for (&delta, &e) in lv.divisors.iter().zip(&r.exps) {
        shift24 += e * delta as i128;
        if e == 0 {
            continue;
        }
        let delta = delta as usize;
        let mut m = delta;
        while m < k {
            for _ in 0..e.unsigned_abs() {
                if e > 0 {
                    for i in (m..k).rev() {
                        let t = c[i - m].clone();
                        c[i] -= t;
                    }
                } else {
                    for i in m..k {
                        let t = c[i - m].clone();
                        c[i] += t;
                    }
                }
            }
            m += delta;
        }
    }
    Ok(QExpansion { shift24, coeffs: c })
}

/// κ(N) as i128.
pub fn kappa(n: u64) -> i128 {
    intarith::kappa(&level(n).fact) as i128
}

/// Checks Υ(N)·Λ(N) = Λ(N)·Υ(N) = (κ(N)/24)·Id exactly.
pub fn inverse_identity_holds(n: u64) -> bool {
    let u = upsilon(n);
    let lv = level(n);
    let s = lv.len();
    let k = kappa(n);
    let a: Vec<Vec<i128>> = lv
        .divisors
        .iter()
        .map(|&d| lv.divisors.iter().map(|&e| a_entry(n, d, e)).collect())
        .collect();
    for i in 0..s {
        for j in 0..s {
            let want = if i == j { k } else { 0 };
            let ua: i128 = (0..s).map(|t| u.rows[i][t] * a[t][j]).sum();
            let au: i128 = (0..s).map(|t| a[i][t] * u.rows[t][j]).sum();
            if ua != want || au != want {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_examples() {
        assert_eq!(a_entry(12, 12, 3), 3);
        assert_eq!(a_entry(12, 1, 3), 4);
        assert_eq!(a_entry(12, 2, 3), 1);
        assert_eq!(lambda_entry(12, 2, 3).unwrap(), Rational::new(1, 24));
        assert!(lambda_entry(12, 5, 3).is_err());
    }

    #[test]
    fn a_entries_integral() {
        for n in 1..=400u64 {
            let lv = level(n);
            for &d in &lv.divisors {
                let z = gcd(d, n / d);
                for &e in &lv.divisors {
                    let g = gcd(d, e);
                    assert_eq!((n / z * g * g) % (d * e), 0, "N={n} d={d} δ={e}");
                }
            }
        }
    }

    #[test]
    fn upsilon_examples() {
        assert_eq!(upsilon_prime_power(7, 1), vec![vec![7, -1], vec![-1, 7]]);
        assert_eq!(
            upsilon(4).rows,
            vec![vec![2, -2, 0], vec![-1, 5, -1], vec![0, -2, 2]]
        );
        assert!(inverse_identity_holds(15));
    }

    #[test]
    fn inverse_identity_small() {
        for n in 1..=200 {
            assert!(inverse_identity_holds(n), "N = {n}");
        }
    }

    #[test]
    fn column_profiles() {
        assert_eq!(upsilon_column_profile(12, 12).unwrap().delta_weighted, 48);
        assert_eq!(upsilon_column_profile(12, 2).unwrap().delta_weighted, 0);
        assert_eq!(upsilon_column_profile(27, 9).unwrap().gcd, 1);
        for n in 2..=500u64 {
            let lv = level(n);
            let k = kappa(n);
            let phis: i128 = lv.fact.primes().iter().map(|&p| p as i128 - 1).product();
            for &d in &lv.divisors {
                let c = upsilon_column_profile(n, d).unwrap();
                let z = gcd(d, n / d);
                assert_eq!(c.sum, intarith::euler_phi(z) as i128 * phis, "N={n} d={d}");
                assert_eq!(c.delta_weighted, if d == n { k } else { 0 });
                assert_eq!(c.codelta_weighted, if d == 1 { k } else { 0 });
                assert_eq!(c.gcd, (z / intarith::factor(z).rad()) as i128);
            }
        }
    }

    #[test]
    fn ligozat_examples() {
        let good = EtaExponentVector::new(11, vec![12, -12]).unwrap();
        assert!(ligozat_check(&good).passed());
        let bad = EtaExponentVector::new(11, vec![5, -5]).unwrap();
        let rep = ligozat_check(&bad);
        assert!(!rep.passed());
        assert!(rep.failures().contains(&1));
        assert!(ligozat_check(&EtaExponentVector::zero(4)).passed());
        let frac = [Rational::new(1, 2), Rational::new(-1, 2)];
        assert_eq!(ligozat_check_rational(11, &frac).failures(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn eta_divisor_examples() {
        let r = EtaExponentVector::new(11, vec![12, -12]).unwrap();
        let d = eta_divisor(&r).to_integral().unwrap();
        assert_eq!(d.coeffs(), &[5, -5]);
        assert!(eta_divisor(&EtaExponentVector::zero(30)).to_integral().unwrap().is_zero());
        let q = eta_qexpansion(&r, 5).unwrap();
        assert_eq!(q.leading_exponent(), Rational::from(-5));
        assert_eq!(q.leading_exponent(), Rational::from(d.coeffs()[1]));
    }

    #[test]
    fn delta_function_coefficients() {
        let r = EtaExponentVector::new(1, vec![24]).unwrap();
        let q = eta_qexpansion(&r, 6).unwrap();
        let tau: Vec<BigInt> = [1, -24, 252, -1472, 4830, -6048].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(q.coeffs, tau);
        assert_eq!(q.shift24, 24);
        let single = eta_qexpansion(&EtaExponentVector::new(1, vec![1]).unwrap(), 3).unwrap();
        assert_eq!(single.leading_exponent(), Rational::new(1, 24));
    }

    #[test]
    fn euler_product_matches_pentagonal_numbers() {
        let k = 200;
        let q = eta_qexpansion(&EtaExponentVector::new(1, vec![1]).unwrap(), k).unwrap();
        let mut want = vec![BigInt::zero(); k];
        for j in -20i64..=20 {
            let e = j * (3 * j - 1) / 2;
            if (e as usize) < k {
                want[e as usize] += if j % 2 == 0 { 1 } else { -1 };
            }
        }
        assert_eq!(q.coeffs, want);
        // η^{-1} is the partition generating function
        let inv = eta_qexpansion(&EtaExponentVector::new(1, vec![-1]).unwrap(), 10).unwrap();
        let parts: Vec<BigInt> = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(inv.coeffs, parts);
    }

    #[test]
    fn display_format() {
        let r = EtaExponentVector::new(1, vec![24]).unwrap();
        let s = eta_qexpansion(&r, 3).unwrap().to_string();
        assert_eq!(s, "q^(24/24) * (1 - 24q + 252q^2 + O(q^3))");
    }
}
