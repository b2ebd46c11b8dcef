//! Orders of degree-0 rational cuspidal divisor classes: the profile
//! (V, GCD, 𝕍, Pw_p, 𝔥), eta-quotient certificates, the tensor shortcut and
//! closed forms for C_N and C_d.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::divisors::{self, CuspDivisor, EtaExponentVector};
use crate::error::{Error, Result};
use crate::etalinalg::{self, upsilon, Rational};
use crate::intarith::{self, factor, gcd, gcd_i128, level, val};

/// Order invariants of a rational cuspidal divisor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderProfile {
    pub n: u64,
    pub v: Vec<i128>,
    /// gcd of the entries of V; 0 only for the zero divisor.
    pub gcd_value: i128,
    /// V / GCD with the signs of V kept; None for the zero divisor.
    pub normalized: Option<Vec<i128>>,
    /// Pw_p for each prime p | N.
    pub pw: BTreeMap<u64, i128>,
    pub h: u8,
    /// The class order; None when the divisor has nonzero degree.
    pub order: Option<u128>,
}

impl OrderProfile {
    pub fn is_zero_divisor(&self) -> bool {
        self.gcd_value == 0
    }
}

#[derive(Serialize, Deserialize)]
struct ProfileRepr {
    #[serde(rename = "N")]
    n: u64,
    #[serde(rename = "V")]
    v: Vec<i128>,
    gcd: i128,
    #[serde(rename = "Vbar")]
    vbar: Option<Vec<i128>>,
    pw: BTreeMap<String, i128>,
    h: u8,
    order: Option<String>,
}

impl Serialize for OrderProfile {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ProfileRepr {
            n: self.n,
            v: self.v.clone(),
            gcd: self.gcd_value,
            vbar: self.normalized.clone(),
            pw: self.pw.iter().map(|(p, x)| (p.to_string(), *x)).collect(),
            h: self.h,
            order: self.order.map(|o| o.to_string()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for OrderProfile {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = ProfileRepr::deserialize(de)?;
        let mut pw = BTreeMap::new();
        for (k, x) in r.pw {
            pw.insert(k.parse().map_err(D::Error::custom)?, x);
        }
        let order = match r.order {
            Some(s) => Some(s.parse().map_err(D::Error::custom)?),
            None => None,
        };
        Ok(OrderProfile {
            n: r.n,
            v: r.v,
            gcd_value: r.gcd,
            normalized: r.vbar,
            pw,
            h: r.h,
            order,
        })
    }
}

/// numerator(κ·h / (24·GCD)).
pub fn order_from(kappa: u128, h: u8, gcd_value: u128) -> u128 {
    if gcd_value == 0 {
        return 1;
    }
    let num = kappa * h as u128;
    num / num.gcd(&(24 * gcd_value))
}

fn pw_of(n: u64, normalized: &[i128]) -> BTreeMap<u64, i128> {
    let lv = level(n);
    lv.fact
        .primes()
        .into_iter()
        .map(|p| {
            let s = lv
                .divisors
                .iter()
                .zip(normalized)
                .filter(|(&d, _)| val(p, d) % 2 == 1)
                .map(|(_, &x)| x)
                .sum();
            (p, s)
        })
        .collect()
}

fn assemble(n: u64, v: Vec<i128>, degree_zero: bool) -> OrderProfile {
    let g = v.iter().fold(0, |a, &x| gcd_i128(a, x));
    if g == 0 {
        return OrderProfile {
            n,
            v,
            gcd_value: 0,
            normalized: None,
            pw: BTreeMap::new(),
            h: 1,
            order: Some(1),
        };
    }
    let normalized: Vec<i128> = v.iter().map(|x| x / g).collect();
    let pw = pw_of(n, &normalized);
    let h = if pw.values().any(|x| x % 2 != 0) { 2 } else { 1 };
    let order = degree_zero.then(|| order_from(intarith::kappa(&level(n).fact), h, g as u128));
    OrderProfile {
        n,
        v,
        gcd_value: g,
        normalized: Some(normalized),
        pw,
        h,
        order,
    }
}

/// V(C) = Υ(N)·Φ_N(C).
pub fn v_vector(c: &CuspDivisor) -> Vec<i128> {
    upsilon(c.level()).mul_vec(c.coeffs())
}

pub fn profile(c: &CuspDivisor) -> OrderProfile {
    assemble(c.level(), v_vector(c), c.degree() == 0)
}

/// Order of the class of a degree-0 divisor.
pub fn order(c: &CuspDivisor) -> Result<u128> {
    profile(c)
        .order
        .ok_or_else(|| Error::Domain("divisor has nonzero degree".into()))
}

/// The exponent vector r = n·(24/κ(N))·V(C) of an eta quotient with divisor
/// n·C, where n is the order of C.  Every step is re-checked: integrality,
/// Ligozat's conditions, the divisor identity, and the failure of each
/// proper divisor of n.
pub fn eta_certificate(c: &CuspDivisor, n: u128) -> Result<EtaExponentVector> {
    let prof = profile(c);
    if prof.order.is_none() {
        return Err(Error::Domain("divisor has nonzero degree".into()));
    }
    let lvl = c.level();
    let kappa = etalinalg::kappa(lvl);
    let scaled = |m: u128| -> Vec<Rational> {
        prof.v
            .iter()
            .map(|&x| Rational::new(x * 24 * m as i128, kappa))
            .collect()
    };
    let exps = scaled(n);
    let report = etalinalg::ligozat_check_rational(lvl, &exps);
    if !report.passed() {
        return Err(Error::Internal(format!(
            "certificate for order {n} fails conditions {:?}",
            report.failures()
        )));
    }
    let r = EtaExponentVector::new(lvl, exps.iter().map(|x| x.to_integer()).collect())?;
    let div = etalinalg::eta_divisor(&r).to_integral();
    if div.as_ref() != Some(&c.scale(n as i128)) {
        return Err(Error::Internal("eta quotient divisor differs from n·C".into()));
    }
    for q in factor(n as u64).primes() {
        let smaller = scaled(n / q as u128);
        if etalinalg::ligozat_check_rational(lvl, &smaller).passed() {
            return Err(Error::Internal(format!("order {n} is not minimal")));
        }
    }
    Ok(r)
}

/// Profile of C₁ ⊗ C₂ computed from the factors alone.
pub fn tensor_profile(c1: &CuspDivisor, c2: &CuspDivisor) -> Result<OrderProfile> {
    let (n1, n2) = (c1.level(), c2.level());
    if gcd(n1, n2) != 1 {
        return Err(Error::Domain(format!("levels {n1} and {n2} are not coprime")));
    }
    if c1.degree() != 0 {
        return Err(Error::Domain("first factor must have degree 0".into()));
    }
    let p1 = profile(c1);
    let p2 = assemble(n2, v_vector(c2), c2.degree() == 0);
    let n = n1 * n2;
    let v = divisors::tensor(
        &CuspDivisor::new(n1, p1.v.clone())?,
        &CuspDivisor::new(n2, p2.v.clone())?,
    )?
    .coeffs()
    .to_vec();
    let (Some(nb1), Some(nb2)) = (&p1.normalized, &p2.normalized) else {
        return Ok(assemble(n, v, true));
    };
    let nb = divisors::tensor(
        &CuspDivisor::new(n1, nb1.clone())?,
        &CuspDivisor::new(n2, nb2.clone())?,
    )?
    .coeffs()
    .to_vec();
    let total2: i128 = nb2.iter().sum();
    let mut pw = BTreeMap::new();
    for (&p, &x) in &p1.pw {
        pw.insert(p, x * total2);
    }
    for &p in p2.pw.keys() {
        pw.insert(p, 0);
    }
    let h = if pw.values().any(|x| x % 2 != 0) { 2 } else { 1 };
    let g = p1.gcd_value * p2.gcd_value;
    Ok(OrderProfile {
        n,
        v,
        gcd_value: g,
        normalized: Some(nb),
        pw,
        h,
        order: Some(order_from(intarith::kappa(&level(n).fact), h, g as u128)),
    })
}

/// Closed-form GCD, 𝔥 and order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedOrder {
    pub g: u128,
    pub h: u8,
    pub order: u128,
}

fn v2(x: u64) -> u32 {
    val(2, x)
}

/// Odd primes p ≠ q with matching 2-adic valuations of p ∓ 1.
fn balanced_pair(p: u64, q: u64) -> bool {
    p % 2 == 1 && q % 2 == 1 && v2(p - 1) == v2(q - 1) && v2(p + 1) == v2(q + 1)
}

/// 𝔤(N): the GCD of C_N.
pub fn frak_g(n: u64) -> u128 {
    if n == 1 {
        return 0;
    }
    let f = factor(n);
    if f.is_squarefree() {
        let t = f.t() as u32;
        let first = if t % 2 == 1 { n as u128 + 1 } else { n as u128 - 1 };
        return f
            .primes()
            .iter()
            .fold(first, |a, &p| a.gcd(&(p as u128 * p as u128 - 1)));
    }
    let squares: Vec<(u64, u32)> = f.factors().iter().copied().filter(|&(_, e)| e >= 2).collect();
    if squares.len() == 1 && squares[0].1 == 2 {
        let p = squares[0].0;
        let m = n / (p * p);
        return (p as u128).gcd(&frak_g(m));
    }
    1
}

/// 𝔥(N): the 𝔥-invariant of C_N.
pub fn frak_h(n: u64) -> u8 {
    let f = factor(n);
    let two = match f.factors() {
        [(_, 1)] => true,
        [(2, r)] => r % 2 == 1,
        [(p, 1), (q, 1)] => balanced_pair(*p, *q),
        [(2, 2), (p, 1)] => p % 4 == 1,
        _ => false,
    };
    if two {
        2
    } else {
        1
    }
}

pub fn closed_order_cn(n: u64) -> Result<ClosedOrder> {
    if n < 2 {
        return Err(Error::Domain("C_N needs N ≥ 2".into()));
    }
    let g = frak_g(n);
    let h = frak_h(n);
    Ok(ClosedOrder {
        g,
        h,
        order: order_from(intarith::kappa(&factor(n)), h, g),
    })
}

/// The order n(N) of C_N from its explicit case table; None at levels where
/// the table does not give an integer.
pub fn cn_order_table(n: u64) -> Option<u128> {
    let f = factor(n);
    let kappa = intarith::kappa(&f);
    let exact = |num: u128, den: u128| (den != 0 && num % den == 0).then(|| num / den);
    if f.t() == 1 {
        let (p, r) = (f.prime(0) as u128, f.exp(0));
        return match r {
            1 => Some((p - 1) / (p - 1).gcd(&12)),
            2 => Some((p * p - 1) / (p * p - 1).gcd(&24)),
            _ if p == 2 && r % 2 == 1 => Some(1 << (r - 3)),
            _ => exact(p.pow(r - 1) * (p * p - 1), 24),
        };
    }
    if f.is_squarefree() {
        let ps: Vec<u128> = f.primes().iter().map(|&p| p as u128).collect();
        if f.t() == 2 {
            let (p, q) = (ps[0], ps[1]);
            if p == 2 {
                return exact(q * q - 1, 8 * 3u128.gcd(&(q + 1)));
            }
            return exact(
                (p * p - 1) * (q * q - 1),
                12 * (p - 1).gcd(&(q - 1)) * (p + 1).gcd(&(q + 1)),
            );
        }
        let prod: u128 = ps.iter().map(|p| p * p - 1).product();
        return exact(prod, 24 * frak_g(n));
    }
    let squares: Vec<(u64, u32)> = f.factors().iter().copied().filter(|&(_, e)| e >= 2).collect();
    if squares.len() == 1 && squares[0].1 == 2 {
        let p = squares[0].0;
        let m = n / (p * p);
        let m_is_prime_1_mod_4 = intarith::is_prime(m) && m % 4 == 1;
        if p % 2 == 1 && frak_g(m) % p as u128 == 0 {
            return exact(kappa, 24 * p as u128);
        }
        if p == 2 && !m_is_prime_1_mod_4 {
            return exact(kappa, 48);
        }
        return exact(kappa, 24);
    }
    exact(kappa, 24)
}

/// 𝔤(N, d) and 𝔥(N, d): GCD and 𝔥 of C_d.
pub fn closed_order_cd(n: u64, d: u64) -> Result<ClosedOrder> {
    if d <= 1 || n % d != 0 {
        return Err(Error::Domain(format!("need 1 < d | N, got d = {d}, N = {n}")));
    }
    if d == n {
        return closed_order_cn(n);
    }
    let z = gcd(d, n / d);
    let g = if z == 1 {
        frak_g(d)
    } else if intarith::is_prime(z) && val(z, d) == 1 {
        (z as u128).gcd(&frak_g(d / z))
    } else {
        (z / factor(z).rad()) as u128
    };
    let r = val(2, n);
    let odd = n >> r;
    let h2 = {
        let d_odd = d >> val(2, d);
        let fd = factor(d);
        // N a power of 2, d = 2 or an even power of 2
        (odd == 1 && r >= 2 && (d == 2 || val(2, d) % 2 == 0))
            // N = 2^r p, d = 2p, p ≡ 1 mod 4
            || (r >= 2 && intarith::is_prime(odd) && odd % 4 == 1 && d == 2 * odd)
            // N = 2^r d with d an odd prime or a balanced pair of odd primes
            || (r >= 1
                && d == odd
                && d_odd == d
                && match fd.factors() {
                    [(_, 1)] => true,
                    [(p, 1), (q, 1)] => balanced_pair(*p, *q),
                    _ => false,
                })
    };
    let h = if h2 { 2 } else { 1 };
    Ok(ClosedOrder {
        g,
        h,
        order: order_from(intarith::kappa(&factor(n)), h, g),
    })
}

/// gcd(pq−1, p−q) = gcd(pq−1, p²−1, q²−1) = 2ᵃ·gcd(p−1, q−1)·gcd(p+1, q+1)
/// for distinct odd primes, with a = 0 for balanced pairs and −1 otherwise.
pub fn squarefree_pair_identity(p: u64, q: u64) -> bool {
    let (p, q) = (p as i128, q as i128);
    let g1 = gcd_i128(p * q - 1, p - q);
    let g2 = gcd_i128(gcd_i128(p * q - 1, p * p - 1), q * q - 1);
    let h = gcd_i128(p - 1, q - 1) * gcd_i128(p + 1, q + 1);
    let rhs = if balanced_pair(p as u64, q as u64) { h } else { h / 2 };
    g1 == g2 && g2 == rhs && (balanced_pair(p as u64, q as u64) || h % 2 == 0)
}

/// 2·𝔤(N) divides sᵢ(N) = (pᵢ+1)∏_{j≠i}(pⱼ−1) for squarefree N with t ≥ 3.
pub fn squarefree_many_divisibility(n: u64) -> bool {
    let f = factor(n);
    let g = frak_g(n);
    let ps = f.primes();
    (0..ps.len()).all(|i| {
        let s: u128 = ps
            .iter()
            .enumerate()
            .map(|(j, &p)| if i == j { p as u128 + 1 } else { p as u128 - 1 })
            .product();
        s % (2 * g) == 0
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisors::c_generator;
    use crate::etalinalg::ligozat_check;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn mazur_example() {
        let c = c_generator(11, 11).unwrap();
        let pr = profile(&c);
        assert_eq!(pr.v, vec![12, -12]);
        assert_eq!(pr.gcd_value, 12);
        assert_eq!(pr.normalized, Some(vec![1, -1]));
        assert_eq!(pr.pw[&11], -1);
        assert_eq!(pr.h, 2);
        assert_eq!(pr.order, Some(5));
        let r = eta_certificate(&c, 5).unwrap();
        assert_eq!(r.exps, vec![12, -12]);
    }

    #[test]
    fn prime_square_example() {
        for p in [7u64, 11, 13, 17] {
            let c = c_generator(p * p, p).unwrap();
            let pr = profile(&c);
            let pi = p as i128;
            assert_eq!(pr.v, vec![pi * pi, -pi * (pi + 1), pi]);
            assert_eq!(pr.gcd_value, pi);
            assert_eq!(pr.h, 1);
            assert_eq!(pr.order, Some((p as u128 * p as u128 - 1) / 24));
        }
    }

    #[test]
    fn level_64_d32() {
        let pr = profile(&c_generator(64, 32).unwrap());
        assert_eq!(pr.gcd_value, 1);
        assert_eq!(pr.pw[&2], -6);
        assert_eq!(pr.order, Some(4));
    }

    #[test]
    fn zero_and_nonzero_degree() {
        let z = profile(&CuspDivisor::zero(30));
        assert!(z.is_zero_divisor());
        assert_eq!(z.order, Some(1));
        let e = profile(&divisors::orbit_divisor(30, 1).unwrap());
        assert_eq!(e.order, None);
        assert!(order(&divisors::orbit_divisor(30, 1).unwrap()).is_err());
    }

    #[test]
    fn profile_json_round_trip() {
        let pr = profile(&c_generator(64, 32).unwrap());
        let s = serde_json::to_string(&pr).unwrap();
        assert!(s.contains("\"order\":\"4\""));
        let back: OrderProfile = serde_json::from_str(&s).unwrap();
        assert_eq!(back, pr);
    }

    #[test]
    fn small_genus_zero_levels_trivial() {
        for n in [2u64, 3, 4, 5, 6, 7, 8, 9, 10, 12, 13, 16, 18, 25] {
            for &d in &level(n).divisors[1..] {
                assert_eq!(order(&c_generator(n, d).unwrap()).unwrap(), 1, "N={n} d={d}");
            }
        }
    }

    #[test]
    fn closed_forms_match_profiles() {
        for n in 2..=300u64 {
            for &d in &level(n).divisors[1..] {
                let pr = profile(&c_generator(n, d).unwrap());
                let cf = closed_order_cd(n, d).unwrap();
                assert_eq!(
                    (pr.gcd_value as u128, pr.h, pr.order.unwrap()),
                    (cf.g, cf.h, cf.order),
                    "N = {n}, d = {d}"
                );
            }
        }
    }

    #[test]
    fn cn_table_examples() {
        assert_eq!(cn_order_table(11), Some(5));
        assert_eq!(cn_order_table(14), Some(6));
        assert_eq!(cn_order_table(128), Some(16));
        for n in 2..=1000u64 {
            let g = closed_order_cn(n).unwrap();
            if let Some(t) = cn_order_table(n) {
                assert_eq!(t, g.order, "N = {n}");
            }
        }
    }

    #[test]
    fn order_divides_kappa_over_12() {
        let genus_zero = [1u64, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 13, 16, 18, 25];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..=300u64 {
            if genus_zero.contains(&n) {
                continue;
            }
            let k = intarith::kappa(&factor(n));
            let c = random_degree_zero(&mut rng, n);
            let o = order(&c).unwrap();
            assert_eq!((k / 12) % o, 0, "N = {n}");
        }
    }

    fn random_degree_zero(rng: &mut ChaCha8Rng, n: u64) -> CuspDivisor {
        let mut c = CuspDivisor::zero(n);
        for &d in &level(n).divisors[1..] {
            let k: i128 = rng.gen_range(-5..=5);
            c += &c_generator(n, d).unwrap().scale(k);
        }
        c
    }

    #[test]
    fn scaling_divides_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.gen_range(11..=200u64);
            let c = random_degree_zero(&mut rng, n);
            let o = order(&c).unwrap();
            let k: u128 = rng.gen_range(1..=30);
            assert_eq!(order(&c.scale(k as i128)).unwrap(), o / o.gcd(&k));
        }
    }

    #[test]
    fn certificates_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.gen_range(2..=200u64);
            let c = random_degree_zero(&mut rng, n);
            let o = order(&c).unwrap();
            let r = eta_certificate(&c, o).unwrap();
            assert!(ligozat_check(&r).passed());
            assert!(eta_certificate(&c, o * 2).is_err() || o == 0);
        }
    }

    #[test]
    fn tensor_profile_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut done = 0;
        while done < 200 {
            let n1 = rng.gen_range(2..=40u64);
            let n2 = rng.gen_range(2..=40u64);
            if gcd(n1, n2) != 1 || n1 * n2 > 400 {
                continue;
            }
            let c1 = random_degree_zero(&mut rng, n1);
            let c2 = CuspDivisor::new(
                n2,
                (0..level(n2).len()).map(|_| rng.gen_range(-4..=4)).collect(),
            )
            .unwrap();
            let t = tensor_profile(&c1, &c2).unwrap();
            let direct = profile(&divisors::tensor(&c1, &c2).unwrap());
            assert_eq!(t, direct, "{n1} x {n2}");
            done += 1;
        }
        let x = CuspDivisor::new(3, vec![1, -1]).unwrap();
        let y = CuspDivisor::new(5, vec![5, 1]).unwrap();
        assert!(tensor_profile(&y, &x).is_err());
        let t = tensor_profile(&x, &y).unwrap();
        assert_eq!(t.pw[&5], 0);
    }

    #[test]
    fn gcd_lemmas() {
        let odd_primes: Vec<u64> = (3..100).filter(|&p| intarith::is_prime(p)).collect();
        for &p in &odd_primes {
            for &q in &odd_primes {
                if p != q {
                    assert!(squarefree_pair_identity(p, q), "{p} {q}");
                }
            }
        }
        for n in 2..3000u64 {
            let f = factor(n);
            if f.is_squarefree() && f.t() >= 3 {
                assert!(squarefree_many_divisibility(n), "N = {n}");
            }
        }
    }
}
