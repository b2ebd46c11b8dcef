//! Canonical generators of C(N): the prime ordering attached to a prime ℓ,
//! the orderings ≺ and ◁ on the nontrivial divisors together with the
//! bijection ι, the prime-power vectors A, B and B², the two-prime vector D,
//! the composite divisors Z¹/Z and Y⁰/Y¹/Y², and the closed-form orders
//! 𝔫(N, d) and 𝔑(N, d).
//!
//! Index sets follow the 1-based conventions of `intarith`: position i
//! refers to the i-th prime of the ordered factorization.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::divisors::{self, CuspDivisor, DivisorOp};
use crate::error::{Error, Result};
use crate::etalinalg::upsilon;
use crate::intarith::{
    self, factor, in_delta, in_e, in_f, in_f1, in_g, in_g1, in_h_u, in_h_u1, in_t_u, is_prime,
    k_of, m_of, n_of, pow, tuple_a, val, FactoredInteger, Tuple,
};

/// N with its primes permuted to satisfy the ordering assumption for ℓ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderedLevel {
    pub base: FactoredInteger,
    pub ell: u64,
    /// 1-based position of the prime 2, or 0 when N is odd.
    pub u: usize,
    /// 0 when ℓ is odd, u when ℓ = 2.
    pub s: usize,
    /// γᵢ = pᵢ^{rᵢ−1}(pᵢ+1).
    pub gammas: Vec<u128>,
}

impl OrderedLevel {
    pub fn n(&self) -> u64 {
        self.base.value()
    }

    pub fn t(&self) -> usize {
        self.base.t()
    }

    /// The i-th prime, 1-based.
    pub fn p(&self, i: usize) -> u64 {
        self.base.prime(i - 1)
    }

    pub fn r(&self, i: usize) -> u32 {
        self.base.exp(i - 1)
    }

    pub fn gamma(&self, i: usize) -> u128 {
        self.gammas[i - 1]
    }

    pub fn bounds(&self) -> Vec<u32> {
        self.base.exponents()
    }

    pub fn tuple(&self, d: u64) -> Tuple {
        self.base.tuple_of(d)
    }

    pub fn divisor(&self, i: &[u32]) -> u64 {
        self.base.from_tuple(i)
    }

    pub fn primes(&self) -> Vec<u64> {
        self.base.primes()
    }

    fn satisfies_assumption(&self) -> bool {
        let l = self.ell;
        let t = self.t();
        let vg: Vec<u32> = self.gammas.iter().map(|&g| val_u128(l, g)).collect();
        if vg.windows(2).any(|w| w[0] < w[1]) {
            return false;
        }
        let vp: Vec<u32> = (1..=t)
            .filter(|&i| i != self.s)
            .map(|i| val(l, self.p(i) - 1))
            .collect();
        vp.windows(2).all(|w| w[0] <= w[1])
    }
}

fn val_u128(p: u64, mut n: u128) -> u32 {
    let p = p as u128;
    let mut e = 0;
    while n != 0 && n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

fn with_order(fact: &FactoredInteger, ell: u64, perm: &[usize]) -> OrderedLevel {
    let base = fact.reorder(perm);
    let u = base.u();
    let s = if ell == 2 { u } else { 0 };
    let gammas = base
        .factors()
        .iter()
        .map(|&(p, r)| (p as u128).pow(r - 1) * (p as u128 + 1))
        .collect();
    OrderedLevel { base, ell, u, s, gammas }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Orders the primes of N for ℓ: val_ℓ(γ) descending, then val_ℓ(p−1)
/// ascending, then the prime itself.  Falls back to an exhaustive search
/// when the sort does not meet both conditions.
pub fn order_primes(n: u64, ell: u64) -> Result<OrderedLevel> {
    if n == 0 {
        return Err(Error::Domain("N must be positive".into()));
    }
    if !is_prime(ell) {
        return Err(Error::Domain(format!("{ell} is not prime")));
    }
    let fact = factor(n);
    let t = fact.t();
    let mut perm: Vec<usize> = (0..t).collect();
    perm.sort_by_key(|&i| {
        let (p, r) = fact.factors()[i];
        let g = (p as u128).pow(r - 1) * (p as u128 + 1);
        (std::cmp::Reverse(val_u128(ell, g)), val(ell, p - 1), p)
    });
    let lvl = with_order(&fact, ell, &perm);
    if lvl.satisfies_assumption() {
        return Ok(lvl);
    }
    let mut perm: Vec<usize> = (0..t).collect();
    loop {
        let lvl = with_order(&fact, ell, &perm);
        if lvl.satisfies_assumption() {
            return Ok(lvl);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Err(Error::Internal(format!("no prime ordering of {n} fits ℓ = {ell}")))
}

/// The ladder ≺_r on {0, …, r}, smallest first.
pub fn prec_ladder(r: u32) -> Vec<u32> {
    match r {
        0 => vec![0],
        1 => vec![1, 0],
        2 => vec![1, 0, 2],
        3 => vec![1, 0, 2, 3],
        _ => {
            let mut v = vec![1, 0, 2];
            v.extend((3..=r).rev());
            v
        }
    }
}

/// The ladder ◁_r on {0, …, r}, smallest first.
pub fn tri_ladder(r: u32) -> Vec<u32> {
    match r {
        0 => vec![0],
        1 => vec![0, 1],
        2 => vec![0, 1, 2],
        3 => vec![0, 1, 3, 2],
        _ => {
            let mut v = vec![0, 1, r];
            let (mut lo, mut hi) = (2, r - 1);
            let mut take_hi = true;
            while lo <= hi {
                if take_hi {
                    v.push(hi);
                    hi -= 1;
                } else {
                    v.push(lo);
                    lo += 1;
                }
                take_hi = !take_hi;
            }
            v
        }
    }
}

/// ι_r: the element of ◁_r in the position that i occupies in ≺_r.
pub fn iota_r(r: u32, i: u32) -> u32 {
    let pos = prec_ladder(r).iter().position(|&x| x == i).expect("index out of range");
    tri_ladder(r)[pos]
}

/// ι on Δ(t).
pub fn iota_delta(i: &[u32], u: usize) -> Tuple {
    let t = i.len();
    let m = m_of(i);
    let x = m.max(u);
    let mut b: Tuple = i.iter().map(|&a| 1 - a).collect();
    if in_e(i) {
        b[x - 1] = 1;
    } else if in_h_u1(i, u) {
        b[m - 1] = 1;
        b[u - 1] = 0;
    }
    debug_assert_eq!(b.len(), t);
    b
}

/// ι_Ω: ι on Δ(t) and ι_□ coordinatewise on □(t).
pub fn iota_omega(i: &[u32], bounds: &[u32], u: usize) -> Tuple {
    if in_delta(i) {
        iota_delta(i, u)
    } else {
        i.iter().zip(bounds).map(|(&a, &r)| iota_r(r, a)).collect()
    }
}

/// Positions compared by the orderings, most significant first: t, t−1, …,
/// skipping u, then u.
fn significance(t: usize, u: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (1..=t).rev().filter(|&k| k != u).collect();
    if u >= 1 {
        v.push(u);
    }
    v
}

fn rank(ladder: &[u32], a: u32) -> usize {
    ladder.iter().position(|&x| x == a).unwrap()
}

fn square_key(i: &[u32], bounds: &[u32], u: usize, prec: bool) -> Vec<usize> {
    significance(i.len(), u)
        .into_iter()
        .map(|k| {
            let r = bounds[k - 1];
            let ladder = if prec { prec_ladder(r) } else { tri_ladder(r) };
            rank(&ladder, i[k - 1])
        })
        .collect()
}

fn delta_tri_key(i: &[u32], u: usize) -> Vec<usize> {
    significance(i.len(), u)
        .into_iter()
        .map(|k| i[k - 1] as usize)
        .collect()
}

/// The two orderings of 𝒟_N⁰ and the bijection between them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorOrdering {
    /// d₁ ≺ d₂ ≺ …; the squarefree block comes first.
    pub prec_list: Vec<u64>,
    /// δ₁ ◁ δ₂ ◁ ….
    pub tri_list: Vec<u64>,
    /// ι(d) for each d, so that ι(dᵢ) = δᵢ.
    pub iota: BTreeMap<u64, u64>,
    /// Number of nontrivial squarefree divisors.
    pub sf_count: usize,
}

pub fn divisor_orderings(l: &OrderedLevel) -> DivisorOrdering {
    let bounds = l.bounds();
    let u = l.u;
    let all = intarith::omega(&bounds);
    let (mut delta, mut square): (Vec<Tuple>, Vec<Tuple>) = all.into_iter().partition(|i| in_delta(i));
    let mut delta_tri = delta.clone();
    delta_tri.sort_by_key(|i| delta_tri_key(i, u));
    delta.sort_by_key(|i| delta_tri_key(&iota_delta(i, u), u));
    let mut square_tri = square.clone();
    square_tri.sort_by_key(|i| square_key(i, &bounds, u, false));
    square.sort_by_key(|i| square_key(i, &bounds, u, true));
    let prec_list: Vec<u64> = delta.iter().chain(&square).map(|i| l.divisor(i)).collect();
    let tri_list: Vec<u64> = delta_tri.iter().chain(&square_tri).map(|i| l.divisor(i)).collect();
    let iota = delta
        .iter()
        .chain(&square)
        .map(|i| (l.divisor(i), l.divisor(&iota_omega(i, &bounds, u))))
        .collect();
    DivisorOrdering { prec_list, tri_list, iota, sf_count: delta.len() }
}

/// Which prime-power vector to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaseKind {
    A,
    B,
    B2,
}

fn unit(p: u64, r: u32, k: u32) -> CuspDivisor {
    CuspDivisor::from_terms(pow(p, r), &[(pow(p, k), 1)]).expect("divisor of the level")
}

fn from_entries(p: u64, r: u32, entries: &[i128]) -> CuspDivisor {
    let terms: Vec<(u64, i128)> = entries
        .iter()
        .enumerate()
        .map(|(k, &c)| (pow(p, k as u32), c))
        .collect();
    CuspDivisor::from_terms(pow(p, r), &terms).expect("divisor of the level")
}

fn a_vector(p: u64, r: u32, f: u32) -> Result<CuspDivisor> {
    let pi = p as i128;
    if f == 0 {
        return Ok(unit(p, r, 0));
    }
    if r == 1 {
        return Ok(from_entries(p, 1, &[pi, 1]));
    }
    if f == r {
        return Ok(&unit(p, r, 0) - &unit(p, r, r));
    }
    let target = pow(p, r);
    if f == 1 {
        return divisors::apply(DivisorOp::Pi1Pull { target }, &a_vector(p, 1, 1)?);
    }
    if f == 2 {
        if r % 2 == 1 {
            return divisors::apply(DivisorOp::BetaPull { p }, &a_vector(p, r - 1, 2)?);
        }
        let g = divisors::apply(DivisorOp::Gamma { p }, &a_vector(p, r - 2, 2)?)?;
        return Ok(&g + &a_vector(p, r, r)?.scale(pi.pow(r - 2)));
    }
    let (j, alpha) = if (r - f) % 2 == 0 {
        ((r - f) / 2, true)
    } else {
        ((r + 1 - f) / 2, false)
    };
    let src = a_vector(p, r - j, r - j)?;
    let op = if alpha {
        DivisorOp::Pi1Pull { target }
    } else {
        DivisorOp::Pi2Pull { target }
    };
    divisors::apply(op, &src)
}

fn e_vector(r: u32, k: u32) -> Vec<i128> {
    let m = k.min(r - k);
    let mut v = vec![0i128; r as usize + 1];
    if k % 2 == 1 {
        v[1] = 1 << (m - 1);
    } else {
        v[0] = 3 << (m - 2);
        v[1] = -(1 << (m - 2));
    }
    v[k as usize] = -1;
    v
}

fn b2_entries(r: u32, f: u32) -> Vec<i128> {
    let mut v = vec![0i128; r as usize + 1];
    if f == r {
        v[0] = 1;
        v[r as usize] = -1;
    } else if f == r - 1 && r % 2 == 0 {
        v[0] = 1;
        v[1] = -1;
    } else if f == r - 1 {
        v[0] = -1;
        v[1] = -1;
        v[r as usize] = 2;
    } else if (r - f) % 2 == 0 {
        v = e_vector(r, (r + f - 2) / 2);
    } else {
        v = e_vector(r, (r - f + 3) / 2);
    }
    v
}

/// A_p(r, f), B_p(r, f) or B²(r, f) at level pʳ.
pub fn base_vector(kind: BaseKind, p: u64, r: u32, f: u32) -> Result<CuspDivisor> {
    if !is_prime(p) || r == 0 {
        return Err(Error::Domain(format!("need a prime power, got {p}^{r}")));
    }
    match kind {
        BaseKind::A if f <= r => a_vector(p, r, f),
        BaseKind::B if (2..=r).contains(&f) => a_vector(p, r, f),
        BaseKind::B if f == 1 => {
            let g = (p as i128).pow(r - 1) * (p as i128 + 1);
            Ok(&unit(p, r, 0).scale(g) - &a_vector(p, r, 1)?)
        }
        BaseKind::B2 if p == 2 && r >= 5 && (3..=r).contains(&f) => Ok(from_entries(2, r, &b2_entries(r, f))),
        _ => Err(Error::Domain(format!("{kind:?}({p}, {r}, {f}) is out of range"))),
    }
}

/// The scalar g and primitive vector with Υ(pʳ)·v = g·𝔸 for the base
/// vector v; g > 0.
pub fn base_vector_image(kind: BaseKind, p: u64, r: u32, f: u32) -> Result<(i128, Vec<i128>)> {
    let v = base_vector(kind, p, r, f)?;
    let img = upsilon(v.level()).mul_vec(v.coeffs());
    let g = img.iter().fold(0i128, |a, &x| a.gcd(&x));
    if g == 0 {
        return Err(Error::Internal("base vector has zero image".into()));
    }
    Ok((g, img.iter().map(|x| x / g).collect()))
}

fn a_at(l: &OrderedLevel, i: usize, f: u32) -> CuspDivisor {
    a_vector(l.p(i), l.r(i), f).expect("valid exponent")
}

fn b1_at(l: &OrderedLevel, i: usize) -> CuspDivisor {
    base_vector(BaseKind::B, l.p(i), l.r(i), 1).expect("valid exponent")
}

/// D(pᵢ^{rᵢ}, pⱼ^{rⱼ}) for 1-based positions i < j.
pub fn d_vector(l: &OrderedLevel, i: usize, j: usize) -> Result<CuspDivisor> {
    if !(1 <= i && i < j && j <= l.t()) {
        return Err(Error::Domain(format!("D needs 1 ≤ i < j ≤ t, got ({i}, {j})")));
    }
    let (gi, gj) = (l.gamma(i), l.gamma(j));
    let g = gi.gcd(&gj);
    let left = divisors::tensor(&b1_at(l, i), &a_at(l, j, 0))?.scale((gj / g) as i128);
    let right = divisors::tensor(&a_at(l, i, 0), &b1_at(l, j))?.scale((gi / g) as i128);
    Ok(&left - &right)
}

/// Tensor over all positions: `special` supplies the factor for the listed
/// positions, every other position gets A(rᵢ, fᵢ).
fn assemble(l: &OrderedLevel, i: &[u32], special: Vec<(Vec<usize>, CuspDivisor)>) -> Result<CuspDivisor> {
    let mut parts = Vec::new();
    for k in 1..=l.t() {
        if special.iter().any(|(pos, _)| pos.contains(&k)) {
            continue;
        }
        parts.push(a_at(l, k, i[k - 1]));
    }
    parts.extend(special.into_iter().map(|(_, v)| v));
    divisors::tensor_all(&parts)
}

fn require_divisor(l: &OrderedLevel, d: u64) -> Result<Tuple> {
    if d <= 1 || l.n() % d != 0 {
        return Err(Error::Domain(format!("{d} is not a nontrivial divisor of {}", l.n())));
    }
    Ok(l.tuple(d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ZVariant {
    Z1,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum YVariant {
    Y0,
    Y1,
    Y2,
}

pub fn construct_z(l: &OrderedLevel, d: u64, variant: ZVariant) -> Result<CuspDivisor> {
    let i = require_divisor(l, d)?;
    let bounds = l.bounds();
    if in_delta(&i) {
        let m = m_of(&i);
        return assemble(l, &i, vec![(vec![m], b1_at(l, m))]);
    }
    if variant == ZVariant::Z && in_t_u(&i, &bounds, l.u) {
        let ones = tuple_a(l.t(), 1);
        let b2 = base_vector(BaseKind::B2, 2, l.r(l.u), i[l.u - 1])?;
        return assemble(l, &ones, vec![(vec![l.u], b2)]);
    }
    assemble(l, &i, Vec::new())
}

pub fn construct_y(l: &OrderedLevel, d: u64, variant: YVariant) -> Result<CuspDivisor> {
    let i = require_divisor(l, d)?;
    if !in_delta(&i) {
        return Err(Error::Domain(format!("{d} is not squarefree")));
    }
    let t = l.t();
    if t == 1 {
        return construct_z(l, d, ZVariant::Z);
    }
    let (u, s) = (l.u, l.s);
    let (m, n, k) = (m_of(&i), n_of(&i), k_of(&i));
    let x = m.max(u);
    let e = in_e(&i);
    let h = in_h_u(&i, u);
    let y0_other = || assemble(l, &i, vec![(vec![m, n], d_vector(l, m, n)?)]);
    match variant {
        YVariant::Y0 if e => construct_z(l, d, ZVariant::Z),
        YVariant::Y0 => y0_other(),
        _ if e => assemble(l, &i, vec![(vec![x], b1_at(l, x))]),
        YVariant::Y2 if in_f(&i, s) => {
            let y = 1.max(3usize.saturating_sub(s));
            assemble(
                l,
                &i,
                vec![(vec![y, n], d_vector(l, y, n)?), (vec![s], b1_at(l, s))],
            )
        }
        YVariant::Y2 if in_g(&i, s) => assemble(
            l,
            &i,
            vec![(vec![1], b1_at(l, 1)), (vec![2], a_at(l, 2, 0))],
        ),
        _ if h => assemble(l, &i, vec![(vec![m, k], d_vector(l, m, k)?)]),
        _ => y0_other(),
    }
}

/// 𝒢_p(r, f).
pub fn g_local(p: u64, r: u32, f: u32) -> u128 {
    let p = p as u128;
    match f {
        0 => p.pow(r - 1) * (p * p - 1),
        1 => 1,
        2 => p * p - 1,
        _ => {
            let j = (r + 1 - f) / 2;
            p.pow(r - 1 - j) * (p * p - 1)
        }
    }
}

/// 𝒢(pᵢ^{rᵢ}, pⱼ^{rⱼ}) for 1-based positions.
pub fn g_pair(l: &OrderedLevel, i: usize, j: usize) -> u128 {
    let (a, b) = (l.p(i) as u128 - 1, l.p(j) as u128 - 1);
    a * b * l.gamma(i).gcd(&l.gamma(j)) / a.gcd(&b)
}

fn g_product(l: &OrderedLevel, i: &[u32], skip: &[usize]) -> u128 {
    (1..=l.t())
        .filter(|k| !skip.contains(k))
        .map(|k| g_local(l.p(k), l.r(k), i[k - 1]))
        .product()
}

fn numerator_24(x: u128) -> u128 {
    x / x.gcd(&24)
}

/// 𝒢(N, d) and ℋ(N, d).
pub fn script_g_h(l: &OrderedLevel, d: u64) -> Result<(u128, u8)> {
    let i = require_divisor(l, d)?;
    let t = l.t();
    let u = l.u;
    let g = if in_delta(&i) {
        let m = m_of(&i);
        g_product(l, &i, &[m]) * (l.p(m) as u128 - 1)
    } else {
        g_product(l, &i, &[])
    };
    let others_one = |i: &[u32]| (1..=t).all(|k| k == u || i[k - 1] == 1);
    let two = i == tuple_a(t, 1)
        || (u >= 1 && i == intarith::tuple_e(t, u))
        || (u >= 1 && (3..=4).contains(&l.r(u)) && i[u - 1] == 3 && others_one(&i))
        || (u >= 1 && l.r(u) >= 5 && i[u - 1] == l.r(u) + 1 - if l.r(u) % 2 == 0 { 2 } else { 1 } && others_one(&i));
    Ok((g, if two { 2 } else { 1 }))
}

/// 𝒮𝒢(N, d) and 𝒮ℋ(N, d) for squarefree d.
pub fn script_gg_hh(l: &OrderedLevel, d: u64) -> Result<(u128, u8)> {
    let i = require_divisor(l, d)?;
    if !in_delta(&i) {
        return Err(Error::Domain(format!("{d} is not squarefree")));
    }
    let (u, s) = (l.u, l.s);
    let (m, n, k) = (m_of(&i), n_of(&i), k_of(&i));
    let x = m.max(u);
    let y = 1.max(3usize.saturating_sub(s));
    let special = in_f(&i, s) || in_g(&i, s);
    let g = if in_e(&i) {
        g_product(l, &i, &[x]) * (l.p(x) as u128 - 1)
    } else if in_f(&i, s) {
        g_pair(l, y, n)
    } else if in_g(&i, s) {
        g_local(l.p(2), l.r(2), 0)
    } else if in_h_u(&i, u) {
        g_product(l, &i, &[m, k]) * g_pair(l, m, k)
    } else {
        g_product(l, &i, &[m, n]) * g_pair(l, m, n)
    };
    let two = (in_f1(&i, u) || in_g1(&i, u) || i == tuple_a(l.t(), 1)) && !special;
    Ok((g, if two { 2 } else { 1 }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrderKind {
    Z,
    Y2,
}

/// 𝔫(N, d) or 𝔑(N, d).
pub fn predicted_order(l: &OrderedLevel, d: u64, kind: OrderKind) -> Result<u128> {
    let (g, h) = match kind {
        OrderKind::Z => script_g_h(l, d)?,
        OrderKind::Y2 if l.t() == 1 => script_g_h(l, d)?,
        OrderKind::Y2 => script_gg_hh(l, d)?,
    };
    Ok(numerator_24(g * h as u128))
}

/// Output label of a generator.
pub fn label(l: &OrderedLevel, d: u64, kind: OrderKind) -> String {
    let t = l.t();
    if t == 1 {
        let (p, r) = (l.p(1), l.r(1));
        let f = val(p, d);
        let i = l.tuple(d);
        if p == 2 && in_t_u(&i, &l.bounds(), l.u) {
            return format!("B2({r},{f})");
        }
        return format!("B({p},{r},{f})");
    }
    match kind {
        OrderKind::Z => format!("Z({d})"),
        OrderKind::Y2 => format!("Y2({d})"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice;
    use crate::orderengine::profile;

    fn lvl(n: u64, ell: u64) -> OrderedLevel {
        order_primes(n, ell).unwrap()
    }

    #[test]
    fn prime_order_examples() {
        assert_eq!(lvl(15, 2).primes(), vec![3, 5]);
        assert_eq!(lvl(3u64.pow(4), 5).primes(), vec![3]);
        let l = lvl(4 * 3 * 5 * 7, 2);
        assert_eq!(l.s, l.u);
        assert_eq!(l.p(l.u), 2);
        assert_eq!(lvl(4 * 3 * 5 * 7, 3).s, 0);
    }

    #[test]
    fn prime_orders_meet_assumption() {
        for n in 2..2000u64 {
            for &ell in &[2u64, 3, 5, 7, 11, 13] {
                assert!(lvl(n, ell).satisfies_assumption(), "N={n} ℓ={ell}");
            }
        }
    }

    #[test]
    fn ladders() {
        assert_eq!(prec_ladder(5), vec![1, 0, 2, 5, 4, 3]);
        assert_eq!(tri_ladder(5), vec![0, 1, 5, 4, 2, 3]);
        assert_eq!(tri_ladder(4), vec![0, 1, 4, 3, 2]);
        assert_eq!(tri_ladder(6), vec![0, 1, 6, 5, 2, 4, 3]);
        assert_eq!(tri_ladder(7), vec![0, 1, 7, 6, 2, 5, 3, 4]);
        for r in 5..12u32 {
            let k = (r + 1) / 2;
            let sgn: i64 = if r % 2 == 0 { 1 } else { -1 };
            let tail = &tri_ladder(r)[r as usize - 2..];
            assert_eq!(tail, &[(k as i64 - sgn) as u32, (k as i64 + sgn) as u32, k]);
            assert_eq!(iota_r(r, 3), k);
            assert_eq!(iota_r(r, 2), r);
            assert_eq!(iota_r(r, 1), 0);
        }
    }

    #[test]
    fn iota_is_bijective_and_order_preserving() {
        for n in 2..400u64 {
            for &ell in &[2u64, 3] {
                let l = lvl(n, ell);
                let o = divisor_orderings(&l);
                let mapped: Vec<u64> = o.prec_list.iter().map(|d| o.iota[d]).collect();
                assert_eq!(mapped, o.tri_list, "N={n}");
                assert_eq!(o.sf_count, (1 << l.t()) - 1);
                assert!(o.prec_list[..o.sf_count].iter().all(|&d| l.tuple(d).iter().all(|&f| f <= 1)));
            }
        }
    }

    #[test]
    fn ordering_anchors() {
        for n in [15u64, 35, 105, 12, 60, 90, 1155, 2 * 3 * 5 * 7 * 11] {
            let l = lvl(n, 3);
            let t = l.t();
            let o = divisor_orderings(&l);
            let u = l.u;
            let p = |k: usize| l.divisor(&intarith::tuple_f(t, k));
            assert_eq!(o.prec_list[0], l.base.rad());
            if u <= 1 {
                assert_eq!(o.tri_list[0], p(1));
                assert_eq!(o.tri_list[1], p(2));
                assert_eq!(o.prec_list[1], l.divisor(&intarith::tuple_e(t, 2)));
            } else {
                assert_eq!(o.tri_list[0], p(u));
                assert_eq!(o.tri_list[1], p(1));
                assert_eq!(o.prec_list[1], l.divisor(&intarith::tuple_e(t, u)));
            }
            assert_eq!(o.prec_list[2], l.divisor(&intarith::tuple_e(t, 1)));
        }
        let l = lvl(15, 2);
        let o = divisor_orderings(&l);
        assert_eq!(o.tri_list, vec![3, 5, 15]);
    }

    #[test]
    fn iota_on_e_n() {
        for n in [30u64, 210, 60, 2310, 105, 1155] {
            for &ell in &[2u64, 3] {
                let l = lvl(n, ell);
                let t = l.t();
                let o = divisor_orderings(&l);
                if l.s == 0 {
                    continue;
                }
                for nn in intarith::script_i(t, l.s) {
                    let e = intarith::tuple_e(t, nn);
                    assert_eq!(iota_delta(&e, l.u), intarith::tuple_f(t, nn));
                    let es = intarith::tuple_e_u(t, l.s, nn);
                    assert_eq!(iota_delta(&es, l.u), intarith::tuple_f_u(t, l.s, nn));
                    let eps = if l.s < nn { 1 } else { 0 };
                    let pos = 1usize << (nn - eps);
                    assert_eq!(o.prec_list[pos - 1], l.divisor(&e), "N={n} n={nn}");
                    assert_eq!(o.prec_list[pos], l.divisor(&es));
                }
            }
        }
    }

    fn entries(v: &CuspDivisor) -> Vec<i128> {
        v.coeffs().to_vec()
    }

    #[test]
    fn base_vector_examples() {
        for p in [2u64, 3, 5, 7] {
            let pi = p as i128;
            assert_eq!(entries(&base_vector(BaseKind::B, p, 2, 1).unwrap()), vec![pi, -1, -1]);
            for r in 1..8u32 {
                let a1 = base_vector(BaseKind::A, p, r, 1).unwrap();
                let want: Vec<i128> = (0..=r)
                    .map(|k| pi.pow(r.saturating_sub(2 * k)))
                    .collect();
                assert_eq!(entries(&a1), want);
            }
        }
        assert_eq!(entries(&base_vector(BaseKind::B2, 2, 6, 5).unwrap()), vec![1, -1, 0, 0, 0, 0, 0]);
        assert!(base_vector(BaseKind::B2, 2, 4, 3).is_err());
        assert!(base_vector(BaseKind::B, 3, 2, 0).is_err());
    }

    fn k_sum(p: i128, j: i64) -> i128 {
        (0..=j).map(|i| p.pow(2 * i as u32)).sum()
    }

    /// Entry tables for A_p(r, f), written out independently of the
    /// recursive definition.
    fn a_closed(p: i128, r: u32, f: u32) -> Vec<i128> {
        let ri = r as i64;
        (0..=ri)
            .map(|k| {
                if f == 0 {
                    return i128::from(k == 0);
                }
                if f == 1 {
                    return p.pow((ri - 2 * k).max(0) as u32);
                }
                if f == r {
                    return if k == 0 { 1 } else if k == ri { -1 } else { 0 };
                }
                if f == 2 && r % 2 == 1 {
                    let h = (ri - 1) / 2;
                    return if k == 0 {
                        k_sum(p, (ri - 3) / 2)
                    } else if k <= h {
                        k_sum(p, h - k)
                    } else if k == h + 1 {
                        0
                    } else {
                        -p * k_sum(p, k - (ri + 3) / 2)
                    };
                }
                if f == 2 {
                    let h = ri / 2;
                    return if k < h {
                        k_sum(p, (ri - 2) / 2 - k)
                    } else if k == h {
                        0
                    } else {
                        -k_sum(p, k - (ri + 2) / 2)
                    };
                }
                if (r - f) % 2 == 0 {
                    let a = ((r - f) / 2) as i64;
                    if k == 0 {
                        p.pow(a as u32)
                    } else if k >= ri - a {
                        -1
                    } else {
                        0
                    }
                } else {
                    let a = ((r + 1 - f) / 2) as i64;
                    if k <= a {
                        1
                    } else if k == ri {
                        -p.pow(a as u32)
                    } else {
                        0
                    }
                }
            })
            .collect()
    }

    #[test]
    fn a_vectors_match_entry_tables() {
        for p in [2u64, 3, 5, 7, 11] {
            for r in 1..10u32 {
                for f in 0..=r {
                    let v = base_vector(BaseKind::A, p, r, f).unwrap();
                    assert_eq!(entries(&v), a_closed(p as i128, r, f), "p={p} r={r} f={f}");
                }
            }
        }
    }

    fn degree_zero_lattice(n: u64) -> lattice::Matrix {
        let rows: Vec<Vec<i128>> = intarith::level(n)
            .divisors
            .iter()
            .skip(1)
            .map(|&d| divisors::c_generator(n, d).unwrap().coeffs().to_vec())
            .collect();
        lattice::from_i128(&rows)
    }

    fn same_lattice(a: &lattice::Matrix, b: &lattice::Matrix) -> bool {
        lattice::contains(a, b) && lattice::contains(b, a)
    }

    #[test]
    fn prime_power_generation() {
        for (p, rmax) in [(2u64, 12u32), (3, 7), (5, 5), (7, 4)] {
            for r in 1..=rmax {
                let a: Vec<Vec<i128>> = (0..=r)
                    .map(|f| entries(&base_vector(BaseKind::A, p, r, f).unwrap()))
                    .collect();
                let id: Vec<Vec<i128>> = (0..=r as usize)
                    .map(|i| (0..=r as usize).map(|j| i128::from(i == j)).collect())
                    .collect();
                assert!(same_lattice(&lattice::from_i128(&a), &lattice::from_i128(&id)), "A p={p} r={r}");
                let b: Vec<Vec<i128>> = (1..=r)
                    .map(|f| entries(&base_vector(BaseKind::B, p, r, f).unwrap()))
                    .collect();
                assert!(same_lattice(&lattice::from_i128(&b), &degree_zero_lattice(pow(p, r))), "B p={p} r={r}");
            }
        }
    }

    #[test]
    fn b2_rearranges_e_and_has_degree_zero() {
        for r in 5..14u32 {
            let mut b2: Vec<Vec<i128>> = (3..=r).map(|f| b2_entries(r, f)).collect();
            for v in &b2 {
                assert_eq!(from_entries(2, r, v).degree(), 0);
            }
            let mut e: Vec<Vec<i128>> = (3..=r - 2).map(|k| e_vector(r, k)).collect();
            e.push(b2_entries(r, r - 1));
            e.push(b2_entries(r, r));
            b2.sort();
            e.sort();
            assert_eq!(b2, e);
        }
    }

    #[test]
    fn images_of_base_vectors() {
        for p in [2u64, 3, 5, 7] {
            for r in 1..8u32 {
                let kappa = (p as u128).pow(r - 1) * ((p * p - 1) as u128);
                for f in 0..=r {
                    if f == 1 {
                        continue;
                    }
                    let (g, _) = base_vector_image(BaseKind::A, p, r, f).unwrap();
                    assert_eq!(g as u128 * g_local(p, r, f), kappa, "p={p} r={r} f={f}");
                }
                let (g, b) = base_vector_image(BaseKind::B, p, r, 1).unwrap();
                assert_eq!(g, (p as i128).pow(r - 1) * (p as i128 + 1));
                let mut want = vec![0i128; r as usize + 1];
                want[0] = 1;
                want[1] = -1;
                let neg: Vec<i128> = want.iter().map(|x| -x).collect();
                assert!(b == want || b == neg, "p={p} r={r}: {b:?}");
                let (g0, a0) = base_vector_image(BaseKind::A, p, r, 0).unwrap();
                assert_eq!(g0, 1);
                assert_eq!(a0[0].abs(), p as i128);
                assert_eq!(a0[1].abs(), 1);
            }
        }
    }

    #[test]
    fn unipotent_anchors_of_images() {
        for p in [3u64, 5, 7] {
            for r in 1..9u32 {
                for f in 0..=r {
                    let (_, img) = base_vector_image(BaseKind::A, p, r, f).unwrap();
                    let tri = tri_ladder(r);
                    let pos = rank(&tri, iota_r(r, f));
                    assert_eq!(img[iota_r(r, f) as usize].abs(), 1, "p={p} r={r} f={f}");
                    for &later in &tri[pos + 1..] {
                        assert_eq!(img[later as usize], 0, "p={p} r={r} f={f}");
                    }
                }
            }
        }
    }

    #[test]
    fn d_vector_example() {
        let l = lvl(15, 2);
        let d = d_vector(&l, 1, 2).unwrap();
        assert_eq!(entries(&d), vec![1, -3, 2, 0]);
        assert_eq!(d.degree(), 0);
        assert!(d_vector(&l, 2, 1).is_err());
    }

    #[test]
    fn y_examples() {
        let l = lvl(15, 2);
        assert_eq!(construct_y(&l, 3, YVariant::Y2).unwrap(), d_vector(&l, 1, 2).unwrap());
        let want = divisors::tensor(&a_at(&l, 1, 0), &b1_at(&l, 2)).unwrap();
        assert_eq!(construct_y(&l, 5, YVariant::Y2).unwrap(), want);
        assert!(construct_y(&l, 9, YVariant::Y2).is_err());
    }

    #[test]
    fn z_uses_b2_on_t_u() {
        let l = lvl(64 * 3, 2);
        let z = construct_z(&l, 32 * 3, ZVariant::Z).unwrap();
        let want = divisors::tensor(
            &base_vector(BaseKind::B2, 2, 6, 5).unwrap(),
            &a_vector(3, 1, 1).unwrap(),
        )
        .unwrap();
        assert_eq!(z, want);
        let z1 = construct_z(&l, 32 * 3, ZVariant::Z1).unwrap();
        assert_ne!(z1, z);
        assert_eq!(profile(&z1).gcd_value, profile(&z).gcd_value);
    }

    #[test]
    fn generators_have_degree_zero() {
        for n in 2..200u64 {
            for &ell in &[2u64, 3] {
                let l = lvl(n, ell);
                for &d in intarith::level(n).divisors.iter().skip(1) {
                    assert_eq!(construct_z(&l, d, ZVariant::Z).unwrap().degree(), 0);
                    assert_eq!(construct_z(&l, d, ZVariant::Z1).unwrap().degree(), 0);
                    if l.tuple(d).iter().all(|&f| f <= 1) {
                        for v in [YVariant::Y0, YVariant::Y1, YVariant::Y2] {
                            assert_eq!(construct_y(&l, d, v).unwrap().degree(), 0, "N={n} d={d} {v:?}");
                        }
                    }
                }
            }
        }
    }

    fn ells(n: u64) -> Vec<u64> {
        let k = factor(n).kappa() * 2;
        factor(k as u64).primes()
    }

    #[test]
    fn predicted_orders_match_profiles() {
        for n in 2..=300u64 {
            for ell in ells(n) {
                let l = lvl(n, ell);
                for &d in intarith::level(n).divisors.iter().skip(1) {
                    let z = construct_z(&l, d, ZVariant::Z).unwrap();
                    let pz = profile(&z);
                    let (_, h) = script_g_h(&l, d).unwrap();
                    assert_eq!(pz.h, h, "h(Z) N={n} ℓ={ell} d={d}");
                    assert_eq!(pz.order, Some(predicted_order(&l, d, OrderKind::Z).unwrap()), "Z N={n} ℓ={ell} d={d}");
                    if l.tuple(d).iter().all(|&f| f <= 1) {
                        let y = construct_y(&l, d, YVariant::Y2).unwrap();
                        let py = profile(&y);
                        if l.t() >= 2 {
                            assert_eq!(py.h, script_gg_hh(&l, d).unwrap().1, "h(Y2) N={n} ℓ={ell} d={d}");
                        }
                        assert_eq!(
                            py.order,
                            Some(predicted_order(&l, d, OrderKind::Y2).unwrap()),
                            "Y2 N={n} ℓ={ell} d={d} h={}",
                            py.h
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn order_examples() {
        let l = lvl(49, 2);
        assert_eq!(predicted_order(&l, 7, OrderKind::Z).unwrap(), 1);
        assert_eq!(predicted_order(&l, 49, OrderKind::Z).unwrap(), 2);
        for p in [5u64, 7, 11, 13] {
            for r in 3..7u32 {
                let l = lvl(pow(p, r), 2);
                for f in 3..=r {
                    let j = (r + 1 - f) / 2;
                    let want = (p as u128).pow(r - 1 - j) * (p as u128 * p as u128 - 1) / 24;
                    assert_eq!(predicted_order(&l, pow(p, f), OrderKind::Z).unwrap(), want);
                }
            }
        }
        for r in 5..12u32 {
            let l = lvl(1 << r, 2);
            let f = r + 1 - if r % 2 == 0 { 2 } else { 1 };
            let j = (r + 1 - f) / 2;
            assert_eq!(predicted_order(&l, 1 << f, OrderKind::Z).unwrap(), 1 << (r - 3 - j));
        }
    }

    #[test]
    fn z1_generates_degree_zero_lattice() {
        for n in 2..=200u64 {
            let l = lvl(n, 2);
            let rows: Vec<Vec<i128>> = intarith::level(n)
                .divisors
                .iter()
                .skip(1)
                .map(|&d| construct_z(&l, d, ZVariant::Z1).unwrap().coeffs().to_vec())
                .collect();
            assert!(same_lattice(&lattice::from_i128(&rows), &degree_zero_lattice(n)), "N={n}");
        }
    }
}
