//! Cusps of X₀(N) as symbols ⟨x : d⟩ standing for the fraction x/d.
//!
//! Two symbols of the same level d agree exactly when their residues agree
//! modulo z = gcd(d, N/d).  The stored residue is the least x ≥ 1 in its
//! class that is coprime to d.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intarith::{self, gcd, inv_mod, level, pow, val};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cusp {
    /// Level N of the curve the cusp lives on.
    pub n: u64,
    /// Level d | N of the cusp.
    pub d: u64,
    /// Canonical residue.
    pub x: u64,
}

impl Cusp {
    pub fn z(&self) -> u64 {
        gcd(self.d, self.n / self.d)
    }

    pub fn width(&self) -> u64 {
        width(self)
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}@{}", self.x, self.d, self.n)
    }
}

/// Least x₀ ≥ 1 with x₀ ≡ x (mod z) and gcd(x₀, d) = 1.
fn canonical_residue(x: i128, d: u64, z: u64) -> Result<u64> {
    let z = z as i128;
    let start = x.mod_floor(&z);
    let start = if start == 0 { z } else { start };
    if gcd(start as u64, z as u64) != 1 {
        return Err(Error::Domain(format!("residue {x} is not a unit modulo {z}")));
    }
    let mut x0 = start as u64;
    while gcd(x0, d) != 1 {
        x0 += z as u64;
    }
    Ok(x0)
}

/// The cusp ⟨x : d⟩ of X₀(N) for d | N and gcd(x, d) = 1.
pub fn symbol(x: i128, d: u64, n: u64) -> Result<Cusp> {
    if d == 0 || n % d != 0 {
        return Err(Error::Domain(format!("{d} does not divide {n}")));
    }
    if gcd((x.unsigned_abs() % d as u128) as u64, d) != 1 && d > 1 {
        return Err(Error::Domain(format!("gcd({x}, {d}) != 1")));
    }
    let z = gcd(d, n / d);
    Ok(Cusp {
        n,
        d,
        x: canonical_residue(x, d, z)?,
    })
}

/// Canonical cusp of the column vector (a, b), i.e. of the fraction a/b.
///
/// With d = gcd(b, N), the class is determined by d and a·(b/d) mod z,
/// since an element of Γ₀(N) scales a by its upper-left entry and b/d by the
/// inverse of that entry modulo z.
pub fn normalize(a: i128, b: i128, n: u64) -> Result<Cusp> {
    if a == 0 && b == 0 {
        return Err(Error::Domain("(0, 0) is not a cusp".into()));
    }
    if a.gcd(&b) != 1 {
        return Err(Error::Domain(format!("gcd({a}, {b}) != 1")));
    }
    let (a, b) = if b < 0 { (-a, -b) } else { (a, b) };
    if b == 0 {
        return Ok(Cusp { n, d: n, x: 1 });
    }
    let d = gcd((b % n as i128) as u64, n);
    let d = if d == 0 { n } else { d };
    let z = gcd(d, n / d);
    let b1 = b / d as i128;
    let residue = (a.mod_floor(&(z as i128)) * b1.mod_floor(&(z as i128))) % z as i128;
    Ok(Cusp {
        n,
        d,
        x: canonical_residue(residue, d, z)?,
    })
}

/// All cusps of X₀(N), grouped by ascending level.
pub fn enumerate(n: u64) -> Vec<Cusp> {
    let lv = level(n);
    let mut out = Vec::new();
    for &d in &lv.divisors {
        let z = gcd(d, n / d);
        for r in 1..=z {
            if gcd(r, z) == 1 {
                out.push(Cusp {
                    n,
                    d,
                    x: canonical_residue(r as i128, d, z).expect("unit residue"),
                });
            }
        }
    }
    out
}

pub fn width(c: &Cusp) -> u64 {
    c.n / (c.d * c.z())
}

/// Pointwise operators on cusps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CuspOp {
    /// α_p(N): X₀(Np) → X₀(N), τ ↦ τ.  Acts on cusps of level Np.
    AlphaPush { p: u64 },
    /// β_p(N): X₀(Np) → X₀(N), τ ↦ pτ.  Acts on cusps of level Np.
    BetaPush { p: u64 },
    /// The Atkin–Lehner involution w_p for p | N.
    AtkinLehner { p: u64 },
    /// τ_k ∈ Gal(ℚ(μ_N)/ℚ), ζ ↦ ζᵏ, for gcd(k, N) = 1.
    Galois { k: u64 },
}

fn check_prime_divides(p: u64, n: u64) -> Result<()> {
    if !intarith::is_prime(p) || n % p != 0 {
        return Err(Error::Domain(format!("{p} is not a prime divisor of {n}")));
    }
    Ok(())
}

/// CRT glue: the cusp of level d'·p^e at level N whose M-part residue is x1
/// (taken modulo d') and whose p-part residue is x2 (taken modulo p^e).
fn glue(x1: i128, d1: u64, x2: i128, p: u64, e: u32, n: u64) -> Result<Cusp> {
    let pe = pow(p, e) as i128;
    let d1i = d1 as i128;
    let x = if e == 0 {
        x1
    } else {
        // X = x1 + d1·k with X ≡ x2 mod p^e
        let inv = inv_mod(d1i, pe).expect("d' is prime to p");
        let k = ((x2 - x1).mod_floor(&pe) * inv).mod_floor(&pe);
        x1 + d1i * k
    };
    symbol(x, d1 * pe as u64, n)
}

/// A residue in the class of c that is prime to N.
fn unit_lift(c: &Cusp) -> u64 {
    let z = c.z();
    let mut x = c.x;
    while gcd(x, c.n) != 1 {
        x += z;
    }
    x
}

/// Image of a cusp under `op`, using the explicit tensor formulas.
pub fn act(op: CuspOp, c: &Cusp) -> Result<Cusp> {
    match op {
        CuspOp::AlphaPush { p } | CuspOp::BetaPush { p } => {
            check_prime_divides(p, c.n)?;
            let target = c.n / p;
            let r = val(p, target);
            let f = val(p, c.d);
            let d1 = c.d / pow(p, f);
            let x = c.x as i128;
            let alpha = matches!(op, CuspOp::AlphaPush { .. });
            match (alpha, f) {
                (true, f) if f <= r => symbol(x, c.d, target),
                (true, _) => glue(p as i128 * x, d1, 1, p, r, target),
                (false, 0) => symbol(p as i128 * x, d1, target),
                (false, f) => symbol(x, d1 * pow(p, f - 1), target),
            }
        }
        CuspOp::AtkinLehner { p } => {
            check_prime_divides(p, c.n)?;
            let r = val(p, c.n);
            let f = val(p, c.d);
            let d1 = c.d / pow(p, f);
            let x = unit_lift(c) as i128;
            glue(x, d1, -x, p, r - f, c.n)
        }
        CuspOp::Galois { k } => {
            if gcd(k, c.n) != 1 {
                return Err(Error::Domain(format!("gcd({k}, {}) != 1", c.n)));
            }
            let ks = inv_mod(k as i128, c.n as i128).expect("unit");
            symbol(ks * c.x as i128, c.d, c.n)
        }
    }
}

/// Image of a cusp under `op` computed from matrices acting on the fraction
/// x/d and renormalized; an independent path used to validate `act`.
pub fn act_by_matrix(op: CuspOp, c: &Cusp) -> Result<Cusp> {
    let x = c.x as i128;
    let d = c.d as i128;
    let reduce = |a: i128, b: i128, n: u64| {
        let g = a.gcd(&b);
        normalize(a / g, b / g, n)
    };
    match op {
        CuspOp::AlphaPush { p } => {
            check_prime_divides(p, c.n)?;
            reduce(x, d, c.n / p)
        }
        CuspOp::BetaPush { p } => {
            check_prime_divides(p, c.n)?;
            reduce(p as i128 * x, d, c.n / p)
        }
        CuspOp::AtkinLehner { p } => {
            check_prime_divides(p, c.n)?;
            let (m, r) = intarith::factor(c.n).split_prime(p);
            let q = pow(p, r) as i128;
            let mi = m as i128;
            // W = [[q, b], [M q, q e]] with q e − M b = 1
            let e = inv_mod(q, mi).unwrap_or(1);
            let e = if m == 1 { 1 } else { e };
            let b = (q * e - 1) / mi;
            reduce(q * x + b * d, mi * q * x + q * e * d, c.n)
        }
        CuspOp::Galois { k } => {
            if gcd(k, c.n) != 1 {
                return Err(Error::Domain(format!("gcd({k}, {}) != 1", c.n)));
            }
            // ⟨x : k* d⟩ with k k* ≡ 1 mod N and gcd(k*, x) = 1
            let n = c.n as i128;
            let mut ks = inv_mod(k as i128, n).expect("unit");
            if ks == 0 {
                ks = n;
            }
            while ks.gcd(&x) != 1 {
                ks += n;
            }
            reduce(x, ks * d, c.n)
        }
    }
}

/// Which degeneracy map a ramification query refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Degeneracy {
    Alpha,
    Beta,
}

/// Ramification index of α_p or β_p : X₀(Np) → X₀(N) at a cusp of X₀(Np).
pub fn ramification_index(map: Degeneracy, p: u64, c: &Cusp) -> Result<u64> {
    check_prime_divides(p, c.n)?;
    let r = val(p, c.n) - 1;
    let f = val(p, c.d);
    let ramified = match map {
        Degeneracy::Alpha => 2 * f <= r,
        Degeneracy::Beta => 2 * f >= r + 2,
    };
    Ok(if ramified { p } else { 1 })
}

/// Degree of α_p, β_p : X₀(Np) → X₀(N).
pub fn degeneracy_degree(n: u64, p: u64) -> u64 {
    if n % p == 0 {
        p
    } else {
        p + 1
    }
}

/// Pullback of a single cusp of X₀(N) along α_p or β_p, as a list of cusps of
/// X₀(Np) with ramification multiplicities; computed by scanning all cusps.
pub fn pullback(map: Degeneracy, p: u64, c: &Cusp) -> Result<Vec<(Cusp, u64)>> {
    let up = c.n * p;
    let op = match map {
        Degeneracy::Alpha => CuspOp::AlphaPush { p },
        Degeneracy::Beta => CuspOp::BetaPush { p },
    };
    let mut out = Vec::new();
    for c2 in enumerate(up) {
        if act(op, &c2)? == *c {
            out.push((c2, ramification_index(map, p, &c2)?));
        }
    }
    Ok(out)
}

/// T_p = β_* ∘ α^* applied to one cusp, as a multiset of cusps of X₀(N).
pub fn hecke(p: u64, c: &Cusp) -> Result<Vec<(Cusp, u64)>> {
    let mut out: Vec<(Cusp, u64)> = Vec::new();
    for (c2, e) in pullback(Degeneracy::Alpha, p, c)? {
        let img = act(CuspOp::BetaPush { p }, &c2)?;
        match out.iter_mut().find(|(k, _)| *k == img) {
            Some(slot) => slot.1 += e,
            None => out.push((img, e)),
        }
    }
    out.sort();
    Ok(out)
}

/// The Fricke involution: the product of w_p over all p | N.
pub fn fricke(c: &Cusp) -> Result<Cusp> {
    let mut cur = *c;
    for p in intarith::factor(c.n).primes() {
        cur = act(CuspOp::AtkinLehner { p }, &cur)?;
    }
    Ok(cur)
}
