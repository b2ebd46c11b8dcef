//! Integer lattices: Hermite and Smith normal forms over big integers,
//! kernels, and quotient invariants.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Matrix = Vec<Vec<BigInt>>;

pub fn from_i128(rows: &[Vec<i128>]) -> Matrix {
    rows.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

fn combine(a: &mut [BigInt], b: &mut [BigInt], x: &BigInt, y: &BigInt, u: &BigInt, v: &BigInt) {
    // (a, b) ← (x·a + y·b, u·a + v·b); the 2×2 matrix has determinant ±1
    for k in 0..a.len() {
        let na = x * &a[k] + y * &b[k];
        let nb = u * &a[k] + v * &b[k];
        a[k] = na;
        b[k] = nb;
    }
}

fn two_rows(m: &mut [Vec<BigInt>], i: usize, j: usize) -> (&mut Vec<BigInt>, &mut Vec<BigInt>) {
    assert!(i < j);
    let (lo, hi) = m.split_at_mut(j);
    (&mut lo[i], &mut hi[0])
}

/// Row Hermite normal form: the nonzero rows, echelon with positive pivots
/// and entries above each pivot reduced into [0, pivot).
pub fn hnf(rows: &Matrix) -> Matrix {
    let mut m: Matrix = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    if m.is_empty() {
        return m;
    }
    let ncols = m[0].len();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        for i in r + 1..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            if m[r][c].is_zero() {
                m.swap(r, i);
                continue;
            }
            let (a, b) = (m[r][c].clone(), m[i][c].clone());
            let e = a.extended_gcd(&b);
            let (x, y) = (e.x, e.y);
            let u = -(&b / &e.gcd);
            let v = &a / &e.gcd;
            let (ra, rb) = two_rows(&mut m, r, i);
            combine(ra, rb, &x, &y, &u, &v);
        }
        if m[r][c].is_zero() {
            continue;
        }
        if m[r][c].is_negative() {
            for x in m[r].iter_mut() {
                *x = -&*x;
            }
        }
        let piv = m[r][c].clone();
        for i in 0..r {
            let q = m[i][c].div_floor(&piv);
            if !q.is_zero() {
                for k in 0..ncols {
                    let t = &q * &m[r][k];
                    m[i][k] -= t;
                }
            }
        }
        r += 1;
    }
    m.truncate(r);
    m.retain(|row| row.iter().any(|x| !x.is_zero()));
    m
}

/// A basis of {x ∈ ℤⁿ : x·A = 0} for A with n rows.
pub fn left_kernel(a: &Matrix) -> Matrix {
    let n = a.len();
    if n == 0 {
        return Vec::new();
    }
    let m = a[0].len();
    let aug: Matrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            r
        })
        .collect();
    let h = hnf(&aug);
    let ker: Matrix = h
        .into_iter()
        .filter(|r| r[..m].iter().all(|x| x.is_zero()))
        .map(|r| r[m..].to_vec())
        .collect();
    hnf(&ker)
}

/// |det| of some nonsingular maximal square block of rows, by fraction-free
/// elimination. None unless the rows have full column rank.
fn full_rank_minor(rows: &Matrix) -> Option<BigInt> {
    let mut m = rows.clone();
    let nr = m.len();
    let nc = m.first()?.len();
    let mut prev = BigInt::one();
    for k in 0..nc {
        let p = (k..nr).find(|&i| !m[i][k].is_zero())?;
        m.swap(k, p);
        for i in k + 1..nr {
            for j in k + 1..nc {
                let x = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = x / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    Some(prev.abs())
}

/// Nonzero Smith invariants d₁ | d₂ | … of the row lattice.
pub fn smith_invariants(rows: &Matrix) -> Vec<BigInt> {
    // With full column rank some D ≠ 0 has D·ℤⁿ ⊆ L, and the whole
    // reduction can be carried out modulo D.
    smith_with(rows, full_rank_minor(rows))
}

fn smith_with(rows: &Matrix, modulus: Option<BigInt>) -> Vec<BigInt> {
    let mut m = match &modulus {
        Some(_) => rows.clone(),
        None => hnf(rows),
    };
    let nr = m.len();
    if nr == 0 {
        return Vec::new();
    }
    let nc = m[0].len();
    let reduce = |x: &mut BigInt| {
        if let Some(d) = &modulus {
            *x = x.mod_floor(d);
        }
    };
    for row in m.iter_mut() {
        row.iter_mut().for_each(reduce);
    }
    let mut diag = Vec::new();
    for t in 0..nr.min(nc) {
        loop {
            // smallest nonzero entry of the trailing block as pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..nr {
                for j in t..nc {
                    if !m[i][j].is_zero()
                        && best.map_or(true, |(bi, bj)| m[i][j].abs() < m[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                if let Some(d) = &modulus {
                    // everything left is ≡ 0, i.e. invariants equal to D
                    diag.extend((t..nr.min(nc)).map(|_| d.clone()));
                }
                return finish(diag, modulus.as_ref());
            };
            m.swap(t, pi);
            for row in m.iter_mut() {
                row.swap(t, pj);
            }
            let piv = m[t][t].clone();
            let mut clean = true;
            for i in t + 1..nr {
                let q = m[i][t].div_floor(&piv);
                if !q.is_zero() {
                    for k in t..nc {
                        let s = &q * &m[t][k];
                        m[i][k] -= s;
                        reduce(&mut m[i][k]);
                    }
                }
                if !m[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..nc {
                let q = m[t][j].div_floor(&piv);
                if !q.is_zero() {
                    for row in m.iter_mut().skip(t) {
                        let s = &q * &row[t];
                        row[j] -= s;
                        reduce(&mut row[j]);
                    }
                }
                if !m[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..nr).find(|&i| (t + 1..nc).any(|j| !(&m[i][j] % &piv).is_zero()));
            match bad {
                Some(i) => {
                    for k in t..nc {
                        let s = m[i][k].clone();
                        m[t][k] += s;
                        reduce(&mut m[t][k]);
                    }
                }
                None => {
                    diag.push(piv.abs());
                    break;
                }
            }
        }
    }
    finish(diag, modulus.as_ref())
}

fn finish(diag: Vec<BigInt>, modulus: Option<&BigInt>) -> Vec<BigInt> {
    let mut diag: Vec<BigInt> = match modulus {
        Some(d) => diag.into_iter().map(|x| x.gcd(d)).collect(),
        None => diag,
    };
    diag.sort();
    diag
}

/// Invariant factors (> 1) of ℤⁿ/L and the free rank of the quotient.
pub fn quotient(rows: &Matrix, n: usize) -> (Vec<BigInt>, usize) {
    let d = smith_invariants(rows);
    let free = n - d.len();
    (d.into_iter().filter(|x| !x.is_one()).collect(), free)
}

/// Index [M : L] for full-rank sublattices L ⊆ M of the same rank, via
/// pivot products of their Hermite forms.  None when ranks differ.
pub fn index(sub: &Matrix, sup: &Matrix) -> Option<BigInt> {
    let a = hnf(sub);
    let b = hnf(sup);
    if a.len() != b.len() {
        return None;
    }
    let piv = |m: &Matrix| -> BigInt {
        m.iter()
            .map(|r| r.iter().find(|x| !x.is_zero()).cloned().unwrap_or_default().abs())
            .product()
    };
    let (pa, pb) = (piv(&a), piv(&b));
    if (&pa % &pb).is_zero() {
        Some(pa / pb)
    } else {
        None
    }
}

/// Whether every row of `sub` lies in the row lattice of `sup`.
pub fn contains(sup: &Matrix, sub: &Matrix) -> bool {
    let h = hnf(sup);
    sub.iter().all(|v| reduce(&h, v).iter().all(|x| x.is_zero()))
}

/// Remainder of v after reduction by a Hermite basis.
pub fn reduce(h: &Matrix, v: &[BigInt]) -> Vec<BigInt> {
    let mut v = v.to_vec();
    for row in h {
        let Some(c) = row.iter().position(|x| !x.is_zero()) else {
            continue;
        };
        let q = v[c].div_floor(&row[c]);
        if !q.is_zero() {
            for k in 0..v.len() {
                let s = &q * &row[k];
                v[k] -= s;
            }
        }
    }
    v
}
