//! Closed-form machinery for sumset sizes over Z_n.
//!
//! For each divisor d of n there is a canonical m-subset A_d(n,m) built from
//! cosets of the order-d subgroup (see `constructions`).  Its unrestricted
//! h-fold sumset has size min{n, f_d, hm-h+1} and its restricted one has a
//! closed form f^_d involving a correction term delta_d; minimizing over all
//! divisors yields the upper bounds
//!
//!   u(n,m,h)  = min_d f_d        >= rho(Z_n,m,h)   (attained for h = 2)
//!   u^(n,m,h) = min_d f^_d       >= rho^(Z_n,m,h)
//!
//! The restricted closed form is evaluated at min(h, m-h): an m-set's h-fold
//! and (m-h)-fold restricted sumsets are reflections of one another (pair
//! each h-subset with its complement), so the two sizes agree for every set,
//! and the published expression is only reliable on the small side of that
//! reflection (for h > m/2 it can overcount the endpoint coset when the h
//! smallest elements exhaust every full coset, e.g. n=12, m=7, h=5, d=4).
//!
//! All arithmetic is signed 64-bit: delta_d may be negative and intermediate
//! products exceed n; results are clamped only by the final min.

use crate::error::{Error, Result};
use crate::groups::gcd;

/// Divisors of n in increasing order.
pub fn divisors(n: u32) -> Vec<u32> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            small.push(d);
            if (d as u64) * (d as u64) != n as u64 {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

fn ceil_div(a: i64, b: i64) -> i64 {
    (a + b - 1) / b
}

/// Remainder of a mod d normalized to 1..=d.
fn posrem(a: i64, d: i64) -> i64 {
    let r = a % d;
    if r == 0 {
        d
    } else {
        r
    }
}

fn check_params(n: u32, m: u32, h: u32) -> Result<()> {
    if m == 0 || m > n {
        return Err(Error::OutOfRange(format!("need 1 <= m <= n, got n={n} m={m}")));
    }
    if h == 0 {
        return Err(Error::ZeroFold);
    }
    Ok(())
}

fn check_divisor(n: u32, d: u32) -> Result<()> {
    if d == 0 || n % d != 0 {
        return Err(Error::NotADivisor { d, n });
    }
    Ok(())
}

/// f_d(n,m,h) = (h*ceil(m/d) - h + 1) * d, the unrestricted sumset size of
/// A_d(n,m) before clamping at n.
pub fn f_d(n: u32, m: u32, h: u32, d: u32) -> Result<i64> {
    check_params(n, m, h)?;
    check_divisor(n, d)?;
    Ok(f_d_unchecked(m as i64, h as i64, d as i64))
}

fn f_d_unchecked(m: i64, h: i64, d: i64) -> i64 {
    (h * ceil_div(m, d) - h + 1) * d
}

/// Correction term for the restricted closed form.  With k = posrem(m, d)
/// and r = posrem(h, d):
///
///   (k-r)*r - (d-1)  if r < k,
///   (d-r)*(r-k) - (d-1)  if k < r < d,
///   d - 1  if k = r = d,
///   0  otherwise.
pub fn delta_d(m: u32, h: u32, d: u32) -> i64 {
    delta_unchecked(m as i64, h as i64, d as i64)
}

fn delta_unchecked(m: i64, h: i64, d: i64) -> i64 {
    let (k, r) = (posrem(m, d), posrem(h, d));
    if r < k {
        (k - r) * r - (d - 1)
    } else if k < r && r < d {
        (d - r) * (r - k) - (d - 1)
    } else if k == r && r == d {
        d - 1
    } else {
        0
    }
}

/// |h^A_d(n,m)|, the restricted h-fold sumset size of the divisor
/// construction: 0 for h > m, 1 for h = m, otherwise the closed form
/// evaluated at min(h, m-h) (see module docs).
pub fn f_hat_d(n: u32, m: u32, h: u32, d: u32) -> Result<u32> {
    check_params(n, m, h)?;
    check_divisor(n, d)?;
    Ok(f_hat_unchecked(n as i64, m as i64, h as i64, d as i64) as u32)
}

fn f_hat_unchecked(n: i64, m: i64, h: i64, d: i64) -> i64 {
    if h > m {
        return 0;
    }
    if h == m {
        return 1;
    }
    let h = h.min(m - h); // reflection: |h^S| = |(m-h)^S| for |S| = m
    let (k, r) = (posrem(m, d), posrem(h, d));
    let interval = h * m - h * h + 1;
    if h <= k && r < d {
        // h fits inside the partial coset: endpoint cosets keep full freedom
        n.min(f_d_unchecked(m, h, d)).min(interval)
    } else {
        n.min(interval - delta_unchecked(m, h, d))
    }
}

/// Per-divisor summary used by the `u` and `uhat` tables.
///
/// c, k are determined by (m, d) and q, r by (h, d):
/// m = c*d + k with 1 <= k <= d, and h = q*d + r with 1 <= r <= d.
/// f_d is reported for the requested h (no reflection applies to the
/// unrestricted bound); f_hat_d is the true restricted size.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct DivisorRow {
    pub d: u32,
    pub c: u32,
    pub k: u32,
    pub q: u32,
    pub r: u32,
    pub f_d: i64,
    pub delta_d: i64,
    pub f_hat_d: u32,
}

/// A minimized bound together with the divisor table behind it.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Bound {
    pub value: u32,
    /// Smallest divisor attaining the minimum.
    pub argmin: u32,
    pub rows: Vec<DivisorRow>,
}

/// The full divisor table for (n, m, h).
pub fn divisor_table(n: u32, m: u32, h: u32) -> Result<Vec<DivisorRow>> {
    check_params(n, m, h)?;
    let (mi, hi) = (m as i64, h as i64);
    Ok(divisors(n)
        .into_iter()
        .map(|d| {
            let di = d as i64;
            DivisorRow {
                d,
                c: (ceil_div(mi, di) - 1) as u32,
                k: posrem(mi, di) as u32,
                q: (ceil_div(hi, di) - 1) as u32,
                r: posrem(hi, di) as u32,
                f_d: f_d_unchecked(mi, hi, di),
                delta_d: delta_unchecked(mi, hi, di),
                f_hat_d: f_hat_unchecked(n as i64, mi, hi, di) as u32,
            }
        })
        .collect())
}

/// u(n,m,h) = min over d | n of f_d, with ties going to the smallest divisor.
pub fn u(n: u32, m: u32, h: u32) -> Result<Bound> {
    let rows = divisor_table(n, m, h)?;
    let row = rows.iter().min_by_key(|r| r.f_d).expect("n has divisors");
    // f_n = n, so the minimum is at most n and fits in u32
    Ok(Bound { value: row.f_d.min(n as i64) as u32, argmin: row.d, rows })
}

/// u^(n,m,h) = min over d | n of f^_d, ties to the smallest divisor.
pub fn u_hat(n: u32, m: u32, h: u32) -> Result<Bound> {
    let rows = divisor_table(n, m, h)?;
    let row = rows.iter().min_by_key(|r| r.f_hat_d).expect("n has divisors");
    Ok(Bound { value: row.f_hat_d, argmin: row.d, rows })
}

fn is_power_of_two(x: u32) -> bool {
    x >= 1 && x & (x - 1) == 0
}

/// Closed form for u^(n,m,2), valid for 3 <= m <= n.
pub fn u_hat_pair(n: u32, m: u32) -> Result<u32> {
    if m < 3 || m > n {
        return Err(Error::OutOfRange(format!("need 3 <= m <= n, got n={n} m={m}")));
    }
    let u2 = u(n, m, 2)?.value as i64;
    let cap = if n % 2 == 0 && m % 2 == 0 { 2 * m as i64 - 4 } else { 2 * m as i64 - 3 };
    Ok(u2.min(cap) as u32)
}

/// Closed form for u^(n,m,3), valid for 4 <= m <= n.
pub fn u_hat_triple(n: u32, m: u32) -> Result<u32> {
    if m < 4 || m > n {
        return Err(Error::OutOfRange(format!("need 4 <= m <= n, got n={n} m={m}")));
    }
    let u3 = u(n, m, 3)?.value as i64;
    let g = gcd(n, m - 1) as i64;
    let mi = m as i64;
    let cap = if g >= 8 {
        3 * mi - 3 - g
    } else if g == 7 || (g <= 5 && n % 3 == 0 && m % 3 == 0) {
        3 * mi - 10
    } else if g == 6 {
        3 * mi - 9
    } else {
        3 * mi - 8
    };
    Ok(u3.min(cap) as u32)
}

/// Upper bound on rho^(Z_n,m,2) for 3 <= m <= n; conjectured exact, and
/// verified exact by the search suites at desk scale.
pub fn rho_hat_upper_pair(n: u32, m: u32) -> Result<u32> {
    if m < 3 || m > n {
        return Err(Error::OutOfRange(format!("need 3 <= m <= n, got n={n} m={m}")));
    }
    let u2 = u(n, m, 2)?.value as i64;
    let improvable =
        (n % 2 == 0 && m % 2 == 0) || (n % (2 * m - 2) == 0 && !is_power_of_two(m - 1));
    let cap = if improvable { 2 * m as i64 - 4 } else { 2 * m as i64 - 3 };
    Ok(u2.min(cap) as u32)
}

/// Upper bound on rho^(Z_n,m,3) for 4 <= m <= n; known to be exact for all
/// n <= 40.
pub fn rho_hat_upper_triple(n: u32, m: u32) -> Result<u32> {
    if m < 4 || m > n {
        return Err(Error::OutOfRange(format!("need 4 <= m <= n, got n={n} m={m}")));
    }
    let u3 = u(n, m, 3)?.value as i64;
    let g = gcd(n, m - 1) as i64;
    let mi = m as i64;
    let cap = if g >= 8 {
        3 * mi - 3 - g
    } else if g == 7
        || (g <= 5 && n % 3 == 0 && m % 3 == 0)
        || (g <= 5 && n % (3 * m - 9) == 0 && (m - 3) % 5 == 0)
    {
        3 * mi - 10
    } else if g == 6 || (m == 6 && n % 10 == 0 && n % 3 != 0) {
        3 * mi - 9
    } else {
        3 * mi - 8
    };
    Ok(u3.min(cap) as u32)
}

/// A t-subset J of {0, ..., t} with sum congruent to j mod d, for any
/// 1 <= t <= d-1 and 0 <= j < d.  Exists because dropping one element from
/// {0, ..., t} leaves consecutive achievable sums covering a full residue
/// system mod d.
pub fn prescribed_sum_subset(d: u32, t: u32, j: u32) -> Result<Vec<u32>> {
    if t == 0 || t >= d {
        return Err(Error::OutOfRange(format!("need 1 <= t <= d-1, got d={d} t={t}")));
    }
    if j >= d {
        return Err(Error::OutOfRange(format!("need 0 <= j < d, got d={d} j={j}")));
    }
    let (di, ti, ji) = (d as i64, t as i64, j as i64);
    let j0 = (ji - ti * (ti - 1) / 2).rem_euclid(di) as u32;
    let set: Vec<u32> = if j0 < t {
        // {0, ..., t} minus t - j0
        (0..=t).filter(|&x| x != t - j0).collect()
    } else {
        // {1, ..., t-1} plus j0
        (1..t).chain([j0]).collect()
    };
    debug_assert_eq!(set.len() as u32, t);
    debug_assert_eq!(set.iter().map(|&x| x as i64).sum::<i64>() % di, ji);
    Ok(set)
}

/// Index-sum range of the restricted sumset of A_d(n,m): writing every
/// element as i + j*(n/d), the per-element indices i of an h-element
/// selection sum to anything between i_min and i_max, and h^A_d meets
/// exactly min{n/d, i_max - i_min + 1} cosets of the order-d subgroup.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Span {
    pub i_min: i64,
    pub i_max: i64,
    pub coset_span: i64,
}

/// Span quantities for (n, m, h) and d | n; requires 1 <= h <= m-1.
pub fn span_quantities(n: u32, m: u32, h: u32, d: u32) -> Result<Span> {
    check_params(n, m, h)?;
    check_divisor(n, d)?;
    if h >= m {
        return Err(Error::OutOfRange(format!("need h <= m-1, got m={m} h={h}")));
    }
    let (mi, hi, di) = (m as i64, h as i64, d as i64);
    let c = ceil_div(mi, di) - 1;
    let k = posrem(mi, di);
    let q = ceil_div(hi, di) - 1;
    let r = posrem(hi, di);
    // q*(h+r-d) is always even: h+r-d = (q-1)d + 2r
    let i_min = q * (hi + r - di) / 2;
    let i_max = hi * c - hi + k * q - i_min + r.min(k);
    let coset_span = i_max - i_min + 1;
    debug_assert_eq!(coset_span * di, hi * mi - hi * hi - r * (k - r) + di * 0.min(k - r) + di);
    Ok(Span { i_min, i_max, coset_span })
}
