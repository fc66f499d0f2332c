//! Explicit witness sets: the divisor construction A_d(n,m), the
//! two-partial-coset construction B_d(n,m;k1,k2,g,j0), the special families
//! built from it, and two product/prime-power examples that separate the
//! restricted and unrestricted minima.
//!
//! Throughout, H denotes the order-d subgroup {j*(n/d) : j < d} of Z_n.

use crate::error::{Error, Result};
use crate::formulas;
use crate::groups::{Group, GroupSubset, Mask};

/// A_d(n,m): c full cosets of H starting at 0, with difference 1 between
/// consecutive cosets, plus a k-element prefix of the coset c + H, where
/// c = ceil(m/d) - 1 and k = m - c*d.
pub fn construct_a(n: u32, m: u32, d: u32) -> Result<GroupSubset> {
    if d == 0 || n % d != 0 {
        return Err(Error::NotADivisor { d, n });
    }
    if m == 0 || m > n {
        return Err(Error::OutOfRange(format!("need 1 <= m <= n, got n={n} m={m}")));
    }
    let nd = n / d;
    let c = m.div_ceil(d) - 1;
    let k = m - c * d;
    let group = Group::cyclic(n)?;
    let full = (0..c).flat_map(|i| (0..d).map(move |j| i + j * nd));
    let partial = (0..k).map(|j| c + j * nd);
    GroupSubset::new(group, full.chain(partial))
}

/// Parameters of the construction B_d(n,m;k1,k2,g,j0): a k1-element prefix
/// of H, the full cosets g+H, 2g+H, ..., (c-1)g+H, and a k2-element run of
/// cg+H starting at offset j0*(n/d).
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct ConstructionB {
    pub n: u32,
    pub m: u32,
    pub d: u32,
    pub k1: u32,
    pub k2: u32,
    pub g: u32,
    pub j0: u32,
}

impl ConstructionB {
    /// Validates the shape constraints: d | n, k1 < d, k2 < d, k1 + k2 > d,
    /// d | (m - k1 - k2), the resulting block count c >= 1, and j0 < d.
    pub fn new(n: u32, m: u32, d: u32, k1: u32, k2: u32, g: u32, j0: u32) -> Result<Self> {
        if d == 0 || n % d != 0 {
            return Err(Error::NotADivisor { d, n });
        }
        if m > n || g >= n {
            return Err(Error::OutOfRange(format!("need m <= n and g < n, got n={n} m={m} g={g}")));
        }
        if k1 >= d || k2 >= d || k1 + k2 <= d {
            return Err(Error::OutOfRange(format!(
                "partial coset sizes need k1 < d, k2 < d, k1 + k2 > d, got d={d} k1={k1} k2={k2}"
            )));
        }
        if j0 >= d {
            return Err(Error::OutOfRange(format!("need j0 < d, got d={d} j0={j0}")));
        }
        if m < k1 + k2 || (m - k1 - k2) % d != 0 {
            return Err(Error::OutOfRange(format!(
                "need m = k1 + k2 + (c-1)*d for some c >= 1, got m={m} d={d} k1={k1} k2={k2}"
            )));
        }
        Ok(ConstructionB { n, m, d, k1, k2, g, j0 })
    }

    /// Block count: m = k1 + (c-1)*d + k2, c >= 1.
    pub fn c(&self) -> u32 {
        (self.m - self.k1 - self.k2) / self.d + 1
    }

    /// The elements grouped by block: block 0 is the k1-prefix of H, blocks
    /// 1..c-1 are full cosets i*g + H, block c is the k2-run of c*g + H.
    fn blocks(&self) -> Vec<Vec<u32>> {
        let (n, d, nd) = (self.n, self.d, self.n / self.d);
        let c = self.c();
        let mut blocks = vec![(0..self.k1).map(|j| j * nd).collect::<Vec<_>>()];
        for i in 1..c {
            blocks.push((0..d).map(|j| (i * self.g + j * nd) % n).collect());
        }
        blocks.push((0..self.k2).map(|j| (c * self.g + (self.j0 + j) % d * nd) % n).collect());
        blocks
    }
}

/// Builds the set B_d(n,m;k1,k2,g,j0); fails with `Collision` if the three
/// parts overlap anywhere in Z_n (the shape constraints alone do not
/// guarantee distinctness for arbitrary g).
pub fn construct_b(b: &ConstructionB) -> Result<GroupSubset> {
    let group = Group::cyclic(b.n)?;
    let set = GroupSubset::new(group, b.blocks().into_iter().flatten())?;
    if set.len() != b.m {
        return Err(Error::Collision);
    }
    Ok(set)
}

/// Which of the three special families a parameter triple matched.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// h = 2, d the largest odd divisor of m-1 exceeding 1, (2m-2) | n;
    /// claimed restricted size 2m-4.
    Pair,
    /// h = 3, m = 6, 10 | n; claimed size 9.
    TripleSix,
    /// h odd, (h+2) | (m+2), (hm-h^2) | n; claimed size hm-h^2-1.
    OddFold,
}

/// A matched family instance: the B-set parameters and the size its
/// restricted h-fold sumset is claimed to achieve (one below the divisor
/// bound in the regimes of interest).
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct SpecialFamily {
    pub kind: FamilyKind,
    pub b: ConstructionB,
    pub claimed: u32,
}

fn largest_odd_divisor_gt1(mut x: u32) -> Option<u32> {
    while x % 2 == 0 {
        x /= 2;
    }
    (x > 1).then_some(x)
}

/// Matches (h, n, m) against the three special families, returning the
/// construction parameters and claimed size if a family's divisibility
/// conditions hold.  For h = 2, several odd divisors of m-1 may qualify;
/// the largest is chosen (any valid d yields the same claimed size).
pub fn special_family(h: u32, n: u32, m: u32) -> Option<SpecialFamily> {
    if h < 2 || m < 3 || m > n || h > m - 1 {
        return None;
    }
    if h == 2 {
        let d = largest_odd_divisor_gt1(m - 1)?;
        if n % (2 * m - 2) != 0 {
            return None;
        }
        let b =
            ConstructionB::new(n, m, d, d.div_ceil(2), d.div_ceil(2), n / (2 * m - 2), (d - 1) / 2)
                .expect("pair family parameters always satisfy the shape constraints");
        return Some(SpecialFamily { kind: FamilyKind::Pair, b, claimed: 2 * m - 4 });
    }
    if h == 3 && m == 6 {
        if n % 10 != 0 {
            return None;
        }
        let b = ConstructionB::new(n, 6, 5, 4, 2, n / 10, 3)
            .expect("triple-six family parameters always satisfy the shape constraints");
        return Some(SpecialFamily { kind: FamilyKind::TripleSix, b, claimed: 9 });
    }
    if h % 2 == 1 {
        if (m + 2) % (h + 2) != 0 || n % (h * m - h * h) != 0 {
            return None;
        }
        let b = ConstructionB::new(n, m, h + 2, h + 1, h + 1, n / (h * m - h * h), (h + 3) / 2)
            .expect("odd-fold family parameters always satisfy the shape constraints");
        return Some(SpecialFamily { kind: FamilyKind::OddFold, b, claimed: h * m - h * h - 1 });
    }
    None
}

/// Structural analysis of how the restricted h-fold sumset of a B-set sits
/// inside cosets of H.  Every element of block i contributes i to the
/// "index" of a selection; selecting h elements greedily from the bottom
/// (resp. top) blocks minimizes (resp. maximizes) the index sum, and all
/// sums with index sum i lie in the coset i*g + H.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct SpecialAnalysis {
    pub block_sizes: Vec<u32>,
    pub i_min: u64,
    pub i_max: u64,
    /// i_max*g = i_min*g + n/d in Z_n: the top and bottom index cosets are
    /// adjacent multiples of n/d apart, so they coincide as cosets of H and
    /// the extremal slices can overlap.
    pub g_condition_holds: bool,
    /// Sums achievable with the minimal index profile, as elements of Z_n.
    pub bottom_slice: Vec<u32>,
    /// Sums achievable with the maximal index profile.
    pub top_slice: Vec<u32>,
    /// One extremal slice contains the other, so the sumset loses at least
    /// one element relative to disjoint end cosets.
    pub is_special: bool,
}

// minkowski sum {a + b : a in acc, b in other} inside one group
fn minkowski(group: &Group, acc: Mask, other: Mask) -> Mask {
    let mut out = Mask::empty();
    for x in other.ones() {
        out.or_assign(&group.shift(&acc, x));
    }
    out
}

/// The sums achievable by taking h elements greedily along `blocks` (the
/// per-block selection counts are forced; within each block every choice of
/// that many elements is allowed).
fn slice_sums(group: &Group, blocks: &[GroupSubset], h: u32) -> Mask {
    let mut remaining = h;
    let mut acc = Mask::singleton(0);
    for block in blocks {
        if remaining == 0 {
            break;
        }
        let take = remaining.min(block.len());
        acc = minkowski(group, acc, block.restricted_sumset(take).mask());
        remaining -= take;
    }
    debug_assert_eq!(remaining, 0);
    acc
}

/// Computes the index range, the coset-adjacency condition on g, and the
/// extremal slices of a B-set's restricted h-fold sumset; requires
/// 1 <= h <= m-1.
pub fn analyze_special(b: &ConstructionB, h: u32) -> Result<SpecialAnalysis> {
    if h == 0 {
        return Err(Error::ZeroFold);
    }
    if h >= b.m {
        return Err(Error::OutOfRange(format!("need h <= m-1, got m={} h={}", b.m, h)));
    }
    construct_b(b)?; // surfaces collisions before analyzing block structure
    let group = Group::cyclic(b.n)?;
    let blocks: Vec<GroupSubset> = b
        .blocks()
        .into_iter()
        .map(|els| GroupSubset::new(group.clone(), els).expect("blocks are in range"))
        .collect();
    let sizes: Vec<u32> = blocks.iter().map(|bl| bl.len()).collect();

    let index_sum = |order: &mut dyn Iterator<Item = (usize, &u32)>| -> u64 {
        let mut remaining = h;
        let mut sum = 0u64;
        for (i, &size) in order {
            let take = remaining.min(size);
            sum += i as u64 * take as u64;
            remaining -= take;
            if remaining == 0 {
                break;
            }
        }
        debug_assert_eq!(remaining, 0);
        sum
    };
    let i_min = index_sum(&mut sizes.iter().enumerate());
    let i_max = index_sum(&mut sizes.iter().enumerate().rev());
    debug_assert!(i_max > i_min);

    let (n, g, nd) = (b.n as u64, b.g as u64, (b.n / b.d) as u64);
    let g_condition_holds = (i_max * g) % n == (i_min * g + nd) % n;

    let bottom = slice_sums(&group, &blocks, h);
    let rev: Vec<GroupSubset> = blocks.iter().rev().cloned().collect();
    let top = slice_sums(&group, &rev, h);
    let is_special = bottom.is_subset_of(&top) || top.is_subset_of(&bottom);

    Ok(SpecialAnalysis {
        block_sizes: sizes,
        i_min,
        i_max,
        g_condition_holds,
        bottom_slice: bottom.ones().collect(),
        top_slice: top.ones().collect(),
        is_special,
    })
}

/// The doubling example in Z_2^k x Z_d (d odd): A = everything whose last
/// coordinate is 0 or 1.  Then m = 2^(k+1) while the restricted pair sumset
/// has only 3*2^k - 2 elements, beating the 3m/2 - 2 lower-bound shape that
/// holds over cyclic groups.
pub fn product_doubling_example(k: u32, d: u32) -> Result<GroupSubset> {
    if k == 0 {
        return Err(Error::OutOfRange(format!("need k >= 1, got k={k}")));
    }
    if d < 3 || d % 2 == 0 {
        return Err(Error::OutOfRange(format!("need d >= 3 odd, got d={d}")));
    }
    let mut factors = vec![2u32; k as usize];
    factors.push(d);
    let group = Group::product(factors)?;
    let order = group.order();
    // last factor varies fastest, so tuples (.., x) with x in {0, 1} are the
    // elements congruent to 0 or 1 mod d
    let elements = (0..order).filter(|e| e % d <= 1);
    GroupSubset::new(group, elements)
}

pub(crate) fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|q| q * q <= p).all(|q| p % q != 0)
}

/// A prime-power instance where the restricted and unrestricted minima
/// separate by design.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct PrimePowerGap {
    pub n: u32,
    pub m: u32,
    /// min over divisors of the unrestricted bound: 2m - 1, attained at
    /// d = 1 (also the true minimum of |2A| over m-subsets here).
    pub expected_u: u32,
    /// the restricted divisor bound: 2m - 3, attained at d = 1.
    pub expected_u_hat: u32,
}

/// For n = p^t (p an odd prime, t >= 2) and m = p^(t-1) + 1, the minimal
/// unrestricted pair sumset has size 2m - 1 while the restricted bound drops
/// to 2m - 3: an exceptional m in the sense that no divisor construction is
/// tight for pairs.
pub fn prime_power_gap_example(p: u32, t: u32) -> Result<PrimePowerGap> {
    if p % 2 == 0 || !is_prime(p) {
        return Err(Error::OutOfRange(format!("need an odd prime, got p={p}")));
    }
    if t < 2 {
        return Err(Error::OutOfRange(format!("need t >= 2, got t={t}")));
    }
    let n = p
        .checked_pow(t)
        .ok_or_else(|| Error::OutOfRange(format!("p^t overflows u32 for p={p} t={t}")))?;
    let m = n / p + 1;
    let gap = PrimePowerGap { n, m, expected_u: 2 * m - 1, expected_u_hat: 2 * m - 3 };
    debug_assert_eq!(formulas::u(n, m, 2).unwrap().value, gap.expected_u);
    debug_assert_eq!(formulas::u_hat(n, m, 2).unwrap().value, gap.expected_u_hat);
    Ok(gap)
}
