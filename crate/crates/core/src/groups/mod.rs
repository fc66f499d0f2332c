//! Finite abelian groups (cyclic and products of cyclics) and their subsets,
//! with the two sumset kernels everything else is built on:
//!
//! * `unrestricted_sumset`: h-fold sums with repetition allowed,
//! * `restricted_sumset`: h-fold sums of pairwise distinct elements,
//!
//! plus affine maps and canonical orbit representatives over Z_n.
//!
//! Elements of a product Z_{n1} x ... x Z_{nt} are encoded mixed-radix with
//! the last factor fastest: (e1, ..., et) sits at bit e1*n2*...*nt + ... + et.
//! Adding a group element is then a rotation of the whole mask for cyclic
//! groups and an independent rotation along each factor for products; it is
//! never a plain rotation of the mixed-radix bit string.

mod mask;

pub use mask::{Mask, Ones, MASK_BITS, MASK_WORDS};

use crate::error::{Error, Result};

/// Z_n, 1 <= n <= [`MASK_BITS`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct CyclicGroup {
    n: u32,
}

impl CyclicGroup {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGroup);
        }
        if n as usize > MASK_BITS {
            return Err(Error::OrderTooLarge(n as u64));
        }
        Ok(CyclicGroup { n })
    }

    pub fn order(&self) -> u32 {
        self.n
    }
}

/// A product of cyclic groups with total order <= [`MASK_BITS`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AbelianGroup {
    factors: Vec<u32>,
    order: u32,
}

impl AbelianGroup {
    pub fn new(factors: Vec<u32>) -> Result<Self> {
        if factors.is_empty() || factors.contains(&0) {
            return Err(Error::EmptyGroup);
        }
        let mut order: u64 = 1;
        for &f in &factors {
            order *= f as u64;
            if order > MASK_BITS as u64 {
                return Err(Error::OrderTooLarge(order));
            }
        }
        Ok(AbelianGroup { order: order as u32, factors })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    /// Mixed-radix code of a tuple, last factor fastest.
    pub fn encode(&self, tuple: &[u32]) -> Result<u32> {
        if tuple.len() != self.factors.len() {
            return Err(Error::BadArity { got: tuple.len(), want: self.factors.len() });
        }
        let mut e = 0u32;
        for (&t, &f) in tuple.iter().zip(&self.factors) {
            if t >= f {
                return Err(Error::ElementOutOfRange { element: t, order: f });
            }
            e = e * f + t;
        }
        Ok(e)
    }

    /// Inverse of [`encode`](Self::encode).
    pub fn decode(&self, mut e: u32) -> Vec<u32> {
        debug_assert!(e < self.order);
        let mut tuple = vec![0u32; self.factors.len()];
        for (slot, &f) in tuple.iter_mut().zip(&self.factors).rev() {
            *slot = e % f;
            e /= f;
        }
        tuple
    }
}

/// A finite abelian group a subset can live in.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Group {
    Cyclic(CyclicGroup),
    Product(AbelianGroup),
}

impl Group {
    pub fn cyclic(n: u32) -> Result<Group> {
        Ok(Group::Cyclic(CyclicGroup::new(n)?))
    }

    pub fn product(factors: Vec<u32>) -> Result<Group> {
        Ok(Group::Product(AbelianGroup::new(factors)?))
    }

    pub fn order(&self) -> u32 {
        match self {
            Group::Cyclic(g) => g.order(),
            Group::Product(g) => g.order(),
        }
    }

    /// Order of Z_n when cyclic, error otherwise.
    pub fn cyclic_order(&self) -> Result<u32> {
        match self {
            Group::Cyclic(g) => Ok(g.order()),
            Group::Product(_) => Err(Error::NotCyclic),
        }
    }

    /// Sum of two encoded elements.
    pub fn add(&self, x: u32, y: u32) -> u32 {
        match self {
            Group::Cyclic(g) => {
                debug_assert!(x < g.n && y < g.n);
                let s = x + y;
                if s >= g.n {
                    s - g.n
                } else {
                    s
                }
            }
            Group::Product(g) => {
                let (a, b) = (g.decode(x), g.decode(y));
                let sum: Vec<u32> =
                    a.iter().zip(&b).zip(&g.factors).map(|((&p, &q), &f)| (p + q) % f).collect();
                g.encode(&sum).expect("digitwise sum stays in range")
            }
        }
    }

    /// Translate a whole subset by the element `x`.
    ///
    /// Cyclic groups rotate the n-bit window; products rotate along each
    /// factor independently (realized by re-encoding every element).
    pub(crate) fn shift(&self, m: &Mask, x: u32) -> Mask {
        match self {
            Group::Cyclic(g) => m.rotate(g.n, x % g.n),
            Group::Product(_) => {
                let mut out = Mask::empty();
                for e in m.ones() {
                    out.set(self.add(e, x));
                }
                out
            }
        }
    }

    /// Render an encoded element the way the CLI accepts it: a plain residue
    /// for Z_n, colon-separated digits for a product.
    pub fn format_element(&self, e: u32) -> String {
        match self {
            Group::Cyclic(_) => e.to_string(),
            Group::Product(g) => {
                g.decode(e).iter().map(u32::to_string).collect::<Vec<_>>().join(":")
            }
        }
    }
}

/// A subset of a [`Group`], stored as a bitmask.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroupSubset {
    group: Group,
    mask: Mask,
}

impl GroupSubset {
    pub fn new(group: Group, elements: impl IntoIterator<Item = u32>) -> Result<Self> {
        let order = group.order();
        let mut mask = Mask::empty();
        for e in elements {
            if e >= order {
                return Err(Error::ElementOutOfRange { element: e, order });
            }
            mask.set(e);
        }
        Ok(GroupSubset { group, mask })
    }

    pub fn empty(group: Group) -> Self {
        GroupSubset { group, mask: Mask::empty() }
    }

    pub fn from_mask(group: Group, mask: Mask) -> Self {
        debug_assert!(mask.ones().all(|e| e < group.order()));
        GroupSubset { group, mask }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn mask(&self) -> Mask {
        self.mask
    }

    pub fn len(&self) -> u32 {
        self.mask.count()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn contains(&self, e: u32) -> bool {
        self.mask.test(e)
    }

    /// Elements in increasing encoded order.
    pub fn elements(&self) -> Vec<u32> {
        self.mask.ones().collect()
    }

    /// Sum of all elements of the set.
    pub fn element_sum(&self) -> u32 {
        self.mask.ones().fold(0, |acc, e| self.group.add(acc, e))
    }

    /// h-fold sumset with repetition: { x1 + ... + xh : xi in A }.
    ///
    /// Empty sets and h = 0 are rejected (there is no sensible value).
    pub fn unrestricted_sumset(&self, h: u32) -> Result<GroupSubset> {
        if self.is_empty() {
            return Err(Error::EmptySubset);
        }
        if h == 0 {
            return Err(Error::ZeroFold);
        }
        let mut acc = self.mask;
        for _ in 1..h {
            let mut next = Mask::empty();
            for x in self.mask.ones() {
                next.or_assign(&self.group.shift(&acc, x));
            }
            acc = next;
        }
        Ok(GroupSubset::from_mask(self.group.clone(), acc))
    }

    /// h-fold restricted sumset: sums of h pairwise distinct elements of A.
    ///
    /// Total on every input: h = 0 gives {0}, h > |A| gives the empty set,
    /// and h = |A| gives the singleton {sum of A}.
    pub fn restricted_sumset(&self, h: u32) -> GroupSubset {
        let h = h as usize;
        // layers[j] = sums of j distinct elements among those processed so far
        let mut layers = vec![Mask::empty(); h + 1];
        layers[0] = Mask::singleton(0);
        let mut seen = 0usize;
        for x in self.mask.ones() {
            seen += 1;
            for j in (1..=h.min(seen)).rev() {
                let lower = layers[j - 1];
                if !lower.is_empty() {
                    layers[j].or_assign(&self.group.shift(&lower, x));
                }
            }
        }
        GroupSubset::from_mask(self.group.clone(), layers[h])
    }

    /// The image a*A + b over Z_n; `a` must be a unit mod n.
    pub fn affine_image(&self, a: u32, b: u32) -> Result<GroupSubset> {
        let n = self.group.cyclic_order()?;
        let (a, b) = (a % n, b % n);
        if gcd(a, n) != 1 {
            return Err(Error::NotAUnit { a, n });
        }
        let mut mask = Mask::empty();
        for e in self.mask.ones() {
            mask.set(((a as u64 * e as u64 + b as u64) % n as u64) as u32);
        }
        Ok(GroupSubset::from_mask(self.group.clone(), mask))
    }

    /// Canonical representative of the orbit of A under x -> a*x + b
    /// (a a unit mod n): the image whose bitmask is smallest as an n-bit
    /// integer.  Constant on orbits and idempotent.
    pub fn canonical_form(&self) -> Result<GroupSubset> {
        let n = self.group.cyclic_order()?;
        let mut best: Option<Mask> = None;
        for a in units(n) {
            let mut img = Mask::empty();
            for e in self.mask.ones() {
                img.set(((a as u64 * e as u64) % n as u64) as u32);
            }
            // scan all n translates of a*A
            let mut cur = img;
            for _ in 0..n {
                if best.is_none_or(|b| cur < b) {
                    best = Some(cur);
                }
                cur = cur.rotate(n, 1 % n);
            }
        }
        Ok(GroupSubset::from_mask(self.group.clone(), best.unwrap_or_else(Mask::empty)))
    }
}

impl std::fmt::Display for GroupSubset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.mask.ones().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", self.group.format_element(e))?;
        }
        write!(f, "}}")
    }
}

pub fn gcd(a: u32, b: u32) -> u32 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Units modulo n, ascending.  For n = 1 this is just {0}.
pub fn units(n: u32) -> Vec<u32> {
    if n == 1 {
        return vec![0];
    }
    (1..n).filter(|&a| gcd(a, n) == 1).collect()
}
