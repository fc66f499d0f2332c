//! Exact minimal restricted-sumset sizes by exhaustive search.
//!
//! rho^(Z_n, m, h) is found by depth-first enumeration of sorted m-subsets
//! 0 = a_1 < a_2 < ... < a_m, with three reductions, none of which affects
//! the computed minimum:
//!
//! - reflection: the search always runs at min(h, m-h), since complementing
//!   the h-subset inside the m-set gives |h^A| = |(m-h)^A|;
//! - orbit pruning: only candidates whose cyclic gaps are all >= a_2 are
//!   generated.  Every translation orbit contains such a rotation (start
//!   just before a minimal gap), and translation preserves sumset sizes, so
//!   one representative per orbit survives.  This also forces a_2 <= n/m
//!   and caps each a_t by n - (m-t+1)*a_2;
//! - branch-and-bound: sumset layers are maintained incrementally per
//!   prefix, and once the prefix has at least h elements, a restricted
//!   h-fold sumset already as large as the best known candidate kills the
//!   branch (supersets only grow).
//!
//! The bound starts at the divisor-construction witness for u^(n,m,h), so
//! the search only ever has to certify "no set beats the formula by more
//! than it already knows about".  Everything is single-threaded per cell
//! and visits candidates in a fixed order, so node counts, witnesses, and
//! budget behavior are bit-reproducible; `rho_hat_table` gets its
//! parallelism by distributing whole cells across threads.

pub mod cache;

pub use cache::{ResultsCache, SearchRecord, SearchStatus};

use crate::constructions::construct_a;
use crate::error::{Error, Result};
use crate::formulas::u_hat;
use crate::groups::{Group, GroupSubset, Mask};

const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn record(
    n: u32,
    m: u32,
    h: u32,
    rho_hat: u32,
    witness: Vec<u32>,
    nodes: u64,
    exhausted: bool,
) -> SearchRecord {
    SearchRecord {
        n,
        m,
        h,
        rho_hat,
        witness,
        nodes,
        status: if exhausted { SearchStatus::BudgetExhausted } else { SearchStatus::Exact },
        tool_version: TOOL_VERSION.into(),
    }
}

struct Dfs {
    group: Group,
    n: u32,
    m: u32,
    /// effective fold count, min(h, m-h)
    h: u32,
    budget: Option<u64>,
    nodes: u64,
    exhausted: bool,
    best: u32,
    best_mask: Mask,
    /// layers[t*(h+1) + j] = j-fold restricted sumset of the first t chosen
    /// elements; row 0 is the empty prefix ({0}, then nothing)
    layers: Vec<Mask>,
    elems: Vec<u32>,
}

impl Dfs {
    fn new(
        group: Group,
        n: u32,
        m: u32,
        h: u32,
        budget: Option<u64>,
        best: u32,
        best_mask: Mask,
    ) -> Dfs {
        let width = h as usize + 1;
        let mut layers = vec![Mask::empty(); (m as usize + 1) * width];
        layers[0] = Mask::singleton(0);
        Dfs {
            group,
            n,
            m,
            h,
            budget,
            nodes: 0,
            exhausted: false,
            best,
            best_mask,
            layers,
            elems: Vec::with_capacity(m as usize),
        }
    }

    /// Extend the prefix by x: row t+1 = row t plus sums using x once.
    fn push(&mut self, x: u32) {
        let t = self.elems.len();
        let width = self.h as usize + 1;
        let (lo, hi) = self.layers.split_at_mut((t + 1) * width);
        let old = &lo[t * width..];
        let new = &mut hi[..width];
        new.copy_from_slice(&old[..width]);
        for j in 1..=self.h.min(t as u32 + 1) as usize {
            new[j].or_assign(&self.group.shift(&old[j - 1], x));
        }
        self.elems.push(x);
    }

    fn pop(&mut self) {
        self.elems.pop();
    }

    fn prefix_size(&self) -> u32 {
        let width = self.h as usize + 1;
        self.layers[self.elems.len() * width + self.h as usize].count()
    }

    fn run(&mut self) {
        self.push(0);
        self.descend();
        self.pop();
    }

    fn descend(&mut self) {
        let t = self.elems.len() as u32;
        let (from, to) = if t == 1 {
            // choosing a_2 fixes the minimal allowed gap; some rotation of
            // every orbit has its smallest gap first, and the smallest gap
            // is at most the average n/m
            (1i64, (self.n / self.m) as i64)
        } else {
            let g1 = self.elems[1] as i64;
            let last = *self.elems.last().expect("prefix nonempty") as i64;
            (last + g1, self.n as i64 - (self.m - t) as i64 * g1)
        };
        for x in from..=to {
            if self.exhausted {
                return;
            }
            self.nodes += 1;
            if self.budget.is_some_and(|b| self.nodes > b) {
                self.exhausted = true;
                return;
            }
            self.push(x as u32);
            let count = t + 1;
            if count == self.m {
                let size = self.prefix_size();
                if size < self.best {
                    self.best = size;
                    self.best_mask = mask_of(&self.elems);
                }
            } else if count < self.h || self.prefix_size() < self.best {
                self.descend();
            }
            self.pop();
        }
    }
}

fn mask_of(elems: &[u32]) -> Mask {
    let mut m = Mask::empty();
    for &e in elems {
        m.set(e);
    }
    m
}

/// The exact minimum of |h^A| over m-subsets A of Z_n, with a canonical
/// witness.  `budget` caps the number of element placements the search may
/// explore; when it runs out, the best size found so far is returned with
/// status `BudgetExhausted` (an upper bound, never claimed exact).
pub fn rho_hat_exact(n: u32, m: u32, h: u32, budget: Option<u64>) -> Result<SearchRecord> {
    if m == 0 || m > n {
        return Err(Error::OutOfRange(format!("need 1 <= m <= n, got n={n} m={m}")));
    }
    if h == 0 {
        return Err(Error::ZeroFold);
    }
    Group::cyclic(n)?; // surfaces the order cap before any work
    if h > m {
        // no h pairwise-distinct elements exist
        return Ok(record(n, m, h, 0, (0..m).collect(), 0, false));
    }
    if h == m {
        // the only selection is the whole set
        return Ok(record(n, m, h, 1, (0..m).collect(), 0, false));
    }
    let h_eff = h.min(m - h);
    if h_eff == 1 {
        // 1^A = A for every A, so the minimum is m for any witness
        return Ok(record(n, m, h, m, (0..m).collect(), 0, false));
    }

    // seed the bound with the divisor construction at the u^ argmin; its
    // size is computed directly, so the search stays exact even where the
    // closed form would not apply
    let bound = u_hat(n, m, h)?;
    let seed = construct_a(n, m, bound.argmin)?;
    let best = seed.restricted_sumset(h_eff).len();

    let group = Group::cyclic(n)?;
    let mut dfs = Dfs::new(group.clone(), n, m, h_eff, budget, best, seed.mask());
    dfs.run();

    let witness = GroupSubset::from_mask(group, dfs.best_mask).canonical_form()?;
    Ok(record(n, m, h, dfs.best, witness.elements(), dfs.nodes, dfs.exhausted))
}

/// How a table run went: cells emitted, split by provenance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TableSummary {
    pub cells: usize,
    /// freshly searched base cells
    pub computed: usize,
    /// cells answered by an exact cache record from an earlier run
    pub reused: usize,
    /// cells derived from the complementary fold m-h
    pub derived: usize,
    /// cells whose search ran out of budget (subset of computed)
    pub exhausted: usize,
}

/// Options for a table run over all cells 1 <= h <= m <= n <= n_max.
#[derive(Clone, Copy, Debug)]
pub struct TableOptions {
    pub n_max: u32,
    /// per-cell node budget; None searches to completion
    pub budget: Option<u64>,
    pub threads: u32,
}

fn base_cells(n_max: u32) -> Vec<(u32, u32, u32)> {
    let mut cells = Vec::new();
    for n in 1..=n_max {
        for m in 1..=n {
            for h in 1..=m {
                if h == m || 2 * h <= m {
                    cells.push((n, m, h));
                }
            }
        }
    }
    cells
}

/// Fills the cache with one record per (n, m, h) cell up to n_max and
/// streams every cell's record (cached, computed, or fold-derived) to
/// `on_record` in (n, m, h) order.
///
/// Cells with h > m/2 (other than h = m) reuse the record of the
/// complementary fold m-h verbatim: same value, witness, and node count.
/// Exact cache entries are never recomputed, and records are appended in a
/// fixed order by the single writing thread, so runs with different thread
/// counts produce identical cache files and resumed runs only add missing
/// cells.
pub fn rho_hat_table(
    opts: &TableOptions,
    cache: &mut ResultsCache,
    mut on_record: impl FnMut(&SearchRecord),
) -> Result<TableSummary> {
    let work: Vec<(u32, u32, u32)> =
        base_cells(opts.n_max).into_iter().filter(|&(n, m, h)| !cache.has_exact(n, m, h)).collect();

    // distribute whole cells over threads; each cell is computed exactly as
    // in the single-threaded case, so only scheduling varies
    let slots: Vec<std::sync::OnceLock<Result<SearchRecord>>> =
        (0..work.len()).map(|_| std::sync::OnceLock::new()).collect();
    let next = std::sync::atomic::AtomicUsize::new(0);
    let workers = (opts.threads.max(1) as usize).min(work.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= work.len() {
                    return;
                }
                let (n, m, h) = work[i];
                let res = rho_hat_exact(n, m, h, opts.budget);
                slots[i].set(res).expect("each slot is claimed once");
            });
        }
    });

    let mut computed = std::collections::BTreeMap::new();
    for (i, &(n, m, h)) in work.iter().enumerate() {
        let res = slots[i].get().expect("worker filled every claimed slot");
        match res {
            Ok(rec) => {
                computed.insert((n, m, h), rec.clone());
            }
            Err(e) => return Err(Error::OutOfRange(format!("cell ({n},{m},{h}): {e}"))),
        }
    }

    let mut summary = TableSummary::default();
    for n in 1..=opts.n_max {
        for m in 1..=n {
            for h in 1..=m {
                summary.cells += 1;
                if cache.has_exact(n, m, h) {
                    summary.reused += 1;
                    on_record(&cache.get(n, m, h).expect("exact record present").clone());
                    continue;
                }
                let rec = if let Some(rec) = computed.get(&(n, m, h)) {
                    summary.computed += 1;
                    rec.clone()
                } else {
                    // dual cell: reuse the record for m-h, already emitted
                    // this pass or resident in the cache
                    let base = cache.get(n, m, m - h).expect("base fold precedes dual fold");
                    summary.derived += 1;
                    SearchRecord { h, ..base.clone() }
                };
                if rec.status == SearchStatus::BudgetExhausted {
                    summary.exhausted += 1;
                }
                cache.insert(rec.clone())?;
                on_record(&rec);
            }
        }
    }
    Ok(summary)
}
