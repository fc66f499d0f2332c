//! The acceptance gate: one test and one printed verdict per
//! release-blocking criterion.  Everything here is an exact check — a
//! criterion either holds on its whole stated range or the gate fails with
//! the first offending cell in the message.

use std::collections::BTreeSet;
use std::fs;
use std::sync::OnceLock;

use rhohat::constructions::{
    construct_a, construct_b, prime_power_gap_example, product_doubling_example, special_family,
};
use rhohat::formulas::{
    divisors, f_d, f_hat_d, prescribed_sum_subset, span_quantities, u, u_hat, u_hat_pair,
    u_hat_triple,
};
use rhohat::groups::{units, Group, GroupSubset};
use rhohat::search::{rho_hat_exact, rho_hat_table, ResultsCache, SearchStatus, TableOptions};
use rhohat::verify::{
    check_critical_number, check_half_range, check_prime_values, Classification, VerifyOptions,
};

/// Collects failures for one criterion and prints a single verdict line.
struct Gate {
    label: &'static str,
    checks: u64,
    failed: u64,
    first: Option<String>,
}

impl Gate {
    fn new(label: &'static str) -> Gate {
        Gate { label, checks: 0, failed: 0, first: None }
    }

    fn check(&mut self, pass: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !pass {
            self.failed += 1;
            if self.first.is_none() {
                self.first = Some(detail());
            }
        }
    }

    fn finish(self) {
        let verdict = if self.failed == 0 && self.checks > 0 { "PASS" } else { "FAIL" };
        println!("{}: {verdict} ({} checks)", self.label, self.checks);
        assert!(
            self.failed == 0 && self.checks > 0,
            "{}: {} of {} checks failed, first: {}",
            self.label,
            self.failed,
            self.checks,
            self.first.unwrap_or_else(|| "no checks ran".into())
        );
    }
}

fn threads() -> u32 {
    std::thread::available_parallelism().map(|p| p.get() as u32).unwrap_or(1)
}

/// One shared exact search table for every criterion that needs minima.
fn search_table() -> &'static ResultsCache {
    static TABLE: OnceLock<ResultsCache> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut cache = ResultsCache::in_memory();
        let opts = TableOptions { n_max: 24, budget: None, threads: threads() };
        rho_hat_table(&opts, &mut cache, |_| {}).expect("full table to n=24");
        cache
    })
}

#[test]
fn criterion_1_constructions_match_formulas() {
    let mut g = Gate::new("criterion 1: divisor-set sizes equal the formulas for n <= 24");
    for n in 1..=24u32 {
        for d in divisors(n) {
            for m in 1..=n {
                let a = construct_a(n, m, d).unwrap();
                for h in 1..=m {
                    let restricted = a.restricted_sumset(h).len();
                    g.check(restricted == f_hat_d(n, m, h, d).unwrap(), || {
                        format!("restricted n={n} m={m} h={h} d={d}: {restricted}")
                    });
                    let unrestricted = a.unrestricted_sumset(h).unwrap().len() as i64;
                    let expected =
                        (n as i64).min(f_d(n, m, h, d).unwrap()).min((h * m - h + 1) as i64);
                    g.check(unrestricted == expected, || {
                        format!("unrestricted n={n} m={m} h={h} d={d}: {unrestricted}")
                    });
                }
            }
        }
    }
    g.finish();
}

#[test]
fn criterion_2_named_values_and_witnesses() {
    let mut g = Gate::new("criterion 2: named bound values, minima, and witness sizes");
    for &(n, m, h, uh, rho) in
        &[(12u32, 7u32, 2u32, 11u32, 10u32), (10, 6, 3, 10, 9), (15, 8, 3, 15, 14)]
    {
        let bound = u_hat(n, m, h).unwrap().value;
        g.check(bound == uh, || format!("u_hat({n},{m},{h}) = {bound}"));
        let rec = rho_hat_exact(n, m, h, None).unwrap();
        g.check(rec.status == SearchStatus::Exact && rec.rho_hat == rho, || {
            format!("rho_hat({n},{m},{h}) = {} ({:?})", rec.rho_hat, rec.status)
        });
        let fam = special_family(h, n, m).expect("a named two-block family");
        let size = construct_b(&fam.b).unwrap().restricted_sumset(h).len();
        g.check(size == rho && fam.claimed == rho, || {
            format!("family witness ({n},{m},{h}): size {size}, claimed {}", fam.claimed)
        });
    }
    g.finish();
}

fn gap_classification(n_max: u32, label: &'static str) {
    let mut g = Gate::new(label);
    let rows = rhohat::verify::audit_range(n_max, search_table()).unwrap();
    for row in rows {
        let explained = matches!(
            row.classification,
            Classification::Equal
                | Classification::GapOnePairFamily
                | Classification::GapOneTripleSixFamily
                | Classification::GapOneOddFoldFamily
        );
        g.check(explained, || {
            format!(
                "cell ({},{},{}): gap {:?}, classified {:?}",
                row.n, row.m, row.h, row.gap, row.classification
            )
        });
    }
    g.finish();
}

#[test]
fn criterion_3_gaps_are_family_explained_quick() {
    gap_classification(
        20,
        "criterion 3: every minimum is u_hat or a family-matched u_hat - 1 (n <= 20)",
    );
}

#[test]
fn criterion_3_gaps_are_family_explained_long() {
    gap_classification(
        24,
        "criterion 3 (long suite): every minimum is u_hat or a family-matched u_hat - 1 (n <= 24)",
    );
}

#[test]
fn criterion_4_prime_orders() {
    let opts = VerifyOptions { threads: threads(), budget: None };
    let rows = check_prime_values(17, search_table(), &opts).unwrap();
    let mut g = Gate::new("criterion 4: prime-order minima equal min(p, h(m-h)+1) for p <= 17");
    for r in &rows {
        g.check(r.pass, || {
            format!("{} {}: expected {}, got {}", r.check, r.params, r.expected, r.got)
        });
    }
    g.finish();
}

#[test]
fn criterion_5_half_range_and_critical_number() {
    let opts = VerifyOptions { threads: threads(), budget: None };
    let mut rows = check_half_range(20, search_table(), &opts).unwrap();
    rows.extend(check_critical_number(20, search_table(), &opts).unwrap());
    let mut g =
        Gate::new("criterion 5: half-range minima and the pair-critical number for n <= 20");
    for r in &rows {
        g.check(r.pass, || {
            format!("{} {}: expected {}, got {}", r.check, r.params, r.expected, r.got)
        });
    }
    g.finish();
}

#[test]
fn criterion_6_closed_forms_match_divisor_minimum() {
    let mut g = Gate::new(
        "criterion 6: pair and triple closed forms equal the divisor minimum for n <= 40",
    );
    for n in 3..=40u32 {
        for m in 3..=n {
            let closed = u_hat_pair(n, m).unwrap();
            let general = u_hat(n, m, 2).unwrap().value;
            g.check(closed == general, || format!("pair n={n} m={m}: {closed} vs {general}"));
        }
    }
    for n in 4..=40u32 {
        for m in 4..=n {
            let closed = u_hat_triple(n, m).unwrap();
            let general = u_hat(n, m, 3).unwrap().value;
            g.check(closed == general, || format!("triple n={n} m={m}: {closed} vs {general}"));
        }
    }
    g.finish();
}

#[test]
fn criterion_7_counterexample_families() {
    let mut g =
        Gate::new("criterion 7: doubling family and prime-power pairs beat the folklore bound");
    for k in 1..=4u32 {
        let a = product_doubling_example(k, 3).unwrap();
        let m = a.len();
        let size = a.restricted_sumset(2).len();
        g.check(size == 3 * (1u32 << k) - 2, || format!("k={k}: size {size}"));
        g.check(m == 1u32 << (k + 1), || format!("k={k}: m {m}"));
        let order = a.group().order();
        g.check(size < order - 1 && 2 * size < 3 * m, || {
            format!("k={k}: {size} not below min({}, 3*{m}/2)", order - 1)
        });
    }
    for &(p, t) in &[(3u32, 2u32), (5, 2)] {
        let gap = prime_power_gap_example(p, t).unwrap();
        let rec = rho_hat_exact(gap.n, gap.m, 2, None).unwrap();
        g.check(rec.status == SearchStatus::Exact, || format!("p={p} t={t}: not exact"));
        let bound = 2 * gap.m - 3;
        let u_value = u(gap.n, gap.m, 2).unwrap().value;
        g.check(rec.rho_hat <= bound && bound < u_value.min(2 * gap.m - 2), || {
            format!("p={p} t={t}: rho {} bound {bound} u {u_value}", rec.rho_hat)
        });
    }
    g.finish();
}

/// Sums of h distinct elements by direct enumeration of h-combinations.
fn enumerate_restricted(group: &Group, elems: &[u32], h: usize) -> BTreeSet<u32> {
    let mut out = BTreeSet::new();
    if h > elems.len() {
        return out;
    }
    if h == 0 {
        out.insert(0);
        return out;
    }
    let mut idx: Vec<usize> = (0..h).collect();
    loop {
        out.insert(idx.iter().fold(0, |acc, &i| group.add(acc, elems[i])));
        let mut i = h;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + elems.len() - h {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..h {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[test]
fn criterion_8_property_suites() {
    let mut g = Gate::new("criterion 8: structural sumset laws on exhaustive small ranges");

    // containment, reflection, affine equivariance, and canonicalization on
    // every nonempty subset of Z_n for n <= 9
    for n in 1..=9u32 {
        let group = Group::cyclic(n).unwrap();
        for bits in 1u32..(1 << n) {
            let set =
                GroupSubset::new(group.clone(), (0..n).filter(|&e| bits >> e & 1 == 1)).unwrap();
            let m = set.len();
            let sums: Vec<GroupSubset> = (0..=m).map(|h| set.restricted_sumset(h)).collect();
            let sigma = set.element_sum();
            for h in 1..=m {
                let restricted = &sums[h as usize];
                let unrestricted = set.unrestricted_sumset(h).unwrap();
                g.check(restricted.elements().iter().all(|&e| unrestricted.contains(e)), || {
                    format!("containment n={n} set={set} h={h}")
                });
                let reflected = restricted.affine_image(n - 1, sigma).unwrap();
                g.check(reflected == sums[(m - h) as usize], || {
                    format!("reflection n={n} set={set} h={h}")
                });
            }
            // dropping an element can only shrink each layer
            for &e in set.elements().iter().skip(1) {
                let smaller =
                    GroupSubset::new(group.clone(), set.elements().into_iter().filter(|&x| x != e))
                        .unwrap();
                for h in 1..m {
                    let sub = smaller.restricted_sumset(h);
                    g.check(sub.elements().iter().all(|&x| sums[h as usize].contains(x)), || {
                        format!("monotone n={n} set={set} drop={e} h={h}")
                    });
                }
            }
            // every affine image has the same canonical form and layer sizes
            let canon = set.canonical_form().unwrap();
            g.check(canon.canonical_form().unwrap() == canon, || {
                format!("canonical not idempotent n={n} set={set}")
            });
            let h_probe = 2.min(m);
            for a in units(n) {
                for b in 0..n {
                    let image = set.affine_image(a, b).unwrap();
                    g.check(
                        image.restricted_sumset(h_probe).len() == sums[h_probe as usize].len(),
                        || format!("affine size n={n} set={set} a={a} b={b}"),
                    );
                    g.check(image.canonical_form().unwrap() == canon, || {
                        format!("orbit form n={n} set={set} a={a} b={b}")
                    });
                }
            }
        }
    }

    // prescribed-sum subsets: size, distinctness, range, and sum for d <= 20
    for d in 2..=20u32 {
        for t in 1..d {
            for j in 0..d {
                let set = prescribed_sum_subset(d, t, j).unwrap();
                let distinct: BTreeSet<u32> = set.iter().copied().collect();
                let valid = set.len() as u32 == t
                    && distinct.len() == set.len()
                    && set.iter().all(|&x| x < d)
                    && set.iter().sum::<u32>() % d == j;
                g.check(valid, || format!("prescribed sum d={d} t={t} j={j}: {set:?}"));
            }
        }
    }

    // span quantities count the cosets the divisor sets meet, for n <= 24
    for n in 1..=24u32 {
        for d in divisors(n) {
            for m in 1..=n {
                let a = construct_a(n, m, d).unwrap();
                for h in 1..m {
                    let q = n / d;
                    let met: BTreeSet<u32> =
                        a.restricted_sumset(h).elements().into_iter().map(|e| e % q).collect();
                    let span = span_quantities(n, m, h, d).unwrap();
                    g.check(met.len() as i64 == span.coset_span.min(q as i64), || {
                        format!("span n={n} m={m} h={h} d={d}")
                    });
                }
            }
        }
    }

    // the layered DP equals brute-force enumeration for n <= 12
    for n in 1..=12u32 {
        let group = Group::cyclic(n).unwrap();
        for bits in 1u32..(1 << n) {
            let set =
                GroupSubset::new(group.clone(), (0..n).filter(|&e| bits >> e & 1 == 1)).unwrap();
            let elems = set.elements();
            for h in 0..=set.len() {
                let direct = enumerate_restricted(&group, &elems, h as usize);
                let dp: BTreeSet<u32> = set.restricted_sumset(h).elements().into_iter().collect();
                g.check(dp == direct, || format!("dp-vs-enum n={n} set={set} h={h}"));
            }
        }
    }

    g.finish();
}

#[test]
fn criterion_9_table_determinism() {
    let mut g = Gate::new("criterion 9: identical cache files across thread counts, clean resume");
    let dir = std::env::temp_dir().join(format!("rhohat-acceptance-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let one = dir.join("threads-1.jsonl");
    let eight = dir.join("threads-8.jsonl");

    let mut cache1 = ResultsCache::open(&one).unwrap();
    let summary1 =
        rho_hat_table(&TableOptions { n_max: 16, budget: None, threads: 1 }, &mut cache1, |_| {})
            .unwrap();
    let mut cache8 = ResultsCache::open(&eight).unwrap();
    let summary8 =
        rho_hat_table(&TableOptions { n_max: 16, budget: None, threads: 8 }, &mut cache8, |_| {})
            .unwrap();
    g.check(summary1 == summary8, || format!("summaries differ: {summary1:?} vs {summary8:?}"));
    let bytes1 = fs::read(&one).unwrap();
    let bytes8 = fs::read(&eight).unwrap();
    g.check(!bytes1.is_empty() && bytes1 == bytes8, || "cache files differ".into());

    // resuming over the finished file adds nothing and conflicts with nothing
    let mut resumed = ResultsCache::open(&eight).unwrap();
    let again =
        rho_hat_table(&TableOptions { n_max: 16, budget: None, threads: 8 }, &mut resumed, |_| {})
            .unwrap();
    g.check(again.computed == 0 && again.exhausted == 0, || {
        format!("resume recomputed: {again:?}")
    });
    g.check(fs::read(&eight).unwrap() == bytes8, || "resume changed the cache file".into());

    fs::remove_dir_all(&dir).ok();
    g.finish();
}
