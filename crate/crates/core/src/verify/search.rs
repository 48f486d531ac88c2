//! Seed-driven backtracking for a non-identity continuous self-map.
//!
//! A seed is a pair `(x, v)` with `v != x` still in `dom(x)`. Committing to
//! `f(x) = v` and extending it to a full continuous map yields a witness.
//! When a seed fails, `v` is removed from `dom(x)` at the root, which also
//! tightens every later seed. The set freezes once every seed has failed.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;

use super::propagate::{propagate, Context, State};
use super::SearchStats;

pub(crate) enum SearchResult {
    Witness(Vec<usize>),
    Exhausted,
    OverBudget,
}

struct Shared {
    nodes: AtomicU64,
    budget: u64,
    stop: AtomicBool,
    over_budget: AtomicBool,
    next_seed: AtomicUsize,
    witness: Mutex<Option<Vec<usize>>>,
}

impl Shared {
    /// Counts one node; false once the run must stop.
    fn tick(&self) -> bool {
        if self.stop.load(Ordering::Relaxed) {
            return false;
        }
        if self.nodes.fetch_add(1, Ordering::Relaxed) + 1 > self.budget {
            self.over_budget.store(true, Ordering::Relaxed);
            self.stop.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }
}

/// Seeds ordered by decreasing distance of `x` from the fixed set; points
/// unreachable from it come first.
fn seed_order(ctx: &Context<'_>, root: &State, fixed: &[usize]) -> Vec<(usize, usize)> {
    let n = ctx.len();
    let far: Vec<Option<u32>> = (0..n)
        .map(|x| fixed.iter().filter_map(|&a| ctx.dist(a, x)).min())
        .collect();
    let mut xs: Vec<usize> = (0..n).filter(|&x| !root.is_fixed(x)).collect();
    xs.sort_by_key(|&x| (std::cmp::Reverse(far[x].map_or(u64::MAX, u64::from)), x));
    xs.into_iter()
        .flat_map(|x| {
            root.doms[x]
                .ones()
                .filter(move |&v| v != x)
                .map(move |v| (x, v))
                .collect::<Vec<_>>()
        })
        .collect()
}

pub(crate) fn find_witness(
    ctx: &Context<'_>,
    root: State,
    fixed: &[usize],
    budget: u64,
    threads: usize,
    stats: &mut SearchStats,
) -> SearchResult {
    let seeds = seed_order(ctx, &root, fixed);
    let shared = Shared {
        nodes: AtomicU64::new(0),
        budget,
        stop: AtomicBool::new(false),
        over_budget: AtomicBool::new(false),
        next_seed: AtomicUsize::new(0),
        witness: Mutex::new(None),
    };
    let threads = threads.max(1).min(seeds.len().max(1));
    if threads == 1 {
        worker(ctx, root, &seeds, &shared, stats);
    } else {
        let merged = Mutex::new(SearchStats::default());
        std::thread::scope(|scope| {
            for _ in 0..threads {
                let root = root.clone();
                let (seeds, shared, merged) = (&seeds, &shared, &merged);
                scope.spawn(move || {
                    let mut local = SearchStats::default();
                    worker(ctx, root, seeds, shared, &mut local);
                    merged.lock().expect("stats lock").merge(&local);
                });
            }
        });
        stats.merge(&merged.into_inner().expect("stats lock"));
    }
    stats.nodes += shared.nodes.load(Ordering::Relaxed);
    if let Some(w) = shared.witness.into_inner().expect("witness lock") {
        return SearchResult::Witness(w);
    }
    if shared.over_budget.load(Ordering::Relaxed) {
        return SearchResult::OverBudget;
    }
    SearchResult::Exhausted
}

fn worker(
    ctx: &Context<'_>,
    mut root: State,
    seeds: &[(usize, usize)],
    shared: &Shared,
    stats: &mut SearchStats,
) {
    loop {
        let k = shared.next_seed.fetch_add(1, Ordering::Relaxed);
        let Some(&(x, v)) = seeds.get(k) else { return };
        if shared.stop.load(Ordering::Relaxed) {
            return;
        }
        if !root.doms[x].contains(v) {
            continue;
        }
        stats.seeds += 1;
        if !shared.tick() {
            return;
        }
        let mut branch = root.clone();
        if branch.assign(x, v).is_ok() && propagate(ctx, &mut branch, [x], stats).is_ok() {
            match backtrack(ctx, branch, shared, stats) {
                Some(Some(sol)) => {
                    *shared.witness.lock().expect("witness lock") = Some(sol);
                    shared.stop.store(true, Ordering::Relaxed);
                    return;
                }
                Some(None) => {}
                None => return,
            }
        }
        if shared.stop.load(Ordering::Relaxed) {
            return;
        }
        // no continuous map sends x to v
        root.doms[x].set(v, false);
        propagate(ctx, &mut root, [x], stats)
            .expect("the identity survives every sound pruning");
    }
}

/// Depth-first extension of a consistent state. `Some(Some(_))` is a full
/// assignment, `Some(None)` means the subtree is empty, `None` means stop.
fn backtrack(
    ctx: &Context<'_>,
    state: State,
    shared: &Shared,
    stats: &mut SearchStats,
) -> Option<Option<Vec<usize>>> {
    // minimum remaining values, lowest index on ties
    let var = (0..ctx.len())
        .map(|x| (state.doms[x].count_ones(..), x))
        .filter(|&(c, _)| c > 1)
        .min();
    let Some((_, x)) = var else {
        return Some(state.solution());
    };
    for v in state.doms[x].ones() {
        if !shared.tick() {
            return None;
        }
        let mut child = state.clone();
        child.assign(x, v).expect("value taken from the domain");
        if propagate(ctx, &mut child, [x], stats).is_err() {
            continue;
        }
        match backtrack(ctx, child, shared, stats) {
            Some(None) => {}
            other => return other,
        }
    }
    Some(None)
}
