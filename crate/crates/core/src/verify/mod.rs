//! Deciding whether a set freezes an image.
//!
//! `A ⊆ X` is a freezing set for `(X, c_u)` when the identity is the only
//! continuous self-map of `X` fixing `A` pointwise. [`verify_freezing`]
//! searches for a non-identity continuous map fixing `A` with pruned
//! backtracking; [`oracle_verify`] answers the same question by plain
//! enumeration and exists to cross-check it.

mod propagate;
mod search;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::construct::{find_close_neighbor, is_close_neighbor};
use crate::error::{FreezeError, Result};
use crate::lattice::{DigitalImage, Point};
use crate::maps::{enumerate_continuous_selfmaps, SelfMap};

use propagate::{Context, State};
use search::SearchResult;

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

/// Individually switchable pruning rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PruneRule {
    /// `d(f(z), f(x)) <= d(z, x)` once `f(x)` is decided.
    Distance,
    /// Two fixed points joined by a unique shortest path fix the whole path.
    Geodesic,
    /// A point moved past a neighbor along an axis pushes that neighbor the same way.
    Pulling,
    /// A cube whose boundary is fixed is fixed throughout.
    Interior,
    /// A point outside `A` with a close neighbor yields an immediate witness.
    CloseNeighbor,
}

impl PruneRule {
    pub const ALL: [PruneRule; 5] = [
        PruneRule::Distance,
        PruneRule::Geodesic,
        PruneRule::Pulling,
        PruneRule::Interior,
        PruneRule::CloseNeighbor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PruneRule::Distance => "distance",
            PruneRule::Geodesic => "geodesic",
            PruneRule::Pulling => "pulling",
            PruneRule::Interior => "interior",
            PruneRule::CloseNeighbor => "close-neighbor",
        }
    }
}

impl fmt::Display for PruneRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PruneRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        PruneRule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = PruneRule::ALL.iter().map(|r| r.name()).collect();
                format!("unknown pruning rule `{s}` (expected one of {})", names.join(", "))
            })
    }
}

/// Set of enabled [`PruneRule`]s.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PruneRules(u8);

impl PruneRules {
    pub fn all() -> Self {
        PruneRules((1 << PruneRule::ALL.len()) - 1)
    }

    pub fn none() -> Self {
        PruneRules(0)
    }

    pub fn with(self, rule: PruneRule) -> Self {
        PruneRules(self.0 | (1 << rule as u8))
    }

    pub fn without(self, rule: PruneRule) -> Self {
        PruneRules(self.0 & !(1 << rule as u8))
    }

    pub fn enabled(self, rule: PruneRule) -> bool {
        self.0 & (1 << rule as u8) != 0
    }

    /// Every combination of rules, for equivalence sweeps.
    pub fn every_combination() -> impl Iterator<Item = PruneRules> {
        (0..1u8 << PruneRule::ALL.len()).map(PruneRules)
    }
}

impl Default for PruneRules {
    fn default() -> Self {
        Self::all()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    /// Maximum number of search nodes before giving up as inconclusive.
    pub budget: u64,
    /// Worker threads for the seed search.
    pub threads: usize,
    pub rules: PruneRules,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            budget: DEFAULT_NODE_BUDGET,
            threads: 1,
            rules: PruneRules::all(),
        }
    }
}

/// Counters collected during a verification.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Search nodes expanded (seed and branch assignments).
    pub nodes: u64,
    /// Seeds `(x, v)` tried.
    pub seeds: u64,
    /// Domain values removed by the continuity constraint itself.
    pub arc_removals: u64,
    by_rule: [u64; PruneRule::ALL.len()],
}

impl SearchStats {
    pub fn removed_by(&self, rule: PruneRule) -> u64 {
        self.by_rule[rule as usize]
    }

    pub fn rule_removals(&self) -> impl Iterator<Item = (PruneRule, u64)> + '_ {
        PruneRule::ALL.into_iter().map(|r| (r, self.removed_by(r)))
    }

    pub(crate) fn add(&mut self, rule: PruneRule, removed: u64) {
        self.by_rule[rule as usize] += removed;
    }

    pub(crate) fn merge(&mut self, other: &SearchStats) {
        self.nodes += other.nodes;
        self.seeds += other.seeds;
        self.arc_removals += other.arc_removals;
        for (a, b) in self.by_rule.iter_mut().zip(other.by_rule) {
            *a += b;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FreezeStatus {
    Frozen,
    NotFrozen,
}

impl fmt::Display for FreezeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FreezeStatus::Frozen => "frozen",
            FreezeStatus::NotFrozen => "not-frozen",
        })
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOutcome {
    pub status: FreezeStatus,
    /// A continuous non-identity self-map fixing the set; present iff not frozen.
    pub witness: Option<SelfMap>,
    pub stats: SearchStats,
}

impl VerifyOutcome {
    pub fn is_frozen(&self) -> bool {
        self.status == FreezeStatus::Frozen
    }

    fn frozen(stats: SearchStats) -> Self {
        VerifyOutcome {
            status: FreezeStatus::Frozen,
            witness: None,
            stats,
        }
    }

    fn not_frozen(witness: SelfMap, stats: SearchStats) -> Self {
        VerifyOutcome {
            status: FreezeStatus::NotFrozen,
            witness: Some(witness),
            stats,
        }
    }
}

/// True when `f` is a continuous non-identity self-map of `image` fixing `fixed`.
pub fn is_valid_witness(image: &DigitalImage, fixed: &[usize], f: &SelfMap) -> bool {
    **f.image() == *image && f.is_continuous() && !f.is_identity() && f.fixes_indices(fixed)
}

/// Decides whether `a` is a freezing set for `x` under `x`'s own adjacency.
pub fn verify_freezing(x: &Arc<DigitalImage>, a: &[Point]) -> Result<VerifyOutcome> {
    verify_freezing_with(x, a, &VerifyConfig::default())
}

pub fn verify_freezing_with(
    x: &Arc<DigitalImage>,
    a: &[Point],
    config: &VerifyConfig,
) -> Result<VerifyOutcome> {
    let fixed = x.indices_of(a)?;
    verify_indices(x, &fixed, config)
}

fn verify_indices(
    x: &Arc<DigitalImage>,
    fixed: &[usize],
    config: &VerifyConfig,
) -> Result<VerifyOutcome> {
    let mut stats = SearchStats::default();
    let n = x.len();

    if config.rules.enabled(PruneRule::CloseNeighbor) {
        let mut in_set = vec![false; n];
        for &i in fixed {
            in_set[i] = true;
        }
        for p in (0..n).filter(|&p| !in_set[p]) {
            if let Some(q) = find_close_neighbor(x, p) {
                debug_assert!(is_close_neighbor(x, p, q));
                let mut assignment: Vec<usize> = (0..n).collect();
                assignment[p] = q;
                stats.add(PruneRule::CloseNeighbor, 1);
                let witness = SelfMap::new(x.clone(), assignment)?;
                return Ok(VerifyOutcome::not_frozen(witness, stats));
            }
        }
    }

    let ctx = Context::new(x, config.rules);
    let mut root = State::root(n, fixed);
    propagate::propagate(&ctx, &mut root, 0..n, &mut stats)
        .expect("the identity survives every sound pruning");
    if (0..n).all(|i| root.is_fixed(i)) {
        return Ok(VerifyOutcome::frozen(stats));
    }
    match search::find_witness(&ctx, root, fixed, config.budget, config.threads, &mut stats) {
        SearchResult::Witness(assignment) => {
            let witness = SelfMap::new(x.clone(), assignment)?;
            assert!(
                is_valid_witness(x, fixed, &witness),
                "search produced an invalid witness"
            );
            Ok(VerifyOutcome::not_frozen(witness, stats))
        }
        SearchResult::Exhausted => Ok(VerifyOutcome::frozen(stats)),
        SearchResult::OverBudget => Err(FreezeError::Inconclusive {
            nodes: stats.nodes.min(config.budget),
            budget: config.budget,
        }),
    }
}

/// The same decision as [`verify_freezing`], by enumerating continuous
/// self-maps fixing `a` until a non-identity one appears. No pruning beyond
/// continuity; guarded to at most 40 points.
pub fn oracle_verify(x: &Arc<DigitalImage>, a: &[Point]) -> Result<VerifyOutcome> {
    let mut stats = SearchStats::default();
    for f in enumerate_continuous_selfmaps(x, a)? {
        stats.nodes += 1;
        if !f.is_identity() {
            return Ok(VerifyOutcome::not_frozen(f, stats));
        }
    }
    Ok(VerifyOutcome::frozen(stats))
}

/// Where a removal certificate came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateSource {
    /// A caller-supplied map, checked before being accepted.
    Supplied,
    /// Found by search.
    Search,
}

/// Outcome of trying to drop one point from a freezing set.
#[derive(Clone, Debug)]
pub struct Removal {
    pub point: Point,
    /// A map fixing the rest of the set, when the point cannot be dropped.
    pub witness: Option<SelfMap>,
    pub source: CertificateSource,
}

#[derive(Clone, Debug)]
pub struct MinimalityReport {
    pub minimal: bool,
    pub removals: Vec<Removal>,
}

impl MinimalityReport {
    /// Points whose removal leaves a freezing set.
    pub fn redundant(&self) -> impl Iterator<Item = &Point> {
        self.removals
            .iter()
            .filter(|r| r.witness.is_none())
            .map(|r| &r.point)
    }
}

fn require_frozen(x: &Arc<DigitalImage>, fixed: &[usize], config: &VerifyConfig) -> Result<()> {
    let outcome = verify_indices(x, fixed, config)?;
    match outcome.witness {
        None => Ok(()),
        Some(w) => Err(FreezeError::NotFrozen {
            witness: Box::new(w),
        }),
    }
}

/// Checks that no proper subset `A \ {a}` freezes `x`, reporting a witness for
/// each removal.
pub fn is_minimal_freezing(
    x: &Arc<DigitalImage>,
    a: &[Point],
    config: &VerifyConfig,
) -> Result<MinimalityReport> {
    is_minimal_freezing_with(x, a, config, |_| None)
}

/// Like [`is_minimal_freezing`], but first asks `certify` for a witness for
/// each removed point. A supplied map is used only if it is continuous,
/// non-identity and fixes the remaining points; otherwise the search runs.
pub fn is_minimal_freezing_with(
    x: &Arc<DigitalImage>,
    a: &[Point],
    config: &VerifyConfig,
    certify: impl Fn(&Point) -> Option<SelfMap>,
) -> Result<MinimalityReport> {
    let fixed = x.indices_of(a)?;
    require_frozen(x, &fixed, config)?;
    let mut removals = Vec::with_capacity(fixed.len());
    for (k, &p) in fixed.iter().enumerate() {
        let rest: Vec<usize> = fixed
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(_, &i)| i)
            .collect();
        let point = x.point(p).clone();
        if let Some(w) = certify(&point).filter(|w| is_valid_witness(x, &rest, w)) {
            removals.push(Removal {
                point,
                witness: Some(w),
                source: CertificateSource::Supplied,
            });
            continue;
        }
        let outcome = verify_indices(x, &rest, config)?;
        removals.push(Removal {
            point,
            witness: outcome.witness,
            source: CertificateSource::Search,
        });
    }
    let minimal = removals.iter().all(|r| r.witness.is_some());
    Ok(MinimalityReport { minimal, removals })
}

#[derive(Clone, Debug)]
pub struct MinimizeReport {
    /// Inclusion-minimal freezing subset of the input.
    pub set: Vec<Point>,
    /// Points dropped, in the order they were removed.
    pub removed: Vec<Point>,
    /// For each kept point, a map fixing the rest of `set` but not the point.
    pub certificates: Vec<(Point, SelfMap)>,
}

/// Drops points of `a` in canonical order whenever the rest still freezes.
/// A kept point stays non-removable as the set shrinks, so one pass gives an
/// inclusion-minimal result.
pub fn greedy_minimize(
    x: &Arc<DigitalImage>,
    a: &[Point],
    config: &VerifyConfig,
) -> Result<MinimizeReport> {
    let fixed = x.indices_of(a)?;
    require_frozen(x, &fixed, config)?;
    let mut current = vec![false; x.len()];
    for &i in &fixed {
        current[i] = true;
    }
    let mut removed = Vec::new();
    let mut kept_witness = Vec::new();
    for &p in &fixed {
        if let Some(q) = find_close_neighbor(x, p) {
            let mut assignment: Vec<usize> = (0..x.len()).collect();
            assignment[p] = q;
            kept_witness.push((p, SelfMap::new(x.clone(), assignment)?));
            continue;
        }
        current[p] = false;
        let rest: Vec<usize> = (0..x.len()).filter(|&i| current[i]).collect();
        let outcome = verify_indices(x, &rest, config)?;
        match outcome.witness {
            None => removed.push(x.point(p).clone()),
            Some(w) => {
                current[p] = true;
                kept_witness.push((p, w));
            }
        }
    }
    let mut certificates: Vec<(Point, SelfMap)> = kept_witness
        .into_iter()
        .map(|(p, w)| (x.point(p).clone(), w))
        .collect();
    certificates.sort_by(|a, b| a.0.cmp(&b.0));
    let set = (0..x.len())
        .filter(|&i| current[i])
        .map(|i| x.point(i).clone())
        .collect();
    Ok(MinimizeReport {
        set,
        removed,
        certificates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::CubeSpec;

    fn cube(dim: usize, u: usize, hi: i64) -> Arc<DigitalImage> {
        Arc::new(CubeSpec::new(vec![0; dim], vec![hi; dim]).unwrap().to_image(u).unwrap())
    }

    fn subsets(x: &DigitalImage) -> impl Iterator<Item = Vec<Point>> + '_ {
        (0u32..1 << x.len()).map(move |mask| {
            (0..x.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| x.point(i).clone())
                .collect()
        })
    }

    #[test]
    fn rule_names_round_trip() {
        for r in PruneRule::ALL {
            assert_eq!(r.name().parse::<PruneRule>().unwrap(), r);
        }
        assert!("bogus".parse::<PruneRule>().is_err());
        assert_eq!(PruneRules::every_combination().count(), 32);
        assert!(!PruneRules::all().without(PruneRule::Pulling).enabled(PruneRule::Pulling));
    }

    #[test]
    fn interval_with_one_endpoint_is_not_frozen() {
        let x = cube(1, 1, 2);
        let out = verify_freezing(&x, &[Point::from([0])]).unwrap();
        assert_eq!(out.status, FreezeStatus::NotFrozen);
        let w = out.witness.unwrap();
        assert!(is_valid_witness(&x, &[0], &w));
        // the oracle agrees: such maps exist
        assert!(!oracle_verify(&x, &[Point::from([0])]).unwrap().is_frozen());
    }

    #[test]
    fn whole_image_freezes() {
        for x in [cube(2, 1, 2), cube(2, 2, 3), cube(1, 1, 0)] {
            let out = verify_freezing(&x, x.points()).unwrap();
            assert!(out.is_frozen());
            assert!(out.witness.is_none());
            assert_eq!(out.stats.nodes, 0);
        }
    }

    #[test]
    fn endpoints_freeze_interval_without_branching() {
        let x = cube(1, 1, 2);
        let out = verify_freezing(&x, &[Point::from([0]), Point::from([2])]).unwrap();
        assert!(out.is_frozen());
        assert_eq!(out.stats.nodes, 0);
    }

    #[test]
    fn empty_set_on_connected_images_is_not_frozen() {
        for x in [cube(1, 1, 1), cube(2, 1, 2), cube(3, 3, 1)] {
            assert!(!oracle_verify(&x, &[]).unwrap().is_frozen());
            let out = verify_freezing_with(&x, &[], &VerifyConfig { rules: PruneRules::none(), ..Default::default() }).unwrap();
            assert!(!out.is_frozen());
        }
    }

    #[test]
    fn rejects_points_outside_image() {
        let x = cube(2, 1, 1);
        assert!(matches!(
            verify_freezing(&x, &[Point::from([3, 3])]),
            Err(FreezeError::PointNotInImage(_))
        ));
    }

    #[test]
    fn tiny_budget_is_inconclusive() {
        let x = cube(2, 1, 5);
        let a = [Point::from([0, 0])];
        // with no pruning, extending a seed to a full witness takes many nodes
        let cfg = VerifyConfig {
            budget: 10,
            rules: PruneRules::none(),
            ..Default::default()
        };
        assert!(matches!(
            verify_freezing_with(&x, &a, &cfg),
            Err(FreezeError::Inconclusive { nodes: 10, budget: 10 })
        ));
        let roomy = VerifyConfig { rules: PruneRules::none(), ..Default::default() };
        assert!(!verify_freezing_with(&x, &a, &roomy).unwrap().is_frozen());
    }

    #[test]
    fn every_rule_combination_agrees_on_small_images() {
        for x in [cube(2, 1, 2), cube(2, 2, 1), cube(1, 1, 3)] {
            for a in subsets(&x) {
                let oracle = oracle_verify(&x, &a).unwrap().status;
                for rules in PruneRules::every_combination() {
                    let cfg = VerifyConfig { rules, ..Default::default() };
                    let out = verify_freezing_with(&x, &a, &cfg).unwrap();
                    assert_eq!(out.status, oracle, "rules {rules:?} set {a:?}");
                    if let Some(w) = &out.witness {
                        assert!(is_valid_witness(&x, &x.indices_of(&a).unwrap(), w));
                    }
                }
            }
        }
    }

    #[test]
    fn threads_do_not_change_status() {
        let x = cube(2, 1, 3);
        for a in [
            CubeSpec::new(vec![0, 0], vec![3, 3]).unwrap().corners(),
            vec![Point::from([0, 0]), Point::from([3, 3])],
            vec![Point::from([0, 0]), Point::from([0, 3]), Point::from([3, 3])],
        ] {
            let one = verify_freezing(&x, &a).unwrap();
            for threads in [2, 4] {
                let cfg = VerifyConfig { threads, ..Default::default() };
                let many = verify_freezing_with(&x, &a, &cfg).unwrap();
                assert_eq!(one.status, many.status);
                if let Some(w) = &many.witness {
                    assert!(is_valid_witness(&x, &x.indices_of(&a).unwrap(), w));
                }
            }
        }
    }

    #[test]
    fn disconnected_images() {
        let x = Arc::new(
            DigitalImage::from_points(1, [[0, 0], [1, 0], [5, 5], [5, 6]].map(Point::from)).unwrap(),
        );
        for a in subsets(&x) {
            assert_eq!(
                verify_freezing(&x, &a).unwrap().status,
                oracle_verify(&x, &a).unwrap().status
            );
        }
    }

    #[test]
    fn minimality_examples() {
        let x = cube(2, 1, 3);
        let corners = CubeSpec::new(vec![0, 0], vec![3, 3]).unwrap().corners();
        let report = is_minimal_freezing(&x, &corners, &VerifyConfig::default()).unwrap();
        assert!(report.minimal);
        assert_eq!(report.removals.len(), 4);
        assert_eq!(report.redundant().count(), 0);

        let mut more = corners.clone();
        more.push(Point::from([1, 1]));
        let report = is_minimal_freezing(&x, &more, &VerifyConfig::default()).unwrap();
        assert!(!report.minimal);
        assert_eq!(report.redundant().collect::<Vec<_>>(), vec![&Point::from([1, 1])]);

        assert!(matches!(
            is_minimal_freezing(&x, &corners[..2], &VerifyConfig::default()),
            Err(FreezeError::NotFrozen { .. })
        ));
    }

    #[test]
    fn bogus_certificates_fall_back_to_search() {
        let x = cube(2, 1, 3);
        let corners = CubeSpec::new(vec![0, 0], vec![3, 3]).unwrap().corners();
        let id = SelfMap::identity(x.clone());
        let report =
            is_minimal_freezing_with(&x, &corners, &VerifyConfig::default(), |_| Some(id.clone()))
                .unwrap();
        assert!(report.minimal);
        assert!(report.removals.iter().all(|r| r.source == CertificateSource::Search));
    }

    #[test]
    fn greedy_examples() {
        let line = cube(1, 1, 1);
        let r = greedy_minimize(&line, line.points(), &VerifyConfig::default()).unwrap();
        assert_eq!(r.set, line.points());
        assert!(r.removed.is_empty());

        let x = cube(2, 1, 3);
        let corners = CubeSpec::new(vec![0, 0], vec![3, 3]).unwrap().corners();
        let r = greedy_minimize(&x, &corners, &VerifyConfig::default()).unwrap();
        assert_eq!(r.set, corners);

        let r = greedy_minimize(&x, x.points(), &VerifyConfig::default()).unwrap();
        assert!(verify_freezing(&x, &r.set).unwrap().is_frozen());
        for (p, w) in &r.certificates {
            let rest: Vec<Point> = r.set.iter().filter(|q| *q != p).cloned().collect();
            assert!(is_valid_witness(&x, &x.indices_of(&rest).unwrap(), w));
        }
        assert_eq!(r.certificates.len(), r.set.len());
    }
}
