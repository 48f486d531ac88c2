//! Domain propagation for the continuous self-map search.
//!
//! Each point `x` carries the set of values `f(x)` may still take. The base
//! constraint is continuity: for adjacent `x, y`, `f(x)` and `f(y)` are equal
//! or adjacent. The remaining rules are sound consequences of continuity and
//! can be switched off individually.

use std::collections::VecDeque;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;

use super::{PruneRule, PruneRules, SearchStats};
use crate::lattice::{DigitalImage, ShortestPaths};

/// A cube inside the image with nonempty interior.
#[derive(Debug)]
struct InnerCube {
    boundary: Vec<usize>,
    interior: Vec<usize>,
}

/// Read-only data shared by every search branch (and every worker thread).
pub(crate) struct Context<'a> {
    pub image: &'a DigitalImage,
    pub rules: PruneRules,
    closed: Vec<FixedBitSet>,
    paths: Vec<OnceLock<ShortestPaths>>,
    cubes: Vec<InnerCube>,
    cubes_by_boundary_point: Vec<Vec<usize>>,
}

impl<'a> Context<'a> {
    pub fn new(image: &'a DigitalImage, rules: PruneRules) -> Self {
        let n = image.len();
        let closed = (0..n)
            .map(|v| {
                let mut s = FixedBitSet::with_capacity(n);
                s.insert(v);
                for &w in image.neighbor_indices(v) {
                    s.insert(w);
                }
                s
            })
            .collect();
        let cubes = if rules.enabled(PruneRule::Interior) {
            inner_cubes(image)
        } else {
            Vec::new()
        };
        let mut cubes_by_boundary_point = vec![Vec::new(); n];
        for (id, c) in cubes.iter().enumerate() {
            for &b in &c.boundary {
                cubes_by_boundary_point[b].push(id);
            }
        }
        Context {
            image,
            rules,
            closed,
            paths: (0..n).map(|_| OnceLock::new()).collect(),
            cubes,
            cubes_by_boundary_point,
        }
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn paths(&self, source: usize) -> &ShortestPaths {
        self.paths[source].get_or_init(|| self.image.shortest_paths(source))
    }

    pub fn dist(&self, a: usize, b: usize) -> Option<u32> {
        self.paths(a).dist[b]
    }
}

/// Greedily grown cubes: from each point as low corner, extend one axis at a
/// time while the new face stays inside the image. Only cubes with an
/// interior are kept.
fn inner_cubes(image: &DigitalImage) -> Vec<InnerCube> {
    let n = image.dim();
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for p in image.points() {
        let lo = p.coords().to_vec();
        let mut hi = lo.clone();
        let mut grew = true;
        while grew {
            grew = false;
            for axis in 0..n {
                let mut face_lo = lo.clone();
                let mut face_hi = hi.clone();
                face_lo[axis] = hi[axis] + 1;
                face_hi[axis] = hi[axis] + 1;
                let face = crate::construct::CubeSpec::new(face_lo, face_hi)
                    .expect("face bounds are ordered");
                if face.points().iter().all(|q| image.contains(q)) {
                    hi[axis] += 1;
                    grew = true;
                }
            }
        }
        if (0..n).any(|i| hi[i] - lo[i] < 2) || !seen.insert((lo.clone(), hi.clone())) {
            continue;
        }
        let cube = crate::construct::CubeSpec::new(lo, hi).expect("grown cube is ordered");
        let (mut boundary, mut interior) = (Vec::new(), Vec::new());
        for q in cube.points() {
            let idx = image.index_of(&q).expect("grown cube lies in the image");
            if cube.is_boundary_point(&q) {
                boundary.push(idx);
            } else {
                interior.push(idx);
            }
        }
        out.push(InnerCube { boundary, interior });
    }
    out
}

/// Mutable search state: the candidate image set of each point.
#[derive(Clone, Debug)]
pub(crate) struct State {
    pub doms: Vec<FixedBitSet>,
    /// Points whose singleton consequences have already been applied.
    settled: FixedBitSet,
    /// Points forced to be fixed, in the order they were discovered.
    fixed: Vec<usize>,
}

/// Raised when some domain becomes empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Conflict;

impl State {
    /// Root state: points of `fixed` map to themselves, all others are free.
    pub fn root(n: usize, fixed: &[usize]) -> Self {
        let mut full = FixedBitSet::with_capacity(n);
        full.insert_range(..);
        let mut doms = vec![full; n];
        for &a in fixed {
            doms[a].clear();
            doms[a].insert(a);
        }
        State {
            doms,
            settled: FixedBitSet::with_capacity(n),
            fixed: Vec::new(),
        }
    }

    pub fn singleton(&self, x: usize) -> Option<usize> {
        let mut it = self.doms[x].ones();
        let v = it.next()?;
        it.next().is_none().then_some(v)
    }

    pub fn is_fixed(&self, x: usize) -> bool {
        self.singleton(x) == Some(x)
    }

    /// The complete assignment, if every domain is a singleton.
    pub fn solution(&self) -> Option<Vec<usize>> {
        (0..self.doms.len()).map(|x| self.singleton(x)).collect()
    }

    /// Restricts `dom(x)` to `{v}`.
    pub fn assign(&mut self, x: usize, v: usize) -> Result<(), Conflict> {
        if !self.doms[x].contains(v) {
            return Err(Conflict);
        }
        self.doms[x].clear();
        self.doms[x].insert(v);
        Ok(())
    }
}

struct Worklist {
    queue: VecDeque<usize>,
    queued: FixedBitSet,
}

impl Worklist {
    fn new(n: usize) -> Self {
        Worklist {
            queue: VecDeque::new(),
            queued: FixedBitSet::with_capacity(n),
        }
    }

    fn push(&mut self, x: usize) {
        if !self.queued.put(x) {
            self.queue.push_back(x);
        }
    }

    fn pop(&mut self) -> Option<usize> {
        let x = self.queue.pop_front()?;
        self.queued.set(x, false);
        Some(x)
    }
}

/// Removes from `dom(z)` every value failing `keep`. Returns the number removed.
fn retain(
    state: &mut State,
    z: usize,
    work: &mut Worklist,
    keep: impl Fn(usize) -> bool,
) -> Result<u64, Conflict> {
    let drop: Vec<usize> = state.doms[z].ones().filter(|&v| !keep(v)).collect();
    if drop.is_empty() {
        return Ok(0);
    }
    for &v in &drop {
        state.doms[z].set(v, false);
    }
    if state.doms[z].is_clear() {
        return Err(Conflict);
    }
    work.push(z);
    Ok(drop.len() as u64)
}

/// Propagates to a fixpoint starting from the points in `changed`.
pub(crate) fn propagate(
    ctx: &Context<'_>,
    state: &mut State,
    changed: impl IntoIterator<Item = usize>,
    stats: &mut SearchStats,
) -> Result<(), Conflict> {
    let n = ctx.len();
    let mut work = Worklist::new(n);
    for x in changed {
        work.push(x);
    }
    while let Some(x) = work.pop() {
        if state.doms[x].is_clear() {
            return Err(Conflict);
        }
        let single = state.singleton(x);
        if let Some(w) = single {
            if !state.settled.put(x) {
                singleton_rules(ctx, state, x, w, &mut work, stats)?;
            }
        }
        // values adjacent-or-equal to some candidate of x
        let support = match single {
            Some(w) => ctx.closed[w].clone(),
            None => {
                let mut s = FixedBitSet::with_capacity(n);
                for v in state.doms[x].ones() {
                    s.union_with(&ctx.closed[v]);
                }
                s
            }
        };
        for &y in ctx.image.neighbor_indices(x) {
            let before = state.doms[y].count_ones(..);
            state.doms[y].intersect_with(&support);
            let after = state.doms[y].count_ones(..);
            if after < before {
                stats.arc_removals += (before - after) as u64;
                if after == 0 {
                    return Err(Conflict);
                }
                work.push(y);
            }
        }
    }
    Ok(())
}

/// Consequences of `f(x) = w` being decided.
fn singleton_rules(
    ctx: &Context<'_>,
    state: &mut State,
    x: usize,
    w: usize,
    work: &mut Worklist,
    stats: &mut SearchStats,
) -> Result<(), Conflict> {
    let image = ctx.image;
    let rules = ctx.rules;

    if rules.enabled(PruneRule::Distance) {
        // d(f(z), f(x)) <= d(z, x): a path of length m maps to a walk of length <= m
        let from_x = &ctx.paths(x).dist;
        let from_w = &ctx.paths(w).dist;
        for (z, &dz) in from_x.iter().enumerate() {
            if z == x {
                continue;
            }
            if let Some(r) = dz {
                let removed = retain(state, z, work, |v| from_w[v].is_some_and(|d| d <= r))?;
                stats.add(PruneRule::Distance, removed);
            }
        }
    }

    if rules.enabled(PruneRule::Pulling) && w != x {
        // moving x past a neighbor on axis i drags that neighbor along
        let xc = image.point(x).coords();
        let wc = image.point(w).coords();
        for &q in image.neighbor_indices(x) {
            let qc = image.point(q).coords();
            for i in 0..image.dim() {
                let removed = if wc[i] > xc[i] && xc[i] > qc[i] {
                    let bound = qc[i];
                    retain(state, q, work, |v| image.point(v).coords()[i] > bound)?
                } else if wc[i] < xc[i] && xc[i] < qc[i] {
                    let bound = qc[i];
                    retain(state, q, work, |v| image.point(v).coords()[i] < bound)?
                } else {
                    0
                };
                stats.add(PruneRule::Pulling, removed);
            }
        }
    }

    if w != x {
        return Ok(());
    }

    if rules.enabled(PruneRule::Geodesic) {
        let sp = ctx.paths(x);
        for k in 0..state.fixed.len() {
            let y = state.fixed[k];
            if let Some(path) = sp.unique_path(image, y) {
                for p in path {
                    let removed = retain(state, p, work, |v| v == p)?;
                    stats.add(PruneRule::Geodesic, removed);
                }
            }
        }
    }
    state.fixed.push(x);

    if rules.enabled(PruneRule::Interior) {
        for &c in &ctx.cubes_by_boundary_point[x] {
            let cube = &ctx.cubes[c];
            if cube.boundary.iter().all(|&b| state.is_fixed(b)) {
                for &p in &cube.interior {
                    let removed = retain(state, p, work, |v| v == p)?;
                    stats.add(PruneRule::Interior, removed);
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Point;

    fn cube_image(dim: usize, u: usize, hi: i64) -> DigitalImage {
        crate::construct::CubeSpec::new(vec![0; dim], vec![hi; dim])
            .unwrap()
            .to_image(u)
            .unwrap()
    }

    fn root_propagate(x: &DigitalImage, fixed: &[Point], rules: PruneRules) -> (State, SearchStats) {
        let ctx = Context::new(x, rules);
        let idx = x.indices_of(fixed).unwrap();
        let mut st = State::root(x.len(), &idx);
        let mut stats = SearchStats::default();
        propagate(&ctx, &mut st, 0..x.len(), &mut stats).unwrap();
        (st, stats)
    }

    #[test]
    fn interval_endpoints_fix_the_middle() {
        let x = cube_image(1, 1, 2);
        let rules = PruneRules::none().with(PruneRule::Geodesic);
        let (st, stats) = root_propagate(&x, &[Point::from([0]), Point::from([2])], rules);
        assert!(st.is_fixed(1));
        assert!(stats.removed_by(PruneRule::Geodesic) > 0);
    }

    #[test]
    fn hypercube_example_needs_no_branching() {
        let x = cube_image(3, 1, 1);
        let a = [[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]].map(Point::from);
        // continuity alone settles every point
        let (st, _) = root_propagate(&x, &a, PruneRules::none());
        assert!((0..8).all(|i| st.is_fixed(i)));
    }

    #[test]
    fn boundary_pins_center_by_distance() {
        let x = cube_image(3, 3, 2);
        let bd = x.boundary();
        let rules = PruneRules::none().with(PruneRule::Distance);
        let (st, stats) = root_propagate(&x, &bd, rules);
        let center = x.index_of(&Point::from([1, 1, 1])).unwrap();
        assert!(st.is_fixed(center));
        assert!(stats.removed_by(PruneRule::Distance) > 0);
    }

    #[test]
    fn interior_rule_fires_on_fixed_boundary() {
        let x = cube_image(2, 1, 3);
        let bd = x.boundary();
        let rules = PruneRules::none().with(PruneRule::Interior);
        let (st, stats) = root_propagate(&x, &bd, rules);
        assert!((0..x.len()).all(|i| st.is_fixed(i)));
        assert!(stats.removed_by(PruneRule::Interior) > 0);
    }

    #[test]
    fn inner_cubes_of_solid_block() {
        let x = cube_image(3, 1, 3);
        let cubes = inner_cubes(&x);
        // low corners with every coordinate <= 1 grow to a cube with interior
        assert_eq!(cubes.len(), 8);
        assert!(cubes.iter().all(|c| !c.interior.is_empty()));
        let thin = cube_image(2, 1, 1);
        assert!(inner_cubes(&thin).is_empty());
    }
}
