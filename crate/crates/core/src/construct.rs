//! Candidate freezing sets built from cube structure, the points every
//! freezing set must contain, and explicit non-identity maps that certify
//! when a point cannot be dropped.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{FreezeError, Result};
use crate::lattice::{DigitalImage, Point, MAX_DIM};
use crate::maps::{LatticeIso, SelfMap};

/// The axis-aligned box `Π [lo_i, hi_i]` of `Z^n`. Axes with `lo_i == hi_i`
/// are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubeSpec {
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl CubeSpec {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(FreezeError::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if lo.is_empty() || lo.len() > MAX_DIM {
            return Err(FreezeError::UnsupportedDimension {
                dim: lo.len(),
                max: MAX_DIM,
            });
        }
        if let Some(i) = (0..lo.len()).find(|&i| lo[i] > hi[i]) {
            return Err(FreezeError::InvalidCube(format!(
                "axis {} has lo {} > hi {}",
                i + 1,
                lo[i],
                hi[i]
            )));
        }
        Ok(CubeSpec { lo, hi })
    }

    /// The single point `p` as a degenerate cube.
    pub fn point(p: &Point) -> Self {
        CubeSpec {
            lo: p.coords().to_vec(),
            hi: p.coords().to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    pub fn is_degenerate_axis(&self, axis: usize) -> bool {
        self.lo[axis] == self.hi[axis]
    }

    pub fn len(&self) -> usize {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| (b - a + 1) as usize)
            .product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim()
            && p
                .coords()
                .iter()
                .enumerate()
                .all(|(i, &c)| self.lo[i] <= c && c <= self.hi[i])
    }

    /// All lattice points of the cube in lexicographic order.
    pub fn points(&self) -> Vec<Point> {
        product(&self.lo.iter().zip(&self.hi).map(|(&a, &b)| (a..=b).collect()).collect::<Vec<_>>())
    }

    /// `Π {lo_i, hi_i}`; a degenerate axis contributes one value.
    pub fn corners(&self) -> Vec<Point> {
        let axes: Vec<Vec<i64>> = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(&a, &b)| if a == b { vec![a] } else { vec![a, b] })
            .collect();
        product(&axes)
    }

    /// Points with a `c_1`-neighbor outside the cube, treating the cube as a
    /// standalone image: every point with an extremal coordinate on some axis.
    pub fn boundary(&self) -> Vec<Point> {
        self.points()
            .into_iter()
            .filter(|p| self.is_boundary_point(p))
            .collect()
    }

    pub fn is_boundary_point(&self, p: &Point) -> bool {
        self.contains(p)
            && p
                .coords()
                .iter()
                .enumerate()
                .any(|(i, &c)| c == self.lo[i] || c == self.hi[i])
    }

    pub fn to_image(&self, u: usize) -> Result<DigitalImage> {
        DigitalImage::new(self.dim(), u, self.points())
    }

    /// The image of this cube under a lattice symmetry, which is again a cube.
    pub fn transformed(&self, iso: &LatticeIso) -> CubeSpec {
        let a = iso.apply(&Point::new(self.lo.clone()));
        let b = iso.apply(&Point::new(self.hi.clone()));
        let (lo, hi) = a
            .coords()
            .iter()
            .zip(b.coords())
            .map(|(&x, &y)| (x.min(y), x.max(y)))
            .unzip();
        CubeSpec { lo, hi }
    }
}

fn product(axes: &[Vec<i64>]) -> Vec<Point> {
    let mut out: Vec<Vec<i64>> = vec![Vec::with_capacity(axes.len())];
    for values in axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out.into_iter().map(Point::new).collect()
}

/// Corner set of a cube.
pub fn corners(k: &CubeSpec) -> Vec<Point> {
    k.corners()
}

/// A nonempty sequence of cubes of one dimension, read as their union.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeDecomposition {
    cubes: Vec<CubeSpec>,
}

impl CubeDecomposition {
    pub fn new(cubes: Vec<CubeSpec>) -> Result<Self> {
        let first = cubes
            .first()
            .ok_or_else(|| FreezeError::InvalidDecomposition("no cubes".into()))?;
        let dim = first.dim();
        if let Some(c) = cubes.iter().find(|c| c.dim() != dim) {
            return Err(FreezeError::DimensionMismatch {
                expected: dim,
                found: c.dim(),
            });
        }
        Ok(CubeDecomposition { cubes })
    }

    pub fn cubes(&self) -> &[CubeSpec] {
        &self.cubes
    }

    pub fn dim(&self) -> usize {
        self.cubes[0].dim()
    }

    pub fn union_points(&self) -> BTreeSet<Point> {
        self.cubes.iter().flat_map(|c| c.points()).collect()
    }

    /// The union of the cubes as an image under `c_u`.
    pub fn image(&self, u: usize) -> Result<DigitalImage> {
        DigitalImage::new(self.dim(), u, self.union_points())
    }
}

/// True iff every cube lies in `x` and together they cover `x`.
pub fn validate_decomposition(x: &DigitalImage, d: &CubeDecomposition) -> bool {
    if d.dim() != x.dim() {
        return false;
    }
    let mut covered = vec![false; x.len()];
    for cube in d.cubes() {
        for p in cube.points() {
            match x.index_of(&p) {
                Some(i) => covered[i] = true,
                None => return false,
            }
        }
    }
    covered.into_iter().all(|c| c)
}

/// One degenerate cube per point.
pub fn trivial_decomposition(x: &DigitalImage) -> CubeDecomposition {
    CubeDecomposition {
        cubes: x.points().iter().map(CubeSpec::point).collect(),
    }
}

/// Union of the corner sets of the cubes; a freezing set for the union under
/// `c_1` when that union is `c_1`-connected.
pub fn c1_freezing_set(d: &CubeDecomposition) -> Result<Vec<Point>> {
    let image = d.image(1)?;
    if !image.is_connected() {
        return Err(FreezeError::NotConnected { u: 1 });
    }
    let set: BTreeSet<Point> = d.cubes().iter().flat_map(|c| c.corners()).collect();
    Ok(set.into_iter().collect())
}

/// Union of the standalone boundaries of the cubes; a freezing set for the
/// union under `c_n` when that union is `c_n`-connected.
pub fn cn_freezing_set(d: &CubeDecomposition) -> Result<Vec<Point>> {
    let n = d.dim();
    let image = d.image(n)?;
    if !image.is_connected() {
        return Err(FreezeError::NotConnected { u: n });
    }
    let set: BTreeSet<Point> = d.cubes().iter().flat_map(|c| c.boundary()).collect();
    Ok(set.into_iter().collect())
}

/// `q` is a close neighbor of `p`: `q != p` and `N(p) ⊆ N*(q)`.
pub fn is_close_neighbor(x: &DigitalImage, p: usize, q: usize) -> bool {
    p != q
        && x
            .neighbor_indices(p)
            .iter()
            .all(|&y| x.adjacent_or_equal(y, q))
}

/// For each point that has a close neighbor, the pair `(p, q)` with `q` the
/// first close neighbor of `p` in canonical order.
pub fn close_neighbor_pairs(x: &DigitalImage) -> Vec<(usize, usize)> {
    (0..x.len())
        .filter_map(|p| find_close_neighbor(x, p).map(|q| (p, q)))
        .collect()
}

/// A close neighbor of `p`, searching only within two steps of `p`.
pub fn find_close_neighbor(x: &DigitalImage, p: usize) -> Option<usize> {
    let nbrs = x.neighbor_indices(p);
    if nbrs.is_empty() {
        // isolated: any other point qualifies
        return (0..x.len()).find(|&q| q != p);
    }
    // q must be equal or adjacent to each neighbor of p
    let mut candidates: BTreeSet<usize> = BTreeSet::new();
    for &y in nbrs {
        candidates.insert(y);
        candidates.extend(x.neighbor_indices(y).iter().copied());
    }
    candidates
        .into_iter()
        .find(|&q| is_close_neighbor(x, p, q))
}

/// Points that lie in every freezing set of `x` by virtue of having a close
/// neighbor.
pub fn mandatory_points(x: &DigitalImage) -> Vec<Point> {
    close_neighbor_pairs(x)
        .into_iter()
        .map(|(p, _)| x.point(p).clone())
        .collect()
}

/// The identity except `p ↦ q`, for `q` a close neighbor of `p`.
pub fn close_neighbor_witness(x: &Arc<DigitalImage>, p: &Point, q: &Point) -> Result<SelfMap> {
    let pi = x.require(p)?;
    let qi = x.require(q)?;
    if !is_close_neighbor(x, pi, qi) {
        return Err(FreezeError::NotCloseNeighbor {
            p: p.clone(),
            q: q.clone(),
        });
    }
    let mut assignment: Vec<usize> = (0..x.len()).collect();
    assignment[pi] = qi;
    SelfMap::new(x.clone(), assignment)
}

/// On the cube `K` under `c_n`, the identity except that `x0` moves one step
/// inward along `axis` (counted from 1). It fixes every other boundary point,
/// showing `Bd(K) \ {x0}` does not freeze.
pub fn boundary_minimality_witness(k: &CubeSpec, x0: &Point, axis: usize) -> Result<SelfMap> {
    let n = k.dim();
    if axis == 0 || axis > n {
        return Err(FreezeError::IndexOutOfRange { index: axis, dim: n });
    }
    if x0.dim() != n {
        return Err(FreezeError::DimensionMismatch {
            expected: n,
            found: x0.dim(),
        });
    }
    if !k.contains(x0) {
        return Err(FreezeError::PointNotInImage(x0.clone()));
    }
    if !k.is_boundary_point(x0) {
        return Err(FreezeError::NotOnBoundary(x0.clone()));
    }
    let a = axis - 1;
    let c = x0.coords()[a];
    let step = if k.is_degenerate_axis(a) {
        return Err(FreezeError::InvalidCube(format!(
            "axis {axis} is degenerate, so there is no inward step"
        )));
    } else if c == k.lo[a] {
        1
    } else if c == k.hi[a] {
        -1
    } else {
        return Err(FreezeError::AxisNotExtremal {
            point: x0.clone(),
            axis,
        });
    };
    let image = Arc::new(k.to_image(n)?);
    let moved = x0.shifted(a, step);
    SelfMap::from_fn(image, |p| if p == x0 { moved.clone() } else { p.clone() })
}
