//! Lattice points, finite digital images and the `c_u` adjacency graph.
//!
//! Two points of `Z^n` are `c_u`-adjacent when they are distinct, differ in
//! at most `u` coordinates, and differ by exactly one in each coordinate where
//! they differ. `c_1` is 4-adjacency in the plane, `c_2` is 8-adjacency, and
//! `c_3` in space is 26-adjacency.
//!
//! A [`DigitalImage`] keeps its points in lexicographic order and materializes
//! the adjacency lists once at construction. Everything downstream refers to
//! points by their index in that canonical order.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::error::{FreezeError, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 16;

/// A point of the integer lattice `Z^n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Point(Vec<i64>);

impl Point {
    pub fn new(coords: Vec<i64>) -> Self {
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<i64> {
        self.0
    }

    /// The `i`-th coordinate, with `i` counted from 1.
    pub fn projection(&self, i: usize) -> Result<i64> {
        if i == 0 || i > self.dim() {
            return Err(FreezeError::IndexOutOfRange {
                index: i,
                dim: self.dim(),
            });
        }
        Ok(self.0[i - 1])
    }

    /// Copy of this point with coordinate `axis` (0-based) shifted by `delta`.
    pub fn shifted(&self, axis: usize, delta: i64) -> Point {
        let mut c = self.0.clone();
        c[axis] += delta;
        Point(c)
    }
}

impl From<Vec<i64>> for Point {
    fn from(v: Vec<i64>) -> Self {
        Point(v)
    }
}

impl<const N: usize> From<[i64; N]> for Point {
    fn from(v: [i64; N]) -> Self {
        Point(v.to_vec())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn check_u(u: usize, dim: usize) -> Result<()> {
    if u == 0 || u > dim {
        return Err(FreezeError::AdjacencyOutOfRange { u, dim });
    }
    Ok(())
}

pub(crate) fn adjacent_coords(p: &[i64], q: &[i64], u: usize) -> bool {
    let mut differing = 0;
    for (a, b) in p.iter().zip(q) {
        match (a - b).abs() {
            0 => {}
            1 => {
                differing += 1;
                if differing > u {
                    return false;
                }
            }
            _ => return false,
        }
    }
    differing > 0
}

/// `c_u`-adjacency of two lattice points.
pub fn adjacent(p: &Point, q: &Point, u: usize) -> Result<bool> {
    if p.dim() != q.dim() {
        return Err(FreezeError::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    check_u(u, p.dim())?;
    Ok(adjacent_coords(p.coords(), q.coords(), u))
}

/// Shortest-path count between two points, saturating at two.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PathCount {
    Zero,
    One,
    /// Two or more shortest paths.
    Many,
}

impl PathCount {
    pub fn from_count(n: u64) -> Self {
        match n {
            0 => PathCount::Zero,
            1 => PathCount::One,
            _ => PathCount::Many,
        }
    }

    fn add(self, other: PathCount) -> PathCount {
        match (self, other) {
            (PathCount::Zero, c) | (c, PathCount::Zero) => c,
            _ => PathCount::Many,
        }
    }
}

/// Shortest-path structure between two points of an image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathResult {
    /// `None` when the points lie in different components.
    pub distance: Option<usize>,
    pub shortest_path_count: PathCount,
    /// Present exactly when the shortest path is unique.
    pub unique_path: Option<Vec<Point>>,
}

/// Breadth-first distances and saturated shortest-path counts from one source.
#[derive(Clone, Debug)]
pub struct ShortestPaths {
    pub source: usize,
    pub dist: Vec<Option<u32>>,
    pub count: Vec<PathCount>,
}

impl ShortestPaths {
    /// The unique shortest path from the source to `target`, as point indices,
    /// or `None` if it is not unique or does not exist.
    pub fn unique_path(&self, image: &DigitalImage, target: usize) -> Option<Vec<usize>> {
        if self.count[target] != PathCount::One {
            return None;
        }
        let mut path = vec![target];
        let mut cur = target;
        while cur != self.source {
            let d = self.dist[cur]?;
            // A count of one means exactly one predecessor on the BFS layer below.
            cur = *image
                .neighbor_indices(cur)
                .iter()
                .find(|&&w| self.dist[w] == Some(d - 1))?;
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }
}

/// A finite digital image `(X, c_u)`.
#[derive(Clone, Debug)]
pub struct DigitalImage {
    dim: usize,
    u: usize,
    points: Vec<Point>,
    index: HashMap<Point, usize>,
    adjacency: Vec<Vec<usize>>,
}

impl PartialEq for DigitalImage {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.u == other.u && self.points == other.points
    }
}

impl Eq for DigitalImage {}

impl DigitalImage {
    /// Builds an image from any collection of points; duplicates are merged.
    pub fn new(dim: usize, u: usize, points: impl IntoIterator<Item = Point>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(FreezeError::UnsupportedDimension { dim, max: MAX_DIM });
        }
        check_u(u, dim)?;
        let mut points: Vec<Point> = points.into_iter().collect();
        for p in &points {
            if p.dim() != dim {
                return Err(FreezeError::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
        }
        if points.is_empty() {
            return Err(FreezeError::EmptyImage);
        }
        points.sort();
        points.dedup();
        let index: HashMap<Point, usize> = points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let adjacency = build_adjacency(&points, &index, dim, u);
        Ok(DigitalImage {
            dim,
            u,
            points,
            index,
            adjacency,
        })
    }

    /// Like [`DigitalImage::new`], taking the dimension from the first point.
    pub fn from_points(u: usize, points: impl IntoIterator<Item = Point>) -> Result<Self> {
        let points: Vec<Point> = points.into_iter().collect();
        let dim = points.first().ok_or(FreezeError::EmptyImage)?.dim();
        Self::new(dim, u, points)
    }

    /// The same point set under a different adjacency.
    pub fn with_adjacency(&self, u: usize) -> Result<Self> {
        Self::new(self.dim, u, self.points.iter().cloned())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn u(&self) -> usize {
        self.u
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points in canonical (lexicographic) order.
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn index_of(&self, p: &Point) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.index.contains_key(p)
    }

    pub(crate) fn require(&self, p: &Point) -> Result<usize> {
        if p.dim() != self.dim {
            return Err(FreezeError::DimensionMismatch {
                expected: self.dim,
                found: p.dim(),
            });
        }
        self.index_of(p)
            .ok_or_else(|| FreezeError::PointNotInImage(p.clone()))
    }

    /// Resolves a set of points to sorted, deduplicated indices.
    pub fn indices_of<'a>(&self, pts: impl IntoIterator<Item = &'a Point>) -> Result<Vec<usize>> {
        let mut out = pts
            .into_iter()
            .map(|p| self.require(p))
            .collect::<Result<Vec<_>>>()?;
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Sorted adjacency list of point `i`.
    pub fn neighbor_indices(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn adjacent_indices(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }

    /// Equal or adjacent.
    pub fn adjacent_or_equal(&self, i: usize, j: usize) -> bool {
        i == j || self.adjacent_indices(i, j)
    }

    /// `N(x)`: the points of the image adjacent to `x`.
    pub fn neighbors(&self, x: &Point) -> Result<Vec<Point>> {
        let i = self.require(x)?;
        Ok(self.adjacency[i]
            .iter()
            .map(|&j| self.points[j].clone())
            .collect())
    }

    /// `N*(x) = N(x) ∪ {x}`, in canonical order.
    pub fn closed_neighbors(&self, x: &Point) -> Result<Vec<Point>> {
        let mut out = self.neighbors(x)?;
        let pos = out.binary_search(x).unwrap_or_else(|e| e);
        out.insert(pos, x.clone());
        Ok(out)
    }

    /// Indices of points with a `c_1`-neighbor outside the image. The image's
    /// own adjacency plays no role here.
    pub fn boundary_indices(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| {
                let p = &self.points[i];
                (0..self.dim).any(|axis| {
                    !self.contains(&p.shifted(axis, 1)) || !self.contains(&p.shifted(axis, -1))
                })
            })
            .collect()
    }

    /// `Bd(X)`.
    pub fn boundary(&self) -> Vec<Point> {
        self.boundary_indices()
            .into_iter()
            .map(|i| self.points[i].clone())
            .collect()
    }

    /// Component label of each point; labels are assigned in canonical order.
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.len()];
        let mut next = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.len() {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = next;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for &w in &self.adjacency[v] {
                    if label[w] == usize::MAX {
                        label[w] = next;
                        queue.push_back(w);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }

    /// Breadth-first search from point `source`.
    pub fn shortest_paths(&self, source: usize) -> ShortestPaths {
        let n = self.len();
        let mut dist = vec![None; n];
        let mut count = vec![PathCount::Zero; n];
        dist[source] = Some(0);
        count[source] = PathCount::One;
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v].expect("queued vertices have a distance");
            for &w in &self.adjacency[v] {
                match dist[w] {
                    None => {
                        dist[w] = Some(dv + 1);
                        count[w] = count[v];
                        queue.push_back(w);
                    }
                    Some(dw) if dw == dv + 1 => count[w] = count[w].add(count[v]),
                    _ => {}
                }
            }
        }
        ShortestPaths {
            source,
            dist,
            count,
        }
    }

    pub fn path_structure(&self, x: &Point, y: &Point) -> Result<PathResult> {
        let xi = self.require(x)?;
        let yi = self.require(y)?;
        let sp = self.shortest_paths(xi);
        let unique_path = sp
            .unique_path(self, yi)
            .map(|path| path.into_iter().map(|i| self.points[i].clone()).collect());
        Ok(PathResult {
            distance: sp.dist[yi].map(|d| d as usize),
            shortest_path_count: sp.count[yi],
            unique_path,
        })
    }
}

/// `p_i(x)`, with `i` counted from 1.
pub fn projection(x: &Point, i: usize) -> Result<i64> {
    x.projection(i)
}

/// Number of nonzero offsets in `{-1,0,1}^n` with at most `u` nonzero entries.
fn offset_count(dim: usize, u: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for k in 1..=u {
        binom = binom * (dim - k + 1) as u128 / k as u128;
        total += binom << k;
    }
    total
}

fn build_adjacency(
    points: &[Point],
    index: &HashMap<Point, usize>,
    dim: usize,
    u: usize,
) -> Vec<Vec<usize>> {
    let n = points.len();
    if offset_count(dim, u) < n as u128 {
        let offsets = offsets(dim, u);
        points
            .iter()
            .map(|p| {
                let mut adj: Vec<usize> = offsets
                    .iter()
                    .filter_map(|off| {
                        let q: Vec<i64> = p.coords().iter().zip(off).map(|(a, d)| a + d).collect();
                        index.get(&Point(q)).copied()
                    })
                    .collect();
                adj.sort_unstable();
                adj
            })
            .collect()
    } else {
        let mut adj = vec![Vec::new(); n];
        for i in 0..n {
            for j in i + 1..n {
                if adjacent_coords(points[i].coords(), points[j].coords(), u) {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        adj
    }
}

fn offsets(dim: usize, u: usize) -> Vec<Vec<i64>> {
    fn rec(dim: usize, u: usize, cur: &mut Vec<i64>, nonzero: usize, out: &mut Vec<Vec<i64>>) {
        if cur.len() == dim {
            if nonzero > 0 {
                out.push(cur.clone());
            }
            return;
        }
        for d in [-1, 0, 1] {
            let nz = nonzero + usize::from(d != 0);
            if nz <= u {
                cur.push(d);
                rec(dim, u, cur, nz, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(dim, u, &mut Vec::with_capacity(dim), 0, &mut out);
    out
}
