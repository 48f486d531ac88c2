//! Maps between digital images: continuity, composition, fixed points, lattice
//! isomorphisms, and the exhaustive enumerator of continuous self-maps.

use std::ops::Deref;
use std::sync::Arc;

use crate::error::{FreezeError, Result};
use crate::lattice::{DigitalImage, Point};

/// A function between two digital images, stored as one target index per
/// source point in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageMap {
    source: Arc<DigitalImage>,
    target: Arc<DigitalImage>,
    assignment: Vec<usize>,
}

impl ImageMap {
    pub fn new(
        source: Arc<DigitalImage>,
        target: Arc<DigitalImage>,
        assignment: Vec<usize>,
    ) -> Result<Self> {
        if assignment.len() != source.len() {
            return Err(FreezeError::InvalidMap(format!(
                "assignment has {} entries for {} source points",
                assignment.len(),
                source.len()
            )));
        }
        if let Some(&bad) = assignment.iter().find(|&&t| t >= target.len()) {
            return Err(FreezeError::InvalidMap(format!(
                "target index {bad} out of range for {} target points",
                target.len()
            )));
        }
        Ok(ImageMap {
            source,
            target,
            assignment,
        })
    }

    /// Builds a map from a point function; every image point must lie in the target.
    pub fn from_fn(
        source: Arc<DigitalImage>,
        target: Arc<DigitalImage>,
        f: impl Fn(&Point) -> Point,
    ) -> Result<Self> {
        let assignment = source
            .points()
            .iter()
            .map(|p| target.require(&f(p)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(source, target, assignment)
    }

    pub fn constant(
        source: Arc<DigitalImage>,
        target: Arc<DigitalImage>,
        value: &Point,
    ) -> Result<Self> {
        let t = target.require(value)?;
        let assignment = vec![t; source.len()];
        Self::new(source, target, assignment)
    }

    pub fn source(&self) -> &Arc<DigitalImage> {
        &self.source
    }

    pub fn target(&self) -> &Arc<DigitalImage> {
        &self.target
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn image_of(&self, p: &Point) -> Result<&Point> {
        let i = self.source.require(p)?;
        Ok(self.target.point(self.assignment[i]))
    }

    /// `(source point, image point)` pairs in canonical source order.
    pub fn pairs(&self) -> impl Iterator<Item = (&Point, &Point)> + '_ {
        self.source
            .points()
            .iter()
            .zip(&self.assignment)
            .map(|(p, &t)| (p, self.target.point(t)))
    }

    /// Adjacent source points go to equal or adjacent target points, each
    /// image using its own adjacency.
    pub fn is_continuous(&self) -> bool {
        (0..self.source.len()).all(|i| {
            self.source
                .neighbor_indices(i)
                .iter()
                .filter(|&&j| j > i)
                .all(|&j| {
                    self.target
                        .adjacent_or_equal(self.assignment[i], self.assignment[j])
                })
        })
    }

    /// `g ∘ f` where `f = self`.
    pub fn then(&self, g: &ImageMap) -> Result<ImageMap> {
        compose(self, g)
    }
}

/// `g ∘ f`: apply `f`, then `g`.
pub fn compose(f: &ImageMap, g: &ImageMap) -> Result<ImageMap> {
    if !Arc::ptr_eq(&f.target, &g.source) && f.target != g.source {
        return Err(FreezeError::ImageMismatch(
            "target of the first map is not the source of the second".into(),
        ));
    }
    let assignment = f.assignment.iter().map(|&i| g.assignment[i]).collect();
    ImageMap::new(f.source.clone(), g.target.clone(), assignment)
}

/// A map from an image to itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfMap(ImageMap);

impl Deref for SelfMap {
    type Target = ImageMap;

    fn deref(&self) -> &ImageMap {
        &self.0
    }
}

impl SelfMap {
    pub fn new(image: Arc<DigitalImage>, assignment: Vec<usize>) -> Result<Self> {
        Ok(SelfMap(ImageMap::new(image.clone(), image, assignment)?))
    }

    pub fn identity(image: Arc<DigitalImage>) -> Self {
        let assignment = (0..image.len()).collect();
        SelfMap(ImageMap {
            source: image.clone(),
            target: image,
            assignment,
        })
    }

    pub fn constant(image: Arc<DigitalImage>, value: &Point) -> Result<Self> {
        Ok(SelfMap(ImageMap::constant(image.clone(), image, value)?))
    }

    pub fn from_fn(image: Arc<DigitalImage>, f: impl Fn(&Point) -> Point) -> Result<Self> {
        Ok(SelfMap(ImageMap::from_fn(image.clone(), image, f)?))
    }

    pub fn from_image_map(map: ImageMap) -> Result<Self> {
        if !Arc::ptr_eq(&map.source, &map.target) && map.source != map.target {
            return Err(FreezeError::ImageMismatch(
                "source and target differ".into(),
            ));
        }
        Ok(SelfMap(map))
    }

    pub fn image(&self) -> &Arc<DigitalImage> {
        &self.0.source
    }

    pub fn into_image_map(self) -> ImageMap {
        self.0
    }

    pub fn fixed_point_indices(&self) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(i, &t)| *i == t)
            .map(|(i, _)| i)
            .collect()
    }

    /// `Fix(f)`, in canonical order.
    pub fn fixed_points(&self) -> Vec<Point> {
        self.fixed_point_indices()
            .into_iter()
            .map(|i| self.image().point(i).clone())
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.assignment.iter().enumerate().all(|(i, &t)| i == t)
    }

    /// True when every index in `set` is a fixed point.
    pub fn fixes_indices(&self, set: &[usize]) -> bool {
        set.iter().all(|&i| self.assignment[i] == i)
    }

    pub fn compose(&self, g: &SelfMap) -> Result<SelfMap> {
        SelfMap::from_image_map(compose(&self.0, &g.0)?)
    }
}

/// An affine lattice symmetry `x ↦ y` with
/// `y_j = ±x_{perm[j]} + translation_j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeIso {
    permutation: Vec<usize>,
    reflect: Vec<bool>,
    translation: Vec<i64>,
}

impl LatticeIso {
    pub fn new(permutation: Vec<usize>, reflect: Vec<bool>, translation: Vec<i64>) -> Result<Self> {
        let n = permutation.len();
        if reflect.len() != n || translation.len() != n {
            return Err(FreezeError::DimensionMismatch {
                expected: n,
                found: if reflect.len() != n { reflect.len() } else { translation.len() },
            });
        }
        let mut seen = vec![false; n];
        for &p in &permutation {
            if p >= n || seen[p] {
                return Err(FreezeError::InvalidMap(format!(
                    "{permutation:?} is not a permutation of 0..{n}"
                )));
            }
            seen[p] = true;
        }
        Ok(LatticeIso {
            permutation,
            reflect,
            translation,
        })
    }

    pub fn identity(dim: usize) -> Self {
        LatticeIso {
            permutation: (0..dim).collect(),
            reflect: vec![false; dim],
            translation: vec![0; dim],
        }
    }

    pub fn translation(offset: Vec<i64>) -> Self {
        let n = offset.len();
        LatticeIso {
            permutation: (0..n).collect(),
            reflect: vec![false; n],
            translation: offset,
        }
    }

    /// Exchanges coordinates `i` and `j` (0-based).
    pub fn swap(dim: usize, i: usize, j: usize) -> Self {
        let mut iso = Self::identity(dim);
        iso.permutation.swap(i, j);
        iso
    }

    pub fn dim(&self) -> usize {
        self.permutation.len()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim())
    }

    pub fn apply(&self, x: &Point) -> Point {
        let c = x.coords();
        Point::new(
            (0..self.dim())
                .map(|j| {
                    let v = c[self.permutation[j]];
                    (if self.reflect[j] { -v } else { v }) + self.translation[j]
                })
                .collect(),
        )
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn after(&self, inner: &LatticeIso) -> LatticeIso {
        let n = self.dim();
        let mut out = LatticeIso::identity(n);
        for j in 0..n {
            let k = self.permutation[j];
            out.permutation[j] = inner.permutation[k];
            out.reflect[j] = self.reflect[j] ^ inner.reflect[k];
            let t = inner.translation[k];
            out.translation[j] = (if self.reflect[j] { -t } else { t }) + self.translation[j];
        }
        out
    }

    pub fn inverse(&self) -> LatticeIso {
        let n = self.dim();
        let mut out = LatticeIso::identity(n);
        for j in 0..n {
            let k = self.permutation[j];
            out.permutation[k] = j;
            out.reflect[k] = self.reflect[j];
            let t = self.translation[j];
            out.translation[k] = if self.reflect[j] { t } else { -t };
        }
        out
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(FreezeError::DimensionMismatch {
                expected: dim,
                found: self.dim(),
            });
        }
        Ok(())
    }
}

/// Pointwise image of `x` under `iso`, keeping its adjacency parameter.
pub fn apply_iso(iso: &LatticeIso, x: &DigitalImage) -> Result<DigitalImage> {
    iso.check_dim(x.dim())?;
    DigitalImage::new(x.dim(), x.u(), x.points().iter().map(|p| iso.apply(p)))
}

/// Pointwise image of a point set, sorted canonically.
pub fn apply_iso_to_set(iso: &LatticeIso, set: &[Point]) -> Result<Vec<Point>> {
    if let Some(p) = set.first() {
        iso.check_dim(p.dim())?;
    }
    let mut out: Vec<Point> = set.iter().map(|p| iso.apply(p)).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Translates `x` so that its minimum coordinate on every axis is 0.
pub fn normalize_to_origin(x: &DigitalImage) -> (DigitalImage, LatticeIso) {
    let offset: Vec<i64> = (0..x.dim())
        .map(|axis| -x.points().iter().map(|p| p.coords()[axis]).min().unwrap_or(0))
        .collect();
    let iso = LatticeIso::translation(offset);
    let image = apply_iso(&iso, x).expect("translation preserves dimension");
    (image, iso)
}

/// How [`enumerate_continuous_selfmaps_with`] walks the space of functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnumStrategy {
    /// Extends partial assignments in canonical point order, keeping only
    /// those continuous on the assigned prefix.
    Backtracking,
    /// Tests all `|X|^|X|` functions.
    BruteForce,
}

impl EnumStrategy {
    pub fn default_limit(self) -> usize {
        match self {
            EnumStrategy::Backtracking => 40,
            EnumStrategy::BruteForce => 12,
        }
    }
}

/// Every continuous self-map of `image` fixing `fix` pointwise, in
/// lexicographic order of the assignment sequence.
pub fn enumerate_continuous_selfmaps(
    image: &Arc<DigitalImage>,
    fix: &[Point],
) -> Result<ContinuousSelfMaps> {
    let strategy = EnumStrategy::Backtracking;
    enumerate_continuous_selfmaps_with(image, fix, strategy, strategy.default_limit())
}

pub fn enumerate_continuous_selfmaps_with(
    image: &Arc<DigitalImage>,
    fix: &[Point],
    strategy: EnumStrategy,
    size_limit: usize,
) -> Result<ContinuousSelfMaps> {
    if image.len() > size_limit {
        return Err(FreezeError::SizeGuard {
            size: image.len(),
            limit: size_limit,
        });
    }
    let n = image.len();
    let mut fixed = vec![false; n];
    for i in image.indices_of(fix)? {
        fixed[i] = true;
    }
    Ok(ContinuousSelfMaps {
        image: image.clone(),
        fixed,
        strategy,
        assign: vec![0; n],
        next: vec![0; n],
        depth: 0,
        started: false,
        done: false,
    })
}

/// Iterator returned by [`enumerate_continuous_selfmaps`].
pub struct ContinuousSelfMaps {
    image: Arc<DigitalImage>,
    fixed: Vec<bool>,
    strategy: EnumStrategy,
    assign: Vec<usize>,
    next: Vec<usize>,
    depth: usize,
    started: bool,
    done: bool,
}

impl ContinuousSelfMaps {
    fn consistent_prefix(&self, i: usize, v: usize) -> bool {
        if self.fixed[i] && v != i {
            return false;
        }
        self.image
            .neighbor_indices(i)
            .iter()
            .take_while(|&&j| j < i)
            .all(|&j| self.image.adjacent_or_equal(v, self.assign[j]))
    }

    fn next_backtracking(&mut self) -> Option<Vec<usize>> {
        let n = self.image.len();
        if !self.started {
            self.started = true;
            self.depth = 0;
            self.next[0] = 0;
        } else {
            self.depth = n - 1;
            self.next[n - 1] = self.assign[n - 1] + 1;
        }
        loop {
            let d = self.depth;
            let found = (self.next[d]..n).find(|&v| self.consistent_prefix(d, v));
            match found {
                Some(v) => {
                    self.assign[d] = v;
                    if d + 1 == n {
                        return Some(self.assign.clone());
                    }
                    self.depth += 1;
                    self.next[self.depth] = 0;
                }
                None => {
                    if d == 0 {
                        self.done = true;
                        return None;
                    }
                    self.depth -= 1;
                    self.next[self.depth] = self.assign[self.depth] + 1;
                }
            }
        }
    }

    fn next_brute_force(&mut self) -> Option<Vec<usize>> {
        let n = self.image.len();
        loop {
            if !self.started {
                self.started = true;
            } else {
                // odometer increment, last position fastest
                let mut pos = n;
                loop {
                    if pos == 0 {
                        self.done = true;
                        return None;
                    }
                    pos -= 1;
                    self.assign[pos] += 1;
                    if self.assign[pos] < n {
                        break;
                    }
                    self.assign[pos] = 0;
                }
            }
            let fixes = (0..n).all(|i| !self.fixed[i] || self.assign[i] == i);
            let continuous = (0..n).all(|i| {
                self.image
                    .neighbor_indices(i)
                    .iter()
                    .all(|&j| self.image.adjacent_or_equal(self.assign[i], self.assign[j]))
            });
            if fixes && continuous {
                return Some(self.assign.clone());
            }
        }
    }
}

impl Iterator for ContinuousSelfMaps {
    type Item = SelfMap;

    fn next(&mut self) -> Option<SelfMap> {
        if self.done {
            return None;
        }
        let assignment = match self.strategy {
            EnumStrategy::Backtracking => self.next_backtracking(),
            EnumStrategy::BruteForce => self.next_brute_force(),
        }?;
        Some(SelfMap(ImageMap {
            source: self.image.clone(),
            target: self.image.clone(),
            assignment,
        }))
    }
}
