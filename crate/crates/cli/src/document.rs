//! Input files: image documents, decompositions and point sets.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use freeze_core::{CubeDecomposition, CubeSpec, DigitalImage, Point};
use serde::Deserialize;

use crate::error::CliError;

/// Adjacency as written in a document or on the command line: `"c1"`,
/// `"cN"` (full adjacency), `"c<k>"` or a bare integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Adjacency {
    Full,
    U(usize),
}

impl Adjacency {
    pub fn resolve(&self, dim: usize) -> usize {
        match *self {
            Adjacency::Full => dim,
            Adjacency::U(u) => u,
        }
    }
}

impl std::str::FromStr for Adjacency {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("invalid adjacency `{s}` (expected c1, cN, c<k> or an integer)");
        if s == "cN" || s == "cn" {
            return Ok(Adjacency::Full);
        }
        let digits = s.strip_prefix('c').unwrap_or(s);
        match digits.parse::<usize>() {
            Ok(u) if u > 0 => Ok(Adjacency::U(u)),
            _ => Err(bad()),
        }
    }
}

impl<'de> Deserialize<'de> for Adjacency {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(usize),
            Name(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(0) => Err(serde::de::Error::custom("adjacency must be at least 1")),
            Raw::Int(u) => Ok(Adjacency::U(u)),
            Raw::Name(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CubeDoc {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

/// An image file. Exactly one of `points` or `cubes` must be present;
/// `holes` are subtracted after taking the union of `cubes`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageDocument {
    pub dim: usize,
    pub adjacency: Adjacency,
    pub points: Option<Vec<Vec<i64>>>,
    pub cubes: Option<Vec<CubeDoc>>,
    pub holes: Option<Vec<CubeDoc>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DecompositionDocument {
    dim: Option<usize>,
    cubes: Vec<CubeDoc>,
}

/// A parsed image together with the decomposition it was written as, if any.
#[derive(Debug)]
pub struct LoadedImage {
    pub image: DigitalImage,
    /// The document's cube list, when it describes the image exactly.
    pub cubes: Option<CubeDecomposition>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_error(path: &Path, msg: impl Into<String>) -> CliError {
    CliError::Parse {
        path: path.display().to_string(),
        msg: msg.into(),
    }
}

fn check_dim(path: &Path, field: &str, coords: &[i64], dim: usize) -> Result<(), CliError> {
    if coords.len() != dim {
        return Err(parse_error(
            path,
            format!(
                "{field}: expected {dim} coordinates, found {}",
                coords.len()
            ),
        ));
    }
    Ok(())
}

fn cube_specs(
    path: &Path,
    field: &str,
    cubes: &[CubeDoc],
    dim: usize,
) -> Result<Vec<CubeSpec>, CliError> {
    cubes
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let at = format!("{field}[{i}]");
            check_dim(path, &format!("{at}.lo"), &c.lo, dim)?;
            check_dim(path, &format!("{at}.hi"), &c.hi, dim)?;
            CubeSpec::new(c.lo.clone(), c.hi.clone())
                .map_err(|e| parse_error(path, format!("{at}: {e}")))
        })
        .collect()
}

pub fn load_image(path: &Path, adjacency: Option<&Adjacency>) -> Result<LoadedImage, CliError> {
    let text = read(path)?;
    let doc: ImageDocument =
        serde_json::from_str(&text).map_err(|e| parse_error(path, e.to_string()))?;
    let dim = doc.dim;
    let u = adjacency.unwrap_or(&doc.adjacency).resolve(dim);
    let invalid = |e: freeze_core::FreezeError| parse_error(path, e.to_string());
    match (&doc.points, &doc.cubes) {
        (Some(points), None) => {
            if doc.holes.is_some() {
                return Err(parse_error(path, "holes: only allowed together with cubes"));
            }
            for (i, p) in points.iter().enumerate() {
                check_dim(path, &format!("points[{i}]"), p, dim)?;
            }
            let image = DigitalImage::new(dim, u, points.iter().cloned().map(Point::new))
                .map_err(invalid)?;
            Ok(LoadedImage { image, cubes: None })
        }
        (None, Some(cubes)) => {
            let cubes = cube_specs(path, "cubes", cubes, dim)?;
            let holes = cube_specs(path, "holes", doc.holes.as_deref().unwrap_or(&[]), dim)?;
            let union: BTreeSet<Point> = cubes.iter().flat_map(|c| c.points()).collect();
            let points = union
                .into_iter()
                .filter(|p| !holes.iter().any(|h| h.contains(p)));
            let image = DigitalImage::new(dim, u, points).map_err(invalid)?;
            let decomposition = CubeDecomposition::new(cubes).map_err(invalid)?;
            let exact = freeze_core::validate_decomposition(&image, &decomposition);
            Ok(LoadedImage {
                image,
                cubes: exact.then_some(decomposition),
            })
        }
        (Some(_), Some(_)) => Err(parse_error(
            path,
            "points, cubes: give one or the other, not both",
        )),
        (None, None) => Err(parse_error(path, "missing field `points` or `cubes`")),
    }
}

pub fn load_decomposition(path: &Path, dim: usize) -> Result<CubeDecomposition, CliError> {
    let text = read(path)?;
    let doc: DecompositionDocument =
        serde_json::from_str(&text).map_err(|e| parse_error(path, e.to_string()))?;
    if let Some(d) = doc.dim.filter(|&d| d != dim) {
        return Err(parse_error(
            path,
            format!("dim: decomposition has dimension {d}, image has {dim}"),
        ));
    }
    let cubes = cube_specs(path, "cubes", &doc.cubes, dim)?;
    CubeDecomposition::new(cubes).map_err(|e| parse_error(path, e.to_string()))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SetJson {
    Bare(Vec<Vec<i64>>),
    Object { points: Vec<Vec<i64>> },
}

/// Reads a point set. JSON input is either a bare array of points or an
/// object with a `points` field (other fields are ignored, so JSON reports
/// can be fed back in). Anything else is read as text: one point per line,
/// coordinates separated by commas or spaces, optionally in parentheses;
/// `#` starts a comment.
pub fn load_set(path: &Path, dim: usize) -> Result<Vec<Point>, CliError> {
    let text = read(path)?;
    let trimmed = text.trim_start();
    let raw: Vec<(String, Vec<i64>)> = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        let parsed: SetJson = serde_json::from_str(&text).map_err(|_| {
            // untagged enums lose the position; re-parse for a useful message
            match serde_json::from_str::<serde_json::Value>(&text) {
                Err(e) => parse_error(path, e.to_string()),
                Ok(_) => parse_error(path, "points: expected an array of integer arrays"),
            }
        })?;
        let (points, field) = match parsed {
            SetJson::Bare(p) => (p, ""),
            SetJson::Object { points } => (points, "points"),
        };
        points
            .into_iter()
            .enumerate()
            .map(|(i, p)| (format!("{field}[{i}]"), p))
            .collect()
    } else {
        let mut out = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let inner = body
                .strip_prefix('(')
                .and_then(|b| b.strip_suffix(')'))
                .unwrap_or(body);
            let coords = inner
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<i64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| parse_error(path, format!("line {}: {e}", n + 1)))?;
            out.push((format!("line {}", n + 1), coords));
        }
        out
    };
    let mut set = BTreeSet::new();
    for (at, coords) in raw {
        check_dim(path, &at, &coords, dim)?;
        set.insert(Point::new(coords));
    }
    Ok(set.into_iter().collect())
}
