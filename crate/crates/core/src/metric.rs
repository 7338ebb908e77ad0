//! Finite metric spaces stored as dense symmetric matrices.
//!
//! A [`FiniteMetricSpace`] is a list of labelled points together with an
//! n-by-n distance matrix. Construction only performs *structural* checks
//! (shape, finiteness, non-negativity); the metric axioms are verified
//! separately by [`FiniteMetricSpace::validate`] so that diagnostic tooling
//! can inspect broken inputs instead of refusing them outright.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a point inside its owning space.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(pub usize);

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Relative tolerance used by the triangle-inequality check:
/// a triple is a violation only if the defect exceeds `TRIANGLE_REL_TOL * max_entry`.
pub const TRIANGLE_REL_TOL: f64 = 1e-12;

/// Absolute asymmetry readers accept before rejecting a matrix file.
pub const READER_ASYMMETRY_TOL: f64 = 1e-9;

/// What kind of metric-axiom violation a [`Violation`] records.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// `d(i,k) > d(i,j) + d(j,k)` beyond tolerance; points are `(i, j, k)`.
    Triangle,
    /// `d(i,j) != d(j,i)`; points are `(i, j, i)`.
    Symmetry,
    /// `d(i,i) != 0`; points are `(i, i, i)`.
    Diagonal,
    /// `d(i,j) == 0` for distinct points; points are `(i, j, i)`.
    Positivity,
}

/// One metric-axiom violation with the offending points and its size.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub points: [PointId; 3],
    /// How far past the axiom the entry is (always >= 0).
    pub slack: f64,
}

/// Outcome of [`FiniteMetricSpace::validate`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
    /// Tolerance actually used for the triangle check (relative to max entry).
    pub triangle_tolerance: f64,
}

/// A finite metric space: labels plus a dense distance matrix (row-major).
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<f64>,
}

/// On-disk JSON shape: `{"labels": [...], "dist": [[...], ...]}`.
#[derive(Serialize, Deserialize)]
struct SpaceDto {
    labels: Vec<String>,
    dist: Vec<Vec<f64>>,
}

impl Serialize for FiniteMetricSpace {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.len();
        let dto = SpaceDto {
            labels: self.labels.clone(),
            dist: (0..n)
                .map(|i| self.dist[i * n..(i + 1) * n].to_vec())
                .collect(),
        };
        dto.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FiniteMetricSpace {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let dto = SpaceDto::deserialize(deserializer)?;
        Self::new(dto.labels, dto.dist).map_err(serde::de::Error::custom)
    }
}

impl FiniteMetricSpace {
    /// Builds a space from nested rows. Structural errors: label/row count
    /// mismatch, non-square rows, NaN/infinite or negative entries.
    pub fn new(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = labels.len();
        if rows.len() != n {
            return Err(Error::Structural(format!(
                "matrix has {} rows but {} labels",
                rows.len(),
                n
            )));
        }
        let mut dist = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Structural(format!(
                    "row {} has {} entries, expected {} (matrix must be square)",
                    i,
                    row.len(),
                    n
                )));
            }
            dist.extend_from_slice(row);
        }
        Self::from_flat(labels, dist)
    }

    /// Builds a space from a row-major flat matrix.
    pub fn from_flat(labels: Vec<String>, dist: Vec<f64>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Structural("space must have at least one point".into()));
        }
        if dist.len() != n * n {
            return Err(Error::Structural(format!(
                "distance matrix has {} entries, expected {}",
                dist.len(),
                n * n
            )));
        }
        for (k, &v) in dist.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Structural(format!(
                    "entry ({},{}) is not a finite number",
                    k / n,
                    k % n
                )));
            }
            if v < 0.0 {
                return Err(Error::Structural(format!(
                    "entry ({},{}) is negative ({v})",
                    k / n,
                    k % n
                )));
            }
        }
        Ok(Self { labels, dist })
    }

    /// Builds a space by evaluating `metric` on every pair of `points`.
    /// Intended for sampling model spaces; the diagonal is forced to exactly 0.
    pub fn from_points<P, F>(labels: Vec<String>, points: &[P], metric: F) -> Self
    where
        F: Fn(&P, &P) -> f64,
    {
        let n = points.len();
        assert_eq!(labels.len(), n, "label count must match point count");
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = metric(&points[i], &points[j]);
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        Self { labels, dist }
    }

    /// Convenience constructor with labels "p0", "p1", ...
    pub fn from_points_auto<P, F>(points: &[P], metric: F) -> Self
    where
        F: Fn(&P, &P) -> f64,
    {
        let labels = (0..points.len()).map(|i| format!("p{i}")).collect();
        Self::from_points(labels, points, metric)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, p: PointId) -> &str {
        &self.labels[p.0]
    }

    pub fn points(&self) -> impl Iterator<Item = PointId> {
        (0..self.len()).map(PointId)
    }

    #[inline]
    pub fn dist(&self, i: PointId, j: PointId) -> f64 {
        self.dist[i.0 * self.len() + j.0]
    }

    /// Largest distance in the space.
    pub fn diameter(&self) -> f64 {
        self.dist.iter().cloned().fold(0.0, f64::max)
    }

    /// Multiset of off-diagonal upper-triangle distances.
    pub fn pair_distances(&self) -> Vec<f64> {
        let n = self.len();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                out.push(self.dist[i * n + j]);
            }
        }
        out
    }

    /// Checks the metric axioms and reports every violation.
    ///
    /// The triangle check uses a relative tolerance of
    /// [`TRIANGLE_REL_TOL`] times the largest entry, so a rescaled space
    /// validates identically to the original.
    pub fn validate(&self) -> ValidationReport {
        let n = self.len();
        let tol = TRIANGLE_REL_TOL * self.diameter();
        let mut violations = Vec::new();

        for i in 0..n {
            let dii = self.dist[i * n + i];
            if dii != 0.0 {
                violations.push(Violation {
                    kind: ViolationKind::Diagonal,
                    points: [PointId(i), PointId(i), PointId(i)],
                    slack: dii.abs(),
                });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let dij = self.dist[i * n + j];
                let dji = self.dist[j * n + i];
                if dij != dji {
                    violations.push(Violation {
                        kind: ViolationKind::Symmetry,
                        points: [PointId(i), PointId(j), PointId(i)],
                        slack: (dij - dji).abs(),
                    });
                }
                if dij == 0.0 && dji == 0.0 {
                    violations.push(Violation {
                        kind: ViolationKind::Positivity,
                        points: [PointId(i), PointId(j), PointId(i)],
                        slack: 0.0,
                    });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if j == i {
                    continue;
                }
                let dij = self.dist[i * n + j];
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    let defect = self.dist[i * n + k] - dij - self.dist[j * n + k];
                    if defect > tol {
                        violations.push(Violation {
                            kind: ViolationKind::Triangle,
                            points: [PointId(i), PointId(j), PointId(k)],
                            slack: defect,
                        });
                    }
                }
            }
        }

        ValidationReport {
            ok: violations.is_empty(),
            violations,
            triangle_tolerance: tol,
        }
    }

    /// Returns a copy with every distance multiplied by `factor` (> 0, finite).
    pub fn rescale(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::Argument(format!(
                "rescale factor must be finite and positive, got {factor}"
            )));
        }
        Ok(Self {
            labels: self.labels.clone(),
            dist: self.dist.iter().map(|d| d * factor).collect(),
        })
    }

    /// Greedy farthest-point eps-net.
    ///
    /// Starts from point 0, repeatedly adds the point farthest from the
    /// current net (lowest index on ties) until every point lies within
    /// `eps` (closed inequality) of the net. The density predicate — not any
    /// cardinality target — is the contract.
    pub fn eps_net(&self, eps: f64) -> Result<Vec<PointId>> {
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(Error::Argument(format!(
                "eps must be finite and non-negative, got {eps}"
            )));
        }
        let n = self.len();
        let mut net = vec![PointId(0)];
        let mut dist_to_net: Vec<f64> = (0..n)
            .map(|i| self.dist[i * n])
            .collect();
        loop {
            let mut far = 0usize;
            let mut far_d = f64::NEG_INFINITY;
            for (i, &d) in dist_to_net.iter().enumerate() {
                if d > far_d {
                    far_d = d;
                    far = i;
                }
            }
            if far_d <= eps {
                return Ok(net);
            }
            net.push(PointId(far));
            for i in 0..n {
                let d = self.dist[i * n + far];
                if d < dist_to_net[i] {
                    dist_to_net[i] = d;
                }
            }
        }
    }

    /// True when every point of the space is within `eps` (closed) of `subset`.
    pub fn is_dense(&self, subset: &[PointId], eps: f64) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            subset
                .iter()
                .map(|p| self.dist[i * n + p.0])
                .fold(f64::INFINITY, f64::min)
                <= eps
        })
    }

    /// Sub-space induced by `subset` (order preserved).
    pub fn restrict(&self, subset: &[PointId]) -> Result<Self> {
        if subset.is_empty() {
            return Err(Error::Argument("restriction subset is empty".into()));
        }
        let n = self.len();
        let mut seen = vec![false; n];
        for p in subset {
            if p.0 >= n {
                return Err(Error::Argument(format!(
                    "point index {} out of range for a space of {} points",
                    p.0, n
                )));
            }
            if seen[p.0] {
                return Err(Error::Argument(format!(
                    "duplicate point index {} in restriction subset",
                    p.0
                )));
            }
            seen[p.0] = true;
        }
        let m = subset.len();
        let mut dist = vec![0.0; m * m];
        for (a, pa) in subset.iter().enumerate() {
            for (b, pb) in subset.iter().enumerate() {
                dist[a * m + b] = self.dist[pa.0 * n + pb.0];
            }
        }
        Ok(Self {
            labels: subset.iter().map(|p| self.labels[p.0].clone()).collect(),
            dist,
        })
    }

    // ---------------------------------------------------------------- I/O --

    fn from_dto(dto: SpaceDto) -> Result<Self> {
        let space = Self::new(dto.labels, dto.dist)?;
        space.reject_reader_asymmetry()?;
        Ok(space)
    }

    fn reject_reader_asymmetry(&self) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let gap = (self.dist[i * n + j] - self.dist[j * n + i]).abs();
                if gap > READER_ASYMMETRY_TOL {
                    return Err(Error::Parse(format!(
                        "matrix entry ({i},{j}) is asymmetric by {gap:e} (limit {READER_ASYMMETRY_TOL:e})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let dto: SpaceDto = serde_json::from_str(text)?;
        Self::from_dto(dto)
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> String {
        let n = self.len();
        let dto = SpaceDto {
            labels: self.labels.clone(),
            dist: (0..n)
                .map(|i| self.dist[i * n..(i + 1) * n].to_vec())
                .collect(),
        };
        serde_json::to_string_pretty(&dto).expect("space serialization cannot fail")
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }

    /// Reads a square matrix CSV: header row = labels, then one row per point.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path)?;
        let labels: Vec<String> = reader
            .headers()?
            .iter()
            .map(|s| s.to_string())
            .collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            let row: std::result::Result<Vec<f64>, _> =
                record.iter().map(|s| s.parse::<f64>()).collect();
            rows.push(row.map_err(|e| Error::Parse(format!("bad numeric cell: {e}")))?);
        }
        let space = Self::new(labels, rows)?;
        space.reject_reader_asymmetry()?;
        Ok(space)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut writer = csv::Writer::from_path(path)?;
        writer.write_record(&self.labels)?;
        let n = self.len();
        for i in 0..n {
            let row: Vec<String> = self.dist[i * n..(i + 1) * n]
                .iter()
                .map(|d| format!("{d}"))
                .collect();
            writer.write_record(&row)?;
        }
        writer.flush()?;
        Ok(())
    }

    /// Reads either format based on the file extension (`.csv` vs anything else = JSON).
    pub fn read_auto(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => Self::read_csv(path),
            _ => Self::read_json(path),
        }
    }
}

/// Shared-ownership alias used throughout relation and zoom code.
pub type SharedSpace = Arc<FiniteMetricSpace>;
