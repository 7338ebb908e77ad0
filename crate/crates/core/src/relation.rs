//! Relations between finite metric spaces, their quality functionals
//! (accuracy, resolution, precision), composition, and cartographic
//! generalization with its bound report.

use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, PointId, SharedSpace};

/// Tolerance for declaring an inequality row violated: `holds = slack >= -BOUND_TOL`.
pub const BOUND_TOL: f64 = 1e-9;

/// A finite relation ρ between a source ("territory") space and a
/// destination ("map") space, stored as a sorted, deduplicated pair list.
#[derive(Clone, Debug)]
pub struct Relation {
    src: SharedSpace,
    dst: SharedSpace,
    pairs: Vec<(PointId, PointId)>,
    domain: Vec<PointId>,
    image: Vec<PointId>,
}

/// Quality functionals of a relation.
///
/// * `accuracy`: worst absolute mismatch `|D(y1,y2) - d(x1,x2)|` over all
///   pairs of related pairs.
/// * `resolution_at(y)`: diameter of the set of source points sharing the
///   pixel `y`; `resolution` is its maximum.
/// * `precision_at(x)`: diameter of the set of pixels a source point `x`
///   maps to; `precision` is its maximum.
///
/// Singleton fibers contribute 0 (maximum over an empty pair set).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapQuality {
    pub accuracy: f64,
    pub resolution: f64,
    pub precision: f64,
    pub resolution_at: Vec<(PointId, f64)>,
    pub precision_at: Vec<(PointId, f64)>,
}

/// One inequality row of [`check_generalization_bounds`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundCheck {
    /// Stable machine-readable rule name.
    pub rule: String,
    /// Left-hand side of `lhs <= rhs`.
    pub lhs: f64,
    /// Right-hand side.
    pub rhs: f64,
    /// `rhs - lhs`; negative means the inequality failed.
    pub slack: f64,
    pub holds: bool,
    /// True for rows whose proof needs boundary witnesses that arbitrary
    /// finite samples may lack; such rows are reported but not universal.
    pub witness_dependent: bool,
}

/// Full report of [`check_generalization_bounds`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneralizationBounds {
    pub eps: f64,
    pub mu: f64,
    pub rows: Vec<BoundCheck>,
    /// True iff every non-witness-dependent row holds.
    pub ok: bool,
}

/// On-disk JSON shape: `{"src": "<space file>", "dst": "<space file>", "pairs": [[i,j],...]}`.
#[derive(Serialize, Deserialize)]
struct RelationDto {
    src: String,
    dst: String,
    pairs: Vec<(usize, usize)>,
}

fn sorted_unique(mut v: Vec<PointId>) -> Vec<PointId> {
    v.sort_unstable();
    v.dedup();
    v
}

impl Relation {
    /// Builds a relation; pairs are sorted and deduplicated.
    /// Errors: empty pair list, or an index outside its space.
    pub fn new(
        src: SharedSpace,
        dst: SharedSpace,
        mut pairs: Vec<(PointId, PointId)>,
    ) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Argument("relation has no pairs".into()));
        }
        pairs.sort_unstable();
        pairs.dedup();
        for &(x, y) in &pairs {
            if x.0 >= src.len() {
                return Err(Error::Argument(format!(
                    "source index {} out of range ({} points)",
                    x.0,
                    src.len()
                )));
            }
            if y.0 >= dst.len() {
                return Err(Error::Argument(format!(
                    "destination index {} out of range ({} points)",
                    y.0,
                    dst.len()
                )));
            }
        }
        let domain = sorted_unique(pairs.iter().map(|p| p.0).collect());
        let image = sorted_unique(pairs.iter().map(|p| p.1).collect());
        Ok(Self {
            src,
            dst,
            pairs,
            domain,
            image,
        })
    }

    /// The identity relation of a space with itself.
    pub fn identity(space: SharedSpace) -> Self {
        let pairs = (0..space.len()).map(|i| (PointId(i), PointId(i))).collect();
        Self::new(space.clone(), space, pairs).expect("identity relation is always valid")
    }

    pub fn src(&self) -> &SharedSpace {
        &self.src
    }

    pub fn dst(&self) -> &SharedSpace {
        &self.dst
    }

    pub fn pairs(&self) -> &[(PointId, PointId)] {
        &self.pairs
    }

    /// Distinct source points, sorted.
    pub fn domain(&self) -> &[PointId] {
        &self.domain
    }

    /// Distinct destination pixels, sorted.
    pub fn image(&self) -> &[PointId] {
        &self.image
    }

    /// True when the domain is all of the source space and the image all of
    /// the destination space.
    pub fn is_total(&self) -> bool {
        self.domain.len() == self.src.len() && self.image.len() == self.dst.len()
    }

    /// Transposed relation (src and dst swapped).
    pub fn inverse(&self) -> Relation {
        let pairs = self.pairs.iter().map(|&(x, y)| (y, x)).collect();
        Relation::new(self.dst.clone(), self.src.clone(), pairs)
            .expect("transposing a valid relation keeps it valid")
    }

    /// Relational composition: pairs `(u, w)` that admit a witness `v` with
    /// `(u,v)` here and `(v,w)` in `other`. Returns `None` when no witness
    /// exists for any pair (the empty composite).
    pub fn compose(&self, other: &Relation) -> Result<Option<Relation>> {
        if self.dst.as_ref() != other.src.as_ref() {
            return Err(Error::Argument(
                "composition mismatch: destination space of the first relation \
                 differs from source space of the second"
                    .into(),
            ));
        }
        let mut by_src: Vec<Vec<PointId>> = vec![Vec::new(); other.src.len()];
        for &(v, w) in &other.pairs {
            by_src[v.0].push(w);
        }
        let mut pairs = Vec::new();
        for &(u, v) in &self.pairs {
            for &w in &by_src[v.0] {
                pairs.push((u, w));
            }
        }
        if pairs.is_empty() {
            return Ok(None);
        }
        Ok(Some(Relation::new(self.src.clone(), other.dst.clone(), pairs)?))
    }

    /// Computes the accuracy/resolution/precision functionals.
    ///
    /// The pair-of-pairs scan is partitioned across workers with a final
    /// max-reduce; `max` is associative and commutative, so the result is
    /// bitwise independent of the partitioning.
    pub fn quality(&self) -> MapQuality {
        let n_pairs = self.pairs.len();
        let accuracy = (0..n_pairs)
            .into_par_iter()
            .map(|i| {
                let (x1, y1) = self.pairs[i];
                let mut worst = 0.0f64;
                for &(x2, y2) in &self.pairs[i + 1..] {
                    let gap = (self.dst.dist(y1, y2) - self.src.dist(x1, x2)).abs();
                    if gap > worst {
                        worst = gap;
                    }
                }
                worst
            })
            .reduce(|| 0.0, f64::max);

        let resolution_at: Vec<(PointId, f64)> = self
            .image
            .iter()
            .map(|&y| {
                let fiber: Vec<PointId> = self
                    .pairs
                    .iter()
                    .filter(|&&(_, py)| py == y)
                    .map(|&(px, _)| px)
                    .collect();
                let mut worst = 0.0f64;
                for (a, &x1) in fiber.iter().enumerate() {
                    for &x2 in &fiber[a + 1..] {
                        worst = worst.max(self.src.dist(x1, x2));
                    }
                }
                (y, worst)
            })
            .collect();
        let precision_at: Vec<(PointId, f64)> = self
            .domain
            .iter()
            .map(|&x| {
                let fiber: Vec<PointId> = self
                    .pairs
                    .iter()
                    .filter(|&&(px, _)| px == x)
                    .map(|&(_, py)| py)
                    .collect();
                let mut worst = 0.0f64;
                for (a, &y1) in fiber.iter().enumerate() {
                    for &y2 in &fiber[a + 1..] {
                        worst = worst.max(self.dst.dist(y1, y2));
                    }
                }
                (x, worst)
            })
            .collect();

        let resolution = resolution_at.iter().map(|p| p.1).fold(0.0, f64::max);
        let precision = precision_at.iter().map(|p| p.1).fold(0.0, f64::max);

        let scale = self.src.diameter().max(self.dst.diameter()).max(1.0);
        assert!(
            resolution <= accuracy + 1e-12 * scale,
            "resolution {resolution} exceeds accuracy {accuracy}"
        );
        assert!(
            precision <= accuracy + 1e-12 * scale,
            "precision {precision} exceeds accuracy {accuracy}"
        );

        MapQuality {
            accuracy,
            resolution,
            precision,
            resolution_at,
            precision_at,
        }
    }

    /// Shorthand for `quality().accuracy`.
    pub fn accuracy(&self) -> f64 {
        self.quality().accuracy
    }

    /// Cartographic generalization: all `(x, y)` having a related pair
    /// `(x', y')` with `d(x,x') <= eps` and `D(y,y') <= mu`.
    ///
    /// Preconditions (checked): the domain must be `eps`-dense in the source
    /// space and the image `mu`-dense in the destination space, which makes
    /// the result total on both sides.
    pub fn generalize(&self, eps: f64, mu: f64) -> Result<Relation> {
        for (v, name) in [(eps, "eps"), (mu, "mu")] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Argument(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        for x in self.src.points() {
            let nearest = self
                .domain
                .iter()
                .map(|&p| self.src.dist(x, p))
                .fold(f64::INFINITY, f64::min);
            if nearest > eps {
                return Err(Error::Precondition(format!(
                    "domain is not {eps}-dense in the source space: point {} (\"{}\") \
                     is {nearest} from the nearest domain point",
                    x.0,
                    self.src.label(x)
                )));
            }
        }
        for y in self.dst.points() {
            let nearest = self
                .image
                .iter()
                .map(|&p| self.dst.dist(y, p))
                .fold(f64::INFINITY, f64::min);
            if nearest > mu {
                return Err(Error::Precondition(format!(
                    "image is not {mu}-dense in the destination space: pixel {} (\"{}\") \
                     is {nearest} from the nearest image pixel",
                    y.0,
                    self.dst.label(y)
                )));
            }
        }
        let mut pairs = Vec::new();
        for x in self.src.points() {
            for y in self.dst.points() {
                let hit = self
                    .pairs
                    .iter()
                    .any(|&(xp, yp)| self.src.dist(x, xp) <= eps && self.dst.dist(y, yp) <= mu);
                if hit {
                    pairs.push((x, y));
                }
            }
        }
        Relation::new(self.src.clone(), self.dst.clone(), pairs)
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let dto: RelationDto = serde_json::from_str(&text)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let src = Arc::new(FiniteMetricSpace::read_auto(&base.join(&dto.src))?);
        let dst = Arc::new(FiniteMetricSpace::read_auto(&base.join(&dto.dst))?);
        let pairs = dto
            .pairs
            .into_iter()
            .map(|(a, b)| (PointId(a), PointId(b)))
            .collect();
        Relation::new(src, dst, pairs)
    }
}

/// True when every point of `space` lies within `eps` (closed) of `subset`.
pub fn is_dense(space: &FiniteMetricSpace, subset: &[PointId], eps: f64) -> bool {
    !space.is_empty() && !subset.is_empty() && space.is_dense(subset, eps)
}

/// Evaluates the inequality rows relating a relation `rho` to its
/// `(eps, mu)`-generalization `rho_bar`:
///
/// 1. `resolution(rho) <= accuracy(rho)`
/// 2. `precision(rho) <= accuracy(rho)`
/// 3. `resolution(rho_bar) <= accuracy(rho) + 2(eps+mu)`
/// 4. `precision(rho_bar) <= accuracy(rho) + 2(eps+mu)`
/// 5. `|accuracy(rho_bar) - accuracy(rho)| <= 2(eps+mu)`
/// 6. `resolution(rho) + 2 eps <= resolution(rho_bar)` — witness-dependent
/// 7. `precision(rho) + 2 mu <= precision(rho_bar)` — witness-dependent
///
/// Rows 6–7 need source/destination points at the exact critical distances;
/// arbitrary finite samples may lack them, so failures there are reported
/// but do not clear `ok`.
pub fn check_generalization_bounds(
    rho: &Relation,
    rho_bar: &Relation,
    eps: f64,
    mu: f64,
) -> Result<GeneralizationBounds> {
    if rho.src.as_ref() != rho_bar.src.as_ref() || rho.dst.as_ref() != rho_bar.dst.as_ref() {
        return Err(Error::Argument(
            "bound check needs both relations on the same pair of spaces".into(),
        ));
    }
    let q = rho.quality();
    let qb = rho_bar.quality();
    let budget = 2.0 * (eps + mu);

    let mut rows = Vec::with_capacity(7);
    let mut push = |rule: &str, lhs: f64, rhs: f64, witness_dependent: bool| {
        let slack = rhs - lhs;
        rows.push(BoundCheck {
            rule: rule.to_string(),
            lhs,
            rhs,
            slack,
            holds: slack >= -BOUND_TOL,
            witness_dependent,
        });
    };
    push("resolution_le_accuracy", q.resolution, q.accuracy, false);
    push("precision_le_accuracy", q.precision, q.accuracy, false);
    push(
        "generalized_resolution_upper",
        qb.resolution,
        q.accuracy + budget,
        false,
    );
    push(
        "generalized_precision_upper",
        qb.precision,
        q.accuracy + budget,
        false,
    );
    push(
        "accuracy_drift",
        (qb.accuracy - q.accuracy).abs(),
        budget,
        false,
    );
    push(
        "generalized_resolution_lower",
        q.resolution + 2.0 * eps,
        qb.resolution,
        true,
    );
    push(
        "generalized_precision_lower",
        q.precision + 2.0 * mu,
        qb.precision,
        true,
    );

    let ok = rows
        .iter()
        .filter(|r| !r.witness_dependent)
        .all(|r| r.holds);
    Ok(GeneralizationBounds { eps, mu, rows, ok })
}
