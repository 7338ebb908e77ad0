//! Gromov–Hausdorff style comparison of finite metric spaces: the minimum,
//! over correspondences with full domain and image, of the accuracy
//! functional. Note the convention: this is the raw accuracy minimum,
//! *without* the classical 1/2 factor (front ends may halve for display).
//!
//! Provides an exhaustive oracle for tiny instances, cheap lower/upper
//! bounds, and an exact branch-and-bound solver with a node budget.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, PointId, SharedSpace};
use crate::relation::Relation;

/// A relation whose domain covers all of the source space and whose image
/// covers all of the destination space.
#[derive(Clone, Debug)]
pub struct Correspondence(Relation);

impl Correspondence {
    pub fn new(relation: Relation) -> Result<Self> {
        if !relation.is_total() {
            return Err(Error::Argument(
                "correspondence must cover every source point and every destination pixel".into(),
            ));
        }
        Ok(Self(relation))
    }

    pub fn relation(&self) -> &Relation {
        &self.0
    }

    pub fn into_relation(self) -> Relation {
        self.0
    }

    /// Worst absolute distance mismatch across this correspondence.
    pub fn accuracy(&self) -> f64 {
        self.0.quality().accuracy
    }
}

/// Outcome of a distance computation.
///
/// Invariants: `lower_bound <= value <= upper_bound`; when `exact` is true
/// all three coincide and `witness` attains `value`.
#[derive(Clone, Debug)]
pub struct GhResult {
    pub value: f64,
    pub witness: Correspondence,
    pub exact: bool,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub nodes_explored: u64,
}

/// Serializable summary of a [`GhResult`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GhReport {
    pub value: f64,
    pub exact: bool,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub nodes_explored: u64,
    pub witness: Vec<(usize, usize)>,
}

impl GhResult {
    pub fn report(&self) -> GhReport {
        GhReport {
            value: self.value,
            exact: self.exact,
            lower_bound: self.lower_bound,
            upper_bound: self.upper_bound,
            nodes_explored: self.nodes_explored,
            witness: self
                .witness
                .relation()
                .pairs()
                .iter()
                .map(|&(a, b)| (a.0, b.0))
                .collect(),
        }
    }
}

/// True iff `rho` has full domain and image and accuracy at most `mu`.
pub fn is_admissible(rho: &Relation, mu: f64) -> bool {
    rho.is_total() && rho.quality().accuracy <= mu
}

/// Exhaustive minimum of accuracy over every subset of `X x Y` with full
/// projections. Only feasible for `|X|*|Y| <= 16` (2^(nm) subsets).
pub fn gh_oracle(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<f64> {
    let n = x.len();
    let m = y.len();
    if n * m > 16 {
        return Err(Error::Argument(format!(
            "oracle enumerates 2^(|X||Y|) subsets; {n}x{m} is past the 16-cell limit"
        )));
    }
    let cells = n * m;
    // Distortion of a pair of cells (x1,y1),(x2,y2).
    let mut distortion = vec![0.0f64; cells * cells];
    for a in 0..cells {
        let (x1, y1) = (a / m, a % m);
        for b in 0..cells {
            let (x2, y2) = (b / m, b % m);
            distortion[a * cells + b] =
                (y.dist(PointId(y1), PointId(y2)) - x.dist(PointId(x1), PointId(x2))).abs();
        }
    }
    let row_mask: Vec<u32> = (0..n).map(|i| ((1u32 << m) - 1) << (i * m)).collect();
    let col_mask: Vec<u32> = (0..m)
        .map(|j| {
            let mut acc = 0u32;
            for i in 0..n {
                acc |= 1 << (i * m + j);
            }
            acc
        })
        .collect();

    let mut best = f64::INFINITY;
    'mask: for mask in 1u32..(1u32 << cells) {
        for rm in &row_mask {
            if mask & rm == 0 {
                continue 'mask;
            }
        }
        for cm in &col_mask {
            if mask & cm == 0 {
                continue 'mask;
            }
        }
        let mut acc = 0.0f64;
        let mut rest = mask;
        while rest != 0 {
            let a = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let mut rest2 = rest;
            while rest2 != 0 {
                let b = rest2.trailing_zeros() as usize;
                rest2 &= rest2 - 1;
                let d = distortion[a * cells + b];
                if d > acc {
                    acc = d;
                    if acc >= best {
                        continue 'mask;
                    }
                }
            }
        }
        best = acc;
    }
    Ok(best)
}

fn hausdorff_of_sorted(a: &[f64], b: &[f64]) -> f64 {
    let one_sided = |from: &[f64], to: &[f64]| {
        from.iter()
            .map(|&v| {
                let idx = to.partition_point(|&t| t < v);
                let mut near = f64::INFINITY;
                if idx < to.len() {
                    near = near.min((to[idx] - v).abs());
                }
                if idx > 0 {
                    near = near.min((v - to[idx - 1]).abs());
                }
                near
            })
            .fold(0.0, f64::max)
    };
    one_sided(a, b).max(one_sided(b, a))
}

/// Cheap lower bound: the larger of the diameter gap and the two-sided
/// mismatch between the distance value sets (each augmented with 0).
///
/// Every correspondence with accuracy `t` matches each realized distance of
/// one space to a distance of the other (or to 0, when both ends share a
/// cell) within `t`, so both quantities bound the minimum accuracy from
/// below.
pub fn gh_lower_bound(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    let diam_gap = (x.diameter() - y.diameter()).abs();
    let mut dx = x.pair_distances();
    let mut dy = y.pair_distances();
    dx.push(0.0);
    dy.push(0.0);
    dx.sort_by(f64::total_cmp);
    dy.sort_by(f64::total_cmp);
    diam_gap.max(hausdorff_of_sorted(&dx, &dy))
}

/// Distance profile of a point: distances to all other points, sorted
/// descending, zero-padded to a common length.
fn profiles(space: &FiniteMetricSpace, width: usize) -> Vec<Vec<f64>> {
    space
        .points()
        .map(|p| {
            let mut row: Vec<f64> = space
                .points()
                .filter(|&q| q != p)
                .map(|q| space.dist(p, q))
                .collect();
            row.sort_by(|a, b| b.total_cmp(a));
            row.resize(width, 0.0);
            row
        })
        .collect()
}

fn profile_cost(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(u, v)| (u - v).abs())
        .fold(0.0, f64::max)
}

fn accuracy_of_pairs(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    pairs: &[(PointId, PointId)],
) -> f64 {
    let mut acc = 0.0f64;
    for (i, &(x1, y1)) in pairs.iter().enumerate() {
        for &(x2, y2) in &pairs[i + 1..] {
            acc = acc.max((y.dist(y1, y2) - x.dist(x1, x2)).abs());
        }
    }
    acc
}

/// Heuristic correspondence: greedy nearest-distance-profile matching in
/// both directions, then first-improvement local search over single
/// reassignments and swaps. Always returns `exact = false`; the value is an
/// upper bound for [`gh_exact`].
pub fn gh_upper_bound(x: &SharedSpace, y: &SharedSpace) -> GhResult {
    let n = x.len();
    let m = y.len();
    let width = n.max(m).saturating_sub(1);
    let px = profiles(x, width);
    let py = profiles(y, width);

    // Eccentricity-descending processing order concentrates the hard points
    // first, while pixels are consumed without replacement until exhausted.
    let mut order: Vec<usize> = (0..n).collect();
    let ecc: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| x.dist(PointId(i), PointId(j))).fold(0.0, f64::max))
        .collect();
    order.sort_by(|&a, &b| ecc[b].total_cmp(&ecc[a]).then(a.cmp(&b)));

    let mut f = vec![0usize; n];
    let mut used = vec![false; m];
    let mut used_count = 0;
    for &i in &order {
        let mut best_j = 0;
        let mut best_c = f64::INFINITY;
        for j in 0..m {
            if used_count < m && used[j] {
                continue;
            }
            let c = profile_cost(&px[i], &py[j]);
            if c < best_c {
                best_c = c;
                best_j = j;
            }
        }
        f[i] = best_j;
        if !used[best_j] {
            used[best_j] = true;
            used_count += 1;
        }
    }
    let mut g = vec![0usize; m];
    let mut used_x = vec![false; n];
    let mut used_x_count = 0;
    for j in 0..m {
        let mut best_i = 0;
        let mut best_c = f64::INFINITY;
        for i in 0..n {
            if used_x_count < n && used_x[i] {
                continue;
            }
            let c = profile_cost(&px[i], &py[j]);
            if c < best_c {
                best_c = c;
                best_i = i;
            }
        }
        g[j] = best_i;
        if !used_x[best_i] {
            used_x[best_i] = true;
            used_x_count += 1;
        }
    }

    let build_pairs = |f: &[usize], g: &[usize]| {
        let mut pairs: Vec<(PointId, PointId)> = (0..n).map(|i| (PointId(i), PointId(f[i]))).collect();
        pairs.extend((0..m).map(|j| (PointId(g[j]), PointId(j))));
        pairs.sort_unstable();
        pairs.dedup();
        pairs
    };

    let mut acc = accuracy_of_pairs(x, y, &build_pairs(&f, &g));
    let mut improved = true;
    let mut rounds = 0;
    while improved && rounds < 1000 {
        improved = false;
        rounds += 1;
        for i in 0..n {
            let old = f[i];
            for j in 0..m {
                if j == old {
                    continue;
                }
                f[i] = j;
                let cand = accuracy_of_pairs(x, y, &build_pairs(&f, &g));
                if cand < acc {
                    acc = cand;
                    improved = true;
                    break;
                }
                f[i] = old;
            }
        }
        for j in 0..m {
            let old = g[j];
            for i in 0..n {
                if i == old {
                    continue;
                }
                g[j] = i;
                let cand = accuracy_of_pairs(x, y, &build_pairs(&f, &g));
                if cand < acc {
                    acc = cand;
                    improved = true;
                    break;
                }
                g[j] = old;
            }
        }
        for i1 in 0..n {
            for i2 in (i1 + 1)..n {
                if f[i1] == f[i2] {
                    continue;
                }
                f.swap(i1, i2);
                let cand = accuracy_of_pairs(x, y, &build_pairs(&f, &g));
                if cand < acc {
                    acc = cand;
                    improved = true;
                } else {
                    f.swap(i1, i2);
                }
            }
        }
    }

    let relation = Relation::new(x.clone(), y.clone(), build_pairs(&f, &g))
        .expect("heuristic pairs are always in range and nonempty");
    let witness = Correspondence::new(relation)
        .expect("construction covers every point and pixel by design");
    GhResult {
        value: acc,
        witness,
        exact: false,
        lower_bound: gh_lower_bound(x, y),
        upper_bound: acc,
        nodes_explored: 0,
    }
}

/// Branch-and-bound state over masks of the pixel side (at most 16 pixels).
struct Solver<'a> {
    x: &'a FiniteMetricSpace,
    y: &'a FiniteMetricSpace,
    order: Vec<usize>,
    m: usize,
    full: usize,
    /// `within[s]`: largest destination distance inside pixel set `s`.
    within: Vec<f64>,
    budget: u64,
    nodes: u64,
    aborted: bool,
    best: f64,
    best_assign: Option<Vec<usize>>,
    cur_assign: Vec<usize>,
}

impl<'a> Solver<'a> {
    fn new(x: &'a FiniteMetricSpace, y: &'a FiniteMetricSpace, budget: u64, incumbent: f64) -> Self {
        let n = x.len();
        let m = y.len();
        let full = (1usize << m) - 1;
        // single[p][s] = max_{q in s} D(p,q), then within by peeling low bits.
        let mut single = vec![0.0f64; m << m];
        for p in 0..m {
            for s in 1..=full {
                let low = s.trailing_zeros() as usize;
                let rest = s & (s - 1);
                single[(p << m) | s] =
                    single[(p << m) | rest].max(y.dist(PointId(p), PointId(low)));
            }
        }
        let mut within = vec![0.0f64; full + 1];
        for s in 1..=full {
            let low = s.trailing_zeros() as usize;
            let rest = s & (s - 1);
            within[s] = within[rest].max(single[(low << m) | rest]);
        }
        let mut order: Vec<usize> = (0..n).collect();
        let ecc: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| x.dist(PointId(i), PointId(j))).fold(0.0, f64::max))
            .collect();
        order.sort_by(|&a, &b| ecc[b].total_cmp(&ecc[a]).then(a.cmp(&b)));
        Self {
            x,
            y,
            order,
            m,
            full,
            within,
            budget,
            nodes: 0,
            aborted: false,
            best: incumbent,
            best_assign: None,
            cur_assign: vec![0; n],
        }
    }

    fn descend(&mut self, level: usize, partial: f64, covered: usize) {
        if self.aborted {
            return;
        }
        let n = self.order.len();
        if level == n {
            if partial < self.best {
                self.best = partial;
                self.best_assign = Some(self.cur_assign.clone());
            }
            return;
        }
        let xi = self.order[level];

        // h[p]: worst mismatch pixel p would add against all earlier levels.
        let mut h = vec![0.0f64; self.m];
        for (p, hp) in h.iter_mut().enumerate() {
            let mut worst = 0.0f64;
            for j in 0..level {
                let dxx = self.x.dist(PointId(xi), PointId(self.order[j]));
                let mut s = self.cur_assign[j];
                while s != 0 {
                    let q = s.trailing_zeros() as usize;
                    s &= s - 1;
                    worst = worst.max((self.y.dist(PointId(p), PointId(q)) - dxx).abs());
                }
            }
            *hp = worst;
        }
        let mut cross = vec![0.0f64; self.full + 1];
        for s in 1..=self.full {
            let low = s.trailing_zeros() as usize;
            cross[s] = cross[s & (s - 1)].max(h[low]);
        }

        let mut candidates: Vec<(f64, usize)> = Vec::new();
        if level + 1 == n {
            // Last level must absorb every still-uncovered pixel.
            let need = self.full & !covered;
            let free = self.full & !need;
            let mut sub = free;
            loop {
                let s = need | sub;
                if s != 0 {
                    let val = partial.max(self.within[s]).max(cross[s]);
                    if val < self.best {
                        candidates.push((val, s));
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & free;
            }
        } else {
            for s in 1..=self.full {
                let val = partial.max(self.within[s]).max(cross[s]);
                if val < self.best {
                    candidates.push((val, s));
                }
            }
        }
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        for (val, s) in candidates {
            if val >= self.best {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                self.aborted = true;
                return;
            }
            self.cur_assign[level] = s;
            self.descend(level + 1, val, covered | s);
            if self.aborted {
                return;
            }
        }
    }
}

/// Exact minimum-accuracy correspondence by branch-and-bound.
///
/// Each source point is assigned a nonempty pixel set; partial accuracy is a
/// monotone lower bound along a branch, so subtrees at or above the
/// incumbent are pruned. The last level only enumerates supersets of the
/// still-uncovered pixels, enforcing image surjectivity. If `node_budget` is
/// exhausted the result carries `exact = false` and brackets the value.
pub fn gh_exact(x: &SharedSpace, y: &SharedSpace, node_budget: u64) -> Result<GhResult> {
    if node_budget == 0 {
        return Err(Error::Argument("node budget must be positive".into()));
    }
    // Branch over the larger side so masks range over the smaller one.
    let swapped = x.len() < y.len();
    let (bx, by) = if swapped { (y, x) } else { (x, y) };
    if by.len() > 16 {
        return Err(Error::Argument(format!(
            "solver masks pixel subsets; the smaller space has {} > 16 points",
            by.len()
        )));
    }

    let seed = gh_upper_bound(bx, by);
    let lower = gh_lower_bound(bx, by);
    if seed.value <= lower {
        // The heuristic already meets the proven lower bound: it is optimal.
        let witness = orient_witness(seed.witness, swapped, x, y)?;
        return Ok(GhResult {
            value: seed.value,
            witness,
            exact: true,
            lower_bound: seed.value,
            upper_bound: seed.value,
            nodes_explored: 0,
        });
    }

    let mut solver = Solver::new(bx, by, node_budget, seed.value);
    solver.descend(0, 0.0, 0);

    let (value, witness) = match (&solver.best_assign, solver.best < seed.value) {
        (Some(assign), true) => {
            let mut pairs = Vec::new();
            for (level, &s) in assign.iter().enumerate() {
                let xi = solver.order[level];
                let mut rest = s;
                while rest != 0 {
                    let q = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    pairs.push((PointId(xi), PointId(q)));
                }
            }
            let relation = Relation::new(bx.clone(), by.clone(), pairs)?;
            (solver.best, Correspondence::new(relation)?)
        }
        _ => (seed.value, seed.witness),
    };
    let witness = orient_witness(witness, swapped, x, y)?;

    if solver.aborted {
        Ok(GhResult {
            value,
            witness,
            exact: false,
            lower_bound: lower.min(value),
            upper_bound: value,
            nodes_explored: solver.nodes,
        })
    } else {
        Ok(GhResult {
            value,
            witness,
            exact: true,
            lower_bound: value,
            upper_bound: value,
            nodes_explored: solver.nodes,
        })
    }
}

fn orient_witness(
    witness: Correspondence,
    swapped: bool,
    x: &SharedSpace,
    y: &SharedSpace,
) -> Result<Correspondence> {
    if !swapped {
        return Ok(witness);
    }
    let transposed = witness.into_relation().inverse();
    // Rebuild on the caller's arcs so the witness points at their spaces.
    let pairs = transposed.pairs().to_vec();
    Correspondence::new(Relation::new(x.clone(), y.clone(), pairs)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    struct Rng(u64);
    impl Rng {
        fn next_f64(&mut self) -> f64 {
            self.0 = self
                .0
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((self.0 >> 11) as f64) / ((1u64 << 53) as f64)
        }
        fn below(&mut self, n: usize) -> usize {
            (self.next_f64() * n as f64) as usize % n
        }
    }

    fn random_space(rng: &mut Rng, n: usize) -> SharedSpace {
        // Points on a line give a genuine metric with varied distances.
        let pts: Vec<f64> = (0..n).map(|_| rng.next_f64() * 4.0).collect();
        Arc::new(FiniteMetricSpace::from_points_auto(&pts, |a, b| (a - b).abs()))
    }

    fn two_points(d: f64) -> SharedSpace {
        let pts = [0.0, d];
        Arc::new(FiniteMetricSpace::from_points_auto(&pts, |a, b| (a - b).abs()))
    }

    #[test]
    fn identical_spaces_have_distance_zero_with_identity_witness() {
        let mut rng = Rng(1);
        let x = random_space(&mut rng, 5);
        let result = gh_exact(&x, &x, 100_000).unwrap();
        assert!(result.exact);
        assert_eq!(result.value, 0.0);
        let expect: Vec<(PointId, PointId)> =
            (0..x.len()).map(|i| (PointId(i), PointId(i))).collect();
        assert_eq!(result.witness.relation().pairs(), expect.as_slice());
    }

    #[test]
    fn single_point_against_anything_gives_diameter() {
        let mut rng = Rng(2);
        for _ in 0..10 {
            let y = random_space(&mut rng, 4);
            let x = two_points(0.5).restrict_one();
            let result = gh_exact(&x, &y, 100_000).unwrap();
            assert!(result.exact);
            assert!(
                (result.value - y.diameter()).abs() < 1e-12,
                "got {} want {}",
                result.value,
                y.diameter()
            );
        }
    }

    trait RestrictOne {
        fn restrict_one(&self) -> SharedSpace;
    }
    impl RestrictOne for SharedSpace {
        fn restrict_one(&self) -> SharedSpace {
            Arc::new(self.restrict(&[PointId(0)]).unwrap())
        }
    }

    #[test]
    fn mismatched_two_point_spaces() {
        let x = two_points(1.0);
        let y = two_points(3.0);
        assert_eq!(gh_oracle(&x, &y).unwrap(), 2.0);
        let result = gh_exact(&x, &y, 100_000).unwrap();
        assert!(result.exact);
        assert_eq!(result.value, 2.0);
    }

    #[test]
    fn solver_matches_oracle_on_random_instances() {
        let mut rng = Rng(3);
        for round in 0..40 {
            let (nx, ny) = (2 + rng.below(3), 2 + rng.below(3));
            let x = random_space(&mut rng, nx);
            let y = random_space(&mut rng, ny);
            let oracle = gh_oracle(&x, &y).unwrap();
            let result = gh_exact(&x, &y, 10_000_000).unwrap();
            assert!(result.exact, "round {round} exhausted budget");
            assert!(
                (result.value - oracle).abs() <= 1e-12,
                "round {round}: solver {} vs oracle {oracle}",
                result.value
            );
        }
    }

    #[test]
    fn oracle_is_symmetric() {
        let mut rng = Rng(4);
        for _ in 0..20 {
            let (nx, ny) = (2 + rng.below(3), 2 + rng.below(3));
            let x = random_space(&mut rng, nx);
            let y = random_space(&mut rng, ny);
            assert_eq!(gh_oracle(&x, &y).unwrap(), gh_oracle(&y, &x).unwrap());
        }
    }

    #[test]
    fn bounds_bracket_the_exact_value() {
        let mut rng = Rng(5);
        for _ in 0..30 {
            let (nx, ny) = (2 + rng.below(4), 2 + rng.below(4));
            let x = random_space(&mut rng, nx);
            let y = random_space(&mut rng, ny);
            let exact = gh_exact(&x, &y, 10_000_000).unwrap();
            assert!(exact.exact);
            let lower = gh_lower_bound(&x, &y);
            let upper = gh_upper_bound(&x, &y);
            assert!(
                lower <= exact.value + 1e-12,
                "lower {lower} above exact {}",
                exact.value
            );
            assert!(
                upper.value >= exact.value - 1e-12,
                "upper {} below exact {}",
                upper.value,
                exact.value
            );
            assert!(upper.witness.relation().is_total());
        }
    }

    #[test]
    fn lower_bound_survives_clustered_instances() {
        // Two tight clusters at unit separation versus two bare points: the
        // naive sorted-multiset comparison would overshoot the true distance
        // here; the value-set form must stay below the oracle.
        let cluster: [f64; 4] = [0.0, 0.01, 1.0, 1.01];
        let x = Arc::new(FiniteMetricSpace::from_points_auto(&cluster, |a, b| {
            (a - b).abs()
        }));
        let y = two_points(1.0);
        let oracle = gh_oracle(&x, &y).unwrap();
        let lower = gh_lower_bound(&x, &y);
        assert!(
            lower <= oracle + 1e-12,
            "lower bound {lower} exceeds oracle {oracle}"
        );
    }

    #[test]
    fn triangle_inequality_on_random_triples() {
        let mut rng = Rng(6);
        for _ in 0..15 {
            let (nx, ny, nz) = (2 + rng.below(3), 2 + rng.below(3), 2 + rng.below(3));
            let x = random_space(&mut rng, nx);
            let y = random_space(&mut rng, ny);
            let z = random_space(&mut rng, nz);
            let xy = gh_exact(&x, &y, 10_000_000).unwrap().value;
            let yz = gh_exact(&y, &z, 10_000_000).unwrap().value;
            let xz = gh_exact(&x, &z, 10_000_000).unwrap().value;
            assert!(xz <= xy + yz + 1e-12, "triangle failed: {xz} > {xy} + {yz}");
        }
    }

    #[test]
    fn budget_exhaustion_turns_result_inexact() {
        let mut rng = Rng(7);
        let x = random_space(&mut rng, 5);
        let y = random_space(&mut rng, 5);
        let clipped = gh_exact(&x, &y, 1).unwrap();
        let full = gh_exact(&x, &y, 100_000_000).unwrap();
        if !clipped.exact {
            assert!(clipped.lower_bound <= full.value + 1e-12);
            assert!(clipped.upper_bound >= full.value - 1e-12);
            assert!(clipped.value >= full.value - 1e-12);
        }
        assert!(full.exact);
    }

    #[test]
    fn oracle_rejects_oversized_instances() {
        let mut rng = Rng(8);
        let x = random_space(&mut rng, 5);
        let y = random_space(&mut rng, 4);
        assert!(matches!(gh_oracle(&x, &y), Err(Error::Argument(_))));
    }

    #[test]
    fn admissibility_matches_direct_accuracy() {
        let mut rng = Rng(9);
        let x = random_space(&mut rng, 4);
        let y = random_space(&mut rng, 3);
        let upper = gh_upper_bound(&x, &y);
        let rho = upper.witness.relation();
        let acc = rho.quality().accuracy;
        assert!(is_admissible(rho, acc));
        assert!(!is_admissible(rho, acc - 1e-9));
        // A relation missing a domain point is never admissible.
        let partial = Relation::new(
            x.clone(),
            y.clone(),
            vec![(PointId(0), PointId(0)), (PointId(0), PointId(1)), (PointId(0), PointId(2))],
        )
        .unwrap();
        assert!(!is_admissible(&partial, f64::INFINITY));
    }

    #[test]
    fn exact_distance_is_symmetric() {
        let mut rng = Rng(10);
        for _ in 0..10 {
            let (nx, ny) = (2 + rng.below(4), 2 + rng.below(4));
            let x = random_space(&mut rng, nx);
            let y = random_space(&mut rng, ny);
            let a = gh_exact(&x, &y, 10_000_000).unwrap();
            let b = gh_exact(&y, &x, 10_000_000).unwrap();
            assert_eq!(a.value, b.value);
        }
    }
}
