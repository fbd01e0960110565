//! Points, p-norms, distance ratios and equilateral testing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum::NeumaierSum;

/// A point of `R^n` with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyPoint);
        }
        if let Some((index, &value)) = coords.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteCoordinate { index, value });
        }
        Ok(Point(coords))
    }

    pub fn origin(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        Point(vec![0.0; dim])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Point::new(coords)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

/// Accept `p` in `[1, inf)`; infinity is rejected here.
pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent(p))
    }
}

#[inline]
fn abs_pow(x: f64, p: f64) -> f64 {
    if p == 4.0 {
        let s = x * x;
        s * s
    } else if p == 2.0 {
        x * x
    } else if p == 1.0 {
        x.abs()
    } else {
        x.abs().powf(p)
    }
}

#[inline]
fn root(s: f64, p: f64) -> f64 {
    if p == 4.0 {
        s.sqrt().sqrt()
    } else if p == 2.0 {
        s.sqrt()
    } else if p == 1.0 {
        s
    } else {
        s.powf(p.recip())
    }
}

/// `(sum |v_i|^p)^(1/p)` with the largest magnitude factored out first.
pub(crate) fn norm_unchecked<I>(v: I, p: f64) -> f64
where
    I: IntoIterator<Item = f64> + Clone,
{
    let vmax = v.clone().into_iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if vmax == 0.0 {
        return 0.0;
    }
    let acc: NeumaierSum = v.into_iter().map(|x| abs_pow(x / vmax, p)).collect();
    vmax * root(acc.sum(), p)
}

/// `sum |v_i|^4` without taking a root.
pub(crate) fn fourth_power_sum<I: IntoIterator<Item = f64>>(v: I) -> f64 {
    v.into_iter().map(|x| abs_pow(x, 4.0)).collect::<NeumaierSum>().sum()
}

/// The p-norm of a slice, validating the exponent and the coordinates.
pub fn p_norm_slice(v: &[f64], p: f64) -> Result<f64> {
    check_exponent(p)?;
    if let Some((index, &value)) = v.iter().enumerate().find(|(_, x)| !x.is_finite()) {
        return Err(Error::NonFiniteCoordinate { index, value });
    }
    Ok(norm_unchecked(v.iter().copied(), p))
}

/// The p-norm `(sum |v_i|^p)^(1/p)`.
pub fn p_norm(v: &Point, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(norm_unchecked(v.0.iter().copied(), p))
}

#[inline]
pub(crate) fn distance_unchecked(u: &[f64], v: &[f64], p: f64) -> f64 {
    norm_unchecked(u.iter().zip(v).map(|(a, b)| a - b), p)
}

/// `p_norm(u - v, p)`.
pub fn distance(u: &Point, v: &Point, p: f64) -> Result<f64> {
    check_exponent(p)?;
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), found: v.dim() });
    }
    Ok(distance_unchecked(&u.0, &v.0, p))
}

/// A coordinate vector stored as maximal runs of equal values.
struct Runs {
    values: Vec<f64>,
    ends: Vec<usize>,
}

impl Runs {
    fn encode(v: &[f64]) -> Self {
        let mut values = Vec::new();
        let mut ends = Vec::new();
        for (i, &x) in v.iter().enumerate() {
            if values.last() == Some(&x) {
                *ends.last_mut().unwrap() = i + 1;
            } else {
                values.push(x);
                ends.push(i + 1);
            }
        }
        Runs { values, ends }
    }

    fn len(&self) -> usize {
        self.values.len()
    }

    /// Common refinement of two run structures as `(length, difference)` segments.
    fn segments<'a>(&'a self, other: &'a Runs) -> impl Iterator<Item = (usize, f64)> + Clone + 'a {
        let (mut a, mut b, mut start) = (0, 0, 0);
        std::iter::from_fn(move || {
            if a == self.len() {
                return None;
            }
            let end = self.ends[a].min(other.ends[b]);
            let seg = (end - start, self.values[a] - other.values[b]);
            start = end;
            if self.ends[a] == end {
                a += 1;
            }
            if other.ends[b] == end {
                b += 1;
            }
            Some(seg)
        })
    }

    fn distance(&self, other: &Runs, p: f64) -> f64 {
        let segs = self.segments(other);
        let vmax = segs.clone().fold(0.0_f64, |m, (_, d)| m.max(d.abs()));
        if vmax == 0.0 {
            return 0.0;
        }
        let acc: NeumaierSum = segs.map(|(len, d)| len as f64 * abs_pow(d / vmax, p)).collect();
        vmax * root(acc.sum(), p)
    }
}

/// A finite point set in `R^n` together with the exponent of the norm it is measured in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfiguration")]
pub struct Configuration {
    p: f64,
    points: Vec<Point>,
}

#[derive(Deserialize)]
struct RawConfiguration {
    p: f64,
    points: Vec<Point>,
}

impl TryFrom<RawConfiguration> for Configuration {
    type Error = Error;

    fn try_from(raw: RawConfiguration) -> Result<Self> {
        Configuration::new(raw.points, raw.p)
    }
}

impl Configuration {
    pub fn new(points: Vec<Point>, p: f64) -> Result<Self> {
        check_exponent(p)?;
        if points.len() < 2 {
            return Err(Error::TooFewPoints { required: 2, found: points.len() });
        }
        let dim = points[0].dim();
        if let Some(bad) = points.iter().find(|q| q.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.dim() });
        }
        Ok(Configuration { p, points })
    }

    /// Build from raw coordinate rows.
    pub fn from_rows(rows: Vec<Vec<f64>>, p: f64) -> Result<Self> {
        let points = rows.into_iter().map(Point::new).collect::<Result<Vec<_>>>()?;
        Configuration::new(points, p)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    /// Same points, different exponent.
    pub fn with_p(&self, p: f64) -> Result<Self> {
        Configuration::new(self.points.clone(), p)
    }

    /// Map every coordinate through `f`; the result is revalidated.
    pub fn map_coords(&self, mut f: impl FnMut(usize, usize, f64) -> f64) -> Result<Self> {
        let rows = self
            .points
            .iter()
            .enumerate()
            .map(|(i, pt)| pt.coords().iter().enumerate().map(|(d, &x)| f(i, d, x)).collect())
            .collect();
        Configuration::from_rows(rows, self.p)
    }

    /// All unordered pairs `(i, j)` with `i < j` and their distances.
    pub fn pairwise_distances(&self) -> Vec<((usize, usize), f64)> {
        let m = self.points.len();
        let mut out = Vec::with_capacity(m * (m - 1) / 2);
        self.for_each_pair(|i, j, d| out.push(((i, j), d)));
        out
    }

    /// Visit every unordered pair `i < j` in lexicographic order with its distance.
    ///
    /// Point sets whose coordinates come in long constant stretches are handled
    /// run by run instead of coordinate by coordinate.
    pub fn for_each_pair(&self, mut visit: impl FnMut(usize, usize, f64)) {
        let m = self.points.len();
        let runs: Vec<Runs> = self.points.iter().map(|pt| Runs::encode(pt.coords())).collect();
        let total: usize = runs.iter().map(|r| r.len()).sum();
        if total * 4 <= m * self.dim() {
            for i in 0..m {
                for j in i + 1..m {
                    visit(i, j, runs[i].distance(&runs[j], self.p));
                }
            }
        } else {
            for i in 0..m {
                for j in i + 1..m {
                    visit(i, j, distance_unchecked(&self.points[i].0, &self.points[j].0, self.p));
                }
            }
        }
    }
}

/// Largest and smallest pairwise distance of a configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub max_dist: f64,
    pub min_dist: f64,
    pub ratio: f64,
    pub argmax_pair: (usize, usize),
    pub argmin_pair: (usize, usize),
}

/// Max over min pairwise distance, with the pairs attaining them.
///
/// Coinciding points are an error; near-coincident points just produce a huge ratio.
pub fn ratio_report(c: &Configuration) -> Result<RatioReport> {
    let mut max = ((0, 1), f64::NEG_INFINITY);
    let mut min = ((0, 1), f64::INFINITY);
    c.for_each_pair(|i, j, d| {
        if d > max.1 {
            max = ((i, j), d);
        }
        if d < min.1 {
            min = ((i, j), d);
        }
    });
    if min.1 == 0.0 {
        return Err(Error::DuplicatePoints(min.0 .0, min.0 .1));
    }
    Ok(RatioReport { max_dist: max.1, min_dist: min.1, ratio: max.1 / min.1, argmax_pair: max.0, argmin_pair: min.0 })
}

/// Outcome of [`is_equilateral`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilateralCheck {
    pub equilateral: bool,
    /// Mean pairwise distance, present only when the set is equilateral.
    pub lambda: Option<f64>,
    pub max_dist: f64,
    pub min_dist: f64,
}

/// Equilateral iff `max - min <= tol * max` over all pairwise distances.
pub fn is_equilateral(c: &Configuration, tol: f64) -> Result<EquilateralCheck> {
    let report = ratio_report(c)?;
    let equilateral = report.max_dist - report.min_dist <= tol * report.max_dist;
    let lambda = equilateral.then(|| {
        let pairs = c.pairwise_distances();
        let total: NeumaierSum = pairs.iter().map(|&(_, d)| d).collect();
        total.sum() / pairs.len() as f64
    });
    Ok(EquilateralCheck { equilateral, lambda, max_dist: report.max_dist, min_dist: report.min_dist })
}

/// Pairwise distance values grouped into clusters of relative width `tol`.
///
/// Returns one representative (the cluster mean) per cluster in increasing order.
pub fn distinct_distances(c: &Configuration, tol: f64) -> Vec<f64> {
    let mut d: Vec<f64> = c.pairwise_distances().into_iter().map(|(_, d)| d).filter(|&d| d > 0.0).collect();
    d.sort_by(f64::total_cmp);
    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for x in d {
        match clusters.last_mut() {
            Some(cl) if x - cl[0] <= tol * x => cl.push(x),
            _ => clusters.push(vec![x]),
        }
    }
    clusters.iter().map(|cl| cl.iter().sum::<f64>() / cl.len() as f64).collect()
}
