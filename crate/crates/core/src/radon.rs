//! Radon partitions and the fourth-power distance-ratio certificate.
//!
//! Any `n + 2` points of `R^n` split into two groups `A`, `B` whose convex hulls
//! share a point `o`. Writing `o` as convex combinations `sum alpha_i a_i` and
//! `sum beta_j b_j`, expanding `||a_i - a_j||_4^4` and `||a_i - b_j||_4^4`
//! coordinate-wise and averaging with the weights yields
//!
//! ```text
//! (M / mu)^4 >= 2 / (2 - sum alpha_i^2 - sum beta_j^2)
//! ```
//!
//! where `M` and `mu` are the largest and smallest distances. [`audit_chain`]
//! evaluates every intermediate inequality of that derivation on a concrete
//! configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::null_vector;
use crate::lpgeom::{fourth_power_sum, ratio_report, Configuration, Point};
use crate::sum::{compensated_sum, NeumaierSum};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadonCertificate {
    pub side_a: Vec<usize>,
    pub side_b: Vec<usize>,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    /// The shared point of both convex hulls, in the input coordinates.
    pub common_point: Point,
    pub certificate: f64,
    /// Largest deviation of either weighted sum from `common_point`, relative to
    /// the largest coordinate magnitude.
    pub residual: f64,
    /// Smallest over largest pivot during elimination.
    pub pivot_ratio: f64,
}

impl RadonCertificate {
    pub fn k(&self) -> usize {
        self.side_a.len()
    }

    pub fn l(&self) -> usize {
        self.side_b.len()
    }

    fn weight_square_sums(&self) -> (f64, f64) {
        (compensated_sum(self.alphas.iter().map(|a| a * a)), compensated_sum(self.betas.iter().map(|b| b * b)))
    }
}

fn weighted_sum(points: &[Point], idx: &[usize], w: &[f64], dim: usize) -> Vec<f64> {
    (0..dim).map(|d| compensated_sum(idx.iter().zip(w).map(|(&i, &wi)| wi * points[i].coords()[d]))).collect()
}

fn check_radon_input(points: &[Point]) -> Result<usize> {
    let m = points.len();
    let dim = points.first().map(Point::dim).ok_or(Error::TooFewPoints { required: 3, found: 0 })?;
    if let Some(bad) = points.iter().find(|q| q.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: bad.dim() });
    }
    if m != dim + 2 {
        return Err(Error::WrongPointCount { expected: dim + 2, dim, found: m });
    }
    Ok(dim)
}

/// Radon partition of exactly `n + 2` points in `R^n`, with default tolerances.
pub fn radon_partition(points: &[Point]) -> Result<RadonCertificate> {
    radon_partition_with(points, &Tolerances::default())
}

/// Radon partition of exactly `n + 2` points in `R^n`.
///
/// Finds `lambda != 0` with `sum lambda_i = 0` and `sum lambda_i x_i = 0`. Positive
/// entries form side A, the rest side B; exact zeros land in B with weight 0.
pub fn radon_partition_with(points: &[Point], tol: &Tolerances) -> Result<RadonCertificate> {
    let dim = check_radon_input(points)?;
    let m = points.len();

    // Centre and scale; the dependence vector is invariant under both.
    let centroid: Vec<f64> =
        (0..dim).map(|d| compensated_sum(points.iter().map(|q| q.coords()[d])) / m as f64).collect();
    let spread = points
        .iter()
        .flat_map(|q| q.coords().iter().zip(&centroid).map(|(x, c)| (x - c).abs()))
        .fold(0.0_f64, f64::max);
    let spread = if spread > 0.0 { spread } else { 1.0 };
    let mut rows: Vec<Vec<f64>> =
        (0..dim).map(|d| points.iter().map(|q| (q.coords()[d] - centroid[d]) / spread).collect()).collect();
    rows.push(vec![1.0; m]);

    let nv = null_vector(&rows)?;
    let lambda = nv.vector;

    let (mut side_a, mut side_b) = (Vec::new(), Vec::new());
    for (i, &l) in lambda.iter().enumerate() {
        if l > 0.0 {
            side_a.push(i);
        } else {
            side_b.push(i);
        }
    }
    let pos = compensated_sum(side_a.iter().map(|&i| lambda[i]));
    let neg = -compensated_sum(side_b.iter().map(|&i| lambda[i]));
    if side_a.is_empty() || side_b.is_empty() || !(pos > 0.0 && neg > 0.0) {
        return Err(Error::NumericalBreakdown(format!(
            "dependence vector has one-signed entries (pivot ratio {:e})",
            nv.pivot_ratio
        )));
    }
    let alphas: Vec<f64> = side_a.iter().map(|&i| lambda[i] / pos).collect();
    let betas: Vec<f64> = side_b.iter().map(|&i| -lambda[i] / neg).collect();

    let from_a = weighted_sum(points, &side_a, &alphas, dim);
    let from_b = weighted_sum(points, &side_b, &betas, dim);
    let common: Vec<f64> = from_a.iter().zip(&from_b).map(|(a, b)| 0.5 * (a + b)).collect();

    let coord_scale = points.iter().flat_map(|q| q.coords()).fold(0.0_f64, |mx, x| mx.max(x.abs()));
    let raw = from_a.iter().zip(&from_b).map(|(a, b)| 0.5 * (a - b).abs()).fold(0.0_f64, f64::max);
    let residual = if coord_scale > 0.0 { raw / coord_scale } else { raw };
    if residual > tol.residual {
        return Err(Error::NumericalBreakdown(format!(
            "weight system residual {residual:e} exceeds {:e} (pivot ratio {:e})",
            tol.residual, nv.pivot_ratio
        )));
    }

    let mut cert = RadonCertificate {
        side_a,
        side_b,
        alphas,
        betas,
        common_point: Point::new(common)?,
        certificate: f64::NAN,
        residual,
        pivot_ratio: nv.pivot_ratio,
    };
    cert.certificate = certificate_bound(&cert)?;
    Ok(cert)
}

/// `2 / (2 - sum alpha^2 - sum beta^2)`, a lower bound on `(M/mu)^4` in `l_4^n`.
pub fn certificate_bound(cert: &RadonCertificate) -> Result<f64> {
    let (sa, sb) = cert.weight_square_sums();
    let denom = 2.0 - sa - sb;
    if denom.is_nan() || denom <= 0.0 {
        return Err(Error::NumericalBreakdown(format!("sum of squared weights {} leaves no room below 2", sa + sb)));
    }
    Ok(2.0 / denom)
}

/// One audited inequality `lhs >= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityRow {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl InequalityRow {
    fn new(lhs: f64, rhs: f64, slack: f64) -> Self {
        InequalityRow { lhs, rhs, holds: lhs >= rhs - slack * lhs.abs().max(1.0) }
    }
}

/// Both sides of every inequality in the derivation of the certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainAudit {
    /// `(1 - sum alpha^2) M^4 >= 2 sum alpha a^4 + 6 sum_m (sum alpha a_m^2)^2`.
    pub within_a: InequalityRow,
    /// The same for side B.
    pub within_b: InequalityRow,
    /// `sum alpha a^4 + sum beta b^4 >= mu^4 - 6 sum_m (sum alpha a_m^2)(sum beta b_m^2)`.
    pub across: InequalityRow,
    /// `(2 - sum alpha^2 - sum beta^2) M^4 >= 2 mu^4 + 6 * square_slack`.
    pub combined: InequalityRow,
    /// `M^4 / mu^4 >= 2 / (2 - sum alpha^2 - sum beta^2)`.
    pub ratio: InequalityRow,
    /// `sum_m (sum alpha a_m^2 - sum beta b_m^2)^2 >= 0`.
    pub square_slack: f64,
    /// Largest relative gap between the weighted pairwise sums and their expanded forms;
    /// zero in exact arithmetic when the weighted means vanish.
    pub expansion_residual: f64,
}

impl ChainAudit {
    pub fn rows(&self) -> [(&'static str, InequalityRow); 5] {
        [
            ("within_a", self.within_a),
            ("within_b", self.within_b),
            ("across", self.across),
            ("combined", self.combined),
            ("ratio", self.ratio),
        ]
    }

    pub fn all_hold(&self) -> bool {
        self.rows().iter().all(|(_, r)| r.holds)
    }
}

struct SideMoments {
    /// `sum_m sum_i w_i x_{i,m}^4`
    fourth: f64,
    /// `sum_i w_i x_{i,m}^2` per coordinate
    second: Vec<f64>,
    /// `sum_i sum_j w_i w_j ||x_i - x_j||_4^4`
    pairwise: f64,
}

fn side_moments(pts: &[Vec<f64>], w: &[f64]) -> SideMoments {
    let dim = pts.first().map_or(0, Vec::len);
    let fourth = compensated_sum(pts.iter().zip(w).map(|(x, wi)| wi * fourth_power_sum(x.iter().copied())));
    let second = (0..dim).map(|d| compensated_sum(pts.iter().zip(w).map(|(x, wi)| wi * x[d] * x[d]))).collect();
    let mut pairwise = NeumaierSum::new();
    for (xi, wi) in pts.iter().zip(w) {
        for (xj, wj) in pts.iter().zip(w) {
            pairwise.add(wi * wj * fourth_power_sum(xi.iter().zip(xj).map(|(a, b)| a - b)));
        }
    }
    SideMoments { fourth, second, pairwise: pairwise.sum() }
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Evaluate both sides of every inequality behind the certificate, on the points
/// translated so the common point is the origin.
pub fn audit_chain(config: &Configuration, cert: &RadonCertificate) -> Result<ChainAudit> {
    audit_chain_with(config, cert, &Tolerances::default())
}

pub fn audit_chain_with(config: &Configuration, cert: &RadonCertificate, tol: &Tolerances) -> Result<ChainAudit> {
    if config.p() != 4.0 {
        return Err(Error::UnsupportedExponent(config.p()));
    }
    let dim = check_radon_input(config.points())?;
    let m = config.len();
    let mut seen = vec![false; m];
    for &i in cert.side_a.iter().chain(&cert.side_b) {
        if i >= m || std::mem::replace(&mut seen[i], true) {
            return Err(Error::CertificateMismatch(format!("index {i} out of range or repeated")));
        }
    }
    if seen.iter().any(|s| !s) || cert.alphas.len() != cert.k() || cert.betas.len() != cert.l() {
        return Err(Error::CertificateMismatch("sides do not partition the points".into()));
    }
    if cert.common_point.dim() != dim {
        return Err(Error::CertificateMismatch("common point has wrong dimension".into()));
    }

    let o = cert.common_point.coords();
    let shifted = |i: usize| -> Vec<f64> { config.points()[i].coords().iter().zip(o).map(|(x, c)| x - c).collect() };
    let a_pts: Vec<Vec<f64>> = cert.side_a.iter().map(|&i| shifted(i)).collect();
    let b_pts: Vec<Vec<f64>> = cert.side_b.iter().map(|&i| shifted(i)).collect();

    let report = ratio_report(config)?;
    let big = report.max_dist.powi(4);
    let small = report.min_dist.powi(4);
    let (sa, sb) = cert.weight_square_sums();

    let a = side_moments(&a_pts, &cert.alphas);
    let b = side_moments(&b_pts, &cert.betas);
    let sq_a = compensated_sum(a.second.iter().map(|s| s * s));
    let sq_b = compensated_sum(b.second.iter().map(|s| s * s));
    let cross = compensated_sum(a.second.iter().zip(&b.second).map(|(x, y)| x * y));
    let square_slack = compensated_sum(a.second.iter().zip(&b.second).map(|(x, y)| (x - y) * (x - y)));

    let mut across_pairs = NeumaierSum::new();
    for (xa, wa) in a_pts.iter().zip(&cert.alphas) {
        for (xb, wb) in b_pts.iter().zip(&cert.betas) {
            across_pairs.add(wa * wb * fourth_power_sum(xa.iter().zip(xb).map(|(p, q)| p - q)));
        }
    }

    let rhs_a = 2.0 * a.fourth + 6.0 * sq_a;
    let rhs_b = 2.0 * b.fourth + 6.0 * sq_b;
    let expansion_residual = rel_gap(a.pairwise, rhs_a)
        .max(rel_gap(b.pairwise, rhs_b))
        .max(rel_gap(across_pairs.sum(), a.fourth + b.fourth + 6.0 * cross));

    let s = tol.slack;
    let audit = ChainAudit {
        within_a: InequalityRow::new((1.0 - sa) * big, rhs_a, s),
        within_b: InequalityRow::new((1.0 - sb) * big, rhs_b, s),
        across: InequalityRow::new(a.fourth + b.fourth, small - 6.0 * cross, s),
        combined: InequalityRow::new((2.0 - sa - sb) * big, 2.0 * small + 6.0 * square_slack, s),
        ratio: InequalityRow::new(big / small, certificate_bound(cert)?, s),
        square_slack,
        expansion_residual,
    };
    if let Some((name, row)) = audit.rows().into_iter().find(|(_, r)| !r.holds) {
        return Err(Error::InequalityViolated { name, lhs: row.lhs, rhs: row.rhs });
    }
    if expansion_residual > s {
        return Err(Error::NumericalBreakdown(format!("weighted expansion identities off by {expansion_residual:e}")));
    }
    Ok(audit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::schuette_bound;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pts(rows: &[&[f64]]) -> Vec<Point> {
        rows.iter().map(|r| Point::new(r.to_vec()).unwrap()).collect()
    }

    fn unit_square() -> Configuration {
        Configuration::new(pts(&[&[0., 0.], &[1., 0.], &[1., 1.], &[0., 1.]]), 4.0).unwrap()
    }

    /// Weights of index `i` in whichever side holds it.
    fn weight_of(cert: &RadonCertificate, i: usize) -> (char, f64) {
        if let Some(pos) = cert.side_a.iter().position(|&j| j == i) {
            ('a', cert.alphas[pos])
        } else {
            let pos = cert.side_b.iter().position(|&j| j == i).unwrap();
            ('b', cert.betas[pos])
        }
    }

    #[test]
    fn triangle_with_interior_point() {
        let p = pts(&[&[0., 0.], &[2., 0.], &[0., 2.], &[0.5, 0.5]]);
        let cert = radon_partition(&p).unwrap();
        let (lone, w) = weight_of(&cert, 3);
        assert!((w - 1.0).abs() < 1e-14);
        let expected = [0.5, 0.25, 0.25];
        for (i, e) in expected.iter().enumerate() {
            let (side, w) = weight_of(&cert, i);
            assert_ne!(side, lone);
            assert!((w - e).abs() < 1e-14);
        }
        assert!((cert.certificate - 3.2).abs() < 1e-13);
        let c = cert.common_point.coords();
        assert!((c[0] - 0.5).abs() < 1e-15 && (c[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn unit_square_diagonals() {
        let sq = unit_square();
        let cert = radon_partition(sq.points()).unwrap();
        let mut a = cert.side_a.clone();
        a.sort();
        assert!(a == vec![0, 2] || a == vec![1, 3]);
        assert!(cert.alphas.iter().chain(&cert.betas).all(|w| (w - 0.5).abs() < 1e-15));
        assert!((cert.certificate - 2.0).abs() < 1e-15);

        let audit = audit_chain(&sq, &cert).unwrap();
        assert!((audit.ratio.lhs - audit.ratio.rhs).abs() < 1e-12);
        assert!(audit.square_slack.abs() < 1e-15);
        assert!((audit.combined.lhs - audit.combined.rhs).abs() < 1e-12);
    }

    #[test]
    fn collinear_points_still_valid() {
        let p = pts(&[&[0., 0.], &[1., 0.], &[2.5, 0.], &[4., 0.]]);
        let cert = radon_partition(&p).unwrap();
        assert_eq!(cert.k() + cert.l(), 4);
        assert!(cert.k() >= 1 && cert.l() >= 1);
        assert!((cert.alphas.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((cert.betas.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(cert.alphas.iter().chain(&cert.betas).all(|&w| w >= 0.0));
        assert!(cert.residual <= 1e-10);
    }

    #[test]
    fn rejects_wrong_point_count() {
        let p = pts(&[&[0., 0.], &[1., 0.], &[0., 1.]]);
        assert_eq!(radon_partition(&p), Err(Error::WrongPointCount { expected: 4, dim: 2, found: 3 }));
    }

    #[test]
    fn uniform_weights_give_even_bound() {
        for n in (2..20usize).step_by(2) {
            let half = (n + 2) / 2;
            let cert = RadonCertificate {
                side_a: (0..half).collect(),
                side_b: (half..n + 2).collect(),
                alphas: vec![1.0 / half as f64; half],
                betas: vec![1.0 / half as f64; half],
                common_point: Point::origin(n),
                certificate: 0.0,
                residual: 0.0,
                pivot_ratio: 1.0,
            };
            let b = certificate_bound(&cert).unwrap();
            assert!((b - (1.0 + 2.0 / n as f64)).abs() < 1e-14);
        }
    }

    #[test]
    fn degenerate_weights_are_breakdown() {
        let cert = RadonCertificate {
            side_a: vec![0],
            side_b: vec![1],
            alphas: vec![1.0],
            betas: vec![1.0],
            common_point: Point::origin(1),
            certificate: 0.0,
            residual: 0.0,
            pivot_ratio: 1.0,
        };
        assert!(matches!(certificate_bound(&cert), Err(Error::NumericalBreakdown(_))));
    }

    #[test]
    fn zero_weight_members_do_not_matter() {
        let p = pts(&[&[0., 0.], &[2., 0.], &[0., 2.], &[0.5, 0.5]]);
        let mut cert = radon_partition(&p).unwrap();
        let before = certificate_bound(&cert).unwrap();
        cert.side_b.push(99);
        cert.betas.push(0.0);
        assert_eq!(certificate_bound(&cert).unwrap(), before);
    }

    fn random_config(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Configuration {
        let rows = (0..n + 2).map(|_| (0..n).map(|_| scale * rng.random_range(-1.0..1.0)).collect()).collect();
        Configuration::from_rows(rows, 4.0).unwrap()
    }

    #[test]
    fn random_configurations_audit_clean() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=6 {
            for _ in 0..100 {
                let c = random_config(&mut rng, n, 1.0);
                let cert = radon_partition(c.points()).unwrap();
                let audit = audit_chain(&c, &cert).unwrap();
                assert!(audit.all_hold());
                let r4 = ratio_report(&c).unwrap().ratio.powi(4);
                let floor = schuette_bound(n as u64, 4.0).unwrap().powi(4);
                assert!(r4 >= cert.certificate * (1.0 - 1e-9));
                assert!(cert.certificate >= floor * (1.0 - 1e-9));
            }
        }
    }

    #[test]
    fn audit_scales_with_fourth_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = random_config(&mut rng, 3, 1.0);
        let t = 3.0;
        let scaled = c.map_coords(|_, _, x| t * x).unwrap();
        let a1 = audit_chain(&c, &radon_partition(c.points()).unwrap()).unwrap();
        let a2 = audit_chain(&scaled, &radon_partition(scaled.points()).unwrap()).unwrap();
        let t4 = t.powi(4);
        for ((_, r1), (_, r2)) in a1.rows().iter().zip(a2.rows().iter()).take(4) {
            assert!((r2.lhs - t4 * r1.lhs).abs() <= 1e-10 * r2.lhs.abs().max(1.0));
            assert!((r2.rhs - t4 * r1.rhs).abs() <= 1e-10 * r2.rhs.abs().max(1.0));
        }
        assert!((a1.ratio.lhs - a2.ratio.lhs).abs() < 1e-12 * a1.ratio.lhs);
        assert!((a1.ratio.rhs - a2.ratio.rhs).abs() < 1e-12 * a1.ratio.rhs);
    }

    #[test]
    fn audit_rejects_mismatched_certificate() {
        let sq = unit_square();
        let mut cert = radon_partition(sq.points()).unwrap();
        cert.side_a[0] = cert.side_b[0];
        assert!(matches!(audit_chain(&sq, &cert), Err(Error::CertificateMismatch(_))));
        let p2 = sq.with_p(2.0).unwrap();
        assert!(matches!(audit_chain(&p2, &radon_partition(sq.points()).unwrap()), Err(Error::UnsupportedExponent(_))));
    }

    #[test]
    fn audit_detects_tampered_weights() {
        // Inflating the certificate past the true ratio must trip the final inequality.
        let sq = unit_square();
        let mut cert = radon_partition(sq.points()).unwrap();
        cert.alphas = vec![0.99, 0.01];
        cert.betas = vec![0.99, 0.01];
        assert!(audit_chain(&sq, &cert).is_err());
    }
}
