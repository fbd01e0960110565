//! Closed-form lower bounds on the distance ratio of `n + 2` points, and the
//! exponent windows around `p = 2` and `p = 4` where equilateral sets have at
//! most `n + 1` points.
//!
//! For `n + 2` points in `l_p^n` with `p` in `{2, 4}` the ratio of the largest
//! to the smallest distance is at least `(1 + 2/n)^(1/p)` for even `n` and
//! `(1 + 2/(n - 1/(n+2)))^(1/p)` for odd `n`. Combined with the comparison
//! `||v||_4 <= ||v||_p <= n^|1/p - 1/4| ||v||_4` this rules out equilateral
//! sets of `n + 2` points whenever `|p - c| < c log(1 + 2/n) / log(n + 2)`.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::sig17;

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::OutOfRange { name: "n", min: 1, value: n });
    }
    Ok(())
}

fn check_center(p: f64) -> Result<()> {
    if p == 2.0 || p == 4.0 {
        Ok(())
    } else {
        Err(Error::UnsupportedExponent(p))
    }
}

/// The quantity `q` with `bound^p = 1 + q`.
fn bound_increment(n: u64) -> f64 {
    let n = n as f64;
    if n % 2.0 == 0.0 {
        2.0 / n
    } else {
        // 2 / (n - 1/(n+2)) = 2(n+2) / (n^2 + 2n - 1)
        2.0 * (n + 2.0) / (n * n + 2.0 * n - 1.0)
    }
}

/// Lower bound on the max/min distance ratio of `n + 2` points in `l_p^n`, `p` in `{2, 4}`.
pub fn schuette_bound(n: u64, p: f64) -> Result<f64> {
    check_n(n)?;
    check_center(p)?;
    Ok((bound_increment(n).ln_1p() / p).exp())
}

/// Half-width of the window around `center_p` (2 or 4) in which `e(l_p^n) = n + 1`.
pub fn epsilon_threshold(n: u64, center_p: f64) -> Result<f64> {
    check_n(n)?;
    check_center(center_p)?;
    let n = n as f64;
    Ok(center_p * (2.0 / n).ln_1p() / (n + 2.0).ln())
}

/// `n^|1/4 - 1/p|`, the comparison constant between `||.||_4` and `||.||_p` on `R^n`.
///
/// `p = f64::INFINITY` is accepted as the limit exponent `1/4`.
pub fn norm_equivalence_factor(n: u64, p: f64) -> Result<f64> {
    check_n(n)?;
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    let exponent = (0.25 - p.recip()).abs();
    Ok((n as f64).powf(exponent))
}

/// `bound^4` for `p = 4` as an exact rational.
pub fn bound_fourth_power_exact(n: u64) -> Result<Ratio<u128>> {
    check_n(n)?;
    let n = n as u128;
    Ok(if n.is_multiple_of(2) { Ratio::new(n + 2, n) } else { Ratio::new(n * n + 4 * n + 3, n * n + 2 * n - 1) })
}

/// Minimum of `2 / (2 - 1/K - 1/L)` over all splits `K + L = n + 2`, `K, L >= 1`, exactly.
pub fn split_minimum_exact(n: u64) -> Result<Ratio<u128>> {
    check_n(n)?;
    let m = n as u128 + 2;
    // 2 / (2 - 1/K - 1/L) = 2KL / (2KL - K - L); compare unreduced by cross-multiplying
    let mut best = (u128::MAX, 1u128);
    for k in 1..m {
        let l = m - k;
        let (num, den) = (2 * k * l, 2 * k * l - k - l);
        if num * best.1 < best.0.saturating_mul(den) {
            best = (num, den);
        }
    }
    Ok(Ratio::new(best.0, best.1))
}

/// Floating-point version of [`split_minimum_exact`].
pub fn split_minimum(n: u64) -> Result<f64> {
    check_n(n)?;
    let m = n + 2;
    Ok((1..m)
        .map(|k| {
            let (k, l) = (k as f64, (m - k) as f64);
            2.0 / (2.0 - k.recip() - l.recip())
        })
        .fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub n: u64,
    pub p: f64,
    pub bound: f64,
    pub epsilon: f64,
}

impl BoundRow {
    pub fn new(n: u64, p: f64) -> Result<Self> {
        Ok(BoundRow { n, p, bound: schuette_bound(n, p)?, epsilon: epsilon_threshold(n, p)? })
    }
}

/// Rows of bound and threshold values over a range of dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundTable {
    pub rows: Vec<BoundRow>,
}

impl BoundTable {
    pub const CSV_HEADER: &'static str = "n,p,bound,epsilon";

    /// One row per `n` in `first..=last`.
    pub fn sweep(first: u64, last: u64, p: f64) -> Result<Self> {
        check_n(first)?;
        if last < first {
            return Err(Error::OutOfRange { name: "sweep end", min: first, value: last });
        }
        let rows = (first..=last).map(|n| BoundRow::new(n, p)).collect::<Result<_>>()?;
        Ok(BoundTable { rows })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.n, sig17(r.p), sig17(r.bound), sig17(r.epsilon)));
        }
        out
    }

    /// Parse [`to_csv`](Self::to_csv) output; lines starting with `#` are skipped.
    pub fn from_csv(text: &str) -> Result<Self, String> {
        let mut lines = text.lines().filter(|l| !l.starts_with('#'));
        match lines.next() {
            Some(h) if h.trim() == Self::CSV_HEADER => {}
            other => return Err(format!("bad header {other:?}")),
        }
        let rows = lines
            .filter(|l| !l.trim().is_empty())
            .map(|line| {
                let f: Vec<&str> = line.split(',').collect();
                if f.len() != 4 {
                    return Err(format!("expected 4 fields in {line:?}"));
                }
                let num = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("{s:?}: {e}"));
                Ok(BoundRow {
                    n: f[0].trim().parse().map_err(|e| format!("{:?}: {e}", f[0]))?,
                    p: num(f[1])?,
                    bound: num(f[2])?,
                    epsilon: num(f[3])?,
                })
            })
            .collect::<Result<_, String>>()?;
        Ok(BoundTable { rows })
    }
}
