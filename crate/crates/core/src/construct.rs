//! Explicit `n + 2` point sets in `l_4^n` with small distance ratio.
//!
//! For `k >= 1` let `a = (1 + x, x, ..., x)` and `b = (y, ..., y)` in `R^k`. The
//! `k` coordinate permutations of `a` together with `b` form an equilateral set
//! of side `2^(1/4)` in `l_4^k` exactly when
//!
//! ```text
//! (1 + x)^4 + (k - 1) x^4     = k y^4
//! (1 + x - y)^4 + (k - 1)(x - y)^4 = 2
//! ```
//!
//! With `f(t) = (((1 + t)^4 + (k - 1) t^4) / k)^(1/4)` the system reads
//! `f(x) = |y|`, `f(x - y) = (2/k)^(1/4)`. The branch used here has
//! `x - y = alpha_k`, the negative root of `f(t) = (2/k)^(1/4)`, and then `x` is
//! the unique root of the strictly decreasing `f(t) - t + alpha_k`, with
//! `y = x - alpha_k > 0`. The other branch (`x - y = beta_k > 0`) has `y < 0` and
//! is only available through [`case_two_branch`] as a diagnostic.
//!
//! Two copies of such a block placed in complementary coordinates give `n + 2`
//! points in `l_4^n` whose only distances are `2^(1/4)` inside a block and
//! `2^(1/4) ||a||_4` across blocks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lpgeom::Configuration;
use crate::roots::{bisect, expand_bracket, newton_polish};
use crate::sum::compensated_sum;
use crate::tolerance::Tolerances;

const BISECT_WIDTH: f64 = 1e-13;
const NEWTON_STEPS: usize = 4;
const MAX_DOUBLINGS: u32 = 60;

#[inline]
fn pow4(t: f64) -> f64 {
    let s = t * t;
    s * s
}

#[inline]
fn pow3(t: f64) -> f64 {
    t * t * t
}

/// `(1 + t)^4 + (k - 1) t^4`
fn quartic(t: f64, k: u64) -> f64 {
    compensated_sum([pow4(1.0 + t), (k - 1) as f64 * pow4(t)])
}

fn quartic_deriv(t: f64, k: u64) -> f64 {
    4.0 * pow3(1.0 + t) + 4.0 * (k - 1) as f64 * pow3(t)
}

fn check_k(k: u64) -> Result<()> {
    if k == 0 {
        return Err(Error::OutOfRange { name: "k", min: 1, value: 0 });
    }
    Ok(())
}

/// `f(t) = (((1 + t)^4 + (k - 1) t^4) / k)^(1/4)`.
///
/// # Panics
/// If `k == 0`.
pub fn f_eval(t: f64, k: u64) -> f64 {
    assert!(k >= 1, "k must be positive");
    (quartic(t, k) / k as f64).sqrt().sqrt()
}

/// `(2/k)^(1/4)`, the value `f` takes at `x - y`.
fn side_level(k: u64) -> f64 {
    (2.0 / k as f64).sqrt().sqrt()
}

/// The negative root `alpha_k` of `f(t) = (2/k)^(1/4)`; always below `-k^(-1/4)`.
pub fn solve_alpha(k: u64) -> Result<f64> {
    check_k(k)?;
    let level = side_level(k);
    let g = |t: f64| f_eval(t, k) - level;
    let hi = -(k as f64).powf(-0.25);
    // f(t) >= |1 + t| ((k-1)/k)^(1/4) left of -1, so this edge holds for every k >= 1
    let lo = expand_bracket(hi, -1.0 - 2f64.powf(0.25), |t| g(t) >= 0.0, MAX_DOUBLINGS)?;
    let root = bisect(g, lo, hi, BISECT_WIDTH)?;
    Ok(newton_polish(|t| quartic(t, k) - 2.0, |t| quartic_deriv(t, k), root, NEWTON_STEPS, lo, hi))
}

/// The positive root `beta_k` of `f(t) = (2/k)^(1/4)`.
pub fn solve_beta(k: u64) -> Result<f64> {
    check_k(k)?;
    let level = side_level(k);
    let hi = (k as f64).powf(-0.25);
    let root = bisect(|t| f_eval(t, k) - level, 0.0, hi, BISECT_WIDTH)?;
    Ok(newton_polish(|t| quartic(t, k) - 2.0, |t| quartic_deriv(t, k), root, NEWTON_STEPS, 0.0, hi))
}

/// `|scaled residual| * k` of the leading terms of `x_k`, `y_k`, `alpha_k` in `k^(-1/4)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Asymptotics {
    /// `|x + k^(-1/2) - k^(-3/4)| k`
    pub x_scaled: f64,
    /// `|y - k^(-1/4) + k^(-3/4)| k`
    pub y_scaled: f64,
    /// `|alpha + k^(-1/4) + k^(-1/2) - 2 k^(-3/4)| k`
    pub alpha_scaled: f64,
}

impl Asymptotics {
    fn new(k: u64, x: f64, y: f64, alpha: f64) -> Self {
        let kf = k as f64;
        let q = kf.powf(-0.25);
        let h = kf.powf(-0.5);
        let tq = kf.powf(-0.75);
        Asymptotics {
            x_scaled: (x + h - tq).abs() * kf,
            y_scaled: (y - q + tq).abs() * kf,
            alpha_scaled: (alpha + q + h - 2.0 * tq).abs() * kf,
        }
    }
}

/// The `y > 0` solution of the block equations for one `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionSolution {
    pub k: u64,
    pub x: f64,
    pub y: f64,
    pub alpha_root: f64,
    /// `|(1 + x)^4 + (k - 1) x^4 - k y^4|`
    pub residual1: f64,
    /// `|(1 + x - y)^4 + (k - 1)(x - y)^4 - 2|`
    pub residual2: f64,
    /// `|f(alpha) - (2/k)^(1/4)|`
    pub f_at_alpha_residual: f64,
    pub asymptotics: Asymptotics,
}

impl ConstructionSolution {
    /// `||a||_4 = ||b||_4 = k^(1/4) y`.
    pub fn block_norm(&self) -> f64 {
        (self.k as f64).powf(0.25) * self.y
    }

    /// `||a||_4^4 = k y^4`.
    pub fn block_norm_fourth(&self) -> f64 {
        self.k as f64 * pow4(self.y)
    }

    /// The `k + 1` points: the permutations of `(1 + x, x, ..., x)`, then `(y, ..., y)`.
    pub fn block_points(&self) -> Vec<Vec<f64>> {
        let k = self.k as usize;
        let mut out: Vec<Vec<f64>> = (0..k)
            .map(|i| {
                let mut a = vec![self.x; k];
                a[i] = 1.0 + self.x;
                a
            })
            .collect();
        out.push(vec![self.y; k]);
        out
    }
}

fn system_residuals(k: u64, x: f64, y: f64) -> (f64, f64) {
    let kf = k as f64;
    let r1 = compensated_sum([pow4(1.0 + x), (kf - 1.0) * pow4(x), -kf * pow4(y)]).abs();
    let r2 = compensated_sum([pow4(1.0 + x - y), (kf - 1.0) * pow4(x - y), -2.0]).abs();
    (r1, r2)
}

/// Solve the block equations on the `y > 0` branch.
pub fn solve_system(k: u64) -> Result<ConstructionSolution> {
    solve_system_with(k, &Tolerances::default())
}

/// [`solve_system`] with explicit tolerances; residuals above `tol.residual` are an error.
pub fn solve_system_with(k: u64, tol: &Tolerances) -> Result<ConstructionSolution> {
    check_k(k)?;
    let alpha = solve_alpha(k)?;
    let kf = k as f64;

    // f(t) - t is strictly decreasing; its root against -alpha is x_k
    let g = |t: f64| f_eval(t, k) - t + alpha;
    let hi = 0.0;
    let lo = expand_bracket(hi, -1.0, |t| g(t) >= 0.0, MAX_DOUBLINGS)?;
    let root = bisect(g, lo, hi, BISECT_WIDTH)?;
    let p = |t: f64| compensated_sum([quartic(t, k), -kf * pow4(t - alpha)]);
    let dp = |t: f64| quartic_deriv(t, k) - 4.0 * kf * pow3(t - alpha);
    let x = newton_polish(p, dp, root, NEWTON_STEPS, lo, hi);
    let y = x - alpha;

    let (residual1, residual2) = system_residuals(k, x, y);
    let sol = ConstructionSolution {
        k,
        x,
        y,
        alpha_root: alpha,
        residual1,
        residual2,
        f_at_alpha_residual: (f_eval(alpha, k) - side_level(k)).abs(),
        asymptotics: Asymptotics::new(k, x, y, alpha),
    };
    let threshold = -kf.powf(-0.25);
    if !(sol.y > 0.0 && sol.x < 0.0 && sol.alpha_root < threshold) {
        return Err(Error::NumericalBreakdown(format!(
            "k = {k}: solution (x = {x}, y = {y}, alpha = {alpha}) left the y > 0 branch"
        )));
    }
    // the alpha solve is held two orders tighter than the system it feeds
    if sol.residual1 > tol.residual || sol.residual2 > tol.residual || sol.f_at_alpha_residual > 1e-2 * tol.residual {
        return Err(Error::NumericalBreakdown(format!(
            "k = {k}: residuals {:e}, {:e}, {:e} too large",
            sol.residual1, sol.residual2, sol.f_at_alpha_residual
        )));
    }
    Ok(sol)
}

/// The `y < 0` solution, reported for diagnostics only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseTwoBranch {
    pub k: u64,
    pub beta_root: f64,
    pub x: f64,
    pub y: f64,
    pub residual1: f64,
    pub residual2: f64,
}

/// Solve on the `x - y = beta_k` branch. Never feeds a construction.
pub fn case_two_branch(k: u64) -> Result<CaseTwoBranch> {
    check_k(k)?;
    let beta = solve_beta(k)?;
    let kf = k as f64;
    // f(t) + t is strictly increasing; root against beta
    let h = |t: f64| f_eval(t, k) + t - beta;
    let lo = expand_bracket(0.0, -1.0, |t| h(t) <= 0.0, MAX_DOUBLINGS)?;
    let root = bisect(h, lo, 0.0, BISECT_WIDTH)?;
    let p = |t: f64| compensated_sum([quartic(t, k), -kf * pow4(t - beta)]);
    let dp = |t: f64| quartic_deriv(t, k) - 4.0 * kf * pow3(t - beta);
    let x = newton_polish(p, dp, root, NEWTON_STEPS, lo, 0.0);
    let y = x - beta;
    let (residual1, residual2) = system_residuals(k, x, y);
    Ok(CaseTwoBranch { k, beta_root: beta, x, y, residual1, residual2 })
}

/// The `k + 1` point equilateral set in `l_4^k`.
pub fn equilateral_block(k: u64) -> Result<Configuration> {
    Configuration::from_rows(solve_system(k)?.block_points(), 4.0)
}

/// An `n + 2` point configuration in `l_4^n` together with the solves behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuiltConfiguration {
    pub n: u64,
    pub config: Configuration,
    pub expected_ratio: f64,
    /// Solution for `k = floor(n/2)`.
    pub block: ConstructionSolution,
    /// Solution for `k + 1`, present for odd `n`.
    pub odd_block: Option<ConstructionSolution>,
}

fn place(block: &[Vec<f64>], before: usize, after: usize) -> impl Iterator<Item = Vec<f64>> + '_ {
    block.iter().map(move |a| {
        let mut row = vec![0.0; before];
        row.extend_from_slice(a);
        row.resize(before + a.len() + after, 0.0);
        row
    })
}

/// Two blocks in complementary coordinates: `k + 1` and `k + 1` points for `n = 2k`,
/// `k + 1` and `k + 2` points for `n = 2k + 1`.
pub fn build_configuration(n: u64) -> Result<BuiltConfiguration> {
    build_configuration_with(n, &Tolerances::default())
}

/// [`build_configuration`] with explicit tolerances for the block solves.
pub fn build_configuration_with(n: u64, tol: &Tolerances) -> Result<BuiltConfiguration> {
    if n < 2 {
        return Err(Error::OutOfRange { name: "n", min: 2, value: n });
    }
    let k = n / 2;
    let block = solve_system_with(k, tol)?;
    let first = block.block_points();
    let ku = k as usize;
    if n.is_multiple_of(2) {
        let rows = place(&first, 0, ku).chain(place(&first, ku, 0)).collect();
        Ok(BuiltConfiguration {
            n,
            config: Configuration::from_rows(rows, 4.0)?,
            expected_ratio: block.block_norm().recip(),
            block,
            odd_block: None,
        })
    } else {
        let second_sol = solve_system_with(k + 1, tol)?;
        let second = second_sol.block_points();
        let rows = place(&first, 0, ku + 1).chain(place(&second, ku, 0)).collect();
        let cross4 = block.block_norm_fourth() + second_sol.block_norm_fourth();
        Ok(BuiltConfiguration {
            n,
            config: Configuration::from_rows(rows, 4.0)?,
            expected_ratio: (2.0 / cross4).sqrt().sqrt(),
            block,
            odd_block: Some(second_sol),
        })
    }
}
