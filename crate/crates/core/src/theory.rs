//! Spherical-cap geometry behind the degeneration/retrieval bounds.
//!
//! A cap `Cap(n, x, b)` is the part of the unit ball in `R^n` cut off by a
//! hyperplane orthogonal to the apex `x`, whose base is an `(n-1)`-ball of
//! radius `b`. Its colatitude is `phi = asin(b)`.
//!
//! Two measures are exposed:
//!
//! - [`CapMeasure::Volume`]: `V(cap) / V(B_n) = 1/2 I_{b^2}((n+1)/2, 1/2)`.
//!   This is the quantity the bound checks use.
//! - [`CapMeasure::Surface`]: `A(cap) / A(S_{n-1}) = 1/2 I_{b^2}((n-1)/2, 1/2)`,
//!   the probability that a uniform point on the sphere lands in the cap.
//!
//! `I` is the regularized incomplete beta function.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

/// Samples per deterministic Monte Carlo substream.
pub const MC_BLOCK: u64 = 1 << 16;

/// Tolerance on `A(S_{n-1}) / V(B_n) == n`.
pub const LEMMA2_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CapMeasure {
    #[default]
    Volume,
    Surface,
}

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("dimension n = {n} must be >= 2")));
    }
    Ok(())
}

fn check_radius(b: f64, allow_one: bool) -> Result<()> {
    let ok = b.is_finite() && b > 0.0 && (b < 1.0 || (allow_one && b == 1.0));
    if ok {
        Ok(())
    } else if allow_one {
        Err(Error::InvalidParameter(format!("cap radius b = {b} outside (0, 1]")))
    } else {
        Err(Error::InvalidParameter(format!("cap radius b = {b} outside (0, 1)")))
    }
}

/// Exact fraction of the ball (or sphere) covered by a cap of base radius `b`.
pub fn cap_fraction(n: usize, b: f64, measure: CapMeasure) -> Result<f64> {
    check_dim(n)?;
    check_radius(b, true)?;
    if b == 1.0 {
        return Ok(0.5);
    }
    let a = match measure {
        CapMeasure::Volume => (n as f64 + 1.0) / 2.0,
        CapMeasure::Surface => (n as f64 - 1.0) / 2.0,
    };
    Ok(0.5 * beta_reg(a, 0.5, b * b))
}

/// `V(Cap(n, x, b)) / V(B_n)`.
pub fn cap_fraction_exact(n: usize, b: f64) -> Result<f64> {
    cap_fraction(n, b, CapMeasure::Volume)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    /// Binomial standard error `sqrt(p(1-p)/samples)`.
    pub stderr: f64,
    pub samples: u64,
}

/// Monte Carlo estimate of the volume cap fraction.
pub fn cap_fraction_mc(n: usize, b: f64, samples: u64, seed: u64) -> Result<McEstimate> {
    cap_fraction_mc_with(n, b, samples, seed, CapMeasure::Volume)
}

/// Monte Carlo cap fraction with the apex at the first basis vector.
///
/// Directions are normalized isotropic Gaussians; for [`CapMeasure::Volume`]
/// they are scaled by `U^(1/n)` to be uniform in the ball. A point `p` is in
/// the cap iff `p_0 >= sqrt(1 - b^2)`. Samples are drawn in blocks of
/// [`MC_BLOCK`], each from its own ChaCha stream keyed by `(seed, block)`,
/// so the result is independent of the thread count.
pub fn cap_fraction_mc_with(n: usize, b: f64, samples: u64, seed: u64, measure: CapMeasure) -> Result<McEstimate> {
    check_dim(n)?;
    check_radius(b, true)?;
    if samples == 0 {
        return Err(Error::InvalidParameter("Monte Carlo needs at least one sample".into()));
    }
    let cos_phi = (1.0 - b * b).sqrt();
    let inv_n = 1.0 / n as f64;
    let blocks = samples.div_ceil(MC_BLOCK);
    let hits: u64 = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(block);
            let count = MC_BLOCK.min(samples - block * MC_BLOCK);
            let mut hits = 0u64;
            let mut g = vec![0.0f64; n];
            for _ in 0..count {
                for x in g.iter_mut() {
                    *x = rng.sample(StandardNormal);
                }
                let len = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                let radius = match measure {
                    CapMeasure::Volume => rng.random::<f64>().powf(inv_n),
                    CapMeasure::Surface => 1.0,
                };
                if radius * g[0] / len >= cos_phi {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let p = hits as f64 / samples as f64;
    Ok(McEstimate {
        estimate: p,
        stderr: (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
    })
}

/// `Gamma(m / 2)` for integer `m >= 1`, by the half-integer recursion.
fn gamma_half(m: usize) -> f64 {
    let (mut x, mut acc) = if m.is_multiple_of(2) {
        (1.0, 1.0)
    } else {
        (0.5, std::f64::consts::PI.sqrt())
    };
    while x < m as f64 / 2.0 {
        acc *= x;
        x += 1.0;
    }
    acc
}

/// `V(B_n) = pi^(n/2) / Gamma(n/2 + 1)`.
pub fn unit_ball_volume(n: usize) -> f64 {
    std::f64::consts::PI.powf(n as f64 / 2.0) / gamma_half(n + 2)
}

/// `A(S_{n-1}) = 2 pi^(n/2) / Gamma(n/2)`.
pub fn unit_sphere_area(n: usize) -> f64 {
    2.0 * std::f64::consts::PI.powf(n as f64 / 2.0) / gamma_half(n)
}

/// `A(S_{n-1}) / V(B_n)`, which equals `n`.
pub fn sphere_area_volume_ratio(n: usize) -> Result<f64> {
    check_dim(n)?;
    Ok(unit_sphere_area(n) / unit_ball_volume(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// Sphere area over ball volume equals `n`.
    Lemma2,
    /// `b^(n+1) / (4n) < V-fraction < b^n / 2`.
    Thm3,
    /// `b^(n+1) / 4 < P < n b^n / 2`, with the cap fraction standing in for `P`.
    Thm1,
    /// `f(b1) / f(b2) < (2n / b2) (b1 / b2)^n`.
    Corollary,
}

impl CheckKind {
    pub fn name(&self) -> &'static str {
        match self {
            CheckKind::Lemma2 => "lemma2",
            CheckKind::Thm3 => "thm3",
            CheckKind::Thm1 => "thm1",
            CheckKind::Corollary => "corollary",
        }
    }
}

/// Result of one geometry check.
#[derive(Debug, Clone, PartialEq)]
pub struct CapCheck {
    pub kind: CheckKind,
    pub n: usize,
    /// Cap radius; `b1` for the corollary, unused for lemma 2.
    pub b: Option<f64>,
    pub b2: Option<f64>,
    /// The checked quantity: a cap fraction, a fraction ratio, or the lemma-2 ratio.
    pub exact: f64,
    pub mc: Option<McEstimate>,
    pub lower: Option<f64>,
    pub upper: f64,
    pub holds: bool,
}

impl CapCheck {
    /// Whether the lower bound alone is satisfied (strictly).
    pub fn lower_holds(&self) -> bool {
        self.lower.is_none_or(|l| self.exact > l)
    }

    pub fn upper_holds(&self) -> bool {
        self.exact < self.upper
    }
}

pub fn check_thm3_bounds(n: usize, b: f64) -> Result<CapCheck> {
    check_dim(n)?;
    check_radius(b, false)?;
    let exact = cap_fraction_exact(n, b)?;
    let lower = b.powi(n as i32 + 1) / (4.0 * n as f64);
    let upper = 0.5 * b.powi(n as i32);
    Ok(CapCheck {
        kind: CheckKind::Thm3,
        n,
        b: Some(b),
        b2: None,
        exact,
        mc: None,
        lower: Some(lower),
        upper,
        holds: lower < exact && exact < upper,
    })
}

/// Places the cap fraction against the retrieval-probability bounds. The
/// cap fraction is only a lower proxy for that probability, so a failed
/// lower bound here is a finding, not a bug.
pub fn check_thm1_bounds(n: usize, b: f64) -> Result<CapCheck> {
    check_dim(n)?;
    check_radius(b, false)?;
    let exact = cap_fraction_exact(n, b)?;
    let lower = 0.25 * b.powi(n as i32 + 1);
    let upper = 0.5 * n as f64 * b.powi(n as i32);
    Ok(CapCheck {
        kind: CheckKind::Thm1,
        n,
        b: Some(b),
        b2: None,
        exact,
        mc: None,
        lower: Some(lower),
        upper,
        holds: lower < exact && exact < upper,
    })
}

pub fn check_corollary(n: usize, b1: f64, b2: f64) -> Result<CapCheck> {
    check_dim(n)?;
    check_radius(b1, false)?;
    check_radius(b2, false)?;
    if b1 >= b2 {
        return Err(Error::InvalidParameter(format!("need b1 < b2, got {b1} >= {b2}")));
    }
    let ratio = cap_fraction_exact(n, b1)? / cap_fraction_exact(n, b2)?;
    let upper = 2.0 * n as f64 / b2 * (b1 / b2).powi(n as i32);
    Ok(CapCheck {
        kind: CheckKind::Corollary,
        n,
        b: Some(b1),
        b2: Some(b2),
        exact: ratio,
        mc: None,
        lower: None,
        upper,
        holds: ratio < upper,
    })
}

pub fn check_lemma2(n: usize) -> Result<CapCheck> {
    let ratio = sphere_area_volume_ratio(n)?;
    Ok(CapCheck {
        kind: CheckKind::Lemma2,
        n,
        b: None,
        b2: None,
        exact: ratio,
        mc: None,
        lower: Some(n as f64),
        upper: n as f64,
        holds: (ratio - n as f64).abs() <= LEMMA2_TOL,
    })
}

/// Grid for [`verify_grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct TheoryGrid {
    pub dims: Vec<usize>,
    pub radii: Vec<f64>,
    /// Monte Carlo samples per theorem-3 cell; 0 disables Monte Carlo.
    pub mc_samples: u64,
    pub seed: u64,
    pub include_thm1: bool,
    /// Cap on the number of `(n, b1 < b2)` corollary pairs; pairs are taken
    /// at evenly spaced positions of the full enumeration.
    pub max_corollary_pairs: usize,
}

impl Default for TheoryGrid {
    fn default() -> Self {
        TheoryGrid {
            dims: (2..=16).collect(),
            radii: (1..=19).map(|i| round_grid(i as f64 * 0.05)).collect(),
            mc_samples: 0,
            seed: 13,
            include_thm1: false,
            max_corollary_pairs: 200,
        }
    }
}

/// Snaps a generated grid value to 12 decimals so `3 * 0.05` prints as `0.15`.
pub fn round_grid(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

/// Runs lemma 2 for every `n`, theorem 3 (and optionally theorem 1) for every
/// `(n, b)` with `b < 1`, and the corollary on a subsample of pairs.
pub fn verify_grid(grid: &TheoryGrid) -> Result<Vec<CapCheck>> {
    let radii: Vec<f64> = grid.radii.iter().copied().filter(|&b| b < 1.0).collect();
    let mut out = Vec::new();
    for &n in &grid.dims {
        out.push(check_lemma2(n)?);
    }
    for &n in &grid.dims {
        for &b in &radii {
            let mut c = check_thm3_bounds(n, b)?;
            if grid.mc_samples > 0 {
                c.mc = Some(cap_fraction_mc(n, b, grid.mc_samples, grid.seed)?);
            }
            out.push(c);
        }
    }
    if grid.include_thm1 {
        for &n in &grid.dims {
            for &b in &radii {
                out.push(check_thm1_bounds(n, b)?);
            }
        }
    }
    let mut pairs = Vec::new();
    for &n in &grid.dims {
        for (i, &b1) in radii.iter().enumerate() {
            for &b2 in &radii[i + 1..] {
                if b1 < b2 {
                    pairs.push((n, b1, b2));
                }
            }
        }
    }
    let take = pairs.len().min(grid.max_corollary_pairs);
    for k in 0..take {
        let (n, b1, b2) = pairs[k * pairs.len() / take];
        out.push(check_corollary(n, b1, b2)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hemisphere() {
        for n in 2..10 {
            assert_eq!(cap_fraction_exact(n, 1.0).unwrap(), 0.5);
            assert_eq!(cap_fraction(n, 1.0, CapMeasure::Surface).unwrap(), 0.5);
        }
    }

    #[test]
    fn three_dim_closed_forms() {
        // Volume: pi h^2 (3 - h) / 3 over 4 pi / 3 with h = 1/2.
        let b = 3f64.sqrt() / 2.0;
        assert!((cap_fraction_exact(3, b).unwrap() - 5.0 / 32.0).abs() < 1e-10);
        // Surface (Archimedes): h / 2.
        assert!((cap_fraction(3, b, CapMeasure::Surface).unwrap() - 0.25).abs() < 1e-10);
    }

    #[test]
    fn planar_closed_forms() {
        let b = std::f64::consts::FRAC_1_SQRT_2;
        // Circular segment with half-angle pi/4: (theta - sin theta) / (2 pi), theta = pi/2.
        let segment = (std::f64::consts::FRAC_PI_2 - 1.0) / (2.0 * std::f64::consts::PI);
        assert!((cap_fraction_exact(2, b).unwrap() - segment).abs() < 1e-10);
        // Arc: a quarter of the circle.
        assert!((cap_fraction(2, b, CapMeasure::Surface).unwrap() - 0.25).abs() < 1e-10);
    }

    #[test]
    fn domain_errors() {
        assert!(cap_fraction_exact(1, 0.5).is_err());
        assert!(cap_fraction_exact(3, 0.0).is_err());
        assert!(cap_fraction_exact(3, 1.5).is_err());
        assert!(check_thm3_bounds(3, 1.0).is_err());
        assert!(check_corollary(3, 0.5, 0.5).is_err());
        assert!(cap_fraction_mc(3, 0.5, 0, 1).is_err());
    }

    #[test]
    fn thm3_examples() {
        let c = check_thm3_bounds(3, 0.5).unwrap();
        assert!((c.exact - 0.012_860_710_371).abs() < 1e-11);
        assert!((c.lower.unwrap() - 0.0625 / 12.0).abs() < 1e-15);
        assert_eq!(c.upper, 0.0625);
        assert!(c.holds);
        assert!(check_thm3_bounds(2, std::f64::consts::FRAC_1_SQRT_2).unwrap().holds);
        assert!(check_thm3_bounds(10, 0.9).unwrap().holds);
    }

    #[test]
    fn thm1_examples() {
        let c = check_thm1_bounds(3, 0.5).unwrap();
        assert_eq!(c.lower, Some(0.015625));
        assert_eq!(c.upper, 0.1875);
        assert!(!c.lower_holds());
        assert!(c.upper_holds());
        assert!(!c.holds);
        assert!(check_thm1_bounds(2, 0.1).unwrap().upper_holds());
    }

    #[test]
    fn corollary_examples() {
        let c = check_corollary(3, 0.25, 0.5).unwrap();
        assert!((c.exact - 0.0581).abs() < 5e-4, "{}", c.exact);
        assert_eq!(c.upper, 1.5);
        assert!(c.holds);
        let c = check_corollary(3, 0.5 - 1e-9, 0.5).unwrap();
        assert!((c.exact - 1.0).abs() < 1e-6 && c.holds);
        assert!(check_corollary(5, 0.3, 0.9).unwrap().holds);
    }

    #[test]
    fn lemma2_examples() {
        assert!((sphere_area_volume_ratio(2).unwrap() - 2.0).abs() < 1e-15);
        assert!((sphere_area_volume_ratio(3).unwrap() - 3.0).abs() < 1e-15);
        assert!((unit_sphere_area(4) - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-12);
        assert!((unit_ball_volume(4) - std::f64::consts::PI.powi(2) / 2.0).abs() < 1e-12);
        assert!((sphere_area_volume_ratio(4).unwrap() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn mc_is_deterministic_and_close() {
        let b = 3f64.sqrt() / 2.0;
        let a = cap_fraction_mc(3, b, 200_000, 5).unwrap();
        let again = cap_fraction_mc(3, b, 200_000, 5).unwrap();
        assert_eq!(a, again);
        assert!((a.estimate - 5.0 / 32.0).abs() <= 4.0 * a.stderr);
        let h = cap_fraction_mc(4, 1.0, 200_000, 5).unwrap();
        assert!((h.estimate - 0.5).abs() <= 4.0 * h.stderr);
        let s = cap_fraction_mc_with(3, b, 200_000, 5, CapMeasure::Surface).unwrap();
        assert!((s.estimate - 0.25).abs() <= 4.0 * s.stderr);
    }

    #[test]
    fn default_grid_counts() {
        let checks = verify_grid(&TheoryGrid::default()).unwrap();
        let count = |k| checks.iter().filter(|c| c.kind == k).count();
        assert_eq!(count(CheckKind::Lemma2), 15);
        assert_eq!(count(CheckKind::Thm3), 15 * 19);
        assert_eq!(count(CheckKind::Thm1), 0);
        assert_eq!(count(CheckKind::Corollary), 200);
        assert!(checks.iter().all(|c| c.holds));
    }
}
