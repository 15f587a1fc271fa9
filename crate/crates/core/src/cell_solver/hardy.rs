//! Discrete check of the one-dimensional Hardy inequality
//! `int_0^inf t^-2 phi^2 <= 4 int_0^inf phi'^2`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Samples of a profile on an increasing grid starting at `t = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct HardyProfile {
    pub t: Vec<f64>,
    pub phi: Vec<f64>,
}

impl HardyProfile {
    pub fn sample(t: Vec<f64>, f: impl Fn(f64) -> f64) -> Self {
        let phi = t.iter().map(|&x| f(x)).collect();
        HardyProfile { t, phi }
    }
}

/// `int t^-2 phi^2` (trapezoidal rule, integrand 0 where `phi = 0`) over
/// `int phi'^2` (exact for the piecewise-linear interpolant). Zero when the
/// profile vanishes identically.
pub fn hardy_ratio(p: &HardyProfile) -> f64 {
    let weighted = |i: usize| {
        if p.phi[i] == 0.0 {
            0.0
        } else {
            (p.phi[i] / p.t[i]).powi(2)
        }
    };
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 1..p.t.len() {
        let dt = p.t[i] - p.t[i - 1];
        num += 0.5 * dt * (weighted(i - 1) + weighted(i));
        den += (p.phi[i] - p.phi[i - 1]).powi(2) / dt;
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn validate(index: usize, p: &HardyProfile) -> Result<()> {
    let invalid = |reason: &str| Error::ProfileInvalid {
        index,
        reason: reason.to_string(),
    };
    if p.t.len() != p.phi.len() || p.t.len() < 3 {
        return Err(invalid("needs at least three (t, phi) samples"));
    }
    if p.t[0] != 0.0 || p.t.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("grid must start at 0 and increase strictly"));
    }
    if p.phi.iter().any(|v| !v.is_finite()) {
        return Err(invalid("non-finite sample"));
    }
    if p.phi[0] != 0.0 || p.phi[1] != 0.0 {
        return Err(invalid("profile must vanish in a neighbourhood of t = 0"));
    }
    let peak = p.phi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if p.phi.last().unwrap().abs() > 1e-6 * peak {
        return Err(invalid("profile does not decay at the end of the grid"));
    }
    Ok(())
}

/// Largest Hardy ratio over the samples after checking their
/// preconditions.
pub fn hardy_check(samples: &[HardyProfile]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (index, p) in samples.iter().enumerate() {
        validate(index, p)?;
        worst = worst.max(hardy_ratio(p));
    }
    Ok(worst)
}

/// `phi(t) = (t - s) e^{-(t - s)}` for `t > s`, 0 otherwise, on a grid
/// graded towards `t = s`. The ratio tends to 2 as `s -> 0`.
pub fn shifted_exponential_profile(shift: f64, samples: usize, t_max: f64) -> HardyProfile {
    let mut t = vec![0.0];
    for i in 0..samples {
        let u = i as f64 / (samples - 1) as f64;
        t.push(shift + (t_max - shift) * u.powi(4));
    }
    HardyProfile::sample(t, |x| {
        let s = x - shift;
        if s > 0.0 {
            s * (-s).exp()
        } else {
            0.0
        }
    })
}

fn bump(x: f64) -> f64 {
    if x.abs() < 1.0 {
        (-1.0 / (1.0 - x * x)).exp()
    } else {
        0.0
    }
}

/// Seeded random sums of smooth compactly supported bumps, all vanishing on
/// `[0, 0.05]`, sampled on a uniform grid over `[0, 12]`.
pub fn random_bump_profiles(seed: u64, count: usize) -> Vec<HardyProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = 24_001;
    let t: Vec<f64> = (0..samples).map(|i| 12.0 * i as f64 / (samples - 1) as f64).collect();
    (0..count)
        .map(|_| {
            let bumps: Vec<(f64, f64, f64)> = (0..rng.gen_range(1..=4))
                .map(|_| {
                    let centre: f64 = rng.gen_range(0.3..8.0);
                    let width = rng.gen_range(0.1..(centre - 0.05).min(3.0));
                    let amp = rng.gen_range(-2.0..2.0);
                    (centre, width, amp)
                })
                .collect();
            HardyProfile::sample(t.clone(), |x| bumps.iter().map(|&(c, w, a)| a * bump((x - c) / w)).sum())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_profile_has_ratio_zero() {
        let p = HardyProfile::sample((0..100).map(|i| i as f64 * 0.1).collect(), |_| 0.0);
        assert_eq!(hardy_check(&[p]).unwrap(), 0.0);
    }

    #[test]
    fn shifted_exponential_is_close_to_two() {
        let r = hardy_ratio(&shifted_exponential_profile(1e-4, 40_000, 40.0));
        assert!((r - 2.0).abs() < 0.04, "ratio {r}");
    }

    #[test]
    fn profile_not_vanishing_at_zero_is_rejected() {
        let p = HardyProfile::sample((0..100).map(|i| i as f64 * 0.1).collect(), |t| (-t).exp());
        assert!(matches!(hardy_check(&[p]), Err(Error::ProfileInvalid { index: 0, .. })));
    }

    #[test]
    fn random_bumps_respect_the_constant() {
        let profiles = random_bump_profiles(7, 10);
        let r = hardy_check(&profiles).unwrap();
        assert!(r > 0.0 && r <= 4.0, "ratio {r}");
    }
}
