//! Hard resource caps. Exceeding one is always an error, never a silent truncation.

use crate::error::{Error, Result};

/// Environment variable overriding the radius cap.
pub const MAX_RADIUS_ENV: &str = "BDL_MAX_RADIUS";

/// Ball size permitted by default; this is |B_12| in rank 2.
const DEFAULT_BALL_BUDGET: u128 = 1_062_883;

pub const DEFAULT_MAX_DEPTH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// `None` means "derive from the ball budget for the rank in use".
    pub max_radius: Option<usize>,
    pub max_depth: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_radius: None,
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

impl Limits {
    /// Default limits, with the radius cap taken from `BDL_MAX_RADIUS` when set.
    pub fn from_env() -> Self {
        let max_radius = std::env::var(MAX_RADIUS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok());
        Limits {
            max_radius,
            ..Limits::default()
        }
    }

    pub fn radius_cap(&self, rank: usize) -> usize {
        if let Some(r) = self.max_radius {
            return r;
        }
        let mut r = 0;
        while ball_size(rank, r + 1) <= DEFAULT_BALL_BUDGET {
            r += 1;
        }
        r
    }

    pub fn check_radius(&self, rank: usize, radius: usize) -> Result<()> {
        let cap = self.radius_cap(rank);
        if radius > cap {
            return Err(Error::Resource {
                what: "ball radius",
                requested: radius,
                limit: cap,
            });
        }
        Ok(())
    }

    pub fn check_depth(&self, depth: usize) -> Result<()> {
        if depth > self.max_depth {
            return Err(Error::Resource {
                what: "cylinder depth",
                requested: depth,
                limit: self.max_depth,
            });
        }
        Ok(())
    }
}

/// Number of reduced words of length at most `radius` in the free group of the given rank.
pub fn ball_size(rank: usize, radius: usize) -> u128 {
    let k = 2 * rank as u128;
    let mut total = 1u128;
    let mut sphere = k;
    for _ in 0..radius {
        total = total.saturating_add(sphere);
        sphere = sphere.saturating_mul(k - 1);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_cap_is_twelve_in_rank_two() {
        let limits = Limits::default();
        assert_eq!(limits.radius_cap(2), 12);
        assert_eq!(limits.radius_cap(3), 8);
    }

    #[test]
    fn ball_size_formula() {
        assert_eq!(ball_size(2, 0), 1);
        assert_eq!(ball_size(2, 1), 5);
        assert_eq!(ball_size(2, 2), 17);
        assert_eq!(ball_size(3, 2), 1 + 6 + 30);
    }

    #[test]
    fn exceeding_cap_names_the_bound() {
        let limits = Limits {
            max_radius: Some(3),
            ..Limits::default()
        };
        let err = limits.check_radius(2, 4).unwrap_err();
        assert!(err.to_string().contains("bound 3"), "{err}");
    }
}
