//! Discrete length distributions.

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::random::{Lottery, RandomSource};
use crate::rational::{self, Prob};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CdfError {
    #[error("CDF has no values")]
    Empty,
    #[error("CDF decreases at length {length}")]
    MonotonicityViolation { length: u32 },
    #[error("CDF value at length {length} lies outside [0,1]")]
    RangeViolation { length: u32 },
}

/// `values[t-1] = Pr[length <= t]` for `t = 1..=lmax`. Mass above `lmax`
/// never finishes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LengthCdf {
    values: Vec<Prob>,
}

/// Outcome of drawing a length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Realization {
    Finishes(u32),
    NeverFinishes,
}

impl Realization {
    pub fn length(self) -> Option<u32> {
        match self {
            Realization::Finishes(l) => Some(l),
            Realization::NeverFinishes => None,
        }
    }

    /// Whether a job with this length completes after `steps` steps of work.
    pub fn done_after(self, steps: u32) -> bool {
        matches!(self, Realization::Finishes(l) if l <= steps)
    }
}

pub fn validate_cdf(raw: Vec<Prob>) -> Result<LengthCdf, CdfError> {
    if raw.is_empty() {
        return Err(CdfError::Empty);
    }
    let zero = Prob::zero();
    let one = Prob::one();
    let mut prev = zero.clone();
    for (i, v) in raw.iter().enumerate() {
        let length = i as u32 + 1;
        if *v < zero || *v > one {
            return Err(CdfError::RangeViolation { length });
        }
        if *v < prev {
            return Err(CdfError::MonotonicityViolation { length });
        }
        prev = v.clone();
    }
    Ok(LengthCdf { values: raw })
}

pub fn point_mass(length: u32) -> LengthCdf {
    assert!(length >= 1, "point mass needs a positive length");
    let mut values = vec![Prob::zero(); length as usize];
    values[length as usize - 1] = Prob::one();
    LengthCdf { values }
}

/// Draws a length with one weighted choice so the exact engine can enumerate it.
pub fn sample_length(cdf: &LengthCdf, rng: &mut dyn RandomSource) -> Realization {
    let lottery = cdf.length_lottery();
    let index = rng.weighted_choice(&lottery);
    cdf.realization_of(index)
}

impl LengthCdf {
    pub fn lmax(&self) -> u32 {
        self.values.len() as u32
    }

    pub fn values(&self) -> &[Prob] {
        &self.values
    }

    /// `Pr[length <= t]`; 0 at `t = 0`, flat beyond `lmax`.
    pub fn at(&self, t: u32) -> Prob {
        if t == 0 {
            return Prob::zero();
        }
        let i = (t as usize).min(self.values.len());
        self.values[i - 1].clone()
    }

    /// `Pr[length = t]`.
    pub fn mass(&self, t: u32) -> Prob {
        if t == 0 || t > self.lmax() {
            return Prob::zero();
        }
        self.at(t) - self.at(t - 1)
    }

    pub fn never_mass(&self) -> Prob {
        Prob::one() - self.at(self.lmax())
    }

    /// Smallest `t` with `Pr[length <= t] >= 1/2`, if any.
    pub fn median(&self) -> Option<u32> {
        let half = rational::ratio(1, 2);
        self.values
            .iter()
            .position(|v| *v >= half)
            .map(|i| i as u32 + 1)
    }

    /// Branch `i < lmax` means length `i+1`; branch `lmax` means never finishes.
    pub fn length_lottery(&self) -> Lottery {
        let mut weights: Vec<Prob> = (1..=self.lmax()).map(|t| self.mass(t)).collect();
        weights.push(self.never_mass());
        Lottery::from_weights(weights).expect("a valid CDF induces a distribution")
    }

    pub fn realization_of(&self, branch: usize) -> Realization {
        if branch < self.values.len() {
            Realization::Finishes(branch as u32 + 1)
        } else {
            Realization::NeverFinishes
        }
    }

    /// Lengths with positive mass.
    pub fn support(&self) -> Vec<u32> {
        (1..=self.lmax()).filter(|&t| !self.mass(t).is_zero()).collect()
    }

    pub fn is_point_mass(&self) -> Option<u32> {
        match self.support().as_slice() {
            [l] if self.never_mass().is_zero() => Some(*l),
            _ => None,
        }
    }
}

impl Serialize for LengthCdf {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        rational::serde_prob_vec::serialize(&self.values, s)
    }
}

impl<'de> Deserialize<'de> for LengthCdf {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let values = rational::serde_prob_vec::deserialize(d)?;
        validate_cdf(values).map_err(serde::de::Error::custom)
    }
}
