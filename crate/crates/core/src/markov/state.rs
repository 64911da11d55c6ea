use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Longest window representable as a bit mask.
pub(crate) const MAX_WINDOW: usize = 63;

/// Occupation variables `eta_x` on the window `[xmin, xmin + len)`,
/// little-endian in `bits` (bit `i` is site `xmin + i`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OccupationState {
    xmin: i64,
    len: usize,
    bits: u64,
}

impl OccupationState {
    pub fn from_bits(xmin: i64, len: usize, bits: u64) -> Result<Self> {
        if len == 0 || len > MAX_WINDOW {
            return Err(Error::Size(format!("window length must be in 1..={MAX_WINDOW}, got {len}")));
        }
        if bits >> len != 0 {
            return Err(Error::Domain("occupation bits beyond the window".into()));
        }
        Ok(Self { xmin, len, bits })
    }

    /// Step initial data on `[xmin, xmax]`: occupied exactly at `x >= 1`.
    pub fn step(xmin: i64, xmax: i64) -> Result<Self> {
        if xmax < xmin {
            return Err(Error::InvalidParameter(format!("empty window [{xmin}, {xmax}]")));
        }
        let len = (xmax - xmin + 1) as usize;
        let mut bits = 0u64;
        for i in 0..len.min(MAX_WINDOW) {
            if xmin + i as i64 >= 1 {
                bits |= 1 << i;
            }
        }
        Self::from_bits(xmin, len, bits)
    }

    pub fn xmin(&self) -> i64 {
        self.xmin
    }

    pub fn xmax(&self) -> i64 {
        self.xmin + self.len as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn contains(&self, x: i64) -> bool {
        x >= self.xmin && x <= self.xmax()
    }

    pub fn occupied(&self, x: i64) -> Result<bool> {
        if !self.contains(x) {
            return Err(Error::Domain(format!(
                "site {x} outside window [{}, {}]",
                self.xmin,
                self.xmax()
            )));
        }
        Ok(self.bits >> (x - self.xmin) & 1 == 1)
    }

    /// `N_x(eta)`: particles at sites `<= x`, counting only the window.
    pub fn count_le(&self, x: i64) -> usize {
        if x < self.xmin {
            0
        } else if x >= self.xmax() {
            self.bits.count_ones() as usize
        } else {
            let keep = (x - self.xmin + 1) as u32;
            (self.bits & ((1u64 << keep) - 1)).count_ones() as usize
        }
    }

    pub fn particle_count(&self) -> usize {
        self.bits.count_ones() as usize
    }

    /// Occupied sites in increasing order.
    pub fn particles(&self) -> ParticleConfig {
        let coords = (0..self.len)
            .filter(|i| self.bits >> i & 1 == 1)
            .map(|i| self.xmin + i as i64)
            .collect();
        ParticleConfig { coords }
    }
}

/// Ordered particle positions `x_1 < x_2 < ... < x_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct ParticleConfig {
    coords: Vec<i64>,
}

impl TryFrom<Vec<i64>> for ParticleConfig {
    type Error = Error;
    fn try_from(v: Vec<i64>) -> Result<Self> {
        ParticleConfig::new(v)
    }
}

impl From<ParticleConfig> for Vec<i64> {
    fn from(c: ParticleConfig) -> Self {
        c.coords
    }
}

impl ParticleConfig {
    pub fn new(coords: Vec<i64>) -> Result<Self> {
        if coords.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(format!(
                "particle coordinates must be strictly increasing, got {coords:?}"
            )));
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Bit mask relative to `xmin`; `None` if a particle lies outside
    /// `[xmin, xmin + len)`.
    pub fn to_mask(&self, xmin: i64, len: usize) -> Option<u64> {
        let mut mask = 0u64;
        for &x in &self.coords {
            let i = x - xmin;
            if i < 0 || i as usize >= len {
                return None;
            }
            mask |= 1 << i;
        }
        Some(mask)
    }
}

/// Enumerated state spaces of the generator.
///
/// Occupation states are indexed by their little-endian bit integer.
/// Particle configurations on `[xmin, xmax]` are indexed in colexicographic
/// order: `rank = sum_j C(x_j - xmin, j + 1)` with `j` counted from 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateSpace {
    Occupation { xmin: i64, len: usize },
    Particles { xmin: i64, xmax: i64, count: usize },
}

pub(crate) fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut b: u64 = 1;
    for i in 0..k {
        b = b * (n - i) as u64 / (i + 1) as u64;
    }
    b
}

impl StateSpace {
    pub fn xmin(&self) -> i64 {
        match *self {
            StateSpace::Occupation { xmin, .. } | StateSpace::Particles { xmin, .. } => xmin,
        }
    }

    /// Number of lattice sites.
    pub fn sites(&self) -> usize {
        match *self {
            StateSpace::Occupation { len, .. } => len,
            StateSpace::Particles { xmin, xmax, .. } => (xmax - xmin + 1).max(0) as usize,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let sites = self.sites();
        if sites == 0 || sites > MAX_WINDOW {
            return Err(Error::Size(format!("window length must be in 1..={MAX_WINDOW}, got {sites}")));
        }
        if let StateSpace::Particles { count, .. } = *self {
            if count > sites {
                return Err(Error::InvalidParameter(format!("{count} particles do not fit in {sites} sites")));
            }
        }
        Ok(())
    }

    /// Number of states, saturating at `u64::MAX`.
    pub fn size(&self) -> u64 {
        match *self {
            StateSpace::Occupation { len, .. } => {
                if len >= 64 {
                    u64::MAX
                } else {
                    1u64 << len
                }
            }
            StateSpace::Particles { count, .. } => binomial(self.sites(), count),
        }
    }

    /// Bit mask of the state with the given index.
    pub fn mask(&self, index: usize) -> u64 {
        match *self {
            StateSpace::Occupation { .. } => index as u64,
            StateSpace::Particles { count, .. } => {
                let mut rank = index as u64;
                let mut mask = 0u64;
                let mut c = self.sites();
                for j in (1..=count).rev() {
                    while binomial(c, j) > rank {
                        c -= 1;
                    }
                    rank -= binomial(c, j);
                    mask |= 1 << c;
                }
                mask
            }
        }
    }

    /// Index of the state with the given bit mask.
    pub fn index(&self, mask: u64) -> usize {
        match *self {
            StateSpace::Occupation { .. } => mask as usize,
            StateSpace::Particles { .. } => {
                let mut rank = 0u64;
                let mut j = 0;
                let mut m = mask;
                while m != 0 {
                    let c = m.trailing_zeros() as usize;
                    j += 1;
                    rank += binomial(c, j);
                    m &= m - 1;
                }
                rank as usize
            }
        }
    }

    pub fn occupation(&self, index: usize) -> OccupationState {
        OccupationState {
            xmin: self.xmin(),
            len: self.sites(),
            bits: self.mask(index),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_state() {
        let s = OccupationState::step(-3, 4).unwrap();
        for x in -3..=4 {
            assert_eq!(s.occupied(x).unwrap(), x >= 1);
        }
        assert_eq!(s.count_le(0), 0);
        assert_eq!(s.count_le(2), 2);
        assert_eq!(s.count_le(10), 4);
        assert!(s.occupied(5).is_err());
        assert_eq!(s.particles().coords(), &[1, 2, 3, 4]);
    }

    #[test]
    fn configs_are_ordered() {
        assert!(ParticleConfig::new(vec![1, 1]).is_err());
        assert!(ParticleConfig::new(vec![2, 1]).is_err());
        let c: ParticleConfig = serde_json::from_str("[0, 3]").unwrap();
        assert_eq!(c.coords(), &[0, 3]);
        assert!(serde_json::from_str::<ParticleConfig>("[3, 0]").is_err());
    }

    #[test]
    fn colex_ranking_is_a_bijection_in_order() {
        let space = StateSpace::Particles { xmin: -2, xmax: 5, count: 3 };
        assert_eq!(space.size(), 56);
        let mut prev: Option<Vec<usize>> = None;
        for i in 0..56 {
            let m = space.mask(i);
            assert_eq!(m.count_ones(), 3);
            assert_eq!(space.index(m), i);
            // colex: compare sorted positions from the largest down
            let mut pos: Vec<usize> = (0..8).filter(|b| m >> b & 1 == 1).collect();
            pos.reverse();
            if let Some(p) = prev {
                assert!(pos > p);
            }
            prev = Some(pos);
        }
    }
}
