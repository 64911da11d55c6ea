use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ModelParams;

/// `t + 10 sqrt(t) + 20`, rounded up: the distance beyond which the
/// lattice ends cannot influence the origin.
pub fn light_cone_margin(t: f64) -> usize {
    (t + 10.0 * t.sqrt() + 20.0).ceil() as usize
}

/// A simulation run: sites `[-left, right]`, step data on `1..=right`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: ModelParams,
    pub horizon: f64,
    pub left: usize,
    pub right: usize,
    pub replicas: usize,
    pub seed: u64,
    pub stream_id: u64,
}

impl SimConfig {
    /// A run with the minimal light-cone window.
    pub fn new(params: ModelParams, horizon: f64, replicas: usize, seed: u64) -> Result<Self> {
        if !(horizon >= 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidParameter(format!("horizon must be nonnegative, got {horizon}")));
        }
        let margin = light_cone_margin(horizon);
        let cfg = Self {
            params,
            horizon,
            left: margin,
            right: margin,
            replicas,
            seed,
            stream_id: 0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_stream(mut self, stream_id: u64) -> Self {
        self.stream_id = stream_id;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return Err(Error::InvalidParameter("at least one replica is required".into()));
        }
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidParameter(format!("horizon must be nonnegative, got {}", self.horizon)));
        }
        let margin = light_cone_margin(self.horizon);
        if self.left < margin || self.right < margin {
            return Err(Error::InvalidParameter(format!(
                "window [-{}, {}] is inside the light-cone margin {margin}",
                self.left, self.right
            )));
        }
        Ok(())
    }
}

/// Outcome of one trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurrentSample {
    /// `N_0`: particles at sites `<= 0` at the horizon.
    pub n0: u64,
    pub events: u64,
}

const ABSENT: u32 = u32::MAX;

/// A set of sites with O(1) insert, remove and uniform sampling.
struct SiteSet {
    items: Vec<u32>,
    slot: Vec<u32>,
}

impl SiteSet {
    fn new(sites: usize) -> Self {
        Self {
            items: Vec::with_capacity(sites),
            slot: vec![ABSENT; sites],
        }
    }

    fn set(&mut self, s: usize, member: bool) {
        let present = self.slot[s] != ABSENT;
        if member && !present {
            self.slot[s] = self.items.len() as u32;
            self.items.push(s as u32);
        } else if !member && present {
            let i = self.slot[s] as usize;
            let last = self.items.pop().expect("non-empty");
            if last as usize != s {
                self.items[i] = last;
                self.slot[last as usize] = i as u32;
            }
            self.slot[s] = ABSENT;
        }
    }

    fn len(&self) -> usize {
        self.items.len()
    }
}

struct Lattice {
    occ: Vec<bool>,
    left_movers: SiteSet,
    right_movers: SiteSet,
}

impl Lattice {
    fn refresh(&mut self, s: usize) {
        let n = self.occ.len();
        let here = self.occ[s];
        self.left_movers.set(s, here && s > 0 && !self.occ[s - 1]);
        self.right_movers.set(s, here && s + 1 < n && !self.occ[s + 1]);
    }
}

/// One trajectory on an explicit window `[-left, right]` (no light-cone
/// check), using the stream `stream`.
pub fn simulate_window(params: &ModelParams, horizon: f64, left: usize, right: usize, seed: u64, stream: u64) -> CurrentSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let sites = left + right + 1;
    let origin = left; // index of site 0
    let mut lat = Lattice {
        occ: (0..sites).map(|s| s > origin).collect(),
        left_movers: SiteSet::new(sites),
        right_movers: SiteSet::new(sites),
    };
    for s in 0..sites {
        lat.refresh(s);
    }
    let (p, q) = (params.p(), params.q());
    let mut time = 0.0;
    let mut n0: u64 = 0;
    let mut events: u64 = 0;
    loop {
        let rate_left = q * lat.left_movers.len() as f64;
        let total = rate_left + p * lat.right_movers.len() as f64;
        if total == 0.0 {
            break;
        }
        let u: f64 = rng.random();
        time += -(1.0 - u).ln() / total;
        if time > horizon {
            break;
        }
        let pick: f64 = rng.random::<f64>() * total;
        let (from, to) = if pick < rate_left {
            let set = &lat.left_movers;
            let i = ((pick / q) as usize).min(set.len() - 1);
            let s = set.items[i] as usize;
            (s, s - 1)
        } else {
            let set = &lat.right_movers;
            let i = (((pick - rate_left) / p) as usize).min(set.len() - 1);
            let s = set.items[i] as usize;
            (s, s + 1)
        };
        lat.occ[from] = false;
        lat.occ[to] = true;
        if from == origin + 1 && to == origin {
            n0 += 1;
        } else if from == origin && to == origin + 1 {
            n0 -= 1;
        }
        let lo = from.min(to).saturating_sub(1);
        let hi = (from.max(to) + 1).min(sites - 1);
        for s in lo..=hi {
            lat.refresh(s);
        }
        events += 1;
    }
    CurrentSample { n0, events }
}

/// One trajectory with the configuration's own stream.
pub fn simulate_once(cfg: &SimConfig) -> Result<CurrentSample> {
    cfg.validate()?;
    Ok(simulate_window(&cfg.params, cfg.horizon, cfg.left, cfg.right, cfg.seed, cfg.stream_id))
}

/// All replicas of a run, in replica order.
pub fn sample_currents(cfg: &SimConfig) -> Result<Vec<CurrentSample>> {
    cfg.validate()?;
    Ok((0..cfg.replicas as u64)
        .into_par_iter()
        .map(|r| {
            simulate_window(
                &cfg.params,
                cfg.horizon,
                cfg.left,
                cfg.right,
                cfg.seed,
                cfg.stream_id.wrapping_add(r),
            )
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_horizon() {
        let cfg = SimConfig::new(ModelParams::new(0.3).unwrap(), 0.0, 1, 7).unwrap();
        assert_eq!(simulate_once(&cfg).unwrap().n0, 0);
    }

    #[test]
    fn deterministic_streams() {
        let cfg = SimConfig::new(ModelParams::new(0.3).unwrap(), 5.0, 1, 42).unwrap().with_stream(3);
        let a = simulate_once(&cfg).unwrap();
        let b = simulate_once(&cfg).unwrap();
        assert_eq!(a, b);
        let c = simulate_once(&cfg.with_stream(4)).unwrap();
        assert!(a != c || a.events == 0);
    }

    #[test]
    fn window_must_cover_light_cone() {
        let mut cfg = SimConfig::new(ModelParams::new(0.3).unwrap(), 4.0, 1, 0).unwrap();
        cfg.left -= 1;
        assert!(cfg.validate().is_err());
        cfg.left += 1;
        cfg.replicas = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn site_set_operations() {
        let mut s = SiteSet::new(10);
        for i in [3, 5, 7] {
            s.set(i, true);
        }
        s.set(5, true);
        assert_eq!(s.len(), 3);
        s.set(3, false);
        assert_eq!(s.len(), 2);
        let mut items = s.items.clone();
        items.sort();
        assert_eq!(items, vec![5, 7]);
        assert_eq!(s.slot[s.items[0] as usize], 0);
    }
}
