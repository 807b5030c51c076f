//! Sailing Problem: 8-way movement under a stochastically veering wind.
//!
//! Directions are `0..8` clockwise from north. The wind value is the direction
//! the wind blows from, so heading straight into it is never offered. The state
//! packs `(cell, wind)` as `cell * 8 + wind`.

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::mdp::{Mdp, StateId, Successors, STOCHASTIC_TOL};

use super::grid::{Cell, GridMap, SAILING_6X6};

/// Row `i` is the distribution of the next wind direction given wind `i`.
pub const WIND_TRANSITIONS: [[f64; 8]; 8] = [
    [0.4, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.3],
    [0.4, 0.3, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.4, 0.3, 0.3, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.4, 0.3, 0.3, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.4, 0.2, 0.4, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.3, 0.3, 0.4, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.3, 0.3, 0.4],
    [0.4, 0.0, 0.0, 0.0, 0.0, 0.0, 0.3, 0.3],
];

/// Cost per step indexed by angular distance (in 45 degree steps) between
/// heading and wind: close-hauled 4, cross 3, broad reach 2, running 1.
/// Distance 0 is sailing into the wind and is not allowed.
pub const TACK_COSTS: [f64; 5] = [f64::NAN, 4.0, 3.0, 2.0, 1.0];

pub const SAILING_HORIZON: usize = 50;

/// `(d_row, d_col)` for each of the 8 headings, clockwise from north.
pub const HEADINGS: [(i64, i64); 8] = [(-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1)];

#[derive(Debug, Clone, PartialEq)]
pub struct SailingSpec {
    pub map: GridMap,
    pub wind: [[f64; 8]; 8],
    pub tack_costs: [f64; 5],
    pub initial_wind: u8,
    pub horizon: usize,
}

impl SailingSpec {
    /// The 6x6 benchmark with the given initial wind direction.
    pub fn benchmark(initial_wind: u8) -> Self {
        Self {
            map: GridMap::parse(SAILING_6X6).expect("bundled map is valid"),
            wind: WIND_TRANSITIONS,
            tack_costs: TACK_COSTS,
            initial_wind,
            horizon: SAILING_HORIZON,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Sailing {
    spec: SailingSpec,
}

/// Angular distance between two of the 8 compass directions, in `0..=4`.
pub fn angle_class(heading: u8, wind: u8) -> usize {
    let d = (heading as i32 - wind as i32).rem_euclid(8) as usize;
    d.min(8 - d)
}

impl Sailing {
    pub fn new(spec: SailingSpec) -> Result<Self> {
        for (i, row) in spec.wind.iter().enumerate() {
            let sum: f64 = row.iter().sum();
            if row.iter().any(|p| p.is_nan() || *p < 0.0) || (sum - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::NonStochastic { state: i as StateId, action: 0, sum });
            }
        }
        if spec.tack_costs[1..].iter().any(|c| !c.is_finite() || *c <= 0.0) {
            return Err(Error::InvalidEnvironment("tack costs must be positive".into()));
        }
        if spec.initial_wind >= 8 {
            return Err(Error::InvalidEnvironment("wind direction must be in 0..8".into()));
        }
        if spec.horizon == 0 {
            return Err(Error::InvalidEnvironment("horizon must be at least 1".into()));
        }
        Ok(Self { spec })
    }

    pub fn spec(&self) -> &SailingSpec {
        &self.spec
    }

    pub fn encode(cell: usize, wind: u8) -> StateId {
        (cell * 8 + wind as usize) as StateId
    }

    pub fn decode(state: StateId) -> (usize, u8) {
        ((state / 8) as usize, (state % 8) as u8)
    }

    /// Heading for the `action`-th offered move; offered headings skip the wind.
    pub fn heading(state: StateId, action: usize) -> u8 {
        let (_, wind) = Self::decode(state);
        (wind + 1 + action as u8) % 8
    }

    /// Headings offered at `state`, in action-index order.
    pub fn offered_headings(&self, state: StateId) -> Vec<u8> {
        (0..self.num_actions(state)).map(|a| Self::heading(state, a)).collect()
    }

    pub fn step_cost(&self, state: StateId, action: usize) -> f64 {
        let (_, wind) = Self::decode(state);
        self.spec.tack_costs[angle_class(Self::heading(state, action), wind)]
    }
}

impl Mdp for Sailing {
    fn initial_state(&self) -> StateId {
        Self::encode(self.spec.map.start(), self.spec.initial_wind)
    }

    fn horizon(&self) -> usize {
        self.spec.horizon
    }

    fn num_actions(&self, state: StateId) -> usize {
        let (cell, _) = Self::decode(state);
        if self.spec.map.cell(cell) == Cell::Goal {
            0
        } else {
            7
        }
    }

    fn successors(&self, state: StateId, action: usize) -> Successors {
        let (cell, wind) = Self::decode(state);
        let (dr, dc) = HEADINGS[Self::heading(state, action) as usize];
        let next_cell = self.spec.map.step(cell, dr, dc);
        let mut out = SmallVec::new();
        for (w, &p) in self.spec.wind[wind as usize].iter().enumerate() {
            if p > 0.0 {
                out.push((Self::encode(next_cell, w as u8), p));
            }
        }
        out
    }

    fn reward(&self, state: StateId, action: usize, _t: usize) -> f64 {
        -self.step_cost(state, action)
    }
}
