use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use smallvec::smallvec;

use crate::error::{Error, Result};
use crate::mdp::{Mdp, StateId, Successors};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Start,
    Floor,
    Hole,
    Goal,
}

impl Cell {
    fn from_char(c: char) -> Option<Self> {
        match c {
            'S' => Some(Cell::Start),
            'F' => Some(Cell::Floor),
            'H' => Some(Cell::Hole),
            'G' => Some(Cell::Goal),
            _ => None,
        }
    }

    fn as_char(self) -> char {
        match self {
            Cell::Start => 'S',
            Cell::Floor => 'F',
            Cell::Hole => 'H',
            Cell::Goal => 'G',
        }
    }
}

/// Rectangular gridworld map in the `S`/`F`/`H`/`G` text format, one row per line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMap {
    rows: usize,
    cols: usize,
    cells: Vec<Cell>,
    start: usize,
}

pub const FROZEN_LAKE_8X8: &str = include_str!("maps/frozen_lake_8x8.txt");
pub const FROZEN_LAKE_8X12: &str = include_str!("maps/frozen_lake_8x12.txt");
pub const FROZEN_LAKE_8X12_TEST: &str = include_str!("maps/frozen_lake_8x12_test.txt");
pub const SAILING_6X6: &str = include_str!("maps/sailing_6x6.txt");

impl GridMap {
    pub fn parse(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        if lines.is_empty() {
            return Err(Error::MalformedMap("map is empty".into()));
        }
        let cols = lines[0].chars().count();
        let mut cells = Vec::with_capacity(lines.len() * cols);
        for (r, line) in lines.iter().enumerate() {
            if line.chars().count() != cols {
                return Err(Error::MalformedMap(format!(
                    "row {} has {} columns, expected {cols}",
                    r + 1,
                    line.chars().count()
                )));
            }
            for (c, ch) in line.chars().enumerate() {
                let cell = Cell::from_char(ch).ok_or_else(|| {
                    Error::MalformedMap(format!("unknown cell {ch:?} at row {}, column {}", r + 1, c + 1))
                })?;
                cells.push(cell);
            }
        }
        let starts: Vec<usize> = (0..cells.len()).filter(|&i| cells[i] == Cell::Start).collect();
        if starts.len() != 1 {
            return Err(Error::MalformedMap(format!("expected exactly one start, found {}", starts.len())));
        }
        if !cells.contains(&Cell::Goal) {
            return Err(Error::MalformedMap("map has no goal".into()));
        }
        let map = Self { rows: lines.len(), cols, cells, start: starts[0] };
        if map.shortest_goal_path().is_none() {
            return Err(Error::MalformedMap("no hole-free path from start to goal".into()));
        }
        Ok(map)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn cell(&self, index: usize) -> Cell {
        self.cells[index]
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    pub fn coords(&self, index: usize) -> (usize, usize) {
        (index / self.cols, index % self.cols)
    }

    /// Cell reached by moving `(dr, dc)`; leaving the grid keeps the current cell.
    pub fn step(&self, index: usize, dr: i64, dc: i64) -> usize {
        let (r, c) = self.coords(index);
        let nr = r as i64 + dr;
        let nc = c as i64 + dc;
        if nr < 0 || nc < 0 || nr >= self.rows as i64 || nc >= self.cols as i64 {
            index
        } else {
            self.index(nr as usize, nc as usize)
        }
    }

    /// Number of cardinal moves on the shortest hole-free path from start to a goal.
    pub fn shortest_goal_path(&self) -> Option<usize> {
        let mut dist = vec![usize::MAX; self.cells.len()];
        let mut queue = VecDeque::from([self.start]);
        dist[self.start] = 0;
        while let Some(i) = queue.pop_front() {
            if self.cells[i] == Cell::Goal {
                return Some(dist[i]);
            }
            for (dr, dc) in CARDINAL {
                let j = self.step(i, dr, dc);
                if self.cells[j] != Cell::Hole && dist[j] == usize::MAX {
                    dist[j] = dist[i] + 1;
                    queue.push_back(j);
                }
            }
        }
        None
    }
}

impl FromStr for GridMap {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for GridMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: String = (0..self.cols).map(|c| self.cells[self.index(r, c)].as_char()).collect();
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

/// North, east, south, west as `(d_row, d_col)`.
pub const CARDINAL: [(i64, i64); 4] = [(-1, 0), (0, 1), (1, 0), (0, -1)];

/// Deterministic Frozen Lake.
///
/// Arriving at a goal after `t` moves pays `0.99^t` and ends the episode;
/// falling into a hole ends it with nothing.
#[derive(Debug, Clone)]
pub struct FrozenLake {
    map: GridMap,
    horizon: usize,
}

pub const GOAL_DISCOUNT: f64 = 0.99;
pub const FROZEN_LAKE_HORIZON: usize = 100;

impl FrozenLake {
    pub fn new(map: GridMap, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidEnvironment("horizon must be at least 1".into()));
        }
        Ok(Self { map, horizon })
    }

    pub fn map(&self) -> &GridMap {
        &self.map
    }

    fn target(&self, state: StateId, action: usize) -> usize {
        let (dr, dc) = CARDINAL[action];
        self.map.step(state as usize, dr, dc)
    }
}

impl Mdp for FrozenLake {
    fn initial_state(&self) -> StateId {
        self.map.start as StateId
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn num_actions(&self, state: StateId) -> usize {
        match self.map.cell(state as usize) {
            Cell::Hole | Cell::Goal => 0,
            _ => 4,
        }
    }

    fn successors(&self, state: StateId, action: usize) -> Successors {
        smallvec![(self.target(state, action) as StateId, 1.0)]
    }

    fn reward(&self, state: StateId, action: usize, t: usize) -> f64 {
        match self.map.cell(self.target(state, action)) {
            Cell::Goal => GOAL_DISCOUNT.powi(t as i32 + 1),
            _ => 0.0,
        }
    }
}
