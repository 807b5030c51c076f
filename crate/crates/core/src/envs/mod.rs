//! Benchmark environments.

mod ar_chain;
mod dchain;
mod grid;
mod sailing;
mod tabular;
mod tictactoe;
mod wide_tree;

pub use ar_chain::ArCounterexample;
pub use dchain::DChain;
pub use grid::{
    Cell, FrozenLake, GridMap, CARDINAL, FROZEN_LAKE_8X12, FROZEN_LAKE_8X12_TEST, FROZEN_LAKE_8X8, FROZEN_LAKE_HORIZON,
    GOAL_DISCOUNT, SAILING_6X6,
};
pub use sailing::{angle_class, Sailing, SailingSpec, HEADINGS, SAILING_HORIZON, TACK_COSTS, WIND_TRANSITIONS};
pub use tabular::{RandomMdpShape, TabularMdp};
pub use tictactoe::{Mark, TicTacToe, LINES};
pub use wide_tree::WideTree;
