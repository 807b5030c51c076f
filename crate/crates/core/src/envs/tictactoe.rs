//! Tic-tac-toe as a two-player zero-sum MDP.
//!
//! A board is encoded in base 3 (`0` empty, `1` X, `2` O), cell `i` at digit
//! `i`. X is the maximizer and always moves first, so the side to move follows
//! from the piece counts. Action `k` places a mark on the `k`-th empty cell.

use smallvec::smallvec;

use crate::error::{Error, Result};
use crate::mdp::{Mdp, Role, StateId, Successors};

pub const LINES: [[usize; 3]; 8] =
    [[0, 1, 2], [3, 4, 5], [6, 7, 8], [0, 3, 6], [1, 4, 7], [2, 5, 8], [0, 4, 8], [2, 4, 6]];

const POW3: [u64; 9] = [1, 3, 9, 27, 81, 243, 729, 2187, 6561];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mark {
    Empty,
    X,
    O,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TicTacToe {
    start: StateId,
}

impl TicTacToe {
    pub fn new() -> Self {
        Self { start: 0 }
    }

    /// Game starting from a position given as 9 characters of `X`, `O`, `.`.
    pub fn from_board(board: &str) -> Result<Self> {
        let cells: Vec<char> = board.chars().filter(|c| !c.is_whitespace()).collect();
        if cells.len() != 9 {
            return Err(Error::InvalidEnvironment(format!("board needs 9 cells, got {}", cells.len())));
        }
        let mut state = 0;
        for (i, c) in cells.into_iter().enumerate() {
            let digit = match c {
                '.' | '-' => 0,
                'X' | 'x' => 1,
                'O' | 'o' => 2,
                _ => return Err(Error::InvalidEnvironment(format!("unknown mark {c:?}"))),
            };
            state += digit * POW3[i];
        }
        let (x, o) = Self::counts(state);
        if x != o && x != o + 1 {
            return Err(Error::InvalidEnvironment("piece counts are not reachable with X first".into()));
        }
        Ok(Self { start: state })
    }

    pub fn mark(state: StateId, cell: usize) -> Mark {
        match (state / POW3[cell]) % 3 {
            0 => Mark::Empty,
            1 => Mark::X,
            _ => Mark::O,
        }
    }

    fn counts(state: StateId) -> (usize, usize) {
        let mut x = 0;
        let mut o = 0;
        for cell in 0..9 {
            match Self::mark(state, cell) {
                Mark::X => x += 1,
                Mark::O => o += 1,
                Mark::Empty => {}
            }
        }
        (x, o)
    }

    pub fn to_move(state: StateId) -> Mark {
        let (x, o) = Self::counts(state);
        if x == o {
            Mark::X
        } else {
            Mark::O
        }
    }

    pub fn winner(state: StateId) -> Option<Mark> {
        LINES.iter().find_map(|line| {
            let m = Self::mark(state, line[0]);
            (m != Mark::Empty && line.iter().all(|&c| Self::mark(state, c) == m)).then_some(m)
        })
    }

    pub fn is_terminal(state: StateId) -> bool {
        Self::winner(state).is_some() || (0..9).all(|c| Self::mark(state, c) != Mark::Empty)
    }

    /// Board cell targeted by action `k` at `state`.
    pub fn cell_of(state: StateId, action: usize) -> usize {
        (0..9).filter(|&c| Self::mark(state, c) == Mark::Empty).nth(action).expect("action indexes an empty cell")
    }

    pub fn play(state: StateId, action: usize) -> StateId {
        let digit = match Self::to_move(state) {
            Mark::X => 1,
            _ => 2,
        };
        state + digit * POW3[Self::cell_of(state, action)]
    }

    pub fn render(state: StateId) -> String {
        (0..9)
            .map(|c| match Self::mark(state, c) {
                Mark::Empty => '.',
                Mark::X => 'X',
                Mark::O => 'O',
            })
            .collect()
    }
}

impl Mdp for TicTacToe {
    fn initial_state(&self) -> StateId {
        self.start
    }

    fn horizon(&self) -> usize {
        9
    }

    fn num_actions(&self, state: StateId) -> usize {
        if Self::is_terminal(state) {
            0
        } else {
            (0..9).filter(|&c| Self::mark(state, c) == Mark::Empty).count()
        }
    }

    fn successors(&self, state: StateId, action: usize) -> Successors {
        smallvec![(Self::play(state, action), 1.0)]
    }

    fn reward(&self, state: StateId, action: usize, _t: usize) -> f64 {
        match Self::winner(Self::play(state, action)) {
            Some(Mark::X) => 1.0,
            Some(Mark::O) => -1.0,
            _ => 0.0,
        }
    }

    fn role(&self, state: StateId) -> Role {
        match Self::to_move(state) {
            Mark::X => Role::Maximizer,
            _ => Role::Minimizer,
        }
    }

    fn is_two_player(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::minimax_solve;

    #[test]
    fn empty_board_is_a_draw() {
        let g = TicTacToe::new();
        let t = minimax_solve(&g);
        assert_eq!(t.root_value(), 0.0);
        assert_eq!(t.root_q(), &[0.0; 9]);
    }

    #[test]
    fn immediate_win() {
        let g = TicTacToe::from_board("XX.OO....").unwrap();
        let t = minimax_solve(&g);
        assert_eq!(t.root_value(), 1.0);
        assert_eq!(g.reward(g.initial_state(), 0, 0), 1.0);
    }

    #[test]
    fn three_in_a_row_is_terminal() {
        let s = TicTacToe::from_board("XXXOO....").unwrap().initial_state();
        assert_eq!(TicTacToe::winner(s), Some(Mark::X));
        assert_eq!(TicTacToe::new().num_actions(s), 0);
    }

    #[test]
    fn full_board_no_winner() {
        let s = TicTacToe::from_board("XOXXOOOXX").unwrap().initial_state();
        assert_eq!(TicTacToe::winner(s), None);
        assert!(TicTacToe::is_terminal(s));
        assert_eq!(minimax_solve(&TicTacToe::from_board("XOXXOOOXX").unwrap()).root_value(), 0.0);
    }

    #[test]
    fn roles_alternate() {
        let g = TicTacToe::new();
        let s1 = TicTacToe::play(0, 4);
        assert_eq!(g.role(0), Role::Maximizer);
        assert_eq!(g.role(s1), Role::Minimizer);
        assert_eq!(TicTacToe::render(s1), "....X....");
    }

    #[test]
    fn rejects_bad_boards() {
        assert!(TicTacToe::from_board("XX.......").is_err());
        assert!(TicTacToe::from_board("X").is_err());
        assert!(TicTacToe::from_board("Q........").is_err());
    }
}
