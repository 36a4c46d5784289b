//! Small deterministic grid boards with cliffs and one goal cell.
//!
//! Enumerable by construction, so the exact cone metrics can be computed on them.

use serde::{Deserialize, Serialize};

use super::{hex_key, DiscreteEnvironment, Environment, Observation, StateKey};
use crate::action::{Action, ActionSpec};
use crate::error::{FmcError, Result};
use crate::reward::RewardComponent;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cell {
    Open,
    Cliff,
    Goal,
}

/// Board description. `rows` uses `S` start, `C` cliff, `G` goal, `.` open.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridLayout {
    pub rows: Vec<String>,
    #[serde(default = "default_bonus")]
    pub goal_bonus: f64,
}

fn default_bonus() -> f64 {
    4.0
}

impl GridLayout {
    pub fn new(rows: &[&str], goal_bonus: f64) -> Self {
        Self { rows: rows.iter().map(|r| r.to_string()).collect(), goal_bonus }
    }

    pub fn three_by_three() -> Self {
        Self::new(&[".C.", ".S.", "..G"], default_bonus())
    }

    pub fn five_by_five() -> Self {
        Self::new(&["S....", ".CC..", ".....", "..C..", "....G"], default_bonus())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridState {
    pub row: u8,
    pub col: u8,
}

#[derive(Debug, Clone)]
pub struct GridWorld {
    cells: Vec<Vec<Cell>>,
    start: GridState,
    goal_bonus: f64,
    spec: ActionSpec,
}

impl GridWorld {
    pub const UP: usize = 0;
    pub const DOWN: usize = 1;
    pub const LEFT: usize = 2;
    pub const RIGHT: usize = 3;

    pub fn new(layout: &GridLayout) -> Result<Self> {
        let height = layout.rows.len();
        if height == 0 || height > u8::MAX as usize {
            return Err(FmcError::Environment(format!("grid needs 1..=255 rows, got {height}")));
        }
        let width = layout.rows[0].chars().count();
        let mut start = None;
        let mut cells = Vec::with_capacity(height);
        for (r, line) in layout.rows.iter().enumerate() {
            if line.chars().count() != width || width == 0 || width > u8::MAX as usize {
                return Err(FmcError::Environment(format!("row {r} has inconsistent width")));
            }
            let mut row = Vec::with_capacity(width);
            for (c, ch) in line.chars().enumerate() {
                row.push(match ch {
                    '.' => Cell::Open,
                    'C' => Cell::Cliff,
                    'G' => Cell::Goal,
                    'S' => {
                        if start.replace(GridState { row: r as u8, col: c as u8 }).is_some() {
                            return Err(FmcError::Environment("more than one start cell".into()));
                        }
                        Cell::Open
                    }
                    other => {
                        return Err(FmcError::Environment(format!("unknown grid cell {other:?}")))
                    }
                });
            }
            cells.push(row);
        }
        let start = start.ok_or_else(|| FmcError::Environment("grid has no start cell".into()))?;
        if !(layout.goal_bonus.is_finite() && layout.goal_bonus >= 0.0) {
            return Err(FmcError::Environment("goal bonus must be >= 0".into()));
        }
        Ok(Self { cells, start, goal_bonus: layout.goal_bonus, spec: ActionSpec::Discrete { count: 4 } })
    }

    pub fn rows(&self) -> usize {
        self.cells.len()
    }

    pub fn cols(&self) -> usize {
        self.cells[0].len()
    }

    pub fn cell(&self, s: &GridState) -> Cell {
        self.cells[s.row as usize][s.col as usize]
    }

    pub fn goal_bonus(&self) -> f64 {
        self.goal_bonus
    }

    pub fn at(&self, row: u8, col: u8) -> GridState {
        GridState { row, col }
    }
}

impl Environment for GridWorld {
    type State = GridState;

    fn action_spec(&self) -> &ActionSpec {
        &self.spec
    }

    fn initial_state(&self) -> GridState {
        self.start
    }

    fn step(&self, s: &GridState, action: &Action, _dt: f64) -> GridState {
        if self.is_dead(s) {
            return *s;
        }
        let (r, c) = (s.row as usize, s.col as usize);
        let (r, c) = match action.index().unwrap_or(usize::MAX) {
            Self::UP => (r.saturating_sub(1), c),
            Self::DOWN => ((r + 1).min(self.rows() - 1), c),
            Self::LEFT => (r, c.saturating_sub(1)),
            Self::RIGHT => (r, (c + 1).min(self.cols() - 1)),
            _ => (r, c),
        };
        GridState { row: r as u8, col: c as u8 }
    }

    fn reward_components(&self, _root: &GridState, s: &GridState) -> Vec<RewardComponent> {
        let cell = self.cell(s);
        let alive = if cell == Cell::Cliff { 0.0 } else { 1.0 };
        let goal = if cell == Cell::Goal { 1.0 + self.goal_bonus } else { 1.0 };
        vec![RewardComponent::unit(alive), RewardComponent::unit(goal)]
    }

    fn is_dead(&self, s: &GridState) -> bool {
        self.cell(s) == Cell::Cliff
    }

    fn distance(&self, a: &GridState, b: &GridState) -> f64 {
        let dr = a.row as f64 - b.row as f64;
        let dc = a.col as f64 - b.col as f64;
        (dr * dr + dc * dc).sqrt()
    }

    fn observe(&self, s: &GridState) -> Observation {
        Observation::Key(hex_key(&self.canonical_key(s)))
    }

    fn points(&self, s: &GridState) -> f64 {
        if self.cell(s) == Cell::Goal {
            self.goal_bonus
        } else {
            0.0
        }
    }
}

impl DiscreteEnvironment for GridWorld {
    fn canonical_key(&self, s: &GridState) -> StateKey {
        vec![s.row, s.col]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridWorld {
        GridWorld::new(&GridLayout::three_by_three()).unwrap()
    }

    #[test]
    fn walls_clamp() {
        let g = grid();
        let corner = g.at(2, 0);
        assert_eq!(g.step(&corner, &Action::Discrete(GridWorld::DOWN), 1.0), corner);
        assert_eq!(g.step(&corner, &Action::Discrete(GridWorld::LEFT), 1.0), corner);
    }

    #[test]
    fn cliff_kills_and_absorbs() {
        let g = grid();
        let s = g.step(&g.initial_state(), &Action::Discrete(GridWorld::UP), 1.0);
        assert!(g.is_dead(&s));
        assert_eq!(g.reward(&s, &s), 0.0);
        for a in 0..4 {
            assert_eq!(g.step(&s, &Action::Discrete(a), 1.0), s);
        }
    }

    #[test]
    fn goal_pays_bonus() {
        let g = grid();
        let goal = g.at(2, 2);
        assert_eq!(g.reward(&goal, &goal), 5.0);
        assert_eq!(g.points(&goal), 4.0);
        assert_eq!(g.reward(&goal, &g.at(0, 0)), 1.0);
    }

    #[test]
    fn parse_errors() {
        assert!(GridWorld::new(&GridLayout::new(&["..", "..."], 1.0)).is_err());
        assert!(GridWorld::new(&GridLayout::new(&["..", ".."], 1.0)).is_err());
        assert!(GridWorld::new(&GridLayout::new(&["SX"], 1.0)).is_err());
    }
}
