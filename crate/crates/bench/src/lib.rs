//! Fixtures shared by the criterion benches.

use fmc_core::env::{CartPole, GridLayout, GridWorld, Rocket};
use fmc_core::FmcParams;

pub fn cartpole() -> (CartPole, FmcParams) {
    (CartPole::default(), FmcParams { n_walkers: 50, ticks: 20, dt: 0.02, ..Default::default() })
}

pub fn rocket() -> (Rocket, FmcParams) {
    (Rocket::default(), FmcParams { n_walkers: 100, ticks: 15, dt: 0.1, alpha: 0.0, ..Default::default() })
}

pub fn grid5() -> GridWorld {
    GridWorld::new(&GridLayout::five_by_five()).expect("bundled board")
}
