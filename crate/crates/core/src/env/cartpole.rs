//! Classic cart-pole: keep the pole upright by pushing the cart left or right.

use serde::{Deserialize, Serialize};

use super::{Environment, Observation};
use crate::action::{Action, ActionSpec};
use crate::reward::RewardComponent;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CartPoleConstants {
    pub gravity: f64,
    pub cart_mass: f64,
    pub pole_mass: f64,
    /// Half the pole length (pivot to centre of mass), metres.
    pub pole_half_length: f64,
    pub force: f64,
    pub theta_max: f64,
    pub x_max: f64,
    /// Semi-implicit Euler sub-steps per `step` call.
    pub substeps: usize,
}

impl Default for CartPoleConstants {
    fn default() -> Self {
        Self {
            gravity: 9.8,
            cart_mass: 1.0,
            pole_mass: 0.1,
            pole_half_length: 0.5,
            force: 10.0,
            theta_max: 12f64.to_radians(),
            x_max: 2.4,
            substeps: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartPoleState {
    pub x: f64,
    pub x_dot: f64,
    pub theta: f64,
    pub theta_dot: f64,
}

impl CartPoleState {
    pub fn new(x: f64, x_dot: f64, theta: f64, theta_dot: f64) -> Self {
        Self { x, x_dot, theta, theta_dot }
    }

    pub fn mirrored(&self) -> Self {
        Self::new(-self.x, -self.x_dot, -self.theta, -self.theta_dot)
    }
}

#[derive(Debug, Clone)]
pub struct CartPole {
    pub constants: CartPoleConstants,
    spec: ActionSpec,
    start: CartPoleState,
}

impl Default for CartPole {
    fn default() -> Self {
        Self::new(CartPoleConstants::default())
    }
}

impl CartPole {
    pub const LEFT: usize = 0;
    pub const RIGHT: usize = 1;

    pub fn new(constants: CartPoleConstants) -> Self {
        Self {
            constants,
            spec: ActionSpec::Discrete { count: 2 },
            start: CartPoleState::new(0.0, 0.0, 0.0, 0.0),
        }
    }

    pub fn with_start(mut self, start: CartPoleState) -> Self {
        self.start = start;
        self
    }

    fn accelerations(&self, s: &CartPoleState, force: f64) -> (f64, f64) {
        let c = &self.constants;
        let total = c.cart_mass + c.pole_mass;
        let pml = c.pole_mass * c.pole_half_length;
        let (sin, cos) = s.theta.sin_cos();
        let temp = (force + pml * s.theta_dot * s.theta_dot * sin) / total;
        let theta_acc = (c.gravity * sin - cos * temp)
            / (c.pole_half_length * (4.0 / 3.0 - c.pole_mass * cos * cos / total));
        let x_acc = temp - pml * theta_acc * cos / total;
        (x_acc, theta_acc)
    }

    /// Integrates with a constant force, ignoring the failure bounds.
    pub fn integrate(&self, s: &CartPoleState, force: f64, dt: f64) -> CartPoleState {
        let n = self.constants.substeps.max(1);
        let h = dt / n as f64;
        let mut s = *s;
        for _ in 0..n {
            let (xa, ta) = self.accelerations(&s, force);
            s.x_dot += xa * h;
            s.theta_dot += ta * h;
            s.x += s.x_dot * h;
            s.theta += s.theta_dot * h;
        }
        s
    }

    /// Total mechanical energy (pole inertia about its centre is `m l^2 / 3`).
    pub fn energy(&self, s: &CartPoleState) -> f64 {
        let c = &self.constants;
        let total = c.cart_mass + c.pole_mass;
        let l = c.pole_half_length;
        0.5 * total * s.x_dot * s.x_dot
            + c.pole_mass * l * s.x_dot * s.theta_dot * s.theta.cos()
            + 0.5 * (4.0 / 3.0) * c.pole_mass * l * l * s.theta_dot * s.theta_dot
            + c.pole_mass * c.gravity * l * s.theta.cos()
    }

    fn force_of(&self, action: &Action) -> f64 {
        match action {
            Action::Discrete(Self::LEFT) => -self.constants.force,
            Action::Discrete(_) => self.constants.force,
            // continuous callers pass a signed fraction of the maximum force
            Action::Continuous(v) => v.first().copied().unwrap_or(0.0).clamp(-1.0, 1.0) * self.constants.force,
        }
    }
}

impl Environment for CartPole {
    type State = CartPoleState;

    fn action_spec(&self) -> &ActionSpec {
        &self.spec
    }

    fn initial_state(&self) -> CartPoleState {
        self.start
    }

    fn step(&self, state: &CartPoleState, action: &Action, dt: f64) -> CartPoleState {
        if self.is_dead(state) {
            return *state;
        }
        self.integrate(state, self.force_of(action), dt)
    }

    /// Alive indicator times the height of the pole tip, rescaled so it vanishes at the angle bound.
    /// A cart-centring term was tried and made things worse: pushing toward the centre
    /// first tips the pole outward, and the short horizon only sees that half.
    fn reward_components(&self, _root: &CartPoleState, s: &CartPoleState) -> Vec<RewardComponent> {
        if self.is_dead(s) {
            return vec![RewardComponent::unit(0.0)];
        }
        let c = &self.constants;
        let floor = c.theta_max.cos();
        let height = (s.theta.cos() - floor) / (1.0 - floor);
        vec![RewardComponent::unit(1.0), RewardComponent::unit(height.max(0.0))]
    }

    fn is_dead(&self, s: &CartPoleState) -> bool {
        !(s.theta.abs() < self.constants.theta_max && s.x.abs() < self.constants.x_max)
    }

    fn distance(&self, a: &CartPoleState, b: &CartPoleState) -> f64 {
        ((a.x - b.x).powi(2)
            + (a.x_dot - b.x_dot).powi(2)
            + (a.theta - b.theta).powi(2)
            + (a.theta_dot - b.theta_dot).powi(2))
        .sqrt()
    }

    fn observe(&self, s: &CartPoleState) -> Observation {
        Observation::Vector(vec![s.x, s.x_dot, s.theta, s.theta_dot])
    }
}
