//! A 2D rocket in a closed arena towing a hook on a rubber band.
//!
//! The hook task: pick up the nearest rock with the hook, carry it into the
//! deploy zone, repeat. Collisions with the arena walls cost health in
//! proportion to the impact energy; zero health is death.

use serde::{Deserialize, Serialize};

use super::{Environment, Observation};
use crate::action::{Action, ActionSpec};
use crate::error::{FmcError, Result};
use crate::reward::RewardComponent;

const DEFAULT_CONSTANTS: &str = include_str!("../../config/rocket.json");

pub const HOOK_REWARD_SUCCESS: f64 = 100.0;
pub const HOOK_REWARD_PROGRESS: f64 = 0.2;
pub const HOOK_REWARD_FAILURE: f64 = 1e-9;
const PROGRESS_RATIO: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RocketConstants {
    pub version: u32,
    pub arena_width: f64,
    pub arena_height: f64,
    pub gravity: f64,
    pub body_mass: f64,
    pub body_radius: f64,
    pub moment_of_inertia: f64,
    pub max_main_thrust: f64,
    pub max_side_torque: f64,
    /// Passive stabiliser torque per unit `sin(heading)`, pulling toward upright.
    pub righting_torque: f64,
    pub angular_damping: f64,
    pub hook_mass: f64,
    pub hook_rest_length: f64,
    pub hook_stiffness: f64,
    pub hook_damping: f64,
    pub rock_mass: f64,
    pub rock_radius: f64,
    pub pickup_radius: f64,
    pub deploy_center: [f64; 2],
    pub deploy_radius: f64,
    pub restitution: f64,
    pub wall_friction: f64,
    /// Health lost per joule of impact energy above the safe impact speed.
    pub health_per_joule: f64,
    pub safe_impact_speed: f64,
    pub max_substep: f64,
    pub start_position: [f64; 2],
    pub rock_spawns: Vec<[f64; 2]>,
    pub rock_count: usize,
    pub health_weight: f64,
    pub hook_weight: f64,
}

impl Default for RocketConstants {
    fn default() -> Self {
        Self::from_json(DEFAULT_CONSTANTS).expect("bundled rocket constants are valid")
    }
}

impl RocketConstants {
    pub fn from_json(json: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(json)
            .map_err(|e| FmcError::Environment(format!("rocket constants: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("arena_width", self.arena_width),
            ("arena_height", self.arena_height),
            ("body_mass", self.body_mass),
            ("body_radius", self.body_radius),
            ("moment_of_inertia", self.moment_of_inertia),
            ("hook_mass", self.hook_mass),
            ("hook_rest_length", self.hook_rest_length),
            ("pickup_radius", self.pickup_radius),
            ("deploy_radius", self.deploy_radius),
            ("max_substep", self.max_substep),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(FmcError::Environment(format!("{name} must be positive, got {v}")));
            }
        }
        if self.rock_spawns.is_empty() || self.rock_count == 0 {
            return Err(FmcError::Environment("need at least one rock and one spawn point".into()));
        }
        if !(0.0..=1.0).contains(&self.restitution) || !(0.0..=1.0).contains(&self.wall_friction) {
            return Err(FmcError::Environment("restitution and friction must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rock {
    pub pos: [f64; 2],
    pub vel: [f64; 2],
    pub carried: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeployZone {
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocketState {
    pub pos: [f64; 2],
    pub vel: [f64; 2],
    /// Radians from vertical, counter-clockwise positive.
    pub heading: f64,
    pub omega: f64,
    pub health: f64,
    pub hook_pos: [f64; 2],
    pub hook_vel: [f64; 2],
    pub rocks: Vec<Rock>,
    pub deploy: DeployZone,
    pub goals: u32,
    pub time: f64,
}

impl RocketState {
    pub fn carrying(&self) -> Option<usize> {
        self.rocks.iter().position(|r| r.carried)
    }
}

/// What the hook is currently trying to reach.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HookTarget {
    Rock(usize),
    Deploy,
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Hook reward as a function of the distance ratio `d_now / d_initial`.
///
/// 100 at the target, 0.2 once the distance shrank by 20%, 1e-9 when no
/// closer than at the root; log-linear between those anchors.
pub fn hook_reward(d_now: f64, d_initial: f64) -> Result<f64> {
    if !(d_initial.is_finite() && d_initial > 0.0) {
        return Err(FmcError::InvalidParams(format!(
            "initial hook distance must be positive, got {d_initial}"
        )));
    }
    let rho = (d_now / d_initial).max(0.0);
    Ok(hook_reward_at_ratio(rho))
}

fn hook_reward_at_ratio(rho: f64) -> f64 {
    let (hi, mid, lo) = (HOOK_REWARD_SUCCESS.ln(), HOOK_REWARD_PROGRESS.ln(), HOOK_REWARD_FAILURE.ln());
    if rho >= 1.0 {
        HOOK_REWARD_FAILURE
    } else if rho == 0.0 {
        HOOK_REWARD_SUCCESS
    } else if rho == PROGRESS_RATIO {
        HOOK_REWARD_PROGRESS
    } else if rho < PROGRESS_RATIO {
        (hi + rho / PROGRESS_RATIO * (mid - hi)).exp()
    } else {
        (mid + (rho - PROGRESS_RATIO) / (1.0 - PROGRESS_RATIO) * (lo - mid)).exp()
    }
}

/// Euclidean distance over position and velocity of the rocket body only.
pub fn rocket_distance(a: &RocketState, b: &RocketState) -> f64 {
    ((a.pos[0] - b.pos[0]).powi(2)
        + (a.vel[0] - b.vel[0]).powi(2)
        + (a.pos[1] - b.pos[1]).powi(2)
        + (a.vel[1] - b.vel[1]).powi(2))
    .sqrt()
}

#[derive(Debug, Clone)]
pub struct Rocket {
    pub constants: RocketConstants,
    spec: ActionSpec,
}

impl Default for Rocket {
    fn default() -> Self {
        Self::new(RocketConstants::default()).expect("default constants")
    }
}

impl Rocket {
    pub fn new(constants: RocketConstants) -> Result<Self> {
        constants.validate()?;
        Ok(Self { constants, spec: ActionSpec::Continuous { bounds: vec![(0.0, 1.0), (-1.0, 1.0)] } })
    }

    fn spawn(&self, slot: usize) -> Rock {
        let s = &self.constants.rock_spawns;
        Rock { pos: s[slot % s.len()], vel: [0.0, 0.0], carried: false }
    }

    pub fn target(&self, s: &RocketState) -> HookTarget {
        if s.carrying().is_some() {
            return HookTarget::Deploy;
        }
        let mut best = (0, f64::INFINITY);
        for (i, r) in s.rocks.iter().enumerate() {
            let d = dist(s.hook_pos, r.pos);
            if d < best.1 {
                best = (i, d);
            }
        }
        HookTarget::Rock(best.0)
    }

    pub fn target_distance(&self, s: &RocketState, target: HookTarget) -> f64 {
        match target {
            HookTarget::Rock(i) => dist(s.hook_pos, s.rocks[i].pos),
            HookTarget::Deploy => dist(s.hook_pos, s.deploy.center),
        }
    }

    /// Current and root-state distance to the walker's target.
    ///
    /// Picking up a rock or delivering one counts as reaching the target;
    /// dropping a carried rock counts as no progress.
    pub fn hook_progress(&self, root: &RocketState, s: &RocketState) -> (f64, f64) {
        if s.goals > root.goals {
            return (0.0, 1.0);
        }
        match (root.carrying().is_some(), s.carrying().is_some()) {
            (false, true) => (0.0, 1.0),
            (true, false) => (1.0, 1.0),
            _ => {
                let t = self.target(s);
                let d_now = self.target_distance(s, t);
                let d_root = self.target_distance(root, t).max(1e-6);
                (d_now, d_root)
            }
        }
    }

    /// Advances the hook one sub-step against an anchor point. Exposed for energy audits.
    pub fn hook_substep(&self, hook_pos: &mut [f64; 2], hook_vel: &mut [f64; 2], anchor: [f64; 2], anchor_vel: [f64; 2], extra_mass: f64, h: f64) {
        let c = &self.constants;
        let mass = c.hook_mass + extra_mass;
        let d = [hook_pos[0] - anchor[0], hook_pos[1] - anchor[1]];
        let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
        let mut force = [0.0, -c.gravity * mass];
        if len > c.hook_rest_length {
            let n = [d[0] / len, d[1] / len];
            let stretch = len - c.hook_rest_length;
            let rel = (hook_vel[0] - anchor_vel[0]) * n[0] + (hook_vel[1] - anchor_vel[1]) * n[1];
            let f = -c.hook_stiffness * stretch - c.hook_damping * rel;
            force[0] += f * n[0];
            force[1] += f * n[1];
        }
        hook_vel[0] += force[0] / mass * h;
        hook_vel[1] += force[1] / mass * h;
        hook_pos[0] += hook_vel[0] * h;
        hook_pos[1] += hook_vel[1] * h;
    }

    /// Hook energy relative to a fixed anchor: kinetic + gravitational + band.
    pub fn hook_energy(&self, hook_pos: [f64; 2], hook_vel: [f64; 2], anchor: [f64; 2]) -> f64 {
        let c = &self.constants;
        let stretch = (dist(hook_pos, anchor) - c.hook_rest_length).max(0.0);
        0.5 * c.hook_mass * (hook_vel[0].powi(2) + hook_vel[1].powi(2))
            + c.hook_mass * c.gravity * hook_pos[1]
            + 0.5 * c.hook_stiffness * stretch * stretch
    }

    fn body_substep(&self, s: &mut RocketState, main: f64, side: f64, h: f64) {
        let c = &self.constants;
        let thrust = main * c.max_main_thrust;
        let (sin, cos) = s.heading.sin_cos();
        s.vel[0] += (-sin * thrust / c.body_mass) * h;
        s.vel[1] += (cos * thrust / c.body_mass - c.gravity) * h;
        s.pos[0] += s.vel[0] * h;
        s.pos[1] += s.vel[1] * h;
        let torque = side * c.max_side_torque - c.righting_torque * sin;
        let ang_acc = torque / c.moment_of_inertia - c.angular_damping * s.omega;
        s.omega += ang_acc * h;
        s.heading += s.omega * h;
        if s.heading > std::f64::consts::PI {
            s.heading -= std::f64::consts::TAU;
        } else if s.heading <= -std::f64::consts::PI {
            s.heading += std::f64::consts::TAU;
        }
        self.collide_body(s);
    }

    fn collide_body(&self, s: &mut RocketState) {
        let c = &self.constants;
        let r = c.body_radius;
        let mut impact = 0.0;
        for axis in 0..2 {
            let hi = if axis == 0 { c.arena_width } else { c.arena_height } - r;
            let (wall, inward) = if s.pos[axis] < r {
                (r, s.vel[axis] < 0.0)
            } else if s.pos[axis] > hi {
                (hi, s.vel[axis] > 0.0)
            } else {
                continue;
            };
            s.pos[axis] = wall;
            if inward {
                let vn = s.vel[axis];
                impact += 0.5 * c.body_mass * (vn * vn - c.safe_impact_speed.powi(2)).max(0.0);
                s.vel[axis] = -c.restitution * vn;
                let t = 1 - axis;
                s.vel[t] *= 1.0 - c.wall_friction;
            }
        }
        if impact > 0.0 {
            s.health = (s.health - c.health_per_joule * impact).max(0.0);
        }
    }

    fn contain(&self, pos: &mut [f64; 2], vel: &mut [f64; 2], radius: f64, restitution: f64) {
        let c = &self.constants;
        for axis in 0..2 {
            let hi = if axis == 0 { c.arena_width } else { c.arena_height } - radius;
            if pos[axis] < radius {
                pos[axis] = radius;
                if vel[axis] < 0.0 {
                    vel[axis] *= -restitution;
                }
            } else if pos[axis] > hi {
                pos[axis] = hi;
                if vel[axis] > 0.0 {
                    vel[axis] *= -restitution;
                }
            }
        }
    }

    fn substep(&self, s: &mut RocketState, main: f64, side: f64, h: f64) {
        let c = &self.constants;
        self.body_substep(s, main, side, h);
        let carried = s.carrying();
        let extra = if carried.is_some() { c.rock_mass } else { 0.0 };
        let (mut hp, mut hv) = (s.hook_pos, s.hook_vel);
        self.hook_substep(&mut hp, &mut hv, s.pos, s.vel, extra, h);
        self.contain(&mut hp, &mut hv, 0.0, c.restitution);
        s.hook_pos = hp;
        s.hook_vel = hv;

        for rock in s.rocks.iter_mut() {
            if rock.carried {
                rock.pos = s.hook_pos;
                rock.vel = s.hook_vel;
                continue;
            }
            rock.vel[1] -= c.gravity * h;
            rock.pos[0] += rock.vel[0] * h;
            rock.pos[1] += rock.vel[1] * h;
            if rock.pos[1] <= c.rock_radius {
                // rocks land dead
                rock.pos[1] = c.rock_radius;
                rock.vel = [0.0, 0.0];
            }
            self.contain(&mut rock.pos, &mut rock.vel, c.rock_radius, 0.0);
        }

        match carried {
            None => {
                let hook = s.hook_pos;
                if let Some(i) = s.rocks.iter().position(|r| dist(hook, r.pos) < c.pickup_radius) {
                    s.rocks[i].carried = true;
                    s.rocks[i].pos = hook;
                    s.rocks[i].vel = s.hook_vel;
                }
            }
            Some(i) => {
                if dist(s.rocks[i].pos, s.deploy.center) < s.deploy.radius {
                    s.goals += 1;
                    let slot = s.goals as usize + i;
                    s.rocks[i] = self.spawn(slot);
                }
            }
        }
    }

    pub fn unpack(action: &Action) -> (f64, f64) {
        match action {
            Action::Continuous(v) if v.len() >= 2 => (v[0].clamp(0.0, 1.0), v[1].clamp(-1.0, 1.0)),
            Action::Continuous(v) => (v.first().copied().unwrap_or(0.0).clamp(0.0, 1.0), 0.0),
            Action::Discrete(_) => (0.0, 0.0),
        }
    }
}

impl Environment for Rocket {
    type State = RocketState;

    fn action_spec(&self) -> &ActionSpec {
        &self.spec
    }

    fn initial_state(&self) -> RocketState {
        let c = &self.constants;
        let pos = c.start_position;
        // hook hanging at its static equilibrium below the body
        let sag = c.hook_rest_length + c.hook_mass * c.gravity / c.hook_stiffness.max(1e-9);
        RocketState {
            pos,
            vel: [0.0, 0.0],
            heading: 0.0,
            omega: 0.0,
            health: 1.0,
            hook_pos: [pos[0], (pos[1] - sag).max(0.0)],
            hook_vel: [0.0, 0.0],
            rocks: (0..c.rock_count).map(|i| self.spawn(i)).collect(),
            deploy: DeployZone { center: c.deploy_center, radius: c.deploy_radius },
            goals: 0,
            time: 0.0,
        }
    }

    fn step(&self, state: &RocketState, action: &Action, dt: f64) -> RocketState {
        let mut s = state.clone();
        if self.is_dead(&s) || dt.is_nan() || dt <= 0.0 {
            return s;
        }
        let (main, side) = Self::unpack(action);
        let n = (dt / self.constants.max_substep).ceil().max(1.0) as usize;
        let h = dt / n as f64;
        for _ in 0..n {
            self.substep(&mut s, main, side, h);
            if self.is_dead(&s) {
                break;
            }
        }
        s.time += dt;
        s
    }

    fn reward_components(&self, root: &RocketState, s: &RocketState) -> Vec<RewardComponent> {
        let c = &self.constants;
        let (d_now, d_root) = self.hook_progress(root, s);
        let hook = hook_reward(d_now, d_root).unwrap_or(HOOK_REWARD_FAILURE);
        vec![
            RewardComponent::new(s.health.max(0.0), c.health_weight),
            RewardComponent::new(hook, c.hook_weight),
        ]
    }

    fn is_dead(&self, s: &RocketState) -> bool {
        s.health <= 0.0
    }

    fn distance(&self, a: &RocketState, b: &RocketState) -> f64 {
        rocket_distance(a, b)
    }

    fn observe(&self, s: &RocketState) -> Observation {
        Observation::Vector(vec![
            s.pos[0], s.pos[1], s.vel[0], s.vel[1], s.heading, s.omega, s.health,
            s.hook_pos[0], s.hook_pos[1], s.hook_vel[0], s.hook_vel[1],
        ])
    }

    fn points(&self, s: &RocketState) -> f64 {
        s.goals as f64
    }
}
