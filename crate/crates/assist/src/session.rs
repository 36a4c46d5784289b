use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::extract::ws::Utf8Bytes;
use fmc_core::env::{Rocket, RocketState};
use fmc_core::{step_seed, Action, ActionSampler, DecisionSummary, Environment, FmcParams, Swarm};
use serde::{Deserialize, Serialize};
use tokio::sync::{broadcast, watch};
use tracing::warn;

use crate::steering::{apply_steering, Direction, SteeringMessage, SteeringPrior};
use crate::{AssistError, SessionConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteeringEcho {
    pub direction: Direction,
    pub strength: f64,
}

/// One outbound `{"type":"telemetry", ...}` message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename = "telemetry")]
pub struct TelemetryFrame {
    pub frame: u64,
    /// Sim seconds since the current episode started.
    pub time: f64,
    /// Episodes restart from zero after each crash.
    pub episode: u64,
    pub state: RocketState,
    /// Action applied this frame: [main thrust, side torque].
    pub decision: Vec<f64>,
    /// The 9-cell distribution walkers sampled from.
    pub prior: Vec<f64>,
    pub steering: SteeringEcho,
    pub alpha: f64,
    pub walkers_alive: usize,
    /// The steering was overruled this frame because following it looked fatal.
    pub vetoed: bool,
    /// Set while the rocket is wrecked and waiting for reset.
    pub terminal: bool,
}

/// The live rocket and its autopilot. Stepping is synchronous; the real-time
/// loop in [`spawn_session`] just paces it.
pub struct Session {
    env: Rocket,
    config: SessionConfig,
    state: RocketState,
    steering: SteeringPrior,
    echo: SteeringEcho,
    frame: u64,
    episode: u64,
    dead_frames: u64,
}

impl Session {
    pub fn new(config: SessionConfig) -> Result<Self, AssistError> {
        Self::with_env(Rocket::default(), config)
    }

    pub fn with_env(env: Rocket, config: SessionConfig) -> Result<Self, AssistError> {
        config.validate()?;
        let state = env.initial_state();
        Ok(Self {
            env,
            config,
            state,
            steering: SteeringPrior::uniform(),
            echo: SteeringEcho { direction: Direction::None, strength: 0.0 },
            frame: 0,
            episode: 0,
            dead_frames: 0,
        })
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn state(&self) -> &RocketState {
        &self.state
    }

    pub fn env(&self) -> &Rocket {
        &self.env
    }

    /// Places the rocket somewhere else, e.g. for scripted tests.
    pub fn set_state(&mut self, state: RocketState) {
        self.state = state;
        self.dead_frames = 0;
    }

    /// Installs a new steering command. A bad message leaves the old one in place.
    pub fn steer(&mut self, msg: &SteeringMessage) -> Result<(), AssistError> {
        self.steering = apply_steering(msg, self.env.action_spec(), self.config.max_strength)?;
        self.echo = SteeringEcho { direction: msg.direction, strength: msg.strength };
        Ok(())
    }

    /// Plans and applies one action, or sits out the reset delay after a crash.
    pub fn step(&mut self) -> Result<TelemetryFrame, AssistError> {
        let (decision, walkers_alive, vetoed) = if self.env.is_dead(&self.state) {
            self.dead_frames += 1;
            if self.dead_frames > self.config.reset_frames() {
                self.state = self.env.initial_state();
                self.episode += 1;
                self.dead_frames = 0;
            }
            (vec![0.0, 0.0], 0, false)
        } else {
            let (action, alive, vetoed) = self.decide()?;
            self.state = self.env.step(&self.state, &Action::Continuous(action.clone()), self.config.frame_dt());
            (action, alive, vetoed)
        };
        let frame = TelemetryFrame {
            frame: self.frame,
            time: self.state.time,
            episode: self.episode,
            state: self.state.clone(),
            decision,
            prior: self.steering.blended().weights().to_vec(),
            steering: self.echo.clone(),
            alpha: self.config.alpha,
            walkers_alive,
            vetoed,
            terminal: self.env.is_dead(&self.state),
        };
        self.frame += 1;
        Ok(frame)
    }

    fn decide(&self) -> Result<(Vec<f64>, usize, bool), AssistError> {
        let params = self.config.params(step_seed(self.config.seed, self.frame as usize));
        // a neutral prior samples exactly like the plain autopilot
        if self.steering.is_neutral() {
            let (a, alive) = self.plan(&params, ActionSampler::uniform())?;
            return Ok((a, alive, false));
        }
        let steered = ActionSampler::with_prior(&self.steering, self.steering.strength);
        let (a, alive) = self.plan(&params, steered)?;
        if (alive as f64) >= self.config.veto_below * params.n_walkers as f64 {
            return Ok((a, alive, false));
        }
        let (a, alive) = self.plan(&params, ActionSampler::uniform())?;
        Ok((a, alive, true))
    }

    fn plan(&self, params: &FmcParams, sampler: ActionSampler<'_, RocketState>) -> Result<(Vec<f64>, usize), AssistError> {
        let mut swarm = Swarm::new(&self.env, self.state.clone(), params.clone(), sampler)?;
        swarm.run(&self.env, sampler)?;
        let d = swarm.decide(self.env.action_spec(), params.decision_mode);
        let action = match (&d.chosen, &d.summary) {
            (Action::Continuous(v), _) => v.clone(),
            (_, DecisionSummary::Continuous(v)) => v.clone(),
            _ => unreachable!("rocket actions are continuous"),
        };
        Ok((action, swarm.alive()))
    }
}

/// Channels into and out of a running session.
#[derive(Clone)]
pub struct SessionLink {
    pub steer: watch::Sender<SteeringMessage>,
    pub frames: broadcast::Sender<Utf8Bytes>,
}

/// Stops the session thread when dropped.
pub struct SessionHandle {
    stop: Arc<AtomicBool>,
    thread: Option<std::thread::JoinHandle<()>>,
}

impl Drop for SessionHandle {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::Relaxed);
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

/// Frames kept per client before the slowest starts losing the oldest ones.
pub const CLIENT_BACKLOG: usize = 8;

/// Runs `session` in real time on its own thread.
///
/// The thread is the only owner of the simulation. Steering arrives through a
/// watch channel, so only the latest message counts; telemetry fans out on a
/// broadcast channel where a lagging client skips frames instead of blocking.
pub fn spawn_session(mut session: Session) -> (SessionLink, SessionHandle) {
    let (steer_tx, mut steer_rx) = watch::channel(SteeringMessage::default());
    let (frames_tx, _) = broadcast::channel(CLIENT_BACKLOG);
    let link = SessionLink { steer: steer_tx, frames: frames_tx.clone() };
    let stop = Arc::new(AtomicBool::new(false));
    let stop_flag = stop.clone();
    let period = Duration::from_secs_f64(session.config().frame_dt());
    let thread = std::thread::Builder::new()
        .name("fmc-session".into())
        .spawn(move || {
            let mut next = Instant::now();
            while !stop_flag.load(Ordering::Relaxed) {
                if steer_rx.has_changed().unwrap_or(false) {
                    let msg = steer_rx.borrow_and_update().clone();
                    if let Err(e) = session.steer(&msg) {
                        warn!("ignoring steering: {e}");
                    }
                }
                match session.step() {
                    Ok(frame) => {
                        let json = serde_json::to_string(&frame).expect("telemetry serialises");
                        // no subscribers is fine, the loop runs headless
                        let _ = frames_tx.send(Utf8Bytes::from(json));
                    }
                    Err(e) => {
                        warn!("session stopped: {e}");
                        break;
                    }
                }
                next += period;
                let now = Instant::now();
                if next > now {
                    std::thread::sleep(next - now);
                } else {
                    // overran the frame budget; don't try to catch up
                    next = now;
                }
            }
        })
        .expect("spawn session thread");
    (link, SessionHandle { stop, thread: Some(thread) })
}
