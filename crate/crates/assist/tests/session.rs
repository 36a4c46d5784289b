use fmc_assist::{Direction, Session, SessionConfig, SteeringMessage, TelemetryFrame, TELEMETRY_SCHEMA};
use fmc_core::{plan, step_seed, ActionSampler, Environment};

fn session(seed: u64) -> Session {
    Session::new(SessionConfig { seed, ..Default::default() }).unwrap()
}

fn run(s: &mut Session, frames: usize) -> Vec<TelemetryFrame> {
    (0..frames).map(|_| s.step().unwrap()).collect()
}

#[test]
fn no_steering_matches_plain_autopilot() {
    let mut s = session(3);
    s.steer(&SteeringMessage::new(Direction::None, 1.0)).unwrap();
    let config = s.config().clone();
    for frame in 0..20u64 {
        let state = s.state().clone();
        let params = config.params(step_seed(config.seed, frame as usize));
        let expected = plan(s.env(), &state, &params, ActionSampler::uniform()).unwrap();
        let f = s.step().unwrap();
        assert_eq!(expected.chosen.vector().unwrap(), &f.decision[..], "frame {frame}");
        assert!(!f.vetoed);
    }
}

#[test]
fn frames_advance_headless_and_echo_steering() {
    let mut s = session(0);
    let before = run(&mut s, 3);
    s.steer(&SteeringMessage::new(Direction::Up, 0.5)).unwrap();
    let after = s.step().unwrap();
    let frames: Vec<u64> = before.iter().chain([&after]).map(|f| f.frame).collect();
    assert_eq!(frames, vec![0, 1, 2, 3]);
    assert!(before[2].time > before[0].time);
    assert!(before.iter().all(|f| f.prior.iter().all(|&p| (p - 1.0 / 9.0).abs() < 1e-12)));
    assert_eq!(after.steering.direction, Direction::Up);
    let peak = after.prior.iter().cloned().fold(0.0, f64::max);
    assert_eq!(after.prior[7], peak);
    assert!((after.prior.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn rejected_steering_keeps_the_previous_prior() {
    let mut s = session(0);
    s.steer(&SteeringMessage::new(Direction::Left, 1.0)).unwrap();
    let bad = SteeringMessage { prior: Some(vec![0.5, 0.5]), ..Default::default() };
    assert!(s.steer(&bad).is_err());
    let f = s.step().unwrap();
    assert_eq!(f.steering.direction, Direction::Left);
    assert_eq!(f.prior.iter().cloned().fold(0.0, f64::max), f.prior[5]);
}

#[test]
fn crash_holds_then_resets() {
    let mut s = Session::new(SessionConfig { fps: 10.0, reset_after: 0.5, ..Default::default() }).unwrap();
    let mut wreck = s.env().initial_state();
    wreck.health = 0.0;
    s.set_state(wreck);
    let frames = run(&mut s, 7);
    assert!(frames[..5].iter().all(|f| f.terminal && f.walkers_alive == 0 && f.episode == 0));
    assert!(!frames[5].terminal);
    assert_eq!(frames[5].episode, 1);
    assert_eq!(frames[5].state, s.env().initial_state());
    assert!(frames[6].walkers_alive > 0);
}

#[test]
fn every_frame_matches_the_schema() {
    let schema: serde_json::Value = serde_json::from_str(TELEMETRY_SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let mut s = Session::new(SessionConfig { walkers: 30, ticks: 8, reset_after: 1.0, ..Default::default() }).unwrap();
    let script = [Direction::None, Direction::Up, Direction::Right, Direction::Down, Direction::Left];
    let mut last = None;
    for i in 0..1000 {
        if i % 100 == 0 {
            s.steer(&SteeringMessage::new(script[i / 100 % script.len()], 1.0)).unwrap();
        }
        let f = s.step().unwrap();
        let json = serde_json::to_value(&f).unwrap();
        if let Err(e) = validator.validate(&json) {
            panic!("frame {i}: {e}\n{json}");
        }
        assert!(last < Some(f.frame));
        last = Some(f.frame);
    }
}

#[test]
fn steering_up_climbs_faster_than_unsteered() {
    // paired runs: same seed, steer only after a 2 s settle
    let mut wins = 0;
    for seed in 0..10 {
        let mut mean_vy = [0.0; 2];
        for (k, dir) in [Direction::None, Direction::Up].into_iter().enumerate() {
            let mut s = session(seed);
            run(&mut s, 20);
            s.steer(&SteeringMessage::new(dir, 1.0)).unwrap();
            mean_vy[k] = run(&mut s, 20).iter().map(|f| f.state.vel[1]).sum::<f64>() / 20.0;
        }
        wins += (mean_vy[1] > mean_vy[0]) as usize;
    }
    // one-sided sign test: P(X >= 9 | p = 1/2) = 11/1024 < 0.05
    assert!(wins >= 9, "steering up won {wins}/10 pairs");
}

#[test]
fn steering_into_the_left_wall_does_not_crash() {
    for seed in 0..2 {
        let mut s = session(seed);
        s.steer(&SteeringMessage::new(Direction::Left, 1.0)).unwrap();
        let frames = run(&mut s, 300);
        let low = frames.iter().map(|f| f.state.health).fold(1.0, f64::min);
        assert!(low > 0.0, "seed {seed} crashed");
        assert!(frames.iter().any(|f| f.vetoed), "seed {seed} never vetoed");
        // it did reach the wall
        assert!(frames.iter().any(|f| f.state.pos[0] < 2.0));
    }
}
