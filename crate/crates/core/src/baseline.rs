//! Reference policies: uniform random and plain Monte Carlo rollouts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::action::{Action, ActionSpec};
use crate::env::Environment;
use crate::error::{FmcError, Result};
use crate::swarm::{Decision, DecisionSummary, FmcParams};

/// `N` independent random walks of `M` ticks; act like the walk whose final
/// state has the highest reward (lowest walker index on ties).
pub fn vanilla_mc_decide<E: Environment>(env: &E, state: &E::State, params: &FmcParams) -> Result<Decision> {
    if params.n_walkers < 1 || params.ticks < 1 || params.dt.is_nan() || params.dt <= 0.0 {
        return Err(FmcError::InvalidParams(format!(
            "vanilla MC needs n_walkers >= 1, ticks >= 1 and dt > 0 (got {}, {}, {})",
            params.n_walkers, params.ticks, params.dt
        )));
    }
    let spec = env.action_spec();
    let mut best: Option<(f64, Action)> = None;
    for i in 0..params.n_walkers {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(i as u64);
        let initial = spec.sample_uniform(&mut rng);
        let mut s = env.step(state, &initial, params.dt);
        for _ in 1..params.ticks {
            if env.is_dead(&s) {
                break;
            }
            let a = spec.sample_uniform(&mut rng);
            s = env.step(&s, &a, params.dt);
        }
        let r = if env.is_dead(&s) { 0.0 } else { env.reward(state, &s) };
        if best.as_ref().is_none_or(|(br, _)| r > *br) {
            best = Some((r, initial));
        }
    }
    let (_, chosen) = best.expect("at least one walk");
    let summary = match (spec, &chosen) {
        (ActionSpec::Discrete { count }, Action::Discrete(a)) => {
            let mut w = vec![0.0; *count];
            w[*a] = 1.0;
            DecisionSummary::Discrete(w)
        }
        (_, a) => DecisionSummary::Continuous(a.vector().unwrap_or_default().to_vec()),
    };
    Ok(Decision {
        summary,
        chosen,
        samples_used: params.n_walkers * params.ticks,
        degenerate: false,
    })
}

/// One uniformly random action; consumes no simulator samples.
pub fn random_action<R: Rng + ?Sized>(spec: &ActionSpec, rng: &mut R) -> Action {
    spec.sample_uniform(rng)
}
