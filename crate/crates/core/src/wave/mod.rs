//! The swarm-wave flavour: one cone grown from a fixed root until some path
//! reaches a target score. Also hosts the rollout dataset and action priors.

mod dataset;
pub mod prior;

use std::collections::HashMap;

use crate::action::Action;
use crate::env::Environment;
use crate::error::Result;
use crate::swarm::{ActionSampler, FmcParams, Swarm};

pub use dataset::{RolloutDataset, RolloutRow};
pub use prior::{blend_prior, credibility, walker_budget, PriorProvider, TabularPrior, UniformPrior};

/// Ticks between sweeps of extinct lineages from the ancestry log.
pub const PRUNE_EVERY: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct WaveNode<S> {
    pub id: usize,
    pub parent: Option<usize>,
    /// Action that led here from the parent.
    pub action: Option<Action>,
    pub state: S,
    /// Points accumulated along the path, root included.
    pub score: f64,
    pub depth: usize,
}

#[derive(Debug, Clone)]
pub struct WaveResult<S> {
    /// Nodes from the first move to the best leaf; the root is not included.
    pub path: Vec<WaveNode<S>>,
    pub root: WaveNode<S>,
    pub dataset: RolloutDataset,
    pub samples_used: usize,
    pub ticks: usize,
    /// False when the target was not reached within `max_ticks`.
    pub complete: bool,
}

impl<S> WaveResult<S> {
    pub fn best_score(&self) -> f64 {
        self.path.last().map_or(self.root.score, |n| n.score)
    }

    pub fn actions(&self) -> Vec<Action> {
        self.path.iter().filter_map(|n| n.action.clone()).collect()
    }
}

struct Ancestry<S> {
    nodes: HashMap<usize, WaveNode<S>>,
    next_id: usize,
}

impl<S: Clone> Ancestry<S> {
    fn push(&mut self, parent: &WaveNode<S>, action: Action, state: S, points: f64) -> usize {
        let id = self.next_id;
        self.next_id += 1;
        self.nodes.insert(
            id,
            WaveNode {
                id,
                parent: Some(parent.id),
                action: Some(action),
                state,
                score: parent.score + points,
                depth: parent.depth + 1,
            },
        );
        id
    }

    /// Keeps only the nodes on some lineage ending in `live`.
    fn prune(&mut self, live: impl IntoIterator<Item = usize>) {
        let mut keep = HashMap::with_capacity(self.nodes.len());
        for mut id in live {
            while let Some(node) = self.nodes.remove(&id) {
                let parent = node.parent;
                keep.insert(id, node);
                match parent {
                    Some(p) => id = p,
                    None => break,
                }
            }
        }
        self.nodes = keep;
    }

    fn lineage(&self, leaf: usize) -> Vec<WaveNode<S>> {
        let mut path = Vec::new();
        let mut cur = self.nodes.get(&leaf);
        while let Some(node) = cur {
            path.push(node.clone());
            cur = node.parent.and_then(|p| self.nodes.get(&p));
        }
        path.reverse();
        path
    }
}

/// Grows a single cone from `x0` until some walker's path scores `target_score`.
///
/// `params.ticks` is ignored; the wave runs for at most `max_ticks`. Ties on
/// the best score go to the shallowest, then earliest, node.
pub fn swarm_wave<E: Environment>(
    env: &E,
    x0: &E::State,
    target_score: f64,
    params: &FmcParams,
    max_ticks: usize,
) -> Result<WaveResult<E::State>> {
    let params = FmcParams { ticks: max_ticks.max(1), ..params.clone() };
    params.validate()?;
    let root = WaveNode { id: 0, parent: None, action: None, state: x0.clone(), score: env.points(x0), depth: 0 };
    if root.score >= target_score || max_ticks == 0 {
        let complete = root.score >= target_score;
        return Ok(WaveResult {
            path: Vec::new(),
            dataset: RolloutDataset::default(),
            root,
            samples_used: 0,
            ticks: 0,
            complete,
        });
    }

    let sampler = ActionSampler::uniform();
    let mut swarm = Swarm::new(env, x0.clone(), params.clone(), sampler)?;
    let mut log = Ancestry { nodes: HashMap::from([(0, root.clone())]), next_id: 1 };
    let mut node_of = vec![0usize; params.n_walkers];
    let mut best = 0usize;
    let mut complete = false;

    while swarm.tick_index() < max_ticks && !swarm.is_terminal() {
        let report = swarm.tick(env, sampler)?;
        if report.terminal {
            break;
        }
        let before = node_of.clone();
        for i in 0..node_of.len() {
            if let Some(k) = report.cloned_from[i] {
                node_of[i] = before[k];
            } else if let Some(action) = &report.actions[i] {
                let state = swarm.walkers()[i].state.clone();
                let points = env.points(&state);
                let parent = log.nodes[&before[i]].clone();
                node_of[i] = log.push(&parent, action.clone(), state, points);
            }
        }
        for &id in &node_of {
            let (n, b) = (&log.nodes[&id], &log.nodes[&best]);
            if n.score > b.score || (n.score == b.score && (n.depth, n.id) < (b.depth, b.id)) {
                best = id;
            }
        }
        if log.nodes[&best].score >= target_score {
            complete = true;
            break;
        }
        if swarm.tick_index() % PRUNE_EVERY == 0 {
            log.prune(node_of.iter().copied().chain([best]));
        }
    }

    let ticks = swarm.tick_index();
    let mut lineage = log.lineage(best);
    let root = lineage.remove(0);

    let mut leaves: Vec<usize> = node_of.clone();
    leaves.sort_unstable();
    leaves.dedup();
    leaves.retain(|&id| id != best && id != 0);
    leaves.sort_by(|a, b| log.nodes[b].score.total_cmp(&log.nodes[a].score).then(a.cmp(b)));
    let mut dataset = RolloutDataset::default();
    dataset.push_episode(env, &root, &lineage);
    for leaf in leaves {
        let mut path = log.lineage(leaf);
        path.remove(0);
        dataset.push_episode(env, &root, &path);
    }

    Ok(WaveResult {
        path: lineage,
        root,
        dataset,
        samples_used: params.n_walkers * ticks,
        ticks,
        complete,
    })
}
