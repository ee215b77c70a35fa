//! Monte Carlo tree search with double progressive widening.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::SearchConfig;
use super::episode::{rollout, ActionSampler, Episode, Problem};
use super::{SearchOutcome, SearchStatus};
use crate::dissim::FailureArchive;
use crate::error::Result;
use crate::scenario::EnvAction;

pub type NodeId = usize;

#[derive(Debug, Clone)]
pub struct SearchNode {
    pub visit_count: u64,
    pub value_sum: f64,
    pub depth: usize,
    /// Sampled action vectors and the nodes they lead to, in sampling order.
    pub children: Vec<(Vec<EnvAction<f64>>, NodeId)>,
}

impl SearchNode {
    fn new(depth: usize) -> Self {
        Self {
            visit_count: 0,
            value_sum: 0.0,
            depth,
            children: Vec::new(),
        }
    }

    pub fn value_mean(&self) -> f64 {
        if self.visit_count == 0 {
            0.0
        } else {
            self.value_sum / self.visit_count as f64
        }
    }
}

/// Largest number of children a node with `visits` visits may hold.
pub fn widening_cap(visits: u64, c_pw: f64, alpha_pw: f64) -> usize {
    ((c_pw * (visits as f64).powf(alpha_pw)).ceil() as usize).max(1)
}

/// Master seed → (action stream, tie-break stream).
pub fn rng_streams(seed: u64) -> (ChaCha8Rng, ChaCha8Rng) {
    let mut actions = ChaCha8Rng::seed_from_u64(seed);
    actions.set_stream(1);
    let mut ties = ChaCha8Rng::seed_from_u64(seed);
    ties.set_stream(2);
    (actions, ties)
}

#[derive(Debug, Clone)]
pub struct SearchTree {
    nodes: Vec<SearchNode>,
    /// Range of episode returns seen, used to scale node values into [0, 1]
    /// before they meet the exploration term.
    ret_min: f64,
    ret_max: f64,
}

impl Default for SearchTree {
    fn default() -> Self {
        Self::new()
    }
}

impl SearchTree {
    pub fn new() -> Self {
        Self {
            nodes: vec![SearchNode::new(0)],
            ret_min: f64::INFINITY,
            ret_max: f64::NEG_INFINITY,
        }
    }

    pub const ROOT: NodeId = 0;

    pub fn node(&self, id: NodeId) -> &SearchNode {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[SearchNode] {
        &self.nodes
    }

    fn normalized(&self, mean: f64) -> f64 {
        if self.ret_max > self.ret_min {
            (mean - self.ret_min) / (self.ret_max - self.ret_min)
        } else {
            0.5
        }
    }

    pub fn ucb(&self, parent: NodeId, child: NodeId, c_ucb: f64) -> f64 {
        let n = self.nodes[parent].visit_count.max(1) as f64;
        let c = &self.nodes[child];
        if c.visit_count == 0 {
            return f64::INFINITY;
        }
        self.normalized(c.value_mean()) + c_ucb * (n.ln() / c.visit_count as f64).sqrt()
    }

    /// Either widens `node` with a freshly sampled action (returns `true`) or
    /// picks the existing child with the best UCB1 score.
    pub fn select_action(
        &mut self,
        node: NodeId,
        sampler: &mut ActionSampler,
        ties: &mut ChaCha8Rng,
        n_peds: usize,
        cfg: &SearchConfig,
    ) -> (Vec<EnvAction<f64>>, NodeId, bool) {
        let cap = widening_cap(self.nodes[node].visit_count, cfg.c_pw, cfg.alpha_pw);
        if self.nodes[node].children.len() < cap {
            let action = sampler.sample(n_peds);
            let child = self.nodes.len();
            self.nodes.push(SearchNode::new(self.nodes[node].depth + 1));
            self.nodes[node].children.push((action.clone(), child));
            return (action, child, true);
        }
        let mut best: Vec<usize> = Vec::new();
        let mut best_score = f64::NEG_INFINITY;
        for (i, (_, c)) in self.nodes[node].children.iter().enumerate() {
            let s = self.ucb(node, *c, cfg.c_ucb);
            if s > best_score {
                best_score = s;
                best.clear();
                best.push(i);
            } else if s == best_score {
                best.push(i);
            }
        }
        let pick = if best.len() == 1 { best[0] } else { best[ties.gen_range(0..best.len())] };
        let (action, child) = self.nodes[node].children[pick].clone();
        (action, child, false)
    }

    fn backpropagate(&mut self, path: &[NodeId], ret: f64) {
        self.ret_min = self.ret_min.min(ret);
        self.ret_max = self.ret_max.max(ret);
        for id in path {
            let n = &mut self.nodes[*id];
            n.visit_count += 1;
            n.value_sum += ret;
        }
    }
}

/// One selection / expansion / rollout / backup pass. Returns the finished
/// episode and the nodes it visited.
pub fn iterate(
    tree: &mut SearchTree,
    problem: &Problem,
    model: &crate::rewards::ActionModel<f64>,
    cfg: &SearchConfig,
    sampler: &mut ActionSampler,
    ties: &mut ChaCha8Rng,
    archive: &FailureArchive<f64>,
) -> Result<(Episode, Vec<NodeId>)> {
    let max_depth = cfg.max_depth.unwrap_or(problem.scenario.horizon).min(problem.scenario.horizon);
    let mut ep = Episode::start(problem, cfg.seed)?;
    let mut node = SearchTree::ROOT;
    let mut path = vec![node];
    while !ep.is_terminal(problem) && ep.depth() < max_depth {
        let (action, child, expanded) = tree.select_action(node, sampler, ties, problem.n_peds(), cfg);
        ep.step(problem, model, action, archive)?;
        node = child;
        path.push(node);
        if expanded {
            break;
        }
    }
    rollout(&mut ep, problem, model, max_depth, sampler, archive)?;
    tree.backpropagate(&path, ep.total_reward());
    Ok((ep, path))
}

pub fn mcts(problem: &Problem, cfg: &SearchConfig, mut archive: FailureArchive<f64>) -> Result<(SearchOutcome, SearchTree)> {
    cfg.validate()?;
    let model = problem.reward.action_model(problem.n_peds())?;
    let (action_rng, mut ties) = rng_streams(cfg.seed);
    let mut sampler = ActionSampler::new(action_rng, cfg.bounds);
    let mut tree = SearchTree::new();
    let mut failures = 0;
    for _ in 0..cfg.budget {
        let (ep, _) = iterate(&mut tree, problem, &model, cfg, &mut sampler, &mut ties, &archive)?;
        if ep.is_success(problem) {
            failures += 1;
            if archive.admits(ep.total_reward()) {
                let (traj, sig) = ep.into_parts(problem)?;
                archive.insert(traj, sig)?;
            }
        }
    }
    let outcome = SearchOutcome::new(archive, failures, cfg.budget, sampler.draws());
    Ok((outcome, tree))
}


impl SearchOutcome {
    pub(crate) fn new(archive: FailureArchive<f64>, failure_episodes: usize, episodes: usize, draws: u64) -> Self {
        let status = if archive.is_empty() {
            SearchStatus::NoFailures
        } else {
            SearchStatus::Found
        };
        Self {
            trajectories: archive.into_trajectories(),
            failure_episodes,
            episodes,
            action_draws: draws,
            status,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::ActionBounds;
    use crate::rewards::{RewardConfig, RewardMode};
    use crate::rss::RssParams;
    use crate::scenario::ScenarioConfig;

    fn problem(mode: RewardMode) -> Problem {
        Problem::new(ScenarioConfig::one_car_one_ped(), mode, RewardConfig::default(), RssParams::default()).unwrap()
    }

    fn cfg(budget: usize, seed: u64) -> SearchConfig {
        SearchConfig {
            budget,
            seed,
            ..SearchConfig::default()
        }
    }

    #[test]
    fn cap_examples() {
        assert_eq!(widening_cap(0, 1.0, 0.5), 1);
        assert_eq!(widening_cap(1, 1.0, 0.5), 1);
        assert_eq!(widening_cap(2, 1.0, 0.5), 2);
        assert_eq!(widening_cap(4, 1.0, 0.5), 2);
        assert_eq!(widening_cap(5, 1.0, 0.5), 3);
    }

    #[test]
    fn budget_one_is_one_episode() {
        let p = problem(RewardMode::Generic);
        let (out, tree) = mcts(&p, &cfg(1, 3), FailureArchive::new(25)).unwrap();
        assert_eq!(out.episodes, 1);
        assert_eq!(tree.node(SearchTree::ROOT).visit_count, 1);
        assert_eq!(tree.len(), 2);
    }

    #[test]
    fn fresh_node_always_widens() {
        let mut tree = SearchTree::new();
        let (a, _) = rng_streams(0);
        let mut s = ActionSampler::new(a, ActionBounds::default());
        let (_, mut ties) = rng_streams(0);
        let (_, child, expanded) = tree.select_action(SearchTree::ROOT, &mut s, &mut ties, 1, &cfg(1, 0));
        assert!(expanded);
        assert_eq!(child, 1);
    }

    #[test]
    fn ucb_prefers_rarely_visited_child_on_value_tie() {
        let mut tree = SearchTree::new();
        tree.nodes[0].visit_count = 10;
        for visits in [9, 1] {
            let id = tree.nodes.len();
            tree.nodes.push(SearchNode {
                visit_count: visits,
                value_sum: -5.0 * visits as f64,
                depth: 1,
                children: vec![],
            });
            tree.nodes[0].children.push((vec![EnvAction::zero()], id));
        }
        tree.ret_min = -10.0;
        tree.ret_max = 0.0;
        let (a, mut ties) = rng_streams(0);
        let mut s = ActionSampler::new(a, ActionBounds::default());
        let c = SearchConfig {
            c_pw: 0.5,
            ..cfg(1, 0)
        };
        assert_eq!(widening_cap(10, 0.5, 0.5), 2);
        let (_, child, expanded) = tree.select_action(SearchTree::ROOT, &mut s, &mut ties, 1, &c);
        assert!(!expanded);
        assert_eq!(child, 2);
    }

    #[test]
    fn deterministic_per_seed() {
        for mode in RewardMode::ALL {
            let p = problem(mode);
            let (a, _) = mcts(&p, &cfg(200, 11), FailureArchive::new(25)).unwrap();
            let (b, _) = mcts(&p, &cfg(200, 11), FailureArchive::new(25)).unwrap();
            assert_eq!(a.trajectories, b.trajectories);
            assert_eq!(a.failure_episodes, b.failure_episodes);
        }
    }

    #[test]
    fn bookkeeping_and_cap_hold() {
        let p = problem(RewardMode::Generic);
        let model = p.reward.action_model(1).unwrap();
        let c = cfg(300, 5);
        let (a, mut ties) = rng_streams(c.seed);
        let mut s = ActionSampler::new(a, c.bounds);
        let mut tree = SearchTree::new();
        let archive = FailureArchive::new(25);
        let mut expected = vec![0.0; 0];
        for _ in 0..c.budget {
            let (ep, path) = iterate(&mut tree, &p, &model, &c, &mut s, &mut ties, &archive).unwrap();
            expected.resize(tree.len(), 0.0);
            for id in path {
                expected[id] += ep.total_reward();
            }
            for n in tree.nodes() {
                assert!(n.children.len() <= widening_cap(n.visit_count, c.c_pw, c.alpha_pw));
                assert!(n.depth <= p.scenario.horizon);
            }
        }
        for (n, e) in tree.nodes().iter().zip(&expected) {
            assert!((n.value_sum - e).abs() <= 1e-9 * e.abs().max(1.0));
        }
        let root = tree.node(SearchTree::ROOT);
        assert_eq!(root.visit_count, 300);
        let child_visits: u64 = root.children.iter().map(|(_, c)| tree.node(*c).visit_count).sum();
        assert_eq!(child_visits, 300);
    }

    #[test]
    fn reward_mode_does_not_touch_action_stream() {
        let runs: Vec<_> = RewardMode::ALL
            .iter()
            .map(|m| {
                let p = problem(*m);
                let model = p.reward.action_model(1).unwrap();
                let c = cfg(1, 21);
                let (a, mut ties) = rng_streams(c.seed);
                let mut s = ActionSampler::new(a, c.bounds);
                let mut tree = SearchTree::new();
                let (ep, _) =
                    iterate(&mut tree, &p, &model, &c, &mut s, &mut ties, &FailureArchive::new(25)).unwrap();
                (ep.trajectory().actions().to_vec(), s.draws())
            })
            .collect();
        assert!(runs.windows(2).all(|w| w[0] == w[1]));
    }
}
