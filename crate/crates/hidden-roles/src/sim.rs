//! Small multi-player simultaneous-move hidden-role games in explicit form.
//!
//! A [`SimGame`] is the input to the mediator reduction: chance first draws a
//! team assignment from [`SimGame::deals`], then play proceeds through a
//! stage tree of simultaneous [`SimNode::Act`] nodes (every player picks an
//! action; joint actions index the children), interior chance nodes, and
//! terminals carrying MAX's utility. Each player receives an observation
//! label on arriving at an `Act` node; the label determines that player's
//! action count there. MIN players' labels encode the full team assignment,
//! every player's label encodes at least its own team.

use crate::efg::Player;
use crate::rational::Rational;
use num::traits::{One, Zero};
use std::collections::HashMap;
use thiserror::Error;

pub type SimNodeId = u32;

/// Per-player team flags. At least one MAX player.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TeamAssignment(pub Vec<Player>);

impl TeamAssignment {
    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn min_players(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, t)| **t == Player::Min)
            .map(|(i, _)| i)
    }

    pub fn min_count(&self) -> usize {
        self.min_players().count()
    }

    /// Compact rendering, e.g. `XXN` for (MAX, MAX, MIN).
    pub fn label(&self) -> String {
        self.0
            .iter()
            .map(|t| if *t == Player::Max { 'X' } else { 'N' })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub enum SimNode {
    Chance {
        outcomes: Vec<(Rational, SimNodeId)>,
    },
    /// Simultaneous decision: `obs[i]` is what player i observes here,
    /// `action_counts[i]` its number of actions, and `children` is indexed by
    /// the joint action (player 0 most significant).
    Act {
        obs: Vec<String>,
        action_counts: Vec<usize>,
        children: Vec<SimNodeId>,
    },
    Terminal {
        payoff: Rational,
    },
}

#[derive(Debug, Clone)]
pub struct DealBranch {
    pub prob: Rational,
    pub teams: TeamAssignment,
    pub root: SimNodeId,
}

#[derive(Debug, Clone)]
pub struct SimGame {
    pub name: String,
    pub n: usize,
    pub deals: Vec<DealBranch>,
    pub nodes: Vec<SimNode>,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub fn joint_index(counts: &[usize], actions: &[usize]) -> usize {
    debug_assert_eq!(counts.len(), actions.len());
    let mut idx = 0;
    for (c, a) in counts.iter().zip(actions) {
        debug_assert!(a < c);
        idx = idx * c + a;
    }
    idx
}

impl SimGame {
    pub fn node(&self, id: SimNodeId) -> &SimNode {
        &self.nodes[id as usize]
    }

    /// Largest MIN-team size over the assignment support.
    pub fn max_min_team(&self) -> usize {
        self.deals.iter().map(|d| d.teams.min_count()).max().unwrap_or(0)
    }

    /// Number of histories counting the assignment root plus every stage
    /// node expanded per deal (shared stage nodes count once per deal they
    /// appear under).
    pub fn history_count(&self) -> u64 {
        let mut total: u64 = 1;
        for d in &self.deals {
            let mut stack = vec![d.root];
            while let Some(id) = stack.pop() {
                total += 1;
                match self.node(id) {
                    SimNode::Terminal { .. } => {}
                    SimNode::Chance { outcomes } => {
                        for (_, c) in outcomes {
                            stack.push(*c);
                        }
                    }
                    SimNode::Act { children, .. } => {
                        for c in children {
                            stack.push(*c);
                        }
                    }
                }
            }
        }
        total
    }

    /// Structural validation. Checks tree-ness per deal subtree, probability
    /// sums, joint-action child counts, observation/action-count consistency,
    /// and the hidden-role observation separations: a player's label tells it
    /// its own team, and a MIN player's label pins the entire assignment.
    pub fn validate(&self) -> Result<(), SimError> {
        if self.deals.is_empty() {
            return Err(SimError::Invalid("empty assignment support".into()));
        }
        let mut sum = Rational::zero();
        for d in &self.deals {
            if d.teams.n() != self.n {
                return Err(SimError::Invalid(format!(
                    "assignment {} has wrong length",
                    d.teams.label()
                )));
            }
            if d.teams.0.iter().all(|t| *t == Player::Min) {
                return Err(SimError::Invalid(format!(
                    "assignment {} has no MAX player",
                    d.teams.label()
                )));
            }
            if d.prob < Rational::zero() {
                return Err(SimError::Invalid("negative deal probability".into()));
            }
            sum = &sum + &d.prob;
        }
        if !sum.is_one() {
            return Err(SimError::Invalid(format!(
                "assignment probabilities sum to {sum}, expected 1"
            )));
        }

        let mut obs_actions: HashMap<(usize, &str), usize> = HashMap::new();
        for d in &self.deals {
            let mut stack = vec![d.root];
            while let Some(id) = stack.pop() {
                match self.node(id) {
                    SimNode::Terminal { .. } => {}
                    SimNode::Chance { outcomes } => {
                        if outcomes.is_empty() {
                            return Err(SimError::Invalid(format!("chance node {id} empty")));
                        }
                        let s: Rational = outcomes.iter().map(|(p, _)| p.clone()).sum();
                        if !s.is_one() {
                            return Err(SimError::Invalid(format!(
                                "chance node {id} probabilities sum to {s}"
                            )));
                        }
                        for (_, c) in outcomes {
                            stack.push(*c);
                        }
                    }
                    SimNode::Act {
                        obs,
                        action_counts,
                        children,
                    } => {
                        if obs.len() != self.n || action_counts.len() != self.n {
                            return Err(SimError::Invalid(format!(
                                "act node {id} has wrong arity"
                            )));
                        }
                        let prod: usize = action_counts.iter().product();
                        if prod != children.len() || prod == 0 {
                            return Err(SimError::Invalid(format!(
                                "act node {id}: {} children for joint action space {prod}",
                                children.len()
                            )));
                        }
                        for (i, o) in obs.iter().enumerate() {
                            let prev = obs_actions.insert((i, o.as_str()), action_counts[i]);
                            if let Some(prev) = prev {
                                if prev != action_counts[i] {
                                    return Err(SimError::Invalid(format!(
                                        "player {i} observation {o:?} maps to action counts {prev} and {}",
                                        action_counts[i]
                                    )));
                                }
                            }
                        }
                        for c in children {
                            stack.push(*c);
                        }
                    }
                }
            }
        }

        // Observation separation at the first stage.
        for i in 0..self.n {
            let mut max_labels = std::collections::HashSet::new();
            let mut min_labels: HashMap<String, &TeamAssignment> = HashMap::new();
            for d in &self.deals {
                let label = self.first_obs(d.root, i)?;
                match d.teams.0[i] {
                    Player::Max => {
                        max_labels.insert(label);
                    }
                    Player::Min => {
                        if let Some(prev) = min_labels.insert(label.clone(), &d.teams) {
                            if prev != &d.teams {
                                return Err(SimError::Invalid(format!(
                                    "MIN player {i} observation {label:?} does not determine the assignment"
                                )));
                            }
                        }
                    }
                }
            }
            for l in min_labels.keys() {
                if max_labels.contains(l) {
                    return Err(SimError::Invalid(format!(
                        "player {i} observation {l:?} occurs on both teams"
                    )));
                }
            }
        }
        Ok(())
    }

    /// First observation of player `i` under a deal subtree (descends through
    /// chance via the first outcome; our generators observe the assignment
    /// before any interior chance).
    fn first_obs(&self, root: SimNodeId, i: usize) -> Result<String, SimError> {
        let mut id = root;
        loop {
            match self.node(id) {
                SimNode::Act { obs, .. } => return Ok(obs[i].clone()),
                SimNode::Chance { outcomes } => id = outcomes[0].1,
                SimNode::Terminal { .. } => {
                    return Err(SimError::Invalid(
                        "deal subtree terminates before any stage".into(),
                    ))
                }
            }
        }
    }
}

/// Builder with the same arena conventions as the game-tree builder.
pub struct SimGameBuilder {
    pub name: String,
    pub n: usize,
    nodes: Vec<SimNode>,
    deals: Vec<DealBranch>,
}

impl SimGameBuilder {
    pub fn new(name: impl Into<String>, n: usize) -> Self {
        SimGameBuilder {
            name: name.into(),
            n,
            nodes: Vec::new(),
            deals: Vec::new(),
        }
    }

    pub fn act(
        &mut self,
        obs: Vec<String>,
        action_counts: Vec<usize>,
        children: Vec<SimNodeId>,
    ) -> SimNodeId {
        self.push(SimNode::Act {
            obs,
            action_counts,
            children,
        })
    }

    pub fn chance(&mut self, outcomes: Vec<(Rational, SimNodeId)>) -> SimNodeId {
        self.push(SimNode::Chance { outcomes })
    }

    pub fn terminal(&mut self, payoff: Rational) -> SimNodeId {
        self.push(SimNode::Terminal { payoff })
    }

    pub fn deal(&mut self, prob: Rational, teams: Vec<Player>, root: SimNodeId) {
        self.deals.push(DealBranch {
            prob,
            teams: TeamAssignment(teams),
            root,
        });
    }

    fn push(&mut self, n: SimNode) -> SimNodeId {
        let id = self.nodes.len() as SimNodeId;
        self.nodes.push(n);
        id
    }

    pub fn finish(self) -> SimGame {
        SimGame {
            name: self.name,
            n: self.n,
            deals: self.deals,
            nodes: self.nodes,
        }
    }
}
