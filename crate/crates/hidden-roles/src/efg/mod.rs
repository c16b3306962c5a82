//! Two-player zero-sum extensive-form games with chance.
//!
//! A [`GameTree`] is an index arena of [`Node`]s rooted at [`GameTree::root`].
//! Parents always precede their children in the arena, so a single
//! index-ascending sweep is a top-down traversal and an index-descending
//! sweep is bottom-up; no recursion is needed on multi-million-node trees.
//! Terminal payoffs are MAX's utility as exact rationals; MIN's utility is
//! the negation. Trees are immutable after construction and safe to share
//! across threads.

mod best_response;
mod eval;
pub mod io;
mod strategy;
mod validate;

pub use best_response::{best_response, exploitability};
pub use eval::{expected_value, expected_value_forward, terminal_reaches, Value};
pub use strategy::BehavioralStrategy;
pub use validate::{validate, ValidationReport};

use crate::rational::Rational;
use num::traits::Zero;
use std::collections::HashMap;
use thiserror::Error;

pub type NodeId = u32;
pub type InfosetId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    Max,
    Min,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::Max => Player::Min,
            Player::Min => Player::Max,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Player::Max => "max",
            Player::Min => "min",
        }
    }

    pub fn parse(s: &str) -> Option<Player> {
        match s {
            "max" => Some(Player::Max),
            "min" => Some(Player::Min),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Node {
    /// Chance node: outcome probabilities are exact and sum to 1.
    Chance { outcomes: Vec<(Rational, NodeId)> },
    /// Decision node owned by `player`; `children.len()` equals the action
    /// count of its infoset.
    Decision {
        player: Player,
        infoset: InfosetId,
        children: Vec<NodeId>,
    },
    /// Terminal node holding MAX's utility.
    Terminal { payoff: Rational },
}

impl Node {
    pub fn is_terminal(&self) -> bool {
        matches!(self, Node::Terminal { .. })
    }
}

#[derive(Debug, Clone)]
pub struct Infoset {
    pub player: Player,
    pub actions: usize,
    /// Canonical byte string of the owner's observation/action history.
    pub key: String,
    /// Arena indices of all member decision nodes.
    pub members: Vec<NodeId>,
    /// The owner's previous (infoset, action) on the path to this infoset,
    /// shared by all members under perfect recall. `None` at the owner's
    /// first decision.
    pub parent: Option<(InfosetId, usize)>,
    /// Number of own (infoset, action) pairs before this infoset.
    pub depth: u32,
}

#[derive(Debug, Clone)]
pub struct GameTree {
    pub name: String,
    pub nodes: Vec<Node>,
    pub root: NodeId,
    pub infosets: Vec<Infoset>,
    /// Declared inclusive bounds on terminal payoffs.
    pub payoff_range: (Rational, Rational),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Counts {
    pub nodes: usize,
    pub terminals: usize,
    pub chance_nodes: usize,
    pub decision_nodes: usize,
    pub infosets_max: usize,
    pub infosets_min: usize,
}

#[derive(Debug, Error)]
pub enum EfgError {
    #[error("strategy for {player:?} is incomplete at infoset {infoset} ({key})")]
    StrategyIncomplete {
        player: Player,
        infoset: InfosetId,
        key: String,
    },
    #[error("strategy vector at infoset {infoset} has {got} entries, expected {expected}")]
    StrategyShape {
        infoset: InfosetId,
        got: usize,
        expected: usize,
    },
    #[error("strategy owner is {got:?}, expected {expected:?}")]
    StrategyOwner { got: Player, expected: Player },
    #[error("{0}")]
    Parse(String),
}

impl GameTree {
    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }

    pub fn infoset(&self, id: InfosetId) -> &Infoset {
        &self.infosets[id as usize]
    }

    pub fn counts(&self) -> Counts {
        let mut c = Counts {
            nodes: self.nodes.len(),
            terminals: 0,
            chance_nodes: 0,
            decision_nodes: 0,
            infosets_max: 0,
            infosets_min: 0,
        };
        for n in &self.nodes {
            match n {
                Node::Terminal { .. } => c.terminals += 1,
                Node::Chance { .. } => c.chance_nodes += 1,
                Node::Decision { .. } => c.decision_nodes += 1,
            }
        }
        for i in &self.infosets {
            match i.player {
                Player::Max => c.infosets_max += 1,
                Player::Min => c.infosets_min += 1,
            }
        }
        c
    }

    /// Infoset ids owned by `player`, in arena order.
    pub fn infosets_of(&self, player: Player) -> impl Iterator<Item = InfosetId> + '_ {
        self.infosets
            .iter()
            .enumerate()
            .filter(move |(_, i)| i.player == player)
            .map(|(id, _)| id as InfosetId)
    }
}

/// Incremental construction of a [`GameTree`].
///
/// Nodes may be created in any order; `finish` reindexes them in preorder so
/// the parent-before-child arena invariant holds, fills infoset member lists,
/// and derives per-infoset parent sequences (checking perfect recall).
pub struct GameTreeBuilder {
    name: String,
    nodes: Vec<Node>,
    infosets: Vec<Infoset>,
    keys: HashMap<String, InfosetId>,
    payoff_range: (Rational, Rational),
}

impl GameTreeBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        GameTreeBuilder {
            name: name.into(),
            nodes: Vec::new(),
            infosets: Vec::new(),
            keys: HashMap::new(),
            payoff_range: (Rational::zero(), Rational::zero()),
        }
    }

    pub fn payoff_range(mut self, lo: Rational, hi: Rational) -> Self {
        self.payoff_range = (lo, hi);
        self
    }

    /// Interns an infoset by key. The action count must agree on reuse.
    pub fn infoset(&mut self, player: Player, key: String, actions: usize) -> InfosetId {
        debug_assert!(
            !key.contains(char::is_whitespace),
            "infoset keys must be whitespace-free: {key:?}"
        );
        if let Some(&id) = self.keys.get(&key) {
            let i = &self.infosets[id as usize];
            assert_eq!(i.player, player, "infoset {key} reused with a different owner");
            assert_eq!(i.actions, actions, "infoset {key} reused with a different action count");
            return id;
        }
        let id = self.infosets.len() as InfosetId;
        self.infosets.push(Infoset {
            player,
            actions,
            key: key.clone(),
            members: Vec::new(),
            parent: None,
            depth: 0,
        });
        self.keys.insert(key, id);
        id
    }

    pub fn chance(&mut self, outcomes: Vec<(Rational, NodeId)>) -> NodeId {
        self.push(Node::Chance { outcomes })
    }

    pub fn decision(&mut self, infoset: InfosetId, children: Vec<NodeId>) -> NodeId {
        let player = self.infosets[infoset as usize].player;
        assert_eq!(
            children.len(),
            self.infosets[infoset as usize].actions,
            "decision node children must match the infoset action count"
        );
        self.push(Node::Decision {
            player,
            infoset,
            children,
        })
    }

    pub fn terminal(&mut self, payoff: Rational) -> NodeId {
        self.push(Node::Terminal { payoff })
    }

    fn push(&mut self, node: Node) -> NodeId {
        let id = self.nodes.len() as NodeId;
        self.nodes.push(node);
        id
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Reindexes in preorder from `root` and finalizes infoset bookkeeping.
    ///
    /// Panics if the node graph under `root` is not a tree or violates
    /// perfect recall; generators are expected to produce well-formed games
    /// and `validate` re-checks the result independently.
    pub fn finish(self, root: NodeId) -> GameTree {
        let GameTreeBuilder {
            name,
            nodes,
            mut infosets,
            keys: _,
            payoff_range,
        } = self;

        // Preorder remap. Explicit stack: trees can be wide and deep.
        let mut order: Vec<NodeId> = Vec::with_capacity(nodes.len());
        let mut new_id = vec![u32::MAX; nodes.len()];
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            assert_eq!(new_id[id as usize], u32::MAX, "node {id} reached twice; not a tree");
            new_id[id as usize] = order.len() as NodeId;
            order.push(id);
            match &nodes[id as usize] {
                Node::Chance { outcomes } => {
                    for (_, c) in outcomes.iter().rev() {
                        stack.push(*c);
                    }
                }
                Node::Decision { children, .. } => {
                    for c in children.iter().rev() {
                        stack.push(*c);
                    }
                }
                Node::Terminal { .. } => {}
            }
        }

        let mut old_nodes: Vec<Option<Node>> = nodes.into_iter().map(Some).collect();
        let mut new_nodes: Vec<Node> = Vec::with_capacity(order.len());
        for &old in &order {
            let mut n = old_nodes[old as usize].take().unwrap();
            match &mut n {
                Node::Chance { outcomes } => {
                    for (_, c) in outcomes.iter_mut() {
                        *c = new_id[*c as usize];
                    }
                }
                Node::Decision { children, .. } => {
                    for c in children.iter_mut() {
                        *c = new_id[*c as usize];
                    }
                }
                Node::Terminal { .. } => {}
            }
            new_nodes.push(n);
        }

        // Infoset members plus own-sequence parents (perfect-recall check).
        // seq = None for the empty sequence, else interned (infoset, action)
        // pairs; every member of an infoset must share its owner's sequence.
        for i in infosets.iter_mut() {
            i.members.clear();
        }
        let mut seq_intern: HashMap<(Option<u32>, InfosetId, usize), u32> = HashMap::new();
        let mut seq_info: Vec<(Option<u32>, InfosetId, usize, u32)> = Vec::new(); // (parent, infoset, action, depth)
        let mut infoset_seq: Vec<Option<Option<u32>>> = vec![None; infosets.len()];
        // (node, max seq, min seq), preorder walk over the finished arena
        let mut stack: Vec<(NodeId, Option<u32>, Option<u32>)> = vec![(0, None, None)];
        while let Some((id, sx, sy)) = stack.pop() {
            match &new_nodes[id as usize] {
                Node::Terminal { .. } => {}
                Node::Chance { outcomes } => {
                    for (_, c) in outcomes {
                        stack.push((*c, sx, sy));
                    }
                }
                Node::Decision {
                    player,
                    infoset,
                    children,
                } => {
                    let own = if *player == Player::Max { sx } else { sy };
                    match &infoset_seq[*infoset as usize] {
                        None => {
                            infoset_seq[*infoset as usize] = Some(own);
                            let i = &mut infosets[*infoset as usize];
                            i.parent = own.map(|s| {
                                let (_, pi, pa, _) = seq_info[s as usize];
                                (pi, pa)
                            });
                            i.depth = own.map(|s| seq_info[s as usize].3 + 1).unwrap_or(0);
                        }
                        Some(prev) => {
                            assert_eq!(
                                *prev, own,
                                "perfect recall violated at infoset {} ({})",
                                infoset, infosets[*infoset as usize].key
                            );
                        }
                    }
                    infosets[*infoset as usize].members.push(id);
                    for (a, c) in children.iter().enumerate() {
                        let next = *seq_intern.entry((own, *infoset, a)).or_insert_with(|| {
                            let depth = own.map(|s| seq_info[s as usize].3 + 1).unwrap_or(0);
                            seq_info.push((own, *infoset, a, depth));
                            (seq_info.len() - 1) as u32
                        });
                        match player {
                            Player::Max => stack.push((*c, Some(next), sy)),
                            Player::Min => stack.push((*c, sx, Some(next))),
                        }
                    }
                }
            }
        }
        for (id, i) in infosets.iter().enumerate() {
            assert!(
                !i.members.is_empty(),
                "infoset {id} ({}) has no member nodes",
                i.key
            );
        }

        GameTree {
            name,
            nodes: new_nodes,
            root: 0,
            infosets,
            payoff_range,
        }
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use crate::rational::{int, ratio};

    /// 2x2 matrix game as a tree: MAX moves (hidden), MIN moves, payoff
    /// matrix[i][j].
    pub fn matrix_game(matrix: [[i64; 2]; 2]) -> GameTree {
        let mut b = GameTreeBuilder::new("matrix2x2").payoff_range(int(-10), int(10));
        let ix = b.infoset(Player::Max, "x".into(), 2);
        let iy = b.infoset(Player::Min, "y".into(), 2);
        let mut rows = Vec::new();
        for i in 0..2 {
            let mut leaves = Vec::new();
            for j in 0..2 {
                leaves.push(b.terminal(int(matrix[i][j])));
            }
            rows.push(b.decision(iy, leaves));
        }
        let root = b.decision(ix, rows);
        b.finish(root)
    }

    /// Single-terminal degenerate game.
    pub fn constant_game(c: i64) -> GameTree {
        let mut b = GameTreeBuilder::new("constant").payoff_range(int(c), int(c));
        let root = b.terminal(int(c));
        b.finish(root)
    }

    /// Matching pennies with payoffs 1 (match) / 0 (mismatch) and a chance
    /// prefix that does nothing (probability split 1/3, 2/3 to identical
    /// subgames) to exercise chance handling.
    pub fn chance_pennies() -> GameTree {
        let mut b = GameTreeBuilder::new("chance-pennies").payoff_range(int(0), int(1));
        let ix = b.infoset(Player::Max, "x".into(), 2);
        let iy = b.infoset(Player::Min, "y".into(), 2);
        let mut subs = Vec::new();
        for _ in 0..2 {
            let mut rows = Vec::new();
            for i in 0..2 {
                let mut leaves = Vec::new();
                for j in 0..2 {
                    leaves.push(b.terminal(int(if i == j { 1 } else { 0 })));
                }
                rows.push(b.decision(iy, leaves));
            }
            subs.push(b.decision(ix, rows));
        }
        let root = b.chance(vec![(ratio(1, 3), subs[0]), (ratio(2, 3), subs[1])]);
        b.finish(root)
    }
}

#[cfg(test)]
mod tests {
    use super::testutil::*;
    use super::*;
    use crate::rational::int;

    #[test]
    fn counts_single_terminal() {
        let g = constant_game(0);
        let c = g.counts();
        assert_eq!((c.nodes, c.terminals), (1, 1));
        assert_eq!((c.infosets_max, c.infosets_min), (0, 0));
    }

    #[test]
    fn builder_reindexes_parent_before_child() {
        let g = chance_pennies();
        for (id, n) in g.nodes.iter().enumerate() {
            match n {
                Node::Chance { outcomes } => {
                    assert!(outcomes.iter().all(|(_, c)| *c as usize > id))
                }
                Node::Decision { children, .. } => {
                    assert!(children.iter().all(|c| *c as usize > id))
                }
                Node::Terminal { .. } => {}
            }
        }
        assert_eq!(g.root, 0);
    }

    #[test]
    fn infoset_members_collected() {
        let g = chance_pennies();
        let c = g.counts();
        assert_eq!(c.infosets_max, 1);
        assert_eq!(c.infosets_min, 1);
        assert_eq!(g.infosets[0].members.len() + g.infosets[1].members.len(), 2 + 4);
    }

    #[test]
    #[should_panic(expected = "perfect recall")]
    fn perfect_recall_panics_in_builder() {
        // MAX acts, then acts again merging histories that differ in its own
        // first action into a single infoset.
        let mut b = GameTreeBuilder::new("bad").payoff_range(int(0), int(1));
        let i1 = b.infoset(Player::Max, "first".into(), 2);
        let i2 = b.infoset(Player::Max, "second".into(), 2);
        let t1 = b.terminal(int(0));
        let t2 = b.terminal(int(1));
        let t3 = b.terminal(int(0));
        let t4 = b.terminal(int(1));
        let d1 = b.decision(i2, vec![t1, t2]);
        let d2 = b.decision(i2, vec![t3, t4]);
        let root = b.decision(i1, vec![d1, d2]);
        b.finish(root);
    }
}
