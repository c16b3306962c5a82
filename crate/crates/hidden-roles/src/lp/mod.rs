//! Sequence-form linear programming for exact zero-sum values.
//!
//! [`build_lp`] compiles a game tree into its sequence-form payoff matrix and
//! flow constraints; [`solve_game_exact`] computes the exact value and exact
//! equilibrium strategies, either by handing the whole sequence-form program
//! to the rational simplex (small games) or by exact strategy generation
//! (restricted matrix games plus exact best-response oracles) for games where
//! the dense tableau would be impractical. Every returned solution is
//! certified by exact best response before it leaves this module.

mod exact;
mod simplex;

pub use exact::{certify, solve_game_exact, ExactMethod, ExactOptions, ExactSolution};
pub use simplex::{solve as simplex_solve, Cmp, LinearProgram, LpError, LpRow, SimplexOutcome};

use crate::efg::{BehavioralStrategy, GameTree, InfosetId, Node, Player};
use crate::rational::Rational;
use num::traits::{One, Zero};
use std::collections::HashMap;

/// Sequence numbering for one player: id 0 is the empty sequence and each
/// owned (infoset, action) pair gets a consecutive id.
#[derive(Debug, Clone)]
pub struct SequenceIndex {
    pub player: Player,
    /// Owned infosets in numbering order.
    pub infosets: Vec<InfosetId>,
    /// First sequence id of each owned infoset (parallel to `infosets`).
    base: Vec<usize>,
    /// Position of each infoset in `infosets` (usize::MAX if not owned).
    slot: Vec<usize>,
    pub num_sequences: usize,
}

impl SequenceIndex {
    pub fn new(game: &GameTree, player: Player) -> SequenceIndex {
        let infosets: Vec<InfosetId> = game.infosets_of(player).collect();
        let mut base = Vec::with_capacity(infosets.len());
        let mut slot = vec![usize::MAX; game.infosets.len()];
        let mut next = 1; // 0 = empty sequence
        for (pos, &i) in infosets.iter().enumerate() {
            slot[i as usize] = pos;
            base.push(next);
            next += game.infoset(i).actions;
        }
        SequenceIndex {
            player,
            infosets,
            base,
            slot,
            num_sequences: next,
        }
    }

    pub fn seq(&self, infoset: InfosetId, action: usize) -> usize {
        self.base[self.slot[infoset as usize]] + action
    }

    /// The owner's sequence leading into an infoset.
    pub fn parent_seq(&self, game: &GameTree, infoset: InfosetId) -> usize {
        match game.infoset(infoset).parent {
            None => 0,
            Some((pi, pa)) => self.seq(pi, pa),
        }
    }

    /// (infoset, action) of a nonempty sequence id.
    pub fn decode(&self, game: &GameTree, seq: usize) -> Option<(InfosetId, usize)> {
        if seq == 0 {
            return None;
        }
        // Binary search over bases.
        let pos = match self.base.binary_search(&seq) {
            Ok(p) => p,
            Err(p) => p - 1,
        };
        let infoset = self.infosets[pos];
        let action = seq - self.base[pos];
        debug_assert!(action < game.infoset(infoset).actions);
        Some((infoset, action))
    }
}

/// A realization plan: one entry per own sequence, empty sequence first.
#[derive(Debug, Clone)]
pub struct SequenceFormStrategy {
    pub owner: Player,
    pub probs: Vec<Rational>,
}

impl SequenceFormStrategy {
    /// Exact flow check: empty sequence carries 1 and each infoset's action
    /// mass equals its parent-sequence mass; all entries nonnegative.
    pub fn check_flow(&self, game: &GameTree, idx: &SequenceIndex) -> Result<(), LpError> {
        if self.probs.len() != idx.num_sequences {
            return Err(LpError::Input("sequence vector has wrong length".into()));
        }
        if !self.probs[0].is_one() {
            return Err(LpError::Input("empty sequence mass is not 1".into()));
        }
        if self.probs.iter().any(|p| p < &Rational::zero()) {
            return Err(LpError::Input("negative sequence mass".into()));
        }
        for &i in &idx.infosets {
            let parent = self.probs[idx.parent_seq(game, i)].clone();
            let total: Rational = (0..game.infoset(i).actions)
                .map(|a| self.probs[idx.seq(i, a)].clone())
                .sum();
            if total != parent {
                return Err(LpError::Input(format!(
                    "flow violated at infoset {i}: children {total}, parent {parent}"
                )));
            }
        }
        Ok(())
    }

    /// Behavioral strategy obtained by dividing by parent mass; infosets with
    /// zero realization weight get the uniform distribution.
    pub fn to_behavioral(&self, game: &GameTree, idx: &SequenceIndex) -> BehavioralStrategy<Rational> {
        let mut s = BehavioralStrategy::empty(game, self.owner);
        for &i in &idx.infosets {
            let n = game.infoset(i).actions;
            let parent = &self.probs[idx.parent_seq(game, i)];
            s.probs[i as usize] = if parent.is_zero() {
                vec![crate::rational::ratio(1, n as i64); n]
            } else {
                (0..n)
                    .map(|a| &self.probs[idx.seq(i, a)] / parent)
                    .collect()
            };
        }
        s
    }

    /// Realization plan of a behavioral strategy.
    pub fn from_behavioral(
        game: &GameTree,
        idx: &SequenceIndex,
        s: &BehavioralStrategy<Rational>,
    ) -> SequenceFormStrategy {
        let mut probs = vec![Rational::zero(); idx.num_sequences];
        probs[0] = Rational::one();
        // Shallow infosets first: a parent sequence is always filled before
        // the infosets hanging off it.
        let mut order = idx.infosets.clone();
        order.sort_by_key(|&i| game.infoset(i).depth);
        for &i in &order {
            let parent = probs[idx.parent_seq(game, i)].clone();
            for a in 0..game.infoset(i).actions {
                probs[idx.seq(i, a)] = &parent * &s.probs[i as usize][a];
            }
        }
        SequenceFormStrategy {
            owner: s.owner,
            probs,
        }
    }
}

/// Sequence-form program: sparse chance-weighted payoff matrix plus the two
/// players' sequence numberings (the flow constraints E, e and F, f are
/// implied by the numbering and materialized in [`flow_rows`]).
#[derive(Debug, Clone)]
pub struct SequenceFormLp {
    pub max_index: SequenceIndex,
    pub min_index: SequenceIndex,
    /// (max sequence, min sequence) -> sum of chance-weighted payoffs.
    pub payoff: HashMap<(usize, usize), Rational>,
}

/// One flow constraint: `sum(child sequences) - parent sequence = rhs`.
#[derive(Debug, Clone)]
pub struct FlowRow {
    pub coeffs: Vec<(usize, i8)>,
    pub rhs: Rational,
}

/// The flow-constraint rows (E, e) or (F, f) for a player: the root row plus
/// one row per owned infoset, entries in {-1, 0, +1}.
pub fn flow_rows(game: &GameTree, idx: &SequenceIndex) -> Vec<FlowRow> {
    let mut rows = Vec::with_capacity(idx.infosets.len() + 1);
    rows.push(FlowRow {
        coeffs: vec![(0, 1)],
        rhs: Rational::one(),
    });
    for &i in &idx.infosets {
        let mut coeffs: Vec<(usize, i8)> = vec![(idx.parent_seq(game, i), -1)];
        for a in 0..game.infoset(i).actions {
            coeffs.push((idx.seq(i, a), 1));
        }
        rows.push(FlowRow {
            coeffs,
            rhs: Rational::zero(),
        });
    }
    rows
}

/// Compiles the sequence-form program: every terminal contributes its
/// chance-weighted payoff to exactly one (max sequence, min sequence) cell.
pub fn build_lp(game: &GameTree) -> SequenceFormLp {
    let max_index = SequenceIndex::new(game, Player::Max);
    let min_index = SequenceIndex::new(game, Player::Min);
    let mut payoff: HashMap<(usize, usize), Rational> = HashMap::new();

    // (node, chance reach, max seq, min seq)
    let mut stack: Vec<(u32, Rational, usize, usize)> =
        vec![(game.root, Rational::one(), 0, 0)];
    while let Some((id, reach, sx, sy)) = stack.pop() {
        match game.node(id) {
            Node::Terminal { payoff: u } => {
                if !u.is_zero() {
                    let cell = payoff.entry((sx, sy)).or_insert_with(Rational::zero);
                    *cell = &*cell + &(&reach * u);
                }
            }
            Node::Chance { outcomes } => {
                for (p, c) in outcomes {
                    stack.push((*c, &reach * p, sx, sy));
                }
            }
            Node::Decision {
                player,
                infoset,
                children,
            } => {
                for (a, c) in children.iter().enumerate() {
                    match player {
                        Player::Max => {
                            stack.push((*c, reach.clone(), max_index.seq(*infoset, a), sy))
                        }
                        Player::Min => {
                            stack.push((*c, reach.clone(), sx, min_index.seq(*infoset, a)))
                        }
                    }
                }
            }
        }
    }

    SequenceFormLp {
        max_index,
        min_index,
        payoff,
    }
}

impl SequenceFormLp {
    /// `x^T A y` for exact sequence-form strategies.
    pub fn bilinear(&self, x: &SequenceFormStrategy, y: &SequenceFormStrategy) -> Rational {
        let mut acc = Rational::zero();
        for ((sx, sy), u) in &self.payoff {
            let term = &(&x.probs[*sx] * &y.probs[*sy]) * u;
            acc = &acc + &term;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efg::testutil::{chance_pennies, constant_game, matrix_game};
    use crate::efg::expected_value;
    use crate::rational::{int, ratio};

    #[test]
    fn constant_game_lp_is_one_by_one() {
        let g = constant_game(5);
        let lp = build_lp(&g);
        assert_eq!(lp.max_index.num_sequences, 1);
        assert_eq!(lp.min_index.num_sequences, 1);
        assert_eq!(lp.payoff.len(), 1);
        assert_eq!(lp.payoff[&(0, 0)], int(5));
    }

    #[test]
    fn bilinear_matches_expected_value() {
        let g = chance_pennies();
        let lp = build_lp(&g);
        let mut x = BehavioralStrategy::<Rational>::uniform(&g, Player::Max);
        let mut y = BehavioralStrategy::<Rational>::uniform(&g, Player::Min);
        for id in g.infosets_of(Player::Max) {
            x.probs[id as usize] = vec![ratio(2, 7), ratio(5, 7)];
        }
        for id in g.infosets_of(Player::Min) {
            y.probs[id as usize] = vec![ratio(3, 11), ratio(8, 11)];
        }
        let xs = SequenceFormStrategy::from_behavioral(&g, &lp.max_index, &x);
        let ys = SequenceFormStrategy::from_behavioral(&g, &lp.min_index, &y);
        xs.check_flow(&g, &lp.max_index).unwrap();
        ys.check_flow(&g, &lp.min_index).unwrap();
        assert_eq!(
            lp.bilinear(&xs, &ys),
            expected_value(&g, &x, &y).unwrap()
        );
    }

    #[test]
    fn flow_rows_have_unit_entries() {
        let g = matrix_game([[1, 0], [0, 1]]);
        let lp = build_lp(&g);
        for rows in [
            flow_rows(&g, &lp.max_index),
            flow_rows(&g, &lp.min_index),
        ] {
            assert_eq!(rows.len(), 2); // root + one infoset
            for r in &rows {
                for (_, c) in &r.coeffs {
                    assert!(*c == 1 || *c == -1);
                }
            }
        }
    }

    #[test]
    fn behavioral_roundtrip() {
        let g = chance_pennies();
        let lp = build_lp(&g);
        let mut x = BehavioralStrategy::<Rational>::uniform(&g, Player::Max);
        for id in g.infosets_of(Player::Max) {
            x.probs[id as usize] = vec![ratio(1, 4), ratio(3, 4)];
        }
        let xs = SequenceFormStrategy::from_behavioral(&g, &lp.max_index, &x);
        let back = xs.to_behavioral(&g, &lp.max_index);
        assert_eq!(back.probs, x.probs);
    }
}
