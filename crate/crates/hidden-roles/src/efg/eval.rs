//! Expected value and reach probabilities, generic over the numeric mode.

use super::{BehavioralStrategy, EfgError, GameTree, Node, Player};
use crate::rational::Rational;
use num::traits::{One, Zero};

/// Numeric mode for evaluation: exact rationals or 64-bit floats.
///
/// Operations take references so that big-rational arithmetic avoids clones.
pub trait Value: Clone + PartialOrd + std::fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn uniform(n: usize) -> Vec<Self>;
    fn is_zero(&self) -> bool;
}

impl Value for f64 {
    fn zero() -> f64 {
        0.0
    }
    fn one() -> f64 {
        1.0
    }
    fn add(&self, o: &f64) -> f64 {
        self + o
    }
    fn sub(&self, o: &f64) -> f64 {
        self - o
    }
    fn mul(&self, o: &f64) -> f64 {
        self * o
    }
    fn from_rational(r: &Rational) -> f64 {
        crate::rational::to_f64(r)
    }
    fn uniform(n: usize) -> Vec<f64> {
        vec![1.0 / n as f64; n]
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

impl Value for Rational {
    fn zero() -> Rational {
        <Rational as Zero>::zero()
    }
    fn one() -> Rational {
        <Rational as One>::one()
    }
    fn add(&self, o: &Rational) -> Rational {
        self + o
    }
    fn sub(&self, o: &Rational) -> Rational {
        self - o
    }
    fn mul(&self, o: &Rational) -> Rational {
        self * o
    }
    fn from_rational(r: &Rational) -> Rational {
        r.clone()
    }
    fn uniform(n: usize) -> Vec<Rational> {
        vec![crate::rational::ratio(1, n as i64); n]
    }
    fn is_zero(&self) -> bool {
        <Rational as Zero>::is_zero(self)
    }
}

fn strategy_prob<'a, T: Value>(
    x: &'a BehavioralStrategy<T>,
    y: &'a BehavioralStrategy<T>,
    player: Player,
    infoset: u32,
    action: usize,
) -> &'a T {
    let s = if player == Player::Max { x } else { y };
    &s.probs[infoset as usize][action]
}

/// Expected MAX utility under a complete strategy pair. Bottom-up sweep over
/// the arena (children always follow parents), so no recursion and a fixed
/// summation order: results are identical run to run.
pub fn expected_value<T: Value>(
    game: &GameTree,
    x: &BehavioralStrategy<T>,
    y: &BehavioralStrategy<T>,
) -> Result<T, EfgError> {
    x.check_complete(game, Player::Max)?;
    y.check_complete(game, Player::Min)?;
    let mut val: Vec<T> = vec![T::zero(); game.nodes.len()];
    for id in (0..game.nodes.len()).rev() {
        val[id] = match &game.nodes[id] {
            Node::Terminal { payoff } => T::from_rational(payoff),
            Node::Chance { outcomes } => {
                let mut acc = T::zero();
                for (p, c) in outcomes {
                    acc = acc.add(&T::from_rational(p).mul(&val[*c as usize]));
                }
                acc
            }
            Node::Decision {
                player,
                infoset,
                children,
            } => {
                let mut acc = T::zero();
                for (a, c) in children.iter().enumerate() {
                    let pr = strategy_prob(x, y, *player, *infoset, a);
                    acc = acc.add(&pr.mul(&val[*c as usize]));
                }
                acc
            }
        };
    }
    Ok(val[game.root as usize].clone())
}

/// Expected MAX utility computed by the independent forward route: push reach
/// probabilities from the root and sum reach times payoff over terminals.
/// In rational mode this agrees with [`expected_value`] exactly.
pub fn expected_value_forward<T: Value>(
    game: &GameTree,
    x: &BehavioralStrategy<T>,
    y: &BehavioralStrategy<T>,
) -> Result<T, EfgError> {
    x.check_complete(game, Player::Max)?;
    y.check_complete(game, Player::Min)?;
    let reach = full_reaches(game, x, y);
    let mut acc = T::zero();
    for (id, n) in game.nodes.iter().enumerate() {
        if let Node::Terminal { payoff } = n {
            acc = acc.add(&reach[id].mul(&T::from_rational(payoff)));
        }
    }
    Ok(acc)
}

/// Reach probability of every node under the full strategy pair.
pub fn full_reaches<T: Value>(
    game: &GameTree,
    x: &BehavioralStrategy<T>,
    y: &BehavioralStrategy<T>,
) -> Vec<T> {
    let mut reach: Vec<T> = vec![T::zero(); game.nodes.len()];
    reach[game.root as usize] = T::one();
    for id in 0..game.nodes.len() {
        match &game.nodes[id] {
            Node::Terminal { .. } => {}
            Node::Chance { outcomes } => {
                for (p, c) in outcomes {
                    reach[*c as usize] = reach[id].mul(&T::from_rational(p));
                }
            }
            Node::Decision {
                player,
                infoset,
                children,
            } => {
                for (a, c) in children.iter().enumerate() {
                    let pr = strategy_prob(x, y, *player, *infoset, a);
                    reach[*c as usize] = reach[id].mul(pr);
                }
            }
        }
    }
    reach
}

/// Reach probability of every node counting only chance and `exclude.other()`
/// — i.e. the counterfactual reach from the perspective of `exclude`.
pub fn cf_reaches<T: Value>(
    game: &GameTree,
    opponent: &BehavioralStrategy<T>,
) -> Vec<T> {
    let mut reach: Vec<T> = vec![T::zero(); game.nodes.len()];
    reach[game.root as usize] = T::one();
    for id in 0..game.nodes.len() {
        match &game.nodes[id] {
            Node::Terminal { .. } => {}
            Node::Chance { outcomes } => {
                for (p, c) in outcomes {
                    reach[*c as usize] = reach[id].mul(&T::from_rational(p));
                }
            }
            Node::Decision {
                player,
                infoset,
                children,
            } => {
                if *player == opponent.owner {
                    for (a, c) in children.iter().enumerate() {
                        let pr = &opponent.probs[*infoset as usize][a];
                        reach[*c as usize] = reach[id].mul(pr);
                    }
                } else {
                    for c in children {
                        reach[*c as usize] = reach[id].clone();
                    }
                }
            }
        }
    }
    reach
}

/// Terminal reach probabilities under a complete pair; sums to exactly 1 in
/// rational mode.
pub fn terminal_reaches<T: Value>(
    game: &GameTree,
    x: &BehavioralStrategy<T>,
    y: &BehavioralStrategy<T>,
) -> Vec<(u32, T)> {
    let reach = full_reaches(game, x, y);
    game.nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| n.is_terminal())
        .map(|(id, _)| (id as u32, reach[id].clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::testutil::*;
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn constant_game_value_is_constant() {
        let g = constant_game(7);
        let x = BehavioralStrategy::<Rational>::uniform(&g, Player::Max);
        let y = BehavioralStrategy::<Rational>::uniform(&g, Player::Min);
        assert_eq!(expected_value(&g, &x, &y).unwrap(), int(7));
    }

    #[test]
    fn two_traversal_orders_agree_exactly() {
        let g = chance_pennies();
        let x = BehavioralStrategy::<Rational>::uniform(&g, Player::Max);
        let mut y = BehavioralStrategy::<Rational>::uniform(&g, Player::Min);
        y.probs[1] = vec![ratio(1, 3), ratio(2, 3)]; // min infoset is id 1
        if g.infosets[1].player != Player::Min {
            y.probs.swap(0, 1);
        }
        let a = expected_value(&g, &x, &y).unwrap();
        let b = expected_value_forward(&g, &x, &y).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn terminal_reaches_sum_to_one() {
        let g = chance_pennies();
        let x = BehavioralStrategy::<Rational>::uniform(&g, Player::Max);
        let y = BehavioralStrategy::<Rational>::uniform(&g, Player::Min);
        let total: Rational = terminal_reaches(&g, &x, &y)
            .into_iter()
            .map(|(_, r)| r)
            .sum();
        assert_eq!(total, int(1));
    }

    #[test]
    fn incomplete_strategy_rejected() {
        let g = chance_pennies();
        let x = BehavioralStrategy::<Rational>::empty(&g, Player::Max);
        let y = BehavioralStrategy::<Rational>::uniform(&g, Player::Min);
        assert!(matches!(
            expected_value(&g, &x, &y),
            Err(EfgError::StrategyIncomplete { .. })
        ));
    }
}
