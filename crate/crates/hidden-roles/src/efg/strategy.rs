//! Behavioral strategies in rational or float arithmetic.

use super::eval::Value;
use super::{EfgError, GameTree, InfosetId, Player};
use crate::rational::Rational;

/// Per-infoset action distributions for one player. The vector is indexed by
/// infoset id over *all* infosets of the game; entries for the other player's
/// infosets stay empty. The numeric mode is the type parameter: exact
/// ([`Rational`]) or 64-bit float.
#[derive(Debug, Clone)]
pub struct BehavioralStrategy<T> {
    pub owner: Player,
    pub probs: Vec<Vec<T>>,
}

impl<T: Value> BehavioralStrategy<T> {
    pub fn empty(game: &GameTree, owner: Player) -> Self {
        BehavioralStrategy {
            owner,
            probs: vec![Vec::new(); game.infosets.len()],
        }
    }

    /// Uniform distribution at every owned infoset.
    pub fn uniform(game: &GameTree, owner: Player) -> Self {
        let mut s = Self::empty(game, owner);
        for id in game.infosets_of(owner) {
            let n = game.infoset(id).actions;
            s.probs[id as usize] = T::uniform(n);
        }
        s
    }

    /// Pure strategy from per-infoset action choices (indexed by infoset id).
    pub fn pure(game: &GameTree, owner: Player, choice: &[usize]) -> Self {
        let mut s = Self::empty(game, owner);
        for id in game.infosets_of(owner) {
            let n = game.infoset(id).actions;
            let mut v = vec![T::zero(); n];
            v[choice[id as usize]] = T::one();
            s.probs[id as usize] = v;
        }
        s
    }

    pub fn action_probs(&self, infoset: InfosetId) -> &[T] {
        &self.probs[infoset as usize]
    }

    /// Checks shape: an entry of the right arity for every owned infoset.
    pub fn check_complete(&self, game: &GameTree, expected_owner: Player) -> Result<(), EfgError> {
        if self.owner != expected_owner {
            return Err(EfgError::StrategyOwner {
                got: self.owner,
                expected: expected_owner,
            });
        }
        for id in game.infosets_of(self.owner) {
            let i = game.infoset(id);
            let v = &self.probs[id as usize];
            if v.is_empty() {
                return Err(EfgError::StrategyIncomplete {
                    player: self.owner,
                    infoset: id,
                    key: i.key.clone(),
                });
            }
            if v.len() != i.actions {
                return Err(EfgError::StrategyShape {
                    infoset: id,
                    got: v.len(),
                    expected: i.actions,
                });
            }
        }
        Ok(())
    }
}

impl BehavioralStrategy<Rational> {
    /// Lossy conversion to float mode.
    pub fn to_float(&self) -> BehavioralStrategy<f64> {
        BehavioralStrategy {
            owner: self.owner,
            probs: self
                .probs
                .iter()
                .map(|v| v.iter().map(crate::rational::to_f64).collect())
                .collect(),
        }
    }
}

impl BehavioralStrategy<f64> {
    /// Continued-fraction rationalization with denominator bound, followed by
    /// exact renormalization (largest entry absorbs the rounding slack) so the
    /// result is a valid rational strategy.
    pub fn rationalize(&self, max_den: u64) -> BehavioralStrategy<Rational> {
        use num::traits::Zero;
        let probs = self
            .probs
            .iter()
            .map(|v| {
                if v.is_empty() {
                    return Vec::new();
                }
                let mut w: Vec<Rational> = v
                    .iter()
                    .map(|&p| crate::rational::approximate(p.max(0.0), max_den))
                    .collect();
                let sum: Rational = w.iter().cloned().sum();
                if sum.is_zero() {
                    return Rational::uniform(v.len());
                }
                // Add the slack to the largest entry to restore an exact sum
                // of 1 (keeps every entry nonnegative since slack >= -max).
                let one = crate::rational::int(1);
                let slack = &one - &sum;
                let arg = (0..v.len()).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
                w[arg] = &w[arg] + &slack;
                if w[arg] < Rational::zero() {
                    return Rational::uniform(v.len());
                }
                w
            })
            .collect();
        BehavioralStrategy {
            owner: self.owner,
            probs,
        }
    }
}
