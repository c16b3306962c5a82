//! Exact best response and exploitability.

use super::eval::{cf_reaches, Value};
use super::{BehavioralStrategy, EfgError, GameTree, Node, Player};

/// Pure best response against a complete opponent strategy, together with the
/// resulting expected MAX utility. A MAX responder maximizes the value, a MIN
/// responder minimizes it; in both cases the returned value is MAX's utility
/// and is a certified one-sided bound on the game value when the opponent
/// strategy is rational.
pub fn best_response<T: Value>(
    game: &GameTree,
    opponent: &BehavioralStrategy<T>,
) -> Result<(BehavioralStrategy<T>, T), EfgError> {
    opponent.check_complete(game, opponent.owner)?;
    let me = opponent.owner.other();
    let reach = cf_reaches(game, opponent);

    // Own infosets sorted by own-sequence depth, deepest first: the subtree
    // under a decision at depth d only contains own infosets deeper than d,
    // so those are already decided when we aggregate counterfactual action
    // values across the infoset.
    let mut order: Vec<u32> = game.infosets_of(me).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(game.infoset(i).depth));

    let mut choice: Vec<usize> = vec![usize::MAX; game.infosets.len()];
    let mut val: Vec<Option<T>> = vec![None; game.nodes.len()];

    for &iid in &order {
        let info = game.infoset(iid);
        let mut action_vals: Vec<T> = vec![T::zero(); info.actions];
        for &m in &info.members {
            let children = match &game.nodes[m as usize] {
                Node::Decision { children, .. } => children.clone(),
                _ => unreachable!("infoset member is not a decision node"),
            };
            for (a, c) in children.iter().enumerate() {
                resolve(game, me, opponent, &choice, &mut val, *c);
                let contrib = reach[m as usize].mul(val[*c as usize].as_ref().unwrap());
                action_vals[a] = action_vals[a].add(&contrib);
            }
        }
        // MAX argmax / MIN argmin, first index on ties.
        let mut best = 0usize;
        for a in 1..info.actions {
            let better = match me {
                Player::Max => action_vals[a] > action_vals[best],
                Player::Min => action_vals[a] < action_vals[best],
            };
            if better {
                best = a;
            }
        }
        choice[iid as usize] = best;
        // Member node values collapse to the chosen child.
        for &m in &info.members {
            if let Node::Decision { children, .. } = &game.nodes[m as usize] {
                let c = children[best];
                val[m as usize] = Some(val[c as usize].clone().unwrap());
            }
        }
    }

    resolve(game, me, opponent, &choice, &mut val, game.root);
    let value = val[game.root as usize].clone().unwrap();

    let mut br_choice = vec![0usize; game.infosets.len()];
    for id in game.infosets_of(me) {
        br_choice[id as usize] = if choice[id as usize] == usize::MAX {
            0
        } else {
            choice[id as usize]
        };
    }
    Ok((BehavioralStrategy::pure(game, me, &br_choice), value))
}

/// Memoized node-value computation assuming every own infoset reachable from
/// `start` is already decided in `choice`. Explicit stack with two-phase
/// entries (expand children, then combine).
fn resolve<T: Value>(
    game: &GameTree,
    me: Player,
    opp: &BehavioralStrategy<T>,
    choice: &[usize],
    val: &mut [Option<T>],
    start: u32,
) {
    let mut stack: Vec<(u32, bool)> = vec![(start, false)];
    while let Some((id, expanded)) = stack.pop() {
        if !expanded && val[id as usize].is_some() {
            continue;
        }
        match &game.nodes[id as usize] {
            Node::Terminal { payoff } => {
                val[id as usize] = Some(T::from_rational(payoff));
            }
            Node::Chance { outcomes } => {
                if expanded {
                    let mut acc = T::zero();
                    for (p, c) in outcomes {
                        acc = acc.add(&T::from_rational(p).mul(val[*c as usize].as_ref().unwrap()));
                    }
                    val[id as usize] = Some(acc);
                } else {
                    stack.push((id, true));
                    for (_, c) in outcomes {
                        stack.push((*c, false));
                    }
                }
            }
            Node::Decision {
                player,
                infoset,
                children,
            } => {
                if *player == me {
                    let a = choice[*infoset as usize];
                    debug_assert!(a != usize::MAX, "infoset decided out of order");
                    let c = children[a];
                    if expanded {
                        val[id as usize] = Some(val[c as usize].clone().unwrap());
                    } else {
                        stack.push((id, true));
                        stack.push((c, false));
                    }
                } else if expanded {
                    let mut acc = T::zero();
                    for (a, c) in children.iter().enumerate() {
                        let pr = &opp.probs[*infoset as usize][a];
                        acc = acc.add(&pr.mul(val[*c as usize].as_ref().unwrap()));
                    }
                    val[id as usize] = Some(acc);
                } else {
                    stack.push((id, true));
                    for c in children {
                        stack.push((*c, false));
                    }
                }
            }
        }
    }
}

/// Saddle gap `u(BR_MAX, y) - u(x, BR_MIN)`. Nonnegative for complete
/// strategies; zero exactly when `(x, y)` is an equilibrium.
pub fn exploitability<T: Value>(
    game: &GameTree,
    x: &BehavioralStrategy<T>,
    y: &BehavioralStrategy<T>,
) -> Result<T, EfgError> {
    let (_, vs_y) = best_response(game, y)?;
    let (_, vs_x) = best_response(game, x)?;
    Ok(vs_y.sub(&vs_x))
}

#[cfg(test)]
mod tests {
    use super::super::testutil::*;
    use super::*;
    use crate::efg::expected_value;
    use crate::rational::{int, ratio, Rational};

    #[test]
    fn constant_game_br_value() {
        let g = constant_game(3);
        let y = BehavioralStrategy::<Rational>::uniform(&g, Player::Min);
        let (_, v) = best_response(&g, &y).unwrap();
        assert_eq!(v, int(3));
    }

    #[test]
    fn pennies_uniform_is_equilibrium() {
        let g = chance_pennies();
        let x = BehavioralStrategy::<Rational>::uniform(&g, Player::Max);
        let y = BehavioralStrategy::<Rational>::uniform(&g, Player::Min);
        let e = exploitability(&g, &x, &y).unwrap();
        assert_eq!(e, int(0));
        assert_eq!(expected_value(&g, &x, &y).unwrap(), ratio(1, 2));
    }

    #[test]
    fn skewed_strategy_is_exploited() {
        let g = chance_pennies();
        let mut x = BehavioralStrategy::<Rational>::uniform(&g, Player::Max);
        for id in g.infosets_of(Player::Max) {
            x.probs[id as usize] = vec![int(1), int(0)];
        }
        let y = BehavioralStrategy::<Rational>::uniform(&g, Player::Min);
        // MIN best-responds by mismatching MAX's sure first action.
        let (_, v) = best_response(&g, &x).unwrap();
        assert_eq!(v, int(0));
        let e = exploitability(&g, &x, &y).unwrap();
        assert!(e > int(0));
    }

    /// Sandwich property: u(x, BR(x)) <= u(x, y) <= u(BR(y), y).
    #[test]
    fn br_sandwich() {
        let g = chance_pennies();
        let mut x = BehavioralStrategy::<Rational>::uniform(&g, Player::Max);
        for id in g.infosets_of(Player::Max) {
            x.probs[id as usize] = vec![ratio(1, 3), ratio(2, 3)];
        }
        let mut y = BehavioralStrategy::<Rational>::uniform(&g, Player::Min);
        for id in g.infosets_of(Player::Min) {
            y.probs[id as usize] = vec![ratio(1, 4), ratio(3, 4)];
        }
        let mid = expected_value(&g, &x, &y).unwrap();
        let (_, lo) = best_response(&g, &x).unwrap();
        let (_, hi) = best_response(&g, &y).unwrap();
        assert!(lo <= mid && mid <= hi);
    }
}
