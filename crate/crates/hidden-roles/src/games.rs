//! Built-in hidden-role games: n-player matching pennies, the three-card
//! voting game, and the team-guessing game behind the price-of-hidden-roles
//! bound.

use crate::efg::Player;
use crate::rational::{int, ratio, Rational};
use crate::sim::{SimError, SimGame, SimGameBuilder, TeamAssignment};
use num::traits::{One, Zero};

/// Hidden-role matching pennies: one of `n >= 3` players is secretly the
/// adversary, everyone simultaneously picks a bit, MAX wins iff all bits
/// agree.
pub fn matching_pennies(n: usize) -> Result<SimGame, SimError> {
    if n < 3 {
        return Err(SimError::Invalid(format!(
            "matching pennies needs n >= 3 players, got {n}"
        )));
    }
    let mut b = SimGameBuilder::new(format!("matching-pennies-{n}"), n);
    for adv in 0..n {
        let mut leaves = Vec::with_capacity(1 << n);
        for joint in 0..(1usize << n) {
            // Player 0 is the most significant bit.
            let all_equal = joint == 0 || joint == (1 << n) - 1;
            leaves.push(b.terminal(if all_equal { int(1) } else { int(0) }));
        }
        let obs: Vec<String> = (0..n)
            .map(|i| {
                if i == adv {
                    format!("ADV{adv}")
                } else {
                    "MAX".to_string()
                }
            })
            .collect();
        let act = b.act(obs, vec![2; n], leaves);
        let teams: Vec<Player> = (0..n)
            .map(|i| if i == adv { Player::Min } else { Player::Max })
            .collect();
        b.deal(ratio(1, n as i64), teams, act);
    }
    Ok(b.finish())
}

/// Three players, three role cards (two MAX, one MIN), dealt privately; all
/// simultaneously vote to elect a winner. MAX wins iff a strict majority
/// elects a MAX player. With `distinguishable`, the two MAX cards carry
/// distinct private labels, which acts as correlated randomness for MAX.
pub fn card_game(distinguishable: bool) -> Result<SimGame, SimError> {
    let n = 3;
    let name = if distinguishable {
        "card-game-distinct"
    } else {
        "card-game"
    };
    let mut b = SimGameBuilder::new(name, n);

    let mut push_deal = |b: &mut SimGameBuilder, spy: usize, prob: Rational, labels: Vec<String>| {
        let mut leaves = Vec::with_capacity(27);
        for joint in 0..27 {
            let votes = [joint / 9, (joint / 3) % 3, joint % 3];
            let mut tally = [0usize; 3];
            for v in votes {
                tally[v] += 1;
            }
            let winner = (0..3).find(|&p| tally[p] >= 2);
            let payoff = match winner {
                Some(p) if p != spy => int(1),
                _ => int(0),
            };
            leaves.push(b.terminal(payoff));
        }
        let act = b.act(labels, vec![3; n], leaves);
        let teams: Vec<Player> = (0..n)
            .map(|i| if i == spy { Player::Min } else { Player::Max })
            .collect();
        b.deal(prob, teams, act);
    };

    for spy in 0..n {
        if distinguishable {
            let goods: Vec<usize> = (0..n).filter(|&i| i != spy).collect();
            for flip in 0..2 {
                let mut labels = vec![String::new(); n];
                labels[spy] = format!("SPY{spy}");
                labels[goods[0]] = if flip == 0 { "MAXA" } else { "MAXB" }.to_string();
                labels[goods[1]] = if flip == 0 { "MAXB" } else { "MAXA" }.to_string();
                push_deal(&mut b, spy, ratio(1, 6), labels);
            }
        } else {
            let labels: Vec<String> = (0..n)
                .map(|i| {
                    if i == spy {
                        format!("SPY{spy}")
                    } else {
                        "MAX".to_string()
                    }
                })
                .collect();
            push_deal(&mut b, spy, ratio(1, 3), labels);
        }
    }
    Ok(b.finish())
}

/// Team-guessing game: chance draws an assignment from `dist`; every player
/// simultaneously announces an assignment in the support; MAX wins iff every
/// MAX player announces the truth. Its hidden-role value is the largest
/// probability in `dist`, while the public-team value is 1, which realizes
/// the worst-case price of hidden roles.
pub fn guessing_game(dist: &[(TeamAssignment, Rational)]) -> Result<SimGame, SimError> {
    if dist.is_empty() {
        return Err(SimError::Invalid("empty assignment support".into()));
    }
    let n = dist[0].0.n();
    let mut support: Vec<(TeamAssignment, Rational)> = Vec::new();
    for (t, p) in dist {
        if t.n() != n {
            return Err(SimError::Invalid("assignments of mixed lengths".into()));
        }
        if p <= &Rational::zero() {
            return Err(SimError::Invalid(format!(
                "non-positive probability for {}",
                t.label()
            )));
        }
        match support.iter_mut().find(|(u, _)| u == t) {
            Some((_, q)) => *q = &*q + p,
            None => support.push((t.clone(), p.clone())),
        }
    }
    let total: Rational = support.iter().map(|(_, p)| p.clone()).sum();
    if !total.is_one() {
        return Err(SimError::Invalid(format!(
            "assignment probabilities sum to {total}, expected 1"
        )));
    }

    let m = support.len();
    let mut b = SimGameBuilder::new(format!("guessing-{}p-{}t", n, m), n);
    for (truth, (teams, prob)) in support.iter().enumerate() {
        let mut leaves = Vec::with_capacity(m.pow(n as u32));
        for joint in 0..m.pow(n as u32) {
            let mut rest = joint;
            let mut announce = vec![0usize; n];
            for i in (0..n).rev() {
                announce[i] = rest % m;
                rest /= m;
            }
            let max_all_truth = (0..n)
                .filter(|&i| teams.0[i] == Player::Max)
                .all(|i| announce[i] == truth);
            leaves.push(b.terminal(if max_all_truth { int(1) } else { int(0) }));
        }
        let obs: Vec<String> = (0..n)
            .map(|i| match teams.0[i] {
                Player::Max => "MAX".to_string(),
                Player::Min => format!("SPY:{}", teams.label()),
            })
            .collect();
        let act = b.act(obs, vec![m; n], leaves);
        b.deal(prob.clone(), teams.0.clone(), act);
    }
    Ok(b.finish())
}

/// Uniform distribution over all assignments with exactly `k` MIN players
/// among `n`.
pub fn uniform_k_adversaries(n: usize, k: usize) -> Vec<(TeamAssignment, Rational)> {
    use itertools::Itertools;
    let subsets: Vec<Vec<usize>> = (0..n).combinations(k).collect();
    let p = ratio(1, subsets.len() as i64);
    subsets
        .into_iter()
        .map(|s| {
            let teams: Vec<Player> = (0..n)
                .map(|i| {
                    if s.contains(&i) {
                        Player::Min
                    } else {
                        Player::Max
                    }
                })
                .collect();
            (TeamAssignment(teams), p.clone())
        })
        .collect()
}

/// Price of hidden roles of the guessing game for `dist`: the public-team
/// value (1: with teams revealed, MAX players just announce the observed
/// truth) divided by the hidden value obtained from an exact solve of the
/// mediator game. Equals `1 / max_t dist(t)`.
pub fn price_of_hidden_roles(
    dist: &[(TeamAssignment, Rational)],
) -> Result<Rational, crate::lp::LpError> {
    let sim = guessing_game(dist).map_err(|e| crate::lp::LpError::Input(e.to_string()))?;
    let game = crate::mediator::build_mediator_game(&sim)
        .map_err(|e| crate::lp::LpError::Input(e.to_string()))?;
    let sol = crate::lp::solve_game_exact(&game, &crate::lp::ExactOptions::default())?;
    if sol.value.is_zero() {
        return Err(crate::lp::LpError::Input(
            "hidden value is zero; the ratio is undefined".into(),
        ));
    }
    Ok(int(1) / sol.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::SimNode;

    #[test]
    fn generators_validate() {
        matching_pennies(3).unwrap().validate().unwrap();
        matching_pennies(5).unwrap().validate().unwrap();
        card_game(false).unwrap().validate().unwrap();
        card_game(true).unwrap().validate().unwrap();
        guessing_game(&uniform_k_adversaries(3, 1))
            .unwrap()
            .validate()
            .unwrap();
        guessing_game(&uniform_k_adversaries(4, 2))
            .unwrap()
            .validate()
            .unwrap();
    }

    #[test]
    fn mp_rejects_small_n() {
        assert!(matching_pennies(2).is_err());
    }

    #[test]
    fn mp_all_zero_bits_win() {
        let g = matching_pennies(3).unwrap();
        // Joint action 0 = everyone plays bit 0.
        let act = g.deals[0].root;
        if let SimNode::Act { children, .. } = g.node(act) {
            if let SimNode::Terminal { payoff } = g.node(children[0]) {
                assert_eq!(payoff, &int(1));
            } else {
                panic!("expected terminal");
            }
            if let SimNode::Terminal { payoff } = g.node(children[1]) {
                assert_eq!(payoff, &int(0));
            } else {
                panic!("expected terminal");
            }
        } else {
            panic!("expected act node");
        }
    }

    #[test]
    fn card_game_unanimous_vote_for_good_player_wins() {
        let g = card_game(false).unwrap();
        // Deal 0: player 0 is the spy. All vote player 1 (= joint index
        // 1*9 + 1*3 + 1 = 13): elected player 1 is MAX.
        if let SimNode::Act { children, .. } = g.node(g.deals[0].root) {
            if let SimNode::Terminal { payoff } = g.node(children[13]) {
                assert_eq!(payoff, &int(1));
            } else {
                panic!("expected terminal");
            }
            // All vote player 0 (the spy): joint 0.
            if let SimNode::Terminal { payoff } = g.node(children[0]) {
                assert_eq!(payoff, &int(0));
            } else {
                panic!("expected terminal");
            }
        } else {
            panic!("expected act node");
        }
    }

    #[test]
    fn guessing_game_rejects_bad_distributions() {
        assert!(guessing_game(&[]).is_err());
        let mut d = uniform_k_adversaries(3, 1);
        d.pop();
        assert!(guessing_game(&d).is_err());
    }
}
