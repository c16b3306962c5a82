//! Reduction of a hidden-role [`SimGame`] to the two-player zero-sum
//! mediator-vs-adversary game.
//!
//! With private communication and a coordinated informed minority, the
//! optimal MAX-team value equals the value of a two-player zero-sum game in
//! which every MAX player honestly reports observations to a mediator and
//! obeys its recommendations. Each original game step expands into three
//! phases:
//!
//! 1. the adversary picks, jointly for all (uncrashed) MIN players, a
//!    reported observation that is consistent with some MAX-role history of
//!    that player, or the crash marker `⊥`;
//! 2. the mediator, seeing only the received report tuples and its own past
//!    recommendations, picks a joint action recommendation, omitting crashed
//!    players;
//! 3. the adversary, seeing the recommendations sent to MIN players, picks
//!    the actions actually played by all MIN players.
//!
//! MAX players' reports are forced truthful and their actions forced to the
//! recommendations. `⊥` is absorbing and visible to the mediator. Chance
//! nodes of the original game are preserved.

use crate::efg::{GameTree, GameTreeBuilder, NodeId, Player};
use crate::sim::{joint_index, SimError, SimGame, SimNode, SimNodeId};
use num::bigint::BigUint;

/// Builds the zero-sum mediator game. Fails if the input does not validate.
pub fn build_mediator_game(g: &SimGame) -> Result<GameTree, SimError> {
    g.validate()?;
    let tries: Vec<ReportTrie> = (0..g.n).map(|i| ReportTrie::build(g, i)).collect();
    let mut ctx = Ctx {
        g,
        tries: &tries,
        builder: GameTreeBuilder::new(format!("{}-mediated", g.name))
            .payoff_range(payoff_lo(g), payoff_hi(g)),
    };
    let mut outcomes = Vec::with_capacity(g.deals.len());
    for d in &g.deals {
        let seqs = vec![PlayerSequence::At(ReportTrie::ROOT); g.n];
        let med_key = "m".to_string();
        let adv_key = format!("a|t:{}", d.teams.label());
        let teams: Vec<Player> = d.teams.0.clone();
        let child = ctx.step(d.root, &teams, seqs, med_key, adv_key);
        outcomes.push((d.prob.clone(), child));
    }
    let root = ctx.builder.chance(outcomes);
    Ok(ctx.builder.finish(root))
}

/// True iff the built tree respects the `|H|^(k+1)` node bound, where `|H|`
/// counts the input's stage nodes expanded over assignment outcomes and `k`
/// is the largest MIN-team size. The bound is a theorem; `false` means the
/// builder is broken.
pub fn size_bound_check(g: &SimGame, built: &GameTree) -> bool {
    let h = BigUint::from(g.history_count());
    let k = g.max_min_team() as u32;
    let bound = h.pow(k + 1);
    BigUint::from(built.nodes.len() as u64) <= bound
}

fn payoff_lo(g: &SimGame) -> crate::rational::Rational {
    g.nodes
        .iter()
        .filter_map(|n| match n {
            SimNode::Terminal { payoff } => Some(payoff.clone()),
            _ => None,
        })
        .min()
        .unwrap_or_else(|| crate::rational::int(0))
}

fn payoff_hi(g: &SimGame) -> crate::rational::Rational {
    g.nodes
        .iter()
        .filter_map(|n| match n {
            SimNode::Terminal { payoff } => Some(payoff.clone()),
            _ => None,
        })
        .max()
        .unwrap_or_else(|| crate::rational::int(0))
}

/// A player's reported history: a position in its MAX-consistency trie, or
/// crashed. Once crashed, nothing further is appended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PlayerSequence {
    At(u32),
    Crashed,
}

/// Trie of observation/action sequences a player can produce while on team
/// MAX, across all deals. States await an observation; each observation edge
/// carries the action count the observation implies and per-action successor
/// states.
struct ReportTrie {
    states: Vec<TrieState>,
}

#[derive(Default)]
struct TrieState {
    /// (observation label, action count, successor state per action),
    /// in first-insertion order.
    edges: Vec<(String, usize, Vec<u32>)>,
}

impl ReportTrie {
    const ROOT: u32 = 0;

    fn build(g: &SimGame, player: usize) -> ReportTrie {
        let mut t = ReportTrie {
            states: vec![TrieState::default()],
        };
        for d in &g.deals {
            if d.teams.0[player] == Player::Max {
                t.absorb(g, player, d.root, Self::ROOT);
            }
        }
        t
    }

    fn absorb(&mut self, g: &SimGame, player: usize, node: SimNodeId, state: u32) {
        match g.node(node) {
            SimNode::Terminal { .. } => {}
            SimNode::Chance { outcomes } => {
                for (_, c) in outcomes {
                    self.absorb(g, player, *c, state);
                }
            }
            SimNode::Act {
                obs,
                action_counts,
                children,
            } => {
                let o = &obs[player];
                let count = action_counts[player];
                let edge = self.edge_mut(state, o, count);
                for (joint, c) in children.iter().enumerate() {
                    let a = action_at(action_counts, joint, player);
                    let next = self.states[state as usize].edges[edge].2[a];
                    self.absorb(g, player, *c, next);
                }
            }
        }
    }

    fn edge_mut(&mut self, state: u32, obs: &str, count: usize) -> usize {
        if let Some(pos) = self.states[state as usize]
            .edges
            .iter()
            .position(|(o, _, _)| o == obs)
        {
            return pos;
        }
        let succ: Vec<u32> = (0..count)
            .map(|_| {
                self.states.push(TrieState::default());
                (self.states.len() - 1) as u32
            })
            .collect();
        self.states[state as usize]
            .edges
            .push((obs.to_string(), count, succ));
        self.states[state as usize].edges.len() - 1
    }

    /// Consistent next observations from a state: `O(s_i)`.
    fn observations(&self, state: u32) -> &[(String, usize, Vec<u32>)] {
        &self.states[state as usize].edges
    }

    fn find_edge(&self, state: u32, obs: &str) -> Option<usize> {
        self.states[state as usize]
            .edges
            .iter()
            .position(|(o, _, _)| o == obs)
    }
}

/// Extracts player `p`'s action from a joint action index.
fn action_at(counts: &[usize], joint: usize, p: usize) -> usize {
    let mut rest = joint;
    let mut out = 0;
    for (i, c) in counts.iter().enumerate() {
        out = rest / counts[i + 1..].iter().product::<usize>().max(1);
        rest %= counts[i + 1..].iter().product::<usize>().max(1);
        if i == p {
            return out;
        }
    }
    out
}

struct Ctx<'a> {
    g: &'a SimGame,
    tries: &'a [ReportTrie],
    builder: GameTreeBuilder,
}

/// One report option for a MIN player: a trie observation edge or crash.
#[derive(Clone, Copy)]
enum ReportChoice {
    Edge(usize),
    Bottom,
}

impl<'a> Ctx<'a> {
    fn step(
        &mut self,
        node: SimNodeId,
        teams: &[Player],
        seqs: Vec<PlayerSequence>,
        med_key: String,
        adv_key: String,
    ) -> NodeId {
        match self.g.node(node) {
            SimNode::Terminal { payoff } => self.builder.terminal(payoff.clone()),
            SimNode::Chance { outcomes } => {
                let built: Vec<_> = outcomes
                    .iter()
                    .map(|(p, c)| {
                        (
                            p.clone(),
                            self.step(*c, teams, seqs.clone(), med_key.clone(), adv_key.clone()),
                        )
                    })
                    .collect();
                self.builder.chance(built)
            }
            SimNode::Act {
                obs,
                action_counts,
                children,
            } => {
                let obs = obs.clone();
                let action_counts = action_counts.clone();
                let children = children.clone();
                let n = self.g.n;

                // The adversary first observes its members' true observations.
                let min_obs: Vec<String> = (0..n)
                    .filter(|&i| teams[i] == Player::Min)
                    .map(|i| obs[i].clone())
                    .collect();
                let adv_key = format!("{adv_key}|o:{}", min_obs.join(","));

                // Report options per uncrashed MIN player.
                let reporters: Vec<usize> = (0..n)
                    .filter(|&i| teams[i] == Player::Min && seqs[i] != PlayerSequence::Crashed)
                    .collect();
                let mut option_sets: Vec<Vec<ReportChoice>> = Vec::new();
                for &i in &reporters {
                    let state = match seqs[i] {
                        PlayerSequence::At(s) => s,
                        PlayerSequence::Crashed => unreachable!(),
                    };
                    let mut opts: Vec<ReportChoice> = (0..self.tries[i].observations(state).len())
                        .map(ReportChoice::Edge)
                        .collect();
                    opts.push(ReportChoice::Bottom);
                    option_sets.push(opts);
                }

                let mut report_children: Vec<NodeId> = Vec::new();
                for joint in joint_choices(&option_sets) {
                    // Apply the report choice.
                    let mut seqs2 = seqs.clone();
                    let mut reported_edge: Vec<Option<usize>> = vec![None; n];
                    let mut report_labels: Vec<String> = vec![String::new(); n];
                    for i in 0..n {
                        match teams[i] {
                            Player::Max => {
                                report_labels[i] = obs[i].clone();
                            }
                            Player::Min => {
                                if let Some(pos) = reporters.iter().position(|&r| r == i) {
                                    match joint[pos] {
                                        ReportChoice::Edge(e) => {
                                            let state = match seqs[i] {
                                                PlayerSequence::At(s) => s,
                                                _ => unreachable!(),
                                            };
                                            reported_edge[i] = Some(e);
                                            report_labels[i] =
                                                self.tries[i].observations(state)[e].0.clone();
                                        }
                                        ReportChoice::Bottom => {
                                            seqs2[i] = PlayerSequence::Crashed;
                                            report_labels[i] = "!".to_string();
                                        }
                                    }
                                } else {
                                    report_labels[i] = "!".to_string(); // already crashed
                                }
                            }
                        }
                    }

                    let med_key2 = format!("{med_key}|r:{}", report_labels.join(","));
                    let adv_reports: Vec<&str> = reporters
                        .iter()
                        .map(|&i| report_labels[i].as_str())
                        .collect();
                    let adv_key2 = format!("{adv_key}|r:{}", adv_reports.join(","));

                    // Recommendation arities: true action count for MAX, the
                    // reported observation's action count for uncrashed MIN.
                    let rec_players: Vec<usize> = (0..n)
                        .filter(|&i| seqs2[i] != PlayerSequence::Crashed)
                        .collect();
                    let rec_counts: Vec<usize> = rec_players
                        .iter()
                        .map(|&i| match teams[i] {
                            Player::Max => action_counts[i],
                            Player::Min => {
                                let state = match seqs[i] {
                                    PlayerSequence::At(s) => s,
                                    _ => unreachable!(),
                                };
                                self.tries[i].observations(state)[reported_edge[i].unwrap()].1
                            }
                        })
                        .collect();

                    let mut rec_children: Vec<NodeId> = Vec::new();
                    for rec in mixed_radix(&rec_counts) {
                        let mut rec_of: Vec<Option<usize>> = vec![None; n];
                        for (slot, &i) in rec_players.iter().enumerate() {
                            rec_of[i] = Some(rec[slot]);
                        }
                        let rec_labels: Vec<String> = (0..n)
                            .map(|i| match rec_of[i] {
                                Some(a) => a.to_string(),
                                None => "-".to_string(),
                            })
                            .collect();
                        let med_key3 = format!("{med_key2}|a:{}", rec_labels.join(","));
                        let min_rec_labels: Vec<String> = (0..n)
                            .filter(|&i| teams[i] == Player::Min)
                            .map(|i| match rec_of[i] {
                                Some(a) => a.to_string(),
                                None => "-".to_string(),
                            })
                            .collect();
                        let adv_key3 = format!("{adv_key2}|c:{}", min_rec_labels.join(","));

                        // Phase 3: actual actions of all MIN players.
                        let actors: Vec<usize> =
                            (0..n).filter(|&i| teams[i] == Player::Min).collect();
                        let act_counts: Vec<usize> =
                            actors.iter().map(|&i| action_counts[i]).collect();

                        let mut act_children: Vec<NodeId> = Vec::new();
                        for acts in mixed_radix(&act_counts) {
                            let mut played: Vec<usize> = vec![0; n];
                            for i in 0..n {
                                played[i] = match teams[i] {
                                    Player::Max => rec_of[i].expect("MAX player always has a rec"),
                                    Player::Min => {
                                        let slot =
                                            actors.iter().position(|&a| a == i).unwrap();
                                        acts[slot]
                                    }
                                };
                            }
                            let joint_ix = joint_index(&action_counts, &played);
                            // Advance reported sequences by (obs, rec).
                            let mut seqs3 = seqs2.clone();
                            for i in 0..n {
                                match teams[i] {
                                    Player::Max => {
                                        let state = match seqs2[i] {
                                            PlayerSequence::At(s) => s,
                                            _ => unreachable!("MAX players never crash"),
                                        };
                                        let e = self.tries[i]
                                            .find_edge(state, &obs[i])
                                            .expect("true MAX observation must be consistent");
                                        let next =
                                            self.tries[i].observations(state)[e].2[rec_of[i].unwrap()];
                                        seqs3[i] = PlayerSequence::At(next);
                                    }
                                    Player::Min => {
                                        if seqs2[i] == PlayerSequence::Crashed {
                                            continue;
                                        }
                                        let state = match seqs[i] {
                                            PlayerSequence::At(s) => s,
                                            _ => unreachable!(),
                                        };
                                        let e = reported_edge[i].unwrap();
                                        let next =
                                            self.tries[i].observations(state)[e].2[rec_of[i].unwrap()];
                                        seqs3[i] = PlayerSequence::At(next);
                                    }
                                }
                            }
                            let acts_label: Vec<String> =
                                acts.iter().map(|a| a.to_string()).collect();
                            let adv_key4 = format!("{adv_key3}|x:{}", acts_label.join(","));
                            act_children.push(self.step(
                                children[joint_ix],
                                teams,
                                seqs3,
                                med_key3.clone(),
                                adv_key4,
                            ));
                        }

                        let rec_child = if actors.is_empty() {
                            debug_assert_eq!(act_children.len(), 1);
                            act_children[0]
                        } else {
                            let iset = self.builder.infoset(
                                Player::Min,
                                adv_key3.clone(),
                                act_children.len(),
                            );
                            self.builder.decision(iset, act_children)
                        };
                        rec_children.push(rec_child);
                    }

                    let iset =
                        self.builder
                            .infoset(Player::Max, med_key2.clone(), rec_children.len());
                    report_children.push(self.builder.decision(iset, rec_children));
                }

                if reporters.is_empty() {
                    debug_assert_eq!(report_children.len(), 1);
                    report_children[0]
                } else {
                    let iset =
                        self.builder
                            .infoset(Player::Min, adv_key.clone(), report_children.len());
                    self.builder.decision(iset, report_children)
                }
            }
        }
    }
}

/// All joint choices over per-slot option lists, first slot most significant.
fn joint_choices(options: &[Vec<ReportChoice>]) -> Vec<Vec<ReportChoice>> {
    let mut out = vec![Vec::new()];
    for opts in options {
        let mut next = Vec::with_capacity(out.len() * opts.len());
        for prefix in &out {
            for &o in opts {
                let mut p = prefix.clone();
                p.push(o);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// All index tuples over mixed-radix `counts`, first slot most significant.
fn mixed_radix(counts: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &c in counts {
        let mut next = Vec::with_capacity(out.len() * c);
        for prefix in &out {
            for a in 0..c {
                let mut p = prefix.clone();
                p.push(a);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efg::{validate, Node};
    use crate::games::matching_pennies;

    #[test]
    fn mp3_structure() {
        let sim = matching_pennies(3).unwrap();
        let g = build_mediator_game(&sim).unwrap();
        assert!(validate(&g).is_valid(), "{}", validate(&g));
        let c = g.counts();
        // Hand count, per deal: the adversary reports MAX or crashes (2);
        // honest branch has 2^3 joint recommendations, crash branch 2^2;
        // either way the adversary then plays one of 2 actions. 3 deals:
        // 3 * (8 + 4) * 2 = 72 terminals.
        assert_eq!(c.terminals, 72);
        // Mediator infosets: one shared honest-report tuple and one per
        // crashed player; adversary: per deal 1 report node + 3 act infosets.
        assert_eq!(c.infosets_max, 4);
        assert_eq!(c.infosets_min, 12);
        assert!(size_bound_check(&sim, &g));
    }

    #[test]
    fn mediator_infosets_do_not_leak_the_assignment() {
        let sim = matching_pennies(3).unwrap();
        let g = build_mediator_game(&sim).unwrap();
        // All honest report tuples look identical to the mediator, so its
        // first recommendation infoset must span members under all 3 deals.
        let honest = g
            .infosets
            .iter()
            .find(|i| i.player == Player::Max && !i.key.contains('!'))
            .unwrap();
        assert_eq!(honest.members.len(), 3);
        // Distinct deals reach distinct members of that infoset: check that
        // members sit under different root outcomes.
        let root_children: Vec<u32> = match g.node(g.root) {
            Node::Chance { outcomes } => outcomes.iter().map(|(_, c)| *c).collect(),
            _ => panic!("root must be the assignment lottery"),
        };
        assert_eq!(root_children.len(), 3);
    }

    #[test]
    fn bottom_is_absorbing() {
        // In the crash branch the adversary keeps only its true-action
        // choice: no recommendation for the crashed player exists there.
        let sim = matching_pennies(3).unwrap();
        let g = build_mediator_game(&sim).unwrap();
        for i in &g.infosets {
            if i.player == Player::Max && i.key.contains('!') {
                assert_eq!(i.actions, 4, "crash branch recommends to 2 MAX players only");
            }
        }
    }
}
