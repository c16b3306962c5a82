//! Line-oriented text formats for games and strategies.
//!
//! Game files (version header `efg 1`) have three sections: `meta`, `infosets`
//! and `nodes`. Probabilities and payoffs are written as `num/den` so files
//! round-trip exactly. Infoset keys are whitespace-free canonical strings.
//!
//! ```text
//! efg 1
//! meta name <name>
//! meta payoff-range <num/den> <num/den>
//! infosets <count>
//! i <id> <max|min> <actions> <key>
//! nodes <count> root 0
//! c <id> <prob> <child> [<prob> <child> ...]
//! d <id> <max|min> <infoset> <children...>
//! t <id> <payoff>
//! end
//! ```
//!
//! Strategy files (`strategy 1`) map infoset keys to probability vectors, one
//! infoset per line, in `rational` (num/den) or `float` mode.

use super::{BehavioralStrategy, EfgError, GameTree, Infoset, Node, Player};
use crate::rational::{format_ratio, parse_ratio, Rational};
use num::traits::Zero;
use std::fmt::Write as _;

pub fn write_game(game: &GameTree) -> String {
    let mut out = String::new();
    out.push_str("efg 1\n");
    let _ = writeln!(out, "meta name {}", game.name);
    let _ = writeln!(
        out,
        "meta payoff-range {} {}",
        format_ratio(&game.payoff_range.0),
        format_ratio(&game.payoff_range.1)
    );
    let _ = writeln!(out, "infosets {}", game.infosets.len());
    for (id, i) in game.infosets.iter().enumerate() {
        let _ = writeln!(out, "i {} {} {} {}", id, i.player.as_str(), i.actions, i.key);
    }
    let _ = writeln!(out, "nodes {} root {}", game.nodes.len(), game.root);
    for (id, n) in game.nodes.iter().enumerate() {
        match n {
            Node::Chance { outcomes } => {
                let _ = write!(out, "c {}", id);
                for (p, c) in outcomes {
                    let _ = write!(out, " {} {}", format_ratio(p), c);
                }
                out.push('\n');
            }
            Node::Decision {
                player,
                infoset,
                children,
            } => {
                let _ = write!(out, "d {} {} {}", id, player.as_str(), infoset);
                for c in children {
                    let _ = write!(out, " {}", c);
                }
                out.push('\n');
            }
            Node::Terminal { payoff } => {
                let _ = writeln!(out, "t {} {}", id, format_ratio(payoff));
            }
        }
    }
    out.push_str("end\n");
    out
}

fn perr(line_no: usize, msg: impl std::fmt::Display) -> EfgError {
    EfgError::Parse(format!("line {line_no}: {msg}"))
}

pub fn read_game(text: &str) -> Result<GameTree, EfgError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (ln, header) = lines.next().ok_or_else(|| perr(0, "empty file"))?;
    if header != "efg 1" {
        return Err(perr(ln, format!("expected header `efg 1`, found `{header}`")));
    }

    let mut name = String::new();
    let mut payoff_range = (Rational::zero(), Rational::zero());
    let mut infosets: Vec<Infoset> = Vec::new();
    let mut nodes: Vec<Option<Node>> = Vec::new();
    let mut root: u32 = 0;
    let mut expected_infosets = 0usize;
    let mut expected_nodes = 0usize;

    for (ln, line) in lines {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tok = line.split_whitespace();
        let head = tok.next().unwrap();
        match head {
            "meta" => match tok.next() {
                Some("name") => name = tok.collect::<Vec<_>>().join(" "),
                Some("payoff-range") => {
                    let lo = tok
                        .next()
                        .and_then(parse_ratio)
                        .ok_or_else(|| perr(ln, "bad payoff-range low bound"))?;
                    let hi = tok
                        .next()
                        .and_then(parse_ratio)
                        .ok_or_else(|| perr(ln, "bad payoff-range high bound"))?;
                    payoff_range = (lo, hi);
                }
                other => return Err(perr(ln, format!("unknown meta field {other:?}"))),
            },
            "infosets" => {
                expected_infosets = tok
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| perr(ln, "bad infoset count"))?;
            }
            "i" => {
                let id: usize = tok
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| perr(ln, "bad infoset id"))?;
                if id != infosets.len() {
                    return Err(perr(ln, format!("infoset id {id} out of order")));
                }
                let player = tok
                    .next()
                    .and_then(Player::parse)
                    .ok_or_else(|| perr(ln, "bad infoset owner"))?;
                let actions: usize = tok
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| perr(ln, "bad action count"))?;
                let key = tok
                    .next()
                    .ok_or_else(|| perr(ln, "missing infoset key"))?
                    .to_string();
                infosets.push(Infoset {
                    player,
                    actions,
                    key,
                    members: Vec::new(),
                    parent: None,
                    depth: 0,
                });
            }
            "nodes" => {
                expected_nodes = tok
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| perr(ln, "bad node count"))?;
                if tok.next() != Some("root") {
                    return Err(perr(ln, "expected `root <id>` after node count"));
                }
                root = tok
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| perr(ln, "bad root id"))?;
                nodes = Vec::with_capacity(expected_nodes);
            }
            "c" | "d" | "t" => {
                let id: usize = tok
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| perr(ln, "bad node id"))?;
                if id != nodes.len() {
                    return Err(perr(ln, format!("node id {id} out of order")));
                }
                let node = match head {
                    "c" => {
                        let rest: Vec<&str> = tok.collect();
                        if rest.is_empty() || rest.len() % 2 != 0 {
                            return Err(perr(ln, "chance node needs (prob, child) pairs"));
                        }
                        let mut outcomes = Vec::with_capacity(rest.len() / 2);
                        for pair in rest.chunks(2) {
                            let p = parse_ratio(pair[0])
                                .ok_or_else(|| perr(ln, format!("bad probability {}", pair[0])))?;
                            let c: u32 = pair[1]
                                .parse()
                                .map_err(|_| perr(ln, format!("bad child id {}", pair[1])))?;
                            outcomes.push((p, c));
                        }
                        Node::Chance { outcomes }
                    }
                    "d" => {
                        let player = tok
                            .next()
                            .and_then(Player::parse)
                            .ok_or_else(|| perr(ln, "bad decision owner"))?;
                        let infoset: u32 = tok
                            .next()
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| perr(ln, "bad infoset reference"))?;
                        let children: Result<Vec<u32>, _> = tok.map(|s| s.parse()).collect();
                        let children =
                            children.map_err(|_| perr(ln, "bad child id in decision node"))?;
                        if children.is_empty() {
                            return Err(perr(ln, "decision node without children"));
                        }
                        if let Some(i) = infosets.get_mut(infoset as usize) {
                            i.members.push(id as u32);
                        } else {
                            return Err(perr(ln, format!("infoset {infoset} not declared")));
                        }
                        Node::Decision {
                            player,
                            infoset,
                            children,
                        }
                    }
                    _ => {
                        let payoff = tok
                            .next()
                            .and_then(parse_ratio)
                            .ok_or_else(|| perr(ln, "bad terminal payoff"))?;
                        Node::Terminal { payoff }
                    }
                };
                nodes.push(Some(node));
            }
            "end" => break,
            other => return Err(perr(ln, format!("unknown record `{other}`"))),
        }
    }

    if infosets.len() != expected_infosets {
        return Err(perr(
            0,
            format!(
                "declared {expected_infosets} infosets, found {}",
                infosets.len()
            ),
        ));
    }
    if nodes.len() != expected_nodes {
        return Err(perr(
            0,
            format!("declared {expected_nodes} nodes, found {}", nodes.len()),
        ));
    }

    let mut game = GameTree {
        name,
        nodes: nodes.into_iter().map(Option::unwrap).collect(),
        root,
        infosets,
        payoff_range,
    };
    derive_infoset_sequences(&mut game)?;
    Ok(game)
}

/// Recomputes per-infoset parent sequences and depths from the node graph
/// (they are not stored in the file).
fn derive_infoset_sequences(game: &mut GameTree) -> Result<(), EfgError> {
    use std::collections::HashMap;
    let mut intern: HashMap<(Option<u32>, u32, usize), u32> = HashMap::new();
    let mut seq_meta: Vec<(u32, usize, u32)> = Vec::new(); // (infoset, action, depth)
    let mut set: Vec<bool> = vec![false; game.infosets.len()];
    let mut stack: Vec<(u32, Option<u32>, Option<u32>)> = vec![(game.root, None, None)];
    let mut visited = vec![false; game.nodes.len()];
    while let Some((id, sx, sy)) = stack.pop() {
        if id as usize >= game.nodes.len() || visited[id as usize] {
            return Err(EfgError::Parse(format!(
                "node {id} revisited or out of bounds; not a tree"
            )));
        }
        visited[id as usize] = true;
        match &game.nodes[id as usize] {
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
                if !set[*infoset as usize] {
                    set[*infoset as usize] = true;
                    let (parent, depth) = match own {
                        None => (None, 0),
                        Some(s) => {
                            let (pi, pa, d) = seq_meta[s as usize];
                            (Some((pi, pa)), d + 1)
                        }
                    };
                    game.infosets[*infoset as usize].parent = parent;
                    game.infosets[*infoset as usize].depth = depth;
                }
                for (a, c) in children.iter().enumerate() {
                    let next = *intern.entry((own, *infoset, a)).or_insert_with(|| {
                        let depth = own.map(|s| seq_meta[s as usize].2 + 1).unwrap_or(0);
                        seq_meta.push((*infoset, a, depth));
                        (seq_meta.len() - 1) as u32
                    });
                    match player {
                        Player::Max => stack.push((*c, Some(next), sy)),
                        Player::Min => stack.push((*c, sx, Some(next))),
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn write_strategy(game: &GameTree, s: &BehavioralStrategy<Rational>) -> String {
    let mut out = String::new();
    out.push_str("strategy 1\n");
    let _ = writeln!(out, "player {}", s.owner.as_str());
    out.push_str("mode rational\n");
    for id in game.infosets_of(s.owner) {
        let i = game.infoset(id);
        let v = &s.probs[id as usize];
        if v.is_empty() {
            continue;
        }
        let _ = write!(out, "{}", i.key);
        for p in v {
            let _ = write!(out, " {}", format_ratio(p));
        }
        out.push('\n');
    }
    out.push_str("end\n");
    out
}

pub fn read_strategy(
    game: &GameTree,
    text: &str,
) -> Result<BehavioralStrategy<Rational>, EfgError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (ln, header) = lines.next().ok_or_else(|| perr(0, "empty strategy file"))?;
    if header != "strategy 1" {
        return Err(perr(ln, "expected header `strategy 1`"));
    }
    let (ln, pline) = lines.next().ok_or_else(|| perr(0, "missing player line"))?;
    let owner = pline
        .strip_prefix("player ")
        .and_then(Player::parse)
        .ok_or_else(|| perr(ln, "bad player line"))?;
    let (ln, mline) = lines.next().ok_or_else(|| perr(0, "missing mode line"))?;
    if mline != "mode rational" {
        return Err(perr(ln, "only `mode rational` strategies can be read back"));
    }

    let mut by_key = std::collections::HashMap::new();
    for (id, i) in game.infosets.iter().enumerate() {
        by_key.insert(i.key.as_str(), id as u32);
    }

    let mut s = BehavioralStrategy::<Rational>::empty(game, owner);
    for (ln, line) in lines {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "end" {
            break;
        }
        let mut tok = line.split_whitespace();
        let key = tok.next().unwrap();
        let id = *by_key
            .get(key)
            .ok_or_else(|| perr(ln, format!("unknown infoset key {key}")))?;
        let probs: Option<Vec<Rational>> = tok.map(parse_ratio).collect();
        let probs = probs.ok_or_else(|| perr(ln, "bad probability"))?;
        s.probs[id as usize] = probs;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::super::testutil::*;
    use super::*;
    use crate::efg::{expected_value, validate};

    #[test]
    fn game_roundtrip_preserves_structure_and_values() {
        let g = chance_pennies();
        let text = write_game(&g);
        let g2 = read_game(&text).unwrap();
        assert!(validate(&g2).is_valid());
        assert_eq!(g.nodes.len(), g2.nodes.len());
        assert_eq!(g.infosets.len(), g2.infosets.len());
        let x = BehavioralStrategy::<Rational>::uniform(&g, Player::Max);
        let y = BehavioralStrategy::<Rational>::uniform(&g, Player::Min);
        let x2 = BehavioralStrategy::<Rational>::uniform(&g2, Player::Max);
        let y2 = BehavioralStrategy::<Rational>::uniform(&g2, Player::Min);
        assert_eq!(
            expected_value(&g, &x, &y).unwrap(),
            expected_value(&g2, &x2, &y2).unwrap()
        );
        assert_eq!(text, write_game(&g2));
    }

    #[test]
    fn truncated_file_names_line() {
        let g = chance_pennies();
        let mut text = write_game(&g);
        let cut = text.len() / 2;
        text.truncate(cut);
        let last_full = text.rfind('\n').unwrap();
        text.truncate(last_full);
        text.push_str("\nd 9999 garbage\n");
        let err = read_game(&text).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("line"), "got: {msg}");
    }

    #[test]
    fn strategy_roundtrip() {
        let g = chance_pennies();
        let mut y = BehavioralStrategy::<Rational>::uniform(&g, Player::Min);
        for id in g.infosets_of(Player::Min) {
            y.probs[id as usize] = vec![crate::rational::ratio(1, 3), crate::rational::ratio(2, 3)];
        }
        let text = write_strategy(&g, &y);
        let y2 = read_strategy(&g, &text).unwrap();
        assert_eq!(y.probs, y2.probs);
    }
}
