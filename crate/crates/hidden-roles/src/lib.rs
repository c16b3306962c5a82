//! Solver toolkit for mediated hidden-role games.
//!
//! A *hidden-role game* is a zero-sum team game in which chance privately
//! assigns players to teams at the root: the informed minority (MIN) observes
//! the whole assignment, the uniformed majority (MAX) does not. With private
//! communication and a coordinated adversary, the optimal MAX-team value
//! equals the value of an ordinary two-player zero-sum extensive-form game
//! between a *mediator* (who receives reports and issues action
//! recommendations) and a single *adversary* (who reports fake-but-consistent
//! observations on behalf of MIN players and chooses their actions).
//!
//! This crate provides:
//!
//! * [`efg`] — explicit two-player zero-sum extensive-form game trees with
//!   chance, exact rational arithmetic, expected value, best response and
//!   exploitability.
//! * [`sim`] — small simultaneous-move hidden-role games in explicit form.
//! * [`mediator`] — the reduction from a [`sim::SimGame`] to the two-player
//!   zero-sum mediator game.
//! * [`games`] — built-in generators: hidden-role matching pennies, the
//!   three-card voting game, and the team-guessing game (plus the price of
//!   hidden roles).
//! * [`avalon`] — direct construction of reduced 5- and 6-player Avalon
//!   instances (mediator vs. coordinated spies) with claim phase,
//!   plausibility-restricted missions and the Merlin guess.
//! * [`cfr`] — CFR, CFR+ and PCFR+ with averaging and exploitability-targeted
//!   stopping.
//! * [`lp`] — sequence-form linear programming in exact rational arithmetic
//!   (Bland's rule simplex), with a strategy-generation escalation for larger
//!   games, plus exact best-response certification of arbitrary strategies.
//! * [`report`] — solve reports and reproducible run manifests.
//! * [`cli`] — the `hidden-roles` command-line interface.
//!
//! Run `cargo run --example matching_pennies` (or any other example) for a
//! guided tour; `cargo test --test acceptance -- --nocapture` runs the
//! full verification suite.

pub mod avalon;
pub mod cfr;
pub mod cli;
pub mod efg;
pub mod games;
pub mod lp;
pub mod mediator;
pub mod rational;
pub mod report;
pub mod sim;

pub use efg::{GameTree, Node, Player};
pub use rational::Rational;
