//! Dense two-phase primal simplex in exact rational arithmetic.
//!
//! Bland's rule for both the entering and leaving variable guarantees
//! termination without cycling. Intended for the small linear programs this
//! crate produces (sequence-form programs of modest games and the restricted
//! matrix games of the strategy-generation loop); everything is exact, so a
//! returned optimum is a certificate, not an approximation.

use crate::rational::Rational;
use num::traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct LpRow {
    pub coeffs: Vec<(usize, Rational)>,
    pub cmp: Cmp,
    pub rhs: Rational,
}

/// Minimize `minimize . w` subject to `rows`, `w >= 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub minimize: Vec<Rational>,
    pub rows: Vec<LpRow>,
}

#[derive(Debug, Clone)]
pub struct SimplexOutcome {
    pub objective: Rational,
    pub primal: Vec<Rational>,
    /// One dual multiplier per input row (`c_B B^-1` of the equality form,
    /// with signs restored for rows that were flipped during normalization).
    pub duals: Vec<Rational>,
    pub pivots: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("iteration cap reached without convergence")]
    IterationCap,
    #[error("invalid input: {0}")]
    Input(String),
    #[error("internal solver error: {0}")]
    Internal(String),
}

struct Tableau {
    /// `rows x (cols + 1)`; the last cell of each row is the rhs.
    t: Vec<Vec<Rational>>,
    /// Reduced-cost rows for phase 1 and phase 2, pivoted alongside.
    z: [Vec<Rational>; 2],
    basis: Vec<usize>,
    alive: Vec<bool>,
    cols: usize,
    pivots: u64,
}

impl Tableau {
    fn rhs(&self, r: usize) -> &Rational {
        &self.t[r][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = {
            let p = &self.t[r][c];
            assert!(!p.is_zero());
            Rational::one() / p
        };
        for v in self.t[r].iter_mut() {
            if !v.is_zero() {
                *v = &*v * &inv;
            }
        }
        let pivot_row = std::mem::take(&mut self.t[r]);
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || !self.alive[i] {
                continue;
            }
            eliminate(row, &pivot_row, c);
        }
        for z in self.z.iter_mut() {
            eliminate(z, &pivot_row, c);
        }
        self.t[r] = pivot_row;
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Bland: entering = lowest-index allowed column with a negative reduced
    /// cost; leaving = minimum ratio, ties by lowest basic variable index.
    fn run(&mut self, phase: usize, allowed: &[bool], cap: u64) -> Result<(), LpError> {
        loop {
            if self.pivots > cap {
                return Err(LpError::IterationCap);
            }
            let entering = (0..self.cols).find(|&j| allowed[j] && self.z[phase][j].is_negative());
            let Some(c) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, Rational)> = None;
            for r in 0..self.t.len() {
                if !self.alive[r] || !self.t[r][c].is_positive() {
                    continue;
                }
                let ratio = self.rhs(r) / &self.t[r][c];
                match &leave {
                    None => leave = Some((r, ratio)),
                    Some((br, best)) => {
                        if ratio < *best || (ratio == *best && self.basis[r] < self.basis[*br]) {
                            leave = Some((r, ratio));
                        }
                    }
                }
            }
            let Some((r, _)) = leave else {
                return Err(LpError::Unbounded);
            };
            self.pivot(r, c);
        }
    }
}

fn eliminate(row: &mut [Rational], pivot_row: &[Rational], c: usize) {
    let factor = row[c].clone();
    if factor.is_zero() {
        return;
    }
    for (v, p) in row.iter_mut().zip(pivot_row) {
        if !p.is_zero() {
            *v = &*v - &(&factor * p);
        }
    }
}

/// Solves the program. `cap` bounds total pivots across both phases.
pub fn solve(lp: &LinearProgram, cap: u64) -> Result<SimplexOutcome, LpError> {
    if lp.minimize.len() != lp.num_vars {
        return Err(LpError::Input("objective length != num_vars".into()));
    }
    let m = lp.rows.len();

    // Normalize to rhs >= 0, tracking sign flips for dual recovery.
    let mut flipped = vec![false; m];
    let mut rows: Vec<LpRow> = lp.rows.clone();
    for (i, row) in rows.iter_mut().enumerate() {
        for (v, _) in row.coeffs.iter() {
            if *v >= lp.num_vars {
                return Err(LpError::Input(format!("row {i} references variable {v}")));
            }
        }
        if row.rhs.is_negative() {
            flipped[i] = true;
            row.rhs = -row.rhs.clone();
            for (_, c) in row.coeffs.iter_mut() {
                *c = -c.clone();
            }
            row.cmp = match row.cmp {
                Cmp::Le => Cmp::Ge,
                Cmp::Ge => Cmp::Le,
                Cmp::Eq => Cmp::Eq,
            };
        }
    }

    // Column layout: original vars, then per-row slack/surplus/artificials.
    let mut cols = lp.num_vars;
    let mut slack_col = vec![usize::MAX; m];
    let mut surplus_col = vec![usize::MAX; m];
    let mut art_col = vec![usize::MAX; m];
    for (i, row) in rows.iter().enumerate() {
        match row.cmp {
            Cmp::Le => {
                slack_col[i] = cols;
                cols += 1;
            }
            Cmp::Ge => {
                surplus_col[i] = cols;
                cols += 1;
                art_col[i] = cols;
                cols += 1;
            }
            Cmp::Eq => {
                art_col[i] = cols;
                cols += 1;
            }
        }
    }

    let mut t = vec![vec![Rational::zero(); cols + 1]; m];
    let mut basis = vec![0usize; m];
    for (i, row) in rows.iter().enumerate() {
        for (v, c) in &row.coeffs {
            t[i][*v] = &t[i][*v] + c;
        }
        t[i][cols] = row.rhs.clone();
        if slack_col[i] != usize::MAX {
            t[i][slack_col[i]] = Rational::one();
            basis[i] = slack_col[i];
        }
        if surplus_col[i] != usize::MAX {
            t[i][surplus_col[i]] = -Rational::one();
        }
        if art_col[i] != usize::MAX {
            t[i][art_col[i]] = Rational::one();
            basis[i] = art_col[i];
        }
    }

    // Reduced-cost rows: z[0] for phase 1 (sum of artificials), z[1] for the
    // real objective; the rhs cell carries minus the objective value.
    let mut z1 = vec![Rational::zero(); cols + 1];
    let mut z2 = vec![Rational::zero(); cols + 1];
    for j in 0..lp.num_vars {
        z2[j] = lp.minimize[j].clone();
    }
    for i in 0..m {
        if art_col[i] != usize::MAX {
            z1[art_col[i]] = Rational::one();
        }
    }
    for i in 0..m {
        let b = basis[i];
        for z in [&mut z1, &mut z2] {
            if !z[b].is_zero() {
                let f = z[b].clone();
                for j in 0..=cols {
                    if !t[i][j].is_zero() {
                        z[j] = &z[j] - &(&f * &t[i][j]);
                    }
                }
            }
        }
    }

    let mut tab = Tableau {
        t,
        z: [z1, z2],
        basis,
        alive: vec![true; m],
        cols,
        pivots: 0,
    };

    let artificial = {
        let mut a = vec![false; cols];
        for i in 0..m {
            if art_col[i] != usize::MAX {
                a[art_col[i]] = true;
            }
        }
        a
    };

    if artificial.iter().any(|&a| a) {
        let allowed = vec![true; cols];
        tab.run(0, &allowed, cap)?;
        if !tab.z[0][cols].is_zero() {
            // Phase-1 optimum is -sum(artificials); nonzero means infeasible.
            return Err(LpError::Infeasible);
        }
        // Drive remaining artificials out of the basis; a row with no other
        // pivotable entry is redundant and is dropped (dual 0).
        for r in 0..m {
            if !tab.alive[r] || !artificial[tab.basis[r]] {
                continue;
            }
            let piv = (0..cols).find(|&j| !artificial[j] && !tab.t[r][j].is_zero());
            match piv {
                Some(c) => tab.pivot(r, c),
                None => tab.alive[r] = false,
            }
        }
    }

    let allowed: Vec<bool> = artificial.iter().map(|&a| !a).collect();
    tab.run(1, &allowed, cap)?;

    let mut primal = vec![Rational::zero(); lp.num_vars];
    for r in 0..m {
        if tab.alive[r] && tab.basis[r] < lp.num_vars {
            primal[tab.basis[r]] = tab.rhs(r).clone();
        }
    }
    let objective = -tab.z[1][cols].clone();

    // Duals: y_i = -sigma * reduced cost of row i's added column, where sigma
    // is the column's coefficient in that row (+1 slack/artificial, -1
    // surplus); flipped rows negate again. Dropped redundant rows get 0.
    let mut duals = vec![Rational::zero(); m];
    for i in 0..m {
        if !tab.alive[i] {
            continue;
        }
        let (col, neg) = if art_col[i] != usize::MAX {
            (art_col[i], true)
        } else if slack_col[i] != usize::MAX {
            (slack_col[i], true)
        } else {
            (surplus_col[i], false)
        };
        let mut y = if neg {
            -tab.z[1][col].clone()
        } else {
            tab.z[1][col].clone()
        };
        if flipped[i] {
            y = -y;
        }
        duals[i] = y;
    }

    Ok(SimplexOutcome {
        objective,
        primal,
        duals,
        pivots: tab.pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn row(coeffs: &[(usize, i64)], cmp: Cmp, rhs: i64) -> LpRow {
        LpRow {
            coeffs: coeffs.iter().map(|&(v, c)| (v, int(c))).collect(),
            cmp,
            rhs: int(rhs),
        }
    }

    #[test]
    fn simple_max_problem() {
        // max 3a + 2b st a + b <= 4, a + 3b <= 6  => a=4, b=0, obj 12.
        let lp = LinearProgram {
            num_vars: 2,
            minimize: vec![int(-3), int(-2)],
            rows: vec![
                row(&[(0, 1), (1, 1)], Cmp::Le, 4),
                row(&[(0, 1), (1, 3)], Cmp::Le, 6),
            ],
        };
        let s = solve(&lp, 10_000).unwrap();
        assert_eq!(s.objective, int(-12));
        assert_eq!(s.primal, vec![int(4), int(0)]);
        assert_eq!(s.duals[0], int(-3));
        assert_eq!(s.duals[1], int(0));
    }

    #[test]
    fn equality_and_ge_rows() {
        // min x + y st x + y = 2, x >= 1/2  => obj 2.
        let lp = LinearProgram {
            num_vars: 2,
            minimize: vec![int(1), int(1)],
            rows: vec![
                row(&[(0, 1), (1, 1)], Cmp::Eq, 2),
                LpRow {
                    coeffs: vec![(0, int(1))],
                    cmp: Cmp::Ge,
                    rhs: ratio(1, 2),
                },
            ],
        };
        let s = solve(&lp, 10_000).unwrap();
        assert_eq!(s.objective, int(2));
        assert_eq!(&s.primal[0] + &s.primal[1], int(2));
    }

    #[test]
    fn infeasible_detected() {
        let lp = LinearProgram {
            num_vars: 1,
            minimize: vec![int(0)],
            rows: vec![row(&[(0, 1)], Cmp::Le, 1), row(&[(0, 1)], Cmp::Ge, 2)],
        };
        assert_eq!(solve(&lp, 10_000).unwrap_err(), LpError::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let lp = LinearProgram {
            num_vars: 1,
            minimize: vec![int(-1)],
            rows: vec![row(&[(0, 1)], Cmp::Ge, 0)],
        };
        assert_eq!(solve(&lp, 10_000).unwrap_err(), LpError::Unbounded);
    }

    #[test]
    fn redundant_equalities_survive() {
        let lp = LinearProgram {
            num_vars: 1,
            minimize: vec![int(1)],
            rows: vec![row(&[(0, 1)], Cmp::Eq, 1), row(&[(0, 1)], Cmp::Eq, 1)],
        };
        let s = solve(&lp, 10_000).unwrap();
        assert_eq!(s.objective, int(1));
        assert_eq!(s.primal[0], int(1));
    }

    #[test]
    fn degenerate_cycling_guard() {
        // Beale's cycling example; Bland must terminate at -1/20.
        let lp = LinearProgram {
            num_vars: 4,
            minimize: vec![ratio(-3, 4), int(150), ratio(-1, 50), int(6)],
            rows: vec![
                LpRow {
                    coeffs: vec![
                        (0, ratio(1, 4)),
                        (1, int(-60)),
                        (2, ratio(-1, 25)),
                        (3, int(9)),
                    ],
                    cmp: Cmp::Le,
                    rhs: int(0),
                },
                LpRow {
                    coeffs: vec![
                        (0, ratio(1, 2)),
                        (1, int(-90)),
                        (2, ratio(-1, 50)),
                        (3, int(3)),
                    ],
                    cmp: Cmp::Le,
                    rhs: int(0),
                },
                LpRow {
                    coeffs: vec![(2, int(1))],
                    cmp: Cmp::Le,
                    rhs: int(1),
                },
            ],
        };
        let s = solve(&lp, 100_000).unwrap();
        assert_eq!(s.objective, ratio(-1, 20));
    }

    #[test]
    fn matrix_game_rock_paper_scissors() {
        // Row player mixes over 3 rows; skew-symmetric payoffs; value 0.
        let u = [[0i64, -1, 1], [1, 0, -1], [-1, 1, 0]];
        let mut rows = Vec::new();
        for j in 0..3 {
            let mut coeffs: Vec<(usize, Rational)> = (0..3).map(|i| (i, int(u[i][j]))).collect();
            coeffs.push((3, int(-1)));
            coeffs.push((4, int(1)));
            rows.push(LpRow {
                coeffs,
                cmp: Cmp::Ge,
                rhs: int(0),
            });
        }
        rows.push(row(&[(0, 1), (1, 1), (2, 1)], Cmp::Eq, 1));
        let lp = LinearProgram {
            num_vars: 5,
            minimize: vec![int(0), int(0), int(0), int(-1), int(1)],
            rows,
        };
        let s = solve(&lp, 10_000).unwrap();
        assert_eq!(s.objective, int(0));
        assert_eq!(s.primal[0], ratio(1, 3));
        assert_eq!(s.primal[1], ratio(1, 3));
        assert_eq!(s.primal[2], ratio(1, 3));
    }
}
