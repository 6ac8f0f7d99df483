//! Dense two-phase tableau simplex with Bland's rule.
//!
//! The public entry points work over the leader simplex cut by homogeneous
//! halfspaces `<x, d> >= 0`; [`solve_standard`] is the general kernel also
//! used by the joint (mapping, action) reformulation in `solvers`.

use crate::error::{Error, Result};
use crate::game::MixedStrategy;

pub const PIVOT_EPS: f64 = 1e-10;
pub const FEAS_EPS: f64 = 1e-8;

/// `{x : <x, normal> >= 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: Vec<f64>,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>) -> Self {
        Self { normal }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.normal.iter().zip(x).map(|(d, v)| d * v).sum()
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.eval(x) >= -tol * self.norm().max(1.0)
    }

    pub fn norm(&self) -> f64 {
        self.normal.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.normal.iter().all(|&v| v == 0.0)
    }

    /// Unit-norm copy, or `None` for the zero normal.
    pub fn normalized(&self) -> Option<Vec<f64>> {
        let norm = self.norm();
        (norm > 0.0).then(|| self.normal.iter().map(|v| v / norm).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    pub x: Option<MixedStrategy>,
    pub value: f64,
    pub is_vertex: bool,
}

impl LpResult {
    fn infeasible() -> Self {
        Self { status: LpStatus::Infeasible, x: None, value: f64::NEG_INFINITY, is_vertex: false }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// `max <c, x>` subject to `x >= 0`, `le` rows `<a, x> <= b`, `eq` rows `<a, x> = b`.
#[derive(Debug, Clone, Default)]
pub struct StandardLp {
    pub objective: Vec<f64>,
    pub le: Vec<(Vec<f64>, f64)>,
    pub eq: Vec<(Vec<f64>, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StandardOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize, cost: &mut [f64], value: &mut f64) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        self.rhs[r] /= p;
        self.rows[r][c] = 1.0;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r];
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f == 0.0 {
                continue;
            }
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            row[c] = 0.0;
            self.rhs[i] -= f * pivot_rhs;
        }
        let f = cost[c];
        if f != 0.0 {
            for (v, pv) in cost.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            cost[c] = 0.0;
            *value += f * pivot_rhs;
        }
        self.basis[r] = c;
    }

    /// Reduced costs and objective value of `cost` w.r.t. the current basis.
    fn price(&self, cost: &[f64]) -> (Vec<f64>, f64) {
        let mut reduced = cost.to_vec();
        let mut value = 0.0;
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb == 0.0 {
                continue;
            }
            for (r, v) in reduced.iter_mut().zip(&self.rows[i]) {
                *r -= cb * v;
            }
            value += cb * self.rhs[i];
        }
        (reduced, value)
    }

    /// Primal simplex, Bland's rule. Returns false when unbounded.
    fn optimize(&mut self, reduced: &mut [f64], value: &mut f64, allowed: &[bool]) -> bool {
        loop {
            let entering = (0..self.cols).find(|&j| allowed[j] && reduced[j] > PIVOT_EPS);
            let Some(c) = entering else { return true };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = row[c];
                if a <= PIVOT_EPS {
                    continue;
                }
                let ratio = self.rhs[i] / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br - PIVOT_EPS || (ratio <= br + PIVOT_EPS && self.basis[i] < self.basis[bi]) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            let Some((r, _)) = leave else { return false };
            self.pivot(r, c, reduced, value);
        }
    }
}

/// Two-phase simplex on a [`StandardLp`]. The returned point is a basic
/// (vertex) solution; identical inputs give bitwise-identical outputs.
pub fn solve_standard(lp: &StandardLp) -> StandardOutcome {
    let n = lp.objective.len();
    let m = lp.le.len() + lp.eq.len();
    let mut slack_cols = 0;
    let mut art_cols = 0;
    for (_, b) in &lp.le {
        slack_cols += 1;
        if *b < 0.0 {
            art_cols += 1;
        }
    }
    art_cols += lp.eq.len();
    let cols = n + slack_cols + art_cols;
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_slack = n;
    let mut next_art = n + slack_cols;
    for (a, b) in &lp.le {
        let mut row = vec![0.0; cols];
        let sign = if *b < 0.0 { -1.0 } else { 1.0 };
        for (v, &ai) in row.iter_mut().zip(a) {
            *v = sign * ai;
        }
        row[next_slack] = sign;
        if sign > 0.0 {
            basis.push(next_slack);
        } else {
            row[next_art] = 1.0;
            basis.push(next_art);
            next_art += 1;
        }
        next_slack += 1;
        rows.push(row);
        rhs.push(sign * b);
    }
    for (a, b) in &lp.eq {
        let mut row = vec![0.0; cols];
        let sign = if *b < 0.0 { -1.0 } else { 1.0 };
        for (v, &ai) in row.iter_mut().zip(a) {
            *v = sign * ai;
        }
        row[next_art] = 1.0;
        basis.push(next_art);
        next_art += 1;
        rows.push(row);
        rhs.push(sign * b);
    }
    let first_art = n + slack_cols;
    let mut tab = Tableau { rows, rhs, basis, cols };
    let mut allowed = vec![true; cols];

    if art_cols > 0 {
        let cost: Vec<f64> = (0..cols).map(|j| if j >= first_art { -1.0 } else { 0.0 }).collect();
        let (mut reduced, mut value) = tab.price(&cost);
        tab.optimize(&mut reduced, &mut value, &allowed);
        let scale = 1.0 + tab.rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        if value < -FEAS_EPS * scale {
            return StandardOutcome::Infeasible;
        }
        // drive remaining (zero-level) artificials out of the basis
        let mut r = 0;
        while r < tab.rows.len() {
            if tab.basis[r] >= first_art {
                let col = (0..first_art).find(|&j| tab.rows[r][j].abs() > PIVOT_EPS);
                match col {
                    Some(c) => {
                        let mut dummy = vec![0.0; cols];
                        let mut dv = 0.0;
                        tab.pivot(r, c, &mut dummy, &mut dv);
                    }
                    None => {
                        tab.rows.remove(r);
                        tab.rhs.remove(r);
                        tab.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        for a in allowed.iter_mut().skip(first_art) {
            *a = false;
        }
    }

    let mut cost = vec![0.0; cols];
    cost[..n].copy_from_slice(&lp.objective);
    let (mut reduced, mut value) = tab.price(&cost);
    if !tab.optimize(&mut reduced, &mut value, &allowed) {
        return StandardOutcome::Unbounded;
    }
    let mut x = vec![0.0; n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rhs[i].max(0.0);
        }
    }
    let value = x.iter().zip(&lp.objective).map(|(a, b)| a * b).sum();
    StandardOutcome::Optimal { x, value }
}

fn check_dims(len: usize, hs: &[Halfspace]) -> Result<()> {
    if len < 2 {
        return Err(Error::InvalidArgument(format!("need at least two leader actions, got {len}")));
    }
    if let Some(h) = hs.iter().find(|h| h.normal.len() != len) {
        return Err(Error::ShapeMismatch(format!(
            "halfspace of length {} over a {len}-simplex",
            h.normal.len()
        )));
    }
    if hs.iter().any(|h| h.normal.iter().any(|v| !v.is_finite())) {
        return Err(Error::InvalidArgument("non-finite halfspace normal".into()));
    }
    Ok(())
}

/// Maximizes `<c, x>` over the simplex intersected with `hs`.
pub fn lp_maximize(c: &[f64], hs: &[Halfspace]) -> Result<LpResult> {
    check_dims(c.len(), hs)?;
    let l = c.len();
    let mut lp = StandardLp { objective: c.to_vec(), ..Default::default() };
    for h in hs {
        if let Some(d) = h.normalized() {
            lp.le.push((d.iter().map(|v| -v).collect(), 0.0));
        }
    }
    lp.eq.push((vec![1.0; l], 1.0));
    Ok(match solve_standard(&lp) {
        StandardOutcome::Optimal { x, .. } => {
            let x = MixedStrategy::from_solver(x);
            let value = x.dot(c);
            LpResult { status: LpStatus::Optimal, x: Some(x), value, is_vertex: true }
        }
        StandardOutcome::Infeasible | StandardOutcome::Unbounded => LpResult::infeasible(),
    })
}

/// A weakly feasible point and its normalized slack.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasiblePoint {
    pub x: MixedStrategy,
    /// `min` over unit normals and simplex facets of `<x, d>` at the
    /// max-slack point; `0` for boundary-only sets, `+inf` when `hs` has no
    /// nonzero normal.
    pub slack: f64,
}

/// Maximum-slack point of the simplex intersected with `hs`.
///
/// Maximizes `t` subject to `<x, d/|d|> >= t` for every nonzero normal and
/// `x(l) >= t`, so any full-dimensional set yields a strictly interior
/// witness. `None` when the weak-inequality set is empty.
pub fn lp_feasible_point(l: usize, hs: &[Halfspace]) -> Result<Option<FeasiblePoint>> {
    check_dims(l, hs)?;
    let normals: Vec<Vec<f64>> = hs.iter().filter_map(Halfspace::normalized).collect();
    if normals.is_empty() {
        return Ok(Some(FeasiblePoint { x: MixedStrategy::uniform(l), slack: f64::INFINITY }));
    }
    // variables (x, tau) with tau = t + 1 >= 0; every row has <x, d> >= -1 on the simplex
    let mut lp = StandardLp { objective: vec![0.0; l + 1], ..Default::default() };
    lp.objective[l] = 1.0;
    let row = |d: &[f64]| -> (Vec<f64>, f64) {
        let mut r: Vec<f64> = d.iter().map(|v| -v).collect();
        r.push(1.0);
        (r, 1.0)
    };
    for d in &normals {
        lp.le.push(row(d));
    }
    for k in 0..l {
        let mut e = vec![0.0; l];
        e[k] = 1.0;
        lp.le.push(row(&e));
    }
    let mut cap = vec![0.0; l + 1];
    cap[l] = 1.0;
    lp.le.push((cap, 2.0));
    let mut sum = vec![1.0; l + 1];
    sum[l] = 0.0;
    lp.eq.push((sum, 1.0));
    let StandardOutcome::Optimal { x, .. } = solve_standard(&lp) else {
        return Ok(None);
    };
    let point = MixedStrategy::from_solver(x[..l].to_vec());
    let slack = normals
        .iter()
        .map(|d| point.dot(d))
        .chain(point.probs().iter().copied())
        .fold(f64::INFINITY, f64::min);
    if slack < -FEAS_EPS {
        return Ok(None);
    }
    Ok(Some(FeasiblePoint { x: point, slack: slack.max(0.0) }))
}
