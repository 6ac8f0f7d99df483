use super::{wrong_feedback, Feedback, FeedbackMode, Learner, Play};
use crate::error::{Error, Result};
use crate::game::{checked_count, decode_profile, MixedStrategy, PublicView, ResponseTable};
use crate::geometry::{enumerate_regions, region_vertices, BestResponseMapping};

/// Largest loss-vector dimension `K^n`.
pub const OFUL_CAP: usize = 4096;
const LAMBDA: f64 = 1.0;
/// Bound on the norm of the unknown parameter (the type distribution).
const PARAM_BOUND: f64 = 1.0;
/// Bound on the observation noise.
const NOISE_BOUND: f64 = 1.0;
const DEDUP: f64 = 1e-12;

fn profile_dim(view: &PublicView) -> Result<usize> {
    let s = view.sizes();
    checked_count(s.types, s.followers, OFUL_CAP)
}

/// Loss vector of `x`: entry `theta` is `-u(x, br(x, theta))`.
pub fn phi_map(view: &PublicView, x: &MixedStrategy) -> Result<Vec<f64>> {
    let s = view.sizes();
    let d = profile_dim(view)?;
    let table = ResponseTable::new(view, x);
    Ok((0..d)
        .map(|idx| {
            let theta = decode_profile(idx, s.followers, s.types);
            -view.leader_mixed(x, &table.respond(view, x, &theta, None))
        })
        .collect())
}

/// Loss vector of `x` played inside the region of `w`: entry `theta` is
/// `-u(x, W(theta))`.
pub fn region_phi(view: &PublicView, x: &MixedStrategy, w: &BestResponseMapping) -> Result<Vec<f64>> {
    let s = view.sizes();
    let d = profile_dim(view)?;
    Ok((0..d)
        .map(|idx| -view.leader_mixed(x, &w.joint_action(&decode_profile(idx, s.followers, s.types))))
        .collect())
}

/// Ridge-regression state of the optimistic linear bandit over a finite
/// arm set.
#[derive(Debug, Clone)]
pub struct OfulState {
    dim: usize,
    gram: Vec<f64>,
    gram_inv: Vec<f64>,
    response: Vec<f64>,
    log_det: f64,
    delta: f64,
    arms: Vec<Vec<f64>>,
    /// `phi_a^T V^-1 phi_a` per arm.
    widths: Vec<f64>,
}

impl OfulState {
    pub fn new(dim: usize, arms: Vec<Vec<f64>>, delta: f64) -> Self {
        let mut gram = vec![0.0; dim * dim];
        for i in 0..dim {
            gram[i * dim + i] = LAMBDA;
        }
        let gram_inv: Vec<f64> = gram.iter().map(|v| v / (LAMBDA * LAMBDA)).collect();
        let widths = arms.iter().map(|a| a.iter().map(|v| v * v).sum::<f64>() / LAMBDA).collect();
        Self {
            dim,
            gram,
            gram_inv,
            response: vec![0.0; dim],
            log_det: dim as f64 * LAMBDA.ln(),
            delta,
            arms,
            widths,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `V = lambda I + sum phi phi^T`, row-major.
    pub fn gram(&self) -> &[f64] {
        &self.gram
    }

    pub fn arms(&self) -> &[Vec<f64>] {
        &self.arms
    }

    /// Ridge estimate `V^-1 b`.
    pub fn estimate(&self) -> Vec<f64> {
        let d = self.dim;
        (0..d)
            .map(|i| (0..d).map(|j| self.gram_inv[i * d + j] * self.response[j]).sum())
            .collect()
    }

    /// Confidence radius of the ellipsoid around the estimate.
    pub fn radius(&self) -> f64 {
        let inner = self.log_det - self.dim as f64 * LAMBDA.ln() + 2.0 * (1.0 / self.delta).ln();
        NOISE_BOUND * inner.max(0.0).sqrt() + LAMBDA.sqrt() * PARAM_BOUND
    }

    /// Arm with the smallest optimistic loss `<phi, est> - radius |phi|_{V^-1}`;
    /// the lowest index wins ties.
    pub fn select(&self) -> usize {
        let est = self.estimate();
        let beta = self.radius();
        let mut best = 0;
        let mut best_loss = f64::INFINITY;
        for (a, (phi, w)) in self.arms.iter().zip(&self.widths).enumerate() {
            let mean: f64 = phi.iter().zip(&est).map(|(p, e)| p * e).sum();
            let loss = mean - beta * w.max(0.0).sqrt();
            if loss < best_loss {
                best_loss = loss;
                best = a;
            }
        }
        best
    }

    /// Rank-one update with the played arm and its observed loss.
    pub fn update(&mut self, arm: usize, loss: f64) {
        let d = self.dim;
        let phi = self.arms[arm].clone();
        let w: Vec<f64> = (0..d)
            .map(|i| (0..d).map(|j| self.gram_inv[i * d + j] * phi[j]).sum())
            .collect();
        let s: f64 = phi.iter().zip(&w).map(|(a, b)| a * b).sum();
        let denom = 1.0 + s;
        for i in 0..d {
            for j in 0..d {
                self.gram_inv[i * d + j] -= w[i] * w[j] / denom;
                self.gram[i * d + j] += phi[i] * phi[j];
            }
            self.response[i] += loss * phi[i];
        }
        self.log_det += denom.ln();
        for (a, width) in self.arms.iter().zip(self.widths.iter_mut()) {
            let proj: f64 = a.iter().zip(&w).map(|(x, y)| x * y).sum();
            *width -= proj * proj / denom;
        }
    }
}

#[derive(Debug, Clone)]
struct Arm {
    strategy: MixedStrategy,
    mapping: BestResponseMapping,
}

/// Optimistic linear bandit over the loss vectors of all region vertices.
#[derive(Debug, Clone, Default)]
pub struct LinBandit {
    arms: Vec<Arm>,
    state: Option<OfulState>,
}

impl LinBandit {
    pub fn state(&self) -> Option<&OfulState> {
        self.state.as_ref()
    }

    pub fn arm_strategies(&self) -> Vec<&MixedStrategy> {
        self.arms.iter().map(|a| &a.strategy).collect()
    }
}

impl Learner for LinBandit {
    fn name(&self) -> &'static str {
        "linbandit"
    }

    fn accepts(&self, mode: FeedbackMode) -> bool {
        mode == FeedbackMode::Action
    }

    fn reset(&mut self, view: &PublicView, horizon: usize) -> Result<()> {
        let dim = profile_dim(view)?;
        let mut arms = Vec::new();
        let mut phis: Vec<Vec<f64>> = Vec::new();
        for region in enumerate_regions(view)? {
            for v in region_vertices(&region) {
                let phi = region_phi(view, &v, &region.mapping)?;
                let dup = phis
                    .iter()
                    .any(|p| p.iter().zip(&phi).all(|(a, b)| (a - b).abs() <= DEDUP));
                if !dup {
                    phis.push(phi);
                    arms.push(Arm { strategy: v, mapping: region.mapping.clone() });
                }
            }
        }
        if arms.is_empty() {
            return Err(Error::Infeasible);
        }
        self.arms = arms;
        self.state = Some(OfulState::new(dim, phis, 1.0 / horizon.max(1) as f64));
        Ok(())
    }

    fn choose(&self) -> Play {
        let state = self.state.as_ref().expect("choose called before reset");
        let arm = &self.arms[state.select()];
        Play { strategy: arm.strategy.clone(), target: Some(arm.mapping.clone()) }
    }

    fn observe(&mut self, feedback: &Feedback) -> Result<()> {
        let Feedback::Action { realized_utility, .. } = feedback else {
            return Err(wrong_feedback(self.name(), feedback));
        };
        let state = self
            .state
            .as_mut()
            .ok_or_else(|| Error::InvalidArgument("learner used before reset".into()))?;
        let arm = state.select();
        state.update(arm, -realized_utility);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_round_is_pure_exploration() {
        let arms = vec![vec![-1.0, 0.0], vec![-1.0, -1.0], vec![0.0, -0.5]];
        let state = OfulState::new(2, arms, 0.01);
        assert!(state.estimate().iter().all(|&v| v == 0.0));
        assert_eq!(state.select(), 1);
    }

    #[test]
    fn sherman_morrison_tracks_inverse() {
        let arms = vec![vec![-1.0, 0.0], vec![-0.3, -0.7]];
        let mut state = OfulState::new(2, arms, 0.01);
        for t in 0..20 {
            state.update(t % 2, -0.5);
        }
        let d = 2;
        for i in 0..d {
            for j in 0..d {
                let prod: f64 = (0..d).map(|k| state.gram[i * d + k] * state.gram_inv[k * d + j]).sum();
                assert!((prod - if i == j { 1.0 } else { 0.0 }).abs() < 1e-10);
            }
        }
        for (a, w) in state.arms.iter().zip(&state.widths) {
            let direct: f64 = (0..d)
                .map(|i| (0..d).map(|j| a[i] * state.gram_inv[i * d + j] * a[j]).sum::<f64>())
                .sum();
            assert!((direct - w).abs() < 1e-10);
        }
    }
}
