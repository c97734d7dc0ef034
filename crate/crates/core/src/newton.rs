//! Damped Newton iteration on small square systems with a central-difference
//! Jacobian.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonConfig {
    /// Converged when the max-norm of the residual drops below this.
    pub tol: f64,
    /// A stalled line search still counts as success below this.
    pub accept: f64,
    pub max_iter: usize,
    pub fd_step: f64,
    pub max_halvings: usize,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self { tol: 1e-9, accept: 1e-9, max_iter: 50, fd_step: 1e-7, max_halvings: 30 }
    }
}

impl NewtonConfig {
    /// Tighter settings for solves nested inside another solve's residual.
    pub fn inner() -> Self {
        Self { tol: 1e-14, accept: 1e-11, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOutcome {
    pub x: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NewtonError {
    #[error("residual cannot be evaluated at the starting point")]
    InvalidStart,
    #[error("no convergence after {iterations} iterations (residual {residual_norm:e}) at {iterate:?}")]
    Diverged { iterate: Vec<f64>, residual_norm: f64, iterations: usize },
    #[error("line search underflow after {iterations} iterations (residual {residual_norm:e}) at {iterate:?}")]
    StepUnderflow { iterate: Vec<f64>, residual_norm: f64, iterations: usize },
    #[error("singular Jacobian at {iterate:?}")]
    SingularJacobian { iterate: Vec<f64> },
}

impl NewtonError {
    pub fn iterate(&self) -> Option<&[f64]> {
        match self {
            NewtonError::InvalidStart => None,
            NewtonError::Diverged { iterate, .. }
            | NewtonError::StepUnderflow { iterate, .. }
            | NewtonError::SingularJacobian { iterate } => Some(iterate),
        }
    }

    pub fn residual_norm(&self) -> Option<f64> {
        match self {
            NewtonError::Diverged { residual_norm, .. } | NewtonError::StepUnderflow { residual_norm, .. } => {
                Some(*residual_norm)
            }
            _ => None,
        }
    }
}

pub fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solves `f(x) = 0`. `f` returns `None` outside its domain; such points are
/// rejected by the line search like any other non-improving step.
pub fn solve<F>(f: F, x0: &[f64], cfg: &NewtonConfig) -> Result<NewtonOutcome, NewtonError>
where
    F: Fn(&[f64]) -> Option<Vec<f64>>,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x).filter(|v| v.iter().all(|c| c.is_finite())).ok_or(NewtonError::InvalidStart)?;
    let mut norm = max_norm(&fx);
    for iteration in 0..cfg.max_iter {
        if norm < cfg.tol {
            return Ok(NewtonOutcome { x, residual_norm: norm, iterations: iteration });
        }
        let jac = jacobian(&f, &x, cfg.fd_step).ok_or_else(|| NewtonError::SingularJacobian { iterate: x.clone() })?;
        let step = jac
            .lu()
            .solve(&DVector::from_iterator(n, fx.iter().map(|v| -v)))
            .filter(|s| s.iter().all(|c| c.is_finite()))
            .ok_or_else(|| NewtonError::SingularJacobian { iterate: x.clone() })?;
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=cfg.max_halvings {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(xi, si)| xi + lambda * si).collect();
            if let Some(ft) = f(&trial).filter(|v| v.iter().all(|c| c.is_finite())) {
                let tn = max_norm(&ft);
                if tn < norm {
                    accepted = Some((trial, ft, tn));
                    break;
                }
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((xt, ft, tn)) => {
                x = xt;
                fx = ft;
                norm = tn;
            }
            None if norm < cfg.accept => {
                return Ok(NewtonOutcome { x, residual_norm: norm, iterations: iteration });
            }
            None => return Err(NewtonError::StepUnderflow { iterate: x, residual_norm: norm, iterations: iteration }),
        }
    }
    if norm < cfg.accept {
        return Ok(NewtonOutcome { x, residual_norm: norm, iterations: cfg.max_iter });
    }
    Err(NewtonError::Diverged { iterate: x, residual_norm: norm, iterations: cfg.max_iter })
}

fn jacobian<F>(f: &F, x: &[f64], h: f64) -> Option<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Option<Vec<f64>>,
{
    let n = x.len();
    let mut jac = DMatrix::zeros(n, n);
    let base = f(x)?;
    for j in 0..n {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[j] += h;
        xm[j] -= h;
        // Fall back to a one-sided difference at the edge of the domain.
        let column: Vec<f64> = match (f(&xp), f(&xm)) {
            (Some(p), Some(m)) => p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * h)).collect(),
            (Some(p), None) => p.iter().zip(&base).map(|(a, b)| (a - b) / h).collect(),
            (None, Some(m)) => base.iter().zip(&m).map(|(a, b)| (a - b) / h).collect(),
            (None, None) => return None,
        };
        for (i, v) in column.into_iter().enumerate() {
            jac[(i, j)] = v;
        }
    }
    Some(jac)
}
