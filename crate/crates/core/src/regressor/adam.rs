use crate::error::{invalid, Error, Result};
use crate::real::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<T: Real> {
    pub beta1: T,
    pub beta2: T,
    pub eps: T,
    m: Vec<T>,
    v: Vec<T>,
    step: u64,
}

impl<T: Real> AdamState<T> {
    /// β1 = 0.9, β2 = 0.999, ε = 1e-8.
    pub fn new(len: usize) -> Self {
        Self {
            beta1: T::lit(0.9),
            beta2: T::lit(0.999),
            eps: T::lit(1e-8),
            m: vec![T::zero(); len],
            v: vec![T::zero(); len],
            step: 0,
        }
    }

    pub fn steps(&self) -> u64 {
        self.step
    }
}

/// One bias-corrected Adam update, in place. Non-finite gradients leave the
/// parameters and state untouched and report divergence (epoch 0; callers
/// that know the epoch replace it).
pub fn adam_step<T: Real>(params: &mut [T], grads: &[T], state: &mut AdamState<T>, lr: T) -> Result<()> {
    if params.len() != grads.len() || params.len() != state.m.len() {
        return Err(invalid(format!(
            "adam: {} params, {} gradients, state for {}",
            params.len(),
            grads.len(),
            state.m.len()
        )));
    }
    if let Some(i) = grads.iter().position(|g| !g.is_finite()) {
        return Err(Error::TrainingDiverged {
            epoch: 0,
            reason: format!("non-finite gradient at parameter {i}"),
        });
    }
    state.step += 1;
    let (b1, b2) = (state.beta1, state.beta2);
    let t = state.step as i32;
    let c1 = T::one() - b1.powi(t);
    let c2 = T::one() - b2.powi(t);
    for ((p, &g), (m, v)) in params.iter_mut().zip(grads).zip(state.m.iter_mut().zip(state.v.iter_mut())) {
        *m = b1 * *m + (T::one() - b1) * g;
        *v = b2 * *v + (T::one() - b2) * g * g;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        *p -= lr * m_hat / (v_hat.sqrt() + state.eps);
    }
    Ok(())
}
