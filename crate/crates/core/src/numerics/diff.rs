use crate::error::{Error, Result};

/// Derivative order supported by [`central_diff`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffOrder {
    First,
    Second,
}

/// Default step: `max(|x|, 1)·ε^(1/3)` for first derivatives and
/// `max(|x|, 1)·ε^(1/4)` for second derivatives.
pub fn default_step(x: f64, order: DiffOrder) -> f64 {
    let scale = x.abs().max(1.0);
    match order {
        DiffOrder::First => scale * f64::EPSILON.cbrt(),
        DiffOrder::Second => scale * f64::EPSILON.powf(0.25),
    }
}

/// Central finite difference of `f` at `x` with the default step.
pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64, order: DiffOrder) -> Result<f64> {
    central_diff_step(f, x, order, default_step(x, order))
}

pub fn central_diff_step<F: Fn(f64) -> f64>(f: F, x: f64, order: DiffOrder, h: f64) -> Result<f64> {
    // exactly representable step
    let h = (x + h) - x;
    let plus = checked(&f, x + h)?;
    let minus = checked(&f, x - h)?;
    let d = match order {
        DiffOrder::First => (plus - minus) / (2.0 * h),
        DiffOrder::Second => {
            let mid = checked(&f, x)?;
            (plus - 2.0 * mid + minus) / (h * h)
        }
    };
    if d.is_finite() {
        Ok(d)
    } else {
        Err(Error::NonFinite { x })
    }
}

fn checked<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::NonFinite { x })
    }
}
