//! Central differences with one Richardson step.

use crate::error::{Error, Result};

/// `f'(x)` from central differences at steps `h` and `h/2`, combined to
/// cancel the leading `O(h^2)` term.
pub fn richardson<F>(mut f: F, x: f64, h: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain { what: "difference step", value: h });
    }
    let mut central = |step: f64| -> Result<f64> { Ok((f(x + step)? - f(x - step)?) / (2.0 * step)) };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_functions() {
        let d = richardson(|x| Ok(x.sin()), 0.7, 1e-3).unwrap();
        assert!((d - 0.7f64.cos()).abs() < 1e-12);
        let d = richardson(|x| Ok(x.powi(5)), 1.3, 1e-2).unwrap();
        assert!((d - 5.0 * 1.3f64.powi(4)).abs() < 1e-8);
        assert!(richardson(|x| Ok(x), 0.0, 0.0).is_err());
    }
}
