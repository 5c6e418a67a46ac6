//! Damped Newton solvers for one or two complex unknowns with
//! finite-difference Jacobians (the residuals of interest are holomorphic,
//! so a central difference along the real direction gives the complex
//! derivative).

use num_complex::Complex64;

use crate::error::{BifError, Result};
use crate::tol;

fn fd_step(x: Complex64) -> f64 {
    tol::FD_STEP * (1.0 + x.norm())
}

/// Newton iteration for a single holomorphic equation `f(x) = 0`.
pub fn newton_1c<F>(f: F, x0: Complex64, tol_abs: f64, max_iter: u32) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut x = x0;
    let mut fx = f(x)?;
    for _ in 0..max_iter {
        if fx.norm() < tol_abs {
            return Ok(x);
        }
        let h = fd_step(x);
        let fp = f(x + Complex64::new(h, 0.0))?;
        let fm = f(x - Complex64::new(h, 0.0))?;
        let df = (fp - fm) / (2.0 * h);
        if !df.is_finite() || df.norm() < 1e-300 {
            return Err(BifError::Budget("newton_1c: vanishing derivative".into()));
        }
        let full = fx / df;
        // damped line search on the residual norm
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..8 {
            let cand = x - lambda * full;
            if let Ok(fc) = f(cand) {
                if fc.norm() < fx.norm() {
                    x = cand;
                    fx = fc;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(BifError::Budget("newton_1c: stagnated".into()));
        }
    }
    if fx.norm() < tol_abs {
        Ok(x)
    } else {
        Err(BifError::Budget(format!(
            "newton_1c: residual {} above tolerance {tol_abs}",
            fx.norm()
        )))
    }
}

/// Converged solution of a 2x2 complex system.
#[derive(Debug, Clone, Copy)]
pub struct Newton2 {
    pub x: Complex64,
    pub y: Complex64,
    /// Max-norm of the final residual pair.
    pub residual: f64,
    /// Rough infinity-norm condition estimate of the last Jacobian.
    pub condition: f64,
    pub iterations: u32,
}

fn res_norm(f: (Complex64, Complex64)) -> f64 {
    f.0.norm().max(f.1.norm())
}

/// Damped Newton for `F(x, y) = 0`, two holomorphic equations in two
/// complex unknowns, Jacobian by central finite differences with step
/// `1e-6 (1 + |coordinate|)`.
pub fn newton_2c<F>(
    f: F,
    x0: Complex64,
    y0: Complex64,
    tol_abs: f64,
    max_iter: u32,
) -> Result<Newton2>
where
    F: Fn(Complex64, Complex64) -> Result<(Complex64, Complex64)>,
{
    let mut x = x0;
    let mut y = y0;
    let mut fxy = f(x, y)?;
    let mut condition = f64::INFINITY;
    for it in 0..max_iter {
        if res_norm(fxy) < tol_abs {
            return Ok(Newton2 {
                x,
                y,
                residual: res_norm(fxy),
                condition,
                iterations: it,
            });
        }
        let hx = fd_step(x);
        let hy = fd_step(y);
        let fpx = f(x + Complex64::new(hx, 0.0), y)?;
        let fmx = f(x - Complex64::new(hx, 0.0), y)?;
        let fpy = f(x, y + Complex64::new(hy, 0.0))?;
        let fmy = f(x, y - Complex64::new(hy, 0.0))?;
        let a = (fpx.0 - fmx.0) / (2.0 * hx);
        let c_ = (fpx.1 - fmx.1) / (2.0 * hx);
        let b = (fpy.0 - fmy.0) / (2.0 * hy);
        let d = (fpy.1 - fmy.1) / (2.0 * hy);
        let det = a * d - b * c_;
        if !det.is_finite() || det.norm() < 1e-300 {
            return Err(BifError::Budget("newton_2c: singular Jacobian".into()));
        }
        // Cramer step
        let dx = (fxy.0 * d - b * fxy.1) / det;
        let dy = (a * fxy.1 - fxy.0 * c_) / det;
        // condition estimate: ||J||_inf * ||J^-1||_inf
        let jn = (a.norm() + b.norm()).max(c_.norm() + d.norm());
        let jin = ((d.norm() + b.norm()).max(c_.norm() + a.norm())) / det.norm();
        condition = jn * jin;

        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..10 {
            let cand = (x - lambda * dx, y - lambda * dy);
            if let Ok(fc) = f(cand.0, cand.1) {
                if res_norm(fc) < res_norm(fxy) {
                    x = cand.0;
                    y = cand.1;
                    fxy = fc;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(BifError::Budget(format!(
                "newton_2c: stagnated at residual {}",
                res_norm(fxy)
            )));
        }
    }
    if res_norm(fxy) < tol_abs {
        Ok(Newton2 {
            x,
            y,
            residual: res_norm(fxy),
            condition,
            iterations: max_iter,
        })
    } else {
        Err(BifError::Budget(format!(
            "newton_2c: residual {} above tolerance {tol_abs}",
            res_norm(fxy)
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn newton_1c_square_root() {
        // x^2 = 2 + i
        let target = c(2.0, 1.0);
        let x = newton_1c(|x| Ok(x * x - target), c(1.0, 1.0), 1e-13, 50).unwrap();
        assert!((x * x - target).norm() < 1e-12);
    }

    #[test]
    fn newton_2c_coupled_system_converges() {
        // x^2 + y = 3, x + y^2 = 5
        let sol = newton_2c(
            |x, y| Ok((x * x + y - c(3.0, 0.0), x + y * y - c(5.0, 0.0))),
            c(1.0, 0.5),
            c(2.0, -0.5),
            1e-13,
            80,
        )
        .unwrap();
        assert!(sol.residual < 1e-12);
        assert!(sol.condition.is_finite());
    }
}
