//! Parameter-space potentials `G^+`, `G^-`, the Lyapunov exponent, locus
//! classification, the marking involution, the escape invariant
//! `phi_minus` with branch bookkeeping, and the near-infinity chart.

use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::{bottcher_product, find_attracting_cycle, green_dynamical, CubicParam, GreenResult};
use crate::error::{BifError, Result};
use crate::tol;

/// `G^+(c,v) = G_f(c)`: Green function at the marked critical point `+c`.
pub fn green_plus(p: &CubicParam, budget: u32) -> GreenResult {
    green_dynamical(p, p.c, budget)
}

/// `G^-(c,v) = G_f(-c)`.
pub fn green_minus(p: &CubicParam, budget: u32) -> GreenResult {
    green_dynamical(p, -p.c, budget)
}

/// Lyapunov exponent of the equilibrium measure: `log 3 + G^+ + G^-`.
pub fn lyapunov(p: &CubicParam, budget: u32) -> f64 {
    3f64.ln() + green_plus(p, budget).value + green_minus(p, budget).value
}

/// The involution exchanging the marking of the critical points:
/// `(c, v) -> (-c, v + 4c^3)`. Applying it twice returns the parameter
/// up to rounding of `v + 4c^3 - 4c^3`.
pub fn marking_involution(p: &CubicParam) -> CubicParam {
    CubicParam::new(-p.c, p.v + 4.0 * p.c * p.c * p.c)
}

/// Locus membership by boundedness of the two critical orbits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LocusClass {
    /// Both critical orbits bounded (connectedness locus).
    Connectedness,
    /// `+c` bounded, `-c` escapes.
    PlusOnly,
    /// `-c` bounded, `+c` escapes.
    MinusOnly,
    /// Both escape (shift locus).
    Shift,
}

/// How a critical orbit resolved within the budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OrbitFate {
    /// Certified past the escape radius.
    Escapes,
    /// Visibly converged to a cycle of the given period.
    Stabilizes { period: u32 },
    /// Neither escaped nor stabilized: boundedness is assumed for
    /// classification but reported as undecided.
    Undecided,
}

/// Classification plus per-orbit certificates.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LocusReport {
    pub class: LocusClass,
    pub plus: OrbitFate,
    pub minus: OrbitFate,
}

impl LocusReport {
    /// True when some orbit neither escaped nor visibly stabilized; the
    /// classification is then budget-limited rather than certified.
    pub fn borderline(&self) -> bool {
        self.plus == OrbitFate::Undecided || self.minus == OrbitFate::Undecided
    }
}

fn orbit_fate(p: &CubicParam, z: Complex64, budget: u32) -> OrbitFate {
    let g = green_dynamical(p, z, budget);
    if g.escaped {
        return OrbitFate::Escapes;
    }
    match find_attracting_cycle(p, z, budget) {
        Some(cyc) => OrbitFate::Stabilizes { period: cyc.period },
        None => OrbitFate::Undecided,
    }
}

/// Classifies `p` into the connectedness/escape/shift strata by the
/// boundedness flags of the two critical orbits.
pub fn classify_locus(p: &CubicParam, budget: u32) -> LocusReport {
    let plus = orbit_fate(p, p.c, budget);
    let minus = orbit_fate(p, -p.c, budget);
    let class = match (plus == OrbitFate::Escapes, minus == OrbitFate::Escapes) {
        (false, false) => LocusClass::Connectedness,
        (false, true) => LocusClass::PlusOnly,
        (true, false) => LocusClass::MinusOnly,
        (true, true) => LocusClass::Shift,
    };
    LocusReport { class, plus, minus }
}

/// `max(G^+, G^-)`, the potential of the bifurcation measure.
pub fn max_green(p: &CubicParam, budget: u32) -> f64 {
    green_plus(p, budget).value.max(green_minus(p, budget).value)
}

/// Near-infinity coordinates `(x, y) = (1/c, v/c)`.
pub fn near_infinity_coords(p: &CubicParam) -> Result<(Complex64, Complex64)> {
    if p.c.norm() == 0.0 {
        return Err(BifError::Degenerate(
            "near_infinity_coords: c = 0 has no chart image".into(),
        ));
    }
    Ok((p.c.inv(), p.v / p.c))
}

/// Inverse chart `(x, y) -> (1/x, y/x)`.
pub fn from_near_infinity(x: Complex64, y: Complex64) -> Result<CubicParam> {
    if x.norm() == 0.0 {
        return Err(BifError::Degenerate(
            "from_near_infinity: x = 0 is the line at infinity".into(),
        ));
    }
    Ok(CubicParam::new(x.inv(), y / x))
}

/// Value of the escape invariant `phi_minus = phi_f(2c)` together with its
/// branch bookkeeping.
///
/// When `G^+ >= G^-` the invariant itself is ambiguous; the quantity
/// computed without ambiguity is `(phi_minus)^{3^j}` (the Bottcher
/// coordinate evaluated at `f^j(2c)`), and the stored `value` is the
/// `3^j`-th root branch continued from a large-`|c|` reference parameter.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhiMinusValue {
    pub value: Complex64,
    /// Branch power level `j`: `value^{3^j}` is unambiguous.
    pub power_level: u32,
    /// Reference parameter the branch was continued from (`p` itself when
    /// `j = 0`).
    pub branch_basepoint: CubicParam,
}

/// Smallest power level `j` at which `(phi_minus)^{3^j}` is computable at
/// `p`, with that unambiguous value.
fn phi_power_level(p: &CubicParam, budget: u32) -> Result<(u32, Complex64)> {
    let gm = green_minus(p, budget);
    if !gm.escaped {
        return Err(BifError::Domain(
            "phi_minus: orbit of -c does not escape".into(),
        ));
    }
    let gp = green_plus(p, budget);
    let mut last_branch_err = None;
    let mut w = 2.0 * p.c; // cocritical point, G(2c) = G(-c)
    let mut level_green = gm.value;
    for j in 0..=tol::PHI_MINUS_J_MAX {
        if level_green > gp.value + gp.error_bound.min(1e-9) {
            match bottcher_product(p, w) {
                Ok(phi) if phi.is_finite() && phi.norm() > 0.0 => return Ok((j, phi)),
                Ok(_) => {
                    last_branch_err =
                        Some(BifError::Branch("phi_minus: degenerate product value".into()))
                }
                Err(e) => last_branch_err = Some(e),
            }
        }
        w = p.eval(w);
        level_green *= 3.0;
    }
    Err(last_branch_err.unwrap_or_else(|| {
        BifError::Domain(format!(
            "phi_minus: G+ = {} >= 3^j G- for all j <= {}",
            gp.value,
            tol::PHI_MINUS_J_MAX
        ))
    }))
}

/// All `3^j`-th roots of `pow_val`; returns the one nearest `target`
/// together with the branch separation at that modulus.
fn nearest_root(pow_val: Complex64, j: u32, target: Complex64) -> (Complex64, f64) {
    let order = 3f64.powi(j as i32);
    let modulus = (pow_val.norm().ln() / order).exp();
    let base_arg = pow_val.arg() / order;
    let tau = 2.0 * std::f64::consts::PI / order;
    // nearest branch index from the target's argument
    let m = ((target.arg() - base_arg) / tau).round();
    let mut best = Complex64::from_polar(modulus, base_arg + m * tau);
    let mut best_d = (best - target).norm();
    for dm in [-1.0, 1.0] {
        let cand = Complex64::from_polar(modulus, base_arg + (m + dm) * tau);
        let d = (cand - target).norm();
        if d < best_d {
            best = cand;
            best_d = d;
        }
    }
    let separation = if order > 1.0 {
        2.0 * modulus * (std::f64::consts::PI / order).sin()
    } else {
        f64::INFINITY
    };
    (best, separation)
}

/// `phi_minus` with the branch chosen by proximity to `hint` (a value at a
/// nearby parameter). Cheap: no continuation path is walked. Fails if the
/// hint sits near the midpoint between branches.
pub fn phi_minus_with_hint(
    p: &CubicParam,
    hint: Complex64,
    budget: u32,
) -> Result<PhiMinusValue> {
    let (j, pow_val) = phi_power_level(p, budget)?;
    if j == 0 {
        return Ok(PhiMinusValue {
            value: pow_val,
            power_level: 0,
            branch_basepoint: *p,
        });
    }
    let (value, separation) = nearest_root(pow_val, j, hint);
    if (value - hint).norm() > 0.5 * separation {
        return Err(BifError::Branch(format!(
            "phi_minus_with_hint: hint {hint} is ambiguous at power level {j}"
        )));
    }
    Ok(PhiMinusValue {
        value,
        power_level: j,
        branch_basepoint: *p,
    })
}

/// The escape invariant `phi_minus(p) = phi_f(2c)`.
///
/// For `G^+ < G^-` the infinite product at `2c` applies directly. Otherwise
/// the unambiguous power `(phi_minus)^{3^j}` is computed and its root
/// branch is resolved by continuation along the ray `c -> mu c` (`v`
/// fixed) from a reference parameter with `G^+ < G^-`, where
/// `phi_minus ~ 2^{2/3} c`. The straight real ray can skim a `G^-` valley
/// (a near miss of a minus curve) where the branch separations collapse;
/// in that case bulged complex rays around the valley are tried before
/// giving up.
pub fn phi_minus(p: &CubicParam, budget: u32) -> Result<PhiMinusValue> {
    let (j, pow_val) = phi_power_level(p, budget)?;
    if j == 0 {
        return Ok(PhiMinusValue {
            value: pow_val,
            power_level: 0,
            branch_basepoint: *p,
        });
    }
    if p.c.norm() == 0.0 {
        return Err(BifError::Degenerate("phi_minus: c = 0".into()));
    }

    // find a reference scale on the real ray where the invariant is
    // single-valued (power level 0)
    let mut lambda = 2.0;
    loop {
        let q = CubicParam::new(p.c * lambda, p.v);
        match phi_power_level(&q, budget) {
            Ok((0, _)) => break,
            _ => {
                lambda *= 2.0;
                if lambda > 4e7 {
                    return Err(BifError::Branch(
                        "phi_minus: no single-valued reference found on the c-ray".into(),
                    ));
                }
            }
        }
    }

    let mut last_err = None;
    for bulge in [0.0, 0.5, -0.5, 1.0, -1.0] {
        match walk_bulged_ray(p, budget, lambda, bulge, pow_val, j) {
            Ok(value) => {
                return Ok(PhiMinusValue {
                    value,
                    power_level: j,
                    branch_basepoint: CubicParam::new(p.c * lambda, p.v),
                })
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| BifError::Branch("phi_minus: continuation failed".into())))
}

/// Continues `phi_minus` from `lambda_ref * c` down to `c` along
/// `mu(tau) = exp(tau + i bulge sin(pi tau / tau_ref))`, adaptive in
/// `tau = ln lambda`, keeping consecutive values within half the local
/// branch separation.
fn walk_bulged_ray(
    p: &CubicParam,
    budget: u32,
    lambda_ref: f64,
    bulge: f64,
    pow_val: Complex64,
    j_final: u32,
) -> Result<Complex64> {
    let tau_ref = lambda_ref.ln();
    let mu = |tau: f64| -> Complex64 {
        Complex64::new(
            tau,
            bulge * (std::f64::consts::PI * tau / tau_ref).sin(),
        )
        .exp()
    };
    let q0 = CubicParam::new(p.c * lambda_ref, p.v);
    let mut val_prev = match phi_power_level(&q0, budget)? {
        (0, val) => val,
        _ => {
            return Err(BifError::Branch(
                "phi_minus: reference lost its single-valued level".into(),
            ))
        }
    };
    let mut tau = tau_ref;
    let mut dtau = (tau / 4.0).min(0.35);
    let mut fails_total = 0u32;
    let mut total_moves = 0u32;
    while tau > 0.0 {
        total_moves += 1;
        if total_moves > 4_000 {
            return Err(BifError::Branch(
                "phi_minus: continuation did not converge".into(),
            ));
        }
        let tau_next = (tau - dtau).max(0.0);
        let q = CubicParam::new(p.c * mu(tau_next), p.v);
        let advance = match phi_power_level(&q, budget) {
            Ok((0, val)) if (val - val_prev).norm() < 0.5 * val_prev.norm() => Some(val),
            Ok((0, _)) => None,
            Ok((jq, pw)) => {
                let (val, sep) = nearest_root(pw, jq, val_prev);
                if (val - val_prev).norm() < 0.5 * sep {
                    Some(val)
                } else {
                    None
                }
            }
            Err(_) => None,
        };
        match advance {
            Some(val) => {
                tau = tau_next;
                val_prev = val;
                dtau = (dtau * 1.5).min(0.35);
            }
            None => {
                fails_total += 1;
                dtau *= 0.5;
                if fails_total > 120 || dtau < 1e-13 {
                    return Err(BifError::Branch(
                        "phi_minus: continuation lost the branch on the ray".into(),
                    ));
                }
            }
        }
    }

    // arrive exactly at p
    let (value, separation) = nearest_root(pow_val, j_final, val_prev);
    if (value - val_prev).norm() > 0.5 * separation {
        return Err(BifError::Branch(
            "phi_minus: final branch selection ambiguous".into(),
        ));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BUDGET: u32 = 1024;

    // frozen brute-force oracle values (60 iterations, extended precision)
    const G_PLUS_10_0: f64 = 0.844_541_949_104_901;
    const G_MINUS_10_0: f64 = 2.764_681_133_486_765;
    const G_MINUS_10_10: f64 = 2.765_513_437_255_541_2;
    const PHI_MINUS_10_0: f64 = 15.873_977_503_670_16;
    const TWO_TO_2_3: f64 = 1.587_401_051_968_199_5;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn greens_at_origin() {
        let p = CubicParam::from_re(0.0, 0.0);
        assert_eq!(green_plus(&p, BUDGET).value, 0.0);
        assert_eq!(green_minus(&p, BUDGET).value, 0.0);
        assert!((lyapunov(&p, BUDGET) - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn greens_frozen_values() {
        let p = CubicParam::from_re(10.0, 0.0);
        assert!((green_plus(&p, BUDGET).value - G_PLUS_10_0).abs() < 1e-11);
        assert!((green_minus(&p, BUDGET).value - G_MINUS_10_0).abs() < 1e-11);
        let chi = lyapunov(&p, BUDGET);
        assert!((chi - 4.707_835_371_259_776).abs() < 1e-10, "chi = {chi}");
        // (10,10): G+ = 0 since f(c) = c
        let p = CubicParam::from_re(10.0, 10.0);
        assert_eq!(green_plus(&p, BUDGET).value, 0.0);
        let chi = lyapunov(&p, BUDGET);
        assert!((chi - (3f64.ln() + G_MINUS_10_10)).abs() < 1e-10);
    }

    #[test]
    fn involution_formula_and_square() {
        let p = CubicParam::from_re(1.0, 0.0);
        let q = marking_involution(&p);
        assert_eq!(q.c, c64(-1.0, 0.0));
        assert_eq!(q.v, c64(4.0, 0.0));
        // involution^2 = id up to rounding of (v + 4c^3) - 4c^3
        for (cr, ci, vr, vi) in [
            (0.7, -0.2, 1.1, 0.5),
            (-1.4, 0.9, -0.3, -2.0),
            (2.0, 1.0, 0.0, 0.1),
        ] {
            let p = CubicParam::new(c64(cr, ci), c64(vr, vi));
            let pp = marking_involution(&marking_involution(&p));
            assert_eq!(pp.c, p.c);
            let scale = p.v.norm().max(4.0 * p.c.norm().powi(3));
            assert!((pp.v - p.v).norm() <= 8.0 * f64::EPSILON * scale);
        }
    }

    #[test]
    fn involution_swaps_greens() {
        let p = CubicParam::from_re(10.0, 0.0);
        let q = marking_involution(&p);
        assert!((green_plus(&q, BUDGET).value - G_MINUS_10_0).abs() < 1e-9);
        assert!((green_minus(&q, BUDGET).value - G_PLUS_10_0).abs() < 1e-9);
    }

    #[test]
    fn locus_classification_examples() {
        let r = classify_locus(&CubicParam::from_re(0.0, 0.0), BUDGET);
        assert_eq!(r.class, LocusClass::Connectedness);
        assert!(!r.borderline());

        // (10,10): f(c) = c bounded, f(-c) = 4010 escapes
        let r = classify_locus(&CubicParam::from_re(10.0, 10.0), BUDGET);
        assert_eq!(r.class, LocusClass::PlusOnly);
        assert_eq!(r.plus, OrbitFate::Stabilizes { period: 1 });
        assert_eq!(r.minus, OrbitFate::Escapes);

        let r = classify_locus(&CubicParam::from_re(10.0, 0.0), BUDGET);
        assert_eq!(r.class, LocusClass::Shift);
    }

    #[test]
    fn near_infinity_roundtrip() {
        let p = CubicParam::from_re(10.0, 0.0);
        let (x, y) = near_infinity_coords(&p).unwrap();
        assert_eq!(x, c64(0.1, 0.0));
        assert_eq!(y, c64(0.0, 0.0));
        let (x, y) = near_infinity_coords(&CubicParam::from_re(2.0, 6.0)).unwrap();
        assert_eq!(x, c64(0.5, 0.0));
        assert_eq!(y, c64(3.0, 0.0));
        let q = from_near_infinity(c64(0.001, 0.0), c64(0.2, 0.0)).unwrap();
        assert!((q.c - c64(1000.0, 0.0)).norm() < 1e-9);
        assert!((q.v - c64(200.0, 0.0)).norm() < 1e-9);
        // round trip within 4 ulps
        let p = CubicParam::new(c64(1.7, -0.4), c64(0.3, 2.2));
        let (x, y) = near_infinity_coords(&p).unwrap();
        let q = from_near_infinity(x, y).unwrap();
        assert!((q.c - p.c).norm() <= 4.0 * f64::EPSILON * p.c.norm());
        assert!((q.v - p.v).norm() <= 4.0 * f64::EPSILON * p.v.norm());
        assert!(near_infinity_coords(&CubicParam::from_re(0.0, 1.0)).is_err());
    }

    #[test]
    fn phi_minus_frozen_and_asymptotic() {
        let pm = phi_minus(&CubicParam::from_re(10.0, 0.0), BUDGET).unwrap();
        assert_eq!(pm.power_level, 0);
        assert!(pm.value.im.abs() < 1e-10);
        assert!(
            (pm.value.re - PHI_MINUS_10_0).abs() < 1e-8,
            "phi = {}",
            pm.value
        );
        // Lemma-style asymptotic at c = 1000: ratio to 2^{2/3} c within 0.2%
        let pm = phi_minus(&CubicParam::from_re(1000.0, 0.0), BUDGET).unwrap();
        let ratio = pm.value / (TWO_TO_2_3 * c64(1000.0, 0.0));
        assert!((ratio - c64(1.0, 0.0)).norm() < 0.002);
    }

    #[test]
    fn phi_minus_modulus_identity() {
        // |phi_minus| = exp(G^-) at (10,10)
        let p = CubicParam::from_re(10.0, 10.0);
        let pm = phi_minus(&p, BUDGET).unwrap();
        let gm = green_minus(&p, BUDGET).value;
        assert!((pm.value.norm() - gm.exp()).abs() / gm.exp() < 1e-9);
        assert!((gm - G_MINUS_10_10).abs() < 1e-10);
    }

    #[test]
    fn phi_minus_power_level_branch() {
        // involution of (10,0): G+ = 2.7647 > G- = 0.8445, needs j = 2
        let p = marking_involution(&CubicParam::from_re(10.0, 0.0));
        let pm = phi_minus(&p, BUDGET).unwrap();
        assert!(pm.power_level >= 1, "expected a nontrivial power level");
        // modulus identity still holds for the continued branch
        let gm = green_minus(&p, BUDGET).value;
        assert!(
            (pm.value.norm() - gm.exp()).abs() / gm.exp() < 1e-8,
            "|phi| = {} vs e^G = {}",
            pm.value.norm(),
            gm.exp()
        );
        // and value^{3^j} reproduces the unambiguous power
        let (j, pow_val) = phi_power_level(&p, BUDGET).unwrap();
        assert_eq!(j, pm.power_level);
        let mut v = pm.value;
        for _ in 0..j {
            v = v * v * v;
        }
        assert!(
            (v - pow_val).norm() / pow_val.norm() < 1e-7,
            "value^(3^j) = {v} vs {pow_val}"
        );
    }

    #[test]
    fn phi_minus_domain_error_inside() {
        // both orbits bounded: no escape invariant
        let p = CubicParam::from_re(0.0, 0.0);
        assert!(matches!(
            phi_minus(&p, BUDGET),
            Err(BifError::Domain(_))
        ));
    }
}
