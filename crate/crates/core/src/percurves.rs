//! `Per(n,k)` parameter curves `{f^n(s c) = f^k(s c)}` for the marked
//! critical points `s = +1, -1`: defining values in log-magnitude-safe
//! form, v-roots along lines by interpolation, total-degree verification,
//! equidistribution potentials and curve sampling.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{CubicParam, OrbitPoint};
use crate::error::{BifError, Result};
use crate::grid::Region;
use crate::roots::{aberth_roots_exact_degree, cluster_roots, interpolate_on_circle, trim_degree};
use crate::tol;

/// Which marked critical point the curve refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PerSign {
    Plus,
    Minus,
}

impl PerSign {
    pub fn critical(&self, p: &CubicParam) -> Complex64 {
        match self {
            PerSign::Plus => p.c,
            PerSign::Minus => -p.c,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            PerSign::Plus => "plus",
            PerSign::Minus => "minus",
        }
    }
}

/// The curve `Per^sign(n, k) = {(c,v): f^n(sign c) = f^k(sign c)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PerSpec {
    pub sign: PerSign,
    pub n: u32,
    pub k: u32,
}

impl PerSpec {
    pub fn new(sign: PerSign, n: u32, k: u32) -> Result<Self> {
        if n < 1 || k >= n {
            return Err(BifError::Domain(format!(
                "PerSpec requires 1 <= n and k < n, got n = {n}, k = {k}"
            )));
        }
        Ok(PerSpec { sign, n, k })
    }

    /// Degree of the defining polynomial in `v` (both signs): `3^{n-1}`.
    pub fn v_degree(&self) -> usize {
        3usize.pow(self.n - 1)
    }

    /// Total degree in `(c, v)`: `3^{n-1}` for the plus curve, `3^n` for
    /// the minus curve.
    pub fn expected_total_degree(&self) -> usize {
        match self.sign {
            PerSign::Plus => 3usize.pow(self.n - 1),
            PerSign::Minus => 3usize.pow(self.n),
        }
    }
}

/// Defining value `f^n(s c) - f^k(s c)`; far-escaped orbits overflow `f64`
/// and are reported in log-magnitude form instead.
#[derive(Debug, Clone, Copy, Serialize)]
pub enum PerValue {
    Exact(Complex64),
    /// `ln|f^n - f^k|` for orbits beyond floating-point range.
    LogMag { ln_abs: f64 },
}

impl PerValue {
    pub fn ln_abs(&self) -> f64 {
        match *self {
            PerValue::Exact(z) => z.norm().ln(),
            PerValue::LogMag { ln_abs } => ln_abs,
        }
    }

    pub fn exact(&self) -> Option<Complex64> {
        match *self {
            PerValue::Exact(z) => Some(z),
            PerValue::LogMag { .. } => None,
        }
    }
}

/// Evaluates the defining value of the curve at `p` by iteration.
pub fn per_value(s: &PerSpec, p: &CubicParam) -> PerValue {
    let mut w = OrbitPoint::new(s.sign.critical(p));
    let mut at_k = w;
    for i in 1..=s.n {
        if i - 1 == s.k {
            at_k = w;
        }
        w = w.step(p);
    }
    match (w, at_k) {
        (OrbitPoint::Exact(a), OrbitPoint::Exact(b)) => PerValue::Exact(a - b),
        (a, b) => PerValue::LogMag {
            ln_abs: OrbitPoint::ln_abs_diff(a, b),
        },
    }
}

/// Exact defining value and its `d/dv` derivative (forward accumulation
/// along the orbit). Only meaningful while the orbit stays in `f64` range;
/// intended for Newton polishing near the curve.
pub fn per_value_dv(s: &PerSpec, p: &CubicParam) -> (Complex64, Complex64) {
    let mut z = s.sign.critical(p);
    let mut dz = Complex64::new(0.0, 0.0);
    let mut zk = z;
    let mut dzk = dz;
    for i in 1..=s.n {
        if i - 1 == s.k {
            zk = z;
            dzk = dz;
        }
        dz = p.derivative(z) * dz + Complex64::new(1.0, 0.0);
        z = p.eval(z);
    }
    (z - zk, dz - dzk)
}

/// Equidistribution potential `3^{-n} ln|f^n(s c) - f^k(s c)|`.
///
/// On the curve this is `-inf`; at a fixed escape-locus parameter it
/// converges to `G^{sign}(p)` as `n` grows.
pub fn equidist_potential(s: &PerSpec, p: &CubicParam) -> f64 {
    per_value(s, p).ln_abs() * 3f64.powi(-(s.n as i32))
}

/// A root of the curve polynomial in `v` over a fixed `c`, with the
/// cluster multiplicity seen by the solver.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct VRoot {
    pub v: Complex64,
    pub multiplicity: usize,
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add_into(a: &mut Vec<Complex64>, b: &[Complex64]) {
    if a.len() < b.len() {
        a.resize(b.len(), Complex64::new(0.0, 0.0));
    }
    for (x, &y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

/// Coefficients (low to high) of `f^n(s c0) - f^k(s c0)` as a polynomial
/// in `v`: monic of degree `3^{n-1}`, built by composing the orbit
/// polynomials directly. Composition keeps every coefficient accurate in
/// the relative sense, which circle interpolation cannot do once the
/// coefficient magnitudes spread over many orders.
pub fn per_poly_in_v(s: &PerSpec, c0: Complex64) -> Vec<Complex64> {
    let c2 = c0 * c0;
    let affine = [2.0 * c2 * c0, Complex64::new(1.0, 0.0)]; // 2c^3 + v
    let mut z = vec![s.sign.critical(&CubicParam::new(c0, Complex64::new(0.0, 0.0)))];
    let mut zk = z.clone();
    for i in 1..=s.n {
        if i - 1 == s.k {
            zk = z.clone();
        }
        let mut next = poly_mul(&poly_mul(&z, &z), &z);
        let lin: Vec<Complex64> = z.iter().map(|&a| -3.0 * c2 * a).collect();
        poly_add_into(&mut next, &lin);
        poly_add_into(&mut next, &affine);
        z = next;
    }
    let neg: Vec<Complex64> = zk.iter().map(|&a| -a).collect();
    poly_add_into(&mut z, &neg);
    z
}

/// All `v` with `(c0, v)` on the curve: the defining polynomial in `v`
/// (degree `3^{n-1}`, monic) is solved by Aberth iteration seeded from its
/// Newton polygon, and the roots are polished on the exact iterated map.
/// Roots are returned with cluster multiplicities.
pub fn v_roots_on_line(s: &PerSpec, c0: Complex64) -> Result<Vec<VRoot>> {
    let deg = s.v_degree();
    let coeffs = per_poly_in_v(s, c0);
    if coeffs.len() != deg + 1 || coeffs.iter().any(|c| !c.is_finite()) {
        return Err(BifError::Conditioning(format!(
            "v_roots_on_line: defining polynomial left floating-point range at c0 = {c0}"
        )));
    }
    let approx = aberth_roots_exact_degree(&coeffs, 800, 1e-13);

    // polish each approximation on the exact map
    let polished: Vec<Complex64> = approx
        .iter()
        .map(|&v0| {
            let mut v = v0;
            for _ in 0..120 {
                let p = CubicParam::new(c0, v);
                let (fv, dfv) = per_value_dv(s, &p);
                if !fv.is_finite() || dfv.norm() < 1e-280 {
                    break;
                }
                let step = fv / dfv;
                if !step.is_finite() || step.norm() > 0.5 * (1.0 + v.norm()) {
                    break;
                }
                v -= step;
                if step.norm() < 1e-14 * (1.0 + v.norm()) {
                    break;
                }
            }
            v
        })
        .collect();

    let clusters = cluster_roots(&polished, 1e-6);
    Ok(clusters
        .into_iter()
        .map(|(v, multiplicity)| VRoot { v, multiplicity })
        .collect())
}

/// Degree of the curve along a random affine line, read off interpolated
/// coefficients; retries on up to 5 degenerate lines. Desk-scale: `n <= 5`.
pub fn total_degree_check(s: &PerSpec) -> Result<usize> {
    if s.n > 5 {
        return Err(BifError::Domain(
            "total_degree_check: n > 5 exceeds the desk-scale bound".into(),
        ));
    }
    let nodes = 3usize.pow(s.n) + 2;
    let seed = 0x5eed_0000
        + s.n as u64 * 64
        + s.k as u64 * 8
        + if s.sign == PerSign::Plus { 0 } else { 1 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<usize> = None;
    for _attempt in 0..5 {
        let p0 = Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        let v0 = Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        let qc = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let qv = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let norm = (qc.norm_sqr() + qv.norm_sqr()).sqrt();
        if norm < 1e-3 {
            continue;
        }
        let (qc, qv) = (qc / norm, qv / norm);
        let eval = |t: Complex64| -> Complex64 {
            let p = CubicParam::new(p0 + t * qc, v0 + t * qv);
            match per_value(s, &p) {
                PerValue::Exact(z) if z.is_finite() => z,
                _ => Complex64::new(f64::NAN, f64::NAN),
            }
        };
        let coeffs = interpolate_on_circle(nodes, 1.0, false, &eval);
        if coeffs.iter().any(|c| !c.is_finite()) {
            continue; // line left floating-point range: degenerate, retry
        }
        let sig = trim_degree(&coeffs, 1e-8);
        let deg = sig.len().saturating_sub(1);
        best = Some(best.map_or(deg, |b| b.max(deg)));
    }
    best.ok_or_else(|| {
        BifError::Conditioning("total_degree_check: all 5 random lines degenerate".into())
    })
}

/// One sampled point of a curve with its defining residual.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CurvePoint {
    pub p: CubicParam,
    pub multiplicity: usize,
    pub residual: f64,
}

/// Samples the curve over a grid of `c` values: for each `c` the v-roots
/// are computed and polished by one Newton step in `v`; every returned
/// point satisfies `|per_value| < 1e-8`. Ordering is deterministic
/// (grid index, then root order).
pub fn sample_curve(s: &PerSpec, c_window: Region, resolution: usize) -> Vec<CurvePoint> {
    let n = resolution.max(1);
    let dx = if n > 1 { c_window.width() / (n - 1) as f64 } else { 0.0 };
    let dy = if n > 1 { c_window.height() / (n - 1) as f64 } else { 0.0 };
    let cs: Vec<Complex64> = (0..n * n)
        .map(|idx| {
            let ix = idx % n;
            let iy = idx / n;
            Complex64::new(
                c_window.re_min + ix as f64 * dx,
                c_window.im_min + iy as f64 * dy,
            )
        })
        .collect();
    cs.par_iter()
        .map(|&c0| {
            let mut pts = Vec::new();
            if let Ok(roots) = v_roots_on_line(s, c0) {
                for root in roots {
                    // one Newton polish, then the residual gate
                    let mut v = root.v;
                    let p = CubicParam::new(c0, v);
                    let (fv, dfv) = per_value_dv(s, &p);
                    if fv.is_finite() && dfv.norm() > 1e-280 {
                        let step = fv / dfv;
                        if step.is_finite() {
                            v -= step;
                        }
                    }
                    let p = CubicParam::new(c0, v);
                    if let PerValue::Exact(r) = per_value(s, &p) {
                        let residual = r.norm();
                        if residual < tol::CURVE_RESIDUAL_TOL {
                            pts.push(CurvePoint {
                                p,
                                multiplicity: root.multiplicity,
                                residual,
                            });
                        }
                    }
                }
            }
            pts
        })
        .flatten_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::param::{green_minus, green_plus};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spec(sign: PerSign, n: u32, k: u32) -> PerSpec {
        PerSpec::new(sign, n, k).unwrap()
    }

    #[test]
    fn per_value_examples() {
        // Per+(1,0) at (2,5): f(c) - c = v - c = 3
        let s = spec(PerSign::Plus, 1, 0);
        let v = per_value(&s, &CubicParam::from_re(2.0, 5.0));
        assert_eq!(v.exact().unwrap(), c(3.0, 0.0));
        // Per+(2,1) at (1,-2): f(v) - v = (v-c)^2 (v+2c) = 0
        let s = spec(PerSign::Plus, 2, 1);
        let v = per_value(&s, &CubicParam::from_re(1.0, -2.0));
        assert!(v.exact().unwrap().norm() < 1e-12);
        // Per-(1,0): f(-c) + c = v + 4c^3 + c; zero at (1,-5)
        let s = spec(PerSign::Minus, 1, 0);
        let v = per_value(&s, &CubicParam::from_re(1.0, -5.0));
        assert!(v.exact().unwrap().norm() < 1e-12);
        let v = per_value(&s, &CubicParam::from_re(1.0, 0.0));
        assert_eq!(v.exact().unwrap(), c(5.0, 0.0));
    }

    #[test]
    fn per_spec_validation() {
        assert!(PerSpec::new(PerSign::Plus, 0, 0).is_err());
        assert!(PerSpec::new(PerSign::Plus, 2, 2).is_err());
        assert!(PerSpec::new(PerSign::Plus, 2, 1).is_ok());
    }

    #[test]
    fn v_roots_examples() {
        // Per+(1,0): v = c
        let s = spec(PerSign::Plus, 1, 0);
        let roots = v_roots_on_line(&s, c(0.37, -0.2)).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0].v - c(0.37, -0.2)).norm() < 1e-10);
        // Per-(1,0) at c0 = 1: v = -4c^3 - c = -5
        let s = spec(PerSign::Minus, 1, 0);
        let roots = v_roots_on_line(&s, c(1.0, 0.0)).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0].v - c(-5.0, 0.0)).norm() < 1e-10);
        // Per+(2,0) at c0 = 1: roots of v^3 - 2v + 1: {1, (-1 +- sqrt5)/2}
        let s = spec(PerSign::Plus, 2, 0);
        let mut roots = v_roots_on_line(&s, c(1.0, 0.0)).unwrap();
        assert_eq!(
            roots.iter().map(|r| r.multiplicity).sum::<usize>(),
            3,
            "count must be 3^{{n-1}}"
        );
        roots.sort_by(|a, b| a.v.re.partial_cmp(&b.v.re).unwrap());
        let phi = 5f64.sqrt();
        let expect = [(-1.0 - phi) / 2.0, (-1.0 + phi) / 2.0, 1.0];
        for (r, e) in roots.iter().zip(expect) {
            assert!((r.v - c(e, 0.0)).norm() < 1e-9, "{} vs {e}", r.v);
        }
    }

    #[test]
    fn root_count_is_stable_over_random_lines() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let c0 = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            for n in 1..=4u32 {
                for sign in [PerSign::Plus, PerSign::Minus] {
                    let s = spec(sign, n, 0);
                    let roots = v_roots_on_line(&s, c0).unwrap();
                    let count: usize = roots.iter().map(|r| r.multiplicity).sum();
                    assert_eq!(
                        count,
                        3usize.pow(n - 1),
                        "sign {sign:?} n {n} c0 {c0}: got {count}"
                    );
                    // the counted roots must be genuine curve points; the
                    // achievable residual floor scales with the orbit
                    // derivative
                    for r in &roots {
                        let p = CubicParam::new(c0, r.v);
                        let (res, dres) = per_value_dv(&s, &p);
                        let gate = 1e-8 * (1.0 + r.v.norm()) * dres.norm().max(1.0);
                        assert!(
                            res.is_finite() && res.norm() < gate,
                            "sign {sign:?} n {n} c0 {c0}: residual {} (gate {gate:.2e}) at v = {}",
                            res.norm(),
                            r.v
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn total_degree_known_values() {
        assert_eq!(total_degree_check(&spec(PerSign::Plus, 1, 0)).unwrap(), 1);
        assert_eq!(total_degree_check(&spec(PerSign::Minus, 1, 0)).unwrap(), 3);
        assert_eq!(total_degree_check(&spec(PerSign::Plus, 3, 0)).unwrap(), 9);
    }

    #[test]
    fn equidist_potential_converges_to_green() {
        let p = CubicParam::from_re(10.0, 0.0);
        let gp = green_plus(&p, 1024).value;
        let gm = green_minus(&p, 1024).value;
        let pot_p = equidist_potential(&spec(PerSign::Plus, 8, 0), &p);
        let pot_m = equidist_potential(&spec(PerSign::Minus, 8, 0), &p);
        assert!((pot_p - gp).abs() < 1e-3, "{pot_p} vs {gp}");
        assert!((pot_m - gm).abs() < 1e-3, "{pot_m} vs {gm}");
        // on the curve: -inf sentinel
        let on_curve = equidist_potential(&spec(PerSign::Plus, 1, 0), &CubicParam::from_re(10.0, 10.0));
        assert_eq!(on_curve, f64::NEG_INFINITY);
    }

    #[test]
    fn sample_curve_examples() {
        // Per+(1,0) over a small c window: points have v = c
        let s = spec(PerSign::Plus, 1, 0);
        let pts = sample_curve(&s, Region::new(-1.0, 1.0, -0.5, 0.5), 5);
        assert!(!pts.is_empty());
        for pt in &pts {
            assert!((pt.p.v - pt.p.c).norm() < 1e-9);
            assert!(pt.residual < tol::CURVE_RESIDUAL_TOL);
        }
        // Per+(2,1) sample contains (1,-2) when the window covers c = 1
        let s = spec(PerSign::Plus, 2, 1);
        let pts = sample_curve(&s, Region::new(0.0, 2.0, -1e-9, 1e-9), 3);
        assert!(
            pts.iter()
                .any(|pt| (pt.p.c - c(1.0, 0.0)).norm() < 1e-7
                    && (pt.p.v - c(-2.0, 0.0)).norm() < 1e-6),
            "expected the v = -2c branch point (1,-2)"
        );
        // polish is idempotent: residuals already below the gate
        for pt in &pts {
            if let PerValue::Exact(r) = per_value(&s, &pt.p) {
                assert!(r.norm() < tol::CURVE_RESIDUAL_TOL);
            }
        }
    }
}
