//! The wringing deformation: the right-half-plane group, the radial maps
//! `g_u`, leaf tracing by invariant-pair continuation, and the transversal
//! disks `{phi_minus = k}` near infinity.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{find_attracting_cycle, refine_cycle, CubicParam};
use crate::error::{BifError, Result};
use crate::param::{from_near_infinity, phi_minus, phi_minus_with_hint};
use crate::percurves::{per_value_dv, PerSign, PerSpec};
use crate::solve::{newton_1c, newton_2c};
use crate::tol;

/// Element `u = s + it` of the right half-plane with the wringing group
/// law `(s1 + i t1) * (s2 + i t2) = (s1 + i t1) s2 + i t2` and unit 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WringU {
    pub s: f64,
    pub t: f64,
}

impl WringU {
    pub fn new(s: f64, t: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(BifError::Domain(format!(
                "wringing parameter needs s > 0, got s = {s}"
            )));
        }
        Ok(WringU { s, t })
    }

    pub fn identity() -> Self {
        WringU { s: 1.0, t: 0.0 }
    }

    /// Group product; `s > 0` is closed under it.
    pub fn compose(self, other: WringU) -> WringU {
        WringU {
            s: self.s * other.s,
            t: self.t * other.s + other.t,
        }
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.s, self.t)
    }
}

/// The radial stretch-and-rotate `g_u(z) = z |z|^{u-1}`, defined for
/// `|z| > 1`. Satisfies `g_{u1*u2} = g_{u1} . g_{u2}` and commutes with
/// `z -> z^3`.
pub fn g_u(u: WringU, z: Complex64) -> Result<Complex64> {
    let m = z.norm();
    if m <= 1.0 {
        return Err(BifError::Domain(format!(
            "g_u is defined on |z| > 1, got |z| = {m}"
        )));
    }
    let l = m.ln();
    let scale = Complex64::new((u.s - 1.0) * l, u.t * l).exp();
    Ok(z * scale)
}

/// The invariant held fixed along a traced leaf.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LeafConstraint {
    /// `Per^+(n, 0)` residual `f^n(c) - c` held at its base value
    /// (superattracting leaves).
    SuperattractingPer { n: u32 },
    /// Multiplier of the attracting cycle of `+c` matched in value
    /// (hyperbolic leaves).
    MultiplierFixed,
    /// No finite invariant: minimum-norm steps on the `phi_minus`
    /// equation alone.
    None,
}

/// One accepted continuation step.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LeafStep {
    pub u: WringU,
    pub p: CubicParam,
    pub residual_phi: f64,
    pub residual_inv: f64,
}

/// How the trace ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TraceOutcome {
    Complete,
    /// Newton stagnated; `steps` holds everything up to the last good one.
    Stagnated,
    /// The path left the domain of `phi_minus` (`G^+ >= 3^j_max G^-`).
    RegionExit,
}

/// Continuation path of parameters under the wringing deformation.
#[derive(Debug, Clone, Serialize)]
pub struct LeafTrace {
    pub base: CubicParam,
    pub constraint: LeafConstraint,
    pub steps: Vec<LeafStep>,
    pub outcome: TraceOutcome,
}

enum HeldInvariant {
    Per(PerSpec, Complex64),
    Multiplier {
        period: u32,
        target: Complex64,
    },
    None,
}

/// Traces the wringing leaf through `base`: for each `u` on the path,
/// solves `{phi_minus(p) = g_u(phi_minus(base)), invariant(p) =
/// invariant(base)}` by damped Newton seeded from the previous step,
/// halving the `u`-step on failure (up to 8 halvings per segment).
pub fn trace_leaf(
    base: &CubicParam,
    u_path: &[WringU],
    constraint: LeafConstraint,
    budget: u32,
) -> Result<LeafTrace> {
    let phi0 = phi_minus(base, budget)?.value;
    if phi0.norm() <= 1.0 {
        return Err(BifError::Domain(
            "trace_leaf: |phi_minus(base)| <= 1, wringing undefined".into(),
        ));
    }

    let mut cycle_point = Complex64::new(0.0, 0.0);
    let held = match constraint {
        LeafConstraint::SuperattractingPer { n } => {
            let spec = PerSpec::new(PerSign::Plus, n, 0)?;
            let (r0, _) = per_value_dv(&spec, base);
            HeldInvariant::Per(spec, r0)
        }
        LeafConstraint::MultiplierFixed => {
            let cyc = find_attracting_cycle(base, base.c, budget).ok_or_else(|| {
                BifError::Domain(
                    "trace_leaf: no attracting cycle for +c at the base parameter".into(),
                )
            })?;
            cycle_point = cyc.points[0];
            HeldInvariant::Multiplier {
                period: cyc.period,
                target: cyc.multiplier,
            }
        }
        LeafConstraint::None => HeldInvariant::None,
    };

    let mut steps: Vec<LeafStep> = Vec::with_capacity(u_path.len());
    let mut outcome = TraceOutcome::Complete;
    let mut p_cur = *base;
    let mut u_cur = WringU::identity();

    'path: for &u_req in u_path {
        // possibly subdivided march from u_cur to u_req
        let mut pending = vec![u_req];
        let mut halvings = 0u32;
        while let Some(u_next) = pending.last().copied() {
            let target = g_u(u_next, phi0)?;
            let solved = solve_leaf_point(
                &held,
                p_cur,
                cycle_point,
                target,
                budget,
            );
            match solved {
                Ok((p_new, res_phi, res_inv, new_cycle_point)) => {
                    p_cur = p_new;
                    u_cur = u_next;
                    cycle_point = new_cycle_point;
                    pending.pop();
                    if pending.is_empty() {
                        steps.push(LeafStep {
                            u: u_next,
                            p: p_new,
                            residual_phi: res_phi,
                            residual_inv: res_inv,
                        });
                    }
                }
                Err(BifError::Domain(_)) | Err(BifError::Branch(_)) => {
                    outcome = TraceOutcome::RegionExit;
                    break 'path;
                }
                Err(_) => {
                    halvings += 1;
                    if halvings > tol::MAX_STEP_HALVINGS {
                        outcome = TraceOutcome::Stagnated;
                        break 'path;
                    }
                    let mid = WringU {
                        s: 0.5 * (u_cur.s + u_next.s),
                        t: 0.5 * (u_cur.t + u_next.t),
                    };
                    pending.push(mid);
                }
            }
        }
    }

    Ok(LeafTrace {
        base: *base,
        constraint,
        steps,
        outcome,
    })
}

/// Solves one leaf point; returns the parameter, the two residuals and the
/// refreshed cycle representative.
fn solve_leaf_point(
    held: &HeldInvariant,
    seed: CubicParam,
    cycle_point: Complex64,
    target: Complex64,
    budget: u32,
) -> Result<(CubicParam, f64, f64, Complex64)> {
    let tol_abs = 1e-11 * (1.0 + target.norm());
    match held {
        HeldInvariant::Per(spec, r0) => {
            let f = |c: Complex64, v: Complex64| -> Result<(Complex64, Complex64)> {
                let p = CubicParam::new(c, v);
                let phi = phi_minus_with_hint(&p, target, budget)?.value;
                let (r, _) = per_value_dv(spec, &p);
                Ok((phi - target, r - r0))
            };
            let sol = newton_2c(f, seed.c, seed.v, tol_abs, 60)?;
            let p = CubicParam::new(sol.x, sol.y);
            let (r, _) = per_value_dv(spec, &p);
            let phi = phi_minus_with_hint(&p, target, budget)?.value;
            Ok((p, (phi - target).norm(), (r - r0).norm(), cycle_point))
        }
        HeldInvariant::Multiplier { period, target: rho0 } => {
            let q = *period;
            let f = |c: Complex64, v: Complex64| -> Result<(Complex64, Complex64)> {
                let p = CubicParam::new(c, v);
                let phi = phi_minus_with_hint(&p, target, budget)?.value;
                let cyc = refine_cycle(&p, cycle_point, q).ok_or_else(|| {
                    BifError::Budget("trace_leaf: cycle refinement failed".into())
                })?;
                Ok((phi - target, cyc.multiplier - rho0))
            };
            let sol = newton_2c(f, seed.c, seed.v, tol_abs, 60)?;
            let p = CubicParam::new(sol.x, sol.y);
            let cyc = refine_cycle(&p, cycle_point, q)
                .ok_or_else(|| BifError::Budget("trace_leaf: lost the cycle".into()))?;
            let phi = phi_minus_with_hint(&p, target, budget)?.value;
            Ok((
                p,
                (phi - target).norm(),
                (cyc.multiplier - rho0).norm(),
                cyc.points[0],
            ))
        }
        HeldInvariant::None => {
            // minimum-norm Newton on the single phi equation
            let mut c = seed.c;
            let mut v = seed.v;
            let eval = |c: Complex64, v: Complex64| -> Result<Complex64> {
                let p = CubicParam::new(c, v);
                Ok(phi_minus_with_hint(&p, target, budget)?.value - target)
            };
            let mut fcv = eval(c, v)?;
            for _ in 0..60 {
                if fcv.norm() < tol_abs {
                    break;
                }
                let hc = tol::FD_STEP * (1.0 + c.norm());
                let hv = tol::FD_STEP * (1.0 + v.norm());
                let dc = (eval(c + Complex64::new(hc, 0.0), v)?
                    - eval(c - Complex64::new(hc, 0.0), v)?)
                    / (2.0 * hc);
                let dv = (eval(c, v + Complex64::new(hv, 0.0))?
                    - eval(c, v - Complex64::new(hv, 0.0))?)
                    / (2.0 * hv);
                let denom = dc.norm_sqr() + dv.norm_sqr();
                if denom < 1e-300 {
                    return Err(BifError::Budget("trace_leaf: flat phi gradient".into()));
                }
                let step_c = dc.conj() * fcv / denom;
                let step_v = dv.conj() * fcv / denom;
                let mut lambda = 1.0;
                let mut ok = false;
                for _ in 0..8 {
                    let cand = (c - lambda * step_c, v - lambda * step_v);
                    if let Ok(fc) = eval(cand.0, cand.1) {
                        if fc.norm() < fcv.norm() {
                            c = cand.0;
                            v = cand.1;
                            fcv = fc;
                            ok = true;
                            break;
                        }
                    }
                    lambda *= 0.5;
                }
                if !ok {
                    return Err(BifError::Budget("trace_leaf: stagnated (no invariant)".into()));
                }
            }
            if fcv.norm() >= tol_abs {
                return Err(BifError::Budget("trace_leaf: unconverged (no invariant)".into()));
            }
            Ok((CubicParam::new(c, v), fcv.norm(), 0.0, cycle_point))
        }
    }
}

/// A solved transversal chart `{phi_minus = k}` as a vertical graph
/// `x = x(y)` over the disk `|y| <= 1/3` in near-infinity coordinates.
#[derive(Debug, Clone, Serialize)]
pub struct Transversal {
    pub k: Complex64,
    /// Grid size over the bounding square of the y-disk.
    pub grid_n: usize,
    pub y_origin: Complex64,
    pub y_spacing: f64,
    /// Solved `x(y)` per cell, row-major; `None` marks cells outside the
    /// disk or per-point solve failures (gaps are reported, not patched).
    pub points: Vec<Option<Complex64>>,
    /// Cells inside the y-disk.
    pub attempted: usize,
}

impl Transversal {
    pub fn y_at(&self, ix: usize, iy: usize) -> Complex64 {
        Complex64::new(
            self.y_origin.re + ix as f64 * self.y_spacing,
            self.y_origin.im + iy as f64 * self.y_spacing,
        )
    }

    pub fn x_at(&self, ix: usize, iy: usize) -> Option<Complex64> {
        self.points[iy * self.grid_n + ix]
    }

    pub fn param_at(&self, ix: usize, iy: usize) -> Option<CubicParam> {
        self.x_at(ix, iy)
            .and_then(|x| from_near_infinity(x, self.y_at(ix, iy)).ok())
    }

    pub fn solved(&self) -> usize {
        self.points.iter().filter(|p| p.is_some()).count()
    }

    pub fn success_fraction(&self) -> f64 {
        if self.attempted == 0 {
            0.0
        } else {
            self.solved() as f64 / self.attempted as f64
        }
    }

    /// Largest `|x(y) - x(y')| / |y - y'|` over solved neighbor pairs: the
    /// fitted Lipschitz constant of the graph (verticality).
    pub fn verticality_lipschitz(&self) -> f64 {
        let n = self.grid_n;
        let mut worst = 0f64;
        for iy in 0..n {
            for ix in 0..n {
                if let Some(x0) = self.x_at(ix, iy) {
                    if ix + 1 < n {
                        if let Some(x1) = self.x_at(ix + 1, iy) {
                            worst = worst.max((x1 - x0).norm() / self.y_spacing);
                        }
                    }
                    if iy + 1 < n {
                        if let Some(x1) = self.x_at(ix, iy + 1) {
                            worst = worst.max((x1 - x0).norm() / self.y_spacing);
                        }
                    }
                }
            }
        }
        worst
    }
}

/// Minimum `|x_a(y) - x_b(y)|` over cells solved in both charts; positive
/// means the two graphs are disjoint in the bidisk.
pub fn charts_min_distance(a: &Transversal, b: &Transversal) -> f64 {
    assert_eq!(a.grid_n, b.grid_n, "charts must share the y-grid");
    let mut best = f64::INFINITY;
    for (pa, pb) in a.points.iter().zip(&b.points) {
        if let (Some(xa), Some(xb)) = (pa, pb) {
            best = best.min((xa - xb).norm());
        }
    }
    best
}

/// Solves the chart `{phi_minus(p(x,y)) = k}` for `x` over a y-grid of the
/// disk `|y| <= 1/3`, Newton-seeded row-wise from `2^{2/3}/k`. Per-point
/// failures are recorded as gaps.
pub fn transversal_disk(
    k: Complex64,
    grid_n: usize,
    x_seed: Option<Complex64>,
    budget: u32,
) -> Result<Transversal> {
    if k.norm() < tol::transversal_k_min() {
        return Err(BifError::Domain(format!(
            "transversal level |k| = {} below k_min = {}",
            k.norm(),
            tol::transversal_k_min()
        )));
    }
    if grid_n < 2 {
        return Err(BifError::Domain("transversal grid too small".into()));
    }
    let y_rad = 1.0 / 3.0;
    let spacing = 2.0 * y_rad / (grid_n - 1) as f64;
    let origin = Complex64::new(-y_rad, -y_rad);
    let seed0 = x_seed.unwrap_or_else(|| Complex64::new(2f64.powf(2.0 / 3.0), 0.0) / k);

    let rows: Vec<Vec<Option<Complex64>>> = (0..grid_n)
        .into_par_iter()
        .map(|iy| {
            let mut row = Vec::with_capacity(grid_n);
            let mut seed = seed0;
            for ix in 0..grid_n {
                let y = Complex64::new(
                    origin.re + ix as f64 * spacing,
                    origin.im + iy as f64 * spacing,
                );
                if y.norm() > y_rad {
                    row.push(None);
                    continue;
                }
                let f = |x: Complex64| -> Result<Complex64> {
                    let p = from_near_infinity(x, y)?;
                    Ok(phi_minus_with_hint(&p, k, budget)?.value - k)
                };
                match newton_1c(f, seed, 1e-9, 40) {
                    Ok(x) => {
                        seed = x; // propagate along the row
                        row.push(Some(x));
                    }
                    Err(_) => row.push(None),
                }
            }
            row
        })
        .collect();

    let mut points = Vec::with_capacity(grid_n * grid_n);
    let mut attempted = 0usize;
    for (iy, row) in rows.into_iter().enumerate() {
        for (ix, p) in row.into_iter().enumerate() {
            let y = Complex64::new(
                origin.re + ix as f64 * spacing,
                origin.im + iy as f64 * spacing,
            );
            if y.norm() <= y_rad {
                attempted += 1;
            }
            points.push(p);
        }
    }
    Ok(Transversal {
        k,
        grid_n,
        y_origin: origin,
        y_spacing: spacing,
        points,
        attempted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::param::green_minus;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn compose_formula_and_unit() {
        let a = WringU::new(2.0, 1.0).unwrap();
        let b = WringU::new(3.0, 2.0).unwrap();
        let ab = a.compose(b);
        assert_eq!(ab.s, 6.0);
        assert_eq!(ab.t, 5.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let u = WringU::new(rng.gen_range(0.1..4.0), rng.gen_range(-3.0..3.0)).unwrap();
            let e = WringU::identity();
            assert_eq!(e.compose(u), u);
            assert_eq!(u.compose(e), u);
        }
    }

    #[test]
    fn compose_associative_to_rounding() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let mut u = || WringU::new(rng.gen_range(0.1..4.0), rng.gen_range(-3.0..3.0)).unwrap();
            let (a, b, d) = (u(), u(), u());
            let lhs = a.compose(b).compose(d);
            let rhs = a.compose(b.compose(d));
            assert!((lhs.s - rhs.s).abs() <= 2.0 * f64::EPSILON * lhs.s.abs());
            // 2 ulps of the term scale (the t sums can cancel)
            let t_scale = (a.t * b.s * d.s).abs() + (b.t * d.s).abs() + d.t.abs() + 1.0;
            assert!((lhs.t - rhs.t).abs() <= 2.0 * f64::EPSILON * t_scale);
        }
    }

    #[test]
    fn g_u_known_values() {
        // g_1 = id
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let z = c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            if z.norm() > 1.0 {
                assert_eq!(g_u(WringU::identity(), z).unwrap(), z);
            }
        }
        // g_2(3) = 9
        let v = g_u(WringU::new(2.0, 0.0).unwrap(), c(3.0, 0.0)).unwrap();
        assert!((v - c(9.0, 0.0)).norm() < 1e-14);
        // g_{1+i}(e^2) = e^2 (cos 2 + i sin 2)
        let e2 = std::f64::consts::E.powi(2);
        let v = g_u(WringU::new(1.0, 1.0).unwrap(), c(e2, 0.0)).unwrap();
        assert!((v - c(e2 * 2f64.cos(), e2 * 2f64.sin())).norm() < 1e-12);
        // domain error inside the disk
        assert!(g_u(WringU::identity(), c(0.5, 0.0)).is_err());
    }

    #[test]
    fn g_u_left_action_and_cubing() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let u1 = WringU::new(rng.gen_range(0.2..3.0), rng.gen_range(-2.0..2.0)).unwrap();
            let u2 = WringU::new(rng.gen_range(0.2..3.0), rng.gen_range(-2.0..2.0)).unwrap();
            let z = Complex64::from_polar(rng.gen_range(1.1..20.0), rng.gen_range(0.0..6.28));
            let composed = g_u(u1.compose(u2), z).unwrap();
            let chained = g_u(u1, g_u(u2, z).unwrap()).unwrap();
            assert!(
                (composed - chained).norm() <= 1e-10 * composed.norm(),
                "{composed} vs {chained}"
            );
            // commutes with cubing
            let a = g_u(u1, z * z * z).unwrap();
            let b = g_u(u1, z).unwrap();
            let b3 = b * b * b;
            assert!((a - b3).norm() <= 1e-10 * a.norm().max(1.0));
        }
    }

    #[test]
    fn trace_identity_path_stays_at_base() {
        let base = CubicParam::from_re(10.0, 10.0);
        let trace = trace_leaf(
            &base,
            &[WringU::identity()],
            LeafConstraint::SuperattractingPer { n: 1 },
            1024,
        )
        .unwrap();
        assert_eq!(trace.outcome, TraceOutcome::Complete);
        assert_eq!(trace.steps.len(), 1);
        let step = &trace.steps[0];
        assert!((step.p.c - base.c).norm() < 1e-9);
        assert!((step.p.v - base.v).norm() < 1e-9);
        assert!(step.residual_phi < 1e-9);
        assert!(step.residual_inv < 1e-9);
    }

    #[test]
    fn trace_scaling_segment() {
        // short s-segment from (10,10) holding v = c
        let base = CubicParam::from_re(10.0, 10.0);
        let path: Vec<WringU> = (1..=5)
            .map(|i| WringU::new(1.0 + 0.04 * i as f64, 0.0).unwrap())
            .collect();
        let trace = trace_leaf(&base, &path, LeafConstraint::SuperattractingPer { n: 1 }, 1024)
            .unwrap();
        assert_eq!(trace.outcome, TraceOutcome::Complete);
        assert_eq!(trace.steps.len(), 5);
        let g0 = green_minus(&base, 1024).value;
        for step in &trace.steps {
            assert!((step.p.v - step.p.c).norm() < 1e-9, "v = c violated");
            let gm = green_minus(&step.p, 1024).value;
            assert!(
                (gm - step.u.s * g0).abs() < 1e-6,
                "G- scaling: {} vs {}",
                gm,
                step.u.s * g0
            );
        }
    }

    #[test]
    fn transversal_chart_small_grid() {
        let k = c(2f64.powf(2.0 / 3.0) * 1000.0, 0.0);
        let t = transversal_disk(k, 9, None, 1024).unwrap();
        assert!(t.success_fraction() > 0.95, "{}", t.success_fraction());
        // center cell: y = 0, x ~ 2^{2/3}/k = 1e-3
        let mid = t.grid_n / 2;
        let x = t.x_at(mid, mid).expect("center must solve");
        assert!((x - c(1e-3, 0.0)).norm() < 2e-5, "x = {x}");
        // membership residual
        let p = t.param_at(mid, mid).unwrap();
        let phi = phi_minus(&p, 1024).unwrap().value;
        assert!((phi - k).norm() < 1e-8);
        assert!(t.verticality_lipschitz().is_finite());
        // below k_min: domain error
        assert!(transversal_disk(c(10.0, 0.0), 9, None, 1024).is_err());
    }
}
