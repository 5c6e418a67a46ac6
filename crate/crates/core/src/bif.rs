//! Misiurewicz-point solving, intersection-based approximation of the
//! bifurcation measure, and the max-Green Monge-Ampere grid estimate.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{refine_cycle, CubicParam};
use crate::error::{BifError, Result};
use crate::grid::{kahan_sum, Region};
use crate::param::max_green;
use crate::percurves::{per_value_dv, v_roots_on_line, PerSign, PerSpec};
use crate::solve::newton_2c;
use crate::tol;

/// A solved intersection of a plus and a minus curve.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IntersectionPoint {
    pub p: CubicParam,
    pub residuals: (f64, f64),
    /// Condition estimate of the final Jacobian; above
    /// [`tol::JACOBIAN_CONDITION_FLAG`] the point is flagged and its
    /// multiplicity is estimated by local root counting.
    pub condition: f64,
    pub multiplicity: usize,
    /// Critical points collide here (`c = 0`).
    pub degenerate_c: bool,
}

/// Outcome of an intersection solve over a region.
#[derive(Debug, Clone, Serialize)]
pub struct PairIntersections {
    pub plus: PerSpec,
    pub minus: PerSpec,
    pub points: Vec<IntersectionPoint>,
    /// Weighted total `sum multiplicity * 3^{-n-m}` over all points.
    pub total: f64,
    /// Same, excluding points flagged `degenerate_c`.
    pub total_excluding_degenerate: f64,
    /// Newton runs dropped for singular Jacobians or stagnation.
    pub dropped_seeds: usize,
}

fn residual_pair(
    plus: &PerSpec,
    minus: &PerSpec,
    c: Complex64,
    v: Complex64,
) -> Result<(Complex64, Complex64)> {
    let p = CubicParam::new(c, v);
    let (rp, _) = per_value_dv(plus, &p);
    let (rm, _) = per_value_dv(minus, &p);
    if !rp.is_finite() || !rm.is_finite() {
        return Err(BifError::Budget("residual left floating-point range".into()));
    }
    Ok((rp, rm))
}

/// Solves `Per^+(n,k) = Per^-(m,l) = 0` over the c-region by damped Newton
/// seeded from exact points of the plus curve (its v-roots over a coarse
/// c-grid), deduplicates, and estimates multiplicities at flagged
/// near-degenerate points by local root counting.
pub fn solve_curve_intersections(
    plus: &PerSpec,
    minus: &PerSpec,
    region: Region,
    seed_grid: usize,
) -> Result<PairIntersections> {
    if plus.sign != PerSign::Plus || minus.sign != PerSign::Minus {
        return Err(BifError::Domain(
            "solve_curve_intersections expects a plus spec and a minus spec".into(),
        ));
    }
    // keep the number of Newton runs at desk scale for higher degrees
    let per_c = plus.v_degree();
    let budget_runs = 24_000usize;
    let grid_n = seed_grid
        .min(((budget_runs / per_c.max(1)) as f64).sqrt() as usize)
        .max(8);

    let cs: Vec<Complex64> = (0..grid_n * grid_n)
        .map(|idx| {
            let ix = idx % grid_n;
            let iy = idx / grid_n;
            Complex64::new(
                region.re_min + region.width() * (ix as f64 + 0.5) / grid_n as f64,
                region.im_min + region.height() * (iy as f64 + 0.5) / grid_n as f64,
            )
        })
        .collect();

    let runs: Vec<std::result::Result<(crate::solve::Newton2,), ()>> = cs
        .par_iter()
        .flat_map_iter(|&c0| {
            let seeds = v_roots_on_line(plus, c0).unwrap_or_default();
            seeds.into_iter().map(move |root| {
                newton_2c(
                    |c, v| residual_pair(plus, minus, c, v),
                    c0,
                    root.v,
                    1e-12,
                    150,
                )
                .map(|s| (s,))
                .map_err(|_| ())
            })
        })
        .collect();

    let mut dropped = 0usize;
    let mut sols: Vec<crate::solve::Newton2> = Vec::new();
    for r in runs {
        match r {
            Ok((s,)) => sols.push(s),
            Err(()) => dropped += 1,
        }
    }

    // in-region filter on c, then cluster: solutions at a singular
    // (multiple) root only agree to ~residual^{1/mult}, far coarser than
    // the simple-root dedupe radius
    sols.retain(|s| region.contains(s.x));
    sols.sort_by(|a, b| {
        (a.residual, a.x.re, a.x.im)
            .partial_cmp(&(b.residual, b.x.re, b.x.im))
            .unwrap()
    });
    let mut clusters: Vec<(crate::solve::Newton2, usize)> = Vec::new();
    for s in sols {
        let cluster_radius = 2e-3 * (1.0 + s.x.norm());
        match clusters.iter_mut().find(|(m, _)| {
            (m.x - s.x).norm_sqr() + (m.y - s.y).norm_sqr() < cluster_radius * cluster_radius
        }) {
            Some((m, count)) => {
                *count += 1;
                if s.condition > m.condition {
                    m.condition = s.condition;
                }
            }
            None => clusters.push((s, 1)),
        }
    }

    let weight = 3f64.powi(-((plus.n + minus.n) as i32));
    let mut points = Vec::with_capacity(clusters.len());
    for (s, _hits) in &clusters {
        // a cleanly conditioned cluster is one simple root; anything with
        // an elevated condition number (tangencies converge with smeared
        // Jacobians well below the hard flag) gets its local degree
        // counted explicitly
        let sniff = s.condition > tol::MULTIPLICITY_SNIFF_CONDITION;
        let multiplicity = if sniff {
            local_root_count(plus, minus, s.x, s.y)
        } else {
            1
        };
        let p = CubicParam::new(s.x, s.y);
        let (rp, rm) = residual_pair(plus, minus, s.x, s.y)?;
        points.push(IntersectionPoint {
            p,
            residuals: (rp.norm(), rm.norm()),
            condition: s.condition,
            multiplicity,
            degenerate_c: s.x.norm() < if sniff { 1e-4 } else { 1e-6 },
        });
    }
    let total = weight * points.iter().map(|q| q.multiplicity as f64).sum::<f64>();
    let total_excluding_degenerate = weight
        * points
            .iter()
            .filter(|q| !q.degenerate_c)
            .map(|q| q.multiplicity as f64)
            .sum::<f64>();
    Ok(PairIntersections {
        plus: *plus,
        minus: *minus,
        points,
        total,
        total_excluding_degenerate,
        dropped_seeds: dropped,
    })
}

/// Local degree of the residual map at a flagged point: the number of
/// distinct solutions of `F = delta` near the point for small generic
/// `delta`, maximized over two perturbation directions.
fn local_root_count(plus: &PerSpec, minus: &PerSpec, c0: Complex64, v0: Complex64) -> usize {
    let eps = 1e-9;
    let deltas = [
        (
            Complex64::new(0.62, 0.31) * eps,
            Complex64::new(-0.27, 0.55) * eps,
        ),
        (
            Complex64::new(-0.41, 0.52) * eps,
            Complex64::new(0.58, 0.23) * eps,
        ),
    ];
    let ring = 6e-3 * (1.0 + c0.norm());
    let capture = 3.0 * ring;
    let mut best = 1usize;
    for (d1, d2) in deltas {
        let mut found: Vec<(Complex64, Complex64)> = Vec::new();
        for i in 0..5 {
            for j in 0..5 {
                let seed_c = c0
                    + Complex64::new(
                        ring * (i as f64 - 2.0) / 2.0,
                        ring * (j as f64 - 2.0) / 2.0,
                    );
                let sol = newton_2c(
                    |c, v| {
                        let (rp, rm) = residual_pair(plus, minus, c, v)?;
                        Ok((rp - d1, rm - d2))
                    },
                    seed_c,
                    v0,
                    1e-13,
                    120,
                );
                if let Ok(s) = sol {
                    let near =
                        (s.x - c0).norm() < capture && (s.y - v0).norm() < capture.max(1e-2);
                    if near
                        && !found.iter().any(|(fc, fv)| {
                            (fc - s.x).norm() + (fv - s.y).norm() < 1e-5 * (1.0 + c0.norm())
                        })
                    {
                        found.push((s.x, s.y));
                    }
                }
            }
        }
        best = best.max(found.len());
    }
    best
}

/// Misiurewicz preperiodicity data `(n, k, m, l)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MisSpec {
    pub n: u32,
    pub k: u32,
    pub m: u32,
    pub l: u32,
}

impl MisSpec {
    pub fn new(n: u32, k: u32, m: u32, l: u32) -> Result<Self> {
        if k >= n || l >= m {
            return Err(BifError::Domain(
                "MisSpec requires k < n and l < m".into(),
            ));
        }
        if n + m > 8 {
            return Err(BifError::Domain(
                "MisSpec: n + m > 8 exceeds the desk-scale bound".into(),
            ));
        }
        Ok(MisSpec { n, k, m, l })
    }
}

/// A solved critically-preperiodic parameter with certification data.
#[derive(Debug, Clone, Serialize)]
pub struct MisiurewiczCandidate {
    pub p: CubicParam,
    pub spec: MisSpec,
    /// `|f^n(c) - f^k(c)|` and `|f^m(-c) - f^l(-c)|`.
    pub residuals: (f64, f64),
    /// Multiplier of the cycle the orbit of `+c` lands on.
    pub plus_multiplier: Complex64,
    pub minus_multiplier: Complex64,
    /// Strict preperiodicity of (`+c`, `-c`): landing cycle repelling and
    /// the critical point not itself periodic.
    pub strict: (bool, bool),
    /// Critical points collide (`c = 0`); never counted as Misiurewicz.
    pub degenerate: bool,
}

/// Report of a Misiurewicz solve.
#[derive(Debug, Clone, Serialize)]
pub struct MisiurewiczReport {
    pub candidates: Vec<MisiurewiczCandidate>,
    pub dropped_seeds: usize,
}

fn classify_side(
    p: &CubicParam,
    crit: Complex64,
    n: u32,
    k: u32,
) -> (Complex64, bool) {
    let landing = p.iterate(crit, k);
    let cyc = match refine_cycle(p, landing, n - k) {
        Some(c) => c,
        None => return (Complex64::new(f64::NAN, f64::NAN), false),
    };
    let repelling = cyc.multiplier.norm() > 1.0;
    let on_cycle = cyc
        .points
        .iter()
        .any(|&z| (z - crit).norm() < tol::STRICT_CYCLE_TOL);
    (cyc.multiplier, repelling && !on_cycle)
}

/// Damped Newton on `(f^n(c) - f^k(c), f^m(-c) - f^l(-c))` from curve-based
/// seeds over the region; deduplicates, classifies strictness via cycle
/// refinement, and returns all solutions (degenerate `c = 0` flagged, never
/// strict).
pub fn misiurewicz_solve(
    spec: MisSpec,
    region: Region,
    seed_grid: usize,
) -> Result<MisiurewiczReport> {
    let plus = PerSpec::new(PerSign::Plus, spec.n, spec.k)?;
    let minus = PerSpec::new(PerSign::Minus, spec.m, spec.l)?;
    let isect = solve_curve_intersections(&plus, &minus, region, seed_grid)?;
    let mut candidates = Vec::with_capacity(isect.points.len());
    for pt in &isect.points {
        let p = pt.p;
        let degenerate = pt.degenerate_c;
        let (plus_mult, strict_plus) = if degenerate {
            (Complex64::new(0.0, 0.0), false)
        } else {
            classify_side(&p, p.c, spec.n, spec.k)
        };
        let (minus_mult, strict_minus) = if degenerate {
            (Complex64::new(0.0, 0.0), false)
        } else {
            classify_side(&p, -p.c, spec.m, spec.l)
        };
        candidates.push(MisiurewiczCandidate {
            p,
            spec,
            residuals: pt.residuals,
            plus_multiplier: plus_mult,
            minus_multiplier: minus_mult,
            strict: (strict_plus, strict_minus),
            degenerate,
        });
    }
    Ok(MisiurewiczReport {
        candidates,
        dropped_seeds: isect.dropped_seeds,
    })
}

/// Weighted intersection estimate of the bifurcation measure over all
/// pairs `(n,k) x (m,l)` with `n, m <= n_max`.
#[derive(Debug, Clone, Serialize)]
pub struct MuBifIntersections {
    pub pairs: Vec<PairIntersections>,
    pub total: f64,
    pub total_excluding_degenerate: f64,
}

pub fn mu_bif_intersection_estimate(
    n_max: u32,
    region: Region,
    seed_grid: usize,
) -> Result<MuBifIntersections> {
    if n_max > 4 {
        return Err(BifError::Domain(
            "mu_bif_intersection_estimate: n_max > 4 exceeds the desk-scale bound".into(),
        ));
    }
    let mut pairs = Vec::new();
    for n in 1..=n_max {
        for k in 0..n {
            for m in 1..=n_max {
                for l in 0..m {
                    let plus = PerSpec::new(PerSign::Plus, n, k)?;
                    let minus = PerSpec::new(PerSign::Minus, m, l)?;
                    pairs.push(solve_curve_intersections(&plus, &minus, region, seed_grid)?);
                }
            }
        }
    }
    let total = kahan_sum(pairs.iter().map(|p| p.total));
    let total_excluding_degenerate =
        kahan_sum(pairs.iter().map(|p| p.total_excluding_degenerate));
    Ok(MuBifIntersections {
        pairs,
        total,
        total_excluding_degenerate,
    })
}

/// Discrete Monge-Ampere estimate of `(dd^c max(G^+, G^-))^2` over a
/// product window.
#[derive(Debug, Clone, Serialize)]
pub struct MaEstimate {
    /// Grid points per real axis: `[Re c, Im c, Re v, Im v]`.
    pub dims: [usize; 4],
    pub c_window: Region,
    pub v_window: Region,
    pub smoothing_radius: f64,
    /// Clamped mixed-determinant density per interior cell, flattened
    /// row-major in the axis order of `dims`.
    pub density: Vec<f64>,
    pub total: f64,
    pub cell_volume: f64,
}

fn box_filter_axis(values: &mut Vec<f64>, dims: [usize; 4], axis: usize, radius: usize) {
    if radius == 0 {
        return;
    }
    let n = dims[axis];
    let stride = match axis {
        0 => dims[1] * dims[2] * dims[3],
        1 => dims[2] * dims[3],
        2 => dims[3],
        _ => 1,
    };
    let total = dims[0] * dims[1] * dims[2] * dims[3];
    let lines = total / n;
    let mut out = vec![0.0f64; total];
    for line in 0..lines {
        // base index of this line: distribute the non-axis indices
        let mut rem = line;
        let mut base = 0usize;
        for ax in 0..4 {
            if ax == axis {
                continue;
            }
            let extent = dims[ax];
            let s = match ax {
                0 => dims[1] * dims[2] * dims[3],
                1 => dims[2] * dims[3],
                2 => dims[3],
                _ => 1,
            };
            let coord = rem % extent;
            rem /= extent;
            base += coord * s;
        }
        for i in 0..n {
            let lo = i.saturating_sub(radius);
            let hi = (i + radius).min(n - 1);
            let mut acc = 0.0;
            for j in lo..=hi {
                acc += values[base + j * stride];
            }
            out[base + i * stride] = acc / (hi - lo + 1) as f64;
        }
    }
    *values = out;
}

/// Samples `max(G^+, G^-)` on a 4D grid over `c_window x v_window`,
/// smooths it by a box average of the given physical radius, and forms the
/// mixed Monge-Ampere density from second differences of the complex
/// Hessian (clamped at zero).
pub fn mu_bif_grid_estimate(
    c_window: Region,
    v_window: Region,
    resolution: usize,
    smoothing_radius: f64,
    budget: u32,
) -> Result<MaEstimate> {
    if resolution < 16 {
        return Err(BifError::Domain(
            "mu_bif_grid_estimate: resolution per real axis must be >= 16".into(),
        ));
    }
    if resolution > 64 {
        return Err(BifError::MemoryGuard(
            "mu_bif_grid_estimate: above 64^4 cells".into(),
        ));
    }
    let n = resolution;
    let dims = [n, n, n, n];
    let h_c = c_window.width().max(c_window.height()) / (n - 1) as f64;
    let h_v = v_window.width().max(v_window.height()) / (n - 1) as f64;

    let mut values: Vec<f64> = (0..n * n * n * n)
        .into_par_iter()
        .map(|idx| {
            let ivi = idx % n;
            let ivr = (idx / n) % n;
            let ici = (idx / (n * n)) % n;
            let icr = idx / (n * n * n);
            let c = Complex64::new(
                c_window.re_min + icr as f64 * h_c,
                c_window.im_min + ici as f64 * h_c,
            );
            let v = Complex64::new(
                v_window.re_min + ivr as f64 * h_v,
                v_window.im_min + ivi as f64 * h_v,
            );
            max_green(&CubicParam::new(c, v), budget)
        })
        .collect();

    let rad_c = (smoothing_radius / h_c).round() as usize;
    let rad_v = (smoothing_radius / h_v).round() as usize;
    box_filter_axis(&mut values, dims, 0, rad_c);
    box_filter_axis(&mut values, dims, 1, rad_c);
    box_filter_axis(&mut values, dims, 2, rad_v);
    box_filter_axis(&mut values, dims, 3, rad_v);

    let at = |icr: usize, ici: usize, ivr: usize, ivi: usize| -> f64 {
        values[((icr * n + ici) * n + ivr) * n + ivi]
    };
    let margin_c = rad_c + 1;
    let margin_v = rad_v + 1;
    let mut density = vec![0.0f64; n * n * n * n];
    let norm = 8.0 / (std::f64::consts::PI * std::f64::consts::PI);
    let cell_volume = h_c * h_c * h_v * h_v;
    let mut masses: Vec<f64> = Vec::new();
    for icr in margin_c..n - margin_c {
        for ici in margin_c..n - margin_c {
            for ivr in margin_v..n - margin_v {
                for ivi in margin_v..n - margin_v {
                    let g0 = at(icr, ici, ivr, ivi);
                    let gxx =
                        (at(icr + 1, ici, ivr, ivi) - 2.0 * g0 + at(icr - 1, ici, ivr, ivi))
                            / (h_c * h_c);
                    let gyy =
                        (at(icr, ici + 1, ivr, ivi) - 2.0 * g0 + at(icr, ici - 1, ivr, ivi))
                            / (h_c * h_c);
                    let gss =
                        (at(icr, ici, ivr + 1, ivi) - 2.0 * g0 + at(icr, ici, ivr - 1, ivi))
                            / (h_v * h_v);
                    let gtt =
                        (at(icr, ici, ivr, ivi + 1) - 2.0 * g0 + at(icr, ici, ivr, ivi - 1))
                            / (h_v * h_v);
                    let mixed = |da: isize, db: isize, axis_a: usize, axis_b: usize| -> f64 {
                        let idx = |sa: isize, sb: isize| -> f64 {
                            let mut coord = [icr as isize, ici as isize, ivr as isize, ivi as isize];
                            coord[axis_a] += sa * da;
                            coord[axis_b] += sb * db;
                            at(
                                coord[0] as usize,
                                coord[1] as usize,
                                coord[2] as usize,
                                coord[3] as usize,
                            )
                        };
                        let h_a = if axis_a < 2 { h_c } else { h_v };
                        let h_b = if axis_b < 2 { h_c } else { h_v };
                        (idx(1, 1) - idx(1, -1) - idx(-1, 1) + idx(-1, -1)) / (4.0 * h_a * h_b)
                    };
                    let gxs = mixed(1, 1, 0, 2);
                    let gxt = mixed(1, 1, 0, 3);
                    let gys = mixed(1, 1, 1, 2);
                    let gyt = mixed(1, 1, 1, 3);

                    let g_ccb = 0.25 * (gxx + gyy);
                    let g_vvb = 0.25 * (gss + gtt);
                    let g_cvb_re = 0.25 * (gxs + gyt);
                    let g_cvb_im = 0.25 * (gxt - gys);
                    let det = g_ccb * g_vvb - (g_cvb_re * g_cvb_re + g_cvb_im * g_cvb_im);
                    let d = if g_ccb <= 0.0 || g_vvb <= 0.0 {
                        0.0
                    } else {
                        (norm * det).max(0.0)
                    };
                    density[((icr * n + ici) * n + ivr) * n + ivi] = d;
                    masses.push(d * cell_volume);
                }
            }
        }
    }
    let total = kahan_sum(masses.into_iter());
    Ok(MaEstimate {
        dims,
        c_window,
        v_window,
        smoothing_radius,
        density,
        total,
        cell_volume,
    })
}
