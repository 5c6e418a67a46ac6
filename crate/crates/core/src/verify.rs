//! Named verification suites with pinned tolerances.
//!
//! Each suite runs a block of checks with its default parameters and
//! reports one pass/fail line per check; the acceptance test target and
//! the CLI `verify` command both drive these.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bif::{misiurewicz_solve, mu_bif_grid_estimate, solve_curve_intersections, MisSpec};
use crate::dynamics::CubicParam;
use crate::grid::Region;
use crate::itinerary::{
    chart_itineraries, cylinder_statistics_of, periodic_fraction_of, transverse_measure,
};
use crate::param::{
    classify_locus, green_minus, green_plus, marking_involution, phi_minus, LocusClass,
};
use crate::percurves::{
    equidist_potential, total_degree_check, v_roots_on_line, PerSign, PerSpec,
};
use crate::tol;
use crate::wring::{charts_min_distance, trace_leaf, transversal_disk, LeafConstraint, TraceOutcome, WringU};

const BUDGET: u32 = tol::DEFAULT_BUDGET;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub details: String,
}

impl Check {
    fn new(name: &str, passed: bool, details: String) -> Self {
        Check {
            name: name.into(),
            passed,
            details,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn collect(suite: &str, checks: Vec<Check>) -> Self {
        SuiteReport {
            suite: suite.into(),
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }
}

/// Suites available to the CLI `verify` command.
pub const SUITES: &[&str] = &[
    "identities",
    "degrees",
    "kiwi",
    "wring",
    "cylinders",
    "misiurewicz",
    "mass",
];

/// Runs a suite by name (`SUITES` plus the heavy `monge-ampere` block used
/// by the acceptance tests).
pub fn run_suite(name: &str) -> Option<SuiteReport> {
    match name {
        "identities" => Some(suite_identities()),
        "degrees" => Some(suite_degrees()),
        "kiwi" => Some(suite_kiwi()),
        "wring" => Some(suite_wring()),
        "cylinders" => Some(suite_cylinders()),
        "misiurewicz" => Some(suite_misiurewicz()),
        "mass" => Some(suite_mass()),
        "monge-ampere" => Some(suite_monge_ampere()),
        _ => None,
    }
}

fn random_param(rng: &mut ChaCha8Rng, scale: f64) -> CubicParam {
    CubicParam::new(
        Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)),
        Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)),
    )
}

/// Algebraic identities exact to ulps on 1000 random parameters, plus the
/// Green swap under the marking involution.
pub fn suite_identities() -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1D);
    let mut worst_cocrit = 0f64;
    let mut worst_inv = 0f64;
    let mut worst_swap = 0f64;
    let mut exact_fc = true;
    for _ in 0..1000 {
        let p = random_param(&mut rng, 2.0);
        // f(c) = v and f(-2c) = f(c), bit-exact in the factored form
        exact_fc &= p.eval(p.c) == p.v && p.eval(-2.0 * p.c) == p.v;
        // f(2c) = f(-c) within 4 ulps
        let a = p.eval(2.0 * p.c);
        let b = p.eval(-p.c);
        let scale = a.norm().max(b.norm()).max(1e-300);
        worst_cocrit = worst_cocrit.max((a - b).norm() / (f64::EPSILON * scale));
        // f(-c) = v + 4c^3 within ulps
        let direct = p.v + 4.0 * p.c * p.c * p.c;
        let scale2 = direct.norm().max(1e-300);
        worst_cocrit = worst_cocrit.max((b - direct).norm() / (f64::EPSILON * scale2));
        // involution squared
        let pp = marking_involution(&marking_involution(&p));
        let iscale = p.v.norm().max(4.0 * p.c.norm().powi(3)).max(1e-300);
        worst_inv = worst_inv
            .max((pp.v - p.v).norm() / (f64::EPSILON * iscale))
            .max((pp.c - p.c).norm() / (f64::EPSILON * p.c.norm().max(1e-300)));
        // Green swap under the involution
        let q = marking_involution(&p);
        let d1 = (green_plus(&q, BUDGET).value - green_minus(&p, BUDGET).value).abs();
        let d2 = (green_minus(&q, BUDGET).value - green_plus(&p, BUDGET).value).abs();
        worst_swap = worst_swap.max(d1).max(d2);
    }
    let checks = vec![
        Check::new(
            "critical-values-exact",
            exact_fc,
            "f(c) = v and f(-2c) = v bit-exact on 1000 samples".into(),
        ),
        Check::new(
            "cocritical-4ulp",
            worst_cocrit <= 4.0,
            format!("worst cocritical deviation {worst_cocrit:.2} ulps (cap 4)"),
        ),
        Check::new(
            "involution-squared-8ulp",
            worst_inv <= 8.0,
            format!("worst round-trip deviation {worst_inv:.2} ulps (cap 8)"),
        ),
        Check::new(
            "green-swap-1e-9",
            worst_swap <= 1e-9,
            format!("worst |G+- o iota - G-+| = {worst_swap:.3e} (cap 1e-9)"),
        ),
    ];
    SuiteReport::collect("identities", checks)
}

/// Curve degrees `3^{n-1}` / `3^n`, v-root counts, and the
/// equidistribution-potential convergence rate.
pub fn suite_degrees() -> SuiteReport {
    let mut checks = Vec::new();
    // total degrees for n = 1..4
    let mut ok = true;
    let mut details = String::new();
    for n in 1..=4u32 {
        let dp = total_degree_check(&PerSpec::new(PerSign::Plus, n, 0).unwrap());
        let dm = total_degree_check(&PerSpec::new(PerSign::Minus, n, 0).unwrap());
        let ep = 3usize.pow(n - 1);
        let em = 3usize.pow(n);
        let good = dp.as_ref().ok() == Some(&ep) && dm.as_ref().ok() == Some(&em);
        ok &= good;
        details.push_str(&format!(
            "n={n}: Per+ {:?} (want {ep}), Per- {:?} (want {em}); ",
            dp.ok(),
            dm.ok()
        ));
    }
    checks.push(Check::new("total-degrees", ok, details));

    // v-root counts at 50 random c0
    let mut rng = ChaCha8Rng::seed_from_u64(0xD6);
    let mut ok = true;
    let mut bad = String::from("all 3^{n-1}");
    'outer: for _ in 0..50 {
        let c0 = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        for n in 1..=4u32 {
            for sign in [PerSign::Plus, PerSign::Minus] {
                let spec = PerSpec::new(sign, n, 0).unwrap();
                match v_roots_on_line(&spec, c0) {
                    Ok(roots) => {
                        let count: usize = roots.iter().map(|r| r.multiplicity).sum();
                        if count != 3usize.pow(n - 1) {
                            ok = false;
                            bad = format!("count {count} != 3^{} at c0 = {c0}, n = {n}", n - 1);
                            break 'outer;
                        }
                    }
                    Err(e) => {
                        ok = false;
                        bad = format!("{e}");
                        break 'outer;
                    }
                }
            }
        }
    }
    checks.push(Check::new("v-root-counts", ok, bad));

    // equidistribution potential: |3^{-n} log|per| - G| <= A 3^{-n}
    let mut rng = ChaCha8Rng::seed_from_u64(0xE5);
    let mut pts = Vec::new();
    while pts.len() < 20 {
        let c = Complex64::from_polar(rng.gen_range(3.0..6.0), rng.gen_range(0.0..6.283));
        let v = Complex64::from_polar(rng.gen_range(0.0..1.0) * c.norm(), rng.gen_range(0.0..6.283));
        let p = CubicParam::new(c, v);
        if classify_locus(&p, BUDGET).class == LocusClass::Shift
            && green_plus(&p, BUDGET).value > 0.15
            && green_minus(&p, BUDGET).value > 0.15
        {
            pts.push(p);
        }
    }
    let mut fitted_a = 0f64;
    for p in &pts {
        for (sign, g) in [
            (PerSign::Plus, green_plus(p, BUDGET).value),
            (PerSign::Minus, green_minus(p, BUDGET).value),
        ] {
            for n in 4..=10u32 {
                for k in [0, n - 1] {
                    let spec = PerSpec::new(sign, n, k).unwrap();
                    let pot = equidist_potential(&spec, p);
                    fitted_a = fitted_a.max((pot - g).abs() * 3f64.powi(n as i32));
                }
            }
        }
    }
    checks.push(Check::new(
        "equidistribution-rate",
        fitted_a < 10.0,
        format!("fitted A = {fitted_a:.4} over 20 shift-locus points, n = 4..10 (cap 10)"),
    ));
    SuiteReport::collect("degrees", checks)
}

/// Near-infinity behavior: the escape-invariant asymptotic and the
/// potential bounds in the `|v| < 3|c|` wedge.
pub fn suite_kiwi() -> SuiteReport {
    let mut checks = Vec::new();
    // phi_minus(c, 0) / (2^{2/3} c) -> 1
    let two23 = 2f64.powf(2.0 / 3.0);
    let mut worst = [0f64; 2];
    for (slot, (mag, cap)) in [(1e2, 0.05), (1e4, 0.005)].iter().enumerate() {
        for i in 0..16 {
            let ang = 2.0 * std::f64::consts::PI * i as f64 / 16.0;
            let c = Complex64::from_polar(*mag, ang);
            let p = CubicParam::new(c, Complex64::new(0.0, 0.0));
            let dev = match phi_minus(&p, BUDGET) {
                Ok(pm) => (pm.value / (two23 * c) - Complex64::new(1.0, 0.0)).norm(),
                Err(_) => f64::INFINITY,
            };
            worst[slot] = worst[slot].max(dev);
        }
        let _ = cap;
    }
    checks.push(Check::new(
        "bottcher-asymptotic",
        worst[0] < 0.05 && worst[1] < 0.005,
        format!(
            "|phi-/(2^(2/3) c) - 1|: {:.3e} at |c|=1e2 (cap 5e-2), {:.3e} at |c|=1e4 (cap 5e-3)",
            worst[0], worst[1]
        ),
    ));

    // G bounds over the wedge |v| < 3|c|
    let mut rng = ChaCha8Rng::seed_from_u64(0x1717);
    let mut worst_minus = 0f64;
    let mut worst_plus = f64::NEG_INFINITY;
    for mag in [1e2, 1e3, 1e4] {
        for _ in 0..67 {
            let c = Complex64::from_polar(mag, rng.gen_range(0.0..6.283));
            let v = Complex64::from_polar(
                rng.gen_range(0.0..3.0) * mag * 0.999,
                rng.gen_range(0.0..6.283),
            );
            let p = CubicParam::new(c, v);
            let gm = green_minus(&p, BUDGET).value;
            let gp = green_plus(&p, BUDGET).value;
            worst_minus = worst_minus.max((gm - mag.ln()).abs());
            worst_plus = worst_plus.max(gp - mag.ln() / 3.0);
        }
    }
    checks.push(Check::new(
        "wedge-green-bounds",
        worst_minus <= 1.5 && worst_plus <= 1.5,
        format!(
            "max |G- - log|c|| = {worst_minus:.4}, max (G+ - log|c|/3) = {worst_plus:.4} (caps 1.5)"
        ),
    ));
    SuiteReport::collect("kiwi", checks)
}

/// Wringing group axioms, the leaf-trace scaling law, the rotation arc,
/// and the vertical-graph structure of transversal charts.
pub fn suite_wring() -> SuiteReport {
    let mut checks = Vec::new();

    // group axioms
    let mut rng = ChaCha8Rng::seed_from_u64(0x33);
    let mut unit_ok = true;
    let mut assoc_worst = 0f64;
    for _ in 0..100 {
        let mut mk = || WringU::new(rng.gen_range(0.1..4.0), rng.gen_range(-3.0..3.0)).unwrap();
        let (a, b, c) = (mk(), mk(), mk());
        unit_ok &= WringU::identity().compose(a) == a && a.compose(WringU::identity()) == a;
        let lhs = a.compose(b).compose(c);
        let rhs = a.compose(b.compose(c));
        let t_scale = (a.t * b.s * c.s).abs() + (b.t * c.s).abs() + c.t.abs() + 1.0;
        assoc_worst = assoc_worst
            .max((lhs.s - rhs.s).abs() / (f64::EPSILON * lhs.s.abs().max(1e-300)))
            .max((lhs.t - rhs.t).abs() / (f64::EPSILON * t_scale));
    }
    checks.push(Check::new(
        "group-axioms",
        unit_ok && assoc_worst <= 2.0,
        format!("unit exact, associativity worst {assoc_worst:.2} ulps (cap 2)"),
    ));

    // leaf trace from (10,10) holding v = c over s in [1,2]
    let base = CubicParam::from_re(10.0, 10.0);
    let path: Vec<WringU> = (1..=20)
        .map(|i| WringU::new(1.0 + i as f64 * 0.05, 0.0).unwrap())
        .collect();
    let trace = trace_leaf(&base, &path, LeafConstraint::SuperattractingPer { n: 1 }, BUDGET);
    let check = match trace {
        Ok(tr) if tr.outcome == TraceOutcome::Complete => {
            let g0 = green_minus(&base, BUDGET).value;
            let mut worst_scale = 0f64;
            let mut worst_inv = 0f64;
            for step in &tr.steps {
                let gm = green_minus(&step.p, BUDGET).value;
                worst_scale = worst_scale.max((gm - step.u.s * g0).abs());
                worst_inv = worst_inv.max((step.p.v - step.p.c).norm());
            }
            Check::new(
                "leaf-scaling",
                worst_scale < 1e-6 && worst_inv < 1e-9,
                format!(
                    "20 steps, worst |G- - s G-_0| = {worst_scale:.2e} (cap 1e-6), worst |v-c| = {worst_inv:.2e} (cap 1e-9)"
                ),
            )
        }
        Ok(tr) => Check::new(
            "leaf-scaling",
            false,
            format!("trace ended early: {:?} after {} steps", tr.outcome, tr.steps.len()),
        ),
        Err(e) => Check::new("leaf-scaling", false, format!("{e}")),
    };
    checks.push(check);

    // rotation arc: u = 1 + it preserves |phi-|
    let phi0 = phi_minus(&base, BUDGET).map(|p| p.value);
    let check = match phi0 {
        Ok(phi0) => {
            let path: Vec<WringU> = (1..=12)
                .map(|i| WringU::new(1.0, i as f64 * 0.03).unwrap())
                .collect();
            match trace_leaf(&base, &path, LeafConstraint::SuperattractingPer { n: 1 }, BUDGET) {
                Ok(tr) if tr.outcome == TraceOutcome::Complete => {
                    let mut worst = 0f64;
                    for step in &tr.steps {
                        let pm = phi_minus(&step.p, BUDGET)
                            .map(|p| p.value.norm())
                            .unwrap_or(f64::INFINITY);
                        worst = worst.max((pm - phi0.norm()).abs() / phi0.norm());
                    }
                    Check::new(
                        "rotation-arc",
                        worst < 1e-8,
                        format!("worst relative |phi-| drift {worst:.2e} (cap 1e-8)"),
                    )
                }
                other => Check::new("rotation-arc", false, format!("{other:?}")),
            }
        }
        Err(e) => Check::new("rotation-arc", false, format!("{e}")),
    };
    checks.push(check);

    // transversal graphs
    let two23 = 2f64.powf(2.0 / 3.0);
    let k1 = Complex64::new(two23 * 1000.0, 0.0);
    let k2 = Complex64::new(two23 * 1250.0, 0.0);
    let t1 = transversal_disk(k1, 33, None, BUDGET);
    let t2 = transversal_disk(k2, 33, None, BUDGET);
    let check = match (t1, t2) {
        (Ok(t1), Ok(t2)) => {
            let frac = t1.success_fraction();
            let lip = t1.verticality_lipschitz();
            let dist = charts_min_distance(&t1, &t2);
            Check::new(
                "transversal-graphs",
                frac >= 0.99 && lip.is_finite() && dist > 0.0,
                format!(
                    "solve fraction {frac:.4} (floor 0.99), Lipschitz fit {lip:.3e}, distinct-k separation {dist:.3e}"
                ),
            )
        }
        other => Check::new("transversal-graphs", false, format!("{other:?}")),
    };
    checks.push(check);

    SuiteReport::collect("wring", checks)
}

/// Cylinder statistics against the (1/3, 2/3) measure and the
/// point-component periodicity proxy on one transversal chart.
pub fn suite_cylinders() -> SuiteReport {
    let mut checks = Vec::new();
    let k = Complex64::new(2f64.powf(2.0 / 3.0) * 1000.0, 0.0);
    let chart = match transversal_disk(k, 256, None, BUDGET) {
        Ok(t) => t,
        Err(e) => {
            return SuiteReport::collect(
                "cylinders",
                vec![Check::new("chart", false, format!("{e}"))],
            )
        }
    };
    let measure = transverse_measure(&chart, BUDGET);
    let its = chart_itineraries(&chart, &measure, 6, 256, BUDGET);

    let s2 = cylinder_statistics_of(&its, 2);
    let f21 = s2.fractions.get("21").copied().unwrap_or(0.0);
    let f22 = s2.fractions.get("22").copied().unwrap_or(0.0);
    checks.push(Check::new(
        "depth-2-fractions",
        (f21 - 1.0 / 3.0).abs() <= 0.05 && (f22 - 2.0 / 3.0).abs() <= 0.05,
        format!("[2,1] = {f21:.4} (want 1/3 +-0.05), [2,2] = {f22:.4} (want 2/3 +-0.05)"),
    ));

    let s3 = cylinder_statistics_of(&its, 3);
    let expect3 = [("211", 1.0 / 9.0), ("212", 2.0 / 9.0), ("221", 2.0 / 9.0), ("222", 4.0 / 9.0)];
    let mut ok3 = true;
    let mut msg3 = String::new();
    for (w, e) in expect3 {
        let f = s3.fractions.get(w).copied().unwrap_or(0.0);
        ok3 &= (f - e).abs() <= 0.07;
        msg3.push_str(&format!("[{w}] = {f:.4} (want {e:.4}); "));
    }
    checks.push(Check::new("depth-3-fractions", ok3, msg3 + "(caps +-0.07)"));

    let excl = s2.excluded_mass.max(s3.excluded_mass);
    checks.push(Check::new(
        "excluded-mass",
        excl < 0.10,
        format!("excluded mass fraction {excl:.4} (cap 0.10)"),
    ));

    // point-component proxy
    let pf: Vec<_> = [2u32, 4, 6]
        .iter()
        .map(|&d| periodic_fraction_of(&its, d))
        .collect();
    let decreasing = pf[0].fraction > pf[1].fraction && pf[1].fraction > pf[2].fraction;
    let bounded = pf
        .iter()
        .all(|r| r.fraction <= r.nu_bound + 0.05);
    checks.push(Check::new(
        "periodic-proxy",
        decreasing && bounded,
        format!(
            "fractions {:.4}/{:.4}/{:.4} at depths 2/4/6, nu bounds {:.4}/{:.4}/{:.4} (+0.05)",
            pf[0].fraction, pf[1].fraction, pf[2].fraction, pf[0].nu_bound, pf[1].nu_bound, pf[2].nu_bound
        ),
    ));

    SuiteReport::collect("cylinders", checks)
}

/// Misiurewicz solving: the strict point, the superattracting impostor,
/// and residual certificates.
pub fn suite_misiurewicz() -> SuiteReport {
    let mut checks = Vec::new();
    let spec = MisSpec::new(2, 1, 2, 1).unwrap();
    let rep = misiurewicz_solve(spec, Region::new(-2.0, 2.0, -2.0, 2.0), 40);
    match rep {
        Ok(rep) => {
            let hit = rep.candidates.iter().find(|cand| {
                (cand.p.c - Complex64::new(1.0, 0.0)).norm() < 1e-7
                    && (cand.p.v - Complex64::new(-2.0, 0.0)).norm() < 1e-6
            });
            let check = match hit {
                Some(c) => {
                    let mult_ok = (c.plus_multiplier - Complex64::new(9.0, 0.0)).norm() < 1e-6
                        && (c.minus_multiplier - Complex64::new(9.0, 0.0)).norm() < 1e-6;
                    Check::new(
                        "strict-point",
                        c.residuals.0 < 1e-9 && c.residuals.1 < 1e-9 && mult_ok && c.strict == (true, true),
                        format!(
                            "(1,-2): residuals {:.1e}/{:.1e}, multipliers {}/{}, strict {:?}",
                            c.residuals.0, c.residuals.1, c.plus_multiplier, c.minus_multiplier, c.strict
                        ),
                    )
                }
                None => Check::new("strict-point", false, "(1,-2) not found".into()),
            };
            checks.push(check);
            let imp = rep.candidates.iter().find(|cand| {
                (cand.p.c - Complex64::new(0.5, 0.0)).norm() < 5e-4
                    && (cand.p.v - Complex64::new(-1.0, 0.0)).norm() < 1e-3
            });
            let check = match imp {
                Some(c) => Check::new(
                    "impostor-filtered",
                    c.strict == (true, false),
                    format!("(1/2,-1) found with strict = {:?} (superattracting -c)", c.strict),
                ),
                None => Check::new("impostor-filtered", false, "(1/2,-1) not found".into()),
            };
            checks.push(check);
        }
        Err(e) => checks.push(Check::new("solver", false, format!("{e}"))),
    }
    SuiteReport::collect("misiurewicz", checks)
}

/// Intersection masses: the exact `1/3` for the fixed-point pair and the
/// Bezout-style caps.
pub fn suite_mass() -> SuiteReport {
    let mut checks = Vec::new();
    let plus = PerSpec::new(PerSign::Plus, 1, 0).unwrap();
    let minus = PerSpec::new(PerSign::Minus, 1, 0).unwrap();
    let isect = solve_curve_intersections(&plus, &minus, Region::new(-3.0, 3.0, -3.0, 3.0), 32);
    match isect {
        Ok(isect) => {
            checks.push(Check::new(
                "pair-1010-total",
                (isect.total - 1.0 / 3.0).abs() < 1e-12 && isect.points.len() == 3,
                format!(
                    "3 points, total {} (want 1/3 within 1e-12)",
                    isect.total
                ),
            ));
        }
        Err(e) => checks.push(Check::new("pair-1010-total", false, format!("{e}"))),
    }
    let minus21 = PerSpec::new(PerSign::Minus, 2, 1).unwrap();
    let isect = solve_curve_intersections(&plus, &minus21, Region::new(-3.0, 3.0, -3.0, 3.0), 32);
    match isect {
        Ok(isect) => {
            let cap = 1.0 / 3.0 * 1.01;
            checks.push(Check::new(
                "pair-1021-window",
                isect.total >= 0.30 && isect.total <= 0.34 && isect.total <= cap,
                format!("total {} (want [0.30, 0.34], Bezout cap 1/3)", isect.total),
            ));
        }
        Err(e) => checks.push(Check::new("pair-1021-window", false, format!("{e}"))),
    }
    SuiteReport::collect("mass", checks)
}

/// Monge-Ampere sanity of the max-Green grid estimate.
pub fn suite_monge_ampere() -> SuiteReport {
    let mut checks = Vec::new();
    // escape side: G = G- > 0, pluriharmonic max branch
    let est = mu_bif_grid_estimate(
        Region::centered(Complex64::new(10.0, 0.0), 0.5),
        Region::centered(Complex64::new(10.0, 0.0), 0.5),
        16,
        0.07,
        BUDGET,
    );
    match est {
        Ok(est) => checks.push(Check::new(
            "escape-side-vanishes",
            est.total < 1e-3,
            format!("total {:.3e} (noise floor 1e-3)", est.total),
        )),
        Err(e) => checks.push(Check::new("escape-side-vanishes", false, format!("{e}"))),
    }
    // deep interior: G = 0 identically
    let est = mu_bif_grid_estimate(
        Region::centered(Complex64::new(0.0, 0.0), 0.05),
        Region::centered(Complex64::new(0.0, 0.0), 0.05),
        16,
        0.01,
        BUDGET,
    );
    match est {
        Ok(est) => checks.push(Check::new(
            "interior-vanishes",
            est.total < 1e-12,
            format!("total {:.3e} (cap 1e-12)", est.total),
        )),
        Err(e) => checks.push(Check::new("interior-vanishes", false, format!("{e}"))),
    }
    // Misiurewicz window: positive and resolution-stable within 30%
    let cw = Region::centered(Complex64::new(1.0, 0.0), 0.5);
    let vw = Region::centered(Complex64::new(-2.0, 0.0), 0.5);
    let smoothing = 0.065;
    let lo = mu_bif_grid_estimate(cw, vw, 16, smoothing, BUDGET);
    let hi = mu_bif_grid_estimate(cw, vw, 32, smoothing, BUDGET);
    match (lo, hi) {
        (Ok(lo), Ok(hi)) => {
            let rel = (hi.total - lo.total).abs() / hi.total.max(lo.total).max(1e-300);
            checks.push(Check::new(
                "misiurewicz-window-stable",
                lo.total > 0.0 && hi.total > 0.0 && rel <= 0.30,
                format!(
                    "totals {:.5e} (16^4) vs {:.5e} (32^4), relative change {rel:.3} (cap 0.30)",
                    lo.total, hi.total
                ),
            ));
        }
        other => checks.push(Check::new(
            "misiurewicz-window-stable",
            false,
            format!("{other:?}"),
        )),
    }
    SuiteReport::collect("monge-ampere", checks)
}

