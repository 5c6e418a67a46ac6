//! Dense polynomial utilities: evaluation, DFT interpolation on circles,
//! and an Aberth-Ehrlich simultaneous root finder.
//!
//! Coefficients are stored low-to-high: `[a0, a1, ..., an]` represents
//! `a0 + a1 x + ... + an x^n`.

use num_complex::Complex64;

/// Horner evaluation.
pub fn poly_eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &a in coeffs.iter().rev() {
        acc = acc * z + a;
    }
    acc
}

/// Horner evaluation of value and derivative together.
pub fn poly_eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Drops trailing coefficients below `rel_tol` times the largest magnitude.
pub fn trim_degree(coeffs: &[Complex64], rel_tol: f64) -> &[Complex64] {
    let maxc = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if maxc == 0.0 {
        return &coeffs[..0];
    }
    let mut hi = coeffs.len();
    while hi > 0 && coeffs[hi - 1].norm() <= rel_tol * maxc {
        hi -= 1;
    }
    &coeffs[..hi]
}

/// Interpolates the values of `f` sampled at `n_nodes` equispaced points
/// on the circle of radius `radius` into polynomial coefficients, also
/// returning the largest sample magnitude (the scale of the coefficient
/// noise floor).
///
/// Exact (up to rounding) for polynomials of degree `< n_nodes`; uniform
/// nodes keep the inverse transform perfectly conditioned. When
/// `compensated` is set the sums run through Kahan accumulation.
pub fn interpolate_on_circle_with_scale<F>(
    n_nodes: usize,
    radius: f64,
    compensated: bool,
    f: F,
) -> (Vec<Complex64>, f64)
where
    F: Fn(Complex64) -> Complex64,
{
    let n = n_nodes;
    let tau = 2.0 * std::f64::consts::PI / n as f64;
    let samples: Vec<Complex64> = (0..n)
        .map(|j| {
            let ang = tau * j as f64;
            f(Complex64::from_polar(radius, ang))
        })
        .collect();
    let scale = samples.iter().map(|s| s.norm()).fold(0.0, f64::max);
    let mut coeffs = Vec::with_capacity(n);
    let inv_n = 1.0 / n as f64;
    for k in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut comp = Complex64::new(0.0, 0.0);
        for (j, &s) in samples.iter().enumerate() {
            // exact angle per term avoids drift of repeated rotation
            let ang = -tau * ((j * k) % n) as f64;
            let term = s * Complex64::from_polar(1.0, ang);
            if compensated {
                let y = term - comp;
                let t = acc + y;
                comp = (t - acc) - y;
                acc = t;
            } else {
                acc += term;
            }
        }
        coeffs.push(acc * inv_n / radius.powi(k as i32));
    }
    (coeffs, scale)
}

/// [`interpolate_on_circle_with_scale`] without the scale.
pub fn interpolate_on_circle<F>(
    n_nodes: usize,
    radius: f64,
    compensated: bool,
    f: F,
) -> Vec<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    interpolate_on_circle_with_scale(n_nodes, radius, compensated, f).0
}

/// Reconstructs a polynomial of degree `< n_nodes` by sampling on two
/// circles and keeping, per coefficient, the radius with the smaller
/// noise estimate `eps * max|sample| / r^k`.
///
/// A single circle cannot recover both ends of a polynomial whose
/// coefficients span many orders of magnitude: the small radius drowns the
/// top coefficients in the noise of the dominant samples, the large radius
/// drowns the bottom ones.
pub fn interpolate_two_radii<F>(
    n_nodes: usize,
    r_small: f64,
    r_big: f64,
    compensated: bool,
    f: F,
) -> Vec<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    let (lo, scale_lo) = interpolate_on_circle_with_scale(n_nodes, r_small, compensated, &f);
    if r_big <= r_small * 1.0001 {
        return lo;
    }
    let (hi, scale_hi) = interpolate_on_circle_with_scale(n_nodes, r_big, compensated, &f);
    (0..n_nodes)
        .map(|k| {
            let e_lo = scale_lo / r_small.powi(k as i32);
            let e_hi = scale_hi / r_big.powi(k as i32);
            if e_lo <= e_hi {
                lo[k]
            } else {
                hi[k]
            }
        })
        .collect()
}

/// All complex roots by Aberth-Ehrlich simultaneous iteration, with the
/// effective degree determined by trailing-coefficient trimming.
///
/// Multiple roots come back as clusters of nearby simple approximations;
/// callers polish against the exact map or merge clusters as needed.
pub fn aberth_roots(coeffs: &[Complex64], max_iter: u32, eps: f64) -> Vec<Complex64> {
    let coeffs = trim_degree(coeffs, 1e-14);
    aberth_roots_exact_degree(coeffs, max_iter, eps)
}

/// Initial guesses from the Newton polygon of the coefficient moduli
/// (Bini's scheme): one ring of guesses per upper-hull edge, at the radius
/// the edge slope predicts for that group of root moduli. Far better than
/// a single circle when the coefficients span many orders of magnitude.
fn newton_polygon_guesses(monic: &[Complex64]) -> Vec<Complex64> {
    let deg = monic.len() - 1;
    let pts: Vec<(f64, f64)> = monic
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > 0.0)
        .map(|(k, a)| (k as f64, a.norm().ln()))
        .collect();
    // upper convex hull, left to right
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let a = hull[hull.len() - 1];
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut guesses = Vec::with_capacity(deg);
    // roots at the origin when the low coefficients vanish
    let k_first = hull.first().map(|&(k, _)| k as usize).unwrap_or(0);
    for i in 0..k_first {
        let ang = 2.0 * std::f64::consts::PI * i as f64 / k_first.max(1) as f64;
        guesses.push(Complex64::from_polar(1e-6, ang));
    }
    for w in hull.windows(2) {
        let (k1, h1) = w[0];
        let (k2, h2) = w[1];
        let count = (k2 - k1).round() as usize;
        let radius = ((h1 - h2) / (k2 - k1)).exp().clamp(1e-9, 1e9);
        for i in 0..count {
            let ang = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / count as f64
                + 0.61803398875 * k1;
            guesses.push(Complex64::from_polar(radius, ang));
        }
    }
    guesses
}

/// Aberth-Ehrlich with the degree taken verbatim from the slice length
/// (for callers that know the polynomial is monic of full degree; the
/// relative trim would misfire when interior coefficients dwarf the
/// leading one).
pub fn aberth_roots_exact_degree(coeffs: &[Complex64], max_iter: u32, eps: f64) -> Vec<Complex64> {
    let deg = coeffs.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    if deg == 1 {
        return vec![-coeffs[0] / coeffs[1]];
    }
    let lead = coeffs[deg];
    let monic: Vec<Complex64> = coeffs.iter().map(|&a| a / lead).collect();
    let mut roots = newton_polygon_guesses(&monic);
    debug_assert_eq!(roots.len(), deg);

    for _ in 0..max_iter {
        let mut moved = 0f64;
        for i in 0..deg {
            let zi = roots[i];
            let (p, dp) = poly_eval_with_derivative(&monic, zi);
            if p.norm() == 0.0 {
                continue;
            }
            let newton = if dp.norm() > 0.0 {
                p / dp
            } else {
                Complex64::new(eps, eps)
            };
            let mut sum = Complex64::new(0.0, 0.0);
            for (j, &zj) in roots.iter().enumerate() {
                if j != i {
                    let d = zi - zj;
                    if d.norm_sqr() > 1e-300 {
                        sum += d.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * sum;
            let w = if denom.norm() > 1e-12 {
                newton / denom
            } else {
                newton
            };
            if w.is_finite() {
                roots[i] = zi - w;
                moved = moved.max(w.norm() / (1.0 + zi.norm()));
            }
        }
        if moved < eps {
            break;
        }
    }
    roots
}

/// Merges root approximations lying within `rel_radius * (1 + |z|)` of
/// each other; returns representatives with their cluster sizes
/// (multiplicities), ordered deterministically by `(re, im)`.
pub fn cluster_roots(roots: &[Complex64], rel_radius: f64) -> Vec<(Complex64, usize)> {
    let mut sorted: Vec<Complex64> = roots.to_vec();
    sorted.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    let mut used = vec![false; sorted.len()];
    for i in 0..sorted.len() {
        if used[i] {
            continue;
        }
        let mut members = vec![sorted[i]];
        used[i] = true;
        let radius = rel_radius * (1.0 + sorted[i].norm());
        for j in (i + 1)..sorted.len() {
            if !used[j] && (sorted[j] - sorted[i]).norm() <= radius {
                members.push(sorted[j]);
                used[j] = true;
            }
        }
        let centroid = members.iter().sum::<Complex64>() / members.len() as f64;
        out.push((centroid, members.len()));
    }
    out
}
