//! Figure-eight decomposition of the dynamical plane, two-symbol
//! itineraries of the marked critical point, the (1/3, 2/3) cylinder
//! measure, transverse measures on transversal disks, and the statistics
//! that probe the decomposition of the bifurcation current.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, VecDeque};

use crate::dynamics::{green_below_threshold, CubicParam};
use crate::error::{BifError, Result};
use crate::grid::{kahan_sum, AxisMeaning, GridField, Region};
use crate::param::{green_minus, green_plus};
use crate::tol;
use crate::wring::Transversal;

/// Itinerary symbol: which lobe of the figure eight an orbit point is in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Symbol {
    U1,
    U2,
    /// Within grid margin of the pinch, or the component test failed.
    Ambiguous,
}

/// Two-symbol itinerary of the marked critical point.
#[derive(Debug, Clone, Serialize)]
pub struct Itinerary {
    /// One entry per defined prefix position (at most `depth`).
    pub symbols: Vec<Symbol>,
    /// Requested depth.
    pub depth: u32,
    /// Largest prefix length before the orbit leaves the coding region.
    pub defined_depth: u32,
}

impl Itinerary {
    /// The prefix as bytes 1/2, or `None` if any entry is ambiguous or the
    /// defined depth is shorter than `len`.
    pub fn word(&self, len: usize) -> Option<Vec<u8>> {
        if self.symbols.len() < len {
            return None;
        }
        let mut w = Vec::with_capacity(len);
        for s in &self.symbols[..len] {
            match s {
                Symbol::U1 => w.push(1),
                Symbol::U2 => w.push(2),
                Symbol::Ambiguous => return None,
            }
        }
        Some(w)
    }
}

/// Flood-filled labeling of `{G_f < G^- (1 - margin)}`.
#[derive(Debug, Clone)]
pub struct FigureEight {
    /// 0 = outside, 1 = U1, 2 = U2.
    pub labels: GridField,
    /// Level actually used: `G^- (1 - margin)`.
    pub threshold: f64,
    pub g_minus: f64,
    pub g_plus: f64,
}

impl FigureEight {
    /// Label of the cell containing `z`.
    pub fn label_at(&self, z: Complex64) -> Symbol {
        match self.labels.cell_of(z) {
            Some((ix, iy)) => match self.labels.get(ix, iy) as u8 {
                1 => Symbol::U1,
                2 => Symbol::U2,
                _ => Symbol::Ambiguous,
            },
            None => Symbol::Ambiguous,
        }
    }
}

fn flood_components(inset: &[bool], nx: usize, ny: usize) -> (Vec<u32>, usize) {
    let mut labels = vec![0u32; inset.len()];
    let mut next = 0u32;
    let mut queue = VecDeque::new();
    for start in 0..inset.len() {
        if !inset[start] || labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        queue.push_back(start);
        while let Some(idx) = queue.pop_front() {
            let ix = idx % nx;
            let iy = idx / nx;
            let mut visit = |jx: usize, jy: usize| {
                let j = jy * nx + jx;
                if inset[j] && labels[j] == 0 {
                    labels[j] = next;
                    queue.push_back(j);
                }
            };
            if ix > 0 {
                visit(ix - 1, iy);
            }
            if ix + 1 < nx {
                visit(ix + 1, iy);
            }
            if iy > 0 {
                visit(ix, iy - 1);
            }
            if iy + 1 < ny {
                visit(ix, iy + 1);
            }
        }
    }
    (labels, next as usize)
}

fn try_figure_eight(
    p: &CubicParam,
    window: Region,
    resolution: usize,
    threshold: f64,
    budget: u32,
) -> Result<GridField> {
    let inset_field = GridField::sample(window, resolution, AxisMeaning::DynamicalPlane, |z| {
        match green_below_threshold(p, z, threshold, budget) {
            Some(true) => 1.0,
            _ => 0.0,
        }
    })?;
    let (nx, ny) = inset_field.dims;
    let inset: Vec<bool> = inset_field.values.iter().map(|&v| v == 1.0).collect();
    let (comp, ncomp) = flood_components(&inset, nx, ny);
    if ncomp != 2 {
        return Err(BifError::Resolution(format!(
            "figure-eight flood fill found {ncomp} components at resolution {resolution}"
        )));
    }
    let c_cell = inset_field
        .cell_of(p.c)
        .ok_or_else(|| BifError::Resolution("critical point outside the window".into()))?;
    let c_comp = comp[c_cell.1 * nx + c_cell.0];
    if c_comp == 0 {
        return Err(BifError::Resolution(
            "critical point cell not inside the level set at this resolution".into(),
        ));
    }
    let mut labels = inset_field;
    for (slot, &comp_id) in labels.values.iter_mut().zip(&comp) {
        *slot = if comp_id == 0 {
            0.0
        } else if comp_id == c_comp {
            2.0
        } else {
            1.0
        };
    }
    Ok(labels)
}

/// Labels the sublevel set `{G_f < G^-(1 - margin)}` into its two
/// components: `U2` contains `+c`, the other is `U1`. Fails with a
/// resolution error if the flood fill does not see exactly two components
/// even after one automatic refinement (the pinch at `-c` is the usual
/// culprit).
pub fn figure_eight_labels(
    p: &CubicParam,
    window: Option<Region>,
    resolution: usize,
    budget: u32,
) -> Result<FigureEight> {
    let gm = green_minus(p, budget);
    if !gm.escaped {
        return Err(BifError::Domain(
            "figure_eight_labels: -c does not escape, no figure eight".into(),
        ));
    }
    let gp = green_plus(p, budget);
    let threshold = gm.value * (1.0 - tol::FIGURE_EIGHT_MARGIN);
    if gp.value >= threshold {
        return Err(BifError::Domain(format!(
            "figure_eight_labels: G+ = {} >= threshold {}: coding region empty",
            gp.value, threshold
        )));
    }
    let window = window.unwrap_or_else(|| {
        let radius = 1.05 * p.escape_radius().max((gm.value + 0.4).exp());
        Region::centered(Complex64::new(0.0, 0.0), radius)
    });
    let labels = match try_figure_eight(p, window, resolution, threshold, budget) {
        Ok(l) => l,
        Err(BifError::Resolution(_)) => {
            // refine once near the pinch (globally doubling the grid)
            try_figure_eight(p, window, resolution * 2, threshold, budget)?
        }
        Err(e) => return Err(e),
    };
    Ok(FigureEight {
        labels,
        threshold,
        g_minus: gm.value,
        g_plus: gp.value,
    })
}

/// Itinerary of `+c` under the figure-eight coding. Ambiguity is in-band:
/// a failed component test or a pinch-adjacent orbit point yields
/// `Symbol::Ambiguous`, never an error.
pub fn itinerary_of_critical(p: &CubicParam, depth: u32, resolution: usize, budget: u32) -> Itinerary {
    if depth == 0 {
        return Itinerary {
            symbols: Vec::new(),
            depth,
            defined_depth: 0,
        };
    }
    let fig = match figure_eight_labels(p, None, resolution, budget) {
        Ok(f) => f,
        Err(_) => {
            return Itinerary {
                symbols: Vec::new(),
                depth,
                defined_depth: 0,
            }
        }
    };
    itinerary_with_labels(p, depth, &fig)
}

/// Same, reusing an already computed labeling.
pub fn itinerary_with_labels(p: &CubicParam, depth: u32, fig: &FigureEight) -> Itinerary {
    let mut symbols = Vec::new();
    let mut z = p.c;
    let mut level = fig.g_plus; // G(f^i(c)) = 3^i G+
    let spacing = fig.labels.spacing;
    let mut defined = 0u32;
    for _ in 0..depth {
        if level >= fig.threshold {
            break;
        }
        defined += 1;
        let sym = if (z + p.c).norm() < 2.0 * spacing {
            Symbol::Ambiguous // pinch margin around -c
        } else {
            fig.label_at(z)
        };
        symbols.push(sym);
        z = p.eval(z);
        level *= 3.0;
    }
    Itinerary {
        symbols,
        depth,
        defined_depth: defined,
    }
}

/// Exact rational mass `prod d_{alpha_i} / 3^n` (numerator a power of 2,
/// denominator a power of 3, already coprime).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NuMass {
    pub num: u128,
    pub den: u128,
}

impl NuMass {
    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// Mass of the cylinder of sequences starting with `word` under the
/// (1/3, 2/3) measure: `d_1 = 1`, `d_2 = 2`, mass `prod d / 3^{|word|}`.
pub fn nu_cylinder_mass(word: &[u8]) -> Result<NuMass> {
    if word.len() > 80 {
        return Err(BifError::Domain("nu_cylinder_mass: word too long".into()));
    }
    let mut num: u128 = 1;
    for &s in word {
        match s {
            1 => {}
            2 => num *= 2,
            other => {
                return Err(BifError::Domain(format!(
                    "nu_cylinder_mass: symbol {other} outside {{1, 2}}"
                )))
            }
        }
    }
    Ok(NuMass {
        num,
        den: 3u128.pow(word.len() as u32),
    })
}

/// Discrete transverse measure `T^+ /\ [Delta]` on a solved chart.
#[derive(Debug, Clone, Serialize)]
pub struct TransverseMeasure {
    pub grid_n: usize,
    /// Clamped cell masses, row-major; `NaN` marks missing cells (chart
    /// gaps or border).
    pub cell_masses: Vec<f64>,
    /// `G^+` per cell (`NaN` where the chart has a gap).
    pub g_plus: Vec<f64>,
    pub total: f64,
    /// Fraction of in-disk cells without a mass value.
    pub missing_fraction: f64,
}

/// Discrete Laplacian (in the chart's y coordinate) of `G^+` restricted to
/// the chart, normalized by `1/2pi` and clamped at zero. Gap cells are
/// excluded from the total and reported.
pub fn transverse_measure(t: &Transversal, budget: u32) -> TransverseMeasure {
    let n = t.grid_n;
    let g_plus: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (ix, iy) = (idx % n, idx / n);
            match t.param_at(ix, iy) {
                Some(p) => green_plus(&p, budget).value,
                None => f64::NAN,
            }
        })
        .collect();
    let mut cell_masses = vec![f64::NAN; n * n];
    let norm = 1.0 / (2.0 * std::f64::consts::PI);
    for iy in 1..n - 1 {
        for ix in 1..n - 1 {
            let center = g_plus[iy * n + ix];
            let nb = [
                g_plus[iy * n + ix - 1],
                g_plus[iy * n + ix + 1],
                g_plus[(iy - 1) * n + ix],
                g_plus[(iy + 1) * n + ix],
            ];
            if center.is_nan() || nb.iter().any(|v| v.is_nan()) {
                continue;
            }
            let lap = nb.iter().sum::<f64>() - 4.0 * center;
            cell_masses[iy * n + ix] = (norm * lap).max(0.0);
        }
    }
    let total = kahan_sum(cell_masses.iter().copied().filter(|v| !v.is_nan()));
    let in_disk = t.attempted.max(1);
    let have = cell_masses.iter().filter(|v| !v.is_nan()).count();
    TransverseMeasure {
        grid_n: n,
        cell_masses,
        g_plus,
        total,
        missing_fraction: 1.0 - (have as f64 / in_disk as f64).min(1.0),
    }
}

/// Empirical cylinder distribution on a chart.
#[derive(Debug, Clone, Serialize)]
pub struct CylinderStats {
    pub k: Complex64,
    pub depth: u32,
    pub resolution: usize,
    /// Word (e.g. "21") to mass fraction among the defined cells,
    /// conditioned on the forced first symbol 2.
    pub fractions: BTreeMap<String, f64>,
    /// Fraction of measure excluded for ambiguity/short defined depth.
    pub excluded_mass: f64,
    pub total_mass: f64,
}

fn word_key(w: &[u8]) -> String {
    w.iter().map(|d| char::from(b'0' + d)).collect()
}

/// Itineraries of the mass-bearing chart cells, computed once and shared
/// by the per-depth statistics (the per-parameter flood fills dominate the
/// cost).
#[derive(Debug, Clone)]
pub struct ChartItineraries {
    pub k: Complex64,
    pub resolution: usize,
    /// `(cell index, cell mass, itinerary)` for every cell with positive
    /// transverse measure.
    pub entries: Vec<(usize, f64, Itinerary)>,
    pub max_depth: u32,
}

/// Computes itineraries of `+c` (to `max_depth`) on every chart cell
/// carrying positive transverse measure.
pub fn chart_itineraries(
    t: &Transversal,
    measure: &TransverseMeasure,
    max_depth: u32,
    itin_resolution: usize,
    budget: u32,
) -> ChartItineraries {
    let n = t.grid_n;
    let mass_cells: Vec<(usize, f64)> = measure
        .cell_masses
        .iter()
        .enumerate()
        .filter_map(|(i, &m)| if m.is_finite() && m > 0.0 { Some((i, m)) } else { None })
        .collect();
    let entries: Vec<(usize, f64, Itinerary)> = mass_cells
        .par_iter()
        .map(|&(idx, m)| {
            let (ix, iy) = (idx % n, idx / n);
            let it = t
                .param_at(ix, iy)
                .map(|p| itinerary_of_critical(&p, max_depth, itin_resolution, budget))
                .unwrap_or(Itinerary {
                    symbols: Vec::new(),
                    depth: max_depth,
                    defined_depth: 0,
                });
            (idx, m, it)
        })
        .collect();
    ChartItineraries {
        k: t.k,
        resolution: n,
        entries,
        max_depth,
    }
}

/// Cylinder statistics at `depth` from precomputed itineraries
/// (`depth <= max_depth`).
pub fn cylinder_statistics_of(its: &ChartItineraries, depth: u32) -> CylinderStats {
    let mut buckets: BTreeMap<String, f64> = BTreeMap::new();
    let mut included = 0f64;
    let mut excluded = 0f64;
    for (_, m, it) in &its.entries {
        match it.word(depth as usize) {
            Some(w) if w.first() == Some(&2) => {
                *buckets.entry(word_key(&w)).or_insert(0.0) += m;
                included += m;
            }
            _ => excluded += m,
        }
    }
    let denom = if included > 0.0 { included } else { 1.0 };
    let fractions = buckets.into_iter().map(|(k, v)| (k, v / denom)).collect();
    let total = included + excluded;
    CylinderStats {
        k: its.k,
        depth,
        resolution: its.resolution,
        fractions,
        excluded_mass: if total > 0.0 { excluded / total } else { 0.0 },
        total_mass: total,
    }
}

/// Distributes the transverse measure over itinerary prefixes of `+c`.
/// Cells with insufficient defined depth or ambiguous symbols are
/// excluded and their measure reported.
pub fn cylinder_statistics(
    t: &Transversal,
    measure: &TransverseMeasure,
    depth: u32,
    itin_resolution: usize,
    budget: u32,
) -> CylinderStats {
    let its = chart_itineraries(t, measure, depth, itin_resolution, budget);
    cylinder_statistics_of(&its, depth)
}

/// True when `w` repeats with some period `q <= q_max`.
pub fn word_period_consistent(w: &[u8], q_max: u32) -> bool {
    for q in 1..=q_max as usize {
        if q <= w.len() && (q..w.len()).all(|i| w[i] == w[i % q]) {
            return true;
        }
    }
    false
}

/// Report of the point-component statistical proxy.
#[derive(Debug, Clone, Serialize)]
pub struct PeriodicFraction {
    pub depth: u32,
    /// Measure fraction of cells whose depth-prefix is consistent with a
    /// period `<= depth/2`.
    pub fraction: f64,
    /// Exact nu-mass of those cylinders, conditioned on first symbol 2.
    pub nu_bound: f64,
    pub excluded_mass: f64,
}

/// Exact conditioned nu-mass of period-consistent words of the given depth.
pub fn nu_periodic_bound(depth: u32) -> f64 {
    let q_max = depth / 2;
    let mut num_sum: u128 = 0;
    let total_words = 1u128 << (depth - 1);
    for bits in 0..total_words {
        let mut w = Vec::with_capacity(depth as usize);
        w.push(2u8);
        for i in 0..depth - 1 {
            w.push(if (bits >> i) & 1 == 1 { 2 } else { 1 });
        }
        if word_period_consistent(&w, q_max) {
            num_sum += nu_cylinder_mass(&w).expect("valid word").num;
        }
    }
    // divide by nu([2]) = 2/3: (num_sum / 3^depth) * 3 / 2
    (num_sum as f64) * 3.0 / (2.0 * 3f64.powi(depth as i32))
}

/// Periodic-prefix fraction at `depth` from precomputed itineraries.
pub fn periodic_fraction_of(its: &ChartItineraries, depth: u32) -> PeriodicFraction {
    let stats = cylinder_statistics_of(its, depth);
    let q_max = depth / 2;
    let mut frac = 0.0;
    for (word, f) in &stats.fractions {
        let w: Vec<u8> = word.bytes().map(|b| b - b'0').collect();
        if word_period_consistent(&w, q_max) {
            frac += f;
        }
    }
    PeriodicFraction {
        depth,
        fraction: if stats.total_mass > 0.0 { frac } else { 0.0 },
        nu_bound: nu_periodic_bound(depth),
        excluded_mass: stats.excluded_mass,
    }
}

/// Measure fraction of period-consistent itinerary prefixes on the chart;
/// the statistical proxy for "full transverse mass on point components"
/// (prefix consistency, not true component periodicity).
pub fn periodic_fraction(
    t: &Transversal,
    measure: &TransverseMeasure,
    depth: u32,
    itin_resolution: usize,
    budget: u32,
) -> PeriodicFraction {
    let its = chart_itineraries(t, measure, depth, itin_resolution, budget);
    periodic_fraction_of(&its, depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::preimages;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const BUDGET: u32 = 1024;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn figure_eight_at_shift_parameter() {
        // flood-fill oracle fixture (2048^2): at (10,0) the point z = 0
        // lands in U2, the component of +c; -2c = -20 is in U1
        let p = CubicParam::from_re(10.0, 0.0);
        let fig = figure_eight_labels(&p, None, 256, BUDGET).unwrap();
        assert_eq!(fig.label_at(c(10.0, 0.0)), Symbol::U2);
        assert_eq!(fig.label_at(c(-20.0, 0.0)), Symbol::U1);
        assert_eq!(fig.label_at(c(0.0, 0.0)), Symbol::U2);
    }

    #[test]
    fn preimage_degree_split() {
        // random w with G(w) slightly below 3 G^-: 3 preimages, 1 in U1
        // and 2 in U2
        let p = CubicParam::from_re(10.0, 0.0);
        let fig = figure_eight_labels(&p, None, 384, BUDGET).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut checked = 0;
        for _ in 0..20 {
            let target = 2.7 * fig.g_minus;
            let w = Complex64::from_polar(target.exp(), rng.gen_range(0.0..6.283));
            let pre = preimages(&p, w);
            assert_eq!(pre.len(), 3);
            let labels: Vec<Symbol> = pre.iter().map(|&z| fig.label_at(z)).collect();
            if labels.iter().any(|&s| s == Symbol::Ambiguous) {
                continue; // grid-edge case; rare
            }
            let n1 = labels.iter().filter(|&&s| s == Symbol::U1).count();
            let n2 = labels.iter().filter(|&&s| s == Symbol::U2).count();
            assert_eq!((n1, n2), (1, 2), "split violated at w = {w}");
            checked += 1;
        }
        assert!(checked >= 15, "too many ambiguous draws: {checked}");
    }

    #[test]
    fn itinerary_examples() {
        // on Per+(1,0): c is fixed, all symbols 2
        let p = CubicParam::from_re(10.0, 10.0);
        let it = itinerary_of_critical(&p, 6, 256, BUDGET);
        assert_eq!(it.defined_depth, 6);
        assert!(it.symbols.iter().all(|&s| s == Symbol::U2));

        // (10,0): defined depth exactly 2 (3^2 G+ > threshold), starts 2
        let p = CubicParam::from_re(10.0, 0.0);
        let it = itinerary_of_critical(&p, 6, 256, BUDGET);
        assert_eq!(it.defined_depth, 2);
        assert_eq!(it.symbols[0], Symbol::U2);
        assert_eq!(it.symbols[1], Symbol::U2, "z = 0 labels U2 per the oracle");

        // depth 0: empty
        let it = itinerary_of_critical(&p, 0, 256, BUDGET);
        assert_eq!(it.defined_depth, 0);
        assert!(it.symbols.is_empty());
    }

    #[test]
    fn nu_masses_exact() {
        assert_eq!(nu_cylinder_mass(&[2]).unwrap(), NuMass { num: 2, den: 3 });
        assert_eq!(nu_cylinder_mass(&[2, 1]).unwrap(), NuMass { num: 2, den: 9 });
        assert_eq!(nu_cylinder_mass(&[2, 2]).unwrap(), NuMass { num: 4, den: 9 });
        // partition of unity at depth 3
        let mut total_num = 0u128;
        for bits in 0..8u32 {
            let w: Vec<u8> = (0..3).map(|i| if (bits >> i) & 1 == 1 { 2 } else { 1 }).collect();
            let m = nu_cylinder_mass(&w).unwrap();
            assert_eq!(m.den, 27);
            total_num += m.num;
        }
        assert_eq!(total_num, 27);
        assert!(nu_cylinder_mass(&[3]).is_err());
    }

    #[test]
    fn nu_measure_is_probability_at_every_depth() {
        for depth in 1..=10u32 {
            let mut total = 0u128;
            for bits in 0..(1u64 << depth) {
                let w: Vec<u8> = (0..depth)
                    .map(|i| if (bits >> i) & 1 == 1 { 2 } else { 1 })
                    .collect();
                total += nu_cylinder_mass(&w).unwrap().num;
            }
            assert_eq!(total, 3u128.pow(depth), "depth {depth}");
        }
    }

    #[test]
    fn word_periodicity() {
        assert!(word_period_consistent(&[2, 2, 2, 2], 2));
        assert!(word_period_consistent(&[2, 1, 2, 1], 2));
        assert!(!word_period_consistent(&[2, 1, 1, 2], 2));
        assert!(!word_period_consistent(&[2, 2, 1, 2], 2));
    }

    #[test]
    fn nu_periodic_bounds_decrease() {
        let b2 = nu_periodic_bound(2);
        let b4 = nu_periodic_bound(4);
        let b6 = nu_periodic_bound(6);
        // exact values: 2/3, 10/27, 2/9
        assert!((b2 - 2.0 / 3.0).abs() < 1e-15);
        assert!((b4 - 10.0 / 27.0).abs() < 1e-15);
        assert!((b6 - 2.0 / 9.0).abs() < 1e-15);
        assert!(b2 > b4 && b4 > b6);
    }
}
