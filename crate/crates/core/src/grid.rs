//! Rectangular complex-plane grids of scalar samples: the discretization
//! carrier for potentials, current densities and component labels, with
//! portable-graymap and CSV serialization.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::io::{self, Write};
use std::path::Path;

use crate::error::{BifError, Result};

/// Closed rectangle in one complex coordinate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Region {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Region {
            re_min,
            re_max,
            im_min,
            im_max,
        }
    }

    /// Square window centered at `z` with half-side `r`.
    pub fn centered(z: Complex64, r: f64) -> Self {
        Region::new(z.re - r, z.re + r, z.im - r, z.im + r)
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }
}

/// What the two grid axes mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AxisMeaning {
    /// c-plane slice at fixed v.
    CPlaneAtFixedV,
    /// v-plane slice at fixed c.
    VPlaneAtFixedC,
    /// The y coordinate of a transversal chart near infinity.
    TransversalChart,
    /// One 2D slice of a product grid.
    ProductGridSlice,
    /// Dynamical plane of a single polynomial (used for component labels).
    DynamicalPlane,
}

/// Dense row-major grid of reals (or small-integer labels) with explicit
/// origin and spacing so emitted files are self-describing.
///
/// `values[iy * dims.0 + ix]` is the sample at
/// `origin + spacing * (ix + i*iy)`.
#[derive(Debug, Clone, Serialize)]
pub struct GridField {
    pub origin: Complex64,
    pub spacing: f64,
    pub dims: (usize, usize),
    pub values: Vec<f64>,
    pub axis_meaning: AxisMeaning,
}

impl GridField {
    /// Samples `field` over `region` on a `resolution x resolution` grid,
    /// rows evaluated in parallel, output ordering deterministic.
    pub fn sample<F>(
        region: Region,
        resolution: usize,
        axis_meaning: AxisMeaning,
        field: F,
    ) -> Result<GridField>
    where
        F: Fn(Complex64) -> f64 + Sync,
    {
        if resolution < 8 {
            return Err(BifError::Domain(format!(
                "grid resolution {resolution} below the minimum of 8"
            )));
        }
        let n = resolution;
        let sx = region.width() / (n - 1) as f64;
        let sy = region.height() / (n - 1) as f64;
        let spacing = sx.max(sy);
        let origin = Complex64::new(region.re_min, region.im_min);
        let values: Vec<f64> = (0..n)
            .into_par_iter()
            .flat_map_iter(|iy| {
                let field = &field;
                (0..n).map(move |ix| {
                    let z = Complex64::new(
                        origin.re + ix as f64 * spacing,
                        origin.im + iy as f64 * spacing,
                    );
                    field(z)
                })
            })
            .collect();
        Ok(GridField {
            origin,
            spacing,
            dims: (n, n),
            values,
            axis_meaning,
        })
    }

    #[inline]
    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.dims.0 + ix]
    }

    #[inline]
    pub fn set(&mut self, ix: usize, iy: usize, v: f64) {
        self.values[iy * self.dims.0 + ix] = v;
    }

    /// Coordinate of the grid node `(ix, iy)`.
    pub fn point(&self, ix: usize, iy: usize) -> Complex64 {
        Complex64::new(
            self.origin.re + ix as f64 * self.spacing,
            self.origin.im + iy as f64 * self.spacing,
        )
    }

    /// Nearest grid node containing `z`, if inside the grid.
    pub fn cell_of(&self, z: Complex64) -> Option<(usize, usize)> {
        let fx = (z.re - self.origin.re) / self.spacing;
        let fy = (z.im - self.origin.im) / self.spacing;
        let ix = fx.round();
        let iy = fy.round();
        if ix < 0.0 || iy < 0.0 || ix >= self.dims.0 as f64 || iy >= self.dims.1 as f64 {
            return None;
        }
        Some((ix as usize, iy as usize))
    }

    pub fn min_max(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.values {
            if v.is_finite() {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }

    /// Sum of `value * spacing^2` over all cells (deterministic order,
    /// compensated).
    pub fn total_mass(&self) -> f64 {
        kahan_sum(self.values.iter().copied()) * self.spacing * self.spacing
    }

    /// 16-bit big-endian binary P5 graymap, values affinely mapped onto
    /// `[0, 65535]`; the exact `min`/`max` go into a JSON sidecar written
    /// next to the image.
    pub fn write_pgm16(&self, path: &Path) -> io::Result<()> {
        let (lo, hi) = self.min_max();
        let span = if hi > lo { hi - lo } else { 1.0 };
        let mut buf = Vec::with_capacity(32 + 2 * self.values.len());
        write!(buf, "P5\n{} {}\n65535\n", self.dims.0, self.dims.1)?;
        for &v in &self.values {
            let t = if v.is_finite() { (v - lo) / span } else { 0.0 };
            let q = (t.clamp(0.0, 1.0) * 65535.0).round() as u16;
            buf.extend_from_slice(&q.to_be_bytes());
        }
        std::fs::write(path, &buf)?;

        let sidecar = serde_json::json!({
            "min": lo,
            "max": hi,
            "region": {
                "re_min": self.origin.re,
                "re_max": self.origin.re + (self.dims.0 - 1) as f64 * self.spacing,
                "im_min": self.origin.im,
                "im_max": self.origin.im + (self.dims.1 - 1) as f64 * self.spacing,
            },
            "resolution": [self.dims.0, self.dims.1],
        });
        let side_path = path.with_extension("json");
        std::fs::write(side_path, format!("{:#}\n", sidecar))
    }

    /// CSV rows `x,y,value` with a header.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x,y,value")?;
        for iy in 0..self.dims.1 {
            for ix in 0..self.dims.0 {
                let z = self.point(ix, iy);
                writeln!(w, "{},{},{}", z.re, z.im, self.get(ix, iy))?;
            }
        }
        Ok(())
    }
}

/// Result of a discrete Laplacian pass.
#[derive(Debug, Clone, Serialize)]
pub struct DensityField {
    pub field: GridField,
    /// Number of interior cells whose raw density was negative (rounding).
    pub clamped_cells: usize,
    /// Most negative raw density encountered before clamping.
    pub min_before_clamp: f64,
    /// Total mass before clamping (the telescoping flux estimate); equals
    /// `field.total_mass()` minus the clamped negative mass.
    pub total_unclamped: f64,
}

/// Five-point discrete Laplacian divided by `2 pi`, approximating the
/// density of `dd^c` of the sampled potential on the slice.
///
/// With this normalization a grid sampling `log|z - a|` carries total
/// discrete mass 1 when `a` is enclosed. Negative values (discretization
/// noise) are clamped to zero and reported; the border ring is zero.
pub fn laplacian_density(g: &GridField) -> DensityField {
    let (nx, ny) = g.dims;
    let mut out = GridField {
        origin: g.origin,
        spacing: g.spacing,
        dims: g.dims,
        values: vec![0.0; nx * ny],
        axis_meaning: g.axis_meaning,
    };
    let h2 = g.spacing * g.spacing;
    let norm = 1.0 / (2.0 * std::f64::consts::PI * h2);
    let mut clamped = 0usize;
    let mut worst = 0f64;
    let mut raw = Vec::with_capacity(nx * ny);
    for iy in 1..ny.saturating_sub(1) {
        for ix in 1..nx.saturating_sub(1) {
            let lap = g.get(ix + 1, iy) + g.get(ix - 1, iy) + g.get(ix, iy + 1)
                + g.get(ix, iy - 1)
                - 4.0 * g.get(ix, iy);
            let d = lap * norm;
            raw.push(d);
            if d < 0.0 {
                clamped += 1;
                worst = worst.min(d);
                out.set(ix, iy, 0.0);
            } else {
                out.set(ix, iy, d);
            }
        }
    }
    let total_unclamped = kahan_sum(raw.into_iter()) * h2;
    DensityField {
        field: out,
        clamped_cells: clamped,
        min_before_clamp: worst,
        total_unclamped,
    }
}

/// Compensated (Kahan-Babuska/Neumaier) summation in iteration order.
pub fn kahan_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_field_has_zero_density() {
        let g = GridField::sample(
            Region::new(-1.0, 1.0, -1.0, 1.0),
            32,
            AxisMeaning::CPlaneAtFixedV,
            |_| 7.25,
        )
        .unwrap();
        let d = laplacian_density(&g);
        assert_eq!(d.clamped_cells, 0);
        assert!(d.field.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn log_kernel_carries_unit_mass() {
        // log|z - a| has dd^c mass 1 at a with the 1/2pi normalization
        let a = Complex64::new(0.05, -0.02);
        let g = GridField::sample(
            Region::new(-1.0, 1.0, -1.0, 1.0),
            128,
            AxisMeaning::CPlaneAtFixedV,
            |z| (z - a).norm().ln(),
        )
        .unwrap();
        let d = laplacian_density(&g);
        // the telescoping (unclamped) sum is the flux through the boundary;
        // clamping near the singular cell only moves mass around it
        let total = d.total_unclamped;
        assert!((total - 1.0).abs() < 1e-2, "total = {total}");
        assert!(d.field.total_mass() >= total - 1e-12);
        // density vanishes away from the singularity up to the O(h^2)
        // truncation of the 5-point stencil
        let far = d.field.get(5, 5);
        assert!(far.abs() < 1e-3, "far = {far}");
        // a grid avoiding the singularity carries no mass
        let g = GridField::sample(
            Region::new(2.0, 3.0, 2.0, 3.0),
            64,
            AxisMeaning::CPlaneAtFixedV,
            |z| (z - a).norm().ln(),
        )
        .unwrap();
        let d = laplacian_density(&g);
        // zero up to the O(h^2) stencil truncation
        assert!(d.total_unclamped.abs() < 1e-4, "{}", d.total_unclamped);
    }

    #[test]
    fn resolution_floor_enforced() {
        let r = GridField::sample(
            Region::new(0.0, 1.0, 0.0, 1.0),
            4,
            AxisMeaning::CPlaneAtFixedV,
            |_| 0.0,
        );
        assert!(r.is_err());
    }

    #[test]
    fn pgm_and_csv_roundtrip_bytes() {
        let g = GridField::sample(
            Region::new(0.0, 1.0, 0.0, 1.0),
            8,
            AxisMeaning::VPlaneAtFixedC,
            |z| z.re + 2.0 * z.im,
        )
        .unwrap();
        let dir = std::env::temp_dir().join("bifcc_grid_test");
        std::fs::create_dir_all(&dir).unwrap();
        let img = dir.join("t.pgm");
        g.write_pgm16(&img).unwrap();
        let bytes1 = std::fs::read(&img).unwrap();
        g.write_pgm16(&img).unwrap();
        let bytes2 = std::fs::read(&img).unwrap();
        assert_eq!(bytes1, bytes2, "image bytes must be deterministic");
        assert!(bytes1.starts_with(b"P5\n8 8\n65535\n"));
        let sidecar = std::fs::read_to_string(dir.join("t.json")).unwrap();
        assert!(sidecar.contains("\"min\""));

        let mut csv1 = Vec::new();
        g.write_csv(&mut csv1).unwrap();
        let mut csv2 = Vec::new();
        g.write_csv(&mut csv2).unwrap();
        assert_eq!(csv1, csv2);
        assert!(csv1.starts_with(b"x,y,value\n"));
    }

    #[test]
    fn kahan_sums_accurately() {
        let xs = vec![1e16, 1.0, -1e16, 1.0];
        assert_eq!(kahan_sum(xs.iter().copied()), 2.0);
    }
}
