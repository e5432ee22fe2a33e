//! Piecewise-planar ground model over a uniform rectangular grid.
//!
//! Every grid cell `(u, v)` carries its own plane `z = A·x + B·y + C` in world
//! coordinates. Planes are fitted per cell from the four corner samples of an
//! elevation lattice, so neighbouring cells need not agree on shared edges.
//!
//! The ASCII grid format read and written here is the familiar header-plus-values
//! layout:
//!
//! ```text
//! ncols     51
//! nrows     101
//! xllcorner 0
//! yllcorner 0
//! cellsize  10
//! <nrows lines of ncols values, northernmost row first>
//! ```
//!
//! `ncols`/`nrows` count lattice *samples*; the resulting grid has one cell fewer
//! in each direction. Sample `(i, j)` sits at `(xll + i·cellsize, yll + j·cellsize)`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Points within this distance of the footprint edge are snapped onto it.
const EDGE_SNAP: f64 = 1e-9;

/// Elevation samples on a regular lattice; `values[row * n_cols + col]` with row 0
/// at `origin_y` (south).
#[derive(Debug, Clone, PartialEq)]
pub struct ElevationRaster {
    pub origin_x: f64,
    pub origin_y: f64,
    pub spacing: f64,
    pub n_cols: usize,
    pub n_rows: usize,
    pub values: Vec<f64>,
}

impl ElevationRaster {
    pub fn sample(&self, col: usize, row: usize) -> f64 {
        self.values[row * self.n_cols + col]
    }

    /// Samples `f(x, y)` on an `n_cols × n_rows` lattice.
    pub fn from_fn(
        origin_x: f64,
        origin_y: f64,
        spacing: f64,
        n_cols: usize,
        n_rows: usize,
        f: impl Fn(f64, f64) -> f64,
    ) -> Self {
        let mut values = Vec::with_capacity(n_cols * n_rows);
        for row in 0..n_rows {
            for col in 0..n_cols {
                values.push(f(
                    origin_x + col as f64 * spacing,
                    origin_y + row as f64 * spacing,
                ));
            }
        }
        Self {
            origin_x,
            origin_y,
            spacing,
            n_cols,
            n_rows,
            values,
        }
    }

    /// Parses the ASCII grid format described in the module docs.
    pub fn parse_ascii(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace().peekable();
        let mut n_cols = None;
        let mut n_rows = None;
        let mut xll = None;
        let mut yll = None;
        let mut cell = None;
        let mut nodata = None;

        while let Some(tok) = tokens.peek() {
            if tok.parse::<f64>().is_ok() {
                break;
            }
            let key = tokens.next().unwrap().to_ascii_lowercase();
            let value = tokens
                .next()
                .ok_or_else(|| Error::MalformedTerrain(format!("header key `{key}` has no value")))?;
            let num: f64 = value.parse().map_err(|_| {
                Error::MalformedTerrain(format!("header `{key}` value `{value}` is not numeric"))
            })?;
            match key.as_str() {
                "ncols" => n_cols = Some(parse_count(&key, num)?),
                "nrows" => n_rows = Some(parse_count(&key, num)?),
                "xllcorner" | "xll" | "xllcenter" => xll = Some(num),
                "yllcorner" | "yll" | "yllcenter" => yll = Some(num),
                "cellsize" => cell = Some(num),
                "nodata_value" => nodata = Some(num),
                other => {
                    return Err(Error::MalformedTerrain(format!("unknown header key `{other}`")))
                }
            }
        }

        let missing = |k: &str| Error::MalformedTerrain(format!("header is missing `{k}`"));
        let n_cols = n_cols.ok_or_else(|| missing("ncols"))?;
        let n_rows = n_rows.ok_or_else(|| missing("nrows"))?;
        let origin_x = xll.ok_or_else(|| missing("xllcorner"))?;
        let origin_y = yll.ok_or_else(|| missing("yllcorner"))?;
        let spacing = cell.ok_or_else(|| missing("cellsize"))?;

        let mut file_rows = Vec::with_capacity(n_cols * n_rows);
        for tok in tokens {
            let v: f64 = tok.parse().map_err(|_| {
                Error::TerrainData(format!("elevation value `{tok}` is not numeric"))
            })?;
            if nodata == Some(v) {
                return Err(Error::TerrainData("raster contains no-data samples".into()));
            }
            file_rows.push(v);
        }
        if file_rows.len() != n_cols * n_rows {
            return Err(Error::MalformedTerrain(format!(
                "header declares {n_cols}×{n_rows} = {} samples but file holds {}",
                n_cols * n_rows,
                file_rows.len()
            )));
        }

        // File rows run north to south; flip so row 0 is the southern edge.
        let mut values = Vec::with_capacity(file_rows.len());
        for row in (0..n_rows).rev() {
            values.extend_from_slice(&file_rows[row * n_cols..(row + 1) * n_cols]);
        }
        Ok(Self {
            origin_x,
            origin_y,
            spacing,
            n_cols,
            n_rows,
            values,
        })
    }

    pub fn read_ascii(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_ascii(&text)
    }

    pub fn to_ascii(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "ncols {}", self.n_cols);
        let _ = writeln!(out, "nrows {}", self.n_rows);
        let _ = writeln!(out, "xllcorner {}", self.origin_x);
        let _ = writeln!(out, "yllcorner {}", self.origin_y);
        let _ = writeln!(out, "cellsize {}", self.spacing);
        for row in (0..self.n_rows).rev() {
            let line: Vec<String> = (0..self.n_cols)
                .map(|col| self.sample(col, row).to_string())
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

fn parse_count(key: &str, num: f64) -> Result<usize> {
    if num.fract() != 0.0 || num < 0.0 {
        return Err(Error::MalformedTerrain(format!("`{key}` must be a non-negative integer")));
    }
    Ok(num as usize)
}

/// Coefficients of one cell's ground plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Plane {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.a * x + self.b * y + self.c
    }
}

/// Grid of planar patches approximating the ground surface.
#[derive(Debug, Clone, PartialEq)]
pub struct TerrainGrid {
    origin_x: f64,
    origin_y: f64,
    cell_size: f64,
    n_cols: usize,
    n_rows: usize,
    planes: Vec<Plane>,
}

impl TerrainGrid {
    /// Builds a grid from explicit per-cell planes (`planes[v * n_cols + u]`).
    pub fn from_planes(
        origin_x: f64,
        origin_y: f64,
        cell_size: f64,
        n_cols: usize,
        n_rows: usize,
        planes: Vec<Plane>,
    ) -> Result<Self> {
        if n_cols == 0 || n_rows == 0 {
            return Err(Error::MalformedTerrain("grid needs at least one cell".into()));
        }
        if !(cell_size > 0.0 && cell_size.is_finite()) {
            return Err(Error::MalformedTerrain(format!(
                "cell size must be positive, got {cell_size}"
            )));
        }
        if !origin_x.is_finite() || !origin_y.is_finite() {
            return Err(Error::MalformedTerrain("grid origin must be finite".into()));
        }
        if planes.len() != n_cols * n_rows {
            return Err(Error::MalformedTerrain(format!(
                "expected {} plane coefficients, got {}",
                n_cols * n_rows,
                planes.len()
            )));
        }
        if planes
            .iter()
            .any(|p| !(p.a.is_finite() && p.b.is_finite() && p.c.is_finite()))
        {
            return Err(Error::TerrainData("non-finite plane coefficient".into()));
        }
        Ok(Self {
            origin_x,
            origin_y,
            cell_size,
            n_cols,
            n_rows,
            planes,
        })
    }

    /// Fits one plane per cell: the least-squares plane through the cell's four
    /// corner samples.
    pub fn from_raster(raster: &ElevationRaster) -> Result<Self> {
        if raster.n_cols < 2 || raster.n_rows < 2 {
            return Err(Error::MalformedTerrain(format!(
                "lattice needs at least 2×2 samples, got {}×{}",
                raster.n_cols, raster.n_rows
            )));
        }
        if raster.values.len() != raster.n_cols * raster.n_rows {
            return Err(Error::MalformedTerrain(format!(
                "lattice declares {}×{} samples but holds {}",
                raster.n_cols,
                raster.n_rows,
                raster.values.len()
            )));
        }
        if let Some(i) = raster.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::TerrainData(format!(
                "sample {} (col {}, row {}) is missing or not finite",
                i,
                i % raster.n_cols,
                i / raster.n_cols
            )));
        }
        if !(raster.spacing > 0.0 && raster.spacing.is_finite()) {
            return Err(Error::MalformedTerrain(format!(
                "cell size must be positive, got {}",
                raster.spacing
            )));
        }

        let h = raster.spacing;
        let n_cols = raster.n_cols - 1;
        let n_rows = raster.n_rows - 1;
        let mut planes = Vec::with_capacity(n_cols * n_rows);
        for v in 0..n_rows {
            for u in 0..n_cols {
                let z00 = raster.sample(u, v);
                let z10 = raster.sample(u + 1, v);
                let z01 = raster.sample(u, v + 1);
                let z11 = raster.sample(u + 1, v + 1);
                // With corners at ±h/2 about the centre the normal equations decouple.
                let a = (z10 + z11 - z00 - z01) / (2.0 * h);
                let b = (z01 + z11 - z00 - z10) / (2.0 * h);
                let mean = 0.25 * (z00 + z10 + z01 + z11);
                let xc = raster.origin_x + (u as f64 + 0.5) * h;
                let yc = raster.origin_y + (v as f64 + 0.5) * h;
                planes.push(Plane {
                    a,
                    b,
                    c: mean - a * xc - b * yc,
                });
            }
        }
        Self::from_planes(raster.origin_x, raster.origin_y, h, n_cols, n_rows, planes)
    }

    pub fn load_ascii(path: &Path) -> Result<Self> {
        Self::from_raster(&ElevationRaster::read_ascii(path)?)
    }

    pub fn origin(&self) -> (f64, f64) {
        (self.origin_x, self.origin_y)
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn x_max(&self) -> f64 {
        self.origin_x + self.n_cols as f64 * self.cell_size
    }

    pub fn y_max(&self) -> f64 {
        self.origin_y + self.n_rows as f64 * self.cell_size
    }

    /// x coordinate of vertical grid line `u` (0 ..= n_cols).
    pub fn grid_x(&self, u: usize) -> f64 {
        self.origin_x + u as f64 * self.cell_size
    }

    /// y coordinate of horizontal grid line `v` (0 ..= n_rows).
    pub fn grid_y(&self, v: usize) -> f64 {
        self.origin_y + v as f64 * self.cell_size
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.origin_x - EDGE_SNAP
            && x <= self.x_max() + EDGE_SNAP
            && y >= self.origin_y - EDGE_SNAP
            && y <= self.y_max() + EDGE_SNAP
    }

    /// Cell `(u, v)` containing the point. Cells are half-open `[x_u, x_{u+1})`;
    /// the closing edge of the footprint belongs to the last cell.
    pub fn cell_of(&self, x: f64, y: f64) -> Result<(usize, usize)> {
        if !self.contains(x, y) {
            return Err(Error::OutOfBounds { x, y });
        }
        let index = |p: f64, origin: f64, n: usize| -> usize {
            let f = ((p - origin) / self.cell_size).floor();
            if f < 0.0 {
                0
            } else {
                (f as usize).min(n - 1)
            }
        };
        Ok((
            index(x, self.origin_x, self.n_cols),
            index(y, self.origin_y, self.n_rows),
        ))
    }

    pub fn plane(&self, u: usize, v: usize) -> &Plane {
        &self.planes[v * self.n_cols + u]
    }

    pub fn plane_at(&self, x: f64, y: f64) -> Result<&Plane> {
        let (u, v) = self.cell_of(x, y)?;
        Ok(self.plane(u, v))
    }

    pub fn ground_elevation(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.plane_at(x, y)?.eval(x, y))
    }

    /// Lowest and highest plane value over all cell corners.
    pub fn elevation_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in 0..self.n_rows {
            for u in 0..self.n_cols {
                let p = self.plane(u, v);
                for (du, dv) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                    let z = p.eval(self.grid_x(u + du), self.grid_y(v + dv));
                    lo = lo.min(z);
                    hi = hi.max(z);
                }
            }
        }
        (lo, hi)
    }

    /// Same grid with every plane rewritten for a footprint shifted by `(dx, dy)`.
    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        let planes = self
            .planes
            .iter()
            .map(|p| Plane {
                a: p.a,
                b: p.b,
                c: p.c - p.a * dx - p.b * dy,
            })
            .collect();
        Self {
            origin_x: self.origin_x + dx,
            origin_y: self.origin_y + dy,
            planes,
            ..self.clone()
        }
    }
}
