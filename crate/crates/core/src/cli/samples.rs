//! Plot-ready samples of a lifted disc.

use std::f64::consts::TAU;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64 as C64;

use super::config::SampleGrid;
use crate::cotangent::{conormal_residual, holo_residual, LiftedDisc, LiftedStructure, DEFAULT_CHART_RADIUS};
use crate::structures::{AcsModel, HypersurfaceModel};

/// Column names in output order.
pub fn sample_header(n: usize) -> Vec<String> {
    let mut h: Vec<String> = ["kind", "zeta_re", "zeta_im"].iter().map(|s| s.to_string()).collect();
    for name in ["f", "g"] {
        for c in 1..=n {
            h.push(format!("{name}{c}_re"));
            h.push(format!("{name}{c}_im"));
        }
    }
    h.extend(["holo_residual", "conormal_residual", "rho_f"].iter().map(|s| s.to_string()));
    h
}

/// Boundary nodes first, then interior rays from the inside out.
pub fn sample_points(grid: &SampleGrid) -> Vec<(bool, C64)> {
    let mut pts: Vec<(bool, C64)> =
        (0..grid.boundary).map(|k| (true, C64::from_polar(1.0, TAU * k as f64 / grid.boundary as f64))).collect();
    for r in 1..=grid.radii {
        let rad = r as f64 / (grid.radii + 1) as f64;
        for k in 0..grid.rays {
            pts.push((false, C64::from_polar(rad, TAU * k as f64 / grid.rays as f64)));
        }
    }
    pts
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes one CSV row per grid point; returns the number of rows.
///
/// The holomorphicity residual is that of the lift; the conormal residual is left
/// empty at interior points. `rho_f` is `ρ(f(ζ))`.
pub fn write_samples<W: Write>(
    out: &mut W,
    fd: &LiftedDisc,
    j: &AcsModel,
    rho: &HypersurfaceModel,
    grid: &SampleGrid,
) -> io::Result<usize> {
    let n = fd.n();
    writeln!(out, "{}", sample_header(n).join(","))?;
    let lift = LiftedStructure::new(j);
    let stacked = fd.stacked();
    let poly = rho.rho();
    let pts = sample_points(grid);
    for &(on_boundary, z) in &pts {
        let mut row = vec![if on_boundary { "boundary" } else { "interior" }.to_string(), num(z.re), num(z.im)];
        let f = fd.f.eval(z);
        for v in f.iter().chain(&fd.g.eval(z)) {
            row.push(num(v.re));
            row.push(num(v.im));
        }
        let holo = holo_residual(&lift, &stacked, &[z], DEFAULT_CHART_RADIUS)
            .map(|r| r.max_norm())
            .unwrap_or(f64::NAN);
        row.push(num(holo));
        if on_boundary {
            let c = conormal_residual(rho, j, fd, z, 0.0)
                .map(|c| c.r.iter().fold(0.0f64, |m, v| m.max(v.abs())))
                .unwrap_or(f64::NAN);
            row.push(num(c));
        } else {
            row.push(String::new());
        }
        row.push(num(poly.eval(&f).re));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(pts.len())
}

/// [`write_samples`] into a new file at `path`.
pub fn emit_samples(
    fd: &LiftedDisc,
    j: &AcsModel,
    rho: &HypersurfaceModel,
    grid: &SampleGrid,
    path: &Path,
) -> io::Result<usize> {
    let mut w = BufWriter::new(File::create(path)?);
    let rows = write_samples(&mut w, fd, j, rho, grid)?;
    w.flush()?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rhmodel::{explicit_disc, BasePoint, GCoupling, ModelProblem};
    use nalgebra::DMatrix;

    fn explicit() -> (LiftedDisc, AcsModel) {
        let p = ModelProblem::new(DMatrix::from_row_slice(2, 2, &[0.0, 0.7, -0.7, 0.0].map(|v| C64::new(v, 0.0))), 3,
            GCoupling::LiftConsistent)
        .unwrap();
        (explicit_disc(&p, &BasePoint::new(C64::new(0.9, 0.3), 1.2).unwrap()), p.structure())
    }

    fn rows(grid: SampleGrid) -> Vec<Vec<String>> {
        let (d, j) = explicit();
        let mut buf = Vec::new();
        write_samples(&mut buf, &d, &j, &HypersurfaceModel::siegel(3), &grid).unwrap();
        String::from_utf8(buf).unwrap().lines().map(|l| l.split(',').map(String::from).collect()).collect()
    }

    #[test]
    fn zero_grid_gives_header_only() {
        let r = rows(SampleGrid { boundary: 0, radii: 0, rays: 0 });
        assert_eq!(r, vec![sample_header(3)]);
    }

    #[test]
    fn explicit_disc_boundary_rows_lie_on_the_hypersurface() {
        let r = rows(SampleGrid { boundary: 64, radii: 0, rays: 0 });
        assert_eq!(r.len(), 65);
        let col = |name: &str| r[0].iter().position(|h| h == name).unwrap();
        for row in &r[1..] {
            assert_eq!(row.len(), r[0].len());
            assert!(row[col("rho_f")].parse::<f64>().unwrap().abs() <= 1e-12);
            assert!(row[col("conormal_residual")].parse::<f64>().unwrap() <= 1e-12);
            assert!(row[col("holo_residual")].parse::<f64>().unwrap() <= 1e-12);
        }
    }

    #[test]
    fn values_keep_seventeen_significant_digits() {
        let r = rows(SampleGrid { boundary: 3, radii: 1, rays: 2 });
        assert_eq!(r.len(), 6);
        assert_eq!(r[4][0], "interior");
        assert!(r[4][r[0].len() - 2].is_empty());
        let v: f64 = r[1][1].parse().unwrap();
        assert_eq!(v, 1.0);
        assert_eq!(r[2][1].split('e').next().unwrap().len(), 18 + usize::from(r[2][1].starts_with('-')));
    }
}
