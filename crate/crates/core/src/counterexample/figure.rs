//! CSV and OBJ exports of the curves and the `F1` slice.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::bodies::{lift, Curve};
use super::intersection::PlanarSlices;
use super::map::IdempotentMap;
use crate::error::Result;

/// Uniform grid on `[0, 1]` with an odd number of points (at least three),
/// so that `t = 1/2` and `t = 1` are nodes.
pub fn figure_grid(resolution: usize) -> Vec<f64> {
    let n = (resolution.max(3) / 2) * 2 + 1;
    (0..n).map(|k| if k == n - 1 { 1.0 } else { k as f64 / (n - 1) as f64 }).collect()
}

fn csv(rows: impl Iterator<Item = (f64, Vec<f64>)>) -> String {
    let mut out = String::from("t,l,x,y,z,s\n");
    for (t, v) in rows {
        let _ = writeln!(out, "{t},{},{},{},{},{}", v[0], v[1], v[2], v[3], v[4]);
    }
    out
}

/// Writes `<curve>.csv`, `<curve>_p1.csv` for the three curves and
/// `f1_slice_boundary.obj` into `dir`.
pub fn export_figure(dir: &Path, resolution: usize) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let grid = figure_grid(resolution);
    let p1 = IdempotentMap::p1();
    let mut written = Vec::new();
    for c in Curve::ALL {
        let raw = dir.join(format!("{}.csv", c.name()));
        fs::write(&raw, csv(grid.iter().map(|&t| (t, c.eval(t)))))?;
        let mapped = dir.join(format!("{}_p1.csv", c.name()));
        fs::write(&mapped, csv(grid.iter().map(|&t| (t, p1.apply(&c.eval(t))))))?;
        written.push(raw);
        written.push(mapped);
    }
    let slices = PlanarSlices::new()?;
    let center = slices.f1.interior_point().to_vec();
    let mut obj = String::from("# F1 slice boundary at l = 1, vertices (x, y, z)\n");
    let n = resolution.max(8) * 4;
    for k in 0..n {
        let a = std::f64::consts::TAU * k as f64 / n as f64;
        let b = slices.f1.boundary_ray_shoot(&center, &[a.cos(), a.sin()])?;
        let v = lift([b[0], b[1]]);
        let _ = writeln!(obj, "v {} {} {}", v[1], v[2], v[3]);
    }
    let path = dir.join("f1_slice_boundary.obj");
    fs::write(&path, obj)?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_has_half_and_one() {
        let g = figure_grid(10);
        assert_eq!(g.len(), 11);
        assert!(g.contains(&0.5) && g.contains(&1.0));
    }

    #[test]
    fn exports_rows() {
        let dir = std::env::temp_dir().join(format!("conefix-figure-{}", std::process::id()));
        let files = export_figure(&dir, 5).unwrap();
        assert_eq!(files.len(), 7);
        let a = fs::read_to_string(dir.join("alpha_p1.csv")).unwrap();
        assert!(a.starts_with("t,l,x,y,z,s\n"));
        assert!(a.lines().any(|l| l == "0.5,1,-0.5,0.25,0,0"));
        let g = fs::read_to_string(dir.join("gamma_p1.csv")).unwrap();
        assert!(g.lines().any(|l| l == "1,1,0,1,0,0"));
        let b = fs::read_to_string(dir.join("beta_p1.csv")).unwrap();
        assert!(b.lines().any(|l| l == "0,1,0,0,0,0"));
        fs::remove_dir_all(dir).unwrap();
    }
}
