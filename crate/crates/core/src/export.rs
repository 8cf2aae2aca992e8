//! Text formats for point clouds and residual curves.

use std::fmt::Write as _;
use std::io::Read;

use thiserror::Error;

use crate::flag::{Flag, FlagError};

pub const FLAG_HEADER: [&str; 6] = ["px", "py", "pz", "nx", "ny", "nz"];
pub const PLY_CHART: &str = "shell-v1";

#[derive(Debug, Error)]
pub enum ExportError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("expected header px,py,pz,nx,ny,nz, found {0}")]
    Header(String),
    #[error("row {row}: {msg}")]
    Field { row: usize, msg: String },
    #[error("row {row}: {source}")]
    Flag { row: usize, source: FlagError },
}

/// CSV of canonical representatives, 17 significant digits per coordinate.
pub fn flags_to_csv(points: &[Flag]) -> String {
    let mut s = FLAG_HEADER.join(",");
    s.push('\n');
    for x in points {
        // adding zero turns -0.0 into 0.0
        let v = x.to_array().map(|c| c + 0.0);
        let _ = writeln!(
            s,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            v[0], v[1], v[2], v[3], v[4], v[5]
        );
    }
    s
}

/// Reads the output of [`flags_to_csv`]. Rows are taken as canonical
/// representatives and only checked, not re-normalized.
pub fn flags_from_csv<R: Read>(input: R) -> Result<Vec<Flag>, ExportError> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers()?.clone();
    if header.iter().ne(FLAG_HEADER) {
        return Err(ExportError::Header(header.iter().collect::<Vec<_>>().join(",")));
    }
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 1;
        let rec = rec?;
        let mut v = [0.0; 6];
        for (k, field) in rec.iter().enumerate() {
            v[k] = field.trim().parse().map_err(|e| ExportError::Field {
                row,
                msg: format!("column {}: {e}", FLAG_HEADER[k]),
            })?;
        }
        let x = Flag::from_canonical([v[0], v[1], v[2]], [v[3], v[4], v[5]])
            .map_err(|source| ExportError::Flag { row, source })?;
        out.push(x);
    }
    Ok(out)
}

/// Chart `shell-v1`: `(p, n) ↦ (1 + θ/π) p`, where `θ ∈ [0, π)` is the angle
/// of the line normal `n` in the plane `p^⊥`, measured from a fixed frame.
pub fn shell_chart(x: &Flag) -> [f64; 3] {
    let (p, n) = (x.p(), x.n());
    let u = p.any_orthogonal().normalized(0.0).expect("unit p has a unit orthogonal");
    let w = p.cross(&u);
    let theta = n.dot(&w).atan2(n.dot(&u)).rem_euclid(std::f64::consts::PI);
    p.scale(1.0 + theta / std::f64::consts::PI).0
}

/// ASCII PLY vertex cloud in the [`PLY_CHART`] chart.
pub fn flags_to_ply(points: &[Flag]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "ply\nformat ascii 1.0\ncomment chart {PLY_CHART}");
    let _ = writeln!(s, "element vertex {}", points.len());
    let _ = writeln!(s, "property double x\nproperty double y\nproperty double z\nend_header");
    for x in points {
        let c = shell_chart(x).map(|c| c + 0.0);
        let _ = writeln!(s, "{:.16e} {:.16e} {:.16e}", c[0], c[1], c[2]);
    }
    s
}

/// CSV `n,residual`.
pub fn residuals_to_csv(curve: &[(usize, f64)]) -> String {
    let mut s = String::from("n,residual\n");
    for (n, r) in curve {
        let _ = writeln!(s, "{n},{r:.16e}");
    }
    s
}
