//! Field and convergence-log writers.

use std::io::{self, Write};

use crate::particles::ParticleSet;

/// `x,y,k,T` per particle, with a one-line header.
pub fn write_field_csv(ps: &ParticleSet, mut w: impl Write) -> io::Result<()> {
    writeln!(w, "x,y,k,T")?;
    for i in 0..ps.len() {
        let p = ps.position[i];
        writeln!(
            w,
            "{},{},{},{}",
            p.x, p.y, ps.conductivity[i], ps.temperature[i]
        )?;
    }
    w.flush()
}

/// Legacy ASCII VTK polydata: one vertex per particle, with `k` and `T` point data.
pub fn write_field_vtk(ps: &ParticleSet, mut w: impl Write) -> io::Result<()> {
    let n = ps.len();
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "sphtherm temperature field")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET POLYDATA")?;
    writeln!(w, "POINTS {n} double")?;
    for p in &ps.position {
        writeln!(w, "{} {} 0", p.x, p.y)?;
    }
    writeln!(w, "VERTICES {n} {}", 2 * n)?;
    for i in 0..n {
        writeln!(w, "1 {i}")?;
    }
    writeln!(w, "POINT_DATA {n}")?;
    for (name, values) in [("k", &ps.conductivity), ("T", &ps.temperature)] {
        writeln!(w, "SCALARS {name} double 1")?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for v in values.iter() {
            writeln!(w, "{v}")?;
        }
    }
    w.flush()
}

/// `step,residual` rows.
pub fn write_convergence_log(history: &[(u64, f64)], mut w: impl Write) -> io::Result<()> {
    writeln!(w, "step,residual")?;
    for (step, residual) in history {
        writeln!(w, "{step},{residual}")?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;

    fn pair() -> ParticleSet {
        ParticleSet::from_points(
            vec![Point2::new(0.0005, 0.0015), Point2::new(0.1, -0.25)],
            1e-6,
            0.13,
            vec![12.345678901234567, -0.1],
        )
    }

    #[test]
    fn csv_round_trips_values() {
        let mut buf = Vec::new();
        write_field_csv(&pair(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,y,k,T"));
        let row: Vec<f64> = lines
            .next()
            .unwrap()
            .split(',')
            .map(|v| v.parse().unwrap())
            .collect();
        assert_eq!(row, vec![0.0005, 0.0015, 0.13, 12.345678901234567]);
        assert_eq!(lines.count(), 1);
    }

    #[test]
    fn vtk_layout() {
        let mut buf = Vec::new();
        write_field_vtk(&pair(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# vtk DataFile Version 3.0\n"));
        assert!(text.contains("POINTS 2 double\n0.0005 0.0015 0\n0.1 -0.25 0\n"));
        assert!(text.contains("VERTICES 2 4\n1 0\n1 1\n"));
        assert!(
            text.contains("SCALARS T double 1\nLOOKUP_TABLE default\n12.345678901234567\n-0.1\n")
        );
    }

    #[test]
    fn convergence_log() {
        let mut buf = Vec::new();
        write_convergence_log(&[(0, 2.5), (1, 1e-7)], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "step,residual\n0,2.5\n1,0.0000001\n"
        );
    }
}
