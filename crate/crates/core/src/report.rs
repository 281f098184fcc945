//! Heat flow, conductance and transmittance, and their comparison against
//! reference values.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{PanelParameters, Side};
use crate::particles::ParticleSet;

/// Allowed relative deviation of the thermal conductance.
pub const L2D_TOLERANCE: f64 = 0.03;
/// Allowed relative deviation of the frame transmittance.
pub const UF_TOLERANCE: f64 = 0.05;

#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    #[error("no convective faces on the {0} side")]
    NoConvectiveFaces(Side),
    #[error("internal and external ambient temperatures are equal ({0} °C)")]
    EqualAmbients(f64),
    #[error("unknown reference case `{0}` (expected D2, D4 or D7)")]
    UnknownCase(String),
    #[error("invalid reference data: {0}")]
    InvalidReference(String),
    #[error("malformed report: {0}")]
    Parse(String),
}

/// Reference results and panel parameters of a validation case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCase {
    pub name: String,
    pub l2d_ref: f64,
    /// Absent when only the conductance is checked.
    pub uf_ref: Option<f64>,
    pub u_p: f64,
    pub b_p: f64,
    pub b_f: f64,
}

/// `(name, L2D, Uf, U_p, b_p, b_f)` of the frame validation cases.
const REFERENCE_TABLE: [(&str, f64, f64, f64, f64, f64); 3] = [
    ("D2", 0.263, 1.44, 0.551, 0.19, 0.11),
    ("D4", 0.346, 1.36, 1.034, 0.19, 0.11),
    ("D7", 0.285, 1.31, 1.169, 0.19, 0.048),
];

impl ReferenceCase {
    /// One of the built-in cases D2, D4 or D7 (case-insensitive).
    pub fn builtin(name: &str) -> Result<Self, ReportError> {
        REFERENCE_TABLE
            .iter()
            .find(|row| row.0.eq_ignore_ascii_case(name))
            .map(|&(name, l2d, uf, u_p, b_p, b_f)| ReferenceCase {
                name: name.to_string(),
                l2d_ref: l2d,
                uf_ref: Some(uf),
                u_p,
                b_p,
                b_f,
            })
            .ok_or_else(|| ReportError::UnknownCase(name.to_string()))
    }

    pub fn all_builtin() -> Vec<ReferenceCase> {
        REFERENCE_TABLE
            .iter()
            .map(|row| ReferenceCase::builtin(row.0).expect("table entry"))
            .collect()
    }

    pub fn validate(&self) -> Result<(), ReportError> {
        let values = [
            ("L2D", Some(self.l2d_ref)),
            ("Uf", self.uf_ref),
            ("U_p", Some(self.u_p)),
            ("b_p", Some(self.b_p)),
            ("b_f", Some(self.b_f)),
        ];
        for (name, v) in values {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(ReportError::InvalidReference(format!(
                        "{name} must be positive, got {v}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Heat flow through the convective faces of one side, W/m: heat entering the
/// section on the internal side, heat leaving it on the external side.
pub fn heat_flow_rate(ps: &ParticleSet, side: Side) -> Result<f64, ReportError> {
    let faces = ps.faces();
    if !faces.iter().any(|f| f.side() == Some(side)) {
        return Err(ReportError::NoConvectiveFaces(side));
    }
    let sign = match side {
        Side::Internal => 1.0,
        Side::External => -1.0,
    };
    let mut q = 0.0;
    for i in 0..ps.len() {
        let mut qi = 0.0;
        for l in ps.links(i) {
            let face = &faces[l.face];
            if face.side() != Some(side) {
                continue;
            }
            if let (Some(h), Some(ambient)) = (face.heat_transfer_coefficient(), face.ambient()) {
                qi += h * l.coupling * (ambient - ps.temperature[i]);
            }
        }
        q += ps.volume[i] * qi;
    }
    Ok(sign * q)
}

/// `L2D = |Q| / |T_i - T_e|`, W/(m·K).
pub fn thermal_conductance(q: f64, t_internal: f64, t_external: f64) -> Result<f64, ReportError> {
    if t_internal == t_external {
        return Err(ReportError::EqualAmbients(t_internal));
    }
    Ok(q.abs() / (t_internal - t_external).abs())
}

/// `Uf = (L2D - U_p b_p) / b_f`, W/(m²·K).
pub fn thermal_transmittance(l2d: f64, u_p: f64, b_p: f64, b_f: f64) -> f64 {
    (l2d - u_p * b_p) / b_f
}

pub fn relative_error(computed: f64, reference: f64) -> f64 {
    (computed - reference) / reference
}

/// One reported quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantityRecord {
    pub name: String,
    pub unit: String,
    pub computed: f64,
    pub reference: Option<f64>,
    pub relative_error: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: Option<bool>,
}

impl QuantityRecord {
    fn plain(name: &str, unit: &str, computed: f64) -> Self {
        QuantityRecord {
            name: name.into(),
            unit: unit.into(),
            computed,
            reference: None,
            relative_error: None,
            tolerance: None,
            pass: None,
        }
    }

    fn checked(name: &str, unit: &str, computed: f64, reference: f64, tolerance: f64) -> Self {
        let e = relative_error(computed, reference);
        QuantityRecord {
            reference: Some(reference),
            relative_error: Some(e),
            tolerance: Some(tolerance),
            pass: Some(e.abs() <= tolerance),
            ..QuantityRecord::plain(name, unit, computed)
        }
    }
}

/// Converged heat flows and the quantities derived from them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateReport {
    pub q_internal: f64,
    pub q_external: f64,
    /// `|Q_int - Q_ext| / max(|Q_int|, |Q_ext|)`.
    pub flux_imbalance: f64,
    pub t_internal: f64,
    pub t_external: f64,
    pub l2d: f64,
    pub uf: Option<f64>,
    pub reference_case: Option<String>,
    pub l2d_relative_error: Option<f64>,
    pub uf_relative_error: Option<f64>,
    pub l2d_pass: Option<bool>,
    pub uf_pass: Option<bool>,
    pub converged: bool,
    pub steps: u64,
    pub residual: f64,
    pub particles: usize,
    pub quantities: Vec<QuantityRecord>,
}

/// Raw results fed to [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReportInputs {
    pub q_internal: f64,
    pub q_external: f64,
    pub t_internal: f64,
    pub t_external: f64,
    pub converged: bool,
    pub steps: u64,
    pub residual: f64,
    pub particles: usize,
}

fn flux_imbalance(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else {
        (a.abs() - b.abs()).abs() / m
    }
}

/// Assembles the report. The conductance uses the mean of the two sides' heat
/// flows; `panel` enables the transmittance and `reference` the pass checks
/// (its panel data take precedence).
pub fn validate(
    inputs: &ReportInputs,
    panel: Option<PanelParameters>,
    reference: Option<&ReferenceCase>,
) -> Result<SteadyStateReport, ReportError> {
    if let Some(r) = reference {
        r.validate()?;
    }
    let q = 0.5 * (inputs.q_internal.abs() + inputs.q_external.abs());
    let l2d = thermal_conductance(q, inputs.t_internal, inputs.t_external)?;
    let panel = reference
        .map(|r| PanelParameters {
            u_p: r.u_p,
            b_p: r.b_p,
            b_f: r.b_f,
        })
        .or(panel);
    let uf = panel.map(|p| thermal_transmittance(l2d, p.u_p, p.b_p, p.b_f));

    let mut quantities = vec![
        QuantityRecord::plain("Q_internal", "W/m", inputs.q_internal),
        QuantityRecord::plain("Q_external", "W/m", inputs.q_external),
        QuantityRecord::plain(
            "flux_imbalance",
            "1",
            flux_imbalance(inputs.q_internal, inputs.q_external),
        ),
    ];
    let l2d_record = match reference {
        Some(r) => QuantityRecord::checked("L2D", "W/(m·K)", l2d, r.l2d_ref, L2D_TOLERANCE),
        None => QuantityRecord::plain("L2D", "W/(m·K)", l2d),
    };
    let uf_record = uf.map(|uf| match reference.and_then(|r| r.uf_ref) {
        Some(uf_ref) => QuantityRecord::checked("Uf", "W/(m²·K)", uf, uf_ref, UF_TOLERANCE),
        None => QuantityRecord::plain("Uf", "W/(m²·K)", uf),
    });

    let report = SteadyStateReport {
        q_internal: inputs.q_internal,
        q_external: inputs.q_external,
        flux_imbalance: flux_imbalance(inputs.q_internal, inputs.q_external),
        t_internal: inputs.t_internal,
        t_external: inputs.t_external,
        l2d,
        uf,
        reference_case: reference.map(|r| r.name.clone()),
        l2d_relative_error: l2d_record.relative_error,
        uf_relative_error: uf_record.as_ref().and_then(|r| r.relative_error),
        l2d_pass: l2d_record.pass,
        uf_pass: uf_record.as_ref().and_then(|r| r.pass),
        converged: inputs.converged,
        steps: inputs.steps,
        residual: inputs.residual,
        particles: inputs.particles,
        quantities: {
            quantities.push(l2d_record);
            quantities.extend(uf_record);
            quantities
        },
    };
    Ok(report)
}

/// Checks already computed conductance and transmittance against a case.
pub fn validate_values(l2d: f64, uf: f64, reference: &ReferenceCase) -> Vec<QuantityRecord> {
    let mut out = vec![QuantityRecord::checked(
        "L2D",
        "W/(m·K)",
        l2d,
        reference.l2d_ref,
        L2D_TOLERANCE,
    )];
    if let Some(uf_ref) = reference.uf_ref {
        out.push(QuantityRecord::checked(
            "Uf",
            "W/(m²·K)",
            uf,
            uf_ref,
            UF_TOLERANCE,
        ));
    }
    out
}

impl SteadyStateReport {
    /// True when every checked quantity is within its band. Vacuous without a reference.
    pub fn all_pass(&self) -> bool {
        self.quantities.iter().all(|q| q.pass != Some(false))
    }

    pub fn has_checks(&self) -> bool {
        self.quantities.iter().any(|q| q.pass.is_some())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        serde_json::from_str(text).map_err(|e| ReportError::Parse(e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let status = if self.converged {
            "converged"
        } else {
            "NOT converged"
        };
        let _ = writeln!(
            s,
            "{} particles, {} after {} steps (residual {:.3e})",
            self.particles, status, self.steps, self.residual
        );
        if let Some(case) = &self.reference_case {
            let _ = writeln!(s, "reference case {case}");
        }
        let _ = writeln!(
            s,
            "{:<16} {:>14} {:>12} {:>10} {:>6}  unit",
            "quantity", "computed", "reference", "rel.err", "pass"
        );
        for q in &self.quantities {
            let reference = q.reference.map_or("-".into(), |v| format!("{v:.4}"));
            let err = q
                .relative_error
                .map_or("-".into(), |v| format!("{:+.2}%", 100.0 * v));
            let pass = match q.pass {
                Some(true) => "yes",
                Some(false) => "NO",
                None => "-",
            };
            let _ = writeln!(
                s,
                "{:<16} {:>14.6} {:>12} {:>10} {:>6}  {}",
                q.name, q.computed, reference, err, pass, q.unit
            );
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn inputs(qi: f64, qe: f64) -> ReportInputs {
        ReportInputs {
            q_internal: qi,
            q_external: qe,
            t_internal: 20.0,
            t_external: 0.0,
            converged: true,
            steps: 10,
            residual: 1e-7,
            particles: 100,
        }
    }

    #[test]
    fn conductance_cases() {
        assert_relative_eq!(
            thermal_conductance(5.26, 20.0, 0.0).unwrap(),
            0.263,
            max_relative = 1e-14
        );
        assert_eq!(thermal_conductance(0.0, 20.0, 0.0).unwrap(), 0.0);
        assert_relative_eq!(
            thermal_conductance(10.52, 20.0, 0.0).unwrap(),
            2.0 * thermal_conductance(5.26, 20.0, 0.0).unwrap(),
            max_relative = 1e-15
        );
        assert_eq!(
            thermal_conductance(1.0, 5.0, 5.0),
            Err(ReportError::EqualAmbients(5.0))
        );
    }

    #[test]
    fn transmittance_cases() {
        let d2 = ReferenceCase::builtin("D2").unwrap();
        let uf = thermal_transmittance(0.263, d2.u_p, d2.b_p, d2.b_f);
        assert_relative_eq!(uf, (0.263 - 0.551 * 0.19) / 0.11, max_relative = 1e-15);
        assert!((uf - 1.439).abs() < 5e-4);
        let d7 = ReferenceCase::builtin("d7").unwrap();
        assert!((thermal_transmittance(0.285, d7.u_p, d7.b_p, d7.b_f) - 1.310).abs() < 5e-4);
        assert_eq!(thermal_transmittance(0.551 * 0.19, 0.551, 0.19, 0.11), 0.0);
    }

    #[test]
    fn builtin_table() {
        let all = ReferenceCase::all_builtin();
        assert_eq!(all.len(), 3);
        assert!(all.iter().all(|c| c.validate().is_ok()));
        assert_eq!(
            ReferenceCase::builtin("D9"),
            Err(ReportError::UnknownCase("D9".into()))
        );
    }

    #[test]
    fn pass_bands() {
        let d2 = ReferenceCase::builtin("D2").unwrap();
        let ok = validate_values(0.2629, 1.4383, &d2);
        assert!(ok.iter().all(|q| q.pass == Some(true)));
        assert_relative_eq!(
            ok[0].relative_error.unwrap(),
            (0.2629 - 0.263) / 0.263,
            max_relative = 1e-15
        );
        let low = validate_values(0.263 * 0.96, 1.44, &d2);
        assert_eq!(low[0].pass, Some(false));
        let edge = validate_values(0.263 * 1.0299, 1.44 * 0.9501, &d2);
        assert!(edge.iter().all(|q| q.pass == Some(true)));
    }

    #[test]
    fn report_with_reference() {
        let d2 = ReferenceCase::builtin("D2").unwrap();
        let r = validate(&inputs(5.258, 5.258), None, Some(&d2)).unwrap();
        assert_relative_eq!(r.l2d, 0.2629, max_relative = 1e-12);
        assert_eq!(r.l2d_pass, Some(true));
        assert_eq!(r.uf_pass, Some(true));
        assert!(r.all_pass() && r.has_checks());
        assert_eq!(r.flux_imbalance, 0.0);
        let text = r.to_text();
        assert!(text.contains("L2D") && text.contains("-0.04%"), "{text}");
    }

    #[test]
    fn report_without_reference() {
        let r = validate(&inputs(3.0, 2.97), None, None).unwrap();
        assert_eq!(r.uf, None);
        assert!(r.all_pass() && !r.has_checks());
        assert_relative_eq!(r.flux_imbalance, 0.01, max_relative = 1e-12);
        let with_panel = validate(
            &inputs(3.0, 3.0),
            Some(PanelParameters {
                u_p: 1.0,
                b_p: 0.1,
                b_f: 0.1,
            }),
            None,
        )
        .unwrap();
        assert_relative_eq!(
            with_panel.uf.unwrap(),
            (0.15 - 0.1) / 0.1,
            max_relative = 1e-12
        );
    }

    #[test]
    fn conductance_uses_magnitudes() {
        assert_eq!(
            thermal_conductance(-4.0, 0.0, 20.0).unwrap(),
            thermal_conductance(4.0, 20.0, 0.0).unwrap()
        );
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![-1e6f64..1e6, Just(0.0), 1e-300f64..1e-290]
    }

    proptest! {
        #[test]
        fn json_round_trip(qi in finite(), qe in finite(), ti in -50f64..50.0, case in 0usize..4) {
            let reference = ReferenceCase::all_builtin().into_iter().nth(case);
            let r = validate(
                &ReportInputs { t_internal: ti, t_external: ti - 20.0, ..inputs(qi, qe) },
                None,
                reference.as_ref(),
            ).unwrap();
            prop_assert_eq!(SteadyStateReport::from_json(&r.to_json()).unwrap(), r);
        }

        #[test]
        fn conductance_sign_flip(q in -1e3f64..1e3, ti in -50f64..50.0, te in -50f64..50.0) {
            prop_assume!(ti != te);
            prop_assert_eq!(
                thermal_conductance(q, ti, te).unwrap(),
                thermal_conductance(-q, te, ti).unwrap()
            );
        }
    }
}
