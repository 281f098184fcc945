use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::ParticleError;

/// Radial kernel shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelFamily {
    /// Wendland C2, support `2h`.
    #[default]
    WendlandC2,
    /// Quintic spline, support `3h`.
    QuinticSpline,
}

impl KernelFamily {
    /// Support radius as a multiple of the smoothing length.
    pub fn support_factor(self) -> f64 {
        match self {
            KernelFamily::WendlandC2 => 2.0,
            KernelFamily::QuinticSpline => 3.0,
        }
    }

    /// 2D normalisation constant, to be divided by `h²`.
    fn normalization(self) -> f64 {
        match self {
            KernelFamily::WendlandC2 => 7.0 / (4.0 * PI),
            KernelFamily::QuinticSpline => 7.0 / (478.0 * PI),
        }
    }
}

impl std::str::FromStr for KernelFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "wendland-c2" | "wendland" => Ok(KernelFamily::WendlandC2),
            "quintic-spline" | "quintic" => Ok(KernelFamily::QuinticSpline),
            _ => Err(format!(
                "unknown kernel `{s}` (expected wendland-c2 or quintic-spline)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub smoothing_length: f64,
    pub support_radius: f64,
    pub family: KernelFamily,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, smoothing_length: f64) -> Result<Self, ParticleError> {
        if !(smoothing_length > 0.0 && smoothing_length.is_finite()) {
            return Err(ParticleError::InvalidKernel(format!(
                "smoothing length must be positive, got {smoothing_length}"
            )));
        }
        Ok(KernelSpec {
            smoothing_length,
            support_radius: family.support_factor() * smoothing_length,
            family,
        })
    }

    /// Kernel value; zero outside the support.
    pub fn value(&self, r: f64) -> f64 {
        let h = self.smoothing_length;
        let q = r / h;
        let a = self.family.normalization() / (h * h);
        match self.family {
            KernelFamily::WendlandC2 => {
                if q >= 2.0 {
                    0.0
                } else {
                    a * (1.0 - 0.5 * q).powi(4) * (2.0 * q + 1.0)
                }
            }
            KernelFamily::QuinticSpline => a * quintic_terms(q, |t| t.powi(5)),
        }
    }

    /// Radial derivative `dW/dr`; zero outside the support. Does not check the domain.
    pub fn derivative(&self, r: f64) -> f64 {
        let h = self.smoothing_length;
        let q = r / h;
        let a = self.family.normalization() / (h * h * h);
        match self.family {
            KernelFamily::WendlandC2 => {
                if q >= 2.0 {
                    0.0
                } else {
                    a * (-5.0 * q) * (1.0 - 0.5 * q).powi(3)
                }
            }
            KernelFamily::QuinticSpline => -5.0 * a * quintic_terms(q, |t| t.powi(4)),
        }
    }
}

fn quintic_terms(q: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut s = 0.0;
    if q < 3.0 {
        s += f(3.0 - q);
    }
    if q < 2.0 {
        s -= 6.0 * f(2.0 - q);
    }
    if q < 1.0 {
        s += 15.0 * f(1.0 - q);
    }
    s
}

/// Radial kernel derivative at `0 < r <= support_radius`.
pub fn kernel_derivative(r: f64, spec: &KernelSpec) -> Result<f64, ParticleError> {
    if !(r > 0.0 && r <= spec.support_radius) {
        return Err(ParticleError::KernelDomain {
            r,
            support: spec.support_radius,
        });
    }
    Ok(spec.derivative(r))
}
