//! Deterministic crack-initiation life from a stress sample.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::ObjectiveError;

/// Cap on the life of an (almost) unloaded point.
pub const N_MAX: f64 = 1e12;

/// Stress tensor and its spatial gradient at one boundary point. Components
/// are ordered `(sxx, syy, sxy, szz)`; `grad[d]` holds their derivatives
/// along `x_d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressSample {
    pub sigma: [f64; 4],
    pub grad: [[f64; 4]; 2],
}

impl StressSample {
    pub fn von_mises(&self) -> f64 {
        vm_squared(&self.sigma).sqrt()
    }

    /// `|grad sigma_v|`, zero where `sigma_v` vanishes.
    pub fn von_mises_gradient_norm(&self) -> f64 {
        let v = self.von_mises();
        if v == 0.0 {
            return 0.0;
        }
        let [sxx, syy, sxy, szz] = self.sigma;
        let d = |g: &[f64; 4]| {
            // d(sigma_v^2) / 2
            let half = (sxx - syy) * (g[0] - g[1])
                + (syy - szz) * (g[1] - g[3])
                + (szz - sxx) * (g[3] - g[0]);
            (0.5 * half + 3.0 * sxy * g[2]) / v
        };
        d(&self.grad[0]).hypot(d(&self.grad[1]))
    }
}

fn vm_squared(s: &[f64; 4]) -> f64 {
    let [sxx, syy, sxy, szz] = *s;
    0.5 * ((sxx - syy).powi(2) + (syy - szz).powi(2) + (szz - sxx).powi(2)) + 3.0 * sxy * sxy
}

/// Pluggable rule `N_det(stress, stress gradient)`.
pub trait LifeRule: fmt::Debug + Send + Sync {
    fn cycles(&self, sample: &StressSample) -> Result<f64, ObjectiveError>;
}

/// Coffin-Manson-Basquin strain-life curve with a stress-gradient notch
/// support factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CmbRule {
    /// Fatigue strength coefficient `sigma_f'`.
    pub sigma_f: f64,
    /// Basquin exponent `b < 0`.
    pub b: f64,
    /// Fatigue ductility coefficient `eps_f' >= 0`.
    pub eps_f: f64,
    /// Coffin-Manson exponent `c < 0`.
    pub c: f64,
    /// Young's modulus `E`.
    pub youngs_modulus: f64,
    /// Material length of the notch support factor.
    pub notch_length: f64,
}

impl Default for CmbRule {
    fn default() -> Self {
        Self {
            sigma_f: 0.6,
            b: -0.09,
            eps_f: 0.25,
            c: -0.56,
            youngs_modulus: 260.0,
            notch_length: 0.05,
        }
    }
}

impl CmbRule {
    pub fn validate(&self) -> Result<(), ObjectiveError> {
        let ok = self.sigma_f > 0.0
            && self.b < 0.0
            && self.eps_f >= 0.0
            && self.c < 0.0
            && self.youngs_modulus > 0.0
            && self.notch_length >= 0.0
            && [
                self.sigma_f,
                self.b,
                self.eps_f,
                self.c,
                self.youngs_modulus,
                self.notch_length,
            ]
            .iter()
            .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(ObjectiveError::InvalidModel(format!(
                "life-rule parameters need sigma_f > 0, b < 0, eps_f >= 0, c < 0, E > 0, notch length >= 0: {self:?}"
            )))
        }
    }

    /// Strain amplitude on the curve at `N` cycles.
    pub fn strain_amplitude(&self, n: f64) -> f64 {
        let two_n = 2.0 * n;
        self.sigma_f / self.youngs_modulus * two_n.powf(self.b) + self.eps_f * two_n.powf(self.c)
    }

    /// Inverts the curve for `eps_a` by bisection on `log N` to `1e-10`
    /// relative; `N_MAX` when `eps_a` is below the curve at `N_MAX`.
    pub fn invert(&self, eps_a: f64) -> Result<f64, ObjectiveError> {
        if !(eps_a >= 0.0) || !eps_a.is_finite() {
            return Err(ObjectiveError::NonConvergence(format!(
                "strain amplitude {eps_a} is not finite"
            )));
        }
        if eps_a <= self.strain_amplitude(N_MAX) {
            return Ok(N_MAX);
        }
        // half a cycle is the shortest meaningful life
        let (mut lo, mut hi) = (0.5_f64.ln(), N_MAX.ln());
        if eps_a > self.strain_amplitude(0.5) {
            return Err(ObjectiveError::NonConvergence(format!(
                "strain amplitude {eps_a:.3e} exceeds the curve at half a cycle ({:.3e})",
                self.strain_amplitude(0.5)
            )));
        }
        while hi - lo > 1e-10 {
            let mid = 0.5 * (lo + hi);
            if self.strain_amplitude(mid.exp()) > eps_a {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((0.5 * (lo + hi)).exp())
    }
}

impl LifeRule for CmbRule {
    fn cycles(&self, sample: &StressSample) -> Result<f64, ObjectiveError> {
        let e = self.youngs_modulus;
        let sv = sample.von_mises();
        if !sv.is_finite() {
            return Err(ObjectiveError::NonFinite("von Mises stress".into()));
        }
        let floor = 1e-12 * e;
        if sv <= floor {
            return Ok(N_MAX);
        }
        let chi = sample.von_mises_gradient_norm() / sv.max(floor);
        let support = 1.0 + (chi * self.notch_length).sqrt();
        self.invert(sv / (support * e))
    }
}
