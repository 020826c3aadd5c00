use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::model::{PhaseState, PotentialModel};
use crate::vecops::{dot, norm2};

/// A uniform circular orbit in a radial potential.
#[derive(Debug, Clone)]
pub struct CircularOrbitSpec {
    potential: PotentialModel,
    radius: f64,
    e1: Vec<f64>,
    e2: Vec<f64>,
}

impl CircularOrbitSpec {
    /// Orbit in the plane of the first two coordinate axes.
    pub fn new(potential: PotentialModel, radius: f64) -> Result<Self> {
        let m = potential.dim();
        if m < 2 {
            return Err(Error::InvalidParameter(
                "circular orbits need dimension >= 2".into(),
            ));
        }
        let mut e1 = vec![0.0; m];
        let mut e2 = vec![0.0; m];
        e1[0] = 1.0;
        e2[1] = 1.0;
        Self::with_plane(potential, radius, e1, e2)
    }

    pub fn with_plane(
        potential: PotentialModel,
        radius: f64,
        e1: Vec<f64>,
        e2: Vec<f64>,
    ) -> Result<Self> {
        let m = potential.dim();
        if e1.len() != m || e2.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: e1.len().min(e2.len()),
            });
        }
        let orthonormal = (norm2(&e1) - 1.0).abs() < 1e-12
            && (norm2(&e2) - 1.0).abs() < 1e-12
            && dot(&e1, &e2).abs() < 1e-12;
        if !orthonormal {
            return Err(Error::InvalidParameter(
                "orbit plane vectors must be orthonormal".into(),
            ));
        }
        if !potential.is_radial() {
            return Err(Error::InvalidParameter(
                "circular orbits need a radial potential".into(),
            ));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "orbit radius must be positive, got {radius}"
            )));
        }
        let spec = Self {
            potential,
            radius,
            e1,
            e2,
        };
        let centripetal = radius * spec.potential.radial_derivatives(radius)?[1];
        if centripetal <= 0.0 {
            return Err(Error::NoCircularOrbit {
                radius,
                centripetal,
            });
        }
        Ok(spec)
    }

    pub fn potential(&self) -> &PotentialModel {
        &self.potential
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `v = sqrt(R V'(R))`.
    pub fn speed(&self) -> f64 {
        let dv = self
            .potential
            .radial_derivatives(self.radius)
            .expect("validated on construction")[1];
        (self.radius * dv).sqrt()
    }

    pub fn angular_rate(&self) -> f64 {
        self.speed() / self.radius
    }

    pub fn period(&self) -> f64 {
        TAU * self.radius / self.speed()
    }
}

/// `(R e1, v e2)` together with the period `2 pi R / v`.
pub fn circular_orbit_state(spec: &CircularOrbitSpec) -> (PhaseState, f64) {
    (exact_circular_solution(spec, 0.0), spec.period())
}

/// The exact solution: uniform rotation at `v / R` in the orbit plane.
pub fn exact_circular_solution(spec: &CircularOrbitSpec, t: f64) -> PhaseState {
    let v = spec.speed();
    let (s, c) = (spec.angular_rate() * t).sin_cos();
    let r = spec.radius;
    PhaseState {
        x: spec
            .e1
            .iter()
            .zip(&spec.e2)
            .map(|(a, b)| r * (c * a + s * b))
            .collect(),
        p: spec
            .e1
            .iter()
            .zip(&spec.e2)
            .map(|(a, b)| v * (c * b - s * a))
            .collect(),
    }
}
