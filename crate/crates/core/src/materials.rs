//! Crystal constants for LiNbO3 cuts and the direction-dependent SAW speed.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which crystal cut a constant set describes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CutName {
    Y,
    Y128,
    Custom(String),
}

impl CutName {
    /// Parses the labels accepted on the command line and in configs.
    pub fn parse(label: &str) -> Option<CutName> {
        match label.trim() {
            "Y" | "Y-cut" | "y" => Some(CutName::Y),
            "128Y" | "128°Y" | "128°Y-cut" | "128Y-cut" | "128y" => Some(CutName::Y128),
            _ => None,
        }
    }
}

impl fmt::Display for CutName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CutName::Y => f.write_str("Y-cut"),
            CutName::Y128 => f.write_str("128°Y-cut"),
            CutName::Custom(name) => f.write_str(name),
        }
    }
}

/// Optoelastic coefficients in abbreviated (Voigt) notation.
///
/// Only `p12`, `p14` and `p31` enter the u_y-dominant index model; the
/// others are carried for completeness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptoelasticTensor {
    pub p11: f64,
    pub p12: f64,
    pub p13: f64,
    pub p14: f64,
    pub p31: f64,
    pub p33: f64,
    pub p41: f64,
    pub p44: f64,
}

impl OptoelasticTensor {
    /// LiNbO3 at 1064 nm.
    pub const LITHIUM_NIOBATE: OptoelasticTensor = OptoelasticTensor {
        p11: -0.026,
        p12: 0.088,
        p13: 0.133,
        p14: -0.083,
        p31: 0.177,
        p33: 0.071,
        p41: -0.151,
        p44: 0.146,
    };
}

/// Direction-dependent SAW speed, `v(θ) = v0·(1 + Σ a_k cos(2kθ))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnisotropyProfile {
    v0: f64,
    fourier_coeffs: Vec<(u32, f64)>,
}

/// Angular samples used to certify that a profile stays positive.
const POSITIVITY_SAMPLES: usize = 3600;

impl AnisotropyProfile {
    pub fn isotropic(v0: f64) -> Result<Self> {
        Self::new(v0, Vec::new())
    }

    /// Builds a profile from `(k, a_k)` pairs; `k` must be at least 1.
    pub fn new(v0: f64, fourier_coeffs: Vec<(u32, f64)>) -> Result<Self> {
        if !(v0.is_finite() && v0 > 0.0) {
            return Err(Error::InvalidProfile(format!("v0 must be positive, got {v0}")));
        }
        if let Some(&(k, a)) = fourier_coeffs.iter().find(|(k, a)| *k == 0 || !a.is_finite()) {
            return Err(Error::InvalidProfile(format!("bad harmonic ({k}, {a})")));
        }
        let profile = AnisotropyProfile { v0, fourier_coeffs };
        for i in 0..POSITIVITY_SAMPLES {
            let theta = std::f64::consts::TAU * i as f64 / POSITIVITY_SAMPLES as f64;
            if profile.shape(theta) <= 0.0 {
                return Err(Error::InvalidProfile(format!(
                    "speed not positive at theta = {theta:.4} rad"
                )));
            }
        }
        Ok(profile)
    }

    pub fn v0(&self) -> f64 {
        self.v0
    }

    pub fn fourier_coeffs(&self) -> &[(u32, f64)] {
        &self.fourier_coeffs
    }

    pub fn is_isotropic(&self) -> bool {
        self.fourier_coeffs.iter().all(|&(_, a)| a == 0.0)
    }

    /// Dimensionless `v(θ)/v0`.
    pub fn shape(&self, theta: f64) -> f64 {
        1.0 + self
            .fourier_coeffs
            .iter()
            .map(|&(k, a)| a * (2.0 * k as f64 * theta).cos())
            .sum::<f64>()
    }

    /// d(shape)/dθ.
    pub fn shape_derivative(&self, theta: f64) -> f64 {
        self.fourier_coeffs
            .iter()
            .map(|&(k, a)| {
                let m = 2.0 * k as f64;
                -a * m * (m * theta).sin()
            })
            .sum()
    }

    /// Group velocity along `theta` (radians from the principal direction), m/s.
    pub fn group_velocity(&self, theta: f64) -> f64 {
        self.v0 * self.shape(theta)
    }
}

/// Constant set for one crystal cut.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialProperties {
    pub cut: CutName,
    /// SAW speed along the principal direction, m/s.
    pub v_saw: f64,
    pub n_e: f64,
    pub n_o: f64,
    pub tensor: OptoelasticTensor,
    /// kg/m³
    pub density: f64,
    pub anisotropy: AnisotropyProfile,
}

/// Handbook density of LiNbO3, kg/m³.
pub const LITHIUM_NIOBATE_DENSITY: f64 = 4650.0;

impl MaterialProperties {
    /// Validated constructor for user-supplied materials.
    pub fn custom(
        name: &str,
        v_saw: f64,
        n_e: f64,
        n_o: f64,
        tensor: OptoelasticTensor,
        density: f64,
        anisotropy: Vec<(u32, f64)>,
    ) -> Result<Self> {
        let check = |what: &str, ok: bool, value: f64| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{what} out of range: {value}")))
            }
        };
        check("v_saw", v_saw.is_finite() && v_saw > 0.0, v_saw)?;
        check("density", density.is_finite() && density > 0.0, density)?;
        check("n_e", n_e.is_finite() && n_e > 1.0, n_e)?;
        check("n_o", n_o.is_finite() && n_o > 1.0, n_o)?;
        Ok(MaterialProperties {
            cut: CutName::Custom(name.to_string()),
            v_saw,
            n_e,
            n_o,
            tensor,
            density,
            anisotropy: AnisotropyProfile::new(v_saw, anisotropy)?,
        })
    }

    /// Replaces the anisotropy profile, keeping `v0 = v_saw`.
    pub fn with_anisotropy(mut self, coeffs: Vec<(u32, f64)>) -> Result<Self> {
        self.anisotropy = AnisotropyProfile::new(self.v_saw, coeffs)?;
        Ok(self)
    }

    fn lithium_niobate(cut: CutName, v_saw: f64) -> Self {
        MaterialProperties {
            cut,
            v_saw,
            n_e: 2.16,
            n_o: 2.24,
            tensor: OptoelasticTensor::LITHIUM_NIOBATE,
            density: LITHIUM_NIOBATE_DENSITY,
            anisotropy: AnisotropyProfile {
                v0: v_saw,
                fourier_coeffs: Vec::new(),
            },
        }
    }

    pub fn y_cut() -> Self {
        Self::lithium_niobate(CutName::Y, 3488.0)
    }

    pub fn y128_cut() -> Self {
        Self::lithium_niobate(CutName::Y128, 3997.0)
    }
}

/// Looks up a built-in cut by label, falling back to `custom` records
/// matched by name.
pub fn material_for_cut(label: &str, custom: &[MaterialProperties]) -> Result<MaterialProperties> {
    match CutName::parse(label) {
        Some(CutName::Y) => Ok(MaterialProperties::y_cut()),
        Some(CutName::Y128) => Ok(MaterialProperties::y128_cut()),
        _ => custom
            .iter()
            .find(|m| matches!(&m.cut, CutName::Custom(name) if name == label))
            .cloned()
            .ok_or_else(|| Error::UnknownCut(label.to_string())),
    }
}

/// `v_saw / lambda_saw`, Hz.
pub fn resonance_frequency(material: &MaterialProperties, lambda_saw: f64) -> Result<f64> {
    if !(lambda_saw.is_finite() && lambda_saw > 0.0) {
        return Err(Error::InvalidWavelength(lambda_saw));
    }
    Ok(material.v_saw / lambda_saw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn builtin_cuts() {
        let y = material_for_cut("Y", &[]).unwrap();
        assert_eq!(y.v_saw, 3488.0);
        assert_eq!(y.tensor.p31, 0.177);
        assert_eq!(y.tensor.p12, 0.088);
        assert_eq!(y.tensor.p14, -0.083);
        assert_eq!(material_for_cut("128°Y-cut", &[]).unwrap().v_saw, 3997.0);
        assert_eq!(y, material_for_cut("Y-cut", &[]).unwrap());
    }

    #[test]
    fn unknown_cut_and_custom_lookup() {
        assert_eq!(
            material_for_cut("GaAs", &[]).unwrap_err(),
            Error::UnknownCut("GaAs".into())
        );
        let gaas = MaterialProperties::custom(
            "GaAs",
            2860.0,
            3.48,
            3.48,
            OptoelasticTensor::LITHIUM_NIOBATE,
            5320.0,
            vec![],
        )
        .unwrap();
        let found = material_for_cut("GaAs", std::slice::from_ref(&gaas)).unwrap();
        assert_eq!(found.v_saw, 2860.0);
    }

    #[test]
    fn custom_validation() {
        let t = OptoelasticTensor::LITHIUM_NIOBATE;
        assert!(MaterialProperties::custom("x", -1.0, 2.0, 2.0, t, 1.0, vec![]).is_err());
        assert!(MaterialProperties::custom("x", 1.0, 0.9, 2.0, t, 1.0, vec![]).is_err());
        assert!(MaterialProperties::custom("x", 1.0, 2.0, 2.0, t, 0.0, vec![]).is_err());
    }

    #[test]
    fn resonance_frequencies() {
        let f = resonance_frequency(&MaterialProperties::y_cut(), 40e-6).unwrap();
        assert!((f - 87.2e6).abs() < 1e-6);
        let f = resonance_frequency(&MaterialProperties::y128_cut(), 40e-6).unwrap();
        assert!((f - 99.925e6).abs() < 1e-6);
        let mut unit = MaterialProperties::y_cut();
        unit.v_saw = 1.0;
        assert_eq!(resonance_frequency(&unit, 1.0).unwrap(), 1.0);
        assert_eq!(
            resonance_frequency(&unit, 0.0).unwrap_err(),
            Error::InvalidWavelength(0.0)
        );
    }

    #[test]
    fn group_velocity_examples() {
        let iso = AnisotropyProfile::isotropic(3488.0).unwrap();
        assert_eq!(iso.group_velocity(1.234), 3488.0);
        let p = AnisotropyProfile::new(3488.0, vec![(1, 0.1)]).unwrap();
        assert!((p.group_velocity(0.0) - 3836.8).abs() < 1e-9);
    }

    #[test]
    fn negative_speed_is_rejected() {
        assert!(matches!(
            AnisotropyProfile::new(1000.0, vec![(1, 1.2)]),
            Err(Error::InvalidProfile(_))
        ));
        assert!(AnisotropyProfile::new(1000.0, vec![(0, 0.1)]).is_err());
    }

    #[test]
    fn isotropic_is_constant_over_many_angles() {
        use rand::{Rng, SeedableRng};
        let p = AnisotropyProfile::isotropic(3997.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1_000_000 {
            let theta: f64 = rng.random_range(-100.0..100.0);
            assert_eq!(p.group_velocity(theta), 3997.0);
        }
    }

    #[test]
    fn concurrent_lookups_agree() {
        let reference = material_for_cut("Y", &[]).unwrap();
        let handles: Vec<_> = (0..8)
            .map(|_| std::thread::spawn(|| material_for_cut("Y", &[]).unwrap()))
            .collect();
        for h in handles {
            assert_eq!(h.join().unwrap(), reference);
        }
    }

    proptest! {
        #[test]
        fn pi_periodic(a1 in -0.3f64..0.3, a2 in -0.2f64..0.2, theta in -10.0f64..10.0) {
            let p = AnisotropyProfile::new(3488.0, vec![(1, a1), (2, a2)]).unwrap();
            let lhs = p.group_velocity(theta);
            let rhs = p.group_velocity(theta + PI);
            prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs);
        }

        #[test]
        fn resonance_is_homogeneous(lambda in 1e-6f64..1e-3) {
            let m = MaterialProperties::y_cut();
            let f1 = resonance_frequency(&m, lambda).unwrap();
            let f2 = resonance_frequency(&m, 2.0 * lambda).unwrap();
            prop_assert_eq!(f1, 2.0 * f2);
        }
    }
}
