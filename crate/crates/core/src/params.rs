//! Physical parameters of the driven two-electron oscillator, unit presets and
//! the flat `key = value` configuration format.
//!
//! All quantities are stored in a Gaussian-style system where the Coulomb
//! repulsion is `q^2 / r` and the laser coupling is `-q r.e E0 sin(omega t + delta)`.
//! The SI preset converts charge and field on the way in so that this form
//! stays valid.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Polarization vectors must be normalized to this accuracy.
pub const POLARIZATION_TOL: f64 = 1e-12;

/// Config keys, in canonical order.
pub const CONFIG_KEYS: [&str; 10] = [
    "mu", "q", "hbar", "Omega", "omega", "E0", "delta", "pol_x", "pol_y", "pol_z",
];

/// CODATA 2018 constants used by the SI preset.
pub mod si {
    pub const HBAR: f64 = 1.054_571_817e-34;
    pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
    pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
    pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

    /// `sqrt(4 pi eps0)`: converts between SI charge/field and the
    /// Gaussian-style values stored in [`super::SystemParams`].
    pub fn gaussian_factor() -> f64 {
        (4.0 * std::f64::consts::PI * VACUUM_PERMITTIVITY).sqrt()
    }

    /// Bohr radius in metres.
    pub fn bohr_radius() -> f64 {
        let k = 1.0 / (4.0 * std::f64::consts::PI * VACUUM_PERMITTIVITY);
        HBAR * HBAR / (ELECTRON_MASS * ELEMENTARY_CHARGE * ELEMENTARY_CHARGE * k)
    }

    /// Hartree energy in joules.
    pub fn hartree() -> f64 {
        let a0 = bohr_radius();
        HBAR * HBAR / (ELECTRON_MASS * a0 * a0)
    }

    /// Atomic unit of time in seconds.
    pub fn atomic_time() -> f64 {
        HBAR / hartree()
    }

    /// Atomic unit of electric field in V/m.
    pub fn atomic_field() -> f64 {
        hartree() / (ELEMENTARY_CHARGE * bohr_radius())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    /// hbar = mu = |q| = 1.
    Atomic,
    /// Electron in SI units; `q` in coulombs and `E0` in V/m at the config
    /// boundary.
    Si,
    /// Every value given explicitly, stored as-is.
    Custom,
}

impl UnitSystem {
    /// Baseline parameters of the preset: an electron pair with the standard
    /// example drive (Omega = 0.5, omega = 0.2, E0 = 0.1 in atomic units).
    pub fn base_params(self) -> SystemParams {
        match self {
            UnitSystem::Atomic | UnitSystem::Custom => SystemParams::atomic_default(),
            UnitSystem::Si => {
                let au = SystemParams::atomic_default();
                let t_au = si::atomic_time();
                SystemParams {
                    mu: si::ELECTRON_MASS,
                    q: -si::ELEMENTARY_CHARGE / si::gaussian_factor(),
                    hbar: si::HBAR,
                    trap_freq: au.trap_freq / t_au,
                    laser_freq: au.laser_freq / t_au,
                    field_amplitude: au.field_amplitude * si::atomic_field() * si::gaussian_factor(),
                    phase: 0.0,
                    polarization: Vector3::z(),
                }
            }
        }
    }

    /// Scale applied to a user-supplied `q` before storing it.
    fn charge_scale(self) -> f64 {
        match self {
            UnitSystem::Si => 1.0 / si::gaussian_factor(),
            _ => 1.0,
        }
    }

    /// Scale applied to a user-supplied `E0` before storing it.
    fn field_scale(self) -> f64 {
        match self {
            UnitSystem::Si => si::gaussian_factor(),
            _ => 1.0,
        }
    }
}

impl FromStr for UnitSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "atomic" | "au" | "atomic-units" => Ok(UnitSystem::Atomic),
            "si" => Ok(UnitSystem::Si),
            "custom" => Ok(UnitSystem::Custom),
            other => Err(Error::Config(format!("unknown unit system '{other}'"))),
        }
    }
}

impl fmt::Display for UnitSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnitSystem::Atomic => "atomic",
            UnitSystem::Si => "si",
            UnitSystem::Custom => "custom",
        })
    }
}

/// Physical constants of the Hamiltonian.
///
/// `q` is signed: the laser term uses `q`, the repulsion uses `q^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub mu: f64,
    pub q: f64,
    pub hbar: f64,
    /// Oscillator angular frequency, `Omega`.
    pub trap_freq: f64,
    /// Laser angular frequency, `omega`.
    pub laser_freq: f64,
    /// Laser amplitude, `E0`.
    pub field_amplitude: f64,
    /// Laser phase, `delta`.
    pub phase: f64,
    pub polarization: Vector3<f64>,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self::atomic_default()
    }
}

impl SystemParams {
    /// Atomic units with the reference drive: Omega = 0.5, omega = 0.2,
    /// E0 = 0.1, delta = 0, polarization along z.
    pub fn atomic_default() -> Self {
        SystemParams {
            mu: 1.0,
            q: -1.0,
            hbar: 1.0,
            trap_freq: 0.5,
            laser_freq: 0.2,
            field_amplitude: 0.1,
            phase: 0.0,
            polarization: Vector3::z(),
        }
    }

    pub fn with_trap_freq(mut self, omega: f64) -> Self {
        self.trap_freq = omega;
        self
    }

    pub fn with_laser_freq(mut self, omega: f64) -> Self {
        self.laser_freq = omega;
        self
    }

    pub fn with_field(mut self, e0: f64) -> Self {
        self.field_amplitude = e0;
        self
    }

    pub fn with_phase(mut self, delta: f64) -> Self {
        self.phase = delta;
        self
    }

    pub fn with_polarization(mut self, e: Vector3<f64>) -> Self {
        self.polarization = e;
        self
    }

    /// Coulomb coupling constant `q^2`.
    pub fn coulomb(&self) -> f64 {
        self.q * self.q
    }

    /// Sets one parameter by its config key. `q` and `E0` are interpreted in
    /// the conventions of `units`.
    pub fn set(&mut self, key: &str, value: f64, units: UnitSystem) -> Result<()> {
        match key {
            "mu" => self.mu = value,
            "q" => self.q = value * units.charge_scale(),
            "hbar" => self.hbar = value,
            "Omega" => self.trap_freq = value,
            "omega" => self.laser_freq = value,
            "E0" => self.field_amplitude = value * units.field_scale(),
            "delta" => self.phase = value,
            "pol_x" => self.polarization.x = value,
            "pol_y" => self.polarization.y = value,
            "pol_z" => self.polarization.z = value,
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Applies a flat config file (`key = value` per line, `#` comments) on
    /// top of `self`.
    pub fn apply_config(&mut self, text: &str, units: UnitSystem) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            let key = key.trim();
            let value: f64 = value.trim().parse().map_err(|_| {
                Error::Config(format!("line {}: '{}' is not a number", lineno + 1, value.trim()))
            })?;
            self.set(key, value, units)
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    /// Parses a config file on top of the preset's base parameters.
    pub fn from_config(text: &str, units: UnitSystem) -> Result<Self> {
        let mut p = units.base_params();
        p.apply_config(text, units)?;
        Ok(p)
    }

    /// Renders the stored values in config syntax.
    pub fn to_config(&self) -> String {
        let v = [
            self.mu,
            self.q,
            self.hbar,
            self.trap_freq,
            self.laser_freq,
            self.field_amplitude,
            self.phase,
            self.polarization.x,
            self.polarization.y,
            self.polarization.z,
        ];
        CONFIG_KEYS
            .iter()
            .zip(v)
            .map(|(k, v)| format!("{k} = {v:.17e}\n"))
            .collect()
    }
}

/// Parameters that passed [`validate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ValidatedParams(SystemParams);

impl Deref for ValidatedParams {
    type Target = SystemParams;

    fn deref(&self) -> &SystemParams {
        &self.0
    }
}

impl ValidatedParams {
    pub fn into_inner(self) -> SystemParams {
        self.0
    }

    /// Validated copy with a different oscillator frequency.
    pub fn with_trap_freq(&self, omega: f64) -> Result<Self> {
        validate(self.0.with_trap_freq(omega))
    }
}

impl From<ValidatedParams> for SystemParams {
    fn from(p: ValidatedParams) -> Self {
        p.0
    }
}

pub fn validate(p: SystemParams) -> Result<ValidatedParams> {
    let finite = [
        ("mu", p.mu),
        ("q", p.q),
        ("hbar", p.hbar),
        ("Omega", p.trap_freq),
        ("omega", p.laser_freq),
        ("E0", p.field_amplitude),
        ("delta", p.phase),
        ("pol_x", p.polarization.x),
        ("pol_y", p.polarization.y),
        ("pol_z", p.polarization.z),
    ];
    if let Some((name, _)) = finite.iter().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite(name));
    }
    if p.mu <= 0.0 {
        return Err(Error::NonPositiveMass(p.mu));
    }
    if p.hbar <= 0.0 {
        return Err(Error::NonPositiveHbar(p.hbar));
    }
    if p.trap_freq < 0.0 {
        return Err(Error::NegativeFrequency { field: "Omega", value: p.trap_freq });
    }
    if p.laser_freq < 0.0 {
        return Err(Error::NegativeFrequency { field: "omega", value: p.laser_freq });
    }
    if p.field_amplitude < 0.0 {
        return Err(Error::NegativeAmplitude(p.field_amplitude));
    }
    let norm = p.polarization.norm();
    if (norm - 1.0).abs() > POLARIZATION_TOL {
        return Err(Error::NonUnitPolarization(norm));
    }
    Ok(ValidatedParams(p))
}

/// Numerical tolerances shared by the solvers. Every field can be overridden
/// from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Closed-form CM evaluator refuses `|sin(Omega t)|` at or below this.
    pub sin: f64,
    /// Resonance band on `|Omega^2 - omega^2|`.
    pub resonance: f64,
    /// Absolute tolerance of the coherent-state phase quadrature, in units
    /// of `hbar` (so it bounds the phase error in radians).
    pub phase_quad: f64,
    /// Relative tolerance of normalization quadratures.
    pub norm_quad: f64,
    /// Allowed trapezoid self-estimate in the path-integral propagator.
    pub grid_quad: f64,
    /// Boundary amplitude / peak amplitude that counts as a leak.
    pub boundary_leak: f64,
    /// Energy bracket width at which shooting stops.
    pub shoot: f64,
    /// Scaled coefficient magnitude treated as zero in the series.
    pub termination: f64,
    /// Accepted scaled closure residual for terminating pairs.
    pub pair_residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            sin: 1e-8,
            resonance: 1e-8,
            phase_quad: 1e-12,
            norm_quad: 1e-10,
            grid_quad: 1e-6,
            boundary_leak: 1e-6,
            shoot: 1e-9,
            termination: 1e-12,
            pair_residual: 1e-10,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 9] = [
        "sin",
        "resonance",
        "phase-quad",
        "norm-quad",
        "grid-quad",
        "boundary-leak",
        "shoot",
        "termination",
        "pair-residual",
    ];

    /// Overrides one tolerance by its command-line name.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::Config(format!("tolerance {name} must be positive")));
        }
        let slot = match name {
            "sin" => &mut self.sin,
            "resonance" => &mut self.resonance,
            "phase-quad" => &mut self.phase_quad,
            "norm-quad" => &mut self.norm_quad,
            "grid-quad" => &mut self.grid_quad,
            "boundary-leak" => &mut self.boundary_leak,
            "shoot" => &mut self.shoot,
            "termination" => &mut self.termination,
            "pair-residual" => &mut self.pair_residual,
            other => return Err(Error::Config(format!("unknown tolerance '{other}'"))),
        };
        *slot = value;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_defaults_are_accepted() {
        let p = validate(SystemParams::atomic_default()).unwrap();
        assert_eq!(p.mu, 1.0);
        assert_eq!(p.hbar, 1.0);
        assert_eq!(p.q.abs(), 1.0);
        assert_eq!(p.trap_freq, 0.5);
        assert_eq!(p.laser_freq, 0.2);
        assert_eq!(p.field_amplitude, 0.1);
        assert_eq!(p.phase, 0.0);
        assert_eq!(p.polarization, Vector3::z());
    }

    #[test]
    fn zero_mass_is_rejected() {
        let p = SystemParams { mu: 0.0, ..SystemParams::atomic_default() };
        assert_eq!(validate(p), Err(Error::NonPositiveMass(0.0)));
    }

    #[test]
    fn long_polarization_is_rejected() {
        let p = SystemParams::atomic_default().with_polarization(Vector3::new(0.0, 0.0, 2.0));
        assert_eq!(validate(p), Err(Error::NonUnitPolarization(2.0)));
    }

    #[test]
    fn other_invariants() {
        let base = SystemParams::atomic_default();
        assert!(matches!(
            validate(SystemParams { hbar: -1.0, ..base }),
            Err(Error::NonPositiveHbar(_))
        ));
        assert!(matches!(
            validate(base.with_field(-0.1)),
            Err(Error::NegativeAmplitude(_))
        ));
        assert!(matches!(
            validate(base.with_laser_freq(-1.0)),
            Err(Error::NegativeFrequency { field: "omega", .. })
        ));
        assert!(matches!(
            validate(base.with_trap_freq(f64::NAN)),
            Err(Error::NonFinite("Omega"))
        ));
        // a negative charge is fine: only q^2 enters the repulsion
        let neg = validate(SystemParams { q: -2.0, ..base }).unwrap();
        assert_eq!(neg.coulomb(), 4.0);
    }

    #[test]
    fn validate_is_idempotent() {
        let p = validate(SystemParams::atomic_default().with_phase(0.3)).unwrap();
        let again = validate(p.into_inner()).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn config_parsing() {
        let text = "# driven run\nOmega = 0.25\n  E0=0.05 # weak\n\npol_x = 1\npol_z = 0\n";
        let p = SystemParams::from_config(text, UnitSystem::Atomic).unwrap();
        assert_eq!(p.trap_freq, 0.25);
        assert_eq!(p.field_amplitude, 0.05);
        assert_eq!(p.polarization, Vector3::x());
        assert_eq!(p.laser_freq, 0.2);

        let err = SystemParams::from_config("Omegaa = 1", UnitSystem::Atomic).unwrap_err();
        assert!(err.to_string().contains("Omegaa"));
        assert!(SystemParams::from_config("mu 1", UnitSystem::Atomic).is_err());
        assert!(SystemParams::from_config("mu = one", UnitSystem::Atomic).is_err());
    }

    #[test]
    fn config_round_trip_is_exact() {
        let p = SystemParams::atomic_default().with_phase(0.1).with_field(1.0 / 3.0);
        let back = SystemParams::from_config(&p.to_config(), UnitSystem::Custom).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn si_preset_stores_gaussian_charge() {
        let p = UnitSystem::Si.base_params();
        // q^2 / a0 is one hartree
        let e_h = p.coulomb() / si::bohr_radius();
        assert!((e_h / si::hartree() - 1.0).abs() < 1e-14);
        // q E0 equals the SI force scale
        let f_si = si::ELEMENTARY_CHARGE * 0.1 * si::atomic_field();
        assert!(((p.q * p.field_amplitude).abs() / f_si - 1.0).abs() < 1e-14);
        assert!(validate(p).is_ok());

        let mut from_cfg = UnitSystem::Si.base_params();
        from_cfg.set("q", -si::ELEMENTARY_CHARGE, UnitSystem::Si).unwrap();
        assert!((from_cfg.q / p.q - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unit_names() {
        assert_eq!("atomic".parse::<UnitSystem>().unwrap(), UnitSystem::Atomic);
        assert_eq!("SI".parse::<UnitSystem>().unwrap(), UnitSystem::Si);
        assert!("cgs".parse::<UnitSystem>().is_err());
    }

    #[test]
    fn tolerance_overrides() {
        let mut t = Tolerances::default();
        t.set("sin", 1e-6).unwrap();
        assert_eq!(t.sin, 1e-6);
        assert!(t.set("sin", -1.0).is_err());
        assert!(t.set("nope", 1.0).is_err());
        for name in Tolerances::NAMES {
            t.set(name, 0.5).unwrap();
        }
    }
}
