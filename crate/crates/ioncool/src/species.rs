//! Atomic species data for the cooling models.
//!
//! Values live in `data/species.json` (compiled in) so they can be audited
//! and extended without touching code. Linewidths are natural linewidths
//! gamma/2pi in Hz; masses in unified atomic mass units.

use crate::constants::AMU;
use crate::{IonError, Result};
use serde::Deserialize;
use std::f64::consts::PI;
use std::sync::OnceLock;

const SPECIES_JSON: &str = include_str!("../data/species.json");

#[derive(Debug, Clone, Deserialize)]
pub struct Species {
    /// Lookup key, e.g. "rb87".
    pub key: String,
    /// Human-readable label, e.g. "87Rb".
    pub name: String,
    pub mass_amu: f64,
    /// Cooling-transition wavelength.
    pub wavelength_nm: f64,
    /// Natural linewidth gamma/2pi.
    pub linewidth_hz: f64,
    /// Net charge in units of e (0 for neutral atoms).
    pub charge_e: i32,
}

impl Species {
    pub fn mass_kg(&self) -> f64 {
        self.mass_amu * AMU
    }

    pub fn wavelength_m(&self) -> f64 {
        self.wavelength_nm * 1e-9
    }

    /// Wavenumber k = 2pi / lambda in rad/m.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength_m()
    }

    /// Angular linewidth gamma in rad/s.
    pub fn gamma(&self) -> f64 {
        2.0 * PI * self.linewidth_hz
    }
}

#[derive(Debug, Deserialize)]
struct SpeciesFile {
    #[allow(dead_code)]
    version: u32,
    species: Vec<Species>,
}

fn table() -> &'static [Species] {
    static TABLE: OnceLock<Vec<Species>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let file: SpeciesFile =
            serde_json::from_str(SPECIES_JSON).expect("embedded species.json is valid");
        file.species
    })
}

/// All known species, in file order.
pub fn all_species() -> &'static [Species] {
    table()
}

pub fn lookup(key: &str) -> Result<&'static Species> {
    table().iter().find(|s| s.key == key).ok_or_else(|| {
        let known: Vec<&str> = table().iter().map(|s| s.key.as_str()).collect();
        IonError::InvalidParameter(format!(
            "unknown species '{key}' (known: {})",
            known.join(", ")
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn table_loads_and_lookup_works() {
        assert!(all_species().len() >= 4);
        let rb = lookup("rb87").unwrap();
        assert_eq!(rb.name, "87Rb");
        assert_relative_eq!(rb.wavelength_m(), 780.24e-9);
        assert!(lookup("unobtainium").is_err());
    }

    #[test]
    fn derived_quantities() {
        let na = lookup("na23").unwrap();
        // k = 2pi/589.16nm ~ 1.0665e7 rad/m
        assert_relative_eq!(na.wavenumber(), 2.0 * PI / 589.16e-9, max_relative = 1e-12);
        assert_relative_eq!(na.gamma(), 2.0 * PI * 9.79e6, max_relative = 1e-12);
        assert_relative_eq!(na.mass_kg(), 22.989769 * AMU, max_relative = 1e-12);
    }
}
