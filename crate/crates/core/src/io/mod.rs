//! Configuration files, bundled profiles, CSV grids and transfer tables.

mod grid;
mod transfer;

use std::path::Path;

use sha2::{Digest, Sha256};
use toml::Value;

use crate::experiments::ExperimentConfig;
use crate::{Error, Result};

pub use grid::{read_grid, summary_path, write_grid};
pub use transfer::TransferTable;

/// Profile merged underneath every configuration.
pub const BASE_PROFILE: &str = "paper-device";

/// Bundled profiles by name.
pub const PROFILES: &[(&str, &str)] = &[
    ("paper-device", include_str!("../../profiles/paper-device.toml")),
    ("sweet-spot-first-order", include_str!("../../profiles/sweet-spot-first-order.toml")),
    ("off-sweet-first-order", include_str!("../../profiles/off-sweet-first-order.toml")),
    ("param-res-sweet", include_str!("../../profiles/param-res-sweet.toml")),
    ("param-res-off-sweet", include_str!("../../profiles/param-res-off-sweet.toml")),
    ("chevron", include_str!("../../profiles/chevron.toml")),
    ("amp-coupling", include_str!("../../profiles/amp-coupling.toml")),
    ("spectroscopy", include_str!("../../profiles/spectroscopy.toml")),
    ("spectrum", include_str!("../../profiles/spectrum.toml")),
    ("coupler-sweep", include_str!("../../profiles/coupler-sweep.toml")),
    ("transfer", include_str!("../../profiles/transfer.toml")),
    ("taylor-fourier", include_str!("../../profiles/taylor-fourier.toml")),
];

pub fn profile(name: &str) -> Result<&'static str> {
    PROFILES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| {
            let known: Vec<&str> = PROFILES.iter().map(|(n, _)| *n).collect();
            Error::config("profile", format!("unknown profile {name:?}; known: {}", known.join(", ")))
        })
}

/// Hex SHA-256 of the canonical TOML serialization.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    hex::encode(Sha256::digest(canonical_toml(cfg).as_bytes()))
}

/// Canonical TOML form; parsing it reproduces `cfg` exactly.
pub fn canonical_toml(cfg: &ExperimentConfig) -> String {
    toml::to_string(cfg).expect("configuration serializes to TOML")
}

/// Read, merge over the base profile and validate a configuration file.
pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    load(Some(path), None)
}

/// [`parse_config`] with a bundled profile between the base profile and the file.
pub fn parse_config_with_profile(path: &Path, profile_name: &str) -> Result<ExperimentConfig> {
    load(Some(path), Some(profile_name))
}

/// Base profile, then `profile_name`, then the file at `path`; later layers win.
pub fn load(path: Option<&Path>, profile_name: Option<&str>) -> Result<ExperimentConfig> {
    let mut layers = vec![(BASE_PROFILE.to_string(), profile(BASE_PROFILE)?.to_string())];
    if let Some(name) = profile_name {
        layers.push((name.to_string(), profile(name)?.to_string()));
    }
    if let Some(p) = path {
        let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
        layers.push((p.display().to_string(), text));
    }
    parse_layers(&layers)
}

/// Parse configuration text merged over the base profile.
pub fn parse_config_str(text: &str) -> Result<ExperimentConfig> {
    parse_layers(&[
        (BASE_PROFILE.into(), profile(BASE_PROFILE)?.into()),
        ("<input>".into(), text.into()),
    ])
}

fn parse_layers(layers: &[(String, String)]) -> Result<ExperimentConfig> {
    let mut merged = Value::Table(Default::default());
    for (source, text) in layers {
        let layer: Value = toml::from_str(text)
            .map_err(|e| Error::config(source.clone(), format!("not valid TOML: {}", e.message())))?;
        merge(&mut merged, layer);
    }
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(merged).map_err(|e| {
        let field = e.path().to_string();
        Error::config(if field == "." { "<root>".into() } else { field }, e.into_inner().to_string())
    })?;
    cfg.validate()?;
    Ok(cfg)
}

fn merge(base: &mut Value, layer: Value) {
    match (base, layer) {
        (Value::Table(b), Value::Table(l)) => {
            for (k, v) in l {
                match b.get_mut(&k) {
                    Some(existing) => merge(existing, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, l) => *b = l,
    }
}

/// Parse the canonical TOML embedded in a grid's metadata.
pub fn config_from_canonical(text: &str) -> Result<ExperimentConfig> {
    toml::from_str(text).map_err(|e| Error::config("config", e.message().to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_profile_parses() {
        for (name, _) in PROFILES {
            let cfg = load(None, Some(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(cfg.hash().len(), 64);
        }
    }

    #[test]
    fn merge_is_deep() {
        let cfg = parse_config_str("[pulse1]\nphi_tilde = 0.05\n").unwrap();
        let base = load(None, None).unwrap();
        assert_eq!(cfg.pulse1.phi_tilde, 0.05);
        assert_eq!(cfg.pulse1.omega_p, base.pulse1.omega_p);
    }

    #[test]
    fn unknown_fields_name_the_path() {
        match parse_config_str("[pulse1]\nphi_tlde = 0.05\n") {
            Err(Error::Config { field, constraint }) => {
                assert!(field.contains("pulse1"), "{field}");
                assert!(constraint.contains("phi_tlde"), "{constraint}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn canonical_round_trip() {
        let cfg = load(None, Some("coupler-sweep")).unwrap();
        let back = config_from_canonical(&canonical_toml(&cfg)).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(config_hash(&back), config_hash(&cfg));
    }
}
