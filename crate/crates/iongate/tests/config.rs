// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

use iongate::config::{
    builtin_profile, builtin_profiles, load, ExperimentConfig, Provenance, ResultEnvelope, PROFILE_NAMES,
};
use iongate::Error;

#[test]
fn profiles_validate_and_roundtrip() {
    for cfg in builtin_profiles().unwrap() {
        assert!(cfg.validate().is_empty(), "{}: {:?}", cfg.name, cfg.validate());
        let back = ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(back, cfg, "{}", cfg.name);
        assert_eq!(back.hash().unwrap(), cfg.hash().unwrap());
    }
    assert_eq!(builtin_profiles().unwrap().len(), PROFILE_NAMES.len());
}

#[test]
fn every_number_has_provenance() {
    for cfg in builtin_profiles().unwrap() {
        assert!(cfg.missing_provenance().is_empty(), "{}: {:?}", cfg.name, cfg.missing_provenance());
    }
    let cfg = builtin_profile("table1-100us").unwrap();
    assert_eq!(cfg.provenance.get("noise.heating_rate"), Some(&Provenance::Measured));
}

#[test]
fn table1_profile_values() {
    let cfg = builtin_profile("table1-100us").unwrap();
    assert_eq!(cfg.gate.t_g, 100e-6);
    assert_eq!(cfg.gate.loops, 2);
    assert!((cfg.noise.heating_rate - 2.2).abs() < 1e-12);
    assert!((cfg.noise.motional_tau - 0.2).abs() < 1e-12);
    assert!((cfg.noise.spin_dephasing_coeff - 2.0002e4).abs() < 2.0);
    let fast = builtin_profile("fast-gate-3.8us").unwrap();
    assert_eq!(fast.gate.loops, 1);
    assert!(fast.noise.raman_rate > cfg.noise.raman_rate);
}

#[test]
fn unknown_profile_and_keys_rejected() {
    assert!(matches!(builtin_profile("nope"), Err(Error::Config(_))));
    let mut text = builtin_profile("table1-100us").unwrap().to_toml().unwrap();
    text = text.replacen("[gate]\n", "[gate]\nbogus = 1.0\n", 1);
    let err = ExperimentConfig::from_toml(&text).unwrap_err();
    assert!(err.to_string().contains("bogus"), "{err}");
}

#[test]
fn negative_heating_is_named() {
    let mut cfg = builtin_profile("table1-100us").unwrap();
    cfg.noise.heating_rate = -1.0;
    let v = cfg.validate();
    assert!(v.iter().any(|s| s.starts_with("noise.heating_rate")), "{v:?}");
    assert!(matches!(cfg.check(), Err(Error::Validation(_))));
}

#[test]
fn provenance_keys_must_name_parameters() {
    let mut cfg = builtin_profile("table1-100us").unwrap();
    cfg.provenance.insert("gate.nonexistent".into(), Provenance::Assumed);
    assert!(cfg.validate().iter().any(|s| s.contains("provenance.gate.nonexistent")));
}

#[test]
fn save_and_load() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.toml");
    let cfg = builtin_profile("rbm-paper").unwrap();
    cfg.save(&path).unwrap();
    assert_eq!(load(&path).unwrap(), cfg);
    let mut bad = cfg.clone();
    bad.readout.thresholds = [5, 5];
    bad.save(&path).unwrap();
    assert!(matches!(load(&path), Err(Error::Validation(_))));
    let missing = load(&dir.path().join("absent.toml")).unwrap_err();
    assert!(missing.to_string().contains("absent.toml"));
}

#[test]
fn hash_tracks_content() {
    let a = builtin_profile("table1-100us").unwrap();
    let mut b = a.clone();
    b.seed += 1;
    let (ha, hb) = (a.hash().unwrap(), b.hash().unwrap());
    assert_eq!(ha.len(), 64);
    assert!(ha.chars().all(|c| c.is_ascii_hexdigit()));
    assert_ne!(ha, hb);
}

#[test]
fn envelope_carries_hash_seed_versions() {
    let cfg = builtin_profile("table1-100us").unwrap();
    let env = ResultEnvelope::new(&cfg, &vec![1.0, 2.0]).unwrap();
    assert_eq!(env.config_hash, cfg.hash().unwrap());
    assert_eq!(env.seed, cfg.seed);
    assert!(env.versions.contains_key("iongate"));
    let json = serde_json::to_value(&env).unwrap();
    for key in ["config_hash", "seed", "outputs", "versions"] {
        assert!(json.get(key).is_some(), "{key}");
    }
}

#[test]
fn seeds_beyond_toml_range_rejected() {
    let mut cfg = builtin_profile("table1-100us").unwrap();
    cfg.rb.seed = 1 << 63;
    assert!(cfg.validate().iter().any(|s| s.starts_with("rb.seed")));
    assert!(cfg.to_toml().is_err());
}
