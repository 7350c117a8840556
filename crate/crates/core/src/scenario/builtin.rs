//! Scenarios shipped with the library.
//!
//! * `chekhov_tot`: a prolonged tip-of-the-tongue state ended by a late
//!   decisive hint.
//! * `fluent_speech`: words recalled implicitly, no feeling of knowing.
//! * `fear_flash`: a brief fear stimulus; the feeling comes after it ends.
//! * `overnight`: consolidation between two days speeds up recall.

use super::config::ScenarioConfig;

pub const NAMES: [&str; 4] = ["chekhov_tot", "fluent_speech", "fear_flash", "overnight"];

pub fn source(name: &str) -> Option<&'static str> {
    Some(match name {
        "chekhov_tot" => include_str!("builtin/chekhov_tot.toml"),
        "fluent_speech" => include_str!("builtin/fluent_speech.toml"),
        "fear_flash" => include_str!("builtin/fear_flash.toml"),
        "overnight" => include_str!("builtin/overnight.toml"),
        _ => return None,
    })
}

pub fn get(name: &str) -> Option<ScenarioConfig> {
    source(name).map(|s| ScenarioConfig::from_toml_str(s).expect("builtin scenarios are valid"))
}

pub fn all() -> Vec<ScenarioConfig> {
    NAMES.iter().filter_map(|n| get(n)).collect()
}
