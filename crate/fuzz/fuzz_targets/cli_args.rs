//! Arbitrary argument vectors: parsing and validation must return, never panic.

#![no_main]

use libfuzzer_sys::fuzz_target;
use mrw::cli::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let args = std::iter::once("mrw").chain(text.split(['\n', ' ']).filter(|a| !a.is_empty()));
    if let Ok(config) = ExperimentConfig::from_args(args) {
        assert!(config.n >= 1);
        assert!(config.replicas >= 1);
        assert_eq!(config.params.alpha(), config.params.p() - config.params.q());
    }
});
