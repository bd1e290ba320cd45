//! Comma-separated `--grid` and `--n-list` values.

#![no_main]

use libfuzzer_sys::fuzz_target;
use mrw::cli::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(list) = std::str::from_utf8(data) else {
        return;
    };
    let fclt = [
        "mrw", "fclt", "--q", "0.25", "--p", "0.75", "--n", "10000", "--grid", list,
    ];
    if let Ok(config) = ExperimentConfig::from_args(fclt) {
        assert!(config.grid.windows(2).all(|w| w[0] < w[1]));
        assert!(config.grid.iter().all(|t| t.is_finite() && *t > 0.0));
    }
    let sup = [
        "mrw",
        "superdiffusive",
        "--q",
        "0.1",
        "--p",
        "0.9",
        "--n-list",
        list,
    ];
    if let Ok(config) = ExperimentConfig::from_args(sup) {
        assert!(config.n_list.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(config.n, *config.n_list.last().unwrap());
    }
});
