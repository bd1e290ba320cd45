//! Raw `(s, q, p)` triples: accepted parameters must give finite exact laws,
//! sequences and spectral data.

#![no_main]

use libfuzzer_sys::fuzz_target;
use mrw::exact::exact_distribution;
use mrw::sequences::SequenceStream;
use mrw::spectral::build_spectral;
use mrw::ModelParams;

fuzz_target!(|data: [u8; 25]| {
    let f = |i: usize| f64::from_le_bytes(data[8 * i..8 * i + 8].try_into().unwrap());
    let Ok(prm) = ModelParams::new(f(0), f(1), f(2)) else {
        return;
    };
    let n = 1 + data[24] as usize % 64;
    let law = exact_distribution(&prm, n).unwrap();
    assert!((law.total_mass() - 1.0).abs() < 1e-9);
    for term in SequenceStream::new(&prm).take(n) {
        assert!(term.a.is_finite() && term.a > 0.0 && term.f > 0.0 && term.f <= 1.0);
    }
    build_spectral(&prm).unwrap();
});
