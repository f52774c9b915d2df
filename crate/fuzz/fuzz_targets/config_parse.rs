#![no_main]

use libfuzzer_sys::fuzz_target;
use stereo_error::scenario::parse_config;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(config) = parse_config(text) {
        // A config that passed validation must yield a usable rig and grid.
        let rig = config.stereo_rig(None).expect("validated config builds a rig");
        assert!(rig.focal_px() > 0.0);
        let grid = config.sweep.grid();
        assert_eq!(grid.len(), config.sweep.steps);
    }
});
