#![no_main]

use libfuzzer_sys::fuzz_target;
use pareto_shape_core::config::{Config, ConfigError};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    match Config::parse(text) {
        // whatever was accepted must survive its own canonical form
        Ok(config) => {
            let again = Config::parse(&config.canonical()).expect("canonical config re-parses");
            assert_eq!(config, again);
        }
        Err(ConfigError::Invalid { line, .. }) => {
            if let Some(line) = line {
                assert!(line >= 1 && line <= text.lines().count().max(1));
            }
        }
        Err(ConfigError::Io { .. }) => unreachable!("parsing text does no I/O"),
    }
});
