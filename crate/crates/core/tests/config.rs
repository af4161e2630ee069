use std::path::PathBuf;

use proptest::prelude::*;

use pareto_shape_core::config::{Config, ConfigError};

fn shipped(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn example_text() -> String {
    std::fs::read_to_string(shipped("example.toml")).unwrap()
}

#[test]
fn shipped_configs_parse_and_build() {
    for name in ["example.toml", "epsilon.toml", "incompatible.toml"] {
        let config = Config::from_path(&shipped(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        config.shape_space().unwrap();
        config.reliability_model().unwrap();
        assert_eq!(
            Config::parse(&config.canonical()).unwrap(),
            config,
            "{name}"
        );
    }
}

#[test]
fn missing_file_is_an_io_error() {
    let e = Config::from_path(&shipped("no-such-file.toml")).unwrap_err();
    assert!(matches!(e, ConfigError::Io { .. }));
}

/// Lines of the example holding a scalar numeric key, as (line, section, key).
fn numeric_keys(text: &str) -> Vec<(usize, String, String)> {
    let mut section = String::new();
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.starts_with('[') {
            section = t.trim_matches(|c| c == '[' || c == ']').to_string();
        } else if let Some((k, v)) = t.split_once('=') {
            if v.trim().parse::<f64>().is_ok() {
                out.push((i + 1, section.clone(), k.trim().to_string()));
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn corrupted_values_are_located(pick in any::<prop::sample::Index>(), as_string in any::<bool>()) {
        let text = example_text();
        let keys = numeric_keys(&text);
        let (line, section, key) = &keys[pick.index(keys.len())];
        let replacement = if as_string { "\"oops\"" } else { "[1, 2]" };
        let broken: String = text
            .lines()
            .enumerate()
            .map(|(i, l)| if i + 1 == *line { format!("{key} = {replacement}") } else { l.to_string() })
            .collect::<Vec<_>>()
            .join("\n");
        let e = Config::parse(&broken).unwrap_err();
        prop_assert_eq!(e.line(), Some(*line), "{}", e);
        let field = format!("{section}.{key}");
        prop_assert_eq!(e.field(), Some(field.as_str()), "{}", e);
        let expected = format!("line {}", line);
        prop_assert!(e.to_string().contains(&expected));
    }
}
