//! Replays the checked-in fuzz corpus through the same assertions the fuzz
//! targets make, so the seeds stay meaningful without a fuzzing toolchain.

use std::fs;
use std::path::PathBuf;

use pareto_shape_core::config::{Config, ConfigError};
use pareto_shape_core::mesh::io::{mesh_to_string, parse_mesh};

fn corpus(name: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(name);
    let mut files: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read_to_string(&p).unwrap(),
            )
        })
        .collect()
}

#[test]
fn config_seeds() {
    let seeds = corpus("config_parse");
    assert!(seeds.len() >= 5);
    let mut accepted = 0;
    for (name, text) in &seeds {
        match Config::parse(text) {
            Ok(config) => {
                accepted += 1;
                assert_eq!(
                    Config::parse(&config.canonical()).unwrap(),
                    config,
                    "{name}"
                );
            }
            Err(ConfigError::Invalid { line, field, .. }) => {
                assert!(!field.is_empty(), "{name}");
                if let Some(line) = line {
                    assert!(
                        line >= 1 && line <= text.lines().count().max(1),
                        "{name}: line {line}"
                    );
                }
            }
            Err(e) => panic!("{name}: {e}"),
        }
    }
    assert!(
        accepted >= 3 && accepted < seeds.len(),
        "seeds should cover both outcomes"
    );
}

#[test]
fn mesh_seeds() {
    let seeds = corpus("mesh_parse");
    let mut accepted = 0;
    for (name, text) in &seeds {
        if let Ok(mesh) = parse_mesh(text) {
            accepted += 1;
            let again = parse_mesh(&mesh_to_string(&mesh)).unwrap();
            assert_eq!(mesh.nodes, again.nodes, "{name}");
            assert_eq!(mesh.triangles, again.triangles, "{name}");
            assert_eq!(mesh.boundary_edges, again.boundary_edges, "{name}");
        }
    }
    assert!(
        accepted >= 2 && accepted < seeds.len(),
        "seeds should cover both outcomes"
    );
}
