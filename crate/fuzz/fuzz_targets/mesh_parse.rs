#![no_main]

use libfuzzer_sys::fuzz_target;
use pareto_shape_core::mesh::io::{mesh_to_string, parse_mesh};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(mesh) = parse_mesh(text) {
        // accepted meshes round-trip exactly through the writer
        let again = parse_mesh(&mesh_to_string(&mesh)).expect("written mesh re-parses");
        assert_eq!(mesh.nodes, again.nodes);
        assert_eq!(mesh.triangles, again.triangles);
        assert_eq!(mesh.boundary_edges, again.boundary_edges);
    }
});
