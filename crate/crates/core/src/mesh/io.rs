//! Plain text mesh format.
//!
//! ```text
//! <node count>
//! x y            (one line per node)
//! <triangle count>
//! i j k          (zero-based node indices)
//! <boundary edge count>
//! i j tag        (tag is inlet|outlet|wall|component|clamp|root)
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. The region is solid
//! when any edge is tagged `clamp` or `root`, fluid otherwise.

use std::io::{self, Write};

use super::{BoundaryEdge, Mesh, MeshError, Region};
use crate::{BoundaryTag, Vec2};

pub fn write_mesh<W: Write>(mesh: &Mesh, mut out: W) -> io::Result<()> {
    writeln!(out, "{}", mesh.nodes.len())?;
    for p in &mesh.nodes {
        writeln!(out, "{} {}", p.x, p.y)?;
    }
    writeln!(out, "{}", mesh.triangles.len())?;
    for t in &mesh.triangles {
        writeln!(out, "{} {} {}", t[0], t[1], t[2])?;
    }
    writeln!(out, "{}", mesh.boundary_edges.len())?;
    for e in &mesh.boundary_edges {
        writeln!(out, "{} {} {}", e.nodes[0], e.nodes[1], e.tag)?;
    }
    Ok(())
}

pub fn mesh_to_string(mesh: &Mesh) -> String {
    let mut buf = Vec::new();
    write_mesh(mesh, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("mesh text is ASCII")
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next_fields(&mut self, what: &str) -> Result<(usize, Vec<&'a str>), MeshError> {
        for (i, line) in self.inner.by_ref() {
            self.last = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            return Ok((i + 1, line.split_whitespace().collect()));
        }
        Err(MeshError::Parse {
            line: self.last + 1,
            message: format!("unexpected end of input, expected {what}"),
        })
    }

    fn count(&mut self, what: &str) -> Result<usize, MeshError> {
        let (line, f) = self.next_fields(what)?;
        if f.len() != 1 {
            return Err(MeshError::Parse {
                line,
                message: format!("expected a single {what}"),
            });
        }
        f[0].parse().map_err(|_| MeshError::Parse {
            line,
            message: format!("invalid {what} '{}'", f[0]),
        })
    }
}

fn parse_index(s: &str, line: usize, bound: usize) -> Result<usize, MeshError> {
    let v: usize = s.parse().map_err(|_| MeshError::Parse {
        line,
        message: format!("invalid node index '{s}'"),
    })?;
    if v >= bound {
        return Err(MeshError::Parse {
            line,
            message: format!("node index {v} out of range (node count {bound})"),
        });
    }
    Ok(v)
}

/// Parses and validates a mesh in the text format.
pub fn parse_mesh(text: &str) -> Result<Mesh, MeshError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    let n_nodes = lines.count("node count")?;
    let mut nodes = Vec::new();
    for _ in 0..n_nodes {
        let (line, f) = lines.next_fields("node coordinates")?;
        if f.len() != 2 {
            return Err(MeshError::Parse {
                line,
                message: "expected 'x y'".into(),
            });
        }
        let mut xy = [0.0; 2];
        for (k, s) in f.iter().enumerate() {
            xy[k] = s
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| MeshError::Parse {
                    line,
                    message: format!("invalid coordinate '{s}'"),
                })?;
        }
        nodes.push(Vec2::new(xy[0], xy[1]));
    }
    let n_tri = lines.count("triangle count")?;
    let mut triangles = Vec::new();
    for _ in 0..n_tri {
        let (line, f) = lines.next_fields("triangle")?;
        if f.len() != 3 {
            return Err(MeshError::Parse {
                line,
                message: "expected 'i j k'".into(),
            });
        }
        triangles.push([
            parse_index(f[0], line, n_nodes)?,
            parse_index(f[1], line, n_nodes)?,
            parse_index(f[2], line, n_nodes)?,
        ]);
    }
    let n_edges = lines.count("boundary edge count")?;
    let mut edges = Vec::new();
    for _ in 0..n_edges {
        let (line, f) = lines.next_fields("boundary edge")?;
        if f.len() != 3 {
            return Err(MeshError::Parse {
                line,
                message: "expected 'i j tag'".into(),
            });
        }
        let tag: BoundaryTag = f[2].parse().map_err(|_| MeshError::Parse {
            line,
            message: format!("unknown boundary tag '{}'", f[2]),
        })?;
        edges.push(BoundaryEdge {
            nodes: [
                parse_index(f[0], line, n_nodes)?,
                parse_index(f[1], line, n_nodes)?,
            ],
            tag,
        });
    }
    if let Ok((line, _)) = lines.next_fields("") {
        return Err(MeshError::Parse {
            line,
            message: "trailing content after the boundary edges".into(),
        });
    }
    let region = if edges
        .iter()
        .any(|e| matches!(e.tag, BoundaryTag::Clamp | BoundaryTag::Root))
    {
        Region::Solid
    } else {
        Region::Fluid
    };
    Mesh::new(nodes, triangles, edges, region)
}
