use std::f64::consts::PI;
use std::sync::Arc;

use pareto_shape_core::fem::quadrature::TRIANGLE_DEGREE_5;
use pareto_shape_core::flow::{solve_flow, FlowError, FlowProblem, InflowProfile};
use pareto_shape_core::mesh::{structured_rectangle, Mesh, RectangleTags};
use pareto_shape_core::{BoundaryTag, Vec2};

fn channel(nx: usize, ny: usize) -> Mesh {
    structured_rectangle(0.0, 2.0, 0.0, 1.0, nx, ny, RectangleTags::channel()).unwrap()
}

/// Harmonic with zero normal derivative on `y = 0` and `y = 1`.
fn exact(p: Vec2) -> f64 {
    (PI * p.x).cosh() * (PI * p.y).cos()
}

fn exact_problem(mesh: Mesh) -> FlowProblem {
    let g = |p: Vec2, tag: BoundaryTag| {
        let dx = PI * (PI * p.x).sinh() * (PI * p.y).cos();
        if tag == BoundaryTag::Inlet {
            -dx
        } else {
            dx
        }
    };
    FlowProblem::new(
        mesh,
        InflowProfile::Function(Arc::new(g)),
        Vec2::new(0.5, 0.5),
    )
}

fn l2_error(n: usize) -> f64 {
    let problem = exact_problem(channel(2 * n, n));
    let sol = solve_flow(&problem).unwrap();
    let shift = exact(problem.pin_point);
    let space = sol.space();
    let mut e = 0.0;
    for t in 0..space.mesh().n_triangles() {
        for &(l, w) in &TRIANGLE_DEGREE_5 {
            let d = space.evaluate(&sol.phi, t, l) - (exact(space.point(t, l)) - shift);
            e += w * space.area(t) * d * d;
        }
    }
    e.sqrt()
}

#[test]
fn manufactured_solution_converges_at_third_order() {
    let errs: Vec<f64> = [4, 8, 16, 32].iter().map(|&n| l2_error(n)).collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 2.5, "order {order} from {errs:?}");
    }
}

#[test]
fn uniform_channel_is_reproduced_exactly() {
    let u = 1.7;
    let problem = FlowProblem::new(
        channel(12, 7),
        InflowProfile::Uniform { speed: u },
        Vec2::new(0.0, 0.0),
    );
    let sol = solve_flow(&problem).unwrap();
    for i in 0..sol.phi.len() {
        assert!((sol.velocity[0][i] - u).abs() <= 1e-8);
        assert!(sol.velocity[1][i].abs() <= 1e-8);
    }
    let p = sol.space().dof_coords()[5];
    assert!((sol.phi[5] - u * p.x).abs() < 1e-9);
    assert!((sol.inlet_flux + sol.outlet_flux).abs() < 1e-12);
}

#[test]
fn incompatible_data_is_rejected_before_assembly() {
    let g = |_: Vec2, tag: BoundaryTag| if tag == BoundaryTag::Inlet { -1.0 } else { 0.5 };
    let problem = FlowProblem::new(
        channel(4, 2),
        InflowProfile::Function(Arc::new(g)),
        Vec2::new(0.5, 0.5),
    );
    assert!(matches!(
        solve_flow(&problem),
        Err(FlowError::IncompatibleData { .. })
    ));
}

#[test]
fn renumbering_nodes_leaves_the_potential_unchanged() {
    let problem = exact_problem(channel(8, 4));
    let sol = solve_flow(&problem).unwrap();
    let n = problem.mesh.n_nodes();
    let perm: Vec<usize> = (0..n).map(|i| (i * 7 + 3) % n).collect();
    assert!(
        !n.is_multiple_of(7),
        "stride must be coprime to the node count"
    );
    let moved = FlowProblem {
        mesh: problem.mesh.renumbered(&perm).unwrap(),
        ..problem.clone()
    };
    let sol2 = solve_flow(&moved).unwrap();
    for (i, p) in problem.mesh.nodes.iter().enumerate() {
        let j = moved.mesh.find_node(*p, 1e-12).unwrap();
        assert!((sol.phi[i] - sol2.phi[j]).abs() < 1e-10);
        assert!((sol.velocity[0][i] - sol2.velocity[0][j]).abs() < 1e-9);
    }
}

#[test]
fn potential_obeys_the_maximum_principle() {
    // extrema of a harmonic function sit on the boundary
    let problem = exact_problem(channel(16, 8));
    let sol = solve_flow(&problem).unwrap();
    let mesh = &problem.mesh;
    let on_boundary: Vec<bool> = {
        let mut b = vec![false; mesh.n_nodes()];
        for e in &mesh.boundary_edges {
            b[e.nodes[0]] = true;
            b[e.nodes[1]] = true;
        }
        b
    };
    let (mut bmin, mut bmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..mesh.n_nodes() {
        if on_boundary[i] {
            bmin = bmin.min(sol.phi[i]);
            bmax = bmax.max(sol.phi[i]);
        }
    }
    let tol = 1e-6 * (bmax - bmin);
    for i in 0..mesh.n_nodes() {
        assert!(sol.phi[i] >= bmin - tol && sol.phi[i] <= bmax + tol);
    }
}

#[test]
fn csv_has_one_row_per_vertex() {
    let problem = FlowProblem::new(
        channel(3, 2),
        InflowProfile::Uniform { speed: 1.0 },
        Vec2::new(0.0, 0.0),
    );
    let sol = solve_flow(&problem).unwrap();
    let mut buf = Vec::new();
    sol.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().next(), Some("node,x,y,phi,vx,vy"));
    assert_eq!(text.lines().count(), problem.mesh.n_nodes() + 1);
}

mod pressure {
    use std::f64::consts::TAU;

    use pareto_shape_core::flow::{static_pressure_with, traction_from_pressure};
    use pareto_shape_core::geometry::BoundaryGeometry;
    use pareto_shape_core::{BoundaryTag, Vec2};

    fn circle(n: usize, wetted: impl Fn(usize) -> bool) -> BoundaryGeometry {
        let vertices = (0..n)
            .map(|i| {
                let t = TAU * i as f64 / n as f64;
                Vec2::new(t.cos(), t.sin())
            })
            .collect();
        let tags = (0..n)
            .map(|i| {
                if wetted(i) {
                    BoundaryTag::Component
                } else {
                    BoundaryTag::Root
                }
            })
            .collect();
        BoundaryGeometry::from_polygon(vertices, tags, 0).unwrap()
    }

    #[test]
    fn still_fluid_has_stagnation_pressure() {
        let bg = circle(32, |_| true);
        let p = static_pressure_with(&bg, 1.3, 2.5, |_| Some(0.0)).unwrap();
        assert!(p
            .at_vertices
            .iter()
            .chain(&p.at_midpoints)
            .all(|&v| v == 2.5));
    }

    #[test]
    fn constant_speed_bernoulli() {
        let bg = circle(32, |i| i < 16);
        let p = static_pressure_with(&bg, 2.0, 5.0, |_| Some(1.0)).unwrap();
        for i in 0..32 {
            let expected = if i <= 16 { 4.0 } else { 0.0 };
            assert_eq!(p.at_vertices[i], expected, "vertex {i}");
            assert_eq!(p.at_midpoints[i], if i < 16 { 4.0 } else { 0.0 });
        }
    }

    #[test]
    fn uniform_pressure_on_a_closed_curve_has_no_net_force() {
        let bg = circle(64, |_| true);
        let p = static_pressure_with(&bg, 1.0, 3.0, |_| Some(0.0)).unwrap();
        let g = traction_from_pressure(&p, &bg);
        for i in 0..64 {
            assert!((g.at_vertices[i] + 3.0 * bg.normals[i]).norm() < 1e-12);
        }
        assert!(g.net_force().norm() < 1e-8);
    }

    #[test]
    fn zero_pressure_gives_zero_traction() {
        let bg = circle(16, |_| true);
        let p = static_pressure_with(&bg, 1.0, 0.0, |_| Some(0.0)).unwrap();
        let g = traction_from_pressure(&p, &bg);
        assert!(g
            .at_vertices
            .iter()
            .chain(&g.at_midpoints)
            .all(|v| v.norm() == 0.0));
    }

    #[test]
    fn net_force_matches_simpson_oracle() {
        let bg = circle(40, |i| i < 20);
        let speed = |p: Vec2| Some(1.0 + 0.5 * p.x + 0.25 * p.y * p.y);
        let p = static_pressure_with(&bg, 1.2, 0.7, speed).unwrap();
        let g = traction_from_pressure(&p, &bg);
        let mut oracle = Vec2::zeros();
        for i in 0..bg.len() {
            let len = bg.segment_length(i);
            let (a, b) = (g.at_vertices[i], g.at_vertices[(i + 1) % bg.len()]);
            if bg.is_wetted(i) {
                oracle += len / 6.0 * (a + 4.0 * g.at_midpoints[i] + b);
            }
        }
        assert!((g.net_force() - oracle).norm() < 1e-10);
        assert!(oracle.norm() > 0.1);
    }
}

#[test]
fn pressure_peaks_where_the_flow_stagnates() {
    use pareto_shape_core::coupled::{flow_problem, FlowSettings};
    use pareto_shape_core::flow::static_pressure;
    use pareto_shape_core::geometry::{
        boundary_geometry, realize_shape, Baseline, Disc, Rect, ShapeSpaceConfig, ShapeSpaceParams,
    };
    use pareto_shape_core::mesh::mesh_fluid;

    let params = ShapeSpaceParams::new(
        Baseline::circle(Vec2::new(0.0, 0.0), 1.0).unwrap(),
        Rect::new(-4.0, 6.0, 0.0, 3.0),
        Disc {
            center: Vec2::new(0.0, -0.5),
            radius: 0.25,
        },
    );
    let cfg = Arc::new(ShapeSpaceConfig::new(params).unwrap());
    let shape = realize_shape(&cfg, &[0.0; 4]).unwrap();
    let problem = flow_problem(
        &shape,
        mesh_fluid(&shape, 0.2).unwrap(),
        &FlowSettings::default(),
    );
    let sol = solve_flow(&problem).unwrap();
    let bg = boundary_geometry(&shape, 64).unwrap();
    let p = static_pressure(&sol, &problem, &bg).unwrap();
    let wetted = bg.wetted_vertices();
    let argmax_p = *wetted
        .iter()
        .max_by(|&&a, &&b| p.at_vertices[a].total_cmp(&p.at_vertices[b]))
        .unwrap();
    let speed = |i: usize| sol.boundary_speed_at(bg.vertices[i]).unwrap();
    let argmin_v = *wetted
        .iter()
        .min_by(|&&a, &&b| speed(a).total_cmp(&speed(b)))
        .unwrap();
    assert_eq!(argmax_p, argmin_v);
    // stagnation points are at the foot of the bump
    assert!(bg.vertices[argmax_p].y < 0.3);
}
