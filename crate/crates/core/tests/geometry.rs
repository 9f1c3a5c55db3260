mod common;

use std::f64::consts::PI;

use braidtri::angles::{build_constraints, find_interior_point, tau_constraints, ConstraintSystem};
use braidtri::exact::to_f64;
use braidtri::geometry::{
    completeness_residuals, cusp_cycles, edge_gluing_residuals, holonomy_residual, log_holonomy,
    shapes_from_angles, TetShape,
};
use braidtri::triangulation::Triangulation;
use braidtri::twobridge::{build_two_bridge, TwistWord};
use braidtri::veering::involution;
use braidtri::volume::{lobachevsky, maximize, random_interior_points, MaxOptions};
use common::oracle;
use num_complex::Complex64;

/// Volumes frozen from the gluing-equation oracle, `tau_1 ..= tau_12`.
const TAU_VOLUMES: [f64; 12] = [
    2.828122088331,
    3.663862376709,
    4.124903251808,
    4.415332477454,
    4.611961374497,
    4.751701965518,
    4.854663338650,
    4.932714058521,
    4.993271972921,
    5.041181256439,
    5.079718733052,
    5.111166587521,
];

const WORD_VOLUMES: [(&str, f64); 4] = [
    ("RL", 2.029883212819),
    ("RRLL", 4.059766425639),
    ("RRRLLR", 6.947555448593),
    ("RLRLR", 7.643375172360),
];

fn tau(p: usize) -> (Triangulation, ConstraintSystem, Vec<f64>) {
    let (tri, cs) = tau_constraints(p).unwrap();
    let inv = involution(p).unwrap();
    let theta = maximize(&cs, Some(&inv), &MaxOptions::default())
        .unwrap()
        .theta;
    (tri, cs, theta)
}

fn word(w: &str) -> (Triangulation, ConstraintSystem, Vec<f64>) {
    let tri = build_two_bridge(&TwistWord::parse(w).unwrap()).unwrap();
    let cs = build_constraints(&tri).unwrap();
    let theta = maximize(&cs, None, &MaxOptions::default()).unwrap().theta;
    (tri, cs, theta)
}

/// The oracle, started from the LP's max-slack point.
fn oracle_solution(tri: &Triangulation) -> oracle::OracleSolution {
    let cs = build_constraints(tri).unwrap();
    let ip = find_interior_point(&cs);
    let start: Vec<[f64; 3]> = (0..tri.len())
        .map(|t| [0, 1, 2].map(|k| ip.theta[cs.column(t, k)]))
        .collect();
    oracle::solve(tri, &start)
}

fn max_edge(tri: &Triangulation, shapes: &[TetShape]) -> (f64, f64) {
    edge_gluing_residuals(tri, shapes)
        .unwrap()
        .iter()
        .fold((0.0, 0.0), |(m, a), e| {
            (f64::max(m, e.modulus), f64::max(a, e.angle))
        })
}

fn max_cusp(tri: &Triangulation, shapes: &[TetShape]) -> f64 {
    completeness_residuals(tri, shapes)
        .unwrap()
        .iter()
        .map(|c| c.residual)
        .fold(0.0, f64::max)
}

#[test]
fn oracle_volumes_are_frozen() {
    for p in 1..=12 {
        let (tri, _) = tau_constraints(p).unwrap();
        let sol = oracle_solution(&tri);
        assert!(sol.residual < 1e-12, "p={p}: {}", sol.residual);
        assert!(sol.z.iter().all(|z| z.im > 0.0), "p={p}");
        assert!(
            (sol.volume - TAU_VOLUMES[p - 1]).abs() < 1e-9,
            "p={p}: {}",
            sol.volume
        );
    }
    for (w, v) in WORD_VOLUMES {
        let sol = oracle_solution(&build_two_bridge(&TwistWord::parse(w).unwrap()).unwrap());
        assert!(sol.residual < 1e-12, "{w}");
        assert!((sol.volume - v).abs() < 1e-9, "{w}: {}", sol.volume);
    }
}

#[test]
fn maximizer_matches_oracle() {
    for p in 1..=12 {
        let (tri, cs, theta) = tau(p);
        let sol = oracle_solution(&tri);
        let v: f64 = theta.iter().map(|&x| lobachevsky(x)).sum();
        assert!((v - TAU_VOLUMES[p - 1]).abs() < 1e-9, "p={p}: {v}");
        for t in 0..tri.len() {
            for k in 0..3 {
                assert!(
                    (theta[cs.column(t, k)] - sol.angles[t][k]).abs() < 1e-8,
                    "p={p} tet {t} pair {k}"
                );
            }
        }
    }
    for (w, golden) in WORD_VOLUMES {
        let (_, _, theta) = word(w);
        let v: f64 = theta.iter().map(|&x| lobachevsky(x)).sum();
        assert!((v - golden).abs() < 1e-9, "{w}: {v}");
    }
}

#[test]
fn shape_identities_on_random_points() {
    for p in [1, 2, 5, 9] {
        let (tri, cs) = tau_constraints(p).unwrap();
        for theta in random_interior_points(&cs, 8, p as u64).unwrap() {
            let shapes = shapes_from_angles(&tri, &cs, &theta).unwrap();
            for s in &shapes {
                let prod: Complex64 = s.by_pair.iter().product();
                assert!((prod + 1.0).norm() < 1e-12);
                let args: f64 = s.by_pair.iter().map(|z| z.arg()).sum();
                assert!((args - PI).abs() < 1e-12);
                assert!(s.by_pair.iter().all(|z| z.im > 0.0));
            }
            for (t, s) in shapes.iter().enumerate() {
                for k in 0..3 {
                    assert!((s.by_pair[k].arg() - theta[cs.column(t, k)]).abs() < 1e-12);
                }
            }
            let (_, angle) = max_edge(&tri, &shapes);
            assert!(angle < 1e-12, "p={p}: {angle}");
        }
    }
}

#[test]
fn regular_shapes_fail_the_edge_equations() {
    let (tri, cs) = tau_constraints(1).unwrap();
    let third = PI / 3.0;
    let shapes = shapes_from_angles(&tri, &cs, &vec![third; cs.n_cols()]).unwrap();
    let (modulus, _) = max_edge(&tri, &shapes);
    assert!(modulus > 1e-3, "{modulus}");
    for p in 2..=12 {
        let (tri, cs) = tau_constraints(p).unwrap();
        let ip = find_interior_point(&cs);
        let shapes = shapes_from_angles(&tri, &cs, &ip.theta).unwrap();
        assert!(max_edge(&tri, &shapes).0 > 1e-3, "p={p}");
    }
}

#[test]
fn residuals_vanish_at_the_maximizer() {
    for p in 1..=12 {
        let (tri, cs, theta) = tau(p);
        let shapes = shapes_from_angles(&tri, &cs, &theta).unwrap();
        let (modulus, angle) = max_edge(&tri, &shapes);
        assert!(modulus < 1e-9 && angle < 1e-9, "p={p}");
        let cusps = completeness_residuals(&tri, &shapes).unwrap();
        assert_eq!(cusps.len(), if p % 2 == 0 { 2 } else { 1 }, "p={p}");
        assert!(cusps.iter().all(|c| c.residual < 1e-8), "p={p}");
    }
    for (w, _) in WORD_VOLUMES {
        let (tri, cs, theta) = word(w);
        let shapes = shapes_from_angles(&tri, &cs, &theta).unwrap();
        assert!(max_edge(&tri, &shapes).0 < 1e-9, "{w}");
        assert!(max_cusp(&tri, &shapes) < 1e-8, "{w}");
    }
}

#[test]
fn perturbation_breaks_completeness() {
    for p in 1..=12 {
        let (tri, cs, theta) = tau(p);
        let basis = cs.tangent_basis();
        let dir: Vec<f64> = (0..cs.n_cols())
            .map(|i| {
                basis
                    .iter()
                    .enumerate()
                    .map(|(k, v)| to_f64(&v[i]) / (k + 1) as f64)
                    .sum()
            })
            .collect();
        let scale = 0.02 / dir.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let moved: Vec<f64> = theta.iter().zip(&dir).map(|(t, d)| t + scale * d).collect();
        let shapes = shapes_from_angles(&tri, &cs, &moved).unwrap();
        let worst = max_cusp(&tri, &shapes).max(max_edge(&tri, &shapes).0);
        assert!(worst > 1e-4, "p={p}: {worst}");
    }
}

#[test]
fn every_fundamental_cycle_closes_at_the_maximizer() {
    for p in [1, 2, 3, 6, 11] {
        let (tri, cs, theta) = tau(p);
        let shapes = shapes_from_angles(&tri, &cs, &theta).unwrap();
        for cycles in cusp_cycles(&tri).unwrap() {
            let basis = cycles
                .basis
                .iter()
                .map(|c| holonomy_residual(log_holonomy(c, &shapes)));
            let others = cycles
                .others
                .iter()
                .map(|c| holonomy_residual(log_holonomy(c, &shapes)));
            let a = basis.fold(0.0, f64::max);
            let b = others.fold(0.0, f64::max);
            assert!(
                a < 1e-10 && b < 1e-10 && (a - b).abs() < 1e-10,
                "p={p}: {a} {b}"
            );
        }
    }
}

#[test]
fn volume_from_shape_arguments() {
    for p in 1..=12 {
        let (tri, cs, theta) = tau(p);
        let shapes = shapes_from_angles(&tri, &cs, &theta).unwrap();
        let from_shapes: f64 = shapes
            .iter()
            .flat_map(|s| s.by_pair)
            .map(|z| lobachevsky(z.arg()))
            .sum();
        let direct: f64 = theta.iter().map(|&x| lobachevsky(x)).sum();
        assert!((from_shapes - direct).abs() < 1e-12, "p={p}");
    }
}
