//! Runs constraints, interior point, maximization, shapes and residuals on
//! one triangulation and issues the verdict.

use serde::Serialize;

use crate::angles::{build_constraints, find_interior_point, tau_constraints, ConstraintSystem};
use crate::error::{Error, Result};
use crate::geometry::{
    completeness_residuals, edge_gluing_residuals, shapes_from_angles, verdict, CuspResidual,
    EdgeResidual, TetShape, Tolerances, Verdict,
};
use crate::triangulation::Triangulation;
use crate::twobridge::{build_two_bridge, TwistWord};
use crate::veering::{involution, Involution};
use crate::volume::{boundary_diagnosis, maximize, MaxOptions, MaxResult};

/// What to triangulate.
#[derive(Clone, Debug, PartialEq)]
pub enum Subject {
    Tau(usize),
    TwoBridge(TwistWord),
    Given(Triangulation),
}

impl Subject {
    pub fn label(&self) -> String {
        match self {
            Subject::Tau(p) => format!("p={p}"),
            Subject::TwoBridge(w) => w.to_string(),
            Subject::Given(t) => format!("{} tets", t.len()),
        }
    }
}

/// A triangulation with its constraint system and, for `tau_p`, the
/// involution.
pub struct Prepared {
    pub tri: Triangulation,
    pub cs: ConstraintSystem,
    pub involution: Option<Involution>,
}

pub fn prepare(subject: &Subject) -> Result<Prepared> {
    match subject {
        Subject::Tau(p) => {
            let (tri, cs) = tau_constraints(*p)?;
            Ok(Prepared {
                tri,
                cs,
                involution: Some(involution(*p)?),
            })
        }
        Subject::TwoBridge(w) => {
            let tri = build_two_bridge(w)?;
            let cs = build_constraints(&tri)?;
            Ok(Prepared {
                tri,
                cs,
                involution: None,
            })
        }
        Subject::Given(tri) => Ok(Prepared {
            cs: build_constraints(tri)?,
            tri: tri.clone(),
            involution: None,
        }),
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{stage} failed: {error}")]
pub struct StageError {
    pub stage: &'static str,
    pub error: Error,
}

fn at<T>(stage: &'static str, r: Result<T>) -> std::result::Result<T, StageError> {
    r.map_err(|error| StageError { stage, error })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Solution {
    pub tets: usize,
    pub cusps: usize,
    /// Smallest angle of the LP's max-slack point, or 0 without one.
    pub lp_min_angle: f64,
    pub max: Option<MaxResult>,
    pub shapes: Vec<TetShape>,
    pub edges: Vec<EdgeResidual>,
    pub cusp_residuals: Vec<CuspResidual>,
    pub verdict: Verdict,
}

impl Solution {
    pub fn max_edge_residual(&self) -> f64 {
        self.edges
            .iter()
            .map(|e| e.modulus.max(e.angle))
            .fold(0.0, f64::max)
    }

    pub fn max_cusp_residual(&self) -> f64 {
        self.cusp_residuals
            .iter()
            .map(|c| c.residual)
            .fold(0.0, f64::max)
    }
}

pub fn solve_prepared(
    prep: &Prepared,
    opts: &MaxOptions,
    tol: &Tolerances,
) -> std::result::Result<Solution, StageError> {
    let Prepared {
        tri,
        cs,
        involution,
    } = prep;
    let tets = tri.len();
    let cusps = at("cusp links", tri.cusp_links())?.len();
    let ip = find_interior_point(cs);
    let lp_min_angle = if ip.feasible { ip.min_slack } else { 0.0 };
    let max = match maximize(cs, involution.as_ref(), opts) {
        Ok(max) => max,
        Err(Error::EmptyPolytope(why)) => {
            return Ok(Solution {
                tets,
                cusps,
                lp_min_angle,
                max: None,
                shapes: vec![],
                edges: vec![],
                cusp_residuals: vec![],
                verdict: Verdict::Degenerate {
                    reason: format!("no angle structure: {why}"),
                    report: None,
                },
            })
        }
        Err(e) => {
            return Err(StageError {
                stage: "maximize",
                error: e,
            })
        }
    };
    let report = boundary_diagnosis(cs, &max, opts);
    if !max.interior {
        return Ok(Solution {
            tets,
            cusps,
            lp_min_angle,
            verdict: verdict(&max, &[], &[], &report, tol),
            max: Some(max),
            shapes: vec![],
            edges: vec![],
            cusp_residuals: vec![],
        });
    }
    let shapes = at("shapes", shapes_from_angles(tri, cs, &max.theta))?;
    let edges = at("edge residuals", edge_gluing_residuals(tri, &shapes))?;
    let cusp_residuals = at("cusp residuals", completeness_residuals(tri, &shapes))?;
    let verdict = verdict(&max, &edges, &cusp_residuals, &report, tol);
    Ok(Solution {
        tets,
        cusps,
        lp_min_angle,
        max: Some(max),
        shapes,
        edges,
        cusp_residuals,
        verdict,
    })
}

pub fn solve(
    subject: &Subject,
    opts: &MaxOptions,
    tol: &Tolerances,
) -> std::result::Result<Solution, StageError> {
    let prep = at("build", prepare(subject))?;
    solve_prepared(&prep, opts, tol)
}

/// Solves every subject, in parallel when enabled; results keep the input
/// order.
pub fn sweep(
    subjects: &[Subject],
    opts: &MaxOptions,
    tol: &Tolerances,
) -> Vec<std::result::Result<Solution, StageError>> {
    crate::par::map(subjects, |s| solve(s, opts, tol))
}

pub fn sweep_sequential(
    subjects: &[Subject],
    opts: &MaxOptions,
    tol: &Tolerances,
) -> Vec<std::result::Result<Solution, StageError>> {
    crate::par::map_sequential(subjects, |s| solve(s, opts, tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        let opts = MaxOptions::default();
        let tol = Tolerances::default();
        let s = solve(&Subject::Tau(1), &opts, &tol).unwrap();
        assert!(s.verdict.is_geometric());
        let s = solve(
            &Subject::TwoBridge(TwistWord::parse("RRRR").unwrap()),
            &opts,
            &tol,
        )
        .unwrap();
        assert!(!s.verdict.is_geometric());
        assert!(s.max.is_none());
    }

    #[test]
    fn sweeps_agree() {
        let subjects: Vec<Subject> = (1..=4).map(Subject::Tau).collect();
        let (opts, tol) = (MaxOptions::default(), Tolerances::default());
        assert_eq!(
            sweep(&subjects, &opts, &tol),
            sweep_sequential(&subjects, &opts, &tol)
        );
    }
}
