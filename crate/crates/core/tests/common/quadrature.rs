//! Reference value of `-∫_0^x log|2 sin t| dt` by Gauss-Legendre quadrature.
//!
//! On `[0, pi]` the integrand splits as `log t + log(pi - t) + g(t)` with
//! `g` analytic on a neighbourhood of the interval; the two logarithms are
//! integrated in closed form and `g` numerically. Other arguments are moved
//! into `[0, pi)` first, using that a full period integrates to zero.

use std::f64::consts::PI;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

fn rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(64.try_into().unwrap()))
}

fn smooth_part(t: f64) -> f64 {
    let s = if t < PI / 2.0 {
        t.sin()
    } else {
        (PI - t).sin()
    };
    (2.0 * s / (t * (PI - t))).ln()
}

/// `∫_0^a log u du`.
fn log_integral(a: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * a.ln() - a
    }
}

pub fn lobachevsky_quadrature(x: f64) -> f64 {
    let r = x.rem_euclid(PI);
    if r == 0.0 {
        return 0.0;
    }
    let logs = log_integral(r) + log_integral(PI) - log_integral(PI - r);
    -(logs + rule().integrate(0.0, r, smooth_part))
}
