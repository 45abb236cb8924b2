//! The integral points of the Wallach set: the point mass at α = 0, the
//! four measure routes at k = 1, and the flatness of the normalized zeta of
//! the Gaussian.

use mplane_core::report::{ParamValue, Report};
use mplane_core::rng::RngStreams;
use mplane_core::special::{named_const, NamedConst};
use mplane_core::testfn::TestFunction;
use mplane_core::zeta::{normalized_zeta, zeta_wallach, WallachRoute};
use mplane_core::{Complex64, RectMatrix};

use super::{rel_report, Check};
use crate::config::SuiteConfig;

pub fn checks() -> Vec<Check> {
    vec![
        Check { id: "wallach-zero-point", run: zero_point },
        Check { id: "wallach-routes-pairwise", run: routes_pairwise },
        Check { id: "wallach-gaussian-flatness", run: gaussian_flatness },
    ]
}

/// (ζ₀, f) = π^{nm/2} f(0)/Γ_m(n/2), checked against the regular-route
/// quadrature of the (entire, Gaussian-flat) normalized zeta, rel ≤ 1e−6.
fn zero_point(cfg: &SuiteConfig, streams: &RngStreams) -> mplane_core::Result<Report> {
    let (n, m) = (4usize, 2usize);
    let f = TestFunction::gaussian(n, m);
    let spec = super::quad_spec(cfg, 1e-7);
    let zero = normalized_zeta(&f, Complex64::new(0.0, 0.0), n, m, &spec, streams)?;
    let regular = normalized_zeta(&f, Complex64::new(2.0, 0.0), n, m, &spec, streams)?;
    Ok(rel_report("wallach-zero-point", zero.value.re(), regular.value.re(), 1e-6, cfg.seed))
}

/// Routes (r1)/(znk)/(r2)/(r3) pairwise within 3σ on a non-radial test
/// function at (n, m, k) = (4, 2, 1).
fn routes_pairwise(cfg: &SuiteConfig, streams: &RngStreams) -> mplane_core::Result<Report> {
    let (n, m, k) = (4usize, 2usize, 1usize);
    let center = RectMatrix::new(n, m, vec![0.3, -0.1, 0.2, 0.1, 0.0, 0.2, -0.15, 0.1])?;
    let f = TestFunction::shifted_gaussian(n, m, center);
    let spec = super::mc_spec(cfg, 2.0);
    let routes = [
        WallachRoute::FrameMeasure,
        WallachRoute::RotationAverage,
        WallachRoute::TransposeFrame,
        WallachRoute::BlockFactor,
    ];
    let mut values = Vec::new();
    for (i, route) in routes.iter().enumerate() {
        let z = zeta_wallach(&f, k, n, m, *route, &spec, &streams.substream(i as u64))?;
        values.push(z.value);
    }
    let mut worst = 0.0f64;
    let mut worst_pair = (0.0, 0.0, 0.0);
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            let err = (values[i].stderr.powi(2) + values[j].stderr.powi(2)).sqrt();
            let dev = (values[i].value - values[j].value).norm() / (3.0 * err).max(1e-300);
            if dev > worst {
                worst = dev;
                worst_pair = (values[i].re(), values[j].re(), err);
            }
        }
    }
    Ok(Report {
        id: "wallach-routes-pairwise".to_string(),
        params: vec![("worst_dev_over_3sigma".to_string(), ParamValue::Real(worst))],
        lhs: worst_pair.0,
        stderr: worst_pair.2,
        rhs: worst_pair.1,
        pass: worst <= 1.0,
        n_samples: values.iter().map(|v| v.n_samples).sum(),
        seed: cfg.seed,
        wall_ms: 0,
        route: None,
    })
}

/// Every route returns c_{4,2} = 2π³ for the Gaussian, rel ≤ 1e−2.
fn gaussian_flatness(cfg: &SuiteConfig, streams: &RngStreams) -> mplane_core::Result<Report> {
    let (n, m, k) = (4usize, 2usize, 1usize);
    let f = TestFunction::gaussian(n, m);
    let spec = super::mc_spec(cfg, 2.0);
    let want = named_const(NamedConst::CNm { n, m }).real()?;
    let mut worst = 0.0f64;
    let mut worst_val = 0.0;
    for (i, route) in [
        WallachRoute::FrameMeasure,
        WallachRoute::RotationAverage,
        WallachRoute::TransposeFrame,
        WallachRoute::BlockFactor,
    ]
    .iter()
    .enumerate()
    {
        let z = zeta_wallach(&f, k, n, m, *route, &spec, &streams.substream(10 + i as u64))?;
        let dev = (z.value.re() - want).abs() / want;
        if dev > worst {
            worst = dev;
            worst_val = z.value.re();
        }
    }
    // and the k = 2 Wallach point, which overlaps the regular region
    let z2 = zeta_wallach(&f, 2, n, m, WallachRoute::FrameMeasure, &spec, &streams.substream(20))?;
    let dev2 = (z2.value.re() - want).abs() / want;
    if dev2 > worst {
        worst = dev2;
        worst_val = z2.value.re();
    }
    let mut rep = rel_report("wallach-gaussian-flatness", worst_val, want, 1e-2, cfg.seed);
    rep.pass = worst <= 1e-2;
    rep.params.push(("worst_rel".to_string(), ParamValue::Real(worst)));
    Ok(rep)
}
