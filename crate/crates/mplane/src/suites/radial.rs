//! The radial-part theorem: (Δf)(x) = (Lf₀)(x′x) for radial f.

use mplane_core::diff::{cayley_laplace, radial_part_l, DiffSpec};
use mplane_core::matrix::PosDefMatrix;
use mplane_core::report::Report;
use mplane_core::rng::RngStreams;
use mplane_core::testfn::TestFunction;

use super::{full_rank_points, worst_rel_report, Check};
use crate::config::SuiteConfig;

pub fn checks() -> Vec<Check> {
    vec![Check { id: "radial-part-gaussian-n5", run: gaussian_two_routes }]
}

/// Radial Gaussian at m = 2, n = 5: the two evaluation routes agree to 1e−3
/// at 5 full-rank points with σ_min ≥ 0.5.
fn gaussian_two_routes(cfg: &SuiteConfig, streams: &RngStreams) -> mplane_core::Result<Report> {
    let (n, m) = (5usize, 2usize);
    let f = TestFunction::gaussian(n, m);
    let f0 = f.radial_profile().expect("gaussian is radial");
    let spec = DiffSpec::default();
    let mut pairs = Vec::new();
    for x in full_rank_points(streams, n, m, 5, 0.5) {
        let delta = cayley_laplace(&f, &x, &spec)?;
        let r = PosDefMatrix::new(x.gram())?;
        let radial = radial_part_l(&f0, &r, n, &spec)?;
        pairs.push((delta, radial));
    }
    Ok(worst_rel_report("radial-part-gaussian-n5", &pairs, 1e-3, cfg.seed))
}
