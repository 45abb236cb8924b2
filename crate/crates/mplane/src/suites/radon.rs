//! Radon transform structure: mass conservation, evenness, duality, and the
//! shift law.

use mplane_core::matrix::{haar_rotation, haar_stiefel, PosDefMatrix, StiefelFrame};
use mplane_core::quad::{mc_run, sampling};
use mplane_core::radon::{
    radon_closed_form, radon_transform_mc, verify_shift_equivariance, MatrixPlane,
};
use mplane_core::report::{ParamValue, Report};
use mplane_core::rng::RngStreams;
use mplane_core::testfn::TestFunction;
use mplane_core::{Complex64, RectMatrix};

use super::Check;
use crate::config::SuiteConfig;

const PI: f64 = std::f64::consts::PI;

pub fn checks() -> Vec<Check> {
    vec![
        Check { id: "radon-mass-conservation", run: mass },
        Check { id: "radon-evenness", run: evenness },
        Check { id: "radon-duality", run: duality },
        Check { id: "radon-shift-law", run: shift_law },
    ]
}

fn random_plane(streams: &RngStreams, n: usize, m: usize, k: usize) -> MatrixPlane {
    let mut rng = streams.stream(0);
    let xi = haar_stiefel(&mut rng, n, n - k).expect("frames");
    let t = sampling::gaussian_matrix(&mut rng, n - k, m, 0.6);
    MatrixPlane::new(xi, t).expect("valid plane")
}

/// ∫ f̂(ξ, t) dt = ∫ f dx for 3 random frames, rel ≤ 1e−2 (Monte Carlo).
fn mass(cfg: &SuiteConfig, streams: &RngStreams) -> mplane_core::Result<Report> {
    let (n, m, k) = (4usize, 2usize, 1usize);
    let f = TestFunction::heat(n, m, PosDefMatrix::diag(&[0.8, 1.4])?);
    let total = f.mass().expect("heat mixture");
    let p = n - k;
    let rate = f.decay().gaussian_rate;
    let s2 = 1.0 / (2.0 * rate);
    let dim = (p * m) as f64;
    let log_norm = dim * (0.5 * (2.0 * PI).ln() + s2.sqrt().ln());
    let mut worst = 0.0f64;
    let mut worst_pair = (0.0, 0.0);
    for i in 0..3u64 {
        let plane = random_plane(&streams.substream(i), n, m, k);
        let f_cl = f.clone();
        let xi = plane.xi().clone();
        let est = mc_run(&streams.substream(10 + i), cfg.samples, move |rng| {
            let t = sampling::gaussian_matrix(rng, p, m, s2.sqrt());
            let boost = (t.frobenius_sq() / (2.0 * s2) + log_norm).exp();
            Complex64::new(radon_closed_form(&f_cl, &xi, &t).unwrap() * boost, 0.0)
        });
        let dev = (est.re() - total).abs() / total;
        if dev > worst {
            worst = dev;
            worst_pair = (est.re(), total);
        }
    }
    let mut rep = super::rel_report("radon-mass-conservation", worst_pair.0, worst_pair.1, 1e-2, cfg.seed);
    rep.pass = worst <= 1e-2;
    rep.params.push(("worst_rel".to_string(), ParamValue::Real(worst)));
    rep.n_samples = 3 * cfg.samples;
    Ok(rep)
}

/// f̂(ξθ′, θt) = f̂(ξ, t): exact on the closed form, 3σ on the Monte Carlo
/// route.
fn evenness(cfg: &SuiteConfig, streams: &RngStreams) -> mplane_core::Result<Report> {
    let (n, m, k) = (4usize, 2usize, 1usize);
    let center = RectMatrix::new(n, m, vec![0.1, 0.2, -0.3, 0.1, 0.0, -0.1, 0.2, 0.3])?;
    let f = TestFunction::shifted_gaussian(n, m, center);
    let plane = random_plane(streams, n, m, k);
    let mut rng = streams.substream(5).stream(0);
    let theta = haar_rotation(&mut rng, n - k)?;
    let xi_rot = StiefelFrame::new(plane.xi().matrix().mul(&theta.matrix().transpose()))?;
    let rotated = MatrixPlane::new(xi_rot, theta.matrix().mul(plane.offset()))?;
    let exact_a = radon_closed_form(&f, plane.xi(), plane.offset()).expect("heat");
    let exact_b = radon_closed_form(&f, rotated.xi(), rotated.offset()).expect("heat");
    let exact_ok = (exact_a - exact_b).abs() <= 1e-10 * exact_a.abs();
    let spec = super::mc_spec(cfg, 0.5);
    let mc_a = radon_transform_mc(&f, &plane, &spec, &streams.substream(6))?;
    let mc_b = radon_transform_mc(&f, &rotated, &spec, &streams.substream(7))?;
    let mut rep = Report::two_estimates("radon-evenness", mc_a, mc_b, cfg.abs_tol, cfg.seed);
    rep.pass = rep.pass && exact_ok;
    rep.params.push(("closed_form_gap".to_string(), ParamValue::Real((exact_a - exact_b).abs())));
    Ok(rep)
}

/// ⟨f, φ̌⟩ = σ⁻¹⟨f̂, φ⟩ for a heat f and heat-data φ, 3σ.
fn duality(cfg: &SuiteConfig, streams: &RngStreams) -> mplane_core::Result<Report> {
    let (n, m, k) = (4usize, 2usize, 1usize);
    let f = TestFunction::heat(n, m, PosDefMatrix::diag(&[1.0, 0.7])?);
    let g = TestFunction::shifted_gaussian(
        n,
        m,
        RectMatrix::new(n, m, vec![0.2, 0.1, 0.0, -0.1, 0.3, 0.0, 0.1, 0.2])?,
    );
    let rate = f.decay().gaussian_rate;
    let s2 = 1.0 / (2.0 * rate);
    let p = n - k;

    let f_l = f.clone();
    let g_l = g.clone();
    let dim = (n * m) as f64;
    let log_norm = dim * (0.5 * (2.0 * PI).ln() + s2.sqrt().ln());
    let lhs = mc_run(&streams.substream(1), cfg.samples, move |rng| {
        let x = sampling::gaussian_matrix(rng, n, m, s2.sqrt());
        let xi = haar_stiefel(rng, n, p).expect("frames");
        let t = xi.matrix().transpose().mul(&x);
        let boost = (x.frobenius_sq() / (2.0 * s2) + log_norm).exp();
        f_l.eval(&x) * boost * radon_closed_form(&g_l, &xi, &t).unwrap()
    });

    let tdim = (p * m) as f64;
    let t_log_norm = tdim * (0.5 * (2.0 * PI).ln() + s2.sqrt().ln());
    let f_r = f.clone();
    let g_r = g.clone();
    let rhs = mc_run(&streams.substream(2), cfg.samples, move |rng| {
        let xi = haar_stiefel(rng, n, p).expect("frames");
        let t = sampling::gaussian_matrix(rng, p, m, s2.sqrt());
        let boost = (t.frobenius_sq() / (2.0 * s2) + t_log_norm).exp();
        Complex64::new(
            radon_closed_form(&f_r, &xi, &t).unwrap()
                * radon_closed_form(&g_r, &xi, &t).unwrap()
                * boost,
            0.0,
        )
    });
    Ok(Report::two_estimates("radon-duality", lhs, rhs, cfg.abs_tol, cfg.seed))
}

/// f̂_y(ξ, t) = f̂(ξ, ξ′y + t), exact for the heat family.
fn shift_law(cfg: &SuiteConfig, streams: &RngStreams) -> mplane_core::Result<Report> {
    let (n, m, k) = (4usize, 2usize, 1usize);
    let f = TestFunction::heat(n, m, PosDefMatrix::diag(&[0.9, 1.2])?);
    let plane = random_plane(streams, n, m, k);
    let y = RectMatrix::new(n, m, vec![0.3, -0.2, 0.1, 0.4, 0.0, 0.2, -0.1, 0.3])?;
    let spec = super::quad_spec(cfg, 1e-7);
    let mut rep = verify_shift_equivariance(&f, &plane, &y, &spec, streams)?;
    rep.pass = rep.pass && rep.rel_err() <= 1e-12;
    Ok(rep)
}
