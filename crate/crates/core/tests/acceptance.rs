//! Acceptance criteria, one line per criterion. Exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rgtv::eval::synth::{add_gaussian_noise, default_step, pws_image, two_level_patch, StepVariant};
use rgtv::eval::{error_ratio, kernel_ncc, psnr, weight_histogram, DEFAULT_BINS};
use rgtv::fourier::convolve;
use rgtv::graph::{build_gamma_graph, build_unweighted_graph, LatticeGraph};
use rgtv::linalg::{to_dense, LinearOperator};
use rgtv::pipeline::{
    blind_deblur, blind_deblur_gaussian, gaussian_response, learn_a, nonblind_finish, DeblurConfig,
};
use rgtv::priors::{curve_argmax, difference_grid, pairwise_curve, PriorKind};
use rgtv::skeleton::{cg_solve, restore_skeleton, DeconvOperator, SkeletonOptions};
use rgtv::spectral::{
    default_neighborhood, gershgorin_bound, graph_spectrum, iterative_rgtv_filter, lanczos_filter,
    relative_eigenvalues,
};
use rgtv::{BlurKernel, Image, WeightParams};

type Check = Result<(bool, String), rgtv::Error>;

fn sym_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    e.sort_by(|a, b| a.total_cmp(b));
    e
}

fn random_image(rng: &mut ChaCha8Rng, min_side: usize) -> Image {
    let w = rng.random_range(min_side..=8);
    let h = rng.random_range(min_side..=8);
    Image::from_fn(w, h, |_, _| rng.random::<f64>())
}

fn c1_laplacian_bounds() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let p = WeightParams::default();
    let (mut worst_min, mut worst_gap) = (0.0f64, f64::INFINITY);
    let mut ok = true;
    for _ in 0..100 {
        let x = random_image(&mut rng, 1);
        if x.len() < 2 {
            continue;
        }
        let g = build_gamma_graph(&x, p)?;
        let ev = sym_eigenvalues(g.laplacian_dense()?);
        let bound = gershgorin_bound(&g, p.epsilon)?;
        let lmax = *ev.last().unwrap();
        worst_min = worst_min.max(ev[0].abs());
        worst_gap = worst_gap.min(bound - lmax);
        ok &= ev[0].abs() <= 1e-8 && lmax <= bound;
    }
    Ok((ok, format!("max |lambda_min| = {worst_min:.2e}, min (bound - lambda_max) = {worst_gap:.3}")))
}

fn c2_positive_definite() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = f64::INFINITY;
    for i in 0..50 {
        let x = random_image(&mut rng, 3);
        let side = if x.width().min(x.height()) >= 5 && rng.random_bool(0.5) { 5 } else { 3 };
        let taps: Vec<f64> = (0..side * side).map(|_| rng.random::<f64>()).collect();
        let k = BlurKernel::normalized(side, taps)?;
        let beta = if i % 2 == 0 { 0.01 } else { 0.5 };
        let op = DeconvOperator::new(&k, build_gamma_graph(&x, WeightParams::default())?, beta)?;
        let m = to_dense(&op);
        let sym = (&m + m.transpose()) * 0.5;
        worst = worst.min(sym_eigenvalues(sym)[0]);
    }
    Ok((worst > 0.0, format!("min eigenvalue over 50 instances = {worst:.3e}")))
}

fn c3_curves() -> Check {
    let sigma = 0.1;
    let grid = difference_grid(10_001);
    let step = grid[1] - grid[0];
    let rgtv_peak = curve_argmax(PriorKind::Rgtv, &grid, 1.0, sigma);
    let rgl_peak = curve_argmax(PriorKind::Rgl, &grid, 1.0, sigma);
    let f1 = pairwise_curve(PriorKind::Rgtv, 1e-6, 1.0, sigma).1;
    let g1 = pairwise_curve(PriorKind::Rgl, 1e-6, 1.0, sigma).1;
    let ok = (rgtv_peak - sigma / 2f64.sqrt()).abs() <= step
        && (rgl_peak - sigma).abs() <= step
        && (f1 - 1.0).abs() <= 1e-3
        && g1.abs() <= 1e-3;
    Ok((
        ok,
        format!("rgtv argmax {rgtv_peak:.4}, rgl argmax {rgl_peak:.4}, f'(1e-6) = {f1:.6}, g'(1e-6) = {g1:.2e}"),
    ))
}

fn relative(x: &Image, p: WeightParams, gamma: bool) -> Result<Vec<f64>, rgtv::Error> {
    let nb = default_neighborhood(x);
    let g = if gamma {
        LatticeGraph::gamma_graph(x, p, nb)?
    } else {
        LatticeGraph::weight_graph(x, p, nb)?
    };
    relative_eigenvalues(&graph_spectrum(&g)?)
}

fn c4_spectral_dominance() -> Check {
    let p = WeightParams::new(0.3, 0.01)?;
    let base = default_step();
    let mut ok = true;
    let mut notes = Vec::new();
    for v in [StepVariant::Ideal, StepVariant::Noisy, StepVariant::Blurred] {
        let x = v.apply(&base, 0.02, 1.0, 4)?;
        let rw = relative(&x, p, false)?;
        let rg = relative(&x, p, true)?;
        let margin = (2..x.len()).map(|k| rg[k] - rw[k]).fold(f64::INFINITY, f64::min);
        ok &= margin > 0.0;
        notes.push(format!("{} margin {margin:.3}", v.name()));
    }
    Ok((ok, notes.join(", ")))
}

fn c5_rgtv_filter() -> Check {
    let p = WeightParams::new(0.3, 0.01)?;
    let y = StepVariant::BlurredNoisy.apply(&default_step(), 1e-4, 1.0, 5)?;
    let run = iterative_rgtv_filter(&y, p, 1.0, 20, 1e-4)?;
    let contrast = |x: &Image| x.get(25, 0) - x.get(24, 0);
    let (c0, c1) = (contrast(&y), contrast(&run.output));
    let r0 = relative(&y, p, true)?;
    let r1 = relative(&run.output, p, true)?;
    let all_ge = (2..y.len()).all(|k| r1[k] >= r0[k]);
    Ok((
        c1 > c0 && all_ge && run.converged,
        format!(
            "{} iterations, edge contrast {c0:.4} -> {c1:.4}, relative eigenvalues non-decreasing for k >= 3: {all_ge}",
            run.iterations()
        ),
    ))
}

fn c6_solver_oracles() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut cg_err = 0.0f64;
    for i in 0..10 {
        let x = Image::from_fn(8, 8, |_, _| rng.random::<f64>());
        let b = Image::from_fn(8, 8, |_, _| rng.random::<f64>());
        let k = BlurKernel::normalized(3, (0..9).map(|_| rng.random::<f64>()).collect())?;
        let beta = if i % 2 == 0 { 0.01 } else { 0.5 };
        let op = DeconvOperator::new(&k, build_gamma_graph(&x, WeightParams::default())?, beta)?;
        let rhs = op.rhs(&b);
        let cg = cg_solve(&op, &rhs, None, 1e-13, 10_000)?.solution;
        let direct = to_dense(&op)
            .lu()
            .solve(&DVector::from_column_slice(&rhs))
            .expect("nonsingular");
        let num = cg.iter().zip(direct.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        cg_err = cg_err.max(num / direct.norm());
    }

    let weights = Image::from_fn(8, 8, |_, _| rng.random::<f64>());
    let g = build_gamma_graph(&weights, WeightParams::default())?;
    let signal: Vec<f64> = (0..64).map(|_| rng.random::<f64>()).collect();
    let f = |l: f64| 1.0 / (1.0 + l);
    let exact = graph_spectrum(&g)?.filter(&signal, f);
    let full = lanczos_filter(&g, &signal, f, 64)?;
    let full_err = rel_err(&full, &exact);

    let img = Image::from_fn(10, 10, |_, _| rng.random::<f64>());
    let g = build_gamma_graph(&img, WeightParams::default())?;
    let dec = graph_spectrum(&g)?;
    let h = |l: f64| gaussian_response(l, -0.07, 0.01);
    let mut z30_err = 0.0f64;
    for resp in [&f as &dyn Fn(f64) -> f64, &h] {
        let exact = dec.filter(img.as_slice(), resp);
        let approx = lanczos_filter(&g, img.as_slice(), resp, 30)?;
        z30_err = z30_err.max(rel_err(&approx, &exact));
    }
    Ok((
        cg_err <= 1e-6 && full_err <= 1e-8 && z30_err <= 1e-3,
        format!("cg vs direct {cg_err:.2e}, lanczos Z=N {full_err:.2e}, lanczos Z=30 on 100 nodes {z30_err:.2e}"),
    ))
}

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let num = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    num / b.iter().map(|y| y * y).sum::<f64>().sqrt()
}

struct Synthetic {
    x: Image,
    k: BlurKernel,
    b: Image,
    cfg: DeblurConfig,
}

fn synthetic() -> Synthetic {
    let x = pws_image(128, 128, 0);
    let k = BlurKernel::gaussian(9, 1.5).unwrap();
    let b = add_gaussian_noise(&convolve(&x, &k).unwrap(), 0.01, 1).unwrap();
    Synthetic {
        x,
        k,
        b,
        cfg: DeblurConfig::with_kernel_side(9),
    }
}

struct EndToEnd {
    blind_time: Duration,
    psnr: f64,
}

fn c7_end_to_end(s: &Synthetic, out: &mut Option<EndToEnd>) -> Check {
    let t = Instant::now();
    let (k_hat, _) = blind_deblur(&s.b, &s.cfg)?;
    let blind_time = t.elapsed();
    let x_est = nonblind_finish(&s.b, &k_hat, s.cfg.nonblind_beta)?;
    let x_gt = nonblind_finish(&s.b, &s.k, s.cfg.nonblind_beta)?;
    let r = error_ratio(&s.x, &x_est, &x_gt)?;
    let ncc = kernel_ncc(&k_hat, &s.k)?;
    let p = psnr(&s.x, &x_est)?;
    *out = Some(EndToEnd { blind_time, psnr: p });
    Ok((
        r <= 5.0 && ncc >= 0.8,
        format!(
            "error ratio {r:.3} (<= 5), kernel NCC {ncc:.4} (>= 0.8), PSNR {p:.2} dB vs blurred {:.2} dB",
            psnr(&s.x, &s.b)?
        ),
    ))
}

fn c8_gaussian_fast_path(s: &Synthetic, baseline: &Option<EndToEnd>) -> Check {
    let Some(baseline) = baseline else {
        return Ok((false, "end-to-end run unavailable".into()));
    };
    let t = Instant::now();
    let (k_hat, _) = blind_deblur_gaussian(&s.b, &s.cfg)?;
    let fast_time = t.elapsed();
    let x_est = nonblind_finish(&s.b, &k_hat, s.cfg.nonblind_beta)?;
    let p = psnr(&s.x, &x_est)?;
    let ratio = fast_time.as_secs_f64() / baseline.blind_time.as_secs_f64();
    Ok((
        ratio <= 0.5 && p >= baseline.psnr - 0.5,
        format!(
            "time {:.2}s vs {:.2}s (ratio {ratio:.2}, <= 0.5), PSNR {p:.2} dB vs {:.2} dB (not worse by > 0.5 dB)",
            fast_time.as_secs_f64(),
            baseline.blind_time.as_secs_f64(),
            baseline.psnr
        ),
    ))
}

fn c9_learn_a() -> Check {
    let a0 = -0.07;
    let x = pws_image(48, 48, 9);
    let g = build_unweighted_graph(48, 48)?;
    let lx = g.apply_vec(x.as_slice());
    let y = Image::new(48, 48, x.as_slice().iter().zip(&lx).map(|(v, l)| v + a0 * l).collect())?;
    let planted = learn_a(&[(x, y)])?;
    let planted_ok = (planted - a0).abs() <= 1e-10;

    let mut pairs = Vec::new();
    for sigma_b in [0.5f64, 1.0, 1.5, 2.0] {
        let side = 2 * (3.0 * sigma_b).ceil() as usize + 1;
        let k = BlurKernel::gaussian(side, sigma_b)?;
        for seed in 0..4 {
            let x = pws_image(96, 96, 90 + seed);
            let y = convolve(&x, &k)?;
            pairs.push((x, y));
        }
    }
    let a = learn_a(&pairs)?;
    let learned_ok = (-0.2..0.0).contains(&a) && (a - a0).abs() <= 0.05;
    Ok((
        planted_ok && learned_ok,
        format!("planted recovery error {:.1e}, learned a = {a:.4} (want [-0.2, 0) and within 0.05 of -0.07)", (planted - a0).abs()),
    ))
}

fn c10_histogram() -> Check {
    let p = WeightParams::default();
    let sharp = two_level_patch(32, 32, 0.0, 1.0);
    let k = BlurKernel::gaussian(7, 1.5)?;
    let blurred = convolve(&sharp, &k)?;
    let skeleton = restore_skeleton(&blurred, &k, &SkeletonOptions::default())?;
    let mid = |x: &Image| -> Result<f64, rgtv::Error> { Ok(weight_histogram(x, p, DEFAULT_BINS)?.mass_between(0.2, 0.8)) };
    let (ms, mb, mk) = (mid(&sharp)?, mid(&blurred)?, mid(&skeleton)?);
    Ok((
        mb > ms && mk < mb,
        format!("middle-bin mass: sharp {ms:.4}, blurred {mb:.4}, skeleton {mk:.4}"),
    ))
}

fn main() -> ExitCode {
    let synth = synthetic();
    let mut baseline = None;
    let mut failures = 0;
    let mut run = |id: u32, name: &str, budget: f64, f: &mut dyn FnMut() -> Check| {
        let t = Instant::now();
        let res = f();
        let secs = t.elapsed().as_secs_f64();
        let (pass, detail) = match res {
            Ok((p, d)) => (p && secs < budget, d),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {id:>2} [{}] {name}: {detail} ({secs:.2}s, budget {budget}s)",
            if pass { "PASS" } else { "FAIL" }
        );
    };
    run(1, "laplacian spectrum bounds", 10.0, &mut c1_laplacian_bounds);
    run(2, "positive definiteness", 10.0, &mut c2_positive_definite);
    run(3, "regularizer curves", 1.0, &mut c3_curves);
    run(4, "relative eigenvalue dominance", 5.0, &mut c4_spectral_dominance);
    run(5, "iterative rgtv filter", 10.0, &mut c5_rgtv_filter);
    run(6, "solver oracle equivalence", 30.0, &mut c6_solver_oracles);
    run(7, "end-to-end blind deblurring", 120.0, &mut || c7_end_to_end(&synth, &mut baseline));
    run(8, "gaussian fast path", 180.0, &mut || c8_gaussian_fast_path(&synth, &baseline));
    run(9, "a calibration", 30.0, &mut c9_learn_a);
    run(10, "bimodal histogram", 30.0, &mut c10_histogram);
    if failures == 0 {
        println!("all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
