//! Library results checked against naive reference implementations.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use rgtv::eval::synth::pws_image;
use rgtv::eval::{kernel_ncc, psnr, EvalReport};
use rgtv::fourier::{convolve, convolve_adjoint};
use rgtv::graph::{build_gamma_graph, build_unweighted_graph, build_weight_graph};
use rgtv::linalg::to_dense;
use rgtv::pipeline::{
    blind_deblur, blind_deblur_traced, build_pyramid, gaussian_response, learn_a, DeblurConfig,
};
use rgtv::priors::{gl_value, gtv_value, rgtv_value};
use rgtv::skeleton::DeconvOperator;
use rgtv::spectral::{graph_spectrum, map_filter};
use rgtv::{BlurKernel, Image, WeightParams};

fn wave(w: usize, h: usize) -> Image {
    Image::from_fn(w, h, |x, y| (0.5 + 0.4 * ((x * 7 + y * 3) as f64 * 0.37).sin()).clamp(0.0, 1.0))
}

/// Dense Laplacian assembled pixel by pixel from the weight formulas.
fn laplacian_oracle(x: &Image, gamma: bool) -> DMatrix<f64> {
    let (w, h) = x.dims();
    let n = w * h;
    let (sigma, eps) = (0.1f64, 0.01f64);
    let mut l = DMatrix::zeros(n, n);
    let mut link = |i: usize, j: usize| {
        let d = x.as_slice()[j] - x.as_slice()[i];
        let mut wt = (-(d * d) / (sigma * sigma)).exp();
        if gamma {
            wt /= d.abs().max(eps);
        }
        l[(i, j)] -= wt;
        l[(j, i)] -= wt;
        l[(i, i)] += wt;
        l[(j, j)] += wt;
    };
    for yy in 0..h {
        for xx in 0..w {
            let i = yy * w + xx;
            if xx + 1 < w {
                link(i, i + 1);
            }
            if yy + 1 < h {
                link(i, i + w);
            }
        }
    }
    l
}

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}

#[test]
fn laplacians_match_pixelwise_assembly() {
    let x = wave(7, 5);
    let p = WeightParams::default();
    let lw = build_weight_graph(&x, p).unwrap().laplacian_dense().unwrap();
    let lg = build_gamma_graph(&x, p).unwrap().laplacian_dense().unwrap();
    assert!(max_abs_diff(&lw, &laplacian_oracle(&x, false)) < 1e-12);
    assert!(max_abs_diff(&lg, &laplacian_oracle(&x, true)) < 1e-9);
}

#[test]
fn matrix_free_laplacian_matches_dense() {
    let x = wave(9, 6);
    let g = build_gamma_graph(&x, WeightParams::default()).unwrap();
    let dense = g.laplacian_dense().unwrap();
    let y = Image::from_fn(9, 6, |a, b| ((a * 5 + b * 11) % 13) as f64 / 13.0);
    let fast = g.laplacian_apply(&y).unwrap();
    let slow = &dense * DVector::from_column_slice(y.as_slice());
    for (a, b) in fast.as_slice().iter().zip(slow.iter()) {
        assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()));
    }
}

#[test]
fn energies_match_direct_sums() {
    let x = wave(6, 6);
    let g = build_unweighted_graph(6, 6).unwrap();
    let v = x.as_slice();
    let mut tv = 0.0;
    let mut sq = 0.0;
    for yy in 0..6 {
        for xx in 0..6 {
            let i = yy * 6 + xx;
            for j in [(xx + 1 < 6).then(|| i + 1), (yy + 1 < 6).then(|| i + 6)].into_iter().flatten() {
                tv += 2.0 * (v[j] - v[i]).abs();
                sq += 2.0 * (v[j] - v[i]).powi(2);
            }
        }
    }
    assert!((gtv_value(&x, &g).unwrap() - tv).abs() < 1e-12);
    assert!((gl_value(&x, &g).unwrap() - sq).abs() < 1e-12);
    let rg = rgtv_value(&x, WeightParams::default()).unwrap();
    assert!(rg >= 0.0 && rg <= tv);
}

fn naive_periodic_convolution(x: &Image, k: &BlurKernel) -> Image {
    let (w, h) = x.dims();
    let r = k.radius() as isize;
    Image::from_fn(w, h, |px, py| {
        let mut acc = 0.0;
        for ky in -r..=r {
            for kx in -r..=r {
                let sx = (px as isize - kx).rem_euclid(w as isize) as usize;
                let sy = (py as isize - ky).rem_euclid(h as isize) as usize;
                acc += k.tap((kx + r) as usize, (ky + r) as usize) * x.get(sx, sy);
            }
        }
        acc
    })
}

#[test]
fn fft_convolution_matches_direct_sum() {
    let x = wave(11, 8);
    let taps: Vec<f64> = (0..25).map(|i| 1.0 + ((i * 7) % 5) as f64).collect();
    let k = BlurKernel::normalized(5, taps).unwrap();
    let fast = convolve(&x, &k).unwrap();
    let slow = naive_periodic_convolution(&x, &k);
    for (a, b) in fast.as_slice().iter().zip(slow.as_slice()) {
        assert!((a - b).abs() < 1e-12);
    }
    // the adjoint is convolution with the flipped kernel
    let adj = convolve_adjoint(&x, &k).unwrap();
    let flip = naive_periodic_convolution(&x, &k.flipped());
    for (a, b) in adj.as_slice().iter().zip(flip.as_slice()) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn deconvolution_operator_matches_assembled_matrix() {
    let x = wave(6, 5);
    let k = BlurKernel::gaussian(3, 0.8).unwrap();
    let g = build_gamma_graph(&x, WeightParams::default()).unwrap();
    let lap = g.laplacian_dense().unwrap();
    let beta = 0.05;
    let op = DeconvOperator::new(&k, g, beta).unwrap();

    let n = 30;
    let mut kmat = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = naive_periodic_convolution(&Image::new(6, 5, e).unwrap(), &k);
        kmat.set_column(j, &DVector::from_column_slice(col.as_slice()));
    }
    let expected = kmat.transpose() * &kmat + lap * (2.0 * beta);
    assert!(max_abs_diff(&to_dense(&op), &expected) < 1e-10);
}

#[test]
fn map_filter_matches_dense_solve() {
    let x = wave(8, 8);
    let g = build_gamma_graph(&x, WeightParams::new(0.3, 0.01).unwrap()).unwrap();
    let mu = 0.7;
    let y = Image::from_fn(8, 8, |a, b| ((a * 3 + b * 5) % 7) as f64 / 7.0);
    let a = DMatrix::identity(64, 64) + g.laplacian_dense().unwrap() * mu;
    let direct = a.lu().solve(&DVector::from_column_slice(y.as_slice())).unwrap();
    let out = map_filter(&y, &g, mu).unwrap();
    for (p, q) in out.as_slice().iter().zip(direct.iter()) {
        assert!((p - q).abs() < 1e-8);
    }
}

#[test]
fn spectrum_matches_nalgebra() {
    let x = wave(5, 4);
    let g = build_gamma_graph(&x, WeightParams::default()).unwrap();
    let mut ours = graph_spectrum(&g).unwrap().eigenvalues.clone();
    let mut theirs: Vec<f64> = SymmetricEigen::new(laplacian_oracle(&x, true)).eigenvalues.iter().copied().collect();
    ours.sort_by(f64::total_cmp);
    theirs.sort_by(f64::total_cmp);
    for (a, b) in ours.iter().zip(&theirs) {
        assert!((a - b).abs() < 1e-8 * (1.0 + b.abs()));
    }
}

#[test]
fn gaussian_response_at_zero_and_below_one() {
    let beta = 0.01;
    for a in [-0.001, -0.005, -0.019] {
        assert_eq!(gaussian_response(0.0, a, beta), 1.0);
        for lambda in [0.01, 0.1, 1.0, 10.0, 400.0] {
            assert!(gaussian_response(lambda, a, beta) < 1.0, "a={a} lambda={lambda}");
        }
    }
}

#[test]
fn learn_a_recovers_planted_coefficient() {
    let x = pws_image(40, 40, 3);
    let g = build_unweighted_graph(40, 40).unwrap();
    let lx = g.laplacian_apply(&x).unwrap();
    for a in [-0.2, -0.07, 0.03] {
        let y = Image::new(40, 40, x.as_slice().iter().zip(lx.as_slice()).map(|(v, l)| v + a * l).collect()).unwrap();
        assert!((learn_a(&[(x.clone(), y)]).unwrap() - a).abs() < 1e-12);
    }
}

#[test]
fn kernel_ncc_hand_value() {
    // 3x3 box centered in a 5x5 frame against a delta of the same size
    let mut taps = vec![0.0; 25];
    for y in 1..4 {
        for x in 1..4 {
            taps[y * 5 + x] = 1.0 / 9.0;
        }
    }
    let boxed = BlurKernel::new(5, taps).unwrap();
    let delta = BlurKernel::delta(5).unwrap();
    let ncc = kernel_ncc(&boxed, &delta).unwrap();
    assert!((ncc - (0.071_111_111_111f64 / 0.96).sqrt()).abs() < 1e-6);
    assert!((ncc - 0.2722).abs() < 1e-4);
}

#[test]
fn psnr_hand_values() {
    let a = Image::constant(4, 4, 0.5);
    let b = Image::constant(4, 4, 0.6);
    assert!((psnr(&a, &b).unwrap() - 20.0).abs() < 1e-9);
    assert!(psnr(&a, &a).unwrap().is_infinite());
}

#[test]
fn report_round_trips_and_nulls_infinite_psnr() {
    let mut r = EvalReport::new(1.5, f64::INFINITY, 0.9);
    r.config = Some(DeblurConfig::default());
    r.wall_time_seconds.insert("kernel_estimation".into(), 0.25);
    let json = r.to_json().unwrap();
    assert!(json.contains("\"psnr_db\": null"));
    assert_eq!(EvalReport::from_json(&json).unwrap(), r);

    let r = EvalReport::new(6.0, 21.5, 0.4);
    assert!(!r.success);
    assert_eq!(EvalReport::from_json(&r.to_json().unwrap()).unwrap(), r);
}

#[test]
fn pyramid_schedule_for_128() {
    let b = Image::constant(128, 128, 0.5);
    let p = build_pyramid(&b, &DeblurConfig::with_kernel_side(9)).unwrap();
    assert_eq!(p.sizes(), vec![(51, 51), (81, 81), (128, 128)]);
    assert_eq!(p.kernel_sides(), vec![3, 5, 9]);
}

fn small_problem() -> (Image, DeblurConfig) {
    let x = pws_image(48, 48, 11);
    let b = convolve(&x, &BlurKernel::gaussian(5, 1.0).unwrap()).unwrap();
    (b, DeblurConfig::with_kernel_side(5))
}

#[test]
fn blind_deblur_is_deterministic() {
    let (b, cfg) = small_problem();
    let (k1, x1) = blind_deblur(&b, &cfg).unwrap();
    let (k2, x2) = blind_deblur(&b, &cfg).unwrap();
    assert_eq!(k1, k2);
    assert_eq!(x1, x2);
}

#[test]
fn beta_resets_at_each_scale() {
    let (b, cfg) = small_problem();
    let r = blind_deblur_traced(&b, &cfg).unwrap();
    for s in &r.trace {
        assert!((s.beta - cfg.beta0 / cfg.beta_decay.powi(s.step as i32)).abs() < 1e-15);
        if s.step == 0 {
            assert_eq!(s.beta, cfg.beta0);
        }
    }
    assert!(r.trace.iter().any(|s| s.scale > 0));
}
