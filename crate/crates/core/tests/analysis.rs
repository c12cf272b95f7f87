use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rug::{Float, Rational};
use sckyber::analysis::{
    capacity_bound, dfr_coded, dfr_theorem2, empirical_dfr, marcum_q_half, marcum_q_half_f64,
    sigma_g2, simulate_noise, NoiseModel,
};
use sckyber::params::{builtin_param_sets, param_set_by_name, Variant, Q};
use sckyber::pke::Scheme;
use sckyber::quantization::{compress, decompress, ErrorPmf};
use sckyber::sampling::Seed;

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            loop {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    let w = 2.0 / ((1.0 - x * x) * dp * dp);
                    return (x, w);
                }
            }
        })
        .collect()
}

/// Tail of the noncentral chi density with one degree of freedom,
/// `int_b^inf sqrt(2/pi) cosh(a x) exp(-(x^2 + a^2)/2) dx`, by composite
/// Gauss-Legendre quadrature.
fn marcum_by_quadrature(a: f64, b: f64) -> f64 {
    let nodes = gauss_legendre(12);
    let density = |x: f64| {
        let c = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        c * ((-(x - a) * (x - a) / 2.0).exp() + (-(x + a) * (x + a) / 2.0).exp())
    };
    let end = b.max(a) + 40.0;
    let panels = ((end - b) / 0.125).ceil() as usize;
    let h = (end - b) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = b + (p as f64 + 0.5) * h;
        total += nodes.iter().map(|&(x, w)| w * density(mid + x * h / 2.0)).sum::<f64>() * h / 2.0;
    }
    total
}

/// Poisson mixture of regularized upper incomplete gammas:
/// `Q_M(a, b) = sum_k e^{-a^2/2} (a^2/2)^k / k! * Gamma(M + k, b^2/2) / Gamma(M + k)`.
fn marcum_by_series(a: f64, b: f64, prec: u32) -> Float {
    let lambda = Float::with_val(prec, a * a / 2.0);
    let x = Float::with_val(prec, b * b / 2.0);
    let terms = (a * a / 2.0 + 60.0 * (a * a / 2.0 + 1.0).sqrt() + 60.0) as u32;
    let mut weight = Float::with_val(prec, -&lambda).exp();
    let mut total = Float::new(prec);
    for k in 0..terms {
        if k > 0 {
            weight *= &lambda;
            weight /= k;
        }
        let s = Float::with_val(prec, 0.5 + f64::from(k));
        let upper = s.clone().gamma_inc(&x);
        total += Float::with_val(prec, &weight * &upper) / s.gamma();
    }
    total
}

#[test]
fn marcum_matches_quadrature() {
    let mut rng = ChaCha20Rng::seed_from_u64(41);
    for _ in 0..200 {
        let (a, b) = (rng.gen_range(0.0..12.0), rng.gen_range(0.0..12.0));
        let closed = marcum_q_half_f64(a, b);
        let quad = marcum_by_quadrature(a, b);
        assert!(((closed - quad) / closed).abs() < 1e-12, "a={a} b={b}: {closed} vs {quad}");
    }
}

#[test]
fn marcum_matches_poisson_gamma_series() {
    let prec = 256;
    for i in 0..=8 {
        for j in 0..=8 {
            let (a, b) = (2.5 * f64::from(i), 2.5 * f64::from(j));
            let closed = marcum_q_half(&Float::with_val(prec, a), &Float::with_val(prec, b), prec);
            let series = marcum_by_series(a, b, prec);
            let rel = Float::with_val(prec, &closed - &series).abs() / &closed;
            assert!(rel < 1e-15, "a={a} b={b}: relative error {}", rel.to_f64());
        }
    }
}

#[test]
fn precision_is_stable() {
    for ps in builtin_param_sets() {
        let nm = NoiseModel::for_params(&ps).unwrap();
        let at = |prec| match ps.variant {
            Variant::SemiCompressed => dfr_coded(&ps, &nm, prec).unwrap().log2_f64(),
            _ => dfr_theorem2(&nm, ps.q, ps.n, prec).log2_f64(),
        };
        let (lo, hi) = (at(256), at(512));
        assert!((lo - hi).abs() < 1e-6, "{}: {lo} vs {hi}", ps.name);
    }
}

#[test]
fn failure_rate_is_monotone() {
    let ps = param_set_by_name("KYBER768-LM").unwrap();
    let base = NoiseModel::for_params(&ps).unwrap();
    let mut previous = f64::NEG_INFINITY;
    for scale in [1u32, 2, 3, 4, 6] {
        let nm = NoiseModel::new(Rational::from(base.sigma_g2() * scale), base.e_lv().clone()).unwrap();
        let d = dfr_theorem2(&nm, Q, 256, 256).log2_f64();
        assert!(d > previous);
        previous = d;
    }
    let mut previous = f64::NEG_INFINITY;
    for q in [4000u32, 3329, 3000, 2500] {
        let d = dfr_theorem2(&base, q, 256, 256).log2_f64();
        assert!(d > previous, "q={q}");
        previous = d;
    }
}

#[test]
fn capacity_is_monotone() {
    let ps = param_set_by_name("SC-KYBER1024").unwrap();
    let nm = NoiseModel::for_params(&ps).unwrap();
    let ks: Vec<f64> =
        [2, 4, 8, 16, 32].iter().map(|&p| capacity_bound(&ps.with_pam_order(p), &nm).unwrap().k_ub_real).collect();
    assert!(ks.windows(2).all(|w| w[1] > w[0]));
    let mut previous = f64::INFINITY;
    for scale in [1u32, 10, 1000, 1_000_000, 1_000_000_000] {
        let noisy = NoiseModel::new(Rational::from(nm.sigma_g2() * scale), ErrorPmf::zero()).unwrap();
        let k = capacity_bound(&ps, &noisy).unwrap().k_ub_real;
        assert!(k < previous);
        previous = k;
    }
    assert!(previous < 1e-3);
}

#[test]
fn variance_from_first_principles() {
    // Sum of the component variances, with the compression MSE found by
    // brute force over Z_q.
    let ps = param_set_by_name("KYBER512").unwrap();
    let q = i64::from(Q);
    let mse_num: i64 = (0..Q)
        .map(|x| {
            let back = i64::from(decompress(compress(x, ps.du).unwrap(), ps.du).unwrap());
            let e = (back - i64::from(x)).rem_euclid(q);
            let e = if 2 * e > q { e - q } else { e };
            e * e
        })
        .sum();
    let mse = Rational::from((mse_num, q));
    let var_s = Rational::from((ps.eta1, 2));
    let var_e2 = Rational::from((ps.eta2, 2));
    let kn = (ps.k * ps.n) as u32;
    let er = Rational::from(&var_s * &var_s) * kn;
    let s_terms = (&var_s * Rational::from(&var_e2 + &mse)) * kn;
    let expect = er + s_terms + &var_e2;
    assert_eq!(sigma_g2(&ps, &mse).unwrap(), expect);
    let nm = NoiseModel::for_params(&ps).unwrap();
    assert_eq!(nm.sigma_g2(), &expect);
}

#[test]
fn simulated_noise_matches_the_model() {
    let ps = param_set_by_name("KYBER512-LM").unwrap();
    let scheme = Scheme::new(&ps).unwrap();
    let sample = simulate_noise(&scheme, 800, &Seed([5; 32])).unwrap();
    let nm = NoiseModel::for_params(&ps).unwrap();
    let sigma = nm.sigma_g();
    let n = sample.len() as f64;
    assert!(sample.mean().abs() < 4.0 * sigma / n.sqrt());
    assert!((sample.variance() / nm.sigma_g2().to_f64() - 1.0).abs() < 0.02);
}

#[test]
fn wider_secrets_fail_more_often() {
    let ps = param_set_by_name("WEAK-K2-LM").unwrap();
    let wide = param_set_by_name("WEAK-K2-LM-ETA1X2").unwrap();
    assert_eq!(wide.eta1, 2 * ps.eta1);
    let seed = Seed([6; 32]);
    let narrow = empirical_dfr(&Scheme::new(&ps).unwrap(), 20_000, &seed).unwrap();
    let broad = empirical_dfr(&Scheme::new(&wide).unwrap(), 20_000, &seed).unwrap();
    assert!(broad.wilson(2.576).0 > narrow.wilson(2.576).1, "{narrow:?} {broad:?}");
}
