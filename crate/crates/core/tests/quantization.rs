use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rug::Rational;
use sckyber::params::{round_div, Q};
use sckyber::quantization::{
    compress, decompress, dp_optimal_quantizer, lloyd_max, lloyd_max_report, uniform_codebook,
    DiscretePmf, QuantCodebook,
};

#[test]
fn lloyd_max_reaches_the_dp_optimum_on_uniform_sources() {
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let mut cases: Vec<(u32, usize)> = vec![(7, 4), (31, 8), (101, 16), (64, 5)];
    cases.extend((0..40).map(|_| (rng.gen_range(2..90), rng.gen_range(1..20))));
    for (q, l) in cases {
        let pmf = DiscretePmf::uniform(q).unwrap();
        let lm = lloyd_max(&pmf, l).unwrap().mse(&pmf).unwrap();
        let dp = dp_optimal_quantizer(&pmf, l).unwrap().mse(&pmf).unwrap();
        assert_eq!(lm, dp, "q={q} L={l}");
    }
}

#[test]
fn lloyd_max_never_beats_the_dp_optimum() {
    let mut rng = ChaCha20Rng::seed_from_u64(12);
    for _ in 0..30 {
        let n = rng.gen_range(3..40);
        let mut support: Vec<i64> = (0..n).map(|_| rng.gen_range(-100..100)).collect();
        support.sort();
        support.dedup();
        let weights: Vec<u32> = support.iter().map(|_| rng.gen_range(1..20)).collect();
        let total: u32 = weights.iter().sum();
        let probs = weights.iter().map(|&w| Rational::from((w, total))).collect();
        let pmf = DiscretePmf::new(support, probs, "random").unwrap();
        let l = rng.gen_range(1..8);
        let report = lloyd_max_report(&pmf, l).unwrap();
        let lm = report.codebook.mse(&pmf).unwrap();
        let dp = dp_optimal_quantizer(&pmf, l).unwrap().mse(&pmf).unwrap();
        assert!(lm >= dp);
        assert_eq!(&lm, report.mse());
        assert!(report.mse_history.windows(2).all(|w| w[1] <= w[0]));
    }
}

#[test]
fn full_size_codebooks_for_z_q() {
    let pmf = DiscretePmf::uniform(Q).unwrap();
    let cb = uniform_codebook(11).unwrap();
    assert_eq!(cb.len(), 2048);
    assert_eq!(cb.mse(&pmf).unwrap(), Rational::from((1281, 6658)));
    assert_eq!(cb.denominator(), 2);
    let cb10 = uniform_codebook(10).unwrap();
    assert_eq!(cb10.mse(&pmf).unwrap(), Rational::from((2819, 3329)));
    // cells: 767 triples and 257 quadruples
    let err = cb10.error_pmf(&pmf).unwrap();
    assert_eq!(err.prob_of(&Rational::from(0)), Rational::from((767, 3329)));
    assert_eq!(err.prob_of(&Rational::from((3, 2))), Rational::from((257, 3329)));
}

fn small_codebook() -> impl Strategy<Value = QuantCodebook> {
    proptest::collection::btree_set((-500i64..500, 1i64..7), 1..12).prop_map(|set| {
        let mut levels: Vec<Rational> = set.into_iter().map(|(n, d)| Rational::from((n, d))).collect();
        levels.sort();
        levels.dedup();
        QuantCodebook::new(levels, "prop").unwrap()
    })
}

proptest! {
    #[test]
    fn compression_error_is_bounded(x in 0..Q, d in 1u32..=11) {
        let y = compress(x, d).unwrap();
        prop_assert!(y < 1 << d);
        let back = decompress(y, d).unwrap();
        let diff = (i64::from(back) - i64::from(x)).rem_euclid(i64::from(Q));
        let dist = diff.min(i64::from(Q) - diff);
        prop_assert!(dist <= i64::from(round_div(Q, 1 << (d + 1))));
    }

    #[test]
    fn quantize_picks_a_nearest_level(cb in small_codebook(), x in -600i64..600) {
        let (i, level) = cb.quantize_int(x);
        prop_assert_eq!(level, &cb.levels()[i]);
        let dist = |l: &Rational| Rational::from(l - x).abs();
        let best = cb.levels().iter().map(dist).min().unwrap();
        prop_assert_eq!(dist(level), best);
    }

    #[test]
    fn codebook_file_format_roundtrips(cb in small_codebook()) {
        prop_assert_eq!(QuantCodebook::from_bytes(&cb.to_bytes().unwrap()).unwrap(), cb);
    }
}
