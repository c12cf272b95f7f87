use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rug::Rational;
use sckyber::coding::{dec_pipeline, enc_pipeline, BchCode};
use sckyber::params::CodeSpec;
use sckyber::Error;

fn code(n: usize, k: usize, t: usize, m: u32) -> BchCode {
    BchCode::new(CodeSpec::new(n, k, t, m).unwrap()).unwrap()
}

fn random_bits(rng: &mut impl Rng, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.gen_range(0..=1)).collect()
}

/// Remainder of `word(X)` (bit i = coefficient of X^(len-1-i)) modulo `g`
/// (lowest degree first), by long division over GF(2).
fn remainder(word: &[u8], g: &[u8]) -> Vec<u8> {
    let mut r: Vec<u8> = word.iter().rev().copied().collect();
    let dg = g.len() - 1;
    for top in (dg..r.len()).rev() {
        if r[top] == 1 {
            for (j, &gj) in g.iter().enumerate() {
                r[top - dg + j] ^= gj;
            }
        }
    }
    r.truncate(dg);
    r
}

#[test]
fn small_code_minimum_distance() {
    let c = code(15, 5, 3, 4);
    let min_weight = (1u32..32)
        .map(|m| {
            let msg: Vec<u8> = (0..5).map(|i| ((m >> i) & 1) as u8).collect();
            c.encode(&msg).unwrap().iter().filter(|&&b| b == 1).count()
        })
        .min()
        .unwrap();
    assert!(min_weight >= 7, "d_min = {min_weight}");
}

#[test]
fn generator_divides_the_cyclic_modulus() {
    for c in [code(15, 5, 3, 4), code(768, 638, 13, 10), code(768, 513, 26, 10)] {
        let n = c.spec().parent_n;
        let mut x_n_minus_1 = vec![0u8; n + 1];
        x_n_minus_1[0] = 1;
        x_n_minus_1[n] = 1;
        assert!(remainder(&x_n_minus_1, c.generator()).iter().all(|&b| b == 0));
    }
}

#[test]
fn shortened_codewords_lie_in_the_parent_code() {
    let mut rng = ChaCha20Rng::seed_from_u64(21);
    for c in [code(768, 638, 13, 10), code(768, 513, 26, 10), code(12, 2, 3, 4)] {
        for _ in 0..20 {
            let m = random_bits(&mut rng, c.spec().k);
            let cw = c.encode(&m).unwrap();
            assert_eq!(&cw[..c.spec().k], &m[..]);
            let mut padded = vec![0u8; c.spec().shortened_by()];
            padded.extend(&cw);
            assert!(remainder(&padded, c.generator()).iter().all(|&b| b == 0));
            assert!(c.syndromes(&cw).unwrap().iter().all(|&s| s == 0));
        }
    }
}

#[test]
fn encoding_is_linear() {
    let mut rng = ChaCha20Rng::seed_from_u64(22);
    let c = code(768, 638, 13, 10);
    for _ in 0..20 {
        let (a, b) = (random_bits(&mut rng, 638), random_bits(&mut rng, 638));
        let sum: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        let ca = c.encode(&a).unwrap();
        let cb = c.encode(&b).unwrap();
        let expect: Vec<u8> = ca.iter().zip(&cb).map(|(x, y)| x ^ y).collect();
        assert_eq!(c.encode(&sum).unwrap(), expect);
    }
}

#[test]
fn corrects_every_weight_up_to_t() {
    let mut rng = ChaCha20Rng::seed_from_u64(23);
    let c = code(768, 638, 13, 10);
    for trial in 0..1000 {
        let m = random_bits(&mut rng, 638);
        let mut word = c.encode(&m).unwrap();
        let weight = trial % 14;
        for i in sample(&mut rng, 768, weight) {
            word[i] ^= 1;
        }
        let d = c.decode(&word).unwrap();
        assert_eq!((d.message, d.corrected), (m, weight));
    }
}

#[test]
fn beyond_radius_is_not_always_recovered() {
    let mut rng = ChaCha20Rng::seed_from_u64(24);
    let c = code(768, 638, 13, 10);
    let mut missed = 0;
    for _ in 0..200 {
        let m = random_bits(&mut rng, 638);
        let mut word = c.encode(&m).unwrap();
        for i in sample(&mut rng, 768, 14) {
            word[i] ^= 1;
        }
        match c.decode(&word) {
            Ok(d) if d.message == m => {}
            Ok(_) | Err(Error::DecodeFailure(_)) => missed += 1,
            Err(e) => panic!("{e}"),
        }
    }
    assert!(missed > 0);
}

#[test]
fn wide_code_corrects_26() {
    let mut rng = ChaCha20Rng::seed_from_u64(25);
    let c = code(768, 513, 26, 10);
    for _ in 0..100 {
        let m = random_bits(&mut rng, 513);
        let mut word = c.encode(&m).unwrap();
        for i in sample(&mut rng, 768, 26) {
            word[i] ^= 1;
        }
        assert_eq!(c.decode(&word).unwrap().message, m);
    }
}

#[test]
fn symbol_errors_into_adjacent_cells_are_corrected() {
    let mut rng = ChaCha20Rng::seed_from_u64(26);
    let c = code(768, 638, 13, 10);
    for _ in 0..300 {
        let m = random_bits(&mut rng, 638);
        let x = enc_pipeline(&m, &c, 8).unwrap();
        let mut y: Vec<Rational> = x.symbols().iter().map(|&s| Rational::from(s)).collect();
        let hits = rng.gen_range(0..=13);
        for i in sample(&mut rng, 256, hits) {
            // push the observation into the neighbouring decision cell,
            // wrapping around the PAM circle
            y[i] += if rng.gen_bool(0.5) { 1 } else { -1 };
        }
        for v in y.iter_mut() {
            *v += Rational::from((rng.gen_range(-99..100), 200));
        }
        assert_eq!(dec_pipeline(&y, &c, 8).unwrap().message, m);
    }
}
