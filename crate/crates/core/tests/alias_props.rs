use mcts_core::alias::sample_direct;
use mcts_core::*;
use proptest::prelude::*;
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn random_weights<R: Rng>(rng: &mut R) -> Vec<f64> {
    let m = rng.random_range(2..=128);
    let mut w: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
    // Sprinkle in zeros and a dominant entry now and then.
    for x in w.iter_mut() {
        if rng.random::<f64>() < 0.1 {
            *x = 0.0;
        }
    }
    if rng.random::<f64>() < 0.2 {
        let i = rng.random_range(0..m);
        w[i] = 1e3;
    }
    if w.iter().all(|&x| x == 0.0) {
        w[0] = 1.0;
    }
    w
}

/// Mass each category receives: its own column's threshold plus the
/// leftover of every column that aliases it.
fn column_mass(t: &AliasTable) -> Vec<f64> {
    let m = t.len();
    let th = t.thresholds();
    let mut mass: Vec<f64> = th.to_vec();
    for (j, a) in t.aliases().enumerate() {
        if a != j {
            mass[a] += 1.0 - th[j];
        }
    }
    mass.into_iter().map(|x| x / m as f64).collect()
}

#[test]
fn exact_accounting_on_a_thousand_vectors() {
    let mut rng = stream_rng(101, 0);
    for _ in 0..1000 {
        let w = random_weights(&mut rng);
        let total: f64 = w.iter().sum();
        let t = AliasTable::new(&w).unwrap();
        for (i, (got, wi)) in column_mass(&t).iter().zip(&w).enumerate() {
            assert!((got - wi / total).abs() < 1e-12, "category {i}");
        }
        assert!(t.thresholds().iter().all(|&x| (0.0..=1.0).contains(&x)));
    }
}

pub fn chi_square_p(counts: &[u64], probs: &[f64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0;
    for (&c, &p) in counts.iter().zip(probs) {
        if p > 0.0 {
            let e = p * n as f64;
            stat += (c as f64 - e).powi(2) / e;
            cells += 1;
        } else {
            assert_eq!(c, 0, "zero-probability category drawn");
        }
    }
    if cells < 2 {
        return 1.0;
    }
    1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(stat)
}

#[test]
fn chi_square_over_a_hundred_distributions() {
    let mut rng = stream_rng(1, 0);
    let mut draws = stream_rng(1, 1);
    let mut worst = 1.0f64;
    for _ in 0..100 {
        let m = rng.random_range(2..=32);
        let w: Vec<f64> = (0..m).map(|_| rng.random::<f64>() + 0.05).collect();
        let total: f64 = w.iter().sum();
        let p: Vec<f64> = w.iter().map(|x| x / total).collect();
        let t = AliasTable::new(&w).unwrap();
        let mut counts = vec![0u64; m];
        for _ in 0..100_000 {
            counts[t.sample(&mut draws)] += 1;
        }
        worst = worst.min(chi_square_p(&counts, &p));
    }
    // 100 independent tests at 0.001 fail by chance about 10% of the time
    // (seeds 0 and 202 do), so this is pinned to a seed; the uniformity test
    // below guards against real bias.
    assert!(worst > 0.001, "min p = {worst}");
}

#[test]
fn direct_sampling_tracks_weights() {
    let w = [0.1, 0.0, 0.6, 0.3];
    let mut rng = stream_rng(5, 0);
    let mut counts = [0u64; 4];
    for _ in 0..100_000 {
        counts[sample_direct(&w, &mut rng)] += 1;
    }
    assert!(chi_square_p(&counts, &w) > 0.001);
}

#[test]
fn direct_and_alias_modes_agree_in_distribution() {
    let w: Vec<f64> = (1..=6).map(f64::from).collect();
    let total: f64 = w.iter().sum();
    let p: Vec<f64> = w.iter().map(|x| x / total).collect();
    let mut rng = stream_rng(8, 0);
    for mode in [SamplingMode::Direct, SamplingMode::Alias { cadence: None }] {
        let mut s = CachedSampler::new();
        let mut counts = vec![0u64; 6];
        for visits in 0..60_000u64 {
            let a = s.sample(
                visits,
                6,
                mode,
                |out| {
                    out.clear();
                    out.extend_from_slice(&w);
                },
                &mut rng,
            );
            counts[a] += 1;
        }
        assert!(chi_square_p(&counts, &p) > 0.001, "{mode:?}");
        let expected_rebuilds = if mode == SamplingMode::Direct { 60_000 } else { 10_000 };
        assert_eq!(s.rebuilds(), expected_rebuilds);
    }
}

proptest! {
    #[test]
    fn table_probabilities_match_weights(w in prop::collection::vec(0.0f64..10.0, 1..64)) {
        prop_assume!(w.iter().sum::<f64>() > 1e-6);
        let total: f64 = w.iter().sum();
        let t = AliasTable::new(&w).unwrap();
        for (p, x) in t.probabilities().iter().zip(&w) {
            prop_assert!((p - x / total).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_weights_unreachable(w in prop::collection::vec(prop_oneof![Just(0.0f64), 0.1f64..1.0], 2..32)) {
        prop_assume!(w.iter().any(|&x| x > 0.0));
        let t = AliasTable::new(&w).unwrap();
        for i in 0..t.len() {
            for x in [0.0, 0.25, 0.5, 0.75, 1.0 - f64::EPSILON] {
                prop_assert!(w[t.lookup(i, x)] > 0.0);
            }
        }
    }
}

#[test]
fn chi_square_p_values_look_uniform() {
    // A biased sampler would pile p-values up near zero.
    let mut rng = stream_rng(999, 0);
    let mut draws = stream_rng(999, 1);
    let n = 1000;
    let mut below = 0;
    for _ in 0..n {
        let m = rng.random_range(2..=16);
        let w: Vec<f64> = (0..m).map(|_| rng.random::<f64>() + 0.05).collect();
        let total: f64 = w.iter().sum();
        let p: Vec<f64> = w.iter().map(|x| x / total).collect();
        let t = AliasTable::new(&w).unwrap();
        let mut counts = vec![0u64; m];
        for _ in 0..20_000 {
            counts[t.sample(&mut draws)] += 1;
        }
        below += u32::from(chi_square_p(&counts, &p) < 0.1);
    }
    let sigma = (n as f64 * 0.1 * 0.9).sqrt();
    assert!((below as f64 - 100.0).abs() < 4.0 * sigma, "{below} of {n} below 0.1");
}
