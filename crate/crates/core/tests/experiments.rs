use cran_core::experiments::{cutset_sum_rate, default_c_grid, fig2_sweep, InputPolicy, SWEEP_TOL};
use cran_core::model::{sample_rayleigh_channel, FronthaulBudget, GaussianChannel};
use cran_core::strategies::{sum_fronthaul_threshold, ZfGrid};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sweep_rows_respect_cutset(seed in any::<u64>()) {
        let ch = GaussianChannel::new(sample_rayleigh_channel(2, 2, seed), 1.0, 100.0).unwrap();
        let thr = sum_fronthaul_threshold(&ch);
        let rows = fig2_sweep(&ch, &default_c_grid(&ch, 16), ZfGrid { power_points: 12, noise_points: 12 }, seed).unwrap();
        let saturated: Vec<f64> = rows.iter().filter(|r| r.c >= thr).map(|r| r.r_com).collect();
        for r in &rows {
            prop_assert!(r.r_zf >= 0.0 && r.r_ddf >= 0.0 && r.r_com >= 0.0);
            prop_assert!(r.r_zf.max(r.r_ddf).max(r.r_com) <= r.cutset + SWEEP_TOL);
            prop_assert_eq!(r.seed, seed);
        }
        for w in saturated.windows(2) {
            prop_assert!((w[0] - w[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn cutset_grows_with_power(seed in any::<u64>(), c in 0.5f64..15.0, p in 1.0f64..200.0) {
        let h = sample_rayleigh_channel(2, 2, seed);
        let b = FronthaulBudget::sum(c).unwrap();
        for policy in [InputPolicy::Independent, InputPolicy::Optimized] {
            let lo = cutset_sum_rate(&GaussianChannel::new(h.clone(), 1.0, p).unwrap(), &b, policy);
            let hi = cutset_sum_rate(&GaussianChannel::new(h.clone(), 1.0, 2.0 * p).unwrap(), &b, policy);
            prop_assert!(hi >= lo - 1e-12);
        }
    }
}
