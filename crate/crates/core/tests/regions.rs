use cran_core::info::ChannelModel;
use cran_core::model::{
    DiscreteChannel, DiscreteSystemDistribution, FronthaulBudget, GaussianChannel, GaussianSystemDistribution,
};
use cran_core::region::enumerate_corners;
use cran_core::strategies::{constant_gap_distribution, marton_sum_rate};
use cran_core::verify::{
    compression_region_feasible, ddf_f, ddf_g, lemma1_residual, random_discrete_instance, region_inclusion_check,
};
use cran_core::Error;
use nalgebra::DMatrix;

fn eye() -> GaussianChannel {
    GaussianChannel::new(DMatrix::identity(2, 2), 1.0, 100.0).unwrap()
}

fn copy_bits() -> (DiscreteSystemDistribution, DiscreteChannel) {
    let mut pmf = vec![0.0; 16];
    for x1 in 0..2 {
        for x2 in 0..2 {
            pmf[x1 * 8 + x2 * 4 + x1 * 2 + x2] = 0.25;
        }
    }
    (
        DiscreteSystemDistribution::over_users_and_bs(pmf, &[2, 2], &[2, 2]).unwrap(),
        DiscreteChannel::identity(&[2, 2]).unwrap(),
    )
}

#[test]
fn compression_feasibility_on_identity_channel() {
    let dist = constant_gap_distribution(&eye());
    let ok = compression_region_feasible(&dist, &FronthaulBudget::sum(6.7).unwrap()).unwrap();
    assert!(ok.feasible);
    assert!((ok.slacks[0b11] - (6.7 - 101f64.log2())).abs() < 1e-12);
    assert!((ok.slacks[0b11] - 0.042).abs() < 1e-3);
    assert!(!compression_region_feasible(&dist, &FronthaulBudget::sum(4.0).unwrap()).unwrap().feasible);
    assert!(compression_region_feasible(&dist, &FronthaulBudget::unlimited()).unwrap().feasible);
}

#[test]
fn lemma1_edge_cases() {
    let zero = GaussianChannel::new(DMatrix::zeros(2, 2), 1.0, 100.0).unwrap();
    assert!(lemma1_residual(&constant_gap_distribution(&zero), &zero).unwrap() < 1e-12);

    // X correlated with itself across BSs
    let mut cov = constant_gap_distribution(&eye()).cov().clone();
    cov[(2, 3)] = 50.0;
    cov[(3, 2)] = 50.0;
    let corr = GaussianSystemDistribution::scalar(cov, 2, 2, None).unwrap();
    assert!(matches!(lemma1_residual(&corr, &eye()), Err(Error::PreconditionViolated(_))));
}

#[test]
fn ddf_f_edge_cases() {
    let (dist, ch) = copy_bits();
    let f = ddf_f(&dist, &ch, f64::INFINITY).unwrap();
    assert_eq!(f.f.values(), f.marton.values());
    assert!(matches!(ddf_f(&dist, &ch, -1.0), Err(Error::BadCapacity(_))));

    let corners: Vec<Vec<f64>> = enumerate_corners(&ddf_f(&dist, &ch, 1.0).unwrap().f)
        .unwrap()
        .into_iter()
        .map(|c| c.coords)
        .collect();
    assert_eq!(corners.len(), 2);
    assert!(corners.contains(&vec![1.0, 0.0]));
    assert!(corners.contains(&vec![0.0, 1.0]));
}

#[test]
fn ddf_g_edge_cases() {
    let ch = eye();
    let dist = constant_gap_distribution(&ch);
    let ext = ch.extend(&dist).unwrap();
    let marton = marton_sum_rate(&ext).unwrap();

    let g = ddf_g(&dist, &ch, 0.0).unwrap();
    assert_eq!(g.value(0), 0.0);
    // log2(101) + T(U) - sum I = log2(101) - marton
    assert!((g.value(0b11) - (101f64.log2() - marton)).abs() < 1e-9);

    let g = ddf_g(&dist, &ch, 50.0).unwrap();
    assert!((1..4).all(|m| g.value(m) > 0.0));
}

#[test]
fn compression_region_inside_ddf_region() {
    let mut checked = 0;
    for seed in 0..40 {
        let (dist, ch, c) = random_discrete_instance(seed).unwrap();
        for budget in [FronthaulBudget::sum(c).unwrap(), FronthaulBudget::per_link(vec![c, 3.0]).unwrap()] {
            if let Some(r) = region_inclusion_check(&dist, &ch, &budget).unwrap() {
                assert!(r.holds, "seed {seed}: {r:?}");
                checked += 1;
            }
        }
    }
    assert!(checked > 0);

    let (dist, ch) = copy_bits();
    assert!(region_inclusion_check(&dist, &ch, &FronthaulBudget::sum(0.5).unwrap()).unwrap().is_none());
    let r = region_inclusion_check(&dist, &ch, &FronthaulBudget::unlimited()).unwrap().unwrap();
    assert!(r.holds);
    assert!(r.worst_margin.abs() < 1e-12);
}
