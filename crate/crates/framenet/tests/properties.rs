use std::f64::consts::TAU;

use framenet::constructions::mult_net_relu;
use framenet::darcy::{coords_to_field, field_to_coords, manufactured_rhs, Dataset, NoiseModel, TorusGrid};
use framenet::erm::{empirical_risk, empirical_risk_ls, fit_loglog_slope, torus_rate, FnPredictor, TorusPipeline};
use framenet::framenet::{allocate_truncations, entropy_bound, EntropyInputs, FrameNetModel};
use framenet::hilbert::{torus_basis, Frame, ScalingMap, SmoothnessWeights};
use framenet::nn::{Activation, NeuralNet};
use proptest::prelude::*;

fn unit() -> impl Strategy<Value = f64> {
    -1.0..=1.0f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dual_frame_reconstructs(extra in prop::collection::vec(unit(), 6), x in prop::collection::vec(unit(), 3)) {
        let mut cols: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| f64::from(u8::from(i == j))).collect()).collect();
        cols.extend(extra.chunks(3).map(<[f64]>::to_vec));
        let frame = Frame::from_columns(3, &cols).unwrap();
        let c = frame.dual().unwrap().analysis(&x).unwrap();
        let back = frame.synthesis(&c).unwrap();
        for (a, b) in x.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn least_squares_risk_splits(
        w in prop::collection::vec(unit(), 6),
        xs in prop::collection::vec(prop::collection::vec(unit(), 2), 1..20),
        noise in prop::collection::vec(prop::collection::vec(unit(), 3), 20),
    ) {
        let obs: Vec<Vec<f64>> = noise[..xs.len()].to_vec();
        let data = Dataset::new(xs, obs, NoiseModel::White, 1.0, 0).unwrap();
        let model = FnPredictor(|x: &[f64]| Ok((0..3).map(|i| w[2 * i] * x[0] + w[2 * i + 1] * x[1]).collect()));
        let ls = empirical_risk_ls(&model, &data).unwrap();
        let risk = empirical_risk(&model, &data).unwrap();
        let mean_sq = data.obs.iter().map(|y| y.iter().map(|v| v * v).sum::<f64>()).sum::<f64>() / data.len() as f64;
        prop_assert!((ls - (risk + mean_sq)).abs() <= 1e-10 * (1.0 + ls.abs()));
    }

    #[test]
    fn manufactured_rhs_is_linear(alpha in -3.0..3.0f64, p in 1..3usize, q in 1..3usize) {
        let grid = TorusGrid::new(2, 16).unwrap();
        let a = grid.sample(|x| 2.0 + (TAU * x[0]).sin() * (TAU * x[1]).cos());
        let u = grid.sample(|x| (TAU * p as f64 * x[0]).sin());
        let v = grid.sample(|x| (TAU * q as f64 * x[1]).cos() * (TAU * x[0]).cos());
        let combo = u.zip_with(&v, |s, t| alpha * s + t).unwrap();
        let lhs = manufactured_rhs(&a, &combo).unwrap();
        let (fu, fv) = (manufactured_rhs(&a, &u).unwrap(), manufactured_rhs(&a, &v).unwrap());
        let rhs = fu.zip_with(&fv, |s, t| alpha * s + t).unwrap();
        let scale = 1.0 + lhs.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (l, r) in lhs.values.iter().zip(&rhs.values) {
            prop_assert!((l - r).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn torus_coordinates_roundtrip(coords in prop::collection::vec(unit(), 9)) {
        let basis = torus_basis(2, 2, 1.5).unwrap();
        let grid = TorusGrid::new(2, 16).unwrap();
        let k = coords.len().min(basis.len());
        let field = coords_to_field(&coords[..k], &basis, &grid).unwrap();
        let back = field_to_coords(&field, &basis).unwrap();
        for (a, b) in coords[..k].iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn entropy_is_monotone(
        depth in 1..5usize, width in 1..9usize, size in 0..50usize, m in 1.0..3.0f64,
        delta in 1e-4..2.0f64, repu in any::<bool>(),
    ) {
        let act = if repu { Activation::Repu { q: 2 } } else { Activation::Relu };
        let base = EntropyInputs { depth, width, size, m };
        let h = entropy_bound(base, 1.0, delta, act);
        prop_assert!(entropy_bound(base, 1.0, delta * 1.5, act) <= h);
        for bigger in [
            EntropyInputs { depth: depth + 1, ..base },
            EntropyInputs { width: width + 1, ..base },
            EntropyInputs { size: size + 1, ..base },
            EntropyInputs { m: m * 1.5, ..base },
        ] {
            prop_assert!(entropy_bound(bigger, 1.0, delta, act) >= h);
        }
    }

    #[test]
    fn relu_multiplier_vanishes_on_axes(y in -2.0..2.0f64) {
        let net = mult_net_relu(1e-2, 2.0).unwrap();
        prop_assert_eq!(net.eval(&[0.0, y]).unwrap()[0], 0.0);
        prop_assert_eq!(net.eval(&[y, 0.0]).unwrap()[0], 0.0);
    }

    #[test]
    fn rates_are_sub_parametric(d in 2..6usize, t0 in 0.0..0.9f64, excess in 0.3..10.0f64) {
        let s = 1.5 * d as f64 + excess;
        for pipeline in [TorusPipeline::L2, TorusPipeline::Uniform] {
            let r = torus_rate(s, d, t0, 0.25, pipeline).unwrap();
            prop_assert!(r.rate < 1.0);
        }
    }

    #[test]
    fn allocation_spends_the_budget(
        c in prop::collection::vec(prop::collection::vec(unit(), 1..6), 1..5),
        budget in 0..12usize,
    ) {
        let w = vec![1.0; c.len()];
        let alloc = allocate_truncations(&c, &w, budget).unwrap();
        let total: usize = c.iter().map(Vec::len).sum();
        prop_assert_eq!(alloc.total(), budget.min(total));
        prop_assert!(alloc.m.iter().zip(&c).all(|(m, row)| *m <= row.len()));
    }

    #[test]
    fn loglog_slope_is_exact_on_power_laws(p in -3.0..3.0f64, scale in 0.01..100.0f64) {
        let rows: Vec<(f64, f64)> = [10.0, 40.0, 160.0, 640.0].iter().map(|&n: &f64| (n, scale * n.powf(p))).collect();
        prop_assert!((fit_loglog_slope(&rows).unwrap() - p).abs() < 1e-10);
    }

    #[test]
    fn model_matches_manual_composition(params in prop::collection::vec(unit(), 64), u in prop::collection::vec(unit(), 5)) {
        let basis = torus_basis(2, 2, 1.5).unwrap();
        let scaling = ScalingMap::new(0.3, 1.5, SmoothnessWeights::algebraic(5, 1.0).unwrap()).unwrap();
        let mut net = NeuralNet::zeros_dense(&[5, 6, 4], Activation::Relu).unwrap();
        net.set_params(&params[..net.param_len()]).unwrap();
        let model = FrameNetModel::new(basis.frame.clone(), scaling.clone(), net.clone(), basis.frame.clone(), 10.0).unwrap();
        let x = scaling.sigma(&basis.frame, &u).unwrap();
        let mut enc = basis.frame.dual().unwrap().analysis(&x).unwrap();
        enc.truncate(5);
        let manual = basis.frame.synthesis(&net.eval(&scaling.scale(&enc).unwrap().values).unwrap()).unwrap();
        prop_assert_eq!(model.apply(&x).unwrap(), manual);
    }
}
