//! Property tests for the structural invariants: Hoelder pairing, the
//! maximal-operator bound, duality, homogeneity and monotonicity.

use proptest::prelude::*;

use triembed::{
    bilinear_operator, dual_exponent, integrate, lp_norm, maximal_function, trilinear_form,
    wolff_potential, DyadicTree, GridFunction, Kernel, Measure,
};

fn shapes() -> impl Strategy<Value = (u32, u32)> {
    prop_oneof![
        Just((1u32, 0u32)),
        Just((1, 1)),
        Just((1, 2)),
        Just((1, 3)),
        Just((1, 4)),
        Just((2, 1)),
        Just((2, 2)),
    ]
}

fn mass_vec(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![2 => Just(0.0), 5 => 0.01f64..3.0], len)
}

fn value_vec(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..4.0, len)
}

fn nonneg_vec(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..4.0, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hoelder_pairing_bound(
        (shape, p) in (shapes(), 1.1f64..5.0),
        seed_data in prop::collection::vec(0.0f64..2.0, 64 * 3),
    ) {
        let (n, l) = shape;
        let tree = DyadicTree::build(n, l).unwrap();
        let m = tree.leaf_count();
        prop_assume!(seed_data.len() >= 3 * m);
        let f = GridFunction::from_values(&tree, seed_data[..m].to_vec()).unwrap();
        let g = GridFunction::from_values(&tree, seed_data[m..2 * m].to_vec()).unwrap();
        let sigma = Measure::from_leaf_masses(&tree, seed_data[2 * m..3 * m].to_vec()).unwrap();
        let lhs = integrate(&tree, &f.mul(&g), &sigma, tree.root());
        let rhs = lp_norm(&f, &sigma, p) * lp_norm(&g, &sigma, dual_exponent(p));
        prop_assert!(lhs <= rhs * (1.0 + 1e-12), "{lhs} > {rhs}");
    }

    #[test]
    fn maximal_operator_lp_bound(
        (shape, p) in (shapes(), 1.05f64..6.0),
        masses in mass_vec(64),
        values in value_vec(64),
    ) {
        let (n, l) = shape;
        let tree = DyadicTree::build(n, l).unwrap();
        let m = tree.leaf_count();
        prop_assume!(masses.len() >= m && values.len() >= m);
        let sigma = Measure::from_leaf_masses(&tree, masses[..m].to_vec()).unwrap();
        let f = GridFunction::from_values(&tree, values[..m].to_vec()).unwrap();
        let mf = maximal_function(&tree, &f, &sigma);
        let lhs = lp_norm(&mf, &sigma, p);
        let rhs = dual_exponent(p) * lp_norm(&f, &sigma, p);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12), "{lhs} > {rhs}");
        for i in 0..m {
            if sigma.leaf(i) > 0.0 {
                prop_assert!(mf.get(i) >= f.get(i).abs());
            }
        }
    }

    #[test]
    fn duality_identity(
        shape in shapes(),
        kernel_vals in prop::collection::vec(0.0f64..2.0, 128),
        masses in prop::collection::vec(0.0f64..2.0, 64 * 3),
        values in prop::collection::vec(0.0f64..2.0, 64 * 3),
    ) {
        let (n, l) = shape;
        let tree = DyadicTree::build(n, l).unwrap();
        let m = tree.leaf_count();
        let c = tree.cube_count();
        prop_assume!(kernel_vals.len() >= c && masses.len() >= 3 * m && values.len() >= 3 * m);
        let kernel = Kernel::from_values(&tree, kernel_vals[..c].to_vec()).unwrap();
        let sigmas: Vec<Measure> = (0..3)
            .map(|i| Measure::from_leaf_masses(&tree, masses[i * m..(i + 1) * m].to_vec()).unwrap())
            .collect();
        let fs: Vec<GridFunction> = (0..3)
            .map(|i| GridFunction::from_values(&tree, values[i * m..(i + 1) * m].to_vec()).unwrap())
            .collect();
        let form = trilinear_form(
            &tree,
            &kernel,
            [&sigmas[0], &sigmas[1], &sigmas[2]],
            [&fs[0], &fs[1], &fs[2]],
        );
        let op = bilinear_operator(&tree, &kernel, &sigmas[0], &fs[0], &sigmas[1], &fs[1]);
        let paired = integrate(&tree, &op.mul(&fs[2]), &sigmas[2], tree.root());
        let scale = form.abs().max(paired.abs()).max(1e-300);
        prop_assert!((form - paired).abs() <= 1e-12 * scale, "{form} vs {paired}");
    }

    #[test]
    fn form_is_one_homogeneous(
        shape in shapes(),
        kernel_vals in prop::collection::vec(0.0f64..2.0, 128),
        masses in prop::collection::vec(0.01f64..2.0, 64 * 3),
        values in prop::collection::vec(0.0f64..2.0, 64 * 3),
        t in 0.1f64..10.0,
    ) {
        let (n, l) = shape;
        let tree = DyadicTree::build(n, l).unwrap();
        let m = tree.leaf_count();
        let c = tree.cube_count();
        prop_assume!(kernel_vals.len() >= c && masses.len() >= 3 * m && values.len() >= 3 * m);
        let kernel = Kernel::from_values(&tree, kernel_vals[..c].to_vec()).unwrap();
        let sigmas: Vec<Measure> = (0..3)
            .map(|i| Measure::from_leaf_masses(&tree, masses[i * m..(i + 1) * m].to_vec()).unwrap())
            .collect();
        let fs: Vec<GridFunction> = (0..3)
            .map(|i| GridFunction::from_values(&tree, values[i * m..(i + 1) * m].to_vec()).unwrap())
            .collect();
        let base = trilinear_form(
            &tree,
            &kernel,
            [&sigmas[0], &sigmas[1], &sigmas[2]],
            [&fs[0], &fs[1], &fs[2]],
        );
        let scaled_k = trilinear_form(
            &tree,
            &kernel.scaled(t),
            [&sigmas[0], &sigmas[1], &sigmas[2]],
            [&fs[0], &fs[1], &fs[2]],
        );
        let f0 = fs[0].scaled(t);
        let scaled_f = trilinear_form(
            &tree,
            &kernel,
            [&sigmas[0], &sigmas[1], &sigmas[2]],
            [&f0, &fs[1], &fs[2]],
        );
        let scale = base.abs().max(1.0);
        prop_assert!((scaled_k - t * base).abs() <= 1e-10 * scale * t.max(1.0));
        prop_assert!((scaled_f - t * base).abs() <= 1e-10 * scale * t.max(1.0));
    }

    #[test]
    fn wolff_scales_like_t_to_the_p(
        shape in shapes(),
        kernel_vals in prop::collection::vec(0.0f64..2.0, 128),
        masses in prop::collection::vec(0.0f64..2.0, 64 * 2),
        (p, t) in (1.2f64..3.5, 0.2f64..5.0),
    ) {
        let (n, l) = shape;
        let tree = DyadicTree::build(n, l).unwrap();
        let m = tree.leaf_count();
        let c = tree.cube_count();
        prop_assume!(kernel_vals.len() >= c && masses.len() >= 2 * m);
        let kernel = Kernel::from_values(&tree, kernel_vals[..c].to_vec()).unwrap();
        let mu = Measure::from_leaf_masses(&tree, masses[..m].to_vec()).unwrap();
        let nu = Measure::from_leaf_masses(&tree, masses[m..2 * m].to_vec()).unwrap();
        let base = wolff_potential(p, &tree, &kernel, &mu, &nu);
        let scaled = wolff_potential(p, &tree, &kernel.scaled(t), &mu, &nu);
        for i in 0..m {
            let expected = t.powf(p) * base.get(i);
            let scale = expected.abs().max(1e-300);
            prop_assert!((scaled.get(i) - expected).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn enlarging_the_kernel_is_monotone(
        shape in shapes(),
        kernel_vals in prop::collection::vec(0.0f64..2.0, 128),
        bumps in prop::collection::vec(0.0f64..1.0, 128),
        masses in prop::collection::vec(0.0f64..2.0, 64 * 3),
        values in prop::collection::vec(0.0f64..2.0, 64 * 3),
    ) {
        let (n, l) = shape;
        let tree = DyadicTree::build(n, l).unwrap();
        let m = tree.leaf_count();
        let c = tree.cube_count();
        prop_assume!(
            kernel_vals.len() >= c && bumps.len() >= c && masses.len() >= 3 * m
                && values.len() >= 3 * m
        );
        let kernel = Kernel::from_values(&tree, kernel_vals[..c].to_vec()).unwrap();
        let bigger = Kernel::from_values(
            &tree,
            (0..c).map(|i| kernel_vals[i] + bumps[i]).collect(),
        )
        .unwrap();
        let sigmas: Vec<Measure> = (0..3)
            .map(|i| Measure::from_leaf_masses(&tree, masses[i * m..(i + 1) * m].to_vec()).unwrap())
            .collect();
        let fs: Vec<GridFunction> = (0..3)
            .map(|i| GridFunction::from_values(&tree, values[i * m..(i + 1) * m].to_vec()).unwrap())
            .collect();
        let small = trilinear_form(
            &tree,
            &kernel,
            [&sigmas[0], &sigmas[1], &sigmas[2]],
            [&fs[0], &fs[1], &fs[2]],
        );
        let large = trilinear_form(
            &tree,
            &bigger,
            [&sigmas[0], &sigmas[1], &sigmas[2]],
            [&fs[0], &fs[1], &fs[2]],
        );
        prop_assert!(large >= small * (1.0 - 1e-12));

        let w_small = wolff_potential(2.0, &tree, &kernel, &sigmas[0], &sigmas[1]);
        let w_large = wolff_potential(2.0, &tree, &bigger, &sigmas[0], &sigmas[1]);
        for i in 0..m {
            prop_assert!(w_large.get(i) >= w_small.get(i) * (1.0 - 1e-12));
        }
    }

    #[test]
    fn nonneg_inputs_keep_the_operator_nonneg(
        shape in shapes(),
        kernel_vals in prop::collection::vec(0.0f64..2.0, 128),
        masses in prop::collection::vec(0.0f64..2.0, 64 * 2),
        values in nonneg_vec(64 * 2),
    ) {
        let (n, l) = shape;
        let tree = DyadicTree::build(n, l).unwrap();
        let m = tree.leaf_count();
        let c = tree.cube_count();
        prop_assume!(kernel_vals.len() >= c && masses.len() >= 2 * m && values.len() >= 2 * m);
        let kernel = Kernel::from_values(&tree, kernel_vals[..c].to_vec()).unwrap();
        let s1 = Measure::from_leaf_masses(&tree, masses[..m].to_vec()).unwrap();
        let s2 = Measure::from_leaf_masses(&tree, masses[m..2 * m].to_vec()).unwrap();
        let f1 = GridFunction::from_values(&tree, values[..m].to_vec()).unwrap();
        let f2 = GridFunction::from_values(&tree, values[m..2 * m].to_vec()).unwrap();
        let out = bilinear_operator(&tree, &kernel, &s1, &f1, &s2, &f2);
        for v in out.values() {
            prop_assert!(*v >= 0.0 && v.is_finite());
        }
    }
}
