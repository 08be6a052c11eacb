use gaincond::{
    build_grid, condition_number, max_relative_change, parse_model, rga_2x2, singular_values,
    snap, typical_move_scale, unity_scale, unscale, write_model, ConditionNumber, DenseMatrix,
    Degeneracy, GainModel64, ModelFormat,
};
use proptest::prelude::*;

fn entry() -> impl Strategy<Value = f64> {
    (0.01f64..10.0, any::<bool>()).prop_map(|(m, neg)| if neg { -m } else { m })
}

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = DenseMatrix<f64>> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(-10.0f64..10.0, r * c)
            .prop_map(move |v| DenseMatrix::from_vec(r, c, v).unwrap())
    })
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn cond(m: &DenseMatrix<f64>) -> f64 {
    match condition_number(m, 1e-12) {
        ConditionNumber::Finite(c) => c,
        _ => f64::INFINITY,
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn singular_values_match_nalgebra(m in matrix(6, 6)) {
        let ours = singular_values(&m);
        let na = nalgebra::DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice());
        let mut theirs: Vec<f64> = na.singular_values().iter().copied().collect();
        theirs.sort_by(|a, b| b.total_cmp(a));
        prop_assert_eq!(ours.len(), theirs.len());
        let scale = theirs[0].max(1e-300);
        for (a, b) in ours.values.iter().zip(&theirs) {
            prop_assert!((a - b).abs() <= 1e-12 * scale, "{:?} vs {:?}", ours.values, theirs);
        }
    }

    #[test]
    fn singular_values_sorted_and_nonnegative(m in matrix(5, 5)) {
        let s = singular_values(&m).values;
        prop_assert!(s.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(s.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn frobenius_norm_is_preserved(m in matrix(5, 5)) {
        let fro: f64 = m.as_slice().iter().map(|x| x * x).sum();
        let s: f64 = singular_values(&m).values.iter().map(|x| x * x).sum();
        prop_assert!((fro - s).abs() <= 1e-12 * fro.max(1.0));
    }

    #[test]
    fn condition_number_invariances(m in matrix(4, 4), k in 0.001f64..1000.0) {
        let c = cond(&m);
        prop_assume!(c.is_finite() && c < 1e8);
        let t = cond(&m.transpose());
        let scaled = cond(&m.map(|x| x * k));
        let mut rows: Vec<usize> = (0..m.rows()).collect();
        rows.reverse();
        let cols: Vec<usize> = (0..m.cols()).rev().collect();
        let permuted = cond(&m.select(&rows, &cols));
        for other in [t, scaled, permuted] {
            prop_assert!(rel(other, c) <= 1e-8, "{} vs {}", other, c);
        }
    }

    #[test]
    fn condition_number_at_least_one(m in matrix(4, 4)) {
        let c = cond(&m);
        prop_assert!(c >= 1.0 - 1e-12);
    }

    #[test]
    fn rga_number_at_least_one_half(g in prop::array::uniform4(entry())) {
        let r = rga_2x2(g[0], g[1], g[2], g[3], 1e-12, 1e-12);
        prop_assert!(r.rga_number >= 0.5);
    }

    #[test]
    fn swapping_columns_maps_lambda_to_complement(g in prop::array::uniform4(entry())) {
        let a = rga_2x2(g[0], g[1], g[2], g[3], 1e-12, 1e-12);
        prop_assume!(a.degenerate == Degeneracy::None && a.lambda.abs() < 1e6);
        let b = rga_2x2(g[1], g[0], g[3], g[2], 1e-12, 1e-12);
        prop_assert!((a.lambda + b.lambda - 1.0).abs() <= 1e-9 * a.lambda.abs().max(1.0));
        prop_assert!(rel(a.rga_number, b.rga_number) <= 1e-9);
    }

    #[test]
    fn unity_gain_ties_to_signed_lambda(g in prop::array::uniform4(entry())) {
        let r = rga_2x2(g[0], g[1], g[2], g[3], 1e-12, 1e-12);
        prop_assume!(r.lambda_signed.is_finite() && r.lambda_signed.abs() < 1e6);
        let (unity, k) = unity_scale(g[0], g[1], g[2], g[3]).unwrap();
        prop_assert!((k - (1.0 - 1.0 / r.lambda_signed)).abs() <= 1e-9);
        let u = rga_2x2(unity[(0, 0)], unity[(0, 1)], unity[(1, 0)], unity[(1, 1)], 1e-12, 1e-12);
        prop_assert!(rel(u.lambda_signed, r.lambda_signed) <= 1e-9);
    }

    #[test]
    fn scaling_round_trips(
        m in matrix(5, 5),
        moves in prop::collection::vec(0.01f64..100.0, 5),
    ) {
        let model = GainModel64::from_parts(
            (0..m.cols()).map(|j| (format!("u{j}"), moves[j])),
            (0..m.rows()).map(|i| format!("y{i}")),
            m.clone(),
        );
        let s = typical_move_scale(&model).unwrap();
        for i in 0..m.rows() {
            let peak = s.values.row(i).iter().fold(0.0f64, |a, x| a.max(x.abs()));
            prop_assert!(peak == 1.0 || s.zero_rows.contains(&i));
        }
        let back = unscale(&s, &s.values).unwrap();
        for (i, j, g) in m.indexed_iter() {
            prop_assert!((back[(i, j)] - g).abs() <= 1e-12 * g.abs().max(1e-300));
        }
    }

    #[test]
    fn model_serialization_round_trips(m in matrix(4, 4)) {
        let model = GainModel64::from_parts(
            (0..m.cols()).map(|j| (format!("u{j}"), 1.0 + j as f64 / 3.0)),
            (0..m.rows()).map(|i| format!("y{i}")),
            m,
        );
        for fmt in [ModelFormat::Json, ModelFormat::Csv] {
            let back: GainModel64 = parse_model(&write_model(&model, fmt), fmt).unwrap();
            prop_assert_eq!(&back, &model);
        }
    }

    #[test]
    fn snap_stays_within_bound(t in 1.5f64..50.0, g in 0.001f64..=1.0, neg in any::<bool>()) {
        let grid = build_grid(t, 0.001).unwrap();
        let g = if neg { -g } else { g };
        let s = snap(g, &grid).unwrap();
        prop_assert!(s.change_pct.abs() <= max_relative_change(t) * (1.0 + 1e-12));
        prop_assert_eq!(s.binned.signum(), g.signum());
        prop_assert_eq!(s.binned.abs(), grid.boundaries[s.bin_index]);
    }
}
