use proptest::prelude::*;
use wobbly::dataset::{load_csv_from_reader, Dataset, IngestOptions};
use wobbly::preprocess::{
    apply_params, standardization_residuals, standardize, StandardizationParams,
};

fn non_constant_rows() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1usize..6).prop_flat_map(|dim| {
        prop::collection::vec(prop::collection::vec(-1e3..1e3_f64, dim), 2..80)
            .prop_filter("every column must vary", move |rows| {
                (0..dim).all(|j| rows.iter().any(|r| (r[j] - rows[0][j]).abs() > 1e-6))
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn standardized_columns_have_zero_mean_unit_std(rows in non_constant_rows()) {
        let d = Dataset::from_unnamed_rows(rows).unwrap();
        let (z, _) = standardize(&d).unwrap();
        let (mean_err, std_err) = standardization_residuals(&z);
        prop_assert!(mean_err < 1e-9);
        prop_assert!(std_err < 1e-9);
    }

    #[test]
    fn standardizing_twice_is_nearly_idempotent(rows in non_constant_rows()) {
        let d = Dataset::from_unnamed_rows(rows).unwrap();
        let (z, _) = standardize(&d).unwrap();
        let (zz, params) = standardize(&z).unwrap();
        for (a, b) in z.rows().zip(zz.rows()) {
            for (x, y) in a.iter().zip(b) {
                prop_assert!((x - y).abs() <= 1e-9);
            }
        }
        prop_assert!(params.means.iter().all(|m| m.abs() < 1e-9));
        prop_assert!(params.stds.iter().all(|s| (s - 1.0).abs() < 1e-9));
    }

    #[test]
    fn fitted_params_reapply_exactly(rows in non_constant_rows()) {
        let d = Dataset::from_unnamed_rows(rows).unwrap();
        let (z, params) = standardize(&d).unwrap();
        prop_assert_eq!(apply_params(&d, &params).unwrap(), z);
        prop_assert_eq!(apply_params(&d, &StandardizationParams::identity(d.n_cols())).unwrap(), d);
    }

    #[test]
    fn csv_round_trip(rows in non_constant_rows()) {
        let d = Dataset::from_unnamed_rows(rows).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf, b',').unwrap();
        let (back, report) = load_csv_from_reader(buf.as_slice(), &IngestOptions::default()).unwrap();
        prop_assert_eq!(report.n_rows, d.n_rows());
        prop_assert_eq!(back.column_names(), d.column_names());
        for (a, b) in d.rows().zip(back.rows()) {
            prop_assert_eq!(a, b);
        }
    }
}
