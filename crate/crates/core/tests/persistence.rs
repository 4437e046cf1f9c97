use pbe::bench::{make_sphere_dataset, BENCH_CURVATURE_C};
use pbe::io::{
    load_model, parse_points_table, read_points_table, save_model, write_results, ModelFile,
};
use pbe::{extend_batch, Error, SchemeKind, TrainingModel, WeightScheme};
use proptest::prelude::*;

fn sphere_model() -> TrainingModel {
    let data = make_sphere_dataset(30, 1, 0).unwrap();
    data.model(data.default_epsilon(), BENCH_CURVATURE_C).unwrap()
}

#[test]
fn sphere_model_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    let model = sphere_model();
    save_model(&model, &path).unwrap();
    let back = load_model(&path).unwrap();
    assert_eq!(back.len(), 900);
    assert_eq!(back.points(), model.points());
    assert_eq!(back.images(), model.images());
    assert_eq!(back.epsilon().to_bits(), model.epsilon().to_bits());
    assert_eq!(back.curvature_c().to_bits(), model.curvature_c().to_bits());
}

#[test]
fn reloaded_model_extends_identically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    let model = sphere_model();
    save_model(&model, &path).unwrap();
    let back = load_model(&path).unwrap();
    let queries = make_sphere_dataset(30, 30, 2).unwrap().query_params;
    for kind in SchemeKind::ALL {
        let a = extend_batch(&queries, &model, &WeightScheme::for_model(kind, &model));
        let b = extend_batch(&queries, &back, &WeightScheme::for_model(kind, &back));
        for (x, y) in a.into_iter().zip(b) {
            assert_eq!(x.unwrap(), y.unwrap());
        }
    }
}

#[test]
fn results_file_has_one_row_per_query() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("results.csv");
    let model = sphere_model();
    let data = make_sphere_dataset(30, 100, 1).unwrap();
    let scheme = WeightScheme::for_model(SchemeKind::PerPointTangent, &model);
    let results: Vec<_> = extend_batch(&data.query_params, &model, &scheme)
        .into_iter()
        .map(Result::unwrap)
        .collect();
    write_results(&results, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 101);
    assert_eq!(lines[0], "query_id,y_1,y_2,y_3,score,neighbor_count,epsilon_used");
    let row = &read_points_table(&path, 7).unwrap()[5];
    assert_eq!(row[0], 5.0);
    assert_eq!(&row[1..4], &results[5].embedding[..]);
    assert_eq!(row[4], results[5].score);
}

#[test]
fn empty_results_file_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("results.csv");
    write_results(&[], &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 1);
}

#[test]
fn malformed_tables_report_their_location() {
    match parse_points_table("1.0,2.0\n3.0,abc\n", 2).unwrap_err() {
        Error::ParseFailure { row, column, .. } => {
            assert_eq!(row, Some(2));
            assert_eq!(column, Some(2));
        }
        e => panic!("unexpected {e:?}"),
    }
    match parse_points_table("1,2\n3,4,5\n", 2).unwrap_err() {
        Error::DimensionMismatch { row, expected, found } => assert_eq!((row, expected, found), (2, 2, 3)),
        e => panic!("unexpected {e:?}"),
    }
}

#[test]
fn tampered_model_files_are_rejected() {
    let model = sphere_model();
    let doc = ModelFile::from_model(&model).to_document().unwrap();
    let bad_version = doc.replacen("\"format_version\": 1", "\"format_version\": 99", 1);
    assert_ne!(bad_version, doc);
    assert!(matches!(
        ModelFile::parse(&bad_version).and_then(ModelFile::into_model),
        Err(Error::ValidationFailure(_))
    ));
    assert!(matches!(ModelFile::parse(&doc[..doc.len() / 2]), Err(Error::ParseFailure { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn arbitrary_finite_models_round_trip(
        n in 1usize..4, d in 1usize..4, p in 1usize..20,
        raw in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 160),
        eps in 1e-300f64..1e300, c in 1e-300f64..1e300,
    ) {
        let points: Vec<f64> = raw.iter().copied().cycle().take(p * n).collect();
        let images: Vec<f64> = raw.iter().rev().copied().cycle().take(p * d).collect();
        let model = TrainingModel::new(n, d, points, images, eps, c).unwrap();
        let doc = ModelFile::from_model(&model).to_document().unwrap();
        let back = ModelFile::parse(&doc).unwrap().into_model().unwrap();
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(back.points()), bits(model.points()));
        prop_assert_eq!(bits(back.images()), bits(model.images()));
        prop_assert_eq!(back.epsilon().to_bits(), eps.to_bits());
        prop_assert_eq!(back.curvature_c().to_bits(), c.to_bits());
    }
}
