use std::path::Path;

use jnd_core::Procedure;
use jnd_tools::config::Config;
use jnd_tools::pipeline::{self, FitRow, LevelOutliers};
use jnd_tools::samples;
use proptest::prelude::*;

fn golden(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden/seed7")
        .join(name)
}

#[test]
fn csv_route_matches_in_memory_pipeline() {
    let config = Config {
        subjects: Some(32),
        sequences: Some(14),
        ..Config::default()
    };
    let spec = pipeline::population_spec(&config, 7).unwrap();
    let campaign = pipeline::simulate(&spec, Procedure::Robust).unwrap();
    let (cleaned, reports) = pipeline::clean(&campaign.dataset, &config.postprocess()).unwrap();
    let fits = pipeline::fit(&cleaned);

    let ingested = samples::read_dataset(&golden("samples.csv")).unwrap();
    assert_eq!(ingested, campaign.dataset);
    let (cleaned_csv, reports_csv) = pipeline::clean(&ingested, &config.postprocess()).unwrap();
    assert_eq!(cleaned_csv, cleaned);
    assert_eq!(reports_csv, reports);
    assert_eq!(pipeline::fit(&cleaned_csv), fits);

    let from_cli: Vec<FitRow> = serde_json::from_slice(&std::fs::read(golden("fits.json")).unwrap()).unwrap();
    assert_eq!(from_cli, fits);
    let outliers: Vec<LevelOutliers> =
        serde_json::from_slice(&std::fs::read(golden("outliers.json")).unwrap()).unwrap();
    assert_eq!(outliers, reports);
}

#[test]
fn sample_file_round_trips_byte_for_byte() {
    let bytes = std::fs::read(golden("samples.csv")).unwrap();
    let rows = samples::read_rows(&bytes[..]).unwrap();
    let mut out = Vec::new();
    samples::write_rows(&mut out, &rows).unwrap();
    assert_eq!(out, bytes);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn simulated_datasets_round_trip(seed in any::<u64>(), subjects in 2usize..12, sequences in 1u32..6) {
        let config = Config { subjects: Some(subjects), sequences: Some(sequences), ..Config::default() };
        let spec = pipeline::population_spec(&config, seed).unwrap();
        let dataset = pipeline::simulate(&spec, Procedure::Robust).unwrap().dataset;
        let rows = samples::dataset_rows(&dataset);
        let mut bytes = Vec::new();
        samples::write_rows(&mut bytes, &rows).unwrap();
        let back = samples::read_rows(&bytes[..]).unwrap();
        prop_assert_eq!(&back, &rows);
        prop_assert_eq!(samples::rows_to_dataset(&back).unwrap(), dataset);
        let mut again = Vec::new();
        samples::write_rows(&mut again, &back).unwrap();
        prop_assert_eq!(again, bytes);
    }
}
