mod common;

use wom_density::dataset::{parse_dataset, write_dataset, DatasetPaths};
use wom_density::metrics::score_histogram;
use wom_density::simulator::{simulate_dataset, SimConfig, TrueModel};

#[test]
fn bundled_fixture_regenerates_byte_for_byte() {
    let sim = simulate_dataset(&TrueModel::published(), &SimConfig::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_dataset(dir.path(), &sim.dataset).unwrap();
    for name in ["ratings.csv", "items.csv", "sales.csv", "critics.csv", "profiles.csv"] {
        let fresh = std::fs::read(dir.path().join(name)).unwrap();
        let bundled = std::fs::read(common::fixture_dir().join(name)).unwrap();
        assert!(fresh == bundled, "{name} differs from the bundled copy");
    }
}

#[test]
fn fixture_round_trips_through_csv() {
    let paths = DatasetPaths::in_dir(common::fixture_dir(), true);
    let ds = parse_dataset(&paths, common::FIXTURE_TICKET_PRICE).unwrap();
    let sim = simulate_dataset(&TrueModel::published(), &SimConfig::default()).unwrap();
    assert_eq!(ds.items, sim.dataset.items);
    assert_eq!(ds.sales, sim.dataset.sales);
    assert_eq!(ds.ratings, sim.dataset.ratings);
    assert_eq!(ds.profiles, sim.dataset.profiles);
}

#[test]
fn fixture_score_usage_hits_targets() {
    let paths = DatasetPaths::in_dir(common::fixture_dir(), true);
    let ds = parse_dataset(&paths, common::FIXTURE_TICKET_PRICE).unwrap();
    let h = score_histogram(&ds.ratings);
    assert!((h.fraction(5).unwrap() - 0.49).abs() <= 0.02);
    assert!((h.fraction(1).unwrap() - 0.18).abs() <= 0.02);
}
