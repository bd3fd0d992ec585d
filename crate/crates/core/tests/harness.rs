use nalgebra::{DMatrix, DVector};
use rand::Rng;
use vertex_time::harness::io::{read_edges_file, read_matrix, read_samples, write_matrix, write_samples, write_table};
use vertex_time::harness::{add_noise_snr, quantile, run_experiment, sample_indices, stream, ExperimentConfig};
use vertex_time::jecd::{Role, Sample, SampleSet};
use vertex_time::Error;

const CFG: &str = r#"
seed = 11
[graph]
kind = "erdos_renyi"
n = 8
prob = 0.5
[time]
start = -1.0
end = 1.0
points = 30
[signal]
kind = "sinc"
k = 2
omega0 = 5.0
[[methods]]
kind = "jft"
k = 2
l = 4
[sweep]
snr_db = [10.0, inf]
train_ratio = [0.5]
repetitions = 3
"#;

#[test]
fn streams_are_reproducible_and_distinct() {
    let draw = |label: &str| -> Vec<u64> {
        let mut r = stream(5, label);
        (0..8).map(|_| r.random()).collect()
    };
    assert_eq!(draw("noise/0"), draw("noise/0"));
    assert_ne!(draw("noise/0"), draw("noise/1"));
    assert_ne!(draw("noise/0"), draw("sampling/0"));
    let mut other = stream(6, "noise/0");
    assert_ne!(draw("noise/0"), (0..8).map(|_| other.random()).collect::<Vec<u64>>());
}

#[test]
fn noise_hits_the_requested_snr() {
    let y = DVector::from_fn(500, |i, _| (i as f64 * 0.05).sin() + 0.1);
    for snr in [-8.0, 0.0, 13.5, 40.0] {
        let noisy = add_noise_snr(&y, snr, &mut stream(1, "noise")).unwrap();
        let achieved = 10.0 * (y.norm_squared() / (&noisy - &y).norm_squared()).log10();
        assert!((achieved - snr).abs() <= 0.01, "{snr}: {achieved}");
    }
    assert!(matches!(add_noise_snr(&DVector::zeros(4), 0.0, &mut stream(1, "n")), Err(Error::ZeroSignal)));
}

#[test]
fn sampling_is_sorted_distinct_and_sized() {
    let idx = sample_indices(100, 0.2, &mut stream(2, "s"));
    assert_eq!(idx.len(), 20);
    assert!(idx.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(sample_indices(10, 0.001, &mut stream(2, "s")).len(), 1);
}

#[test]
fn quantiles_interpolate() {
    let v = [1.0, 2.0, 4.0, 8.0];
    assert_eq!(quantile(&v, 0.5), 3.0);
    assert_eq!(quantile(&v, 0.0), 1.0);
    assert_eq!(quantile(&v, 1.0), 8.0);
    assert!(quantile(&[], 0.5).is_nan());
}

#[test]
fn config_roundtrip_and_validation() {
    let c = ExperimentConfig::from_toml(CFG).unwrap();
    let back = ExperimentConfig::from_toml(&c.to_toml().unwrap()).unwrap();
    assert_eq!(c, back);
    assert_eq!(c.hash().unwrap(), back.hash().unwrap());
    let other = ExperimentConfig::from_toml(&CFG.replace("seed = 11", "seed = 12")).unwrap();
    assert_ne!(c.hash().unwrap(), other.hash().unwrap());
    for (from, to) in [
        ("repetitions = 3", "repetitions = 0"),
        ("points = 30", "points = 1"),
        ("end = 1.0", "end = -2.0"),
        ("prob = 0.5", "prob = 0.0"),
        ("train_ratio = [0.5]", "train_ratio = []"),
        ("omega0 = 5.0", "omega0 = 5.0\nextra = 1"),
    ] {
        assert!(matches!(ExperimentConfig::from_toml(&CFG.replace(from, to)), Err(Error::Config(_))), "{to}");
    }
}

#[test]
fn experiment_is_deterministic_and_hashed() {
    let c = ExperimentConfig::from_toml(CFG).unwrap();
    let a = run_experiment(&c).unwrap();
    let b = run_experiment(&c).unwrap();
    assert!(!a.any_failure());
    assert_eq!(a.summary_csv().unwrap(), b.summary_csv().unwrap());
    assert_eq!(a.raw_csv().unwrap(), b.raw_csv().unwrap());
    let summary = a.summary_csv().unwrap();
    assert_eq!(summary.lines().next().unwrap(), format!("# config-hash: {}", c.hash().unwrap()));
    let noiseless = a.find("jft", 0.5, None, "rse").unwrap();
    let noisy = a.find("jft", 0.5, Some(10.0), "rse").unwrap();
    assert_eq!(noiseless.count, 3);
    assert!(noiseless.q1 <= noiseless.median && noiseless.median <= noiseless.q3);
    assert!(noisy.median >= noiseless.median);
}

#[test]
fn file_io_roundtrips() {
    let dir = tempfile::tempdir().unwrap();
    let m = DMatrix::from_row_slice(2, 3, &[1.0, -2.5, 0.125, 3.0, 1e-9, 7.0]);
    let mp = dir.path().join("m.csv");
    write_matrix(std::fs::File::create(&mp).unwrap(), &m).unwrap();
    assert_eq!(read_matrix(std::fs::File::open(&mp).unwrap()).unwrap(), m);
    assert!(read_matrix("1,2\n3\n".as_bytes()).is_err());
    assert!(read_matrix("".as_bytes()).is_err());

    let ep = dir.path().join("e.csv");
    std::fs::write(&ep, "# comment\n0,1\n1,2,2.5\n2,3\n").unwrap();
    let g = read_edges_file(&ep, 0, Some(4)).unwrap();
    assert_eq!(g.n_vertices(), 4);
    assert_eq!(g.adjacency()[(2, 1)], 2.5);
    assert!(read_edges_file(&ep, 2, None).is_err());
    assert!(matches!(read_edges_file(&ep, 0, Some(5)), Err(Error::Disconnected)));

    let set = SampleSet::new(vec![Sample { vertex: 3, time: 0.5, value: 2.0 }, Sample { vertex: 0, time: -1.0, value: 0.0 }], Role::Test);
    let mut buf = Vec::new();
    write_samples(&mut buf, &[&set]).unwrap();
    let back = read_samples(buf.as_slice()).unwrap();
    assert_eq!(back.len(), 1);
    assert_eq!(back[0].samples, set.samples);
    assert!(read_samples("0,0.0,x,train\n".as_bytes()).is_err());

    let mut out = Vec::new();
    write_table(&mut out, "abc", &["a", "b"], &[vec!["1".into(), "2".into()]]).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), "# config-hash: abc\na,b\n1,2\n");
}
