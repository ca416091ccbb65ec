//! End-to-end runs of the `peco` command line on T1.

use std::fs;
use std::path::{Path, PathBuf};

use peco::cli::run;

const T1_RAW: &str = "u1\ti1\nu1\ti2\nu2\ti2\nu2\ti3\nu3\ti3\nu3\ti4\n";

fn peco(args: &[&str]) -> i32 {
    run(std::iter::once("peco").chain(args.iter().copied()))
}

fn p(root: &Path, rel: &str) -> String {
    root.join(rel).to_str().unwrap().to_owned()
}

/// ingest, split, cluster, sample, stats and eval on T1 under `root`.
fn pipeline(root: &Path) {
    fs::write(root.join("t1.tsv"), T1_RAW).unwrap();
    assert_eq!(peco(&["ingest", "--input", &p(root, "t1.tsv"), "--out", &p(root, "data")]), 0);
    assert_eq!(peco(&["split", "--graph", &p(root, "data/graph.tsv"), "--seed", "1", "--out", &p(root, "split")]), 0);
    assert_eq!(
        peco(&[
            "cluster", "--graph", &p(root, "data/graph.tsv"), "--user-eps", "0.7", "--user-min-pts", "2",
            "--item-min-pts", "2", "--out", &p(root, "clusters"),
        ]),
        0
    );
    assert_eq!(
        peco(&[
            "sample", "--graph", &p(root, "data/graph.tsv"), "--clusters", &p(root, "clusters"), "--preset",
            "amazon-beauty", "--ensemble", "3", "--seed", "5", "--out", &p(root, "samples"),
        ]),
        0
    );
    assert_eq!(
        peco(&[
            "stats", "--graph", &p(root, "data/graph.tsv"), "--clusters", &p(root, "clusters"), "--samples",
            &p(root, "samples"), "--out", &p(root, "stats"),
        ]),
        0
    );
    assert_eq!(
        peco(&[
            "eval", "--truth", &p(root, "data/graph.tsv"), "--popularity-from", &p(root, "split/train.tsv"),
            "--k", "2", "--out", &p(root, "eval"),
        ]),
        0
    );
}

fn artifacts(root: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    for dir in ["data", "split", "clusters", "samples", "stats", "eval"] {
        let mut entries: Vec<PathBuf> = fs::read_dir(root.join(dir))
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.file_name().unwrap() != "manifest.json")
            .collect();
        entries.sort();
        for path in entries {
            let rel = path.strip_prefix(root).unwrap().to_path_buf();
            out.push((rel, fs::read(&path).unwrap()));
        }
    }
    out
}

#[test]
fn t1_pipeline_emits_reports() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    pipeline(root);

    let graph = fs::read_to_string(root.join("data/graph.tsv")).unwrap();
    assert!(graph.starts_with("# users=3 items=4\n0\t0\n0\t1\n"));
    let labels = fs::read_to_string(root.join("data/graph.labels.tsv")).unwrap();
    assert!(labels.contains("u\t0\tu1\n") && labels.contains("i\t3\ti4\n"));

    let summary = fs::read_to_string(root.join("stats/summary.txt")).unwrap();
    assert!(summary.contains("samples=3\n"));
    assert!(summary.contains("user_degrees_exact=true\n"));
    let csv = fs::read_to_string(root.join("stats/degree_report.csv")).unwrap();
    assert!(csv.starts_with("rank,item,original_degree,mean_degree,std_degree\n"));
    assert_eq!(csv.lines().count(), 5);

    let concurrence = fs::read_to_string(root.join("clusters/concurrence.tsv")).unwrap();
    assert_eq!(concurrence, "0\t1\t0.500000000\n1\t2\t0.333333333\n2\t3\t0.500000000\n");
    let metrics = fs::read_to_string(root.join("eval/metrics.txt")).unwrap();
    assert!(metrics.starts_with("recall@2="));
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    pipeline(a.path());
    pipeline(b.path());
    assert_eq!(artifacts(a.path()), artifacts(b.path()));
}

#[test]
fn tampered_artifacts_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    pipeline(root);
    let sample_args = |out: &str| {
        vec![
            "sample".to_owned(), "--graph".into(), p(root, "data/graph.tsv"), "--clusters".into(),
            p(root, "clusters"), "--out".into(), p(root, out),
        ]
    };
    let call = |args: Vec<String>| peco(&args.iter().map(String::as_str).collect::<Vec<_>>());

    let clusters = root.join("clusters/item_clusters.tsv");
    let original = fs::read_to_string(&clusters).unwrap();
    let merged = "0\t0\n1\t0\n2\t0\n3\t0\n";
    let split = "0\t0\n1\t1\n2\t2\n3\t3\n";
    fs::write(&clusters, if original == merged { split } else { merged }).unwrap();
    assert_eq!(call(sample_args("again")), 2);

    fs::write(root.join("data/graph.tsv"), "# users=3 items=4\n0\t0\n").unwrap();
    assert_eq!(
        peco(&["cluster", "--graph", &p(root, "data/graph.tsv"), "--out", &p(root, "c2")]),
        2
    );
}

#[test]
fn clusters_from_another_graph_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    pipeline(root);
    fs::write(root.join("other.tsv"), "a\tx\nb\tx\nb\ty\n").unwrap();
    assert_eq!(peco(&["ingest", "--input", &p(root, "other.tsv"), "--out", &p(root, "other")]), 0);
    let code = peco(&[
        "sample", "--graph", &p(root, "other/graph.tsv"), "--clusters", &p(root, "clusters"), "--out",
        &p(root, "s2"),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    pipeline(root);
    let base = ["sample", "--graph", &p(root, "data/graph.tsv"), "--clusters", &p(root, "clusters")];
    let with = |extra: &[&str]| {
        let mut args: Vec<&str> = base.to_vec();
        args.extend_from_slice(extra);
        peco(&args)
    };
    let out = p(root, "bad");
    assert_eq!(with(&["--retain", "1.5", "--out", &out]), 1);
    assert_eq!(with(&["--alpha=-1", "--out", &out]), 1);
    assert_eq!(with(&["--preset", "netflix", "--out", &out]), 1);
    assert_eq!(with(&["--ensemble", "0", "--out", &out]), 1);
    assert_eq!(peco(&["sample", "--bogus"]), 1);
    assert_eq!(peco(&["--help"]), 0);
    assert_eq!(peco(&["ingest", "--input", &p(root, "missing.tsv"), "--out", &out]), 2);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    pipeline(root);
    fs::write(root.join("run.conf"), "# sweep\npreset=yelp2018\nalpha=7\nensemble=2\n").unwrap();
    let code = peco(&[
        "--config", &p(root, "run.conf"), "sample", "--graph", &p(root, "data/graph.tsv"), "--clusters",
        &p(root, "clusters"), "--alpha", "3", "--out", &p(root, "cfg"),
    ]);
    assert_eq!(code, 0);
    let prov = peco::sampler::read_provenance(&root.join("cfg")).unwrap();
    assert_eq!((prov.config.alpha, prov.config.retain), (3.0, 0.5));
    assert_eq!(prov.samples.len(), 2);

    fs::write(root.join("bad.conf"), "colour=blue\n").unwrap();
    assert_eq!(peco(&["--config", &p(root, "bad.conf"), "sample", "--out", &p(root, "x")]), 1);
}

#[test]
fn node_copy_ensemble_runs_without_clusters() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    pipeline(root);
    let code = peco(&[
        "sample", "--graph", &p(root, "data/graph.tsv"), "--method", "node-copy", "--epsilon", "1",
        "--ensemble", "2", "--out", &p(root, "nc"),
    ]);
    assert_eq!(code, 0);
    let prov = peco::sampler::read_provenance(&root.join("nc")).unwrap();
    assert_eq!(prov.epsilon, Some(1.0));
    assert_eq!(peco(&["sample", "--graph", &p(root, "data/graph.tsv"), "--out", &p(root, "nc2")]), 1);
}
