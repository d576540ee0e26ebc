use std::sync::atomic::{AtomicUsize, Ordering};

use scfgmt::harness::{
    aggregate_report, read_log, run_experiment, Client, ClientError, EndpointConfig, EndpointMeta, ExperimentConfig,
    GroupBy, OracleMock, Profile, RunOptions, RunRecord, MISSING,
};
use scfgmt::metagrammar::{GrammarSpec, WordOrder};
use scfgmt::taxonomy::ErrorLabel;

fn config(lengths: Vec<usize>, n: usize) -> ExperimentConfig {
    ExperimentConfig {
        conditions: vec![
            GrammarSpec::new(57, WordOrder::Svo, WordOrder::Sov, 5),
            GrammarSpec::new(77, WordOrder::Svo, WordOrder::Ovs, 6),
        ],
        lengths,
        n_per_cell: n,
        endpoint: EndpointConfig {
            url: "mock://".into(),
            model: "mock".into(),
            profile: Profile::Simple,
            api_key_env: None,
            timeout_secs: 5,
            extra: Default::default(),
        },
        max_parallel: 3,
        retry: Default::default(),
        output_dir: "unused".into(),
        master_seed: 99,
        translation_cap: 1000,
    }
}

fn without_timing(mut r: RunRecord) -> RunRecord {
    r.timing.started_unix_ms = 0;
    r.timing.elapsed_ms = 0;
    r
}

#[test]
fn runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(vec![4, 9], 3);
    let mut logs = Vec::new();
    for name in ["a.jsonl", "b.jsonl"] {
        let path = dir.path().join(name);
        run_experiment(&cfg, &OracleMock::new(), &path, &RunOptions::default()).unwrap();
        logs.push(
            read_log(&path, false)
                .unwrap()
                .into_iter()
                .map(without_timing)
                .collect::<Vec<_>>(),
        );
    }
    assert_eq!(logs[0].len(), 12);
    assert_eq!(logs[0], logs[1]);
    let ids: Vec<&str> = logs[0].iter().map(|r| r.trial_id.as_str()).collect();
    assert_eq!(&ids[..3], ["c0-l4-r0", "c0-l4-r1", "c0-l4-r2"]);
    assert!(logs[0].iter().all(|r| r.labels.is_empty() && r.error.is_none()));
}

/// Fails with a 503 on every other call.
struct Flaky {
    calls: AtomicUsize,
    inner: OracleMock,
}

impl Client for Flaky {
    fn complete(&self, prompt: &str) -> Result<String, ClientError> {
        if self.calls.fetch_add(1, Ordering::SeqCst).is_multiple_of(2) {
            return Err(ClientError::Status {
                status: 503,
                body: "busy".into(),
            });
        }
        self.inner.complete(prompt)
    }

    fn meta(&self) -> EndpointMeta {
        self.inner.meta()
    }
}

struct Refuses;

impl Client for Refuses {
    fn complete(&self, _: &str) -> Result<String, ClientError> {
        Err(ClientError::Status {
            status: 400,
            body: "bad request".into(),
        })
    }

    fn meta(&self) -> EndpointMeta {
        EndpointMeta {
            kind: "mock".into(),
            url: None,
            model: "refuses".into(),
        }
    }
}

#[test]
fn transient_errors_are_retried() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(vec![5], 4);
    cfg.max_parallel = 1;
    let path = dir.path().join("flaky.jsonl");
    let client = Flaky {
        calls: AtomicUsize::new(0),
        inner: OracleMock::new(),
    };
    let summary = run_experiment(&cfg, &client, &path, &RunOptions::default()).unwrap();
    assert_eq!((summary.written, summary.failed), (8, 0));
    let recs = read_log(&path, false).unwrap();
    assert!(recs.iter().all(|r| r.timing.attempts == 2 && r.scores.exact == 1));
}

#[test]
fn permanent_errors_are_logged_as_failures() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(vec![5], 2);
    let path = dir.path().join("refused.jsonl");
    let summary = run_experiment(&cfg, &Refuses, &path, &RunOptions::default()).unwrap();
    assert_eq!((summary.written, summary.failed), (4, 4));
    for r in read_log(&path, false).unwrap() {
        assert_eq!(r.timing.attempts, 1);
        assert!(r.error.as_deref().unwrap().contains("400"));
        assert!(r.labels.contains(ErrorLabel::Unparseable));
        assert_eq!(r.scores.bleu, 0.0);
    }
    // nothing left to do on a rerun
    let again = run_experiment(&cfg, &Refuses, &path, &RunOptions::default()).unwrap();
    assert_eq!((again.skipped, again.written), (4, 0));
}

#[test]
fn reports_group_by_size_and_length() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(vec![4, 10], 2);
    let path = dir.path().join("r.jsonl");
    run_experiment(&cfg, &OracleMock::new(), &path, &RunOptions::default()).unwrap();
    let recs = read_log(&path, false).unwrap();

    let by_size = aggregate_report(&recs, &GroupBy::Size, 1);
    assert_eq!(by_size.columns, ["57", "77"]);
    assert_eq!(by_size.blocks.len(), 2);
    let text = by_size.to_text();
    assert!(text.contains("Exact Match") && text.contains(MISSING));

    let by_len = aggregate_report(&recs, &GroupBy::length_buckets(), 1);
    assert_eq!(by_len.columns, ["5.5", "10.5", "15.5", "20.5", "36.5"]);
    let csv = by_len.to_csv();
    let mut rdr = csv::Reader::from_reader(csv.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2 * 4 * 5);
    let filled: Vec<_> = rows.iter().filter(|r| !r[4].is_empty()).collect();
    assert_eq!(filled.len(), 2 * 4 * 2);
    assert!(filled.iter().all(|r| &r[4] == "1.000"));
}
