use std::collections::BTreeMap;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use crate::grammar::serialize_grammar;
use crate::lexicon::ScriptId;
use crate::metagrammar::generate;
use crate::metrics::{score, ScoreRecord};
use crate::oracle::{Sampler, Transducer};
use crate::seed::derive;
use crate::taxonomy::{Classifier, ErrorLabelSet};

use super::client::{Client, ClientError};
use super::config::ExperimentConfig;
use super::prompt::{extract_answer, render_prompt_text, sha256_hex};
use super::record::{completed_ids, read_log, trial_id, LogWriter, RunRecord, Timing, SCHEMA_VERSION};
use super::HarnessError;

/// One cell of the design: a condition, a length and a replicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trial {
    pub id: String,
    pub condition: usize,
    pub len: usize,
    pub replicate: usize,
    pub seed: u64,
}

/// Every trial of the config, in log order.
pub fn plan(cfg: &ExperimentConfig) -> Vec<Trial> {
    let mut out = Vec::with_capacity(cfg.trial_count());
    for condition in 0..cfg.conditions.len() {
        for &len in &cfg.lengths {
            for replicate in 0..cfg.n_per_cell {
                out.push(Trial {
                    id: trial_id(condition, len, replicate),
                    condition,
                    len,
                    replicate,
                    seed: derive(cfg.master_seed, &[condition as u64, len as u64, replicate as u64]),
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Stop after this many new records (used to simulate interruptions).
    pub limit: Option<usize>,
    /// Sleep between retries; off in tests.
    pub sleep_on_retry: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunSummary {
    pub planned: usize,
    pub skipped: usize,
    pub written: usize,
    pub failed: usize,
}

struct Condition {
    text: String,
    sampler: Sampler,
    transducer: Transducer,
    classifier: Classifier,
}

fn prepare_condition(cfg: &ExperimentConfig, idx: usize) -> Result<Condition, HarnessError> {
    let spec = &cfg.conditions[idx];
    let grammar = generate(spec)?;
    let max_len = cfg.lengths.iter().copied().max().unwrap_or(1);
    let target_script: ScriptId = spec.script_tgt;
    Ok(Condition {
        text: serialize_grammar(&grammar),
        sampler: Sampler::new(&grammar, max_len)?,
        transducer: Transducer::new(&grammar)?,
        classifier: Classifier::for_grammar(&grammar, target_script),
    })
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64)
}

/// Runs every trial not already in `log_path`, appending records in trial
/// order.
///
/// Up to `max_parallel` requests are in flight at once. Each worker samples
/// its pair, renders the prompt, queries the client with retries, and
/// scores the answer; a single writer puts the results in order.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    client: &dyn Client,
    log_path: &Path,
    opts: &RunOptions,
) -> Result<RunSummary, HarnessError> {
    cfg.validate()?;
    let done = completed_ids(&read_log(log_path, true)?);
    let all = plan(cfg);
    let mut pending: Vec<Trial> = all.iter().filter(|t| !done.contains(&t.id)).cloned().collect();
    if let Some(limit) = opts.limit {
        pending.truncate(limit);
    }
    let mut summary = RunSummary {
        planned: all.len(),
        skipped: all.len() - all.iter().filter(|t| !done.contains(&t.id)).count(),
        ..RunSummary::default()
    };
    if pending.is_empty() {
        return Ok(summary);
    }

    let mut conditions: BTreeMap<usize, Condition> = BTreeMap::new();
    for t in &pending {
        if let std::collections::btree_map::Entry::Vacant(e) = conditions.entry(t.condition) {
            e.insert(prepare_condition(cfg, t.condition)?);
        }
    }

    let mut writer = LogWriter::open(log_path)?;
    let next = AtomicUsize::new(0);
    let workers = cfg.max_parallel.min(pending.len());
    let (tx, rx) = mpsc::channel::<(usize, RunRecord)>();
    let result = std::thread::scope(|scope| -> Result<(), HarnessError> {
        for _ in 0..workers {
            let tx = tx.clone();
            let (next, pending, conditions) = (&next, &pending, &conditions);
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(trial) = pending.get(i) else {
                    break;
                };
                let record = run_trial(cfg, &conditions[&trial.condition], trial, client, opts);
                if tx.send((i, record)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        let mut buffer: BTreeMap<usize, RunRecord> = BTreeMap::new();
        let mut expected = 0;
        for (i, record) in rx {
            buffer.insert(i, record);
            while let Some(r) = buffer.remove(&expected) {
                writer.append(&r)?;
                summary.written += 1;
                if r.is_failure() {
                    summary.failed += 1;
                }
                expected += 1;
            }
        }
        Ok(())
    });
    result?;
    Ok(summary)
}

fn run_trial(
    cfg: &ExperimentConfig,
    cond: &Condition,
    trial: &Trial,
    client: &dyn Client,
    opts: &RunOptions,
) -> RunRecord {
    let started = Instant::now();
    let started_unix_ms = now_ms();
    let spec = cfg.conditions[trial.condition].clone();
    let meta = client.meta();
    let mut record = RunRecord {
        schema_version: SCHEMA_VERSION,
        trial_id: trial.id.clone(),
        condition: trial.condition,
        spec,
        len: trial.len,
        replicate: trial.replicate,
        seed: trial.seed,
        pair: None,
        golds: Vec::new(),
        golds_overflow: false,
        prompt: String::new(),
        prompt_sha256: String::new(),
        response: None,
        extracted: None,
        scores: ScoreRecord::ZERO,
        labels: ErrorLabelSet::unparseable(),
        error: None,
        timing: Timing {
            started_unix_ms,
            elapsed_ms: 0,
            attempts: 0,
        },
        endpoint: meta,
    };
    let finish = |mut r: RunRecord| {
        r.timing.elapsed_ms = started.elapsed().as_millis() as u64;
        r
    };

    let pair = match cond.sampler.sample(trial.len, trial.seed) {
        Ok(p) => p,
        Err(e) => {
            record.error = Some(format!("sampling: {e}"));
            return finish(record);
        }
    };
    match cond.transducer.translate(&pair.source, cfg.translation_cap) {
        Ok(t) => {
            record.golds = t.outputs;
            record.golds_overflow = t.overflow;
        }
        Err(e) => {
            record.error = Some(format!("translation: {e}"));
            record.pair = Some(pair);
            return finish(record);
        }
    }
    if !record.golds.contains(&pair.target) {
        record.golds.push(pair.target.clone());
    }
    record.prompt = render_prompt_text(&cond.text, &pair.source);
    record.prompt_sha256 = sha256_hex(&record.prompt);
    record.pair = Some(pair);

    let mut attempts = 0;
    let response = loop {
        attempts += 1;
        match client.complete(&record.prompt) {
            Ok(text) => break Ok(text),
            Err(e) if e.is_retryable() && attempts < cfg.retry.max_attempts => {
                if opts.sleep_on_retry {
                    std::thread::sleep(Duration::from_millis(cfg.retry.backoff_ms(attempts)));
                }
            }
            Err(e) => break Err::<String, ClientError>(e),
        }
    };
    record.timing.attempts = attempts;
    match response {
        Ok(text) => {
            record.extracted = extract_answer(&text);
            record.response = Some(text);
            if let Some(cand) = &record.extracted {
                record.scores = score(cand, &record.golds);
                record.labels = if record.scores.exact == 1 {
                    ErrorLabelSet::new()
                } else {
                    cond.classifier.classify(cand, &record.golds)
                };
            }
        }
        Err(e) => record.error = Some(format!("endpoint: {e}")),
    }
    finish(record)
}
