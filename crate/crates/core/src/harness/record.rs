use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::metagrammar::GrammarSpec;
use crate::metrics::ScoreRecord;
use crate::oracle::SentencePair;
use crate::taxonomy::ErrorLabelSet;

use super::client::EndpointMeta;
use super::HarnessError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub started_unix_ms: u64,
    pub elapsed_ms: u64,
    pub attempts: u32,
}

/// One trial: what was asked, what came back, and how it scored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub trial_id: String,
    pub condition: usize,
    pub spec: GrammarSpec,
    pub len: usize,
    pub replicate: usize,
    pub seed: u64,
    /// Missing only when no sentence of the requested length exists.
    pub pair: Option<SentencePair>,
    /// Every translation the grammar licenses for the source.
    pub golds: Vec<Vec<String>>,
    pub golds_overflow: bool,
    pub prompt: String,
    pub prompt_sha256: String,
    pub response: Option<String>,
    /// Present iff an answer could be extracted.
    pub extracted: Option<Vec<String>>,
    pub scores: ScoreRecord,
    pub labels: ErrorLabelSet,
    pub error: Option<String>,
    pub timing: Timing,
    pub endpoint: EndpointMeta,
}

impl RunRecord {
    pub fn is_failure(&self) -> bool {
        self.error.is_some()
    }
}

/// `c{condition}-l{len}-r{replicate}`
pub fn trial_id(condition: usize, len: usize, replicate: usize) -> String {
    format!("c{condition}-l{len}-r{replicate}")
}

/// Short description of a condition, e.g. `SVO → OVS`.
pub fn condition_label(spec: &GrammarSpec) -> String {
    let mut s = format!("{} → {}", spec.word_order_src, spec.word_order_tgt);
    match (spec.agreement_src, spec.agreement_tgt) {
        (false, false) => {}
        (a, b) => s.push_str(&format!(
            " {}→{}",
            if a { "Agr" } else { "NoAgr" },
            if b { "Agr" } else { "NoAgr" }
        )),
    }
    if spec.script_src != crate::lexicon::ScriptId::Latin || spec.script_tgt != crate::lexicon::ScriptId::Latin {
        s.push_str(&format!(" {}→{}", spec.script_src, spec.script_tgt));
    }
    s
}

/// Reads a JSONL log.
///
/// A trailing line without a newline is what an interrupted write leaves
/// behind; it is dropped, and with `repair` the file is truncated to the
/// last complete record.
pub fn read_log(path: &Path, repair: bool) -> Result<Vec<RunRecord>, HarnessError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    let mut reader = BufReader::new(file);
    let mut records = Vec::new();
    let mut good_bytes = 0u64;
    let mut line = String::new();
    let mut line_no = 0;
    loop {
        line.clear();
        let n = reader.read_line(&mut line)?;
        if n == 0 {
            break;
        }
        line_no += 1;
        if !line.ends_with('\n') {
            break;
        }
        match serde_json::from_str::<RunRecord>(line.trim_end()) {
            Ok(r) => records.push(r),
            Err(e) => {
                return Err(HarnessError::Log(format!("{}: line {line_no}: {e}", path.display())));
            }
        }
        good_bytes += n as u64;
    }
    if repair {
        let f = OpenOptions::new().write(true).open(path)?;
        if f.metadata()?.len() > good_bytes {
            f.set_len(good_bytes)?;
        }
    }
    Ok(records)
}

pub fn completed_ids(records: &[RunRecord]) -> HashSet<String> {
    records.iter().map(|r| r.trial_id.clone()).collect()
}

/// Append-only JSONL writer that flushes after every record.
pub struct LogWriter {
    file: File,
}

impl LogWriter {
    pub fn open(path: &Path) -> Result<LogWriter, HarnessError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let mut file = OpenOptions::new().create(true).append(true).open(path)?;
        file.seek(SeekFrom::End(0))?;
        Ok(LogWriter { file })
    }

    pub fn append(&mut self, record: &RunRecord) -> Result<(), HarnessError> {
        let mut line = serde_json::to_string(record).map_err(|e| HarnessError::Log(e.to_string()))?;
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        self.file.flush()?;
        Ok(())
    }
}
