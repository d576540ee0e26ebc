//! End-to-end acceptance checks. Runs as a plain binary and prints one
//! PASS/FAIL line per criterion.

mod common;

use std::collections::{BTreeSet, HashSet};
use std::time::{Duration, Instant};

use scfgmt::demo;
use scfgmt::grammar::{Side, SyncGrammar};
use scfgmt::harness::{
    read_log, render_prompt, run_experiment, EchoMock, EndpointConfig, ExperimentConfig, OracleMock, Profile,
    RetryPolicy, RunOptions,
};
use scfgmt::lexicon::{script_of, transliterate, ScriptId};
use scfgmt::metagrammar::{generate, generate_with_manifest, GrammarSpec, WordOrder};
use scfgmt::metrics::{bleu, chrfpp, exact_match, BleuConfig, ChrfConfig};
use scfgmt::oracle::{Crediting, OracleError, Sampler, Transducer};
use scfgmt::seed::derive;
use scfgmt::taxonomy::{Classifier, ErrorLabel, ErrorLabelSet};
use serde::Deserialize;

use common::{brute_force_translations, words};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

fn demo_fidelity() -> Check {
    let t0 = Instant::now();
    let g = demo::english_japanese();
    let out = Transducer::new(&g)
        .unwrap()
        .translate(&words("I open the box"), 100)
        .map_err(|e| e.to_string())?;
    ensure(out.sentences() == ["watashi wa hako wo akemasu"], || {
        format!("got {:?}", out.sentences())
    })?;
    let em = exact_match(&words("watashi wa hako wo akemasu"), &out.outputs);
    ensure(em == 1, || "exact match is 0".into())?;
    within(t0.elapsed(), Duration::from_secs(1))?;
    Ok("translation set is exactly the expected sentence".into())
}

fn reference_fixed_point() -> Check {
    let t0 = Instant::now();
    let g = demo::reference_grammar();
    let input = words("sirlob rofxew livhuj");
    let prompt = render_prompt(&g, &input);
    let expected = include_str!("fixtures/reference_prompt.txt");
    if prompt != expected {
        let at = prompt.bytes().zip(expected.bytes()).take_while(|(a, b)| a == b).count();
        return Err(format!("prompt differs at byte {at}"));
    }
    let out = Transducer::new(&g)
        .unwrap()
        .translate(&input, 100)
        .map_err(|e| e.to_string())?;
    ensure(out.sentences() == ["vacfaq tuvrol zatpuj"], || {
        format!("got {:?}", out.sentences())
    })?;
    within(t0.elapsed(), Duration::from_secs(1))?;
    Ok(format!("prompt matches byte for byte ({} bytes)", prompt.len()))
}

fn size_exactness() -> Check {
    let t0 = Instant::now();
    for size in [57, 77, 117, 837, 4037] {
        let gen = generate_with_manifest(&GrammarSpec::new(size, WordOrder::Svo, WordOrder::Ovs, 11))
            .map_err(|e| format!("size {size}: {e}"))?;
        ensure(gen.grammar.size() == size, || {
            format!("asked {size}, got {}", gen.grammar.size())
        })?;
        if size == 57 {
            for class in ["V", "N", "PROPN", "ADJ"] {
                let n = gen.grammar.rules().iter().filter(|r| r.lhs() == class).count();
                ensure(n == 5, || format!("{class} has {n} rules"))?;
            }
        }
    }
    within(t0.elapsed(), Duration::from_secs(5))?;
    Ok(format!("all five sizes exact in {:?}", t0.elapsed()))
}

fn agreement_conditions() -> [(bool, bool); 4] {
    [(false, false), (false, true), (true, false), (true, true)]
}

fn oracle_soundness() -> Check {
    let t0 = Instant::now();
    let mut conditions = Vec::new();
    for src in WordOrder::ALL {
        for tgt in WordOrder::ALL {
            for (a, b) in agreement_conditions() {
                let spec = GrammarSpec::new(57, src, tgt, derive(4, &[conditions.len() as u64])).with_agreement(a, b);
                let spec = GrammarSpec {
                    size: spec.min_size(),
                    ..spec
                };
                let g = generate(&spec).map_err(|e| e.to_string())?;
                conditions.push((Sampler::new(&g, 20).unwrap(), Transducer::new(&g).unwrap(), g));
            }
        }
    }
    let mut failures = Vec::new();
    for i in 0..1000usize {
        let (sampler, tr, _) = &conditions[i % conditions.len()];
        let len = 3 + (i / conditions.len()) % 18;
        let pair = match sampler.sample(len, i as u64) {
            Ok(p) => p,
            Err(e) => {
                failures.push(format!("pair {i}: {e}"));
                continue;
            }
        };
        if !tr.is_valid_translation(&pair.source, &pair.target) {
            failures.push(format!("pair {i}: gold rejected"));
        }
        match tr.translate(&pair.source, 100_000) {
            Ok(t) if exact_match(&pair.target, &t.outputs) == 1 => {}
            Ok(_) => failures.push(format!("pair {i}: gold not among translations")),
            Err(e) => failures.push(format!("pair {i}: {e}")),
        }
    }
    ensure(failures.is_empty(), || {
        format!("{} failures, first: {}", failures.len(), failures[0])
    })?;
    within(t0.elapsed(), Duration::from_secs(120))?;
    Ok(format!("1000 pairs over 36 conditions in {:?}", t0.elapsed()))
}

fn brute_force_equivalence() -> Check {
    let t0 = Instant::now();
    let mut checked = 0;
    for k in 0..50u64 {
        let src = WordOrder::ALL[(k % 3) as usize];
        let tgt = WordOrder::ALL[(k / 3 % 3) as usize];
        let g = generate(&GrammarSpec::new(57, src, tgt, 1000 + k)).map_err(|e| e.to_string())?;
        let tr = Transducer::new(&g).unwrap();
        let sampler = Sampler::new(&g, 8).unwrap();
        let lengths: Vec<usize> = sampler.achievable_lengths();
        for (j, &len) in lengths.iter().enumerate() {
            let pair = sampler.sample(len, derive(k, &[j as u64])).unwrap();
            let mut inputs = vec![pair.source.clone()];
            // a scrambled copy, usually outside the language
            let mut rev = pair.source.clone();
            rev.reverse();
            inputs.push(rev);
            for s in inputs {
                let sw: Vec<&str> = s.iter().map(String::as_str).collect();
                let brute = brute_force_translations(g.rules(), &sw);
                let fast: BTreeSet<Vec<String>> = match tr.translate(&sw, usize::MAX) {
                    Ok(t) => t.outputs.into_iter().collect(),
                    Err(OracleError::NotInLanguage) => BTreeSet::new(),
                    Err(e) => return Err(e.to_string()),
                };
                ensure(brute == fast, || {
                    format!("grammar {k}, input {s:?}: {brute:?} vs {fast:?}")
                })?;
                checked += 1;
            }
        }
    }
    within(t0.elapsed(), Duration::from_secs(300))?;
    Ok(format!("{checked} inputs over 50 grammars agree"))
}

#[derive(Deserialize)]
struct Fixture {
    reference: String,
    cases: Vec<MetricCase>,
}

#[derive(Deserialize)]
struct MetricCase {
    hyp: String,
    #[serde(rename = "ref")]
    reference: String,
    bleu: f64,
    chrfpp: f64,
}

fn metric_conformance() -> Check {
    let fx: Fixture = serde_json::from_str(include_str!("fixtures/metric_fixtures.json")).map_err(|e| e.to_string())?;
    ensure(fx.cases.len() >= 200, || format!("only {} fixtures", fx.cases.len()))?;
    let (bc, cc) = (BleuConfig::default(), ChrfConfig::default());
    let mut worst: f64 = 0.0;
    for c in &fx.cases {
        let (h, r) = (words(&c.hyp), words(&c.reference));
        worst = worst.max((bleu(&h, &r, &bc) - c.bleu).abs());
        worst = worst.max((chrfpp(&h, &r, &cc) - c.chrfpp).abs());
    }
    ensure(worst <= 1e-4, || format!("max deviation {worst:e}"))?;
    Ok(format!(
        "{} cases against {}, max deviation {worst:.1e}",
        fx.cases.len(),
        fx.reference
    ))
}

fn is_point(c: char) -> bool {
    ('\u{05B0}'..='\u{05C7}').contains(&c)
}

/// 100 target sentences from a NoAgr grammar written in `script`, each word
/// paired with its Latin skeleton.
fn script_sentences(script: ScriptId) -> Result<Vec<Vec<(String, String)>>, String> {
    let spec = GrammarSpec::new(57, WordOrder::Svo, WordOrder::Sov, 77).with_scripts(ScriptId::Latin, script);
    let g = generate(&spec).map_err(|e| e.to_string())?;
    let twin = generate(&spec.clone().with_scripts(ScriptId::Latin, ScriptId::Latin)).map_err(|e| e.to_string())?;
    let mut skeleton = std::collections::HashMap::new();
    for (r, t) in g.rules().iter().zip(twin.rules()) {
        for (w, s) in r.words(Side::Target).into_iter().zip(t.words(Side::Target)) {
            skeleton.insert(w.to_string(), s.to_string());
        }
    }
    // the twin must share skeletons with the scripted grammar
    for (w, s) in &skeleton {
        let rendered = transliterate(s, script).map_err(|e| e.to_string())?.rendered;
        ensure(&rendered == w, || format!("{w:?} is not the {script} form of {s:?}"))?;
    }
    let sampler = Sampler::new(&g, 20).unwrap();
    (0..100u64)
        .map(|i| {
            let pair = sampler.sample(3 + (i as usize % 18), i).map_err(|e| e.to_string())?;
            Ok(pair.target.iter().map(|w| (w.clone(), skeleton[w].clone())).collect())
        })
        .collect()
}

fn script_validity() -> Check {
    let mut violations = Vec::new();
    for (w, skel) in script_sentences(ScriptId::HebrewPointed)?.into_iter().flatten() {
        let vowels = skel.chars().filter(|c| "aeiou".contains(*c)).count();
        let points = w.chars().filter(|&c| is_point(c)).count();
        if points < vowels {
            violations.push(format!("pointed {w:?}: {points} points for {vowels} vowels"));
        }
    }
    for (w, _) in script_sentences(ScriptId::Hebrew)?.into_iter().flatten() {
        if w.chars().any(is_point) {
            violations.push(format!("unpointed {w:?} has points"));
        }
    }
    for sent in script_sentences(ScriptId::Cyrillic)? {
        let line: Vec<&str> = sent.iter().map(|(w, _)| w.as_str()).collect();
        let line = line.join(" ");
        if !line.chars().all(|c| c == ' ' || ('\u{0400}'..='\u{04FF}').contains(&c)) {
            violations.push(format!("cyrillic {line:?}"));
        }
    }
    let mixtures = ["latинь", "רוfx", "шלום", "abcש", "d\u{05B0}x", "а\u{0301}б"];
    for m in mixtures {
        if !script_of(m).is_empty() {
            violations.push(format!("mixture {m:?} detected as {:?}", script_of(m)));
        }
    }
    ensure(violations.is_empty(), || {
        format!("{} violations, first: {}", violations.len(), violations[0])
    })?;
    Ok("300 sentences and 6 mixtures clean".into())
}

struct PerturbCase {
    source: Vec<String>,
    target: Vec<String>,
    golds: Vec<Vec<String>>,
}

fn perturbation_cases(script: ScriptId) -> Result<(SyncGrammar, Vec<PerturbCase>), String> {
    let spec = GrammarSpec::new(57, WordOrder::Svo, WordOrder::Ovs, 808).with_scripts(ScriptId::Latin, script);
    let g = generate(&spec).map_err(|e| e.to_string())?;
    let sampler = Sampler::new(&g, 20).unwrap();
    let tr = Transducer::new(&g).unwrap();
    let mut out = Vec::new();
    let mut seed = 0u64;
    while out.len() < 100 {
        seed += 1;
        let pair = sampler
            .sample(4 + (seed as usize % 15), seed)
            .map_err(|e| e.to_string())?;
        let golds = tr.translate(&pair.source, 1000).map_err(|e| e.to_string())?.outputs;
        // labels are defined against the nearest gold, so keep cases where it
        // is the only one
        if golds.len() == 1 {
            out.push(PerturbCase {
                source: pair.source,
                target: pair.target,
                golds,
            });
        }
    }
    Ok((g, out))
}

fn perturbation_suite() -> Check {
    let (g, cases) = perturbation_cases(ScriptId::Latin)?;
    let clf = Classifier::for_grammar(&g, ScriptId::Latin);
    let tgt_vocab: Vec<String> = g.words(Side::Target).into_iter().collect();
    let expect = |name: &str, got: &ErrorLabelSet, want: &[ErrorLabel]| -> Result<(), String> {
        ensure(want.iter().all(|l| got.contains(*l)), || {
            format!("{name}: expected {want:?}, got {:?}", got.iter().collect::<Vec<_>>())
        })
    };
    let mut built = [0usize; 5];
    for (i, c) in cases.iter().enumerate() {
        // transpose the first adjacent pair of distinct words
        if let Some(j) = (0..c.target.len() - 1).find(|&j| c.target[j] != c.target[j + 1]) {
            let mut cand = c.target.clone();
            cand.swap(j, j + 1);
            expect("transpose", &clf.classify(&cand, &c.golds), &[ErrorLabel::WordOrder])?;
            built[0] += 1;
        }
        // swap in a target word the gold does not use
        let fresh = tgt_vocab
            .iter()
            .cycle()
            .skip(i)
            .find(|w| !c.target.contains(w))
            .unwrap();
        let mut cand = c.target.clone();
        cand[i % c.target.len()] = fresh.clone();
        expect(
            "substitution",
            &clf.classify(&cand, &c.golds),
            &[ErrorLabel::Recall, ErrorLabel::Omission],
        )?;
        built[1] += 1;

        let mut cand = c.target.clone();
        cand.insert(i % (c.target.len() + 1), format!("qxq{}zz", i));
        expect(
            "injection",
            &clf.classify(&cand, &c.golds),
            &[ErrorLabel::Hallucination],
        )?;
        built[2] += 1;

        expect(
            "source copy",
            &clf.classify(&c.source, &c.golds),
            &[ErrorLabel::SourceVocab, ErrorLabel::Omission],
        )?;
        built[3] += 1;
    }

    let (g, cases) = perturbation_cases(ScriptId::LatinDiacritics)?;
    let clf = Classifier::for_grammar(&g, ScriptId::LatinDiacritics);
    for c in &cases {
        let stripped: Vec<String> = c
            .target
            .iter()
            .map(|w| w.chars().filter(|ch| !('\u{0300}'..='\u{036F}').contains(ch)).collect())
            .collect();
        ensure(stripped != c.target, || "stripping changed nothing".into())?;
        expect(
            "stripping",
            &clf.classify(&stripped, &c.golds),
            &[ErrorLabel::Orthography],
        )?;
        built[4] += 1;
    }
    ensure(built.iter().all(|&n| n == 100), || format!("built {built:?} instances"))?;
    Ok("5 perturbations x 100 instances labeled as expected".into())
}

fn mock_config(dir: &std::path::Path) -> ExperimentConfig {
    let conditions = vec![
        GrammarSpec::new(57, WordOrder::Svo, WordOrder::Ovs, 1),
        GrammarSpec::new(57, WordOrder::Sov, WordOrder::Svo, 2),
        GrammarSpec::new(57, WordOrder::Ovs, WordOrder::Sov, 3).with_agreement(false, true),
    ];
    let conditions = conditions
        .into_iter()
        .map(|s| GrammarSpec {
            size: s.min_size().max(57),
            ..s
        })
        .collect();
    ExperimentConfig {
        conditions,
        lengths: vec![5, 10, 15],
        n_per_cell: 10,
        endpoint: EndpointConfig {
            url: "mock://".into(),
            model: "mock".into(),
            profile: Profile::Simple,
            api_key_env: None,
            timeout_secs: 10,
            extra: Default::default(),
        },
        max_parallel: 4,
        retry: RetryPolicy::default(),
        output_dir: dir.to_path_buf(),
        master_seed: 2024,
        translation_cap: 10_000,
    }
}

fn mock_runs() -> Check {
    let t0 = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = mock_config(dir.path());
    let opts = RunOptions::default();

    let oracle_log = dir.path().join("oracle.jsonl");
    run_experiment(&cfg, &OracleMock::new(), &oracle_log, &opts).map_err(|e| e.to_string())?;
    let recs = read_log(&oracle_log, false).map_err(|e| e.to_string())?;
    ensure(recs.len() == 90, || format!("oracle log has {} records", recs.len()))?;
    ensure(recs.iter().all(|r| r.scores.exact == 1), || {
        "oracle mock missed a gold".into()
    })?;

    let echo_log = dir.path().join("echo.jsonl");
    run_experiment(&cfg, &EchoMock, &echo_log, &opts).map_err(|e| e.to_string())?;
    let recs = read_log(&echo_log, false).map_err(|e| e.to_string())?;
    ensure(recs.len() == 90, || format!("echo log has {} records", recs.len()))?;
    let tagged = recs
        .iter()
        .filter(|r| r.labels.contains(ErrorLabel::SourceVocab))
        .count();
    ensure(tagged == 90, || {
        format!("{tagged}/90 echo answers labeled source_vocab")
    })?;

    // interrupt after 40 trials, leaving half a record behind
    let resume_log = dir.path().join("resume.jsonl");
    let partial = RunOptions {
        limit: Some(40),
        ..RunOptions::default()
    };
    run_experiment(&cfg, &OracleMock::new(), &resume_log, &partial).map_err(|e| e.to_string())?;
    let mut text = std::fs::read_to_string(&resume_log).map_err(|e| e.to_string())?;
    text.push_str("{\"schema_version\":1,\"trial_id\":\"c2-l");
    std::fs::write(&resume_log, text).map_err(|e| e.to_string())?;
    let summary = run_experiment(&cfg, &OracleMock::new(), &resume_log, &opts).map_err(|e| e.to_string())?;
    let recs = read_log(&resume_log, false).map_err(|e| e.to_string())?;
    let ids: HashSet<&str> = recs.iter().map(|r| r.trial_id.as_str()).collect();
    ensure(summary.skipped == 40 && summary.written == 50, || {
        format!("resume summary {summary:?}")
    })?;
    ensure(recs.len() == 90 && ids.len() == 90, || {
        format!("{} records, {} distinct", recs.len(), ids.len())
    })?;
    within(t0.elapsed(), Duration::from_secs(60))?;
    Ok(format!(
        "oracle 90/90 exact, echo 90/90 source_vocab, resume 90 distinct in {:?}",
        t0.elapsed()
    ))
}

fn agreement_crediting() -> Check {
    let g = demo::agreement_fragment(false, true);
    let tr = Transducer::new(&g).unwrap();
    let input = words("sa lam");
    for cand in ["su torik", "su toret", "su toro", "su toron"] {
        ensure(tr.is_valid_translation(&input, &words(cand)), || {
            format!("{cand:?} rejected")
        })?;
    }
    let strict = Transducer::with_crediting(&g, Crediting::Strict).unwrap();
    let only = strict.translate(&input, 10).map_err(|e| e.to_string())?.sentences();
    ensure(only == ["su toro"], || format!("strict mode gave {only:?}"))?;
    Ok("all four feature variants accepted".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("demo fidelity", demo_fidelity),
        ("reference grammar fixed point", reference_fixed_point),
        ("size exactness", size_exactness),
        ("oracle soundness", oracle_soundness),
        ("brute-force equivalence", brute_force_equivalence),
        ("metric conformance", metric_conformance),
        ("script validity", script_validity),
        ("classifier perturbations", perturbation_suite),
        ("end-to-end mock runs", mock_runs),
        ("agreement crediting", agreement_crediting),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
