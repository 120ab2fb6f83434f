//! Subcommand implementations.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use adtext_core::aggregate::{self, AdAttributes, Dim, FeatureRecord, GroupSpec};
use adtext_core::corpus::{self, IngestOptions, JobAdRecord};
use adtext_core::embed_store::{self, EmbeddingMatrix};
use adtext_core::firm_match::{self, EstablishmentIndex};
use adtext_core::job_tag::{self, Predictions, TagClass};
use adtext_core::knowledge_map::{self, DictionarySchema, ExclusionList};
use adtext_core::stage_pipeline::{
    self, ExternalLabels, KeywordFilter, LabelIndex, PipelineConfig, RetainedRecord, ScoreHistogram, SentenceFilter,
    TaskName,
};
use adtext_core::title_match::{self, HierarchyMaps, TitleIndex, TitleResult};
use adtext_core::validate::{self, BinTable, SimulationInputs};
use adtext_core::wage_extract;
use anyhow::{anyhow, bail, Context};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{MatchConfig, RunConfig, OUT_DIR_ENV};
use crate::output::Run;
use crate::{Cli, Command, Extractor, KappaArgs, SampleArgs, SimulateArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Clean,
    Partial,
}

impl Status {
    fn and(self, other: Status) -> Status {
        if self == Status::Partial || other == Status::Partial {
            Status::Partial
        } else {
            Status::Clean
        }
    }

    fn from_partial(partial: bool) -> Status {
        if partial {
            Status::Partial
        } else {
            Status::Clean
        }
    }
}

struct Ctx {
    cfg: RunConfig,
    snapshot: Value,
    strict: bool,
}

fn load_ctx(cli: &Cli) -> anyhow::Result<Ctx> {
    let path = cli.config.as_ref().ok_or_else(|| anyhow!("--config is required for this command"))?;
    if !path.exists() {
        bail!("config file not found: {}", path.display());
    }
    let mut cfg = RunConfig::load(path)?;
    cfg.validate()?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let snapshot = serde_json::to_value(&cfg)?;
    Ok(Ctx { strict: cli.strict || cfg.corpus.strict, cfg, snapshot })
}

fn out_dir(cli: &Cli) -> anyhow::Result<PathBuf> {
    if let Some(p) = &cli.config {
        if p.exists() {
            return Ok(RunConfig::load(p)?.output_dir);
        }
        bail!("config file not found: {}", p.display());
    }
    Ok(std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out")))
}

pub fn dispatch(cli: &Cli) -> anyhow::Result<Status> {
    match &cli.command {
        Command::Ingest => ingest(&load_ctx(cli)?),
        Command::Extract { what } => extract(&load_ctx(cli)?, *what),
        Command::Aggregate => aggregate_cmd(&load_ctx(cli)?),
        Command::Simulate(args) => simulate(cli, args),
        Command::Kappa(args) => kappa(cli, args),
        Command::Sample(args) => sample(cli, args),
        Command::All => all(cli),
    }
}

fn all(cli: &Cli) -> anyhow::Result<Status> {
    let ctx = load_ctx(cli)?;
    let mut status = ingest(&ctx)?;
    let c = &ctx.cfg;
    let steps = [
        (c.skills.is_some(), Extractor::Skills),
        (c.tasks.is_some(), Extractor::Tasks),
        (c.titles.is_some(), Extractor::Titles),
        (c.firms.is_some(), Extractor::Firms),
        (c.wages.is_some(), Extractor::Wages),
        (c.tags.is_some(), Extractor::Tags),
        (!c.dictionaries.is_empty(), Extractor::Dict),
    ];
    for (enabled, what) in steps {
        if enabled {
            status = status.and(extract(&ctx, what)?);
        }
    }
    status = status.and(aggregate_cmd(&ctx)?);
    if ctx.cfg.validation.is_some() {
        status = status.and(simulate(cli, &SimulateArgs::default())?);
    }
    Ok(status)
}

fn load_corpus(ctx: &Ctx, run: &mut Run, report_rejects: bool) -> anyhow::Result<Vec<JobAdRecord>> {
    let mut records = Vec::new();
    let options = IngestOptions { strict: ctx.strict };
    for p in &ctx.cfg.corpus.paths {
        run.input(p);
        let outcome = corpus::ingest_path(p, options).with_context(|| format!("ingesting {}", p.display()))?;
        if report_rejects {
            for r in &outcome.rejected {
                run.error("ingest", r.id.as_deref(), format!("{}:{}: {}", p.display(), r.line, r.reason));
            }
        }
        records.extend(outcome.records);
    }
    records.sort_by(|a, b| a.id.cmp(&b.id));
    let dups: BTreeSet<String> = records.windows(2).filter(|w| w[0].id == w[1].id).map(|w| w[0].id.clone()).collect();
    if !dups.is_empty() {
        return Err(adtext_core::Error::DuplicateIds(dups.into_iter().collect()).into());
    }
    Ok(records)
}

#[derive(Serialize)]
struct SentenceRow<'a> {
    id: String,
    ad_id: &'a str,
    sentence_idx: usize,
    text: &'a str,
}

#[derive(Serialize)]
struct ReadabilityRow<'a> {
    ad_id: &'a str,
    words: usize,
    sentences: usize,
    syllables: usize,
    flesch_reading_ease: Option<f64>,
}

fn ingest(ctx: &Ctx) -> anyhow::Result<Status> {
    let mut run = Run::new("ingest", &ctx.cfg.output_dir)?;
    let records = load_corpus(ctx, &mut run, true)?;
    run.write_jsonl("records.jsonl", &records)?;

    let sentences: Vec<Vec<corpus::Sentence>> = records.par_iter().map(|r| corpus::sentences(&r.id, &r.body)).collect();
    run.write_jsonl(
        "sentences.jsonl",
        sentences.iter().flatten().map(|s| SentenceRow {
            id: s.key(),
            ad_id: &s.ad_id,
            sentence_idx: s.index,
            text: &s.text,
        }),
    )?;

    let readability: Vec<ReadabilityRow> = records
        .par_iter()
        .map(|r| {
            let c = corpus::readability_counts(&r.body);
            ReadabilityRow {
                ad_id: &r.id,
                words: c.words,
                sentences: c.sentences,
                syllables: c.syllables,
                flesch_reading_ease: corpus::flesch_reading_ease(&r.body).ok(),
            }
        })
        .collect();
    run.write_jsonl("readability.jsonl", &readability)?;

    let rejected = run.error_count();
    run.write_json(
        "ingest_report.json",
        &json!({
            "records": records.len(),
            "sentences": sentences.iter().map(Vec::len).sum::<usize>(),
            "rejected": rejected,
        }),
    )?;
    Ok(Status::from_partial(run.finish(&ctx.snapshot)?))
}

fn extract(ctx: &Ctx, what: Extractor) -> anyhow::Result<Status> {
    match what {
        Extractor::Skills => {
            let m = ctx.cfg.skills.as_ref().ok_or_else(|| anyhow!("config has no [skills] section"))?;
            extract_matches(ctx, m, TaskName::Skill, "skills")
        }
        Extractor::Tasks => {
            let m = ctx.cfg.tasks.as_ref().ok_or_else(|| anyhow!("config has no [tasks] section"))?;
            extract_matches(ctx, m, TaskName::Task, "tasks")
        }
        Extractor::Titles => extract_titles(ctx),
        Extractor::Firms => extract_firms(ctx),
        Extractor::Wages => extract_wages(ctx),
        Extractor::Tags => extract_tags(ctx),
        Extractor::Dict => extract_dict(ctx),
    }
}

fn load_matrix(run: &mut Run, p: &Path) -> anyhow::Result<EmbeddingMatrix> {
    run.input(p);
    embed_store::load_vectors(p).with_context(|| format!("loading {}", p.display()))
}

fn extract_matches(ctx: &Ctx, m: &MatchConfig, task: TaskName, name: &str) -> anyhow::Result<Status> {
    let mut run = Run::new(&format!("extract_{name}"), &ctx.cfg.output_dir)?;
    let ads = load_corpus(ctx, &mut run, false)?;
    let mut labels = load_matrix(&mut run, &m.label_vectors)?;
    run.input(&m.label_sets);
    let mut sets = embed_store::load_sidecar(&m.label_sets)?;
    if let Some(cp) = &m.augment_candidates {
        let cands = load_matrix(&mut run, cp)?;
        sets = embed_store::augment(&sets, &labels, &cands, m.augment_threshold)?;
        labels = labels.concat(&cands)?;
    }
    let sentences = load_matrix(&mut run, &m.sentence_vectors)?;
    let filter: Box<dyn SentenceFilter> = match (&m.external_labels, &m.filter) {
        (Some(p), _) => {
            run.input(p);
            Box::new(ExternalLabels::load(p)?)
        }
        (None, Some(p)) => {
            run.input(p);
            Box::new(KeywordFilter::load(p)?)
        }
        (None, None) => bail!("{name}: no sentence filter configured"),
    };
    let mut config = PipelineConfig::new(task);
    if let Some(t) = m.threshold {
        config.threshold = t;
    }
    config.keep_below_threshold = m.keep_below_threshold;
    config.label_mode = m.label_mode;
    let index = LabelIndex::new(&sets, labels, m.label_mode)?;
    let out = stage_pipeline::run_pipeline(&ads, filter.as_ref(), &config, &index, &sentences)?;

    run.write_jsonl(&format!("{name}.jsonl"), out.retained().map(RetainedRecord::from))?;
    if config.keep_below_threshold {
        run.write_jsonl(&format!("{name}_scored.jsonl"), &out.results)?;
    }
    if !sets.is_empty() {
        run.write_json(&format!("{name}_label_sets.json"), &sets)?;
    }
    let hist: Vec<Value> = out
        .stats
        .histogram
        .bins
        .iter()
        .enumerate()
        .map(|(i, n)| json!({"bin": ScoreHistogram::bin_label(i), "count": n}))
        .collect();
    run.write_json(
        &format!("{name}_stats.json"),
        &json!({
            "filter": {"name": filter.name(), "version": filter.version()},
            "threshold": config.threshold,
            "label_mode": config.label_mode,
            "stats": out.stats,
            "histogram": {"below_0.80": out.stats.histogram.underflow, "bins": hist},
        }),
    )?;
    for d in &out.diagnostics {
        run.error(name, Some(&d.ad_id), format!("sentence {}: {}", d.sentence_idx, d.message));
    }
    Ok(Status::from_partial(run.finish(&ctx.snapshot)?))
}

fn extract_titles(ctx: &Ctx) -> anyhow::Result<Status> {
    let t = ctx.cfg.titles.as_ref().ok_or_else(|| anyhow!("config has no [titles] section"))?;
    let mut run = Run::new("extract_titles", &ctx.cfg.output_dir)?;
    let ads = load_corpus(ctx, &mut run, false)?;
    run.input(&t.references);
    let refs = t.reference_vectors.as_deref().map(|p| load_matrix(&mut run, p)).transpose()?;
    let f = std::fs::File::open(&t.references).with_context(|| format!("opening {}", t.references.display()))?;
    let index = TitleIndex::new(TitleIndex::read_references(f)?, refs)?;
    let queries = t.query_vectors.as_deref().map(|p| load_matrix(&mut run, p)).transpose()?;
    let maps = match (&t.hierarchy_base, &t.hierarchy_stepper) {
        (Some(b), Some(s)) => {
            run.input(b);
            run.input(s);
            HierarchyMaps::load(b, s)?
        }
        (None, None) => HierarchyMaps::default_maps(),
        _ => bail!("titles: set both hierarchy_base and hierarchy_stepper, or neither"),
    };
    let features = match &t.features {
        Some(p) => {
            run.input(p);
            let (entries, _) = knowledge_map::load_dictionary(p, DictionarySchema::Generic)?;
            Some(knowledge_map::compile(entries, Vec::new())?)
        }
        None => None,
    };

    let results: Vec<Result<TitleResult, String>> = ads
        .par_iter()
        .map(|ad| {
            let q = queries.as_ref().and_then(|m| m.get(&ad.id));
            let coded = title_match::code_title(&ad.title, q, &index).map_err(|e| e.to_string())?;
            Ok(TitleResult {
                ad_id: ad.id.clone(),
                soc_code: coded.code.soc_code,
                onet_code: coded.code.onet_code,
                match_kind: coded.match_kind,
                nn_score: coded.nn_score,
                hierarchy: maps.hierarchy(&ad.title),
                features: features
                    .as_ref()
                    .map(|fm| title_match::title_features(&ad.title, fm).into_iter().collect())
                    .unwrap_or_default(),
                candidates: coded.candidates.into_iter().map(|c| c.onet_code).collect(),
            })
        })
        .collect();
    let mut rows = Vec::new();
    for (ad, r) in ads.iter().zip(results) {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => run.error("titles", Some(&ad.id), e),
        }
    }
    run.write_jsonl("titles.jsonl", &rows)?;
    Ok(Status::from_partial(run.finish(&ctx.snapshot)?))
}

fn read_jsonl_values(path: &Path) -> anyhow::Result<Vec<Value>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).with_context(|| format!("{}:{}", path.display(), i + 1)))
        .collect()
}

fn extract_firms(ctx: &Ctx) -> anyhow::Result<Status> {
    let f = ctx.cfg.firms.as_ref().ok_or_else(|| anyhow!("config has no [firms] section"))?;
    let mut run = Run::new("extract_firms", &ctx.cfg.output_dir)?;
    let ads = load_corpus(ctx, &mut run, false)?;
    run.input(&f.establishments);
    let index = EstablishmentIndex::load(&f.establishments)?;
    let mut spans: HashMap<String, String> = HashMap::new();
    if let Some(p) = &f.spans {
        run.input(p);
        for v in read_jsonl_values(p)? {
            if let (Some(id), Some(name)) = (v["ad_id"].as_str(), v["firm_name"].as_str()) {
                spans.entry(id.to_string()).or_insert_with(|| name.to_string());
            }
        }
    }
    let results: Vec<_> = ads
        .par_iter()
        .filter_map(|ad| {
            let name = ad.firm_name_meta.clone().or_else(|| spans.get(&ad.id).cloned())?;
            Some(firm_match::cascade_match(&ad.id, &name, ad.zip.as_deref(), ad.state.as_deref(), &index, f.accept))
        })
        .collect();
    let matched = results.iter().filter(|r| r.est_id.is_some()).count();
    run.write_jsonl("firms.jsonl", &results)?;
    run.write_json(
        "firms_report.json",
        &json!({"ads": ads.len(), "with_name": results.len(), "matched": matched, "accept": f.accept}),
    )?;
    Ok(Status::from_partial(run.finish(&ctx.snapshot)?))
}

fn extract_wages(ctx: &Ctx) -> anyhow::Result<Status> {
    let w = ctx.cfg.wages.clone().unwrap_or_default();
    let mut run = Run::new("extract_wages", &ctx.cfg.output_dir)?;
    let ads = load_corpus(ctx, &mut run, false)?;
    let overrides = match &w.overrides {
        Some(p) => {
            run.input(p);
            wage_extract::load_overrides(p)?
        }
        None => HashMap::new(),
    };
    let config = w.wage_config();
    let results: Vec<_> = ads.par_iter().map(|ad| wage_extract::extract_ad(ad, &overrides, &config)).collect();
    run.write_jsonl("wages.jsonl", results.iter().filter(|r| r.observation.is_some() || r.text_observation.is_some()))?;
    run.write_jsonl("wage_diagnostics.jsonl", results.iter().flat_map(|r| &r.diagnostics))?;
    Ok(Status::from_partial(run.finish(&ctx.snapshot)?))
}

fn extract_tags(ctx: &Ctx) -> anyhow::Result<Status> {
    let t = ctx.cfg.tags.as_ref().ok_or_else(|| anyhow!("config has no [tags] section"))?;
    let mut run = Run::new("extract_tags", &ctx.cfg.output_dir)?;
    let ads = load_corpus(ctx, &mut run, false)?;
    let mut classes = Vec::new();
    for dir in &t.classes {
        run.input(dir);
        classes.push(TagClass::load(dir, t.radius)?);
    }
    let mut predictions = HashMap::new();
    for (class, p) in &t.predictions {
        if !classes.iter().any(|c| &c.class_name == class) {
            bail!("predictions given for unknown tag class `{class}`");
        }
        run.input(p);
        predictions.insert(class.clone(), Predictions::load(p)?);
    }
    let results: Vec<_> = ads.par_iter().map(|ad| job_tag::tag_ad(ad, &classes, &predictions)).collect();
    run.write_jsonl("tags.jsonl", &results)?;
    Ok(Status::from_partial(run.finish(&ctx.snapshot)?))
}

#[derive(Serialize)]
struct DictHitRow<'a> {
    dictionary: &'a str,
    ad_id: &'a str,
    uci: &'a str,
    term: &'a str,
    start_token: usize,
    end_token: usize,
}

fn extract_dict(ctx: &Ctx) -> anyhow::Result<Status> {
    if ctx.cfg.dictionaries.is_empty() {
        bail!("config has no [dictionaries]");
    }
    let mut run = Run::new("extract_dict", &ctx.cfg.output_dir)?;
    let ads = load_corpus(ctx, &mut run, false)?;
    let exclusions = match &ctx.cfg.exclusions {
        Some(p) => {
            run.input(p);
            ExclusionList::load(p)?
        }
        None => ExclusionList::default(),
    };
    let rules = match &ctx.cfg.rules {
        Some(p) => {
            run.input(p);
            knowledge_map::load_rules(p)?
        }
        None => Vec::new(),
    };
    let mut report = BTreeMap::new();
    let mut hits = Vec::new();
    for (name, d) in &ctx.cfg.dictionaries {
        run.input(&d.path);
        let (entries, load) = knowledge_map::load_dictionary(&d.path, d.schema)?;
        let loaded = entries.len();
        let entries = exclusions.apply(entries);
        let matcher = knowledge_map::compile(entries, rules.clone())?;
        let per_ad: Vec<_> = ads.par_iter().map(|ad| matcher.scan_ad(&ad.id, &ad.body)).collect();
        let total: usize = per_ad.iter().map(Vec::len).sum();
        report.insert(
            name.clone(),
            json!({
                "entries": loaded,
                "after_exclusions": matcher.entries().len(),
                "blank_rows": load.blank_rows,
                "duplicates": load.duplicates,
                "hits": total,
            }),
        );
        hits.push((name.clone(), per_ad));
    }
    run.write_jsonl(
        "dict_hits.jsonl",
        hits.iter().flat_map(|(name, per_ad)| {
            per_ad.iter().flatten().map(move |h| DictHitRow {
                dictionary: name,
                ad_id: &h.ad_id,
                uci: &h.uci,
                term: &h.term,
                start_token: h.start_token,
                end_token: h.end_token,
            })
        }),
    )?;
    run.write_json("dict_report.json", &report)?;
    Ok(Status::from_partial(run.finish(&ctx.snapshot)?))
}

fn feature(ad_id: &str, metric: &str, code: Option<&str>, value: Option<f64>, flagged: bool) -> FeatureRecord {
    FeatureRecord { ad_id: ad_id.into(), metric: metric.into(), code: code.map(str::to_string), value, flagged }
}

/// Collect features and grouping attributes from extractor outputs already in `dir`.
fn gather_features(dir: &Path, run: &mut Run) -> anyhow::Result<(Vec<FeatureRecord>, HashMap<String, AdAttributes>)> {
    let mut feats = Vec::new();
    let mut attrs: HashMap<String, AdAttributes> = HashMap::new();
    let read = |name: &str, run: &mut Run| -> anyhow::Result<Vec<Value>> {
        let p = dir.join(name);
        if p.exists() {
            run.input(&p);
            read_jsonl_values(&p)
        } else {
            Ok(Vec::new())
        }
    };
    for (file, metric) in [("skills.jsonl", "skill"), ("tasks.jsonl", "task")] {
        for v in read(file, run)? {
            if let (Some(id), Some(code)) = (v["ad_id"].as_str(), v["label_code"].as_str()) {
                feats.push(feature(id, metric, Some(code), None, false));
            }
        }
    }
    for v in read("dict_hits.jsonl", run)? {
        if let (Some(id), Some(d), Some(uci)) = (v["ad_id"].as_str(), v["dictionary"].as_str(), v["uci"].as_str()) {
            feats.push(feature(id, d, Some(uci), None, false));
        }
    }
    for v in read("wages.jsonl", run)? {
        let obs = &v["observation"];
        if let (Some(id), Some(a)) = (v["ad_id"].as_str(), obs["annualized"].as_f64()) {
            feats.push(feature(id, "wage_annual", None, Some(a), obs["outlier"].as_bool().unwrap_or(false)));
        }
    }
    for v in read("tags.jsonl", run)? {
        if let (Some(id), Some(tags)) = (v["ad_id"].as_str(), v["tags"].as_object()) {
            for (class, on) in tags {
                if on.as_bool() == Some(true) {
                    feats.push(feature(id, "tag", Some(class), None, false));
                }
            }
        }
    }
    for v in read("titles.jsonl", run)? {
        if let Some(id) = v["ad_id"].as_str() {
            if let Some(h) = v["hierarchy"].as_f64() {
                feats.push(feature(id, "hierarchy", None, Some(h), false));
            }
            if let Some(f) = v["features"].as_array() {
                for code in f.iter().filter_map(Value::as_str) {
                    feats.push(feature(id, "title_feature", Some(code), None, false));
                }
            }
            attrs.entry(id.to_string()).or_default().soc = v["soc_code"].as_str().map(str::to_string);
        }
    }
    for v in read("firms.jsonl", run)? {
        if let (Some(id), Some(n)) = (v["ad_id"].as_str(), v["naics"].as_str()) {
            attrs.entry(id.to_string()).or_default().naics = Some(n.to_string());
        }
    }
    Ok((feats, attrs))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn aggregate_csv(dims: &[Dim], rows: &[aggregate::AggregateRow]) -> String {
    let mut out: Vec<String> = dims.iter().map(|d| d.name().to_string()).collect();
    out.extend(
        ["metric", "code", "count", "ads", "share", "mean", "p10", "p25", "p50", "p75", "p90"].map(String::from),
    );
    let mut text = out.join(",") + "\n";
    for r in rows {
        let mut cells: Vec<String> = r.key.iter().map(|k| csv_field(k)).collect();
        cells.push(csv_field(&r.metric));
        cells.push(csv_field(r.code.as_deref().unwrap_or("")));
        cells.push(r.count.to_string());
        cells.push(r.ads.to_string());
        cells.push(fmt_opt(r.share));
        cells.push(fmt_opt(r.mean));
        match r.percentiles {
            Some(p) => cells.extend(p.iter().map(|x| format!("{x}"))),
            None => cells.extend(std::iter::repeat_n(String::new(), 5)),
        }
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    text
}

fn aggregate_cmd(ctx: &Ctx) -> anyhow::Result<Status> {
    let a = &ctx.cfg.aggregate;
    let mut run = Run::new("aggregate", &ctx.cfg.output_dir)?;
    let mut ads = load_corpus(ctx, &mut run, false)?;
    let anomalous: BTreeSet<_> = a.anomalous_months.iter().copied().collect();
    let index = aggregate::build_maj(&ads, &anomalous, a.fallback_offset);
    let (features, mut attrs) = gather_features(&ctx.cfg.output_dir, &mut run)?;
    for ad in &mut ads {
        if let Some(s) = ad.state.take() {
            attrs.entry(ad.id.clone()).or_default().state = Some(s);
        }
    }
    let dims = a.group_by.iter().map(|d| d.parse::<Dim>()).collect::<Result<Vec<_>, _>>()?;
    let spec = GroupSpec { dims: dims.clone(), include_flagged: a.include_flagged };

    // Shard by ad so every shard holds all features of its ads.
    let mut by_ad: BTreeMap<&str, Vec<FeatureRecord>> = BTreeMap::new();
    for f in &features {
        by_ad.entry(f.ad_id.as_str()).or_default().push(f.clone());
    }
    let shards: Vec<Vec<FeatureRecord>> = by_ad.into_values().collect();
    let partial = shards
        .par_iter()
        .map(|s| aggregate::aggregate_partial(s, &index, &attrs, &spec))
        .reduce(aggregate::Partial::default, aggregate::Partial::merge);
    let unknown = partial.unknown_ads;
    let excluded = partial.excluded_flagged;
    let rows = aggregate::finalize(partial, &index, &attrs, &spec);
    let top = aggregate::top_k(&rows, a.top_k);

    run.write_jsonl("maj.jsonl", index.spans())?;
    let mut active = String::from("month,active_jobs\n");
    for (m, n) in index.counts() {
        active.push_str(&format!("{m},{n}\n"));
    }
    run.write_text("active_jobs.csv", &active)?;
    run.write_text("aggregate.csv", &aggregate_csv(&dims, &rows))?;
    run.write_jsonl("aggregate.jsonl", &rows)?;
    run.write_text("top_k.csv", &aggregate_csv(&dims, &top))?;
    run.write_json(
        "aggregate_report.json",
        &json!({
            "ads": index.len(),
            "adjusted": index.spans().filter(|s| s.adjusted).count(),
            "features": features.len(),
            "excluded_flagged": excluded,
            "unknown_ads": unknown,
            "group_by": a.group_by,
            "anomalous_months": a.anomalous_months,
            "fallback_offset": a.fallback_offset,
        }),
    )?;
    if unknown > 0 {
        run.error("aggregate", None, format!("{unknown} ads in feature files are not in the corpus"));
    }
    Ok(Status::from_partial(run.finish(&ctx.snapshot)?))
}

fn simulate(cli: &Cli, args: &SimulateArgs) -> anyhow::Result<Status> {
    let cfg = match &cli.config {
        Some(p) if p.exists() => Some(RunConfig::load(p)?),
        Some(p) => bail!("config file not found: {}", p.display()),
        None => None,
    };
    let v = cfg.as_ref().and_then(|c| c.validation.clone());
    let pick = |arg: Option<f64>, from_cfg: Option<f64>, name: &str| {
        arg.or(from_cfg).ok_or_else(|| anyhow!("simulate: missing --{name}"))
    };
    let bins_path = args
        .bins
        .clone()
        .or_else(|| v.as_ref().map(|v| v.bins.clone()))
        .ok_or_else(|| anyhow!("simulate: missing --bins"))?;
    let accuracy = args
        .accuracy
        .clone()
        .or_else(|| v.as_ref().map(|v| v.accuracy.clone()))
        .ok_or_else(|| anyhow!("simulate: missing --accuracy"))?;
    let inputs = SimulationInputs {
        n_flagged: pick(args.n_flagged, v.as_ref().map(|v| v.n_flagged), "n-flagged")?,
        n_unflagged: pick(args.n_unflagged, v.as_ref().map(|v| v.n_unflagged), "n-unflagged")?,
        stage1_fnr: pick(args.stage1_fnr, v.as_ref().map(|v| v.stage1_fnr), "stage1-fnr")?,
    };
    let threshold = pick(args.threshold, v.as_ref().map(|v| v.threshold), "threshold")?;

    let mut run = Run::new("simulate", &out_dir(cli)?)?;
    run.input(&bins_path);
    let bins = BinTable::load(&bins_path)?;
    let acc = bins.accuracy_row(&accuracy)?.to_vec();
    let estimate = validate::simulate_confusion(&bins, &acc, inputs, threshold)?;
    let curve = validate::simulate_curve(&bins, &acc, inputs)?;
    run.write_json(
        "simulation.json",
        &json!({
            "bins": bins.labels,
            "accuracy_row": accuracy,
            "inputs": inputs,
            "estimate": estimate,
            "curve": curve,
        }),
    )?;
    let snapshot = json!({"bins": bins_path, "accuracy": accuracy, "inputs": inputs, "threshold": threshold});
    Ok(Status::from_partial(run.finish(&snapshot)?))
}

fn kappa(cli: &Cli, args: &KappaArgs) -> anyhow::Result<Status> {
    let mut run = Run::new("kappa", &out_dir(cli)?)?;
    run.input(&args.ratings);
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(&args.ratings)
        .with_context(|| format!("reading {}", args.ratings.display()))?;
    let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let col = |name: &str| headers.iter().position(|h| h == name).ok_or_else(|| anyhow!("ratings: no column `{name}`"));
    let rater_cols = args.raters.iter().map(|r| col(r)).collect::<anyhow::Result<Vec<_>>>()?;
    let ref_col = args.reference.as_deref().map(col).transpose()?;
    let mut columns: Vec<Vec<String>> = vec![Vec::new(); rater_cols.len()];
    let mut reference = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        for (j, &c) in rater_cols.iter().enumerate() {
            columns[j].push(rec.get(c).unwrap_or("").trim().to_string());
        }
        if let Some(c) = ref_col {
            reference.push(rec.get(c).unwrap_or("").trim().to_string());
        }
    }
    let categories: Vec<&String> = columns.iter().flatten().collect::<BTreeSet<_>>().into_iter().collect();
    let idx = |s: &String| categories.iter().position(|c| *c == s).expect("category collected");
    let mut pairs = Vec::new();
    for i in 0..columns.len() {
        for j in i + 1..columns.len() {
            let a: Vec<usize> = columns[i].iter().map(idx).collect();
            let b: Vec<usize> = columns[j].iter().map(idx).collect();
            let table = validate::rater_table(&a, &b, categories.len())?;
            pairs.push(json!({
                "a": args.raters[i],
                "b": args.raters[j],
                "agreement": validate::agreement(&table)?,
                "kappa": validate::kappa(&table).ok(),
                "table": table,
            }));
        }
    }
    let accuracy = if ref_col.is_some() {
        let (strict, lenient) = validate::strict_lenient(&reference, &columns)?;
        Some(json!({"reference": args.reference, "strict": strict, "lenient": lenient}))
    } else {
        None
    };
    run.write_json("kappa.json", &json!({"categories": categories, "pairs": pairs, "accuracy": accuracy}))?;
    let snapshot = json!({"ratings": args.ratings, "raters": args.raters, "reference": args.reference});
    Ok(Status::from_partial(run.finish(&snapshot)?))
}

fn sample(cli: &Cli, args: &SampleArgs) -> anyhow::Result<Status> {
    let seed = match (&cli.seed, &cli.config) {
        (Some(s), _) => *s,
        (None, Some(p)) if p.exists() => RunConfig::load(p)?.seed,
        _ => 0,
    };
    let mut run = Run::new("sample", &out_dir(cli)?)?;
    run.input(&args.scores);
    let rows = read_jsonl_values(&args.scores)?;
    let scores = rows
        .iter()
        .enumerate()
        .map(|(i, r)| r["score"].as_f64().ok_or_else(|| anyhow!("row {} has no numeric score", i + 1)))
        .collect::<anyhow::Result<Vec<f64>>>()?;
    let edges =
        if args.edges.is_empty() { (80..=100).map(|i| f64::from(i) / 100.0).collect() } else { args.edges.clone() };
    let picked = validate::stratified_sample(&scores, &edges, args.per_bin, seed)?;
    let mut out = Vec::new();
    for (b, members) in picked.iter().enumerate() {
        for &i in members {
            let mut row = rows[i].clone();
            if let Some(o) = row.as_object_mut() {
                o.insert("bin_lower".into(), json!(edges[b]));
            }
            out.push(row);
        }
    }
    run.write_jsonl("sample.jsonl", &out)?;
    let snapshot = json!({"scores": args.scores, "edges": edges, "per_bin": args.per_bin, "seed": seed});
    Ok(Status::from_partial(run.finish(&snapshot)?))
}
