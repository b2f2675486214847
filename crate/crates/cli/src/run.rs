use std::collections::{HashMap, HashSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use stvqm::distortion::{inject_distortion, synth_test_scene, DistortionKind, DistortionSpec, Region, SceneKind};
use stvqm::eval::{evaluate, DatasetManifest};
use stvqm::fusion::fit_params;
use stvqm::sketch::{
    generate_synthetic_corpus, load_codebook, save_codebook, train_codebook, ForestParams, StCodebook,
    DEFAULT_PATCHES_PER_CLASS, N_CLASSES,
};
use stvqm::video::{load_yuv_sequence, validate_pair, write_yuv_sequence};
use stvqm::{score_pair, VideoScore};

use crate::config::RunConfig;

pub enum Failure {
    Usage(anyhow::Error),
    Data(anyhow::Error),
    Partial(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(anyhow!(msg.into()))
}

#[derive(Debug, Parser)]
#[command(name = "stvqm", version, about = "Sketch-token video quality measure")]
pub struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Frame width of raw YUV inputs.
    #[arg(long, global = true)]
    width: Option<usize>,
    /// Frame height of raw YUV inputs.
    #[arg(long, global = true)]
    height: Option<usize>,
    #[arg(long, global = true)]
    fps: Option<f64>,
    /// Trained codebook file.
    #[arg(long, global = true)]
    codebook: Option<PathBuf>,
    /// Minkowski pooling exponent.
    #[arg(long, global = true)]
    beta: Option<f64>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// TOML settings file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score one test sequence against its reference.
    Score { reference: PathBuf, test: PathBuf },
    /// Score every entry of a manifest into a CSV table.
    Batch {
        manifest: PathBuf,
        #[arg(long, short)]
        output: PathBuf,
        /// Keep rows already in the output and skip their ids.
        #[arg(long)]
        resume: bool,
    },
    /// Fit the fusion weights against subjective scores.
    Fit {
        /// Batch output with st_iqm and st_t columns.
        scores: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        splits: Option<usize>,
        #[arg(long)]
        train_frac: Option<f64>,
        /// Write the full report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Benchmark objective scores against a manifest.
    Evaluate {
        manifest: PathBuf,
        #[arg(long)]
        scores: PathBuf,
        /// Score column to evaluate.
        #[arg(long, default_value = "st_vqm")]
        column: String,
    },
    /// Train a codebook on the synthetic contour corpus.
    TrainCodebook {
        #[arg(long, short)]
        output: PathBuf,
        #[arg(long, default_value_t = DEFAULT_PATCHES_PER_CLASS)]
        per_class: usize,
        #[arg(long)]
        trees: Option<usize>,
        #[arg(long)]
        max_depth: Option<usize>,
    },
    /// Apply a synthetic degradation to a YUV sequence.
    Distort {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        magnitude: f64,
        /// x,y,w,h
        #[arg(long, value_parser = parse_region)]
        region: Option<Region>,
        #[arg(long, default_value_t = 1)]
        period: usize,
        /// start,end (end exclusive)
        #[arg(long, value_parser = parse_range)]
        frames: Option<(usize, usize)>,
    },
    /// Write a procedural test scene as YUV.
    Synth {
        output: PathBuf,
        #[arg(long, value_enum, default_value = "blob-field")]
        scene: Scene,
        #[arg(long, default_value_t = 30)]
        frames: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    GlobalShift,
    LocalWarp,
    Flicker,
    Blur,
    Noise,
}

impl From<Kind> for DistortionKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::GlobalShift => DistortionKind::GlobalShift,
            Kind::LocalWarp => DistortionKind::LocalWarp,
            Kind::Flicker => DistortionKind::Flicker,
            Kind::Blur => DistortionKind::Blur,
            Kind::Noise => DistortionKind::Noise,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Scene {
    Checker,
    BlobField,
    TexturedObjects,
}

impl From<Scene> for SceneKind {
    fn from(s: Scene) -> Self {
        match s {
            Scene::Checker => SceneKind::Checker,
            Scene::BlobField => SceneKind::BlobField,
            Scene::TexturedObjects => SceneKind::TexturedObjects,
        }
    }
}

fn parse_numbers(s: &str, n: usize) -> Result<Vec<usize>, String> {
    let v: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated integers"));
    }
    Ok(v)
}

fn parse_region(s: &str) -> Result<Region, String> {
    let v = parse_numbers(s, 4)?;
    Ok(Region {
        x: v[0],
        y: v[1],
        w: v[2],
        h: v[3],
    })
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let v = parse_numbers(s, 2)?;
    Ok((v[0], v[1]))
}

/// Flags merged over the config file.
struct Ctx {
    cfg: RunConfig,
    json: bool,
    seed: u64,
}

impl Ctx {
    fn dims(&self) -> Result<(usize, usize), Failure> {
        match (self.cfg.width, self.cfg.height) {
            (Some(w), Some(h)) => Ok((w, h)),
            _ => Err(usage("--width and --height are required for raw YUV input")),
        }
    }

    fn fps(&self) -> f64 {
        self.cfg.fps.unwrap_or(25.0)
    }

    fn codebook(&self) -> Result<StCodebook, Failure> {
        let path = self.cfg.codebook.as_ref().ok_or_else(|| usage("--codebook is required"))?;
        load_codebook(path).map_err(|e| Failure::Data(anyhow!("{}: {e}", path.display())))
    }

    fn score(&self, reference: &Path, test: &Path, codebook: &StCodebook) -> anyhow::Result<VideoScore> {
        let (w, h) = self.dims().map_err(|_| anyhow!("frame dimensions missing"))?;
        let r = load_yuv_sequence(reference, w, h, self.fps())?;
        let t = load_yuv_sequence(test, w, h, self.fps())?;
        let pair = validate_pair(r, t)?;
        Ok(score_pair(&pair, codebook, &self.cfg.metric, &self.cfg.fusion)?)
    }
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    let g = cli.global;
    let mut cfg = match &g.config {
        Some(p) => RunConfig::load(p).map_err(Failure::Usage)?,
        None => RunConfig::default(),
    };
    cfg.codebook = g.codebook.or(cfg.codebook);
    cfg.width = g.width.or(cfg.width);
    cfg.height = g.height.or(cfg.height);
    cfg.fps = g.fps.or(cfg.fps);
    cfg.threads = g.threads.or(cfg.threads);
    if let Some(b) = g.beta {
        cfg.metric.beta = b;
    }
    if !(cfg.metric.beta >= 1.0 && cfg.metric.beta.is_finite()) {
        return Err(usage(format!("beta must be >= 1, got {}", cfg.metric.beta)));
    }
    let seed = g.seed.or(cfg.seed).unwrap_or(0);
    cfg.fit.seed = g.seed.unwrap_or(cfg.fit.seed);
    if let Some(n) = cfg.threads {
        // a pool may already exist when embedded; the count is only a hint
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let ctx = Ctx {
        cfg,
        json: g.json,
        seed,
    };
    match cli.command {
        Command::Score { reference, test } => cmd_score(&ctx, &reference, &test),
        Command::Batch {
            manifest,
            output,
            resume,
        } => cmd_batch(&ctx, &manifest, &output, resume),
        Command::Fit {
            scores,
            manifest,
            splits,
            train_frac,
            report,
        } => cmd_fit(&ctx, &scores, &manifest, splits, train_frac, report.as_deref()),
        Command::Evaluate {
            manifest,
            scores,
            column,
        } => cmd_evaluate(&ctx, &manifest, &scores, &column),
        Command::TrainCodebook {
            output,
            per_class,
            trees,
            max_depth,
        } => cmd_train_codebook(&ctx, &output, per_class, trees, max_depth),
        Command::Distort {
            input,
            output,
            kind,
            magnitude,
            region,
            period,
            frames,
        } => {
            let spec = DistortionSpec {
                kind: kind.into(),
                magnitude,
                region,
                period,
                frames,
                seed: ctx.seed,
            };
            cmd_distort(&ctx, &input, &output, &spec)
        }
        Command::Synth { output, scene, frames } => cmd_synth(&ctx, &output, scene.into(), frames),
    }
}

#[derive(Debug, Serialize)]
struct ScoreOutput {
    st_iqm: f64,
    st_iqm_scaled: f64,
    st_t: f64,
    st_t_scaled: f64,
    st_vqm: f64,
    frames_scored: usize,
    frames_total: usize,
    skipped_frames: Vec<usize>,
    temporal_retained: usize,
    temporal_total: usize,
    temporal_coverage: f64,
    low_confidence: bool,
}

impl From<&VideoScore> for ScoreOutput {
    fn from(s: &VideoScore) -> Self {
        Self {
            st_iqm: s.st_iqm,
            st_iqm_scaled: s.st_iqm_scaled,
            st_t: s.st_t,
            st_t_scaled: s.st_t_scaled,
            st_vqm: s.st_vqm,
            frames_scored: s.frames_scored,
            frames_total: s.frames_total,
            skipped_frames: s.spatial.skipped.clone(),
            temporal_retained: s.temporal.retained,
            temporal_total: s.temporal.total,
            temporal_coverage: s.temporal.coverage,
            low_confidence: s.temporal.low_confidence,
        }
    }
}

fn cmd_score(ctx: &Ctx, reference: &Path, test: &Path) -> Result<(), Failure> {
    ctx.dims()?;
    let codebook = ctx.codebook()?;
    let s = ctx.score(reference, test, &codebook)?;
    let out = ScoreOutput::from(&s);
    if ctx.json {
        println!("{}", serde_json::to_string_pretty(&out).map_err(anyhow::Error::from)?);
    } else {
        println!("ST-IQM   {:.6e}  (x1e10: {:.6})", out.st_iqm, out.st_iqm_scaled);
        println!("ST-T     {:.6e}  (x1e5: {:.6})", out.st_t, out.st_t_scaled);
        println!("ST-VQM   {:.6}", out.st_vqm);
        println!("frames   {}/{} scored", out.frames_scored, out.frames_total);
        println!(
            "temporal {}/{} components ({:.1}%){}",
            out.temporal_retained,
            out.temporal_total,
            100.0 * out.temporal_coverage,
            if out.low_confidence { ", low confidence" } else { "" }
        );
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct BatchRow {
    id: String,
    st_iqm: f64,
    st_t: f64,
    st_vqm: f64,
    frames_scored: usize,
    frames_total: usize,
}

fn read_rows(path: &Path) -> anyhow::Result<Vec<BatchRow>> {
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    rdr.deserialize()
        .map(|r| r.with_context(|| format!("parsing {}", path.display())))
        .collect()
}

fn load_manifest(path: &Path) -> anyhow::Result<DatasetManifest> {
    let mut m = DatasetManifest::load(path)?;
    if let Some(dir) = path.parent() {
        m.resolve_paths(dir);
    }
    Ok(m)
}

fn cmd_batch(ctx: &Ctx, manifest: &Path, output: &Path, resume: bool) -> Result<(), Failure> {
    let m = load_manifest(manifest)?;
    let mut rows = if resume && output.exists() { read_rows(output)? } else { Vec::new() };
    let done: HashSet<String> = rows.iter().map(|r| r.id.clone()).collect();
    let pending: Vec<_> = m.entries.iter().filter(|e| !done.contains(&e.id)).collect();
    let mut failures = Vec::new();
    if !pending.is_empty() {
        ctx.dims()?;
        let codebook = ctx.codebook()?;
        for e in pending {
            match ctx.score(&e.ref_path, &e.test_path, &codebook) {
                Ok(s) => rows.push(BatchRow {
                    id: e.id.clone(),
                    st_iqm: s.st_iqm,
                    st_t: s.st_t,
                    st_vqm: s.st_vqm,
                    frames_scored: s.frames_scored,
                    frames_total: s.frames_total,
                }),
                Err(err) => {
                    eprintln!("{}: {err:#}", e.id);
                    failures.push((e.id.clone(), format!("{err:#}")));
                }
            }
        }
    }
    let order: HashMap<&str, usize> = m.entries.iter().enumerate().map(|(i, e)| (e.id.as_str(), i)).collect();
    rows.sort_by_key(|r| order.get(r.id.as_str()).copied().unwrap_or(usize::MAX));
    let mut w = csv::Writer::from_path(output).with_context(|| format!("writing {}", output.display()))?;
    if rows.is_empty() {
        w.write_record(["id", "st_iqm", "st_t", "st_vqm", "frames_scored", "frames_total"])
            .map_err(anyhow::Error::from)?;
    }
    for r in &rows {
        w.serialize(r).map_err(anyhow::Error::from)?;
    }
    w.flush().map_err(anyhow::Error::from)?;
    if ctx.json {
        let failed: Vec<_> = failures
            .iter()
            .map(|(id, e)| serde_json::json!({"id": id, "error": e}))
            .collect();
        println!(
            "{}",
            serde_json::json!({"rows": rows.len(), "failures": failed, "output": output.display().to_string()})
        );
    } else {
        println!("{} rows written to {}", rows.len(), output.display());
    }
    if failures.is_empty() {
        Ok(())
    } else {
        let ids: Vec<&str> = failures.iter().map(|(id, _)| id.as_str()).collect();
        Err(Failure::Partial(format!("{} entries failed: {}", failures.len(), ids.join(", "))))
    }
}

fn cmd_fit(
    ctx: &Ctx,
    scores: &Path,
    manifest: &Path,
    splits: Option<usize>,
    train_frac: Option<f64>,
    report: Option<&Path>,
) -> Result<(), Failure> {
    let m = DatasetManifest::load(manifest).map_err(anyhow::Error::from)?;
    let rows = read_rows(scores)?;
    let by_id: HashMap<&str, &BatchRow> = rows.iter().map(|r| (r.id.as_str(), r)).collect();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for e in &m.entries {
        let r = by_id
            .get(e.id.as_str())
            .ok_or_else(|| anyhow!("no score row for entry {}", e.id))?;
        x.push((r.st_iqm, r.st_t));
        y.push(e.mos);
    }
    let mut fit_cfg = ctx.cfg.fit;
    if let Some(n) = splits {
        fit_cfg.n_splits = n;
    }
    if let Some(f) = train_frac {
        fit_cfg.train_frac = f;
    }
    let r = fit_params(&x, &y, &fit_cfg, &ctx.cfg.fusion).map_err(anyhow::Error::from)?;
    if let Some(path) = report {
        let text = serde_json::to_string_pretty(&r).map_err(anyhow::Error::from)?;
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    let c = r.chosen;
    if ctx.json {
        let hist = |i: usize| -> Vec<(f64, usize)> { r.histograms[i].iter().map(|b| (b.value, b.count)).collect() };
        println!(
            "{}",
            serde_json::json!({
                "w_s": c.w_s, "w_t": c.w_t, "gamma": c.gamma,
                "spatial_scale": c.spatial_scale, "temporal_scale": c.temporal_scale,
                "n_splits": r.per_split.len(),
                "histograms": {"w_s": hist(0), "w_t": hist(1), "gamma": hist(2)},
            })
        );
    } else {
        println!("w_s   {:.2}", c.w_s);
        println!("w_t   {:.2}", c.w_t);
        println!("gamma {:.2}", c.gamma);
        let pccs: Vec<f64> = r.per_split.iter().filter_map(|s| s.pcc).collect();
        if !pccs.is_empty() {
            println!(
                "mean test PCC {:.4} over {} splits",
                pccs.iter().sum::<f64>() / pccs.len() as f64,
                pccs.len()
            );
        }
    }
    Ok(())
}

fn cmd_evaluate(ctx: &Ctx, manifest: &Path, scores: &Path, column: &str) -> Result<(), Failure> {
    let m = DatasetManifest::load(manifest).map_err(anyhow::Error::from)?;
    let mut rdr = csv::Reader::from_path(scores).with_context(|| format!("reading {}", scores.display()))?;
    let headers = rdr.headers().map_err(anyhow::Error::from)?.clone();
    let id_col = headers.iter().position(|h| h == "id").ok_or_else(|| anyhow!("score file has no id column"))?;
    let val_col = headers
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| usage(format!("score file has no {column:?} column")))?;
    let mut objective = HashMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(anyhow::Error::from)?;
        let v: f64 = rec[val_col]
            .trim()
            .parse()
            .with_context(|| format!("{}: bad value {:?}", &rec[id_col], &rec[val_col]))?;
        objective.insert(rec[id_col].to_string(), v);
    }
    let report = evaluate(&m, &objective, &ctx.cfg.eval).map_err(anyhow::Error::from)?;
    if ctx.json {
        println!("{}", serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)?);
    } else {
        print!("{}", report.table(column));
        println!("{} entries, {} pairs ({} different)", report.n, report.n_pairs, report.n_different);
    }
    Ok(())
}

fn cmd_train_codebook(
    ctx: &Ctx,
    output: &Path,
    per_class: usize,
    trees: Option<usize>,
    max_depth: Option<usize>,
) -> Result<(), Failure> {
    let mut params = ForestParams::default();
    if let Some(t) = trees {
        params.n_trees = t;
    }
    if let Some(d) = max_depth {
        params.max_depth = d;
    }
    if per_class < 2 || params.n_trees == 0 {
        return Err(usage("need --per-class >= 2 and --trees >= 1"));
    }
    let corpus = generate_synthetic_corpus(N_CLASSES, per_class, ctx.seed).map_err(anyhow::Error::from)?;
    let cb = train_codebook(&corpus, &params, ctx.seed).map_err(anyhow::Error::from)?;
    save_codebook(&cb, output).map_err(anyhow::Error::from)?;
    if ctx.json {
        println!(
            "{}",
            serde_json::json!({"output": output.display().to_string(), "trees": cb.trees.len(), "patches": corpus.len()})
        );
    } else {
        println!("{} trees on {} patches written to {}", cb.trees.len(), corpus.len(), output.display());
    }
    Ok(())
}

fn cmd_distort(ctx: &Ctx, input: &Path, output: &Path, spec: &DistortionSpec) -> Result<(), Failure> {
    let (w, h) = ctx.dims()?;
    let seq = load_yuv_sequence(input, w, h, ctx.fps()).map_err(anyhow::Error::from)?;
    let out = inject_distortion(&seq, spec).map_err(|e| Failure::Usage(e.into()))?;
    write_yuv_sequence(&out, output).map_err(anyhow::Error::from)?;
    if !ctx.json {
        println!("{} frames written to {}", out.len(), output.display());
    } else {
        println!("{}", serde_json::json!({"frames": out.len(), "output": output.display().to_string()}));
    }
    Ok(())
}

fn cmd_synth(ctx: &Ctx, output: &Path, scene: SceneKind, frames: usize) -> Result<(), Failure> {
    let w = ctx.cfg.width.unwrap_or(320);
    let h = ctx.cfg.height.unwrap_or(240);
    if w < stvqm::video::MIN_DIMENSION || h < stvqm::video::MIN_DIMENSION || frames < 2 {
        return Err(usage(format!(
            "scenes need at least {0}x{0} pixels and 2 frames",
            stvqm::video::MIN_DIMENSION
        )));
    }
    let seq = synth_test_scene(scene, w, h, frames, ctx.seed);
    write_yuv_sequence(&seq, output).map_err(anyhow::Error::from)?;
    let mut out = std::io::stdout().lock();
    let _ = if ctx.json {
        writeln!(out, "{}", serde_json::json!({"frames": frames, "width": w, "height": h}))
    } else {
        writeln!(out, "{frames} frames of {w}x{h} written to {}", output.display())
    };
    Ok(())
}
