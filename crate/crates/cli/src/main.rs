use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use blda_core::eval::{CurveSpec, ExperimentReport, Metric};
use blda_core::methods::fit_2dlda;
use blda_core::rng::RNG_ALGORITHM;
use blda_core::{
    average_reconstruction_error, compute_stats, delta, load_dataset, metric_curve, project, reconstruct,
    save_dataset, split, verify_bound, CorruptionKind, CorruptionSpec, LabeledMatrixDataset, Method, Projector,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "blda", version, about = "Bhattacharyya-bound 2D LDA and baselines for image data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a projector on a labeled dataset.
    Fit(FitArgs),
    /// Project every image of a dataset.
    Project(TransformArgs),
    /// Reconstruct every image of a dataset and report the average error.
    Reconstruct(TransformArgs),
    /// Accuracy or reconstruction error as a function of r.
    Curve(CurveArgs),
    /// Write a corrupted copy of a dataset.
    Corrupt(CorruptArgs),
    /// Check the error bound on random projection directions.
    BoundCheck(BoundArgs),
    /// Seeded per-class train/test split.
    Split(SplitArgs),
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    method: Method,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    r: u64,
    /// Ridge added to the within-class scatter (2dlda only).
    #[arg(long)]
    ridge: Option<f64>,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long)]
    projector: PathBuf,
    #[arg(long)]
    input: PathBuf,
    /// Output directory for the transformed dataset.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Block,
    Gaussian,
    Dummies,
}

#[derive(Args, Clone)]
struct CorruptionArgs {
    /// Corruption applied to training images.
    #[arg(long = "corruption", value_enum)]
    kind: Option<Kind>,
    #[arg(long, default_value_t = 0.0)]
    area_ratio: f64,
    #[arg(long, default_value_t = 0.0)]
    noise_mean: f64,
    #[arg(long, default_value_t = 0.2)]
    noise_variance: f64,
    /// Number of dummy images to inject.
    #[arg(long, default_value_t = 0)]
    dummies: usize,
}

impl CorruptionArgs {
    fn spec(&self, seed: u64) -> Option<CorruptionSpec> {
        self.kind.map(|kind| match kind {
            Kind::Block => CorruptionSpec::block(self.area_ratio, seed),
            Kind::Gaussian => CorruptionSpec::gaussian(self.area_ratio, self.noise_mean, self.noise_variance, seed),
            Kind::Dummies => CorruptionSpec::dummies(self.dummies, seed),
        })
    }
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long)]
    train: PathBuf,
    /// Test manifest; omit to split `--train` with `--per-class-train`.
    #[arg(long, conflicts_with = "per_class_train", required_unless_present = "per_class_train")]
    test: Option<PathBuf>,
    #[arg(long)]
    per_class_train: Option<usize>,
    #[arg(long, value_delimiter = ',', default_value = "2dblda")]
    methods: Vec<Method>,
    /// Explicit list of dimensions, e.g. `1,2,4`.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["r_min", "r_max"],
          value_parser = clap::value_parser!(u64).range(1..))]
    r: Vec<u64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    r_min: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    r_max: Option<u64>,
    #[arg(long, default_value = "accuracy")]
    metric: Metric,
    #[arg(long)]
    ridge: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    corruption: CorruptionArgs,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct CorruptArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    corruption: CorruptionArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    per_class_train: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Receives `train/` and `test/` subdirectories.
    #[arg(long)]
    output: PathBuf,
}

enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<blda_core::Error> for Failure {
    fn from(e: blda_core::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::Project(a) => cmd_transform(a, false),
        Command::Reconstruct(a) => cmd_transform(a, true),
        Command::Curve(a) => cmd_curve(a),
        Command::Corrupt(a) => cmd_corrupt(a),
        Command::BoundCheck(a) => cmd_bound_check(a),
        Command::Split(a) => cmd_split(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn load(path: &Path) -> std::result::Result<LabeledMatrixDataset, Failure> {
    if !path.is_file() {
        return Err(Failure::Usage(format!("manifest {} not found", path.display())));
    }
    load_dataset(path).with_context(|| format!("loading {}", path.display())).map_err(Failure::Runtime)
}

fn parent_of(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

/// Writes `contents` to a sibling temporary file, then renames it over `path`.
fn write_atomic(path: &Path, contents: &str) -> anyhow::Result<()> {
    let dir = parent_of(path);
    fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Fills a sibling temporary directory, then renames it to `path`.
fn write_dir_atomic(path: &Path, fill: impl FnOnce(&Path) -> anyhow::Result<()>) -> Outcome {
    if path.exists() {
        return Err(Failure::Usage(format!("output {} already exists", path.display())));
    }
    let parent = parent_of(path);
    fs::create_dir_all(&parent).context("creating output parent")?;
    let tmp = tempfile::Builder::new().prefix(".blda-").tempdir_in(&parent).context("creating temp dir")?;
    fill(tmp.path())?;
    fs::rename(tmp.keep(), path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

fn fmt_list(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn cmd_fit(a: FitArgs) -> Outcome {
    let data = load(&a.train)?;
    let r = a.r as usize;
    let projector = if a.method == Method::TwoDLDA {
        let fit = fit_2dlda(&data, r, a.ridge)?;
        if fit.auto_ridge {
            eprintln!("warning: within-class scatter is singular; applied ridge {}", fit.ridge);
        }
        fit.projector
    } else {
        if a.ridge.is_some() {
            eprintln!("warning: --ridge only applies to 2dlda; ignored");
        }
        blda_core::fit(a.method, &data, r, None)?
    };
    write_atomic(&a.output, &projector.to_text())?;
    let stats = compute_stats(&data)?;
    println!(
        "method={} r={} eigenvalues=[{}] delta={}",
        projector.method,
        projector.r(),
        fmt_list(&projector.eigenvalues),
        delta(&stats)
    );
    Ok(())
}

fn read_projector(path: &Path) -> std::result::Result<Projector, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("projector {}: {e}", path.display())))?;
    Ok(Projector::from_text(&text)?)
}

fn cmd_transform(a: TransformArgs, rebuild: bool) -> Outcome {
    let p = read_projector(&a.projector)?;
    let data = load(&a.input)?;
    let f = if rebuild { reconstruct } else { project };
    let samples = data.samples().iter().map(|x| f(&p, x)).collect::<blda_core::Result<Vec<_>>>()?;
    let out = LabeledMatrixDataset::with_classes(samples, data.labels().to_vec(), data.classes())?;
    write_dir_atomic(&a.output, |dir| {
        save_dataset(&out, dir)?;
        Ok(())
    })?;
    if rebuild {
        println!("are={}", average_reconstruction_error(data.samples(), &p)?);
    }
    Ok(())
}

fn r_list(a: &CurveArgs, d1: usize) -> std::result::Result<Vec<usize>, Failure> {
    let list: Vec<usize> = if !a.r.is_empty() {
        a.r.iter().map(|&r| r as usize).collect()
    } else {
        let lo = a.r_min.unwrap_or(1) as usize;
        let hi = a.r_max.map(|v| v as usize).unwrap_or(d1);
        if lo > hi {
            return Err(Failure::Usage(format!("--r-min {lo} exceeds --r-max {hi}")));
        }
        (lo..=hi).collect()
    };
    if let Some(r) = list.iter().find(|&&r| r > d1) {
        return Err(Failure::Usage(format!("r = {r} exceeds d1 = {d1}")));
    }
    Ok(list)
}

fn cmd_curve(a: CurveArgs) -> Outcome {
    let corruption = a.corruption.spec(a.seed);
    if let Some(spec) = &corruption {
        spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let full = load(&a.train)?;
    let (train, test) = match (&a.test, a.per_class_train) {
        (Some(test), _) => (full, load(test)?),
        (None, Some(k)) => split(&full, k, a.seed)?,
        (None, None) => return Err(Failure::Usage("--test or --per-class-train is required".into())),
    };
    if test.shape() != train.shape() {
        return Err(Failure::Runtime(anyhow!("train images are {:?} but test images are {:?}", train.shape(), test.shape())));
    }
    let r_values = r_list(&a, train.shape().0)?;

    let fit_set = match &corruption {
        Some(spec) => spec.apply(&train)?,
        None => train.clone(),
    };
    // reconstruction is measured on the training images; injected dummies are not among them
    let are_set = match &corruption {
        Some(spec) if spec.kind == CorruptionKind::DummyImages => train,
        _ => fit_set.clone(),
    };
    let eval_set = match a.metric {
        Metric::Accuracy => &test,
        Metric::Are => &are_set,
    };
    let dataset = a.train.display().to_string();
    let mut csv = format!("{}\n", ExperimentReport::CSV_HEADER);
    for &method in &a.methods {
        let spec = CurveSpec {
            method,
            r_list: &r_values,
            ridge: a.ridge,
            metric: a.metric,
            seed: a.seed,
            dataset: &dataset,
        };
        let report = metric_curve(&fit_set, eval_set, &spec).with_context(|| format!("method {method}"))?;
        csv.push_str(&report.csv_rows());
    }
    write_atomic(&a.output, &csv)?;
    if corruption.is_some() {
        println!("rng={RNG_ALGORITHM} seed={}", a.seed);
    }
    Ok(())
}

fn cmd_corrupt(a: CorruptArgs) -> Outcome {
    let spec = a
        .corruption
        .spec(a.seed)
        .ok_or_else(|| Failure::Usage("--corruption is required".into()))?;
    spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let data = load(&a.input)?;
    let out = spec.apply(&data)?;
    let sidecar = serde_json::to_string_pretty(&spec).context("serializing corruption spec")?;
    write_dir_atomic(&a.output, |dir| {
        save_dataset(&out, dir)?;
        fs::write(dir.join("corruption.json"), sidecar + "\n")?;
        Ok(())
    })?;
    println!("wrote {} images ({} added) rng={RNG_ALGORITHM}", out.len(), out.len() - data.len());
    Ok(())
}

fn cmd_bound_check(a: BoundArgs) -> Outcome {
    let data = load(&a.input)?;
    let v = verify_bound(&data, a.trials, a.seed)?;
    let mut csv = String::from("trial,epsilon_b,rhs,margin,b_cap\n");
    for rec in &v.records {
        let rep = &rec.report;
        writeln!(csv, "{},{},{},{},{}", rec.trial, rep.epsilon_b, rep.rhs, rep.margin, rep.b_cap).unwrap();
    }
    write_atomic(&a.output, &csv)?;
    println!("success_fraction={} trials={}", v.success_fraction(), v.records.len());
    Ok(())
}

fn cmd_split(a: SplitArgs) -> Outcome {
    let data = load(&a.input)?;
    let (train, test) = split(&data, a.per_class_train, a.seed)?;
    write_dir_atomic(&a.output, |dir| {
        save_dataset(&train, &dir.join("train"))?;
        save_dataset(&test, &dir.join("test"))?;
        Ok(())
    })?;
    println!("train={} test={}", train.len(), test.len());
    Ok(())
}
