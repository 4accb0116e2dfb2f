//! Command implementations behind the `digitrec` binary: extract features from labeled digit scans, train and apply
//! the classifier, and run cross-validation experiments.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
//! Results go to stdout; diagnostics go to stderr.

pub mod sizes;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::ffi::OsString;

use clap::{Args, Parser, Subcommand};
use digitrec::corpus::{load_corpus, read_features_csv, write_features_csv, SkipReason};
use digitrec::eval::{cross_validate, format_percent, sweep_with, EvaluationReport};
use digitrec::mlp::{load_model_file, save_model_file, ModelIoError};
use digitrec::pgm::{read_pgm, write_pgm};
use digitrec::toy::make_toy_images;
use digitrec::{
    extract_features, init_model, train, Binarization, Dataset, EvalError, ThresholdMode,
    TrainingConfig, FEATURE_LEN, NUM_CLASSES,
};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Data(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(name = "digitrec", version, about = "Handwritten digit recognition with structural features and an MLP")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the 76-feature CSV for a labeled image directory
    Extract {
        #[arg(long)]
        data_dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        image: ImageArgs,
    },
    /// Train a 76-H-10 network and save it
    Train {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        model_out: PathBuf,
        #[command(flatten)]
        training: TrainArgs,
    },
    /// Classify one image with a saved model
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        image: PathBuf,
        #[command(flatten)]
        image_args: ImageArgs,
    },
    /// Stratified k-fold cross-validation
    Crossval {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 3)]
        folds: usize,
        #[command(flatten)]
        training: TrainArgs,
        /// Per-fold accuracy CSV
        #[arg(long)]
        report: PathBuf,
        /// Pooled confusion matrix; defaults to the report path with a `.confusion.txt` extension
        #[arg(long)]
        confusion: Option<PathBuf>,
    },
    /// Cross-validate a range of hidden-layer sizes
    Sweep {
        #[command(flatten)]
        source: SourceArgs,
        /// Sizes as `start:end:step`, a comma list, or a mix
        #[arg(long, default_value = "25:70:5")]
        sizes: String,
        #[arg(long, default_value_t = 3)]
        folds: usize,
        #[command(flatten)]
        training: TrainArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render the synthetic glyph corpus as PGM files under `0/` … `9/`
    ToyCorpus {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 20)]
        per_class: usize,
        #[arg(long, default_value_t = 0.05)]
        noise: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args, Clone)]
struct ImageArgs {
    /// Gray level below which a pixel counts as ink
    #[arg(long, default_value_t = 128, conflicts_with = "otsu")]
    threshold: u8,
    /// Pick the threshold per image with Otsu's method
    #[arg(long)]
    otsu: bool,
    /// Ink is lighter than paper
    #[arg(long)]
    invert: bool,
}

impl ImageArgs {
    fn binarization(&self) -> Binarization {
        Binarization {
            mode: if self.otsu {
                ThresholdMode::Otsu
            } else {
                ThresholdMode::Fixed(self.threshold)
            },
            invert: self.invert,
        }
    }
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "source")]
struct SourceGroup {
    /// Directory with subdirectories 0..9 of PGM images
    #[arg(long)]
    data_dir: Option<PathBuf>,
    /// Feature CSV written by `extract`
    #[arg(long)]
    features: Option<PathBuf>,
}

#[derive(Args)]
struct SourceArgs {
    #[command(flatten)]
    group: SourceGroup,
    #[command(flatten)]
    image: ImageArgs,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long, default_value_t = 65)]
    hidden: usize,
    #[arg(long, default_value_t = 0.8)]
    lr: f64,
    #[arg(long, default_value_t = 0.7)]
    momentum: f64,
    #[arg(long, default_value_t = 500)]
    epochs: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1e-4)]
    stop_tolerance: f64,
    #[arg(long, default_value_t = 20)]
    patience: usize,
}

impl TrainArgs {
    fn config(&self) -> Result<TrainingConfig> {
        let config = TrainingConfig {
            learning_rate: self.lr,
            momentum: self.momentum,
            max_epochs: self.epochs,
            seed: self.seed,
            hidden_size: self.hidden,
            stop_tolerance: self.stop_tolerance,
            patience: self.patience,
        };
        config
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(config)
    }
}

fn load_images(dir: &Path, image: &ImageArgs) -> Result<Dataset> {
    let loaded = load_corpus(dir, &image.binarization()).map_err(|e| CliError::Data(e.to_string()))?;
    for (path, reason) in &loaded.skipped {
        let why = match reason {
            SkipReason::Blank => "no ink under the threshold",
            SkipReason::NotAnImage => "not a .pgm/.pnm file",
        };
        eprintln!("warning: skipped {}: {why}", path.display());
    }
    let counts = loaded.dataset.class_counts();
    let summary: Vec<String> = counts
        .iter()
        .enumerate()
        .map(|(label, n)| format!("{label}:{n}"))
        .collect();
    eprintln!(
        "loaded {} samples from {} ({}), skipped {}",
        loaded.dataset.len(),
        dir.display(),
        summary.join(" "),
        loaded.skipped.len()
    );
    Ok(loaded.dataset)
}

fn load_source(source: &SourceArgs) -> Result<Dataset> {
    let data = match (&source.group.data_dir, &source.group.features) {
        (Some(dir), _) => load_images(dir, &source.image)?,
        (None, Some(csv)) => {
            let file = fs::File::open(csv)
                .map_err(|e| CliError::Data(format!("{}: {e}", csv.display())))?;
            read_features_csv(file).map_err(|e| CliError::Data(format!("{}: {e}", csv.display())))?
        }
        (None, None) => unreachable!("clap enforces one data source"),
    };
    if data.is_empty() {
        return Err(CliError::Data("no usable samples in the data source".into()));
    }
    Ok(data)
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
}

fn cmd_extract(data_dir: &Path, out: &Path, image: &ImageArgs) -> Result<()> {
    let data = load_images(data_dir, image)?;
    let mut buf = Vec::new();
    write_features_csv(&mut buf, &data).map_err(|e| CliError::Internal(e.to_string()))?;
    write_file(out, &buf)?;
    println!("wrote {} feature rows to {}", data.len(), out.display());
    Ok(())
}

fn cmd_train(source: &SourceArgs, model_out: &Path, args: &TrainArgs) -> Result<()> {
    let config = args.config()?;
    let data = load_source(source)?;
    let classes = data.class_counts().iter().filter(|&&n| n > 0).count();
    if classes < 2 {
        return Err(CliError::Data(format!(
            "training needs at least 2 classes, found {classes}"
        )));
    }
    let (model, history) = train(init_model(&config), data.samples(), &config)
        .map_err(|e| CliError::Data(e.to_string()))?;
    save_model_file(&model, model_out)
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", model_out.display())))?;
    let [n_in, n_hid, n_out] = model.layer_sizes();
    println!("model: {n_in}-{n_hid}-{n_out}, {} epochs", history.len());
    println!("final SSE: {:.6}", model.sum_squared_error(data.samples()));
    println!(
        "training accuracy: {}%",
        format_percent(100.0 * model.accuracy(data.samples()))
    );
    Ok(())
}

fn cmd_predict(model_path: &Path, image_path: &Path, image: &ImageArgs) -> Result<()> {
    let model = load_model_file(model_path).map_err(|e| match e {
        ModelIoError::Io(io) => CliError::Data(format!("{}: {io}", model_path.display())),
        other => CliError::Data(format!("{}: {other}", model_path.display())),
    })?;
    let [n_in, _, n_out] = model.layer_sizes();
    if n_in != FEATURE_LEN || n_out != NUM_CLASSES {
        return Err(CliError::Data(format!(
            "{}: shape mismatch: model is {n_in} inputs / {n_out} outputs, expected {FEATURE_LEN} / {NUM_CLASSES}",
            model_path.display()
        )));
    }
    let gray = read_pgm(image_path).map_err(|e| CliError::Data(format!("{}: {e}", image_path.display())))?;
    let bin = image
        .binarization()
        .normalize(&gray)
        .map_err(|e| CliError::Data(format!("{}: {e}", image_path.display())))?;
    let features = extract_features(&bin);
    let outputs = model.forward(features.as_slice());
    println!("{}", digitrec::mlp::argmax(&outputs));
    let formatted: Vec<String> = outputs.iter().map(|o| format!("{o:.6}")).collect();
    println!("{}", formatted.join(" "));
    Ok(())
}

fn cmd_crossval(
    source: &SourceArgs,
    folds: usize,
    args: &TrainArgs,
    report_path: &Path,
    confusion_path: Option<&Path>,
) -> Result<()> {
    if folds < 2 {
        return Err(CliError::Usage(format!("--folds must be at least 2, got {folds}")));
    }
    let config = args.config()?;
    let data = load_source(source)?;
    let report = cross_validate(&data, &config, folds)?;
    write_file(report_path, report.to_csv().as_bytes())?;
    let confusion_path = confusion_path
        .map(Path::to_path_buf)
        .unwrap_or_else(|| report_path.with_extension("confusion.txt"));
    write_file(&confusion_path, report.confusion.to_text().as_bytes())?;
    for (i, f) in report.folds.iter().enumerate() {
        eprintln!(
            "fold {}: train {} test {} accuracy {}%",
            i + 1,
            f.train_size,
            f.test_size,
            format_percent(f.accuracy)
        );
    }
    println!("mean accuracy: {}%", format_percent(report.mean_accuracy));
    Ok(())
}

fn cmd_sweep(source: &SourceArgs, sizes: &str, folds: usize, args: &TrainArgs, out: &Path) -> Result<()> {
    if folds < 2 {
        return Err(CliError::Usage(format!("--folds must be at least 2, got {folds}")));
    }
    let config = args.config()?;
    let parsed = sizes::parse_sizes(sizes).map_err(CliError::Usage)?;
    let data = load_source(source)?;
    let selected = sweep_command(sizes, out, |hidden| {
        let config = TrainingConfig { hidden_size: hidden, ..config.clone() };
        cross_validate(&data, &config, folds)
    })?;
    debug_assert!(parsed.contains(&selected));
    println!("selected hidden size: {selected}");
    Ok(())
}

/// Runs `evaluate` for every hidden size in
/// `sizes_spec`, writes the sweep CSV to `out` and returns the selected size.
pub fn sweep_command<F>(sizes_spec: &str, out: &Path, evaluate: F) -> Result<usize>
where
    F: FnMut(usize) -> std::result::Result<EvaluationReport, EvalError>,
{
    let sizes = sizes::parse_sizes(sizes_spec).map_err(CliError::Usage)?;
    let table = sweep_with(&sizes, evaluate)?;
    write_file(out, table.to_csv().as_bytes())?;
    for row in &table.rows {
        eprintln!("hidden {}: mean {}%", row.hidden_size, format_percent(row.mean));
    }
    Ok(table.selected().expect("sweep has at least one row"))
}

fn cmd_toy_corpus(out_dir: &Path, per_class: usize, noise: f64, seed: u64) -> Result<()> {
    if per_class == 0 || !(0.0..1.0).contains(&noise) {
        return Err(CliError::Usage(
            "--per-class must be positive and --noise in [0, 1)".into(),
        ));
    }
    for label in 0..NUM_CLASSES {
        let dir = out_dir.join(label.to_string());
        fs::create_dir_all(&dir)
            .map_err(|e| CliError::Internal(format!("cannot create {}: {e}", dir.display())))?;
    }
    let glyphs = make_toy_images(per_class, noise, seed);
    for (i, g) in glyphs.iter().enumerate() {
        let path = out_dir
            .join(g.label.to_string())
            .join(format!("{:05}.pgm", i / NUM_CLASSES));
        write_pgm(&path, &g.image.to_gray())
            .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
    }
    println!("wrote {} images to {}", glyphs.len(), out_dir.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Extract { data_dir, out, image } => cmd_extract(&data_dir, &out, &image),
        Command::Train { source, model_out, training } => cmd_train(&source, &model_out, &training),
        Command::Predict { model, image, image_args } => cmd_predict(&model, &image, &image_args),
        Command::Crossval { source, folds, training, report, confusion } => {
            cmd_crossval(&source, folds, &training, &report, confusion.as_deref())
        }
        Command::Sweep { source, sizes, folds, training, out } => {
            cmd_sweep(&source, &sizes, folds, &training, &out)
        }
        Command::ToyCorpus { out_dir, per_class, noise, seed } => {
            cmd_toy_corpus(&out_dir, per_class, noise, seed)
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => {
            let _ = std::io::stdout().flush();
            0
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
