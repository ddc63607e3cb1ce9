//! `skinseg` command-line tool.
//!
//! ```text
//! skinseg train  --class NAME=a.ppm,b.ppm [--class ...] [--window 16x16] [--quant 16]
//!                [--metric gower] [--slack 1.0] --out model.json
//! skinseg detect IMAGE.ppm --model model.json --out mask.pgm [--decisions windows.tsv]
//! skinseg eval   --model model.json --pair IMAGE.ppm=TRUTH.pgm [--pair ...] [--out report.tsv]
//! skinseg synth  SPEC.txt --out image.ppm --truth truth.pgm
//! ```
//!
//! Exit codes: 0 on success, 1 for invalid data or training failures, 2 for
//! usage and I/O errors.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use skinseg::evaluation::{report_tsv, GroundTruth};
use skinseg::metrics::Metric;
use skinseg::synth::{generate, SynthSpec};
use skinseg::{decode_pgm, decode_ppm, detect, encode_gray, encode_pgm, encode_ppm, evaluate, load_model, save_model, train_multi, Image, TrainConfig};

use output::Outputs;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Data { path: PathBuf, source: skinseg::Error },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] skinseg::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Usage(_) => 2,
            CliError::Data { .. } | CliError::Lib(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "skinseg", version, about = "Window-level skin detection from color histograms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one model per skin class from pure-skin PPM images.
    Train {
        /// NAME=path[,path...]; repeat for more classes.
        #[arg(long = "class", required = true, value_name = "NAME=PATHS")]
        classes: Vec<ClassArg>,
        /// Window size as WxH.
        #[arg(long, default_value = "16x16", value_name = "WxH")]
        window: WindowArg,
        /// Histogram bins summed per feature dimension; must divide 256.
        #[arg(long, default_value_t = 16, value_name = "N")]
        quant: usize,
        /// gower, bhattacharyya, city_block, soergel or euclidean.
        #[arg(long, default_value = "gower", value_name = "NAME")]
        metric: Metric,
        /// Multiplier on the largest training distance.
        #[arg(long, default_value_t = 1.0, value_name = "X")]
        slack: f64,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Classify the windows of one PPM image and write a PGM mask.
    Detect {
        image: PathBuf,
        #[arg(long, value_name = "PATH")]
        model: PathBuf,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
        /// Also write one tab-separated line per window.
        #[arg(long, value_name = "PATH")]
        decisions: Option<PathBuf>,
    },
    /// Score detections against ground-truth PGM masks.
    Eval {
        #[arg(long, value_name = "PATH")]
        model: PathBuf,
        /// IMAGE.ppm=TRUTH.pgm; repeat for more images.
        #[arg(long = "pair", required = true, value_name = "IMAGE=TRUTH")]
        pairs: Vec<PairArg>,
        /// Report path; stdout when omitted.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Render a synthetic scene and its ground truth from a spec file.
    Synth {
        spec: PathBuf,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
        #[arg(long, value_name = "PATH")]
        truth: PathBuf,
    },
}

#[derive(Debug, Clone)]
struct ClassArg {
    name: String,
    paths: Vec<PathBuf>,
}

impl FromStr for ClassArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (name, paths) = s.split_once('=').ok_or("expected NAME=path[,path...]")?;
        if name.is_empty() {
            return Err("class name is empty".into());
        }
        let paths: Vec<PathBuf> = paths.split(',').filter(|p| !p.is_empty()).map(PathBuf::from).collect();
        if paths.is_empty() {
            return Err(format!("class `{name}` lists no images"));
        }
        Ok(Self { name: name.to_owned(), paths })
    }
}

#[derive(Debug, Clone, Copy)]
struct WindowArg(usize, usize);

impl FromStr for WindowArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (w, h) = s.split_once(['x', 'X']).ok_or("expected WxH, e.g. 16x16")?;
        let parse = |v: &str| v.parse::<usize>().map_err(|_| format!("invalid window dimension `{v}`"));
        Ok(Self(parse(w)?, parse(h)?))
    }
}

#[derive(Debug, Clone)]
struct PairArg {
    image: PathBuf,
    truth: PathBuf,
}

impl FromStr for PairArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (image, truth) = s.split_once('=').ok_or("expected IMAGE=TRUTH")?;
        if image.is_empty() || truth.is_empty() {
            return Err("both IMAGE and TRUTH paths are required".into());
        }
        Ok(Self { image: image.into(), truth: truth.into() })
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn read_image(path: &Path) -> Result<Image, CliError> {
    decode_ppm(&read(path)?).map_err(|source| CliError::Data { path: path.to_path_buf(), source })
}

fn read_model(path: &Path) -> Result<skinseg::SkinModelSet, CliError> {
    load_model(&read(path)?).map_err(|source| CliError::Data { path: path.to_path_buf(), source })
}

fn run_train(
    classes: Vec<ClassArg>,
    window: WindowArg,
    quant: usize,
    metric: Metric,
    slack: f64,
    out: &Path,
) -> Result<(), CliError> {
    let config = TrainConfig { window_w: window.0, window_h: window.1, quant_n: quant, metric, threshold_slack: slack };
    config.validate()?;
    for w in config.warnings() {
        eprintln!("warning: {w}");
    }
    let mut class_images = Vec::with_capacity(classes.len());
    for class in classes {
        let images = class.paths.iter().map(|p| read_image(p)).collect::<Result<Vec<_>, _>>()?;
        class_images.push((class.name, images));
    }
    let set = train_multi(&class_images, &config)?;
    let mut outputs = Outputs::default();
    outputs.stage(out, &save_model(&set))?;
    outputs.commit()?;
    println!("class\twindows\tthreshold");
    for c in set.classes() {
        println!("{}\t{}\t{}", c.name, c.train_window_count, c.threshold);
    }
    Ok(())
}

fn run_detect(image: &Path, model: &Path, out: &Path, decisions: Option<&Path>) -> Result<(), CliError> {
    let set = read_model(model)?;
    let img = read_image(image)?;
    let detection = detect(&img, &set).map_err(|source| CliError::Data { path: image.to_path_buf(), source })?;
    let mut outputs = Outputs::default();
    outputs.stage(out, &encode_pgm(&detection.mask)?)?;
    if let Some(path) = decisions {
        outputs.stage(path, detection.decisions_tsv().as_bytes())?;
    }
    outputs.commit()
}

fn run_eval(model: &Path, pairs: &[PairArg], out: Option<&Path>) -> Result<(), CliError> {
    if pairs.is_empty() {
        return Err(CliError::Usage("eval needs at least one --pair IMAGE=TRUTH".into()));
    }
    let set = read_model(model)?;
    let mut rows = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let image = read_image(&pair.image)?;
        let truth = decode_pgm(&read(&pair.truth)?)
            .and_then(|g| GroundTruth::from_gray(&g))
            .map_err(|source| CliError::Data { path: pair.truth.clone(), source })?;
        let report = evaluate(&image, &truth, &set).map_err(|source| CliError::Data {
            path: PathBuf::from(format!("{}={}", pair.image.display(), pair.truth.display())),
            source,
        })?;
        rows.push((pair.image.display().to_string(), report));
    }
    let tsv = report_tsv(&rows);
    match out {
        Some(path) => {
            let mut outputs = Outputs::default();
            outputs.stage(path, tsv.as_bytes())?;
            outputs.commit()
        }
        None => {
            print!("{tsv}");
            Ok(())
        }
    }
}

fn run_synth(spec: &Path, out: &Path, truth: &Path) -> Result<(), CliError> {
    let text = String::from_utf8(read(spec)?).map_err(|e| CliError::Io {
        path: spec.to_path_buf(),
        source: std::io::Error::new(std::io::ErrorKind::InvalidData, e),
    })?;
    let parsed = SynthSpec::parse(&text).map_err(|source| CliError::Data { path: spec.to_path_buf(), source })?;
    let (image, gt) = generate(&parsed).map_err(|source| CliError::Data { path: spec.to_path_buf(), source })?;
    let mut outputs = Outputs::default();
    outputs.stage(out, &encode_ppm(&image))?;
    outputs.stage(truth, &encode_gray(&gt.to_gray()))?;
    outputs.commit()
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Train { classes, window, quant, metric, slack, out } => {
            run_train(classes, window, quant, metric, slack, &out)
        }
        Command::Detect { image, model, out, decisions } => run_detect(&image, &model, &out, decisions.as_deref()),
        Command::Eval { model, pairs, out } => run_eval(&model, &pairs, out.as_deref()),
        Command::Synth { spec, out, truth } => run_synth(&spec, &out, &truth),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
