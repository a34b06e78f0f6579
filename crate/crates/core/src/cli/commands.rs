use std::fs;
use std::io::Write;
use std::path::Path;

use super::{
    AnomalyCmd, ClassifyCmd, Cli, CurseCmd, DataArgs, DenoiseCmd, FeatureSet, ModelArgs, PcaEquivCmd,
    ReconstructCmd, Recorder, ReplayCmd, RunManifest, TrainCmd, EXIT_CHECK_FAILED, EXIT_OK,
};
use crate::anomaly::{self, AnomalyConfig};
use crate::baselines::{self, EquivalenceConfig};
use crate::data_io::{self, Dataset};
use crate::denoise::{self, NoiseSpec};
use crate::error::{Error, Result};
use crate::latent_tasks::{self, BenchResult};
use crate::loss::LossKind;
use crate::metrics::{self, format_real, ReEntry, ReReport};
use crate::nn::{Activation, Architecture};
use crate::tensor::Matrix;
use crate::train::{self, TrainConfig};

/// Added to the run seed to draw the evaluation noise, so it differs from
/// every training-epoch draw.
const TEST_NOISE_OFFSET: u64 = 1 << 32;

struct Loaded {
    dataset: Dataset,
    cell: (usize, usize),
}

fn load(images: &Path, labels: Option<&Path>, raw: bool, limit: Option<usize>, seed: u64, rec: &mut Recorder) -> Result<Loaded> {
    rec.input(images);
    let bytes = fs::read(images).map_err(|e| Error::io(images, e))?;
    let (features, cell) = data_io::parse_idx_images(&bytes, images)?;
    let labels = match labels {
        Some(p) => {
            rec.input(p);
            let bytes = fs::read(p).map_err(|e| Error::io(p, e))?;
            Some(data_io::parse_idx_labels(&bytes, p)?)
        }
        None => None,
    };
    let mut dataset = Dataset::new(features, labels, images.display().to_string())?;
    if let Some(n) = limit {
        if n == 0 {
            return Err(Error::Config("row limits must be at least 1".into()));
        }
        dataset = dataset.subsample(n, seed);
    }
    if !raw {
        dataset = data_io::normalize_01(dataset);
    }
    Ok(Loaded { dataset, cell })
}

fn architecture(model: &ModelArgs, default_arch: &str, raw: bool) -> Result<Architecture> {
    let sizes = Architecture::parse_sizes(model.arch.as_deref().unwrap_or(default_arch))?;
    let output = model
        .out_act
        .unwrap_or(if raw { Activation::Identity } else { Activation::Sigmoid });
    Ok(Architecture::new(sizes, model.hidden_act, output))
}

fn train_config(model: &ModelArgs, seed: u64) -> TrainConfig {
    TrainConfig {
        loss: model.loss,
        optimizer: model.optimizer,
        learning_rate: model.lr,
        epochs: model.epochs,
        batch_size: model.batch,
        l2_lambda: model.l2,
        tied_weights: model.tied,
        shuffle_seed: seed,
        report_progress: !model.quiet,
        ..TrainConfig::default()
    }
}

/// Writes `text` to `path` (recorded as an output) or to standard output.
fn emit(text: &str, path: Option<&Path>, deterministic: bool, rec: &mut Recorder) -> Result<()> {
    match path {
        Some(p) => {
            rec.output(p, deterministic)?;
            fs::write(p, text).map_err(|e| Error::io(p, e))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn write_grid(rows: &Matrix, grid_cols: usize, cell: (usize, usize), path: &Path, rec: &mut Recorder) -> Result<()> {
    rec.output(path, true)?;
    // reconstructions from non-sigmoid outputs can leave [0, 1]
    let clipped = rows.map(|v| v.clamp(0.0, 1.0));
    data_io::write_pgm_grid(&clipped, grid_cols, cell.0, cell.1, path)
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad {what} `{}` in `{text}`", tok.trim())))
        })
        .collect()
}

pub fn train(cmd: &TrainCmd, rec: &mut Recorder) -> Result<i32> {
    let DataArgs { raw, limit_train, seed, .. } = cmd.input;
    rec.seed("seed", seed);
    let arch = architecture(&cmd.model, "784,16,784", raw)?;
    let config = train_config(&cmd.model, seed);
    config.validate()?;
    let data = load(&cmd.data, None, raw, limit_train, seed, rec)?.dataset;
    let x = &data.features;
    let report = train::fit(arch.build(seed)?, x, x, &config)?;

    rec.output(&cmd.out, true)?;
    data_io::save_model(&report.model, &cmd.out)?;
    if let Some(p) = &cmd.text_out {
        rec.output(p, true)?;
        fs::write(p, data_io::export_model_text(&report.model)).map_err(|e| Error::io(p, e))?;
    }
    let re = metrics::dataset_re(x, &report.model.reconstruct(x)?)?;
    println!("rows\t{}", data.len());
    println!("final_loss\t{}", format_real(report.epoch_losses.last().copied().unwrap_or(f64::NAN)));
    println!("train_re\t{}", format_real(re));
    println!("seconds\t{:.3}", report.wall_time_secs);
    Ok(EXIT_OK)
}

pub fn reconstruct(cmd: &ReconstructCmd, rec: &mut Recorder) -> Result<i32> {
    rec.input(&cmd.model);
    let model = data_io::load_model(&cmd.model)?;
    let Loaded { dataset, cell } = load(&cmd.data, None, cmd.raw, None, 0, rec)?;
    let indices: Vec<usize> = match &cmd.indices {
        Some(text) => parse_list(text, "index")?,
        None => (0..10.min(dataset.len())).collect(),
    };
    if indices.is_empty() {
        return Err(Error::Config("no indices selected".into()));
    }
    if let Some(&bad) = indices.iter().find(|&&i| i >= dataset.len()) {
        return Err(Error::Range(format!("index {bad} out of range for {} rows", dataset.len())));
    }
    let x = dataset.features.select_rows(&indices);
    let x_hat = model.reconstruct(&x)?;
    let re = metrics::per_observation_re(&x, &x_hat)?;
    let report = ReReport {
        entries: indices.iter().zip(&re).map(|(&index, &re)| ReEntry { index, re }).collect(),
        sorted_desc: false,
    };
    if let Some(p) = &cmd.grid_out {
        write_grid(&x.vstack(&x_hat)?, indices.len(), cell, p, rec)?;
    }
    emit(&report.to_csv(), cmd.csv_out.as_deref(), true, rec)?;
    eprintln!("mean RE {}", format_real(re.iter().sum::<f64>() / re.len() as f64));
    Ok(EXIT_OK)
}

pub fn anomaly(cmd: &AnomalyCmd, rec: &mut Recorder) -> Result<i32> {
    let DataArgs { raw, limit_train, limit_test, seed } = cmd.input;
    rec.seed("seed", seed);
    let config = AnomalyConfig::with_seeds(cmd.ensemble, cmd.agg, cmd.top_k, seed);
    config.validate()?;
    let arch = architecture(&cmd.model, "784,64,784", raw)?;
    let train_cfg = train_config(&cmd.model, seed);
    train_cfg.validate()?;

    let train = load(&cmd.train_data, None, raw, limit_train, seed, rec)?;
    let mut eval = load(&cmd.eval_data, None, raw, limit_test, seed, rec)?;
    let mut injected = None;
    if let Some(path) = &cmd.inject {
        let extra = load(path, None, raw, None, seed, rec)?.dataset;
        if cmd.inject_index >= extra.len() {
            return Err(Error::Range(format!(
                "inject index {} out of range for {} rows",
                cmd.inject_index,
                extra.len()
            )));
        }
        let (with_row, index) = data_io::inject(&eval.dataset, extra.features.row(cmd.inject_index), None)?;
        eval.dataset = with_row;
        injected = Some(index);
    }

    let (report, models) = anomaly::detect(&train.dataset.features, &eval.dataset.features, &arch, &train_cfg, &config)?;
    emit(&report.ranking.to_csv(), cmd.csv_out.as_deref(), true, rec)?;
    if let Some(p) = &cmd.grid_out {
        let top: Vec<usize> = report.outliers().iter().map(|e| e.index).collect();
        let inputs = eval.dataset.features.select_rows(&top);
        let recon = models[0].reconstruct(&inputs)?;
        write_grid(&inputs.vstack(&recon)?, top.len(), eval.cell, p, rec)?;
    }
    if let Some(index) = injected {
        let rank = report.ranking.rank_of(index).expect("every row is ranked") + 1;
        eprintln!("injected row {index} ranked {rank} of {}", report.ranking.len());
    }
    Ok(EXIT_OK)
}

pub fn denoise(cmd: &DenoiseCmd, rec: &mut Recorder) -> Result<i32> {
    let DataArgs { raw, limit_train, limit_test, seed } = cmd.input;
    let spec = NoiseSpec {
        scale: cmd.scale,
        seed,
        clip: Some((0.0, 1.0)),
        frozen: cmd.frozen_noise,
    };
    spec.validate()?;
    let test_spec = NoiseSpec {
        seed: seed.wrapping_add(TEST_NOISE_OFFSET),
        ..spec
    };
    rec.seed("seed", seed);
    rec.seed("test_noise_seed", test_spec.seed);
    let arch = architecture(&cmd.model, "784,32,784", raw)?;
    let config = train_config(&cmd.model, seed);
    config.validate()?;

    let loaded = load(&cmd.data, None, raw, limit_train, seed, rec)?;
    let cell = loaded.cell;
    let (train_set, test_set) = match &cmd.test_data {
        Some(p) => (loaded.dataset, load(p, None, raw, limit_test, seed, rec)?.dataset),
        None => {
            let rows = loaded.dataset.len();
            let held = (rows / 10).max(1);
            if rows < 2 {
                return Err(Error::EmptyInput("need at least 2 rows to hold out a test set".into()));
            }
            let train_rows: Vec<usize> = (0..rows - held).collect();
            let test_rows: Vec<usize> = (rows - held..rows).collect();
            (loaded.dataset.select(&train_rows), loaded.dataset.select(&test_rows))
        }
    };

    let report = denoise::fit_denoiser(arch.build(seed)?, &train_set.features, &spec, &config)?;
    let (eval, noisy, denoised) = denoise::evaluate_denoiser(&report.model, &test_set.features, &test_spec)?;
    if let Some(p) = &cmd.model_out {
        rec.output(p, true)?;
        data_io::save_model(&report.model, p)?;
    }
    if let Some(p) = &cmd.grid_out {
        let shown = cmd.show.min(test_set.len());
        if shown == 0 {
            return Err(Error::Config("--show must be at least 1".into()));
        }
        let mut rows = Vec::with_capacity(3 * shown);
        for i in 0..shown {
            rows.push(noisy.row(i).to_vec());
            rows.push(test_set.features.row(i).to_vec());
            rows.push(denoised.row(i).to_vec());
        }
        write_grid(&Matrix::from_rows(&rows)?, 3, cell, p, rec)?;
    }
    println!("mse_noisy\t{}", format_real(eval.mse_noisy));
    println!("mse_denoised\t{}", format_real(eval.mse_denoised));
    println!("ratio\t{:.4}", eval.ratio());
    println!("improved\t{}", eval.improved());
    Ok(EXIT_OK)
}

pub fn classify(cmd: &ClassifyCmd, rec: &mut Recorder) -> Result<i32> {
    let DataArgs { raw, limit_train, limit_test, seed } = cmd.input;
    rec.seed("seed", seed);
    let model = match (&cmd.model, cmd.features) {
        (Some(p), _) => {
            rec.input(p);
            Some(data_io::load_model(p)?)
        }
        (None, FeatureSet::Raw) => None,
        (None, _) => return Err(Error::Config("latent features need --model".into())),
    };
    let train = load(&cmd.train_data, Some(&cmd.train_labels), raw, limit_train, seed, rec)?.dataset;
    let test = load(&cmd.test_data, Some(&cmd.test_labels), raw, limit_test, seed, rec)?.dataset;
    let (train_labels, test_labels) = (train.labels_or_err()?, test.labels_or_err()?);

    let mut results: Vec<(&str, BenchResult)> = Vec::new();
    if cmd.features != FeatureSet::Latent {
        results.push(("raw", latent_tasks::benchmark(&train.features, train_labels, &test.features, test_labels, cmd.k)?));
    }
    if let (Some(model), true) = (&model, cmd.features != FeatureSet::Raw) {
        let train_codes = model.encode(&train.features)?;
        let test_codes = model.encode(&test.features)?;
        results.push(("latent", latent_tasks::benchmark(&train_codes, train_labels, &test_codes, test_labels, cmd.k)?));
    }
    let mut csv = format!("{}\n", latent_tasks::CSV_HEADER);
    for (name, r) in &results {
        csv.push_str(&latent_tasks::csv_row(name, r));
        csv.push('\n');
    }
    // the seconds column is a wall-clock measurement
    emit(&csv, cmd.csv_out.as_deref(), false, rec)?;
    Ok(EXIT_OK)
}

pub fn curse(cmd: &CurseCmd, _rec: &mut Recorder) -> Result<i32> {
    let dims: Vec<u32> = parse_list(&cmd.d, "dimension")?;
    let rows = dims
        .iter()
        .map(|&d| baselines::curse(cmd.m, d))
        .collect::<Result<Vec<_>>>()?;
    println!("d\tl\tl_exact\texpected_in_cell\tlog10_expected\tunderflow");
    for r in rows {
        let e = r.expected_in_cell;
        println!(
            "{}\t{:.2}\t{}\t{:e}\t{:.4}\t{}",
            r.d,
            r.l,
            format_real(r.l),
            e.value,
            e.log10,
            e.underflow
        );
    }
    Ok(EXIT_OK)
}

pub fn pca_equiv(cmd: &PcaEquivCmd, rec: &mut Recorder) -> Result<i32> {
    if cmd.q == 0 || cmd.q > cmd.n {
        return Err(Error::Config(format!("need 1 <= q <= n, got q = {}, n = {}", cmd.q, cmd.n)));
    }
    if cmd.samples < 2 {
        return Err(Error::Config(format!("need at least 2 samples, got {}", cmd.samples)));
    }
    rec.seed("seed", cmd.seed);
    let std_devs: Vec<f64> = (0..cmd.n).map(|j| 3.0 * 0.6f64.powi(j as i32)).collect();
    let data = baselines::anisotropic_gaussian(cmd.samples, &std_devs, cmd.seed);
    let mut config = EquivalenceConfig::new(
        cmd.q,
        TrainConfig {
            loss: LossKind::Mse,
            epochs: cmd.epochs,
            batch_size: cmd.batch,
            learning_rate: cmd.lr,
            shuffle_seed: cmd.seed,
            ..TrainConfig::default()
        },
    );
    config.seed = cmd.seed;
    let r = baselines::linear_ae_vs_pca(&data, &config)?;
    println!("ae_mse\t{}", format_real(r.ae_mse));
    println!("pca_mse\t{}", format_real(r.pca_mse));
    println!("ratio\t{:.6}", r.ratio);
    Ok(if r.within(cmd.tolerance) { EXIT_OK } else { EXIT_CHECK_FAILED })
}

pub fn replay(cmd: &ReplayCmd) -> Result<i32> {
    use clap::Parser;

    let recorded = RunManifest::read(&cmd.manifest_path)?;
    if recorded.subcommand == "replay" {
        return Err(Error::Config("a replay manifest cannot be replayed".into()));
    }
    std::env::set_current_dir(&recorded.cwd).map_err(|e| Error::io(&recorded.cwd, e))?;
    for input in &recorded.inputs {
        let now = super::sha256_file(&input.path)?;
        if now != input.sha256 {
            eprintln!("input {} changed since the recorded run", input.path.display());
            return Ok(EXIT_CHECK_FAILED);
        }
    }
    let cli = Cli::try_parse_from(&recorded.argv).map_err(|e| Error::Config(format!("recorded command line no longer parses: {e}")))?;
    let status = super::execute(&cli, &recorded.argv)?;
    if !cmd.check {
        return Ok(status);
    }
    let mut same = status == recorded.exit_status;
    if !same {
        eprintln!("exit status {status} differs from recorded {}", recorded.exit_status);
    }
    for out in recorded.outputs.iter().filter(|o| o.deterministic) {
        let now = super::sha256_file(&out.path)?;
        if now != out.sha256 {
            eprintln!("output {} differs from the recorded run", out.path.display());
            same = false;
        }
    }
    if same {
        eprintln!("replay matches the recorded run");
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_CHECK_FAILED)
    }
}
