//! The six pipeline steps. Each reads its inputs, writes its files into
//! `out_dir` and returns the paths it wrote, in a fixed order.

use std::path::{Path, PathBuf};

use relspec_core::{
    analysis::{Aggregation, SpectrumCollection},
    cv::{cross_validate, FoldScheme, ModelSpec},
    dendrite::{init_model, train as train_model},
    signal::{build_dataset, envelopes, filter_chain, FilterSpec},
    spectrum::expand_model,
    stats::paired_t_test,
    synth::{
        dendrite_quadratic_polys, random_phases, random_quadratic_polys, synthesize_recording,
        GroundTruthSystem,
    },
    Dataset, Matrix, RelationSpectrum,
};

use crate::{
    config::{
        AnalyzeConfig, EvaluateConfig, ExpandConfig, Normalization, PreprocessConfig, SchemeConfig,
        SynthConfig, SystemKind, TrainCmdConfig, TABLE_ORDER,
    },
    formats::{
        dataset::{read_dataset, write_dataset, DatasetManifest},
        model::{read_model, write_model, ModelDoc},
        recording::{read_recording, write_recording},
        report::{
            aggregation_name, coupling_csv, cv_folds_csv, cv_summary_csv, loss_trace_csv,
            synergy_csv, ComparisonDoc, CouplingDoc, CvReport, ModelCvDoc,
        },
        spectrum::{read_spectrum_json, write_item_table, write_spectrum_csv, write_spectrum_json},
        write_json, write_text,
    },
    AppError,
};

/// Relative error allowed between a spectrum and the network it came from.
pub const EXPANSION_TOLERANCE: f64 = 1e-9;

/// Indices of the six-muscle table order when `names` are exactly those
/// muscles (bare or `E_`-prefixed), else the identity.
pub fn default_display_order(names: &[String]) -> Vec<usize> {
    let table: Option<Vec<usize>> = TABLE_ORDER
        .iter()
        .map(|m| {
            names
                .iter()
                .position(|n| n == m || n.strip_prefix("E_") == Some(m))
        })
        .collect();
    match table {
        Some(order) if names.len() == TABLE_ORDER.len() => order,
        _ => (0..names.len()).collect(),
    }
}

pub fn synth(cfg: &SynthConfig, out_dir: &Path) -> Result<Vec<PathBuf>, AppError> {
    let nvars = cfg.emg_channels.len();
    let outputs = cfg.force_channels.len();
    let polys = match cfg.system {
        SystemKind::Dendrite => dendrite_quadratic_polys(
            nvars,
            outputs,
            cfg.system_width,
            cfg.coefficient_scale,
            cfg.seed,
        )?,
        SystemKind::Dense => {
            random_quadratic_polys(nvars, outputs, cfg.coefficient_scale, cfg.seed)
        }
    };
    let phases = match &cfg.phases_rad {
        Some(p) => cfg.per_channel("phases_rad", p)?,
        None => random_phases(nvars, cfg.seed.wrapping_add(1)),
    };
    let system = GroundTruthSystem {
        variable_names: cfg.emg_channels.clone(),
        output_names: cfg.force_channels.clone(),
        polys,
        frequencies_hz: cfg.per_channel("frequencies_hz", &cfg.frequencies_hz)?,
        amplitudes: cfg.per_channel("amplitudes", &cfg.amplitudes)?,
        phases_rad: phases,
        noise_sd: cfg.noise_sd,
        emg_carrier: cfg.emg_carrier,
    };
    let synthesis = synthesize_recording(
        &system,
        cfg.duration_s,
        cfg.sample_rate_hz,
        cfg.seed.wrapping_add(2),
    )?;

    let variables: Vec<String> = cfg
        .emg_channels
        .iter()
        .map(|c| format!("{}{c}", cfg.variable_prefix))
        .collect();
    let order = default_display_order(&variables);
    let truth = RelationSpectrum::from_polys(
        variables,
        cfg.force_channels.clone(),
        &synthesis.truth,
        order,
    )?;

    let rec_path = out_dir.join("recording.csv");
    let truth_path = out_dir.join("truth.json");
    write_recording(&rec_path, &synthesis.recording)?;
    write_spectrum_json(&truth_path, &truth)?;
    Ok(vec![
        rec_path.clone(),
        rec_path.with_extension("json"),
        truth_path,
    ])
}

pub fn preprocess(cfg: &PreprocessConfig, out_dir: &Path) -> Result<Vec<PathBuf>, AppError> {
    let mut rec = read_recording(&cfg.recording, cfg.manifest.as_deref())?;
    if cfg.apply_filters {
        let spec = FilterSpec::from(&cfg.filter);
        spec.validate(rec.sample_rate_hz())
            .map_err(|e| AppError::Config(format!("filter: {e}")))?;
        rec = filter_chain(&rec, &spec)?;
    }
    if cfg.apply_envelope {
        rec = envelopes(&rec, cfg.window_ms)?;
    }
    let raw = build_dataset(&rec, cfg.decimation)?;
    let variables: Vec<String> = raw
        .variable_names()
        .iter()
        .map(|v| format!("{}{v}", cfg.variable_prefix))
        .collect();
    let (features, targets, variable_scales, target_scales) = match cfg.normalize {
        Normalization::None => (
            raw.features().clone(),
            raw.targets().clone(),
            vec![1.0; variables.len()],
            vec![1.0; raw.output_count()],
        ),
        Normalization::MaxAbs => {
            let (f, fs) = scale_columns(raw.features(), 1);
            let (t, ts) = scale_columns(raw.targets(), 0);
            (f, t, fs, ts)
        }
    };
    let data = Dataset::with_names(
        features,
        targets,
        variables.clone(),
        raw.target_names().to_vec(),
    )?;
    let manifest = DatasetManifest {
        variables,
        targets: data.target_names().to_vec(),
        rows: data.len(),
        variable_scales,
        target_scales,
        decimation: Some(cfg.decimation),
        sample_rate_hz: Some(rec.sample_rate_hz()),
    };
    let path = out_dir.join("dataset.csv");
    write_dataset(&path, &data, &manifest)?;
    Ok(vec![path.clone(), path.with_extension("json")])
}

/// Divides columns `skip..` by their largest magnitude (left alone when
/// that is zero) and returns the divisors.
fn scale_columns(m: &Matrix, skip: usize) -> (Matrix, Vec<f64>) {
    let mut out = m.clone();
    let scales: Vec<f64> = (skip..m.cols())
        .map(|j| {
            let s = m.column(j).iter().fold(0.0_f64, |a, v| a.max(v.abs()));
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();
    for i in 0..m.rows() {
        for (j, s) in (skip..m.cols()).zip(&scales) {
            out.row_mut(i)[j] /= s;
        }
    }
    (out, scales)
}

pub fn train(cfg: &TrainCmdConfig, out_dir: &Path) -> Result<Vec<PathBuf>, AppError> {
    let (data, _) = read_dataset(&cfg.dataset)?;
    let arch = cfg
        .model
        .architecture(data.features().cols(), data.output_count())?;
    let init = init_model(&arch, cfg.model.init_scale, cfg.seed)?;
    let outcome = train_model(&init, &data, &cfg.model.train_config(cfg.seed))?;

    let doc = ModelDoc::from_model(
        &outcome.model,
        Some(data.variable_names().to_vec()),
        Some(data.target_names().to_vec()),
    );
    let model_path = out_dir.join("model.json");
    let trace_path = out_dir.join("loss_trace.csv");
    write_model(&model_path, &doc)?;
    write_text(&trace_path, &loss_trace_csv(&outcome.loss_trace))?;
    Ok(vec![model_path, trace_path])
}

pub fn expand(cfg: &ExpandConfig, out_dir: &Path) -> Result<Vec<PathBuf>, AppError> {
    let (model, doc) = read_model(&cfg.model)?;
    let mut spectrum = expand_model(&model)?;
    let variables = doc
        .variable_names
        .clone()
        .unwrap_or_else(|| spectrum.variable_names().to_vec());
    let outputs = doc
        .output_names
        .clone()
        .unwrap_or_else(|| spectrum.output_names().to_vec());
    spectrum = spectrum.with_names(variables.clone(), outputs)?;
    let order: Vec<String> = match &cfg.variable_order {
        Some(names) => names.clone(),
        None => default_display_order(&variables)
            .into_iter()
            .map(|i| variables[i].clone())
            .collect(),
    };
    spectrum = spectrum
        .canonical_order(&order)
        .map_err(|e| AppError::Config(format!("variable_order: {e}")))?;

    if let Some(path) = &cfg.verify_dataset {
        let (data, _) = read_dataset(path)?;
        let worst = verify_expansion(&model, &spectrum, &data)?;
        if worst > EXPANSION_TOLERANCE {
            return Err(AppError::Numerical(format!(
                "spectrum disagrees with the network by {worst:e} (relative) on {}",
                path.display()
            )));
        }
    }

    let mut written = Vec::new();
    let mut emit = |stem: &str, s: &RelationSpectrum| -> Result<(), AppError> {
        let json = out_dir.join(format!("{stem}.json"));
        let csv = out_dir.join(format!("{stem}.csv"));
        let items = out_dir.join(format!("{}.csv", stem.replace("spectrum", "items")));
        write_spectrum_json(&json, s)?;
        write_spectrum_csv(&csv, s)?;
        write_item_table(&items, s)?;
        written.extend([json, csv, items]);
        Ok(())
    };
    emit("spectrum", &spectrum)?;
    if let Some(d) = cfg.truncate_degree {
        emit(&format!("spectrum_deg{d}"), &spectrum.truncate(d))?;
    }
    Ok(written)
}

/// Largest relative gap `|net − poly| / max(1, |net|)` over the rows.
pub fn verify_expansion(
    model: &relspec_core::DDModel,
    spectrum: &RelationSpectrum,
    data: &Dataset,
) -> Result<f64, AppError> {
    if data.features().cols() != model.architecture().input_dim() {
        return Err(AppError::data(format!(
            "verify dataset has {} feature columns, model expects {}",
            data.features().cols(),
            model.architecture().input_dim()
        )));
    }
    let mut worst = 0.0_f64;
    for row in data.features().row_iter() {
        let net = model.forward(row)?;
        let poly = spectrum.evaluate(&row[1..])?;
        for (a, b) in net.iter().zip(&poly) {
            worst = worst.max((a - b).abs() / a.abs().max(1.0));
        }
    }
    Ok(worst)
}

pub fn evaluate(cfg: &EvaluateConfig, out_dir: &Path) -> Result<Vec<PathBuf>, AppError> {
    let (data, _) = read_dataset(&cfg.dataset)?;
    let scheme = match cfg.scheme {
        SchemeConfig::Contiguous => FoldScheme::Contiguous,
        SchemeConfig::Random => FoldScheme::SeededRandom(cfg.seed),
    };
    if data.len() < cfg.k {
        return Err(AppError::data(format!(
            "{} rows cannot form {} folds",
            data.len(),
            cfg.k
        )));
    }
    let dd = ModelSpec::Dendrite {
        architecture: cfg
            .model
            .architecture(data.features().cols(), data.output_count())?,
        config: cfg.model.train_config(cfg.seed),
    };
    let results = [
        cross_validate(&data, cfg.k, scheme, &ModelSpec::LinearRegression)?,
        cross_validate(&data, cfg.k, scheme, &dd)?,
    ];
    let outputs = data.target_names().to_vec();
    let comparisons = outputs
        .iter()
        .enumerate()
        .map(|(o, name)| {
            let outcome = paired_t_test(&results[1].r2_of_output(o), &results[0].r2_of_output(o))?;
            Ok(ComparisonDoc::new(
                name,
                results[1].model,
                results[0].model,
                &outcome,
            ))
        })
        .collect::<Result<Vec<_>, AppError>>()?;

    let report = CvReport {
        k: cfg.k,
        scheme: match cfg.scheme {
            SchemeConfig::Contiguous => "contiguous".into(),
            SchemeConfig::Random => "random".into(),
        },
        outputs: outputs.clone(),
        fold_assignment: results[0].fold_assignment.clone(),
        models: results.iter().map(ModelCvDoc::from).collect(),
        comparisons: comparisons.clone(),
    };
    let json = out_dir.join("cv_result.json");
    let folds = out_dir.join("cv_folds.csv");
    let summary = out_dir.join("cv_summary.csv");
    write_json(&json, &report)?;
    write_text(&folds, &cv_folds_csv(&outputs, &results))?;
    write_text(&summary, &cv_summary_csv(&outputs, &results, &comparisons))?;
    Ok(vec![json, folds, summary])
}

/// File stems, else parent directory names, else `s1…`, whichever is
/// unique first.
fn subject_names(paths: &[PathBuf]) -> Vec<String> {
    let unique = |names: &Vec<String>| {
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        sorted.len() == names.len() && names.iter().all(|n| !n.is_empty())
    };
    let component = |f: fn(&Path) -> Option<&std::ffi::OsStr>| -> Vec<String> {
        paths
            .iter()
            .map(|p| {
                f(p).map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default()
            })
            .collect()
    };
    let stems = component(|p| p.file_stem());
    if unique(&stems) {
        return stems;
    }
    let parents = component(|p| p.parent().and_then(Path::file_name));
    if unique(&parents) {
        return parents;
    }
    (1..=paths.len()).map(|i| format!("s{i}")).collect()
}

pub fn analyze(cfg: &AnalyzeConfig, out_dir: &Path) -> Result<Vec<PathBuf>, AppError> {
    let spectra = cfg
        .spectra
        .iter()
        .map(|p| read_spectrum_json(p))
        .collect::<Result<Vec<_>, _>>()?;
    let subjects = if cfg.subjects.is_empty() {
        subject_names(&cfg.spectra)
    } else {
        cfg.subjects.clone()
    };
    let mut collection = SpectrumCollection::from_spectra(subjects, &spectra)?;
    if cfg.drop_constant {
        collection = collection.without_constant();
    }
    if cfg.l2_normalize {
        collection = collection.l2_normalized();
    }
    let synergy = collection.synergy_report(cfg.threshold)?;
    let concat = collection.coupling_matrix(Aggregation::Concatenate)?;
    let mean = collection.coupling_matrix(Aggregation::PerSubjectMean)?;

    let synergy_path = out_dir.join("synergy.csv");
    let coupling_path = out_dir.join("coupling.csv");
    let mean_path = out_dir.join(format!(
        "coupling_{}.csv",
        aggregation_name(Aggregation::PerSubjectMean)
    ));
    let json_path = out_dir.join("coupling.json");
    write_text(&synergy_path, &synergy_csv(collection.fingers(), &synergy))?;
    write_text(&coupling_path, &coupling_csv(&concat))?;
    write_text(&mean_path, &coupling_csv(&mean))?;
    write_json(
        &json_path,
        &[CouplingDoc::from(&concat), CouplingDoc::from(&mean)],
    )?;
    Ok(vec![synergy_path, coupling_path, mean_path, json_path])
}
