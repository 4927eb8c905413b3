//! Pinned experiment sets behind `blowup reproduce`.

use std::fs;
use std::path::Path;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::scenario::{run, RunReport};

pub const SCENARIOS: &[&str] = &[
    "fig1",
    "fig2",
    "fig3",
    "fig4",
    "s_localization",
    "ls_stability",
    "hs_wave",
];

const FIG1: &[(&str, &str)] = &[
    ("N1", "scenario = selfsim\nsigma = 2\nbeta = 3\ndim = 1\nk = 1\nelements = 800\n"),
    ("N2", "scenario = selfsim\nsigma = 2\nbeta = 3\ndim = 2\nk = 1\nelements = 600\n"),
    ("N3", "scenario = selfsim\nsigma = 2\nbeta = 3\ndim = 3\nk = 1\nelements = 600\n"),
];

const FIG2: &[(&str, &str)] = &[
    ("N1", "scenario = selfsim\nsigma = 2\nbeta = 2.4\ndim = 1\nk = 1\nelements = 600\n"),
    ("N2", "scenario = selfsim\nsigma = 2\nbeta = 2.4\ndim = 2\nk = 1\nelements = 600\n"),
    ("N3", "scenario = selfsim\nsigma = 2\nbeta = 2.4\ndim = 3\nk = 1\nelements = 600\n"),
];

const FIG3: &[(&str, &str)] = &[(
    "",
    "scenario = selfsim\nsigma = 2\nbeta = 3.6\ndim = 1\nk = 1..4\nlength = 20\nelements = 800\n",
)];

const FIG4: &[(&str, &str)] = &[(
    "",
    "scenario = selfsim\nsigma = 2\nbeta = 3.6\ndim = 3\nk = 1..4\nlength = 20\nelements = 800\n",
)];

const S_LOCALIZATION: &[(&str, &str)] = &[(
    "",
    "scenario = evolve\nsigma = 2\nbeta = 3\ndim = 1\ninitial = exact\nelements = 200\n\
     snapshots = 1, 10, 100, 1000, 10000, 100000\n",
)];

const LS_STABILITY: &[(&str, &str)] = &[(
    "",
    "scenario = stability\nsigma = 2\nbeta = 3.6\ndim = 1\nk = 1\nlength = 20\nelements = 400\n\
     factors = 0.8, 1.2\nwiden = 0.1\nsnapshots = 1, 10, 100, 1000, 10000\n",
)];

const HS_WAVE: &[(&str, &str)] = &[(
    "",
    "scenario = evolve\nsigma = 2\nbeta = 2.4\ndim = 1\nk = 1\nelements = 200\n\
     snapshots = 1, 10, 100, 1000, 10000, 100000\n",
)];

/// The pinned configurations of a scenario as `(subdirectory, config text)`.
pub fn pinned(name: &str) -> Option<&'static [(&'static str, &'static str)]> {
    Some(match name {
        "fig1" => FIG1,
        "fig2" => FIG2,
        "fig3" => FIG3,
        "fig4" => FIG4,
        "s_localization" => S_LOCALIZATION,
        "ls_stability" => LS_STABILITY,
        "hs_wave" => HS_WAVE,
        _ => return None,
    })
}

/// Runs every pinned configuration of `name` under `dir`. The exit code is
/// the worst over the runs.
pub fn reproduce(name: &str, dir: &Path) -> Result<Vec<RunReport>, CliError> {
    let configs = pinned(name).ok_or_else(|| {
        CliError::Config(format!(
            "unknown scenario '{name}' (one of {})",
            SCENARIOS.join(", ")
        ))
    })?;
    let parsed = configs
        .iter()
        .map(|(sub, text)| {
            let cfg = ExperimentConfig::parse(text, dir)?;
            Ok((ExperimentConfig { output: dir.join(sub), ..cfg }, *text))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut reports = Vec::new();
    for (cfg, text) in parsed {
        log::info!("{name}: running {}", cfg.output.display());
        fs::create_dir_all(&cfg.output)?;
        fs::write(cfg.output.join("config.txt"), text)?;
        reports.push(run(&cfg)?);
    }
    Ok(reports)
}
