//! Figure presets as config text.

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};

pub const FIGURES: [&str; 7] = ["fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"];

const SWITCHED_GRID: &str = "n = 256\nlength = 48\n";

pub fn preset_text(name: &str) -> Result<String> {
    let body = match name {
        "fig3" => "kind = classical-trajectory\nomega_a = 1\nomega_b = 10\na0 = 1\nb0 = 1\nphi_a = 0\nphi_b = pi/2\nt_end = 4*pi\n"
            .to_string(),
        "fig4" => "kind = classical-trajectory\nomega_a = 10\nomega_b = 1\na0 = 0.3\nb0 = 1\nphi_a = 0\nphi_b = pi/2\nt_end = 4*pi\n"
            .to_string(),
        "fig5" => "kind = wigner-study\nmode = eigenstates\nalpha = 1\nn = 128\nlength = 20\n".to_string(),
        "fig6" => format!("kind = wigner-study\nmode = switched\nalpha_a = 0.1\nalpha_b = 1\nlevel_a = 0\nlevel_b = 0\n{SWITCHED_GRID}"),
        "fig7" => format!("kind = wigner-study\nmode = switched\nalpha_a = 1\nalpha_b = 1\nlevel_a = 0\nlevel_b = 1\n{SWITCHED_GRID}"),
        "fig8" => format!("kind = wigner-study\nmode = switched\nalpha_a = 1\nalpha_b = 1\nlevel_a = 1\nlevel_b = 0\n{SWITCHED_GRID}"),
        "fig9" => format!("kind = wigner-study\nmode = switched\nalpha_a = 1\nalpha_b = 1\nlevel_a = 1\nlevel_b = 1\n{SWITCHED_GRID}"),
        _ => return Err(CliError::UnknownFigure(name.to_string())),
    };
    Ok(format!("output_dir = out/{name}\n{body}"))
}

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    ExperimentConfig::parse(&preset_text(name)?)
}

pub fn suite_preset(seed: u64) -> ExperimentConfig {
    ExperimentConfig::parse(&format!(
        "kind = invariant-suite\noutput_dir = out/suite\nseed = {seed}\n"
    ))
    .expect("suite preset is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_figure_parses() {
        for name in FIGURES {
            let c = preset(name).unwrap();
            assert_eq!(c.output_dir.to_str().unwrap(), format!("out/{name}"));
        }
        assert!(matches!(preset("fig10"), Err(CliError::UnknownFigure(_))));
        let fig3 = preset("fig3").unwrap();
        assert_eq!(
            fig3.number("phi_b").unwrap(),
            Some(std::f64::consts::FRAC_PI_2)
        );
        assert_eq!(
            preset("fig6").unwrap().number("alpha_a").unwrap(),
            Some(0.1)
        );
    }
}
