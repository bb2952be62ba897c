//! JSON fixture format for wavefunctions.
//!
//! ```json
//! {
//!   "frame": "A",
//!   "axes": [
//!     {"label": "B", "n": 128, "length": 20.0, "representation": "momentum"},
//!     {"label": "C", "n": 128, "length": 20.0, "representation": "momentum"}
//!   ],
//!   "amplitudes": "<base64>"
//! }
//! ```
//!
//! `amplitudes` is the standard base64 encoding of the row-major amplitude
//! array (axis 0 slowest), each entry written as two little-endian IEEE-754
//! doubles `re, im`.

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{AxisSpec, Grid1D, Representation, WaveFunction};
use crate::classical::FrameLabel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisRecord {
    pub label: String,
    pub n: usize,
    pub length: f64,
    pub representation: Representation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveFunctionRecord {
    pub frame: String,
    pub axes: Vec<AxisRecord>,
    pub amplitudes: String,
}

fn parse_label(s: &str) -> Result<FrameLabel> {
    FrameLabel::parse(s).ok_or_else(|| Error::Fixture(format!("bad label {s:?}")))
}

pub fn encode_amplitudes<'a>(values: impl IntoIterator<Item = &'a Complex64>) -> String {
    let mut bytes = Vec::new();
    for z in values {
        bytes.extend_from_slice(&z.re.to_le_bytes());
        bytes.extend_from_slice(&z.im.to_le_bytes());
    }
    STANDARD.encode(bytes)
}

pub fn decode_amplitudes(s: &str) -> Result<Vec<Complex64>> {
    let bytes = STANDARD
        .decode(s)
        .map_err(|e| Error::Fixture(e.to_string()))?;
    if bytes.len() % 16 != 0 {
        return Err(Error::Fixture(format!(
            "{} bytes is not a whole number of complex pairs",
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect())
}

impl WaveFunctionRecord {
    pub fn from_wavefunction(psi: &WaveFunction) -> Self {
        Self {
            frame: psi.frame().to_string(),
            axes: psi
                .axes()
                .iter()
                .map(|a| AxisRecord {
                    label: a.label.to_string(),
                    n: a.grid.n(),
                    length: a.grid.length(),
                    representation: a.representation,
                })
                .collect(),
            amplitudes: encode_amplitudes(psi.amplitudes().iter()),
        }
    }

    pub fn to_wavefunction(&self) -> Result<WaveFunction> {
        let mut axes = Vec::with_capacity(self.axes.len());
        for a in &self.axes {
            axes.push(AxisSpec {
                label: parse_label(&a.label)?,
                grid: Grid1D::new(a.n, a.length)?,
                representation: a.representation,
            });
        }
        let shape: Vec<usize> = axes.iter().map(|a| a.grid.n()).collect();
        let values = decode_amplitudes(&self.amplitudes)?;
        let amps = ArrayD::from_shape_vec(IxDyn(&shape), values)
            .map_err(|e| Error::Fixture(e.to_string()))?;
        WaveFunction::new(axes, amps, parse_label(&self.frame)?)
    }
}

pub fn to_json(psi: &WaveFunction) -> String {
    serde_json::to_string_pretty(&WaveFunctionRecord::from_wavefunction(psi))
        .expect("record serializes")
}

pub fn from_json(s: &str) -> Result<WaveFunction> {
    let record: WaveFunctionRecord =
        serde_json::from_str(s).map_err(|e| Error::Fixture(e.to_string()))?;
    record.to_wavefunction()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::random::random_state;

    #[test]
    fn round_trip_is_bit_exact() {
        let g = Grid1D::new(16, 8.0).unwrap();
        let psi = random_state(&[(FrameLabel::B, g), (FrameLabel::C, g)], FrameLabel::A, 3)
            .to_representation(FrameLabel::C, Representation::Momentum)
            .unwrap();
        let back = from_json(&to_json(&psi)).unwrap();
        assert_eq!(back, psi);
    }

    #[test]
    fn rejects_truncated_payload() {
        let g = Grid1D::new(8, 8.0).unwrap();
        let psi = random_state(&[(FrameLabel::B, g)], FrameLabel::A, 0);
        let mut record = WaveFunctionRecord::from_wavefunction(&psi);
        record.amplitudes = encode_amplitudes(psi.amplitudes().iter().take(7));
        assert!(matches!(record.to_wavefunction(), Err(Error::Fixture(_))));
        assert!(decode_amplitudes("AAAA").is_err());
    }
}
