//! Seeded random states for property checks.
//!
//! States are superpositions of a few Gaussian packets with random complex
//! weights, centres within `±L/8`, mean momenta within `±p_max/8` and widths
//! chosen so the packets decay far inside both the position box and the
//! momentum window. On multi-axis grids each packet carries a random
//! correlation between axes, so the corpus is generically entangled.

use std::f64::consts::PI;

use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AxisSpec, Grid1D, WaveFunction};
use crate::classical::FrameLabel;

const PACKETS: usize = 3;

struct Packet {
    weight: Complex64,
    centre: Vec<f64>,
    momentum: Vec<f64>,
    alpha: Vec<f64>,
    coupling: f64,
}

/// Normalised random state in position representation on the given axes.
pub fn random_state(axes: &[(FrameLabel, Grid1D)], frame: FrameLabel, seed: u64) -> WaveFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_state_with(axes, frame, &mut rng)
}

pub fn random_state_with(
    axes: &[(FrameLabel, Grid1D)],
    frame: FrameLabel,
    rng: &mut impl Rng,
) -> WaveFunction {
    let packets: Vec<Packet> = (0..PACKETS)
        .map(|_| {
            let weight =
                Complex64::from_polar(rng.random_range(0.3..1.0), rng.random_range(0.0..2.0 * PI));
            let mut centre = Vec::new();
            let mut momentum = Vec::new();
            let mut alpha = Vec::new();
            for (_, g) in axes {
                centre.push(rng.random_range(-1.0..1.0) * g.length() / 8.0);
                momentum.push(rng.random_range(-1.0..1.0) * g.max_momentum() / 8.0);
                // width between the position- and momentum-limited extremes
                let balanced = g.max_momentum() / (g.length() / 2.0);
                alpha.push(balanced * rng.random_range(0.6..1.6));
            }
            let coupling = rng.random_range(-0.4..0.4);
            Packet {
                weight,
                centre,
                momentum,
                alpha,
                coupling,
            }
        })
        .collect();
    WaveFunction::from_position_fn(axes, frame, |x| {
        packets
            .iter()
            .map(|pk| {
                let mut exponent = 0.0;
                let mut phase = 0.0;
                for (d, xd) in x.iter().enumerate() {
                    let y = xd - pk.centre[d];
                    exponent -= 0.5 * pk.alpha[d] * y * y;
                    phase += pk.momentum[d] * xd;
                }
                for d in 1..x.len() {
                    let a = x[d - 1] - pk.centre[d - 1];
                    let b = x[d] - pk.centre[d];
                    phase += pk.coupling * (pk.alpha[d - 1] * pk.alpha[d]).sqrt() * a * b;
                }
                pk.weight * Complex64::from_polar(exponent.exp(), phase)
            })
            .sum()
    })
    .and_then(|psi| psi.normalized())
    .expect("random packets are finite and nonzero")
}

/// Normalised random state in momentum representation whose amplitudes
/// vanish outside `|p| < p_max/2` on every axis, so sums of two momenta
/// never wrap around the grid.
pub fn band_limited_state(
    axes: &[(FrameLabel, Grid1D)],
    frame: FrameLabel,
    seed: u64,
) -> WaveFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let specs: Vec<AxisSpec> = axes
        .iter()
        .map(|(l, g)| AxisSpec::momentum(*l, *g))
        .collect();
    let shape: Vec<usize> = axes.iter().map(|(_, g)| g.n()).collect();
    let amps = ArrayD::from_shape_fn(IxDyn(&shape), |idx| {
        let inside = (0..axes.len())
            .all(|d| axes[d].1.centered(idx[d]).unsigned_abs() < (axes[d].1.n() / 4) as u64);
        let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if inside {
            z
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    WaveFunction::new(specs, amps, frame)
        .and_then(|psi| psi.normalized())
        .expect("band-limited amplitudes are finite and nonzero")
}
