use nalgebra::DMatrix;

use crate::classical::FrameLabel;
use crate::error::{Error, Result};
use crate::grid::{Representation, WaveFunction};

/// Von Neumann entropy (nats) of either side of a two-axis pure state, from
/// the singular values of the amplitude matrix.
///
/// `cut` names one side of the bipartition; the value does not depend on
/// which side is named.
pub fn entanglement_entropy(psi: &WaveFunction, cut: FrameLabel) -> Result<f64> {
    if psi.ndim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: psi.ndim(),
        });
    }
    psi.axis_index(cut)?;
    let pos = psi.to_all(Representation::Position);
    let a = pos.amplitudes();
    let scale = pos.cell_volume().sqrt();
    let m = DMatrix::from_fn(a.shape()[0], a.shape()[1], |i, j| a[[i, j]] * scale);
    let weights: Vec<f64> = m.singular_values().iter().map(|s| s * s).collect();
    let total: f64 = weights.iter().sum();
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::InvalidGrid("state has zero norm".into()));
    }
    Ok(weights
        .iter()
        .map(|w| w / total)
        .filter(|l| *l > 0.0)
        .map(|l| -l * l.ln())
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::random::random_state;
    use crate::grid::Grid1D;
    use crate::switch::{oscillator_product_state, switch_frame, FrameSwitch};

    const A: FrameLabel = FrameLabel::A;
    const B: FrameLabel = FrameLabel::B;
    const C: FrameLabel = FrameLabel::C;

    /// Entropy of a Gaussian mode of purity `sqrt(r / (1 + r))`, the reduced
    /// state of `ψ_A(−q_C) ψ_B(q_B − q_C)` with `r = α_A/α_B`.
    fn gaussian_oracle(r: f64) -> f64 {
        let nu = ((1.0 + r) / r).sqrt();
        let (a, b) = ((nu + 1.0) / 2.0, (nu - 1.0) / 2.0);
        a * a.ln() - b * b.ln()
    }

    #[test]
    fn product_state_has_zero_entropy() {
        let g = Grid1D::new(64, 16.0).unwrap();
        let psi = oscillator_product_state(g, 0.7, 1.4, 1, 0).unwrap();
        assert!(entanglement_entropy(&psi, A).unwrap().abs() < 1e-10);
        assert!(matches!(
            entanglement_entropy(&psi, C),
            Err(Error::UnknownAxis(_))
        ));
    }

    #[test]
    fn either_side_gives_the_same_value() {
        let g = Grid1D::new(64, 16.0).unwrap();
        let psi = random_state(&[(B, g), (C, g)], A, 11);
        let s = entanglement_entropy(&psi, B).unwrap();
        assert!(s > 0.0);
        assert_eq!(s, entanglement_entropy(&psi, C).unwrap());
        let mom = psi.to_all(Representation::Momentum);
        assert!((entanglement_entropy(&mom, C).unwrap() - s).abs() < 1e-10);
    }

    #[test]
    fn switched_ground_state_matches_gaussian_oracle() {
        let g = Grid1D::new(128, 24.0).unwrap();
        let psi = oscillator_product_state(g, 1.0, 1.0, 0, 0).unwrap();
        let out = switch_frame(&psi, &FrameSwitch::new(C, A).unwrap()).unwrap();
        let s = entanglement_entropy(&out, B).unwrap();
        assert!((s - gaussian_oracle(1.0)).abs() < 1e-8, "{s}");
        assert!((s - 0.553_303_299_720_515_7).abs() < 1e-8);
        assert!(s > 0.1);
    }

    #[test]
    fn broader_frame_state_entangles_more() {
        // α_A/α_B = 1 vs 0.1 at α_B = 4 keeps both states inside one grid
        let g = Grid1D::new(256, 40.0).unwrap();
        let ent = |aa: f64, ab: f64| {
            let psi = oscillator_product_state(g, aa, ab, 0, 0).unwrap();
            entanglement_entropy(
                &switch_frame(&psi, &FrameSwitch::new(C, A).unwrap()).unwrap(),
                B,
            )
            .unwrap()
        };
        let equal = ent(4.0, 4.0);
        let broad = ent(0.4, 4.0);
        assert!((equal - gaussian_oracle(1.0)).abs() < 1e-6);
        assert!((broad - gaussian_oracle(0.1)).abs() < 1e-6, "{broad}");
        assert!(broad > equal);
        assert!(gaussian_oracle(0.01) > gaussian_oracle(0.1));
    }
}
