//! The two ways of reaching a single-particle Wigner function of B or C as
//! seen from A, starting from a product of eigenstates in C's frame: switch
//! the grid state and partial-trace, or integrate the transformed joint
//! Wigner function.

use super::{
    marginal_wigner, partial_trace, transformed_joint_wigner, wigner_transform, Keep, WignerGrid,
};
use crate::classical::FrameLabel;
use crate::error::Result;
use crate::grid::Grid1D;
use crate::switch::{oscillator_product_state, switch_frame, FrameSwitch};

/// Single-particle Wigner functions of B and C from the switched grid state.
#[derive(Debug, Clone)]
pub struct SwitchedMarginals {
    pub b: WignerGrid,
    pub c: WignerGrid,
    pub entropy: f64,
}

pub fn switched_marginals(
    grid: Grid1D,
    level_a: u8,
    level_b: u8,
    alpha_a: f64,
    alpha_b: f64,
) -> Result<SwitchedMarginals> {
    let psi = oscillator_product_state(grid, alpha_a, alpha_b, level_a, level_b)?.normalized()?;
    let out = switch_frame(&psi, &FrameSwitch::new(FrameLabel::C, FrameLabel::A)?)?;
    Ok(SwitchedMarginals {
        b: wigner_transform(&partial_trace(&out, FrameLabel::B)?)?,
        c: wigner_transform(&partial_trace(&out, FrameLabel::C)?)?,
        entropy: super::entanglement_entropy(&out, FrameLabel::B)?,
    })
}

/// Largest pointwise difference between a grid-route Wigner function and
/// the joint-marginal route for the same particle, over every grid sample.
pub fn route_deviation(
    grid_route: &WignerGrid,
    level_a: u8,
    level_b: u8,
    alpha_a: f64,
    alpha_b: f64,
    keep: Keep,
) -> Result<f64> {
    let joint = transformed_joint_wigner(level_a, level_b, alpha_a, alpha_b)?;
    let marginal = marginal_wigner(
        &joint,
        keep,
        grid_route.xs().to_vec(),
        grid_route.xis().to_vec(),
    );
    grid_route.max_deviation(&marginal)
}
