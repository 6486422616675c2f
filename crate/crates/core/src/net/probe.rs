//! Local check that a network computes a continuous piecewise-linear map.

use num_traits::Signed;

use super::{ForwardError, ForwardPlan, ReluNet};
use crate::num::int;

/// Outcome of sampling `t ↦ forward(x + t·u)` on an even grid over `[−1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuityReport {
    /// Largest `|Δf| / Δt` seen over all outputs and grid cells.
    pub max_slope: f64,
    /// Lipschitz bound of the net along `u`: no continuous output can
    /// change faster than this.
    pub slope_bound: f64,
    /// Grid cells whose slope differs from the previous cell's.
    pub breakpoints: usize,
    /// Every step stays within the slope bound up to `tol`.
    pub continuous: bool,
}

/// Samples the line through `x` with direction `u` at `samples` points.
///
/// A jump of height `h` between neighbouring samples shows up as a slope
/// of about `h / Δt`, far above the bound `Σ_paths Π|w|·|u|` that every
/// continuous output obeys. A step passes when
/// `|Δf| ≤ bound·Δt·(1 + tol) + tol·max(1, |f|)`.
pub fn continuity_probe(
    net: &ReluNet,
    x: &[f64],
    u: &[f64],
    samples: usize,
    tol: f64,
) -> Result<ContinuityReport, ForwardError> {
    let plan = ForwardPlan::<f64>::new(net)?;
    if u.len() != x.len() {
        return Err(ForwardError::Dimension {
            expected: x.len(),
            got: u.len(),
        });
    }
    // σ is 1-Lipschitz, so propagating |u| through |w| with zero biases
    // bounds every directional derivative.
    let mut abs = net.clone();
    for v in &mut abs.neurons {
        v.bias = int(0);
    }
    for c in &mut abs.arcs {
        c.weight = c.weight.abs();
    }
    let bounds = ForwardPlan::<f64>::new_unchecked(&abs).run(&u.iter().map(|v| v.abs()).collect::<Vec<_>>())?;
    let slope_bound = bounds.iter().copied().fold(0.0, f64::max);

    let samples = samples.max(2);
    let dt = 2.0 / (samples - 1) as f64;
    let at = |i: usize| -> Result<Vec<f64>, ForwardError> {
        let t = -1.0 + dt * i as f64;
        plan.run(&x.iter().zip(u).map(|(xi, ui)| xi + t * ui).collect::<Vec<_>>())
    };
    let mut report = ContinuityReport {
        max_slope: 0.0,
        slope_bound,
        breakpoints: 0,
        continuous: true,
    };
    let mut prev = at(0)?;
    let mut prev_slopes: Option<Vec<f64>> = None;
    for i in 1..samples {
        let cur = at(i)?;
        let slopes: Vec<f64> = cur.iter().zip(&prev).map(|(b, a)| (b - a) / dt).collect();
        for ((slope, b), bound) in slopes.iter().zip(&cur).zip(&bounds) {
            report.max_slope = report.max_slope.max(slope.abs());
            if (slope * dt).abs() > bound * dt * (1.0 + tol) + tol * b.abs().max(1.0) {
                report.continuous = false;
            }
        }
        if let Some(p) = &prev_slopes {
            let kink = p
                .iter()
                .zip(&slopes)
                .any(|(a, b)| (a - b).abs() > 1e-6 * slope_bound.max(1.0));
            report.breakpoints += usize::from(kink);
        }
        prev_slopes = Some(slopes);
        prev = cur;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::min_two_net;

    #[test]
    fn min_gadget_is_continuous_with_one_kink() {
        // Along x + t·u the two inputs cross at t = 0.
        let r = continuity_probe(&min_two_net(), &[0.0, 0.0], &[1.0, -1.0], 1000, 1e-9).unwrap();
        assert!(r.continuous);
        assert_eq!(r.slope_bound, 3.0);
        assert!(r.max_slope <= 1.0 + 1e-12);
        assert!((1..=2).contains(&r.breakpoints));
    }

    #[test]
    fn direction_must_match_inputs() {
        assert!(continuity_probe(&min_two_net(), &[0.0, 0.0], &[1.0], 10, 1e-9).is_err());
    }
}
