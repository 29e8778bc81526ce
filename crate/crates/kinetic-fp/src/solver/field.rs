//! Solution snapshots: grid values, boundary traces, and per-step
//! conservation/energy ledger records.

use serde::Serialize;

use super::coeffs::CoefficientField;
use super::grid::Grid;

/// Boundary trace values at both faces, one value per velocity node.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSet {
    /// Values at the x = x0 face (outward normal −1).
    pub left: Vec<f64>,
    /// Values at the x = x0 + length face (outward normal +1).
    pub right: Vec<f64>,
}

/// What the last step consumed; kept so ledgers can be recomputed for
/// any weight after the fact.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub prev: Vec<f64>,
    /// Applied incoming data (γ₋) at the left/right faces; zeros at
    /// non-incoming nodes.
    pub incoming_left: Vec<f64>,
    pub incoming_right: Vec<f64>,
    pub coeffs: CoefficientField,
    pub dt: f64,
    pub t_old: f64,
}

/// One step's discrete balance,
///
/// ```text
///   Δ(∫ f²⟨v⟩^{2q}) + Δt·∮ (n_x·v)(γf)²⟨v⟩^{2q}
///     + Δt·2∫ A ∂v f·∂v f ⟨v⟩^{2q} − Δt·(drift + zeroth + source terms)
///     = residual,
/// ```
///
/// where the drift bucket also carries the weight-commutator term
/// −2∫ A f ∂v f ∂v(⟨v⟩^{2q}) that integration by parts produces for
/// q > 0.  The residual measures how far the discretization is from the
/// continuous balance; it shrinks at first order under refinement.
#[derive(Debug, Clone, Serialize)]
pub struct LedgerRecord {
    pub step: u64,
    pub t: f64,
    pub weight_q: f64,
    pub mass: f64,
    /// Net mass inflow through both faces during the step (already
    /// multiplied by Δt).
    pub mass_flux_net: f64,
    pub weighted_l2_sq: f64,
    pub energy_delta: f64,
    pub boundary_flux_sq: f64,
    pub dissipation: f64,
    pub drift_term: f64,
    pub zeroth_term: f64,
    pub source_term: f64,
    pub residual: f64,
}

impl LedgerRecord {
    pub fn zero(step: u64, t: f64, q: f64) -> Self {
        LedgerRecord {
            step,
            t,
            weight_q: q,
            mass: 0.0,
            mass_flux_net: 0.0,
            weighted_l2_sq: 0.0,
            energy_delta: 0.0,
            boundary_flux_sq: 0.0,
            dissipation: 0.0,
            drift_term: 0.0,
            zeroth_term: 0.0,
            source_term: 0.0,
            residual: 0.0,
        }
    }
}

/// Grid function at one time level plus its step history.
#[derive(Debug, Clone)]
pub struct SolutionField {
    grid: Grid,
    pub t: f64,
    data: Vec<f64>,
    step_index: u64,
    last_step: Option<StepRecord>,
    ledger: Vec<LedgerRecord>,
}

impl SolutionField {
    /// Initial condition sampled at cell centers × velocity nodes.
    pub fn new<F>(grid: Grid, t0: f64, init: F) -> Self
    where
        F: Fn(f64, f64) -> f64,
    {
        let mut data = vec![0.0; grid.len()];
        for i in 0..grid.nx {
            for j in 0..=grid.nv {
                data[grid.index(i, j)] = init(grid.x_center(i), grid.v_node(j));
            }
        }
        SolutionField { grid, t: t0, data, step_index: 0, last_step: None, ledger: Vec::new() }
    }

    pub(crate) fn from_step(
        grid: Grid,
        t: f64,
        data: Vec<f64>,
        step_index: u64,
        record: StepRecord,
        mut ledger: Vec<LedgerRecord>,
        entry: LedgerRecord,
    ) -> Self {
        ledger.push(entry);
        SolutionField { grid, t, data, step_index, last_step: Some(record), ledger }
    }

    pub(crate) fn from_values(grid: Grid, t: f64, data: Vec<f64>) -> Self {
        SolutionField { grid, t, data, step_index: 0, last_step: None, ledger: Vec::new() }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.data[self.grid.index(i, j)]
    }

    pub fn step_index(&self) -> u64 {
        self.step_index
    }

    pub fn last_step(&self) -> Option<&StepRecord> {
        self.last_step.as_ref()
    }

    pub fn ledger(&self) -> &[LedgerRecord] {
        &self.ledger
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &x| m.max(x.abs()))
    }

    /// ∫ f dx dv by midpoint × trapezoid quadrature.
    pub fn mass(&self) -> f64 {
        let g = &self.grid;
        let mut total = 0.0;
        for i in 0..g.nx {
            for j in 0..=g.nv {
                total += g.hx * g.v_weight(j) * self.data[g.index(i, j)];
            }
        }
        total
    }

    /// ∫ f² ⟨v⟩^{2q} dx dv.
    pub fn weighted_l2_sq(&self, q: f64) -> f64 {
        let g = &self.grid;
        let mut total = 0.0;
        for i in 0..g.nx {
            for j in 0..=g.nv {
                let v = g.v_node(j);
                let w = (1.0 + v * v).powf(q);
                let f = self.data[g.index(i, j)];
                total += g.hx * g.v_weight(j) * f * f * w;
            }
        }
        total
    }

    /// L² distance to another field on the same grid layout.
    pub fn l2_distance(&self, other: &SolutionField) -> f64 {
        assert_eq!(self.grid.nx, other.grid.nx, "grid mismatch");
        assert_eq!(self.grid.nv, other.grid.nv, "grid mismatch");
        let g = &self.grid;
        let mut total = 0.0;
        for i in 0..g.nx {
            for j in 0..=g.nv {
                let d = self.data[g.index(i, j)] - other.data[g.index(i, j)];
                total += g.hx * g.v_weight(j) * d * d;
            }
        }
        total.sqrt()
    }

    /// Trace of the field at both faces by restriction: the value of
    /// the piecewise-constant reconstruction in the boundary cell.
    pub fn restriction_traces(&self) -> TraceSet {
        let g = &self.grid;
        let mut left = vec![0.0; g.nv + 1];
        let mut right = vec![0.0; g.nv + 1];
        for j in 0..=g.nv {
            left[j] = self.data[g.index(0, j)];
            right[j] = self.data[g.index(g.nx - 1, j)];
        }
        TraceSet { left, right }
    }

    /// Splits γf into its outgoing (γ₊) and incoming (γ₋) parts per
    /// face.  Outgoing values come from restriction; incoming values
    /// come from the boundary data applied by the last step when one
    /// exists, otherwise from restriction.  Grazing nodes (n·v = 0)
    /// carry zero in both parts, matching the vanishing boundary
    /// measure there.
    pub fn extract_traces(&self) -> (TraceSet, TraceSet) {
        let g = &self.grid;
        let restriction = self.restriction_traces();
        let mut out = TraceSet { left: vec![0.0; g.nv + 1], right: vec![0.0; g.nv + 1] };
        let mut inc = TraceSet { left: vec![0.0; g.nv + 1], right: vec![0.0; g.nv + 1] };
        for j in 0..=g.nv {
            let v = g.v_node(j);
            // left face normal −1: n·v = −v
            if v < 0.0 {
                out.left[j] = restriction.left[j];
            } else if v > 0.0 {
                inc.left[j] = match &self.last_step {
                    Some(rec) => rec.incoming_left[j],
                    None => restriction.left[j],
                };
            }
            // right face normal +1
            if v > 0.0 {
                out.right[j] = restriction.right[j];
            } else if v < 0.0 {
                inc.right[j] = match &self.last_step {
                    Some(rec) => rec.incoming_right[j],
                    None => restriction.right[j],
                };
            }
        }
        (out, inc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(1.0, 8, 2.0, 8, 1e-2).unwrap()
    }

    #[test]
    fn constant_field_mass_and_traces() {
        let f = SolutionField::new(grid(), 0.0, |_, _| 1.0);
        // ∫ over (0,1)×[−2,2] of 1 = 4
        assert!((f.mass() - 4.0).abs() < 1e-12);
        let (out, inc) = f.extract_traces();
        let g = f.grid().clone();
        for j in 0..=g.nv {
            let v = g.v_node(j);
            if v < 0.0 {
                assert_eq!(out.left[j], 1.0);
                assert_eq!(inc.right[j], 1.0);
            } else if v > 0.0 {
                assert_eq!(out.right[j], 1.0);
                assert_eq!(inc.left[j], 1.0);
            } else {
                assert_eq!(out.left[j], 0.0);
                assert_eq!(inc.left[j], 0.0);
            }
        }
    }

    #[test]
    fn interior_supported_field_has_zero_traces() {
        let f = SolutionField::new(grid(), 0.0, |x, _| {
            if (0.3..0.7).contains(&x) {
                1.0
            } else {
                0.0
            }
        });
        let (out, inc) = f.extract_traces();
        assert!(out.left.iter().chain(&out.right).all(|&x| x == 0.0));
        assert!(inc.left.iter().chain(&inc.right).all(|&x| x == 0.0));
    }

    #[test]
    fn trace_sup_is_bounded_by_field_sup() {
        let f = SolutionField::new(grid(), 0.0, |x, v| (13.0 * x).sin() * (7.0 * v).cos() + 0.3);
        let (out, inc) = f.extract_traces();
        let sup = f.max_abs();
        for t in out.left.iter().chain(&out.right).chain(&inc.left).chain(&inc.right) {
            assert!(t.abs() <= sup + 1e-15);
        }
    }

    #[test]
    fn weighted_norm_reduces_to_plain_l2_at_q_zero() {
        let f = SolutionField::new(grid(), 0.0, |x, v| x + 0.1 * v);
        let plain = f.weighted_l2_sq(0.0);
        let mut direct = 0.0;
        let g = f.grid().clone();
        for i in 0..g.nx {
            for j in 0..=g.nv {
                direct += g.hx * g.v_weight(j) * f.value(i, j) * f.value(i, j);
            }
        }
        assert!((plain - direct).abs() < 1e-14 * direct.abs().max(1.0));
        assert!(f.weighted_l2_sq(1.0) > plain);
    }
}
