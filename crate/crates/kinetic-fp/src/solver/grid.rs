//! Phase-space grid: uniform cells in position, uniform nodes in
//! velocity.
//!
//! Position uses cell centers x_i = x0 + (i+1/2)h_x over an interval of
//! given length (x0 = 0 for the physical domain; mirror extensions use
//! a negative offset).  Velocity uses the closed node set
//! v_j = (j − n_v/2)·h_v, j = 0..n_v, which is symmetric about 0 bit
//! for bit, contains v = 0 (n_v even), and is closed under v → −v, so
//! specular reflection maps nodes to nodes exactly.

use std::error::Error;
use std::fmt;

/// Default CFL bound for the explicit transport substep.
pub const CFL_DEFAULT: f64 = 0.9;

#[derive(Debug, Clone)]
pub enum GridError {
    BadParameter { what: &'static str, value: f64 },
    OddVelocityIntervals { nv: usize },
    CflViolation { ratio: f64, limit: f64 },
}

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridError::BadParameter { what, value } => write!(f, "invalid {what}: {value}"),
            GridError::OddVelocityIntervals { nv } => {
                write!(f, "velocity interval count must be even to keep a node at v=0, got {nv}")
            }
            GridError::CflViolation { ratio, limit } => write!(
                f,
                "CFL violated: dt*V/h_x = {ratio} exceeds the limit {limit}; shrink dt or coarsen x"
            ),
        }
    }
}

impl Error for GridError {}

/// Uniform phase-space grid with time step.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    /// Left edge of the position interval (0 except for extensions).
    pub x0: f64,
    /// Interval length; cells cover (x0, x0+length).
    pub length: f64,
    pub nx: usize,
    pub hx: f64,
    /// Effective velocity bound: v ranges over [−vmax, vmax] with nodes
    /// at both ends.
    pub vmax: f64,
    /// Number of velocity intervals (even); there are nv+1 nodes.
    pub nv: usize,
    pub hv: f64,
    pub dt: f64,
    pub cfl_limit: f64,
}

impl Grid {
    /// Grid on (0, length) × [−vmax, vmax] with the default CFL limit.
    pub fn new(length: f64, nx: usize, vmax: f64, nv: usize, dt: f64) -> Result<Self, GridError> {
        Self::with_cfl(length, nx, vmax, nv, dt, CFL_DEFAULT)
    }

    pub fn with_cfl(
        length: f64,
        nx: usize,
        vmax: f64,
        nv: usize,
        dt: f64,
        cfl_limit: f64,
    ) -> Result<Self, GridError> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(GridError::BadParameter { what: "interval length", value: length });
        }
        if nx < 2 {
            return Err(GridError::BadParameter { what: "position cell count", value: nx as f64 });
        }
        if !(vmax > 0.0 && vmax.is_finite()) {
            return Err(GridError::BadParameter { what: "velocity bound", value: vmax });
        }
        if nv < 4 {
            return Err(GridError::BadParameter { what: "velocity interval count", value: nv as f64 });
        }
        if nv % 2 != 0 {
            return Err(GridError::OddVelocityIntervals { nv });
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(GridError::BadParameter { what: "time step", value: dt });
        }
        if !(cfl_limit > 0.0 && cfl_limit.is_finite()) {
            return Err(GridError::BadParameter { what: "CFL limit", value: cfl_limit });
        }
        let hx = length / nx as f64;
        let hv = 2.0 * vmax / nv as f64;
        // the achieved bound (nv/2)·hv, which is what the node set realizes
        let vmax_eff = (nv / 2) as f64 * hv;
        let ratio = dt * vmax_eff / hx;
        if ratio > cfl_limit * (1.0 + 1e-12) {
            return Err(GridError::CflViolation { ratio, limit: cfl_limit });
        }
        Ok(Grid { x0: 0.0, length, nx, hx, vmax: vmax_eff, nv, hv, dt, cfl_limit })
    }

    /// Cell center x_i = x0 + (i + 1/2) h_x.
    pub fn x_center(&self, i: usize) -> f64 {
        self.x0 + (i as f64 + 0.5) * self.hx
    }

    /// Face position x0 + i h_x for i = 0..=nx.
    pub fn x_face(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.hx
    }

    /// Node velocity v_j = (j − nv/2) h_v; exactly antisymmetric under
    /// j → nv−j.
    pub fn v_node(&self, j: usize) -> f64 {
        (j as i64 - (self.nv / 2) as i64) as f64 * self.hv
    }

    /// Index of the node with velocity −v_j.
    pub fn mirror_v(&self, j: usize) -> usize {
        self.nv - j
    }

    /// Trapezoid quadrature weight of node j on [−vmax, vmax].
    pub fn v_weight(&self, j: usize) -> f64 {
        if j == 0 || j == self.nv {
            0.5 * self.hv
        } else {
            self.hv
        }
    }

    pub fn n_nodes_v(&self) -> usize {
        self.nv + 1
    }

    /// Flat index of (cell i, velocity node j).
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * (self.nv + 1) + j
    }

    /// Number of stored unknowns.
    pub fn len(&self) -> usize {
        self.nx * (self.nv + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn velocity_nodes_are_exactly_symmetric() {
        let g = Grid::new(1.0, 50, 3.0, 30, 1e-3).unwrap();
        assert_eq!(g.v_node(g.nv / 2), 0.0);
        for j in 0..=g.nv {
            assert_eq!(g.v_node(j), -g.v_node(g.mirror_v(j)));
        }
        assert_eq!(g.v_node(0), -g.vmax);
        assert_eq!(g.v_node(g.nv), g.vmax);
    }

    #[test]
    fn quadrature_weights_sum_to_box_length() {
        let g = Grid::new(1.0, 10, 2.5, 20, 1e-3).unwrap();
        let total: f64 = (0..=g.nv).map(|j| g.v_weight(j)).sum();
        assert!((total - 2.0 * g.vmax).abs() < 1e-14);
    }

    #[test]
    fn cfl_violations_are_rejected() {
        // dt V / hx = 0.05*3/0.02 = 7.5 > 0.9
        match Grid::new(1.0, 50, 3.0, 30, 0.05) {
            Err(GridError::CflViolation { ratio, limit }) => {
                assert!(ratio > limit);
            }
            other => panic!("expected CFL rejection, got {other:?}"),
        }
        // and the limit is adjustable
        assert!(Grid::with_cfl(1.0, 50, 3.0, 30, 0.005, 0.9).is_ok());
    }

    #[test]
    fn degenerate_parameters_are_rejected() {
        assert!(Grid::new(0.0, 10, 1.0, 10, 1e-3).is_err());
        assert!(Grid::new(1.0, 1, 1.0, 10, 1e-3).is_err());
        assert!(Grid::new(1.0, 10, 1.0, 9, 1e-4).is_err());
        assert!(Grid::new(1.0, 10, -1.0, 10, 1e-3).is_err());
    }

    #[test]
    fn indexing_is_row_major_in_velocity() {
        let g = Grid::new(1.0, 4, 1.0, 4, 1e-2).unwrap();
        assert_eq!(g.index(0, 0), 0);
        assert_eq!(g.index(0, g.nv), g.nv);
        assert_eq!(g.index(1, 0), g.nv + 1);
        assert_eq!(g.len(), 4 * 5);
        assert!((g.x_center(0) - 0.125).abs() < 1e-15);
        assert_eq!(g.x_face(4), 1.0);
    }
}
