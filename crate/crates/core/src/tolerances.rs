use serde::{Deserialize, Serialize};

/// Numerical knobs shared across the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative rank / zero-eigenvalue threshold.
    pub rank: f64,
    /// Allowed drift of g(ẋ, ẋ) along a geodesic.
    pub conservation: f64,
    /// Finite-difference residual tolerance.
    pub fd: f64,
    /// Allowed ‖ΦᵀΩΦ − Ω‖_F per flow sample.
    pub sympl: f64,
    /// Geodesic / Jacobi residual tolerance.
    pub resid: f64,
    /// Focal-instant localization, relative to the interval length.
    pub t_rel: f64,
    /// Spatial step for finite differences of projector fields.
    pub fd_step: f64,
    /// Smallest singular value below which a focal kernel direction is declared.
    pub focal_zero: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank: 1e-8,
            conservation: 1e-7,
            fd: 1e-5,
            sympl: 1e-8,
            resid: 1e-6,
            t_rel: 1e-8,
            fd_step: 1e-5,
            focal_zero: 1e-6,
        }
    }
}

impl Tolerances {
    /// Defaults overridden by `SUBMASLOV_TOL_<KNOB>` environment variables
    /// (e.g. `SUBMASLOV_TOL_RANK=1e-9`). Unparseable values are ignored.
    pub fn from_env() -> Self {
        let mut t = Tolerances::default();
        t.apply_env();
        t
    }

    pub fn apply_env(&mut self) {
        let knobs: [(&str, &mut f64); 8] = [
            ("RANK", &mut self.rank),
            ("CONSERVATION", &mut self.conservation),
            ("FD", &mut self.fd),
            ("SYMPL", &mut self.sympl),
            ("RESID", &mut self.resid),
            ("T_REL", &mut self.t_rel),
            ("FD_STEP", &mut self.fd_step),
            ("FOCAL_ZERO", &mut self.focal_zero),
        ];
        for (name, slot) in knobs {
            if let Ok(v) = std::env::var(format!("SUBMASLOV_TOL_{name}")) {
                if let Ok(x) = v.trim().parse::<f64>() {
                    if x.is_finite() && x >= 0.0 {
                        *slot = x;
                    }
                }
            }
        }
    }
}
