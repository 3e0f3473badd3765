//! Closed-form models: the two-level gain/loss dimer, a two-mode fermionic
//! system, and an exceptional-point scanner for the dimer.

mod dimer;
mod ep_scan;
mod fermion;

pub use dimer::{bch_conjugation_check, dimer_build, dimer_from_coupling, DimerModel, DimerParams};
pub use ep_scan::{ep_scan, spectral_probe, EPScanReport, EP_GAP_REL};
pub use fermion::{
    annihilation_operators, fermionic_build, fermionic_from_fock, FermionicModel, FermionicParams,
};

use crate::linalg::{c64, from_rows, ComplexMatrix};

pub fn sigma_x() -> ComplexMatrix {
    from_rows(
        2,
        2,
        &[c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)],
    )
}

pub fn sigma_y() -> ComplexMatrix {
    from_rows(
        2,
        2,
        &[c64(0.0, 0.0), c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, 0.0)],
    )
}

pub fn sigma_z() -> ComplexMatrix {
    from_rows(
        2,
        2,
        &[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(-1.0, 0.0)],
    )
}
