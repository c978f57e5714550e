//! Numerical analysis of holomorphic polynomial vector fields near an isolated
//! singularity: fixed-point indices of holomorphic maps, spectral center
//! conditions, and construction of the analytic disk of periodic orbits.

pub mod error;
pub mod field;
pub mod acceptance;
pub mod center;
pub mod flow;
pub mod index;
pub mod linalg;
mod newton;

pub use error::{Error, Result};
pub use field::{parse_field, serialize_field, HoloMap, Monomial, PolynomialMap};
pub use flow::{IntegratorConfig, TimeTMap, Trajectory};
pub use linalg::{CMatrix, Spectrum, C64};
pub use center::{
    accumulation_probe, analyze_spectrum, build_disk, min_period_scan, verify_disk, CenterConfig, DiskModel,
    PeriodicityReport, ProbeReport, ScanReport, SpectralReport,
};
