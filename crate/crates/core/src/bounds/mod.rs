//! Norm and spectral estimates, the density band and window, k-sum limits
//! and the condensation scan.

mod density;
mod limits;
mod norms;

pub use density::{
    density_band_check, density_window, g, g_series, g_truncated, window_empirical_check, BandRow,
    CheckStatus, DensityWindow, GSeries, WindowSample, BAND_CONVERGENCE_TOL, SERIES_TOL, WINDOW_TOL,
};
pub use limits::{
    bound_monotone_in_lambda, condensation_scan, ksum, ksum_limit_1d, ksum_limit_2d,
    ksum_lower_bound_2d, ksum_vs_integral, order_parameter_bound, scan_point, scan_points,
    write_scan_csv, CutoffPolicy, KsumRow, KsumTable, ScanRow, ScanSpec, ScanStatus,
};
pub use norms::{
    admissibility_threshold, ground_energy_bound, ground_energy_check, pair_hopping_norm,
    random_state, relative_bound_checks, sector_norm_checks, smallest_admissible_k,
    two_site_block_norm_squared, GroundEnergyEntry, GroundEnergyReport, RelativeBoundReport,
    SectorNormReport, SECTOR_NORM_TOL,
};
