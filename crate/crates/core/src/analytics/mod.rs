//! Closed-form results: transition probabilities, asymptotic photon
//! statistics, the exact sector solution and the special functions it needs.

pub mod closed_form;
pub mod pcf;
pub mod sector;
pub mod special;

pub use closed_form::{
    cat_mean_photon, joint_up_prob, p_up0, p_up_n, photon_stats_infty, plz_cat_norwa,
    plz_cat_norwa_sum, plz_cat_rwa, plz_even_cat, plz_fock_avg, plz_odd_cat, plz_thermal_norwa,
    plz_thermal_norwa_reduced, plz_thermal_norwa_sum, plz_thermal_rwa, plz_thermal_rwa_survival,
    plz_yurke_stoler, ClosedFormInputs, NoRwaEstimate, PhotonStatsInfinity,
};
pub use pcf::{pcf_d, pcf_d_estimate, PcfError, PcfMethod, PcfValue};
pub use sector::{sector_coeffs_analytic, SectorCoefficients};
