//! Airy function, sine and Airy kernels, Fredholm determinants, the
//! Hastings–McLeod transcendent and Tracy–Widom distributions.

mod airy;
mod fredholm;
mod limit;
mod painleve;
mod tracy_widom;

pub use airy::{airy, AiryValues, AIRY_MAX, AIRY_MIN};
pub use fredholm::{fredholm_det, fredholm_det_tabulated, nystrom_det, FredholmConfig, FredholmValue, KernelTable};
pub use limit::{gue_gap_probability, kernel_eval, kernel_limit_check, KernelKind, KernelLimitReport, Regime};
pub use painleve::{default_solution, hastings_mcleod, PainleveSolution};
pub use tracy_widom::{
    default_table, tw2_fredholm, tw_cdf, tw_cdf_with, tw_pvalue, PValue, Tw1Variant, TwMethod, TwTable, TW_MAX, TW_MIN,
};
