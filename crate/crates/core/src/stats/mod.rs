//! Rank-based tests and the distribution functions they need.

mod distributions;
mod quadrature;
mod ranks;
mod summary;

pub use distributions::{
    chi_square_sf, normal_cdf, normal_sf, regularized_gamma_q, studentized_range_sf,
};
pub use quadrature::{integrate, Integral};
pub use ranks::{kruskal_wallis, midranks, nemenyi, KruskalWallisResult, PairwiseMatrix};
pub use summary::{
    boxplot_summary, percent_changes, GroupSummary, PercentChangeRow, PercentChangeTable,
};

/// Smallest p-value printed as a number; anything lower prints as
/// `< 2.2e-16`.
pub const P_FLOOR: f64 = 2.2e-16;

/// Formats a p-value for tables. The raw value stays in JSON output.
pub fn format_p(p: f64) -> String {
    if p < P_FLOOR {
        "< 2.2e-16".to_string()
    } else if p < 1e-4 {
        format!("{p:.1e}")
    } else {
        format!("{p:.4}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_formatting() {
        assert_eq!(format_p(1e-300), "< 2.2e-16");
        assert_eq!(format_p(0.0), "< 2.2e-16");
        assert_eq!(format_p(1.2e-8), "1.2e-8");
        assert_eq!(format_p(0.0029), "0.0029");
        assert_eq!(format_p(0.43858), "0.4386");
    }
}
