//! Plain-text renderings shared by the subcommands.

use std::fmt::Write;

use nscap::symbol::SpectralDensitySamples;
use nscap::walks::{GrowthSeries, ReturnSeries};

/// A float with 17 significant digits.
pub fn sig17(x: f64) -> String {
    if x == 0.0 {
        return "0.0000000000000000".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-5..16).contains(&mag) {
        let s = format!("{:.*}", (16 - mag) as usize, x);
        // rounding may carry into a new leading digit
        let digits = s.trim_start_matches('-').replace('.', "").trim_start_matches('0').len();
        if digits > 17 {
            return format!("{:.*}", (15 - mag).max(0) as usize, x);
        }
        s
    } else {
        format!("{x:.16e}")
    }
}

pub fn density_csv(s: &SpectralDensitySamples, scale: f64) -> String {
    let mut out = String::new();
    writeln!(out, "# kernel_dim={}", sig17(s.kernel_dim)).unwrap();
    writeln!(out, "# nodes={}", s.node_count).unwrap();
    writeln!(out, "# scale={}", sig17(scale)).unwrap();
    out.push_str("lambda,F\n");
    for (l, f) in s.lambda_grid.iter().zip(&s.values) {
        writeln!(out, "{},{}", sig17(*l), sig17(*f)).unwrap();
    }
    out
}

pub fn walk_csv(rs: &ReturnSeries) -> String {
    let mut out = String::from("k,p\n");
    for (k, p) in rs.probabilities.iter().enumerate() {
        writeln!(out, "{k},{}", sig17(*p)).unwrap();
    }
    out
}

pub fn growth_csv(gs: &GrowthSeries) -> String {
    let mut out = String::from("k,b\n");
    for (k, b) in gs.counts.iter().enumerate() {
        writeln!(out, "{k},{b}").unwrap();
    }
    out
}
