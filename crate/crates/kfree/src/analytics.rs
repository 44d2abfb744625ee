//! Theoretical constants (zeta values, densities, entropies) and the
//! empirical-vs-theoretical comparison tables.
//!
//! Ring k-free densities are not stated in the source material; they are
//! computed as truncated Euler products over the prime norms and tagged
//! `extension` in every output, as consistency checks only.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ring::{split_kind, RingId, SplitKind};
use crate::sieve::{density_of, primes_up_to, BoxWindow, VSpec};

/// Riemann zeta via a partial sum plus an Euler–Maclaurin tail whose
/// remainder is bounded by the first omitted term (x^{−s} is completely
/// monotone), with guaranteed absolute error ≤ tol.
pub fn zeta(s: f64, tol: f64) -> Result<f64> {
    // NaN arguments must fall through to the error arm
    if s.is_nan() || s < 1.5 {
        return Err(Error::domain("zeta truncation needs s ≥ 1.5"));
    }
    if tol.is_nan() || tol < 1e-14 {
        return Err(Error::domain("tolerance must be ≥ 1e-14"));
    }
    let float_slack = 1e-15;
    let mut n: u64 = 16;
    loop {
        let nf = n as f64;
        let remainder = s * (s + 1.0) * (s + 2.0) * nf.powf(-s - 3.0) / 720.0;
        if remainder + float_slack <= tol || n >= 1 << 40 {
            break;
        }
        n *= 2;
    }
    // sum ascending in magnitude for accuracy, with compensation
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for j in (1..=n).rev() {
        let term = (j as f64).powf(-s);
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let nf = n as f64;
    let tail = nf.powf(1.0 - s) / (s - 1.0) - 0.5 * nf.powf(-s)
        + s * nf.powf(-s - 1.0) / 12.0;
    Ok(sum + tail)
}

/// How a theoretical constant is grounded.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Closed form through the Riemann zeta function.
    Zeta,
    /// Truncated Euler product over prime norms; a consistency check, not
    /// ground truth.
    EulerProductExtension { norm_limit: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TheoreticalDensity {
    pub value: f64,
    pub provenance: Provenance,
}

pub const DEFAULT_EULER_LIMIT: u64 = 1_000_000;
const ZETA_TOL: f64 = 1e-13;

/// Π (1 − |N(π)|^{−k}) over the canonical primes with |N(π)| ≤ norm_limit.
/// Monotone decreasing in the limit.
pub fn euler_product(ring: RingId, k: u32, norm_limit: u64) -> Result<f64> {
    if ring == RingId::Rational {
        return Err(Error::domain("use the zeta closed form for Z"));
    }
    let mut product = 1.0f64;
    for p in primes_up_to(norm_limit) {
        let pf = p as f64;
        match split_kind(ring, p as i64)? {
            SplitKind::Ramified => product *= 1.0 - pf.powi(-(k as i32)),
            SplitKind::Split => {
                let f = 1.0 - pf.powi(-(k as i32));
                product *= f * f;
            }
            SplitKind::Inert => {
                if p.checked_mul(p).is_some_and(|pp| pp <= norm_limit) {
                    product *= 1.0 - pf.powi(-2 * k as i32);
                }
            }
        }
    }
    Ok(product)
}

pub fn theoretical_density(spec: &VSpec) -> Result<TheoreticalDensity> {
    theoretical_density_with_limit(spec, DEFAULT_EULER_LIMIT)
}

/// visible(d) → 1/ζ(d); kfree_lattice(d,k) → 1/ζ(kd); kfree_ring → the
/// truncated Euler product, flagged as extension.
pub fn theoretical_density_with_limit(
    spec: &VSpec,
    norm_limit: u64,
) -> Result<TheoreticalDensity> {
    spec.validate()?;
    match spec {
        VSpec::Visible { d } => {
            if *d < 2 {
                return Err(Error::domain("visible(d) needs d ≥ 2"));
            }
            Ok(TheoreticalDensity {
                value: 1.0 / zeta(*d as f64, ZETA_TOL)?,
                provenance: Provenance::Zeta,
            })
        }
        VSpec::KfreeLattice { d, k } => Ok(TheoreticalDensity {
            value: 1.0 / zeta((*d as u32 * k) as f64, ZETA_TOL)?,
            provenance: Provenance::Zeta,
        }),
        VSpec::KfreeRing { ring, k } => Ok(TheoreticalDensity {
            value: euler_product(*ring, *k, norm_limit)?,
            provenance: Provenance::EulerProductExtension { norm_limit },
        }),
        VSpec::BfreeLattice { .. } => Err(Error::domain(
            "no closed-form density for an explicit modulus list",
        )),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropyValue {
    pub value: f64,
    pub provenance: Provenance,
}

/// Topological entropy density·log 2: paper-backed for visible(d ≥ 2) and
/// the k-free lattice points; extension-flagged for the ring sets.
pub fn entropy(spec: &VSpec) -> Result<EntropyValue> {
    match spec {
        VSpec::Visible { d } if *d < 2 => Err(Error::domain("entropy needs d ≥ 2")),
        VSpec::BfreeLattice { .. } => {
            Err(Error::domain("no entropy constant for an explicit modulus list"))
        }
        _ => {
            let td = theoretical_density(spec)?;
            Ok(EntropyValue {
                value: td.value * std::f64::consts::LN_2,
                provenance: td.provenance,
            })
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityRow {
    pub radius: i64,
    pub members: u64,
    pub box_points: u64,
    pub empirical: f64,
    pub rel_error: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    pub schema: &'static str,
    pub spec: VSpec,
    pub theoretical: Option<TheoreticalDensity>,
    pub rows: Vec<DensityRow>,
}

/// Empirical densities over a radius schedule, against the theoretical
/// constant when one exists.
pub fn density_report(spec: &VSpec, radii: &[i64], threads: usize) -> Result<DensityReport> {
    density_report_with_limit(spec, radii, threads, DEFAULT_EULER_LIMIT)
}

pub fn density_report_with_limit(
    spec: &VSpec,
    radii: &[i64],
    threads: usize,
    norm_limit: u64,
) -> Result<DensityReport> {
    spec.validate()?;
    let theoretical = match theoretical_density_with_limit(spec, norm_limit) {
        Ok(t) => Some(t),
        Err(Error::Domain(_)) => None,
        Err(e) => return Err(e),
    };
    let mut rows = Vec::with_capacity(radii.len());
    for &radius in radii {
        let window = BoxWindow::new(spec.dim(), radius)?;
        let d = density_of(spec, &window, threads)?;
        let empirical = d.value;
        rows.push(DensityRow {
            radius,
            members: d.numerator * (window.point_count() / d.denominator),
            box_points: window.point_count(),
            empirical,
            rel_error: theoretical.map(|t| (empirical - t.value).abs() / t.value),
        });
    }
    Ok(DensityReport { schema: "density/1", spec: spec.clone(), theoretical, rows })
}

pub fn density_report_csv(report: &DensityReport) -> String {
    let mut out = String::from("spec,radius,empirical,theoretical,rel_error,provenance\n");
    let (theo, prov) = match report.theoretical {
        Some(t) => (
            t.value.to_string(),
            match t.provenance {
                Provenance::Zeta => "zeta".to_string(),
                Provenance::EulerProductExtension { norm_limit } => {
                    format!("euler_product_extension(N<={norm_limit})")
                }
            },
        ),
        None => (String::new(), String::new()),
    };
    for row in &report.rows {
        let rel = row.rel_error.map(|e| e.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            report.spec, row.radius, row.empirical, theo, rel, prov
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zeta_closed_forms() {
        assert!((zeta(2.0, 1e-13).unwrap() - PI * PI / 6.0).abs() < 1e-12);
        assert!((zeta(4.0, 1e-13).unwrap() - PI.powi(4) / 90.0).abs() < 1e-12);
        assert!((zeta(6.0, 1e-13).unwrap() - PI.powi(6) / 945.0).abs() < 1e-12);
        assert!(zeta(1.2, 1e-10).is_err());
        assert!(zeta(2.0, 1e-16).is_err());
    }

    #[test]
    fn zeta_tail_bound_self_consistency() {
        // doubling the tolerance target must stay within the coarser bound
        let coarse = zeta(6.0, 1e-9).unwrap();
        let fine = zeta(6.0, 1e-13).unwrap();
        assert!((coarse - fine).abs() <= 1e-9);
    }

    #[test]
    fn densities_and_entropy() {
        let vis = theoretical_density(&VSpec::Visible { d: 2 }).unwrap();
        assert!((vis.value - 6.0 / (PI * PI)).abs() < 1e-12);
        assert_eq!(vis.provenance, Provenance::Zeta);

        let kf = theoretical_density(&VSpec::KfreeLattice { d: 2, k: 2 }).unwrap();
        assert!((kf.value - 90.0 / PI.powi(4)).abs() < 1e-12);

        let ent = entropy(&VSpec::Visible { d: 2 }).unwrap();
        assert!((ent.value - vis.value * std::f64::consts::LN_2).abs() < 1e-15);
        let e3 = entropy(&VSpec::KfreeLattice { d: 3, k: 2 }).unwrap();
        assert!((e3.value - std::f64::consts::LN_2 / zeta(6.0, 1e-13).unwrap()).abs() < 1e-14);

        assert!(entropy(&VSpec::Visible { d: 1 }).is_err());
    }

    #[test]
    fn euler_product_monotone_in_truncation() {
        let spec = VSpec::KfreeRing { ring: RingId::Gauss, k: 2 };
        let coarse = theoretical_density_with_limit(&spec, 100).unwrap();
        let fine = theoretical_density_with_limit(&spec, 10_000).unwrap();
        assert!(fine.value < coarse.value);
        assert!(matches!(fine.provenance, Provenance::EulerProductExtension { norm_limit: 10_000 }));
    }

    #[test]
    fn report_rows_and_csv() {
        let spec = VSpec::Visible { d: 2 };
        let report = density_report(&spec, &[50, 100], 1).unwrap();
        assert_eq!(report.rows.len(), 2);
        assert!(report.theoretical.is_some());
        let csv = density_report_csv(&report);
        assert!(csv.starts_with("spec,radius,empirical,"));
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.contains("visible(2),50,"));
    }
}
