//! Upload and download cost model for every scheme at equal worker load.
//!
//! SDGMM rows use `p` inner partitions; MatDot and DFT rows use `2p`, so each
//! worker multiplies matrices of the same size in every scheme. Costs are in
//! field elements.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::degree::{distinct_exponents, ExponentVector};
use crate::error::{Error, Result};
use crate::exponents::{construct_doubling, construct_trivial, search_min_max};
use crate::matdot::matdot_gram_costs;
use crate::matrix::triangle_len;

pub const CSV_HEADER: &str = "scheme,p,partitions,R,upload_elems,download_elems,straggler_tolerant";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    SdgmmTrivial,
    SdgmmI,
    SdgmmIi,
    Matdot,
    Dft,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [Scheme::SdgmmTrivial, Scheme::SdgmmI, Scheme::SdgmmIi, Scheme::Matdot, Scheme::Dft];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::SdgmmTrivial => "sdgmm-trivial",
            Scheme::SdgmmI => "sdgmm-i",
            Scheme::SdgmmIi => "sdgmm-ii",
            Scheme::Matdot => "matdot",
            Scheme::Dft => "dft",
        }
    }

    pub fn is_sdgmm(self) -> bool {
        matches!(self, Scheme::SdgmmTrivial | Scheme::SdgmmI | Scheme::SdgmmIi)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| Error::InvalidScheme(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostRow {
    pub scheme: Scheme,
    pub p: usize,
    pub partitions: usize,
    /// Workers needed to decode (the full worker count for DFT).
    pub r: usize,
    pub upload_elems: f64,
    pub download_elems: u64,
    pub straggler_tolerant: bool,
    /// Only the cost formula exists; the scheme is not implemented.
    pub model_only: bool,
    /// Exponent vector behind an SDGMM row.
    pub phi: Option<Vec<u64>>,
}

impl CostRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.scheme,
            self.p,
            self.partitions,
            self.r,
            self.upload_elems,
            self.download_elems,
            self.straggler_tolerant
        )
    }
}

fn sdgmm_row(scheme: Scheme, phi: &ExponentVector, t: usize, s: usize) -> CostRow {
    let p = phi.useful();
    let h = distinct_exponents(phi.as_slice()).members().len();
    let r = h.min(2 * phi.largest() as usize + 1);
    CostRow {
        scheme,
        p,
        partitions: p,
        r,
        upload_elems: r as f64 * (t * s) as f64 / p as f64,
        download_elems: (r * triangle_len(t)) as u64,
        straggler_tolerant: true,
        model_only: false,
        phi: Some(phi.as_slice().to_vec()),
    }
}

/// Cost row for `scheme` with `p` SDGMM partitions. `budget` bounds the
/// Scheme II search.
pub fn scheme_params(scheme: Scheme, p: usize, t: usize, s: usize, budget: Option<u64>) -> Result<CostRow> {
    if p == 0 {
        return Err(Error::InvalidPartition(p));
    }
    let row = match scheme {
        Scheme::SdgmmTrivial => sdgmm_row(scheme, &construct_trivial(p)?, t, s),
        Scheme::SdgmmI => sdgmm_row(scheme, &construct_doubling(p)?, t, s),
        Scheme::SdgmmIi => sdgmm_row(scheme, &search_min_max(p, budget)?.phi, t, s),
        Scheme::Matdot => {
            let c = matdot_gram_costs(2 * p, t, s)?;
            CostRow {
                scheme,
                p,
                partitions: 2 * p,
                r: c.n_workers,
                upload_elems: c.upload_elems,
                download_elems: c.download_elems,
                straggler_tolerant: true,
                model_only: false,
                phi: None,
            }
        }
        Scheme::Dft => {
            // inner partitions plus one noise term on each side (X = 1)
            let n = 2 * p + 2;
            CostRow {
                scheme,
                p,
                partitions: 2 * p,
                r: n,
                upload_elems: n as f64 * (t * s) as f64 / p as f64,
                download_elems: (n * t * t) as u64,
                straggler_tolerant: false,
                model_only: true,
                phi: None,
            }
        }
    };
    Ok(row)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossover {
    pub scheme: Scheme,
    /// Largest `p` such that upload is below MatDot for every `p' ≤ p` in range.
    pub below_matdot_through: Option<usize>,
    /// First `p` where upload is at least MatDot's.
    pub first_not_below: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostTable {
    pub rows: Vec<CostRow>,
    pub crossovers: Vec<Crossover>,
}

impl CostTable {
    pub fn row(&self, scheme: Scheme, p: usize) -> Option<&CostRow> {
        self.rows.iter().find(|r| r.scheme == scheme && r.p == p)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.csv_line());
            out.push('\n');
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.crossovers {
            match c.below_matdot_through {
                Some(p) => writeln!(out, "{}: upload below matdot for p <= {p}", c.scheme),
                None => writeln!(out, "{}: upload never below matdot in range", c.scheme),
            }
            .expect("write to String");
        }
        if self.rows.iter().any(|r| r.model_only) {
            out.push_str("dft: cost model only, not straggler tolerant\n");
        }
        out
    }
}

/// Rows for every scheme and `p` in `p_range`, ordered by scheme then `p`.
pub fn compare_table(
    p_range: std::ops::RangeInclusive<usize>,
    t: usize,
    s: usize,
    budget: Option<u64>,
) -> Result<CostTable> {
    let mut rows = Vec::new();
    for scheme in Scheme::ALL {
        for p in p_range.clone() {
            rows.push(scheme_params(scheme, p, t, s, budget)?);
        }
    }
    let crossovers = Scheme::ALL
        .into_iter()
        .filter(|k| *k != Scheme::Matdot)
        .map(|scheme| {
            let mut through = None;
            let mut first_not_below = None;
            for p in p_range.clone() {
                let ours = rows.iter().find(|r| r.scheme == scheme && r.p == p).expect("row exists");
                let matdot = rows.iter().find(|r| r.scheme == Scheme::Matdot && r.p == p).expect("row exists");
                if ours.upload_elems < matdot.upload_elems {
                    if first_not_below.is_none() {
                        through = Some(p);
                    }
                } else if first_not_below.is_none() {
                    first_not_below = Some(p);
                }
            }
            Crossover { scheme, below_matdot_through: through, first_not_below }
        })
        .collect();
    Ok(CostTable { rows, crossovers })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_names_round_trip() {
        for k in Scheme::ALL {
            assert_eq!(k.name().parse::<Scheme>().unwrap(), k);
        }
        assert!(matches!("gasp".parse::<Scheme>(), Err(Error::InvalidScheme(_))));
    }

    #[test]
    fn known_rows() {
        assert_eq!(scheme_params(Scheme::SdgmmI, 7, 1, 1, None).unwrap().r, 27);
        let md = scheme_params(Scheme::Matdot, 7, 1, 1, None).unwrap();
        assert_eq!((md.r, md.partitions), (29, 14));
        assert!((md.upload_elems - 29.0 / 7.0).abs() < 1e-12);
        let ii = scheme_params(Scheme::SdgmmIi, 4, 1, 1, None).unwrap();
        assert_eq!(ii.r, 14);
        assert_eq!(ii.phi.unwrap().last(), Some(&8));
        assert_eq!(scheme_params(Scheme::SdgmmIi, 1, 1, 1, None).unwrap().r, 3);
        assert_eq!(scheme_params(Scheme::Matdot, 1, 1, 1, None).unwrap().r, 5);
        let dft = scheme_params(Scheme::Dft, 3, 2, 6, None).unwrap();
        assert_eq!((dft.r, dft.upload_elems, dft.download_elems), (8, 32.0, 32));
        assert!(!dft.straggler_tolerant && dft.model_only);
    }

    #[test]
    fn sdgmm_download_counts_lower_triangle() {
        let row = scheme_params(Scheme::SdgmmI, 3, 4, 8, None).unwrap();
        assert_eq!(row.r, 9);
        assert_eq!(row.download_elems, 9 * 10);
        assert_eq!(row.upload_elems, 9.0 * 32.0 / 3.0);
    }

    #[test]
    fn crossover_through_seven() {
        let table = compare_table(1..=8, 1, 1, None).unwrap();
        for scheme in [Scheme::SdgmmI, Scheme::SdgmmIi] {
            let c = table.crossovers.iter().find(|c| c.scheme == scheme).unwrap();
            assert_eq!(c.below_matdot_through, Some(7));
            assert_eq!(c.first_not_below, Some(8));
        }
        assert_eq!(table.row(Scheme::SdgmmIi, 8).unwrap().r, 34);
        assert_eq!(table.rows.len(), 40);
    }

    #[test]
    fn csv_shape() {
        let table = compare_table(1..=2, 2, 4, None).unwrap();
        let csv = table.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next(), Some("sdgmm-trivial,1,1,3,24,9,true"));
        assert_eq!(csv.lines().count(), 11);
        assert!(table.summary().contains("dft: cost model only"));
    }
}
