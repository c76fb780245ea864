//! Formula-versus-oracle checks on single instances and named sweeps.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, BigUint};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Elem, FiniteRing};
use crate::charzero::{self, RationalForm};
use crate::cliques;
use crate::error::{Error, Result};
use crate::oracle::{self, OracleOptions};
use crate::qform::{QForm, VectorIter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Match,
    /// Values agree and the formula side carries a warning.
    Warning,
    Mismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyRecord {
    pub ring: String,
    pub form: String,
    pub scalar: String,
    pub formula_omega: u64,
    pub oracle_omega: u64,
    #[serde(serialize_with = "ser_opt_big")]
    pub formula_count: Option<BigUint>,
    pub oracle_count: Option<u64>,
    pub status: Status,
    pub warnings: Vec<String>,
}

fn ser_opt_big<S: serde::Serializer>(x: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.collect_str(v),
        None => s.serialize_none(),
    }
}

/// Checks `omega` and, over fields with `a != 0`, the maximum-clique count.
pub fn verify_instance(q: &QForm, a: Elem, opts: OracleOptions) -> Result<VerifyRecord> {
    let ring = q.ring();
    let report = cliques::clique_number(q, a)?;
    let counted = ring.is_field() && a.0 != 0;
    let (formula_count, mut warnings) = if counted {
        let c = cliques::count_max_cliques(q, a)?;
        (Some(c.omega_max), c.warnings)
    } else {
        (None, report.warnings.clone())
    };
    warnings.dedup();
    let o = oracle::oracle(q, a, opts)?;
    let omega_ok = o.omega == report.omega;
    let count_ok = formula_count.as_ref().is_none_or(|c| *c == BigUint::from(o.count));
    let status = match (omega_ok && count_ok, warnings.is_empty()) {
        (false, _) => Status::Mismatch,
        (true, true) => Status::Match,
        (true, false) => Status::Warning,
    };
    Ok(VerifyRecord {
        ring: ring.to_string(),
        form: format!("upper:{q}"),
        scalar: a.to_string(),
        formula_omega: report.omega,
        oracle_omega: o.omega,
        formula_count,
        oracle_count: Some(o.count),
        status,
        warnings,
    })
}

/// Named sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Diagonal forms over GF(3), GF(5), GF(7), `n <= 3`, every `a != 0`.
    Odd,
    /// Sums of `[a, b]` blocks over GF(2), GF(4), `n = 2, 4`, every `a != 0`.
    Char2,
    /// The forms of `odd` and `char2` with `a = 0`.
    Isotropic,
    /// Diagonal unit forms over Z/9 and Z/25, `n <= 2`, unit `a`.
    Residue,
    /// `n x <1>` over Q for `n <= 20`: fast path against the local-global search.
    Sos,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["odd", "char2", "isotropic", "residue", "sos", "all"];
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Ok(match s {
            "odd" => Suite::Odd,
            "char2" => Suite::Char2,
            "isotropic" => Suite::Isotropic,
            "residue" => Suite::Residue,
            "sos" => Suite::Sos,
            "all" => Suite::All,
            _ => {
                return Err(Error::Parse(format!(
                    "unknown suite {s:?}; expected one of {}",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Suite::Odd => "odd",
            Suite::Char2 => "char2",
            Suite::Isotropic => "isotropic",
            Suite::Residue => "residue",
            Suite::Sos => "sos",
            Suite::All => "all",
        };
        f.write_str(name)
    }
}

/// Every diagonal form with unit entries.
pub fn unit_diagonal_forms(ring: &FiniteRing, n: usize) -> Vec<QForm> {
    VectorIter::new(ring, n)
        .filter(|d| d.iter().all(|&e| ring.is_unit(e)))
        .map(|d| QForm::diagonal(ring, &d).expect("unit diagonal"))
        .collect()
}

/// Every orthogonal sum of `n / 2` binary blocks `a x^2 + xy + b y^2`.
pub fn block_forms(ring: &FiniteRing, n: usize) -> Vec<QForm> {
    assert!(n.is_multiple_of(2) && n > 0);
    VectorIter::new(ring, n)
        .map(|ab| {
            (0..n / 2)
                .map(|i| QForm::binary(ring, ab[2 * i], ab[2 * i + 1]))
                .reduce(|acc, b| acc.orthogonal_sum(&b).expect("same ring"))
                .expect("n >= 2")
        })
        .collect()
}

pub(crate) fn units(ring: &FiniteRing) -> Vec<Elem> {
    ring.elements().filter(|&e| ring.is_unit(e)).collect()
}

/// `(q, a)` pairs of a finite-ring suite.
pub fn suite_instances(suite: Suite) -> Result<Vec<(QForm, Elem)>> {
    let mut out = Vec::new();
    match suite {
        Suite::Odd => {
            for p in [3, 5, 7] {
                let ring = FiniteRing::field(p, 1)?;
                for n in 1..=3 {
                    for q in unit_diagonal_forms(&ring, n) {
                        out.extend(units(&ring).into_iter().map(|a| (q.clone(), a)));
                    }
                }
            }
        }
        Suite::Char2 => {
            for k in [1, 2] {
                let ring = FiniteRing::field(2, k)?;
                for n in [2, 4] {
                    for q in block_forms(&ring, n) {
                        out.extend(units(&ring).into_iter().map(|a| (q.clone(), a)));
                    }
                }
            }
        }
        Suite::Isotropic => {
            for p in [3, 5, 7] {
                let ring = FiniteRing::field(p, 1)?;
                for n in 1..=3 {
                    out.extend(unit_diagonal_forms(&ring, n).into_iter().map(|q| (q, ring.zero())));
                }
            }
            for k in [1, 2] {
                let ring = FiniteRing::field(2, k)?;
                for n in [2, 4] {
                    out.extend(block_forms(&ring, n).into_iter().map(|q| (q, ring.zero())));
                }
            }
        }
        Suite::Residue => {
            for p in [3, 5] {
                let ring = FiniteRing::residue(p, 2)?;
                for n in 1..=2 {
                    for q in unit_diagonal_forms(&ring, n) {
                        out.extend(units(&ring).into_iter().map(|a| (q.clone(), a)));
                    }
                }
            }
        }
        Suite::Sos | Suite::All => {
            return Err(Error::Precondition(format!(
                "suite {suite} has no finite-ring instances"
            )));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SosRecord {
    pub n: usize,
    pub fastpath: u64,
    pub local_global: u64,
    pub status: Status,
}

pub fn verify_sos(n: usize) -> Result<SosRecord> {
    let fastpath = charzero::sos_fastpath(n)?;
    let one = BigRational::from_integer(BigInt::from(1));
    let local_global = charzero::rational_omega(&RationalForm::sum_of_squares(n)?, &one)?.omega;
    Ok(SosRecord {
        n,
        fastpath,
        local_global,
        status: if fastpath == local_global {
            Status::Match
        } else {
            Status::Mismatch
        },
    })
}

/// Summary of a sweep. Only mismatching and warning records are kept.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub instances: usize,
    pub matched: usize,
    pub warnings: usize,
    pub mismatches: usize,
    pub records: Vec<VerifyRecord>,
    pub sos: Vec<SosRecord>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }

    fn empty(suite: Suite) -> SuiteReport {
        SuiteReport {
            suite,
            instances: 0,
            matched: 0,
            warnings: 0,
            mismatches: 0,
            records: Vec::new(),
            sos: Vec::new(),
        }
    }

    fn absorb(&mut self, other: SuiteReport) {
        self.instances += other.instances;
        self.matched += other.matched;
        self.warnings += other.warnings;
        self.mismatches += other.mismatches;
        self.records.extend(other.records);
        self.sos.extend(other.sos);
    }
}

pub fn run_suite(suite: Suite, opts: OracleOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::empty(suite);
    match suite {
        Suite::All => {
            for s in [Suite::Odd, Suite::Char2, Suite::Isotropic, Suite::Residue, Suite::Sos] {
                report.absorb(run_suite(s, opts)?);
            }
        }
        Suite::Sos => {
            for n in 1..=20 {
                let r = verify_sos(n)?;
                report.instances += 1;
                match r.status {
                    Status::Mismatch => report.mismatches += 1,
                    _ => report.matched += 1,
                }
                report.sos.push(r);
            }
        }
        _ => {
            let records = suite_instances(suite)?
                .par_iter()
                .map(|(q, a)| verify_instance(q, *a, opts))
                .collect::<Result<Vec<_>>>()?;
            for r in records {
                report.instances += 1;
                match r.status {
                    Status::Match => report.matched += 1,
                    Status::Warning => {
                        report.warnings += 1;
                        report.records.push(r);
                    }
                    Status::Mismatch => {
                        report.mismatches += 1;
                        report.records.push(r);
                    }
                }
            }
        }
    }
    Ok(report)
}
