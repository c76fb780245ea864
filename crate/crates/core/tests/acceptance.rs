//! Acceptance criteria. One PASS/FAIL line each; exits non-zero if any fails.
//!
//! Criteria 1, 3 and 5 are checked against the literal published values, which
//! disagree with the brute-force oracle; their lines say where.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num::{BigInt, BigRational, BigUint, ToPrimitive};
use rayon::prelude::*;

use qfclique::algebra::numtheory::{self, hilbert_symbol_int};
use qfclique::algebra::{Elem, FiniteRing, Place};
use qfclique::charzero::{self, RationalForm, Signature};
use qfclique::cliques::{self, CaseLabel, CharTwoCase, OddCase};
use qfclique::construct;
use qfclique::oracle::{self, OracleOptions};
use qfclique::qform::{FormSpec, QForm, VectorIter};
use qfclique::testform;
use qfclique::verify::{self, Suite};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn gf(p: u64, k: u32) -> FiniteRing {
    FiniteRing::field(p, k).unwrap()
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn big(x: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(x.clone()))
}

fn factorial(n: usize) -> BigRational {
    rat((1..=n as i64).product())
}

fn worked_example() -> Outcome {
    let f5 = gf(5, 1);
    let q = QForm::new(&f5, &FormSpec::Diagonal(vec![1, 1, 2])).unwrap();
    let a = Elem(1);
    let r = cliques::count_max_cliques(&q, a).unwrap();
    let published: Vec<Vec<i64>> = vec![
        vec![0, 0, 0],
        vec![1, 0, 0],
        vec![3, 0, 1],
        vec![3, 3, 2],
        vec![3, 2, 2],
    ];
    let clique = construct::parse_vertices(&f5, &published).unwrap();
    let valid = construct::validate_clique(&q, a, &clique).unwrap().is_valid();
    let o = oracle::oracle(&q, a, OracleOptions::default()).unwrap();
    let rest = r.omega == 5
        && r.case.label == CaseLabel::OddChar(OddCase::E)
        && r.o_order == BigUint::from(240u32)
        && r.iso_order == BigUint::from(30000u32)
        && valid;
    let count_ok = r.omega_max == BigUint::from(1250u32);
    outcome(
        rest && count_ok,
        format!(
            "omega={} case={} |O|={} |iso|={} clique valid={valid}; count={} (oracle {}), published 1250",
            r.omega, r.case.label, r.o_order, r.iso_order, r.omega_max, o.count
        ),
    )
}

fn suite_outcome(suite: Suite, limit: usize) -> Outcome {
    let r = verify::run_suite(suite, OracleOptions::default()).unwrap();
    outcome(
        r.passed() && r.instances <= limit,
        format!(
            "{} instances, {} mismatches, {} with notes",
            r.instances, r.mismatches, r.warnings
        ),
    )
}

/// Printed characteristic-2 table values: `(omega, count)`.
fn printed_char_two(q: &QForm, a: Elem, label: CharTwoCase) -> (u64, BigRational) {
    let n = q.dim();
    let iso = big(&cliques::group_orders(q).unwrap().iso_order);
    let f = q.ring().order() as i64;
    let alpha = || {
        rat(if cliques::complement_is_hyperbolic(q, a).unwrap() {
            2 * f - 2
        } else {
            2 * f + 2
        })
    };
    let n64 = n as u64;
    match label {
        CharTwoCase::A => (n64 - 1, &iso / (alpha() * factorial(n - 1))),
        CharTwoCase::B => (n64, &iso / (alpha() * factorial(n)) + &iso / (rat(2) * factorial(n))),
        CharTwoCase::C => (n64 + 1, &iso / factorial(n + 1)),
        CharTwoCase::D => (n64 + 2, &iso / factorial(n + 2)),
    }
}

fn char_two_tables() -> Outcome {
    let mut n4_b = (0, 0);
    let mut n4_c = (0, 0);
    let mut n2_cd = (0, 0);
    let mut n2_a = (0, 0);
    for k in [1, 2] {
        let ring = gf(2, k);
        for n in [2, 4] {
            for q in verify::block_forms(&ring, n) {
                for a in ring.elements().filter(|e| e.0 != 0) {
                    let report = cliques::clique_number(&q, a).unwrap();
                    let CaseLabel::CharTwo(label) = report.case.label else {
                        unreachable!()
                    };
                    let (omega, count) = printed_char_two(&q, a, label);
                    let o = oracle::oracle(&q, a, OracleOptions::default()).unwrap();
                    let ok = omega == o.omega && count == rat(o.count as i64);
                    let slot = match (n, label) {
                        (4, CharTwoCase::B) => &mut n4_b,
                        (4, _) => &mut n4_c,
                        (_, CharTwoCase::A) => &mut n2_a,
                        _ => &mut n2_cd,
                    };
                    slot.0 += 1;
                    slot.1 += ok as usize;
                    if n == 2 && label == CharTwoCase::A {
                        // the discrepancy must be on record
                        assert!(!report.warnings.is_empty());
                    }
                }
            }
        }
    }
    outcome(
        n4_b.0 == n4_b.1 && n4_c.0 == n4_c.1 && n2_cd.0 == n2_cd.1,
        format!(
            "n=4 case B {}/{}, case C {}/{}; n=2 cases C/D {}/{}; n=2 case A discrepancy recorded on {} (printed matches {})",
            n4_b.1, n4_b.0, n4_c.1, n4_c.0, n2_cd.1, n2_cd.0, n2_a.0, n2_a.1
        ),
    )
}

fn isotropic() -> Outcome {
    let r = verify::run_suite(Suite::Isotropic, OracleOptions::default()).unwrap();
    let powers = verify::suite_instances(Suite::Isotropic)
        .unwrap()
        .par_iter()
        .all(|(q, a)| {
            let o = oracle::oracle(q, *a, OracleOptions::default()).unwrap();
            o.omega == q.ring().order().pow(q.witt_index_ff().unwrap() as u32)
        });
    outcome(
        r.passed() && powers,
        format!(
            "{} instances, {} mismatches, omega = |A|^i on all: {powers}",
            r.instances, r.mismatches
        ),
    )
}

fn residue_tables() -> Outcome {
    let rows: Vec<(String, u64, u64, u64)> = verify::suite_instances(Suite::Residue)
        .unwrap()
        .par_iter()
        .map(|(q, a)| {
            let ring = q.ring();
            let label = cliques::classify_case(&q.reduce_residue_form().unwrap(), ring.residue_map(*a))
                .unwrap()
                .label;
            let table = cliques::table_omega(label, q.dim()).unwrap();
            let formula = cliques::clique_number(q, *a).unwrap().omega;
            let o = oracle::oracle(q, *a, OracleOptions::default()).unwrap();
            assert_eq!(o.vertices, ring.order().pow(q.dim() as u32));
            (format!("{ring} case {label}"), table, formula, o.omega)
        })
        .collect();
    let mut bad: Vec<&str> = rows.iter().filter(|r| r.1 != r.3).map(|r| r.0.as_str()).collect();
    let table_misses = bad.len();
    bad.sort();
    bad.dedup();
    let structural_misses = rows.iter().filter(|r| r.2 != r.3).count();
    outcome(
        table_misses == 0,
        format!(
            "{} instances; table value differs from brute force on {table_misses} ({}); ring-characteristic rule differs on {structural_misses}",
            rows.len(),
            if bad.is_empty() { "none".to_string() } else { bad.join(", ") }
        ),
    )
}

/// Counts matrices `S` with `q(Sx) = q(x)` for every `x` in `F^2`.
fn brute_o_order(q: &QForm) -> u64 {
    let r = q.ring();
    let vecs: Vec<Vec<Elem>> = VectorIter::new(r, 2).collect();
    let (e1, e2) = (vec![r.one(), r.zero()], vec![r.zero(), r.one()]);
    let mut count = 0;
    for c0 in vecs.iter().filter(|c| q.eval(c) == q.eval(&e1)) {
        for c1 in vecs.iter().filter(|c| q.eval(c) == q.eval(&e2)) {
            let ok = vecs.iter().all(|x| {
                let sx: Vec<Elem> = (0..2).map(|i| r.add(r.mul(c0[i], x[0]), r.mul(c1[i], x[1]))).collect();
                q.eval(&sx) == q.eval(x)
            });
            count += ok as u64;
        }
    }
    count
}

fn group_orders() -> Outcome {
    let (mut checked, mut agreed) = (0, 0);
    for ring in [gf(3, 1), gf(5, 1)] {
        for x in VectorIter::new(&ring, 3) {
            let q = QForm::from_upper(&ring, 2, vec![x[0], x[1], ring.zero(), x[2]]).unwrap();
            if !q.is_nondegenerate() {
                continue;
            }
            checked += 1;
            agreed += (cliques::group_orders(&q).unwrap().o_order == BigUint::from(brute_o_order(&q))) as usize;
        }
    }
    let h3 = cliques::group_orders(&QForm::hyperbolic_plane(&gf(3, 1)))
        .unwrap()
        .o_order;
    outcome(
        checked == agreed && h3 == BigUint::from(4u32),
        format!("{agreed}/{checked} binary forms agree with enumeration; |O(H)| over GF(3) = {h3}"),
    )
}

fn test_form_identities() -> Outcome {
    let (mut dets, mut det_ok, mut arfs, mut arf_ok) = (0, 0, 0, 0);
    for ring in [gf(3, 1), gf(5, 1), gf(2, 1), gf(2, 2)] {
        for a in ring.elements().filter(|e| e.0 != 0) {
            for n in 1..=8 {
                let g = testform::gamma_form(&ring, a, n).unwrap();
                let want = ring.mul(ring.from_int(n as i64 + 1), ring.pow(a, n as u64));
                dets += 1;
                det_ok += (g.polar_matrix().determinant(&ring) == want) as usize;
                if ring.p() == 2 && n % 2 == 0 {
                    arfs += 1;
                    let want = ring.trace_gf2(Elem(testform::gamma_arf_element(n)));
                    arf_ok += (g.arf().unwrap() == want) as usize;
                }
            }
        }
    }
    outcome(
        dets == det_ok && arfs == arf_ok,
        format!("determinant {det_ok}/{dets}, Arf {arf_ok}/{arfs}"),
    )
}

fn rational_example() -> Outcome {
    let q = RationalForm::new(&[1, 2, 3, -7]).unwrap();
    let r = charzero::rational_omega(&q, &rat(1)).unwrap();
    outcome(
        r.omega == 3 && r.certificate.place == Place::Prime(3),
        format!(
            "omega={} blocked at d+1={} by place {}",
            r.omega, r.certificate.blocked_at, r.certificate.place
        ),
    )
}

fn sums_of_squares() -> Outcome {
    let mut agree = 0;
    let mut om = Vec::new();
    for n in 1..=20 {
        let r = verify::verify_sos(n).unwrap();
        agree += (r.fastpath == r.local_global) as usize;
        om.push(r.local_global);
    }
    outcome(
        agree == 20 && om[3] == 4 && om[7] == 9,
        format!("fast path agrees {agree}/20; omega(s4)={} omega(s8)={}", om[3], om[7]),
    )
}

fn hilbert_product() -> Outcome {
    let grid = [1i64, -1, 2, -2, 3, -3, 5, -5, 7, -7, 10, -10];
    let mut bad = Vec::new();
    for &a in &grid {
        for &b in &grid {
            let mut places = vec![Place::Infinity, Place::Prime(2)];
            places.extend(
                numtheory::prime_factors((a * b).unsigned_abs())
                    .into_iter()
                    .filter(|&p| p != 2)
                    .map(Place::Prime),
            );
            let prod: i8 = places
                .iter()
                .map(|&v| hilbert_symbol_int(&BigInt::from(a), &BigInt::from(b), v))
                .product();
            if prod != 1 {
                bad.push(format!("({a},{b})"));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{} pairs, violations: {}", grid.len().pow(2), bad.len()),
    )
}

fn real_rule() -> Outcome {
    let (mut checked, mut ok) = (0, 0);
    for plus in 0..=12usize {
        for minus in 0..=12usize {
            if plus + minus == 0 {
                continue;
            }
            let mut entries = vec![1i64; plus];
            entries.extend(std::iter::repeat_n(-2, minus));
            let f = RationalForm::new(&entries).unwrap();
            for a in [1i64, 2, 3, 7, -1, -2, -5, -11] {
                let want = if a > 0 { plus + 1 } else { minus + 1 } as u64;
                let sig = Signature { plus, minus };
                checked += 1;
                ok += (f.signature() == sig
                    && charzero::real_omega(sig, &rat(a)).unwrap() == want
                    && charzero::local_omega(&f, &rat(a), Place::Infinity).unwrap() == want)
                    as usize;
            }
        }
    }
    outcome(checked == ok, format!("{ok}/{checked} (signature, a) pairs"))
}

fn main() -> ExitCode {
    type Check = fn() -> Outcome;
    let criteria: [(&str, Check, Duration); 11] = [
        (
            "GF(5) <1,1,2>, a=1: omega 5, case E, count 1250, |O| 240, |iso| 30000",
            worked_example,
            Duration::from_secs(1),
        ),
        (
            "odd-characteristic sweep against the oracle",
            || suite_outcome(Suite::Odd, 2000),
            Duration::from_secs(300),
        ),
        (
            "characteristic-2 tables against the oracle",
            char_two_tables,
            Duration::from_secs(300),
        ),
        ("a = 0: omega = |A|^i", isotropic, Duration::from_secs(300)),
        (
            "Z/9, Z/25: residue-field table against brute force",
            residue_tables,
            Duration::from_secs(60),
        ),
        (
            "|O(q)| against isometry enumeration, binary forms",
            group_orders,
            Duration::from_secs(300),
        ),
        (
            "test-form determinant and Arf table",
            test_form_identities,
            Duration::from_secs(300),
        ),
        (
            "<1,2,3,-7> over Q: omega 3 blocked at p = 3",
            rational_example,
            Duration::from_secs(300),
        ),
        (
            "sums of squares over Q, n <= 20",
            sums_of_squares,
            Duration::from_secs(10),
        ),
        (
            "Hilbert product formula on the sample grid",
            hilbert_product,
            Duration::from_secs(300),
        ),
        ("real rule on a signature grid", real_rule, Duration::from_secs(300)),
    ];
    let mut failed = Vec::new();
    for (i, (title, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let took = start.elapsed();
        let pass = o.pass && took < *limit;
        let secs = took.as_secs_f64();
        let budget = limit.as_secs_f64().to_u64().unwrap_or(0);
        println!(
            "{} {:>2} {title} :: {} [{secs:.2}s / {budget}s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
        if !pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
