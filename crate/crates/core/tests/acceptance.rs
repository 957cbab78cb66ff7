//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use bdl_core::crossed::{element_v, f_gamma, geodesic_sweep, verify_flip_symmetry, verify_v_identities};
use bdl_core::harness::{depth_two_family, random_periodic_pairs, run_suite, Suite, SuiteConfig};
use bdl_core::julg_valette::{compare_w, equivariance_defect, index_b, index_w, w_local_constancy, RayContext};
use bdl_core::module_calculus::{decay_threshold_check, final_identity_check, untwist_check, vbar_identities, Mutation};
use bdl_core::operator::{lambda_rho_commute_check, mult_right_commutator, op_mult, op_right, Label, Monomial};
use bdl_core::{chi, word, CylinderFunction, FreeGroup, Limits, ReducedWord, Scalar};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const SEED: u64 = 0x5eed;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn group(n: usize) -> FreeGroup {
    FreeGroup::new(n).unwrap()
}

fn words_up_to(g: FreeGroup, r: usize) -> Vec<ReducedWord> {
    g.ball(r, &Limits::default()).unwrap()
}

fn nontrivial_up_to(g: FreeGroup, r: usize) -> Vec<ReducedWord> {
    words_up_to(g, r).into_iter().filter(|w| !w.is_identity()).collect()
}

fn letters(g: FreeGroup) -> Vec<ReducedWord> {
    g.letters().map(ReducedWord::letter).collect()
}

fn dual_element_identities() -> Outcome {
    let start = Instant::now();
    let mut names = 0;
    for n in [2, 3] {
        let cert = verify_v_identities(group(n));
        if let Some(c) = cert.first_failure() {
            return Err(format!("n = {n}: {} fails ({:?})", c.name, c.discrepancy));
        }
        names = cert.checks.len();
    }
    let elapsed = start.elapsed();
    ensure(elapsed.as_secs_f64() < 1.0, || format!("took {elapsed:?}"))?;
    Ok(format!("{names} identities exact for n = 2, 3 in {} ms", elapsed.as_millis()))
}

fn flip_symmetry() -> Outcome {
    for n in [2, 3] {
        let cert = verify_flip_symmetry(group(n));
        if let Some(c) = cert.first_failure() {
            return Err(format!("n = {n}: {} fails ({:?})", c.name, c.discrepancy));
        }
    }
    Ok("bar_sigma(v - chi) = v* - chi for n = 2, 3".into())
}

fn geodesic_characterization() -> Outcome {
    let g = group(2);
    let extra = random_periodic_pairs(g, SEED, 50);
    let (checked, bad) = geodesic_sweep(&element_v(g), &extra).map_err(|e| e.to_string())?;
    ensure(bad.is_empty(), || format!("{} disagreements, first {:?}", bad.len(), bad[0]))?;
    ensure(checked == 264, || format!("expected 264 checks, ran {checked}"))?;
    Ok(format!("{checked} checks, 0 disagreements"))
}

fn commutator_compactness() -> Outcome {
    let g = group(2);
    let r = 6;
    let fs = depth_two_family(g, SEED, 4);
    ensure(fs.iter().all(|f| f.depth() <= 2), || "family exceeds depth 2".into())?;
    let mut checked = 0;
    let mut widest = 0;
    for f in &fs {
        for gamma in words_up_to(g, 2) {
            let cert = mult_right_commutator(f, &gamma, r).map_err(|e| e.to_string())?;
            ensure(cert.pass, || format!("[M({f}), rho({gamma})] reaches radius {:?}", cert.support_radius))?;
            widest = widest.max(cert.support_radius.unwrap_or(0));
            checked += 1;
        }
    }
    let a = word("a");
    let c = op_mult(&chi(g, &a).unwrap(), r)
        .unwrap()
        .commutator(&op_right(g, &a, r).unwrap())
        .unwrap();
    let entries = c.certified_entries();
    let expected = vec![(Label::Vertex(ReducedWord::identity()), Label::Vertex(a), Scalar::from(-1))];
    ensure(entries == expected, || format!("witness entries {entries:?}"))?;
    ensure(c.support_certificate("witness").rank == 1, || "witness rank is not 1".into())?;
    Ok(format!("{checked} commutators within B_(d+|g|-1), widest {widest}; witness rank 1, entry -1 at (e, a)"))
}

fn lambda_rho_commutation() -> Outcome {
    let g = group(2);
    let mut fs = vec![CylinderFunction::one(g)];
    fs.extend(letters(g).iter().map(|l| chi(g, l).unwrap()));
    let monomials: Vec<Monomial> = fs
        .iter()
        .flat_map(|f| words_up_to(g, 1).into_iter().map(move |k| Monomial::new(f.clone(), k)))
        .collect();
    let mut checked = 0;
    for x in &monomials {
        for y in &monomials {
            let cert = lambda_rho_commute_check(x, y, 6).map_err(|e| e.to_string())?;
            ensure(cert.commutator.pass, || format!("[lambda({x}), rho({y})] support {:?}", cert.commutator.support_radius))?;
            ensure(cert.conjugation_symmetric, || format!("conjugation by I fails for {x}, {y}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} monomial pairs, finite support and I-symmetric"))
}

fn julg_valette_index() -> Outcome {
    let g = group(2);
    for r in [3, 4, 5] {
        let report = index_b(g, r).map_err(|e| e.to_string())?;
        ensure(report.index == 1, || format!("index(b) = {} at R = {r}", report.index))?;
    }
    let mut ranks = BTreeSet::new();
    for gamma in nontrivial_up_to(g, 3) {
        let cert = equivariance_defect(g, &gamma, gamma.len() + 2).map_err(|e| e.to_string())?;
        let rank = cert.support.rank;
        ensure(rank <= gamma.len(), || format!("defect rank {rank} for {gamma}"))?;
        ensure(gamma.len() != 1 || rank == 1, || format!("defect rank {rank} for letter {gamma}"))?;
        ranks.insert((gamma.len(), rank));
    }
    ensure(
        ranks == BTreeSet::from([(1, 1), (2, 2), (3, 3)]),
        || format!("defect ranks by length {ranks:?}"),
    )?;
    Ok("index(b) = 1 at R = 3, 4, 5; defect rank equals |gamma| for |gamma| <= 3".into())
}

fn w_field() -> Outcome {
    let g = group(2);
    let rays = g.periodic_points(1, 2);
    for a in &rays {
        let w = compare_w(g, &RayContext::from_point(a, 6), 4).map_err(|e| e.to_string())?;
        ensure(w.first_difference.is_none(), || format!("U_a b != W_a for a = {a} at {:?}", w.first_difference))?;
    }
    for a in g.periodic_points(1, 1) {
        let report = index_w(g, &a, 3).map_err(|e| e.to_string())?;
        ensure(report.index == 1, || format!("index(W_{a}) = {}", report.index))?;
    }
    let xs = words_up_to(g, 3);
    for x in &xs {
        let c = w_local_constancy(g, x, 1).map_err(|e| e.to_string())?;
        ensure(c.pass(), || format!("W_a e_{x} varies on cylinder {:?}", c.violation))?;
    }
    Ok(format!("{} rays agree on B4; index(W_a) = 1; {} vertices locally constant", rays.len(), xs.len()))
}

fn decay_threshold() -> Outcome {
    let g = group(2);
    let fs = depth_two_family(g, SEED, 4);
    let mut worst = 0;
    let mut checked = 0;
    for gamma in letters(g) {
        let big_f = f_gamma(g, &gamma).unwrap();
        for f in &fs {
            let t = decay_threshold_check(&big_f, f, 6).map_err(|e| e.to_string())?;
            ensure(t.pass, || format!("no vanishing beyond a threshold for F_{gamma}, f = {f}"))?;
            ensure(t.threshold <= 4, || format!("threshold {} for F_{gamma}, f = {f}", t.threshold))?;
            worst = worst.max(t.threshold);
            checked += 1;
        }
    }
    Ok(format!("{checked} pairs vanish beyond threshold <= {worst}"))
}

fn untwisting() -> Outcome {
    let g = group(2);
    let report = untwist_check(g, 4, 2).map_err(|e| e.to_string())?;
    ensure(report.unitary, || "U is not unitary on the spanning set".into())?;
    ensure(report.right_linear, || "U is not right linear".into())?;
    for r in &report.iota {
        ensure(r.pass, || format!("iota comparison fails for b = {}, f = {}", r.b, r.f))?;
        let reach = r.threshold.threshold + 1;
        ensure(
            r.comparison.failing_labels.iter().all(|x| x.len() <= reach),
            || format!("discrepancy beyond threshold for b = {}, f = {}", r.b, r.f),
        )?;
    }
    ensure(report.pass, || "untwist report fails".into())?;
    Ok(format!("U unitary; {} iota comparisons confined to their thresholds", report.iota.len()))
}

fn final_identity() -> Outcome {
    let mut lines = Vec::new();
    for (n, expected) in [(2, 2737), (3, 34669)] {
        let start = Instant::now();
        let cert = final_identity_check(group(n), 4, 2, &Mutation::None).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        ensure(cert.pass, || format!("n = {n}: {:?}", cert.discrepancy))?;
        ensure(cert.checked == expected, || format!("n = {n}: {} vectors, expected {expected}", cert.checked))?;
        ensure(n != 2 || elapsed.as_secs_f64() < 30.0, || format!("n = 2 took {elapsed:?}"))?;
        lines.push(format!("n = {n}: {} vectors in {} ms", cert.checked, elapsed.as_millis()));
    }
    let vbar = vbar_identities(group(2), 4, 2).map_err(|e| e.to_string())?;
    ensure(vbar.pass, || "Vbar identities fail".into())?;
    Ok(format!("Fbar = Wbar; {}", lines.join(", ")))
}

fn mutation_sensitivity() -> Outcome {
    let g = group(2);
    let mut killed = 0;
    for gamma in letters(g) {
        for m in [Mutation::DropVbarTerm(gamma.clone()), Mutation::PerturbV(gamma.clone())] {
            let cert = final_identity_check(g, 4, 2, &m).map_err(|e| e.to_string())?;
            let d = cert.discrepancy.ok_or_else(|| format!("{m} went unnoticed"))?;
            ensure(d.g == gamma, || format!("{m}: first discrepancy at g = {}, expected {gamma}", d.g))?;
            if let Mutation::PerturbV(_) = m {
                let config = SuiteConfig {
                    mutation: m.clone(),
                    ..SuiteConfig::default()
                };
                let report = run_suite(&config, Suite::Algebra).map_err(|e| e.to_string())?;
                ensure(!report.pass, || format!("{m} passes the algebra suite"))?;
            }
            killed += 1;
        }
    }
    Ok(format!("{killed} mutations detected, each first at g = gamma"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("v*v = vv* = chi and unitarity of w + 1", dual_element_identities),
        ("flip symmetry of v - chi", flip_symmetry),
        ("geodesic characterization of v", geodesic_characterization),
        ("commutators with rho have finite support", commutator_compactness),
        ("lambda and rho commute modulo finite rank", lambda_rho_commutation),
        ("Julg-Valette index and equivariance defect", julg_valette_index),
        ("boundary-twisted W_a", w_field),
        ("decay threshold of the difference function", decay_threshold),
        ("untwisting unitary and iota", untwisting),
        ("Fbar = Wbar on the spanning set", final_identity),
        ("mutation sensitivity", mutation_sensitivity),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
