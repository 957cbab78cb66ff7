//! Suite runner: selected checks run concurrently, and the report is merged in check-id order so
//! the same configuration always renders to the same bytes.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::boundary::{chi, CylinderFunction};
use crate::crossed::{element_chi, f_gamma, geodesic_sweep, verify_flip_symmetry_for, verify_v_identities_for};
use crate::error::{Error, Result};
use crate::free_group::{BoundaryPoint, FreeGroup, ReducedWord};
use crate::julg_valette::{
    compare_w, equivariance_defect, index_b, index_w, w_equivariance_defect, w_local_constancy, RayContext,
};
use crate::limits::Limits;
use crate::module_calculus::{
    commutation_check, final_identity_check, decay_threshold_check, mutated_v, untwist_check, vbar_identities, Mutation,
};
use crate::operator::{lambda_rho_commute_check, mult_right_commutator, op_mult, op_right, Label, Monomial};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteConfig {
    pub rank: usize,
    /// Radius for the module checks and the `W` comparison.
    pub radius: usize,
    /// Cylinder depth of the test vectors `χ_u ⊗ e_g`.
    pub depth: usize,
    /// Radius for the truncated-operator and threshold sweeps.
    pub operator_radius: usize,
    /// Floating-point evaluation; always rejected, every check here is exact.
    pub float_mode: bool,
    pub seed: u64,
    /// Number of random eventually periodic pairs added to the geodesic sweep.
    pub random_pairs: usize,
    pub mutation: Mutation,
    /// Record wall time per check; off by default because it breaks byte-identical reports.
    pub timings: bool,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            rank: 2,
            radius: 4,
            depth: 2,
            operator_radius: 6,
            float_mode: false,
            seed: 0x5eed,
            random_pairs: 50,
            mutation: Mutation::None,
            timings: false,
            output: None,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<FreeGroup> {
        if self.float_mode {
            return Err(Error::domain("float mode is not allowed: suites are exact"));
        }
        let group = FreeGroup::new(self.rank)?;
        let limits = Limits::from_env();
        limits.check_radius(self.rank, self.radius.max(self.operator_radius) + 1)?;
        limits.check_depth(self.depth)?;
        if self.radius < 2 {
            return Err(Error::domain("suite radius must be at least 2"));
        }
        Ok(group)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Algebra,
    Operators,
    Jv,
    Untwist,
    All,
}

impl Suite {
    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "algebra" => Suite::Algebra,
            "operators" => Suite::Operators,
            "jv" => Suite::Jv,
            "untwist" => Suite::Untwist,
            "all" => Suite::All,
            _ => return Err(Error::Parse(format!("unknown suite {s:?}"))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Algebra => "algebra",
            Suite::Operators => "operators",
            Suite::Jv => "jv",
            Suite::Untwist => "untwist",
            Suite::All => "all",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub id: String,
    /// The mathematical statement the check certifies.
    pub anchor: String,
    pub parameters: Value,
    pub pass: bool,
    pub payload: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u128>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub config: SuiteConfig,
    pub pass: bool,
    pub checks: Vec<CheckRecord>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is plain data")
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status} {:<30} {}\n", c.id, c.anchor));
            if !c.pass {
                if let Some(d) = first_discrepancy(&c.payload) {
                    out.push_str(&format!("     first discrepancy: {d}\n"));
                }
            }
        }
        let failed = self.failures().count();
        out.push_str(&format!(
            "{} of {} checks passed (suite {}, rank {}, R = {}, d = {}, mutation {})\n",
            self.checks.len() - failed,
            self.checks.len(),
            self.suite,
            self.config.rank,
            self.config.radius,
            self.config.depth,
            self.config.mutation
        ));
        out
    }
}

/// The earliest `discrepancy`, `first`, `first_failure` or `error` field in a payload.
fn first_discrepancy(v: &Value) -> Option<String> {
    match v {
        Value::Object(map) => {
            for key in ["error", "discrepancy", "first", "first_failure", "first_difference", "violation"] {
                if let Some(x) = map.get(key).filter(|x| !x.is_null()) {
                    return Some(x.to_string());
                }
            }
            map.values().find_map(first_discrepancy)
        }
        Value::Array(items) => items.iter().find_map(first_discrepancy),
        _ => None,
    }
}

struct Outcome {
    parameters: Value,
    pass: bool,
    payload: Value,
}

type CheckFn = fn(FreeGroup, &SuiteConfig) -> Result<Outcome>;

struct CheckSpec {
    id: &'static str,
    suite: Suite,
    anchor: &'static str,
    run: CheckFn,
}

const CHECKS: &[CheckSpec] = &[
    CheckSpec { id: "algebra.geodesic_sweep", suite: Suite::Algebra, anchor: "v(a,b,gamma) = 1 iff the geodesic from a to b steps from gamma to e", run: check_geodesic },
    CheckSpec { id: "algebra.flip_symmetry", suite: Suite::Algebra, anchor: "bar_sigma(v - chi) = v* - chi", run: check_flip_symmetry },
    CheckSpec { id: "algebra.v_identities", suite: Suite::Algebra, anchor: "v*v = vv* = chi and w + 1 is unitary", run: check_v_identities },
    CheckSpec { id: "jv.defect", suite: Suite::Jv, anchor: "gamma b gamma^-1 - b has rank at most |gamma|", run: check_defect },
    CheckSpec { id: "jv.index_b", suite: Suite::Jv, anchor: "b is Fredholm of index 1", run: check_index_b },
    CheckSpec { id: "jv.index_w", suite: Suite::Jv, anchor: "W_a is Fredholm of index 1", run: check_index_w },
    CheckSpec { id: "jv.local_constancy", suite: Suite::Jv, anchor: "a -> W_a e_x is locally constant at depth |x|", run: check_local_constancy },
    CheckSpec { id: "jv.w_closed_form", suite: Suite::Jv, anchor: "U_a b equals the closed form of W_a", run: check_w_closed_form },
    CheckSpec { id: "jv.w_equivariance", suite: Suite::Jv, anchor: "gamma W gamma^-1 - W is supported near [e, gamma]", run: check_w_equivariance },
    CheckSpec { id: "operators.lambda_rho", suite: Suite::Operators, anchor: "lambda and rho commute modulo finite rank; I lambda rho I = rho lambda", run: check_lambda_rho },
    CheckSpec { id: "operators.mult_right", suite: Suite::Operators, anchor: "[M(f~), rho(gamma)] is supported in B(d + |gamma| - 1)", run: check_mult_right },
    CheckSpec { id: "operators.witness", suite: Suite::Operators, anchor: "[M(chi_a~), rho(a)] is rank one with entry -1 at (e, a)", run: check_witness },
    CheckSpec { id: "untwist.commutation", suite: Suite::Untwist, anchor: "phi and tau commute up to finitely many labels", run: check_commutation },
    CheckSpec { id: "untwist.final_identity", suite: Suite::Untwist, anchor: "F = W, hence Fbar = Wbar", run: check_final_identity },
    CheckSpec { id: "untwist.decay_threshold", suite: Suite::Untwist, anchor: "F'(., x)(f~(x) - f) vanishes for |x| beyond a finite threshold", run: check_decay_threshold },
    CheckSpec { id: "untwist.unitary_iota", suite: Suite::Untwist, anchor: "U is unitary and iota agrees with tau(b) phi(f) up to the threshold", run: check_untwist },
    CheckSpec { id: "untwist.vbar", suite: Suite::Untwist, anchor: "Vbar Vbar* = Pbar, Vbar* Vbar = Pbar off e", run: check_vbar },
];

/// Runs the selected suite; writes the JSON report to `config.output` when set.
pub fn run_suite(config: &SuiteConfig, suite: Suite) -> Result<Report> {
    let group = config.validate()?;
    let mut checks: Vec<CheckRecord> = CHECKS
        .par_iter()
        .filter(|c| suite.includes(c.suite))
        .map(|c| {
            let start = Instant::now();
            let outcome = (c.run)(group, config).unwrap_or_else(|e| Outcome {
                parameters: Value::Null,
                pass: false,
                payload: json!({ "error": e.to_string() }),
            });
            CheckRecord {
                id: c.id.to_string(),
                anchor: c.anchor.to_string(),
                parameters: outcome.parameters,
                pass: outcome.pass,
                payload: outcome.payload,
                wall_ms: config.timings.then(|| start.elapsed().as_millis()),
            }
        })
        .collect();
    checks.sort_by(|a, b| a.id.cmp(&b.id));
    let report = Report {
        suite,
        config: config.clone(),
        pass: checks.iter().all(|c| c.pass),
        checks,
    };
    if let Some(path) = &config.output {
        std::fs::write(path, report.to_json() + "\n")
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(report)
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("certificates are plain data")
}

/// `v` as altered by a perturbation; dropping a `V̄` term leaves `v` itself alone.
fn suite_v(group: FreeGroup, config: &SuiteConfig) -> Result<crate::crossed::PairElement> {
    match &config.mutation {
        m @ Mutation::PerturbV(_) => mutated_v(group, m),
        _ => Ok(crate::crossed::element_v(group)),
    }
}

/// Distinct eventually periodic boundary points with heads and periods of length at most 3.
pub fn random_periodic_pairs(group: FreeGroup, seed: u64, count: usize) -> Vec<(BoundaryPoint, BoundaryPoint)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_word = |rng: &mut ChaCha8Rng, len: usize| {
        let mut w = ReducedWord::identity();
        while w.len() < len {
            let choices: Vec<_> = group.continuations(w.last()).collect();
            w = w.extended(choices[rng.random_range(0..choices.len())]);
        }
        w
    };
    let point = |rng: &mut ChaCha8Rng| loop {
        let head_len = rng.random_range(0..=3);
        let period_len = rng.random_range(1..=3);
        let head = random_word(rng, head_len);
        let period = random_word(rng, period_len);
        if let Ok(p) = BoundaryPoint::new(&head, &period) {
            return p;
        }
    };
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a = point(&mut rng);
        let b = point(&mut rng);
        if a != b {
            out.push((a, b));
        }
    }
    out
}

/// Boundary functions of depth at most 2: constants, indicators, complements and seeded random
/// integer combinations of depth-2 indicators. Extension is not linear, so the span alone does
/// not suffice.
pub fn depth_two_family(group: FreeGroup, seed: u64, random: usize) -> Vec<CylinderFunction> {
    let one = CylinderFunction::one(group);
    let mut out = vec![one.clone(), CylinderFunction::zero(group)];
    let mut deep = Vec::new();
    for len in 1..=2 {
        for u in group.sphere(len) {
            let c = chi(group, &u).expect("nonempty word");
            out.push(one.sub(&c));
            out.push(c.clone());
            if len == 2 {
                deep.push(c);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random {
        let f = deep.iter().fold(CylinderFunction::zero(group), |acc, c| {
            acc.add(&c.scale(&Scalar::from(rng.random_range(-2i64..=2))))
        });
        out.push(f);
    }
    out
}

fn words_up_to(group: FreeGroup, radius: usize) -> Vec<ReducedWord> {
    (0..=radius).flat_map(|k| group.sphere(k)).collect()
}

fn check_v_identities(group: FreeGroup, config: &SuiteConfig) -> Result<Outcome> {
    let cert = verify_v_identities_for(&suite_v(group, config)?, &element_chi(group));
    Ok(Outcome {
        parameters: json!({ "rank": group.rank() }),
        pass: cert.pass(),
        payload: json!({ "checks": to_value(&cert.checks), "first_failure": to_value(&cert.first_failure()) }),
    })
}

fn check_flip_symmetry(group: FreeGroup, config: &SuiteConfig) -> Result<Outcome> {
    let cert = verify_flip_symmetry_for(&suite_v(group, config)?, &element_chi(group));
    Ok(Outcome {
        parameters: json!({ "rank": group.rank() }),
        pass: cert.pass(),
        payload: json!({ "checks": to_value(&cert.checks), "first_failure": to_value(&cert.first_failure()) }),
    })
}

fn check_geodesic(group: FreeGroup, config: &SuiteConfig) -> Result<Outcome> {
    let extra = random_periodic_pairs(group, config.seed, config.random_pairs);
    let (checked, bad) = geodesic_sweep(&suite_v(group, config)?, &extra)?;
    Ok(Outcome {
        parameters: json!({ "rank": group.rank(), "random_pairs": config.random_pairs, "seed": config.seed }),
        pass: bad.is_empty(),
        payload: json!({ "checked": checked, "disagreements": bad.len(), "first": to_value(&bad.first()) }),
    })
}

fn check_mult_right(group: FreeGroup, config: &SuiteConfig) -> Result<Outcome> {
    let r = config.operator_radius;
    let fs = depth_two_family(group, config.seed, 4);
    let gammas = words_up_to(group, 2);
    let jobs: Vec<(&CylinderFunction, &ReducedWord)> =
        fs.iter().flat_map(|f| gammas.iter().map(move |g| (f, g))).collect();
    let certs = jobs
        .par_iter()
        .map(|(f, g)| mult_right_commutator(f, g, r))
        .collect::<Result<Vec<_>>>()?;
    let failed: Vec<_> = certs.iter().filter(|c| !c.pass).collect();
    Ok(Outcome {
        parameters: json!({ "radius": r, "functions": fs.len(), "gammas": gammas.len() }),
        pass: failed.is_empty(),
        payload: json!({
            "checked": certs.len(),
            "max_support_radius": certs.iter().filter_map(|c| c.support_radius).max(),
            "first_failure": to_value(&failed.first()),
        }),
    })
}

fn check_witness(group: FreeGroup, config: &SuiteConfig) -> Result<Outcome> {
    let r = config.operator_radius;
    let a = ReducedWord::letter(group.letters().next().expect("rank ≥ 2"));
    let chi_a = chi(group, &a)?;
    let c = op_mult(&chi_a, r)?.commutator(&op_right(group, &a, r)?)?;
    let entries = c.certified_entries();
    let cert = c.support_certificate(format!("[M({chi_a}), rho({a})]"));
    let expected = vec![(Label::Vertex(ReducedWord::identity()), Label::Vertex(a.clone()), Scalar::from(-1))];
    let listed: Vec<String> = entries.iter().map(|(y, x, s)| format!("({y}, {x}) = {s}")).collect();
    Ok(Outcome {
        parameters: json!({ "radius": r }),
        pass: cert.rank == 1 && entries == expected,
        payload: json!({ "rank": cert.rank, "entries": listed }),
    })
}

fn check_lambda_rho(group: FreeGroup, config: &SuiteConfig) -> Result<Outcome> {
    let r = config.operator_radius;
    let mut fs = vec![CylinderFunction::one(group)];
    for l in group.letters() {
        fs.push(chi(group, &ReducedWord::letter(l))?);
    }
    let monomials: Vec<Monomial> = fs
        .iter()
        .flat_map(|f| words_up_to(group, 1).into_iter().map(move |g| Monomial::new(f.clone(), g)))
        .collect();
    let pairs: Vec<(&Monomial, &Monomial)> =
        monomials.iter().flat_map(|x| monomials.iter().map(move |y| (x, y))).collect();
    let certs = pairs
        .par_iter()
        .map(|(x, y)| lambda_rho_commute_check(x, y, r))
        .collect::<Result<Vec<_>>>()?;
    let failed: Vec<_> = certs.iter().filter(|c| !c.pass()).collect();
    Ok(Outcome {
        parameters: json!({ "radius": r, "monomials": monomials.len() }),
        pass: failed.is_empty(),
        payload: json!({
            "checked": certs.len(),
            "max_support_radius": certs.iter().filter_map(|c| c.commutator.support_radius).max(),
            "first_failure": to_value(&failed.first()),
        }),
    })
}

fn check_index_b(group: FreeGroup, _config: &SuiteConfig) -> Result<Outcome> {
    let reports = [3, 4, 5].into_iter().map(|r| index_b(group, r)).collect::<Result<Vec<_>>>()?;
    Ok(Outcome {
        parameters: json!({ "radii": [3, 4, 5] }),
        pass: reports.iter().all(|r| r.index == 1),
        payload: to_value(&reports),
    })
}

fn check_defect(group: FreeGroup, _config: &SuiteConfig) -> Result<Outcome> {
    let gammas: Vec<ReducedWord> = words_up_to(group, 3).into_iter().filter(|g| !g.is_identity()).collect();
    let certs = gammas
        .par_iter()
        .map(|g| equivariance_defect(group, g, g.len() + 2))
        .collect::<Result<Vec<_>>>()?;
    let ok = |c: &crate::julg_valette::DefectCertificate| c.pass && (c.gamma.len() != 1 || c.support.rank == 1);
    let failed: Vec<_> = certs.iter().filter(|c| !ok(c)).collect();
    let ranks: Vec<(String, usize)> = certs.iter().map(|c| (c.gamma.to_string(), c.support.rank)).collect();
    Ok(Outcome {
        parameters: json!({ "max_gamma": 3 }),
        pass: failed.is_empty(),
        payload: json!({ "ranks": ranks, "first_failure": to_value(&failed.first()) }),
    })
}

fn check_w_closed_form(group: FreeGroup, config: &SuiteConfig) -> Result<Outcome> {
    let r = config.radius;
    let rays = group.periodic_points(1, 2);
    let results = rays
        .par_iter()
        .map(|a| compare_w(group, &RayContext::from_point(a, r + 2), r))
        .collect::<Result<Vec<_>>>()?;
    let failed: Vec<_> = results.iter().filter(|w| w.first_difference.is_some()).collect();
    Ok(Outcome {
        parameters: json!({ "radius": r, "rays": rays.len() }),
        pass: failed.is_empty(),
        payload: json!({ "checked": results.len(), "first_failure": to_value(&failed.first()) }),
    })
}

fn check_index_w(group: FreeGroup, _config: &SuiteConfig) -> Result<Outcome> {
    let rays = group.periodic_points(1, 1);
    let reports = rays
        .par_iter()
        .map(|a| index_w(group, a, 3).map(|r| (a.to_string(), r)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Outcome {
        parameters: json!({ "radius": 3, "rays": rays.len() }),
        pass: reports.iter().all(|(_, r)| r.index == 1),
        payload: to_value(&reports),
    })
}

fn check_local_constancy(group: FreeGroup, _config: &SuiteConfig) -> Result<Outcome> {
    let xs = words_up_to(group, 3);
    let results = xs
        .par_iter()
        .map(|x| w_local_constancy(group, x, 1))
        .collect::<Result<Vec<_>>>()?;
    let failed: Vec<_> = results.iter().filter(|c| !c.pass()).collect();
    Ok(Outcome {
        parameters: json!({ "max_x": 3, "extra": 1 }),
        pass: failed.is_empty(),
        payload: json!({ "checked": results.len(), "first_failure": to_value(&failed.first()) }),
    })
}

fn check_w_equivariance(group: FreeGroup, _config: &SuiteConfig) -> Result<Outcome> {
    let r = 3;
    let rays = group.periodic_points(0, 1);
    let gammas: Vec<ReducedWord> = words_up_to(group, 2).into_iter().filter(|g| !g.is_identity()).collect();
    let jobs: Vec<(&BoundaryPoint, &ReducedWord)> =
        rays.iter().flat_map(|a| gammas.iter().map(move |g| (a, g))).collect();
    let certs = jobs
        .par_iter()
        .map(|(a, g)| w_equivariance_defect(group, &RayContext::from_point(a, r + 2 * g.len() + 1), g, r))
        .collect::<Result<Vec<_>>>()?;
    let failed: Vec<_> = certs.iter().filter(|c| !c.pass).collect();
    Ok(Outcome {
        parameters: json!({ "radius": r, "rays": rays.len(), "max_gamma": 2 }),
        pass: failed.is_empty(),
        payload: json!({ "checked": certs.len(), "first_failure": to_value(&failed.first()) }),
    })
}

fn check_decay_threshold(group: FreeGroup, config: &SuiteConfig) -> Result<Outcome> {
    let r = config.operator_radius;
    let fs = depth_two_family(group, config.seed, 4);
    let letters: Vec<ReducedWord> = group.letters().map(ReducedWord::letter).collect();
    let jobs: Vec<(&ReducedWord, &CylinderFunction)> =
        letters.iter().flat_map(|g| fs.iter().map(move |f| (g, f))).collect();
    let reports = jobs
        .par_iter()
        .map(|(g, f)| decay_threshold_check(&f_gamma(group, g)?, f, r))
        .collect::<Result<Vec<_>>>()?;
    let max_threshold = reports.iter().map(|t| t.threshold).max().unwrap_or(0);
    let first_failure = reports
        .iter()
        .zip(&jobs)
        .find(|(t, _)| !t.pass || t.threshold > 4)
        .map(|(t, (g, f))| json!({ "gamma": g, "f": f.to_string(), "report": to_value(t) }));
    Ok(Outcome {
        parameters: json!({ "radius": r, "functions": fs.len(), "max_threshold_allowed": 4 }),
        pass: first_failure.is_none(),
        payload: json!({ "checked": reports.len(), "max_threshold": max_threshold, "first_failure": first_failure }),
    })
}

fn check_untwist(group: FreeGroup, config: &SuiteConfig) -> Result<Outcome> {
    let report = untwist_check(group, config.radius, config.depth)?;
    let iota_failed = report.iota.iter().find(|r| !r.pass);
    Ok(Outcome {
        parameters: json!({ "radius": config.radius, "depth": config.depth }),
        pass: report.pass,
        payload: json!({
            "unitary": report.unitary,
            "right_linear": report.right_linear,
            "left_regular_exact": report.left_regular.iter().all(|(_, c)| c.exact()),
            "right_regular_support": report.right_regular.iter().map(|(g, c)| (g.to_string(), c.support_radius())).collect::<Vec<_>>(),
            "iota_checked": report.iota.len(),
            "iota_max_threshold": report.iota.iter().map(|r| r.threshold.threshold).max(),
            "first_failure": iota_failed.map(|r| json!({ "b": r.b, "f": r.f, "first": to_value(&r.comparison.first) })),
        }),
    })
}

fn check_vbar(group: FreeGroup, config: &SuiteConfig) -> Result<Outcome> {
    let r = vbar_identities(group, config.radius, config.depth)?;
    Ok(Outcome {
        parameters: json!({ "radius": config.radius, "depth": config.depth }),
        pass: r.pass,
        payload: json!({
            "closed_form": r.closed_form.first,
            "pbar_closed_form": r.pbar_closed_form.first,
            "vbar_vbar_star": r.vbar_vbar_star.first,
            "vbar_star_vbar_labels": r.vbar_star_vbar.failing_labels,
        }),
    })
}

fn check_commutation(group: FreeGroup, config: &SuiteConfig) -> Result<Outcome> {
    let r = commutation_check(group, config.radius, config.depth)?;
    let summarize = |v: &[(String, crate::module_calculus::Comparison)]| -> Vec<Value> {
        v.iter()
            .map(|(name, c)| json!({ "name": name, "support_radius": c.support_radius() }))
            .collect()
    };
    Ok(Outcome {
        parameters: json!({ "radius": config.radius, "depth": config.depth }),
        pass: r.pass,
        payload: json!({
            "exact": summarize(&r.exact),
            "finite": summarize(&r.finite),
            "first_failure": r.exact.iter().find(|(_, c)| !c.exact()).map(|(n, c)| json!({ "name": n, "first": c.first })),
        }),
    })
}

fn check_final_identity(group: FreeGroup, config: &SuiteConfig) -> Result<Outcome> {
    let cert = final_identity_check(group, config.radius, config.depth, &config.mutation)?;
    Ok(Outcome {
        parameters: json!({ "radius": config.radius, "depth": config.depth, "mutation": config.mutation.to_string() }),
        pass: cert.pass,
        payload: to_value(&cert),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let float = SuiteConfig { float_mode: true, ..SuiteConfig::default() };
        assert!(float.validate().is_err());
        let rank1 = SuiteConfig { rank: 1, ..SuiteConfig::default() };
        assert!(rank1.validate().is_err());
        let huge = SuiteConfig { radius: 40, ..SuiteConfig::default() };
        assert!(matches!(huge.validate(), Err(Error::Resource { .. })));
        let deep = SuiteConfig { depth: 20, ..SuiteConfig::default() };
        assert!(matches!(deep.validate(), Err(Error::Resource { .. })));
    }

    #[test]
    fn random_pairs_are_seeded_and_distinct() {
        let g = FreeGroup::new(2).unwrap();
        let p = random_periodic_pairs(g, 7, 20);
        assert_eq!(p, random_periodic_pairs(g, 7, 20));
        assert!(p.iter().all(|(a, b)| a != b));
    }

    #[test]
    fn suite_names() {
        for s in ["algebra", "operators", "jv", "untwist", "all"] {
            assert_eq!(s.parse::<Suite>().unwrap().to_string(), s);
        }
        assert!("everything".parse::<Suite>().is_err());
        let ids: std::collections::BTreeSet<_> = CHECKS.iter().map(|c| c.id).collect();
        assert_eq!(ids.len(), CHECKS.len());
    }

    #[test]
    fn algebra_suite_is_deterministic() {
        let config = SuiteConfig::default();
        let a = run_suite(&config, Suite::Algebra).unwrap();
        let b = run_suite(&config, Suite::Algebra).unwrap();
        assert!(a.pass, "{}", a.summary());
        assert_eq!(a.to_json(), b.to_json());
    }
}
