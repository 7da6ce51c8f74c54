//! Seeded verification suites. Trials run concurrently; records are
//! assembled in (suite, trial) order so reports are reproducible.

use std::time::Instant;

use cfree_core::fock::{cumulant_series, evolution_operator_check, state_moments, tensor_eta_model};
use cfree_core::meixner::{
    meixner_functional, meixner_pde_check, moments_from_jacobi, psd_check, psd_check_with, two_state_pde_check,
    MeixnerParams, DEFAULT_PSD_EPS,
};
use cfree_core::random::{random_cumulant_data, random_functional, random_jacobi, random_rational, random_state_data, seeded, TestRng};
use cfree_core::transforms::{b_map, bercovici_pata, evolution_check, monotone_convolve, phi_map};
use cfree_core::{q, Functional, NcSeries, Rational, Scalar, Word};
use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::document::format_rational;
use crate::report::{CheckRecord, ReportDocument, Verdict, Witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Semigroup,
    Evolution,
    Meixner,
    Fock,
    Positivity,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Semigroup => "semigroup",
            Suite::Evolution => "evolution",
            Suite::Meixner => "meixner",
            Suite::Fock => "fock",
            Suite::Positivity => "positivity",
            Suite::All => "all",
        }
    }

    fn salt(self) -> u64 {
        match self {
            Suite::Semigroup => 1,
            Suite::Evolution => 2,
            Suite::Meixner => 3,
            Suite::Fock => 4,
            Suite::Positivity => 5,
            Suite::All => 0,
        }
    }

    const CONCRETE: [Suite; 5] = [Suite::Semigroup, Suite::Evolution, Suite::Meixner, Suite::Fock, Suite::Positivity];
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub suite: Suite,
    pub seed: u64,
    pub order: usize,
    pub d: usize,
    pub trials: usize,
    pub tolerance: f64,
    /// Exact rational arithmetic for the operator suite.
    pub exact: bool,
}

impl VerifyConfig {
    fn as_map(&self) -> Map<String, Value> {
        let v = json!({
            "seed": self.seed,
            "N": self.order,
            "d": self.d,
            "trials": self.trials,
            "tolerance": self.tolerance,
            "mode": if self.exact { "exact" } else { "float" },
        });
        v.as_object().cloned().unwrap_or_default()
    }

    fn trial_seed(&self, suite: Suite, trial: usize) -> u64 {
        self.seed.wrapping_add(suite.salt() * 1_000_000).wrapping_add(trial as u64)
    }
}

/// Bookkeeping shared by every record of one trial.
struct Trial<'a> {
    suite: Suite,
    index: usize,
    seed: u64,
    cfg: &'a VerifyConfig,
}

impl Trial<'_> {
    fn record(&self, id: &str, identity: &str, parameters: Value, start: Instant) -> CheckRecord {
        CheckRecord {
            suite: self.suite.name().into(),
            trial: self.index,
            id: id.into(),
            identity: identity.into(),
            parameters: parameters.as_object().cloned().unwrap_or_default(),
            verdict: Verdict::Pass,
            witness: None,
            residual: None,
            seed: self.seed,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        }
    }

    /// Exact comparison of two series.
    fn exact(
        &self,
        id: &str,
        identity: &str,
        parameters: Value,
        start: Instant,
        sides: cfree_core::Result<(NcSeries<Rational>, NcSeries<Rational>)>,
    ) -> CheckRecord {
        let mut r = self.record(id, identity, parameters, start);
        match sides {
            Ok((lhs, rhs)) => {
                if let Some((w, x, y)) = lhs.first_difference(&rhs) {
                    r.verdict = Verdict::Fail;
                    r.witness = Some(witness(&w, Some(format!("{} vs {}", format_rational(&x), format_rational(&y)))));
                }
            }
            Err(e) => fail_with(&mut r, e),
        }
        r
    }

    /// Float residual against the configured tolerance.
    fn residual(&self, id: &str, identity: &str, parameters: Value, start: Instant, residual: cfree_core::Result<f64>) -> CheckRecord {
        let mut r = self.record(id, identity, parameters, start);
        match residual {
            Ok(x) => {
                r.residual = Some(x);
                let ok = if self.cfg.exact && self.suite == Suite::Fock { x == 0.0 } else { x < self.cfg.tolerance };
                if !ok {
                    r.verdict = Verdict::Fail;
                    r.witness = Some(Witness { word: vec![], degree: 0, message: Some(format!("residual {x:e}")) });
                }
            }
            Err(e) => fail_with(&mut r, e),
        }
        r
    }
}

fn witness(w: &Word, message: Option<String>) -> Witness {
    Witness { word: w.letters().to_vec(), degree: w.degree(), message }
}

fn fail_with(r: &mut CheckRecord, e: cfree_core::Error) {
    r.verdict = Verdict::Fail;
    r.witness = Some(Witness { word: vec![], degree: 0, message: Some(format!("error: {e}")) });
}

fn rats(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(format_rational(x))).collect())
}

fn rat(x: &Rational) -> Value {
    Value::String(format_rational(x))
}

/// A time with `1 + t != 0`, negative values included.
fn random_time(rng: &mut TestRng) -> Rational {
    loop {
        let t = q(rng.gen_range(-6..=6), rng.gen_range(1..=3));
        if !(q(1, 1) + &t).is_zero() {
            return t;
        }
    }
}

fn random_vec(rng: &mut TestRng, d: usize) -> Vec<Rational> {
    (0..d).map(|_| random_rational(rng)).collect()
}

fn semigroup(t: &Trial) -> Vec<CheckRecord> {
    let start = Instant::now();
    let mut rng = seeded(t.seed);
    let (d, n) = (t.cfg.d, t.cfg.order);
    let rho = random_functional(&mut rng, d, n);
    let (a, b) = (random_vec(&mut rng, d), random_vec(&mut rng, d));
    let (tt, s) = loop {
        let (x, y) = (random_time(&mut rng), random_time(&mut rng));
        if !(q(1, 1) + &x + &y).is_zero() {
            break (x, y);
        }
    };
    let ab: Vec<Rational> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
    let sides = (|| {
        let lhs = b_map(&b_map(&rho, &b, &s)?, &a, &tt)?;
        let rhs = b_map(&rho, &ab, &(tt.clone() + &s))?;
        Ok((lhs.into_moments(), rhs.into_moments()))
    })();
    let params = json!({"a": rats(&a), "b": rats(&b), "t": rat(&tt), "s": rat(&s), "d": d, "N": n});
    vec![t.exact("semigroup", "B_{a,t}[B_{b,s}[rho]] = B_{a+b,t+s}[rho]", params, start, sides)]
}

fn evolution(t: &Trial) -> Vec<CheckRecord> {
    let start = Instant::now();
    let mut rng = seeded(t.seed);
    let (d, n) = (t.cfg.d, t.cfg.order);
    let rho = bercovici_pata(&random_functional(&mut rng, d, n));
    let psi = random_functional(&mut rng, d, n);
    let a = random_vec(&mut rng, d);
    let time = random_time(&mut rng);
    let params = json!({"a": rats(&a), "t": rat(&time), "d": d, "N": n, "rho": "B[sigma], sigma random"});
    let parts = [
        ("evolution-a", "Phi[rho^{⊞t} ⊞ delta_a, psi] = Phi[rho, psi]^{⊎t} ⊎ delta_a"),
        ("evolution-b", "Phi[rho, psi ⊞ rho^{⊞t} ⊞ delta_a] = B_{a,t}[Phi[rho, psi]]"),
    ];
    match evolution_check(&rho, &psi, &a, &time) {
        Ok(report) => parts
            .iter()
            .zip([&report.part_a, &report.part_b])
            .map(|((id, identity), diffs)| {
                let mut r = t.record(id, identity, params.clone(), start);
                if let Some((w, c)) = diffs.first() {
                    r.verdict = Verdict::Fail;
                    r.witness = Some(witness(w, Some(format!("difference {}", format_rational(c)))));
                }
                r
            })
            .collect(),
        Err(e) => parts
            .iter()
            .map(|(id, identity)| {
                let mut r = t.record(id, identity, params.clone(), start);
                fail_with(&mut r, e.clone());
                r
            })
            .collect(),
    }
}

fn meixner(p: &Rational, c: &Rational, n: usize) -> Functional<Rational> {
    meixner_functional(&MeixnerParams::normalized(p.clone(), c.clone()), n)
}

fn meixner_suite(t: &Trial) -> Vec<CheckRecord> {
    let mut rng = seeded(t.seed);
    let n = t.cfg.order;
    let (b, c, alpha) = (random_rational(&mut rng), random_rational(&mut rng), random_rational(&mut rng));
    let time = random_time(&mut rng);
    let params = json!({"b": rat(&b), "c": rat(&c), "alpha": rat(&alpha), "t": rat(&time), "N": n});
    let mu = meixner(&b, &c, n);
    let mut out = Vec::new();

    let start = Instant::now();
    let sides = b_map(&mu, std::slice::from_ref(&alpha), &time)
        .map(|lhs| (lhs.into_moments(), meixner(&(b.clone() + &alpha), &(c.clone() + &time), n).into_moments()));
    out.push(t.exact("meixner-orbit", "B_{alpha,t}[mu_{b,c}] = mu_{b+alpha,c+t}", params.clone(), start, sides));

    let start = Instant::now();
    let mut r = t.record(
        "meixner-pde",
        "D^2 R = 1 + b DR + c (DR)^2 and D^2 eta = 1 + b D eta + (1+c) (D eta)^2",
        params.clone(),
        start,
    );
    match meixner_pde_check(&mu, &b, &c) {
        Ok(rep) => {
            let first = rep.free_form.first_failing_degree().or(rep.boolean_form.first_failing_degree());
            if let Some(deg) = first {
                r.verdict = Verdict::Fail;
                r.witness = Some(Witness { word: vec![1; deg], degree: deg, message: None });
            }
        }
        Err(e) => fail_with(&mut r, e),
    }
    out.push(r);

    let start = Instant::now();
    let psi = random_functional(&mut rng, 1, n);
    let mut r = t.record(
        "two-state-pde",
        "D^2 R^{phi,psi} = 1 + b DR^{phi,psi} + (1+c) (DR^{phi,psi})^2 - DR^psi DR^{phi,psi}",
        params,
        start,
    );
    match two_state_pde_check(&mu, &psi, &b, &c) {
        Ok(res) => {
            if let Some(deg) = res.first_failing_degree() {
                r.verdict = Verdict::Fail;
                r.witness = Some(Witness { word: vec![1; deg], degree: deg, message: None });
            }
        }
        Err(e) => fail_with(&mut r, e),
    }
    out.push(r);
    out
}

fn fock(t: &Trial) -> Vec<CheckRecord> {
    let mut rng = seeded(t.seed);
    let (d, n) = (t.cfg.d, t.cfg.order);
    let dim_k = 2;
    let dim_h = if t.cfg.exact { 1 } else { 1 + t.index % 2 };
    let depth = if t.cfg.exact { n } else { n + 1 };
    let psi = random_state_data(&mut rng, d, dim_k);
    let mu = random_cumulant_data(&mut rng, d, dim_h);
    let params = json!({"d": d, "dim_K": dim_k, "dim_H": dim_h, "N": n, "L": depth});
    let identity = "full Fock model of B[Phi[rho, psi]] = Boolean model of Phi[rho, psi ⊞ rho]";
    let mut out = Vec::new();

    let start = Instant::now();
    let report = if t.cfg.exact {
        evolution_operator_check(&psi, &mu, n, depth)
    } else {
        evolution_operator_check(&psi.map(|x| x.to_f64_lossy()), &mu.map(|x| x.to_f64_lossy()), n, depth)
    };
    let mut p = params.clone();
    if let (Ok(rep), Some(obj)) = (&report, p.as_object_mut()) {
        obj.insert("dim_side_a".into(), json!(rep.dim_a));
        obj.insert("dim_side_b".into(), json!(rep.dim_b));
        obj.insert("sides".into(), json!(rep.sides));
        obj.insert("a_vs_series".into(), json!(rep.a_vs_series));
        obj.insert("b_vs_series".into(), json!(rep.b_vs_series));
        obj.insert("free_sum_vs_series".into(), json!(rep.free_sum_vs_series));
    }
    out.push(t.residual("evolution-operator", identity, p, start, report.map(|r| r.max_residual())));

    let start = Instant::now();
    let h = random_state_data(&mut rng, d, dim_k);
    let sides = tensor_eta_model(&psi, &h).and_then(|tensor| {
        let joint = state_moments(&tensor, n);
        Ok((joint.into_moments(), monotone_convolve(&state_moments(&h, n), &state_moments(&psi, n))?.into_moments()))
    });
    out.push(t.exact("monotone-realization", "(K_i ⊗ I + P_xi ⊗ H_i, xi ⊗ zeta) realizes phi_H ▷ psi_K", params, start, sides));
    out
}

fn positivity(t: &Trial) -> Vec<CheckRecord> {
    let mut rng = seeded(t.seed);
    let n = t.cfg.order;
    let k = n / 2;
    let mut out = Vec::new();

    let start = Instant::now();
    let jacobi_state = |rng: &mut TestRng| moments_from_jacobi(&random_jacobi(rng, n / 2 + 1), n);
    let verdict = (|| {
        let rho = bercovici_pata(&jacobi_state(&mut rng)?);
        let psi = jacobi_state(&mut rng)?;
        psd_check(&phi_map(&rho, &psi)?, k)
    })();
    let mut r = t.record("phi-positive", "Phi[rho, psi] is positive on polynomials of degree <= k", json!({"d": 1, "N": n, "k": k}), start);
    match verdict {
        Ok(v) => {
            r.residual = Some(v.min_eigenvalue);
            if !v.accepted() {
                r.verdict = Verdict::Fail;
                r.witness = Some(Witness { word: vec![], degree: k, message: Some(format!("min eigenvalue {:e}", v.min_eigenvalue)) });
            }
        }
        Err(e) => fail_with(&mut r, e),
    }
    out.push(r);

    let start = Instant::now();
    let d = t.cfg.d;
    let psi = random_state_data(&mut rng, d, 2).map(|x| x.to_f64_lossy());
    let mu = random_cumulant_data(&mut rng, d, 2).map(|x| x.to_f64_lossy());
    let verdict = tensor_eta_model(&psi, &mu).and_then(|tensor| {
        let eta = cumulant_series(&tensor, n);
        psd_check_with(&Functional::new(&eta + &NcSeries::one(d, n))?, k, true, DEFAULT_PSD_EPS)
    });
    let mut r = t.record(
        "eta-conditional-positive",
        "eta of the tensor model is positive on polynomials without constant term of degree <= k",
        json!({"d": d, "N": n, "k": k}),
        start,
    );
    match verdict {
        Ok(v) => {
            r.residual = Some(v.min_eigenvalue / v.max_eigenvalue.abs().max(f64::MIN_POSITIVE));
            if !v.psd {
                r.verdict = Verdict::Fail;
                r.witness = Some(Witness { word: vec![], degree: k, message: Some(format!("min eigenvalue {:e}", v.min_eigenvalue)) });
            }
        }
        Err(e) => fail_with(&mut r, e),
    }
    out.push(r);
    out
}

fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Vec<CheckRecord> {
    let body: fn(&Trial) -> Vec<CheckRecord> = match suite {
        Suite::Semigroup => semigroup,
        Suite::Evolution => evolution,
        Suite::Meixner => meixner_suite,
        Suite::Fock => fock,
        Suite::Positivity => positivity,
        Suite::All => unreachable!("expanded by run"),
    };
    (0..cfg.trials)
        .into_par_iter()
        .map(|index| body(&Trial { suite, index, seed: cfg.trial_seed(suite, index), cfg }))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

pub fn run(cfg: &VerifyConfig) -> ReportDocument {
    let suites: Vec<Suite> = if cfg.suite == Suite::All { Suite::CONCRETE.to_vec() } else { vec![cfg.suite] };
    let checks = suites.into_iter().flat_map(|s| run_suite(s, cfg)).collect();
    ReportDocument::new(cfg.suite.name(), cfg.as_map(), checks)
}
