//! End-to-end run: finiteness, primitivity, certified invariants, cotangent
//! dimensions and the ideal-assisted checks, with an exit code.

use std::fmt;

use crate::check::{all_pass, Check};
use crate::ci::{
    braid_consistency, dstar_cokernel_kernel, tjurina_ci, verify_ideal, BraidReport, CiError, DStar,
    JacobianAlongPhi,
};
use crate::cotangent::{assemble_cotangent, corollary_checks, m1, CotangentDims, CotangentError};
use crate::germ::ProblemInstance;
use crate::jet::JetError;
use crate::scalar::Field;
use crate::subalgebra::{
    analyze_branch, check_finite, cm_type, delta_and_conductor, multiplicity, Finiteness,
    InvariantRecord, Primitivity, Schedule, Status, ValueSemigroup,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_FINITE: i32 = 2;
pub const EXIT_UNDETERMINED: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Smooth,
    OrdinaryNode,
    SingularFinite,
    NotFinitelyDetermined,
    Undetermined,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Smooth => "smooth",
            Classification::OrdinaryNode => "ordinary-node",
            Classification::SingularFinite => "singular-finite",
            Classification::NotFinitelyDetermined => "not-finitely-determined",
            Classification::Undetermined => "undetermined",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How much of the pipeline to run; each stage includes the earlier ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    /// Finiteness, primitivity and the conductor certificate.
    Check,
    Invariants,
    Codim,
    /// Everything, including the ideal-assisted checks.
    Full,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tjurina {
    pub value: usize,
    pub status: Status,
    pub method: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CiOutcome {
    pub dstar: DStar,
    pub braid: BraidReport,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub classification: Classification,
    pub stage: Stage,
    pub n: usize,
    pub r: usize,
    pub mt: Option<usize>,
    pub record: Option<InvariantRecord>,
    pub cotangent: Option<CotangentDims>,
    pub tjurina: Option<Tjurina>,
    pub ci: Option<CiOutcome>,
    /// Consistency checks; any failure gives exit code 4.
    pub checks: Vec<Check>,
    /// Reported but never asserted.
    pub observations: Vec<Check>,
    pub quasihomogeneous: bool,
    pub reason: Option<String>,
    pub diagnostics: Vec<String>,
    pub exit_code: i32,
}

impl RunOutcome {
    pub fn finite(&self) -> bool {
        self.classification != Classification::NotFinitelyDetermined
    }

    fn stop(mut self, classification: Classification, code: i32, reason: String) -> Self {
        self.classification = classification;
        self.exit_code = code;
        self.diagnostics.push(reason.clone());
        self.reason = Some(reason);
        self
    }
}

pub fn run<F: Field>(inst: &ProblemInstance<F>, stage: Stage) -> RunOutcome {
    let phi = &inst.phi;
    let opts = &inst.options;
    let qh = opts.quasihomogeneous || phi.is_weighted_monomial();
    let mut out = RunOutcome {
        classification: Classification::Undetermined,
        stage,
        n: phi.n(),
        r: phi.r(),
        mt: None,
        record: None,
        cotangent: None,
        tjurina: None,
        ci: None,
        checks: Vec::new(),
        observations: Vec::new(),
        quasihomogeneous: qh,
        reason: None,
        diagnostics: Vec::new(),
        exit_code: EXIT_OK,
    };
    let name = |i: usize| phi.branches()[i].name.clone();
    if let Finiteness::ConstantBranch { branch } = check_finite(phi) {
        let reason = format!("constant branch {}", name(branch));
        return out.stop(Classification::NotFinitelyDetermined, EXIT_NOT_FINITE, reason);
    }
    let (mt, mts) = multiplicity(phi);
    out.mt = Some(mt);
    let mut semigroups: Vec<ValueSemigroup> = Vec::new();
    for (i, &mt_i) in mts.iter().enumerate() {
        let sched = Schedule::new(opts.start_for(mt_i), opts.trunc_max);
        match analyze_branch(phi, i, sched) {
            Ok(Primitivity::Primitive(sg)) => semigroups.push(sg),
            Ok(Primitivity::Imprimitive { k, .. }) => {
                let reason = format!("imprimitive branch {}, k={k}", name(i));
                return out.stop(Classification::NotFinitelyDetermined, EXIT_NOT_FINITE, reason);
            }
            Ok(Primitivity::Undetermined) => {
                let reason = format!(
                    "primitivity of branch {} undetermined up to N_max = {}",
                    name(i),
                    opts.trunc_max
                );
                return out.stop(Classification::Undetermined, EXIT_UNDETERMINED, reason);
            }
            Err(e) => return internal(out, e),
        }
    }
    let sched = Schedule::new(opts.start_for(mt), opts.trunc_max);
    let ring = match delta_and_conductor(phi, sched) {
        Ok(Some(ring)) => ring,
        Ok(None) => {
            let reason = format!("no conductor found up to N_max = {}", opts.trunc_max);
            return out.stop(Classification::Undetermined, EXIT_UNDETERMINED, reason);
        }
        Err(e) => return internal(out, e),
    };
    let sum_branch: usize = semigroups.iter().map(ValueSemigroup::gap_count).sum();
    out.checks.push(Check::le(
        "δ >= Σδ_i + r - 1",
        (sum_branch + phi.r() - 1) as i64,
        ring.delta as i64,
    ));
    let (m, t) = match (m1(phi, &ring), cm_type(phi, &ring)) {
        (Ok(m), Ok(t)) => (m, t),
        (Err(e), _) | (_, Err(e)) => return internal(out, e),
    };
    let rec = InvariantRecord::new(phi, &ring, m, t, semigroups);
    out.classification = if rec.is_smooth() {
        Classification::Smooth
    } else if rec.is_ordinary_node() {
        Classification::OrdinaryNode
    } else {
        Classification::SingularFinite
    };
    out.checks.push(Check::holds(
        "Gorenstein iff type 1",
        rec.gorenstein == (rec.cm_type == Some(1)) || rec.is_smooth(),
        format!("c = {}, 2δ = {}, t = {:?}", rec.conductor.degree, 2 * rec.delta, rec.cm_type),
    ));
    if stage >= Stage::Invariants && deligne_substitution_applies(&rec) {
        out.tjurina = Some(Tjurina {
            value: rec.e,
            status: Status::Certified,
            method: "deligne-substitution",
        });
    }
    out.record = Some(rec.clone());
    if stage < Stage::Codim {
        return finish(out);
    }
    let dims = match assemble_cotangent(phi, &ring, &rec) {
        Ok(d) => d,
        Err(CotangentError::Jet(e)) => return internal(out, e),
        Err(e) => {
            out.checks.push(Check::holds("cotangent formulas", false, e.to_string()));
            return finish(out);
        }
    };
    let de = dims.ae_codim_oracle;
    out.checks.push(Check::eq("d_e = nδ - m1", de as i64, dims.ae_codim_formula));
    out.checks.push(Check::eq("le_codim = nδ", dims.le_codim as i64, (rec.n * rec.delta) as i64));
    out.checks.extend(dims.chain.iter().cloned());
    out.checks.extend(corollary_checks(&rec, de, qh));
    if let Some(t) = rec.cm_type {
        out.observations.push(Check::le(
            "d_e <= (n-1)δ - r + t",
            de as i64,
            (rec.n as i64 - 1) * rec.delta as i64 - rec.r as i64 + t as i64,
        ));
    }
    out.cotangent = Some(dims);
    if stage < Stage::Full {
        return finish(out);
    }
    if let Some(ideal) = &inst.ideal {
        let ci = verify_ideal(phi, ideal)
            .and_then(|()| JacobianAlongPhi::new(phi, ideal))
            .and_then(|jac| {
                let tau = tjurina_ci(phi, &jac, &ring, opts.trunc_max)?;
                let dstar = dstar_cokernel_kernel(&jac, &ring)?;
                Ok((tau, dstar))
            });
        match ci {
            Ok((tau, dstar)) => {
                let braid = braid_consistency(&rec, tau.tau, dstar, de);
                out.checks.extend(braid.checks.iter().cloned());
                out.tjurina = Some(Tjurina {
                    value: tau.tau,
                    status: tau.status,
                    method: "jacobian-cokernel",
                });
                out.ci = Some(CiOutcome { dstar, braid });
            }
            Err(e @ (CiError::IdealMismatch(_) | CiError::UnsupportedIdealShape { .. } | CiError::NotReduced { .. })) => {
                let class = out.classification;
                return out.stop(class, EXIT_USAGE, format!("ideal rejected: {e}"));
            }
            Err(e @ CiError::NoStabilization(_)) => {
                let class = out.classification;
                return out.stop(class, EXIT_UNDETERMINED, e.to_string());
            }
            Err(e) => {
                out.checks.push(Check::holds("ideal computations", false, e.to_string()));
            }
        }
    }
    finish(out)
}

/// `τ = e` holds without equations for smoothable unobstructed germs known
/// from the embedding dimension alone.
pub fn deligne_substitution_applies(rec: &InvariantRecord) -> bool {
    rec.n <= 3 || (rec.n == 4 && rec.gorenstein)
}

fn finish(mut out: RunOutcome) -> RunOutcome {
    if !all_pass(&out.checks) {
        out.exit_code = EXIT_CHECK_FAILED;
        for c in out.checks.iter().filter(|c| !c.passed) {
            out.diagnostics.push(format!("check failed: {c}"));
        }
    }
    out
}

fn internal(out: RunOutcome, e: JetError) -> RunOutcome {
    let class = out.classification;
    out.stop(class, EXIT_CHECK_FAILED, format!("internal error: {e}"))
}
