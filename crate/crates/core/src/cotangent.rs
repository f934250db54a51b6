//! Parametric cotangent dimensions: the `A_e`-codimension by a direct
//! tangent-space quotient, the left codimension, `m₁`, and the identities and
//! inequalities tying them to the ring invariants.
//!
//! With `θ(φ) = ⊕_j O_Xbar ∂/∂x_j`, the extended tangent space is
//! `O_Xbar·φ̇ + ⊕_j O_X ∂/∂x_j`. Both contain `𝔠^n` once the jet window
//! passes the conductor, so the quotient is computed exactly on jets.

use thiserror::Error;

use crate::check::Check;
use crate::germ::Parametrization;
use crate::jet::{saturate_algebra, JetBasis, JetCoord, JetError, JetLayout, JetVector};
use crate::scalar::Field;
use crate::series::MultiSeries;
use crate::subalgebra::{CertifiedRing, InvariantRecord};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CotangentError {
    #[error("{what}: oracle gives {oracle}, formula gives {formula}")]
    FormulaMismatch {
        what: &'static str,
        oracle: usize,
        formula: i64,
    },
    #[error("inequality chain violated at {0}")]
    ChainViolation(String),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// The two pieces of the extended tangent space inside
/// `⊕_{slot j, branch i} Q[t_i]/t_i^W`.
#[derive(Clone)]
pub struct TangentSpaceJets<F> {
    pub window: usize,
    /// `⊕_j O_X ∂/∂x_j`.
    pub w_image: JetBasis<F>,
    /// `w_image` plus `O_Xbar·φ̇`.
    pub full: JetBasis<F>,
    pub phidot: Vec<MultiSeries<F>>,
}

impl<F: Field> TangentSpaceJets<F> {
    pub fn ae_codim(&self) -> usize {
        self.full.codim_full()
    }

    pub fn le_codim(&self) -> usize {
        self.w_image.codim_full()
    }
}

/// Smallest window this module uses by default:
/// `max_i (c_i + max_j ord φ̇_i^(j) + 2)`.
pub fn oracle_window<F: Field>(phi: &Parametrization<F>, ring: &CertifiedRing<F>) -> usize {
    (0..phi.r())
        .map(|i| {
            let vel = (0..phi.n())
                .filter_map(|j| phi.branches()[i].coords[j].derivative().order())
                .max()
                .unwrap_or(0) as usize;
            ring.conductor.per_branch[i] + vel + 2
        })
        .max()
        .unwrap_or(2)
}

/// Builds the tangent-space jets at `window`, which must be at least every
/// branch conductor for the codimensions to be exact.
pub fn tangent_space_jets<F: Field>(
    phi: &Parametrization<F>,
    window: usize,
) -> Result<TangentSpaceJets<F>, JetError> {
    let (n, r) = (phi.n(), phi.r());
    let ring = saturate_algebra(&phi.coordinate_images(window), r, window)?;
    let single = ring.layout();
    let layout = JetLayout::uniform(n, r, window);
    let mut w_image = JetBasis::new(layout.clone());
    for slot in 0..n {
        for row in ring.rows() {
            let entries = row
                .entries()
                .iter()
                .map(|(idx, c)| {
                    let jc = single.coord(*idx);
                    (layout.index(JetCoord { slot, ..jc }), c.clone())
                })
                .collect();
            w_image.insert(&JetVector::from_entries(layout.dim(), entries))?;
        }
    }
    let phidot = phi.velocity(window);
    let mut full = w_image.clone();
    for branch in 0..r {
        for k in 0..window {
            let mut entries = Vec::new();
            for (slot, v) in phidot.iter().enumerate() {
                let s = v.component(branch).shift(k).truncate(window);
                let part = layout.embed_branch(slot, branch, &s)?;
                entries.extend(part.entries().iter().cloned());
            }
            if entries.is_empty() {
                break;
            }
            full.insert(&JetVector::from_entries(layout.dim(), entries))?;
        }
    }
    Ok(TangentSpaceJets {
        window,
        w_image,
        full,
        phidot,
    })
}

/// `d_e(φ, A)` by direct quotient at the default window.
pub fn ae_codim_oracle<F: Field>(
    phi: &Parametrization<F>,
    ring: &CertifiedRing<F>,
) -> Result<usize, JetError> {
    Ok(tangent_space_jets(phi, oracle_window(phi, ring))?.ae_codim())
}

/// `d_e(φ, L)`: codimension of `⊕_j O_X ∂/∂x_j` alone.
pub fn le_codim<F: Field>(phi: &Parametrization<F>, ring: &CertifiedRing<F>) -> Result<usize, JetError> {
    Ok(tangent_space_jets(phi, oracle_window(phi, ring))?.le_codim())
}

/// `m₁ = dim T⁰_Xbar / T⁰_X`. A field `a ∂/∂t` lifts iff every `a φ̇^(j)`
/// lies in `O_X`; components of `a` at or above the conductor always do,
/// so `m₁` is the rank of `a ↦ (a φ̇^(j) mod O_X)_j` on the window below it.
pub fn m1<F: Field>(phi: &Parametrization<F>, ring: &CertifiedRing<F>) -> Result<usize, JetError> {
    let n = phi.n();
    let width = ring.free_columns().len();
    let phidot = phi.velocity(ring.trunc);
    let mut image = JetBasis::new(JetLayout::flat(n * width));
    for (branch, &c) in ring.conductor.per_branch.iter().enumerate() {
        for k in 0..c {
            let mut col = JetVector::zero(0);
            for v in &phidot {
                let s = v.component(branch).shift(k).truncate(ring.trunc);
                col = col.concat(&ring.residue(branch, &s)?);
            }
            image.insert(&col)?;
        }
    }
    Ok(image.dim())
}

/// `dim O_Xbar / (φ̇_i^(1), ..., φ̇_i^(n))` summed over branches, which is
/// `mt − r`.
pub fn t1_xbar_over_x_dim<F: Field>(phi: &Parametrization<F>) -> Result<usize, JetError> {
    let window = (0..phi.r())
        .filter_map(|i| phi.branch_multiplicity(i))
        .max()
        .unwrap_or(0) as usize
        + 1;
    let layout = JetLayout::uniform(1, phi.r(), window);
    let mut ideal = JetBasis::new(layout.clone());
    let phidot = phi.velocity(window);
    for branch in 0..phi.r() {
        for v in &phidot {
            for k in 0..window {
                let s = v.component(branch).shift(k).truncate(window);
                ideal.insert(&layout.embed_branch(0, branch, &s)?)?;
            }
        }
    }
    Ok(ideal.codim_full())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CotangentDims {
    pub ae_codim_oracle: usize,
    pub ae_codim_formula: i64,
    pub le_codim: usize,
    pub m1: usize,
    /// `dim T¹_{Xbar→Y}`, equal to `d_e`.
    pub t1_par: usize,
    /// `dim T¹_{Xbar\Y} = nδ`.
    pub t1_xbar_minus_y: usize,
    /// `mt − r`.
    pub t1_xbar_over_x: usize,
    /// Dimension of the smooth base of the semi-universal unfolding.
    pub base_dim_report: usize,
    /// Empty for smooth germs.
    pub chain: Vec<Check>,
}

/// The inequality chain from `(n−2)δ` up to `nδ`; empty when smooth. The
/// two links through the Cohen–Macaulay type are replaced by a direct
/// comparison when `t` is unknown.
pub fn inequality_chain(rec: &InvariantRecord, de: usize) -> Vec<Check> {
    if rec.is_smooth() {
        return Vec::new();
    }
    let (n, d, c, mt, r, mu, de) = (
        rec.n as i64,
        rec.delta as i64,
        rec.conductor.degree as i64,
        rec.mt as i64,
        rec.r as i64,
        rec.mu as i64,
        de as i64,
    );
    let low = (n - 2) * d;
    let mid = n * d - c + mt - r;
    let mut out = Vec::new();
    match rec.cm_type {
        Some(t) => {
            let via_t = (n - 2) * d + t as i64 - 1 + mt - r;
            out.push(Check::le("(n-2)δ <= (n-2)δ + t - 1 + mt - r", low, via_t));
            out.push(Check::le("(n-2)δ + t - 1 + mt - r <= nδ - c + mt - r", via_t, mid));
        }
        None => out.push(Check::le("(n-2)δ <= nδ - c + mt - r", low, mid)),
    }
    out.push(Check::le("nδ - c + mt - r <= d_e", mid, de));
    let upper = (n - 1) * d + mu - c;
    out.push(Check::le("d_e <= (n-1)δ + μ - c", de, upper));
    out.push(Check::le("(n-1)δ + μ - c <= nδ - r", upper, n * d - r));
    out.push(Check::lt("nδ - r < nδ", n * d - r, n * d));
    out
}

/// Computes every cotangent dimension and enforces the closed formulas and
/// the inequality chain.
pub fn assemble_cotangent<F: Field>(
    phi: &Parametrization<F>,
    ring: &CertifiedRing<F>,
    rec: &InvariantRecord,
) -> Result<CotangentDims, CotangentError> {
    let jets = tangent_space_jets(phi, oracle_window(phi, ring))?;
    let oracle = jets.ae_codim();
    let le = jets.le_codim();
    let (n, d) = (rec.n as i64, rec.delta as i64);
    let formula = n * d - rec.m1 as i64;
    if oracle as i64 != formula {
        return Err(CotangentError::FormulaMismatch {
            what: "d_e = nδ - m1",
            oracle,
            formula,
        });
    }
    let via_e = (n - 3) * d + rec.e as i64;
    if oracle as i64 != via_e {
        return Err(CotangentError::FormulaMismatch {
            what: "d_e = (n-3)δ + e",
            oracle,
            formula: via_e,
        });
    }
    if le != rec.n * rec.delta {
        return Err(CotangentError::FormulaMismatch {
            what: "le_codim = nδ",
            oracle: le,
            formula: n * d,
        });
    }
    let xbar_over_x = t1_xbar_over_x_dim(phi)?;
    if xbar_over_x != rec.mt - rec.r {
        return Err(CotangentError::FormulaMismatch {
            what: "dim T1_{Xbar/X} = mt - r",
            oracle: xbar_over_x,
            formula: (rec.mt - rec.r) as i64,
        });
    }
    let chain = inequality_chain(rec, oracle);
    if let Some(bad) = chain.iter().find(|c| !c.passed) {
        return Err(CotangentError::ChainViolation(bad.to_string()));
    }
    Ok(CotangentDims {
        ae_codim_oracle: oracle,
        ae_codim_formula: formula,
        le_codim: le,
        m1: rec.m1,
        t1_par: oracle,
        t1_xbar_minus_y: rec.n * rec.delta,
        t1_xbar_over_x: xbar_over_x,
        base_dim_report: formula as usize,
        chain,
    })
}

/// Checks that depend on quasihomogeneity and the Gorenstein property.
/// `quasihomogeneous` is an assertion about the input, never inferred here.
pub fn corollary_checks(rec: &InvariantRecord, de: usize, quasihomogeneous: bool) -> Vec<Check> {
    let (n, d, r, de) = (rec.n as i64, rec.delta as i64, rec.r as i64, de as i64);
    let mut out = vec![Check::holds(
        "d_e = 0 iff smooth or ordinary node",
        (de == 0) == (rec.is_smooth() || rec.is_ordinary_node()),
        format!("d_e = {de}"),
    )];
    if rec.is_smooth() {
        return out;
    }
    if quasihomogeneous {
        if let Some(t) = rec.cm_type {
            out.push(Check::eq("d_e = (n-1)δ - r + t", de, (n - 1) * d - r + t as i64));
        }
    }
    if rec.gorenstein {
        let bound = (n - 1) * d - r + 1;
        if quasihomogeneous {
            out.push(Check::eq("d_e = (n-1)δ - r + 1 (Gorenstein, qh)", de, bound));
        } else {
            out.push(Check::le("d_e <= (n-1)δ - r + 1 (Gorenstein)", de, bound));
        }
    }
    out
}
