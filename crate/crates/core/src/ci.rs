//! Computations that need the defining equations: the Tjurina number of a
//! complete intersection, the map `d*` on `(O_Xbar/O_X)^n`, and the
//! identities linking them to the parametric side.

use thiserror::Error;

use crate::check::Check;
use crate::germ::{IdealSpec, Parametrization};
use crate::jet::{saturate_algebra, JetBasis, JetCoord, JetError, JetLayout, JetVector};
use crate::poly::UniPoly;
use crate::scalar::Field;
use crate::series::TruncSeries;
use crate::subalgebra::{multiplicity, CertifiedRing, InvariantRecord, Schedule, Status};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CiError {
    #[error("generator {0} does not vanish on the parametrization")]
    IdealMismatch(String),
    #[error("{k} generators in {n} variables is neither a plane curve nor a complete intersection")]
    UnsupportedIdealShape { k: usize, n: usize },
    #[error("generator {name} has order {order} but the curve has multiplicity {mt}")]
    NotReduced { name: String, order: u32, mt: usize },
    #[error("chain rule fails for generator {0}")]
    ChainRule(String),
    #[error("Jacobian image has no full window up to truncation {0}")]
    NoStabilization(usize),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// Checks that every generator vanishes identically on `φ` (exact
/// polynomial composition) and that the ideal has a supported shape. For a
/// plane curve the single equation must also have order `mt`, which rules
/// out non-reduced or reducible-with-extra-component equations.
pub fn verify_ideal<F: Field>(phi: &Parametrization<F>, ideal: &IdealSpec<F>) -> Result<(), CiError> {
    let n = phi.n();
    for (name, f) in ideal.names.iter().zip(&ideal.generators) {
        for b in phi.branches() {
            if !f.compose(&b.coords).is_zero() {
                return Err(CiError::IdealMismatch(name.clone()));
            }
        }
    }
    if ideal.k() != n - 1 {
        return Err(CiError::UnsupportedIdealShape { k: ideal.k(), n });
    }
    if n == 2 {
        let (mt, _) = multiplicity(phi);
        let order = ideal.generators[0].order().unwrap_or(0);
        if order as usize != mt {
            return Err(CiError::NotReduced {
                name: ideal.names[0].clone(),
                order,
                mt,
            });
        }
    }
    Ok(())
}

/// `(∂f_i/∂x_j)∘φ` as exact polynomials per branch: `entries[i][j][branch]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianAlongPhi<F> {
    pub entries: Vec<Vec<Vec<UniPoly<F>>>>,
}

impl<F: Field> JacobianAlongPhi<F> {
    /// Builds the matrix and asserts the chain rule
    /// `Σ_j (∂f_i/∂x_j ∘ φ) φ̇^(j) = (f_i∘φ)' = 0` exactly.
    pub fn new(phi: &Parametrization<F>, ideal: &IdealSpec<F>) -> Result<Self, CiError> {
        let mut entries = Vec::with_capacity(ideal.k());
        for (name, f) in ideal.names.iter().zip(&ideal.generators) {
            let row: Vec<Vec<UniPoly<F>>> = (0..phi.n())
                .map(|j| {
                    let d = f.partial(j);
                    phi.branches().iter().map(|b| d.compose(&b.coords)).collect()
                })
                .collect();
            for (bi, b) in phi.branches().iter().enumerate() {
                let mut sum = UniPoly::zero();
                for (j, c) in b.coords.iter().enumerate() {
                    sum = sum.add(&row[j][bi].mul(&c.derivative()));
                }
                if !sum.is_zero() {
                    return Err(CiError::ChainRule(name.clone()));
                }
            }
            entries.push(row);
        }
        Ok(JacobianAlongPhi { entries })
    }

    pub fn k(&self) -> usize {
        self.entries.len()
    }

    pub fn n(&self) -> usize {
        self.entries.first().map_or(0, Vec::len)
    }

    fn series(&self, i: usize, j: usize, branch: usize, trunc: usize) -> TruncSeries<F> {
        self.entries[i][j][branch].to_series(trunc)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tjurina {
    pub tau: usize,
    pub trunc: usize,
    pub status: Status,
}

/// `τ = dim O_X^k / J·O_X^n`, on jets. Certified once the image contains
/// every `t_i^m` in each slot for `a_i <= m < N` with `N >= a_i + d_i`,
/// where `d_i` are the witness orders of the conductor certificate: the same
/// completeness argument as for the conductor then shows the image contains
/// all of `t^a O_Xbar` slotwise.
pub fn tjurina_ci<F: Field>(
    phi: &Parametrization<F>,
    jac: &JacobianAlongPhi<F>,
    ring: &CertifiedRing<F>,
    max_trunc: usize,
) -> Result<Tjurina, CiError> {
    let schedule = Schedule::new(ring.trunc, max_trunc.max(ring.trunc));
    for trunc in schedule.orders() {
        let basis = if trunc == ring.trunc {
            ring.basis.clone()
        } else {
            saturate_algebra(&phi.coordinate_images(trunc), phi.r(), trunc)?
        };
        if let Some(tau) = tjurina_at(phi, jac, &basis, &ring.witness_orders, trunc)? {
            return Ok(Tjurina {
                tau,
                trunc,
                status: Status::Certified,
            });
        }
    }
    Err(CiError::NoStabilization(schedule.max))
}

fn tjurina_at<F: Field>(
    phi: &Parametrization<F>,
    jac: &JacobianAlongPhi<F>,
    ring: &JetBasis<F>,
    witness: &[usize],
    trunc: usize,
) -> Result<Option<usize>, CiError> {
    let (k, r) = (jac.k(), phi.r());
    let single = ring.layout();
    let layout = JetLayout::uniform(k, r, trunc);
    let mut image = JetBasis::new(layout.clone());
    for j in 0..jac.n() {
        let cols: Vec<Vec<TruncSeries<F>>> = (0..k)
            .map(|i| (0..r).map(|b| jac.series(i, j, b, trunc)).collect())
            .collect();
        for row in ring.rows() {
            let elem = single.extract(0, row);
            let mut entries = Vec::new();
            for (i, col) in cols.iter().enumerate() {
                for (b, s) in col.iter().enumerate() {
                    let prod = elem.component(b) * s;
                    entries.extend(layout.embed_branch(i, b, &prod)?.entries().iter().cloned());
                }
            }
            if !entries.is_empty() {
                image.insert(&JetVector::from_entries(layout.dim(), entries))?;
            }
        }
    }
    for slot in 0..k {
        for (b, &d) in witness.iter().enumerate() {
            let mut a = trunc;
            while a > 0 && image.contains(&layout.unit(JetCoord { slot, branch: b, exponent: a - 1 }))? {
                a -= 1;
            }
            if a + d > trunc {
                return Ok(None);
            }
        }
    }
    Ok(Some(k * ring.dim() - image.dim()))
}

/// `(dim ker, dim coker)` of `d*: (O_Xbar/O_X)^n → (O_Xbar/O_X)^k`, i.e.
/// `(dim T¹_{Xbar\X}, dim T²_{Xbar\X})`, together with the rank of `d*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DStar {
    pub kernel: usize,
    pub cokernel: usize,
    pub rank: usize,
}

pub fn dstar_cokernel_kernel<F: Field>(
    jac: &JacobianAlongPhi<F>,
    ring: &CertifiedRing<F>,
) -> Result<DStar, CiError> {
    let (k, n) = (jac.k(), jac.n());
    let delta = ring.delta;
    let mut image = JetBasis::new(JetLayout::flat(k * delta));
    let layout = ring.layout().clone();
    for j in 0..n {
        for &col in ring.free_columns() {
            let JetCoord { branch, exponent, .. } = layout.coord(col);
            let mut v = JetVector::zero(0);
            for i in 0..k {
                let s = jac.series(i, j, branch, ring.trunc).shift(exponent).truncate(ring.trunc);
                v = v.concat(&ring.residue(branch, &s)?);
            }
            image.insert(&v)?;
        }
    }
    let rank = image.dim();
    Ok(DStar {
        kernel: n * delta - rank,
        cokernel: k * delta - rank,
        rank,
    })
}

/// The derived `T^i` dimensions and the identities they must satisfy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BraidReport {
    pub t1_xbar_minus_x: usize,
    pub t2_xbar_minus_x: usize,
    pub t1_xbar_to_x: i64,
    pub t2_xbar_to_x: usize,
    pub t2_xbar_over_x: i64,
    pub checks: Vec<Check>,
}

pub fn braid_consistency(rec: &InvariantRecord, tau: usize, dstar: DStar, de: usize) -> BraidReport {
    let (n, d, mt, r, mu, m1) = (
        rec.n as i64,
        rec.delta as i64,
        rec.mt as i64,
        rec.r as i64,
        rec.mu as i64,
        rec.m1 as i64,
    );
    let (tau, de) = (tau as i64, de as i64);
    let t1_minus = dstar.kernel as i64;
    let t2_minus = dstar.cokernel as i64;
    let t1_to = t1_minus - m1;
    let t2_to = t2_minus;
    let t2_over = tau + mt - r - (t1_to - t2_to);
    let mut checks = vec![
        Check::eq("T1_{Xbar->X} - T2_{Xbar->X} = τ - 2δ", t1_to - t2_to, tau - 2 * d),
        Check::eq("T1_{Xbar\\X} - T2_{Xbar\\X} = δ", t1_minus - t2_minus, d),
        Check::le("T2_{Xbar\\X} <= (n-1)δ", t2_minus, (n - 1) * d),
        Check::eq("T2_{Xbar/X} = μ + mt - 1", t2_over, mu + mt - 1),
        Check::eq("τ = e", tau, rec.e as i64),
        Check::eq("d_e = (n-3)δ + τ", de, (n - 3) * d + tau),
    ];
    match rec.n {
        2 => {
            checks.push(Check::eq("d* = 0 on O_Xbar/O_X", dstar.rank as i64, 0));
            checks.push(Check::eq("T1_{Xbar\\X} = 2δ", t1_minus, 2 * d));
            checks.push(Check::eq("T2_{Xbar\\X} = δ", t2_minus, d));
            checks.push(Check::eq("T1_{Xbar->X} = τ - δ", t1_to, tau - d));
            checks.push(Check::eq("T2_{Xbar->X} = δ", t2_to, d));
            checks.push(Check::eq("d_e = τ - δ", de, tau - d));
        }
        3 => checks.push(Check::eq("d_e = τ", de, tau)),
        4 if rec.gorenstein => checks.push(Check::eq("d_e = τ + δ", de, tau + d)),
        _ => {}
    }
    BraidReport {
        t1_xbar_minus_x: dstar.kernel,
        t2_xbar_minus_x: dstar.cokernel,
        t1_xbar_to_x: t1_to,
        t2_xbar_to_x: dstar.cokernel,
        t2_xbar_over_x: t2_over,
        checks,
    }
}
