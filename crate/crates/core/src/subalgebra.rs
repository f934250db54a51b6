//! Valuation-theoretic invariants of the local ring `O_X` inside its
//! normalization `⊕ Q[[t_i]]`.
//!
//! Everything here is computed on jets `O_X mod t^N` and reported only after
//! a conductor certificate shows the truncation is harmless: if the span of
//! `O_X mod t^N` contains every `t_i^m e_i` with `c_i <= m < N`, and some
//! linear form `z` in `O_X` has order `d_i` on branch `i` with
//! `c_i + d_i <= N`, then `⊕ t_i^{c_i} Q[[t_i]] ⊆ O_X` (subtract the window
//! match, divide the remainder by `z`, repeat; the series converges). The
//! window bound also shows no smaller exponent works, so `c` is the
//! conductor exactly and `δ = rN − dim(O_X mod t^N)`.

use crate::germ::Parametrization;
use crate::jet::{saturate_algebra, JetBasis, JetCoord, JetError, JetLayout, JetVector};
use crate::poly::UniPoly;
use crate::scalar::Field;
use crate::series::{LaurentWindow, TruncSeries};

/// Doubling truncation schedule `start, 2 start, ...` capped at `max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Schedule {
    pub start: usize,
    pub max: usize,
}

impl Schedule {
    pub fn new(start: usize, max: usize) -> Self {
        let start = start.max(1);
        Schedule {
            start: start.min(max.max(1)),
            max: max.max(1),
        }
    }

    pub fn orders(&self) -> Vec<usize> {
        let mut out = vec![self.start];
        let mut n = self.start;
        while n < self.max {
            n = (2 * n).min(self.max);
            out.push(n);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Finiteness {
    Finite,
    /// Branch `branch` (0-based) is the constant map.
    ConstantBranch { branch: usize },
}

/// A branch is finite iff some coordinate is a nonzero polynomial.
pub fn check_finite<F: Field>(phi: &Parametrization<F>) -> Finiteness {
    match phi
        .branches()
        .iter()
        .position(|b| b.coords.iter().all(UniPoly::is_zero))
    {
        Some(branch) => Finiteness::ConstantBranch { branch },
        None => Finiteness::Finite,
    }
}

/// `(mt, [mt_1, ..., mt_r])`. Requires a finite germ.
pub fn multiplicity<F: Field>(phi: &Parametrization<F>) -> (usize, Vec<usize>) {
    let per: Vec<usize> = (0..phi.r())
        .map(|i| phi.branch_multiplicity(i).expect("finite branch") as usize)
        .collect();
    (per.iter().sum(), per)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueSemigroup {
    pub branch: usize,
    /// Realized orders below the conductor, ascending; always contains 0.
    pub elements: Vec<usize>,
    pub conductor: usize,
    pub gcd: usize,
}

impl ValueSemigroup {
    pub fn contains(&self, v: usize) -> bool {
        v >= self.conductor || self.elements.binary_search(&v).is_ok()
    }

    pub fn gaps(&self) -> Vec<usize> {
        (0..self.conductor).filter(|v| !self.contains(*v)).collect()
    }

    pub fn gap_count(&self) -> usize {
        self.conductor - self.elements.len()
    }

    /// Gaps `g` with `g + s` in the semigroup for every nonzero element `s`.
    pub fn pseudo_frobenius(&self) -> Vec<usize> {
        self.gaps()
            .into_iter()
            .filter(|&g| {
                (1..=self.conductor).all(|s| !self.contains(s) || self.contains(g + s))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConductorData {
    pub per_branch: Vec<usize>,
    pub degree: usize,
}

/// A certified jet model of `O_X`: its span modulo `t^trunc`, plus the
/// conductor that makes the truncation exact.
#[derive(Debug, Clone)]
pub struct CertifiedRing<F> {
    pub trunc: usize,
    pub basis: JetBasis<F>,
    pub conductor: ConductorData,
    pub delta: usize,
    /// Orders of the linear form used in the certificate.
    pub witness_orders: Vec<usize>,
    free: Vec<usize>,
}

impl<F: Field> CertifiedRing<F> {
    pub fn layout(&self) -> &JetLayout {
        self.basis.layout()
    }

    /// Coordinates of the class of `s * e_branch` in `O_Xbar / O_X`, in the
    /// basis of non-pivot monomials (length `δ`). `s` must be known below
    /// the certified truncation.
    pub fn residue(&self, branch: usize, s: &TruncSeries<F>) -> Result<JetVector<F>, JetError> {
        let v = self
            .layout()
            .embed_branch(0, branch, &s.truncate(self.trunc))?;
        let nf = self.basis.normal_form(&v)?;
        let entries = nf
            .entries()
            .iter()
            .map(|(idx, c)| {
                let pos = self.free.binary_search(idx).expect("residual on a free column");
                (pos, c.clone())
            })
            .collect();
        Ok(JetVector::from_entries(self.free.len(), entries))
    }

    /// Free (non-pivot) jet coordinates, a basis of `O_Xbar / O_X`.
    pub fn free_columns(&self) -> &[usize] {
        &self.free
    }

    /// Whether `s * e_branch` lies in `O_X`.
    pub fn contains_branch_series(&self, branch: usize, s: &TruncSeries<F>) -> Result<bool, JetError> {
        Ok(self.residue(branch, s)?.is_zero())
    }
}

/// A linear form `sum_j s^j x_j` whose order on every branch equals the
/// branch multiplicity, together with those orders.
pub fn witness_linear_form<F: Field>(phi: &Parametrization<F>) -> (Vec<F>, Vec<usize>) {
    let (_, mts) = multiplicity(phi);
    for s in 1i64.. {
        let lambda: Vec<F> = (0..phi.n()).map(|j| F::from_int(s.pow(j as u32))).collect();
        let orders: Vec<Option<u32>> = phi
            .branches()
            .iter()
            .map(|b| {
                let mut p = UniPoly::zero();
                for (c, l) in b.coords.iter().zip(&lambda) {
                    p = p.add(&c.scale(l));
                }
                p.order()
            })
            .collect();
        if orders
            .iter()
            .zip(&mts)
            .all(|(o, &m)| *o == Some(m as u32))
        {
            return (lambda, mts);
        }
    }
    unreachable!("each branch excludes finitely many s")
}

/// One certification attempt at truncation `trunc`.
pub fn certify_at<F: Field>(
    phi: &Parametrization<F>,
    trunc: usize,
) -> Result<Option<CertifiedRing<F>>, JetError> {
    let gens = phi.coordinate_images(trunc);
    let basis = saturate_algebra(&gens, phi.r(), trunc)?;
    let (_, witness) = witness_linear_form(phi);
    let layout = basis.layout().clone();
    let mut per_branch = Vec::with_capacity(phi.r());
    for branch in 0..phi.r() {
        let mut c = trunc;
        while c > 0 {
            let unit = layout.unit(JetCoord {
                slot: 0,
                branch,
                exponent: c - 1,
            });
            if !basis.contains(&unit)? {
                break;
            }
            c -= 1;
        }
        per_branch.push(c);
    }
    if per_branch
        .iter()
        .zip(&witness)
        .any(|(c, d)| c + d > trunc)
    {
        return Ok(None);
    }
    let delta = basis.codim_full();
    let free = basis.free_columns();
    let degree = per_branch.iter().sum();
    Ok(Some(CertifiedRing {
        trunc,
        basis,
        conductor: ConductorData { per_branch, degree },
        delta,
        witness_orders: witness,
        free,
    }))
}

/// Runs the schedule until the conductor is certified. `None` means the
/// ceiling was reached without a certificate (this includes coincident
/// branch images, which admit no conductor).
pub fn delta_and_conductor<F: Field>(
    phi: &Parametrization<F>,
    schedule: Schedule,
) -> Result<Option<CertifiedRing<F>>, JetError> {
    for trunc in schedule.orders() {
        if let Some(c) = certify_at(phi, trunc)? {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// gcd of the orders realized by the subalgebra of branch `branch` below
/// `trunc`.
pub fn primitivity_degree<F: Field>(
    phi: &Parametrization<F>,
    branch: usize,
    trunc: usize,
) -> Result<usize, JetError> {
    let sub = phi.branch_germ(branch);
    let basis = saturate_algebra(&sub.coordinate_images(trunc), 1, trunc)?;
    Ok(basis
        .pivot_columns()
        .fold(0, |g, p| num_integer::gcd(g, p)))
}

/// Value semigroup of a certified single-branch ring.
pub fn value_semigroup<F: Field>(ring: &CertifiedRing<F>, branch: usize) -> ValueSemigroup {
    assert_eq!(ring.layout().branches(), 1, "value semigroup of a single branch");
    let conductor = ring.conductor.per_branch[0];
    let elements: Vec<usize> = ring.basis.pivot_columns().filter(|&p| p < conductor).collect();
    let gcd = elements
        .iter()
        .chain([conductor, conductor + 1].iter())
        .fold(0, |g, &p| num_integer::gcd(g, p));
    ValueSemigroup {
        branch,
        elements,
        conductor,
        gcd,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Primitivity {
    Primitive(ValueSemigroup),
    /// All realized orders are divisible by `k > 1`. `exact` when the
    /// coordinates themselves are polynomials in `t^k`-multiples.
    Imprimitive { k: usize, exact: bool },
    /// No certificate and no divisor up to the ceiling.
    Undetermined,
}

/// Primitivity of one branch, certified by its own conductor.
pub fn analyze_branch<F: Field>(
    phi: &Parametrization<F>,
    branch: usize,
    schedule: Schedule,
) -> Result<Primitivity, JetError> {
    let sub = phi.branch_germ(branch);
    let exp_gcd = sub.branches()[0]
        .coords
        .iter()
        .fold(0, |g, p| num_integer::gcd(g, p.exponent_gcd()));
    if exp_gcd > 1 {
        let k = primitivity_degree(phi, branch, schedule.start)?;
        return Ok(Primitivity::Imprimitive { k, exact: true });
    }
    for trunc in schedule.orders() {
        if let Some(ring) = certify_at(&sub, trunc)? {
            return Ok(Primitivity::Primitive(value_semigroup(&ring, branch)));
        }
    }
    let k = primitivity_degree(phi, branch, schedule.max)?;
    if k > 1 {
        Ok(Primitivity::Imprimitive { k, exact: false })
    } else {
        Ok(Primitivity::Undetermined)
    }
}

pub fn gorenstein_test(delta: usize, conductor_degree: usize) -> bool {
    conductor_degree == 2 * delta
}

/// Cohen–Macaulay type `dim (O_X : m) / O_X`, `None` for a smooth germ.
///
/// Candidates `h` live in `⊕ t_i^{-mt_i} Q[[t_i]]`; parts of order at least
/// `c_i` already lie in the conductor, so only the window
/// `-mt_i <= k < c_i` matters. The type is the dimension of
/// `{h : h x_j ∈ O_X ∀ j}` in that window minus `dim O_X / 𝔠 = c − δ`.
pub fn cm_type<F: Field>(
    phi: &Parametrization<F>,
    ring: &CertifiedRing<F>,
) -> Result<Option<usize>, JetError> {
    if ring.delta == 0 {
        return Ok(None);
    }
    let (_, mts) = multiplicity(phi);
    let n = phi.n();
    let width = ring.free_columns().len();
    let mut image = JetBasis::new(JetLayout::flat(n * width));
    let mut window = 0usize;
    for (branch, &mt) in mts.iter().enumerate() {
        let c = ring.conductor.per_branch[branch] as i64;
        let ext = ring.trunc + mt;
        let coords = phi.branch_series(branch, ext);
        for k in -(mt as i64)..c {
            window += 1;
            let h = LaurentWindow::monomial(k, F::one(), k, k + ext as i64);
            let mut col = JetVector::zero(0);
            for x in &coords {
                let prod = h
                    .mul_series(x)
                    .to_series()
                    .expect("order of x_j is at least mt on every branch");
                col = col.concat(&ring.residue(branch, &prod.truncate(ring.trunc))?);
            }
            image.insert(&col)?;
        }
    }
    let solutions = window - image.dim();
    Ok(Some(solutions - (ring.conductor.degree - ring.delta)))
}

/// How a reported value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// Exact, backed by a conductor or window certificate.
    Certified,
    /// Unchanged across truncations but without a certificate.
    Stabilized,
    Undetermined,
    NotApplicable,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Certified => "certified",
            Status::Stabilized => "stabilized",
            Status::Undetermined => "undetermined",
            Status::NotApplicable => "not-applicable",
        }
    }
}

/// All ring-side invariants of a certified germ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantRecord {
    pub n: usize,
    pub r: usize,
    pub mt: usize,
    pub mt_per_branch: Vec<usize>,
    pub delta: usize,
    pub mu: usize,
    pub conductor: ConductorData,
    pub m1: usize,
    pub e: usize,
    pub gorenstein: bool,
    pub cm_type: Option<usize>,
    pub semigroups: Vec<ValueSemigroup>,
    pub trunc: usize,
}

impl InvariantRecord {
    /// `μ` and `e` are derived here from `δ`, `r` and `m₁`.
    pub fn new<F: Field>(
        phi: &Parametrization<F>,
        ring: &CertifiedRing<F>,
        m1: usize,
        cm_type: Option<usize>,
        semigroups: Vec<ValueSemigroup>,
    ) -> Self {
        let (mt, mt_per_branch) = multiplicity(phi);
        let delta = ring.delta;
        InvariantRecord {
            n: phi.n(),
            r: phi.r(),
            mt,
            mt_per_branch,
            delta,
            mu: 2 * delta + 1 - phi.r(),
            conductor: ring.conductor.clone(),
            m1,
            e: 3 * delta - m1,
            gorenstein: gorenstein_test(delta, ring.conductor.degree),
            cm_type,
            semigroups,
            trunc: ring.trunc,
        }
    }

    pub fn is_smooth(&self) -> bool {
        self.delta == 0
    }

    pub fn is_ordinary_node(&self) -> bool {
        self.delta == 1 && self.r == 2 && self.mt == 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::UniPoly;
    use crate::{Germ, Rational};

    fn r(k: i64) -> Rational {
        Rational::from_integer(k.into())
    }

    fn mono(exps: &[&[u32]], n: usize) -> Germ {
        Germ::monomial(n, exps).unwrap()
    }

    fn sched() -> Schedule {
        Schedule::new(8, 512)
    }

    /// Brute-force numerical semigroup: membership by dynamic programming
    /// over the generators.
    fn semigroup_oracle(gens: &[usize], bound: usize) -> Vec<bool> {
        let mut inside = vec![false; bound];
        inside[0] = true;
        for v in 1..bound {
            inside[v] = gens.iter().any(|&g| g <= v && inside[v - g]);
        }
        inside
    }

    #[test]
    fn finiteness() {
        assert_eq!(check_finite(&mono(&[&[2, 3]], 2)), Finiteness::Finite);
        assert_eq!(
            check_finite(&mono(&[&[0, 0]], 2)),
            Finiteness::ConstantBranch { branch: 0 }
        );
        assert_eq!(
            check_finite(&mono(&[&[1, 0], &[0, 0]], 2)),
            Finiteness::ConstantBranch { branch: 1 }
        );
    }

    #[test]
    fn primitivity_examples() {
        assert_eq!(primitivity_degree(&mono(&[&[2, 3]], 2), 0, 16).unwrap(), 1);
        assert_eq!(primitivity_degree(&mono(&[&[2, 4]], 2), 0, 16).unwrap(), 2);
        let pert = Germ::from_coords(
            2,
            vec![vec![
                UniPoly::monomial(3, r(1)),
                UniPoly::from_terms([(4, r(1)), (5, r(1))]),
            ]],
        )
        .unwrap();
        assert_eq!(primitivity_degree(&pert, 0, 16).unwrap(), 1);
        assert_eq!(
            analyze_branch(&mono(&[&[2, 4]], 2), 0, sched()).unwrap(),
            Primitivity::Imprimitive { k: 2, exact: true }
        );
    }

    #[test]
    fn delta_cusp_node_e6() {
        let cusp = delta_and_conductor(&mono(&[&[2, 3]], 2), sched()).unwrap().unwrap();
        assert_eq!((cusp.delta, cusp.conductor.per_branch.clone()), (1, vec![2]));
        let node = delta_and_conductor(&mono(&[&[1, 0], &[0, 1]], 2), sched())
            .unwrap()
            .unwrap();
        assert_eq!(node.delta, 1);
        assert_eq!(node.conductor.per_branch, vec![1, 1]);
        assert_eq!(node.conductor.degree, 2);
        let e6 = mono(&[&[3, 4]], 2);
        let ring = delta_and_conductor(&e6, sched()).unwrap().unwrap();
        assert_eq!((ring.delta, ring.conductor.degree), (3, 6));
        let Primitivity::Primitive(sg) = analyze_branch(&e6, 0, sched()).unwrap() else {
            panic!("E6 branch is primitive")
        };
        assert_eq!(sg.gaps(), vec![1, 2, 5]);
    }

    #[test]
    fn monomial_curves_match_semigroup_oracle() {
        let cases: &[&[u32]] = &[&[2, 3], &[3, 4], &[3, 5], &[4, 5, 6, 7], &[3, 4, 5], &[5, 7], &[4, 6, 7]];
        for exps in cases {
            let germ = mono(&[exps], exps.len());
            let gens: Vec<usize> = exps.iter().map(|&a| a as usize).collect();
            let oracle = semigroup_oracle(&gens, 200);
            let conductor = (0..200).rev().find(|&v| !oracle[v]).map_or(0, |v| v + 1);
            let gaps = oracle[..conductor].iter().filter(|x| !**x).count();
            let ring = delta_and_conductor(&germ, sched()).unwrap().unwrap();
            assert_eq!(ring.delta, gaps, "{exps:?}");
            assert_eq!(ring.conductor.degree, conductor, "{exps:?}");
            let Primitivity::Primitive(sg) = analyze_branch(&germ, 0, sched()).unwrap() else {
                panic!()
            };
            assert_eq!(sg.gap_count(), gaps);
            assert_eq!(sg.gcd, 1);
            let pf: Vec<usize> = (0..conductor)
                .filter(|&g| !oracle[g] && gens.iter().all(|&s| oracle[g + s]))
                .collect();
            assert_eq!(sg.pseudo_frobenius(), pf, "{exps:?}");
            assert_eq!(cm_type(&germ, &ring).unwrap(), Some(pf.len()), "{exps:?}");
        }
    }

    #[test]
    fn gorenstein_examples() {
        assert!(gorenstein_test(1, 2));
        assert!(!gorenstein_test(2, 3));
        assert!(gorenstein_test(3, 6));
    }

    #[test]
    fn cm_type_examples() {
        for (exps, t) in [(&[2u32, 3][..], 1), (&[3, 4, 5][..], 2), (&[4, 5, 6, 7][..], 3)] {
            let g = mono(&[exps], exps.len());
            let ring = delta_and_conductor(&g, sched()).unwrap().unwrap();
            assert_eq!(cm_type(&g, &ring).unwrap(), Some(t), "{exps:?}");
        }
        let smooth = mono(&[&[1, 0]], 2);
        let ring = delta_and_conductor(&smooth, sched()).unwrap().unwrap();
        assert_eq!(ring.delta, 0);
        assert_eq!(cm_type(&smooth, &ring).unwrap(), None);
    }

    #[test]
    fn coincident_branches_never_certify() {
        let g = Germ::from_coords(
            2,
            vec![
                vec![UniPoly::monomial(1, r(1)), UniPoly::monomial(2, r(1))],
                vec![UniPoly::monomial(1, r(1)), UniPoly::monomial(2, r(1))],
            ],
        )
        .unwrap();
        assert!(delta_and_conductor(&g, Schedule::new(8, 64)).unwrap().is_none());
    }

    #[test]
    fn certified_values_survive_doubling() {
        let g = Germ::from_coords(
            3,
            vec![vec![
                UniPoly::monomial(4, r(1)),
                UniPoly::from_terms([(5, r(1)), (7, r(2))]),
                UniPoly::monomial(6, r(1)),
            ]],
        )
        .unwrap();
        let a = delta_and_conductor(&g, sched()).unwrap().unwrap();
        let b = certify_at(&g, 2 * a.trunc).unwrap().unwrap();
        assert_eq!(a.delta, b.delta);
        assert_eq!(a.conductor, b.conductor);
    }

    #[test]
    fn multibranch_delta_bound() {
        // cusp and a smooth transversal branch
        let g = Germ::from_coords(
            2,
            vec![
                vec![UniPoly::monomial(2, r(1)), UniPoly::monomial(3, r(1))],
                vec![UniPoly::monomial(1, r(1)), UniPoly::monomial(1, r(-1))],
            ],
        )
        .unwrap();
        let ring = delta_and_conductor(&g, sched()).unwrap().unwrap();
        let d1 = 1;
        let d2 = 0;
        assert!(ring.delta >= d1 + d2 + 1);
    }
}
