//! Exact linear algebra on finite jet spaces.
//!
//! A jet space is `slots` copies of `⊕_i Q[t_i]/t_i^{W_i}`. Coordinates are
//! laid out slot-major, then branch, then exponent ascending, so the pivot
//! of a reduced row (its first nonzero coordinate) is its lowest-order term
//! in its first nonvanishing slot and branch.

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

use crate::scalar::Field;
use crate::series::{MultiSeries, Order, TruncSeries};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("vector of length {got} does not match jet layout of dimension {expected}")]
    LayoutMismatch { expected: usize, got: usize },
    #[error("generator {generator} has a unit component on branch {branch}")]
    ZeroOrderGenerator { generator: usize, branch: usize },
    #[error("row {row} has support outside the ambient block")]
    RowOutsideAmbient { row: usize },
    #[error("series truncated at {have} cannot fill a window of length {need}")]
    TruncationTooLow { have: usize, need: usize },
}

/// A coordinate `t_branch^exponent` in slot `slot`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetCoord {
    pub slot: usize,
    pub branch: usize,
    pub exponent: usize,
}

/// The coordinate system of a jet space and its bijection to `0..dim`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JetLayout {
    slots: usize,
    windows: Vec<usize>,
    offsets: Vec<usize>,
    block: usize,
}

impl JetLayout {
    pub fn new(slots: usize, windows: Vec<usize>) -> Self {
        let mut offsets = Vec::with_capacity(windows.len());
        let mut acc = 0;
        for w in &windows {
            offsets.push(acc);
            acc += w;
        }
        JetLayout {
            slots,
            windows,
            offsets,
            block: acc,
        }
    }

    /// A plain coordinate space of dimension `len` (one slot, one branch).
    pub fn flat(len: usize) -> Self {
        Self::new(1, vec![len])
    }

    /// Same window on every branch.
    pub fn uniform(slots: usize, branches: usize, window: usize) -> Self {
        Self::new(slots, vec![window; branches])
    }

    pub fn dim(&self) -> usize {
        self.slots * self.block
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn branches(&self) -> usize {
        self.windows.len()
    }

    pub fn window(&self, branch: usize) -> usize {
        self.windows[branch]
    }

    pub fn index(&self, c: JetCoord) -> usize {
        debug_assert!(c.exponent < self.windows[c.branch] && c.slot < self.slots);
        c.slot * self.block + self.offsets[c.branch] + c.exponent
    }

    pub fn coord(&self, idx: usize) -> JetCoord {
        let slot = idx / self.block;
        let rest = idx % self.block;
        let branch = match self.offsets.binary_search(&rest) {
            Ok(mut b) => {
                // skip empty windows sharing the same offset
                while self.windows[b] == 0 {
                    b += 1;
                }
                b
            }
            Err(b) => b - 1,
        };
        JetCoord {
            slot,
            branch,
            exponent: rest - self.offsets[branch],
        }
    }

    /// Embeds a multiseries into `slot`. Every component must be known on the
    /// whole window.
    pub fn embed<F: Field>(&self, slot: usize, s: &MultiSeries<F>) -> Result<JetVector<F>, JetError> {
        let mut entries = Vec::new();
        for (b, comp) in s.components().iter().enumerate() {
            let w = self.windows[b];
            if comp.trunc_order() < w {
                return Err(JetError::TruncationTooLow {
                    have: comp.trunc_order(),
                    need: w,
                });
            }
            for (k, c) in comp.coeffs().iter().take(w).enumerate() {
                if !c.is_zero() {
                    entries.push((
                        self.index(JetCoord {
                            slot,
                            branch: b,
                            exponent: k,
                        }),
                        c.clone(),
                    ));
                }
            }
        }
        entries.sort_by_key(|e| e.0);
        Ok(JetVector {
            len: self.dim(),
            entries,
        })
    }

    /// Embeds one series on a single branch of `slot`.
    pub fn embed_branch<F: Field>(
        &self,
        slot: usize,
        branch: usize,
        s: &TruncSeries<F>,
    ) -> Result<JetVector<F>, JetError> {
        let w = self.windows[branch];
        if s.trunc_order() < w {
            return Err(JetError::TruncationTooLow {
                have: s.trunc_order(),
                need: w,
            });
        }
        let entries = s
            .coeffs()
            .iter()
            .take(w)
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                (
                    self.index(JetCoord {
                        slot,
                        branch,
                        exponent: k,
                    }),
                    c.clone(),
                )
            })
            .collect();
        Ok(JetVector {
            len: self.dim(),
            entries,
        })
    }

    /// The unit vector at `c`.
    pub fn unit<F: Field>(&self, c: JetCoord) -> JetVector<F> {
        JetVector {
            len: self.dim(),
            entries: vec![(self.index(c), F::one())],
        }
    }

    /// Reads `slot` of a vector back as a multiseries truncated at the
    /// windows.
    pub fn extract<F: Field>(&self, slot: usize, v: &JetVector<F>) -> MultiSeries<F> {
        let mut comps: Vec<TruncSeries<F>> =
            self.windows.iter().map(|&w| TruncSeries::zero(w)).collect();
        let mut coeffs: Vec<Vec<F>> = comps.drain(..).map(TruncSeries::into_coeffs).collect();
        for (idx, c) in &v.entries {
            let jc = self.coord(*idx);
            if jc.slot == slot {
                coeffs[jc.branch][jc.exponent] = c.clone();
            }
        }
        MultiSeries::new(coeffs.into_iter().map(TruncSeries::from_coeffs).collect())
    }
}

/// A sparse vector over a jet layout; entries sorted, no explicit zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct JetVector<F> {
    len: usize,
    entries: Vec<(usize, F)>,
}

impl<F: Field> JetVector<F> {
    pub fn zero(len: usize) -> Self {
        JetVector {
            len,
            entries: Vec::new(),
        }
    }

    pub fn from_dense(v: &[F]) -> Self {
        JetVector {
            len: v.len(),
            entries: v
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i, c.clone()))
                .collect(),
        }
    }

    pub fn from_entries(len: usize, mut entries: Vec<(usize, F)>) -> Self {
        entries.retain(|(_, c)| !c.is_zero());
        entries.sort_by_key(|e| e.0);
        JetVector { len, entries }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(usize, F)] {
        &self.entries
    }

    pub fn get(&self, idx: usize) -> Option<&F> {
        self.entries
            .binary_search_by_key(&idx, |e| e.0)
            .ok()
            .map(|p| &self.entries[p].1)
    }

    pub fn to_dense(&self) -> Vec<F> {
        let mut v = vec![F::zero(); self.len];
        for (i, c) in &self.entries {
            v[*i] = c.clone();
        }
        v
    }

    /// Concatenation `[self, other]`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().map(|(i, c)| (i + self.len, c.clone())));
        JetVector {
            len: self.len + other.len,
            entries,
        }
    }

    fn scale(&self, c: &F) -> Self {
        JetVector {
            len: self.len,
            entries: self
                .entries
                .iter()
                .map(|(i, a)| (*i, a.mul_ref(c)))
                .collect(),
        }
    }

    /// `self - c * other`.
    fn sub_scaled(&self, c: &F, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, x)), Some((j, y))) => {
                    if i < j {
                        out.push((*i, x.clone()));
                        a.next();
                    } else if j < i {
                        out.push((*j, -y.mul_ref(c)));
                        b.next();
                    } else {
                        let v = x.sub_ref(&y.mul_ref(c));
                        if !v.is_zero() {
                            out.push((*i, v));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((i, x)), None) => {
                    out.push((*i, x.clone()));
                    a.next();
                }
                (None, Some((j, y))) => {
                    out.push((*j, -y.mul_ref(c)));
                    b.next();
                }
                (None, None) => break,
            }
        }
        JetVector {
            len: self.len,
            entries: out,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertOutcome {
    Extended,
    AlreadyInSpan,
}

/// A subspace held in reduced row echelon form with monic pivots.
#[derive(Debug, Clone)]
pub struct JetBasis<F> {
    layout: JetLayout,
    rows: Vec<JetVector<F>>,
    pivots: BTreeMap<usize, usize>,
}

impl<F: Field> JetBasis<F> {
    pub fn new(layout: JetLayout) -> Self {
        JetBasis {
            layout,
            rows: Vec::new(),
            pivots: BTreeMap::new(),
        }
    }

    pub fn layout(&self) -> &JetLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[JetVector<F>] {
        &self.rows
    }

    /// Pivot columns in increasing order.
    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    pub fn is_pivot(&self, idx: usize) -> bool {
        self.pivots.contains_key(&idx)
    }

    /// Row whose pivot sits at column `idx`.
    pub fn row_at_pivot(&self, idx: usize) -> Option<&JetVector<F>> {
        self.pivots.get(&idx).map(|&r| &self.rows[r])
    }

    fn check(&self, v: &JetVector<F>) -> Result<(), JetError> {
        if v.len != self.layout.dim() {
            return Err(JetError::LayoutMismatch {
                expected: self.layout.dim(),
                got: v.len,
            });
        }
        Ok(())
    }

    /// Residual of `v` after eliminating every pivot column. Rows are zero on
    /// each other's pivots, so one pass suffices.
    pub fn normal_form(&self, v: &JetVector<F>) -> Result<JetVector<F>, JetError> {
        self.check(v)?;
        let mut acc = v.clone();
        for (idx, c) in &v.entries {
            if let Some(&r) = self.pivots.get(idx) {
                acc = acc.sub_scaled(c, &self.rows[r]);
            }
        }
        Ok(acc)
    }

    pub fn contains(&self, v: &JetVector<F>) -> Result<bool, JetError> {
        Ok(self.normal_form(v)?.is_zero())
    }

    pub fn insert(&mut self, v: &JetVector<F>) -> Result<InsertOutcome, JetError> {
        let residual = self.normal_form(v)?;
        let Some((pivot, lead)) = residual.entries.first().cloned() else {
            return Ok(InsertOutcome::AlreadyInSpan);
        };
        let row = residual.scale(&F::one().div_ref(&lead));
        for existing in &mut self.rows {
            if let Some(c) = existing.get(pivot).cloned() {
                *existing = existing.sub_scaled(&c, &row);
            }
        }
        self.pivots.insert(pivot, self.rows.len());
        self.rows.push(row);
        Ok(InsertOutcome::Extended)
    }

    /// `|ambient| - dim` where every row must be supported inside `ambient`.
    pub fn codim(&self, ambient: &[usize]) -> Result<usize, JetError> {
        let mut inside = vec![false; self.layout.dim()];
        for &i in ambient {
            if i < inside.len() {
                inside[i] = true;
            }
        }
        for (r, row) in self.rows.iter().enumerate() {
            if row.entries.iter().any(|(i, _)| !inside[*i]) {
                return Err(JetError::RowOutsideAmbient { row: r });
            }
        }
        Ok(ambient.len() - self.dim())
    }

    /// Codimension in the whole jet space.
    pub fn codim_full(&self) -> usize {
        self.layout.dim() - self.dim()
    }

    /// Non-pivot columns: coset representatives of a basis of the quotient.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.layout.dim()).filter(|i| !self.is_pivot(*i)).collect()
    }
}

/// Span of `{1}` and all monomials in `generators` inside
/// `⊕_i Q[t_i]/t_i^trunc`, i.e. the image of the subalgebra they generate.
///
/// Every generator must vanish at the origin of every branch.
pub fn saturate_algebra<F: Field>(
    generators: &[MultiSeries<F>],
    branches: usize,
    trunc: usize,
) -> Result<JetBasis<F>, JetError> {
    for (g, gen) in generators.iter().enumerate() {
        for (b, comp) in gen.components().iter().enumerate() {
            if comp.order() == Order::Exact(0) {
                return Err(JetError::ZeroOrderGenerator {
                    generator: g,
                    branch: b,
                });
            }
            if comp.trunc_order() < trunc {
                return Err(JetError::TruncationTooLow {
                    have: comp.trunc_order(),
                    need: trunc,
                });
            }
        }
    }
    let layout = JetLayout::uniform(1, branches, trunc);
    let gens: Vec<MultiSeries<F>> = generators
        .iter()
        .map(|g| MultiSeries::new(g.components().iter().map(|c| c.truncate(trunc)).collect()))
        .collect();
    let mut basis = JetBasis::new(layout);
    let one = MultiSeries::one(&vec![trunc; branches]);
    let mut queue = VecDeque::new();
    if basis.insert(&basis.layout.embed(0, &one)?)? == InsertOutcome::Extended {
        queue.push_back(one);
    }
    while let Some(v) = queue.pop_front() {
        for g in &gens {
            let w = &v * g;
            if w.components().iter().all(TruncSeries::is_zero_jet) {
                continue;
            }
            let jv = basis.layout.embed(0, &w)?;
            if basis.insert(&jv)? == InsertOutcome::Extended {
                queue.push_back(w);
            }
        }
    }
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use proptest::prelude::*;

    fn r(k: i64) -> Rational {
        Rational::from_integer(k.into())
    }

    fn dense(v: &[i64]) -> JetVector<Rational> {
        JetVector::from_dense(&v.iter().map(|&k| r(k)).collect::<Vec<_>>())
    }

    fn mono(k: usize, n: usize) -> TruncSeries<Rational> {
        TruncSeries::monomial(k, r(1), n)
    }

    #[test]
    fn insert_examples() {
        let mut b = JetBasis::new(JetLayout::flat(3));
        assert_eq!(b.insert(&dense(&[1, 0, 0])).unwrap(), InsertOutcome::Extended);
        assert_eq!(b.dim(), 1);
        assert_eq!(b.insert(&dense(&[2, 0, 0])).unwrap(), InsertOutcome::AlreadyInSpan);
        assert_eq!(b.insert(&dense(&[1, 1, 0])).unwrap(), InsertOutcome::Extended);
        assert_eq!(b.dim(), 2);
        assert_eq!(
            b.insert(&dense(&[1, 1])),
            Err(JetError::LayoutMismatch {
                expected: 3,
                got: 2
            })
        );
    }

    #[test]
    fn contains_examples() {
        let mut b = JetBasis::new(JetLayout::flat(2));
        assert!(b.contains(&dense(&[0, 0])).unwrap());
        b.insert(&dense(&[1, 0])).unwrap();
        assert!(b.contains(&dense(&[5, 0])).unwrap());
        assert!(!b.contains(&dense(&[0, 1])).unwrap());
    }

    #[test]
    fn codim_examples() {
        let mut b = JetBasis::new(JetLayout::flat(4));
        b.insert(&dense(&[1, 0, 0, 0])).unwrap();
        assert_eq!(b.codim(&[0, 1, 2]).unwrap(), 2);
        assert_eq!(b.codim(&[1, 2]), Err(JetError::RowOutsideAmbient { row: 0 }));
        let mut full = JetBasis::new(JetLayout::flat(2));
        full.insert(&dense(&[1, 2])).unwrap();
        full.insert(&dense(&[0, 3])).unwrap();
        assert_eq!(full.codim(&[0, 1]).unwrap(), 0);
        let empty: JetBasis<Rational> = JetBasis::new(JetLayout::flat(4));
        assert_eq!(empty.codim(&[0, 1, 2, 3]).unwrap(), 4);
    }

    #[test]
    fn rows_are_reduced_and_monic() {
        let mut b = JetBasis::new(JetLayout::flat(3));
        b.insert(&dense(&[2, 4, 6])).unwrap();
        b.insert(&dense(&[0, 3, 1])).unwrap();
        for p in b.pivot_columns().collect::<Vec<_>>() {
            let row = b.row_at_pivot(p).unwrap();
            assert_eq!(row.get(p), Some(&r(1)));
            for q in b.pivot_columns() {
                if q != p {
                    assert!(row.get(q).is_none());
                }
            }
        }
    }

    #[test]
    fn saturate_cusp_has_gap_at_one() {
        // oracle: semigroup <2,3> below 7 is {0,2,3,4,5,6}
        let gens = vec![
            MultiSeries::new(vec![mono(2, 7)]),
            MultiSeries::new(vec![mono(3, 7)]),
        ];
        let b = saturate_algebra(&gens, 1, 7).unwrap();
        assert_eq!(b.dim(), 6);
        assert_eq!(b.pivot_columns().collect::<Vec<_>>(), vec![0, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn saturate_smooth_is_everything() {
        let gens = vec![MultiSeries::new(vec![mono(1, 5)])];
        assert_eq!(saturate_algebra(&gens, 1, 5).unwrap().dim(), 5);
    }

    #[test]
    fn saturate_node() {
        // span{(1,1)} + t1 Q[t1] + t2 Q[t2]: codim 1 in an 8-dim space
        let gens = vec![
            MultiSeries::new(vec![mono(1, 4), TruncSeries::zero(4)]),
            MultiSeries::new(vec![TruncSeries::zero(4), mono(1, 4)]),
        ];
        let b = saturate_algebra(&gens, 2, 4).unwrap();
        assert_eq!(b.codim_full(), 1);
        let l = b.layout().clone();
        assert!(!b
            .contains(&l.unit(JetCoord {
                slot: 0,
                branch: 0,
                exponent: 0
            }))
            .unwrap());
    }

    #[test]
    fn saturate_rejects_unit_generator() {
        let gens = vec![MultiSeries::new(vec![TruncSeries::<Rational>::one(5)])];
        assert_eq!(
            saturate_algebra(&gens, 1, 5).unwrap_err(),
            JetError::ZeroOrderGenerator {
                generator: 0,
                branch: 0
            }
        );
    }

    #[test]
    fn layout_coordinates_roundtrip() {
        let l = JetLayout::new(2, vec![3, 0, 4]);
        for i in 0..l.dim() {
            assert_eq!(l.index(l.coord(i)), i);
        }
    }

    #[test]
    fn saturation_is_compatible_with_doubling() {
        let gens = |n| {
            vec![
                MultiSeries::new(vec![mono(3, n)]),
                MultiSeries::new(vec![&mono(4, n) + &mono(5, n)]),
            ]
        };
        let small = saturate_algebra(&gens(10), 1, 10).unwrap();
        let big = saturate_algebra(&gens(20), 1, 20).unwrap();
        // projection of the big span to exponents < 10 spans the small one
        let mut proj = JetBasis::new(JetLayout::flat(10));
        for row in big.rows() {
            let d = row.to_dense();
            proj.insert(&JetVector::from_dense(&d[..10])).unwrap();
        }
        for row in small.rows() {
            assert!(proj.contains(row).unwrap());
        }
        assert_eq!(proj.dim(), small.dim());
    }

    proptest! {
        #[test]
        fn dimension_independent_of_insertion_order(
            vs in prop::collection::vec(prop::collection::vec(-3i64..4, 6), 1..9),
            seed in any::<u64>(),
        ) {
            let mut a = JetBasis::new(JetLayout::flat(6));
            for v in &vs { a.insert(&dense(v)).unwrap(); }
            let mut perm: Vec<usize> = (0..vs.len()).collect();
            let mut s = seed;
            for i in (1..perm.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            let mut b = JetBasis::new(JetLayout::flat(6));
            for &i in &perm { b.insert(&dense(&vs[i])).unwrap(); }
            prop_assert_eq!(a.dim(), b.dim());
            // canonical reduced form does not depend on order either
            prop_assert_eq!(
                a.pivot_columns().collect::<Vec<_>>(),
                b.pivot_columns().collect::<Vec<_>>()
            );
            for p in a.pivot_columns() {
                prop_assert_eq!(a.row_at_pivot(p), b.row_at_pivot(p));
            }
        }

        #[test]
        fn codim_is_monotone(
            vs in prop::collection::vec(prop::collection::vec(-3i64..4, 5), 0..7),
            extra in prop::collection::vec(-3i64..4, 5),
        ) {
            let mut a = JetBasis::new(JetLayout::flat(5));
            for v in &vs { a.insert(&dense(v)).unwrap(); }
            let before = a.codim_full();
            a.insert(&dense(&extra)).unwrap();
            prop_assert!(a.codim_full() <= before);
        }
    }
}
