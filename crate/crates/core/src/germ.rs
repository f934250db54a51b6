//! Problem data: the parametrization, an optional ideal, and run options.

use num_rational::Ratio;
use thiserror::Error;

use crate::poly::{MultiPoly, UniPoly};
use crate::scalar::Field;
use crate::series::{MultiSeries, TruncSeries};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GermError {
    #[error("ambient dimension must be at least 2, got {0}")]
    AmbientTooSmall(usize),
    #[error("a parametrization needs at least one branch")]
    NoBranches,
    #[error("branch {branch}: expected {expected} coordinates, got {got}")]
    CoordinateCount {
        branch: String,
        expected: usize,
        got: usize,
    },
    #[error("branch {branch}: coordinate x{coord} has a nonzero constant term")]
    BranchConstantTerm { branch: String, coord: usize },
    #[error("ideal generator {0} has a nonzero constant term")]
    IdealConstantTerm(String),
    #[error("ideal generator {name} uses {got} variables, ambient dimension is {expected}")]
    IdealArity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("ideal must have at least one generator")]
    EmptyIdeal,
}

/// One branch `t -> (p_1(t), ..., p_n(t))` with polynomial coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch<F> {
    pub name: String,
    pub param: String,
    pub coords: Vec<UniPoly<F>>,
}

/// A multigerm `(C, S) -> (C^n, 0)` given by `r` polynomial branches.
#[derive(Debug, Clone, PartialEq)]
pub struct Parametrization<F> {
    n: usize,
    branches: Vec<Branch<F>>,
}

impl<F: Field> Parametrization<F> {
    pub fn new(n: usize, branches: Vec<Branch<F>>) -> Result<Self, GermError> {
        if n < 2 {
            return Err(GermError::AmbientTooSmall(n));
        }
        if branches.is_empty() {
            return Err(GermError::NoBranches);
        }
        for b in &branches {
            if b.coords.len() != n {
                return Err(GermError::CoordinateCount {
                    branch: b.name.clone(),
                    expected: n,
                    got: b.coords.len(),
                });
            }
            if let Some(j) = b.coords.iter().position(|p| !p.constant_term().is_zero()) {
                return Err(GermError::BranchConstantTerm {
                    branch: b.name.clone(),
                    coord: j + 1,
                });
            }
        }
        Ok(Parametrization { n, branches })
    }

    /// Convenience constructor with generated branch names `b1, b2, ...`
    /// and parameter `t`.
    pub fn from_coords(n: usize, coords: Vec<Vec<UniPoly<F>>>) -> Result<Self, GermError> {
        let branches = coords
            .into_iter()
            .enumerate()
            .map(|(i, c)| Branch {
                name: format!("b{}", i + 1),
                param: "t".to_string(),
                coords: c,
            })
            .collect();
        Self::new(n, branches)
    }

    /// Monomial branches `t -> (c t^a_1, ...)`; an exponent of 0 stands for
    /// the zero coordinate.
    pub fn monomial(n: usize, exps: &[&[u32]]) -> Result<Self, GermError> {
        let coords = exps
            .iter()
            .map(|e| {
                e.iter()
                    .map(|&a| {
                        if a == 0 {
                            UniPoly::zero()
                        } else {
                            UniPoly::monomial(a, F::one())
                        }
                    })
                    .collect()
            })
            .collect();
        Self::from_coords(n, coords)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.branches.len()
    }

    pub fn branches(&self) -> &[Branch<F>] {
        &self.branches
    }

    /// The sub-germ consisting of branch `i` alone.
    pub fn branch_germ(&self, i: usize) -> Self {
        Parametrization {
            n: self.n,
            branches: vec![self.branches[i].clone()],
        }
    }

    /// `phi_i^{(1)}, ..., phi_i^{(n)}` truncated at `trunc`.
    pub fn branch_series(&self, i: usize, trunc: usize) -> Vec<TruncSeries<F>> {
        self.branches[i]
            .coords
            .iter()
            .map(|p| p.to_series(trunc))
            .collect()
    }

    /// The images `phi^(j)` of the coordinate functions, one multiseries per
    /// coordinate.
    pub fn coordinate_images(&self, trunc: usize) -> Vec<MultiSeries<F>> {
        (0..self.n)
            .map(|j| {
                MultiSeries::new(
                    self.branches
                        .iter()
                        .map(|b| b.coords[j].to_series(trunc))
                        .collect(),
                )
            })
            .collect()
    }

    /// The velocity vector `phidot^(j)`, computed from the exact polynomials
    /// so no truncation order is lost.
    pub fn velocity(&self, trunc: usize) -> Vec<MultiSeries<F>> {
        (0..self.n)
            .map(|j| {
                MultiSeries::new(
                    self.branches
                        .iter()
                        .map(|b| b.coords[j].derivative().to_series(trunc))
                        .collect(),
                )
            })
            .collect()
    }

    /// `ord phi_i^(j)`, `None` for the zero coordinate.
    pub fn coordinate_order(&self, i: usize, j: usize) -> Option<u32> {
        self.branches[i].coords[j].order()
    }

    /// Multiplicity of branch `i`: the least coordinate order.
    pub fn branch_multiplicity(&self, i: usize) -> Option<u32> {
        (0..self.n).filter_map(|j| self.coordinate_order(i, j)).min()
    }

    /// Every coordinate of every branch has at most one term, and a common
    /// weight vector makes all branches weighted-homogeneous.
    pub fn is_weighted_monomial(&self) -> bool {
        if self
            .branches
            .iter()
            .any(|b| b.coords.iter().any(|p| p.terms().count() > 1))
        {
            return false;
        }
        type W = Ratio<i64>;
        let mut weights: Vec<Option<W>> = vec![None; self.n];
        loop {
            let mut changed = false;
            for b in &self.branches {
                let exps: Vec<(usize, i64)> = b
                    .coords
                    .iter()
                    .enumerate()
                    .filter_map(|(j, p)| p.order().map(|a| (j, a as i64)))
                    .collect();
                let Some(&(j0, a0)) = exps.iter().find(|(j, _)| weights[*j].is_some()) else {
                    continue;
                };
                let scale = W::from_integer(a0) / weights[j0].unwrap();
                for &(j, a) in &exps {
                    let w = W::from_integer(a) / scale;
                    match weights[j] {
                        Some(old) if old != w => return false,
                        Some(_) => {}
                        None => {
                            weights[j] = Some(w);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                // seed a fresh component, or finish
                let seed = self.branches.iter().find_map(|b| {
                    let mut nz = b
                        .coords
                        .iter()
                        .enumerate()
                        .filter_map(|(j, p)| p.order().map(|a| (j, a)));
                    let first = nz.clone().next();
                    if nz.all(|(j, _)| weights[j].is_none()) {
                        first
                    } else {
                        None
                    }
                });
                match seed {
                    Some((j, a)) => weights[j] = Some(W::from_integer(a as i64)),
                    None => return true,
                }
            }
        }
    }

    /// Applies `x -> A x` to the target, i.e. new coordinate `j` is
    /// `sum_k a[j][k] phi^(k)`.
    pub fn linear_change(&self, a: &[Vec<F>]) -> Self {
        let branches = self
            .branches
            .iter()
            .map(|b| Branch {
                name: b.name.clone(),
                param: b.param.clone(),
                coords: (0..self.n)
                    .map(|j| {
                        let mut p = UniPoly::zero();
                        for (k, c) in a[j].iter().enumerate() {
                            p = p.add(&b.coords[k].scale(c));
                        }
                        p
                    })
                    .collect(),
            })
            .collect();
        Parametrization { n: self.n, branches }
    }

    /// Substitutes `t_i -> lambda_i t_i` branchwise.
    pub fn rescale_params(&self, lambdas: &[F]) -> Self {
        let branches = self
            .branches
            .iter()
            .zip(lambdas)
            .map(|(b, l)| Branch {
                name: b.name.clone(),
                param: b.param.clone(),
                coords: b.coords.iter().map(|p| p.rescale_param(l)).collect(),
            })
            .collect();
        Parametrization { n: self.n, branches }
    }
}

/// Generators `f_1, ..., f_k` of the defining ideal.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealSpec<F> {
    pub names: Vec<String>,
    pub generators: Vec<MultiPoly<F>>,
}

impl<F: Field> IdealSpec<F> {
    pub fn new(n: usize, gens: Vec<(String, MultiPoly<F>)>) -> Result<Self, GermError> {
        if gens.is_empty() {
            return Err(GermError::EmptyIdeal);
        }
        for (name, g) in &gens {
            if g.nvars() != n {
                return Err(GermError::IdealArity {
                    name: name.clone(),
                    expected: n,
                    got: g.nvars(),
                });
            }
            if !g.constant_term().is_zero() {
                return Err(GermError::IdealConstantTerm(name.clone()));
            }
        }
        let (names, generators) = gens.into_iter().unzip();
        Ok(IdealSpec { names, generators })
    }

    pub fn k(&self) -> usize {
        self.generators.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Table,
    Json,
}

/// Truncation schedule and flags for one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOptions {
    /// First truncation order; `None` means `max(8, 4 * mt)`.
    pub trunc_start: Option<usize>,
    pub trunc_max: usize,
    /// Asserted quasihomogeneity (set automatically for weighted-monomial
    /// input).
    pub quasihomogeneous: bool,
    pub format: ReportFormat,
}

pub const DEFAULT_TRUNC_MAX: usize = 512;

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            trunc_start: None,
            trunc_max: DEFAULT_TRUNC_MAX,
            quasihomogeneous: false,
            format: ReportFormat::Table,
        }
    }
}

impl RunOptions {
    pub fn start_for(&self, mt: usize) -> usize {
        self.trunc_start
            .unwrap_or_else(|| (4 * mt).max(8))
            .min(self.trunc_max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance<F> {
    pub phi: Parametrization<F>,
    pub ideal: Option<IdealSpec<F>>,
    pub options: RunOptions,
}
