//! Chain specification: homogeneous couplings plus localized time-dependent impurities.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::profile::TimeProfile;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    Open,
}

/// XY chain with `n_sites` sites labelled `1..=n_sites`.
///
/// Bond `j` couples sites `j` and `j + 1`; on a periodic chain bond `n_sites`
/// closes the ring. Impurity maps are keyed by site (field) or bond
/// (hopping, pairing) label.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    pub n_sites: usize,
    pub boundary: Boundary,
    pub g: f64,
    pub gamma: f64,
    pub h: f64,
    pub impurity_h: BTreeMap<usize, TimeProfile>,
    pub impurity_g: BTreeMap<usize, TimeProfile>,
    pub impurity_gamma: BTreeMap<usize, TimeProfile>,
    pub t0: f64,
    pub t_end: f64,
}

impl ChainSpec {
    pub fn new(n_sites: usize, boundary: Boundary, g: f64, gamma: f64, h: f64) -> Self {
        Self {
            n_sites,
            boundary,
            g,
            gamma,
            h,
            impurity_h: BTreeMap::new(),
            impurity_g: BTreeMap::new(),
            impurity_gamma: BTreeMap::new(),
            t0: 0.0,
            t_end: 1.0,
        }
    }

    pub fn with_window(mut self, t0: f64, t_end: f64) -> Self {
        self.t0 = t0;
        self.t_end = t_end;
        self
    }

    pub fn with_field_impurity(mut self, site: usize, profile: TimeProfile) -> Self {
        self.impurity_h.insert(site, profile);
        self
    }

    pub fn with_hopping_impurity(mut self, bond: usize, profile: TimeProfile) -> Self {
        self.impurity_g.insert(bond, profile);
        self
    }

    pub fn with_pairing_impurity(mut self, bond: usize, profile: TimeProfile) -> Self {
        self.impurity_gamma.insert(bond, profile);
        self
    }

    /// Number of bonds: `n_sites` on a ring, `n_sites - 1` on an open chain.
    pub fn n_bonds(&self) -> usize {
        match self.boundary {
            Boundary::Periodic => self.n_sites,
            Boundary::Open => self.n_sites - 1,
        }
    }

    /// Sites joined by bond `b`.
    pub fn bond_sites(&self, b: usize) -> (usize, usize) {
        (b, if b == self.n_sites { 1 } else { b + 1 })
    }

    pub fn has_bond_impurities(&self) -> bool {
        !self.impurity_g.is_empty() || !self.impurity_gamma.is_empty()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.impurity_h.is_empty() && !self.has_bond_impurities()
    }

    /// Every finite breakpoint of every impurity profile, sorted and deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.profiles().flat_map(|(_, p)| p.breakpoints()).collect();
        all.sort_by(f64::total_cmp);
        all.dedup();
        all
    }

    /// Breakpoints strictly inside `(t0, t_end)`.
    pub fn interior_breakpoints(&self) -> Vec<f64> {
        self.breakpoints().into_iter().filter(|&b| b > self.t0 && b < self.t_end).collect()
    }

    pub(crate) fn profiles(&self) -> impl Iterator<Item = (ImpurityTerm, &TimeProfile)> {
        let h = self.impurity_h.iter().map(|(&s, p)| (ImpurityTerm::Field(s), p));
        let g = self.impurity_g.iter().map(|(&b, p)| (ImpurityTerm::Hopping(b), p));
        let gm = self.impurity_gamma.iter().map(|(&b, p)| (ImpurityTerm::Pairing(b), p));
        h.chain(g).chain(gm)
    }

    /// Structural checks: size, window, labels.
    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::InvalidChain(format!("n_sites = {} (need at least 2)", self.n_sites)));
        }
        if !(self.t0.is_finite() && self.t_end.is_finite() && self.t0 < self.t_end) {
            return Err(Error::InvalidChain(format!(
                "protocol window [{}, {}] is empty or not finite",
                self.t0, self.t_end
            )));
        }
        if ![self.g, self.gamma, self.h].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidChain("non-finite homogeneous coupling".into()));
        }
        for &s in self.impurity_h.keys() {
            if s == 0 || s > self.n_sites {
                return Err(Error::InvalidChain(format!("field impurity at site {s} outside 1..={}", self.n_sites)));
            }
        }
        for &b in self.impurity_g.keys().chain(self.impurity_gamma.keys()) {
            if b == 0 || b > self.n_bonds() {
                return Err(Error::InvalidChain(format!("bond impurity at bond {b} outside 1..={}", self.n_bonds())));
            }
        }
        Ok(())
    }

    pub(crate) fn check_time(&self, t: f64) -> Result<()> {
        let slack = 1e-12 * (1.0 + self.t0.abs().max(self.t_end.abs()));
        if t < self.t0 - slack || t > self.t_end + slack || t.is_nan() {
            return Err(Error::TimeOutOfDomain { t, t0: self.t0, t_end: self.t_end });
        }
        Ok(())
    }
}

/// One localized impurity term with unit amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ImpurityTerm {
    Field(usize),
    Hopping(usize),
    Pairing(usize),
}

/// Momentum grid `q_k = 2 pi k / n`, `k = 1..=n`, stored at index `k - 1`.
///
/// Trigonometric values are symmetrized so that `cos(-q) == cos(q)` and
/// `sin(-q) == -sin(q)` hold bit for bit, and vanish exactly at `q = pi, 2 pi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MomentumGrid {
    n: usize,
}

impl MomentumGrid {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn q(&self, i: usize) -> f64 {
        2.0 * PI * (i + 1) as f64 / self.n as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.q(i)).collect()
    }

    /// Index of `-q_i` on the same grid.
    pub fn neg(&self, i: usize) -> usize {
        (2 * self.n - i - 2) % self.n
    }

    /// `(cos q_i, sin q_i)` with exact symmetry.
    pub fn cos_sin(&self, i: usize) -> (f64, f64) {
        let k = (i + 1) % self.n;
        let (r, sign) = if 2 * k <= self.n { (k, 1.0) } else { (self.n - k, -1.0) };
        if r == 0 {
            return (1.0, 0.0);
        }
        if 2 * r == self.n {
            return (-1.0, 0.0);
        }
        let x = 2.0 * PI * r as f64 / self.n as f64;
        (x.cos(), sign * x.sin())
    }

    /// `exp(i q_i x)` for integer position `x`, reduced exactly modulo the period.
    pub fn phase(&self, i: usize, x: i64) -> C64 {
        let n = self.n as i64;
        let m = (((i as i64 + 1) * x) % n + n) % n;
        let (c, s) = self.cos_sin((m as usize + self.n - 1) % self.n);
        C64::new(c, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negation_is_an_involution() {
        for n in [2usize, 3, 7, 8, 64] {
            let grid = MomentumGrid::new(n);
            for i in 0..n {
                let j = grid.neg(i);
                assert_eq!(grid.neg(j), i);
                let d = (grid.q(i) + grid.q(j)) / (2.0 * PI);
                assert!((d - d.round()).abs() < 1e-12);
                let (ci, si) = grid.cos_sin(i);
                let (cj, sj) = grid.cos_sin(j);
                assert_eq!(ci, cj);
                assert_eq!(si, -sj);
            }
        }
    }

    #[test]
    fn phases_match_exponentials() {
        let grid = MomentumGrid::new(12);
        for i in 0..12 {
            for x in -13..14 {
                let expect = C64::from_polar(1.0, grid.q(i) * x as f64);
                assert!((grid.phase(i, x) - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn validation_catches_bad_labels() {
        let spec =
            ChainSpec::new(4, Boundary::Open, 1.0, 0.0, 0.0).with_pairing_impurity(4, TimeProfile::constant(0.1));
        assert!(matches!(spec.validate(), Err(Error::InvalidChain(_))));
        let spec =
            ChainSpec::new(4, Boundary::Periodic, 1.0, 0.0, 0.0).with_pairing_impurity(4, TimeProfile::constant(0.1));
        assert!(spec.validate().is_ok());
    }
}
