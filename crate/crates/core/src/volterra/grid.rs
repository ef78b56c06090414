use crate::error::{Error, Result};
use crate::model::{MomentumGrid, Side, TimeProfile};
use crate::C64;

/// Uniform time grid `t_m = t0 + m dt` plus the momentum grid `q_k = 2 pi k / n_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct VolterraGrid {
    pub t0: f64,
    pub dt: f64,
    pub n_steps: usize,
    pub q: Vec<f64>,
}

impl VolterraGrid {
    /// Fails unless `t_end - t0` is an integer multiple of `dt`.
    pub fn new(t0: f64, t_end: f64, dt: f64, n_q: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidStep(format!("dt = {dt}")));
        }
        if !(t_end > t0) {
            return Err(Error::GridMismatch(format!("empty window [{t0}, {t_end}]")));
        }
        if n_q == 0 {
            return Err(Error::GridMismatch("momentum grid is empty".into()));
        }
        let ratio = (t_end - t0) / dt;
        let n_steps = ratio.round();
        if (ratio - n_steps).abs() > 1e-9 * ratio.max(1.0) || n_steps < 1.0 {
            return Err(Error::GridMismatch(format!("window length {} is not a multiple of dt = {dt}", t_end - t0)));
        }
        Ok(Self { t0, dt, n_steps: n_steps as usize, q: MomentumGrid::new(n_q).values() })
    }

    pub fn n_q(&self) -> usize {
        self.q.len()
    }

    pub fn n_times(&self) -> usize {
        self.n_steps + 1
    }

    pub fn time(&self, m: usize) -> f64 {
        self.t0 + m as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.n_steps)
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_times()).map(|m| self.time(m)).collect()
    }

    pub(crate) fn cos_q(&self) -> Vec<f64> {
        let grid = MomentumGrid::new(self.n_q());
        (0..self.n_q()).map(|i| grid.cos_sin(i).0).collect()
    }

    /// Every breakpoint of `profile` inside the window must sit on a node.
    pub(crate) fn check_breakpoints(&self, profile: &TimeProfile) -> Result<()> {
        for b in profile.breakpoints() {
            if b > self.t0 && b < self.t_end() {
                let m = (b - self.t0) / self.dt;
                if (m - m.round()).abs() > 1e-9 * m.max(1.0) {
                    return Err(Error::GridMismatch(format!("profile breakpoint t = {b} is not a grid node")));
                }
            }
        }
        Ok(())
    }

    /// Product-trapezoid weights: node `m` carries `dt (c(t_m+) + c(t_m-)) / 2` in the
    /// history sums, node 0 carries `dt c(t0+) / 2`. Returns `(history, endpoint)`
    /// where `endpoint[m] = dt c(t_m-) / 2` is the weight of the newest node.
    pub(crate) fn weights(&self, profile: &TimeProfile) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_breakpoints(profile)?;
        let n = self.n_times();
        let mut hist = vec![0.0; n];
        let mut end = vec![0.0; n];
        for m in 0..n {
            let t = self.time(m);
            let right = if m + 1 < n { profile.value(t, Side::Right)? } else { 0.0 };
            let left = if m > 0 { profile.value(t, Side::Left)? } else { 0.0 };
            hist[m] = 0.5 * self.dt * (right + if m > 0 { left } else { 0.0 });
            end[m] = 0.5 * self.dt * left;
        }
        Ok((hist, end))
    }
}

/// Amplitudes on the grid, stored momentum-major: entry `(q, m)` at `q * n_times + m`.
#[derive(Debug, Clone, PartialEq)]
pub struct XTable {
    pub grid: VolterraGrid,
    pub values: Vec<C64>,
}

impl XTable {
    pub fn get(&self, q: usize, m: usize) -> C64 {
        self.values[q * self.grid.n_times() + m]
    }
}

/// Site amplitudes `X_k(q; t)` and, when pairing is present, `Y_k(q; t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VolterraSolution {
    pub grid: VolterraGrid,
    pub sites: Vec<i64>,
    x: Vec<Vec<C64>>,
    y: Option<Vec<Vec<C64>>>,
}

impl VolterraSolution {
    pub(crate) fn new(grid: VolterraGrid, sites: Vec<i64>, x: Vec<Vec<C64>>, y: Option<Vec<Vec<C64>>>) -> Self {
        Self { grid, sites, x, y }
    }

    fn index(&self, site: i64) -> Result<usize> {
        self.sites
            .iter()
            .position(|&s| s == site)
            .ok_or_else(|| Error::DimensionMismatch(format!("site {site} was not solved for")))
    }

    /// `X_site(q; t_m)` at `q * n_times + m`.
    pub fn x_table(&self, site: i64) -> Result<&[C64]> {
        Ok(&self.x[self.index(site)?])
    }

    /// `Y_site(q; t_m)`, `None` when the solution has no hole component.
    pub fn y_table(&self, site: i64) -> Option<&[C64]> {
        let i = self.index(site).ok()?;
        self.y.as_ref().map(|y| y[i].as_slice())
    }

    pub fn x(&self, site: i64, q: usize, m: usize) -> Result<C64> {
        Ok(self.x_table(site)?[q * self.grid.n_times() + m])
    }

    pub fn y(&self, site: i64, q: usize, m: usize) -> Result<C64> {
        Ok(self.y_table(site).map_or(C64::new(0.0, 0.0), |y| y[q * self.grid.n_times() + m]))
    }
}
