//! Flux sweeps and the quantization experiments built on them.
//!
//! The even reflection sector holds states that are nonzero on the center
//! curve; the odd sector holds the nodal states that vanish there.

use crate::eigensolver::{dense_eigenvalues, solve_lowest, EigenResult, Method, SolverConfig};
use crate::error::{Error, Result};
use crate::gauge::uniform_flux_field;
use crate::hamiltonian::{
    assemble, restrict, sector_isometry, HoppingParams, Parity, PotentialField, SparseHermitian,
};
use crate::lattice::{SiteIndex, StripLattice, StripTopology};
use crate::parallel::{ordered_map, Execution};
use num_complex::Complex64;

/// Values closer than this count as equal when looking for plateaus.
pub const PLATEAU_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    Full,
    Even,
    Odd,
}

impl std::str::FromStr for Sector {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "full" => Ok(Sector::Full),
            "even" => Ok(Sector::Even),
            "odd" => Ok(Sector::Odd),
            other => Err(format!("unknown sector `{other}` (expected full, even or odd)")),
        }
    }
}

impl std::fmt::Display for Sector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sector::Full => "full",
            Sector::Even => "even",
            Sector::Odd => "odd",
        })
    }
}

/// Which sectors a sweep solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SectorSet {
    pub full: bool,
    pub even: bool,
    pub odd: bool,
}

impl SectorSet {
    pub const ALL: SectorSet = SectorSet {
        full: true,
        even: true,
        odd: true,
    };

    pub fn from_sectors(sectors: &[Sector]) -> Self {
        SectorSet {
            full: sectors.contains(&Sector::Full),
            even: sectors.contains(&Sector::Even),
            odd: sectors.contains(&Sector::Odd),
        }
    }

    pub fn is_empty(&self) -> bool {
        !(self.full || self.even || self.odd)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub nx: usize,
    pub ny: usize,
    pub topology: StripTopology,
    pub hop: HoppingParams,
    pub f_min: f64,
    pub f_max: f64,
    pub f_steps: usize,
    /// `solver.k` eigenpairs are computed in the full sector.
    pub solver: SolverConfig,
    pub sectors: SectorSet,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            nx: 48,
            ny: 9,
            topology: StripTopology::Moebius,
            hop: HoppingParams::default(),
            f_min: -0.25,
            f_max: 1.25,
            f_steps: 151,
            solver: SolverConfig::default(),
            sectors: SectorSet::ALL,
        }
    }
}

impl SweepConfig {
    pub fn lattice(&self) -> Result<StripLattice> {
        StripLattice::new(self.nx, self.ny, self.topology)
    }

    pub fn validate(&self) -> Result<StripLattice> {
        let lat = self.lattice()?;
        HoppingParams::new(self.hop.tx, self.hop.ty)?;
        if !(self.f_min.is_finite() && self.f_max.is_finite() && self.f_min < self.f_max) {
            return Err(Error::InvalidSweep(format!(
                "need f_min < f_max, got [{}, {}]",
                self.f_min, self.f_max
            )));
        }
        if self.f_steps < 2 {
            return Err(Error::InvalidSweep("f_steps must be at least 2".into()));
        }
        if self.sectors.is_empty() {
            return Err(Error::InvalidSweep("no sectors requested".into()));
        }
        if (self.sectors.even || self.sectors.odd) && self.ny % 2 == 0 {
            return Err(Error::InvalidSweep(format!(
                "parity sectors need odd ny, got {}",
                self.ny
            )));
        }
        if self.solver.k == 0 || self.solver.k > lat.num_sites() {
            return Err(Error::InvalidSweep(format!(
                "k = {} must be in 1..={}",
                self.solver.k,
                lat.num_sites()
            )));
        }
        if !(self.solver.tol > 0.0) {
            return Err(Error::InvalidSweep("tol must be positive".into()));
        }
        Ok(lat)
    }

    /// Evenly spaced flux values from `f_min` to `f_max`, both included.
    pub fn flux_grid(&self) -> Vec<f64> {
        flux_grid(self.f_min, self.f_max, self.f_steps)
    }
}

/// `steps` evenly spaced values; written as a weighted mean so that grid
/// points landing on exact multiples of the spacing come out exact.
pub fn flux_grid(f_min: f64, f_max: f64, steps: usize) -> Vec<f64> {
    let last = (steps - 1) as f64;
    (0..steps)
        .map(|k| (f_min * (last - k as f64) + f_max * k as f64) / last)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum RecordStatus {
    Ok,
    Failed(String),
}

impl RecordStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, RecordStatus::Ok)
    }
}

/// One flux point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub f: f64,
    pub e0_full: Option<f64>,
    pub e0_even: Option<f64>,
    pub e0_odd: Option<f64>,
    /// `e1_full − e0_full`.
    pub gap: Option<f64>,
    /// Largest `|ψ₀|` on the center row for the full ground state.
    pub node_amp: Option<f64>,
    /// `−dE0_full/df` by central difference.
    pub current: Option<f64>,
    pub status: RecordStatus,
}

impl SweepRecord {
    fn failed(f: f64, err: &Error) -> Self {
        SweepRecord {
            f,
            e0_full: None,
            e0_even: None,
            e0_odd: None,
            gap: None,
            node_amp: None,
            current: None,
            status: RecordStatus::Failed(err.to_string()),
        }
    }

    pub fn energy(&self, column: EnergyColumn) -> Option<f64> {
        match column {
            EnergyColumn::Full => self.e0_full,
            EnergyColumn::Even => self.e0_even,
            EnergyColumn::Odd => self.e0_odd,
        }
    }
}

pub type EnergyColumn = Sector;

/// Assembles the Hamiltonian at flux `f` with zero potential.
pub fn hamiltonian_at(lat: &StripLattice, hop: HoppingParams, f: f64) -> Result<SparseHermitian> {
    assemble(lat, &uniform_flux_field(lat, f), hop, &PotentialField::zero(lat))
}

/// Hamiltonian restricted to a sector (`Full` returns it unchanged).
pub fn sector_hamiltonian(
    lat: &StripLattice,
    hop: HoppingParams,
    f: f64,
    sector: Sector,
) -> Result<SparseHermitian> {
    let h = hamiltonian_at(lat, hop, f)?;
    match sector {
        Sector::Full => Ok(h),
        Sector::Even => restrict(&h, &sector_isometry(lat, Parity::Even)?),
        Sector::Odd => restrict(&h, &sector_isometry(lat, Parity::Odd)?),
    }
}

/// All eigenvalues of a sector at flux `f`, ascending (dense).
pub fn sector_spectrum(lat: &StripLattice, hop: HoppingParams, f: f64, sector: Sector) -> Result<Vec<f64>> {
    dense_eigenvalues(&sector_hamiltonian(lat, hop, f, sector)?)
}

fn lowest_value(h: &SparseHermitian, solver: &SolverConfig) -> Result<f64> {
    let dense = match solver.method {
        Method::Dense => true,
        Method::Lanczos => false,
        Method::Auto => h.dim() <= crate::eigensolver::AUTO_DENSE_LIMIT,
    };
    if dense {
        Ok(dense_eigenvalues(h)?[0])
    } else {
        let cfg = SolverConfig { k: 1, ..*solver };
        Ok(solve_lowest(h, &cfg)?.values[0])
    }
}

fn evaluate_point(cfg: &SweepConfig, lat: &StripLattice, f: f64) -> Result<SweepRecord> {
    let h = hamiltonian_at(lat, cfg.hop, f)?;
    let mut rec = SweepRecord {
        f,
        e0_full: None,
        e0_even: None,
        e0_odd: None,
        gap: None,
        node_amp: None,
        current: None,
        status: RecordStatus::Ok,
    };
    if cfg.sectors.full {
        let res: EigenResult = solve_lowest(&h, &cfg.solver)?;
        rec.e0_full = Some(res.values[0]);
        rec.gap = res.values.get(1).map(|e1| e1 - res.values[0]);
        if lat.ny() % 2 == 1 {
            rec.node_amp = Some(nodal_amplitude(&res.vectors[0], lat)?);
        }
    }
    if cfg.sectors.even {
        let he = restrict(&h, &sector_isometry(lat, Parity::Even)?)?;
        rec.e0_even = Some(lowest_value(&he, &cfg.solver)?);
    }
    if cfg.sectors.odd {
        let ho = restrict(&h, &sector_isometry(lat, Parity::Odd)?)?;
        rec.e0_odd = Some(lowest_value(&ho, &cfg.solver)?);
    }
    Ok(rec)
}

/// Sweeps the uniform flux over the configured grid. Points are evaluated
/// independently (in parallel when available) and returned in grid order.
/// A point whose solve fails is kept with a `Failed` status.
pub fn flux_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    flux_sweep_with(cfg, Execution::default())
}

pub fn flux_sweep_with(cfg: &SweepConfig, exec: Execution) -> Result<Vec<SweepRecord>> {
    let lat = cfg.validate()?;
    let grid = cfg.flux_grid();
    let mut records = ordered_map(&grid, exec, |&f| {
        evaluate_point(cfg, &lat, f).unwrap_or_else(|e| SweepRecord::failed(f, &e))
    });
    if records.len() >= 3 && cfg.sectors.full {
        let current = persistent_current(&records)?;
        for (r, c) in records.iter_mut().zip(current) {
            r.current = c;
        }
    }
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuantizationMode {
    /// Allowed flux values are multiples of 1.
    Integer,
    /// Allowed flux values are multiples of 1/2.
    HalfInteger,
}

impl QuantizationMode {
    pub fn unit(self) -> f64 {
        match self {
            QuantizationMode::Integer => 1.0,
            QuantizationMode::HalfInteger => 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizedMinimum {
    /// Refined location of the minimum.
    pub f: f64,
    /// Grid point (or plateau midpoint) the minimum was found at.
    pub grid_f: f64,
    pub nearest_allowed: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantizationReport {
    pub column: EnergyColumn,
    pub mode: QuantizationMode,
    pub minima: Vec<QuantizedMinimum>,
}

impl QuantizationReport {
    pub fn minima_f(&self) -> Vec<f64> {
        self.minima.iter().map(|m| m.f).collect()
    }
}

/// Vertex of the parabola through three points.
fn parabola_vertex((xa, ya): (f64, f64), (xb, yb): (f64, f64), (xc, yc): (f64, f64)) -> f64 {
    let num = (xb - xa).powi(2) * (yb - yc) - (xb - xc).powi(2) * (yb - ya);
    let den = (xb - xa) * (yb - yc) - (xb - xc) * (yb - ya);
    if den == 0.0 {
        xb
    } else {
        xb - 0.5 * num / den
    }
}

/// Interior strict local minima of one energy column.
///
/// A run of values equal within [`PLATEAU_TOL`] counts as a single minimum at
/// its midpoint; isolated minima are refined by three-point parabolic
/// interpolation. Records missing the column are skipped.
pub fn detect_minima(
    records: &[SweepRecord],
    column: EnergyColumn,
    mode: QuantizationMode,
) -> Result<QuantizationReport> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter_map(|r| r.energy(column).map(|e| (r.f, e)))
        .collect();
    if pts.len() < 3 {
        return Err(Error::TooFewPoints(pts.len()));
    }
    let unit = mode.unit();
    let mut minima = Vec::new();
    let mut a = 0;
    while a < pts.len() {
        let mut b = a;
        while b + 1 < pts.len() && (pts[b + 1].1 - pts[a].1).abs() <= PLATEAU_TOL {
            b += 1;
        }
        let interior = a > 0 && b + 1 < pts.len();
        if interior && pts[a - 1].1 > pts[a].1 && pts[b + 1].1 > pts[b].1 {
            let grid_f = 0.5 * (pts[a].0 + pts[b].0);
            let f = if a == b {
                parabola_vertex(pts[a - 1], pts[a], pts[a + 1])
            } else {
                grid_f
            };
            let nearest_allowed = (f / unit).round() * unit;
            minima.push(QuantizedMinimum {
                f,
                grid_f,
                nearest_allowed,
                distance: (f - nearest_allowed).abs(),
            });
        }
        a = b + 1;
    }
    Ok(QuantizationReport {
        column,
        mode,
        minima,
    })
}

/// Largest `|ψ|` over center-row sites.
pub fn nodal_amplitude(state: &[Complex64], lat: &StripLattice) -> Result<f64> {
    let c = lat.center_row()?;
    if state.len() != lat.num_sites() {
        return Err(Error::SizeMismatch {
            expected: lat.num_sites(),
            got: state.len(),
        });
    }
    Ok((0..lat.nx())
        .map(|i| state[lat.index(SiteIndex::new(i, c))].norm())
        .fold(0.0, f64::max))
}

/// `−dE0_full/df` by central difference; `None` at the ends of the grid and
/// next to records without a full-sector energy.
pub fn persistent_current(records: &[SweepRecord]) -> Result<Vec<Option<f64>>> {
    if records.len() < 3 {
        return Err(Error::TooFewPoints(records.len()));
    }
    let step = records[1].f - records[0].f;
    let uniform = step > 0.0
        && records
            .windows(2)
            .all(|w| ((w[1].f - w[0].f) - step).abs() <= 1e-9 * step.abs());
    if !uniform {
        return Err(Error::NonUniformGrid);
    }
    Ok((0..records.len())
        .map(|k| {
            if k == 0 || k + 1 == records.len() {
                return None;
            }
            let lo = records[k - 1].e0_full?;
            let hi = records[k + 1].e0_full?;
            Some(-(hi - lo) / (records[k + 1].f - records[k - 1].f))
        })
        .collect())
}

fn max_deviation(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderReport {
    /// Largest spectral difference between `f` and `f + 1/2` over the grid.
    pub half_shift_deviation: f64,
    /// Largest spectral difference between `f` and `f + 1` over the grid.
    pub full_shift_deviation: f64,
}

impl LadderReport {
    /// Smallest of `1/2`, `1` under which the spectrum is periodic to `tol`.
    pub fn period(&self, tol: f64) -> Option<f64> {
        if self.half_shift_deviation <= tol {
            Some(0.5)
        } else if self.full_shift_deviation <= tol {
            Some(1.0)
        } else {
            None
        }
    }
}

/// Flux periodicity of the two-leg Möbius ladder (`ny = 2`) with rung
/// hopping `ty`. With `ty = 0` the legs join into one ring of length `2·nx`
/// threaded twice by the flux, so the spectrum repeats every half quantum.
pub fn ladder_periodicity_test(nx: usize, f_grid: &[f64], ty: f64) -> Result<LadderReport> {
    let lat = StripLattice::new(nx, 2, StripTopology::Moebius)?;
    let hop = HoppingParams::new(1.0, ty)?;
    let mut half = 0.0f64;
    let mut full = 0.0f64;
    for &f in f_grid {
        let base = sector_spectrum(&lat, hop, f, Sector::Full)?;
        half = half.max(max_deviation(&base, &sector_spectrum(&lat, hop, f + 0.5, Sector::Full)?));
        full = full.max(max_deviation(&base, &sector_spectrum(&lat, hop, f + 1.0, Sector::Full)?));
    }
    Ok(LadderReport {
        half_shift_deviation: half,
        full_shift_deviation: full,
    })
}

/// Largest entrywise gap, over `f_grid`, between the odd-sector spectrum of
/// the Möbius lattice `(nx, ny)` at flux `f` and the spectrum of the annulus
/// `(nx, (ny − 1)/2)` at flux `f + 1/2`.
pub fn annulus_equivalence_check(
    nx: usize,
    ny: usize,
    f_grid: &[f64],
    hop: HoppingParams,
) -> Result<f64> {
    annulus_equivalence_on(&StripLattice::new(nx, ny, StripTopology::Moebius)?, f_grid, hop)
}

/// As [`annulus_equivalence_check`], for a prebuilt Möbius lattice.
pub fn annulus_equivalence_on(moebius: &StripLattice, f_grid: &[f64], hop: HoppingParams) -> Result<f64> {
    let ny = moebius.ny();
    if ny < 3 || ny % 2 == 0 {
        return Err(Error::EvenRows(ny));
    }
    let annulus = StripLattice::new(moebius.nx(), (ny - 1) / 2, StripTopology::Annulus)?;
    let mut worst = 0.0f64;
    for &f in f_grid {
        let odd = sector_spectrum(moebius, hop, f, Sector::Odd)?;
        let shifted = sector_spectrum(&annulus, hop, f + 0.5, Sector::Full)?;
        if odd.len() != shifted.len() {
            return Err(Error::SizeMismatch {
                expected: odd.len(),
                got: shifted.len(),
            });
        }
        worst = worst.max(max_deviation(&odd, &shifted));
    }
    Ok(worst)
}
