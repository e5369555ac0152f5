//! Discrete magnetic Schrödinger operator with Peierls phases.
//!
//! Units: `ħ = 1`, lattice spacing 1, and the hopping energies `tx`, `ty`
//! absorb `ħ²/(2m)`. The diagonal is `2tx + 2ty + V` everywhere, including
//! next to a wall, which is the Dirichlet discretization of `−∇²`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gauge::GaugeField;
use crate::lattice::{Direction, SiteIndex, StripLattice};

/// Cross-block magnitude above which a Hamiltonian is not reflection
/// symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoppingParams {
    pub tx: f64,
    pub ty: f64,
}

impl Default for HoppingParams {
    fn default() -> Self {
        HoppingParams { tx: 1.0, ty: 1.0 }
    }
}

impl HoppingParams {
    pub fn new(tx: f64, ty: f64) -> Result<Self> {
        if !(tx.is_finite() && tx >= 0.0) {
            return Err(Error::InvalidParameter(format!("tx must be >= 0, got {tx}")));
        }
        if !(ty.is_finite() && ty >= 0.0) {
            return Err(Error::InvalidParameter(format!("ty must be >= 0, got {ty}")));
        }
        Ok(HoppingParams { tx, ty })
    }
}

/// On-site potential, one real value per site.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField {
    pub v: Vec<f64>,
}

impl PotentialField {
    pub fn zero(lat: &StripLattice) -> Self {
        PotentialField {
            v: vec![0.0; lat.num_sites()],
        }
    }

    pub fn new(v: Vec<f64>) -> Result<Self> {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite potential".into()));
        }
        Ok(PotentialField { v })
    }
}

/// Sparse Hermitian matrix in row-compressed form. Both triangles are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHermitian {
    n: usize,
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl SparseHermitian {
    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates.
    /// Both `(r, c, z)` and `(c, r, conj z)` must be supplied.
    pub fn from_triplets(
        n: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Complex64)>,
    ) -> Result<Self> {
        let mut map: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
        for (r, c, z) in triplets {
            if r >= n || c >= n {
                return Err(Error::SizeMismatch {
                    expected: n,
                    got: r.max(c) + 1,
                });
            }
            *map.entry((r, c)).or_default() += z;
        }
        let mut rows = vec![Vec::new(); n];
        for ((r, c), z) in map {
            rows[r].push((c, z));
        }
        Ok(SparseHermitian { n, rows })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, r: usize) -> &[(usize, Complex64)] {
        &self.rows[r]
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |&(c, z)| (r, c, z)))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.rows[r]
            .binary_search_by_key(&c, |&(col, _)| col)
            .map(|k| self.rows[r][k].1)
            .unwrap_or_default()
    }

    /// `y = H x`.
    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.n);
        for (yr, row) in y.iter_mut().zip(&self.rows) {
            *yr = row.iter().map(|&(c, z)| z * x[c]).sum();
        }
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::default(); self.n];
        self.matvec(x, &mut y);
        y
    }

    /// `max |H − H†|` over stored entries.
    pub fn hermitian_defect(&self) -> f64 {
        self.entries()
            .map(|(r, c, z)| (z - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.entries().map(|(_, _, z)| z.norm()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Mat<Complex64> {
        let mut m = Mat::zeros(self.n, self.n);
        for (r, c, z) in self.entries() {
            m[(r, c)] = z;
        }
        m
    }
}

/// Assembles `H = −Σ t·e^{iθ} hop + (2tx + 2ty + V)`.
pub fn assemble(
    lat: &StripLattice,
    field: &GaugeField,
    hop: HoppingParams,
    pot: &PotentialField,
) -> Result<SparseHermitian> {
    let n = lat.num_sites();
    if field.lattice() != lat {
        return Err(Error::SizeMismatch {
            expected: n,
            got: field.lattice().num_sites(),
        });
    }
    if pot.v.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            got: pot.v.len(),
        });
    }
    let onsite = 2.0 * hop.tx + 2.0 * hop.ty;
    let mut triplets = Vec::with_capacity(5 * n);
    for s in lat.sites() {
        let u = lat.index(s);
        triplets.push((u, u, Complex64::new(onsite + pot.v[u], 0.0)));
        for dir in Direction::ALL {
            let t = if dir.is_x() { hop.tx } else { hop.ty };
            if t == 0.0 {
                continue;
            }
            if let Some(nb) = lat.neighbor(s, dir) {
                let theta = field.link_angle(s, dir).expect("neighbor exists");
                triplets.push((u, lat.index(nb), -t * Complex64::from_polar(1.0, theta)));
            }
        }
    }
    SparseHermitian::from_triplets(n, triplets)
}

/// Closed-form spectrum of a single ring (`ny = 1`, `tx = 1`):
/// `2 − 2·cos(2π(k + flux)/nx)` for `k = 0..nx`, sorted ascending.
pub fn ring_spectrum_oracle(nx: usize, flux: f64) -> Vec<f64> {
    let mut e: Vec<f64> = (0..nx)
        .map(|k| 2.0 - 2.0 * (TAU * (k as f64 + flux) / nx as f64).cos())
        .collect();
    e.sort_by(f64::total_cmp);
    e
}

/// The row reflection `R(i, j) = (i, ny − 1 − j)` as a permutation of site
/// indices.
pub fn reflection_permutation(lat: &StripLattice) -> Result<Vec<usize>> {
    lat.center_row()?;
    Ok(lat
        .sites()
        .map(|s| lat.index(SiteIndex::new(s.i, lat.mirror_row(s.j))))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn other(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

/// Orthonormal basis of one reflection-parity subspace. Each column touches
/// at most two sites.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorIsometry {
    parity: Parity,
    full_dim: usize,
    columns: Vec<Vec<(usize, f64)>>,
    // For each site, its column and coefficient (sites off this sector's
    // support, i.e. the center row for the odd sector, have none).
    site_column: Vec<Option<(usize, f64)>>,
}

pub fn sector_isometry(lat: &StripLattice, parity: Parity) -> Result<SectorIsometry> {
    let c = lat.center_row()?;
    let n = lat.num_sites();
    let mut columns = Vec::new();
    for i in 0..lat.nx() {
        for j in 0..c {
            let lo = lat.index(SiteIndex::new(i, j));
            let hi = lat.index(SiteIndex::new(i, lat.mirror_row(j)));
            let sign = match parity {
                Parity::Even => 1.0,
                Parity::Odd => -1.0,
            };
            columns.push(vec![(lo, FRAC_1_SQRT_2), (hi, sign * FRAC_1_SQRT_2)]);
        }
        if parity == Parity::Even {
            columns.push(vec![(lat.index(SiteIndex::new(i, c)), 1.0)]);
        }
    }
    let mut site_column = vec![None; n];
    for (k, col) in columns.iter().enumerate() {
        for &(s, w) in col {
            site_column[s] = Some((k, w));
        }
    }
    Ok(SectorIsometry {
        parity,
        full_dim: n,
        columns,
        site_column,
    })
}

impl SectorIsometry {
    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn full_dim(&self) -> usize {
        self.full_dim
    }

    pub fn columns(&self) -> &[Vec<(usize, f64)>] {
        &self.columns
    }

    /// Embeds a sector vector into the full site space: `B x`.
    pub fn lift(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.dim() {
            return Err(Error::SizeMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let mut out = vec![Complex64::default(); self.full_dim];
        for (col, &xk) in self.columns.iter().zip(x) {
            for &(s, w) in col {
                out[s] += xk * w;
            }
        }
        Ok(out)
    }

    /// Projects a full-space vector onto the sector: `B† v`.
    pub fn project(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.full_dim {
            return Err(Error::SizeMismatch {
                expected: self.full_dim,
                got: v.len(),
            });
        }
        Ok(self
            .columns
            .iter()
            .map(|col| col.iter().map(|&(s, w)| v[s] * w).sum())
            .collect())
    }

    /// Row `r` of `B† H B` restricted to columns of `other`.
    fn block_row(&self, other: &SectorIsometry, h: &SparseHermitian, r: usize) -> BTreeMap<usize, Complex64> {
        let mut acc = BTreeMap::new();
        for &(s, w_row) in &self.columns[r] {
            for &(t, z) in h.row(s) {
                if let Some((k, w_col)) = other.site_column[t] {
                    *acc.entry(k).or_insert(Complex64::default()) += z * (w_row * w_col);
                }
            }
        }
        acc
    }
}

/// Restricts `h` to a parity sector, `B† H B`, after checking that the
/// cross block between the two sectors vanishes.
pub fn restrict(h: &SparseHermitian, iso: &SectorIsometry) -> Result<SparseHermitian> {
    if h.dim() != iso.full_dim {
        return Err(Error::SizeMismatch {
            expected: iso.full_dim,
            got: h.dim(),
        });
    }
    let other = complement(iso);
    let mut cross = 0.0f64;
    for r in 0..iso.dim() {
        for z in iso.block_row(&other, h, r).values() {
            cross = cross.max(z.norm());
        }
    }
    if cross > SYMMETRY_TOL {
        return Err(Error::SymmetryViolation(cross));
    }
    // Upper triangle only, mirrored, so the result is Hermitian bit for bit
    // and the diagonal is real.
    let mut triplets = Vec::new();
    for r in 0..iso.dim() {
        for (c, z) in iso.block_row(iso, h, r) {
            if c == r {
                triplets.push((r, r, Complex64::new(z.re, 0.0)));
            } else if c > r && z != Complex64::default() {
                triplets.push((r, c, z));
                triplets.push((c, r, z.conj()));
            }
        }
    }
    SparseHermitian::from_triplets(iso.dim(), triplets)
}

fn complement(iso: &SectorIsometry) -> SectorIsometry {
    let parity = iso.parity.other();
    let mut columns = Vec::new();
    for col in &iso.columns {
        if col.len() == 2 {
            let (a, wa) = col[0];
            let (b, wb) = col[1];
            columns.push(vec![(a, wa), (b, -wb)]);
        }
    }
    if parity == Parity::Even {
        // Center-row sites are exactly those absent from the odd sector.
        for (s, entry) in iso.site_column.iter().enumerate() {
            if entry.is_none() {
                columns.push(vec![(s, 1.0)]);
            }
        }
    }
    let mut site_column = vec![None; iso.full_dim];
    for (k, col) in columns.iter().enumerate() {
        for &(s, w) in col {
            site_column[s] = Some((k, w));
        }
    }
    SectorIsometry {
        parity,
        full_dim: iso.full_dim,
        columns,
        site_column,
    }
}
