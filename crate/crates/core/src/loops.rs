//! Random closed walks, used to probe homology invariance and the Stokes
//! identity.

use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::{Direction, LinkStep, LoopPath, SiteIndex, StripLattice};

/// Rows a random loop may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowBand {
    /// Any row.
    All,
    /// Every row except the center row of an odd-width lattice.
    AvoidCenter,
}

impl RowBand {
    fn allows(self, lat: &StripLattice, j: usize) -> bool {
        match self {
            RowBand::All => true,
            RowBand::AvoidCenter => lat.ny() % 2 == 0 || j != (lat.ny() - 1) / 2,
        }
    }

    /// Inclusive range of rows reachable from `j` by y-steps inside the band.
    fn reach(self, lat: &StripLattice, j: usize) -> (usize, usize) {
        let mut lo = j;
        while lo > 0 && self.allows(lat, lo - 1) {
            lo -= 1;
        }
        let mut hi = j;
        while hi + 1 < lat.ny() && self.allows(lat, hi + 1) {
            hi += 1;
        }
        (lo, hi)
    }
}

struct Walker<'a> {
    lat: &'a StripLattice,
    at: SiteIndex,
    steps: Vec<LinkStep>,
}

impl Walker<'_> {
    fn step(&mut self, dir: Direction) {
        let next = self.lat.neighbor(self.at, dir).expect("walker stays on the strip");
        self.steps.push(LinkStep::new(self.at, dir));
        self.at = next;
    }

    fn move_to_row(&mut self, j: usize) {
        while self.at.j < j {
            self.step(Direction::PlusY);
        }
        while self.at.j > j {
            self.step(Direction::MinusY);
        }
    }
}

/// A random loop going `turns` times around the ring in the `+x` sense,
/// wandering across rows inside `band` and taking occasional back-and-forth
/// detours along `x`.
///
/// On a Möbius lattice with [`RowBand::AvoidCenter`], `turns` must be even.
pub fn random_winding_loop<R: Rng>(
    lat: &StripLattice,
    rng: &mut R,
    turns: usize,
    band: RowBand,
) -> Result<LoopPath> {
    if turns == 0 {
        return Err(Error::InvalidParameter("turns must be positive".into()));
    }
    let rows: Vec<usize> = (0..lat.ny()).filter(|&j| band.allows(lat, j)).collect();
    let j0 = rows[rng.random_range(0..rows.len())];
    let mut w = Walker {
        lat,
        at: SiteIndex::new(0, j0),
        steps: Vec::new(),
    };
    for _ in 0..turns * lat.nx() {
        if rng.random_bool(0.5) {
            let (lo, hi) = band.reach(lat, w.at.j);
            w.move_to_row(rng.random_range(lo..=hi));
        }
        if rng.random_bool(0.2) {
            let (there, back) = if rng.random_bool(0.5) {
                (Direction::PlusX, Direction::MinusX)
            } else {
                (Direction::MinusX, Direction::PlusX)
            };
            w.step(there);
            w.step(back);
        }
        w.step(Direction::PlusX);
    }
    let (lo, hi) = band.reach(lat, w.at.j);
    if !(lo..=hi).contains(&j0) {
        return Err(Error::InvalidParameter(format!(
            "{turns} turns cannot close inside the band from row {j0}"
        )));
    }
    w.move_to_row(j0);
    LoopPath::new(lat, w.steps)
}

/// Boundary of a random rectangle of faces inside `band`, traversed in its
/// own chart (so it may straddle a flipping seam). Homology class 0.
pub fn random_rectangle_loop<R: Rng>(
    lat: &StripLattice,
    rng: &mut R,
    band: RowBand,
) -> Result<LoopPath> {
    if lat.ny() < 2 {
        return Err(Error::InvalidParameter("need at least two rows".into()));
    }
    for _ in 0..1000 {
        let j0 = rng.random_range(0..lat.ny() - 1);
        if !band.allows(lat, j0) {
            continue;
        }
        let (_, hi) = band.reach(lat, j0);
        if hi == j0 {
            continue;
        }
        let height = rng.random_range(1..=hi - j0);
        let width = rng.random_range(1..lat.nx());
        let start = SiteIndex::new(rng.random_range(0..lat.nx()), j0);
        let mut w = Walker {
            lat,
            at: start,
            steps: Vec::new(),
        };
        let mut flipped = false;
        for _ in 0..width {
            if lat.seam_flips() && lat.crosses_seam(w.at, Direction::PlusX) {
                flipped = !flipped;
            }
            w.step(Direction::PlusX);
        }
        let up = if flipped { Direction::MinusY } else { Direction::PlusY };
        for _ in 0..height {
            w.step(up);
        }
        for _ in 0..width {
            w.step(Direction::MinusX);
        }
        for _ in 0..height {
            w.step(Direction::MinusY);
        }
        return LoopPath::new(lat, w.steps);
    }
    Err(Error::InvalidParameter("no room for a rectangle in this band".into()))
}
