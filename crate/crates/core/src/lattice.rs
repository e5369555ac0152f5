//! Discretized strip `[0, ℓ) × [−w, w]` with annulus or Möbius gluing.
//!
//! Sites are `(i, j)` with `i` running around the ring (`0..nx`) and `j`
//! running across the strip (`0..ny`). Rows `j = 0` and `j = ny − 1` are
//! Dirichlet walls: there is no site beyond them. The seam joins column
//! `nx − 1` to column `0`; on a Möbius lattice a `+x` step across it maps row
//! `j` to row `ny − 1 − j`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StripTopology {
    Annulus,
    Moebius,
}

impl fmt::Display for StripTopology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StripTopology::Annulus => f.write_str("annulus"),
            StripTopology::Moebius => f.write_str("moebius"),
        }
    }
}

impl std::str::FromStr for StripTopology {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "annulus" => Ok(StripTopology::Annulus),
            "moebius" | "mobius" | "möbius" => Ok(StripTopology::Moebius),
            other => Err(format!("unknown topology `{other}` (expected annulus or moebius)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SiteIndex {
    pub i: usize,
    pub j: usize,
}

impl SiteIndex {
    pub const fn new(i: usize, j: usize) -> Self {
        SiteIndex { i, j }
    }
}

impl fmt::Display for SiteIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    PlusX,
    MinusX,
    PlusY,
    MinusY,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::PlusX,
        Direction::MinusX,
        Direction::PlusY,
        Direction::MinusY,
    ];

    pub fn reverse(self) -> Direction {
        match self {
            Direction::PlusX => Direction::MinusX,
            Direction::MinusX => Direction::PlusX,
            Direction::PlusY => Direction::MinusY,
            Direction::MinusY => Direction::PlusY,
        }
    }

    pub fn is_x(self) -> bool {
        matches!(self, Direction::PlusX | Direction::MinusX)
    }

    /// Mirror image under `y ↦ −y`.
    pub fn flip_y(self) -> Direction {
        match self {
            Direction::PlusY => Direction::MinusY,
            Direction::MinusY => Direction::PlusY,
            d => d,
        }
    }
}

/// A rectangular strip lattice. Immutable after construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StripLattice {
    nx: usize,
    ny: usize,
    topology: StripTopology,
    broken_seam: bool,
}

/// Builds a lattice with `nx` sites around the ring and `ny` across.
pub fn build_lattice(nx: usize, ny: usize, topology: StripTopology) -> Result<StripLattice> {
    StripLattice::new(nx, ny, topology)
}

impl StripLattice {
    pub fn new(nx: usize, ny: usize, topology: StripTopology) -> Result<Self> {
        if nx < 3 || ny < 1 {
            return Err(Error::DimensionTooSmall { nx, ny });
        }
        Ok(StripLattice {
            nx,
            ny,
            topology,
            broken_seam: false,
        })
    }

    /// Mutation hook for the self-check suite: a Möbius lattice whose seam
    /// forgets the row flip. Everything downstream that depends on the twist
    /// should then fail.
    #[doc(hidden)]
    pub fn with_broken_seam(mut self) -> Self {
        self.broken_seam = true;
        self
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn topology(&self) -> StripTopology {
        self.topology
    }

    pub fn num_sites(&self) -> usize {
        self.nx * self.ny
    }

    /// Whether a `+x` step across the seam maps row `j` to `ny − 1 − j`.
    pub fn seam_flips(&self) -> bool {
        self.topology == StripTopology::Moebius && !self.broken_seam
    }

    /// The center row `(ny − 1) / 2`, which discretizes the curve `y = 0`.
    pub fn center_row(&self) -> Result<usize> {
        if self.ny % 2 == 0 {
            Err(Error::EvenRows(self.ny))
        } else {
            Ok((self.ny - 1) / 2)
        }
    }

    pub fn contains(&self, s: SiteIndex) -> bool {
        s.i < self.nx && s.j < self.ny
    }

    pub fn index(&self, s: SiteIndex) -> usize {
        debug_assert!(self.contains(s));
        s.i * self.ny + s.j
    }

    pub fn site(&self, index: usize) -> SiteIndex {
        SiteIndex::new(index / self.ny, index % self.ny)
    }

    pub fn sites(&self) -> impl Iterator<Item = SiteIndex> + '_ {
        (0..self.nx).flat_map(move |i| (0..self.ny).map(move |j| SiteIndex::new(i, j)))
    }

    fn flip_row(&self, j: usize) -> usize {
        if self.seam_flips() {
            self.ny - 1 - j
        } else {
            j
        }
    }

    /// Row reflection `j ↦ ny − 1 − j`.
    pub fn mirror_row(&self, j: usize) -> usize {
        self.ny - 1 - j
    }

    /// Neighbor of `s` in direction `dir`, or `None` at a Dirichlet wall.
    pub fn neighbor(&self, s: SiteIndex, dir: Direction) -> Option<SiteIndex> {
        debug_assert!(self.contains(s));
        match dir {
            Direction::PlusX if s.i + 1 == self.nx => Some(SiteIndex::new(0, self.flip_row(s.j))),
            Direction::PlusX => Some(SiteIndex::new(s.i + 1, s.j)),
            Direction::MinusX if s.i == 0 => {
                Some(SiteIndex::new(self.nx - 1, self.flip_row(s.j)))
            }
            Direction::MinusX => Some(SiteIndex::new(s.i - 1, s.j)),
            Direction::PlusY if s.j + 1 == self.ny => None,
            Direction::PlusY => Some(SiteIndex::new(s.i, s.j + 1)),
            Direction::MinusY if s.j == 0 => None,
            Direction::MinusY => Some(SiteIndex::new(s.i, s.j - 1)),
        }
    }

    /// Whether stepping from `s` in `dir` crosses the seam (and, on a Möbius
    /// lattice, flips the local `y` orientation).
    pub fn crosses_seam(&self, s: SiteIndex, dir: Direction) -> bool {
        match dir {
            Direction::PlusX => s.i + 1 == self.nx,
            Direction::MinusX => s.i == 0,
            _ => false,
        }
    }

    /// All undirected links as `(site, dir)` with `dir ∈ {+x, +y}`.
    pub fn links(&self) -> impl Iterator<Item = (SiteIndex, Direction)> + '_ {
        self.sites().flat_map(move |s| {
            let y = (s.j + 1 < self.ny).then_some((s, Direction::PlusY));
            std::iter::once((s, Direction::PlusX)).chain(y)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LinkStep {
    pub site: SiteIndex,
    pub dir: Direction,
}

impl LinkStep {
    pub const fn new(site: SiteIndex, dir: Direction) -> Self {
        LinkStep { site, dir }
    }
}

/// A closed directed walk on a lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopPath {
    steps: Vec<LinkStep>,
}

impl LoopPath {
    /// Validates that `steps` chain and close on `lat`.
    pub fn new(lat: &StripLattice, steps: Vec<LinkStep>) -> Result<Self> {
        let path = LoopPath { steps };
        path.validate(lat)?;
        Ok(path)
    }

    /// Builds a loop by walking `dirs` from `start`.
    pub fn walk(lat: &StripLattice, start: SiteIndex, dirs: &[Direction]) -> Result<Self> {
        if !lat.contains(start) {
            return Err(Error::InvalidLoop(format!("start {start} outside lattice")));
        }
        let mut steps = Vec::with_capacity(dirs.len());
        let mut at = start;
        for (k, &dir) in dirs.iter().enumerate() {
            steps.push(LinkStep::new(at, dir));
            at = lat.neighbor(at, dir).ok_or_else(|| {
                Error::InvalidLoop(format!("step {k} from {at} in {dir:?} leaves the strip"))
            })?;
        }
        LoopPath::new(lat, steps)
    }

    pub fn steps(&self) -> &[LinkStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Sites visited, one per step (the origin of each step).
    pub fn sites(&self) -> impl Iterator<Item = SiteIndex> + '_ {
        self.steps.iter().map(|s| s.site)
    }

    pub fn validate(&self, lat: &StripLattice) -> Result<()> {
        let Some(first) = self.steps.first() else {
            return Err(Error::InvalidLoop("empty loop".into()));
        };
        let mut expected = first.site;
        for (k, step) in self.steps.iter().enumerate() {
            if !lat.contains(step.site) {
                return Err(Error::InvalidLoop(format!("step {k} at {} outside lattice", step.site)));
            }
            if step.site != expected {
                return Err(Error::InvalidLoop(format!(
                    "step {k} starts at {} but previous step ended at {expected}",
                    step.site
                )));
            }
            expected = lat.neighbor(step.site, step.dir).ok_or_else(|| {
                Error::InvalidLoop(format!("step {k} from {} leaves the strip", step.site))
            })?;
        }
        if expected != first.site {
            return Err(Error::InvalidLoop(format!(
                "not closed: ends at {expected}, starts at {}",
                first.site
            )));
        }
        Ok(())
    }
}

/// The `nx`-step loop of `+x` moves along the center row (the curve `C`).
pub fn center_loop(lat: &StripLattice) -> Result<LoopPath> {
    let c = lat.center_row()?;
    LoopPath::walk(lat, SiteIndex::new(0, c), &vec![Direction::PlusX; lat.nx()])
}

/// The loop of `+x` moves starting at `(0, j)`.
///
/// On a Möbius lattice an off-center row only closes after going around twice
/// (`2·nx` steps, the curve `C′`); on an annulus it closes after `nx` steps.
pub fn offset_loop(lat: &StripLattice, j: usize) -> Result<LoopPath> {
    if j >= lat.ny() {
        return Err(Error::RowOutOfRange { row: j, ny: lat.ny() });
    }
    let turns = match lat.topology() {
        StripTopology::Annulus => 1,
        StripTopology::Moebius => {
            if lat.ny() % 2 == 1 && j == (lat.ny() - 1) / 2 {
                return Err(Error::CenterRow { row: j });
            }
            2
        }
    };
    LoopPath::walk(lat, SiteIndex::new(0, j), &vec![Direction::PlusX; turns * lat.nx()])
}

/// Class of a closed loop in `H₁ ≅ ℤ`, normalised so the center loop is `1`:
/// the signed number of seam crossings.
pub fn homology_class(lat: &StripLattice, path: &LoopPath) -> Result<i64> {
    path.validate(lat)?;
    Ok(seam_crossings(lat, path))
}

pub(crate) fn seam_crossings(lat: &StripLattice, path: &LoopPath) -> i64 {
    path.steps()
        .iter()
        .map(|st| match st.dir {
            Direction::PlusX if lat.crosses_seam(st.site, st.dir) => 1,
            Direction::MinusX if lat.crosses_seam(st.site, st.dir) => -1,
            _ => 0,
        })
        .sum()
}

/// The Möbius lattice with its center row removed, reglued as an annulus of
/// twice the circumference and half (rounded down) the width.
///
/// Cut site `(i′, j′)` with `i′ < nx` is Möbius site `(i′, c + 1 + j′)`; with
/// `i′ ≥ nx` it is `(i′ − nx, c − 1 − j′)`, where `c` is the center row. Row
/// `j′ = 0` of the cut lattice is adjacent to the removed curve.
#[derive(Debug, Clone)]
pub struct CutLattice {
    moebius: StripLattice,
    annulus: StripLattice,
    to_moebius: Vec<SiteIndex>,
    to_cut: Vec<Option<SiteIndex>>,
}

pub fn cut_complement_of_center(lat: &StripLattice) -> Result<CutLattice> {
    if lat.topology() != StripTopology::Moebius || lat.ny() < 3 || lat.ny() % 2 == 0 {
        return Err(Error::NotCuttable);
    }
    let nx = lat.nx();
    let c = (lat.ny() - 1) / 2;
    let annulus = StripLattice::new(2 * nx, c, StripTopology::Annulus)?;
    let mut to_moebius = vec![SiteIndex::new(0, 0); annulus.num_sites()];
    let mut to_cut = vec![None; lat.num_sites()];
    for s in annulus.sites() {
        let image = if s.i < nx {
            SiteIndex::new(s.i, c + 1 + s.j)
        } else {
            SiteIndex::new(s.i - nx, c - 1 - s.j)
        };
        to_moebius[annulus.index(s)] = image;
        to_cut[lat.index(image)] = Some(s);
    }
    Ok(CutLattice {
        moebius: *lat,
        annulus,
        to_moebius,
        to_cut,
    })
}

impl CutLattice {
    /// The cut-open annulus.
    pub fn lattice(&self) -> &StripLattice {
        &self.annulus
    }

    pub fn moebius(&self) -> &StripLattice {
        &self.moebius
    }

    pub fn center_row(&self) -> usize {
        self.annulus.ny()
    }

    /// Möbius site of a cut-lattice site.
    pub fn to_moebius(&self, s: SiteIndex) -> SiteIndex {
        self.to_moebius[self.annulus.index(s)]
    }

    /// Cut-lattice site of a Möbius site, `None` on the center row.
    pub fn to_cut(&self, s: SiteIndex) -> Option<SiteIndex> {
        self.to_cut[self.moebius.index(s)]
    }

    /// Whether the cut-lattice site lies in the lower half of the band, where
    /// the local `y` axis is reversed relative to the Möbius coordinates.
    pub fn is_flipped(&self, s: SiteIndex) -> bool {
        s.i >= self.moebius.nx()
    }

    /// Direction on the Möbius lattice of a cut-lattice step.
    pub fn to_moebius_dir(&self, s: SiteIndex, dir: Direction) -> Direction {
        if self.is_flipped(s) {
            dir.flip_y()
        } else {
            dir
        }
    }

    /// Lifts a Möbius loop that avoids the center row to the cut lattice.
    pub fn lift_loop(&self, path: &LoopPath) -> Result<LoopPath> {
        path.validate(&self.moebius)?;
        let steps = path
            .steps()
            .iter()
            .map(|st| {
                let s = self.to_cut(st.site).ok_or(Error::LoopTouchesCut)?;
                let dir = self.to_moebius_dir(s, st.dir);
                Ok(LinkStep::new(s, dir))
            })
            .collect::<Result<Vec<_>>>()?;
        LoopPath::new(&self.annulus, steps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Direction::*;
    use StripTopology::*;

    #[test]
    fn build_lattice_sizes() {
        assert_eq!(build_lattice(3, 1, Annulus).unwrap().num_sites(), 3);
        assert_eq!(build_lattice(48, 9, Moebius).unwrap().num_sites(), 432);
        assert!(matches!(
            build_lattice(2, 1, Annulus),
            Err(Error::DimensionTooSmall { .. })
        ));
        assert!(build_lattice(3, 0, Moebius).is_err());
    }

    #[test]
    fn seam_neighbors() {
        let m = build_lattice(8, 5, Moebius).unwrap();
        let a = build_lattice(8, 5, Annulus).unwrap();
        assert_eq!(m.neighbor(SiteIndex::new(7, 0), PlusX), Some(SiteIndex::new(0, 4)));
        assert_eq!(a.neighbor(SiteIndex::new(7, 0), PlusX), Some(SiteIndex::new(0, 0)));
        assert_eq!(m.neighbor(SiteIndex::new(0, 1), MinusX), Some(SiteIndex::new(7, 3)));
        for lat in [m, a] {
            assert_eq!(lat.neighbor(SiteIndex::new(3, 4), PlusY), None);
            assert_eq!(lat.neighbor(SiteIndex::new(3, 0), MinusY), None);
            assert_eq!(lat.neighbor(SiteIndex::new(3, 2), PlusY), Some(SiteIndex::new(3, 3)));
        }
    }

    #[test]
    fn neighbor_is_involutive() {
        for topo in [Annulus, Moebius] {
            for (nx, ny) in [(3, 1), (4, 2), (5, 3), (8, 5)] {
                let lat = build_lattice(nx, ny, topo).unwrap();
                for s in lat.sites() {
                    for d in Direction::ALL {
                        if let Some(t) = lat.neighbor(s, d) {
                            assert_eq!(lat.neighbor(t, d.reverse()), Some(s));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn moebius_needs_two_turns() {
        let lat = build_lattice(7, 5, Moebius).unwrap();
        for j in 0..5 {
            let mut s = SiteIndex::new(0, j);
            for _ in 0..7 {
                s = lat.neighbor(s, PlusX).unwrap();
            }
            assert_eq!(s, SiteIndex::new(0, 4 - j));
            for _ in 0..7 {
                s = lat.neighbor(s, PlusX).unwrap();
            }
            assert_eq!(s, SiteIndex::new(0, j));
        }
    }

    #[test]
    fn canonical_loops() {
        let m = build_lattice(8, 5, Moebius).unwrap();
        let c = center_loop(&m).unwrap();
        assert_eq!(c.len(), 8);
        assert!(c.sites().all(|s| s.j == 2));
        assert!(matches!(
            center_loop(&build_lattice(8, 4, Moebius).unwrap()),
            Err(Error::EvenRows(4))
        ));
        let tiny = build_lattice(3, 1, Annulus).unwrap();
        assert_eq!(center_loop(&tiny).unwrap().len(), 3);

        let off = offset_loop(&m, 0).unwrap();
        assert_eq!(off.len(), 16);
        assert_eq!(off.steps()[8].site, SiteIndex::new(0, 4));
        let rows: std::collections::BTreeSet<_> = off.sites().map(|s| s.j).collect();
        assert_eq!(rows.into_iter().collect::<Vec<_>>(), vec![0, 4]);

        let a = build_lattice(8, 5, Annulus).unwrap();
        assert_eq!(offset_loop(&a, 0).unwrap().len(), 8);
        assert!(matches!(offset_loop(&m, 2), Err(Error::CenterRow { row: 2 })));
    }

    #[test]
    fn homology_classes() {
        let m = build_lattice(8, 5, Moebius).unwrap();
        assert_eq!(homology_class(&m, &center_loop(&m).unwrap()).unwrap(), 1);
        for j in [0, 1, 3, 4] {
            assert_eq!(homology_class(&m, &offset_loop(&m, j).unwrap()).unwrap(), 2);
        }
        // Plaquettes, including ones straddling the seam.
        for lat in [m, build_lattice(8, 5, Annulus).unwrap()] {
            for i in 0..8 {
                for j in 0..4 {
                    let s = SiteIndex::new(i, j);
                    let local_up = if lat.crosses_seam(s, PlusX) && lat.seam_flips() {
                        MinusY
                    } else {
                        PlusY
                    };
                    let p = LoopPath::walk(&lat, s, &[PlusX, local_up, MinusX, MinusY]).unwrap();
                    assert_eq!(homology_class(&lat, &p).unwrap(), 0);
                }
            }
        }
        let reversed = LoopPath::walk(&m, SiteIndex::new(0, 2), &[MinusX; 8]).unwrap();
        assert_eq!(homology_class(&m, &reversed).unwrap(), -1);
    }

    #[test]
    fn invalid_loops() {
        let m = build_lattice(4, 3, Moebius).unwrap();
        assert!(LoopPath::walk(&m, SiteIndex::new(0, 0), &[PlusX, PlusX]).is_err());
        assert!(LoopPath::walk(&m, SiteIndex::new(0, 2), &[PlusY]).is_err());
        assert!(LoopPath::new(&m, vec![]).is_err());
        let gap = vec![
            LinkStep::new(SiteIndex::new(0, 0), PlusY),
            LinkStep::new(SiteIndex::new(1, 1), MinusY),
        ];
        assert!(LoopPath::new(&m, gap).is_err());
    }

    #[test]
    fn cut_lattice_shape_and_bijection() {
        let m = build_lattice(8, 5, Moebius).unwrap();
        let cut = cut_complement_of_center(&m).unwrap();
        let a = cut.lattice();
        assert_eq!((a.nx(), a.ny(), a.topology()), (16, 2, Annulus));
        assert_eq!(a.num_sites(), 32);
        for s in a.sites() {
            assert_eq!(cut.to_cut(cut.to_moebius(s)), Some(s));
        }
        for s in m.sites() {
            match cut.to_cut(s) {
                None => assert_eq!(s.j, 2),
                Some(t) => assert_eq!(cut.to_moebius(t), s),
            }
        }
        assert!(matches!(
            cut_complement_of_center(&build_lattice(8, 1, Moebius).unwrap()),
            Err(Error::NotCuttable)
        ));
        assert!(cut_complement_of_center(&build_lattice(8, 5, Annulus).unwrap()).is_err());
        assert!(cut_complement_of_center(&build_lattice(8, 4, Moebius).unwrap()).is_err());
    }

    /// Enumerates every Möbius link off the center row and checks it has exactly
    /// one image link on the cut annulus, and vice versa.
    #[test]
    fn cut_lattice_preserves_adjacency() {
        for (nx, ny) in [(4, 3), (5, 5), (6, 7)] {
            let m = build_lattice(nx, ny, Moebius).unwrap();
            let cut = cut_complement_of_center(&m).unwrap();
            let a = *cut.lattice();
            let c = (ny - 1) / 2;
            let undirected = |p: SiteIndex, q: SiteIndex| if p <= q { (p, q) } else { (q, p) };

            let mut moebius_links = std::collections::BTreeSet::new();
            for (s, d) in m.links() {
                let t = m.neighbor(s, d).unwrap();
                if s.j != c && t.j != c {
                    moebius_links.insert(undirected(s, t));
                }
            }
            let mut images = std::collections::BTreeMap::new();
            for (s, d) in a.links() {
                let t = a.neighbor(s, d).unwrap();
                let key = undirected(cut.to_moebius(s), cut.to_moebius(t));
                *images.entry(key).or_insert(0usize) += 1;
            }
            assert_eq!(images.len(), moebius_links.len());
            for link in &moebius_links {
                assert_eq!(images.get(link), Some(&1), "link {link:?}");
            }
        }
    }

    #[test]
    fn broken_seam_hook_changes_topology() {
        let m = build_lattice(8, 5, Moebius).unwrap().with_broken_seam();
        assert!(!m.seam_flips());
        assert_eq!(m.neighbor(SiteIndex::new(7, 0), PlusX), Some(SiteIndex::new(0, 0)));
    }
}
