//! Link-angle gauge fields.
//!
//! The vector potential is stored as one real angle per directed `+x` and
//! `+y` link; the reverse link carries the negated angle. Angles are kept
//! as raw reals and only reduced into `(−π, π]` when compared.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{
    cut_complement_of_center, homology_class, CutLattice, Direction, LoopPath, SiteIndex,
    StripLattice, StripTopology,
};
use crate::numeric::{exact_sum, wrap_angle};

#[derive(Debug, Clone, PartialEq)]
pub struct GaugeField {
    lattice: StripLattice,
    theta_x: Vec<f64>,
    // Indexed by site; entries on the top row are unused and stay zero.
    theta_y: Vec<f64>,
}

impl GaugeField {
    /// The zero field.
    pub fn zero(lat: &StripLattice) -> Self {
        GaugeField {
            lattice: *lat,
            theta_x: vec![0.0; lat.num_sites()],
            theta_y: vec![0.0; lat.num_sites()],
        }
    }

    /// Builds a field from per-site `+x` and `+y` link angles. `theta_y` on
    /// the top row must be zero.
    pub fn from_angles(lat: &StripLattice, theta_x: Vec<f64>, theta_y: Vec<f64>) -> Result<Self> {
        let n = lat.num_sites();
        for v in [&theta_x, &theta_y] {
            if v.len() != n {
                return Err(Error::SizeMismatch {
                    expected: n,
                    got: v.len(),
                });
            }
        }
        if theta_x.iter().chain(&theta_y).any(|a| !a.is_finite()) {
            return Err(Error::InvalidParameter("non-finite link angle".into()));
        }
        let top_row_used = (0..lat.nx())
            .any(|i| theta_y[lat.index(SiteIndex::new(i, lat.ny() - 1))] != 0.0);
        if top_row_used {
            return Err(Error::InvalidParameter("theta_y set on the top row".into()));
        }
        Ok(GaugeField {
            lattice: *lat,
            theta_x,
            theta_y,
        })
    }

    pub fn lattice(&self) -> &StripLattice {
        &self.lattice
    }

    pub fn theta_x(&self, s: SiteIndex) -> f64 {
        self.theta_x[self.lattice.index(s)]
    }

    /// Angle on the `+y` link leaving `s`; `None` on the top row.
    pub fn theta_y(&self, s: SiteIndex) -> Option<f64> {
        (s.j + 1 < self.lattice.ny()).then(|| self.theta_y[self.lattice.index(s)])
    }

    /// Phase picked up hopping from `s` in direction `dir`, or `None` if the
    /// step leaves the strip.
    pub fn link_angle(&self, s: SiteIndex, dir: Direction) -> Option<f64> {
        let lat = &self.lattice;
        let t = lat.neighbor(s, dir)?;
        Some(match dir {
            Direction::PlusX => self.theta_x[lat.index(s)],
            Direction::MinusX => -self.theta_x[lat.index(t)],
            Direction::PlusY => self.theta_y[lat.index(s)],
            Direction::MinusY => -self.theta_y[lat.index(t)],
        })
    }

    /// Whether every `+y` angle is zero.
    pub fn has_zero_theta_y(&self) -> bool {
        self.theta_y.iter().all(|&a| a == 0.0)
    }

    /// Whether the field is invariant under the row reflection `j ↦ ny − 1 − j`
    /// (with `theta_y` required to vanish, since the reflection reverses
    /// `y` links).
    pub fn is_reflection_symmetric(&self, tol: f64) -> bool {
        let lat = &self.lattice;
        self.has_zero_theta_y()
            && lat.sites().all(|s| {
                let r = SiteIndex::new(s.i, lat.mirror_row(s.j));
                (self.theta_x(s) - self.theta_x(r)).abs() <= tol
            })
    }
}

/// The flat field with total flux `flux = Φ/Φ₀` spread evenly over the `+x`
/// links: every `theta_x` is `2π·flux/nx` and every `theta_y` is zero.
pub fn uniform_flux_field(lat: &StripLattice, flux: f64) -> GaugeField {
    let theta = TAU * flux / lat.nx() as f64;
    GaugeField {
        lattice: *lat,
        theta_x: vec![theta; lat.num_sites()],
        theta_y: vec![0.0; lat.num_sites()],
    }
}

/// Holonomy of a closed loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Holonomy {
    /// Unreduced sum of link angles along the loop.
    pub angle: f64,
    /// `exp(i·angle)`.
    pub value: Complex64,
}

pub fn wilson_loop(field: &GaugeField, path: &LoopPath) -> Result<Holonomy> {
    path.validate(field.lattice())?;
    let angle = exact_sum(
        path.steps()
            .iter()
            .map(|st| field.link_angle(st.site, st.dir).expect("validated step")),
    );
    Ok(Holonomy {
        angle,
        value: Complex64::from_polar(1.0, angle),
    })
}

/// The face bounded by the `+x` and `+y` links at `corner`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FaceRef {
    pub corner: SiteIndex,
}

impl FaceRef {
    pub fn new(lat: &StripLattice, corner: SiteIndex) -> Result<Self> {
        if !lat.contains(corner) || corner.j + 1 >= lat.ny() {
            return Err(Error::InvalidFace {
                i: corner.i,
                j: corner.j,
            });
        }
        Ok(FaceRef { corner })
    }
}

/// All faces of the lattice, `nx·(ny − 1)` of them.
pub fn faces(lat: &StripLattice) -> impl Iterator<Item = FaceRef> + '_ {
    lat.sites()
        .filter(move |s| s.j + 1 < lat.ny())
        .map(|corner| FaceRef { corner })
}

/// Counterclockwise boundary of a face in its own chart. A face straddling a
/// flipping seam is traversed with the local `y` axis reversed past the seam.
pub fn face_boundary(lat: &StripLattice, face: FaceRef) -> Result<LoopPath> {
    let s = face.corner;
    FaceRef::new(lat, s)?;
    let up = if lat.seam_flips() && lat.crosses_seam(s, Direction::PlusX) {
        Direction::MinusY
    } else {
        Direction::PlusY
    };
    LoopPath::walk(
        lat,
        s,
        &[Direction::PlusX, up, Direction::MinusX, Direction::MinusY],
    )
}

/// Flux through a face, reduced into `(−π, π]`.
pub fn face_curvature(field: &GaugeField, face: FaceRef) -> Result<f64> {
    let boundary = face_boundary(field.lattice(), face)?;
    Ok(wrap_angle(wilson_loop(field, &boundary)?.angle))
}

/// Injects flux `beta` through a single face.
///
/// Only faces touching a wall have a link shared with no other face, so the
/// flux is carried in along a string of `+x` links in the face's column, from
/// the bottom wall up to the face's lower edge. Each interior face on the
/// string gains and loses `beta` and is left unchanged.
pub fn add_face_flux(field: &GaugeField, face: FaceRef, beta: f64) -> Result<GaugeField> {
    let lat = field.lattice;
    FaceRef::new(&lat, face.corner)?;
    let mut out = field.clone();
    for j in 0..=face.corner.j {
        out.theta_x[lat.index(SiteIndex::new(face.corner.i, j))] += beta;
    }
    Ok(out)
}

/// A site-dependent phase rotation `ψ(s) ↦ e^{−iχ(s)} ψ(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeTransform {
    pub chi: Vec<f64>,
}

impl GaugeTransform {
    pub fn new(chi: Vec<f64>) -> Result<Self> {
        if chi.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("non-finite gauge angle".into()));
        }
        Ok(GaugeTransform { chi })
    }

    /// The large transform `χ(i, j) = 2π·winding·i/nx`, which shifts the flux
    /// of a uniform field by `winding`.
    pub fn winding(lat: &StripLattice, winding: i64) -> Self {
        let chi = lat
            .sites()
            .map(|s| TAU * winding as f64 * s.i as f64 / lat.nx() as f64)
            .collect();
        GaugeTransform { chi }
    }
}

/// Maps each link angle `u → v` to `θ + χ(v) − χ(u)`.
pub fn apply_gauge_transform(field: &GaugeField, g: &GaugeTransform) -> Result<GaugeField> {
    let lat = field.lattice;
    if g.chi.len() != lat.num_sites() {
        return Err(Error::SizeMismatch {
            expected: lat.num_sites(),
            got: g.chi.len(),
        });
    }
    let mut out = field.clone();
    for s in lat.sites() {
        let u = lat.index(s);
        let east = lat.neighbor(s, Direction::PlusX).expect("x always wraps");
        out.theta_x[u] += g.chi[lat.index(east)] - g.chi[u];
        if let Some(north) = lat.neighbor(s, Direction::PlusY) {
            out.theta_y[u] += g.chi[lat.index(north)] - g.chi[u];
        }
    }
    Ok(out)
}

/// Copies a Möbius field onto the cut-open annulus. Links in the lower half
/// are read with the `y` orientation reversed.
pub fn transfer_to_cut(field: &GaugeField, cut: &CutLattice) -> Result<GaugeField> {
    if field.lattice() != cut.moebius() {
        return Err(Error::SizeMismatch {
            expected: cut.moebius().num_sites(),
            got: field.lattice().num_sites(),
        });
    }
    let lat = *cut.lattice();
    let mut out = GaugeField::zero(&lat);
    for (s, dir) in lat.links() {
        let m = cut.to_moebius(s);
        let angle = field
            .link_angle(m, cut.to_moebius_dir(s, dir))
            .expect("cut links map to Möbius links");
        match dir {
            Direction::PlusX => out.theta_x[lat.index(s)] = angle,
            _ => out.theta_y[lat.index(s)] = angle,
        }
    }
    Ok(out)
}

/// Discrete Stokes identity between two homologous loops.
///
/// Both loops are lifted to an orientable lattice (the cut-open annulus for a
/// Möbius band, the lattice itself for an annulus). There the difference of
/// the loops bounds a 2-chain `D`, found column by column, and the returned
/// defect is `W(loop1) − W(loop2) − Σ_D curvature`, reduced into `(−π, π]`.
/// It vanishes for every field.
pub fn stokes_defect(field: &GaugeField, loop1: &LoopPath, loop2: &LoopPath) -> Result<f64> {
    let lat = field.lattice();
    let c1 = homology_class(lat, loop1)?;
    let c2 = homology_class(lat, loop2)?;
    if c1 != c2 {
        return Err(Error::NonHomologous(c1, c2));
    }

    let (flat_lat, flat_field, lift1, lift2) = match lat.topology() {
        StripTopology::Annulus => (*lat, field.clone(), loop1.clone(), loop2.clone()),
        StripTopology::Moebius => {
            let cut = cut_complement_of_center(lat)?;
            let l1 = cut.lift_loop(loop1)?;
            let l2 = cut.lift_loop(loop2)?;
            (*cut.lattice(), transfer_to_cut(field, &cut)?, l1, l2)
        }
    };

    let w1 = wilson_loop(&flat_field, &lift1)?.angle;
    let w2 = wilson_loop(&flat_field, &lift2)?.angle;

    // Net traversal count of every +x link by loop1 − loop2.
    let mut x_chain = vec![0i64; flat_lat.num_sites()];
    for (path, sign) in [(&lift1, 1), (&lift2, -1)] {
        for st in path.steps() {
            match st.dir {
                Direction::PlusX => x_chain[flat_lat.index(st.site)] += sign,
                Direction::MinusX => {
                    let t = flat_lat.neighbor(st.site, st.dir).expect("validated");
                    x_chain[flat_lat.index(t)] -= sign;
                }
                _ => {}
            }
        }
    }

    // Face (i, j) has its +x edge at row j and its −x edge at row j + 1, so the
    // bounded 2-chain is the running column sum of the x-chain.
    let mut enclosed = Vec::new();
    for i in 0..flat_lat.nx() {
        let mut weight = 0i64;
        for j in 0..flat_lat.ny() {
            weight += x_chain[flat_lat.index(SiteIndex::new(i, j))];
            if j + 1 < flat_lat.ny() {
                if weight != 0 {
                    let face = FaceRef::new(&flat_lat, SiteIndex::new(i, j))?;
                    enclosed.push(weight as f64 * face_curvature(&flat_field, face)?);
                }
            } else if weight != 0 {
                return Err(Error::NonHomologous(c1, c2));
            }
        }
    }

    Ok(wrap_angle(exact_sum(
        [w1, -w2].into_iter().chain(enclosed.iter().map(|c| -c)),
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_lattice, center_loop, offset_loop, LinkStep};
    use std::f64::consts::{FRAC_PI_4, PI};
    use Direction::*;
    use StripTopology::*;

    fn moebius(nx: usize, ny: usize) -> StripLattice {
        build_lattice(nx, ny, Moebius).unwrap()
    }

    fn pseudo_random_chi(lat: &StripLattice, seed: u64) -> GaugeTransform {
        // Small LCG; tests only need arbitrary, reproducible angles.
        let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let chi = (0..lat.num_sites())
            .map(|_| {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((x >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 20.0
            })
            .collect();
        GaugeTransform::new(chi).unwrap()
    }

    #[test]
    fn uniform_field_angles() {
        let lat = moebius(8, 3);
        assert!(uniform_flux_field(&lat, 0.0).theta_x.iter().all(|&a| a == 0.0));
        let f1 = uniform_flux_field(&lat, 1.0);
        assert!(f1.theta_x.iter().all(|&a| a == FRAC_PI_4));
        let w = wilson_loop(&f1, &center_loop(&lat).unwrap()).unwrap();
        assert!((w.angle - TAU).abs() < 1e-14);

        let ring = build_lattice(10, 1, Annulus).unwrap();
        let half = uniform_flux_field(&ring, 0.5);
        assert!((half.theta_x(SiteIndex::new(3, 0)) - PI / 10.0).abs() < 1e-16);
    }

    #[test]
    fn wilson_loop_examples() {
        let lat = moebius(8, 5);
        let c = center_loop(&lat).unwrap();
        let off = offset_loop(&lat, 0).unwrap();

        let w = wilson_loop(&uniform_flux_field(&lat, 1.0), &c).unwrap();
        assert!((w.value - Complex64::new(1.0, 0.0)).norm() < 1e-14);

        let half = uniform_flux_field(&lat, 0.5);
        let w = wilson_loop(&half, &c).unwrap();
        assert_eq!(w.angle, PI);
        assert!((w.value - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        let w2 = wilson_loop(&half, &off).unwrap();
        assert_eq!(w2.angle, TAU);
        assert!((w2.value - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((w2.value.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn wilson_loop_rejects_foreign_loop() {
        let small = moebius(4, 3);
        let big = moebius(8, 5);
        let path = offset_loop(&big, 4).unwrap();
        assert!(wilson_loop(&uniform_flux_field(&small, 0.2), &path).is_err());
    }

    #[test]
    fn doubling_is_bit_exact() {
        let lat = moebius(7, 5);
        for k in 0..50 {
            let f = -3.0 + 0.137 * k as f64;
            let field = uniform_flux_field(&lat, f);
            let c = wilson_loop(&field, &center_loop(&lat).unwrap()).unwrap().angle;
            let o = wilson_loop(&field, &offset_loop(&lat, 1).unwrap()).unwrap().angle;
            assert_eq!(o, 2.0 * c, "f = {f}");
        }
    }

    #[test]
    fn uniform_fields_are_flat() {
        for lat in [moebius(6, 5), moebius(5, 2), build_lattice(6, 4, Annulus).unwrap()] {
            for f in [-1.3, 0.0, 0.25, 0.5, 2.7] {
                let field = uniform_flux_field(&lat, f);
                for face in faces(&lat) {
                    assert!(face_curvature(&field, face).unwrap().abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn face_flux_is_local() {
        for lat in [moebius(6, 5), build_lattice(5, 4, Annulus).unwrap()] {
            let base = apply_gauge_transform(&uniform_flux_field(&lat, 0.3), &pseudo_random_chi(&lat, 3))
                .unwrap();
            for target in faces(&lat) {
                let field = add_face_flux(&base, target, 0.3).unwrap();
                for face in faces(&lat) {
                    let curv = face_curvature(&field, face).unwrap();
                    let expected = if face == target { 0.3 } else { 0.0 };
                    assert!((curv - expected).abs() < 1e-12, "{face:?} {curv}");
                }
                let boundary = face_boundary(&lat, target).unwrap();
                let before = wilson_loop(&base, &boundary).unwrap().angle;
                let after = wilson_loop(&field, &boundary).unwrap().angle;
                assert!((after - before - 0.3).abs() < 1e-12);

                let undone = add_face_flux(&field, target, -0.3).unwrap();
                for (a, b) in undone.theta_x.iter().zip(&base.theta_x) {
                    assert!((a - b).abs() < 1e-14);
                }
            }
            let f0 = faces(&lat).next().unwrap();
            assert_eq!(add_face_flux(&base, f0, 0.0).unwrap(), base);
        }
    }

    #[test]
    fn invalid_faces() {
        let lat = moebius(6, 5);
        assert!(FaceRef::new(&lat, SiteIndex::new(0, 4)).is_err());
        assert!(FaceRef::new(&lat, SiteIndex::new(6, 0)).is_err());
        assert!(face_curvature(&GaugeField::zero(&lat), FaceRef { corner: SiteIndex::new(2, 4) }).is_err());
        assert!(add_face_flux(&GaugeField::zero(&lat), FaceRef { corner: SiteIndex::new(2, 4) }, 0.1).is_err());
    }

    #[test]
    fn gauge_transforms() {
        let lat = moebius(6, 5);
        let field = add_face_flux(
            &uniform_flux_field(&lat, 0.37),
            FaceRef::new(&lat, SiteIndex::new(5, 1)).unwrap(),
            0.8,
        )
        .unwrap();
        let constant = GaugeTransform::new(vec![1.7; lat.num_sites()]).unwrap();
        let same = apply_gauge_transform(&field, &constant).unwrap();
        for (a, b) in same.theta_x.iter().zip(&field.theta_x) {
            assert!((a - b).abs() < 1e-14);
        }

        let loops = [
            center_loop(&lat).unwrap(),
            offset_loop(&lat, 0).unwrap(),
            offset_loop(&lat, 3).unwrap(),
            face_boundary(&lat, FaceRef::new(&lat, SiteIndex::new(5, 1)).unwrap()).unwrap(),
        ];
        for seed in 0..10 {
            let g = pseudo_random_chi(&lat, seed);
            let moved = apply_gauge_transform(&field, &g).unwrap();
            for path in &loops {
                let a = wilson_loop(&field, path).unwrap().angle;
                let b = wilson_loop(&moved, path).unwrap().angle;
                assert!(wrap_angle(a - b).abs() < 1e-12);
            }
            for face in faces(&lat) {
                let a = face_curvature(&field, face).unwrap();
                let b = face_curvature(&moved, face).unwrap();
                assert!(wrap_angle(a - b).abs() < 1e-12);
            }
        }
        assert!(apply_gauge_transform(&field, &GaugeTransform::new(vec![0.0; 3]).unwrap()).is_err());
    }

    #[test]
    fn large_gauge_transform_shifts_flux() {
        let lat = moebius(6, 3);
        let g = GaugeTransform::winding(&lat, 1);
        let f = 0.3;
        let moved = apply_gauge_transform(&uniform_flux_field(&lat, f), &g).unwrap();
        let target = uniform_flux_field(&lat, f + 1.0);
        for s in lat.sites() {
            // Differs from the f+1 field only by 2π on the seam column.
            let d = moved.theta_x(s) - target.theta_x(s);
            if s.i == lat.nx() - 1 {
                assert!((d + TAU).abs() < 1e-12);
            } else {
                assert!(d.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cut_field_matches_moebius_holonomy() {
        let lat = moebius(6, 5);
        let cut = cut_complement_of_center(&lat).unwrap();
        let field = apply_gauge_transform(&uniform_flux_field(&lat, 0.41), &pseudo_random_chi(&lat, 9))
            .unwrap();
        let cut_field = transfer_to_cut(&field, &cut).unwrap();
        for j in [0, 1, 3, 4] {
            let path = offset_loop(&lat, j).unwrap();
            let lifted = cut.lift_loop(&path).unwrap();
            assert_eq!(homology_class(cut.lattice(), &lifted).unwrap(), 1);
            let a = wilson_loop(&field, &path).unwrap().angle;
            let b = wilson_loop(&cut_field, &lifted).unwrap().angle;
            assert!((a - b).abs() < 1e-12);
        }
        assert!(matches!(
            cut.lift_loop(&center_loop(&lat).unwrap()),
            Err(Error::LoopTouchesCut)
        ));
    }

    #[test]
    fn stokes_defect_examples() {
        let lat = moebius(6, 5);
        let flat = uniform_flux_field(&lat, 0.23);
        let l0 = offset_loop(&lat, 0).unwrap();
        let l1 = offset_loop(&lat, 1).unwrap();
        assert_eq!(stokes_defect(&flat, &l0, &l0).unwrap(), 0.0);
        assert!(stokes_defect(&flat, &l0, &l1).unwrap().abs() < 1e-12);

        // Face (2, 0) lies between rows 0 and 1.
        let face = FaceRef::new(&lat, SiteIndex::new(2, 0)).unwrap();
        let kicked = add_face_flux(&flat, face, 0.3).unwrap();
        let w0 = wilson_loop(&kicked, &l0).unwrap().angle;
        let w1 = wilson_loop(&kicked, &l1).unwrap().angle;
        assert!((wrap_angle(w0 - w1).abs() - 0.3).abs() < 1e-12);
        assert!(stokes_defect(&kicked, &l0, &l1).unwrap().abs() < 1e-12);

        assert!(matches!(
            stokes_defect(&flat, &l0, &center_loop(&lat).unwrap()),
            Err(Error::NonHomologous(2, 1))
        ));
        let through_center = LoopPath::walk(
            &lat,
            SiteIndex::new(0, 1),
            &[PlusY, PlusX, MinusY, MinusX],
        )
        .unwrap();
        let small = LoopPath::walk(&lat, SiteIndex::new(0, 0), &[PlusX, PlusY, MinusX, MinusY]).unwrap();
        assert!(matches!(
            stokes_defect(&flat, &small, &through_center),
            Err(Error::LoopTouchesCut)
        ));
    }

    #[test]
    fn stokes_defect_on_annulus() {
        let lat = build_lattice(6, 4, Annulus).unwrap();
        let field = add_face_flux(
            &uniform_flux_field(&lat, 0.71),
            FaceRef::new(&lat, SiteIndex::new(4, 1)).unwrap(),
            0.3,
        )
        .unwrap();
        let a = offset_loop(&lat, 0).unwrap();
        let b = offset_loop(&lat, 3).unwrap();
        let wa = wilson_loop(&field, &a).unwrap().angle;
        let wb = wilson_loop(&field, &b).unwrap().angle;
        assert!((wrap_angle(wa - wb) - 0.3).abs() < 1e-12);
        assert!(stokes_defect(&field, &a, &b).unwrap().abs() < 1e-12);

        // A wiggly loop homologous to row 0.
        let mut steps = Vec::new();
        let mut at = SiteIndex::new(0, 2);
        for d in [PlusX, PlusY, PlusX, MinusY, MinusY, PlusX, PlusX, PlusX, PlusX, PlusY] {
            steps.push(LinkStep::new(at, d));
            at = lat.neighbor(at, d).unwrap();
        }
        let wiggle = LoopPath::new(&lat, steps).unwrap();
        assert!(stokes_defect(&field, &wiggle, &b).unwrap().abs() < 1e-12);
    }
}
