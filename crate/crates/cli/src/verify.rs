//! One-shot self-check on small fixed lattices.

use std::f64::consts::PI;
use std::io::{self, Write};

use moebius_flux::eigensolver::{dense_eigenvalues, lanczos_lowest, SolverConfig};
use moebius_flux::experiments::{annulus_equivalence_on, sector_spectrum, Sector};
use moebius_flux::gauge::{
    add_face_flux, apply_gauge_transform, face_curvature, faces, stokes_defect,
    uniform_flux_field, wilson_loop, GaugeField, GaugeTransform,
};
use moebius_flux::hamiltonian::{assemble, ring_spectrum_oracle, HoppingParams, PotentialField};
use moebius_flux::lattice::{
    center_loop, homology_class, offset_loop, Direction, LoopPath, SiteIndex, StripLattice,
    StripTopology,
};
use moebius_flux::loops::{random_rectangle_loop, random_winding_loop, RowBand};
use moebius_flux::{wrap_angle, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Ctx {
    seed: u64,
    broken_seam: bool,
}

impl Ctx {
    fn lattice(&self, nx: usize, ny: usize, topology: StripTopology) -> Result<StripLattice> {
        let lat = StripLattice::new(nx, ny, topology)?;
        Ok(if self.broken_seam { lat.with_broken_seam() } else { lat })
    }

    fn moebius(&self) -> Result<StripLattice> {
        self.lattice(6, 5, StripTopology::Moebius)
    }

    /// Independent stream per check so checks do not perturb each other.
    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

type Outcome = (bool, String);

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn random_gauge(lat: &StripLattice, rng: &mut ChaCha8Rng) -> GaugeTransform {
    GaugeTransform {
        chi: (0..lat.num_sites()).map(|_| rng.random_range(-PI..PI)).collect(),
    }
}

fn spectrum(lat: &StripLattice, field: &GaugeField) -> Result<Vec<f64>> {
    dense_eigenvalues(&assemble(lat, field, HoppingParams::default(), &PotentialField::zero(lat))?)
}

fn flatness(ctx: &Ctx) -> Result<Outcome> {
    let lat = ctx.moebius()?;
    let mut rng = ctx.rng(1);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let base = uniform_flux_field(&lat, rng.random_range(-1.0..1.0));
        let field = apply_gauge_transform(&base, &random_gauge(&lat, &mut rng))?;
        for face in faces(&lat) {
            worst = worst.max(face_curvature(&field, face)?.abs());
        }
    }
    Ok((worst <= 1e-12, format!("max |face curvature| {worst:.1e}")))
}

fn gauge_invariance(ctx: &Ctx) -> Result<Outcome> {
    let lat = ctx.moebius()?;
    let mut rng = ctx.rng(2);
    let center = center_loop(&lat)?;
    let (mut levels, mut wil) = (0.0f64, 0.0f64);
    for _ in 0..5 {
        let base = uniform_flux_field(&lat, rng.random_range(-1.0..1.0));
        let moved = apply_gauge_transform(&base, &random_gauge(&lat, &mut rng))?;
        levels = levels.max(max_dev(&spectrum(&lat, &base)?, &spectrum(&lat, &moved)?));
        let a = wilson_loop(&base, &center)?.angle;
        let b = wilson_loop(&moved, &center)?.angle;
        wil = wil.max(wrap_angle(a - b).abs());
    }
    Ok((
        levels <= 1e-10 && wil <= 1e-12,
        format!("spectrum drift {levels:.1e}, Wilson drift {wil:.1e}"),
    ))
}

fn homology(ctx: &Ctx) -> Result<Outcome> {
    let lat = ctx.moebius()?;
    let mut rng = ctx.rng(3);
    // An off-center row must go around twice before it closes.
    let one_turn = LoopPath::walk(&lat, SiteIndex::new(0, 0), &[Direction::PlusX; 6]);
    let center_class = homology_class(&lat, &center_loop(&lat)?)?;
    let offset_class = homology_class(&lat, &offset_loop(&lat, 0)?)?;
    let mut worst = 0.0f64;
    for turns in [1, 1, 2, 2, 3] {
        let field = apply_gauge_transform(
            &uniform_flux_field(&lat, rng.random_range(-1.0..1.0)),
            &random_gauge(&lat, &mut rng),
        )?;
        let a = random_winding_loop(&lat, &mut rng, turns, RowBand::All)?;
        let b = random_winding_loop(&lat, &mut rng, turns, RowBand::All)?;
        let diff = wilson_loop(&field, &a)?.angle - wilson_loop(&field, &b)?.angle;
        worst = worst.max(wrap_angle(diff).abs());
    }
    let pass = one_turn.is_err() && center_class == 1 && offset_class == 2 && worst <= 1e-12;
    Ok((
        pass,
        format!(
            "one-turn offset walk {}, classes center {center_class} offset {offset_class}, \
             homologous gap {worst:.1e}",
            if one_turn.is_err() { "open" } else { "closed" }
        ),
    ))
}

fn periodicity(ctx: &Ctx) -> Result<Outcome> {
    let lat = ctx.moebius()?;
    let (mut shift, mut reflect) = (0.0f64, 0.0f64);
    for f in [0.0, 0.13, 0.5, 0.77] {
        let e = spectrum(&lat, &uniform_flux_field(&lat, f))?;
        shift = shift.max(max_dev(&e, &spectrum(&lat, &uniform_flux_field(&lat, f + 1.0))?));
        reflect = reflect.max(max_dev(&e, &spectrum(&lat, &uniform_flux_field(&lat, -f))?));
    }
    Ok((
        shift <= 1e-9 && reflect <= 1e-9,
        format!("E(f) vs E(f+1) {shift:.1e}, E(f) vs E(-f) {reflect:.1e}"),
    ))
}

fn sector_completeness(ctx: &Ctx) -> Result<Outcome> {
    let lat = ctx.moebius()?;
    let hop = HoppingParams::default();
    let mut worst = 0.0f64;
    for f in [0.0, 0.3, 0.5] {
        let full = sector_spectrum(&lat, hop, f, Sector::Full)?;
        let mut merged = sector_spectrum(&lat, hop, f, Sector::Even)?;
        merged.extend(sector_spectrum(&lat, hop, f, Sector::Odd)?);
        merged.sort_by(f64::total_cmp);
        worst = worst.max(max_dev(&full, &merged));
    }
    Ok((worst <= 1e-9, format!("even + odd vs full {worst:.1e}")))
}

fn annulus_equivalence(ctx: &Ctx) -> Result<Outcome> {
    let grid: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
    let dev = annulus_equivalence_on(&ctx.moebius()?, &grid, HoppingParams::default())?;
    Ok((dev <= 1e-10, format!("odd sector vs annulus at f + 1/2: {dev:.1e}")))
}

fn ladder(ctx: &Ctx) -> Result<Outcome> {
    let lat = ctx.lattice(12, 2, StripTopology::Moebius)?;
    let decoupled = HoppingParams::new(1.0, 0.0)?;
    let mut half = 0.0f64;
    for f in [0.0, 0.1, 0.25, 0.4] {
        let a = sector_spectrum(&lat, decoupled, f, Sector::Full)?;
        let b = sector_spectrum(&lat, decoupled, f + 0.5, Sector::Full)?;
        half = half.max(max_dev(&a, &b));
    }
    let coupled = HoppingParams::default();
    let split = max_dev(
        &sector_spectrum(&lat, coupled, 0.0, Sector::Full)?,
        &sector_spectrum(&lat, coupled, 0.5, Sector::Full)?,
    );
    Ok((
        half <= 1e-10 && split > 0.01,
        format!("ty = 0 half-shift {half:.1e}, ty = 1 half-shift {split:.3}"),
    ))
}

fn stokes(ctx: &Ctx) -> Result<Outcome> {
    let lat = ctx.moebius()?;
    let mut rng = ctx.rng(8);
    let all_faces: Vec<_> = faces(&lat).collect();
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let flat = apply_gauge_transform(
            &uniform_flux_field(&lat, rng.random_range(-1.0..1.0)),
            &random_gauge(&lat, &mut rng),
        )?;
        let face = all_faces[rng.random_range(0..all_faces.len())];
        let kicked = add_face_flux(&flat, face, rng.random_range(-PI..PI))?;
        let a = random_winding_loop(&lat, &mut rng, 2, RowBand::AvoidCenter)?;
        let b = random_winding_loop(&lat, &mut rng, 2, RowBand::AvoidCenter)?;
        let r = random_rectangle_loop(&lat, &mut rng, RowBand::AvoidCenter)?;
        let s = random_rectangle_loop(&lat, &mut rng, RowBand::AvoidCenter)?;
        for field in [&flat, &kicked] {
            worst = worst.max(stokes_defect(field, &a, &b)?.abs());
            worst = worst.max(stokes_defect(field, &r, &s)?.abs());
        }
    }
    Ok((worst <= 1e-12, format!("max |defect| {worst:.1e}")))
}

fn solver(ctx: &Ctx) -> Result<Outcome> {
    let lat = ctx.lattice(48, 9, StripTopology::Moebius)?;
    let h = assemble(
        &lat,
        &uniform_flux_field(&lat, 0.25),
        HoppingParams::default(),
        &PotentialField::zero(&lat),
    )?;
    let cfg = SolverConfig {
        seed: ctx.seed,
        ..SolverConfig::with_k(6)
    };
    let lanczos = lanczos_lowest(&h, &cfg)?;
    let dense = dense_eigenvalues(&h)?;
    let solver_dev = max_dev(&lanczos.values, &dense[..6]);
    let mut ring_dev = 0.0f64;
    for nx in [3, 4, 8, 16] {
        let ring = StripLattice::new(nx, 1, StripTopology::Annulus)?;
        for f in [0.0, 0.25, 0.5] {
            let e = sector_spectrum(&ring, HoppingParams::new(1.0, 0.0)?, f, Sector::Full)?;
            ring_dev = ring_dev.max(max_dev(&e, &ring_spectrum_oracle(nx, f)));
        }
    }
    Ok((
        solver_dev <= 1e-8 && ring_dev <= 1e-10,
        format!("Lanczos vs dense (n = 432) {solver_dev:.1e}, rings vs closed form {ring_dev:.1e}"),
    ))
}

type CheckFn = fn(&Ctx) -> Result<Outcome>;

const CHECKS: [(&str, CheckFn); 9] = [
    ("flatness", flatness),
    ("gauge-invariance", gauge_invariance),
    ("homology-invariance", homology),
    ("periodicity", periodicity),
    ("sector-completeness", sector_completeness),
    ("annulus-equivalence", annulus_equivalence),
    ("ladder-periodicity", ladder),
    ("stokes-defect", stokes),
    ("solver-cross-validation", solver),
];

/// Runs every check, printing one line each. Returns whether all passed.
pub fn run<W: Write>(mut out: W, seed: u64, broken_seam: bool) -> io::Result<bool> {
    let ctx = Ctx { seed, broken_seam };
    let mut passed = 0;
    for (name, check) in CHECKS {
        let (ok, detail) = check(&ctx).unwrap_or_else(|e| (false, format!("error: {e}")));
        writeln!(out, "{} {name}: {detail}", if ok { "PASS" } else { "FAIL" })?;
        passed += ok as usize;
    }
    writeln!(out, "{passed}/{} checks passed", CHECKS.len())?;
    Ok(passed == CHECKS.len())
}
