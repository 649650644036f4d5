//! Seeded placement of ball centers following a prescribed density.
//!
//! The domain is split into macro-cells of side close to `8a`, each a block
//! of the finest lattice with pitch `≥ 2a` that fits the domain. Each macro-cell
//! receives `N̄ |cell| / V_a` centers in expectation, where `N̄` is the cell
//! average of the density. Counts are rounded by systematic stochastic
//! rounding: one uniform offset `u` is drawn, and cell `c` receives
//! `⌊C_c + u⌋ − ⌊C_{c−1} + u⌋` centers where `C` is the running sum of
//! expected counts. Every cell count has the right expectation and any run
//! of consecutive cells is within one of its expected total. Cells are
//! visited in serpentine order, so consecutive cells are always neighbors and
//! rounding errors cancel locally.
//!
//! Inside a macro-cell the centers occupy a sub-lattice with pitch at least
//! `2a`. Sites are taken in randomly chosen pairs mirrored through the cell
//! center, with opposite jitter of at most a quarter of the slack
//! `pitch − 2a`, so each cell's centers average to the cell center. An odd
//! leftover goes to the most central free site. Separation, containment and
//! determinism follow from the construction without rejection sampling.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::BallConfig;
use crate::{
    ball_volume, DensityProfile, Domain, Error, RefractionProfile, Result, Vec3, PACKING_BOUND,
};

/// Target macro-cell side in units of the ball radius.
pub const MACRO_CELL_FACTOR: f64 = 8.0;

/// Samples per axis used to average the density over a macro-cell.
const DENSITY_SAMPLES: usize = 4;

/// Sites of the finest admissible lattice (pitch `≥ 2a`) per axis.
fn lattice_sites(domain: &Domain, a: f64) -> [usize; 3] {
    let e = domain.extent();
    let mut f = [1usize; 3];
    for (i, fi) in f.iter_mut().enumerate() {
        *fi = (Float::floor(e[i] / (2.0 * a) * (1.0 + 1e-12)) as usize).max(1);
    }
    f
}

/// Number of macro-cells per axis for radius `a`. Macro-cells are blocks of
/// the finest lattice of pitch `≥ 2a`, about `8a` wide.
pub fn macro_cells_per_axis(domain: &Domain, a: f64) -> [usize; 3] {
    let f = lattice_sites(domain, a);
    let per_block = MACRO_CELL_FACTOR / 2.0;
    let mut n = [1usize; 3];
    for i in 0..3 {
        n[i] = (Float::round(f[i] as f64 / per_block) as usize).clamp(1, f[i]);
    }
    n
}

struct MacroCell {
    lo: Vec3,
    size: Vec3,
    mean_density: f64,
    max_density: f64,
}

fn macro_cell(
    domain: &Domain,
    sites: [usize; 3],
    cells: [usize; 3],
    ijk: [usize; 3],
    density: &DensityProfile,
) -> MacroCell {
    let e = domain.extent();
    let mut lo = [0.0; 3];
    let mut size = [0.0; 3];
    for d in 0..3 {
        let pitch = e[d] / sites[d] as f64;
        let start = ijk[d] * sites[d] / cells[d];
        let end = (ijk[d] + 1) * sites[d] / cells[d];
        lo[d] = domain.lo()[d] + start as f64 * pitch;
        size[d] = if end == sites[d] {
            domain.hi()[d] - lo[d]
        } else {
            (end - start) as f64 * pitch
        };
    }
    let (lo, size) = (Vec3(lo), Vec3(size));
    let mut sum = 0.0;
    let mut max = 0.0f64;
    let s = DENSITY_SAMPLES as f64;
    for l in 0..DENSITY_SAMPLES {
        for j in 0..DENSITY_SAMPLES {
            for i in 0..DENSITY_SAMPLES {
                let x = lo
                    + Vec3::new(
                        (i as f64 + 0.5) / s * size[0],
                        (j as f64 + 0.5) / s * size[1],
                        (l as f64 + 0.5) / s * size[2],
                    );
                let v = density.value(x);
                sum += v;
                max = max.max(v);
            }
        }
    }
    MacroCell {
        lo,
        size,
        mean_density: sum / (s * s * s),
        max_density: max,
    }
}

/// Sub-lattice sites per axis for `count` centers in a cell of `size`, with
/// pitch at least `2a` on every axis.
fn sublattice(size: Vec3, count: usize, a: f64) -> Option<[usize; 3]> {
    let cap = [
        Float::floor(size[0] / (2.0 * a) * (1.0 + 1e-12)) as usize,
        Float::floor(size[1] / (2.0 * a) * (1.0 + 1e-12)) as usize,
        Float::floor(size[2] / (2.0 * a) * (1.0 + 1e-12)) as usize,
    ];
    if cap.contains(&0) {
        return None;
    }
    let vol = size[0] * size[1] * size[2];
    let t = Float::cbrt(count as f64 / vol);
    let mut s = [0usize; 3];
    for i in 0..3 {
        s[i] = (Float::ceil(t * size[i] * (1.0 - 1e-12)) as usize).clamp(1, cap[i]);
    }
    while s[0] * s[1] * s[2] < count {
        // Refine the axis with the coarsest pitch that still has room.
        let axis = (0..3)
            .filter(|&i| s[i] < cap[i])
            .max_by(|&i, &j| (size[i] / s[i] as f64).total_cmp(&(size[j] / s[j] as f64)))?;
        s[axis] += 1;
    }
    Some(s)
}

/// Macro-cell indices in boustrophedon order: consecutive entries differ by
/// one step along a single axis.
fn serpentine(cells: [usize; 3]) -> Vec<[usize; 3]> {
    let mut order = Vec::with_capacity(cells[0] * cells[1] * cells[2]);
    let mut row = 0usize;
    for k in 0..cells[2] {
        for jj in 0..cells[1] {
            let j = if k % 2 == 0 { jj } else { cells[1] - 1 - jj };
            for ii in 0..cells[0] {
                let i = if row.is_multiple_of(2) { ii } else { cells[0] - 1 - ii };
                order.push([i, j, k]);
            }
            row += 1;
        }
    }
    order
}

/// Picks `count` of the `s[0] s[1] s[2]` sub-lattice sites, in pairs mirrored
/// through the cell center, and returns each with the sign of its jitter.
fn mirrored_sites(s: [usize; 3], count: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, f64)> {
    let total = s[0] * s[1] * s[2];
    let half = total / 2;
    // Pair p holds sites p and total − 1 − p; with an odd total the middle
    // site is its own mirror image.
    let mut pairs: Vec<usize> = (0..half).collect();
    let mut chosen = Vec::with_capacity(count);
    let mut singles = count % 2;
    if singles == 1 && total % 2 == 1 {
        chosen.push((half, 0.0));
        singles = 0;
    }
    if singles == 1 {
        // Most central pair, ties broken at random.
        let offset = |p: usize| {
            let ijk = [p % s[0], (p / s[0]) % s[1], p / (s[0] * s[1])];
            (0..3)
                .map(|d| {
                    let t = ijk[d] as f64 + 0.5 - 0.5 * s[d] as f64;
                    t * t
                })
                .sum::<f64>()
        };
        pairs.shuffle(rng);
        let best = (0..pairs.len())
            .min_by(|&x, &y| offset(pairs[x]).total_cmp(&offset(pairs[y])))
            .expect("an even site count leaves a free pair");
        let p = pairs.swap_remove(best);
        let site = if rng.gen::<bool>() { p } else { total - 1 - p };
        chosen.push((site, 0.0));
    }
    let (picked, _) = pairs.partial_shuffle(rng, count / 2);
    picked.sort_unstable();
    for &p in picked.iter() {
        chosen.push((p, 1.0));
        chosen.push((total - 1 - p, -1.0));
    }
    chosen
}

/// Places balls of radius `a` with center density `N(x)/V_a` and
/// coefficients `n_m² = ν²(x_m)`. Identical inputs give identical output.
pub fn place_balls(
    density: &DensityProfile,
    nu_sq: &RefractionProfile,
    a: f64,
    domain: &Domain,
    seed: u64,
) -> Result<BallConfig> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::invalid("ball radius must be positive"));
    }
    let e = domain.extent();
    if (0..3).any(|i| e[i] < 2.0 * a) {
        return Err(Error::invalid("domain is thinner than one ball diameter"));
    }
    let sites = lattice_sites(domain, a);
    let cells = macro_cells_per_axis(domain, a);
    let va = ball_volume(a);

    let mut cumulative = 0.0;
    let mut rounding = ChaCha8Rng::seed_from_u64(seed);
    let offset: f64 = rounding.gen();
    let mut previous = Float::floor(offset) as i64;

    let mut centers = Vec::new();
    for ijk in serpentine(cells) {
        let c = ijk[0] + cells[0] * (ijk[1] + cells[1] * ijk[2]);
        let cell = macro_cell(domain, sites, cells, ijk, density);
        let region = || {
            let hi = cell.lo + cell.size;
            format!(
                "macro-cell [{:.4}, {:.4}] x [{:.4}, {:.4}] x [{:.4}, {:.4}]",
                cell.lo[0], hi[0], cell.lo[1], hi[1], cell.lo[2], hi[2]
            )
        };
        if cell.max_density < 0.0 || !cell.max_density.is_finite() {
            return Err(Error::Realizability(format!(
                "density is negative or not finite in {}",
                region()
            )));
        }
        if cell.max_density > PACKING_BOUND {
            return Err(Error::PackingInfeasible {
                region: region(),
                density: cell.max_density,
                bound: PACKING_BOUND,
            });
        }
        let vol = cell.size[0] * cell.size[1] * cell.size[2];
        cumulative += cell.mean_density * vol / va;
        let reached = Float::floor(cumulative + offset) as i64;
        let count = (reached - previous).max(0) as usize;
        previous = reached;
        if count == 0 {
            continue;
        }
        let s = sublattice(cell.size, count, a).ok_or_else(|| Error::PackingInfeasible {
            region: region(),
            density: count as f64 * va / vol,
            bound: PACKING_BOUND,
        })?;

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64 + 1);
        let chosen = mirrored_sites(s, count, &mut rng);
        let pitch = Vec3::new(
            cell.size[0] / s[0] as f64,
            cell.size[1] / s[1] as f64,
            cell.size[2] / s[2] as f64,
        );
        let jitter = Vec3::new(
            0.25 * (pitch[0] - 2.0 * a).max(0.0),
            0.25 * (pitch[1] - 2.0 * a).max(0.0),
            0.25 * (pitch[2] - 2.0 * a).max(0.0),
        );
        // Mirrored sites follow each other; the second reuses the jitter.
        let mut shift = [0.0; 3];
        for &(site, sign) in chosen.iter() {
            if sign > 0.0 {
                for d in 0..3 {
                    shift[d] = if jitter[d] > 0.0 {
                        rng.gen_range(-jitter[d]..=jitter[d])
                    } else {
                        0.0
                    };
                }
            }
            let si = [site % s[0], (site / s[0]) % s[1], site / (s[0] * s[1])];
            let mut x = [0.0; 3];
            for d in 0..3 {
                x[d] = cell.lo[d] + (si[d] as f64 + 0.5) * pitch[d] + sign * shift[d];
            }
            centers.push(Vec3(x));
        }
    }

    let coeffs: Vec<Complex64> = centers.iter().map(|&x| nu_sq.value(x)).collect();
    Ok(BallConfig::new(a, centers, coeffs, domain)?.with_seed(seed))
}
