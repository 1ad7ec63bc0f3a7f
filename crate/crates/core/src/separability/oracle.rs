use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::BlockPartition;
use crate::qstate::{gather_indices, Qustring};
use crate::{Error, Result};

/// Largest qubit count accepted by [`sdis_oracle`].
pub const ORACLE_LIMIT: usize = 4;

/// Brute-force separability distance: `grid` from the parameter grid,
/// `schmidt` from exact singular values (two-block partitions only), and
/// `value` the smaller of the two.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleResult {
    pub grid: f64,
    pub schmidt: Option<f64>,
    pub value: f64,
}

/// Exhaustive search for small states, independent of the alternating
/// optimizer. Every block except the largest ranges over a grid of unit
/// vectors (`grid` points per hyperspherical angle and per phase); the
/// largest block is then optimal in closed form.
pub fn sdis_oracle(phi: &Qustring, k: usize, grid: usize) -> Result<OracleResult> {
    let n = phi.n();
    if n > ORACLE_LIMIT {
        return Err(Error::Capability(format!("oracle is limited to n ≤ {ORACLE_LIMIT} (got {n})")));
    }
    if k == 0 || k > n || grid < 2 {
        return Err(Error::InvalidArgument(format!("k = {k}, grid = {grid}")));
    }
    if k == 1 {
        return Ok(OracleResult { grid: 0.0, schmidt: None, value: 0.0 });
    }
    let mut best_grid: f64 = 0.0;
    let mut best_schmidt: Option<f64> = None;
    for part in BlockPartition::enumerate(n, k) {
        best_grid = best_grid.max(grid_overlap(phi, &part, grid));
        if k == 2 {
            let m = phi.split_matrix(&part.blocks()[0])?;
            let s = m.singular_values().max();
            best_schmidt = Some(best_schmidt.map_or(s, |b: f64| b.max(s)));
        }
    }
    let dist = |o: f64| (1.0 - o.min(1.0).powi(2)).max(0.0).sqrt();
    let grid_value = dist(best_grid);
    let schmidt = best_schmidt.map(dist);
    let value = schmidt.map_or(grid_value, |s| s.min(grid_value));
    Ok(OracleResult { grid: grid_value, schmidt, value })
}

fn grid_overlap(phi: &Qustring, part: &BlockPartition, grid: usize) -> f64 {
    let n = phi.n();
    let blocks = part.blocks();
    let largest = (0..blocks.len()).fold(0, |a, j| if blocks[j].len() > blocks[a].len() { j } else { a });
    let local: Vec<Vec<usize>> = blocks.iter().map(|b| gather_indices(n, b)).collect();
    let others: Vec<usize> = (0..blocks.len()).filter(|&j| j != largest).collect();
    let candidates: Vec<Vec<Vec<Complex64>>> =
        others.iter().map(|&j| grid_vectors(1 << blocks[j].len(), grid)).collect();
    let amps = phi.amplitudes();
    let mut pick = vec![0usize; others.len()];
    let mut best: f64 = 0.0;
    let mut v = vec![Complex64::new(0.0, 0.0); 1 << blocks[largest].len()];
    loop {
        v.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        for (x, a) in amps.iter().enumerate() {
            let mut w = *a;
            for (o, &j) in others.iter().enumerate() {
                w *= candidates[o][pick[o]][local[j][x]].conj();
            }
            v[local[largest][x]] += w;
        }
        best = best.max(v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
        let mut o = 0;
        loop {
            if o == pick.len() {
                return best;
            }
            pick[o] += 1;
            if pick[o] < candidates[o].len() {
                break;
            }
            pick[o] = 0;
            o += 1;
        }
    }
}

/// Unit vectors in `C^d` with a real first component: magnitudes from
/// `d − 1` hyperspherical angles on `[0, π/2]`, phases on `[0, 2π)`.
fn grid_vectors(d: usize, grid: usize) -> Vec<Vec<Complex64>> {
    let params = 2 * (d - 1);
    let total = grid.pow(params as u32);
    let angle = |i: usize| std::f64::consts::FRAC_PI_2 * i as f64 / (grid - 1) as f64;
    let phase = |i: usize| 2.0 * std::f64::consts::PI * i as f64 / grid as f64;
    (0..total)
        .map(|mut code| {
            let mut digits = Vec::with_capacity(params);
            for _ in 0..params {
                digits.push(code % grid);
                code /= grid;
            }
            let mut mags = vec![0.0; d];
            let mut rem = 1.0;
            for i in 0..d - 1 {
                let t = angle(digits[i]);
                mags[i] = rem * t.cos();
                rem *= t.sin();
            }
            mags[d - 1] = rem;
            (0..d)
                .map(|i| {
                    let ph = if i == 0 { 0.0 } else { phase(digits[d - 1 + i - 1]) };
                    Complex64::from_polar(mags[i], ph)
                })
                .collect()
        })
        .collect()
}
