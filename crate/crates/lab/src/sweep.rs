//! Error-term sweep over log-spaced `X`, resumable through the lattice cache.

use anyhow::Result;
use cdlab_core::error_terms::{self, CircleForm, Problem};
use rayon::prelude::*;

use crate::cache::LatticeCache;
use crate::output::{Cell, Table};

pub const COLUMNS: [&str; 11] = [
    "x",
    "lattice_count",
    "divisor_sum",
    "delta",
    "r_error",
    "delta_over_sqrt_x",
    "r_over_sqrt_x",
    "hardy_ratio",
    "delta_sawtooth",
    "r_sawtooth",
    "r_sawtooth_cancelling",
];

/// Points handled between cache appends.
pub const CHUNK: usize = 256;

/// `n` log-spaced integers from `lo` to `hi` inclusive, deduplicated.
pub fn log_spaced(lo: u64, hi: u64, n: usize) -> Vec<u64> {
    if lo >= hi || n < 2 {
        return if lo <= hi { vec![lo] } else { Vec::new() };
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut xs: Vec<u64> = (0..n)
        .map(|i| ((a + (b - a) * i as f64 / (n - 1) as f64).exp().round() as u64).clamp(lo, hi))
        .collect();
    xs[0] = lo;
    xs[n - 1] = hi;
    xs.dedup();
    xs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepStatus {
    Complete,
    Stopped { done: usize, total: usize },
}

fn row(x: u64, lattice: u128) -> Result<Vec<Cell>> {
    let divisor = error_terms::divisor_sum(x)?;
    let delta = divisor as f64 - error_terms::divisor_main_term(x);
    let r = lattice as f64 - error_terms::circle_main_term(x);
    let xf = x as f64;
    let hardy = if x >= 2 { r.abs() / (xf * xf.ln()).powf(0.25) } else { f64::NAN };
    Ok(vec![
        x.into(),
        lattice.into(),
        divisor.into(),
        delta.into(),
        r.into(),
        (delta / xf.sqrt()).into(),
        (r / xf.sqrt()).into(),
        hardy.into(),
        error_terms::error_via_sawtooth(Problem::Divisor, x, CircleForm::Corrected)?.into(),
        error_terms::error_via_sawtooth(Problem::Circle, x, CircleForm::Corrected)?.into(),
        error_terms::error_via_sawtooth(Problem::Circle, x, CircleForm::Cancelling)?.into(),
    ])
}

/// Rows for `xs`, in order. Lattice counts come from `cache` when present and
/// are appended to it a chunk at a time. With `stop_after`, returns early
/// once that many points are done.
pub fn error_term_sweep(xs: &[u64], mut cache: Option<&mut LatticeCache>, stop_after: Option<usize>) -> Result<(Table, SweepStatus)> {
    let mut table = Table::new("error_terms", &COLUMNS);
    let limit = stop_after.unwrap_or(usize::MAX).min(xs.len());
    for chunk in xs[..limit].chunks(CHUNK) {
        let cached: Vec<Option<u128>> = chunk.iter().map(|&x| cache.as_deref().and_then(|c| c.get(x))).collect();
        let rows: Vec<(Vec<Cell>, Option<(u64, u128)>)> = chunk
            .par_iter()
            .zip(cached.par_iter())
            .map(|(&x, hit)| -> Result<_> {
                let (count, fresh) = match hit {
                    Some(c) => (*c, None),
                    None => {
                        let c = error_terms::lattice_count(x)?;
                        (c, Some((x, c)))
                    }
                };
                Ok((row(x, count)?, fresh))
            })
            .collect::<Result<_>>()?;
        if let Some(c) = cache.as_deref_mut() {
            let fresh: Vec<(u64, u128)> = rows.iter().filter_map(|(_, f)| *f).collect();
            c.append(&fresh)?;
        }
        for (r, _) in rows {
            table.push(r);
        }
    }
    let status = if limit < xs.len() { SweepStatus::Stopped { done: limit, total: xs.len() } } else { SweepStatus::Complete };
    Ok((table, status))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn log_spacing() {
        assert_eq!(log_spaced(7, 7, 100), vec![7]);
        assert!(log_spaced(8, 7, 100).is_empty());
        let xs = log_spaced(1000, 1_000_000, 4);
        assert_eq!(xs, vec![1000, 10_000, 100_000, 1_000_000]);
        let dense = log_spaced(1, 50, 1000);
        assert_eq!(dense, (1..=50).collect::<Vec<_>>());
    }

    #[test]
    fn single_point_gives_single_row() {
        let (t, status) = error_term_sweep(&[1000], None, None).unwrap();
        assert_eq!(status, SweepStatus::Complete);
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.rows[0][1], Cell::Int(3149));
    }

    #[test]
    fn stopped_then_resumed_matches_fresh() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lc");
        let xs = log_spaced(100, 200_000, 700);
        let (fresh, _) = error_term_sweep(&xs, None, None).unwrap();
        let (mut cache, _) = LatticeCache::open(&path, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let (part, status) = error_term_sweep(&xs, Some(&mut cache), Some(300)).unwrap();
        assert_eq!(status, SweepStatus::Stopped { done: 300, total: xs.len() });
        assert_eq!(part.rows[..], fresh.rows[..300]);
        drop(cache);
        let (mut cache, _) = LatticeCache::open(&path, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(cache.len(), 300);
        let (full, status) = error_term_sweep(&xs, Some(&mut cache), None).unwrap();
        assert_eq!(status, SweepStatus::Complete);
        assert!(full.same(&fresh));
        assert_eq!(cache.len(), xs.len());
    }
}
