//! Signal-level slots of the relay-free baselines.

use num_complex::Complex64;

use crate::model::SlotChannels;
use crate::numerics::{mat_vec, solve_vec, ComplexMatrix, LuDecomposition, NumericsError};

pub(crate) struct DirectOutcome {
    pub transmitted: Vec<Complex64>,
    /// `(user, received, recovered)`.
    pub users: Vec<(usize, Vec<Complex64>, Vec<Complex64>)>,
    pub interference_residual: f64,
}

/// One user served from the first `N` antennas.
pub(crate) fn single_user_slot(
    ch: &SlotChannels,
    user: usize,
    s: &[Complex64],
) -> Result<DirectOutcome, NumericsError> {
    let n = s.len();
    let h = ch.user_channel(user).columns(0..n);
    let y = mat_vec(&h, s)?;
    let recovered = solve_vec(&h, &y)?;
    Ok(DirectOutcome {
        transmitted: s.to_vec(),
        users: vec![(user, y, recovered)],
        interference_residual: 0.0,
    })
}

/// Zero-forcing over all users: user `k` reads its `streams[k]` symbols off
/// its first `streams[k]` antennas. Needs `streams[k] <= N`.
pub(crate) fn zero_forcing_slot(
    ch: &SlotChannels,
    streams: &[usize],
    s: &[Complex64],
) -> Result<DirectOutcome, NumericsError> {
    let full: Vec<ComplexMatrix> = (0..streams.len()).map(|k| ch.user_channel(k)).collect();
    let rows: Vec<ComplexMatrix> = full.iter().zip(streams).map(|(h, &d)| h.top_rows(d)).collect();
    let refs: Vec<&ComplexMatrix> = rows.iter().collect();
    let g = ComplexMatrix::vstack(&refs)?;
    let x = LuDecomposition::new(&g)?.solve_vec(s)?;

    let mut users = Vec::with_capacity(streams.len());
    let mut residual: f64 = 0.0;
    let mut offset = 0;
    for (k, (h, &d)) in full.iter().zip(streams).enumerate() {
        let y = mat_vec(h, &x)?;
        let recovered = y[..d].to_vec();
        let own = &s[offset..offset + d];
        let r = recovered.iter().zip(own).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        residual = residual.max(r);
        users.push((k, y, recovered));
        offset += d;
    }
    Ok(DirectOutcome {
        transmitted: x,
        users,
        interference_residual: residual,
    })
}
