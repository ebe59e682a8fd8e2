//! Network topology, antenna clustering, per-slot channel draws and the CSIT
//! delay taxonomy.

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::{sample_cn01, ComplexMatrix, LuDecomposition, RngStream};

/// Consecutive failed draws after which [`draw_slot_channels`] gives up.
pub const RESAMPLE_LIMIT: u32 = 100;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid network configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid data set: {0}")]
    InvalidDataSet(String),
    #[error("channel draw still ill-conditioned after {0} consecutive resamples")]
    ResampleLimitExceeded(u32),
}

pub fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

/// `(K, M, N, Q)`: users, base-station antennas, antennas per user, relay
/// antennas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NetworkConfig {
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub q: usize,
}

impl NetworkConfig {
    pub fn new(k: usize, m: usize, n: usize, q: usize) -> Result<Self, ModelError> {
        let cfg = Self { k, m, n, q };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Configuration whose relay is large enough for every relay scheme.
    pub fn with_ample_relay(k: usize, m: usize, n: usize) -> Result<Self, ModelError> {
        let q = Self::min_relay_antennas(m, n).max(n + k * n).max(2 * k * n).max(m);
        Self::new(k, m, n, q)
    }

    /// `max{M, max{ceil(M/2), N} + 2N}`.
    pub fn min_relay_antennas(m: usize, n: usize) -> usize {
        m.max(ceil_div(m, 2).max(n) + 2 * n)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.k < 2 {
            return Err(ModelError::InvalidConfig(format!("K = {} but at least 2 users are required", self.k)));
        }
        if self.n < 1 || self.m <= self.n {
            return Err(ModelError::InvalidConfig(format!(
                "need M > N >= 1, got M = {}, N = {}",
                self.m, self.n
            )));
        }
        if self.k > self.m {
            return Err(ModelError::InvalidConfig(format!(
                "K = {} exceeds M = {}; some cluster would be empty",
                self.k, self.m
            )));
        }
        let required = Self::min_relay_antennas(self.m, self.n);
        if self.q < required {
            return Err(ModelError::InvalidConfig(format!(
                "relay has Q = {} antennas, needs at least {required}",
                self.q
            )));
        }
        Ok(())
    }

    /// Transceiver antenna ratio `M / N`.
    pub fn rho(&self) -> f64 {
        self.m as f64 / self.n as f64
    }
}

/// Partition of the base-station antennas into per-user clusters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterPlan {
    pub sizes: Vec<usize>,
    pub offsets: Vec<usize>,
}

impl ClusterPlan {
    /// Splits `m` antennas into `clusters` groups of `ceil(m / clusters)`,
    /// with the remainder in the last group. When the leading groups would
    /// overrun `m` the fill saturates, so the sizes always sum to `m`.
    pub fn split(m: usize, clusters: usize) -> Self {
        assert!(clusters >= 1);
        let per = ceil_div(m, clusters);
        let mut sizes = Vec::with_capacity(clusters);
        let mut remaining = m;
        for i in 0..clusters {
            let s = if i + 1 == clusters { remaining } else { per.min(remaining) };
            sizes.push(s);
            remaining -= s;
        }
        let offsets = sizes
            .iter()
            .scan(0, |acc, s| {
                let o = *acc;
                *acc += s;
                Some(o)
            })
            .collect();
        Self { sizes, offsets }
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn total(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn range(&self, cluster: usize) -> std::ops::Range<usize> {
        self.offsets[cluster]..self.offsets[cluster] + self.sizes[cluster]
    }
}

pub fn build_cluster_plan(config: &NetworkConfig) -> ClusterPlan {
    ClusterPlan::split(config.m, config.k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CsitClass {
    Instantaneous,
    ModeratelyDelayed,
    Delayed,
}

/// Classifies CSI by `lambda = t_fb / t_c` and, for `0 < lambda < 1`, by where
/// in the coherence block the feedback lands: with at least `t_fb` of the
/// block still ahead (`position <= t_c - t_fb`) it behaves as instantaneous,
/// later arrivals are moderately delayed.
pub fn classify_csit(t_fb: f64, t_c: f64, position_in_block: f64) -> CsitClass {
    assert!(t_c > 0.0 && t_fb >= 0.0, "need t_c > 0 and t_fb >= 0");
    let lambda = t_fb / t_c;
    if lambda == 0.0 {
        CsitClass::Instantaneous
    } else if lambda >= 1.0 {
        CsitClass::Delayed
    } else if position_in_block <= t_c - t_fb {
        CsitClass::Instantaneous
    } else {
        CsitClass::ModeratelyDelayed
    }
}

/// How many omnidirectional transmit antennas the relay uses. Directional
/// antennas are always `N` per user.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelayLayout {
    pub omni: usize,
}

impl RelayLayout {
    pub fn pairwise(config: &NetworkConfig) -> Self {
        Self { omni: config.n }
    }

    pub fn stacked(config: &NetworkConfig) -> Self {
        Self { omni: config.k * config.n }
    }
}

/// All channel realisations of one coherence slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotChannels {
    /// `h_user[i][k]`: cluster `i` to user `k`, `N x sizes[i]`.
    pub h_user: Vec<Vec<ComplexMatrix>>,
    /// Base station to relay receive antennas, `M x M`.
    pub h_br: ComplexMatrix,
    /// Relay omni antennas to user `k`, `N x omni`.
    pub h_romni: Vec<ComplexMatrix>,
    /// Relay directional antennas aimed at user `k`, `N x N`. No cross terms
    /// exist: directional beams reach only their target.
    pub h_rdir: Vec<ComplexMatrix>,
    /// Redraws needed before this realisation was accepted.
    pub resamples: u32,
}

impl SlotChannels {
    pub fn users(&self) -> usize {
        self.h_romni.len()
    }

    /// Full `N x M` channel from the base station to user `k`.
    pub fn user_channel(&self, k: usize) -> ComplexMatrix {
        let parts: Vec<&ComplexMatrix> = self.h_user.iter().map(|per_user| &per_user[k]).collect();
        ComplexMatrix::hstack(&parts).expect("cluster channels share the row count")
    }

    /// `h_romni` stacked over all users.
    pub fn stacked_omni(&self) -> ComplexMatrix {
        let parts: Vec<&ComplexMatrix> = self.h_romni.iter().collect();
        ComplexMatrix::vstack(&parts).expect("omni channels share the column count")
    }

    fn well_conditioned(&self) -> bool {
        let square_ok = |m: &ComplexMatrix| !m.is_square() || LuDecomposition::new(m).is_ok();
        if !square_ok(&self.h_br) || !self.h_rdir.iter().all(square_ok) || !self.h_romni.iter().all(square_ok) {
            return false;
        }
        let stacked = self.stacked_omni();
        square_ok(&stacked)
    }
}

pub fn draw_slot_channels(
    config: &NetworkConfig,
    plan: &ClusterPlan,
    rng: &mut RngStream,
) -> Result<SlotChannels, ModelError> {
    draw_slot_channels_with_layout(config, plan, RelayLayout::pairwise(config), rng)
}

/// Draws one slot of i.i.d. CN(0,1) channels, redrawing while any square
/// matrix a scheme inverts is near-singular.
pub fn draw_slot_channels_with_layout(
    config: &NetworkConfig,
    plan: &ClusterPlan,
    layout: RelayLayout,
    rng: &mut RngStream,
) -> Result<SlotChannels, ModelError> {
    let (k, m, n) = (config.k, config.m, config.n);
    for attempt in 0..=RESAMPLE_LIMIT {
        let h_user = plan
            .sizes
            .iter()
            .map(|&size| (0..k).map(|_| sample_cn01(rng, n, size)).collect())
            .collect();
        let h_br = sample_cn01(rng, m, m);
        let h_romni = (0..k).map(|_| sample_cn01(rng, n, layout.omni)).collect();
        let h_rdir = (0..k).map(|_| sample_cn01(rng, n, n)).collect();
        let draw = SlotChannels {
            h_user,
            h_br,
            h_romni,
            h_rdir,
            resamples: attempt,
        };
        if draw.well_conditioned() {
            return Ok(draw);
        }
    }
    Err(ModelError::ResampleLimitExceeded(RESAMPLE_LIMIT))
}

/// One data symbol in the transmit queue.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    pub id: usize,
    pub priority: u8,
    pub payload: Complex64,
    pub tx_slot: Option<usize>,
    pub decode_slot: Option<usize>,
    /// Intended receiver.
    pub user: Option<usize>,
    /// Filler appended to complete a period; excluded from delay metrics.
    pub dummy: bool,
}

/// `A` priority-1 symbols followed by `B` priority-5 symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DataSetSpec {
    pub a: usize,
    pub b: usize,
}

impl DataSetSpec {
    pub const HIGH_PRIORITY: u8 = 1;
    pub const LOW_PRIORITY: u8 = 5;

    pub fn new(a: usize, b: usize) -> Result<Self, ModelError> {
        if a + b == 0 {
            return Err(ModelError::InvalidDataSet("A + B must be at least 1".into()));
        }
        Ok(Self { a, b })
    }

    pub fn total(&self) -> usize {
        self.a + self.b
    }

    /// Priority of the `index`-th queued symbol; priority-1 symbols go first.
    pub fn priority_of(&self, index: usize) -> u8 {
        if index < self.a {
            Self::HIGH_PRIORITY
        } else {
            Self::LOW_PRIORITY
        }
    }
}
