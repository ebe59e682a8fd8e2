//! Signal-level relay slots.
//!
//! In an elimination slot the base station sends every cluster at once. The
//! relay decodes the full symbol vector from its `M` receive antennas,
//! rebuilds the inter-cluster interference each user sees, and sends a
//! cancelling signal from its omni antennas. A cluster wider than `N` leaves
//! its user with too few equations; the relay's directional antennas cancel
//! the trailing streams so the user can solve for the first `N`, and the
//! erased streams are delivered later in a retrospective slot.

use num_complex::Complex64;

use crate::model::{ClusterPlan, SlotChannels};
use crate::numerics::{mat_mul, mat_vec, solve_vec, ComplexMatrix, NumericsError};

pub use super::schedule::Group;

type Result<T> = std::result::Result<T, NumericsError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cancellation {
    /// Two served users; each user's cancellation is routed through its
    /// partner's omni channel. Omni array of `N` antennas.
    Pairwise,
    /// One joint inversion of all users' omni channels (`KN` antennas).
    Stacked,
}

#[derive(Debug, Clone, Copy)]
pub struct RelaySlot<'a> {
    /// Channels the signals actually travel through.
    pub channels: &'a SlotChannels,
    /// Channels the relay precodes with. Same as `channels` unless CSIT is
    /// deliberately stale.
    pub relay_csi: &'a SlotChannels,
    pub plan: &'a ClusterPlan,
    pub groups: &'a [Group],
    pub cancellation: Cancellation,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupOutcome {
    pub user: usize,
    pub cluster: usize,
    /// Signal after omni and directional relay contributions.
    pub received: Vec<Complex64>,
    /// Symbols solved in this slot: the first `min(size, N)` of the cluster.
    pub decoded: Vec<Complex64>,
    /// Relay's copies of the erased trailing streams, for later delivery.
    pub erased: Vec<Complex64>,
    pub directional_tx: Option<Vec<Complex64>>,
    pub interference_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelaySlotOutcome {
    /// Relay's estimate of the full `M`-symbol vector.
    pub relay_estimate: Vec<Complex64>,
    pub omni_tx: Vec<Complex64>,
    pub groups: Vec<GroupOutcome>,
}

impl RelaySlot<'_> {
    /// Runs the slot for base-station vector `x` (length `M`, cluster order).
    pub fn run(&self, x: &[Complex64]) -> Result<RelaySlotOutcome> {
        let (ch, csi, plan, n) = (self.channels, self.relay_csi, self.plan, self.n);
        if self.cancellation == Cancellation::Pairwise {
            assert_eq!(self.groups.len(), 2, "pairwise cancellation serves two users");
        }
        let clusters: Vec<&[Complex64]> = (0..plan.len()).map(|c| &x[plan.range(c)]).collect();

        // Raw user signals: every cluster reaches every user.
        let raw: Vec<Vec<Complex64>> = self
            .groups
            .iter()
            .map(|g| received_from(ch, plan, &clusters, g.user, None))
            .collect::<Result<_>>()?;

        let relay_rx = mat_vec(&ch.h_br, x)?;
        let relay_estimate = solve_vec(&ch.h_br, &relay_rx)?;
        let est: Vec<&[Complex64]> = (0..plan.len()).map(|c| &relay_estimate[plan.range(c)]).collect();

        // Interference each user would see, rebuilt from the relay's CSI.
        let interference: Vec<Vec<Complex64>> = self
            .groups
            .iter()
            .map(|g| received_from(csi, plan, &est, g.user, Some(g.cluster)))
            .collect::<Result<_>>()?;

        let omni_tx = match self.cancellation {
            Cancellation::Pairwise => {
                let mut acc = vec![Complex64::new(0.0, 0.0); csi.h_romni[0].cols()];
                for (g, i_u) in self.groups.iter().zip(&interference) {
                    let part = solve_vec(&csi.h_romni[g.user], i_u)?;
                    acc.iter_mut().zip(part).for_each(|(a, p)| *a -= p);
                }
                acc
            }
            Cancellation::Stacked => {
                let rows: Vec<&ComplexMatrix> = self.groups.iter().map(|g| &csi.h_romni[g.user]).collect();
                let stacked = ComplexMatrix::vstack(&rows)?;
                let rhs: Vec<Complex64> = interference.iter().flatten().copied().collect();
                solve_vec(&stacked, &rhs)?.into_iter().map(|v| -v).collect()
            }
        };

        let mut groups = Vec::with_capacity(self.groups.len());
        for (idx, (g, y)) in self.groups.iter().zip(raw).enumerate() {
            let omni_rx = mat_vec(&ch.h_romni[g.user], &omni_tx)?;
            let mut y_bar: Vec<Complex64> = y.iter().zip(&omni_rx).map(|(a, b)| a + b).collect();

            let h_eq = self.equivalent_channel(ch, idx)?;
            let own = clusters[g.cluster];
            let clean = mat_vec(&h_eq, own)?;
            let interference_residual = norm_diff(&y_bar, &clean);

            let size = plan.sizes[g.cluster];
            let (decoded, erased, directional_tx) = if size > n {
                let h_eq_csi = self.equivalent_channel(csi, idx)?;
                let tail = h_eq_csi.columns(n..size);
                let erased_est = &est[g.cluster][n..];
                let target: Vec<Complex64> = mat_vec(&tail, erased_est)?.into_iter().map(|v| -v).collect();
                let dir = solve_vec(&csi.h_rdir[g.user], &target)?;
                let dir_rx = mat_vec(&ch.h_rdir[g.user], &dir)?;
                y_bar.iter_mut().zip(&dir_rx).for_each(|(a, b)| *a += b);
                let decoded = solve_vec(&h_eq.columns(0..n), &y_bar)?;
                (decoded, erased_est.to_vec(), Some(dir))
            } else {
                let decoded = solve_vec(&h_eq.top_rows(size), &y_bar[..size])?;
                (decoded, Vec::new(), None)
            };
            groups.push(GroupOutcome {
                user: g.user,
                cluster: g.cluster,
                received: y_bar,
                decoded,
                erased,
                directional_tx,
                interference_residual,
            });
        }
        Ok(RelaySlotOutcome {
            relay_estimate,
            omni_tx,
            groups,
        })
    }

    /// Channel from a group's own cluster after omni cancellation.
    fn equivalent_channel(&self, ch: &SlotChannels, idx: usize) -> Result<ComplexMatrix> {
        let g = self.groups[idx];
        let direct = &ch.h_user[g.cluster][g.user];
        match self.cancellation {
            Cancellation::Stacked => Ok(direct.clone()),
            Cancellation::Pairwise => {
                // The partner's cancellation term leaks through this user's
                // omni channel.
                let v = self.groups[1 - idx].user;
                let routed = crate::numerics::mat_solve(&ch.h_romni[v], &ch.h_user[g.cluster][v])?;
                direct.sub(&mat_mul(&ch.h_romni[g.user], &routed)?)
            }
        }
    }
}

/// Sum over clusters of `H[c][user] x_c`, optionally skipping one cluster.
fn received_from(
    ch: &SlotChannels,
    plan: &ClusterPlan,
    clusters: &[&[Complex64]],
    user: usize,
    skip: Option<usize>,
) -> Result<Vec<Complex64>> {
    let rows = ch.h_user[0][user].rows();
    let mut y = vec![Complex64::new(0.0, 0.0); rows];
    for (c, (&size, x)) in plan.sizes.iter().zip(clusters).enumerate() {
        if Some(c) == skip || size == 0 {
            continue;
        }
        let part = mat_vec(&ch.h_user[c][user], x)?;
        y.iter_mut().zip(part).for_each(|(a, p)| *a += p);
    }
    Ok(y)
}

fn norm_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Delivery of one user's erased symbols over its directional antennas.
#[derive(Debug, Clone, PartialEq)]
pub struct Delivery {
    pub user: usize,
    pub transmitted: Vec<Complex64>,
    pub received: Vec<Complex64>,
    /// The first `values.len()` received entries.
    pub recovered: Vec<Complex64>,
}

/// Retrospective slot: each user's directional beam is precoded so the user
/// reads its pending symbols directly off its first antennas.
pub fn retrospective_slot(
    channels: &SlotChannels,
    relay_csi: &SlotChannels,
    pending: &[(usize, Vec<Complex64>)],
    n: usize,
) -> Result<Vec<Delivery>> {
    pending
        .iter()
        .map(|(user, values)| {
            assert!(values.len() <= n, "{} pending symbols exceed N = {n}", values.len());
            let mut target = values.clone();
            target.resize(n, Complex64::new(0.0, 0.0));
            let tx = solve_vec(&relay_csi.h_rdir[*user], &target)?;
            let received = mat_vec(&channels.h_rdir[*user], &tx)?;
            Ok(Delivery {
                user: *user,
                recovered: received[..values.len()].to_vec(),
                transmitted: tx,
                received,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{draw_slot_channels, draw_slot_channels_with_layout, NetworkConfig, RelayLayout};
    use crate::numerics::{sample_cn01, RngStream};

    fn symbols(rng: &mut RngStream, m: usize) -> Vec<Complex64> {
        (0..m).map(|_| rng.cn01()).collect()
    }

    fn max_err(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn pairwise_slot_recovers_leading_streams() {
        let cfg = NetworkConfig::with_ample_relay(2, 6, 2).unwrap();
        let plan = ClusterPlan::split(6, 2);
        let mut rng = RngStream::new(21, 0);
        let ch = draw_slot_channels(&cfg, &plan, &mut rng).unwrap();
        let x = symbols(&mut rng, 6);
        let groups = [Group { cluster: 0, user: 0 }, Group { cluster: 1, user: 1 }];
        let slot = RelaySlot {
            channels: &ch,
            relay_csi: &ch,
            plan: &plan,
            groups: &groups,
            cancellation: Cancellation::Pairwise,
            n: 2,
        };
        let out = slot.run(&x).unwrap();
        assert!(max_err(&out.relay_estimate, &x) < 1e-10);
        assert!(max_err(&out.groups[0].decoded, &x[0..2]) < 1e-9);
        assert!(max_err(&out.groups[1].decoded, &x[3..5]) < 1e-9);
        assert_eq!(out.groups[0].erased.len(), 1);
        assert!((out.groups[1].erased[0] - x[5]).norm() < 1e-10);
        assert!(out.groups.iter().all(|g| g.interference_residual < 1e-9));

        let pending = vec![(0, out.groups[0].erased.clone()), (1, out.groups[1].erased.clone())];
        let delivered = retrospective_slot(&ch, &ch, &pending, 2).unwrap();
        assert!((delivered[0].recovered[0] - x[2]).norm() < 1e-9);
        assert!((delivered[1].recovered[0] - x[5]).norm() < 1e-9);
    }

    #[test]
    fn stacked_slot_serves_three_users() {
        let cfg = NetworkConfig::with_ample_relay(3, 9, 2).unwrap();
        let plan = ClusterPlan::split(9, 3);
        let mut rng = RngStream::new(4, 0);
        let ch = draw_slot_channels_with_layout(&cfg, &plan, RelayLayout::stacked(&cfg), &mut rng).unwrap();
        let x = symbols(&mut rng, 9);
        let groups: Vec<Group> = (0..3).map(|u| Group { cluster: u, user: u }).collect();
        let slot = RelaySlot {
            channels: &ch,
            relay_csi: &ch,
            plan: &plan,
            groups: &groups,
            cancellation: Cancellation::Stacked,
            n: 2,
        };
        let out = slot.run(&x).unwrap();
        for (u, g) in out.groups.iter().enumerate() {
            assert!(max_err(&g.decoded, &x[3 * u..3 * u + 2]) < 1e-9);
            assert!(g.interference_residual < 1e-9);
        }
    }

    #[test]
    fn no_cross_channel_means_silent_omni_array() {
        let cfg = NetworkConfig::with_ample_relay(2, 4, 3).unwrap();
        let plan = ClusterPlan::split(4, 2);
        let mut rng = RngStream::new(8, 0);
        let mut ch = draw_slot_channels(&cfg, &plan, &mut rng).unwrap();
        ch.h_user[1][0] = ComplexMatrix::zeros(3, 2);
        ch.h_user[0][1] = ComplexMatrix::zeros(3, 2);
        let x = symbols(&mut rng, 4);
        let groups = [Group { cluster: 0, user: 0 }, Group { cluster: 1, user: 1 }];
        let slot = RelaySlot {
            channels: &ch,
            relay_csi: &ch,
            plan: &plan,
            groups: &groups,
            cancellation: Cancellation::Pairwise,
            n: 3,
        };
        let out = slot.run(&x).unwrap();
        assert!(out.omni_tx.iter().all(|v| v.norm() < 1e-12));
        assert!(max_err(&out.groups[1].decoded, &x[2..4]) < 1e-9);
    }

    #[test]
    fn stale_relay_csi_leaves_interference() {
        let cfg = NetworkConfig::with_ample_relay(2, 4, 3).unwrap();
        let plan = ClusterPlan::split(4, 2);
        let mut rng = RngStream::new(30, 0);
        let ch = draw_slot_channels(&cfg, &plan, &mut rng).unwrap();
        let mut stale = ch.clone();
        stale.h_romni[0] = sample_cn01(&mut rng, 3, 3);
        let x = symbols(&mut rng, 4);
        let groups = [Group { cluster: 0, user: 0 }, Group { cluster: 1, user: 1 }];
        let slot = RelaySlot {
            channels: &ch,
            relay_csi: &stale,
            plan: &plan,
            groups: &groups,
            cancellation: Cancellation::Pairwise,
            n: 3,
        };
        let out = slot.run(&x).unwrap();
        assert!(out.groups.iter().any(|g| g.interference_residual > 1e-3));
    }
}
