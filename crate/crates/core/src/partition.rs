//! Named, disjoint port-index sets over a multi-port network.
//!
//! A radio environment is partitioned into transmit, receive and tunable
//! (RIS) ports; a load circuit into connection and load ports. Index sets
//! are stored strictly increasing so block selection and set identity are
//! unambiguous; unsorted input is rejected rather than silently reordered.

use serde::{Deserialize, Serialize};

use crate::error::{NetError, Result};

/// Validates that `set` is strictly increasing and within `0..nports`.
pub fn validate_index_set(set: &[usize], nports: usize) -> Result<()> {
    for (k, &i) in set.iter().enumerate() {
        if i >= nports {
            return Err(NetError::IndexOutOfRange { index: i, nports });
        }
        if k > 0 && set[k - 1] >= i {
            return Err(NetError::PartitionMismatch {
                reason: format!("index set {set:?} is not strictly increasing"),
            });
        }
    }
    Ok(())
}

/// Disjoint named port sets. Empty sets mean "role not present".
///
/// The invariants checked by [`PortPartition::validate`]:
/// the sets are pairwise disjoint, each is strictly increasing, and their
/// union covers exactly the ports of the network the partition describes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct PortPartition {
    /// Transmit antenna ports.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transmit: Vec<usize>,
    /// Receive antenna ports.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub receive: Vec<usize>,
    /// Tunable (RIS) ports, terminated by a load matrix.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ris: Vec<usize>,
    /// Connection ports of a load circuit (attach to the environment's RIS ports).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub connection: Vec<usize>,
    /// Individually loaded ports of a load circuit.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub load: Vec<usize>,
}

impl PortPartition {
    /// Radio-environment partition: transmit, receive and RIS port sets.
    pub fn antenna_ris(transmit: Vec<usize>, receive: Vec<usize>, ris: Vec<usize>) -> Self {
        PortPartition {
            transmit,
            receive,
            ris,
            ..Default::default()
        }
    }

    /// Partition of an already-terminated network: antennas only.
    pub fn antennas(transmit: Vec<usize>, receive: Vec<usize>) -> Self {
        PortPartition {
            transmit,
            receive,
            ..Default::default()
        }
    }

    /// Load-circuit partition: connection ports plus loaded ports.
    pub fn connection_load(connection: Vec<usize>, load: Vec<usize>) -> Self {
        PortPartition {
            connection,
            load,
            ..Default::default()
        }
    }

    fn sets(&self) -> [&[usize]; 5] {
        [
            &self.transmit,
            &self.receive,
            &self.ris,
            &self.connection,
            &self.load,
        ]
    }

    /// Checks all partition invariants against a network of `nports` ports.
    pub fn validate(&self, nports: usize) -> Result<()> {
        let mut seen = vec![false; nports];
        let mut total = 0usize;
        for set in self.sets() {
            validate_index_set(set, nports)?;
            for &i in set {
                if seen[i] {
                    return Err(NetError::PartitionMismatch {
                        reason: format!("port {i} appears in more than one set"),
                    });
                }
                seen[i] = true;
            }
            total += set.len();
        }
        if total != nports {
            return Err(NetError::PartitionMismatch {
                reason: format!("sets cover {total} of {nports} ports"),
            });
        }
        Ok(())
    }

    /// Antenna set: sorted union of transmit and receive ports.
    pub fn antenna(&self) -> Vec<usize> {
        let mut a: Vec<usize> = self
            .transmit
            .iter()
            .chain(self.receive.iter())
            .copied()
            .collect();
        a.sort_unstable();
        a
    }

    pub fn n_transmit(&self) -> usize {
        self.transmit.len()
    }

    pub fn n_receive(&self) -> usize {
        self.receive.len()
    }

    pub fn n_antenna(&self) -> usize {
        self.transmit.len() + self.receive.len()
    }

    pub fn n_ris(&self) -> usize {
        self.ris.len()
    }

    pub fn n_connection(&self) -> usize {
        self.connection.len()
    }

    pub fn n_load(&self) -> usize {
        self.load.len()
    }

    /// Positions of the entries of `subset` within the sorted list `kept`.
    ///
    /// Used to carry a partition over to a network whose ports are the
    /// `kept` subset of the original ports, in ascending original order.
    pub fn reindex(subset: &[usize], kept: &[usize]) -> Result<Vec<usize>> {
        subset
            .iter()
            .map(|&p| {
                kept.binary_search(&p).map_err(|_| NetError::PartitionMismatch {
                    reason: format!("port {p} not among the kept ports"),
                })
            })
            .collect()
    }

    /// Partition of the reduced network after the RIS ports are terminated:
    /// transmit/receive indices re-expressed within the antenna set.
    pub fn after_termination(&self) -> Result<PortPartition> {
        let kept = self.antenna();
        Ok(PortPartition::antennas(
            Self::reindex(&self.transmit, &kept)?,
            Self::reindex(&self.receive, &kept)?,
        ))
    }
}
