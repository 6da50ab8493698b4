//! Serde form of the shared network JSON format.
//!
//! ```json
//! {
//!   "z0": 50.0,
//!   "rep": "Z",
//!   "matrix": [[[50.0, 0.0], [25.0, 0.0]], [[25.0, 0.0], [50.0, 0.0]]],
//!   "labels": ["t0", "r0"],
//!   "partition": { "T": [0], "R": [1] }
//! }
//! ```
//!
//! Matrix entries are `[re, im]` pairs, row-major. Partition keys are `T`,
//! `R`, `S` for environments and `Sbar`, `C` for load circuits. Load
//! vectors serialize as a bare list of `[re, im]` pairs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{NetError, Result};
use crate::linalg::CMatrix;
use crate::loadcircuit::{LoadCircuit, Topology};
use crate::network::{MultiportNetwork, Rep};
use crate::partition::PortPartition;
use crate::termination::LoadVector;

/// On-disk form of a port partition.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionFile {
    #[serde(rename = "T", default, skip_serializing_if = "Vec::is_empty")]
    pub t: Vec<usize>,
    #[serde(rename = "R", default, skip_serializing_if = "Vec::is_empty")]
    pub r: Vec<usize>,
    #[serde(rename = "S", default, skip_serializing_if = "Vec::is_empty")]
    pub s: Vec<usize>,
    #[serde(rename = "Sbar", default, skip_serializing_if = "Vec::is_empty")]
    pub sbar: Vec<usize>,
    #[serde(rename = "C", default, skip_serializing_if = "Vec::is_empty")]
    pub c: Vec<usize>,
}

impl From<&PortPartition> for PartitionFile {
    fn from(p: &PortPartition) -> Self {
        PartitionFile {
            t: p.transmit.clone(),
            r: p.receive.clone(),
            s: p.ris.clone(),
            sbar: p.connection.clone(),
            c: p.load.clone(),
        }
    }
}

impl From<&PartitionFile> for PortPartition {
    fn from(p: &PartitionFile) -> Self {
        PortPartition {
            transmit: p.t.clone(),
            receive: p.r.clone(),
            ris: p.s.clone(),
            connection: p.sbar.clone(),
            load: p.c.clone(),
        }
    }
}

/// On-disk form of a network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub z0: f64,
    pub rep: Rep,
    /// `[re, im]` pairs, row-major.
    pub matrix: Vec<Vec<(f64, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionFile>,
}

impl NetworkFile {
    pub fn from_network(net: &MultiportNetwork, partition: Option<&PortPartition>) -> Self {
        let n = net.nports();
        let m = net.matrix();
        let matrix = (0..n)
            .map(|i| (0..n).map(|j| (m[(i, j)].re, m[(i, j)].im)).collect())
            .collect();
        NetworkFile {
            z0: net.z0(),
            rep: net.rep(),
            matrix,
            labels: Some(net.labels().to_vec()),
            partition: partition.map(PartitionFile::from),
        }
    }

    /// Reconstructs the network and, when present, its validated partition.
    pub fn to_network(&self) -> Result<(MultiportNetwork, Option<PortPartition>)> {
        let n = self.matrix.len();
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != n {
                return Err(NetError::DimensionMismatch {
                    reason: format!("matrix row {i} has {} entries for {n} ports", row.len()),
                });
            }
        }
        let m = CMatrix::from_fn(n, n, |i, j| {
            Complex64::new(self.matrix[i][j].0, self.matrix[i][j].1)
        });
        let mut net = match self.rep {
            Rep::Impedance => MultiportNetwork::from_z(m, self.z0)?,
            Rep::Scattering => MultiportNetwork::from_s(m, self.z0)?,
        };
        if let Some(labels) = &self.labels {
            net = net.with_labels(labels.clone())?;
        }
        let partition = match &self.partition {
            Some(pf) => {
                let p = PortPartition::from(pf);
                p.validate(n)?;
                Some(p)
            }
            None => None,
        };
        Ok((net, partition))
    }

    /// Interprets the file as a load circuit (requires an `Sbar`/`C`
    /// partition).
    pub fn to_load_circuit(&self) -> Result<LoadCircuit> {
        let (net, partition) = self.to_network()?;
        let partition = partition.ok_or_else(|| NetError::PartitionMismatch {
            reason: "load-circuit file needs a partition with Sbar and C sets".into(),
        })?;
        LoadCircuit::new(net, partition, Topology::Custom)
    }
}

/// Serializes loads as `[[re, im], ...]`.
pub fn loads_to_json(loads: &LoadVector) -> Vec<(f64, f64)> {
    loads.thetas().iter().map(|t| (t.re, t.im)).collect()
}

pub fn loads_from_json(pairs: &[(f64, f64)]) -> Result<LoadVector> {
    LoadVector::new(pairs.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
}

/// Serializes a bare complex matrix as row-major `[re, im]` pairs.
pub fn matrix_to_json(m: &CMatrix) -> Vec<Vec<(f64, f64)>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| (m[(i, j)].re, m[(i, j)].im)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn network_file_round_trip() {
        let z = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(50.0, 1.0),
                Complex64::new(25.0, -2.0),
                Complex64::new(25.0, -2.0),
                Complex64::new(50.0, 3.0),
            ],
        );
        let net = MultiportNetwork::from_z(z, 50.0).unwrap();
        let part = PortPartition::antennas(vec![0], vec![1]);
        let file = NetworkFile::from_network(&net, Some(&part));
        let text = serde_json::to_string_pretty(&file).unwrap();
        let parsed: NetworkFile = serde_json::from_str(&text).unwrap();
        let (net2, part2) = parsed.to_network().unwrap();
        assert_eq!(net.matrix(), net2.matrix());
        assert_eq!(Some(part), part2);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{ "z0": 50.0, "rep": "Z", "matrix": [[[50.0, 0.0]]], "bogus": 1 }"#;
        assert!(serde_json::from_str::<NetworkFile>(text).is_err());
    }

    #[test]
    fn ragged_matrix_is_rejected() {
        let file = NetworkFile {
            z0: 50.0,
            rep: Rep::Impedance,
            matrix: vec![vec![(50.0, 0.0), (1.0, 0.0)], vec![(1.0, 0.0)]],
            labels: None,
            partition: None,
        };
        assert!(file.to_network().is_err());
    }

    #[test]
    fn partition_keys_match_the_documented_names() {
        let p = PortPartition::antenna_ris(vec![0], vec![1], vec![2]);
        let text = serde_json::to_string(&PartitionFile::from(&p)).unwrap();
        assert_eq!(text, r#"{"T":[0],"R":[1],"S":[2]}"#);
        let lc = PortPartition::connection_load(vec![0], vec![1, 2]);
        let text = serde_json::to_string(&PartitionFile::from(&lc)).unwrap();
        assert_eq!(text, r#"{"Sbar":[0],"C":[1,2]}"#);
    }
}
