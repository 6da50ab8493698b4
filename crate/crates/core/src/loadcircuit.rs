//! Tunable load-circuit networks: named topologies, wiring skeletons, and
//! the reduction of a loaded circuit to the effective load matrix it
//! presents at its connection ports.
//!
//! A load circuit is an `N_S + N_C`-port network whose connection ports
//! attach to an environment's tunable ports and whose load ports carry the
//! individual tunable impedances. Interconnection skeletons (wires and
//! junctions only) are represented in the scattering domain, where ideal
//! through-connections exist; their impedance matrix generally does not.
//!
//! The skeleton scattering matrix comes from the port-terminal incidence
//! matrix `B`: the port constraints `V = B v_node` and `B^T I = 0` give
//! `S = 2 B (B^T B)^-1 B^T - I`, an orthogonal projector construction that
//! is symmetric and unitary. A node junction of n wires is the special case
//! `S = (2/n) J - I`. Components with no path to ground have one node
//! potential pinned to zero, which is exact because only potential
//! differences enter the port quantities.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{NetError, Result};
use crate::linalg::{checked_inverse, CMatrix, DEFAULT_COND_CAP};
use crate::network::{MultiportNetwork, Rep};
use crate::partition::PortPartition;
use crate::termination::{schur_reduce, terminate_s_gamma, LoadVector};

/// Connectivity class of a load circuit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    /// Each connection port wired to its own load port only.
    Diagonal,
    /// Every connection port grounded-loaded and pairwise loaded.
    FullyConnected,
    /// Fully connected within consecutive groups of the given sizes.
    GroupConnected(Vec<usize>),
    /// Two connection ports, one series and two shunt loads.
    PiNetwork,
    Custom,
}

/// One end of a two-terminal branch slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BranchEnd {
    Node(usize),
    /// The string `"gnd"` in the skeleton JSON form.
    Ground(GroundTag),
}

/// Serde token for the literal `"gnd"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroundTag {
    #[serde(rename = "gnd")]
    Gnd,
}

/// Ideal-wire wiring graph: junction nodes, the node each connection port
/// attaches to, and the branch slots that become load ports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Skeleton {
    pub nodes: usize,
    /// `external[k]` is the node carrying connection port `k`.
    pub external: Vec<usize>,
    /// Branch slots in load-port order: `[i, j]` joins two nodes,
    /// `[i, "gnd"]` joins node `i` to ground.
    pub branches: Vec<(usize, BranchEnd)>,
}

impl Skeleton {
    pub fn n_connection(&self) -> usize {
        self.external.len()
    }

    pub fn n_load(&self) -> usize {
        self.branches.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes == 0 {
            return Err(NetError::InvalidSkeleton {
                reason: "skeleton has no nodes".into(),
            });
        }
        if self.external.is_empty() {
            return Err(NetError::InvalidSkeleton {
                reason: "skeleton has no connection ports".into(),
            });
        }
        if self.branches.is_empty() {
            return Err(NetError::InvalidSkeleton {
                reason: "skeleton has no branch slots".into(),
            });
        }
        let mut used = vec![false; self.nodes];
        for &n in &self.external {
            if n >= self.nodes {
                return Err(NetError::InvalidSkeleton {
                    reason: format!("connection port attaches to node {n} of {}", self.nodes),
                });
            }
            if used[n] {
                return Err(NetError::InvalidSkeleton {
                    reason: format!("node {n} carries more than one connection port"),
                });
            }
            used[n] = true;
        }
        for (k, &(a, end)) in self.branches.iter().enumerate() {
            if a >= self.nodes {
                return Err(NetError::InvalidSkeleton {
                    reason: format!("branch {k} references node {a} of {}", self.nodes),
                });
            }
            if let BranchEnd::Node(b) = end {
                if b >= self.nodes {
                    return Err(NetError::InvalidSkeleton {
                        reason: format!("branch {k} references node {b} of {}", self.nodes),
                    });
                }
                if b == a {
                    return Err(NetError::InvalidSkeleton {
                        reason: format!("branch {k} joins node {a} to itself"),
                    });
                }
            }
        }
        Ok(())
    }

    /// Port-terminal incidence matrix, rows = ports (connection ports first,
    /// then branch slots), columns = nodes. Ground terminals have no column.
    fn incidence(&self) -> DMatrix<f64> {
        let nports = self.n_connection() + self.n_load();
        let mut b = DMatrix::<f64>::zeros(nports, self.nodes);
        for (k, &n) in self.external.iter().enumerate() {
            b[(k, n)] = 1.0;
        }
        for (k, &(a, end)) in self.branches.iter().enumerate() {
            let row = self.n_connection() + k;
            b[(row, a)] = 1.0;
            if let BranchEnd::Node(j) = end {
                b[(row, j)] = -1.0;
            }
        }
        b
    }

    /// Nodes to pin at zero potential: one per connected component with no
    /// ground-referenced terminal.
    fn floating_pins(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.nodes).collect();
        fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for &(a, end) in &self.branches {
            if let BranchEnd::Node(b) = end {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra] = rb;
                }
            }
        }
        let mut grounded = vec![false; self.nodes];
        for &n in &self.external {
            grounded[n] = true;
        }
        for &(a, end) in &self.branches {
            if matches!(end, BranchEnd::Ground(_)) {
                grounded[a] = true;
            }
        }
        let mut root_grounded = vec![false; self.nodes];
        for i in 0..self.nodes {
            if grounded[i] {
                let r = find(&mut parent, i);
                root_grounded[r] = true;
            }
        }
        let mut pins = Vec::new();
        let mut root_pinned = vec![false; self.nodes];
        for i in 0..self.nodes {
            let r = find(&mut parent, i);
            if !root_grounded[r] && !root_pinned[r] {
                root_pinned[r] = true;
                pins.push(i);
            }
        }
        pins
    }
}

/// A load circuit: network, (connection, load) partition and topology tag.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadCircuit {
    net: MultiportNetwork,
    partition: PortPartition,
    topology: Topology,
}

impl LoadCircuit {
    pub fn new(net: MultiportNetwork, partition: PortPartition, topology: Topology) -> Result<Self> {
        partition.validate(net.nports())?;
        if partition.n_connection() == 0 {
            return Err(NetError::PartitionMismatch {
                reason: "load circuit has no connection ports".into(),
            });
        }
        if partition.n_connection() + partition.n_load() != net.nports() {
            return Err(NetError::PartitionMismatch {
                reason: "load-circuit partition must consist of connection and load ports only".into(),
            });
        }
        let n_s = partition.n_connection();
        let n_c = partition.n_load();
        let expect = match &topology {
            Topology::Diagonal => Some(n_s),
            Topology::FullyConnected => Some(n_s * (n_s + 1) / 2),
            Topology::GroupConnected(groups) => {
                if groups.iter().sum::<usize>() != n_s {
                    return Err(NetError::PartitionMismatch {
                        reason: "group sizes do not sum to the connection port count".into(),
                    });
                }
                Some(groups.iter().map(|g| g * (g + 1) / 2).sum())
            }
            Topology::PiNetwork => {
                if n_s != 2 {
                    return Err(NetError::PartitionMismatch {
                        reason: "pi network has exactly two connection ports".into(),
                    });
                }
                Some(3)
            }
            Topology::Custom => None,
        };
        if let Some(e) = expect {
            if e != n_c {
                return Err(NetError::PartitionMismatch {
                    reason: format!("topology {topology:?} implies {e} load ports, partition has {n_c}"),
                });
            }
        }
        Ok(LoadCircuit {
            net,
            partition,
            topology,
        })
    }

    pub fn net(&self) -> &MultiportNetwork {
        &self.net
    }

    pub fn partition(&self) -> &PortPartition {
        &self.partition
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn n_connection(&self) -> usize {
        self.partition.n_connection()
    }

    pub fn n_load(&self) -> usize {
        self.partition.n_load()
    }
}

/// Builds the ideal-wire multiport of a wiring skeleton in the scattering
/// domain. The result is lossless and reciprocal by construction; port
/// order is connection ports first, then branch slots in skeleton order.
pub fn build_skeleton(skel: &Skeleton, z0: f64) -> Result<LoadCircuit> {
    build_skeleton_tagged(skel, z0, Topology::Custom)
}

fn build_skeleton_tagged(skel: &Skeleton, z0: f64, topology: Topology) -> Result<LoadCircuit> {
    skel.validate()?;
    let b = skel.incidence();
    let pins = skel.floating_pins();
    let kept: Vec<usize> = (0..skel.nodes).filter(|n| !pins.contains(n)).collect();
    let b_red = b.select_columns(kept.iter());
    let nports = b.nrows();
    let s_real = if b_red.ncols() == 0 {
        // every node pinned: no junction constraints, all ports see opens
        DMatrix::<f64>::identity(nports, nports)
    } else {
        let gram = b_red.transpose() * &b_red;
        let chol = gram.cholesky().ok_or_else(|| NetError::InvalidSkeleton {
            reason: "skeleton junction system is degenerate".into(),
        })?;
        let solved = chol.solve(&b_red.transpose());
        &b_red * solved * 2.0 - DMatrix::<f64>::identity(nports, nports)
    };
    let s = CMatrix::from_fn(nports, nports, |i, j| Complex64::new(s_real[(i, j)], 0.0));
    let n_s = skel.n_connection();
    let n_c = skel.n_load();
    let mut labels: Vec<String> = (0..n_s).map(|k| format!("conn{k}")).collect();
    labels.extend((0..n_c).map(|k| format!("load{k}")));
    let net = MultiportNetwork::from_s(s, z0)?
        .with_labels(labels)?
        .flag_reciprocal(1e-12)?;
    let partition = PortPartition::connection_load(
        (0..n_s).collect(),
        (n_s..n_s + n_c).collect(),
    );
    LoadCircuit::new(net, partition, topology)
}

/// Wiring graph of a named topology, with branch slots in canonical order:
/// ground branches by node index, then node-node branches lexicographically.
pub fn named_skeleton(topology: &Topology, n_s: usize) -> Result<Skeleton> {
    if n_s == 0 {
        return Err(NetError::InvalidSkeleton {
            reason: "topology needs at least one connection port".into(),
        });
    }
    let ground = BranchEnd::Ground(GroundTag::Gnd);
    match topology {
        Topology::Diagonal => Ok(Skeleton {
            nodes: n_s,
            external: (0..n_s).collect(),
            branches: (0..n_s).map(|i| (i, ground)).collect(),
        }),
        Topology::FullyConnected => {
            let mut branches: Vec<(usize, BranchEnd)> = (0..n_s).map(|i| (i, ground)).collect();
            for i in 0..n_s {
                for j in (i + 1)..n_s {
                    branches.push((i, BranchEnd::Node(j)));
                }
            }
            Ok(Skeleton {
                nodes: n_s,
                external: (0..n_s).collect(),
                branches,
            })
        }
        Topology::GroupConnected(groups) => {
            if groups.iter().any(|&g| g == 0) {
                return Err(NetError::InvalidSkeleton {
                    reason: "empty group".into(),
                });
            }
            if groups.iter().sum::<usize>() != n_s {
                return Err(NetError::InvalidSkeleton {
                    reason: format!("group sizes {groups:?} do not sum to {n_s}"),
                });
            }
            let mut branches: Vec<(usize, BranchEnd)> = (0..n_s).map(|i| (i, ground)).collect();
            let mut start = 0usize;
            let mut pairs = Vec::new();
            for &g in groups {
                for i in start..start + g {
                    for j in (i + 1)..start + g {
                        pairs.push((i, j));
                    }
                }
                start += g;
            }
            pairs.sort_unstable();
            branches.extend(pairs.into_iter().map(|(i, j)| (i, BranchEnd::Node(j))));
            Ok(Skeleton {
                nodes: n_s,
                external: (0..n_s).collect(),
                branches,
            })
        }
        Topology::PiNetwork => {
            if n_s != 2 {
                return Err(NetError::InvalidSkeleton {
                    reason: "pi network has exactly two connection ports".into(),
                });
            }
            Ok(Skeleton {
                nodes: 2,
                external: vec![0, 1],
                branches: vec![(0, ground), (1, ground), (0, BranchEnd::Node(1))],
            })
        }
        Topology::Custom => Err(NetError::InvalidSkeleton {
            reason: "custom topology has no canonical skeleton".into(),
        }),
    }
}

/// Builds a named load-circuit topology as an exact scattering-domain
/// skeleton.
pub fn build_named(topology: Topology, n_s: usize, z0: f64) -> Result<LoadCircuit> {
    let skel = named_skeleton(&topology, n_s)?;
    build_skeleton_tagged(&skel, z0, topology)
}

/// Impedance-domain stand-in for the diagonal topology: each connection
/// port and its load port share a node held to ground through the large
/// shunt impedance `c`. The effective load collapses to
/// `theta * c / (c + theta)`, i.e. to `theta` with relative error ~1/c.
pub fn diagonal_shunt_z(n_s: usize, z0: f64, c: f64) -> Result<LoadCircuit> {
    if n_s == 0 {
        return Err(NetError::InvalidSkeleton {
            reason: "topology needs at least one connection port".into(),
        });
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(NetError::InvalidConfig {
            reason: format!("shunt impedance must be positive and finite, got {c}"),
        });
    }
    let n = 2 * n_s;
    let mut z = CMatrix::zeros(n, n);
    let cc = Complex64::new(c, 0.0);
    for k in 0..n_s {
        z[(k, k)] = cc;
        z[(k, n_s + k)] = cc;
        z[(n_s + k, k)] = cc;
        z[(n_s + k, n_s + k)] = cc;
    }
    let mut labels: Vec<String> = (0..n_s).map(|k| format!("conn{k}")).collect();
    labels.extend((0..n_s).map(|k| format!("load{k}")));
    let net = MultiportNetwork::from_z(z, z0)?
        .with_labels(labels)?
        .flag_reciprocal(1e-12)?;
    let partition = PortPartition::connection_load((0..n_s).collect(), (n_s..n).collect());
    LoadCircuit::new(net, partition, Topology::Diagonal)
}

/// Default shunt-to-ground scale factor for [`diagonal_shunt_z`], as a
/// multiple of the reference impedance.
pub const DEFAULT_SHUNT_C_FACTOR: f64 = 1e6;

/// Effective load matrix the circuit presents at its connection ports once
/// the load ports are closed with `psi`:
/// `Phi = Z_cc' - Z_cl (Z_ll + Psi)^-1 Z_lc` in the impedance domain, or the
/// equivalent scattering-domain reduction followed by conversion when the
/// circuit has no impedance matrix.
pub fn effective_phi(lc: &LoadCircuit, psi: &LoadVector) -> Result<CMatrix> {
    if psi.len() != lc.n_load() {
        return Err(NetError::DimensionMismatch {
            reason: format!("{} loads for {} load ports", psi.len(), lc.n_load()),
        });
    }
    match lc.net.rep() {
        Rep::Impedance => {
            let (phi, _cond) = schur_reduce(
                lc.net.matrix(),
                &lc.partition.connection,
                &lc.partition.load,
                &psi.diag(),
            )?;
            Ok(phi)
        }
        Rep::Scattering => {
            let gamma = psi.reflection(lc.net.z0())?;
            let reduce_part = PortPartition {
                transmit: lc.partition.connection.clone(),
                ris: lc.partition.load.clone(),
                ..Default::default()
            };
            let (reduced, _) = terminate_s_gamma(&lc.net, &reduce_part, &gamma)?;
            let z = reduced.s_to_z()?;
            Ok(z.matrix().clone())
        }
    }
}

/// Independent route to the effective load matrix: assemble the node
/// admittance matrix of the loaded wiring graph and invert it.
///
/// `Y_ii` sums the admittances of the branches at node `i`, `Y_ij` is minus
/// the admittance joining nodes `i` and `j`, and the effective matrix is
/// the connection-node block of `Y^-1`.
pub fn phi_nodal_oracle(skel: &Skeleton, psi: &LoadVector) -> Result<CMatrix> {
    skel.validate()?;
    if psi.len() != skel.n_load() {
        return Err(NetError::DimensionMismatch {
            reason: format!("{} loads for {} branch slots", psi.len(), skel.n_load()),
        });
    }
    let mut y = CMatrix::zeros(skel.nodes, skel.nodes);
    for (k, &(a, end)) in skel.branches.iter().enumerate() {
        let theta = psi.thetas()[k];
        if theta.norm() == 0.0 {
            return Err(NetError::InvalidLoad {
                reason: format!("branch {k} load is zero; admittance undefined"),
            });
        }
        let adm = Complex64::new(1.0, 0.0) / theta;
        y[(a, a)] += adm;
        if let BranchEnd::Node(b) = end {
            y[(b, b)] += adm;
            y[(a, b)] -= adm;
            y[(b, a)] -= adm;
        }
    }
    let (y_inv, _cond) =
        checked_inverse(&y, DEFAULT_COND_CAP).map_err(|_| NetError::SingularNodal)?;
    Ok(CMatrix::from_fn(
        skel.external.len(),
        skel.external.len(),
        |p, q| y_inv[(skel.external[p], skel.external[q])],
    ))
}
