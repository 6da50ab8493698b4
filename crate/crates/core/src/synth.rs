//! Seeded generation of reciprocal, passive (optionally lossless) random
//! networks for property tests and ensemble experiments.
//!
//! The scattering matrix is drawn as `S = eta * W D W^T` with `W` a random
//! real orthogonal matrix and `D` diagonal with unit-modulus entries. The
//! congruence by a real orthogonal factor keeps `S` symmetric exactly, and
//! every singular value equals `eta`, so passivity (`eta <= 1`) and
//! losslessness (`eta = 1`) hold by construction rather than statistically.
//!
//! Reproducibility contract: all draws come from `ChaCha8Rng` seeded with
//! the configured 64-bit seed; independent objects use the documented
//! stream ids below, so the same config yields bit-identical output on any
//! platform and any worker count.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{NetError, Result};
use crate::linalg::CMatrix;
use crate::loadcircuit::{LoadCircuit, Topology};
use crate::network::{MultiportNetwork, DEFAULT_Z0};
use crate::partition::PortPartition;
use crate::termination::LoadVector;

/// RNG stream id for environment draws.
pub const STREAM_ENV: u64 = 0;
/// RNG stream id for load-circuit draws.
pub const STREAM_LOAD_CIRCUIT: u64 = 1;
/// RNG stream id for load-vector draws.
pub const STREAM_LOADS: u64 = 2;

/// How the generated ports are partitioned.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionSpec {
    /// Transmit, receive and tunable ports of a radio environment.
    AntennaRis { n_t: usize, n_r: usize, n_s: usize },
    /// Connection and load ports of a load circuit.
    ConnectionLoad { n_s: usize, n_c: usize },
}

impl PartitionSpec {
    pub fn total(&self) -> usize {
        match *self {
            PartitionSpec::AntennaRis { n_t, n_r, n_s } => n_t + n_r + n_s,
            PartitionSpec::ConnectionLoad { n_s, n_c } => n_s + n_c,
        }
    }
}

/// Configuration for one synthesized network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub n_ports: usize,
    pub seed: u64,
    /// Force `eta = 1`.
    #[serde(default)]
    pub lossless: bool,
    /// Spectral norm of the generated scattering matrix, in (0, 1].
    pub absorption: f64,
    pub partition: PartitionSpec,
    #[serde(default = "default_z0")]
    pub z0: f64,
}

fn default_z0() -> f64 {
    DEFAULT_Z0
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_ports == 0 {
            return Err(NetError::InvalidConfig {
                reason: "n_ports must be at least 1".into(),
            });
        }
        if !(self.absorption > 0.0 && self.absorption <= 1.0) {
            return Err(NetError::InvalidConfig {
                reason: format!("absorption must lie in (0, 1], got {}", self.absorption),
            });
        }
        if self.partition.total() != self.n_ports {
            return Err(NetError::InvalidConfig {
                reason: format!(
                    "partition covers {} ports but n_ports is {}",
                    self.partition.total(),
                    self.n_ports
                ),
            });
        }
        Ok(())
    }

    fn eta(&self) -> f64 {
        if self.lossless {
            1.0
        } else {
            self.absorption
        }
    }
}

/// Haar-ish random real orthogonal matrix: QR of a standard normal draw
/// with the sign convention fixed by the diagonal of R.
fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

fn random_symmetric_scattering(n: usize, eta: f64, rng: &mut ChaCha8Rng) -> CMatrix {
    let w = random_orthogonal(n, rng);
    let phases: Vec<Complex64> = (0..n)
        .map(|_| Complex64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU))
        .collect();
    let mut s = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::default();
            for (k, ph) in phases.iter().enumerate() {
                acc += ph * (w[(i, k)] * w[(j, k)]);
            }
            s[(i, j)] = acc * eta;
        }
    }
    // make symmetry bit-exact; the perturbation is at rounding level
    let st = s.transpose();
    (s + st) * Complex64::new(0.5, 0.0)
}

/// Draws a reciprocal, passive radio environment with its port partition
/// (transmit ports first, then receive, then tunable).
pub fn random_env(cfg: &SynthConfig) -> Result<(MultiportNetwork, PortPartition)> {
    cfg.validate()?;
    let PartitionSpec::AntennaRis { n_t, n_r, n_s } = cfg.partition else {
        return Err(NetError::InvalidConfig {
            reason: "random_env needs an antenna/RIS partition spec".into(),
        });
    };
    if n_t + n_r == 0 {
        return Err(NetError::InvalidConfig {
            reason: "environment needs at least one antenna port".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(STREAM_ENV);
    let s = random_symmetric_scattering(cfg.n_ports, cfg.eta(), &mut rng);
    let mut labels: Vec<String> = (0..n_t).map(|i| format!("t{i}")).collect();
    labels.extend((0..n_r).map(|i| format!("r{i}")));
    labels.extend((0..n_s).map(|i| format!("s{i}")));
    let net = MultiportNetwork::from_s(s, cfg.z0)?
        .with_labels(labels)?
        .flag_reciprocal(1e-12)?;
    let partition = PortPartition::antenna_ris(
        (0..n_t).collect(),
        (n_t..n_t + n_r).collect(),
        (n_t + n_r..n_t + n_r + n_s).collect(),
    );
    Ok((net, partition))
}

/// Draws a reciprocal, passive load circuit with a (connection, load)
/// partition; tagged `custom` since the coupling graph is dense.
pub fn random_load_circuit(cfg: &SynthConfig) -> Result<LoadCircuit> {
    cfg.validate()?;
    let PartitionSpec::ConnectionLoad { n_s, n_c } = cfg.partition else {
        return Err(NetError::InvalidConfig {
            reason: "random_load_circuit needs a connection/load partition spec".into(),
        });
    };
    if n_s == 0 {
        return Err(NetError::InvalidSkeleton {
            reason: "load circuit needs at least one connection port".into(),
        });
    }
    if n_c == 0 {
        return Err(NetError::InvalidSkeleton {
            reason: "empty load set".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(STREAM_LOAD_CIRCUIT);
    let s = random_symmetric_scattering(cfg.n_ports, cfg.eta(), &mut rng);
    let mut labels: Vec<String> = (0..n_s).map(|i| format!("conn{i}")).collect();
    labels.extend((0..n_c).map(|i| format!("load{i}")));
    let net = MultiportNetwork::from_s(s, cfg.z0)?
        .with_labels(labels)?
        .flag_reciprocal(1e-12)?;
    let partition = PortPartition::connection_load((0..n_s).collect(), (n_s..n_s + n_c).collect());
    LoadCircuit::new(net, partition, Topology::Custom)
}

/// Draws `n` passive loads: resistance uniform in [0, 200) ohms, reactance
/// uniform in [-200, 200) ohms.
pub fn random_passive_loads(seed: u64, n: usize) -> LoadVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(STREAM_LOADS);
    let thetas = (0..n)
        .map(|_| {
            Complex64::new(
                rng.random::<f64>() * 200.0,
                (rng.random::<f64>() - 0.5) * 400.0,
            )
        })
        .collect();
    LoadVector::new_passive(thetas).expect("draw is passive by construction")
}
