//! Partial termination of a port subset by a load matrix, and extraction of
//! the wireless channel from the terminated network.
//!
//! Closing the tunable ports of an environment `Z` with a load matrix `Phi`
//! reduces it to the antenna-port network
//! `Zt = Z_AA - Z_AS (Z_SS + Phi)^-1 Z_SA` (a Schur complement). The channel
//! is the receive/transmit block of the corresponding scattering matrix.
//! The same reduction exists purely in the scattering domain for networks
//! whose impedance matrix does not exist.

use num_complex::Complex64;

use crate::error::{NetError, Result};
use crate::linalg::{self, checked_inverse, identity, CMatrix, DEFAULT_COND_CAP};
use crate::network::{MultiportNetwork, Rep};
use crate::partition::PortPartition;

/// Finite stand-in for an ideal open circuit, in ohms.
///
/// The impedance-domain formulas stay finite with this value; the exact
/// open (reflection coefficient 1) is available through
/// [`terminate_s_gamma`].
pub const OPEN_CIRCUIT_OHMS: f64 = 1e9;

/// An ordered list of individual complex load impedances (ohms).
#[derive(Debug, Clone, PartialEq)]
pub struct LoadVector {
    thetas: Vec<Complex64>,
    passive: bool,
}

impl LoadVector {
    /// Loads without a passivity claim.
    pub fn new(thetas: Vec<Complex64>) -> Result<Self> {
        for (i, t) in thetas.iter().enumerate() {
            if !t.re.is_finite() || !t.im.is_finite() {
                return Err(NetError::InvalidLoad {
                    reason: format!("load {i} is not finite"),
                });
            }
        }
        Ok(LoadVector {
            thetas,
            passive: false,
        })
    }

    /// Loads asserted passive: every `Re(theta_i) >= 0`, checked here.
    pub fn new_passive(thetas: Vec<Complex64>) -> Result<Self> {
        let mut lv = Self::new(thetas)?;
        for (i, t) in lv.thetas.iter().enumerate() {
            if t.re < 0.0 {
                return Err(NetError::InvalidLoad {
                    reason: format!("load {i} has negative resistance {:.3e}", t.re),
                });
            }
        }
        lv.passive = true;
        Ok(lv)
    }

    /// `n` copies of the finite open-circuit stand-in.
    pub fn open_circuit(n: usize) -> Self {
        LoadVector {
            thetas: vec![Complex64::new(OPEN_CIRCUIT_OHMS, 0.0); n],
            passive: true,
        }
    }

    pub fn thetas(&self) -> &[Complex64] {
        &self.thetas
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    pub fn is_passive_flagged(&self) -> bool {
        self.passive
    }

    /// Diagonal load matrix `Psi`.
    pub fn diag(&self) -> CMatrix {
        CMatrix::from_fn(self.len(), self.len(), |i, j| {
            if i == j {
                self.thetas[i]
            } else {
                Complex64::default()
            }
        })
    }

    /// Per-load reflection coefficients `(theta - Z0) / (theta + Z0)`.
    pub fn reflection(&self, z0: f64) -> Result<Vec<Complex64>> {
        self.thetas
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let denom = t + Complex64::new(z0, 0.0);
                if denom.norm() == 0.0 {
                    return Err(NetError::InvalidLoad {
                        reason: format!("load {i} equals -Z0; reflection coefficient undefined"),
                    });
                }
                Ok((t - Complex64::new(z0, 0.0)) / denom)
            })
            .collect()
    }
}

/// Which computation route produced a channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Direct,
    Cascaded,
}

/// Reproducibility tag for a computed channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub config_digest: String,
    pub seed: u64,
}

/// The receive-by-transmit channel matrix with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    h: CMatrix,
    route: Route,
    provenance: Option<Provenance>,
}

impl Channel {
    pub fn new(h: CMatrix, partition: &PortPartition) -> Result<Self> {
        if h.nrows() != partition.n_receive() || h.ncols() != partition.n_transmit() {
            return Err(NetError::DimensionMismatch {
                reason: format!(
                    "channel is {}x{} but partition has {} receivers and {} transmitters",
                    h.nrows(),
                    h.ncols(),
                    partition.n_receive(),
                    partition.n_transmit()
                ),
            });
        }
        Ok(Channel {
            h,
            route: Route::Direct,
            provenance: None,
        })
    }

    pub fn with_route(mut self, route: Route) -> Self {
        self.route = route;
        self
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.h
    }

    pub fn route(&self) -> Route {
        self.route
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }
}

/// Schur-complement reduction shared by termination and load-circuit
/// collapse: `M_kk - M_kd (M_dd + loading)^-1 M_dk`.
pub(crate) fn schur_reduce(
    m: &CMatrix,
    keep: &[usize],
    drop: &[usize],
    loading: &CMatrix,
) -> Result<(CMatrix, f64)> {
    let m_kk = linalg::submatrix(m, keep, keep);
    if drop.is_empty() {
        return Ok((m_kk, 1.0));
    }
    let m_kd = linalg::submatrix(m, keep, drop);
    let m_dd = linalg::submatrix(m, drop, drop);
    let m_dk = linalg::submatrix(m, drop, keep);
    let system = m_dd + loading;
    let (inv, cond) = checked_inverse(&system, DEFAULT_COND_CAP)
        .map_err(|cond| NetError::SingularTermination { cond })?;
    Ok((m_kk - m_kd * inv * m_dk, cond))
}

/// Terminates the RIS ports of an impedance-domain network with the load
/// matrix `phi`, returning the reduced antenna-port network and the carried
/// partition.
pub fn terminate_z(
    net: &MultiportNetwork,
    partition: &PortPartition,
    phi: &CMatrix,
) -> Result<(MultiportNetwork, PortPartition)> {
    if net.rep() != Rep::Impedance {
        return Err(NetError::InvalidConfig {
            reason: "terminate_z requires an impedance-domain network".into(),
        });
    }
    partition.validate(net.nports())?;
    let ris = &partition.ris;
    let antenna = partition.antenna();
    if antenna.is_empty() {
        return Err(NetError::PartitionMismatch {
            reason: "no antenna ports left after termination".into(),
        });
    }
    if phi.nrows() != ris.len() || phi.ncols() != ris.len() {
        return Err(NetError::DimensionMismatch {
            reason: format!(
                "load matrix is {}x{} for {} terminated ports",
                phi.nrows(),
                phi.ncols(),
                ris.len()
            ),
        });
    }
    linalg::ensure_finite(phi)?;
    let (zt, _cond) = schur_reduce(net.matrix(), &antenna, ris, phi)?;
    let labels = antenna.iter().map(|&i| net.labels()[i].clone()).collect();
    let out = MultiportNetwork::from_z(zt, net.z0())?.with_labels(labels)?;
    Ok((out, partition.after_termination()?))
}

/// Scattering-domain termination with explicit per-port reflection
/// coefficients: `St = S_AA + S_AS G (I - S_SS G)^-1 S_SA`.
///
/// This is the route that stays exact for loads with no finite impedance
/// (an ideal open is `gamma = 1`).
pub fn terminate_s_gamma(
    net: &MultiportNetwork,
    partition: &PortPartition,
    gamma: &[Complex64],
) -> Result<(MultiportNetwork, PortPartition)> {
    if net.rep() != Rep::Scattering {
        return Err(NetError::InvalidConfig {
            reason: "terminate_s requires a scattering-domain network".into(),
        });
    }
    partition.validate(net.nports())?;
    let ris = &partition.ris;
    let antenna = partition.antenna();
    if antenna.is_empty() {
        return Err(NetError::PartitionMismatch {
            reason: "no antenna ports left after termination".into(),
        });
    }
    if gamma.len() != ris.len() {
        return Err(NetError::DimensionMismatch {
            reason: format!("{} reflection coefficients for {} ports", gamma.len(), ris.len()),
        });
    }
    let s = net.matrix();
    let s_aa = linalg::submatrix(s, &antenna, &antenna);
    let st = if ris.is_empty() {
        s_aa
    } else {
        let s_as = linalg::submatrix(s, &antenna, ris);
        let s_ss = linalg::submatrix(s, ris, ris);
        let s_sa = linalg::submatrix(s, ris, &antenna);
        let g = CMatrix::from_fn(ris.len(), ris.len(), |i, j| {
            if i == j {
                gamma[i]
            } else {
                Complex64::default()
            }
        });
        let system = identity(ris.len()) - &s_ss * &g;
        let (inv, _cond) = checked_inverse(&system, DEFAULT_COND_CAP)
            .map_err(|cond| NetError::SingularTermination { cond })?;
        s_aa + s_as * g * inv * s_sa
    };
    let labels = antenna.iter().map(|&i| net.labels()[i].clone()).collect();
    let out = MultiportNetwork::from_s(st, net.z0())?.with_labels(labels)?;
    Ok((out, partition.after_termination()?))
}

/// Terminates the RIS ports of a scattering-domain network with individual
/// load impedances.
pub fn terminate_s(
    net: &MultiportNetwork,
    partition: &PortPartition,
    loads: &LoadVector,
) -> Result<(MultiportNetwork, PortPartition)> {
    let gamma = loads.reflection(net.z0())?;
    terminate_s_gamma(net, partition, &gamma)
}

/// Extracts the channel `H = St_RT` from a terminated antenna-port network.
///
/// Impedance-domain networks are converted first via
/// `St = (Zt + Z0 I)^-1 (Zt - Z0 I)`; scattering-domain networks are read
/// directly.
pub fn channel(net: &MultiportNetwork, partition: &PortPartition) -> Result<Channel> {
    partition.validate(net.nports())?;
    if !partition.ris.is_empty() || !partition.connection.is_empty() || !partition.load.is_empty() {
        return Err(NetError::PartitionMismatch {
            reason: "channel extraction expects an antenna-only partition".into(),
        });
    }
    let s_net = net.z_to_s()?;
    let h = s_net.block(&partition.receive, &partition.transmit)?;
    Channel::new(h, partition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cr(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_symmetric(n: usize, seed: u64, scale: f64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = CMatrix::from_fn(n, n, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * cr(scale)
        });
        // symmetrize and push the diagonal toward Z0 for good conditioning
        m = (m.clone() + m.transpose()) * cr(0.5);
        for i in 0..n {
            m[(i, i)] += cr(50.0);
        }
        m
    }

    /// Brute-force oracle: solve the full port system `V = Z I` with
    /// `V_s = -Phi I_s` enforced on the terminated ports, one antenna
    /// excitation at a time.
    fn terminate_oracle(z: &CMatrix, antenna: &[usize], ris: &[usize], phi: &CMatrix) -> CMatrix {
        let na = antenna.len();
        let ns = ris.len();
        let dim = na + 2 * ns;
        let z_aa = linalg::submatrix(z, antenna, antenna);
        let z_as = linalg::submatrix(z, antenna, ris);
        let z_sa = linalg::submatrix(z, ris, antenna);
        let z_ss = linalg::submatrix(z, ris, ris);
        let mut zt = CMatrix::zeros(na, na);
        for k in 0..na {
            // unknowns x = [V_A; V_S; I_S]
            let mut m = CMatrix::zeros(dim, dim);
            let mut rhs = nalgebra::DVector::<Complex64>::zeros(dim);
            for i in 0..na {
                m[(i, i)] = cr(1.0);
                for j in 0..ns {
                    m[(i, na + ns + j)] = -z_as[(i, j)];
                }
                rhs[i] = z_aa[(i, k)];
            }
            for i in 0..ns {
                m[(na + i, na + i)] = cr(1.0);
                for j in 0..ns {
                    m[(na + i, na + ns + j)] = -z_ss[(i, j)];
                }
                rhs[na + i] = z_sa[(i, k)];
            }
            for i in 0..ns {
                m[(na + ns + i, na + i)] = cr(1.0);
                for j in 0..ns {
                    m[(na + ns + i, na + ns + j)] = phi[(i, j)];
                }
            }
            let x = m.lu().solve(&rhs).expect("oracle system solvable");
            for i in 0..na {
                zt[(i, k)] = x[i];
            }
        }
        zt
    }

    #[test]
    fn empty_ris_set_is_identity() {
        let z = random_symmetric(3, 1, 20.0);
        let net = MultiportNetwork::from_z(z.clone(), 50.0).unwrap();
        let part = PortPartition::antenna_ris(vec![0, 1], vec![2], vec![]);
        let (out, after) = terminate_z(&net, &part, &CMatrix::zeros(0, 0)).unwrap();
        assert_eq!(out.matrix(), &z);
        assert_eq!(after.transmit, vec![0, 1]);
        assert_eq!(after.receive, vec![2]);
    }

    #[test]
    fn one_port_elimination_analytic() {
        let z = CMatrix::from_row_slice(2, 2, &[cr(50.0), cr(25.0), cr(25.0), cr(50.0)]);
        let net = MultiportNetwork::from_z(z, 50.0).unwrap();
        let part = PortPartition::antenna_ris(vec![0], vec![], vec![1]);
        let phi = CMatrix::from_element(1, 1, cr(0.0));
        let (out, _) = terminate_z(&net, &part, &phi).unwrap();
        assert!((out.matrix()[(0, 0)] - cr(37.5)).norm() < 1e-12);
    }

    #[test]
    fn matches_linear_system_oracle() {
        for seed in 0..20u64 {
            let z = random_symmetric(4, seed, 30.0);
            let net = MultiportNetwork::from_z(z.clone(), 50.0).unwrap();
            let part = PortPartition::antenna_ris(vec![0], vec![1], vec![2, 3]);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
            let phi = CMatrix::from_fn(2, 2, |i, j| {
                if i == j {
                    c(rng.random::<f64>() * 100.0, (rng.random::<f64>() - 0.5) * 200.0)
                } else {
                    Complex64::default()
                }
            });
            let (out, _) = terminate_z(&net, &part, &phi).unwrap();
            let oracle = terminate_oracle(&z, &[0, 1], &[2, 3], &phi);
            assert!(
                linalg::rel_fro_err(&oracle, out.matrix()) < 1e-12,
                "seed {seed}"
            );
        }
    }

    #[test]
    fn singular_termination_reports_condition() {
        let z = CMatrix::from_row_slice(2, 2, &[cr(50.0), cr(25.0), cr(25.0), cr(50.0)]);
        let net = MultiportNetwork::from_z(z, 50.0).unwrap();
        let part = PortPartition::antenna_ris(vec![0], vec![], vec![1]);
        // Z_SS + phi = 0: a lossless resonance, reported not regularized.
        let phi = CMatrix::from_element(1, 1, cr(-50.0));
        match terminate_z(&net, &part, &phi) {
            Err(NetError::SingularTermination { cond }) => assert!(!cond.is_finite() || cond > 1e12),
            other => panic!("expected SingularTermination, got {other:?}"),
        }
    }

    #[test]
    fn decoupled_ris_leaves_scattering_unchanged() {
        let mut s = CMatrix::zeros(3, 3);
        s[(0, 0)] = c(0.2, 0.1);
        s[(1, 1)] = c(-0.1, 0.3);
        s[(0, 1)] = c(0.4, 0.0);
        s[(1, 0)] = c(0.4, 0.0);
        s[(2, 2)] = c(0.1, -0.2);
        let net = MultiportNetwork::from_s(s.clone(), 50.0).unwrap();
        let part = PortPartition::antenna_ris(vec![0], vec![1], vec![2]);
        let loads = LoadVector::new(vec![c(13.0, -40.0)]).unwrap();
        let (out, _) = terminate_s(&net, &part, &loads).unwrap();
        let expected = linalg::submatrix(&s, &[0, 1], &[0, 1]);
        assert!(linalg::rel_fro_err(&expected, out.matrix()) < 1e-15);
    }

    #[test]
    fn matched_loads_reduce_to_antenna_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = CMatrix::from_fn(3, 3, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * cr(0.4)
        });
        let net = MultiportNetwork::from_s(s.clone(), 50.0).unwrap();
        let part = PortPartition::antenna_ris(vec![0], vec![1], vec![2]);
        let loads = LoadVector::new(vec![cr(50.0)]).unwrap();
        let (out, _) = terminate_s(&net, &part, &loads).unwrap();
        let expected = linalg::submatrix(&s, &[0, 1], &[0, 1]);
        assert!(linalg::rel_fro_err(&expected, out.matrix()) < 1e-15);
    }

    #[test]
    fn scattering_and_impedance_routes_agree() {
        for seed in 100..130u64 {
            let z = random_symmetric(3, seed, 25.0);
            let znet = MultiportNetwork::from_z(z, 50.0).unwrap();
            let part = PortPartition::antenna_ris(vec![0], vec![1], vec![2]);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let theta = c(0.0, (rng.random::<f64>() - 0.5) * 300.0);
            let loads = LoadVector::new(vec![theta]).unwrap();
            let (a, _) = terminate_z(&znet, &part, &loads.diag()).unwrap();
            let a_s = a.z_to_s().unwrap();
            let snet = znet.z_to_s().unwrap();
            let (b, _) = terminate_s(&snet, &part, &loads).unwrap();
            assert!(
                linalg::rel_fro_err(a_s.matrix(), b.matrix()) < 1e-9,
                "seed {seed}"
            );
        }
    }

    #[test]
    fn invalid_load_minus_z0() {
        let loads = LoadVector::new(vec![cr(-50.0)]).unwrap();
        assert!(loads.reflection(50.0).is_err());
    }

    #[test]
    fn passive_load_constructor_rejects_gain() {
        assert!(LoadVector::new_passive(vec![c(-1.0, 5.0)]).is_err());
        assert!(LoadVector::new_passive(vec![c(0.0, -75.0)]).is_ok());
    }

    #[test]
    fn channel_of_matched_network_is_zero() {
        let net = MultiportNetwork::from_z(identity(2) * cr(50.0), 50.0).unwrap();
        let part = PortPartition::antennas(vec![0], vec![1]);
        let ch = channel(&net, &part).unwrap();
        assert!(linalg::fro_norm(ch.matrix()) < 1e-15);
    }

    #[test]
    fn two_antenna_channel_analytic() {
        // (Zt + 50 I)^-1 (Zt - 50 I) solved by hand: H = 4/15.
        let zt = CMatrix::from_row_slice(2, 2, &[cr(50.0), cr(25.0), cr(25.0), cr(50.0)]);
        let net = MultiportNetwork::from_z(zt, 50.0).unwrap();
        let part = PortPartition::antennas(vec![0], vec![1]);
        let ch = channel(&net, &part).unwrap();
        assert_eq!(ch.matrix().nrows(), 1);
        assert!((ch.matrix()[(0, 0)] - cr(4.0 / 15.0)).norm() < 1e-12);
    }

    #[test]
    fn swapped_roles_transpose_the_channel() {
        let z = random_symmetric(4, 77, 15.0);
        let net = MultiportNetwork::from_z(z, 50.0).unwrap();
        let fwd = PortPartition::antennas(vec![0, 1], vec![2, 3]);
        let rev = PortPartition::antennas(vec![2, 3], vec![0, 1]);
        let h_fwd = channel(&net, &fwd).unwrap();
        let h_rev = channel(&net, &rev).unwrap();
        assert!(linalg::rel_fro_err(&h_fwd.matrix().transpose(), h_rev.matrix()) < 1e-12);
    }

    #[test]
    fn channel_rejects_unterminated_partition() {
        let net = MultiportNetwork::from_z(identity(3) * cr(50.0), 50.0).unwrap();
        let part = PortPartition::antenna_ris(vec![0], vec![1], vec![2]);
        assert!(channel(&net, &part).is_err());
    }
}
