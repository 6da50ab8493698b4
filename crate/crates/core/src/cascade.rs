//! Joining a radio environment and a load circuit into one network over the
//! antenna and load ports.
//!
//! In the impedance domain the connection of the environment's tunable
//! ports to the circuit's connection ports eliminates the shared interface
//! through `X = (Z_SS + Z'_SS)^-1`:
//!
//! ```text
//! Zc_AA = Z_AA - Z_AS X Z_SA        Zc_AC = Z_AS X Z'_SC
//! Zc_CA = Z'_CS X Z_SA              Zc_CC = Z'_CC - Z'_CS X Z'_SC
//! ```
//!
//! The scattering-domain equivalent is the star product, with the interior
//! inverse `W = (I - S_SS S'_SS)^-1` computed once and reused for all four
//! blocks. Terminating the cascaded network's load ports with a diagonal
//! load vector reproduces the termination of the original environment by
//! the circuit's effective load matrix; that reduction is what lets any
//! interconnected-load problem be handed to a plain diagonal-load solver.

use num_complex::Complex64;

use crate::error::{NetError, Result};
use crate::linalg::{self, checked_inverse, identity, CMatrix, DEFAULT_COND_CAP};
use crate::loadcircuit::LoadCircuit;
use crate::network::{MultiportNetwork, Rep};
use crate::partition::PortPartition;

/// Cascade of environment and load circuit, ports ordered antennas first
/// (original order) then load ports (circuit order).
#[derive(Debug, Clone)]
pub struct CascadeResult {
    pub net: MultiportNetwork,
    /// Antenna sets carried over, load ports in `load`.
    pub partition: PortPartition,
    /// Condition number of the interface matrix inverse, for diagnostics.
    pub x_cond: f64,
}

fn check_shared_z0(a: f64, b: f64) -> Result<()> {
    if a != b {
        return Err(NetError::InvalidConfig {
            reason: format!("cascade participants must share the reference impedance ({a} vs {b})"),
        });
    }
    Ok(())
}

fn cascade_partition(env_part: &PortPartition, antenna: &[usize], n_c: usize) -> Result<PortPartition> {
    let n_a = antenna.len();
    Ok(PortPartition {
        transmit: PortPartition::reindex(&env_part.transmit, antenna)?,
        receive: PortPartition::reindex(&env_part.receive, antenna)?,
        load: (n_a..n_a + n_c).collect(),
        ..Default::default()
    })
}

fn cascade_labels(
    env: &MultiportNetwork,
    antenna: &[usize],
    lc: &LoadCircuit,
) -> Vec<String> {
    let mut labels: Vec<String> = antenna.iter().map(|&i| env.labels()[i].clone()).collect();
    labels.extend(
        lc.partition()
            .load
            .iter()
            .map(|&i| lc.net().labels()[i].clone()),
    );
    labels
}

/// Impedance-domain cascade of `env` (antenna + RIS ports) with the load
/// circuit `lc` (connection + load ports).
pub fn cascade_z(
    env: &MultiportNetwork,
    env_part: &PortPartition,
    lc: &LoadCircuit,
) -> Result<CascadeResult> {
    if env.rep() != Rep::Impedance || lc.net().rep() != Rep::Impedance {
        return Err(NetError::InvalidConfig {
            reason: "cascade_z requires impedance-domain networks on both sides".into(),
        });
    }
    check_shared_z0(env.z0(), lc.net().z0())?;
    env_part.validate(env.nports())?;
    let ris = &env_part.ris;
    if ris.len() != lc.n_connection() {
        return Err(NetError::PartitionMismatch {
            reason: format!(
                "environment has {} tunable ports, circuit has {} connection ports",
                ris.len(),
                lc.n_connection()
            ),
        });
    }
    let antenna = env_part.antenna();
    if antenna.is_empty() {
        return Err(NetError::PartitionMismatch {
            reason: "environment has no antenna ports".into(),
        });
    }

    let z = env.matrix();
    let zl = lc.net().matrix();
    let conn = &lc.partition().connection;
    let load = &lc.partition().load;

    let z_aa = linalg::submatrix(z, &antenna, &antenna);
    let z_as = linalg::submatrix(z, &antenna, ris);
    let z_sa = linalg::submatrix(z, ris, &antenna);
    let z_ss = linalg::submatrix(z, ris, ris);
    let zl_ss = linalg::submatrix(zl, conn, conn);
    let zl_sc = linalg::submatrix(zl, conn, load);
    let zl_cs = linalg::submatrix(zl, load, conn);
    let zl_cc = linalg::submatrix(zl, load, load);

    let interface = &z_ss + &zl_ss;
    let (x, x_cond) = checked_inverse(&interface, DEFAULT_COND_CAP)
        .map_err(|cond| NetError::SingularCascade { cond })?;

    let n_a = antenna.len();
    let n_c = load.len();
    let aa = &z_aa - &z_as * &x * &z_sa;
    let ac = &z_as * &x * &zl_sc;
    let ca = &zl_cs * &x * &z_sa;
    let cc = &zl_cc - &zl_cs * &x * &zl_sc;

    let mut out = CMatrix::zeros(n_a + n_c, n_a + n_c);
    out.view_mut((0, 0), (n_a, n_a)).copy_from(&aa);
    out.view_mut((0, n_a), (n_a, n_c)).copy_from(&ac);
    out.view_mut((n_a, 0), (n_c, n_a)).copy_from(&ca);
    out.view_mut((n_a, n_a), (n_c, n_c)).copy_from(&cc);

    let net = MultiportNetwork::from_z(out, env.z0())?
        .with_labels(cascade_labels(env, &antenna, lc))?;
    Ok(CascadeResult {
        net,
        partition: cascade_partition(env_part, &antenna, n_c)?,
        x_cond,
    })
}

/// Scattering-domain cascade (star product) of `a` over (antenna, tunable)
/// ports with `b` over (connection, load) ports.
pub fn star_s(
    a: &MultiportNetwork,
    a_part: &PortPartition,
    b: &MultiportNetwork,
    b_part: &PortPartition,
) -> Result<(MultiportNetwork, PortPartition)> {
    if a.rep() != Rep::Scattering || b.rep() != Rep::Scattering {
        return Err(NetError::InvalidConfig {
            reason: "star_s requires scattering-domain networks on both sides".into(),
        });
    }
    check_shared_z0(a.z0(), b.z0())?;
    a_part.validate(a.nports())?;
    b_part.validate(b.nports())?;
    let ris = &a_part.ris;
    let conn = &b_part.connection;
    let load = &b_part.load;
    if ris.len() != conn.len() {
        return Err(NetError::PartitionMismatch {
            reason: format!(
                "{} tunable ports joined to {} connection ports",
                ris.len(),
                conn.len()
            ),
        });
    }
    let antenna = a_part.antenna();
    if antenna.is_empty() {
        return Err(NetError::PartitionMismatch {
            reason: "left network has no antenna ports".into(),
        });
    }

    let sa = a.matrix();
    let sb = b.matrix();
    let s_aa = linalg::submatrix(sa, &antenna, &antenna);
    let s_as = linalg::submatrix(sa, &antenna, ris);
    let s_sa = linalg::submatrix(sa, ris, &antenna);
    let s_ss = linalg::submatrix(sa, ris, ris);
    let b_ss = linalg::submatrix(sb, conn, conn);
    let b_sc = linalg::submatrix(sb, conn, load);
    let b_cs = linalg::submatrix(sb, load, conn);
    let b_cc = linalg::submatrix(sb, load, load);

    let n_s = ris.len();
    let interior = identity(n_s) - &s_ss * &b_ss;
    let (w, _cond) = checked_inverse(&interior, DEFAULT_COND_CAP)
        .map_err(|cond| NetError::SingularCascade { cond })?;

    let n_a = antenna.len();
    let n_c = load.len();
    let aa = &s_aa + &s_as * &b_ss * &w * &s_sa;
    let ac = &s_as * (identity(n_s) + &b_ss * &w * &s_ss) * &b_sc;
    let ca = &b_cs * &w * &s_sa;
    let cc = &b_cc + &b_cs * &w * &s_ss * &b_sc;

    let mut out = CMatrix::zeros(n_a + n_c, n_a + n_c);
    out.view_mut((0, 0), (n_a, n_a)).copy_from(&aa);
    out.view_mut((0, n_a), (n_a, n_c)).copy_from(&ac);
    out.view_mut((n_a, 0), (n_c, n_a)).copy_from(&ca);
    out.view_mut((n_a, n_a), (n_c, n_c)).copy_from(&cc);

    let mut labels: Vec<String> = antenna.iter().map(|&i| a.labels()[i].clone()).collect();
    labels.extend(load.iter().map(|&i| b.labels()[i].clone()));
    let net = MultiportNetwork::from_s(out, a.z0())?.with_labels(labels)?;
    Ok((net, cascade_partition(a_part, &antenna, n_c)?))
}

/// Maps an interconnected-load problem onto a diagonal-load problem over
/// the cascaded network: the returned network and partition feed directly
/// into the diagonal termination, channel and optimization paths.
///
/// The cascade stays in the impedance domain when both sides have one, and
/// is carried out in the scattering domain otherwise (ideal-wire skeletons
/// have no impedance matrix); no conversion is forced on the result.
pub fn map_to_dris(
    env: &MultiportNetwork,
    env_part: &PortPartition,
    lc: &LoadCircuit,
) -> Result<(MultiportNetwork, PortPartition)> {
    let (net, part) = if env.rep() == Rep::Impedance && lc.net().rep() == Rep::Impedance {
        let casc = cascade_z(env, env_part, lc)?;
        (casc.net, casc.partition)
    } else {
        let a = env.z_to_s()?;
        let b = lc.net().z_to_s()?;
        star_s(&a, env_part, &b, lc.partition())?
    };
    // the load ports become the tunable set of the mapped problem
    let mapped = PortPartition {
        transmit: part.transmit,
        receive: part.receive,
        ris: part.load,
        ..Default::default()
    };
    Ok((net, mapped))
}
