//! Multi-port linear networks held as impedance or scattering matrices.
//!
//! A network is a square complex matrix plus a real reference impedance and
//! port labels. The two representations are related by
//! `S = (Z + Z0*I)^-1 (Z - Z0*I)` and `Z = Z0 (I + S)(I - S)^-1`; a network
//! whose `I - S` is singular (an ideal through-connection, for instance) has
//! no impedance representation and must stay in the scattering domain.

use num_complex::Complex64;

use crate::error::{NetError, Result};
use crate::linalg::{
    self, checked_inverse, identity, rel_asymmetry, spectral_norm, CMatrix, DEFAULT_COND_CAP,
};
use crate::partition::validate_index_set;

/// Default single-mode line reference impedance in ohms.
pub const DEFAULT_Z0: f64 = 50.0;

/// Which parameter matrix a [`MultiportNetwork`] stores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Rep {
    /// Impedance parameters (ohms): `V = Z I`.
    #[serde(rename = "Z")]
    Impedance,
    /// Scattering parameters (dimensionless): `b = S a`.
    #[serde(rename = "S")]
    Scattering,
}

/// An N-port linear network at a single frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiportNetwork {
    rep: Rep,
    matrix: CMatrix,
    z0: f64,
    port_labels: Vec<String>,
    reciprocal: bool,
}

/// Result of [`MultiportNetwork::check_properties`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropertyReport {
    pub reciprocal: bool,
    pub passive: bool,
    pub lossless: bool,
    /// `max |M - M^T| / max |M|` of the stored matrix.
    pub max_asymmetry: f64,
    /// Largest singular value of the scattering matrix.
    pub max_singular_value: f64,
    pub tolerance: f64,
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}

impl MultiportNetwork {
    fn new(rep: Rep, matrix: CMatrix, z0: f64) -> Result<Self> {
        let n = matrix.nrows();
        if n == 0 || matrix.ncols() != n {
            return Err(NetError::DimensionMismatch {
                reason: format!("network matrix must be square and non-empty, got {}x{}", n, matrix.ncols()),
            });
        }
        if !(z0 > 0.0) || !z0.is_finite() {
            return Err(NetError::InvalidConfig {
                reason: format!("reference impedance must be positive and finite, got {z0}"),
            });
        }
        linalg::ensure_finite(&matrix)?;
        Ok(MultiportNetwork {
            rep,
            matrix,
            z0,
            port_labels: default_labels(n),
            reciprocal: false,
        })
    }

    /// Network from an impedance matrix in ohms.
    pub fn from_z(matrix: CMatrix, z0: f64) -> Result<Self> {
        Self::new(Rep::Impedance, matrix, z0)
    }

    /// Network from a scattering matrix referenced to `z0`.
    pub fn from_s(matrix: CMatrix, z0: f64) -> Result<Self> {
        Self::new(Rep::Scattering, matrix, z0)
    }

    /// Replaces the default `p0..pN` labels.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.nports() {
            return Err(NetError::DimensionMismatch {
                reason: format!(
                    "{} labels for a {}-port network",
                    labels.len(),
                    self.nports()
                ),
            });
        }
        self.port_labels = labels;
        Ok(self)
    }

    /// Flags the network reciprocal after verifying the stored matrix is
    /// symmetric to within `tol` (relative to its largest entry).
    pub fn flag_reciprocal(mut self, tol: f64) -> Result<Self> {
        let asym = rel_asymmetry(&self.matrix);
        if asym > tol {
            return Err(NetError::InvalidConfig {
                reason: format!("matrix asymmetry {asym:.3e} exceeds reciprocity tolerance {tol:.3e}"),
            });
        }
        self.reciprocal = true;
        Ok(self)
    }

    pub fn nports(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn rep(&self) -> Rep {
        self.rep
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    pub fn labels(&self) -> &[String] {
        &self.port_labels
    }

    pub fn is_flagged_reciprocal(&self) -> bool {
        self.reciprocal
    }

    fn carry_meta(&self, mut out: Self) -> Self {
        out.port_labels = self.port_labels.clone();
        out.reciprocal = self.reciprocal;
        out
    }

    /// Impedance-to-scattering conversion `S = (Z + Z0 I)^-1 (Z - Z0 I)`.
    pub fn z_to_s(&self) -> Result<Self> {
        match self.rep {
            Rep::Scattering => Ok(self.clone()),
            Rep::Impedance => {
                let n = self.nports();
                let z0 = Complex64::new(self.z0, 0.0);
                let shifted = &self.matrix + identity(n) * z0;
                let (inv, _cond) = checked_inverse(&shifted, DEFAULT_COND_CAP)
                    .map_err(|cond| NetError::SingularConversion { cond })?;
                let s = inv * (&self.matrix - identity(n) * z0);
                Ok(self.carry_meta(Self::new(Rep::Scattering, s, self.z0)?))
            }
        }
    }

    /// Scattering-to-impedance conversion `Z = Z0 (I + S)(I - S)^-1`.
    pub fn s_to_z(&self) -> Result<Self> {
        match self.rep {
            Rep::Impedance => Ok(self.clone()),
            Rep::Scattering => {
                let n = self.nports();
                let open = identity(n) - &self.matrix;
                let (inv, _cond) = checked_inverse(&open, DEFAULT_COND_CAP)
                    .map_err(|cond| NetError::SingularConversion { cond })?;
                let z = (identity(n) + &self.matrix) * inv * Complex64::new(self.z0, 0.0);
                Ok(self.carry_meta(Self::new(Rep::Impedance, z, self.z0)?))
            }
        }
    }

    /// Sub-matrix of the stored parameters with rows in `rows` and columns
    /// in `cols`; both index sets must be strictly increasing and in range.
    pub fn block(&self, rows: &[usize], cols: &[usize]) -> Result<CMatrix> {
        validate_index_set(rows, self.nports())?;
        validate_index_set(cols, self.nports())?;
        Ok(linalg::submatrix(&self.matrix, rows, cols))
    }

    /// Reciprocity, passivity and losslessness checks at tolerance `tol`.
    ///
    /// Passivity and losslessness are judged on the scattering matrix; a
    /// `SingularConversion` error propagates if this network is held as Z
    /// and its S does not exist numerically.
    pub fn check_properties(&self, tol: f64) -> Result<PropertyReport> {
        let max_asymmetry = rel_asymmetry(&self.matrix);
        let reciprocal = max_asymmetry <= tol;
        let s_net = self.z_to_s()?;
        let s = s_net.matrix();
        let max_singular_value = spectral_norm(s);
        let gram = s.adjoint() * s;
        let dev = &gram - identity(self.nports());
        let lossless = dev.iter().all(|z| z.norm() <= tol);
        // A unitary S cannot deliver net power; keep the implication exact
        // even when the spectral-norm estimate lands just above 1 + tol.
        let passive = max_singular_value <= 1.0 + tol || lossless;
        Ok(PropertyReport {
            reciprocal,
            passive,
            lossless,
            max_asymmetry,
            max_singular_value,
            tolerance: tol,
        })
    }
}
