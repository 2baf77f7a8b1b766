//! Per-sector block scattering matrices, their kernels, and toy generators.

use crate::error::{Error, Result};
use crate::linalg;
use crate::num::{cplx, max_abs, real, CMatrix, Complex, Real};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const DEFAULT_TAU_UNITARY: f64 = 1e-10;

/// Unitary `Z` of one frequency sector, laid out as
///
/// ```text
///       s     e     m
/// s  [  T    E_e   E_m ]
/// e  [ A_e  Q_ee  Q_em ]
/// m  [ A_m  Q_me  Q_mm ]
/// ```
///
/// Rows are outgoing channels, columns ingoing ones.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockScatteringMatrix<T: Real> {
    sector: usize,
    n_s: usize,
    n_e: usize,
    n_m: usize,
    z: CMatrix<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub max_residual: f64,
    pub is_unitary: bool,
    pub is_lossless: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelSet<T: Real> {
    pub j_s: CMatrix<T>,
    pub j_e: CMatrix<T>,
    pub j_m: CMatrix<T>,
}

impl<T: Real> KernelSet<T> {
    /// max-abs of `J_s + J_e + J_m - I`.
    pub fn sum_residual(&self) -> T {
        let n = self.j_s.nrows();
        max_abs(&(&self.j_s + &self.j_e + &self.j_m - CMatrix::<T>::identity(n, n)))
    }

    /// Smallest eigenvalue over the three kernels.
    pub fn min_eigenvalue(&self) -> T {
        [&self.j_s, &self.j_e, &self.j_m]
            .into_iter()
            .filter_map(|j| linalg::hermitian_eigen(j).0.last().copied())
            .fold(T::max_value().unwrap_or(T::one()), |a, b| a.min(b))
    }

    pub fn hermiticity_residual(&self) -> T {
        [&self.j_s, &self.j_e, &self.j_m]
            .into_iter()
            .map(linalg::hermiticity_residual)
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// `J_e + J_m`.
    pub fn j_em(&self) -> CMatrix<T> {
        &self.j_e + &self.j_m
    }
}

impl<T: Real> BlockScatteringMatrix<T> {
    pub fn new(sector: usize, n_s: usize, n_e: usize, n_m: usize, z: CMatrix<T>) -> Result<Self> {
        let n = n_s + n_e + n_m;
        if z.nrows() != n || z.ncols() != n {
            return Err(Error::Shape(format!(
                "sector {sector}: expected {n}x{n} matrix, got {}x{}",
                z.nrows(),
                z.ncols()
            )));
        }
        Ok(Self { sector, n_s, n_e, n_m, z })
    }

    pub fn with_sector(mut self, sector: usize) -> Self {
        self.sector = sector;
        self
    }

    pub fn sector(&self) -> usize {
        self.sector
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n_s, self.n_e, self.n_m)
    }

    pub fn z(&self) -> &CMatrix<T> {
        &self.z
    }

    fn block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> CMatrix<T> {
        self.z.view((rows.start, cols.start), (rows.len(), cols.len())).into_owned()
    }

    fn s(&self) -> std::ops::Range<usize> {
        0..self.n_s
    }
    fn e(&self) -> std::ops::Range<usize> {
        self.n_s..self.n_s + self.n_e
    }
    fn m(&self) -> std::ops::Range<usize> {
        self.n_s + self.n_e..self.n_s + self.n_e + self.n_m
    }

    pub fn t(&self) -> CMatrix<T> {
        self.block(self.s(), self.s())
    }
    pub fn e_e(&self) -> CMatrix<T> {
        self.block(self.s(), self.e())
    }
    pub fn e_m(&self) -> CMatrix<T> {
        self.block(self.s(), self.m())
    }
    pub fn a_e(&self) -> CMatrix<T> {
        self.block(self.e(), self.s())
    }
    pub fn a_m(&self) -> CMatrix<T> {
        self.block(self.m(), self.s())
    }
    pub fn q_ee(&self) -> CMatrix<T> {
        self.block(self.e(), self.e())
    }
    pub fn q_em(&self) -> CMatrix<T> {
        self.block(self.e(), self.m())
    }
    pub fn q_me(&self) -> CMatrix<T> {
        self.block(self.m(), self.e())
    }
    pub fn q_mm(&self) -> CMatrix<T> {
        self.block(self.m(), self.m())
    }

    pub fn validate(&self, tau: T) -> ValidationReport {
        let residual = linalg::unitarity_residual(&self.z);
        let is_unitary = residual < tau;
        let off_s = [self.e_e(), self.e_m(), self.a_e(), self.a_m()]
            .iter()
            .map(max_abs)
            .fold(T::zero(), |a, b| a.max(b));
        ValidationReport {
            max_residual: residual.to_f64(),
            is_unitary,
            is_lossless: is_unitary && off_s < tau,
        }
    }

    pub fn kernels(&self) -> KernelSet<T> {
        let t = self.t();
        let a_e = self.a_e();
        let a_m = self.a_m();
        KernelSet {
            j_s: t.adjoint() * &t,
            j_e: a_e.adjoint() * &a_e,
            j_m: a_m.adjoint() * &a_m,
        }
    }

    /// Embed a contraction `T` into a unitary with `n_e = n_m = n_s`.
    pub fn dilate_transmission(t: &CMatrix<T>, eta_e: T, tau: T) -> Result<Self> {
        let n = t.nrows();
        if t.ncols() != n {
            return Err(Error::Shape(format!(
                "transmission must be square, got {}x{}",
                t.nrows(),
                t.ncols()
            )));
        }
        if !(eta_e >= T::zero() && eta_e <= T::one()) {
            return Err(Error::Parameter(format!("eta_e must lie in [0, 1], got {eta_e}")));
        }
        let defect = CMatrix::<T>::identity(n, n) - t.adjoint() * t;
        // smallest eigenvalue of I - T^†T is 1 - sigma_max^2
        let (values, _) = linalg::hermitian_eigen(&defect);
        if let Some(&low) = values.last() {
            let sigma_max = (T::one() - low).max(T::zero()).sqrt();
            if sigma_max > T::one() + tau {
                return Err(Error::NotAContraction(sigma_max.to_f64()));
            }
        }
        let floor = T::default_epsilon() * T::lit(16.0) * T::count(n.max(1));
        let r = linalg::psd_sqrt(&defect, T::max_value().unwrap_or(T::one()), floor)
            .map_err(|low| Error::NotAContraction((T::one() - low).sqrt().to_f64()))?;
        let a_e = r.map(|z| z * real(eta_e.sqrt()));
        let a_m = r.map(|z| z * real((T::one() - eta_e).sqrt()));

        let dim = 3 * n;
        let mut first = CMatrix::<T>::zeros(dim, n);
        first.view_mut((0, 0), (n, n)).copy_from(t);
        first.view_mut((n, 0), (n, n)).copy_from(&a_e);
        first.view_mut((2 * n, 0), (n, n)).copy_from(&a_m);
        let rest = linalg::complement_basis(&first, 2 * n);

        let mut z = CMatrix::<T>::zeros(dim, dim);
        z.view_mut((0, 0), (dim, n)).copy_from(&first);
        z.view_mut((0, n), (dim, 2 * n)).copy_from(&rest);
        Self::new(0, n, n, n, z)
    }

    pub fn to_record(&self) -> MatrixRecord {
        MatrixRecord {
            sector: self.sector,
            n_s: self.n_s,
            n_e: self.n_e,
            n_m: self.n_m,
            entries: self
                .z
                .row_iter()
                .flat_map(|row| row.iter().map(|z| [z.re.to_f64(), z.im.to_f64()]).collect::<Vec<_>>())
                .collect(),
        }
    }

    pub fn from_record(rec: &MatrixRecord) -> Result<Self> {
        let n = rec.n_s + rec.n_e + rec.n_m;
        if rec.entries.len() != n * n {
            return Err(Error::Shape(format!(
                "matrix record holds {} entries, expected {}",
                rec.entries.len(),
                n * n
            )));
        }
        let z = CMatrix::from_row_iterator(
            n,
            n,
            rec.entries.iter().map(|[re, im]| cplx(T::lit(*re), T::lit(*im))),
        );
        Self::new(rec.sector, rec.n_s, rec.n_e, rec.n_m, z)
    }
}

/// Row-major text form of a block matrix; each entry is `[re, im]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub sector: usize,
    pub n_s: usize,
    pub n_e: usize,
    pub n_m: usize,
    pub entries: Vec<[f64; 2]>,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum ToyModel {
    Identity {
        n_s: usize,
    },
    Attenuator {
        t: f64,
        eta_e: f64,
        #[serde(default = "one")]
        n_s: usize,
    },
    LossyBeamsplitter {
        t: f64,
        r: f64,
        loss: f64,
        eta_e: f64,
    },
    RandomUnitary {
        n_s: usize,
        seed: u64,
    },
    RandomLossy {
        n_s: usize,
        seed: u64,
        loss_scale: f64,
        eta_e: f64,
    },
}

fn unit_interval(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must lie in [0, 1], got {x}")))
    }
}

fn positive_size(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Parameter("n_s must be at least 1".into()))
    } else {
        Ok(())
    }
}

impl ToyModel {
    /// Build from a model name and numeric parameters.
    pub fn from_params(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let get = |key: &str| {
            params
                .get(key)
                .copied()
                .ok_or_else(|| Error::Parameter(format!("model `{name}` needs parameter `{key}`")))
        };
        let count = |key: &str| -> Result<usize> {
            let x = get(key)?;
            if x < 0.0 || x.fract() != 0.0 {
                return Err(Error::Parameter(format!("`{key}` must be a non-negative integer")));
            }
            Ok(x as usize)
        };
        Ok(match name {
            "identity" => ToyModel::Identity { n_s: count("n_s")? },
            "attenuator" => ToyModel::Attenuator {
                t: get("t")?,
                eta_e: get("eta_e")?,
                n_s: if params.contains_key("n_s") { count("n_s")? } else { 1 },
            },
            "lossy_beamsplitter" => ToyModel::LossyBeamsplitter {
                t: get("t")?,
                r: get("r")?,
                loss: get("loss")?,
                eta_e: get("eta_e")?,
            },
            "random_unitary" => ToyModel::RandomUnitary { n_s: count("n_s")?, seed: count("seed")? as u64 },
            "random_lossy" => ToyModel::RandomLossy {
                n_s: count("n_s")?,
                seed: count("seed")? as u64,
                loss_scale: get("loss_scale")?,
                eta_e: get("eta_e")?,
            },
            other => return Err(Error::UnknownModel(other.to_string())),
        })
    }

    pub fn n_s(&self) -> usize {
        match *self {
            ToyModel::Identity { n_s }
            | ToyModel::Attenuator { n_s, .. }
            | ToyModel::RandomUnitary { n_s, .. }
            | ToyModel::RandomLossy { n_s, .. } => n_s,
            ToyModel::LossyBeamsplitter { .. } => 2,
        }
    }

    /// e/m channel counts produced by the model.
    pub fn n_em(&self) -> usize {
        match self {
            ToyModel::Identity { .. } | ToyModel::RandomUnitary { .. } => 0,
            _ => self.n_s(),
        }
    }

    pub fn build<T: Real>(&self, tau: T) -> Result<BlockScatteringMatrix<T>> {
        match *self {
            ToyModel::Identity { n_s } => {
                positive_size(n_s)?;
                BlockScatteringMatrix::new(0, n_s, 0, 0, CMatrix::identity(n_s, n_s))
            }
            ToyModel::Attenuator { t, eta_e, n_s } => {
                positive_size(n_s)?;
                unit_interval("t", t)?;
                unit_interval("eta_e", eta_e)?;
                let tm = CMatrix::<T>::identity(n_s, n_s).map(|z| z * real(T::lit(t)));
                BlockScatteringMatrix::dilate_transmission(&tm, T::lit(eta_e), tau)
            }
            ToyModel::LossyBeamsplitter { t, r, loss, eta_e } => {
                unit_interval("t", t)?;
                unit_interval("r", r)?;
                unit_interval("loss", loss)?;
                unit_interval("eta_e", eta_e)?;
                if (t * t + r * r - 1.0).abs() > 1e-9 {
                    return Err(Error::Parameter(format!(
                        "beamsplitter needs t^2 + r^2 = 1, got {}",
                        t * t + r * r
                    )));
                }
                let g = T::lit((1.0 - loss).sqrt());
                let tt = cplx(g * T::lit(t), T::zero());
                let rr = cplx(T::zero(), g * T::lit(r));
                let tm = CMatrix::from_row_slice(2, 2, &[tt, rr, rr, tt]);
                BlockScatteringMatrix::dilate_transmission(&tm, T::lit(eta_e), tau)
            }
            ToyModel::RandomUnitary { n_s, seed } => {
                positive_size(n_s)?;
                let mut rng = ChaCha20Rng::seed_from_u64(seed);
                let u = linalg::haar_unitary::<T, _>(n_s, &mut rng);
                BlockScatteringMatrix::new(0, n_s, 0, 0, u)
            }
            ToyModel::RandomLossy { n_s, seed, loss_scale, eta_e } => {
                positive_size(n_s)?;
                unit_interval("loss_scale", loss_scale)?;
                unit_interval("eta_e", eta_e)?;
                let tm = random_contraction::<T>(n_s, seed, loss_scale);
                BlockScatteringMatrix::dilate_transmission(&tm, T::lit(eta_e), tau)
            }
        }
    }
}

/// `U diag(sigma) V` with Haar `U`, `V` and `sigma_i = sqrt(1 - loss_scale * u_i)`,
/// `u_i` uniform on `[0, 1)`.
pub fn random_contraction<T: Real>(n: usize, seed: u64, loss_scale: f64) -> CMatrix<T> {
    use rand::Rng;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let u = linalg::haar_unitary::<T, _>(n, &mut rng);
    let v = linalg::haar_unitary::<T, _>(n, &mut rng);
    let mut d = CMatrix::<T>::zeros(n, n);
    for i in 0..n {
        let x: f64 = rng.random();
        d[(i, i)] = Complex::new(T::lit((1.0 - loss_scale * x).sqrt()), T::zero());
    }
    u * d * v
}

/// Convenience wrapper over [`ToyModel::from_params`] and [`ToyModel::build`].
pub fn toy_model<T: Real>(name: &str, params: &BTreeMap<String, f64>, tau: T) -> Result<BlockScatteringMatrix<T>> {
    ToyModel::from_params(name, params)?.build(tau)
}
