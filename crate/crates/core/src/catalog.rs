//! Built-in symmetric pairs and their JSON exchange format.
//!
//! | pair   | algebra    | K     | G/K with chosen sign        |
//! |--------|------------|-------|-----------------------------|
//! | `sl2`  | sl(2,R)    | SO(2) | hyperbolic plane            |
//! | `so3`  | so(3)      | SO(2) | round 2-sphere (sign −1)    |
//! | `so21` | so(2,1)    | SO(2) | hyperbolic plane            |
//! | `so31` | so(3,1)    | SO(3) | hyperbolic 3-space          |
//!
//! Space names are the pair names for the real form `G/K` and the pair name
//! followed by `c` for the anti-Kaehler complexification `G^c/K^c`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{LieAlgebra, SymmetricPair};
use crate::linalg::{c, CMat, RMat};
use crate::space::SymmetricSpace;

fn real(n: usize, entries: &[(usize, usize, f64)]) -> CMat {
    let mut m = CMat::zeros(n, n);
    for &(i, j, v) in entries {
        m[(i, j)] = c(v, 0.0);
    }
    m
}

fn diag(values: &[f64]) -> CMat {
    let n = values.len();
    CMat::from_fn(n, n, |i, j| if i == j { c(values[i], 0.0) } else { c(0.0, 0.0) })
}

/// Matrix of `X -> S X S^-1` on coefficients, computed by expansion.
fn theta_from_conjugator(alg: &LieAlgebra, s: &CMat) -> Result<RMat> {
    let s_inv = s.clone().try_inverse().ok_or_else(|| Error::InvalidAlgebra("singular conjugator".into()))?;
    let d = alg.dim();
    let mut theta = RMat::zeros(d, d);
    for (j, b) in alg.basis().iter().enumerate() {
        let (coeff, res) = alg.expand(&(s * b * &s_inv));
        if res > 1e-12 {
            return Err(Error::InvalidAlgebra("conjugation does not preserve the algebra".into()));
        }
        theta.set_column(j, &coeff);
    }
    Ok(theta)
}

fn build(name: &str, basis: Vec<CMat>, conjugator: CMat, sign: i8) -> SymmetricPair {
    let alg = LieAlgebra::new(basis).expect("catalog algebra");
    let theta = theta_from_conjugator(&alg, &conjugator).expect("catalog involution");
    SymmetricPair::new(name, alg, theta, conjugator, sign).expect("catalog pair")
}

/// sl(2,R) with θ(X) = −Xᵀ, basis (E, F, H).
pub fn sl2() -> SymmetricPair {
    let e = real(2, &[(0, 1, 1.0)]);
    let f = real(2, &[(1, 0, 1.0)]);
    let h = real(2, &[(0, 0, 1.0), (1, 1, -1.0)]);
    let s = real(2, &[(0, 1, 1.0), (1, 0, -1.0)]);
    build("sl2", vec![e, f, h], s, 1)
}

/// so(3) with K = SO(2) (rotations of the first two axes), basis (L1, L2, L3).
pub fn so3() -> SymmetricPair {
    let l1 = real(3, &[(1, 2, -1.0), (2, 1, 1.0)]);
    let l2 = real(3, &[(0, 2, 1.0), (2, 0, -1.0)]);
    let l3 = real(3, &[(0, 1, -1.0), (1, 0, 1.0)]);
    build("so3", vec![l1, l2, l3], diag(&[-1.0, -1.0, 1.0]), -1)
}

/// so(2,1) with Cartan involution, basis (boost1, boost2, rotation).
pub fn so21() -> SymmetricPair {
    let k1 = real(3, &[(0, 2, 1.0), (2, 0, 1.0)]);
    let k2 = real(3, &[(1, 2, 1.0), (2, 1, 1.0)]);
    let l3 = real(3, &[(0, 1, -1.0), (1, 0, 1.0)]);
    build("so21", vec![k1, k2, l3], diag(&[1.0, 1.0, -1.0]), 1)
}

/// so(3,1) with Cartan involution, basis (three boosts, three rotations).
pub fn so31() -> SymmetricPair {
    let mut basis = Vec::new();
    for i in 0..3 {
        basis.push(real(4, &[(i, 3, 1.0), (3, i, 1.0)]));
    }
    for &(i, j) in &[(0usize, 1usize), (0, 2), (1, 2)] {
        basis.push(real(4, &[(i, j, -1.0), (j, i, 1.0)]));
    }
    build("so31", basis, diag(&[1.0, 1.0, 1.0, -1.0]), 1)
}

pub fn all_pairs() -> Vec<SymmetricPair> {
    vec![sl2(), so3(), so21(), so31()]
}

pub fn pair_names() -> Vec<&'static str> {
    vec!["sl2", "so3", "so21", "so31"]
}

pub fn space_names() -> Vec<String> {
    pair_names()
        .into_iter()
        .flat_map(|n| [n.to_string(), format!("{n}c")])
        .collect()
}

pub fn pair(name: &str) -> Result<SymmetricPair> {
    match name {
        "sl2" => Ok(sl2()),
        "so3" => Ok(so3()),
        "so21" => Ok(so21()),
        "so31" => Ok(so31()),
        _ => Err(Error::UnknownSpace { name: name.into(), catalog: pair_names().join(", ") }),
    }
}

/// Resolve a space name (`sl2`, `sl2c`, ...).
pub fn space(name: &str) -> Result<SymmetricSpace> {
    let unknown = || Error::UnknownSpace { name: name.into(), catalog: space_names().join(", ") };
    if let Some(base) = name.strip_suffix('c') {
        if pair_names().contains(&base) {
            return Ok(SymmetricSpace::complexified(pair(base)?));
        }
    }
    if pair_names().contains(&name) {
        return Ok(SymmetricSpace::real(pair(name)?));
    }
    Err(unknown())
}

/// Row-major matrix with separate real and imaginary parts.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_cmat(m: &CMat) -> Self {
        let rows = |f: &dyn Fn(usize, usize) -> f64| {
            (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(i, j)).collect()).collect::<Vec<Vec<f64>>>()
        };
        let re = rows(&|i, j| m[(i, j)].re);
        let has_im = m.iter().any(|z| z.im != 0.0);
        let im = if has_im { rows(&|i, j| m[(i, j)].im) } else { Vec::new() };
        MatrixJson { re, im }
    }

    pub fn to_cmat(&self) -> Result<CMat> {
        let r = self.re.len();
        let k = self.re.first().map_or(0, |row| row.len());
        if self.re.iter().any(|row| row.len() != k) {
            return Err(Error::Config("ragged matrix".into()));
        }
        if !self.im.is_empty() && (self.im.len() != r || self.im.iter().any(|row| row.len() != k)) {
            return Err(Error::Config("imaginary part shape mismatch".into()));
        }
        Ok(CMat::from_fn(r, k, |i, j| {
            let im = if self.im.is_empty() { 0.0 } else { self.im[i][j] };
            c(self.re[i][j], im)
        }))
    }
}

/// JSON record for a symmetric pair.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PairJson {
    pub name: String,
    pub basis: Vec<MatrixJson>,
    pub theta: Vec<Vec<f64>>,
    pub conjugator: MatrixJson,
    pub metric_sign: i8,
}

impl PairJson {
    pub fn from_pair(pair: &SymmetricPair) -> Self {
        let t = pair.theta();
        PairJson {
            name: pair.name().to_string(),
            basis: pair.algebra().basis().iter().map(MatrixJson::from_cmat).collect(),
            theta: (0..t.nrows()).map(|i| (0..t.ncols()).map(|j| t[(i, j)]).collect()).collect(),
            conjugator: MatrixJson::from_cmat(pair.conjugator()),
            metric_sign: pair.metric_sign() as i8,
        }
    }

    pub fn to_pair(&self) -> Result<SymmetricPair> {
        let basis = self.basis.iter().map(MatrixJson::to_cmat).collect::<Result<Vec<_>>>()?;
        let alg = LieAlgebra::new(basis)?;
        let d = alg.dim();
        if self.theta.len() != d || self.theta.iter().any(|r| r.len() != d) {
            return Err(Error::Config(format!("theta must be {d}x{d}")));
        }
        let theta = RMat::from_fn(d, d, |i, j| self.theta[i][j]);
        SymmetricPair::new(self.name.clone(), alg, theta, self.conjugator.to_cmat()?, self.metric_sign)
    }
}
