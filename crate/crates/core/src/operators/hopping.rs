use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;

/// Tolerance for the Hermiticity check `t̃(⊖z) = conj(t̃(z))`.
const HERMITIAN_TOL: f64 = 1e-12;

/// Translation-invariant hopping `t_{x, x⊕z} = t̃_z`, keyed by torus
/// displacement.
///
/// Displacements given as arbitrary integer vectors are reduced modulo `N`;
/// entries landing on the same torus displacement are summed. On `N = 2`
/// the bonds `+1` and `−1` therefore merge into a single amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct HoppingSpec {
    lattice: LatticeSpec,
    amplitudes: BTreeMap<usize, Complex64>,
}

impl HoppingSpec {
    pub fn new(
        lattice: LatticeSpec,
        entries: impl IntoIterator<Item = (Vec<i64>, Complex64)>,
    ) -> Result<Self> {
        let mut amplitudes = BTreeMap::new();
        for (z, t) in entries {
            let site = lattice.wrap_displacement(&z)?;
            *amplitudes.entry(site).or_insert(Complex64::new(0.0, 0.0)) += t;
        }
        amplitudes.retain(|_, t: &mut Complex64| t.norm() > 0.0);
        let spec = Self {
            lattice,
            amplitudes,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// No hopping at all.
    pub fn none(lattice: LatticeSpec) -> Self {
        Self {
            lattice,
            amplitudes: BTreeMap::new(),
        }
    }

    /// Uniform nearest-neighbour hopping `t̃_{±e_i} = t` along every axis.
    pub fn nearest_neighbour(lattice: LatticeSpec, t: f64) -> Self {
        let d = lattice.dimension();
        let entries = (0..d).flat_map(|axis| {
            [1i64, -1].into_iter().map(move |sign| {
                let mut z = vec![0i64; d];
                z[axis] = sign;
                (z, Complex64::new(t, 0.0))
            })
        });
        Self::new(lattice, entries).expect("real symmetric hopping is Hermitian")
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    /// Nonzero amplitudes keyed by torus displacement (site index).
    pub fn amplitudes(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.amplitudes.iter().map(|(&z, &t)| (z, t))
    }

    /// `t̃_z` for a torus displacement given by site index.
    pub fn amplitude(&self, z: usize) -> Complex64 {
        self.amplitudes
            .get(&z)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    fn validate(&self) -> Result<()> {
        for (&z, &t) in &self.amplitudes {
            let minus = self.lattice.sub_index(0, z);
            if (self.amplitude(minus) - t.conj()).norm() > HERMITIAN_TOL {
                return Err(Error::NonHermitianHopping {
                    displacement: self.lattice.minimal_image(z),
                });
            }
        }
        Ok(())
    }

    /// `𝕄 = Σ_z |t̃_z|`, which equals `max_x Σ_y |t_xy|` under translation
    /// invariance.
    pub fn row_sum_bound(&self) -> f64 {
        self.amplitudes.values().map(|t| t.norm()).sum()
    }

    /// `𝕄_d = |t̃_0|`.
    pub fn diagonal_bound(&self) -> f64 {
        self.amplitude(0).norm()
    }

    /// `𝕄₂ = Σ_z |t̃_z|·|z|²` with `|z|` the minimal-image length.
    pub fn second_moment(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|(&z, t)| {
                let r2: i64 = self.lattice.minimal_image(z).iter().map(|c| c * c).sum();
                t.norm() * r2 as f64
            })
            .sum()
    }

    /// Dense site matrix `t_xy = t̃_{y⊖x}`.
    pub fn matrix(&self) -> HoppingMatrix {
        let n = self.lattice.site_count();
        let mut values = vec![Complex64::new(0.0, 0.0); n * n];
        for x in 0..n {
            for y in 0..n {
                values[x * n + y] = self.amplitude(self.lattice.sub_index(y, x));
            }
        }
        HoppingMatrix { sites: n, values }
    }
}

/// General site-space hopping matrix `t_xy`, Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct HoppingMatrix {
    sites: usize,
    values: Vec<Complex64>,
}

impl HoppingMatrix {
    /// Row-major `|Λ|×|Λ|` matrix; must be Hermitian.
    pub fn from_rows(sites: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != sites * sites {
            return Err(Error::DimensionMismatch {
                left: values.len(),
                right: sites * sites,
            });
        }
        let m = Self { sites, values };
        for x in 0..sites {
            for y in 0..sites {
                if (m.get(x, y) - m.get(y, x).conj()).norm() > HERMITIAN_TOL {
                    return Err(Error::NonHermitianHopping {
                        displacement: vec![x as i64, y as i64],
                    });
                }
            }
        }
        Ok(m)
    }

    pub fn zero(sites: usize) -> Self {
        Self {
            sites,
            values: vec![Complex64::new(0.0, 0.0); sites * sites],
        }
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn get(&self, x: usize, y: usize) -> Complex64 {
        self.values[x * self.sites + y]
    }

    /// `max_x Σ_y |t_xy|`.
    pub fn row_sum_bound(&self) -> f64 {
        (0..self.sites)
            .map(|x| (0..self.sites).map(|y| self.get(x, y).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `max_x |t_xx|`.
    pub fn diagonal_bound(&self) -> f64 {
        (0..self.sites)
            .map(|x| self.get(x, x).norm())
            .fold(0.0, f64::max)
    }

    /// Nonzero `(x, y, t_xy)` entries.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        let n = self.sites;
        self.values
            .iter()
            .enumerate()
            .filter(|(_, t)| t.norm() > 0.0)
            .map(move |(i, &t)| (i / n, i % n, t))
    }
}

/// Full parameter point of the grand-canonical Hamiltonian
/// `H = U·N₂ + T − μ·N + λ·L` at inverse temperature `β`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub lattice: LatticeSpec,
    pub hopping: HoppingSpec,
    pub u: f64,
    pub mu: f64,
    pub lambda: f64,
    pub beta: f64,
}

impl ModelSpec {
    pub fn new(
        hopping: HoppingSpec,
        u: f64,
        mu: f64,
        lambda: f64,
        beta: f64,
    ) -> Result<Self> {
        let model = Self {
            lattice: *hopping.lattice(),
            hopping,
            u,
            mu,
            lambda,
            beta,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.u > 0.0 && self.u.is_finite()) {
            return Err(Error::InvalidParameter(format!("U must be > 0 (got {})", self.u)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "beta must be > 0 (got {})",
                self.beta
            )));
        }
        if !self.mu.is_finite() || !self.lambda.is_finite() {
            return Err(Error::InvalidParameter("mu and lambda must be finite".into()));
        }
        if self.hopping.lattice() != &self.lattice {
            return Err(Error::InvalidParameter("hopping built for a different lattice".into()));
        }
        Ok(())
    }

    pub fn sites(&self) -> usize {
        self.lattice.site_count()
    }

    pub fn with_mu(&self, mu: f64) -> Self {
        Self { mu, ..self.clone() }
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self {
            lambda,
            ..self.clone()
        }
    }

    pub fn with_beta(&self, beta: f64) -> Self {
        Self { beta, ..self.clone() }
    }

    pub fn with_u(&self, u: f64) -> Self {
        Self { u, ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_for_nearest_neighbour_chain() {
        let l = LatticeSpec::new(1, 4).unwrap();
        let h = HoppingSpec::nearest_neighbour(l, -0.5);
        assert_eq!(h.row_sum_bound(), 1.0);
        assert_eq!(h.diagonal_bound(), 0.0);
        assert_eq!(h.second_moment(), 1.0);
        let m = h.matrix();
        assert_eq!(m.get(0, 1), Complex64::new(-0.5, 0.0));
        assert_eq!(m.get(0, 3), Complex64::new(-0.5, 0.0));
        assert_eq!(m.get(0, 2), Complex64::new(0.0, 0.0));
        assert_eq!(m.row_sum_bound(), h.row_sum_bound());
    }

    #[test]
    fn two_site_ring_merges_bonds() {
        let l = LatticeSpec::new(1, 2).unwrap();
        let h = HoppingSpec::nearest_neighbour(l, -0.5);
        assert_eq!(h.amplitude(1), Complex64::new(-1.0, 0.0));
        assert_eq!(h.row_sum_bound(), 1.0);
        assert_eq!(h.second_moment(), 1.0);
    }

    #[test]
    fn complex_hopping_must_be_hermitian() {
        let l = LatticeSpec::new(1, 5).unwrap();
        let t = Complex64::new(0.3, 0.4);
        assert!(HoppingSpec::new(l, [(vec![1], t), (vec![-1], t.conj())]).is_ok());
        assert!(matches!(
            HoppingSpec::new(l, [(vec![1], t), (vec![-1], t)]),
            Err(Error::NonHermitianHopping { .. })
        ));
        assert!(HoppingSpec::new(l, [(vec![0], Complex64::new(0.0, 1.0))]).is_err());
    }

    #[test]
    fn second_moment_uses_minimal_image() {
        let l = LatticeSpec::new(1, 6).unwrap();
        let t = Complex64::new(-0.25, 0.0);
        let h = HoppingSpec::new(l, [(vec![2], t), (vec![-2], t), (vec![0], t)]).unwrap();
        assert!((h.second_moment() - 2.0).abs() < 1e-15);
        assert_eq!(h.diagonal_bound(), 0.25);
        assert!(h.diagonal_bound() <= h.row_sum_bound());
    }

    #[test]
    fn model_validation() {
        let l = LatticeSpec::new(1, 3).unwrap();
        let h = HoppingSpec::none(l);
        assert!(ModelSpec::new(h.clone(), 0.0, 0.0, 0.0, 1.0).is_err());
        assert!(ModelSpec::new(h.clone(), 1.0, 0.0, 0.0, -1.0).is_err());
        assert!(ModelSpec::new(h, 1.0, 0.0, 0.0, 1.0).is_ok());
    }
}
