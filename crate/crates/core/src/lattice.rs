//! Periodic cubic lattice `{0,…,N−1}^d` and its Brillouin zone.
//!
//! Sites and momenta are both ordered lexicographically on their integer
//! coordinates, first coordinate most significant. Every matrix layout in the
//! crate depends on this ordering.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Cubic lattice with torus arithmetic, `1 ≤ d ≤ 3`, `N ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticeSpec {
    dimension: usize,
    size: usize,
}

impl LatticeSpec {
    pub fn new(dimension: usize, size: usize) -> Result<Self> {
        if !(1..=3).contains(&dimension) {
            return Err(Error::InvalidLattice(format!(
                "dimension must be 1, 2 or 3 (got {dimension})"
            )));
        }
        if size < 2 {
            return Err(Error::InvalidLattice(format!(
                "linear size must be at least 2 (got {size})"
            )));
        }
        Ok(Self { dimension, size })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `|Λ| = N^d`.
    pub fn site_count(&self) -> usize {
        self.size.pow(self.dimension as u32)
    }

    /// Coordinates of the site with lexicographic index `index`.
    pub fn coords(&self, index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dimension];
        let mut rest = index;
        for slot in out.iter_mut().rev() {
            *slot = rest % self.size;
            rest /= self.size;
        }
        out
    }

    pub fn index_of(&self, coords: &[usize]) -> Result<usize> {
        self.check_site(coords)?;
        Ok(coords.iter().fold(0, |acc, &c| acc * self.size + c))
    }

    /// All sites in lexicographic order.
    pub fn sites(&self) -> Vec<Vec<usize>> {
        (0..self.site_count()).map(|i| self.coords(i)).collect()
    }

    fn check_site(&self, coords: &[usize]) -> Result<()> {
        if coords.len() != self.dimension || coords.iter().any(|&c| c >= self.size) {
            return Err(Error::InvalidSite {
                coords: coords.to_vec(),
                size: self.size,
            });
        }
        Ok(())
    }

    /// Componentwise `(x_i + y_i) mod N`.
    pub fn torus_add(&self, x: &[usize], y: &[usize]) -> Result<Vec<usize>> {
        self.check_site(x)?;
        self.check_site(y)?;
        Ok(x.iter().zip(y).map(|(a, b)| (a + b) % self.size).collect())
    }

    /// Componentwise `(x_i − y_i) mod N`, the inverse of [`torus_add`](Self::torus_add).
    pub fn torus_sub(&self, x: &[usize], y: &[usize]) -> Result<Vec<usize>> {
        self.check_site(x)?;
        self.check_site(y)?;
        Ok(x
            .iter()
            .zip(y)
            .map(|(a, b)| (a + self.size - b) % self.size)
            .collect())
    }

    /// Index form of `x ⊕ y`.
    pub fn add_index(&self, x: usize, y: usize) -> usize {
        let (cx, cy) = (self.coords(x), self.coords(y));
        cx.iter()
            .zip(&cy)
            .fold(0, |acc, (a, b)| acc * self.size + (a + b) % self.size)
    }

    /// Index form of `x ⊖ y`.
    pub fn sub_index(&self, x: usize, y: usize) -> usize {
        let (cx, cy) = (self.coords(x), self.coords(y));
        cx.iter()
            .zip(&cy)
            .fold(0, |acc, (a, b)| acc * self.size + (a + self.size - b) % self.size)
    }

    /// Reduce an arbitrary integer displacement onto the torus.
    pub fn wrap_displacement(&self, displacement: &[i64]) -> Result<usize> {
        if displacement.len() != self.dimension {
            return Err(Error::InvalidLattice(format!(
                "displacement {displacement:?} has {} components, lattice has {}",
                displacement.len(),
                self.dimension
            )));
        }
        let n = self.size as i64;
        Ok(displacement
            .iter()
            .fold(0, |acc, &z| acc * self.size + z.rem_euclid(n) as usize))
    }

    /// Minimal-image representative of a torus displacement, each component
    /// in `(−N/2, N/2]`.
    pub fn minimal_image(&self, site: usize) -> Vec<i64> {
        let n = self.size as i64;
        self.coords(site)
            .into_iter()
            .map(|c| {
                let c = c as i64;
                if 2 * c > n {
                    c - n
                } else {
                    c
                }
            })
            .collect()
    }

    /// Brillouin-zone momenta `k_i = 2π n_i / N`, lexicographic in `n`;
    /// the first entry is `k = 0`.
    pub fn brillouin_momenta(&self) -> Vec<Momentum> {
        (0..self.site_count())
            .map(|i| Momentum {
                integers: self.coords(i),
                size: self.size,
            })
            .collect()
    }

    pub fn zero_momentum(&self) -> Momentum {
        Momentum {
            integers: vec![0; self.dimension],
            size: self.size,
        }
    }

    /// `e^{i k·x}` for a site given by index.
    pub fn phase(&self, k: &Momentum, site: usize) -> Complex64 {
        k.phase_at(&self.coords(site))
    }
}

/// Brillouin-zone momentum, stored as the integer tuple `(n_1,…,n_d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Momentum {
    integers: Vec<usize>,
    size: usize,
}

impl Momentum {
    pub fn new(integers: Vec<usize>, size: usize) -> Result<Self> {
        if integers.iter().any(|&n| n >= size) {
            return Err(Error::InvalidSite {
                coords: integers,
                size,
            });
        }
        Ok(Self { integers, size })
    }

    pub fn integers(&self) -> &[usize] {
        &self.integers
    }

    pub fn is_zero(&self) -> bool {
        self.integers.iter().all(|&n| n == 0)
    }

    /// Real components `2π n_i / N`, each in `[0, 2π)`.
    pub fn components(&self) -> Vec<f64> {
        self.integers
            .iter()
            .map(|&n| 2.0 * PI * n as f64 / self.size as f64)
            .collect()
    }

    /// `|k|² = Σ k_i²` with components in `[0, 2π)`.
    pub fn norm_squared(&self) -> f64 {
        self.components().iter().map(|k| k * k).sum()
    }

    /// Phase turns `Σ n_i x_i mod N`; the phase is `e^{2πi·turns/N}`.
    fn turns(&self, coords: &[i64]) -> i64 {
        let n = self.size as i64;
        self.integers
            .iter()
            .zip(coords)
            .map(|(&k, &x)| (k as i64 * x).rem_euclid(n))
            .sum::<i64>()
            .rem_euclid(n)
    }

    /// `e^{i k·x}` for lattice coordinates `x`.
    pub fn phase_at(&self, coords: &[usize]) -> Complex64 {
        let c: Vec<i64> = coords.iter().map(|&x| x as i64).collect();
        self.phase_at_displacement(&c)
    }

    /// `e^{i k·z}` for an arbitrary integer vector `z`, reduced exactly
    /// modulo `N` before the trigonometric evaluation.
    pub fn phase_at_displacement(&self, z: &[i64]) -> Complex64 {
        let turns = self.turns(z);
        if turns == 0 {
            return Complex64::new(1.0, 0.0);
        }
        let angle = 2.0 * PI * turns as f64 / self.size as f64;
        Complex64::from_polar(1.0, angle)
    }
}

/// `e^{i k·x}` for momentum `k` and site coordinates `x`.
pub fn plane_wave(k: &Momentum, x: &[usize]) -> Complex64 {
    k.phase_at(x)
}
