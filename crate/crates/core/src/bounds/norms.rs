//! Sector norms, relative bounds with respect to `N̂₂`, and the lower bound
//! on the spectrum of `H`.

use faer::Side;
use num_complex::Complex64;
use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::TruncatedBasis;
use crate::operators::{
    hopping_off_diagonal, hopping_on_site, number_squared, pair_hopping, symmetry_breaking,
    total_number, ModelSpec, SparseOperator,
};

/// `‖A_k‖²` for the two-site block with `n_x + n_y = k`.
pub fn two_site_block_norm_squared(k: usize) -> f64 {
    let k = k as f64;
    if k as usize % 2 == 1 {
        ((k + 1.0) / 2.0).powi(2)
    } else {
        k * (k + 2.0) / 4.0
    }
}

/// `max_{k ≤ m} ‖A_k‖`, the norm of `c†_x c_y` on `D_m` for `x ≠ y`.
pub fn pair_hopping_norm(m: usize) -> f64 {
    (0..=m).map(two_site_block_norm_squared).fold(0.0, f64::max).sqrt()
}

/// Largest singular value of the sector block of `op`.
fn sector_operator_norm(op: &SparseOperator, basis: &TruncatedBasis, m: usize) -> Result<f64> {
    let range = basis.sector_range(m);
    let block = op.sandwich(range.clone());
    let gram = block.adjoint().mul(&block)?;
    if gram.entries().all(|(r, c, _)| r == c) {
        return Ok(gram.entries().map(|(_, _, v)| v.re).fold(0.0, f64::max).sqrt());
    }
    let dense = gram.dense_block(range);
    let evs = dense
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    Ok(evs.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// Norm checks on one sector `D_m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorNormReport {
    pub sites: usize,
    pub m: usize,
    /// `max_{k≤m} ‖A_k‖`.
    pub pair_norm_exact: f64,
    /// Largest deviation of a computed `‖c†_x c_y|D_m‖` from the exact value.
    pub pair_norm_delta: f64,
    pub t_prime_norm: f64,
    /// `𝕄(m+1)|Λ|/2`.
    pub t_prime_bound: f64,
    /// `min_{φ ∈ D_m basis} ⟨φ|N̂₂|φ⟩`.
    pub n2_min: f64,
    /// `m²/|Λ|`.
    pub n2_bound: f64,
    pub pass: bool,
}

pub const SECTOR_NORM_TOL: f64 = 1e-10;

pub fn sector_norm_checks(basis: &TruncatedBasis, model: &ModelSpec, m: usize) -> Result<SectorNormReport> {
    if m > basis.cutoff() {
        return Err(Error::InvalidParameter(format!(
            "sector {m} above cutoff {}",
            basis.cutoff()
        )));
    }
    let sites = basis.sites();
    let exact = pair_hopping_norm(m);
    let mut delta: f64 = 0.0;
    for x in 0..sites {
        for y in 0..sites {
            if x != y {
                let n = sector_operator_norm(&pair_hopping(basis, x, y), basis, m)?;
                delta = delta.max((n - exact).abs());
            }
        }
    }
    let t_prime = hopping_off_diagonal(basis, &model.hopping.matrix());
    let t_prime_norm = sector_operator_norm(&t_prime, basis, m)?;
    let t_prime_bound = model.hopping.row_sum_bound() * (m as f64 + 1.0) * sites as f64 / 2.0;
    let n2_min = basis
        .sector_range(m)
        .map(|i| basis.state(i).iter().map(|&n| (n as f64).powi(2)).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    let n2_bound = (m * m) as f64 / sites as f64;
    let pass = (sites < 2 || delta <= SECTOR_NORM_TOL)
        && t_prime_norm <= t_prime_bound * (1.0 + 1e-12) + 1e-12
        && n2_min >= n2_bound * (1.0 - 1e-12);
    Ok(SectorNormReport {
        sites,
        m,
        pair_norm_exact: exact,
        pair_norm_delta: delta,
        t_prime_norm,
        t_prime_bound,
        n2_min,
        n2_bound,
        pass,
    })
}

/// Deterministic complex vector supported on `D^(support)`, components with
/// real and imaginary parts uniform in `[−1, 1)`.
pub fn random_state(rng: &mut SplitMix64, basis: &TruncatedBasis, support: usize) -> Vec<Complex64> {
    let mut uniform = || ((rng.next_u64() >> 11) as f64) * (1.0 / (1u64 << 53) as f64) * 2.0 - 1.0;
    let live = basis.prefix_dim(support);
    (0..basis.dim())
        .map(|i| {
            if i < live {
                let re = uniform();
                Complex64::new(re, uniform())
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect()
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Counts and worst normalised slack `(rhs − lhs)/max(rhs, 1)` of the four
/// relative-bound inequalities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelativeBoundReport {
    pub sites: usize,
    pub cutoff: usize,
    pub k: usize,
    pub samples: usize,
    pub seed: u64,
    /// Violations of the `T′`, `N̂`, `T″`, `L` inequalities.
    pub violations: [usize; 4],
    pub worst_slack: [f64; 4],
    pub pass: bool,
}

/// Check the four inequalities on `samples` random vectors in `D^(M−1)`.
pub fn relative_bound_checks(
    basis: &TruncatedBasis,
    model: &ModelSpec,
    k: usize,
    samples: usize,
    seed: u64,
) -> Result<RelativeBoundReport> {
    if k < 1 {
        return Err(Error::InvalidParameter("K must be >= 1".into()));
    }
    if basis.cutoff() < 1 {
        return Err(Error::InvalidParameter("relative bounds need M >= 1".into()));
    }
    let vol = basis.sites() as f64;
    let t = model.hopping.matrix();
    let t_prime = hopping_off_diagonal(basis, &t);
    let t_second = hopping_on_site(basis, &t);
    let n = total_number(basis);
    let n2 = number_squared(basis);
    let l = symmetry_breaking(basis);
    let mm = model.hopping.row_sum_bound();
    let md = model.hopping.diagonal_bound();
    let kf = k as f64;
    let k1 = kf + 1.0;

    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut violations = [0usize; 4];
    let mut worst = [f64::INFINITY; 4];
    for _ in 0..samples {
        let psi = random_state(&mut rng, basis, basis.cutoff() - 1);
        let p = norm(&psi);
        let q = norm(&n2.apply(&psi));
        let checks = [
            (
                norm(&t_prime.apply(&psi)).powi(2),
                0.25 * mm * mm * vol * vol * k1 * k1 * p * p + 0.75 * mm * mm * vol.powi(4) / (k1 * k1) * q * q,
            ),
            (
                norm(&n.apply(&psi)).powi(2),
                kf * kf * p * p + vol * vol / (k1 * k1) * q * q,
            ),
            (
                norm(&t_second.apply(&psi)).powi(2),
                md * md * kf * kf * p * p + md * md * vol * vol / (k1 * k1) * q * q,
            ),
            (norm(&l.apply(&psi)), 2.0 * vol * k1 * p + 2.0 * vol * vol / k1 * q),
        ];
        for (i, (lhs, rhs)) in checks.into_iter().enumerate() {
            let slack = (rhs - lhs) / rhs.max(1.0);
            worst[i] = worst[i].min(slack);
            if lhs > rhs * (1.0 + 1e-12) + 1e-12 {
                violations[i] += 1;
            }
        }
    }
    Ok(RelativeBoundReport {
        sites: basis.sites(),
        cutoff: basis.cutoff(),
        k,
        samples,
        seed,
        violations,
        worst_slack: worst,
        pass: violations.iter().all(|&v| v == 0),
    })
}

/// `X = (|Λ|/U)(|Λ|(√3/2·𝕄 + 2|λ|) + 𝕄_d + |μ|)`; admissible `K` satisfy `K > X`.
pub fn admissibility_threshold(model: &ModelSpec) -> f64 {
    let vol = model.sites() as f64;
    let (mm, md) = (model.hopping.row_sum_bound(), model.hopping.diagonal_bound());
    vol / model.u * (vol * (3f64.sqrt() / 2.0 * mm + 2.0 * model.lambda.abs()) + md + model.mu.abs())
}

/// Smallest admissible `K`.
pub fn smallest_admissible_k(model: &ModelSpec) -> usize {
    admissibility_threshold(model).floor() as usize + 1
}

/// `γ(U) ≥ −K (|Λ|(𝕄/2 + 2|λ|) + 𝕄_d + |μ|) / (1 − X/K)`.
pub fn ground_energy_bound(model: &ModelSpec, k: usize) -> Result<f64> {
    let x = admissibility_threshold(model);
    let kf = k as f64;
    if kf <= x {
        return Err(Error::Domain(format!("K = {k} is not admissible: need K > {x}")));
    }
    let vol = model.sites() as f64;
    let (mm, md) = (model.hopping.row_sum_bound(), model.hopping.diagonal_bound());
    let a = vol * (mm / 2.0 + 2.0 * model.lambda.abs()) + md + model.mu.abs();
    Ok(-kf * a / (1.0 - x / kf))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundEnergyEntry {
    pub k: usize,
    pub bound: f64,
    pub lambda_min: f64,
    pub slack: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundEnergyReport {
    pub threshold: f64,
    pub cutoff: usize,
    pub entries: Vec<GroundEnergyEntry>,
    pub pass: bool,
}

/// Compare `λ_min(H_M)` with the bound at `K_min`, `K_min + 1`, `K_min + 10`.
pub fn ground_energy_check(model: &ModelSpec, cutoff: usize, lambda_min: f64) -> Result<GroundEnergyReport> {
    let k0 = smallest_admissible_k(model);
    let entries = [k0, k0 + 1, k0 + 10]
        .into_iter()
        .map(|k| {
            let bound = ground_energy_bound(model, k)?;
            let slack = lambda_min - bound;
            Ok(GroundEnergyEntry {
                k,
                bound,
                lambda_min,
                slack,
                pass: slack >= -1e-10 * bound.abs().max(1.0),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GroundEnergyReport {
        threshold: admissibility_threshold(model),
        cutoff,
        pass: entries.iter().all(|e| e.pass),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeSpec;
    use crate::operators::HoppingSpec;
    use crate::thermal::diagonalize;
    use crate::operators::hamiltonian;

    fn chain(n: usize) -> ModelSpec {
        let l = LatticeSpec::new(1, n).unwrap();
        ModelSpec::new(HoppingSpec::nearest_neighbour(l, -0.5), 1.0, 0.0, 0.2, 1.0).unwrap()
    }

    /// `max_{0≤l<k} (l+1)(k−l)` by enumeration.
    fn block_oracle(k: usize) -> f64 {
        (0..k).map(|l| ((l + 1) * (k - l)) as f64).fold(0.0, f64::max)
    }

    #[test]
    fn block_norm_formula() {
        for k in 0..20 {
            assert_eq!(two_site_block_norm_squared(k), block_oracle(k), "k={k}");
        }
        assert_eq!(pair_hopping_norm(0), 0.0);
        assert_eq!(pair_hopping_norm(1), 1.0);
        assert!((pair_hopping_norm(2) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(pair_hopping_norm(3), 2.0);
    }

    #[test]
    fn sector_norms_on_chain() {
        let model = chain(3);
        let b = TruncatedBasis::new(3, 6).unwrap();
        for m in 0..=6 {
            let r = sector_norm_checks(&b, &model, m).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn relative_bounds_hold_and_trivial_cases() {
        let model = chain(3);
        let b = TruncatedBasis::new(3, 5).unwrap();
        for k in [1, 2, 5] {
            let r = relative_bound_checks(&b, &model, k, 20, 7).unwrap();
            assert!(r.pass, "{r:?}");
        }
        let l = LatticeSpec::new(1, 3).unwrap();
        let free = ModelSpec::new(HoppingSpec::none(l), 1.0, 0.0, 0.0, 1.0).unwrap();
        let r = relative_bound_checks(&b, &free, 1, 5, 1).unwrap();
        assert!(r.pass);
        assert!(relative_bound_checks(&b, &model, 0, 5, 1).is_err());
    }

    #[test]
    fn random_state_is_deterministic_and_supported() {
        let b = TruncatedBasis::new(2, 4).unwrap();
        let mut r1 = SplitMix64::seed_from_u64(3);
        let mut r2 = SplitMix64::seed_from_u64(3);
        let v1 = random_state(&mut r1, &b, 3);
        assert_eq!(v1, random_state(&mut r2, &b, 3));
        assert!(v1[b.prefix_dim(3)..].iter().all(|z| z.norm() == 0.0));
        assert!(v1.iter().all(|z| z.re >= -1.0 && z.re < 1.0));
    }

    #[test]
    fn ground_bound_trivial_model() {
        let l = LatticeSpec::new(1, 2).unwrap();
        let m = ModelSpec::new(HoppingSpec::none(l), 1.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(smallest_admissible_k(&m), 1);
        assert_eq!(ground_energy_bound(&m, 1).unwrap(), 0.0);
        assert!(ground_energy_bound(&chain(2), 1).is_err());
    }

    #[test]
    fn ground_bound_holds_on_chain() {
        let model = chain(2);
        let b = TruncatedBasis::new(2, 6).unwrap();
        let s = diagonalize(&hamiltonian(&model, &b).unwrap()).unwrap();
        let r = ground_energy_check(&model, 6, s.ground_energy()).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.entries[0].k as f64 > r.threshold);
    }
}
