//! Matrices of the lattice operators on `D^(M)`, always in the form
//! `P_M X P_M`: any component that would leave the truncation is dropped.

use num_complex::Complex64;

use super::hopping::{HoppingMatrix, ModelSpec};
use super::sparse::{SectorShift, SparseOperator};
use crate::error::{Error, Result};
use crate::fock::TruncatedBasis;
use crate::lattice::{LatticeSpec, Momentum};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn check_site(basis: &TruncatedBasis, x: usize) {
    assert!(x < basis.sites(), "site {x} outside {} sites", basis.sites());
}

/// Triplets of `Σ_x w_x c_x` (lowering).
fn lowering_triplets(basis: &TruncatedBasis, weights: &[Complex64]) -> Vec<(usize, usize, Complex64)> {
    let mut out = Vec::new();
    let mut scratch = vec![0u16; basis.sites()];
    for j in 0..basis.dim() {
        scratch.copy_from_slice(basis.state(j));
        for (x, &w) in weights.iter().enumerate() {
            let n = scratch[x];
            if n == 0 || w == re(0.0) {
                continue;
            }
            scratch[x] = n - 1;
            let i = basis.try_index(&scratch).expect("lowered state stays in basis");
            scratch[x] = n;
            out.push((i, j, w * (n as f64).sqrt()));
        }
    }
    out
}

/// Triplets of `Σ_x w_x c†_x`, truncated at the cutoff.
fn raising_triplets(basis: &TruncatedBasis, weights: &[Complex64]) -> Vec<(usize, usize, Complex64)> {
    let mut out = Vec::new();
    let mut scratch = vec![0u16; basis.sites()];
    let top = basis.sector_range(basis.cutoff()).start;
    for j in 0..top {
        scratch.copy_from_slice(basis.state(j));
        for (x, &w) in weights.iter().enumerate() {
            if w == re(0.0) {
                continue;
            }
            let n = scratch[x];
            scratch[x] = n + 1;
            let i = basis.try_index(&scratch).expect("raised state below cutoff");
            scratch[x] = n;
            out.push((i, j, w * ((n + 1) as f64).sqrt()));
        }
    }
    out
}

fn unit_weights(sites: usize, x: usize) -> Vec<Complex64> {
    let mut w = vec![re(0.0); sites];
    w[x] = re(1.0);
    w
}

/// `P_M c_x P_M`.
pub fn annihilate(basis: &TruncatedBasis, x: usize) -> SparseOperator {
    check_site(basis, x);
    SparseOperator::from_triplets(
        basis.dim(),
        lowering_triplets(basis, &unit_weights(basis.sites(), x)),
        SectorShift::LowersByOne,
    )
}

/// `P_M c†_x P_M`; equals the conjugate transpose of [`annihilate`].
pub fn create(basis: &TruncatedBasis, x: usize) -> SparseOperator {
    check_site(basis, x);
    SparseOperator::from_triplets(
        basis.dim(),
        raising_triplets(basis, &unit_weights(basis.sites(), x)),
        SectorShift::RaisesByOne,
    )
}

/// `n̂_x`, diagonal.
pub fn number(basis: &TruncatedBasis, x: usize) -> SparseOperator {
    check_site(basis, x);
    let diag: Vec<f64> = basis.states().map(|s| s[x] as f64).collect();
    SparseOperator::diagonal(&diag)
}

/// `N̂ = Σ_x n̂_x`.
pub fn total_number(basis: &TruncatedBasis) -> SparseOperator {
    let diag: Vec<f64> = (0..basis.dim()).map(|i| basis.total(i) as f64).collect();
    SparseOperator::diagonal(&diag)
}

/// `N̂₂ = Σ_x n̂_x²`.
pub fn number_squared(basis: &TruncatedBasis) -> SparseOperator {
    let diag: Vec<f64> = basis
        .states()
        .map(|s| s.iter().map(|&n| (n as f64) * (n as f64)).sum())
        .collect();
    SparseOperator::diagonal(&diag)
}

/// `Σ_{x,y} t_xy c†_x c_y`, optionally restricted to the off-diagonal
/// (`T′`, x ≠ y) or on-site (`T″`) part.
fn hopping_operator(
    basis: &TruncatedBasis,
    hopping: &HoppingMatrix,
    off_diagonal: bool,
    on_site: bool,
) -> SparseOperator {
    assert_eq!(hopping.sites(), basis.sites());
    let mut triplets = Vec::new();
    let mut scratch = vec![0u16; basis.sites()];
    let bonds: Vec<(usize, usize, Complex64)> = hopping.nonzero().collect();
    for j in 0..basis.dim() {
        scratch.copy_from_slice(basis.state(j));
        for &(x, y, t) in &bonds {
            if x == y {
                if on_site && scratch[x] > 0 {
                    triplets.push((j, j, t * scratch[x] as f64));
                }
                continue;
            }
            if !off_diagonal || scratch[y] == 0 {
                continue;
            }
            let (nx, ny) = (scratch[x], scratch[y]);
            scratch[y] = ny - 1;
            scratch[x] = nx + 1;
            let i = basis.try_index(&scratch).expect("hopping preserves the total");
            scratch[x] = nx;
            scratch[y] = ny;
            let amp = ((nx as f64 + 1.0) * ny as f64).sqrt();
            triplets.push((i, j, t * amp));
        }
    }
    SparseOperator::from_triplets(basis.dim(), triplets, SectorShift::Preserves)
}

/// `T = T′ + T″`.
pub fn hopping(basis: &TruncatedBasis, t: &HoppingMatrix) -> SparseOperator {
    hopping_operator(basis, t, true, true)
}

/// `T′ = Σ_{x≠y} t_xy c†_x c_y`.
pub fn hopping_off_diagonal(basis: &TruncatedBasis, t: &HoppingMatrix) -> SparseOperator {
    hopping_operator(basis, t, true, false)
}

/// `T″ = Σ_x t_xx n̂_x`.
pub fn hopping_on_site(basis: &TruncatedBasis, t: &HoppingMatrix) -> SparseOperator {
    hopping_operator(basis, t, false, true)
}

/// `c†_x c_y` for a single pair.
pub fn pair_hopping(basis: &TruncatedBasis, x: usize, y: usize) -> SparseOperator {
    let mut values = vec![re(0.0); basis.sites() * basis.sites()];
    values[x * basis.sites() + y] = re(1.0);
    let mut triplets = Vec::new();
    let mut scratch = vec![0u16; basis.sites()];
    for j in 0..basis.dim() {
        scratch.copy_from_slice(basis.state(j));
        if x == y {
            if scratch[x] > 0 {
                triplets.push((j, j, re(scratch[x] as f64)));
            }
            continue;
        }
        let (nx, ny) = (scratch[x], scratch[y]);
        if ny == 0 {
            continue;
        }
        scratch[y] = ny - 1;
        scratch[x] = nx + 1;
        let i = basis.try_index(&scratch).expect("hopping preserves the total");
        scratch[x] = nx;
        scratch[y] = ny;
        triplets.push((i, j, re(((nx as f64 + 1.0) * ny as f64).sqrt())));
    }
    SparseOperator::from_triplets(basis.dim(), triplets, SectorShift::Preserves)
}

/// `L = Σ_x (c†_x + c_x)`.
pub fn symmetry_breaking(basis: &TruncatedBasis) -> SparseOperator {
    let ones = vec![re(1.0); basis.sites()];
    let mut triplets = lowering_triplets(basis, &ones);
    triplets.extend(raising_triplets(basis, &ones));
    SparseOperator::from_triplets(basis.dim(), triplets, SectorShift::Mixed)
}

/// `N̂`, `N̂₂`, `T`, `L` on one basis.
#[derive(Debug, Clone)]
pub struct GlobalOperators {
    pub number: SparseOperator,
    pub number_squared: SparseOperator,
    pub hopping: SparseOperator,
    pub symmetry_breaking: SparseOperator,
}

pub fn global_operators(basis: &TruncatedBasis, hopping_matrix: &HoppingMatrix) -> Result<GlobalOperators> {
    if hopping_matrix.sites() != basis.sites() {
        return Err(Error::DimensionMismatch {
            left: hopping_matrix.sites(),
            right: basis.sites(),
        });
    }
    // re-run the Hermiticity validation for hand-built matrices
    let checked = HoppingMatrix::from_rows(
        hopping_matrix.sites(),
        (0..hopping_matrix.sites())
            .flat_map(|x| (0..hopping_matrix.sites()).map(move |y| (x, y)))
            .map(|(x, y)| hopping_matrix.get(x, y))
            .collect(),
    )?;
    Ok(GlobalOperators {
        number: total_number(basis),
        number_squared: number_squared(basis),
        hopping: hopping(basis, &checked),
        symmetry_breaking: symmetry_breaking(basis),
    })
}

/// `H_M = P_M (U·N₂ + T − μ·N + λ·L) P_M`.
pub fn hamiltonian(model: &ModelSpec, basis: &TruncatedBasis) -> Result<SparseOperator> {
    model.validate()?;
    if model.sites() != basis.sites() {
        return Err(Error::DimensionMismatch {
            left: model.sites(),
            right: basis.sites(),
        });
    }
    let t = hopping(basis, &model.hopping.matrix());
    let diag: Vec<f64> = basis
        .states()
        .map(|s| {
            let n: f64 = s.iter().map(|&n| n as f64).sum();
            let n2: f64 = s.iter().map(|&n| (n as f64) * (n as f64)).sum();
            model.u * n2 - model.mu * n
        })
        .collect();
    let mut h = SparseOperator::diagonal(&diag).add(&t)?;
    if model.lambda != 0.0 {
        h = h.axpy(re(model.lambda), &symmetry_breaking(basis))?;
    } else {
        h = h.with_shift(SectorShift::Preserves);
    }
    Ok(h)
}

fn phases(lattice: &LatticeSpec, k: &Momentum, conjugate: bool) -> Vec<Complex64> {
    let norm = 1.0 / (lattice.site_count() as f64).sqrt();
    (0..lattice.site_count())
        .map(|x| {
            let p = lattice.phase(k, x) * norm;
            if conjugate {
                p.conj()
            } else {
                p
            }
        })
        .collect()
}

/// `c(k) = |Λ|^{-1/2} Σ_x e^{ik·x} c_x`.
pub fn momentum_annihilate(basis: &TruncatedBasis, lattice: &LatticeSpec, k: &Momentum) -> SparseOperator {
    SparseOperator::from_triplets(
        basis.dim(),
        lowering_triplets(basis, &phases(lattice, k, false)),
        SectorShift::LowersByOne,
    )
}

/// `A(k) = c†(k) = |Λ|^{-1/2} Σ_x e^{−ik·x} c†_x`.
pub fn momentum_create(basis: &TruncatedBasis, lattice: &LatticeSpec, k: &Momentum) -> SparseOperator {
    SparseOperator::from_triplets(
        basis.dim(),
        raising_triplets(basis, &phases(lattice, k, true)),
        SectorShift::RaisesByOne,
    )
}

/// `C(k) = |Λ|^{-1/2} Σ_x e^{ik·x} n̂_x`, diagonal.
pub fn density_wave(basis: &TruncatedBasis, lattice: &LatticeSpec, k: &Momentum) -> SparseOperator {
    let w = phases(lattice, k, false);
    SparseOperator::from_triplets(
        basis.dim(),
        basis.states().enumerate().map(|(i, s)| {
            let v: Complex64 = s.iter().zip(&w).map(|(&n, &p)| p * n as f64).sum();
            (i, i, v)
        }),
        SectorShift::Preserves,
    )
}

/// `c(k)`, `A(k)` and `C(k)` for one momentum.
#[derive(Debug, Clone)]
pub struct MomentumOperators {
    pub annihilate: SparseOperator,
    pub create: SparseOperator,
    pub density_wave: SparseOperator,
}

pub fn momentum_operators(basis: &TruncatedBasis, lattice: &LatticeSpec, k: &Momentum) -> MomentumOperators {
    MomentumOperators {
        annihilate: momentum_annihilate(basis, lattice, k),
        create: momentum_create(basis, lattice, k),
        density_wave: density_wave(basis, lattice, k),
    }
}

/// Commutators written out from their closed forms rather than multiplied.
#[derive(Debug, Clone)]
pub struct ClosedForms {
    /// `[C, A] = |Λ|^{-1} Σ_x c†_x`.
    pub c_a: SparseOperator,
    /// `[C, L] = |Λ|^{-1/2} Σ_x e^{ik·x} (c†_x − c_x)`.
    pub c_l: SparseOperator,
    /// `[[C, L], C†] = −L/|Λ|`.
    pub c_l_cdag: SparseOperator,
    /// `[C, T] = |Λ|^{-1/2} Σ_{x,z} t_xz (e^{ik·x} − e^{ik·z}) c†_x c_z`.
    pub c_t: SparseOperator,
    /// `[[C, T], C†] = −(2/|Λ|) Σ_{x,y} t_xy (1 − cos k·(x−y)) c†_x c_y`.
    pub c_t_cdag: SparseOperator,
    /// `[[C, H], C†] = [[C, T], C†] + λ [[C, L], C†]`.
    pub c_h_cdag: SparseOperator,
}

pub fn closed_form_commutators(basis: &TruncatedBasis, model: &ModelSpec, k: &Momentum) -> Result<ClosedForms> {
    let lattice = &model.lattice;
    let sites = lattice.site_count();
    let vol = sites as f64;
    let t = model.hopping.matrix();

    let c_a = SparseOperator::from_triplets(
        basis.dim(),
        raising_triplets(basis, &vec![re(1.0 / vol); sites]),
        SectorShift::RaisesByOne,
    );

    let w = phases(lattice, k, false);
    let minus_w: Vec<Complex64> = w.iter().map(|&p| -p).collect();
    let mut c_l_triplets = raising_triplets(basis, &w);
    c_l_triplets.extend(lowering_triplets(basis, &minus_w));
    let c_l = SparseOperator::from_triplets(basis.dim(), c_l_triplets, SectorShift::Mixed);

    let c_l_cdag = symmetry_breaking(basis).scale_real(-1.0 / vol);

    let norm = 1.0 / vol.sqrt();
    let mut ct_values = vec![re(0.0); sites * sites];
    let mut ctc_values = vec![re(0.0); sites * sites];
    for (x, y, txy) in t.nonzero() {
        let px = lattice.phase(k, x);
        let py = lattice.phase(k, y);
        ct_values[x * sites + y] = txy * (px - py) * norm;
        let diff: Vec<i64> = lattice
            .coords(x)
            .iter()
            .zip(lattice.coords(y))
            .map(|(&a, b)| a as i64 - b as i64)
            .collect();
        let cos = k.phase_at_displacement(&diff).re;
        ctc_values[x * sites + y] = txy * (-2.0 / vol) * (1.0 - cos);
    }
    let c_t = weighted_pairs(basis, sites, &ct_values);
    let c_t_cdag = weighted_pairs(basis, sites, &ctc_values);
    let c_h_cdag = c_t_cdag.axpy(re(model.lambda), &c_l_cdag)?;
    Ok(ClosedForms {
        c_a,
        c_l,
        c_l_cdag,
        c_t,
        c_t_cdag,
        c_h_cdag,
    })
}

/// `Σ_{x,y} a_xy c†_x c_y` for an arbitrary (not necessarily Hermitian)
/// coefficient matrix.
fn weighted_pairs(basis: &TruncatedBasis, sites: usize, coeffs: &[Complex64]) -> SparseOperator {
    let mut triplets = Vec::new();
    let mut scratch = vec![0u16; sites];
    for j in 0..basis.dim() {
        scratch.copy_from_slice(basis.state(j));
        for x in 0..sites {
            for y in 0..sites {
                let a = coeffs[x * sites + y];
                if a == re(0.0) {
                    continue;
                }
                if x == y {
                    if scratch[x] > 0 {
                        triplets.push((j, j, a * scratch[x] as f64));
                    }
                    continue;
                }
                let (nx, ny) = (scratch[x], scratch[y]);
                if ny == 0 {
                    continue;
                }
                scratch[y] = ny - 1;
                scratch[x] = nx + 1;
                let i = basis.try_index(&scratch).expect("hopping preserves the total");
                scratch[x] = nx;
                scratch[y] = ny;
                triplets.push((i, j, a * ((nx as f64 + 1.0) * ny as f64).sqrt()));
            }
        }
    }
    SparseOperator::from_triplets(basis.dim(), triplets, SectorShift::Preserves)
}
