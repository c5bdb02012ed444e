//! Finite-dimensional Bogolyubov inequality
//! `(β/2)·⟨(AA†+A†A)_M⟩·⟨[[C,H],C†]_M⟩ ≥ |⟨[C,A]_M⟩|²`
//! with `A = c†(k)`, `C = C(k)`, and the momentum-summed chain derived
//! from it.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::TruncatedBasis;
use crate::lattice::Momentum;
use crate::operators::{
    closed_form_commutators, commutator, density_wave, hamiltonian, momentum_annihilate,
    momentum_create, symmetry_breaking, total_number, ModelSpec, SparseOperator,
};
use crate::thermal::{thermal_average, Equilibrium};

/// Absolute tolerance for matrix identities.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Relative tolerance for thermal inequalities.
pub const INEQUALITY_RTOL: f64 = 1e-9;
/// Tolerance on the closed-form/direct commutator agreement.
pub const CLOSED_FORM_TOL: f64 = 1e-11;
/// Floor for averages that must be nonnegative.
pub const POSITIVITY_TOL: f64 = 1e-12;

/// `‖X − Y‖_F / max(‖Y‖_F, 1)`.
pub fn frobenius_relative(x: &SparseOperator, y: &SparseOperator) -> Result<f64> {
    Ok(x.sub(y)?.frobenius_norm() / y.frobenius_norm().max(1.0))
}

/// Model parameters plus cutoff, for report rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParameterPoint {
    pub dimension: usize,
    pub size: usize,
    pub cutoff: usize,
    pub u: f64,
    pub mu: f64,
    pub lambda: f64,
    pub beta: f64,
}

impl ParameterPoint {
    pub fn new(model: &ModelSpec, cutoff: usize) -> Self {
        Self {
            dimension: model.lattice.dimension(),
            size: model.lattice.size(),
            cutoff,
            u: model.u,
            mu: model.mu,
            lambda: model.lambda,
            beta: model.beta,
        }
    }
}

/// Max entry deltas of the three projection identities.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionReport {
    pub point: ParameterPoint,
    pub k: Vec<usize>,
    /// `[C_M, A_M]` vs `([C, A])_M`.
    pub commutator_delta: f64,
    /// `[[C_M, H_M], C_M†]` vs `([[C, H], C†])_M`.
    pub double_commutator_delta: f64,
    /// `A_M A_M† + A_M† A_M` vs `(AA† + A†A)_M − q_M A†A q_M`.
    pub anticommutator_delta: f64,
    /// Smallest eigenvalue of the `q_M A†A q_M` block.
    pub correction_min_eigenvalue: f64,
    pub pass: bool,
}

/// Check the projection identities at cutoff `M` against operators built at
/// cutoff `M + 2` and compressed.
pub fn verify_projection_identities(
    model: &ModelSpec,
    cutoff: usize,
    k: &Momentum,
    cap: usize,
) -> Result<ProjectionReport> {
    if cutoff < 2 {
        return Err(Error::InvalidParameter(format!(
            "projection identities need M >= 2 (got {cutoff})"
        )));
    }
    let lattice = &model.lattice;
    let big = TruncatedBasis::with_cap(model.sites(), cutoff + 2, cap)?;
    let dim = big.prefix_dim(cutoff);

    let a = momentum_create(&big, lattice, k);
    let c = density_wave(&big, lattice, k);
    let h = hamiltonian(model, &big)?;
    let (a_m, c_m, h_m) = (a.compress(dim), c.compress(dim), h.compress(dim));

    let lhs1 = commutator(&c_m, &a_m)?;
    let rhs1 = commutator(&c, &a)?.compress(dim);
    let commutator_delta = lhs1.max_abs_diff(&rhs1)?;

    let lhs2 = commutator(&commutator(&c_m, &h_m)?, &c_m.adjoint())?;
    let rhs2 = commutator(&commutator(&c, &h)?, &c.adjoint())?.compress(dim);
    let double_commutator_delta = lhs2.max_abs_diff(&rhs2)?;

    let a_m_dag = a_m.adjoint();
    let lhs3 = a_m.mul(&a_m_dag)?.add(&a_m_dag.mul(&a_m)?)?;
    let a_dag = a.adjoint();
    let ada = a_dag.mul(&a)?;
    let full = a.mul(&a_dag)?.add(&ada)?.compress(dim);
    let top = big.sector_range(cutoff);
    let correction = ada.compress(dim).sandwich(top.clone());
    let rhs3 = full.sub(&correction)?;
    let anticommutator_delta = lhs3.max_abs_diff(&rhs3)?;

    let block = correction.dense_block(top);
    let correction_min_eigenvalue = if block.nrows() == 0 {
        0.0
    } else {
        block
            .self_adjoint_eigenvalues(faer::Side::Lower)
            .map_err(|e| Error::Eigen(format!("{e:?}")))?
            .first()
            .copied()
            .unwrap_or(0.0)
    };

    let pass = commutator_delta <= IDENTITY_TOL
        && double_commutator_delta <= IDENTITY_TOL
        && anticommutator_delta <= IDENTITY_TOL
        && correction_min_eigenvalue >= -IDENTITY_TOL;
    Ok(ProjectionReport {
        point: ParameterPoint::new(model, cutoff),
        k: k.integers().to_vec(),
        commutator_delta,
        double_commutator_delta,
        anticommutator_delta,
        correction_min_eigenvalue,
        pass,
    })
}

/// Frobenius-relative deltas between direct products and closed forms on
/// the interior `D^(M−2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormDeltas {
    pub c_a: f64,
    pub c_l: f64,
    pub c_l_cdag: f64,
    pub c_t: f64,
    pub c_t_cdag: f64,
    pub c_h_cdag: f64,
}

impl ClosedFormDeltas {
    pub fn max(&self) -> f64 {
        [self.c_a, self.c_l, self.c_l_cdag, self.c_t, self.c_t_cdag, self.c_h_cdag]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Compare every commutator closed form with the direct matrix product.
pub fn closed_form_deltas(model: &ModelSpec, basis: &TruncatedBasis, k: &Momentum) -> Result<ClosedFormDeltas> {
    if basis.cutoff() < 2 {
        return Err(Error::InvalidParameter("interior D^(M-2) needs M >= 2".into()));
    }
    let lattice = &model.lattice;
    let inner = basis.prefix_dim(basis.cutoff() - 2);
    let cf = closed_form_commutators(basis, model, k)?;
    let a = momentum_create(basis, lattice, k);
    let c = density_wave(basis, lattice, k);
    let c_dag = c.adjoint();
    let l = symmetry_breaking(basis);
    let t = crate::operators::hopping(basis, &model.hopping.matrix());
    let h = hamiltonian(model, basis)?;

    let rel = |x: SparseOperator, y: &SparseOperator| frobenius_relative(&x.compress(inner), &y.compress(inner));
    let c_l = commutator(&c, &l)?;
    let c_t = commutator(&c, &t)?;
    Ok(ClosedFormDeltas {
        c_a: rel(commutator(&c, &a)?, &cf.c_a)?,
        c_l_cdag: rel(commutator(&c_l, &c_dag)?, &cf.c_l_cdag)?,
        c_l: rel(c_l, &cf.c_l)?,
        c_t_cdag: rel(commutator(&c_t, &c_dag)?, &cf.c_t_cdag)?,
        c_t: rel(c_t, &cf.c_t)?,
        c_h_cdag: rel(commutator(&commutator(&c, &h)?, &c_dag)?, &cf.c_h_cdag)?,
    })
}

/// One `(parameter point, k)` instance of the Bogolyubov inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct BogolyubovReport {
    pub point: ParameterPoint,
    pub k: Vec<usize>,
    /// `⟨c†(k) c(k)⟩_M`.
    pub occupation: f64,
    /// `⟨(AA† + A†A)_M⟩_M = 2⟨c†(k)c(k)⟩_M + 1`.
    pub anticommutator: f64,
    /// `⟨A_M A_M† + A_M† A_M⟩_M` (with the `q_M` correction subtracted).
    pub anticommutator_corrected: f64,
    /// `⟨[[C_M, H_M], C_M†]⟩_M` from the matrix product.
    pub double_commutator: f64,
    /// Same average from the closed form.
    pub double_commutator_closed: f64,
    pub lhs: f64,
    pub lhs_corrected: f64,
    /// `|⟨[C, A]_M⟩|² = m_M`.
    pub rhs: f64,
    /// `|⟨([C,A])_M⟩|²` from the closed form `|Λ|^{-1} Σ c†_x`.
    pub rhs_closed: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub closed_form: ClosedFormDeltas,
    pub pass: bool,
}

pub fn verify_finite_bogolyubov(eq: &Equilibrium, k: &Momentum) -> Result<BogolyubovReport> {
    let model = &eq.model;
    let basis = &eq.basis;
    let lattice = &model.lattice;
    let vol = model.sites() as f64;

    let a = momentum_create(basis, lattice, k);
    let c_k = momentum_annihilate(basis, lattice, k);
    let c = density_wave(basis, lattice, k);
    let h = &eq.hamiltonian;

    let occupation = eq.average(&a.mul(&c_k)?)?.re;
    let anticommutator = 2.0 * occupation + 1.0;
    let a_dag = a.adjoint();
    let corrected_op = a.mul(&a_dag)?.add(&a_dag.mul(&a)?)?;
    let anticommutator_corrected = eq.average(&corrected_op)?.re;

    let dc = commutator(&commutator(&c, h)?, &c.adjoint())?;
    let double_commutator = eq.average(&dc)?.re;
    let cf = closed_form_commutators(basis, model, k)?;
    let double_commutator_closed = eq.average(&cf.c_h_cdag)?.re;

    let amplitude = eq.condensate_amplitude();
    let rhs = amplitude.norm_sqr() / vol;
    let rhs_closed = eq.average(&cf.c_a)?.norm_sqr();

    let lhs = 0.5 * model.beta * anticommutator * double_commutator;
    let lhs_corrected = 0.5 * model.beta * anticommutator_corrected * double_commutator;
    let slack = lhs - rhs;
    let tolerance = INEQUALITY_RTOL * lhs.abs().max(1.0);
    let closed_form = if basis.cutoff() >= 2 {
        closed_form_deltas(model, basis, k)?
    } else {
        ClosedFormDeltas {
            c_a: 0.0,
            c_l: 0.0,
            c_l_cdag: 0.0,
            c_t: 0.0,
            c_t_cdag: 0.0,
            c_h_cdag: 0.0,
        }
    };
    let finite = [occupation, anticommutator_corrected, double_commutator, double_commutator_closed, rhs]
        .iter()
        .all(|x| x.is_finite());
    let pass = finite
        && slack >= -tolerance
        && double_commutator >= -POSITIVITY_TOL
        && closed_form.max() <= CLOSED_FORM_TOL;
    Ok(BogolyubovReport {
        point: ParameterPoint::new(model, basis.cutoff()),
        k: k.integers().to_vec(),
        occupation,
        anticommutator,
        anticommutator_corrected,
        double_commutator,
        double_commutator_closed,
        lhs,
        lhs_corrected,
        rhs,
        rhs_closed,
        slack,
        tolerance,
        closed_form,
        pass,
    })
}

/// `|⟨L_M⟩_M| ≤ ⟨N̂_M⟩_M + |Λ|`.
#[derive(Debug, Clone, PartialEq)]
pub struct LBoundReport {
    pub point: ParameterPoint,
    pub l_average: Complex64,
    pub n_average: f64,
    pub slack: f64,
    pub pass: bool,
}

pub fn verify_l_average_bound(eq: &Equilibrium) -> Result<LBoundReport> {
    let vol = eq.model.sites() as f64;
    let l_average = thermal_average(&eq.state, &eq.spectrum, &symmetry_breaking(&eq.basis))?;
    let n_average = thermal_average(&eq.state, &eq.spectrum, &total_number(&eq.basis))?.re;
    let slack = n_average + vol - l_average.norm();
    Ok(LBoundReport {
        point: ParameterPoint::new(&eq.model, eq.cutoff()),
        l_average,
        n_average,
        slack,
        pass: slack >= -1e-10 * vol,
    })
}

/// One momentum term of the chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainTerm {
    pub k: Vec<usize>,
    /// `|k|²` with components in `[0, 2π)`.
    pub k_squared: f64,
    /// `⟨[[C,H],C†]⟩_M`.
    pub double_commutator: f64,
    /// `|λ| + ρ_M(𝕄₂|k|² + |λ|)`.
    pub denominator: f64,
    /// `m_M / denominator`.
    pub lhs: f64,
    /// `(β/2)(2⟨c†(k)c(k)⟩_M + 1)`.
    pub rhs: f64,
    pub intermediate_pass: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub point: ParameterPoint,
    pub density: f64,
    pub order_parameter: f64,
    pub terms: Vec<ChainTerm>,
    /// `m_M·|Λ|^{-1} Σ_k [ρ_M 𝕄₂|k|² + |λ|(ρ_M+1)]^{-1}`.
    pub summed_lhs: f64,
    /// `β(ρ_M + ½)`.
    pub summed_rhs: f64,
    pub pass: bool,
}

fn within(lhs: f64, rhs: f64) -> bool {
    lhs - rhs <= INEQUALITY_RTOL * rhs.abs().max(1.0)
}

pub fn verify_chain_inequality(eq: &Equilibrium) -> Result<ChainReport> {
    let model = &eq.model;
    if model.lambda == 0.0 {
        return Err(Error::Domain(
            "chain inequality needs lambda != 0 (the k = 0 denominator vanishes)".into(),
        ));
    }
    let lattice = &model.lattice;
    let basis = &eq.basis;
    let vol = model.sites() as f64;
    let lam = model.lambda.abs();
    let m2 = model.hopping.second_moment();
    let rho = eq.density();
    let m = eq.order_parameter();

    let mut terms = Vec::with_capacity(model.sites());
    for k in lattice.brillouin_momenta() {
        let k_squared = k.norm_squared();
        let c = density_wave(basis, lattice, &k);
        let dc = commutator(&commutator(&c, &eq.hamiltonian)?, &c.adjoint())?;
        let double_commutator = eq.average(&dc)?.re;
        let occ = eq
            .average(&momentum_create(basis, lattice, &k).mul(&momentum_annihilate(basis, lattice, &k))?)?
            .re;
        let denominator = lam + rho * (m2 * k_squared + lam);
        if denominator <= 0.0 {
            return Err(Error::Domain(format!("zero denominator at k = {:?}", k.integers())));
        }
        let lhs = m / denominator;
        let rhs = 0.5 * model.beta * (2.0 * occ + 1.0);
        let intermediate_pass = within(double_commutator, denominator);
        terms.push(ChainTerm {
            k: k.integers().to_vec(),
            k_squared,
            double_commutator,
            denominator,
            lhs,
            rhs,
            intermediate_pass,
            pass: within(lhs, rhs),
        });
    }
    let summed_lhs = m * terms
        .iter()
        .map(|t| 1.0 / (rho * m2 * t.k_squared + lam * (rho + 1.0)))
        .sum::<f64>()
        / vol;
    let summed_rhs = model.beta * (rho + 0.5);
    let pass = within(summed_lhs, summed_rhs) && terms.iter().all(|t| t.pass && t.intermediate_pass);
    Ok(ChainReport {
        point: ParameterPoint::new(model, eq.cutoff()),
        density: rho,
        order_parameter: m,
        terms,
        summed_lhs,
        summed_rhs,
        pass,
    })
}
