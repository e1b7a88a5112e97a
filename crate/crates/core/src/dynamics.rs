//! Lindblad generators, their duals, propagation and stationary states.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::linalg::Schur;

use crate::error::{Error, Result};
use crate::linalg::{
    c, conjugate, devectorize, ensure_dim, ensure_square, hermitian_deviation,
    hermitian_eigensystem_tol, identity, matrix_exponential, max_abs, vectorize, ComplexMatrix,
    QuantumState, C64, I, ZERO,
};
use crate::ode::{self, OdeOptions};
use crate::tolerance::Tolerances;

/// Generators up to this dimension are held as dense `d² × d²` matrices and
/// propagated by exponentiation.
pub const DENSE_LIMIT: usize = 8;

/// Largest dimension for which a stationary state is computed from the
/// full generator spectrum.
pub const STATIONARY_LIMIT: usize = 24;

/// `dρ/dt = −i[H̄, ρ] + Σ a_{μν} (V_μ ρ V_ν† − ½{V_ν† V_μ, ρ})`.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladModel {
    h_bar: ComplexMatrix,
    jump_ops: Vec<ComplexMatrix>,
    rates: ComplexMatrix,
}

impl LindbladModel {
    pub fn new(
        h_bar: ComplexMatrix,
        jump_ops: Vec<ComplexMatrix>,
        rates: ComplexMatrix,
    ) -> Result<Self> {
        Self::with_tolerances(h_bar, jump_ops, rates, &Tolerances::default())
    }

    pub fn with_tolerances(
        h_bar: ComplexMatrix,
        jump_ops: Vec<ComplexMatrix>,
        rates: ComplexMatrix,
        tol: &Tolerances,
    ) -> Result<Self> {
        let d = ensure_square(&h_bar)?;
        let deviation = hermitian_deviation(&h_bar);
        if deviation > tol.validity {
            return Err(Error::NotHermitian { deviation });
        }
        for v in &jump_ops {
            ensure_dim(v, d)?;
        }
        ensure_dim(&rates, jump_ops.len())?;
        if !jump_ops.is_empty() {
            let deviation = hermitian_deviation(&rates);
            if deviation > tol.validity {
                return Err(Error::NotHermitian { deviation });
            }
            let min_eigenvalue = hermitian_eigensystem_tol(&rates, f64::INFINITY)?.min_eigenvalue();
            if min_eigenvalue < -tol.validity {
                return Err(Error::InvalidRates { min_eigenvalue });
            }
        }
        Ok(Self {
            h_bar,
            jump_ops,
            rates,
        })
    }

    /// Model with a diagonal rate matrix: one `(rate, V)` per channel.
    pub fn diagonal(h_bar: ComplexMatrix, channels: Vec<(f64, ComplexMatrix)>) -> Result<Self> {
        let k = channels.len();
        let mut rates = ComplexMatrix::zeros(k, k);
        let mut ops = Vec::with_capacity(k);
        for (i, (rate, op)) in channels.into_iter().enumerate() {
            rates[(i, i)] = c(rate, 0.0);
            ops.push(op);
        }
        Self::new(h_bar, ops, rates)
    }

    pub fn dim(&self) -> usize {
        self.h_bar.nrows()
    }

    pub fn h_bar(&self) -> &ComplexMatrix {
        &self.h_bar
    }

    pub fn jump_ops(&self) -> &[ComplexMatrix] {
        &self.jump_ops
    }

    pub fn rates(&self) -> &ComplexMatrix {
        &self.rates
    }

    fn rate_terms(&self) -> impl Iterator<Item = (C64, &ComplexMatrix, &ComplexMatrix)> + '_ {
        let k = self.jump_ops.len();
        (0..k)
            .flat_map(move |mu| (0..k).map(move |nu| (mu, nu)))
            .filter_map(move |(mu, nu)| {
                let a = self.rates[(mu, nu)];
                (a != ZERO).then(|| (a, &self.jump_ops[mu], &self.jump_ops[nu]))
            })
    }

    /// `L[ρ]`.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = (&self.h_bar * rho - rho * &self.h_bar).map(|z| z * -I);
        for (a, v_mu, v_nu) in self.rate_terms() {
            let nu_dag = v_nu.adjoint();
            let prod = &nu_dag * v_mu;
            let term = v_mu * rho * &nu_dag - (&prod * rho + rho * &prod).map(|z| z * 0.5);
            out += term.map(|z| z * a);
        }
        out
    }

    /// `L★[A]`, the Heisenberg-picture generator.
    pub fn apply_dual(&self, a_op: &ComplexMatrix) -> ComplexMatrix {
        let mut out = (&self.h_bar * a_op - a_op * &self.h_bar).map(|z| z * I);
        for (a, v_mu, v_nu) in self.rate_terms() {
            let nu_dag = v_nu.adjoint();
            let prod = &nu_dag * v_mu;
            let term = &nu_dag * a_op * v_mu - (&prod * a_op + a_op * &prod).map(|z| z * 0.5);
            out += term.map(|z| z * a);
        }
        out
    }

    /// True when the forward generator annihilates the identity.
    pub fn is_unital(&self, tol: f64) -> bool {
        max_abs(&self.apply(&identity(self.dim()))) <= tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Schrödinger picture, acts on states.
    Forward,
    /// Heisenberg picture, acts on observables.
    Dual,
}

/// A generator acting on column-stacked operators.
///
/// Small generators carry their dense matrix; larger ones are applied
/// through the model directly.
#[derive(Debug, Clone)]
pub struct Superoperator {
    model: LindbladModel,
    direction: Direction,
    matrix: Option<ComplexMatrix>,
}

impl Superoperator {
    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn model(&self) -> &LindbladModel {
        &self.model
    }

    /// Dense `d² × d²` matrix, built on demand if not cached.
    pub fn matrix(&self) -> ComplexMatrix {
        match &self.matrix {
            Some(m) => m.clone(),
            None => dense_generator(&self.model, self.direction),
        }
    }

    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        match self.direction {
            Direction::Forward => self.model.apply(x),
            Direction::Dual => self.model.apply_dual(x),
        }
    }
}

fn dense_generator(m: &LindbladModel, direction: Direction) -> ComplexMatrix {
    let d = m.dim();
    let id = identity(d);
    let h = m.h_bar();
    let sign = match direction {
        Direction::Forward => -I,
        Direction::Dual => I,
    };
    // vec(A X B) = (Bᵀ ⊗ A) vec(X)
    let mut g = (id.kronecker(h) - h.transpose().kronecker(&id)).map(|z| z * sign);
    for (a, v_mu, v_nu) in m.rate_terms() {
        let prod = v_nu.adjoint() * v_mu;
        let jump = match direction {
            Direction::Forward => conjugate(v_nu).kronecker(v_mu),
            Direction::Dual => v_mu.transpose().kronecker(&v_nu.adjoint()),
        };
        let anti = id.kronecker(&prod) + prod.transpose().kronecker(&id);
        g += (jump - anti.map(|z| z * 0.5)).map(|z| z * a);
    }
    g
}

fn build(m: &LindbladModel, direction: Direction) -> Superoperator {
    let matrix = (m.dim() <= DENSE_LIMIT).then(|| dense_generator(m, direction));
    Superoperator {
        model: m.clone(),
        direction,
        matrix,
    }
}

/// Forward generator `L`.
pub fn liouvillian(m: &LindbladModel) -> Superoperator {
    build(m, Direction::Forward)
}

/// Dual generator `L★` with `Tr[A L[ρ]] = Tr[ρ L★[A]]`.
pub fn dual_liouvillian(m: &LindbladModel) -> Superoperator {
    build(m, Direction::Dual)
}

/// `e^{tG}[x0]`.
pub fn propagate(g: &Superoperator, x0: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    Ok(propagate_series(g, x0, &[t])?
        .pop()
        .expect("one time requested"))
}

/// `e^{tG}[x0]` for every `t` in an ascending non-negative grid.
pub fn propagate_series(
    g: &Superoperator,
    x0: &ComplexMatrix,
    times: &[f64],
) -> Result<Vec<ComplexMatrix>> {
    let d = g.dim();
    ensure_dim(x0, d)?;
    if times.iter().any(|&t| !(t >= 0.0) || !t.is_finite()) {
        return Err(Error::InvalidParameter(
            "times must be finite and non-negative".into(),
        ));
    }
    match &g.matrix {
        Some(mat) => {
            let v0 = vectorize(x0);
            times
                .iter()
                .map(|&t| {
                    let e = matrix_exponential(&mat.map(|z| z * t))?;
                    Ok(devectorize(&(e * &v0), d))
                })
                .collect()
        }
        None => {
            let mut sorted = times.to_vec();
            sorted.sort_by(f64::total_cmp);
            let solved =
                ode::integrate(|_, x| g.apply(x), 0.0, x0, &sorted, OdeOptions::default())?;
            Ok(times
                .iter()
                .map(|t| {
                    let idx = sorted.iter().position(|s| s == t).expect("time present");
                    solved[idx].clone()
                })
                .collect())
        }
    }
}

/// Eigenvalues of a dense generator, sorted by modulus.
pub fn generator_spectrum(g: &Superoperator) -> Result<Vec<C64>> {
    if g.dim() > STATIONARY_LIMIT {
        return Err(Error::InvalidParameter(
            "generator too large for a dense spectrum".into(),
        ));
    }
    let mat = g.matrix();
    let schur = Schur::try_new(mat, 1e-15, 100_000)
        .ok_or_else(|| Error::Numerical("Schur decomposition did not converge".into()))?;
    let values = schur
        .eigenvalues()
        .ok_or_else(|| Error::Numerical("Schur form not triangular".into()))?;
    let mut list: Vec<C64> = values.iter().copied().collect();
    list.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    Ok(list)
}

/// Slowest nonzero relaxation rate `min |Re λ|` over the non-null modes.
pub fn slowest_rate(g: &Superoperator) -> Result<f64> {
    let spectrum = generator_spectrum(g)?;
    let tol = Tolerances::default().null_eigenvalue;
    spectrum
        .iter()
        .skip(1)
        .map(|z| -z.re)
        .filter(|&r| r > tol)
        .min_by(f64::total_cmp)
        .ok_or(Error::DegenerateSteadyState { second: 0.0 })
}

/// Unique steady state of a forward generator.
pub fn stationary_state(g: &Superoperator) -> Result<QuantumState> {
    stationary_state_tol(g, &Tolerances::default())
}

pub fn stationary_state_tol(g: &Superoperator, tol: &Tolerances) -> Result<QuantumState> {
    if g.direction != Direction::Forward {
        return Err(Error::InvalidParameter(
            "stationary state needs a forward generator".into(),
        ));
    }
    let d = g.dim();
    let spectrum = generator_spectrum(g)?;
    if spectrum.len() > 1 && spectrum[1].norm() < tol.null_eigenvalue {
        return Err(Error::DegenerateSteadyState {
            second: spectrum[1].norm(),
        });
    }
    let mat = g.matrix();
    let svd = mat.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Numerical("SVD without right vectors".into()))?;
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty spectrum");
    let null = v_t.row(idx).adjoint();
    let rho = devectorize(&null, d);
    let tr = rho.trace();
    let rho = rho.map(|z| z / tr);
    let rho = (&rho + rho.adjoint()).map(|z| z * 0.5);
    let residual = max_abs(&g.apply(&rho));
    if residual > tol.reconstruction {
        return Err(Error::Numerical(alloc::format!(
            "steady-state residual {residual:e}"
        )));
    }
    QuantumState::with_tolerance(rho, vec![d], tol.validity)
}

/// Computational-basis complex conjugate of a state.
pub fn time_reversed_state(rho: &QuantumState) -> QuantumState {
    QuantumState::from_parts_unchecked(conjugate(rho.matrix()), rho.dims().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli, trace_product};
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn thermal(gamma: f64, n_th: f64) -> LindbladModel {
        LindbladModel::diagonal(
            pauli::sigma_z().map(|z| z * 0.5),
            vec![
                (gamma * (n_th + 1.0), pauli::lowering()),
                (gamma * n_th, pauli::raising()),
            ],
        )
        .unwrap()
    }

    #[test]
    fn dense_matches_direct_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = random::hermitian(3, 1.0, &mut rng);
        let v1 = random::ginibre(3, 3, &mut rng);
        let v2 = random::ginibre(3, 3, &mut rng);
        let g = random::ginibre(2, 2, &mut rng);
        let rates = &g * g.adjoint();
        let m = LindbladModel::new(h, vec![v1, v2], rates).unwrap();
        let x = random::ginibre(3, 3, &mut rng);
        for sup in [liouvillian(&m), dual_liouvillian(&m)] {
            let dense = devectorize(&(sup.matrix() * vectorize(&x)), 3);
            assert!(max_abs(&(dense - sup.apply(&x))) < 1e-12);
        }
    }

    #[test]
    fn rejects_indefinite_rates() {
        let rates = crate::linalg::real_matrix(2, 2, &[1.0, 0.0, 0.0, -0.5]);
        let err = LindbladModel::new(
            pauli::sigma_z(),
            vec![pauli::sigma_x(), pauli::sigma_y()],
            rates,
        );
        assert!(matches!(err, Err(Error::InvalidRates { .. })));
    }

    #[test]
    fn dual_identity_is_fixed() {
        let m = thermal(1.3, 0.4);
        assert!(max_abs(&m.apply_dual(&identity(2))) < 1e-15);
    }

    #[test]
    fn thermal_stationary_state() {
        let (gamma, n_th) = (0.7, 0.3);
        let kappa = gamma * (n_th + 1.0);
        let zeta = gamma * n_th;
        let rho = stationary_state(&liouvillian(&thermal(gamma, n_th))).unwrap();
        assert!((rho.matrix()[(0, 0)].re - zeta / (kappa + zeta)).abs() < 1e-12);
        assert!((rho.matrix()[(1, 1)].re - kappa / (kappa + zeta)).abs() < 1e-12);
        let sz = rho.expectation(&pauli::sigma_z()).re;
        assert!((sz - (zeta - kappa) / (zeta + kappa)).abs() < 1e-12);
    }

    #[test]
    fn degenerate_steady_manifold_is_refused() {
        let m = LindbladModel::diagonal(pauli::sigma_z(), vec![]).unwrap();
        assert!(matches!(
            stationary_state(&liouvillian(&m)),
            Err(Error::DegenerateSteadyState { .. })
        ));
    }

    #[test]
    fn semigroup_property() {
        let m = thermal(1.0, 0.5);
        let g = liouvillian(&m);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random::mixed_state(2, &mut rng).into_matrix();
        let direct = propagate(&g, &rho, 1.7).unwrap();
        let composed = propagate(&g, &propagate(&g, &rho, 0.5).unwrap(), 1.2).unwrap();
        assert!(max_abs(&(direct - composed)) < 1e-12);
        assert!(max_abs(&(propagate(&g, &rho, 0.0).unwrap() - &rho)) < 1e-15);
    }

    #[test]
    fn ode_route_matches_dense_route() {
        let m = thermal(0.8, 1.0);
        let dense = dual_liouvillian(&m);
        let lazy = Superoperator {
            model: m.clone(),
            direction: Direction::Dual,
            matrix: None,
        };
        let a0 = pauli::sigma_x() + pauli::sigma_z().map(|z| z * 0.3);
        let times = [0.0, 0.4, 2.5];
        let a = propagate_series(&dense, &a0, &times).unwrap();
        let b = propagate_series(&lazy, &a0, &times).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!(max_abs(&(x - y)) < 1e-9);
        }
    }

    #[test]
    fn conjugation_flips_imaginary_parts() {
        let rho = QuantumState::from_bloch_vector(0.2, 0.5, -0.1).unwrap();
        let rev = time_reversed_state(&rho);
        assert!((rev.expectation(&pauli::sigma_y()).re + 0.5).abs() < 1e-15);
        assert!((trace_product(rev.matrix(), &pauli::sigma_x()).re - 0.2).abs() < 1e-15);
    }
}
