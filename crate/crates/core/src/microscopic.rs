//! Exact joint system–environment evolution.
//!
//! This is the brute-force reference for every identity involving `Q_t`:
//! dense propagators on the full Hilbert space, with the environment traced
//! out at the end.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{
    c, commutator, ensure_dim, hermitian_deviation, hermitian_eigensystem,
    hermitian_eigensystem_tol, identity, matrix_exponential, max_abs, partial_trace, pauli,
    trace_product, zeros, ComplexMatrix, QuantumState, C64, I,
};
use crate::tolerance::Tolerances;

/// Joint dimensions above this are refused; the dense oracle is not meant to
/// scale.
pub const MAX_JOINT_DIM: usize = 256;

/// `H = H_s ⊗ I_e + I_s ⊗ H_e + H_I` with the environment starting in `σ0`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointModel {
    h_s: ComplexMatrix,
    h_e: ComplexMatrix,
    h_i: ComplexMatrix,
    sigma0: QuantumState,
}

impl JointModel {
    pub fn new(
        h_s: ComplexMatrix,
        h_e: ComplexMatrix,
        h_i: ComplexMatrix,
        sigma0: QuantumState,
    ) -> Result<Self> {
        let tol = Tolerances::default().validity;
        let dim_s = h_s.nrows();
        let dim_e = h_e.nrows();
        ensure_dim(&h_s, dim_s)?;
        ensure_dim(&h_e, dim_e)?;
        ensure_dim(&h_i, dim_s * dim_e)?;
        if sigma0.dim() != dim_e {
            return Err(Error::DimensionMismatch {
                expected: dim_e,
                found: sigma0.dim(),
            });
        }
        if dim_s * dim_e > MAX_JOINT_DIM {
            return Err(Error::InvalidParameter(format!(
                "joint dimension {} exceeds {MAX_JOINT_DIM}",
                dim_s * dim_e
            )));
        }
        for block in [&h_s, &h_e, &h_i] {
            let deviation = hermitian_deviation(block);
            if deviation > tol {
                return Err(Error::NotHermitian { deviation });
            }
        }
        Ok(Self {
            h_s,
            h_e,
            h_i,
            sigma0,
        })
    }

    pub fn dim_s(&self) -> usize {
        self.h_s.nrows()
    }

    pub fn dim_e(&self) -> usize {
        self.h_e.nrows()
    }

    pub fn h_s(&self) -> &ComplexMatrix {
        &self.h_s
    }

    pub fn h_e(&self) -> &ComplexMatrix {
        &self.h_e
    }

    pub fn h_i(&self) -> &ComplexMatrix {
        &self.h_i
    }

    pub fn sigma0(&self) -> &QuantumState {
        &self.sigma0
    }

    fn dims(&self) -> [usize; 2] {
        [self.dim_s(), self.dim_e()]
    }

    /// `e^{−iHt}`.
    pub fn propagator(&self, t: f64) -> Result<ComplexMatrix> {
        matrix_exponential(&joint_hamiltonian(self).map(|z| z * c(0.0, -t)))
    }

    /// `I_s ⊗ σ0`.
    pub fn embedded_sigma0(&self) -> ComplexMatrix {
        identity(self.dim_s()).kronecker(self.sigma0.matrix())
    }

    fn embed_system(&self, op: &ComplexMatrix) -> ComplexMatrix {
        op.kronecker(&identity(self.dim_e()))
    }

    fn check_system_state(&self, rho0: &QuantumState) -> Result<()> {
        if rho0.dim() != self.dim_s() {
            return Err(Error::DimensionMismatch {
                expected: self.dim_s(),
                found: rho0.dim(),
            });
        }
        Ok(())
    }
}

pub fn joint_hamiltonian(m: &JointModel) -> ComplexMatrix {
    m.h_s.kronecker(&identity(m.dim_e())) + identity(m.dim_s()).kronecker(&m.h_e) + &m.h_i
}

/// `ρ_t = Tr_e[e^{−iHt}(ρ0 ⊗ σ0)e^{iHt}]`.
pub fn reduced_state(m: &JointModel, rho0: &QuantumState, t: f64) -> Result<QuantumState> {
    m.check_system_state(rho0)?;
    let u = m.propagator(t)?;
    let joint = &u * rho0.matrix().kronecker(m.sigma0.matrix()) * u.adjoint();
    let reduced = partial_trace(&joint, &m.dims(), &[0])?;
    let reduced = (&reduced + reduced.adjoint()).map(|z| z * 0.5);
    QuantumState::with_tolerance(reduced, vec![m.dim_s()], 1e-8)
}

fn bound_checked(value: f64, dim: usize) -> Result<f64> {
    let slack = Tolerances::default().bound;
    if value < -slack || value > dim as f64 + slack {
        return Err(Error::BoundViolation {
            value,
            bound: dim as f64,
        });
    }
    Ok(value)
}

/// `Q_t = Tr_se[(e^{−iHt}(ρ0 ⊗ I_e)e^{iHt})(I_s ⊗ σ0)]`.
pub fn quantumness_direct(m: &JointModel, rho0: &QuantumState, t: f64) -> Result<f64> {
    m.check_system_state(rho0)?;
    let u = m.propagator(t)?;
    let evolved = &u * m.embed_system(rho0.matrix()) * u.adjoint();
    bound_checked(trace_product(&evolved, &m.embedded_sigma0()).re, m.dim_s())
}

/// Heisenberg-picture reduced map `A_t = Tr_e[e^{iHt}(a0 ⊗ I)e^{−iHt}(I ⊗ σ0)]`.
pub fn dual_map_apply(m: &JointModel, a0: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    ensure_dim(a0, m.dim_s())?;
    let u = m.propagator(t)?;
    let evolved = u.adjoint() * m.embed_system(a0) * &u;
    partial_trace(&(evolved * m.embedded_sigma0()), &m.dims(), &[0])
}

/// `Q_t = Tr_s[A_{−t}]` with `A_0 = ρ0`, cross-checked against
/// [`quantumness_direct`].
pub fn quantumness_via_dual(m: &JointModel, rho0: &QuantumState, t: f64) -> Result<f64> {
    m.check_system_state(rho0)?;
    let value = dual_map_apply(m, rho0.matrix(), -t)?.trace().re;
    let direct = quantumness_direct(m, rho0, t)?;
    let difference = (value - direct).abs();
    if difference > 1e-8 {
        return Err(Error::RouteDisagreement { difference });
    }
    bound_checked(value, m.dim_s())
}

/// Traces of the classical and quantum terms of the split
/// `ρ_t = Tr_e[(e^{−iHt}ρ0e^{iHt})σ0] + Tr_e[(e^{−iHt}ρ0e^{iHt})Δσ_t]`.
pub fn split_contributions(m: &JointModel, rho0: &QuantumState, t: f64) -> Result<(f64, f64)> {
    m.check_system_state(rho0)?;
    let u = m.propagator(t)?;
    let evolved = &u * m.embed_system(rho0.matrix()) * u.adjoint();
    let sigma = m.embedded_sigma0();
    let delta = &u * &sigma * u.adjoint() - &sigma;
    let classical = trace_product(&evolved, &sigma).re;
    let quantum = trace_product(&evolved, &delta).re;
    let residual = (classical + quantum - 1.0).abs();
    if residual > Tolerances::default().validity {
        return Err(Error::Numerical(format!(
            "split does not sum to 1 (off by {residual:e})"
        )));
    }
    Ok((classical, quantum))
}

/// `n`-th time derivative of `Q_t` from nested commutators of `H` with `σ0`:
/// `dⁿQ/dtⁿ = iⁿ Tr_se[(e^{−iHt}ρ0e^{iHt}) ad_Hⁿ(σ0)]`.
pub fn q_derivative(m: &JointModel, rho0: &QuantumState, t: f64, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "derivative order must be at least 1".into(),
        ));
    }
    m.check_system_state(rho0)?;
    let h = joint_hamiltonian(m);
    let mut nested = m.embedded_sigma0();
    for _ in 0..n {
        nested = commutator(&h, &nested);
    }
    let u = m.propagator(t)?;
    let evolved = &u * m.embed_system(rho0.matrix()) * u.adjoint();
    let phase = I.powu(n);
    Ok((phase * trace_product(&evolved, &nested)).re)
}

/// Weighted system Hamiltonians `(p_e, H_s + ⟨e|H_e + H_I|e⟩)` over an
/// eigenbasis of `σ0` in which `H` is block diagonal.
pub fn hamiltonian_ensemble_reduction(m: &JointModel) -> Result<Vec<(f64, ComplexMatrix)>> {
    let tol = Tolerances::default().validity;
    let h = joint_hamiltonian(m);
    let norm = max_abs(&commutator(&h, &m.embedded_sigma0()));
    if norm > tol {
        return Err(Error::NonCommuting { norm });
    }
    let (ds, de) = (m.dim_s(), m.dim_e());
    let spec = m.sigma0.spectrum();
    let block = |v: &DVector<C64>, w: &DVector<C64>| -> ComplexMatrix {
        let proj_v = identity(ds).kronecker(v);
        let proj_w = identity(ds).kronecker(w);
        proj_v.adjoint() * &h * proj_w
    };

    // Degenerate eigenspaces of σ0 leave the basis free; pick the one that
    // diagonalizes a generic combination of the environment-side blocks.
    let mut basis: Vec<DVector<C64>> = Vec::with_capacity(de);
    let mut weights: Vec<f64> = Vec::with_capacity(de);
    let mut start = 0;
    while start < de {
        let mut end = start + 1;
        while end < de && (spec.eigenvalues[end] - spec.eigenvalues[start]).abs() < 1e-9 {
            end += 1;
        }
        let vectors: Vec<DVector<C64>> = (start..end).map(|j| spec.eigenvector(j)).collect();
        if vectors.len() == 1 {
            basis.push(vectors[0].clone());
        } else {
            let k = vectors.len();
            let mut e = ComplexMatrix::zeros(de, k);
            for (j, v) in vectors.iter().enumerate() {
                e.set_column(j, v);
            }
            let env_h = identity(ds).kronecker(&e);
            let restricted = env_h.adjoint() * &h * &env_h;
            let mut generic = zeros(k);
            let mut idx = 0usize;
            for i in 0..ds {
                for j in 0..ds {
                    let b = restricted.view((i * k, j * k), (k, k)).into_owned();
                    let herm = (&b + b.adjoint()).map(|z| z * 0.5);
                    let anti = (&b - b.adjoint()).map(|z| z * c(0.0, -0.5));
                    let w1 = 1.0 / (1.0 + 0.618_033_988_749_895 * idx as f64);
                    let w2 = 1.0 / (2.0 + 0.414_213_562_373_095 * idx as f64);
                    generic += herm.map(|z| z * w1) + anti.map(|z| z * w2);
                    idx += 1;
                }
            }
            let local = hermitian_eigensystem_tol(&generic, 1e-8)?;
            let rotated = &e * &local.eigenvectors;
            for j in 0..k {
                basis.push(rotated.column(j).into_owned());
            }
        }
        for j in start..end {
            weights.push(spec.eigenvalues[j].max(0.0));
        }
        start = end;
    }

    let mut residual = 0.0f64;
    for (a, va) in basis.iter().enumerate() {
        for (b, vb) in basis.iter().enumerate() {
            if a != b {
                residual = residual.max(max_abs(&block(va, vb)));
            }
        }
    }
    if residual > 1e-9 {
        return Err(Error::Numerical(format!(
            "no common eigenbasis of sigma0 block-diagonalizes H (residual {residual:e})"
        )));
    }
    let total: f64 = weights.iter().sum();
    Ok(basis
        .iter()
        .zip(weights)
        .map(|(v, p)| {
            let hs = block(v, v);
            (p / total, (&hs + hs.adjoint()).map(|z| z * 0.5))
        })
        .collect())
}

/// Bosonic annihilation operator truncated to `cutoff` levels.
pub fn annihilation(cutoff: usize) -> ComplexMatrix {
    let mut a = zeros(cutoff);
    for n in 1..cutoff {
        a[(n - 1, n)] = c((n as f64).sqrt(), 0.0);
    }
    a
}

/// Resonant two-level system coupled to one boson mode (vacuum),
/// `H = ω σz/2 + ω a†a + g(σ†a + σa†)`.
pub fn jaynes_cummings(omega: f64, g: f64, cutoff: usize) -> Result<JointModel> {
    let a = annihilation(cutoff);
    let number = a.adjoint() * &a;
    let h_s = pauli::sigma_z().map(|z| z * (omega / 2.0));
    let h_e = number.map(|z| z * omega);
    let h_i =
        (pauli::raising().kronecker(&a) + pauli::lowering().kronecker(&a.adjoint())).map(|z| z * g);
    let mut vac = zeros(cutoff);
    vac[(0, 0)] = c(1.0, 0.0);
    JointModel::new(h_s, h_e, h_i, QuantumState::new(vac)?)
}

/// Qubit coupled through `σx ⊗ (a + a†)` to independent truncated modes with
/// thermal occupations `n_k`.
pub fn boson_bath(omega_s: f64, modes: &[(f64, f64, f64)], cutoff: usize) -> Result<JointModel> {
    let a = annihilation(cutoff);
    let number = a.adjoint() * &a;
    let x = &a + a.adjoint();
    let de = cutoff.pow(modes.len() as u32);
    let mut h_e = zeros(de);
    let mut h_i = zeros(2 * de);
    let mut sigma = identity(1);
    for (k, &(freq, coupling, n_th)) in modes.iter().enumerate() {
        let before = cutoff.pow(k as u32);
        let after = cutoff.pow((modes.len() - k - 1) as u32);
        let embed = |op: &ComplexMatrix| identity(before).kronecker(op).kronecker(&identity(after));
        h_e += embed(&number).map(|z| z * freq);
        h_i += pauli::sigma_x().kronecker(&embed(&x)).map(|z| z * coupling);
        let ratio = if n_th > 0.0 { n_th / (1.0 + n_th) } else { 0.0 };
        let mut thermal = zeros(cutoff);
        for n in 0..cutoff {
            thermal[(n, n)] = c(ratio.powi(n as i32), 0.0);
        }
        let tr = thermal.trace();
        sigma = sigma.kronecker(&thermal.map(|z| z / tr));
    }
    let h_s = pauli::sigma_z().map(|z| z * (omega_s / 2.0));
    JointModel::new(h_s, h_e, h_i, QuantumState::new(sigma)?)
}

/// Qubit coupled to `couplings.len()` bath spins via `Σ g_k σ⊗σ_k† + h.c.`
/// with each bath spin in the Bloch state `(0, 0, polarization)`.
pub fn spin_bath(omega_s: f64, couplings: &[f64], polarization: f64) -> Result<JointModel> {
    let n = couplings.len();
    let de = 1usize << n;
    let embed = |k: usize, op: &ComplexMatrix| {
        identity(1 << k)
            .kronecker(op)
            .kronecker(&identity(1 << (n - k - 1)))
    };
    let mut h_e = zeros(de);
    let mut h_i = zeros(2 * de);
    let mut sigma = identity(1);
    let bath_state = QuantumState::from_bloch_vector(0.0, 0.0, polarization)?;
    for (k, &g) in couplings.iter().enumerate() {
        h_e += embed(k, &pauli::sigma_z()).map(|z| z * (omega_s / 2.0));
        let flip = pauli::raising().kronecker(&embed(k, &pauli::lowering()));
        h_i += (&flip + flip.adjoint()).map(|z| z * g);
        sigma = sigma.kronecker(bath_state.matrix());
    }
    let h_s = pauli::sigma_z().map(|z| z * (omega_s / 2.0));
    JointModel::new(h_s, h_e, h_i, QuantumState::new(sigma)?)
}

/// Eigenvalues of the joint Hamiltonian.
pub fn joint_spectrum(m: &JointModel) -> Result<Vec<f64>> {
    Ok(hermitian_eigensystem(&joint_hamiltonian(m))?.eigenvalues)
}
