//! Unitaries realizing Sp(d) elements by conjugation, and the induced action
//! on GBS sets.
//!
//! For `M = [[α, β], [γ, δ]]` we fix the phases of `X' ∝ X^α Z^γ` and
//! `Z' ∝ X^β Z^δ` so that `X'^d = Z'^d = 1`. Then `Z'X' = ω X'Z'`, so if
//! `ψ_0` is an eigenvector of `Z'` with eigenvalue `ω^{k0}`, the vectors
//! `ψ_k = X'^k ψ_0` have eigenvalues `ω^{k0 + k}` and
//! `U = Σ_k |ψ_{k - k0}⟩⟨k|` satisfies `U X U† = X'`, `U Z U† = Z'`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::criterion::FWitness;
use crate::weyl::{root_of_unity, DenseMatrix, GbsSet, StateVector, WeylOp, C64};
use crate::zmod::{ext_gcd, gcd, same_modulus, AffineAction, SpMatrix};
use crate::{Error, Result};

pub const CLIFFORD_TOL: f64 = 1e-9;

/// `s · W` with the unimodular scalar `s` of smallest non-negative angle such
/// that `(s W)^d = 1`.
pub fn phase_fixed_matrix(w: &WeylOp) -> DenseMatrix {
    let d = w.modulus();
    let power = w.pow(d);
    debug_assert_eq!(power.indices(), (0, 0));
    // (W)^d = ω^e, so s^d must be ω^{-e}; the smallest angle is 2π((-e) mod d)/d².
    let e = power.phase_exp().value();
    let k = (d - e) % d;
    let s = C64::from_polar(1.0, TAU * k as f64 / (d as f64 * d as f64));
    w.matrix() * s
}

/// An eigenvector of an operator `A` with `A^d = 1`, from the spectral
/// projectors `P_k = (1/d) Σ_j ω^{-jk} A^j`. Eigenphases are scanned in
/// increasing angle; the first nonzero projector wins and its largest column
/// (first on ties) is normalized. Returns `(k, vector)` with eigenvalue `ω^k`.
pub fn first_eigenvector(a: &DenseMatrix, d: u32) -> Result<(u32, StateVector)> {
    let dim = a.nrows();
    let mut powers = Vec::with_capacity(d as usize);
    let mut acc = DenseMatrix::identity(dim, dim);
    for _ in 0..d {
        powers.push(acc.clone());
        acc = &acc * a;
    }
    if (&acc - DenseMatrix::identity(dim, dim)).norm() > 1e-8 {
        return Err(Error::Numeric("operator does not satisfy A^d = 1".into()));
    }
    for k in 0..d {
        let mut proj = DenseMatrix::zeros(dim, dim);
        for (j, p) in powers.iter().enumerate() {
            proj += p * root_of_unity(-(j as i64) * k as i64, d);
        }
        proj /= C64::new(d as f64, 0.0);
        let (best, norm) = (0..dim)
            .map(|c| (c, proj.column(c).norm()))
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 + 1e-12 { x } else { acc });
        if norm > 1e-6 {
            let v = proj.column(best) / C64::new(norm, 0.0);
            return Ok((k, v.into_owned()));
        }
    }
    Err(Error::Numeric("no eigenvector found".into()))
}

#[derive(Debug, Clone)]
pub struct CliffordUnitary {
    pub sp: SpMatrix,
    pub matrix: DenseMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CliffordCheck {
    pub ok: bool,
    /// `‖U X U† − λ₁ X^α Z^γ‖` and `‖U Z U† − λ₂ X^β Z^δ‖` (Frobenius).
    pub residuals: [f64; 2],
    /// `‖U† U − 1‖`, reported separately.
    pub unitarity: f64,
}

pub fn build_unitary(sp: &SpMatrix) -> Result<CliffordUnitary> {
    let d = sp.modulus();
    let [alpha, beta, gamma, delta] = sp.entries().map(i64::from);
    let x_img = phase_fixed_matrix(&WeylOp::gbs(alpha, gamma, d)?);
    let z_img = phase_fixed_matrix(&WeylOp::gbs(beta, delta, d)?);

    let (k0, psi0) = first_eigenvector(&z_img, d)?;
    let dim = d as usize;
    let mut u = DenseMatrix::zeros(dim, dim);
    let mut psi = psi0;
    // column k holds ψ_{k-k0} = X'^{k-k0} ψ_0
    for step in 0..dim {
        let col = (step + k0 as usize) % dim;
        u.set_column(col, &psi);
        psi = &x_img * psi;
    }
    let out = CliffordUnitary { sp: *sp, matrix: u };
    let check = verify_clifford(&out);
    if !check.ok || check.unitarity > CLIFFORD_TOL {
        return Err(Error::Numeric(format!(
            "synthesized unitary failed verification: residuals {:?}, unitarity {}",
            check.residuals, check.unitarity
        )));
    }
    Ok(out)
}

/// Residual of `actual ≈ λ target` for the best unimodular `λ`.
fn unimodular_fit_residual(actual: &DenseMatrix, target: &DenseMatrix) -> f64 {
    let overlap = (target.adjoint() * actual).trace();
    if overlap.norm() < 1e-12 {
        return actual.norm() + target.norm();
    }
    let lambda = overlap / overlap.norm();
    (actual - target * lambda).norm()
}

/// Checks `U X U† ∝ X^α Z^γ` and `U Z U† ∝ X^β Z^δ` for an arbitrary matrix.
pub fn conjugation_check(sp: &SpMatrix, u: &DenseMatrix) -> CliffordCheck {
    let d = sp.modulus();
    let [alpha, beta, gamma, delta] = sp.entries().map(i64::from);
    let x = WeylOp::gbs(1, 0, d).expect("valid").matrix();
    let z = WeylOp::gbs(0, 1, d).expect("valid").matrix();
    let ud = u.adjoint();
    let r1 = unimodular_fit_residual(&(u * &x * &ud), &WeylOp::gbs(alpha, gamma, d).expect("valid").matrix());
    let r2 = unimodular_fit_residual(&(u * &z * &ud), &WeylOp::gbs(beta, delta, d).expect("valid").matrix());
    let dim = d as usize;
    let unitarity = (&ud * u - DenseMatrix::identity(dim, dim)).norm();
    CliffordCheck { ok: r1 < CLIFFORD_TOL && r2 < CLIFFORD_TOL, residuals: [r1, r2], unitarity }
}

pub fn verify_clifford(u: &CliffordUnitary) -> CliffordCheck {
    conjugation_check(&u.sp, &u.matrix)
}

/// JSON form: `{"d", "sp": [[α,β],[γ,δ]], "re": [[..]], "im": [[..]]}`, rows first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitaryJson {
    #[serde(flatten)]
    pub sp: SpMatrix,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&CliffordUnitary> for UnitaryJson {
    fn from(u: &CliffordUnitary) -> Self {
        let rows = |f: fn(&C64) -> f64| {
            u.matrix.row_iter().map(|r| r.iter().map(f).collect()).collect()
        };
        UnitaryJson { sp: u.sp, re: rows(|c| c.re), im: rows(|c| c.im) }
    }
}

impl TryFrom<UnitaryJson> for CliffordUnitary {
    type Error = Error;

    fn try_from(j: UnitaryJson) -> Result<Self> {
        let dim = j.sp.modulus() as usize;
        let square = |m: &Vec<Vec<f64>>| m.len() == dim && m.iter().all(|r| r.len() == dim);
        if !square(&j.re) || !square(&j.im) {
            return Err(Error::domain(format!("unitary entries must be {dim}x{dim}")));
        }
        let matrix = DenseMatrix::from_fn(dim, dim, |r, c| C64::new(j.re[r][c], j.im[r][c]));
        Ok(CliffordUnitary { sp: j.sp, matrix })
    }
}

pub fn transform_set(s: &GbsSet, a: &AffineAction) -> Result<GbsSet> {
    same_modulus(s.dimension(), a.modulus())?;
    let pairs = s.pairs().iter().map(|&(m, n)| a.apply_raw(m, n)).collect();
    GbsSet::from_reduced(s.dimension(), pairs)
}

/// Completes a witness row `(α, β)` to an Sp(d) matrix with that first row,
/// after dividing out `c = gcd(α, β)`; the reduced row still separates the set.
pub fn complete_witness(w: FWitness, d: u32) -> Result<SpMatrix> {
    let (a1, b1) = (w.alpha % d, w.beta % d);
    let (a2, b2) = match gcd(a1 as u64, b1 as u64) {
        0 => (1, 0),
        c => ((a1 as u64 / c) as i64, (b1 as u64 / c) as i64),
    };
    // a2 x + b2 y = 1  =>  det [[a2, b2], [-y, x]] = 1
    let (g, x, y) = ext_gcd(a2, b2);
    debug_assert_eq!(g, 1);
    SpMatrix::new(a2, b2, -y, x, d)
}

/// The shift-free action taking a witnessed set to an F-type set.
pub fn witness_action(w: FWitness, d: u32) -> Result<AffineAction> {
    Ok(AffineAction::linear(complete_witness(w, d)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criterion::{f_equivalence_witness, is_f_type};
    use crate::census::enumerate_subsets;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sp(d: u32, rng: &mut ChaCha8Rng) -> SpMatrix {
        loop {
            let e: Vec<i64> = (0..4).map(|_| rng.random_range(0..d as i64)).collect();
            if let Ok(m) = SpMatrix::new(e[0], e[1], e[2], e[3], d) {
                return m;
            }
        }
    }

    #[test]
    fn phase_fixing_gives_dth_root_of_identity() {
        for d in 2..=8u32 {
            for m in 0..d as i64 {
                for n in 0..d as i64 {
                    let a = phase_fixed_matrix(&WeylOp::gbs(m, n, d).unwrap());
                    let id = DenseMatrix::identity(d as usize, d as usize);
                    assert!((a.pow(d) - id).norm() < 1e-10, "d={d} m={m} n={n}");
                }
            }
        }
        // XZ at d = 2 squares to -1, so it needs the factor i
        let a = phase_fixed_matrix(&WeylOp::gbs(1, 1, 2).unwrap());
        let raw = WeylOp::gbs(1, 1, 2).unwrap().matrix();
        assert!((a - raw * C64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn identity_element() {
        let u = build_unitary(&SpMatrix::identity(4).unwrap()).unwrap();
        let check = verify_clifford(&u);
        assert!(check.ok);
        // commutes with X and Z, so proportional to the identity
        let m = &u.matrix;
        let scale = m[(0, 0)];
        assert!((scale.norm() - 1.0).abs() < 1e-9);
        assert!((m - DenseMatrix::identity(4, 4) * scale).norm() < 1e-9);
    }

    #[test]
    fn fourier_type_element_d3() {
        let sp = SpMatrix::new(0, -1, 1, 0, 3).unwrap();
        assert_eq!(sp.entries(), [0, 2, 1, 0]);
        let u = build_unitary(&sp).unwrap();
        let check = verify_clifford(&u);
        assert!(check.ok, "{check:?}");
        let x = WeylOp::gbs(1, 0, 3).unwrap().matrix();
        let z = WeylOp::gbs(0, 1, 3).unwrap().matrix();
        let ud = u.matrix.adjoint();
        // X -> Z exactly, Z -> X^{-1} exactly under the fixed phase convention
        assert!((&u.matrix * &x * &ud - &z).norm() < 1e-9);
        assert!((&u.matrix * &z * &ud - x.adjoint()).norm() < 1e-9);
    }

    #[test]
    fn verify_clifford_rejects_mismatches() {
        let x = WeylOp::gbs(1, 0, 3).unwrap().matrix();
        let c = conjugation_check(&SpMatrix::identity(3).unwrap(), &x);
        assert!(c.ok);
        let s = 1.0 / 2f64.sqrt();
        let h = DenseMatrix::from_row_slice(
            2,
            2,
            &[C64::new(s, 0.), C64::new(s, 0.), C64::new(s, 0.), C64::new(-s, 0.)],
        );
        let c = conjugation_check(&SpMatrix::identity(2).unwrap(), &h);
        assert!(!c.ok);
        assert!(c.unitarity < 1e-12);
        let c = conjugation_check(&SpMatrix::new(0, 1, 1, 0, 2).unwrap(), &h);
        assert!(c.ok);
    }

    #[test]
    fn random_elements_verify() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in [2u32, 3, 4, 5, 7] {
            for _ in 0..100 {
                let sp = random_sp(d, &mut rng);
                let u = build_unitary(&sp).unwrap();
                let c = verify_clifford(&u);
                assert!(c.ok && c.unitarity < CLIFFORD_TOL, "d={d} sp={sp} {c:?}");
            }
        }
    }

    #[test]
    fn composition_is_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for d in [2u32, 3, 4, 5, 6] {
            for _ in 0..30 {
                let a = random_sp(d, &mut rng);
                let b = random_sp(d, &mut rng);
                let prod = build_unitary(&a).unwrap().matrix * build_unitary(&b).unwrap().matrix;
                assert!(conjugation_check(&a.compose(&b).unwrap(), &prod).ok);
            }
        }
    }

    #[test]
    fn transform_examples() {
        let s = GbsSet::new(4, [(0, 0), (0, 2), (2, 0), (2, 2)]).unwrap();
        assert_eq!(transform_set(&s, &AffineAction::identity(4).unwrap()).unwrap(), s);
        for m in SpMatrix::enumerate(4).unwrap() {
            assert_eq!(transform_set(&s, &AffineAction::linear(m)).unwrap(), s);
        }
        assert!(transform_set(&s, &AffineAction::identity(3).unwrap()).is_err());
    }

    #[test]
    fn witness_completion_maps_to_f_type() {
        for d in [3u32, 4, 5, 6] {
            for s in enumerate_subsets(d, d.min(4) as usize, u64::MAX).unwrap() {
                if let Some(w) = f_equivalence_witness(&s) {
                    let act = witness_action(w, d).unwrap();
                    let t = transform_set(&s, &act).unwrap();
                    assert!(is_f_type(&t), "{s} via {w:?} -> {t}");
                    assert_eq!(t.len(), s.len());
                }
            }
        }
    }

    #[test]
    fn witness_completion_handles_common_factor() {
        let m = complete_witness(FWitness { alpha: 2, beta: 4 }, 6).unwrap();
        assert_eq!(&m.entries()[..2], &[1, 2]);
        let m = complete_witness(FWitness { alpha: 0, beta: 3 }, 5).unwrap();
        assert_eq!(&m.entries()[..2], &[0, 1]);
        let m = complete_witness(FWitness { alpha: 0, beta: 0 }, 5).unwrap();
        assert_eq!(&m.entries()[..2], &[1, 0]);
    }

    #[test]
    fn local_unitary_realizes_the_set_transform() {
        // (U ⊗ V)|X^m Z^n⟩ ∝ |X^{m'} Z^{n'}⟩ with V = conj(U) for the linear part
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for d in [2u32, 3, 4, 5] {
            for _ in 0..10 {
                let sp = random_sp(d, &mut rng);
                let u = build_unitary(&sp).unwrap().matrix;
                let v_t = u.adjoint();
                for m in 0..d {
                    for n in 0..d {
                        let w = WeylOp::gbs(m as i64, n as i64, d).unwrap().matrix();
                        let image = &u * w * &v_t;
                        let (m2, n2) = AffineAction::linear(sp).apply_raw(m, n);
                        let target = WeylOp::gbs(m2 as i64, n2 as i64, d).unwrap().matrix();
                        assert!(unimodular_fit_residual(&image, &target) < 1e-9);
                    }
                }
            }
        }
    }
}
