//! Charge-basis transmon diagonalization.
//!
//! The transmon Hamiltonian 4 E_C n̂² − E_J cos φ̂ is diagonalized in the
//! charge basis n ∈ [−N, N], where it is the real symmetric tridiagonal
//! matrix with diagonal 4 E_C n² and off-diagonal −E_J/2. All frequencies
//! are linear (MHz, the value/2π convention); nothing here is angular.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{LindbladError, Result};

/// Device and truncation parameters for the full model. Frequencies are
/// linear MHz (value/2π); `kappa` is the cavity linewidth in the same
/// convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmonParams {
    pub ej: f64,
    pub ec: f64,
    pub g: f64,
    pub omega_r: f64,
    pub kappa: f64,
    pub n_transmon_levels: usize,
    pub fock_cutoff: usize,
    pub charge_cutoff: usize,
}

impl TransmonParams {
    /// Panel-style defaults with the cutoffs left to the caller.
    pub fn new(
        ej: f64,
        ec: f64,
        g: f64,
        omega_r: f64,
        kappa: f64,
        n_transmon_levels: usize,
        fock_cutoff: usize,
        charge_cutoff: usize,
    ) -> Self {
        Self {
            ej,
            ec,
            g,
            omega_r,
            kappa,
            n_transmon_levels,
            fock_cutoff,
            charge_cutoff,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("ej", self.ej),
            ("ec", self.ec),
            ("omega_r", self.omega_r),
            ("kappa", self.kappa),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(LindbladError::domain(
                    name,
                    format!("must be positive and finite, got {v}"),
                ));
            }
        }
        if !self.g.is_finite() {
            return Err(LindbladError::domain(
                "g",
                format!("must be finite, got {}", self.g),
            ));
        }
        if self.n_transmon_levels < 3 {
            return Err(LindbladError::domain(
                "n_transmon_levels",
                format!("need at least 3 levels, got {}", self.n_transmon_levels),
            ));
        }
        if self.fock_cutoff < 4 {
            return Err(LindbladError::domain(
                "fock_cutoff",
                format!("need at least 4 Fock levels, got {}", self.fock_cutoff),
            ));
        }
        if self.charge_cutoff < 20 {
            return Err(LindbladError::domain(
                "charge_cutoff",
                format!("need a charge cutoff of at least 20, got {}", self.charge_cutoff),
            ));
        }
        if 2 * self.charge_cutoff + 1 <= self.n_transmon_levels {
            return Err(LindbladError::domain(
                "charge_cutoff",
                "charge basis smaller than the number of requested levels".to_string(),
            ));
        }
        Ok(())
    }

    /// True when E_J/E_C is large enough for the charge dispersion of the
    /// kept levels to be negligible. Outside this regime results are still
    /// computed; callers may want to surface the flag.
    pub fn in_transmon_regime(&self) -> bool {
        self.ej / self.ec >= 20.0
    }

    /// Hilbert-space dimension of the product space.
    pub fn dim(&self) -> usize {
        self.n_transmon_levels * self.fock_cutoff
    }
}

/// Lowest eigenpairs of the transmon plus the charge operator in that
/// eigenbasis.
#[derive(Debug, Clone)]
pub struct TransmonEigs {
    /// Eigenvalues in MHz, ascending, ground state subtracted off.
    pub energies: Vec<f64>,
    /// ⟨j|n̂|k⟩ for the kept levels; real because the eigenvectors are real.
    pub charge: DMatrix<f64>,
    /// n̂ after rephasing level j by i^j, divided by i: a real antisymmetric
    /// matrix m with n̂ = i·m in the rephased basis. The rephasing is what
    /// lets the coupled Hamiltonian stay real once the cavity quadrature is
    /// rotated the same way.
    pub charge_antisym: DMatrix<f64>,
}

impl TransmonEigs {
    /// (E₂ − E₁) − (E₁ − E₀), the transmon anharmonicity (≈ −E_C deep in
    /// the transmon regime).
    pub fn anharmonicity(&self) -> f64 {
        (self.energies[2] - self.energies[1]) - (self.energies[1] - self.energies[0])
    }
}

/// Diagonalizes 4 E_C n̂² − E_J cos φ̂ in the charge basis and returns the
/// lowest `n_levels` eigenpairs with deterministic vector signs, plus the
/// charge operator in the eigenbasis.
pub fn diagonalize_transmon(
    ec: f64,
    ej: f64,
    charge_cutoff: usize,
    n_levels: usize,
) -> Result<TransmonEigs> {
    if !(ec > 0.0 && ej > 0.0) {
        return Err(LindbladError::domain(
            "ej",
            format!("E_J and E_C must be positive, got ej = {ej}, ec = {ec}"),
        ));
    }
    let dim = 2 * charge_cutoff + 1;
    if n_levels == 0 || n_levels > dim {
        return Err(LindbladError::domain(
            "n_transmon_levels",
            format!("need 1..={dim} levels, got {n_levels}"),
        ));
    }
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for idx in 0..dim {
        let n = idx as f64 - charge_cutoff as f64;
        h[(idx, idx)] = 4.0 * ec * n * n;
        if idx + 1 < dim {
            h[(idx, idx + 1)] = -ej / 2.0;
            h[(idx + 1, idx)] = -ej / 2.0;
        }
    }
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    // Kept eigenvectors with a deterministic sign: largest-magnitude
    // component positive.
    let mut vecs = DMatrix::<f64>::zeros(dim, n_levels);
    let mut energies = Vec::with_capacity(n_levels);
    for (j, &col) in order.iter().take(n_levels).enumerate() {
        let v = eig.eigenvectors.column(col);
        let mut pivot = 0;
        for r in 0..dim {
            if v[r].abs() > v[pivot].abs() {
                pivot = r;
            }
        }
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        for r in 0..dim {
            vecs[(r, j)] = sign * v[r];
        }
        energies.push(eig.eigenvalues[order[j]]);
    }
    let e0 = energies[0];
    for e in &mut energies {
        *e -= e0;
    }

    // Charge operator in the eigenbasis: sum over the diagonal charge basis.
    let mut charge = DMatrix::<f64>::zeros(n_levels, n_levels);
    for j in 0..n_levels {
        for k in 0..n_levels {
            let mut s = 0.0;
            for idx in 0..dim {
                let n = idx as f64 - charge_cutoff as f64;
                s += vecs[(idx, j)] * n * vecs[(idx, k)];
            }
            charge[(j, k)] = s;
        }
    }

    // The eigenstates alternate parity (n -> -n), so the charge operator only
    // connects levels of opposite parity: entries with even j - k vanish up
    // to solver rounding. Rephasing level j by i^j turns n̂ into i times the
    // real antisymmetric matrix built here.
    let scale = charge.amax();
    let mut anti = DMatrix::<f64>::zeros(n_levels, n_levels);
    for j in 0..n_levels {
        for k in 0..n_levels {
            let d = j as isize - k as isize;
            if d.rem_euclid(2) == 0 {
                if j != k && charge[(j, k)].abs() > 1e-8 * scale {
                    return Err(LindbladError::LabelingError(format!(
                        "charge operator violates parity selection between levels {j} and {k} \
                         (element {:.3e}); eigenvectors are unreliable",
                        charge[(j, k)]
                    )));
                }
            } else {
                // i^{j-k} = ±i for odd differences; divide by i.
                let s = if d.rem_euclid(4) == 1 { 1.0 } else { -1.0 };
                anti[(j, k)] = s * charge[(j, k)];
            }
        }
    }

    Ok(TransmonEigs {
        energies,
        charge,
        charge_antisym: anti,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn validation_rejects_bad_cutoffs() {
        let mut p = TransmonParams::new(16930.0, 200.4, 159.1, 7655.0, 10.1, 6, 25, 40);
        assert!(p.validate().is_ok());
        p.n_transmon_levels = 2;
        assert!(matches!(
            p.validate(),
            Err(LindbladError::DomainError { field: "n_transmon_levels", .. })
        ));
        p.n_transmon_levels = 6;
        p.charge_cutoff = 10;
        assert!(p.validate().is_err());
    }

    #[test]
    fn transmon_regime_flag() {
        let p = TransmonParams::new(16930.0, 200.4, 159.1, 7655.0, 10.1, 6, 25, 40);
        assert!(p.in_transmon_regime());
        let p = TransmonParams::new(1000.0, 200.4, 159.1, 7655.0, 10.1, 6, 25, 40);
        assert!(!p.in_transmon_regime());
    }

    #[test]
    fn deep_transmon_level_spacing() {
        // E1 - E0 ~ sqrt(8 EJ EC) - EC within 2% deep in the regime.
        let (ej, ec) = (50000.0, 250.0);
        let t = diagonalize_transmon(ec, ej, 60, 4).unwrap();
        let want = (8.0 * ej * ec).sqrt() - ec;
        let got = t.energies[1] - t.energies[0];
        assert!(((got - want) / want).abs() < 0.02, "{got} vs {want}");
    }

    #[test]
    fn reference_device_anharmonicity() {
        // For EJ = 16.93 GHz, EC = 200.4 MHz the exact anharmonicity is a
        // little over 10% away from the leading-order -EC estimate.
        let t = diagonalize_transmon(200.4, 16930.0, 40, 6).unwrap();
        let a = t.anharmonicity();
        assert!(
            (a + 200.4).abs() / 200.4 < 0.12,
            "anharmonicity {a} too far from -EC"
        );
        assert!(a < 0.0);
    }

    #[test]
    fn spectrum_invariant_under_cutoff_doubling() {
        let a = diagonalize_transmon(200.4, 16930.0, 30, 6).unwrap();
        let b = diagonalize_transmon(200.4, 16930.0, 60, 6).unwrap();
        for j in 1..6 {
            let rel = (a.energies[j] - b.energies[j]).abs() / b.energies[j];
            assert!(rel < 1e-10, "level {j}: {rel:e}");
        }
    }

    #[test]
    fn charge_operator_structure() {
        let t = diagonalize_transmon(200.4, 16930.0, 40, 6).unwrap();
        // Parity selection: even-difference elements vanish.
        for j in 0..6 {
            for k in 0..6 {
                if (j as isize - k as isize).rem_euclid(2) == 0 {
                    assert!(t.charge[(j, k)].abs() < 1e-9 * t.charge.amax());
                }
            }
        }
        // Antisymmetric form really is antisymmetric and matches |n̂|.
        for j in 0..6 {
            for k in 0..6 {
                assert_abs_diff_eq!(
                    t.charge_antisym[(j, k)],
                    -t.charge_antisym[(k, j)],
                    epsilon = 1e-12
                );
                assert_abs_diff_eq!(
                    t.charge_antisym[(j, k)].abs(),
                    t.charge[(j, k)].abs(),
                    epsilon = 1e-12
                );
            }
        }
        // Nearest-neighbor charge elements approach the harmonic value
        // (EJ/(32 EC))^{1/4} sqrt(j+1) deep in the transmon regime.
        let scale = (16930.0f64 / (32.0 * 200.4)).powf(0.25);
        assert!((t.charge[(0, 1)].abs() - scale).abs() / scale < 0.05);
    }

    #[test]
    fn sign_convention_is_deterministic() {
        let a = diagonalize_transmon(200.4, 16930.0, 40, 6).unwrap();
        let b = diagonalize_transmon(200.4, 16930.0, 40, 6).unwrap();
        assert_eq!(a.charge, b.charge);
    }
}
