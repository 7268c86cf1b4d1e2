//! Dressed spectrum of the transmon-cavity product space and the
//! number-resolved dispersive shifts extracted from it.
//!
//! The product basis is (transmon eigenlevel j) ⊗ (Fock n), with level j
//! rephased by i^j and the cavity quadrature rotated by e^{iπ/2 a†a}. In
//! that gauge the coupled Hamiltonian
//!
//!   H = Σ_j ε_j |j⟩⟨j| + ω_r a†a − g n̂ (a† + a)
//!
//! becomes the real symmetric matrix diag(ε) ⊗ I + I ⊗ ω_r n̂_F +
//! g m ⊗ (a† − a), where m is the real antisymmetric charge matrix from
//! [`crate::transmon::TransmonEigs`]. Spectra and overlaps are gauge
//! invariant, so labels and shifts computed here apply to the lab frame
//! unchanged. Everything is in linear MHz.

use nalgebra::DMatrix;

use crate::error::{LindbladError, Result};
use crate::transmon::{diagonalize_transmon, TransmonEigs, TransmonParams};

/// Eigenstructure of the coupled system with max-overlap labels.
#[derive(Debug, Clone)]
pub struct DressedSpectrum {
    pub params: TransmonParams,
    pub transmon: TransmonEigs,
    /// All dressed eigenvalues, ascending, ground state subtracted (MHz).
    pub levels: Vec<f64>,
    /// Eigenvectors as columns, same order as `levels`, in the gauge basis.
    pub states: DMatrix<f64>,
    /// Column index of the dressed state labeled (branch i, photons n);
    /// n runs up to `max_labeled_fock()`.
    pub col_of: Vec<Vec<usize>>,
    /// E(i, n) = levels[col_of[i][n]].
    pub energies: Vec<Vec<f64>>,
    /// Dressed transmon energies ε̃_i = E(i, 0).
    pub eps_tilde: Vec<f64>,
    /// Dressed cavity frequency: the g/e average of the first Fock spacing.
    pub omega_r_tilde: f64,
    /// Number-resolved shifts: E(i, n) = ε̃_i + (ω̃_r + χ[i][n]) n holds
    /// exactly for n ≥ 1, and χ[i][0] is padded with χ[i][1].
    pub chi: Vec<Vec<f64>>,
}

impl DressedSpectrum {
    /// Largest photon number the labeling covers. The top two Fock levels
    /// are distorted by the truncation and are never labeled.
    pub fn max_labeled_fock(&self) -> usize {
        self.params.fock_cutoff - 3
    }

    /// Branch-resolved shift difference χ_{n} = χ_{e,n} − χ_{g,n}.
    pub fn chi_diff(&self, n: usize) -> f64 {
        self.chi[1][n] - self.chi[0][n]
    }
}

/// Static coupled Hamiltonian in the gauge product basis, linear MHz.
/// Row index is j * fock_cutoff + n.
pub(crate) fn static_hamiltonian(eigs: &TransmonEigs, params: &TransmonParams) -> DMatrix<f64> {
    let nl = params.n_transmon_levels;
    let f = params.fock_cutoff;
    let dim = nl * f;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for j in 0..nl {
        for n in 0..f {
            let r = j * f + n;
            h[(r, r)] = eigs.energies[j] + params.omega_r * n as f64;
        }
    }
    // g m ⊗ (a† − a): (a† − a)[(n+1, n)] = √(n+1), [(n, n+1)] = −√(n+1).
    for j in 0..nl {
        for k in 0..nl {
            let m = eigs.charge_antisym[(j, k)];
            if m == 0.0 {
                continue;
            }
            for n in 0..f - 1 {
                let s = params.g * m * ((n + 1) as f64).sqrt();
                h[(j * f + n + 1, k * f + n)] += s;
                h[(j * f + n, k * f + n + 1)] -= s;
            }
        }
    }
    h
}

/// Diagonalizes the coupled model and labels each dressed state by its
/// dominant bare component. Two dressed states claiming the same label
/// within the trustworthy Fock window is a [`LindbladError::LabelingError`].
pub fn dressed_spectrum(params: &TransmonParams) -> Result<DressedSpectrum> {
    params.validate()?;
    let eigs = diagonalize_transmon(
        params.ec,
        params.ej,
        params.charge_cutoff,
        params.n_transmon_levels,
    )?;
    let nl = params.n_transmon_levels;
    let f = params.fock_cutoff;
    let dim = nl * f;

    let h = static_hamiltonian(&eigs, params);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut levels = Vec::with_capacity(dim);
    let mut states = DMatrix::<f64>::zeros(dim, dim);
    for (c, &col) in order.iter().enumerate() {
        levels.push(eig.eigenvalues[col]);
        let v = eig.eigenvectors.column(col);
        let mut pivot = 0;
        for r in 0..dim {
            if v[r].abs() > v[pivot].abs() {
                pivot = r;
            }
        }
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        for r in 0..dim {
            states[(r, c)] = sign * v[r];
        }
    }
    let e0 = levels[0];
    for e in &mut levels {
        *e -= e0;
    }

    // Max-overlap labeling. claim[bare] = (column, overlap).
    let guard = f - 2;
    let mut claim: Vec<Option<(usize, f64)>> = vec![None; dim];
    for c in 0..dim {
        let v = states.column(c);
        let mut pivot = 0;
        for r in 0..dim {
            if v[r] * v[r] > v[pivot] * v[pivot] {
                pivot = r;
            }
        }
        let overlap = v[pivot] * v[pivot];
        match claim[pivot] {
            None => claim[pivot] = Some((c, overlap)),
            Some((c0, o0)) => {
                let n = pivot % f;
                if n < guard {
                    let (j, n) = (pivot / f, pivot % f);
                    return Err(LindbladError::LabelingError(format!(
                        "dressed states {c0} and {c} both have bare ({j},{n}) as their \
                         dominant component (overlaps {o0:.4} and {overlap:.4})"
                    )));
                }
                if overlap > o0 {
                    claim[pivot] = Some((c, overlap));
                }
            }
        }
    }

    let n_label = f - 2;
    let mut col_of = vec![vec![0usize; n_label]; nl];
    let mut energies = vec![vec![0.0f64; n_label]; nl];
    for j in 0..nl {
        for n in 0..n_label {
            match claim[j * f + n] {
                Some((c, _)) => {
                    col_of[j][n] = c;
                    energies[j][n] = levels[c];
                }
                None => {
                    return Err(LindbladError::LabelingError(format!(
                        "no dressed state has bare ({j},{n}) as its dominant component"
                    )));
                }
            }
        }
    }

    let eps_tilde: Vec<f64> = (0..nl).map(|j| energies[j][0]).collect();
    let omega_r_tilde = 0.5
        * ((energies[0][1] - energies[0][0]) + (energies[1][1] - energies[1][0]));

    let mut chi = vec![vec![0.0f64; n_label]; nl];
    for j in 0..nl {
        for n in 1..n_label {
            chi[j][n] = (energies[j][n] - energies[j][0]) / n as f64 - omega_r_tilde;
        }
        chi[j][0] = chi[j][1];
    }

    Ok(DressedSpectrum {
        params: params.clone(),
        transmon: eigs,
        levels,
        states,
        col_of,
        energies,
        eps_tilde,
        omega_r_tilde,
        chi,
    })
}

/// Shift difference χ_{n_tar} = χ_{e,n_tar} − χ_{g,n_tar} and the matched
/// drive/demodulation frequency ω₁ = ω̃_r + (χ_{g,n_tar} + χ_{e,n_tar})/2,
/// both in linear MHz.
pub fn chi_at_target(spectrum: &DressedSpectrum, n_tar: usize) -> Result<(f64, f64)> {
    if n_tar < 1 || n_tar > spectrum.max_labeled_fock() {
        return Err(LindbladError::RangeError(format!(
            "n_tar = {n_tar} outside the labeled window 1..={}",
            spectrum.max_labeled_fock()
        )));
    }
    let chi_g = spectrum.chi[0][n_tar];
    let chi_e = spectrum.chi[1][n_tar];
    Ok((
        chi_e - chi_g,
        spectrum.omega_r_tilde + 0.5 * (chi_g + chi_e),
    ))
}
