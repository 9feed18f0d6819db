//! Helicity kets, Bell pairs, wave packets and reduced helicity density
//! matrices under accumulated Wigner phases.
//!
//! Momentum integrals are discrete sums over caller-supplied samples whose
//! weights already include the integration measure.

use crate::error::{Error, Result};
use crate::geodesics::Trajectory;
use crate::geometry::MetricConfig;
use crate::tetrads::{LocalVector, TetradField};
use crate::wigner::accumulate_along_trajectory;
use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

const NORM_TOL: f64 = 1e-10;

fn check_helicity(h: i8) -> Result<f64> {
    match h {
        1 | -1 => Ok(h as f64),
        _ => Err(Error::InvalidInput(format!("helicity must be ±1, got {h}"))),
    }
}

fn check_null(k: &LocalVector) -> Result<()> {
    let c = k.as_contravariant().components;
    let spatial = c[1] * c[1] + c[2] * c[2] + c[3] * c[3];
    if !(c[0] > 0.0) || (c[0] * c[0] - spatial).abs() > 1e-10 * c[0] * c[0] {
        return Err(Error::NonNull(format!("k = {c:?}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelicityKet {
    pub k_local: LocalVector,
    pub helicity: i8,
    pub phase: Complex64,
}

impl HelicityKet {
    pub fn new(k_local: LocalVector, helicity: i8) -> Result<Self> {
        check_helicity(helicity)?;
        check_null(&k_local)?;
        Ok(Self { k_local: k_local.as_contravariant(), helicity, phase: Complex64::new(1.0, 0.0) })
    }
}

/// |k, λ⟩ → e^{iλψ}|k', λ⟩.
pub fn apply_wigner_phase(ket: &HelicityKet, psi: f64, k_prime: LocalVector) -> HelicityKet {
    HelicityKet {
        k_local: k_prime,
        helicity: ket.helicity,
        phase: ket.phase * Complex64::from_polar(1.0, ket.helicity as f64 * psi),
    }
}

/// |k₁, λ₁⟩|k₂, λ₂⟩ ± |k₁, λ₂⟩|k₂, λ₁⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellPair {
    pub lambda1: i8,
    pub lambda2: i8,
    /// +1 or −1 between the branches.
    pub sign: i8,
}

impl BellPair {
    pub fn new(lambda1: i8, lambda2: i8, sign: i8) -> Result<Self> {
        check_helicity(lambda1)?;
        check_helicity(lambda2)?;
        check_helicity(sign)?;
        Ok(Self { lambda1, lambda2, sign })
    }
}

/// Phase of the second branch relative to the first after both photons pick
/// up their Wigner phases: e^{−i(λ₁−λ₂)(ψ₁−ψ₂)}.
pub fn evolve_bell_pair(state: &BellPair, psi1: f64, psi2: f64) -> Complex64 {
    let dl = (state.lambda1 - state.lambda2) as f64;
    Complex64::from_polar(1.0, -dl * (psi1 - psi2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellEvolution {
    pub psi1: f64,
    pub psi2: f64,
    pub relative_phase: Complex64,
}

/// Accumulates ψ along each photon's trajectory through the same tetrad family.
pub fn evolve_bell_pair_finite(
    cfg: &MetricConfig,
    state: &BellPair,
    trajectory1: &Trajectory,
    trajectory2: &Trajectory,
    field: &dyn TetradField,
) -> Result<BellEvolution> {
    let psi1 = accumulate_along_trajectory(cfg, trajectory1, field)?.psi_total;
    let psi2 = accumulate_along_trajectory(cfg, trajectory2, field)?.psi_total;
    Ok(BellEvolution { psi1, psi2, relative_phase: evolve_bell_pair(state, psi1, psi2) })
}

/// One bin of a wave-packet spectrum; `weight` is the quadrature measure of the bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralSample {
    pub k: f64,
    pub amplitude: Complex64,
    pub weight: f64,
}

pub fn spectrum_norm(spectrum: &[SpectralSample]) -> f64 {
    spectrum.iter().map(|s| s.amplitude.norm_sqr() * s.weight).sum()
}

pub fn mean_frequency(spectrum: &[SpectralSample]) -> f64 {
    spectrum.iter().map(|s| s.k * s.amplitude.norm_sqr() * s.weight).sum::<f64>() / spectrum_norm(spectrum)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotonWavePacket {
    pub direction: [f64; 3],
    pub polarization_angle: f64,
    pub spectrum: Vec<SpectralSample>,
}

impl PhotonWavePacket {
    pub fn new(direction: [f64; 3], polarization_angle: f64, spectrum: Vec<SpectralSample>) -> Result<Self> {
        let n = Vector3::from(direction).norm();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("direction norm {n} is not 1")));
        }
        if spectrum.iter().any(|s| !(s.k > 0.0) || !(s.weight > 0.0)) {
            return Err(Error::InvalidInput("spectrum needs positive frequencies and weights".into()));
        }
        let norm = spectrum_norm(&spectrum);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidInput(format!("spectrum norm {norm} is not 1")));
        }
        Ok(Self { direction, polarization_angle, spectrum })
    }

    /// Normalized Gaussian amplitude on `bins` equal bins over k₀ ± 5σ.
    pub fn gaussian(direction: [f64; 3], polarization_angle: f64, k0: f64, sigma: f64, bins: usize) -> Result<Self> {
        if !(sigma > 0.0) || !(k0 > 5.0 * sigma) || bins == 0 {
            return Err(Error::InvalidInput(format!("gaussian k0 = {k0}, sigma = {sigma}, bins = {bins}")));
        }
        let lo = k0 - 5.0 * sigma;
        let w = 10.0 * sigma / bins as f64;
        let mut spectrum: Vec<_> = (0..bins)
            .map(|i| {
                let k = lo + (i as f64 + 0.5) * w;
                let g = (-0.25 * ((k - k0) / sigma).powi(2)).exp();
                SpectralSample { k, amplitude: Complex64::new(g, 0.0), weight: w }
            })
            .collect();
        let scale = spectrum_norm(&spectrum).sqrt().recip();
        for s in &mut spectrum {
            s.amplitude *= scale;
        }
        Self::new(direction, polarization_angle, spectrum)
    }

    /// The packet after a transformation with Wigner angle ψ, frequency factor a
    /// and new direction n'.
    pub fn transformed(&self, psi: f64, a: f64, direction: [f64; 3]) -> Result<Self> {
        Self::new(direction, self.polarization_angle + psi, transform_wavepacket_spectrum(&self.spectrum, a)?)
    }
}

/// k' = (a/2)k with the amplitude density rescaled by √(2/a) so that
/// Σ|g'|²w' = Σ|g|²w.
pub fn transform_wavepacket_spectrum(spectrum: &[SpectralSample], a: f64) -> Result<Vec<SpectralSample>> {
    if !(a > 0.0) {
        return Err(Error::DegenerateTransform(format!("frequency factor a = {a} must be positive")));
    }
    let s = 0.5 * a;
    let amp = s.recip().sqrt();
    Ok(spectrum
        .iter()
        .map(|g| SpectralSample { k: g.k * s, amplitude: g.amplitude * amp, weight: g.weight * s })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct HelicityDensityMatrix {
    pub entries: DMatrix<Complex64>,
}

impl HelicityDensityMatrix {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        let rho = Self { entries };
        rho.validate()?;
        Ok(rho)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn basis(&self) -> &'static [&'static str] {
        if self.dim() == 2 { &["+", "-"] } else { &["++", "+-", "-+", "--"] }
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.entries * &self.entries).trace().re
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.entries.clone().symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn hermiticity_residual(&self) -> f64 {
        (&self.entries - self.entries.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.entries.nrows();
        if !(d == 2 || d == 4) || self.entries.ncols() != d {
            return Err(Error::InvalidInput(format!("density matrix must be 2×2 or 4×4, got {d}")));
        }
        let h = self.hermiticity_residual();
        if h > 1e-12 {
            return Err(Error::InvalidInput(format!("not Hermitian: {h:e}")));
        }
        let t = self.trace();
        if (t - 1.0).norm() > NORM_TOL {
            return Err(Error::InvalidInput(format!("trace {t} is not 1")));
        }
        let min = self.eigenvalues()[0];
        if min < -1e-10 {
            return Err(Error::InvalidInput(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// U ρ U† with U = diag(e^{iλψ}) over the helicity basis.
    pub fn conjugated(&self, phases: &[f64]) -> Self {
        let u = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            phases.len(),
            phases.iter().map(|p| Complex64::from_polar(1.0, *p)),
        ));
        Self { entries: &u * &self.entries * u.adjoint() }
    }
}

#[derive(Serialize, Deserialize)]
struct DensityRecord {
    dim: usize,
    basis: Vec<String>,
    entries: Vec<Vec<[f64; 2]>>,
}

impl Serialize for HelicityDensityMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.dim();
        DensityRecord {
            dim: d,
            basis: self.basis().iter().map(|b| b.to_string()).collect(),
            entries: (0..d).map(|i| (0..d).map(|j| [self.entries[(i, j)].re, self.entries[(i, j)].im]).collect()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HelicityDensityMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rec = DensityRecord::deserialize(d)?;
        if rec.entries.len() != rec.dim || rec.entries.iter().any(|row| row.len() != rec.dim) {
            return Err(serde::de::Error::custom("entries do not match dim"));
        }
        let m = DMatrix::from_fn(rec.dim, rec.dim, |i, j| Complex64::new(rec.entries[i][j][0], rec.entries[i][j][1]));
        HelicityDensityMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

/// ½[[1, e^{2iφ}], [e^{−2iφ}, 1]] in the basis λ = (+1, −1).
pub fn reduced_density_single(packet: &PhotonWavePacket) -> HelicityDensityMatrix {
    let c = Complex64::from_polar(0.5, 2.0 * packet.polarization_angle);
    let h = Complex64::new(0.5, 0.0);
    HelicityDensityMatrix { entries: DMatrix::from_row_slice(2, 2, &[h, c, c.conj(), h]) }
}

pub fn transform_reduced_single(rho: &HelicityDensityMatrix, psi: f64) -> Result<HelicityDensityMatrix> {
    if rho.dim() != 2 {
        return Err(Error::InvalidInput(format!("expected a 2×2 matrix, got {}", rho.dim())));
    }
    Ok(rho.conjugated(&[psi, -psi]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum HelicityStructure {
    /// g_{λ₁λ₂} = e^{iλ₁φ₁}e^{iλ₂φ₂}δ_{λ₁λ₂} f/√2.
    BellPhaseForm { phi1: f64, phi2: f64 },
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairSample {
    pub k1: f64,
    pub n1: [f64; 3],
    pub k2: f64,
    pub n2: [f64; 3],
    pub amplitude: Complex64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPhotonState {
    pub helicity_structure: HelicityStructure,
    pub momentum_distribution: Vec<PairSample>,
    pub factorizable: bool,
}

impl TwoPhotonState {
    pub fn new(helicity_structure: HelicityStructure, momentum_distribution: Vec<PairSample>, factorizable: bool) -> Result<Self> {
        let norm: f64 = momentum_distribution.iter().map(|s| s.amplitude.norm_sqr() * s.weight).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidInput(format!("momentum distribution norm {norm} is not 1")));
        }
        Ok(Self { helicity_structure, momentum_distribution, factorizable })
    }

    fn phases(&self) -> Result<(f64, f64)> {
        match self.helicity_structure {
            HelicityStructure::BellPhaseForm { phi1, phi2 } => Ok((phi1, phi2)),
            HelicityStructure::General => {
                Err(Error::UnsupportedStructure("only the Bell phase form has a closed reduced matrix".into()))
            }
        }
    }
}

fn corner_matrix(corner: Complex64) -> HelicityDensityMatrix {
    let mut m = DMatrix::from_element(4, 4, Complex64::new(0.0, 0.0));
    m[(0, 0)] = Complex64::new(0.5, 0.0);
    m[(3, 3)] = Complex64::new(0.5, 0.0);
    m[(0, 3)] = corner * 0.5;
    m[(3, 0)] = corner.conj() * 0.5;
    HelicityDensityMatrix { entries: m }
}

/// Reduced helicity matrix in the basis (++, +−, −+, −−).
pub fn two_photon_reduced(state: &TwoPhotonState) -> Result<HelicityDensityMatrix> {
    let (phi1, phi2) = state.phases()?;
    Ok(corner_matrix(Complex64::from_polar(1.0, 2.0 * (phi1 + phi2))))
}

/// Direction-resolved Wigner angles of a photon pair; weights are |f'|² times the measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiSample {
    pub n1: [f64; 3],
    pub n2: [f64; 3],
    pub weight: f64,
    pub psi1: f64,
    pub psi2: f64,
}

/// Corner Σ w·e^{2i(φ₁+ψ₁+φ₂+ψ₂)}; the diagonal is unchanged.
pub fn transform_two_photon_reduced(state: &TwoPhotonState, psi_samples: &[PsiSample]) -> Result<HelicityDensityMatrix> {
    let (phi1, phi2) = state.phases()?;
    let total: f64 = psi_samples.iter().map(|s| s.weight).sum();
    if (total - 1.0).abs() > NORM_TOL || psi_samples.iter().any(|s| s.weight < 0.0) {
        return Err(Error::InvalidInput(format!("sample weights sum to {total}, expected 1")));
    }
    let corner = psi_samples
        .iter()
        .map(|s| Complex64::from_polar(s.weight, 2.0 * (phi1 + s.psi1 + phi2 + s.psi2)))
        .sum();
    Ok(corner_matrix(corner))
}
