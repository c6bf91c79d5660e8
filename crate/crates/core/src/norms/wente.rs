//! Sampling estimates of the Wente-type Jacobian bounds.

use num_complex::Complex64;
use rand::Rng;

use super::{sobolev_norm, SobolevOrder};
use crate::error::{Error, Result};
use crate::parallel::ordered_map;
use crate::spectral::random::{random_field, sample_rng};
use crate::spectral::{fft_friendly_size, Fft2d, SpectralField, WaveGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WenteVariant {
    /// `‖J‖_{H⁻¹} / (‖ψ‖_{H¹} ‖φ‖_{H¹})`
    Hminus1,
    /// `‖J‖₂ / (‖ψ‖_{H²} ‖φ‖_{H¹})`
    PsiH2,
    /// `‖J‖₂ / (‖ψ‖_{H¹} ‖φ‖_{H²})`
    PhiH2,
}

impl WenteVariant {
    pub const ALL: [WenteVariant; 3] = [Self::Hminus1, Self::PsiH2, Self::PhiH2];

    pub fn name(self) -> &'static str {
        match self {
            Self::Hminus1 => "Hminus1",
            Self::PsiH2 => "psiH2",
            Self::PhiH2 => "phiH2",
        }
    }

    fn slot(self) -> usize {
        match self {
            Self::Hminus1 => 0,
            Self::PsiH2 => 1,
            Self::PhiH2 => 2,
        }
    }
}

impl std::str::FromStr for WenteVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown Wente variant '{s}'")))
    }
}

/// How sample pairs `(ψ, φ)` are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WenteEnsemble {
    /// Decay-weighted normal coefficients on every mode of `P^N`.
    FullBand,
    /// As `FullBand`, but each sample is truncated at its own band limit
    /// `K`, drawn log-uniformly from `[1, N]`. Low-mode pairs are then
    /// drawn at every resolution, so the sup does not drift with `N`.
    #[default]
    Multiscale,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WenteEstimate {
    pub variant: WenteVariant,
    pub sup_ratio: f64,
    pub n_samples: usize,
    pub n: usize,
}

/// `J = ∇⊥ψ · ∇φ = -ψ_y φ_x + ψ_x φ_y`, computed exactly in `P^{2N}`.
pub fn jacobian(psi: &SpectralField, phi: &SpectralField) -> Result<SpectralField> {
    psi.check_same_modes(phi)?;
    let n = psi.n();
    let mut fft = Fft2d::new(fft_friendly_size(4 * n + 1));
    Ok(jacobian_with(&mut fft, psi, phi))
}

fn jacobian_with(fft: &mut Fft2d, psi: &SpectralField, phi: &SpectralField) -> SpectralField {
    let n = psi.n();
    let grid = psi.grid();
    let len = grid.num_modes();
    let mut a_re = vec![Complex64::new(0.0, 0.0); len];
    let mut a_im = a_re.clone();
    let mut b_re = a_re.clone();
    let mut b_im = a_re.clone();
    for (k, l, i) in grid.modes() {
        let (kf, lf) = (k as f64, l as f64);
        let p = psi.coefficients()[i];
        let q = phi.coefficients()[i];
        let i_unit = Complex64::new(0.0, 1.0);
        a_re[i] = -i_unit * lf * p;
        a_im[i] = i_unit * kf * p;
        b_re[i] = i_unit * kf * q;
        b_im[i] = i_unit * lf * q;
    }
    let mut a = fft.buffer();
    let mut b = fft.buffer();
    fft.synthesize_pair(&a_re, &a_im, n, &mut a);
    fft.synthesize_pair(&b_re, &b_im, n, &mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x = Complex64::new(x.re * y.re + x.im * y.im, 0.0);
    }
    let mut out = SpectralField::zeros(WaveGrid::critical(2 * n).expect("n >= 1"));
    fft.analyze(&mut a, 2 * n, out.coefficients_mut());
    out
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

fn ratios_from(j: &SpectralField, psi: &SpectralField, phi: &SpectralField) -> [f64; 3] {
    let j_hm1 = sobolev_norm(j, SobolevOrder::H_MINUS_1);
    let j_l2 = sobolev_norm(j, SobolevOrder::L2);
    let psi1 = sobolev_norm(psi, SobolevOrder::H1);
    let psi2 = sobolev_norm(psi, SobolevOrder::H2);
    let phi1 = sobolev_norm(phi, SobolevOrder::H1);
    let phi2 = sobolev_norm(phi, SobolevOrder::H2);
    [
        ratio(j_hm1, psi1 * phi1),
        ratio(j_l2, psi2 * phi1),
        ratio(j_l2, psi1 * phi2),
    ]
}

/// The three Wente ratios of one pair, in [`WenteVariant::ALL`] order.
pub fn wente_ratios(psi: &SpectralField, phi: &SpectralField) -> Result<[f64; 3]> {
    let j = jacobian(psi, phi)?;
    Ok(ratios_from(&j, psi, phi))
}

fn draw_pair(grid: WaveGrid, ensemble: WenteEnsemble, seed: u64, index: u64) -> (SpectralField, SpectralField) {
    let mut rng = sample_rng(seed, index);
    let n = grid.n();
    let kmax = match ensemble {
        WenteEnsemble::FullBand => n,
        WenteEnsemble::Multiscale => {
            let u: f64 = rng.random();
            ((n as f64).powf(u).floor() as usize).clamp(1, n)
        }
    };
    let psi = random_field(grid, 1, kmax, 1.0, &mut rng);
    let phi = random_field(grid, 1, kmax, 1.0, &mut rng);
    (psi, phi)
}

/// Sup of all three ratios over `n_samples` random pairs in `P^N`.
pub fn estimate_wente_constants(
    n: usize,
    n_samples: usize,
    seed: u64,
    ensemble: WenteEnsemble,
) -> Result<[WenteEstimate; 3]> {
    if n < 4 {
        return Err(Error::invalid(format!("Wente estimation needs N >= 4, got {n}")));
    }
    if n_samples == 0 {
        return Err(Error::invalid("Wente estimation needs at least one sample"));
    }
    let grid = WaveGrid::critical(n)?;
    let size = fft_friendly_size(4 * n + 1);
    let chunks = n_samples.div_ceil(256);
    let partial = ordered_map(chunks, |c| {
        let mut fft = Fft2d::new(size);
        let mut sup = [0.0f64; 3];
        for i in (c * 256)..((c + 1) * 256).min(n_samples) {
            let (psi, phi) = draw_pair(grid, ensemble, seed, i as u64);
            let j = jacobian_with(&mut fft, &psi, &phi);
            for (s, r) in sup.iter_mut().zip(ratios_from(&j, &psi, &phi)) {
                *s = s.max(r);
            }
        }
        sup
    });
    let mut sup = [0.0f64; 3];
    for p in partial {
        for (s, r) in sup.iter_mut().zip(p) {
            *s = s.max(r);
        }
    }
    Ok(WenteVariant::ALL.map(|variant| WenteEstimate {
        variant,
        sup_ratio: sup[variant.slot()],
        n_samples,
        n,
    }))
}

pub fn estimate_wente_constant(
    variant: WenteVariant,
    n: usize,
    n_samples: usize,
    seed: u64,
) -> Result<WenteEstimate> {
    let all = estimate_wente_constants(n, n_samples, seed, WenteEnsemble::default())?;
    Ok(all[variant.slot()])
}
