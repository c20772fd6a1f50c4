//! One qubit coupled to a single qumode truncated to `d` Fock levels.
//!
//! Hybrid amplitudes are indexed `bit · d + n` for qubit bit `bit` and Fock level `n`,
//! so a joint operator is `qubit ⊗ mode` with the mode on the low index.

mod tokens;

pub use tokens::{
    encode_tokens, encode_tokens_traced, optimize_token_params, optimize_token_params_traced,
    tokenize_smiles, tokenize_whitespace, TokenDictionary, TokenParams,
};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, I, ONE, ZERO};
use crate::sim::state::NORM_TOLERANCE;

pub const DEFAULT_CUTOFF: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QumodeConfig {
    cutoff: usize,
}

impl QumodeConfig {
    pub fn new(cutoff: usize) -> Result<Self> {
        if cutoff < 2 {
            return Err(Error::validation(format!(
                "Fock cutoff must be at least 2, got {cutoff}"
            )));
        }
        Ok(Self { cutoff })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }
}

impl Default for QumodeConfig {
    fn default() -> Self {
        Self {
            cutoff: DEFAULT_CUTOFF,
        }
    }
}

/// Truncated ladder operators.
#[derive(Debug, Clone, PartialEq)]
pub struct BosonicOperators {
    pub annihilate: CMatrix,
    pub create: CMatrix,
}

impl BosonicOperators {
    pub fn new(config: QumodeConfig) -> Self {
        let d = config.cutoff;
        let mut b = CMatrix::zeros(d);
        for n in 1..d {
            b.set(n - 1, n, C64::new((n as f64).sqrt(), 0.0));
        }
        let create = b.adjoint();
        Self {
            annihilate: b,
            create,
        }
    }

    /// `b†b`.
    pub fn number(&self) -> CMatrix {
        self.create.matmul(&self.annihilate)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HybridState {
    cutoff: usize,
    amps: Vec<C64>,
}

impl HybridState {
    /// Wraps `2·d` amplitudes, checking the norm.
    pub fn new(config: QumodeConfig, amps: Vec<C64>) -> Result<Self> {
        let d = config.cutoff;
        if amps.len() != 2 * d {
            return Err(Error::validation(format!(
                "hybrid state with cutoff {d} needs {} amplitudes, got {}",
                2 * d,
                amps.len()
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::validation(format!(
                "hybrid state is not normalized (norm² = {norm})"
            )));
        }
        Ok(Self { cutoff: d, amps })
    }

    pub fn vacuum(config: QumodeConfig) -> Self {
        let mut amps = vec![ZERO; 2 * config.cutoff];
        amps[0] = ONE;
        Self {
            cutoff: config.cutoff,
            amps,
        }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, bit: usize, n: usize) -> C64 {
        self.amps[bit * self.cutoff + n]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Fock-level populations with the qubit traced out.
    pub fn photon_distribution(&self) -> Vec<f64> {
        let d = self.cutoff;
        (0..d)
            .map(|n| self.amps[n].norm_sqr() + self.amps[d + n].norm_sqr())
            .collect()
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.photon_distribution()
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    /// Applies a `2×2` operator to the qubit.
    pub fn apply_qubit(&mut self, u: &CMatrix) {
        let d = self.cutoff;
        for n in 0..d {
            let a0 = self.amps[n];
            let a1 = self.amps[d + n];
            self.amps[n] = u.get(0, 0) * a0 + u.get(0, 1) * a1;
            self.amps[d + n] = u.get(1, 0) * a0 + u.get(1, 1) * a1;
        }
    }

    /// Applies a full `2d×2d` operator.
    pub fn apply(&mut self, u: &CMatrix) -> Result<()> {
        if u.dim() != self.amps.len() {
            return Err(Error::validation(format!(
                "operator is {0}x{0}, state has {1} amplitudes",
                u.dim(),
                self.amps.len()
            )));
        }
        self.amps = u.apply(&self.amps);
        Ok(())
    }

    /// ECD from its two branch displacements `D(β/2)` and `D(−β/2)`.
    fn apply_ecd_parts(&mut self, plus: &CMatrix, minus: &CMatrix) {
        let d = self.cutoff;
        let low = minus.apply(&self.amps[d..]);
        let high = plus.apply(&self.amps[..d]);
        self.amps[..d].copy_from_slice(&low);
        self.amps[d..].copy_from_slice(&high);
    }
}

/// `⟨a|b⟩`.
pub fn state_overlap(a: &HybridState, b: &HybridState) -> Result<C64> {
    if a.cutoff != b.cutoff {
        return Err(Error::validation(format!(
            "cutoffs differ: {} vs {}",
            a.cutoff, b.cutoff
        )));
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

pub fn vacuum(config: QumodeConfig) -> HybridState {
    HybridState::vacuum(config)
}

/// `exp(α b† − α* b)` of the truncated generator.
pub fn displacement(alpha: C64, config: QumodeConfig) -> CMatrix {
    if alpha == ZERO {
        return CMatrix::identity(config.cutoff);
    }
    let ops = BosonicOperators::new(config);
    ops.create
        .scale(alpha)
        .add(&ops.annihilate.scale(-alpha.conj()))
        .expm()
}

/// `exp(−i(θ/2)(σx cos φ + σy sin φ))`.
pub fn qubit_rotation(theta: f64, phi: f64) -> CMatrix {
    let c = C64::new((theta / 2.0).cos(), 0.0);
    let s = (theta / 2.0).sin();
    let off_upper = -I * s * C64::from_polar(1.0, -phi);
    let off_lower = -I * s * C64::from_polar(1.0, phi);
    CMatrix::from_rows(2, vec![c, off_upper, off_lower, c])
}

/// `|1⟩⟨0| ⊗ D(β/2) + |0⟩⟨1| ⊗ D(−β/2)`.
pub fn ecd(beta: C64, config: QumodeConfig) -> CMatrix {
    let d = config.cutoff;
    let plus = displacement(beta / 2.0, config);
    let minus = displacement(-beta / 2.0, config);
    let mut m = CMatrix::zeros(2 * d);
    for r in 0..d {
        for c in 0..d {
            m.set(d + r, c, plus.get(r, c));
            m.set(r, d + c, minus.get(r, c));
        }
    }
    m
}

/// Precomputed factors of one rotation-then-ECD block.
#[derive(Debug, Clone)]
pub(crate) struct RecdBlock {
    rotation: CMatrix,
    plus: CMatrix,
    minus: CMatrix,
}

impl RecdBlock {
    pub(crate) fn new(theta: f64, phi: f64, beta: C64, config: QumodeConfig) -> Self {
        Self {
            rotation: qubit_rotation(theta, phi),
            plus: displacement(beta / 2.0, config),
            minus: displacement(-beta / 2.0, config),
        }
    }

    pub(crate) fn apply(&self, state: &mut HybridState) {
        state.apply_qubit(&self.rotation);
        state.apply_ecd_parts(&self.plus, &self.minus);
    }
}

fn check_cutoff(state: &HybridState, config: QumodeConfig) -> Result<()> {
    if state.cutoff != config.cutoff {
        return Err(Error::validation(format!(
            "state cutoff {} does not match config cutoff {}",
            state.cutoff, config.cutoff
        )));
    }
    Ok(())
}

/// Applies `R(θ, φ) ⊗ I` followed by `ECD(β)`.
pub fn apply_recd_block(
    state: &HybridState,
    theta: f64,
    phi: f64,
    beta: C64,
    config: QumodeConfig,
) -> Result<HybridState> {
    check_cutoff(state, config)?;
    let mut out = state.clone();
    RecdBlock::new(theta, phi, beta, config).apply(&mut out);
    Ok(out)
}

/// Undoes [`apply_recd_block`]: `ECD(β)†` then `R(θ, φ)†`.
pub fn apply_recd_block_inverse(
    state: &HybridState,
    theta: f64,
    phi: f64,
    beta: C64,
    config: QumodeConfig,
) -> Result<HybridState> {
    check_cutoff(state, config)?;
    let mut out = state.clone();
    // ECD(β)† swaps the branch displacements and inverts them.
    let plus = displacement(beta / 2.0, config).adjoint();
    let minus = displacement(-beta / 2.0, config).adjoint();
    out.apply_ecd_parts(&minus, &plus);
    out.apply_qubit(&qubit_rotation(theta, phi).adjoint());
    Ok(out)
}

/// `|0⟩ ⊗ Σ αₖ|k⟩` with `α = x/‖x‖₂`, built directly.
pub fn amplitude_encode_qumode(x: &[C64], config: QumodeConfig) -> Result<HybridState> {
    let d = config.cutoff;
    if x.is_empty() {
        return Err(Error::validation("cannot encode an empty vector"));
    }
    if x.len() > d {
        return Err(Error::Capacity(format!(
            "vector of length {} does not fit in {d} Fock levels",
            x.len()
        )));
    }
    if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::validation("vector has non-finite entries"));
    }
    let norm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::validation("cannot encode the zero vector"));
    }
    let mut amps = vec![ZERO; 2 * d];
    for (a, v) in amps.iter_mut().zip(x) {
        *a = v / norm;
    }
    Ok(HybridState { cutoff: d, amps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::gates;

    fn cfg(d: usize) -> QumodeConfig {
        QumodeConfig::new(d).unwrap()
    }

    #[test]
    fn vacuum_layout() {
        let v = vacuum(cfg(4));
        assert_eq!(v.amplitude(0, 0), ONE);
        assert_eq!(v.amplitudes().iter().filter(|a| **a != ZERO).count(), 1);
        assert_eq!(vacuum(cfg(16)).amplitudes().len(), 32);
        assert!((v.norm_sqr() - 1.0).abs() < 1e-15);
        assert!(QumodeConfig::new(1).is_err());
    }

    #[test]
    fn commutator_is_identity_below_boundary() {
        let d = 8;
        let ops = BosonicOperators::new(cfg(d));
        let bbd = ops.annihilate.matmul(&ops.create);
        let bdb = ops.number();
        for r in 0..d - 1 {
            for c in 0..d - 1 {
                let want = if r == c { ONE } else { ZERO };
                assert!((bbd.get(r, c) - bdb.get(r, c) - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn displacement_identities() {
        let c = cfg(16);
        assert_eq!(displacement(ZERO, c), CMatrix::identity(16));
        let a = C64::new(0.6, -0.3);
        let d = displacement(a, c);
        assert!(d.is_unitary(1e-10));
        let back = d.matmul(&displacement(-a, c));
        assert!(back.max_abs_diff(&CMatrix::identity(16)) < 1e-10);
    }

    #[test]
    fn coherent_state_photon_number() {
        let c = cfg(32);
        let mut s = vacuum(c);
        let d = displacement(ONE, c);
        let mut full = CMatrix::zeros(64);
        for r in 0..32 {
            for k in 0..32 {
                full.set(r, k, d.get(r, k));
                full.set(32 + r, 32 + k, d.get(r, k));
            }
        }
        s.apply(&full).unwrap();
        assert!((s.mean_photon_number() - 1.0).abs() < 1e-3);
        // Poisson(1) populations
        let p = s.photon_distribution();
        let mut fact = 1.0;
        for (n, pn) in p.iter().take(8).enumerate() {
            if n > 0 {
                fact *= n as f64;
            }
            assert!((pn - (-1.0f64).exp() / fact).abs() < 1e-8);
        }
    }

    #[test]
    fn rotation_special_cases() {
        assert!(qubit_rotation(0.0, 1.3).max_abs_diff(&CMatrix::identity(2)) < 1e-15);
        let mix = gates::x().matrix().scale(-I);
        assert!(qubit_rotation(std::f64::consts::PI, 0.0).max_abs_diff(&mix) < 1e-15);
        for (t, p) in [(0.3, 0.0), (1.2, 2.0), (-2.5, -0.7)] {
            let gen = gates::x()
                .matrix()
                .scale(C64::new(f64::cos(p), 0.0))
                .add(&gates::y().matrix().scale(C64::new(f64::sin(p), 0.0)));
            let oracle = gen.scale(C64::new(0.0, -t / 2.0)).expm();
            assert!(qubit_rotation(t, p).max_abs_diff(&oracle) < 1e-12);
        }
    }

    #[test]
    fn ecd_structure() {
        let c = cfg(16);
        let x_i = gates::x().matrix().kron(&CMatrix::identity(16));
        assert!(ecd(ZERO, c).max_abs_diff(&x_i) < 1e-15);
        let beta = C64::new(0.8, 0.4);
        let e = ecd(beta, c);
        assert!(e.is_unitary(1e-10));
        assert!(e.matmul(&e).max_abs_diff(&CMatrix::identity(32)) < 1e-10);

        let mut s = vacuum(c);
        s.apply(&e).unwrap();
        let dv = displacement(beta / 2.0, c).apply(&vacuum(c).amplitudes()[..16]);
        for (n, want) in dv.iter().enumerate() {
            assert!(s.amplitude(0, n).norm() < 1e-15);
            assert!((s.amplitude(1, n) - want).norm() < 1e-14);
        }
    }

    #[test]
    fn recd_block_and_inverse() {
        let c = cfg(16);
        let v = vacuum(c);
        let flipped = apply_recd_block(&v, 0.0, 0.0, ZERO, c).unwrap();
        assert_eq!(flipped.amplitude(1, 0), ONE);

        let beta = C64::new(1.0, 0.0);
        let s = apply_recd_block(&v, std::f64::consts::FRAC_PI_2, 0.0, beta, c).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-10);

        let full = ecd(beta, c).matmul(&qubit_rotation(0.4, 1.1).kron(&CMatrix::identity(16)));
        assert!(full.is_unitary(1e-10));
        let s = apply_recd_block(&v, 0.4, 1.1, beta, c).unwrap();
        let mut w = v.clone();
        w.apply(&full).unwrap();
        assert!(state_overlap(&s, &w).unwrap().norm() > 1.0 - 1e-12);

        let back = apply_recd_block_inverse(&s, 0.4, 1.1, beta, c).unwrap();
        assert!(state_overlap(&back, &v).unwrap().norm_sqr() >= 1.0 - 1e-10);
    }

    #[test]
    fn overlap_basics() {
        let c = cfg(4);
        let v = vacuum(c);
        assert!((state_overlap(&v, &v).unwrap() - ONE).norm() < 1e-15);
        let one = apply_recd_block(&v, 0.0, 0.0, ZERO, c).unwrap();
        assert_eq!(state_overlap(&v, &one).unwrap(), ZERO);
        assert!(state_overlap(&v, &vacuum(cfg(5))).is_err());
    }

    #[test]
    fn qumode_amplitude_encoding() {
        let c = cfg(4);
        let s = amplitude_encode_qumode(&[ONE], c).unwrap();
        assert_eq!(s, vacuum(c));
        let s = amplitude_encode_qumode(&[ZERO, ONE], c).unwrap();
        assert_eq!(s.amplitude(0, 1), ONE);
        let s = amplitude_encode_qumode(&[ONE, ONE], c).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        assert!((s.amplitude(0, 0).re - s.amplitude(0, 1).re).abs() < 1e-15);
        assert!(matches!(
            amplitude_encode_qumode(&[ONE; 5], c),
            Err(Error::Capacity(_))
        ));
        assert!(amplitude_encode_qumode(&[ZERO], c).is_err());
    }
}
