//! Butterworth band-pass filter bank.
//!
//! Design runs entirely through poles: the normalized low-pass prototype
//! poles `p_k` are mapped by the low-pass to band-pass substitution
//! `p = (s^2 + w_l w_u) / (s (w_u - w_l))` into `2N` analog poles, and those are
//! mapped into the z-plane by the bilinear transform with pre-warped band
//! edges, so the digital -3 dB points sit exactly on the requested Hz values.
//! The result is stored as `N` second-order sections, each with numerator
//! `1 - z^-2` (one zero at DC, one at Nyquist).

use std::f64::consts::PI;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::Band;

/// Order used throughout the pipeline.
pub const DEFAULT_ORDER: usize = 8;

/// Normalized Butterworth low-pass poles `exp(j pi (2k + N + 1) / 2N)`, k = 0..N.
pub fn design_lowpass_prototype(order: usize) -> Result<Vec<Complex64>> {
    if order == 0 {
        return Err(Error::validation("filter order must be >= 1"));
    }
    let n = order as f64;
    Ok((0..order)
        .map(|k| Complex64::from_polar(1.0, PI * (2.0 * k as f64 + n + 1.0) / (2.0 * n)))
        .collect())
}

/// Low-pass to band-pass transform parameters, in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandParameters {
    pub omega_l: f64,
    pub omega_u: f64,
    /// `B = w_u - w_l`
    pub bandwidth: f64,
    pub eta_l: f64,
    pub eta_u: f64,
    /// `eta_0^2 = eta_l * eta_u`
    pub eta0_sq: f64,
}

impl BandParameters {
    pub fn new(omega_l: f64, omega_u: f64) -> Result<Self> {
        if !(omega_l.is_finite() && omega_u.is_finite() && 0.0 < omega_l && omega_l < omega_u) {
            return Err(Error::validation(format!(
                "degenerate band: need 0 < w_l < w_u, got {omega_l}..{omega_u}"
            )));
        }
        let bandwidth = omega_u - omega_l;
        let eta_l = omega_l / bandwidth;
        let eta_u = omega_u / bandwidth;
        Ok(BandParameters {
            omega_l,
            omega_u,
            bandwidth,
            eta_l,
            eta_u,
            eta0_sq: eta_l * eta_u,
        })
    }

    /// Geometric center `w_0 = sqrt(w_l w_u)`.
    pub fn omega0(&self) -> f64 {
        (self.omega_l * self.omega_u).sqrt()
    }
}

/// Analog band-pass transfer function
/// `H(s) = gain * s^N / prod_i (s - pole_i)` with `2N` poles.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalogBandPass {
    pub band: Band,
    pub params: BandParameters,
    pub prototype_poles: Vec<Complex64>,
    pub poles: Vec<Complex64>,
    /// Number of zeros at `s = 0` (equals the prototype order).
    pub zeros_at_origin: usize,
    pub gain: f64,
    /// Sampling rate the band edges were pre-warped for, if any.
    pub prewarped_for: Option<f64>,
}

impl AnalogBandPass {
    pub fn order(&self) -> usize {
        self.prototype_poles.len()
    }

    pub fn response(&self, omega: f64) -> Complex64 {
        let s = Complex64::new(0.0, omega);
        let num = s.powu(self.zeros_at_origin as u32) * self.gain;
        self.poles.iter().fold(num, |h, &p| h / (s - p))
    }

    pub fn magnitude(&self, omega: f64) -> f64 {
        self.response(omega).norm()
    }
}

/// Band-pass transform with the band edges taken literally (`w = 2 pi f`).
pub fn bandpass_transform(prototype: &[Complex64], band: &Band) -> Result<AnalogBandPass> {
    let params = BandParameters::new(2.0 * PI * band.low_hz, 2.0 * PI * band.high_hz)?;
    transform_with(prototype, *band, params, None)
}

/// Band-pass transform with edges pre-warped for the bilinear transform at
/// `sampling_rate`: `W = 2 fs tan(pi f / fs)`.
pub fn bandpass_transform_prewarped(
    prototype: &[Complex64],
    band: &Band,
    sampling_rate: f64,
) -> Result<AnalogBandPass> {
    band.check_sampling_rate(sampling_rate)?;
    let warp = |f: f64| 2.0 * sampling_rate * (PI * f / sampling_rate).tan();
    let params = BandParameters::new(warp(band.low_hz), warp(band.high_hz))?;
    transform_with(prototype, *band, params, Some(sampling_rate))
}

fn transform_with(
    prototype: &[Complex64],
    band: Band,
    params: BandParameters,
    prewarped_for: Option<f64>,
) -> Result<AnalogBandPass> {
    if prototype.is_empty() {
        return Err(Error::validation("empty prototype"));
    }
    let b = params.bandwidth;
    let w0_sq = params.omega_l * params.omega_u;
    // Each prototype pole p contributes the two roots of s^2 - p B s + w0^2.
    let mut poles = Vec::with_capacity(2 * prototype.len());
    for &p in prototype {
        let half = p * b * 0.5;
        let disc = (half * half - w0_sq).sqrt();
        poles.push(half + disc);
        poles.push(half - disc);
    }
    // H(j w0) = 1 / prod(-p_k) = 1 for a normalized Butterworth prototype,
    // leaving B^N as the band-pass gain.
    let proto_dc = prototype
        .iter()
        .fold(Complex64::new(1.0, 0.0), |acc, &p| acc * (-p));
    let gain = b.powi(prototype.len() as i32) / proto_dc.norm();
    Ok(AnalogBandPass {
        band,
        params,
        prototype_poles: prototype.to_vec(),
        poles,
        zeros_at_origin: prototype.len(),
        gain,
        prewarped_for,
    })
}

/// Design metadata carried by every digital filter.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterDesign {
    pub order: usize,
    pub band: Band,
    pub sampling_rate: f64,
    pub normalized_poles: Vec<Complex64>,
    pub analog_poles: Vec<Complex64>,
    pub band_parameters: BandParameters,
}

/// One second-order section `(b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl Biquad {
    pub fn response(&self, z_inv: Complex64) -> Complex64 {
        let z2 = z_inv * z_inv;
        let num = self.b[0] + z_inv * self.b[1] + z2 * self.b[2];
        let den = 1.0 + z_inv * self.a[0] + z2 * self.a[1];
        num / den
    }

    /// Roots of `z^2 + a1 z + a2`.
    pub fn poles(&self) -> [Complex64; 2] {
        let half = Complex64::new(-self.a[0] / 2.0, 0.0);
        let disc = (half * half - self.a[1]).sqrt();
        [half + disc, half - disc]
    }

    pub fn is_stable(&self) -> bool {
        self.poles().iter().all(|p| p.norm() < 1.0)
    }

    fn dc_gain(&self) -> f64 {
        (self.b[0] + self.b[1] + self.b[2]) / (1.0 + self.a[0] + self.a[1])
    }

    /// Direct form II transposed state that holds output steady for a
    /// constant input equal to 1.
    fn steady_state(&self) -> [f64; 2] {
        let y = self.dc_gain();
        let s2 = self.b[2] - self.a[1] * y;
        let s1 = self.b[1] - self.a[0] * y + s2;
        [s1, s2]
    }
}

/// Digital band-pass filter as a cascade of second-order sections.
#[derive(Debug, Clone, PartialEq)]
pub struct DigitalFilter {
    sections: Vec<Biquad>,
    design: FilterDesign,
}

impl DigitalFilter {
    /// Prototype, pre-warped band-pass transform and bilinear discretization.
    pub fn design(order: usize, band: Band, sampling_rate: f64) -> Result<Self> {
        let proto = design_lowpass_prototype(order)?;
        let analog = bandpass_transform_prewarped(&proto, &band, sampling_rate)?;
        discretize(&analog, sampling_rate)
    }

    pub fn sections(&self) -> &[Biquad] {
        &self.sections
    }

    pub fn design_info(&self) -> &FilterDesign {
        &self.design
    }

    pub fn band(&self) -> &Band {
        &self.design.band
    }

    pub fn sampling_rate(&self) -> f64 {
        self.design.sampling_rate
    }

    /// All `2N` digital poles.
    pub fn poles(&self) -> Vec<Complex64> {
        self.sections.iter().flat_map(|s| s.poles()).collect()
    }

    fn response_at(&self, theta: f64) -> Complex64 {
        let z_inv = Complex64::from_polar(1.0, -theta);
        self.sections
            .iter()
            .fold(Complex64::new(1.0, 0.0), |h, s| h * s.response(z_inv))
    }

    /// Single-pass magnitude `|H(exp(j 2 pi f / fs))|`.
    pub fn frequency_response(&self, freq_hz: f64) -> Result<f64> {
        frequency_response(self, freq_hz)
    }
}

/// Bilinear transform `z = (2 fs + s) / (2 fs - s)` followed by pairing of
/// conjugate poles into sections. Each section is scaled to unit magnitude at
/// the digital image of the analog center frequency.
pub fn discretize(analog: &AnalogBandPass, sampling_rate: f64) -> Result<DigitalFilter> {
    if !(sampling_rate.is_finite() && sampling_rate > 0.0) {
        return Err(Error::validation(format!(
            "sampling rate {sampling_rate} must be > 0"
        )));
    }
    analog.band.check_sampling_rate(sampling_rate)?;
    if let Some(p) = analog.poles.iter().find(|p| p.re >= 0.0) {
        return Err(Error::validation(format!(
            "analog pole {p} is not in the left half-plane"
        )));
    }
    let k = 2.0 * sampling_rate;
    let zpoles: Vec<Complex64> = analog.poles.iter().map(|&s| (k + s) / (k - s)).collect();

    let scale = zpoles.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let tol = 1e-10 * scale;
    let mut upper: Vec<Complex64> = zpoles.iter().copied().filter(|z| z.im > tol).collect();
    let mut real: Vec<f64> = zpoles
        .iter()
        .filter(|z| z.im.abs() <= tol)
        .map(|z| z.re)
        .collect();
    if 2 * upper.len() + real.len() != zpoles.len() || !real.len().is_multiple_of(2) {
        return Err(Error::Computation(
            "digital poles are not conjugate-symmetric".into(),
        ));
    }
    upper.sort_by(|a, b| {
        a.norm()
            .total_cmp(&b.norm())
            .then(a.arg().total_cmp(&b.arg()))
    });
    real.sort_by(f64::total_cmp);

    let mut denominators: Vec<[f64; 2]> =
        upper.iter().map(|z| [-2.0 * z.re, z.norm_sqr()]).collect();
    denominators.extend(real.chunks(2).map(|r| [-(r[0] + r[1]), r[0] * r[1]]));

    let theta0 = 2.0 * (analog.params.omega0() / k).atan();
    let z0_inv = Complex64::from_polar(1.0, -theta0);
    let sections: Vec<Biquad> = denominators
        .into_iter()
        .map(|a| {
            let raw = Biquad {
                b: [1.0, 0.0, -1.0],
                a,
            };
            let g = 1.0 / raw.response(z0_inv).norm();
            Biquad { b: [g, 0.0, -g], a }
        })
        .collect();

    if let Some(s) = sections.iter().find(|s| !s.is_stable()) {
        return Err(Error::Computation(format!("unstable section {:?}", s.a)));
    }
    Ok(DigitalFilter {
        design: FilterDesign {
            order: analog.order(),
            band: analog.band,
            sampling_rate,
            normalized_poles: analog.prototype_poles.clone(),
            analog_poles: analog.poles.clone(),
            band_parameters: analog.params,
        },
        sections,
    })
}

pub fn frequency_response(filter: &DigitalFilter, freq_hz: f64) -> Result<f64> {
    let nyquist = filter.sampling_rate() / 2.0;
    if !(0.0..=nyquist).contains(&freq_hz) {
        return Err(Error::validation(format!(
            "frequency {freq_hz} Hz outside [0, {nyquist}]"
        )));
    }
    Ok(filter
        .response_at(2.0 * PI * freq_hz / filter.sampling_rate())
        .norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ApplyMode {
    /// Forward-backward filtering with odd reflection padding.
    #[default]
    ZeroPhase,
    /// Single causal pass from zero state.
    Causal,
}

impl FromStr for ApplyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "zero-phase" | "zerophase" => Ok(ApplyMode::ZeroPhase),
            "causal" => Ok(ApplyMode::Causal),
            other => Err(Error::validation(format!("unknown filter mode {other:?}"))),
        }
    }
}

fn check_finite(signal: &[f64]) -> Result<()> {
    if let Some(i) = signal.iter().position(|v| !v.is_finite()) {
        return Err(Error::validation(format!(
            "non-finite input sample at index {i}"
        )));
    }
    Ok(())
}

fn run_cascade(sections: &[Biquad], data: &mut [f64], initial: Option<&[[f64; 2]]>) {
    // Sample-outer order lets consecutive sections overlap in the pipeline;
    // the arithmetic per section is unchanged.
    let mut state: Vec<[f64; 2]> = match initial {
        Some(init) => init.to_vec(),
        None => vec![[0.0, 0.0]; sections.len()],
    };
    for x in data.iter_mut() {
        let mut v = *x;
        for (s, st) in sections.iter().zip(state.iter_mut()) {
            let y = s.b[0] * v + st[0];
            st[0] = s.b[1] * v - s.a[0] * y + st[1];
            st[1] = s.b[2] * v - s.a[1] * y;
            v = y;
        }
        *x = v;
    }
}

/// Per-section steady-state initial conditions for a constant input `x0`.
fn initial_state(sections: &[Biquad], x0: f64) -> Vec<[f64; 2]> {
    let mut level = x0;
    sections
        .iter()
        .map(|s| {
            let [s1, s2] = s.steady_state();
            let st = [s1 * level, s2 * level];
            level *= s.dc_gain();
            st
        })
        .collect()
}

/// Padding length at each end: three times the number of filter taps
/// (`2 * sections + 1`), capped at `len - 1`.
pub fn padding_len(filter: &DigitalFilter, signal_len: usize) -> usize {
    (3 * (2 * filter.sections.len() + 1)).min(signal_len.saturating_sub(1))
}

/// Zero-phase forward-backward filtering. The output has the input's length.
pub fn apply(filter: &DigitalFilter, signal: &[f64]) -> Result<Vec<f64>> {
    check_finite(signal)?;
    let n = signal.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let pad = padding_len(filter, n);
    let mut ext = Vec::with_capacity(n + 2 * pad);
    let (first, last) = (signal[0], signal[n - 1]);
    ext.extend((1..=pad).rev().map(|i| 2.0 * first - signal[i]));
    ext.extend_from_slice(signal);
    ext.extend((1..=pad).map(|i| 2.0 * last - signal[n - 1 - i]));

    let init = initial_state(&filter.sections, ext[0]);
    run_cascade(&filter.sections, &mut ext, Some(&init));
    ext.reverse();
    let init = initial_state(&filter.sections, ext[0]);
    run_cascade(&filter.sections, &mut ext, Some(&init));
    ext.reverse();
    Ok(ext[pad..pad + n].to_vec())
}

/// Causal single-pass filtering from zero initial state.
pub fn apply_causal(filter: &DigitalFilter, signal: &[f64]) -> Result<Vec<f64>> {
    check_finite(signal)?;
    let mut out = signal.to_vec();
    run_cascade(&filter.sections, &mut out, None);
    Ok(out)
}

/// One designed filter per band, sharing order, sampling rate and mode.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    filters: Vec<DigitalFilter>,
    mode: ApplyMode,
}

impl FilterBank {
    pub fn design(
        bands: &[Band],
        order: usize,
        sampling_rate: f64,
        mode: ApplyMode,
    ) -> Result<Self> {
        if bands.is_empty() {
            return Err(Error::validation("filter bank needs at least one band"));
        }
        let filters = bands
            .iter()
            .map(|&b| DigitalFilter::design(order, b, sampling_rate))
            .collect::<Result<Vec<_>>>()?;
        Ok(FilterBank { filters, mode })
    }

    pub fn filters(&self) -> &[DigitalFilter] {
        &self.filters
    }

    pub fn mode(&self) -> ApplyMode {
        self.mode
    }

    pub fn sampling_rate(&self) -> f64 {
        self.filters[0].sampling_rate()
    }

    pub fn bands(&self) -> Vec<Band> {
        self.filters.iter().map(|f| *f.band()).collect()
    }

    pub fn filter(&self, band_index: usize, signal: &[f64]) -> Result<Vec<f64>> {
        let f = &self.filters[band_index];
        match self.mode {
            ApplyMode::ZeroPhase => apply(f, signal),
            ApplyMode::Causal => apply_causal(f, signal),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;
    use std::f64::consts::FRAC_1_SQRT_2;

    /// Durand-Kerner root finding for a monic polynomial given low-to-high coefficients.
    fn durand_kerner(coeffs: &[Complex64]) -> Vec<Complex64> {
        let deg = coeffs.len() - 1;
        let eval = |z: Complex64| {
            coeffs
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
        };
        let seed = Complex64::new(0.4, 0.9);
        let mut roots: Vec<Complex64> = (0..deg).map(|i| seed.powu(i as u32)).collect();
        for _ in 0..2000 {
            for i in 0..deg {
                let mut den = Complex64::new(1.0, 0.0);
                for j in 0..deg {
                    if i != j {
                        den *= roots[i] - roots[j];
                    }
                }
                let step = eval(roots[i]) / den;
                roots[i] -= step;
            }
        }
        roots
    }

    /// Left-half-plane roots of 1 + (-1)^N p^{2N} = 0.
    fn oracle_prototype(order: usize) -> Vec<Complex64> {
        let mut c = vec![Complex64::new(0.0, 0.0); 2 * order + 1];
        c[0] = Complex64::new(1.0, 0.0);
        c[2 * order] = Complex64::new(if order.is_multiple_of(2) { 1.0 } else { -1.0 }, 0.0);
        // make monic
        let lead = c[2 * order];
        let c: Vec<Complex64> = c.iter().map(|&x| x / lead).collect();
        durand_kerner(&c)
            .into_iter()
            .filter(|r| r.re < 0.0)
            .collect()
    }

    fn assert_same_set(mut a: Vec<Complex64>, mut b: Vec<Complex64>, tol: f64) {
        assert_eq!(a.len(), b.len());
        let key = |z: &Complex64| (z.im * 1e6).round() as i64;
        a.sort_by_key(key);
        b.sort_by_key(key);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < tol, "{x} vs {y}");
        }
    }

    #[test]
    fn prototype_matches_root_finding() {
        assert_same_set(
            design_lowpass_prototype(1).unwrap(),
            vec![Complex64::new(-1.0, 0.0)],
            1e-12,
        );
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_same_set(
            design_lowpass_prototype(2).unwrap(),
            vec![Complex64::new(-h, h), Complex64::new(-h, -h)],
            1e-12,
        );
        for order in [2, 3, 5, 8] {
            assert_same_set(
                design_lowpass_prototype(order).unwrap(),
                oracle_prototype(order),
                1e-8,
            );
        }
        assert!(design_lowpass_prototype(0).unwrap_err().is_validation());
    }

    #[test]
    fn order8_prototype_is_conjugate_symmetric_on_unit_circle() {
        let p = design_lowpass_prototype(8).unwrap();
        assert_eq!(p.len(), 8);
        for z in &p {
            assert!(z.re < 0.0);
            assert!((z.norm() - 1.0).abs() < 1e-15);
            assert!(p.iter().any(|w| (w - z.conj()).norm() < 1e-12));
        }
    }

    #[test]
    fn prototype_satisfies_squared_magnitude_law() {
        for order in [1, 4, 8] {
            let poles = design_lowpass_prototype(order).unwrap();
            let wc = 2.0 * PI * 10.0;
            for i in 0..200 {
                let w = i as f64 * 0.5;
                let p = Complex64::new(0.0, w / wc);
                let h = poles
                    .iter()
                    .fold(Complex64::new(1.0, 0.0), |h, &pk| h / (p - pk));
                let lhs = h.norm_sqr() * (1.0 + (w / wc).powi(2 * order as i32));
                assert!((lhs - 1.0).abs() < 1e-9, "order {order} w {w}: {lhs}");
            }
        }
    }

    #[test]
    fn first_order_bandpass_poles_solve_quadratic() {
        let proto = design_lowpass_prototype(1).unwrap();
        let band = Band::ALPHA;
        let a = bandpass_transform(&proto, &band).unwrap();
        let (wl, wu) = (2.0 * PI * band.low_hz, 2.0 * PI * band.high_hz);
        for s in &a.poles {
            let r = s * s + s * (wu - wl) + wl * wu;
            assert!(r.norm() < 1e-9 * wl * wu, "residual {r}");
        }
    }

    #[test]
    fn analog_center_gain_and_edges() {
        let proto = design_lowpass_prototype(8).unwrap();
        for band in Band::canonical() {
            let a = bandpass_transform(&proto, &band).unwrap();
            assert!((a.magnitude(a.params.omega0()) - 1.0).abs() < 1e-9);
            assert!(a.poles.iter().all(|p| p.re < 0.0));
        }
        let a = bandpass_transform(&proto, &Band::THETA).unwrap();
        assert!((a.magnitude(2.0 * PI * 4.0) - FRAC_1_SQRT_2).abs() < 1e-6);
        assert!((a.magnitude(2.0 * PI * 8.0) - FRAC_1_SQRT_2).abs() < 1e-6);
        let params = a.params;
        assert!((params.eta0_sq - params.eta_l * params.eta_u).abs() < 1e-15);
    }

    #[test]
    fn degenerate_band_rejected() {
        assert!(BandParameters::new(10.0, 10.0).unwrap_err().is_validation());
        let bad = Band {
            name: crate::model::BandName::Beta,
            low_hz: 13.0,
            high_hz: 13.0,
        };
        let proto = design_lowpass_prototype(2).unwrap();
        assert!(bandpass_transform(&proto, &bad).is_err());
    }

    #[test]
    fn digital_design_examples() {
        let theta = DigitalFilter::design(8, Band::THETA, 128.0).unwrap();
        assert_eq!(theta.sections().len(), 8);
        assert!((theta.frequency_response(6.0).unwrap() - 1.0).abs() < 0.02);
        for band in Band::canonical() {
            let f = DigitalFilter::design(8, band, 128.0).unwrap();
            assert!(f.poles().iter().all(|p| p.norm() < 1.0));
            assert!((f.frequency_response(band.center_hz()).unwrap() - 1.0).abs() < 0.01);
            assert!(f.frequency_response(0.0).unwrap() < 1e-9);
            assert!(f.frequency_response(64.0).unwrap() < 1e-9);
            for edge in [band.low_hz, band.high_hz] {
                assert!((f.frequency_response(edge).unwrap() - FRAC_1_SQRT_2).abs() < 1e-6);
            }
        }
        let gamma = DigitalFilter::design(8, Band::GAMMA, 128.0).unwrap();
        assert!(gamma.frequency_response(50.0).unwrap() < gamma.frequency_response(43.0).unwrap());
        assert!(theta.frequency_response(64.5).unwrap_err().is_validation());
        assert!(theta.frequency_response(-1.0).is_err());
    }

    #[test]
    fn band_at_or_above_nyquist_rejected() {
        let err = DigitalFilter::design(8, Band::GAMMA, 86.0).unwrap_err();
        assert!(err.is_validation());
    }

    #[test]
    fn passband_monotone_toward_edges() {
        for band in Band::canonical() {
            let f = DigitalFilter::design(8, band, 128.0).unwrap();
            let c = band.center_hz();
            let mag = |x: f64| f.frequency_response(x).unwrap();
            let mut prev = mag(c);
            let mut x = c + 1.0;
            while x <= band.high_hz {
                let m = mag(x);
                assert!(m <= prev + 1e-12, "{band} rising at {x}");
                prev = m;
                x += 1.0;
            }
            let mut prev = mag(c);
            let mut x = c - 1.0;
            while x >= band.low_hz {
                let m = mag(x);
                assert!(m <= prev + 1e-12, "{band} rising at {x}");
                prev = m;
                x -= 1.0;
            }
            let edge = mag(band.low_hz);
            assert!(mag(band.low_hz - 0.5) < edge);
            assert!(mag(band.high_hz + 0.5) < edge);
        }
    }

    fn sine(freq: f64, fs: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| (2.0 * PI * freq * i as f64 / fs).sin())
            .collect()
    }

    fn noise(seed: u64, n: usize) -> Vec<f64> {
        let mut s = Stream::new(seed);
        (0..n).map(|_| s.normal()).collect()
    }

    #[test]
    fn zero_in_zero_out() {
        let f = DigitalFilter::design(8, Band::BETA, 128.0).unwrap();
        assert!(apply(&f, &[0.0; 300]).unwrap().iter().all(|&v| v == 0.0));
        assert!(apply(&f, &[]).unwrap().is_empty());
        assert_eq!(apply(&f, &[1.5]).unwrap().len(), 1);
    }

    #[test]
    fn rejects_non_finite_input() {
        let f = DigitalFilter::design(8, Band::BETA, 128.0).unwrap();
        let mut x = vec![0.0; 100];
        x[7] = f64::INFINITY;
        assert!(apply(&f, &x).unwrap_err().is_validation());
        assert!(apply_causal(&f, &x).is_err());
    }

    #[test]
    fn forward_backward_is_linear() {
        let f = DigitalFilter::design(8, Band::ALPHA, 128.0).unwrap();
        let x = noise(1, 1500);
        let y = noise(2, 1500);
        let (a, b) = (2.5, -0.75);
        let combo: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
        let fx = apply(&f, &x).unwrap();
        let fy = apply(&f, &y).unwrap();
        let fc = apply(&f, &combo).unwrap();
        let scale = fc.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for i in 0..x.len() {
            let expect = a * fx[i] + b * fy[i];
            assert!((fc[i] - expect).abs() <= 1e-9 * scale, "index {i}");
        }
    }

    fn naive_dft(x: &[f64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .fold(Complex64::new(0.0, 0.0), |acc, (t, &v)| {
                        acc + Complex64::from_polar(v, -2.0 * PI * (k * t % n) as f64 / n as f64)
                    })
            })
            .collect()
    }

    fn naive_idft(x: &[Complex64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|t| {
                x.iter()
                    .enumerate()
                    .fold(Complex64::new(0.0, 0.0), |acc, (k, &v)| {
                        acc + v * Complex64::from_polar(
                            1.0,
                            2.0 * PI * (k * t % n) as f64 / n as f64,
                        )
                    })
                    .re
                    / n as f64
            })
            .collect()
    }

    fn rms(x: &[f64]) -> f64 {
        (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
    }

    #[test]
    fn sine_gain_matches_frequency_domain_oracle() {
        let fs = 128.0;
        let f = DigitalFilter::design(8, Band::THETA, fs).unwrap();
        let x = sine(6.0, fs, 1280);
        let y = apply(&f, &x).unwrap();

        // Oracle: multiply the spectrum by the squared single-pass magnitude.
        let n = x.len();
        let spec: Vec<Complex64> = naive_dft(&x)
            .into_iter()
            .enumerate()
            .map(|(k, v)| {
                let bin = k.min(n - k) as f64 * fs / n as f64;
                v * f.frequency_response(bin).unwrap().powi(2)
            })
            .collect();
        let oracle = naive_idft(&spec);

        let g2 = f.frequency_response(6.0).unwrap().powi(2);
        let ratio = rms(&y) / rms(&x);
        assert!((ratio - g2).abs() <= 0.05 * g2, "ratio {ratio} vs {g2}");
        let interior = 256..1024;
        let oracle_ratio = rms(&oracle[interior.clone()]) / rms(&x[interior.clone()]);
        let ours = rms(&y[interior.clone()]) / rms(&x[interior]);
        assert!((ours - oracle_ratio).abs() <= 0.05 * oracle_ratio);
    }

    #[test]
    fn forward_backward_has_zero_phase() {
        let fs = 128.0;
        for band in Band::canonical() {
            let f = DigitalFilter::design(8, band, fs).unwrap();
            let x = sine(band.center_hz(), fs, 2048);
            let y = apply(&f, &x).unwrap();
            let xcorr = |lag: i64| -> f64 {
                (512..1536)
                    .map(|i| y[i] * x[(i as i64 + lag) as usize])
                    .sum()
            };
            let best = (-20..=20)
                .max_by(|&a, &b| xcorr(a).total_cmp(&xcorr(b)))
                .unwrap();
            assert_eq!(best, 0, "{band}");
        }
    }

    #[test]
    fn shift_equivariant_in_interior() {
        let f = DigitalFilter::design(8, Band::THETA, 128.0).unwrap();
        let x = noise(11, 4000);
        let k = 37;
        let y = apply(&f, &x).unwrap();
        let ys = apply(&f, &x[k..]).unwrap();
        for i in 1200..2700 {
            assert!((y[i + k] - ys[i]).abs() < 1e-6, "index {i}");
        }
    }

    #[test]
    fn causal_mode_matches_single_pass_gain() {
        let fs = 128.0;
        let f = DigitalFilter::design(8, Band::BETA, fs).unwrap();
        let x = sine(20.0, fs, 4096);
        let y = apply_causal(&f, &x).unwrap();
        let g = f.frequency_response(20.0).unwrap();
        let ratio = rms(&y[2048..]) / rms(&x[2048..]);
        assert!((ratio - g).abs() < 0.02 * g);
    }

    #[test]
    fn output_finite_for_extreme_finite_input() {
        let f = DigitalFilter::design(8, Band::GAMMA, 128.0).unwrap();
        let mut x = noise(5, 1000);
        x[500] = 1e12;
        assert!(apply(&f, &x).unwrap().iter().all(|v| v.is_finite()));
    }
}
