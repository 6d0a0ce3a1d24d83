//! EMG pre-processing: Butterworth band-pass and mains notch as cascaded
//! second-order sections, sliding-window RMS envelopes, and assembly of
//! regression datasets from recordings.

use alloc::{format, string::String, vec, vec::Vec};
use core::f64::consts::PI;

use crate::{Dataset, Error, Matrix, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub name: String,
    pub samples: Vec<f64>,
}

impl Channel {
    pub fn new(name: impl Into<String>, samples: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            samples,
        }
    }
}

/// Multichannel recording: EMG channels plus force channels, all sampled
/// together at one rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    sample_rate_hz: f64,
    emg: Vec<Channel>,
    force: Vec<Channel>,
}

impl Recording {
    pub fn new(sample_rate_hz: f64, emg: Vec<Channel>, force: Vec<Channel>) -> Result<Self> {
        if !(sample_rate_hz > 0.0 && sample_rate_hz.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        let len = emg.first().or(force.first()).map_or(0, |c| c.samples.len());
        for c in emg.iter().chain(&force) {
            if c.samples.len() != len {
                return Err(Error::DimensionMismatch {
                    context: "channel length",
                    expected: len,
                    found: c.samples.len(),
                });
            }
            if let Some(i) = c.samples.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("channel {} sample {i}", c.name)));
            }
        }
        Ok(Self {
            sample_rate_hz,
            emg,
            force,
        })
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn emg(&self) -> &[Channel] {
        &self.emg
    }

    pub fn force(&self) -> &[Channel] {
        &self.force
    }

    pub fn len(&self) -> usize {
        self.emg
            .first()
            .or(self.force.first())
            .map_or(0, |c| c.samples.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Applies `f` to every EMG channel, leaving force channels untouched.
    pub fn map_emg<F>(&self, mut f: F) -> Result<Recording>
    where
        F: FnMut(&[f64]) -> Result<Vec<f64>>,
    {
        let emg = self
            .emg
            .iter()
            .map(|c| Ok(Channel::new(c.name.clone(), f(&c.samples)?)))
            .collect::<Result<Vec<_>>>()?;
        Recording::new(self.sample_rate_hz, emg, self.force.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterSpec {
    pub highpass_hz: f64,
    pub lowpass_hz: f64,
    pub notch_hz: f64,
    pub notch_q: f64,
    pub butterworth_order: usize,
    pub zero_phase: bool,
}

impl Default for FilterSpec {
    fn default() -> Self {
        Self {
            highpass_hz: 10.0,
            lowpass_hz: 450.0,
            notch_hz: 50.0,
            notch_q: 30.0,
            butterworth_order: 4,
            zero_phase: true,
        }
    }
}

impl FilterSpec {
    pub fn validate(&self, sample_rate_hz: f64) -> Result<()> {
        let nyquist = sample_rate_hz / 2.0;
        if !(self.highpass_hz > 0.0 && self.highpass_hz < self.lowpass_hz) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < highpass ({}) < lowpass ({})",
                self.highpass_hz, self.lowpass_hz
            )));
        }
        if self.lowpass_hz >= nyquist {
            return Err(Error::InvalidParameter(format!(
                "lowpass {} Hz is not below the Nyquist frequency {nyquist} Hz",
                self.lowpass_hz
            )));
        }
        if !(self.notch_hz > self.highpass_hz && self.notch_hz < self.lowpass_hz) {
            return Err(Error::InvalidParameter(format!(
                "notch {} Hz lies outside the pass band",
                self.notch_hz
            )));
        }
        if self.notch_q.is_nan() || self.notch_q <= 0.0 {
            return Err(Error::InvalidParameter("notch_q must be positive".into()));
        }
        if self.butterworth_order == 0 {
            return Err(Error::InvalidParameter(
                "butterworth_order must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Normalized biquad `y = b0 x + b1 x₋₁ + b2 x₋₂ − a1 y₋₁ − a2 y₋₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl Biquad {
    /// Frequency response magnitude at `freq_hz`.
    pub fn gain(&self, freq_hz: f64, sample_rate_hz: f64) -> f64 {
        let w = 2.0 * PI * freq_hz / sample_rate_hz;
        let (c1, s1) = (libm::cos(w), libm::sin(w));
        let (c2, s2) = (libm::cos(2.0 * w), libm::sin(2.0 * w));
        let num_re = self.b[0] + self.b[1] * c1 + self.b[2] * c2;
        let num_im = -(self.b[1] * s1 + self.b[2] * s2);
        let den_re = 1.0 + self.a[0] * c1 + self.a[1] * c2;
        let den_im = -(self.a[0] * s1 + self.a[1] * s2);
        libm::sqrt((num_re * num_re + num_im * num_im) / (den_re * den_re + den_im * den_im))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    Lowpass,
    Highpass,
}

/// Cascade of second-order sections, applied in order.
#[derive(Debug, Clone, PartialEq)]
pub struct Sos {
    pub sections: Vec<Biquad>,
}

impl Sos {
    /// Digital Butterworth via the bilinear transform with prewarping.
    pub fn butterworth(
        order: usize,
        band: Band,
        cutoff_hz: f64,
        sample_rate_hz: f64,
    ) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidParameter(
                "filter order must be at least 1".into(),
            ));
        }
        if !(cutoff_hz > 0.0 && cutoff_hz < sample_rate_hz / 2.0) {
            return Err(Error::InvalidParameter(format!(
                "cutoff {cutoff_hz} Hz must lie in (0, Nyquist)"
            )));
        }
        let k = libm::tan(PI * cutoff_hz / sample_rate_hz);
        let mut sections = Vec::with_capacity(order.div_ceil(2));
        for i in 0..order / 2 {
            // conjugate pole pair of the analog prototype
            let theta = PI * (2 * i + 1) as f64 / (2 * order) as f64;
            let q = 1.0 / (2.0 * libm::sin(theta));
            let norm = 1.0 / (1.0 + k / q + k * k);
            let a = [2.0 * (k * k - 1.0) * norm, (1.0 - k / q + k * k) * norm];
            let b = match band {
                Band::Lowpass => {
                    let b0 = k * k * norm;
                    [b0, 2.0 * b0, b0]
                }
                Band::Highpass => [norm, -2.0 * norm, norm],
            };
            sections.push(Biquad { b, a });
        }
        if order % 2 == 1 {
            let norm = 1.0 / (1.0 + k);
            let a = [(k - 1.0) * norm, 0.0];
            let b = match band {
                Band::Lowpass => [k * norm, k * norm, 0.0],
                Band::Highpass => [norm, -norm, 0.0],
            };
            sections.push(Biquad { b, a });
        }
        Ok(Self { sections })
    }

    /// Second-order notch at `freq_hz` with quality factor `q`.
    pub fn notch(freq_hz: f64, q: f64, sample_rate_hz: f64) -> Result<Self> {
        if !(freq_hz > 0.0 && freq_hz < sample_rate_hz / 2.0 && q > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "notch at {freq_hz} Hz (q = {q}) is not realizable at {sample_rate_hz} Hz"
            )));
        }
        let w0 = 2.0 * PI * freq_hz / sample_rate_hz;
        let alpha = libm::sin(w0) / (2.0 * q);
        let cw = libm::cos(w0);
        let a0 = 1.0 + alpha;
        Ok(Self {
            sections: vec![Biquad {
                b: [1.0 / a0, -2.0 * cw / a0, 1.0 / a0],
                a: [-2.0 * cw / a0, (1.0 - alpha) / a0],
            }],
        })
    }

    pub fn gain(&self, freq_hz: f64, sample_rate_hz: f64) -> f64 {
        self.sections
            .iter()
            .map(|s| s.gain(freq_hz, sample_rate_hz))
            .product()
    }

    /// Causal filtering from a zero initial state (direct form II transposed).
    pub fn filter(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        for s in &self.sections {
            let (mut z1, mut z2) = (0.0, 0.0);
            for v in y.iter_mut() {
                let input = *v;
                let out = s.b[0] * input + z1;
                z1 = s.b[1] * input - s.a[0] * out + z2;
                z2 = s.b[2] * input - s.a[1] * out;
                *v = out;
            }
        }
        y
    }

    /// Forward-backward filtering. The signal is padded at both ends by an
    /// odd reflection to damp start-up transients.
    pub fn filtfilt(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        if n == 0 {
            return Vec::new();
        }
        let pad = (3 * (2 * self.sections.len() + 1)).min(n - 1);
        let mut ext = Vec::with_capacity(n + 2 * pad);
        ext.extend((1..=pad).rev().map(|i| 2.0 * x[0] - x[i]));
        ext.extend_from_slice(x);
        ext.extend((1..=pad).map(|i| 2.0 * x[n - 1] - x[n - 1 - i]));
        let mut y = self.filter(&ext);
        y.reverse();
        let mut y = self.filter(&y);
        y.reverse();
        y[pad..pad + n].to_vec()
    }

    pub fn apply(&self, x: &[f64], zero_phase: bool) -> Vec<f64> {
        if zero_phase {
            self.filtfilt(x)
        } else {
            self.filter(x)
        }
    }
}

/// High-pass, low-pass, then notch on one channel.
pub fn filter_channel(x: &[f64], spec: &FilterSpec, sample_rate_hz: f64) -> Result<Vec<f64>> {
    spec.validate(sample_rate_hz)?;
    let hp = Sos::butterworth(
        spec.butterworth_order,
        Band::Highpass,
        spec.highpass_hz,
        sample_rate_hz,
    )?;
    let lp = Sos::butterworth(
        spec.butterworth_order,
        Band::Lowpass,
        spec.lowpass_hz,
        sample_rate_hz,
    )?;
    let notch = Sos::notch(spec.notch_hz, spec.notch_q, sample_rate_hz)?;
    let y = hp.apply(x, spec.zero_phase);
    let y = lp.apply(&y, spec.zero_phase);
    Ok(notch.apply(&y, spec.zero_phase))
}

/// Filters every EMG channel of `rec`; force channels pass through.
pub fn filter_chain(rec: &Recording, spec: &FilterSpec) -> Result<Recording> {
    spec.validate(rec.sample_rate_hz)?;
    rec.map_emg(|x| filter_channel(x, spec, rec.sample_rate_hz))
}

/// Odd window length for a `window_ms` window at `sample_rate_hz`.
pub fn envelope_window(window_ms: f64, sample_rate_hz: f64) -> Result<usize> {
    let w = libm::round(window_ms * sample_rate_hz / 1000.0);
    if !(w >= 1.0 && w.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "a {window_ms} ms window spans no samples at {sample_rate_hz} Hz"
        )));
    }
    let w = w as usize;
    Ok(if w.is_multiple_of(2) { w + 1 } else { w })
}

/// Centered sliding-window RMS. Near the edges the window shrinks to the
/// samples that exist, so the output has the input's length.
pub fn rms_envelope(x: &[f64], window_ms: f64, sample_rate_hz: f64) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(Error::Empty("envelope input"));
    }
    let half = envelope_window(window_ms, sample_rate_hz)? / 2;
    let mut prefix = Vec::with_capacity(x.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for v in x {
        acc += v * v;
        prefix.push(acc);
    }
    let n = x.len();
    Ok((0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            let ss = (prefix[hi] - prefix[lo]).max(0.0);
            libm::sqrt(ss / (hi - lo) as f64)
        })
        .collect())
}

/// RMS envelope of every EMG channel.
pub fn envelopes(rec: &Recording, window_ms: f64) -> Result<Recording> {
    rec.map_emg(|x| rms_envelope(x, window_ms, rec.sample_rate_hz))
}

/// Every `decimation`-th sample becomes a row `[1, emg…] → [force…]`.
pub fn build_dataset(rec: &Recording, decimation: usize) -> Result<Dataset> {
    if decimation == 0 {
        return Err(Error::InvalidParameter(
            "decimation must be at least 1".into(),
        ));
    }
    if rec.emg.is_empty() {
        return Err(Error::Empty("EMG channels"));
    }
    let rows: Vec<usize> = (0..rec.len()).step_by(decimation).collect();
    let mut features = Matrix::zeros(rows.len(), rec.emg.len() + 1);
    let mut targets = Matrix::zeros(rows.len(), rec.force.len());
    for (r, &t) in rows.iter().enumerate() {
        let f = features.row_mut(r);
        f[0] = 1.0;
        for (dst, c) in f[1..].iter_mut().zip(&rec.emg) {
            *dst = c.samples[t];
        }
        for (dst, c) in targets.row_mut(r).iter_mut().zip(&rec.force) {
            *dst = c.samples[t];
        }
    }
    Dataset::with_names(
        features,
        targets,
        rec.emg.iter().map(|c| c.name.clone()).collect(),
        rec.force.iter().map(|c| c.name.clone()).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(freq: f64, fs: f64, seconds: f64) -> Vec<f64> {
        let n = (fs * seconds) as usize;
        (0..n)
            .map(|i| libm::sin(2.0 * PI * freq * i as f64 / fs))
            .collect()
    }

    #[test]
    fn butterworth_half_power_at_cutoff() {
        for order in 1..=6 {
            for band in [Band::Lowpass, Band::Highpass] {
                let s = Sos::butterworth(order, band, 100.0, 1000.0).unwrap();
                let g = s.gain(100.0, 1000.0);
                assert!(
                    (g - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12,
                    "{order} {band:?}: {g}"
                );
            }
        }
        let lp = Sos::butterworth(4, Band::Lowpass, 100.0, 1000.0).unwrap();
        assert!((lp.gain(0.0, 1000.0) - 1.0).abs() < 1e-12);
        let hp = Sos::butterworth(4, Band::Highpass, 100.0, 1000.0).unwrap();
        assert!(hp.gain(0.0, 1000.0) < 1e-12);
    }

    #[test]
    fn notch_gain_is_zero_at_center() {
        let n = Sos::notch(50.0, 30.0, 2048.0).unwrap();
        assert!(n.gain(50.0, 2048.0) < 1e-12);
        assert!((n.gain(100.0, 2048.0) - 1.0).abs() < 0.01);
    }

    #[test]
    fn invalid_specs() {
        let spec = FilterSpec::default();
        assert!(spec.validate(2000.0).is_ok());
        assert!(spec.validate(900.0).is_err());
        let bad = FilterSpec {
            highpass_hz: 500.0,
            ..FilterSpec::default()
        };
        assert!(bad.validate(2000.0).is_err());
        assert!(Sos::butterworth(4, Band::Lowpass, 600.0, 1000.0).is_err());
    }

    #[test]
    fn zero_signal_stays_zero() {
        let rec = Recording::new(
            2000.0,
            vec![Channel::new("a", vec![0.0; 500])],
            vec![Channel::new("f", vec![1.0; 500])],
        )
        .unwrap();
        let out = filter_chain(&rec, &FilterSpec::default()).unwrap();
        assert!(out.emg()[0].samples.iter().all(|&v| v == 0.0));
        assert_eq!(out.force(), rec.force());
    }

    #[test]
    fn causal_filter_also_attenuates_notch_tone() {
        let fs = 2000.0;
        let x = tone(50.0, fs, 4.0);
        let spec = FilterSpec {
            zero_phase: false,
            ..FilterSpec::default()
        };
        let y = filter_channel(&x, &spec, fs).unwrap();
        let tail = &y[y.len() / 2..];
        let rms = libm::sqrt(tail.iter().map(|v| v * v).sum::<f64>() / tail.len() as f64);
        assert!(rms < 0.1 * core::f64::consts::FRAC_1_SQRT_2);
    }

    #[test]
    fn envelope_examples() {
        let c = rms_envelope(&[-2.5; 40], 250.0, 40.0).unwrap();
        assert!(c.iter().all(|v| (v - 2.5).abs() < 1e-12));

        // window = round(250 ms · 20 Hz) = 5 samples; impulse at the center
        let mut x = vec![0.0; 21];
        x[10] = 3.0;
        let e = rms_envelope(&x, 250.0, 20.0).unwrap();
        assert!((e[10] - libm::sqrt(9.0 / 5.0)).abs() < 1e-12);
        assert_eq!(e[7], 0.0);
        assert_eq!(e.len(), x.len());

        assert_eq!(envelope_window(250.0, 1000.0).unwrap(), 251);
        assert_eq!(envelope_window(250.0, 10240.0).unwrap(), 2561);
        assert_eq!(envelope_window(100.0, 20.0).unwrap(), 3);
        assert!(rms_envelope(&[], 250.0, 1000.0).is_err());
        assert!(rms_envelope(&[1.0], 1.0, 100.0).is_err());
    }

    #[test]
    fn envelope_edges_shrink() {
        let x = [1.0, 2.0, 3.0, 4.0];
        // window 3: edge windows have two samples
        let e = rms_envelope(&x, 3.0, 1000.0).unwrap();
        assert!((e[0] - libm::sqrt((1.0 + 4.0) / 2.0)).abs() < 1e-12);
        assert!((e[1] - libm::sqrt((1.0 + 4.0 + 9.0) / 3.0)).abs() < 1e-12);
        assert!((e[3] - libm::sqrt((9.0 + 16.0) / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn dataset_assembly() {
        let emg: Vec<Channel> = (0..6)
            .map(|c| {
                Channel::new(
                    format!("m{c}"),
                    (0..10).map(|i| (i * 10 + c) as f64).collect(),
                )
            })
            .collect();
        let force = vec![Channel::new("f", (0..10).map(|i| i as f64).collect())];
        let rec = Recording::new(100.0, emg, force).unwrap();
        let d = build_dataset(&rec, 1).unwrap();
        assert_eq!(d.len(), 10);
        assert_eq!(d.features().cols(), 7);
        assert!(d.features().column(0).iter().all(|&v| v == 1.0));
        let d = build_dataset(&rec, 3).unwrap();
        assert_eq!(d.len(), 4);
        for r in 0..d.len() {
            assert_eq!(d.targets()[(r, 0)], (3 * r) as f64);
            assert_eq!(d.features()[(r, 1)], (30 * r) as f64);
        }
        assert!(build_dataset(&rec, 0).is_err());
    }

    #[test]
    fn ragged_recording_rejected() {
        let r = Recording::new(
            10.0,
            vec![Channel::new("a", vec![0.0; 3])],
            vec![Channel::new("f", vec![0.0; 2])],
        );
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
        let r = Recording::new(10.0, vec![Channel::new("a", vec![f64::NAN])], vec![]);
        assert!(matches!(r, Err(Error::NonFinite(_))));
    }
}
