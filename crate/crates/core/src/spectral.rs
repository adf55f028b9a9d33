//! Magnitude spectra of uniformly sampled series and peak extraction.
//!
//! Frequencies are in cycles per unit time (ω/2π).

use std::f64::consts::PI;

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Relative tolerance on sample spacing when building a series from times.
const UNIFORM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sample spacing must be positive, got {dt}"
            )));
        }
        if values.len() < 2 {
            return Err(Error::InvalidParameter(
                "a time series needs at least two samples".into(),
            ));
        }
        Ok(TimeSeries { t0, dt, values })
    }

    /// Builds a series from explicit sample times, which must be uniform.
    pub fn from_samples(times: &[f64], values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                found: values.len(),
            });
        }
        if times.len() < 2 {
            return Err(Error::InvalidParameter(
                "a time series needs at least two samples".into(),
            ));
        }
        let span = times[times.len() - 1] - times[0];
        let dt = span / (times.len() - 1) as f64;
        for (k, t) in times.iter().enumerate() {
            let expected = times[0] + k as f64 * dt;
            if (t - expected).abs() > UNIFORM_TOL * span.abs().max(dt) {
                return Err(Error::NonUniformSampling);
            }
        }
        TimeSeries::new(times[0], dt, values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.t0 + k as f64 * self.dt).collect()
    }

    /// Every `factor`-th sample, starting with the first.
    pub fn decimate(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::InvalidParameter("decimation factor must be positive".into()));
        }
        let values = self.values.iter().step_by(factor).copied().collect();
        TimeSeries::new(self.t0, self.dt * factor as f64, values)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Window {
    #[default]
    None,
    Hann,
}

impl std::str::FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(Window::None),
            "hann" => Ok(Window::Hann),
            other => Err(Error::Config(format!("unknown window '{other}'"))),
        }
    }
}

impl Window {
    fn weights(self, n: usize) -> Vec<f64> {
        match self {
            Window::None => vec![1.0; n],
            // periodic form so that integer-period signals stay leak-free
            Window::Hann => (0..n)
                .map(|k| 0.5 - 0.5 * (2.0 * PI * k as f64 / n as f64).cos())
                .collect(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Window::None => "none",
            Window::Hann => "hann",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub frequencies: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub bin_width: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak {
    pub frequency: f64,
    pub amplitude: f64,
    pub bin: usize,
}

/// Unnormalized forward DFT, X_j = Σ_k x_k e^{−2πijk/N}.
pub fn dft_complex(values: &[Complex<f64>]) -> Vec<Complex<f64>> {
    let mut buf = values.to_vec();
    if !buf.is_empty() {
        FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    }
    buf
}

/// |DFT| from zero frequency up to Nyquist.
pub fn dft(series: &TimeSeries, window: Window, zero_pad_factor: usize) -> Result<Spectrum> {
    if zero_pad_factor == 0 {
        return Err(Error::InvalidParameter("zero_pad_factor must be at least 1".into()));
    }
    let n = series.len();
    let total = n * zero_pad_factor;
    let w = window.weights(n);
    let mut buf: Vec<Complex<f64>> = series
        .values
        .iter()
        .zip(&w)
        .map(|(x, wk)| Complex::new(x * wk, 0.0))
        .collect();
    buf.resize(total, Complex::new(0.0, 0.0));
    let out = dft_complex(&buf);
    let bin_width = 1.0 / (total as f64 * series.dt);
    let half = total / 2;
    Ok(Spectrum {
        frequencies: (0..=half).map(|j| j as f64 * bin_width).collect(),
        amplitudes: out[..=half].iter().map(|z| z.norm()).collect(),
        bin_width,
    })
}

/// Local maxima at or above `min_relative_amplitude` times the largest
/// amplitude, refined by a parabola through the three bins around each
/// maximum, strongest first.
pub fn find_peaks(spectrum: &Spectrum, min_relative_amplitude: f64) -> Vec<Peak> {
    let a = &spectrum.amplitudes;
    let n = a.len();
    if n == 0 {
        return Vec::new();
    }
    let top = a.iter().copied().fold(0.0, f64::max);
    let threshold = min_relative_amplitude * top;
    let mut peaks = Vec::new();
    for j in 0..n {
        let left = if j > 0 { a[j - 1] } else { f64::NEG_INFINITY };
        let right = if j + 1 < n { a[j + 1] } else { f64::NEG_INFINITY };
        if !(a[j] > left && a[j] >= right && a[j] >= threshold && a[j] > 0.0) {
            continue;
        }
        let (offset, amplitude) = if j > 0 && j + 1 < n {
            let denom = left - 2.0 * a[j] + right;
            if denom < 0.0 {
                let p = 0.5 * (left - right) / denom;
                (p, a[j] - 0.25 * (left - right) * p)
            } else {
                (0.0, a[j])
            }
        } else {
            (0.0, a[j])
        };
        peaks.push(Peak {
            frequency: (j as f64 + offset) * spectrum.bin_width,
            amplitude,
            bin: j,
        });
    }
    peaks.sort_by(|x, y| {
        y.amplitude
            .total_cmp(&x.amplitude)
            .then(x.frequency.total_cmp(&y.frequency))
    });
    peaks
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(n: usize, dt: f64, f: f64, phase: f64) -> Vec<f64> {
        (0..n).map(|k| (2.0 * PI * f * k as f64 * dt + phase).cos()).collect()
    }

    #[test]
    fn integer_period_cosine() {
        let (n, dt) = (512, 0.1);
        let f0 = 24.0 / (n as f64 * dt);
        let s = dft(
            &TimeSeries::new(0.0, dt, tone(n, dt, f0, 0.3)).unwrap(),
            Window::None,
            1,
        )
        .unwrap();
        let peak = s.amplitudes[24];
        assert!((peak - n as f64 / 2.0).abs() < 1e-9);
        for (j, a) in s.amplitudes.iter().enumerate() {
            if j != 24 {
                assert!(*a < 1e-10 * peak, "bin {j}: {a}");
            }
        }
    }

    #[test]
    fn constant_series() {
        let s = dft(&TimeSeries::new(0.0, 1.0, vec![2.5; 64]).unwrap(), Window::None, 1).unwrap();
        assert!((s.amplitudes[0] - 160.0).abs() < 1e-12);
        assert!(s.amplitudes[1..].iter().all(|a| *a < 1e-12));
    }

    #[test]
    fn parseval() {
        let x: Vec<f64> = (0..300)
            .map(|k| ((k * k) as f64 * 0.37).sin() + 0.1 * k as f64)
            .collect();
        let xc: Vec<Complex<f64>> = x.iter().map(|v| Complex::new(*v, 0.0)).collect();
        let big: f64 = dft_complex(&xc).iter().map(|z| z.norm_sqr()).sum::<f64>() / x.len() as f64;
        let small: f64 = x.iter().map(|v| v * v).sum();
        assert!((big - small).abs() < 1e-10 * small);
    }

    #[test]
    fn two_tones_found_within_half_a_bin() {
        let (n, dt) = (1000, 0.01);
        let (f1, f2) = (7.3, 19.85);
        let x: Vec<f64> = tone(n, dt, f1, 0.0)
            .iter()
            .zip(tone(n, dt, f2, 1.0))
            .map(|(a, b)| a + 0.6 * b)
            .collect();
        let s = dft(&TimeSeries::new(0.0, dt, x).unwrap(), Window::Hann, 1).unwrap();
        let peaks = find_peaks(&s, 0.1);
        assert_eq!(peaks.len(), 2);
        assert!((peaks[0].frequency - f1).abs() < 0.5 * s.bin_width);
        assert!((peaks[1].frequency - f2).abs() < 0.5 * s.bin_width);
    }

    #[test]
    fn refinement_on_bin_centred_tone_with_noise() {
        let (n, dt) = (256, 1.0);
        let f0 = 40.0 / n as f64;
        let x: Vec<f64> = tone(n, dt, f0, 0.0)
            .iter()
            .enumerate()
            .map(|(k, v)| v + 1e-6 * ((k as f64) * 12.9898).sin())
            .collect();
        let s = dft(&TimeSeries::new(0.0, dt, x).unwrap(), Window::None, 1).unwrap();
        let p = find_peaks(&s, 0.5)[0];
        assert!((p.frequency - f0).abs() < 1e-3 * s.bin_width);
    }

    #[test]
    fn non_uniform_sampling_rejected() {
        let times = [0.0, 1.0, 2.1, 3.0];
        assert!(matches!(
            TimeSeries::from_samples(&times, vec![0.0; 4]),
            Err(Error::NonUniformSampling)
        ));
        let ok = TimeSeries::from_samples(&[0.5, 1.0, 1.5], vec![1.0, 2.0, 3.0]).unwrap();
        assert!((ok.dt - 0.5).abs() < 1e-15);
    }

    #[test]
    fn decimation() {
        let s = TimeSeries::new(1.0, 0.5, (0..10).map(|k| k as f64).collect()).unwrap();
        let d = s.decimate(3).unwrap();
        assert_eq!(d.values, vec![0.0, 3.0, 6.0, 9.0]);
        assert_eq!(d.dt, 1.5);
    }
}
