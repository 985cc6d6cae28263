//! Audio feature frontend: WAV -> non-overlapping Hann STFT windows -> 29
//! per-window features (5 timbral, 12 MFCC, 12 chroma) -> sliding blocks of
//! 150 windows summarized by per-feature mean and std plus a low-energy
//! measure (59 dimensions) -> per-dimension std normalization -> PointCloud.

use std::path::Path;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::geometry::PointCloud;

pub const DEFAULT_WINDOW: usize = 2048;
pub const DEFAULT_BLOCK_LEN: usize = 150;
pub const DEFAULT_BLOCK_HOP: usize = 1;
pub const WINDOW_FEATURES: usize = 29;
pub const BLOCK_FEATURES: usize = 59;
const NUM_MEL_BANDS: usize = 26;
const NUM_MFCC: usize = 12;
const NUM_CHROMA: usize = 12;
const LOG_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct WavAudio {
    /// Mono samples in [-1, 1].
    pub samples: Vec<f64>,
    /// Samples per second.
    pub rate: u32,
}

impl WavAudio {
    pub fn new(samples: Vec<f64>, rate: u32) -> Result<Self> {
        if rate == 0 {
            return Err(Error::input("sample rate must be positive"));
        }
        Ok(WavAudio { samples, rate })
    }

    /// Load a RIFF WAV file: 16-bit PCM or 32-bit IEEE float, any channel
    /// count (channels are downmixed by their mean).
    pub fn load(path: &Path) -> Result<Self> {
        let reader = hound::WavReader::open(path)?;
        let spec = reader.spec();
        let channels = spec.channels as usize;
        if channels == 0 {
            return Err(Error::input("wav has zero channels"));
        }
        let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
            (hound::SampleFormat::Int, 16) => reader
                .into_samples::<i16>()
                .map(|s| s.map(|v| f64::from(v) / 32768.0))
                .collect::<std::result::Result<_, _>>()?,
            (hound::SampleFormat::Float, 32) => reader
                .into_samples::<f32>()
                .map(|s| s.map(f64::from))
                .collect::<std::result::Result<_, _>>()?,
            (fmt, bits) => {
                return Err(Error::Unsupported(format!(
                    "unsupported wav format: {bits}-bit {fmt:?} (use 16-bit PCM or 32-bit float)"
                )))
            }
        };
        let samples = interleaved
            .chunks_exact(channels)
            .map(|frame| frame.iter().sum::<f64>() / channels as f64)
            .collect();
        WavAudio::new(samples, spec.sample_rate)
    }
}

/// Split into non-overlapping windows of `window` samples (trailing partial
/// window dropped) and return the Hann-windowed magnitude spectrum of each,
/// of length window/2 + 1.
pub fn stft_frames(audio: &WavAudio, window: usize) -> Result<Vec<Vec<f64>>> {
    check_window(audio, window)?;
    let fft = FftPlanner::new().plan_fft_forward(window);
    let hann = hann_window(window);
    Ok(audio
        .samples
        .chunks_exact(window)
        .map(|chunk| magnitude_spectrum(chunk, &hann, &fft))
        .collect())
}

fn check_window(audio: &WavAudio, window: usize) -> Result<()> {
    if window < 2 || !window.is_power_of_two() {
        return Err(Error::input("window size must be a power of two >= 2"));
    }
    if audio.samples.len() < window {
        return Err(Error::input(format!(
            "audio has {} samples, shorter than one window of {}",
            audio.samples.len(),
            window
        )));
    }
    Ok(())
}

fn hann_window(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let x = std::f64::consts::PI * i as f64 / n as f64;
            x.sin() * x.sin()
        })
        .collect()
}

fn magnitude_spectrum(chunk: &[f64], hann: &[f64], fft: &Arc<dyn Fft<f64>>) -> Vec<f64> {
    let mut buf: Vec<Complex<f64>> = chunk
        .iter()
        .zip(hann)
        .map(|(&s, &w)| Complex::new(s * w, 0.0))
        .collect();
    fft.process(&mut buf);
    buf[..chunk.len() / 2 + 1].iter().map(|c| c.norm()).collect()
}

/// The 29 per-window features: [centroid, rolloff(85%), flux, ZCR, RMS,
/// MFCC 1-12, chroma 1-12]. `prev_frame` is the previous magnitude spectrum
/// (flux is zero for the first frame); `time_window` is the raw un-windowed
/// sample chunk the frame came from.
pub fn window_features(
    frame: &[f64],
    prev_frame: Option<&[f64]>,
    time_window: &[f64],
    rate: u32,
) -> Vec<f64> {
    let mut out = Vec::with_capacity(WINDOW_FEATURES);
    out.push(spectral_centroid(frame, rate));
    out.push(spectral_rolloff(frame, rate, 0.85));
    out.push(match prev_frame {
        Some(prev) => spectral_flux(frame, prev),
        None => 0.0,
    });
    out.push(zero_crossing_rate(time_window));
    out.push(rms(time_window));
    out.extend(mfcc(frame, rate));
    out.extend(chroma(frame, rate));
    debug_assert_eq!(out.len(), WINDOW_FEATURES);
    out
}

fn bin_freq(bin: usize, n_bins: usize, rate: u32) -> f64 {
    // n_bins = window/2 + 1, so the last bin sits at the Nyquist frequency
    bin as f64 * f64::from(rate) / (2.0 * (n_bins - 1) as f64)
}

fn spectral_centroid(frame: &[f64], rate: u32) -> f64 {
    let total: f64 = frame.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    frame
        .iter()
        .enumerate()
        .map(|(k, &m)| bin_freq(k, frame.len(), rate) * m)
        .sum::<f64>()
        / total
}

fn spectral_rolloff(frame: &[f64], rate: u32, fraction: f64) -> f64 {
    let total: f64 = frame.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let mut acc = 0.0;
    for (k, &m) in frame.iter().enumerate() {
        acc += m;
        if acc >= fraction * total {
            return bin_freq(k, frame.len(), rate);
        }
    }
    bin_freq(frame.len() - 1, frame.len(), rate)
}

fn spectral_flux(frame: &[f64], prev: &[f64]) -> f64 {
    frame
        .iter()
        .zip(prev)
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

fn zero_crossing_rate(time_window: &[f64]) -> f64 {
    if time_window.len() < 2 {
        return 0.0;
    }
    let crossings = time_window
        .windows(2)
        .filter(|w| (w[0] >= 0.0) != (w[1] >= 0.0))
        .count();
    crossings as f64 / (time_window.len() - 1) as f64
}

fn rms(time_window: &[f64]) -> f64 {
    (time_window.iter().map(|&s| s * s).sum::<f64>() / time_window.len() as f64).sqrt()
}

fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// MFCC coefficients 1..=12: 26 triangular mel bands over [0, rate/2] on the
/// power spectrum, log with floor 1e-10, orthonormal DCT-II. Coefficient 0
/// (overall log energy) is excluded, which makes the rest gain-invariant.
fn mfcc(frame: &[f64], rate: u32) -> Vec<f64> {
    let nyquist = f64::from(rate) / 2.0;
    let mel_max = hz_to_mel(nyquist);
    let edges: Vec<f64> = (0..NUM_MEL_BANDS + 2)
        .map(|i| mel_to_hz(mel_max * i as f64 / (NUM_MEL_BANDS + 1) as f64))
        .collect();
    let mut log_energies = [0.0; NUM_MEL_BANDS];
    for (band, e) in log_energies.iter_mut().enumerate() {
        let (lo, mid, hi) = (edges[band], edges[band + 1], edges[band + 2]);
        let mut energy = 0.0;
        for (k, &m) in frame.iter().enumerate() {
            let f = bin_freq(k, frame.len(), rate);
            let weight = if f > lo && f < mid {
                (f - lo) / (mid - lo)
            } else if f >= mid && f < hi {
                (hi - f) / (hi - mid)
            } else {
                0.0
            };
            energy += weight * m * m;
        }
        *e = energy.max(LOG_FLOOR).ln();
    }
    let n = NUM_MEL_BANDS as f64;
    (1..=NUM_MFCC)
        .map(|k| {
            let sum: f64 = log_energies
                .iter()
                .enumerate()
                .map(|(b, &e)| {
                    e * (std::f64::consts::PI * k as f64 * (2 * b + 1) as f64 / (2.0 * n)).cos()
                })
                .sum();
            (2.0 / n).sqrt() * sum
        })
        .collect()
}

/// 12 chroma magnitudes: bins folded to pitch classes against A440 (class 0
/// is A), max-normalized per frame; an all-zero frame stays all zero.
fn chroma(frame: &[f64], rate: u32) -> Vec<f64> {
    let mut out = vec![0.0; NUM_CHROMA];
    for (k, &m) in frame.iter().enumerate().skip(1) {
        let f = bin_freq(k, frame.len(), rate);
        let class = (12.0 * (f / 440.0).log2()).round() as i64;
        out[class.rem_euclid(12) as usize] += m;
    }
    let max = out.iter().cloned().fold(0.0f64, f64::max);
    if max > 0.0 {
        for c in &mut out {
            *c /= max;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureBlock {
    /// Mean of each of the 29 window features, then their (population)
    /// stds, then the low-energy measure: 59 entries.
    pub features: Vec<f64>,
    /// Index of the block's first window.
    pub start_window: usize,
}

/// Summarize sliding blocks of `block_len` consecutive windows (stride
/// `block_hop`). `window_rms` is the per-window RMS used for the low-energy
/// measure: the fraction of windows whose RMS falls strictly below the
/// block's mean RMS.
pub fn block_features(
    windows: &[Vec<f64>],
    window_rms: &[f64],
    block_len: usize,
    block_hop: usize,
) -> Result<Vec<FeatureBlock>> {
    if block_len == 0 || block_hop == 0 {
        return Err(Error::input("block length and hop must be positive"));
    }
    if windows.len() != window_rms.len() {
        return Err(Error::input("window/rms length mismatch"));
    }
    if windows.len() < block_len {
        return Err(Error::input(format!(
            "{} windows, fewer than one block of {}",
            windows.len(),
            block_len
        )));
    }
    let mut blocks = Vec::with_capacity((windows.len() - block_len) / block_hop + 1);
    let mut start = 0;
    while start + block_len <= windows.len() {
        let chunk = &windows[start..start + block_len];
        let mut features = Vec::with_capacity(BLOCK_FEATURES);
        let m = block_len as f64;
        let means: Vec<f64> = (0..WINDOW_FEATURES)
            .map(|d| chunk.iter().map(|w| w[d]).sum::<f64>() / m)
            .collect();
        features.extend(means.iter().copied());
        for (d, &mean) in means.iter().enumerate() {
            let var = chunk.iter().map(|w| (w[d] - mean) * (w[d] - mean)).sum::<f64>() / m;
            features.push(var.sqrt());
        }
        let rms_chunk = &window_rms[start..start + block_len];
        let mean_rms = rms_chunk.iter().sum::<f64>() / m;
        // "strictly below the mean" with a guard so accumulation round-off
        // never counts a window equal to the mean
        let eps = 1e-12 * mean_rms.abs().max(1.0);
        let low = rms_chunk.iter().filter(|&&r| mean_rms - r > eps).count() as f64 / m;
        features.push(low);
        debug_assert_eq!(features.len(), BLOCK_FEATURES);
        blocks.push(FeatureBlock {
            features,
            start_window: start,
        });
        start += block_hop;
    }
    Ok(blocks)
}

#[derive(Debug, Clone, Copy)]
pub struct AudioParams {
    pub window: usize,
    pub block_len: usize,
    pub block_hop: usize,
}

impl Default for AudioParams {
    fn default() -> Self {
        AudioParams {
            window: DEFAULT_WINDOW,
            block_len: DEFAULT_BLOCK_LEN,
            block_hop: DEFAULT_BLOCK_HOP,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AudioCloud {
    /// One 59-dimensional row per block, in time order, each dimension
    /// divided by its population std over all blocks (std-0 dimensions are
    /// left unscaled).
    pub cloud: PointCloud,
    /// Per row: (start time in seconds, duration in seconds).
    pub spans: Vec<(f64, f64)>,
}

pub fn song_to_cloud(audio: &WavAudio, params: &AudioParams) -> Result<AudioCloud> {
    let frames = stft_frames(audio, params.window)?;
    let time_windows: Vec<&[f64]> = audio.samples.chunks_exact(params.window).collect();
    let mut window_rms = Vec::with_capacity(frames.len());
    let mut features = Vec::with_capacity(frames.len());
    for (i, frame) in frames.iter().enumerate() {
        let prev = if i > 0 { Some(frames[i - 1].as_slice()) } else { None };
        let feats = window_features(frame, prev, time_windows[i], audio.rate);
        window_rms.push(feats[4]);
        features.push(feats);
    }
    let blocks = block_features(&features, &window_rms, params.block_len, params.block_hop)?;

    let n = blocks.len() as f64;
    let mut rows: Vec<Vec<f64>> = blocks.iter().map(|b| b.features.clone()).collect();
    for d in 0..BLOCK_FEATURES {
        let mean = rows.iter().map(|r| r[d]).sum::<f64>() / n;
        let var = rows.iter().map(|r| (r[d] - mean) * (r[d] - mean)).sum::<f64>() / n;
        let std = var.sqrt();
        if std > 0.0 {
            for r in &mut rows {
                r[d] /= std;
            }
        }
    }

    let window_secs = params.window as f64 / f64::from(audio.rate);
    let spans = blocks
        .iter()
        .map(|b| {
            (
                b.start_window as f64 * window_secs,
                params.block_len as f64 * window_secs,
            )
        })
        .collect();
    Ok(AudioCloud {
        cloud: PointCloud::new(rows)?,
        spans,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(freq: f64, rate: u32, secs: f64, amp: f64) -> WavAudio {
        let n = (f64::from(rate) * secs) as usize;
        let samples = (0..n)
            .map(|i| amp * (2.0 * std::f64::consts::PI * freq * i as f64 / f64::from(rate)).sin())
            .collect();
        WavAudio::new(samples, rate).unwrap()
    }

    #[test]
    fn one_second_at_44100_gives_21_frames() {
        let audio = sine(440.0, 44100, 1.0, 0.5);
        assert_eq!(stft_frames(&audio, 2048).unwrap().len(), 21);
    }

    #[test]
    fn short_audio_rejected() {
        let audio = WavAudio::new(vec![0.0; 100], 44100).unwrap();
        assert!(stft_frames(&audio, 2048).is_err());
    }

    #[test]
    fn silence_gives_documented_degenerate_values() {
        let audio = WavAudio::new(vec![0.0; 4096], 44100).unwrap();
        let frames = stft_frames(&audio, 2048).unwrap();
        let feats = window_features(&frames[0], None, &audio.samples[..2048], 44100);
        assert_eq!(feats[0], 0.0); // centroid
        assert_eq!(feats[1], 0.0); // rolloff
        assert_eq!(feats[2], 0.0); // flux
        assert_eq!(feats[3], 0.0); // zcr
        assert_eq!(feats[4], 0.0); // rms
        for &c in &feats[17..29] {
            assert_eq!(c, 0.0); // chroma stays zero
        }
        assert!(feats.iter().all(|f| f.is_finite()));
    }

    #[test]
    fn sine_has_dominant_bin_and_a_chroma() {
        // 440 Hz is not bin-centered at 44100/2048 ~ 21.5 Hz/bin, so check
        // the argmax bin instead of strict single-bin support
        let audio = sine(440.0, 44100, 0.5, 0.8);
        let frames = stft_frames(&audio, 2048).unwrap();
        let frame = &frames[1];
        let argmax = frame
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        let expect = (440.0f64 * 2048.0 / 44100.0).round() as usize;
        assert!(argmax.abs_diff(expect) <= 1);

        let feats = window_features(frame, None, &audio.samples[2048..4096], 44100);
        let chroma = &feats[17..29];
        let best = chroma
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert_eq!(best, 0); // class 0 = A
        assert_eq!(chroma[0], 1.0); // max-normalized
    }

    #[test]
    fn bin_centered_sine_concentrates_energy() {
        let rate = 44100;
        let freq = 64.0 * f64::from(rate) / 2048.0; // exactly bin 64
        let audio = sine(freq, rate, 0.2, 0.8);
        let frames = stft_frames(&audio, 2048).unwrap();
        let frame = &frames[0];
        let total: f64 = frame.iter().map(|m| m * m).sum();
        let local: f64 = frame[62..=66].iter().map(|m| m * m).sum();
        assert!(local / total > 0.99);
    }

    #[test]
    fn mfcc_gain_invariant_under_6db() {
        // broadband signal so every mel band sits above the log floor (a
        // pure tone leaves distant bands floored, where a gain shift
        // legitimately cannot cancel)
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let samples: Vec<f64> = (0..4096).map(|_| rng.gen_range(-0.3..0.3)).collect();
        let audio = WavAudio::new(samples, 44100).unwrap();
        let louder = WavAudio::new(
            audio.samples.iter().map(|&s| s * 2.0).collect(),
            44100,
        )
        .unwrap();
        let f1 = stft_frames(&audio, 2048).unwrap();
        let f2 = stft_frames(&louder, 2048).unwrap();
        let m1 = mfcc(&f1[0], 44100);
        let m2 = mfcc(&f2[0], 44100);
        for (a, b) in m1.iter().zip(&m2) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn noise_has_higher_zcr_and_flatter_chroma_than_sine() {
        use rand::{Rng, SeedableRng};
        let rate = 44100;
        let mut wins = 0;
        for trial in 0..100u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(trial);
            let noise: Vec<f64> = (0..2048).map(|_| rng.gen_range(-0.5..0.5)).collect();
            let noise_audio = WavAudio::new(noise, rate).unwrap();
            let tone = sine(440.0, rate, 2048.0 / f64::from(rate), 0.5);
            let nf = stft_frames(&noise_audio, 2048).unwrap();
            let tf = stft_frames(&tone, 2048).unwrap();
            let n = window_features(&nf[0], None, &noise_audio.samples, rate);
            let t = window_features(&tf[0], None, &tone.samples, rate);
            // flatness proxy: smaller max-to-mean ratio of chroma
            let flat = |c: &[f64]| {
                let mean = c.iter().sum::<f64>() / 12.0;
                c.iter().cloned().fold(0.0f64, f64::max) / mean
            };
            if n[3] > t[3] && flat(&n[17..29]) < flat(&t[17..29]) {
                wins += 1;
            }
        }
        assert!(wins > 50, "only {wins}/100 trials");
    }

    #[test]
    fn block_count_formula() {
        let windows: Vec<Vec<f64>> = (0..160).map(|_| vec![0.0; WINDOW_FEATURES]).collect();
        let rms = vec![0.0; 160];
        let blocks = block_features(&windows, &rms, 150, 1).unwrap();
        assert_eq!(blocks.len(), 11);
        assert_eq!(blocks[0].start_window, 0);
        assert_eq!(blocks[10].start_window, 10);
    }

    #[test]
    fn constant_features_have_zero_std_and_low_energy() {
        let windows: Vec<Vec<f64>> = (0..150).map(|_| vec![3.5; WINDOW_FEATURES]).collect();
        let rms = vec![0.7; 150];
        let blocks = block_features(&windows, &rms, 150, 1).unwrap();
        let b = &blocks[0];
        assert_eq!(b.features.len(), BLOCK_FEATURES);
        for d in 0..WINDOW_FEATURES {
            assert_eq!(b.features[d], 3.5);
            assert_eq!(b.features[WINDOW_FEATURES + d], 0.0);
        }
        assert_eq!(b.features[BLOCK_FEATURES - 1], 0.0);
    }

    #[test]
    fn block_spans_roughly_seven_seconds() {
        let span = 150.0f64 * 2048.0 / 44100.0;
        assert!((span - 6.97).abs() < 0.01);
    }

    #[test]
    fn song_to_cloud_is_59_dimensional_and_normalized() {
        // varied audio: chirp so features change across windows
        let rate = 44100u32;
        let n = 2048 * 170;
        let samples: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 / f64::from(rate);
                (2.0 * std::f64::consts::PI * (300.0 + 40.0 * t) * t).sin() * 0.5
            })
            .collect();
        let audio = WavAudio::new(samples, rate).unwrap();
        let out = song_to_cloud(&audio, &AudioParams::default()).unwrap();
        assert_eq!(out.cloud.dim(), 59);
        assert_eq!(out.cloud.len(), 170 - 150 + 1);
        assert_eq!(out.spans.len(), out.cloud.len());
        let m = out.cloud.len() as f64;
        for d in 0..59 {
            let mean: f64 = (0..out.cloud.len()).map(|i| out.cloud.point(i)[d]).sum::<f64>() / m;
            let var: f64 = (0..out.cloud.len())
                .map(|i| {
                    let x = out.cloud.point(i)[d] - mean;
                    x * x
                })
                .sum::<f64>()
                / m;
            let std = var.sqrt();
            assert!(std.abs() < 1e-9 || (std - 1.0).abs() < 1e-9, "dim {d}: std {std}");
        }
        // spans: first block starts at 0, spans ~6.97 s
        assert_eq!(out.spans[0].0, 0.0);
        assert!((out.spans[0].1 - 6.97).abs() < 0.01);
    }

    #[test]
    fn identical_audio_gives_identical_clouds() {
        let audio = sine(330.0, 22050, 16.0, 0.4);
        let a = song_to_cloud(&audio, &AudioParams::default()).unwrap();
        let b = song_to_cloud(&audio, &AudioParams::default()).unwrap();
        for i in 0..a.cloud.len() {
            assert_eq!(a.cloud.point(i), b.cloud.point(i));
        }
    }

    #[test]
    fn wav_round_trip_pcm16_and_float_stereo() {
        let dir = tempfile::tempdir().unwrap();
        let spec16 = hound::WavSpec {
            channels: 2,
            sample_rate: 44100,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let p16 = dir.path().join("a.wav");
        let mut w = hound::WavWriter::create(&p16, spec16).unwrap();
        for i in 0..1000i32 {
            w.write_sample((i * 30) as i16).unwrap(); // left
            w.write_sample((i * 10) as i16).unwrap(); // right
        }
        w.finalize().unwrap();
        let audio = WavAudio::load(&p16).unwrap();
        assert_eq!(audio.samples.len(), 1000);
        assert_eq!(audio.rate, 44100);
        // downmix: mean of channels
        assert!((audio.samples[1] - f64::from(40i16) / 2.0 / 32768.0).abs() < 1e-12);

        let spec32 = hound::WavSpec {
            channels: 1,
            sample_rate: 22050,
            bits_per_sample: 32,
            sample_format: hound::SampleFormat::Float,
        };
        let p32 = dir.path().join("b.wav");
        let mut w = hound::WavWriter::create(&p32, spec32).unwrap();
        for i in 0..100 {
            w.write_sample(i as f32 / 100.0).unwrap();
        }
        w.finalize().unwrap();
        let audio = WavAudio::load(&p32).unwrap();
        assert_eq!(audio.rate, 22050);
        assert!((audio.samples[50] - 0.5).abs() < 1e-7);
    }
}
