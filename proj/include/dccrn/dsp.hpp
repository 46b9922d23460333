// dccrn/dsp.hpp

// Copyright 2026  DCCRN-CPP Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Signal plumbing: framing, Hann windowing, 50%-overlap-add, STFT magnitude,
// mel projection, SNR mixing, and 16->10 kHz resampling. All functions here
// are pure; none of them touch the autodiff tape.

#ifndef DCCRN_DSP_HPP_
#define DCCRN_DSP_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "dccrn/base.hpp"
#include "dccrn/tensor.hpp"

namespace dccrn {
namespace dsp {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr int kCanonicalRate = 16000;

// Mono PCM signal; float samples nominally in [-1, 1].
struct AudioClip {
  std::vector<float> samples;
  int sample_rate = kCanonicalRate;

  void validate() const {
    DCCRN_CHECK(sample_rate > 0, "sample rate must be positive");
    DCCRN_RUNTIME_CHECK(all_finite(samples), "non-finite audio samples");
  }
};

// Frame geometry: frames of N samples advancing by hop = N/M/2, split into
// M sub-frames of N/M samples each.
struct FramePlan {
  int frame_size = 1024;
  int sub_frames = 4;

  int sub_size() const { return frame_size / sub_frames; }
  int hop() const { return sub_size() / 2; }

  void validate() const {
    DCCRN_CHECK(frame_size > 0 && sub_frames > 0, "frame plan dims must be positive");
    DCCRN_CHECK(frame_size % sub_frames == 0,
                "frame size " << frame_size << " not divisible by " << sub_frames);
    DCCRN_CHECK(sub_size() % 2 == 0, "sub-frame size must be even");
  }
};

// Periodic (DFT-even) Hann: w[i] = 0.5 - 0.5 cos(2*pi*i/n). Windows at hop
// n/2 sum to exactly 1, which is what makes the overlap-add gain flat.
template <typename T = float>
std::vector<T> hann(int n) {
  DCCRN_CHECK(n >= 2, "hann window needs n >= 2, got " << n);
  std::vector<T> w(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    w[static_cast<size_t>(i)] = static_cast<T>(0.5 - 0.5 * std::cos(2.0 * kPi * i / n));
  }
  return w;
}

inline int64_t frame_count(int64_t num_samples, const FramePlan& plan) {
  plan.validate();
  DCCRN_CHECK(num_samples >= 1, "cannot frame an empty clip");
  const int hop = plan.hop();
  return (num_samples + hop - 1) / hop;
}

// Frame t covers samples [t*hop + sub - N, t*hop + sub); out-of-range input
// reads as zero, so the model only ever sees current and past samples.
template <typename T>
void fill_frame(const float* samples, int64_t num_samples, const FramePlan& plan, int64_t t,
                T* out) {
  const int n = plan.frame_size;
  const int64_t begin = t * plan.hop() + plan.sub_size() - n;
  for (int i = 0; i < n; ++i) {
    const int64_t src = begin + i;
    out[i] = (src >= 0 && src < num_samples) ? static_cast<T>(samples[src]) : T(0);
  }
}

inline std::vector<std::vector<float>> frame_stream(const AudioClip& clip,
                                                    const FramePlan& plan) {
  clip.validate();
  const int64_t count = frame_count(static_cast<int64_t>(clip.samples.size()), plan);
  std::vector<std::vector<float>> frames(static_cast<size_t>(count));
  for (int64_t t = 0; t < count; ++t) {
    frames[static_cast<size_t>(t)].resize(static_cast<size_t>(plan.frame_size));
    fill_frame(clip.samples.data(), static_cast<int64_t>(clip.samples.size()), plan, t,
               frames[static_cast<size_t>(t)].data());
  }
  return frames;
}

// Hann-weighted 50%-overlap-add of equal-length sub-frames. Interior gain is
// exactly 1; the first and last hop of the output only receive one window.
template <typename T>
std::vector<T> overlap_add(const std::vector<std::vector<T>>& subframes, int hop) {
  DCCRN_CHECK(!subframes.empty(), "overlap_add needs at least one sub-frame");
  const int len = static_cast<int>(subframes[0].size());
  DCCRN_CHECK(hop * 2 == len, "hop must be half the sub-frame length");
  for (const auto& s : subframes) {
    DCCRN_CHECK(static_cast<int>(s.size()) == len, "inconsistent sub-frame lengths");
  }
  const std::vector<T> w = hann<T>(len);
  std::vector<T> out(static_cast<size_t>(hop) * (subframes.size() - 1) + len, T(0));
  for (size_t s = 0; s < subframes.size(); ++s) {
    T* dst = out.data() + s * static_cast<size_t>(hop);
    const T* src = subframes[s].data();
    for (int i = 0; i < len; ++i) dst[i] += w[static_cast<size_t>(i)] * src[i];
  }
  return out;
}

// Real-input DFT basis for one fft size, kept around so spectrogram calls
// don't re-evaluate cosines. Row-major (bins x fft of cos, then sin).
template <typename T>
struct DftBasis {
  int fft_size = 0;
  int bins = 0;
  std::vector<T> cos_table;  // (bins, fft)
  std::vector<T> sin_table;  // (bins, fft)

  explicit DftBasis(int fft) : fft_size(fft), bins(fft / 2 + 1) {
    DCCRN_CHECK(fft >= 2 && (fft & (fft - 1)) == 0, "fft size must be a power of two");
    cos_table.resize(static_cast<size_t>(bins) * fft);
    sin_table.resize(static_cast<size_t>(bins) * fft);
    for (int b = 0; b < bins; ++b) {
      for (int i = 0; i < fft; ++i) {
        const double ph = 2.0 * kPi * b * i / fft;
        cos_table[static_cast<size_t>(b) * fft + i] = static_cast<T>(std::cos(ph));
        sin_table[static_cast<size_t>(b) * fft + i] = static_cast<T>(std::sin(ph));
      }
    }
  }
};

inline int stft_frame_count(int64_t len, int fft_size, int hop) {
  if (len < fft_size) return 1;  // single zero-padded frame
  return static_cast<int>((len - fft_size) / hop + 1);
}

// Magnitude of Hann-windowed DFT frames: (frames, fft/2+1). A clip shorter
// than one window yields a single zero-padded frame.
template <typename T>
Tensor<T> stft_mag(const T* x, int64_t len, const DftBasis<T>& basis, int hop) {
  DCCRN_CHECK(hop >= 1, "hop must be positive");
  const int fft = basis.fft_size;
  const int frames = stft_frame_count(len, fft, hop);
  const std::vector<T> w = hann<T>(fft);
  Tensor<T> mag = Tensor<T>::uninit({frames, basis.bins});
  std::vector<T> buf(static_cast<size_t>(fft));
  for (int f = 0; f < frames; ++f) {
    const int64_t start = static_cast<int64_t>(f) * hop;
    for (int i = 0; i < fft; ++i) {
      const int64_t src = start + i;
      buf[static_cast<size_t>(i)] =
          (src < len) ? w[static_cast<size_t>(i)] * x[src] : T(0);
    }
    T* mrow = mag.data.data() + static_cast<size_t>(f) * basis.bins;
    for (int b = 0; b < basis.bins; ++b) {
      const T* ct = basis.cos_table.data() + static_cast<size_t>(b) * fft;
      const T* st = basis.sin_table.data() + static_cast<size_t>(b) * fft;
      T re = T(0), im = T(0);
      for (int i = 0; i < fft; ++i) {
        re += ct[i] * buf[static_cast<size_t>(i)];
        im -= st[i] * buf[static_cast<size_t>(i)];
      }
      mrow[b] = std::sqrt(re * re + im * im);
    }
  }
  return mag;
}

template <typename T>
Tensor<T> stft_mag(const std::vector<T>& x, const DftBasis<T>& basis, int hop) {
  return stft_mag(x.data(), static_cast<int64_t>(x.size()), basis, hop);
}

inline double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
inline double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

// Triangular filters spaced evenly on the mel scale. Adjacent triangles
// cross-fade linearly in mel, so interior bins see unit total weight.
struct MelFilterbank {
  int n_mels = 0;
  int bins = 0;
  std::vector<double> weights;  // (n_mels, bins)

  MelFilterbank(int mels, int fft_size, int sample_rate, double fmin, double fmax)
      : n_mels(mels), bins(fft_size / 2 + 1) {
    DCCRN_CHECK(mels >= 1, "need at least one mel band");
    DCCRN_CHECK(fmin >= 0.0 && fmin < fmax && fmax <= sample_rate / 2.0 + 1e-9,
                "invalid mel band edges [" << fmin << ", " << fmax << "]");
    weights.assign(static_cast<size_t>(n_mels) * bins, 0.0);
    const double mlo = hz_to_mel(fmin), mhi = hz_to_mel(fmax);
    std::vector<double> edges(static_cast<size_t>(n_mels) + 2);
    for (int i = 0; i < n_mels + 2; ++i) {
      edges[static_cast<size_t>(i)] = mlo + (mhi - mlo) * i / (n_mels + 1);
    }
    for (int b = 0; b < bins; ++b) {
      const double m = hz_to_mel(static_cast<double>(b) * sample_rate / fft_size);
      for (int j = 0; j < n_mels; ++j) {
        const double lo = edges[static_cast<size_t>(j)];
        const double ctr = edges[static_cast<size_t>(j) + 1];
        const double hi = edges[static_cast<size_t>(j) + 2];
        double v = 0.0;
        if (m > lo && m < ctr) {
          v = (m - lo) / (ctr - lo);
        } else if (m >= ctr && m < hi) {
          v = (hi - m) / (hi - ctr);
        } else if (m == ctr) {
          v = 1.0;
        }
        if (v > 0.0) weights[static_cast<size_t>(j) * bins + b] = v;
      }
    }
  }
};

// Applies the filterbank to a (frames, bins) magnitude spectrogram.
template <typename T>
Tensor<T> mel_project(const Tensor<T>& mag, const MelFilterbank& bank) {
  DCCRN_CHECK(mag.rank() == 2 && mag.shape[1] == bank.bins,
              "mel_project expects (frames, " << bank.bins << ") magnitudes");
  const int frames = mag.shape[0];
  Tensor<T> mel = Tensor<T>::zeros({frames, bank.n_mels});
  for (int f = 0; f < frames; ++f) {
    const T* mrow = mag.data.data() + static_cast<size_t>(f) * bank.bins;
    T* orow = mel.data.data() + static_cast<size_t>(f) * bank.n_mels;
    for (int j = 0; j < bank.n_mels; ++j) {
      const double* wrow = bank.weights.data() + static_cast<size_t>(j) * bank.bins;
      T acc = T(0);
      for (int b = 0; b < bank.bins; ++b) acc += static_cast<T>(wrow[b]) * mrow[b];
      orow[j] = acc;
    }
  }
  return mel;
}

template <typename T>
double signal_power(const std::vector<T>& x) {
  double acc = 0.0;
  for (T v : x) acc += static_cast<double>(v) * static_cast<double>(v);
  return x.empty() ? 0.0 : acc / static_cast<double>(x.size());
}

struct MixResult {
  AudioClip noisy;
  AudioClip scaled_noise;
  double gain = 0.0;
  int64_t cut_offset = 0;
};

// Scales a seeded random cut of the noise so clean-to-noise power matches
// snr_db, then adds it to the clean signal. Noise shorter than the clean
// signal is tiled from the seeded offset.
inline MixResult mix_at_snr(const AudioClip& clean, const AudioClip& noise, float snr_db,
                            uint64_t seed) {
  clean.validate();
  noise.validate();
  DCCRN_CHECK(!clean.samples.empty(), "empty clean signal");
  DCCRN_CHECK(!noise.samples.empty(), "empty noise signal");
  DCCRN_CHECK(clean.sample_rate == noise.sample_rate, "sample rate mismatch in mix");
  const int64_t clen = static_cast<int64_t>(clean.samples.size());
  const int64_t nlen = static_cast<int64_t>(noise.samples.size());

  std::mt19937_64 rng(seed);
  int64_t offset = 0;
  std::vector<float> cut(static_cast<size_t>(clen));
  if (nlen >= clen) {
    offset = static_cast<int64_t>(rng() % static_cast<uint64_t>(nlen - clen + 1));
    std::copy_n(noise.samples.begin() + offset, clen, cut.begin());
  } else {
    offset = static_cast<int64_t>(rng() % static_cast<uint64_t>(nlen));
    for (int64_t i = 0; i < clen; ++i) {
      cut[static_cast<size_t>(i)] = noise.samples[static_cast<size_t>((offset + i) % nlen)];
    }
  }

  const double p_clean = signal_power(clean.samples);
  const double p_noise = signal_power(cut);
  DCCRN_RUNTIME_CHECK(p_clean > 0.0, "silent clean signal (zero power)");
  DCCRN_RUNTIME_CHECK(p_noise > 0.0, "silent noise cut (zero power)");
  const double gain = std::sqrt(p_clean / (p_noise * std::pow(10.0, snr_db / 10.0)));

  MixResult r;
  r.gain = gain;
  r.cut_offset = offset;
  r.scaled_noise.sample_rate = clean.sample_rate;
  r.noisy.sample_rate = clean.sample_rate;
  r.scaled_noise.samples.resize(static_cast<size_t>(clen));
  r.noisy.samples.resize(static_cast<size_t>(clen));
  for (int64_t i = 0; i < clen; ++i) {
    const float n = static_cast<float>(gain * cut[static_cast<size_t>(i)]);
    r.scaled_noise.samples[static_cast<size_t>(i)] = n;
    r.noisy.samples[static_cast<size_t>(i)] = clean.samples[static_cast<size_t>(i)] + n;
  }
  return r;
}

namespace detail {

// Blackman-Harris windowed sinc low-pass at `cutoff` cycles/sample,
// odd length, unity DC gain before the polyphase gain factor.
inline std::vector<double> windowed_sinc(int taps, double cutoff) {
  DCCRN_CHECK(taps % 2 == 1, "windowed sinc needs odd tap count");
  std::vector<double> h(static_cast<size_t>(taps));
  const int c = taps / 2;
  for (int i = 0; i < taps; ++i) {
    const double t = i - c;
    const double s = (t == 0.0) ? 2.0 * cutoff
                                : std::sin(2.0 * kPi * cutoff * t) / (kPi * t);
    const double u = static_cast<double>(i) / (taps - 1);
    const double w = 0.35875 - 0.48829 * std::cos(2.0 * kPi * u) +
                     0.14128 * std::cos(4.0 * kPi * u) - 0.01168 * std::cos(6.0 * kPi * u);
    h[static_cast<size_t>(i)] = s * w;
  }
  return h;
}

}  // namespace detail

// Polyphase rational resampling by 5/8 with an anti-alias low-pass at 5 kHz.
// Used to bring enhancement output down to the 10 kHz intelligibility-metric
// rate.
inline AudioClip resample_16k_to_10k(const AudioClip& clip) {
  clip.validate();
  DCCRN_CHECK(clip.sample_rate == kCanonicalRate,
              "resampler expects 16 kHz input, got " << clip.sample_rate);
  constexpr int kUp = 5, kDown = 8;
  constexpr int kTaps = 481;  // ~0.8 kHz transition at the 80 kHz virtual rate
  static const std::vector<double> h = [] {
    std::vector<double> f = detail::windowed_sinc(kTaps, 1.0 / (2.0 * kDown));
    for (double& v : f) v *= kUp;  // restore gain lost to zero-stuffing
    return f;
  }();

  const int64_t in_len = static_cast<int64_t>(clip.samples.size());
  const int64_t out_len = (in_len * kUp + kDown - 1) / kDown;
  const int center = kTaps / 2;
  AudioClip out;
  out.sample_rate = 10000;
  out.samples.resize(static_cast<size_t>(out_len));
  for (int64_t j = 0; j < out_len; ++j) {
    const int64_t p = j * kDown + center;  // virtual-rate index of tap 0
    // x_up is nonzero only at multiples of kUp.
    int64_t t_hi = p / kUp;
    if (t_hi >= in_len) t_hi = in_len - 1;
    double acc = 0.0;
    for (int64_t t = t_hi; t >= 0; --t) {
      const int64_t n = p - t * kUp;
      if (n >= kTaps) break;
      acc += h[static_cast<size_t>(n)] * clip.samples[static_cast<size_t>(t)];
    }
    out.samples[static_cast<size_t>(j)] = static_cast<float>(acc);
  }
  return out;
}

}  // namespace dsp
}  // namespace dccrn

#endif  // DCCRN_DSP_HPP_
