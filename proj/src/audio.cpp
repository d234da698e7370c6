// Copyright 2026 The podcurate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "podcurate/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>
#include <string>

#include "podcurate/error.hpp"

namespace podcurate {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

// Zeroth-order modified Bessel function of the first kind (power series).
double bessel_i0(double x) {
  double sum = 1.0, term = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 64; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

}  // namespace

Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open audio file '" + path.string() + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  const std::string where = "'" + path.string() + "': ";
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(where + "not a RIFF/WAVE file");
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    std::uint32_t size = le32(chunk + 4);
    std::size_t body = pos + 8;
    std::size_t available = bytes.size() - body;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || available < 16) throw Error(where + "truncated fmt chunk");
      format = le16(chunk + 8);
      channels = le16(chunk + 10);
      rate = le32(chunk + 12);
      bits = le16(chunk + 22);
      if (format == kFormatExtensible) {
        if (size < 40 || available < 40) throw Error(where + "truncated extensible fmt chunk");
        format = le16(chunk + 8 + 24);
      }
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      // Streams written without a final size carry 0 or 0xFFFFFFFF.
      data_size = (size == 0 || size > available) ? available : size;
    }
    pos = body + size + (size & 1U);
    if (data && format) break;
  }
  if (!format) throw Error(where + "missing fmt chunk");
  if (!data) throw Error(where + "missing data chunk");
  if (channels == 0 || rate == 0) throw Error(where + "invalid channel count or sample rate");

  Waveform w;
  w.sample_rate_hz = static_cast<int>(rate);
  w.channels = channels;
  const std::size_t width = bits / 8;
  if (width == 0) throw Error(where + "unsupported bit depth");
  const std::size_t n = data_size / width;
  w.samples.resize(n - n % channels);
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    const unsigned char* p = data + i * width;
    float v = 0.0f;
    if (format == kFormatPcm) {
      switch (bits) {
        case 8: v = (static_cast<int>(p[0]) - 128) / 128.0f; break;
        case 16: v = static_cast<std::int16_t>(le16(p)) / 32768.0f; break;
        case 24: {
          std::int32_t s = static_cast<std::int32_t>((p[0] << 8) | (p[1] << 16) |
                                                     (static_cast<std::uint32_t>(p[2]) << 24));
          v = static_cast<float>((s >> 8) / 8388608.0);
          break;
        }
        case 32: v = static_cast<float>(static_cast<std::int32_t>(le32(p)) / 2147483648.0); break;
        default: throw Error(where + "unsupported PCM bit depth " + std::to_string(bits));
      }
    } else if (format == kFormatFloat) {
      if (bits == 32) {
        std::uint32_t u = le32(p);
        std::memcpy(&v, &u, 4);
      } else if (bits == 64) {
        std::uint64_t u = le32(p) | (static_cast<std::uint64_t>(le32(p + 4)) << 32);
        double d;
        std::memcpy(&d, &u, 8);
        v = static_cast<float>(d);
      } else {
        throw Error(where + "unsupported float bit depth " + std::to_string(bits));
      }
    } else {
      throw Error(where + "unsupported wave format tag " + std::to_string(format));
    }
    w.samples[i] = v;
  }
  return w;
}

void write_wav(const std::filesystem::path& path, const Waveform& w, WavEncoding encoding) {
  if (w.channels <= 0 || w.sample_rate_hz <= 0) throw Error("invalid waveform header");
  const std::uint16_t bits = encoding == WavEncoding::kPcm16 ? 16 : 32;
  const std::uint16_t format = encoding == WavEncoding::kPcm16 ? kFormatPcm : kFormatFloat;
  const std::uint32_t block = w.channels * bits / 8;
  const std::uint32_t data_size = static_cast<std::uint32_t>(w.samples.size() * bits / 8);

  std::string out;
  out.reserve(44 + data_size);
  out += "RIFF";
  put32(out, 36 + data_size);
  out += "WAVEfmt ";
  put32(out, 16);
  put16(out, format);
  put16(out, static_cast<std::uint16_t>(w.channels));
  put32(out, static_cast<std::uint32_t>(w.sample_rate_hz));
  put32(out, static_cast<std::uint32_t>(w.sample_rate_hz) * block);
  put16(out, static_cast<std::uint16_t>(block));
  put16(out, bits);
  out += "data";
  put32(out, data_size);
  for (float s : w.samples) {
    if (encoding == WavEncoding::kPcm16) {
      float c = std::clamp(s, -1.0f, 1.0f);
      auto q = static_cast<std::int16_t>(std::lrint(std::min(c * 32768.0f, 32767.0f)));
      put16(out, static_cast<std::uint16_t>(q));
    } else {
      std::uint32_t u;
      std::memcpy(&u, &s, 4);
      put32(out, u);
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open '" + path.string() + "' for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error("write to '" + path.string() + "' failed");
}

std::vector<float> downmix(const Waveform& w) {
  if (w.channels <= 1) return w.samples;
  const std::size_t frames = w.frames();
  std::vector<float> mono(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (int c = 0; c < w.channels; ++c) acc += w.samples[i * w.channels + c];
    mono[i] = static_cast<float>(acc / w.channels);
  }
  return mono;
}

std::vector<float> resample(std::span<const float> x, int from_hz, int to_hz) {
  if (from_hz <= 0 || to_hz <= 0) throw Error("sample rates must be positive");
  if (from_hz == to_hz) return {x.begin(), x.end()};

  const long g = std::gcd(from_hz, to_hz);
  const long up = to_hz / g;
  const long down = from_hz / g;
  // Cutoff at the lower Nyquist, slightly inside to leave room for the
  // transition band.
  const double cutoff = 0.95 * std::min(1.0, static_cast<double>(up) / down);
  const int half_taps = 32;  // zero crossings per side, in input samples at cutoff 1
  const double half_width = half_taps / cutoff;  // kernel half width in input samples
  const double beta = 8.6;
  const double i0_beta = bessel_i0(beta);

  const std::size_t n = x.size();
  const std::size_t out_len =
      static_cast<std::size_t>((static_cast<unsigned long long>(n) * up + down - 1) / down);
  std::vector<float> y(out_len);

  // Kernel per output phase: output sample m sits at input time m*down/up.
  // Phases repeat with period `up`, so precompute one kernel per phase.
  const long span_taps = static_cast<long>(std::ceil(half_width));
  std::vector<std::vector<double>> kernels(static_cast<std::size_t>(up));
  for (long phase = 0; phase < up; ++phase) {
    const double frac = static_cast<double>((phase * down) % up) / up;
    auto& k = kernels[static_cast<std::size_t>(phase)];
    k.resize(static_cast<std::size_t>(2 * span_taps + 1));
    double sum = 0.0;
    for (long t = -span_taps; t <= span_taps; ++t) {
      const double d = static_cast<double>(t) - frac;  // distance input - output time
      double v = 0.0;
      if (std::abs(d) < half_width) {
        const double r = d / half_width;
        const double win = bessel_i0(beta * std::sqrt(1.0 - r * r)) / i0_beta;
        const double arg = std::numbers::pi * cutoff * d;
        const double sinc = arg == 0.0 ? 1.0 : std::sin(arg) / arg;
        v = cutoff * sinc * win;
      }
      k[static_cast<std::size_t>(t + span_taps)] = v;
      sum += v;
    }
    // Unity DC gain per phase.
    for (double& v : k) v /= sum;
  }

  for (std::size_t m = 0; m < out_len; ++m) {
    const long long num = static_cast<long long>(m) * down;
    const long long base = num / up;
    const auto& k = kernels[static_cast<std::size_t>(static_cast<long long>(m) % up)];
    double acc = 0.0;
    for (long t = -span_taps; t <= span_taps; ++t) {
      const long long idx = base + t;
      if (idx < 0 || idx >= static_cast<long long>(n)) continue;
      acc += k[static_cast<std::size_t>(t + span_taps)] * x[static_cast<std::size_t>(idx)];
    }
    y[m] = static_cast<float>(acc);
  }
  return y;
}

}  // namespace podcurate
