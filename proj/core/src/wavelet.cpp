#include "alcnn/wavelet.hpp"

#include <cmath>

#include "alcnn/error.hpp"

namespace alcnn {

WaveletFilters make_filters(std::string name, std::vector<double> low_pass) {
  if (low_pass.empty() || low_pass.size() % 2 != 0) throw InvalidInput("wavelet needs an even, non-zero tap count");
  WaveletFilters f{std::move(name), std::move(low_pass), {}};
  const std::size_t L = f.low_pass.size();
  f.high_pass.resize(L);
  for (std::size_t n = 0; n < L; ++n) f.high_pass[n] = (n % 2 == 0 ? 1.0 : -1.0) * f.low_pass[L - 1 - n];
  return f;
}

WaveletFilters haar() {
  const double r = 1.0 / std::sqrt(2.0);
  return make_filters("haar", {r, r});
}

WaveletFilters daubechies2() {
  const double s3 = std::sqrt(3.0);
  const double d = 4.0 * std::sqrt(2.0);
  return make_filters("db2", {(1 + s3) / d, (3 + s3) / d, (3 - s3) / d, (1 - s3) / d});
}

WaveletFilters daubechies4() {
  return make_filters("db4", {0.23037781330885523, 0.7148465705525415, 0.6308807679295904, -0.02798376941698385,
                              -0.18703481171888114, 0.030841381835986965, 0.032883011666982945,
                              -0.010597401784997278});
}

WaveletFilters wavelet_by_name(const std::string& name) {
  if (name == "haar" || name == "db1") return haar();
  if (name == "db2") return daubechies2();
  if (name == "db4") return daubechies4();
  throw InvalidInput("unknown wavelet '" + name + "' (expected haar, db2 or db4)");
}

std::vector<std::string> builtin_wavelets() { return {"haar", "db2", "db4"}; }

namespace {

void check_length(std::size_t n, const WaveletFilters& f) {
  if (n == 0 || n % 2 != 0) throw InvalidInput("DWT needs an even, non-zero signal length, got " + std::to_string(n));
  if (n < f.taps())
    throw InvalidInput("signal length " + std::to_string(n) + " shorter than " + std::to_string(f.taps()) + " taps");
}

std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  return static_cast<std::size_t>(((i % m) + m) % m);
}

}  // namespace

DwtBands dwt_level1(std::span<const double> x, const WaveletFilters& f) {
  check_length(x.size(), f);
  const std::size_t half = x.size() / 2;
  DwtBands out{std::vector<double>(half, 0.0), std::vector<double>(half, 0.0)};
  for (std::size_t n = 0; n < half; ++n)
    for (std::size_t j = 0; j < f.taps(); ++j) {
      const double v = x[wrap(static_cast<std::ptrdiff_t>(2 * n) - static_cast<std::ptrdiff_t>(j), x.size())];
      out.approx[n] += f.low_pass[j] * v;
      out.detail[n] += f.high_pass[j] * v;
    }
  return out;
}

std::vector<double> idwt(std::span<const double> approx, std::span<const double> detail, const WaveletFilters& f) {
  if (approx.size() != detail.size()) throw InvalidInput("approximation and detail bands differ in length");
  const std::size_t n_out = 2 * approx.size();
  check_length(n_out, f);
  std::vector<double> x(n_out, 0.0);
  for (std::size_t n = 0; n < approx.size(); ++n)
    for (std::size_t j = 0; j < f.taps(); ++j)
      x[wrap(static_cast<std::ptrdiff_t>(2 * n) - static_cast<std::ptrdiff_t>(j), n_out)] +=
          f.low_pass[j] * approx[n] + f.high_pass[j] * detail[n];
  return x;
}

std::vector<double> idwt_lowpass(std::span<const double> approx, const WaveletFilters& f) {
  const std::vector<double> zeros(approx.size(), 0.0);
  return idwt(approx, zeros, f);
}

std::vector<double> lowpass_synthesis_matrix(std::size_t signal_length, const WaveletFilters& f) {
  check_length(signal_length, f);
  const std::size_t half = signal_length / 2;
  std::vector<double> s(half * signal_length, 0.0);
  for (std::size_t n = 0; n < half; ++n)
    for (std::size_t j = 0; j < f.taps(); ++j)
      s[n * signal_length + wrap(static_cast<std::ptrdiff_t>(2 * n) - static_cast<std::ptrdiff_t>(j), signal_length)] +=
          f.low_pass[j];
  return s;
}

}  // namespace alcnn
