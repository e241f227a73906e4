#pragma once

#include <span>
#include <string>
#include <vector>

namespace alcnn {

// Orthogonal two-channel filter bank. high_pass[n] = (-1)^n low_pass[L-1-n].
struct WaveletFilters {
  std::string name;
  std::vector<double> low_pass;
  std::vector<double> high_pass;

  std::size_t taps() const { return low_pass.size(); }
};

WaveletFilters make_filters(std::string name, std::vector<double> low_pass);
WaveletFilters haar();
WaveletFilters daubechies2();  // 4 taps
WaveletFilters daubechies4();  // 8 taps
WaveletFilters wavelet_by_name(const std::string& name);  // "haar", "db2", "db4"
std::vector<std::string> builtin_wavelets();

struct DwtBands {
  std::vector<double> approx;
  std::vector<double> detail;
};

// Single-level analysis with periodic extension:
//   approx[n] = sum_j low[j] x[(2n - j) mod N]
//   detail[n] = sum_j high[j] x[(2n - j) mod N]
DwtBands dwt_level1(std::span<const double> x, const WaveletFilters& f);

// Synthesis (transpose of the analysis operator).
std::vector<double> idwt(std::span<const double> approx, std::span<const double> detail, const WaveletFilters& f);

// idwt with the detail band zeroed.
std::vector<double> idwt_lowpass(std::span<const double> approx, const WaveletFilters& f);

// Row-major (N/2) x N matrix S with idwt_lowpass(a) = a^T S.
std::vector<double> lowpass_synthesis_matrix(std::size_t signal_length, const WaveletFilters& f);

}  // namespace alcnn
