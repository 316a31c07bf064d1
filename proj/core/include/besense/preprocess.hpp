#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <filesystem>
#include <vector>

#include "besense/csi_trace.hpp"

namespace besense {

/// Real amplitude waveform of one subcarrier.
struct AmplitudeSeries {
  double fs = 0.0;
  std::vector<double> values;
  std::size_t source_subcarrier = 0;

  void validate() const;
  friend bool operator==(const AmplitudeSeries&, const AmplitudeSeries&) = default;
};

struct FilterSpec {
  double cutoff_hz = 7.5;
  int order = 4;  // even, >= 2

  /// Throws unless order is even and positive and 0 < cutoff < fs/2.
  void validate(double fs) const;
};

/// Second-order section: b0 + b1 z^-1 + b2 z^-2 over 1 + a1 z^-1 + a2 z^-2.
struct Biquad {
  double b0, b1, b2, a1, a2;
};

/// Population variance of a real sequence (0 for empty input).
double population_variance(const double* data, std::size_t n);

/// Amplitude variance of every subcarrier.
std::vector<double> subcarrier_variances(const CsiTrace& trace);

/// |H| of the subcarrier with the largest amplitude variance (lowest index on ties).
/// Throws Stage when every subcarrier is constant.
AmplitudeSeries select_subcarrier(const CsiTrace& trace);

/// Digital Butterworth low-pass as a cascade of order/2 biquads, designed by
/// impulse invariance so the magnitude tracks the analog prototype well below
/// Nyquist. Each section is scaled to unit DC gain.
std::vector<Biquad> butterworth_sos(const FilterSpec& spec, double fs);

/// |H(e^{j w})| of a section cascade at frequency f.
double sos_magnitude(const std::vector<Biquad>& sos, double f, double fs);

/// Analog prototype magnitude 1/sqrt(1 + (f/fc)^(2 order)).
double butterworth_magnitude(const FilterSpec& spec, double f);

/// Causal single-pass filtering. Each section starts in the steady state of a
/// constant input equal to the first sample, so a constant input passes unchanged.
std::vector<double> sos_filter(const std::vector<Biquad>& sos, const std::vector<double>& x);

AmplitudeSeries butterworth_lowpass(const AmplitudeSeries& series, const FilterSpec& spec);

/// Header "# fs=<int> subcarrier=<int>", rows "t,amplitude".
void write_amplitude(const std::filesystem::path& path, const AmplitudeSeries& series);
AmplitudeSeries read_amplitude(const std::filesystem::path& path);

}  // namespace besense
