#include "besense/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "besense/error.hpp"
#include "besense/text_io.hpp"

namespace besense {

namespace {

using cd = std::complex<double>;

// Roots of sum_i c[i] x^(deg-i) (c[0] != 0) by Durand-Kerner iteration.
std::vector<cd> poly_roots(std::vector<double> c) {
  const std::size_t deg = c.size() - 1;
  std::vector<cd> roots(deg);
  if (deg == 0) return roots;
  const double lead = c.front();
  for (double& v : c) v /= lead;
  const cd seed(0.4, 0.9);
  for (std::size_t i = 0; i < deg; ++i) roots[i] = std::pow(seed, static_cast<double>(i));
  auto eval = [&](cd x) {
    cd acc = 0.0;
    for (double v : c) acc = acc * x + v;
    return acc;
  };
  for (int iter = 0; iter < 500; ++iter) {
    double change = 0.0;
    for (std::size_t i = 0; i < deg; ++i) {
      cd denom = 1.0;
      for (std::size_t j = 0; j < deg; ++j) {
        if (j != i) denom *= roots[i] - roots[j];
      }
      const cd step = eval(roots[i]) / denom;
      roots[i] -= step;
      change = std::max(change, std::abs(step) / std::max(1.0, std::abs(roots[i])));
    }
    if (change < 1e-15) break;
  }
  return roots;
}

// Polynomial in z^-1 as coefficient vector [c0, c1, c2].
using Quad = std::array<double, 3>;

}  // namespace

void AmplitudeSeries::validate() const {
  require(std::isfinite(fs) && fs > 0.0, "amplitude series fs must be > 0");
  for (double v : values) require(std::isfinite(v), "amplitude values must be finite");
}

void FilterSpec::validate(double fs) const {
  require(order >= 2 && order % 2 == 0, "filter order must be even and >= 2");
  require(std::isfinite(cutoff_hz) && cutoff_hz > 0.0, "cutoff must be > 0");
  require(cutoff_hz < fs / 2.0, "cutoff must be below fs/2");
}

double population_variance(const double* data, std::size_t n) {
  if (n == 0) return 0.0;
  // Shifted by the first sample so a constant window gives exactly 0.
  const double x0 = data[0];
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += data[i] - x0;
  mean /= static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = data[i] - x0 - mean;
    acc += d * d;
  }
  return acc / static_cast<double>(n);
}

std::vector<double> subcarrier_variances(const CsiTrace& trace) {
  std::vector<double> out(trace.subcarriers());
  for (std::size_t s = 0; s < trace.subcarriers(); ++s) {
    const auto amp = trace.amplitude(s);
    out[s] = population_variance(amp.data(), amp.size());
  }
  return out;
}

AmplitudeSeries select_subcarrier(const CsiTrace& trace) {
  require(!trace.empty(), "cannot select a subcarrier from an empty trace");
  const auto var = subcarrier_variances(trace);
  std::size_t best = 0;
  for (std::size_t s = 1; s < var.size(); ++s) {
    if (var[s] > var[best]) best = s;
  }
  if (!(var[best] > 0.0)) {
    fail(ErrorKind::Stage, "no informative subcarrier: every amplitude series is constant");
  }
  return {trace.fs(), trace.amplitude(best), best};
}

// Impulse-invariant discretization of the analog Butterworth prototype,
// normalized to unit DC gain per section. Unlike the bilinear transform it
// keeps the analog magnitude shape (no frequency warping) far below fs/2.
std::vector<Biquad> butterworth_sos(const FilterSpec& spec, double fs) {
  spec.validate(fs);
  const int n = spec.order;
  const double wc = 2.0 * std::numbers::pi * spec.cutoff_hz;
  const double dt = 1.0 / fs;

  std::vector<cd> poles(n);
  for (int k = 0; k < n; ++k) {
    const double theta = std::numbers::pi * (2.0 * k + n + 1) / (2.0 * n);
    poles[k] = wc * cd(std::cos(theta), std::sin(theta));
  }
  std::vector<cd> zp(n);
  std::vector<cd> residues(n);
  for (int k = 0; k < n; ++k) {
    zp[k] = std::exp(poles[k] * dt);
    cd denom = 1.0;
    for (int j = 0; j < n; ++j) {
      if (j != k) denom *= poles[k] - poles[j];
    }
    residues[k] = std::pow(wc, n) / denom;
  }

  // Numerator of dt * sum_k r_k / (1 - zp_k z^-1) over prod_k (1 - zp_k z^-1).
  std::vector<cd> num(n, 0.0);
  for (int k = 0; k < n; ++k) {
    std::vector<cd> prod{1.0};
    for (int j = 0; j < n; ++j) {
      if (j == k) continue;
      std::vector<cd> next(prod.size() + 1, 0.0);
      for (std::size_t i = 0; i < prod.size(); ++i) {
        next[i] += prod[i];
        next[i + 1] -= zp[j] * prod[i];
      }
      prod = std::move(next);
    }
    for (std::size_t i = 0; i < prod.size(); ++i) num[i] += dt * residues[k] * prod[i];
  }
  // num[0] = dt * h(0) vanishes for order >= 2, leaving z^-1 * m(z^-1).
  std::vector<double> m;
  for (int i = 1; i < n; ++i) m.push_back(num[i].real());

  // m(z^-1) = m0 prod (1 - q z^-1): its roots in z are the q.
  const auto zeros = poly_roots(m);
  std::vector<Quad> first_order{{0.0, 1.0, 0.0}};
  std::vector<Quad> second_order;
  std::vector<bool> used(zeros.size(), false);
  for (std::size_t i = 0; i < zeros.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    if (std::abs(zeros[i].imag()) <= 1e-9 * std::max(1.0, std::abs(zeros[i]))) {
      first_order.push_back({1.0, -zeros[i].real(), 0.0});
      continue;
    }
    std::size_t mate = i;
    double best = INFINITY;
    for (std::size_t j = i + 1; j < zeros.size(); ++j) {
      if (!used[j] && std::abs(zeros[j] - std::conj(zeros[i])) < best) {
        best = std::abs(zeros[j] - std::conj(zeros[i]));
        mate = j;
      }
    }
    used[mate] = true;
    second_order.push_back({1.0, -2.0 * zeros[i].real(), std::norm(zeros[i])});
  }
  std::vector<Quad> numerators = second_order;
  for (std::size_t i = 0; i < first_order.size(); i += 2) {
    const Quad& a = first_order[i];
    if (i + 1 == first_order.size()) {
      numerators.push_back(a);
      continue;
    }
    const Quad& b = first_order[i + 1];
    numerators.push_back({a[0] * b[0], a[0] * b[1] + a[1] * b[0], a[1] * b[1]});
  }

  std::vector<Biquad> sos;
  for (int k = 0; k < n / 2; ++k) {
    const cd z = zp[k];  // poles k and n-1-k are conjugates
    const double a1 = -2.0 * z.real();
    const double a2 = std::norm(z);
    Quad b = numerators[static_cast<std::size_t>(k)];
    const double g = (1.0 + a1 + a2) / (b[0] + b[1] + b[2]);
    sos.push_back({g * b[0], g * b[1], g * b[2], a1, a2});
  }
  return sos;
}

double sos_magnitude(const std::vector<Biquad>& sos, double f, double fs) {
  const cd z1 = std::polar(1.0, -2.0 * std::numbers::pi * f / fs);
  const cd z2 = z1 * z1;
  cd h = 1.0;
  for (const Biquad& q : sos) h *= (q.b0 + q.b1 * z1 + q.b2 * z2) / (1.0 + q.a1 * z1 + q.a2 * z2);
  return std::abs(h);
}

double butterworth_magnitude(const FilterSpec& spec, double f) {
  return 1.0 / std::sqrt(1.0 + std::pow(f / spec.cutoff_hz, 2.0 * spec.order));
}

std::vector<double> sos_filter(const std::vector<Biquad>& sos, const std::vector<double>& x) {
  std::vector<double> y(x.size());
  if (x.empty()) return y;
  // Deviation from the first sample, filtered from rest: identical to starting
  // each section in its steady state for x[0], and exact for constant input.
  const double x0 = x.front();
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - x0;
  for (const Biquad& q : sos) {
    double s1 = 0.0;
    double s2 = 0.0;
    for (double& v : y) {
      const double in = v;
      const double out = q.b0 * in + s1;
      s1 = q.b1 * in - q.a1 * out + s2;
      s2 = q.b2 * in - q.a2 * out;
      v = out;
    }
  }
  for (double& v : y) v += x0;
  return y;
}

AmplitudeSeries butterworth_lowpass(const AmplitudeSeries& series, const FilterSpec& spec) {
  series.validate();
  const auto sos = butterworth_sos(spec, series.fs);
  return {series.fs, sos_filter(sos, series.values), series.source_subcarrier};
}

void write_amplitude(const std::filesystem::path& path, const AmplitudeSeries& series) {
  std::string out = "# fs=" + std::to_string(std::llround(series.fs)) +
                    " subcarrier=" + std::to_string(series.source_subcarrier) + "\n";
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    out += io::format_double(static_cast<double>(i) / series.fs);
    out += ',';
    out += io::format_double(series.values[i]);
    out += '\n';
  }
  io::write_file_atomic(path, out);
}

AmplitudeSeries read_amplitude(const std::filesystem::path& path) {
  const std::string where = path.string();
  const auto lines = io::split_lines(io::read_file(path));
  if (lines.empty() || lines.front().rfind('#', 0) != 0) {
    fail(ErrorKind::Parse, where + ":1: missing '# fs=<int> subcarrier=<int>' header");
  }
  const std::string fs_text = io::header_value(lines.front(), "fs");
  const std::string sc_text = io::header_value(lines.front(), "subcarrier");
  if (fs_text.empty() || sc_text.empty()) {
    fail(ErrorKind::Parse, where + ":1: header must define fs and subcarrier");
  }
  AmplitudeSeries s;
  s.fs = static_cast<double>(io::parse_int(fs_text, where, 1, "fs"));
  const long long sc = io::parse_int(sc_text, where, 1, "subcarrier");
  if (s.fs <= 0 || sc < 0) fail(ErrorKind::Parse, where + ":1: fs must be > 0, subcarrier >= 0");
  s.source_subcarrier = static_cast<std::size_t>(sc);
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto t = io::trim(lines[k]);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = io::split_fields(t);
    if (fields.size() != 2) {
      fail(ErrorKind::Parse, where + ":" + std::to_string(k + 1) + ": expected t,amplitude");
    }
    io::parse_double(fields[0], where, k + 1, "t");
    s.values.push_back(io::parse_double(fields[1], where, k + 1, "amplitude"));
  }
  return s;
}

}  // namespace besense
