#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "besense/labels.hpp"

namespace besense {

/// Ground-truth interval [start_idx, end_idx] (inclusive) of one scripted gesture.
struct Annotation {
  std::size_t start_idx = 0;
  std::size_t end_idx = 0;
  GestureKind label = GestureKind::Typing;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

/// Uniformly sampled multi-subcarrier channel response.
///
/// Samples are stored subcarrier-major: row s holds the T complex values of
/// subcarrier s. Subcarrier indices are 0-based throughout the library.
class CsiTrace {
 public:
  CsiTrace() = default;
  /// Zero-filled trace. fs must be positive and integral (the file header stores an integer).
  CsiTrace(double fs, std::size_t subcarriers, std::size_t length);

  double fs() const { return fs_; }
  std::size_t subcarriers() const { return subcarriers_; }
  std::size_t length() const { return length_; }
  bool empty() const { return length_ == 0 || subcarriers_ == 0; }

  std::span<std::complex<double>> row(std::size_t s);
  std::span<const std::complex<double>> row(std::size_t s) const;
  std::complex<double>& at(std::size_t s, std::size_t i) { return data_[s * length_ + i]; }
  const std::complex<double>& at(std::size_t s, std::size_t i) const {
    return data_[s * length_ + i];
  }

  /// |H| of one subcarrier.
  std::vector<double> amplitude(std::size_t s) const;

  const std::vector<Annotation>& annotations() const { return annotations_; }
  /// Throws unless annotations are sorted, disjoint and inside [0, length).
  void set_annotations(std::vector<Annotation> annotations);

  /// Optional session label (e.g. the behavior a simulated session was drawn from).
  const std::optional<Behavior>& session_behavior() const { return session_behavior_; }
  void set_session_behavior(std::optional<Behavior> b) { session_behavior_ = b; }

  friend bool operator==(const CsiTrace&, const CsiTrace&) = default;

 private:
  double fs_ = 0.0;
  std::size_t subcarriers_ = 0;
  std::size_t length_ = 0;
  std::vector<std::complex<double>> data_;
  std::vector<Annotation> annotations_;
  std::optional<Behavior> session_behavior_;
};

void validate_annotations(const std::vector<Annotation>& annotations, std::size_t length);

/// Text table: header "# fs=<int> subcarriers=<int>", then one row per sample
/// "t,re_1,im_1,...,re_S,im_S" at round-trip precision.
void write_trace(const std::filesystem::path& path, const CsiTrace& trace);
CsiTrace read_trace(const std::filesystem::path& path);

/// Sidecar: one "start_idx,end_idx,label" line per annotation. An optional
/// "# behavior=<name>" comment carries the session label.
void write_annotations(const std::filesystem::path& path, const CsiTrace& trace);
/// Reads the sidecar into an existing trace (validating ranges against it).
void read_annotations(const std::filesystem::path& path, CsiTrace& trace);

/// Conventional sidecar path: trace.csv -> trace.ann
std::filesystem::path annotation_path_for(const std::filesystem::path& trace_path);

}  // namespace besense
