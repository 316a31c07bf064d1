#include "besense/csi_trace.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "besense/error.hpp"
#include "besense/text_io.hpp"

namespace besense {

std::optional<GestureKind> parse_gesture_kind(std::string_view s) {
  if (s == "typing" || s == "keystroke") return GestureKind::Typing;
  if (s == "mouse" || s == "mouse_move") return GestureKind::MouseMove;
  return std::nullopt;
}

std::optional<Behavior> parse_behavior(std::string_view s) {
  for (Behavior b : {Behavior::Surfing, Behavior::Working, Behavior::Gaming, Behavior::Static}) {
    if (s == to_string(b)) return b;
  }
  return std::nullopt;
}

CsiTrace::CsiTrace(double fs, std::size_t subcarriers, std::size_t length)
    : fs_(fs), subcarriers_(subcarriers), length_(length), data_(subcarriers * length) {
  require(std::isfinite(fs) && fs > 0.0, "sampling rate must be positive");
  require(std::floor(fs) == fs, "sampling rate must be an integer number of samples/s");
  require(subcarriers > 0, "trace needs at least one subcarrier");
}

std::span<std::complex<double>> CsiTrace::row(std::size_t s) {
  require(s < subcarriers_, "subcarrier index out of range");
  return {data_.data() + s * length_, length_};
}

std::span<const std::complex<double>> CsiTrace::row(std::size_t s) const {
  require(s < subcarriers_, "subcarrier index out of range");
  return {data_.data() + s * length_, length_};
}

std::vector<double> CsiTrace::amplitude(std::size_t s) const {
  const auto r = row(s);
  std::vector<double> out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = std::abs(r[i]);
  return out;
}

void validate_annotations(const std::vector<Annotation>& annotations, std::size_t length) {
  for (std::size_t k = 0; k < annotations.size(); ++k) {
    const Annotation& a = annotations[k];
    require(a.start_idx <= a.end_idx, "annotation start after end");
    require(a.end_idx < length, "annotation outside the trace");
    if (k > 0) {
      require(annotations[k - 1].end_idx < a.start_idx,
              "annotations must be sorted and disjoint");
    }
  }
}

void CsiTrace::set_annotations(std::vector<Annotation> annotations) {
  validate_annotations(annotations, length_);
  annotations_ = std::move(annotations);
}

void write_trace(const std::filesystem::path& path, const CsiTrace& trace) {
  std::string out;
  out.reserve(trace.length() * trace.subcarriers() * 44 + 64);
  out += "# fs=" + std::to_string(static_cast<long long>(trace.fs())) +
         " subcarriers=" + std::to_string(trace.subcarriers()) + "\n";
  for (std::size_t i = 0; i < trace.length(); ++i) {
    out += io::format_double(static_cast<double>(i) / trace.fs());
    for (std::size_t s = 0; s < trace.subcarriers(); ++s) {
      const auto& h = trace.at(s, i);
      out += ',';
      out += io::format_double(h.real());
      out += ',';
      out += io::format_double(h.imag());
    }
    out += '\n';
  }
  io::write_file_atomic(path, out);
}

CsiTrace read_trace(const std::filesystem::path& path) {
  const std::string where = path.string();
  const auto lines = io::split_lines(io::read_file(path));
  if (lines.empty() || lines.front().rfind('#', 0) != 0) {
    fail(ErrorKind::Parse, where + ":1: missing '# fs=<int> subcarriers=<int>' header");
  }
  const std::string fs_text = io::header_value(lines.front(), "fs");
  const std::string sc_text = io::header_value(lines.front(), "subcarriers");
  if (fs_text.empty() || sc_text.empty()) {
    fail(ErrorKind::Parse, where + ":1: header must define fs and subcarriers");
  }
  const long long fs = io::parse_int(fs_text, where, 1, "fs");
  const long long sc = io::parse_int(sc_text, where, 1, "subcarriers");
  if (fs <= 0 || sc <= 0) fail(ErrorKind::Parse, where + ":1: fs and subcarriers must be > 0");

  std::vector<std::size_t> rows;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto t = io::trim(lines[k]);
    if (!t.empty() && t.front() != '#') rows.push_back(k);
  }
  CsiTrace trace(static_cast<double>(fs), static_cast<std::size_t>(sc), rows.size());
  const std::size_t expected = 1 + 2 * static_cast<std::size_t>(sc);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t lineno = rows[i] + 1;
    const auto fields = io::split_fields(lines[rows[i]]);
    if (fields.size() != expected) {
      std::ostringstream msg;
      msg << where << ":" << lineno << ": expected " << expected << " columns, got "
          << fields.size();
      fail(ErrorKind::Parse, msg.str());
    }
    io::parse_double(fields[0], where, lineno, "t");
    for (std::size_t s = 0; s < static_cast<std::size_t>(sc); ++s) {
      const std::string idx = std::to_string(s + 1);
      const double re = io::parse_double(fields[1 + 2 * s], where, lineno, "re_" + idx);
      const double im = io::parse_double(fields[2 + 2 * s], where, lineno, "im_" + idx);
      trace.at(s, i) = {re, im};
    }
  }
  return trace;
}

void write_annotations(const std::filesystem::path& path, const CsiTrace& trace) {
  std::string out;
  if (trace.session_behavior()) {
    out += "# behavior=" + std::string(to_string(*trace.session_behavior())) + "\n";
  }
  for (const auto& a : trace.annotations()) {
    out += std::to_string(a.start_idx) + "," + std::to_string(a.end_idx) + "," +
           std::string(to_string(a.label)) + "\n";
  }
  io::write_file_atomic(path, out);
}

void read_annotations(const std::filesystem::path& path, CsiTrace& trace) {
  const std::string where = path.string();
  const auto lines = io::split_lines(io::read_file(path));
  std::vector<Annotation> anns;
  std::optional<Behavior> behavior;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const auto t = io::trim(lines[k]);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const std::string b = io::header_value(t, "behavior");
      if (!b.empty()) {
        behavior = parse_behavior(b);
        if (!behavior) {
          fail(ErrorKind::Parse, where + ":" + std::to_string(k + 1) + ": unknown behavior '" +
                                     b + "'");
        }
      }
      continue;
    }
    const auto fields = io::split_fields(t);
    if (fields.size() != 3) {
      fail(ErrorKind::Parse,
           where + ":" + std::to_string(k + 1) + ": expected start_idx,end_idx,label");
    }
    const long long s = io::parse_int(fields[0], where, k + 1, "start_idx");
    const long long e = io::parse_int(fields[1], where, k + 1, "end_idx");
    const auto label = parse_gesture_kind(fields[2]);
    if (s < 0 || e < 0) {
      fail(ErrorKind::Parse, where + ":" + std::to_string(k + 1) + ": negative index");
    }
    if (!label) {
      fail(ErrorKind::Parse, where + ":" + std::to_string(k + 1) + ": field 'label': unknown '" +
                                 std::string(fields[2]) + "'");
    }
    anns.push_back({static_cast<std::size_t>(s), static_cast<std::size_t>(e), *label});
  }
  try {
    trace.set_annotations(std::move(anns));
  } catch (const Error& e) {
    fail(ErrorKind::Parse, where + ": " + e.what());
  }
  trace.set_session_behavior(behavior);
}

std::filesystem::path annotation_path_for(const std::filesystem::path& trace_path) {
  auto p = trace_path;
  p.replace_extension(".ann");
  return p;
}

}  // namespace besense
