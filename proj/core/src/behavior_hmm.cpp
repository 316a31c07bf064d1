#include "besense/behavior_hmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <json.hpp>

#include "besense/error.hpp"
#include "besense/rng.hpp"
#include "besense/text_io.hpp"

namespace besense {

using nlohmann::json;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::size_t sym(GestureKind g) { return static_cast<std::size_t>(g); }

void require_distribution(const Vec2& v, const std::string& what) {
  require(std::isfinite(v[0]) && std::isfinite(v[1]) && v[0] >= 0.0 && v[1] >= 0.0,
          what + " entries must be finite and >= 0");
  require(std::abs(v[0] + v[1] - 1.0) <= 1e-12, what + " must sum to 1");
}

// Scaled forward/backward pass of one sequence. Returns false when impossible.
struct Pass {
  std::vector<Vec2> alpha;  // normalized
  std::vector<Vec2> beta;   // scaled by the same factors
  std::vector<double> scale;
  double log_likelihood = 0.0;
};

bool forward(const Vec2& pi, const Mat2& A, const Mat2& B, const Symbols& obs, Pass& p) {
  const std::size_t T = obs.size();
  p.alpha.assign(T, {});
  p.scale.assign(T, 0.0);
  p.log_likelihood = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t o = sym(obs[t]);
    for (std::size_t j = 0; j < 2; ++j) {
      const double prior = t == 0 ? pi[j]
                                  : p.alpha[t - 1][0] * A[0][j] + p.alpha[t - 1][1] * A[1][j];
      p.alpha[t][j] = prior * B[j][o];
    }
    const double c = p.alpha[t][0] + p.alpha[t][1];
    if (!(c > 0.0)) {
      p.log_likelihood = kNegInf;
      return false;
    }
    p.scale[t] = c;
    p.alpha[t][0] /= c;
    p.alpha[t][1] /= c;
    p.log_likelihood += std::log(c);
  }
  return true;
}

void backward(const Mat2& A, const Mat2& B, const Symbols& obs, Pass& p) {
  const std::size_t T = obs.size();
  p.beta.assign(T, {1.0, 1.0});
  for (std::size_t t = T - 1; t-- > 0;) {
    const std::size_t o = sym(obs[t + 1]);
    for (std::size_t i = 0; i < 2; ++i) {
      p.beta[t][i] = (A[i][0] * B[0][o] * p.beta[t + 1][0] +
                      A[i][1] * B[1][o] * p.beta[t + 1][1]) /
                     p.scale[t + 1];
    }
  }
}

}  // namespace

void BehaviorHmm::validate() const {
  require_distribution(pi, "pi");
  require_distribution(A[0], "A row 0");
  require_distribution(A[1], "A row 1");
  require_distribution(B[0], "B row 0");
  require_distribution(B[1], "B row 1");
}

ForwardResult forward_log_likelihood(const BehaviorHmm& hmm, const Symbols& obs) {
  require(!obs.empty(), "gesture sequence must not be empty");
  Pass p;
  const bool ok = forward(hmm.pi, hmm.A, hmm.B, obs, p);
  return {p.log_likelihood, !ok};
}

BaumWelchResult baum_welch(const std::vector<Symbols>& sequences, const Mat2& B, const Vec2& pi,
                           const Mat2& initial_A, const BaumWelchOptions& options) {
  require(!sequences.empty(), "Baum-Welch needs at least one sequence");
  for (const auto& s : sequences) require(!s.empty(), "gesture sequence must not be empty");
  require(options.max_iter >= 1, "max_iter must be >= 1");
  require(std::isfinite(options.tol) && options.tol >= 0.0, "tol must be >= 0");
  BehaviorHmm check;
  check.pi = pi;
  check.A = initial_A;
  check.B = B;
  check.validate();

  BaumWelchResult r;
  r.A = initial_A;
  Pass p;
  for (std::size_t it = 0;; ++it) {
    Mat2 num{};
    double total = 0.0;
    bool possible = true;
    for (const auto& obs : sequences) {
      if (!forward(pi, r.A, B, obs, p)) {
        possible = false;
        break;
      }
      total += p.log_likelihood;
      backward(r.A, B, obs, p);
      for (std::size_t t = 0; t + 1 < obs.size(); ++t) {
        const std::size_t o = sym(obs[t + 1]);
        for (std::size_t i = 0; i < 2; ++i) {
          for (std::size_t j = 0; j < 2; ++j) {
            num[i][j] += p.alpha[t][i] * r.A[i][j] * B[j][o] * p.beta[t + 1][j] / p.scale[t + 1];
          }
        }
      }
    }
    if (!possible) {
      r.log_likelihood.push_back(kNegInf);
      r.at_boundary = true;
      return r;
    }
    r.log_likelihood.push_back(total);
    const std::size_t n = r.log_likelihood.size();
    if (n >= 2 && r.log_likelihood[n - 1] - r.log_likelihood[n - 2] < options.tol) {
      r.converged = true;
      break;
    }
    if (it == options.max_iter) break;
    for (std::size_t i = 0; i < 2; ++i) {
      const double row = num[i][0] + num[i][1];
      if (row > 0.0) {
        r.A[i][0] = num[i][0] / row;
        r.A[i][1] = 1.0 - r.A[i][0];
      }
    }
    ++r.iterations;
  }
  for (const auto& row : r.A) {
    for (double v : row) {
      if (v < 1e-12) r.at_boundary = true;
    }
  }
  return r;
}

Mat2 build_emission(const Confusion& counts) {
  require(counts[0][0] + counts[0][1] > 0 && counts[1][0] + counts[1][1] > 0,
          "every true class needs at least one count");
  bool zero = false;
  for (const auto& row : counts) {
    for (std::size_t v : row) zero = zero || v == 0;
  }
  const double add = zero ? 1.0 : 0.0;
  Mat2 B{};
  for (std::size_t i = 0; i < 2; ++i) {
    const double a = static_cast<double>(counts[i][0]) + add;
    const double b = static_cast<double>(counts[i][1]) + add;
    B[i][0] = a / (a + b);
    B[i][1] = b / (a + b);
  }
  return B;
}

Vec2 estimate_initial(const std::vector<Symbols>& sequences) {
  Vec2 c{1.0, 1.0};
  for (const auto& s : sequences) {
    if (!s.empty()) c[sym(s.front())] += 1.0;
  }
  const double n = c[0] + c[1];
  return {c[0] / n, c[1] / n};
}

std::vector<BehaviorHmm> fit_behavior_models(const std::vector<BehaviorTraining>& training,
                                             const Mat2& B, std::optional<Vec2> pi,
                                             const BaumWelchOptions& options,
                                             const Mat2& initial_A) {
  require(!training.empty(), "need training data for at least one behavior");
  std::vector<BehaviorHmm> out;
  for (const auto& t : training) {
    require(!t.sequences.empty(),
            "behavior '" + std::string(to_string(t.behavior)) + "' has no training sequences");
    BehaviorHmm m;
    m.behavior = t.behavior;
    m.B = B;
    m.pi = pi ? *pi : estimate_initial(t.sequences);
    m.A = baum_welch(t.sequences, B, m.pi, initial_A, options).A;
    out.push_back(m);
  }
  return out;
}

std::string_view to_string(BehaviorMethod m) {
  return m == BehaviorMethod::Likelihood ? "likelihood" : "model_distance";
}

std::optional<BehaviorMethod> parse_behavior_method(std::string_view s) {
  if (s == "likelihood") return BehaviorMethod::Likelihood;
  if (s == "model_distance") return BehaviorMethod::ModelDistance;
  return std::nullopt;
}

BehaviorDecision classify_behavior(const std::vector<BehaviorHmm>& models, const Symbols& obs,
                                   const ClassifyOptions& options) {
  require(models.size() >= 2, "behavior classification needs at least two models");
  require(!obs.empty(), "gesture sequence must not be empty");

  // Score used for the decision: larger is better.
  std::vector<double> score(models.size());
  std::vector<double> reported(models.size());
  if (options.method == BehaviorMethod::Likelihood) {
    const double T = static_cast<double>(obs.size());
    for (std::size_t m = 0; m < models.size(); ++m) {
      const auto f = forward_log_likelihood(models[m], obs);
      score[m] = f.impossible ? kNegInf : f.log_likelihood / T;
      reported[m] = score[m];
    }
  } else {
    BehaviorHmm candidate;
    candidate.B = models.front().B;
    candidate.pi = estimate_initial({obs});
    candidate.A = baum_welch({obs}, candidate.B, candidate.pi, kDefaultInitialA,
                             options.baum_welch)
                      .A;
    const Symbols oc = sample_observations(candidate, options.synthetic_length, options.seed);
    const double T = static_cast<double>(oc.size());
    const auto self = forward_log_likelihood(candidate, oc);
    for (std::size_t m = 0; m < models.size(); ++m) {
      const auto f = forward_log_likelihood(models[m], oc);
      const double d = f.impossible || self.impossible
                           ? std::numeric_limits<double>::infinity()
                           : (self.log_likelihood - f.log_likelihood) / T;
      reported[m] = d;
      score[m] = -d;
    }
  }

  BehaviorDecision out;
  // Best model per behavior, behaviors in enum (tie-break) order.
  std::optional<std::size_t> winner;
  for (int b = 0; b <= static_cast<int>(Behavior::Static); ++b) {
    std::optional<std::size_t> best;
    for (std::size_t m = 0; m < models.size(); ++m) {
      if (static_cast<int>(models[m].behavior) != b) continue;
      if (!best || score[m] > score[*best]) best = m;
    }
    if (!best) continue;
    out.scores.push_back({static_cast<Behavior>(b), reported[*best]});
    if (score[*best] == kNegInf) continue;
    if (!winner || score[*best] > score[*winner]) {
      winner = best;
    }
  }
  if (!winner) {
    out.unclassifiable = true;
    return out;
  }
  out.behavior = models[*winner].behavior;
  std::size_t at_max = 0;
  for (const auto& s : out.scores) {
    const double sc = options.method == BehaviorMethod::Likelihood ? s.score : -s.score;
    if (sc == score[*winner]) ++at_max;
  }
  out.tie = at_max > 1;
  return out;
}

BehaviorProfile make_profile(Behavior behavior, double p_typing, double mean_run) {
  require(p_typing > 0.0 && p_typing < 1.0, "typing share must lie in (0, 1)");
  const double alpha = 1.0 / (2.0 * mean_run * p_typing);
  const double beta = 1.0 / (2.0 * mean_run * (1.0 - p_typing));
  require(alpha <= 1.0 && beta <= 1.0, "mean run length too short for this typing share");
  BehaviorProfile p;
  p.behavior = behavior;
  p.A = {{{1.0 - alpha, alpha}, {beta, 1.0 - beta}}};
  p.pi = stationary(p.A);
  return p;
}

BehaviorProfile default_profile(Behavior behavior) {
  switch (behavior) {
    case Behavior::Surfing: return make_profile(behavior, 0.25, 6.0);
    case Behavior::Working: return make_profile(behavior, 0.65, 6.0);
    case Behavior::Gaming: return make_profile(behavior, 0.50, 2.0);
    case Behavior::Static: return make_profile(behavior, 0.50, 10.0);
  }
  fail(ErrorKind::InvalidArgument, "unknown behavior");
}

Vec2 stationary(const Mat2& A) {
  const double a = A[0][1];
  const double b = A[1][0];
  require(a + b > 0.0, "chain has no unique stationary distribution");
  return {b / (a + b), a / (a + b)};
}

namespace {

std::size_t draw(const Vec2& p, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return u(rng) < p[0] ? 0 : 1;
}

}  // namespace

GestureSequence sample_behavior_sequence(const BehaviorProfile& profile, const Mat2& B,
                                         std::size_t length, std::uint64_t seed) {
  require(length >= 1, "sequence length must be >= 1");
  Rng rng(seed);
  GestureSequence s;
  s.behavior = profile.behavior;
  std::size_t state = draw(profile.pi, rng);
  for (std::size_t t = 0; t < length; ++t) {
    if (t > 0) state = draw(profile.A[state], rng);
    s.hidden.push_back(kGestureKinds[state]);
    s.observations.push_back(kGestureKinds[draw(B[state], rng)]);
  }
  return s;
}

Symbols sample_observations(const BehaviorHmm& hmm, std::size_t length, std::uint64_t seed) {
  BehaviorProfile p{hmm.behavior, hmm.pi, hmm.A};
  return sample_behavior_sequence(p, hmm.B, length, seed).observations;
}

std::string hmms_to_json(const std::vector<BehaviorHmm>& models) {
  json arr = json::array();
  for (const auto& m : models) {
    arr.push_back({{"behavior", std::string(to_string(m.behavior))},
                   {"pi", m.pi},
                   {"A", m.A},
                   {"B", m.B}});
  }
  return json{{"models", arr}}.dump(2) + "\n";
}

std::vector<BehaviorHmm> hmms_from_json(std::string_view text, std::string_view where) {
  std::vector<BehaviorHmm> out;
  try {
    const json j = json::parse(text);
    for (const auto& m : j.at("models")) {
      BehaviorHmm h;
      const auto b = parse_behavior(m.at("behavior").get<std::string>());
      if (!b) fail(ErrorKind::Parse, std::string(where) + ": unknown behavior");
      h.behavior = *b;
      h.pi = m.at("pi").get<Vec2>();
      h.A = m.at("A").get<Mat2>();
      h.B = m.at("B").get<Mat2>();
      try {
        h.validate();
      } catch (const Error& e) {
        fail(ErrorKind::Parse, std::string(where) + ": " + e.what());
      }
      out.push_back(h);
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string(where) + ": " + e.what());
  }
  return out;
}

void save_hmms(const std::filesystem::path& path, const std::vector<BehaviorHmm>& models) {
  io::write_file_atomic(path, hmms_to_json(models));
}

std::vector<BehaviorHmm> load_hmms(const std::filesystem::path& path) {
  return hmms_from_json(io::read_file(path), path.string());
}

void write_sequence(const std::filesystem::path& path, const GestureSequence& seq) {
  std::string out;
  if (seq.behavior) out += "# behavior=" + std::string(to_string(*seq.behavior)) + "\n";
  for (GestureKind g : seq.observations) out += std::string(to_string(g)) + "\n";
  io::write_file_atomic(path, out);
}

GestureSequence read_sequence(const std::filesystem::path& path) {
  const std::string where = path.string();
  const auto lines = io::split_lines(io::read_file(path));
  GestureSequence s;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const auto t = io::trim(lines[k]);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const std::string b = io::header_value(t, "behavior");
      if (!b.empty()) {
        s.behavior = parse_behavior(b);
        if (!s.behavior) {
          fail(ErrorKind::Parse, where + ":" + std::to_string(k + 1) + ": unknown behavior '" + b + "'");
        }
      }
      continue;
    }
    const auto g = parse_gesture_kind(t);
    if (!g) {
      fail(ErrorKind::Parse,
           where + ":" + std::to_string(k + 1) + ": unknown symbol '" + std::string(t) + "'");
    }
    s.observations.push_back(*g);
  }
  if (s.observations.empty()) fail(ErrorKind::Parse, where + ": sequence is empty");
  return s;
}

}  // namespace besense
