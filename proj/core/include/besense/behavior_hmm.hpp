#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "besense/classifier.hpp"
#include "besense/labels.hpp"

namespace besense {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<Vec2, 2>;

/// Two hidden states (0 typing, 1 mouse) observed through classifier output.
struct BehaviorHmm {
  Behavior behavior = Behavior::Surfing;
  Vec2 pi{0.5, 0.5};
  Mat2 A{{{0.5, 0.5}, {0.5, 0.5}}};
  Mat2 B{{{1.0, 0.0}, {0.0, 1.0}}};  // B[true][observed]

  /// Throws unless pi and every row of A and B are probability vectors (1e-12).
  void validate() const;
  friend bool operator==(const BehaviorHmm&, const BehaviorHmm&) = default;
};

using Symbols = std::vector<GestureKind>;

struct GestureSequence {
  Symbols observations;
  Symbols hidden;  // empty unless synthetic
  std::optional<Behavior> behavior;
};

struct ForwardResult {
  double log_likelihood = 0.0;  // -inf when impossible
  bool impossible = false;
};

/// log P(O | model) by the scaled forward recursion. Throws on empty input.
ForwardResult forward_log_likelihood(const BehaviorHmm& hmm, const Symbols& obs);

struct BaumWelchResult {
  Mat2 A{};
  std::vector<double> log_likelihood;  // total, before each update and after the last
  std::size_t iterations = 0;
  bool converged = false;
  bool at_boundary = false;  // some transition probability collapsed to 0
};

struct BaumWelchOptions {
  std::size_t max_iter = 200;
  double tol = 1e-6;
};

/// EM re-estimation of A only; pi and B stay fixed. A row whose state is never
/// visited before the last step keeps its previous value.
BaumWelchResult baum_welch(const std::vector<Symbols>& sequences, const Mat2& B, const Vec2& pi,
                           const Mat2& initial_A, const BaumWelchOptions& options = {});

/// Row-normalized confusion counts, with one added to every cell when any cell is 0.
Mat2 build_emission(const Confusion& counts);

/// First-observation frequencies with add-one smoothing.
Vec2 estimate_initial(const std::vector<Symbols>& sequences);

struct BehaviorTraining {
  Behavior behavior = Behavior::Surfing;
  std::vector<Symbols> sequences;
};

inline constexpr Mat2 kDefaultInitialA{{{0.7, 0.3}, {0.3, 0.7}}};

/// One Baum-Welch-trained model per behavior. pi comes from each behavior's
/// first-gesture counts unless given.
std::vector<BehaviorHmm> fit_behavior_models(const std::vector<BehaviorTraining>& training,
                                             const Mat2& B, std::optional<Vec2> pi = std::nullopt,
                                             const BaumWelchOptions& options = {},
                                             const Mat2& initial_A = kDefaultInitialA);

enum class BehaviorMethod {
  Likelihood,     // argmax log P(O | model) / T
  ModelDistance,  // fit a model to O, argmin likelihood distance to each model
};

std::string_view to_string(BehaviorMethod m);
std::optional<BehaviorMethod> parse_behavior_method(std::string_view s);

struct ClassifyOptions {
  BehaviorMethod method = BehaviorMethod::Likelihood;
  std::uint64_t seed = 0;                 // ModelDistance: synthetic sequence draw
  std::size_t synthetic_length = 1000;    // ModelDistance: length of that sequence
  BaumWelchOptions baum_welch;
};

struct BehaviorScore {
  Behavior behavior = Behavior::Surfing;
  double score = 0.0;  // normalized log-likelihood, or distance for ModelDistance
};

struct BehaviorDecision {
  std::optional<Behavior> behavior;  // empty when unclassifiable
  std::vector<BehaviorScore> scores;
  bool tie = false;
  bool unclassifiable = false;
};

/// Ties resolve Surfing < Working < Gaming and are flagged.
BehaviorDecision classify_behavior(const std::vector<BehaviorHmm>& models, const Symbols& obs,
                                   const ClassifyOptions& options = {});

/// Simulator-side hidden chain of one behavior.
struct BehaviorProfile {
  Behavior behavior = Behavior::Surfing;
  Vec2 pi{};
  Mat2 A{};
};

/// Chain with stationary P(typing) = p_typing and mean run length mean_run:
/// P(typing->mouse) = 1/(2 R p), P(mouse->typing) = 1/(2 R (1-p)), pi stationary.
BehaviorProfile make_profile(Behavior behavior, double p_typing, double mean_run);

/// Surfing p=0.25 R=6, Working p=0.65 R=6, Gaming p=0.5 R=2, Static p=0.5 R=10.
BehaviorProfile default_profile(Behavior behavior);

/// Stationary distribution of a two-state chain.
Vec2 stationary(const Mat2& A);

/// Samples the hidden chain and emits through B; the same seed gives the same sequence.
GestureSequence sample_behavior_sequence(const BehaviorProfile& profile, const Mat2& B,
                                         std::size_t length, std::uint64_t seed);
Symbols sample_observations(const BehaviorHmm& hmm, std::size_t length, std::uint64_t seed);

std::string hmms_to_json(const std::vector<BehaviorHmm>& models);
std::vector<BehaviorHmm> hmms_from_json(std::string_view text, std::string_view where = "models");
void save_hmms(const std::filesystem::path& path, const std::vector<BehaviorHmm>& models);
std::vector<BehaviorHmm> load_hmms(const std::filesystem::path& path);

/// One symbol per line; an optional "# behavior=<name>" comment labels the sequence.
void write_sequence(const std::filesystem::path& path, const GestureSequence& seq);
GestureSequence read_sequence(const std::filesystem::path& path);

}  // namespace besense
