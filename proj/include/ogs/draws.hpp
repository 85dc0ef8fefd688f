#pragma once

#include <cstdint>
#include <memory>

#include "ogs/rng.hpp"

namespace ogs {

// Activation threshold multiplier: value (1 - k/K)^+ drawn with probability
// 2^-(k+1) for k >= 0 (all mass with k >= K collapses onto 0).
struct ThresholdDraw {
  double tau_bar = 0.0;
  int k = 0;
  int granularity = 1;
};

ThresholdDraw sample_threshold_multiplier(int granularity, Rng& rng);

// All randomness an engine consumes, addressed by (machine, purpose) so a
// replay can fix everything except one machine's draw. Tags passed to pick()
// and coin() identify the purpose; machine -1 addresses engine-level draws.
class DrawSource {
 public:
  virtual ~DrawSource() = default;
  virtual ThresholdDraw threshold(int machine, int granularity) = 0;
  virtual int pick(int machine, std::uint64_t tag, int count) = 0;
  virtual bool coin(int machine, std::uint64_t tag) = 0;
  virtual std::unique_ptr<DrawSource> child(std::uint64_t tag) const = 0;
};

// Purpose tags.
inline constexpr std::uint64_t kTagThreshold = 1;
inline constexpr std::uint64_t kTagGuess = 2;
inline constexpr std::uint64_t kTagGuessBranch = 3;
inline constexpr std::uint64_t kTagWrapperCoin = 4;
inline constexpr std::uint64_t kTagBudgetPick = 5;

class KeyedDrawSource final : public DrawSource {
 public:
  explicit KeyedDrawSource(std::uint64_t key) : root_(key) {}
  explicit KeyedDrawSource(const Rng& rng) : root_(rng) {}

  ThresholdDraw threshold(int machine, int granularity) override {
    Rng r = stream(machine, kTagThreshold);
    return sample_threshold_multiplier(granularity, r);
  }
  int pick(int machine, std::uint64_t tag, int count) override {
    Rng r = stream(machine, tag);
    return static_cast<int>(r.below(static_cast<std::uint64_t>(count)));
  }
  bool coin(int machine, std::uint64_t tag) override {
    Rng r = stream(machine, tag);
    return r.coin();
  }
  std::unique_ptr<DrawSource> child(std::uint64_t tag) const override {
    return std::make_unique<KeyedDrawSource>(root_.child(tag));
  }

 private:
  Rng stream(int machine, std::uint64_t tag) const {
    return root_.child((static_cast<std::uint64_t>(machine + 1) << 8) ^ tag);
  }
  Rng root_;
};

// Replays a base source with one machine's threshold multiplier forced.
class ForcedThresholdSource final : public DrawSource {
 public:
  ForcedThresholdSource(std::unique_ptr<DrawSource> base, int machine,
                        ThresholdDraw forced)
      : base_(std::move(base)), machine_(machine), forced_(forced) {}

  ThresholdDraw threshold(int machine, int granularity) override {
    if (machine == machine_) return forced_;
    return base_->threshold(machine, granularity);
  }
  int pick(int machine, std::uint64_t tag, int count) override {
    return base_->pick(machine, tag, count);
  }
  bool coin(int machine, std::uint64_t tag) override {
    return base_->coin(machine, tag);
  }
  std::unique_ptr<DrawSource> child(std::uint64_t tag) const override {
    return base_->child(tag);
  }

 private:
  std::unique_ptr<DrawSource> base_;
  int machine_;
  ThresholdDraw forced_;
};

}  // namespace ogs
