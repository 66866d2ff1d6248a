#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "bmg/history.hpp"
#include "bmg/types.hpp"

namespace bmg {

/// A white-box adversary: a function of the visible window and the round index.
///
/// For adaptiveness k, act(H) with t = |H| evaluates fn(H_i, t) where H_i is the
/// last i = t mod (k+1) outcomes. Older outcomes never reach fn. With k = kUnbounded
/// fn sees the whole history.
class AdversaryStrategy {
 public:
  using WindowFn = std::function<AdversaryAction(HistoryView window, std::size_t round)>;

  AdversaryStrategy(WindowFn fn, std::size_t adaptiveness, std::string name = "adversary");

  /// Action at round t = history.size().
  AdversaryAction act(HistoryView history) const;
  /// Action at round t when only the visible window is at hand (|window| must be >= i).
  AdversaryAction act_window(HistoryView window, std::size_t round) const;

  std::size_t adaptiveness() const { return k_; }
  bool oblivious() const { return k_ == 0; }
  const std::string& name() const { return name_; }

 private:
  WindowFn fn_;
  std::size_t k_;
  std::string name_;
};

AdversaryStrategy oblivious_from_sequence(std::vector<AdversaryAction> seq, std::string name = "script");
AdversaryStrategy oblivious(std::function<AdversaryAction(std::size_t round)> fn, std::string name = "oblivious");
AdversaryStrategy k_adaptive(AdversaryStrategy::WindowFn fn, std::size_t k, std::string name = "k-adaptive");
AdversaryStrategy fully_adaptive(std::function<AdversaryAction(HistoryView history)> fn, std::string name = "adaptive");

/// Outcome record of an actual run, paired with the strategy that produced it.
struct RecordedPlay {
  std::vector<Outcome> real_history;
  AdversaryStrategy real_strategy;
};

/// Counterfactual adversary: replays the recorded prefix H^{t-i} and adapts
/// only to the counterfactual window. Throws std::out_of_range when a query
/// would need more recorded history than exists.
AdversaryStrategy hypothetical_k_adaptive(RecordedPlay rec, std::size_t k);

/// Speeding-game tourists with window length k (adaptiveness k).
/// A1 opens each window with DS, A2 with S; afterwards both play DS iff an HI
/// inspection appears in the current window.
AdversaryStrategy tourist_a1(std::size_t k);
AdversaryStrategy tourist_a2(std::size_t k);
/// A1 on even windows, A2 on odd ones.
AdversaryStrategy tourist_alternating(std::size_t k);

/// Newline-delimited integer action file; '#' starts a comment.
std::vector<AdversaryAction> read_action_script(const std::filesystem::path& path);

}  // namespace bmg
