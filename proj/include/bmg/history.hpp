#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bmg/types.hpp"

namespace bmg {

/// Read-only view of an outcome history made of up to two contiguous pieces,
/// so that a recorded prefix can be spliced with a counterfactual window
/// without copying.
class HistoryView {
 public:
  HistoryView() = default;
  HistoryView(std::span<const Outcome> whole) : head_(whole) {}  // NOLINT(implicit)
  HistoryView(std::span<const Outcome> head, std::span<const Outcome> tail);

  std::size_t size() const { return head_.size() + tail_.size(); }
  bool empty() const { return size() == 0; }

  Outcome operator[](std::size_t i) const {
    return i < head_.size() ? head_[i] : tail_[i - head_.size()];
  }
  Outcome back() const { return (*this)[size() - 1]; }

  /// The min(k, size) most recent outcomes, order preserved.
  HistoryView window(std::size_t k) const;
  /// The first min(k, size) outcomes.
  HistoryView prefix(std::size_t k) const;

  bool contiguous() const { return tail_.empty() || head_.empty(); }
  std::span<const Outcome> head() const { return head_; }
  std::span<const Outcome> tail() const { return tail_; }

  std::vector<Outcome> to_vector() const;

  friend bool operator==(const HistoryView& a, const HistoryView& b);

 private:
  std::span<const Outcome> head_;
  std::span<const Outcome> tail_;
};

/// Owning outcome sequence H = (O^1, ..., O^t).
class History {
 public:
  History() = default;
  explicit History(std::vector<Outcome> outcomes) : outcomes_(std::move(outcomes)) {}

  void push_back(Outcome o) { outcomes_.push_back(o); }
  std::size_t size() const { return outcomes_.size(); }
  Outcome operator[](std::size_t i) const { return outcomes_[i]; }

  HistoryView view() const { return HistoryView(std::span<const Outcome>(outcomes_)); }
  HistoryView window(std::size_t k) const { return view().window(k); }
  HistoryView prefix(std::size_t k) const { return view().prefix(k); }
  const std::vector<Outcome>& outcomes() const { return outcomes_; }

  /// H ; H' concatenation.
  History concat(HistoryView tail) const;

  bool operator==(const History&) const = default;

 private:
  std::vector<Outcome> outcomes_;
};

}  // namespace bmg
