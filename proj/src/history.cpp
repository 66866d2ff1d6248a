#include "bmg/history.hpp"

#include <algorithm>

namespace bmg {

HistoryView::HistoryView(std::span<const Outcome> head, std::span<const Outcome> tail)
    : head_(head), tail_(tail) {
  if (head_.empty()) {
    head_ = tail_;
    tail_ = {};
  }
}

HistoryView HistoryView::window(std::size_t k) const {
  const std::size_t n = size();
  if (k >= n) return *this;
  const std::size_t drop = n - k;
  if (drop >= head_.size()) return HistoryView(tail_.subspan(drop - head_.size()));
  return HistoryView(head_.subspan(drop), tail_);
}

HistoryView HistoryView::prefix(std::size_t k) const {
  if (k >= size()) return *this;
  if (k <= head_.size()) return HistoryView(head_.first(k));
  return HistoryView(head_, tail_.first(k - head_.size()));
}

std::vector<Outcome> HistoryView::to_vector() const {
  std::vector<Outcome> out(head_.begin(), head_.end());
  out.insert(out.end(), tail_.begin(), tail_.end());
  return out;
}

bool operator==(const HistoryView& a, const HistoryView& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return false;
  }
  return true;
}

History History::concat(HistoryView tail) const {
  std::vector<Outcome> out = outcomes_;
  for (std::size_t i = 0; i < tail.size(); ++i) out.push_back(tail[i]);
  return History(std::move(out));
}

}  // namespace bmg
