#include "bmg/adversary.hpp"

#include <fstream>
#include <sstream>

#include "bmg/errors.hpp"
#include "bmg/game.hpp"

namespace bmg {

AdversaryStrategy::AdversaryStrategy(WindowFn fn, std::size_t adaptiveness, std::string name)
    : fn_(std::move(fn)), k_(adaptiveness), name_(std::move(name)) {
  if (!fn_) throw std::invalid_argument("AdversaryStrategy: empty function");
}

AdversaryAction AdversaryStrategy::act(HistoryView history) const {
  const std::size_t t = history.size();
  return fn_(history.window(window_position(t, k_)), t);
}

AdversaryAction AdversaryStrategy::act_window(HistoryView window, std::size_t round) const {
  const std::size_t i = window_position(round, k_);
  if (window.size() < i) throw std::invalid_argument("act_window: window shorter than t mod (k+1)");
  return fn_(window.window(i), round);
}

AdversaryStrategy oblivious_from_sequence(std::vector<AdversaryAction> seq, std::string name) {
  if (seq.empty()) throw InputError("oblivious adversary needs a nonempty action sequence");
  auto shared = std::make_shared<const std::vector<AdversaryAction>>(std::move(seq));
  return AdversaryStrategy([shared](HistoryView, std::size_t t) { return (*shared)[t % shared->size()]; }, 0,
                           std::move(name));
}

AdversaryStrategy oblivious(std::function<AdversaryAction(std::size_t)> fn, std::string name) {
  return AdversaryStrategy([fn = std::move(fn)](HistoryView, std::size_t t) { return fn(t); }, 0, std::move(name));
}

AdversaryStrategy k_adaptive(AdversaryStrategy::WindowFn fn, std::size_t k, std::string name) {
  return AdversaryStrategy(std::move(fn), k, std::move(name));
}

AdversaryStrategy fully_adaptive(std::function<AdversaryAction(HistoryView)> fn, std::string name) {
  return AdversaryStrategy([fn = std::move(fn)](HistoryView h, std::size_t) { return fn(h); }, kUnbounded,
                           std::move(name));
}

AdversaryStrategy hypothetical_k_adaptive(RecordedPlay rec, std::size_t k) {
  if (k == kUnbounded) return rec.real_strategy;
  auto shared = std::make_shared<const RecordedPlay>(std::move(rec));
  auto fn = [shared, k](HistoryView window, std::size_t t) {
    const std::size_t keep = t - window_position(t, k);
    if (keep > shared->real_history.size()) {
      throw std::out_of_range("hypothetical adversary queried beyond the recorded horizon");
    }
    const std::span<const Outcome> prefix(shared->real_history.data(), keep);
    if (window.contiguous()) return shared->real_strategy.act(HistoryView(prefix, window.head()));
    const std::vector<Outcome> flat = window.to_vector();
    return shared->real_strategy.act(HistoryView(prefix, flat));
  };
  return AdversaryStrategy(std::move(fn), k, "hypothetical(" + shared->real_strategy.name() + ")");
}

namespace {

bool saw_inspection(HistoryView window) {
  for (std::size_t j = 0; j < window.size(); ++j) {
    if (window[j].index == speeding::HI) return true;
  }
  return false;
}

AdversaryStrategy tourist(std::size_t k, AdversaryAction opening, std::string name) {
  return k_adaptive(
      [opening, k](HistoryView window, std::size_t t) {
        if (window_position(t, k) == 0) return opening;
        return saw_inspection(window) ? speeding::DS : speeding::S;
      },
      k, std::move(name));
}

}  // namespace

AdversaryStrategy tourist_a1(std::size_t k) { return tourist(k, speeding::DS, "tourist-a1"); }
AdversaryStrategy tourist_a2(std::size_t k) { return tourist(k, speeding::S, "tourist-a2"); }

AdversaryStrategy tourist_alternating(std::size_t k) {
  return k_adaptive(
      [k](HistoryView window, std::size_t t) {
        const bool first = (t / (k + 1)) % 2 == 0;
        if (window_position(t, k) == 0) return first ? speeding::DS : speeding::S;
        return saw_inspection(window) ? speeding::DS : speeding::S;
      },
      k, "tourist-alternating");
}

std::vector<AdversaryAction> read_action_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open adversary script " + path.string());
  std::vector<AdversaryAction> seq;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    long long v;
    while (ss >> v) {
      if (v < 0 || v > 0xffffffffLL) throw InputError(path.string() + ":" + std::to_string(lineno) + ": bad action");
      seq.push_back(static_cast<AdversaryAction>(v));
    }
    if (!ss.eof()) throw InputError(path.string() + ":" + std::to_string(lineno) + ": not an integer");
  }
  if (seq.empty()) throw InputError("adversary script " + path.string() + " is empty");
  return seq;
}

}  // namespace bmg
