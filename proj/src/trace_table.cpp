#include "bmg/trace_table.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bmg/errors.hpp"
#include "bmg/kernels/kernels.hpp"

namespace bmg {

namespace {

double log_sum_exp(const double* x, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, x[i]);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(x[i] - m);
  return m + std::log(s);
}

}  // namespace

double block_loss(const Game& game, const Trace& p, std::span<const AdversaryAction> block, StateCode live) {
  if (p.actions.empty() || p.outcomes.size() + 1 != p.actions.size()) throw std::invalid_argument("malformed trace");
  if (block.size() < p.depth()) throw std::invalid_argument("block_loss: block shorter than the trace");
  if (p.root != live) return 0.0;
  double q = 1.0;
  StateCode s = p.root;
  for (std::size_t j = 0; j + 1 < p.actions.size(); ++j) {
    q *= game.outcome_probability(p.actions[j], block[j], p.outcomes[j]);
    s = game.transition(s, p.outcomes[j]);
  }
  return game.payoff(s, p.actions.back(), block[p.depth() - 1]) * q;
}

TraceTable::TraceTable(const Game& game, std::uint32_t K, double eta, std::size_t trace_cap)
    : game_(&game), K_(K), D_(game.defender_actions()), O_(game.outcome_count()), roots_(game.state_count()), eta_(eta) {
  if (game.kind() != GameKind::bounded_memory) throw InputError("trace tables need a bounded-memory game");
  if (K == 0) throw InputError("trace table needs K >= 1");
  offset_.assign(K + 1, 0);
  std::size_t level = D_;
  for (std::uint32_t j = 1; j <= K; ++j) {
    offset_[j] = offset_[j - 1] + level;
    if (offset_[j] > trace_cap || (j < K && level > trace_cap / (std::size_t{O_} * D_) + 1)) {
      throw CapExceeded("trace table for K = " + std::to_string(K) + " exceeds the cap of " +
                        std::to_string(trace_cap) + " traces");
    }
    level *= std::size_t{O_} * D_;
  }
  per_root_ = offset_[K];
  if (per_root_ > trace_cap / roots_) {
    throw CapExceeded("trace table for K = " + std::to_string(K) + " exceeds the cap of " + std::to_string(trace_cap) +
                      " traces");
  }
  L_.assign(per_root_ * roots_, 0.0);
  qidx_.assign(per_root_, 0);
  parent_.assign(per_root_, 0);
  pidx_.assign(per_root_ * roots_, 0);

  const std::size_t OD = std::size_t{O_} * D_;
  for (std::uint32_t j = 2; j <= K; ++j) {
    for (std::size_t c = 0; c < level_size(j); ++c) {
      const std::size_t parent = c / OD;
      const std::size_t o = (c / D_) % O_;
      parent_[offset_[j - 1] + c] = static_cast<std::int32_t>(parent);
      qidx_[offset_[j - 1] + c] = static_cast<std::int32_t>((parent % D_) * O_ + o);
    }
  }
  // State at each trace's last decision, per root.
  std::vector<std::uint32_t> state(per_root_);
  for (std::uint32_t r = 0; r < roots_; ++r) {
    std::int32_t* pid = pidx_.data() + std::size_t{r} * per_root_;
    for (std::size_t c = 0; c < D_; ++c) {
      state[c] = r;
      pid[c] = static_cast<std::int32_t>(std::size_t{r} * D_ + c);
    }
    for (std::uint32_t j = 2; j <= K; ++j) {
      for (std::size_t c = 0; c < level_size(j); ++c) {
        const std::size_t i = offset_[j - 1] + c;
        const std::size_t parent = offset_[j - 2] + c / OD;
        const std::uint32_t o = static_cast<std::uint32_t>((c / D_) % O_);
        state[i] = game.transition(StateCode{state[parent]}, Outcome{o}).code;
        pid[i] = static_cast<std::int32_t>(std::size_t{state[i]} * D_ + c % D_);
      }
    }
  }
  q_.resize(level_size(K));
  q_prev_.resize(level_size(K));
}

std::size_t TraceTable::index(const Trace& p) const {
  const std::size_t j = p.depth();
  if (j == 0 || j > K_ || p.outcomes.size() + 1 != j) throw std::invalid_argument("trace depth out of range");
  std::size_t c = 0;
  for (std::size_t i = 0; i < j; ++i) {
    if (i > 0) {
      if (p.outcomes[i - 1].index >= O_) throw std::out_of_range("trace outcome out of range");
      c = c * O_ + p.outcomes[i - 1].index;
    }
    if (p.actions[i] >= D_) throw std::out_of_range("trace action out of range");
    c = c * D_ + p.actions[i];
  }
  return offset_[j - 1] + c;
}

Trace TraceTable::trace_at(StateCode root, std::size_t idx) const {
  std::uint32_t j = 1;
  while (idx >= offset_[j]) ++j;
  std::size_t c = idx - offset_[j - 1];
  Trace p{root, std::vector<DefenderAction>(j), std::vector<Outcome>(j - 1)};
  for (std::uint32_t i = j; i-- > 0;) {
    p.actions[i] = static_cast<DefenderAction>(c % D_);
    c /= D_;
    if (i > 0) {
      p.outcomes[i - 1] = Outcome{static_cast<std::uint32_t>(c % O_)};
      c /= O_;
    }
  }
  return p;
}

void TraceTable::block_losses(StateCode root, std::span<const AdversaryAction> block, std::span<double> out) const {
  if (block.size() < K_) throw std::invalid_argument("block shorter than K");
  if (out.size() != per_root_) throw std::invalid_argument("block_losses: output size mismatch");
  const std::int32_t* pid = pidx_.data() + root_base(root);
  std::vector<double> q(level_size(K_)), q_prev(level_size(K_));
  for (std::uint32_t j = 1; j <= K_; ++j) {
    const std::size_t off = offset_[j - 1], n = level_size(j);
    const auto col = game_->payoff_column(block[j - 1]);
    if (j == 1) {
      std::fill(q.begin(), q.begin() + n, 1.0);
    } else {
      const auto row = game_->outcome_row(block[j - 2]);
      for (std::size_t c = 0; c < n; ++c) q[c] = q_prev[parent_[off + c]] * row[qidx_[off + c]];
    }
    for (std::size_t c = 0; c < n; ++c) out[off + c] = col[pid[off + c]] * q[c];
    std::swap(q, q_prev);
  }
}

void TraceTable::add_block(StateCode root, std::span<const AdversaryAction> block) {
  if (block.size() < K_) throw std::invalid_argument("block shorter than K");
  const auto& kern = kernels::active_kernels();
  const std::int32_t* pid = pidx_.data() + root_base(root);
  double* L = L_.data() + root_base(root);
  for (std::uint32_t j = 1; j <= K_; ++j) {
    const std::size_t off = offset_[j - 1], n = level_size(j);
    const auto col = game_->payoff_column(block[j - 1]);
    if (j == 1) {
      std::fill(q_.begin(), q_.begin() + n, 1.0);
    } else {
      const auto row = game_->outcome_row(block[j - 2]);
      kern.gather2_mul(q_.data(), q_prev_.data(), parent_.data() + off, row.data(), qidx_.data() + off, n);
    }
    kern.gather_mul_add(L + off, col.data(), pid + off, q_.data(), n);
    std::swap(q_, q_prev_);
  }
}

void TraceTable::add_scaled(std::span<const double> delta, double scale) {
  if (delta.size() != L_.size()) throw std::invalid_argument("add_scaled: size mismatch");
  kernels::active_kernels().scale_add(L_.data(), scale, delta.data(), L_.size());
}

double TraceTable::tree_loss_sum(StateCode root, const KAdaptiveStrategy& f) const {
  double sum = 0.0;
  for (const Trace& p : consistent_traces(f, root, K_)) sum += loss(p);
  return sum;
}

double TraceTable::expert_loss_sum(const CompositeExpert& e) const {
  if (e.per_state.size() != roots_) throw std::invalid_argument("expert does not cover every root");
  double sum = 0.0;
  for (std::uint32_t r = 0; r < roots_; ++r) sum += tree_loss_sum(StateCode{r}, e.per_state[r]);
  return sum;
}

std::vector<double> TraceTable::subtree_log_weights(StateCode root) const {
  const double* L = L_.data() + root_base(root);
  std::vector<double> h(per_root_);
  for (std::size_t i = 0; i < per_root_; ++i) h[i] = eta_ * L[i];
  const std::size_t OD = std::size_t{O_} * D_;
  for (std::uint32_t j = K_ - 1; j >= 1; --j) {
    const std::size_t off = offset_[j - 1], child_off = offset_[j];
    for (std::size_t c = 0; c < level_size(j); ++c) {
      double acc = 0.0;
      const double* kids = h.data() + child_off + c * OD;
      // The expert commits an action after every outcome: product over O, sum over d.
      for (std::uint32_t o = 0; o < O_; ++o) acc += log_sum_exp(kids + o * D_, D_);
      h[off + c] += acc;
    }
  }
  return h;
}

DefenderAction TraceTable::sample_child(std::span<const double> log_h, std::size_t first_child, Rng& rng) const {
  const double* x = log_h.data() + first_child;
  const double m = *std::max_element(x, x + D_);
  double w[64];
  std::vector<double> big;
  double* weights = w;
  if (D_ > 64) {
    big.resize(D_);
    weights = big.data();
  }
  for (std::uint32_t d = 0; d < D_; ++d) weights[d] = std::exp(x[d] - m);
  return static_cast<DefenderAction>(rng.categorical(std::span<const double>(weights, D_)));
}

KAdaptiveStrategy TraceTable::sample(StateCode root, Rng& rng) const {
  const std::vector<double> h = subtree_log_weights(root);
  return sample(root, h, rng);
}

KAdaptiveStrategy TraceTable::sample(StateCode, std::span<const double> h, Rng& rng) const {
  std::vector<DefenderAction> actions;
  actions.reserve(KAdaptiveStrategy::node_count(K_, O_));
  // traces[q]: local code (within level j) of the trace chosen for outcome prefix q.
  std::vector<std::size_t> traces{sample_child(h, 0, rng)};
  actions.push_back(static_cast<DefenderAction>(traces[0]));
  for (std::uint32_t j = 1; j < K_; ++j) {
    std::vector<std::size_t> next;
    next.reserve(traces.size() * O_);
    for (std::size_t c : traces) {
      for (std::uint32_t o = 0; o < O_; ++o) {
        const std::size_t first = (c * O_ + o) * D_;
        const DefenderAction d = sample_child(h, offset_[j] + first, rng);
        next.push_back(first + d);
        actions.push_back(d);
      }
    }
    traces = std::move(next);
  }
  return KAdaptiveStrategy(K_, O_, std::move(actions));
}

double TraceTable::log_probability(StateCode root, const KAdaptiveStrategy& f) const {
  if (f.depth() != K_ || f.outcomes() != O_) throw std::invalid_argument("strategy shape does not match the table");
  const std::vector<double> h = subtree_log_weights(root);
  double lp = 0.0;
  std::vector<std::size_t> traces{0};  // parent placeholder for level 1
  std::size_t node = 0;
  for (std::uint32_t j = 0; j < K_; ++j) {
    std::vector<std::size_t> next;
    const std::size_t fan = j == 0 ? 1 : O_;
    for (std::size_t c : traces) {
      for (std::size_t o = 0; o < fan; ++o) {
        const std::size_t first = j == 0 ? 0 : (c * O_ + o) * D_;
        const double* x = h.data() + offset_[j] + first;
        const DefenderAction d = f.node_action(node++);
        lp += x[d] - log_sum_exp(x, D_);
        next.push_back(first + d);
      }
    }
    traces = std::move(next);
  }
  return lp;
}

nlohmann::json TraceTable::snapshot() const {
  return nlohmann::json{{"schema", "bmg-trace-table/1"},
                        {"depth", K_},
                        {"defender_actions", D_},
                        {"outcomes", O_},
                        {"roots", roots_},
                        {"eta", eta_},
                        {"losses", L_}};
}

void TraceTable::restore(const nlohmann::json& snap) {
  try {
    if (snap.at("schema").get<std::string>() != "bmg-trace-table/1") throw InputError("unknown trace table schema");
    if (snap.at("depth").get<std::uint32_t>() != K_ || snap.at("defender_actions").get<std::uint32_t>() != D_ ||
        snap.at("outcomes").get<std::uint32_t>() != O_ || snap.at("roots").get<std::uint32_t>() != roots_) {
      throw InputError("trace table snapshot does not match this game and depth");
    }
    auto losses = snap.at("losses").get<std::vector<double>>();
    if (losses.size() != L_.size()) throw InputError("trace table snapshot has the wrong size");
    L_ = std::move(losses);
    eta_ = snap.at("eta").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("trace table snapshot: ") + e.what());
  }
}

}  // namespace bmg
