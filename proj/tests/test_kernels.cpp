#include <doctest.h>

#include <cstring>
#include <limits>
#include <vector>

#include "bmg/kernels/kernels.hpp"
#include "bmg/trace_table.hpp"
#include "random_games.hpp"

using namespace bmg;

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::vector<const kernels::KernelTable*> variants() {
  std::vector<const kernels::KernelTable*> v = {&kernels::scalar_kernels()};
  if (const auto* t = kernels::avx2_kernels()) v.push_back(t);
  return v;
}

}  // namespace

TEST_CASE("dispatch picks a known variant") {
  const char* name = kernels::active_kernels().name;
  CHECK((std::strcmp(name, "scalar") == 0 || std::strcmp(name, "avx2") == 0));
  CHECK(std::strcmp(kernels::scalar_kernels().name, "scalar") == 0);
  const char* forced = std::getenv("BMG_KERNELS");
  if (forced && std::strcmp(forced, "scalar") == 0) CHECK(std::strcmp(name, "scalar") == 0);
  MESSAGE("active kernels: " << name);
}

TEST_CASE("every variant matches the scalar reference bit for bit") {
  Rng rng(21);
  const auto& ref = kernels::scalar_kernels();
  for (const auto* k : variants()) {
    for (std::size_t n : {0, 1, 3, 4, 5, 7, 8, 15, 16, 17, 31, 64, 100, 1023}) {
      std::vector<double> src(n + 3), row(11), col(13), w(n), x(n);
      std::vector<std::int32_t> parent(n), idx(n), idx2(n);
      for (auto& v : src) v = rng.uniform();
      for (auto& v : row) v = rng.uniform();
      for (auto& v : col) v = rng.uniform() * 3 - 1;
      for (auto& v : w) v = rng.uniform();
      for (auto& v : x) v = rng.uniform() - 0.5;
      for (std::size_t i = 0; i < n; ++i) {
        parent[i] = static_cast<std::int32_t>(rng.below(src.size()));
        idx[i] = static_cast<std::int32_t>(rng.below(row.size()));
        idx2[i] = static_cast<std::int32_t>(rng.below(col.size()));
      }

      std::vector<double> a(n, -7.0), b(n, -7.0);
      ref.gather2_mul(a.data(), src.data(), parent.data(), row.data(), idx.data(), n);
      k->gather2_mul(b.data(), src.data(), parent.data(), row.data(), idx.data(), n);
      CHECK(same_bits(a, b));

      std::vector<double> acc1(n), acc2(n);
      for (std::size_t i = 0; i < n; ++i) acc1[i] = acc2[i] = rng.uniform();
      ref.gather_mul_add(acc1.data(), col.data(), idx2.data(), w.data(), n);
      k->gather_mul_add(acc2.data(), col.data(), idx2.data(), w.data(), n);
      CHECK(same_bits(acc1, acc2));

      ref.scale_add(acc1.data(), 0.37, x.data(), n);
      k->scale_add(acc2.data(), 0.37, x.data(), n);
      CHECK(same_bits(acc1, acc2));

      const double m1 = ref.max_value(x.data(), n), m2 = k->max_value(x.data(), n);
      if (n == 0) {
        CHECK(m1 == -std::numeric_limits<double>::infinity());
        CHECK(m2 == -std::numeric_limits<double>::infinity());
      } else {
        CHECK(m1 == m2);
      }
    }
  }
}

TEST_CASE("kernel block update equals the definition of the block loss") {
  Rng rng(22);
  for (int trial = 0; trial < 40; ++trial) {
    testing::GameShape s = testing::random_shape(rng, 2, 3);
    const Game g = testing::random_game(rng, s);
    const auto K = static_cast<std::uint32_t>(1 + rng.below(3));
    TraceTable table(g, K, 0.1);
    const StateCode root{static_cast<std::uint32_t>(rng.below(g.state_count()))};
    const std::vector<AdversaryAction> block = testing::random_actions(rng, g, K);
    table.add_block(root, block);
    std::vector<double> direct(table.traces_per_root());
    table.block_losses(root, block, direct);
    const auto got = table.losses(root);
    for (std::size_t i = 0; i < direct.size(); ++i) {
      const Trace p = table.trace_at(root, i);
      CHECK(got[i] == doctest::Approx(direct[i]).epsilon(1e-12));
      CHECK(direct[i] == doctest::Approx(block_loss(g, p, block, root)).epsilon(1e-12));
    }
    // other roots untouched
    for (std::uint32_t r = 0; r < g.state_count(); ++r) {
      if (r == root.code) continue;
      for (double v : table.losses(StateCode{r})) CHECK(v == 0.0);
    }
  }
}
