#include "fixtures.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace hisim::fixtures {

namespace {

// Only raw engine output is used so the files are identical across
// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

 private:
  std::mt19937_64 engine_;
};

double round6(double p) { return std::round(p * 1e6) / 1e6; }

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.below(i)]);
  }
}

// Evenly spread `count` marks over `len` slots; the k-th mark never comes
// later than floor or ceil placement would put it.
bool floor_mark(std::size_t i, std::size_t count, std::size_t len) {
  return (i + 1) * count / len > i * count / len;
}
bool ceil_mark(std::size_t i, std::size_t count, std::size_t len) {
  auto c = [&](std::size_t k) { return (k * count + len - 1) / len; };
  return c(i + 1) > c(i);
}

enum class Outcome { both_right, local_wrong, both_wrong };

}  // namespace

Trace cifar_fixture(std::uint64_t seed) {
  constexpr std::size_t n = 10000;
  constexpr std::size_t hard_end = 400;   // lowest-confidence block, local nearly always wrong
  constexpr std::size_t boundary = 3550;  // first accepted rank at theta 0.607

  std::vector<Outcome> outcome(n, Outcome::both_right);
  std::vector<double> confidence(n);

  for (std::size_t r = 0; r < hard_end; ++r) {
    outcome[r] = r % 20 == 19 ? Outcome::both_right : Outcome::local_wrong;
    confidence[r] = round6(0.10 + 0.15 * static_cast<double>(r) / hard_end);
  }

  // Offloaded side: walking down from the boundary, every prefix holds a
  // strict majority of samples the remote model fixes.
  {
    constexpr std::size_t len = boundary - hard_end;
    constexpr std::size_t fixed = 1714;
    constexpr std::size_t both_wrong = 71;
    std::size_t other = 0;
    for (std::size_t j = 0; j < len; ++j) {
      std::size_t r = boundary - 1 - j;
      if (ceil_mark(j, fixed, len)) {
        outcome[r] = Outcome::local_wrong;
      } else {
        outcome[r] = floor_mark(other, both_wrong, len - fixed) ? Outcome::both_wrong : Outcome::both_right;
        ++other;
      }
      confidence[r] = round6(0.25 + (0.6069 - 0.25) * static_cast<double>(r - hard_end) / (len - 1));
    }
  }

  // Accepted side: local error density falls with confidence.
  {
    struct Segment {
      std::size_t len, local_wrong, both_wrong;
    };
    constexpr Segment segments[] = {{1000, 400, 150}, {1500, 375, 130}, {2000, 300, 100}, {1700, 73, 49}};
    std::size_t r = boundary;
    for (const auto& seg : segments) {
      std::size_t other = 0;
      for (std::size_t i = 0; i < seg.len; ++i, ++r) {
        if (floor_mark(i, seg.local_wrong, seg.len)) {
          outcome[r] = Outcome::local_wrong;
        } else {
          outcome[r] = floor_mark(other, seg.both_wrong, seg.len - seg.local_wrong) ? Outcome::both_wrong
                                                                                     : Outcome::both_right;
          ++other;
        }
      }
    }
    // The most confident 250 samples are all correct on both models.
    for (; r < n; ++r) outcome[r] = Outcome::both_right;
    for (std::size_t m = 0; m < n - boundary; ++m) {
      double u = static_cast<double>(m) / static_cast<double>(n - boundary - 1);
      confidence[boundary + m] = round6(0.607 + (0.9999 - 0.607) * std::pow(u, 0.6));
    }
  }

  Rng rng(seed);
  std::vector<InferenceSample> samples(n);
  for (std::size_t r = 0; r < n; ++r) {
    auto& s = samples[r];
    s.confidence = confidence[r];
    s.true_label = static_cast<int>(rng.below(10));
    auto wrong_label = [&] { return static_cast<int>((s.true_label + 1 + rng.below(9)) % 10); };
    s.local_label = outcome[r] == Outcome::both_right ? s.true_label : wrong_label();
    s.remote_label = outcome[r] == Outcome::both_wrong ? wrong_label() : s.true_label;
  }
  shuffle(samples, rng);
  for (std::size_t i = 0; i < n; ++i) samples[i].id = i;

  return Trace::multiclass(std::move(samples), {{"dataset", "cifar10-test"},
                                                {"local_model", "quantized-cnn"},
                                                {"remote_model", "efficientnet"},
                                                {"source", "synthetic fixture"}});
}

Trace dog_fixture(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<BinarySample> samples;
  samples.reserve(10000);
  auto add = [&](std::size_t count, bool relevant, auto&& draw) {
    for (std::size_t i = 0; i < count; ++i) samples.push_back({0, draw(), relevant});
  };
  // One relevant sample sits exactly on the 0.5 boundary.
  add(1, true, [] { return 0.5; });
  add(911, true, [&] { return round6(0.5 + 0.5 * std::sqrt(rng.uniform())); });
  add(88, true, [&] { return round6(0.4999 * std::sqrt(rng.uniform())); });
  add(3521, false, [&] {
    double u = rng.uniform();
    return round6(0.5 + 0.5 * u * u);
  });
  add(5479, false, [&] {
    double u = rng.uniform();
    return round6(0.4999 * u * u);
  });
  shuffle(samples, rng);
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i].id = i;
  return Trace::binary(std::move(samples), {{"dataset", "cifar10-test"},
                                            {"task", "dog filter"},
                                            {"source", "synthetic fixture"}});
}

}  // namespace hisim::fixtures
