#include "monoculture/exact.hpp"

namespace monoculture {

namespace {

constexpr int kMaxSequentialSize = 7;

int checked_size(const CandidateDistribution& values) {
  const int n = values.size();
  if (n > kMaxSequentialSize) {
    throw UnsupportedError("sequential k-firm enumeration supports n <= " + std::to_string(kMaxSequentialSize));
  }
  return n;
}

}  // namespace

SequentialMallowsGame::SequentialMallowsGame(double phi_a, double phi_h, const CandidateDistribution& values)
    : phi_a_(phi_a),
      phi_h_(phi_h),
      n_(checked_size(values)),
      values_(values.expected_order_statistics()),
      pmf_a_(MallowsModel(phi_a, n_).permutation_pmf()),
      human_(phi_h, n_) {}

void SequentialMallowsGame::check_length(std::size_t k) const {
  if (k < 1 || k > static_cast<std::size_t>(n_)) {
    throw ArgumentError("number of firms must be between 1 and n = " + std::to_string(n_));
  }
}

// State: probability of each taken-set mask, per shared algorithmic ranking.
// A firms take the first untaken candidate of that ranking; H firms draw an
// independent top survivor from the human survivor table.
std::vector<std::vector<double>> SequentialMallowsGame::assignment_probabilities(
    std::span<const Strategy> sequence) const {
  check_length(sequence.size());
  const PermutationTable& perms = PermutationTable::of_size(n_);
  const SurvivorTable& human = human_.survivor_table();
  const std::size_t masks = std::size_t{1} << n_;
  std::vector<double> cur(perms.count() * masks, 0.0);
  std::vector<double> nxt(cur.size());
  for (std::size_t s = 0; s < perms.count(); ++s) cur[s * masks] = 1.0;
  std::vector<std::vector<double>> out(sequence.size(), std::vector<double>(static_cast<std::size_t>(n_), 0.0));
  for (std::size_t f = 0; f < sequence.size(); ++f) {
    std::fill(nxt.begin(), nxt.end(), 0.0);
    auto& row_out = out[f];
    for (std::size_t s = 0; s < perms.count(); ++s) {
      const double w = pmf_a_[s];
      auto sigma = perms.row(s);
      const double* state = &cur[s * masks];
      double* next = &nxt[s * masks];
      for (std::uint32_t mask = 0; mask < masks; ++mask) {
        const double p = state[mask];
        if (p == 0.0) continue;
        if (sequence[f] == Strategy::A) {
          const int c = first_surviving(sigma, mask);
          row_out[static_cast<std::size_t>(c - 1)] += w * p;
          next[mask | (1u << (c - 1))] += p;
        } else {
          for (int c = 1; c <= n_; ++c) {
            const double q = human.prob(mask, c);
            if (q == 0.0) continue;
            row_out[static_cast<std::size_t>(c - 1)] += w * p * q;
            next[mask | (1u << (c - 1))] += p * q;
          }
        }
      }
    }
    cur.swap(nxt);
  }
  return out;
}

std::vector<double> SequentialMallowsGame::utilities(std::span<const Strategy> sequence) const {
  const auto probs = assignment_probabilities(sequence);
  std::vector<double> out;
  for (const auto& row : probs) {
    double u = 0.0;
    for (int c = 1; c <= n_; ++c) u += row[static_cast<std::size_t>(c - 1)] * values_[static_cast<std::size_t>(c - 1)];
    out.push_back(u);
  }
  return out;
}

std::vector<Strategy> SequentialMallowsGame::optimal_sequence(int k) const {
  check_length(static_cast<std::size_t>(k));
  const PermutationTable& perms = PermutationTable::of_size(n_);
  const SurvivorTable& human = human_.survivor_table();
  const std::size_t masks = std::size_t{1} << n_;
  // Expected value of an H pick given the taken set.
  std::vector<double> human_value(masks, 0.0);
  for (std::uint32_t mask = 0; mask + 1 < masks; ++mask) {
    for (int c = 1; c <= n_; ++c) human_value[mask] += human.prob(mask, c) * values_[static_cast<std::size_t>(c - 1)];
  }
  std::vector<double> cur(perms.count() * masks, 0.0);
  std::vector<double> nxt(cur.size());
  for (std::size_t s = 0; s < perms.count(); ++s) cur[s * masks] = 1.0;
  std::vector<Strategy> choices;
  for (int f = 0; f < k; ++f) {
    double value_a = 0.0;
    double value_h = 0.0;
    for (std::size_t s = 0; s < perms.count(); ++s) {
      auto sigma = perms.row(s);
      const double* state = &cur[s * masks];
      double va = 0.0;
      double vh = 0.0;
      for (std::uint32_t mask = 0; mask < masks; ++mask) {
        const double p = state[mask];
        if (p == 0.0) continue;
        va += p * values_[static_cast<std::size_t>(first_surviving(sigma, mask) - 1)];
        vh += p * human_value[mask];
      }
      value_a += pmf_a_[s] * va;
      value_h += pmf_a_[s] * vh;
    }
    const Strategy choice = value_a > value_h + 1e-12 ? Strategy::A : Strategy::H;
    choices.push_back(choice);
    if (f + 1 == k) break;
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (std::size_t s = 0; s < perms.count(); ++s) {
      auto sigma = perms.row(s);
      const double* state = &cur[s * masks];
      double* next = &nxt[s * masks];
      for (std::uint32_t mask = 0; mask < masks; ++mask) {
        const double p = state[mask];
        if (p == 0.0) continue;
        if (choice == Strategy::A) {
          next[mask | (1u << (first_surviving(sigma, mask) - 1))] += p;
        } else {
          for (int c = 1; c <= n_; ++c) {
            const double q = human.prob(mask, c);
            if (q != 0.0) next[mask | (1u << (c - 1))] += p * q;
          }
        }
      }
    }
    cur.swap(nxt);
  }
  return choices;
}

std::vector<double> exact_sequential_utilities(std::span<const Strategy> sequence, double phi_a, double phi_h,
                                               const CandidateDistribution& values) {
  return SequentialMallowsGame(phi_a, phi_h, values).utilities(sequence);
}

}  // namespace monoculture
