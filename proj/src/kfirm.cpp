#include <algorithm>
#include <map>
#include <numeric>

#include "monoculture/game.hpp"
#include "monoculture/parallel.hpp"

namespace monoculture {

StrategySequence StrategySequence::parse(const std::string& text) {
  std::vector<Strategy> out;
  for (char c : text) {
    if (c == 'A') {
      out.push_back(Strategy::A);
    } else if (c == 'H') {
      out.push_back(Strategy::H);
    } else {
      throw ArgumentError("strategy sequence must use A and H only: " + text);
    }
  }
  return StrategySequence(std::move(out));
}

unsigned StrategySequence::binary_value() const {
  unsigned v = 0;
  for (Strategy s : choices_) v = 2 * v + (s == Strategy::A ? 1u : 0u);
  return v;
}

std::string StrategySequence::to_string() const {
  std::string s;
  for (Strategy c : choices_) s += to_char(c);
  return s;
}

StrategySequence sequential_optimal_sequence(int k, double phi_a, double phi_h, const CandidateDistribution& values) {
  return StrategySequence(SequentialMallowsGame(phi_a, phi_h, values).optimal_sequence(k));
}

std::vector<SweepCell> sweep_sequences(const std::vector<double>& phi_h, const std::vector<double>& phi_a, int k,
                                       const CandidateDistribution& values, int threads) {
  std::vector<SweepCell> cells;
  for (double h : phi_h)
    for (double a : phi_a) cells.push_back({h - 1.0, a - 1.0, {}, {}, {}, 0, {}});
  parallel_for(cells.size(), threads, [&](std::size_t idx) {
    SweepCell& cell = cells[idx];
    try {
      const StrategySequence s = sequential_optimal_sequence(k, cell.theta_a + 1.0, cell.theta_h + 1.0, values);
      cell.sequence = s.to_string();
      cell.binary_value = s.binary_value();
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  });
  return cells;
}

ScanReport binary_counter_scan(double phi_h, const std::vector<double>& phi_a_grid, int k,
                               const CandidateDistribution& values) {
  for (std::size_t i = 1; i < phi_a_grid.size(); ++i) {
    if (!(phi_a_grid[i] > phi_a_grid[i - 1])) throw ArgumentError("phi_A grid must be increasing");
  }
  ScanReport r{phi_h, phi_a_grid, {}, true, std::nullopt};
  for (double phi_a : phi_a_grid) r.labels.push_back(sequential_optimal_sequence(k, phi_a, phi_h, values));
  for (std::size_t i = 1; i < r.labels.size(); ++i) {
    if (r.labels[i].binary_value() < r.labels[i - 1].binary_value()) {
      r.monotone = false;
      r.first_violation = i;
      break;
    }
  }
  return r;
}

KFirmGame::KFirmGame(int k, double phi_a, double phi_h, const CandidateDistribution& values)
    : k_(k), util_a_(static_cast<std::size_t>(k) + 1, 0.0), util_h_(static_cast<std::size_t>(k) + 1, 0.0) {
  if (k < 1) throw ArgumentError("need at least one firm");
  const SequentialMallowsGame game(phi_a, phi_h, values);
  if (k > game.n()) throw ArgumentError("more firms than candidates");
  std::map<unsigned, std::vector<double>> memo;
  auto seq_utilities = [&](const std::vector<Strategy>& seq) -> const std::vector<double>& {
    const unsigned key = StrategySequence(seq).binary_value();
    auto it = memo.find(key);
    if (it == memo.end()) it = memo.emplace(key, game.utilities(seq)).first;
    return it->second;
  };
  for (int m = 0; m <= k; ++m) {
    // Firms 0..m-1 use A. Average each firm's utility over all hiring orders.
    std::vector<int> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> total(static_cast<std::size_t>(k), 0.0);
    std::size_t orders = 0;
    std::vector<Strategy> seq(static_cast<std::size_t>(k));
    do {
      for (int p = 0; p < k; ++p)
        seq[static_cast<std::size_t>(p)] = order[static_cast<std::size_t>(p)] < m ? Strategy::A : Strategy::H;
      const auto& u = seq_utilities(seq);
      for (int p = 0; p < k; ++p)
        total[static_cast<std::size_t>(order[static_cast<std::size_t>(p)])] += u[static_cast<std::size_t>(p)];
      ++orders;
    } while (std::next_permutation(order.begin(), order.end()));
    double sum_a = 0.0;
    double sum_h = 0.0;
    for (int f = 0; f < k; ++f)
      (f < m ? sum_a : sum_h) += total[static_cast<std::size_t>(f)] / static_cast<double>(orders);
    if (m > 0) util_a_[static_cast<std::size_t>(m)] = sum_a / m;
    if (m < k) util_h_[static_cast<std::size_t>(m)] = sum_h / (k - m);
  }
}

double KFirmGame::utility_a(int m) const {
  if (m < 1 || m > k_) throw ArgumentError("an A firm needs 1 <= algorithm_firms <= k");
  return util_a_[static_cast<std::size_t>(m)];
}

double KFirmGame::utility_h(int m) const {
  if (m < 0 || m >= k_) throw ArgumentError("an H firm needs 0 <= algorithm_firms < k");
  return util_h_[static_cast<std::size_t>(m)];
}

double KFirmGame::average_utility(int m) const {
  double s = 0.0;
  if (m > 0) s += m * utility_a(m);
  if (m < k_) s += (k_ - m) * utility_h(m);
  return s / k_;
}

bool KFirmGame::a_dominant() const {
  for (int others = 0; others < k_; ++others) {
    if (!(utility_a(others + 1) > utility_h(others) + 1e-12)) return false;
  }
  return true;
}

std::vector<int> KFirmGame::pure_equilibria() const {
  std::vector<int> out;
  for (int m = 0; m <= k_; ++m) {
    const bool a_stays = m == 0 || utility_a(m) >= utility_h(m - 1) - 1e-12;
    const bool h_stays = m == k_ || utility_h(m) >= utility_a(m + 1) - 1e-12;
    if (a_stays && h_stays) out.push_back(m);
  }
  return out;
}

KFirmBraessReport kfirm_braess_check(int k, double phi_a, double phi_h, const CandidateDistribution& values) {
  const KFirmGame game(k, phi_a, phi_h, values);
  KFirmBraessReport r{};
  r.k = k;
  r.phi_a = phi_a;
  r.phi_h = phi_h;
  r.equilibria = game.pure_equilibria();
  r.a_dominant = game.a_dominant();
  r.utility_all_a = game.average_utility(k);
  r.utility_all_h = game.average_utility(0);
  r.equilibrium_utility = r.equilibria.empty() ? 0.0 : game.average_utility(r.equilibria.back());
  r.braess = r.a_dominant && r.utility_all_h > r.utility_all_a + 1e-12;
  return r;
}

}  // namespace monoculture
