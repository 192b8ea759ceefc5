#include "nk/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>

namespace nk {

int worker_count() {
  if (const char* env = std::getenv("NK_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void for_each_block(int blocks, const std::function<void(int)>& body) {
  const int workers = std::min(worker_count(), blocks);
  if (workers <= 1) {
    for (int b = 0; b < blocks; ++b) body(b);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int b = next++; b < blocks; b = next++) body(b);
    });
  }
  for (auto& t : pool) t.join();
}

double pairwise_sum(const double* values, std::size_t count) {
  if (count == 0) return 0.0;
  if (count == 1) return values[0];
  const std::size_t half = count / 2;
  return pairwise_sum(values, half) + pairwise_sum(values + half, count - half);
}

namespace {

Eigen::VectorXd tree(const std::vector<Eigen::VectorXd>& parts, std::size_t first, std::size_t count) {
  if (count == 1) return parts[first];
  const std::size_t half = count / 2;
  return tree(parts, first, half) + tree(parts, first + half, count - half);
}

}  // namespace

Eigen::VectorXd pairwise_sum(const std::vector<Eigen::VectorXd>& parts) {
  if (parts.empty()) return {};
  return tree(parts, 0, parts.size());
}

}  // namespace nk
