#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace nk {

// Worker cap from NK_THREADS, otherwise the hardware concurrency.
int worker_count();

// Calls body(block) for block = 0..blocks-1, spread over the workers. Each
// block must write only to its own slot so results never depend on the
// worker count.
void for_each_block(int blocks, const std::function<void(int)>& body);

// Fixed-shape pairwise tree over the entries.
double pairwise_sum(const double* values, std::size_t count);
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

// Columnwise analogue: column j of the result is the pairwise-tree sum of
// parts[0..], in the same tree as pairwise_sum.
Eigen::VectorXd pairwise_sum(const std::vector<Eigen::VectorXd>& parts);

}  // namespace nk
