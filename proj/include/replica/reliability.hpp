#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace replica {

// Static snapshot model of a cluster: n machines failing independently with
// probability p, b blocks each on r distinct machines chosen uniformly.
struct LossModelParams {
    int n = 1;
    double p = 0.0;
    int r = 1;
    double b = 0.0;  // may be fractional in the analytic model
};

void validate(const LossModelParams& params);

/// Probability that at least one block loses all of its replicas.
///
/// Sums over the number of failed machines f the binomial weight of f times
/// the chance that some block lies entirely on failed machines,
/// 1 - (1 - C(f,r)/C(n,r))^b. The binomial weight is evaluated in log space
/// and the per-f loss through expm1/log1p, so the result stays accurate for
/// large n and for loss probabilities far below machine epsilon.
double data_loss_probability(const LossModelParams& params);

struct MonteCarloEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
    std::int64_t trials = 0;
    std::int64_t losses = 0;
};

/// Direct simulation of the same model. Each trial draws its randomness from
/// a stream keyed by (seed, trial index), so the result does not depend on
/// `threads`. threads == 0 uses the hardware concurrency.
MonteCarloEstimate monte_carlo_loss(const LossModelParams& params, std::int64_t trials,
                                    std::uint64_t seed, unsigned threads = 0);

struct Table2Row {
    int n = 0;
    double alpha = 0.0;
    double p = 0.0;
    int r = 0;
    double loss = 0.0;
    double published_loss = 0.0;
};

// Blocks per machine assumed by the reference sweep: 80 GB / 64 MB / 3.
inline constexpr double kBlocksPerMachine = 1280.0 / 3.0;

/// n in {10, 30, 60} x p in {0.01, 0.1, 0.2} at alpha 0.99; r from
/// optimum_replica_count and b = n * 1280 / 3.
std::vector<Table2Row> table2_sweep();

std::string table2_csv(const std::vector<Table2Row>& rows, bool include_published);

}  // namespace replica
