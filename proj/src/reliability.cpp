#include "replica/reliability.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <thread>

#include <fmt/format.h>

#include "replica/errors.hpp"
#include "replica/policy.hpp"

namespace replica {

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// SplitMix64 (Steele, Lea, Flood 2014).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in [0, bound) by multiply-shift; bias is bound / 2^64.
    std::uint32_t below(std::uint32_t bound) {
        return static_cast<std::uint32_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

private:
    std::uint64_t state_;
};

bool trial_loses(const LossModelParams& params, std::int64_t blocks, SplitMix64& rng,
                 std::vector<char>& dead, std::vector<std::uint32_t>& perm) {
    int dead_count = 0;
    for (int i = 0; i < params.n; ++i) {
        dead[i] = rng.uniform01() < params.p;
        dead_count += dead[i];
    }
    if (dead_count < params.r) return false;

    const auto n = static_cast<std::uint32_t>(params.n);
    for (std::int64_t blk = 0; blk < blocks; ++blk) {
        // Partial Fisher-Yates; stops at the first live holder.
        bool all_dead = true;
        for (std::uint32_t i = 0; i < static_cast<std::uint32_t>(params.r); ++i) {
            const std::uint32_t j = i + rng.below(n - i);
            std::swap(perm[i], perm[j]);
            if (!dead[perm[i]]) {
                all_dead = false;
                break;
            }
        }
        if (all_dead) return true;
    }
    return false;
}

constexpr std::array<double, 9> kPublishedLoss = {0.0043, 0.0686, 0.3165, 0.0286, 0.2179,
                                                  0.7120, 0.0456, 0.2752, 0.8377};

}  // namespace

void validate(const LossModelParams& params) {
    if (params.n < 1) throw DomainError(fmt::format("n = {} must be at least 1", params.n));
    if (!(params.p >= 0.0 && params.p <= 1.0)) {
        throw DomainError(fmt::format("p = {} outside [0, 1]", params.p));
    }
    if (params.r < 1 || params.r > params.n) {
        throw DomainError(fmt::format("r = {} outside [1, n = {}]", params.r, params.n));
    }
    if (!(params.b >= 0.0) || !std::isfinite(params.b)) {
        throw DomainError(fmt::format("b = {} must be finite and non-negative", params.b));
    }
}

double data_loss_probability(const LossModelParams& params) {
    validate(params);
    const int n = params.n;
    const int r = params.r;
    const double p = params.p;
    if (params.b == 0.0 || p == 0.0) return 0.0;

    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);  // -inf when p == 1

    long double total = 0.0L;
    double log_choose = 0.0;  // log C(n, f), advanced incrementally
    for (int f = 0; f <= n; ++f) {
        if (f > 0) log_choose += std::log(static_cast<double>(n - f + 1)) - std::log(static_cast<double>(f));
        if (f < r) continue;

        double weight;
        if (p == 1.0) {
            weight = (f == n) ? 1.0 : 0.0;
        } else {
            weight = std::exp(log_choose + f * log_p + (n - f) * log_q);
        }
        if (weight == 0.0) continue;

        // Chance one block sits entirely on the f failed machines.
        double all_failed = 1.0;
        for (int i = 0; i < r; ++i) {
            all_failed *= static_cast<double>(f - i) / static_cast<double>(n - i);
        }
        const double any_block_lost =
            all_failed >= 1.0 ? 1.0 : -std::expm1(params.b * std::log1p(-all_failed));
        total += static_cast<long double>(weight) * any_block_lost;
    }
    return std::clamp(static_cast<double>(total), 0.0, 1.0);
}

MonteCarloEstimate monte_carlo_loss(const LossModelParams& params, std::int64_t trials,
                                    std::uint64_t seed, unsigned threads) {
    validate(params);
    if (trials < 1) throw DomainError(fmt::format("trials = {} must be positive", trials));
    if (params.b != std::floor(params.b) || params.b > 9.0e15) {
        throw DomainError(fmt::format("b = {} must be an integer for simulation", params.b));
    }
    const auto blocks = static_cast<std::int64_t>(params.b);

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::int64_t>(threads, trials));

    const std::uint64_t seed_key = mix64(seed ^ 0x6a09e667f3bcc909ULL);
    std::vector<std::int64_t> losses(threads, 0);
    auto worker = [&](unsigned t) {
        std::vector<char> dead(params.n);
        std::vector<std::uint32_t> perm(params.n);
        const std::int64_t begin = trials * t / threads;
        const std::int64_t end = trials * (t + 1) / threads;
        std::int64_t count = 0;
        for (std::int64_t trial = begin; trial < end; ++trial) {
            SplitMix64 rng(mix64(seed_key + static_cast<std::uint64_t>(trial)));
            // Reset so a trial's outcome depends only on its own stream.
            for (int i = 0; i < params.n; ++i) perm[i] = static_cast<std::uint32_t>(i);
            count += trial_loses(params, blocks, rng, dead, perm);
        }
        losses[t] = count;
    };

    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }

    MonteCarloEstimate out;
    out.trials = trials;
    for (auto c : losses) out.losses += c;
    out.estimate = static_cast<double>(out.losses) / static_cast<double>(trials);
    out.standard_error = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(trials));
    return out;
}

std::vector<Table2Row> table2_sweep() {
    constexpr double kAlpha = 0.99;
    std::vector<Table2Row> rows;
    std::size_t k = 0;
    for (int n : {10, 30, 60}) {
        for (double p : {0.01, 0.1, 0.2}) {
            const std::vector<double> fs(static_cast<std::size_t>(n), p);
            const auto decision = optimum_replica_count(kAlpha, fs, n);
            Table2Row row;
            row.n = n;
            row.alpha = kAlpha;
            row.p = p;
            row.r = decision.replica_count;
            row.loss = data_loss_probability({n, p, row.r, n * kBlocksPerMachine});
            row.published_loss = kPublishedLoss[k++];
            rows.push_back(row);
        }
    }
    return rows;
}

std::string table2_csv(const std::vector<Table2Row>& rows, bool include_published) {
    std::string out = include_published ? "n,alpha,p,r,loss,published_loss\n" : "n,alpha,p,r,loss\n";
    for (const auto& row : rows) {
        out += fmt::format("{},{:.4f},{:.4f},{},{:.4f}", row.n, row.alpha, row.p, row.r, row.loss);
        if (include_published) out += fmt::format(",{:.4f}", row.published_loss);
        out += '\n';
    }
    return out;
}

}  // namespace replica
