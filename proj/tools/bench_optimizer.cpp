// Scratch benchmark for optimizer throughput and convergence depth.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "locbasis/optimizer.hpp"

int main(int argc, char** argv) {
    using namespace locbasis;
    const int n = argc > 1 ? std::atoi(argv[1]) : 64;
    const std::uint64_t max_props = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 20'000'000ull;
    const std::uint64_t window = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 0;

    const TruncatedSpace space = build_space(n);
    const QuadratureMatrices quads = build_quadratures(space);
    OptimizerConfig cfg;
    cfg.seed = 7;
    cfg.max_proposals = max_props;
    cfg.saturation_window = window;

    const auto t0 = std::chrono::steady_clock::now();
    const OptimizeResult res = run(init_identity(space), cfg, quads);
    const auto t1 = std::chrono::steady_clock::now();
    const double secs = std::chrono::duration<double>(t1 - t0).count();

    const double mv = mean_variance(res.basis, quads);
    const double target = 1.0 + 0.6 * std::log(double(n));  // reference logarithmic curve
    const std::uint64_t total = res.trace.accepted + res.trace.rejected;
    std::printf("N=%d proposals=%llu accepted=%llu secs=%.2f (%.1f ns/prop)\n", n,
                (unsigned long long)total, (unsigned long long)res.trace.accepted, secs,
                1e9 * secs / double(total));
    std::printf("S=%.6f mean_variance=%.4f log_curve=%.4f stop=%s\n", res.trace.final_s, mv,
                target, res.trace.stop_reason.c_str());
    return 0;
}
