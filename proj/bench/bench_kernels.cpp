// Serial reference vs OpenMP kernels on the gene example.
//   perifix_bench [batch=64] [samples=512]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "perifix/certify.hpp"
#include "perifix/genereg.hpp"
#include "perifix/parallel.hpp"
#include "perifix/sampling.hpp"

using namespace perifix;

template <class Fn>
double time_ms(Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

int main(int argc, char** argv) {
    const std::size_t batch = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 64;
    const int samples = argc > 2 ? std::atoi(argv[2]) : 512;

    const ClosedLoopModel mdl = build_gene_model(reference_gene_spec());
    const DoubledModel dm = build_doubled(mdl);
    const IntegratorSettings s = mdl.default_settings();

    QuasiRandom qr(2 * mdl.n(), 7);
    std::vector<Vec> xs, zs;
    for (std::size_t i = 0; i < batch; ++i) {
        Vec p = qr.next();
        xs.push_back(mdl.state_box().point_at(std::span<const double>(p).first(mdl.n())));
        zs.push_back(concat(xs.back(), mdl.state_box().point_at(std::span<const double>(p).subspan(mdl.n()))));
    }

    std::printf("threads: %d, batch: %zu, samples: %d\n", max_threads(), batch, samples);
    std::printf("%-28s %12s %12s %8s\n", "kernel", "serial ms", "parallel ms", "speedup");

    auto row = [](const char* name, double serial, double parallel) {
        std::printf("%-28s %12.2f %12.2f %8.2f\n", name, serial, parallel, serial / parallel);
    };

    std::vector<Vec> out;
    row("poincare_batch", time_ms([&] { out = poincare_batch(mdl, xs, s, Execution::Serial); }),
        time_ms([&] { out = poincare_batch(mdl, xs, s, Execution::Parallel); }));
    row("doubled_map_batch", time_ms([&] { out = doubled_map_batch(dm, zs, s, Execution::Serial); }),
        time_ms([&] { out = doubled_map_batch(dm, zs, s, Execution::Parallel); }));

    CheckResult r;
    row("check_A1_quasimonotone", time_ms([&] { r = check_A1_quasimonotone(mdl, samples, 1, Execution::Serial); }),
        time_ms([&] { r = check_A1_quasimonotone(mdl, samples, 1, Execution::Parallel); }));
    row("verify_box_invariance",
        time_ms([&] { r = verify_box_invariance(mdl, mdl.state_box(), 64, samples, 1, Execution::Serial); }),
        time_ms([&] { r = verify_box_invariance(mdl, mdl.state_box(), 64, samples, 1, Execution::Parallel); }));
    return 0;
}
