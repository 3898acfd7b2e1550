// Serial reference vs OpenMP kernels: wall time per call and a bitwise
// agreement check. Thread count follows GAUDUCHON_THREADS / OMP_NUM_THREADS.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <vector>

#include <CLI11.hpp>

#include "gauduchon/kernels.hpp"

namespace {

using namespace gauduchon::kernels;

double time_it(int repeat, const std::function<void()>& f) {
    f();  // warm-up
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < repeat; ++r) f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / repeat;
}

struct Field {
    int n;
    std::vector<std::vector<cplx>> data;
    MatrixFieldView view() const {
        MatrixFieldView v{n, {}};
        for (const auto& d : data) v.entries.push_back(d.data());
        return v;
    }
};

// Random hermitian positive-definite matrices, diagonally dominant.
Field random_metric(int n, std::size_t points, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    Field f{n, std::vector<std::vector<cplx>>(static_cast<std::size_t>(n * n), std::vector<cplx>(points))};
    for (std::size_t p = 0; p < points; ++p)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const cplx z = i == j ? cplx{1.5 + u(rng), 0.0} : cplx{u(rng), u(rng)};
                f.data[static_cast<std::size_t>(i * n + j)][p] = z;
                f.data[static_cast<std::size_t>(j * n + i)][p] = std::conj(z);
            }
    return f;
}

void report(const char* name, double serial, double parallel, bool same) {
    std::printf("%-20s %12.3f %12.3f %8.2fx  %s\n", name, 1e3 * serial, 1e3 * parallel, serial / parallel,
                same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    configure_threads_from_env();
    std::size_t points = 1 << 18;
    int repeat = 5;
    CLI::App app{"Benchmark serial and OpenMP kernels"};
    app.add_option("--points", points, "Grid points per field")->check(CLI::PositiveNumber);
    app.add_option("--repeat", repeat, "Timed calls per kernel")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    const int n = 3;
    std::mt19937_64 rng(7);
    const Field g = random_metric(n, points, rng);
    std::printf("points %zu, threads %d\n", points, thread_limit());
    std::printf("%-20s %12s %12s %9s\n", "kernel", "serial ms", "parallel ms", "speedup");
    bool all_same = true;

    {
        Field a = g, b = g;
        MatrixFieldOut oa{n, {}}, ob{n, {}};
        for (auto& d : a.data) oa.entries.push_back(d.data());
        for (auto& d : b.data) ob.entries.push_back(d.data());
        std::vector<double> ea(points), eb(points);
        const double ts = time_it(repeat, [&] { serial::invert_hermitian(g.view(), points, oa, ea); });
        const double tp = time_it(repeat, [&] { parallel::invert_hermitian(g.view(), points, ob, eb); });
        const bool same = a.data == b.data && ea == eb;
        all_same &= same;
        report("invert_hermitian", ts, tp, same);
    }
    {
        std::vector<cplx> va(points), vb(points), x(points), y(points);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (std::size_t p = 0; p < points; ++p) {
            x[p] = {u(rng), u(rng)};
            y[p] = {u(rng), u(rng)};
        }
        const std::vector<const cplx*> as(static_cast<std::size_t>(n), x.data()), bs(static_cast<std::size_t>(n), y.data());
        const double ts = time_it(repeat, [&] { serial::contract_bilinear(g.view(), as, bs, va); });
        const double tp = time_it(repeat, [&] { parallel::contract_bilinear(g.view(), as, bs, vb); });
        all_same &= va == vb;
        report("contract_bilinear", ts, tp, va == vb);

        const double ts2 = time_it(repeat, [&] { serial::contract_trace(g.view(), g.view(), va); });
        const double tp2 = time_it(repeat, [&] { parallel::contract_trace(g.view(), g.view(), vb); });
        all_same &= va == vb;
        report("contract_trace", ts2, tp2, va == vb);

        cplx sa, sb;
        const double ts3 = time_it(repeat, [&] { sa = serial::block_sum(x); });
        const double tp3 = time_it(repeat, [&] { sb = parallel::block_sum(x); });
        all_same &= sa == sb;
        report("block_sum", ts3, tp3, sa == sb);

        WaveTable w{{static_cast<int>(points)}, {1}, {std::vector<double>(points)}};
        for (std::size_t p = 0; p < points; ++p) w.k[0][p] = static_cast<double>(p);
        auto symbol = [](const double* k) { return cplx{0.0, k[0]}; };
        std::vector<cplx> da = x, db = x;
        const double ts4 = time_it(repeat, [&] { serial::multiply_symbol(std::span<cplx>(da), w, symbol, 1e-6); });
        const double tp4 = time_it(repeat, [&] { parallel::multiply_symbol(std::span<cplx>(db), w, symbol, 1e-6); });
        all_same &= da == db;
        report("multiply_symbol", ts4, tp4, da == db);
    }
    return all_same ? 0 : 1;
}
