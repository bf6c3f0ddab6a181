// Serial reference kernels against their OpenMP counterparts on
// thermal-frame sized inputs (640x512, a 20-frame nadir stack, and a
// 4000x3000 RGB source for the resampler).

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "flame/kernels.hpp"

namespace k = flame::kernels;

namespace {

constexpr int W = 640, H = 512;
constexpr std::size_t N = std::size_t(W) * H;

const std::vector<double>& temps() {
    static const std::vector<double> v = [] {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-20, 600);
        std::vector<double> out(N);
        for (auto& x : out) x = u(rng);
        return out;
    }();
    return v;
}

const std::vector<std::uint8_t>& indices() {
    static const std::vector<std::uint8_t> v = [] {
        std::vector<std::uint8_t> out(N);
        k::serial::normalize_indices(temps(), -20, 600, out);
        return out;
    }();
    return v;
}

const std::array<k::Rgb8, 256>& table() {
    static const std::array<k::Rgb8, 256> t = [] {
        std::array<k::Rgb8, 256> out{};
        for (int i = 0; i < 256; ++i) out[i] = {std::uint8_t(i), std::uint8_t(255 - i), std::uint8_t(i / 2)};
        return out;
    }();
    return t;
}

struct Stack {
    std::vector<std::vector<double>> data;
    std::vector<k::FrameView> views;
    std::vector<double> times;
};

// front moving one column per frame
const Stack& stack() {
    static const Stack s = [] {
        Stack out;
        for (int f = 0; f < 20; ++f) {
            std::vector<double> v(N, 25.0);
            for (int y = 0; y < H; ++y)
                for (int x = 0; x <= f; ++x) v[std::size_t(y) * W + x] = 25 + 375 * std::exp(-(f - x) / 4.0);
            out.data.push_back(std::move(v));
            out.times.push_back(5.0 * f);
        }
        for (const auto& d : out.data) out.views.emplace_back(d);
        return out;
    }();
    return s;
}

const std::vector<double>& arrival() {
    static const std::vector<double> a = [] {
        std::vector<double> out(N);
        k::serial::arrival_times(stack().views, stack().times, 200, out);
        return out;
    }();
    return a;
}

template <bool Par>
void bm_min_max(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(Par ? k::min_max(temps()) : k::serial::min_max(temps()));
    st.SetItemsProcessed(st.iterations() * N);
}

template <bool Par>
void bm_normalize(benchmark::State& st) {
    std::vector<std::uint8_t> out(N);
    for (auto _ : st) {
        if (Par)
            k::normalize_indices(temps(), -20, 600, out);
        else
            k::serial::normalize_indices(temps(), -20, 600, out);
        benchmark::ClobberMemory();
    }
    st.SetItemsProcessed(st.iterations() * N);
}

template <bool Par>
void bm_palette(benchmark::State& st) {
    std::vector<std::uint8_t> out(3 * N);
    for (auto _ : st) {
        if (Par)
            k::palette_lookup(indices(), table(), out);
        else
            k::serial::palette_lookup(indices(), table(), out);
        benchmark::ClobberMemory();
    }
    st.SetItemsProcessed(st.iterations() * N);
}

template <bool Par>
void bm_histogram(benchmark::State& st) {
    for (auto _ : st)
        benchmark::DoNotOptimize(Par ? k::histogram256(temps(), -20, 600) : k::serial::histogram256(temps(), -20, 600));
    st.SetItemsProcessed(st.iterations() * N);
}

template <bool Par>
void bm_resample(benchmark::State& st) {
    const int sw = 4000, sh = 3000;
    static const std::vector<std::uint8_t> src = [] {
        std::vector<std::uint8_t> out(std::size_t(sw) * sh * 3);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::uint8_t((i * 2654435761u) >> 24);
        return out;
    }();
    k::ResampleMap m;
    m.origin_x = 600;
    m.origin_y = 450;
    m.scale_x = m.scale_y = 640.0 / 2800.0;
    m.max_x = sw - 1;
    m.max_y = sh - 1;
    std::vector<std::uint8_t> dst(3 * N), outside(N);
    for (auto _ : st)
        benchmark::DoNotOptimize(Par ? k::bilinear_resample(src, sw, sh, m, W, H, dst, outside)
                                     : k::serial::bilinear_resample(src, sw, sh, m, W, H, dst, outside));
    st.SetItemsProcessed(st.iterations() * N);
}

template <bool Par>
void bm_arrival(benchmark::State& st) {
    std::vector<double> out(N);
    for (auto _ : st) {
        if (Par)
            k::arrival_times(stack().views, stack().times, 200, out);
        else
            k::serial::arrival_times(stack().views, stack().times, 200, out);
        benchmark::ClobberMemory();
    }
    st.SetItemsProcessed(st.iterations() * N);
}

template <bool Par>
void bm_energy(benchmark::State& st) {
    std::vector<double> out(N);
    for (auto _ : st) {
        if (Par)
            k::energy_trapezoid(stack().views, stack().times, 25, out);
        else
            k::serial::energy_trapezoid(stack().views, stack().times, 25, out);
        benchmark::ClobberMemory();
    }
    st.SetItemsProcessed(st.iterations() * N);
}

template <bool Par>
void bm_ros(benchmark::State& st) {
    std::vector<double> speed(N);
    std::vector<std::uint8_t> valid(N);
    for (auto _ : st) {
        if (Par)
            k::rate_of_spread(arrival(), W, H, 0.05, 1e-6, speed, valid);
        else
            k::serial::rate_of_spread(arrival(), W, H, 0.05, 1e-6, speed, valid);
        benchmark::ClobberMemory();
    }
    st.SetItemsProcessed(st.iterations() * N);
}

}  // namespace

#define PAIR(fn)                                  \
    BENCHMARK(fn<false>)->Name(#fn "/serial");    \
    BENCHMARK(fn<true>)->Name(#fn "/parallel")

PAIR(bm_min_max);
PAIR(bm_normalize);
PAIR(bm_palette);
PAIR(bm_histogram);
PAIR(bm_resample);
PAIR(bm_arrival);
PAIR(bm_energy);
PAIR(bm_ros);

int main(int argc, char** argv) {
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::AddCustomContext("omp_threads", std::to_string(k::max_threads()));
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
