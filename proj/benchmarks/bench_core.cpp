#include <benchmark/benchmark.h>

#include <random>

#include "fpcore/imgproc.hpp"
#include "fpcore/orientation.hpp"
#include "fpcore/refine.hpp"
#include "fpcore/synth.hpp"

namespace {

fp::RealMap random_map(int w, int h, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 255.0);
    fp::RealMap m(w, h);
    for (double& v : m.data) v = uni(rng);
    return m;
}

fp::GrayImage random_image(int w, int h, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> uni(0, 255);
    fp::GrayImage img(w, h);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(uni(rng));
    return img;
}

void BM_Convolve15(benchmark::State& state) {
    const fp::RealMap map = random_map(256, 256, 1);
    fp::Kernel k(15, 15);
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (double& w : k.weights) w = uni(rng);
    for (auto _ : state) benchmark::DoNotOptimize(fp::convolve2d(map, k));
}
BENCHMARK(BM_Convolve15);

void BM_GaussianBlur(benchmark::State& state) {
    const fp::RealMap map = random_map(512, 512, 3);
    for (auto _ : state) benchmark::DoNotOptimize(fp::gaussian_blur(map, 4.0));
}
BENCHMARK(BM_GaussianBlur);

void BM_MedianRank(benchmark::State& state) {
    const fp::GrayImage img = random_image(256, 256, 4);
    for (auto _ : state) benchmark::DoNotOptimize(fp::rank_filter(img, 3, fp::Rank::Median));
}
BENCHMARK(BM_MedianRank);

void BM_EstimateOrientation(benchmark::State& state) {
    const fp::OrientationField truth = fp::synth_field(256, 256, {}, 0.6);
    const fp::GrayImage img = fp::render_ridges(truth, 8.0, 7);
    const fp::FilterBank bank = fp::build_filter_bank(15, 1.0, 2.0, 0.85, 2.0, 36);
    for (auto _ : state) benchmark::DoNotOptimize(fp::estimate_orientation(img, bank, 5.0));
}
BENCHMARK(BM_EstimateOrientation);

void BM_SmootherPass(benchmark::State& state) {
    const fp::OrientationField field =
        fp::synth_field(256, 256, {{fp::Singularity::Type::Loop, 128.0, 128.0}}, 0.4);
    const fp::CirclePattern pattern = fp::circle_pattern(8.0);
    for (auto _ : state) benchmark::DoNotOptimize(fp::smoother(field, pattern, 0.5));
}
BENCHMARK(BM_SmootherPass);

}  // namespace

BENCHMARK_MAIN();
