#include <map>
#include <memory>
#include <string>

#include <benchmark/benchmark.h>

#include "pisot/analysis.hpp"
#include "pisot/lab.hpp"

namespace {

char const* const kFields[] = {"1->12;2->13;3->1", "1->12;2->1", "1->1112;2->11"};

pisot::Lab const& lab(int i)
{
    static std::map<int, std::unique_ptr<pisot::Lab>> cache;
    auto& p = cache[i];
    if (!p)
        p = std::make_unique<pisot::Lab>(pisot::build_lab(kFields[i]));
    return *p;
}

void BM_BuildLab(benchmark::State& st)
{
    for (auto _ : st)
        benchmark::DoNotOptimize(pisot::build_lab(kFields[st.range(0)]));
}
BENCHMARK(BM_BuildLab)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_SubtileCloud(benchmark::State& st)
{
    auto const& L = lab(0);
    int m = static_cast<int>(st.range(0));
    for (auto _ : st)
        benchmark::DoNotOptimize(pisot::subtile_cloud(*L.fr, 0, m));
}
BENCHMARK(BM_SubtileCloud)->DenseRange(8, 16, 4)->Unit(benchmark::kMillisecond);

void BM_SetEquation(benchmark::State& st)
{
    auto const& L = lab(0);
    for (auto _ : st)
        benchmark::DoNotOptimize(pisot::set_equation_check(*L.fr, 0, static_cast<int>(st.range(0))));
}
BENCHMARK(BM_SetEquation)->Arg(10)->Arg(14)->Unit(benchmark::kMillisecond);

void BM_TilingSample(benchmark::State& st)
{
    auto const& L = lab(0);
    static pisot::Tiler T(*L.fr);
    static pisot::Patch patch = pisot::translation_patch(*L.fr, T.sampling_region());
    for (auto _ : st)
        benchmark::DoNotOptimize(T.tiling_statistics(L.chain, 100, {14, 16, 18}, 1, 40, 1, &patch));
    st.SetItemsProcessed(st.iterations() * 100);
}
BENCHMARK(BM_TilingSample)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_GarsiaFuzz(benchmark::State& st)
{
    auto const& L = lab(static_cast<int>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(pisot::garsia_fuzz(*L.fr, 1000, 10, 5, 1, 1));
    st.SetItemsProcessed(st.iterations() * 1000);
}
BENCHMARK(BM_GarsiaFuzz)->UseRealTime()->Arg(0)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_EitherCorpus(benchmark::State& st)
{
    auto const& L = lab(0);
    auto cb = pisot::coefficient_bound(*L.fr, pisot::lattice_vectors(L.Z0));
    auto cyl = pisot::special_cylinder(*L.fr, cb.M, L.prim.N);
    for (auto _ : st)
        benchmark::DoNotOptimize(pisot::either_corpus(*L.fr, L.chain, cb.M, cyl, L.Z0, 200, 24, 1, 1));
    st.SetItemsProcessed(st.iterations() * 200);
}
BENCHMARK(BM_EitherCorpus)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_Tau2Exact(benchmark::State& st)
{
    auto const& L = lab(0);
    auto cyl = pisot::plain_cylinder(*L.fr, L.prim.N, L.prim.N + 1);
    int k = static_cast<int>(st.range(0));
    for (auto _ : st)
        benchmark::DoNotOptimize(pisot::tau2_distribution(L.chain, cyl, k));
}
BENCHMARK(BM_Tau2Exact)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_Tau2Sample(benchmark::State& st)
{
    auto const& L = lab(0);
    auto cyl = pisot::plain_cylinder(*L.fr, L.prim.N, L.prim.N + 1);
    for (auto _ : st)
        benchmark::DoNotOptimize(pisot::tau2_sample(L.chain, cyl, 2000, 20000, 1, 1));
    st.SetItemsProcessed(st.iterations() * 2000);
}
BENCHMARK(BM_Tau2Sample)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_SSeries(benchmark::State& st)
{
    auto const& L = lab(0);
    auto cyl = pisot::plain_cylinder(*L.fr, L.prim.N, L.prim.N + 1);
    int j = static_cast<int>(st.range(0));
    auto es = pisot::sample_entry_series(L.chain, cyl, j, 2 * (L.prim.N + 1), 1);
    auto y = pisot::sample_path(L.chain, static_cast<std::size_t>(es.N0) + 1, 2);
    auto z = pisot::reference_path(L.a, cyl, y, es.N0);
    for (auto _ : st)
        benchmark::DoNotOptimize(pisot::b_counts_and_s(L.chain, L.a, cyl, es, j, 0, z));
}
BENCHMARK(BM_SSeries)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
