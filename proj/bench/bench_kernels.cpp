// Timing comparison of the OpenMP kernels against their serial references.
#include <omp.h>

#include <chrono>
#include <cstdio>

#include "naf/reference.hpp"
#include "naf/trainer.hpp"

using namespace naf;

namespace {

template <class Fn>
double time_ms(Fn&& fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     t0)
        .count();
}

}  // namespace

int main(int argc, char** argv) {
    int dims = argc > 1 ? std::atoi(argv[1]) : 64;
    std::printf("threads=%d dims=%d\n", omp_get_max_threads(), dims);

    ScanGeometry geom = ScanGeometry::desk_default(20, 100.0, dims);
    Volume phantom = make_phantom(PhantomKind::shepp_logan_3d, dims, dims, dims,
                                  geom.volume_extent);

    ProjectionSet a, b;
    double t_par = time_ms([&] { a = project_volume(phantom, geom, 2 * dims); });
    double t_ser =
        time_ms([&] { b = ref::project_volume_serial(phantom, geom, 2 * dims); });
    double max_diff = 0;
    for (size_t i = 0; i < a.images.size(); ++i)
        max_diff = std::max(max_diff, double(std::abs(a.images[i] - b.images[i])));
    std::printf("project_volume   omp %8.1f ms   serial %8.1f ms   speedup %.2fx   "
                "max|diff| %.2e\n",
                t_par, t_ser, t_ser / t_par, max_diff);

    FieldModel<float> model = FieldModel<float>::create(
        EncoderKind::hash, HashEncoderConfig::for_target_resolution(dims), 10,
        geom.volume_extent, 1);
    Volume va, vb;
    t_par = time_ms(
        [&] { va = extract_volume(model, dims, dims, dims, geom.volume_extent); });
    t_ser = time_ms([&] {
        vb = ref::extract_volume_serial(model, dims, dims, dims, geom.volume_extent);
    });
    max_diff = 0;
    for (size_t i = 0; i < va.data.size(); ++i)
        max_diff = std::max(max_diff, double(std::abs(va.data[i] - vb.data[i])));
    std::printf("extract_volume   omp %8.1f ms   serial %8.1f ms   speedup %.2fx   "
                "max|diff| %.2e\n",
                t_par, t_ser, t_ser / t_par, max_diff);
    return 0;
}
