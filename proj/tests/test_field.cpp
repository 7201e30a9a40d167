#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "naf/field.hpp"
#include "naf/model.hpp"

using namespace naf;

namespace {

// independent straight-line reimplementation of the forward pass
template <class Real>
Real mlp_forward_oracle(const MlpParams<Real>& p, const Real* x) {
    const int h = p.hidden, in = p.in_dim, l2 = p.l2_in();
    std::vector<Real> a1(h), x2(l2), a2(h), a3(h);
    for (int j = 0; j < h; ++j) {
        Real z = p.b1[j];
        for (int i = 0; i < in; ++i) z += p.w1[size_t(j) * in + i] * x[i];
        a1[j] = std::max(z, Real(0));
    }
    for (int j = 0; j < h; ++j) x2[j] = a1[j];
    for (int i = 0; i < in; ++i) x2[h + i] = x[i];
    for (int j = 0; j < h; ++j) {
        Real z = p.b2[j];
        for (int i = 0; i < l2; ++i) z += p.w2[size_t(j) * l2 + i] * x2[i];
        a2[j] = std::max(z, Real(0));
    }
    for (int j = 0; j < h; ++j) {
        Real z = p.b3[j];
        for (int i = 0; i < h; ++i) z += p.w3[size_t(j) * h + i] * a2[i];
        a3[j] = std::max(z, Real(0));
    }
    Real z = p.b4[0];
    for (int i = 0; i < h; ++i) z += p.w4[i] * a3[i];
    return Real(1) / (Real(1) + std::exp(-z));
}

template <class Real>
std::vector<Real> random_input(int n, uint64_t key, uint64_t salt) {
    std::vector<Real> x(n);
    for (int i = 0; i < n; ++i) x[i] = Real(rng_uniform(key, salt * 1000 + i) * 2 - 1);
    return x;
}

}  // namespace

TEST_CASE("all-zero parameters give mu = 0.5 everywhere") {
    auto p = MlpParams<double>::zeros(32);
    MlpWork<double> w;
    auto x = random_input<double>(32, 3, 0);
    CHECK(mlp_forward(p, x.data(), w) == doctest::Approx(0.5));
}

TEST_CASE("large output bias saturates the sigmoid") {
    auto p = MlpParams<double>::zeros(32);
    MlpWork<double> w;
    auto x = random_input<double>(32, 4, 0);
    p.b4[0] = 10.0;
    CHECK(mlp_forward(p, x.data(), w) > 0.9999);
    p.b4[0] = -10.0;
    CHECK(mlp_forward(p, x.data(), w) < 0.0001);
}

TEST_CASE("batched forward matches the straight-line oracle") {
    auto p = MlpParams<double>::init(7, 32);
    MlpWork<double> w;
    const int S = 64;
    w.resize(S, p);
    uint64_t key = 5;
    for (size_t i = 0; i < w.X.size(); ++i) w.X[i] = rng_uniform(key, i) * 2 - 1;
    mlp_forward_batch(p, w);
    for (int i = 0; i < S; ++i) {
        double expect = mlp_forward_oracle(p, &w.X[size_t(i) * 32]);
        CHECK(std::abs(w.Mu[i] - expect) < 1e-6);
    }
}

TEST_CASE("gradients match finite differences (double)") {
    auto p = MlpParams<double>::init(11, 16, 16);
    MlpWork<double> w;
    auto x = random_input<double>(16, 6, 1);

    auto grads = MlpParams<double>::zeros(16, 16);
    mlp_forward(p, x.data(), w);
    mlp_backward(p, w, 1.0, grads);  // d loss / d mu = 1 -> grads of mu itself

    const double h = 1e-6;
    uint64_t key = 9, pick = 0;
    int checked = 0;
    std::vector<std::vector<double>*> arrays, garrays;
    p.for_each_array([&](std::vector<double>& a) { arrays.push_back(&a); });
    grads.for_each_array([&](std::vector<double>& a) { garrays.push_back(&a); });
    for (size_t a = 0; a < arrays.size(); ++a) {
        for (int probe = 0; probe < 12; ++probe) {
            size_t j = size_t(rng_uniform(key, pick++) * arrays[a]->size());
            j = std::min(j, arrays[a]->size() - 1);
            double saved = (*arrays[a])[j];
            (*arrays[a])[j] = saved + h;
            double fp = mlp_forward(p, x.data(), w);
            (*arrays[a])[j] = saved - h;
            double fm = mlp_forward(p, x.data(), w);
            (*arrays[a])[j] = saved;
            double fd = (fp - fm) / (2 * h);
            CHECK(std::abs((*garrays[a])[j] - fd) < 1e-6);
            ++checked;
        }
    }
    CHECK(checked == 96);

    // input gradient too
    mlp_forward(p, x.data(), w);
    auto g2 = MlpParams<double>::zeros(16, 16);
    mlp_backward(p, w, 1.0, g2);
    for (int i = 0; i < 16; ++i) {
        double saved = x[i];
        x[i] = saved + h;
        double fp = mlp_forward(p, x.data(), w);
        x[i] = saved - h;
        double fm = mlp_forward(p, x.data(), w);
        x[i] = saved;
        CHECK(std::abs(w.dX[i] - (fp - fm) / (2 * h)) < 1e-6);
    }
}

TEST_CASE("gradients match finite differences (float, looser tolerance)") {
    auto p = MlpParams<float>::init(13, 16, 16);
    MlpWork<float> w;
    auto x = random_input<float>(16, 8, 2);
    auto grads = MlpParams<float>::zeros(16, 16);
    mlp_forward(p, x.data(), w);
    mlp_backward(p, w, 1.0f, grads);
    const float h = 1e-3f;
    for (size_t j = 0; j < p.w3.size(); j += 17) {
        float saved = p.w3[j];
        p.w3[j] = saved + h;
        float fp = mlp_forward(p, x.data(), w);
        p.w3[j] = saved - h;
        float fm = mlp_forward(p, x.data(), w);
        p.w3[j] = saved;
        CHECK(std::abs(grads.w3[j] - (fp - fm) / (2 * h)) < 1e-3f);
    }
}

TEST_CASE("zero upstream gradient produces zero parameter gradients") {
    auto p = MlpParams<double>::init(17, 32);
    MlpWork<double> w;
    auto x = random_input<double>(32, 10, 3);
    auto grads = MlpParams<double>::zeros(32);
    mlp_forward(p, x.data(), w);
    mlp_backward(p, w, 0.0, grads);
    grads.for_each_array([&](const std::vector<double>& a) {
        for (double g : a) CHECK(g == 0.0);
    });
}

TEST_CASE("init: deterministic, zero biases, plausible weight scale") {
    auto a = MlpParams<float>::init(42, 32);
    auto b = MlpParams<float>::init(42, 32);
    auto c = MlpParams<float>::init(43, 32);
    CHECK(a.w1 == b.w1);
    CHECK(a.w3 == b.w3);
    CHECK(a.w1 != c.w1);
    for (float v : a.b1) CHECK(v == 0.0f);
    for (float v : a.b3) CHECK(v == 0.0f);
    CHECK(a.b4[0] == 0.0f);
    // uniform(-sqrt(6/fan), sqrt(6/fan)) has std sqrt(2/fan)
    double var = 0;
    for (float v : a.w3) var += double(v) * v;
    double std_dev = std::sqrt(var / a.w3.size());
    double target = std::sqrt(2.0 / 32);
    CHECK(std_dev > 0.8 * target);
    CHECK(std_dev < 1.2 * target);
}

TEST_CASE("property: output always lies in (0,1)") {
    auto p = MlpParams<double>::init(23, 32);
    MlpWork<double> w;
    for (int i = 0; i < 200; ++i) {
        auto x = random_input<double>(32, 31, i);
        double mu = mlp_forward(p, x.data(), w);
        CHECK(mu > 0.0);
        CHECK(mu < 1.0);
        CHECK(std::isfinite(mu));
    }
}

TEST_CASE("field model: gradients flow end to end into the hash tables") {
    auto model = FieldModel<double>::create(
        EncoderKind::hash, HashEncoderConfig::for_target_resolution(16), 10,
        Aabb::centered_cube(100.0), 77);
    MlpWork<double> w;
    double pts[3];
    model.normalize({10, -20, 5}, pts);
    model.forward_batch(pts, 1, w);
    double mu0 = w.Mu[0];
    CHECK(mu0 > 0.0);
    CHECK(mu0 < 1.0);

    auto mlp_g = MlpParams<double>::zeros(model.mlp.in_dim, model.mlp.hidden);
    auto tab_g = model.tables.zero_like();
    double d_mu = 1.0;
    model.backward_batch(pts, 1, w, &d_mu, mlp_g, &tab_g);

    // finite-difference a few touched table entries
    const double h = 1e-6;
    int probed = 0;
    for (size_t l = 0; l < tab_g.size() && probed < 20; ++l)
        for (size_t j = 0; j < tab_g[l].size() && probed < 20; ++j) {
            if (tab_g[l][j] == 0) continue;
            double saved = model.tables.levels[l][j];
            model.tables.levels[l][j] = saved + h;
            model.forward_batch(pts, 1, w);
            double fp = w.Mu[0];
            model.tables.levels[l][j] = saved - h;
            model.forward_batch(pts, 1, w);
            double fm = w.Mu[0];
            model.tables.levels[l][j] = saved;
            CHECK(std::abs(tab_g[l][j] - (fp - fm) / (2 * h)) < 1e-5);
            ++probed;
        }
    CHECK(probed >= 10);
}

TEST_CASE("field model: frequency encoder has 6*bands inputs") {
    auto model = FieldModel<float>::create(EncoderKind::frequency, {}, 10,
                                           Aabb::centered_cube(100.0), 5);
    CHECK(model.mlp.in_dim == 60);
    MlpWork<float> w;
    float pts[6];
    model.normalize({0, 0, 0}, pts);
    model.normalize({25, 25, 25}, pts + 3);
    model.forward_batch(pts, 2, w);
    CHECK(w.Mu[0] > 0.0f);
    CHECK(w.Mu[1] < 1.0f);
}
