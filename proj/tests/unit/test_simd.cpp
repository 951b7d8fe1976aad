#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fixtures.hpp"
#include "ipc/contract/objective.hpp"
#include "ipc/nn/mlp.hpp"
#include "ipc/simd/kernels.hpp"

using namespace ipc;
using namespace ipc::simd;

namespace {

std::vector<double> rand_vec(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> d;
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

std::vector<Backend> vector_backends() {
    std::vector<Backend> out;
    for (Backend b : {Backend::Avx2, Backend::Neon})
        if (backend_available(b)) out.push_back(b);
    return out;
}

void check_close(const std::vector<double>& a, const std::vector<double>& b, double tol) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= tol * (1.0 + std::abs(a[i])));
}

// Restores the previously active backend on scope exit.
struct BackendGuard {
    Backend saved = active().backend;
    ~BackendGuard() { set_backend(saved); }
};

}  // namespace

TEST_CASE("scalar backend is always available and selectable") {
    BackendGuard guard;
    CHECK(backend_available(Backend::Scalar));
    CHECK(set_backend(Backend::Scalar));
    CHECK(active().backend == Backend::Scalar);
    CHECK(parse_backend("scalar") == Backend::Scalar);
    CHECK(parse_backend("avx2") == Backend::Avx2);
    CHECK_FALSE(parse_backend("sse9").has_value());
    CHECK(backend_name(Backend::Neon) == "neon");
}

TEST_CASE("vector kernels match the scalar reference") {
    const auto& ref = scalar_kernels();
    std::mt19937_64 rng(3);
    for (Backend b : vector_backends()) {
        const auto& k = kernels_for(b);
        CAPTURE(backend_name(b));
        for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 16u, 31u, 64u, 129u}) {
            const auto x = rand_vec(rng, n), y = rand_vec(rng, n);
            CHECK(std::abs(k.dot(x.data(), y.data(), n) - ref.dot(x.data(), y.data(), n)) <= 1e-12 * (1.0 + n));

            auto ya = y, yb = y;
            k.axpy(0.7, x.data(), ya.data(), n);
            ref.axpy(0.7, x.data(), yb.data(), n);
            check_close(ya, yb, 1e-15);

            std::vector<double> ra(n), rb(n);
            k.leaky_relu(x.data(), ra.data(), n, 0.01);
            ref.leaky_relu(x.data(), rb.data(), n, 0.01);
            CHECK(ra == rb);
            ya = y;
            yb = y;
            k.leaky_relu_backward(x.data(), ya.data(), n, 0.01);
            ref.leaky_relu_backward(x.data(), yb.data(), n, 0.01);
            CHECK(ya == yb);

            auto w1 = x, w2 = x, m1 = rand_vec(rng, n), v1 = rand_vec(rng, n);
            for (auto& v : v1) v = std::abs(v);
            auto m2 = m1, v2 = v1;
            const AdamCoeffs c{1e-3, 0.9, 0.999, 1e-8, 1 - std::pow(0.9, 3), 1 - std::pow(0.999, 3)};
            k.adam_update(w1.data(), y.data(), m1.data(), v1.data(), n, c);
            ref.adam_update(w2.data(), y.data(), m2.data(), v2.data(), n, c);
            CHECK(w1 == w2);
            CHECK(m1 == m2);
            CHECK(v1 == v2);
        }
        for (auto [rows, cols] : {std::pair<std::size_t, std::size_t>{1, 1}, {12, 128}, {64, 9}, {128, 64}, {5, 7}, {3, 13}}) {
            const auto w = rand_vec(rng, rows * cols), x = rand_vec(rng, cols), bias = rand_vec(rng, rows),
                       g = rand_vec(rng, rows);
            std::vector<double> a(rows), r(rows);
            k.gemv(w.data(), x.data(), bias.data(), a.data(), rows, cols);
            ref.gemv(w.data(), x.data(), bias.data(), r.data(), rows, cols);
            check_close(a, r, 1e-12);
            k.gemv(w.data(), x.data(), nullptr, a.data(), rows, cols);
            ref.gemv(w.data(), x.data(), nullptr, r.data(), rows, cols);
            check_close(a, r, 1e-12);

            std::vector<double> ta(cols), tr(cols);
            k.gemv_t(w.data(), g.data(), ta.data(), rows, cols);
            ref.gemv_t(w.data(), g.data(), tr.data(), rows, cols);
            check_close(ta, tr, 1e-12);

            auto Ga = w, Gr = w;
            k.ger(Ga.data(), g.data(), x.data(), rows, cols);
            ref.ger(Gr.data(), g.data(), x.data(), rows, cols);
            check_close(Ga, Gr, 1e-14);
        }
    }
}

TEST_CASE("network outputs agree across backends") {
    BackendGuard guard;
    std::mt19937_64 rng(4);
    const auto p = testing::random_net(rng, {9, 64, 128, 12});
    const auto samples = testing::random_samples(rng, 200);
    REQUIRE(set_backend(Backend::Scalar));
    std::vector<double> ref;
    for (const auto& s : samples) ref.push_back(contract::g_value(p, s));
    const double reg_ref = contract::reg_loss(p, samples).value;
    for (Backend b : vector_backends()) {
        REQUIRE(set_backend(b));
        std::vector<double> got;
        for (const auto& s : samples) got.push_back(contract::g_value(p, s));
        check_close(got, ref, 1e-11);
        CHECK(contract::reg_loss(p, samples).value == doctest::Approx(reg_ref).epsilon(1e-11));
    }
}
