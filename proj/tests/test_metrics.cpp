#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "logens/metrics.hpp"
#include "logens/rng.hpp"

using namespace logens;
using namespace testutil;

TEST_CASE("confusion counts positionally with anomalous positive") {
    const Label A = Label::Anomalous, N = Label::Normal;
    SUBCASE("perfect agreement") {
        const Confusion c = confusion({A, N, A}, {A, N, A});
        CHECK(c.tp == 2);
        CHECK(c.tn == 1);
        CHECK(c.fp == 0);
        CHECK(c.fn == 0);
    }
    SUBCASE("false positive") {
        const Confusion c = confusion({A}, {N});
        CHECK(c.fp == 1);
        CHECK(c.total() == 1);
    }
    SUBCASE("random fixture matches a four-way count loop") {
        SeededRng rng(6);
        std::vector<Label> p, t;
        for (int i = 0; i < 20; ++i) {
            p.push_back(rng.next_below(2) ? A : N);
            t.push_back(rng.next_below(2) ? A : N);
        }
        std::size_t tp = 0, fp = 0, fn = 0, tn = 0;  // oracle
        for (int i = 0; i < 20; ++i) {
            if (p[static_cast<std::size_t>(i)] == A && t[static_cast<std::size_t>(i)] == A) ++tp;
            if (p[static_cast<std::size_t>(i)] == A && t[static_cast<std::size_t>(i)] == N) ++fp;
            if (p[static_cast<std::size_t>(i)] == N && t[static_cast<std::size_t>(i)] == A) ++fn;
            if (p[static_cast<std::size_t>(i)] == N && t[static_cast<std::size_t>(i)] == N) ++tn;
        }
        const Confusion c = confusion(p, t);
        CHECK(c.tp == tp);
        CHECK(c.fp == fp);
        CHECK(c.fn == fn);
        CHECK(c.tn == tn);
    }
    SUBCASE("length mismatch") {
        CHECK_THROWS_AS(confusion({A}, {A, N}), input_error);
    }
}

TEST_CASE("precision, recall and f1 with the zero convention") {
    SUBCASE("published operating points") {
        // tp=708 fp=292 fn=84: p = 0.708, r ~ 0.894
        const Prf1 m = precision_recall_f1({708, 292, 84, 0});
        CHECK(m.precision == doctest::Approx(0.708).epsilon(1e-9));
        CHECK(m.recall == doctest::Approx(0.894).epsilon(1e-3));
        CHECK(m.f1 == doctest::Approx(0.791).epsilon(2e-3));

        // p ~ 0.999, r ~ 0.969 -> f1 ~ 0.984
        const Prf1 s = precision_recall_f1({9690, 10, 310, 0});
        CHECK(s.precision == doctest::Approx(0.999).epsilon(1e-3));
        CHECK(s.recall == doctest::Approx(0.969).epsilon(1e-3));
        CHECK(s.f1 == doctest::Approx(0.984).epsilon(1e-3));
    }
    SUBCASE("all-zero confusion") {
        const Prf1 m = precision_recall_f1({0, 0, 0, 0});
        CHECK(m.precision == 0.0);
        CHECK(m.recall == 0.0);
        CHECK(m.f1 == 0.0);
    }
    SUBCASE("perfect predictions") {
        const Prf1 m = precision_recall_f1({10, 0, 0, 5});
        CHECK(m.precision == 1.0);
        CHECK(m.recall == 1.0);
        CHECK(m.f1 == 1.0);
    }
    SUBCASE("f1 is the harmonic mean") {
        SeededRng rng(10);
        for (int i = 0; i < 50; ++i) {
            const Confusion c{rng.next_below(40), rng.next_below(40), rng.next_below(40),
                              rng.next_below(40)};
            const Prf1 m = precision_recall_f1(c);
            if (m.precision + m.recall > 0.0) {
                CHECK(m.f1 == doctest::Approx(2.0 * m.precision * m.recall /
                                              (m.precision + m.recall)));
                CHECK(m.f1 <= 2.0 * std::min(m.precision, m.recall) /
                                  (m.precision + m.recall) + 1e-12);
            } else {
                CHECK(m.f1 == 0.0);
            }
        }
    }
}

TEST_CASE("mann-whitney separated samples give the closed-form exact p") {
    const UTestResult r = mann_whitney_u({1, 2, 3}, {10, 11, 12});
    CHECK(r.exact);
    CHECK(r.u_statistic == doctest::Approx(0.0));
    CHECK(r.p_value == doctest::Approx(0.1));  // 2 * (1/20)
    CHECK_FALSE(r.significant);
}

TEST_CASE("mann-whitney u matches the pair-count oracle") {
    SeededRng rng(14);
    for (int i = 0; i < 40; ++i) {
        std::vector<double> a, b;
        const std::size_t n1 = 1 + rng.next_below(10), n2 = 1 + rng.next_below(10);
        for (std::size_t k = 0; k < n1; ++k)
            a.push_back(static_cast<double>(rng.next_below(12)));
        for (std::size_t k = 0; k < n2; ++k)
            b.push_back(static_cast<double>(rng.next_below(12)));
        const UTestResult r = mann_whitney_u(a, b);
        CHECK(r.u_statistic == doctest::Approx(mwu_pair_count_oracle(a, b)));
    }
}

TEST_CASE("mann-whitney symmetry and u complement") {
    SeededRng rng(15);
    for (int i = 0; i < 25; ++i) {
        std::vector<double> a, b;
        const std::size_t n1 = 2 + rng.next_below(7), n2 = 2 + rng.next_below(7);
        for (std::size_t k = 0; k < n1; ++k) a.push_back(rng.next_real(0, 100));
        for (std::size_t k = 0; k < n2; ++k) b.push_back(rng.next_real(0, 100));
        const UTestResult ab = mann_whitney_u(a, b);
        const UTestResult ba = mann_whitney_u(b, a);
        CHECK(ab.p_value == doctest::Approx(ba.p_value));
        CHECK(ab.u_statistic + ba.u_statistic ==
              doctest::Approx(static_cast<double>(n1 * n2)));
    }
}

TEST_CASE("identical samples are never significant") {
    const std::vector<double> a = {1, 2, 3, 4, 5};
    const UTestResult r = mann_whitney_u(a, a);
    CHECK(r.p_value >= 0.99);
    CHECK_FALSE(r.significant);
}

TEST_CASE("clearly separated repeated runs are significant") {
    SeededRng rng(16);
    std::vector<double> a, b;
    for (int i = 0; i < 30; ++i) {
        a.push_back(0.70 + rng.next_real(-0.01, 0.01));
        b.push_back(0.43 + rng.next_real(-0.01, 0.01));
    }
    const UTestResult r = mann_whitney_u(a, b);
    CHECK(r.significant);
    CHECK(r.p_value < 0.001);
}

TEST_CASE("approximation route tracks exact enumeration on small samples") {
    SeededRng rng(17);
    for (int i = 0; i < 60; ++i) {
        const std::size_t n1 = 3 + rng.next_below(6), n2 = 3 + rng.next_below(6);
        std::set<double> used;
        std::vector<double> a, b;
        for (std::size_t k = 0; k < n1 + n2; ++k) {
            double v;
            do {
                v = rng.next_real(0, 1000);
            } while (!used.insert(v).second);
            (k < n1 ? a : b).push_back(v);
        }
        const UTestResult exact = mann_whitney_u(a, b);
        REQUIRE(exact.exact);
        const UTestResult approx = mann_whitney_u_approx(a, b);
        REQUIRE_FALSE(approx.exact);
        CHECK(std::abs(approx.p_value - exact.p_value) <= 0.02);
    }
}

TEST_CASE("empty samples are rejected") {
    CHECK_THROWS_AS(mann_whitney_u({}, {1.0}), input_error);
    CHECK_THROWS_AS(mann_whitney_u({1.0}, {}), input_error);
}

TEST_CASE("timing report aggregates") {
    const TimingReport r = timing_report({1.0, 1.0, 1.0});
    CHECK(r.mean_seconds == doctest::Approx(1.0));
    CHECK(r.total_seconds == doctest::Approx(3.0));
    CHECK(r.max_seconds == doctest::Approx(1.0));

    const TimingReport zero = timing_report({});
    CHECK(zero.total_seconds == 0.0);
    CHECK(zero.mean_seconds == 0.0);

    const std::vector<double> five = {0.1, 0.4, 0.2, 0.8, 0.5};
    double sum = 0.0;
    for (double s : five) sum += s;  // oracle
    CHECK(timing_report(five).mean_seconds == doctest::Approx(sum / 5.0));
    CHECK(timing_report(five).max_seconds == doctest::Approx(0.8));
}
