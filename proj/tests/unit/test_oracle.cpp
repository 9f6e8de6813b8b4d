#include <doctest.h>

#include <cmath>
#include <random>

#include "crn/errors.hpp"
#include "crn/oracle.hpp"
#include "test_support.hpp"

using namespace crn;

TEST_SUITE("exact optimum") {
  TEST_CASE("T1 Model A connects exactly one SU") {
    const auto inst = crn::testing::t1();
    const auto r = solve_exact(inst, Model::A);
    CHECK(r.cost.total == -1.0);
    CHECK(r.assignment.connected() == 1);
    // Lexicographically smallest σ among the two optima: SU1 on the channel.
    CHECK(r.assignment.link(1, 0));
  }

  TEST_CASE("T2 Model B picks SU2 alone") {
    const auto inst = crn::testing::t2();
    const auto r = solve_exact(inst, Model::B);
    CHECK(r.cost.total == doctest::Approx(-1.51).epsilon(1e-14));
    CHECK(r.assignment.active(1));
    CHECK_FALSE(r.assignment.active(0));
  }

  TEST_CASE("matches brute force on random instances") {
    std::mt19937_64 rng(21);
    for (int k = 0; k < 150; ++k) {
      const auto inst = crn::testing::random_instance(
          rng, {.n_su = 6, .n_free = 3, .n_active = 2, .gain_hi = 0.9, .prio_lo = 0.5, .prio_hi = 2.0});
      for (auto model : {Model::A, Model::B}) {
        const auto r = solve_exact(inst, model);
        CHECK(r.cost.total == doctest::Approx(crn::testing::brute_force_optimum(inst, model)).epsilon(1e-12));
        CHECK(is_feasible(r.assignment, inst, model));
        CHECK(r.cost.total == doctest::Approx(evaluate(r.assignment, inst, model).total));
      }
    }
  }

  TEST_CASE("ties resolve to the lexicographically smallest sigma") {
    std::mt19937_64 rng(22);
    for (int k = 0; k < 60; ++k) {
      const auto inst = crn::testing::random_instance(rng, {.n_su = 5, .n_free = 3, .n_active = 1});
      const auto r = solve_exact(inst, Model::A);
      // Smallest σ (row-major bit string) among all optimal feasible matchings.
      std::vector<std::uint8_t> best;
      crn::testing::for_each_matching(inst, [&](const Assignment& a) {
        if (!crn::testing::reference_feasible(a, inst, Model::A)) return;
        if (std::abs(crn::testing::reference_cost(a, inst, Model::A) - r.cost.total) > 1e-12) return;
        std::vector<std::uint8_t> bits(a.sigma().data().begin(), a.sigma().data().end());
        if (best.empty() || bits < best) best = bits;
      });
      CHECK(std::vector<std::uint8_t>(r.assignment.sigma().data().begin(), r.assignment.sigma().data().end()) == best);
    }
  }

  TEST_CASE("search-space guard") {
    const ProblemInstance big(Matrix<std::uint8_t>(12, 10, 1), Matrix<double>(12, 0), std::vector<double>(12, 1.0),
                              {});
    CHECK_THROWS_AS(solve_exact(big, Model::A), SearchSpaceTooLarge);
    CHECK_NOTHROW(solve_exact(big, Model::A, {.max_search_space = 1e13}));
  }
}

TEST_SUITE("boltzmann") {
  TEST_CASE("single SU, single channel") {
    const ProblemInstance inst(Matrix<std::uint8_t>(1, 1, 1), Matrix<double>(1, 0), {1.0}, {});
    const auto t = boltzmann_marginals(inst, Model::A, 1.0);
    CHECK(t.su_marginals[0] == doctest::Approx(std::exp(1.0) / (1.0 + std::exp(1.0))).epsilon(1e-14));
    CHECK(t.z == doctest::Approx(1.0 + std::exp(1.0)));
    CHECK(t.configurations == 2);
  }

  TEST_CASE("beta zero counts configurations") {
    const auto inst = crn::testing::t1();  // configurations: {}, {SU0}, {SU1}
    const auto t = boltzmann_marginals(inst, Model::A, 0.0);
    CHECK(t.configurations == 3);
    CHECK(t.su_marginals[0] == doctest::Approx(1.0 / 3.0));
    CHECK(t.link_marginals(1, 0) == doctest::Approx(1.0 / 3.0));
  }

  TEST_CASE("large beta concentrates on a unique optimum") {
    const auto inst = crn::testing::t2();  // Model A optimum {SU2} is unique, gap 1
    const auto t = boltzmann_marginals(inst, Model::A, 20.0);
    CHECK(std::abs(t.su_marginals[1] - 1.0) < 1e-6);
    CHECK(std::abs(t.su_marginals[0]) < 1e-6);
  }

  TEST_CASE("matches brute force and stays in range") {
    std::mt19937_64 rng(24);
    for (int k = 0; k < 60; ++k) {
      const auto inst = crn::testing::random_instance(
          rng, {.n_su = 6, .n_free = 3, .n_active = 2, .gain_hi = 0.9, .prio_hi = 2.0});
      for (auto model : {Model::A, Model::B})
        for (double beta : {0.0, 0.7, 3.0}) {
          const auto t = boltzmann_marginals(inst, model, beta);
          const auto ref = crn::testing::brute_force_su_marginals(inst, model, beta);
          for (std::size_t i = 0; i < inst.n_su(); ++i) {
            CHECK(t.su_marginals[i] == doctest::Approx(ref[i]).epsilon(1e-12));
            double row = 0.0;
            for (std::size_t a = 0; a < inst.n_free(); ++a) {
              CHECK(t.link_marginals(i, a) >= 0.0);
              row += t.link_marginals(i, a);
            }
            CHECK(row == doctest::Approx(t.su_marginals[i]).epsilon(1e-12));
          }
          CHECK(t.z > 0.0);
        }
    }
  }

  TEST_CASE("log Z stays finite where Z overflows") {
    const ProblemInstance inst(Matrix<std::uint8_t>(1, 1, 1), Matrix<double>(1, 0), {1000.0}, {});
    const auto t = boltzmann_marginals(inst, Model::A, 1.0);
    CHECK(std::isfinite(t.log_z));
    CHECK(t.log_z == doctest::Approx(1000.0));
    CHECK(t.su_marginals[0] == doctest::Approx(1.0));
  }

  TEST_CASE("configuration guard") {
    const ProblemInstance inst(Matrix<std::uint8_t>(8, 8, 1), Matrix<double>(8, 0), std::vector<double>(8, 1.0), {});
    CHECK_THROWS_AS(boltzmann_marginals(inst, Model::A, 1.0, {.max_configurations = 1000}), SearchSpaceTooLarge);
  }
}
