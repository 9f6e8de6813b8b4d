#include <doctest.h>

#include <cmath>
#include <random>

#include "crn/bp_field.hpp"
#include "crn/bp_full.hpp"
#include "crn/numeric.hpp"
#include "test_support.hpp"

using namespace crn;

namespace {

BpConfig beta_cfg(double beta) {
  BpConfig cfg;
  cfg.beta = beta;
  return cfg;
}

// Fields that correspond to a given full message set.
FieldMessages to_fields(const MessageSet& ms, double beta) {
  FieldMessages fm;
  for (const auto& m : ms.a) fm.h_su.push_back(m.log_ratio() / beta);
  for (const auto& m : ms.b) fm.h_ch.push_back(m.log_ratio() / beta);
  for (const auto& m : ms.c) fm.q_su.push_back(m.log_ratio() / beta);
  for (const auto& m : ms.d) fm.q_pu.push_back(m.log_ratio() / beta);
  return fm;
}

MessageSet random_messages(std::mt19937_64& rng, const FactorGraph& fg) {
  std::uniform_real_distribution<double> u(0.05, 0.95);
  auto ms = init_messages(fg);
  for (auto* family : {&ms.a, &ms.b, &ms.c, &ms.d})
    for (auto& m : *family) {
      const double p = u(rng);
      m = {1.0 - p, p};
    }
  return ms;
}

}  // namespace

TEST_SUITE("field updates") {
  TEST_CASE("h_su of a lone SU is its priority") {
    const ProblemInstance inst(Matrix<std::uint8_t>(1, 1, 1), Matrix<double>(1, 0), {1.0}, {});
    const FactorGraph fg(inst);
    CHECK(update_field_h_su(0, init_fields(fg), fg, inst, beta_cfg(1.0)) == doctest::Approx(1.0));
  }

  TEST_CASE("h_ch examples") {
    const auto cfg = beta_cfg(1.0);
    const ProblemInstance lone(Matrix<std::uint8_t>(1, 1, 1), Matrix<double>(1, 0), {1.0}, {});
    const FactorGraph fg1(lone);
    CHECK(update_field_h_ch(0, init_fields(fg1), fg1, cfg) == 0.0);

    const ProblemInstance pair(Matrix<std::uint8_t>(2, 1, 1), Matrix<double>(2, 0), {1.0, 1.0}, {});
    const FactorGraph fg2(pair);
    CHECK(update_field_h_ch(0, init_fields(fg2), fg2, cfg) == doctest::Approx(-std::log(2.0)));

    std::mt19937_64 rng(61);
    std::normal_distribution<double> n(0.0, 3.0);
    const ProblemInstance crowd(Matrix<std::uint8_t>(5, 1, 1), Matrix<double>(5, 0), std::vector<double>(5, 1.0), {});
    const FactorGraph fg5(crowd);
    for (int k = 0; k < 100; ++k) {
      auto fm = init_fields(fg5);
      for (auto& h : fm.h_su) h = n(rng);
      for (std::size_t e = 0; e < 5; ++e) CHECK(update_field_h_ch(e, fm, fg5, beta_cfg(2.0)) <= 0.0);
    }
  }

  TEST_CASE("q_su examples") {
    const ProblemInstance none(Matrix<std::uint8_t>(1, 0), Matrix<double>(1, 1, 0.5), {1.0}, {1.0});
    const FactorGraph fg0(none);
    CHECK(update_field_q_su(0, init_fields(fg0), fg0, none, beta_cfg(1.0)) == kForcedZero);

    // One channel with h_ch = 0: availability ln(e^0) = 0, so q = c.
    const ProblemInstance one(Matrix<std::uint8_t>(1, 1, 1), Matrix<double>(1, 1, 0.5), {1.0}, {1.0});
    const FactorGraph fg1(one);
    auto cfg = beta_cfg(1.0);
    cfg.include_diagonal = false;
    CHECK(update_field_q_su(0, init_fields(fg1), fg1, one, cfg) == doctest::Approx(1.0));
  }

  TEST_CASE("q_pu on T1") {
    const auto inst = crn::testing::t1();
    const FactorGraph fg(inst);
    const double q = update_field_q_pu(0, init_fields(fg), fg, inst, beta_cfg(1.0));
    CHECK(q == doctest::Approx(std::log1p(std::exp(-0.42)) - std::log(2.0)).epsilon(1e-12));
    CHECK(q == doctest::Approx(-0.1881).epsilon(1e-3));
  }

  TEST_CASE("q_pu is never positive") {
    std::mt19937_64 rng(62);
    std::normal_distribution<double> n(0.0, 2.0);
    for (int k = 0; k < 30; ++k) {
      const auto inst = crn::testing::random_instance(rng, {.n_su = 8, .n_free = 3, .n_active = 3});
      const FactorGraph fg(inst);
      auto fm = init_fields(fg);
      for (auto& q : fm.q_su) q = n(rng);
      for (std::size_t f = 0; f < fg.active_edges().size(); ++f)
        for (auto coupling : {PuCoupling::product, PuCoupling::pairwise}) {
          auto cfg = beta_cfg(4.0);
          cfg.pu_coupling = coupling;
          CHECK(update_field_q_pu(f, fm, fg, inst, cfg) <= 0.0);
        }
    }
  }

  TEST_CASE("negate_q flips the q fields") {
    const auto inst = crn::testing::t1();
    const FactorGraph fg(inst);
    auto cfg = beta_cfg(1.0);
    const auto fm = init_fields(fg);
    const double q_pu = update_field_q_pu(0, fm, fg, inst, cfg);
    const double q_su = update_field_q_su(0, fm, fg, inst, cfg);
    cfg.negate_q = true;
    CHECK(update_field_q_pu(0, fm, fg, inst, cfg) == doctest::Approx(-q_pu));
    CHECK(update_field_q_su(0, fm, fg, inst, cfg) == doctest::Approx(-q_su));
  }

  TEST_CASE("exact coupling has no field form") {
    const auto inst = crn::testing::t1();
    const FactorGraph fg(inst);
    auto cfg = beta_cfg(1.0);
    cfg.pu_coupling = PuCoupling::exact;
    CHECK_THROWS_AS(update_field_q_pu(0, init_fields(fg), fg, inst, cfg), std::invalid_argument);
    CHECK_THROWS_AS(FieldBpSolver(fg, inst, cfg), std::invalid_argument);
  }

  TEST_CASE("every field equals the full log ratio over beta") {
    std::mt19937_64 rng(63);
    for (int k = 0; k < 40; ++k) {
      const auto inst = crn::testing::random_instance(
          rng, {.n_su = 8, .n_free = 4, .n_active = 3, .gain_hi = 0.8, .prio_lo = 0.5, .prio_hi = 2.0});
      const FactorGraph fg(inst);
      const auto ms = random_messages(rng, fg);
      for (double beta : {0.3, 2.0, 9.0})
        for (auto coupling : {PuCoupling::product, PuCoupling::pairwise})
          for (bool diag : {true, false})
            for (auto sum : {ActivitySum::at_most_one, ActivitySum::unconstrained})
              for (auto chan : {ChannelConstraint::at_most_one, ChannelConstraint::exact_one}) {
                auto cfg = beta_cfg(beta);
                cfg.pu_coupling = coupling;
                cfg.include_diagonal = diag;
                cfg.activity_sum = sum;
                cfg.channel_constraint = chan;
                const auto fm = to_fields(ms, beta);
                for (std::size_t e = 0; e < fg.channel_edges().size(); ++e) {
                  const double h_su = update_field_h_su(e, fm, fg, inst, cfg);
                  const double full_a = update_A(e, ms, fg, inst, Model::B, cfg).log_ratio() / beta;
                  CHECK(h_su == doctest::Approx(full_a).epsilon(1e-9));
                  const Msg b = update_B(e, ms, fg, cfg);
                  const double h_ch = update_field_h_ch(e, fm, fg, cfg);
                  if (b.p0 == 0.0)
                    CHECK(h_ch == kForcedOne);
                  else
                    CHECK(h_ch == doctest::Approx(b.log_ratio() / beta).epsilon(1e-9));
                }
                for (std::size_t f = 0; f < fg.active_edges().size(); ++f) {
                  const Msg c = update_C(f, ms, fg, inst, Model::B, cfg);
                  const double q_su = update_field_q_su(f, fm, fg, inst, cfg);
                  if (c.p1 == 0.0)
                    CHECK(q_su == kForcedZero);
                  else
                    CHECK(q_su == doctest::Approx(c.log_ratio() / beta).epsilon(1e-9));
                  CHECK(update_field_q_pu(f, fm, fg, inst, cfg) ==
                        doctest::Approx(update_D_model_b(f, ms, fg, inst, cfg).log_ratio() / beta).epsilon(1e-9));
                }
              }
    }
  }
}

TEST_SUITE("field solver") {
  TEST_CASE("iterates track the full-message solver sweep by sweep") {
    std::mt19937_64 rng(64);
    for (int k = 0; k < 15; ++k) {
      const auto inst = crn::testing::random_instance(
          rng, {.n_su = 10, .n_free = 5, .n_active = 3, .gain_hi = 0.8, .prio_hi = 2.0});
      const FactorGraph fg(inst);
      for (double beta : {0.5, 2.0, 5.0}) {
        const auto cfg = beta_cfg(beta);
        FullBpSolver full(fg, inst, Model::B, cfg);
        FieldBpSolver field(fg, inst, cfg);
        for (int t = 0; t < 30; ++t) {
          full.sweep();
          field.sweep();
          const auto expect = to_fields(full.messages(), beta);
          for (std::size_t e = 0; e < fg.channel_edges().size(); ++e) {
            CHECK(field.fields().h_su[e] == doctest::Approx(expect.h_su[e]).epsilon(1e-8));
            CHECK(field.fields().h_ch[e] == doctest::Approx(expect.h_ch[e]).epsilon(1e-8));
          }
          for (std::size_t f = 0; f < fg.active_edges().size(); ++f) {
            CHECK(field.fields().q_pu[f] == doctest::Approx(expect.q_pu[f]).epsilon(1e-8));
          }
        }
        const auto rf = iterate(fg, inst, Model::B, cfg);
        const auto rd = iterate_field(fg, inst, cfg);
        CHECK(rf.converged == rd.converged);
        CHECK(rf.assignment == rd.assignment);
      }
    }
  }

  TEST_CASE("large beta stays finite") {
    std::mt19937_64 rng(65);
    for (int k = 0; k < 10; ++k) {
      const auto inst = crn::testing::random_instance(rng, {.n_su = 12, .n_free = 6, .n_active = 3, .prio_hi = 2.0});
      const FactorGraph fg(inst);
      for (double beta : {30.0, 200.0, 1e4}) {
        const auto r = iterate_field(fg, inst, beta_cfg(beta));
        CHECK(r.beta_used == beta);
        for (double m : r.su_marginals) CHECK(std::isfinite(m));
        CHECK(std::isfinite(r.cost.total));
        CHECK(is_feasible(r.assignment, inst, Model::B));
      }
    }
  }

  TEST_CASE("T2 with the pairwise coupling picks SU2") {
    const auto inst = crn::testing::t2();
    const FactorGraph fg(inst);
    auto cfg = beta_cfg(10.0);
    cfg.pu_coupling = PuCoupling::pairwise;
    const auto r = iterate_field(fg, inst, cfg);
    CHECK(r.converged);
    CHECK(r.cost.total == doctest::Approx(-1.51));
  }
}
