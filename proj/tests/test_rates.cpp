#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rydrep/config.hpp"
#include "rydrep/rates.hpp"

using namespace rydrep;

namespace {

EfficiencyParams lossless() {
    EfficiencyParams p;
    p.P_R = 1.0;
    p.P_gamma = 1.0;
    p.P_B = 1.0;
    return p;
}

}  // namespace

TEST_CASE("collection efficiency from optical depth") {
    // direct arithmetic: 1 - sqrt(4/pi)/sqrt(3) = 0.348564
    double expected = 1.0 - std::sqrt(4.0 / M_PI) / std::sqrt(3.0);
    auto result = p_gamma_from_od(3.0);
    CHECK(result.value == doctest::Approx(expected).epsilon(1e-12));
    CHECK(result.value == doctest::Approx(0.3485).epsilon(3e-4));
    CHECK_FALSE(result.clamped);

    auto zero = p_gamma_from_od(4.0 / M_PI);
    CHECK(zero.value == 0.0);
    CHECK(zero.clamped);

    CHECK(p_gamma_from_od(1e9).value == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(p_gamma_from_od(10.0).value > p_gamma_from_od(5.0).value);

    CHECK_THROWS_AS(p_gamma_from_od(0.0), std::invalid_argument);
    CHECK_THROWS_AS(p_gamma_from_od(-1.0), std::invalid_argument);
}

TEST_CASE("two-node generation headline rates") {
    auto cons = conservative_preset().values;
    auto result = two_node_generation(cons);

    // independent route: T = ((n_G-1) t_o) / ((P_R^7 P_g^2)^2 P_B)
    double p_single = std::pow(0.79, 7) * 0.09;
    double expected_T = 6e-6 / (p_single * p_single * 0.5);
    CHECK(result.mean_time == doctest::Approx(expected_T).epsilon(1e-12));
    CHECK(result.rate == doctest::Approx(24.893).epsilon(1e-4));
    CHECK(result.mean_time == doctest::Approx(0.0401714).epsilon(1e-4));
    CHECK(result.rate == doctest::Approx(1.0 / result.mean_time).epsilon(1e-12));

    auto opt = optimistic_preset().values;
    CHECK(two_node_generation(opt).rate == doctest::Approx(7808.6).epsilon(1e-4));
    CHECK(two_node_generation(opt).mean_time == doctest::Approx(128.06e-6).epsilon(1e-4));

    // lossless limit: six operations worth of time
    CHECK(two_node_generation(lossless()).mean_time == doctest::Approx(6e-6).epsilon(1e-12));
}

TEST_CASE("repetition-rate ceilings") {
    auto params = conservative_preset().values;
    CHECK(max_rep_rate(params) == doctest::Approx(142857.14).epsilon(1e-6));

    params.d = 10e3;
    CHECK(light_limited_rate(params) == doctest::Approx(10e3).epsilon(1e-12));
    CHECK(max_rep_rate(params) == doctest::Approx(1.0 / 107e-6).epsilon(1e-9));

    EfficiencyParams single = conservative_preset().values;
    single.n_G = 1;
    CHECK(max_rep_rate(single) == doctest::Approx(1e6).epsilon(1e-12));
}

TEST_CASE("two-node teleportation rates") {
    auto cons = conservative_preset().values;
    auto result = two_node_teleportation(cons);
    double t_g = 6e-6;
    double p_single = std::pow(0.79, 7) * 0.09;
    double big_t_g = t_g / (p_single * p_single * 0.5);
    double expected = (big_t_g + 7e-6) / std::pow(0.79, 7);
    CHECK(result.mean_time == doctest::Approx(expected).epsilon(1e-12));
    CHECK(result.rate == doctest::Approx(4.7797).epsilon(1e-4));

    auto opt = optimistic_preset().values;
    CHECK(two_node_teleportation(opt).rate == doctest::Approx(3541.3).epsilon(1e-4));
    CHECK(two_node_teleportation(opt).mean_time == doctest::Approx(282.38e-6).epsilon(1e-4));

    // with perfect Rydberg transitions the teleportation adds only its time
    EfficiencyParams perfect = cons;
    perfect.P_R = 1.0;
    CHECK(two_node_teleportation(perfect).mean_time ==
          doctest::Approx(two_node_generation(perfect).mean_time + perfect.t_T())
              .epsilon(1e-12));
}

TEST_CASE("comparison against the 12-step preparation") {
    // rate ratio = (11/6) * P_R^-10
    auto cons = conservative_preset().values;
    CHECK(twelve_step_rate_ratio(cons) ==
          doctest::Approx((11.0 / 6.0) * std::pow(0.79, -10)).epsilon(1e-12));
    CHECK(twelve_step_rate_ratio(cons) == doctest::Approx(19.363).epsilon(1e-4));

    auto opt = optimistic_preset().values;
    CHECK(twelve_step_rate_ratio(opt) == doctest::Approx(5.258).epsilon(1e-4));

    CHECK(twelve_step_rate_ratio(lossless()) == doctest::Approx(11.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("multi-node generation") {
    auto cons = conservative_preset().values;

    SUBCASE("n=1 recursion reduces to the two-node value") {
        CHECK(multi_node_generation(cons, 1, SolveMethod::recursion).mean_time ==
              doctest::Approx(two_node_generation(cons).mean_time).epsilon(1e-12));
    }

    SUBCASE("recursion matches closed form for small success probability") {
        double recursion = multi_node_generation(cons, 10, SolveMethod::recursion).mean_time;
        double closed = multi_node_generation(cons, 10, SolveMethod::closed_form).mean_time;
        CHECK(std::abs(recursion - closed) / closed < 0.01);
    }

    SUBCASE("perfect operations grow linearly") {
        auto perfect = lossless();
        double prev = multi_node_generation(perfect, 1, SolveMethod::recursion).mean_time;
        double step = 0.0;
        for (int n = 2; n <= 6; ++n) {
            double current = multi_node_generation(perfect, n, SolveMethod::recursion).mean_time;
            double diff = current - prev;
            if (n > 2) CHECK(diff == doctest::Approx(step).epsilon(1e-12));
            step = diff;
            prev = current;
        }
        CHECK(step == doctest::Approx(perfect.t_S()).epsilon(1e-12));
    }

    CHECK_THROWS_AS(multi_node_generation(cons, 0, SolveMethod::recursion),
                    std::invalid_argument);
}

TEST_CASE("deterministic swapping") {
    auto opt = optimistic_preset().values;
    CHECK(deterministic_swap_generation(opt, 0).mean_time ==
          doctest::Approx(two_node_generation(opt).mean_time).epsilon(1e-12));
    CHECK(deterministic_swap_generation(opt, 1).mean_time ==
          doctest::Approx(192.1e-6).epsilon(1e-3));

    auto cons = conservative_preset().values;
    double ratio = multi_node_generation(cons, 2, SolveMethod::closed_form).mean_time /
                   deterministic_swap_generation(cons, 1).mean_time;
    CHECK(ratio == doctest::Approx(4464.0).epsilon(1e-3));

    double ratio_opt = multi_node_generation(opt, 2, SolveMethod::closed_form).mean_time /
                       deterministic_swap_generation(opt, 1).mean_time;
    CHECK(ratio_opt == doctest::Approx(14.93).epsilon(1e-3));
}

TEST_CASE("chain teleportation") {
    auto cons = conservative_preset().values;
    auto opt = optimistic_preset().values;

    CHECK(chain_teleportation(cons, 1, SolveMethod::recursion).mean_time ==
          doctest::Approx(two_node_teleportation(cons).mean_time).epsilon(1e-12));

    double recursion = chain_teleportation(cons, 8, SolveMethod::recursion).mean_time;
    double closed = chain_teleportation(cons, 8, SolveMethod::closed_form).mean_time;
    CHECK(std::abs(recursion - closed) / closed < 0.02);

    CHECK(chain_teleportation(opt, 2, SolveMethod::closed_form).mean_time ==
          doctest::Approx(0.0122222).epsilon(1e-3));
    CHECK(chain_teleportation(opt, 5, SolveMethod::closed_form).mean_time ==
          doctest::Approx(1086.1).epsilon(1e-3));

    CHECK_THROWS_AS(chain_teleportation(cons, 0, SolveMethod::recursion), std::invalid_argument);
}

TEST_CASE("end-to-end teleportation") {
    auto opt = optimistic_preset().values;
    CHECK(end_to_end_teleportation(opt, 2).mean_time == doctest::Approx(0.0059957).epsilon(1e-3));
    CHECK(end_to_end_teleportation(opt, 5).mean_time == doctest::Approx(58.30).epsilon(1e-3));

    SUBCASE("strictly faster than hop-by-hop for n >= 2") {
        for (const auto& preset : {conservative_preset().values, opt}) {
            for (int n = 2; n <= 10; ++n) {
                CHECK(end_to_end_teleportation(preset, n).mean_time <
                      chain_teleportation(preset, n, SolveMethod::closed_form).mean_time);
            }
        }
    }

    SUBCASE("speedup follows the closed-form ratio") {
        for (int n = 2; n <= 6; ++n) {
            double ratio = chain_teleportation(opt, n, SolveMethod::closed_form).mean_time /
                           end_to_end_teleportation(opt, n).mean_time;
            double pg = opt.P_G();
            double pt = opt.P_T();
            double expected = std::pow(pt, 1 - n) * (1.0 - pg) / (1.0 - pg * pt);
            CHECK(ratio == doctest::Approx(expected).epsilon(1e-9));
        }
    }
}

TEST_CASE("mean times are monotone in the parameters") {
    auto base = conservative_preset().values;
    auto time_of = [](const EfficiencyParams& p) { return two_node_teleportation(p).mean_time; };

    for (double delta : {0.01, 0.05, 0.1}) {
        EfficiencyParams better = base;
        better.P_R = base.P_R + delta;
        CHECK(time_of(better) < time_of(base));

        better = base;
        better.P_gamma = base.P_gamma + delta;
        CHECK(time_of(better) < time_of(base));

        better = base;
        better.P_B = base.P_B + delta;
        CHECK(time_of(better) < time_of(base));
    }
    for (int extra : {1, 2, 5}) {
        EfficiencyParams slower = base;
        slower.n_G = base.n_G + extra;
        CHECK(time_of(slower) > time_of(base));

        slower = base;
        slower.n_T = base.n_T + extra;
        CHECK(time_of(slower) > time_of(base));

        slower = base;
        slower.d = 1000.0 * extra;
        CHECK(time_of(slower) > time_of(base));
    }
}

TEST_CASE("generation rate versus step count reproduces the plotted trend") {
    for (const auto& preset : {conservative_preset().values, optimistic_preset().values}) {
        double previous = 0.0;
        for (int steps = 4; steps <= 16; ++steps) {
            EfficiencyParams params = preset;
            params.n_G = steps;
            double rate = two_node_generation(params).rate;
            if (steps > 4) CHECK(rate < previous);
            previous = rate;
        }
    }
    // the two presets span several orders of magnitude at n_G = 16
    EfficiencyParams cons16 = conservative_preset().values;
    cons16.n_G = 16;
    EfficiencyParams opt4 = optimistic_preset().values;
    opt4.n_G = 4;
    CHECK(two_node_generation(opt4).rate / two_node_generation(cons16).rate > 1e4);
}

TEST_CASE("rates versus transition efficiency cross the quoted points") {
    EfficiencyParams params = optimistic_preset().values;
    params.P_R = 0.9;
    params.P_gamma = 0.8;
    params.n_G = 7;
    CHECK(two_node_generation(params).rate == doctest::Approx(7808.6).epsilon(1e-3));
    CHECK(two_node_teleportation(params).rate == doctest::Approx(3541.3).epsilon(1e-3));

    double previous_gen = 0.0;
    double previous_tel = 0.0;
    for (double p_r = 0.5; p_r <= 1.0001; p_r += 0.05) {
        params.P_R = std::min(p_r, 1.0);
        double gen = two_node_generation(params).rate;
        double tel = two_node_teleportation(params).rate;
        CHECK(gen > previous_gen);
        CHECK(tel > previous_tel);
        CHECK(tel < gen);
        previous_gen = gen;
        previous_tel = tel;
    }
}

TEST_CASE("parameter validation") {
    EfficiencyParams params;
    params.P_R = 0.0;
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);
    params = EfficiencyParams{};
    params.P_gamma = 1.5;
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);
    params = EfficiencyParams{};
    params.n_G = 0;
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);
    CHECK_THROWS_AS(preset_by_name("bogus"), std::invalid_argument);
}

TEST_CASE("config text round trip and precedence") {
    auto entries = parse_key_values("P_R = 0.85\nn_G=9\n# comment\nOD=4.5\n");
    EfficiencyParams params = conservative_preset().values;
    apply_config(params, entries);
    CHECK(params.P_R == doctest::Approx(0.85));
    CHECK(params.n_G == 9);
    CHECK(params.OD.has_value());
    CHECK(*params.OD == doctest::Approx(4.5));
    CHECK(params.P_gamma == doctest::Approx(0.3));  // untouched

    auto reparsed = parse_key_values(params_to_config(params));
    EfficiencyParams copy;
    apply_config(copy, reparsed);
    CHECK(copy.P_R == doctest::Approx(params.P_R).epsilon(1e-15));
    CHECK(copy.n_G == params.n_G);

    CHECK_THROWS_AS(apply_config(params, {{"bogus", "1"}}), std::invalid_argument);
}
