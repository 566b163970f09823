#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "emslab/errors.hpp"
#include "emslab/vehicle/vehicle.hpp"

using namespace emslab;
using vehicle::EfficiencyCurve;

namespace {
const std::string kDataDir = EMSLAB_DATA_DIR;
}

TEST_CASE("bundled vehicle configs load with the expected battery sizes") {
    const auto prius =
        vehicle::load_vehicle(kDataDir + "/vehicles/prius_prime.json");
    CHECK(prius.battery.capacity_kwh == 8.8);
    CHECK(prius.architecture == vehicle::Architecture::series_parallel);
    CHECK(prius.motor_mass_included);
    // 1420 + 25 + 0.9 * 68
    CHECK(prius.mass_kg == doctest::Approx(1506.2));

    const auto i3 = vehicle::load_vehicle(kDataDir + "/vehicles/bmw_i3_rex.json");
    CHECK(i3.battery.capacity_kwh == 33.0);
    CHECK(i3.architecture == vehicle::Architecture::series);
    // 1245 + 50 + 0.8 * 125
    CHECK(i3.mass_kg == doctest::Approx(1395.0));
}

TEST_CASE("loading the same config twice never double-adds motor mass") {
    const auto a = vehicle::load_vehicle(kDataDir + "/vehicles/midsize.json");
    const auto b = vehicle::load_vehicle(kDataDir + "/vehicles/midsize.json");
    CHECK(a.mass_kg == b.mass_kg);
    CHECK(a.motor_mass_included);
}

TEST_CASE("invalid soc window is a validation error") {
    auto v = vehicle::load_vehicle(kDataDir + "/vehicles/midsize.json");
    v.battery.soc_min = 0.9;
    v.battery.soc_max = 0.5;
    CHECK_THROWS_AS(vehicle::validate_vehicle(v), Error);
}

TEST_CASE("missing field is a schema error naming the field") {
    namespace fs = std::filesystem;
    const auto path = (fs::temp_directory_path() / "veh_missing.json").string();
    {
        std::ofstream out(path);
        out << R"({"name":"x","architecture":"series","vehicle":{}})";
    }
    CHECK_THROWS_WITH_AS(vehicle::load_vehicle(path),
                         doctest::Contains("vehicle.mass_kg"), Error);
}

TEST_CASE("eff_lookup") {
    EfficiencyCurve two{{0.0, 1.0}, {0.1, 0.4}};
    SUBCASE("linear midpoint") {
        CHECK(vehicle::eff_lookup(two, 0.5) == doctest::Approx(0.25));
    }
    SUBCASE("exact at knots") {
        EfficiencyCurve c{{0.0, 0.2, 0.7, 1.0}, {0.15, 0.3, 0.38, 0.33}};
        CHECK(vehicle::eff_lookup(c, 0.0) == 0.15);
        CHECK(vehicle::eff_lookup(c, 0.2) == 0.3);
        CHECK(vehicle::eff_lookup(c, 0.7) == 0.38);
        CHECK(vehicle::eff_lookup(c, 1.0) == 0.33);
    }
    SUBCASE("five-knot curve against the manual segment formula") {
        EfficiencyCurve c{{0.0, 0.25, 0.5, 0.75, 1.0},
                          {0.10, 0.30, 0.36, 0.38, 0.35}};
        // 0.33 sits in [0.25, 0.5]: 0.30 + (0.08 / 0.25) * 0.06 = 0.3192
        CHECK(vehicle::eff_lookup(c, 0.33) == doctest::Approx(0.3192).epsilon(1e-12));
    }
    SUBCASE("out-of-range load is an argument error") {
        CHECK_THROWS_AS(vehicle::eff_lookup(two, -0.01), Error);
        CHECK_THROWS_AS(vehicle::eff_lookup(two, 1.01), Error);
    }
    SUBCASE("property: result stays inside the knot efficiency range") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        for (int trial = 0; trial < 100; ++trial) {
            EfficiencyCurve c;
            const int knots = 2 + static_cast<int>(rng() % 6);
            c.load_fraction.push_back(0.0);
            for (int i = 1; i < knots - 1; ++i)
                c.load_fraction.push_back(u01(rng));
            c.load_fraction.push_back(1.0);
            std::sort(c.load_fraction.begin(), c.load_fraction.end());
            c.load_fraction.erase(std::unique(c.load_fraction.begin(),
                                              c.load_fraction.end()),
                                  c.load_fraction.end());
            for (std::size_t i = 0; i < c.load_fraction.size(); ++i)
                c.efficiency.push_back(0.05 + 0.9 * u01(rng));
            const double lo =
                *std::min_element(c.efficiency.begin(), c.efficiency.end());
            const double hi =
                *std::max_element(c.efficiency.begin(), c.efficiency.end());
            for (int q = 0; q < 50; ++q) {
                const double e = vehicle::eff_lookup(c, u01(rng));
                CHECK(e >= lo - 1e-12);
                CHECK(e <= hi + 1e-12);
            }
        }
    }
}

TEST_CASE("ramp_limit") {
    SUBCASE("quarter ramp from rest") {
        CHECK(vehicle::ramp_limit(0.0, 100.0, 4.0, 1.0) == doctest::Approx(25.0));
    }
    SUBCASE("zero time-to-full means no limit") {
        CHECK(vehicle::ramp_limit(0.0, 100.0, 0.0, 1.0) == 100.0);
    }
    SUBCASE("cap at max power") {
        CHECK(vehicle::ramp_limit(90.0, 100.0, 4.0, 1.0) == 100.0);
    }
    SUBCASE("property: never exceeds max and never below prev when ramping up") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 500; ++trial) {
            const double max_p = 1.0 + 200.0 * u(rng);
            const double prev = max_p * u(rng);
            const double t_full = 10.0 * u(rng);
            const double dt = 0.1 + 2.0 * u(rng);
            const double lim = vehicle::ramp_limit(prev, max_p, t_full, dt);
            CHECK(lim <= max_p + 1e-12);
            CHECK(lim >= std::min(prev, max_p) - 1e-12);
        }
    }
}
