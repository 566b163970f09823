#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "emslab/errors.hpp"
#include "emslab/harness/experiment.hpp"
#include "emslab/sim/trace_io.hpp"

using namespace emslab;
namespace fs = std::filesystem;

namespace {

const std::string kDataDir = EMSLAB_DATA_DIR;

// short pulse cycle kept on disk for the harness round trips
std::string write_short_cycle(const fs::path& dir) {
    cycle::DriveCycle c;
    c.dt = 1.0;
    for (int i = 0; i <= 60; ++i) {
        double v = 0.0;
        if (i > 3 && i <= 20) v = std::min(12.0, 1.5 * (i - 3));
        if (i > 20 && i <= 40) v = 12.0;
        if (i > 40) v = std::max(0.0, 12.0 - 1.2 * (i - 40));
        c.speed.push_back(v);
    }
    c.grade.assign(c.speed.size(), 0.0);
    const auto path = (dir / "short.csv").string();
    cycle::save_cycle(c, path);
    return path;
}

std::string write_experiment(const fs::path& dir, const std::string& cycle_path,
                             int episodes, std::uint64_t seed) {
    nlohmann::json j;
    j["vehicle"] = kDataDir + "/vehicles/midsize.json";
    j["train_cycle"] = cycle_path;
    j["eval_cycles"] = {cycle_path};
    j["episodes"] = episodes;
    j["seed"] = seed;
    j["output_dir"] = (dir / "run").string();
    j["agent"] = {{"actor_hidden", {12, 12}},
                  {"critic_hidden", {12, 12, 6}},
                  {"batch_size", 16},
                  {"buffer_capacity", 1024},
                  {"mc_passes", 2}};
    const auto path = (dir / "exp.json").string();
    std::ofstream(path) << j.dump(2);
    return path;
}

} // namespace

TEST_CASE("experiment config") {
    const auto dir = fs::temp_directory_path() / "emslab_cfg";
    fs::create_directories(dir);
    const auto cyc = write_short_cycle(dir);

    SUBCASE("defaults fill unset fields") {
        const auto path = write_experiment(dir, cyc, 3, 9);
        const auto cfg = harness::load_experiment(path);
        CHECK(cfg.episodes == 3);
        CHECK(cfg.seed == 9);
        CHECK(cfg.agent.batch_size == 16);
        CHECK(cfg.agent.gamma == 0.99);        // untouched default
        CHECK(cfg.reward.alpha1 == 1.5);
        CHECK(cfg.reward.alpha2 == 10.0);
        CHECK(cfg.reward.alpha3 == 0.1);
        CHECK(cfg.reward.soc_ref == 0.65);
        CHECK(cfg.warmup_episodes == 1);
    }
    SUBCASE("missing cycle path fails at load") {
        nlohmann::json j;
        j["vehicle"] = kDataDir + "/vehicles/midsize.json";
        j["train_cycle"] = (dir / "nope.csv").string();
        j["episodes"] = 1;
        j["seed"] = 0;
        j["output_dir"] = (dir / "x").string();
        const auto path = (dir / "bad.json").string();
        std::ofstream(path) << j.dump();
        CHECK_THROWS_AS(harness::load_experiment(path), Error);
    }
    SUBCASE("relative paths resolve against the config directory") {
        nlohmann::json j;
        j["vehicle"] = kDataDir + "/vehicles/midsize.json";
        j["train_cycle"] = "short.csv";
        j["episodes"] = 1;
        j["seed"] = 0;
        j["output_dir"] = "out";
        const auto path = (dir / "rel.json").string();
        std::ofstream(path) << j.dump();
        const auto cfg = harness::load_experiment(path);
        CHECK(cfg.train_cycle == (dir / "short.csv").lexically_normal().string());
    }
}

TEST_CASE("train smoke: checkpoints load and the log parses") {
    const auto dir = fs::temp_directory_path() / "emslab_train";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto cyc = write_short_cycle(dir);
    const auto cfg_path = write_experiment(dir, cyc, 2, 5);
    const auto cfg = harness::load_experiment(cfg_path);

    const auto result = harness::train(cfg);
    CHECK(result.episodes.size() == 2);
    CHECK(fs::exists(result.checkpoint_path));
    CHECK(fs::exists(cfg.output_dir + "/checkpoint_ep1.json"));
    CHECK(fs::exists(cfg.output_dir + "/checkpoint_ep2.json"));

    // every jsonl line parses on its own
    std::ifstream log(result.log_path);
    std::string line;
    int lines = 0;
    while (std::getline(log, line)) {
        CHECK_NOTHROW(nlohmann::json::parse(line));
        ++lines;
    }
    CHECK(lines == 2);

    // the checkpoint evaluates to completion on the training cycle
    const auto veh = vehicle::load_vehicle(cfg.vehicle_path);
    const auto c = cycle::load_cycle(cyc);
    const auto summary = harness::evaluate_checkpoint(
        result.checkpoint_path, veh, c, cfg.reward, (dir / "eval").string());
    CHECK(summary.strategy == "rl");
    CHECK(fs::exists(dir / "eval" / "trace.csv"));
    CHECK(fs::exists(dir / "eval" / "summary.json"));

    SUBCASE("evaluating twice gives an identical trace") {
        const auto s2 = harness::evaluate_checkpoint(
            result.checkpoint_path, veh, c, cfg.reward, (dir / "eval2").string());
        CHECK(s2.total_energy_kwh == summary.total_energy_kwh);
        CHECK(s2.episode_return == summary.episode_return);
        std::ifstream a(dir / "eval" / "trace.csv"), b(dir / "eval2" / "trace.csv");
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        CHECK(sa.str() == sb.str());
    }
    SUBCASE("training twice with one seed gives identical logs") {
        const auto dir2 = fs::temp_directory_path() / "emslab_train2";
        fs::remove_all(dir2);
        fs::create_directories(dir2);
        const auto cyc2 = write_short_cycle(dir2);
        const auto cfg2 = harness::load_experiment(
            write_experiment(dir2, cyc2, 2, 5));
        const auto r2 = harness::train(cfg2);
        std::ifstream a(result.log_path), b(r2.log_path);
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        CHECK(sa.str() == sb.str());
    }
    SUBCASE("rule-based evaluation through the same path matches run_cycle") {
        const auto rb = harness::evaluate_rule_based(veh, c, cfg.reward,
                                                     (dir / "rb").string());
        const auto tr = sim::run_cycle(
            veh, c, [&](const sim::SimState& st, double p_req) {
                return sim::rule_based_split(st, veh, p_req, cfg.reward.soc_ref);
            });
        CHECK(rb.total_energy_kwh == tr.total_energy_kwh);
        CHECK(rb.speed_miss_steps == tr.speed_miss_steps);
        CHECK(rb.final_soc == tr.final_soc);
    }
    SUBCASE("transfer produces two rows per cycle and the comparison files") {
        const auto table = harness::transfer(
            result.checkpoint_path, veh, {cyc, cyc}, cfg.reward,
            (dir / "transfer").string());
        CHECK(table.rows.size() == 4);
        CHECK(fs::exists(dir / "transfer" / "result_table.csv"));
        CHECK(fs::exists(dir / "transfer" / "table.txt"));
        // csv row count: header + 4
        std::ifstream in(dir / "transfer" / "result_table.csv");
        int rows = 0;
        std::string line2;
        while (std::getline(in, line2)) ++rows;
        CHECK(rows == 5);
    }
    SUBCASE("compare aligns runs and reproduces totals in the last row") {
        harness::evaluate_rule_based(veh, c, cfg.reward, (dir / "cmp_rule").string());
        harness::evaluate_checkpoint(result.checkpoint_path, veh, c, cfg.reward,
                                     (dir / "cmp_rl").string());
        const auto out = (dir / "compare.csv").string();
        harness::compare_plotdata(
            {(dir / "cmp_rule").string(), (dir / "cmp_rl").string()}, out);

        std::ifstream in(out);
        std::string header, last, line2;
        std::getline(in, header);
        while (std::getline(in, line2))
            if (!line2.empty()) last = line2;
        CHECK(header ==
              "t,v_target,cum_energy_kwh_rule,speed_diff_rule,"
              "cum_energy_kwh_rl,speed_diff_rl");

        // last cumulative-energy columns equal the summary totals
        std::vector<double> cells;
        std::stringstream ss(last);
        std::string f;
        while (std::getline(ss, f, ',')) cells.push_back(std::stod(f));
        REQUIRE(cells.size() == 6);
        const auto lt = sim::load_trace((dir / "cmp_rule" / "trace.csv").string(),
                                        (dir / "cmp_rule" / "summary.json").string());
        CHECK(cells[2] == doctest::Approx(lt.total_energy_kwh).epsilon(1e-9));
    }
    SUBCASE("comparing traces of different cycles is an argument error") {
        harness::evaluate_rule_based(veh, c, cfg.reward, (dir / "cmp_a").string());
        const auto other = cycle::load_cycle(kDataDir + "/cycles/nedc.csv");
        harness::evaluate_rule_based(veh, other, cfg.reward,
                                     (dir / "cmp_b").string());
        CHECK_THROWS_AS(
            harness::compare_plotdata(
                {(dir / "cmp_a").string(), (dir / "cmp_b").string()},
                (dir / "cmp_bad.csv").string()),
            Error);
    }
}
