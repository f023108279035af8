#include "qnet_asym/chain_sim.hpp"
#include "qnet_asym/errors.hpp"
#include "qnet_asym/link_physics.hpp"
#include "qnet_asym/sweep.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace qnet_asym;
using namespace qnet_asym::sweep;

namespace {

const char* midpoint_doc = R"({
  "mode": "midpoint",
  "parameters": {"l_tot_km": 100, "p_dc": 3e-4, "q": 4e-3, "l_att_km": 22, "p0": 1},
  "sweep": {"variable": "delta_l_km", "start": 0, "stop": 40, "points": 41}
})";

std::string chain_config(const std::string& extra_params, const std::string& sweep)
{
    return R"({"mode": "chain", "parameters": {"total_length_km": 200, "n_repeaters": 3, "n_runs": 300)" +
           extra_params + R"(}, "sweep": )" + sweep + "}";
}

std::vector<std::vector<std::string>> parse_csv(const std::string& csv)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(csv);
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("midpoint config parses with defaults filled in")
{
    const auto c = parse_config(midpoint_doc);
    CHECK(c.mode == Mode::Midpoint);
    CHECK(c.midpoint.l_tot_km == 100.0);
    CHECK(c.midpoint.p_dc == 3e-4);
    CHECK(c.midpoint.q == 4e-3);
    CHECK(c.midpoint.visibility == 1.0);
    CHECK(c.workers == 1);
    const auto g = c.sweep.grid();
    REQUIRE(g.size() == 41);
    CHECK(g.front() == 0.0);
    CHECK(g[10] == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(g.back() == 40.0);
}

TEST_CASE("chain asymmetry outside [0, 1) is rejected")
{
    CHECK_THROWS_WITH_AS(parse_config(chain_config(R"(, "a_chain": 1.2)", R"({"variable": "t_coh_s", "values": [1]})")),
                         doctest::Contains("a_chain"), InvalidParameter);
    CHECK_THROWS_WITH_AS(parse_config(chain_config("", R"({"variable": "a_chain", "values": [0, 1.2]})")),
                         doctest::Contains("a_chain"), InvalidParameter);
    CHECK_NOTHROW(parse_config(chain_config("", R"({"variable": "a_chain", "values": [0, 0.3]})")));
}

TEST_CASE("emit then parse is the identity")
{
    const std::vector<std::string> docs{
        midpoint_doc,
        chain_config(R"(, "attenuation_db_per_km": 0.2, "include_swap_notification_delay": true)",
                     R"({"variable": "a_chain", "values": [0, 0.05, 0.1]})"),
        R"({"mode": "dispersion", "output": "x.csv", "workers": 3,
            "parameters": {"delta_l_km": 40, "dispersion_ps_per_nm_km": 17, "dispersion_slope_ps_per_nm2_km": 0.056},
            "sweep": {"variable": "photon_duration_ps", "start": 10, "stop": 10000, "points": 7, "scale": "log"}})",
        R"({"mode": "midpoint", "parameters": {"detector": "number_resolving", "delta_l_km": 3},
            "sweep": {"variable": "p_dc", "values": [0, 1e-5, 3e-4]}})",
    };
    for (const auto& d : docs) {
        const auto c = parse_config(d);
        const auto text = emit_config(c);
        const auto again = parse_config(text);
        CHECK(again == c);
        CHECK(emit_config(again) == text);
    }
}

TEST_CASE("strict schema names the offending key")
{
    auto rejects = [](const std::string& doc, const std::string& key) {
        CHECK_THROWS_WITH_AS(parse_config(doc), doctest::Contains(key.c_str()), InvalidParameter);
    };
    rejects(R"({"mode": "midpoint", "sweep": {"variable": "q", "values": [0]}, "extra": 1})", "extra");
    rejects(R"({"mode": "midpoint", "parameters": {"l_tot": 100}, "sweep": {"variable": "q", "values": [0]}})", "l_tot");
    rejects(R"({"mode": "midpoint", "parameters": {"p_dc": "3e-4"}, "sweep": {"variable": "q", "values": [0]}})", "p_dc");
    rejects(R"({"mode": "midpoint", "parameters": {"p_dc": 3}, "sweep": {"variable": "q", "values": [0]}})", "p_dc");
    rejects(R"({"mode": "midpoint", "sweep": {"variable": "n_runs", "values": [1]}})", "n_runs");
    rejects(R"({"mode": "midpoint", "sweep": {"variable": "q", "values": [0], "start": 0}})", "sweep");
    rejects(R"({"mode": "midpoint", "sweep": {"variable": "q", "start": 0, "stop": 1}})", "sweep");
    rejects(R"({"mode": "midpoint", "sweep": {"variable": "q", "start": 0, "stop": 1, "points": 3, "scale": "log"}})",
            "sweep.scale");
    rejects(R"({"mode": "midpoint", "parameters": {"q": 0.1}, "sweep": {"variable": "q", "values": [0]}})", "q");
    rejects(R"({"mode": "teleport", "sweep": {"variable": "q", "values": [0]}})", "teleport");
    rejects(R"({"mode": "midpoint", "parameters": {"l_att_km": 22, "attenuation_db_per_km": 0.2},
               "sweep": {"variable": "q", "values": [0]}})", "attenuation_db_per_km");
    rejects(R"({"mode": "dispersion", "parameters": {"beta2_ps2_per_km": -21, "dispersion_ps_per_nm_km": 17},
               "sweep": {"variable": "delta_l_km", "values": [0]}})", "dispersion_ps_per_nm_km");
    rejects(R"({"mode": "dispersion", "parameters": {"l_tot_km": 100}, "sweep": {"variable": "delta_l_km", "values": [0]}})",
            "l_tot_km");
    rejects("[1, 2]", "object");
    rejects("{", "JSON");
}

TEST_CASE("range checks catch unit slips")
{
    auto rejects = [](const std::string& params, const std::string& key) {
        const std::string doc = R"({"mode": "midpoint", "parameters": {)" + params +
                                R"(}, "sweep": {"variable": "q", "values": [0]}})";
        CHECK_THROWS_WITH_AS(parse_config(doc), doctest::Contains(key.c_str()), InvalidParameter);
    };
    rejects(R"("c_km_per_s": 2e8)", "c_km_per_s");   // m/s given for km/s
    rejects(R"("l_att_km": 22000)", "l_att_km");     // m given for km
    rejects(R"("l_att_km": 0)", "l_att_km");
    rejects(R"("l_tot_km": 100, "delta_l_km": 120)", "delta_l_km");
    rejects(R"("f_em_left": 0.1)", "f_em_left");
}

TEST_CASE("alternate unit keys convert to the canonical ones")
{
    const auto m = parse_config(R"({"mode": "midpoint", "parameters": {"attenuation_db_per_km": 0.2},
                                    "sweep": {"variable": "q", "values": [0]}})");
    CHECK(m.midpoint.l_att_km == doctest::Approx(10.0 / (std::log(10.0) * 0.2)).epsilon(1e-15));
    CHECK(m.midpoint.l_att_km == doctest::Approx(21.71).epsilon(1e-3));

    const auto d = parse_config(R"({"mode": "dispersion",
        "parameters": {"dispersion_ps_per_nm_km": 17, "dispersion_slope_ps_per_nm2_km": 0.056},
        "sweep": {"variable": "delta_l_km", "values": [40]}})");
    CHECK(d.dispersion.beta2_ps2_per_km == doctest::Approx(-21.7).epsilon(2e-3));
    CHECK(d.dispersion.beta3_ps3_per_km == doctest::Approx(0.127).epsilon(5e-3));
}

TEST_CASE("shortest round-trip formatting")
{
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(-0.0) == "0");
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1e-300) == "1e-300");
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 2000; ++i) {
        const double x = u(gen) * std::pow(10.0, i % 40 - 20);
        CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
    }
}

TEST_CASE("midpoint sweep rows match direct evaluation")
{
    auto c = parse_config(midpoint_doc);
    const auto rows = parse_csv(run_sweep(c));
    REQUIRE(rows.size() == 42);
    CHECK(rows[0][0] == "delta_l_km");
    REQUIRE(rows[0].size() == 12);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i].size() == 12);
        auto cfg = link::MidpointLinkConfig::from_geometry(100.0, std::stod(rows[i][0]));
        cfg.p_dc = 3e-4;
        cfg.q = 4e-3;
        cfg.l_att_km = 22.0;
        CHECK(std::stod(rows[i][4]) == link::single_click_exact(cfg).p_succ);
        CHECK(std::stod(rows[i][9]) == link::double_click_exact(cfg).fidelity);
    }
    c.workers = 5;
    CHECK(run_sweep(c) == run_sweep(parse_config(midpoint_doc)));
}

TEST_CASE("undefined link quantities become empty cells")
{
    // q larger than the far-side transmissivity has no single-click meaning
    const auto c = parse_config(R"({"mode": "midpoint", "parameters": {"l_tot_km": 200, "q": 0.1},
                                    "sweep": {"variable": "delta_l_km", "values": [0]}})");
    const auto rows = parse_csv(run_sweep(c));
    REQUIRE(rows.size() == 2);
    REQUIRE(rows[1].size() == 12);
    CHECK(rows[1][4].empty());
    CHECK(rows[1][5].empty());
    CHECK_FALSE(rows[1][8].empty());
}

TEST_CASE("chain sweep is deterministic and independent of workers")
{
    auto c = parse_config(chain_config(R"(, "master_seed": 5)", R"({"variable": "a_chain", "values": [0, 0.2]})"));
    const auto a = run_sweep(c);
    c.workers = 4;
    CHECK(run_sweep(c) == a);
    const auto rows = parse_csv(a);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == std::vector<std::string>{"a_chain", "mean_duration_s", "se_duration_s", "qber", "se_qber",
                                              "skr_per_s", "se_skr_per_s", "variant"});
    CHECK(rows[1].back() == "asymmetric");
    CHECK(rows[2].back() == "extended_fiber");
    // at zero asymmetry extending the fibers changes nothing
    CHECK(std::vector(rows[1].begin(), rows[1].end() - 1) == std::vector(rows[2].begin(), rows[2].end() - 1));
    c.chain.master_seed = 6;
    CHECK(run_sweep(c) != a);
}

TEST_CASE("chain sweep over another variable keeps both columns")
{
    const auto c = parse_config(
        chain_config(R"(, "a_chain": 0.1, "extended_fiber": false)", R"({"variable": "t_coh_s", "values": [0.5, 2]})"));
    const auto rows = parse_csv(run_sweep(c));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0][0] == "t_coh_s");
    CHECK(rows[0][1] == "a_chain");
    CHECK(rows[1][1] == "0.1");
    CHECK(std::stod(rows[1][4]) > std::stod(rows[2][4]));  // shorter memory, more errors
}
