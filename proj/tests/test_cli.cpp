#include <catch2/catch.hpp>

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "wishart/cli.hpp"

using wishart::cli::run_command;
using Json = nlohmann::ordered_json;

namespace {

Json report_of(const wishart::cli::CommandResult& r) { return Json::parse(r.out); }

double value_re(const Json& result) { return result["value"]["re"].get<double>(); }
double value_im(const Json& result) { return result["value"]["im"].get<double>(); }

}  // namespace

TEST_CASE("eval subcommand") {
    SECTION("zero matrix evaluates to one") {
        const auto r = run_command({"eval", "--diag", "0,0,0", "--alpha", "0.5"});
        REQUIRE(r.exit_code == 0);
        const Json rep = report_of(r);
        REQUIRE(rep["command"] == "eval");
        REQUIRE(value_re(rep["results"][0]) == 1.0);
        REQUIRE(value_im(rep["results"][0]) == 0.0);
    }
    SECTION("golden point, spectral vs naive") {
        const auto spectral = run_command({"eval", "--scaled-identity", "3", "sqrt3/2",
                                           "--alpha", "0.5", "--method", "spectral"});
        REQUIRE(spectral.exit_code == 0);
        const Json rs = report_of(spectral);
        REQUIRE(value_im(rs["results"][0]) == Approx(0.35355339059327373).margin(1e-12));

        const auto naive = run_command({"eval", "--scaled-identity", "3", "0.8660254037844386",
                                        "--alpha", "0.5", "--method", "naive"});
        REQUIRE(naive.exit_code == 0);
        const Json rn = report_of(naive);
        REQUIRE(value_im(rn["results"][0]) == Approx(-0.35355339059327373).margin(1e-12));
    }
    SECTION("invalid shape parameter exits 2 and cites the Gindikin set") {
        const auto r = run_command({"eval", "--diag", "0,0,0", "--alpha", "0.6"});
        REQUIRE(r.exit_code == 2);
        REQUIRE(r.err.find("Gindikin") != std::string::npos);
    }
    SECTION("parse failures exit 3") {
        REQUIRE(run_command({"eval", "--diag", "0,zebra", "--alpha", "1"}).exit_code == 3);
        REQUIRE(run_command({"eval", "--alpha", "1"}).exit_code == 3);  // no matrix
        REQUIRE(run_command({"eval", "--entries", "1,2,3,4", "--alpha", "1"}).exit_code == 3);
        REQUIRE(run_command({"eval", "--diag", "0,0", "--alpha", "1", "--bogus"}).exit_code == 3);
        REQUIRE(run_command({"nosuchcommand"}).exit_code == 3);
    }
}

TEST_CASE("compare subcommand flags the branch defect") {
    SECTION("golden point is flagged") {
        const auto r = run_command({"compare", "--scaled-identity", "3", "sqrt3/2",
                                    "--alpha", "0.5"});
        REQUIRE(r.exit_code == 0);
        const Json rep = report_of(r);
        REQUIRE(rep["branch_defect"].get<bool>());
        REQUIRE(rep["differences"]["naive_quadrature"].get<double>() ==
                Approx(0.7071067811865476).margin(1e-10));
        REQUIRE(rep["winding"].get<int>() == -1);
    }
    SECTION("the mirrored point agrees everywhere") {
        const auto r = run_command({"compare", "--scaled-identity", "3", "-sqrt3/2",
                                    "--alpha", "0.5"});
        const Json rep = report_of(r);
        REQUIRE_FALSE(rep["branch_defect"].get<bool>());
        REQUIRE(rep["differences"]["naive_quadrature"].get<double>() < 1e-10);
    }
    SECTION("m=2 random direction never defects") {
        const auto r = run_command({"compare", "--random", "2", "99", "1.5", "--alpha", "1.0"});
        const Json rep = report_of(r);
        REQUIRE_FALSE(rep["branch_defect"].get<bool>());
        REQUIRE(rep["winding"].get<int>() == 0);
    }
}

TEST_CASE("scan subcommand") {
    SECTION("CSV table with exact first row") {
        const auto r = run_command({"scan", "--scaled-identity", "3", "0.5", "--alpha", "0.5",
                                    "--s-max", "2", "--points", "201", "--csv"});
        REQUIRE(r.exit_code == 0);
        REQUIRE(r.out.rfind("s,naive_re,naive_im,correct_re,correct_im,abs_diff,winding\n", 0) ==
                0);
        const std::string second_line = r.out.substr(r.out.find('\n') + 1);
        REQUIRE(second_line.rfind("0,1,0,1,0,0,0\n", 0) == 0);
    }
    SECTION("winding transition sits at s = sqrt(3) for the I/2 direction") {
        // spectral arguments: sum_j arg(1 - 2 i s/2) = -3 arctan(s) crosses
        // -pi at s = tan(pi/3) = sqrt(3)
        const auto r = run_command({"scan", "--scaled-identity", "3", "0.5", "--alpha", "0.5",
                                    "--s-max", "2", "--points", "201"});
        REQUIRE(r.exit_code == 0);
        const Json rep = report_of(r);
        double transition = -1.0;
        int prev_w = 0;
        for (const Json& row : rep["results"]) {
            const int w = row["winding"].get<int>();
            if (w != prev_w) {
                transition = row["s"].get<double>();
                break;
            }
            prev_w = w;
        }
        REQUIRE(transition > 0.0);
        REQUIRE(std::abs(transition - std::sqrt(3.0)) <= 0.011);  // one grid cell
    }
    SECTION("m=2 scans never wind") {
        const auto r = run_command({"scan", "--random", "2", "7", "1.0", "--alpha", "1.0",
                                    "--s-max", "3", "--points", "61"});
        const Json rep = report_of(r);
        for (const Json& row : rep["results"]) REQUIRE(row["winding"].get<int>() == 0);
    }
}

TEST_CASE("counterexample subcommand self-tests") {
    const auto r = run_command({"counterexample"});
    REQUIRE(r.exit_code == 0);
    const Json rep = report_of(r);
    REQUIRE(rep["status"] == "PASS");
    bool saw_det = false;
    for (const Json& row : rep["results"]) {
        REQUIRE(row["pass"].get<bool>());
        if (row["name"] == "det_plus") {
            saw_det = true;
            REQUIRE(row["value"]["re"].get<double>() == Approx(-8.0).margin(1e-12));
        }
    }
    REQUIRE(saw_det);
}

TEST_CASE("mc-verify subcommand") {
    const auto r = run_command({"mc-verify", "--scaled-identity", "3", "sqrt3/2", "--alpha",
                                "0.5", "--n", "20000", "--seed", "777"});
    REQUIRE(r.exit_code == 0);
    const Json rep = report_of(r);
    REQUIRE(rep["status"] == "PASS");
    REQUIRE(rep["z_scores"]["re"].get<double>() <= 4.0);
    REQUIRE(rep["z_scores"]["im"].get<double>() <= 4.0);
}

TEST_CASE("sde-verify subcommand") {
    const auto r = run_command({"sde-verify", "--diag", "1", "--alpha", "0.5", "--steps", "200",
                                "--paths", "3000", "--seed", "42"});
    REQUIRE(r.exit_code == 0);
    const Json rep = report_of(r);
    REQUIRE(rep["status"] == "PASS");
    REQUIRE(rep["target"].get<double>() == Approx(1.0 / std::sqrt(3.0)).margin(1e-12));
}

TEST_CASE("reports are deterministic and round-trip") {
    SECTION("seeded commands are byte-identical across runs") {
        const std::vector<std::string> cmd = {"mc-verify", "--random", "3", "5", "1.0",
                                              "--alpha", "1.5", "--n", "5000", "--seed", "99"};
        const auto a = run_command(cmd);
        const auto b = run_command(cmd);
        REQUIRE(a.exit_code == b.exit_code);
        REQUIRE(a.out == b.out);
    }
    SECTION("JSON serialization round-trips losslessly") {
        const auto r = run_command({"eval", "--random", "4", "11", "0.8", "--alpha", "2.0"});
        const Json rep = Json::parse(r.out);
        REQUIRE(rep.dump(2) + "\n" == r.out);
    }
    SECTION("every report carries the fixed field set") {
        const std::vector<std::vector<std::string>> cmds = {
            {"eval", "--diag", "0.5,0.25", "--alpha", "1.0"},
            {"compare", "--diag", "0.5,0.25", "--alpha", "1.0"},
            {"scan", "--diag", "0.5,0.25", "--alpha", "1.0", "--points", "5"},
            {"counterexample"},
            {"mc-verify", "--diag", "0.5,0.25", "--alpha", "1.0", "--n", "1000", "--seed", "1"},
            {"sde-verify", "--diag", "0.5,0.25", "--alpha", "1.0", "--steps", "100", "--paths",
             "200", "--seed", "1"},
        };
        for (const auto& cmd : cmds) {
            const auto r = run_command(cmd);
            REQUIRE(r.exit_code == 0);
            const Json rep = report_of(r);
            for (const char* field :
                 {"command", "argv", "version", "parameters", "results", "seeds",
                  "wall_time_ms"})
                REQUIRE(rep.contains(field));
            REQUIRE(rep["wall_time_ms"].is_null());
            REQUIRE(rep["results"].is_array());
            REQUIRE_FALSE(rep["results"].empty());
        }
    }
    SECTION("timing flag adds the only volatile field") {
        const auto r = run_command({"eval", "--diag", "0,0", "--alpha", "1", "--timing"});
        REQUIRE(r.exit_code == 0);
        const Json rep = report_of(r);
        REQUIRE(rep["wall_time_ms"].is_number());
    }
}

TEST_CASE("help and version exit cleanly") {
    REQUIRE(run_command({"--help"}).exit_code == 0);
    const auto v = run_command({"--version"});
    REQUIRE(v.exit_code == 0);
    REQUIRE(v.out.find("0.1.0") != std::string::npos);
}

TEST_CASE("WISHART_DEFAULT_TOL overrides the tolerance default") {
    ::setenv("WISHART_DEFAULT_TOL", "1e-9", 1);
    const auto r = run_command({"eval", "--diag", "0.5,0.25", "--alpha", "1.0"});
    ::unsetenv("WISHART_DEFAULT_TOL");
    REQUIRE(r.exit_code == 0);
    const Json rep = report_of(r);
    REQUIRE(rep["parameters"]["tol"].get<double>() == 1e-9);

    // explicit flag wins over the environment
    ::setenv("WISHART_DEFAULT_TOL", "1e-9", 1);
    const auto rf = run_command({"eval", "--diag", "0.5,0.25", "--alpha", "1.0", "--tol", "1e-12"});
    ::unsetenv("WISHART_DEFAULT_TOL");
    REQUIRE(report_of(rf)["parameters"]["tol"].get<double>() == 1e-12);
}
