#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace {

struct Outcome {
    int code = -1;
    std::string out, err;
};

Outcome cli(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    Outcome o;
    o.code = risgame::cli::run(args, out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> v;
    std::istringstream is(text);
    for (std::string l; std::getline(is, l);) v.push_back(l);
    return v;
}

// Small scene so that the solves stay fast.
std::string small_config()
{
    const std::string path = "cli_test_scene.json";
    std::ofstream(path) << R"({"scene": {"N": 2}})";
    return path;
}

}  // namespace

TEST_CASE("run writes one row per trial plus means")
{
    const std::string cfg = small_config();
    const Outcome o =
        cli({"run", "--config", cfg, "--sweep", "cj", "--values", "1,2,3", "--trials", "2", "--schemes", "robust",
             "--quiet"});
    REQUIRE(o.code == 0);
    const auto ls = lines(o.out);
    REQUIRE(ls.size() == 1 + 6 + 3);
    CHECK(ls[0] == "sweep,value,scheme,trial,u_L,u_J,u_L_worst,P_S,P_J,gamma_sinr,iters,ms");
    int data = 0;
    for (const auto& l : ls) data += l.rfind("cj,", 0) == 0 && l.find(",mean,") == std::string::npos;
    CHECK(data == 6);

    const std::string csv = "cli_test_out.csv";
    const Outcome f = cli({"run", "--config", cfg, "--sweep", "n", "--values", "0", "--trials", "1", "--schemes",
                           "noris", "--out", csv, "--quiet"});
    CHECK(f.code == 0);
    CHECK(f.out.empty());
    std::ifstream in(csv);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(lines(buf.str()).size() == 3);
    std::remove(csv.c_str());
    std::remove(cfg.c_str());
}

TEST_CASE("bad arguments exit with 2")
{
    CHECK(cli({}).code == 2);
    CHECK(cli({"bogus"}).code == 2);
    const Outcome unknown = cli({"run", "--frobnicate"});
    CHECK(unknown.code == 2);
    CHECK_FALSE((unknown.out + unknown.err).empty());
    CHECK(cli({"run", "--sweep", "zz"}).code == 2);
    CHECK(cli({"run", "--values", "1,x"}).code == 2);
    CHECK(cli({"run", "--schemes", "robust,magic"}).code == 2);
    CHECK(cli({"run", "--sweep", "cj", "--values", "-1"}).code == 2);
    CHECK(cli({"run", "--trials", "0"}).code == 2);
    CHECK(cli({"run", "--config", "/nonexistent/scene.json"}).code == 2);
    CHECK(cli({"verify", "--criteria", "12"}).code == 2);
    CHECK(cli({"demo", "--scheme", "magic"}).code == 2);
}

TEST_CASE("help exits with 0")
{
    const Outcome o = cli({"--help"});
    CHECK(o.code == 0);
    CHECK(o.out.find("verify") != std::string::npos);
}

TEST_CASE("verify prints a table and exits 0 on passing checks")
{
    const Outcome o = cli({"verify", "--criteria", "1,9"});
    CHECK(o.code == 0);
    CHECK(o.out.find("PASS [1]") != std::string::npos);
    CHECK(o.out.find("PASS [9]") != std::string::npos);
    CHECK(o.out.find("all checks passed") != std::string::npos);
}

TEST_CASE("demo prints a non-decreasing utility trace")
{
    const std::string cfg = small_config();
    const Outcome o = cli({"demo", "--config", cfg});
    std::remove(cfg.c_str());
    REQUIRE(o.code == 0);
    std::vector<double> trace;
    bool in_trace = false;
    for (const auto& l : lines(o.out)) {
        if (l.rfind("outer", 0) == 0) {
            in_trace = true;
            continue;
        }
        if (!in_trace) continue;
        std::istringstream is(l);
        int k = 0;
        double u = 0.0;
        if (!(is >> k >> u)) break;
        trace.push_back(u);
    }
    REQUIRE(trace.size() >= 2);
    for (std::size_t k = 1; k < trace.size(); ++k) CHECK(trace[k] >= trace[k - 1] - 1e-6);
    CHECK(o.out.find("u_L = ") != std::string::npos);
}
