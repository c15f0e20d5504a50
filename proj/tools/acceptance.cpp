// Prints one PASS/FAIL line per acceptance criterion 1-9.
#include <chrono>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "risgame/suite.hpp"

int main(int argc, char** argv)
{
    using namespace risgame;
    CLI::App app{"Acceptance checks"};
    std::vector<int> criteria;
    bool quiet = false;
    app.add_option("--criteria", criteria, "Criterion numbers to run (default all)")->check(CLI::Range(1, 9));
    app.add_flag("--quiet", quiet, "No progress output");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    SuiteProfile p = SuiteProfile::acceptance();
    if (!criteria.empty()) p.criteria = criteria;
    const auto t0 = std::chrono::steady_clock::now();
    const auto results = run_suite(p, quiet ? nullptr : &std::cerr);
    bool ok = true;
    for (const CheckResult& r : results) {
        print_result(std::cout, r);
        ok = ok && r.pass;
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s: %zu criteria in %.0f s\n", ok ? "ACCEPTED" : "NOT ACCEPTED", results.size(), s);
    return ok ? 0 : 1;
}
