#include <sstream>
#include <string>

#include "doctest.h"
#include "rbslip/oracles.hpp"

using namespace rbslip;

TEST_CASE("the full cross-verification suite passes") {
    std::vector<OracleCheck> checks = oracle_suite();
    CHECK(checks.size() > 50);

    for (const OracleCheck& c : checks) {
        CAPTURE(c.group);
        CAPTURE(c.name);
        CAPTURE(c.measured);
        CAPTURE(c.bound);
        CHECK(c.pass);
    }
    CHECK(all_pass(checks));

    // every acceptance-facing group is represented
    for (const char* g : {"stokes", "multiplier", "decomposition", "energy", "onset",
                          "kernels"}) {
        bool found = false;
        for (const OracleCheck& c : checks) found = found || c.group == g;
        CAPTURE(g);
        CHECK(found);
    }

    std::ostringstream text, csv;
    print_report(text, checks);
    print_report_csv(csv, checks);
    CHECK(text.str().find("FAIL") == std::string::npos);
    CHECK(text.str().find("checks passed") != std::string::npos);

    size_t lines = 0;
    for (char ch : csv.str())
        if (ch == '\n') ++lines;
    CHECK(lines == checks.size() + 1);
    CHECK(csv.str().rfind("group,name,measured,bound,comparison,pass,note\n", 0) == 0);
}

TEST_CASE("a failed row is visible in both report formats") {
    std::vector<OracleCheck> checks = {{"demo", "too big", 2.0, 1.0, false, false, ""},
                                       {"demo", "fine", 0.5, 1.0, false, true, "ok"}};
    CHECK(!all_pass(checks));

    std::ostringstream text, csv;
    print_report(text, checks);
    print_report_csv(csv, checks);
    CHECK(text.str().find("FAIL") != std::string::npos);
    CHECK(text.str().find("1/2 checks passed") != std::string::npos);
    CHECK(csv.str().find("demo,too big,2,1,le,0,") != std::string::npos);
    CHECK(csv.str().find("demo,fine,0.5,1,le,1,ok") != std::string::npos);
}
