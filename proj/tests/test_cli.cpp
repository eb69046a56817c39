#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#ifndef EXITMAP_CLI_PATH
#error "EXITMAP_CLI_PATH must point at the built binary"
#endif

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(EXITMAP_CLI_PATH) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    RunResult r;
    char buf[512];
    while (fgets(buf, sizeof buf, p)) r.out += buf;
    int st = pclose(p);
    r.code = WEXITSTATUS(st);
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("exit code 0 and tables on a successful run") {
    RunResult r = run("exitmap --builtin exmap --samples 16 --out /tmp/exitmap_cli_a");
    CHECK(r.code == 0);
    std::string csv = slurp("/tmp/exitmap_cli_a/exmap_exitmap.csv");
    CHECK(csv.rfind("s,status,T,exit_s,type_label,horizon,graze_count", 0) == 0);
}

TEST_CASE("identical scenario gives byte-identical CSV") {
    run("exitmap --builtin 'affine(1)' --out /tmp/exitmap_cli_b1");
    run("exitmap --builtin 'affine(1)' --out /tmp/exitmap_cli_b2");
    CHECK(slurp("/tmp/exitmap_cli_b1/affine_1_exitmap.csv") ==
          slurp("/tmp/exitmap_cli_b2/affine_1_exitmap.csv"));
}

TEST_CASE("schema errors exit with code 2 and a JSON error") {
    RunResult r = run("exitmap --builtin no_such_scenario --out /tmp/exitmap_cli_c");
    CHECK(r.code == 2);
    CHECK(r.out.find("\"error\"") != std::string::npos);
    CHECK(r.out.find("\"schema\"") != std::string::npos);

    RunResult both = run("exitmap --out /tmp/exitmap_cli_c");
    CHECK(both.code == 2);
}

TEST_CASE("computation errors exit with code 1") {
    std::ofstream f("/tmp/exitmap_cli_bad.json");
    f << R"({"name": "bad", "kind": "realize",
             "map": {"type": "tabulated", "xs": [-2, -1, 1], "values": [2, 1, 2]}})";
    f.close();
    RunResult r = run("realize --scenario /tmp/exitmap_cli_bad.json --out /tmp/exitmap_cli_d");
    CHECK(r.code == 1);
    CHECK(r.out.find("hypotheses fail") != std::string::npos);
}

TEST_CASE("hybrid command reports the Zeno verdict") {
    RunResult r = run("hybrid --builtin 'bouncing_ball(0.5)' --out /tmp/exitmap_cli_e --svg");
    CHECK(r.code == 0);
    CHECK(r.out.find("zeno: zeno") != std::string::npos);
    CHECK(r.out.find("accumulation") != std::string::npos);
    std::string jumps = slurp("/tmp/exitmap_cli_e/bouncing_ball_0_5_jumps.csv");
    CHECK(jumps.find("\n") != std::string::npos);
}

TEST_CASE("induced-system command surfaces the failure report") {
    RunResult r = run("hybrid --builtin zeno_shear --out /tmp/exitmap_cli_f");
    CHECK(r.code == 0);
    CHECK(r.out.find("does not induce") != std::string::npos);
    CHECK(r.out.find("unresolved switching") != std::string::npos);
}
