#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
    int status;
    std::string out;
};

Run run(const std::string& args) {
    std::string cmd = std::string(MLP_CLI_PATH) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    std::string out;
    std::array<char, 4096> buf;
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
    int st = pclose(p);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string data(const std::string& f) { return std::string(MLP_DATA_DIR) + "/" + f; }

std::string tmp(const std::string& f) {
    auto dir = std::filesystem::temp_directory_path() / "mlp_cli_test";
    std::filesystem::create_directories(dir);
    return (dir / f).string();
}

bool has(const std::string& s, const std::string& what) { return s.find(what) != std::string::npos; }

}  // namespace

TEST_CASE("compile then solve") {
    Run c = run("compile sat2blp " + data("or2.cnf") + " -o " + tmp("g.mlp"));
    REQUIRE(c.status == 0);
    CHECK(std::filesystem::exists(tmp("g.varmap.json")));
    Run s = run("solve " + tmp("g.mlp"));
    CHECK(s.status == 0);
    CHECK(has(s.out, "VALUE 0/1"));
}

TEST_CASE("inspect the uncompacted LEXSAT gadget") {
    REQUIRE(run("compile lexsat2blp " + data("or2.cnf") + " -o " + tmp("l.mlp")).status == 0);
    Run i = run("inspect " + tmp("l.mlp"));
    CHECK(i.status == 0);
    CHECK(has(i.out, "C1=yes C2=yes C3=no"));
    REQUIRE(run("compile lexsat2blp --compact " + data("or2.cnf") + " -o " + tmp("lc.mlp")).status == 0);
    CHECK(has(run("inspect " + tmp("lc.mlp")).out, "C1=yes C2=yes C3=yes"));
}

TEST_CASE("value and decisions") {
    REQUIRE(run("compile lexsat2blp " + data("or2.cnf") + " -o " + tmp("v.mlp")).status == 0);
    Run v = run("value " + tmp("v.mlp") + " --phi 12 --queries");
    CHECK(has(v.out, "VALUE -3/4"));
    CHECK(has(v.out, "QUERIES "));
    CHECK(has(run("value " + tmp("v.mlp") + " --le -3/4").out, "YES"));
    Run no = run("value " + tmp("v.mlp") + " --le -7/8");
    CHECK(no.status == 0);
    CHECK(has(no.out, "NO"));
    Run g = run("value --gadget lexsat2blp " + data("or2.cnf") + " --oracle gadget --phi 12");
    CHECK(has(g.out, "VALUE -3/4"));
    CHECK(has(run("value --gadget satunsat " + data("or2.cnf") + " " + data("or2.cnf") + " --oracle gadget --phi 8").out,
              "UNBOUNDED"));
}

TEST_CASE("certificate through the CLI") {
    REQUIRE(run("compile attain3 " + data("m11.qdimacs") + " -o " + tmp("a.mlp")).status == 0);
    Run s = run("solve " + tmp("a.mlp") + " --param x1");
    CHECK(has(s.out, "VALUE -3/4"));
    CHECK(has(s.out, "ATTAINMENT not-attained"));
}

TEST_CASE("transforms through the CLI") {
    REQUIRE(run("compile sat2blp " + data("or2.cnf") + " -o " + tmp("t.mlp")).status == 0);
    REQUIRE(run("transform scale " + tmp("t.mlp") + " --lambda 3 -o " + tmp("ts.mlp")).status == 0);
    CHECK(has(run("solve " + tmp("ts.mlp")).out, "VALUE 0/1"));
    REQUIRE(run("transform forward " + tmp("t.mlp") + " -o " + tmp("tf.mlp")).status == 0);
    CHECK(has(run("solve " + tmp("tf.mlp")).out, "VALUE 0/1"));
    CHECK(run("transform binarize " + tmp("t.mlp") + " --vars s[0] -o " + tmp("tb.mlp")).status == 0);
    CHECK(run("transform tcompanion " + tmp("t.mlp") + " -o " + tmp("tc.mlp")).status == 0);
    CHECK(run("transform compact " + tmp("t.mlp") + " --weights 0:2 -o " + tmp("tk.mlp")).status == 0);
}

TEST_CASE("verify is deterministic") {
    Run a = run("verify lexsat --n 6 --trials 50 --seed 7");
    CHECK(a.status == 0);
    CHECK(has(a.out, "PASS 50/50"));
    CHECK(has(a.out, "seed=7"));
    Run b = run("verify lexsat --n 6 --trials 50 --seed 7");
    CHECK(a.out == b.out);
}

TEST_CASE("errors and exit codes") {
    CHECK(run("compile sat2blp " + data("bad.cnf")).status == 2);
    CHECK(run("frobnicate").status == 2);
    CHECK(run("solve --no-such-flag x").status == 2);
    CHECK(run("solve " + data("missing.mlp")).status == 2);
    REQUIRE(run("compile qbf2klp " + data("true2.qdimacs") + " -o " + tmp("q.mlp")).status == 0);
    CHECK(run("solve " + tmp("q.mlp") + " --cap-vars 0").status == 3);
}
