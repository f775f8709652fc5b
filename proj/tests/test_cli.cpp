#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "karlin");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Result r;
    r.code = karlin::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::string kQuarter = R"({"alpha":1,"beta":0.5,"terms":[{"set":{"carrier":[0,1],"intervals":[[0,0.25]]},"z":1}]})";

}  // namespace

TEST_CASE("oracle subcommand") {
    auto r = run({"oracle", "--query", kQuarter});
    CHECK(r.code == 0);
    CHECK(r.out == "0.606530659713\n");

    const auto path = std::filesystem::temp_directory_path() / "karlin_cli_query.json";
    std::ofstream(path) << kQuarter;
    r = run({"oracle", "--query", path.string()});
    CHECK(r.out == "0.606530659713\n");

    r = run({"oracle", "--query", R"({"functional":"tau_z","t":2,"z":1,"alpha":1,"beta":0.5})"});
    CHECK(r.out == "0.585786437627\n");
    r = run({"oracle", "--query", R"({"functional":"mstar_theta","a":0.25,"b":1,"beta":0.5})"});
    CHECK(r.out == "0.5\n");
    r = run({"oracle", "--query",
             R"({"functional":"pattern_limit","beta":0.5,"delta":[1],"family":[{"intervals":[[0,0.5]]}]})"});
    CHECK(r.out == "1.25331413732\n");
    r = run({"oracle", "--query", R"({"functional":"extremal_cdf","times":[1,2],"levels":[1,1],"alpha":1,"beta":0.5})"});
    CHECK(r.out == "0.243116734434\n");

    r = run({"oracle", "--query", R"({"alpha":1,"terms":[]})"});
    CHECK(r.code == 2);
    CHECK(r.err.find("'beta'") != std::string::npos);
    r = run({"oracle", "--query", R"({"alpha":1,"beta":0.5,"terms":[{"set":{"intervals":[[0,0.25]]},"z":"one"}]})"});
    CHECK(r.code == 2);
    CHECK(r.err.find("terms[].z") != std::string::npos);
    r = run({"oracle", "--query", "{not json"});
    CHECK(r.code == 2);
    r = run({"oracle", "--query", "/nonexistent/q.json"});
    CHECK(r.code == 2);
}

TEST_CASE("usage errors exit 2") {
    CHECK(run({}).code == 2);
    CHECK(run({"bogus"}).code == 2);
    CHECK(run({"simulate", "--n", "100", "--seed", "1"}).code == 2);
    CHECK(run({"verify", "--suite", "occupancy", "--seed", "1"}).code == 2);
    CHECK(run({"verify", "--suite", "nope", "--beta", "0.5", "--seed", "1"}).code == 2);
    CHECK(run({"simulate", "--n", "100", "--beta", "1.5", "--seed", "1"}).code == 2);
    CHECK(run({"simulate", "--n", "100", "--beta", "0.5", "--seed", "-3"}).code == 2);
    CHECK(run({"simulate", "--n", "100", "--beta", "0.5", "--format", "xml"}).code == 2);
    CHECK(run({"verify", "--suite", "occupancy", "--beta", "0.5", "--replicas", "10", "--seed", "1"}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("simulate and limit-sample output") {
    auto r = run({"simulate", "--n", "1000,2000", "--beta", "0.5", "--seed", "7", "--replicas", "2", "--top", "2"});
    CHECK(r.code == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "replica,n,k_n,b_n,rank,value,value_normalized,label,locations");
    int rows = 0;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 8);
    CHECK(run({"simulate", "--n", "1000,2000", "--beta", "0.5", "--seed", "7", "--replicas", "2", "--top", "2",
               "--threads", "2"})
              .out == r.out);
    r = run({"simulate", "--n", "500", "--beta", "0.5", "--seed", "7", "--format", "json"});
    CHECK(r.code == 0);
    CHECK(r.out.find("\"histogram\"") != std::string::npos);

    r = run({"simulate", "--n", "500", "--beta", "0.5"});
    CHECK(r.code == 0);
    CHECK(r.err.rfind("seed: ", 0) == 0);

    const std::string fam = R"([{"intervals":[[0,0.5]]},{"intervals":[[0.25,1]]}])";
    for (const char* variant : {"karlin", "mstar", "coupled"}) {
        r = run({"limit-sample", "--beta", "0.5", "--query", fam, "--replicas", "50", "--seed", "3", "--variant", variant});
        CAPTURE(variant);
        CHECK(r.code == 0);
        CHECK(r.out.rfind("replica,set_id,", 0) == 0);
    }
    r = run({"limit-sample", "--beta", "0.5", "--query", R"({"sets":[{"carrier":[0,4],"intervals":[[0,4]]}]})",
             "--replicas", "5", "--seed", "3", "--format", "json"});
    CHECK(r.code == 0);
    CHECK(r.out.find("\"samples\"") != std::string::npos);
    CHECK(run({"limit-sample", "--beta", "0.5", "--query", fam, "--variant", "other", "--seed", "1"}).code == 2);
}

TEST_CASE("verify subcommand") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto a = dir / "karlin_verify_a.csv", b = dir / "karlin_verify_b.csv";
    const std::vector<std::string> base{"verify", "--suite", "occupancy", "--beta", "0.5", "--n", "100000",
                                        "--replicas", "100", "--seed", "42"};
    auto args = base;
    args.insert(args.end(), {"--out", a.string(), "--threads", "1"});
    auto r = run(args);
    CHECK(r.code == 0);
    args = base;
    args.insert(args.end(), {"--out", b.string(), "--threads", "3"});
    CHECK(run(args).code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a).rfind("suite,check,estimate,target,se_or_crit,pass,n,replicas,seed\n", 0) == 0);

    setenv("KARLIN_THREADS", "2", 1);
    CHECK(run(base).out == slurp(a));
    setenv("KARLIN_THREADS", "many", 1);
    CHECK(run(base).code == 2);
    unsetenv("KARLIN_THREADS");

    auto json_args = base;
    json_args.insert(json_args.end(), {"--format", "json"});
    r = run(json_args);
    CHECK(r.code == 0);
    CHECK(r.out.find("\"rows\"") != std::string::npos);

    // an impossible calibration threshold fails the suite
    r = run({"verify", "--suite", "marginal", "--beta", "0.5", "--n", "100,200", "--replicas", "100", "--seed", "1",
             "--ks-threshold", "0", "--repetitions", "1"});
    CHECK(r.code == 1);
}
