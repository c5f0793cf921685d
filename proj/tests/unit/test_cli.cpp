#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "test_support.hpp"

using metro::test::fixture;
namespace cli = metro::cli;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "metro");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string fx(const char* name) { return fixture(name).string(); }

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

bool single_line(const std::string& s) { return !s.empty() && s.find('\n') == s.size() - 1; }

}  // namespace

TEST_CASE("usage errors") {
    auto r = run({});
    CHECK(r.code == cli::kUsage);
    CHECK(r.err.rfind("usage-error: ", 0) == 0);
    CHECK(single_line(r.err));

    CHECK(run({"launch"}).code == cli::kUsage);
    CHECK(run({"analyze", fx("uniform4.json"), "--bogus"}).code == cli::kUsage);
    CHECK(run({"analyze", fx("uniform4.json"), "--trains", "two"}).code == cli::kUsage);
    CHECK(run({"sweep", fx("line18.json"), "--m-range", "5:2"}).code == cli::kUsage);
    CHECK(run({"sweep", fx("line18.json"), "--m-range", "5"}).code == cli::kUsage);
    CHECK(run({"sweep", fx("line18.json"), "--demand-scales", "1,x"}).code == cli::kUsage);
    CHECK(run({"simulate", fx("uniform4.json"), "--perturb", "1:2"}).code == cli::kUsage);
    CHECK(run({"simulate", fx("uniform4.json"), "--perturb", "9:2:1"}).code == cli::kUsage);
    CHECK(run({"simulate", fx("uniform4.json"), "--law", "warp"}).code == cli::kUsage);
    CHECK(run({"simulate", fx("uniform4.json"), "--law", "baseline-theta"}).code == cli::kUsage);
    CHECK(run({"simulate", fx("uniform4.json"), "--events", "100", "--window", "80"}).code == cli::kUsage);
    CHECK(run({"verify", "--trials", "0"}).code == cli::kUsage);

    r = run({"--help"});
    CHECK(r.code == cli::kOk);
    CHECK(r.out.find("analyze") != std::string::npos);
}

TEST_CASE("config from the environment") {
    ::unsetenv(cli::kConfigEnvVar);
    auto r = run({"analyze"});
    CHECK(r.code == cli::kUsage);
    CHECK(r.err.find(cli::kConfigEnvVar) != std::string::npos);

    ::setenv(cli::kConfigEnvVar, fx("uniform4.json").c_str(), 1);
    r = run({"analyze"});
    CHECK(r.code == cli::kOk);
    CHECK(r.out.find("206.66666666666666") != std::string::npos);
    ::unsetenv(cli::kConfigEnvVar);
}

TEST_CASE("config error exit codes") {
    const std::pair<const char*, int> cases[] = {
        {"invalid_syntax.json", cli::kSchema},
        {"invalid_schema.json", cli::kSchema},
        {"invalid_trains.json", cli::kModel},
        {"invalid_demand.json", cli::kModel},
        {"missing.json", cli::kSchema},
    };
    for (auto [name, code] : cases) {
        for (const char* cmd : {"analyze", "simulate", "sweep"}) {
            const auto r = run({cmd, fx(name)});
            CHECK(r.code == code);
            CHECK(single_line(r.err));
        }
    }
    CHECK(run({"analyze", fx("invalid_syntax.json")}).err.rfind("parse-error: ", 0) == 0);
    CHECK(run({"analyze", fx("invalid_schema.json")}).err.rfind("schema-error: ", 0) == 0);
    CHECK(run({"analyze", fx("invalid_trains.json")}).err.find("0 < m < n") != std::string::npos);
    CHECK(run({"analyze", fx("invalid_demand.json")}).err.find("segment 1") != std::string::npos);
}

TEST_CASE("analyze") {
    auto r = run({"analyze", fx("uniform4.json")});
    CHECK(r.code == cli::kOk);
    CHECK(r.out.find("headway_s           206.66666666666666") != std::string::npos);
    CHECK(r.out.find("FREE_FLOW") != std::string::npos);
    CHECK(r.out.find("linearity           holds") != std::string::npos);

    r = run({"analyze", fx("uniform4.json"), "--trains", "3"});
    CHECK(r.code == cli::kOk);
    CHECK(r.out.find("trains              3") != std::string::npos);
    CHECK(r.out.find("headway_s           137.77777777777777") != std::string::npos);

    r = run({"analyze", fx("uniform4.json"), "--trains", "0"});
    CHECK(r.code == cli::kModel);
    CHECK(r.err.rfind("model-error: ", 0) == 0);

    const auto csv = std::filesystem::temp_directory_path() / "metro_cli_analyze.csv";
    r = run({"analyze", fx("uniform4.json"), "--csv", csv.string()});
    CHECK(r.code == cli::kOk);
    CHECK(slurp(csv) ==
          "m,x_mean,X_mean,headway_s,frequency_hz,phase,term1,term2,term3,linearity_holds\n"
          "2,0.1,0.11111111111111112,206.66666666666666,0.004838709677419355,FREE_FLOW,206.66666666666666,"
          "123.33333333333333,40,1\n");
    std::filesystem::remove(csv);
}

TEST_CASE("simulate") {
    auto r = run({"simulate", fx("uniform4.json"), "--law", "linearized", "--events", "2000"});
    CHECK(r.code == cli::kOk);
    CHECK(r.out.rfind("k,j,departure,dwell,run,headway\n", 0) == 0);
    CHECK(r.err.find("converged           yes") != std::string::npos);
    CHECK(r.err.find("headway_s           206.666666666") != std::string::npos);

    r = run({"simulate", fx("baseline8.json")});
    CHECK(r.code == cli::kOk);  // baseline divergence is expected, not a failure
    CHECK(r.err.find("converged           no") != std::string::npos);

    r = run({"simulate", fx("baseline8.json"), "--law", "full"});
    CHECK(r.code == cli::kOk);
    CHECK(r.err.find("converged           yes") != std::string::npos);
    CHECK(r.err.find("max_deviation_s     30\n") != std::string::npos);
    CHECK(r.err.find("final_headway_dev_s 0\n") != std::string::npos);

    const auto out = std::filesystem::temp_directory_path() / "metro_cli_sim.csv";
    r = run({"simulate", fx("uniform4.json"), "--events", "10", "--window", "4", "--out", out.string()});
    CHECK(r.code == cli::kOk);
    CHECK(r.out.find("window              4") != std::string::npos);
    CHECK(slurp(out).size() > 0);
    std::filesystem::remove(out);

    // Linear law with the conditions satisfied, delayed on the very last event.
    r = run({"simulate", fx("uniform4.json"), "--law", "full", "--events", "20", "--window", "10", "--perturb",
             "0:20:50"});
    CHECK(r.code == cli::kMismatch);
    CHECK(r.err.find("verification-mismatch: ") != std::string::npos);
}

TEST_CASE("sweep") {
    const auto r = run({"sweep", fx("line18.json"), "--m-range", "1:17", "--demand-scales", "0.5:0.5:20"});
    CHECK(r.code == cli::kOk);
    std::size_t rows = 0;
    for (char c : r.out) rows += c == '\n';
    CHECK(rows == 341);
    CHECK(r.err.find("cells=340") != std::string::npos);
    CHECK(r.err.find("INVALID=0") != std::string::npos);

    const auto partial = run({"sweep", fx("uniform4.json"), "--demand-scales", "1,10"});
    CHECK(partial.code == cli::kOk);
    CHECK(partial.err.find("INVALID=3") != std::string::npos);
}

TEST_CASE("verify") {
    auto r = run({"verify", "--trials", "10", "--seed", "7"});
    CHECK(r.code == cli::kOk);
    CHECK(r.out == "10/10 agree\n");

    r = run({"verify", "--trials", "3", "--seed", "7", "--inject-fault"});
    CHECK(r.code == cli::kMismatch);
    CHECK(r.out == "0/3 agree\n");
    CHECK(r.err.find("\"schema_version\": 1") != std::string::npos);
    CHECK(r.err.find("verification-mismatch: 3 of 3 trials disagree") != std::string::npos);
}
