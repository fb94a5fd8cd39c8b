#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"

using sigma_lab::cli::run;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

fs::path temp_path(const std::string& tag) {
    std::random_device rd;
    return fs::temp_directory_path() / ("sigma_lab_cli_" + tag + "_" + std::to_string(rd()));
}

}  // namespace

TEST_CASE("sigma prints a trace with residues") {
    const auto r = invoke({"sigma", "6", "--iterate", "2"});
    CHECK(r.code == 0);
    CHECK(r.out == "0 6 0\n1 12 0\n2 28 4\n");

    CHECK(invoke({"sigma", "6"}).out == "sigma(6) = 12  S = 2\n");
    CHECK(invoke({"sigma", "6", "--power", "2"}).out == "sigma_2(6) = 50\n");
    CHECK(invoke({"sigma", "6", "--iterate", "3", "--gcd"}).out == "0 6\n1 6\n2 2\n3 2\n");
    CHECK(invoke({"sigma", "6", "--iterate", "2", "--ratio"}).out == "0 2\n1 7/3\n");
    CHECK(invoke({"sigma", "3", "--iterate", "3", "--squares"}).out == "sigma^1(3) = 4 is a square or twice a square\n");
}

TEST_CASE("factor and aliquot") {
    CHECK(invoke({"factor", "16105", "12"}).out == "16105 = 5 * 3221\n12 = 2^2 * 3\n");
    const auto json = invoke({"factor", "12", "--format", "json"});
    CHECK(json.out == R"({"type":"factorization","n":"12","factors":[["2",2],["3",1]]})"
                      "\n");

    const auto amicable = invoke({"aliquot", "220"});
    CHECK(amicable.out == "0 220\n1 284\n2 220\nCYCLE length 2\n");
}

TEST_CASE("ctr-scan writes the CSV table and is independent of --jobs") {
    const auto one = invoke({"ctr-scan", "--to", "60", "--jobs", "1"});
    const auto four = invoke({"ctr-scan", "--to", "60", "--jobs", "4"});
    CHECK(one.code == 0);
    CHECK(one.out == four.out);
    const auto rows = lines(one.out);
    REQUIRE(rows.size() == 60);
    CHECK(rows[0] == "n,smallest_k,status");
    CHECK(rows[2] == "3,4,RESOLVED");

    const auto short_horizon = invoke({"ctr-scan", "--from", "5", "--to", "5", "--k-max", "4"});
    CHECK(short_horizon.code == 2);
    CHECK(short_horizon.out == "n,smallest_k,status\n5,,NO_K_WITHIN_HORIZON\n");
}

TEST_CASE("multiperfect subcommands") {
    const auto mp = invoke({"mp-scan", "--limit", "1000"});
    CHECK(mp.code == 0);
    CHECK(lines(mp.out).size() == 6);

    const auto lp = invoke({"lprime", "--limit", "1000000"});
    CHECK(lp.code == 0);
    CHECK(lp.out == "n,index,L,factorization,bound_lhs,bound_consistent\n6,2,2,2 * 3,4,true\n");

    CHECK(invoke({"lprime", "--lemmas"}).code == 0);

    const auto meta = invoke({"meta-scan", "--to", "100"});
    CHECK(meta.out == "n,first_failure_k,residue,status\n6,2,4,RESOLVED\n28,2,8,RESOLVED\n");
    CHECK(invoke({"meta-scan", "13188979363639752997731839211623940096"}).out.find(",3,") != std::string::npos);
}

TEST_CASE("congruence subcommands") {
    const auto p = invoke({"periodicity", "4", "--horizon", "12"});
    CHECK(p.code == 0);
    CHECK(p.out == "4 L=3 period=3 divides residues=0,0,3,0,0,3,0,0,3,0,0,3\n");

    const auto ps = invoke({"powersum-check", "--tau-to", "500"});
    CHECK(ps.code == 0);
    CHECK(ps.out.find("power-sum congruence: 2700/2700 rows match") != std::string::npos);
    CHECK(ps.out.find("3 2 0\n") != std::string::npos);  // sigma^3(6) = 2, sigma_3(6) = 0 (mod 6)

    const auto conj = invoke({"conjecture-scan", "--to", "1000"});
    CHECK(conj.code == 0);
    CHECK(lines(conj.out).size() == 5);
}

TEST_CASE("chain subcommands") {
    const auto l = invoke({"lenstra", "--k-max", "2", "--m-max", "1000"});
    CHECK(l.code == 0);
    CHECK(l.out == "k=1 m=12 chain=12<16\nk=2 m=24 chain=24<36<55\n");
    CHECK(invoke({"lenstra", "--k-max", "1", "--m-max", "11"}).code == 2);

    const auto e = invoke({"erdos-sample", "--to", "1000", "--chain", "2", "--delta", "9/10", "--format", "json"});
    CHECK(e.code == 0);
    const auto rec = nlohmann::json::parse(e.out);
    CHECK(rec["violating"] == 166);
    CHECK(rec["applicable"] == 831);
}

TEST_CASE("every subcommand emits typed JSON lines") {
    const std::vector<std::vector<std::string>> commands{
        {"factor", "360"},
        {"sigma", "28"},
        {"sigma", "28", "--iterate", "3"},
        {"aliquot", "12"},
        {"ctr-scan", "--to", "20"},
        {"meta-scan", "--to", "500"},
        {"mp-scan", "--to", "500"},
        {"lprime", "--to", "500"},
        {"periodicity", "--to", "12"},
        {"powersum-check", "--p-max", "5", "--tau-to", "50", "--odd-k", "9"},
        {"lenstra", "--k-max", "2"},
        {"erdos-sample", "--to", "200"},
        {"conjecture-scan", "--to", "500"},
        {"verify-all", "--claim", "powersum-congruence"},
    };
    for (auto args : commands) {
        args.push_back("--format");
        args.push_back("json");
        const auto r = invoke(args);
        INFO(args[0]);
        REQUIRE(r.code == 0);
        const auto rows = lines(r.out);
        REQUIRE_FALSE(rows.empty());
        for (const auto& line : rows) {
            const auto rec = nlohmann::ordered_json::parse(line);
            REQUIRE(rec.is_object());
            REQUIRE(rec.begin().key() == "type");
        }
    }
}

TEST_CASE("usage errors exit 64") {
    CHECK(invoke({}).code == 64);
    CHECK(invoke({"no-such-command"}).code == 64);
    CHECK(invoke({"factor"}).code == 64);
    CHECK(invoke({"factor", "12x"}).code == 64);
    CHECK(invoke({"ctr-scan", "--jobs", "0"}).code == 64);
    CHECK(invoke({"ctr-scan", "--from", "10", "--to", "5"}).code == 64);
    CHECK(invoke({"ctr-scan", "--k-max", "0"}).code == 64);
    CHECK(invoke({"sigma", "6", "--format", "csv"}).code == 64);
    CHECK(invoke({"sigma", "6", "--format", "xml"}).code == 64);
    CHECK(invoke({"sigma", "6", "--gcd"}).code == 64);
    CHECK(invoke({"verify-all", "--claim", "nope"}).code == 64);
    CHECK(invoke({"meta-scan", "12"}).code == 64);
    const auto help = invoke({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("verify-all") != std::string::npos);
}

TEST_CASE("verify-all verdicts and exit codes") {
    const auto one = invoke({"verify-all", "--claim", "powersum-congruence"});
    CHECK(one.code == 0);
    CHECK(one.out.rfind("PASS        powersum-congruence\n", 0) == 0);
    CHECK(one.out.find("summary: 1 PASS, 0 FINDING, 0 FAIL, 0 UNRESOLVED") != std::string::npos);

    const auto finding = invoke({"verify-all", "--claim", "odd-k-iterate"});
    CHECK(finding.code == 0);
    CHECK(finding.out.rfind("FINDING", 0) == 0);

    const auto starved = invoke({"verify-all", "--claim", "divisibility-search", "--budget-work", "100"});
    CHECK(starved.code == 2);
    CHECK(starved.out.rfind("UNRESOLVED", 0) == 0);
}

TEST_CASE("--out redirects data and the cache persists between runs") {
    const auto out_file = temp_path("out");
    const auto cache_file = temp_path("cache");
    const auto r = invoke({"factor", "998244353000000007", "--out", out_file.string(), "--cache", cache_file.string()});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(out_file);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text.find("998244353000000007 = ") == 0);

    // Semiprime with 9- and 10-digit factors: far beyond a 10-step budget unless cached.
    const std::string hard = "998244359987710471";  // 998244353 * 1000000007
    CHECK(invoke({"factor", hard, "--budget-work", "10"}).code == 2);
    CHECK(invoke({"factor", hard, "--cache", cache_file.string()}).code == 0);
    const auto cached = invoke({"factor", hard, "--budget-work", "10", "--cache", cache_file.string()});
    CHECK(cached.code == 0);
    CHECK(cached.out == hard + " = 998244353 * 1000000007\n");

    ::setenv("SIGMA_LAB_CACHE", cache_file.string().c_str(), 1);
    CHECK(invoke({"factor", hard, "--budget-work", "10"}).code == 0);
    ::unsetenv("SIGMA_LAB_CACHE");

    fs::remove(out_file);
    fs::remove(cache_file);
}
