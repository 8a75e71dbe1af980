/*
 * Copyright 2026 The parity-audit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Drives the parity-audit binary end to end and checks the exit-code contract.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path workdir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("parity-cli-test-" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run(const std::string& args) {
    const std::string cmd = std::string("\"") + PARITY_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Two groups; model "biased" over-predicts group N by 30%, model "even" is unbiased.
fs::path write_data() {
    const fs::path p = workdir() / "data.csv";
    std::ofstream out(p);
    out << "id,prop,truth,even,biased,region\n";
    std::mt19937_64 eng(99);
    std::normal_distribution<double> z;
    for (int i = 0; i < 120; ++i) {
        const bool w = i % 2 == 0;
        const double truth = 100.0 + 50.0 * (i % 7) + (i % 5 == 0 ? -60.0 : 0.0);
        const double even = truth * (1.0 + 0.05 * z(eng));
        const double biased = truth * ((w ? 1.0 : 1.3) + 0.05 * z(eng));
        out << i << "," << (w ? 0.8 : 0.3) << "," << truth << "," << even << "," << biased << ","
            << (i % 3 ? "east" : "west") << "\n";
    }
    return p;
}

std::string common(const fs::path& data) {
    return "--input \"" + data.string() + "\" --truth-col truth --label-threshold prop:0.598:W:N";
}

}  // namespace

TEST_CASE("audit success, determinism and report contents") {
    const fs::path data = write_data();
    const fs::path out1 = workdir() / "r1.json", out2 = workdir() / "r2.json";
    const std::string args = "audit " + common(data) +
                             " --pred-col even --pred-col biased --min-truth 100 --alpha 0.01"
                             " --permutations 2000 --output ";
    REQUIRE(run(args + "\"" + out1.string() + "\"") == 0);
    REQUIRE(run("--threads 3 " + args + "\"" + out2.string() + "\"") == 0);
    CHECK(slurp(out1) == slurp(out2));

    const json j = json::parse(slurp(out1));
    CHECK(j["rows_loaded"] == 120);
    CHECK(j["rows_filtered"] == 7);
    CHECK(j["rows_audited"] == 113);
    REQUIRE(j["audits"].size() == 2);
    CHECK(j["audits"][0]["model"] == "even");
    CHECK(j["audits"][1]["model"] == "biased");
    CHECK(j["audits"][1]["verdict"] == "unfair");
    CHECK(j["audits"][1]["posthoc"][0]["statistics"]["mean"]["significant"] == true);
    CHECK(j["audits"][1]["config"]["seed"] == 42);
}

TEST_CASE("exit codes") {
    const fs::path data = write_data();
    const std::string out = " --output \"" + (workdir() / "x.out").string() + "\"";
    const std::string base = "audit " + common(data) + " --permutations 500";

    CHECK(run(base + " --pred-col biased --fail-on-unfair" + out) == 1);
    CHECK(run(base + " --pred-col biased" + out) == 0);
    CHECK(run(base + " --pred-col biased --format markdown" + out) == 0);
    CHECK(slurp(workdir() / "x.out").find("| pair (A vs B)") != std::string::npos);

    CHECK(run(base + " --pred-col biased --alpha 0.02" + out) == 2);
    CHECK(run(base + " --pred-col biased --metric cubic" + out) == 2);
    CHECK(run(base + " --pred-col biased --permutations 0" + out) == 2);
    CHECK(run(base + " --pred-col biased --label-threshold bad" + out) == 2);
    CHECK(run("audit --pred-col biased" + out) == 2);
    CHECK(run("frobnicate") == 2);

    CHECK(run(base + " --pred-col nosuch" + out) == 3);
    CHECK(run(base + " --pred-col biased --min-truth 1e9" + out) == 3);
    const fs::path bad = workdir() / "bad.csv";
    std::ofstream(bad) << "truth,p,prop\n1,N/A,0.7\n";
    CHECK(run("audit --input \"" + bad.string() +
              "\" --truth-col truth --pred-col p --label-threshold prop:0.5:W:N" + out) == 3);
    CHECK(run("audit --input /nonexistent.csv --truth-col truth --pred-col p --group-col g" + out) == 3);
}

TEST_CASE("plot data and group columns") {
    const fs::path data = write_data();
    const fs::path plot = workdir() / "plot.csv", out = workdir() / "g.json";
    REQUIRE(run("audit " + common(data) + " --group-col region --intersect --pred-col even"
                " --permutations 200 --plot-data \"" + plot.string() + "\" --clip 1.0 --output \"" +
                out.string() + "\"") == 0);
    const json j = json::parse(slurp(out));
    REQUIRE(j["audits"].size() == 3);
    CHECK(j["audits"][2]["groups"].size() == 4);
    CHECK(slurp(plot).find("audit,group,bin,lower,upper,count,fraction,ecdf") != std::string::npos);
}

TEST_CASE("simulate and exact subcommands") {
    const fs::path sim = workdir() / "sim.json";
    REQUIRE(run("simulate --family normal --shift 0 --n 30 --trials 20 --alpha 0.05 "
                "--permutations 50 --seed 7 --output \"" + sim.string() + "\"") == 0);
    const json s = json::parse(slurp(sim));
    CHECK(s["log"].size() == 20);
    CHECK(s["rate"].get<double>() >= 0.0);
    CHECK(run("simulate --trials 0") == 2);
    CHECK(run("simulate --family cauchy") == 2);
    CHECK(run("simulate --scale 0") == 2);

    const fs::path small = workdir() / "small.csv";
    std::ofstream(small) << "truth,p,g\n1,1,a\n1,2,a\n1,3,a\n1,4,a\n1,5,a\n"
                            "1,6,b\n1,7,b\n1,8,b\n1,9,b\n1,10,b\n";
    const fs::path ex = workdir() / "exact.json";
    REQUIRE(run("exact --input \"" + small.string() +
                "\" --truth-col truth --pred-col p --group-col g --metric identity --output \"" +
                ex.string() + "\"") == 0);
    const std::string text = slurp(ex);
    CHECK(text.find("0.007936507936507936") != std::string::npos);
    CHECK(run("exact --input \"" + small.string() +
              "\" --truth-col truth --pred-col p --group-col g --max-assignments 100") == 2);
}
