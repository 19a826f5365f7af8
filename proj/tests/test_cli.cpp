// Drives the qbm_cli executable end to end.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace {

const std::string kCli = QBM_CLI_PATH;
const std::string kConfigs = QBM_CONFIG_DIR;
const std::string kWork = QBM_WORK_DIR;

struct Run {
    int code;
    std::string out, err;
};

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Run cli(const std::string& args) {
    const std::string out = kWork + "/cli_stdout.txt", err = kWork + "/cli_stderr.txt";
    int status = std::system((kCli + " " + args + " > " + out + " 2> " + err).c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::string write_cfg(const std::string& name, const std::string& text) {
    std::string path = kWork + "/" + name;
    std::ofstream(path, std::ios::binary) << text;
    return path;
}

// Parsed CSV: comment block, header and string cells.
struct Csv {
    std::map<std::string, std::string> meta;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t col(const std::string& name) const {
        auto it = std::find(header.begin(), header.end(), name);
        REQUIRE(it != header.end());
        return static_cast<std::size_t>(it - header.begin());
    }
    std::vector<double> column(const std::string& name) const {
        std::size_t c = col(name);
        std::vector<double> v;
        for (const auto& r : rows) v.push_back(std::stod(r[c]));
        return v;
    }
};

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

Csv parse_csv(const std::string& text) {
    Csv csv;
    std::stringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (line.rfind("# ", 0) == 0) {
            auto eq = line.find(" = ");
            REQUIRE(eq != std::string::npos);
            csv.meta[line.substr(2, eq - 2)] = line.substr(eq + 3);
        } else if (csv.header.empty()) {
            csv.header = split(line);
        } else {
            csv.rows.push_back(split(line));
            REQUIRE(csv.rows.back().size() == csv.header.size());
        }
    }
    return csv;
}

// Value column of a grid CSV and the (eta_0, eta_r) of its maximum.
std::pair<double, double> grid_argmax(const Csv& g, const std::string& quantity, double* min_value) {
    auto e0 = g.column("eta_0"), er = g.column("eta_r"), v = g.column(quantity);
    std::size_t k = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
    *min_value = *std::min_element(v.begin(), v.end());
    return {e0[k], er[k]};
}

}  // namespace

TEST_CASE("roots: table, footer sum rules and parameter echo") {
    Run r = cli("roots --config " + kConfigs + "/sample.cfg");
    REQUIRE(r.code == 0);
    Csv csv = parse_csv(r.out);
    CHECK(csv.header == std::vector<std::string>{"label", "eta_re", "eta_im", "residue_re", "residue_im"});
    REQUIRE(csv.rows.size() == 6);
    for (const char* k : {"omega0", "mass_m", "mu", "sigma", "eta_r", "eta_0"}) CHECK(csv.meta.count(k) == 1);
    CHECK(std::stod(csv.meta["eta_0"]) == 0.5);
    for (int j = 0; j < 4; ++j) {
        CHECK(csv.rows[j][0] == "eta" + std::to_string(j + 1));
        CHECK(std::stod(csv.rows[j][2]) > 0.0);
    }
    CHECK(csv.rows[4][0] == "sum_R");
    CHECK(std::hypot(std::stod(csv.rows[4][3]), std::stod(csv.rows[4][4])) < 1e-12);
    CHECK(csv.rows[5][0] == "sum_R_eta");
    CHECK(std::stod(csv.rows[5][3]) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(std::stod(csv.rows[5][4])) < 1e-12);
}

TEST_CASE("config and parameter errors exit with the config code") {
    Run r = cli("roots --config " + write_cfg("zero_sigma.cfg", "sigma = 0\n"));
    CHECK(r.code == 2);
    CHECK(r.err.find("sigma must be > 0") != std::string::npos);
    r = cli("roots --config " + write_cfg("malformed.cfg", "sigma = 1\neta_0 0.5\n"));
    CHECK(r.code == 2);
    CHECK(r.err.find("malformed.cfg:2:") != std::string::npos);
    r = cli("roots --config " + kWork + "/does_not_exist.cfg");
    CHECK(r.code == 2);
    CHECK(cli("frobnicate").code == 2);
    CHECK(cli("roots").code == 2);
    CHECK(cli("roots --config " + kConfigs + "/sample.cfg --format xml").code == 2);
    CHECK(cli("trace --config " + write_cfg("neg_tmax.cfg", "t_max = -1\n")).code == 2);
    CHECK(cli("trace --config " + write_cfg("zero_points.cfg", "n_points = 0\n")).code == 2);
    CHECK(cli("roots --config " + kConfigs + "/sample.cfg --out /nonexistent_dir/x.csv").code == 2);
}

TEST_CASE("trace with a single point is the quench instant") {
    Run r = cli("trace --config " + write_cfg("one.cfg", "sigma = 1\neta_r = 0\neta_0 = 0.5\nt_max = 5\nn_points = 1\n"));
    REQUIRE(r.code == 0);
    Csv csv = parse_csv(r.out);
    CHECK(csv.header == std::vector<std::string>{"time", "delta_E", "delta_T", "x_var", "p_var", "uncertainty"});
    REQUIRE(csv.rows.size() == 1);
    CHECK(std::stod(csv.rows[0][0]) == 0.0);
    CHECK(std::abs(std::stod(csv.rows[0][1])) < 1e-12);
    CHECK(std::stod(csv.rows[0][3]) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("kinetic energy config dips below zero without breaking the uncertainty bound") {
    Run r = cli("trace --config " + kConfigs + "/fig6.cfg");
    REQUIRE(r.code == 0);
    Csv csv = parse_csv(r.out);
    auto t = csv.column("time"), dT = csv.column("delta_T"), u = csv.column("uncertainty");
    CHECK(t.back() == 30.0);
    CHECK(*std::min_element(dT.begin(), dT.end()) < 0.0);
    CHECK(*std::min_element(u.begin(), u.end()) >= 0.25 - 1e-12);
}

TEST_CASE("list-valued config writes one file per run with decay ordered by eta_0") {
    const std::string out = kWork + "/fig4.csv";
    REQUIRE(cli("trace --config " + kConfigs + "/fig4.cfg --out " + out).code == 0);
    std::vector<double> spread;
    for (const char* tag : {"0.25", "0.5", "1"}) {
        Csv csv = parse_csv(slurp(kWork + "/fig4_eta_0_" + tag + ".csv"));
        REQUIRE(csv.rows.size() == 801);
        CHECK(csv.meta["run"] == std::string("eta_0=") + tag);
        auto t = csv.column("time"), e = csv.column("delta_E");
        double lo = 1e300, hi = -1e300;
        for (std::size_t i = 0; i < t.size(); ++i)
            if (t[i] >= 20.0) lo = std::min(lo, e[i]), hi = std::max(hi, e[i]);
        spread.push_back(hi - lo);
        CHECK(e.back() > 0.0);
    }
    CHECK(spread[0] > spread[1]);
    CHECK(spread[1] > spread[2]);
}

TEST_CASE("energy surfaces: non-negative with the expected maxima") {
    double lo;
    Run r = cli("grid --config " + kConfigs + "/fig1.cfg");
    REQUIRE(r.code == 0);
    Csv g1 = parse_csv(r.out);
    REQUIRE(g1.rows.size() == 400);
    auto [e0, er] = grid_argmax(g1, "delta_E_asy", &lo);
    CHECK(lo >= -1e-10);
    CHECK(e0 == 0.05);
    CHECK(std::abs(er - 1.0) <= 2.0 / 19.0 + 1e-12);

    r = cli("grid --config " + kConfigs + "/fig2.cfg");
    REQUIRE(r.code == 0);
    Csv g2 = parse_csv(r.out);
    auto [k0, kr] = grid_argmax(g2, "delta_T_asy", &lo);
    CHECK(lo >= -1e-10);
    CHECK(k0 == 0.05);
    CHECK(kr == 0.0);

    r = cli("grid --config " + kConfigs + "/fig3.cfg");
    REQUIRE(r.code == 0);
    Csv g3 = parse_csv(r.out);
    auto e0s = g3.column("eta_0"), rt = g3.column("relaxation_time");
    for (std::size_t k = 0; k + 20 < rt.size(); ++k) {
        INFO("eta_0 ", e0s[k]);
        CHECK(rt[k] > 0.0);
        CHECK(rt[k] > rt[k + 20]);
    }
}

TEST_CASE("output is byte-identical across reruns and uses LF endings") {
    const std::string a = kWork + "/rerun_a.csv", b = kWork + "/rerun_b.csv";
    REQUIRE(cli("trace --config " + kConfigs + "/fig6.cfg --out " + a).code == 0);
    REQUIRE(cli("trace --config " + kConfigs + "/fig6.cfg --out " + b + " --threads 3").code == 0);
    std::string ta = slurp(a), tb = slurp(b);
    CHECK(!ta.empty());
    CHECK(ta == tb);
    CHECK(ta.find('\r') == std::string::npos);
    Csv csv = parse_csv(ta);
    CHECK(csv.rows[1][0] == "0.050000000000000003");
}

TEST_CASE("json output carries the same numbers") {
    Run csv_run = cli("roots --config " + kConfigs + "/sample.cfg");
    Run json_run = cli("roots --config " + kConfigs + "/sample.cfg --format json");
    REQUIRE(json_run.code == 0);
    auto j = nlohmann::json::parse(json_run.out);
    Csv csv = parse_csv(csv_run.out);
    CHECK(j["meta"]["sigma"] == "1");
    for (std::size_t i = 0; i < csv.rows.size(); ++i) {
        CHECK(j["columns"]["label"][i] == csv.rows[i][0]);
        CHECK(j["columns"]["eta_im"][i].get<double>() == std::stod(csv.rows[i][2]));
    }
    Run multi = cli("trace --config " + kConfigs + "/fig4.cfg --format json");
    REQUIRE(multi.code == 0);
    auto arr = nlohmann::json::parse(multi.out);
    REQUIRE(arr.is_array());
    CHECK(arr.size() == 3);
}

TEST_CASE("validate: fast suite passes and the corrupted control fails") {
    Run ok = cli("validate --config " + kConfigs + "/sample.cfg --level fast");
    INFO(ok.out, ok.err);
    REQUIRE(ok.code == 0);
    Csv csv = parse_csv(ok.out);
    CHECK(csv.meta["result"] == "pass");
    CHECK(csv.header == std::vector<std::string>{"check", "passed", "measured", "tolerance", "detail"});
    for (const auto& row : csv.rows) CHECK(row[1] == "1");

    Run bad = cli("validate --config " + kConfigs + "/sample.cfg --inject-corrupt-spectral");
    CHECK(bad.code == 3);
    CHECK(parse_csv(bad.out).meta["result"] == "fail");
    CHECK(cli("validate --config " + kConfigs + "/sample.cfg --level medium").code == 2);
}

TEST_CASE("bath-sim: conserved total energy; recurrence violation is a numerical error") {
    std::string cfg = write_cfg("bath_small.cfg",
                                "sigma = 1\neta_r = 1\neta_0 = 0.5\nn_modes = 300\nnu_max = 50\nt_max = 4\ndt_step = 0.1\n");
    Run r = cli("bath-sim --config " + cfg);
    REQUIRE(r.code == 0);
    Csv csv = parse_csv(r.out);
    REQUIRE(csv.rows.size() == 41);
    CHECK(csv.header.back() == "total_energy");
    auto total = csv.column("total_energy");
    for (double e : total) CHECK(std::abs(e - total[0]) < 1e-8);
    CHECK(std::stod(csv.meta["recurrence_time"]) > 4.0);

    std::string long_cfg = write_cfg("bath_long.cfg",
                                     "sigma = 1\neta_r = 1\neta_0 = 0.5\nn_modes = 50\nnu_max = 50\nt_max = 30\n");
    Run far = cli("bath-sim --config " + long_cfg);
    CHECK(far.code == 4);
    CHECK(far.err.find("recurrence") != std::string::npos);
}
