// Command-line front end over the C interface.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "qbm/qbm.h"

namespace {

enum Exit { kOk = 0, kConfig = 2, kValidation = 3, kNumerical = 4, kInternal = 5 };

struct Failure {
    int exit_code;
    std::string message;
};

int exit_for(qbm_status s) {
    switch (s) {
        case QBM_OK: return kOk;
        case QBM_E_CONFIG:
        case QBM_E_PARAMETER:
        case QBM_E_ARGUMENT:
        case QBM_E_IO: return kConfig;
        case QBM_E_INTERNAL: return kInternal;
        default: return kNumerical;
    }
}

void check(qbm_status s) {
    if (s != QBM_OK) throw Failure{exit_for(s), std::string(qbm_status_name(s)) + ": " + qbm_last_error()};
}

[[noreturn]] void config_error(const std::string& msg) { throw Failure{kConfig, "config error: " + msg}; }

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

using ConfigPtr = std::unique_ptr<qbm_config, decltype(&qbm_config_free)>;
using SpectralPtr = std::unique_ptr<qbm_spectral, decltype(&qbm_spectral_free)>;
using TracePtr = std::unique_ptr<qbm_trace, decltype(&qbm_trace_free)>;

ConfigPtr load_config(const std::string& path) {
    qbm_config* c = nullptr;
    if (path.empty())
        check(qbm_config_parse("", "<defaults>", &c));
    else
        check(qbm_config_load(path.c_str(), &c));
    return ConfigPtr(c, qbm_config_free);
}

double cfg_double(const qbm_config* c, const char* key, double fallback) {
    double v;
    check(qbm_config_get_double(c, key, fallback, &v));
    return v;
}

long cfg_int(const qbm_config* c, const char* key, long fallback) {
    long v;
    check(qbm_config_get_int(c, key, fallback, &v));
    return v;
}

// A named-column table with a comment block of metadata.
struct Table {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;  // preformatted cells

    void add_params(const qbm_params& p) {
        meta.emplace_back("omega0", num(p.omega0));
        meta.emplace_back("mass_m", num(p.mass_m));
        meta.emplace_back("mu", num(p.mu));
        meta.emplace_back("sigma", num(p.sigma));
        meta.emplace_back("eta_r", num(p.eta_r));
        meta.emplace_back("eta_0", num(p.eta_0));
    }

    void add_trace(const qbm_trace* t) {
        const std::size_t nc = qbm_trace_column_count(t), nr = qbm_trace_rows(t);
        for (std::size_t c = 0; c < nc; ++c) columns.emplace_back(qbm_trace_column_name(t, c));
        for (std::size_t r = 0; r < nr; ++r) {
            std::vector<std::string> row;
            for (std::size_t c = 0; c < nc; ++c) row.push_back(num(qbm_trace_column(t, c)[r]));
            rows.push_back(std::move(row));
        }
    }

    std::string csv() const {
        std::string out;
        for (const auto& [k, v] : meta) out += "# " + k + " = " + v + "\n";
        for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
        out += "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
            out += "\n";
        }
        return out;
    }

    nlohmann::ordered_json json() const {
        nlohmann::ordered_json j;
        nlohmann::ordered_json m = nlohmann::ordered_json::object();
        for (const auto& [k, v] : meta) m[k] = v;
        j["meta"] = m;
        nlohmann::ordered_json cols = nlohmann::ordered_json::object();
        for (std::size_t c = 0; c < columns.size(); ++c) {
            nlohmann::ordered_json arr = nlohmann::ordered_json::array();
            for (const auto& row : rows) {
                const std::string& cell = row[c];
                char* end = nullptr;
                double v = std::strtod(cell.c_str(), &end);
                if (end == cell.c_str() + cell.size() && !cell.empty() && std::isfinite(v))
                    arr.push_back(v);
                else
                    arr.push_back(cell);
            }
            cols[columns[c]] = arr;
        }
        j["columns"] = cols;
        return j;
    }

    std::string render(const std::string& format) const {
        return format == "json" ? json().dump(2) + "\n" : csv();
    }
};

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        std::fflush(stdout);
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Failure{kConfig, "io error: cannot write '" + path + "'"};
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw Failure{kConfig, "io error: failed writing '" + path + "'"};
}

// out.csv + "eta_0=0.25" -> out_eta_0_0.25.csv
std::string run_path(const std::string& out, const std::string& label) {
    if (out.empty() || out == "-" || label.empty()) return out;
    std::string tag = label;
    for (char& ch : tag)
        if (ch == '=') ch = '_';
    auto slash = out.find_last_of('/');
    auto dot = out.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return out + "_" + tag;
    return out.substr(0, dot) + "_" + tag + out.substr(dot);
}

struct Options {
    std::string config;
    std::string out;
    std::string format = "csv";
    std::string level = "fast";
    unsigned threads = 0;
    bool corrupt_spectral = false;
};

unsigned thread_count(const qbm_config* c, const Options& o) {
    if (o.threads) return o.threads;
    long t = cfg_int(c, "threads", 0);
    if (t < 0) config_error("threads must be >= 0");
    return static_cast<unsigned>(t);
}

int cmd_roots(const Options& o) {
    ConfigPtr c = load_config(o.config);
    qbm_params p;
    check(qbm_config_params(c.get(), &p));
    qbm_spectral* raw = nullptr;
    check(qbm_spectral_compute(&p, &raw));
    SpectralPtr s(raw, qbm_spectral_free);
    Table t;
    t.meta.emplace_back("command", "roots");
    t.add_params(p);
    t.columns = {"label", "eta_re", "eta_im", "residue_re", "residue_im"};
    for (int j = 0; j < 4; ++j) {
        double er, ei, rr, ri;
        check(qbm_spectral_root(s.get(), j, &er, &ei));
        check(qbm_spectral_residue(s.get(), j, &rr, &ri));
        t.rows.push_back({"eta" + std::to_string(j + 1), num(er), num(ei), num(rr), num(ri)});
    }
    double sr[4];
    check(qbm_spectral_sum_rules(s.get(), sr));
    t.rows.push_back({"sum_R", "0", "0", num(sr[0]), num(sr[1])});
    t.rows.push_back({"sum_R_eta", "0", "0", num(sr[2]), num(sr[3])});
    double relax;
    check(qbm_relaxation_time(&p, s.get(), &relax));
    t.meta.emplace_back("relaxation_time", num(relax));
    emit(t.render(o.format), o.out);
    return kOk;
}

int cmd_trace(const Options& o) {
    ConfigPtr c = load_config(o.config);
    const double t_max = cfg_double(c.get(), "t_max", 20.0);
    const long n_points = cfg_int(c.get(), "n_points", 401);
    if (n_points < 1) config_error("n_points must be >= 1");
    if (n_points > 1 && !(t_max > 0.0)) config_error("t_max must be > 0");
    std::vector<double> times(static_cast<std::size_t>(n_points));
    for (long i = 0; i < n_points; ++i) times[static_cast<std::size_t>(i)] = (n_points == 1) ? 0.0 : t_max * i / (n_points - 1);
    const unsigned threads = thread_count(c.get(), o);

    std::size_t runs;
    check(qbm_config_run_count(c.get(), &runs));
    std::vector<Table> to_stdout;
    for (std::size_t r = 0; r < runs; ++r) {
        qbm_params p;
        char label[128];
        check(qbm_config_run(c.get(), r, &p, label, sizeof label));
        qbm_spectral* sraw = nullptr;
        check(qbm_spectral_compute(&p, &sraw));
        SpectralPtr s(sraw, qbm_spectral_free);
        qbm_trace* traw = nullptr;
        check(qbm_trace_compute(&p, s.get(), times.data(), times.size(), threads, &traw));
        TracePtr tr(traw, qbm_trace_free);
        Table t;
        t.meta.emplace_back("command", "trace");
        if (label[0]) t.meta.emplace_back("run", label);
        t.add_params(p);
        t.meta.emplace_back("t_max", num(t_max));
        t.meta.emplace_back("n_points", std::to_string(n_points));
        t.add_trace(tr.get());
        if (o.out.empty() || o.out == "-")
            to_stdout.push_back(std::move(t));
        else
            emit(t.render(o.format), run_path(o.out, label));
    }
    if (to_stdout.size() == 1) {
        emit(to_stdout[0].render(o.format), "");
    } else if (!to_stdout.empty()) {
        std::string text;
        if (o.format == "json") {
            nlohmann::ordered_json all = nlohmann::ordered_json::array();
            for (const Table& t : to_stdout) all.push_back(t.json());
            text = all.dump(2) + "\n";
        } else {
            for (const Table& t : to_stdout) text += t.csv();
        }
        emit(text, "");
    }
    return kOk;
}

int cmd_grid(const Options& o) {
    ConfigPtr c = load_config(o.config);
    std::size_t n0, nr;
    check(qbm_grid_axes(c.get(), &n0, &nr));
    std::vector<double> eta0(n0), etar(nr), values(n0 * nr);
    qbm_grid_quantity q;
    double sigma;
    check(qbm_grid_evaluate(c.get(), thread_count(c.get(), o), eta0.data(), etar.data(), values.data(), &q, &sigma));
    Table t;
    t.meta.emplace_back("command", "grid");
    t.meta.emplace_back("omega0", num(cfg_double(c.get(), "omega0", 1.0)));
    t.meta.emplace_back("mass_m", num(cfg_double(c.get(), "mass_m", 1.0)));
    t.meta.emplace_back("mu", num(cfg_double(c.get(), "mu", 1.0)));
    t.meta.emplace_back("sigma", num(sigma));
    t.meta.emplace_back("quantity", qbm_grid_quantity_name(q));
    t.columns = {"eta_0", "eta_r", qbm_grid_quantity_name(q)};
    for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t j = 0; j < nr; ++j) t.rows.push_back({num(eta0[i]), num(etar[j]), num(values[i * nr + j])});
    emit(t.render(o.format), o.out);
    return kOk;
}

int cmd_validate(const Options& o) {
    ConfigPtr c = load_config(o.config);
    qbm_params p;
    check(qbm_config_params(c.get(), &p));
    qbm_report* raw = nullptr;
    check(qbm_validate(&p, o.level == "full" ? QBM_LEVEL_FULL : QBM_LEVEL_FAST, o.corrupt_spectral ? 1 : 0, &raw));
    std::unique_ptr<qbm_report, decltype(&qbm_report_free)> rep(raw, qbm_report_free);
    Table t;
    t.meta.emplace_back("command", "validate");
    t.meta.emplace_back("level", o.level);
    t.add_params(p);
    t.columns = {"check", "passed", "measured", "tolerance", "detail"};
    for (std::size_t i = 0; i < qbm_report_count(rep.get()); ++i) {
        const char *name, *detail;
        int passed;
        double measured, tol;
        check(qbm_report_check(rep.get(), i, &name, &passed, &measured, &tol, &detail));
        std::string d = detail;
        for (char& ch : d)
            if (ch == ',' || ch == '\n') ch = ';';
        t.rows.push_back({name, passed ? "1" : "0", num(measured), num(tol), d});
    }
    const bool ok = qbm_report_all_passed(rep.get()) != 0;
    t.meta.emplace_back("result", ok ? "pass" : "fail");
    emit(t.render(o.format), o.out);
    if (!ok) std::fprintf(stderr, "validation failed\n");
    return ok ? kOk : kValidation;
}

int cmd_bath(const Options& o) {
    ConfigPtr c = load_config(o.config);
    qbm_params p;
    check(qbm_config_params(c.get(), &p));
    const long n_modes = cfg_int(c.get(), "n_modes", 2000);
    const double nu_max = cfg_double(c.get(), "nu_max", 50.0 * p.omega0);
    const double t_max = cfg_double(c.get(), "t_max", 20.0 / p.omega0);
    const double dt = cfg_double(c.get(), "dt_step", 0.05 / p.omega0);
    if (n_modes < 2 || n_modes > 20000) config_error("n_modes must be in [2, 20000]");
    if (!(t_max > 0.0)) config_error("t_max must be > 0");
    if (!(dt > 0.0)) config_error("dt_step must be > 0");
    qbm_bath* braw = nullptr;
    check(qbm_bath_create(&p, static_cast<int>(n_modes), nu_max, 1, &braw));
    std::unique_ptr<qbm_bath, decltype(&qbm_bath_free)> b(braw, qbm_bath_free);
    std::vector<double> times;
    const long steps = static_cast<long>(std::floor(t_max / dt + 1e-9));
    for (long i = 0; i <= steps; ++i) times.push_back(i * dt);
    qbm_trace* traw = nullptr;
    check(qbm_bath_trace(b.get(), times.data(), times.size(), 1e-6, thread_count(c.get(), o), &traw));
    TracePtr tr(traw, qbm_trace_free);
    Table t;
    t.meta.emplace_back("command", "bath-sim");
    t.add_params(p);
    t.meta.emplace_back("n_modes", std::to_string(n_modes));
    t.meta.emplace_back("nu_max", num(nu_max));
    t.meta.emplace_back("dt_step", num(dt));
    t.meta.emplace_back("recurrence_time", num(qbm_bath_recurrence_time(b.get())));
    t.add_trace(tr.get());
    emit(t.render(o.format), o.out);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact correlators and energies of a harmonic particle quenched into a Lorentzian reservoir"};
    app.require_subcommand(1);
    Options o;
    auto add_common = [&](CLI::App* sub, bool with_config_required) {
        auto* opt = sub->add_option("--config", o.config, "flat key = value parameter file");
        if (with_config_required) opt->required();
        sub->add_option("--out", o.out, "output path (default stdout)");
        sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--threads", o.threads, "worker threads (0 = hardware)");
    };
    auto* roots = app.add_subcommand("roots", "roots and residues of the response function");
    add_common(roots, true);
    auto* trace = app.add_subcommand("trace", "energy and variance time traces");
    add_common(trace, true);
    auto* grid = app.add_subcommand("grid", "late-time quantities over an (eta_0, eta_r) grid");
    add_common(grid, true);
    auto* validate = app.add_subcommand("validate", "closed forms against quadrature and reservoir oracles");
    add_common(validate, false);
    validate->add_option("--level", o.level, "fast or full")->check(CLI::IsMember({"fast", "full"}));
    validate->add_flag("--inject-corrupt-spectral", o.corrupt_spectral, "negative control: perturb one residue")
        ->group("");
    auto* bath = app.add_subcommand("bath-sim", "discrete-reservoir microscopic simulation");
    add_common(bath, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }
    try {
        if (roots->parsed()) return cmd_roots(o);
        if (trace->parsed()) return cmd_trace(o);
        if (grid->parsed()) return cmd_grid(o);
        if (validate->parsed()) return cmd_validate(o);
        if (bath->parsed()) return cmd_bath(o);
    } catch (const Failure& f) {
        std::fprintf(stderr, "%s\n", f.message.c_str());
        return f.exit_code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return kInternal;
    }
    return kInternal;
}
