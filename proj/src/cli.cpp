#include "lambdaprop/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lambdaprop/analysis.hpp"
#include "lambdaprop/config_io.hpp"
#include "lambdaprop/numeric.hpp"
#include "parallel.hpp"

namespace lambdaprop {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_config:
        case ErrorKind::edge_amplitude_too_large:
        case ErrorKind::io:
            return kExitConfig;
        default:
            return kExitSolver;
    }
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw Error(ErrorKind::io, "cannot create output directory " + dir.string());
}

class CsvWriter {
public:
    CsvWriter(const fs::path& path, std::string_view header) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
        buffer_.append(header);
        buffer_.push_back('\n');
    }

    CsvWriter& field(double v) { return field(format_double(v)); }
    CsvWriter& field(std::string_view s) {
        if (!at_row_start_) buffer_.push_back(',');
        buffer_.append(s);
        at_row_start_ = false;
        return *this;
    }
    CsvWriter& field(int v) { return field(std::to_string(v)); }
    CsvWriter& field(const std::optional<double>& v) { return field(v ? *v : std::nan("")); }

    void end_row() {
        buffer_.push_back('\n');
        at_row_start_ = true;
        if (buffer_.size() > (1u << 20)) flush();
    }

    void close() {
        flush();
        out_.close();
        if (!out_) throw Error(ErrorKind::io, "write failed for " + path_.string());
    }

private:
    void flush() {
        out_.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
        buffer_.clear();
    }

    fs::path path_;
    std::ofstream out_;
    std::string buffer_;
    bool at_row_start_ = true;
};

void write_json(const fs::path& path, const ordered_json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
}

ordered_json json_number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json json_optional(const std::optional<double>& v) { return v ? json_number(*v) : ordered_json(nullptr); }

ordered_json config_json(const SimulationConfig& c) {
    ordered_json j;
    j["omega_p_max"] = c.omega_p_max;
    j["omega_s_max"] = c.omega_s_max;
    j["t_p"] = c.t_p;
    j["t_s"] = c.t_s;
    j["tau_delay"] = c.tau_delay;
    j["delta"] = c.delta;
    j["gamma"] = c.gamma;
    j["phase_p"] = c.phase_p;
    j["phase_s"] = c.phase_s;
    j["length"] = c.length;
    j["n_tau"] = c.n_tau;
    j["n_eta"] = c.eta_steps();
    j["tau_window"] = {c.tau_window.min, c.tau_window.max};
    return j;
}

ordered_json limits_json(const LimitsReport& r) {
    ordered_json j;
    j["eta_max"] = json_number(r.eta_max);
    j["tau_max"] = json_optional(r.tau_max);
    j["tau_max_unbounded"] = r.tau_max_unbounded;
    j["tau_delay_medium"] = json_number(r.tau_delay_medium);
    j["tau_delay_small_angle"] = json_number(r.tau_delay_small_angle);
    j["shock_ratio"] = json_number(r.shock_ratio);
    j["shock_ratio_small_angle"] = json_number(r.shock_ratio_small_angle);
    j["reshaping_ratio"] = json_number(r.reshaping_ratio);
    j["abs_delta_t"] = json_number(r.abs_delta_t);
    j["stark_ratio"] = json_number(r.stark_ratio);
    j["loss_ratio"] = json_number(r.loss_ratio);
    j["loss_ratio_small_angle"] = json_number(r.loss_ratio_small_angle);
    return j;
}

// Limits need Δ > 0; otherwise the summary records why they are missing.
void add_limits(ordered_json& j, const SimulationConfig& config) {
    try {
        j["limits"] = limits_json(limits(config));
    } catch (const Error& e) {
        j["limits"] = nullptr;
        j["limits_error"] = e.what();
    }
}

void write_fields_csv(const fs::path& path, const FieldGrid& f) {
    CsvWriter w(path, "eta,tau,re_op,im_op,re_os,im_os");
    for (std::size_t n = 0; n < f.n_eta(); ++n) {
        for (std::size_t j = 0; j < f.n_tau(); ++j) {
            const cplx p = f.pump(n, j);
            const cplx s = f.stokes(n, j);
            w.field(f.eta()[n]).field(f.tau()[j]).field(p.real()).field(p.imag()).field(s.real()).field(s.imag());
            w.end_row();
        }
    }
    w.close();
}

void write_populations_csv(const fs::path& path, const FieldGrid& f, const StateGrid& states) {
    CsvWriter w(path, "eta,tau,p1,p2,p3");
    for (std::size_t n = 0; n < f.n_eta(); ++n) {
        for (std::size_t j = 0; j < f.n_tau(); ++j) {
            const auto& a = states.at(n, j);
            w.field(f.eta()[n]).field(f.tau()[j]).field(std::norm(a.a1)).field(std::norm(a.a2)).field(std::norm(a.a3));
            w.end_row();
        }
    }
    w.close();
}

void write_projections_csv(const fs::path& path, const FieldGrid& f, const std::vector<DressedSeries>& series) {
    CsvWriter w(path, "eta,tau,pb1,pb2,pd");
    for (std::size_t n = 0; n < f.n_eta(); ++n) {
        for (std::size_t j = 0; j < f.n_tau(); ++j) {
            w.field(f.eta()[n]).field(f.tau()[j]).field(series[n].pb1[j]).field(series[n].pb2[j]).field(series[n].pd[j]);
            w.end_row();
        }
    }
    w.close();
}

void write_compare_csv(const fs::path& path, const std::vector<TransferSummary>& rows) {
    CsvWriter w(path, "eta,final_p1,final_p2,final_p3,peak_p2,max_pd,sup_p3_difference,horizon_tau,analytic_error");
    for (const auto& t : rows) {
        w.field(t.eta).field(t.final_p1).field(t.final_p2).field(t.final_p3).field(t.peak_p2).field(t.max_pd);
        w.field(t.sup_p3_difference).field(t.horizon_tau).field(t.analytic_error);
        w.end_row();
    }
    w.close();
}

std::vector<std::string> split_values(const std::string& list) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(list);
    while (std::getline(in, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        item = (b == std::string::npos) ? std::string() : item.substr(b, e - b + 1);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

void cmd_simulate(const fs::path& config_path, const fs::path& output_dir) {
    const auto start = Clock::now();
    const SimulationConfig config = load_config(config_path);
    ensure_dir(output_dir);

    const auto t0 = Clock::now();
    const Propagation run = propagate(config);
    const double propagate_s = seconds_since(t0);
    const auto series = dressed_series(run);

    write_fields_csv(output_dir / "fields.csv", run.fields);
    write_populations_csv(output_dir / "populations.csv", run.fields, run.states);
    write_projections_csv(output_dir / "projections.csv", run.fields, series);

    ordered_json j;
    j["command"] = "simulate";
    j["config"] = config_json(config);
    const auto& exit_state = run.states.slice(run.fields.n_eta() - 1).back();
    j["final_p1"] = std::norm(exit_state.a1);
    j["final_p2"] = std::norm(exit_state.a2);
    j["final_p3"] = std::norm(exit_state.a3);
    ordered_json slices = ordered_json::array();
    for (std::size_t n = 0; n < run.fields.n_eta(); ++n) {
        const auto states = run.states.slice(n);
        double peak_p2 = 0.0;
        for (const auto& s : states) peak_p2 = std::max(peak_p2, std::norm(s.a2));
        const auto& last = states.back();
        slices.push_back({{"eta", run.fields.eta()[n]},
                          {"final_p1", std::norm(last.a1)},
                          {"final_p2", std::norm(last.a2)},
                          {"final_p3", std::norm(last.a3)},
                          {"peak_p2", peak_p2},
                          {"max_pd", series[n].max_pd}});
    }
    j["slices"] = std::move(slices);
    add_limits(j, config);
    j["timings"] = {{"propagate_s", propagate_s}, {"total_s", seconds_since(start)}};
    write_json(output_dir / "summary.json", j);
}

std::vector<AnalyticRow> analytic_table(const SimulationConfig& config, const EntranceProfile& profile) {
    const Grid grid = build_grid(config);
    const std::size_t m = grid.tau.size();
    std::vector<AnalyticRow> rows(grid.eta.size() * m);
    detail::parallel_for(grid.eta.size(), [&](std::size_t n) {
        for (std::size_t j = 0; j < m; ++j) {
            AnalyticRow& r = rows[n * m + j];
            r.eta = grid.eta[n];
            r.tau = grid.tau[j];
            try {
                r.point = analytic_point(r.eta, r.tau, profile);
            } catch (const Error& e) {
                r.horizon = e.kind() == ErrorKind::adiabaticity_horizon;
                r.shock = e.kind() == ErrorKind::shock_detected;
                if (!r.horizon && !r.shock) throw;
            }
        }
    });
    return rows;
}

void write_analytic_csv(const fs::path& path, std::span<const AnalyticRow> rows) {
    CsvWriter w(path, "eta,tau,zeta,xi,psi,theta,phi,re_op,im_op,re_os,im_os,p1,p2,p3,near_shock,shock,horizon");
    const double nan = std::nan("");
    for (const auto& r : rows) {
        w.field(r.eta).field(r.tau);
        if (r.point) {
            const auto& p = *r.point;
            w.field(p.zeta).field(p.xi).field(p.psi).field(p.theta).field(p.phi);
            w.field(p.omega_p.real()).field(p.omega_p.imag()).field(p.omega_s.real()).field(p.omega_s.imag());
            w.field(p.p1).field(p.p2).field(p.p3).field(p.near_shock ? 1 : 0);
        } else {
            for (int k = 0; k < 12; ++k) w.field(nan);
            w.field(0);
        }
        w.field(r.shock ? 1 : 0).field(r.horizon ? 1 : 0);
        w.end_row();
    }
    w.close();
}

void cmd_analytic(const fs::path& config_path, const fs::path& output_dir) {
    const auto start = Clock::now();
    const SimulationConfig config = load_config(config_path);
    const EntranceProfile profile = EntranceProfile::from_config(config);
    ensure_dir(output_dir);

    const auto rows = analytic_table(config, profile);
    write_analytic_csv(output_dir / "analytic.csv", rows);

    ordered_json j;
    j["command"] = "analytic";
    j["config"] = config_json(config);
    ordered_json slices = ordered_json::array();
    const std::size_t m = static_cast<std::size_t>(config.n_tau);
    for (std::size_t k = 0; k < rows.size(); k += m) {
        std::optional<double> horizon;
        for (std::size_t i = k; i < k + m; ++i) {
            if (rows[i].horizon) {
                horizon = rows[i].tau;
                break;
            }
        }
        slices.push_back({{"eta", rows[k].eta}, {"horizon_tau", json_optional(horizon)}});
    }
    j["slices"] = std::move(slices);
    add_limits(j, config);
    j["timings"] = {{"total_s", seconds_since(start)}};
    write_json(output_dir / "summary.json", j);
}

void cmd_limits(const fs::path& config_path, std::ostream& out) {
    const SimulationConfig config = load_config(config_path);
    out << limits_json(limits(config)).dump(2) << '\n';
}

void cmd_compare(const fs::path& config_path, const fs::path& output_dir) {
    const auto start = Clock::now();
    const SimulationConfig config = load_config(config_path);
    ensure_dir(output_dir);
    const auto rows = compare(config);
    write_compare_csv(output_dir / "compare.csv", rows);

    ordered_json j;
    j["command"] = "compare";
    j["config"] = config_json(config);
    ordered_json slices = ordered_json::array();
    for (const auto& t : rows) {
        slices.push_back({{"eta", t.eta},
                          {"final_p3", t.final_p3},
                          {"sup_p3_difference", json_optional(t.sup_p3_difference)},
                          {"horizon_tau", json_optional(t.horizon_tau)}});
    }
    j["slices"] = std::move(slices);
    add_limits(j, config);
    j["timings"] = {{"total_s", seconds_since(start)}};
    write_json(output_dir / "summary.json", j);
}

void cmd_scan(const fs::path& config_path, const std::string& param, const std::vector<std::string>& values,
              const fs::path& output_dir, unsigned jobs) {
    const SimulationConfig base = load_config(config_path);
    if (!is_config_key(param)) throw Error(ErrorKind::invalid_config, "unknown scan parameter '" + param + "'");
    std::vector<SimulationConfig> configs;
    configs.reserve(values.size());
    for (const auto& v : values) {
        SimulationConfig c = base;
        apply_config_value(c, param, v);
        c.validate();
        configs.push_back(c);
    }
    ensure_dir(output_dir);

    struct Row {
        std::string status = "ok";
        TransferSummary exit;
        ReshapingSlice shape;
        int max_pump_peaks = 0;
    };
    std::vector<Row> rows(configs.size());
    detail::parallel_for(
        configs.size(),
        [&](std::size_t i) {
            try {
                const Propagation run = propagate(configs[i]);
                rows[i].exit = compare(run).back();
                const auto report = detect_reshaping(run.fields);
                rows[i].shape = report.slices.back();
                rows[i].max_pump_peaks = report.max_pump_peaks();
            } catch (const Error& e) {
                rows[i].status = std::string(to_string(e.kind()));
            }
        },
        std::max(1u, jobs));

    CsvWriter w(output_dir / "scan.csv",
                "value,status,eta,final_p1,final_p2,final_p3,peak_p2,max_pd,sup_p3_difference,horizon_tau,"
                "pump_peaks,stokes_peaks,max_pump_peaks,pump_tail_fraction,order_broken");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row& r = rows[i];
        const auto& t = r.exit;
        w.field(values[i]).field(r.status);
        w.field(t.eta).field(t.final_p1).field(t.final_p2).field(t.final_p3).field(t.peak_p2).field(t.max_pd);
        w.field(t.sup_p3_difference).field(t.horizon_tau);
        w.field(r.shape.pump_peaks).field(r.shape.stokes_peaks).field(r.max_pump_peaks);
        w.field(r.shape.pump_tail_fraction).field(r.shape.order_broken ? 1 : 0);
        w.end_row();
    }
    w.close();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pulse propagation in a three-level Lambda medium"};
    app.require_subcommand(1);

    std::string config;
    std::string output;
    std::string param;
    std::string values;
    unsigned jobs = 1;

    auto add_config = [&](CLI::App* sub) { sub->add_option("--config", config, "Config file")->required(); };
    auto add_output = [&](CLI::App* sub) { sub->add_option("--output", output, "Output directory")->required(); };

    auto* simulate = app.add_subcommand("simulate", "Numeric propagation: fields, populations, projections");
    add_config(simulate);
    add_output(simulate);
    auto* analytic = app.add_subcommand("analytic", "Characteristic solution on the config grid");
    add_config(analytic);
    add_output(analytic);
    auto* lim = app.add_subcommand("limits", "Validity limits as JSON on stdout");
    add_config(lim);
    auto* cmp = app.add_subcommand("compare", "Numeric versus characteristic populations per slice");
    add_config(cmp);
    add_output(cmp);
    auto* scan = app.add_subcommand("scan", "Run one config per parameter value");
    add_config(scan);
    add_output(scan);
    scan->add_option("--param", param, "Config key to vary")->required();
    scan->add_option("--values", values, "Comma-separated values")->required();
    scan->add_option("--jobs", jobs, "Concurrent runs")->check(CLI::PositiveNumber);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        if (simulate->parsed()) {
            cmd_simulate(config, output);
        } else if (analytic->parsed()) {
            cmd_analytic(config, output);
        } else if (lim->parsed()) {
            cmd_limits(config, out);
        } else if (cmp->parsed()) {
            cmd_compare(config, output);
        } else if (scan->parsed()) {
            cmd_scan(config, param, split_values(values), output, jobs);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    }
    return kExitOk;
}

}  // namespace lambdaprop
