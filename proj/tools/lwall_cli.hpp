#pragma once

// Command-line front end. run() is separate from main() so the tests can drive
// it in-process.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lwall/errors.hpp"
#include "lwall/landau.hpp"
#include "lwall/oracle.hpp"
#include "lwall/spectrum.hpp"
#include "lwall/weyl.hpp"

namespace lwall::cli {

using Json = nlohmann::ordered_json;
using Cell = std::variant<std::monostate, long long, double, std::string, bool>;

struct Table {
    std::string command;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    Json meta = Json::object();
};

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string cell_text(const Cell& c) {
    struct V {
        std::string operator()(std::monostate) const { return ""; }
        std::string operator()(long long v) const { return std::to_string(v); }
        std::string operator()(double v) const { return format_double(v); }
        std::string operator()(const std::string& v) const { return v; }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
    };
    return std::visit(V{}, c);
}

inline Json cell_json(const Cell& c) {
    struct V {
        Json operator()(std::monostate) const { return nullptr; }
        Json operator()(long long v) const { return v; }
        Json operator()(double v) const { return std::isfinite(v) ? Json(v) : Json(nullptr); }
        Json operator()(const std::string& v) const { return v; }
        Json operator()(bool v) const { return v; }
    };
    return std::visit(V{}, c);
}

inline void write_csv(const Table& t, std::ostream& os) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
        os << '\n';
    }
}

inline void write_json(const Table& t, std::ostream& os) {
    Json j;
    j["command"] = t.command;
    j["meta"] = t.meta;
    Json rows = Json::array();
    for (const auto& row : t.rows) {
        Json r = Json::object();
        for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = cell_json(row[i]);
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    os << j.dump(2) << '\n';
}

template <class T>
Cell opt_cell(const std::optional<T>& v) {
    if (!v) return std::monostate{};
    if constexpr (std::is_integral_v<T>) return static_cast<long long>(*v);
    else return static_cast<double>(*v);
}

struct RunConfig {
    double B = 1.0;
    double a = 1.1;
    double alpha = -1.0;
    std::string condition = "paper";
    std::string format = "csv";
    double term_tol = 1e-12;
    double root_tol = 1e-10;
    int n_max_cap = 20000;
    std::string out;

    Params params() const {
        Params p{B, a, alpha};
        p.validate();
        return p;
    }
    WeylSettings weyl() const {
        WeylSettings w;
        w.term_tol = term_tol;
        w.n_max_cap = n_max_cap;
        w.validate();
        return w;
    }
    SolveOptions solve() const {
        SolveOptions s;
        s.root_tol = root_tol;
        s.validate();
        return s;
    }
    ScalarCondition cond() const {
        return condition == "bs" ? ScalarCondition::BirmanSchwinger : ScalarCondition::PaperForm;
    }
    Json meta() const {
        Json j;
        j["B"] = B;
        j["a"] = a;
        j["alpha"] = alpha;
        j["condition"] = condition;
        j["term_tol"] = term_tol;
        j["root_tol"] = root_tol;
        j["n_max_cap"] = n_max_cap;
        return j;
    }
};

inline const std::vector<std::string>& record_columns() {
    static const std::vector<std::string> cols{"m",   "n_gap",        "E",      "shift",
                                               "predicted_shift", "c_nm", "multiplicity",
                                               "n_used", "residual"};
    return cols;
}

inline std::vector<Cell> record_row(const EigenvalueRecord& r) {
    return {static_cast<long long>(r.m),   static_cast<long long>(r.n_gap), r.E, r.shift,
            r.predicted_shift,             r.c_nm, static_cast<long long>(r.multiplicity),
            static_cast<long long>(r.n_used), r.residual};
}

inline Gap gap_for(const Params& p, int n_gap) {
    if (n_gap == below_lowest_gap) return Gap::below_lowest(p.B, lowest_search_floor(p));
    if (n_gap < 0) throw ConfigError("--gap must be >= 0, or -1 for the region below Lambda_0");
    return Gap::between(p.B, n_gap);
}

inline std::vector<double> linspace(double lo, double hi, int points) {
    if (points < 2) throw ConfigError("--points must be at least 2");
    if (!(hi > lo)) throw ConfigError("empty range");
    std::vector<double> xs(points);
    for (int i = 0; i < points; ++i) xs[i] = lo + (hi - lo) * i / (points - 1);
    return xs;
}

// Uniform grid with step `step` on [0, r_max] plus an extra exact point.
inline std::vector<double> grid_with_point(double r_max, double step, double extra) {
    std::vector<double> rs;
    const int n = static_cast<int>(std::floor(r_max / step + 1e-9));
    for (int i = 0; i <= n; ++i) rs.push_back(i * step);
    rs.push_back(extra);
    std::sort(rs.begin(), rs.end());
    rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
    return rs;
}

struct ProfileData {
    EigenvalueRecord record;
    std::vector<double> r;
    std::vector<double> value;
    int n_used = 0;
};

// Normalized wall-state profile of mode m in the gap (or below Lambda_0).
inline std::optional<ProfileData> wall_profile(const Params& p, int m, int n_gap,
                                               ScalarCondition cond, const WeylSettings& ws,
                                               const SolveOptions& so,
                                               const std::vector<double>& rs) {
    const auto rec = solve_mode(p, m, gap_for(p, n_gap), cond, ws, so);
    if (!rec) return std::nullopt;
    ProfileData d;
    d.record = *rec;
    const Energy E = Energy::near_level(rec->anchor, rec->shift);
    const double scale = profile_normalization(p, m, E, ws);
    for (double r : rs) {
        const auto w = green_profile(p, m, E, r, ws);
        d.r.push_back(r);
        d.value.push_back(scale * w.value);
        d.n_used = std::max(d.n_used, w.n_used);
    }
    return d;
}

inline std::string svg_polylines(const std::vector<std::pair<std::string, Table>>& series) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& [name, t] : series)
        for (const auto& row : t.rows) {
            const double x = std::get<double>(row[0]), y = std::get<double>(row[1]);
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) ymax = ymin + 1.0;
    const double W = 640, H = 400, pad = 40;
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    os << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << W - 2 * pad << "\" height=\""
       << H - 2 * pad << "\" fill=\"none\" stroke=\"#888\"/>\n";
    int k = 0;
    for (const auto& [name, t] : series) {
        os << "<polyline fill=\"none\" stroke=\"" << colors[k % 4] << "\" points=\"";
        for (const auto& row : t.rows) {
            const double x = std::get<double>(row[0]), y = std::get<double>(row[1]);
            os << pad + (x - xmin) / (xmax - xmin) * (W - 2 * pad) << ','
               << H - pad - (y - ymin) / (ymax - ymin) * (H - 2 * pad) << ' ';
        }
        os << "\"/>\n<text x=\"" << W - pad - 150 << "\" y=\"" << pad + 16 * (k + 1) << "\" fill=\""
           << colors[k % 4] << "\" font-size=\"12\">" << name << "</text>\n";
        ++k;
    }
    os << "</svg>\n";
    return os.str();
}

class App {
public:
    App(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

    int run(int argc, const char* const* argv) {
        CLI::App app{"Landau Hamiltonian with a circular delta wall", "lwall"};
        app.require_subcommand(1);
        app.set_config("--config", "", "key=value file; command-line flags take precedence");
        app.add_option("--B", cfg_.B, "field strength")->capture_default_str();
        app.add_option("--a", cfg_.a, "wall radius")->capture_default_str();
        app.add_option("--alpha", cfg_.alpha, "coupling")->capture_default_str();
        app.add_option("--condition", cfg_.condition, "scalar condition")
            ->check(CLI::IsMember({"paper", "bs"}))
            ->capture_default_str();
        app.add_option("--format", cfg_.format, "output format")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
        app.add_option("--term-tol", cfg_.term_tol, "Weyl series term tolerance")->capture_default_str();
        app.add_option("--root-tol", cfg_.root_tol, "root tolerance in ln|E - Lambda|")
            ->capture_default_str();
        app.add_option("--n-max-cap", cfg_.n_max_cap, "Weyl series term cap")->capture_default_str();
        app.add_option("--out", cfg_.out, "output file (directory for figure)");

        std::function<Table()> action;
        std::function<void()> figure_action;
        auto sub = [&](const char* name, const char* help) {
            auto* s = app.add_subcommand(name, help);
            s->fallthrough();
            return s;
        };

        int n_max = 3;
        auto* levels = sub("levels", "Landau levels");
        levels->add_option("--n-max", n_max)->capture_default_str();
        levels->callback([&] { action = [&] { return cmd_levels(n_max); }; });

        int n = 0;
        std::optional<int> m_opt;
        int m_max = 10;
        auto* coeff = sub("coeff", "boundary coefficients c_{n,m}");
        coeff->add_option("--n", n)->capture_default_str();
        coeff->add_option("--m", m_opt);
        coeff->add_option("--m-max", m_max)->capture_default_str();
        coeff->callback([&] { action = [&] { return cmd_coeff(n, m_opt, m_max); }; });

        int m = 0;
        std::optional<double> E_opt;
        double e_min = -2.0, e_max = 0.9;
        int points = 101;
        auto* mu_cmd = sub("mu", "Weyl coefficient mu_m(E)");
        mu_cmd->add_option("--m", m)->capture_default_str();
        mu_cmd->add_option("--E", E_opt);
        mu_cmd->add_option("--E-min", e_min)->capture_default_str();
        mu_cmd->add_option("--E-max", e_max)->capture_default_str();
        mu_cmd->add_option("--points", points)->capture_default_str();
        mu_cmd->callback([&] { action = [&] { return cmd_mu(m, E_opt, e_min, e_max, points); }; });

        int gap = 0;
        auto* solve = sub("solve", "eigenvalue of one mode in one gap");
        solve->add_option("--m", m)->capture_default_str();
        solve->add_option("--gap", gap, "lower level index, -1 for below Lambda_0")->capture_default_str();
        solve->callback([&] { action = [&] { return cmd_solve(m, gap); }; });

        double stop_tol = 0.0;
        int m_cap = 400;
        auto* clus = sub("cluster", "eigenvalues accumulating at Lambda_n");
        clus->add_option("--n", n)->capture_default_str();
        clus->add_option("--stop-tol", stop_tol, "default 1e-13 B");
        clus->add_option("--m-cap", m_cap)->capture_default_str();
        clus->callback([&] { action = [&] { return cmd_cluster(n, stop_tol, m_cap); }; });

        std::optional<double> r_max;
        auto* prof = sub("profile", "normalized wall-state radial profile");
        prof->add_option("--m", m)->capture_default_str();
        prof->add_option("--gap", gap)->capture_default_str();
        prof->add_option("--r-max", r_max);
        prof->add_option("--points", points)->capture_default_str();
        prof->callback([&] { action = [&] { return cmd_profile(m, gap, r_max, points); }; });

        auto* dens = sub("density", "radial probability 2 pi r |psi_{n,m}|^2");
        dens->add_option("--n", n)->capture_default_str();
        dens->add_option("--m", m)->capture_default_str();
        dens->add_option("--r-max", r_max);
        dens->add_option("--points", points)->capture_default_str();
        dens->callback([&] { action = [&] { return cmd_density(n, m, r_max, points); }; });

        auto* res = sub("resonance", "resonant angular momentum and radii");
        res->add_option("--n", n)->capture_default_str();
        res->callback([&] { action = [&] { return cmd_resonance(n); }; });

        auto* sr = sub("special-radii", "radii where c_{n,m} vanishes");
        sr->add_option("--n", n)->capture_default_str();
        sr->add_option("--m", m)->capture_default_str();
        sr->callback([&] { action = [&] { return cmd_special_radii(n, m); }; });

        std::optional<double> e_cut;
        int count = 5;
        int n_target = 1;
        auto* orc = sub("oracle", "finite-difference channel eigenvalues");
        orc->add_option("--m", m)->capture_default_str();
        orc->add_option("--E-cut", e_cut, "default Lambda_{n_target} + B");
        orc->add_option("--count", count)->capture_default_str();
        orc->add_option("--n-target", n_target)->capture_default_str();
        orc->callback([&] { action = [&] { return cmd_oracle(m, e_cut, count, n_target); }; });

        int audit_m_max = 5;
        auto* aud = sub("audit", "compare both scalar conditions with the oracle");
        aud->add_option("--m-max", audit_m_max)->capture_default_str();
        aud->add_option("--gap", gap)->capture_default_str();
        aud->callback([&] { action = [&] { return cmd_audit(audit_m_max, gap); }; });

        double b_max = 0.2, b_step = 0.01;
        auto* sb = sub("small-b", "lowest bound state as B -> 0 (oracle)");
        sb->add_option("--m", m)->capture_default_str();
        sb->add_option("--B-max", b_max)->capture_default_str();
        sb->add_option("--B-step", b_step)->capture_default_str();
        sb->callback([&] { action = [&] { return cmd_small_b(m, b_max, b_step); }; });

        std::string fig_name;
        bool svg = false;
        int fig_m_max = 15;
        auto* fig = sub("figure", "figure data files");
        fig->add_option("name", fig_name)
            ->required()
            ->check(CLI::IsMember({"eig-gap", "free-vs-wall", "resonance"}));
        fig->add_flag("--svg", svg, "also write a line-plot SVG");
        fig->add_option("--m-max", fig_m_max, "eig-gap modes 0..m-max")->capture_default_str();
        fig->callback([&] { figure_action = [&] { cmd_figure(fig_name, svg, fig_m_max); }; });

        try {
            app.parse(argc, argv);
        } catch (const CLI::CallForHelp&) {
            out_ << app.help();
            return 0;
        } catch (const CLI::CallForAllHelp&) {
            out_ << app.help("", CLI::AppFormatMode::All);
            return 0;
        } catch (const CLI::ParseError& e) {
            err_ << "error: " << e.what() << "\n\n" << app.help();
            return 2;
        }

        try {
            cfg_.params();
            cfg_.weyl();
            cfg_.solve();
            if (figure_action) {
                figure_action();
            } else if (action) {
                emit(action());
            }
        } catch (const ConvergenceError& e) {
            err_ << "error: " << e.what() << " (last term " << format_double(e.last_term()) << ")\n";
            return 3;
        } catch (const ConfigError& e) {
            err_ << "error: " << e.what() << '\n';
            return 2;
        } catch (const DomainError& e) {
            err_ << "error: " << e.what() << '\n';
            return 2;
        } catch (const PoleError& e) {
            err_ << "error: " << e.what() << '\n';
            return 2;
        } catch (const std::exception& e) {
            err_ << "error: " << e.what() << '\n';
            return 1;
        }
        return 0;
    }

private:
    void emit(const Table& t) {
        if (cfg_.out.empty()) {
            write(t, out_);
            return;
        }
        std::ofstream f(cfg_.out, std::ios::binary);
        if (!f) throw ConfigError("cannot open " + cfg_.out);
        write(t, f);
    }

    void write(const Table& t, std::ostream& os) const {
        if (cfg_.format == "json")
            write_json(t, os);
        else
            write_csv(t, os);
    }

    Table make(const std::string& command, std::vector<std::string> cols) const {
        Table t;
        t.command = command;
        t.columns = std::move(cols);
        t.meta = cfg_.meta();
        return t;
    }

    Table cmd_levels(int n_max) {
        if (n_max < 0) throw ConfigError("--n-max must be >= 0");
        Table t = make("levels", {"n", "E"});
        for (int k = 0; k <= n_max; ++k)
            t.rows.push_back({static_cast<long long>(k), landau_level(cfg_.B, k)});
        return t;
    }

    Table cmd_coeff(int n, const std::optional<int>& m_opt, int m_max) {
        require_level(n);
        const Params p = cfg_.params();
        Table t = make("coeff", {"n", "m", "c_nm", "log_c_nm", "c_asymptotic"});
        std::vector<int> ms;
        if (m_opt) {
            ms.push_back(*m_opt);
        } else {
            if (m_max < 0) throw ConfigError("--m-max must be >= 0");
            for (int k = 0; k <= m_max; ++k) ms.push_back(k);
        }
        for (int mm : ms) {
            const SignedLog c = boundary_coeff(p.B, p.a, n, mm);
            const SignedLog ca = boundary_coeff_asymptotic(p.B, p.a, n, mm);
            t.rows.push_back({static_cast<long long>(n), static_cast<long long>(mm), c.to_real(),
                              c.is_zero() ? Cell{} : Cell{c.log_abs}, ca.to_real()});
        }
        return t;
    }

    Table cmd_mu(int m, const std::optional<double>& E, double lo, double hi, int points) {
        const Params p = cfg_.params();
        const WeylSettings ws = cfg_.weyl();
        Table t = make("mu", {"E", "mu", "n_used", "tail_bound"});
        const std::vector<double> es = E ? std::vector<double>{*E} : linspace(lo, hi, points);
        for (double e : es) {
            const auto v = mu(p, m, e, ws);
            t.rows.push_back({e, v.value, static_cast<long long>(v.n_used), v.tail_bound});
        }
        t.meta["m"] = m;
        return t;
    }

    Table cmd_solve(int m, int gap) {
        const Params p = cfg_.params();
        Table t = make("solve", record_columns());
        if (auto r = solve_mode(p, m, gap_for(p, gap), cfg_.cond(), cfg_.weyl(), cfg_.solve()))
            t.rows.push_back(record_row(*r));
        t.meta["gap"] = gap;
        return t;
    }

    Table cmd_cluster(int n, double stop_tol, int m_cap) {
        const Params p = cfg_.params();
        ClusterOptions co;
        co.stop_tol = stop_tol;
        co.m_cap = m_cap;
        if (stop_tol < 0.0) throw ConfigError("--stop-tol must be >= 0");
        Table t = make("cluster", record_columns());
        for (const auto& r : cluster(p, n, cfg_.cond(), cfg_.weyl(), co, cfg_.solve()))
            t.rows.push_back(record_row(r));
        t.meta["n"] = n;
        t.meta["multiplicity_model"] = "paper model: mu depends on |m|, so m and -m pair up";
        return t;
    }

    Table cmd_profile(int m, int gap, const std::optional<double>& r_max, int points) {
        const Params p = cfg_.params();
        const double R = r_max.value_or(p.a + 6.0 / std::sqrt(p.B));
        Table t = make("profile", {"r", "value"});
        const auto d = wall_profile(p, m, gap, cfg_.cond(), cfg_.weyl(), cfg_.solve(),
                                    linspace(0.0, R, points));
        t.meta["m"] = m;
        t.meta["gap"] = gap;
        if (!d) {
            t.meta["E"] = nullptr;
            return t;
        }
        for (std::size_t i = 0; i < d->r.size(); ++i) t.rows.push_back({d->r[i], d->value[i]});
        t.meta["E"] = d->record.E;
        t.meta["shift"] = d->record.shift;
        t.meta["n_used"] = d->n_used;
        return t;
    }

    Table cmd_density(int n, int m, const std::optional<double>& r_max, int points) {
        require_level(n);
        require_field(cfg_.B);
        const double R = r_max.value_or(3.0 * std::sqrt((2.0 * n + 2.0 * std::abs(m) + 2.0) / cfg_.B));
        Table t = make("density", {"r", "value"});
        for (double r : linspace(0.0, R, points))
            t.rows.push_back({r, radial_probability(cfg_.B, n, m, r)});
        t.meta["n"] = n;
        t.meta["m"] = m;
        t.meta["peak_radius"] = peak_radius(cfg_.B, n, m);
        return t;
    }

    Table cmd_resonance(int n) {
        const Params p = cfg_.params();
        const ResonanceIndex ri = resonance_index(p.B, p.a, n);
        Table t = make("resonance",
                       {"n", "m_star", "m_nearest", "cyclotron_radius", "peak_radius_nearest"});
        t.rows.push_back({static_cast<long long>(n), ri.value, static_cast<long long>(ri.nearest),
                          cyclotron_radius(p.B, n), peak_radius(p.B, n, ri.nearest)});
        return t;
    }

    Table cmd_special_radii(int n, int m) {
        require_field(cfg_.B);
        Table t = make("special-radii", {"k", "a"});
        const auto radii = special_radii(cfg_.B, n, m);
        for (std::size_t k = 0; k < radii.size(); ++k)
            t.rows.push_back({static_cast<long long>(k), radii[k]});
        t.meta["n"] = n;
        t.meta["m"] = m;
        return t;
    }

    Table cmd_oracle(int m, const std::optional<double>& e_cut, int count, int n_target) {
        const Params p = cfg_.params();
        if (count < 1) throw ConfigError("--count must be >= 1");
        const OracleGrid g = OracleGrid::standard(p, n_target);
        const OracleGrid g2 = g.refined();
        const double cut = e_cut.value_or(landau_level(p.B, n_target) + p.B);
        const auto e1 = eigenvalues_below(build_channel(p, m, g), cut, count);
        const auto e2 = eigenvalues_below(build_channel(p, m, g2), cut, count);
        Table t = make("oracle", {"m", "k", "E_coarse", "E_fine", "E_extrapolated"});
        const std::size_t K = std::max(e1.size(), e2.size());
        for (std::size_t k = 0; k < K; ++k) {
            const Cell c1 = k < e1.size() ? Cell{e1[k]} : Cell{};
            const Cell c2 = k < e2.size() ? Cell{e2[k]} : Cell{};
            const Cell ex = (k < e1.size() && k < e2.size() && e1.size() == e2.size())
                                ? Cell{richardson(e1[k], e2[k], g.h, g2.h)}
                                : Cell{};
            t.rows.push_back({static_cast<long long>(m), static_cast<long long>(k), c1, c2, ex});
        }
        t.meta["h"] = g.h;
        t.meta["h_refined"] = g2.h;
        t.meta["R_max"] = g.R_max;
        return t;
    }

    Table cmd_audit(int m_max, int gap) {
        const Params p = cfg_.params();
        if (m_max < 0) throw ConfigError("--m-max must be >= 0");
        std::vector<int> ms;
        for (int k = 0; k <= m_max; ++k) ms.push_back(k);
        const Gap g = gap_for(p, gap);
        const AuditReport rep = channel_audit(p, ms, g, cfg_.weyl());
        Table t = make("audit", {"m", "oracle_count", "oracle_E", "paper_E", "bs_E", "paper_diff",
                                 "bs_diff", "paper_match", "bs_match", "mirror_E", "mirror_diff"});
        for (const auto& e : rep.entries) {
            const Cell oe = e.oracle.empty() ? Cell{} : Cell{e.oracle.front()};
            const Cell me = e.mirror_oracle.empty() ? Cell{} : Cell{e.mirror_oracle.front()};
            t.rows.push_back({static_cast<long long>(e.m), static_cast<long long>(e.oracle.size()), oe,
                              opt_cell(e.paper), opt_cell(e.bs), opt_cell(e.paper_diff),
                              opt_cell(e.bs_diff), e.paper_match, e.bs_match, me,
                              opt_cell(e.mirror_diff)});
        }
        t.meta["gap"] = gap;
        t.meta["tolerance"] = rep.tolerance;
        t.meta["h"] = rep.h;
        t.meta["h_refined"] = rep.h_refined;
        t.meta["matching_form"] = rep.matching_form();
        return t;
    }

    Table cmd_small_b(int m, double b_max, double b_step) {
        if (!(b_step > 0.0) || !(b_max >= b_step)) throw ConfigError("bad B range");
        std::vector<double> Bs;
        for (int k = 1; k * b_step <= b_max * (1 + 1e-12); ++k) Bs.push_back(k * b_step);
        const SmallBTrack tr = small_b_track(cfg_.a, cfg_.alpha, m, Bs);
        Table t = make("small-b", {"B", "E", "E_mirror"});
        for (const auto& pt : tr.points) t.rows.push_back({pt.B, opt_cell(pt.E), opt_cell(pt.E_mirror)});
        t.meta["m"] = m;
        t.meta["E0"] = tr.E0 ? Json(*tr.E0) : Json(nullptr);
        t.meta["quadratic_coeff"] = tr.quadratic_coeff;
        t.meta["worst_drop"] = tr.worst_drop();
        t.meta["h"] = tr.h;
        t.meta["R_max"] = tr.R_max;
        return t;
    }

    void write_file(const std::filesystem::path& path, const Table& t) {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw ConfigError("cannot open " + path.string());
        write(t, f);
        out_ << path.string() << '\n';
    }

    void write_svg(const std::filesystem::path& path,
                   const std::vector<std::pair<std::string, Table>>& series) {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw ConfigError("cannot open " + path.string());
        f << svg_polylines(series);
        out_ << path.string() << '\n';
    }

    void cmd_figure(const std::string& name, bool svg, int m_max) {
        const std::filesystem::path dir = cfg_.out.empty() ? "." : cfg_.out;
        std::filesystem::create_directories(dir);
        const std::string ext = cfg_.format == "json" ? ".json" : ".csv";
        const WeylSettings ws = cfg_.weyl();
        const SolveOptions so = cfg_.solve();
        std::vector<std::pair<std::string, Table>> series;

        if (name == "eig-gap") {
            if (m_max < 0) throw ConfigError("--m-max must be >= 0");
            for (double alpha : {-0.5, -1.0, -1.5}) {
                const Params p{1.0, 1.1, alpha};
                Table t = make("figure eig-gap", {"m", "E"});
                t.meta["B"] = 1.0;
                t.meta["a"] = 1.1;
                t.meta["alpha"] = alpha;
                for (int m = 0; m <= m_max; ++m)
                    if (auto r = solve_mode(p, m, Gap::between(1.0, 0), cfg_.cond(), ws, so))
                        t.rows.push_back({static_cast<long long>(m), r->E});
                char buf[64];
                std::snprintf(buf, sizeof buf, "eig-gap_alpha%+.1f", alpha);
                write_file(dir / (std::string(buf) + ext), t);
                Table plot = t;
                for (auto& row : plot.rows) row[0] = static_cast<double>(std::get<long long>(row[0]));
                series.emplace_back(buf, plot);
            }
            if (svg) write_svg(dir / "eig-gap.svg", series);
            return;
        }

        if (name == "free-vs-wall") {
            const Params p{1.0, std::sqrt(3.0), -3.0};
            const int m = 1;
            const auto rs = linspace(0.0, 6.0, 601);
            Table free = make("figure free-vs-wall", {"r", "value"});
            free.meta["B"] = p.B;
            free.meta["a"] = p.a;
            free.meta["alpha"] = 0.0;
            free.meta["m"] = m;
            for (double r : rs) free.rows.push_back({r, eigenfunction_radial(p.B, 0, m, r)});
            write_file(dir / ("free-vs-wall_free" + ext), free);
            series.emplace_back("free", free);

            // lowest wall state of the mode
            auto d = wall_profile(p, m, below_lowest_gap, cfg_.cond(), ws, so, rs);
            if (!d) d = wall_profile(p, m, 0, cfg_.cond(), ws, so, rs);
            if (!d) throw ConvergenceError("no wall bound state for the free-vs-wall figure", 0.0);
            Table wall = make("figure free-vs-wall", {"r", "value"});
            wall.meta["B"] = p.B;
            wall.meta["a"] = p.a;
            wall.meta["alpha"] = p.alpha;
            wall.meta["m"] = m;
            wall.meta["E"] = d->record.E;
            wall.meta["n_used"] = d->n_used;
            for (std::size_t i = 0; i < d->r.size(); ++i) wall.rows.push_back({d->r[i], d->value[i]});
            write_file(dir / ("free-vs-wall_wall" + ext), wall);
            series.emplace_back("wall", wall);
            if (svg) write_svg(dir / "free-vs-wall.svg", series);
            return;
        }

        // resonance
        const double B = 1.0, a = 3.0;
        for (int m : {3, 4}) {
            const double peak = peak_radius(B, 0, m);
            const double top = radial_probability(B, 0, m, peak);
            Table t = make("figure resonance", {"r", "value"});
            t.meta["B"] = B;
            t.meta["a"] = a;
            t.meta["n"] = 0;
            t.meta["m"] = m;
            t.meta["peak_radius"] = peak;
            for (double r : grid_with_point(8.0, 0.01, peak))
                t.rows.push_back({r, radial_probability(B, 0, m, r) / top});
            write_file(dir / ("resonance_m" + std::to_string(m) + ext), t);
            series.emplace_back("m=" + std::to_string(m), t);
        }
        if (svg) write_svg(dir / "resonance.svg", series);
    }

    std::ostream& out_;
    std::ostream& err_;
    RunConfig cfg_;
};

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    App app(out, err);
    return app.run(argc, argv);
}

}  // namespace lwall::cli
