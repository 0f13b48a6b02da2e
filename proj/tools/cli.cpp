// Copyright 2026 The cftrace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "cftrace/adversary.hpp"
#include "cftrace/bohm.hpp"
#include "cftrace/metrics.hpp"
#include "cftrace/networks.hpp"

namespace cftrace::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

using Cell = std::variant<std::monostate, std::string, long long, double>;

struct Table {
    Table() = default;
    explicit Table(std::vector<std::string> cols) : columns(std::move(cols)) {}

    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) {
        if (row.size() != columns.size()) throw std::logic_error("row width mismatch");
        rows.push_back(std::move(row));
    }
};

std::string format_double(double x) {
    if (x == 0) x = 0;  // no "-0"
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15e", x);
    return buf;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string to_csv(const Table& t) {
    std::ostringstream os;
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ",";
            std::visit(
                [&](const auto& v) {
                    using V = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<V, std::string>) os << csv_escape(v);
                    else if constexpr (std::is_same_v<V, long long>) os << v;
                    else if constexpr (std::is_same_v<V, double>) os << format_double(v);
                },
                row[i]);
        }
        os << "\n";
    }
    return os.str();
}

Json cell_json(const Cell& c) {
    return std::visit(
        [](const auto& v) -> Json {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, std::monostate>) return nullptr;
            else return v;
        },
        c);
}

std::string to_json(const Table& t, const std::string& command, const Json& config) {
    Json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = command;
    doc["config"] = config;
    doc["columns"] = t.columns;
    Json rows = Json::array();
    for (const auto& row : t.rows) {
        Json r = Json::object();
        for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = cell_json(row[i]);
        rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

void require_finite(const Table& t) {
    for (const auto& row : t.rows)
        for (std::size_t i = 0; i < row.size(); ++i)
            if (const double* d = std::get_if<double>(&row[i]); d && !std::isfinite(*d))
                throw std::runtime_error("non-finite value in column '" + t.columns[i] + "'");
}

/// Writes through a sibling temporary and renames, so a failed run leaves no
/// partial file behind.
void write_atomically(const fs::path& path, const std::string& data) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        f << data;
        f.flush();
        if (!f) {
            f.close();
            fs::remove(tmp);
            throw std::runtime_error("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot replace '" + path.string() + "': " + ec.message());
    }
}

PathId parse_path(const std::string& s) {
    const auto comma = s.find(',');
    try {
        if (comma == std::string::npos) return PathId{1, std::stoi(s)};
        return PathId{std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))};
    } catch (const std::exception&) {
        throw UsageError("bad path '" + s + "', expected m,n");
    }
}

struct Options {
    std::string kind = "zeno";
    int M = 0;
    int N = 0;
    int bit = 0;
    std::vector<std::string> elements;
    std::optional<double> t3;
    std::optional<double> delta;
    std::optional<double> width;
    std::optional<double> epsilon;
    std::string format = "csv";
    std::string output;
    int paths = 1;
    std::vector<int> Ms;
    std::vector<int> Ns;
    std::vector<double> epsilons;
    std::vector<int> bits;
    std::string detector;
    long long rounds = 1000;
    unsigned long long seed = 1;
    std::string eve_path;
    int eve_chain = 0;
    double eve_eps = 1.0;
    std::string eve_mode = "projective";
};

NetworkSpec make_spec(const Options& o, int M, int N, int bit) {
    NetworkSpec spec;
    spec.kind = parse_kind(o.kind);
    spec.M = M;
    spec.N = N;
    spec.bit = bit;
    spec.side_mirror_t3 = o.t3;
    for (const auto& e : o.elements) {
        const auto eq = e.find('=');
        if (eq == std::string::npos) throw UsageError("bad element '" + e + "', expected m,n=element");
        spec.elements[parse_path(e.substr(0, eq))] = parse_element(e.substr(eq + 1));
    }
    validate(spec);
    return spec;
}

ProbeModel make_probe(const Options& o, std::optional<double> eps_override = std::nullopt) {
    if (eps_override) return ProbeModel::from_epsilon(*eps_override);
    const bool shift = o.delta || o.width;
    if (shift && o.epsilon) throw UsageError("give either --delta/--Delta or --epsilon, not both");
    if (shift) {
        if (!o.delta || !o.width) throw UsageError("--delta and --Delta must be given together");
        return ProbeModel::from_shift(*o.delta, *o.width);
    }
    return ProbeModel::from_epsilon(o.epsilon.value_or(0.01));
}

void regime_check(int M, int N, double eps, std::ostream& err) {
    if (eps * std::max(M, N) > 0.3)
        err << "warning: eps*max(M,N) = " << eps * std::max(M, N)
            << " > 0.3; first-order trace results are outside their regime\n";
}

std::vector<std::string> report_columns() {
    return {"kind",          "M",           "N",           "bit",
            "epsilon",       "delta",       "detector",    "postselect_prob",
            "trace_detect_prob", "formula_trace", "shift_sum", "formula_shift",
            "n_paths",       "standard_detect", "standard_shift", "detect_ratio",
            "shift_ratio",   "verdict"};
}

Cell opt_cell(const std::optional<double>& v) { return v ? Cell(*v) : Cell(); }

std::vector<Cell> report_row(const TraceReport& r) {
    return {std::string(to_string(r.spec.kind)),
            static_cast<long long>(r.spec.M),
            static_cast<long long>(r.spec.N),
            static_cast<long long>(r.spec.bit),
            r.probe.epsilon,
            r.probe.delta,
            r.detector,
            r.postselect_prob,
            r.trace_detect_prob,
            opt_cell(r.formula_trace),
            r.shift_sum,
            opt_cell(r.formula_shift),
            static_cast<long long>(r.n_paths),
            r.standard_detect,
            r.standard_shift,
            r.detect_ratio,
            r.shift_ratio,
            std::string(to_string(r.verdict))};
}

Table cmd_simulate(const Options& o, std::ostream& err) {
    const NetworkSpec spec = make_spec(o, o.M, o.N, o.bit);
    const ProbeModel probe = make_probe(o);
    regime_check(spec.M, spec.N, probe.epsilon, err);
    const auto sim = simulate(spec, probe);
    Table t{{"kind", "M", "N", "bit", "epsilon", "outcome", "prob"}};
    auto row = [&](const std::string& name, double p) {
        t.add({std::string(to_string(spec.kind)), static_cast<long long>(spec.M),
               static_cast<long long>(spec.N), static_cast<long long>(spec.bit), probe.epsilon, name, p});
    };
    for (const auto& [name, p] : sim.detector_probs) row(name, p);
    for (const auto& [name, p] : sim.sink_probs) row(name, p);
    return t;
}

Table cmd_trace(const Options& o, std::ostream& err) {
    const NetworkSpec spec = make_spec(o, o.M, o.N, o.bit);
    const ProbeModel probe = make_probe(o);
    regime_check(spec.M, spec.N, probe.epsilon, err);
    const auto table = path_amplitudes(
        spec, o.detector.empty() ? std::nullopt : std::optional<std::string>(o.detector));
    const auto weak = table.weak_values();
    Table t{{"detector", "m", "n", "fwd", "bwd", "overlap", "weak_value_re", "weak_value_im",
             "shift"}};
    for (std::size_t k = 0; k < table.paths.size(); ++k)
        t.add({table.detector, static_cast<long long>(table.paths[k].m),
               static_cast<long long>(table.paths[k].n), table.fwd[k].real(), table.bwd[k].real(),
               table.overlap.real(), weak[k].real(), weak[k].imag(), probe.delta * std::abs(weak[k])});
    return t;
}

Table cmd_standard(const Options& o, std::ostream&) {
    if (o.paths < 1) throw UsageError("--paths must be >= 1");
    const ProbeModel probe = make_probe(o);
    const Standard s = single_particle_standard(o.paths, probe);
    Table t{{"n_paths", "epsilon", "delta", "detect_prob", "eps2_over_n", "shift_sum"}};
    t.add({static_cast<long long>(s.n_paths), probe.epsilon, probe.delta, s.detect_prob,
           probe.epsilon * probe.epsilon / s.n_paths, s.shift_sum});
    return t;
}

Table cmd_compare(const Options& o, std::ostream& err) {
    const NetworkSpec spec = make_spec(o, o.M, o.N, o.bit);
    const ProbeModel probe = make_probe(o);
    regime_check(spec.M, spec.N, probe.epsilon, err);
    const TraceReport r = compare(spec, probe);
    for (const auto& w : r.warnings) err << "warning: " << w << "\n";
    Table t{report_columns()};
    t.add(report_row(r));
    return t;
}

Table cmd_sweep(const Options& o, std::ostream& err) {
    if (o.Ms.empty() || o.Ns.empty()) throw UsageError("sweep needs non-empty --Ms and --Ns");
    std::vector<double> epsilons = o.epsilons;
    if (epsilons.empty()) epsilons.push_back(make_probe(o).epsilon);
    std::vector<int> bits = o.bits.empty() ? std::vector<int>{0, 1} : o.bits;
    auto Ms = o.Ms, Ns = o.Ns;
    std::sort(Ms.begin(), Ms.end());
    std::sort(Ns.begin(), Ns.end());
    std::sort(epsilons.begin(), epsilons.end());
    std::sort(bits.begin(), bits.end());
    Table t{report_columns()};
    for (int M : Ms)
        for (int N : Ns)
            for (double eps : epsilons)
                for (int bit : bits) {
                    const NetworkSpec spec = make_spec(o, M, N, bit);
                    const ProbeModel probe = make_probe(o, eps);
                    regime_check(M, N, eps, err);
                    const TraceReport r = compare(spec, probe);
                    for (const auto& w : r.warnings) err << "warning: " << w << "\n";
                    t.add(report_row(r));
                }
    return t;
}

EveProbe make_eve(const Options& o) {
    EveProbe eve;
    eve.mode = parse_eve_mode(o.eve_mode);
    eve.eps = o.eve_eps;
    if (!(eve.eps >= 0 && eve.eps <= 1)) throw UsageError("--eve-eps must lie in [0, 1]");
    if (o.eve_chain > 0) eve.chain = o.eve_chain;
    else if (!o.eve_path.empty()) eve.path = parse_path(o.eve_path);
    else throw UsageError("eve needs --eve-path or --eve-chain");
    return eve;
}

Table cmd_eve(const Options& o, std::ostream&) {
    const NetworkSpec spec = make_spec(o, o.M, o.N, o.bit);
    const EveJoint joint = eve_joint_distribution(spec, make_eve(o));
    Table t{{"bit", "eve_click", "outcome", "prob", "prob_given_click_state"}};
    for (const auto& e : joint.entries)
        t.add({static_cast<long long>(joint.bit), static_cast<long long>(e.eve_click), e.outcome,
               e.prob, joint.conditional(e.outcome, e.eve_click)});
    return t;
}

Table cmd_keydist(const Options& o, std::ostream&) {
    if (o.rounds < 1) throw UsageError("--rounds must be >= 1");
    std::optional<EveProbe> eve;
    if (o.eve_chain > 0 || !o.eve_path.empty()) eve = make_eve(o);
    const KeyReport r = keydist_simulate(o.N, static_cast<std::uint64_t>(o.rounds), o.seed, eve);
    Table t{{"N", "rounds", "seed", "eve", "announced", "errors", "error_rate", "eve_clicks",
             "eve_on_announced", "eve_on_correct", "mi_announced", "mi_correct", "announce_prob"}};
    std::string eve_desc = "none";
    if (eve)
        eve_desc = std::string(to_string(eve->mode)) + "@" +
                   (eve->chain > 0 ? "chain" + std::to_string(eve->chain) : to_string(eve->path));
    auto ll = [](std::uint64_t v) { return static_cast<long long>(v); };
    t.add({static_cast<long long>(r.N), ll(r.rounds), ll(r.seed), eve_desc, ll(r.announced),
           ll(r.errors), r.error_rate, ll(r.eve_clicks), ll(r.eve_on_announced), ll(r.eve_on_correct),
           r.mi_announced, r.mi_correct, r.announce_prob});
    return t;
}

Table cmd_bohm(const Options& o, std::ostream& err) {
    const NetworkSpec spec = make_spec(o, o.M, o.N, o.bit);
    const BohmReport r = bohm_estimate(spec);
    if (r.flagged) err << "warning: crossing estimates are defined for li networks; reported anyway\n";
    for (const auto& w : regime_warnings(FormulaId::BohmCrossExpect, spec.M, spec.N, 0))
        if (spec.kind == NetworkKind::Li) err << "warning: " << w << "\n";
    Table t{{"kind", "M", "N", "bit", "max_path_prob", "counterfactual_prob", "cross_bit0",
             "cross_bit1", "cross_expectation", "formula_cross", "flagged"}};
    t.add({std::string(to_string(spec.kind)), static_cast<long long>(spec.M),
           static_cast<long long>(spec.N), static_cast<long long>(spec.bit), r.max_path_prob,
           r.counterfactual_prob, r.cross_bit0, r.cross_bit1, r.cross_expectation,
           spec.kind == NetworkKind::Li
               ? Cell(eval_asymptotic(FormulaId::BohmCrossExpect, spec.M, spec.N, 0, 0))
               : Cell(),
           static_cast<long long>(r.flagged)});
    return t;
}

Json config_json(const Options& o, const std::string& command) {
    Json c;
    c["command"] = command;
    c["kind"] = o.kind;
    c["M"] = o.M;
    c["N"] = o.N;
    c["bit"] = o.bit;
    c["elements"] = o.elements;
    c["t3"] = o.t3 ? Json(*o.t3) : Json(nullptr);
    c["delta"] = o.delta ? Json(*o.delta) : Json(nullptr);
    c["Delta"] = o.width ? Json(*o.width) : Json(nullptr);
    c["epsilon"] = o.epsilon ? Json(*o.epsilon) : Json(nullptr);
    c["paths"] = o.paths;
    c["Ms"] = o.Ms;
    c["Ns"] = o.Ns;
    c["epsilons"] = o.epsilons;
    c["bits"] = o.bits;
    c["detector"] = o.detector;
    c["rounds"] = o.rounds;
    c["seed"] = o.seed;
    c["eve_path"] = o.eve_path;
    c["eve_chain"] = o.eve_chain;
    c["eve_eps"] = o.eve_eps;
    c["eve_mode"] = o.eve_mode;
    return c;
}

std::optional<fs::path> output_path(const Options& o, const std::string& command) {
    const char* dir = std::getenv(kOutputDirEnv);
    if (o.output == "-") return std::nullopt;
    if (o.output.empty()) {
        if (!dir || !*dir) return std::nullopt;
        return fs::path(dir) / (command + "." + o.format);
    }
    fs::path p(o.output);
    if (p.is_relative() && dir && *dir) p = fs::path(dir) / p;
    return p;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Counterfactual-communication trace simulator"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value configuration file; flags override it");
    Options o;

    app.add_option("--kind", o.kind, "simple|ifm|hwp|zeno|nested3|salih|li");
    app.add_option("--M", o.M, "outer beam splitters");
    app.add_option("--N", o.N, "inner beam splitters (paths for simple)");
    app.add_option("--bit", o.bit, "Bob's bit, 0 or 1");
    app.add_option("--element", o.elements, "per-path override m,n=free|shutter|hwp");
    app.add_option("--t3", o.t3, "side-mirror transmittance (salih)");
    app.add_option("--delta", o.delta, "probe shift");
    app.add_option("--Delta", o.width, "probe width");
    app.add_option("--epsilon", o.epsilon, "probe overlap parameter (default 0.01)");
    app.add_option("--format", o.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--output", o.output, "data file ('-' for stdout)");
    app.add_option("--paths", o.paths, "channel paths for 'standard'");
    app.add_option("--Ms", o.Ms, "sweep grid over M")->delimiter(',');
    app.add_option("--Ns", o.Ns, "sweep grid over N")->delimiter(',');
    app.add_option("--epsilons", o.epsilons, "sweep grid over epsilon")->delimiter(',');
    app.add_option("--bits", o.bits, "sweep bits")->delimiter(',');
    app.add_option("--detector", o.detector, "post-selected detector for 'trace'");
    app.add_option("--rounds", o.rounds, "key-distribution rounds");
    app.add_option("--seed", o.seed, "random seed");
    app.add_option("--eve-path", o.eve_path, "Eve's path m,n");
    app.add_option("--eve-chain", o.eve_chain, "Eve watches every path of inner chain m");
    app.add_option("--eve-eps", o.eve_eps, "Eve's coupling (weak mode)");
    app.add_option("--eve-mode", o.eve_mode, "projective|weak");

    const std::map<std::string, std::string> commands{
        {"simulate", "detector and sink probabilities"},
        {"trace", "per-path amplitudes and weak values"},
        {"standard", "single-particle standard"},
        {"compare", "trace metrics against the standard"},
        {"sweep", "compare over a grid"},
        {"eve", "Eve's joint click/outcome distribution"},
        {"keydist", "two-chain key distribution Monte Carlo"},
        {"bohm", "amplitude-based crossing estimates"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        Table t;
        if (command == "simulate") t = cmd_simulate(o, err);
        else if (command == "trace") t = cmd_trace(o, err);
        else if (command == "standard") t = cmd_standard(o, err);
        else if (command == "compare") t = cmd_compare(o, err);
        else if (command == "sweep") t = cmd_sweep(o, err);
        else if (command == "eve") t = cmd_eve(o, err);
        else if (command == "keydist") t = cmd_keydist(o, err);
        else t = cmd_bohm(o, err);
        require_finite(t);
        const std::string data = o.format == "json" ? to_json(t, command, config_json(o, command))
                                                    : to_csv(t);
        if (const auto path = output_path(o, command)) write_atomically(*path, data);
        else out << data;
        return 0;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const UnsupportedKind& e) {
        err << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        err << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace cftrace::cli
