#include <CLI11.hpp>
#include <json.hpp>

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "zerocorr/closed_form.hpp"
#include "zerocorr/empirical.hpp"
#include "zerocorr/errors.hpp"
#include "zerocorr/kac_rice.hpp"
#include "zerocorr/kernels.hpp"

using namespace zerocorr;

namespace {

constexpr int kUsageError = 2;
constexpr int kNumericError = 1;

// Raised for arguments that parse but make no sense together; reported as a usage error.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- grids and points -------------------------------------------------------

double parse_double(std::string_view s, const std::string& what) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) throw UsageError("cannot parse " + what + " from '" + std::string(s) + "'");
    return v;
}

// `a`, `a..b:n` (inclusive, linear) or `a..b:n:log`.
std::vector<double> parse_grid(const std::string& spec, const std::string& what) {
    const auto dots = spec.find("..");
    if (dots == std::string::npos) return {parse_double(spec, what)};
    const auto colon = spec.find(':', dots);
    if (colon == std::string::npos) throw UsageError(what + " grid needs a step count: a..b:n");
    const double a = parse_double(std::string_view(spec).substr(0, dots), what);
    const double b = parse_double(std::string_view(spec).substr(dots + 2, colon - dots - 2), what);
    std::string rest = spec.substr(colon + 1);
    bool log = false;
    if (const auto c2 = rest.find(':'); c2 != std::string::npos) {
        if (rest.substr(c2 + 1) != "log") throw UsageError(what + " grid suffix must be ':log'");
        log = true;
        rest.resize(c2);
    }
    const double steps = parse_double(rest, what + " step count");
    if (steps < 1 || steps != std::floor(steps) || steps > 1e7) throw UsageError(what + " grid needs an integer step count >= 1");
    const auto n = static_cast<std::size_t>(steps);
    if (log && (a <= 0.0 || b <= 0.0)) throw UsageError(what + " log grid needs positive endpoints");
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        grid[i] = log ? std::exp(std::log(a) + t * (std::log(b) - std::log(a))) : a + t * (b - a);
    }
    if (n > 1) grid.back() = b;
    return grid;
}

// "1.5", "-2i", "0.3+0.4i", "1e-3-2e-3i".
cplx parse_complex(const std::string& s) {
    if (s.empty()) throw UsageError("empty coordinate");
    if (s.back() != 'i') return parse_double(s, "coordinate");
    const std::string body = s.substr(0, s.size() - 1);
    // split at the last sign that is not part of an exponent
    std::size_t split = std::string::npos;
    for (std::size_t i = body.size(); i-- > 1;)
        if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
            split = i;
            break;
        }
    auto imag_of = [](const std::string& t) {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        return parse_double(t[0] == '+' ? t.substr(1) : t, "coordinate");
    };
    if (split == std::string::npos) return {0.0, imag_of(body)};
    return {parse_double(body.substr(0, split), "coordinate"), imag_of(body.substr(split))};
}

Point parse_point(const std::string& s, int m) {
    Point p;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) p.push_back(parse_complex(item));
    if (static_cast<int>(p.size()) != m)
        throw UsageError("point '" + s + "' has " + std::to_string(p.size()) + " coordinates, expected m=" + std::to_string(m));
    return p;
}

Point on_axis(int m, double x) {
    Point p(m, 0.0);
    p[0] = x;
    return p;
}

// ---- tables -----------------------------------------------------------------

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
};

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    (void)ec;
    return std::string(buf, ptr);
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

void write_csv(std::ostream& out, const Table& t) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>) out << format_double(v);
                    else if constexpr (std::is_same_v<T, std::int64_t>) out << v;
                    else out << csv_escape(v);
                },
                row[i]);
        }
        out << '\n';
    }
}

void write_json(std::ostream& out, const std::string& command, const Table& t) {
    nlohmann::ordered_json doc;
    doc["command"] = command;
    for (const auto& [key, value] : t.meta.items()) doc[key] = value;
    doc["columns"] = t.columns;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        auto obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i)
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    // JSON has no inf/nan; those become null.
                    if constexpr (std::is_same_v<T, double>) obj[t.columns[i]] = std::isfinite(v) ? nlohmann::ordered_json(v) : nullptr;
                    else obj[t.columns[i]] = v;
                },
                row[i]);
        rows.push_back(std::move(obj));
    }
    doc["rows"] = std::move(rows);
    out << doc.dump(2) << '\n';
}

double fitted_exponent(const std::vector<double>& Ns, const std::vector<double>& devs) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(Ns.size());
    for (std::size_t i = 0; i < Ns.size(); ++i) {
        const double x = std::log(Ns[i]), y = std::log(devs[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    return denom > 0 ? -(n * sxy - sx * sy) / denom : std::nan("");
}

// ---- options ----------------------------------------------------------------

struct Options {
    std::string format = "csv";
    std::string output = "-";
    std::string model = "heisenberg-limit";
    int N = 10;
    int m = 1;
    int k = 1;
    int n = 2;
    std::string r = "1";
    std::string levels;
    std::vector<std::string> points;
    std::string method = "exact";
    std::uint64_t samples = 100000;
    std::uint64_t seed = 0;
    double window = 3.0;
    std::string bins = "0..3:16";
    std::string source = "su2";
    double radius = 2.0;
    double spacing = 0.5;
};

KernelModel make_model(const Options& o) {
    KernelModel model;
    if (o.model == "fs") model = FubiniStudy{o.N, o.m};
    else if (o.model == "heisenberg") model = HeisenbergLevel{o.N, o.m};
    else model = HeisenbergLimit{o.m};
    validate(model);
    return model;
}

ExpectationMethod make_method(const Options& o) {
    if (o.method == "mc") {
        if (o.samples < 2) throw UsageError("--samples must be at least 2 for Monte Carlo");
        return MonteCarloMethod{o.samples, o.seed};
    }
    return ExactMethod{};
}

std::vector<Point> query_points(const Options& o, double r) {
    std::vector<Point> pts;
    if (!o.points.empty()) {
        for (const auto& s : o.points) pts.push_back(parse_point(s, o.m));
        return pts;
    }
    for (int p = 0; p < o.n; ++p) pts.push_back(on_axis(o.m, p * r));
    return pts;
}

// ---- subcommands ------------------------------------------------------------

Table run_kappa(const Options& o) {
    Table t;
    t.columns = {"r", "kappa", "series", "asymptote"};
    t.meta["m"] = o.m;
    t.meta["k"] = o.k;
    for (double r : parse_grid(o.r, "r")) {
        if (r < 0) throw UsageError("r must be non-negative");
        const KappaQuery q{r, o.m, o.k};
        const double value = kappa(q);
        // The power series converges for r²/2 < π.
        const double series = r > 0 && r * r < 2 * M_PI ? kappa_series(q) : std::nan("");
        const double asym = r > 0 ? kappa_asymptote(q) : std::nan("");
        t.rows.push_back({r, value, series, asym});
    }
    return t;
}

Table run_correlate(const Options& o) {
    Table t;
    t.columns = {"model", "m", "k", "n", "r", "K", "K_normalized", "std_error"};
    const KernelModel model = make_model(o);
    const ExpectationMethod method = make_method(o);
    const auto grid = o.points.empty() ? parse_grid(o.r, "r") : std::vector<double>{std::nan("")};
    for (double r : grid) {
        const CorrelationQuery q{model, o.k, query_points(o, r), method};
        const Estimate raw = correlation(q);
        const Estimate norm = normalized_correlation(q);
        t.rows.push_back({describe(model), std::int64_t{o.m}, std::int64_t{o.k}, std::int64_t{q.n()}, r, raw.value,
                          norm.value, raw.std_error});
    }
    return t;
}

Table run_converge(const Options& o) {
    Table t;
    t.columns = {"N", "K_scaled", "K_limit", "deviation"};
    const auto grid = parse_grid(o.levels.empty() ? "64..4096:4:log" : o.levels, "N");
    const double r = parse_double(o.r, "r");
    std::vector<Point> limit_pts;
    for (int p = 0; p < o.n; ++p) limit_pts.push_back(on_axis(o.m, p * r));
    const ExpectationMethod method = make_method(o);
    const double limit = correlation({HeisenbergLimit{o.m}, o.k, limit_pts, method}).value;
    std::vector<double> Ns, devs;
    for (double Nd : grid) {
        const int N = static_cast<int>(std::lround(Nd));
        std::vector<Point> pts;
        for (int p = 0; p < o.n; ++p) pts.push_back(on_axis(o.m, p * r / std::sqrt(double(N))));
        const double raw = correlation({FubiniStudy{N, o.m}, o.k, pts, method}).value;
        const double scaled = raw / std::pow(double(N), o.n * o.k);
        const double dev = std::abs(scaled - limit);
        Ns.push_back(N);
        devs.push_back(dev);
        t.rows.push_back({std::int64_t{N}, scaled, limit, dev});
    }
    t.meta["m"] = o.m;
    t.meta["k"] = o.k;
    t.meta["n"] = o.n;
    t.meta["r"] = r;
    if (Ns.size() >= 2) {
        t.columns.push_back("fitted_exponent");
        const double p = fitted_exponent(Ns, devs);
        for (auto& row : t.rows) row.push_back(p);
        t.meta["fitted_exponent"] = std::isfinite(p) ? nlohmann::ordered_json(p) : nullptr;
    }
    return t;
}

Table run_mc(const Options& o) {
    Table t;
    t.columns = {"bin_left", "bin_right", "count", "normalizer", "g_estimate", "stderr", "kappa_reference"};
    PairCorrelationConfig config;
    config.N = o.N;
    config.samples = static_cast<int>(std::min<std::uint64_t>(o.samples, 100'000'000));
    config.window = o.window;
    config.bin_edges = parse_grid(o.bins, "bin edges");
    config.seed = o.seed;
    config.source = o.source == "poisson" ? PointSource::poisson_sphere : PointSource::su2_roots;
    const PairHistogram h = pair_correlation_estimate(config);
    for (std::size_t b = 0; b < h.bins(); ++b) {
        const double mid = 0.5 * (h.bin_edges[b] + h.bin_edges[b + 1]);
        t.rows.push_back({h.bin_edges[b], h.bin_edges[b + 1], static_cast<std::int64_t>(h.counts[b]), h.normalizer[b],
                          h.g_estimate(b), h.std_error(b), kappa({mid, 1, 1})});
    }
    t.meta["N"] = o.N;
    t.meta["samples"] = h.samples;
    t.meta["window"] = o.window;
    t.meta["seed"] = o.seed;
    t.meta["source"] = o.source;
    return t;
}

Table run_kernel_check(const Options& o) {
    Table t;
    t.columns = {"N", "sup_deviation"};
    if (o.spacing <= 0 || o.radius < 0) throw UsageError("--spacing must be positive and --radius non-negative");
    // Square lattice in C^1 clipped to the disc, reused on every coordinate axis for m > 1.
    std::vector<Point> grid;
    const int steps = static_cast<int>(std::floor(o.radius / o.spacing + 1e-9));
    for (int q = 0; q < o.m; ++q)
        for (int i = -steps; i <= steps; ++i)
            for (int j = -steps; j <= steps; ++j) {
                const cplx u(o.spacing * i, o.spacing * j);
                if (std::abs(u) > o.radius + 1e-12) continue;
                if (q > 0 && u == 0.0) continue;
                Point p(o.m, 0.0);
                p[q] = u;
                grid.push_back(p);
            }
    std::vector<double> Ns, devs;
    for (double Nd : parse_grid(o.levels.empty() ? "100..6400:4:log" : o.levels, "N")) {
        const int N = static_cast<int>(std::lround(Nd));
        double sup = 0.0;
        for (const auto& u : grid)
            for (const auto& v : grid)
                sup = std::max(sup, std::abs(fs_scaled_szego(N, o.m, u, v) - heisenberg_limit_kernel(u, 0.0, v, 0.0)));
        Ns.push_back(N);
        devs.push_back(sup);
        t.rows.push_back({std::int64_t{N}, sup});
    }
    t.meta["m"] = o.m;
    t.meta["radius"] = o.radius;
    t.meta["spacing"] = o.spacing;
    if (Ns.size() >= 2) {
        t.columns.push_back("fitted_exponent");
        const double p = fitted_exponent(Ns, devs);
        for (auto& row : t.rows) row.push_back(p);
        t.meta["fitted_exponent"] = std::isfinite(p) ? nlohmann::ordered_json(p) : nullptr;
    }
    return t;
}

Table run_connected(const Options& o) {
    Table t;
    t.columns = {"n", "T_connected", "decay_bound"};
    if (o.points.empty()) throw UsageError("connected needs the configuration via repeated --point");
    const KernelModel model = make_model(o);
    const ExpectationMethod method = make_method(o);
    std::vector<Point> pts;
    for (const auto& s : o.points) pts.push_back(parse_point(s, o.m));
    const int n = static_cast<int>(pts.size());
    if (n > 5) throw SizeLimitExceeded("connected correlations support at most 5 points");
    std::map<Subset, double> kv;
    for (Subset s = 1; s < (Subset{1} << n); ++s) {
        if (std::popcount(s) == 1) {
            kv[s] = 1.0;
            continue;
        }
        std::vector<Point> sub;
        for (int i = 0; i < n; ++i)
            if (s & (Subset{1} << i)) sub.push_back(pts[i]);
        kv[s] = normalized_correlation({model, o.k, sub, method}).value;
    }
    const double tn = connected_correlation(kv, n);
    const double bound = n >= 2 && n <= 3 ? decay_bound(pts) : std::nan("");
    t.rows.push_back({std::int64_t{n}, tn, bound});
    t.meta["model"] = describe(model);
    t.meta["k"] = o.k;
    return t;
}

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sub->add_option("-o,--output", o.output, "output file, '-' for stdout")->capture_default_str();
}

void add_model(CLI::App* sub, Options& o) {
    sub->add_option("--model", o.model, "fs | heisenberg | heisenberg-limit")
        ->check(CLI::IsMember({"fs", "heisenberg", "heisenberg-limit"}))
        ->capture_default_str();
    sub->add_option("--N", o.N, "degree / level for fs and heisenberg")->check(CLI::PositiveNumber)->capture_default_str();
}

void add_method(CLI::App* sub, Options& o) {
    sub->add_option("--method", o.method, "exact | mc")->check(CLI::IsMember({"exact", "mc"}))->capture_default_str();
    sub->add_option("--samples", o.samples, "Monte Carlo sample count")->capture_default_str();
    sub->add_option("--seed", o.seed, "Monte Carlo seed")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    std::ios::sync_with_stdio(false);
    Options o;
    CLI::App app{"Correlations of zeros of Gaussian random holomorphic sections.\n"
                 "Grids: a (single value), a..b:n (n points, endpoints included), a..b:n:log.\n"
                 "Worker threads are capped by ZEROCORR_THREADS."};
    app.require_subcommand(1);

    auto* kappa_cmd = app.add_subcommand("kappa",
                                         "limit pair correlation over an r grid.\n"
                                         "CSV columns: r, kappa, series (nan outside r^2 < 2pi), asymptote");
    add_common(kappa_cmd, o);
    kappa_cmd->add_option("--m", o.m, "complex dimension")->capture_default_str();
    kappa_cmd->add_option("--k", o.k, "number of sections (1 or 2)")->capture_default_str();
    kappa_cmd->add_option("--r", o.r, "distance grid")->required();

    auto* correlate_cmd = app.add_subcommand("correlate",
                                             "n-point correlation by Kac-Rice.\n"
                                             "Points default to 0, r, 2r, ... on the first axis; --point overrides.\n"
                                             "CSV columns: model, m, k, n, r, K, K_normalized, std_error");
    add_common(correlate_cmd, o);
    add_model(correlate_cmd, o);
    add_method(correlate_cmd, o);
    correlate_cmd->add_option("--m", o.m, "complex dimension")->capture_default_str();
    correlate_cmd->add_option("--k", o.k, "number of sections")->capture_default_str();
    correlate_cmd->add_option("--n", o.n, "number of points")->check(CLI::PositiveNumber)->capture_default_str();
    correlate_cmd->add_option("--r", o.r, "spacing grid in chart coordinates")->capture_default_str();
    correlate_cmd->add_option("--point", o.points, "point as comma-separated coordinates, e.g. 0.5+0.2i,0 (repeatable)");

    auto* converge_cmd = app.add_subcommand("converge",
                                            "Fubini-Study correlations at scaled separation r/sqrt(N) against the limit.\n"
                                            "CSV columns: N, K_scaled (K/N^(nk)), K_limit, deviation, fitted_exponent");
    add_common(converge_cmd, o);
    add_method(converge_cmd, o);
    converge_cmd->add_option("--m", o.m, "complex dimension")->capture_default_str();
    converge_cmd->add_option("--k", o.k, "number of sections")->capture_default_str();
    converge_cmd->add_option("--n", o.n, "number of points")->check(CLI::PositiveNumber)->capture_default_str();
    converge_cmd->add_option("--r", o.r, "scaled spacing")->capture_default_str();
    converge_cmd->add_option("--levels", o.levels, "N grid (default 64..4096:4:log)");

    auto* mc_cmd = app.add_subcommand("mc",
                                      "empirical pair correlation of roots of random SU(2) polynomials.\n"
                                      "CSV columns: bin_left, bin_right, count, normalizer, g_estimate, stderr, kappa_reference");
    add_common(mc_cmd, o);
    mc_cmd->add_option("--N", o.N, "polynomial degree")->capture_default_str();
    mc_cmd->add_option("--samples", o.samples, "number of polynomials")->capture_default_str();
    mc_cmd->add_option("--window", o.window, "scaled window radius")->capture_default_str();
    mc_cmd->add_option("--bins", o.bins, "bin edge grid")->capture_default_str();
    mc_cmd->add_option("--seed", o.seed, "seed")->capture_default_str();
    mc_cmd->add_option("--source", o.source, "su2 | poisson (calibration)")
        ->check(CLI::IsMember({"su2", "poisson"}))
        ->capture_default_str();

    auto* kernel_cmd = app.add_subcommand("kernel-check",
                                          "sup deviation of the scaled Szego kernel from its limit over a lattice.\n"
                                          "CSV columns: N, sup_deviation, fitted_exponent");
    add_common(kernel_cmd, o);
    kernel_cmd->add_option("--m", o.m, "complex dimension")->capture_default_str();
    kernel_cmd->add_option("--levels", o.levels, "N grid (default 100..6400:4:log)");
    kernel_cmd->add_option("--radius", o.radius, "lattice radius")->capture_default_str();
    kernel_cmd->add_option("--spacing", o.spacing, "lattice spacing")->capture_default_str();

    auto* connected_cmd = app.add_subcommand("connected",
                                             "connected correlation of a point configuration.\n"
                                             "CSV columns: n, T_connected, decay_bound (n = 2, 3 only)");
    add_common(connected_cmd, o);
    add_model(connected_cmd, o);
    add_method(connected_cmd, o);
    connected_cmd->add_option("--m", o.m, "complex dimension")->capture_default_str();
    connected_cmd->add_option("--k", o.k, "number of sections")->capture_default_str();
    connected_cmd->add_option("--point", o.points, "point as comma-separated coordinates (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    const CLI::App* chosen = app.get_subcommands().front();
    const std::string name = chosen->get_name();
    try {
        Table table;
        if (name == "kappa") table = run_kappa(o);
        else if (name == "correlate") table = run_correlate(o);
        else if (name == "converge") table = run_converge(o);
        else if (name == "mc") table = run_mc(o);
        else if (name == "kernel-check") table = run_kernel_check(o);
        else table = run_connected(o);

        std::ostringstream body;
        if (o.format == "json") write_json(body, name, table);
        else write_csv(body, table);
        if (o.output == "-") {
            std::cout << body.str();
        } else {
            std::ofstream file(o.output, std::ios::binary);
            if (!file) throw UsageError("cannot open output file " + o.output);
            file << body.str();
        }
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n\n" << chosen->help();
        return kUsageError;
    } catch (const InvalidArgument& e) {
        std::cerr << "usage error: " << e.what() << "\n\n" << chosen->help();
        return kUsageError;
    } catch (const NumericError& e) {
        std::cerr << "error (" << e.kind() << "): " << e.what() << '\n';
        return kNumericError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumericError;
    }
}
