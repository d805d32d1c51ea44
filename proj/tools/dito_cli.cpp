// dito: command-line front end for bases, lattices, pricing and convergence studies.

#include "dito/basis.hpp"
#include "dito/calculus.hpp"
#include "dito/harness.hpp"
#include "dito/lattice.hpp"
#include "dito/market.hpp"
#include "dito/pricer.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace dito;

namespace {

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) throw InvalidArgument("cannot parse number '" + item + "'");
        out.push_back(v);
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (double v : parse_list(text)) {
        if (v != std::floor(v) || v < 1) throw InvalidArgument("expected positive integers in '" + text + "'");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
    out.precision(17);
    return out;
}

OrthoBasis default_basis(int n, const std::string& kind) {
    if (kind == "binomial" || (kind == "auto" && n == 1)) {
        if (n != 1) throw InvalidArgument("the binomial basis has n = 1");
        return make_binomial();
    }
    if (kind == "cyclic" || kind == "auto") return make_cyclic(n);
    throw InvalidArgument("unknown basis '" + kind + "'");
}

Point parse_point(const std::string& text, int n) {
    if (text.empty()) return Point::Zero(n);
    const auto v = parse_list(text);
    if (static_cast<int>(v.size()) != n) throw InvalidArgument("x0 must have " + std::to_string(n) + " entries");
    Point p(n);
    for (int i = 0; i < n; ++i) p(i) = v[static_cast<std::size_t>(i)];
    return p;
}

struct ModelArgs {
    std::string model = "bs";
    std::string basis = "auto";
    double r = 0.05;
    std::string sigma = "0.2";
    std::string mu;
    std::string s0 = "100";

    void attach(CLI::App* app) {
        app->add_option("--model", model, "market model")->check(CLI::IsMember({"bs"}));
        app->add_option("--basis", basis, "innovation basis")->check(CLI::IsMember({"auto", "binomial", "cyclic"}));
        app->add_option("--r", r, "interest rate");
        app->add_option("--sigma", sigma, "volatilities, one per factor (diagonal loadings)");
        app->add_option("--mu", mu, "drifts; default makes the limiting drift vanish");
        app->add_option("--s0", s0, "initial prices");
    }

    BlackScholesParams params() const {
        const auto vols = parse_list(sigma);
        const int n = static_cast<int>(vols.size());
        if (n < 1) throw InvalidArgument("--sigma needs at least one value");
        BlackScholesParams p;
        p.r = r;
        p.sigma = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) p.sigma(i, i) = vols[static_cast<std::size_t>(i)];
        p.mu = mu.empty() ? neutral_drift(p.sigma, r) : parse_list(mu);
        p.s0 = parse_list(s0);
        if (p.s0.size() == 1 && n > 1) p.s0.assign(static_cast<std::size_t>(n), p.s0.front());
        p.check();
        return p;
    }

    MarketModel build(int N) const {
        const BlackScholesParams p = params();
        return make_black_scholes(default_basis(p.n(), basis), N, p);
    }
};

struct PayoffArgs {
    std::string kind = "smooth-exp";
    double strike = 100.0;
    int asset = 1;
    double width = 1.0;
    double level = 1.0;

    void attach(CLI::App* app) {
        app->add_option("--payoff", kind, "payoff")
            ->check(CLI::IsMember({"call", "put", "digital", "smooth-exp", "const"}));
        app->add_option("--strike", strike, "option strike");
        app->add_option("--asset", asset, "underlying asset for options (1-based)");
        app->add_option("--width", width, "width of the smooth-exp payoff");
        app->add_option("--level", level, "constant payoff value / digital cash amount");
    }

    PayoffSpec spec(const BlackScholesParams& params, const Point& x0) const {
        const PayoffKind k = parse_payoff_kind(kind);
        PayoffSpec p;
        if (k == PayoffKind::Call || k == PayoffKind::Put || k == PayoffKind::Digital) {
            p = option_payoff(k, params, asset, strike);
        }
        p.kind = k;
        p.level = level;
        p.width = width;
        p.center = x0;
        return p;
    }
};

struct TestFunction {
    ScalarField f;
    GradientField gradient;
    ScalarField laplacian;
};

TestFunction test_function(const std::string& name, int n) {
    if (name == "quadratic") {
        return {[](double, const Point& x) { return x.squaredNorm(); },
                [](double, const Point& x) -> Point { return 2.0 * x; },
                [n](double, const Point&) { return 2.0 * n; }};
    }
    if (name == "exp") {
        return {[](double, const Point& x) { return std::exp(x.sum()); },
                [](double, const Point& x) -> Point { return Point::Constant(x.size(), std::exp(x.sum())); },
                [n](double, const Point& x) { return n * std::exp(x.sum()); }};
    }
    if (name == "sin") {
        return {[](double, const Point& x) { return std::sin(x(0)); },
                [](double, const Point& x) -> Point {
                    Point g = Point::Zero(x.size());
                    g(0) = std::cos(x(0));
                    return g;
                },
                [](double, const Point& x) { return -std::sin(x(0)); }};
    }
    if (name == "mixed") {
        // e^{t/2} sin(x_1) + x_1 x_n
        return {[](double t, const Point& x) { return std::exp(0.5 * t) * std::sin(x(0)) + x(0) * x(x.size() - 1); },
                [](double t, const Point& x) -> Point {
                    Point g = Point::Zero(x.size());
                    g(0) += std::exp(0.5 * t) * std::cos(x(0)) + x(x.size() - 1);
                    g(x.size() - 1) += x(0);
                    return g;
                },
                [n](double t, const Point& x) { return -std::exp(0.5 * t) * std::sin(x(0)) + (n == 1 ? 2.0 : 0.0); }};
    }
    throw InvalidArgument("unknown function '" + name + "'");
}

int run_basis(const std::string& kind, int n, const std::string& probs, const std::string& emit) {
    OrthoBasis basis = kind == "binomial" ? make_binomial()
                       : kind == "cyclic" ? make_cyclic(n)
                                          : [&] {
                                                const auto p = parse_list(probs);
                                                return make_from_probs(p);
                                            }();
    const ValidationReport report = validate(basis);
    std::cout << report.describe() << "\n";
    if (!emit.empty()) {
        auto out = open_output(emit);
        out << "i,j,value\n";
        for (int i = 0; i < basis.states(); ++i)
            for (int j = 0; j < basis.states(); ++j) out << i << ',' << j << ',' << basis.entry(i, j) << '\n';
        out << "\nj,k,jump\n";
        for (int j = 0; j < basis.states(); ++j)
            for (int k = 0; k < basis.n(); ++k) out << j << ',' << k + 1 << ',' << basis.jump(j)(k) << '\n';
        out << "\nj,p\n";
        for (int j = 0; j < basis.states(); ++j) out << j << ',' << basis.prob(j) << '\n';
    }
    return report.passed() ? 0 : 1;
}

int run_lattice(int n, int N, double T) {
    const LatticeConfig config{N, T, Point::Zero(n)};
    std::cout << "depth,count\n";
    for (int k = 0; k <= config.depth(); ++k) std::cout << k << ',' << slice_size(n, k) << '\n';
    return 0;
}

int run_ito_check(int n, int N, int depth, const std::string& function) {
    if (depth < 1) throw InvalidArgument("--depth must be at least 1");
    if (std::pow(n + 1.0, depth) > kExhaustivePathLimit) throw InvalidArgument("too many paths for exhaustive check");
    const OrthoBasis basis = default_basis(n, "auto");
    const TestFunction tf = test_function(function, n);
    const LatticeConfig config{N, static_cast<double>(depth) / N, Point::Zero(n)};

    std::vector<int> path(static_cast<std::size_t>(depth), 0);
    double worst = 0.0;
    std::uint64_t paths = 0;
    while (true) {
        worst = std::max(worst, ito_decompose(basis, config, tf.f, path).relative_defect());
        ++paths;
        int i = 0;
        while (i < depth && ++path[static_cast<std::size_t>(i)] > n) path[static_cast<std::size_t>(i++)] = 0;
        if (i == depth) break;
    }
    std::printf("paths,%llu\nmax_defect,%.3e\n", static_cast<unsigned long long>(paths), worst);
    return worst <= 1e-10 ? 0 : 1;
}

int run_order_check(int n, const std::string& function, const std::string& Ns_text, double t,
                    const std::string& x_text) {
    const OrthoBasis basis = default_basis(n, "auto");
    const TestFunction tf = test_function(function, n);
    const auto Ns = parse_int_list(Ns_text);
    const OrderEstimate est = consistency_order(basis, tf.f, tf.gradient, tf.laplacian, t, parse_point(x_text, n), Ns);
    std::printf("N,defect\n");
    for (std::size_t i = 0; i < est.Ns.size(); ++i) std::printf("%d,%.6e\n", est.Ns[i], est.defects[i]);
    if (est.exact)
        std::printf("slope,exact\n");
    else
        std::printf("slope,%.4f\n", est.slope);
    return 0;
}

int run_market_check(const ModelArgs& args, int N, double T) {
    const MarketModel model = args.build(N);
    const LatticeConfig config{N, T, Point::Zero(model.n())};
    const Lattice lattice(model.basis(), config);
    std::printf("depth,min_state_price,max_pi1_defect,min_A,max_A\n");
    bool ok = true;
    for (int k = 0; k < lattice.depth(); ++k) {
        double min_pi = std::numeric_limits<double>::infinity();
        double defect = 0.0;
        double min_a = std::numeric_limits<double>::infinity();
        double max_a = -min_a;
        const double t = config.time(k + 1);
        lattice.for_each_node(k, [&](std::uint64_t, const Counts& c) {
            const Point x = lattice.position(c);
            const StepMatrices step = evaluate_step(model, t, x);
            if (!step.complete() || !step.arbitrage_free()) ok = false;
            min_pi = std::min(min_pi, step.state_prices.minCoeff());
            min_a = std::min(min_a, step.A);
            max_a = std::max(max_a, step.A);
            defect = std::max(defect, sigma_pi_identity_check(model, t, x).pi_first);
        });
        std::printf("%d,%.6e,%.3e,%.12f,%.12f\n", k, min_pi, defect, min_a, max_a);
    }
    return ok ? 0 : 1;
}

int run_price(const ModelArgs& args, const PayoffArgs& payoff_args, int N, double T, const std::string& emit) {
    const MarketModel model = args.build(N);
    const BlackScholesParams params = args.params();
    const LatticeConfig config{N, T, Point::Zero(model.n())};
    const Claim claim{payoff_args.spec(params, config.x0).payoff(config.horizon())};
    const PriceGrid grid = price_backward(model, claim, config);
    std::printf("value,%.12f\n", grid.root_value());
    if (!emit.empty()) {
        const Lattice lattice(model.basis(), config);
        auto out = open_output(emit);
        out << "depth,rank";
        for (int i = 1; i <= model.n(); ++i) out << ",x" << i;
        out << ",value";
        for (int j = 0; j <= model.n(); ++j) out << ",theta" << j;
        out << '\n';
        for (int k = 0; k <= lattice.depth(); ++k) {
            lattice.for_each_node(k, [&](std::uint64_t r, const Counts& c) {
                const Point x = lattice.position(c);
                out << k << ',' << r;
                for (int i = 0; i < x.size(); ++i) out << ',' << x(i);
                out << ',' << grid.value(k, r);
                for (int j = 0; j <= model.n(); ++j) {
                    out << ',';
                    if (k < lattice.depth()) out << grid.theta(k, r)[static_cast<std::size_t>(j)];
                }
                out << '\n';
            });
        }
    }
    return 0;
}

int run_replicate(const ModelArgs& args, const PayoffArgs& payoff_args, int N, double T, const std::string& paths,
                  std::uint64_t seed) {
    const MarketModel model = args.build(N);
    const LatticeConfig config{N, T, Point::Zero(model.n())};
    const Claim claim{payoff_args.spec(args.params(), config.x0).payoff(config.horizon())};
    PathSelection selection;
    selection.seed = seed;
    if (paths != "all") selection.samples = std::stoull(paths);
    const ReplicationReport report = hedge_replication_test(model, claim, config, selection);
    std::printf("paths,%llu\nexhaustive,%s\nmax_defect,%.3e\nmax_cost_mismatch,%.3e\n",
                static_cast<unsigned long long>(report.paths), report.exhaustive ? "yes" : "no", report.max_defect,
                report.max_cost_mismatch);
    if (!report.exhaustive) std::printf("seed,%llu\n", static_cast<unsigned long long>(report.seed));
    return report.max_defect <= 1e-10 ? 0 : 1;
}

struct ConvergeArgs {
    std::string family = "bs1";
    std::string Ns = "16,32,64,128,256,512";
    double expected_order = std::numeric_limits<double>::quiet_NaN();
    double window = 1.0;
    double T = 1.0;
    std::string x0;
    std::string emit;
};

int run_converge(const ConvergeArgs& c, const ModelArgs& model_args, const PayoffArgs& payoff_args) {
    BlackScholesParams params;
    OrthoBasis basis = make_binomial();
    if (c.family == "bs1") {
        params = bs1_params();
    } else if (c.family == "bs2") {
        params = bs2_params();
        basis = make_cyclic(2);
    } else {
        params = model_args.params();
        basis = default_basis(params.n(), model_args.basis);
    }
    const int n = params.n();
    const Point x0 = parse_point(c.x0, n);
    const ReferenceProblem problem = black_scholes_problem(params, payoff_args.spec(params, x0), c.T, x0, c.window);
    const double expected = std::isnan(c.expected_order) ? (n == 1 ? 1.0 : 0.5) : c.expected_order;
    const auto Ns = parse_int_list(c.Ns);

    const ConvergenceReport report = run_convergence(black_scholes_family(basis, params), problem, Ns, expected);

    std::ofstream file;
    if (!c.emit.empty()) file = open_output(c.emit);
    auto line = [&](const std::string& s) {
        std::cout << s << '\n';
        if (file) file << s << '\n';
    };
    line("N,sup_error,log2N,log2err");
    char buf[160];
    for (std::size_t i = 0; i < report.Ns.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%d,%.6e,%.6f,%.6f", report.Ns[i], report.errors[i],
                      std::log2(static_cast<double>(report.Ns[i])), std::log2(std::max(report.errors[i], 1e-300)));
        line(buf);
    }
    if (!report.positive_interest) std::cerr << "warning: one-period discount left (0, 1) somewhere\n";
    if (report.exact)
        std::snprintf(buf, sizeof buf, "slope,exact,%s", report.pass ? "pass" : "fail");
    else
        std::snprintf(buf, sizeof buf, "slope,%.4f,%s", report.slope, report.pass ? "pass" : "fail");
    line(buf);
    return report.pass ? 0 : 1;
}

// Expands `converge --config FILE` into `--key=value` arguments placed ahead of
// the command-line flags, so later (command-line) values win.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    const auto sub = std::find(args.begin(), args.end(), "converge");
    if (sub == args.end()) return args;
    std::vector<std::string> from_file;
    for (auto it = sub + 1; it != args.end();) {
        std::string path;
        if (*it == "--config" && it + 1 != args.end()) {
            path = *(it + 1);
            it = args.erase(it, it + 2);
        } else if (it->rfind("--config=", 0) == 0) {
            path = it->substr(9);
            it = args.erase(it);
        } else {
            ++it;
            continue;
        }
        std::ifstream in(path);
        if (!in) throw InvalidArgument("cannot read config file '" + path + "'");
        std::string raw;
        while (std::getline(in, raw)) {
            const auto start = raw.find_first_not_of(" \t");
            if (start == std::string::npos || raw[start] == '#' || raw[start] == ';') continue;
            const auto eq = raw.find('=');
            if (eq == std::string::npos) throw InvalidArgument("config line without '=': " + raw);
            auto trim = [](std::string v) {
                const auto a = v.find_first_not_of(" \t\"");
                const auto b = v.find_last_not_of(" \t\"\r");
                return a == std::string::npos ? std::string{} : v.substr(a, b - a + 1);
            };
            from_file.push_back("--" + trim(raw.substr(0, eq)) + "=" + trim(raw.substr(eq + 1)));
        }
    }
    const auto pos = std::find(args.begin(), args.end(), "converge") + 1;
    args.insert(pos, from_file.begin(), from_file.end());
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete Ito calculus on complete multinomial markets"};
    app.require_subcommand(1);

    std::string basis_kind = "cyclic", probs, emit;
    int n = 1;
    auto* basis_cmd = app.add_subcommand("basis", "build and validate an innovation basis");
    basis_cmd->add_option("--kind", basis_kind)->check(CLI::IsMember({"binomial", "cyclic", "probs"}));
    basis_cmd->add_option("--n", n)->check(CLI::PositiveNumber);
    basis_cmd->add_option("--probs", probs, "comma-separated probabilities for --kind probs");
    basis_cmd->add_option("--emit", emit, "CSV output path");

    int N = 16, depth = 3;
    double T = 1.0, t = 0.5;
    std::string function = "exp", Ns_text = "16,32,64,128,256,512", x_text;
    auto* lattice_cmd = app.add_subcommand("lattice", "slice sizes per depth");
    lattice_cmd->add_option("--n", n)->check(CLI::PositiveNumber);
    lattice_cmd->add_option("--N", N)->check(CLI::PositiveNumber);
    lattice_cmd->add_option("--T", T);

    auto* ito_cmd = app.add_subcommand("ito-check", "exhaustive check of the discrete Ito decomposition");
    ito_cmd->add_option("--n", n)->check(CLI::PositiveNumber);
    ito_cmd->add_option("--N", N)->check(CLI::PositiveNumber);
    ito_cmd->add_option("--depth", depth)->check(CLI::PositiveNumber);
    ito_cmd->add_option("--function", function)->check(CLI::IsMember({"quadratic", "exp", "sin", "mixed"}));

    auto* order_cmd = app.add_subcommand("order-check", "consistency order of the discrete operators");
    order_cmd->add_option("--n", n)->check(CLI::PositiveNumber);
    order_cmd->add_option("--function", function)->check(CLI::IsMember({"quadratic", "exp", "sin", "mixed"}));
    order_cmd->add_option("--Ns", Ns_text);
    order_cmd->add_option("--t", t);
    order_cmd->add_option("--x", x_text, "evaluation point, comma-separated");

    ModelArgs model_args;
    PayoffArgs payoff_args;
    auto* market_cmd = app.add_subcommand("market-check", "per-slice completeness and no-arbitrage report");
    model_args.attach(market_cmd);
    market_cmd->add_option("--N", N)->check(CLI::PositiveNumber);
    market_cmd->add_option("--T", T);

    auto* price_cmd = app.add_subcommand("price", "backward pricing with hedges");
    model_args.attach(price_cmd);
    payoff_args.attach(price_cmd);
    price_cmd->add_option("--N", N)->check(CLI::PositiveNumber);
    price_cmd->add_option("--T", T);
    price_cmd->add_option("--emit", emit, "grid CSV output path");

    std::string paths = "all";
    std::uint64_t seed = 20240601;
    auto* replicate_cmd = app.add_subcommand("replicate", "roll the hedge forward along paths");
    model_args.attach(replicate_cmd);
    payoff_args.attach(replicate_cmd);
    replicate_cmd->add_option("--N", N)->check(CLI::PositiveNumber);
    replicate_cmd->add_option("--T", T);
    replicate_cmd->add_option("--paths", paths, "'all' or a sample count");
    replicate_cmd->add_option("--seed", seed);

    ConvergeArgs conv;
    auto* converge_cmd = app.add_subcommand("converge", "convergence study against the continuum oracle");
    converge_cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    std::string config_path;
    converge_cmd->add_option("--config", config_path, "key=value file mirroring the flags; flags override it");
    converge_cmd->add_option("--family", conv.family)->check(CLI::IsMember({"bs1", "bs2", "custom"}));
    model_args.attach(converge_cmd);
    payoff_args.attach(converge_cmd);
    converge_cmd->add_option("--Ns", conv.Ns);
    converge_cmd->add_option("--expected-order", conv.expected_order, "default 1.0 for n = 1, else 0.5");
    converge_cmd->add_option("--window", conv.window);
    converge_cmd->add_option("--T", conv.T);
    converge_cmd->add_option("--x0", conv.x0);
    converge_cmd->add_option("--emit", conv.emit, "report CSV output path");

    std::vector<std::string> args;
    try {
        args = expand_config(argc, argv);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*basis_cmd) return run_basis(basis_kind, n, probs, emit);
        if (*lattice_cmd) return run_lattice(n, N, T);
        if (*ito_cmd) return run_ito_check(n, N, depth, function);
        if (*order_cmd) return run_order_check(n, function, Ns_text, t, x_text);
        if (*market_cmd) return run_market_check(model_args, N, T);
        if (*price_cmd) return run_price(model_args, payoff_args, N, T, emit);
        if (*replicate_cmd) return run_replicate(model_args, payoff_args, N, T, paths, seed);
        if (*converge_cmd) return run_converge(conv, model_args, payoff_args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
