// bckm_cli: generate benchmark data, fit constrained K-Means, evaluate
// labelings and run k sweeps.
//
//   bckm_cli gen   --k 10 --n 50 --d 512 --sigma 0.1 --out data/
//   bckm_cli fit   --algo bckm --data data/data.csv --constraints data/constraints.json --out run/
//   bckm_cli eval  --data data/data.csv --labels run/labels.csv --truth data/truth.csv --out run/
//   bckm_cli bench --k-list 2,5,10 --algos bckm,lloyd --seeds 0,1 --out bench/
//
// Every command takes --config FILE (a JSON object keyed by flag names, or a
// manifest.json written by an earlier run); explicit flags win over it.
// Exit codes: 0 success, 2 fit finished without converging, 1 error.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <bckm.hpp>

namespace fs = std::filesystem;
using bckm::Json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_error = 1;
constexpr int exit_unconverged = 2;

std::string json_to_flag_value(const Json& v) {
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_boolean()) {
        return v.get<bool>() ? "true" : "false";
    }
    if (v.is_array()) {
        std::string out;
        for (const auto& e : v) {
            if (!out.empty()) {
                out += ',';
            }
            out += json_to_flag_value(e);
        }
        return out;
    }
    return v.dump();
}

std::string flag_key(const CLI::Option* opt) { return opt->get_single_name(); }

/// Fills options not given on the command line from the config object.
void apply_config(CLI::App* sub, const std::string& path) {
    Json j = bckm::read_json_file(path);
    if (j.contains("config") && j.at("config").is_object()) {
        j = j.at("config");
    }
    if (!j.is_object()) {
        throw bckm::ParseError(path + ": config must be a JSON object");
    }
    for (CLI::Option* opt : sub->get_options()) {
        std::string key = flag_key(opt);
        if (key == "help" || key == "config" || opt->count() > 0) {
            continue;
        }
        std::string alt = key;
        std::replace(alt.begin(), alt.end(), '-', '_');
        const Json* v = j.contains(key) ? &j.at(key) : (j.contains(alt) ? &j.at(alt) : nullptr);
        if (v == nullptr || v->is_null()) {
            continue;
        }
        opt->add_result(json_to_flag_value(*v));
        opt->run_callback();
    }
}

/// Effective value of every option, for the manifest.
Json config_snapshot(const CLI::App* sub) {
    Json snap = Json::object();
    for (const CLI::Option* opt : sub->get_options()) {
        std::string key = flag_key(opt);
        if (key == "help" || key == "config") {
            continue;
        }
        std::string value;
        if (opt->count() > 0) {
            for (const auto& r : opt->results()) {
                if (!value.empty()) {
                    value += ',';
                }
                value += r;
            }
        } else {
            value = opt->get_default_str();
        }
        snap[key] = value;
    }
    return snap;
}

struct Manifest {
    std::string command;
    Json config;
    std::uint64_t seed = 0;
    Json inputs = Json::object();
    Json outputs = Json::object();
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void write(const fs::path& dir) {
        outputs["manifest"] = (dir / "manifest.json").string();
        Json j = {{"command", command},
                  {"config", config},
                  {"seed", seed},
                  {"inputs", inputs},
                  {"outputs", outputs},
                  {"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()},
                  {"version", bckm::version}};
        bckm::write_json_file((dir / "manifest.json").string(), j);
    }
};

std::vector<int> parse_int_list(const std::string& text, const char* what) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) {
            continue;
        }
        try {
            std::size_t used = 0;
            int v = std::stoi(item, &used);
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
            out.push_back(v);
        } catch (const std::exception&) {
            throw bckm::InvalidArgument(std::string(what) + ": '" + item + "' is not an integer");
        }
    }
    if (out.empty()) {
        throw bckm::InvalidArgument(std::string(what) + " is empty");
    }
    return out;
}

std::vector<std::string> parse_word_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

// ---- gen --------------------------------------------------------------

struct GenArgs {
    bckm::SynthSpec spec;
    std::string out = ".";
};

void write_instance(const fs::path& dir, const bckm::SynthInstance& inst) {
    fs::create_directories(dir);
    bckm::save_csv((dir / "data.csv").string(), inst.generated.data);
    bckm::save_csv((dir / "truth.csv").string(), inst.generated.truth);
    bckm::save_constraints((dir / "constraints.json").string(), inst.constraints);
}

int run_gen(const GenArgs& a, const CLI::App* sub) {
    Manifest m{"gen", config_snapshot(sub), a.spec.seed};
    auto inst = bckm::make_instance(a.spec);
    fs::path dir(a.out);
    write_instance(dir, inst);
    m.outputs = {{"data", (dir / "data.csv").string()},
                 {"truth", (dir / "truth.csv").string()},
                 {"constraints", (dir / "constraints.json").string()}};
    m.write(dir);
    std::cout << "wrote " << inst.generated.data.size() << " points (d=" << a.spec.d << ", k=" << a.spec.k
              << ") to " << dir.string() << "\n";
    return exit_ok;
}

// ---- fit --------------------------------------------------------------

struct FitArgs {
    std::string algo = "bckm";
    std::string data;
    std::string constraints;
    int k = 0;
    std::string out = ".";
    std::uint64_t seed = 0;
    double lambda = 1e-4;
    double eps_c = 1e-6;
    int max_iter = 100;
    double rho0 = 0.5;
    double kappa = 1.1;
    int inner_max_iter = 100;
    double eps_s = 1e-6;
    bool retry = true;
    bool break_stalls = true;
    int restarts = 10;
    std::string dump_lp;
};

bckm::FitResult run_algorithm(const std::string& algo, const bckm::DataMatrix& x, const bckm::ConstraintSet& cs,
                              const FitArgs& a, const std::string& dump_lp) {
    bckm::LloydConfig lc{a.restarts, a.max_iter, a.seed};
    if (algo == "lloyd") {
        auto r = bckm::lloyd(x, cs.num_clusters(), lc);
        bckm::attach_audit(r, cs);
        return r;
    }
    if (algo != "bckm" && algo != "lp-round") {
        throw bckm::InvalidArgument("unknown algorithm '" + algo + "' (expected bckm, lloyd or lp-round)");
    }
    bckm::internal::require_feasible(cs, x.size(), cs.num_clusters());
    bckm::Matrix s0 = bckm::lloyd(x, cs.num_clusters(), lc).assignment.values();
    if (!dump_lp.empty()) {
        auto c = bckm::update_centroids(x, s0, a.lambda);
        auto y = bckm::compute_distance_matrix(x, c);
        bckm::LinearProgram lp;
        if (algo == "bckm") {
            bckm::Matrix rho = bckm::Matrix::Constant(s0.rows(), s0.cols(), a.rho0);
            lp = bckm::build_penalty_lp(y, cs, s0, rho, rho);
        } else {
            lp = bckm::build_relaxed_lp(y, cs);
        }
        std::ofstream out(dump_lp);
        if (!out) {
            throw bckm::Error("cannot write " + dump_lp);
        }
        bckm::write_mps(out, lp);
    }
    if (algo == "lp-round") {
        bckm::LpRoundConfig cfg;
        cfg.lambda = a.lambda;
        cfg.eps_c = a.eps_c;
        cfg.max_iter = a.max_iter;
        cfg.seed = a.seed;
        cfg.init = lc;
        return bckm::lp_relax_round(x, cs, cfg);
    }
    bckm::BckmConfig cfg;
    cfg.lambda = a.lambda;
    cfg.eps_c = a.eps_c;
    cfg.max_iter = a.max_iter;
    cfg.seed = a.seed;
    cfg.init_restarts = a.restarts;
    cfg.assignment.rho0 = a.rho0;
    cfg.assignment.kappa = a.kappa;
    cfg.assignment.max_iter = a.inner_max_iter;
    cfg.assignment.eps_s = a.eps_s;
    cfg.assignment.retry_with_squared_kappa = a.retry;
    cfg.assignment.break_stalls = a.break_stalls;
    return bckm::fit(x, cs, cfg, s0);
}

bckm::ConstraintSet constraints_or_plain(const std::string& path, int k) {
    if (!path.empty()) {
        auto cs = bckm::load_constraints(path);
        if (k > 0 && k != cs.num_clusters()) {
            throw bckm::InvalidArgument("--k " + std::to_string(k) + " disagrees with the constraints file (k=" +
                                        std::to_string(cs.num_clusters()) + ")");
        }
        return cs;
    }
    if (k < 1) {
        throw bckm::InvalidArgument("give --constraints or --k");
    }
    return bckm::ConstraintSet::unconstrained(k);
}

int run_fit(const FitArgs& a, const CLI::App* sub) {
    Manifest m{"fit", config_snapshot(sub), a.seed};
    auto x = bckm::load_csv(a.data);
    auto cs = constraints_or_plain(a.constraints, a.k);
    m.inputs = {{"data", a.data}, {"constraints", a.constraints}};

    fs::path dir(a.out);
    fs::create_directories(dir);
    auto result = run_algorithm(a.algo, x, cs, a, a.dump_lp);
    bckm::save_csv((dir / "labels.csv").string(), result.labels);
    bckm::write_json_file((dir / "result.json").string(), bckm::to_json(result));
    m.outputs = {{"labels", (dir / "labels.csv").string()}, {"result", (dir / "result.json").string()}};
    if (!a.dump_lp.empty()) {
        m.outputs["lp"] = a.dump_lp;
    }
    m.write(dir);

    auto sizes = result.labels.cluster_sizes();
    std::cout << a.algo << ": " << (result.converged ? "converged" : "not converged") << " after "
              << result.outer_iterations << " iterations, wcss " << result.wcss << ", "
              << result.violations.size_violations.size() << " size and "
              << result.violations.link_violation_count() << " link violations\n";
    return result.converged ? exit_ok : exit_unconverged;
}

// ---- eval -------------------------------------------------------------

struct EvalArgs {
    std::string data;
    std::string labels;
    std::string truth;
    std::string constraints;
    std::string out = ".";
};

int run_eval(const EvalArgs& a, const CLI::App* sub) {
    Manifest m{"eval", config_snapshot(sub)};
    auto x = bckm::load_csv(a.data);
    std::optional<bckm::ConstraintSet> cs;
    if (!a.constraints.empty()) {
        cs = bckm::load_constraints(a.constraints);
    }
    auto labels = cs ? bckm::load_labels(a.labels, cs->num_clusters()) : bckm::load_labels(a.labels);
    if (!cs) {
        cs = bckm::ConstraintSet::unconstrained(labels.num_clusters());
    }
    std::optional<bckm::LabelVector> truth;
    if (!a.truth.empty()) {
        truth = bckm::load_labels(a.truth);
    }
    auto report = bckm::evaluate_labels(x, labels, truth, *cs);
    fs::path dir(a.out);
    fs::create_directories(dir);
    bckm::write_json_file((dir / "report.json").string(), bckm::to_json(report));
    {
        std::ofstream out(dir / "report.csv");
        out << bckm::eval_csv_header() << '\n' << bckm::eval_csv_row(report) << '\n';
    }
    m.inputs = {{"data", a.data}, {"labels", a.labels}, {"truth", a.truth}, {"constraints", a.constraints}};
    m.outputs = {{"report", (dir / "report.json").string()}, {"report_csv", (dir / "report.csv").string()}};
    m.write(dir);
    if (report.nmi) {
        std::cout << "nmi " << *report.nmi << ", ";
    }
    std::cout << "wcss " << report.wcss << ", " << report.violations.size_violations.size() << " size and "
              << report.violations.link_violation_count() << " link violations\n";
    return exit_ok;
}

// ---- bench ------------------------------------------------------------

struct BenchArgs {
    std::string k_list = "2,5,10";
    std::string algos = "bckm,lloyd";
    std::string seeds = "0";
    int total = 500;
    int d = 512;
    double sigma = 0.1;
    double link_fraction = 0.2;
    std::string out = ".";
    FitArgs fit;
};

int run_bench(const BenchArgs& a, const CLI::App* sub) {
    Manifest m{"bench", config_snapshot(sub)};
    auto ks = parse_int_list(a.k_list, "--k-list");
    auto seeds = parse_int_list(a.seeds, "--seeds");
    auto algos = parse_word_list(a.algos);
    fs::path dir(a.out);
    fs::create_directories(dir / "instances");
    fs::create_directories(dir / "labels");
    std::ofstream table(dir / "results.csv");
    table << "k,algo,seed,nmi,seconds,feasible\n";
    for (int k : ks) {
        if (k < 1 || k > a.total) {
            throw bckm::InvalidArgument("k=" + std::to_string(k) + " outside [1, N]");
        }
        for (int seed : seeds) {
            bckm::SynthSpec spec{k, a.total / k, a.d, a.sigma, a.link_fraction, static_cast<std::uint64_t>(seed)};
            auto inst = bckm::make_instance(spec);
            std::string cell = "k" + std::to_string(k) + "_seed" + std::to_string(seed);
            write_instance(dir / "instances" / cell, inst);
            for (const auto& algo : algos) {
                FitArgs fa = a.fit;
                fa.seed = static_cast<std::uint64_t>(seed);
                auto r = run_algorithm(algo, inst.generated.data, inst.constraints, fa, "");
                bckm::save_csv((dir / "labels" / (cell + "_" + algo + ".csv")).string(), r.labels);
                std::ostringstream row;
                row << k << ',' << algo << ',' << seed << ',';
                bckm::internal::write_double(row, bckm::nmi(r.labels, inst.generated.truth));
                row << ',';
                bckm::internal::write_double(row, r.seconds);
                row << ',' << (r.violations.empty() ? "true" : "false") << '\n';
                table << row.str() << std::flush;
                std::cout << row.str();
            }
        }
    }
    m.outputs = {{"results", (dir / "results.csv").string()},
                 {"instances", (dir / "instances").string()},
                 {"labels", (dir / "labels").string()}};
    m.write(dir);
    return exit_ok;
}

void add_fit_options(CLI::App* sub, FitArgs& a) {
    sub->add_option("--seed", a.seed, "seed for the Lloyd initialization");
    sub->add_option("--lambda", a.lambda, "centroid regularizer");
    sub->add_option("--eps-c", a.eps_c, "centroid convergence threshold");
    sub->add_option("--max-iter", a.max_iter, "outer iterations");
    sub->add_option("--rho0", a.rho0, "initial penalty");
    sub->add_option("--kappa", a.kappa, "penalty growth rate");
    sub->add_option("--inner-max-iter", a.inner_max_iter, "penalty-loop iterations per assignment step");
    sub->add_option("--eps-s", a.eps_s, "penalty-loop convergence threshold");
    sub->add_option("--retry", a.retry, "retry an unconverged assignment step with kappa squared");
    sub->add_option("--break-stalls", a.break_stalls, "repoint and boost penalties of columns stuck fractional");
    sub->add_option("--restarts", a.restarts, "Lloyd restarts");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constrained K-Means with binary assignment optimization"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    std::string config;

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "generate a Gaussian blob benchmark instance");
    gen_cmd->add_option("--k", gen.spec.k, "clusters");
    gen_cmd->add_option("--n", gen.spec.n, "points per cluster");
    gen_cmd->add_option("--d", gen.spec.d, "dimension");
    gen_cmd->add_option("--sigma", gen.spec.sigma, "per-coordinate standard deviation");
    gen_cmd->add_option("--link-fraction", gen.spec.link_fraction, "fraction of each cluster used for links");
    gen_cmd->add_option("--seed", gen.spec.seed, "random seed");
    gen_cmd->add_option("--out", gen.out, "output directory");
    gen_cmd->add_option("--config", config, "JSON config or manifest");

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "cluster a data file");
    fit_cmd->add_option("--algo", fit.algo, "bckm, lloyd or lp-round")
        ->check(CLI::IsMember({"bckm", "lloyd", "lp-round"}));
    fit_cmd->add_option("--data", fit.data, "data CSV, one point per row");
    fit_cmd->add_option("--constraints", fit.constraints, "constraints JSON");
    fit_cmd->add_option("--k", fit.k, "clusters when no constraints file is given");
    fit_cmd->add_option("--out", fit.out, "output directory");
    fit_cmd->add_option("--dump-lp", fit.dump_lp, "write the first assignment LP in MPS format");
    add_fit_options(fit_cmd, fit);
    fit_cmd->add_option("--config", config, "JSON config or manifest");

    EvalArgs ev;
    auto* eval_cmd = app.add_subcommand("eval", "score a labeling");
    eval_cmd->add_option("--data", ev.data, "data CSV");
    eval_cmd->add_option("--labels", ev.labels, "labels CSV");
    eval_cmd->add_option("--truth", ev.truth, "ground-truth labels CSV");
    eval_cmd->add_option("--constraints", ev.constraints, "constraints JSON");
    eval_cmd->add_option("--out", ev.out, "output directory");
    eval_cmd->add_option("--config", config, "JSON config or manifest");

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "sweep k on generated instances");
    bench_cmd->add_option("--k-list", bench.k_list, "comma-separated cluster counts");
    bench_cmd->add_option("--algos", bench.algos, "comma-separated algorithms");
    bench_cmd->add_option("--seeds", bench.seeds, "comma-separated seeds");
    bench_cmd->add_option("--N", bench.total, "total points (n = N / k per cluster)");
    bench_cmd->add_option("--d", bench.d, "dimension");
    bench_cmd->add_option("--sigma", bench.sigma, "per-coordinate standard deviation");
    bench_cmd->add_option("--link-fraction", bench.link_fraction, "fraction of each cluster used for links");
    bench_cmd->add_option("--out", bench.out, "output directory");
    add_fit_options(bench_cmd, bench.fit);
    bench_cmd->remove_option(bench_cmd->get_option("--seed"));
    bench_cmd->add_option("--config", config, "JSON config or manifest");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_error;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        if (!config.empty()) {
            apply_config(sub, config);
        }
        if (sub == gen_cmd) {
            return run_gen(gen, sub);
        }
        if (sub == fit_cmd) {
            if (fit.data.empty()) {
                throw bckm::InvalidArgument("fit needs --data");
            }
            return run_fit(fit, sub);
        }
        if (sub == eval_cmd) {
            if (ev.data.empty() || ev.labels.empty()) {
                throw bckm::InvalidArgument("eval needs --data and --labels");
            }
            return run_eval(ev, sub);
        }
        return run_bench(bench, sub);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_error;
    }
}
