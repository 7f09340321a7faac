#include <CLI11.hpp>
#include <json.hpp>

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "kdsum/baselines.hpp"
#include "kdsum/clustering.hpp"
#include "kdsum/datagen.hpp"
#include "kdsum/error.hpp"
#include "kdsum/evaluation.hpp"
#include "kdsum/harness.hpp"
#include "kdsum/io.hpp"
#include "kdsum/mscv.hpp"
#include "kdsum/similarity.hpp"

using json = nlohmann::ordered_json;
using namespace kdsum;

namespace {

constexpr const char* kVersion = "0.1.0";

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Globals {
    std::uint64_t seed = 0;
    int threads = 0;
    std::string out;
    std::string command_line;
};

// Everything that goes into <out>.manifest.json.
struct Manifest {
    json config = json::object();
    json inputs = json::object();
    json stages = json::object();
    json extra = json::object();

    void input(const std::string& path, const std::string& bytes) { inputs[path] = fnv1a_hex(bytes); }
};

std::string slurp(Manifest& m, const std::string& path) {
    auto text = read_file(path);
    m.input(path, text);
    return text;
}

void emit(const Globals& g, const std::string& text) {
    if (g.out.empty() || g.out == "-") std::cout << text;
    else write_file(g.out, text);
}

void write_manifest(const Globals& g, const std::string& command, const Manifest& m) {
    if (g.out.empty() || g.out == "-") return;
    json j;
    j["tool"] = "kdsum";
    j["version"] = kVersion;
    j["command"] = command;
    j["command_line"] = g.command_line;
    j["seed"] = g.seed;
    j["threads"] = g.threads;
    j["config"] = m.config;
    j["inputs"] = m.inputs;
    j["stage_seconds"] = m.stages;
    for (auto it = m.extra.begin(); it != m.extra.end(); ++it) j[it.key()] = it.value();
    write_file(g.out + ".manifest.json", j.dump(2) + "\n");
}

std::string header_block(const Globals& g, const std::string& command) {
    std::ostringstream os;
    os << "# kdsum " << kVersion << " " << command << "\n";
    os << "# command_line: " << g.command_line << "\n";
    os << "# seed: " << g.seed << "\n";
    return os.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double to_real(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
    if (used == 0 || used != s.size()) throw ValidationError(what + ": '" + s + "' is not a number");
    return v;
}

std::vector<double> parse_reals(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) out.push_back(to_real(cur, what));
        cur.clear();
    };
    for (char c : text) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) flush();
        else cur += c;
    }
    flush();
    return out;
}

// Plain list of numbers, a JSON array, or the JSON written by `bandwidth`.
std::vector<double> read_bandwidth_file(Manifest& m, const std::string& path, const TypedDataset& ds) {
    auto text = slurp(m, path);
    auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) throw ValidationError(path + ": empty bandwidth file");
    if (text[first] != '{' && text[first] != '[') return parse_reals(text, path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
    if (j.is_object() && j.contains("bandwidths")) j = j["bandwidths"];
    std::vector<double> out;
    if (j.is_array()) {
        for (const auto& v : j) {
            if (!v.is_number()) throw ValidationError(path + ": bandwidths must be numbers");
            out.push_back(v.get<double>());
        }
        return out;
    }
    if (!j.is_object()) throw ValidationError(path + ": expected a list or an object of bandwidths");
    for (const auto& v : ds.schema()) {
        if (!j.contains(v.name) || !j[v.name].is_number())
            throw ValidationError(path + ": no bandwidth for column '" + v.name + "'");
        out.push_back(j[v.name].get<double>());
    }
    return out;
}

std::vector<Linkage> parse_linkages(const std::string& text) {
    if (text == "all") return {std::begin(kAllLinkages), std::end(kAllLinkages)};
    std::vector<Linkage> out;
    for (const auto& s : split(text, ',')) out.push_back(parse_linkage(s));
    return out;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
    std::vector<std::size_t> out;
    if (text.empty()) return out;
    for (double v : parse_reals(text, "--sizes")) {
        if (v < 1 || v != std::floor(v)) throw ValidationError("--sizes entries must be positive integers");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

// Options shared by every command that builds a distance matrix.
struct DistanceFlags {
    std::string data, schema;
    std::string metric = "kdsum";
    std::string kernel = "gaussian";
    std::string bandwidths;
    std::string bandwidth_file;
    std::optional<double> gamma;
    int restarts = 10;
    int max_evals = 0;
    bool aitken_cap = false;
    bool subsample = false;

    void add_data(CLI::App* sc) {
        sc->add_option("--data", data, "CSV file with a header row")->required();
        sc->add_option("--schema", schema, "column schema (JSON)")->required();
    }
    void add_optimizer(CLI::App* sc) {
        sc->add_option("--kernel", kernel, "continuous kernel: gaussian or epanechnikov")->capture_default_str();
        sc->add_option("--restarts", restarts, "Latin-hypercube starts besides the rule-of-thumb start")
            ->capture_default_str();
        sc->add_option("--max-evals", max_evals, "objective evaluations per start (0: 500 per variable)");
        sc->add_flag("--aitken-cap", aitken_cap, "cap unordered bandwidths at (levels-1)/levels");
        sc->add_flag("--subsample", subsample, "evaluate the objective on 2000 seeded rows when n > 2000");
    }
    void add_metric(CLI::App* sc) {
        sc->add_option("--metric", metric, "kdsum, gower, huang, podani or wishart")->capture_default_str();
        sc->add_option("--bandwidths", bandwidths, "fixed bandwidths, comma separated, in column order");
        sc->add_option("--bandwidth-file", bandwidth_file, "file with fixed bandwidths");
        sc->add_option("--gamma", gamma, "categorical weight for huang");
        add_optimizer(sc);
    }

    OptimizerOptions optimizer(std::uint64_t seed) const {
        OptimizerOptions o;
        o.restarts = restarts;
        o.seed = seed;
        o.max_evals = max_evals;
        o.aitken_cap = aitken_cap;
        o.subsample = subsample;
        return o;
    }

    DistanceOptions options(Manifest& m, const TypedDataset& ds, std::uint64_t seed) const {
        DistanceOptions d;
        d.metric = metric;
        d.kernels.continuous = parse_kernel(kernel);
        d.optimizer = optimizer(seed);
        d.gamma = gamma;
        if (!bandwidths.empty() && !bandwidth_file.empty())
            throw ValidationError("give either --bandwidths or --bandwidth-file, not both");
        if (!bandwidths.empty()) d.bandwidths = parse_reals(bandwidths, "--bandwidths");
        if (!bandwidth_file.empty()) d.bandwidths = read_bandwidth_file(m, bandwidth_file, ds);
        if (d.bandwidths && metric != "kdsum") throw ValidationError("bandwidths only apply to --metric kdsum");
        if (d.bandwidths && d.bandwidths->size() != ds.p())
            throw ValidationError("got " + std::to_string(d.bandwidths->size()) + " bandwidths for " +
                                  std::to_string(ds.p()) + " columns");
        m.config["metric"] = metric;
        if (metric == "kdsum") {
            m.config["kernels"] = {{"continuous", std::string(kernel_name(d.kernels.continuous))},
                                   {"unordered", "aitken"},
                                   {"ordered", "wang-van-ryzin"}};
            m.config["bandwidth_source"] = d.bandwidths ? "fixed" : "mscv";
            if (!d.bandwidths)
                m.config["optimizer"] = {{"restarts", restarts}, {"max_evals", max_evals}, {"aitken_cap", aitken_cap},
                                         {"subsample", subsample}, {"seed", seed}};
        }
        if (gamma) m.config["gamma"] = *gamma;
        return d;
    }

    TypedDataset load(Manifest& m) const {
        slurp(m, data);
        slurp(m, schema);
        return ingest_csv(data, schema);
    }
};

json bandwidth_json(const TypedDataset& ds, const std::vector<double>& bw) {
    json j = json::object();
    for (std::size_t k = 0; k < ds.p(); ++k) j[ds.schema()[k].name] = bw[k];
    return j;
}

json cv_json(const TypedDataset& ds, const CvResult& cv) {
    json j;
    j["bandwidths"] = bandwidth_json(ds, cv.bandwidths.values());
    j["objective"] = cv.objective;
    j["evaluations"] = cv.evaluations;
    j["restarts"] = cv.restarts;
    j["converged"] = cv.converged;
    j["subsampled"] = cv.subsampled;
    return j;
}

json report_json(const Report& r) {
    return {{"n", r.n}, {"k_true", r.k_true}, {"k_pred", r.k_pred}, {"ca", r.ca}, {"ari", r.ari}};
}

std::string matrix_text(const DissimilarityMatrix& dm) {
    std::ostringstream os;
    write_matrix(os, dm);
    return os.str();
}

std::string labels_text(const std::vector<int>& labels) {
    std::ostringstream os;
    write_labels(os, labels);
    return os.str();
}

std::vector<int> load_labels(Manifest& m, const std::string& path) { return parse_labels(slurp(m, path), path); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kernel distance metric for mixed-type data: distances, bandwidths, clustering and studies"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    Globals g;
    for (int i = 0; i < argc; ++i) g.command_line += (i ? " " : "") + std::string(argv[i]);
    app.add_option("--seed", g.seed, "master seed")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads (0: OpenMP default)");
    app.add_option("--out", g.out, "output file or prefix (default: standard output)");
    app.fallthrough();

    Manifest m;
    std::string command;

    // distance
    DistanceFlags dist;
    auto* c_distance = app.add_subcommand("distance", "compute a dissimilarity matrix");
    dist.add_data(c_distance);
    dist.add_metric(c_distance);

    // bandwidth
    DistanceFlags bwf;
    auto* c_bandwidth = app.add_subcommand("bandwidth", "select bandwidths by maximum-similarity cross-validation");
    bwf.add_data(c_bandwidth);
    bwf.add_optimizer(c_bandwidth);

    // cluster
    std::string matrix_path, algo = "hac", linkage = "average", merges_path;
    std::size_t k = 2;
    int replicates = 10, max_iter = 100;
    auto* c_cluster = app.add_subcommand("cluster", "cluster a dissimilarity matrix");
    c_cluster->add_option("--matrix", matrix_path, "matrix file (i,j,d)")->required();
    c_cluster->add_option("--algo", algo, "hac or kmeansdist")->capture_default_str();
    c_cluster->add_option("--linkage", linkage, "single, complete, average, ward, median or centroid")
        ->capture_default_str();
    c_cluster->add_option("--k", k, "number of clusters")->required();
    c_cluster->add_option("--replicates", replicates, "kmeansdist restarts")->capture_default_str();
    c_cluster->add_option("--max-iter", max_iter, "kmeansdist iterations")->capture_default_str();
    c_cluster->add_option("--merges", merges_path, "merge list for hac (default <out>.merges.csv)");

    // eval
    std::string true_path, pred_path;
    auto* c_eval = app.add_subcommand("eval", "compare predicted labels with the truth");
    c_eval->add_option("--true", true_path, "true labels")->required();
    c_eval->add_option("--pred", pred_path, "predicted labels")->required();

    // pipeline
    DistanceFlags pipe;
    std::string pipe_labels, pipe_algo = "hac", pipe_linkage = "average";
    std::size_t pipe_k = 2;
    auto* c_pipeline = app.add_subcommand("pipeline", "distance, clustering and evaluation in one run");
    pipe.add_data(c_pipeline);
    pipe.add_metric(c_pipeline);
    c_pipeline->add_option("--labels", pipe_labels, "true labels")->required();
    c_pipeline->add_option("--algo", pipe_algo, "hac or kmeansdist")->capture_default_str();
    c_pipeline->add_option("--linkage", pipe_linkage, "comma separated linkages or 'all'")->capture_default_str();
    c_pipeline->add_option("--k", pipe_k, "number of clusters")->required();

    // simulate
    std::string sim_name = "1", sim_sizes;
    MixedGenSpec mixed;
    auto* c_simulate = app.add_subcommand("simulate", "write a generated dataset (CSV, schema, labels)");
    c_simulate->add_option("--sim", sim_name,
                           "1-6, grid-continuous, grid-categorical, grid-categorical-2, grid-mixed or mixed")
        ->capture_default_str();
    c_simulate->add_option("--sizes", sim_sizes, "per-cluster sizes for sims 1-6, comma separated");
    auto add_mixed = [&](CLI::App* sc) {
        sc->add_option("--n", mixed.n, "rows for the mixed generator")->capture_default_str();
        sc->add_option("--ratio", mixed.ratio, "share of rows in cluster 0")->capture_default_str();
        sc->add_option("--continuous", mixed.continuous, "continuous columns")->capture_default_str();
        sc->add_option("--unordered", mixed.unordered, "unordered columns")->capture_default_str();
        sc->add_option("--ordered", mixed.ordered, "ordered columns")->capture_default_str();
        sc->add_option("--levels", mixed.levels, "levels per categorical column")->capture_default_str();
        sc->add_option("--continuous-overlap", mixed.continuous_overlap, "overlap area of the continuous densities")
            ->capture_default_str();
        sc->add_option("--categorical-overlap", mixed.categorical_overlap, "shared point mass of the categorical columns")
            ->capture_default_str();
    };
    add_mixed(c_simulate);

    // gridsearch
    DistanceFlags grid;
    std::string grid_labels, grid_algo = "kmeansdist", grid_linkage = "average";
    std::vector<std::string> axes_text;
    std::size_t grid_k = 2;
    int grid_reps = 10;
    bool allow_large = false, skip_mscv = false;
    auto* c_grid = app.add_subcommand("gridsearch", "score clustering over a bandwidth grid");
    grid.add_data(c_grid);
    grid.add_optimizer(c_grid);
    c_grid->add_option("--labels", grid_labels, "true labels")->required();
    c_grid->add_option("--axis", axes_text,
                       "lo:hi:step per column in column order (default 0:10:0.05 continuous, 0:0.75:0.05 unordered, "
                       "0:1:0.05 ordered)");
    c_grid->add_option("--algo", grid_algo, "hac or kmeansdist")->capture_default_str();
    c_grid->add_option("--linkage", grid_linkage, "linkage for hac")->capture_default_str();
    c_grid->add_option("--k", grid_k, "number of clusters")->required();
    c_grid->add_option("--replicates", grid_reps, "kmeansdist restarts")->capture_default_str();
    c_grid->add_flag("--allow-large", allow_large, "permit grids above one million points");
    c_grid->add_flag("--skip-mscv", skip_mscv, "do not add the cross-validated point");

    // montecarlo
    DistanceFlags mc;
    std::string mc_sim = "1", mc_sizes, mc_algo = "hac", mc_linkage = "average";
    std::size_t mc_k = 2;
    int reps = 100;
    bool progress = false;
    auto* c_mc = app.add_subcommand("montecarlo", "repeat generate-distance-cluster-evaluate over seeded replicates");
    c_mc->add_option("--sim", mc_sim, "1-6 or mixed")->capture_default_str();
    c_mc->add_option("--sizes", mc_sizes, "total sizes for the mixed generator, comma separated");
    c_mc->add_option("--reps", reps, "replicates per size")->capture_default_str();
    c_mc->add_option("--algo", mc_algo, "hac or kmeansdist")->capture_default_str();
    c_mc->add_option("--linkage", mc_linkage, "comma separated linkages or 'all'")->capture_default_str();
    c_mc->add_option("--k", mc_k, "number of clusters")->capture_default_str();
    c_mc->add_flag("--progress", progress, "report progress on standard error");
    c_mc->add_option("--metric", mc.metric, "kdsum, gower, huang, podani or wishart")->capture_default_str();
    c_mc->add_option("--bandwidths", mc.bandwidths, "fixed bandwidths instead of cross-validation");
    mc.add_optimizer(c_mc);
    add_mixed(c_mc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (g.threads < 0) throw ValidationError("--threads must be nonnegative");
#ifdef _OPENMP
        if (g.threads > 0) omp_set_num_threads(g.threads);
#endif

        if (*c_distance) {
            command = "distance";
            auto ds = dist.load(m);
            auto opts = dist.options(m, ds, g.seed);
            auto r = compute_distance(ds, opts);
            m.stages["distance"] = r.seconds;
            if (!r.bandwidths.empty()) m.extra["bandwidths"] = bandwidth_json(ds, r.bandwidths);
            if (r.cv) m.extra["cv"] = cv_json(ds, *r.cv);
            emit(g, matrix_text(r.matrix));
        } else if (*c_bandwidth) {
            command = "bandwidth";
            auto ds = bwf.load(m);
            KernelSelection ks{parse_kernel(bwf.kernel)};
            m.config["kernel"] = std::string(kernel_name(ks.continuous));
            m.config["optimizer"] = {{"restarts", bwf.restarts}, {"max_evals", bwf.max_evals},
                                     {"aitken_cap", bwf.aitken_cap}, {"subsample", bwf.subsample}};
            auto t0 = Clock::now();
            auto cv = select_bandwidths(ds, ks, bwf.optimizer(g.seed));
            m.stages["bandwidth"] = since(t0);
            emit(g, cv_json(ds, cv).dump(2) + "\n");
        } else if (*c_cluster) {
            command = "cluster";
            auto dm = parse_matrix(slurp(m, matrix_path), matrix_path);
            auto a = parse_algo(algo);
            auto l = parse_linkage(linkage);
            m.config = {{"algo", algo}, {"linkage", linkage}, {"k", k}};
            if (a == Algo::KMeansDist) m.config.update({{"replicates", replicates}, {"max_iter", max_iter}});
            auto t0 = Clock::now();
            std::vector<int> labels;
            if (a == Algo::Hac) {
                auto dg = hac(dm, l);
                labels = cut(dg, k);
                std::string mp = merges_path;
                if (mp.empty() && !g.out.empty() && g.out != "-") mp = g.out + ".merges.csv";
                if (!mp.empty()) {
                    std::ostringstream os;
                    os << "left,right,height\n";
                    for (const auto& mg : dg.merges) os << mg.left << ',' << mg.right << ',' << format_double(mg.height) << '\n';
                    write_file(mp, os.str());
                }
            } else {
                labels = kmeans_dist(dm, k, g.seed, max_iter, replicates).labels;
            }
            m.stages["cluster"] = since(t0);
            emit(g, labels_text(labels));
        } else if (*c_eval) {
            command = "eval";
            auto t = load_labels(m, true_path);
            auto p = load_labels(m, pred_path);
            if (t.size() != p.size())
                throw ValidationError("label files differ in length (" + std::to_string(t.size()) + " vs " +
                                      std::to_string(p.size()) + ")");
            emit(g, report_json(evaluate(t, p)).dump() + "\n");
        } else if (*c_pipeline) {
            command = "pipeline";
            auto ds = pipe.load(m);
            auto truth = load_labels(m, pipe_labels);
            auto opts = pipe.options(m, ds, g.seed);
            auto a = parse_algo(pipe_algo);
            auto links = parse_linkages(pipe_linkage);
            m.config.update({{"algo", pipe_algo}, {"linkage", pipe_linkage}, {"k", pipe_k}});
            auto r = run_pipeline(ds, truth, opts, a, links, pipe_k, g.seed);
            m.stages["distance"] = r.distance.seconds;
            json out;
            json methods = json::array();
            double cluster_secs = 0.0;
            for (const auto& mr : r.methods) {
                json j = report_json(mr.report);
                j["method"] = mr.method;
                j["seconds"] = r.distance.seconds + mr.seconds;
                methods.push_back(j);
                cluster_secs += mr.seconds;
            }
            m.stages["cluster"] = cluster_secs;
            out["methods"] = methods;
            out["best"] = methods[r.best];
            if (!r.distance.bandwidths.empty()) out["bandwidths"] = bandwidth_json(ds, r.distance.bandwidths);
            if (r.distance.cv) out["cv"] = cv_json(ds, *r.distance.cv);
            emit(g, out.dump(2) + "\n");
        } else if (*c_simulate) {
            command = "simulate";
            if (g.out.empty() || g.out == "-") throw ValidationError("simulate needs --out PREFIX");
            auto t0 = Clock::now();
            Sample s;
            if (sim_name == "grid-continuous") {
                s = gen_gridsearch_continuous(g.seed);
            } else if (sim_name == "grid-categorical" || sim_name == "grid-categorical-2") {
                s = gen_gridsearch_categorical(g.seed, sim_name == "grid-categorical");
            } else if (sim_name == "grid-mixed") {
                s = gen_gridsearch_mixed(g.seed);
            } else if (sim_name == "mixed") {
                mixed.seed = g.seed;
                s = gen_mixed(mixed);
                m.config["mixed"] = {{"n", mixed.n}, {"ratio", mixed.ratio}, {"continuous", mixed.continuous},
                                     {"unordered", mixed.unordered}, {"ordered", mixed.ordered},
                                     {"levels", mixed.levels}, {"continuous_overlap", mixed.continuous_overlap},
                                     {"categorical_overlap", mixed.categorical_overlap}};
            } else {
                int id = static_cast<int>(to_real(sim_name, "--sim"));
                if (std::to_string(id) != sim_name) throw ValidationError("unknown --sim '" + sim_name + "'");
                s = gen_sim({id, g.seed, parse_sizes(sim_sizes)});
            }
            m.config["sim"] = sim_name;
            m.stages["generate"] = since(t0);
            write_file(g.out + ".csv", format_csv(s.data));
            write_file(g.out + ".schema.json", format_schema(s.data));
            write_file(g.out + ".labels.csv", labels_text(s.labels));
            m.extra["files"] = {g.out + ".csv", g.out + ".schema.json", g.out + ".labels.csv"};
        } else if (*c_grid) {
            command = "gridsearch";
            auto ds = grid.load(m);
            auto truth = load_labels(m, grid_labels);
            std::vector<GridAxis> axes;
            if (axes_text.empty()) {
                for (const auto& v : ds.schema())
                    axes.push_back(parse_axis(v.kind == VariableKind::Continuous ? "0:10:0.05"
                                              : v.kind == VariableKind::Unordered ? "0:0.75:0.05"
                                                                                  : "0:1:0.05"));
            } else if (axes_text.size() == 1 && ds.p() > 1) {
                axes.assign(ds.p(), parse_axis(axes_text[0]));
            } else {
                for (const auto& t : axes_text) axes.push_back(parse_axis(t));
            }
            GridOptions go;
            go.kernels.continuous = parse_kernel(grid.kernel);
            go.algo = parse_algo(grid_algo);
            go.linkage = parse_linkage(grid_linkage);
            go.k = grid_k;
            go.seed = g.seed;
            go.replicates = grid_reps;
            go.allow_large = allow_large;
            json ax = json::array();
            for (std::size_t a = 0; a < axes.size(); ++a)
                ax.push_back({{"column", a < ds.p() ? ds.schema()[a].name : "?"}, {"lo", axes[a].lo},
                              {"hi", axes[a].hi}, {"step", axes[a].step}});
            m.config = {{"axes", ax}, {"algo", grid_algo}, {"k", grid_k}, {"kernel", grid.kernel}};
            if (go.algo == Algo::Hac) m.config["linkage"] = grid_linkage;
            else m.config["replicates"] = grid_reps;

            auto t0 = Clock::now();
            auto rows = run_gridsearch(ds, truth, axes, go);
            m.stages["grid"] = since(t0);

            std::ostringstream os;
            os << header_block(g, command);
            os << "# rows: " << rows.size() << "\n";
            if (!skip_mscv) {
                auto t1 = Clock::now();
                auto cv = select_bandwidths(ds, go.kernels, grid.optimizer(g.seed));
                auto dm = build_matrix(ds, SimilarityConfig{go.kernels, cv.bandwidths});
                auto pred = go.algo == Algo::Hac ? cut(hac(dm, go.linkage), go.k)
                                                 : kmeans_dist(dm, go.k, go.seed, 100, go.replicates).labels;
                auto rep = evaluate(truth, pred);
                m.stages["mscv"] = since(t1);
                json pt = cv_json(ds, cv);
                pt["ca"] = rep.ca;
                pt["ari"] = rep.ari;
                m.extra["mscv_point"] = pt;
                os << "# mscv:";
                for (double v : cv.bandwidths.values()) os << ' ' << format_double(v);
                os << " ca=" << format_double(rep.ca) << " ari=" << format_double(rep.ari) << "\n";
            }
            for (const auto& v : ds.schema()) os << "lambda_" << v.name << ',';
            os << "ca,ari\n";
            for (const auto& r : rows) {
                for (double v : r.lambda) os << format_double(v) << ',';
                os << format_double(r.ca) << ',' << format_double(r.ari) << '\n';
            }
            emit(g, os.str());
        } else if (*c_mc) {
            command = "montecarlo";
            MonteCarloSpec spec;
            if (mc_sim == "mixed") {
                spec.generator = "mixed";
                spec.mixed = mixed;
            } else {
                spec.generator = "sim";
                spec.sim = static_cast<int>(to_real(mc_sim, "--sim"));
                if (std::to_string(spec.sim) != mc_sim) throw ValidationError("unknown --sim '" + mc_sim + "'");
                default_sim_sizes(spec.sim);
            }
            spec.sizes = parse_sizes(mc_sizes);
            if (spec.generator == "sim" && !spec.sizes.empty())
                throw ValidationError("--sizes applies to the mixed generator only");
            spec.reps = reps;
            spec.distance.metric = mc.metric;
            spec.distance.kernels.continuous = parse_kernel(mc.kernel);
            spec.distance.optimizer = mc.optimizer(g.seed);
            if (!mc.bandwidths.empty()) spec.distance.bandwidths = parse_reals(mc.bandwidths, "--bandwidths");
            spec.algo = parse_algo(mc_algo);
            spec.linkages = parse_linkages(mc_linkage);
            spec.k = mc_k;
            spec.seed = g.seed;
            m.config = {{"generator", spec.generator}, {"sim", mc_sim}, {"sizes", spec.sizes}, {"reps", reps},
                        {"metric", mc.metric}, {"kernel", mc.kernel}, {"algo", mc_algo}, {"linkage", mc_linkage},
                        {"k", mc_k}, {"restarts", mc.restarts}};
            if (spec.generator == "mixed")
                m.config["mixed"] = {{"ratio", mixed.ratio}, {"continuous", mixed.continuous},
                                     {"unordered", mixed.unordered}, {"ordered", mixed.ordered},
                                     {"levels", mixed.levels}, {"continuous_overlap", mixed.continuous_overlap},
                                     {"categorical_overlap", mixed.categorical_overlap}};
            auto t0 = Clock::now();
            auto rows = run_montecarlo(spec, [&](std::size_t done, std::size_t total) {
                if (progress) std::fprintf(stderr, "\r%zu/%zu", done, total);
                if (progress && done == total) std::fprintf(stderr, "\n");
            });
            m.stages["montecarlo"] = since(t0);
            auto summary = summarize(rows);

            std::ostringstream per, sum;
            per << header_block(g, command);
            per << "size,rep,seed,method,ca,ari,seconds\n";
            for (const auto& r : rows)
                per << r.size << ',' << r.rep << ',' << r.seed << ',' << r.method << ',' << format_double(r.ca) << ','
                    << format_double(r.ari) << ',' << format_double(r.seconds) << '\n';
            sum << header_block(g, command + " summary");
            sum << "size,method,reps,mean_ca,median_ca,q05_ca,q95_ca,mean_ari,median_ari,q05_ari,q95_ari,mean_seconds\n";
            for (const auto& s : summary)
                sum << s.size << ',' << s.method << ',' << s.reps << ',' << format_double(s.mean_ca) << ','
                    << format_double(s.median_ca) << ',' << format_double(s.q05_ca) << ',' << format_double(s.q95_ca)
                    << ',' << format_double(s.mean_ari) << ',' << format_double(s.median_ari) << ','
                    << format_double(s.q05_ari) << ',' << format_double(s.q95_ari) << ','
                    << format_double(s.mean_seconds) << '\n';
            if (g.out.empty() || g.out == "-") {
                std::cout << sum.str();
            } else {
                write_file(g.out, per.str());
                write_file(g.out + ".summary.csv", sum.str());
            }
        }
        write_manifest(g, command, m);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
