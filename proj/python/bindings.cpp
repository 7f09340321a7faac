#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kdsum/baselines.hpp"
#include "kdsum/clustering.hpp"
#include "kdsum/datagen.hpp"
#include "kdsum/error.hpp"
#include "kdsum/evaluation.hpp"
#include "kdsum/harness.hpp"
#include "kdsum/mscv.hpp"
#include "kdsum/similarity.hpp"

namespace py = pybind11;
using namespace kdsum;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// kinds: one of "continuous"/"unordered"/"ordered" (or c/u/o) per column, already in
// continuous, unordered, ordered order; levels: level count per column, 0 for continuous.
TypedDataset make_dataset(const Array& x, const std::vector<std::string>& kinds, const std::vector<int>& levels) {
    if (x.ndim() != 2) throw ValidationError("data must be a 2-d array");
    auto n = static_cast<std::size_t>(x.shape(0)), p = static_cast<std::size_t>(x.shape(1));
    if (kinds.size() != p) throw ValidationError("need one kind per column");
    if (!levels.empty() && levels.size() != p) throw ValidationError("need one level count per column");
    std::vector<VariableSchema> schema;
    for (std::size_t k = 0; k < p; ++k) {
        VariableSchema s;
        s.name = "x" + std::to_string(k + 1);
        s.kind = parse_kind(kinds[k]);
        if (s.kind != VariableKind::Continuous) {
            int top = 0;
            for (std::size_t i = 0; i < n; ++i) top = std::max(top, int(x.at(i, k)) + 1);
            s.levels = levels.empty() ? top : levels[k];
        }
        schema.push_back(std::move(s));
    }
    return TypedDataset(std::move(schema), std::vector<double>(x.data(), x.data() + n * p));
}

Array to_array(const DissimilarityMatrix& dm) {
    Array out({dm.n(), dm.n()});
    std::copy(dm.entries().begin(), dm.entries().end(), out.mutable_data());
    return out;
}

DissimilarityMatrix from_array(const Array& d) {
    if (d.ndim() != 2 || d.shape(0) != d.shape(1)) throw ValidationError("matrix must be square");
    auto n = static_cast<std::size_t>(d.shape(0));
    return DissimilarityMatrix(n, std::vector<double>(d.data(), d.data() + n * n));
}

}  // namespace

PYBIND11_MODULE(_kdsum, m) {
    m.doc() = "Kernel dissimilarity for mixed-type data";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.def(
        "distance_matrix",
        [](const Array& x, const std::vector<std::string>& kinds, const std::vector<double>& bandwidths,
           const std::vector<int>& levels, const std::string& kernel) {
            auto ds = make_dataset(x, kinds, levels);
            SimilarityConfig cfg{{parse_kernel(kernel)}, validate_bandwidths(bandwidths, ds)};
            return to_array(build_matrix(ds, cfg));
        },
        py::arg("x"), py::arg("kinds"), py::arg("bandwidths"), py::arg("levels") = std::vector<int>{},
        py::arg("kernel") = "gaussian");

    m.def(
        "select_bandwidths",
        [](const Array& x, const std::vector<std::string>& kinds, const std::vector<int>& levels, int restarts,
           std::uint64_t seed) {
            auto ds = make_dataset(x, kinds, levels);
            OptimizerOptions opt;
            opt.restarts = restarts;
            opt.seed = seed;
            CvResult cv;
            {
                py::gil_scoped_release release;
                cv = select_bandwidths(ds, {}, opt);
            }
            py::dict out;
            out["bandwidths"] = cv.bandwidths.values();
            out["objective"] = cv.objective;
            out["converged"] = cv.converged;
            out["evaluations"] = cv.evaluations;
            return out;
        },
        py::arg("x"), py::arg("kinds"), py::arg("levels") = std::vector<int>{}, py::arg("restarts") = 10,
        py::arg("seed") = 0);

    m.def(
        "mscv_objective",
        [](const Array& x, const std::vector<std::string>& kinds, const std::vector<double>& bandwidths,
           const std::vector<int>& levels) {
            auto ds = make_dataset(x, kinds, levels);
            return mscv_objective(ds, validate_bandwidths(bandwidths, ds));
        },
        py::arg("x"), py::arg("kinds"), py::arg("bandwidths"), py::arg("levels") = std::vector<int>{});

    m.def(
        "baseline_matrix",
        [](const Array& x, const std::vector<std::string>& kinds, const std::string& metric,
           const std::vector<int>& levels) {
            return to_array(baseline_matrix(make_dataset(x, kinds, levels), parse_baseline(metric)));
        },
        py::arg("x"), py::arg("kinds"), py::arg("metric"), py::arg("levels") = std::vector<int>{});

    m.def(
        "hac",
        [](const Array& d, const std::string& linkage) {
            auto dg = hac(from_array(d), parse_linkage(linkage));
            std::vector<std::tuple<std::size_t, std::size_t, double>> merges;
            for (const auto& mg : dg.merges) merges.emplace_back(mg.left, mg.right, mg.height);
            return merges;
        },
        py::arg("d"), py::arg("linkage") = "average");

    m.def(
        "cluster",
        [](const Array& d, std::size_t k, const std::string& algo, const std::string& linkage, std::uint64_t seed) {
            return cluster_labels(from_array(d), parse_algo(algo), parse_linkage(linkage), k, seed);
        },
        py::arg("d"), py::arg("k"), py::arg("algo") = "hac", py::arg("linkage") = "average", py::arg("seed") = 0);

    m.def(
        "ari", [](const std::vector<int>& t, const std::vector<int>& p) { return ari(t, p); }, py::arg("truth"),
        py::arg("pred"));
    m.def(
        "clustering_accuracy",
        [](const std::vector<int>& t, const std::vector<int>& p) { return clustering_accuracy(t, p); },
        py::arg("truth"), py::arg("pred"));

    m.def(
        "simulate",
        [](int sim, std::uint64_t seed) {
            auto s = gen_sim(SimSpec{sim, seed, {}});
            Array x({s.data.n(), s.data.p()});
            std::copy(s.data.values().begin(), s.data.values().end(), x.mutable_data());
            std::vector<std::string> kinds;
            std::vector<int> levels;
            for (const auto& v : s.data.schema()) {
                kinds.emplace_back(kind_name(v.kind));
                levels.push_back(v.levels);
            }
            return py::make_tuple(x, kinds, levels, s.labels);
        },
        py::arg("sim"), py::arg("seed") = 0);
}
