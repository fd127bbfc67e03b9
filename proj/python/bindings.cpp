#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "eulsolve/chain.hpp"
#include "eulsolve/generators.hpp"
#include "eulsolve/io.hpp"
#include "eulsolve/rcdd.hpp"
#include "eulsolve/solver.hpp"

namespace py = pybind11;
using namespace eulsolve;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

std::vector<double> from_array(py::array_t<double, py::array::c_style | py::array::forcecast> a) {
    return std::vector<double>(a.data(), a.data() + a.size());
}

py::array_t<double> dense_to_array(const DenseMatrix& m) {
    py::array_t<double> out({m.rows(), m.cols()});
    std::copy(m.data().begin(), m.data().end(), out.mutable_data());
    return out;
}

DenseMatrix array_to_dense(py::array_t<double, py::array::c_style | py::array::forcecast> a) {
    if (a.ndim() != 2) throw InvalidInput("expected a 2-d array");
    std::vector<double> data(a.data(), a.data() + a.size());
    return DenseMatrix(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)),
                       std::move(data));
}

SparsifierConfig make_config(const std::string& backend, double delta, double oversample) {
    SparsifierConfig cfg;
    cfg.backend = backend == "passthrough" ? SparsifierBackend::passthrough
                                           : SparsifierBackend::sample_patch;
    cfg.delta = delta;
    cfg.oversample = oversample;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_eulsolve, m) {
    m.doc() = "Eulerian directed Laplacian solver via sparsified block elimination";

    py::register_exception<Error>(m, "EulsolveError");

    py::class_<DirectedLaplacian>(m, "DirectedLaplacian")
        .def_property_readonly("n", &DirectedLaplacian::order)
        .def_property_readonly("nnz", [](const DirectedLaplacian& l) { return l.matrix().nnz(); })
        .def_property_readonly("eulerian", &DirectedLaplacian::eulerian_flag)
        .def("diag", [](const DirectedLaplacian& l) { return to_array(l.diag()); })
        .def("to_dense",
             [](const DirectedLaplacian& l) {
                 return dense_to_array(DenseMatrix::from_sparse(l.matrix()));
             })
        .def("triplets",
             [](const DirectedLaplacian& l) {
                 std::vector<int> rows, cols;
                 std::vector<double> vals;
                 for (const auto& t : l.matrix().triplets()) {
                     rows.push_back(t.row);
                     cols.push_back(t.col);
                     vals.push_back(t.value);
                 }
                 return py::make_tuple(rows, cols, vals);
             })
        .def("spmv", [](const DirectedLaplacian& l, py::array_t<double> x) {
            return to_array(l.matrix().multiply(from_array(x)));
        });

    m.def(
        "build_laplacian",
        [](const std::vector<std::tuple<int, int, double>>& edges, int n) {
            std::vector<Edge> es;
            es.reserve(edges.size());
            for (const auto& [s, d, w] : edges) es.push_back({s, d, w});
            return DirectedLaplacian::build(es, n);
        },
        py::arg("edges"), py::arg("n"),
        "Build a directed Laplacian from (src, dst, weight) edges.");

    m.def("read_laplacian", [](const std::string& path) {
        return DirectedLaplacian::from_matrix(read_matrix_market(path));
    });
    m.def("write_laplacian", [](const std::string& path, const DirectedLaplacian& l) {
        write_matrix_market(path, l.matrix());
    });

    m.def("gen", [](const std::string& family, int n, int mm, std::uint64_t seed) {
        return gen_family(family, n, mm, {seed, 0});
    }, py::arg("family"), py::arg("n"), py::arg("m") = 0, py::arg("seed") = 1);

    m.def("is_eulerian",
          [](const DirectedLaplacian& l, double tol) { return is_eulerian(l, tol); },
          py::arg("laplacian"), py::arg("tol") = 1e-9);
    m.def("undirectify", [](const DirectedLaplacian& l) {
        return dense_to_array(DenseMatrix::from_sparse(undirectify(l)));
    });
    m.def("rcdd_margin", [](const DirectedLaplacian& l) -> py::object {
        auto margin = rcdd_margin(l.matrix());
        if (!margin) return py::none();
        return py::float_(*margin);
    });
    m.def("find_rcdd",
          [](const DirectedLaplacian& l, double alpha, std::uint64_t seed) {
              return find_rcdd(l, alpha, {seed, 0});
          },
          py::arg("laplacian"), py::arg("alpha") = 0.25, py::arg("seed") = 1);

    m.def("exact_schur", [](py::array_t<double> a, const std::vector<int>& f) {
        DenseMatrix m2 = array_to_dense(a);
        return dense_to_array(exact_schur(m2, Partition::from_f(f, m2.rows())));
    });
    m.def("exact_pbe",
          [](const DirectedLaplacian& l, const std::vector<int>& f, int k) {
              PbePair pbe = exact_pbe(l, Partition::from_f(f, l.order()), k);
              return py::make_tuple(dense_to_array(pbe.l), dense_to_array(pbe.a));
          });
    m.def("asym_measure", [](py::array_t<double> a, py::array_t<double> u) {
        AsymMeasureReport rep = asym_measure(array_to_dense(a), array_to_dense(u));
        return py::make_tuple(rep.value, rep.kernel_ok);
    });
    m.def("laplacian_pinv_apply", [](const DirectedLaplacian& l, py::array_t<double> b) {
        return to_array(laplacian_pinv_apply(DenseMatrix::from_sparse(l.matrix()),
                                             from_array(b)));
    });

    m.def("sparse_schur",
          [](const DirectedLaplacian& l, const std::vector<int>& f, double delta,
             const std::string& backend, std::uint64_t seed) {
              return sparse_schur(l, Partition::from_f(f, l.order()), delta,
                                  make_config(backend, delta, 16.0), {seed, 0});
          },
          py::arg("laplacian"), py::arg("f"), py::arg("delta") = 0.5,
          py::arg("backend") = "sample_patch", py::arg("seed") = 1);

    m.def("spar_e",
          [](const DirectedLaplacian& l, double delta, const std::string& backend,
             std::uint64_t seed) {
              return spar_e(l, delta, make_config(backend, delta, 16.0), {seed, 0});
          },
          py::arg("laplacian"), py::arg("delta") = 0.5, py::arg("backend") = "sample_patch",
          py::arg("seed") = 1);

    py::class_<SchurChain>(m, "SchurChain")
        .def_property_readonly("depth", &SchurChain::depth)
        .def_property_readonly("n", [](const SchurChain& c) { return c.n; })
        .def_property_readonly("total_nnz", &SchurChain::total_nnz)
        .def_property_readonly("level_sizes",
                               [](const SchurChain& c) {
                                   std::vector<int> out;
                                   for (const auto& lv : c.levels)
                                       out.push_back(static_cast<int>(lv.global_ids.size()));
                                   return out;
                               })
        .def("save", [](const SchurChain& c, const std::string& dir) { save_chain(c, dir); });

    m.def("load_chain", &load_chain);
    m.def(
        "build_chain",
        [](const DirectedLaplacian& l, double alpha, double delta, const std::string& backend,
           std::uint64_t seed) {
            ChainConfig cfg;
            cfg.alpha = alpha;
            cfg.delta = delta;
            cfg.sparsifier = make_config(backend, delta, 16.0);
            return build_chain(l, cfg, {seed, 0});
        },
        py::arg("laplacian"), py::arg("alpha") = 0.25, py::arg("delta") = 0.1,
        py::arg("backend") = "sample_patch", py::arg("seed") = 1);

    m.def("validate_chain",
          [](const SchurChain& c, const DirectedLaplacian& l, int oracle_cap) {
              ChainReport rep = validate_chain(c, l, oracle_cap);
              py::dict out;
              out["partition_ok"] = rep.partition_ok;
              out["shrinkage_ok"] = rep.shrinkage_ok;
              out["rcdd_ok"] = rep.rcdd_ok;
              out["approx_ok"] = rep.approx_ok;
              out["domination_ok"] = rep.domination_ok;
              out["eulerian_ok"] = rep.eulerian_ok;
              out["connectivity_ok"] = rep.connectivity_ok;
              out["spectral_checked"] = rep.spectral_checked;
              out["measured_delta"] = rep.measured_delta;
              out["declared_delta"] = rep.declared_delta;
              out["all_ok"] = rep.all_ok();
              return out;
          },
          py::arg("chain"), py::arg("laplacian"), py::arg("oracle_cap") = 600);

    m.def(
        "solve",
        [](const DirectedLaplacian& l, py::array_t<double> b, const SchurChain& chain,
           double eps, int inner_steps) {
            SolveConfig cfg;
            cfg.eps = eps;
            cfg.inner_steps = inner_steps;
            SolveResult res = solve(l, b.size() ? from_array(b) : std::vector<double>{}, chain,
                                    cfg);
            py::dict rep;
            rep["iterations"] = res.report.iterations;
            rep["estimated_error"] = res.report.estimated_error;
            rep["stagnated"] = res.report.stagnated;
            rep["projected_b"] = res.report.projected_b;
            rep["inner_steps"] = res.report.inner_steps;
            rep["wall_ms"] = res.report.wall_ms;
            return py::make_tuple(to_array(res.x), rep);
        },
        py::arg("laplacian"), py::arg("b"), py::arg("chain"), py::arg("eps") = 1e-8,
        py::arg("inner_steps") = 0);
}
