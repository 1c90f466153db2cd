// Python bindings for the core library. Complex matrices cross the boundary
// as 2-D numpy arrays of complex128; models and systems stay opaque handles.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mimoae/ae.hpp"
#include "mimoae/baseline.hpp"
#include "mimoae/channel.hpp"
#include "mimoae/constellation.hpp"
#include "mimoae/errors.hpp"
#include "mimoae/eval.hpp"
#include "mimoae/linalg.hpp"
#include "mimoae/nn.hpp"
#include "mimoae/rng.hpp"

namespace py = pybind11;
using namespace mimoae;

namespace {

ComplexMatrix to_matrix(const py::array_t<cplx>& arr) {
    py::buffer_info info = arr.request();
    if (info.ndim != 2)
        throw InvalidInputError("expected a 2-D complex array");
    ComplexMatrix m(std::size_t(info.shape[0]), std::size_t(info.shape[1]));
    auto view = arr.unchecked<2>();
    for (py::ssize_t r = 0; r < info.shape[0]; ++r)
        for (py::ssize_t c = 0; c < info.shape[1]; ++c)
            m(std::size_t(r), std::size_t(c)) = view(r, c);
    return m;
}

py::array_t<cplx> from_matrix(const ComplexMatrix& m) {
    py::array_t<cplx> arr({m.rows(), m.cols()});
    auto view = arr.mutable_unchecked<2>();
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c)
            view(py::ssize_t(r), py::ssize_t(c)) = m(r, c);
    return arr;
}

py::array_t<cplx> points_array(const Constellation& c) {
    return py::array_t<cplx>(
        std::vector<py::ssize_t>{py::ssize_t(c.size())},
        std::vector<py::ssize_t>{py::ssize_t(sizeof(cplx))},
        c.points().data());
}

StoppingRule make_rule(std::uint64_t min_errors, std::uint64_t max_symbols) {
    StoppingRule rule;
    rule.min_errors = min_errors;
    rule.max_symbols = max_symbols;
    return rule;
}

TrainConfig make_config(double snr_db, std::size_t updates, std::size_t batch,
                        double lr, std::uint64_t seed) {
    TrainConfig cfg;
    cfg.snr_db = snr_db;
    cfg.updates = updates;
    cfg.batch = batch;
    cfg.lr = lr;
    cfg.seed = seed;
    return cfg;
}

} // namespace

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "MIMO autoencoder and classical baseline simulator";

    py::register_exception<InvalidInputError>(mod, "InvalidInputError",
                                              PyExc_ValueError);
    py::register_exception<FormatError>(mod, "FormatError", PyExc_ValueError);
    py::register_exception<DivergenceError>(mod, "DivergenceError",
                                            PyExc_RuntimeError);

    py::class_<Constellation>(mod, "Constellation")
        .def(py::init([](const std::string& name) {
                 return Constellation::build(name);
             }),
             py::arg("name"))
        .def_static(
            "custom",
            [](const std::vector<cplx>& points, const std::string& name) {
                return Constellation::custom(points, name);
            },
            py::arg("points"), py::arg("name"))
        .def_property_readonly("points", &points_array)
        .def_property_readonly("name", &Constellation::name)
        .def("__len__", &Constellation::size)
        .def("__repr__", [](const Constellation& c) {
            return "Constellation('" + c.name() + "', " +
                   std::to_string(c.size()) + " points)";
        });

    mod.def("q_function", &q_function, py::arg("x"));
    mod.def("ser_analytic", &ser_analytic, py::arg("constellation"),
            py::arg("gamma"));
    mod.def(
        "ser_montecarlo",
        [](const Constellation& c, double gamma, std::uint64_t seed,
           std::uint64_t min_errors, std::uint64_t max_symbols) {
            RngStream stream(seed, 0);
            MonteCarloSer r =
                ser_montecarlo(c, gamma, stream, min_errors, max_symbols);
            return py::make_tuple(r.ser, r.errors, r.symbols);
        },
        py::arg("constellation"), py::arg("gamma"), py::arg("seed") = 1,
        py::arg("min_errors") = 100, py::arg("max_symbols") = 10000000,
        "Returns (ser, errors, symbols).");
    mod.def(
        "detect",
        [](const Constellation& c, cplx y, cplx gain, double n0) {
            return detect(c, y, gain, n0);
        },
        py::arg("constellation"), py::arg("y"), py::arg("gain"),
        py::arg("n0") = 1.0);
    mod.def("save_constellation", &save_constellation, py::arg("constellation"),
            py::arg("path"));
    mod.def("load_constellation", &load_constellation, py::arg("path"));

    mod.def(
        "svd",
        [](const py::array_t<cplx>& h) {
            SvdResult r = svd(to_matrix(h));
            return py::make_tuple(from_matrix(r.u), r.sigma, from_matrix(r.v));
        },
        py::arg("h"), "Thin SVD; returns (u, sigma, v) with h = u diag(s) v^H.");
    mod.def(
        "pseudo_inverse",
        [](const py::array_t<cplx>& h) {
            return from_matrix(pseudo_inverse(to_matrix(h)));
        },
        py::arg("h"));
    mod.def(
        "sample_channel",
        [](std::size_t n_r, std::size_t n_t, std::uint64_t seed,
           std::uint64_t stream_index) {
            RngStream stream(seed, stream_index);
            return from_matrix(sample_channel(stream, n_r, n_t, 1).h);
        },
        py::arg("n_r"), py::arg("n_t"), py::arg("seed") = 1,
        py::arg("stream_index") = 0);

    mod.def(
        "alamouti_encode",
        [](std::size_t s1, std::size_t s2, const Constellation& c, double p_t) {
            return from_matrix(alamouti_encode(s1, s2, c, p_t));
        },
        py::arg("s1"), py::arg("s2"), py::arg("constellation"),
        py::arg("p_t") = 1.0);
    mod.def(
        "alamouti_ml_detect",
        [](const py::array_t<cplx>& y, const py::array_t<cplx>& h,
           const Constellation& c, double p_t, double n0) {
            auto r = alamouti_ml_detect(to_matrix(y), to_matrix(h), c, p_t, n0);
            return py::make_tuple(r.first, r.second);
        },
        py::arg("y"), py::arg("h"), py::arg("constellation"),
        py::arg("p_t") = 1.0, py::arg("n0") = 1.0);

    mod.def(
        "solve_allocation",
        [](const std::vector<double>& sigma, std::size_t m, double p_t,
           double n0) {
            Allocation a = solve_allocation(sigma, m, p_t, n0,
                                            default_catalog());
            py::list names, sizes, powers;
            for (const StreamAllocation& s : a.streams) {
                names.append(s.constellation.name());
                sizes.append(s.constellation.size());
                powers.append(s.power);
            }
            py::dict out;
            out["constellations"] = names;
            out["sizes"] = sizes;
            out["powers"] = powers;
            out["objective"] = a.objective;
            return out;
        },
        py::arg("sigma"), py::arg("m"), py::arg("p_t") = 1.0,
        py::arg("n0") = 1.0,
        "Bit and power allocation across singular-value streams.");

    py::class_<AeSystem, std::shared_ptr<AeSystem>>(mod, "AeSystem")
        .def_property_readonly(
            "kind", [](const AeSystem& s) { return to_string(s.kind); })
        .def_property_readonly("m", [](const AeSystem& s) { return s.m; })
        .def_property_readonly(
            "alphabet", [](const AeSystem& s) { return message_alphabet(s); })
        .def("__repr__", [](const AeSystem& s) {
            return "AeSystem(" + to_string(s.kind) +
                   ", m=" + std::to_string(s.m) + ")";
        });

    mod.def(
        "build_system",
        [](const std::string& kind, std::size_t m, std::uint64_t seed) {
            RngStream init(seed, 0);
            return std::make_shared<AeSystem>(
                build_system(system_kind_from_string(kind), m, init));
        },
        py::arg("kind"), py::arg("m"), py::arg("seed") = 1);
    mod.def(
        "train",
        [](AeSystem& sys, double snr_db, std::size_t updates,
           std::size_t batch, double lr, std::uint64_t seed) {
            return train(sys,
                         make_config(snr_db, updates, batch, lr, seed));
        },
        py::arg("system"), py::arg("snr_db") = 15.0, py::arg("updates") = 1,
        py::arg("batch") = 2048, py::arg("lr") = 1e-3, py::arg("seed") = 1,
        "Adam on all networks; returns the loss trace.");
    mod.def("save_system", &save_system, py::arg("system"), py::arg("path"));
    mod.def(
        "load_system",
        [](const std::string& kind, std::size_t m, const std::string& path) {
            return std::make_shared<AeSystem>(
                load_system(system_kind_from_string(kind), m, path));
        },
        py::arg("kind"), py::arg("m"), py::arg("path"));
    mod.def("extract_siso_constellation", &extract_siso_constellation,
            py::arg("system"));
    mod.def(
        "extract_openloop_codebook",
        [](const AeSystem& sys) {
            py::list out;
            for (const ComplexMatrix& x : extract_openloop_codebook(sys))
                out.append(from_matrix(x));
            return out;
        },
        py::arg("system"));
    mod.def(
        "train_siso_shaping",
        [](std::size_t m, double snr_db, std::size_t updates,
           std::size_t batch, double lr, std::uint64_t seed) {
            return train_siso_shaping(
                m, make_config(snr_db, updates, batch, lr, seed));
        },
        py::arg("m") = 16, py::arg("snr_db") = 12.0, py::arg("updates") = 2000,
        py::arg("batch") = 2048, py::arg("lr") = 1e-3, py::arg("seed") = 1);

    py::class_<SerPoint>(mod, "SerPoint")
        .def_readonly("snr_db", &SerPoint::snr_db)
        .def_readonly("ser", &SerPoint::ser)
        .def_readonly("symbols", &SerPoint::symbols)
        .def_readonly("errors", &SerPoint::errors)
        .def("__repr__", [](const SerPoint& p) {
            return "SerPoint(snr_db=" + std::to_string(p.snr_db) +
                   ", ser=" + std::to_string(p.ser) + ")";
        });

    mod.def(
        "ae_ser_sweep",
        [](std::shared_ptr<AeSystem> sys, const std::vector<double>& snrs,
           std::uint64_t min_errors, std::uint64_t max_symbols,
           std::uint64_t seed, int threads) {
            SerCurve curve = ser_sweep(
                make_ae_transceiver(sys), snrs,
                make_rule(min_errors, max_symbols), seed,
                to_string(sys->kind) + "-ae", threads);
            return curve.points;
        },
        py::arg("system"), py::arg("snrs"), py::arg("min_errors") = 100,
        py::arg("max_symbols") = 10000000, py::arg("seed") = 1,
        py::arg("threads") = 1);
    mod.def(
        "baseline_ser_sweep",
        [](const std::string& scheme, const std::string& constellation,
           std::size_t m, const std::vector<double>& snrs,
           std::uint64_t min_errors, std::uint64_t max_symbols,
           std::uint64_t seed, int threads) {
            Transceiver trx;
            if (scheme == "alamouti")
                trx = make_alamouti_transceiver(
                    Constellation::build(constellation));
            else if (scheme == "svd")
                trx = make_svd_qpsk_transceiver();
            else if (scheme == "svd-alloc")
                trx = make_svd_alloc_transceiver(m);
            else if (scheme == "zf")
                trx = make_zf_transceiver(Constellation::build(constellation));
            else if (scheme == "awgn")
                trx = make_awgn_transceiver(Constellation::build(constellation));
            else
                throw InvalidInputError("unknown scheme '" + scheme + "'");
            SerCurve curve = ser_sweep(trx, snrs,
                                       make_rule(min_errors, max_symbols),
                                       seed, scheme, threads);
            return curve.points;
        },
        py::arg("scheme"), py::arg("constellation") = "qpsk",
        py::arg("m") = 16, py::arg("snrs") = std::vector<double>{0, 12, 24},
        py::arg("min_errors") = 100, py::arg("max_symbols") = 10000000,
        py::arg("seed") = 1, py::arg("threads") = 1);

    mod.def("set_blas_threads", &set_blas_threads, py::arg("n"));
}
