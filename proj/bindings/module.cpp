#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mfrac/cascade.hpp"
#include "mfrac/harness.hpp"
#include "mfrac/io.hpp"
#include "mfrac/mrm.hpp"
#include "mfrac/mrw.hpp"
#include "mfrac/stats.hpp"

namespace py = pybind11;
using namespace mfrac;

namespace {

py::array_t<double> blocks_array(const Realization& r) {
    const long npb = r.per_block();
    py::array_t<double> out({r.grid.L, npb});
    std::copy(r.values.begin(), r.values.end(), out.mutable_data());
    return out;
}

Realization realization_from_array(py::array_t<double, py::array::c_style | py::array::forcecast> a,
                                   bool measure) {
    if (a.ndim() != 2)
        throw ShapeError("expected a 2-D array of shape (L, 2^level)");
    const long L = static_cast<long>(a.shape(0));
    const long npb = static_cast<long>(a.shape(1));
    if (npb <= 0 || (npb & (npb - 1)) != 0)
        throw ShapeError("per-block length must be a power of two");
    Realization r;
    int level = 0;
    while ((1L << level) < npb)
        ++level;
    r.level = level;
    r.kind = measure ? SeriesKind::Measure : SeriesKind::Increments;
    r.grid.T = 1.0;
    r.grid.n = level;
    r.grid.L = L;
    r.grid.chi = (L > 1 && level > 0) ? std::log2(static_cast<double>(L)) / level : 0.0;
    r.grid.delta = std::exp2(-static_cast<double>(level));
    r.values.assign(a.data(), a.data() + L * npb);
    return r;
}

ScalingModel model_from_kwargs(const std::string& family, double lambda2, double alpha,
                               double sigma, double w_s2, const std::vector<double>& atoms,
                               const std::vector<double>& probs, const std::string& base) {
    const LogBase lb = base == "base2" ? LogBase::Base2 : LogBase::Natural;
    if (family == "lognormal")
        return ScalingModel::log_normal(lambda2, lb);
    if (family == "poisson") {
        if (!atoms.empty())
            return ScalingModel::poisson_cascade({atoms, probs}, lb);
        return ScalingModel::poisson_cascade_lognormal_w(w_s2, lb);
    }
    if (family == "stable")
        return alpha < 1.0 ? ScalingModel::stable_sub(alpha, sigma)
                           : ScalingModel::stable_super(alpha, sigma);
    throw ParseError("unknown family: " + family);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "multifractal cascade / MRM / MRW simulation and zeta estimation";

    py::register_exception<Error>(m, "MfracError");

    py::class_<ScalingModel>(m, "ScalingModel")
        .def(py::init(&model_from_kwargs), py::arg("family"), py::arg("lambda2") = 0.0,
             py::arg("alpha") = 0.0, py::arg("sigma") = 0.0, py::arg("w_s2") = 0.0,
             py::arg("atoms") = std::vector<double>{}, py::arg("probs") = std::vector<double>{},
             py::arg("base") = "natural")
        .def("__repr__", &ScalingModel::describe);

    m.def("psi", &psi, py::arg("model"), py::arg("q"));
    m.def("psi_prime", &psi_prime, py::arg("model"), py::arg("q"));
    m.def("zeta", &zeta, py::arg("model"), py::arg("q"));
    m.def("zeta_h", &zeta_h, py::arg("model"), py::arg("H"), py::arg("q"));
    m.def("moment_gap", &moment_gap, py::arg("model"), py::arg("p"), py::arg("q"));
    m.def(
        "critical_exponents",
        [](const ScalingModel& model, double chi) {
            const CriticalExponents ce = critical_exponents(model, chi);
            py::dict d;
            d["q_max"] = ce.q_max;
            d["q_0"] = ce.q_0;
            d["q_chi"] = ce.q_chi;
            d["chi"] = ce.chi;
            return d;
        },
        py::arg("model"), py::arg("chi") = 0.0);

    m.def("cone_overlap", &cone_overlap, py::arg("T"), py::arg("l"), py::arg("tau"));

    m.def(
        "sample_cascade",
        [](const ScalingModel& model, int n, double chi, double T, int depth_extra,
           std::uint64_t seed, int level, int threads) {
            const MixedGrid grid = MixedGrid::make(T, n, chi);
            return blocks_array(
                sample_cascade(model, grid, depth_extra, seed, level, threads).data);
        },
        py::arg("model"), py::arg("n"), py::arg("chi") = 0.0, py::arg("T") = 1.0,
        py::arg("depth_extra") = 12, py::arg("seed") = 1, py::arg("level") = -1,
        py::arg("threads") = 1);

    m.def(
        "sample_mrm",
        [](const ScalingModel& model, int n, double chi, double T, int oversample,
           std::uint64_t seed, int level, int threads) {
            const MixedGrid grid = MixedGrid::make(T, n, chi);
            return blocks_array(sample_mrm(model, grid, oversample, seed, level, threads).data);
        },
        py::arg("model"), py::arg("n"), py::arg("chi") = 0.0, py::arg("T") = 1.0,
        py::arg("oversample") = 3, py::arg("seed") = 1, py::arg("level") = -1,
        py::arg("threads") = 1);

    m.def(
        "sample_mrw",
        [](const ScalingModel& model, double H, int n, double chi, double T, int oversample,
           std::uint64_t seed, int level, int threads) {
            const MixedGrid grid = MixedGrid::make(T, n, chi);
            return blocks_array(
                sample_mrw(model, H, grid, oversample, seed, level, threads).data);
        },
        py::arg("model"), py::arg("H"), py::arg("n"), py::arg("chi") = 0.0, py::arg("T") = 1.0,
        py::arg("oversample") = 3, py::arg("seed") = 1, py::arg("level") = -1,
        py::arg("threads") = 1);

    m.def(
        "sample_fgn",
        [](double H, long count, std::uint64_t seed) {
            RngStream rng(seed, {purpose::fgn});
            const auto xs = sample_fgn(H, count, rng);
            py::array_t<double> out(static_cast<py::ssize_t>(xs.size()));
            std::copy(xs.begin(), xs.end(), out.mutable_data());
            return out;
        },
        py::arg("H"), py::arg("count"), py::arg("seed") = 1);

    m.def(
        "structure_function",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> values, bool measure,
           const std::vector<double>& q_list, const std::vector<int>& levels) {
            const Realization r = realization_from_array(values, measure);
            const StructureTable t = structure_function(r, q_list, levels);
            py::array_t<double> out(
                {static_cast<long>(t.levels.size()), static_cast<long>(t.q_list.size())});
            std::copy(t.S.begin(), t.S.end(), out.mutable_data());
            return out;
        },
        py::arg("values"), py::arg("measure"), py::arg("q"), py::arg("levels"));

    m.def(
        "zeta_curve",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> values, bool measure,
           const std::vector<double>& q_list, int level_lo, int level_hi,
           const std::string& method, long bootstrap, std::uint64_t seed) {
            const Realization r = realization_from_array(values, measure);
            const EstimateReport rep =
                zeta_curve(r, q_list, level_lo, level_hi,
                           method == "regression" ? CurveMethod::Regression : CurveMethod::Ratio,
                           bootstrap, seed);
            py::dict d;
            d["q"] = rep.q_list;
            d["zeta_tilde"] = rep.zeta_tilde;
            d["zeta_hat"] = rep.zeta_hat;
            d["stderr"] = rep.std_error;
            d["method"] = rep.method;
            return d;
        },
        py::arg("values"), py::arg("measure"), py::arg("q"), py::arg("level_lo"),
        py::arg("level_hi"), py::arg("method") = "ratio", py::arg("bootstrap") = 200,
        py::arg("seed") = 0);

    m.def(
        "asymptotic_rate",
        [](const ScalingModel& model, const std::string& process, double q, double chi) {
            return asymptotic_rate(model, process_from_string(process), q, chi);
        },
        py::arg("model"), py::arg("process"), py::arg("q"), py::arg("chi"));

    m.def(
        "ks_normal_test",
        [](const std::vector<double>& samples) {
            const KsResult r = ks_normal_test(samples);
            return py::make_tuple(r.statistic, r.p_value);
        },
        py::arg("samples"));

    m.def(
        "verify_json",
        [](const std::string& config_text, int threads) {
            const ExperimentConfig cfg = parse_config_text(config_text);
            if (cfg.experiment_kind == "rate")
                return mc_report_json(rate_experiment(cfg.exp, cfg.n_list, threads));
            if (cfg.experiment_kind == "covariance") {
                const DecayKind kind =
                    cfg.exp.process == Process::Mrm ? DecayKind::Mrm : DecayKind::MrwSigma;
                return covariance_decay_json(covariance_decay(
                    cfg.exp.model, kind, cfg.exp.q_list.at(0), cfg.exp.n, cfg.k_list, cfg.exp.R,
                    cfg.exp.seed, cfg.exp.oversample, cfg.exp.H, threads));
            }
            return mc_report_json(run_replications(cfg.exp, threads));
        },
        py::arg("config_text"), py::arg("threads") = 1);

#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#else
    m.attr("__version__") = "dev";
#endif
}
