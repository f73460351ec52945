#include "mfrac/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace mfrac {

using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

template <typename T>
T get_req(const json& j, const char* key) {
    if (!j.contains(key))
        throw ParseError(std::string("config: missing key \"") + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: key \"") + key + "\": " + e.what());
    }
}

template <typename T>
T get_or(const json& j, const char* key, T def) {
    if (!j.contains(key))
        return def;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: key \"") + key + "\": " + e.what());
    }
}

std::vector<double> get_q_list(const json& j) {
    if (!j.contains("q"))
        throw ParseError("config: missing key \"q\"");
    const auto& v = j.at("q");
    std::vector<double> q;
    if (v.is_array())
        q = v.get<std::vector<double>>();
    else if (v.is_number())
        q.push_back(v.get<double>());
    else
        throw ParseError("config: \"q\" must be a number or an array");
    return q;
}

ScalingModel model_from_config(const json& j, LogBase base) {
    const std::string family = get_req<std::string>(j, "family");
    if (family == "lognormal")
        return ScalingModel::log_normal(get_req<double>(j, "lambda2"), base);
    if (family == "poisson") {
        if (j.contains("atoms")) {
            DiscreteW w;
            w.atoms = get_req<std::vector<double>>(j, "atoms");
            w.probs = get_req<std::vector<double>>(j, "probs");
            return ScalingModel::poisson_cascade(std::move(w), base);
        }
        return ScalingModel::poisson_cascade_lognormal_w(get_req<double>(j, "w_s2"), base);
    }
    if (family == "stable") {
        const double alpha = get_req<double>(j, "alpha");
        const double sigma = get_req<double>(j, "sigma");
        if (base == LogBase::Base2)
            throw ValidationError("stable families have no cascade weight law");
        return alpha < 1.0 ? ScalingModel::stable_sub(alpha, sigma)
                           : ScalingModel::stable_super(alpha, sigma);
    }
    throw ParseError("config: unknown family \"" + family + "\"");
}

void append_double(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config: ") + e.what());
    }

    ExperimentConfig cfg;
    const std::string process = get_req<std::string>(j, "process");
    Experiment& exp = cfg.exp;
    if (process == "cascade") {
        exp.process = Process::Cascade;
        exp.model = model_from_config(j, LogBase::Base2);
    } else if (process == "mrm") {
        exp.process = Process::Mrm;
        exp.model = model_from_config(j, LogBase::Natural);
    } else if (process == "mrw") {
        exp.H = get_or<double>(j, "H", 0.5);
        exp.process = exp.H == 0.5 ? Process::MrwHalf : Process::MrwH;
        exp.model = model_from_config(j, LogBase::Natural);
    } else {
        throw ParseError("config: unknown process \"" + process + "\"");
    }

    exp.n = get_req<int>(j, "n");
    exp.chi = get_or<double>(j, "chi", 0.0);
    exp.T = get_or<double>(j, "T", 1.0);
    exp.q_list = get_q_list(j);
    exp.R = get_or<long>(j, "R", 200);
    exp.seed = get_or<std::uint64_t>(j, "seed", 1);
    exp.oversample = get_or<int>(j, "oversample", 3);
    exp.depth_extra = get_or<int>(j, "depth_extra", 12);

    cfg.experiment_kind = get_or<std::string>(j, "experiment", "consistency");
    if (cfg.experiment_kind == "consistency")
        exp.gate = Gate::Consistency;
    else if (cfg.experiment_kind == "clt" || cfg.experiment_kind == "rate")
        exp.gate = Gate::Clt;
    else if (cfg.experiment_kind == "covariance")
        exp.gate = Gate::None;
    else
        throw ParseError("config: unknown experiment kind \"" + cfg.experiment_kind + "\"");

    if (j.contains("theorem")) {
        // Explicit gate override, e.g. "cascade-clt"; must match the process.
        const std::string th = j.at("theorem").get<std::string>();
        if (th == "consistency") {
            exp.gate = Gate::Consistency;
        } else if (th.size() > 4 && th.substr(th.size() - 4) == "-clt") {
            const std::string proc = th.substr(0, th.size() - 4);
            const std::string mine = process_to_string(exp.process);
            if (proc != process && proc != mine)
                throw ValidationError("config: theorem \"" + th + "\" does not match process \"" +
                                      process + "\"");
            exp.gate = Gate::Clt;
        } else {
            throw ParseError("config: unknown theorem \"" + th + "\"");
        }
    }

    cfg.n_list = get_or<std::vector<int>>(j, "n_list", {});
    cfg.k_list = get_or<std::vector<long>>(j, "k_list", {});
    if (cfg.experiment_kind == "rate" && cfg.n_list.size() < 4)
        throw ValidationError("config: rate experiments need \"n_list\" with >= 4 levels");
    if (cfg.experiment_kind == "covariance" && cfg.k_list.empty())
        throw ValidationError("config: covariance experiments need \"k_list\"");

    const auto bad = validate_experiment(exp);
    if (!bad.empty()) {
        std::string msg = "config rejected:";
        for (const auto& b : bad)
            msg += "\n  " + b;
        throw ValidationError(msg);
    }
    return cfg;
}

ExperimentConfig parse_config(const std::string& path) { return parse_config_text(slurp(path)); }

void write_realization_csv(const std::string& path, const Realization& r) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open for writing: " + path);
    const char* name = r.kind == SeriesKind::Measure ? "mass" : "dx";
    out << "j,k," << name << "\n";
    std::string line;
    const long npb = r.per_block();
    for (long j = 0; j < r.grid.L; ++j) {
        for (long k = 0; k < npb; ++k) {
            line.clear();
            line += std::to_string(j);
            line += ',';
            line += std::to_string(k);
            line += ',';
            append_double(line, r.at(j, k));
            line += '\n';
            out << line;
        }
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw NonNumeric("not a number: \"" + s + "\"");
    return v;
}

bool is_pow2_long(long x) { return x > 0 && (x & (x - 1)) == 0; }

} // namespace

Realization read_realization_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw ShapeError("empty realization file: " + path);
    const auto header = split_csv_line(line);
    if (header.size() != 3 || header[0] != "j" || header[1] != "k")
        throw ShapeError("realization CSV must have header j,k,<value>");
    const SeriesKind kind = header[2] == "dx" ? SeriesKind::Increments : SeriesKind::Measure;

    std::vector<long> js, ks;
    std::vector<double> vs;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto cols = split_csv_line(line);
        if (cols.size() != 3)
            throw ShapeError("realization CSV row with " + std::to_string(cols.size()) +
                             " columns");
        js.push_back(static_cast<long>(parse_double(cols[0])));
        ks.push_back(static_cast<long>(parse_double(cols[1])));
        vs.push_back(parse_double(cols[2]));
    }
    if (vs.empty())
        throw ShapeError("realization CSV has no data rows");
    long L = 0, npb = 0;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        L = std::max(L, js[i] + 1);
        npb = std::max(npb, ks[i] + 1);
    }
    if (!is_pow2_long(npb))
        throw ShapeError("realization CSV: per-block count " + std::to_string(npb) +
                         " is not a power of two");
    if (static_cast<long>(vs.size()) != L * npb)
        throw ShapeError("realization CSV: expected " + std::to_string(L * npb) + " rows, got " +
                         std::to_string(vs.size()));

    Realization r;
    int level = 0;
    while ((1L << level) < npb)
        ++level;
    r.level = level;
    r.kind = kind;
    r.grid.T = 1.0;
    r.grid.n = level;
    r.grid.L = L;
    r.grid.chi = (L > 1 && level > 0) ? std::log2(static_cast<double>(L)) / level : 0.0;
    r.grid.delta = std::exp2(-static_cast<double>(level));
    r.values.assign(L * npb, 0.0);
    std::vector<char> seen(L * npb, 0);
    for (std::size_t i = 0; i < vs.size(); ++i) {
        const long idx = js[i] * npb + ks[i];
        if (js[i] < 0 || ks[i] < 0 || idx >= L * npb || seen[idx])
            throw ShapeError("realization CSV: bad or duplicate index (j=" +
                             std::to_string(js[i]) + ", k=" + std::to_string(ks[i]) + ")");
        seen[idx] = 1;
        r.values[idx] = vs[i];
    }
    return r;
}

Realization ingest_series(const std::string& path, SeriesFormat format, long L) {
    if (L < 1)
        throw ShapeError("ingest: L must be >= 1");
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw ShapeError("empty series file: " + path);
    const auto header = split_csv_line(line);
    std::size_t xcol = header.size();
    for (std::size_t c = 0; c < header.size(); ++c)
        if (header[c] == "x")
            xcol = c;
    if (xcol == header.size())
        throw ShapeError("series CSV needs a column named \"x\"");

    std::vector<double> xs;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto cols = split_csv_line(line);
        if (cols.size() <= xcol)
            throw ShapeError("series CSV row too short");
        xs.push_back(parse_double(cols[xcol]));
    }
    if (format == SeriesFormat::Levels) {
        if (xs.size() < 2)
            throw ShapeError("levels series needs at least 2 values");
        std::vector<double> diff(xs.size() - 1);
        for (std::size_t i = 0; i + 1 < xs.size(); ++i)
            diff[i] = xs[i + 1] - xs[i];
        xs = std::move(diff);
    }
    if (xs.empty() || static_cast<long>(xs.size()) % L != 0)
        throw ShapeError("series length " + std::to_string(xs.size()) +
                         " is not divisible into L = " + std::to_string(L) + " blocks");
    const long npb = static_cast<long>(xs.size()) / L;
    if (!is_pow2_long(npb))
        throw ShapeError("series per-block length " + std::to_string(npb) +
                         " is not a power of two");

    Realization r;
    int level = 0;
    while ((1L << level) < npb)
        ++level;
    r.level = level;
    r.kind = SeriesKind::Increments;
    r.grid.T = 1.0;
    r.grid.n = level;
    r.grid.L = L;
    r.grid.chi = (L > 1 && level > 0) ? std::log2(static_cast<double>(L)) / level : 0.0;
    r.grid.delta = std::exp2(-static_cast<double>(level));
    r.values = std::move(xs);
    return r;
}

std::string estimate_report_json(const EstimateReport& rep) {
    json j;
    j["method"] = rep.method;
    j["level_lo"] = rep.level_lo;
    j["level_hi"] = rep.level_hi;
    j["bootstrap"] = rep.bootstrap;
    j["q"] = rep.q_list;
    j["zeta_tilde"] = rep.zeta_tilde;
    j["zeta_hat"] = rep.zeta_hat;
    j["rate_exponent"] = rep.rate_exponent;
    j["stderr"] = rep.std_error;
    return j.dump(2) + "\n";
}

std::string estimate_report_csv(const EstimateReport& rep) {
    std::string out = "q,zeta_tilde,zeta_hat,rate_exponent,stderr\n";
    for (std::size_t i = 0; i < rep.q_list.size(); ++i) {
        append_double(out, rep.q_list[i]);
        out += ',';
        append_double(out, rep.zeta_tilde[i]);
        out += ',';
        append_double(out, rep.zeta_hat[i]);
        out += ',';
        append_double(out, rep.rate_exponent[i]);
        out += ',';
        append_double(out, rep.std_error[i]);
        out += '\n';
    }
    return out;
}

namespace {

json summary_json(const Summary& s) {
    json j;
    j["mean"] = s.mean;
    j["bias"] = s.bias;
    j["variance"] = s.variance;
    j["ks_stat"] = s.ks_stat;
    j["ks_pvalue"] = s.ks_pvalue;
    return j;
}

} // namespace

std::string mc_report_json(const McReport& rep) {
    json j;
    j["process"] = process_to_string(rep.process);
    j["model"] = rep.model;
    j["H"] = rep.H;
    j["n"] = rep.n;
    j["chi"] = rep.chi;
    j["L"] = rep.L;
    j["R"] = rep.R;
    j["seed"] = rep.seed;
    j["q"] = rep.q_list;
    j["truth"] = rep.truth;
    j["rate_exponent"] = rep.rate_exponent;
    json per_q = json::array();
    for (std::size_t qi = 0; qi < rep.q_list.size(); ++qi) {
        json e;
        e["q"] = rep.q_list[qi];
        e["truth"] = rep.truth[qi];
        if (qi < rep.tilde_summary.size())
            e["zeta_tilde"] = summary_json(rep.tilde_summary[qi]);
        if (qi < rep.hat_summary.size())
            e["zeta_hat"] = summary_json(rep.hat_summary[qi]);
        if (qi < rep.rate_exponent.size())
            e["rate_exponent"] = rep.rate_exponent[qi];
        per_q.push_back(e);
    }
    j["per_q"] = per_q;
    if (!rep.tilde.empty())
        j["samples_tilde"] = rep.tilde;
    if (!rep.hat.empty())
        j["samples_hat"] = rep.hat;
    if (!rep.n_list.empty()) {
        j["n_list"] = rep.n_list;
        j["var_by_n"] = rep.var_by_n;
        j["rate_slope"] = rep.rate_slope;
        j["rate_theory"] = rep.rate_theory;
    }
    j["wall_seconds"] = rep.wall_seconds;
    return j.dump(2) + "\n";
}

std::string mc_report_csv(const McReport& rep) {
    std::string out = "rep,q,zeta_tilde,zeta_hat\n";
    if (rep.tilde.size() != rep.q_list.size() || rep.hat.size() != rep.q_list.size())
        return out; // rate reports carry no per-replication samples
    for (std::size_t qi = 0; qi < rep.q_list.size(); ++qi) {
        for (std::size_t r = 0; r < rep.tilde[qi].size(); ++r) {
            out += std::to_string(r);
            out += ',';
            append_double(out, rep.q_list[qi]);
            out += ',';
            append_double(out, rep.tilde[qi][r]);
            out += ',';
            append_double(out, rep.hat[qi][r]);
            out += '\n';
        }
    }
    return out;
}

std::string covariance_decay_json(const CovarianceDecay& d) {
    json j;
    j["k"] = d.k_list;
    j["cov"] = d.cov;
    j["fitted_exponent"] = d.fitted_exponent;
    j["theory_bound"] = d.theory_bound;
    j["degenerate"] = d.degenerate;
    j["R"] = d.R;
    return j.dump(2) + "\n";
}

std::string mc_report_table(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("report: ") + e.what());
    }
    std::ostringstream os;
    os << "process " << j.value("process", std::string("?")) << "  model "
       << j.value("model", std::string("?")) << "\n";
    if (j.contains("n"))
        os << "n=" << j["n"] << "  chi=" << j.value("chi", 0.0) << "  L=" << j.value("L", 0)
           << "  R=" << j.value("R", 0) << "  seed=" << j.value("seed", 0) << "\n";
    if (j.contains("per_q")) {
        os << std::left << std::setw(8) << "q" << std::setw(12) << "truth" << std::setw(12)
           << "mean" << std::setw(12) << "bias" << std::setw(14) << "variance" << std::setw(12)
           << "ks_pvalue" << std::setw(10) << "rate r" << "\n";
        for (const auto& e : j["per_q"]) {
            const auto& zt = e.contains("zeta_tilde") ? e["zeta_tilde"] : json::object();
            auto num = [](const json& v, const char* k) -> std::string {
                if (!v.contains(k) || v[k].is_null())
                    return "-";
                std::ostringstream s;
                s << std::setprecision(5) << v[k].get<double>();
                return s.str();
            };
            os << std::left << std::setw(8) << e.value("q", 0.0) << std::setw(12)
               << num(e, "truth") << std::setw(12) << num(zt, "mean") << std::setw(12)
               << num(zt, "bias") << std::setw(14) << num(zt, "variance") << std::setw(12)
               << num(zt, "ks_pvalue") << std::setw(10) << num(e, "rate_exponent") << "\n";
        }
    }
    if (j.contains("n_list")) {
        os << "rate regression (log2 var vs n):\n";
        for (std::size_t qi = 0; qi < j["q"].size(); ++qi)
            os << "  q=" << j["q"][qi] << "  slope=" << j["rate_slope"][qi]
               << "  theory=" << j["rate_theory"][qi] << "\n";
    }
    if (j.contains("wall_seconds"))
        os << "wall " << j["wall_seconds"] << " s\n";
    return os.str();
}

std::vector<std::string> mc_report_datafiles(const std::string& json_text,
                                             const std::string& out_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("report: ") + e.what());
    }
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> written;

    if (j.contains("per_q")) {
        const std::string path = out_dir + "/summary.dat";
        std::ofstream out(path);
        out << "# q truth mean bias variance ks_pvalue\n";
        for (const auto& e : j["per_q"]) {
            const auto& zt = e["zeta_tilde"];
            out << e.value("q", 0.0) << " " << e.value("truth", 0.0) << " "
                << zt.value("mean", 0.0) << " " << zt.value("bias", 0.0) << " "
                << zt.value("variance", 0.0) << " " << zt.value("ks_pvalue", 0.0) << "\n";
        }
        written.push_back(path);
    }
    if (j.contains("n_list")) {
        const std::string path = out_dir + "/variance_vs_n.dat";
        std::ofstream out(path);
        out << "# n";
        for (const auto& q : j["q"])
            out << " var(q=" << q << ")";
        out << "\n";
        for (std::size_t ni = 0; ni < j["n_list"].size(); ++ni) {
            out << j["n_list"][ni];
            for (std::size_t qi = 0; qi < j["q"].size(); ++qi)
                out << " " << j["var_by_n"][qi][ni].get<double>();
            out << "\n";
        }
        written.push_back(path);
    }
    return written;
}

} // namespace mfrac
