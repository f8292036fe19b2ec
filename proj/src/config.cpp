#include "mslab/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "mslab/errors.hpp"

namespace mslab {

namespace {

using nlohmann::json;

const char* kKindGaussian = "gaussian";
const char* kKindFlatBall = "flat-ball";

void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                         const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (std::none_of(known.begin(), known.end(),
                         [&](const char* k) { return key == k; }))
            throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

DomainGrid grid_from_json(const json& j, const DomainGrid& base) {
    if (j.is_null()) return base;
    reject_unknown_keys(j, {"lo", "hi", "count"}, "grid");
    std::vector<double> lo, hi;
    std::vector<std::size_t> count;
    for (std::size_t a = 0; a < base.dim(); ++a) {
        lo.push_back(base.lo(a));
        hi.push_back(base.hi(a));
        count.push_back(base.count(a));
    }
    if (j.contains("lo")) lo = j.at("lo").get<std::vector<double>>();
    if (j.contains("hi")) hi = j.at("hi").get<std::vector<double>>();
    if (j.contains("count")) count = j.at("count").get<std::vector<std::size_t>>();
    return DomainGrid(lo, hi, count);
}

json grid_to_json(const DomainGrid& grid) {
    std::vector<double> lo, hi;
    std::vector<std::size_t> count;
    for (std::size_t a = 0; a < grid.dim(); ++a) {
        lo.push_back(grid.lo(a));
        hi.push_back(grid.hi(a));
        count.push_back(grid.count(a));
    }
    return {{"lo", lo}, {"hi", hi}, {"count", count}};
}

SinkFunction sink_from_json(const json& j, const SinkFunction& base) {
    if (j.is_null()) return base;
    reject_unknown_keys(j, {"kind", "center", "width", "strength", "file"}, "sink");
    const std::string kind = j.value("kind", std::string("zero"));
    if (kind == "zero") return SinkFunction::zero_sink();
    if (kind == "gaussian-well") {
        SinkFunction sink;
        sink.kind = SinkKind::gaussian_well;
        sink.center = j.value("center", base.center.empty()
                                            ? std::vector<double>{0.0}
                                            : base.center);
        sink.width = j.value("width", base.width);
        sink.strength = j.value("strength", base.strength);
        return sink;
    }
    if (kind == "tabulated") {
        if (!j.contains("file"))
            throw ConfigError("tabulated sink requires a 'file' path");
        const std::string path = j.at("file").get<std::string>();
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ConfigError("sink table not found: " + path);
        json table;
        in >> table;
        SinkFunction sink;
        sink.kind = SinkKind::tabulated;
        sink.grid = grid_from_json(table.at("grid"), DomainGrid());
        sink.time_samples = table.at("time_samples").get<std::vector<double>>();
        sink.values = table.at("values").get<std::vector<std::vector<double>>>();
        return sink;
    }
    throw ConfigError("unknown sink kind: " + kind);
}

json sink_to_json(const SinkFunction& sink) {
    switch (sink.kind) {
    case SinkKind::zero:
        return {{"kind", "zero"}};
    case SinkKind::gaussian_well:
        return {{"kind", "gaussian-well"},
                {"center", sink.center},
                {"width", sink.width},
                {"strength", sink.strength}};
    case SinkKind::tabulated:
        return {{"kind", "tabulated"},
                {"grid", grid_to_json(sink.grid)},
                {"time_samples", sink.time_samples.size()}};
    }
    return {};
}

} // namespace

const std::vector<std::string>& list_experiments() {
    static const std::vector<std::string> names = {
        "gaussian-collapse",  "mixture-convergence", "entropy-monitor",
        "instability-demo",   "meanshift-vs-pde",    "supervised-run",
    };
    return names;
}

ExperimentConfig default_config(const std::string& experiment) {
    ExperimentConfig c;
    c.experiment = experiment;
    c.meanshift.kernel.kind = KernelKind::gaussian;
    c.meanshift.kernel.bandwidth = 0.5;
    c.initial.weights = {1.0};
    c.initial.means = {{0.0}};
    c.initial.sigma2 = 2.0;
    c.evolution.a2 = 1.0;
    c.evolution.blowup_threshold = 1e6;

    if (experiment == "gaussian-collapse" || experiment == "entropy-monitor") {
        c.grid = DomainGrid::line(-12.0, 12.0, 768);
        c.evolution.t_start = -1.0;
        c.evolution.t_end = -0.1;
        c.evolution.substeps = 31;
        c.evolution.omega_max = 6.0;
    } else if (experiment == "mixture-convergence") {
        c.grid = DomainGrid::line(-14.0, 14.0, 897);
        c.evolution.t_start = -1.0;
        c.evolution.t_end = -0.05;
        c.evolution.substeps = 19;
        c.evolution.omega_max = 6.0;
        c.initial.weights = {0.5, 0.5};
        c.initial.means = {{-3.0}, {3.0}};
    } else if (experiment == "instability-demo") {
        c.grid = DomainGrid::line(-9.0, 9.0, 512);
        c.evolution.t_start = -0.5;
        c.evolution.t_end = 0.0;
        c.evolution.substeps = 1;
        c.initial.sigma2 = 1.0;
    } else if (experiment == "meanshift-vs-pde") {
        c.grid = DomainGrid::line(-12.0, 12.0, 769);
        c.evolution.t_start = -1.0;
        c.evolution.t_end = -0.5;
        c.evolution.substeps = 100;
        c.evolution.omega_max = 6.0;
    } else if (experiment == "supervised-run") {
        c.grid = DomainGrid::line(-8.0, 8.0, 513);
        c.evolution.t_start = -0.5;
        c.evolution.t_end = -0.5;
        c.evolution.substeps = 1;
        c.initial.sigma2 = 0.5;
        c.sink = SinkFunction::gaussian({0.0}, 0.6, 0.4);
    } else {
        throw ConfigError("unknown experiment: " + experiment);
    }
    return c;
}

ExperimentConfig config_from_json(const json& j) {
    try {
        if (!j.is_object()) throw ConfigError("config must be a JSON object");
        reject_unknown_keys(j,
                            {"experiment", "seed", "grid", "evolution", "meanshift",
                             "sink", "initial", "ripple", "out_dir", "dataset",
                             "n_particles", "gap_stride", "tau_nodes", "log_positions",
                             "deterministic"},
                            "config");
        if (!j.contains("experiment"))
            throw ConfigError("config requires an 'experiment' name");
        ExperimentConfig c = default_config(j.at("experiment").get<std::string>());

        c.seed = j.value("seed", c.seed);
        c.grid = grid_from_json(j.value("grid", json()), c.grid);
        if (j.contains("evolution")) {
            const json& e = j.at("evolution");
            reject_unknown_keys(e,
                                {"a2", "t_start", "t_end", "substeps", "omega_max",
                                 "blowup_threshold"},
                                "evolution");
            c.evolution.a2 = e.value("a2", c.evolution.a2);
            c.evolution.t_start = e.value("t_start", c.evolution.t_start);
            c.evolution.t_end = e.value("t_end", c.evolution.t_end);
            c.evolution.substeps = e.value("substeps", c.evolution.substeps);
            if (e.contains("omega_max")) {
                if (e.at("omega_max").is_null())
                    c.evolution.omega_max.reset();
                else
                    c.evolution.omega_max = e.at("omega_max").get<double>();
            }
            c.evolution.blowup_threshold =
                e.value("blowup_threshold", c.evolution.blowup_threshold);
        }
        if (j.contains("meanshift")) {
            const json& m = j.at("meanshift");
            reject_unknown_keys(
                m, {"kernel", "a2", "ball_d", "max_iter", "eps", "merge_tol"},
                "meanshift");
            if (m.contains("kernel")) {
                const json& k = m.at("kernel");
                reject_unknown_keys(k, {"kind", "bandwidth"}, "kernel");
                const std::string kind = k.value("kind", std::string(kKindGaussian));
                if (kind == kKindGaussian)
                    c.meanshift.kernel.kind = KernelKind::gaussian;
                else if (kind == kKindFlatBall)
                    c.meanshift.kernel.kind = KernelKind::flat_ball;
                else
                    throw ConfigError("unknown kernel kind: " + kind);
                c.meanshift.kernel.bandwidth =
                    k.value("bandwidth", c.meanshift.kernel.bandwidth);
            }
            c.meanshift.a2 = m.value("a2", c.meanshift.a2);
            c.meanshift.ball_d = m.value("ball_d", c.meanshift.ball_d);
            c.meanshift.max_iter = m.value("max_iter", c.meanshift.max_iter);
            c.meanshift.eps = m.value("eps", c.meanshift.eps);
            c.meanshift.merge_tol = m.value("merge_tol", c.meanshift.merge_tol);
        }
        c.sink = sink_from_json(j.value("sink", json()), c.sink);
        if (j.contains("initial")) {
            const json& g = j.at("initial");
            reject_unknown_keys(g, {"weights", "means", "sigma2"}, "initial");
            c.initial.weights = g.value("weights", c.initial.weights);
            c.initial.means = g.value("means", c.initial.means);
            c.initial.sigma2 = g.value("sigma2", c.initial.sigma2);
        }
        if (j.contains("ripple")) {
            const json& r = j.at("ripple");
            reject_unknown_keys(r, {"frequency", "amplitude"}, "ripple");
            c.ripple_frequency = r.value("frequency", c.ripple_frequency);
            c.ripple_amplitude = r.value("amplitude", c.ripple_amplitude);
        }
        c.out_dir = j.value("out_dir", c.out_dir);
        if (j.contains("dataset") && !j.at("dataset").is_null())
            c.dataset = j.at("dataset").get<std::string>();
        c.n_particles = j.value("n_particles", c.n_particles);
        c.gap_stride = j.value("gap_stride", c.gap_stride);
        c.tau_nodes = j.value("tau_nodes", c.tau_nodes);
        c.log_positions = j.value("log_positions", c.log_positions);
        c.deterministic = j.value("deterministic", c.deterministic);

        c.validate();
        return c;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config json: ") + e.what());
    }
    return config_from_json(j);
}

void ExperimentConfig::validate() const {
    const auto& names = list_experiments();
    if (std::find(names.begin(), names.end(), experiment) == names.end())
        throw ConfigError("unknown experiment: " + experiment);
    try {
        if (grid.dim() == 0) throw ConfigError("config requires a grid");
        evolution.validate();
        meanshift.validate();
        meanshift.kernel.validate(meanshift.kernel.weights.size());
        sink.validate();
        initial.validate();
        if (initial.dim() != grid.dim())
            throw ConfigError("initial mixture dimension does not match the grid");
        if (n_particles < 2) throw ConfigError("n_particles must be at least 2");
        if (gap_stride == 0) throw ConfigError("gap_stride must be at least 1");
        if (tau_nodes == 0) throw ConfigError("tau_nodes must be at least 1");
        if (dataset && !std::filesystem::exists(*dataset))
            throw ConfigError("dataset not found: " + *dataset);
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

nlohmann::json ExperimentConfig::to_json() const {
    json evolution_json{{"a2", evolution.a2},
                        {"t_start", evolution.t_start},
                        {"t_end", evolution.t_end},
                        {"substeps", evolution.substeps},
                        {"blowup_threshold", evolution.blowup_threshold}};
    evolution_json["omega_max"] =
        evolution.omega_max ? json(*evolution.omega_max) : json(nullptr);
    json meanshift_json{
        {"kernel",
         {{"kind", meanshift.kernel.kind == KernelKind::gaussian ? kKindGaussian
                                                                 : kKindFlatBall},
          {"bandwidth", meanshift.kernel.bandwidth}}},
        {"a2", meanshift.a2},
        {"ball_d", meanshift.ball_d},
        {"max_iter", meanshift.max_iter},
        {"eps", meanshift.eps},
        {"merge_tol", meanshift.merge_tol}};
    return {{"experiment", experiment},
            {"seed", seed},
            {"grid", grid_to_json(grid)},
            {"evolution", evolution_json},
            {"meanshift", meanshift_json},
            {"sink", sink_to_json(sink)},
            {"initial",
             {{"weights", initial.weights},
              {"means", initial.means},
              {"sigma2", initial.sigma2}}},
            {"ripple", {{"frequency", ripple_frequency}, {"amplitude", ripple_amplitude}}},
            {"out_dir", out_dir},
            {"dataset", dataset ? json(*dataset) : json(nullptr)},
            {"n_particles", n_particles},
            {"gap_stride", gap_stride},
            {"tau_nodes", tau_nodes},
            {"log_positions", log_positions},
            {"deterministic", deterministic}};
}

} // namespace mslab
