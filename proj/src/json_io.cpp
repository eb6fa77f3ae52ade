#include "focklab/json_io.hpp"

#include <fstream>
#include <sstream>

namespace focklab {

json to_json(const DensityMatrix& rho) {
    json j;
    j["cutoff"] = rho.cutoff().per_mode();
    const Mat& M = rho.matrix();
    std::vector<std::vector<double>> re(M.rows()), im(M.rows());
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        re[r].resize(M.cols());
        im[r].resize(M.cols());
        for (Eigen::Index c = 0; c < M.cols(); ++c) {
            re[r][c] = M(r, c).real();
            im[r][c] = M(r, c).imag();
        }
    }
    j["re"] = re;
    j["im"] = im;
    j["tail_mass"] = rho.tail_mass();
    return j;
}

DensityMatrix density_from_json(const json& j) {
    if (!j.contains("cutoff") || !j.contains("re") || !j.contains("im"))
        throw ConfigError("density JSON needs cutoff/re/im fields");
    FockCutoff cutoff(j.at("cutoff").get<std::vector<int>>());
    auto re = j.at("re").get<std::vector<std::vector<double>>>();
    auto im = j.at("im").get<std::vector<std::vector<double>>>();
    if (re.size() != cutoff.dim() || im.size() != cutoff.dim())
        throw ConfigError("density JSON: matrix size does not match cutoff");
    Mat M(cutoff.dim(), cutoff.dim());
    for (std::size_t r = 0; r < cutoff.dim(); ++r) {
        if (re[r].size() != cutoff.dim() || im[r].size() != cutoff.dim())
            throw ConfigError("density JSON: ragged matrix");
        for (std::size_t c = 0; c < cutoff.dim(); ++c)
            M(r, c) = cd(re[r][c], im[r][c]);
    }
    return DensityMatrix(cutoff, std::move(M), j.value("tail_mass", 0.0));
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& M) {
    std::vector<std::vector<double>> rows(M.rows());
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        rows[r].resize(M.cols());
        for (Eigen::Index c = 0; c < M.cols(); ++c) rows[r][c] = M(r, c);
    }
    return json(rows);
}

std::vector<double> vector_to_std(const Eigen::VectorXd& v) {
    return {v.data(), v.data() + v.size()};
}

}  // namespace

json to_json(const GaussianSpec& spec) {
    json j;
    j["d"] = vector_to_std(spec.d);
    j["gamma"] = matrix_to_json(spec.gamma);
    j["nu"] = vector_to_std(spec.nu);
    std::vector<json> beta;
    for (Eigen::Index i = 0; i < spec.beta.size(); ++i) {
        if (std::isinf(spec.beta(i)))
            beta.push_back("inf");
        else
            beta.push_back(spec.beta(i));
    }
    j["beta"] = beta;
    return j;
}

json to_json(const ConvolutionReport& report) {
    json j;
    j["output"] = to_json(report.output);
    j["discarded_mass"] = report.discarded_mass;
    std::vector<json> steps;
    for (const auto& s : report.steps)
        steps.push_back({{"eta", s.eta},
                         {"joint_cutoff", s.joint_cutoff},
                         {"discarded", s.discarded}});
    j["steps"] = steps;
    return j;
}

json to_json(const GapEstimate& estimate) {
    json j;
    j["lambda_hat"] = estimate.lambda_hat;
    j["cutoff"] = estimate.cutoff;
    j["deflation_residual"] = estimate.deflation_residual;
    j["smoothed"] = estimate.smoothed;
    return j;
}

namespace {

std::vector<int> parse_multi_index(const std::string& key) {
    std::vector<int> idx;
    std::stringstream ss(key);
    std::string tok;
    while (std::getline(ss, tok, ','))
        idx.push_back(std::stoi(tok));
    if (idx.empty()) throw ConfigError("empty amplitude key");
    return idx;
}

cd parse_complex(const json& v) {
    if (v.is_number()) return cd(v.get<double>(), 0.0);
    if (v.is_array() && v.size() == 2)
        return cd(v[0].get<double>(), v[1].get<double>());
    throw ConfigError("amplitudes must be numbers or [re, im] pairs");
}

std::variant<PureSpec, ThermalSpec> base_spec_from_json(const json& j) {
    std::string kind = j.value("kind", "");
    if (kind == "pure") {
        PureSpec p;
        p.cutoff = j.at("cutoff").get<std::vector<int>>();
        for (const auto& [key, val] : j.at("amplitudes").items())
            p.amplitudes[parse_multi_index(key)] = parse_complex(val);
        return p;
    }
    if (kind == "thermal") {
        ThermalSpec t;
        t.cutoff = j.at("cutoff").get<std::vector<int>>();
        if (j.at("nu").is_number())
            t.nu = {j.at("nu").get<double>()};
        else
            t.nu = j.at("nu").get<std::vector<double>>();
        return t;
    }
    throw ConfigError("state kind must be pure|thermal|mixture");
}

}  // namespace

StateSpec state_spec_from_json(const json& j) {
    std::string kind = j.value("kind", "");
    if (kind == "mixture") {
        MixtureSpec mix;
        for (const auto& comp : j.at("components")) {
            mix.weights.push_back(comp.at("weight").get<double>());
            mix.components.push_back(base_spec_from_json(comp.at("state")));
        }
        return mix;
    }
    auto base = base_spec_from_json(j);
    if (std::holds_alternative<PureSpec>(base)) return std::get<PureSpec>(base);
    return std::get<ThermalSpec>(base);
}

ExperimentConfig experiment_config_from_json(const json& j) {
    ExperimentConfig cfg;
    if (!j.contains("state")) throw ConfigError("config needs a state spec");
    cfg.state = state_spec_from_json(j.at("state"));
    cfg.n_list = j.value("n_list", std::vector<int>{4, 8, 16, 32, 64});
    cfg.cutoff = j.value("cutoff", 64);
    cfg.tail_budget = j.value("tail_budget", 1e-8);
    cfg.grid.radius = j.value("grid_radius", 0.0);
    cfg.grid.points_per_axis = j.value("grid_points", 80);
    cfg.metrics = j.value("metrics",
                          std::vector<std::string>{"trace", "hs", "relent", "J"});
    cfg.gap_cutoff = j.value("gap_cutoff", 14);
    cfg.seed = j.value("seed", std::uint64_t{1});
    cfg.out_dir = j.value("out", std::string{});
    return cfg;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("bad JSON in " + path + ": " + e.what());
    }
    return j;
}

void save_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
}

}  // namespace focklab
