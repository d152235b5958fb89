#include "hyobs/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hyobs::cli {

ConfigError::ConfigError(std::string field, const std::string& message)
    : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

namespace {

// Object view that remembers which keys were read so the rest can be rejected.
class Fields {
  public:
    Fields(const Json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) {
            throw ConfigError(path_.empty() ? "/" : path_, "expected an object");
        }
    }

    std::string path(const std::string& key) const { return path_ + "/" + key; }

    bool has(const std::string& key) const { return obj_.contains(key); }

    const Json& get(const std::string& key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        if (it == obj_.end()) {
            throw ConfigError(path(key), "required field is missing");
        }
        return *it;
    }

    const Json* find(const std::string& key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    void finish() const {
        for (const auto& [key, value] : obj_.items()) {
            if (!seen_.count(key)) {
                throw ConfigError(path(key), "unknown field");
            }
        }
    }

  private:
    const Json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

double read_number(const Json& v, const std::string& path) {
    if (!v.is_number()) {
        throw ConfigError(path, "expected a number");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
        throw ConfigError(path, "expected a finite number");
    }
    return x;
}

double read_positive(const Json& v, const std::string& path) {
    const double x = read_number(v, path);
    if (!(x > 0.0)) {
        throw ConfigError(path, "must be positive");
    }
    return x;
}

Matrix read_matrix(const Json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) {
        throw ConfigError(path, "expected a non-empty array of rows");
    }
    const auto rows = static_cast<Eigen::Index>(v.size());
    Eigen::Index cols = -1;
    Matrix m;
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Json& row = v[static_cast<std::size_t>(i)];
        const std::string row_path = path + "/" + std::to_string(i);
        if (!row.is_array() || row.empty()) {
            throw ConfigError(row_path, "expected a non-empty array of numbers");
        }
        if (cols < 0) {
            cols = static_cast<Eigen::Index>(row.size());
            m.resize(rows, cols);
        } else if (static_cast<Eigen::Index>(row.size()) != cols) {
            std::ostringstream os;
            os << "row has " << row.size() << " entries, expected " << cols;
            throw ConfigError(row_path, os.str());
        }
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = read_number(row[static_cast<std::size_t>(j)], row_path + "/" + std::to_string(j));
        }
    }
    return m;
}

Matrix read_matrix(const Json& v, const std::string& path, Eigen::Index rows, Eigen::Index cols) {
    Matrix m = read_matrix(v, path);
    if (m.rows() != rows || m.cols() != cols) {
        std::ostringstream os;
        os << "expected a " << rows << "x" << cols << " matrix, got " << m.rows() << "x" << m.cols();
        throw ConfigError(path, os.str());
    }
    return m;
}

Vector read_vector(const Json& v, const std::string& path, Eigen::Index n) {
    if (!v.is_array()) {
        throw ConfigError(path, "expected an array of numbers");
    }
    if (static_cast<Eigen::Index>(v.size()) != n) {
        std::ostringstream os;
        os << "expected " << n << " entries, got " << v.size();
        throw ConfigError(path, os.str());
    }
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        x(i) = read_number(v[static_cast<std::size_t>(i)], path + "/" + std::to_string(i));
    }
    return x;
}

std::vector<double> read_grid(const Json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) {
        throw ConfigError(path, "expected a non-empty array of positive numbers");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(read_positive(v[i], path + "/" + std::to_string(i)));
    }
    return out;
}

// Library validation errors are re-raised against the field they came from.
template <typename F>
auto at_field(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(path, e.what());
    }
}

DesignSection parse_design(const Json* v, int nz) {
    DesignSection d;
    d.QF = Matrix::Identity(nz, nz);
    d.QJ = 0.01 * Matrix::Identity(nz, nz);
    if (v == nullptr) {
        d.delta_grid = logspace(1e-3, 1.0, 12);
        d.eta_grid = logspace(1e-6, 1e-1, 8);
        return d;
    }
    Fields f(*v, "/design");
    if (const Json* q = f.find("Q_F")) d.QF = read_matrix(*q, f.path("Q_F"), nz, nz);
    if (const Json* q = f.find("Q_J")) d.QJ = read_matrix(*q, f.path("Q_J"), nz, nz);
    if (const Json* a = f.find("alpha1")) d.alpha1 = read_number(*a, f.path("alpha1"));
    if (const Json* a = f.find("alpha2")) d.alpha2 = read_number(*a, f.path("alpha2"));
    if (f.has("delta") && f.has("delta_grid")) {
        throw ConfigError(f.path("delta_grid"), "give either delta or delta_grid, not both");
    }
    if (f.has("eta") && f.has("eta_grid")) {
        throw ConfigError(f.path("eta_grid"), "give either eta or eta_grid, not both");
    }
    if (const Json* x = f.find("delta")) d.delta = read_positive(*x, f.path("delta"));
    if (const Json* x = f.find("eta")) d.eta = read_positive(*x, f.path("eta"));
    if (const Json* x = f.find("delta_grid")) d.delta_grid = read_grid(*x, f.path("delta_grid"));
    if (const Json* x = f.find("eta_grid")) d.eta_grid = read_grid(*x, f.path("eta_grid"));
    if (!d.delta && d.delta_grid.empty()) d.delta_grid = logspace(1e-3, 1.0, 12);
    if (!d.eta && d.eta_grid.empty()) d.eta_grid = logspace(1e-6, 1e-1, 8);
    f.finish();
    at_field("/design", [&] {
        d.weights().validate(nz);
        return 0;
    });
    return d;
}

SamplingPolicy parse_sampling(const Json& v) {
    Fields f(v, "/simulation/sampling");
    const Json& kind = f.get("policy");
    if (!kind.is_string()) {
        throw ConfigError(f.path("policy"), "expected a string");
    }
    const std::string k = kind.get<std::string>();
    SamplingPolicy p;
    if (k == "periodic") {
        p = SamplingPolicy::periodic(read_positive(f.get("period"), f.path("period")));
    } else if (k == "uniform_random") {
        p = SamplingPolicy::uniform_random(0);
    } else if (k == "sinusoidal") {
        p = SamplingPolicy::sinusoidal();
    } else if (k == "explicit") {
        const Json& t = f.get("times");
        if (!t.is_array() || t.empty()) {
            throw ConfigError(f.path("times"), "expected a non-empty array of numbers");
        }
        std::vector<double> times;
        for (std::size_t i = 0; i < t.size(); ++i) {
            times.push_back(read_number(t[i], f.path("times") + "/" + std::to_string(i)));
        }
        p = SamplingPolicy::explicit_times(std::move(times));
    } else {
        throw ConfigError(f.path("policy"), "unknown policy '" + k + "' (periodic, uniform_random, sinusoidal, explicit)");
    }
    f.finish();
    return p;
}

InitialCondition parse_initial(const Json& v, const PlantModel& plant) {
    Fields f(v, "/simulation/initial");
    InitialCondition ic;
    const bool plant_form = f.has("z") || f.has("zhat") || f.has("theta");
    const bool error_form = f.has("eps") || f.has("theta_tilde");
    if (plant_form && error_form) {
        throw ConfigError("/simulation/initial", "give either z, zhat, theta or eps, theta_tilde, not both");
    }
    if (error_form) {
        ic.form = InitialCondition::Form::error;
        ic.eps = read_vector(f.get("eps"), f.path("eps"), plant.nz());
        ic.theta_tilde = read_vector(f.get("theta_tilde"), f.path("theta_tilde"), plant.ny());
    } else {
        ic.form = InitialCondition::Form::plant_observer;
        ic.z = read_vector(f.get("z"), f.path("z"), plant.nz());
        ic.zhat = read_vector(f.get("zhat"), f.path("zhat"), plant.nz());
        ic.theta = read_vector(f.get("theta"), f.path("theta"), plant.ny());
    }
    if (const Json* t = f.find("tau")) {
        const double tau = read_number(*t, f.path("tau"));
        if (tau < 0.0) {
            throw ConfigError(f.path("tau"), "must be non-negative");
        }
        ic.tau = tau;
    }
    f.finish();
    return ic;
}

SimulationSection parse_simulation(const Json& v, const PlantModel& plant, const TimingBounds& timing) {
    Fields f(v, "/simulation");
    SimulationSection s;
    s.initial = parse_initial(f.get("initial"), plant);
    s.horizon = read_positive(f.get("horizon"), f.path("horizon"));
    s.sampling = parse_sampling(f.get("sampling"));
    if (const Json* seed = f.find("seed")) {
        if (!seed->is_number_unsigned()) {
            throw ConfigError(f.path("seed"), "expected a non-negative integer");
        }
        s.sampling.seed = seed->get<std::uint64_t>();
    }
    if (const Json* d = f.find("dense_points")) {
        if (!d->is_number_integer() || d->get<long long>() < 2 || d->get<long long>() > 1000000) {
            throw ConfigError(f.path("dense_points"), "expected an integer in [2, 1000000]");
        }
        s.dense_points = d->get<int>();
    }
    f.finish();
    if (s.initial.tau) {
        if (*s.initial.tau > timing.T2()) {
            throw ConfigError("/simulation/initial/tau", "must not exceed T2");
        }
        s.sampling.first_sample = s.initial.tau;
    }
    return s;
}

}  // namespace

DesignWeights DesignSection::weights() const {
    DesignWeights w;
    w.QF = QF;
    w.QJ = QJ;
    w.alpha1 = alpha1;
    w.alpha2 = alpha2;
    return w;
}

ProblemConfig parse_config(const Json& doc) {
    Fields root(doc, "");
    Fields plant_f(root.get("plant"), "/plant");
    const Matrix a = read_matrix(plant_f.get("A"), "/plant/A");
    const Matrix c = read_matrix(plant_f.get("C"), "/plant/C");
    plant_f.finish();
    PlantModel plant = at_field("/plant", [&] { return PlantModel(a, c); });

    Fields timing_f(root.get("timing"), "/timing");
    const double t1 = read_number(timing_f.get("T1"), "/timing/T1");
    const double t2 = read_number(timing_f.get("T2"), "/timing/T2");
    timing_f.finish();
    TimingBounds timing = at_field("/timing", [&] { return TimingBounds(t1, t2); });

    DesignSection design = parse_design(root.find("design"), plant.nz());
    std::optional<SimulationSection> sim;
    if (const Json* s = root.find("simulation")) {
        sim = parse_simulation(*s, plant, timing);
    }
    root.finish();
    return ProblemConfig{std::move(plant), timing, std::move(design), std::move(sim)};
}

ProblemConfig parse_config_text(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc);
}

ProblemConfig load_config(const std::string& path) { return parse_config(read_json_file(path)); }

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json vector_to_json(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Json to_json(const ProblemConfig& config) {
    Json doc;
    doc["plant"] = {{"A", matrix_to_json(config.plant.A())}, {"C", matrix_to_json(config.plant.C())}};
    doc["timing"] = {{"T1", config.timing.T1()}, {"T2", config.timing.T2()}};
    const DesignSection& d = config.design;
    Json design;
    design["Q_F"] = matrix_to_json(d.QF);
    design["Q_J"] = matrix_to_json(d.QJ);
    design["alpha1"] = d.alpha1;
    design["alpha2"] = d.alpha2;
    if (d.delta) {
        design["delta"] = *d.delta;
    } else {
        design["delta_grid"] = d.delta_grid;
    }
    if (d.eta) {
        design["eta"] = *d.eta;
    } else {
        design["eta_grid"] = d.eta_grid;
    }
    doc["design"] = std::move(design);
    if (config.simulation) {
        const SimulationSection& s = *config.simulation;
        Json init;
        if (s.initial.form == InitialCondition::Form::error) {
            init["eps"] = vector_to_json(s.initial.eps);
            init["theta_tilde"] = vector_to_json(s.initial.theta_tilde);
        } else {
            init["z"] = vector_to_json(s.initial.z);
            init["zhat"] = vector_to_json(s.initial.zhat);
            init["theta"] = vector_to_json(s.initial.theta);
        }
        if (s.initial.tau) init["tau"] = *s.initial.tau;
        Json sampling;
        sampling["policy"] = to_string(s.sampling.kind);
        if (s.sampling.kind == SamplingPolicy::Kind::periodic) sampling["period"] = s.sampling.period;
        if (s.sampling.kind == SamplingPolicy::Kind::explicit_times) sampling["times"] = s.sampling.times;
        Json sim;
        sim["initial"] = std::move(init);
        sim["horizon"] = s.horizon;
        sim["sampling"] = std::move(sampling);
        sim["seed"] = s.sampling.seed;
        sim["dense_points"] = s.dense_points;
        doc["simulation"] = std::move(sim);
    }
    return doc;
}

GainsFile parse_gains(const Json& doc, const PlantModel& plant) {
    Fields f(doc, "");
    const int nz = plant.nz();
    const int ny = plant.ny();
    Matrix l = read_matrix(f.get("L"), "/L", nz, ny);
    Matrix h = read_matrix(f.get("H"), "/H", ny, ny);
    Matrix fm = read_matrix(f.get("F"), "/F", nz, ny);
    GainsFile out{ObserverGains(std::move(l), std::move(h), std::move(fm)), std::nullopt};
    if (const Json* c = f.find("certificate")) {
        Fields cf(*c, "/certificate");
        Matrix p1 = read_matrix(cf.get("P1"), "/certificate/P1", nz, nz);
        Matrix p2 = read_matrix(cf.get("P2"), "/certificate/P2", ny, ny);
        const double delta = read_number(cf.get("delta"), "/certificate/delta");
        const double eta = read_number(cf.get("eta"), "/certificate/eta");
        cf.finish();
        out.certificate = at_field("/certificate", [&] { return LyapunovCertificate(p1, p2, delta, eta); });
    }
    f.finish();
    return out;
}

GainsFile load_gains(const std::string& path, const PlantModel& plant) {
    return parse_gains(read_json_file(path), plant);
}

Json to_json(const GainsFile& g) {
    Json doc;
    doc["L"] = matrix_to_json(g.gains.L());
    doc["H"] = matrix_to_json(g.gains.H());
    doc["F"] = matrix_to_json(g.gains.F());
    if (g.certificate) {
        doc["certificate"] = {{"P1", matrix_to_json(g.certificate->P1())},
                              {"P2", matrix_to_json(g.certificate->P2())},
                              {"delta", g.certificate->delta()},
                              {"eta", g.certificate->eta()}};
    }
    return doc;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("", "cannot read " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return Json::parse(buf.str());
    } catch (const Json::parse_error& e) {
        throw ConfigError("", path + ": malformed JSON: " + e.what());
    }
}

void write_json_file(const std::string& path, const Json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << doc.dump(2) << '\n';
    if (!out) {
        throw std::runtime_error("write failed for " + path);
    }
}

}  // namespace hyobs::cli
