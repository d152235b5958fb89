#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "hyobs/lyapunov.hpp"
#include "hyobs/model.hpp"
#include "hyobs/simulator.hpp"
#include "hyobs/synthesis.hpp"

namespace hyobs::cli {

using Json = nlohmann::ordered_json;

/// Malformed configuration or gains document. field() is a JSON pointer such
/// as "/design/alpha1", or empty for syntax errors (the message then carries
/// line and column).
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string field, const std::string& message);

    const std::string& field() const { return field_; }

  private:
    std::string field_;
};

struct DesignSection {
    Matrix QF;
    Matrix QJ;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    std::optional<double> delta;
    std::optional<double> eta;
    std::vector<double> delta_grid;
    std::vector<double> eta_grid;

    DesignWeights weights() const;
    bool has_grid() const { return !delta_grid.empty() || !eta_grid.empty(); }
};

struct InitialCondition {
    enum class Form { plant_observer, error };

    Form form = Form::plant_observer;
    Vector z;
    Vector zhat;
    Vector theta;
    Vector eps;
    Vector theta_tilde;
    std::optional<double> tau;  // τ(0, 0) = t_1; taken from the sampling policy when absent
};

struct SimulationSection {
    InitialCondition initial;
    double horizon = 0.0;
    SamplingPolicy sampling;  // sampling.seed is the simulation seed
    int dense_points = 200;
};

struct ProblemConfig {
    PlantModel plant;
    TimingBounds timing;
    DesignSection design;
    std::optional<SimulationSection> simulation;
};

/// Strict parse: unknown fields are rejected and every matrix is checked
/// against n_z, n_y inferred from A and C.
ProblemConfig parse_config(const Json& doc);
ProblemConfig parse_config_text(const std::string& text);
ProblemConfig load_config(const std::string& path);

/// Emits every field, defaults included, so that parsing the result yields the same config.
Json to_json(const ProblemConfig& config);

/// Gains document: {"L": [[...]], "H": [[...]], "F": [[...]]} and an optional
/// "certificate": {"P1", "P2", "delta", "eta"}.
struct GainsFile {
    ObserverGains gains;
    std::optional<LyapunovCertificate> certificate;
};

GainsFile parse_gains(const Json& doc, const PlantModel& plant);
GainsFile load_gains(const std::string& path, const PlantModel& plant);
Json to_json(const GainsFile& gains);

Json matrix_to_json(const Matrix& m);
Json vector_to_json(const Vector& v);

Json read_json_file(const std::string& path);
/// Two-space indentation and a trailing newline.
void write_json_file(const std::string& path, const Json& doc);

}  // namespace hyobs::cli
