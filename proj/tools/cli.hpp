#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ldbounds/estimators.hpp"
#include "ldbounds/families.hpp"
#include "ldbounds/lemmas.hpp"
#include "ldbounds/regression.hpp"
#include "ldbounds/renyi.hpp"

namespace ldb::cli {

enum class Format { csv, json };

Format format_from_string(const std::string& s);

struct FamilyConfig {
    std::string kind;  // a built-in kind or a registered custom name
    std::vector<double> params;
    double theta = 0.0;
};

struct ExperimentConfig {
    int version = 1;
    FamilyConfig family;
    std::vector<EstimatorSpec> estimators;
    std::string g_tag = "auto";  // auto: the natural g of the family's regime
    double g_kappa = 0.0;        // power g only
    std::vector<double> eps_ladder;  // empty: default ladder
    std::vector<double> s_grid;      // empty: default grid
    double eps = 0.0;                // rates
    std::vector<double> alpha2_ladder;
    std::vector<int> n_grid;
    std::uint64_t trials = 100000;
    std::optional<std::uint64_t> seed;
    std::string tail_model = "automatic";
    unsigned threads = 0;
    std::string output;
    Format format = Format::csv;

    DensityFamily make_density() const;
    ScalingFunction scaling(const DensityFamily& f) const;
};

// throws ConfigError with "line L, column C" for syntax and a dotted path for fields
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

using Cell = std::variant<double, std::string, bool, long long>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

std::string render(const Table& t, Format f);

Table cmd_bounds(const ExperimentConfig& cfg);
Table cmd_renyi_curve(const ExperimentConfig& cfg);
Table cmd_rates(const ExperimentConfig& cfg);
Table cmd_verify(Level level, std::uint64_t seed, bool& all_pass);

int run(int argc, char** argv);

}  // namespace ldb::cli
